//! One-shot daily run: for each city select content, route, generate,
//! gate and publish.

use std::time::Duration;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::analysis::{
    classify_criticality, route, select_content, Architecture, ContentConfig, CriticalityRules, RoutingDecision,
};
use crate::eval::{check_faithfulness, Verdict};
use crate::neural::{Endpoint, GenError, GenRequest, NeuralClient};
use crate::pipeline::{run_pipeline, Lexicon, PipelineConfig, VariantMode};
use crate::publish::{compose_thread, publish, PublishReceipt, RetryPolicy, Sink, DEFAULT_LIMIT};
use crate::report::ReportText;
use crate::store::Store;
use crate::template::{generate, TemplateError, TemplateRegistry};

/// Generators and rules used by a run.
#[derive(Debug, Clone)]
pub struct Engines {
    pub templates: TemplateRegistry,
    pub lexicon: Lexicon,
    pub rules: CriticalityRules,
    pub pipeline: PipelineConfig,
}

impl Default for Engines {
    fn default() -> Self {
        Engines {
            templates: TemplateRegistry::default_pt(),
            lexicon: Lexicon::default_pt(),
            rules: CriticalityRules::default(),
            pipeline: PipelineConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyConfig {
    /// Empty means every city in the store.
    pub cities: Vec<String>,
    pub date: NaiveDate,
    pub seed: u64,
    pub neural_override: bool,
    pub endpoint: Option<Endpoint>,
    pub generator_timeout_ms: u64,
    pub sink: Sink,
    pub thread_limit: usize,
    pub content: ContentConfig,
    pub retry: RetryPolicy,
}

impl DailyConfig {
    pub fn new(date: NaiveDate, sink: Sink) -> Self {
        DailyConfig {
            cities: Vec::new(),
            date,
            seed: 0,
            neural_override: false,
            endpoint: None,
            generator_timeout_ms: 30_000,
            sink,
            thread_limit: DEFAULT_LIMIT,
            content: ContentConfig::default(),
            retry: RetryPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CityStatus {
    Published,
    /// Neural output failed the faithfulness gate.
    Blocked,
    /// Delivery did not complete for every chunk.
    Undelivered,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitySummary {
    pub city: String,
    pub report_id: String,
    pub seed: u64,
    pub status: CityStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<RoutingDecision>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub architecture: Option<Architecture>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faithfulness: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receipt: Option<PublishReceipt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailySummary {
    pub date: NaiveDate,
    pub seed: u64,
    pub cities: Vec<CitySummary>,
}

impl DailySummary {
    /// One line per city.
    pub fn lines(&self) -> Vec<String> {
        self.cities
            .iter()
            .map(|c| {
                let arch = c.architecture.map(|a| a.to_string()).unwrap_or_else(|| "-".into());
                let mut line = format!(
                    "{:<16} {:<11} {:<9}",
                    c.city,
                    format!("{:?}", c.status).to_lowercase(),
                    arch
                );
                if let Some(f) = &c.fallback {
                    line.push_str(&format!(" fallback: {f}"));
                }
                if let Some(e) = &c.error {
                    line.push_str(&format!(" error: {e}"));
                }
                line
            })
            .collect()
    }
}

pub fn slug(city: &str) -> String {
    let folded: String = city.nfd().filter(|c| !is_combining_mark(*c)).collect();
    folded
        .to_lowercase()
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("-")
}

/// 64-bit FNV-1a.
pub fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

pub fn city_seed(seed: u64, city: &str) -> u64 {
    seed.wrapping_add(fnv1a(city))
}

struct Generated {
    report: ReportText,
    fallback: Option<String>,
}

fn pipeline(doc: &crate::ir::IntentDocument, engines: &Engines, seed: u64) -> Result<ReportText, String> {
    let config = PipelineConfig {
        mode: VariantMode::Seeded(seed),
        ..engines.pipeline.clone()
    };
    run_pipeline(doc, &engines.lexicon, &config).map_err(|e| e.to_string())
}

/// Lazily connected generator shared by all cities of a run.
struct Generator<'a> {
    endpoint: Option<&'a Endpoint>,
    timeout: Duration,
    client: Option<Result<NeuralClient, String>>,
}

impl Generator<'_> {
    fn generate(&mut self, req: &GenRequest) -> Result<String, GenError> {
        let Some(endpoint) = self.endpoint else {
            return Err(GenError::Unavailable("no generator endpoint configured".into()));
        };
        let timeout = self.timeout;
        let client = self
            .client
            .get_or_insert_with(|| NeuralClient::connect(endpoint, timeout).map_err(|e| e.to_string()));
        match client {
            Ok(c) => c.generate(req).map(|r| r.output),
            Err(e) => Err(GenError::Unavailable(e.clone())),
        }
    }
}

fn generate_for(
    arch: Architecture,
    doc: &crate::ir::IntentDocument,
    engines: &Engines,
    generator: &mut Generator<'_>,
    seed: u64,
) -> Result<Generated, String> {
    match arch {
        Architecture::Template => match generate(doc, &engines.templates) {
            Ok(report) => Ok(Generated { report, fallback: None }),
            Err(TemplateError::NoMatch) => Ok(Generated {
                report: pipeline(doc, engines, seed)?,
                fallback: Some("no template matched".into()),
            }),
            Err(e) => Err(e.to_string()),
        },
        Architecture::Pipeline => Ok(Generated {
            report: pipeline(doc, engines, seed)?,
            fallback: None,
        }),
        Architecture::Neural => match generator.generate(&GenRequest::for_document(doc, seed)) {
            Ok(text) => Ok(Generated {
                report: ReportText {
                    text,
                    architecture: Architecture::Neural,
                    slots: Vec::new(),
                    template_id: None,
                    trace: None,
                    seed: Some(seed),
                },
                fallback: None,
            }),
            Err(e) if e.is_unavailable() => {
                log::warn!("neural generator unavailable, using the pipeline: {e}");
                Ok(Generated {
                    report: pipeline(doc, engines, seed)?,
                    fallback: Some(e.to_string()),
                })
            }
            Err(e) => Err(e.to_string()),
        },
    }
}

fn run_city(
    store: &Store,
    engines: &Engines,
    config: &DailyConfig,
    generator: &mut Generator<'_>,
    summary: &mut CitySummary,
) -> Result<(), String> {
    let doc = select_content(store, &summary.city, config.date, &config.content).map_err(|e| e.to_string())?;
    let decision = route(&classify_criticality(&doc, &engines.rules), config.neural_override);
    let arch = decision.architecture;
    summary.decision = Some(decision);

    let Generated { report, fallback } = generate_for(arch, &doc, engines, generator, summary.seed)?;
    summary.architecture = Some(report.architecture);
    summary.fallback = fallback;
    summary.template_id = report.template_id.clone();
    summary.text = Some(report.text.clone());

    if report.architecture == Architecture::Neural {
        let verdict = check_faithfulness(&doc, &report.text);
        let passed = verdict.passed();
        summary.faithfulness = Some(verdict);
        if !passed {
            log::error!("blocked neural report for {}: unsupported content", summary.city);
            summary.status = CityStatus::Blocked;
            return Ok(());
        }
    }

    let thread = compose_thread(&summary.report_id, &report.text, config.thread_limit).map_err(|e| e.to_string())?;
    let receipt = publish(&thread, &config.sink, config.date, &config.retry).map_err(|e| e.to_string())?;
    summary.status = if receipt.delivered() {
        CityStatus::Published
    } else {
        CityStatus::Undelivered
    };
    summary.receipt = Some(receipt);
    Ok(())
}

/// Processes every configured city. A failing city is recorded in its
/// summary and does not stop the others.
pub fn run_daily(store: &Store, engines: &Engines, config: &DailyConfig) -> DailySummary {
    let cities: Vec<String> = if config.cities.is_empty() {
        store.cities().into_iter().map(str::to_owned).collect()
    } else {
        config.cities.clone()
    };
    let mut generator = Generator {
        endpoint: config.endpoint.as_ref().filter(|_| config.neural_override),
        timeout: Duration::from_millis(config.generator_timeout_ms),
        client: None,
    };
    let cities = cities
        .into_iter()
        .map(|city| {
            let mut summary = CitySummary {
                report_id: slug(&city),
                seed: city_seed(config.seed, &city),
                city,
                status: CityStatus::Failed,
                decision: None,
                architecture: None,
                fallback: None,
                template_id: None,
                text: None,
                faithfulness: None,
                receipt: None,
                error: None,
            };
            if let Err(e) = run_city(store, engines, config, &mut generator, &mut summary) {
                log::error!("{}: {e}", summary.city);
                summary.status = CityStatus::Failed;
                summary.error = Some(e);
            }
            summary
        })
        .collect();
    DailySummary {
        date: config.date,
        seed: config.seed,
        cities,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs_and_seeds() {
        assert_eq!(slug("Itajaí"), "itajai");
        assert_eq!(slug("Rio de Janeiro"), "rio-de-janeiro");
        assert_eq!(fnv1a(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a("a"), 0xaf63_dc4c_8601_ec8c);
        assert_ne!(city_seed(1, "Santos"), city_seed(1, "Recife"));
    }
}
