use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use azul::analysis::CriticalityRules;
use azul::daily::Engines;
use azul::pipeline::Lexicon;
use azul::template::load_templates;
use chrono::NaiveDate;
use serde::Deserialize;

/// Settings read from `--config`; command-line flags win over these.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data_dir: Option<PathBuf>,
    pub cities: Vec<String>,
    pub date: Option<NaiveDate>,
    pub seed: Option<u64>,
    pub neural_override: bool,
    pub endpoint: Option<String>,
    pub sink: Option<String>,
    pub generator_timeout_ms: Option<u64>,
    pub thread_limit: Option<usize>,
    pub lexicon: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub oil_threshold: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut config: RunConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut config.data_dir,
            &mut config.lexicon,
            &mut config.templates,
            &mut config.rules,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        for p in [&config.lexicon, &config.templates, &config.rules]
            .into_iter()
            .flatten()
        {
            if !p.exists() {
                bail!("{} names {}, which does not exist", path.display(), p.display());
            }
        }
        Ok(config)
    }

    pub fn engines(&self) -> Result<Engines> {
        let mut engines = Engines::default();
        if let Some(p) = &self.lexicon {
            engines.lexicon = Lexicon::load(p)?;
        }
        if let Some(p) = &self.templates {
            engines.templates = load_templates(p)?;
        }
        if let Some(p) = &self.rules {
            engines.rules = CriticalityRules::load(p)?;
        }
        if let Some(t) = self.oil_threshold {
            engines.rules = engines.rules.with_oil_threshold(t);
        }
        Ok(engines)
    }
}
