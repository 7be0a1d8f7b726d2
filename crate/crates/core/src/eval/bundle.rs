use std::path::{Path, PathBuf};

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MetricError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingDimension {
    pub name: String,
    pub question: String,
}

pub fn rating_dimensions() -> Vec<RatingDimension> {
    [
        ("fluency", "O texto é fácil de ler?"),
        ("semantics", "O texto expressa claramente os dados de entrada?"),
        ("lexical_variety", "O texto é original, ou o conteúdo é repetitivo?"),
    ]
    .into_iter()
    .map(|(name, question)| RatingDimension {
        name: name.into(),
        question: question.into(),
    })
    .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleItem {
    pub item: usize,
    pub input_ir: String,
    pub output: String,
}

/// Manifest of a human-evaluation package; written as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LikertBundle {
    pub seed: u64,
    pub sample_size: usize,
    pub raters: usize,
    pub scale: (u8, u8),
    pub dimensions: Vec<RatingDimension>,
    pub items: Vec<BundleItem>,
    pub sheets: Vec<PathBuf>,
}

/// Samples `sample_size` pairs and writes one CSV rating sheet per rater,
/// each in its own shuffled order, plus the manifest.
pub fn make_human_eval_bundle(
    pairs: &[(String, String)],
    sample_size: usize,
    raters: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<LikertBundle, MetricError> {
    if sample_size > pairs.len() {
        return Err(MetricError::SampleTooLarge {
            requested: sample_size,
            available: pairs.len(),
        });
    }
    let io = |p: &Path| {
        let p = p.display().to_string();
        move |e| MetricError::Io(p, e)
    };
    std::fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = index::sample(&mut rng, pairs.len(), sample_size).into_vec();
    chosen.sort_unstable();
    let items: Vec<BundleItem> = chosen
        .iter()
        .enumerate()
        .map(|(item, &i)| BundleItem {
            item,
            input_ir: pairs[i].0.clone(),
            output: pairs[i].1.clone(),
        })
        .collect();
    let dims = rating_dimensions();

    let mut sheets = Vec::new();
    for r in 0..raters {
        let mut order: Vec<usize> = (0..items.len()).collect();
        order.shuffle(&mut rng);
        let path = out_dir.join(format!("rater_{}.csv", r + 1));
        let mut w = csv::Writer::from_path(&path).map_err(|e| MetricError::Csv(e.to_string()))?;
        let mut header = vec!["item".to_owned(), "input_ir".into(), "output".into()];
        header.extend(dims.iter().map(|d| d.name.clone()));
        w.write_record(&header).map_err(|e| MetricError::Csv(e.to_string()))?;
        for &k in &order {
            let it = &items[k];
            let mut row = vec![it.item.to_string(), it.input_ir.clone(), it.output.clone()];
            row.extend(dims.iter().map(|_| String::new()));
            w.write_record(&row).map_err(|e| MetricError::Csv(e.to_string()))?;
        }
        w.flush().map_err(io(&path))?;
        sheets.push(path);
    }

    let bundle = LikertBundle {
        seed,
        sample_size,
        raters,
        scale: (1, 5),
        dimensions: dims,
        items,
        sheets,
    };
    let manifest = out_dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&bundle).expect("bundle serializes");
    std::fs::write(&manifest, json).map_err(io(&manifest))?;
    Ok(bundle)
}
