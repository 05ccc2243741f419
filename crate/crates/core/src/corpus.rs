//! The bundled example theories and their golden verdicts.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::engine::Quadrant;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Example {
    pub id: String,
    pub title: String,
    #[serde(skip)]
    pub source: String,
}

const BUNDLED: &[(&str, &str)] = &[
    ("cauchy_schwarz", include_str!("../../../corpus/cauchy_schwarz.econ")),
    ("contradictory", include_str!("../../../corpus/contradictory.econ")),
    ("false_quadrant", include_str!("../../../corpus/false_quadrant.econ")),
    ("gender_wage_gap", include_str!("../../../corpus/gender_wage_gap.econ")),
    ("tax_incidence", include_str!("../../../corpus/tax_incidence.econ")),
    ("tax_incidence_missing", include_str!("../../../corpus/tax_incidence_missing.econ")),
];

const GOLDEN: &str = include_str!("../../../corpus/golden.json");

fn title_of(id: &str, source: &str) -> String {
    source
        .lines()
        .find_map(|l| l.trim().strip_prefix("// title:"))
        .map(|t| t.trim().to_string())
        .unwrap_or_else(|| id.to_string())
}

impl Example {
    pub fn new(id: &str, source: String) -> Example {
        Example {
            id: id.to_string(),
            title: title_of(id, &source),
            source,
        }
    }
}

/// Examples sorted by id.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub examples: Vec<Example>,
    pub golden: BTreeMap<String, Quadrant>,
}

impl Corpus {
    pub fn bundled() -> Corpus {
        Corpus {
            examples: BUNDLED.iter().map(|(id, s)| Example::new(id, s.to_string())).collect(),
            golden: serde_json::from_str(GOLDEN).expect("bundled golden file parses"),
        }
    }

    /// Every `*.econ` file in `dir`, plus `golden.json` when present.
    pub fn from_dir(dir: &Path) -> std::io::Result<Corpus> {
        let mut examples = Vec::new();
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "econ") {
                let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
                examples.push(Example::new(&id, std::fs::read_to_string(&path)?));
            }
        }
        examples.sort_by(|a, b| a.id.cmp(&b.id));
        let golden = match std::fs::read_to_string(dir.join("golden.json")) {
            Ok(s) => serde_json::from_str(&s).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e),
        };
        Ok(Corpus { examples, golden })
    }

    pub fn get(&self, id: &str) -> Option<&Example> {
        self.examples.iter().find(|e| e.id == id)
    }
}
