//! Curve corpus files.
//!
//! A corpus is a JSON array of records
//! `{"kind": "genus1" | "hyperelliptic2", "tau": [re, im], "poly": [[re, im], ...], "name": "..."}`.
//! `poly` lists the six coefficients of the monic quintic in ascending order;
//! `name` is optional. Curves are referenced as `corpus#name` (built-in corpus)
//! or `path#name` / `path#index` (file corpus).

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CurveSpec;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusRecord {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl CorpusRecord {
    pub fn to_spec(&self) -> Result<CurveSpec> {
        match self.kind.as_str() {
            "genus1" => {
                let [re, im] = self
                    .tau
                    .ok_or_else(|| Error::InvalidInput("genus1 record needs \"tau\"".into()))?;
                Ok(CurveSpec::Genus1 { tau: Complex64::new(re, im) })
            }
            "hyperelliptic2" => {
                let poly = self
                    .poly
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("hyperelliptic2 record needs \"poly\"".into()))?;
                Ok(CurveSpec::Hyperelliptic2 {
                    poly: poly.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
                })
            }
            other => Err(Error::InvalidInput(format!("unknown curve kind {other:?}"))),
        }
    }

    pub fn from_spec(spec: &CurveSpec, name: Option<&str>) -> Self {
        match spec {
            CurveSpec::Genus1 { tau } => CorpusRecord {
                kind: "genus1".into(),
                tau: Some([tau.re, tau.im]),
                poly: None,
                name: name.map(str::to_owned),
            },
            CurveSpec::Hyperelliptic2 { poly } => CorpusRecord {
                kind: "hyperelliptic2".into(),
                tau: None,
                poly: Some(poly.iter().map(|c| [c.re, c.im]).collect()),
                name: name.map(str::to_owned),
            },
        }
    }
}

fn quintic(coeffs: [f64; 6]) -> Vec<[f64; 2]> {
    coeffs.iter().map(|&c| [c, 0.0]).collect()
}

/// Curves available as `corpus#name`.
pub fn builtin() -> Vec<CorpusRecord> {
    vec![
        CorpusRecord {
            kind: "hyperelliptic2".into(),
            tau: None,
            poly: Some(quintic([-1.0, 0.0, 0.0, 0.0, 0.0, 1.0])),
            name: Some("x5m1".into()),
        },
        CorpusRecord {
            kind: "hyperelliptic2".into(),
            tau: None,
            // x (x - 1)(x + 1)(x - 2)(x + 3)
            poly: Some(quintic([0.0, 6.0, -7.0, -3.0, 1.0, 1.0])),
            name: Some("real5".into()),
        },
        CorpusRecord {
            kind: "genus1".into(),
            tau: Some([0.0, 1.0]),
            poly: None,
            name: Some("square".into()),
        },
        CorpusRecord {
            kind: "genus1".into(),
            tau: Some([0.5, 3f64.sqrt() / 2.0]),
            poly: None,
            name: Some("hexagonal".into()),
        },
    ]
}

pub fn parse(json: &str) -> Result<Vec<CorpusRecord>> {
    serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("corpus JSON: {e}")))
}

pub fn load(path: &Path) -> Result<Vec<CorpusRecord>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read corpus {}: {e}", path.display())))?;
    parse(&text)
}

fn select(records: &[CorpusRecord], key: &str) -> Result<CurveSpec> {
    if let Some(r) = records.iter().find(|r| r.name.as_deref() == Some(key)) {
        return r.to_spec();
    }
    if let Ok(idx) = key.parse::<usize>() {
        if let Some(r) = records.get(idx) {
            return r.to_spec();
        }
    }
    Err(Error::InvalidInput(format!("curve {key:?} not found in corpus")))
}

/// Resolves `corpus#name`, `path#name` or `path#index`.
pub fn resolve(reference: &str) -> Result<CurveSpec> {
    let (source, key) = reference
        .rsplit_once('#')
        .ok_or_else(|| Error::InvalidInput(format!("curve reference {reference:?} lacks '#'")))?;
    if source == "corpus" {
        select(&builtin(), key)
    } else {
        select(&load(Path::new(source))?, key)
    }
}
