//! Batch runner: a JSON-configurable scenario executes one verification
//! pipeline and yields a report of named checks plus CSV artifacts.
//!
//! Exit codes: 0 all checks pass, 1 some check fails, 2 invalid input,
//! 3 numerical failure (truncation cap, quadrature, lost zeros and the like).

mod pipelines;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curve::corpus::{self, CorpusRecord};
use crate::curve::CurveSpec;
use crate::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_CURVE: &str = "corpus#x5m1";
/// Admissible range of user tolerances.
pub const TOLERANCE_RANGE: (f64, f64) = (1e-16, 1e-1);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    ThetaSelftest,
    FayTrisecant,
    DivisorIdentities,
    Toda,
    Bdhe,
    RsDynamics,
    WaveSeries,
    Controls,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::ThetaSelftest,
        Scenario::FayTrisecant,
        Scenario::DivisorIdentities,
        Scenario::Toda,
        Scenario::Bdhe,
        Scenario::RsDynamics,
        Scenario::WaveSeries,
        Scenario::Controls,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::ThetaSelftest => "theta-selftest",
            Scenario::FayTrisecant => "fay-trisecant",
            Scenario::DivisorIdentities => "divisor-identities",
            Scenario::Toda => "toda",
            Scenario::Bdhe => "bdhe",
            Scenario::RsDynamics => "rs-dynamics",
            Scenario::WaveSeries => "wave-series",
            Scenario::Controls => "controls",
        }
    }

    /// Tunable thresholds and their defaults. Upper bounds unless the name
    /// ends in `control`, `gap` or `probe`, which are lower bounds.
    pub fn tolerances(self) -> &'static [(&'static str, f64)] {
        match self {
            Scenario::ThetaSelftest => &[
                ("evenness", 1e-12),
                ("quasi_periodicity", 1e-10),
                ("radius_stability", 1e-12),
                ("fd_first", 1e-6),
                ("fd_second", 1e-4),
            ],
            Scenario::FayTrisecant => &[
                ("discrete_fit", 1e-8),
                ("semidiscrete_fit", 1e-7),
                ("random_control", 1e-2),
                ("gap", 1e4),
            ],
            Scenario::DivisorIdentities => &[
                ("reverify", 1e-10),
                ("cm7d", 1e-8),
                ("cm7", 1e-7),
                ("singular_locus_probe", 1e-3),
                ("decomposable_control", 1e-2),
            ],
            Scenario::Toda => &[("semidiscrete_fit", 1e-7), ("toda_psi", 1e-6), ("constants_consistency", 1e-6)],
            Scenario::Bdhe => &[("discrete_fit", 1e-8), ("bdhe_psi", 1e-8), ("constants_consistency", 1e-6)],
            Scenario::RsDynamics => &[
                ("cm5", 1e-6),
                ("cm5_control", 1e-2),
                ("kernel_oddness", 1e-14),
                ("free_particle", 1e-12),
                ("conservation_rational", 1e-9),
                ("conservation_trigonometric", 1e-9),
                ("conservation_elliptic", 1e-8),
                ("tracking_agreement", 1e-5),
            ],
            Scenario::WaveSeries => &[
                ("f2d_genus1", 1e-8),
                ("f2d_genus2", 1e-7),
                ("f2d_control", 1e-2),
                ("discrete_recheck", 1e-12),
                ("residue", 1e-8),
                ("residue_control", 1e-2),
                ("semidiscrete", 1e-6),
                ("semidiscrete_unnormalized_control", 1e-3),
            ],
            Scenario::Controls => &[
                ("jacobian_fit", 1e-8),
                ("random_control", 1e-2),
                ("decomposable_control", 1e-2),
                ("gap", 1e4),
            ],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown scenario {s:?}")))
    }
}

/// A corpus reference such as `corpus#x5m1`, or an inline record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveRef {
    Reference(String),
    Inline(CorpusRecord),
}

impl Default for CurveRef {
    fn default() -> Self {
        CurveRef::Reference(DEFAULT_CURVE.into())
    }
}

impl CurveRef {
    pub fn resolve(&self) -> Result<CurveSpec> {
        match self {
            CurveRef::Reference(r) => corpus::resolve(r),
            CurveRef::Inline(rec) => rec.to_spec(),
        }
    }
}

/// Optional overrides of sample counts and grid sizes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sizes {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub curve: CurveRef,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub sizes: Sizes,
    /// Truncation radius cap for every theta evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_cap: Option<usize>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        ScenarioConfig {
            scenario,
            curve: CurveRef::default(),
            seed: DEFAULT_SEED,
            tolerances: BTreeMap::new(),
            sizes: Sizes::default(),
            radius_cap: None,
        }
    }

    /// Parses and validates.
    pub fn from_json(json: &str) -> Result<Self> {
        let cfg = Self::parse(json)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses without range checks; [`run_scenario`] validates and reports.
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("scenario config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        let known = self.scenario.tolerances();
        for (name, &value) in &self.tolerances {
            if !known.iter().any(|(k, _)| k == name) {
                return Err(Error::InvalidInput(format!(
                    "tolerance {name:?} does not apply to {}",
                    self.scenario
                )));
            }
            let (lo, hi) = TOLERANCE_RANGE;
            // gaps are ratios, not tolerances
            if !name.ends_with("gap") && !(lo..=hi).contains(&value) {
                return Err(Error::InvalidInput(format!("tolerance {name} = {value:e} outside [{lo:e}, {hi:e}]")));
            }
            if name.ends_with("gap") && !(value >= 1.0 && value.is_finite()) {
                return Err(Error::InvalidInput(format!("gap {name} = {value:e} must be a finite ratio >= 1")));
            }
        }
        let bounded = |v: Option<usize>, lo: usize, hi: usize, what: &str| -> Result<()> {
            match v {
                Some(n) if !(lo..=hi).contains(&n) => {
                    Err(Error::InvalidInput(format!("{what} = {n} outside {lo}..={hi}")))
                }
                _ => Ok(()),
            }
        };
        bounded(self.sizes.samples, 1, 10_000, "samples")?;
        bounded(self.sizes.window, 2, crate::lattice::MAX_WINDOW - 1, "window")?;
        bounded(self.sizes.grid, 5, 100_001, "grid")?;
        bounded(self.radius_cap, 1, 4096, "radius_cap")?;
        Ok(())
    }

    /// The threshold in force for `name`.
    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or_else(|| {
            self.scenario
                .tolerances()
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .unwrap_or_else(|| panic!("no tolerance named {name}"))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// Non-finite residuals are stored as `f64::MAX` and fail.
    pub residual: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, residual: f64, threshold: f64, bound: Bound) -> Self {
        let finite = residual.is_finite();
        let residual = if finite { residual } else { f64::MAX };
        let pass = finite
            && match bound {
                Bound::AtMost => residual <= threshold,
                Bound::AtLeast => residual >= threshold,
            };
        CheckRecord {
            name: name.into(),
            residual,
            threshold,
            bound,
            pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    /// Error variant name, e.g. `NonPosDef`.
    pub kind: String,
    pub message: String,
    pub validation: bool,
}

impl From<&Error> for ErrorRecord {
    fn from(e: &Error) -> Self {
        ErrorRecord {
            kind: e.kind().into(),
            message: e.to_string(),
            validation: e.is_validation(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ScenarioConfig,
    pub records: Vec<CheckRecord>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
    pub environment: Environment,
    /// Wall-clock seconds; the only field that varies between identical runs.
    pub timing: f64,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(e) if e.validation => 2,
            Some(_) => 3,
            None if self.pass => 0,
            None => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// A named CSV produced alongside a report.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub csv: String,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
}

/// Wall clock; reads zero on wasm32, which has no `Instant`.
struct Stopwatch(#[cfg(not(target_arch = "wasm32"))] std::time::Instant);

impl Stopwatch {
    fn start() -> Self {
        Stopwatch(
            #[cfg(not(target_arch = "wasm32"))]
            std::time::Instant::now(),
        )
    }

    fn seconds(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.0.elapsed().as_secs_f64();
        #[cfg(target_arch = "wasm32")]
        0.0
    }
}

/// Runs the configured pipeline. Errors end up in the report, never as a panic.
pub fn run_scenario(config: &ScenarioConfig) -> Outcome {
    let start = Stopwatch::start();
    let mut ctx = pipelines::Ctx::new(config);
    let result = config.validate().and_then(|_| pipelines::run(&mut ctx));
    let error = result.err().map(|e| ErrorRecord::from(&e));
    let pass = error.is_none() && ctx.records.iter().all(|r| r.pass);
    Outcome {
        report: Report {
            config: config.clone(),
            records: ctx.records,
            pass,
            error,
            environment: Environment {
                version: VERSION.into(),
                seed: config.seed,
            },
            timing: start.seconds(),
        },
        artifacts: ctx.artifacts,
    }
}
