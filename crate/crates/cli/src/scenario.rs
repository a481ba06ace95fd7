//! Scenario files: typed JSON with unknown keys rejected, plus the
//! cross-checks serde cannot express.

use std::path::{Path, PathBuf};

use admlab_core::admissibility::{InputOperator, Space};
use admlab_core::certify::{Phi0, ShiftProfile};
use admlab_core::orlicz::{SampledFunction, YoungFunction};
use admlab_core::signals::{PiecewiseSignal, SignalKind};
use admlab_core::spectral::{DiagonalGenerator, GeneratorSpec, Scale, SpectralVector};
use admlab_core::admissibility::DiagonalSymbol;
use num_complex::Complex64;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// A complex coefficient written either as a plain number or as `[re, im]`.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum ComplexRepr {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexRepr> for Complex64 {
    fn from(c: ComplexRepr) -> Self {
        match c {
            ComplexRepr::Real(re) => Complex64::new(re, 0.0),
            ComplexRepr::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

fn complex_vec(v: &[ComplexRepr]) -> Vec<Complex64> {
    v.iter().copied().map(Complex64::from).collect()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSpec {
    /// bounded columns `b_k ∈ X`, one per input channel
    Columns { columns: Vec<Vec<ComplexRepr>> },
    AMinusOneX0 { x0: Vec<ComplexRepr> },
    Diagonal { symbol: DiagonalSymbol },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    pub breakpoints: Vec<f64>,
    /// one row per piece, one entry per channel
    pub values: Vec<Vec<ComplexRepr>>,
}

impl SignalSpec {
    pub fn build(&self) -> admlab_core::Result<PiecewiseSignal> {
        PiecewiseSignal::new(
            self.breakpoints.clone(),
            self.values.iter().map(|r| complex_vec(r)).collect(),
            SignalKind::PiecewiseConstant,
        )
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrliczNormSection {
    pub function: SampledFunction,
    /// level-set construction of a Young function for `function`, split at `τ`
    #[serde(default)]
    pub dvp_tau: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    #[serde(default)]
    pub x0: Option<Vec<ComplexRepr>>,
    pub signal: SignalSpec,
    pub times: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroClassSection {
    /// strictly decreasing horizons
    pub ts: Vec<f64>,
    #[serde(default = "default_floor")]
    pub floor: f64,
}

fn default_floor() -> f64 {
    0.5
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdmSection {
    pub space: Space,
    pub pieces: usize,
    pub real_field: bool,
    pub infinite_time: bool,
    pub zero_class: Option<ZeroClassSection>,
}

impl Default for AdmSection {
    fn default() -> Self {
        Self {
            space: Space::Linf,
            pieces: 16,
            real_field: false,
            infinite_time: true,
            zero_class: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeissSection {
    /// "1", "2" or "inf"
    pub p: String,
}

impl Default for WeissSection {
    fn default() -> Self {
        Self { p: "inf".into() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SqfctSection {
    pub phi0: Phi0,
    pub weak_samples: usize,
}

impl Default for SqfctSection {
    fn default() -> Self {
        Self {
            phi0: Phi0::Decaying,
            weak_samples: 50,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CounterexampleSection {
    pub k_bound: f64,
    pub complex: bool,
    pub ms: Vec<usize>,
}

impl Default for CounterexampleSection {
    fn default() -> Self {
        Self {
            k_bound: 0.0,
            complex: false,
            ms: vec![1, 10, 100],
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrialSection {
    pub trials: usize,
    pub horizon: f64,
    pub times: usize,
    pub pieces: usize,
    pub real_field: bool,
    /// replaces the computed gain; a deliberately small value exercises the
    /// violation path
    pub gain_override: Option<f64>,
}

impl Default for TrialSection {
    fn default() -> Self {
        Self {
            trials: 100,
            horizon: 5.0,
            times: 10,
            pieces: 8,
            real_field: false,
            gain_override: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSection {
    pub profile: ShiftProfile,
    #[serde(default = "default_shift_t")]
    pub t: f64,
}

fn default_shift_t() -> f64 {
    1.0
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSection {
    /// defaults to N/4, N/2, N
    pub truncations: Vec<usize>,
    /// defaults to 1, 1e-1, …, 1e-6
    pub ts: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub generator: Option<GeneratorSpec>,
    #[serde(default)]
    pub input: Option<InputSpec>,
    /// Young function for norms and the shift demo
    #[serde(default)]
    pub phi: Option<YoungFunction>,
    /// Young function `Ψ` of the `E_Φ` admissibility route, `Φ(x) = Ψ̃(x²)`
    #[serde(default)]
    pub psi: Option<YoungFunction>,
    #[serde(default)]
    pub horizons: Vec<f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub orlicz_norm: Option<OrliczNormSection>,
    #[serde(default)]
    pub simulate: Option<SimulateSection>,
    #[serde(default)]
    pub adm: Option<AdmSection>,
    #[serde(default)]
    pub weiss: Option<WeissSection>,
    #[serde(default)]
    pub sqfct: Option<SqfctSection>,
    #[serde(default)]
    pub counterexample: Option<CounterexampleSection>,
    #[serde(default)]
    pub iss: Option<TrialSection>,
    #[serde(default)]
    pub iiss: Option<TrialSection>,
    #[serde(default)]
    pub shift_demo: Option<ShiftSection>,
    #[serde(default)]
    pub probe_boundedness: Option<ProbeSection>,
}

/// Scenario text plus its parsed form and SHA-256.
pub struct Loaded {
    pub scenario: Scenario,
    pub sha256: String,
}

/// JSON pointer (`/a/0/b`) for a serde path (`a[0].b`).
fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } | Segment::Enum { variant: key } => {
                out.push_str(&key.replace('~', "~0").replace('/', "~1"))
            }
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let value: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Config(format!("{}: malformed JSON: {e}", path.display())))?;
    crate::schema::validate(&value).map_err(|(ptr, msg)| {
        CliError::Config(format!("{}: schema violation at {ptr}: {msg}", path.display()))
    })?;
    let scenario: Scenario = serde_path_to_error::deserialize(&value).map_err(|e| {
        CliError::Config(format!(
            "{}: schema violation at {}: {}",
            path.display(),
            pointer(e.path()),
            e.inner()
        ))
    })?;
    Ok(Loaded { scenario, sha256 })
}

fn config<E: std::fmt::Display>(what: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Config(format!("{what}: {e}"))
}

impl Scenario {
    pub fn generator(&self, modes: Option<usize>) -> Result<DiagonalGenerator, CliError> {
        let spec = self
            .generator
            .as_ref()
            .ok_or_else(|| CliError::Config("missing key /generator".into()))?;
        spec.build(modes).map_err(config("/generator"))
    }

    /// Vectors longer than the mode count are truncated (so `--modes` can
    /// shrink a scenario), shorter ones are an error.
    fn fit(&self, v: &[ComplexRepr], a: &DiagonalGenerator, key: &str) -> Result<SpectralVector, CliError> {
        if v.len() < a.len() {
            return Err(CliError::Config(format!(
                "{key} has {} coefficients but the generator has {} modes",
                v.len(),
                a.len()
            )));
        }
        Ok(SpectralVector::new(complex_vec(&v[..a.len()]), Scale::X))
    }

    pub fn input(&self, a: &DiagonalGenerator) -> Result<InputOperator, CliError> {
        let spec = self
            .input
            .as_ref()
            .ok_or_else(|| CliError::Config("missing key /input".into()))?;
        let b = match spec {
            InputSpec::Columns { columns } => {
                if columns.is_empty() {
                    return Err(CliError::Config("/input/columns must not be empty".into()));
                }
                InputOperator::columns(
                    columns
                        .iter()
                        .enumerate()
                        .map(|(k, c)| self.fit(c, a, &format!("/input/columns/{k}")))
                        .collect::<Result<_, _>>()?,
                )
            }
            InputSpec::AMinusOneX0 { x0 } => InputOperator::a_minus_one_x0(self.fit(x0, a, "/input/x0")?),
            InputSpec::Diagonal { symbol } => InputOperator::diagonal(*symbol),
        };
        b.validate(a).map_err(config("/input"))?;
        Ok(b)
    }

    pub fn x0(&self, v: &[ComplexRepr], a: &DiagonalGenerator, key: &str) -> Result<SpectralVector, CliError> {
        self.fit(v, a, key)
    }

    pub fn phi(&self) -> Result<&YoungFunction, CliError> {
        self.phi.as_ref().ok_or_else(|| CliError::Config("missing key /phi".into()))
    }

    pub fn psi(&self) -> Result<&YoungFunction, CliError> {
        self.psi.as_ref().ok_or_else(|| CliError::Config("missing key /psi".into()))
    }

    pub fn horizons(&self) -> Result<Vec<f64>, CliError> {
        if self.horizons.iter().any(|t| !(*t > 0.0)) {
            return Err(CliError::Config("/horizons must be positive".into()));
        }
        Ok(if self.horizons.is_empty() { vec![1.0] } else { self.horizons.clone() })
    }
}

/// Re-run the constructor checks that derived deserialization skips.
pub fn checked_function(f: &SampledFunction, key: &str) -> Result<SampledFunction, CliError> {
    SampledFunction::new(f.grid().to_vec(), f.values().to_vec(), f.tail()).map_err(config(key))
}

pub fn checked_profile(p: &ShiftProfile) -> Result<ShiftProfile, CliError> {
    Ok(match p {
        ShiftProfile::Sampled { function } => ShiftProfile::Sampled {
            function: checked_function(function, "/shift_demo/profile/function")?,
        },
        other => other.clone(),
    })
}
