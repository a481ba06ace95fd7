//! Certificates built on top of the admissibility bounds: the Weiss resolvent
//! condition, square-function constants, the divergence counterexample,
//! ISS/iISS envelopes, the left-shift observation demo and the boundedness
//! probe.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::admissibility::{
    input_map, input_norm, linfty_bounds, linfty_upper_routes, orlicz_adm_bound, output_map_l1, random_signal,
    BoundOptions, DiagonalSymbol, InputOperator, OrliczCheckOptions, TAIL_DECADES,
};
use crate::error::{Error, Result};
use crate::numeric::{cexpm1, ext_f64, logspace, pairwise_sum, CompensatedSum};
use crate::orlicz::{luxemburg_norm, SampledFunction, YoungFunction};
use crate::quad::{integrate, integrate_panels, QuadOptions};
use crate::signals::{counterexample_input, PiecewiseSignal, SignalKind};
use crate::spectral::{DiagonalGenerator, Scale, SpectralVector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Exponent `p` of the Weiss condition `sup ‖(p Re λ)^{1/p} R(λ, A₋₁)B‖`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeissExponent {
    One,
    Two,
    Infinity,
}

impl WeissExponent {
    fn factor(self, re: f64) -> f64 {
        match self {
            WeissExponent::One => re,
            WeissExponent::Two => (2.0 * re).sqrt(),
            WeissExponent::Infinity => 1.0,
        }
    }

    /// `sup_{x>0} (px)^{1/p}/(x + a)` for one mode at distance `a` from the
    /// imaginary axis.
    fn mode_sup(self, a: f64) -> f64 {
        match self {
            WeissExponent::One => 1.0,
            WeissExponent::Two => 1.0 / (2.0 * a).sqrt(),
            WeissExponent::Infinity => 1.0 / a,
        }
    }
}

impl std::str::FromStr for WeissExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Self::One),
            "2" => Ok(Self::Two),
            "inf" | "infinity" | "∞" => Ok(Self::Infinity),
            other => Err(Error::RouteInapplicable(format!("unsupported Weiss exponent {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeissReport {
    pub p: WeissExponent,
    /// supremum over the fixed grid
    pub grid_sup: f64,
    /// after local pattern search from the best grid point
    pub refined_sup: f64,
    pub argmax: (f64, f64),
    /// `max_n` of the per-mode suprema
    pub closed_form: f64,
    /// the per-mode maximum is the exact supremum (diagonal `B` or one mode)
    pub closed_form_exact: bool,
    pub grid_points: usize,
    pub skipped: usize,
    pub modes: usize,
}

struct ResolventNorm<'a> {
    eig: &'a [Complex64],
    weights: &'a [f64],
    rows: Vec<Vec<(usize, Complex64)>>,
    channels: usize,
    diagonal: bool,
}

impl ResolventNorm<'_> {
    /// `‖R(λ, A₋₁)B‖_{U→X}`, or `None` on the spectrum.
    fn at(&self, lambda: Complex64) -> Option<f64> {
        let mut inv = Vec::with_capacity(self.eig.len());
        for l in self.eig {
            let d = (lambda - l).norm_sqr();
            if d < 1e-28 * (1.0 + lambda.norm_sqr()) {
                return None;
            }
            inv.push(1.0 / d);
        }
        if self.diagonal {
            return Some(
                self.rows
                    .iter()
                    .zip(&inv)
                    .map(|(r, i)| r.first().map_or(0.0, |(_, s)| s.norm_sqr() * i))
                    .fold(0.0, f64::max)
                    .sqrt(),
            );
        }
        if self.channels == 1 {
            let terms: Vec<f64> = self
                .rows
                .iter()
                .zip(&inv)
                .enumerate()
                .map(|(n, (r, i))| r.first().map_or(0.0, |(_, b)| self.weights[n] * b.norm_sqr() * i))
                .collect();
            return Some(pairwise_sum(&terms).sqrt());
        }
        let m = self.channels;
        let mut gram = DMatrix::from_element(m, m, ZERO);
        for (n, row) in self.rows.iter().enumerate() {
            for &(i, bi) in row {
                for &(j, bj) in row {
                    gram[(i, j)] += bi.conj() * bj * (self.weights[n] * inv[n]);
                }
            }
        }
        Some(gram.symmetric_eigenvalues().iter().fold(0.0f64, |a, v| a.max(*v)).max(0.0).sqrt())
    }
}

/// Grid supremum of `‖(p Re λ)^{1/p} R(λ, A₋₁)B‖` over `Re λ > 0`.
///
/// The grid is `Re λ ∈ [1e-6, 1e6]` (121 log points) times `Im λ ∈ {0} ∪
/// ±[1e-6, 1e6]` (121 log points each side) plus every `Im λ_n`; the best
/// point is then refined by a compass search with `Re λ ∈ [1e-12, 1e12]`.
pub fn weiss_check(a: &DiagonalGenerator, b: &InputOperator, p: WeissExponent) -> Result<WeissReport> {
    let rows = b.coefficients(a)?;
    let diagonal = matches!(b, InputOperator::Diagonal { .. });
    let eval = ResolventNorm {
        eig: a.eigenvalues(),
        weights: a.weights(),
        channels: b.channels(a),
        diagonal,
        rows,
    };
    let value = |x: f64, y: f64| eval.at(Complex64::new(x, y)).map(|v| p.factor(x) * v);

    let xs = logspace(1e-6, 1e6, 121);
    let side = logspace(1e-6, 1e6, 121);
    let mut ys = vec![0.0];
    ys.extend(side.iter().copied());
    ys.extend(side.iter().map(|y| -y));
    ys.extend(a.eigenvalues().iter().map(|l| l.im));
    ys.sort_by(f64::total_cmp);
    ys.dedup();

    let mut best = (f64::NEG_INFINITY, 1.0, 0.0);
    let mut skipped = 0;
    for &x in &xs {
        for &y in &ys {
            match value(x, y) {
                Some(v) if v > best.0 => best = (v, x, y),
                Some(_) => {}
                None => skipped += 1,
            }
        }
    }
    let grid_sup = best.0.max(0.0);

    // compass search in (ln Re λ, Im λ)
    let (lo, hi) = (1e-12f64.ln(), 1e12f64.ln());
    let (mut lx, mut y, mut v) = (best.1.ln(), best.2, grid_sup);
    let mut step_x = 0.5;
    let mut step_y = 0.1 * y.abs().max(1.0);
    for _ in 0..4000 {
        let mut moved = false;
        for (dx, dy) in [(step_x, 0.0), (-step_x, 0.0), (0.0, step_y), (0.0, -step_y)] {
            let nx = (lx + dx).clamp(lo, hi);
            if let Some(nv) = value(nx.exp(), y + dy) {
                if nv > v {
                    (lx, y, v) = (nx, y + dy, nv);
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            step_x *= 0.5;
            step_y *= 0.5;
            if step_x < 1e-13 && step_y < 1e-13 * y.abs().max(1.0) {
                break;
            }
        }
    }

    let closed_form = eval
        .rows
        .iter()
        .zip(a.eigenvalues())
        .enumerate()
        .map(|(n, (row, l))| {
            let sigma = if diagonal {
                row.first().map_or(0.0, |(_, s)| s.norm())
            } else {
                (a.weights()[n] * row.iter().map(|(_, b)| b.norm_sqr()).sum::<f64>()).sqrt()
            };
            sigma * p.mode_sup(-l.re)
        })
        .fold(0.0, f64::max);
    let active = eval.rows.iter().filter(|r| !r.is_empty()).count();
    Ok(WeissReport {
        p,
        grid_sup,
        refined_sup: v,
        argmax: (lx.exp(), y),
        closed_form,
        closed_form_exact: diagonal || active <= 1,
        grid_points: xs.len() * ys.len(),
        skipped,
        modes: a.len(),
    })
}

/// Choice of `φ₀` in the square-function estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phi0 {
    /// `φ₀(z) = (−z)^{1/2}e^{z}`, so that `φ₀(tA) = t^{1/2}(−A)^{1/2}T(t)`
    #[default]
    Decaying,
    /// `φ₀(z) = (−z)^{1/2}e^{−z}`, unbounded on the left half-plane
    Printed,
}

impl Phi0 {
    pub fn describe(self) -> &'static str {
        match self {
            Phi0::Decaying => "phi0(z) = (-z)^(1/2) e^(z)",
            Phi0::Printed => "phi0(z) = (-z)^(1/2) e^(-z)",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SqfctMode {
    pub n: usize,
    pub lambda: Complex64,
    /// `∫₀^∞ |φ₀(tλ_n)|² dt/t`
    pub closed_form: f64,
    pub quadrature: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SqfctReport {
    pub k_lower: f64,
    pub k_upper: f64,
    pub phi0: String,
    pub per_mode: Vec<SqfctMode>,
    pub max_quadrature_rel_diff: f64,
    /// `∫₀^T` for the other sign convention on mode 0, `T = 2^j/|Re λ_0|`
    pub printed_convention_partials: Vec<(f64, f64)>,
}

/// `∫₀^T |(−tλ)^{1/2}e^{−tλ}|² dt/t = |λ|(e^{2|Re λ|T} − 1)/(2|Re λ|)`.
fn printed_partials(lambda: Complex64) -> Vec<(f64, f64)> {
    let r = -lambda.re;
    (0..6)
        .map(|j| {
            let t = 2f64.powi(j) / r;
            (t, lambda.norm() * (2.0 * r * t).exp_m1() / (2.0 * r))
        })
        .collect()
}

/// Two-sided constants `k‖x‖² ≤ ∫₀^∞ ‖φ₀(tA)x‖² dt/t ≤ K‖x‖²`.
///
/// For the decaying `φ₀` each mode gives `|λ_n|/(2|Re λ_n|)`, checked by
/// quadrature in `τ = ln t`. The printed convention diverges at every mode.
pub fn sqfct_constants(a: &DiagonalGenerator, phi0: Phi0) -> Result<SqfctReport> {
    a.require_analytic()?;
    let evidence = printed_partials(a.eigenvalues()[0]);
    if phi0 == Phi0::Printed {
        return Err(Error::DivergentSquareFunction { mode: 0 });
    }
    let mut per_mode = Vec::with_capacity(a.len());
    let mut worst: f64 = 0.0;
    for (n, l) in a.eigenvalues().iter().enumerate() {
        let (m, r) = (l.norm(), -l.re);
        let closed_form = m / (2.0 * r);
        // dt/t = dτ; |φ₀(e^τ λ)|² = e^τ|λ| e^{−2e^τ r}
        let f = |tau: f64| {
            let t = tau.exp();
            t * m * (-2.0 * t * r).exp()
        };
        let lo = (1e-18 / m).ln();
        let hi = (TAIL_DECADES / r).ln();
        let pts: Vec<f64> = (0..=((hi - lo).ceil() as usize))
            .map(|k| (lo + k as f64).min(hi))
            .collect();
        let quad = integrate_panels(f, &pts, QuadOptions::rel(1e-11))?.value;
        let diff = (quad - closed_form).abs() / closed_form;
        worst = worst.max(diff);
        per_mode.push(SqfctMode {
            n,
            lambda: *l,
            closed_form,
            quadrature: quad,
        });
    }
    let k_lower = per_mode.iter().map(|m| m.closed_form).fold(f64::INFINITY, f64::min);
    let k_upper = per_mode.iter().map(|m| m.closed_form).fold(0.0, f64::max);
    Ok(SqfctReport {
        k_lower,
        k_upper,
        phi0: phi0.describe().into(),
        per_mode,
        max_quadrature_rel_diff: worst,
        printed_convention_partials: evidence,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakSqfctReport {
    /// `max ∫₀^∞|⟨y, AT(s)x⟩| ds` over all sampled unit pairs
    pub estimate: f64,
    /// the same maximum over coordinate pairs `x = y = e_n`
    pub diagonal_estimate: f64,
    pub samples: usize,
    pub skipped: usize,
    /// `|⟨y, ∫AT(s)x u(s)ds⟩| / ∫|⟨y, AT(s)x⟩|` for the phase input of the
    /// first random pair; at most 1 and close to it
    pub phase_input_ratio: f64,
}

fn random_unit(a: &DiagonalGenerator, rng: &mut ChaCha8Rng) -> Result<SpectralVector> {
    let v = SpectralVector::new(
        (0..a.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
        Scale::X,
    );
    let n = a.space_norm(&v)?;
    Ok(v.scaled(Complex64::new(1.0 / n, 0.0)))
}

/// Empirical lower estimate of the constant in
/// `‖⟨y, AT(·)x⟩‖_{L¹(0,∞)} ≤ C‖x‖‖y‖`.
pub fn weak_sqfct_estimate(a: &DiagonalGenerator, samples: usize, seed: u64) -> Result<WeakSqfctReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut diagonal_estimate: f64 = 0.0;
    for n in 0..a.len() {
        let e = SpectralVector::basis(n, a.len(), Scale::X).scaled(Complex64::new(1.0 / a.weights()[n].sqrt(), 0.0));
        diagonal_estimate = diagonal_estimate.max(output_map_l1(a, &e, &e, f64::INFINITY)?);
    }
    let mut estimate = diagonal_estimate;
    let mut skipped = 0;
    let mut phase_input_ratio = f64::NAN;
    for k in 0..samples {
        let x = random_unit(a, &mut rng)?;
        let y = random_unit(a, &mut rng)?;
        let v = match output_map_l1(a, &y, &x, f64::INFINITY) {
            Ok(v) => v,
            Err(Error::QuadratureNonConvergence { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        estimate = estimate.max(v);
        if k == 0 && v > 0.0 {
            phase_input_ratio = phase_input_value(a, &x, &y)? / v;
        }
    }
    Ok(WeakSqfctReport {
        estimate,
        diagonal_estimate,
        samples,
        skipped,
        phase_input_ratio,
    })
}

/// `|⟨y, Φ u⟩|` for `B = A₋₁x` and `u(s) = exp(−i arg⟨y, AT(s)x⟩)` frozen
/// at the midpoint of each piece.
fn phase_input_value(a: &DiagonalGenerator, x: &SpectralVector, y: &SpectralVector) -> Result<f64> {
    let end = TAIL_DECADES / a.decay_rate();
    let coarse = crate::quad::geometric_points(end, 1e-10);
    let mut bp = vec![0.0];
    for w in std::iter::once(&[0.0, coarse[0]][..]).chain(coarse.windows(2)) {
        for j in 1..=64 {
            bp.push(w[0] + (w[1] - w[0]) * j as f64 / 64.0);
        }
    }
    let kernel = |s: f64| -> Complex64 {
        a.eigenvalues()
            .iter()
            .enumerate()
            .map(|(n, l)| y.coeffs[n].conj() * x.coeffs[n] * l * (l * s).exp() * a.weights()[n])
            .sum()
    };
    let values = bp
        .windows(2)
        .map(|w| {
            let k = kernel(0.5 * (w[0] + w[1]));
            vec![if k == ZERO { Complex64::new(1.0, 0.0) } else { (k / k.norm()).conj() }]
        })
        .collect();
    let u = PiecewiseSignal::new(bp, values, SignalKind::PiecewiseConstant)?;
    let b = InputOperator::a_minus_one_x0(x.clone());
    let z = input_map(a, &b, &u, end)?;
    Ok(a.inner(y, &z)?.norm())
}

/// One row of the divergence table.
#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleRow {
    pub m: usize,
    /// `S_M = ‖Φ₁u‖²`
    pub s_m: f64,
    /// `M·(e^{−1/2} − e^{−1})²`, real case only
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theory: Option<f64>,
    /// `S_M` recomputed from the explicit input signal when `M` is small
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct: Option<f64>,
    /// largest of the per-column `L^∞` upper bounds over columns `1..=M`
    pub per_column_bound_max: f64,
    pub per_column_bound_min: f64,
    /// `p = ∞` Weiss supremum on the leading modes
    pub weiss: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleTable {
    pub k_bound: f64,
    pub complex: bool,
    /// largest `M` for which the explicit signal is built as a cross-check
    pub direct_limit: usize,
    pub weiss_modes: usize,
    pub rows: Vec<CounterexampleRow>,
}

/// Ratio of consecutive `|Re γ_m|`; slightly above 2 so that the rule
/// `Re γ_{m+1} < 2 Re γ_m` holds strictly.
pub const DYADIC_RATIO_SLACK: f64 = 1e-9;
pub const DIRECT_LIMIT: usize = 256;
pub const WEISS_MODES: usize = 40;

/// `γ_m = μ_m·2^{m−1}` with mantissa `μ_m = −(1+ε)^{m−1}(1 + ikξ)`.
fn gamma_mantissa(m: usize, k_bound: f64, complex: bool) -> Complex64 {
    let xi = if complex { 1.0 } else { 0.0 };
    -(1.0 + DYADIC_RATIO_SLACK).powi(m as i32 - 1) * Complex64::new(1.0, k_bound * xi)
}

/// The counterexample spectrum `γ_1, …, γ_M` as plain floats (`M ≤ 1000`).
pub fn counterexample_spectrum(m: usize, k_bound: f64, complex: bool) -> Vec<Complex64> {
    (1..=m)
        .map(|j| gamma_mantissa(j, k_bound, complex) * 2f64.powi(j as i32 - 1))
        .collect()
}

/// Per-mode term `|γ_m ∫_{lo}^{hi} e^{γ_m s} ds|² = |e^{γ_m hi} − e^{γ_m lo}|²`
/// with `hi = −1/Re γ_m`, `lo = hi/2`. The powers of two in `γ_m` and in the
/// interval cancel, so only mantissas enter and no `M` overflows.
fn counterexample_term(m: usize, k_bound: f64, complex: bool) -> f64 {
    let mu = gamma_mantissa(m, k_bound, complex);
    let hi = -1.0 / mu.re;
    let lo = hi / 2.0;
    let (zh, zl) = (mu * hi, mu * lo);
    // e^{zh} − e^{zl} = e^{zl}(e^{zh−zl} − 1)
    (zl.exp() * cexpm1(zh - zl)).norm_sqr()
}

/// Divergence table for `B = A₋₁` on the counterexample spectrum.
pub fn counterexample_run(k_bound: f64, ms: &[usize], complex: bool) -> Result<CounterexampleTable> {
    let max_m = ms.iter().copied().max().unwrap_or(0);
    if ms.iter().any(|&m| m == 0) {
        return Err(Error::Dimension("mode counts must be at least 1".into()));
    }
    if max_m > i32::MAX as usize {
        return Err(Error::Dimension("too many modes".into()));
    }
    // the auto spectrum satisfies the rule by construction
    let leading = counterexample_spectrum(max_m.min(WEISS_MODES), k_bound, complex);
    crate::signals::check_subsequence_rule(&leading).expect("auto spectrum obeys the subsequence rule");

    let mut partial = CompensatedSum::default();
    let mut bmax: f64 = 0.0;
    let mut bmin = f64::INFINITY;
    let mut done = 0;
    let mut ms_sorted: Vec<usize> = ms.to_vec();
    ms_sorted.sort_unstable();
    ms_sorted.dedup();
    let s1 = ((-0.5f64).exp() - (-1.0f64).exp()).powi(2);
    let mut rows = Vec::new();
    for &m in &ms_sorted {
        while done < m {
            done += 1;
            partial.add(counterexample_term(done, k_bound, complex));
            // single column A₋₁e_n: the bound only depends on arg γ_n
            let one = DiagonalGenerator::from_eigenvalues(vec![gamma_mantissa(done, k_bound, complex)])?;
            let col = InputOperator::a_minus_one_x0(SpectralVector::basis(0, 1, Scale::X));
            let best = linfty_upper_routes(&one, &col, f64::INFINITY)?
                .into_iter()
                .map(|r| r.value)
                .fold(f64::INFINITY, f64::min);
            bmax = bmax.max(best);
            bmin = bmin.min(best);
        }
        let direct = if m <= DIRECT_LIMIT {
            let gammas = counterexample_spectrum(m, k_bound, complex);
            let a = DiagonalGenerator::from_eigenvalues(gammas.clone())?;
            let u = counterexample_input(&gammas)?.signal;
            let x = input_map(&a, &InputOperator::diagonal(DiagonalSymbol::AMinusOne), &u, 1.0)?;
            Some(a.space_norm(&x)?.powi(2))
        } else {
            None
        };
        let wa = DiagonalGenerator::from_eigenvalues(counterexample_spectrum(m.min(WEISS_MODES), k_bound, complex))?;
        let weiss = weiss_check(&wa, &InputOperator::diagonal(DiagonalSymbol::AMinusOne), WeissExponent::Infinity)?;
        rows.push(CounterexampleRow {
            m,
            s_m: partial.value(),
            theory: (!complex || k_bound == 0.0).then(|| m as f64 * s1),
            direct,
            per_column_bound_max: bmax,
            per_column_bound_min: bmin,
            weiss: weiss.refined_sup,
        });
    }
    Ok(CounterexampleTable {
        k_bound,
        complex,
        direct_limit: DIRECT_LIMIT,
        weiss_modes: WEISS_MODES,
        rows,
    })
}

/// Comparison functions `β(r, t) = M e^{−ωt} r`, `μ(r) = gain·r`, and the
/// `E_Φ` pair `(Φ, C)` used in place of an explicit iISS gain.
#[derive(Clone, Debug, Serialize)]
pub struct KLBundle {
    pub m: f64,
    pub omega: f64,
    pub gain: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iiss: Option<(YoungFunction, f64)>,
}

impl KLBundle {
    pub fn beta(&self, r: f64, t: f64) -> f64 {
        self.m * (-self.omega * t).exp() * r
    }

    pub fn mu(&self, r: f64) -> f64 {
        self.gain * r
    }
}

/// State, input and time at which an envelope failed.
#[derive(Clone, Debug, Serialize)]
pub struct ViolationDump {
    pub certificate: String,
    pub x0: SpectralVector,
    pub u: PiecewiseSignal,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl std::fmt::Display for ViolationDump {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} envelope fails at t = {}: ‖x(t)‖ = {} > {}",
            self.certificate, self.t, self.lhs, self.rhs
        )
    }
}

#[derive(Clone, Debug)]
pub struct TrialOptions {
    pub trials: usize,
    pub horizon: f64,
    /// evaluation times per trial, uniform in `(0, horizon]`
    pub times: usize,
    pub pieces: usize,
    pub seed: u64,
    pub real_field: bool,
    /// replaces the computed `L^∞` gain (or the `E_Φ` constant)
    pub gain_override: Option<f64>,
}

impl Default for TrialOptions {
    fn default() -> Self {
        Self {
            trials: 100,
            horizon: 5.0,
            times: 10,
            pieces: 8,
            seed: 0,
            real_field: false,
            gain_override: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub t: f64,
    pub state_norm: f64,
    pub envelope: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateVerdict {
    pub certificate: String,
    pub bundle: KLBundle,
    pub trials: usize,
    pub checks: usize,
    /// `max ‖x(t)‖ / envelope`
    pub max_ratio: f64,
    pub rows: Vec<TrialRow>,
    pub scope: String,
}

fn random_state(a: &DiagonalGenerator, rng: &mut ChaCha8Rng, real: bool) -> Result<SpectralVector> {
    let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
    let mut v = random_unit(a, rng)?;
    if real {
        for c in &mut v.coeffs {
            c.im = 0.0;
        }
    }
    Ok(v.scaled(Complex64::new(scale * rng.gen_range(0.0..1.0), 0.0)))
}

/// `x(t) = T(t)x₀ + ∫₀ᵗ T(t−s)Bu(s) ds`, the convolution written as `Φ_t`
/// applied to the reversed input.
pub fn trajectory(a: &DiagonalGenerator, b: &InputOperator, x0: &SpectralVector, u: &PiecewiseSignal, t: f64) -> Result<SpectralVector> {
    let free = a.semigroup_apply(t, x0)?;
    let forced = input_map(a, b, &u.reversed(t)?, t)?;
    free.add(&forced.with_scale(free.scale))
}

fn check_trials<F>(
    a: &DiagonalGenerator,
    b: &InputOperator,
    opts: &TrialOptions,
    certificate: &str,
    bundle: &KLBundle,
    input_size: F,
) -> Result<(usize, f64, Vec<TrialRow>)>
where
    F: Fn(&PiecewiseSignal) -> Result<f64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let channels = b.channels(a);
    let mut rows = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for trial in 0..opts.trials {
        let x0 = random_state(a, &mut rng, opts.real_field)?;
        let u = random_signal(&mut rng, opts.horizon, opts.pieces, channels, opts.real_field)?;
        for j in 1..=opts.times.max(1) {
            let t = opts.horizon * j as f64 / opts.times.max(1) as f64;
            let x = trajectory(a, b, &x0, &u, t)?;
            let lhs = a.norm_in(&x, Scale::X)?;
            let x0_norm = a.norm_in(&x0, Scale::X)?;
            let rhs = bundle.beta(x0_norm, t) + input_size(&u.restricted(t)?)?;
            if lhs > rhs + 1e-8 {
                return Err(Error::CertificateViolation(Box::new(ViolationDump {
                    certificate: certificate.into(),
                    x0,
                    u,
                    t,
                    lhs,
                    rhs,
                })));
            }
            if rhs > 0.0 {
                max_ratio = max_ratio.max(lhs / rhs);
            }
            rows.push(TrialRow {
                trial,
                t,
                state_norm: lhs,
                envelope: rhs,
            });
        }
    }
    Ok((rows.len(), max_ratio, rows))
}

/// Trajectory check of `‖x(t)‖ ≤ e^{−δt}‖x₀‖ + μ(‖u‖_{L^∞(0,t)})` with `μ`
/// linear of slope equal to the uniform `L^∞` admissibility bound.
pub fn iss_certificate(a: &DiagonalGenerator, b: &InputOperator, opts: &TrialOptions) -> Result<CertificateVerdict> {
    let omega = a.delta();
    let gain = match opts.gain_override {
        Some(g) => g,
        None => {
            let r = linfty_bounds(a, b, f64::INFINITY, &BoundOptions {
                seed: opts.seed,
                real_field: opts.real_field,
                ..BoundOptions::default()
            })?;
            r.upper_bound
        }
    };
    if !gain.is_finite() {
        return Err(Error::RouteInapplicable("no finite L^∞ admissibility bound for this B".into()));
    }
    let bundle = KLBundle {
        m: 1.0,
        omega,
        gain,
        iiss: None,
    };
    let (checks, max_ratio, rows) = check_trials(a, b, opts, "iss", &bundle, |u| Ok(bundle.mu(input_norm(a, b, u))))?;
    Ok(CertificateVerdict {
        certificate: "iss".into(),
        bundle,
        trials: opts.trials,
        checks,
        max_ratio,
        rows,
        scope: "ISS envelope β(r,t) = e^{-δt} r, μ(r) = gain·r".into(),
    })
}

/// Trajectory check of `‖x(t)‖ ≤ e^{−δt}‖x₀‖ + C‖u‖_{E_Φ(0,t)}` for
/// `B = A₋₁x₀`, with `(Φ, C)` from the `E_Φ` admissibility bound.
pub fn iiss_certificate(
    a: &DiagonalGenerator,
    x0: &SpectralVector,
    psi: &YoungFunction,
    opts: &TrialOptions,
) -> Result<CertificateVerdict> {
    let bound = orlicz_adm_bound(
        a,
        x0,
        psi,
        &OrliczCheckOptions {
            trials: 0,
            ..OrliczCheckOptions::default()
        },
    )?;
    let c = opts.gain_override.unwrap_or(bound.constant);
    let b = InputOperator::a_minus_one_x0(x0.clone());
    let bundle = KLBundle {
        m: 1.0,
        omega: a.delta(),
        gain: c,
        iiss: Some((bound.phi.clone(), c)),
    };
    let phi = bound.phi;
    let (checks, max_ratio, rows) = check_trials(a, &b, opts, "iiss", &bundle, |u| {
        Ok(c * luxemburg_norm(&phi, &u.norm_profile(None)?)?)
    })?;
    Ok(CertificateVerdict {
        certificate: "iiss".into(),
        bundle,
        trials: opts.trials,
        checks,
        max_ratio,
        rows,
        scope: "E_Phi admissibility inequality only; no explicit K-infinity function theta is constructed".into(),
    })
}

/// Outcome of an escalating modular integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ModularOutcome {
    Finite { value: f64 },
    /// the partial integral passed the divergence threshold at `s = e^{−τ}`
    Divergent { partial: f64, tau: f64 },
    Inconclusive { partial: f64, tau: f64 },
}

pub const DIVERGENCE_THRESHOLD: f64 = 1e6;
const MAX_DOUBLINGS: usize = 60;

/// `∫₀¹ h(s) ds` for `h ≥ 0` given through `ℓ(τ) = ln h(e^{−τ})`: the integral
/// becomes `∫₀^∞ e^{ℓ(τ) − τ} dτ`, integrated over the panels `[0,1], [1,2],
/// [2,4], …`. It diverges once the partial sum exceeds `1e6` and converges
/// once a panel adds less than `1e-14` of the total.
pub fn escalating_integral<L: Fn(f64) -> f64>(ln_h: L) -> Result<ModularOutcome> {
    let f = |tau: f64| (ln_h(tau) - tau).exp();
    let mut total = CompensatedSum::default();
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..MAX_DOUBLINGS {
        let piece = integrate(f, a, b, QuadOptions::rel(1e-12))?.value;
        total.add(piece);
        let s = total.value();
        if !s.is_finite() || s > DIVERGENCE_THRESHOLD {
            return Ok(ModularOutcome::Divergent { partial: s, tau: b });
        }
        if piece <= 1e-14 * s || s == 0.0 && b > 64.0 {
            return Ok(ModularOutcome::Finite { value: s });
        }
        a = b;
        b *= 2.0;
    }
    Ok(ModularOutcome::Inconclusive {
        partial: total.value(),
        tau: a,
    })
}

/// A test function on `(0, 1)` for the shift demo.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShiftProfile {
    /// `f(s) = amplitude·s^{−exponent}`
    PowerLaw { amplitude: f64, exponent: f64 },
    Sampled { function: SampledFunction },
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftDemoReport {
    pub t: f64,
    /// `‖Ψ_t f‖_{L¹(0,t)}` for the output `s ↦ (T(s)f)(0)`
    pub output_l1: ModularOutcome,
    /// `‖f‖_{L¹(0,t)}`
    pub input_l1: ModularOutcome,
    pub l1_constant: f64,
    /// `∫₀ᵗ Φ(|f|)`
    pub modular: ModularOutcome,
    /// the modular is finite; `false` flags the failure of `E_Φ` membership
    pub in_e_phi: bool,
}

/// Left shift on `L¹(0,1)` observed by point evaluation at 0.
///
/// For sampled `f` the output is built by shifting the cell grid and reading
/// the cell that covers 0; for power laws both integrals go through
/// [`escalating_integral`].
pub fn shift_demo(f: &ShiftProfile, phi: &YoungFunction, t: f64) -> Result<ShiftDemoReport> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidSampledFunction(format!("horizon {t} must lie in (0, 1]")));
    }
    match f {
        ShiftProfile::Sampled { function } => {
            if function.start() != 0.0 || function.end() < t {
                return Err(Error::InvalidSampledFunction("f must be sampled on [0, t] at least".into()));
            }
            let grid = function.grid();
            let k_end = grid.partition_point(|&g| g < t);
            let mut cuts: Vec<f64> = grid[..k_end].to_vec();
            cuts.push(t);
            // y(s) = (T(s)f)(0) = f(s): the cell of f − s that contains 0
            let observed: Vec<f64> = cuts
                .windows(2)
                .map(|w| {
                    let s = w[0];
                    let shifted: Vec<f64> = grid.iter().map(|g| g - s).collect();
                    let k = shifted.partition_point(|&g| g <= 0.0) - 1;
                    function.values()[k].abs()
                })
                .collect();
            let input: Vec<f64> = function.values()[..cuts.len() - 1].iter().map(|v| v.abs()).collect();
            let l1 = |vals: &[f64]| -> f64 {
                let terms: Vec<f64> = vals.iter().zip(cuts.windows(2)).map(|(v, w)| v * (w[1] - w[0])).collect();
                pairwise_sum(&terms)
            };
            let mods: Vec<f64> = input
                .iter()
                .zip(cuts.windows(2))
                .map(|(v, w)| phi.eval(*v) * (w[1] - w[0]))
                .collect();
            let modular = pairwise_sum(&mods);
            Ok(ShiftDemoReport {
                t,
                output_l1: ModularOutcome::Finite { value: l1(&observed) },
                input_l1: ModularOutcome::Finite { value: l1(&input) },
                l1_constant: 1.0,
                modular: ModularOutcome::Finite { value: modular },
                in_e_phi: modular.is_finite(),
            })
        }
        ShiftProfile::PowerLaw { amplitude, exponent } => {
            if !(*amplitude > 0.0) {
                return Err(Error::InvalidSampledFunction("amplitude must be positive".into()));
            }
            let (ln_a, p) = (amplitude.ln(), *exponent);
            // on (0, t): s = t·e^{−τ}, ds = t·e^{−τ}dτ, so ℓ(τ) gets ln t added
            let ln_t = t.ln();
            let ln_f = move |tau: f64| ln_a + p * (tau - ln_t);
            let l1 = escalating_integral(|tau| ln_f(tau) + ln_t)?;
            let modular = escalating_integral(|tau| phi.ln_eval(ln_f(tau)) + ln_t)?;
            Ok(ShiftDemoReport {
                t,
                output_l1: l1,
                input_l1: l1,
                l1_constant: 1.0,
                in_e_phi: matches!(modular, ModularOutcome::Finite { .. }),
                modular,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProbeRow {
    pub modes: usize,
    pub t: f64,
    /// `sup_{‖x‖=1}‖T(t)x − x‖ = max_n |e^{λ_n t} − 1|`
    pub value: f64,
    pub argmax: usize,
    /// `t = 1/|λ_N|` rows, added per truncation
    pub critical: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundednessTable {
    pub rows: Vec<ProbeRow>,
    /// the value at `t = 1/|λ_N|` stays above 1/2 while `t → 0` with `N`
    pub zero_class_degrades: bool,
}

/// `‖T(t) − I‖` on truncations of a fixed spectrum.
pub fn boundedness_probe(a: &DiagonalGenerator, truncations: &[usize], ts: &[f64]) -> Result<BoundednessTable> {
    let mut rows = Vec::new();
    let mut critical_values = Vec::new();
    for &n in truncations {
        if n == 0 || n > a.len() {
            return Err(Error::Dimension(format!("truncation {n} outside 1..={}", a.len())));
        }
        let eig = &a.eigenvalues()[..n];
        let probe = |t: f64| -> (f64, usize) {
            eig.iter()
                .enumerate()
                .map(|(k, l)| (cexpm1(l * t).norm(), k))
                .fold((0.0, 0), |acc, v| if v.0 > acc.0 { v } else { acc })
        };
        for &t in ts {
            let (value, argmax) = probe(t);
            rows.push(ProbeRow {
                modes: n,
                t,
                value,
                argmax,
                critical: false,
            });
        }
        let t = 1.0 / eig[n - 1].norm();
        let (value, argmax) = probe(t);
        critical_values.push(value);
        rows.push(ProbeRow {
            modes: n,
            t,
            value,
            argmax,
            critical: true,
        });
    }
    Ok(BoundednessTable {
        rows,
        zero_class_degrades: critical_values.len() > 1 && critical_values.iter().all(|v| *v >= 0.5),
    })
}

/// Serializable summary of an admissibility bound for reports.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Interval {
    pub lower: f64,
    #[serde(with = "ext_f64")]
    pub upper: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn laplacian(n: usize) -> DiagonalGenerator {
        DiagonalGenerator::from_eigenvalues((1..=n).map(|k| c(-(k as f64), 0.0)).collect()).unwrap()
    }

    #[test]
    fn weiss_closed_forms() {
        let diag = InputOperator::diagonal(DiagonalSymbol::AMinusOne);
        let r = weiss_check(&laplacian(6), &diag, WeissExponent::Infinity).unwrap();
        assert!((r.closed_form - 1.0).abs() < 1e-15);
        assert!((r.refined_sup - 1.0).abs() < 1e-6);
        assert!(r.grid_sup <= r.refined_sup);

        let one = DiagonalGenerator::from_eigenvalues(vec![c(-1.0, 0.0)]).unwrap();
        let col = InputOperator::columns(vec![SpectralVector::new(vec![c(1.0, 0.0)], Scale::X)]);
        let r2 = weiss_check(&one, &col, WeissExponent::Two).unwrap();
        // sup_x √(2x)/(x+1) is 1/√2, reached at x = 1
        assert!((r2.closed_form - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((r2.refined_sup - 0.5f64.sqrt()).abs() < 1e-10);
        assert!((r2.argmax.0 - 1.0).abs() < 1e-4);
        let r1 = weiss_check(&one, &col, WeissExponent::One).unwrap();
        assert!((r1.refined_sup - 1.0).abs() < 1e-6);
    }

    #[test]
    fn weiss_oracle_on_real_axis() {
        // one-variable maximization of (p x)^{1/p}/(x + a), brute force
        for (p, e) in [(WeissExponent::Two, 2.0), (WeissExponent::One, 1.0)] {
            let a = 3.0;
            let mut best: f64 = 0.0;
            for k in 0..200_000 {
                let x = 10f64.powf(-6.0 + 12.0 * k as f64 / 200_000.0);
                best = best.max((e * x).powf(1.0 / e) / (x + a));
            }
            let g = DiagonalGenerator::from_eigenvalues(vec![c(-a, 0.0)]).unwrap();
            let col = InputOperator::columns(vec![SpectralVector::new(vec![c(1.0, 0.0)], Scale::X)]);
            let r = weiss_check(&g, &col, p).unwrap();
            assert!(r.refined_sup >= best * (1.0 - 1e-12));
            assert!((r.refined_sup - r.closed_form).abs() < 1e-6 * r.closed_form);
        }
    }

    #[test]
    fn weiss_finite_for_range_columns() {
        let a = DiagonalGenerator::ray(1.0, 1.0, 0.7, 30).unwrap();
        let x0 = SpectralVector::new((1..=30).map(|k| c(1.0 / k as f64, 0.0)).collect(), Scale::X);
        let r = weiss_check(&a, &InputOperator::a_minus_one_x0(x0), WeissExponent::Infinity).unwrap();
        assert!(r.refined_sup.is_finite());
        assert!(r.refined_sup >= r.closed_form * (1.0 - 1e-9));
    }

    #[test]
    fn weiss_counterexample_spectrum_respects_sector_bound() {
        for k in [0.5, 2.0] {
            let a = DiagonalGenerator::from_eigenvalues(counterexample_spectrum(20, k, true)).unwrap();
            let r = weiss_check(&a, &InputOperator::diagonal(DiagonalSymbol::AMinusOne), WeissExponent::Infinity).unwrap();
            assert!(r.refined_sup <= (1.0 + k * k).sqrt() * (1.0 + 1e-12));
            assert!((r.refined_sup - r.closed_form).abs() < 1e-6 * r.closed_form);
        }
    }

    #[test]
    fn square_function_constants() {
        let s = sqfct_constants(&laplacian(10), Phi0::Decaying).unwrap();
        assert_eq!((s.k_lower, s.k_upper), (0.5, 0.5));
        assert!(s.max_quadrature_rel_diff < 1e-8);
        for th in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
            let r = sqfct_constants(&DiagonalGenerator::ray(1.0, 1.0, th, 5).unwrap(), Phi0::Decaying).unwrap();
            let expect = 1.0 / (2.0 * th.cos());
            assert!((r.k_lower - expect).abs() < 1e-14 && (r.k_upper - expect).abs() < 1e-14);
            assert!(r.max_quadrature_rel_diff < 1e-8);
        }
        let mixed = DiagonalGenerator::from_eigenvalues(vec![c(-1.0, 0.0), c(-1.0, 1.0), c(-1.0, -1.0)]).unwrap();
        let m = sqfct_constants(&mixed, Phi0::Decaying).unwrap();
        assert_eq!(m.k_lower, 0.5);
        assert!((m.k_upper - 0.5f64.sqrt()).abs() < 1e-15);
        // the other sign convention grows without bound
        let p = &m.printed_convention_partials;
        assert!(p.windows(2).all(|w| w[1].1 > w[0].1) && p.last().unwrap().1 > 1e12);
        assert!(matches!(
            sqfct_constants(&mixed, Phi0::Printed),
            Err(Error::DivergentSquareFunction { mode: 0 })
        ));
    }

    #[test]
    fn sqfct_upper_is_squared_l2_constant() {
        let a = DiagonalGenerator::ray(2.0, 1.5, 0.9, 12).unwrap();
        let k = crate::admissibility::l2_adm_constant(&a).unwrap();
        let s = sqfct_constants(&a, Phi0::Decaying).unwrap();
        assert!((s.k_upper - k * k).abs() <= 1e-12 * s.k_upper);
    }

    #[test]
    fn weak_estimate() {
        let r = weak_sqfct_estimate(&laplacian(5), 20, 3).unwrap();
        assert!((r.diagonal_estimate - 1.0).abs() < 1e-14);
        assert!(r.estimate >= 1.0);
        assert!(r.phase_input_ratio <= 1.0 + 1e-9 && r.phase_input_ratio > 0.99, "{}", r.phase_input_ratio);
        let th = 1.0;
        let ray = DiagonalGenerator::ray(1.0, 1.0, th, 4).unwrap();
        let r = weak_sqfct_estimate(&ray, 5, 1).unwrap();
        assert!(r.estimate >= 1.0 / th.cos() * (1.0 - 1e-12));
    }

    #[test]
    fn counterexample_small_cases() {
        let t = counterexample_run(0.0, &[1, 10, 100], false).unwrap();
        // the closed form evaluates to 0.0569544
        assert!((t.rows[0].s_m - 0.056_954_404_111_195).abs() < 1e-12);
        for row in &t.rows {
            let theory = row.theory.unwrap();
            assert!((row.s_m - theory).abs() <= 1e-12 * theory);
            assert!((row.direct.unwrap() - theory).abs() <= 1e-12 * theory);
            assert!((row.per_column_bound_max - 1.0).abs() < 1e-14);
            assert!((row.per_column_bound_min - 1.0).abs() < 1e-14);
            assert!((row.weiss - 1.0).abs() < 1e-6);
        }
        assert!((t.rows[2].s_m / t.rows[0].s_m - 100.0).abs() < 1e-10);
                let z = counterexample_run(1.5, &[3, 7], true).unwrap();
        assert!(z.rows[1].s_m > z.rows[0].s_m);
        assert!((z.rows[0].per_column_bound_max - (1.0 + 2.25f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn iss_examples() {
        let a = laplacian(6);
        let mut x0 = vec![c(0.0, 0.0); 6];
        x0[0] = c(0.6, 0.0);
        x0[2] = c(0.8, 0.0);
        let b = InputOperator::a_minus_one_x0(SpectralVector::new(x0, Scale::X));
        let v = iss_certificate(&a, &b, &TrialOptions::default()).unwrap();
        assert!(v.max_ratio <= 1.0);
        assert_eq!(v.checks, 100 * 10);
        assert!(v.bundle.gain <= 1.0 + 1e-12);

        // u ≡ 0: pure decay
        let x = SpectralVector::from_real(&[1.0, -1.0, 0.5, 0.0, 0.0, 2.0], Scale::X);
        let zero = PiecewiseSignal::constant(vec![c(0.0, 0.0)], 3.0).unwrap();
        for t in [0.5, 1.0, 3.0] {
            let y = trajectory(&a, &b, &x, &zero, t).unwrap();
            assert!(a.space_norm(&y).unwrap() <= (-t).exp() * a.space_norm(&x).unwrap() * (1.0 + 1e-15));
        }

        // x₀ = 0, u ≡ 1, bounded column: x(t) = A⁻¹(T(t) − I)b
        let col = SpectralVector::from_real(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0], Scale::X);
        let bb = InputOperator::columns(vec![col.clone()]);
        let bound = linfty_bounds(&a, &bb, f64::INFINITY, &BoundOptions::default()).unwrap();
        let one = PiecewiseSignal::constant(vec![c(1.0, 0.0)], 4.0).unwrap();
        let y = trajectory(&a, &bb, &SpectralVector::zeros(6, Scale::X), &one, 4.0).unwrap();
        let ainv_b = (1.0f64 + 0.25).sqrt();
        assert!(a.space_norm(&y).unwrap() <= ainv_b);
        assert!(ainv_b <= bound.upper_bound * (1.0 + 1e-12));
    }

    #[test]
    fn undersized_gain_is_caught() {
        let a = laplacian(4);
        let b = InputOperator::a_minus_one_x0(SpectralVector::from_real(&[1.0, 0.0, 0.0, 0.0], Scale::X));
        let opts = TrialOptions {
            gain_override: Some(1e-6),
            ..TrialOptions::default()
        };
        match iss_certificate(&a, &b, &opts) {
            Err(Error::CertificateViolation(dump)) => assert!(dump.lhs > dump.rhs),
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    #[test]
    fn iiss_examples() {
        let a = laplacian(8);
        let x0 = SpectralVector::new((1..=8).map(|k| c(1.0 / k as f64, 0.0)).collect(), Scale::X);
        let n = a.space_norm(&x0).unwrap();
        let x0 = x0.scaled(c(1.0 / n, 0.0));
        let psi = YoungFunction::power_over_p(2.0).unwrap();
        let v = iiss_certificate(&a, &x0, &psi, &TrialOptions { trials: 30, ..TrialOptions::default() }).unwrap();
        assert!(v.max_ratio <= 1.0);
        assert!(v.scope.contains("theta"));

        // homogeneity of the certified input term
        let (phi, cc) = v.bundle.iiss.clone().unwrap();
        let u = PiecewiseSignal::scalar(vec![0.0, 0.4, 1.0], vec![c(1.0, 0.0), c(-0.5, 0.2)]).unwrap();
        let base = cc * luxemburg_norm(&phi, &u.norm_profile(None).unwrap()).unwrap();
        let scaled = PiecewiseSignal::scalar(vec![0.0, 0.4, 1.0], vec![c(3.0, 0.0), c(-1.5, 0.6)]).unwrap();
        let tripled = cc * luxemburg_norm(&phi, &scaled.norm_profile(None).unwrap()).unwrap();
        assert!((tripled - 3.0 * base).abs() < 1e-12 * tripled);
    }

    #[test]
    fn shift_demo_cases() {
        let sq = YoungFunction::pure_power(2.0).unwrap();
        let one = ShiftProfile::Sampled {
            function: SampledFunction::constant(1.0, 1.0).unwrap(),
        };
        let r = shift_demo(&one, &sq, 1.0).unwrap();
        assert_eq!(r.output_l1, ModularOutcome::Finite { value: 1.0 });
        assert!(r.in_e_phi);

        let root = ShiftProfile::PowerLaw {
            amplitude: 0.5,
            exponent: 0.5,
        };
        let r = shift_demo(&root, &sq, 1.0).unwrap();
        match r.input_l1 {
            ModularOutcome::Finite { value } => assert!((value - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(r.modular, ModularOutcome::Divergent { partial, .. } if partial > 1e6));
        assert!(!r.in_e_phi);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let k = rng.gen_range(2..40);
            let mut grid: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
            grid.push(0.0);
            grid.push(1.0);
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            let vals = (0..grid.len() - 1).map(|_| rng.gen_range(0.0..5.0)).collect();
            let f = ShiftProfile::Sampled {
                function: SampledFunction::new(grid, vals, None).unwrap(),
            };
            let r = shift_demo(&f, &YoungFunction::pure_power(3.0).unwrap(), 1.0).unwrap();
            assert_eq!(r.output_l1, r.input_l1);
            assert!(r.in_e_phi);
        }
    }

    #[test]
    fn boundedness_examples() {
        let n = 64;
        let a = DiagonalGenerator::from_eigenvalues((1..=n).map(|k| c(-((k * k) as f64), 0.0)).collect()).unwrap();
        let tab = boundedness_probe(&a, &[16, 32, 64], &[1e-2, 1e-4, 1e-6]).unwrap();
        for row in tab.rows.iter().filter(|r| r.critical) {
            assert!((row.value - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        }
        assert!(tab.zero_class_degrades);
        assert!(tab.rows.iter().all(|r| r.value <= 2.0));
        let fixed: Vec<&ProbeRow> = tab.rows.iter().filter(|r| r.modes == 16 && !r.critical).collect();
        assert!((fixed[2].value + (-256e-6f64).exp_m1()).abs() < 1e-18);
    }
}
