//! The input map `Φ_t u = ∫₀ᵗ T₋₁(s)Bu(s) ds` of a diagonal system and
//! two-sided bounds on its norm from `Z(0,t;U)` to `X`.
//!
//! Lower bounds are always achieved by a concrete input; upper bounds come
//! from closed-form estimates that hold for every input.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ext_f64, pairwise_sum};
use crate::orlicz::{compose_sqrt, complementary, luxemburg_norm, ExpTail, SampledFunction, YoungFunction};
use crate::quad::{geometric_points, integrate_panels, QuadOptions};
use crate::signals::{mode_integral_upto, piece_integrals, worst_case_phases, PhaseProblem, PiecewiseSignal};
use crate::spectral::{DiagonalGenerator, Scale, SpectralVector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Horizon used to stand in for `t = ∞`: `e^{-40}` of the slowest mode is left.
pub const TAIL_DECADES: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalSymbol {
    /// `B = A₋₁`, coefficient `λ_n` on channel `n`
    AMinusOne,
    /// `B = (−A₋₁)^{1/2}`, coefficient `(−λ_n)^{1/2}`
    SqrtMinusA,
}

/// Control operator `B ∈ L(U, X₋₁)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputOperator {
    /// `U = ℂ^m`, one column per input channel
    Columns { columns: Vec<SpectralVector> },
    /// `U = ℂ`, `B = A₋₁x₀`
    AMinusOneX0 { x0: SpectralVector },
    /// `U = X`, `B` acting diagonally
    Diagonal { symbol: DiagonalSymbol },
}

impl InputOperator {
    pub fn columns(columns: Vec<SpectralVector>) -> Self {
        Self::Columns { columns }
    }

    pub fn a_minus_one_x0(x0: SpectralVector) -> Self {
        Self::AMinusOneX0 { x0 }
    }

    pub fn diagonal(symbol: DiagonalSymbol) -> Self {
        Self::Diagonal { symbol }
    }

    pub fn channels(&self, a: &DiagonalGenerator) -> usize {
        match self {
            Self::Columns { columns } => columns.len(),
            Self::AMinusOneX0 { .. } => 1,
            Self::Diagonal { .. } => a.len(),
        }
    }

    pub fn validate(&self, a: &DiagonalGenerator) -> Result<()> {
        match self {
            Self::Columns { columns } => {
                if columns.is_empty() {
                    return Err(Error::Dimension("input operator has no columns".into()));
                }
                for (ch, c) in columns.iter().enumerate() {
                    if c.len() != a.len() {
                        return Err(Error::Dimension(format!(
                            "column {ch} has {} coefficients for {} modes",
                            c.len(),
                            a.len()
                        )));
                    }
                    if !a.norm_in(c, Scale::Xm1)?.is_finite() {
                        return Err(Error::InvalidVector(format!("column {ch} has infinite X₋₁ norm")));
                    }
                }
            }
            Self::AMinusOneX0 { x0 } => {
                if x0.len() != a.len() {
                    return Err(Error::Dimension(format!(
                        "x0 has {} coefficients for {} modes",
                        x0.len(),
                        a.len()
                    )));
                }
                if !a.norm_in(x0, Scale::X)?.is_finite() {
                    return Err(Error::InvalidVector("x0 is not in X".into()));
                }
            }
            Self::Diagonal { symbol } => {
                if *symbol == DiagonalSymbol::SqrtMinusA {
                    a.require_analytic()?;
                }
            }
        }
        Ok(())
    }

    /// Per mode `n`, the nonzero entries `(channel, B_{n,ch})`.
    pub fn coefficients(&self, a: &DiagonalGenerator) -> Result<Vec<Vec<(usize, Complex64)>>> {
        self.validate(a)?;
        let eig = a.eigenvalues();
        let rows = match self {
            Self::Columns { columns } => (0..a.len())
                .map(|n| {
                    columns
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| c.coeffs[n] != ZERO)
                        .map(|(ch, c)| (ch, c.coeffs[n]))
                        .collect()
                })
                .collect(),
            Self::AMinusOneX0 { x0 } => eig
                .iter()
                .zip(&x0.coeffs)
                .map(|(l, x)| {
                    let b = l * x;
                    if b == ZERO {
                        vec![]
                    } else {
                        vec![(0, b)]
                    }
                })
                .collect(),
            Self::Diagonal { symbol } => {
                let sym = diagonal_symbols(a, *symbol)?;
                sym.into_iter().enumerate().map(|(n, s)| vec![(n, s)]).collect()
            }
        };
        Ok(rows)
    }

    /// Channel weights of `U` when `U = X`.
    pub fn channel_weights(&self, a: &DiagonalGenerator) -> Option<Vec<f64>> {
        match self {
            Self::Diagonal { .. } => Some(a.weights().to_vec()),
            _ => None,
        }
    }

    /// `A₋₁⁻¹` applied to each column (`x₀` itself for `A₋₁x₀`).
    fn preimages(&self, a: &DiagonalGenerator) -> Option<Vec<Vec<Complex64>>> {
        match self {
            Self::Columns { columns } => Some(
                columns
                    .iter()
                    .map(|c| c.coeffs.iter().zip(a.eigenvalues()).map(|(b, l)| b / l).collect())
                    .collect(),
            ),
            Self::AMinusOneX0 { x0 } => Some(vec![x0.coeffs.clone()]),
            Self::Diagonal { .. } => None,
        }
    }

    fn columns_in_x(&self) -> bool {
        match self {
            Self::Columns { columns } => columns.iter().all(|c| c.scale != Scale::Xm1),
            _ => false,
        }
    }
}

fn diagonal_symbols(a: &DiagonalGenerator, symbol: DiagonalSymbol) -> Result<Vec<Complex64>> {
    match symbol {
        DiagonalSymbol::AMinusOne => Ok(a.eigenvalues().to_vec()),
        DiagonalSymbol::SqrtMinusA => a.sqrt_symbols(),
    }
}

/// `∫₀ᵗ e^{Re λ s} ds`, with `t = ∞` allowed.
fn decay_mass(re: f64, t: f64) -> f64 {
    if t.is_infinite() {
        1.0 / -re
    } else {
        -(re * t).exp_m1() / -re
    }
}

/// Finite horizon used for searches and quadrature when `t = ∞`.
pub fn effective_horizon(a: &DiagonalGenerator, t: f64) -> f64 {
    if t.is_finite() {
        t
    } else {
        TAIL_DECADES / a.decay_rate()
    }
}

/// `(Φ_t u)_n = Σ_ch B_{n,ch} ∫₀ᵗ e^{λ_n s} u_ch(s) ds`, exact.
///
/// The result is tagged `X` when its `X` norm is finite and `X₋₁` otherwise.
pub fn input_map(a: &DiagonalGenerator, b: &InputOperator, u: &PiecewiseSignal, t: f64) -> Result<SpectralVector> {
    let rows = b.coefficients(a)?;
    if u.channels() != b.channels(a) {
        return Err(Error::Dimension(format!(
            "signal has {} channels, input space has {}",
            u.channels(),
            b.channels(a)
        )));
    }
    if !(t > 0.0) || t > u.horizon() {
        return Err(Error::InvalidSignal(format!(
            "signal lives on [0, {}] but the horizon is {t}",
            u.horizon()
        )));
    }
    let coeffs: Vec<Complex64> = a
        .eigenvalues()
        .iter()
        .zip(&rows)
        .map(|(l, row)| {
            row.iter()
                .map(|&(ch, bn)| bn * mode_integral_upto(*l, u, ch, t))
                .sum()
        })
        .collect();
    let v = SpectralVector::new(coeffs, Scale::X);
    if a.norm_in(&v, Scale::X)?.is_finite() {
        Ok(v)
    } else {
        Ok(v.with_scale(Scale::Xm1))
    }
}

/// `‖u‖_{L^∞(0,t;U)}` measured with the channel weights of `B`.
pub fn input_norm(a: &DiagonalGenerator, b: &InputOperator, u: &PiecewiseSignal) -> f64 {
    u.linf_norm(b.channel_weights(a).as_deref())
}

/// `∫₀ᵀ |⟨y, A T(s) x⟩| ds`.
///
/// Geometric panels resolve the `1/s` behaviour near the origin when `x` is
/// not in `X₁`; `T = ∞` is cut where the slowest mode has decayed by `e^{-40}`.
pub fn output_map_l1(a: &DiagonalGenerator, y: &SpectralVector, x: &SpectralVector, horizon: f64) -> Result<f64> {
    if y.len() != a.len() || x.len() != a.len() {
        return Err(Error::Dimension("vectors do not match the generator".into()));
    }
    let terms: Vec<(Complex64, Complex64)> = a
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(n, l)| (*l, y.coeffs[n].conj() * x.coeffs[n] * l * a.weights()[n]))
        .filter(|(_, c)| *c != ZERO)
        .collect();
    match terms.len() {
        0 => return Ok(0.0),
        1 => {
            let (l, c) = terms[0];
            return Ok(c.norm() * decay_mass(l.re, horizon));
        }
        _ => {}
    }
    let slowest = terms.iter().map(|(l, _)| -l.re).fold(f64::INFINITY, f64::min);
    let end = horizon.min(TAIL_DECADES / slowest);
    let integrand = |s: f64| {
        let mut acc = ZERO;
        for (l, c) in &terms {
            acc += c * (l * s).exp();
        }
        acc.norm()
    };
    let mut pts = vec![0.0];
    pts.extend(geometric_points(end, 1e-12));
    Ok(integrate_panels(integrand, &pts, QuadOptions::rel(1e-8))?.value)
}

/// `sup_n (|λ_n| / (2|Re λ_n|))^{1/2}`, the infinite-time `L²` bound of
/// `(−A)^{1/2}` as observation operator and of `(−A₋₁)^{1/2}` as control
/// operator.
pub fn l2_adm_constant(a: &DiagonalGenerator) -> Result<f64> {
    a.require_analytic()?;
    Ok(a
        .eigenvalues()
        .iter()
        .map(|l| (l.norm() / (2.0 * -l.re)).sqrt())
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Linf,
    L2,
    L1,
    Orlicz,
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Space::Linf => "Linf",
            Space::L2 => "L2",
            Space::L1 => "L1",
            Space::Orlicz => "Orlicz",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Factorization,
    HinfMultiplier,
    #[serde(rename = "kernel-L1")]
    KernelL1,
    PhaseSearch,
    ClosedForm,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Route::Factorization => "factorization",
            Route::HinfMultiplier => "hinf-multiplier",
            Route::KernelL1 => "kernel-L1",
            Route::PhaseSearch => "phase-search",
            Route::ClosedForm => "closed-form",
        })
    }
}

/// Outcome of one bounding route; `value` is `∞` when the route does not
/// give a finite bound and the note says why.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteOutcome {
    pub route: Route,
    #[serde(with = "ext_f64")]
    pub value: f64,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    #[serde(with = "ext_f64")]
    pub horizon: f64,
    pub space: Space,
    pub lower_bound: f64,
    #[serde(with = "ext_f64")]
    pub upper_bound: f64,
    pub lower_route: Route,
    pub route: Route,
    pub modes: usize,
    pub upper_routes: Vec<RouteOutcome>,
}

impl AdmissibilityReport {
    fn assemble(
        horizon: f64,
        space: Space,
        lower: (f64, Route),
        uppers: Vec<RouteOutcome>,
        modes: usize,
    ) -> Result<Self> {
        let best = uppers
            .iter()
            .filter(|r| r.value.is_finite())
            .min_by(|x, y| x.value.total_cmp(&y.value));
        let (upper, route) = match best {
            Some(r) => (r.value, r.route),
            None => (f64::INFINITY, lower.1),
        };
        if lower.0 > upper + 1e-9 * (1.0 + upper) {
            return Err(Error::InconsistentBounds { lower: lower.0, upper });
        }
        Ok(Self {
            horizon,
            space,
            lower_bound: lower.0,
            upper_bound: upper,
            lower_route: lower.1,
            route,
            modes,
            upper_routes: uppers,
        })
    }

    /// Flat CSV row `t, Z, lower, upper, route`.
    pub fn csv_row(&self) -> [String; 5] {
        [
            self.horizon.to_string(),
            self.space.to_string(),
            self.lower_bound.to_string(),
            self.upper_bound.to_string(),
            self.route.to_string(),
        ]
    }
}

/// Tuning of the lower-bound search.
#[derive(Clone, Debug)]
pub struct BoundOptions {
    /// uniform pieces of the phase search
    pub pieces: usize,
    pub seed: u64,
    pub real_field: bool,
    /// extra inputs whose ratio `‖Φ_t u‖ / ‖u‖_∞` is evaluated exactly
    pub candidates: Vec<PiecewiseSignal>,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            pieces: 16,
            seed: 0,
            real_field: false,
            candidates: vec![],
        }
    }
}

fn phase_problem(a: &DiagonalGenerator, b: &InputOperator, horizon: f64, opts: &BoundOptions) -> Result<PhaseProblem> {
    let rows = b.coefficients(a)?;
    let pieces = opts.pieces.max(1);
    let bp: Vec<f64> = (0..=pieces).map(|k| horizon * k as f64 / pieces as f64).collect();
    let integrals: Vec<Vec<Complex64>> = a.eigenvalues().iter().map(|l| piece_integrals(*l, &bp)).collect();
    let mut p = PhaseProblem::new(&integrals, &rows, a.weights().to_vec(), bp, b.channels(a))?.real(opts.real_field);
    if let Some(w) = b.channel_weights(a) {
        p = p.with_channel_weights(w);
    }
    Ok(p)
}

/// Best certified lower bound on `‖Φ_t‖_{L^∞→X}`: phase search, the
/// caller's candidates and, for diagonal `B`, the constant inputs `e_n`.
pub fn linfty_lower(a: &DiagonalGenerator, b: &InputOperator, t: f64, opts: &BoundOptions) -> Result<(f64, Route, PiecewiseSignal)> {
    let horizon = effective_horizon(a, t);
    let found = worst_case_phases(&phase_problem(a, b, horizon, opts)?, opts.seed)?;
    let mut best = (found.lower_bound, Route::PhaseSearch, found.signal);
    for cand in &opts.candidates {
        let u = if cand.horizon() > horizon {
            cand.restricted(horizon)?
        } else {
            cand.clone()
        };
        let norm = input_norm(a, b, &u);
        if norm == 0.0 {
            continue;
        }
        let x = input_map(a, b, &u, u.horizon())?;
        let ratio = a.norm_in(&x, Scale::X)? / norm;
        if ratio > best.0 {
            best = (ratio, Route::PhaseSearch, u);
        }
    }
    if let InputOperator::Diagonal { symbol } = b {
        // u ≡ e_n/√w_n gives exactly |s_n (e^{λ_n t} − 1)/λ_n|
        let sym = diagonal_symbols(a, *symbol)?;
        let (mut top, mut arg) = (0.0, 0);
        for (n, (s, l)) in sym.iter().zip(a.eigenvalues()).enumerate() {
            let v = if t.is_finite() {
                (s * crate::numeric::cexpm1(l * t) / l).norm()
            } else {
                (s / l).norm()
            };
            if v > top {
                top = v;
                arg = n;
            }
        }
        if top > best.0 {
            let mut row = vec![ZERO; a.len()];
            row[arg] = Complex64::new(1.0 / a.weights()[arg].sqrt(), 0.0);
            best = (top, Route::ClosedForm, PiecewiseSignal::constant(row, horizon)?);
        }
    }
    Ok(best)
}

/// `∫₀ᵗ ‖T(s)B‖_{U→X} ds` for columns in `X`.
fn kernel_l1(a: &DiagonalGenerator, columns: &[SpectralVector], t: f64) -> Result<f64> {
    let eig = a.eigenvalues();
    let w = a.weights();
    let m = columns.len();
    let norm_at = |s: f64| -> f64 {
        let decay: Vec<f64> = eig.iter().map(|l| (2.0 * l.re * s).exp()).collect();
        if m == 1 {
            let terms: Vec<f64> = (0..eig.len())
                .map(|n| w[n] * columns[0].coeffs[n].norm_sqr() * decay[n])
                .collect();
            return pairwise_sum(&terms).sqrt();
        }
        let gram = DMatrix::from_fn(m, m, |i, j| {
            (0..eig.len())
                .map(|n| columns[i].coeffs[n].conj() * columns[j].coeffs[n] * (w[n] * decay[n]))
                .sum::<Complex64>()
        });
        gram.symmetric_eigenvalues().iter().fold(0.0f64, |acc, v| acc.max(*v)).max(0.0).sqrt()
    };
    let end = effective_horizon(a, t);
    let mut pts = vec![0.0];
    pts.extend(geometric_points(end, 1e-12));
    let head = integrate_panels(norm_at, &pts, QuadOptions::rel(1e-10))?;
    // ‖T(s)B‖ ≤ e^{−r(s−end)}‖T(end)B‖ beyond the cut
    let tail = if t.is_infinite() {
        norm_at(end) / a.decay_rate()
    } else {
        0.0
    };
    Ok((head.value + head.error + tail) * (1.0 + 1e-12))
}

/// Upper routes for `‖Φ_t‖_{L^∞→X}`, each valid for every input.
pub fn linfty_upper_routes(a: &DiagonalGenerator, b: &InputOperator, t: f64) -> Result<Vec<RouteOutcome>> {
    let eig = a.eigenvalues();
    let w = a.weights();
    let mut out = Vec::new();
    let pre = b.preimages(a);

    // factorization through (−A₋₁)^{1/2}
    match (&pre, a.is_analytic()) {
        (Some(cols), true) => {
            let l2 = l2_adm_constant(a)?;
            let f2: f64 = cols
                .iter()
                .map(|x| {
                    let terms: Vec<f64> = (0..eig.len())
                        .map(|n| w[n] * eig[n].norm() * x[n].norm_sqr() * 0.5 * decay_mass(eig[n].re, t))
                        .collect();
                    pairwise_sum(&terms)
                })
                .sum();
            out.push(RouteOutcome {
                route: Route::Factorization,
                value: 2.0 * l2 * f2.sqrt(),
                note: "2·c·‖f‖_{L²(0,t/2;X)}, f(s) = (−A)^{1/2}T(s)A₋₁⁻¹b".into(),
            });
        }
        (Some(_), false) => out.push(RouteOutcome {
            route: Route::Factorization,
            value: f64::INFINITY,
            note: "generator is not sectorial of angle < π/2".into(),
        }),
        (None, _) => out.push(RouteOutcome {
            route: Route::Factorization,
            value: f64::INFINITY,
            note: "needs finitely many input channels".into(),
        }),
    }

    // mode n of Φ_t u is λ_n x_n ∫e^{λ_n s}u(s)ds, at most |x_n|‖u‖_∞/cos arg(−λ_n)
    match &pre {
        Some(cols) => {
            let total: f64 = cols
                .iter()
                .map(|x| {
                    let terms: Vec<f64> = (0..eig.len())
                        .map(|n| w[n] * x[n].norm_sqr() * (eig[n].norm() / eig[n].re).powi(2))
                        .collect();
                    pairwise_sum(&terms)
                })
                .sum();
            out.push(RouteOutcome {
                route: Route::HinfMultiplier,
                value: total.sqrt(),
                note: "‖A₋₁⁻¹b‖ with each mode divided by cos arg(−λ_n); at most ‖x₀‖/cos θ".into(),
            });
        }
        None => out.push(RouteOutcome {
            route: Route::HinfMultiplier,
            value: f64::INFINITY,
            note: "multiplier bound needs ‖u_n‖_∞ per mode, which L^∞(0,t;X) does not control".into(),
        }),
    }

    // horizon-dependent per-mode bound
    let closed = match b {
        InputOperator::Diagonal { symbol } => {
            let sym = diagonal_symbols(a, *symbol)?;
            let terms: Vec<f64> = sym
                .iter()
                .zip(eig)
                .map(|(s, l)| (s.norm() * decay_mass(l.re, t)).powi(2))
                .collect();
            (pairwise_sum(&terms).sqrt(), "(Σ_n κ_n²)^{1/2}, κ_n = |b_n|∫₀ᵗe^{Re λ_n s}ds; grows with the truncation")
        }
        _ => {
            let rows = b.coefficients(a)?;
            let mut per_col = vec![Vec::new(); b.channels(a)];
            for (n, row) in rows.iter().enumerate() {
                for &(ch, bn) in row {
                    per_col[ch].push(w[n] * (bn.norm() * decay_mass(eig[n].re, t)).powi(2));
                }
            }
            let total: f64 = per_col.iter().map(|c| pairwise_sum(c)).sum();
            (total.sqrt(), "per column (Σ_n w_n|b_n|²(∫₀ᵗe^{Re λ_n s}ds)²)^{1/2}")
        }
    };
    out.push(RouteOutcome {
        route: Route::ClosedForm,
        value: closed.0,
        note: closed.1.into(),
    });

    match b {
        InputOperator::Columns { columns } if b.columns_in_x() => out.push(RouteOutcome {
            route: Route::KernelL1,
            value: kernel_l1(a, columns, t)?,
            note: "∫₀ᵗ‖T(s)B‖ds".into(),
        }),
        _ => out.push(RouteOutcome {
            route: Route::KernelL1,
            value: f64::INFINITY,
            note: "‖T₋₁(s)B‖_{U→X} is not integrable at s = 0 for B outside L(U, X)".into(),
        }),
    }
    Ok(out)
}

/// Two-sided bounds on `‖Φ_t‖_{L^∞(0,t;U)→X}`; `t = ∞` is allowed.
pub fn linfty_bounds(a: &DiagonalGenerator, b: &InputOperator, t: f64, opts: &BoundOptions) -> Result<AdmissibilityReport> {
    if !(t > 0.0) {
        return Err(Error::InvalidSignal(format!("horizon {t} must be positive")));
    }
    let uppers = linfty_upper_routes(a, b, t)?;
    let (lower, route, _) = linfty_lower(a, b, t, opts)?;
    AdmissibilityReport::assemble(t, Space::Linf, (lower, route), uppers, a.len())
}

/// Output of [`orlicz_adm_bound`].
#[derive(Clone, Debug, Serialize)]
pub struct OrliczAdmBound {
    /// `Φ(x) = Ψ̃(x²)`
    pub phi: YoungFunction,
    /// `‖Φ_t u‖ ≤ C‖u‖_{E_Φ(0,t)}` for all `t`
    pub constant: f64,
    /// `‖g‖_{L_Ψ}` with `g(s) = ‖(−A)^{1/2}T(s/2)x₀‖²`
    pub g_norm: f64,
    pub l2_constant: f64,
    /// Hölder constant used in the chain
    pub holder_constant: f64,
    pub checks: Vec<OrliczCheck>,
    pub violations: usize,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrliczCheck {
    pub trial: usize,
    pub horizon: f64,
    pub lhs: f64,
    pub orlicz_norm: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug)]
pub struct OrliczCheckOptions {
    pub trials: usize,
    pub horizons: Vec<f64>,
    pub pieces: usize,
    pub seed: u64,
}

impl Default for OrliczCheckOptions {
    fn default() -> Self {
        Self {
            trials: 50,
            horizons: vec![0.1, 0.5, 1.0, 2.0, 5.0],
            pieces: 8,
            seed: 0,
        }
    }
}

/// Cell-wise upper envelope of `g(s) = Σ_n c_n e^{r_n s}` (all `r_n < 0`) on
/// a geometric grid, continued by an exponential tail that dominates `g`.
pub fn sampled_exponential_sum(coeffs: &[(f64, f64)]) -> Result<SampledFunction> {
    let active: Vec<(f64, f64)> = coeffs.iter().copied().filter(|(c, _)| *c > 0.0).collect();
    if active.is_empty() {
        return SampledFunction::new(vec![0.0, 1.0], vec![0.0], None);
    }
    let fastest = active.iter().map(|(_, r)| -r).fold(0.0, f64::max);
    let slowest = active.iter().map(|(_, r)| -r).fold(f64::INFINITY, f64::min);
    let g = |s: f64| -> f64 {
        let terms: Vec<f64> = active.iter().map(|(c, r)| c * (r * s).exp()).collect();
        pairwise_sum(&terms)
    };
    let end = TAIL_DECADES / slowest;
    let mut grid = vec![0.0];
    let mut s = 1e-3 / fastest;
    while s < end {
        grid.push(s);
        s *= 1.002;
    }
    grid.push(end);
    // g is decreasing, so the left endpoint dominates the cell
    let values = grid[..grid.len() - 1].iter().map(|&s| g(s)).collect();
    SampledFunction::new(
        grid,
        values,
        Some(ExpTail {
            amplitude: g(end),
            rate: slowest,
        }),
    )
}

/// `E_Φ` bound for `B = A₋₁x₀`: `C = 2·c·‖g‖_Ψ^{1/2}` with `c` from
/// [`l2_adm_constant`] and Hölder constant 2, re-checked on random inputs.
pub fn orlicz_adm_bound(
    a: &DiagonalGenerator,
    x0: &SpectralVector,
    psi: &YoungFunction,
    opts: &OrliczCheckOptions,
) -> Result<OrliczAdmBound> {
    let b = InputOperator::a_minus_one_x0(x0.clone());
    b.validate(a)?;
    let l2 = l2_adm_constant(a)?;
    let phi = compose_sqrt(&complementary(psi)?)?;
    let coeffs: Vec<(f64, f64)> = a
        .eigenvalues()
        .iter()
        .zip(&x0.coeffs)
        .zip(a.weights())
        .map(|((l, x), w)| (w * l.norm() * x.norm_sqr(), l.re))
        .collect();
    let g = sampled_exponential_sum(&coeffs)?;
    let g_norm = match luxemburg_norm(psi, &g) {
        Ok(v) => v,
        Err(Error::LuxemburgNoBracket { .. }) => {
            return Err(Error::RouteInapplicable(
                "‖g‖_Ψ is infinite; build a Young function for g with dvp_construct".into(),
            ))
        }
        Err(e) => return Err(e),
    };
    let constant = 2.0 * l2 * g_norm.sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for trial in 0..opts.trials {
        for &t in &opts.horizons {
            let u = random_signal(&mut rng, t, opts.pieces, 1, false)?;
            let lhs = a.norm_in(&input_map(a, &b, &u, t)?, Scale::X)?;
            let orlicz_norm = luxemburg_norm(&phi, &u.norm_profile(None)?)?;
            let rhs = constant * orlicz_norm;
            if lhs > rhs + 1e-8 {
                violations += 1;
            }
            if rhs > 0.0 {
                max_ratio = max_ratio.max(lhs / rhs);
            }
            checks.push(OrliczCheck {
                trial,
                horizon: t,
                lhs,
                orlicz_norm,
                rhs,
            });
        }
    }
    Ok(OrliczAdmBound {
        phi,
        constant,
        g_norm,
        l2_constant: l2,
        holder_constant: 2.0,
        checks,
        violations,
        max_ratio,
    })
}

/// Piecewise-constant input on `[0, t]` with random breakpoints, random
/// amplitudes over four decades and random phases (signs in the real case).
pub fn random_signal(rng: &mut ChaCha8Rng, t: f64, pieces: usize, channels: usize, real: bool) -> Result<PiecewiseSignal> {
    let mut cuts: Vec<f64> = (1..pieces.max(1)).map(|_| rng.gen_range(0.0..t)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut bp = vec![0.0];
    for c in cuts {
        if c > *bp.last().expect("non-empty") + 1e-9 * t && c < t * (1.0 - 1e-9) {
            bp.push(c);
        }
    }
    bp.push(t);
    let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
    let values = (0..bp.len() - 1)
        .map(|_| {
            (0..channels)
                .map(|_| {
                    let r = scale * rng.gen_range(0.0..1.0);
                    if real {
                        Complex64::new(if rng.gen::<bool>() { r } else { -r }, 0.0)
                    } else {
                        Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
                    }
                })
                .collect()
        })
        .collect();
    PiecewiseSignal::new(bp, values, crate::signals::SignalKind::PiecewiseConstant)
}

/// `‖Φ_t‖_{L²(0,t;U)→X}` from the largest eigenvalue of the reachability
/// Gramian `∫₀ᵗ T(s)BB*T(s)* ds`.
pub fn l2_input_norm(a: &DiagonalGenerator, b: &InputOperator, t: f64) -> Result<f64> {
    let rows = b.coefficients(a)?;
    let eig = a.eigenvalues();
    let w = a.weights();
    if let InputOperator::Diagonal { .. } = b {
        let top = rows
            .iter()
            .zip(eig)
            .map(|(row, l)| row[0].1.norm_sqr() * decay_mass(2.0 * l.re, t))
            .fold(0.0, f64::max);
        return Ok(top.sqrt());
    }
    let n = eig.len();
    let mass = |z: Complex64| -> Complex64 {
        if t.is_infinite() {
            -1.0 / z
        } else {
            crate::numeric::exp_integral(z, 0.0, t)
        }
    };
    let gram = DMatrix::from_fn(n, n, |i, k| {
        let mut cross = ZERO;
        for &(ci, bi) in &rows[i] {
            for &(ck, bk) in &rows[k] {
                if ci == ck {
                    cross += bi * bk.conj();
                }
            }
        }
        if cross == ZERO {
            return ZERO;
        }
        cross * (w[i] * w[k]).sqrt() * mass(eig[i] + eig[k].conj())
    });
    let top = gram.symmetric_eigenvalues().iter().fold(0.0f64, |acc, v| acc.max(*v));
    Ok(top.max(0.0).sqrt())
}

/// `‖Φ_t‖_{L¹(0,t;U)→X} = sup_{s≤t}‖T(s)B‖ = ‖B‖_{U→X}`, the semigroup being
/// a contraction.
pub fn l1_input_norm(a: &DiagonalGenerator, b: &InputOperator) -> Result<f64> {
    let rows = b.coefficients(a)?;
    let w = a.weights();
    if let InputOperator::Diagonal { .. } = b {
        return Ok(rows.iter().map(|r| r[0].1.norm()).fold(0.0, f64::max));
    }
    let m = b.channels(a);
    let gram = DMatrix::from_fn(m, m, |i, j| {
        let mut acc = ZERO;
        for (n, row) in rows.iter().enumerate() {
            let bi = row.iter().find(|(c, _)| *c == i).map(|(_, v)| *v).unwrap_or(ZERO);
            let bj = row.iter().find(|(c, _)| *c == j).map(|(_, v)| *v).unwrap_or(ZERO);
            acc += bi.conj() * bj * w[n];
        }
        acc
    });
    let top = gram.symmetric_eigenvalues().iter().fold(0.0f64, |acc, v| acc.max(*v));
    Ok(top.max(0.0).sqrt())
}

/// `sup_t ‖Φ_t‖` over a horizon grid, with the horizon-uniform upper bound.
///
/// `psi` is needed for `Space::Orlicz`, where `B` must be `A₋₁x₀`.
pub fn infinite_time_sup(
    a: &DiagonalGenerator,
    b: &InputOperator,
    space: Space,
    horizons: &[f64],
    opts: &BoundOptions,
    psi: Option<&YoungFunction>,
) -> Result<AdmissibilityReport> {
    if horizons.is_empty() || horizons.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidSignal("horizon grid must be nonempty and positive".into()));
    }
    let modes = a.len();
    match space {
        Space::Linf => {
            let uniform = linfty_bounds(a, b, f64::INFINITY, opts)?;
            let mut lower = (uniform.lower_bound, uniform.lower_route);
            for &t in horizons {
                let r = linfty_bounds(a, b, t, opts)?;
                if r.lower_bound > lower.0 {
                    lower = (r.lower_bound, r.lower_route);
                }
            }
            AdmissibilityReport::assemble(f64::INFINITY, space, lower, uniform.upper_routes, modes)
        }
        Space::L2 => {
            let grid_sup = horizons
                .iter()
                .map(|&t| l2_input_norm(a, b, t))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let limit = l2_input_norm(a, b, f64::INFINITY)?;
            let upper = RouteOutcome {
                route: Route::ClosedForm,
                value: limit,
                note: "Gramian at t = ∞; the Gramian is nondecreasing in t".into(),
            };
            AdmissibilityReport::assemble(f64::INFINITY, space, (grid_sup, Route::ClosedForm), vec![upper], modes)
        }
        Space::L1 => {
            let v = l1_input_norm(a, b)?;
            let upper = RouteOutcome {
                route: Route::ClosedForm,
                value: v,
                note: "‖B‖_{U→X}, attained as s → 0".into(),
            };
            AdmissibilityReport::assemble(f64::INFINITY, space, (v, Route::ClosedForm), vec![upper], modes)
        }
        Space::Orlicz => {
            let psi = psi.ok_or_else(|| Error::RouteInapplicable("Orlicz space needs a Young function Ψ".into()))?;
            let x0 = match b {
                InputOperator::AMinusOneX0 { x0 } => x0,
                _ => {
                    return Err(Error::RouteInapplicable(
                        "the Orlicz route is available for B = A₋₁x₀ only".into(),
                    ))
                }
            };
            let bound = orlicz_adm_bound(
                a,
                x0,
                psi,
                &OrliczCheckOptions {
                    trials: 0,
                    ..OrliczCheckOptions::default()
                },
            )?;
            let mut lower: f64 = 0.0;
            for &t in horizons {
                let (_, _, u) = linfty_lower(a, b, t, opts)?;
                for cand in [u, PiecewiseSignal::constant(vec![Complex64::new(1.0, 0.0)], t)?] {
                    let n = luxemburg_norm(&bound.phi, &cand.norm_profile(None)?)?;
                    if n > 0.0 {
                        let x = input_map(a, b, &cand, cand.horizon())?;
                        lower = lower.max(a.norm_in(&x, Scale::X)? / n);
                    }
                }
            }
            let upper = RouteOutcome {
                route: Route::Factorization,
                value: bound.constant,
                note: "2·c·‖g‖_Ψ^{1/2} with Φ(x) = Ψ̃(x²)".into(),
            };
            AdmissibilityReport::assemble(f64::INFINITY, space, (lower, Route::PhaseSearch), vec![upper], modes)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroClassVerdict {
    Plausible,
    Obstructed,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProfileRow {
    pub t: f64,
    pub lower: f64,
    #[serde(with = "ext_f64")]
    pub upper: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroClassProfile {
    pub rows: Vec<ProfileRow>,
    pub floor: f64,
    pub verdict: ZeroClassVerdict,
}

/// `L^∞` bounds along a decreasing horizon grid.
///
/// "plausible" when the last upper bound is below 1% of the first one,
/// "obstructed" when every lower bound stays at or above `floor`.
pub fn zero_class_profile(
    a: &DiagonalGenerator,
    b: &InputOperator,
    ts: &[f64],
    opts: &BoundOptions,
    floor: f64,
) -> Result<ZeroClassProfile> {
    if ts.is_empty() || ts.windows(2).any(|w| !(w[1] < w[0])) || ts.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidSignal("zero-class grid must be positive and strictly decreasing".into()));
    }
    let rows = ts
        .iter()
        .map(|&t| {
            let r = linfty_bounds(a, b, t, opts)?;
            Ok(ProfileRow {
                t,
                lower: r.lower_bound,
                upper: r.upper_bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let first = rows[0].upper;
    let last = rows[rows.len() - 1].upper;
    let verdict = if rows.len() > 1 && last.is_finite() && last <= 1e-2 * first {
        ZeroClassVerdict::Plausible
    } else if rows.iter().all(|r| r.lower >= floor) {
        ZeroClassVerdict::Obstructed
    } else {
        ZeroClassVerdict::Inconclusive
    };
    Ok(ZeroClassProfile { rows, floor, verdict })
}

/// Membership of a column in `ran A₋₁`, judged from the partial sums of
/// `Σ w_n|b_n/λ_n|²`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RangeMembership {
    pub partial_sum: f64,
    /// share of the sum carried by the last quarter of the modes
    pub tail_share: f64,
    /// the tail share exceeds 5%, so the series may well diverge
    pub tail_dominated: bool,
}

pub fn ran_a_minus_one(a: &DiagonalGenerator, b: &SpectralVector) -> Result<RangeMembership> {
    if b.len() != a.len() {
        return Err(Error::Dimension("column does not match the generator".into()));
    }
    let terms: Vec<f64> = (0..a.len())
        .map(|n| a.weights()[n] * (b.coeffs[n] / a.eigenvalues()[n]).norm_sqr())
        .collect();
    let total = pairwise_sum(&terms);
    let cut = a.len() - a.len() / 4;
    let tail = pairwise_sum(&terms[cut..]);
    let share = if total > 0.0 { tail / total } else { 0.0 };
    Ok(RangeMembership {
        partial_sum: total,
        tail_share: share,
        tail_dominated: share > 0.05,
    })
}

/// The `X`-valued input `σ ↦ u(2σ)·(−A)^{1/2}T(σ)x₀` on `[0, t/2]`.
pub fn factorization_signal(
    a: &DiagonalGenerator,
    x0: &SpectralVector,
    roots: &[Complex64],
    u: &PiecewiseSignal,
) -> PiecewiseSignal {
    let bp: Vec<f64> = u.breakpoints().iter().map(|s| 0.5 * s).collect();
    let values = u
        .values()
        .iter()
        .map(|row| roots.iter().zip(&x0.coeffs).map(|(r, x)| row[0] * r * x).collect())
        .collect();
    PiecewiseSignal::new(
        bp,
        values,
        crate::signals::SignalKind::Exponential {
            rates: a.eigenvalues().to_vec(),
        },
    )
    .expect("halved breakpoints of a valid signal")
}
