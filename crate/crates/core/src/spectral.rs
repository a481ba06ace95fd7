//! Diagonal generators on a weighted ℓ² space and their scale of spaces.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// Which member of the scale `X₁ ⊂ X ⊂ X₋₁` a coefficient vector lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scale {
    X1,
    X,
    Xm1,
}

impl Scale {
    fn up(self) -> Scale {
        match self {
            Scale::Xm1 => Scale::X,
            _ => Scale::X1,
        }
    }

    fn down(self) -> Scale {
        match self {
            Scale::X1 => Scale::X,
            _ => Scale::Xm1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralVector {
    pub coeffs: Vec<Complex64>,
    pub scale: Scale,
}

impl SpectralVector {
    pub fn new(coeffs: Vec<Complex64>, scale: Scale) -> Self {
        Self { coeffs, scale }
    }

    pub fn zeros(n: usize, scale: Scale) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); n], scale)
    }

    /// Unit coordinate vector `e_n` (unnormalized; its norm is `√w_n`).
    pub fn basis(n: usize, len: usize, scale: Scale) -> Self {
        let mut v = Self::zeros(len, scale);
        v.coeffs[n] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_real(values: &[f64], scale: Scale) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), scale)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn with_scale(mut self, scale: Scale) -> Self {
        self.scale = scale;
        self
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * a).collect(), self.scale)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!("{} vs {}", self.len(), other.len())));
        }
        Ok(Self::new(
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
            self.scale,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }
}

/// Truncated diagonal generator `A e_n = λ_n e_n` with
/// `‖x‖² = Σ w_n |x_n|²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagonalGenerator {
    eigenvalues: Vec<Complex64>,
    weights: Vec<f64>,
    beta: Complex64,
    delta: Option<f64>,
}

fn bad_gen(msg: impl Into<String>) -> Error {
    Error::InvalidGenerator(msg.into())
}

impl DiagonalGenerator {
    /// `weights` default to 1 and `beta` to 0 (or 1 if some `|λ_n|` is 0).
    /// `delta`, when given, is checked as a stability margin `Re λ_n ≤ −δ`.
    pub fn new(
        eigenvalues: Vec<Complex64>,
        weights: Option<Vec<f64>>,
        beta: Option<Complex64>,
        delta: Option<f64>,
    ) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(bad_gen("no eigenvalues"));
        }
        for (n, l) in eigenvalues.iter().enumerate() {
            if !(l.re.is_finite() && l.im.is_finite()) {
                return Err(bad_gen(format!("eigenvalue {n} is not finite")));
            }
            if l.re >= 0.0 {
                return Err(bad_gen(format!(
                    "eigenvalue {n} = {l} is not in the open left half-plane"
                )));
            }
        }
        let weights = weights.unwrap_or_else(|| vec![1.0; eigenvalues.len()]);
        if weights.len() != eigenvalues.len() {
            return Err(bad_gen(format!(
                "{} weights for {} eigenvalues",
                weights.len(),
                eigenvalues.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(bad_gen("weights must be positive and finite"));
        }
        if let Some(d) = delta {
            if !(d > 0.0) {
                return Err(bad_gen("stability margin delta must be positive"));
            }
            if let Some((n, l)) = eigenvalues.iter().enumerate().find(|(_, l)| l.re > -d) {
                return Err(bad_gen(format!("Re λ_{n} = {} exceeds -delta = {}", l.re, -d)));
            }
        }
        let beta = beta.unwrap_or_else(|| {
            let inf = eigenvalues.iter().map(|l| l.norm()).fold(f64::INFINITY, f64::min);
            if inf > 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        });
        for (n, l) in eigenvalues.iter().enumerate() {
            if (beta - l).norm() < 1e-14 * (1.0 + beta.norm()) {
                return Err(Error::SpectrumHit {
                    re: beta.re,
                    im: beta.im,
                    mode: n,
                });
            }
        }
        Ok(Self {
            eigenvalues,
            weights,
            beta,
            delta,
        })
    }

    pub fn from_eigenvalues(eigenvalues: Vec<Complex64>) -> Result<Self> {
        Self::new(eigenvalues, None, None, None)
    }

    /// `λ_n = −|base|·n^α·e^{iφ}` for `n = 1..=count`.
    pub fn ray(base: f64, exponent: f64, angle: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(bad_gen("ray rule needs count >= 1"));
        }
        if angle.abs() >= FRAC_PI_2 {
            return Err(bad_gen(format!("ray angle {angle} leaves the left half-plane")));
        }
        let rot = Complex64::from_polar(1.0, angle);
        let eig = (1..=count)
            .map(|n| -rot * base.abs() * (n as f64).powf(exponent))
            .collect();
        Self::from_eigenvalues(eig)
    }

    /// Same spectrum, different stability margin check.
    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        self = Self::new(self.eigenvalues, Some(self.weights), Some(self.beta), Some(delta))?;
        Ok(self)
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `min_n |Re λ_n|`, the decay rate of the semigroup in the weighted norm.
    pub fn decay_rate(&self) -> f64 {
        self.eigenvalues.iter().map(|l| -l.re).fold(f64::INFINITY, f64::min)
    }

    /// Configured margin, or the spectral one when none was given.
    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or_else(|| self.decay_rate())
    }

    pub fn max_modulus(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max)
    }

    fn check(&self, x: &SpectralVector) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::Dimension(format!(
                "vector has {} coefficients, generator has {} modes",
                x.len(),
                self.len()
            )));
        }
        Ok(())
    }

    /// `T(t)x`, coefficient-wise `e^{λ_n t} x_n`.
    pub fn semigroup_apply(&self, t: f64, x: &SpectralVector) -> Result<SpectralVector> {
        self.check(x)?;
        if t == 0.0 {
            return Ok(x.clone());
        }
        Ok(SpectralVector::new(
            self.eigenvalues
                .iter()
                .zip(&x.coeffs)
                .map(|(l, c)| (l * t).exp() * c)
                .collect(),
            x.scale,
        ))
    }

    /// `R(λ, A)x = (λ − A)^{-1}x`; the result is one step smoother.
    pub fn resolvent_apply(&self, lambda: Complex64, x: &SpectralVector) -> Result<SpectralVector> {
        self.check(x)?;
        let guard = 1e-14 * (1.0 + lambda.norm());
        let mut out = Vec::with_capacity(x.len());
        for (n, (l, c)) in self.eigenvalues.iter().zip(&x.coeffs).enumerate() {
            let d = lambda - l;
            if d.norm() < guard {
                return Err(Error::SpectrumHit {
                    re: lambda.re,
                    im: lambda.im,
                    mode: n,
                });
            }
            out.push(c / d);
        }
        Ok(SpectralVector::new(out, x.scale.up()))
    }

    /// `sup_n |arg(−λ_n)|`.
    pub fn sector_angle(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| (-l).arg().abs())
            .fold(0.0, f64::max)
    }

    pub fn is_analytic(&self) -> bool {
        self.sector_angle() < FRAC_PI_2
    }

    pub fn require_analytic(&self) -> Result<()> {
        let angle = self.sector_angle();
        if angle < FRAC_PI_2 {
            Ok(())
        } else {
            Err(Error::NotSectorial { angle })
        }
    }

    /// Principal square roots `(−λ_n)^{1/2}`.
    pub fn sqrt_symbols(&self) -> Result<Vec<Complex64>> {
        self.require_analytic()?;
        Ok(self.eigenvalues.iter().map(|l| (-l).sqrt()).collect())
    }

    /// `(−A)^{1/2}x`, principal branch.
    pub fn frac_power_apply(&self, x: &SpectralVector) -> Result<SpectralVector> {
        self.check(x)?;
        let roots = self.sqrt_symbols()?;
        Ok(SpectralVector::new(
            roots.iter().zip(&x.coeffs).map(|(r, c)| r * c).collect(),
            x.scale.down(),
        ))
    }

    /// `A₋₁x`, i.e. `λ_n x_n`, landing one step lower in the scale.
    pub fn a_minus_one_apply(&self, x: &SpectralVector) -> Result<SpectralVector> {
        self.check(x)?;
        Ok(SpectralVector::new(
            self.eigenvalues.iter().zip(&x.coeffs).map(|(l, c)| l * c).collect(),
            x.scale.down(),
        ))
    }

    /// `g(−A)x` for a scalar symbol `g`, together with `sup_n |g(−λ_n)|`.
    pub fn hinf_multiplier<G: Fn(Complex64) -> Complex64>(
        &self,
        g: G,
        x: &SpectralVector,
    ) -> Result<(SpectralVector, f64)> {
        self.check(x)?;
        let mut sup: f64 = 0.0;
        let mut out = Vec::with_capacity(x.len());
        for (n, (l, c)) in self.eigenvalues.iter().zip(&x.coeffs).enumerate() {
            let v = g(-l);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteMultiplier { mode: n });
            }
            sup = sup.max(v.norm());
            out.push(v * c);
        }
        Ok((SpectralVector::new(out, x.scale), sup))
    }

    fn scale_factor(&self, n: usize, scale: Scale) -> f64 {
        let l = self.eigenvalues[n];
        match scale {
            Scale::X => 1.0,
            Scale::X1 => 1.0 + l.norm_sqr(),
            Scale::Xm1 => 1.0 / (self.beta - l).norm_sqr(),
        }
    }

    /// Norm in the given scale, regardless of the vector's own tag.
    pub fn norm_in(&self, x: &SpectralVector, scale: Scale) -> Result<f64> {
        self.check(x)?;
        let mut terms = Vec::with_capacity(x.len());
        for n in 0..x.len() {
            let t = self.weights[n] * x.coeffs[n].norm_sqr() * self.scale_factor(n, scale);
            if !(t <= 1e300) {
                return Ok(f64::INFINITY);
            }
            terms.push(t);
        }
        Ok(pairwise_sum(&terms).sqrt())
    }

    /// Norm in the vector's tagged scale.
    pub fn space_norm(&self, x: &SpectralVector) -> Result<f64> {
        self.norm_in(x, x.scale)
    }

    /// `⟨y, x⟩ = Σ w_n ȳ_n x_n`.
    pub fn inner(&self, y: &SpectralVector, x: &SpectralVector) -> Result<Complex64> {
        self.check(x)?;
        self.check(y)?;
        let mut re = Vec::with_capacity(x.len());
        let mut im = Vec::with_capacity(x.len());
        for n in 0..x.len() {
            let p = y.coeffs[n].conj() * x.coeffs[n] * self.weights[n];
            re.push(p.re);
            im.push(p.im);
        }
        Ok(Complex64::new(pairwise_sum(&re), pairwise_sum(&im)))
    }

    /// `sup_n 1/|β − λ_n|`, the embedding constant of `X` into `X₋₁`.
    pub fn embedding_constant(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| 1.0 / (self.beta - l).norm())
            .fold(0.0, f64::max)
    }

    /// First `n` modes as a generator of their own.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        let n = n.min(self.len());
        Self::new(
            self.eigenvalues[..n].to_vec(),
            Some(self.weights[..n].to_vec()),
            Some(self.beta),
            self.delta,
        )
    }
}

fn default_kind() -> String {
    "explicit".into()
}

/// JSON description of a generator: an explicit eigenvalue list, or the ray
/// rule `{"kind":"ray","base":-1,"exponent":α,"angle":φ,"count":N}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    #[serde(default = "default_kind")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl GeneratorSpec {
    pub fn ray(base: f64, exponent: f64, angle: f64, count: usize) -> Self {
        Self {
            kind: "ray".into(),
            eigenvalues: None,
            base: Some(base),
            exponent: Some(exponent),
            angle: Some(angle),
            count: Some(count),
            weights: None,
            beta: None,
            delta: None,
        }
    }

    /// Build the generator; `modes` overrides the ray count.
    pub fn build(&self, modes: Option<usize>) -> Result<DiagonalGenerator> {
        let eig = match self.kind.as_str() {
            "explicit" => {
                let e = self
                    .eigenvalues
                    .clone()
                    .ok_or_else(|| bad_gen("explicit generator needs an eigenvalue list"))?;
                match modes {
                    Some(m) if m < e.len() => e[..m].to_vec(),
                    _ => e,
                }
            }
            "ray" => {
                let count = modes.or(self.count).ok_or_else(|| bad_gen("ray rule needs count"))?;
                DiagonalGenerator::ray(
                    self.base.unwrap_or(-1.0),
                    self.exponent.unwrap_or(1.0),
                    self.angle.unwrap_or(0.0),
                    count,
                )?
                .eigenvalues
            }
            other => return Err(bad_gen(format!("unknown generator kind {other:?}"))),
        };
        let weights = match &self.weights {
            Some(w) if w.len() > eig.len() => Some(w[..eig.len()].to_vec()),
            other => other.clone(),
        };
        DiagonalGenerator::new(eig, weights, self.beta, self.delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::exp_integral;
    use crate::quad::{integrate, QuadOptions};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn semigroup_examples() {
        let a = DiagonalGenerator::from_eigenvalues(vec![c(-1.0, 0.0)]).unwrap();
        let x = SpectralVector::from_real(&[1.0], Scale::X);
        assert_eq!(a.semigroup_apply(0.0, &x).unwrap(), x);
        let y = a.semigroup_apply(1.0, &x).unwrap();
        assert!((y.coeffs[0].re - 0.36787944117144233).abs() < 1e-15);
    }

    #[test]
    fn resolvent_examples() {
        let a = DiagonalGenerator::from_eigenvalues(vec![c(-1.0, 0.0)]).unwrap();
        let x = SpectralVector::from_real(&[1.0], Scale::X);
        let r = a.resolvent_apply(c(0.0, 0.0), &x).unwrap();
        assert!((r.coeffs[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(r.scale, Scale::X1);
        assert!(matches!(
            a.resolvent_apply(c(-1.0, 0.0), &x),
            Err(Error::SpectrumHit { mode: 0, .. })
        ));
    }

    #[test]
    fn per_mode_resolvent_sup_matches_sector_geometry() {
        // sup over Re λ > 0 of |λ|/|λ − λ_n| is 1/cos θ for λ_n at angle θ;
        // brute force: coarse grid, then a fine grid around the best point
        for theta in [0.0, 0.4, 1.0, 1.3] {
            let ln = -Complex64::from_polar(2.0, theta);
            let ratio = |re: f64, im: f64| {
                let l = c(re, im);
                l.norm() / (l - ln).norm()
            };
            let res: Vec<f64> = (0..200).map(|i| 1e-9 * 10f64.powf(i as f64 * 12.0 / 199.0)).collect();
            let near = (-2500..=2500).map(|j| ln.im + j as f64 * 0.01);
            let far = (0..60).map(|k| 10f64.powf(k as f64 / 6.0));
            let (mut best, mut at) = (0.0, 0.0);
            for im in near.chain(far) {
                for &re in &res {
                    let v = ratio(re, im);
                    if v > best {
                        best = v;
                        at = im;
                    }
                }
            }
            for j in -2000..=2000 {
                best = best.max(ratio(1e-9, at + j as f64 * 1e-5));
            }
            let expected = 1.0 / theta.cos();
            assert!((best - expected).abs() / expected < 1e-6, "θ={theta}: {best} vs {expected}");
        }
    }

    #[test]
    fn frac_power_examples() {
        let a = DiagonalGenerator::from_eigenvalues(vec![c(-4.0, 0.0), c(-1.0, 1.0)]).unwrap();
        let x = SpectralVector::from_real(&[1.0, 1.0], Scale::X);
        let r = a.frac_power_apply(&x).unwrap();
        assert!((r.coeffs[0] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((r.coeffs[1] - c(1.0986841134678100, -0.4550898605622274)).norm() < 1e-13);
        let rr = a.frac_power_apply(&r.clone().with_scale(Scale::X)).unwrap();
        let minus_a = a.a_minus_one_apply(&x).unwrap().scaled(c(-1.0, 0.0));
        for (p, q) in rr.coeffs.iter().zip(&minus_a.coeffs) {
            assert!((p - q).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_sectorial_square_root() {
        let a = DiagonalGenerator::from_eigenvalues(vec![c(-1e-3, 10.0)]).unwrap();
        assert!(a.is_analytic());
        let a = DiagonalGenerator::from_eigenvalues(vec![c(-1.0, 0.0)]).unwrap();
        let mut bad = a.clone();
        bad.eigenvalues = vec![c(0.0, 1.0)];
        let x = SpectralVector::from_real(&[1.0], Scale::X);
        assert!(matches!(bad.frac_power_apply(&x), Err(Error::NotSectorial { .. })));
    }

    #[test]
    fn multiplier_examples() {
        let a = DiagonalGenerator::from_eigenvalues(vec![c(-1.0, 0.0), c(-3.0, 2.0)]).unwrap();
        let x = SpectralVector::new(vec![c(1.0, 0.5), c(-2.0, 1.0)], Scale::X);
        let (id, sup) = a.hinf_multiplier(|_| c(1.0, 0.0), &x).unwrap();
        assert_eq!(id, x);
        assert_eq!(sup, 1.0);
        let g = |z: Complex64| z * (-z).exp();
        let (y, _) = a.hinf_multiplier(g, &SpectralVector::from_real(&[1.0, 0.0], Scale::X)).unwrap();
        assert!((y.coeffs[0].re - (-1f64).exp()).abs() < 1e-15);
        let h = |z: Complex64| (z + 1.0).inv();
        let (gh, _) = a.hinf_multiplier(|z| g(z) * h(z), &x).unwrap();
        let (hx, _) = a.hinf_multiplier(h, &x).unwrap();
        let (g_hx, _) = a.hinf_multiplier(g, &hx).unwrap();
        for (p, q) in gh.coeffs.iter().zip(&g_hx.coeffs) {
            assert!((p - q).norm() < 1e-14);
        }
        assert!(matches!(
            a.hinf_multiplier(|_| c(f64::NAN, 0.0), &x),
            Err(Error::NonFiniteMultiplier { mode: 0 })
        ));
    }

    #[test]
    fn sector_angle_examples() {
        let real = DiagonalGenerator::ray(-1.0, 1.0, 0.0, 8).unwrap();
        assert_eq!(real.sector_angle(), 0.0);
        let diag = DiagonalGenerator::from_eigenvalues(
            (1..=6).map(|n| -c(1.0, 1.0) * n as f64).collect(),
        )
        .unwrap();
        assert!((diag.sector_angle() - FRAC_PI_4).abs() < 1e-15);
        let k: f64 = 0.7;
        let bounded = DiagonalGenerator::from_eigenvalues(
            (1..=6).map(|n| c(-(n as f64), k * n as f64 * ((n % 3) as f64 - 1.0))).collect(),
        )
        .unwrap();
        assert!(bounded.sector_angle() <= k.atan() + 1e-15);
        assert!(DiagonalGenerator::ray(-1.0, 1.0, PI / 2.0, 3).is_err());
    }

    #[test]
    fn norm_examples() {
        let a = DiagonalGenerator::from_eigenvalues(vec![c(-2.0, 0.0)]).unwrap();
        let e1 = SpectralVector::basis(0, 1, Scale::X);
        assert_eq!(a.space_norm(&e1).unwrap(), 1.0);
        let ae1 = a.a_minus_one_apply(&e1).unwrap();
        assert_eq!(ae1.scale, Scale::Xm1);
        assert!((a.space_norm(&ae1).unwrap() - 1.0).abs() < 1e-15);
        let huge = SpectralVector::from_real(&[1e200], Scale::X1);
        assert_eq!(a.space_norm(&huge).unwrap(), f64::INFINITY);
    }

    #[test]
    fn laplace_transform_of_semigroup_is_resolvent() {
        let a = DiagonalGenerator::from_eigenvalues(vec![c(-1.0, 2.0), c(-0.5, 0.0), c(-3.0, -1.0)]).unwrap();
        let x = SpectralVector::new(vec![c(1.0, 0.0), c(0.3, -0.2), c(-1.0, 1.0)], Scale::X);
        let mu = 0.7;
        let r = a.resolvent_apply(c(mu, 0.0), &x).unwrap();
        for n in 0..3 {
            let l = a.eigenvalues()[n];
            let t_end = 40.0;
            let re = integrate(
                |s| ((l - mu) * s).exp().re,
                0.0,
                t_end,
                QuadOptions::rel(1e-12),
            )
            .unwrap()
            .value;
            let im = integrate(
                |s| ((l - mu) * s).exp().im,
                0.0,
                t_end,
                QuadOptions::rel(1e-12),
            )
            .unwrap()
            .value;
            // closed-form exponential tail beyond t_end
            let tail = exp_integral(l - mu, t_end, f64::INFINITY);
            let got = (c(re, im) + tail) * x.coeffs[n];
            assert!((got - r.coeffs[n]).norm() <= 1e-8 * r.coeffs[n].norm());
        }
    }

    #[test]
    fn spec_round_trip() {
        let spec: GeneratorSpec =
            serde_json::from_str(r#"{"kind":"ray","base":-1,"exponent":2,"angle":0,"count":4}"#).unwrap();
        let a = spec.build(None).unwrap();
        assert_eq!(a.eigenvalues()[3], c(-16.0, 0.0));
        assert_eq!(spec.build(Some(2)).unwrap().len(), 2);
        let explicit: GeneratorSpec = serde_json::from_str(r#"{"eigenvalues":[[-1,0],[-2,1]]}"#).unwrap();
        assert_eq!(explicit.build(None).unwrap().eigenvalues()[1], c(-2.0, 1.0));
        assert!(serde_json::from_str::<GeneratorSpec>(r#"{"kind":"ray","cout":3}"#).is_err());
    }

    fn arb_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| c(a, b)), n)
    }

    fn gen5() -> DiagonalGenerator {
        DiagonalGenerator::new(
            vec![c(-1.0, 0.0), c(-2.0, 3.0), c(-0.5, -0.5), c(-7.0, 0.0), c(-4.0, 1.0)],
            Some(vec![1.0, 0.5, 2.0, 1.5, 0.25]),
            None,
            None,
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn semigroup_law(s in 0.0f64..3.0, t in 0.0f64..3.0, x in arb_vec(5)) {
            let a = gen5();
            let x = SpectralVector::new(x, Scale::X);
            let lhs = a.semigroup_apply(s, &a.semigroup_apply(t, &x).unwrap()).unwrap();
            let rhs = a.semigroup_apply(s + t, &x).unwrap();
            for (p, q) in lhs.coeffs.iter().zip(&rhs.coeffs) {
                prop_assert!((p - q).norm() <= 1e-14 * (1.0 + q.norm()));
            }
        }

        #[test]
        fn resolvent_identity(lr in 0.1f64..5.0, li in -5.0f64..5.0, mr in 0.1f64..5.0, mi in -5.0f64..5.0, x in arb_vec(5)) {
            let a = gen5();
            let x = SpectralVector::new(x, Scale::X);
            let (l, m) = (c(lr, li), c(mr, mi));
            let lhs = a.resolvent_apply(l, &x).unwrap().sub(&a.resolvent_apply(m, &x).unwrap()).unwrap();
            let rhs = a.resolvent_apply(l, &a.resolvent_apply(m, &x).unwrap()).unwrap().scaled(m - l);
            for (p, q) in lhs.coeffs.iter().zip(&rhs.coeffs) {
                prop_assert!((p - q).norm() <= 1e-13 * (1.0 + q.norm()));
            }
        }

        #[test]
        fn scale_monotonicity(x in arb_vec(5)) {
            let a = gen5();
            let x = SpectralVector::new(x, Scale::X);
            let c1 = a.embedding_constant();
            let m1 = a.norm_in(&x, Scale::Xm1).unwrap();
            let m0 = a.norm_in(&x, Scale::X).unwrap();
            let p1 = a.norm_in(&x, Scale::X1).unwrap();
            prop_assert!(m1 <= c1 * m0 * (1.0 + 1e-14));
            prop_assert!(m0 <= p1 * (1.0 + 1e-14));
        }

        #[test]
        fn rescaling_covariance(scale in 0.1f64..10.0, t in 0.0f64..2.0, x in arb_vec(5)) {
            let a = gen5();
            let b = DiagonalGenerator::new(
                a.eigenvalues().iter().map(|l| l * scale).collect(),
                Some(a.weights().to_vec()), None, None).unwrap();
            let x = SpectralVector::new(x, Scale::X);
            let lhs = b.semigroup_apply(t, &x).unwrap();
            let rhs = a.semigroup_apply(scale * t, &x).unwrap();
            for (p, q) in lhs.coeffs.iter().zip(&rhs.coeffs) {
                prop_assert!((p - q).norm() <= 1e-14 * (1.0 + q.norm()));
            }
            prop_assert!((a.sector_angle() - b.sector_angle()).abs() < 1e-15);
        }

        #[test]
        fn real_modes_have_positive_roots(r in 0.01f64..100.0) {
            let a = DiagonalGenerator::from_eigenvalues(vec![c(-r, 0.0)]).unwrap();
            let root = a.sqrt_symbols().unwrap()[0];
            prop_assert!(root.im == 0.0 && root.re > 0.0);
        }
    }
}
