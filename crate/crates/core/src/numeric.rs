//! Small numeric kernels shared by the modules: deterministic summation,
//! accurate complex exponential differences and grids.

use num_complex::Complex64;

/// Pairwise summation. Deterministic for a fixed input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `e^z - 1` without cancellation for small `|z|`.
pub fn cexpm1(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let half = (0.5 * y).sin();
    let re = x.exp_m1() * y.cos() - 2.0 * half * half;
    let im = x.exp() * y.sin();
    Complex64::new(re, im)
}

/// `(e^z - 1) / z`, continuous at `z = 0`.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-5 {
        // 1 + z/2 + z^2/6 + z^3/24
        Complex64::new(1.0, 0.0) + z * (0.5 + z * (1.0 / 6.0 + z / 24.0))
    } else {
        cexpm1(z) / z
    }
}

/// `∫_a^b e^{z s} ds`, with `b = +∞` allowed when `Re z < 0`.
pub fn exp_integral(z: Complex64, a: f64, b: f64) -> Complex64 {
    if b.is_infinite() {
        // caller guarantees Re z < 0
        return -(z * a).exp() / z;
    }
    let h = b - a;
    if h <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let start = if a == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        (z * a).exp()
    };
    start * h * phi1(z * h)
}

/// `n` log-spaced points between `lo` and `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo);
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `n` uniformly spaced points between `lo` and `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Serde adapter writing non-finite floats as the strings `"inf"`, `"-inf"`
/// and `"nan"`; plain JSON has no literal for them.
pub mod ext_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 5050.0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-17);
        }
        assert!((s.value() - (1.0 + 1e-14)).abs() < 1e-20);
    }

    #[test]
    fn phi1_is_continuous_at_zero() {
        let small = phi1(Complex64::new(1e-6, 0.0));
        let exact = (1e-6f64).exp_m1() / 1e-6;
        assert!((small.re - exact).abs() < 1e-15);
        let at_zero = phi1(Complex64::new(0.0, 0.0));
        assert_eq!(at_zero, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn infinite_floats_round_trip() {
        #[derive(serde::Serialize, serde::Deserialize)]
        struct W {
            #[serde(with = "ext_f64")]
            x: f64,
        }
        let s = serde_json::to_string(&W { x: f64::INFINITY }).unwrap();
        assert_eq!(s, r#"{"x":"inf"}"#);
        let back: W = serde_json::from_str(&s).unwrap();
        assert!(back.x.is_infinite());
        let back: W = serde_json::from_str(r#"{"x":2.5}"#).unwrap();
        assert_eq!(back.x, 2.5);
    }

    #[test]
    fn exp_integral_matches_closed_form() {
        let z = Complex64::new(-1.0, 0.0);
        let v = exp_integral(z, 0.0, 1.0);
        assert!((v.re - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        let inf = exp_integral(Complex64::new(-2.0, 1.0), 0.0, f64::INFINITY);
        let expect = Complex64::new(1.0, 0.0) / Complex64::new(2.0, -1.0);
        assert!((inf - expect).norm() < 1e-15);
    }
}
