//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

pub const MAX_LEVELS: usize = 40;

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_levels: usize,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_levels: MAX_LEVELS,
            max_intervals: 20_000,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

/// One 15-point Kronrod panel with the embedded 7-point Gauss error estimate.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    let err = (res_k - res_g) * half;
    (
        result,
        rescale_error(err, res_abs * half.abs(), res_asc * half.abs()),
    )
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    level: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrate `f` over the finite interval `[a, b]`.
///
/// Panels are bisected largest-error first. A panel that has been halved
/// `max_levels` times is frozen; if the frozen error alone exceeds the
/// tolerance the call fails.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        error: e,
        level: 0,
    });
    let mut total_v = v;
    let mut total_e = e;
    let mut frozen_e = 0.0;
    let mut count = 1usize;
    let mut deepest = 0usize;

    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total_v.abs());
        if total_e <= tol {
            return Ok(QuadResult {
                value: total_v,
                error: total_e,
                intervals: count,
            });
        }
        let stuck = match heap.peek() {
            None => true,
            Some(_) => frozen_e > tol || count >= opts.max_intervals,
        };
        if stuck {
            return Err(Error::QuadratureNonConvergence {
                levels: deepest,
                estimate: total_v,
                error: total_e,
            });
        }
        let p = heap.pop().expect("non-empty heap");
        if p.level >= opts.max_levels {
            frozen_e += p.error;
            continue;
        }
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(&f, p.a, m);
        let (v2, e2) = gk15(&f, m, p.b);
        count += 1;
        deepest = deepest.max(p.level + 1);
        total_v += v1 + v2 - p.value;
        total_e += e1 + e2 - p.error;
        for (a, b, value, error) in [(p.a, m, v1, e1), (m, p.b, v2, e2)] {
            heap.push(Panel {
                a,
                b,
                value,
                error,
                level: p.level + 1,
            });
        }
    }
}

/// Integrate over consecutive panels `[p_0, p_1], [p_1, p_2], …`, each
/// adaptively; useful when the integrand has known kinks or a singular end.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: F, points: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    // one coarse pass fixes the absolute scale, so tiny panels near a
    // singular end are not held to a relative tolerance of their own
    let rough: f64 = points.windows(2).map(|w| gk15(&f, w[0], w[1]).0.abs()).sum();
    let panels = points.len().saturating_sub(1).max(1) as f64;
    let local = QuadOptions {
        abs_tol: opts.abs_tol.max(opts.rel_tol * rough / panels),
        ..opts
    };
    let mut value = 0.0;
    let mut error = 0.0;
    let mut intervals = 0;
    for w in points.windows(2) {
        let r = integrate(&f, w[0], w[1], local)?;
        value += r.value;
        error += r.error;
        intervals += r.intervals;
    }
    Ok(QuadResult {
        value,
        error,
        intervals,
    })
}

/// Breakpoints `0 < floor, …, t/4, t/2, t` halving towards the origin.
pub fn geometric_points(t: f64, floor_ratio: f64) -> Vec<f64> {
    let mut pts = vec![t];
    let mut s = t;
    while s > floor_ratio * t {
        s *= 0.5;
        pts.push(s);
    }
    pts.reverse();
    pts
}
