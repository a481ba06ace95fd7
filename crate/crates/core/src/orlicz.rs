//! Young functions, Luxemburg norms and the Orlicz-space toolbox.
//!
//! A Young function is stored through its right-continuous density
//! `φ = Φ'`, split into segments on which `φ` is either `c·x^r` or a
//! constant. Everything the admissibility machinery needs (powers,
//! `x ↦ Φ̃(x²)`, the level-set construction in [`dvp_construct`]) fits this
//! shape, and the complementary function stays in the same family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

/// Density on one segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Density {
    /// `φ(x) = c·x^r` (absolute `x`, not shifted)
    Power { c: f64, r: f64 },
    /// `φ(x) = c`
    Const { c: f64 },
}

impl Density {
    fn at(&self, x: f64) -> f64 {
        match *self {
            Density::Power { c, r } => c * x.powf(r),
            Density::Const { c } => c,
        }
    }

    /// `∫_a^b φ`
    fn integral(&self, a: f64, b: f64) -> f64 {
        match *self {
            Density::Power { c, r } => c / (r + 1.0) * (b.powf(r + 1.0) - a.powf(r + 1.0)),
            Density::Const { c } => c * (b - a),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub x0: f64,
    pub density: Density,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentRepr {
    x0: f64,
    kind: String,
    c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct YoungRepr {
    segments: Vec<SegmentRepr>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    asymptotic_growth: bool,
}

/// A Young function `Φ(x) = ∫₀ˣ φ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "YoungRepr", into = "YoungRepr")]
pub struct YoungFunction {
    segments: Vec<Segment>,
    asymptotic_growth: bool,
    /// `Φ(x_i)` at every breakpoint
    cum: Vec<f64>,
}

impl TryFrom<YoungRepr> for YoungFunction {
    type Error = Error;

    fn try_from(repr: YoungRepr) -> Result<Self> {
        let mut segs = Vec::with_capacity(repr.segments.len());
        for s in repr.segments {
            let density = match s.kind.as_str() {
                "power" => Density::Power {
                    c: s.c,
                    r: s.r.ok_or_else(|| {
                        Error::InvalidYoungFunction(format!("power segment at x0={} lacks r", s.x0))
                    })?,
                },
                "const" => Density::Const { c: s.c },
                other => {
                    return Err(Error::InvalidYoungFunction(format!(
                        "unknown segment kind {other:?}"
                    )))
                }
            };
            segs.push(Segment { x0: s.x0, density });
        }
        YoungFunction::new(segs, repr.asymptotic_growth)
    }
}

impl From<YoungFunction> for YoungRepr {
    fn from(y: YoungFunction) -> Self {
        YoungRepr {
            segments: y
                .segments
                .iter()
                .map(|s| match s.density {
                    Density::Power { c, r } => SegmentRepr {
                        x0: s.x0,
                        kind: "power".into(),
                        c,
                        r: Some(r),
                    },
                    Density::Const { c } => SegmentRepr {
                        x0: s.x0,
                        kind: "const".into(),
                        c,
                        r: None,
                    },
                })
                .collect(),
            asymptotic_growth: y.asymptotic_growth,
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidYoungFunction(msg.into())
}

impl YoungFunction {
    pub fn new(segments: Vec<Segment>, asymptotic_growth: bool) -> Result<Self> {
        let first = segments.first().ok_or_else(|| bad("no segments"))?;
        if first.x0 != 0.0 {
            return Err(bad("first breakpoint must be 0"));
        }
        // Φ(x)/x → 0 at the origin and Φ strictly increasing together force a
        // density that starts at zero and leaves it immediately.
        if !matches!(first.density, Density::Power { .. }) {
            return Err(bad("first segment must be a power density"));
        }
        for (i, s) in segments.iter().enumerate() {
            if !s.x0.is_finite() || s.x0 < 0.0 {
                return Err(bad(format!("breakpoint {i} is not a finite nonnegative number")));
            }
            if i > 0 && s.x0 <= segments[i - 1].x0 {
                return Err(bad(format!("breakpoints not strictly increasing at segment {i}")));
            }
            match s.density {
                Density::Power { c, r } => {
                    if !(c > 0.0 && c.is_finite() && r > 0.0 && r.is_finite()) {
                        return Err(bad(format!("segment {i}: power density needs c > 0 and r > 0")));
                    }
                }
                Density::Const { c } => {
                    if !(c > 0.0 && c.is_finite()) {
                        return Err(bad(format!("segment {i}: constant density needs c > 0")));
                    }
                }
            }
        }
        for i in 1..segments.len() {
            let x = segments[i].x0;
            let left = segments[i - 1].density.at(x);
            let right = segments[i].density.at(x);
            if right < left * (1.0 - 1e-12) {
                return Err(bad(format!(
                    "density decreases at x = {x} ({left} -> {right})"
                )));
            }
        }
        let last = segments.last().expect("non-empty");
        if matches!(last.density, Density::Const { .. }) && !asymptotic_growth {
            return Err(bad(
                "final segment has bounded density; set asymptotic_growth to accept linear growth",
            ));
        }
        let mut cum = Vec::with_capacity(segments.len());
        cum.push(0.0);
        for i in 1..segments.len() {
            let prev = cum[i - 1] + segments[i - 1].density.integral(segments[i - 1].x0, segments[i].x0);
            cum.push(prev);
        }
        Ok(Self {
            segments,
            asymptotic_growth,
            cum,
        })
    }

    /// `Φ(x) = c·x^{r+1}/(r+1)`, i.e. density `c·x^r`.
    pub fn power(c: f64, r: f64) -> Result<Self> {
        Self::new(
            vec![Segment {
                x0: 0.0,
                density: Density::Power { c, r },
            }],
            false,
        )
    }

    /// `Φ(x) = x^p / p`.
    pub fn power_over_p(p: f64) -> Result<Self> {
        if p <= 1.0 {
            return Err(bad(format!("exponent p = {p} must exceed 1")));
        }
        Self::power(1.0, p - 1.0)
    }

    /// `Φ(x) = x^p`.
    pub fn pure_power(p: f64) -> Result<Self> {
        if p <= 1.0 {
            return Err(bad(format!("exponent p = {p} must exceed 1")));
        }
        Self::power(p, p - 1.0)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn asymptotic_growth(&self) -> bool {
        self.asymptotic_growth
    }

    fn index_of(&self, x: f64) -> usize {
        self.segments.partition_point(|s| s.x0 <= x).saturating_sub(1)
    }

    /// `Φ(x)`; exact antiderivative per segment.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x.is_infinite() {
            return f64::INFINITY;
        }
        let i = self.index_of(x);
        let s = &self.segments[i];
        self.cum[i] + s.density.integral(s.x0, x)
    }

    /// Right-continuous density `φ(x)`.
    pub fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let i = self.index_of(x);
        self.segments[i].density.at(x)
    }

    /// `ln Φ(e^{ln_x})`, accurate when `e^{ln_x}` or `Φ` would overflow or
    /// underflow: there the dominant term of the outermost segment is used.
    pub fn ln_eval(&self, ln_x: f64) -> f64 {
        let x = ln_x.exp();
        if x > 0.0 && x.is_finite() {
            let v = self.eval(x);
            if v > 0.0 && v.is_finite() {
                return v.ln();
            }
        }
        let seg = if ln_x < 0.0 {
            &self.segments[0]
        } else {
            self.segments.last().expect("at least one segment")
        };
        match seg.density {
            Density::Power { c, r } => (c / (r + 1.0)).ln() + (r + 1.0) * ln_x,
            Density::Const { c } => c.ln() + ln_x,
        }
    }

    /// `Φ^{-1}(y)` for `y ≥ 0`.
    pub fn inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let i = self.cum.partition_point(|&c| c <= y).saturating_sub(1);
        let s = &self.segments[i];
        let rem = y - self.cum[i];
        match s.density {
            Density::Power { c, r } => (rem * (r + 1.0) / c + s.x0.powf(r + 1.0)).powf(1.0 / (r + 1.0)),
            Density::Const { c } => s.x0 + rem / c,
        }
    }

    /// `∫₀ᵇ Φ(y)/y dy`, the building block of exponential-tail modulars.
    pub fn log_moment(&self, b: f64) -> f64 {
        if b <= 0.0 {
            return 0.0;
        }
        let mut total = 0.0;
        for (i, s) in self.segments.iter().enumerate() {
            let a = s.x0;
            if a >= b {
                break;
            }
            let e = self
                .segments
                .get(i + 1)
                .map_or(b, |n| n.x0.min(b));
            total += match s.density {
                Density::Power { c, r } => {
                    let k = self.cum[i] - c * a.powf(r + 1.0) / (r + 1.0);
                    let log_part = if k == 0.0 { 0.0 } else { k * (e / a).ln() };
                    log_part + c / ((r + 1.0) * (r + 1.0)) * (e.powf(r + 1.0) - a.powf(r + 1.0))
                }
                Density::Const { c } => (self.cum[i] - c * a) * (e / a).ln() + c * (e - a),
            };
        }
        total
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// `Φ(x)`.
pub fn eval_young(phi: &YoungFunction, x: f64) -> f64 {
    phi.eval(x)
}

/// The complementary Young function `Φ̃(y) = sup_x (xy − Φ(x))`.
///
/// Built as `∫₀ʸ φ⁻¹` with the generalized inverse of the density, which
/// keeps it inside the segment family: a power piece `c·x^r` inverts to
/// `c^{-1/r}·y^{1/r}`, a jump of `φ` at `x_j` becomes a flat piece of value
/// `x_j`, and a constant piece of `φ` collapses to a kink.
pub fn complementary(phi: &YoungFunction) -> Result<YoungFunction> {
    let segs = phi.segments();
    if matches!(segs.last().map(|s| s.density), Some(Density::Const { .. })) {
        return Err(Error::UnsupportedComplementary(
            "density is bounded on the final segment, so the complementary function is infinite beyond a finite point".into(),
        ));
    }
    let mut out: Vec<Segment> = Vec::new();
    let mut push = |y0: f64, density: Density| {
        if let Some(last) = out.last() {
            if y0 <= last.x0 {
                return;
            }
        }
        out.push(Segment { x0: y0, density });
    };
    for (i, s) in segs.iter().enumerate() {
        let start = s.density.at(s.x0);
        let end = segs.get(i + 1).map(|n| (n.x0, s.density.at(n.x0), n.density.at(n.x0)));
        if let Density::Power { c, r } = s.density {
            push(
                start,
                Density::Power {
                    c: c.powf(-1.0 / r),
                    r: 1.0 / r,
                },
            );
        }
        if let Some((x_next, left, right)) = end {
            if right > left * (1.0 + 1e-15) {
                push(left, Density::Const { c: x_next });
            }
        }
    }
    YoungFunction::new(out, false)
}

/// Direct Legendre transform `sup_x (xy − Φ(x))` by golden-section search.
/// Independent of [`complementary`], which makes it a useful cross-check.
pub fn conjugate_numeric(phi: &YoungFunction, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let g = |x: f64| x * y - phi.eval(x);
    let mut hi = 1.0;
    let mut steps = 0;
    while g(2.0 * hi) > g(hi) && steps < 2000 {
        hi *= 2.0;
        steps += 1;
    }
    let mut lo = 0.0;
    hi *= 2.0;
    let inv = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv * (hi - lo);
    let mut x2 = lo + inv * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..200 {
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv * (hi - lo);
            g1 = g(x1);
        }
        if hi - lo <= 1e-15 * hi.max(1e-300) {
            break;
        }
    }
    g1.max(g2).max(0.0)
}

/// `Φ(x) = Φ̃(x²)` with `Φ̃ = complementary(psi)`.
pub fn compose_sqrt(psi: &YoungFunction) -> Result<YoungFunction> {
    let tilde = complementary(psi)?;
    // φ(x) = 2x·φ̃(x²)
    let segs = tilde
        .segments()
        .iter()
        .map(|s| Segment {
            x0: s.x0.sqrt(),
            density: match s.density {
                Density::Power { c, r } => Density::Power {
                    c: 2.0 * c,
                    r: 2.0 * r + 1.0,
                },
                Density::Const { c } => Density::Power { c: 2.0 * c, r: 1.0 },
            },
        })
        .collect();
    YoungFunction::new(segs, false)
}

/// Exponential tail `f(s) = amplitude·e^{-rate (s − t_end)}` for `s ≥ t_end`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpTail {
    pub amplitude: f64,
    pub rate: f64,
}

/// Nonnegative function on `[grid[0], grid[K]]`, constant on each cell,
/// optionally continued by an exponential tail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledFunction {
    grid: Vec<f64>,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<ExpTail>,
}

fn bad_sample(msg: impl Into<String>) -> Error {
    Error::InvalidSampledFunction(msg.into())
}

impl SampledFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, tail: Option<ExpTail>) -> Result<Self> {
        if grid.is_empty() {
            return Err(bad_sample("empty grid"));
        }
        if values.len() + 1 != grid.len() {
            return Err(bad_sample(format!(
                "{} grid points need {} cell values, got {}",
                grid.len(),
                grid.len() - 1,
                values.len()
            )));
        }
        if grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(bad_sample("grid points must be finite and nonnegative"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad_sample("grid must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(bad_sample("values must be finite and nonnegative"));
        }
        if let Some(t) = tail {
            if !(t.rate > 0.0 && t.rate.is_finite()) {
                return Err(bad_sample("tail rate must be positive"));
            }
            if !(t.amplitude >= 0.0 && t.amplitude.is_finite()) {
                return Err(bad_sample("tail amplitude must be finite and nonnegative"));
            }
        }
        Ok(Self { grid, values, tail })
    }

    /// Constant `c` on `[0, t]`.
    pub fn constant(c: f64, t: f64) -> Result<Self> {
        Self::new(vec![0.0, t], vec![c], None)
    }

    /// Cell averages of `f` on `grid`; `antiderivative` must be exact.
    pub fn from_antiderivative<F: Fn(f64) -> f64>(grid: Vec<f64>, antiderivative: F) -> Result<Self> {
        let values = grid
            .windows(2)
            .map(|w| (antiderivative(w[1]) - antiderivative(w[0])) / (w[1] - w[0]))
            .collect();
        Self::new(grid, values, None)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> Option<ExpTail> {
        self.tail
    }

    pub fn start(&self) -> f64 {
        self.grid[0]
    }

    pub fn end(&self) -> f64 {
        *self.grid.last().expect("non-empty grid")
    }

    pub fn sup(&self) -> f64 {
        let head = self.values.iter().copied().fold(0.0, f64::max);
        head.max(self.tail.map_or(0.0, |t| t.amplitude))
    }

    /// Length scale used to seed the norm bracket.
    fn extent(&self) -> f64 {
        self.end() - self.start() + self.tail.map_or(0.0, |t| 1.0 / t.rate)
    }

    pub fn value_at(&self, s: f64) -> f64 {
        if s < self.start() {
            return 0.0;
        }
        if s >= self.end() {
            return match self.tail {
                Some(t) => t.amplitude * (-t.rate * (s - self.end())).exp(),
                None => 0.0,
            };
        }
        let i = self.grid.partition_point(|&g| g <= s) - 1;
        self.values[i]
    }

    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        let a = alpha.abs();
        Self::new(
            self.grid.clone(),
            self.values.iter().map(|v| v * a).collect(),
            self.tail.map(|t| ExpTail {
                amplitude: t.amplitude * a,
                rate: t.rate,
            }),
        )
    }

    pub fn l1_norm(&self) -> f64 {
        let head: f64 = self
            .values
            .iter()
            .zip(self.grid.windows(2))
            .map(|(v, w)| v * (w[1] - w[0]))
            .sum();
        head + self.tail.map_or(0.0, |t| t.amplitude / t.rate)
    }

    /// `∫ Φ(|u|/k)`.
    pub fn modular(&self, phi: &YoungFunction, k: f64) -> f64 {
        let head: f64 = self
            .values
            .iter()
            .zip(self.grid.windows(2))
            .map(|(v, w)| phi.eval(v / k) * (w[1] - w[0]))
            .sum();
        head + self
            .tail
            .map_or(0.0, |t| phi.log_moment(t.amplitude / k) / t.rate)
    }

    /// CSV rows `(t, value)`; the final grid point has an empty value.
    pub fn to_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "value"])?;
        for (t, v) in self.grid.iter().zip(&self.values) {
            wr.write_record([t.to_string(), v.to_string()])?;
        }
        wr.write_record([self.end().to_string(), String::new()])?;
        wr.flush()?;
        Ok(())
    }

    pub fn from_csv<R: std::io::Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let t: f64 = rec
                .get(0)
                .ok_or_else(|| bad_sample("missing t column"))?
                .trim()
                .parse()
                .map_err(|e| bad_sample(format!("bad t: {e}")))?;
            grid.push(t);
            match rec.get(1).map(str::trim) {
                Some("") | None => {}
                Some(v) => values.push(v.parse().map_err(|e| bad_sample(format!("bad value: {e}")))?),
            }
        }
        Self::new(grid, values, None)
    }
}

const BRACKET_STEPS: usize = 200;

/// Luxemburg norm `inf{k > 0 : ∫Φ(|u|/k) ≤ 1}`.
///
/// The returned `k` satisfies the modular inequality (it is the upper end of
/// the final bracket) and is within relative `1e-13` of the infimum.
pub fn luxemburg_norm(phi: &YoungFunction, u: &SampledFunction) -> Result<f64> {
    let sup = u.sup();
    if sup == 0.0 {
        return Ok(0.0);
    }
    let m = |k: f64| u.modular(phi, k);
    let k0 = sup * u.extent().max(1.0);
    let (mut lo, mut hi);
    if m(k0) <= 1.0 {
        hi = k0;
        lo = k0 / 2.0;
        let mut steps = 0;
        while m(lo) <= 1.0 {
            hi = lo;
            lo /= 2.0;
            steps += 1;
            if steps >= BRACKET_STEPS || lo == 0.0 {
                return Err(Error::LuxemburgNoBracket { steps });
            }
        }
    } else {
        lo = k0;
        hi = 2.0 * k0;
        let mut steps = 0;
        while !(m(hi) <= 1.0) {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps >= BRACKET_STEPS || hi.is_infinite() {
                return Err(Error::LuxemburgNoBracket { steps });
            }
        }
    }
    while hi / lo - 1.0 > 1e-13 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if m(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// A cell of a merged grid: constant, or exponential decay from its left end.
#[derive(Clone, Copy)]
struct Piece {
    level: f64,
    rate: f64,
}

fn piece_on(f: &SampledFunction, a: f64) -> Piece {
    if a >= f.end() {
        if let Some(t) = f.tail {
            return Piece {
                level: t.amplitude * (-t.rate * (a - f.end())).exp(),
                rate: t.rate,
            };
        }
    }
    Piece {
        level: f.value_at(a),
        rate: 0.0,
    }
}

/// `∫ u·v` computed exactly on the merged grid.
pub fn product_integral(u: &SampledFunction, v: &SampledFunction) -> f64 {
    let mut pts: Vec<f64> = u.grid.iter().chain(v.grid.iter()).copied().collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let both_tails = u.tail.is_some() && v.tail.is_some();
    let mut total = 0.0;
    let mut cells: Vec<(f64, f64)> = pts.windows(2).map(|w| (w[0], w[1])).collect();
    if both_tails {
        cells.push((*pts.last().expect("non-empty"), f64::INFINITY));
    }
    for (a, b) in cells {
        let (pu, pv) = (piece_on(u, a), piece_on(v, a));
        let level = pu.level * pv.level;
        if level == 0.0 {
            continue;
        }
        let rate = pu.rate + pv.rate;
        total += if rate == 0.0 {
            level * (b - a)
        } else if b.is_infinite() {
            level / rate
        } else {
            level * (-(-rate * (b - a)).exp_m1()) / rate
        };
    }
    total
}

/// Orlicz–Hölder: `(∫|uv|, 2‖u‖_Φ‖v‖_Φ̃)`.
pub fn holder_bound(phi: &YoungFunction, u: &SampledFunction, v: &SampledFunction) -> Result<(f64, f64)> {
    let lhs = product_integral(u, v);
    let tilde = complementary(phi)?;
    let rhs = 2.0 * luxemburg_norm(phi, u)? * luxemburg_norm(&tilde, v)?;
    Ok((lhs, rhs))
}

/// Result of the level-set construction.
#[derive(Clone, Debug, Serialize)]
pub struct DvpReport {
    pub phi: YoungFunction,
    /// `a_j = ∫_{|f|>j} |f|`
    pub level_masses: Vec<f64>,
    /// slopes `c_j` after monotonization
    pub slopes: Vec<f64>,
    /// exact `∫Φ(|f|)`
    pub modular: f64,
    /// part of the modular on `[0, τ)`
    pub modular_head: f64,
    /// part on `[τ, ∞)`
    pub modular_tail: f64,
    /// the same modular with the tail contribution re-done by quadrature
    pub modular_quadrature: f64,
}

fn level_mass(f: &SampledFunction, j: f64) -> f64 {
    let head: f64 = f
        .values
        .iter()
        .zip(f.grid.windows(2))
        .filter(|(v, _)| **v > j)
        .map(|(v, w)| v * (w[1] - w[0]))
        .sum();
    let tail = f.tail.map_or(0.0, |t| {
        if t.amplitude > j {
            (t.amplitude - j) / t.rate
        } else {
            0.0
        }
    });
    head + tail
}

fn split_modular(f: &SampledFunction, phi: &YoungFunction, tau: f64) -> (f64, f64) {
    let mut head = 0.0;
    let mut tail = 0.0;
    for (v, w) in f.values.iter().zip(f.grid.windows(2)) {
        let val = phi.eval(*v);
        let before = (tau.min(w[1]) - w[0]).max(0.0);
        let after = (w[1] - tau.max(w[0])).max(0.0);
        head += val * before;
        tail += val * after;
    }
    if let Some(t) = f.tail {
        let whole = phi.log_moment(t.amplitude) / t.rate;
        if tau <= f.end() {
            tail += whole;
        } else {
            let at_tau = t.amplitude * (-t.rate * (tau - f.end())).exp();
            let after = phi.log_moment(at_tau) / t.rate;
            head += whole - after;
            tail += after;
        }
    }
    (head, tail)
}

/// De la Vallée-Poussin style Young function with `∫Φ(|f|) < ∞`.
///
/// Slopes `c_j = min(j+1, a_j^{-1/2})` are made nondecreasing; `φ` is
/// linear on `[0, 1)` (so that `Φ(x)/x → 0`), equal to `c_j` on `[j, j+1)`
/// and linear again from the last level `J = ⌈sup f⌉` on, so that `Φ` is
/// superlinear.
pub fn dvp_construct(f: &SampledFunction, tau: f64) -> Result<DvpReport> {
    if !(tau > 0.0) {
        return Err(bad_sample("tau must be positive"));
    }
    let sup = f.sup();
    if sup == 0.0 {
        let phi = YoungFunction::power(2.0, 1.0)?;
        return Ok(DvpReport {
            phi,
            level_masses: vec![0.0],
            slopes: vec![],
            modular: 0.0,
            modular_head: 0.0,
            modular_tail: 0.0,
            modular_quadrature: 0.0,
        });
    }
    let a0 = level_mass(f, 0.0);
    if !a0.is_finite() {
        return Err(Error::NonIntegrable(format!("∫|f| = {a0}")));
    }
    let big_j = (sup.ceil() as usize).max(1);
    let masses: Vec<f64> = (0..=big_j).map(|j| level_mass(f, j as f64)).collect();
    let mut slopes = Vec::with_capacity(masses.len());
    let mut running: f64 = 0.0;
    for (j, a) in masses.iter().enumerate() {
        let cap = (j + 1) as f64;
        let c = if *a > 0.0 { cap.min(a.powf(-0.5)) } else { cap };
        running = running.max(c);
        slopes.push(running);
    }
    let mut segs = vec![Segment {
        x0: 0.0,
        density: Density::Power { c: slopes[0], r: 1.0 },
    }];
    for (j, &c) in slopes.iter().enumerate().take(big_j).skip(1) {
        segs.push(Segment {
            x0: j as f64,
            density: Density::Const { c },
        });
    }
    segs.push(Segment {
        x0: big_j as f64,
        density: Density::Power {
            c: slopes[big_j] / big_j as f64,
            r: 1.0,
        },
    });
    let phi = YoungFunction::new(segs, false)?;
    let (head, tail) = split_modular(f, &phi, tau);
    let modular = head + tail;
    if !modular.is_finite() {
        return Err(Error::NonIntegrable(format!("modular ∫Φ(|f|) = {modular}")));
    }
    let mut quad_value = modular;
    if let Some(t) = f.tail {
        let closed = phi.log_moment(t.amplitude) / t.rate;
        let horizon = 60.0 / t.rate;
        let q = quad::integrate(
            |s| phi.eval(t.amplitude * (-t.rate * s).exp()),
            0.0,
            horizon,
            QuadOptions::rel(1e-10),
        )?;
        quad_value = modular - closed + q.value;
    }
    Ok(DvpReport {
        phi,
        level_masses: masses,
        slopes,
        modular,
        modular_head: head,
        modular_tail: tail,
        modular_quadrature: quad_value,
    })
}
