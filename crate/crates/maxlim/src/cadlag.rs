//! Cadlag step functions on `[0,1]` and the Skorohod metrics.
//!
//! [`StepFunction`] is the carrier of every path-valued object in the crate:
//! partial maxima processes, their truncations and simulated extremal
//! processes are all piecewise-constant, right-continuous paths. The module
//! provides evaluation, the endpoint projection, the `J1` oscillation
//! modulus, an exact dynamic-programming `J1` distance for step functions,
//! and an `M1` distance for nondecreasing paths computed on completed
//! graphs.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point of the punctured half-line `(0, inf]` with the metric
/// `rho(x, y) = |1/x - 1/y|`, where `1/inf = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EMetricPoint(f64);

impl EMetricPoint {
    pub fn new(x: f64) -> Result<Self> {
        if x.is_nan() || x <= 0.0 {
            return Err(Error::Domain(format!("EMetricPoint requires x > 0, got {x}")));
        }
        Ok(EMetricPoint(x))
    }

    pub fn infinity() -> Self {
        EMetricPoint(f64::INFINITY)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `rho(x, y) = |1/x - 1/y|` on `(0, inf]`, with `1/inf = 0`.
pub fn rho(a: EMetricPoint, b: EMetricPoint) -> f64 {
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    (inv(a.0) - inv(b.0)).abs()
}

/// A cadlag piecewise-constant path on `[0,1]`.
///
/// The path starts at `initial` and jumps to the stored post-jump level at
/// each jump time. Jump times are strictly increasing and lie in `(0,1]`;
/// levels are nonnegative. Right continuity with left limits holds by
/// construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "StepFunctionRepr")]
pub struct StepFunction {
    initial: f64,
    jumps: Vec<(f64, f64)>,
    nondecreasing: bool,
}

#[derive(Serialize, Deserialize)]
struct StepFunctionRepr {
    initial: f64,
    jumps: Vec<(f64, f64)>,
}

impl From<StepFunction> for StepFunctionRepr {
    fn from(f: StepFunction) -> Self {
        StepFunctionRepr { initial: f.initial, jumps: f.jumps }
    }
}

impl<'de> Deserialize<'de> for StepFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = StepFunctionRepr::deserialize(d)?;
        StepFunction::new(repr.initial, repr.jumps).map_err(serde::de::Error::custom)
    }
}

impl StepFunction {
    /// Builds a step function, validating the jump-time and level invariants.
    pub fn new(initial: f64, jumps: Vec<(f64, f64)>) -> Result<Self> {
        if !initial.is_finite() || initial < 0.0 {
            return Err(Error::Domain(format!("initial value must be finite and >= 0, got {initial}")));
        }
        let mut prev_t = 0.0;
        for &(t, v) in &jumps {
            if !(t > prev_t && t <= 1.0) {
                return Err(Error::Domain(format!(
                    "jump times must be strictly increasing in (0,1], got {t} after {prev_t}"
                )));
            }
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!("jump level must be finite and >= 0, got {v}")));
            }
            prev_t = t;
        }
        let mut nondecreasing = true;
        let mut level = initial;
        for &(_, v) in &jumps {
            if v < level {
                nondecreasing = false;
                break;
            }
            level = v;
        }
        Ok(StepFunction { initial, jumps, nondecreasing })
    }

    pub fn constant(value: f64) -> Result<Self> {
        StepFunction::new(value, Vec::new())
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    /// True when `initial <= v_1 <= v_2 <= ...`.
    pub fn is_nondecreasing(&self) -> bool {
        self.nondecreasing
    }

    /// Level after the first `i` jumps (`i = 0` is the initial value).
    fn level(&self, i: usize) -> f64 {
        if i == 0 {
            self.initial
        } else {
            self.jumps[i - 1].1
        }
    }

    /// Cadlag evaluation at `t` in `[0,1]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("eval requires t in [0,1], got {t}")));
        }
        // value of the last jump at or before t
        let idx = self.jumps.partition_point(|&(s, _)| s <= t);
        Ok(self.level(idx))
    }

    /// The endpoint projection `pi(f) = f(1)`.
    pub fn endpoint(&self) -> f64 {
        self.level(self.jumps.len())
    }

    /// Uniform distance `||f - g||_inf` on `[0,1]`, exact for step functions.
    pub fn sup_norm_diff(&self, other: &StepFunction) -> f64 {
        let mut best = (self.initial - other.initial).abs();
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.jumps.len() || j < other.jumps.len() {
            let ti = self.jumps.get(i).map_or(f64::INFINITY, |&(t, _)| t);
            let tj = other.jumps.get(j).map_or(f64::INFINITY, |&(t, _)| t);
            if ti <= tj {
                i += 1;
            }
            if tj <= ti {
                j += 1;
            }
            best = best.max((self.level(i) - other.level(j)).abs());
        }
        best
    }

    /// Sampled export: one `(t, value)` row per jump time plus both endpoints.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        out.push_str(&format!("0,{}\n", self.initial));
        for &(t, v) in &self.jumps {
            out.push_str(&format!("{t},{v}\n"));
        }
        out.push_str(&format!("1,{}\n", self.endpoint()));
        out
    }
}

/// The `J1` oscillation modulus
/// `w'_delta(f) = sup min(|f(t)-f(t1)|, |f(t2)-f(t)|)` over
/// `t1 <= t <= t2`, `t2 - t1 <= delta`.
///
/// For a step function the supremum is attained on segment triples, so it is
/// computed exactly by enumerating triples of constancy segments.
pub fn j1_oscillation(f: &StepFunction, delta: f64) -> f64 {
    assert!(delta > 0.0, "delta must be positive");
    let m = f.jumps.len();
    if m < 2 {
        return 0.0;
    }
    // segment s spans [start(s), end(s)), with start(0) = 0 and end(m) = 1
    let start = |s: usize| if s == 0 { 0.0 } else { f.jumps[s - 1].0 };
    let end = |s: usize| if s == m { 1.0 } else { f.jumps[s].0 };
    let mut best = 0.0f64;
    for a in 0..m.saturating_sub(1) {
        for c in (a + 2)..=m {
            // t1 strictly inside segment a, t2 at the start of segment c
            if start(c) - end(a) >= delta {
                continue;
            }
            for b in (a + 1)..c {
                let v = (f.level(b) - f.level(a)).abs().min((f.level(c) - f.level(b)).abs());
                best = best.max(v);
            }
        }
    }
    best
}

/// Skorohod `J1` distance between two step functions:
/// `inf over time changes lambda of max(||lambda - id||, ||f - g o lambda||)`.
///
/// Computed by dynamic programming over order-preserving partial matchings
/// of the two jump sequences. A matched pair costs the larger of its time
/// displacement and the post-jump level mismatch; every inter-event segment
/// contributes the mismatch of the current levels. An unmatched jump of `g`
/// is squeezed into the time span of the current `f` segment (and vice
/// versa), which charges the distance from its original time to that span.
/// The candidate time-change anchors are the matched jump pairs, with
/// lambda piecewise linear in between.
pub fn d_j1(f: &StepFunction, g: &StepFunction) -> f64 {
    let m = f.jumps.len();
    let k = g.jumps.len();
    // time span of a function's segment s: [start(s), end(s)]
    let f_start = |s: usize| if s == 0 { 0.0 } else { f.jumps[s - 1].0 };
    let f_end = |s: usize| if s == m { 1.0 } else { f.jumps[s].0 };
    let g_start = |s: usize| if s == 0 { 0.0 } else { g.jumps[s - 1].0 };
    let g_end = |s: usize| if s == k { 1.0 } else { g.jumps[s].0 };
    let dist = |t: f64, lo: f64, hi: f64| (lo - t).max(t - hi).max(0.0);
    let mut d = vec![vec![f64::INFINITY; k + 1]; m + 1];
    d[0][0] = (f.initial - g.initial).abs();
    for i in 0..=m {
        for j in 0..=k {
            if i == 0 && j == 0 {
                continue;
            }
            let seg = (f.level(i) - g.level(j)).abs();
            let mut best = f64::INFINITY;
            if i > 0 && j > 0 {
                let sf = f.jumps[i - 1].0;
                let sg = g.jumps[j - 1].0;
                // a jump at the closed right endpoint can only be matched in
                // place: lambda fixes t = 1
                let tcost = if (sf == 1.0) != (sg == 1.0) { f64::INFINITY } else { (sf - sg).abs() };
                best = best.min(d[i - 1][j - 1].max(tcost));
            }
            if i > 0 {
                // f's jump i is absorbed by g's segment j, whose retimed
                // span must reach the fixed time of that jump
                let slide = dist(f.jumps[i - 1].0, g_start(j), g_end(j));
                best = best.min(d[i - 1][j].max(slide));
            }
            if j > 0 {
                // g's jump j is squeezed inside the span of f's segment i
                let slide = dist(g.jumps[j - 1].0, f_start(i), f_end(i));
                best = best.min(d[i][j - 1].max(slide));
            }
            d[i][j] = best.max(seg);
        }
    }
    d[m][k]
}

/// Default sampling resolution for [`d_m1_monotone`]: target number of
/// vertices per completed graph. The returned distance carries an
/// `O(extent / M1_GRID_POINTS)` discretization error.
pub const M1_GRID_POINTS: usize = 2000;

/// Skorohod `M1` distance between nondecreasing step functions.
///
/// Both completed graphs (jump segments filled in) are discretized into
/// polylines of about [`M1_GRID_POINTS`] vertices and the infimum over
/// monotone parametrizations is computed by a min-max dynamic program over
/// the two vertex sequences, with the `L_inf` metric on `(t, x)` pairs.
pub fn d_m1_monotone(f: &StepFunction, g: &StepFunction) -> Result<f64> {
    if !f.nondecreasing || !g.nondecreasing {
        return Err(Error::Domain(
            "d_m1_monotone requires nondecreasing paths (general M1 not supported)".into(),
        ));
    }
    let p = sampled_completed_graph(f, M1_GRID_POINTS);
    let q = sampled_completed_graph(g, M1_GRID_POINTS);
    Ok(frechet_minmax(&p, &q))
}

/// Vertices of the completed graph of a nondecreasing step function:
/// horizontal constancy segments joined by vertical jump segments.
pub fn completed_graph(f: &StepFunction) -> Vec<(f64, f64)> {
    let mut verts = vec![(0.0, f.initial)];
    let mut level = f.initial;
    for &(t, v) in &f.jumps {
        verts.push((t, level));
        verts.push((t, v));
        level = v;
    }
    verts.push((1.0, level));
    verts
}

fn sampled_completed_graph(f: &StepFunction, target: usize) -> Vec<(f64, f64)> {
    let verts = completed_graph(f);
    let total: f64 = verts
        .windows(2)
        .map(|w| (w[1].0 - w[0].0).abs() + (w[1].1 - w[0].1).abs())
        .sum();
    let h = (total / target as f64).max(1e-9);
    let mut out = vec![verts[0]];
    for w in verts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b.0 - a.0).abs() + (b.1 - a.1).abs();
        let steps = (len / h).ceil() as usize;
        for s in 1..=steps.max(1) {
            let r = s as f64 / steps.max(1) as f64;
            out.push((a.0 + r * (b.0 - a.0), a.1 + r * (b.1 - a.1)));
        }
    }
    out
}

/// Min-max coupling cost between two polylines under the `L_inf` ground
/// metric (discrete Frechet distance with monotone steps).
fn frechet_minmax(p: &[(f64, f64)], q: &[(f64, f64)]) -> f64 {
    let dist = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs().max((a.1 - b.1).abs());
    let n = p.len();
    let m = q.len();
    let mut prev = vec![f64::INFINITY; m];
    let mut cur = vec![f64::INFINITY; m];
    for i in 0..n {
        std::mem::swap(&mut prev, &mut cur);
        for j in 0..m {
            let reach = if i == 0 && j == 0 {
                0.0
            } else {
                let mut r = f64::INFINITY;
                if i > 0 {
                    r = r.min(prev[j]);
                }
                if j > 0 {
                    r = r.min(cur[j - 1]);
                }
                if i > 0 && j > 0 {
                    r = r.min(prev[j - 1]);
                }
                r
            };
            cur[j] = reach.max(dist(p[i], q[j]));
        }
    }
    cur[m - 1]
}
