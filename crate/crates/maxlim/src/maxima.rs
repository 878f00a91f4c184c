//! Derived objects of a sample path: the partial maxima process, its
//! truncations, the time-space point process of rescaled observations, and
//! the maximum functional that maps point measures back to maxima paths.

use serde::{Deserialize, Serialize};

use crate::cadlag::StepFunction;
use crate::models::SampleSeq;
use crate::{Error, Result};

/// A finite point measure on `[0,1] x (0, inf]`, ordered by time with
/// stable tie order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "PointMeasureRepr")]
pub struct PointMeasure {
    points: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct PointMeasureRepr {
    points: Vec<(f64, f64)>,
}

impl From<PointMeasure> for PointMeasureRepr {
    fn from(pm: PointMeasure) -> Self {
        PointMeasureRepr { points: pm.points }
    }
}

impl<'de> Deserialize<'de> for PointMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PointMeasureRepr::deserialize(d)?;
        PointMeasure::new(repr.points).map_err(serde::de::Error::custom)
    }
}

impl PointMeasure {
    /// Builds a point measure, sorting by time (stable) and validating
    /// marks.
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        for &(t, x) in &points {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Domain(format!("point time must be in [0,1], got {t}")));
            }
            if !(x > 0.0) {
                return Err(Error::Domain(format!("point mark must be > 0, got {x}")));
            }
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(PointMeasure { points })
    }

    pub fn empty() -> Self {
        PointMeasure { points: Vec::new() }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x\n");
        for &(t, x) in &self.points {
            out.push_str(&format!("{t},{x}\n"));
        }
        out
    }
}

/// Truncation levels: the lower level `u` and an optional ambient level
/// `v < u` used by the Lambda membership check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Truncation {
    pub u: f64,
    pub v: Option<f64>,
}

impl Truncation {
    pub fn new(u: f64, v: Option<f64>) -> Result<Self> {
        if u <= 0.0 {
            return Err(Error::Domain(format!("truncation level u must be > 0, got {u}")));
        }
        if let Some(v) = v {
            if !(0.0 < v && v < u) {
                return Err(Error::Domain(format!("ambient level must satisfy 0 < v < u, got v={v}, u={u}")));
            }
        }
        Ok(Truncation { u, v })
    }
}

/// The partial maxima process `M_n(t) = max_{i <= floor(nt)} X_i / a_n`,
/// with the empty maximum taken as 0.
///
/// Jumps are recorded only at indices where a new running maximum occurs,
/// at time `i/n`.
pub fn build_maxima(sample: &SampleSeq, a_n: f64) -> Result<StepFunction> {
    assert!(a_n > 0.0, "a_n must be positive");
    if sample.is_empty() {
        return Err(Error::Domain("cannot build maxima process of an empty sample".into()));
    }
    let n = sample.len() as f64;
    let mut level = 0.0f64;
    let mut jumps = Vec::new();
    for (i, &x) in sample.values.iter().enumerate() {
        let v = x / a_n;
        if v > level {
            level = v;
            jumps.push(((i + 1) as f64 / n, v));
        }
    }
    StepFunction::new(0.0, jumps)
}

/// Keeps only levels exceeding `u`: pointwise `m(t)` if `m(t) > u`, else 0.
pub fn truncate_maxima(m: &StepFunction, u: f64) -> Result<StepFunction> {
    assert!(u > 0.0, "u must be positive");
    if !m.is_nondecreasing() {
        return Err(Error::Domain("truncate_maxima requires a nondecreasing path".into()));
    }
    let initial = if m.initial() > u { m.initial() } else { 0.0 };
    let mut level = initial;
    let mut jumps = Vec::new();
    for &(t, v) in m.jumps() {
        let w = if v > u { v } else { 0.0 };
        if w != level {
            jumps.push((t, w));
            level = w;
        }
    }
    StepFunction::new(initial, jumps)
}

/// The time-space point process `{(i/n, X_i/a_n) : X_i > 0}`. Zero values
/// are dropped (they are not points of `(0, inf]`).
pub fn build_point_process(sample: &SampleSeq, a_n: f64) -> PointMeasure {
    assert!(a_n > 0.0, "a_n must be positive");
    let n = sample.len() as f64;
    let points = sample
        .values
        .iter()
        .enumerate()
        .filter(|&(_, &x)| x > 0.0)
        .map(|(i, &x)| ((i + 1) as f64 / n, x / a_n))
        .collect();
    PointMeasure { points }
}

/// Restriction to `[0,1] x (u, inf]`: keeps exactly the points with mark
/// above `u`.
pub fn restrict(pm: &PointMeasure, u: f64) -> PointMeasure {
    assert!(u > 0.0, "u must be positive");
    PointMeasure { points: pm.points.iter().copied().filter(|&(_, x)| x > u).collect() }
}

/// Membership in the continuity set `Lambda = Lambda_1 ^ Lambda_2`:
/// no mass on the time boundary or at the level `u` exactly, and at most
/// one point per time among marks above `v`.
pub fn in_lambda(pm: &PointMeasure, u: f64, v: f64) -> Result<bool> {
    if !(0.0 < v && v < u) {
        return Err(Error::Domain(format!("in_lambda requires 0 < v < u, got v={v}, u={u}")));
    }
    for &(t, x) in &pm.points {
        if x == u || ((t == 0.0 || t == 1.0) && x > u) {
            return Ok(false);
        }
    }
    let above_v: Vec<f64> = pm.points.iter().filter(|&&(_, x)| x > v).map(|&(t, _)| t).collect();
    Ok(above_v.windows(2).all(|w| w[0] != w[1]))
}

/// The maximum functional `phi^(u)`: the running maximum over points with
/// marks above `u`, empty maximum taken as 0. Pass `u = 0` for the
/// untruncated path.
pub fn max_functional(pm: &PointMeasure, u: f64) -> StepFunction {
    let mut level = 0.0f64;
    let mut jumps: Vec<(f64, f64)> = Vec::new();
    for &(t, x) in &pm.points {
        if x > u && x > level {
            level = x;
            // coincident times collapse into one jump at the larger mark
            match jumps.last_mut() {
                Some(last) if last.0 == t => last.1 = x,
                _ => jumps.push((t, x)),
            }
        }
    }
    StepFunction::new(0.0, jumps).expect("points are time-ordered with positive marks")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ModelSpec, TailLaw};

    fn seq(values: &[f64]) -> SampleSeq {
        SampleSeq {
            values: values.to_vec(),
            model: ModelSpec::Iid { law: TailLaw::Pareto { alpha: 1.0, x_min: 1.0 } },
            seed: 0,
        }
    }

    #[test]
    fn maxima_from_sample() {
        let m = build_maxima(&seq(&[3.0, 1.0, 5.0, 2.0]), 1.0).unwrap();
        assert_eq!(m.initial(), 0.0);
        assert_eq!(m.jumps(), &[(0.25, 3.0), (0.75, 5.0)]);
        assert!(m.is_nondecreasing());
        assert_eq!(m.endpoint(), 5.0);
    }

    #[test]
    fn maxima_single_point() {
        let m = build_maxima(&seq(&[4.0]), 4.0).unwrap();
        assert_eq!(m.initial(), 0.0);
        assert_eq!(m.jumps(), &[(1.0, 1.0)]);
    }

    #[test]
    fn maxima_empty_sample_rejected() {
        assert!(build_maxima(&seq(&[]), 1.0).is_err());
    }

    #[test]
    fn truncation_levels() {
        let m = build_maxima(&seq(&[3.0, 1.0, 5.0, 2.0]), 1.0).unwrap();
        let t = truncate_maxima(&m, 4.0).unwrap();
        assert_eq!(t.initial(), 0.0);
        assert_eq!(t.jumps(), &[(0.75, 5.0)]);
        assert_eq!(truncate_maxima(&m, 0.5).unwrap(), m);
        let all_zero = truncate_maxima(&m, 10.0).unwrap();
        assert_eq!(all_zero.jumps(), &[]);
        assert_eq!(all_zero.initial(), 0.0);
    }

    #[test]
    fn point_process_from_sample() {
        let pm = build_point_process(&seq(&[3.0, 1.0, 5.0, 2.0]), 1.0);
        assert_eq!(pm.points(), &[(0.25, 3.0), (0.5, 1.0), (0.75, 5.0), (1.0, 2.0)]);
        let zeros = build_point_process(&seq(&[0.0, 0.0]), 1.0);
        assert!(zeros.is_empty());
        // exceedance counts match the raw sample
        let u = 1.5;
        let count = restrict(&pm, u).len();
        assert_eq!(count, seq(&[3.0, 1.0, 5.0, 2.0]).values.iter().filter(|&&x| x > u).count());
    }

    #[test]
    fn restrict_monotone_in_u() {
        let pm = build_point_process(&seq(&[3.0, 1.0, 5.0, 2.0]), 1.0);
        assert_eq!(restrict(&pm, 0.5), pm);
        assert!(restrict(&pm, 6.0).is_empty());
        let mut prev = pm.len();
        for &u in &[1.0, 2.0, 3.0, 4.0, 5.0] {
            let c = restrict(&pm, u).len();
            assert!(c <= prev);
            prev = c;
        }
    }

    #[test]
    fn lambda_membership() {
        let ok = PointMeasure::new(vec![(0.5, 3.0)]).unwrap();
        assert!(in_lambda(&ok, 1.0, 0.5).unwrap());
        let tie = PointMeasure::new(vec![(0.5, 3.0), (0.5, 2.0)]).unwrap();
        assert!(!in_lambda(&tie, 1.0, 0.5).unwrap());
        let boundary = PointMeasure::new(vec![(1.0, 3.0)]).unwrap();
        assert!(!in_lambda(&boundary, 1.0, 0.5).unwrap());
        let at_level = PointMeasure::new(vec![(0.5, 1.0)]).unwrap();
        assert!(!in_lambda(&at_level, 1.0, 0.5).unwrap());
        assert!(in_lambda(&ok, 0.5, 1.0).is_err());
    }

    #[test]
    fn lambda_monotone_in_v() {
        // two low points at equal times violate Lambda_2 only once v drops
        let pm = PointMeasure::new(vec![(0.5, 0.4), (0.5, 0.3)]).unwrap();
        assert!(in_lambda(&pm, 1.0, 0.6).unwrap());
        assert!(!in_lambda(&pm, 1.0, 0.2).unwrap());
    }

    #[test]
    fn max_functional_running_max() {
        let pm = PointMeasure::new(vec![(0.2, 3.0), (0.5, 1.5)]).unwrap();
        let f = max_functional(&pm, 1.0);
        assert_eq!(f.jumps(), &[(0.2, 3.0)]);
        let g = max_functional(&pm, 2.0);
        assert_eq!(g.jumps(), &[(0.2, 3.0)]);
    }

    #[test]
    fn composition_identity_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let n = rng.gen_range(1..30);
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
            let s = seq(&values);
            let u = rng.gen_range(0.1..4.0);
            let a = rng.gen_range(0.5..2.0);
            let lhs = max_functional(&build_point_process(&s, a), u);
            let rhs = truncate_maxima(&build_maxima(&s, a).unwrap(), u).unwrap();
            assert_eq!(lhs, rhs);
            // phi^(u) is invariant under restriction below u
            let v = u * rng.gen_range(0.1..0.99);
            let restricted = max_functional(&restrict(&build_point_process(&s, a), v), u);
            assert_eq!(restricted, lhs);
        }
    }

    #[test]
    fn truncation_gap_bounded_by_u() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(1..50);
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
            let m = build_maxima(&seq(&values), 1.0).unwrap();
            let u = rng.gen_range(0.1..9.0);
            let t = truncate_maxima(&m, u).unwrap();
            assert!(m.sup_norm_diff(&t) <= u + 1e-12);
            assert!(crate::cadlag::d_j1(&m, &t) <= u + 1e-12);
        }
    }
}
