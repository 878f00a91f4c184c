//! Estimators and block-size schedules: tail index, empirical normalizer,
//! extremal-index estimators (disjoint blocks and the O'Brien window form),
//! the empirical tail process, the anticlustering statistic, the
//! Laplace-functional block-factorization gap, and the `r_n` / `p_n`
//! schedules driven by mixing rates.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::models::{ModelSpec, SampleSeq};
use crate::{Error, Result};

/// A nonincreasing sequence of strong-mixing coefficients `alpha_l`.
///
/// Exact mixing coefficients are never computed; the caller supplies a rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MixingRate {
    /// `alpha_l = 0` for every lag (i.i.d. sequences).
    Zero,
    /// `alpha_l = 0` for `l >= horizon` and `1` below (m-dependence).
    MDependent { horizon: u64 },
    /// `alpha_l = min(1, c * rho^l)` with `0 < rho < 1`.
    Geometric { c: f64, rho: f64 },
}

impl MixingRate {
    pub fn rate(&self, l: u64) -> f64 {
        match *self {
            MixingRate::Zero => 0.0,
            MixingRate::MDependent { horizon } => {
                if l >= horizon {
                    0.0
                } else {
                    1.0
                }
            }
            MixingRate::Geometric { c, rho } => (c * rho.powi(l as i32)).clamp(0.0, 1.0),
        }
    }
}

/// The result of an estimation run, with the tuning that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n_used: usize,
    pub tuning: serde_json::Value,
}

/// Hill estimator of the tail index from the top `k + 1` order statistics:
/// the reciprocal mean of `log(x_(i) / x_(k+1)))` over the top `k`.
/// Standard error `value / sqrt(k)`.
pub fn hill_alpha(sample: &SampleSeq, k: usize) -> Result<Estimate> {
    let n = sample.len();
    if !(2..n).contains(&k) {
        return Err(Error::Domain(format!("hill_alpha requires 2 <= k < n, got k={k}, n={n}")));
    }
    let mut sorted = sample.values.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let pivot = sorted[k];
    if pivot <= 0.0 {
        return Err(Error::Domain("top k+1 order statistics must be positive".into()));
    }
    let mean_log: f64 = sorted[..k].iter().map(|&x| (x / pivot).ln()).sum::<f64>() / k as f64;
    let value = 1.0 / mean_log;
    Ok(Estimate {
        value,
        stderr: value / (k as f64).sqrt(),
        n_used: n,
        tuning: json!({ "k": k, "pivot": pivot }),
    })
}

/// Empirical normalizing level: the second-largest order statistic, the
/// smallest level exceeded by exactly one observation.
pub fn empirical_an(sample: &SampleSeq) -> f64 {
    assert!(sample.len() >= 2, "empirical_an requires n >= 2");
    let mut top = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for &x in &sample.values {
        if x > top {
            second = top;
            top = x;
        } else if x > second {
            second = x;
        }
    }
    second
}

/// Disjoint-blocks extremal-index estimator:
/// `(number of blocks with at least one exceedance) / (total exceedances)`,
/// over the `floor(n / r)` complete blocks.
pub fn blocks_theta(sample: &SampleSeq, block_len: usize, u_level: f64) -> Result<Estimate> {
    let n = sample.len();
    if block_len == 0 || block_len >= n {
        return Err(Error::Domain(format!("blocks_theta requires 0 < r < n, got r={block_len}, n={n}")));
    }
    let k_n = n / block_len;
    let covered = k_n * block_len;
    let mut blocks_hit = 0usize;
    let mut exceedances = 0usize;
    for block in sample.values[..covered].chunks_exact(block_len) {
        let c = block.iter().filter(|&&x| x > u_level).count();
        exceedances += c;
        if c > 0 {
            blocks_hit += 1;
        }
    }
    if exceedances == 0 {
        return Err(Error::InsufficientData(format!("no exceedances of level {u_level}")));
    }
    let value = blocks_hit as f64 / exceedances as f64;
    Ok(Estimate {
        value,
        stderr: (value * (1.0 - value).max(0.0) / exceedances as f64).sqrt(),
        n_used: covered,
        tuning: json!({
            "block_len": block_len,
            "u_level": u_level,
            "blocks": k_n,
            "blocks_hit": blocks_hit,
            "exceedances": exceedances,
        }),
    })
}

/// O'Brien-form extremal-index estimator: the fraction of exceedances whose
/// forward window of length `p` stays at or below the level,
/// `#{i : X_i > u, max(X_{i+1}..X_{i+p}) <= u} / #{i : X_i > u}`.
/// Anchors whose window leaves the sample are excluded.
pub fn obrien_theta(sample: &SampleSeq, p: usize, u_level: f64) -> Result<Estimate> {
    let n = sample.len();
    if p == 0 || p >= n {
        return Err(Error::Domain(format!("obrien_theta requires 0 < p < n, got p={p}, n={n}")));
    }
    let (hits, anchors) = obrien_counts(&sample.values, p, u_level);
    if anchors == 0 {
        return Err(Error::InsufficientData(format!("no exceedances of level {u_level} with a full window")));
    }
    let value = hits as f64 / anchors as f64;
    Ok(Estimate {
        value,
        stderr: (value * (1.0 - value).max(0.0) / anchors as f64).sqrt(),
        n_used: n,
        tuning: json!({ "p": p, "u_level": u_level, "anchors": anchors, "isolated": hits }),
    })
}

/// Raw O'Brien counts `(window-clear anchors, anchors)`; exposed for pooled
/// estimation across replications.
pub fn obrien_counts(values: &[f64], p: usize, u_level: f64) -> (usize, usize) {
    let n = values.len();
    let mut hits = 0usize;
    let mut anchors = 0usize;
    let mut i = 0usize;
    while i + p < n {
        if values[i] > u_level {
            anchors += 1;
            // scan backwards so a violating neighbor near the anchor is
            // found immediately
            if values[i + 1..=i + p].iter().all(|&x| x <= u_level) {
                hits += 1;
                i += p; // window is clear, skip it
                continue;
            }
        }
        i += 1;
    }
    (hits, anchors)
}

/// Empirical tail process: `P(X_{i+k} > r x | X_i > x)` counted over all
/// anchors `i` for which `i + k` stays inside the sample. The lag must be
/// nonzero.
pub fn tail_process_est(sample: &SampleSeq, lag: i64, ratio: f64, threshold: f64) -> Result<Estimate> {
    if lag == 0 {
        return Err(Error::Domain("tail process lag must be nonzero".into()));
    }
    if ratio <= 0.0 || threshold <= 0.0 {
        return Err(Error::Domain("tail_process_est requires ratio > 0 and threshold > 0".into()));
    }
    let n = sample.len() as i64;
    let mut anchors = 0usize;
    let mut hits = 0usize;
    for i in 0..n {
        let j = i + lag;
        if j < 0 || j >= n {
            continue;
        }
        if sample.values[i as usize] > threshold {
            anchors += 1;
            if sample.values[j as usize] > ratio * threshold {
                hits += 1;
            }
        }
    }
    if anchors == 0 {
        return Err(Error::InsufficientData(format!("no exceedances of {threshold} away from the edges")));
    }
    let value = hits as f64 / anchors as f64;
    Ok(Estimate {
        value,
        stderr: (value * (1.0 - value).max(0.0) / anchors as f64).sqrt(),
        n_used: anchors,
        tuning: json!({ "lag": lag, "ratio": ratio, "threshold": threshold, "anchors": anchors }),
    })
}

/// Anticlustering statistic:
/// `P(max_{m <= |i| <= r_n} X_i > u a_n | X_0 > u a_n)`, counted over
/// anchors whose two-sided window lies fully inside the sample.
pub fn anticluster_stat(
    sample: &SampleSeq,
    m: usize,
    r_n: usize,
    u: f64,
    a_n: f64,
) -> Result<Estimate> {
    if m == 0 || m >= r_n {
        return Err(Error::Domain(format!("anticluster_stat requires 0 < m < r_n, got m={m}, r_n={r_n}")));
    }
    let level = u * a_n;
    let n = sample.len();
    if 2 * r_n + 1 > n {
        return Err(Error::Domain("window does not fit in the sample".into()));
    }
    // positions of exceedances, for windowed lookups
    let exceed: Vec<usize> =
        (0..n).filter(|&i| sample.values[i] > level).collect();
    let mut anchors = 0usize;
    let mut hits = 0usize;
    for &i in &exceed {
        if i < r_n || i + r_n >= n {
            continue; // edge windows excluded, not truncated
        }
        anchors += 1;
        let has_in = |lo: usize, hi: usize| {
            let a = exceed.partition_point(|&j| j < lo);
            a < exceed.len() && exceed[a] <= hi
        };
        if has_in(i - r_n, i - m) || has_in(i + m, i + r_n) {
            hits += 1;
        }
    }
    if anchors == 0 {
        return Err(Error::InsufficientData(format!("no exceedances of {level} with full windows")));
    }
    let value = hits as f64 / anchors as f64;
    Ok(Estimate {
        value,
        stderr: (value * (1.0 - value).max(0.0) / anchors as f64).sqrt(),
        n_used: anchors,
        tuning: json!({ "m": m, "r_n": r_n, "u": u, "a_n": a_n, "anchors": anchors }),
    })
}

/// Parameters of the built-in compactly supported test-function family
/// `f(t, x) = g(t) * min((x - u)_+ / w, 1)` with `g` a triangular bump of
/// the given height on `[center - halfwidth, center + halfwidth]`, or the
/// constant `height` when `time_bump` is absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FParams {
    pub u: f64,
    pub w: f64,
    pub height: f64,
    pub time_bump: Option<(f64, f64)>,
}

impl FParams {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        if x <= self.u {
            return 0.0;
        }
        let g = match self.time_bump {
            None => self.height,
            Some((center, halfwidth)) => {
                self.height * (1.0 - (t - center).abs() / halfwidth).max(0.0)
            }
        };
        g * ((x - self.u) / self.w).min(1.0)
    }
}

/// Monte Carlo estimate of the block-factorization gap of the Laplace
/// functional:
/// `|E exp(-sum_{i<=n} f(i/n, X_i/a_n))
///   - prod_{k<=k_n} E exp(-sum_{i<=r_n} f(k r_n/n, X_i/a_n))|`
/// with `k_n = floor(n / r_n)`.
///
/// Both sides are estimated from the same `reps` sample paths: block `k` of
/// each path has the stationary law, so its time-frozen Laplace transform
/// estimates the `k`-th factor. The reported stderr ignores the (favorable)
/// correlation between the two sides.
pub fn laplace_gap(
    spec: &ModelSpec,
    n: usize,
    r_n: usize,
    f_params: FParams,
    reps: usize,
    seed: u64,
) -> Result<Estimate> {
    if r_n == 0 || r_n > n {
        return Err(Error::Domain(format!("laplace_gap requires 0 < r_n <= n, got r_n={r_n}, n={n}")));
    }
    if reps < 100 {
        return Err(Error::Domain(format!("laplace_gap requires reps >= 100, got {reps}")));
    }
    spec.validate()?;
    let a_n = spec.theoretical_an(n).or_else(|_| {
        // pooled pilot estimate for models without a closed-form marginal
        crate::verify::reference_an(spec, n, seed ^ 0x9e37_79b9)
    })?;
    let k_n = n / r_n;
    let results: Vec<(f64, Vec<f64>)> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(rep);
            let values = spec.sample_with(n, &mut rng).expect("spec validated");
            let full: f64 = (0..n)
                .map(|i| f_params.eval((i + 1) as f64 / n as f64, values[i] / a_n))
                .sum();
            let t1 = (-full).exp();
            let blocks: Vec<f64> = (0..k_n)
                .map(|k| {
                    let t_frozen = ((k + 1) * r_n) as f64 / n as f64;
                    let s: f64 = values[k * r_n..(k + 1) * r_n]
                        .iter()
                        .map(|&x| f_params.eval(t_frozen, x / a_n))
                        .sum();
                    (-s).exp()
                })
                .collect();
            (t1, blocks)
        })
        .collect();
    let mean1 = results.iter().map(|r| r.0).sum::<f64>() / reps as f64;
    let var1 = results.iter().map(|r| (r.0 - mean1).powi(2)).sum::<f64>() / (reps - 1) as f64;
    let mut product = 1.0;
    let mut rel_var = 0.0;
    for k in 0..k_n {
        let mean_k = results.iter().map(|r| r.1[k]).sum::<f64>() / reps as f64;
        let var_k = results.iter().map(|r| (r.1[k] - mean_k).powi(2)).sum::<f64>() / (reps - 1) as f64;
        product *= mean_k;
        rel_var += var_k / (mean_k * mean_k * reps as f64);
    }
    let value = (mean1 - product).abs();
    let stderr = (var1 / reps as f64 + product * product * rel_var).sqrt();
    Ok(Estimate {
        value,
        stderr,
        n_used: reps,
        tuning: json!({
            "n": n,
            "r_n": r_n,
            "k_n": k_n,
            "a_n": a_n,
            "reps": reps,
            "seed": seed,
            "f": f_params,
            "full_mean": mean1,
            "block_product": product,
        }),
    })
}

/// Integer square root on u128 (Newton iteration).
fn isqrt_u128(v: u128) -> u128 {
    if v < 2 {
        return v;
    }
    let mut x = 1u128 << ((128 - v.leading_zeros()).div_ceil(2));
    loop {
        let y = (x + v / x) / 2;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Largest `k` with `k^3 <= v`.
fn icbrt_u128(v: u128) -> u128 {
    let mut lo = 0u128;
    let mut hi = 1u128 << 43; // (2^43)^3 > u128::MAX / 4, plenty for n <= 2^42
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        match mid.checked_pow(3) {
            Some(c) if c <= v => lo = mid,
            _ => hi = mid - 1,
        }
    }
    lo
}

/// Exact `floor(sqrt(n^2 * alpha))` for an integer `n` and a finite
/// `alpha >= 0`, using the exact binary representation of `alpha`.
fn floor_n_sqrt_alpha(n: u64, alpha: f64) -> u64 {
    assert!(alpha >= 0.0 && alpha.is_finite());
    if alpha == 0.0 || n == 0 {
        return 0;
    }
    // alpha = mant * 2^exp exactly
    let bits = alpha.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if raw_exp == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    };
    // want floor(sqrt(n^2 * mant * 2^exp))
    let mut m = (n as u128) * (n as u128) * (mant as u128);
    let mut e = exp;
    if e % 2 != 0 {
        // make the exponent even; borrow one factor of two into m when
        // possible, otherwise drop the low bit (floor is unaffected: see
        // the nested-floor identity floor(sqrt(x)/2^k) = floor(sqrt(x/4^k)))
        if m.leading_zeros() >= 1 {
            m <<= 1;
            e -= 1;
        } else {
            m >>= 1;
            e += 1;
        }
    }
    let half = e / 2;
    if half >= 0 {
        (isqrt_u128(m) << half) as u64
    } else {
        (isqrt_u128(m) >> (-half)) as u64
    }
}

/// Block-length schedule `r_n = floor(max(n sqrt(alpha_{l_n + 1}), n^(2/3))) + 1`.
///
/// The lag sequence must satisfy `l(n) = o(n^(1/8))`; this is asserted on a
/// doubling grid up to `n`.
pub fn rn_schedule<F: Fn(u64) -> u64>(n: u64, mixing: &MixingRate, l_of_n: F) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain("rn_schedule requires n >= 1".into()));
    }
    // check l(n') <= n'^(1/8) with a shrinking ratio on a doubling grid
    let mut grid_n = 64u64;
    let mut prev_ratio = f64::INFINITY;
    while grid_n <= n {
        let l = l_of_n(grid_n);
        if l == 0 {
            return Err(Error::Domain(format!("l_of_n({grid_n}) must be >= 1")));
        }
        let ratio = l as f64 / (grid_n as f64).powf(0.125);
        if ratio > 1.0 && ratio >= prev_ratio {
            return Err(Error::Domain(format!(
                "l_of_n is not o(n^(1/8)): ratio {ratio} at n = {grid_n}"
            )));
        }
        prev_ratio = ratio;
        grid_n = grid_n.saturating_mul(2);
    }
    let l = l_of_n(n).max(1);
    let mixing_term = floor_n_sqrt_alpha(n, mixing.rate(l + 1));
    let growth_floor = icbrt_u128((n as u128) * (n as u128)) as u64;
    Ok(mixing_term.max(growth_floor) + 1)
}

/// Default lag sequence for [`rn_schedule`]: `max(floor(n^(1/9)), 1)`,
/// inside the `o(n^(1/8))` constraint with margin.
pub fn default_l_of_n(n: u64) -> u64 {
    ((n as f64).powf(1.0 / 9.0).floor() as u64).max(1)
}

/// Window schedule `p_n = max(floor(n sqrt(alpha_{q_n})), floor(sqrt(n q_n)) + 1)`.
pub fn pn_schedule(n: u64, q_n: u64, mixing: &MixingRate) -> Result<u64> {
    if q_n == 0 || q_n >= n {
        return Err(Error::Domain(format!("pn_schedule requires 1 <= q_n < n, got q_n={q_n}, n={n}")));
    }
    let mixing_term = floor_n_sqrt_alpha(n, mixing.rate(q_n));
    let spacing_term = isqrt_u128((n as u128) * (q_n as u128)) as u64 + 1;
    Ok(mixing_term.max(spacing_term))
}

/// Default window count for [`pn_schedule`]: `q_n = max(floor(log^2 n), 1)`.
pub fn default_q_of_n(n: u64) -> u64 {
    (((n as f64).ln().powi(2)).floor() as u64).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::TailLaw;

    fn iid_pareto(alpha: f64) -> ModelSpec {
        ModelSpec::Iid { law: TailLaw::Pareto { alpha, x_min: 1.0 } }
    }

    #[test]
    fn hill_exact_on_synthetic_order_statistics() {
        // geometric spacings chosen so the mean log-ratio is exactly 1/alpha
        let alpha = 2.0;
        let k = 100usize;
        let step = 2.0 / (alpha * (k as f64 + 1.0));
        let mut values: Vec<f64> = (1..=k + 1)
            .map(|i| 3.0 * ((k + 1 - i) as f64 * step).exp())
            .collect();
        values.extend(vec![0.5; 50]);
        let sample = SampleSeq { values, model: iid_pareto(alpha), seed: 0 };
        let est = hill_alpha(&sample, k).unwrap();
        assert!((est.value - alpha).abs() < 1e-10, "hill = {}", est.value);
    }

    #[test]
    fn hill_scale_invariant() {
        let sample = iid_pareto(1.5).sample(5000, 17).unwrap();
        let a = hill_alpha(&sample, 200).unwrap().value;
        let scaled = SampleSeq {
            values: sample.values.iter().map(|&x| 3.7 * x).collect(),
            model: sample.model.clone(),
            seed: sample.seed,
        };
        let b = hill_alpha(&scaled, 200).unwrap().value;
        assert!((a - b).abs() <= 1e-12 * a.abs(), "{a} vs {b}");
    }

    #[test]
    fn hill_recovers_pareto_and_frechet() {
        let mut in_range = 0;
        let runs = 40;
        for seed in 0..runs {
            let sample = iid_pareto(2.0).sample(100_000, seed).unwrap();
            let v = hill_alpha(&sample, 1000).unwrap().value;
            if (1.85..=2.15).contains(&v) {
                in_range += 1;
            }
        }
        assert!(in_range >= runs * 9 / 10, "only {in_range}/{runs} in range");

        let frechet = ModelSpec::Iid { law: TailLaw::Frechet { alpha: 1.0 } };
        let sample = frechet.sample(100_000, 3).unwrap();
        let v = hill_alpha(&sample, 1000).unwrap().value;
        assert!((0.9..=1.1).contains(&v), "hill = {v}");
    }

    #[test]
    fn hill_domain_errors() {
        let sample = iid_pareto(1.0).sample(100, 0).unwrap();
        assert!(hill_alpha(&sample, 1).is_err());
        assert!(hill_alpha(&sample, 100).is_err());
    }

    #[test]
    fn empirical_an_order_statistics() {
        let s = |v: &[f64]| SampleSeq { values: v.to_vec(), model: iid_pareto(1.0), seed: 0 };
        assert_eq!(empirical_an(&s(&[3.0, 1.0, 5.0, 2.0])), 3.0);
        assert_eq!(empirical_an(&s(&[5.0, 5.0, 1.0])), 5.0);
    }

    #[test]
    fn empirical_an_tracks_theoretical() {
        let spec = iid_pareto(2.0);
        let n = 10_000;
        let an = spec.theoretical_an(n).unwrap();
        let mut ok = 0;
        let runs = 200;
        for seed in 0..runs {
            let ratio = empirical_an(&spec.sample(n, seed).unwrap()) / an;
            if (0.4..=2.5).contains(&ratio) {
                ok += 1;
            }
        }
        // the limit law exp(-s)(1+s), s = x^(-2), puts ~2.6% outside [0.4, 2.5]
        assert!(ok >= 185, "only {ok}/{runs} within [0.4, 2.5]");
    }

    #[test]
    fn blocks_theta_single_exceedance() {
        let values = vec![vec![1.0; 40], vec![100.0], vec![1.0; 39]].concat();
        let sample = SampleSeq { values, model: iid_pareto(1.0), seed: 0 };
        let est = blocks_theta(&sample, 10, 50.0).unwrap();
        assert_eq!(est.value, 1.0);
        assert!(blocks_theta(&sample, 10, 1e9).is_err());
    }

    #[test]
    fn obrien_iid_near_one() {
        let spec = ModelSpec::Iid { law: TailLaw::Frechet { alpha: 1.0 } };
        let n = 100_000;
        let u = 0.5 * spec.theoretical_an(n).unwrap();
        let (mut hits, mut anchors) = (0, 0);
        for seed in 0..60 {
            let sample = spec.sample(n, seed).unwrap();
            let (h, a) = obrien_counts(&sample.values, 200, u);
            hits += h;
            anchors += a;
        }
        let theta = hits as f64 / anchors as f64;
        assert!(theta > 0.9, "pooled obrien theta = {theta}");
    }

    #[test]
    fn obrien_precondition_errors() {
        let sample = iid_pareto(1.0).sample(100, 0).unwrap();
        assert!(obrien_theta(&sample, 0, 1.0).is_err());
        assert!(obrien_theta(&sample, 10, 1e12).is_err());
    }

    #[test]
    fn tail_process_moving_maxima_half() {
        // analytic oracle: P(xi_i > x) / P(max(xi_i, xi_{i-1}) > x) -> 1/2
        let spec = ModelSpec::MovingMaxima { order: 2, base: TailLaw::Frechet { alpha: 1.0 } };
        let n = 1_000_000;
        let sample = spec.sample(n, 21).unwrap();
        let mut sorted = sample.values.clone();
        sorted.sort_by(f64::total_cmp);
        let x = sorted[(0.999 * n as f64) as usize];
        let est = tail_process_est(&sample, 1, 1.0, x).unwrap();
        assert!((est.value - 0.5).abs() < 0.05, "tail process = {}", est.value);
        assert!(tail_process_est(&sample, 0, 1.0, x).is_err());
    }

    #[test]
    fn tail_process_iid_degenerates() {
        let spec = iid_pareto(1.0);
        let n = 1_000_000;
        let sample = spec.sample(n, 4).unwrap();
        let mut sorted = sample.values.clone();
        sorted.sort_by(f64::total_cmp);
        let x = sorted[(0.999 * n as f64) as usize];
        let est = tail_process_est(&sample, 1, 1.0, x).unwrap();
        assert!(est.value <= 0.05, "tail process = {}", est.value);
    }

    #[test]
    fn tail_process_symmetric_lags_for_iid() {
        let spec = iid_pareto(1.0);
        let sample = spec.sample(1_000_000, 9).unwrap();
        let mut sorted = sample.values.clone();
        sorted.sort_by(f64::total_cmp);
        let x = sorted[(0.99 * sorted.len() as f64) as usize];
        let fwd = tail_process_est(&sample, 1, 1.0, x).unwrap().value;
        let bwd = tail_process_est(&sample, -1, 1.0, x).unwrap().value;
        assert!((fwd - bwd).abs() < 0.01, "fwd {fwd} vs bwd {bwd}");
    }

    #[test]
    fn anticluster_iid_small_and_mm_structure() {
        let spec = iid_pareto(1.0);
        let n = 1_000_000;
        let sample = spec.sample(n, 31).unwrap();
        let a_n = spec.theoretical_an(n).unwrap();
        let est = anticluster_stat(&sample, 5, 100, 1.0, a_n).unwrap();
        assert!(est.value <= 0.01, "anticluster = {}", est.value);

        let mm = ModelSpec::MovingMaxima { order: 2, base: TailLaw::Frechet { alpha: 1.0 } };
        let sample = mm.sample(n, 32).unwrap();
        let a_n = mm.theoretical_an(n).unwrap();
        // every pair cluster puts a second exceedance at distance 1
        let near = anticluster_stat(&sample, 1, 100, 0.3, a_n).unwrap();
        assert!(near.value >= 0.95, "m=1 statistic = {}", near.value);
        // m = 2 looks past the cluster
        let far = anticluster_stat(&sample, 2, 100, 0.3, a_n).unwrap();
        assert!(far.value <= 0.05, "m=2 statistic = {}", far.value);
    }

    #[test]
    fn laplace_gap_single_block_time_constant_is_zero() {
        let spec = iid_pareto(1.0);
        let f = FParams { u: 1.0, w: 1.0, height: 1.0, time_bump: None };
        let est = laplace_gap(&spec, 2000, 2000, f, 200, 7).unwrap();
        assert_eq!(est.value, 0.0, "single-block gap = {}", est.value);
    }

    #[test]
    fn laplace_gap_iid_small() {
        let spec = iid_pareto(1.0);
        let f = FParams { u: 0.5, w: 1.0, height: 1.0, time_bump: Some((0.5, 0.5)) };
        let est = laplace_gap(&spec, 10_000, 500, f, 400, 11).unwrap();
        assert!(est.value <= 3.0 * est.stderr.max(1e-3), "gap {} stderr {}", est.value, est.stderr);
    }

    #[test]
    fn rn_schedule_hand_values() {
        assert_eq!(rn_schedule(100, &MixingRate::Zero, |_| 1).unwrap(), 22);
        let geo = MixingRate::Geometric { c: 1.0, rho: 0.5 };
        assert_eq!(rn_schedule(1_000_000, &geo, |_| 4).unwrap(), 176_777);
    }

    #[test]
    fn pn_schedule_hand_values() {
        assert_eq!(pn_schedule(10_000, 100, &MixingRate::Zero).unwrap(), 1001);
        // constant rate alpha_l = 0.04 (rho = 1 keeps c exact at every lag)
        let rate = MixingRate::Geometric { c: 0.04, rho: 1.0 };
        assert_eq!(pn_schedule(10_000, 10, &rate).unwrap(), 2000);
    }

    #[test]
    fn schedules_are_sublinear() {
        let geo = MixingRate::Geometric { c: 1.0, rho: 0.8 };
        let mut prev_ratio = f64::INFINITY;
        for k in 3..=7 {
            let n = 10u64.pow(k);
            let r = rn_schedule(n, &geo, default_l_of_n).unwrap();
            let ratio = r as f64 / n as f64;
            assert!(ratio < prev_ratio, "r_n/n not shrinking at n=10^{k}");
            prev_ratio = ratio;
        }
        let mut prev_ratio = f64::INFINITY;
        for k in 3..=7 {
            let n = 10u64.pow(k);
            let p = pn_schedule(n, default_q_of_n(n), &geo).unwrap();
            let ratio = p as f64 / n as f64;
            assert!(ratio < prev_ratio, "p_n/n not shrinking at n=10^{k}");
            prev_ratio = ratio;
        }
    }

    #[test]
    fn schedule_integer_oracle_agrees() {
        // verify the defining property k^2 <= n^2 alpha < (k+1)^2 in exact
        // integer arithmetic on the binary representation of alpha
        let check = |n: u64, alpha: f64| {
            let k = floor_n_sqrt_alpha(n, alpha);
            if alpha == 0.0 {
                assert_eq!(k, 0, "n={n}");
                return;
            }
            let bits = alpha.to_bits();
            let raw_exp = ((bits >> 52) & 0x7ff) as i64;
            let frac = bits & ((1u64 << 52) - 1);
            let (mant, exp) = if raw_exp == 0 {
                (frac, -1074i64)
            } else {
                (frac | (1u64 << 52), raw_exp - 1075)
            };
            assert!(exp < 0 && exp > -120, "test alphas stay in exact u128 range");
            // compare k^2 * 2^(-exp) <= n^2 * mant < (k+1)^2 * 2^(-exp)
            let rhs = (n as u128) * (n as u128) * (mant as u128);
            let shift = (-exp) as u32;
            let sq = |v: u64| (v as u128).checked_mul(v as u128).unwrap();
            // None means the shifted value exceeds u128 (hence exceeds rhs)
            let shl = |v: u128| {
                if v == 0 || v.leading_zeros() >= shift {
                    Some(v << shift)
                } else {
                    None
                }
            };
            assert!(
                shl(sq(k)).map_or(false, |lo| lo <= rhs),
                "lower bound fails: n={n}, alpha={alpha}, k={k}"
            );
            assert!(
                shl(sq(k + 1)).map_or(true, |hi| hi > rhs),
                "upper bound fails: n={n}, alpha={alpha}, k={k}"
            );
        };
        for &n in &[1u64, 7, 100, 10_000, 1_000_000, 123_456_789] {
            for &alpha in &[0.0, 1e-12, 0.04, 0.03125, 0.5, 0.999, 1.0] {
                check(n, alpha);
            }
        }
        // perfect squares and cubes at the floor boundary
        assert_eq!(icbrt_u128(1_000_000u128 * 1_000_000), 10_000);
        assert_eq!(isqrt_u128(10_000 * 100), 1000);
    }
}
