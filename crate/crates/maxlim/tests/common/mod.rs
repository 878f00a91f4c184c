//! Shared helpers for integration tests: random step functions and an
//! independent J1 oracle based on bisection over a feasibility predicate
//! (cover the time axis by tolerance bands around the retimed jumps),
//! structurally unrelated to the matching recursion in the library.

use maxlim::cadlag::StepFunction;
use rand::Rng;

/// Random step function (not necessarily monotone) with at most `max_jumps`
/// jumps and levels in [0, 2].
pub fn random_step<R: Rng>(rng: &mut R, max_jumps: usize) -> StepFunction {
    let k = rng.gen_range(0..=max_jumps);
    let mut times: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0f64)).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let initial = rng.gen_range(0.0..2.0);
    let mut prev = initial;
    let jumps = times
        .into_iter()
        .map(|t| {
            let mut v = rng.gen_range(0.0..2.0f64);
            if (v - prev).abs() < 1e-3 {
                v += 0.01; // keep jumps genuine
            }
            prev = v;
            (t, v)
        })
        .collect();
    StepFunction::new(initial, jumps).expect("valid construction")
}

/// The level of `f` on the segment after its `i`-th jump (`i = 0` is the
/// initial segment).
fn level(f: &StepFunction, i: usize) -> f64 {
    if i == 0 {
        f.initial()
    } else {
        f.jumps()[i - 1].1
    }
}

/// Max of `|f(t) - v|` over `t` in the interval `(lo, hi]`.
fn seg_dev(f: &StepFunction, lo: f64, hi: f64, v: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let jumps = f.jumps();
    let mut worst = 0.0f64;
    for i in 0..=jumps.len() {
        // segment i of f lives on (start_i, end_i]
        let start = if i == 0 { 0.0 } else { jumps[i - 1].0 };
        let end = if i == jumps.len() { 1.0 } else { jumps[i].0 };
        if start < hi && end > lo {
            worst = worst.max((level(f, i) - v).abs());
        }
    }
    worst
}

const SLACK: f64 = 1e-12;

/// Depth-first search over nondecreasing candidate placements of the
/// remaining jumps of `g`; `prev` is the position of jump `j - 1`.
fn place(
    f: &StepFunction,
    g: &StepFunction,
    c: f64,
    candidates: &[f64],
    j: usize,
    prev: f64,
) -> bool {
    let k = g.jumps().len();
    if j == k {
        // last segment and the point t = 1 carry g's final level
        return seg_dev(f, prev, 1.0, g.endpoint()) <= c + SLACK
            && (f.endpoint() - g.endpoint()).abs() <= c + SLACK;
    }
    let (t, _) = g.jumps()[j];
    // a jump at time 1 cannot move (the time change fixes 1)
    let band = if t == 1.0 { (1.0, 1.0) } else { ((t - c).max(0.0), (t + c).min(1.0)) };
    for &u in candidates {
        // strictly increasing: merging jumps is expressed through the tiny
        // offsets in the candidate set, never by exact ties
        if u < band.0 - SLACK || u <= prev {
            continue;
        }
        if u > band.1 + SLACK {
            break;
        }
        // segment j - 1 of the retimed g covers (prev, u]
        if seg_dev(f, prev, u, level(g, j)) <= c + SLACK && place(f, g, c, candidates, j + 1, u) {
            return true;
        }
    }
    false
}

/// Feasibility of `d_j1(f, g) <= c`: do retimed jump positions
/// `u_1 <= ... <= u_k` exist with `|u_j - t_j| <= c` and the retimed `g`
/// within `c` of `f` everywhere? Candidates are the band edges of every
/// jump of `g` plus the jump times of `f`; ties between positions encode
/// jumps merging in the limit.
fn feasible(f: &StepFunction, g: &StepFunction, c: f64) -> bool {
    if (f.initial() - g.initial()).abs() > c + SLACK {
        return false;
    }
    let mut base: Vec<f64> = Vec::new();
    for &(t, _) in g.jumps() {
        base.extend([(t - c).max(0.0), t, (t + c).min(1.0)]);
    }
    base.extend(f.jumps().iter().map(|&(t, _)| t));
    base.push(1.0);
    // several jumps may pile up near one base point; tiny offsets keep each
    // squeezed segment nonempty so its sup-norm share is still charged on
    // the correct side
    let eta = 1e-7;
    let k = g.jumps().len() as i32;
    let mut candidates: Vec<f64> = Vec::new();
    for &b in &base {
        for off in -k..=k {
            let u = b + off as f64 * eta;
            if (0.0..=1.0).contains(&u) {
                candidates.push(u);
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    place(f, g, c, &candidates, 0, 0.0)
}

/// Independent J1 distance by bisection on the feasibility predicate.
pub fn oracle_j1(f: &StepFunction, g: &StepFunction) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = f.sup_norm_diff(g); // identity time change upper bound
    if feasible(f, g, lo) {
        return 0.0;
    }
    assert!(feasible(f, g, hi), "sup norm must be feasible");
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if feasible(f, g, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
