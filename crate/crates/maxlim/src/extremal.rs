//! Exact simulation of the limit objects: Poisson point processes on
//! `[0,1] x (eps, inf]` with power-law mean measure, extremal-process paths,
//! and their closed-form finite-dimensional laws.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::cadlag::StepFunction;
use crate::maxima::{max_functional, PointMeasure};
use crate::{Error, Result};

/// An extremal-process law with power-law exponent measure
/// `nu(x, inf) = x^(-alpha)`, optionally truncated below `u`:
/// `nu_u(x, inf) = x^(-alpha)` for `x >= u` and `u^(-alpha)` for `x < u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalLaw {
    pub alpha: f64,
    /// Truncation level; 0 means untruncated.
    pub u: f64,
}

impl ExtremalLaw {
    pub fn new(alpha: f64, u: f64) -> Result<Self> {
        if alpha <= 0.0 {
            return Err(Error::Config(format!("alpha must be > 0, got {alpha}")));
        }
        if u < 0.0 {
            return Err(Error::Config(format!("truncation must be >= 0, got {u}")));
        }
        Ok(ExtremalLaw { alpha, u })
    }

    /// The tail of the exponent measure, `nu_u(x, inf)`.
    pub fn nu_tail(&self, x: f64) -> f64 {
        assert!(x > 0.0, "nu_tail requires x > 0");
        if self.u > 0.0 && x < self.u {
            self.u.powf(-self.alpha)
        } else {
            x.powf(-self.alpha)
        }
    }

    /// Draws one realization of the Poisson process with mean measure
    /// `lambda x nu_u` restricted to `[0,1] x (epsilon, inf]`.
    ///
    /// The point count is Poisson with parameter `epsilon^(-alpha)`, times
    /// are i.i.d. uniform on `(0,1)` and marks are drawn by inverse
    /// transform from the normalized restricted measure,
    /// `V = epsilon * W^(-1/alpha)` with `W` uniform.
    pub fn sample_poisson_pp<R: Rng>(&self, epsilon: f64, rng: &mut R) -> Result<PointMeasure> {
        if epsilon <= self.u {
            return Err(Error::Domain(format!(
                "epsilon must exceed the truncation level, got epsilon={epsilon}, u={}",
                self.u
            )));
        }
        let s = self.nu_tail(epsilon);
        let count = Poisson::new(s)
            .map_err(|e| Error::Domain(format!("invalid Poisson parameter {s}: {e}")))?
            .sample(rng) as usize;
        let points = (0..count)
            .map(|_| {
                let t: f64 = rng.gen::<f64>();
                let w: f64 = rng.gen::<f64>();
                (t, epsilon * w.powf(-1.0 / self.alpha))
            })
            .collect();
        PointMeasure::new(points)
    }

    /// Joint probability `P(M(t_1) <= x_1, ..., M(t_k) <= x_k)` of the
    /// extremal process with exponent measure `nu_u`.
    ///
    /// Computed from independent Poisson counts on the disjoint time strips
    /// `(t_{j-1}, t_j]`: the event requires no point in strip `j` above
    /// `min(x_j, ..., x_k)`, so
    /// `P = prod_j exp(-(t_j - t_{j-1}) * nu_u(min_{i>=j} x_i, inf))`.
    pub fn fdd_cdf(&self, times: &[f64], levels: &[f64]) -> Result<f64> {
        if times.len() != levels.len() || times.is_empty() {
            return Err(Error::Domain("times and levels must be nonempty and of equal length".into()));
        }
        let mut prev = 0.0;
        for &t in times {
            if !(t > prev && t <= 1.0) {
                return Err(Error::Domain(format!(
                    "times must be strictly increasing in (0,1], got {t} after {prev}"
                )));
            }
            prev = t;
        }
        for &x in levels {
            if !(x > 0.0) {
                return Err(Error::Domain(format!("levels must be > 0, got {x}")));
            }
        }
        // running minimum of the remaining levels, from the right
        let mut suffix_min = vec![0.0; levels.len()];
        let mut cur = f64::INFINITY;
        for (i, &x) in levels.iter().enumerate().rev() {
            cur = cur.min(x);
            suffix_min[i] = cur;
        }
        let mut log_p = 0.0;
        let mut t_prev = 0.0;
        for (j, &t) in times.iter().enumerate() {
            let tail = if suffix_min[j].is_infinite() { 0.0 } else { self.nu_tail(suffix_min[j]) };
            log_p -= (t - t_prev) * tail;
            t_prev = t;
        }
        Ok(log_p.exp())
    }
}

/// The extremal path generated by a point measure: the running maximum over
/// all points.
pub fn extremal_path(pm: &PointMeasure) -> StepFunction {
    max_functional(pm, 0.0)
}
