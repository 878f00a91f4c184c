//! Generators for heavy-tailed stationary sequences.
//!
//! Three model families are supported: i.i.d. sequences, finite-order
//! moving maxima `X_n = max(xi_n, ..., xi_{n-m+1})`, and stochastic
//! volatility `X_n = sigma_n Z_n` with a lognormal AR(p) volatility.
//! Every model knows its marginal tail index, and where a closed-form
//! marginal exists, the theoretical normalizing level `a_n` solving
//! `n * S(a_n) = 1`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A regularly varying marginal law with explicit survival and quantile
/// functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailLaw {
    /// `S(x) = (x / x_min)^(-alpha)` for `x >= x_min`.
    Pareto { alpha: f64, x_min: f64 },
    /// `F(x) = exp(-x^(-alpha))` for `x > 0`.
    Frechet { alpha: f64 },
}

impl TailLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TailLaw::Pareto { alpha, x_min } => {
                if alpha <= 0.0 || x_min <= 0.0 {
                    return Err(Error::Config(format!(
                        "Pareto requires alpha > 0 and x_min > 0, got alpha={alpha}, x_min={x_min}"
                    )));
                }
            }
            TailLaw::Frechet { alpha } => {
                if alpha <= 0.0 {
                    return Err(Error::Config(format!("Frechet requires alpha > 0, got {alpha}")));
                }
            }
        }
        Ok(())
    }

    /// Tail index of regular variation.
    pub fn alpha(&self) -> f64 {
        match *self {
            TailLaw::Pareto { alpha, .. } | TailLaw::Frechet { alpha } => alpha,
        }
    }

    /// Survival probability `P(X > x)` for `x > 0`.
    pub fn survival(&self, x: f64) -> f64 {
        assert!(x > 0.0, "survival requires x > 0");
        match *self {
            TailLaw::Pareto { alpha, x_min } => {
                if x <= x_min {
                    1.0
                } else {
                    (x / x_min).powf(-alpha)
                }
            }
            TailLaw::Frechet { alpha } => -(-x.powf(-alpha)).exp_m1(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            1.0 - self.survival(x)
        }
    }

    /// Quantile function, the inverse of the CDF on `(0,1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        assert!((0.0..1.0).contains(&p), "quantile requires p in [0,1)");
        match *self {
            TailLaw::Pareto { alpha, x_min } => x_min * (1.0 - p).powf(-1.0 / alpha),
            TailLaw::Frechet { alpha } => (-(p.ln())).powf(-1.0 / alpha),
        }
    }

    /// Level `x` with `S(x) = s`.
    pub fn survival_inverse(&self, s: f64) -> f64 {
        assert!(s > 0.0 && s <= 1.0, "survival_inverse requires s in (0,1]");
        match *self {
            TailLaw::Pareto { alpha, x_min } => x_min * s.powf(-1.0 / alpha),
            TailLaw::Frechet { alpha } => (-((1.0 - s).ln())).powf(-1.0 / alpha),
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        // inverse transform on the open unit interval
        self.quantile(rng.gen::<f64>())
    }
}

/// Generative description of a strictly stationary nonnegative sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Iid { law: TailLaw },
    /// `X_n = max(xi_n, ..., xi_{n-m+1})` with `xi` i.i.d. from `base`.
    MovingMaxima { order: usize, base: TailLaw },
    /// `X_n = sigma_n Z_n` with `log sigma_n` a stationary Gaussian AR(p)
    /// independent of the i.i.d. noise `Z_n`.
    StochVol { noise: TailLaw, ar_coeffs: Vec<f64>, innovation_sd: f64 },
    /// The associated independent sequence: i.i.d. draws from the marginal
    /// law of the wrapped model.
    AssociatedIid { of: Box<ModelSpec> },
}

/// A reproducible sample path together with its provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleSeq {
    pub values: Vec<f64>,
    pub model: ModelSpec,
    pub seed: u64,
}

impl SampleSeq {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Single-column CSV with a header comment recording spec and seed.
    pub fn to_csv(&self) -> String {
        let spec = serde_json::to_string(&self.model).expect("model is serializable");
        let mut out = format!("# model: {spec}\n# seed: {}\nvalue\n", self.seed);
        for v in &self.values {
            out.push_str(&format!("{v}\n"));
        }
        out
    }
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Iid { law } => law.validate(),
            ModelSpec::MovingMaxima { order, base } => {
                if *order == 0 {
                    return Err(Error::Config("moving maxima order must be >= 1".into()));
                }
                base.validate()
            }
            ModelSpec::StochVol { noise, ar_coeffs, innovation_sd } => {
                noise.validate()?;
                if *innovation_sd < 0.0 {
                    return Err(Error::Config("innovation_sd must be >= 0".into()));
                }
                if *innovation_sd > 0.0 {
                    // fails for coefficients outside the stationarity region
                    ar_stationary_covariances(ar_coeffs, *innovation_sd)?;
                }
                Ok(())
            }
            ModelSpec::AssociatedIid { of } => of.validate(),
        }
    }

    /// Marginal tail index of regular variation. For stochastic volatility
    /// this equals the noise index by Breiman's lemma (the lognormal
    /// volatility is light-tailed).
    pub fn alpha(&self) -> f64 {
        match self {
            ModelSpec::Iid { law } => law.alpha(),
            ModelSpec::MovingMaxima { base, .. } => base.alpha(),
            ModelSpec::StochVol { noise, .. } => noise.alpha(),
            ModelSpec::AssociatedIid { of } => of.alpha(),
        }
    }

    /// Marginal survival `P(X_1 > x)` where it is available in closed form.
    pub fn marginal_survival(&self, x: f64) -> Result<f64> {
        match self {
            ModelSpec::Iid { law } => Ok(law.survival(x)),
            ModelSpec::MovingMaxima { order, base } => {
                // 1 - (1 - S_base(x))^m, stable in the far tail
                let m = *order as f64;
                Ok(-(m * (-base.survival(x)).ln_1p()).exp_m1())
            }
            ModelSpec::StochVol { noise, ar_coeffs, innovation_sd } => {
                if *innovation_sd == 0.0 && ar_coeffs.iter().all(|&c| c == 0.0) {
                    Ok(noise.survival(x))
                } else {
                    Err(Error::UnsupportedModel(
                        "stochastic volatility marginal has no closed form; use empirical_an".into(),
                    ))
                }
            }
            ModelSpec::AssociatedIid { of } => of.marginal_survival(x),
        }
    }

    /// The theoretical normalizing level: the solution of `n * S(a_n) = 1`.
    ///
    /// Errors for models without a computable marginal.
    pub fn theoretical_an(&self, n: usize) -> Result<f64> {
        assert!(n >= 1);
        let target = 1.0 / n as f64;
        match self {
            ModelSpec::Iid { law } => Ok(law.survival_inverse(target)),
            ModelSpec::MovingMaxima { order, base } => {
                // 1 - (1 - S_base(a))^m = 1/n  =>  S_base(a) = 1 - (1 - 1/n)^(1/m)
                let s = -(((-target).ln_1p()) / *order as f64).exp_m1();
                Ok(base.survival_inverse(s))
            }
            ModelSpec::StochVol { noise, ar_coeffs, innovation_sd } => {
                if *innovation_sd == 0.0 && ar_coeffs.iter().all(|&c| c == 0.0) {
                    Ok(noise.survival_inverse(target))
                } else {
                    Err(Error::UnsupportedModel(
                        "stochastic volatility marginal has no closed form; use empirical_an".into(),
                    ))
                }
            }
            ModelSpec::AssociatedIid { of } => of.theoretical_an(n),
        }
    }

    /// The extremal index where it is known: 1 for i.i.d. and stochastic
    /// volatility, `1/m` for moving maxima of Frechet innovations.
    pub fn theoretical_theta(&self) -> Option<f64> {
        match self {
            ModelSpec::Iid { .. } | ModelSpec::StochVol { .. } | ModelSpec::AssociatedIid { .. } => {
                Some(1.0)
            }
            ModelSpec::MovingMaxima { order, base } => match base {
                TailLaw::Frechet { .. } => Some(1.0 / *order as f64),
                // known for the Frechet example only
                TailLaw::Pareto { .. } => None,
            },
        }
    }

    /// Draws `n` consecutive values of the stationary sequence,
    /// deterministically from `(self, n, seed)`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleSeq> {
        if n == 0 {
            return Err(Error::Domain("sample length must be >= 1".into()));
        }
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = self.sample_with(n, &mut rng)?;
        Ok(SampleSeq { values, model: self.clone(), seed })
    }

    /// Like [`ModelSpec::sample`] but on a caller-provided RNG; used by the
    /// verification harness to run replications on disjoint seed streams.
    pub fn sample_with<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        match self {
            ModelSpec::Iid { law } => Ok((0..n).map(|_| law.sample(rng)).collect()),
            ModelSpec::MovingMaxima { order, base } => {
                let m = *order;
                // burn-in of m-1 innovations so X_1 already has the
                // stationary law
                let mut window: Vec<f64> = (0..m - 1).map(|_| base.sample(rng)).collect();
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    let xi = base.sample(rng);
                    let x = window.iter().fold(xi, |acc, &w| acc.max(w));
                    out.push(x);
                    if m > 1 {
                        window.push(xi);
                        window.remove(0);
                    }
                }
                Ok(out)
            }
            ModelSpec::StochVol { noise, ar_coeffs, innovation_sd } => {
                let log_sigma = sample_stationary_ar(ar_coeffs, *innovation_sd, n, rng)?;
                Ok(log_sigma.iter().map(|&ls| ls.exp() * noise.sample(rng)).collect())
            }
            ModelSpec::AssociatedIid { of } => {
                (0..n).map(|_| of.sample_marginal(rng)).collect()
            }
        }
    }

    /// One draw from the stationary marginal law, independent of everything.
    fn sample_marginal<R: Rng>(&self, rng: &mut R) -> Result<f64> {
        match self {
            ModelSpec::Iid { law } => Ok(law.sample(rng)),
            ModelSpec::MovingMaxima { order, base } => {
                Ok((0..*order).map(|_| base.sample(rng)).fold(0.0, f64::max))
            }
            ModelSpec::StochVol { noise, ar_coeffs, innovation_sd } => {
                let gamma = ar_stationary_covariances(ar_coeffs, *innovation_sd)?;
                let z: f64 = StandardNormal.sample(rng);
                Ok((gamma[0].sqrt() * z).exp() * noise.sample(rng))
            }
            ModelSpec::AssociatedIid { of } => of.sample_marginal(rng),
        }
    }

    /// The associated independent sequence: i.i.d. with the same marginal.
    pub fn associated_iid(&self) -> ModelSpec {
        match self {
            ModelSpec::Iid { .. } | ModelSpec::AssociatedIid { .. } => self.clone(),
            other => ModelSpec::AssociatedIid { of: Box::new(other.clone()) },
        }
    }
}

/// Stationary autocovariances `gamma_0..gamma_p` of a causal Gaussian AR(p)
/// `y_t = sum phi_j y_{t-j} + eps_t`, solved from the Yule-Walker equations.
///
/// Errors when the coefficients leave the stationarity region (the solved
/// covariance fails to be positive definite).
pub fn ar_stationary_covariances(phi: &[f64], sd: f64) -> Result<Vec<f64>> {
    let p = phi.len();
    if sd == 0.0 {
        return Ok(vec![0.0; p + 1]);
    }
    if p == 0 {
        return Ok(vec![sd * sd]);
    }
    // unknowns gamma_0..gamma_p:
    //   gamma_k - sum_j phi_j gamma_{|k-j|} = sd^2 * 1{k=0},  k = 0..p
    let dim = p + 1;
    let mut a = vec![vec![0.0; dim]; dim];
    let mut b = vec![0.0; dim];
    for k in 0..dim {
        a[k][k] += 1.0;
        for (j, &c) in phi.iter().enumerate() {
            a[k][(k as i64 - (j + 1) as i64).unsigned_abs() as usize] -= c;
        }
        b[k] = if k == 0 { sd * sd } else { 0.0 };
    }
    let gamma = solve_linear(a, b)
        .ok_or_else(|| Error::Config("AR coefficients are not stationary (singular Yule-Walker system)".into()))?;
    if !(gamma[0].is_finite() && gamma[0] > 0.0) {
        return Err(Error::Config("AR coefficients are not stationary (nonpositive variance)".into()));
    }
    // the p x p Toeplitz covariance of the initial state must be PD
    let toeplitz: Vec<Vec<f64>> = (0..p)
        .map(|i| (0..p).map(|j| gamma[(i as i64 - j as i64).unsigned_abs() as usize]).collect())
        .collect();
    cholesky(&toeplitz)
        .ok_or_else(|| Error::Config("AR coefficients are not stationary (covariance not positive definite)".into()))?;
    Ok(gamma)
}

/// Exact stationary sample of the Gaussian AR(p): the first `p` values are
/// drawn from the stationary multivariate normal, the rest by recursion.
fn sample_stationary_ar<R: Rng>(phi: &[f64], sd: f64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let p = phi.len();
    if sd == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let gamma = ar_stationary_covariances(phi, sd)?;
    let mut out = Vec::with_capacity(n);
    if p > 0 {
        let toeplitz: Vec<Vec<f64>> = (0..p)
            .map(|i| (0..p).map(|j| gamma[(i as i64 - j as i64).unsigned_abs() as usize]).collect())
            .collect();
        let chol = cholesky(&toeplitz).expect("validated in ar_stationary_covariances");
        let z: Vec<f64> = (0..p).map(|_| StandardNormal.sample(rng)).collect();
        for i in 0..p.min(n) {
            let v: f64 = (0..=i).map(|j| chol[i][j] * z[j]).sum();
            out.push(v);
        }
    }
    while out.len() < n {
        let t = out.len();
        let mean: f64 = phi.iter().enumerate().map(|(j, &c)| c * out[t - 1 - j]).sum();
        let z: f64 = StandardNormal.sample(rng);
        out.push(mean + sd * z);
    }
    Ok(out)
}

fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if d <= 0.0 {
                    return None;
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}
