//! Simulates extremal-process paths from their Poisson representation and
//! compares the empirical endpoint law and a two-point joint probability
//! against the closed forms.

use maxlim::extremal::{extremal_path, ExtremalLaw};
use maxlim::verify::ks_stat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> maxlim::Result<()> {
    let law = ExtremalLaw::new(1.0, 0.0)?;
    let eps = 0.05; // points below eps barely matter for levels >= 1
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    let reps = 20_000;
    let mut endpoints = Vec::with_capacity(reps);
    let mut joint_hits = 0usize;
    for _ in 0..reps {
        let pm = law.sample_poisson_pp(eps, &mut rng)?;
        let path = extremal_path(&pm);
        endpoints.push(path.endpoint());
        if path.eval(0.5)? <= 2.0 && path.endpoint() <= 1.0 {
            joint_hits += 1;
        }
    }

    let ks = ks_stat(&endpoints, |x| if x <= eps { 0.0 } else { (-1.0 / x).exp() })?;
    println!("endpoint KS vs exp(-1/x):          {ks:.4}");

    let joint = joint_hits as f64 / reps as f64;
    let closed = law.fdd_cdf(&[0.5, 1.0], &[2.0, 1.0])?;
    println!("P(M(0.5) <= 2, M(1) <= 1):         {joint:.4}");
    println!("closed form (= exp(-1)):           {closed:.4}");
    Ok(())
}
