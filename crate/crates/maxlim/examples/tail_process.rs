//! Empirical tail process: conditioned on a large value now, how likely is
//! another large value at a given lag? Independence makes every lag
//! degenerate; moving maxima of order m spread mass over m lags.

use maxlim::estimators::tail_process_est;
use maxlim::models::{ModelSpec, TailLaw};

fn main() -> maxlim::Result<()> {
    let n = 1_000_000;
    let models = [
        ("iid frechet(1)", ModelSpec::Iid { law: TailLaw::Frechet { alpha: 1.0 } }),
        ("mm(2)", ModelSpec::MovingMaxima { order: 2, base: TailLaw::Frechet { alpha: 1.0 } }),
        ("mm(3)", ModelSpec::MovingMaxima { order: 3, base: TailLaw::Frechet { alpha: 1.0 } }),
    ];
    println!("{:<16} {:>8} {:>8} {:>8} {:>8}", "model", "lag 1", "lag 2", "lag 3", "lag 4");
    for (name, spec) in &models {
        let sample = spec.sample(n, 3)?;
        let mut sorted = sample.values.clone();
        sorted.sort_by(f64::total_cmp);
        let threshold = sorted[(0.999 * n as f64) as usize];
        let mut row = format!("{name:<16}");
        for lag in 1..=4 {
            let est = tail_process_est(&sample, lag, 1.0, threshold)?;
            row.push_str(&format!(" {:>8.3}", est.value));
        }
        println!("{row}");
    }
    Ok(())
}
