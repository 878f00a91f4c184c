//! Block and window schedules under different mixing-rate assumptions:
//! r_n and p_n grow sublinearly, and the mixing term takes over when the
//! coefficients decay slowly.

use maxlim::estimators::{default_l_of_n, default_q_of_n, pn_schedule, rn_schedule, MixingRate};

fn main() -> maxlim::Result<()> {
    let rates = [
        ("zero (iid)", MixingRate::Zero),
        ("geometric c=1 rho=0.5", MixingRate::Geometric { c: 1.0, rho: 0.5 }),
        ("geometric c=1 rho=0.95", MixingRate::Geometric { c: 1.0, rho: 0.95 }),
    ];
    for (name, rate) in &rates {
        println!("{name}:");
        println!("  {:>10} {:>10} {:>10} {:>8} {:>8}", "n", "r_n", "p_n", "r_n/n", "p_n/n");
        for k in 3..=7u32 {
            let n = 10u64.pow(k);
            let r = rn_schedule(n, rate, default_l_of_n)?;
            let p = pn_schedule(n, default_q_of_n(n), rate)?;
            println!(
                "  {n:>10} {r:>10} {p:>10} {:>8.4} {:>8.4}",
                r as f64 / n as f64,
                p as f64 / n as f64
            );
        }
    }
    Ok(())
}
