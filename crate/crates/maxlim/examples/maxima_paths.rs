//! Builds the partial maxima process of one sample, truncates it, and shows
//! the commuting square with the time-space point process: applying the
//! maximum functional to the point process reproduces the truncated maxima
//! path exactly.

use maxlim::maxima::{build_maxima, build_point_process, max_functional, truncate_maxima};
use maxlim::models::{ModelSpec, TailLaw};

fn main() -> maxlim::Result<()> {
    let spec = ModelSpec::Iid { law: TailLaw::Frechet { alpha: 1.0 } };
    let n = 1000;
    let sample = spec.sample(n, 7)?;
    let a_n = spec.theoretical_an(n)?;

    let m_n = build_maxima(&sample, a_n)?;
    println!("M_n has {} jumps, endpoint {:.4}", m_n.jumps().len(), m_n.endpoint());

    let u = 0.3;
    let truncated = truncate_maxima(&m_n, u)?;
    println!("M_n^u (u = {u}) has {} jumps", truncated.jumps().len());

    let via_points = max_functional(&build_point_process(&sample, a_n), u);
    assert_eq!(via_points, truncated, "maximum functional commutes with truncation");
    println!("max functional o point process == truncation o maxima");

    print!("\ntruncated path as CSV:\n{}", truncated.to_csv());
    Ok(())
}
