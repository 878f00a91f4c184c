//! J1 and M1 distances between step functions, and the J1 oscillation: a
//! single jump split into two nearby half-jumps is far in J1 but close in M1.

use maxlim::cadlag::{d_j1, d_m1_monotone, j1_oscillation, StepFunction};

fn main() -> maxlim::Result<()> {
    let one_jump = StepFunction::new(0.0, vec![(0.5, 2.0)])?;
    let split = StepFunction::new(0.0, vec![(0.49, 1.0), (0.51, 2.0)])?;
    let shifted = StepFunction::new(0.0, vec![(0.52, 2.0)])?;

    println!("d_j1(one jump, split jump)    = {:.4}", d_j1(&one_jump, &split));
    println!("d_m1(one jump, split jump)    = {:.4}", d_m1_monotone(&one_jump, &split)?);
    println!("d_j1(one jump, shifted jump)  = {:.4}", d_j1(&one_jump, &shifted));
    println!("d_m1(one jump, shifted jump)  = {:.4}", d_m1_monotone(&one_jump, &shifted)?);

    // the oscillation sees the two large increments of the split path once
    // the window covers both jump times
    for delta in [0.01, 0.05, 0.2] {
        println!(
            "oscillation(split, delta={delta:<4}) = {:.4}   (one jump: {:.4})",
            j1_oscillation(&split, delta),
            j1_oscillation(&one_jump, delta)
        );
    }
    Ok(())
}
