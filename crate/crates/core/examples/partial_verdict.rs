//! Sampled x-partial convexity of the square example on and off its region.

use ncconvex::cli::square_partial;
use ncconvex::partialcvx::SampleConfig;

fn main() -> ncconvex::Result<()> {
    let cfg = SampleConfig { sizes: vec![1, 2, 3], samples: 100, seed: 0, ..Default::default() };
    let inside = square_partial("x", "1 - 3 x^2; 1 - 3 y^2", false, &cfg)?;
    println!("on the region: {:?}", inside.outcome);
    for s in &inside.per_size {
        println!("  n = {}: {} points, min Hessian eig {:.3e}", s.n, s.accepted, s.min_hessian_eig);
    }
    let outside = square_partial("x", "1 - 3 y^2", true, &cfg)?;
    let w = outside.hessian_witness.as_ref().map(|w| w.lambda_min);
    println!("where 1 - 3y^2 fails: {:?}, Hessian witness λ = {w:?}", outside.outcome);
    Ok(())
}
