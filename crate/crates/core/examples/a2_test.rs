//! Convexity through the doubling and reducing constructions of `a²`-type tests.

use ncconvex::ncalg::{parse_poly, VarContext};
use ncconvex::partialcvx::{a2_convexity_test, RegionSpec, SampleConfig};
use ncconvex::realize::linearize_poly;

fn main() -> ncconvex::Result<()> {
    let ctx = VarContext::with_names(&["a"], &["x"])?;
    let cfg = SampleConfig { sizes: vec![1, 2], samples: 30, seed: 4, ..Default::default() };
    for src in ["x a^2 x + x^2", "x^4 + a"] {
        let r = linearize_poly(&parse_poly(src, Some(&ctx))?)?;
        let rep = a2_convexity_test(&r, &RegionSpec::domain(1.0), &cfg)?;
        println!(
            "{src}: a2-convex {}, verdict {:?}, constructions agree {}",
            rep.a2_convex(),
            rep.verdict,
            rep.agrees
        );
    }
    Ok(())
}
