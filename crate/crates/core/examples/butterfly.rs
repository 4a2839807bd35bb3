//! Butterfly decompositions: the polynomial one for `x a x + x^2`, and the
//! caterpillar terms of a realization summing to its value.

use ncconvex::matkit::sample::{rng_from_seed, sample_tuple};
use ncconvex::ncalg::{parse_poly, to_text, VarContext};
use ncconvex::realize::{caterpillar, poly_butterfly};

fn main() -> ncconvex::Result<()> {
    let ctx = VarContext::with_names(&["a"], &["x"])?;
    let p = parse_poly("x a x + x^2", Some(&ctx))?;
    let b = poly_butterfly(&p)?;
    println!("k = {}, residual {:.1e}", b.frame.k(), b.residual);
    println!("f̄ = {}", to_text(&b.fbar)?);

    let mut rng = rng_from_seed(2);
    let t = sample_tuple(2, 1, 1, 0.5, &mut rng);
    let c = caterpillar(&b.realization, &t)?;
    let v = b.realization.eval(&t)?;
    println!("caterpillar sum vs value: {:.2e}", (c.total() - v).camax());

    let quartic = parse_poly("x^4", Some(&ctx))?;
    println!("x^4: {}", poly_butterfly(&quartic).err().map(|e| e.to_string()).unwrap_or_default());
    Ok(())
}
