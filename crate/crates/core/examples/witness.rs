//! A doubled-size negativity witness for `x^4`, written to JSON and checked again from it.

use ncconvex::matkit::min_eig;
use ncconvex::matkit::sample::{rng_from_seed, sample_tuple};
use ncconvex::ncalg::{parse_poly, VarContext};
use ncconvex::partialcvx::{negativity_witness, ConvexityWitness, RegionSpec};
use ncconvex::realize::linearize_poly;

fn main() -> ncconvex::Result<()> {
    let ctx = VarContext::x_only(&["x"])?;
    let r = linearize_poly(&parse_poly("x^4", Some(&ctx))?)?;
    let mut rng = rng_from_seed(0);
    let bad = loop {
        let t = sample_tuple(2, 0, 1, 2.0, &mut rng);
        if r.in_dom(&t) && min_eig(&r.r_t(&t)?) < -1e-3 {
            break t;
        }
    };
    let w = negativity_witness(&r, &bad, &RegionSpec::domain(1.0), &mut rng)?;
    println!("witness at size {}: η* r_xx η = {:.3e}", w.point.n, w.value);
    let json = serde_json::to_string(&w)?;
    let back: ConvexityWitness = serde_json::from_str(&json)?;
    println!("re-verified from {} bytes of JSON: {:.3e}", json.len(), back.reverify(&r)?);
    Ok(())
}
