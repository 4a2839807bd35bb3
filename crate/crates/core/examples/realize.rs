//! Linearize a polynomial, minimize the realization and recover a hidden state-space similarity.

use ncconvex::matkit::sample::{rng_from_seed, sample_gaussian, sample_tuple};
use ncconvex::matkit::{eye, real};
use ncconvex::ncalg::{parse_poly, VarContext};
use ncconvex::realize::{linearize_poly, minimize, state_space_similarity};

fn main() -> ncconvex::Result<()> {
    let ctx = VarContext::with_names(&["a"], &["x"])?;
    let p = parse_poly("x a x + a x + x a + x^2 + 1", Some(&ctx))?;
    let lin = linearize_poly(&p)?;
    let r = minimize(&lin)?;
    println!("linearization size {}, minimal size {}", lin.e(), r.e());

    let mut rng = rng_from_seed(1);
    let t = sample_tuple(3, 1, 1, 0.5, &mut rng);
    println!("|r(A,X) - p(A,X)| = {:.2e}", (r.eval(&t)? - p.eval(&t)?).camax());

    // same function, different coordinates
    let g = sample_gaussian(r.e(), r.e(), &mut rng) + eye(r.e()) * real(2.0);
    let mut twin = r.congruence(&g)?;
    twin.minimal = true;
    let sim = state_space_similarity(&r, &twin)?;
    println!("similarity residual {:.2e}", sim.max_residual());
    Ok(())
}
