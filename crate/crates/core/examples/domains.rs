//! Domain and positive-domain membership of a random symmetric minimal realization.

use ncconvex::matkit::min_eig;
use ncconvex::matkit::sample::{rng_from_seed, sample_tuple};
use ncconvex::realize::random::{random_smr, sample_scale};

fn main() {
    let mut rng = rng_from_seed(5);
    let r = random_smr(4, 1, 1, 2, &mut rng);
    let s = sample_scale(&r);
    let (mut dom, mut plus) = (0, 0);
    for _ in 0..200 {
        let t = sample_tuple(2, 1, 1, 6.0 * s, &mut rng);
        if r.in_dom(&t) {
            dom += 1;
            plus += usize::from(r.in_dom_plus(&t));
        }
    }
    println!("of 200 wide samples: {dom} in the domain, {plus} in the positive domain");
    let origin = sample_tuple(2, 1, 1, 0.0, &mut rng);
    println!("λ_min(R_T) at the origin: {:.3}", min_eig(&r.r_t(&origin).unwrap()));
}
