//! Random symmetric descriptor realizations for tests and sweeps.

use rand::Rng;

use super::linrep::is_minimal;
use super::realization::Realization;
use crate::matkit::sample::{sample_herm, sample_unitary};
use crate::matkit::{hermitian_part, min_eig, real};
use crate::{CMat, CVec};

/// Random minimal realization of size `e` with `h` a-letters, `g` x-letters
/// and `rank(T) = k`. `J` is a signature matrix with `V_T* J V_T ≻ 0`, so
/// the origin lies in the positive domain.
pub fn random_smr(e: usize, h: usize, g: usize, k: usize, rng: &mut impl Rng) -> Realization {
    assert!(k <= e && (g > 0 || k == 0), "invalid rank");
    for _ in 0..200 {
        let u = sample_unitary(e, rng);
        let v = u.columns(0, k).into_owned();
        let j = loop {
            let w = sample_unitary(e, rng);
            let pos = rng.random_range(k..=e);
            let d = nalgebra::DVector::from_fn(e, |i, _| real(if i < pos { 1.0 } else { -1.0 }));
            let j = hermitian_part(&(&w * CMat::from_diagonal(&d) * w.adjoint()));
            if k == 0 || min_eig(&hermitian_part(&(v.adjoint() * &j * &v))) > 0.2 {
                break j;
            }
        };
        let s: Vec<CMat> = (0..h).map(|_| sample_herm(e, 1.0, rng)).collect();
        let t: Vec<CMat> = (0..g).map(|_| hermitian_part(&(&v * sample_herm(k, 1.0, rng) * v.adjoint()))).collect();
        let c = CVec::from_iterator(e, crate::matkit::sample::sample_gaussian(e, 1, rng).iter().copied());
        let r = Realization::new(j, s, t, c, None).expect("well-formed");
        if r.range_t_frame().k() == k && is_minimal(&r).unwrap_or(false) {
            let mut r = r;
            r.minimal = true;
            return r;
        }
    }
    panic!("could not draw a minimal realization");
}

/// Scaled so that `‖Σ S‖, ‖Σ T‖ ≲ 1`: points of norm `< 0.5` stay comfortably in the domain.
pub fn sample_scale(r: &Realization) -> f64 {
    let tot: f64 = r.s.iter().chain(&r.t).map(crate::matkit::spectral_norm).sum();
    0.5 / tot.max(1.0)
}
