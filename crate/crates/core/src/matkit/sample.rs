//! Seeded Hermitian samplers.
//!
//! Parallel loops derive one generator per sample from `(seed, stream, index)`
//! so results do not depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::spectral_norm;
use crate::ncalg::HermTuple;
use crate::{CMat, C64};

pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for sample `index` of `stream`.
pub fn derived_rng(seed: u64, stream: u64, index: u64) -> SampleRng {
    rng_from_seed(splitmix(splitmix(seed ^ splitmix(stream)) ^ index))
}

/// Entries i.i.d. standard complex Gaussian (`E|z|² = 1`).
pub fn sample_gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(s * re, s * im)
    })
}

/// Gaussian Hermitian matrix rescaled to spectral norm `r ≤ scale`, `r` uniform on `[0, scale]`.
pub fn sample_herm(n: usize, scale: f64, rng: &mut impl Rng) -> CMat {
    let mut h = CMat::zeros(n, n);
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        h[(i, i)] = C64::new(d, 0.0);
        for j in i + 1..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    let radius: f64 = scale * rng.random::<f64>();
    let nrm = spectral_norm(&h);
    if nrm == 0.0 || scale == 0.0 {
        return CMat::zeros(n, n);
    }
    h * C64::new(radius / nrm, 0.0)
}

/// Hermitian matrix with spectral norm exactly `scale` (up to rounding).
pub fn sample_herm_on_sphere(n: usize, scale: f64, rng: &mut impl Rng) -> CMat {
    let h = sample_herm(n, 1.0, rng);
    let nrm = spectral_norm(&h);
    if nrm == 0.0 {
        return h;
    }
    h * C64::new(scale / nrm, 0.0)
}

/// `h` a-class and `g` x-class Hermitian matrices of size `n`.
pub fn sample_tuple(n: usize, h: usize, g: usize, scale: f64, rng: &mut impl Rng) -> HermTuple {
    let a = (0..h).map(|_| sample_herm(n, scale, rng)).collect();
    let x = (0..g).map(|_| sample_herm(n, scale, rng)).collect();
    HermTuple { n, a, x }
}

/// Haar-ish unitary from the QR factor of a Gaussian matrix.
pub fn sample_unitary(n: usize, rng: &mut impl Rng) -> CMat {
    sample_gaussian(n, n, rng).qr().q()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::hermitian_residual;

    #[test]
    fn zero_scale_is_zero() {
        let mut rng = rng_from_seed(0);
        assert_eq!(sample_herm(3, 0.0, &mut rng), CMat::zeros(3, 3));
    }

    #[test]
    fn deterministic() {
        let a = sample_herm(4, 1.0, &mut rng_from_seed(42));
        let b = sample_herm(4, 1.0, &mut rng_from_seed(42));
        assert_eq!(a, b);
        assert_eq!(sample_herm(2, 1.0, &mut derived_rng(1, 2, 3)), sample_herm(2, 1.0, &mut derived_rng(1, 2, 3)));
        assert_ne!(sample_herm(2, 1.0, &mut derived_rng(1, 2, 3)), sample_herm(2, 1.0, &mut derived_rng(1, 2, 4)));
    }

    #[test]
    fn norm_bound_over_many_draws() {
        let mut rng = rng_from_seed(7);
        for k in 0..1000 {
            let n = 1 + k % 5;
            let h = sample_herm(n, 0.7, &mut rng);
            assert!(spectral_norm(&h) <= 0.7 * (1.0 + 1e-12));
            assert!(hermitian_residual(&h) == 0.0);
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let u = sample_unitary(4, &mut rng_from_seed(3));
        assert!((u.adjoint() * &u - CMat::identity(4, 4)).norm() < 1e-12);
    }
}
