use nalgebra::DVector;

use super::eigh;
use crate::error::{Error, Result};
use crate::tol::TOL_INV;
use crate::{CMat, C64};

/// Returns `(J, C)` with `C* H C = J`, `J = diag(±1)` (positive entries first).
///
/// `C = U |Λ|^{-1/2}` from `H = U Λ U*`, eigenvalues ordered descending.
pub fn signature_decompose(h: &CMat) -> Result<(CMat, CMat)> {
    let n = h.nrows();
    let (vals, vecs) = eigh(h);
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    if vals.iter().any(|v| v.abs() <= TOL_INV * scale) {
        return Err(Error::Singular("signature decomposition of a near-singular Hermitian matrix".into()));
    }
    let order: Vec<usize> = (0..n).rev().collect();
    let mut c = CMat::zeros(n, n);
    let mut j = DVector::<C64>::zeros(n);
    for (k, &i) in order.iter().enumerate() {
        let lam = vals[i];
        c.set_column(k, &(vecs.column(i) * C64::new(1.0 / lam.abs().sqrt(), 0.0)));
        j[k] = C64::new(lam.signum(), 0.0);
    }
    Ok((CMat::from_diagonal(&j), c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::real;
    use crate::matkit::sample::{rng_from_seed, sample_herm};

    #[test]
    fn identity_and_diagonal() {
        let (j, c) = signature_decompose(&CMat::identity(2, 2)).unwrap();
        assert_eq!(j, CMat::identity(2, 2));
        assert!((c.adjoint() * &c - CMat::identity(2, 2)).norm() < 1e-15);
        let h = CMat::from_diagonal(&DVector::from_vec(vec![real(4.0), real(-9.0)]));
        let (j, c) = signature_decompose(&h).unwrap();
        assert_eq!(j, CMat::from_diagonal(&DVector::from_vec(vec![real(1.0), real(-1.0)])));
        assert!((c[(0, 0)].norm() - 0.5).abs() < 1e-15 && (c[(1, 1)].norm() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn reconstruction() {
        let mut rng = rng_from_seed(9);
        for n in 1..6 {
            let h = sample_herm(n, 3.0, &mut rng);
            let (j, c) = signature_decompose(&h).unwrap();
            assert_eq!(&j * &j, CMat::identity(n, n));
            assert!((c.adjoint() * &h * &c - &j).norm() < 1e-10);
        }
        assert!(signature_decompose(&CMat::zeros(2, 2)).is_err());
    }
}
