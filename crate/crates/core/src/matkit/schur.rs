use super::{hermitian_part, is_invertible};
use crate::error::{Error, Result};
use crate::tol::TOL_INV;
use crate::CMat;

/// Which diagonal block is eliminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eliminate {
    /// `M11 − M12 M22⁻¹ M21`
    Block22,
    /// `M22 − M21 M11⁻¹ M12`
    Block11,
}

/// Schur complement of a square matrix split after `k` rows/columns.
pub fn schur_complement(m: &CMat, k: usize, which: Eliminate) -> Result<CMat> {
    let n = m.nrows();
    if m.ncols() != n || k > n {
        return Err(Error::Shape(format!("schur split {k} of {:?}", m.shape())));
    }
    let m11 = m.view((0, 0), (k, k)).into_owned();
    let m12 = m.view((0, k), (k, n - k)).into_owned();
    let m21 = m.view((k, 0), (n - k, k)).into_owned();
    let m22 = m.view((k, k), (n - k, n - k)).into_owned();
    let (keep, off_l, inv_blk, off_r) = match which {
        Eliminate::Block22 => (m11, m12, m22, m21),
        Eliminate::Block11 => (m22, m21, m11, m12),
    };
    if !is_invertible(&inv_blk, TOL_INV) {
        return Err(Error::Singular("complemented block".into()));
    }
    let inv = inv_blk.try_inverse().ok_or_else(|| Error::Singular("complemented block".into()))?;
    let s = keep - off_l * inv * off_r;
    let herm = (m - m.adjoint()).norm() <= 1e-12 * m.norm().max(1.0);
    Ok(if herm { hermitian_part(&s) } else { s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::sample::{rng_from_seed, sample_gaussian};
    use crate::matkit::{direct_sum, eye};

    #[test]
    fn block_diagonal_and_identity_cases() {
        let mut rng = rng_from_seed(5);
        let a = sample_gaussian(2, 2, &mut rng);
        let a = &a + a.adjoint();
        let m = direct_sum(&a, &eye(3));
        assert!((schur_complement(&m, 2, Eliminate::Block22).unwrap() - &a).norm() < 1e-14);
        let b = sample_gaussian(2, 3, &mut rng);
        let mut full = CMat::zeros(5, 5);
        full.view_mut((0, 0), (2, 2)).copy_from(&a);
        full.view_mut((0, 2), (2, 3)).copy_from(&b);
        full.view_mut((2, 0), (3, 2)).copy_from(&b.adjoint());
        full.view_mut((2, 2), (3, 3)).copy_from(&eye(3));
        let s = schur_complement(&full, 2, Eliminate::Block22).unwrap();
        assert!((s - (&a - &b * b.adjoint())).norm() < 1e-12);
    }

    #[test]
    fn determinant_identity() {
        let mut rng = rng_from_seed(6);
        for _ in 0..10 {
            let g = sample_gaussian(5, 5, &mut rng);
            let m = g.adjoint() * &g + eye(5);
            let s = schur_complement(&m, 2, Eliminate::Block22).unwrap();
            let d22 = m.view((2, 2), (3, 3)).into_owned().determinant();
            let lhs = m.determinant();
            assert!((lhs - d22 * s.determinant()).norm() < 1e-9 * lhs.norm());
        }
    }

    #[test]
    fn singular_block() {
        let m = direct_sum(&eye(2), &CMat::zeros(2, 2));
        assert!(matches!(schur_complement(&m, 2, Eliminate::Block22), Err(Error::Singular(_))));
    }
}
