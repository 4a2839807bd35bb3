use nalgebra::{DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{hermitian_part, hermitian_residual};
use crate::error::{Error, Result};
use crate::tol::TOL_HERM;
use crate::{CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    PD,
    PSD,
    Indefinite,
    ND,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub verdict: Verdict,
    pub tol_used: f64,
}

impl PsdReport {
    pub fn is_psd(&self) -> bool {
        matches!(self.verdict, Verdict::PD | Verdict::PSD)
    }

    pub fn is_pd(&self) -> bool {
        self.verdict == Verdict::PD
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(m: &CMat) -> (DVector<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), CMat::zeros(0, 0));
    }
    let h = hermitian_part(m);
    let scale = h.norm().max(1e-300);
    let err = |e: &SymmetricEigen<C64, nalgebra::Dyn>| {
        let v = &e.eigenvectors;
        (e.recompose() - &h).norm() / scale + (v.adjoint() * v - CMat::identity(n, n)).norm()
    };
    let mut e = SymmetricEigen::new(h.clone());
    let mut best = err(&e);
    // same safeguard as `checked_svd`: retry on unitarily reflected copies
    for c in [0.37, -0.61, 1.13, 0.23, -1.7, 2.9] {
        if best <= 1e-11 {
            break;
        }
        let w = CMat::from_fn(n, 1, |i, _| C64::new(1.0 + c * i as f64 + 0.1 * (c * i as f64).sin(), 0.0));
        let q = CMat::identity(n, n) - (&w * w.adjoint()) * C64::new(2.0 / w.norm_squared(), 0.0);
        let mut f = SymmetricEigen::new(hermitian_part(&(&q * &h * &q)));
        f.eigenvectors = &q * &f.eigenvectors;
        let ef = err(&f);
        if ef < best {
            (e, best) = (f, ef);
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
    let vals = DVector::from_iterator(n, idx.iter().map(|&i| e.eigenvalues[i]));
    let mut vecs = CMat::zeros(n, n);
    for (k, &i) in idx.iter().enumerate() {
        vecs.set_column(k, &e.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Smallest eigenvalue of the Hermitian part (`+∞` when empty).
pub fn min_eig(m: &CMat) -> f64 {
    if m.is_empty() {
        return f64::INFINITY;
    }
    eigh(m).0[0]
}

/// PSD verdict with scale `s = max(1, spectral radius)`.
///
/// PD if `λ_min > tol·s`, PSD if `λ_min ≥ −tol·s`, ND if `λ_max < −tol·s`.
/// The empty matrix is PD.
pub fn is_psd(m: &CMat, tol: f64) -> Result<PsdReport> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!("is_psd on {:?}", m.shape())));
    }
    if m.is_empty() {
        return Ok(PsdReport { lambda_min: f64::INFINITY, lambda_max: f64::NEG_INFINITY, verdict: Verdict::PD, tol_used: tol });
    }
    let r = hermitian_residual(m);
    if r > TOL_HERM * m.norm().max(1.0) {
        return Err(Error::Hermitian(r));
    }
    let (vals, _) = eigh(m);
    let lo = vals[0];
    let hi = vals[vals.len() - 1];
    let s = lo.abs().max(hi.abs()).max(1.0);
    let verdict = if lo > tol * s {
        Verdict::PD
    } else if lo >= -tol * s {
        Verdict::PSD
    } else if hi < -tol * s {
        Verdict::ND
    } else {
        Verdict::Indefinite
    };
    Ok(PsdReport { lambda_min: lo, lambda_max: hi, verdict, tol_used: tol })
}

/// Positive semidefinite square root; eigenvalues within tolerance below zero are clamped.
pub fn sqrt_psd(m: &CMat, tol: f64) -> Result<CMat> {
    let rep = is_psd(m, tol)?;
    if !rep.is_psd() {
        return Err(Error::Domain(format!("square root of an indefinite matrix (λ_min = {:.3e})", rep.lambda_min)));
    }
    if m.is_empty() {
        return Ok(m.clone());
    }
    let (vals, vecs) = eigh(m);
    let d = CMat::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|&v| C64::new(v.max(0.0).sqrt(), 0.0))));
    Ok(hermitian_part(&(&vecs * d * vecs.adjoint())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::real;
    use crate::matkit::sample::{rng_from_seed, sample_gaussian};
    use crate::tol::{TOL_PSD, TOL_SQRT};

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| real(x))))
    }

    #[test]
    fn verdicts() {
        assert_eq!(is_psd(&CMat::identity(3, 3), TOL_PSD).unwrap().verdict, Verdict::PD);
        assert_eq!(is_psd(&diag(&[1.0, 0.0]), TOL_PSD).unwrap().verdict, Verdict::PSD);
        assert_eq!(is_psd(&diag(&[1.0, -1e-3]), TOL_PSD).unwrap().verdict, Verdict::Indefinite);
        assert_eq!(is_psd(&diag(&[-1.0, -2.0]), TOL_PSD).unwrap().verdict, Verdict::ND);
        assert!(is_psd(&CMat::zeros(0, 0), TOL_PSD).unwrap().is_pd());
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMat::from_row_slice(2, 2, &[real(1.0), real(1.0), real(0.0), real(1.0)]);
        assert!(matches!(is_psd(&m, TOL_PSD), Err(Error::Hermitian(_))));
    }

    #[test]
    fn square_roots() {
        assert_eq!(sqrt_psd(&CMat::identity(2, 2), TOL_PSD).unwrap(), CMat::identity(2, 2));
        let r = sqrt_psd(&diag(&[4.0, 9.0]), TOL_PSD).unwrap();
        assert!((r - diag(&[2.0, 3.0])).norm() < 1e-14);
        let mut rng = rng_from_seed(11);
        for _ in 0..20 {
            let g = sample_gaussian(4, 4, &mut rng);
            let m = g.adjoint() * &g;
            let r = sqrt_psd(&m, TOL_PSD).unwrap();
            assert!((&r * &r - &m).norm() <= TOL_SQRT * m.norm());
            assert!(is_psd(&r, TOL_PSD).unwrap().is_psd());
        }
        assert!(matches!(sqrt_psd(&diag(&[1.0, -1.0]), TOL_PSD), Err(Error::Domain(_))));
    }
}
