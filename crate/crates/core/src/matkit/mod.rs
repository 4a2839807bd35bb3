//! Dense Hermitian numerical kernel.

mod complete;
pub mod json;
mod kron;
mod psd;
pub mod sample;
mod schur;
mod signature;

pub use complete::{psd_complete, CompletionResult, LinearConstraint};
pub use kron::{build_embedding_e, khatri_rao, kron, BlockMatrix2};
pub use psd::{eigh, is_psd, min_eig, sqrt_psd, PsdReport, Verdict};
pub use schur::{schur_complement, Eliminate};
pub use signature::signature_decompose;

use nalgebra::{ComplexField, DMatrix, Dyn, SVD};

use crate::{CMat, C64};

/// Full SVD whose factors are checked against `m`.
///
/// The bidiagonal solver occasionally returns factors that do not recompose
/// to the input, or whose singular vectors are not orthonormal, on sparse
/// rank-deficient matrices. The adjoint and reflected copies are tried in
/// turn and the most accurate factorization wins.
pub fn checked_svd<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> SVD<T, Dyn, Dyn> {
    let scale = m.norm().max(1e-300);
    let tol = 1e-11;
    // relative recomposition error plus loss of orthonormality in U and V
    let orth = |q: &Option<DMatrix<T>>, left: bool| match q {
        Some(q) => {
            let g = if left { q.adjoint() * q } else { q * q.adjoint() };
            (g - DMatrix::<T>::identity(q.ncols().min(q.nrows()), q.ncols().min(q.nrows()))).norm()
        }
        None => f64::INFINITY,
    };
    let err = |s: &SVD<T, Dyn, Dyn>| match s.clone().recompose() {
        Ok(r) => (r - m).norm() / scale + orth(&s.u, true) + orth(&s.v_t, false),
        Err(_) => f64::INFINITY,
    };
    let direct = SVD::new(m.clone(), true, true);
    let mut best_err = err(&direct);
    if best_err <= tol {
        return direct;
    }
    let mut best = direct;
    let t = SVD::new(m.adjoint(), true, true);
    let flipped = SVD {
        u: t.v_t.as_ref().map(|v| v.adjoint()),
        v_t: t.u.as_ref().map(|u| u.adjoint()),
        singular_values: t.singular_values.clone(),
    };
    let e = err(&flipped);
    if e < best_err {
        (best, best_err) = (flipped, e);
    }
    // two-sided Householder reflections H = I − 2ww*/|w|², so m = Hl (Hl m Hr) Hr
    let reflector = |n: usize, c: f64| {
        let w = DMatrix::<T>::from_fn(n, 1, |i, _| T::from_real(1.0 + c * i as f64 + 0.1 * (c * i as f64).sin()));
        DMatrix::<T>::identity(n, n) - (&w * w.adjoint()) * T::from_real(2.0 / w.norm_squared())
    };
    for (k, c) in [0.37, -0.61, 1.13, 0.23, -1.7, 2.9].into_iter().enumerate() {
        if best_err <= tol {
            break;
        }
        let hl = reflector(m.nrows(), c);
        let hr = if k == 0 { DMatrix::<T>::identity(m.ncols(), m.ncols()) } else { reflector(m.ncols(), -0.5 * c) };
        let hs = SVD::new(&hl * m * &hr, true, true);
        let cand = SVD {
            u: hs.u.as_ref().map(|u| &hl * u),
            v_t: hs.v_t.as_ref().map(|v| v * &hr),
            singular_values: hs.singular_values.clone(),
        };
        let e = err(&cand);
        if e < best_err {
            (best, best_err) = (cand, e);
        }
    }
    best
}

/// `‖M − M*‖_F`.
pub fn hermitian_residual(m: &CMat) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    (m - m.adjoint()).norm()
}

/// `(M + M*)/2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn direct_sum(p: &CMat, q: &CMat) -> CMat {
    let mut out = CMat::zeros(p.nrows() + q.nrows(), p.ncols() + q.ncols());
    out.view_mut((0, 0), p.shape()).copy_from(p);
    out.view_mut(p.shape(), q.shape()).copy_from(q);
    out
}

/// Largest singular value (0 for empty matrices).
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    checked_svd(m).singular_values.max()
}

/// `(σ_min, σ_max)` of a square matrix.
pub fn singular_extremes(m: &CMat) -> (f64, f64) {
    if m.is_empty() {
        return (f64::INFINITY, 0.0);
    }
    let s = checked_svd(m).singular_values;
    (s.min(), s.max())
}

/// Invertibility test `σ_min > tol_inv · σ_max`.
pub fn is_invertible(m: &CMat, tol_inv: f64) -> bool {
    let (lo, hi) = singular_extremes(m);
    m.is_empty() || lo > tol_inv * hi
}

/// Orthonormal basis of the column space, rank decided by `σ_i > rtol · max(σ_1, 1e-300)`.
pub fn range_basis(m: &CMat, rtol: f64) -> CMat {
    if m.ncols() == 0 || m.nrows() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = checked_svd(m);
    let s = &svd.singular_values;
    let smax = s.max();
    if smax == 0.0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let r = s.iter().filter(|&&v| v > rtol * smax).count();
    svd.u.unwrap().columns(0, r).into_owned()
}

/// Orthonormal basis of the kernel of `m` (relative cutoff `rtol`).
pub fn kernel_basis(m: &CMat, rtol: f64) -> CMat {
    let n = m.ncols();
    if m.nrows() == 0 {
        return CMat::identity(n, n);
    }
    // kernel of m = orthogonal complement of range(m*)
    let r = range_basis(&m.adjoint(), rtol);
    complement_basis(&r)
}

/// Orthonormal basis of the orthogonal complement of the span of orthonormal columns `q`.
pub fn complement_basis(q: &CMat) -> CMat {
    let n = q.nrows();
    let k = q.ncols();
    if k == 0 {
        return CMat::identity(n, n);
    }
    if k >= n {
        return CMat::zeros(n, 0);
    }
    let p = CMat::identity(n, n) - q * q.adjoint();
    let b = range_basis(&p, 1e-8);
    b.columns(0, b.ncols().min(n - k)).into_owned()
}

/// Vertical stack of matrices with equal column counts.
pub fn vstack(parts: &[CMat]) -> CMat {
    let cols = parts.first().map(|m| m.ncols()).unwrap_or(0);
    let rows: usize = parts.iter().map(|m| m.nrows()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut r = 0;
    for m in parts {
        out.view_mut((r, 0), m.shape()).copy_from(m);
        r += m.nrows();
    }
    out
}

/// Horizontal stack of matrices with equal row counts.
pub fn hstack(parts: &[CMat]) -> CMat {
    let rows = parts.first().map(|m| m.nrows()).unwrap_or(0);
    let cols: usize = parts.iter().map(|m| m.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut c = 0;
    for m in parts {
        out.view_mut((0, c), m.shape()).copy_from(m);
        c += m.ncols();
    }
    out
}

pub fn real(v: f64) -> C64 {
    C64::new(v, 0.0)
}

/// Identity matrix, complex.
pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_range_are_complementary() {
        let m = CMat::from_row_slice(2, 3, &[real(1.0), real(0.0), real(1.0), real(0.0), real(1.0), real(0.0)]);
        let k = kernel_basis(&m, 1e-12);
        assert_eq!(k.ncols(), 1);
        assert!((&m * &k).norm() < 1e-12);
        let r = range_basis(&m.adjoint(), 1e-12);
        assert_eq!(r.ncols() + k.ncols(), 3);
    }

    #[test]
    fn checked_svd_recomposes() {
        let mut rng = sample::rng_from_seed(3);
        for (r, c) in [(4, 4), (6, 3), (3, 7)] {
            let mut m = sample::sample_gaussian(r, c, &mut rng);
            // sparse and rank deficient
            m.column_mut(0).fill(real(0.0));
            m.row_mut(r - 1).fill(real(0.0));
            let s = checked_svd(&m);
            assert!((s.recompose().unwrap() - &m).norm() < 1e-10);
        }
    }

    #[test]
    fn complement_of_projector_is_orthonormal() {
        let mut rng = sample::rng_from_seed(9);
        for n in 2..7 {
            for k in 1..n {
                let u = sample::sample_unitary(n, &mut rng);
                let q = u.columns(0, k).into_owned();
                let c = complement_basis(&q);
                let full = hstack(&[q, c]);
                assert!((full.adjoint() * &full - eye(n)).camax() < 1e-10);
            }
        }
    }
}
