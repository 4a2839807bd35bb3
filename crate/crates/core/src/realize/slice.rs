//! Slice reduction: with the a-variables frozen, membership in the domain
//! (resp. the positive domain) becomes invertibility (resp. positive
//! definiteness) of an affine compression `W* 𝕏 W − F`.

use super::realization::{RangeTFrame, Realization};
use crate::error::{Error, Result};
use crate::matkit::{complement_basis, eye, hermitian_part, hermitian_residual, is_invertible, is_psd, kernel_basis, kron, range_basis};
use crate::ncalg::HermTuple;
use crate::tol::{RANK_RTOL, TOL_HERM};
use crate::CMat;

/// Normal form of `𝕏 ↦ [[𝕏, B], [B*, D]]`.
#[derive(Debug, Clone)]
pub struct SliceNormalForm {
    pub w: CMat,
    pub f: CMat,
    /// `B` restricted to `ker D` is not injective: nothing in the slice is invertible
    pub empty: bool,
    pub ker_dim: usize,
}

impl SliceNormalForm {
    /// `W* 𝕏 W − F`.
    pub fn compressed(&self, xx: &CMat) -> CMat {
        hermitian_part(&(self.w.adjoint() * xx * &self.w - &self.f))
    }

    pub fn in_omega(&self, xx: &CMat, tol_inv: f64) -> bool {
        !self.empty && is_invertible(&self.compressed(xx), tol_inv)
    }

    pub fn in_omega_plus(&self, xx: &CMat, tol: f64) -> bool {
        !self.empty && is_psd(&self.compressed(xx), tol).map(|r| r.is_pd()).unwrap_or(false)
    }
}

pub fn slice_normal_form(b: &CMat, d: &CMat) -> Result<SliceNormalForm> {
    let (k, m) = b.shape();
    if d.shape() != (m, m) {
        return Err(Error::Shape(format!("B is {:?}, D is {:?}", b.shape(), d.shape())));
    }
    if hermitian_residual(d) > TOL_HERM * d.norm().max(1.0) {
        return Err(Error::Hermitian(hermitian_residual(d)));
    }
    let k0 = kernel_basis(d, RANK_RTOL);
    let k1 = complement_basis(&k0);
    let d0 = k0.ncols();
    let b1 = b * &k0;
    let r = range_basis(&b1, RANK_RTOL);
    if r.ncols() < d0 {
        return Ok(SliceNormalForm { w: CMat::zeros(k, 0), f: CMat::zeros(0, 0), empty: true, ker_dim: d0 });
    }
    let w = complement_basis(&r);
    let dd = hermitian_part(&(k1.adjoint() * d * &k1));
    let ddi = dd.try_inverse().ok_or_else(|| Error::Singular("D restricted to its range".into()))?;
    let b2 = b * &k1;
    let c = &b2 * ddi * b2.adjoint();
    let f = hermitian_part(&(w.adjoint() * c * &w));
    Ok(SliceNormalForm { w, f, empty: false, ker_dim: d0 })
}

/// Direct test on `L(𝕏)`: invertible.
pub fn pencil_in_omega(xx: &CMat, b: &CMat, d: &CMat, tol_inv: f64) -> bool {
    is_invertible(&block_l(xx, b, d), tol_inv)
}

/// Direct test on `L(𝕏)`: invertible with `E* L^{-1} E ⪰ 0` on the first block.
pub fn pencil_in_omega_plus(xx: &CMat, b: &CMat, d: &CMat, tol_inv: f64, tol: f64) -> bool {
    let l = block_l(xx, b, d);
    if !is_invertible(&l, tol_inv) {
        return false;
    }
    let k = xx.nrows();
    let li = match l.try_inverse() {
        Some(v) => v,
        None => return false,
    };
    let top = hermitian_part(&li.view((0, 0), (k, k)).into_owned());
    is_psd(&top, tol).map(|r| r.is_psd()).unwrap_or(false)
}

fn block_l(xx: &CMat, b: &CMat, d: &CMat) -> CMat {
    let (k, m) = b.shape();
    let mut l = CMat::zeros(k + m, k + m);
    l.view_mut((0, 0), (k, k)).copy_from(xx);
    l.view_mut((0, k), (k, m)).copy_from(b);
    l.view_mut((k, 0), (m, k)).copy_from(&b.adjoint());
    l.view_mut((k, k), (m, m)).copy_from(d);
    l
}

/// A realization with the a-variables frozen at `A`, written in the
/// `ran T ⊕ (ran T)^⊥` coordinates.
#[derive(Debug, Clone)]
pub struct SliceReduction {
    pub n: usize,
    pub frame: RangeTFrame,
    /// `J11⊗I − Σ S_{k,0}⊗A_k`
    pub lambda0: CMat,
    pub b: CMat,
    pub d: CMat,
    pub form: SliceNormalForm,
}

impl SliceReduction {
    /// `Λ(X) = J11⊗I − Σ S_{k,0}⊗A_k − Σ T̂_j⊗X_j`.
    pub fn lambda(&self, x: &[CMat]) -> CMat {
        let mut l = self.lambda0.clone();
        for (th, xj) in self.frame.t_hat.iter().zip(x) {
            l -= kron(th, xj);
        }
        l
    }

    pub fn in_dom(&self, x: &[CMat], tol_inv: f64) -> bool {
        self.form.in_omega(&self.lambda(x), tol_inv)
    }

    pub fn in_dom_plus(&self, x: &[CMat], tol: f64) -> bool {
        self.form.in_omega_plus(&self.lambda(x), tol)
    }
}

pub fn slice_reduce(r: &Realization, a: &[CMat]) -> Result<SliceReduction> {
    if a.len() != r.h() {
        return Err(Error::Context(format!("{} a-matrices for {} a-letters", a.len(), r.h())));
    }
    let n = match a.first() {
        Some(m) => m.nrows(),
        None => return Err(Error::Shape("slice reduction needs the a-matrices (use sizes via a tuple)".into())),
    };
    slice_reduce_sized(r, n, a)
}

/// As [`slice_reduce`], with the size given explicitly (needed when there are no a-letters).
pub fn slice_reduce_sized(r: &Realization, n: usize, a: &[CMat]) -> Result<SliceReduction> {
    let frame = r.range_t_frame();
    let v = &frame.v;
    let vp = complement_basis(v);
    let i = eye(n);
    let blk = |m: &CMat, p: &CMat, q: &CMat| p.adjoint() * m * q;
    let mut lambda0 = kron(&blk(&r.j, v, v), &i);
    let mut b = kron(&blk(&r.j, v, &vp), &i);
    let mut d = kron(&blk(&r.j, &vp, &vp), &i);
    for (s, ak) in r.s.iter().zip(a) {
        if ak.shape() != (n, n) {
            return Err(Error::Shape(format!("a-matrix {:?}, expected {n}x{n}", ak.shape())));
        }
        lambda0 -= kron(&blk(s, v, v), ak);
        b -= kron(&blk(s, v, &vp), ak);
        d -= kron(&blk(s, &vp, &vp), ak);
    }
    let lambda0 = hermitian_part(&lambda0);
    let d = hermitian_part(&d);
    let form = slice_normal_form(&b, &d)?;
    Ok(SliceReduction { n, frame, lambda0, b, d, form })
}

/// Slice of a tuple's a-part.
pub fn slice_at(r: &Realization, t: &HermTuple) -> Result<SliceReduction> {
    slice_reduce_sized(r, t.n, &t.a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::real;
    use crate::matkit::sample::{rng_from_seed, sample_herm};

    #[test]
    fn trivial_border() {
        let b = CMat::zeros(2, 2);
        let d = eye(2);
        let f = slice_normal_form(&b, &d).unwrap();
        assert!(!f.empty);
        assert!(f.f.camax() < 1e-15);
        let x = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![real(1.0), real(2.0)]));
        assert!(f.in_omega_plus(&x, 1e-8));
        let y = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![real(1.0), real(-2.0)]));
        assert!(f.in_omega(&y, 1e-10));
        assert!(!f.in_omega_plus(&y, 1e-8));
    }

    #[test]
    fn non_injective_kernel_is_empty() {
        // D = 0 on a 2-dim space, B has rank 1 there
        let mut b = CMat::zeros(2, 2);
        b[(0, 0)] = real(1.0);
        b[(0, 1)] = real(1.0);
        let f = slice_normal_form(&b, &CMat::zeros(2, 2)).unwrap();
        assert!(f.empty);
        let mut rng = rng_from_seed(1);
        let x = sample_herm(2, 1.0, &mut rng);
        assert!(!pencil_in_omega(&x, &b, &CMat::zeros(2, 2), 1e-10));
    }

    #[test]
    fn normal_form_matches_pencil() {
        let mut rng = rng_from_seed(5);
        for trial in 0..40 {
            let b = crate::matkit::sample::sample_gaussian(3, 3, &mut rng);
            let mut d = sample_herm(3, 1.0, &mut rng);
            if trial % 2 == 0 {
                // make D singular
                let (vals, vecs) = crate::matkit::eigh(&d);
                let mut lam = vals.map(real);
                lam[1] = real(0.0);
                d = hermitian_part(&(&vecs * CMat::from_diagonal(&lam) * vecs.adjoint()));
            }
            let f = slice_normal_form(&b, &d).unwrap();
            let x = sample_herm(3, 4.0, &mut rng);
            let cond = crate::matkit::min_eig(&f.compressed(&x)).abs();
            if cond < 1e-6 {
                continue;
            }
            assert_eq!(f.in_omega(&x, 1e-10), pencil_in_omega(&x, &b, &d, 1e-10));
            assert_eq!(f.in_omega_plus(&x, 1e-8), pencil_in_omega_plus(&x, &b, &d, 1e-10, 1e-8));
        }
    }
}
