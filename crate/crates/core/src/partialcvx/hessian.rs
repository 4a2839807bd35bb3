use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkit::json::{mat, mats, tuple};
use crate::matkit::{eye, hermitian_part, kron, min_eig, real};
use crate::ncalg::HermTuple;
use crate::realize::{RangeTFrame, Realization};
use crate::CMat;

/// One evaluation of `r_xx(A,X)[H]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HessianProbe {
    #[serde(with = "tuple")]
    pub point: HermTuple,
    #[serde(with = "mats")]
    pub direction: Vec<CMat>,
    #[serde(with = "mat")]
    pub value: CMat,
    pub lambda_min: f64,
}

/// Both algebraic forms of the x-partial Hessian.
#[derive(Debug, Clone)]
pub struct HessianForms {
    /// `2 c*R 𝐓_H R 𝐓_H R c`
    pub triple: CMat,
    /// `2 [c*R(V⊗I)T̂_H] R_T [T̂_H(V⊗I)*Rc]`
    pub sandwich: CMat,
}

fn direction_op(r: &Realization, h: &[CMat]) -> Result<CMat> {
    if h.len() != r.g() {
        return Err(Error::Context(format!("{} directions for {} x-letters", h.len(), r.g())));
    }
    Ok(r.t_of(h))
}

pub fn hessian_forms(r: &Realization, t: &HermTuple, h: &[CMat]) -> Result<HessianForms> {
    let frame = r.range_t_frame();
    hessian_forms_with(r, &frame, t, h)
}

pub fn hessian_forms_with(r: &Realization, frame: &RangeTFrame, t: &HermTuple, h: &[CMat]) -> Result<HessianForms> {
    let res = r.resolvent(t)?;
    let th = direction_op(r, h)?;
    let cb = r.c_block(t.n);
    let rc = &res * &cb;
    let left = th.clone() * &rc;
    let two = real(2.0);
    let triple = hermitian_part(&(left.adjoint() * &res * &left * two));
    // sandwich through the range of T
    let vb = kron(&frame.v, &eye(t.n));
    let mut that = CMat::zeros(frame.k() * t.n, frame.k() * t.n);
    for (th_i, hi) in frame.t_hat.iter().zip(h) {
        that += kron(th_i, hi);
    }
    let rt = vb.adjoint() * &res * &vb;
    let inner = that * vb.adjoint() * &rc;
    let sandwich = hermitian_part(&(inner.adjoint() * rt * &inner * two));
    Ok(HessianForms { triple, sandwich })
}

/// `r_xx(A,X)[H]` with its smallest eigenvalue.
pub fn partial_hessian(r: &Realization, t: &HermTuple, h: &[CMat]) -> Result<HessianProbe> {
    let f = hessian_forms(r, t, h)?;
    let lambda_min = min_eig(&f.sandwich);
    Ok(HessianProbe { point: t.clone(), direction: h.to_vec(), value: f.sandwich, lambda_min })
}

/// Central second difference of `s ↦ r(A, X + sH)` at `s = 0`.
pub fn fd_hessian(r: &Realization, t: &HermTuple, h: &[CMat], eps: f64) -> Result<CMat> {
    let shift = |s: f64| {
        let x: Vec<CMat> = t.x.iter().zip(h).map(|(xi, hi)| xi + hi * real(s)).collect();
        t.with_x(x)
    };
    let plus = r.eval(&shift(eps))?;
    let minus = r.eval(&shift(-eps))?;
    let mid = r.eval(t)?;
    Ok((plus + minus - mid * real(2.0)) * real(1.0 / (eps * eps)))
}
