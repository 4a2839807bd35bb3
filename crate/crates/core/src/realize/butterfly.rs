//! Caterpillar expansion of `r(a, x)` around `x = 0` and the butterfly
//! factorization `r = ℓ* R_T ℓ + f̄` it induces.

use std::collections::VecDeque;

use super::linrep::linearize_poly;
use super::realization::{RangeTFrame, Realization};
use crate::error::{Error, Result};
use crate::matkit::{complement_basis, eye, hermitian_part, is_invertible, is_psd, kron, sqrt_psd};
use crate::ncalg::{FreePoly, HermTuple, LetterClass, Word};
use crate::tol::{TOL_INV, TOL_PSD};
use crate::CMat;

/// `r(A,X) = W₀ + W₁ + W₂` with `W = R(A,0)`, `R = R(A,X)`, `𝐓 = Σ T_i⊗X_i`:
/// `W₀ = c*Wc`, `W₁ = c*W𝐓Wc`, `W₂ = c*W𝐓R𝐓Wc`.
#[derive(Debug, Clone)]
pub struct Caterpillar {
    pub term0: CMat,
    pub term1: CMat,
    pub term2: CMat,
}

impl Caterpillar {
    pub fn total(&self) -> CMat {
        &self.term0 + &self.term1 + &self.term2
    }
}

pub fn caterpillar(r: &Realization, t: &HermTuple) -> Result<Caterpillar> {
    let w = r.resolvent(&t.a_only()).map_err(|_| Error::Kebab)?;
    let full = r.resolvent(t)?;
    let tx = r.t_of(&t.x);
    let cb = r.c_block(t.n);
    let wc = &w * &cb;
    let txwc = &tx * &wc;
    Ok(Caterpillar {
        term0: cb.adjoint() * &wc,
        term1: wc.adjoint() * &txwc,
        term2: txwc.adjoint() * full * &txwc,
    })
}

/// Butterfly data of a realization: `w(a) = V_T* R(a,0) V_T`,
/// `ℓ(a,x) = V_T* Σ T_i x_i R(a,0) c` and `f̄ = W₀ + W₁`.
#[derive(Debug, Clone)]
pub struct ButterflyCert {
    pub r: Realization,
    pub frame: RangeTFrame,
}

impl ButterflyCert {
    pub fn new(r: &Realization) -> Self {
        ButterflyCert { r: r.clone(), frame: r.range_t_frame() }
    }

    pub fn k(&self) -> usize {
        self.frame.k()
    }

    fn w_full(&self, t: &HermTuple) -> Result<CMat> {
        self.r.resolvent(&t.a_only()).map_err(|_| Error::Kebab)
    }

    pub fn w(&self, t: &HermTuple) -> Result<CMat> {
        let wf = self.w_full(t)?;
        let vb = kron(&self.frame.v, &eye(t.n));
        Ok(hermitian_part(&(vb.adjoint() * wf * &vb)))
    }

    /// `Σ T̂_i ⊗ X_i`.
    pub fn t_hat_x(&self, x: &[CMat], n: usize) -> CMat {
        let k = self.k();
        let mut out = CMat::zeros(k * n, k * n);
        for (th, xi) in self.frame.t_hat.iter().zip(x) {
            out += kron(th, xi);
        }
        out
    }

    pub fn ell(&self, t: &HermTuple) -> Result<CMat> {
        let wf = self.w_full(t)?;
        let vb = kron(&self.frame.v, &eye(t.n));
        Ok(vb.adjoint() * self.r.t_of(&t.x) * wf * self.r.c_block(t.n))
    }

    pub fn fbar(&self, t: &HermTuple) -> Result<CMat> {
        let wf = self.w_full(t)?;
        let cb = self.r.c_block(t.n);
        let wc = &wf * &cb;
        let tx = self.r.t_of(&t.x);
        Ok(cb.adjoint() * &wc + wc.adjoint() * tx * &wc)
    }

    /// `ℓ* w (I − T̂x w)^{-1} ℓ + f̄`.
    pub fn eval(&self, t: &HermTuple) -> Result<CMat> {
        let fbar = self.fbar(t)?;
        if self.k() == 0 {
            return Ok(fbar);
        }
        let w = self.w(t)?;
        let ell = self.ell(t)?;
        let m = eye(w.nrows()) - self.t_hat_x(&t.x, t.n) * &w;
        if !is_invertible(&m, TOL_INV) {
            return Err(Error::NotInDomain);
        }
        let inv = m.try_inverse().ok_or(Error::NotInDomain)?;
        Ok(hermitian_part(&(ell.adjoint() * w * inv * ell + fbar)))
    }

    /// `ℓ* √w (I − √w T̂x √w)^{-1} √w ℓ + f̄`; needs `w ⪰ 0`.
    pub fn eval_sqrt(&self, t: &HermTuple) -> Result<CMat> {
        let fbar = self.fbar(t)?;
        if self.k() == 0 {
            return Ok(fbar);
        }
        let sw = sqrt_psd(&self.w(t)?, TOL_PSD)?;
        let ell = self.ell(t)?;
        let m = eye(sw.nrows()) - &sw * self.t_hat_x(&t.x, t.n) * &sw;
        let inv = m.try_inverse().ok_or(Error::NotInDomain)?;
        Ok(hermitian_part(&(ell.adjoint() * &sw * inv * &sw * ell + fbar)))
    }

    /// `(A,X) ∈ dom‡`, `w(A) ⪰ 0` and `I − √w T̂x √w ≻ 0`.
    pub fn in_dom_plus(&self, t: &HermTuple, tol: f64) -> bool {
        if !self.r.in_dom_kebab(t) {
            return false;
        }
        if self.k() == 0 {
            return true;
        }
        let w = match self.w(t) {
            Ok(w) => w,
            Err(_) => return false,
        };
        let sw = match sqrt_psd(&w, tol) {
            Ok(s) => s,
            Err(_) => return false,
        };
        let m = hermitian_part(&(eye(sw.nrows()) - &sw * self.t_hat_x(&t.x, t.n) * &sw));
        is_psd(&m, tol).map(|r| r.is_pd()).unwrap_or(false)
    }
}

/// Polynomial butterfly `p = ℓ* w ℓ + f̄` with polynomial `w`, `ℓ`, `f̄`.
#[derive(Debug, Clone)]
pub struct PolyButterfly {
    pub realization: Realization,
    pub frame: RangeTFrame,
    /// `k × k`, a-letters only
    pub w: FreePoly,
    /// `k × 1`, linear in x
    pub ell: FreePoly,
    /// scalar, affine in x
    pub fbar: FreePoly,
    /// max coefficient of `p − ℓ* w ℓ − f̄`
    pub residual: f64,
    /// `max_j ‖√J₁₁ T̂_j √J₁₁‖` when `J₁₁ ⪰ 0`
    pub nilpotent_check: Option<f64>,
}

impl PolyButterfly {
    /// `w(A) ⪰ 0`.
    pub fn w_psd_at(&self, t: &HermTuple, tol: f64) -> Result<bool> {
        let w = hermitian_part(&self.w.eval(t)?);
        Ok(is_psd(&w, tol)?.is_psd())
    }

    /// `2 ℓ_h* w ℓ_h`: the x-Hessian at `(A, ·)` in direction `H`.
    pub fn hessian(&self, a: &HermTuple, h: &[CMat]) -> Result<CMat> {
        let th = a.with_x(h.to_vec());
        let l = self.ell.eval(&th)?;
        let w = self.w.eval(&th)?;
        Ok(hermitian_part(&(l.adjoint() * w * l * crate::matkit::real(2.0))))
    }
}

pub fn poly_butterfly(p: &FreePoly) -> Result<PolyButterfly> {
    if !p.is_scalar() {
        return Err(Error::Shape("butterfly of a matrix polynomial".into()));
    }
    let dx = p.degree_in_class(LetterClass::X);
    if dx > 2 {
        return Err(Error::NotConvexible(format!("degree {dx} in the x-variables; convex polynomials have degree at most 2")));
    }
    let r = linearize_poly(p)?;
    let ctx = p.ctx().clone();
    let frame = r.range_t_frame();
    let k = frame.k();
    let e = r.e();
    let ji = if e == 0 { CMat::zeros(0, 0) } else { r.j.clone().try_inverse().ok_or_else(|| Error::Singular("J".into()))? };
    // W(a) = Σ_u (J⁻¹S)_u J⁻¹ over words in the a-letters; terminates by nilpotency.
    let scale = r.s.iter().chain(std::iter::once(&r.j)).map(|m| m.camax()).fold(1.0f64, f64::max);
    let mut series: Vec<(Word, CMat)> = Vec::new();
    let mut queue: VecDeque<(Word, CMat)> = VecDeque::new();
    queue.push_back((Word::unit(), eye(e)));
    while let Some((u, pu)) = queue.pop_front() {
        if u.len() > e + 1 {
            return Err(Error::Realization("a-part of the realization is not nilpotent".into()));
        }
        series.push((u.clone(), &pu * &ji));
        for (j, sj) in r.s.iter().enumerate() {
            let next = &pu * &ji * sj;
            if next.camax() > 1e-12 * scale.powi(u.len() as i32 + 1) {
                let id = ctx.id_of(LetterClass::A, j).expect("a-letter");
                queue.push_back((u.concat(&Word::letter(id)), next));
            }
        }
    }
    let v = &frame.v;
    let cm = CMat::from_column_slice(e, 1, r.c.as_slice());
    let mut w_terms = Vec::new();
    let mut fbar_terms = Vec::new();
    let mut ell_terms = Vec::new();
    for (u, pj) in &series {
        w_terms.push((u.clone(), v.adjoint() * pj * v));
        fbar_terms.push((u.clone(), cm.adjoint() * pj * &cm));
        for (i, ti) in r.t.iter().enumerate() {
            let xi = Word::letter(ctx.id_of(LetterClass::X, i).expect("x-letter"));
            ell_terms.push((xi.concat(u), v.adjoint() * ti * pj * &cm));
            for (u2, pj2) in &series {
                fbar_terms.push((u.concat(&xi).concat(u2), cm.adjoint() * pj * ti * pj2 * &cm));
            }
        }
    }
    let w = FreePoly::from_matrix_terms(&ctx, k, k, w_terms)?;
    let ell = FreePoly::from_matrix_terms(&ctx, k, 1, ell_terms)?;
    let fbar = FreePoly::from_matrix_terms(&ctx, 1, 1, fbar_terms)?;
    let recon = ell.adjoint().mul(&w)?.mul(&ell)?.add(&fbar)?;
    let residual = recon.max_diff(p)?;
    let tol = 1e-10 * p.max_abs_coeff().max(1.0);
    if residual > tol {
        return Err(Error::Realization(format!("butterfly reconstruction residual {residual:.2e}")));
    }
    let j11 = hermitian_part(&(v.adjoint() * &r.j * v));
    let nilpotent_check = if k > 0 && is_psd(&j11, TOL_PSD)?.is_psd() {
        let sj = sqrt_psd(&j11, TOL_PSD)?;
        Some(frame.t_hat.iter().map(|th| (&sj * th * &sj).camax()).fold(0.0, f64::max))
    } else {
        None
    };
    Ok(PolyButterfly { realization: r, frame, w, ell, fbar, residual, nilpotent_check })
}

/// Schur-complement form `r = ℓ* (m(a) − T̂x)^{-1} ℓ + f̄` with
/// `m(a) = J₁₁ − S₀(a) − B D^{-1} B*`, valid when `J₂₂` is invertible.
#[derive(Debug, Clone)]
pub struct SchurButterfly {
    pub m: CMat,
    pub value: CMat,
    pub direct: CMat,
    /// `R_T ⪰ 0` computed from `(m − T̂x)^{-1}`
    pub rt_psd: bool,
    pub in_dom_plus: bool,
}

pub fn schur_butterfly(r: &Realization, t: &HermTuple) -> Result<SchurButterfly> {
    let frame = r.range_t_frame();
    let vp = complement_basis(&frame.v);
    let j22 = vp.adjoint() * &r.j * &vp;
    if !is_invertible(&j22, TOL_INV) {
        return Err(Error::NotApplicable("J₂₂ is singular".into()));
    }
    let sl = super::slice::slice_at(r, t)?;
    if !is_invertible(&sl.d, TOL_INV) {
        return Err(Error::Kebab);
    }
    let di = sl.d.clone().try_inverse().ok_or(Error::Kebab)?;
    let m = hermitian_part(&(&sl.lambda0 - &sl.b * di * sl.b.adjoint()));
    let bc = ButterflyCert { r: r.clone(), frame };
    let fbar = bc.fbar(t)?;
    let ell = bc.ell(t)?;
    let mt = &m - bc.t_hat_x(&t.x, t.n);
    if !is_invertible(&mt, TOL_INV) {
        return Err(Error::NotInDomain);
    }
    let rt = hermitian_part(&mt.try_inverse().ok_or(Error::NotInDomain)?);
    let value = hermitian_part(&(ell.adjoint() * &rt * ell + fbar));
    let direct = r.eval(t)?;
    let rt_psd = is_psd(&rt, TOL_PSD)?.is_psd();
    Ok(SchurButterfly { m, value, direct, rt_psd, in_dom_plus: r.in_dom_plus(t) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::sample::{rng_from_seed, sample_tuple};
    use crate::ncalg::{parse_poly, VarContext};

    fn ctx_ax() -> VarContext {
        VarContext::with_names(&["a"], &["x"]).unwrap()
    }

    #[test]
    fn caterpillar_sums_to_eval() {
        let p = parse_poly("x a x + a x + x a + a^2 + 1", Some(&ctx_ax())).unwrap();
        let r = linearize_poly(&p).unwrap();
        let mut rng = rng_from_seed(2);
        for _ in 0..5 {
            let t = sample_tuple(2, 1, 1, 0.8, &mut rng);
            let c = caterpillar(&r, &t).unwrap();
            assert!((c.total() - r.eval(&t).unwrap()).camax() < 1e-9);
            let b = ButterflyCert::new(&r);
            assert!((b.eval(&t).unwrap() - r.eval(&t).unwrap()).camax() < 1e-9);
        }
    }

    #[test]
    fn poly_butterfly_reconstructs() {
        let p = parse_poly("x a x + 2 x^2 + a x + x a + a", Some(&ctx_ax())).unwrap();
        let b = poly_butterfly(&p).unwrap();
        assert!(b.residual < 1e-10);
        assert_eq!(b.w.degree_in_class(LetterClass::X), 0);
    }

    #[test]
    fn cubic_in_x_rejected() {
        let p = parse_poly("x^3", None).unwrap();
        assert!(matches!(poly_butterfly(&p), Err(Error::NotConvexible(_))));
    }
}
