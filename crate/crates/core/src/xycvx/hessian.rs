//! xy-Hessian, border vector and middle matrix.
//!
//! Block substitution: `s = [[s0,(α 0)],[(α 0)*,β]]`, `t = [[t0,(0 γ)],[(0 γ)*,δ]]`
//! with `β = [[β0,β1],[β1*,β2]]`, `δ = [[δ0,δ1],[δ1*,δ2]]` split as `(n1, n2)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::pl::{Mono, PLPoly};
use crate::error::{Error, Result};
use crate::matkit::json::{mat, mats};
use crate::matkit::sample::{sample_gaussian, sample_herm};
use crate::matkit::{eye, hermitian_part, hstack, min_eig, real, vstack};
use crate::ncalg::{FreePoly, HermTuple};
use crate::matkit::is_psd;
use crate::{CMat, C64};

/// Block data of an xy-pair in normal form, sizes `(n0, n1, n2)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XYPair {
    #[serde(with = "mat")]
    pub s0: CMat,
    #[serde(with = "mat")]
    pub t0: CMat,
    /// `n0 × n1`
    #[serde(with = "mat")]
    pub alpha: CMat,
    /// `n0 × n2`
    #[serde(with = "mat")]
    pub gamma: CMat,
    /// `[β0, β1, β2]`
    #[serde(with = "mats")]
    pub beta: Vec<CMat>,
    /// `[δ0, δ1, δ2]`
    #[serde(with = "mats")]
    pub delta: Vec<CMat>,
}

fn block3(top: &CMat, off: &CMat, low: &[CMat]) -> CMat {
    let n0 = top.nrows();
    let inner = vstack(&[hstack(&[low[0].clone(), low[1].clone()]), hstack(&[low[1].adjoint(), low[2].clone()])]);
    let n = n0 + inner.nrows();
    let mut m = CMat::zeros(n, n);
    m.view_mut((0, 0), (n0, n0)).copy_from(top);
    m.view_mut((0, n0), off.shape()).copy_from(off);
    m.view_mut((n0, 0), (off.ncols(), n0)).copy_from(&off.adjoint());
    m.view_mut((n0, n0), inner.shape()).copy_from(&inner);
    m
}

impl XYPair {
    /// Checks shapes and Hermiticity of the diagonal blocks.
    pub fn new(s0: CMat, t0: CMat, alpha: CMat, gamma: CMat, beta: Vec<CMat>, delta: Vec<CMat>) -> Result<Self> {
        let q = XYPair { s0, t0, alpha, gamma, beta, delta };
        q.check()?;
        Ok(q)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.s0.nrows(), self.alpha.ncols(), self.gamma.ncols())
    }

    fn check(&self) -> Result<()> {
        let (n0, n1, n2) = (self.s0.nrows(), self.alpha.ncols(), self.gamma.ncols());
        let shapes = [
            (self.s0.shape(), (n0, n0)),
            (self.t0.shape(), (n0, n0)),
            (self.alpha.shape(), (n0, n1)),
            (self.gamma.shape(), (n0, n2)),
        ];
        let inner_ok = |b: &[CMat]| b.len() == 3 && b[0].shape() == (n1, n1) && b[1].shape() == (n1, n2) && b[2].shape() == (n2, n2);
        if shapes.iter().any(|(a, b)| a != b) || !inner_ok(&self.beta) || !inner_ok(&self.delta) {
            return Err(Error::Shape(format!("xy-pair blocks inconsistent with sizes ({n0},{n1},{n2})")));
        }
        for h in [&self.s0, &self.t0, &self.beta[0], &self.beta[2], &self.delta[0], &self.delta[2]] {
            let r = crate::matkit::hermitian_residual(h);
            if r > 1e-10 {
                return Err(Error::Hermitian(r));
            }
        }
        Ok(())
    }

    /// Full `X = s`.
    pub fn x(&self) -> CMat {
        let (n0, _, n2) = self.dims();
        let off = hstack(&[self.alpha.clone(), CMat::zeros(n0, n2)]);
        block3(&self.s0, &off, &self.beta)
    }

    /// Full `Y = t`.
    pub fn y(&self) -> CMat {
        let (n0, n1, _) = self.dims();
        let off = hstack(&[CMat::zeros(n0, n1), self.gamma.clone()]);
        block3(&self.t0, &off, &self.delta)
    }

    /// Inclusion of the first block.
    pub fn v(&self) -> CMat {
        let (n0, n1, n2) = self.dims();
        vstack(&[eye(n0), CMat::zeros(n1 + n2, n0)])
    }

    pub fn middle_inputs(&self) -> MxyInputs {
        MxyInputs {
            beta1: self.beta[1].clone(),
            beta2: self.beta[2].clone(),
            delta0: self.delta[0].clone(),
            delta1: self.delta[1].clone(),
        }
    }
}

/// Draws every block independently; Hermitian blocks have norm at most `scale`.
pub fn sample_xy_pair(dims: (usize, usize, usize), scale: f64, rng: &mut impl Rng) -> XYPair {
    let (n0, n1, n2) = dims;
    let g = |r: usize, c: usize, rng: &mut _| sample_gaussian(r, c, rng) * real(0.5 * scale);
    let s0 = sample_herm(n0, scale, rng);
    let t0 = sample_herm(n0, scale, rng);
    let alpha = g(n0, n1, rng);
    let gamma = g(n0, n2, rng);
    let beta = vec![sample_herm(n1, scale, rng), g(n1, n2, rng), sample_herm(n2, scale, rng)];
    let delta = vec![sample_herm(n1, scale, rng), g(n1, n2, rng), sample_herm(n2, scale, rng)];
    XYPair { s0, t0, alpha, gamma, beta, delta }
}

/// `max(‖V*YXV − (V*YV)(V*XV)‖, ‖V*V − I‖)`.
pub fn xy_pair_residual(x: &CMat, y: &CMat, v: &CMat) -> f64 {
    let x0 = v.adjoint() * x * v;
    let y0 = v.adjoint() * y * v;
    let prod = (v.adjoint() * y * x * v - &y0 * &x0).camax();
    prod.max((v.adjoint() * v - eye(v.ncols())).camax())
}

pub fn is_xy_pair(x: &CMat, y: &CMat, v: &CMat, tol: f64) -> bool {
    xy_pair_residual(x, y, v) <= tol
}

/// `V*p(X,Y)V − p(V*XV, V*YV)` with its PSD verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XYDefect {
    #[serde(with = "mat")]
    pub defect: CMat,
    pub lambda_min: f64,
    pub psd: bool,
    pub pair_residual: f64,
}

pub fn xy_convexity_test(p: &FreePoly, x: &CMat, y: &CMat, v: &CMat, tol_psd: f64) -> Result<XYDefect> {
    let res = xy_pair_residual(x, y, v);
    if res > 1e-9 {
        return Err(Error::Pair(res));
    }
    let n = x.nrows();
    let m = v.ncols();
    let big = p.eval(&HermTuple::with_size(n, vec![], vec![x.clone(), y.clone()])?)?;
    let small = p.eval(&HermTuple::with_size(m, vec![], vec![v.adjoint() * x * v, v.adjoint() * y * v])?)?;
    let defect = hermitian_part(&(v.adjoint() * big * v - small));
    let rep = is_psd(&defect, tol_psd)?;
    Ok(XYDefect { lambda_min: min_eig(&defect), psd: rep.is_psd(), defect, pair_residual: res })
}

/// Path A: term-by-term formula of the xy-Hessian.
pub fn xy_hessian_explicit(p: &PLPoly, q: &XYPair) -> CMat {
    let (s0, t0, a, g) = (&q.s0, &q.t0, &q.alpha, &q.gamma);
    let (b1, b2) = (&q.beta[1], &q.beta[2]);
    let (d0, d1) = (&q.delta[0], &q.delta[1]);
    let (aa, gg) = (a.adjoint(), g.adjoint());
    let (b1s, d1s) = (b1.adjoint(), d1.adjoint());
    let n0 = s0.nrows();
    let mut h = CMat::zeros(n0, n0);
    let mut add = |m: Mono, v: CMat| {
        let c: C64 = p[m];
        if c.norm() > 0.0 {
            h += v * c;
        }
    };
    add(Mono::X2, a * &aa);
    add(Mono::Y2, g * &gg);
    add(Mono::XYX, a * d0 * &aa);
    add(Mono::YXY, g * b2 * &gg);
    add(Mono::XY2, s0 * g * &gg + a * d1 * &gg);
    add(Mono::Y2X, g * &gg * s0 + g * &d1s * &aa);
    add(Mono::X2Y, a * &aa * t0 + a * b1 * &gg);
    add(Mono::YX2, t0 * a * &aa + g * &b1s * &aa);
    add(
        Mono::XY2X,
        s0 * g * &gg * s0 + a * d1 * &gg * s0 + s0 * g * &d1s * &aa + a * (d0 * d0 + d1 * &d1s) * &aa,
    );
    add(Mono::XYXY, a * d0 * &aa * t0 + a * d0 * b1 * &gg + s0 * g * b2 * &gg + a * d1 * b2 * &gg);
    add(Mono::YXYX, t0 * a * d0 * &aa + g * &b1s * d0 * &aa + g * b2 * &gg * s0 + g * b2 * &d1s * &aa);
    add(
        Mono::YX2Y,
        t0 * a * &aa * t0 + g * &b1s * &aa * t0 + t0 * a * b1 * &gg + g * (&b1s * b1 + b2 * b2) * &gg,
    );
    h
}

/// Path B: `V*p(s,t)V − p(s0,t0)` from the assembled blocks.
pub fn xy_hessian_substitution(p: &PLPoly, q: &XYPair) -> CMat {
    let v = q.v();
    v.adjoint() * p.eval(&q.x(), &q.y()) * &v - p.eval(&q.s0, &q.t0)
}

/// Both paths and their gap.
#[derive(Debug, Clone)]
pub struct XYHessian {
    pub explicit: CMat,
    pub substitution: CMat,
    pub gap: f64,
}

pub fn xy_hessian(p: &PLPoly, q: &XYPair) -> Result<XYHessian> {
    q.check()?;
    let explicit = xy_hessian_explicit(p, q);
    let substitution = xy_hessian_substitution(p, q);
    let gap = (&explicit - &substitution).camax();
    Ok(XYHessian { explicit, substitution, gap })
}

/// `[α, t0α, γ, s0γ]`.
pub fn border_vector(s0: &CMat, t0: &CMat, alpha: &CMat, gamma: &CMat) -> CMat {
    hstack(&[alpha.clone(), t0 * alpha, gamma.clone(), s0 * gamma])
}

/// Arguments of the middle matrix: `δ0` is `n1 × n1`, `β2` is `n2 × n2`, `β1, δ1` are `n1 × n2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MxyInputs {
    #[serde(with = "mat")]
    pub beta1: CMat,
    #[serde(with = "mat")]
    pub beta2: CMat,
    #[serde(with = "mat")]
    pub delta0: CMat,
    #[serde(with = "mat")]
    pub delta1: CMat,
}

impl MxyInputs {
    pub fn zeros(n1: usize, n2: usize) -> Self {
        MxyInputs {
            beta1: CMat::zeros(n1, n2),
            beta2: CMat::zeros(n2, n2),
            delta0: CMat::zeros(n1, n1),
            delta1: CMat::zeros(n1, n2),
        }
    }

    pub fn sample(n1: usize, n2: usize, scale: f64, rng: &mut impl Rng) -> Self {
        MxyInputs {
            beta1: sample_gaussian(n1, n2, rng) * real(0.5 * scale),
            beta2: sample_herm(n2, scale, rng),
            delta0: sample_herm(n1, scale, rng),
            delta1: sample_gaussian(n1, n2, rng) * real(0.5 * scale),
        }
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.delta0.nrows(), self.beta2.nrows())
    }

    pub fn check(&self) -> Result<()> {
        let (n1, n2) = self.sizes();
        if self.delta0.shape() != (n1, n1)
            || self.beta2.shape() != (n2, n2)
            || self.beta1.shape() != (n1, n2)
            || self.delta1.shape() != (n1, n2)
        {
            return Err(Error::Shape(format!("middle-matrix inputs inconsistent with sizes ({n1},{n2})")));
        }
        Ok(())
    }

    /// Largest spectral norm among the four inputs.
    pub fn max_norm(&self) -> f64 {
        [&self.beta1, &self.beta2, &self.delta0, &self.delta1]
            .iter()
            .map(|m| crate::matkit::spectral_norm(m))
            .fold(0.0, f64::max)
    }
}

/// The four 2×2 blocks of `Mxy`, each itself a 2×2 block matrix.
pub struct MxyBlocks {
    pub m: [[[[CMat; 2]; 2]; 2]; 2],
}

pub fn middle_blocks(p: &PLPoly, inp: &MxyInputs) -> MxyBlocks {
    let (n1, n2) = inp.sizes();
    let (b1, b2, d0, d1) = (&inp.beta1, &inp.beta2, &inp.delta0, &inp.delta1);
    let (b1s, d1s) = (b1.adjoint(), d1.adjoint());
    let c = |m: Mono| p[m];
    let i1 = eye(n1);
    let i2 = eye(n2);
    let m11 = [
        [&i1 * c(Mono::X2) + d0 * c(Mono::XYX) + (d0 * d0 + d1 * &d1s) * c(Mono::XY2X), &i1 * c(Mono::X2Y) + d0 * c(Mono::XYXY)],
        [&i1 * c(Mono::YX2) + d0 * c(Mono::YXYX), &i1 * c(Mono::YX2Y)],
    ];
    let m12 = [
        [b1 * c(Mono::X2Y) + d1 * c(Mono::XY2) + (d0 * b1 + d1 * b2) * c(Mono::XYXY), d1 * c(Mono::XY2X)],
        [b1 * c(Mono::YX2Y), CMat::zeros(n1, n2)],
    ];
    let m21 = [
        [&b1s * c(Mono::YX2) + &d1s * c(Mono::Y2X) + (&b1s * d0 + b2 * &d1s) * c(Mono::YXYX), &b1s * c(Mono::YX2Y)],
        [&d1s * c(Mono::XY2X), CMat::zeros(n2, n1)],
    ];
    let m22 = [
        [&i2 * c(Mono::Y2) + b2 * c(Mono::YXY) + (b2 * b2 + &b1s * b1) * c(Mono::YX2Y), &i2 * c(Mono::Y2X) + b2 * c(Mono::YXYX)],
        [&i2 * c(Mono::XY2) + b2 * c(Mono::XYXY), &i2 * c(Mono::XY2X)],
    ];
    MxyBlocks { m: [[m11, m12], [m21, m22]] }
}

/// One evaluation of the middle matrix, rows ordered like `[α, t0α, γ, s0γ]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MiddleMatrixEval {
    pub inputs: MxyInputs,
    #[serde(with = "mat")]
    pub value: CMat,
}

impl MiddleMatrixEval {
    pub fn lambda_min(&self) -> f64 {
        min_eig(&self.value)
    }
}

pub fn middle_matrix(p: &PLPoly, inp: &MxyInputs) -> Result<MiddleMatrixEval> {
    inp.check()?;
    let b = middle_blocks(p, inp);
    let rows: Vec<CMat> = (0..2)
        .flat_map(|j| {
            let b = &b;
            (0..2).map(move |a| {
                let parts: Vec<CMat> = (0..2).flat_map(|k| (0..2).map(move |c| b.m[j][k][a][c].clone())).collect();
                hstack(&parts)
            })
        })
        .collect();
    Ok(MiddleMatrixEval { inputs: inp.clone(), value: vstack(&rows) })
}

/// `Bxy Mxy Bxy*` for a pair.
pub fn bmb(p: &PLPoly, q: &XYPair) -> Result<CMat> {
    let m = middle_matrix(p, &q.middle_inputs())?;
    let b = border_vector(&q.s0, &q.t0, &q.alpha, &q.gamma);
    Ok(&b * m.value * b.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::sample::rng_from_seed;

    #[test]
    fn sampled_pairs_are_pairs() {
        let mut rng = rng_from_seed(1);
        let q = sample_xy_pair((2, 2, 3), 1.0, &mut rng);
        assert!(xy_pair_residual(&q.x(), &q.y(), &q.v()) < 1e-12);
        // α leaking into γ's columns breaks the identity
        let mut x = q.x();
        x[(0, 4)] += real(0.3);
        x[(4, 0)] += real(0.3);
        assert!(!is_xy_pair(&x, &q.y(), &q.v(), 1e-9));
    }

    #[test]
    fn single_monomials() {
        let mut rng = rng_from_seed(2);
        let q = sample_xy_pair((2, 2, 2), 1.0, &mut rng);
        let h = xy_hessian_substitution(&PLPoly::from_real(&[(Mono::Y2, 1.0)]), &q);
        assert!((h - &q.gamma * q.gamma.adjoint()).camax() < 1e-12);
        let h = xy_hessian_substitution(&PLPoly::from_real(&[(Mono::XYX, 1.0)]), &q);
        assert!((h - &q.alpha * &q.delta[0] * q.alpha.adjoint()).camax() < 1e-12);
    }

    #[test]
    fn paths_and_bmb_agree() {
        let mut rng = rng_from_seed(3);
        for _ in 0..10 {
            let p = PLPoly::random(&mut rng, 1.0);
            let q = sample_xy_pair((2, 2, 3), 1.0, &mut rng);
            let h = xy_hessian(&p, &q).unwrap();
            assert!(h.gap < 1e-10, "{}", h.gap);
            assert!((bmb(&p, &q).unwrap() - &h.explicit).camax() < 1e-10);
        }
    }

    #[test]
    fn pencil_has_zero_hessian() {
        let mut rng = rng_from_seed(4);
        let p = PLPoly::from_pairs(&[(Mono::One, real(2.0)), (Mono::X, real(-1.0)), (Mono::XY, C64::new(1.0, 2.0)), (Mono::YX, C64::new(1.0, -2.0))]);
        let q = sample_xy_pair((2, 1, 2), 1.0, &mut rng);
        assert!(xy_hessian_substitution(&p, &q).camax() < 1e-12);
    }

    #[test]
    fn zero_poly_middle_matrix() {
        let mut rng = rng_from_seed(5);
        let m = middle_matrix(&PLPoly::zero(), &MxyInputs::sample(2, 3, 1.0, &mut rng)).unwrap();
        assert_eq!(m.value.shape(), (10, 10));
        assert!(m.value.camax() == 0.0);
    }
}
