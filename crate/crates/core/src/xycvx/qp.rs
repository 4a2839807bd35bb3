//! The reduced 2×2 middle matrix `Q` and the degree-two matrix polynomial `P`
//! with `ℰP(σ) = Σ P_jk ⊛ σ_jσ_k = Q(σ)`.

use rand::Rng;

use super::hessian::{middle_blocks, MxyInputs};
use super::pl::{Mono, PLPoly};
use crate::error::{Error, Result};
use crate::matkit::sample::sample_herm;
use crate::matkit::{build_embedding_e, eye, hstack, khatri_rao, kron, real, vstack, BlockMatrix2};
use crate::{CMat, C64};

/// Coefficients `P_jk ∈ M_2`, `j, k ∈ {0, 1, 2}`, with `x_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PMatrix {
    pub blocks: [[CMat; 3]; 3],
}

fn m2(a: C64, b: C64, c: C64, d: C64) -> CMat {
    CMat::from_row_slice(2, 2, &[a, b, c, d])
}

pub fn build_p(p: &PLPoly) -> PMatrix {
    let z = C64::new(0.0, 0.0);
    let h = real(0.5);
    let p00 = m2(p[Mono::X2], z, z, p[Mono::Y2]);
    let p01 = m2(p[Mono::XYX] * h, p[Mono::XY2] * h, p[Mono::Y2X] * h, z);
    let p02 = m2(z, p[Mono::X2Y] * h, p[Mono::YX2] * h, p[Mono::YXY] * h);
    let p12 = m2(z, p[Mono::XYXY], z, z);
    let p21 = m2(z, z, p[Mono::YXYX], z);
    let p11 = m2(p[Mono::XY2X], z, z, z);
    let p22 = m2(z, z, z, p[Mono::YX2Y]);
    PMatrix { blocks: [[p00, p01.clone(), p02.clone()], [p01, p11, p12], [p02, p21, p22]] }
}

impl PMatrix {
    /// `max ‖P_jk* − P_kj‖`.
    pub fn symmetry_residual(&self) -> f64 {
        let mut r = 0.0f64;
        for j in 0..3 {
            for k in 0..3 {
                r = r.max((self.blocks[j][k].adjoint() - &self.blocks[k][j]).camax());
            }
        }
        r
    }
}

/// `(σ_1, σ_2)` with `σ_1 = [[δ0,δ1],[δ1*,δ2]]`, `σ_2 = [[β0,β1],[β1*,β2]]`, split `(n1, n2)`.
#[derive(Debug, Clone)]
pub struct Sigma {
    pub s: [CMat; 2],
    pub part: (usize, usize),
}

impl Sigma {
    pub fn sample(n1: usize, n2: usize, scale: f64, rng: &mut impl Rng) -> Self {
        Sigma { s: [sample_herm(n1 + n2, scale, rng), sample_herm(n1 + n2, scale, rng)], part: (n1, n2) }
    }

    fn block(m: &CMat, part: (usize, usize), i: usize, j: usize) -> CMat {
        let off = |k| if k == 0 { 0 } else { part.0 };
        let len = |k| if k == 0 { part.0 } else { part.1 };
        m.view((off(i), off(j)), (len(i), len(j))).into_owned()
    }

    /// Middle-matrix arguments read off the blocks.
    pub fn inputs(&self) -> MxyInputs {
        MxyInputs {
            beta1: Self::block(&self.s[1], self.part, 0, 1),
            beta2: Self::block(&self.s[1], self.part, 1, 1),
            delta0: Self::block(&self.s[0], self.part, 0, 0),
            delta1: Self::block(&self.s[0], self.part, 0, 1),
        }
    }

    /// `σ_j` with `σ_0 = I`.
    pub fn get(&self, j: usize) -> CMat {
        match j {
            0 => eye(self.part.0 + self.part.1),
            _ => self.s[j - 1].clone(),
        }
    }

    fn check(&self) -> Result<()> {
        let n = self.part.0 + self.part.1;
        if self.s.iter().any(|m| m.shape() != (n, n)) {
            return Err(Error::Shape(format!("σ blocks must be {n}×{n}")));
        }
        Ok(())
    }
}

/// `Q(σ)`: rows and columns 1 and 3 of the middle matrix.
pub fn extract_q(p: &PLPoly, inp: &MxyInputs) -> Result<CMat> {
    inp.check()?;
    let b = middle_blocks(p, inp);
    Ok(vstack(&[
        hstack(&[b.m[0][0][0][0].clone(), b.m[0][1][0][0].clone()]),
        hstack(&[b.m[1][0][0][0].clone(), b.m[1][1][0][0].clone()]),
    ]))
}

fn star(a: &CMat, b: &CMat, part: (usize, usize)) -> Result<CMat> {
    let a = BlockMatrix2::split(a, 1, 1)?;
    let b = BlockMatrix2::split(b, part.0, part.0)?;
    Ok(khatri_rao(&a, &b)?.to_matrix())
}

/// `ℰP(σ) = Σ P_jk ⊛ σ_jσ_k`.
pub fn e_operator_star(pm: &PMatrix, sig: &Sigma) -> Result<CMat> {
    sig.check()?;
    let n = sig.part.0 + sig.part.1;
    let mut out = CMat::zeros(n, n);
    for j in 0..3 {
        for k in 0..3 {
            out += star(&pm.blocks[j][k], &(sig.get(j) * sig.get(k)), sig.part)?;
        }
    }
    Ok(out)
}

/// `P(σ) = Σ P_jk ⊗ σ_jσ_k`.
pub fn p_of_sigma(pm: &PMatrix, sig: &Sigma) -> Result<CMat> {
    sig.check()?;
    let n = sig.part.0 + sig.part.1;
    let mut out = CMat::zeros(2 * n, 2 * n);
    for j in 0..3 {
        for k in 0..3 {
            out += kron(&pm.blocks[j][k], &(sig.get(j) * sig.get(k)));
        }
    }
    Ok(out)
}

/// `E* P(σ) E`.
pub fn e_operator_embed(pm: &PMatrix, sig: &Sigma) -> Result<CMat> {
    let e = build_embedding_e((1, 1), sig.part);
    Ok(e.adjoint() * p_of_sigma(pm, sig)? * e)
}

/// Element of the operator system: blocks `T_{αβ}` over `{1, x_1, x_2}`.
#[derive(Debug, Clone)]
pub struct OpSystemElem {
    pub t: [[CMat; 3]; 3],
    pub part: (usize, usize),
}

impl OpSystemElem {
    /// `T_{αβ} = σ_α σ_β`.
    pub fn moments(sig: &Sigma) -> Self {
        let t = std::array::from_fn(|a| std::array::from_fn(|b| sig.get(a) * sig.get(b)));
        OpSystemElem { t, part: sig.part }
    }

    /// `T_{β,0} = T_{0,β}` and `T_{0,0}` block diagonal.
    pub fn membership_residual(&self) -> f64 {
        let mut r = 0.0f64;
        for b in 0..3 {
            r = r.max((&self.t[b][0] - &self.t[0][b]).camax());
        }
        let (n1, n2) = self.part;
        r.max(self.t[0][0].view((0, n1), (n1, n2)).camax())
    }
}

/// `ψ(T) = Σ P_{αβ} ⊛ T_{αβ}`.
pub fn psi_apply(pm: &PMatrix, t: &OpSystemElem) -> Result<CMat> {
    let n = t.part.0 + t.part.1;
    let mut out = CMat::zeros(n, n);
    for a in 0..3 {
        for b in 0..3 {
            out += star(&pm.blocks[a][b], &t.t[a][b], t.part)?;
        }
    }
    Ok(out)
}
