//! Recognizable-series form `u* (I − Σ M_l z_l)^{-1} v`, indexed by letter id.
//!
//! The coefficient of the word `l1 l2 .. lk` is `u* M_l1 M_l2 .. M_lk v`.
//! This is the working form for minimization and for the similarity solves.

use std::collections::{BTreeMap, BTreeSet};

use super::realization::Realization;
use crate::error::{Error, Result};
use crate::matkit::{checked_svd, eye, hermitian_part, hermitian_residual, hstack, kron, range_basis, signature_decompose, vstack};
use crate::ncalg::{FreePoly, LetterClass, VarContext, Word};
use crate::tol::{RANK_RTOL, TOL_INV};
use crate::{CMat, CVec, C64};

#[derive(Debug, Clone)]
pub struct LinearRep {
    pub u: CVec,
    pub v: CVec,
    /// one matrix per letter id of `ctx`
    pub m: Vec<CMat>,
    pub ctx: VarContext,
}

/// Outcome of a state-space similarity solve `rep1 → rep2`.
#[derive(Debug, Clone)]
pub struct Similarity {
    pub s: CMat,
    /// max residual of `S M1 = M2 S`, `S v1 = v2`, `u2* S = u1*`
    pub residual: f64,
    /// dimension of the solution space of the homogeneous system (0 when unique)
    pub nullity: usize,
}

impl LinearRep {
    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn from_realization(r: &Realization) -> Result<Self> {
        let ji = r.j.clone().try_inverse().ok_or_else(|| Error::Singular("J is not invertible".into()))?;
        let mut m = Vec::with_capacity(r.ctx.len());
        for id in 0..r.ctx.len() {
            let l = r.ctx.letter(id);
            let coeff = match l.class {
                LetterClass::A => &r.s[l.index],
                LetterClass::X => &r.t[l.index],
            };
            m.push(&ji * coeff);
        }
        Ok(LinearRep { u: r.c.clone(), v: &ji * &r.c, m, ctx: r.ctx.clone() })
    }

    /// Suffix automaton: states are the suffixes of supported words, `v = e_∅`,
    /// `M_l e_s = e_{ls}` and `u_s = conj(p_s)`.
    pub fn from_poly(p: &FreePoly) -> Result<Self> {
        if !p.is_scalar() {
            return Err(Error::Shape("linear representation needs a scalar polynomial".into()));
        }
        let mut states = BTreeSet::new();
        states.insert(Word::unit());
        for (w, _) in p.terms() {
            for k in 0..w.len() {
                states.insert(Word(w.letters()[k..].to_vec()));
            }
        }
        let index: BTreeMap<Word, usize> = states.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let d = index.len();
        let nl = p.ctx().len();
        let mut m = vec![CMat::zeros(d, d); nl];
        let mut u = CVec::zeros(d);
        for (w, &i) in &index {
            u[i] = p.scalar_coeff(w).conj();
            for (l, ml) in m.iter_mut().enumerate() {
                let lw = Word::letter(l).concat(w);
                if let Some(&k) = index.get(&lw) {
                    ml[(k, i)] = C64::new(1.0, 0.0);
                }
            }
        }
        let mut v = CVec::zeros(d);
        v[index[&Word::unit()]] = C64::new(1.0, 0.0);
        Ok(LinearRep { u, v, m, ctx: p.ctx().clone() })
    }

    pub fn coefficient(&self, w: &Word) -> C64 {
        let mut x = self.v.clone();
        for &l in w.letters().iter().rev() {
            x = &self.m[l] * x;
        }
        self.u.dotc(&x)
    }

    /// All coefficients up to word length `max_len` with modulus above `drop`.
    pub fn to_poly(&self, max_len: usize, drop: f64) -> FreePoly {
        let mut terms = Vec::new();
        let mut frontier: Vec<(Word, CVec)> = vec![(Word::unit(), self.v.clone())];
        for len in 0..=max_len {
            let mut next = Vec::new();
            for (w, x) in &frontier {
                let c = self.u.dotc(x);
                if c.norm() > drop {
                    terms.push((w.clone(), c));
                }
                if len < max_len {
                    for (l, ml) in self.m.iter().enumerate() {
                        let y = ml * x;
                        if y.norm() > drop {
                            next.push((Word::letter(l).concat(w), y));
                        }
                    }
                }
            }
            frontier = next;
        }
        FreePoly::from_terms(&self.ctx, terms)
    }

    /// `(v, M*, u)`: represents the adjoint series.
    pub fn adjoint_rep(&self) -> LinearRep {
        LinearRep { u: self.v.clone(), v: self.u.clone(), m: self.m.iter().map(|x| x.adjoint()).collect(), ctx: self.ctx.clone() }
    }

    /// Orthonormal basis of `span{M_w v}`.
    pub fn reachable_basis(&self) -> CMat {
        krylov(&self.v, &self.m, RANK_RTOL)
    }

    /// Orthonormal basis of `span{M_w* u}`.
    pub fn observable_basis(&self) -> CMat {
        let adj: Vec<CMat> = self.m.iter().map(|x| x.adjoint()).collect();
        krylov(&self.u, &adj, RANK_RTOL)
    }

    pub fn is_minimal(&self) -> bool {
        let d = self.dim();
        self.reachable_basis().ncols() == d && self.observable_basis().ncols() == d
    }

    fn restrict(&self, q: &CMat) -> LinearRep {
        LinearRep {
            u: q.adjoint() * &self.u,
            v: q.adjoint() * &self.v,
            m: self.m.iter().map(|x| q.adjoint() * x * q).collect(),
            ctx: self.ctx.clone(),
        }
    }

    /// Reachable part, then observable part of that.
    pub fn minimize(&self) -> LinearRep {
        let r = self.restrict(&self.reachable_basis());
        let o = r.observable_basis();
        r.restrict(&o)
    }
}

fn krylov(start: &CVec, mats: &[CMat], rtol: f64) -> CMat {
    let d = start.len();
    let mut q = range_basis(&CMat::from_column_slice(d, 1, start.as_slice()), rtol);
    // scale reference: directions below rtol of the start vector count as zero
    let scale = start.norm();
    if q.ncols() == 0 {
        return q;
    }
    loop {
        let mut parts = vec![q.clone()];
        for m in mats {
            parts.push(m * &q);
        }
        let cand = hstack(&parts);
        let svd = checked_svd(&cand);
        let smax = svd.singular_values.max().max(scale.min(1.0));
        let r = svd.singular_values.iter().filter(|&&s| s > rtol * smax).count();
        if r <= q.ncols() {
            return q;
        }
        q = svd.u.unwrap().columns(0, r).into_owned();
    }
}

/// Solves `S M1_l = M2_l S`, `S v1 = v2`, `u2* S = u1*` by least squares.
pub fn rep_similarity(r1: &LinearRep, r2: &LinearRep) -> Result<Similarity> {
    if r1.m.len() != r2.m.len() {
        return Err(Error::Context("representations over different alphabets".into()));
    }
    let (e1, e2) = (r1.dim(), r2.dim());
    let i1 = eye(e1);
    let i2 = eye(e2);
    let mut blocks = Vec::new();
    let mut rhs = Vec::new();
    for (m1, m2) in r1.m.iter().zip(&r2.m) {
        blocks.push(kron(&m1.transpose(), &i2) - kron(&i1, m2));
        rhs.push(CMat::zeros(e1 * e2, 1));
    }
    let v1t = CMat::from_row_slice(1, e1, r1.v.as_slice());
    blocks.push(kron(&v1t, &i2));
    rhs.push(CMat::from_column_slice(e2, 1, r2.v.as_slice()));
    let u2a = CMat::from_column_slice(e2, 1, r2.u.as_slice()).adjoint();
    blocks.push(kron(&i1, &u2a));
    rhs.push(CMat::from_column_slice(e1, 1, r1.u.as_slice()).adjoint().transpose());
    let a = vstack(&blocks);
    let b = vstack(&rhs);
    let svd = checked_svd(&a);
    let smax = svd.singular_values.max();
    let nullity = e1 * e2 - svd.singular_values.iter().filter(|&&s| s > 1e-9 * smax.max(1e-300)).count();
    let x = svd.solve(&b, 1e-12 * smax.max(1e-300)).map_err(|e| Error::Singular(e.to_string()))?;
    let s = CMat::from_column_slice(e2, e1, x.as_slice());
    let residual = (a * x - b).camax();
    Ok(Similarity { s, residual, nullity })
}

/// Symmetric descriptor form of a minimal representation of a symmetric series.
///
/// Finds the Hermitian `S` intertwining the representation with its adjoint,
/// then factors `S^{-1}` by its signature.
pub fn symmetrize(rep: &LinearRep) -> Result<Realization> {
    let e = rep.dim();
    let h = rep.ctx.a_count();
    let g = rep.ctx.x_count();
    let ctx = rep.ctx.clone();
    if e == 0 {
        let mut r = Realization::new(CMat::zeros(0, 0), vec![CMat::zeros(0, 0); h], vec![CMat::zeros(0, 0); g], CVec::zeros(0), Some(ctx))?;
        r.minimal = true;
        return Ok(r);
    }
    let sim = rep_similarity(rep, &rep.adjoint_rep())?;
    let scale = sim.s.norm().max(1.0);
    if sim.residual > 1e-8 * scale || sim.nullity != 0 {
        return Err(Error::Symmetrization(format!("no unique intertwiner (residual {:.2e}, nullity {})", sim.residual, sim.nullity)));
    }
    let herm = hermitian_residual(&sim.s);
    if herm > 1e-6 * scale {
        return Err(Error::Symmetrization(format!("intertwiner is not Hermitian (residual {herm:.2e})")));
    }
    let s = hermitian_part(&sim.s);
    let k = s.clone().try_inverse().ok_or_else(|| Error::Symmetrization("intertwiner is singular".into()))?;
    let k = hermitian_part(&k);
    let (j, c) = signature_decompose(&k).map_err(|e| Error::Symmetrization(e.to_string()))?;
    let mut sa = vec![CMat::zeros(e, e); h];
    let mut tx = vec![CMat::zeros(e, e); g];
    for (id, ml) in rep.m.iter().enumerate() {
        let b = hermitian_part(&(ml * &k));
        let coeff = hermitian_part(&(c.adjoint() * b * &c));
        let l = ctx.letter(id);
        match l.class {
            LetterClass::A => sa[l.index] = coeff,
            LetterClass::X => tx[l.index] = coeff,
        }
    }
    let cv = c.adjoint() * &rep.v;
    let mut r = Realization::new(j, sa, tx, cv, Some(ctx))?;
    r.minimal = true;
    Ok(r)
}

/// Minimal symmetric realization with the same series.
pub fn minimize(r: &Realization) -> Result<Realization> {
    let rep = LinearRep::from_realization(r)?.minimize();
    symmetrize(&rep)
}

pub fn is_minimal(r: &Realization) -> Result<bool> {
    Ok(LinearRep::from_realization(r)?.is_minimal())
}

/// Minimal symmetric realization of a symmetric scalar polynomial.
pub fn linearize_poly(p: &FreePoly) -> Result<Realization> {
    if !p.is_scalar() {
        return Err(Error::Shape("linearization needs a scalar polynomial".into()));
    }
    if !p.is_symmetric(1e-12 * p.max_abs_coeff().max(1.0)) {
        return Err(Error::Symmetrization("polynomial is not symmetric".into()));
    }
    let rep = LinearRep::from_poly(p)?.minimize();
    symmetrize(&rep)
}

/// Residuals of `S* K S = J`, `S J⁻¹ A_l = K⁻¹ B_l S`, `S J⁻¹ a = K⁻¹ b`.
#[derive(Debug, Clone)]
pub struct StateSpaceSimilarity {
    pub s: CMat,
    pub unitary_residual: f64,
    pub intertwining_residual: f64,
    pub vector_residual: f64,
    pub solve_residual: f64,
}

impl StateSpaceSimilarity {
    pub fn max_residual(&self) -> f64 {
        self.unitary_residual.max(self.intertwining_residual).max(self.vector_residual).max(self.solve_residual)
    }
}

/// Similarity between two minimal realizations of the same function.
pub fn state_space_similarity(r1: &Realization, r2: &Realization) -> Result<StateSpaceSimilarity> {
    let rep1 = LinearRep::from_realization(r1)?;
    let rep2 = LinearRep::from_realization(r2)?;
    if !rep1.is_minimal() {
        return Err(Error::Minimality("first realization is not minimal".into()));
    }
    if !rep2.is_minimal() {
        return Err(Error::Minimality("second realization is not minimal".into()));
    }
    if rep1.dim() != rep2.dim() {
        return Err(Error::NotEquivalent(format!("minimal sizes differ: {} vs {}", rep1.dim(), rep2.dim())));
    }
    let sim = rep_similarity(&rep1, &rep2)?;
    if sim.residual > 1e-8 * sim.s.norm().max(1.0) || sim.nullity != 0 {
        return Err(Error::NotEquivalent(format!("no similarity (residual {:.2e})", sim.residual)));
    }
    if !crate::matkit::is_invertible(&sim.s, TOL_INV) {
        return Err(Error::NotEquivalent("similarity is singular".into()));
    }
    let s = sim.s;
    let ji = r1.j.clone().try_inverse().unwrap();
    let ki = r2.j.clone().try_inverse().unwrap();
    let unitary_residual = (s.adjoint() * &r2.j * &s - &r1.j).camax();
    let mut intertwining_residual = 0.0f64;
    for (a, b) in r1.s.iter().zip(&r2.s).chain(r1.t.iter().zip(&r2.t)) {
        intertwining_residual = intertwining_residual.max((&s * &ji * a - &ki * b * &s).camax());
    }
    let vector_residual = (&s * &ji * &r1.c - &ki * &r2.c).camax();
    Ok(StateSpaceSimilarity { s, unitary_residual, intertwining_residual, vector_residual, solve_residual: sim.residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::sample::{rng_from_seed, sample_tuple};
    use crate::ncalg::parse_poly;

    #[test]
    fn suffix_automaton_reproduces_coefficients() {
        let p = parse_poly("1 + 2x + x y x - 3y^2", None).unwrap();
        let rep = LinearRep::from_poly(&p).unwrap();
        for (w, c) in p.terms() {
            assert!((rep.coefficient(w) - c[(0, 0)]).norm() < 1e-14);
        }
        let q = rep.to_poly(5, 1e-14);
        assert!(q.max_diff(&p).unwrap() < 1e-14);
    }

    #[test]
    fn linearized_poly_evaluates() {
        let ctx = VarContext::with_names(&["a"], &["x"]).unwrap();
        let p = parse_poly("x a x + a^2 + x + 2", Some(&ctx)).unwrap();
        let r = linearize_poly(&p).unwrap();
        assert!(r.is_signature());
        let mut rng = rng_from_seed(3);
        for _ in 0..5 {
            let t = sample_tuple(3, 1, 1, 1.0, &mut rng);
            let d = (r.eval(&t).unwrap() - p.eval(&t).unwrap()).camax();
            assert!(d < 1e-9, "{d}");
        }
    }

    #[test]
    fn minimize_removes_redundant_block() {
        let p = parse_poly("x^2 + x", None).unwrap();
        let r = linearize_poly(&p).unwrap();
        let doubled = r.direct_sum(&r).unwrap();
        let m = minimize(&doubled).unwrap();
        assert_eq!(m.e(), r.e());
        let mut rng = rng_from_seed(9);
        let t = sample_tuple(2, 0, 1, 0.5, &mut rng);
        let want = p.eval(&t).unwrap() * C64::new(2.0, 0.0);
        assert!((m.eval(&t).unwrap() - want).camax() < 1e-9);
    }

    #[test]
    fn self_similarity_is_identity() {
        let p = parse_poly("x a x + a", Some(&VarContext::with_names(&["a"], &["x"]).unwrap())).unwrap();
        let r = linearize_poly(&p).unwrap();
        let s = state_space_similarity(&r, &r).unwrap();
        assert!((s.s - eye(r.e())).camax() < 1e-8);
    }

    #[test]
    fn asymmetric_poly_rejected() {
        let p = parse_poly("x y", None).unwrap();
        assert!(matches!(linearize_poly(&p), Err(Error::Symmetrization(_))));
    }
}
