use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkit::json::{MatJson, VecJson};
use crate::matkit::{eye, hermitian_part, hermitian_residual, hstack, is_invertible, is_psd, kron, range_basis, singular_extremes};
use crate::ncalg::{HermTuple, LetterClass, VarContext};
use crate::tol::{RANK_RTOL, TOL_HERM, TOL_INV, TOL_PSD};
use crate::{CMat, CVec, C64};

/// Descriptor realization `c* (J − Σ T_i x_i − Σ S_j a_j)^{-1} c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub j: CMat,
    /// a-class coefficients
    pub s: Vec<CMat>,
    /// x-class coefficients
    pub t: Vec<CMat>,
    pub c: CVec,
    pub ctx: VarContext,
    pub minimal: bool,
    pub symmetric: bool,
}

/// Isometry onto `span ∪ ran T_i` and the compressed `T̂_i = V_T* T_i V_T`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeTFrame {
    pub v: CMat,
    pub t_hat: Vec<CMat>,
}

impl RangeTFrame {
    pub fn k(&self) -> usize {
        self.v.ncols()
    }
}

/// Generic letter names `a1..ah`, `x1..xg`.
pub fn default_ctx(h: usize, g: usize) -> VarContext {
    let a: Vec<String> = (1..=h).map(|i| format!("a{i}")).collect();
    let x: Vec<String> = (1..=g).map(|i| format!("x{i}")).collect();
    let ar: Vec<&str> = a.iter().map(String::as_str).collect();
    let xr: Vec<&str> = x.iter().map(String::as_str).collect();
    VarContext::with_names(&ar, &xr).expect("generated names are valid")
}

impl Realization {
    /// Validates shapes and Hermiticity. `ctx` defaults to generic names.
    pub fn new(j: CMat, s: Vec<CMat>, t: Vec<CMat>, c: CVec, ctx: Option<VarContext>) -> Result<Self> {
        let e = j.nrows();
        if j.ncols() != e || c.len() != e {
            return Err(Error::Shape(format!("J is {:?}, c has length {}", j.shape(), c.len())));
        }
        for m in std::iter::once(&j).chain(&s).chain(&t) {
            if m.shape() != (e, e) {
                return Err(Error::Shape(format!("coefficient {:?}, expected {e}x{e}", m.shape())));
            }
            let r = hermitian_residual(m);
            if r > TOL_HERM * m.norm().max(1.0) {
                return Err(Error::Hermitian(r));
            }
        }
        let ctx = ctx.unwrap_or_else(|| default_ctx(s.len(), t.len()));
        if ctx.a_count() != s.len() || ctx.x_count() != t.len() {
            return Err(Error::Context("realization class counts differ from its context".into()));
        }
        let j = hermitian_part(&j);
        let s = s.iter().map(hermitian_part).collect();
        let t = t.iter().map(hermitian_part).collect();
        Ok(Realization { j, s, t, c, ctx, minimal: false, symmetric: true })
    }

    pub fn e(&self) -> usize {
        self.j.nrows()
    }

    pub fn h(&self) -> usize {
        self.s.len()
    }

    pub fn g(&self) -> usize {
        self.t.len()
    }

    pub fn is_signature(&self) -> bool {
        let e = self.e();
        (&self.j * &self.j - eye(e)).norm() <= 1e-10 * (e as f64).max(1.0)
    }

    fn check_tuple(&self, t: &HermTuple) -> Result<()> {
        if t.a.len() != self.h() || t.x.len() != self.g() {
            return Err(Error::Context(format!(
                "tuple has {}+{} matrices, realization expects {}+{}",
                t.a.len(),
                t.x.len(),
                self.h(),
                self.g()
            )));
        }
        Ok(())
    }

    /// `P = J⊗I − Σ T_i⊗X_i − Σ S_j⊗A_j`.
    pub fn pencil(&self, t: &HermTuple) -> Result<CMat> {
        self.check_tuple(t)?;
        let n = t.n;
        let mut p = kron(&self.j, &eye(n));
        for (ti, xi) in self.t.iter().zip(&t.x) {
            p -= kron(ti, xi);
        }
        for (sj, aj) in self.s.iter().zip(&t.a) {
            p -= kron(sj, aj);
        }
        Ok(p)
    }

    /// `Σ T_i ⊗ H_i`.
    pub fn t_of(&self, h: &[CMat]) -> CMat {
        let n = h.first().map(|m| m.nrows()).unwrap_or(0);
        let mut out = CMat::zeros(self.e() * n, self.e() * n);
        for (ti, hi) in self.t.iter().zip(h) {
            out += kron(ti, hi);
        }
        out
    }

    /// `c ⊗ I_n`.
    pub fn c_block(&self, n: usize) -> CMat {
        let cm = CMat::from_column_slice(self.e(), 1, self.c.as_slice());
        kron(&cm, &eye(n))
    }

    pub fn in_dom(&self, t: &HermTuple) -> bool {
        self.in_dom_tol(t, TOL_INV)
    }

    pub fn in_dom_tol(&self, t: &HermTuple, tol_inv: f64) -> bool {
        match self.pencil(t) {
            Ok(p) => is_invertible(&p, tol_inv),
            Err(_) => false,
        }
    }

    /// `σ_min(P)/σ_max(P)` at the point.
    pub fn pencil_conditioning(&self, t: &HermTuple) -> Result<f64> {
        let (lo, hi) = singular_extremes(&self.pencil(t)?);
        Ok(if hi == 0.0 { 0.0 } else { lo / hi })
    }

    /// `P(A,X)^{-1}` when the point is in the domain.
    pub fn resolvent(&self, t: &HermTuple) -> Result<CMat> {
        self.resolvent_tol(t, TOL_INV)
    }

    pub fn resolvent_tol(&self, t: &HermTuple, tol_inv: f64) -> Result<CMat> {
        let p = self.pencil(t)?;
        if !is_invertible(&p, tol_inv) {
            return Err(Error::NotInDomain);
        }
        p.try_inverse().ok_or(Error::NotInDomain)
    }

    /// `(c⊗I)* P^{-1} (c⊗I)`.
    pub fn eval(&self, t: &HermTuple) -> Result<CMat> {
        let r = self.resolvent(t)?;
        let cb = self.c_block(t.n);
        let v = cb.adjoint() * r * &cb;
        Ok(if self.symmetric { hermitian_part(&v) } else { v })
    }

    pub fn range_t_frame(&self) -> RangeTFrame {
        let e = self.e();
        let v = if self.t.is_empty() { CMat::zeros(e, 0) } else { range_basis(&hstack(&self.t), RANK_RTOL) };
        let t_hat = self.t.iter().map(|ti| hermitian_part(&(v.adjoint() * ti * &v))).collect();
        RangeTFrame { v, t_hat }
    }

    /// `R_T = (V_T⊗I)* P^{-1} (V_T⊗I)`.
    pub fn r_t(&self, t: &HermTuple) -> Result<CMat> {
        let frame = self.range_t_frame();
        self.r_t_with(&frame, t)
    }

    pub fn r_t_with(&self, frame: &RangeTFrame, t: &HermTuple) -> Result<CMat> {
        let r = self.resolvent(t)?;
        let vb = kron(&frame.v, &eye(t.n));
        Ok(hermitian_part(&(vb.adjoint() * r * &vb)))
    }

    pub fn in_dom_plus(&self, t: &HermTuple) -> bool {
        self.in_dom_plus_tol(t, TOL_PSD)
    }

    pub fn in_dom_plus_tol(&self, t: &HermTuple, tol: f64) -> bool {
        match self.r_t(t) {
            Ok(rt) => is_psd(&rt, tol).map(|r| r.is_psd()).unwrap_or(false),
            Err(_) => false,
        }
    }

    /// `(A,X) ∈ dom` and `(A,0) ∈ dom`.
    pub fn in_dom_kebab(&self, t: &HermTuple) -> bool {
        self.in_dom(t) && self.in_dom(&t.a_only())
    }

    /// `(A,X) ∈ dom⁺` and `(A,0) ∈ dom⁺`.
    pub fn in_dom_kebab_plus(&self, t: &HermTuple) -> bool {
        self.in_dom_plus(t) && self.in_dom_plus(&t.a_only())
    }

    /// `G* R G` with `c ↦ G* c`: evaluates identically for invertible `G`.
    pub fn congruence(&self, g: &CMat) -> Result<Realization> {
        if !is_invertible(g, TOL_INV) {
            return Err(Error::Singular("congruence factor".into()));
        }
        let f = |m: &CMat| hermitian_part(&(g.adjoint() * m * g));
        // (G*(J − L)G)^{-1} = G^{-1} (J − L)^{-1} G^{-*}, and G^{-*} c' = c
        let mut r = Realization::new(f(&self.j), self.s.iter().map(f).collect(), self.t.iter().map(f).collect(), g.adjoint() * &self.c, Some(self.ctx.clone()))?;
        r.minimal = self.minimal;
        Ok(r)
    }

    /// Block-diagonal sum with another realization over the same classes.
    pub fn direct_sum(&self, other: &Realization) -> Result<Realization> {
        if self.h() != other.h() || self.g() != other.g() {
            return Err(Error::Context("direct sum over different class counts".into()));
        }
        use crate::matkit::direct_sum;
        let c = CVec::from_iterator(self.e() + other.e(), self.c.iter().chain(other.c.iter()).copied());
        Realization::new(
            direct_sum(&self.j, &other.j),
            self.s.iter().zip(&other.s).map(|(a, b)| direct_sum(a, b)).collect(),
            self.t.iter().zip(&other.t).map(|(a, b)| direct_sum(a, b)).collect(),
            c,
            Some(self.ctx.clone()),
        )
    }

    pub fn to_file(&self) -> RealizationFile {
        RealizationFile {
            e: self.e(),
            j: MatJson::from(&self.j),
            s: self.s.iter().map(MatJson::from).collect(),
            t: self.t.iter().map(MatJson::from).collect(),
            c: VecJson::from(&self.c),
            classes: Classes { a: self.h(), x: self.g() },
            names: Some(Names { a: self.ctx.names(LetterClass::A), x: self.ctx.names(LetterClass::X) }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classes {
    pub a: usize,
    pub x: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Names {
    #[serde(default)]
    pub a: Vec<String>,
    #[serde(default)]
    pub x: Vec<String>,
}

/// Realization file `{e, J, S:[..], T:[..], c, classes:{a,x}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizationFile {
    pub e: usize,
    #[serde(rename = "J")]
    pub j: MatJson,
    #[serde(rename = "S", default)]
    pub s: Vec<MatJson>,
    #[serde(rename = "T", default)]
    pub t: Vec<MatJson>,
    pub c: VecJson,
    pub classes: Classes,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Names>,
}

impl RealizationFile {
    pub fn to_realization(&self) -> Result<Realization> {
        if self.s.len() != self.classes.a || self.t.len() != self.classes.x {
            return Err(Error::Context("classes do not match the S/T list lengths".into()));
        }
        let j = self.j.to_mat()?;
        if j.nrows() != self.e {
            return Err(Error::Shape(format!("declared e = {}, J is {:?}", self.e, j.shape())));
        }
        let ctx = match &self.names {
            Some(n) => {
                let a: Vec<&str> = n.a.iter().map(String::as_str).collect();
                let x: Vec<&str> = n.x.iter().map(String::as_str).collect();
                Some(VarContext::with_names(&a, &x)?)
            }
            None => None,
        };
        Realization::new(
            j,
            self.s.iter().map(|m| m.to_mat()).collect::<Result<_>>()?,
            self.t.iter().map(|m| m.to_mat()).collect::<Result<_>>()?,
            self.c.to_vec(),
            ctx,
        )
    }
}

/// Scalar `(1 − x)^{-1}`-type realization: `J = 1`, `T = 1`, `c = 1`.
pub fn geometric_series() -> Realization {
    let one = CMat::from_element(1, 1, C64::new(1.0, 0.0));
    Realization::new(one.clone(), vec![], vec![one], CVec::from_element(1, C64::new(1.0, 0.0)), None).unwrap()
}
