use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkit::json::MatJson;
use crate::matkit::{direct_sum, hermitian_residual};
use crate::tol::TOL_HERM;
use crate::CMat;

/// Evaluation point: `n × n` Hermitian matrices for the a-class and the x-class.
#[derive(Debug, Clone, PartialEq)]
pub struct HermTuple {
    pub n: usize,
    pub a: Vec<CMat>,
    pub x: Vec<CMat>,
}

impl HermTuple {
    /// Validates sizes and Hermiticity (relative residual `TOL_HERM`).
    pub fn new(a: Vec<CMat>, x: Vec<CMat>) -> Result<Self> {
        let n = a.first().or(x.first()).map(|m| m.nrows()).ok_or_else(|| {
            Error::Shape("tuple needs at least one matrix; use HermTuple::zeros for empty contexts".into())
        })?;
        Self::with_size(n, a, x)
    }

    pub fn with_size(n: usize, a: Vec<CMat>, x: Vec<CMat>) -> Result<Self> {
        for m in a.iter().chain(&x) {
            if m.shape() != (n, n) {
                return Err(Error::Shape(format!("tuple entry {:?}, expected {n}x{n}", m.shape())));
            }
            let r = hermitian_residual(m);
            if r > TOL_HERM * m.norm().max(1.0) {
                return Err(Error::Hermitian(r));
            }
        }
        Ok(HermTuple { n, a, x })
    }

    /// Square matrices of a common size with no Hermiticity check. Plain
    /// polynomial evaluation is defined for arbitrary square matrices.
    pub fn general(n: usize, a: Vec<CMat>, x: Vec<CMat>) -> Result<Self> {
        for m in a.iter().chain(&x) {
            if m.shape() != (n, n) {
                return Err(Error::Shape(format!("tuple entry {:?}, expected {n}x{n}", m.shape())));
            }
        }
        Ok(HermTuple { n, a, x })
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.a.iter().chain(&self.x).all(|m| hermitian_residual(m) <= tol * m.norm().max(1.0))
    }

    pub fn zeros(n: usize, h: usize, g: usize) -> Self {
        HermTuple { n, a: vec![CMat::zeros(n, n); h], x: vec![CMat::zeros(n, n); g] }
    }

    /// Same a-part with x replaced.
    pub fn with_x(&self, x: Vec<CMat>) -> Self {
        HermTuple { n: self.n, a: self.a.clone(), x }
    }

    /// `(A, 0)`.
    pub fn a_only(&self) -> Self {
        self.with_x(vec![CMat::zeros(self.n, self.n); self.x.len()])
    }

    pub fn direct_sum(&self, other: &HermTuple) -> Result<Self> {
        if self.a.len() != other.a.len() || self.x.len() != other.x.len() {
            return Err(Error::Context("direct sum of tuples with different class counts".into()));
        }
        Ok(HermTuple {
            n: self.n + other.n,
            a: self.a.iter().zip(&other.a).map(|(p, q)| direct_sum(p, q)).collect(),
            x: self.x.iter().zip(&other.x).map(|(p, q)| direct_sum(p, q)).collect(),
        })
    }

    /// `U* T U` entrywise.
    pub fn conjugate(&self, u: &CMat) -> Self {
        let f = |m: &CMat| u.adjoint() * m * u;
        HermTuple { n: u.ncols(), a: self.a.iter().map(f).collect(), x: self.x.iter().map(f).collect() }
    }

    /// `V* T V` for an isometry `V`.
    pub fn compress(&self, v: &CMat) -> Self {
        self.conjugate(v)
    }

    pub fn to_file(&self) -> TupleFile {
        TupleFile {
            n: Some(self.n),
            a: self.a.iter().map(MatJson::from).collect(),
            x: self.x.iter().map(MatJson::from).collect(),
        }
    }
}

/// JSON form `{"a":[M..],"x":[M..]}`; `n` is optional and only needed when both lists are empty.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TupleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub a: Vec<MatJson>,
    #[serde(default)]
    pub x: Vec<MatJson>,
}

impl TupleFile {
    pub fn to_tuple(&self) -> Result<HermTuple> {
        let a = self.a.iter().map(|m| m.to_mat()).collect::<Result<Vec<_>>>()?;
        let x = self.x.iter().map(|m| m.to_mat()).collect::<Result<Vec<_>>>()?;
        match self.n {
            Some(n) => HermTuple::with_size(n, a, x),
            None => HermTuple::new(a, x),
        }
    }

    /// Like [`TupleFile::to_tuple`] but accepts non-Hermitian square matrices.
    pub fn to_general_tuple(&self) -> Result<HermTuple> {
        let a = self.a.iter().map(|m| m.to_mat()).collect::<Result<Vec<_>>>()?;
        let x = self.x.iter().map(|m| m.to_mat()).collect::<Result<Vec<_>>>()?;
        let n = match self.n {
            Some(n) => n,
            None => a.first().or(x.first()).map(|m| m.nrows()).ok_or_else(|| Error::Shape("empty tuple without `n`".into()))?,
        };
        HermTuple::general(n, a, x)
    }
}
