use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkit::sample::sample_tuple;
use crate::matkit::{hermitian_part, min_eig};
use crate::ncalg::{parse_poly, to_text, FreePoly, HermTuple, VarContext};
use crate::realize::Realization;

/// Base membership required of every sampled point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    /// pencil invertible
    #[default]
    Domain,
    /// pencil invertible and `R_T ⪰ 0`
    DomPlus,
    /// pencil invertible and `R_T` not PSD
    OutsideDomPlus,
}

/// Sampling region: `q(A,X) ⪰ 0` for every constraint `q`, on top of a
/// base membership. With `complement`, some constraint must fail by more
/// than `band`.
#[derive(Debug, Clone)]
pub struct RegionSpec {
    pub constraints: Vec<FreePoly>,
    pub complement: bool,
    pub base: Membership,
    /// spectral-norm radius of each sampled matrix
    pub scale: f64,
    /// eigenvalue margin kept away from constraint boundaries
    pub band: f64,
    pub max_attempts: usize,
}

impl RegionSpec {
    pub fn domain(scale: f64) -> Self {
        RegionSpec { constraints: vec![], complement: false, base: Membership::Domain, scale, band: 1e-6, max_attempts: 200 }
    }

    pub fn with_constraints(mut self, c: Vec<FreePoly>) -> Self {
        self.constraints = c;
        self
    }

    pub fn complement(mut self) -> Self {
        self.complement = true;
        self
    }

    pub fn base(mut self, m: Membership) -> Self {
        self.base = m;
        self
    }

    /// Constraints from `;`-separated polynomial text over `ctx`.
    pub fn parse_constraints(src: &str, ctx: &VarContext) -> Result<Vec<FreePoly>> {
        src.split(';').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse_poly(s, Some(ctx))).collect()
    }

    fn constraint_margin(&self, t: &HermTuple) -> Result<f64> {
        let mut m = f64::INFINITY;
        for q in &self.constraints {
            let v = hermitian_part(&q.eval(t)?);
            m = m.min(min_eig(&v));
        }
        Ok(m)
    }

    pub fn contains(&self, r: &Realization, t: &HermTuple) -> Result<bool> {
        let base = match self.base {
            Membership::Domain => r.in_dom(t),
            Membership::DomPlus => r.in_dom_plus(t),
            Membership::OutsideDomPlus => r.in_dom(t) && !r.in_dom_plus(t),
        };
        if !base {
            return Ok(false);
        }
        if self.constraints.is_empty() {
            return Ok(!self.complement);
        }
        let m = self.constraint_margin(t)?;
        Ok(if self.complement { m < -self.band } else { m >= self.band })
    }

    /// Rejection sampling at size `n`; `None` after `max_attempts`.
    pub fn sample(&self, r: &Realization, n: usize, rng: &mut impl Rng) -> Result<Option<HermTuple>> {
        for _ in 0..self.max_attempts {
            let t = sample_tuple(n, r.h(), r.g(), self.scale, rng);
            if self.contains(r, &t)? {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    /// Same a-part, fresh x-part.
    pub fn sample_partner(&self, r: &Realization, t: &HermTuple, rng: &mut impl Rng) -> Result<Option<HermTuple>> {
        for _ in 0..self.max_attempts {
            let fresh = sample_tuple(t.n, 0, r.g(), self.scale, rng);
            let cand = t.with_x(fresh.x);
            if self.contains(r, &cand)? {
                return Ok(Some(cand));
            }
        }
        Ok(None)
    }

    pub fn describe(&self) -> Result<RegionDescription> {
        Ok(RegionDescription {
            constraints: self.constraints.iter().map(to_text).collect::<Result<_>>()?,
            complement: self.complement,
            base: self.base,
            scale: self.scale,
        })
    }

    pub fn check(&self) -> Result<()> {
        if !(self.scale > 0.0) || self.max_attempts == 0 {
            return Err(Error::Domain("region needs a positive scale and attempt budget".into()));
        }
        Ok(())
    }
}

/// Serializable summary of a region.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionDescription {
    pub constraints: Vec<String>,
    pub complement: bool,
    pub base: Membership,
    pub scale: f64,
}
