use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hessian::{partial_hessian, HessianProbe};
use super::region::{RegionDescription, RegionSpec};
use crate::error::{Error, Result};
use crate::matkit::json::{mat, mats, tuple};
use crate::matkit::sample::{derived_rng, sample_herm_on_sphere};
use crate::matkit::{hermitian_part, is_psd, min_eig, real};
use crate::ncalg::HermTuple;
use crate::realize::Realization;
use crate::tol::TOL_PSD;
use crate::CMat;

/// Sizes, sample counts, seed and tolerance for sampled tests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleConfig {
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub tol_psd: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { sizes: vec![1, 2, 3], samples: 50, seed: 0, tol_psd: TOL_PSD }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    ConvexEvidence,
    NotConvex,
    Inconclusive,
}

/// Midpoint failure `½(r(A,X)+r(A,Y)) − r(A,(X+Y)/2) ⋡ 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MidpointWitness {
    #[serde(with = "tuple")]
    pub point: HermTuple,
    #[serde(with = "mats")]
    pub partner_x: Vec<CMat>,
    #[serde(with = "mat")]
    pub defect: CMat,
    pub lambda_min: f64,
}

impl MidpointWitness {
    /// Recomputes the defect from the stored data.
    pub fn reverify(&self, r: &Realization) -> Result<f64> {
        midpoint_defect(r, &self.point, &self.partner_x).map(|d| min_eig(&d))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n: usize,
    pub accepted: usize,
    pub min_hessian_eig: f64,
    pub min_midpoint_eig: f64,
    pub hessian_violations: usize,
    pub midpoint_violations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub outcome: Outcome,
    pub region: RegionDescription,
    pub per_size: Vec<SizeSummary>,
    pub hessian_witness: Option<HessianProbe>,
    pub midpoint_witness: Option<MidpointWitness>,
    /// a size-1 point was found in the region
    pub scalar_points: bool,
}

pub fn midpoint_defect(r: &Realization, t: &HermTuple, y: &[CMat]) -> Result<CMat> {
    let t2 = t.with_x(y.to_vec());
    let mid = t.with_x(t.x.iter().zip(y).map(|(a, b)| (a + b) * real(0.5)).collect());
    let avg = (r.eval(t)? + r.eval(&t2)?) * real(0.5);
    Ok(hermitian_part(&(avg - r.eval(&mid)?)))
}

struct SampleResult {
    probe: HessianProbe,
    hess_ok: bool,
    midpoint: Option<(MidpointWitness, bool)>,
}

fn one_sample(r: &Realization, region: &RegionSpec, n: usize, seed: u64, idx: usize, tol: f64) -> Result<Option<SampleResult>> {
    let mut rng = derived_rng(seed, n as u64, idx as u64);
    let t = match region.sample(r, n, &mut rng)? {
        Some(t) => t,
        None => return Ok(None),
    };
    let h: Vec<CMat> = (0..r.g()).map(|_| sample_herm_on_sphere(n, 1.0, &mut rng)).collect();
    let probe = partial_hessian(r, &t, &h)?;
    let hess_ok = is_psd(&probe.value, tol)?.is_psd();
    let midpoint = match region.sample_partner(r, &t, &mut rng)? {
        Some(t2) => {
            let mid = t.with_x(t.x.iter().zip(&t2.x).map(|(a, b)| (a + b) * real(0.5)).collect());
            if r.in_dom(&mid) {
                let d = midpoint_defect(r, &t, &t2.x)?;
                let ok = is_psd(&d, tol)?.is_psd();
                let lambda_min = min_eig(&d);
                Some((MidpointWitness { point: t.clone(), partner_x: t2.x, defect: d, lambda_min }, ok))
            } else {
                None
            }
        }
        None => None,
    };
    Ok(Some(SampleResult { probe, hess_ok, midpoint }))
}

/// Sampled Hessian and midpoint tests of convexity in x over a region.
pub fn convexity_verdict(r: &Realization, region: &RegionSpec, cfg: &SampleConfig) -> Result<ConvexityReport> {
    region.check()?;
    let mut per_size = Vec::new();
    let mut hessian_witness: Option<HessianProbe> = None;
    let mut midpoint_witness: Option<MidpointWitness> = None;
    let mut scalar_points = false;
    let mut total = 0usize;
    for &n in &cfg.sizes {
        let results: Vec<Option<SampleResult>> =
            (0..cfg.samples).into_par_iter().map(|i| one_sample(r, region, n, cfg.seed, i, cfg.tol_psd)).collect::<Result<_>>()?;
        let mut s = SizeSummary {
            n,
            accepted: 0,
            min_hessian_eig: f64::INFINITY,
            min_midpoint_eig: f64::INFINITY,
            hessian_violations: 0,
            midpoint_violations: 0,
        };
        for res in results.into_iter().flatten() {
            s.accepted += 1;
            s.min_hessian_eig = s.min_hessian_eig.min(res.probe.lambda_min);
            if !res.hess_ok {
                s.hessian_violations += 1;
                if hessian_witness.as_ref().is_none_or(|w| res.probe.lambda_min < w.lambda_min) {
                    hessian_witness = Some(res.probe);
                }
            }
            if let Some((mw, ok)) = res.midpoint {
                s.min_midpoint_eig = s.min_midpoint_eig.min(mw.lambda_min);
                if !ok {
                    s.midpoint_violations += 1;
                    if midpoint_witness.as_ref().is_none_or(|w| mw.lambda_min < w.lambda_min) {
                        midpoint_witness = Some(mw);
                    }
                }
            }
        }
        if n == 1 && s.accepted > 0 {
            scalar_points = true;
        }
        total += s.accepted;
        per_size.push(s);
    }
    if total == 0 {
        return Err(Error::RegionEmpty(cfg.samples * cfg.sizes.len() * region.max_attempts));
    }
    let outcome = if hessian_witness.is_some() || midpoint_witness.is_some() { Outcome::NotConvex } else { Outcome::ConvexEvidence };
    Ok(ConvexityReport { outcome, region: region.describe()?, per_size, hessian_witness, midpoint_witness, scalar_points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::parse_poly;
    use crate::realize::linearize_poly;

    #[test]
    fn square_is_convex() {
        let r = linearize_poly(&parse_poly("x^2", None).unwrap()).unwrap();
        let rep = convexity_verdict(&r, &RegionSpec::domain(2.0), &SampleConfig { samples: 20, ..Default::default() }).unwrap();
        assert_eq!(rep.outcome, Outcome::ConvexEvidence);
        assert!(rep.scalar_points);
    }

    #[test]
    fn quartic_is_not() {
        let r = linearize_poly(&parse_poly("x^4", None).unwrap()).unwrap();
        let rep = convexity_verdict(&r, &RegionSpec::domain(2.0), &SampleConfig { samples: 40, ..Default::default() }).unwrap();
        assert_eq!(rep.outcome, Outcome::NotConvex);
        let w = rep.hessian_witness.unwrap();
        assert!(w.lambda_min < 0.0);
    }
}
