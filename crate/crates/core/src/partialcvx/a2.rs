//! a²-convexity: `V* r(B,Z) V ⪰ r(V*(B,Z)V)` for isometries with `V*B²V = (V*BV)²`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::region::RegionSpec;
use super::verdict::{convexity_verdict, Outcome, SampleConfig};
use crate::error::{Error, Result};
use crate::matkit::json::{mat, tuple};
use crate::matkit::sample::{derived_rng, sample_gaussian, sample_herm};
use crate::matkit::{direct_sum, eye, hermitian_part, is_psd, min_eig, real, vstack};
use crate::ncalg::HermTuple;
use crate::realize::Realization;
use crate::CMat;

/// Reduction residual `max_j ‖V*B_j²V − (V*B_jV)²‖` and isometry residual `‖V*V − I‖`.
pub fn reduction_residual(t: &HermTuple, v: &CMat) -> f64 {
    let iso = (v.adjoint() * v - eye(v.ncols())).camax();
    t.a.iter().fold(iso, |acc, b| {
        let c = v.adjoint() * b * v;
        acc.max((v.adjoint() * b * b * v - &c * &c).camax())
    })
}

/// `V* r(B,Z) V − r(V*(B,Z)V)`.
pub fn a2_defect(r: &Realization, t: &HermTuple, v: &CMat) -> Result<CMat> {
    let res = reduction_residual(t, v);
    if res > 1e-9 {
        return Err(Error::Domain(format!("V does not reduce the a-part (residual {res:.3e})")));
    }
    let big = r.eval(t)?;
    let small = r.eval(&t.compress(v))?;
    Ok(hermitian_part(&(v.adjoint() * big * v - small)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    /// `B = A⊕A`, `Z = X⊕Y`, `V = (I;I)/√2`
    Doubling,
    /// `B = A⊕α`, `Z = [[X,β],[β*,δ]]`, `V = (I;0)`
    Reducing,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct A2Witness {
    pub construction: Construction,
    #[serde(with = "tuple")]
    pub point: HermTuple,
    #[serde(with = "mat")]
    pub v: CMat,
    pub lambda_min: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct A2Stats {
    pub tested: usize,
    pub violations: usize,
    pub min_eig: f64,
}

impl A2Stats {
    fn new() -> Self {
        A2Stats { tested: 0, violations: 0, min_eig: f64::INFINITY }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct A2Report {
    pub doubling: A2Stats,
    pub reducing: A2Stats,
    /// largest `‖½V*(r(B,Z)+U*r(B,Z)U)V − V*r(B,Z)V‖` with `U = diag(I,−I)`
    pub u_average_residual: f64,
    pub witness: Option<A2Witness>,
    pub verdict: Outcome,
    /// both constructions and the Hessian verdict report the same answer
    pub agrees: bool,
}

impl A2Report {
    pub fn a2_convex(&self) -> bool {
        self.doubling.violations == 0 && self.reducing.violations == 0
    }
}

struct Trial {
    construction: Construction,
    point: HermTuple,
    v: CMat,
    lambda: f64,
    ok: bool,
    u_res: f64,
}

fn doubling_trial(r: &Realization, region: &RegionSpec, n: usize, tol: f64, rng: &mut impl Rng) -> Result<Option<Trial>> {
    let Some(t) = region.sample(r, n, rng)? else { return Ok(None) };
    let Some(t2) = region.sample_partner(r, &t, rng)? else { return Ok(None) };
    let mid = t.with_x(t.x.iter().zip(&t2.x).map(|(a, b)| (a + b) * real(0.5)).collect());
    if !region.contains(r, &mid)? {
        return Ok(None);
    }
    let big = t.direct_sum(&t2)?;
    let v = vstack(&[eye(n), eye(n)]) * real(std::f64::consts::FRAC_1_SQRT_2);
    let d = a2_defect(r, &big, &v)?;
    Ok(Some(Trial {
        construction: Construction::Doubling,
        lambda: min_eig(&d),
        ok: is_psd(&d, tol)?.is_psd(),
        point: big,
        v,
        u_res: 0.0,
    }))
}

fn reducing_trial(r: &Realization, region: &RegionSpec, n: usize, tol: f64, rng: &mut impl Rng) -> Result<Option<Trial>> {
    let Some(t) = region.sample(r, n, rng)? else { return Ok(None) };
    let n2 = 1 + rng.random_range(0..n);
    let s = region.scale;
    for _ in 0..region.max_attempts {
        let alpha: Vec<CMat> = (0..r.h()).map(|_| sample_herm(n2, s, rng)).collect();
        let b: Vec<CMat> = t.a.iter().zip(&alpha).map(|(a, al)| direct_sum(a, al)).collect();
        let z: Vec<CMat> = t
            .x
            .iter()
            .map(|x| {
                let beta = sample_gaussian(n, n2, rng) * real(0.5 * s);
                let delta = sample_herm(n2, s, rng);
                let mut m = direct_sum(x, &delta);
                m.view_mut((0, n), (n, n2)).copy_from(&beta);
                m.view_mut((n, 0), (n2, n)).copy_from(&beta.adjoint());
                m
            })
            .collect();
        let big = HermTuple { n: n + n2, a: b, x: z };
        if !region.contains(r, &big)? {
            continue;
        }
        // the U-averaged point (B, X⊕δ) must lie in the region too
        let u = direct_sum(&eye(n), &(eye(n2) * real(-1.0)));
        let ub = big.conjugate(&u);
        let avg = big.with_x(big.x.iter().zip(&ub.x).map(|(p, q)| (p + q) * real(0.5)).collect());
        if !region.contains(r, &avg)? {
            continue;
        }
        let v = vstack(&[eye(n), CMat::zeros(n2, n)]);
        let d = a2_defect(r, &big, &v)?;
        let rb = r.eval(&big)?;
        let via_u = (v.adjoint() * (&rb + u.adjoint() * &rb * &u) * &v) * real(0.5);
        let u_res = (via_u - v.adjoint() * rb * &v).camax();
        return Ok(Some(Trial {
            construction: Construction::Reducing,
            lambda: min_eig(&d),
            ok: is_psd(&d, tol)?.is_psd(),
            point: big,
            v,
            u_res,
        }));
    }
    Ok(None)
}

/// Samples both constructions on `region` and compares with [`convexity_verdict`].
pub fn a2_convexity_test(r: &Realization, region: &RegionSpec, cfg: &SampleConfig) -> Result<A2Report> {
    region.check()?;
    let mut doubling = A2Stats::new();
    let mut reducing = A2Stats::new();
    let mut witness: Option<A2Witness> = None;
    let mut u_average_residual = 0.0f64;
    for &n in &cfg.sizes {
        let trials: Vec<Vec<Trial>> = (0..cfg.samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = derived_rng(cfg.seed ^ 0xa2, n as u64, i as u64);
                let mut out = vec![];
                if let Some(t) = doubling_trial(r, region, n, cfg.tol_psd, &mut rng)? {
                    out.push(t);
                }
                if let Some(t) = reducing_trial(r, region, n, cfg.tol_psd, &mut rng)? {
                    out.push(t);
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        for t in trials.into_iter().flatten() {
            let st = match t.construction {
                Construction::Doubling => &mut doubling,
                Construction::Reducing => &mut reducing,
            };
            st.tested += 1;
            st.min_eig = st.min_eig.min(t.lambda);
            u_average_residual = u_average_residual.max(t.u_res);
            if !t.ok {
                st.violations += 1;
                if witness.as_ref().is_none_or(|w| t.lambda < w.lambda_min) {
                    witness = Some(A2Witness { construction: t.construction, point: t.point, v: t.v, lambda_min: t.lambda });
                }
            }
        }
    }
    if doubling.tested + reducing.tested == 0 {
        return Err(Error::RegionEmpty(cfg.samples * cfg.sizes.len() * region.max_attempts));
    }
    let verdict = convexity_verdict(r, region, cfg)?.outcome;
    let a2_fail = doubling.violations > 0 || reducing.violations > 0;
    let agrees = match verdict {
        Outcome::NotConvex => a2_fail,
        Outcome::ConvexEvidence => !a2_fail,
        Outcome::Inconclusive => false,
    };
    Ok(A2Report { doubling, reducing, u_average_residual, witness, verdict, agrees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::sample::{rng_from_seed, sample_tuple};
    use crate::ncalg::{parse_poly, VarContext};
    use crate::partialcvx::midpoint_defect;
    use crate::realize::linearize_poly;

    fn ctx() -> VarContext {
        VarContext::with_names(&["a"], &["x"]).unwrap()
    }

    #[test]
    fn identity_isometry_is_exact() {
        let r = linearize_poly(&parse_poly("x a x + x^4", Some(&ctx())).unwrap()).unwrap();
        let mut rng = rng_from_seed(1);
        let t = sample_tuple(3, 1, 1, 0.5, &mut rng);
        assert!(a2_defect(&r, &t, &eye(3)).unwrap().camax() < 1e-12);
    }

    #[test]
    fn doubling_is_midpoint() {
        let r = linearize_poly(&parse_poly("x^4", None).unwrap()).unwrap();
        let mut rng = rng_from_seed(2);
        let t = sample_tuple(2, 0, 1, 1.0, &mut rng);
        let y = sample_tuple(2, 0, 1, 1.0, &mut rng).x;
        let v = vstack(&[eye(2), eye(2)]) * real(std::f64::consts::FRAC_1_SQRT_2);
        let d = a2_defect(&r, &t.direct_sum(&t.with_x(y.clone())).unwrap(), &v).unwrap();
        let m = midpoint_defect(&r, &t, &y).unwrap();
        assert!((d - m).camax() < 1e-10);
    }

    #[test]
    fn xax_matches_verdict() {
        let r = linearize_poly(&parse_poly("x a x", Some(&ctx())).unwrap()).unwrap();
        let cfg = SampleConfig { sizes: vec![2, 3], samples: 15, ..Default::default() };
        let pos = RegionSpec::domain(1.0).with_constraints(RegionSpec::parse_constraints("a", &r.ctx).unwrap());
        let rep = a2_convexity_test(&r, &pos, &cfg).unwrap();
        assert!(rep.a2_convex() && rep.agrees, "{rep:?}");
        assert!(rep.u_average_residual < 1e-10);
        let neg = RegionSpec::domain(1.0).with_constraints(RegionSpec::parse_constraints("-a", &r.ctx).unwrap());
        let rep = a2_convexity_test(&r, &neg, &cfg).unwrap();
        assert!(!rep.a2_convex() && rep.agrees);
    }
}
