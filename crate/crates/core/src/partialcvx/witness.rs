//! Dispersed-variable negativity witnesses.
//!
//! If `R_T(A²,X²)` has a negative direction `u`, pick a companion point
//! `(A¹,X¹)` of size `M`, directions `H` and `w: C^M → C^m` such that
//! `Ẑ = (V⊗I_m)*(Σ T_i⊗wH_i) R(A¹,X¹)(c⊗I_M)` is onto. With `k_i = H_i w*`
//! the tuple `x = X¹⊕X²`, `a = A¹⊕A²`, `h_i = [[0,k_i],[k_i*,0]]` and
//! `η = (Ẑ⁺u; 0)` give `η* r_xx η = 2 u* R_T u < 0`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hessian::partial_hessian;
use super::region::RegionSpec;
use crate::error::{Error, Result};
use crate::matkit::json::{mat, mats, tuple};
use crate::matkit::sample::{sample_gaussian, sample_herm};
use crate::matkit::{checked_svd, eigh, eye, hstack, kron, range_basis};
use crate::ncalg::HermTuple;
use crate::realize::{RangeTFrame, Realization};
use crate::tol::TOL_PSD;
use crate::CMat;

const SPAN_RTOL: f64 = 1e-8;

/// Companion data produced by [`span_probe`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpanProbe {
    #[serde(with = "tuple")]
    pub point: HermTuple,
    /// `m × M`
    #[serde(with = "mat")]
    pub w: CMat,
    #[serde(with = "mats")]
    pub directions: Vec<CMat>,
    /// `Ẑ`, shape `km × M`
    #[serde(with = "mat")]
    pub z: CMat,
    pub achieved: usize,
    pub target: usize,
    pub rounds: usize,
    /// achieved dimension after each accepted probe
    pub history: Vec<usize>,
}

impl SpanProbe {
    pub fn saturated(&self) -> bool {
        self.achieved == self.target
    }
}

/// `(V⊗I_m)* (Σ T_i ⊗ w H_i) R(t) (c⊗I_M)`.
pub fn span_block(r: &Realization, frame: &RangeTFrame, t: &HermTuple, h: &[CMat], w: &CMat) -> Result<CMat> {
    let m = w.nrows();
    let res = r.resolvent(t)?;
    let mut op = CMat::zeros(r.e() * m, r.e() * t.n);
    for (ti, hi) in r.t.iter().zip(h) {
        op += kron(ti, &(w * hi));
    }
    let vb = kron(&frame.v, &eye(m));
    Ok(vb.adjoint() * op * res * r.c_block(t.n))
}

fn rank(m: &CMat) -> usize {
    range_basis(m, SPAN_RTOL).ncols()
}

/// Direct-sums random probes until `Ẑ` reaches rank `k·m` or `20·k·m` rounds pass.
///
/// Size-1 probes are tried first; the probe size grows after three
/// consecutive probes that add nothing.
pub fn span_probe(r: &Realization, region: &RegionSpec, m: usize, rng: &mut impl Rng) -> Result<SpanProbe> {
    let frame = r.range_t_frame();
    let target = frame.k() * m;
    let mut point: Option<HermTuple> = None;
    let mut dirs: Vec<CMat> = vec![CMat::zeros(0, 0); r.g()];
    let mut w = CMat::zeros(m, 0);
    let mut z = CMat::zeros(target, 0);
    let mut achieved = 0;
    let mut history = vec![];
    let mut rounds = 0;
    let mut size = 1;
    let mut stale = 0;
    while achieved < target && rounds < 20 * target {
        rounds += 1;
        let cand = match region.sample(r, size, rng)? {
            Some(t) => t,
            None => {
                stale += 1;
                if stale >= 3 {
                    size += 1;
                    stale = 0;
                }
                continue;
            }
        };
        let h: Vec<CMat> = (0..r.g()).map(|_| sample_herm(size, 1.0, rng)).collect();
        let wj = sample_gaussian(m, size, rng);
        let zj = span_block(r, &frame, &cand, &h, &wj)?;
        let joined = hstack(&[z.clone(), zj]);
        let rk = rank(&joined);
        if rk > achieved {
            achieved = rk;
            history.push(rk);
            z = joined;
            w = hstack(&[w, wj]);
            dirs = dirs.iter().zip(&h).map(|(d, hi)| crate::matkit::direct_sum(d, hi)).collect();
            point = Some(match point {
                Some(p) => p.direct_sum(&cand)?,
                None => cand,
            });
            stale = 0;
        } else {
            stale += 1;
            if stale >= 3 {
                size += 1;
                stale = 0;
            }
        }
    }
    let point = point.unwrap_or_else(|| HermTuple::zeros(0, r.h(), r.g()));
    Ok(SpanProbe { point, w, directions: dirs, z, achieved, target, rounds, history })
}

/// Doubled-size point, direction and unit vector with `η* r_xx η < 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexityWitness {
    #[serde(with = "tuple")]
    pub point: HermTuple,
    #[serde(with = "mats")]
    pub direction: Vec<CMat>,
    /// unit column vector `η`
    #[serde(with = "mat")]
    pub eta: CMat,
    /// `η* r_xx η` as constructed
    pub value: f64,
    pub margin: f64,
    /// size of the companion block
    pub companion_size: usize,
    /// `λ_min(R_T)` at the bad point
    pub bad_lambda: f64,
}

impl ConvexityWitness {
    /// Recomputes `η* r_xx(A,X)[H] η` from the stored data.
    pub fn reverify(&self, r: &Realization) -> Result<f64> {
        let p = partial_hessian(r, &self.point, &self.direction)?;
        Ok((self.eta.adjoint() * p.value * &self.eta)[(0, 0)].re)
    }

    pub fn is_valid(&self, r: &Realization) -> bool {
        self.reverify(r).map(|v| v < 0.0).unwrap_or(false)
    }
}

/// Builds a witness from a point where `R_T` has a negative eigenvalue.
/// Companion points are drawn from `companion`.
pub fn negativity_witness(
    r: &Realization,
    bad: &HermTuple,
    companion: &RegionSpec,
    rng: &mut impl Rng,
) -> Result<ConvexityWitness> {
    let frame = r.range_t_frame();
    let rt = r.r_t_with(&frame, bad)?;
    let (vals, vecs) = eigh(&rt);
    let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if vals.is_empty() || vals[0] >= -TOL_PSD * scale {
        return Err(Error::Domain("R_T has no negative eigenvalue at the given point".into()));
    }
    let u = vecs.column(0).into_owned();
    let m = bad.n;
    let probe = span_probe(r, companion, m, rng)?;
    if !probe.saturated() {
        return Err(Error::SpanFailure { achieved: probe.achieved, target: probe.target });
    }
    let big_m = probe.point.n;
    let v = checked_svd(&probe.z)
        .solve(&u, 1e-12)
        .map_err(|e| Error::Singular(e.to_string()))?;
    let point = probe.point.direct_sum(bad)?;
    let direction: Vec<CMat> = probe
        .directions
        .iter()
        .map(|hi| {
            let k = hi * probe.w.adjoint();
            let mut d = CMat::zeros(big_m + m, big_m + m);
            d.view_mut((0, big_m), (big_m, m)).copy_from(&k);
            d.view_mut((big_m, 0), (m, big_m)).copy_from(&k.adjoint());
            d
        })
        .collect();
    let nv = v.norm();
    let mut eta = CMat::zeros(big_m + m, 1);
    eta.view_mut((0, 0), (big_m, 1)).copy_from(&(v / crate::matkit::real(nv)));
    let mut w = ConvexityWitness {
        point,
        direction,
        eta,
        value: 0.0,
        margin: 0.0,
        companion_size: big_m,
        bad_lambda: vals[0],
    };
    let value = w.reverify(r)?;
    if value >= 0.0 {
        return Err(Error::Domain(format!("constructed witness is not negative ({value:.3e})")));
    }
    w.value = value;
    w.margin = value.abs();
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::min_eig;
    use crate::matkit::sample::{rng_from_seed, sample_tuple};
    use crate::ncalg::parse_poly;
    use crate::realize::{linearize_poly, minimize};

    fn find_bad(r: &Realization, n: usize, scale: f64, seed: u64) -> HermTuple {
        let mut rng = rng_from_seed(seed);
        loop {
            let t = sample_tuple(n, r.h(), r.g(), scale, &mut rng);
            if let Ok(rt) = r.r_t(&t) {
                if min_eig(&rt) < -1e-3 {
                    return t;
                }
            }
        }
    }

    #[test]
    fn zero_target() {
        let ctx = crate::ncalg::VarContext::with_names(&["a"], &["x"]).unwrap();
        let r = linearize_poly(&parse_poly("a^2", Some(&ctx)).unwrap()).unwrap();
        let mut rng = rng_from_seed(1);
        let p = span_probe(&r, &RegionSpec::domain(1.0), 2, &mut rng).unwrap();
        assert_eq!(p.target, 0);
        assert!(p.saturated());
    }

    #[test]
    fn square_saturates_fast() {
        let r = linearize_poly(&parse_poly("x^2", None).unwrap()).unwrap();
        let mut rng = rng_from_seed(2);
        let p = span_probe(&r, &RegionSpec::domain(1.0), 1, &mut rng).unwrap();
        assert!(p.saturated());
        assert!(p.point.n <= p.target);
        assert!(p.history.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn quartic_witness() {
        let r = minimize(&linearize_poly(&parse_poly("x^4", None).unwrap()).unwrap()).unwrap();
        let bad = find_bad(&r, 1, 2.0, 3);
        let mut rng = rng_from_seed(4);
        let w = negativity_witness(&r, &bad, &RegionSpec::domain(1.0), &mut rng).unwrap();
        assert!(w.value < 0.0);
        assert!(w.is_valid(&r));
        let p = partial_hessian(&r, &w.point, &w.direction).unwrap();
        assert!(p.lambda_min < 0.0);
    }

    #[test]
    fn scalar_geometric() {
        // r = 1/(1-x): R_T = 1/(1-x) < 0 for x > 1
        let r = crate::realize::geometric_series();
        let bad = HermTuple::with_size(1, vec![], vec![CMat::from_element(1, 1, crate::matkit::real(3.0))]).unwrap();
        let mut rng = rng_from_seed(5);
        let w = negativity_witness(&r, &bad, &RegionSpec::domain(0.5), &mut rng).unwrap();
        assert_eq!(w.point.n, 2);
        assert!(w.value < 0.0);
    }
}
