//! Sampled scans: xy-pair defects, middle-matrix positivity, and the hat-substitution
//! comparison between `Q` and `Mxy`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hessian::{
    middle_matrix, sample_xy_pair, xy_convexity_test, xy_hessian_substitution, MiddleMatrixEval, MxyInputs, XYPair,
};
use super::pl::PLPoly;
use super::qp::extract_q;
use crate::error::Result;
use crate::matkit::json::mat;
use crate::matkit::sample::derived_rng;
use crate::matkit::{direct_sum, eigh, eye, hermitian_part, hstack, is_psd, min_eig, real, vstack};
use crate::ncalg::{FreePoly, HermTuple};
use crate::tol::TOL_PSD;
use crate::CMat;

/// Constraints `q(X,Y) ≻ band` on the full pair.
fn in_region(constraints: &[FreePoly], x: &CMat, y: &CMat, band: f64) -> Result<bool> {
    if constraints.is_empty() {
        return Ok(true);
    }
    let t = HermTuple::with_size(x.nrows(), vec![], vec![x.clone(), y.clone()])?;
    for q in constraints {
        if min_eig(&hermitian_part(&q.eval(&t)?)) < band {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone)]
pub struct PairScanConfig {
    /// block sizes `(n0, n1, n2)`
    pub dims: Vec<(usize, usize, usize)>,
    pub samples: usize,
    pub scale: f64,
    pub seed: u64,
    pub tol_psd: f64,
    /// pairs must satisfy `q(X,Y) ≻ band` for each constraint
    pub constraints: Vec<FreePoly>,
    pub band: f64,
    pub max_attempts: usize,
}

impl Default for PairScanConfig {
    fn default() -> Self {
        PairScanConfig {
            dims: vec![(2, 1, 1), (2, 2, 2), (3, 2, 1)],
            samples: 40,
            scale: 1.0,
            seed: 0,
            tol_psd: TOL_PSD,
            constraints: vec![],
            band: 1e-6,
            max_attempts: 200,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairWitness {
    pub pair: XYPair,
    pub lambda_min: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairScanReport {
    pub tested: usize,
    pub violations: usize,
    pub min_eig: f64,
    pub witness: Option<PairWitness>,
}

/// Samples xy-pairs and eigenchecks `V*p(X,Y)V − p(X0,Y0)`.
pub fn xy_pair_scan(p: &FreePoly, cfg: &PairScanConfig) -> Result<PairScanReport> {
    let mut rep = PairScanReport { tested: 0, violations: 0, min_eig: f64::INFINITY, witness: None };
    for (di, &dims) in cfg.dims.iter().enumerate() {
        let found: Vec<Option<(XYPair, f64, bool)>> = (0..cfg.samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = derived_rng(cfg.seed ^ 0x5a, di as u64, i as u64);
                for _ in 0..cfg.max_attempts {
                    let q = sample_xy_pair(dims, cfg.scale, &mut rng);
                    let (x, y) = (q.x(), q.y());
                    if !in_region(&cfg.constraints, &x, &y, cfg.band)? {
                        continue;
                    }
                    // the compressed pair must lie in the region too
                    if !in_region(&cfg.constraints, &q.s0, &q.t0, cfg.band)? {
                        continue;
                    }
                    let d = xy_convexity_test(p, &x, &y, &q.v(), cfg.tol_psd)?;
                    return Ok(Some((q, d.lambda_min, d.psd)));
                }
                Ok(None)
            })
            .collect::<Result<_>>()?;
        for (q, lam, ok) in found.into_iter().flatten() {
            rep.tested += 1;
            rep.min_eig = rep.min_eig.min(lam);
            if !ok {
                rep.violations += 1;
                if rep.witness.as_ref().is_none_or(|w| lam < w.lambda_min) {
                    rep.witness = Some(PairWitness { pair: q, lambda_min: lam });
                }
            }
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone)]
pub struct MxyScanConfig {
    /// `(n1, n2)`: size of `δ0` and of `β2`
    pub sizes: Vec<(usize, usize)>,
    pub samples: usize,
    pub scale: f64,
    pub seed: u64,
    pub tol_psd: f64,
    /// reject inputs whose largest spectral norm reaches this bound
    pub admissible: Option<f64>,
    /// build the xy-pair realizing a negative direction
    pub completion: bool,
    /// descent steps on `λ_min` from each sample (0: plain sampling)
    pub refine: usize,
    /// region used to test whether the completed pair can be placed in its interior
    pub lift_region: Vec<FreePoly>,
}

impl Default for MxyScanConfig {
    fn default() -> Self {
        MxyScanConfig {
            sizes: vec![(1, 1), (2, 2), (2, 3)],
            samples: 60,
            scale: 1.0,
            seed: 0,
            tol_psd: TOL_PSD,
            admissible: None,
            completion: true,
            refine: 0,
            lift_region: vec![],
        }
    }
}

/// xy-pair built from a negative direction `f` of `Mxy`: `h = e1`,
/// `X0 = Y0 = ε·[[0,1],[1,0]]` and `A, C` solving `B(X0,Y0,A,C)* h = τ f`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorCompletion {
    #[serde(with = "mat")]
    pub h: CMat,
    pub pair: XYPair,
    pub eps: f64,
    pub tau: f64,
    /// `h* (V*p(X,Y)V − p(X0,Y0)) h`
    pub value: f64,
    /// `τ² f* Mxy f`
    pub predicted: f64,
    /// some `ε` put the pair in the interior of `lift_region`; `None` without a region
    pub lifts_to_interior: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MxyWitness {
    pub eval: MiddleMatrixEval,
    pub lambda_min: f64,
    #[serde(with = "mat")]
    pub eigvec: CMat,
    pub completion: Option<VectorCompletion>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MxyScanReport {
    pub all_psd: bool,
    pub tested: usize,
    pub rejected_inputs: usize,
    pub min_eig: f64,
    pub witness: Option<MxyWitness>,
}

/// The completion pair for a direction `f = (f1, f2, f3, f4)`.
pub fn complete_direction(inp: &MxyInputs, f: &CMat, eps: f64, tau: f64) -> XYPair {
    let (n1, n2) = inp.sizes();
    let f1 = f.view((0, 0), (n1, 1)).into_owned();
    let f2 = f.view((n1, 0), (n1, 1)).into_owned();
    let f3 = f.view((2 * n1, 0), (n2, 1)).into_owned();
    let f4 = f.view((2 * n1 + n2, 0), (n2, 1)).into_owned();
    let swap = CMat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]) * real(eps);
    // A* = [τ f1, τ f2 / ε], so A*h = τ f1 and A*Y0 h = τ f2
    let alpha = hstack(&[f1 * real(tau), f2 * real(tau / eps)]).adjoint();
    let gamma = hstack(&[f3 * real(tau), f4 * real(tau / eps)]).adjoint();
    XYPair {
        s0: swap.clone(),
        t0: swap,
        alpha,
        gamma,
        beta: vec![CMat::zeros(n1, n1), inp.beta1.clone(), inp.beta2.clone()],
        delta: vec![inp.delta0.clone(), inp.delta1.clone(), CMat::zeros(n2, n2)],
    }
}

fn completion_for(p: &PLPoly, inp: &MxyInputs, f: &CMat, m_val: f64, region: &[FreePoly]) -> Result<VectorCompletion> {
    let mut h = CMat::zeros(2, 1);
    h[(0, 0)] = real(1.0);
    let value_at = |q: &XYPair| (h.adjoint() * xy_hessian_substitution(p, q) * &h)[(0, 0)].re;
    let (eps, tau) = (1.0, 1.0);
    let pair = complete_direction(inp, f, eps, tau);
    let value = value_at(&pair);
    let lifts_to_interior = if region.is_empty() {
        None
    } else {
        let mut ok = false;
        for e in [1.0, 0.3, 0.1, 0.03, 0.01] {
            let q = complete_direction(inp, f, e, e * e);
            if in_region(region, &q.x(), &q.y(), 1e-9)? && in_region(region, &q.s0, &q.t0, 1e-9)? {
                ok = true;
                break;
            }
        }
        Some(ok)
    };
    Ok(VectorCompletion { h, pair, eps, tau, value, predicted: tau * tau * m_val, lifts_to_interior })
}

const DRAW_ATTEMPTS: usize = 200;

/// Rejection sampling under the admissibility bound; also returns the number of rejected draws.
fn draw_inputs(n1: usize, n2: usize, cfg: &MxyScanConfig, rng: &mut impl Rng) -> (Option<MxyInputs>, usize) {
    for k in 0..DRAW_ATTEMPTS {
        let inp = MxyInputs::sample(n1, n2, cfg.scale, rng);
        if !cfg.admissible.is_some_and(|b| inp.max_norm() >= b) {
            return (Some(inp), k);
        }
    }
    (None, DRAW_ATTEMPTS)
}

/// Shrinks every input to norm below the bound.
fn project(mut inp: MxyInputs, bound: Option<f64>) -> MxyInputs {
    if let Some(b) = bound {
        let cap = b * (1.0 - 1e-9);
        for m in [&mut inp.beta1, &mut inp.beta2, &mut inp.delta0, &mut inp.delta1] {
            let nm = crate::matkit::spectral_norm(m);
            if nm > cap {
                *m *= real(cap / nm);
            }
        }
    }
    inp
}

/// Random-perturbation descent on `λ_min(Mxy)` for `cfg.refine` steps, staying admissible.
fn refine(p: &PLPoly, inp: MxyInputs, cfg: &MxyScanConfig, rng: &mut impl Rng) -> Result<MiddleMatrixEval> {
    let mut best = middle_matrix(p, &inp)?;
    let mut lam = best.lambda_min();
    let (n1, n2) = inp.sizes();
    for k in 0..cfg.refine {
        let step = cfg.scale * (0.3 * (1.0 - k as f64 / cfg.refine as f64) + 1e-3);
        let d = MxyInputs::sample(n1, n2, step, rng);
        let c = &best.inputs;
        let cand = MxyInputs {
            beta1: &c.beta1 + d.beta1,
            beta2: &c.beta2 + d.beta2,
            delta0: &c.delta0 + d.delta0,
            delta1: &c.delta1 + d.delta1,
        };
        let m = middle_matrix(p, &project(cand, cfg.admissible))?;
        let l = m.lambda_min();
        if l < lam {
            best = m;
            lam = l;
        }
    }
    Ok(best)
}

/// Samples inputs `(β1, β2, δ0, δ1)`, optionally refines them, and eigenchecks `Mxy`.
pub fn middle_matrix_psd_scan(p: &PLPoly, cfg: &MxyScanConfig) -> Result<MxyScanReport> {
    let mut rep = MxyScanReport { all_psd: true, tested: 0, rejected_inputs: 0, min_eig: f64::INFINITY, witness: None };
    let mut worst: Option<(MiddleMatrixEval, f64)> = None;
    for (si, &(n1, n2)) in cfg.sizes.iter().enumerate() {
        let evals: Vec<(Option<(MiddleMatrixEval, f64, bool)>, usize)> = (0..cfg.samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = derived_rng(cfg.seed ^ 0x3b, si as u64, i as u64);
                let (inp, rejects) = draw_inputs(n1, n2, cfg, &mut rng);
                let Some(inp) = inp else {
                    return Ok((None, rejects));
                };
                let m = refine(p, inp, cfg, &mut rng)?;
                let ok = is_psd(&m.value, cfg.tol_psd)?.is_psd();
                let lam = m.lambda_min();
                Ok((Some((m, lam, ok)), rejects))
            })
            .collect::<Result<_>>()?;
        for (e, rejects) in evals {
            rep.rejected_inputs += rejects;
            let Some((m, lam, ok)) = e else {
                continue;
            };
            rep.tested += 1;
            rep.min_eig = rep.min_eig.min(lam);
            if !ok {
                rep.all_psd = false;
                if worst.as_ref().is_none_or(|(_, l)| lam < *l) {
                    worst = Some((m, lam));
                }
            }
        }
    }
    if let Some((eval, lambda_min)) = worst {
        let (_, vecs) = eigh(&eval.value);
        let eigvec = vecs.columns(0, 1).into_owned();
        let completion = if cfg.completion {
            Some(completion_for(p, &eval.inputs, &eigvec, lambda_min, &cfg.lift_region)?)
        } else {
            None
        };
        rep.witness = Some(MxyWitness { eval, lambda_min, eigvec, completion });
    }
    Ok(rep)
}

/// `(δ̂0, δ̂1, β̂1, β̂2)` for parameter `t`; sizes become `(n+m, m+n)`.
pub fn hat_inputs(inp: &MxyInputs, t: f64) -> MxyInputs {
    let (n, m) = inp.sizes();
    let d0 = direct_sum(&inp.delta0, &CMat::zeros(m, m));
    let d1 = vstack(&[
        hstack(&[inp.delta1.clone(), CMat::zeros(n, n)]),
        hstack(&[eye(m) * real(t), CMat::zeros(m, n)]),
    ]);
    let b1 = vstack(&[
        hstack(&[inp.beta1.clone(), eye(n) * real(t)]),
        hstack(&[CMat::zeros(m, m), CMat::zeros(m, n)]),
    ]);
    let b2 = direct_sum(&inp.beta2, &CMat::zeros(n, n));
    MxyInputs { beta1: b1, beta2: b2, delta0: d0, delta1: d1 }
}

/// `Q(hat)` conjugated by `diag(1, 1/t)` per block, with blocks 2 and 4 swapped.
pub fn q_prime(p: &PLPoly, inp: &MxyInputs, t: f64) -> Result<CMat> {
    let (n, m) = inp.sizes();
    let q = extract_q(p, &hat_inputs(inp, t))?;
    let d = direct_sum(&direct_sum(&eye(n), &(eye(m) * real(1.0 / t))), &direct_sum(&eye(m), &(eye(n) * real(1.0 / t))));
    let qp = &d * q * &d;
    // block order (n, m, m, n) → (n, n, m, m)
    let offs = [0, n, n + m, 2 * m + n];
    let lens = [n, m, m, n];
    let order = [0usize, 3, 2, 1];
    let idx: Vec<usize> = order.iter().flat_map(|&b| offs[b]..offs[b] + lens[b]).collect();
    Ok(CMat::from_fn(idx.len(), idx.len(), |i, j| qp[(idx[i], idx[j])]))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub t: f64,
    /// `max |Q′ − Mxy|` over sampled inputs
    pub max_deviation: f64,
    /// the same at `β = δ = 0`
    pub zero_input_deviation: f64,
    /// `max(|p_x²|, |p_y²|) / t²`, the size of the surviving diagonal terms
    pub predicted: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub rows: Vec<EquivalenceRow>,
    pub samples: usize,
}

/// Compares `Q′(t)` with the middle matrix at sampled inputs of sizes `(n, m)`.
pub fn mxy_q_equivalence_probe(
    p: &PLPoly,
    dims: (usize, usize),
    t_values: &[f64],
    samples: usize,
    scale: f64,
    seed: u64,
) -> Result<EquivalenceReport> {
    let (n, m) = dims;
    let inputs: Vec<MxyInputs> = (0..samples)
        .map(|i| MxyInputs::sample(n, m, scale, &mut derived_rng(seed ^ 0x71, 0, i as u64)))
        .collect();
    let predicted_at = |t: f64| p[super::pl::Mono::X2].norm().max(p[super::pl::Mono::Y2].norm()) / (t * t);
    let mut rows = vec![];
    for &t in t_values {
        let mut dev = 0.0f64;
        for inp in &inputs {
            let d = (q_prime(p, inp, t)? - middle_matrix(p, inp)?.value).camax();
            dev = dev.max(d);
        }
        let z = MxyInputs::zeros(n, m);
        let zero_input_deviation = (q_prime(p, &z, t)? - middle_matrix(p, &z)?.value).camax();
        rows.push(EquivalenceRow { t, max_deviation: dev, zero_input_deviation, predicted: predicted_at(t) });
    }
    Ok(EquivalenceReport { rows, samples })
}

/// Positivity scan of `Q` at hat-substituted inputs with parameter `t`.
pub fn q_psd_scan(p: &PLPoly, cfg: &MxyScanConfig, t: f64) -> Result<MxyScanReport> {
    let mut rep = MxyScanReport { all_psd: true, tested: 0, rejected_inputs: 0, min_eig: f64::INFINITY, witness: None };
    for (si, &(n1, n2)) in cfg.sizes.iter().enumerate() {
        for i in 0..cfg.samples {
            let mut rng = derived_rng(cfg.seed ^ 0x3b, si as u64, i as u64);
            let (inp, rejects) = draw_inputs(n1, n2, cfg, &mut rng);
            rep.rejected_inputs += rejects;
            let Some(inp) = inp else {
                continue;
            };
            let q = q_prime(p, &inp, t)?;
            let lam = min_eig(&q);
            rep.tested += 1;
            rep.min_eig = rep.min_eig.min(lam);
            if !is_psd(&q, cfg.tol_psd)?.is_psd() {
                rep.all_psd = false;
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xycvx::pl::Mono;

    fn a3() -> PLPoly {
        PLPoly::from_real(&[
            (Mono::X2, 1.0),
            (Mono::Y2, 1.0),
            (Mono::XY2X, 1.0),
            (Mono::XYXY, 2.0),
            (Mono::YXYX, 2.0),
            (Mono::YX2Y, 1.0),
        ])
    }

    #[test]
    fn squares_scan_psd() {
        let p = PLPoly::from_real(&[(Mono::X2, 1.0), (Mono::Y2, 1.0)]);
        let r = middle_matrix_psd_scan(&p, &MxyScanConfig { samples: 10, ..Default::default() }).unwrap();
        assert!(r.all_psd && r.witness.is_none());
    }

    #[test]
    fn example_small_and_large() {
        let p = a3();
        let small = MxyScanConfig { scale: 0.1, samples: 30, ..Default::default() };
        assert!(middle_matrix_psd_scan(&p, &small).unwrap().all_psd);
        let large = MxyScanConfig { scale: 3.0, samples: 60, ..Default::default() };
        let r = middle_matrix_psd_scan(&p, &large).unwrap();
        let w = r.witness.expect("indefinite middle matrix");
        let c = w.completion.unwrap();
        assert!(c.value < 0.0);
        assert!((c.value - c.predicted).abs() < 1e-8 * c.predicted.abs().max(1.0));
    }

    #[test]
    fn q_prime_limit() {
        let p = a3();
        let rep = mxy_q_equivalence_probe(&p, (2, 1), &[1e2, 1e4, 1e6], 5, 0.5, 1).unwrap();
        for r in &rep.rows {
            assert!(r.max_deviation <= 10.0 * r.predicted + 1e-9, "{r:?}");
        }
        assert!(rep.rows[2].max_deviation < 1e-4);
    }
}
