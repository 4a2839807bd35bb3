use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::AnalysisConfig;
use super::report::{Report, Status};
use crate::error::{Error, Result};
use crate::matkit::json::{tuple, MatJson};
use crate::matkit::sample::{derived_rng, sample_herm_on_sphere};
use crate::matkit::{hermitian_residual, min_eig};
use crate::ncalg::{parse_poly_file, to_text, FreePoly, HermTuple, TupleFile, VarContext};
use crate::partialcvx::{convexity_verdict, negativity_witness, partial_hessian, ConvexityWitness, Outcome, RegionSpec};
use crate::realize::{linearize_poly, poly_butterfly, Realization, RealizationFile};
use crate::xycvx::{
    middle_matrix_psd_scan, xy_analyze, MxyScanConfig, MxyScanReport, PairScanConfig, XYConfig, XYOutcome,
};
use crate::CMat;

/// A polynomial text file or a realization JSON file.
#[derive(Debug, Clone)]
pub enum Input {
    Poly(FreePoly),
    Realization(Realization),
}

impl Input {
    pub fn parse(src: &str) -> Result<Self> {
        if src.trim_start().starts_with('{') {
            let f: RealizationFile = serde_json::from_str(src)?;
            Ok(Input::Realization(f.to_realization()?))
        } else {
            Ok(Input::Poly(parse_poly_file(src)?.poly))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn ctx(&self) -> &VarContext {
        match self {
            Input::Poly(p) => p.ctx(),
            Input::Realization(r) => &r.ctx,
        }
    }

    pub fn realization(&self) -> Result<Realization> {
        match self {
            Input::Poly(p) => linearize_poly(p),
            Input::Realization(r) => Ok(r.clone()),
        }
    }
}

/// Tuple JSON; matrices need not be Hermitian for evaluation.
pub fn load_tuple(path: &Path) -> Result<HermTuple> {
    let f: TupleFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    f.to_general_tuple()
}

/// Plain-text matrix, one row per line; real entries print without an imaginary part.
pub fn format_matrix(m: &CMat) -> String {
    let cell = |z: crate::C64| {
        if z.im == 0.0 {
            format!("{}", z.re)
        } else {
            format!("{}{:+}i", z.re, z.im)
        }
    };
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| cell(m[(i, j)])).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalResult {
    pub n: usize,
    pub value: MatJson,
    pub hermitian_residual: f64,
}

impl EvalResult {
    pub fn matrix(&self) -> Result<CMat> {
        self.value.to_mat()
    }
}

pub fn eval_input(input: &Input, t: &HermTuple, cfg: &AnalysisConfig) -> Result<EvalResult> {
    let value = match input {
        Input::Poly(p) => p.eval(t)?,
        Input::Realization(r) => {
            if t.a.len() != r.h() || t.x.len() != r.g() {
                return Err(Error::Context(format!(
                    "tuple has {}+{} matrices, realization expects {}+{}",
                    t.a.len(),
                    t.x.len(),
                    r.h(),
                    r.g()
                )));
            }
            if !r.in_dom_tol(t, cfg.tol_inv) {
                return Err(Error::NotInDomain);
            }
            r.eval(t)?
        }
    };
    Ok(EvalResult { n: t.n, hermitian_residual: hermitian_residual(&value), value: MatJson::from(&value) })
}

pub fn cmd_eval(input: &Input, t: &HermTuple, cfg: &AnalysisConfig) -> Result<Report> {
    cfg.validate()?;
    let mut rep = Report::new("eval", cfg);
    rep.timed("eval", || eval_input(input, t, cfg))?;
    Ok(rep)
}

/// Matrix polynomial as a list of `(word, coefficient)` pairs.
#[derive(Debug, Clone, Serialize)]
pub struct TermJson {
    pub word: String,
    pub coeff: MatJson,
}

fn poly_terms(p: &FreePoly) -> Vec<TermJson> {
    p.terms()
        .map(|(w, c)| {
            let word = if w.is_empty() {
                "1".to_string()
            } else {
                w.letters().iter().map(|&l| p.ctx().letter(l).name.clone()).collect::<Vec<_>>().join(" ")
            };
            TermJson { word, coeff: MatJson::from(c) }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ButterflyData {
    pub k: usize,
    pub ell: Vec<TermJson>,
    pub w: Vec<TermJson>,
    pub fbar: Vec<TermJson>,
    /// `w` as text when it is scalar-sized
    pub w_text: Option<String>,
    pub residual: f64,
    /// sampled points checked; `disagreements` counts those where `w(A) ⪰ 0` and dom⁺ membership differ
    pub probes: usize,
    pub disagreements: usize,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ButterflyOutcome {
    Built(Box<ButterflyData>),
    NotConvexible { reason: String },
    NotApplicable { reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct WorstPoint {
    #[serde(with = "tuple")]
    pub point: HermTuple,
    pub rt_min_eig: f64,
}

/// dom⁺ membership and Hessian positivity over samples from the region.
#[derive(Debug, Clone, Serialize)]
pub struct DomPlusScan {
    pub sampled: usize,
    pub in_dom_plus: usize,
    /// smallest Hessian eigenvalue seen at dom⁺ points (random directions)
    pub min_hessian_eig_dom_plus: f64,
    pub forward_violations: usize,
    /// most negative `R_T` eigenvalue outside dom⁺
    pub worst_outside: Option<WorstPoint>,
}

struct ScanSample {
    t: HermTuple,
    rt_min: f64,
    in_plus: bool,
    hess_min: Option<f64>,
}

pub fn dom_plus_scan(r: &Realization, region: &RegionSpec, cfg: &AnalysisConfig) -> Result<(DomPlusScan, Vec<HermTuple>)> {
    let frame = r.range_t_frame();
    let mut scan = DomPlusScan {
        sampled: 0,
        in_dom_plus: 0,
        min_hessian_eig_dom_plus: f64::INFINITY,
        forward_violations: 0,
        worst_outside: None,
    };
    let mut points = vec![];
    for &n in &cfg.sizes {
        let got: Vec<Option<ScanSample>> = (0..cfg.samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = derived_rng(cfg.seed ^ 0xd0, n as u64, i as u64);
                let Some(t) = region.sample(r, n, &mut rng)? else {
                    return Ok(None);
                };
                if !r.in_dom_tol(&t, cfg.tol_inv) {
                    return Ok(None);
                }
                let rt = r.r_t_with(&frame, &t)?;
                let rt_min = if rt.nrows() == 0 { f64::INFINITY } else { min_eig(&rt) };
                let in_plus = rt_min >= -cfg.tol_psd;
                let hess_min = if in_plus {
                    let h: Vec<CMat> = (0..r.g()).map(|_| sample_herm_on_sphere(n, 1.0, &mut rng)).collect();
                    Some(partial_hessian(r, &t, &h)?.lambda_min)
                } else {
                    None
                };
                Ok(Some(ScanSample { t, rt_min, in_plus, hess_min }))
            })
            .collect::<Result<_>>()?;
        for s in got.into_iter().flatten() {
            scan.sampled += 1;
            if s.in_plus {
                scan.in_dom_plus += 1;
                let h = s.hess_min.unwrap_or(f64::INFINITY);
                scan.min_hessian_eig_dom_plus = scan.min_hessian_eig_dom_plus.min(h);
                if h < -cfg.tol_psd {
                    scan.forward_violations += 1;
                }
            } else if scan.worst_outside.as_ref().is_none_or(|w| s.rt_min < w.rt_min_eig) {
                scan.worst_outside = Some(WorstPoint { point: s.t.clone(), rt_min_eig: s.rt_min });
            }
            points.push(s.t);
        }
    }
    Ok((scan, points))
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum WitnessOutcome {
    Found(Box<ConvexityWitness>),
    /// no sampled point left dom⁺
    NoCandidate,
    Failed { reason: String },
}

fn region_for(r: &Realization, cfg: &AnalysisConfig) -> Result<RegionSpec> {
    let mut region = RegionSpec::domain(cfg.scale);
    if let Some(src) = &cfg.region {
        region = region.with_constraints(RegionSpec::parse_constraints(src, &r.ctx)?);
    }
    if cfg.complement {
        region = region.complement();
    }
    Ok(region)
}

fn butterfly_data(p: &FreePoly, points: &[HermTuple], r: &Realization, tol: f64) -> Result<ButterflyOutcome> {
    let b = match poly_butterfly(p) {
        Ok(b) => b,
        Err(Error::NotConvexible(reason)) => return Ok(ButterflyOutcome::NotConvexible { reason }),
        Err(e @ (Error::Realization(_) | Error::Singular(_) | Error::Kebab)) => {
            return Ok(ButterflyOutcome::NotApplicable { reason: e.to_string() })
        }
        Err(e) => return Err(e),
    };
    let mut disagreements = 0;
    for t in points {
        let w_ok = b.w_psd_at(t, tol)?;
        if w_ok != r.in_dom_plus_tol(t, tol) {
            disagreements += 1;
        }
    }
    let w_text = if b.w.is_scalar() { Some(to_text(&b.w)?) } else { None };
    Ok(ButterflyOutcome::Built(Box::new(ButterflyData {
        k: b.frame.k(),
        ell: poly_terms(&b.ell),
        w: poly_terms(&b.w),
        fbar: poly_terms(&b.fbar),
        w_text,
        residual: b.residual,
        probes: points.len(),
        disagreements,
    })))
}

/// Partial convexity in the x-class letters over the configured region.
pub fn cmd_partial(input: &Input, cfg: &AnalysisConfig) -> Result<Report> {
    cfg.validate()?;
    let mut rep = Report::new("partial", cfg);
    let r = input.realization()?;
    rep.insert("realization_size", &r.e())?;
    let region = region_for(&r, cfg)?;
    rep.insert("region", &region.describe()?)?;

    let verdict = rep.timed("verdict", || convexity_verdict(&r, &region, &cfg.sample_config()))?;
    rep.degrade(match verdict.outcome {
        Outcome::ConvexEvidence => Status::Success,
        Outcome::NotConvex => Status::Negative,
        Outcome::Inconclusive => Status::Inconclusive,
    });

    let t0 = std::time::Instant::now();
    let (scan, points) = dom_plus_scan(&r, &region, cfg)?;
    rep.timings.insert("dom_plus_scan".into(), t0.elapsed().as_secs_f64());
    if scan.forward_violations > 0 {
        rep.degrade(Status::Negative);
    }
    let witness = match &scan.worst_outside {
        None => WitnessOutcome::NoCandidate,
        Some(w) => {
            let mut rng = derived_rng(cfg.seed ^ 0x77, 0, 0);
            let companion = RegionSpec::domain(cfg.scale);
            match negativity_witness(&r, &w.point, &companion, &mut rng) {
                Ok(c) => WitnessOutcome::Found(Box::new(c)),
                Err(e @ (Error::SpanFailure { .. } | Error::Domain(_) | Error::RegionEmpty(_) | Error::Singular(_))) => {
                    WitnessOutcome::Failed { reason: e.to_string() }
                }
                Err(e) => return Err(e),
            }
        }
    };
    rep.insert("dom_plus_scan", &scan)?;
    rep.insert("negativity_witness", &witness)?;

    if let Input::Poly(p) = input {
        let b = butterfly_data(p, &points, &r, cfg.tol_psd)?;
        rep.insert("butterfly", &b)?;
    }
    Ok(rep)
}

fn xy_config(cfg: &AnalysisConfig, lift_region: Vec<FreePoly>) -> XYConfig {
    let pairs = PairScanConfig {
        dims: cfg.sizes.iter().map(|&n| (n.max(2), n, n)).collect(),
        samples: cfg.samples,
        scale: cfg.scale,
        seed: cfg.seed,
        tol_psd: cfg.tol_psd,
        ..Default::default()
    };
    let mxy = MxyScanConfig {
        sizes: cfg.sizes.iter().map(|&n| (n, n)).collect(),
        samples: cfg.samples,
        scale: cfg.scale,
        seed: cfg.seed,
        tol_psd: cfg.tol_psd,
        admissible: cfg.admissible,
        completion: true,
        refine: cfg.refine,
        lift_region,
    };
    XYConfig { pairs, mxy }
}

#[derive(Debug, Clone, Serialize)]
pub struct MxyScans {
    /// inputs of norm at most 0.1
    pub near_zero: MxyScanReport,
    /// inputs under the configured admissibility bound
    pub admissible: MxyScanReport,
}

/// xy-convexity pipeline for a scalar polynomial in two letters.
pub fn cmd_xy(input: &Input, cfg: &AnalysisConfig) -> Result<Report> {
    cfg.validate()?;
    let Input::Poly(p) = input else {
        return Err(Error::NotApplicable("xy-analysis takes a polynomial file".into()));
    };
    let mut rep = Report::new("xy", cfg);
    let lift = match &cfg.region {
        Some(src) => RegionSpec::parse_constraints(src, p.ctx())?,
        None => vec![],
    };
    let xc = xy_config(cfg, lift);
    let screen = crate::xycvx::support_screen(p)?;
    if let crate::xycvx::Screen::Accept(pl) = &screen {
        let t0 = std::time::Instant::now();
        let near = MxyScanConfig { scale: 0.1, admissible: Some(0.1), completion: false, ..xc.mxy.clone() };
        let scans = MxyScans { near_zero: middle_matrix_psd_scan(pl, &near)?, admissible: middle_matrix_psd_scan(pl, &xc.mxy)? };
        rep.timings.insert("mxy_scan".into(), t0.elapsed().as_secs_f64());
        rep.insert("mxy_scan", &scans)?;
    }
    let outcome = rep.timed("analysis", || xy_analyze(p, &xc))?;
    rep.degrade(match outcome {
        XYOutcome::Certified { .. } => Status::Success,
        XYOutcome::Rejected { .. } | XYOutcome::NotCertifiable { .. } => Status::Negative,
        XYOutcome::Inconclusive { .. } => Status::Inconclusive,
    });
    Ok(rep)
}
