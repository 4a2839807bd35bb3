//! Pinned-seed scripts for the worked examples, compared against stored summaries.

use serde::Serialize;
use serde_json::{json, Value};

use super::config::AnalysisConfig;
use super::report::{Report, Status};
use crate::error::{Error, Result};
use crate::matkit::real;
use crate::ncalg::{parse_poly, HermTuple, VarContext};
use crate::partialcvx::{convexity_verdict, ConvexityReport, Outcome, RegionSpec, SampleConfig};
use crate::realize::linearize_poly;
use crate::xycvx::{
    middle_matrix_psd_scan, support_screen, xy_analyze, MxyScanConfig, MxyScanReport, PLPoly, Screen, XYConfig,
};
use crate::CMat;

pub const EXAMPLE_IDS: [&str; 3] = ["intro-eval", "example-A3", "example-A4"];

/// The polynomial of both appendix examples.
pub const SQUARE_POLY: &str = "x^2 + y^2 + x y^2 x + 2 x y x y + 2 y x y x + y x^2 y";
/// Closed region on which it is biconvex.
pub const SQUARE_REGION: &str = "1 - 3 x^2; 1 - 3 y^2";
pub const INTRO_POLY: &str = "x1 x2 - 17 x2 x1 + 4";

const SEED: u64 = 20;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: Value,
    pub actual: Value,
    pub ok: bool,
}

fn check(name: &str, expected: Value, actual: Value) -> Check {
    Check { name: name.into(), ok: expected == actual, expected, actual }
}

pub fn intro_tuple() -> HermTuple {
    let m = |v: [f64; 4]| CMat::from_row_slice(2, 2, &v.map(real));
    HermTuple { n: 2, a: vec![], x: vec![m([1.0, 2.0, 3.0, 4.0]), m([-1.0, -1.0, -1.0, -1.0])] }
}

fn intro_eval(rep: &mut Report) -> Result<Vec<Check>> {
    let p = parse_poly(INTRO_POLY, None)?;
    let v = p.eval(&intro_tuple())?;
    rep.insert("value", &crate::matkit::json::MatJson::from(&v))?;
    let re: Vec<Vec<f64>> = (0..2).map(|i| (0..2).map(|j| v[(i, j)].re).collect()).collect();
    let im = v.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    Ok(vec![check("value", json!([[69.0, 99.0], [61.0, 99.0]]), json!(re)), check("imaginary_part", json!(0.0), json!(im))])
}

/// Convexity in `var` with the other letter frozen, sampled from `region`.
pub fn square_partial(var: &str, region: &str, complement: bool, cfg: &SampleConfig) -> Result<ConvexityReport> {
    let other = if var == "x" { "y" } else { "x" };
    let ctx = VarContext::with_names(&[other], &[var])?;
    let p = parse_poly(SQUARE_POLY, Some(&ctx))?;
    let r = linearize_poly(&p)?;
    let mut region = RegionSpec::domain(1.0).with_constraints(RegionSpec::parse_constraints(region, &ctx)?);
    if complement {
        region = region.complement();
    }
    convexity_verdict(&r, &region, cfg)
}

fn example_a3(rep: &mut Report) -> Result<Vec<Check>> {
    let cfg = SampleConfig { sizes: vec![1, 2, 3, 4], samples: 300, seed: SEED, tol_psd: rep.config.tol_psd };
    let x = square_partial("x", SQUARE_REGION, false, &cfg)?;
    let y = square_partial("y", SQUARE_REGION, false, &cfg)?;
    let wide = square_partial("x", "1 - 3 y^2", true, &SampleConfig { samples: 100, ..cfg.clone() })?;
    let outcome = |r: &ConvexityReport| json!(r.outcome);
    let violations = |r: &ConvexityReport| r.per_size.iter().map(|s| s.hessian_violations + s.midpoint_violations).sum::<usize>();
    let witness = wide.hessian_witness.is_some() || wide.midpoint_witness.is_some();
    let mut checks = vec![
        check("convex_in_x_on_region", json!(Outcome::ConvexEvidence), outcome(&x)),
        check("violations_x", json!(0), json!(violations(&x))),
        check("convex_in_y_on_region", json!(Outcome::ConvexEvidence), outcome(&y)),
        check("violations_y", json!(0), json!(violations(&y))),
        check("complement_outcome", json!(Outcome::NotConvex), outcome(&wide)),
        check("complement_witness", json!(true), json!(witness)),
    ];
    rep.insert("convex_in_x", &x)?;
    rep.insert("convex_in_y", &y)?;
    rep.insert("complement", &wide)?;
    let p = parse_poly(SQUARE_POLY, Some(&PLPoly::default_ctx()))?;
    let xy = xy_analyze(&p, &XYConfig { mxy: MxyScanConfig { seed: SEED, ..Default::default() }, ..Default::default() })?;
    checks.push(check("xy_stage", json!("not-certifiable"), json!(xy.label())));
    rep.insert("xy", &xy)?;
    Ok(checks)
}

/// Middle-matrix scans for the square example: small inputs, inputs with
/// every block of norm below `1/√3`, and inputs of norm below `outside`.
pub fn square_mxy_scans(samples: usize, seed: u64, outside: f64) -> Result<[MxyScanReport; 3]> {
    let p = parse_poly(SQUARE_POLY, Some(&PLPoly::default_ctx()))?;
    let Screen::Accept(pl) = support_screen(&p)? else {
        return Err(Error::NotApplicable("example polynomial failed the support screen".into()));
    };
    let sizes = vec![(1, 1), (1, 2), (2, 1), (2, 2)];
    let per = samples.div_ceil(sizes.len());
    let near = MxyScanConfig {
        sizes: sizes.clone(),
        samples: per,
        scale: 0.1,
        seed,
        admissible: Some(0.1),
        completion: false,
        ..Default::default()
    };
    let bound = 1.0 / 3f64.sqrt();
    let lift = RegionSpec::parse_constraints(SQUARE_REGION, &PLPoly::default_ctx())?;
    let wide = MxyScanConfig {
        sizes: sizes.clone(),
        samples: 4 * per,
        scale: bound,
        seed,
        admissible: Some(bound),
        completion: true,
        refine: 200,
        lift_region: lift,
        ..Default::default()
    };
    let beyond = MxyScanConfig { sizes, scale: outside, admissible: Some(outside), lift_region: vec![], ..wide.clone() };
    Ok([middle_matrix_psd_scan(&pl, &near)?, middle_matrix_psd_scan(&pl, &wide)?, middle_matrix_psd_scan(&pl, &beyond)?])
}

fn example_a4(rep: &mut Report) -> Result<Vec<Check>> {
    let [near, wide, beyond] = square_mxy_scans(200, SEED, 0.6)?;
    let bound = 1.0 / 3f64.sqrt();
    let admissible = wide.witness.as_ref().is_some_and(|w| w.eval.inputs.max_norm() < bound);
    let completion_negative =
        wide.witness.as_ref().and_then(|w| w.completion.as_ref()).is_some_and(|c| c.value < 0.0);
    let checks = vec![
        check("near_zero_psd", json!(true), json!(near.all_psd)),
        check("near_zero_tested", json!(200), json!(near.tested)),
        check("indefinite_sample_found", json!(true), json!(!wide.all_psd)),
        check("witness_inputs_admissible", json!(true), json!(admissible)),
        check("completion_negative", json!(true), json!(completion_negative)),
        check("indefinite_beyond_bound", json!(true), json!(!beyond.all_psd)),
    ];
    let lifts = wide.witness.as_ref().and_then(|w| w.completion.as_ref()).and_then(|c| c.lifts_to_interior);
    rep.insert("near_zero", &near)?;
    rep.insert("admissible", &wide)?;
    rep.insert("beyond_bound", &beyond)?;
    rep.insert("completion_lifts_to_interior", &lifts)?;
    Ok(checks)
}

/// Runs one example script; a mismatch sets status `negative` and lists the diffs.
pub fn cmd_reproduce(id: &str, cfg: &AnalysisConfig) -> Result<Report> {
    let mut rep = Report::new(&format!("reproduce {id}"), cfg);
    let t0 = std::time::Instant::now();
    let checks = match id {
        "intro-eval" => intro_eval(&mut rep)?,
        "example-A3" => example_a3(&mut rep)?,
        "example-A4" => example_a4(&mut rep)?,
        _ => return Err(Error::Config(format!("unknown example `{id}`; expected one of {}", EXAMPLE_IDS.join(", ")))),
    };
    rep.timings.insert(id.into(), t0.elapsed().as_secs_f64());
    let diff: Vec<String> = checks
        .iter()
        .filter(|c| !c.ok)
        .map(|c| format!("{}: expected {}, got {}", c.name, c.expected, c.actual))
        .collect();
    if !diff.is_empty() {
        rep.degrade(Status::Negative);
    }
    rep.insert("checks", &checks)?;
    rep.insert("diff", &diff)?;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intro_matches() {
        let r = cmd_reproduce("intro-eval", &AnalysisConfig::default()).unwrap();
        assert_eq!(r.status, Status::Success, "{:?}", r.results["diff"]);
    }

    #[test]
    fn unknown_id() {
        assert!(matches!(cmd_reproduce("nope", &AnalysisConfig::default()), Err(Error::Config(_))));
    }
}
