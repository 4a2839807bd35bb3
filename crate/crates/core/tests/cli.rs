use std::path::PathBuf;
use std::process::Command;

use ncconvex::cli::{cmd_partial, cmd_reproduce, cmd_xy, AnalysisConfig, Input, Report, Status};
use ncconvex::partialcvx::ConvexityWitness;

const QUARTIC: &str = "x: x\nx^4\n";
const SQUARE: &str = "a: a\nx: x\nx a x + x^2 + 1\n";
const XY: &str = "x: x y\nx^2 + y^2 + x y + y x\n";

fn cfg() -> AnalysisConfig {
    AnalysisConfig { samples: 10, seed: 7, ..Default::default() }
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ncconvex-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ncconvex")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn reports_are_deterministic() {
    for src in [QUARTIC, SQUARE] {
        let input = Input::parse(src).unwrap();
        let a = cmd_partial(&input, &cfg()).unwrap().to_json_untimed().unwrap();
        let b = cmd_partial(&input, &cfg()).unwrap().to_json_untimed().unwrap();
        assert_eq!(a, b);
    }
    let input = Input::parse(XY).unwrap();
    let a = cmd_xy(&input, &cfg()).unwrap().to_json_untimed().unwrap();
    assert_eq!(a, cmd_xy(&input, &cfg()).unwrap().to_json_untimed().unwrap());
    // and the round trip through JSON keeps everything but formatting
    let back = Report::from_json(&a).unwrap();
    assert_eq!(back.to_json_untimed().unwrap(), a);
}

#[test]
fn verdict_statuses() {
    let q = cmd_partial(&Input::parse(QUARTIC).unwrap(), &cfg()).unwrap();
    assert_eq!(q.status, Status::Negative);
    let s = cmd_partial(&Input::parse(SQUARE).unwrap(), &cfg()).unwrap();
    assert_eq!(s.status, Status::Success);
    let r = cmd_reproduce("intro-eval", &cfg()).unwrap();
    assert_eq!(r.status, Status::Success);
}

#[test]
fn witness_reverifies_from_report_json() {
    let input = Input::parse(QUARTIC).unwrap();
    let json = cmd_partial(&input, &cfg()).unwrap().to_json().unwrap();
    let rep = Report::from_json(&json).unwrap();
    let w = &rep.results["negativity_witness"];
    assert_eq!(w["status"], "found", "{w}");
    let w: ConvexityWitness = serde_json::from_value(w.clone()).unwrap();
    // a fresh realization from the file, no RNG involved
    let r = Input::parse(QUARTIC).unwrap().realization().unwrap();
    let v = w.reverify(&r).unwrap();
    assert!(v < 0.0);
    assert!((v - w.value).abs() <= 1e-9 * w.value.abs().max(1.0));
}

#[test]
fn binary_eval_and_exit_codes() {
    let intro = scratch("intro.txt", "x: x1 x2\nx1 x2 - 17 x2 x1 + 4\n");
    let tuple = scratch("t.json", r#"{"x":[[[1,2],[3,4]],[[-1,-1],[-1,-1]]]}"#);
    let (code, out, _) = run(&["eval", intro.to_str().unwrap(), tuple.to_str().unwrap()]);
    assert_eq!(code, 0);
    let first: Vec<&str> = out.lines().take(2).collect();
    assert_eq!(first.join(" ").split_whitespace().collect::<Vec<_>>(), ["69", "99", "61", "99"]);

    let q = scratch("q.txt", QUARTIC);
    let (code, out, _) = run(&["partial", q.to_str().unwrap(), "--samples", "10"]);
    assert_eq!(code, 1);
    assert_eq!(Report::from_json(&out).unwrap().status, Status::Negative);

    let (code, _, err) = run(&["partial", "/nonexistent/input.txt"]);
    assert_eq!(code, 2, "{err}");
    let bad = scratch("bad.txt", "x: x\nx + * 2\n");
    assert_eq!(run(&["partial", bad.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["partial", q.to_str().unwrap(), "--sizes", "0"]).0, 2);
    assert_eq!(run(&["reproduce", "no-such-example"]).0, 2);
}

#[test]
fn binary_writes_report_file() {
    let q = scratch("q2.txt", QUARTIC);
    let out = q.with_extension("json");
    let (code, stdout, _) = run(&["partial", q.to_str().unwrap(), "--samples", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stdout.trim().is_empty());
    let rep = Report::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rep.config.samples, 5);
}
