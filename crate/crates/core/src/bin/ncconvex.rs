use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ncconvex::cli::{self, AnalysisConfig, Input, Report};
use ncconvex::Result;

#[derive(Parser)]
#[command(name = "ncconvex", version, about = "Partial and xy-convexity of nc polynomials and rational functions")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// matrix sizes, e.g. `1,2,3` or `1-4`
    #[arg(long, global = true, default_value = "1,2,3")]
    sizes: String,
    /// samples per size
    #[arg(long, global = true, default_value_t = 50)]
    samples: usize,
    #[arg(long, global = true, default_value_t = ncconvex::tol::TOL_PSD)]
    tol_psd: f64,
    #[arg(long, global = true, default_value_t = ncconvex::tol::TOL_INV)]
    tol_inv: f64,
    /// rayon worker threads (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// write the JSON report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `;`-separated constraints `q ⪰ 0` in the input's letters
    #[arg(long, global = true)]
    region: Option<String>,
    /// sample where the region constraints fail
    #[arg(long, global = true)]
    complement: bool,
    #[arg(long, global = true, default_value_t = 1.0)]
    scale: f64,
    /// norm bound on middle-matrix inputs
    #[arg(long, global = true)]
    admissible: Option<f64>,
    /// descent steps on the middle-matrix eigenvalue per sample
    #[arg(long, global = true, default_value_t = 0)]
    refine: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a polynomial or realization at a tuple
    Eval { input: PathBuf, tuple: PathBuf },
    /// Partial convexity in the x-class letters
    Partial { input: PathBuf },
    /// xy-convexity of a polynomial in two letters
    Xy { input: PathBuf },
    /// Rerun a worked example: intro-eval, example-A3, example-A4
    Reproduce { id: String },
}

fn config(c: &Common) -> Result<AnalysisConfig> {
    Ok(AnalysisConfig {
        seed: c.seed,
        sizes: cli::parse_sizes(&c.sizes)?,
        samples: c.samples,
        tol_psd: c.tol_psd,
        tol_inv: c.tol_inv,
        region: c.region.clone(),
        complement: c.complement,
        scale: c.scale,
        admissible: c.admissible,
        refine: c.refine,
        out: c.out.clone(),
        ..Default::default()
    })
}

/// The report, plus plain text that replaces JSON on stdout.
fn run(args: &Cli) -> Result<(Report, Option<String>)> {
    let cfg = config(&args.common)?;
    cfg.validate()?;
    Ok(match &args.cmd {
        Cmd::Eval { input, tuple } => {
            let (input, tuple) = (Input::load(input)?, cli::load_tuple(tuple)?);
            let v = cli::eval_input(&input, &tuple, &cfg)?;
            let text = format!("{}\nhermitian residual: {:.3e}", cli::format_matrix(&v.matrix()?), v.hermitian_residual);
            (cli::cmd_eval(&input, &tuple, &cfg)?, Some(text))
        }
        Cmd::Partial { input } => (cli::cmd_partial(&Input::load(input)?, &cfg)?, None),
        Cmd::Xy { input } => (cli::cmd_xy(&Input::load(input)?, &cfg)?, None),
        Cmd::Reproduce { id } => {
            let rep = cli::cmd_reproduce(id, &cfg)?;
            for d in rep.results["diff"].as_array().into_iter().flatten() {
                eprintln!("mismatch: {}", d.as_str().unwrap_or_default());
            }
            (rep, None)
        }
    })
}

fn main() -> ExitCode {
    let args = Cli::parse();
    if let Some(w) = args.common.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let (rep, text) = match run(&args) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(cli::error_exit_code(&e) as u8);
        }
    };
    let out = match &args.common.out {
        Some(p) => {
            if let Some(t) = &text {
                println!("{t}");
            }
            rep.write(p)
        }
        None => match text {
            Some(t) => {
                println!("{t}");
                Ok(())
            }
            None => rep.to_json().map(|s| println!("{s}")),
        },
    };
    if let Err(e) = out {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(rep.status.exit_code() as u8)
}
