//! Run the pinned worked-example scripts and print their checks.
//!
//! `cargo run --release --example reproduce -- example-A3`

use ncconvex::cli::{cmd_reproduce, AnalysisConfig, EXAMPLE_IDS};

fn main() -> ncconvex::Result<()> {
    let ids: Vec<String> = std::env::args().skip(1).collect();
    let ids = if ids.is_empty() { vec![EXAMPLE_IDS[0].to_string()] } else { ids };
    for id in ids {
        let rep = cmd_reproduce(&id, &AnalysisConfig::default())?;
        println!("{id}: {:?}", rep.status);
        for c in rep.results["checks"].as_array().into_iter().flatten() {
            println!("  {:<28} {}", c["name"].as_str().unwrap_or(""), if c["ok"] == true { "ok" } else { "MISMATCH" });
        }
    }
    Ok(())
}
