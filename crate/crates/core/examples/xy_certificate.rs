//! Gram completion, Λ*Λ + pencil certificate and its sampled verification.

use ncconvex::ncalg::parse_poly;
use ncconvex::xycvx::{
    assemble_certificate, gram_complete_certificate, support_screen, verify_certificate, GramOutcome,
    PairScanConfig, PLPoly, Screen,
};

fn main() -> ncconvex::Result<()> {
    let ctx = PLPoly::default_ctx();
    // (x + x y)*(x + x y) plus a pencil
    let p = parse_poly("x^2 + x^2 y + y x^2 + y x^2 y + x - y + 2", Some(&ctx))?;
    let Screen::Accept(pl) = support_screen(&p)? else {
        println!("support outside the certificate list");
        return Ok(());
    };
    let GramOutcome::Feasible(sol) = gram_complete_certificate(&pl)? else {
        println!("Gram pattern infeasible");
        return Ok(());
    };
    println!("Gram rank {}, residual {:.1e}", sol.n, sol.residual);
    let cert = assemble_certificate(&pl, &sol)?;
    let pencil: Vec<String> = cert.pencil.iter().map(|c| format!("{:.3}", c.re)).collect();
    println!("pencil coefficients of 1, x, y, xy, yx: {}", pencil.join(", "));
    let v = verify_certificate(&p, &cert, &PairScanConfig { samples: 20, ..Default::default() })?;
    println!("coefficients {:.1e}, sampled pairs PSD {}", v.coefficient_residual, v.sampled_ok);
    Ok(())
}
