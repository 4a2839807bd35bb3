//! PSD completion of a partially specified matrix, feasible and infeasible.

use ncconvex::matkit::{min_eig, psd_complete, real, CompletionResult, LinearConstraint};

fn main() -> ncconvex::Result<()> {
    // unit diagonal, G[0][1] = G[1][2] = 0.9, G[0][2] free
    let mut cons: Vec<LinearConstraint> = (0..3).map(|i| LinearConstraint::pin(i, i, real(1.0))).collect();
    cons.push(LinearConstraint::pin(0, 1, real(0.9)));
    cons.push(LinearConstraint::pin(1, 2, real(0.9)));
    match psd_complete(3, &cons, None, 1e-9, 5000)? {
        CompletionResult::Complete { g, iterations, .. } => {
            println!("completed in {iterations} iterations, G[0][2] = {:.4}, λ_min {:.2e}", g[(0, 2)].re, min_eig(&g))
        }
        CompletionResult::Infeasible { residual, .. } => println!("infeasible, residual {residual:.2e}"),
    }
    cons[3] = LinearConstraint::pin(0, 1, real(1.5));
    match psd_complete(3, &cons, None, 1e-9, 5000)? {
        CompletionResult::Complete { .. } => println!("unexpectedly completed"),
        CompletionResult::Infeasible { gap, .. } => println!("|G[0][1]| > 1 is infeasible: gap {gap:.2e}"),
    }
    Ok(())
}
