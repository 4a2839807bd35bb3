//! xy-convexity for scalar polynomials in two letters: support screen, xy-Hessian,
//! middle matrix, Gram certificate and sampled checks.

mod gram;
mod hessian;
mod pl;
mod qp;
mod scan;

pub use gram::{
    assemble_certificate, gram_complete_certificate, gram_constraints, verify_certificate, CertResiduals,
    CertVerification, GramOutcome, GramSolution, LambdaFile, PencilFile, XYCert, XYCertFile,
};
pub use hessian::{
    bmb, border_vector, is_xy_pair, middle_blocks, middle_matrix, sample_xy_pair, xy_convexity_test, xy_hessian,
    xy_hessian_explicit, xy_hessian_substitution, xy_pair_residual, MiddleMatrixEval, MxyBlocks, MxyInputs, XYDefect,
    XYHessian, XYPair,
};
pub use pl::{render_word, support_screen, xy_ids, Mono, PLPoly, Screen};
pub use qp::{build_p, e_operator_embed, e_operator_star, extract_q, p_of_sigma, psi_apply, OpSystemElem, PMatrix, Sigma};
pub use scan::{
    complete_direction, hat_inputs, middle_matrix_psd_scan, mxy_q_equivalence_probe, q_prime, q_psd_scan,
    xy_pair_scan, EquivalenceReport, EquivalenceRow, MxyScanConfig, MxyScanReport, MxyWitness, PairScanConfig,
    PairScanReport, PairWitness, VectorCompletion,
};

use serde::Serialize;

use crate::error::Result;
use crate::ncalg::FreePoly;

#[derive(Debug, Clone, Default)]
pub struct XYConfig {
    pub pairs: PairScanConfig,
    pub mxy: MxyScanConfig,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum XYOutcome {
    /// support outside the list; `monomial` is the shortest offender
    Rejected { monomial: String },
    Certified { certificate: XYCertFile, verification: CertVerification },
    /// Gram pattern infeasible and the middle matrix goes negative
    NotCertifiable { gram: GramOutcome, witness: Box<MxyWitness> },
    Inconclusive { reason: String },
}

impl XYOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            XYOutcome::Rejected { .. } => "rejected",
            XYOutcome::Certified { .. } => "certified",
            XYOutcome::NotCertifiable { .. } => "not-certifiable",
            XYOutcome::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Screen, then Gram completion; an infeasible pattern triggers a middle-matrix scan.
pub fn xy_analyze(p: &FreePoly, cfg: &XYConfig) -> Result<XYOutcome> {
    let pl = match support_screen(p)? {
        Screen::Reject(monomial) => return Ok(XYOutcome::Rejected { monomial }),
        Screen::Accept(pl) => pl,
    };
    match gram_complete_certificate(&pl)? {
        GramOutcome::Feasible(sol) => {
            let cert = assemble_certificate(&pl, &sol)?;
            let verification = verify_certificate(p, &cert, &cfg.pairs)?;
            if !verification.passed() {
                return Ok(XYOutcome::Inconclusive {
                    reason: format!(
                        "certificate failed verification (coefficient residual {:.3e}, {} pair violations)",
                        verification.coefficient_residual, verification.pairs.violations
                    ),
                });
            }
            Ok(XYOutcome::Certified { certificate: cert.to_file(), verification })
        }
        gram @ GramOutcome::Infeasible { .. } => {
            let scan = middle_matrix_psd_scan(&pl, &cfg.mxy)?;
            match scan.witness {
                Some(w) => Ok(XYOutcome::NotCertifiable { gram, witness: Box::new(w) }),
                None => Ok(XYOutcome::Inconclusive {
                    reason: format!("Gram pattern infeasible but {} middle-matrix samples were PSD", scan.tested),
                }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::parse_poly;

    fn run(s: &str) -> XYOutcome {
        let p = parse_poly(s, Some(&PLPoly::default_ctx())).unwrap();
        let cfg = XYConfig {
            pairs: PairScanConfig { samples: 10, ..Default::default() },
            mxy: MxyScanConfig { scale: 3.0, ..Default::default() },
        };
        xy_analyze(&p, &cfg).unwrap()
    }

    #[test]
    fn pipeline_outcomes() {
        assert_eq!(run("x^2 + y^2 + x y + y x").label(), "certified");
        assert_eq!(run("x^4").label(), "rejected");
        assert_eq!(run("x^2 + y^2 + x y^2 x + 2 x y x y + 2 y x y x + y x^2 y").label(), "not-certifiable");
    }
}
