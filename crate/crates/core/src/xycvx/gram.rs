//! Gram completion and `p = λ + Λ*Λ` certificates.
//!
//! Unknown `G = [q0 q1 q2]*[q0 q1 q2]` (6×6). Column order:
//! `[Λx, Λy, Λyx, q1e2, q2e1, Λxy]`.

use serde::{Deserialize, Serialize};

use super::pl::{Mono, PLPoly};
use super::qp::{build_p, PMatrix};
use crate::error::{Error, Result};
use crate::matkit::json::{cscalar, mat, VecJson};
use crate::matkit::{eigh, psd_complete, real, CompletionResult, LinearConstraint};
use crate::ncalg::{FreePoly, Word};
use crate::tol::{GRAM_CUTOFF, MAX_ITER, TOL_AFF};
use crate::{CMat, CVec, C64};

/// Pins of the Gram pattern.
pub fn gram_constraints(pm: &PMatrix) -> Vec<LinearConstraint> {
    let one = real(1.0);
    let mut out = vec![];
    for j in 1..3 {
        for k in j..3 {
            for a in 0..2 {
                for b in 0..2 {
                    let (i, l) = (2 * j + a, 2 * k + b);
                    if i <= l {
                        out.push(LinearConstraint::pin(i, l, pm.blocks[j][k][(a, b)]));
                    }
                }
            }
        }
    }
    for k in 1..3 {
        for a in 0..2 {
            for b in 0..2 {
                let value = pm.blocks[0][k][(a, b)] + pm.blocks[k][0][(a, b)];
                out.push(LinearConstraint { terms: vec![(a, 2 * k + b, one), (2 * k + a, b, one)], value });
            }
        }
    }
    out.push(LinearConstraint::pin(0, 0, pm.blocks[0][0][(0, 0)]));
    out.push(LinearConstraint::pin(1, 1, pm.blocks[0][0][(1, 1)]));
    out
}

fn constraint_residual(g: &CMat, cs: &[LinearConstraint]) -> f64 {
    cs.iter()
        .map(|c| {
            let lhs: C64 = c.terms.iter().map(|&(i, j, w)| w * g[(i, j)]).sum();
            (lhs - c.value).norm()
        })
        .fold(0.0, f64::max)
}

/// Completed Gram matrix and its factor `G = F*F`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GramSolution {
    #[serde(with = "mat")]
    pub g: CMat,
    /// `N × 6`
    #[serde(with = "mat")]
    pub f: CMat,
    pub n: usize,
    #[serde(with = "cscalar")]
    pub r1: C64,
    pub residual: f64,
    pub iterations: usize,
}

impl GramSolution {
    pub fn column(&self, i: usize) -> CVec {
        self.f.column(i).into_owned()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum GramOutcome {
    Feasible(GramSolution),
    Infeasible { residual: f64, gap: f64, iterations: usize },
}

/// Solves the Gram pattern by PSD completion and factors the result.
pub fn gram_complete_certificate(p: &PLPoly) -> Result<GramOutcome> {
    if !p.is_symmetric(1e-12) {
        return Err(Error::Symmetry("coefficients violate p = p*".into()));
    }
    let pm = build_p(p);
    let cs = gram_constraints(&pm);
    let res = match psd_complete(6, &cs, None, TOL_AFF, MAX_ITER) {
        Ok(r) => r,
        Err(Error::InfeasibleAffine(r)) => return Ok(GramOutcome::Infeasible { residual: r, gap: f64::INFINITY, iterations: 0 }),
        Err(e) => return Err(e),
    };
    let (g, iterations) = match res {
        CompletionResult::Complete { g, iterations, .. } => (g, iterations),
        CompletionResult::Infeasible { iterations, residual, gap } => return Ok(GramOutcome::Infeasible { residual, gap, iterations }),
    };
    let (vals, vecs) = eigh(&g);
    let lmax = vals.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..6).filter(|&i| vals[i] > GRAM_CUTOFF * lmax.max(1e-300)).collect();
    let mut f = CMat::zeros(keep.len(), 6);
    for (r, &i) in keep.iter().enumerate() {
        let s = vals[i].sqrt();
        for c in 0..6 {
            f[(r, c)] = vecs[(c, i)].conj() * s;
        }
    }
    let gf = f.adjoint() * &f;
    let residual = constraint_residual(&gf, &cs);
    if residual > 1e-8 {
        return Ok(GramOutcome::Infeasible { residual, gap: 0.0, iterations });
    }
    let r1 = gf[(0, 1)] - pm.blocks[0][0][(0, 1)];
    Ok(GramOutcome::Feasible(GramSolution { n: keep.len(), r1, g: gf, f, residual, iterations }))
}

/// `Λ = Λx x + Λy y + Λxy xy + Λyx yx` and the hermitian xy-pencil `λ` with `p = λ + Λ*Λ`.
#[derive(Debug, Clone)]
pub struct XYCert {
    pub lx: CVec,
    pub ly: CVec,
    pub lxy: CVec,
    pub lyx: CVec,
    /// coefficients of `1, x, y, xy, yx`
    pub pencil: [C64; 5],
    pub r1: C64,
    pub residuals: CertResiduals,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct CertResiduals {
    /// largest deviation among the twelve coefficient identities
    pub identities: f64,
    /// `‖p − λ − Λ*Λ‖` coefficientwise
    pub reconstruction: f64,
    /// Gram pattern residual
    pub gram: f64,
    /// `|Λx*Λy − r1|`
    pub remark: f64,
}

impl XYCert {
    pub fn n(&self) -> usize {
        self.lx.len()
    }

    /// `Λ*Λ` restricted to the support list.
    pub fn gram_part(&self) -> PLPoly {
        let d = |a: &CVec, b: &CVec| a.dotc(b);
        let (x, y, xy, yx) = (&self.lx, &self.ly, &self.lxy, &self.lyx);
        PLPoly::from_pairs(&[
            (Mono::X2, d(x, x)),
            (Mono::Y2, d(y, y)),
            (Mono::XY, d(x, y)),
            (Mono::YX, d(y, x)),
            (Mono::X2Y, d(x, xy)),
            (Mono::XYX, d(x, yx) + d(yx, x)),
            (Mono::YXY, d(y, xy) + d(xy, y)),
            (Mono::Y2X, d(y, yx)),
            (Mono::YX2, d(xy, x)),
            (Mono::YX2Y, d(xy, xy)),
            (Mono::YXYX, d(xy, yx)),
            (Mono::XY2, d(yx, y)),
            (Mono::XYXY, d(yx, xy)),
            (Mono::XY2X, d(yx, yx)),
        ])
    }

    pub fn pencil_poly(&self) -> PLPoly {
        PLPoly::from_pairs(&Mono::PENCIL.iter().copied().zip(self.pencil).collect::<Vec<_>>())
    }

    /// `λ + Λ*Λ` as a free polynomial, computed by ncalg products.
    pub fn reconstruct(&self, ctx: &crate::ncalg::VarContext) -> Result<FreePoly> {
        let (xi, yi) = super::pl::xy_ids(ctx)?;
        let col = |v: &CVec| CMat::from_column_slice(v.len(), 1, v.as_slice());
        let lam = FreePoly::from_matrix_terms(
            ctx,
            self.n(),
            1,
            vec![
                (Word(vec![xi]), col(&self.lx)),
                (Word(vec![yi]), col(&self.ly)),
                (Word(vec![xi, yi]), col(&self.lxy)),
                (Word(vec![yi, xi]), col(&self.lyx)),
            ],
        )?;
        let gram = lam.adjoint().mul(&lam)?;
        gram.add(&self.pencil_poly().to_free_poly(ctx)?)
    }

    pub fn to_file(&self) -> XYCertFile {
        XYCertFile {
            n: self.n(),
            lambda: LambdaFile {
                x: VecJson::from(&self.lx),
                y: VecJson::from(&self.ly),
                xy: VecJson::from(&self.lxy),
                yx: VecJson::from(&self.lyx),
            },
            pencil: PencilFile {
                one: self.pencil[0],
                x: self.pencil[1],
                y: self.pencil[2],
                xy: self.pencil[3],
                yx: self.pencil[4],
            },
            r1: self.r1,
            residuals: self.residuals,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaFile {
    pub x: VecJson,
    pub y: VecJson,
    pub xy: VecJson,
    pub yx: VecJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PencilFile {
    #[serde(rename = "1", with = "cscalar")]
    pub one: C64,
    #[serde(with = "cscalar")]
    pub x: C64,
    #[serde(with = "cscalar")]
    pub y: C64,
    #[serde(with = "cscalar")]
    pub xy: C64,
    #[serde(with = "cscalar")]
    pub yx: C64,
}

/// Certificate JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XYCertFile {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "Lambda")]
    pub lambda: LambdaFile,
    pub pencil: PencilFile,
    #[serde(with = "cscalar")]
    pub r1: C64,
    #[serde(default)]
    pub residuals: CertResiduals,
}

impl XYCertFile {
    pub fn to_cert(&self) -> Result<XYCert> {
        let lx = self.lambda.x.to_vec();
        let n = lx.len();
        let [ly, lxy, lyx] = [&self.lambda.y, &self.lambda.xy, &self.lambda.yx].map(|v| v.to_vec());
        if [ly.len(), lxy.len(), lyx.len()].iter().any(|&l| l != n) || n != self.n {
            return Err(Error::Shape(format!("certificate columns must all have length N = {}", self.n)));
        }
        let pf = &self.pencil;
        Ok(XYCert { lx, ly, lxy, lyx, pencil: [pf.one, pf.x, pf.y, pf.xy, pf.yx], r1: self.r1, residuals: self.residuals })
    }
}

/// Reads `Λ` from the Gram factor and solves for the pencil.
pub fn assemble_certificate(p: &PLPoly, sol: &GramSolution) -> Result<XYCert> {
    let lx = sol.column(0);
    let ly = sol.column(1);
    let lyx = sol.column(2);
    let lxy = sol.column(5);
    let mut cert = XYCert { lx, ly, lxy, lyx, pencil: [C64::new(0.0, 0.0); 5], r1: sol.r1, residuals: CertResiduals::default() };
    let gp = cert.gram_part();
    let lambda = p.sub(&gp);
    // the twelve identities are exactly the non-pencil coefficients
    let identities = Mono::ALL.iter().filter(|m| !m.is_pencil()).map(|&m| lambda[m].norm()).fold(0.0, f64::max);
    if identities > 1e-8 {
        return Err(Error::Assembly(format!("p − Λ*Λ leaves non-pencil coefficients (max {identities:.3e})")));
    }
    for (i, m) in Mono::PENCIL.iter().enumerate() {
        cert.pencil[i] = lambda[*m];
    }
    if !cert.pencil_poly().is_symmetric(1e-8) {
        return Err(Error::Assembly("residual pencil is not hermitian".into()));
    }
    let remark = (cert.lx.dotc(&cert.ly) - sol.r1).norm();
    let ctx = PLPoly::default_ctx();
    let reconstruction = cert.reconstruct(&ctx)?.max_diff(&p.to_free_poly(&ctx)?)?;
    cert.residuals = CertResiduals { identities, reconstruction, gram: sol.residual, remark };
    Ok(cert)
}

/// Coefficient check and sampled xy-pair check, reported separately.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertVerification {
    pub coefficient_residual: f64,
    pub coefficient_ok: bool,
    pub pairs: super::scan::PairScanReport,
    pub sampled_ok: bool,
}

impl CertVerification {
    pub fn passed(&self) -> bool {
        self.coefficient_ok && self.sampled_ok
    }
}

pub fn verify_certificate(p: &FreePoly, cert: &XYCert, cfg: &super::scan::PairScanConfig) -> Result<CertVerification> {
    let rec = cert.reconstruct(p.ctx())?;
    let coefficient_residual = rec.max_diff(p)?;
    let pairs = super::scan::xy_pair_scan(p, cfg)?;
    Ok(CertVerification {
        coefficient_residual,
        coefficient_ok: coefficient_residual <= 1e-8,
        sampled_ok: pairs.violations == 0,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feasible(p: &PLPoly) -> GramSolution {
        match gram_complete_certificate(p).unwrap() {
            GramOutcome::Feasible(s) => s,
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn squares() {
        let p = PLPoly::from_real(&[(Mono::X2, 1.0), (Mono::Y2, 1.0)]);
        let s = feasible(&p);
        assert!(s.r1.norm() < 1e-8);
        let c = assemble_certificate(&p, &s).unwrap();
        assert!(c.residuals.reconstruction < 1e-8);
        assert!((c.lx.norm() - 1.0).abs() < 1e-8 && (c.ly.norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn single_square() {
        let p = PLPoly::from_real(&[(Mono::X2, 1.0)]);
        let c = assemble_certificate(&p, &feasible(&p)).unwrap();
        assert_eq!(c.n(), 1);
        assert!(c.pencil.iter().all(|z| z.norm() < 1e-8));
    }

    #[test]
    fn sum_square() {
        // (x+y)*(x+y)
        let p = PLPoly::from_real(&[(Mono::X2, 1.0), (Mono::XY, 1.0), (Mono::YX, 1.0), (Mono::Y2, 1.0)]);
        let c = assemble_certificate(&p, &feasible(&p)).unwrap();
        assert!(c.residuals.reconstruction < 1e-8);
    }

    #[test]
    fn negative_square_infeasible() {
        let p = PLPoly::from_real(&[(Mono::X2, -1.0), (Mono::Y2, 1.0)]);
        assert!(matches!(gram_complete_certificate(&p).unwrap(), GramOutcome::Infeasible { .. }));
    }

    #[test]
    fn random_factor_recovered() {
        // rank-deficient Gram patterns; these once tripped the affine projection
        use crate::matkit::sample::{rng_from_seed, sample_gaussian};
        let mut rng = rng_from_seed(8);
        for n in 1..=4 {
            let col = |rng: &mut _| CVec::from_column_slice(sample_gaussian(n, 1, rng).as_slice());
            let cert = XYCert {
                lx: col(&mut rng),
                ly: col(&mut rng),
                lxy: col(&mut rng),
                lyx: col(&mut rng),
                pencil: [C64::new(0.0, 0.0); 5],
                r1: C64::new(0.0, 0.0),
                residuals: CertResiduals::default(),
            };
            let p = cert.gram_part().add(&PLPoly::from_real(&[(Mono::One, 0.5), (Mono::X, -1.0)]));
            let c = assemble_certificate(&p, &feasible(&p)).unwrap();
            assert!(c.residuals.reconstruction < 1e-8, "{n}: {:?}", c.residuals);
        }
    }

    #[test]
    fn json_round_trip() {
        let p = PLPoly::from_real(&[(Mono::X2, 2.0), (Mono::Y2, 1.0), (Mono::XYX, 0.5), (Mono::XY2X, 1.0), (Mono::One, 3.0)]);
        let c = assemble_certificate(&p, &feasible(&p)).unwrap();
        let s = serde_json::to_string(&c.to_file()).unwrap();
        assert!(s.contains("\"N\"") && s.contains("\"Lambda\""));
        let back: XYCertFile = serde_json::from_str(&s).unwrap();
        let c2 = back.to_cert().unwrap();
        assert!((&c2.lx - &c.lx).norm() < 1e-15);
    }
}
