use nalgebra::{DMatrix, DVector};

use super::{checked_svd, eigh, hermitian_part};
use crate::error::{Error, Result};
use crate::{CMat, C64};

/// `Σ coeff · G[i][j] = value` over a Hermitian unknown `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, usize, C64)>,
    pub value: C64,
}

impl LinearConstraint {
    /// `G[i][j] = value`.
    pub fn pin(i: usize, j: usize, value: C64) -> Self {
        LinearConstraint { terms: vec![(i, j, C64::new(1.0, 0.0))], value }
    }
}

#[derive(Debug, Clone)]
pub enum CompletionResult {
    Complete { g: CMat, iterations: usize, residual: f64, lambda_min: f64 },
    Infeasible { iterations: usize, residual: f64, gap: f64 },
}

impl CompletionResult {
    pub fn matrix(&self) -> Option<&CMat> {
        match self {
            CompletionResult::Complete { g, .. } => Some(g),
            CompletionResult::Infeasible { .. } => None,
        }
    }
}

struct Coords {
    d: usize,
    pairs: Vec<(usize, usize)>,
}

impl Coords {
    fn new(d: usize) -> Self {
        let pairs = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
        Coords { d, pairs }
    }

    fn dim(&self) -> usize {
        self.d * self.d
    }

    /// `G[i][j]` as complex combination of real coordinates.
    fn entry(&self, i: usize, j: usize) -> Vec<(usize, C64)> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        if i == j {
            return vec![(i, C64::new(1.0, 0.0))];
        }
        let (a, b, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let p = self.pairs.iter().position(|&q| q == (a, b)).unwrap();
        vec![(self.d + 2 * p, C64::new(s, 0.0)), (self.d + 2 * p + 1, C64::new(0.0, sign * s))]
    }

    fn to_coords(&self, g: &CMat) -> DVector<f64> {
        let s = std::f64::consts::SQRT_2;
        let mut th = DVector::zeros(self.dim());
        for i in 0..self.d {
            th[i] = g[(i, i)].re;
        }
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            let z = (g[(i, j)] + g[(j, i)].conj()) * 0.5;
            th[self.d + 2 * p] = s * z.re;
            th[self.d + 2 * p + 1] = s * z.im;
        }
        th
    }

    fn to_herm(&self, th: &DVector<f64>) -> CMat {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut g = CMat::zeros(self.d, self.d);
        for i in 0..self.d {
            g[(i, i)] = C64::new(th[i], 0.0);
        }
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            let z = C64::new(s * th[self.d + 2 * p], s * th[self.d + 2 * p + 1]);
            g[(i, j)] = z;
            g[(j, i)] = z.conj();
        }
        g
    }
}

struct Affine {
    a: DMatrix<f64>,
    b: DVector<f64>,
    pinv: DMatrix<f64>,
}

impl Affine {
    fn new(coords: &Coords, cons: &[LinearConstraint]) -> Self {
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        for c in cons {
            let mut r = vec![C64::new(0.0, 0.0); coords.dim()];
            for &(i, j, coef) in &c.terms {
                for (k, w) in coords.entry(i, j) {
                    r[k] += coef * w;
                }
            }
            let re: Vec<f64> = r.iter().map(|z| z.re).collect();
            let im: Vec<f64> = r.iter().map(|z| z.im).collect();
            if re.iter().any(|v| v.abs() > 1e-15) || c.value.re.abs() > 0.0 {
                rows.push((re, c.value.re));
            }
            if im.iter().any(|v| v.abs() > 1e-15) || c.value.im.abs() > 0.0 {
                rows.push((im, c.value.im));
            }
        }
        let m = rows.len();
        let n = coords.dim();
        let a = DMatrix::from_fn(m, n, |i, j| rows[i].0[j]);
        let b = DVector::from_iterator(m, rows.iter().map(|r| r.1));
        let pinv = if m == 0 {
            DMatrix::zeros(n, 0)
        } else {
            checked_svd(&a).pseudo_inverse(1e-12).expect("svd pseudo-inverse")
        };
        Affine { a, b, pinv }
    }

    fn residual(&self, th: &DVector<f64>) -> f64 {
        if self.b.is_empty() {
            return 0.0;
        }
        (&self.a * th - &self.b).norm()
    }

    fn project(&self, th: &DVector<f64>) -> DVector<f64> {
        if self.b.is_empty() {
            return th.clone();
        }
        th - &self.pinv * (&self.a * th - &self.b)
    }
}

fn project_psd(g: &CMat) -> CMat {
    if g.is_empty() {
        return g.clone();
    }
    let (vals, vecs) = eigh(g);
    let d = CMat::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|&v| C64::new(v.max(0.0), 0.0))));
    hermitian_part(&(&vecs * d * vecs.adjoint()))
}

/// Damped Gauss–Newton on `G = F F*` (`F` is `d × rank`, seeded from the top
/// eigenpairs of `g`) to drive the affine residual down while staying PSD.
fn polish(coords: &Coords, aff: &Affine, g: &CMat, rank: usize, steps: usize) -> CMat {
    let d = coords.d;
    if d == 0 || aff.b.is_empty() || rank == 0 {
        return g.clone();
    }
    let (vals, vecs) = eigh(g);
    // zero columns have a zero Jacobian, so small eigenvalues get a floor
    let floor = 1e-6 * vals.iter().copied().fold(0.0, f64::max).max(1e-300);
    let mut f = CMat::zeros(d, rank);
    for k in 0..rank {
        let i = d - 1 - k;
        f.set_column(k, &(vecs.column(i) * C64::new(vals[i].max(floor).sqrt(), 0.0)));
    }
    let gram = |f: &CMat| hermitian_part(&(f * f.adjoint()));
    let mut best = gram(&f);
    let mut best_res = aff.residual(&coords.to_coords(&best));
    let np = 2 * d * rank;
    let mut mu = f64::NAN;
    let mut fails = 0;
    for _ in 0..steps {
        if best_res < 1e-14 || fails > 12 {
            break;
        }
        let res = &aff.a * coords.to_coords(&best) - &aff.b;
        let mut jac = DMatrix::<f64>::zeros(aff.b.len(), np);
        let mut col = 0;
        for i in 0..d {
            for k in 0..rank {
                for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                    let mut dm = CMat::zeros(d, rank);
                    dm[(i, k)] = unit;
                    let dg = &dm * f.adjoint() + &f * dm.adjoint();
                    jac.set_column(col, &(&aff.a * coords.to_coords(&dg)));
                    col += 1;
                }
            }
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &res;
        if mu.is_nan() {
            mu = 1e-6 * jtj.diagonal().max().max(1e-300);
        }
        // Levenberg–Marquardt: damp until the step reduces the residual
        let mut improved = false;
        while fails <= 12 {
            let damped = &jtj + DMatrix::<f64>::identity(np, np) * mu;
            let Some(step) = damped.cholesky().map(|c| c.solve(&jtr)) else {
                mu *= 10.0;
                fails += 1;
                continue;
            };
            let mut fnew = f.clone();
            let mut idx = 0;
            for i in 0..d {
                for k in 0..rank {
                    fnew[(i, k)] -= C64::new(step[idx], step[idx + 1]);
                    idx += 2;
                }
            }
            let gn = gram(&fnew);
            let r = aff.residual(&coords.to_coords(&gn));
            if r < best_res {
                (f, best, best_res) = (fnew, gn, r);
                mu = (mu / 3.0).max(1e-18);
                fails = 0;
                improved = true;
                break;
            }
            mu *= 4.0;
            fails += 1;
        }
        if !improved {
            break;
        }
    }
    best
}

/// Finds a Hermitian PSD `G` (`d × d`) with `‖constraint residual‖ ≤ tol_aff`.
///
/// Pinned-zero diagonal entries are removed first (their rows and columns must
/// vanish). The reduced problem is solved by Dykstra's alternating projections
/// between the affine set (least squares) and the PSD cone (eigenvalue
/// clipping), followed by a Levenberg–Marquardt refinement of a Gram factor
/// at full and at numerical rank.
pub fn psd_complete(
    d: usize,
    constraints: &[LinearConstraint],
    init: Option<&CMat>,
    tol_aff: f64,
    max_iter: usize,
) -> Result<CompletionResult> {
    for c in constraints {
        if c.terms.iter().any(|&(i, j, _)| i >= d || j >= d) {
            return Err(Error::Shape("constraint index outside the matrix".into()));
        }
    }
    // face reduction on pinned-zero diagonals
    let zero_diag: Vec<usize> = constraints
        .iter()
        .filter(|c| c.terms.len() == 1 && c.terms[0].0 == c.terms[0].1 && c.value.norm() == 0.0 && c.terms[0].2.norm() > 0.0)
        .map(|c| c.terms[0].0)
        .collect();
    let keep: Vec<usize> = (0..d).filter(|i| !zero_diag.contains(i)).collect();
    let pos = |i: usize| keep.iter().position(|&k| k == i);
    let mut reduced = Vec::new();
    for c in constraints {
        let terms: Vec<(usize, usize, C64)> =
            c.terms.iter().filter_map(|&(i, j, w)| Some((pos(i)?, pos(j)?, w))).collect();
        if terms.is_empty() {
            if c.value.norm() > tol_aff {
                return Err(Error::InfeasibleAffine(c.value.norm()));
            }
            continue;
        }
        reduced.push(LinearConstraint { terms, value: c.value });
    }
    let dr = keep.len();
    let coords = Coords::new(dr);
    let aff = Affine::new(&coords, &reduced);
    // consistency of the affine system itself
    let th0 = aff.project(&DVector::zeros(coords.dim()));
    let r0 = aff.residual(&th0);
    if r0 > 1e3 * tol_aff * (1.0 + aff.b.norm()) {
        return Err(Error::InfeasibleAffine(r0));
    }
    let embed = |g: &CMat| {
        let mut full = CMat::zeros(d, d);
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                full[(i, j)] = g[(a, b)];
            }
        }
        full
    };
    if dr == 0 {
        return Ok(CompletionResult::Complete { g: CMat::zeros(d, d), iterations: 0, residual: 0.0, lambda_min: 0.0 });
    }
    let start = match init {
        Some(g0) => {
            let mut r = CMat::zeros(dr, dr);
            for (a, &i) in keep.iter().enumerate() {
                for (b, &j) in keep.iter().enumerate() {
                    r[(a, b)] = g0[(i, j)];
                }
            }
            hermitian_part(&r)
        }
        None => CMat::zeros(dr, dr),
    };
    let mut x = coords.to_coords(&start);
    let n = coords.dim();
    let mut p = DVector::<f64>::zeros(n);
    let mut q = DVector::<f64>::zeros(n);
    let mut iters = 0;
    let mut gap = f64::INFINITY;
    let mut xg = start.clone();
    while iters < max_iter {
        iters += 1;
        let y = aff.project(&(&x + &p));
        p = &x + &p - &y;
        xg = project_psd(&coords.to_herm(&(&y + &q)));
        let xn = coords.to_coords(&xg);
        q = &y + &q - &xn;
        gap = (&xn - &y).norm();
        x = xn;
        if iters % 10 == 0 && aff.residual(&x) <= 0.1 * tol_aff {
            break;
        }
    }
    let mut g = xg;
    let mut res = aff.residual(&coords.to_coords(&g));
    if res > 0.1 * tol_aff {
        // full-rank factor first, then the numerical ranks of the iterate:
        // on non-Slater patterns only the low-rank factor converges quickly
        for round in 0..3 {
            let (vals, _) = eigh(&g);
            let lmax = vals.iter().copied().fold(0.0, f64::max);
            let mut ranks = if round == 0 { vec![dr] } else { vec![] };
            for rel in [1e-3, 1e-5, 1e-7] {
                let r = vals.iter().filter(|&&v| v > rel * lmax).count();
                if r > 0 && !ranks.contains(&r) {
                    ranks.push(r);
                }
            }
            for r in ranks {
                if res <= 0.1 * tol_aff {
                    break;
                }
                let polished = polish(&coords, &aff, &g, r, 200);
                let pres = aff.residual(&coords.to_coords(&polished));
                if pres < res {
                    g = polished;
                    res = pres;
                }
            }
        }
    }
    let lambda_min = eigh(&g).0.iter().copied().fold(f64::INFINITY, f64::min);
    if res <= tol_aff && lambda_min >= -tol_aff {
        Ok(CompletionResult::Complete { g: embed(&g), iterations: iters, residual: res, lambda_min })
    } else {
        Ok(CompletionResult::Infeasible { iterations: iters, residual: res, gap })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::real;
    use crate::tol::{MAX_ITER, TOL_AFF};

    #[test]
    fn fully_pinned_identity() {
        let mut cons = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                cons.push(LinearConstraint::pin(i, j, real(if i == j { 1.0 } else { 0.0 })));
            }
        }
        let r = psd_complete(3, &cons, None, TOL_AFF, MAX_ITER).unwrap();
        assert!((r.matrix().unwrap() - CMat::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn zero_completion_from_zero_init() {
        let cons = [LinearConstraint::pin(0, 0, real(1.0)), LinearConstraint::pin(1, 1, real(1.0))];
        let r = psd_complete(2, &cons, None, TOL_AFF, MAX_ITER).unwrap();
        let g = r.matrix().unwrap();
        assert!(g[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn forced_diagonal_growth() {
        let cons = [LinearConstraint::pin(0, 0, real(1.0)), LinearConstraint::pin(0, 1, real(2.0))];
        let r = psd_complete(2, &cons, None, TOL_AFF, MAX_ITER).unwrap();
        let g = r.matrix().unwrap();
        assert!(g[(1, 1)].re >= 4.0 - 1e-8, "{g}");
    }

    #[test]
    fn infeasible_pattern() {
        let cons = [LinearConstraint::pin(0, 0, real(1.0)), LinearConstraint::pin(1, 1, real(1.0)), LinearConstraint::pin(0, 1, real(2.0))];
        let r = psd_complete(2, &cons, None, TOL_AFF, 2000).unwrap();
        assert!(matches!(r, CompletionResult::Infeasible { .. }));
    }

    #[test]
    fn inconsistent_affine() {
        let cons = [LinearConstraint::pin(0, 0, real(1.0)), LinearConstraint::pin(0, 0, real(2.0))];
        assert!(matches!(psd_complete(2, &cons, None, TOL_AFF, 100), Err(Error::InfeasibleAffine(_))));
    }

    #[test]
    fn negative_diagonal_pin() {
        let cons = [LinearConstraint::pin(0, 0, real(-1.0))];
        let r = psd_complete(2, &cons, None, TOL_AFF, 2000).unwrap();
        assert!(matches!(r, CompletionResult::Infeasible { .. }));
    }

    #[test]
    fn zero_diagonal_face() {
        let cons = [LinearConstraint::pin(1, 1, real(0.0)), LinearConstraint::pin(0, 0, real(2.0)), LinearConstraint::pin(0, 1, real(0.0))];
        let r = psd_complete(2, &cons, None, TOL_AFF, MAX_ITER).unwrap();
        let g = r.matrix().unwrap();
        assert!((g[(0, 0)].re - 2.0).abs() < 1e-9 && g[(1, 1)].norm() == 0.0);
    }
}
