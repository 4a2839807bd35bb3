use std::ops::{Index, IndexMut};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matkit::real;
use crate::ncalg::{FreePoly, LetterClass, VarContext, Word};
use crate::{CMat, C64};

/// Monomials of the xy-convexity support list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mono {
    One,
    X,
    Y,
    X2,
    Y2,
    XY,
    YX,
    XY2,
    Y2X,
    X2Y,
    YX2,
    XYX,
    YXY,
    XYXY,
    YXYX,
    XY2X,
    YX2Y,
}

impl Mono {
    pub const ALL: [Mono; 17] = [
        Mono::One,
        Mono::X,
        Mono::Y,
        Mono::X2,
        Mono::Y2,
        Mono::XY,
        Mono::YX,
        Mono::XY2,
        Mono::Y2X,
        Mono::X2Y,
        Mono::YX2,
        Mono::XYX,
        Mono::YXY,
        Mono::XYXY,
        Mono::YXYX,
        Mono::XY2X,
        Mono::YX2Y,
    ];

    /// The xy-pencil part `{1, x, y, xy, yx}`.
    pub const PENCIL: [Mono; 5] = [Mono::One, Mono::X, Mono::Y, Mono::XY, Mono::YX];

    /// Letters as a string over `{x, y}`; empty for `1`.
    pub fn letters(self) -> &'static str {
        match self {
            Mono::One => "",
            Mono::X => "x",
            Mono::Y => "y",
            Mono::X2 => "xx",
            Mono::Y2 => "yy",
            Mono::XY => "xy",
            Mono::YX => "yx",
            Mono::XY2 => "xyy",
            Mono::Y2X => "yyx",
            Mono::X2Y => "xxy",
            Mono::YX2 => "yxx",
            Mono::XYX => "xyx",
            Mono::YXY => "yxy",
            Mono::XYXY => "xyxy",
            Mono::YXYX => "yxyx",
            Mono::XY2X => "xyyx",
            Mono::YX2Y => "yxxy",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mono::One => "1",
            m => m.letters(),
        }
    }

    pub fn from_letters(s: &str) -> Option<Mono> {
        Mono::ALL.into_iter().find(|m| m.letters() == s)
    }

    pub fn adjoint(self) -> Mono {
        let rev: String = self.letters().chars().rev().collect();
        Mono::from_letters(&rev).expect("support list is closed under reversal")
    }

    pub fn is_pencil(self) -> bool {
        Mono::PENCIL.contains(&self)
    }

    fn index(self) -> usize {
        Mono::ALL.iter().position(|&m| m == self).unwrap()
    }
}

/// Compact `x^2y^2`-style rendering of a word over `{x, y}`.
pub fn render_word(s: &str) -> String {
    if s.is_empty() {
        return "1".into();
    }
    let mut out = String::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let mut k = 1;
        while i + k < chars.len() && chars[i + k] == c {
            k += 1;
        }
        out.push(c);
        if k > 1 {
            out.push_str(&format!("^{k}"));
        }
        i += k;
    }
    out
}

/// Scalar polynomial supported on the support list, in letters `x`, `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PLPoly {
    coef: [C64; 17],
}

impl Index<Mono> for PLPoly {
    type Output = C64;
    fn index(&self, m: Mono) -> &C64 {
        &self.coef[m.index()]
    }
}

impl IndexMut<Mono> for PLPoly {
    fn index_mut(&mut self, m: Mono) -> &mut C64 {
        &mut self.coef[m.index()]
    }
}

impl Default for PLPoly {
    fn default() -> Self {
        Self::zero()
    }
}

impl PLPoly {
    pub fn zero() -> Self {
        PLPoly { coef: [C64::new(0.0, 0.0); 17] }
    }

    pub fn from_pairs(pairs: &[(Mono, C64)]) -> Self {
        let mut p = Self::zero();
        for &(m, c) in pairs {
            p[m] += c;
        }
        p
    }

    /// Real coefficients given by monomial label.
    pub fn from_real(pairs: &[(Mono, f64)]) -> Self {
        let mut p = Self::zero();
        for &(m, c) in pairs {
            p[m] += real(c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mono, C64)> + '_ {
        Mono::ALL.into_iter().map(move |m| (m, self[m])).filter(|(_, c)| c.norm() > 0.0)
    }

    /// `max |p_w − conj(p_{w*})|`.
    pub fn symmetry_residual(&self) -> f64 {
        Mono::ALL.iter().map(|&m| (self[m] - self[m.adjoint()].conj()).norm()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.symmetry_residual() <= tol
    }

    pub fn is_pencil(&self, tol: f64) -> bool {
        Mono::ALL.iter().filter(|m| !m.is_pencil()).all(|&m| self[m].norm() <= tol)
    }

    pub fn sub(&self, other: &PLPoly) -> PLPoly {
        let mut out = self.clone();
        for m in Mono::ALL {
            out[m] -= other[m];
        }
        out
    }

    pub fn add(&self, other: &PLPoly) -> PLPoly {
        let mut out = self.clone();
        for m in Mono::ALL {
            out[m] += other[m];
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coef.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Random symmetric element with Gaussian coefficients.
    pub fn random(rng: &mut impl Rng, scale: f64) -> Self {
        let mut p = Self::zero();
        for m in Mono::ALL {
            let adj = m.adjoint();
            if adj == m {
                let re: f64 = rng.sample(StandardNormal);
                p[m] = real(scale * re);
            } else if m.index() < adj.index() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let c = C64::new(re, im) * scale;
                p[m] = c;
                p[adj] = c.conj();
            }
        }
        p
    }

    /// `p(X, Y)` by direct word products.
    pub fn eval(&self, x: &CMat, y: &CMat) -> CMat {
        let n = x.nrows();
        let mut out = CMat::zeros(n, n);
        for (m, c) in self.terms() {
            let mut w = CMat::identity(n, n);
            for ch in m.letters().chars() {
                w = if ch == 'x' { w * x } else { w * y };
            }
            out += w * c;
        }
        out
    }

    /// Context with x-class letters `x`, `y`.
    pub fn default_ctx() -> VarContext {
        VarContext::x_only(&["x", "y"]).expect("two distinct names")
    }

    pub fn to_free_poly(&self, ctx: &VarContext) -> Result<FreePoly> {
        let (xi, yi) = xy_ids(ctx)?;
        let terms = self.terms().map(|(m, c)| {
            let ids = m.letters().chars().map(|ch| if ch == 'x' { xi } else { yi }).collect();
            (Word(ids), c)
        });
        Ok(FreePoly::from_terms(ctx, terms.collect::<Vec<_>>()))
    }
}

/// Letter ids of `x` (first x-class letter) and `y` (second).
pub fn xy_ids(ctx: &VarContext) -> Result<(usize, usize)> {
    if ctx.a_count() != 0 || ctx.x_count() != 2 {
        return Err(Error::Context(format!(
            "xy-analysis needs exactly two x-class letters and no a-class letters, got {} and {}",
            ctx.x_count(),
            ctx.a_count()
        )));
    }
    Ok((ctx.id_of(LetterClass::X, 0).unwrap(), ctx.id_of(LetterClass::X, 1).unwrap()))
}

/// Outcome of the support screen.
#[derive(Debug, Clone, PartialEq)]
pub enum Screen {
    Accept(PLPoly),
    /// offending monomial, rendered like `x^2y^2`
    Reject(String),
}

/// Accepts `p` iff its support lies in the list.
pub fn support_screen(p: &FreePoly) -> Result<Screen> {
    if !p.is_scalar() {
        return Err(Error::Shape("xy-analysis takes scalar polynomials".into()));
    }
    if !p.is_symmetric(1e-12) {
        return Err(Error::Symmetry("xy-analysis requires p = p*".into()));
    }
    let (xi, _) = xy_ids(p.ctx())?;
    let mut out = PLPoly::zero();
    let mut bad: Vec<(usize, String)> = vec![];
    for (w, c) in p.terms() {
        let s: String = w.letters().iter().map(|&id| if id == xi { 'x' } else { 'y' }).collect();
        match Mono::from_letters(&s) {
            Some(m) => out[m] += c[(0, 0)],
            None => bad.push((w.len(), s)),
        }
    }
    // report the shortest offender, ties broken alphabetically
    bad.sort();
    Ok(match bad.first() {
        Some((_, s)) => Screen::Reject(render_word(s)),
        None => Screen::Accept(out),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::sample::{rng_from_seed, sample_herm};
    use crate::ncalg::{parse_poly, HermTuple};

    fn parse(s: &str) -> FreePoly {
        parse_poly(s, Some(&PLPoly::default_ctx())).unwrap()
    }

    #[test]
    fn screen_cases() {
        assert_eq!(support_screen(&parse("x^2 y^2 + y^2 x^2")).unwrap(), Screen::Reject("x^2y^2".into()));
        match support_screen(&parse("1 + x + x y + y x")).unwrap() {
            Screen::Accept(p) => assert!(p.is_pencil(0.0)),
            _ => panic!(),
        }
        assert!(matches!(support_screen(&parse("x y")), Err(Error::Symmetry(_))));
    }

    #[test]
    fn eval_matches_free_poly() {
        let mut rng = rng_from_seed(3);
        let p = PLPoly::random(&mut rng, 1.0);
        assert!(p.is_symmetric(0.0));
        let f = p.to_free_poly(&PLPoly::default_ctx()).unwrap();
        let x = sample_herm(3, 1.0, &mut rng);
        let y = sample_herm(3, 1.0, &mut rng);
        let t = HermTuple::with_size(3, vec![], vec![x.clone(), y.clone()]).unwrap();
        assert!((f.eval(&t).unwrap() - p.eval(&x, &y)).camax() < 1e-12);
    }

    #[test]
    fn rendering() {
        assert_eq!(render_word("xxyy"), "x^2y^2");
        assert_eq!(render_word(""), "1");
        assert_eq!(Mono::XY2.adjoint(), Mono::Y2X);
    }
}
