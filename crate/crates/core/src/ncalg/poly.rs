use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::context::{LetterClass, VarContext};
use super::tuple::HermTuple;
use super::word::Word;
use crate::error::{Error, Result};
use crate::tol::COEFF_DROP;
use crate::{CMat, C64};

/// Noncommutative polynomial with uniform `rows × cols` complex coefficients.
///
/// Scalar polynomials have `rows = cols = 1`. Rectangular coefficients are
/// used for vector-valued pieces such as the `ℓ` column of a butterfly
/// decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct FreePoly {
    ctx: VarContext,
    rows: usize,
    cols: usize,
    coeffs: BTreeMap<Word, CMat>,
}

fn negligible(m: &CMat) -> bool {
    m.iter().all(|z| z.norm() < COEFF_DROP)
}

impl FreePoly {
    pub fn zero(ctx: &VarContext, rows: usize, cols: usize) -> Self {
        FreePoly { ctx: ctx.clone(), rows, cols, coeffs: BTreeMap::new() }
    }

    pub fn zero_scalar(ctx: &VarContext) -> Self {
        Self::zero(ctx, 1, 1)
    }

    pub fn constant(ctx: &VarContext, c: C64) -> Self {
        let mut p = Self::zero_scalar(ctx);
        p.add_term(Word::unit(), CMat::from_element(1, 1, c));
        p
    }

    pub fn one(ctx: &VarContext) -> Self {
        Self::constant(ctx, C64::new(1.0, 0.0))
    }

    /// The letter with id `id` as a scalar polynomial.
    pub fn letter(ctx: &VarContext, id: usize) -> Self {
        Self::monomial(ctx, Word::letter(id), C64::new(1.0, 0.0))
    }

    pub fn monomial(ctx: &VarContext, w: Word, c: C64) -> Self {
        let mut p = Self::zero_scalar(ctx);
        p.add_term(w, CMat::from_element(1, 1, c));
        p
    }

    /// Scalar polynomial from `(word, coefficient)` pairs; repeated words accumulate.
    pub fn from_terms(ctx: &VarContext, terms: impl IntoIterator<Item = (Word, C64)>) -> Self {
        let mut p = Self::zero_scalar(ctx);
        for (w, c) in terms {
            p.add_term(w, CMat::from_element(1, 1, c));
        }
        p
    }

    /// Matrix polynomial of the given coefficient shape.
    pub fn from_matrix_terms(
        ctx: &VarContext,
        rows: usize,
        cols: usize,
        terms: impl IntoIterator<Item = (Word, CMat)>,
    ) -> Result<Self> {
        let mut p = Self::zero(ctx, rows, cols);
        for (w, c) in terms {
            if c.shape() != (rows, cols) {
                return Err(Error::Shape(format!(
                    "coefficient {:?} in a {rows}x{cols} polynomial",
                    c.shape()
                )));
            }
            p.add_term(w, c);
        }
        Ok(p)
    }

    /// Adds `c · w`, dropping the entry if it cancels.
    pub fn add_term(&mut self, w: Word, c: CMat) {
        assert_eq!(c.shape(), (self.rows, self.cols), "coefficient shape");
        debug_assert!(w.letters().iter().all(|&l| l < self.ctx.len()), "letter outside context");
        let entry = self.coeffs.entry(w.clone()).or_insert_with(|| CMat::zeros(self.rows, self.cols));
        *entry += c;
        if negligible(entry) {
            self.coeffs.remove(&w);
        }
    }

    pub fn ctx(&self) -> &VarContext {
        &self.ctx
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_scalar(&self) -> bool {
        self.rows == 1 && self.cols == 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &CMat)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, w: &Word) -> Option<&CMat> {
        self.coeffs.get(w)
    }

    /// Scalar coefficient of `w` (zero when absent). Panics on matrix polynomials.
    pub fn scalar_coeff(&self, w: &Word) -> C64 {
        assert!(self.is_scalar(), "scalar_coeff on a matrix polynomial");
        self.coeffs.get(w).map(|m| m[(0, 0)]).unwrap_or_default()
    }

    /// Replaces the variable context, keeping letter ids. The new context must be at least as large.
    pub fn with_ctx(mut self, ctx: &VarContext) -> Result<Self> {
        if ctx.len() < self.ctx.len() {
            return Err(Error::Context("new context has fewer letters".into()));
        }
        self.ctx = ctx.clone();
        Ok(self)
    }

    fn check_ctx(&self, other: &FreePoly) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::Context("polynomials live over different variable contexts".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &FreePoly) -> Result<FreePoly> {
        self.check_ctx(other)?;
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!("add {:?} + {:?}", self.shape(), other.shape())));
        }
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FreePoly) -> Result<FreePoly> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> FreePoly {
        let mut out = Self::zero(&self.ctx, self.rows, self.cols);
        for (w, c) in &self.coeffs {
            out.add_term(w.clone(), c * s);
        }
        out
    }

    /// Left-multiplies every coefficient by a constant matrix.
    pub fn left_mul_const(&self, m: &CMat) -> Result<FreePoly> {
        if m.ncols() != self.rows {
            return Err(Error::Shape("left constant factor".into()));
        }
        let mut out = Self::zero(&self.ctx, m.nrows(), self.cols);
        for (w, c) in &self.coeffs {
            out.add_term(w.clone(), m * c);
        }
        Ok(out)
    }

    /// Right-multiplies every coefficient by a constant matrix.
    pub fn right_mul_const(&self, m: &CMat) -> Result<FreePoly> {
        if m.nrows() != self.cols {
            return Err(Error::Shape("right constant factor".into()));
        }
        let mut out = Self::zero(&self.ctx, self.rows, m.ncols());
        for (w, c) in &self.coeffs {
            out.add_term(w.clone(), c * m);
        }
        Ok(out)
    }

    /// Product: the coefficient of `w` is `Σ_{uv=w} p_u q_v`.
    pub fn mul(&self, other: &FreePoly) -> Result<FreePoly> {
        self.check_ctx(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!("mul {:?} * {:?}", self.shape(), other.shape())));
        }
        let mut out = Self::zero(&self.ctx, self.rows, other.cols);
        for (u, a) in &self.coeffs {
            for (v, b) in &other.coeffs {
                out.add_term(u.concat(v), a * b);
            }
        }
        Ok(out)
    }

    /// Involution: reverses words and conjugate-transposes coefficients.
    pub fn adjoint(&self) -> FreePoly {
        let mut out = Self::zero(&self.ctx, self.cols, self.rows);
        for (w, c) in &self.coeffs {
            out.add_term(w.adjoint(), c.adjoint());
        }
        out
    }

    /// Largest coefficient entry modulus of `self − other`.
    pub fn max_diff(&self, other: &FreePoly) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.max_abs_coeff())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().flat_map(|c| c.iter().map(|z| z.norm())).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols && self.max_diff(&self.adjoint()).map(|d| d <= tol).unwrap_or(false)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn degree_in_class(&self, class: LetterClass) -> usize {
        self.coeffs
            .keys()
            .map(|w| w.letters().iter().filter(|&&l| self.ctx.letter(l).class == class).count())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in_letter(&self, id: usize) -> usize {
        self.coeffs.keys().map(|w| w.count_of(id)).max().unwrap_or(0)
    }

    /// Keeps only the terms whose word satisfies `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&Word) -> bool) -> FreePoly {
        let mut out = Self::zero(&self.ctx, self.rows, self.cols);
        for (w, c) in &self.coeffs {
            if keep(w) {
                out.add_term(w.clone(), c.clone());
            }
        }
        out
    }

    /// Number of x-class letters in `w`.
    pub fn x_count_in(&self, w: &Word) -> usize {
        w.letters().iter().filter(|&&l| self.ctx.letter(l).class == LetterClass::X).count()
    }

    /// `Σ_w coeff(w) ⊗ w(T)`, with the empty word evaluating to the identity.
    pub fn eval(&self, t: &HermTuple) -> Result<CMat> {
        if t.a.len() != self.ctx.a_count() || t.x.len() != self.ctx.x_count() {
            return Err(Error::Context(format!(
                "tuple has {}+{} matrices, context expects {}+{}",
                t.a.len(),
                t.x.len(),
                self.ctx.a_count(),
                self.ctx.x_count()
            )));
        }
        let n = t.n;
        for m in t.a.iter().chain(&t.x) {
            if m.shape() != (n, n) {
                return Err(Error::Shape(format!("tuple entry {:?}, expected {n}x{n}", m.shape())));
            }
        }
        let mut out = CMat::zeros(self.rows * n, self.cols * n);
        for (w, c) in &self.coeffs {
            let mut prod = DMatrix::<C64>::identity(n, n);
            for &l in w.letters() {
                let letter = self.ctx.letter(l);
                let m = match letter.class {
                    LetterClass::A => &t.a[letter.index],
                    LetterClass::X => &t.x[letter.index],
                };
                prod = prod * m;
            }
            out += c.kronecker(&prod);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::sample::{rng_from_seed, sample_tuple};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn xy() -> VarContext {
        VarContext::x_only(&["x", "y"]).unwrap()
    }

    #[test]
    fn noncommutative_products() {
        let ctx = xy();
        let x = FreePoly::letter(&ctx, 0);
        let y = FreePoly::letter(&ctx, 1);
        assert_ne!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        let one = FreePoly::one(&ctx);
        assert_eq!(x.mul(&one).unwrap(), x);
    }

    #[test]
    fn square_of_sum_against_convolution() {
        let ctx = xy();
        let s = FreePoly::letter(&ctx, 0).add(&FreePoly::letter(&ctx, 1)).unwrap();
        let sq = s.mul(&s).unwrap();
        let expect = FreePoly::from_terms(
            &ctx,
            [(Word(vec![0, 0]), c(1.0)), (Word(vec![0, 1]), c(1.0)), (Word(vec![1, 0]), c(1.0)), (Word(vec![1, 1]), c(1.0))],
        );
        assert_eq!(sq, expect);
        // brute-force convolution over all length-2 words
        for a in 0..2 {
            for b in 0..2 {
                let w = Word(vec![a, b]);
                let conv: C64 = (0..=2)
                    .map(|k| s.scalar_coeff(&Word(w.0[..k].to_vec())) * s.scalar_coeff(&Word(w.0[k..].to_vec())))
                    .sum();
                assert_eq!(sq.scalar_coeff(&w), conv);
            }
        }
        assert_eq!(sq.degree(), 2);
    }

    #[test]
    fn adjoint_rules() {
        let ctx = xy();
        let p = FreePoly::monomial(&ctx, Word(vec![0, 1]), C64::new(0.0, 1.0));
        let q = FreePoly::monomial(&ctx, Word(vec![1, 0]), C64::new(0.0, -1.0));
        assert_eq!(p.adjoint(), q);
        let intro = FreePoly::from_terms(&ctx, [(Word(vec![0, 1]), c(1.0)), (Word(vec![1, 0]), c(-17.0)), (Word::unit(), c(4.0))]);
        let adj = FreePoly::from_terms(&ctx, [(Word(vec![1, 0]), c(1.0)), (Word(vec![0, 1]), c(-17.0)), (Word::unit(), c(4.0))]);
        assert_eq!(intro.adjoint(), adj);
        let sym = FreePoly::from_terms(&ctx, [(Word(vec![0, 0]), c(1.0)), (Word(vec![1, 1]), c(1.0))]);
        assert!(sym.is_symmetric(0.0));
    }

    #[test]
    fn degrees_by_class() {
        let ctx = VarContext::with_names(&["a"], &["x"]).unwrap();
        let p = FreePoly::monomial(&ctx, Word(vec![1, 0, 0, 1]), c(1.0));
        assert_eq!(p.degree_in_class(LetterClass::X), 2);
        assert_eq!(p.degree_in_class(LetterClass::A), 2);
        let q = FreePoly::monomial(&ctx, Word(vec![1, 1, 0, 0]), c(1.0));
        assert_eq!(q.degree_in_letter(1), 2);
    }

    #[test]
    fn cancellation_drops_terms() {
        let ctx = xy();
        let x = FreePoly::letter(&ctx, 0);
        assert!(x.sub(&x).unwrap().is_zero());
    }

    #[test]
    fn context_mismatch() {
        let x = FreePoly::letter(&xy(), 0);
        let other = FreePoly::letter(&VarContext::x_only(&["u"]).unwrap(), 0);
        assert!(matches!(x.mul(&other), Err(Error::Context(_))));
    }

    #[test]
    fn eval_unit_is_identity() {
        let ctx = xy();
        let mut rng = rng_from_seed(3);
        let t = sample_tuple(3, 0, 2, 1.0, &mut rng);
        let e = FreePoly::one(&ctx).eval(&t).unwrap();
        assert_eq!(e, CMat::identity(3, 3));
    }
}
