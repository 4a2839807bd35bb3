//! Text format for scalar polynomials.
//!
//! A polynomial is a signed sum of terms. A term is a product of factors
//! separated by whitespace or `*`: real numbers, imaginary numbers (`2i`, `i`),
//! parenthesised complex numbers (`(1.5-2i)`), and letters with an optional
//! integer power (`x^2`). Numbers multiply, letters concatenate in order.
//!
//! A poly file may declare letters before the polynomial:
//!
//! ```text
//! # comment
//! a: a1 a2
//! x: x y
//! x a1 x + 2
//! ```
//!
//! Without declarations, letters are x-class in order of first appearance.

use std::fmt::Write as _;

use super::context::{is_identifier, LetterClass, VarContext};
use super::poly::FreePoly;
use super::word::Word;
use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Num(f64),
    Imag(f64),
    Ident(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str, line0: usize) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let line_no = line0 + li;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: line_no, col });
            match c {
                ' ' | '\t' | '\r' => i += 1,
                '#' => break,
                '+' => {
                    push(&mut out, Tok::Plus);
                    i += 1
                }
                '-' => {
                    push(&mut out, Tok::Minus);
                    i += 1
                }
                '*' => {
                    push(&mut out, Tok::Star);
                    i += 1
                }
                '^' => {
                    push(&mut out, Tok::Caret);
                    i += 1
                }
                '(' => {
                    push(&mut out, Tok::LParen);
                    i += 1
                }
                ')' => {
                    push(&mut out, Tok::RParen);
                    i += 1
                }
                c if c.is_ascii_digit() || c == '.' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                        i += 1;
                    }
                    // exponent part
                    if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                        let mut j = i + 1;
                        if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                            j += 1;
                        }
                        if j < chars.len() && chars[j].is_ascii_digit() {
                            while j < chars.len() && chars[j].is_ascii_digit() {
                                j += 1;
                            }
                            i = j;
                        }
                    }
                    let text: String = chars[start..i].iter().collect();
                    let v: f64 = text
                        .parse()
                        .map_err(|_| Error::parse(line_no, col, format!("bad number `{text}`")))?;
                    let imag = i < chars.len()
                        && chars[i] == 'i'
                        && !(i + 1 < chars.len() && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_'));
                    if imag {
                        i += 1;
                        push(&mut out, Tok::Imag(v));
                    } else {
                        push(&mut out, Tok::Num(v));
                    }
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    let text: String = chars[start..i].iter().collect();
                    if text == "i" {
                        push(&mut out, Tok::Imag(1.0));
                    } else {
                        push(&mut out, Tok::Ident(text));
                    }
                }
                other => return Err(Error::parse(line_no, col, format!("unexpected character `{other}`"))),
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    ctx: VarContext,
    infer: bool,
    end: (usize, usize),
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|s| (s.line, s.col)).unwrap_or(self.end)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.here();
        Error::parse(l, c, msg)
    }

    fn poly(&mut self) -> Result<Vec<(Word, C64)>> {
        let mut terms = Vec::new();
        if self.peek().is_none() {
            return Err(self.err("empty polynomial"));
        }
        let mut sign = 1.0;
        let mut first = true;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    sign = -sign;
                }
                _ if !first => return Err(self.err("expected `+` or `-` between terms")),
                _ => {}
            }
            // allow `+ -3 x`
            while let Some(t) = self.peek() {
                match t {
                    Tok::Plus => self.pos += 1,
                    Tok::Minus => {
                        self.pos += 1;
                        sign = -sign
                    }
                    _ => break,
                }
            }
            let (w, c) = self.term()?;
            terms.push((w, c * sign));
            sign = 1.0;
            first = false;
            if self.peek().is_none() {
                break;
            }
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<(Word, C64)> {
        let mut coeff = C64::new(1.0, 0.0);
        let mut letters = Vec::new();
        let mut nfactors = 0;
        loop {
            match self.peek() {
                Some(Tok::Star) if nfactors > 0 => {
                    self.pos += 1;
                    continue;
                }
                Some(Tok::Num(v)) => {
                    coeff *= *v;
                    self.pos += 1;
                }
                Some(Tok::Imag(v)) => {
                    coeff *= C64::new(0.0, *v);
                    self.pos += 1;
                }
                Some(Tok::LParen) => {
                    self.pos += 1;
                    coeff *= self.complex()?;
                }
                Some(Tok::Ident(name)) => {
                    let name = name.clone();
                    let id = match self.ctx.id(&name) {
                        Some(id) => id,
                        None if self.infer => self.ctx.push(&name, LetterClass::X)?,
                        None => return Err(self.err(format!("unknown letter `{name}`"))),
                    };
                    self.pos += 1;
                    let mut power = 1;
                    if let Some(Tok::Caret) = self.peek() {
                        self.pos += 1;
                        match self.peek() {
                            Some(Tok::Num(v)) if v.fract() == 0.0 && *v >= 0.0 => {
                                power = *v as usize;
                                self.pos += 1;
                            }
                            _ => return Err(self.err("expected a nonnegative integer power")),
                        }
                    }
                    letters.extend(std::iter::repeat_n(id, power));
                }
                _ => break,
            }
            nfactors += 1;
        }
        if nfactors == 0 {
            return Err(self.err("expected a term"));
        }
        Ok((Word(letters), coeff))
    }

    fn complex(&mut self) -> Result<C64> {
        let mut z = C64::new(0.0, 0.0);
        let mut any = false;
        loop {
            let mut sign = 1.0;
            while let Some(t) = self.peek() {
                match t {
                    Tok::Plus => self.pos += 1,
                    Tok::Minus => {
                        sign = -sign;
                        self.pos += 1
                    }
                    _ => break,
                }
            }
            match self.peek() {
                Some(Tok::Num(v)) => z += C64::new(sign * v, 0.0),
                Some(Tok::Imag(v)) => z += C64::new(0.0, sign * v),
                Some(Tok::RParen) if any => {
                    self.pos += 1;
                    return Ok(z);
                }
                _ => return Err(self.err("malformed complex number")),
            }
            self.pos += 1;
            any = true;
            if let Some(Tok::RParen) = self.peek() {
                self.pos += 1;
                return Ok(z);
            }
        }
    }
}

/// Parses a polynomial over `ctx`, or infers x-class letters when `ctx` is `None`.
pub fn parse_poly(src: &str, ctx: Option<&VarContext>) -> Result<FreePoly> {
    parse_at(src, 1, ctx)
}

fn parse_at(src: &str, line0: usize, ctx: Option<&VarContext>) -> Result<FreePoly> {
    let toks = lex(src, line0)?;
    let nlines = src.lines().count().max(1);
    let last_len = src.lines().last().map(|l| l.chars().count()).unwrap_or(0);
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        ctx: ctx.cloned().unwrap_or_default(),
        infer: ctx.is_none(),
        end: (line0 + nlines - 1, last_len + 1),
    };
    let terms = p.poly()?;
    Ok(FreePoly::from_terms(&p.ctx, terms))
}

/// Parsed poly file: the polynomial plus whether letters were declared.
#[derive(Debug, Clone)]
pub struct PolyFile {
    pub poly: FreePoly,
    pub declared: bool,
}

/// Parses the file container: optional `a:`/`x:` declaration lines, `#` comments, then the polynomial.
pub fn parse_poly_file(src: &str) -> Result<PolyFile> {
    let mut a_names: Vec<String> = Vec::new();
    let mut x_names: Vec<String> = Vec::new();
    let mut declared = false;
    let mut body = String::new();
    let mut body_line0 = None;
    for (li, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim();
        let decl = trimmed.strip_prefix("a:").map(|r| (LetterClass::A, r)).or_else(|| trimmed.strip_prefix("x:").map(|r| (LetterClass::X, r)));
        if let (Some((class, rest)), None) = (decl, body_line0) {
            declared = true;
            for name in rest.split_whitespace() {
                if !is_identifier(name) || name == "i" {
                    let col = raw.find(name).map(|c| c + 1).unwrap_or(1);
                    return Err(Error::parse(li + 1, col, format!("invalid letter name `{name}`")));
                }
                match class {
                    LetterClass::A => a_names.push(name.to_string()),
                    LetterClass::X => x_names.push(name.to_string()),
                }
            }
            continue;
        }
        if trimmed.is_empty() && body_line0.is_none() {
            continue;
        }
        if body_line0.is_none() {
            body_line0 = Some(li + 1);
        }
        body.push_str(line);
        body.push('\n');
    }
    let line0 = body_line0.ok_or_else(|| Error::parse(src.lines().count().max(1), 1, "no polynomial found"))?;
    let poly = if declared {
        let a: Vec<&str> = a_names.iter().map(String::as_str).collect();
        let x: Vec<&str> = x_names.iter().map(String::as_str).collect();
        let ctx = VarContext::with_names(&a, &x).map_err(|e| Error::parse(1, 1, e.to_string()))?;
        parse_at(&body, line0, Some(&ctx))?
    } else {
        parse_at(&body, line0, None)?
    };
    Ok(PolyFile { poly, declared })
}

fn write_word(out: &mut String, w: &Word, ctx: &VarContext) {
    let l = w.letters();
    let mut i = 0;
    let mut first = true;
    while i < l.len() {
        let mut j = i;
        while j < l.len() && l[j] == l[i] {
            j += 1;
        }
        if !first {
            out.push(' ');
        }
        first = false;
        out.push_str(&ctx.letter(l[i]).name);
        if j - i > 1 {
            let _ = write!(out, "^{}", j - i);
        }
        i = j;
    }
}

/// Canonical text of a scalar polynomial (terms in degree-lexicographic order).
pub fn to_text(p: &FreePoly) -> Result<String> {
    if !p.is_scalar() {
        return Err(Error::Shape("text format holds scalar polynomials only".into()));
    }
    if p.is_zero() {
        return Ok("0".into());
    }
    let mut out = String::new();
    for (k, (w, c)) in p.terms().enumerate() {
        let z = c[(0, 0)];
        if z.im == 0.0 {
            let neg = z.re < 0.0 || (z.re == 0.0 && z.re.is_sign_negative());
            let mag = z.re.abs();
            match (k, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if mag != 1.0 || w.is_empty() {
                let _ = write!(out, "{mag}");
                if !w.is_empty() {
                    out.push(' ');
                }
            }
        } else {
            if k > 0 {
                out.push_str(" + ");
            }
            out.push('(');
            if z.re != 0.0 {
                let _ = write!(out, "{}", z.re);
                if z.im >= 0.0 {
                    out.push('+');
                }
            }
            let _ = write!(out, "{}i)", z.im);
            if !w.is_empty() {
                out.push(' ');
            }
        }
        write_word(&mut out, w, p.ctx());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intro_polynomial() {
        let p = parse_poly("x1 x2 - 17 x2 x1 + 4", None).unwrap();
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.scalar_coeff(&Word(vec![1, 0])), C64::new(-17.0, 0.0));
        assert_eq!(p.scalar_coeff(&Word::unit()), C64::new(4.0, 0.0));
    }

    #[test]
    fn complex_and_powers() {
        let p = parse_poly("(1-2i) x^2 y + 2i*y x - i", None).unwrap();
        assert_eq!(p.scalar_coeff(&Word(vec![0, 0, 1])), C64::new(1.0, -2.0));
        assert_eq!(p.scalar_coeff(&Word(vec![1, 0])), C64::new(0.0, 2.0));
        assert_eq!(p.scalar_coeff(&Word::unit()), C64::new(0.0, -1.0));
    }

    #[test]
    fn round_trip() {
        for s in ["x1 x2 - 17 x2 x1 + 4", "(0.5+0.25i) x y + (0.5-0.25i) y x - 3", "x^2 + y^2 + x y^2 x + 2 x y x y + 2 y x y x + y x^2 y", "-x", "(-1i) x y + (1i) y x"] {
            let p = parse_poly(s, None).unwrap();
            let t = to_text(&p).unwrap();
            let q = parse_poly(&t, Some(p.ctx())).unwrap();
            assert_eq!(p, q, "{s} -> {t}");
        }
    }

    #[test]
    fn errors_carry_position() {
        match parse_poly("x + + $", None) {
            Err(Error::Parse { line: 1, col: 7, .. }) => {}
            other => panic!("{other:?}"),
        }
        let ctx = VarContext::x_only(&["x"]).unwrap();
        assert!(matches!(parse_poly("x y", Some(&ctx)), Err(Error::Parse { col: 3, .. })));
    }

    #[test]
    fn file_container() {
        let f = parse_poly_file("# partial problem\na: a\nx: x\n\nx a x\n").unwrap();
        assert!(f.declared);
        assert_eq!(f.poly.ctx().a_count(), 1);
        assert_eq!(f.poly.scalar_coeff(&Word(vec![1, 0, 1])), C64::new(1.0, 0.0));
        let g = parse_poly_file("y x + x y").unwrap();
        assert_eq!(g.poly.ctx().letter(0).name, "y");
        match parse_poly_file("x: x\n\nx + z") {
            Err(Error::Parse { line: 3, col: 5, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn letter_i_rejected() {
        assert!(parse_poly_file("x: i\nx").is_err());
    }
}
