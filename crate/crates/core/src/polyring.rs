//! Sparse multivariate polynomials over ℚ.
//!
//! A [`Poly`] lives on a chart with a fixed number of variables; mixing
//! polynomials from charts of different sizes is a structural error. Terms
//! are kept in a `BTreeMap` keyed by [`Monomial`] under graded-lexicographic
//! order, so iteration, serialization and equality are all canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational coefficient, always in lowest terms with positive denominator.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"3"`, `"-3/2"` or `" 7 / 4 "`.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {text:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {text:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(Rat::new(num, den))
}

/// `"n"` for integers, `"n/d"` otherwise.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exponent vector. Ordered graded-lexicographically: total degree first,
/// then lexicographic with `x0 > x1 > ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    /// The coordinate function `x_index`. Panics if `index >= nvars`.
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable {index} out of range for {nvars}");
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(nvars, index), Rat::one());
        p
    }

    pub fn monomial(coeff: Rat, exps: Vec<u32>) -> Self {
        let nvars = exps.len();
        let mut p = Self::zero(nvars);
        if !coeff.is_zero() {
            p.terms.insert(Monomial(exps), coeff);
        }
        p
    }

    /// Builds a polynomial from possibly repeated, possibly zero terms.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::LengthMismatch {
                    expected: nvars,
                    got: m.nvars(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The constant value, if the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                (m.total_degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::total_degree)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0.get(var).is_some_and(|&e| e > 0))
    }

    fn check_chart(&self, other: &Poly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::ChartMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_chart(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_chart(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_chart(other)?;
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, point: &[Rat]) -> Result<Rat> {
        if point.len() != self.nvars {
            return Err(Error::LengthMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut sum = Rat::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    v *= num_traits::pow(x.clone(), e as usize);
                }
            }
            sum += v;
        }
        Ok(sum)
    }

    /// Formal partial derivative with respect to `x_var`.
    pub fn partial(&self, var: usize) -> Result<Poly> {
        if var >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: var,
                len: self.nvars,
            });
        }
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), c * Rat::from_integer(BigInt::from(e)));
        }
        Ok(out)
    }

    /// Reinterprets the polynomial on a chart of `nvars` variables, placing
    /// variable `i` at position `offset + i`.
    pub fn embed(&self, nvars: usize, offset: usize) -> Result<Poly> {
        if offset + self.nvars > nvars {
            return Err(Error::LengthMismatch {
                expected: nvars,
                got: offset + self.nvars,
            });
        }
        let mut out = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0; nvars];
            exps[offset..offset + self.nvars].copy_from_slice(&m.0);
            out.terms.insert(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Substitutes `x_i ↦ images[i]`; the result lives on the images' chart.
    pub fn compose(&self, images: &[Poly]) -> Result<Poly> {
        if images.len() != self.nvars {
            return Err(Error::LengthMismatch {
                expected: self.nvars,
                got: images.len(),
            });
        }
        let target = images.first().map_or(0, Poly::nvars);
        if let Some(bad) = images.iter().find(|p| p.nvars != target) {
            return Err(Error::ChartMismatch {
                left: target,
                right: bad.nvars,
            });
        }
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(target), p.clone()]).collect();
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                let e = e as usize;
                while powers[i].len() <= e {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                if e > 0 {
                    term = &term * &powers[i][e];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Exact quotient `self / divisor`; fails if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Result<Poly> {
        self.check_chart(divisor)?;
        let (lm, lc) = divisor
            .leading_term()
            .ok_or_else(|| Error::Singular("division by zero polynomial".into()))?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading_term() {
            let m = rm
                .div(lm)
                .ok_or_else(|| Error::Precondition("polynomial division is not exact".into()))?;
            let c = rc / lc;
            let step = Poly::monomial(c, m.0);
            rem = &rem - &(&step * divisor);
            quot = &quot + &step;
        }
        Ok(quot)
    }

    /// Splits `p(ξ)` into real and imaginary parts under `ξ_j ↦ x_j + i·y_j`.
    /// Both parts live on a doubled chart of `2m` variables ordered
    /// `x_0..x_{m-1}, y_0..y_{m-1}`.
    pub fn complex_split(&self) -> (Poly, Poly) {
        let m = self.nvars;
        let n2 = 2 * m;
        let mut re = Poly::zero(n2);
        let mut im = Poly::zero(n2);
        for (mono, c) in &self.terms {
            // (a + ib) accumulated one factor x_j + i y_j at a time
            let mut a = Poly::constant(n2, c.clone());
            let mut b = Poly::zero(n2);
            for (j, &e) in mono.0.iter().enumerate() {
                let x = Poly::var(n2, j);
                let y = Poly::var(n2, m + j);
                for _ in 0..e {
                    let na = &(&a * &x) - &(&b * &y);
                    let nb = &(&a * &y) + &(&b * &x);
                    a = na;
                    b = nb;
                }
            }
            re = &re + &a;
            im = &im + &b;
        }
        (re, im)
    }

    pub fn to_wire(&self) -> Vec<TermWire> {
        self.terms
            .iter()
            .rev()
            .map(|(m, c)| TermWire {
                num: c.numer().to_string(),
                den: c.denom().to_string(),
                exps: m.0.clone(),
            })
            .collect()
    }

    pub fn from_wire(nvars: usize, terms: &[TermWire]) -> Result<Poly> {
        let mut p = Poly::zero(nvars);
        for t in terms {
            if t.exps.len() != nvars {
                return Err(Error::LengthMismatch {
                    expected: nvars,
                    got: t.exps.len(),
                });
            }
            let num: BigInt = t
                .num
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator {:?}", t.num)))?;
            let den: BigInt = t
                .den
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator {:?}", t.den)))?;
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            p.add_term(Monomial(t.exps.clone()), Rat::new(num, den));
        }
        Ok(p)
    }

    /// Parses expressions like `"3/2*x0^2*x1 - (x2 + 1)^2"`. Variables are
    /// looked up in `names`; integer literals followed by `/` and another
    /// integer literal are read as one rational constant.
    pub fn parse(text: &str, names: &[String]) -> Result<Poly> {
        let mut parser = PolyParser {
            src: text.as_bytes(),
            pos: 0,
            names,
        };
        let p = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(Error::Parse(format!(
                "unexpected trailing input at byte {} in {text:?}",
                parser.pos
            )));
        }
        Ok(p)
    }

    /// Human-readable form using the given variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

/// One polynomial term on the wire; integers as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermWire {
    pub num: String,
    pub den: String,
    pub exps: Vec<u32>,
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("chart mismatch in polynomial addition")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).expect("chart mismatch in polynomial subtraction")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("chart mismatch in polynomial multiplication")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            if !abs.is_one() || m.total_degree() == 0 {
                factors.push(rat_to_string(&abs));
            }
            for (j, &e) in m.0.iter().enumerate() {
                let name = self.names.get(j).cloned().unwrap_or_else(|| format!("x{j}"));
                match e {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with(&[]).fmt(f)
    }
}

struct PolyParser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [String],
}

impl PolyParser<'_> {
    fn nvars(&self) -> usize {
        self.names.len()
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at byte {}", self.pos))
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err("integer overflow"))
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.digits().ok_or_else(|| self.err("bad number"))?;
                let save = self.pos;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    if let Some(den) = self.digits() {
                        if den.is_zero() {
                            return Err(self.err("zero denominator"));
                        }
                        return Ok(Poly::constant(self.nvars(), Rat::new(num, den)));
                    }
                    self.pos = save;
                }
                Ok(Poly::constant(self.nvars(), Rat::from_integer(num)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                let idx = self
                    .names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
                Ok(Poly::var(self.nvars(), idx))
            }
            _ => Err(self.err("expected number, variable or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    fn p(text: &str, n: usize) -> Poly {
        Poly::parse(text, &names(n)).unwrap()
    }

    #[test]
    fn addition_cancels_and_zero_is_identity() {
        let a = p("x0 + x1", 2);
        let b = p("-x1", 2);
        assert_eq!(&a + &b, p("x0", 2));
        assert_eq!(&a + &Poly::zero(2), a);
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let a = p("x0", 2);
        let b = p("x0", 3);
        assert!(matches!(a.try_add(&b), Err(Error::ChartMismatch { .. })));
        assert!(matches!(a.try_mul(&b), Err(Error::ChartMismatch { .. })));
    }

    #[test]
    fn difference_of_squares() {
        let a = p("x0 + x1", 2);
        let b = p("x0 - x1", 2);
        assert_eq!(&a * &b, p("x0^2 - x1^2", 2));
        assert_eq!(&a * &Poly::one(2), a);
        assert_eq!((&a * &b).total_degree(), Some(2));
    }

    #[test]
    fn evaluation() {
        let q = p("x0^2 + 1/2*x1", 2);
        assert_eq!(q.eval(&[int(2), int(4)]).unwrap(), int(6));
        assert_eq!(Poly::zero(2).eval(&[int(3), int(5)]).unwrap(), int(0));
        assert_eq!(Poly::constant(2, rat(7, 3)).eval(&[int(3), int(5)]).unwrap(), rat(7, 3));
        assert!(matches!(q.eval(&[int(1)]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn partial_derivatives() {
        assert_eq!(p("x0^2*x1", 2).partial(0).unwrap(), p("2*x0*x1", 2));
        assert!(p("5", 2).partial(1).unwrap().is_zero());
        assert!(matches!(p("x0", 2).partial(2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn complex_split_examples() {
        let (re, im) = p("x0^2", 1).complex_split();
        let doubled = vec!["x".to_string(), "y".to_string()];
        assert_eq!(re, Poly::parse("x^2 - y^2", &doubled).unwrap());
        assert_eq!(im, Poly::parse("2*x*y", &doubled).unwrap());
        let (re, im) = p("x0", 1).complex_split();
        assert_eq!(re, Poly::var(2, 0));
        assert_eq!(im, Poly::var(2, 1));
    }

    #[test]
    fn grlex_order_and_wire_format() {
        let q = p("x1^2 + x0 + 3*x0*x1 + 1", 2);
        let wire = q.to_wire();
        let exps: Vec<_> = wire.iter().map(|t| t.exps.clone()).collect();
        assert_eq!(exps, vec![vec![1, 1], vec![0, 2], vec![1, 0], vec![0, 0]]);
        assert_eq!(wire[0].num, "3");
        assert_eq!(Poly::from_wire(2, &wire).unwrap(), q);
    }

    #[test]
    fn exact_division() {
        let a = p("x0 + x1", 2);
        let b = p("x0^2 - 3*x1 + 2", 2);
        assert_eq!((&a * &b).div_exact(&a).unwrap(), b);
        assert!(p("x0 + 1", 2).div_exact(&p("x1", 2)).is_err());
    }

    #[test]
    fn composition() {
        let q = p("x0*x1 + x1^2", 2);
        let images = [p("x0 + x1", 2), p("2*x1", 2)];
        assert_eq!(q.compose(&images).unwrap(), p("2*x0*x1 + 6*x1^2", 2));
    }

    #[test]
    fn parser_rejects_garbage() {
        assert!(Poly::parse("x0 + ", &names(1)).is_err());
        assert!(Poly::parse("y", &names(1)).is_err());
        assert!(Poly::parse("1/0", &names(1)).is_err());
        assert_eq!(p("(x0 - 1)^2", 1), p("x0^2 - 2*x0 + 1", 1));
        assert_eq!(p("3/4 * x0", 1), Poly::var(1, 0).scale(&rat(3, 4)));
    }

    #[test]
    fn rationals_round_trip_through_text() {
        assert_eq!(parse_rat(" -6/4 ").unwrap(), rat(-3, 2));
        assert_eq!(rat_to_string(&rat(-3, 2)), "-3/2");
        assert_eq!(rat_to_string(&int(5)), "5");
        assert!(parse_rat("1/0").is_err());
    }
}
