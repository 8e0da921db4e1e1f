//! Bihomogeneous pencils `P(s,t) = Σ_j s^(n−j) t^j ω_j` of differential forms
//! parametrized by the projective line, with the induced GL₂ action.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exterior::DForm;
use crate::polyring::{parse_rat, rat_to_string, Poly, Rat};

/// A point `[s:t]` of ℝP¹ with rational coordinates. Finite points are
/// stored as `[1:t]`, infinity as `[0:1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    s: Rat,
    t: Rat,
}

impl ProjPoint {
    pub fn new(s: Rat, t: Rat) -> Result<Self> {
        if s.is_zero() && t.is_zero() {
            return Err(Error::Precondition("[0:0] is not a projective point".into()));
        }
        if s.is_zero() {
            return Ok(Self::infinity());
        }
        Ok(ProjPoint {
            t: &t / &s,
            s: Rat::one(),
        })
    }

    pub fn finite(t: Rat) -> Self {
        ProjPoint { s: Rat::one(), t }
    }

    pub fn infinity() -> Self {
        ProjPoint {
            s: Rat::zero(),
            t: Rat::one(),
        }
    }

    pub fn s(&self) -> &Rat {
        &self.s
    }

    pub fn t(&self) -> &Rat {
        &self.t
    }

    pub fn is_infinite(&self) -> bool {
        self.s.is_zero()
    }

    /// Affine coordinate for finite points.
    pub fn affine(&self) -> Option<&Rat> {
        (!self.is_infinite()).then_some(&self.t)
    }
}

impl Ord for ProjPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => self.t.cmp(&other.t),
        }
    }
}

impl PartialOrd for ProjPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", rat_to_string(&self.t))
        }
    }
}

impl FromStr for ProjPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" | "infinity" => Ok(ProjPoint::infinity()),
            other => Ok(ProjPoint::finite(parse_rat(other)?)),
        }
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a comma-separated point list such as `"0,1,inf,-1/2"`.
pub fn parse_points(text: &str) -> Result<Vec<ProjPoint>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Fails if two points of the list coincide projectively.
pub fn ensure_distinct(points: &[ProjPoint]) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        if points[..i].contains(p) {
            return Err(Error::Precondition(format!("duplicate point {p}")));
        }
    }
    Ok(())
}

/// Invertible 2×2 rational matrix acting on `(s, t)` by
/// `(s, t) ↦ (a·s + b·t, c·s + d·t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Moebius {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d: Rat,
}

impl Moebius {
    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat) -> Result<Self> {
        let g = Moebius { a, b, c, d };
        if g.det().is_zero() {
            return Err(Error::Singular("Möbius matrix has zero determinant".into()));
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        Moebius {
            a: Rat::one(),
            b: Rat::zero(),
            c: Rat::zero(),
            d: Rat::one(),
        }
    }

    /// `(s, t) ↦ (t, s)`, i.e. `t ↦ 1/t`.
    pub fn swap() -> Self {
        Moebius {
            a: Rat::zero(),
            b: Rat::one(),
            c: Rat::one(),
            d: Rat::zero(),
        }
    }

    /// `(s, t) ↦ (s, t + r·s)`, i.e. `t ↦ t + r`.
    pub fn translate(r: Rat) -> Self {
        Moebius {
            a: Rat::one(),
            b: Rat::zero(),
            c: r,
            d: Rat::one(),
        }
    }

    pub fn det(&self) -> Rat {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn inverse(&self) -> Moebius {
        let det = self.det();
        Moebius {
            a: &self.d / &det,
            b: -&self.b / &det,
            c: -&self.c / &det,
            d: &self.a / &det,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Moebius) -> Moebius {
        Moebius {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
    }

    pub fn apply_raw(&self, s: &Rat, t: &Rat) -> (Rat, Rat) {
        (&self.a * s + &self.b * t, &self.c * s + &self.d * t)
    }

    pub fn apply(&self, q: &ProjPoint) -> ProjPoint {
        let (s, t) = self.apply_raw(q.s(), q.t());
        ProjPoint::new(s, t).expect("invertible map keeps points projective")
    }

    /// Parses `"a,b,c,d"`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<Rat> = text.split(',').map(parse_rat).collect::<Result<_>>()?;
        let [a, b, c, d]: [Rat; 4] = parts
            .try_into()
            .map_err(|_| Error::Parse("a Möbius matrix needs four entries a,b,c,d".into()))?;
        Moebius::new(a, b, c, d)
    }

    pub fn entries(&self) -> [String; 4] {
        [&self.a, &self.b, &self.c, &self.d].map(rat_to_string)
    }
}

/// Coefficients of `(α·s + β·t)^e` in the basis `s^(e−l) t^l`, indexed by `l`.
fn linear_power(alpha: &Rat, beta: &Rat, e: usize) -> Vec<Rat> {
    let mut coeffs = vec![Rat::one()];
    for _ in 0..e {
        let mut next = vec![Rat::zero(); coeffs.len() + 1];
        for (l, c) in coeffs.iter().enumerate() {
            next[l] += c * alpha;
            next[l + 1] += c * beta;
        }
        coeffs = next;
    }
    coeffs
}

fn convolve(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `Σ_j s^(n−j) t^j ω_j` with all `ω_j` on one chart and of one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormPencil {
    dim: usize,
    form_degree: usize,
    coeffs: Vec<DForm>,
}

impl FormPencil {
    pub fn new(coeffs: Vec<DForm>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::Precondition("a pencil needs at least one coefficient".into()))?;
        let (dim, form_degree) = (first.dim(), first.degree());
        for c in &coeffs {
            if c.dim() != dim {
                return Err(Error::ChartMismatch {
                    left: dim,
                    right: c.dim(),
                });
            }
            if c.degree() != form_degree {
                return Err(Error::DegreeMismatch(format!(
                    "pencil mixes {form_degree}-forms and {}-forms",
                    c.degree()
                )));
            }
        }
        Ok(FormPencil {
            dim,
            form_degree,
            coeffs,
        })
    }

    pub fn zero(dim: usize, form_degree: usize, param_degree: usize) -> Self {
        FormPencil {
            dim,
            form_degree,
            coeffs: vec![DForm::zero(dim, form_degree); param_degree + 1],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn form_degree(&self) -> usize {
        self.form_degree
    }

    /// Parameter degree `n`.
    pub fn param_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[DForm] {
        &self.coeffs
    }

    /// `P(s, t)` for the given homogeneous coordinates, not normalized.
    pub fn eval_raw(&self, s: &Rat, t: &Rat) -> DForm {
        let n = self.param_degree();
        let mut acc = DForm::zero(self.dim, self.form_degree);
        for (j, w) in self.coeffs.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let weight = num_traits::pow(s.clone(), n - j) * num_traits::pow(t.clone(), j);
            if weight.is_zero() {
                continue;
            }
            acc = acc.try_add(&w.scale(&weight)).expect("pencil coefficients share a chart");
        }
        acc
    }

    /// Evaluation at the canonical representative of `q`.
    pub fn eval(&self, q: &ProjPoint) -> DForm {
        self.eval_raw(q.s(), q.t())
    }

    pub fn wedge(&self, other: &FormPencil) -> Result<FormPencil> {
        if self.dim != other.dim {
            return Err(Error::ChartMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let degree = self.form_degree + other.form_degree;
        let mut coeffs = vec![DForm::zero(self.dim, degree); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].try_add(&a.wedge(b)?)?;
            }
        }
        Ok(FormPencil {
            dim: self.dim,
            form_degree: degree,
            coeffs,
        })
    }

    /// Coefficientwise exterior derivative.
    pub fn d(&self) -> FormPencil {
        FormPencil {
            dim: self.dim,
            form_degree: self.form_degree + 1,
            coeffs: self.coeffs.iter().map(DForm::d).collect(),
        }
    }

    pub fn try_add(&self, other: &FormPencil) -> Result<FormPencil> {
        if self.param_degree() != other.param_degree() {
            return Err(Error::Precondition(format!(
                "cannot add pencils of parameter degree {} and {}",
                self.param_degree(),
                other.param_degree()
            )));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<Vec<_>>>()?;
        FormPencil::new(coeffs)
    }

    pub fn mul_poly(&self, f: &Poly) -> Result<FormPencil> {
        let coeffs = self.coeffs.iter().map(|w| w.mul_poly(f)).collect::<Result<Vec<_>>>()?;
        FormPencil::new(coeffs)
    }

    pub fn map_forms(&self, f: impl Fn(&DForm) -> Result<DForm>) -> Result<FormPencil> {
        FormPencil::new(self.coeffs.iter().map(f).collect::<Result<Vec<_>>>()?)
    }

    /// The pencil `R` with `R(s, t) = P(g·(s, t))` identically.
    pub fn moebius(&self, g: &Moebius) -> Result<FormPencil> {
        if g.det().is_zero() {
            return Err(Error::Singular("Möbius matrix has zero determinant".into()));
        }
        let n = self.param_degree();
        let mut coeffs = vec![DForm::zero(self.dim, self.form_degree); n + 1];
        for (j, w) in self.coeffs.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let weights = convolve(&linear_power(&g.a, &g.b, n - j), &linear_power(&g.c, &g.d, j));
            for (l, c) in weights.iter().enumerate() {
                if !c.is_zero() {
                    coeffs[l] = coeffs[l].try_add(&w.scale(c))?;
                }
            }
        }
        Ok(FormPencil {
            dim: self.dim,
            form_degree: self.form_degree,
            coeffs,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(DForm::is_zero)
    }

    /// Indices of the nonvanishing coefficients.
    pub fn nonzero_coefficients(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&j| !self.coeffs[j].is_zero()).collect()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.iter().map(DForm::num_terms).sum()
    }
}
