//! Differential forms and vector fields with polynomial coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::polyring::{Poly, Rat, TermWire};

/// Named coordinate chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub name: String,
    variables: Vec<String>,
}

impl Chart {
    pub fn new(name: impl Into<String>, variables: Vec<String>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::Precondition("a chart needs at least one variable".into()));
        }
        for (i, v) in variables.iter().enumerate() {
            if variables[..i].contains(v) {
                return Err(Error::Precondition(format!("duplicate variable name {v:?}")));
            }
        }
        Ok(Chart {
            name: name.into(),
            variables,
        })
    }

    /// Chart with variables `x0 .. x{dim-1}`.
    pub fn standard(dim: usize) -> Self {
        Chart {
            name: "U".into(),
            variables: (0..dim).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }
}

/// A differential p-form `Σ_I f_I dx_I` with `I` strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DForm {
    dim: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Poly>,
}

/// Sorts `idx` in place; returns the permutation sign, or `None` on a repeat.
fn sort_with_sign(idx: &mut [usize]) -> Option<bool> {
    let mut negative = false;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            negative = !negative;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(negative)
    }
}

impl DForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        DForm {
            dim,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        let mut f = Self::zero(p.nvars(), 0);
        if !p.is_zero() {
            f.terms.insert(Vec::new(), p);
        }
        f
    }

    /// The coordinate differential `dx_i`.
    pub fn dx(dim: usize, i: usize) -> Self {
        let mut f = Self::zero(dim, 1);
        f.terms.insert(vec![i], Poly::one(dim));
        f
    }

    /// `Σ coeffs[i] dx_i`.
    pub fn one_form(coeffs: Vec<Poly>) -> Result<Self> {
        let dim = coeffs.len();
        let mut f = Self::zero(dim, 1);
        for (i, c) in coeffs.into_iter().enumerate() {
            if c.nvars() != dim {
                return Err(Error::ChartMismatch {
                    left: dim,
                    right: c.nvars(),
                });
            }
            if !c.is_zero() {
                f.terms.insert(vec![i], c);
            }
        }
        Ok(f)
    }

    /// Adds `coeff · dx_{covectors}`; covectors may be unsorted and are
    /// normalized with the permutation sign.
    pub fn add_term(&mut self, covectors: &[usize], coeff: Poly) -> Result<()> {
        if covectors.len() != self.degree {
            return Err(Error::DegreeMismatch(format!(
                "term of degree {} in a {}-form",
                covectors.len(),
                self.degree
            )));
        }
        if coeff.nvars() != self.dim {
            return Err(Error::ChartMismatch {
                left: self.dim,
                right: coeff.nvars(),
            });
        }
        if let Some(&bad) = covectors.iter().find(|&&i| i >= self.dim) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.dim,
            });
        }
        let mut idx = covectors.to_vec();
        let Some(negative) = sort_with_sign(&mut idx) else {
            return Ok(());
        };
        let coeff = if negative { -&coeff } else { coeff };
        self.accumulate(idx, coeff);
        Ok(())
    }

    fn accumulate(&mut self, idx: Vec<usize>, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, covectors: &[usize]) -> Poly {
        self.terms
            .get(covectors)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.dim))
    }

    /// Coefficients of a 1-form as a dense vector.
    pub fn components(&self) -> Result<Vec<Poly>> {
        if self.degree != 1 {
            return Err(Error::DegreeMismatch(format!("expected a 1-form, got degree {}", self.degree)));
        }
        Ok((0..self.dim).map(|i| self.coefficient(&[i])).collect())
    }

    fn check_same(&self, other: &DForm) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::ChartMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &DForm) -> Result<DForm> {
        self.check_same(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!(
                "cannot add a {}-form and a {}-form",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.accumulate(idx.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &DForm) -> Result<DForm> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> DForm {
        self.map_coefficients(|p| -p)
    }

    pub fn scale(&self, c: &Rat) -> DForm {
        if c.is_zero() {
            return DForm::zero(self.dim, self.degree);
        }
        self.map_coefficients(|p| p.scale(c))
    }

    pub fn mul_poly(&self, f: &Poly) -> Result<DForm> {
        if f.nvars() != self.dim {
            return Err(Error::ChartMismatch {
                left: self.dim,
                right: f.nvars(),
            });
        }
        let mut out = DForm::zero(self.dim, self.degree);
        for (idx, c) in &self.terms {
            out.accumulate(idx.clone(), c * f);
        }
        Ok(out)
    }

    /// Applies `f` to every coefficient; the result may change chart size
    /// as long as covector indices remain valid.
    pub fn map_coefficients(&self, f: impl Fn(&Poly) -> Poly) -> DForm {
        let mut dim = self.dim;
        let mut terms = BTreeMap::new();
        for (idx, c) in &self.terms {
            let v = f(c);
            dim = v.nvars();
            if !v.is_zero() {
                terms.insert(idx.clone(), v);
            }
        }
        DForm {
            dim,
            degree: self.degree,
            terms,
        }
    }

    /// Re-targets a form to a chart with `dim` variables. Coefficients are
    /// embedded via `poly_map` and covector `i` becomes `index_map(i)`.
    pub fn transport(
        &self,
        dim: usize,
        poly_map: impl Fn(&Poly) -> Result<Poly>,
        index_map: impl Fn(usize) -> usize,
    ) -> Result<DForm> {
        let mut out = DForm::zero(dim, self.degree);
        for (idx, c) in &self.terms {
            let mapped: Vec<usize> = idx.iter().map(|&i| index_map(i)).collect();
            out.add_term(&mapped, poly_map(c)?)?;
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &DForm) -> Result<DForm> {
        self.check_same(other)?;
        let degree = self.degree + other.degree;
        let mut out = DForm::zero(self.dim, degree);
        if degree > self.dim {
            return Ok(out);
        }
        let mut idx = Vec::with_capacity(degree);
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                idx.clear();
                idx.extend_from_slice(ia);
                idx.extend_from_slice(ib);
                let Some(negative) = sort_with_sign(&mut idx) else {
                    continue;
                };
                let prod = ca * cb;
                out.accumulate(idx.clone(), if negative { -&prod } else { prod });
            }
        }
        Ok(out)
    }

    /// Exterior derivative.
    pub fn d(&self) -> DForm {
        let mut out = DForm::zero(self.dim, self.degree + 1);
        if self.degree >= self.dim {
            return out;
        }
        for (idx, c) in &self.terms {
            for var in 0..self.dim {
                if idx.contains(&var) {
                    continue;
                }
                let dc = c.partial(var).expect("variable index within chart");
                if dc.is_zero() {
                    continue;
                }
                // dx_var ∧ dx_idx: moving dx_var into place passes every smaller index
                let pos = idx.partition_point(|&i| i < var);
                let mut new_idx = idx.clone();
                new_idx.insert(pos, var);
                out.accumulate(new_idx, if pos % 2 == 1 { -&dc } else { dc });
            }
        }
        out
    }

    /// Interior product `ι_v` (insertion into the first slot).
    pub fn contract(&self, v: &VectorField) -> Result<DForm> {
        if self.degree == 0 {
            return Err(Error::DegreeMismatch("cannot contract a 0-form".into()));
        }
        if v.dim() != self.dim {
            return Err(Error::ChartMismatch {
                left: self.dim,
                right: v.dim(),
            });
        }
        let mut out = DForm::zero(self.dim, self.degree - 1);
        for (idx, c) in &self.terms {
            for (slot, &i) in idx.iter().enumerate() {
                let vi = &v.components[i];
                if vi.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(slot);
                let prod = c * vi;
                out.accumulate(rest, if slot % 2 == 1 { -&prod } else { prod });
            }
        }
        Ok(out)
    }

    /// Value of a 0-form, or `None` for positive degree.
    pub fn as_poly(&self) -> Option<Poly> {
        (self.degree == 0).then(|| self.coefficient(&[]))
    }

    pub fn to_wire(&self) -> FormWire {
        FormWire {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(idx, p)| FormTermWire {
                    covectors: idx.clone(),
                    poly: p.to_wire(),
                })
                .collect(),
        }
    }

    pub fn from_wire(dim: usize, wire: &FormWire) -> Result<DForm> {
        let mut f = DForm::zero(dim, wire.degree);
        for t in &wire.terms {
            f.add_term(&t.covectors, Poly::from_wire(dim, &t.poly)?)?;
        }
        Ok(f)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> FormDisplay<'a> {
        FormDisplay { form: self, names }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormWire {
    pub degree: usize,
    pub terms: Vec<FormTermWire>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormTermWire {
    pub covectors: Vec<usize>,
    pub poly: Vec<TermWire>,
}

pub struct FormDisplay<'a> {
    form: &'a DForm,
    names: &'a [String],
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.form.is_zero() {
            return write!(f, "0");
        }
        for (i, (idx, c)) in self.form.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let cov: Vec<String> = idx
                .iter()
                .map(|&j| {
                    let name = self.names.get(j).cloned().unwrap_or_else(|| format!("x{j}"));
                    format!("d{name}")
                })
                .collect();
            if cov.is_empty() {
                write!(f, "{}", c.display_with(self.names))?;
            } else {
                write!(f, "({})*{}", c.display_with(self.names), cov.join("^"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for DForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with(&[]).fmt(f)
    }
}

/// Polynomial vector field `Σ v^i ∂/∂x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    components: Vec<Poly>,
}

impl VectorField {
    pub fn new(components: Vec<Poly>) -> Result<Self> {
        let dim = components.len();
        if let Some(bad) = components.iter().find(|p| p.nvars() != dim) {
            return Err(Error::ChartMismatch {
                left: dim,
                right: bad.nvars(),
            });
        }
        Ok(VectorField { components })
    }

    pub fn zero(dim: usize) -> Self {
        VectorField {
            components: vec![Poly::zero(dim); dim],
        }
    }

    /// The coordinate field `∂/∂x_i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.components[i] = Poly::one(dim);
        v
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    fn check_same(&self, other: &VectorField) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::ChartMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &VectorField) -> Result<VectorField> {
        self.check_same(other)?;
        Ok(VectorField {
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &VectorField) -> Result<VectorField> {
        self.check_same(other)?;
        Ok(VectorField {
            components: self.components.iter().zip(&other.components).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &Rat) -> VectorField {
        VectorField {
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn mul_poly(&self, f: &Poly) -> VectorField {
        VectorField {
            components: self.components.iter().map(|p| p * f).collect(),
        }
    }

    /// Directional derivative `v(f) = Σ v^i ∂f/∂x_i`.
    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        if f.nvars() != self.dim() {
            return Err(Error::ChartMismatch {
                left: self.dim(),
                right: f.nvars(),
            });
        }
        let mut acc = Poly::zero(self.dim());
        for (i, vi) in self.components.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            acc = &acc + &(vi * &f.partial(i)?);
        }
        Ok(acc)
    }

    /// `[v, w]^k = v(w^k) − w(v^k)`.
    pub fn lie_bracket(&self, other: &VectorField) -> Result<VectorField> {
        self.check_same(other)?;
        let components = (0..self.dim())
            .map(|k| Ok(&self.apply(&other.components[k])? - &other.apply(&self.components[k])?))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField { components })
    }

    pub fn eval(&self, point: &[Rat]) -> Result<Vec<Rat>> {
        self.components.iter().map(|p| p.eval(point)).collect()
    }
}

/// Exact rank over ℚ of the coefficient vectors of some 1-forms at a point.
pub fn rank_of_1forms_at_point(forms: &[DForm], point: &[Rat]) -> Result<usize> {
    let rows = forms
        .iter()
        .map(|f| {
            f.components()?
                .iter()
                .map(|p| p.eval(point))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(linalg::rank_q(&rows))
}

/// Rank over ℚ of vector fields evaluated at a point.
pub fn rank_of_fields_at_point(fields: &[VectorField], point: &[Rat]) -> Result<usize> {
    let rows = fields.iter().map(|v| v.eval(point)).collect::<Result<Vec<_>>>()?;
    Ok(linalg::rank_q(&rows))
}

/// Wedge of a list of forms; the empty product is the constant 0-form 1.
pub fn wedge_all(dim: usize, forms: &[DForm]) -> Result<DForm> {
    let mut acc = DForm::from_poly(Poly::one(dim));
    for f in forms {
        acc = acc.wedge(f)?;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::int;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    fn p(text: &str, n: usize) -> Poly {
        Poly::parse(text, &names(n)).unwrap()
    }

    fn dx(n: usize, i: usize) -> DForm {
        DForm::dx(n, i)
    }

    #[test]
    fn wedge_examples() {
        let n = 3;
        let a = dx(n, 0).wedge(&dx(n, 1)).unwrap();
        assert!(a.wedge(&dx(n, 1)).unwrap().is_zero());

        let x1dx0 = dx(n, 0).mul_poly(&p("x1", n)).unwrap();
        let mut expected = DForm::zero(n, 2);
        expected.add_term(&[0, 2], p("x1", n)).unwrap();
        assert_eq!(x1dx0.wedge(&dx(n, 2)).unwrap(), expected);

        let b = dx(n, 1).wedge(&dx(n, 0)).unwrap();
        assert_eq!(b, a.neg());
        assert!(dx(2, 0).wedge(&dx(3, 0)).is_err());
    }

    #[test]
    fn wedge_beyond_top_degree_is_zero() {
        let top = dx(2, 0).wedge(&dx(2, 1)).unwrap();
        let f = top.wedge(&dx(2, 0)).unwrap();
        assert_eq!(f.degree(), 3);
        assert!(f.is_zero());
    }

    #[test]
    fn exterior_derivative_examples() {
        let n = 3;
        let x1dx0 = dx(n, 0).mul_poly(&p("x1", n)).unwrap();
        assert_eq!(x1dx0.d(), dx(n, 0).wedge(&dx(n, 1)).unwrap().neg());
        assert!(dx(n, 0).d().is_zero());

        let f = dx(n, 2).mul_poly(&p("x0*x1", n)).unwrap();
        let mut expected = DForm::zero(n, 2);
        expected.add_term(&[0, 2], p("x1", n)).unwrap();
        expected.add_term(&[1, 2], p("x0", n)).unwrap();
        assert_eq!(f.d(), expected);

        let g = DForm::from_poly(p("x0^2*x2", n)).d();
        assert_eq!(g.components().unwrap(), vec![p("2*x0*x2", n), p("0", n), p("x0^2", n)]);
    }

    #[test]
    fn lie_bracket_examples() {
        let n = 2;
        let d0 = VectorField::coordinate(n, 0);
        let x0d1 = VectorField::new(vec![p("0", n), p("x0", n)]).unwrap();
        assert_eq!(d0.lie_bracket(&x0d1).unwrap(), VectorField::coordinate(n, 1));
        assert!(x0d1.lie_bracket(&x0d1).unwrap().is_zero());
        let x1d0 = VectorField::new(vec![p("x1", n), p("0", n)]).unwrap();
        assert_eq!(
            x0d1.lie_bracket(&x1d0).unwrap(),
            VectorField::new(vec![p("x0", n), p("-x1", n)]).unwrap()
        );
    }

    #[test]
    fn contraction_examples() {
        let n = 2;
        let d0 = VectorField::coordinate(n, 0);
        let d1 = VectorField::coordinate(n, 1);
        assert_eq!(dx(n, 0).contract(&d0).unwrap(), DForm::from_poly(Poly::one(n)));
        let area = dx(n, 0).wedge(&dx(n, 1)).unwrap();
        assert_eq!(area.contract(&d1).unwrap(), dx(n, 0).neg());
        assert!(dx(n, 0).contract(&d1).unwrap().is_zero());
        assert!(DForm::from_poly(Poly::one(n)).contract(&d0).is_err());
    }

    #[test]
    fn pointwise_rank_examples() {
        let n = 3;
        let origin = vec![int(0); n];
        let f1 = [dx(n, 0), dx(n, 0).try_add(&dx(n, 1)).unwrap()];
        assert_eq!(rank_of_1forms_at_point(&f1, &origin).unwrap(), 2);
        let f2 = [dx(n, 0), dx(n, 0).scale(&int(2))];
        assert_eq!(rank_of_1forms_at_point(&f2, &[int(3), int(1), int(-2)]).unwrap(), 1);
        let f3 = [
            dx(n, 0),
            DForm::one_form(vec![p("0", n), p("1 - x2", n), p("0", n)]).unwrap(),
            DForm::one_form(vec![p("0", n), p("x2", n), p("1", n)]).unwrap(),
        ];
        assert_eq!(rank_of_1forms_at_point(&f3, &origin).unwrap(), 3);
        assert_eq!(rank_of_1forms_at_point(&f3, &[int(0), int(0), int(1)]).unwrap(), 2);
        let two_form = [dx(n, 0).wedge(&dx(n, 1)).unwrap()];
        assert!(rank_of_1forms_at_point(&two_form, &origin).is_err());
    }

    #[test]
    fn chart_validation() {
        assert!(Chart::new("U", vec![]).is_err());
        assert!(Chart::new("U", vec!["a".into(), "a".into()]).is_err());
        assert_eq!(Chart::standard(3).dim(), 3);
    }

    #[test]
    fn form_wire_round_trip() {
        let n = 3;
        let f = dx(n, 2).mul_poly(&p("x0*x1 - 1/3", n)).unwrap().wedge(&dx(n, 0)).unwrap();
        let back = DForm::from_wire(n, &f.to_wire()).unwrap();
        assert_eq!(back, f);
    }
}
