//! Binary forms over ℚ: gcds and rational projective roots.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::pencil::ProjPoint;
use crate::polyring::Rat;

/// Trial division is capped here; larger prime factors of a root-candidate
/// bound are reported as an error rather than searched for.
const TRIAL_DIVISION_LIMIT: u64 = 1 << 22;

/// `Σ_j c_j s^(D−j) t^j` with `D = coeffs.len() − 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryForm {
    coeffs: Vec<Rat>,
}

/// Rational roots of a binary form with multiplicities, plus the degree of
/// the part without rational roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSplit {
    pub roots: Vec<(ProjPoint, usize)>,
    pub residual_degree: usize,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "a binary form needs a degree");
        BinaryForm { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, q: &ProjPoint) -> Rat {
        let d = self.degree();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * num_traits::pow(q.s().clone(), d - j) * num_traits::pow(q.t().clone(), j))
            .sum()
    }

    /// Multiplicity of the factor `s`, i.e. of the root at infinity.
    fn s_order(&self) -> usize {
        self.coeffs.iter().rev().take_while(|c| c.is_zero()).count()
    }

    /// Dehomogenization `f(1, t)` with trailing zeros removed.
    fn affine(&self) -> Vec<Rat> {
        let mut v = self.coeffs.clone();
        trim(&mut v);
        v
    }

    /// Greatest common divisor of nonzero binary forms, normalized so the
    /// affine part is monic. Returns `None` when every input is zero.
    pub fn gcd_all<'a>(forms: impl IntoIterator<Item = &'a BinaryForm>) -> Option<BinaryForm> {
        let mut s_order: Option<usize> = None;
        let mut g: Option<Vec<Rat>> = None;
        for f in forms {
            if f.is_zero() {
                continue;
            }
            s_order = Some(s_order.map_or(f.s_order(), |o| o.min(f.s_order())));
            let a = f.affine();
            g = Some(match g {
                None => monic(a),
                Some(prev) => uni_gcd(prev, a),
            });
        }
        let (s_order, g) = (s_order?, g?);
        let mut coeffs = g;
        coeffs.extend(std::iter::repeat_n(Rat::zero(), s_order));
        Some(BinaryForm { coeffs })
    }

    /// Splits off all rational roots, including `∞` when `s` divides the form.
    pub fn rational_roots(&self) -> Result<RootSplit> {
        if self.is_zero() {
            return Err(Error::Precondition("the zero form vanishes everywhere".into()));
        }
        let mut roots = Vec::new();
        let inf = self.s_order();
        if inf > 0 {
            roots.push((ProjPoint::infinity(), inf));
        }
        let mut f = self.affine();
        let zero_mult = f.iter().take_while(|c| c.is_zero()).count();
        if zero_mult > 0 {
            roots.push((ProjPoint::finite(Rat::zero()), zero_mult));
            f.drain(..zero_mult);
        }
        let ints = clear_denominators(&f);
        if ints.len() > 1 {
            let lead = ints.last().expect("nonempty").abs().to_biguint().expect("nonnegative");
            let constant = ints[0].abs().to_biguint().expect("nonnegative");
            let ps = divisors(&constant)?;
            let qs = divisors(&lead)?;
            let mut candidates: Vec<Rat> = Vec::new();
            for p in &ps {
                for q in &qs {
                    let r = Rat::new(BigInt::from(p.clone()), BigInt::from(q.clone()));
                    if !candidates.contains(&r) {
                        candidates.push(r.clone());
                        candidates.push(-r);
                    }
                }
            }
            candidates.sort();
            for r in candidates {
                let mut mult = 0;
                while f.len() > 1 && uni_eval(&f, &r).is_zero() {
                    f = divide_linear(&f, &r);
                    mult += 1;
                }
                if mult > 0 {
                    roots.push((ProjPoint::finite(r), mult));
                }
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(RootSplit {
            roots,
            residual_degree: f.len() - 1,
        })
    }
}

fn trim(v: &mut Vec<Rat>) {
    while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn monic(mut v: Vec<Rat>) -> Vec<Rat> {
    trim(&mut v);
    if let Some(lead) = v.last().cloned() {
        if !lead.is_zero() {
            for c in &mut v {
                *c = &*c / &lead;
            }
        }
    }
    v
}

fn uni_eval(f: &[Rat], x: &Rat) -> Rat {
    f.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}

/// Remainder of `a` modulo a nonzero `b`.
fn uni_rem(mut a: Vec<Rat>, b: &[Rat]) -> Vec<Rat> {
    let db = b.len() - 1;
    if db == 0 {
        return vec![Rat::zero()];
    }
    let lead = b[db].clone();
    trim(&mut a);
    while a.len() > db && !is_zero_poly(&a) {
        let shift = a.len() - 1 - db;
        let factor = a.last().expect("nonempty") / &lead;
        for (i, c) in b.iter().enumerate() {
            a[shift + i] -= c * &factor;
        }
        a.pop();
        trim(&mut a);
    }
    a
}

fn is_zero_poly(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn uni_gcd(a: Vec<Rat>, b: Vec<Rat>) -> Vec<Rat> {
    let (mut a, mut b) = (monic(a), monic(b));
    while !is_zero_poly(&b) {
        let r = uni_rem(a, &b);
        a = b;
        b = monic(r);
    }
    monic(a)
}

/// Synthetic division of `f` by `(t − r)` where `r` is a root.
fn divide_linear(f: &[Rat], r: &Rat) -> Vec<Rat> {
    let d = f.len() - 1;
    let mut q = vec![Rat::zero(); d];
    let mut carry = Rat::zero();
    for i in (1..=d).rev() {
        carry = &f[i] + carry * r;
        q[i - 1] = carry.clone();
    }
    q
}

fn clear_denominators(f: &[Rat]) -> Vec<BigInt> {
    let lcm = f
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    f.iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect()
}

fn divisors(n: &BigUint) -> Result<Vec<BigUint>> {
    if n.is_zero() {
        return Err(Error::Precondition("divisors of zero".into()));
    }
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    let mut rest = n.clone();
    let mut p: u64 = 2;
    while BigUint::from(p) * BigUint::from(p) <= rest {
        if p > TRIAL_DIVISION_LIMIT {
            return Err(Error::Precondition(format!(
                "coefficient {n} too large for rational root search"
            )));
        }
        let bp = BigUint::from(p);
        let mut e = 0;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            factors.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigUint::one() {
        factors.push((rest, 1));
    }
    let mut divs = vec![BigUint::one()];
    for (prime, e) in factors {
        let current = divs.clone();
        let mut power = BigUint::one();
        for _ in 0..e {
            power *= &prime;
            divs.extend(current.iter().map(|d| d * &power));
        }
    }
    divs.sort();
    Ok(divs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{int, rat};

    fn form(cs: &[i64]) -> BinaryForm {
        BinaryForm::new(cs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn roots_of_s2_t_minus_s_times_t() {
        // s²·t·(t − s) = s²t² − s³t
        let f = form(&[0, -1, 1, 0, 0]);
        let split = f.rational_roots().unwrap();
        let pts: Vec<String> = split.roots.iter().map(|(p, _)| p.to_string()).collect();
        assert_eq!(pts, vec!["0", "1", "inf"]);
        assert_eq!(split.roots[2].1, 2);
        assert_eq!(split.residual_degree, 0);
    }

    #[test]
    fn irreducible_quadratic_is_residual() {
        // s²(t² + s²)
        let f = form(&[1, 0, 1, 0, 0]);
        let split = f.rational_roots().unwrap();
        assert_eq!(split.roots, vec![(ProjPoint::infinity(), 2)]);
        assert_eq!(split.residual_degree, 2);
    }

    #[test]
    fn fractional_roots() {
        // (2t − 3)(3t + 1) = 6t² − 7t − 3
        let f = form(&[-3, -7, 6]);
        let split = f.rational_roots().unwrap();
        assert_eq!(
            split.roots,
            vec![(ProjPoint::finite(rat(-1, 3)), 1), (ProjPoint::finite(rat(3, 2)), 1)]
        );
    }

    #[test]
    fn gcd_of_forms() {
        // t(t − s)s and (t − s)(t + s)s² in degree 4
        let a = form(&[0, -1, 1, 0, 0]);
        let b = form(&[-1, 0, 1, 0, 0]);
        let g = BinaryForm::gcd_all([&a, &b]).unwrap();
        // s²(t − 1) affine part, s-order 2
        assert_eq!(g.coeffs(), &[int(-1), int(1), int(0), int(0)]);
        assert!(BinaryForm::gcd_all([&form(&[0, 0])]).is_none());
    }

    #[test]
    fn evaluation_at_projective_points() {
        let f = form(&[0, -1, 1, 0, 0]);
        assert!(f.eval(&ProjPoint::infinity()).is_zero());
        assert!(f.eval(&ProjPoint::finite(int(1))).is_zero());
        assert_eq!(f.eval(&ProjPoint::finite(int(2))), int(2));
    }
}
