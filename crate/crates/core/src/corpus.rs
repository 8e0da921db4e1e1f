//! Generators of curves with known ground truth.
//!
//! Every generator returns a curve carrying a [`GroundTruth`] manifest. The
//! families are flat webs, their rescalings, pullbacks by triangular shears
//! and Möbius reparametrizations, and perturbations `γ^i += p(s,t)·β` that
//! stay integrable only where the binary form `p` vanishes.

use std::fs;
use std::path::Path;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::binform::BinaryForm;
use crate::error::{Error, Result};
use crate::exterior::{Chart, DForm};
use crate::linalg;
use crate::pencil::{ensure_distinct, FormPencil, Moebius, ProjPoint};
use crate::polyring::{int, Poly, Rat};
use crate::webs::{self, FirstIntegrals, GroundTruth, Locus, VeroneseCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Flat,
    Rescaled,
    Pullback,
    Moebius,
    Perturbed,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Flat => "flat",
            Family::Rescaled => "rescaled",
            Family::Pullback => "pullback",
            Family::Moebius => "moebius",
            Family::Perturbed => "perturbed",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "flat" => Family::Flat,
            "rescaled" => Family::Rescaled,
            "pullback" => Family::Pullback,
            "moebius" => Family::Moebius,
            "perturbed" => Family::Perturbed,
            other => return Err(Error::Parse(format!("unknown family {other:?}"))),
        })
    }
}

/// A reproducible recipe for one curve. Unset family parameters are drawn
/// from `seed`; polynomials are written in the variables `x0, x1, …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    /// Curve the transformation is applied to; a flat curve when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<GeneratorSpec>>,
    /// Rescaling matrix, `k` rows of `k` polynomials.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
    /// Shear images of `x0 … x_{m−1}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<String>>,
    /// Möbius matrix `"a,b,c,d"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<ProjPoint>>,
    /// Components of the perturbing 1-form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<String>>,
    /// 1-based index of the perturbed pencil.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pencil: Option<usize>,
}

impl GeneratorSpec {
    pub fn new(family: Family, k: usize, n: usize, seed: u64) -> Self {
        GeneratorSpec {
            family,
            k,
            n,
            seed,
            base: None,
            matrix: None,
            map: None,
            g: None,
            points: None,
            beta: None,
            pencil: None,
        }
    }

    pub fn on(mut self, base: GeneratorSpec) -> Self {
        self.base = Some(Box::new(base));
        self
    }

    /// Short label such as `moebius(perturbed)`.
    pub fn label(&self) -> String {
        match &self.base {
            Some(b) if b.family != Family::Flat => format!("{}({})", self.family.name(), b.label()),
            _ => self.family.name().to_string(),
        }
    }
}

fn chart_names(m: usize) -> Vec<String> {
    Chart::standard(m).variables().to_vec()
}

fn parse_polys(texts: &[String], names: &[String]) -> Result<Vec<Poly>> {
    texts.iter().map(|t| Poly::parse(t, names)).collect()
}

/// Runs a spec to completion.
pub fn generate(spec: &GeneratorSpec) -> Result<VeroneseCurve> {
    if spec.k == 0 || spec.n == 0 {
        return Err(Error::Generation("k and n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let base = || -> Result<VeroneseCurve> {
        match &spec.base {
            Some(b) => {
                if (b.k, b.n) != (spec.k, spec.n) {
                    return Err(Error::Generation("base spec has different k, n".into()));
                }
                generate(b)
            }
            None => gen_flat(spec.k, spec.n),
        }
    };
    let m = spec.k * (spec.n + 1);
    let names = chart_names(m);
    let mut curve = match spec.family {
        Family::Flat => {
            if spec.base.is_some() {
                return Err(Error::Generation("flat curves take no base".into()));
            }
            gen_flat(spec.k, spec.n)?
        }
        Family::Rescaled => {
            let c = base()?;
            let matrix = match &spec.matrix {
                Some(rows) => rows.iter().map(|r| parse_polys(r, &names)).collect::<Result<Vec<_>>>()?,
                None => random_matrix(&mut rng, spec.k, m),
            };
            gen_rescaled(&c, &matrix)?
        }
        Family::Pullback => {
            let c = base()?;
            let map = match &spec.map {
                Some(images) => parse_polys(images, &names)?,
                None => random_shear(&mut rng, m),
            };
            gen_pullback(&c, &map)?
        }
        Family::Moebius => {
            let c = base()?;
            let g = match &spec.g {
                Some(text) => Moebius::parse(text)?,
                None => random_moebius(&mut rng),
            };
            gen_moebius(&c, &g)?
        }
        Family::Perturbed => {
            let c = base()?;
            let points = match &spec.points {
                Some(p) => p.clone(),
                None => random_points(&mut rng, spec.n),
            };
            let beta = match &spec.beta {
                Some(b) => DForm::one_form(parse_polys(b, &names)?)?,
                None => random_beta(&mut rng, m),
            };
            let pencil = spec.pencil.unwrap_or_else(|| rng.gen_range(1..=spec.k));
            gen_perturbed(&c, &points, &beta, pencil)?
        }
    };
    if let Some(gt) = curve.manifest.as_mut() {
        gt.generator = spec.label();
        gt.seed = spec.seed;
    }
    Ok(curve)
}

/// `γ^i(t) = Σ_j t^j dx_{i(n+1)+j}` with first integrals
/// `ψ^i(a) = Σ_j a^j x_{i(n+1)+j}` at the anchors `0, 1, …, n+1`.
pub fn gen_flat(k: usize, n: usize) -> Result<VeroneseCurve> {
    if k == 0 || n == 0 {
        return Err(Error::Generation("k and n must be at least 1".into()));
    }
    let m = k * (n + 1);
    let pencils = (0..k)
        .map(|i| FormPencil::new((0..=n).map(|j| DForm::dx(m, i * (n + 1) + j)).collect()))
        .collect::<Result<Vec<_>>>()?;
    let first_integrals = (0..=n + 1)
        .map(|a| {
            let a = int(a as i64);
            FirstIntegrals {
                anchor: ProjPoint::finite(a.clone()),
                integrals: (0..k)
                    .map(|i| {
                        Poly::from_terms(
                            m,
                            (0..=n).map(|j| {
                                (
                                    crate::polyring::Monomial::var(m, i * (n + 1) + j),
                                    num_traits::pow(a.clone(), j),
                                )
                            }),
                        )
                        .expect("monomials on m variables")
                    })
                    .collect(),
            }
        })
        .collect();
    let curve = VeroneseCurve::new(k, n, Chart::standard(m), pencils, vec![Rat::zero(); m])?;
    Ok(curve.with_manifest(GroundTruth {
        expected_locus: Locus::All,
        generator: "flat".into(),
        seed: 0,
        adapted_chart: true,
        adapted_map: None,
        first_integrals,
        notes: Vec::new(),
    }))
}

fn manifest_of(c: &VeroneseCurve) -> GroundTruth {
    c.manifest.clone().unwrap_or_else(|| GroundTruth {
        expected_locus: webs::integrability_locus(c).unwrap_or(Locus::All),
        generator: "input".into(),
        seed: 0,
        adapted_chart: false,
        adapted_map: None,
        first_integrals: Vec::new(),
        notes: Vec::new(),
    })
}

fn require_coframe(c: &VeroneseCurve) -> Result<()> {
    if !webs::validate_coframe(c, c.basepoint())? {
        return Err(Error::Generation(
            "coefficient forms are not a coframe at the basepoint".into(),
        ));
    }
    Ok(())
}

/// `γ^i ↦ Σ_l C_il γ^l` for a matrix `C` invertible at the basepoint.
pub fn gen_rescaled(c: &VeroneseCurve, matrix: &[Vec<Poly>]) -> Result<VeroneseCurve> {
    let k = c.k();
    if matrix.len() != k || matrix.iter().any(|r| r.len() != k) {
        return Err(Error::Generation(format!("rescaling matrix must be {k}×{k}")));
    }
    if matrix.iter().flatten().any(|p| p.nvars() != c.m()) {
        return Err(Error::ChartMismatch {
            left: c.m(),
            right: matrix.iter().flatten().map(Poly::nvars).find(|&v| v != c.m()).unwrap_or(0),
        });
    }
    let det = linalg::det_poly(matrix)?;
    if det.eval(c.basepoint())?.is_zero() {
        return Err(Error::Singular("rescaling matrix is singular at the basepoint".into()));
    }
    let pencils = matrix
        .iter()
        .map(|row| {
            let mut acc = FormPencil::zero(c.m(), 1, c.n());
            for (entry, p) in row.iter().zip(c.pencils()) {
                if !entry.is_zero() {
                    acc = acc.try_add(&p.mul_poly(entry)?)?;
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut gt = manifest_of(c);
    gt.generator = "rescaled".into();
    let out = VeroneseCurve::new(k, c.n(), c.chart().clone(), pencils, c.basepoint().to_vec())?.with_manifest(gt);
    require_coframe(&out)?;
    Ok(out)
}

/// Checks `φ_i = x_i + q_i(x_{i+1}, …)` and returns the inverse shear.
pub fn invert_shear(map: &[Poly]) -> Result<Vec<Poly>> {
    let m = map.len();
    for (i, phi) in map.iter().enumerate() {
        if phi.nvars() != m {
            return Err(Error::ChartMismatch {
                left: m,
                right: phi.nvars(),
            });
        }
        let q = phi - &Poly::var(m, i);
        if let Some(j) = (0..=i).find(|&j| q.depends_on(j)) {
            return Err(Error::Generation(format!(
                "map is not a triangular shear: image of x{i} minus x{i} depends on x{j}"
            )));
        }
    }
    let mut inv: Vec<Poly> = (0..m).map(|i| Poly::var(m, i)).collect();
    for i in (0..m).rev() {
        let q = &map[i] - &Poly::var(m, i);
        inv[i] = &Poly::var(m, i) - &q.compose(&inv)?;
    }
    Ok(inv)
}

/// Pullback `φ*γ` of each pencil by a triangular shear `φ`.
pub fn gen_pullback(c: &VeroneseCurve, map: &[Poly]) -> Result<VeroneseCurve> {
    let m = c.m();
    if map.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            got: map.len(),
        });
    }
    let inverse = invert_shear(map)?;
    let differentials: Vec<DForm> = map.iter().map(|p| DForm::from_poly(p.clone()).d()).collect();
    let pull = |f: &DForm| -> Result<DForm> {
        let mut out = DForm::zero(m, 1);
        for (idx, coeff) in f.terms() {
            out = out.try_add(&differentials[idx[0]].mul_poly(&coeff.compose(map)?)?)?;
        }
        Ok(out)
    };
    let pencils = c
        .pencils()
        .iter()
        .map(|p| p.map_forms(pull))
        .collect::<Result<Vec<_>>>()?;
    let basepoint = inverse
        .iter()
        .map(|p| p.eval(c.basepoint()))
        .collect::<Result<Vec<_>>>()?;
    let mut gt = manifest_of(c);
    gt.generator = "pullback".into();
    gt.adapted_map = Some(match &gt.adapted_map {
        Some(a) => inverse.iter().map(|p| p.compose(a)).collect::<Result<Vec<_>>>()?,
        None => inverse.clone(),
    });
    gt.adapted_chart = false;
    for fi in &mut gt.first_integrals {
        for psi in &mut fi.integrals {
            *psi = psi.compose(map)?;
        }
    }
    let out = VeroneseCurve::new(c.k(), c.n(), c.chart().clone(), pencils, basepoint)?.with_manifest(gt);
    require_coframe(&out)?;
    Ok(out)
}

/// Pulls a curve carrying an `adapted_map` back into its adapted chart.
pub fn to_adapted_chart(c: &VeroneseCurve) -> Result<VeroneseCurve> {
    let gt = manifest_of(c);
    match &gt.adapted_map {
        None => Ok(c.clone()),
        Some(map) => {
            let mut out = gen_pullback(c, map)?;
            if let Some(m) = out.manifest.as_mut() {
                m.adapted_map = None;
                m.adapted_chart = true;
                m.generator = format!("adapted({})", gt.generator);
            }
            Ok(out)
        }
    }
}

/// Reparametrizes every pencil, `R(s,t) = P(g·(s,t))`.
pub fn gen_moebius(c: &VeroneseCurve, g: &Moebius) -> Result<VeroneseCurve> {
    let pencils = c.pencils().iter().map(|p| p.moebius(g)).collect::<Result<Vec<_>>>()?;
    let inv = g.inverse();
    let mut gt = manifest_of(c);
    gt.generator = "moebius".into();
    gt.expected_locus = match gt.expected_locus {
        Locus::All => Locus::All,
        Locus::Finite {
            points,
            residual_degree,
        } => {
            let mut points: Vec<ProjPoint> = points.iter().map(|p| inv.apply(p)).collect();
            points.sort();
            Locus::Finite {
                points,
                residual_degree,
            }
        }
    };
    for fi in &mut gt.first_integrals {
        fi.anchor = inv.apply(&fi.anchor);
    }
    let out = VeroneseCurve::new(c.k(), c.n(), c.chart().clone(), pencils, c.basepoint().to_vec())?.with_manifest(gt);
    require_coframe(&out)?;
    Ok(out)
}

/// `p(s,t) = s^{n−|points|} · Π_j (s_j t − t_j s)`.
pub fn vanishing_form(n: usize, points: &[ProjPoint]) -> Result<BinaryForm> {
    if points.len() > n {
        return Err(Error::Precondition(format!(
            "at most n = {n} vanishing points keep the parameter degree, got {}",
            points.len()
        )));
    }
    ensure_distinct(points)?;
    // coefficient j multiplies s^{deg−j} t^j
    let mut coeffs = vec![Rat::one()];
    for q in points {
        let mut next = vec![Rat::zero(); coeffs.len() + 1];
        for (j, c) in coeffs.iter().enumerate() {
            next[j] -= c * q.t();
            next[j + 1] += c * q.s();
        }
        coeffs = next;
    }
    // multiplying by a power of s keeps the low-order t coefficients in place
    coeffs.resize(n + 1, Rat::zero());
    Ok(BinaryForm::new(coeffs))
}

/// `γ^i += p(s,t)·β` with `p` vanishing exactly at `points`.
pub fn gen_perturbed(c: &VeroneseCurve, points: &[ProjPoint], beta: &DForm, pencil: usize) -> Result<VeroneseCurve> {
    let p = vanishing_form(c.n(), points)?;
    let mut out = perturb_with(c, &p, beta, pencil)?;
    if let Some(gt) = out.manifest.as_mut() {
        gt.generator = "perturbed".into();
        let missing: Vec<String> = points
            .iter()
            .filter(|q| !gt.expected_locus.contains(q))
            .map(ToString::to_string)
            .collect();
        if !missing.is_empty() && manifest_of(c).expected_locus.is_all() {
            return Err(Error::Generation(format!(
                "perturbation lost integrability at forced points {}",
                missing.join(", ")
            )));
        }
    }
    Ok(out)
}

/// `γ^i += p(s,t)·β` for an arbitrary binary form `p` of degree `n`.
pub fn perturb_with(c: &VeroneseCurve, p: &BinaryForm, beta: &DForm, pencil: usize) -> Result<VeroneseCurve> {
    if p.degree() != c.n() {
        return Err(Error::DegreeMismatch(format!(
            "perturbation form has degree {}, curve has n = {}",
            p.degree(),
            c.n()
        )));
    }
    if beta.degree() != 1 || beta.dim() != c.m() {
        return Err(Error::Generation("β must be a 1-form on the curve's chart".into()));
    }
    if pencil == 0 || pencil > c.k() {
        return Err(Error::IndexOutOfRange {
            index: pencil,
            len: c.k(),
        });
    }
    let mut pencils = c.pencils().to_vec();
    let bump = FormPencil::new(p.coeffs().iter().map(|a| beta.scale(a)).collect())?;
    pencils[pencil - 1] = pencils[pencil - 1].try_add(&bump)?;
    let base_gt = manifest_of(c);
    let mut out = VeroneseCurve::new(c.k(), c.n(), c.chart().clone(), pencils, c.basepoint().to_vec())?;
    require_coframe(&out)?;
    let locus = webs::integrability_locus(&out)?;
    let mut notes = base_gt.notes.clone();
    if locus.is_all() {
        notes.push("perturbation absorbed: curve is integrable everywhere".into());
    }
    out = out.with_manifest(GroundTruth {
        expected_locus: locus,
        generator: "perturbed".into(),
        seed: base_gt.seed,
        adapted_chart: false,
        adapted_map: None,
        first_integrals: Vec::new(),
        notes,
    });
    Ok(out)
}

/// Fails if a finite manifest locus has `n+3` or more points.
pub fn assert_theorem2(c: &VeroneseCurve) -> Result<()> {
    if let Some(gt) = &c.manifest {
        if let Locus::Finite { points, .. } = &gt.expected_locus {
            if points.len() >= c.n() + 3 {
                return Err(Error::Generation(format!(
                    "curve {} is integrable at {} points but not everywhere (n = {})",
                    gt.generator,
                    points.len(),
                    c.n()
                )));
            }
        }
    }
    Ok(())
}

const POINT_POOL: [(i64, i64); 8] = [(0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (3, 1), (0, 0)];

fn pool_point((num, den): (i64, i64)) -> ProjPoint {
    if den == 0 {
        ProjPoint::infinity()
    } else {
        ProjPoint::finite(crate::polyring::rat(num, den))
    }
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<ProjPoint> {
    let s = rng.gen_range(1..=n);
    let mut pool = POINT_POOL.to_vec();
    pool.shuffle(rng);
    let mut pts: Vec<ProjPoint> = pool.into_iter().take(s).map(pool_point).collect();
    pts.sort();
    pts
}

fn nonzero(rng: &mut ChaCha8Rng, bound: i64) -> Rat {
    loop {
        let c = rng.gen_range(-bound..=bound);
        if c != 0 {
            return int(c);
        }
    }
}

/// `c·x_a` or `c·x_a·x_b` with `a, b` drawn from `vars`.
fn random_monomial(rng: &mut ChaCha8Rng, m: usize, vars: &[usize]) -> Poly {
    let mut exps = vec![0u32; m];
    exps[*vars.choose(rng).expect("nonempty")] += 1;
    if rng.gen_bool(0.3) {
        exps[*vars.choose(rng).expect("nonempty")] += 1;
    }
    Poly::monomial(nonzero(rng, 2), exps)
}

fn random_matrix(rng: &mut ChaCha8Rng, k: usize, m: usize) -> Vec<Vec<Poly>> {
    let vars: Vec<usize> = (0..m).collect();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let linear = Poly::monomial(nonzero(rng, 2), {
                        let mut e = vec![0; m];
                        e[*vars.choose(rng).expect("nonempty")] = 1;
                        e
                    });
                    if i == j {
                        &Poly::one(m) + &linear
                    } else if rng.gen_bool(0.5) {
                        linear
                    } else {
                        Poly::zero(m)
                    }
                })
                .collect()
        })
        .collect()
}

fn random_shear(rng: &mut ChaCha8Rng, m: usize) -> Vec<Poly> {
    (0..m)
        .map(|i| {
            let x = Poly::var(m, i);
            let later: Vec<usize> = (i + 1..m).collect();
            if later.is_empty() || rng.gen_bool(0.4) {
                x
            } else {
                &x + &random_monomial(rng, m, &later)
            }
        })
        .collect()
}

fn random_moebius(rng: &mut ChaCha8Rng) -> Moebius {
    loop {
        let mut e = || int(rng.gen_range(-3..=3));
        if let Ok(g) = Moebius::new(e(), e(), e(), e()) {
            return g;
        }
    }
}

/// A non-closed `β = c·x_a dx_b` with `a ≠ b`, vanishing at the origin.
fn random_beta(rng: &mut ChaCha8Rng, m: usize) -> DForm {
    let a = rng.gen_range(0..m);
    let b = loop {
        let b = rng.gen_range(0..m);
        if b != a {
            break b;
        }
    };
    let mut comps = vec![Poly::zero(m); m];
    comps[b] = Poly::monomial(nonzero(rng, 2), {
        let mut e = vec![0; m];
        e[a] = 1;
        e
    });
    DForm::one_form(comps).expect("m components")
}

/// Specs for the standard corpus: 17 curves for each `k ∈ {1,2}`,
/// `n ∈ {1,2,3}`, covering every family.
pub fn corpus_specs(seed: u64) -> Vec<GeneratorSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut specs = Vec::new();
    for k in 1..=2 {
        for n in 1..=3 {
            let mut s = || rng.gen::<u64>();
            let flat = GeneratorSpec::new(Family::Flat, k, n, 0);
            specs.push(flat.clone());
            for _ in 0..3 {
                specs.push(GeneratorSpec::new(Family::Rescaled, k, n, s()));
            }
            for _ in 0..3 {
                specs.push(GeneratorSpec::new(Family::Pullback, k, n, s()));
            }
            specs.push(GeneratorSpec::new(Family::Rescaled, k, n, s()).on(GeneratorSpec::new(Family::Pullback, k, n, s())));
            specs.push(GeneratorSpec::new(Family::Moebius, k, n, s()));
            specs.push(GeneratorSpec::new(Family::Moebius, k, n, s()).on(GeneratorSpec::new(Family::Rescaled, k, n, s())));
            for _ in 0..2 {
                specs.push(GeneratorSpec::new(Family::Moebius, k, n, s()).on(GeneratorSpec::new(Family::Perturbed, k, n, s())));
            }
            for _ in 0..5 {
                specs.push(GeneratorSpec::new(Family::Perturbed, k, n, s()));
            }
        }
    }
    specs
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: String,
    pub spec: GeneratorSpec,
    pub curve: VeroneseCurve,
}

/// Generates every spec (in parallel) and checks the manifest invariants.
pub fn build_corpus(specs: &[GeneratorSpec]) -> Result<Vec<CorpusEntry>> {
    specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let curve = generate(spec)?;
            assert_theorem2(&curve)?;
            Ok(CorpusEntry {
                id: format!("{i:03}-{}-k{}-n{}", spec.label().replace(['(', ')'], "_").trim_end_matches('_'), spec.k, spec.n),
                spec: spec.clone(),
                curve,
            })
        })
        .collect()
}

pub fn standard_corpus(seed: u64) -> Result<Vec<CorpusEntry>> {
    build_corpus(&corpus_specs(seed))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub id: String,
    pub spec: GeneratorSpec,
    pub curve: String,
    pub manifest: String,
    pub curve_sha256: String,
    pub manifest_sha256: String,
}

/// Curve JSON without its manifest, and the manifest JSON.
pub fn render(curve: &VeroneseCurve) -> (String, String) {
    let mut bare = curve.clone();
    let gt = bare.manifest.take();
    let manifest = gt
        .map(|g| serde_json::to_string_pretty(&g.to_wire()).expect("manifest serializes"))
        .unwrap_or_else(|| "null".into());
    (bare.to_json() + "\n", manifest + "\n")
}

/// Writes `<id>.curve.json`, `<id>.manifest.json` and `index.json`.
pub fn write_corpus(dir: &Path, entries: &[CorpusEntry]) -> Result<Vec<IndexEntry>> {
    fs::create_dir_all(dir).map_err(|e| Error::Generation(format!("{}: {e}", dir.display())))?;
    let mut index = Vec::with_capacity(entries.len());
    for e in entries {
        index.push(write_instance(dir, &e.id, &e.spec, &e.curve)?);
    }
    let text = serde_json::to_string_pretty(&index)? + "\n";
    write_file(&dir.join("index.json"), &text)?;
    Ok(index)
}

/// Writes one curve and its manifest, returning the index record.
pub fn write_instance(dir: &Path, id: &str, spec: &GeneratorSpec, curve: &VeroneseCurve) -> Result<IndexEntry> {
    let (curve_json, manifest_json) = render(curve);
    let curve_file = format!("{id}.curve.json");
    let manifest_file = format!("{id}.manifest.json");
    write_file(&dir.join(&curve_file), &curve_json)?;
    write_file(&dir.join(&manifest_file), &manifest_json)?;
    Ok(IndexEntry {
        id: id.to_string(),
        spec: spec.clone(),
        curve: curve_file,
        manifest: manifest_file,
        curve_sha256: hex::encode(Sha256::digest(curve_json.as_bytes())),
        manifest_sha256: hex::encode(Sha256::digest(manifest_json.as_bytes())),
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Generation(format!("{}: {e}", path.display())))
}

/// The perturbed example `γ(t) = dx0 + (t + (t²−t)x2)dx1 + t²dx2`.
pub fn worked_perturbed() -> Result<VeroneseCurve> {
    let flat = gen_flat(1, 2)?;
    let beta = DForm::dx(3, 1).mul_poly(&Poly::var(3, 2))?;
    gen_perturbed(&flat, &[ProjPoint::finite(int(0)), ProjPoint::finite(int(1))], &beta, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::parse_points;
    use crate::polyring::rat;

    fn names(m: usize) -> Vec<String> {
        chart_names(m)
    }

    fn p(text: &str, m: usize) -> Poly {
        Poly::parse(text, &names(m)).unwrap()
    }

    fn full_ok(c: &VeroneseCurve) -> bool {
        webs::check_full(c).unwrap().verdict.is_integrable()
    }

    #[test]
    fn flat_examples() {
        let c = gen_flat(1, 1).unwrap();
        assert_eq!(c.m(), 2);
        assert_eq!(c.pencils()[0].coeffs(), &[DForm::dx(2, 0), DForm::dx(2, 1)]);
        let c = gen_flat(1, 2).unwrap();
        assert_eq!(c.pencils()[0].coeffs()[2], DForm::dx(3, 2));
        let c = gen_flat(2, 1).unwrap();
        assert_eq!(c.pencils()[1].coeffs(), &[DForm::dx(4, 2), DForm::dx(4, 3)]);
        assert!(full_ok(&c));
        let gt = c.manifest.as_ref().unwrap();
        assert!(gt.expected_locus.is_all());
        assert_eq!(gt.first_integrals.len(), 3);
        assert_eq!(gt.first_integrals[2].integrals[1], p("x2 + 2*x3", 4));
    }

    #[test]
    fn first_integrals_annihilate_their_distribution() {
        for spec in corpus_specs(3).iter().filter(|s| s.family != Family::Perturbed && s.base.as_ref().is_none_or(|b| b.family != Family::Perturbed)) {
            let c = generate(spec).unwrap();
            for fi in &c.manifest.as_ref().unwrap().first_integrals {
                let mut forms = c.annihilators_at(&fi.anchor);
                let r = crate::exterior::rank_of_1forms_at_point(&forms, c.basepoint()).unwrap();
                forms.extend(fi.integrals.iter().map(|psi| DForm::from_poly(psi.clone()).d()));
                let r2 = crate::exterior::rank_of_1forms_at_point(&forms, c.basepoint()).unwrap();
                assert_eq!(r, r2, "{}", spec.label());
            }
        }
    }

    #[test]
    fn rescaled_examples() {
        let flat = gen_flat(1, 2).unwrap();
        assert_eq!(gen_rescaled(&flat, &[vec![Poly::one(3)]]).unwrap().pencils(), flat.pencils());
        let r = gen_rescaled(&flat, &[vec![p("1 + x0", 3)]]).unwrap();
        assert!(full_ok(&r));
        let flat2 = gen_flat(2, 1).unwrap();
        let r = gen_rescaled(&flat2, &[vec![p("1", 4), p("x0", 4)], vec![p("0", 4), p("1", 4)]]).unwrap();
        assert!(full_ok(&r));
        assert!(gen_rescaled(&flat, &[vec![p("x0", 3)]]).is_err());
    }

    #[test]
    fn pullback_examples() {
        let flat = gen_flat(1, 2).unwrap();
        let id: Vec<Poly> = (0..3).map(|i| Poly::var(3, i)).collect();
        assert_eq!(gen_pullback(&flat, &id).unwrap().pencils(), flat.pencils());

        let shear = vec![p("x0 + x1*x2", 3), p("x1", 3), p("x2", 3)];
        let c = gen_pullback(&flat, &shear).unwrap();
        let expected = DForm::one_form(vec![p("1", 3), p("x2", 3), p("x1", 3)]).unwrap();
        assert_eq!(c.pencils()[0].coeffs()[0], expected);
        assert!(full_ok(&c));
        let gt = c.manifest.as_ref().unwrap();
        assert!(!gt.adapted_chart);
        assert_eq!(gt.adapted_map.as_ref().unwrap()[0], p("x0 - x1*x2", 3));
        assert_eq!(to_adapted_chart(&c).unwrap().pencils(), flat.pencils());

        let other = vec![p("x0", 3), p("x1 + x2^2", 3), p("x2", 3)];
        let twice = gen_pullback(&c, &other).unwrap();
        let composed: Vec<Poly> = shear.iter().map(|s| s.compose(&other).unwrap()).collect();
        let once = gen_pullback(&flat, &composed).unwrap();
        assert_eq!(twice.pencils(), once.pencils());
        assert_eq!(to_adapted_chart(&twice).unwrap().pencils(), flat.pencils());

        let bad = vec![p("x0", 3), p("x1 + x0", 3), p("x2", 3)];
        assert!(gen_pullback(&flat, &bad).is_err());
    }

    #[test]
    fn moebius_examples() {
        let c = worked_perturbed().unwrap();
        assert_eq!(gen_moebius(&c, &Moebius::identity()).unwrap().pencils(), c.pencils());
        let shifted = gen_moebius(&c, &Moebius::translate(int(1))).unwrap();
        let expected = Locus::Finite {
            points: parse_points("-1,0,inf").unwrap(),
            residual_degree: 0,
        };
        assert_eq!(shifted.manifest.as_ref().unwrap().expected_locus, expected);
        assert_eq!(webs::integrability_locus(&shifted).unwrap(), expected);
        let swapped = gen_moebius(&c, &Moebius::swap()).unwrap();
        assert_eq!(
            webs::integrability_locus(&swapped).unwrap(),
            swapped.manifest.as_ref().unwrap().expected_locus
        );
        assert_eq!(swapped.manifest.as_ref().unwrap().expected_locus.points(), parse_points("0,1,inf").unwrap());
    }

    #[test]
    fn perturbed_examples() {
        let c = worked_perturbed().unwrap();
        let expected = DForm::one_form(vec![p("0", 3), &p("1", 3) - &p("x2", 3), p("0", 3)]).unwrap();
        assert_eq!(c.pencils()[0].coeffs()[1], expected);
        assert_eq!(c.pencils()[0].coeffs()[2], DForm::one_form(vec![p("0", 3), p("x2", 3), p("1", 3)]).unwrap());
        let locus = &c.manifest.as_ref().unwrap().expected_locus;
        assert_eq!(locus.points(), parse_points("0,1,inf").unwrap());

        let flat = gen_flat(1, 2).unwrap();
        let closed = gen_perturbed(&flat, &parse_points("0,1").unwrap(), &DForm::dx(3, 0), 1).unwrap();
        let gt = closed.manifest.as_ref().unwrap();
        assert!(gt.expected_locus.is_all());
        assert!(!gt.notes.is_empty());

        assert!(gen_perturbed(&flat, &parse_points("0,1,2").unwrap(), &DForm::dx(3, 1), 1).is_err());
        let breaking = DForm::dx(3, 2).scale(&int(-1));
        let p_t2 = vanishing_form(2, &parse_points("0").unwrap()).unwrap();
        assert_eq!(p_t2.coeffs(), &[int(0), int(1), int(0)]);
        // γ = dx0 + t dx1 + t² dx2 − t dx2: coefficients dx0, dx1 − dx2, dx2 stay a coframe
        assert!(perturb_with(&flat, &p_t2, &breaking, 1).is_ok());
        let collapse = DForm::dx(3, 1).scale(&int(-1));
        let p_t = BinaryForm::new(vec![int(0), int(1), int(0)]);
        assert!(perturb_with(&flat, &p_t, &collapse, 1).is_err());
    }

    #[test]
    fn vanishing_form_roots() {
        let f = vanishing_form(3, &parse_points("2,inf").unwrap()).unwrap();
        assert!(f.eval(&ProjPoint::finite(int(2))).is_zero());
        assert!(f.eval(&ProjPoint::infinity()).is_zero());
        assert!(!f.eval(&ProjPoint::finite(rat(1, 2))).is_zero());
        assert_eq!(f.degree(), 3);
    }

    #[test]
    fn generation_is_deterministic() {
        let specs = corpus_specs(11);
        assert!(specs.len() >= 100);
        for spec in specs.iter().step_by(7) {
            assert_eq!(generate(spec).unwrap().to_json(), generate(spec).unwrap().to_json());
        }
        let json = serde_json::to_string(&specs[20]).unwrap();
        let back: GeneratorSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, specs[20]);
    }

    #[test]
    fn write_and_read_back() {
        let dir = std::env::temp_dir().join(format!("veronese-corpus-{}", std::process::id()));
        let specs: Vec<GeneratorSpec> = corpus_specs(5).into_iter().take(4).collect();
        let entries = build_corpus(&specs).unwrap();
        let index = write_corpus(&dir, &entries).unwrap();
        for (e, rec) in entries.iter().zip(&index) {
            let text = std::fs::read_to_string(dir.join(&rec.curve)).unwrap();
            let back = VeroneseCurve::from_json(&text).unwrap();
            assert_eq!(back.pencils(), e.curve.pencils());
            assert_eq!(hex::encode(Sha256::digest(text.as_bytes())), rec.curve_sha256);
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
