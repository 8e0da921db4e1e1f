//! Generalized Veronese curves of distributions and their integrability checks.
//!
//! A curve of codimension `k` and parameter degree `n` lives on a chart of
//! dimension `m = k(n+1)` and is given by `k` pencils of 1-forms
//! `γ^i(s,t) = Σ_j s^(n−j) t^j γ^i_j`. The distribution `w(t)` is the common
//! kernel of the `γ^i(t)`.
//!
//! Integrability of `w(t)` is tested through the wedge criterion
//! `dγ^i(t) ∧ γ^1(t) ∧ … ∧ γ^k(t) = 0` for every `i`, which is equivalent to
//! the Frobenius condition as long as the `γ^i(t)` are pointwise independent.
//! Each left-hand side is itself a pencil of `(k+2)`-forms of parameter
//! degree `n(k+1)`, so "integrable for all t" is exact vanishing of finitely
//! many coefficient forms.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binform::BinaryForm;
use crate::error::{Error, Result};
use crate::exterior::{self, Chart, DForm, FormWire};
use crate::linalg;
use crate::pencil::{ensure_distinct, FormPencil, ProjPoint};
use crate::polyring::{int, parse_rat, rat_to_string, Monomial, Poly, Rat, TermWire};

/// Where a curve is integrable: everywhere, or at finitely many parameter
/// values. `residual_degree` counts roots that are not rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Locus {
    All,
    Finite {
        points: Vec<ProjPoint>,
        residual_degree: usize,
    },
}

impl Locus {
    pub fn is_all(&self) -> bool {
        matches!(self, Locus::All)
    }

    pub fn points(&self) -> &[ProjPoint] {
        match self {
            Locus::All => &[],
            Locus::Finite { points, .. } => points,
        }
    }

    pub fn contains(&self, q: &ProjPoint) -> bool {
        match self {
            Locus::All => true,
            Locus::Finite { points, .. } => points.contains(q),
        }
    }
}

/// First integrals `ψ^1 … ψ^k` of the foliation `W(anchor)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstIntegrals {
    pub anchor: ProjPoint,
    pub integrals: Vec<Poly>,
}

/// Known facts about a generated curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub expected_locus: Locus,
    pub generator: String,
    pub seed: u64,
    /// True when the curve is given in a chart where the complexification
    /// construction is expected to succeed.
    pub adapted_chart: bool,
    /// Shear map whose pullback carries the curve into an adapted chart.
    pub adapted_map: Option<Vec<Poly>>,
    pub first_integrals: Vec<FirstIntegrals>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VeroneseCurve {
    k: usize,
    n: usize,
    chart: Chart,
    pencils: Vec<FormPencil>,
    basepoint: Vec<Rat>,
    pub manifest: Option<GroundTruth>,
}

impl VeroneseCurve {
    /// Structural validation only; the coframe condition is checked by
    /// [`validate_coframe`] and by every integrability check.
    pub fn new(k: usize, n: usize, chart: Chart, pencils: Vec<FormPencil>, basepoint: Vec<Rat>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidCurve("codimension must be at least 1".into()));
        }
        let m = k * (n + 1);
        if chart.dim() != m {
            return Err(Error::InvalidCurve(format!(
                "chart has {} variables, expected k(n+1) = {m}",
                chart.dim()
            )));
        }
        if pencils.len() != k {
            return Err(Error::InvalidCurve(format!("expected {k} pencils, got {}", pencils.len())));
        }
        for (i, p) in pencils.iter().enumerate() {
            if p.dim() != m || p.form_degree() != 1 || p.param_degree() != n {
                return Err(Error::InvalidCurve(format!(
                    "pencil {i} must be a degree-{n} pencil of 1-forms on {m} variables"
                )));
            }
        }
        if basepoint.len() != m {
            return Err(Error::InvalidCurve(format!(
                "basepoint has {} coordinates, expected {m}",
                basepoint.len()
            )));
        }
        Ok(VeroneseCurve {
            k,
            n,
            chart,
            pencils,
            basepoint,
            manifest: None,
        })
    }

    pub fn with_manifest(mut self, manifest: GroundTruth) -> Self {
        self.manifest = Some(manifest);
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.k * (self.n + 1)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn pencils(&self) -> &[FormPencil] {
        &self.pencils
    }

    pub fn basepoint(&self) -> &[Rat] {
        &self.basepoint
    }

    /// Degree `n(k+1)` of the integrability pencils.
    pub fn integrability_degree(&self) -> usize {
        self.n * (self.k + 1)
    }

    /// All `m` coefficient forms `γ^i_j`, pencil by pencil.
    pub fn coefficient_forms(&self) -> Vec<DForm> {
        self.pencils.iter().flat_map(|p| p.coeffs().iter().cloned()).collect()
    }

    /// The annihilating forms `γ^1(q) … γ^k(q)` of `w(q)`.
    pub fn annihilators_at(&self, q: &ProjPoint) -> Vec<DForm> {
        self.pencils.iter().map(|p| p.eval(q)).collect()
    }

    pub fn to_wire(&self) -> CurveWire {
        CurveWire {
            k: self.k,
            n: self.n,
            variables: self.chart.variables().to_vec(),
            pencils: self
                .pencils
                .iter()
                .map(|p| p.coeffs().iter().map(DForm::to_wire).collect())
                .collect(),
            basepoint: self.basepoint.iter().map(rat_to_string).collect(),
            manifest: self.manifest.as_ref().map(GroundTruth::to_wire),
        }
    }

    pub fn from_wire(wire: &CurveWire) -> Result<Self> {
        let chart = Chart::new("U", wire.variables.clone())?;
        let m = chart.dim();
        let pencils = wire
            .pencils
            .iter()
            .map(|forms| {
                let coeffs = forms.iter().map(|f| DForm::from_wire(m, f)).collect::<Result<Vec<_>>>()?;
                FormPencil::new(coeffs)
            })
            .collect::<Result<Vec<_>>>()?;
        let basepoint = wire.basepoint.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>()?;
        let mut curve = VeroneseCurve::new(wire.k, wire.n, chart, pencils, basepoint)?;
        if let Some(mw) = &wire.manifest {
            curve.manifest = Some(GroundTruth::from_wire(m, mw)?);
        }
        Ok(curve)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("curve wire types serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: CurveWire = serde_json::from_str(text)?;
        Self::from_wire(&wire)
    }
}

/// True iff the `m` coefficient forms have full rank `m` at `point`.
pub fn validate_coframe(c: &VeroneseCurve, point: &[Rat]) -> Result<bool> {
    Ok(exterior::rank_of_1forms_at_point(&c.coefficient_forms(), point)? == c.m())
}

/// `dγ^i ∧ γ^1 ∧ … ∧ γ^k` as a pencil of `(k+2)`-forms; `i` is 1-based.
pub fn integrability_pencil(c: &VeroneseCurve, i: usize) -> Result<FormPencil> {
    if i == 0 || i > c.k {
        return Err(Error::IndexOutOfRange { index: i, len: c.k });
    }
    let mut acc = c.pencils[i - 1].d();
    for p in &c.pencils {
        acc = acc.wedge(p)?;
    }
    Ok(acc)
}

fn ensure_coframe(c: &VeroneseCurve) -> Result<()> {
    if !validate_coframe(c, &c.basepoint)? {
        return Err(Error::InvalidCurve(
            "coefficient forms are not a coframe at the basepoint".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    IntegrableEverywhere,
    IntegrableAtListedPointsOnly,
    NotIntegrableAtQueriedPoints,
    ProbablyIntegrable,
}

impl Verdict {
    /// Whether the verdict counts as a pass for exit-code purposes.
    pub fn is_integrable(self) -> bool {
        matches!(self, Verdict::IntegrableEverywhere | Verdict::ProbablyIntegrable)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Full,
    Sparse,
    Naive,
    Randomized,
    Listed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCheck {
    pub point: ProjPoint,
    pub integrable: bool,
}

/// Evidence of non-integrability. Which fields are set depends on the mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// 1-based index `i` of the integrability pencil.
    pub pencil: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coefficient: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub point: Option<ProjPoint>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub covectors: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sample: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<String>,
    pub form: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub pencil_degree: usize,
    pub pencil_terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchwartzZippel {
    pub samples: usize,
    pub grid_size: u64,
    pub total_degree: u32,
    /// Upper bound on the chance that a nonzero pencil passes every sample.
    pub failure_bound: String,
}

/// Run-dependent data kept apart so the rest of a report is reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Volatile {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub mode: Mode,
    pub verdict: Verdict,
    pub k: usize,
    pub n: usize,
    pub checked: Vec<PointCheck>,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inference: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub schwartz_zippel: Option<SchwartzZippel>,
    pub notes: Vec<String>,
    pub stats: Stats,
    pub volatile: Volatile,
}

/// A validated curve together with its integrability pencils, for running
/// many checks against one curve.
pub struct Analysis<'a> {
    curve: &'a VeroneseCurve,
    pencils: Vec<FormPencil>,
}

impl<'a> Analysis<'a> {
    pub fn new(curve: &'a VeroneseCurve) -> Result<Self> {
        ensure_coframe(curve)?;
        let pencils = (1..=curve.k)
            .map(|i| integrability_pencil(curve, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Analysis { curve, pencils })
    }

    pub fn curve(&self) -> &VeroneseCurve {
        self.curve
    }

    pub fn pencils(&self) -> &[FormPencil] {
        &self.pencils
    }

    pub fn check_at(&self, q: &ProjPoint) -> bool {
        self.pencils.iter().all(|p| p.eval(q).is_zero())
    }

    fn point_witnesses(&self, q: &ProjPoint) -> Vec<Witness> {
        let names = self.curve.chart.variables();
        self.pencils
            .iter()
            .enumerate()
            .filter_map(|(i, p)| {
                let f = p.eval(q);
                (!f.is_zero()).then(|| Witness {
                    pencil: i + 1,
                    coefficient: None,
                    point: Some(q.clone()),
                    covectors: None,
                    sample: None,
                    value: None,
                    form: f.display_with(names).to_string(),
                })
            })
            .collect()
    }

    fn stats(&self) -> Stats {
        Stats {
            pencil_degree: self.curve.integrability_degree(),
            pencil_terms: self.pencils.iter().map(FormPencil::num_terms).sum(),
        }
    }

    fn notes(&self) -> Vec<String> {
        coframe_boundary_note(self.curve).into_iter().collect()
    }

    fn report(&self, mode: Mode, verdict: Verdict, checked: Vec<PointCheck>, witnesses: Vec<Witness>, start: Instant) -> IntegrabilityReport {
        IntegrabilityReport {
            mode,
            verdict,
            k: self.curve.k,
            n: self.curve.n,
            checked,
            witnesses,
            inference: None,
            schwartz_zippel: None,
            notes: self.notes(),
            stats: self.stats(),
            volatile: Volatile {
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            },
        }
    }

    pub fn check_full(&self) -> IntegrabilityReport {
        let start = Instant::now();
        let names = self.curve.chart.variables();
        let mut witnesses = Vec::new();
        for (i, p) in self.pencils.iter().enumerate() {
            if let Some(&j) = p.nonzero_coefficients().first() {
                witnesses.push(Witness {
                    pencil: i + 1,
                    coefficient: Some(j),
                    point: None,
                    covectors: None,
                    sample: None,
                    value: None,
                    form: p.coeffs()[j].display_with(names).to_string(),
                });
            }
        }
        let verdict = if witnesses.is_empty() {
            Verdict::IntegrableEverywhere
        } else {
            Verdict::NotIntegrableAtQueriedPoints
        };
        self.report(Mode::Full, verdict, Vec::new(), witnesses, start)
    }

    fn check_points(&self, points: &[ProjPoint], mode: Mode, all_pass: Verdict) -> IntegrabilityReport {
        let start = Instant::now();
        let mut checked = Vec::with_capacity(points.len());
        let mut witnesses = Vec::new();
        for q in points {
            let ok = self.check_at(q);
            if !ok {
                witnesses.extend(self.point_witnesses(q));
            }
            checked.push(PointCheck {
                point: q.clone(),
                integrable: ok,
            });
        }
        let verdict = if witnesses.is_empty() {
            all_pass
        } else {
            Verdict::NotIntegrableAtQueriedPoints
        };
        self.report(mode, verdict, checked, witnesses, start)
    }

    /// Checks the listed points and draws no conclusion beyond them.
    pub fn check_listed(&self, points: &[ProjPoint]) -> Result<IntegrabilityReport> {
        ensure_distinct(points)?;
        Ok(self.check_points(points, Mode::Listed, Verdict::IntegrableAtListedPointsOnly))
    }

    /// Integrability at `n + 3` distinct points implies integrability for
    /// every parameter value.
    pub fn check_sparse(&self, points: &[ProjPoint]) -> Result<IntegrabilityReport> {
        ensure_distinct(points)?;
        let need = self.curve.n + 3;
        if points.len() < need {
            return Err(Error::Precondition(format!(
                "sparse check needs at least n+3 = {need} distinct points, got {}",
                points.len()
            )));
        }
        let mut report = self.check_points(points, Mode::Sparse, Verdict::IntegrableEverywhere);
        if report.verdict == Verdict::IntegrableEverywhere {
            report.inference = Some(format!(
                "integrable at {} >= n+3 distinct points; by the n+3-point criterion the curve is integrable for every parameter value",
                points.len()
            ));
        }
        Ok(report)
    }

    /// Degree-bound check: the integrability pencils have degree `n(k+1)`,
    /// so vanishing at `n(k+1)+1` distinct points forces them to vanish.
    pub fn check_naive(&self, points: &[ProjPoint]) -> Result<IntegrabilityReport> {
        ensure_distinct(points)?;
        let need = self.curve.integrability_degree() + 1;
        if points.len() < need {
            return Err(Error::Precondition(format!(
                "naive check needs at least n(k+1)+1 = {need} distinct points, got {}",
                points.len()
            )));
        }
        let mut report = self.check_points(points, Mode::Naive, Verdict::IntegrableEverywhere);
        if report.verdict == Verdict::IntegrableEverywhere {
            report.inference = Some(format!(
                "integrability pencils of degree {} vanish at {} distinct points, hence identically",
                need - 1,
                points.len()
            ));
        }
        Ok(report)
    }

    /// Every polynomial coefficient of every integrability pencil viewed as
    /// a binary form in `(s, t)`.
    pub fn coefficient_binary_forms(&self) -> Vec<BinaryForm> {
        let degree = self.curve.integrability_degree();
        let mut table: BTreeMap<(usize, Vec<usize>, Monomial), Vec<Rat>> = BTreeMap::new();
        for (i, p) in self.pencils.iter().enumerate() {
            for (j, form) in p.coeffs().iter().enumerate() {
                for (idx, poly) in form.terms() {
                    for (mono, c) in poly.terms() {
                        let entry = table
                            .entry((i, idx.clone(), mono.clone()))
                            .or_insert_with(|| vec![Rat::zero(); degree + 1]);
                        entry[j] = c.clone();
                    }
                }
            }
        }
        table.into_values().map(BinaryForm::new).collect()
    }

    pub fn integrability_locus(&self) -> Result<Locus> {
        let forms = self.coefficient_binary_forms();
        let Some(g) = BinaryForm::gcd_all(&forms) else {
            return Ok(Locus::All);
        };
        let split = g.rational_roots()?;
        Ok(Locus::Finite {
            points: split.roots.into_iter().map(|(p, _)| p).collect(),
            residual_degree: split.residual_degree,
        })
    }

    /// Probabilistic identity test of the coefficient polynomials.
    pub fn randomized_check(&self, samples: usize, seed: u64) -> Result<IntegrabilityReport> {
        if samples == 0 {
            return Err(Error::Precondition("randomized check needs at least one sample".into()));
        }
        let start = Instant::now();
        let m = self.curve.m();
        let mut coeff_polys: Vec<(usize, usize, &Vec<usize>, &Poly)> = Vec::new();
        for (i, p) in self.pencils.iter().enumerate() {
            for (j, form) in p.coeffs().iter().enumerate() {
                for (idx, poly) in form.terms() {
                    coeff_polys.push((i, j, idx, poly));
                }
            }
        }
        let total_degree = coeff_polys
            .iter()
            .filter_map(|(_, _, _, p)| p.total_degree())
            .max()
            .unwrap_or(0);
        let grid_size = (2 * u64::from(total_degree.max(1)) * samples as u64).max(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let names = self.curve.chart.variables();
        let mut witnesses = Vec::new();
        'samples: for _ in 0..samples {
            let point: Vec<Rat> = (0..m)
                .map(|_| int(rng.gen_range(0..grid_size) as i64))
                .collect();
            for &(i, j, idx, poly) in &coeff_polys {
                let value = poly.eval(&point)?;
                if !value.is_zero() {
                    let mut f = DForm::zero(m, self.pencils[i].form_degree());
                    f.add_term(idx, poly.clone())?;
                    witnesses.push(Witness {
                        pencil: i + 1,
                        coefficient: Some(j),
                        point: None,
                        covectors: Some(idx.clone()),
                        sample: Some(point.iter().map(rat_to_string).collect()),
                        value: Some(rat_to_string(&value)),
                        form: f.display_with(names).to_string(),
                    });
                    break 'samples;
                }
            }
        }
        let verdict = if witnesses.is_empty() {
            Verdict::ProbablyIntegrable
        } else {
            Verdict::NotIntegrableAtQueriedPoints
        };
        let per_trial = Rat::new(i64::from(total_degree).into(), (grid_size as i64).into());
        let bound = num_traits::pow(per_trial, samples);
        let mut report = self.report(Mode::Randomized, verdict, Vec::new(), witnesses, start);
        report.schwartz_zippel = Some(SchwartzZippel {
            samples,
            grid_size,
            total_degree,
            failure_bound: format!("{:.3e}", bound.to_f64().unwrap_or(0.0)),
        });
        Ok(report)
    }

    /// The integrability pencils evaluated at `[0:1]` coincide with their
    /// top coefficients, so vanishing for all finite `t` forces vanishing at
    /// infinity.
    pub fn infinity_consistency(&self) -> bool {
        let inf = ProjPoint::infinity();
        let zero = ProjPoint::finite(Rat::zero());
        self.pencils.iter().all(|p| {
            let top = p.coeffs().last().expect("pencil has coefficients");
            p.eval(&inf) == *top && p.eval(&zero) == p.coeffs()[0]
        })
    }
}

/// If the coframe determinant is non-constant, records where it vanishes.
fn coframe_boundary_note(c: &VeroneseCurve) -> Option<String> {
    let rows: Vec<Vec<Poly>> = c
        .coefficient_forms()
        .iter()
        .map(|f| f.components().expect("coefficient forms are 1-forms"))
        .collect();
    let det = linalg::det_poly(&rows).ok()?;
    if det.as_constant().is_some() {
        return None;
    }
    Some(format!(
        "chart boundary: coframe degenerates where {} = 0",
        det.display_with(c.chart.variables())
    ))
}

pub fn check_at(c: &VeroneseCurve, q: &ProjPoint) -> Result<bool> {
    Ok(Analysis::new(c)?.check_at(q))
}

pub fn check_full(c: &VeroneseCurve) -> Result<IntegrabilityReport> {
    Ok(Analysis::new(c)?.check_full())
}

pub fn check_sparse(c: &VeroneseCurve, points: &[ProjPoint]) -> Result<IntegrabilityReport> {
    Analysis::new(c)?.check_sparse(points)
}

pub fn check_naive(c: &VeroneseCurve, points: &[ProjPoint]) -> Result<IntegrabilityReport> {
    Analysis::new(c)?.check_naive(points)
}

pub fn integrability_locus(c: &VeroneseCurve) -> Result<Locus> {
    Analysis::new(c)?.integrability_locus()
}

pub fn randomized_check(c: &VeroneseCurve, samples: usize, seed: u64) -> Result<IntegrabilityReport> {
    Analysis::new(c)?.randomized_check(samples, seed)
}

pub fn infinity_consistency(c: &VeroneseCurve) -> Result<bool> {
    Ok(Analysis::new(c)?.infinity_consistency())
}

/// Draws `count` distinct points from small integers, halves, thirds and `∞`.
pub fn random_points(rng: &mut ChaCha8Rng, count: usize) -> Vec<ProjPoint> {
    let mut out: Vec<ProjPoint> = Vec::with_capacity(count);
    while out.len() < count {
        let q = match rng.gen_range(0..10) {
            0 => ProjPoint::infinity(),
            1 | 2 => ProjPoint::finite(crate::polyring::rat(rng.gen_range(-9..=9), rng.gen_range(2..=3))),
            _ => ProjPoint::finite(int(rng.gen_range(-6..=6))),
        };
        if !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

/// Outcome of comparing the `n+3`-point criterion with the full check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremTrials {
    pub trials: usize,
    pub seed: u64,
    pub points_per_trial: usize,
    pub full_verdict: Verdict,
    pub sparse_passes: usize,
    /// Draws where the sparse check passed but the full check failed.
    pub disagreements: Vec<Vec<ProjPoint>>,
}

impl<'a> Analysis<'a> {
    /// Runs `trials` sparse checks at `n+3` random distinct points.
    pub fn theorem_trials(&self, trials: usize, seed: u64) -> Result<TheoremTrials> {
        let full = self.check_full().verdict;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = self.curve.n + 3;
        let draws: Vec<Vec<ProjPoint>> = (0..trials).map(|_| random_points(&mut rng, count)).collect();
        let passed: Vec<bool> = draws
            .par_iter()
            .map(|points| Ok(self.check_sparse(points)?.verdict.is_integrable()))
            .collect::<Result<_>>()?;
        let sparse_passes = passed.iter().filter(|&&p| p).count();
        let disagreements = if full.is_integrable() {
            Vec::new()
        } else {
            draws.into_iter().zip(passed).filter(|(_, p)| *p).map(|(d, _)| d).collect()
        };
        Ok(TheoremTrials {
            trials,
            seed,
            points_per_trial: count,
            full_verdict: full,
            sparse_passes,
            disagreements,
        })
    }
}

/// Rank of the `k·l` covectors `γ^i(a_j)` at `point`.
pub fn covector_rank(c: &VeroneseCurve, points: &[ProjPoint], point: &[Rat]) -> Result<usize> {
    let forms: Vec<DForm> = points.iter().flat_map(|q| c.annihilators_at(q)).collect();
    exterior::rank_of_1forms_at_point(&forms, point)
}

/// The foliations `W(a_1) … W(a_l)` are in general position at `point`.
pub fn general_position_check(c: &VeroneseCurve, points: &[ProjPoint], point: &[Rat]) -> Result<bool> {
    ensure_distinct(points)?;
    let expected = (c.k * points.len()).min(c.m());
    Ok(covector_rank(c, points, point)? == expected)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveWire {
    pub k: usize,
    pub n: usize,
    pub variables: Vec<String>,
    pub pencils: Vec<Vec<FormWire>>,
    pub basepoint: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub manifest: Option<ManifestWire>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LocusWire {
    All(String),
    Finite { points: Vec<ProjPoint>, residual_degree: usize },
}

impl Locus {
    pub fn to_wire(&self) -> LocusWire {
        match self {
            Locus::All => LocusWire::All("ALL".into()),
            Locus::Finite {
                points,
                residual_degree,
            } => LocusWire::Finite {
                points: points.clone(),
                residual_degree: *residual_degree,
            },
        }
    }

    pub fn from_wire(w: &LocusWire) -> Result<Self> {
        match w {
            LocusWire::All(s) if s == "ALL" => Ok(Locus::All),
            LocusWire::All(s) => Err(Error::Parse(format!("unknown locus tag {s:?}"))),
            LocusWire::Finite {
                points,
                residual_degree,
            } => Ok(Locus::Finite {
                points: points.clone(),
                residual_degree: *residual_degree,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstIntegralsWire {
    pub anchor: ProjPoint,
    pub integrals: Vec<Vec<TermWire>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestWire {
    pub generator: String,
    pub seed: u64,
    pub expected_locus: LocusWire,
    pub adapted_chart: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub adapted_map: Option<Vec<Vec<TermWire>>>,
    #[serde(default)]
    pub first_integrals: Vec<FirstIntegralsWire>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl GroundTruth {
    pub fn to_wire(&self) -> ManifestWire {
        ManifestWire {
            generator: self.generator.clone(),
            seed: self.seed,
            expected_locus: self.expected_locus.to_wire(),
            adapted_chart: self.adapted_chart,
            adapted_map: self
                .adapted_map
                .as_ref()
                .map(|ps| ps.iter().map(Poly::to_wire).collect()),
            first_integrals: self
                .first_integrals
                .iter()
                .map(|fi| FirstIntegralsWire {
                    anchor: fi.anchor.clone(),
                    integrals: fi.integrals.iter().map(Poly::to_wire).collect(),
                })
                .collect(),
            notes: self.notes.clone(),
        }
    }

    pub fn from_wire(nvars: usize, w: &ManifestWire) -> Result<Self> {
        Ok(GroundTruth {
            expected_locus: Locus::from_wire(&w.expected_locus)?,
            generator: w.generator.clone(),
            seed: w.seed,
            adapted_chart: w.adapted_chart,
            adapted_map: w
                .adapted_map
                .as_ref()
                .map(|ps| ps.iter().map(|p| Poly::from_wire(nvars, p)).collect::<Result<Vec<_>>>())
                .transpose()?,
            first_integrals: w
                .first_integrals
                .iter()
                .map(|fi| {
                    Ok(FirstIntegrals {
                        anchor: fi.anchor.clone(),
                        integrals: fi
                            .integrals
                            .iter()
                            .map(|p| Poly::from_wire(nvars, p))
                            .collect::<Result<Vec<_>>>()?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            notes: w.notes.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::parse_points;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    fn p3(text: &str) -> Poly {
        Poly::parse(text, &names(3)).unwrap()
    }

    fn flat(k: usize, n: usize) -> VeroneseCurve {
        let m = k * (n + 1);
        let pencils = (0..k)
            .map(|i| FormPencil::new((0..=n).map(|j| DForm::dx(m, i * (n + 1) + j)).collect()).unwrap())
            .collect();
        VeroneseCurve::new(k, n, Chart::standard(m), pencils, vec![Rat::zero(); m]).unwrap()
    }

    /// γ(t) = dx0 + (t + (t² − t)x2) dx1 + t² dx2.
    fn perturbed() -> VeroneseCurve {
        let coeffs = vec![
            DForm::dx(3, 0),
            DForm::one_form(vec![p3("0"), p3("1 - x2"), p3("0")]).unwrap(),
            DForm::one_form(vec![p3("0"), p3("x2"), p3("1")]).unwrap(),
        ];
        VeroneseCurve::new(1, 2, Chart::standard(3), vec![FormPencil::new(coeffs).unwrap()], vec![Rat::zero(); 3]).unwrap()
    }

    fn pts(s: &str) -> Vec<ProjPoint> {
        parse_points(s).unwrap()
    }

    #[test]
    fn coframe_validation() {
        assert!(validate_coframe(&flat(1, 2), &[int(0), int(0), int(0)]).unwrap());
        let c = perturbed();
        assert!(validate_coframe(&c, &[int(0), int(0), int(0)]).unwrap());
        assert!(!validate_coframe(&c, &[int(0), int(0), int(1)]).unwrap());

        let dup = FormPencil::new(vec![DForm::dx(2, 0), DForm::dx(2, 0)]).unwrap();
        let bad = VeroneseCurve::new(1, 1, Chart::standard(2), vec![dup], vec![int(0), int(0)]).unwrap();
        assert!(!validate_coframe(&bad, &[int(3), int(-1)]).unwrap());
        assert!(matches!(check_full(&bad), Err(Error::InvalidCurve(_))));
    }

    #[test]
    fn structural_validation() {
        let p = FormPencil::new(vec![DForm::dx(3, 0), DForm::dx(3, 1)]).unwrap();
        assert!(VeroneseCurve::new(1, 1, Chart::standard(3), vec![p], vec![int(0); 3]).is_err());
    }

    #[test]
    fn integrability_pencil_of_perturbed_example() {
        let c = perturbed();
        let ip = integrability_pencil(&c, 1).unwrap();
        assert_eq!(ip.param_degree(), 4);
        // s²·(t² − s·t)·dx2∧dx1∧dx0, i.e. coefficient of dx0∧dx1∧dx2 is −s²(t² − st)
        let vol = |c: i64| {
            let mut f = DForm::zero(3, 3);
            f.add_term(&[0, 1, 2], Poly::constant(3, int(c))).unwrap();
            f
        };
        assert_eq!(ip.coeffs()[0], DForm::zero(3, 3));
        assert_eq!(ip.coeffs()[1], vol(1));
        assert_eq!(ip.coeffs()[2], vol(-1));
        assert!(ip.coeffs()[3].is_zero() && ip.coeffs()[4].is_zero());
        assert!(integrability_pencil(&flat(1, 2), 1).unwrap().is_zero());
        assert!(integrability_pencil(&c, 2).is_err());
    }

    #[test]
    fn pointwise_checks() {
        let c = perturbed();
        assert!(check_at(&c, &ProjPoint::finite(int(0))).unwrap());
        assert!(check_at(&c, &ProjPoint::finite(int(1))).unwrap());
        assert!(!check_at(&c, &ProjPoint::finite(int(2))).unwrap());
        assert!(check_at(&c, &ProjPoint::infinity()).unwrap());
    }

    #[test]
    fn full_sparse_and_naive() {
        let f = flat(1, 2);
        let full = check_full(&f).unwrap();
        assert_eq!(full.verdict, Verdict::IntegrableEverywhere);
        assert!(full.witnesses.is_empty());
        let sparse = check_sparse(&f, &pts("0,1,-1,2,inf")).unwrap();
        assert_eq!(sparse.verdict, Verdict::IntegrableEverywhere);
        assert!(sparse.inference.is_some());

        let c = perturbed();
        let full = check_full(&c).unwrap();
        assert_eq!(full.verdict, Verdict::NotIntegrableAtQueriedPoints);
        assert!(!full.witnesses.is_empty());
        assert!(full.notes.iter().any(|n| n.contains("chart boundary")));
        let sparse = check_sparse(&c, &pts("0,1,inf,2,3")).unwrap();
        assert_eq!(sparse.verdict, Verdict::NotIntegrableAtQueriedPoints);
        let failing: Vec<String> = sparse
            .checked
            .iter()
            .filter(|pc| !pc.integrable)
            .map(|pc| pc.point.to_string())
            .collect();
        assert_eq!(failing, vec!["2", "3"]);
        assert!(check_sparse(&c, &pts("0,1,inf,1")).is_err());
        assert!(check_sparse(&c, &pts("0,1,inf,2")).is_err());

        assert_eq!(check_naive(&f, &pts("0,1,2,3,4")).unwrap().verdict, Verdict::IntegrableEverywhere);
        assert_eq!(
            check_naive(&c, &pts("0,1,inf,2,3")).unwrap().verdict,
            Verdict::NotIntegrableAtQueriedPoints
        );
        assert!(check_naive(&c, &pts("0,1,2,3")).is_err());
    }

    #[test]
    fn listed_points_make_no_global_claim() {
        let c = perturbed();
        let a = Analysis::new(&c).unwrap();
        let r = a.check_listed(&pts("0,1,inf")).unwrap();
        assert_eq!(r.verdict, Verdict::IntegrableAtListedPointsOnly);
    }

    #[test]
    fn locus_examples() {
        assert_eq!(integrability_locus(&flat(1, 2)).unwrap(), Locus::All);
        let locus = integrability_locus(&perturbed()).unwrap();
        assert_eq!(
            locus,
            Locus::Finite {
                points: pts("0,1,inf"),
                residual_degree: 0
            }
        );
    }

    #[test]
    fn locus_with_irrational_factor() {
        // γ(t) = dx0 + (t + (t² + 1)x2) dx1 + t² dx2
        let coeffs = vec![
            DForm::one_form(vec![p3("1"), p3("x2"), p3("0")]).unwrap(),
            DForm::dx(3, 1),
            DForm::one_form(vec![p3("0"), p3("x2"), p3("1")]).unwrap(),
        ];
        let c = VeroneseCurve::new(1, 2, Chart::standard(3), vec![FormPencil::new(coeffs).unwrap()], vec![int(0); 3]).unwrap();
        let locus = integrability_locus(&c).unwrap();
        assert_eq!(
            locus,
            Locus::Finite {
                points: pts("inf"),
                residual_degree: 2
            }
        );
    }

    #[test]
    fn randomized_mode() {
        let r = randomized_check(&flat(1, 2), 5, 11).unwrap();
        assert_eq!(r.verdict, Verdict::ProbablyIntegrable);
        assert!(r.witnesses.is_empty());

        let c = perturbed();
        let r = randomized_check(&c, 10, 3).unwrap();
        assert_eq!(r.verdict, Verdict::NotIntegrableAtQueriedPoints);
        let w = &r.witnesses[0];
        assert!(w.sample.is_some() && w.value.is_some());
        assert_eq!(r, {
            let mut again = randomized_check(&c, 10, 3).unwrap();
            again.volatile = r.volatile.clone();
            again
        });
    }

    #[test]
    fn general_position() {
        let origin3 = vec![int(0); 3];
        assert!(general_position_check(&flat(1, 2), &pts("0,1,2"), &origin3).unwrap());
        assert!(general_position_check(&flat(1, 2), &pts("0,1,2,3"), &origin3).unwrap());
        assert!(general_position_check(&flat(2, 1), &pts("0,1"), &vec![int(0); 4]).unwrap());
        assert_eq!(covector_rank(&flat(2, 1), &pts("0,1"), &vec![int(0); 4]).unwrap(), 4);
    }

    #[test]
    fn infinity_identity() {
        assert!(infinity_consistency(&flat(1, 2)).unwrap());
        assert!(infinity_consistency(&perturbed()).unwrap());
    }

    #[test]
    fn curve_json_round_trip() {
        let mut c = perturbed();
        c.manifest = Some(GroundTruth {
            expected_locus: Locus::Finite {
                points: pts("0,1,inf"),
                residual_degree: 0,
            },
            generator: "perturbed".into(),
            seed: 7,
            adapted_chart: false,
            adapted_map: None,
            first_integrals: vec![],
            notes: vec![],
        });
        let text = c.to_json();
        assert!(text.contains("\"num\""));
        assert_eq!(VeroneseCurve::from_json(&text).unwrap(), c);
        let all = Locus::All.to_wire();
        assert_eq!(serde_json::to_string(&all).unwrap(), "\"ALL\"");
    }
}
