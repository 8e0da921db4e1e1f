use std::error::Error;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use veronese::complexify;
use veronese::corpus::{self, Family, GeneratorSpec};
use veronese::pencil::parse_points;
use veronese::webs::{self, Analysis, GroundTruth, ManifestWire, Verdict, VeroneseCurve};

use crate::{CheckMode, WORKERS_ENV};

type CmdResult = Result<Outcome, Box<dyn Error>>;

/// Exit status of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass = 0,
    Fail = 1,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    report: T,
    volatile: Volatile,
}

#[derive(Serialize)]
struct Volatile {
    elapsed_ms: f64,
}

fn emit<T: Serialize>(command: &str, input: &Path, seed: Option<u64>, report: T, start: Instant, out: Option<&Path>) -> Result<(), Box<dyn Error>> {
    let env = Envelope {
        command,
        input: input.display().to_string(),
        seed,
        report,
        volatile: Volatile {
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    };
    let text = serde_json::to_string_pretty(&env)? + "\n";
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => write_stdout(&text)?,
    }
    Ok(())
}

/// Writes to stdout, treating a closed pipe as success.
fn write_stdout(text: &str) -> std::io::Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

/// Sizes the global rayon pool from the worker-count variable.
pub fn configure_workers() -> Result<(), Box<dyn Error>> {
    let Ok(value) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let workers: usize = value
        .parse()
        .ok()
        .filter(|&w| w > 0)
        .ok_or_else(|| format!("{WORKERS_ENV} must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(workers).build_global()?;
    Ok(())
}

fn load(path: &Path) -> Result<VeroneseCurve, Box<dyn Error>> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(VeroneseCurve::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?)
}

pub fn check(path: &Path, mode: CheckMode, points: Option<&str>, samples: usize, seed: u64, out: Option<&Path>) -> CmdResult {
    let start = Instant::now();
    let curve = load(path)?;
    let analysis = Analysis::new(&curve)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut listed = |default: usize| -> Result<_, Box<dyn Error>> {
        Ok(match points {
            Some(text) => parse_points(text)?,
            None => webs::random_points(&mut rng, default),
        })
    };
    let report = match mode {
        CheckMode::Full => analysis.check_full(),
        CheckMode::Sparse => analysis.check_sparse(&listed(curve.n() + 3)?)?,
        CheckMode::Naive => analysis.check_naive(&listed(curve.integrability_degree() + 1)?)?,
        CheckMode::Random => analysis.randomized_check(samples, seed)?,
        CheckMode::Listed => {
            let text = points.ok_or("--mode listed needs --points")?;
            analysis.check_listed(&parse_points(text)?)?
        }
    };
    let ok = report.verdict.is_integrable() || report.verdict == Verdict::IntegrableAtListedPointsOnly;
    emit("check", path, Some(seed), report, start, out)?;
    Ok(Outcome::from_bool(ok))
}

pub fn theorem(path: &Path, trials: usize, seed: u64, out: Option<&Path>) -> CmdResult {
    let start = Instant::now();
    let curve = load(path)?;
    let report = Analysis::new(&curve)?.theorem_trials(trials, seed)?;
    let ok = report.disagreements.is_empty();
    emit("theorem", path, Some(seed), report, start, out)?;
    Ok(Outcome::from_bool(ok))
}

pub fn complexify(path: &Path, anchors: &str, sample_ts: &str, adapted: bool, manifest: Option<&Path>, out: Option<&Path>) -> CmdResult {
    let start = Instant::now();
    let mut curve = load(path)?;
    if let Some(mpath) = manifest {
        let text = fs::read_to_string(mpath).map_err(|e| format!("{}: {e}", mpath.display()))?;
        let wire: ManifestWire = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", mpath.display()))?;
        curve.manifest = Some(GroundTruth::from_wire(curve.m(), &wire)?);
    }
    if adapted {
        if curve.manifest.is_none() {
            return Err("--adapted needs a manifest (embedded or via --manifest)".into());
        }
        curve = corpus::to_adapted_chart(&curve)?;
    }
    let anchors = parse_points(anchors)?;
    let ts = parse_points(sample_ts)?;
    let report = complexify::check_theorem1(&curve, &anchors, &ts)?;
    let ok = report.all_ok();
    emit("complexify", path, None, report, start, out)?;
    Ok(Outcome::from_bool(ok))
}

pub struct GenArgs {
    pub family: String,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    pub points: Option<String>,
    pub map: Option<String>,
    pub matrix: Option<String>,
    pub g: Option<String>,
    pub beta: Option<String>,
    pub pencil: Option<usize>,
    pub base: Option<String>,
    pub base_seed: Option<u64>,
}

fn split_list(text: &str) -> Vec<String> {
    text.split(',').map(|s| s.trim().to_string()).collect()
}

pub fn gen(args: GenArgs, out_dir: &Path) -> CmdResult {
    let family: Family = args.family.parse()?;
    let mut spec = GeneratorSpec::new(family, args.k, args.n, args.seed);
    if let Some(base) = &args.base {
        let base_family: Family = base.parse()?;
        spec = spec.on(GeneratorSpec::new(base_family, args.k, args.n, args.base_seed.unwrap_or(args.seed)));
    }
    spec.points = args.points.as_deref().map(parse_points).transpose()?;
    spec.map = args.map.as_deref().map(split_list);
    spec.matrix = args.matrix.as_deref().map(|m| m.split(';').map(split_list).collect());
    spec.g = args.g;
    spec.beta = args.beta.as_deref().map(split_list);
    spec.pencil = args.pencil;
    let curve = corpus::generate(&spec)?;
    corpus::assert_theorem2(&curve)?;
    fs::create_dir_all(out_dir).map_err(|e| format!("{}: {e}", out_dir.display()))?;
    let id = format!(
        "{}-k{}-n{}-s{}",
        spec.label().replace(['(', ')'], "_").trim_end_matches('_'),
        spec.k,
        spec.n,
        spec.seed
    );
    let entry = corpus::write_instance(out_dir, &id, &spec, &curve)?;
    write_stdout(&(serde_json::to_string_pretty(&entry)? + "\n"))?;
    Ok(Outcome::Pass)
}

pub fn corpus(seed: u64, out_dir: &Path) -> CmdResult {
    let entries = corpus::standard_corpus(seed)?;
    let index = corpus::write_corpus(out_dir, &entries)?;
    let summary = serde_json::json!({
        "curves": index.len(),
        "index": out_dir.join("index.json").display().to_string(),
    });
    write_stdout(&(serde_json::to_string_pretty(&summary)? + "\n"))?;
    Ok(Outcome::Pass)
}
