//! Batch harness: configuration, seeded suite execution, and the text report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::algebra::AlgebraTag;
use crate::error::{Error, Result};
use crate::geometry::GeometryCase;
use crate::homotopy::{VertexRecord, DEFAULT_K};
use crate::suites::{self, CheckRecord, ReduceExperiment, ReduceRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Algebra,
    Geometry,
    Covering,
    Homotopy,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Algebra, Suite::Geometry, Suite::Covering, Suite::Homotopy];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Geometry => "geometry",
            Suite::Covering => "covering",
            Suite::Homotopy => "homotopy",
        }
    }
}

/// Parse a comma-separated suite list. "all" expands to every suite valid for
/// the case (covering only in (ℝ,ℍ,ℍ)).
pub fn parse_suites(list: &str, case: GeometryCase) -> Result<Vec<Suite>> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match name {
            "all" => out.extend(Suite::ALL.iter().copied().filter(|s| *s != Suite::Covering || case == GeometryCase::HH)),
            _ => out.push(
                Suite::ALL
                    .iter()
                    .copied()
                    .find(|s| s.name() == name)
                    .ok_or_else(|| Error::Config(format!("unknown suite {name:?}")))?,
            ),
        }
    }
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(Error::Config("no suites selected".into()));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Samples {
    pub algebra: usize,
    pub geometry: usize,
    pub covering: usize,
    pub homotopy: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Samples { algebra: 10_000, geometry: 1_000, covering: 10_000, homotopy: 100 }
    }
}

impl Samples {
    pub fn uniform(n: usize) -> Self {
        Samples { algebra: n, geometry: n, covering: n, homotopy: n }
    }

    fn for_suite(&self, s: Suite) -> usize {
        match s {
            Suite::Algebra => self.algebra,
            Suite::Geometry => self.geometry,
            Suite::Covering => self.covering,
            Suite::Homotopy => self.homotopy,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub case: GeometryCase,
    pub seed: u64,
    pub samples: Samples,
    pub tolerance: f64,
    pub k_budget: usize,
    pub suites: Vec<Suite>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(case: GeometryCase, seed: u64) -> Self {
        RunConfig {
            case,
            seed,
            samples: Samples::default(),
            tolerance: 1e-9,
            k_budget: DEFAULT_K,
            suites: parse_suites("all", case).expect("nonempty"),
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.suites {
            if self.samples.for_suite(*s) == 0 {
                return Err(Error::Config(format!("samples for suite {} must be at least 1", s.name())));
            }
        }
        if self.suites.is_empty() {
            return Err(Error::Config("no suites selected".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config(format!("tolerance {} must be positive", self.tolerance)));
        }
        if self.suites.contains(&Suite::Covering) && self.case != GeometryCase::HH {
            return Err(Error::Config("the covering suite only applies to case hh".into()));
        }
        Ok(())
    }
}

/// Sub-seed for a labelled check: the first eight bytes of SHA-256(seed ‖ label).
pub fn sub_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

pub fn rng_for(seed: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub_seed(seed, label))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HomotopyStats {
    pub experiments: usize,
    pub max_log_length: usize,
    pub k_emp: usize,
    pub k_budget: usize,
    pub within_bound: usize,
    pub comparisons: Vec<ReduceRecord>,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub homotopy: Option<HomotopyStats>,
    pub experiments: Vec<ReduceExperiment>,
    pub wall_time: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// (name, passed, moves) per check: the part a rerun must reproduce.
    pub fn outcome_vector(&self) -> Vec<(String, bool, usize)> {
        self.checks.iter().map(|c| (c.name.clone(), c.passed, c.moves)).collect()
    }

    /// The report text without the trailing wall-time line.
    pub fn render_body(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        let _ = writeln!(s, "[config]");
        let _ = writeln!(s, "case = {:?}", c.case.name());
        let _ = writeln!(s, "seed = {}", c.seed);
        let _ = writeln!(s, "samples.algebra = {}", c.samples.algebra);
        let _ = writeln!(s, "samples.geometry = {}", c.samples.geometry);
        let _ = writeln!(s, "samples.covering = {}", c.samples.covering);
        let _ = writeln!(s, "samples.homotopy = {}", c.samples.homotopy);
        let _ = writeln!(s, "tolerance = {}", num(c.tolerance));
        let _ = writeln!(s, "k_budget = {}", c.k_budget);
        let names: Vec<String> = c.suites.iter().map(|x| format!("{:?}", x.name())).collect();
        let _ = writeln!(s, "suites = [{}]", names.join(", "));
        let out = c.out.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let _ = writeln!(s, "out = {out:?}");
        for r in &self.checks {
            let _ = writeln!(s, "\n[[check]]");
            let _ = writeln!(s, "name = {:?}", r.name);
            let _ = writeln!(s, "passed = {}", r.passed);
            let _ = writeln!(s, "samples = {}", r.samples);
            let _ = writeln!(s, "max_error = {}", num(r.max_error));
            let _ = writeln!(s, "tolerance = {}", num(r.tolerance));
            let _ = writeln!(s, "moves = {}", r.moves);
            let _ = writeln!(s, "counterexample = {:?}", r.counterexample.as_deref().unwrap_or(""));
        }
        if let Some(h) = &self.homotopy {
            let _ = writeln!(s, "\n[homotopy]");
            let _ = writeln!(s, "experiments = {}", h.experiments);
            let _ = writeln!(s, "max_log_length = {}", h.max_log_length);
            let _ = writeln!(s, "k_emp = {}", h.k_emp);
            let _ = writeln!(s, "k_budget = {}", h.k_budget);
            let _ = writeln!(s, "within_bound = {}", h.within_bound);
            let rows: Vec<String> =
                h.comparisons.iter().map(|r| format!("[{}, {}, {}, {}]", r.k, r.total, r.bound, r.k_emp)).collect();
            let _ = writeln!(s, "comparisons = [{}]  # [k, total, D(k), K_emp]", rows.join(", "));
        }
        let failed = self.checks.iter().filter(|r| !r.passed).count();
        let _ = writeln!(s, "\n[summary]");
        let _ = writeln!(s, "passed = {}", self.passed());
        let _ = writeln!(s, "checks = {}", self.checks.len());
        let _ = writeln!(s, "failed = {failed}");
        s
    }

    pub fn render(&self) -> String {
        format!("{}wall_time_s = {}\n", self.render_body(), num(self.wall_time))
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn run_suite(cfg: &RunConfig, suite: Suite) -> (Vec<CheckRecord>, Option<suites::ReduceSummary>) {
    let case = cfg.case;
    let n = cfg.samples.for_suite(suite);
    let tol = cfg.tolerance;
    let rng = |label: &str| rng_for(cfg.seed, &format!("{}/{}/{label}", case.name(), suite.name()));
    match suite {
        Suite::Algebra => {
            let mut out: Vec<CheckRecord> = AlgebraTag::ALL
                .iter()
                .map(|t| suites::check_composition(*t, n, tol, &mut rng(&format!("composition.{t}"))))
                .collect();
            for tag in [case.a(), case.b()] {
                out.push(suites::check_hermitian(case.field(), tag, n, tol, &mut rng(&format!("hermitian.{tag}"))));
            }
            out.push(suites::check_embed(case, (n / 10).max(1), 100, tol.max(1e-8), &mut rng("embed")));
            (out, None)
        }
        Suite::Geometry => {
            let mut out = suites::check_coplanarity(case, n, tol, &mut rng("coplanarity"));
            out.push(suites::check_gq(case, n, &mut rng("gq")));
            out.push(suites::check_plane_residue(case, n, &mut rng("residue")));
            out.push(suites::check_automorphisms(case, (n / 10).max(1), &mut rng("automorphism")));
            (out, None)
        }
        Suite::Covering => {
            let mut out = vec![suites::check_covering_base_point(n, 1e-3, &mut rng("base_point"))];
            out.extend(suites::check_free_action(n, 1e-3, &mut rng("free_action")));
            (out, None)
        }
        Suite::Homotopy => {
            let k = cfg.k_budget;
            let mut out = vec![
                suites::check_budget_arithmetic(),
                suites::check_moves(case, n, &mut rng("moves")),
                suites::check_eliminate_planes(case, n, &mut rng("eliminate_planes")),
                suites::check_orthogonalize(case, n, &mut rng("orthogonalize")),
                suites::check_pinch(case, n, &mut rng("pinch")),
                suites::check_pl_invariant(case, n, &mut rng("pl_invariant")),
            ];
            if case.field() == crate::algebra::GroundField::C {
                out.push(suites::check_pl_reduce(case, n, tol, &mut rng("pl_reduce")));
            }
            out.push(suites::check_diam(case, n, tol, &mut rng("diam")));
            out.push(suites::check_primitive_contraction(case, n, k, &mut rng("primitive_contraction")));
            if case != GeometryCase::HH {
                out.push(suites::check_shorten(case, n, k, &mut rng("shorten")));
            }
            let red = suites::check_reduce(case, n, k, &mut rng("reduce"));
            out.push(red.record.clone());
            (out, Some(red))
        }
    }
}

/// Run the selected suites (concurrently, one thread per suite) and write the
/// report plus the move-log side files when an output path is set.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let results: Vec<(Vec<CheckRecord>, Option<suites::ReduceSummary>)> = std::thread::scope(|s| {
        let handles: Vec<_> = cfg.suites.iter().map(|&suite| s.spawn(move || run_suite(cfg, suite))).collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    });
    let mut checks = Vec::new();
    let mut homotopy = None;
    let mut experiments = Vec::new();
    for (recs, red) in results {
        checks.extend(recs);
        if let Some(red) = red {
            homotopy = Some(HomotopyStats {
                experiments: red.runs.len(),
                max_log_length: red.runs.iter().map(|r| r.total).max().unwrap_or(0),
                k_emp: red.runs.iter().map(|r| r.k_emp).max().unwrap_or(0),
                k_budget: cfg.k_budget,
                within_bound: red.runs.iter().filter(|r| r.total <= r.bound).count(),
                comparisons: red.runs,
            });
            experiments = red.experiments;
        }
    }
    let report = Report { config: cfg.clone(), checks, homotopy, experiments, wall_time: start.elapsed().as_secs_f64() };
    if let Some(path) = &cfg.out {
        write_report(&report, path)?;
    }
    Ok(report)
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    std::fs::write(path, report.render()).map_err(|e| io_err(path, e))?;
    if report.experiments.is_empty() {
        return Ok(());
    }
    let mut dir = path.as_os_str().to_owned();
    dir.push(".movelogs");
    let dir = PathBuf::from(dir);
    std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    for (i, ex) in report.experiments.iter().enumerate() {
        let log_path = dir.join(format!("reduce-{i:04}.jsonl"));
        std::fs::write(&log_path, ex.log.to_jsonl()).map_err(|e| io_err(&log_path, e))?;
        let paths = serde_json::json!({
            "source": ex.source.vertices().iter().map(VertexRecord::from_vertex).collect::<Vec<_>>(),
            "target": ex.target.vertices().iter().map(VertexRecord::from_vertex).collect::<Vec<_>>(),
        });
        let paths_path = dir.join(format!("reduce-{i:04}.paths.json"));
        std::fs::write(&paths_path, paths.to_string()).map_err(|e| io_err(&paths_path, e))?;
    }
    Ok(())
}

/// Process exit status for a finished run: 0 all pass, 1 a check failed.
pub fn exit_code(report: &Report) -> i32 {
    if report.passed() {
        0
    } else {
        1
    }
}
