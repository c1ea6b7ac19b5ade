//! Population-size sweeps, CSV run records, and summary tables.
//!
//! A sweep runs each population size `runs` times with independently
//! derived seeds and appends one CSV row per run, flushing after every row
//! so an interrupted sweep leaves usable data. Summaries group the rows,
//! compute success rates, and pick the minimal population size clearing
//! each success-rate threshold, mirroring how such benchmarks are usually
//! tabulated.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::{run_eda, EdaConfig, RunRecord};
use crate::error::{Error, Result};
use crate::problems::{ConcatenatedTraps, Hiff, NkLandscape, Problem};
use crate::rng::{derive_seed, Stream};

/// Exact column order of sweep CSV files.
pub const CSV_HEADER: [&str; 14] = [
    "problem",
    "algo",
    "n",
    "k",
    "instance_id",
    "popsize",
    "run",
    "seed",
    "success",
    "best_fitness",
    "evaluations",
    "generations",
    "wall_ms",
    "stop_reason",
];

/// Success-rate thresholds reported by default: at least half the runs,
/// and at least nine in ten.
pub const DEFAULT_THRESHOLDS: [f64; 2] = [0.5, 0.9];

/// Which optimizer a sweep exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Dae,
    Pbil,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dae => "dae",
            Algorithm::Pbil => "pbil",
        }
    }

    /// Engine configuration with this algorithm's default budgets.
    pub fn config(self, popsize: usize, seed: u64) -> EdaConfig {
        match self {
            Algorithm::Dae => EdaConfig::dae(popsize, seed),
            Algorithm::Pbil => EdaConfig::pbil(popsize, seed),
        }
    }

    /// The standard ladder: population sizes doubling from 50, with a
    /// final capped entry (16,000; PBIL gets more headroom at 512,000
    /// because its generations are much cheaper).
    pub fn default_popsizes(self) -> Vec<usize> {
        let cap = match self {
            Algorithm::Dae => 16_000,
            Algorithm::Pbil => 512_000,
        };
        doubling_ladder(50, cap)
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dae" => Ok(Algorithm::Dae),
            "pbil" => Ok(Algorithm::Pbil),
            other => Err(Error::InvalidArgument(format!(
                "unknown algorithm `{other}` (expected `dae` or `pbil`)"
            ))),
        }
    }
}

/// `start, 2*start, 4*start, ...` up to and including `cap` (appended as a
/// final entry when the doubling overshoots it).
pub fn doubling_ladder(start: usize, cap: usize) -> Vec<usize> {
    assert!(start > 0 && cap >= start);
    let mut sizes = Vec::new();
    let mut s = start;
    while s < cap {
        sizes.push(s);
        s *= 2;
    }
    sizes.push(cap.max(start));
    sizes
}

/// A problem description that can be turned into a runnable instance.
#[derive(Debug, Clone)]
pub enum ProblemSpec {
    Trap {
        k: usize,
        blocks: usize,
        /// Optional seed scattering block membership across positions.
        scatter_seed: Option<u64>,
    },
    /// Generate an NK landscape and solve it exactly (requires `n <= 26`).
    NkGenerate { n: usize, k: usize, seed: u64 },
    /// Load an NK landscape from its text file; if the file carries no
    /// optimum it is solved on the spot (again requiring `n <= 26`).
    NkFile { path: PathBuf },
    Hiff { levels: u32 },
}

impl ProblemSpec {
    pub fn build(&self) -> Result<BuiltProblem> {
        match self {
            ProblemSpec::Trap {
                k,
                blocks,
                scatter_seed,
            } => {
                let trap = match scatter_seed {
                    Some(seed) => ConcatenatedTraps::scattered(*k, *blocks, *seed)?,
                    None => ConcatenatedTraps::new(*k, *blocks)?,
                };
                let instance_id = match scatter_seed {
                    Some(seed) => format!("scatter:{seed}"),
                    None => "-".to_string(),
                };
                Ok(BuiltProblem {
                    n: trap.k() * trap.blocks(),
                    k_column: *k,
                    instance_id,
                    problem: Arc::new(trap),
                })
            }
            ProblemSpec::NkGenerate { n, k, seed } => {
                let inst = NkLandscape::generate(*n, *k, *seed)?.solved()?;
                Ok(BuiltProblem {
                    n: *n,
                    k_column: *k,
                    instance_id: seed.to_string(),
                    problem: Arc::new(inst),
                })
            }
            ProblemSpec::NkFile { path } => {
                let inst = NkLandscape::load(path)?;
                let inst = if inst.known_optimum().is_some() {
                    inst
                } else {
                    inst.solved().map_err(|e| match e {
                        Error::TooLarge(msg) => Error::TooLarge(format!(
                            "{msg}; instances this large must ship an OPT line in {}",
                            path.display()
                        )),
                        other => other,
                    })?
                };
                let instance_id = path
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                Ok(BuiltProblem {
                    n: inst.n(),
                    k_column: inst.k(),
                    instance_id,
                    problem: Arc::new(inst),
                })
            }
            ProblemSpec::Hiff { levels } => {
                let hiff = Hiff::new(*levels)?;
                Ok(BuiltProblem {
                    n: hiff.size(),
                    k_column: *levels as usize,
                    instance_id: "-".to_string(),
                    problem: Arc::new(hiff),
                })
            }
        }
    }
}

/// A runnable problem plus the metadata that goes into CSV rows. The `k`
/// column carries the trap size, the NK epistasis degree, or the HIFF
/// level count, depending on the family.
#[derive(Clone)]
pub struct BuiltProblem {
    problem: Arc<dyn Problem>,
    n: usize,
    k_column: usize,
    instance_id: String,
}

impl BuiltProblem {
    /// Wrap an arbitrary problem implementation for sweeping.
    pub fn custom(problem: Arc<dyn Problem>, k_column: usize, instance_id: impl Into<String>) -> Self {
        Self {
            n: problem.size(),
            k_column,
            instance_id: instance_id.into(),
            problem,
        }
    }

    pub fn problem(&self) -> &Arc<dyn Problem> {
        &self.problem
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn instance_id(&self) -> &str {
        &self.instance_id
    }
}

/// Everything a sweep needs.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub problem: ProblemSpec,
    pub algorithm: Algorithm,
    /// Strictly increasing list of population sizes.
    pub popsizes: Vec<usize>,
    /// Repetitions per population size.
    pub runs: usize,
    pub base_seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.popsizes.is_empty() {
            return Err(Error::InvalidArgument("no population sizes given".into()));
        }
        if !self.popsizes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "population sizes must be strictly increasing".into(),
            ));
        }
        if self.runs == 0 {
            return Err(Error::InvalidArgument("runs must be at least 1".into()));
        }
        Ok(())
    }
}

/// The seed for run index `run` at population size `popsize`, derived so
/// that no two (popsize, run) pairs share an RNG stream.
pub fn run_seed(base_seed: u64, popsize: usize, run: usize) -> u64 {
    derive_seed(
        base_seed,
        &[Stream::SweepRun as u64, popsize as u64, run as u64],
    )
}

/// One CSV row. Field order defines the column order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRow {
    pub problem: String,
    pub algo: String,
    pub n: usize,
    pub k: usize,
    pub instance_id: String,
    pub popsize: usize,
    pub run: usize,
    pub seed: u64,
    pub success: bool,
    /// NaN for runs that failed with an error.
    pub best_fitness: f64,
    pub evaluations: u64,
    pub generations: usize,
    pub wall_ms: f64,
    /// "optimum", "max-generations", "stall", or "error:<kind>".
    pub stop_reason: String,
}

impl RunRow {
    fn from_record(
        problem: &BuiltProblem,
        algorithm: Algorithm,
        popsize: usize,
        run: usize,
        record: &RunRecord,
    ) -> Self {
        Self {
            problem: problem.problem.name().to_string(),
            algo: algorithm.name().to_string(),
            n: problem.n,
            k: problem.k_column,
            instance_id: problem.instance_id.clone(),
            popsize,
            run,
            seed: record.seed,
            success: record.success,
            best_fitness: record.best_fitness,
            evaluations: record.evaluations,
            generations: record.generations,
            wall_ms: record.wall_ms,
            stop_reason: record.stop_reason.to_string(),
        }
    }

    fn from_error(
        problem: &BuiltProblem,
        algorithm: Algorithm,
        popsize: usize,
        run: usize,
        seed: u64,
        err: &Error,
    ) -> Self {
        Self {
            problem: problem.problem.name().to_string(),
            algo: algorithm.name().to_string(),
            n: problem.n,
            k: problem.k_column,
            instance_id: problem.instance_id.clone(),
            popsize,
            run,
            seed,
            success: false,
            best_fitness: f64::NAN,
            evaluations: 0,
            generations: 0,
            wall_ms: 0.0,
            stop_reason: format!("error:{}", err.kind()),
        }
    }
}

/// Resolve the problem and run the full sweep, persisting rows to `out`.
pub fn run_sweep(cfg: &SweepConfig, out: &Path) -> Result<Vec<RunRow>> {
    cfg.validate()?;
    let problem = cfg.problem.build()?;
    run_sweep_on(
        &problem,
        cfg.algorithm,
        &cfg.popsizes,
        cfg.runs,
        cfg.base_seed,
        out,
    )
}

/// Sweep an already-built problem. Each row is flushed as soon as it is
/// written; a run that fails becomes a `success=false` row tagged
/// `error:<kind>` instead of aborting the sweep.
pub fn run_sweep_on(
    problem: &BuiltProblem,
    algorithm: Algorithm,
    popsizes: &[usize],
    runs: usize,
    base_seed: u64,
    out: &Path,
) -> Result<Vec<RunRow>> {
    let file = std::fs::File::create(out).map_err(|source| Error::File {
        context: format!("creating sweep output {}", out.display()),
        source,
    })?;
    let mut writer = csv::Writer::from_writer(file);
    let mut rows = Vec::with_capacity(popsizes.len() * runs);
    for &popsize in popsizes {
        for run in 0..runs {
            let seed = run_seed(base_seed, popsize, run);
            let engine_cfg = algorithm.config(popsize, seed);
            let row = match run_eda(problem.problem.clone(), engine_cfg) {
                Ok(record) => RunRow::from_record(problem, algorithm, popsize, run, &record),
                Err(err) => RunRow::from_error(problem, algorithm, popsize, run, seed, &err),
            };
            writer.serialize(&row)?;
            writer.flush().map_err(|source| Error::File {
                context: format!("flushing sweep output {}", out.display()),
                source,
            })?;
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Read a sweep CSV back, validating the header against [`CSV_HEADER`].
pub fn read_rows(path: &Path) -> Result<Vec<RunRow>> {
    let file = std::fs::File::open(path).map_err(|source| Error::File {
        context: format!("opening sweep records {}", path.display()),
        source,
    })?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers()?.clone();
    if headers.len() != CSV_HEADER.len() {
        return Err(Error::Schema {
            column: format!("count={}", headers.len()),
            msg: format!("expected {} columns", CSV_HEADER.len()),
        });
    }
    for (got, expected) in headers.iter().zip(CSV_HEADER) {
        if got != expected {
            return Err(Error::Schema {
                column: got.to_string(),
                msg: format!("expected column `{expected}`"),
            });
        }
    }
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record?);
    }
    Ok(rows)
}

/// Replace the wall-clock column with a placeholder, for byte comparisons
/// between reruns of the same sweep (every other column is deterministic).
pub fn mask_wall_ms(csv_text: &str) -> String {
    let wall_idx = CSV_HEADER
        .iter()
        .position(|&c| c == "wall_ms")
        .expect("header contains wall_ms");
    csv_text
        .lines()
        .enumerate()
        .map(|(i, line)| {
            if i == 0 {
                return line.to_string();
            }
            let mut fields: Vec<&str> = line.split(',').collect();
            if fields.len() == CSV_HEADER.len() {
                fields[wall_idx] = "*";
            }
            fields.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Mean and sample standard deviation (zero for a single value).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

fn mean_std(values: &[f64]) -> Option<MeanStd> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Some(MeanStd { mean, std })
}

/// Aggregates for one population size.
#[derive(Debug, Clone, Serialize)]
pub struct PopsizeStats {
    pub popsize: usize,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Over successful runs only; absent when none succeeded.
    pub evaluations: Option<MeanStd>,
    /// Over successful runs only, milliseconds.
    pub wall_ms: Option<MeanStd>,
}

/// The minimal population size clearing a success-rate threshold.
/// Its statistics cover *all* runs at that size, successful or not.
#[derive(Debug, Clone, Serialize)]
pub struct SelectedPopsize {
    pub popsize: usize,
    pub success_rate: f64,
    pub evaluations: MeanStd,
    pub wall_ms: MeanStd,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdSelection {
    pub threshold: f64,
    /// `None` when no swept size reached the threshold.
    pub selection: Option<SelectedPopsize>,
}

/// Summary of one (problem, algorithm, instance) group.
#[derive(Debug, Clone, Serialize)]
pub struct GroupSummary {
    pub problem: String,
    pub algo: String,
    pub n: usize,
    pub k: usize,
    pub instance_id: String,
    pub popsizes: Vec<PopsizeStats>,
    pub thresholds: Vec<ThresholdSelection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub groups: Vec<GroupSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct GroupKey {
    problem: String,
    algo: String,
    n: usize,
    k: usize,
    instance_id: String,
}

/// Group rows and compute per-popsize statistics and threshold selections.
pub fn summarize_rows(rows: &[RunRow], thresholds: &[f64]) -> Result<SweepSummary> {
    if rows.is_empty() {
        return Err(Error::InsufficientData("no rows to summarize".into()));
    }
    for &t in thresholds {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("threshold {t} outside [0, 1]")));
        }
    }
    let mut groups: BTreeMap<GroupKey, BTreeMap<usize, Vec<&RunRow>>> = BTreeMap::new();
    for row in rows {
        let key = GroupKey {
            problem: row.problem.clone(),
            algo: row.algo.clone(),
            n: row.n,
            k: row.k,
            instance_id: row.instance_id.clone(),
        };
        groups
            .entry(key)
            .or_default()
            .entry(row.popsize)
            .or_default()
            .push(row);
    }

    let mut summaries = Vec::with_capacity(groups.len());
    for (key, by_popsize) in groups {
        let mut popsizes = Vec::with_capacity(by_popsize.len());
        for (&popsize, rows) in &by_popsize {
            let successes = rows.iter().filter(|r| r.success).count();
            let successful_evals: Vec<f64> = rows
                .iter()
                .filter(|r| r.success)
                .map(|r| r.evaluations as f64)
                .collect();
            let successful_wall: Vec<f64> = rows
                .iter()
                .filter(|r| r.success)
                .map(|r| r.wall_ms)
                .collect();
            popsizes.push(PopsizeStats {
                popsize,
                runs: rows.len(),
                successes,
                success_rate: successes as f64 / rows.len() as f64,
                evaluations: mean_std(&successful_evals),
                wall_ms: mean_std(&successful_wall),
            });
        }
        let selections = thresholds
            .iter()
            .map(|&threshold| {
                let selection = popsizes
                    .iter()
                    .find(|p| p.success_rate >= threshold)
                    .map(|p| {
                        let rows = &by_popsize[&p.popsize];
                        let evals: Vec<f64> =
                            rows.iter().map(|r| r.evaluations as f64).collect();
                        let wall: Vec<f64> = rows.iter().map(|r| r.wall_ms).collect();
                        SelectedPopsize {
                            popsize: p.popsize,
                            success_rate: p.success_rate,
                            evaluations: mean_std(&evals).expect("groups are non-empty"),
                            wall_ms: mean_std(&wall).expect("groups are non-empty"),
                        }
                    });
                ThresholdSelection {
                    threshold,
                    selection,
                }
            })
            .collect();
        summaries.push(GroupSummary {
            problem: key.problem,
            algo: key.algo,
            n: key.n,
            k: key.k,
            instance_id: key.instance_id,
            popsizes,
            thresholds: selections,
        });
    }
    Ok(SweepSummary { groups: summaries })
}

/// Render a plain-text table: one block per group, a line per population
/// size, then the threshold picks (with `-` marking thresholds no size
/// reached, and statistics over all runs at the chosen size).
pub fn render_report(summary: &SweepSummary) -> String {
    let mut out = String::new();
    for group in &summary.groups {
        writeln!(
            out,
            "{} n={} k={} instance={} algo={}",
            group.problem, group.n, group.k, group.instance_id, group.algo
        )
        .unwrap();
        writeln!(
            out,
            "  {:>8} {:>6} {:>8} {:>24} {:>24}",
            "popsize", "runs", "success", "evals (successful)", "wall ms (successful)"
        )
        .unwrap();
        for p in &group.popsizes {
            let evals = p
                .evaluations
                .map(|m| format!("{:.0} +- {:.0}", m.mean, m.std))
                .unwrap_or_else(|| "-".to_string());
            let wall = p
                .wall_ms
                .map(|m| format!("{:.1} +- {:.1}", m.mean, m.std))
                .unwrap_or_else(|| "-".to_string());
            writeln!(
                out,
                "  {:>8} {:>6} {:>8.2} {:>24} {:>24}",
                p.popsize, p.runs, p.success_rate, evals, wall
            )
            .unwrap();
        }
        for t in &group.thresholds {
            match &t.selection {
                Some(sel) => writeln!(
                    out,
                    "  >= {:>3.0}% success: popsize {} (rate {:.2}), evals {:.0} +- {:.0}, \
                     wall {:.1} +- {:.1} ms (all runs)",
                    t.threshold * 100.0,
                    sel.popsize,
                    sel.success_rate,
                    sel.evaluations.mean,
                    sel.evaluations.std,
                    sel.wall_ms.mean,
                    sel.wall_ms.std
                )
                .unwrap(),
                None => writeln!(
                    out,
                    "  >= {:>3.0}% success: -",
                    t.threshold * 100.0
                )
                .unwrap(),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::Bitstring;

    fn tiny_trap_sweep() -> SweepConfig {
        SweepConfig {
            problem: ProblemSpec::Trap {
                k: 2,
                blocks: 2,
                scatter_seed: None,
            },
            algorithm: Algorithm::Pbil,
            popsizes: vec![8, 16],
            runs: 2,
            base_seed: 99,
        }
    }

    #[test]
    fn ladder_doubles_to_the_cap() {
        assert_eq!(
            doubling_ladder(50, 16_000),
            vec![50, 100, 200, 400, 800, 1600, 3200, 6400, 12800, 16000]
        );
        assert_eq!(doubling_ladder(50, 50), vec![50]);
        assert_eq!(doubling_ladder(50, 400), vec![50, 100, 200, 400]);
        let pbil = Algorithm::Pbil.default_popsizes();
        assert_eq!(pbil.last(), Some(&512_000));
        assert!(pbil.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sweep_writes_one_row_per_run() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("sweep.csv");
        let rows = run_sweep(&tiny_trap_sweep(), &out).unwrap();
        assert_eq!(rows.len(), 4);
        let text = std::fs::read_to_string(&out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(lines.count(), 4);
        let back = read_rows(&out).unwrap();
        assert_eq!(back.len(), 4);
        assert_eq!(back[0].popsize, 8);
        assert_eq!(back[3].popsize, 16);
        assert_eq!(back[0].run, 0);
        assert_eq!(back[1].run, 1);
    }

    #[test]
    fn reruns_are_byte_identical_modulo_wall_clock() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        run_sweep(&tiny_trap_sweep(), &a).unwrap();
        run_sweep(&tiny_trap_sweep(), &b).unwrap();
        let ta = mask_wall_ms(&std::fs::read_to_string(&a).unwrap());
        let tb = mask_wall_ms(&std::fs::read_to_string(&b).unwrap());
        assert_eq!(ta, tb);
    }

    #[test]
    fn distinct_run_indices_get_distinct_seeds() {
        let mut seeds = std::collections::HashSet::new();
        for popsize in [50usize, 100, 200] {
            for run in 0..20 {
                assert!(seeds.insert(run_seed(7, popsize, run)));
            }
        }
    }

    #[test]
    fn failing_runs_become_tagged_rows() {
        struct Exploding;
        impl Problem for Exploding {
            fn name(&self) -> &str {
                "exploding"
            }
            fn size(&self) -> usize {
                6
            }
            fn evaluate(&self, _x: &Bitstring) -> crate::error::Result<f64> {
                Err(Error::Domain("deliberate test failure".into()))
            }
            fn optimum(&self) -> f64 {
                1.0
            }
        }
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("boom.csv");
        let built = BuiltProblem::custom(Arc::new(Exploding), 0, "test");
        let rows = run_sweep_on(&built, Algorithm::Pbil, &[8], 3, 1, &out).unwrap();
        assert_eq!(rows.len(), 3);
        for row in &rows {
            assert!(!row.success);
            assert!(row.best_fitness.is_nan());
            assert_eq!(row.stop_reason, "error:domain");
        }
        // Tagged rows survive the CSV round trip.
        let back = read_rows(&out).unwrap();
        assert!(back[0].best_fitness.is_nan());
        assert_eq!(back[2].stop_reason, "error:domain");
    }

    fn synthetic_row(popsize: usize, run: usize, success: bool, evals: u64) -> RunRow {
        RunRow {
            problem: "trap".into(),
            algo: "dae".into(),
            n: 20,
            k: 4,
            instance_id: "-".into(),
            popsize,
            run,
            seed: run as u64,
            success,
            best_fitness: if success { 20.0 } else { 19.0 },
            evaluations: evals,
            generations: 5,
            wall_ms: 1.0,
            stop_reason: if success { "optimum" } else { "stall" }.into(),
        }
    }

    #[test]
    fn summary_selects_minimal_threshold_popsize() {
        let mut rows = Vec::new();
        // popsize 50: 4/20 succeed; popsize 100: 12/20; popsize 200: 19/20.
        for run in 0..20 {
            rows.push(synthetic_row(50, run, run < 4, 100 + run as u64));
            rows.push(synthetic_row(100, run, run < 12, 200 + run as u64));
            rows.push(synthetic_row(200, run, run < 19, 400 + run as u64));
        }
        let summary = summarize_rows(&rows, &[0.5, 0.9, 0.999]).unwrap();
        assert_eq!(summary.groups.len(), 1);
        let group = &summary.groups[0];
        assert_eq!(group.popsizes.len(), 3);
        assert!((group.popsizes[0].success_rate - 0.2).abs() < 1e-12);
        assert!((group.popsizes[1].success_rate - 0.6).abs() < 1e-12);

        let pick = |i: usize| group.thresholds[i].selection.as_ref();
        assert_eq!(pick(0).unwrap().popsize, 100);
        assert_eq!(pick(1).unwrap().popsize, 200);
        assert!(pick(2).is_none(), "no popsize reaches 99.9%");

        // Threshold statistics cover all 20 runs at the selected popsize:
        // evaluations 200..219 average 209.5.
        let sel = pick(0).unwrap();
        assert!((sel.evaluations.mean - 209.5).abs() < 1e-9);
        assert!((sel.success_rate - 0.6).abs() < 1e-12);
    }

    #[test]
    fn per_popsize_stats_cover_successful_runs_only() {
        let rows = vec![
            synthetic_row(50, 0, true, 100),
            synthetic_row(50, 1, false, 900),
            synthetic_row(50, 2, true, 200),
        ];
        let summary = summarize_rows(&rows, &DEFAULT_THRESHOLDS).unwrap();
        let stats = &summary.groups[0].popsizes[0];
        assert_eq!(stats.successes, 2);
        let evals = stats.evaluations.unwrap();
        assert!((evals.mean - 150.0).abs() < 1e-12);
        // Sample std of {100, 200}.
        assert!((evals.std - (50.0f64 * 2.0f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn single_run_groups_report_zero_std() {
        let rows = vec![synthetic_row(50, 0, true, 123)];
        let summary = summarize_rows(&rows, &[0.5]).unwrap();
        let sel = summary.groups[0].thresholds[0].selection.as_ref().unwrap();
        assert_eq!(sel.evaluations.mean, 123.0);
        assert_eq!(sel.evaluations.std, 0.0);
    }

    #[test]
    fn all_failures_leave_stats_empty() {
        let rows = vec![
            synthetic_row(50, 0, false, 100),
            synthetic_row(50, 1, false, 200),
        ];
        let summary = summarize_rows(&rows, &[0.5]).unwrap();
        let group = &summary.groups[0];
        assert!(group.popsizes[0].evaluations.is_none());
        assert!(group.thresholds[0].selection.is_none());
        let rendered = render_report(&summary);
        assert!(rendered.contains(">=  50% success: -"));
    }

    #[test]
    fn schema_mismatch_names_the_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(
            &path,
            "problem,algo,n,k,instance_id,popsize,run,seed,success,fitness,evaluations,generations,wall_ms,stop_reason\n",
        )
        .unwrap();
        match read_rows(&path) {
            Err(Error::Schema { column, .. }) => assert_eq!(column, "fitness"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn summarize_rejects_empty_input() {
        assert!(matches!(
            summarize_rows(&[], &DEFAULT_THRESHOLDS),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn report_mentions_every_popsize() {
        let rows = vec![
            synthetic_row(50, 0, true, 100),
            synthetic_row(100, 0, true, 300),
        ];
        let summary = summarize_rows(&rows, &DEFAULT_THRESHOLDS).unwrap();
        let report = render_report(&summary);
        assert!(report.contains("trap n=20 k=4"));
        assert!(report.contains("50"));
        assert!(report.contains("100"));
    }
}
