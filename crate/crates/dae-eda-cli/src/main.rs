//! Command-line front end: generate and solve NK instances, run a single
//! optimization, sweep population sizes, and render summary reports.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags or flag
//! combinations), 2 for runtime failures (I/O, solver limits, engine
//! errors).

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use dae_eda::engine::run_eda;
use dae_eda::problems::NkLandscape;
use dae_eda::sweep::{
    read_rows, run_sweep, summarize_rows, Algorithm, ProblemSpec, SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "dae-eda",
    version,
    about = "Denoising-autoencoder EDA: single runs, population-size sweeps, and NK instance tooling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random NK landscape and write it as a text instance file.
    GenNk {
        /// Number of variables.
        #[arg(long)]
        n: usize,
        /// Epistasis degree: each variable depends on k others.
        #[arg(long)]
        k: usize,
        /// Instance seed; (n, k, seed) fully determine the landscape.
        #[arg(long)]
        seed: u64,
        /// Output path for the instance file.
        #[arg(long)]
        out: PathBuf,
        /// Also solve the instance exactly and embed the optimum.
        #[arg(long)]
        solve: bool,
    },
    /// Solve an NK instance file exactly and print its optimum.
    SolveNk {
        /// Instance file to solve.
        file: PathBuf,
        /// Write the optimum back into the file as an OPT line.
        #[arg(long)]
        write: bool,
    },
    /// Run one optimization to completion and print the outcome.
    Run {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Optimizer: the DAE model or the univariate PBIL baseline.
        #[arg(long)]
        algo: Algorithm,
        /// Population size.
        #[arg(long)]
        popsize: usize,
        /// RNG seed; identical seeds reproduce identical runs.
        #[arg(long)]
        seed: u64,
    },
    /// Repeat runs across a population-size ladder, appending CSV rows.
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Optimizer: the DAE model or the univariate PBIL baseline.
        #[arg(long)]
        algo: Algorithm,
        /// Comma-separated population sizes (strictly increasing). Defaults
        /// to the doubling ladder 50, 100, ... for the chosen algorithm.
        #[arg(long, value_delimiter = ',')]
        popsizes: Option<Vec<usize>>,
        /// Runs per population size.
        #[arg(long, default_value_t = 20)]
        runs: usize,
        /// Base seed; per-run seeds derive from (seed, popsize, run).
        #[arg(long)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize a sweep CSV: success rates per population size and the
    /// minimal sizes clearing each success threshold.
    Report {
        /// Sweep CSV to summarize.
        input: PathBuf,
        /// Success-rate thresholds to select minimal population sizes for.
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.9])]
        thresholds: Vec<f64>,
        /// Also write the summary as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

/// Problem selection shared by `run` and `sweep`. Exactly the flags for
/// one family may be given.
#[derive(Args)]
struct ProblemArgs {
    /// Problem family.
    #[arg(long, value_parser = ["trap", "nk", "nk-file", "hiff"])]
    problem: String,
    /// Trap block size, or NK epistasis degree.
    #[arg(long)]
    k: Option<usize>,
    /// Number of trap blocks.
    #[arg(long)]
    blocks: Option<usize>,
    /// Scatter trap block membership across positions with this seed
    /// (default: blocks occupy contiguous positions).
    #[arg(long)]
    scatter_seed: Option<u64>,
    /// NK problem size.
    #[arg(long)]
    n: Option<usize>,
    /// NK instance seed (generated instances are solved exactly, so n is
    /// limited to exact-solver scale).
    #[arg(long)]
    instance_seed: Option<u64>,
    /// NK instance file to load instead of generating.
    #[arg(long)]
    file: Option<PathBuf>,
    /// HIFF level count; the problem has 2^levels variables.
    #[arg(long)]
    levels: Option<u32>,
}

impl ProblemArgs {
    /// Validate the flag combination and build the problem spec. Errors
    /// here are usage errors.
    fn to_spec(&self) -> Result<ProblemSpec, String> {
        // (flag name, whether it was given, which families accept it)
        let flags = [
            ("k", self.k.is_some(), &["trap", "nk"][..]),
            ("blocks", self.blocks.is_some(), &["trap"]),
            ("scatter-seed", self.scatter_seed.is_some(), &["trap"]),
            ("n", self.n.is_some(), &["nk"]),
            ("instance-seed", self.instance_seed.is_some(), &["nk"]),
            ("file", self.file.is_some(), &["nk-file"]),
            ("levels", self.levels.is_some(), &["hiff"]),
        ];
        for (flag, given, families) in flags {
            if given && !families.contains(&self.problem.as_str()) {
                return Err(format!(
                    "--{flag} does not apply to --problem {}",
                    self.problem
                ));
            }
        }
        fn need<T: Copy>(family: &str, flag: &str, value: Option<T>) -> Result<T, String> {
            value.ok_or_else(|| format!("--problem {family} requires --{flag}"))
        }
        match self.problem.as_str() {
            "trap" => Ok(ProblemSpec::Trap {
                k: need("trap", "k", self.k)?,
                blocks: need("trap", "blocks", self.blocks)?,
                scatter_seed: self.scatter_seed,
            }),
            "nk" => Ok(ProblemSpec::NkGenerate {
                n: need("nk", "n", self.n)?,
                k: need("nk", "k", self.k)?,
                seed: need("nk", "instance-seed", self.instance_seed)?,
            }),
            "nk-file" => Ok(ProblemSpec::NkFile {
                path: self
                    .file
                    .clone()
                    .ok_or_else(|| "--problem nk-file requires --file".to_string())?,
            }),
            "hiff" => Ok(ProblemSpec::Hiff {
                levels: need("hiff", "levels", self.levels)?,
            }),
            other => Err(format!("unknown problem family `{other}`")),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests arrive as "errors" but are not.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// Post-parse failures, split by exit code.
enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure::Runtime(err)
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::GenNk {
            n,
            k,
            seed,
            out,
            solve,
        } => gen_nk(n, k, seed, &out, solve).map_err(Into::into),
        Command::SolveNk { file, write } => solve_nk(&file, write).map_err(Into::into),
        Command::Run {
            problem,
            algo,
            popsize,
            seed,
        } => {
            let spec = problem.to_spec().map_err(Failure::Usage)?;
            run_once(&spec, algo, popsize, seed).map_err(Into::into)
        }
        Command::Sweep {
            problem,
            algo,
            popsizes,
            runs,
            seed,
            out,
        } => {
            let spec = problem.to_spec().map_err(Failure::Usage)?;
            let popsizes = popsizes.unwrap_or_else(|| algo.default_popsizes());
            let cfg = SweepConfig {
                problem: spec,
                algorithm: algo,
                popsizes,
                runs,
                base_seed: seed,
            };
            cfg.validate()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            sweep(&cfg, &out).map_err(Into::into)
        }
        Command::Report {
            input,
            thresholds,
            json,
        } => report(&input, &thresholds, json.as_deref()).map_err(Into::into),
    }
}

fn gen_nk(n: usize, k: usize, seed: u64, out: &std::path::Path, solve: bool) -> anyhow::Result<()> {
    let mut instance = NkLandscape::generate(n, k, seed)
        .with_context(|| format!("generating NK instance n={n} k={k} seed={seed}"))?;
    if solve {
        instance = instance.solved().context("solving generated instance")?;
    }
    instance.save(out)?;
    match instance.known_optimum() {
        Some(opt) => println!(
            "wrote {} (n={n}, k={k}, seed={seed}, optimum {:.6})",
            out.display(),
            opt.fitness
        ),
        None => println!("wrote {} (n={n}, k={k}, seed={seed}, unsolved)", out.display()),
    }
    Ok(())
}

fn solve_nk(file: &std::path::Path, write: bool) -> anyhow::Result<()> {
    // load() and save() already name the file in their errors.
    let instance = NkLandscape::load(file)?;
    let solution = instance
        .solve_exact()
        .with_context(|| format!("solving {}", file.display()))?;
    if let Some(stored) = instance.known_optimum() {
        if stored.genome != solution.genome || (stored.fitness - solution.fitness).abs() > 1e-9 {
            bail!(
                "stored OPT line disagrees with the exact solution: file says {} {:.17}, solver says {} {:.17}",
                stored.genome,
                stored.fitness,
                solution.genome,
                solution.fitness
            );
        }
    }
    println!("OPT {} {:.17}", solution.genome, solution.fitness);
    if write {
        let solved = instance.with_optimum(solution).context("attaching optimum")?;
        solved.save(file)?;
    }
    Ok(())
}

fn run_once(spec: &ProblemSpec, algo: Algorithm, popsize: usize, seed: u64) -> anyhow::Result<()> {
    let built = spec.build().context("building problem")?;
    let problem = Arc::clone(built.problem());
    let cfg = algo.config(popsize, seed);
    let record = run_eda(problem, cfg).context("running optimization")?;
    println!("problem      {} (n={})", built.problem().name(), built.n());
    println!("algo         {}", algo.name());
    println!("popsize      {popsize}");
    println!("seed         {seed}");
    println!("success      {}", record.success);
    println!("best         {:.6}", record.best_fitness);
    println!("genome       {}", record.best_genome);
    println!("evaluations  {}", record.evaluations);
    println!("generations  {}", record.generations);
    println!("stop         {}", record.stop_reason);
    println!("wall_ms      {:.1}", record.wall_ms);
    Ok(())
}

fn sweep(cfg: &SweepConfig, out: &std::path::Path) -> anyhow::Result<()> {
    let rows = run_sweep(cfg, out).context("running sweep")?;
    let successes = rows.iter().filter(|r| r.success).count();
    println!(
        "wrote {} rows to {} ({} successful)",
        rows.len(),
        out.display(),
        successes
    );
    Ok(())
}

fn report(
    input: &std::path::Path,
    thresholds: &[f64],
    json: Option<&std::path::Path>,
) -> anyhow::Result<()> {
    let rows = read_rows(input)?;
    let summary = summarize_rows(&rows, thresholds).context("summarizing")?;
    print!("{}", dae_eda::sweep::render_report(&summary));
    if let Some(path) = json {
        let doc = serde_json::to_string_pretty(&summary).context("encoding summary")?;
        std::fs::write(path, doc).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
