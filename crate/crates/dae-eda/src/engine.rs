//! The generational optimization loop shared by both model types.
//!
//! Each generation: select parents by pairwise tournament, fit the
//! probabilistic model to them, sample fresh candidates from the model,
//! and merge parents and candidates into the next population. The
//! autoencoder variant trains a brand-new network every generation; the
//! PBIL variant keeps one probability vector and resamples the whole
//! population. Runs stop on hitting the known optimum, on a generation
//! cap, or after a stretch of generations without improvement.

use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::bits::{binarize, Bitstring};
use crate::dae::{DaeModel, TrainConfig};
use crate::error::{Error, Result};
use crate::pbil::ProbabilityVector;
use crate::population::{Individual, Population};
use crate::problems::Problem;
use crate::rng::{RngState, Stream};
use crate::selection::tournament_select;

/// Autoencoder-specific knobs on top of [`TrainConfig`].
#[derive(Debug, Clone)]
pub struct DaeSettings {
    pub train: TrainConfig,
    /// Corrupt-reconstruct iterations per sample.
    pub sample_steps: usize,
    /// Hidden layer size; `None` uses the problem size.
    pub hidden: Option<usize>,
}

impl Default for DaeSettings {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            sample_steps: 10,
            hidden: None,
        }
    }
}

/// PBIL-specific knobs.
#[derive(Debug, Clone)]
pub struct PbilSettings {
    pub learning_rate: f64,
    /// Number of top individuals whose mean drives the update.
    pub mu: usize,
}

impl Default for PbilSettings {
    fn default() -> Self {
        Self {
            learning_rate: 0.02,
            mu: 1,
        }
    }
}

/// Which probabilistic model the loop fits each generation.
#[derive(Debug, Clone)]
pub enum ModelConfig {
    Dae(DaeSettings),
    Pbil(PbilSettings),
}

impl ModelConfig {
    /// Short identifier used in CSV output ("dae" or "pbil").
    pub fn algo_name(&self) -> &'static str {
        match self {
            ModelConfig::Dae(_) => "dae",
            ModelConfig::Pbil(_) => "pbil",
        }
    }
}

/// Full configuration of one optimization run.
#[derive(Debug, Clone)]
pub struct EdaConfig {
    pub popsize: usize,
    pub max_generations: usize,
    /// Stop once the best has failed to improve for more than this many
    /// consecutive generations.
    pub stall_generations: usize,
    pub model: ModelConfig,
    pub seed: u64,
}

impl EdaConfig {
    /// Autoencoder run with the working defaults: at most 100 generations,
    /// stall cutoff 20.
    pub fn dae(popsize: usize, seed: u64) -> Self {
        Self {
            popsize,
            max_generations: 100,
            stall_generations: 20,
            model: ModelConfig::Dae(DaeSettings::default()),
            seed,
        }
    }

    /// PBIL run with the working defaults: at most 2000 generations, stall
    /// cutoff 400. The budgets are larger because each PBIL generation is
    /// far cheaper than training an autoencoder.
    pub fn pbil(popsize: usize, seed: u64) -> Self {
        Self {
            popsize,
            max_generations: 2000,
            stall_generations: 400,
            model: ModelConfig::Pbil(PbilSettings::default()),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.popsize < 4 {
            return Err(Error::InvalidArgument(format!(
                "population size must be at least 4, got {}",
                self.popsize
            )));
        }
        if self.max_generations == 0 || self.stall_generations == 0 {
            return Err(Error::InvalidArgument(
                "generation and stall limits must be positive".into(),
            ));
        }
        match &self.model {
            ModelConfig::Dae(settings) => {
                settings.train.validate()?;
                if settings.sample_steps == 0 {
                    return Err(Error::InvalidArgument(
                        "sampling needs at least one step".into(),
                    ));
                }
                // Training needs 10 parent genomes and parents are half the
                // population rounded up.
                if self.popsize < 19 {
                    return Err(Error::InvalidArgument(format!(
                        "autoencoder training needs at least 10 parents, so popsize must be \
                         at least 19, got {}",
                        self.popsize
                    )));
                }
                if let Some(hidden) = settings.hidden {
                    if hidden == 0 {
                        return Err(Error::InvalidArgument(
                            "hidden size must be positive".into(),
                        ));
                    }
                }
            }
            ModelConfig::Pbil(settings) => {
                if !(settings.learning_rate > 0.0 && settings.learning_rate < 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "PBIL learning rate must be in (0, 1), got {}",
                        settings.learning_rate
                    )));
                }
                if settings.mu == 0 || settings.mu > self.popsize {
                    return Err(Error::InvalidArgument(format!(
                        "PBIL mu must be in 1..=popsize, got {}",
                        settings.mu
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// The known optimum was evaluated.
    Optimum,
    MaxGenerations,
    /// No improvement for more than the configured stall window.
    Stall,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StopReason::Optimum => "optimum",
            StopReason::MaxGenerations => "max-generations",
            StopReason::Stall => "stall",
        })
    }
}

/// Decide whether a run is over. Optimum wins over the generation cap,
/// which wins over the stall rule; the stall rule fires strictly *after*
/// the window is exhausted (21 stalled generations against a window of 20).
pub fn check_termination(
    generation: usize,
    max_generations: usize,
    stall: usize,
    stall_generations: usize,
    optimum_reached: bool,
) -> Option<StopReason> {
    if optimum_reached {
        Some(StopReason::Optimum)
    } else if generation >= max_generations {
        Some(StopReason::MaxGenerations)
    } else if stall > stall_generations {
        Some(StopReason::Stall)
    } else {
        None
    }
}

/// Result of a completed run.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub best_fitness: f64,
    pub best_genome: Bitstring,
    /// Every fitness-function call made during the run.
    pub evaluations: u64,
    /// Completed generations (0 if the initial population already
    /// contained the optimum).
    pub generations: usize,
    pub wall_ms: f64,
    pub success: bool,
    pub seed: u64,
    pub stop_reason: StopReason,
}

enum ModelState {
    Dae {
        settings: DaeSettings,
        /// Most recently trained network, kept for inspection.
        last: Option<DaeModel>,
    },
    Pbil {
        settings: PbilSettings,
        probabilities: ProbabilityVector,
    },
}

/// An optimization run driven one generation at a time.
///
/// [`run_eda`] wraps this to completion; the step interface exists so
/// interactive callers can watch a run unfold and inspect the population
/// and the current model between generations.
pub struct EdaRun {
    problem: Arc<dyn Problem>,
    cfg: EdaConfig,
    state: ModelState,
    population: Population,
    generation: usize,
    evaluations: u64,
    best: Individual,
    stall: usize,
    finished: Option<StopReason>,
    best_history: Vec<f64>,
    mean_history: Vec<f64>,
    candidates_per_generation: Vec<usize>,
}

impl EdaRun {
    /// Build and evaluate the initial random population. The full initial
    /// population is always evaluated, even if it happens to contain the
    /// optimum; the short-circuit applies only to later candidates.
    pub fn new(problem: Arc<dyn Problem>, cfg: EdaConfig) -> Result<Self> {
        cfg.validate()?;
        let n = problem.size();
        let mut rng = RngState::for_stream(cfg.seed, Stream::PopulationInit, &[]);
        let mut population = Population::random(n, cfg.popsize, &mut rng)?;
        let mut evaluations = 0u64;
        for member in population.members_mut() {
            let fitness = problem.evaluate(member.genome())?;
            member.set_fitness(fitness)?;
            evaluations += 1;
        }
        let (_, best) = population.best()?;
        let best = best.clone();
        // Success is defined on cached fitness values so detecting it never
        // costs an extra (uncounted) fitness call.
        let optimum_reached = best.fitness().ok_or(Error::Unevaluated)? >= problem.optimum();
        let state = match &cfg.model {
            ModelConfig::Dae(settings) => ModelState::Dae {
                settings: settings.clone(),
                last: None,
            },
            ModelConfig::Pbil(settings) => ModelState::Pbil {
                settings: settings.clone(),
                probabilities: ProbabilityVector::uniform(n)?,
            },
        };
        let mut run = Self {
            problem,
            cfg,
            state,
            generation: 0,
            evaluations,
            best_history: Vec::new(),
            mean_history: Vec::new(),
            candidates_per_generation: Vec::new(),
            stall: 0,
            finished: None,
            best: best.clone(),
            population,
        };
        run.record_history()?;
        if optimum_reached {
            run.finished = Some(StopReason::Optimum);
        }
        Ok(run)
    }

    fn record_history(&mut self) -> Result<()> {
        self.best_history
            .push(self.best.fitness().ok_or(Error::Unevaluated)?);
        self.mean_history.push(self.population.mean_fitness()?);
        Ok(())
    }

    /// Advance one generation. Returns the stop reason once the run is
    /// over; stepping a finished run is an error.
    pub fn step(&mut self) -> Result<Option<StopReason>> {
        if let Some(reason) = self.finished {
            return Err(Error::InvalidArgument(format!(
                "run already finished ({reason})"
            )));
        }
        let gen_index = self.generation as u64;
        // When a sampled candidate hits the optimum the run is over and the
        // next population is never assembled: the candidate is recorded here
        // and the previous (full) population stays in place, so the
        // population always holds exactly `popsize` members.
        let mut found: Option<Individual> = None;
        let mut candidates_evaluated = 0usize;

        match &mut self.state {
            ModelState::Dae { settings, last } => {
                let mut select_rng =
                    RngState::for_stream(self.cfg.seed, Stream::Selection, &[gen_index]);
                let parents = tournament_select(&self.population, &mut select_rng)?;
                let genomes: Vec<Bitstring> =
                    parents.iter().map(|i| i.genome().clone()).collect();

                let n = self.problem.size();
                let hidden = settings.hidden.unwrap_or(n);
                let mut train_rng =
                    RngState::for_stream(self.cfg.seed, Stream::ModelTrain, &[gen_index]);
                let mut model = DaeModel::init(n, hidden, &mut train_rng)?;
                model.train(&genomes, &settings.train, &mut train_rng)?;

                let mut sample_rng =
                    RngState::for_stream(self.cfg.seed, Stream::ModelSample, &[gen_index]);
                let wanted = self.cfg.popsize / 2;
                let steps = settings.sample_steps;
                let corruption = settings.train.corruption_rate;
                *last = Some(model);
                let model = last.as_ref().expect("just stored");

                let mut next = parents;
                for _ in 0..wanted {
                    let real = model.sample(steps, corruption, &mut sample_rng)?;
                    let genome = binarize(&real, &mut sample_rng);
                    let fitness = self.problem.evaluate(&genome)?;
                    self.evaluations += 1;
                    candidates_evaluated += 1;
                    let individual = Individual::evaluated(genome, fitness)?;
                    if fitness >= self.problem.optimum() {
                        found = Some(individual);
                        break;
                    }
                    next.push(individual)?;
                }
                if found.is_none() {
                    self.population = next;
                }
            }
            ModelState::Pbil {
                settings,
                probabilities,
            } => {
                let top = self.population.fittest_indices(settings.mu)?;
                let best_genomes: Vec<Bitstring> = top
                    .into_iter()
                    .map(|i| self.population.members()[i].genome().clone())
                    .collect();
                probabilities.update(&best_genomes, settings.learning_rate)?;

                let mut sample_rng =
                    RngState::for_stream(self.cfg.seed, Stream::ModelSample, &[gen_index]);
                let mut next = Vec::with_capacity(self.cfg.popsize);
                for _ in 0..self.cfg.popsize {
                    let genome = probabilities.sample(&mut sample_rng);
                    let fitness = self.problem.evaluate(&genome)?;
                    self.evaluations += 1;
                    candidates_evaluated += 1;
                    let individual = Individual::evaluated(genome, fitness)?;
                    if fitness >= self.problem.optimum() {
                        found = Some(individual);
                        break;
                    }
                    next.push(individual);
                }
                if found.is_none() {
                    self.population = Population::new(next)?;
                }
            }
        }

        self.generation += 1;
        self.candidates_per_generation.push(candidates_evaluated);

        let gen_best = match &found {
            Some(individual) => individual.clone(),
            None => self.population.best()?.1.clone(),
        };
        let improved = match (gen_best.fitness(), self.best.fitness()) {
            (Some(new), Some(old)) => new > old,
            _ => return Err(Error::Unevaluated),
        };
        if improved {
            self.best = gen_best;
            self.stall = 0;
        } else {
            self.stall += 1;
        }
        self.record_history()?;

        self.finished = check_termination(
            self.generation,
            self.cfg.max_generations,
            self.stall,
            self.cfg.stall_generations,
            found.is_some(),
        );
        Ok(self.finished)
    }

    /// Step until the run terminates.
    pub fn run_to_end(&mut self) -> Result<StopReason> {
        while self.finished.is_none() {
            self.step()?;
        }
        Ok(self.finished.expect("loop exits only when finished"))
    }

    pub fn problem(&self) -> &dyn Problem {
        self.problem.as_ref()
    }

    pub fn config(&self) -> &EdaConfig {
        &self.cfg
    }

    /// Completed generations.
    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Best individual seen so far (not necessarily in the population for
    /// PBIL, which resamples wholesale).
    pub fn best(&self) -> &Individual {
        &self.best
    }

    /// Current population; always exactly `popsize` members. When a run
    /// ends because a sampled candidate hit the optimum, this is the last
    /// complete population (the interrupted one is never assembled).
    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn finished(&self) -> Option<StopReason> {
        self.finished
    }

    /// Running best fitness after the initial population and after each
    /// generation; non-decreasing by construction.
    pub fn best_history(&self) -> &[f64] {
        &self.best_history
    }

    /// Population mean fitness over the same checkpoints.
    pub fn mean_history(&self) -> &[f64] {
        &self.mean_history
    }

    /// Candidates evaluated in each completed generation; together with
    /// the initial population this accounts for every fitness call:
    /// `evaluations = popsize + sum(candidates_per_generation)`.
    pub fn candidates_per_generation(&self) -> &[usize] {
        &self.candidates_per_generation
    }

    /// The autoencoder trained in the most recent generation, if any.
    pub fn last_model(&self) -> Option<&DaeModel> {
        match &self.state {
            ModelState::Dae { last, .. } => last.as_ref(),
            ModelState::Pbil { .. } => None,
        }
    }

    /// The PBIL probability vector, if this is a PBIL run.
    pub fn probabilities(&self) -> Option<&ProbabilityVector> {
        match &self.state {
            ModelState::Pbil { probabilities, .. } => Some(probabilities),
            ModelState::Dae { .. } => None,
        }
    }

    fn into_record(self, wall_ms: f64) -> Result<RunRecord> {
        let stop_reason = self.finished.ok_or_else(|| {
            Error::InvalidArgument("run has not finished".into())
        })?;
        let best_fitness = self.best.fitness().ok_or(Error::Unevaluated)?;
        Ok(RunRecord {
            best_fitness,
            success: best_fitness >= self.problem.optimum(),
            best_genome: self.best.genome().clone(),
            evaluations: self.evaluations,
            generations: self.generation,
            wall_ms,
            seed: self.cfg.seed,
            stop_reason,
        })
    }
}

/// Run to completion and time it. Identical configuration and seed give an
/// identical record except for `wall_ms`.
pub fn run_eda(problem: Arc<dyn Problem>, cfg: EdaConfig) -> Result<RunRecord> {
    let start = Instant::now();
    let mut run = EdaRun::new(problem, cfg)?;
    run.run_to_end()?;
    let wall_ms = start.elapsed().as_secs_f64() * 1000.0;
    run.into_record(wall_ms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::test_support::OneMax;
    use crate::problems::{ConcatenatedTraps, NkLandscape, NkSolution};

    fn identity_nk(n: usize) -> Arc<dyn Problem> {
        let inst = NkLandscape::from_parts(vec![Vec::new(); n], vec![vec![0.0, 1.0]; n], 0)
            .unwrap()
            .with_optimum(NkSolution {
                genome: Bitstring::filled(n, true).unwrap(),
                fitness: 1.0,
            })
            .unwrap();
        Arc::new(inst)
    }

    #[test]
    fn termination_rules() {
        use StopReason::*;
        assert_eq!(check_termination(100, 100, 0, 20, false), Some(MaxGenerations));
        assert_eq!(check_termination(5, 100, 21, 20, false), Some(Stall));
        assert_eq!(check_termination(5, 100, 20, 20, false), None);
        assert_eq!(check_termination(5, 100, 20, 20, true), Some(Optimum));
        assert_eq!(check_termination(100, 100, 21, 20, true), Some(Optimum));
    }

    #[test]
    fn dae_solves_the_separable_surrogate() {
        // NK with k=0 identity tables is just counting ones; the
        // autoencoder engine should find all-ones well within budget.
        let problem = identity_nk(20);
        let record = run_eda(problem, EdaConfig::dae(200, 11)).unwrap();
        assert!(record.success, "stopped by {}", record.stop_reason);
        assert_eq!(record.stop_reason, StopReason::Optimum);
        assert_eq!(record.best_fitness, 1.0);
        assert!(record.evaluations <= 20_000, "{} evaluations", record.evaluations);
    }

    #[test]
    fn pbil_solves_onemax() {
        let problem: Arc<dyn Problem> = Arc::new(OneMax { n: 12 });
        let record = run_eda(problem, EdaConfig::pbil(50, 3)).unwrap();
        assert!(record.success);
        assert_eq!(record.best_genome.to_string(), "111111111111");
    }

    #[test]
    fn identical_seeds_give_identical_records() {
        let problem: Arc<dyn Problem> = Arc::new(ConcatenatedTraps::new(4, 2).unwrap());
        let a = run_eda(problem.clone(), EdaConfig::dae(40, 7)).unwrap();
        let b = run_eda(problem, EdaConfig::dae(40, 7)).unwrap();
        assert_eq!(a.best_fitness, b.best_fitness);
        assert_eq!(a.best_genome, b.best_genome);
        assert_eq!(a.evaluations, b.evaluations);
        assert_eq!(a.generations, b.generations);
        assert_eq!(a.success, b.success);
        assert_eq!(a.stop_reason, b.stop_reason);
    }

    #[test]
    fn stall_rule_fires_on_a_flat_landscape() {
        // Constant tables, no stored optimum: fitness never improves and
        // success is impossible, so the run stalls out after window + 1
        // fruitless generations.
        let flat = NkLandscape::from_parts(vec![Vec::new(); 6], vec![vec![0.5, 0.5]; 6], 0).unwrap();
        let mut cfg = EdaConfig::pbil(20, 5);
        cfg.stall_generations = 5;
        let record = run_eda(Arc::new(flat), cfg).unwrap();
        assert_eq!(record.stop_reason, StopReason::Stall);
        assert_eq!(record.generations, 6);
        assert!(!record.success);
        assert_eq!(record.evaluations, 20 * 7); // init + 6 generations
    }

    #[test]
    fn generation_cap_bounds_the_run() {
        let hard = Arc::new(NkLandscape::generate(16, 4, 2).unwrap());
        let mut cfg = EdaConfig::pbil(30, 9);
        cfg.max_generations = 3;
        let record = run_eda(hard, cfg).unwrap();
        assert_eq!(record.stop_reason, StopReason::MaxGenerations);
        assert_eq!(record.generations, 3);
        assert_eq!(record.evaluations, 30 * 4);
    }

    #[test]
    fn stepping_maintains_the_engine_invariants() {
        let problem: Arc<dyn Problem> = Arc::new(ConcatenatedTraps::new(4, 3).unwrap());
        let mut run = EdaRun::new(problem, EdaConfig::dae(30, 13)).unwrap();
        assert_eq!(run.population().len(), 30);
        assert_eq!(run.evaluations(), 30);
        while run.finished().is_none() {
            let before_best = run.best().fitness().unwrap();
            run.step().unwrap();
            assert!(run.best().fitness().unwrap() >= before_best);
            // The size never drifts, not even when a sampled optimum ends
            // the final generation early.
            assert_eq!(run.population().len(), 30);
        }
        let total: usize = run.candidates_per_generation().iter().sum();
        assert_eq!(run.evaluations(), 30 + total as u64);
        assert_eq!(run.best_history().len(), run.generation() + 1);
        let monotone = run
            .best_history()
            .windows(2)
            .all(|w| w[1] >= w[0]);
        assert!(monotone);
        // Stepping past the end is rejected.
        assert!(run.step().is_err());
    }

    #[test]
    fn optimum_found_mid_sampling_keeps_the_last_complete_population() {
        let problem: Arc<dyn Problem> = Arc::new(OneMax { n: 12 });
        let mut run = EdaRun::new(problem, EdaConfig::pbil(50, 3)).unwrap();
        assert_eq!(run.run_to_end().unwrap(), StopReason::Optimum);
        assert!(run.generation() >= 1);
        // The winning candidate cut its sampling batch short ...
        let last = *run.candidates_per_generation().last().unwrap();
        assert!(last < 50, "final generation sampled the full batch");
        // ... and the interrupted batch never replaced the population, so
        // the best lives outside it and every member scores below it.
        assert_eq!(run.population().len(), 50);
        assert_eq!(run.best().fitness(), Some(12.0));
        assert!(run
            .population()
            .members()
            .iter()
            .all(|m| m.fitness().unwrap() < 12.0));
    }

    #[test]
    fn dae_rejects_populations_too_small_to_train() {
        let problem: Arc<dyn Problem> = Arc::new(OneMax { n: 8 });
        assert!(matches!(
            EdaRun::new(problem, EdaConfig::dae(10, 1)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn config_validation_catches_bad_settings() {
        assert!(EdaConfig::pbil(3, 1).validate().is_err());
        let mut cfg = EdaConfig::pbil(20, 1);
        if let ModelConfig::Pbil(p) = &mut cfg.model {
            p.mu = 21;
        }
        assert!(cfg.validate().is_err());
        let mut cfg = EdaConfig::dae(50, 1);
        cfg.max_generations = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn optimal_initial_population_finishes_without_stepping() {
        // A 4-bit OneMax with 60 random individuals virtually always
        // contains 1111; seed chosen so it does.
        let problem: Arc<dyn Problem> = Arc::new(OneMax { n: 4 });
        let record = run_eda(problem, EdaConfig::pbil(60, 2)).unwrap();
        assert_eq!(record.generations, 0);
        assert_eq!(record.evaluations, 60);
        assert!(record.success);
    }

    #[test]
    fn pbil_probabilities_drift_toward_the_best() {
        // n is large enough that no optimum shows up this early, so all
        // five generations actually update the probability vector.
        let problem: Arc<dyn Problem> = Arc::new(OneMax { n: 16 });
        let mut run = EdaRun::new(problem, EdaConfig::pbil(40, 21)).unwrap();
        for _ in 0..5 {
            run.step().unwrap();
        }
        assert!(run.finished().is_none());
        let probs = run.probabilities().unwrap().probabilities();
        let mean: f64 = probs.iter().sum::<f64>() / probs.len() as f64;
        assert!(mean > 0.5, "mean probability {mean} did not move up");
        assert!(run.last_model().is_none());
    }
}
