//! wasm-bindgen bindings for the browser demo.
//!
//! The page drives one optimization run on a concatenated-trap problem a
//! generation at a time and draws what the optimizer sees: the population
//! as a bitmap, the probabilistic model's per-bit marginals, and the
//! fitness trajectory. Three entry points are exposed:
//!
//! * [`DemoRun`] — construct a run, step it, and read its state,
//! * [`DemoRun::marginals`] — per-bit statistics of the current model,
//! * [`trap_block_curve`] — the single-block fitness curve that makes the
//!   problem deceptive.
//!
//! Everything is plain data across the boundary (numbers, strings,
//! numeric vectors), so the same API compiles and is tested natively.

use std::sync::Arc;

use wasm_bindgen::prelude::*;

use dae_eda::engine::{EdaConfig, EdaRun, ModelConfig};
use dae_eda::problems::{ConcatenatedTraps, Problem};
use dae_eda::rng::{derive_seed, RngState, Stream};

/// How many model samples back the marginal estimate for the DAE (PBIL
/// exposes its probability vector directly).
const MARGINAL_SAMPLES: usize = 200;

/// One interactive optimization run on a concatenated-trap problem.
#[wasm_bindgen]
pub struct DemoRun {
    run: EdaRun,
    optimum: f64,
    /// Demo-owned stream for marginal estimation, separate from the run's
    /// own RNG so inspecting the model never changes the run.
    inspect_rng: RngState,
}

#[wasm_bindgen]
impl DemoRun {
    /// Start a run of `algo` ("dae" or "pbil") on `blocks` traps of
    /// `trap_k` bits with the given population size and seed.
    #[wasm_bindgen(constructor)]
    pub fn new(
        algo: &str,
        trap_k: u32,
        blocks: u32,
        popsize: u32,
        seed: u32,
    ) -> Result<DemoRun, String> {
        let problem =
            ConcatenatedTraps::new(trap_k as usize, blocks as usize).map_err(|e| e.to_string())?;
        let optimum = problem.optimum();
        let cfg = match algo {
            "dae" => EdaConfig::dae(popsize as usize, seed as u64),
            "pbil" => EdaConfig::pbil(popsize as usize, seed as u64),
            other => return Err(format!("unknown algorithm `{other}`; use dae or pbil")),
        };
        let run = EdaRun::new(Arc::new(problem), cfg).map_err(|e| e.to_string())?;
        let inspect_rng = RngState::for_stream(derive_seed(seed as u64, &[]), Stream::Demo, &[]);
        Ok(DemoRun {
            run,
            optimum,
            inspect_rng,
        })
    }

    /// Advance one generation. Returns true once the run is finished;
    /// further calls are no-ops.
    pub fn step(&mut self) -> Result<bool, String> {
        if self.run.finished().is_some() {
            return Ok(true);
        }
        self.run.step().map_err(|e| e.to_string())?;
        Ok(self.run.finished().is_some())
    }

    pub fn generation(&self) -> u32 {
        self.run.generation() as u32
    }

    pub fn evaluations(&self) -> f64 {
        self.run.evaluations() as f64
    }

    pub fn best_fitness(&self) -> f64 {
        self.run.best().fitness().unwrap_or(f64::NAN)
    }

    pub fn optimum(&self) -> f64 {
        self.optimum
    }

    pub fn n(&self) -> u32 {
        self.run.problem().size() as u32
    }

    pub fn popsize(&self) -> u32 {
        self.run.config().popsize as u32
    }

    /// Why the run stopped, or the empty string while it is still going.
    pub fn stop_reason(&self) -> String {
        self.run
            .finished()
            .map(|r| r.to_string())
            .unwrap_or_default()
    }

    /// Best fitness after each completed generation (index 0 is the
    /// initial population).
    pub fn best_history(&self) -> Vec<f64> {
        self.run.best_history().to_vec()
    }

    /// Population mean fitness after each completed generation.
    pub fn mean_history(&self) -> Vec<f64> {
        self.run.mean_history().to_vec()
    }

    /// The population as a row-major 0/1 grid, `popsize()` rows of `n()`
    /// bits, sorted fittest first so structure is visible.
    pub fn population_bits(&self) -> Vec<u8> {
        let pop = self.run.population();
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| {
            let fa = pop.members()[a].fitness().unwrap_or(f64::NEG_INFINITY);
            let fb = pop.members()[b].fitness().unwrap_or(f64::NEG_INFINITY);
            fb.partial_cmp(&fa).unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut grid = Vec::with_capacity(pop.len() * pop.n());
        for i in order {
            grid.extend(
                pop.members()[i]
                    .genome()
                    .bits()
                    .iter()
                    .map(|&b| u8::from(b)),
            );
        }
        grid
    }

    /// The best genome found so far, as 0/1 bytes.
    pub fn best_bits(&self) -> Vec<u8> {
        self.run
            .best()
            .genome()
            .bits()
            .iter()
            .map(|&b| u8::from(b))
            .collect()
    }

    /// Per-bit one-probabilities of the current model: PBIL's probability
    /// vector, or sampling marginals of the generation's trained
    /// autoencoder. Empty before the first generation of a DAE run.
    pub fn marginals(&mut self) -> Result<Vec<f64>, String> {
        if let Some(p) = self.run.probabilities() {
            return Ok(p.probabilities().to_vec());
        }
        let Some(model) = self.run.last_model() else {
            return Ok(Vec::new());
        };
        let (steps, corruption) = match &self.run.config().model {
            ModelConfig::Dae(settings) => (settings.sample_steps, settings.train.corruption_rate),
            ModelConfig::Pbil(_) => unreachable!("probabilities() covers PBIL"),
        };
        model
            .sample_marginals(MARGINAL_SAMPLES, steps, corruption, &mut self.inspect_rng)
            .map_err(|e| e.to_string())
    }
}

/// Fitness contribution of a single `k`-bit trap block as a function of
/// its number of ones: decreasing toward the deceptive all-zeros corner,
/// with the jump to `k` at all ones.
#[wasm_bindgen]
pub fn trap_block_curve(k: u32) -> Result<Vec<f64>, String> {
    let trap = ConcatenatedTraps::new(k as usize, 1).map_err(|e| e.to_string())?;
    let k = k as usize;
    (0..=k)
        .map(|ones| {
            let bits: Vec<bool> = (0..k).map(|i| i < ones).collect();
            let x = dae_eda::Bitstring::new(bits).map_err(|e| e.to_string())?;
            trap.evaluate(&x).map_err(|e| e.to_string())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_curve_is_deceptive() {
        let curve = trap_block_curve(4).unwrap();
        assert_eq!(curve, vec![3.0, 2.0, 1.0, 0.0, 4.0]);
    }

    #[test]
    fn stepping_reports_progress() {
        // n = 12 keeps the optimum out of the initial random population,
        // so the first step really runs a generation.
        let mut demo = DemoRun::new("pbil", 3, 4, 16, 7).unwrap();
        assert_eq!(demo.generation(), 0);
        assert_eq!(demo.n(), 12);
        assert_eq!(demo.popsize(), 16);
        assert_eq!(demo.best_history().len(), 1);
        let finished = demo.step().unwrap();
        assert_eq!(demo.generation(), 1);
        assert_eq!(demo.best_history().len(), 2);
        assert_eq!(demo.population_bits().len(), 16 * 12);
        assert_eq!(demo.best_bits().len(), 12);
        if finished {
            assert!(!demo.stop_reason().is_empty());
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let drive = |seed: u32| {
            let mut demo = DemoRun::new("dae", 3, 4, 24, seed).unwrap();
            for _ in 0..3 {
                if demo.step().unwrap() {
                    break;
                }
            }
            (
                demo.best_history().to_vec(),
                demo.population_bits(),
                demo.evaluations(),
            )
        };
        assert_eq!(drive(5), drive(5));
        assert_ne!(drive(5).0, drive(6).0, "different seeds, same trajectory");
    }

    #[test]
    fn marginals_match_the_model_kind() {
        let mut pbil = DemoRun::new("pbil", 3, 4, 16, 3).unwrap();
        // PBIL exposes its probability vector immediately, all 0.5 before
        // any update.
        assert_eq!(pbil.marginals().unwrap(), vec![0.5; 12]);

        let mut dae = DemoRun::new("dae", 3, 4, 24, 3).unwrap();
        assert!(dae.marginals().unwrap().is_empty(), "no model yet");
        dae.step().unwrap();
        let m = dae.marginals().unwrap();
        assert_eq!(m.len(), 12);
        assert!(m.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn inspection_does_not_perturb_the_run() {
        let drive = |inspect: bool| {
            let mut demo = DemoRun::new("dae", 3, 4, 24, 9).unwrap();
            for _ in 0..2 {
                if inspect {
                    let _ = demo.marginals().unwrap();
                }
                if demo.step().unwrap() {
                    break;
                }
            }
            demo.best_history().to_vec()
        };
        assert_eq!(drive(true), drive(false));
    }

    #[test]
    fn finished_runs_stay_finished() {
        let mut demo = DemoRun::new("pbil", 3, 3, 16, 1).unwrap();
        let mut guard = 0;
        while !demo.step().unwrap() {
            guard += 1;
            assert!(guard < 10_000, "run never terminated");
        }
        let gen = demo.generation();
        assert!(demo.step().unwrap(), "finished run reported unfinished");
        assert_eq!(demo.generation(), gen, "no-op step advanced the run");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(DemoRun::new("cmaes", 4, 5, 50, 1).is_err());
        assert!(DemoRun::new("dae", 0, 5, 50, 1).is_err());
        assert!(trap_block_curve(1).is_err());
    }
}
