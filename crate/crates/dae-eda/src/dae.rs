//! The denoising autoencoder used as the probabilistic model.
//!
//! A single hidden layer with tied weights: the decoder matrix is the
//! transpose of the encoder's. Training corrupts each input with
//! salt-and-pepper noise and descends the cross-entropy between the
//! reconstruction and the *uncorrupted* input by minibatch gradient
//! descent. Sampling starts from uniform noise and repeatedly
//! corrupt-reconstructs; after a few steps the iterate lands near the
//! training distribution.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::{Bitstring, RealVector};
use crate::error::{Error, Result};
use crate::rng::RngState;

/// Logistic function, the activation for both layers.
pub fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Keeps `ln` finite when an activation saturates to exactly 0 or 1 in
/// floating point.
const LOG_CLAMP: f64 = 1e-12;

fn xent_term(x: f64, z: f64) -> f64 {
    let z = z.clamp(LOG_CLAMP, 1.0 - LOG_CLAMP);
    -(x * z.ln() + (1.0 - x) * (1.0 - z).ln())
}

/// Cross-entropy reconstruction error between an input and its
/// reconstruction, summed over components.
pub fn cross_entropy(x: &RealVector, z: &RealVector) -> Result<f64> {
    if x.len() != z.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: z.len(),
        });
    }
    Ok(x.values()
        .iter()
        .zip(z.values())
        .map(|(&x, &z)| xent_term(x, z))
        .sum())
}

/// Overwrite `round(rate * len)` distinct positions with fair-coin 0/1.
fn corrupt_in_place(values: &mut [f64], rate: f64, rng: &mut RngState) -> Result<()> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Domain(format!(
            "corruption rate {rate} outside [0, 1]"
        )));
    }
    let count = (rate * values.len() as f64).round() as usize;
    for pos in rand::seq::index::sample(rng, values.len(), count) {
        values[pos] = if rng.gen_bool(0.5) { 1.0 } else { 0.0 };
    }
    Ok(())
}

/// Salt-and-pepper corruption: exactly `round(rate * n)` positions, chosen
/// without replacement, are set to 0 or 1 by fair coin; the rest pass
/// through untouched.
pub fn corrupt(x: &RealVector, rate: f64, rng: &mut RngState) -> Result<RealVector> {
    let mut values = x.values().to_vec();
    corrupt_in_place(&mut values, rate, rng)?;
    // Inputs were in [0, 1] and overwrites are exactly 0 or 1.
    Ok(RealVector::from_unit_unchecked(values))
}

/// Training hyperparameters. `Default` gives the working configuration:
/// learning rate 0.2, batch size 100, corruption rate 0.1, convergence
/// ratio threshold 0.05, overfit threshold 0.1, a 90/10 train/validation
/// split, and at most 500 epochs.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub corruption_rate: f64,
    pub max_epochs: usize,
    /// Stop when the error improvement over the recent third of training
    /// falls below this ratio, both relative to the total reduction so far
    /// and relative to the current error.
    pub convergence_threshold: f64,
    /// Stop when train and validation error diverge relatively by this much.
    pub overfit_threshold: f64,
    pub validation_fraction: f64,
    /// Training error is monitored on a fixed subset of at most this many
    /// training examples, keeping checkpoint cost flat in the data size.
    pub monitor_subset_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.2,
            batch_size: 100,
            corruption_rate: 0.1,
            max_epochs: 500,
            convergence_threshold: 0.05,
            overfit_threshold: 0.1,
            validation_fraction: 0.1,
            monitor_subset_size: 100,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be in (0, 1), got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch size must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.corruption_rate) {
            return Err(Error::InvalidArgument(format!(
                "corruption rate must be in [0, 1], got {}",
                self.corruption_rate
            )));
        }
        if self.max_epochs == 0 {
            return Err(Error::InvalidArgument("max epochs must be positive".into()));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "validation fraction must be in (0, 1), got {}",
                self.validation_fraction
            )));
        }
        if self.monitor_subset_size == 0 {
            return Err(Error::InvalidArgument(
                "monitor subset size must be positive".into(),
            ));
        }
        if !(self.convergence_threshold.is_finite() && self.convergence_threshold > 0.0) {
            return Err(Error::InvalidArgument(
                "convergence threshold must be positive and finite".into(),
            ));
        }
        if !(self.overfit_threshold.is_finite() && self.overfit_threshold > 0.0) {
            return Err(Error::InvalidArgument(
                "overfit threshold must be positive and finite".into(),
            ));
        }
        Ok(())
    }
}

/// Why training ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainStop {
    /// Recent error improvement fell below the convergence threshold both
    /// relative to the total reduction and relative to the current error
    /// (or the error curve was flat).
    Converged,
    /// Validation error rose clearly above its running best: further
    /// epochs were fitting noise in the training split.
    Overfit,
    /// Epoch budget exhausted.
    MaxEpochs,
}

/// One monitoring checkpoint: corrupted-input reconstruction error on
/// the monitor subset and on the validation split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPoint {
    pub epoch: usize,
    pub train: f64,
    pub validation: f64,
}

/// Outcome of a training run.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub epochs_run: usize,
    pub stop_reason: TrainStop,
    pub error_history: Vec<ErrorPoint>,
}

/// The autoencoder parameters: encoder weights `w` (visible x hidden),
/// decoder tied to `w` transposed, and the two bias vectors.
#[derive(Debug, Clone)]
pub struct DaeModel {
    n: usize,
    m: usize,
    w: Array2<f64>,
    b_h: Array1<f64>,
    b_z: Array1<f64>,
}

impl DaeModel {
    /// Fresh model: weights i.i.d. uniform in `[-1/sqrt(n), 1/sqrt(n)]`,
    /// biases zero.
    pub fn init(n: usize, m: usize, rng: &mut RngState) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidArgument(format!(
                "model sizes must be positive, got n={n}, m={m}"
            )));
        }
        let scale = 1.0 / (n as f64).sqrt();
        let weights: Vec<f64> = (0..n * m)
            .map(|_| rng.gen::<f64>() * 2.0 * scale - scale)
            .collect();
        Ok(Self {
            n,
            m,
            w: Array2::from_shape_vec((n, m), weights).expect("shape matches draw count"),
            b_h: Array1::zeros(m),
            b_z: Array1::zeros(n),
        })
    }

    /// Visible (input) size.
    pub fn visible(&self) -> usize {
        self.n
    }

    /// Hidden layer size.
    pub fn hidden(&self) -> usize {
        self.m
    }

    /// Encode then decode one (possibly corrupted) input; returns the
    /// hidden activation and the reconstruction, both strictly inside
    /// (0, 1).
    pub fn forward(&self, x: &RealVector) -> Result<(RealVector, RealVector)> {
        if x.len() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "input length {} vs visible size {}",
                x.len(),
                self.n
            )));
        }
        let xv = ArrayView1::from(x.values());
        let h = (xv.dot(&self.w) + &self.b_h).mapv(sigmoid);
        let z = (h.dot(&self.w.t()) + &self.b_z).mapv(sigmoid);
        Ok((
            RealVector::from_unit_unchecked(h.to_vec()),
            RealVector::from_unit_unchecked(z.to_vec()),
        ))
    }

    /// Batch forward pass; rows are examples.
    fn forward_batch(&self, x: &ArrayView2<f64>) -> (Array2<f64>, Array2<f64>) {
        let h = (x.dot(&self.w) + &self.b_h).mapv(sigmoid);
        let z = (h.dot(&self.w.t()) + &self.b_z).mapv(sigmoid);
        (h, z)
    }

    fn batch_loss(&self, clean: &ArrayView2<f64>, z: &Array2<f64>) -> f64 {
        let rows = clean.nrows() as f64;
        clean
            .iter()
            .zip(z.iter())
            .map(|(&x, &z)| xent_term(x, z))
            .sum::<f64>()
            / rows
    }

    /// Per-example mean of the summed cross-entropy between each row of
    /// `clean` and its reconstruction from the matching row of `corrupted`.
    pub fn reconstruction_loss(
        &self,
        clean: &[RealVector],
        corrupted: &[RealVector],
    ) -> Result<f64> {
        let (clean, corrupted) = self.paired_matrices(clean, corrupted)?;
        let (_, z) = self.forward_batch(&corrupted.view());
        Ok(self.batch_loss(&clean.view(), &z))
    }

    /// Analytic gradient of [`DaeModel::reconstruction_loss`] with respect
    /// to the flat parameter vector of [`DaeModel::params`].
    ///
    /// With output delta `dz = z - x` and hidden delta
    /// `dh = (dz W) .* h .* (1 - h)`, the tied weight matrix accumulates
    /// both the encoder and the decoder contribution:
    /// `grad W = corrupted^T dh + dz^T h`, `grad b_h = dh`, `grad b_z = dz`,
    /// each averaged over the batch.
    pub fn loss_gradient(&self, clean: &[RealVector], corrupted: &[RealVector]) -> Result<Vec<f64>> {
        let (clean, corrupted) = self.paired_matrices(clean, corrupted)?;
        let (grad, _) = self.batch_gradient(&clean.view(), &corrupted.view());
        let mut flat = Vec::with_capacity(self.param_count());
        flat.extend(grad.w.iter());
        flat.extend(grad.b_h.iter());
        flat.extend(grad.b_z.iter());
        Ok(flat)
    }

    fn paired_matrices(
        &self,
        clean: &[RealVector],
        corrupted: &[RealVector],
    ) -> Result<(Array2<f64>, Array2<f64>)> {
        if clean.is_empty() || clean.len() != corrupted.len() {
            return Err(Error::ShapeMismatch(format!(
                "need equal nonzero batch sizes, got {} clean and {} corrupted",
                clean.len(),
                corrupted.len()
            )));
        }
        let to_matrix = |rows: &[RealVector]| -> Result<Array2<f64>> {
            let mut flat = Vec::with_capacity(rows.len() * self.n);
            for row in rows {
                if row.len() != self.n {
                    return Err(Error::ShapeMismatch(format!(
                        "example length {} vs visible size {}",
                        row.len(),
                        self.n
                    )));
                }
                flat.extend_from_slice(row.values());
            }
            Ok(Array2::from_shape_vec((rows.len(), self.n), flat)
                .expect("shape matches row count"))
        };
        Ok((to_matrix(clean)?, to_matrix(corrupted)?))
    }

    fn batch_gradient(
        &self,
        clean: &ArrayView2<f64>,
        corrupted: &ArrayView2<f64>,
    ) -> (Gradient, f64) {
        let rows = clean.nrows() as f64;
        let (h, z) = self.forward_batch(corrupted);
        let loss = self.batch_loss(clean, &z);
        let dz = &z - clean;
        let dh = dz.dot(&self.w) * &h * h.mapv(|v| 1.0 - v);
        let gw = (corrupted.t().dot(&dh) + dz.t().dot(&h)) / rows;
        let gbh = dh.mean_axis(Axis(0)).expect("nonempty batch");
        let gbz = dz.mean_axis(Axis(0)).expect("nonempty batch");
        (
            Gradient {
                w: gw,
                b_h: gbh,
                b_z: gbz,
            },
            loss,
        )
    }

    fn apply_gradient(&mut self, grad: &Gradient, learning_rate: f64) {
        self.w.scaled_add(-learning_rate, &grad.w);
        self.b_h.scaled_add(-learning_rate, &grad.b_h);
        self.b_z.scaled_add(-learning_rate, &grad.b_z);
    }

    /// One minibatch update: corrupt each example, reconstruct, and take a
    /// gradient step against the clean inputs. Returns the mean batch loss
    /// measured before the step.
    pub fn train_step(
        &mut self,
        batch: &[Bitstring],
        cfg: &TrainConfig,
        rng: &mut RngState,
    ) -> Result<f64> {
        cfg.validate()?;
        if batch.is_empty() {
            return Err(Error::InvalidArgument("empty training batch".into()));
        }
        let clean: Vec<RealVector> = batch.iter().map(Bitstring::to_reals).collect();
        let corrupted = clean
            .iter()
            .map(|x| corrupt(x, cfg.corruption_rate, rng))
            .collect::<Result<Vec<_>>>()?;
        let (clean, corrupted) = self.paired_matrices(&clean, &corrupted)?;
        let (grad, loss) = self.batch_gradient(&clean.view(), &corrupted.view());
        if !loss.is_finite() {
            return Err(Error::NonFinite("training loss diverged".into()));
        }
        self.apply_gradient(&grad, cfg.learning_rate);
        Ok(loss)
    }

    /// Reconstruction error measured the way training sees it: a corrupted
    /// copy of the data is reconstructed and scored against the clean
    /// targets, averaged per example. Callers fix the corruption up front
    /// so the error curve is deterministic given the parameters.
    fn monitor_error(&self, corrupted: &ArrayView2<f64>, clean: &ArrayView2<f64>) -> f64 {
        let (_, z) = self.forward_batch(corrupted);
        self.batch_loss(clean, &z)
    }

    /// Train until convergence, overfitting, or the epoch cap.
    ///
    /// The data is shuffled and split into a training set and a validation
    /// split of `round-down(validation_fraction * len)` (at least one)
    /// examples. Every second epoch, the corrupted-input reconstruction
    /// error (the quantity training minimizes, against a corruption drawn
    /// once up front) is measured on a fixed monitor subset of the
    /// training set and on the validation split. From epoch 10 on,
    /// training stops as converged when
    ///
    /// ```text
    /// (e[0.67 t] - e[t]) / (e[0] - e[t]) < convergence_threshold
    /// and
    /// (e[0.67 t] - e[t]) / e[t]          < convergence_threshold
    /// ```
    ///
    /// i.e. when the recent third of training contributed almost nothing,
    /// measured both against the total improvement so far and against the
    /// error still remaining; `e[0.67 t]` reads the latest checkpoint at
    /// or below epoch `0.67 t`, and a flat or rising error curve counts as
    /// converged. Either ratio alone misfires: the first by itself stops
    /// as soon as the large early drop (learning the per-bit marginals)
    /// dwarfs the slower phase in which the model is still picking up
    /// dependencies between variables, and the second by itself stops
    /// during a slow warm-up when hardly anything has been learned yet.
    /// Training stops as overfit when the validation error
    /// exceeds its running minimum by the overfit threshold (relative):
    /// a validation error that keeps improving never triggers the stop,
    /// no matter how far the training error runs ahead of it.
    pub fn train(
        &mut self,
        data: &[Bitstring],
        cfg: &TrainConfig,
        rng: &mut RngState,
    ) -> Result<TrainReport> {
        cfg.validate()?;
        if data.len() < 10 {
            return Err(Error::InsufficientData(format!(
                "training needs at least 10 examples for a usable validation split, got {}",
                data.len()
            )));
        }
        for x in data {
            if x.len() != self.n {
                return Err(Error::LengthMismatch {
                    expected: self.n,
                    got: x.len(),
                });
            }
        }

        // Shuffle once; the tail becomes the validation split and the head
        // of the training part doubles as the fixed monitor subset.
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.shuffle(rng);
        let n_val = ((cfg.validation_fraction * data.len() as f64).floor() as usize).max(1);
        let n_train = data.len() - n_val;
        let row = |i: usize| data[order[i]].to_reals().into_vec();

        let train_flat: Vec<f64> = (0..n_train).flat_map(row).collect();
        let train_clean = Array2::from_shape_vec((n_train, self.n), train_flat)
            .expect("shape matches row count");
        let val_flat: Vec<f64> = (n_train..data.len()).flat_map(row).collect();
        let validation = Array2::from_shape_vec((n_val, self.n), val_flat)
            .expect("shape matches row count");
        let monitor = train_clean.slice(ndarray::s![..n_train.min(cfg.monitor_subset_size), ..]);

        // Fixed corrupted copies for error measurement. Measuring against
        // fresh corruption every checkpoint would jitter the error curve
        // and let the convergence ratio trip on noise.
        let mut monitor_corrupted = monitor.to_owned();
        for mut row in monitor_corrupted.rows_mut() {
            corrupt_in_place(
                row.as_slice_mut().expect("contiguous row"),
                cfg.corruption_rate,
                rng,
            )?;
        }
        let mut validation_corrupted = validation.clone();
        for mut row in validation_corrupted.rows_mut() {
            corrupt_in_place(
                row.as_slice_mut().expect("contiguous row"),
                cfg.corruption_rate,
                rng,
            )?;
        }

        let batch_size = cfg.batch_size.min(n_train);
        let mut batch_order: Vec<usize> = (0..n_train).collect();
        let mut history: Vec<ErrorPoint> = Vec::new();
        let mut best_validation = f64::INFINITY;
        let record = |model: &Self, epoch: usize, history: &mut Vec<ErrorPoint>| {
            history.push(ErrorPoint {
                epoch,
                train: model.monitor_error(&monitor_corrupted.view(), &monitor),
                validation: model.monitor_error(&validation_corrupted.view(), &validation.view()),
            });
        };
        record(self, 0, &mut history);

        for epoch in 1..=cfg.max_epochs {
            batch_order.shuffle(rng);
            for chunk in batch_order.chunks(batch_size) {
                let mut clean = Array2::zeros((chunk.len(), self.n));
                for (r, &i) in chunk.iter().enumerate() {
                    clean.row_mut(r).assign(&train_clean.row(i));
                }
                let mut corrupted = clean.clone();
                for mut row in corrupted.rows_mut() {
                    corrupt_in_place(row.as_slice_mut().expect("contiguous row"), cfg.corruption_rate, rng)?;
                }
                let (grad, loss) = self.batch_gradient(&clean.view(), &corrupted.view());
                if !loss.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "training loss diverged at epoch {epoch}"
                    )));
                }
                self.apply_gradient(&grad, cfg.learning_rate);
            }

            if epoch % 2 != 0 {
                continue;
            }
            record(self, epoch, &mut history);
            let current = *history.last().expect("just recorded");
            best_validation = best_validation.min(current.validation);

            if epoch >= 10 {
                let target = 0.67 * epoch as f64;
                let past = history
                    .iter()
                    .rev()
                    .find(|p| p.epoch as f64 <= target)
                    .expect("epoch 0 always qualifies");
                let recent_improvement = past.train - current.train;
                let total_reduction = history[0].train - current.train;
                let converged = if current.train <= 1e-12 {
                    // The error has hit the floor; nothing left to learn.
                    true
                } else if recent_improvement <= 1e-12 {
                    // Flat or rising error: further epochs are clearly
                    // not helping.
                    true
                } else {
                    total_reduction > 1e-12
                        && recent_improvement / total_reduction < cfg.convergence_threshold
                        && recent_improvement / current.train < cfg.convergence_threshold
                };
                if converged {
                    return Ok(TrainReport {
                        epochs_run: epoch,
                        stop_reason: TrainStop::Converged,
                        error_history: history,
                    });
                }
            }
            if current.validation > best_validation * (1.0 + cfg.overfit_threshold) {
                return Ok(TrainReport {
                    epochs_run: epoch,
                    stop_reason: TrainStop::Overfit,
                    error_history: history,
                });
            }
        }
        Ok(TrainReport {
            epochs_run: cfg.max_epochs,
            stop_reason: TrainStop::MaxEpochs,
            error_history: history,
        })
    }

    /// Draw one sample: start from i.i.d. uniform noise and apply `steps`
    /// corrupt-reconstruct iterations. The result stays in `[0, 1]^n`;
    /// callers binarize it with [`crate::bits::binarize`].
    pub fn sample(&self, steps: usize, corruption_rate: f64, rng: &mut RngState) -> Result<RealVector> {
        if steps == 0 {
            return Err(Error::InvalidArgument(
                "sampling needs at least one step".into(),
            ));
        }
        let mut x = RealVector::from_unit_unchecked(
            (0..self.n).map(|_| rng.gen::<f64>()).collect(),
        );
        for _ in 0..steps {
            let corrupted = corrupt(&x, corruption_rate, rng)?;
            let (_, z) = self.forward(&corrupted)?;
            x = z;
        }
        Ok(x)
    }

    /// Marginal activation per visible bit, estimated as the mean of
    /// `count` samples before binarization.
    pub fn sample_marginals(
        &self,
        count: usize,
        steps: usize,
        corruption_rate: f64,
        rng: &mut RngState,
    ) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::InvalidArgument("need at least one sample".into()));
        }
        let mut sums = vec![0.0; self.n];
        for _ in 0..count {
            let x = self.sample(steps, corruption_rate, rng)?;
            for (s, v) in sums.iter_mut().zip(x.values()) {
                *s += v;
            }
        }
        Ok(sums.into_iter().map(|s| s / count as f64).collect())
    }

    fn param_count(&self) -> usize {
        self.n * self.m + self.m + self.n
    }

    /// Flat parameter vector: weights row-major, then hidden bias, then
    /// output bias. Layout matches [`DaeModel::loss_gradient`].
    pub fn params(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.param_count());
        flat.extend(self.w.iter());
        flat.extend(self.b_h.iter());
        flat.extend(self.b_z.iter());
        flat
    }

    /// Replace all parameters from a flat vector laid out as in
    /// [`DaeModel::params`].
    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                params.len()
            )));
        }
        if let Some(bad) = params.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("non-finite parameter {bad}")));
        }
        let (w, rest) = params.split_at(self.n * self.m);
        let (b_h, b_z) = rest.split_at(self.m);
        self.w = Array2::from_shape_vec((self.n, self.m), w.to_vec())
            .expect("length checked above");
        self.b_h = Array1::from_vec(b_h.to_vec());
        self.b_z = Array1::from_vec(b_z.to_vec());
        Ok(())
    }

    /// Debug dump of the full parameter set, line-oriented and versioned.
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        writeln!(out, "DAE 1 {} {}", self.n, self.m).unwrap();
        for row in self.w.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "W {}", line.join(" ")).unwrap();
        }
        let bh: Vec<String> = self.b_h.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "BH {}", bh.join(" ")).unwrap();
        let bz: Vec<String> = self.b_z.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "BZ {}", bz.join(" ")).unwrap();
        out
    }
}

struct Gradient {
    w: Array2<f64>,
    b_h: Array1<f64>,
    b_z: Array1<f64>,
}
