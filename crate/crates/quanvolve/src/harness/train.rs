//! Single training runs: data preparation, the epoch loop, metrics files.
//!
//! Per-epoch randomness is consumed in a fixed order (shuffle the epoch's
//! batch order, then draw each batch's activation slopes image by image),
//! and batch gradients are reduced sequentially over an order-preserving
//! parallel map, so a run is bit-reproducible for a given config and seed
//! regardless of thread count.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::config::{ChannelSelect, ExperimentConfig};
use super::model::HybridModel;
use super::HarnessError;
use crate::colorspace::{to_angle_tensor, ColorSpace, ImageTensor};
use crate::data::{
    cache_file_name, load_cifar10_binary, make_split, read_cache, write_cache, Split,
    DEFAULT_CLASSES,
};
use crate::nn::{sample_slopes, AdamState};
use crate::seeds::{stream_rng, STREAM_INIT, STREAM_TRAIN};
use crate::templates::build_template;

/// Deterministic per-epoch metrics file, written into the run directory.
pub const METRICS_FILE: &str = "metrics.csv";
/// Human-oriented summary (includes wall-clock time, so not deterministic).
pub const SUMMARY_FILE: &str = "run_summary.txt";
/// Images are resized to this edge length before encoding.
pub const INPUT_EDGE: usize = 10;

/// One epoch's aggregate numbers. Train loss and accuracy are averaged
/// over the epoch's training batches (training-mode forward passes);
/// test loss and accuracy come from a full evaluation-mode pass.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub test_loss: f64,
    pub test_acc: f64,
}

/// Everything a finished run reports.
#[derive(Debug, Clone)]
pub struct RunMetrics {
    /// The config serialized as `key = value` lines.
    pub config_echo: String,
    pub epochs: Vec<EpochMetrics>,
    pub final_test_accuracy: f64,
    pub wall_clock_seconds: f64,
    /// Optimizer steps actually taken.
    pub adam_steps: u64,
    /// Circuit evaluations per image forward pass (one per window).
    pub circuit_evals_per_image: usize,
}

impl RunMetrics {
    /// Renders the deterministic per-epoch CSV
    /// (`epoch,train_loss,train_acc,test_loss,test_acc`). Floats use
    /// Rust's shortest round-trip formatting, so equal runs produce
    /// byte-equal files.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,train_acc,test_loss,test_acc\n");
        for e in &self.epochs {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.epoch, e.train_loss, e.train_acc, e.test_loss, e.test_acc
            ));
        }
        out
    }

    /// Renders the human-oriented run summary.
    pub fn summary_text(&self) -> String {
        format!(
            "final_test_accuracy = {}\nadam_steps = {}\ncircuit_evals_per_image = {}\n\
             wall_clock_seconds = {:.3}\n\n[config]\n{}",
            self.final_test_accuracy,
            self.adam_steps,
            self.circuit_evals_per_image,
            self.wall_clock_seconds,
            self.config_echo
        )
    }
}

/// A preprocessed split: angle tensors (all three channels) plus labels.
pub type PreparedSplit = (Vec<ImageTensor>, Vec<u8>);

/// Loads or builds the preprocessed train/test tensors for one color
/// space and seed.
///
/// Looks for cache files under `<data_dir>/cache` first; on a miss,
/// reads the raw batch files, draws the seeded class-balanced split,
/// runs the full preprocessing pipeline, and caches the result. Cache
/// write failures are reported to stderr but do not fail the run, since
/// the tensors are already in memory.
pub fn prepare_data(
    data_dir: &Path,
    space: ColorSpace,
    seed: u64,
) -> Result<(PreparedSplit, PreparedSplit), HarnessError> {
    let cache_dir = data_dir.join("cache");
    let path_of = |split: Split| {
        cache_dir.join(cache_file_name(space, seed, INPUT_EDGE, INPUT_EDGE, split))
    };
    if let (Ok(train), Ok(test)) = (
        read_cache(&path_of(Split::Train), space),
        read_cache(&path_of(Split::Test), space),
    ) {
        return Ok((train, test));
    }

    let raw = load_cifar10_binary(data_dir)?;
    let (train_set, test_set) = make_split(&raw, DEFAULT_CLASSES, seed)?;
    let convert = |images: &[ImageTensor]| -> Result<Vec<ImageTensor>, HarnessError> {
        images
            .par_iter()
            .map(|img| to_angle_tensor(img, space, INPUT_EDGE, INPUT_EDGE).map_err(Into::into))
            .collect()
    };
    let train = (convert(train_set.images())?, train_set.labels().to_vec());
    let test = (convert(test_set.images())?, test_set.labels().to_vec());

    let cache = || -> Result<(), crate::data::DataError> {
        fs::create_dir_all(&cache_dir).map_err(|e| crate::data::DataError::Io {
            path: cache_dir.clone(),
            source: e,
        })?;
        write_cache(&path_of(Split::Train), space, &train.0, &train.1)?;
        write_cache(&path_of(Split::Test), space, &test.0, &test.1)?;
        Ok(())
    };
    if let Err(e) = cache() {
        eprintln!("warning: preprocessing cache not written: {e}");
    }
    Ok((train, test))
}

/// Extracts the configured channel view from full three-channel tensors.
fn select_channel(
    images: &[ImageTensor],
    channel: ChannelSelect,
) -> Result<Vec<ImageTensor>, HarnessError> {
    match channel {
        ChannelSelect::All => Ok(images.to_vec()),
        ChannelSelect::Index(i) => images
            .iter()
            .map(|img| img.channel(usize::from(i)).map_err(Into::into))
            .collect(),
    }
}

/// The epoch loop over already-prepared tensors.
///
/// Exposed for tests that drive tiny in-memory datasets; [`train_run`]
/// is the full pipeline. `model` must already hold `params`.
pub(crate) fn train_loop(
    config: &ExperimentConfig,
    model: &mut HybridModel,
    params: &mut Vec<f64>,
    train: &PreparedSplit,
    test: &PreparedSplit,
) -> Result<(Vec<EpochMetrics>, u64), HarnessError> {
    let (train_images, train_labels) = train;
    let mut adam = AdamState::new(params.len(), config.learning_rate);
    let mut train_rng = stream_rng(config.seed, STREAM_TRAIN);
    let mut epochs = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        let mut order: Vec<usize> = (0..train_images.len()).collect();
        order.shuffle(&mut train_rng);

        let mut loss_sum = 0.0;
        let mut hit_sum = 0usize;
        for batch in order.chunks(config.batch_size) {
            let slopes: Vec<Vec<f64>> = batch
                .iter()
                .map(|_| sample_slopes(&mut train_rng, model.hidden_width()))
                .collect();
            let results: Vec<_> = batch
                .par_iter()
                .zip(slopes.par_iter())
                .map(|(&i, s)| model.loss_grad(&train_images[i], usize::from(train_labels[i]), s))
                .collect();

            let mut grad = vec![0.0; params.len()];
            for r in results {
                let sample = r?;
                loss_sum += sample.loss;
                hit_sum += usize::from(sample.correct);
                for (g, s) in grad.iter_mut().zip(&sample.grad) {
                    *g += s;
                }
            }
            let scale = 1.0 / batch.len() as f64;
            for g in &mut grad {
                *g *= scale;
            }
            adam.step(params, &grad)?;
            model.load_params(params)?;
        }

        let n_train = train_images.len() as f64;
        let (test_loss, test_acc) = evaluate(model, test)?;
        epochs.push(EpochMetrics {
            epoch,
            train_loss: loss_sum / n_train,
            train_acc: hit_sum as f64 / n_train,
            test_loss,
            test_acc,
        });
    }
    Ok((epochs, adam.step_count()))
}

/// Full evaluation-mode pass over a prepared split.
pub(crate) fn evaluate(
    model: &HybridModel,
    (images, labels): &PreparedSplit,
) -> Result<(f64, f64), HarnessError> {
    let results: Vec<_> = images
        .par_iter()
        .zip(labels.par_iter())
        .map(|(img, &label)| model.eval_one(img, usize::from(label)))
        .collect();
    let mut loss_sum = 0.0;
    let mut hits = 0usize;
    for r in results {
        let (loss, correct) = r?;
        loss_sum += loss;
        hits += usize::from(correct);
    }
    let n = images.len() as f64;
    Ok((loss_sum / n, hits as f64 / n))
}

/// Executes one full training run and writes its outputs.
///
/// Pipeline: prepare (or reuse cached) angle tensors for the config's
/// color space and seed, select the configured channel, build and
/// initialise the hybrid model, train for the configured epochs with a
/// test evaluation after each, then write `metrics.csv` (deterministic)
/// and `run_summary.txt` (includes timing) under
/// `<output_dir>/<run_name>/`.
pub fn train_run(config: &ExperimentConfig) -> Result<RunMetrics, HarnessError> {
    config.validate()?;
    let started = Instant::now();

    let (train_full, test_full) = prepare_data(&config.data_dir, config.color_space, config.seed)?;
    let train = (select_channel(&train_full.0, config.channel)?, train_full.1);
    let test = (select_channel(&test_full.0, config.channel)?, test_full.1);

    let template = build_template(config.template, config.channel_mode());
    let mut model = HybridModel::new(
        template,
        config.stride,
        INPUT_EDGE,
        INPUT_EDGE,
        config.hidden_width,
    )?;
    let mut params = model.init_params(&mut stream_rng(config.seed, STREAM_INIT));
    model.load_params(&params)?;

    let (epochs, adam_steps) = train_loop(config, &mut model, &mut params, &train, &test)?;
    let final_test_accuracy = match epochs.last() {
        Some(last) => last.test_acc,
        None => evaluate(&model, &test)?.1,
    };

    let metrics = RunMetrics {
        config_echo: config.echo(),
        epochs,
        final_test_accuracy,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        adam_steps,
        circuit_evals_per_image: model.feature_len(),
    };
    write_outputs(config, &metrics)?;
    Ok(metrics)
}

/// The directory a config's outputs land in.
pub fn run_dir(config: &ExperimentConfig) -> PathBuf {
    config.output_dir.join(config.run_name())
}

fn write_outputs(config: &ExperimentConfig, metrics: &RunMetrics) -> Result<(), HarnessError> {
    let dir = run_dir(config);
    fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
    let metrics_path = dir.join(METRICS_FILE);
    fs::write(&metrics_path, metrics.metrics_csv())
        .map_err(|e| HarnessError::io(metrics_path, e))?;
    let summary_path = dir.join(SUMMARY_FILE);
    fs::write(&summary_path, metrics.summary_text())
        .map_err(|e| HarnessError::io(summary_path, e))?;
    Ok(())
}
