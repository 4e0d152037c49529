//! The full benchmark sweep: every color-space channel against every
//! filter template, with per-cell baselines, resumption, and CSV output.
//!
//! The grid is 12 rows (R, G, B, L, A, B, Y, Cb, Cr, then the three
//! all-channel rows) by 8 template columns. Each finished cell leaves a
//! small marker file; re-running the sweep reuses markers and recomputes
//! only missing cells, so an interrupted sweep resumes where it stopped.
//! A failed cell is reported in the results and does not stop the sweep
//! (and leaves no marker, so a resume retries it).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::config::{ChannelSelect, ExperimentConfig};
use super::train::train_run;
use super::HarnessError;
use crate::colorspace::ColorSpace;
use crate::templates::TemplateKind;

/// The 12 sweep rows, in table order: each single channel of RGB, LAB,
/// and YCbCr, then one all-channels row per space.
pub const SWEEP_ROWS: [(ColorSpace, ChannelSelect); 12] = [
    (ColorSpace::Rgb01, ChannelSelect::Index(0)),
    (ColorSpace::Rgb01, ChannelSelect::Index(1)),
    (ColorSpace::Rgb01, ChannelSelect::Index(2)),
    (ColorSpace::Lab, ChannelSelect::Index(0)),
    (ColorSpace::Lab, ChannelSelect::Index(1)),
    (ColorSpace::Lab, ChannelSelect::Index(2)),
    (ColorSpace::Ycbcr, ChannelSelect::Index(0)),
    (ColorSpace::Ycbcr, ChannelSelect::Index(1)),
    (ColorSpace::Ycbcr, ChannelSelect::Index(2)),
    (ColorSpace::Rgb01, ChannelSelect::All),
    (ColorSpace::Lab, ChannelSelect::All),
    (ColorSpace::Ycbcr, ChannelSelect::All),
];

/// Baseline final accuracies for every sweep cell, recorded beside the
/// measured values in sweep reports for side-by-side comparison.
///
/// Rows follow [`SWEEP_ROWS`]; columns follow [`TemplateKind::ALL`].
pub const BASELINE_ACCURACY: [[f64; 8]; 12] = [
    [0.591, 0.656, 0.685, 0.665, 0.650, 0.715, 0.695, 0.710], // R
    [0.716, 0.704, 0.665, 0.690, 0.735, 0.710, 0.700, 0.780], // G
    [0.715, 0.686, 0.685, 0.700, 0.735, 0.795, 0.735, 0.795], // B
    [0.654, 0.671, 0.720, 0.715, 0.715, 0.810, 0.735, 0.705], // L
    [0.507, 0.522, 0.565, 0.565, 0.585, 0.760, 0.765, 0.775], // A
    [0.615, 0.637, 0.735, 0.735, 0.720, 0.705, 0.705, 0.695], // B (opponent axis)
    [0.687, 0.568, 0.685, 0.665, 0.690, 0.715, 0.670, 0.710], // Y
    [0.548, 0.568, 0.585, 0.590, 0.600, 0.605, 0.595, 0.570], // Cb
    [0.608, 0.569, 0.620, 0.630, 0.635, 0.675, 0.660, 0.665], // Cr
    [0.685, 0.680, 0.675, 0.680, 0.755, 0.770, 0.710, 0.725], // RGB
    [0.720, 0.680, 0.705, 0.690, 0.700, 0.700, 0.735, 0.665], // LAB
    [0.585, 0.649, 0.590, 0.615, 0.720, 0.740, 0.660, 0.645], // YCbCr
];

/// Baseline accuracy for one cell, if it is on the grid.
pub fn baseline_for(
    space: ColorSpace,
    channel: ChannelSelect,
    template: TemplateKind,
) -> Option<f64> {
    let row = SWEEP_ROWS.iter().position(|&r| r == (space, channel))?;
    let col = TemplateKind::ALL.iter().position(|&k| k == template)?;
    Some(BASELINE_ACCURACY[row][col])
}

/// Knobs for a sweep invocation.
#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// Training runs per cell; seeds are `base.seed + 0..repeats` and
    /// the cell reports their mean and sample standard deviation.
    pub repeats: usize,
    /// Cells trained concurrently. 0 runs cells sequentially (each run
    /// still parallelizes over its batch images); N bounds all sweep
    /// work to a dedicated N-thread pool.
    pub workers: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            repeats: 1,
            workers: 0,
        }
    }
}

/// Outcome of one sweep cell.
#[derive(Debug, Clone)]
pub struct SweepCellResult {
    pub space: ColorSpace,
    pub channel: ChannelSelect,
    pub template: TemplateKind,
    /// First seed of the cell's runs.
    pub base_seed: u64,
    pub repeats: usize,
    /// Mean final test accuracy over the repeats; NaN when failed.
    pub accuracy: f64,
    /// Sample standard deviation over the repeats (0 for one repeat).
    pub accuracy_std: f64,
    pub baseline: f64,
    pub runtime_seconds: f64,
    /// Whether this cell was reused from a previous sweep's marker.
    pub reused: bool,
    /// Failure message, if the cell did not finish.
    pub error: Option<String>,
}

impl SweepCellResult {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

/// A finished sweep: all cell outcomes plus where the CSVs landed.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub cells: Vec<SweepCellResult>,
    pub long_csv: PathBuf,
    pub table_csv: PathBuf,
}

impl SweepReport {
    pub fn completed(&self) -> usize {
        self.cells.iter().filter(|c| c.ok()).count()
    }

    pub fn failed(&self) -> usize {
        self.cells.len() - self.completed()
    }

    pub fn reused(&self) -> usize {
        self.cells.iter().filter(|c| c.reused).count()
    }
}

fn sweep_dir(base: &ExperimentConfig) -> PathBuf {
    base.output_dir.join("sweep")
}

fn cell_marker_path(base: &ExperimentConfig, row: usize, col: usize) -> PathBuf {
    let (space, channel) = SWEEP_ROWS[row];
    let template = TemplateKind::ALL[col];
    sweep_dir(base).join("cells").join(format!(
        "{}-{}-{}-s{}.csv",
        space.name(),
        channel.label(space),
        template,
        base.seed
    ))
}

/// Marker layout: a header line and one data line
/// (`accuracy,accuracy_std,runtime_seconds`).
fn read_marker(path: &Path) -> Option<(f64, f64, f64)> {
    let text = fs::read_to_string(path).ok()?;
    let line = text.lines().nth(1)?;
    let mut parts = line.split(',');
    let acc: f64 = parts.next()?.parse().ok()?;
    let std: f64 = parts.next()?.parse().ok()?;
    let runtime: f64 = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some((acc, std, runtime))
}

fn write_marker(path: &Path, acc: f64, std: f64, runtime: f64) -> Result<(), HarnessError> {
    let text = format!("accuracy,accuracy_std,runtime_seconds\n{acc},{std},{runtime}\n");
    fs::write(path, text).map_err(|e| HarnessError::io(path.to_path_buf(), e))
}

/// Mean and sample standard deviation.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn one_line(msg: String) -> String {
    msg.replace(['\n', ','], "; ")
}

fn run_cell(base: &ExperimentConfig, options: &SweepOptions, row: usize, col: usize) -> SweepCellResult {
    let (space, channel) = SWEEP_ROWS[row];
    let template = TemplateKind::ALL[col];
    let baseline = BASELINE_ACCURACY[row][col];
    let mut result = SweepCellResult {
        space,
        channel,
        template,
        base_seed: base.seed,
        repeats: options.repeats,
        accuracy: f64::NAN,
        accuracy_std: 0.0,
        baseline,
        runtime_seconds: 0.0,
        reused: false,
        error: None,
    };

    let marker = cell_marker_path(base, row, col);
    if let Some((acc, std, runtime)) = read_marker(&marker) {
        result.accuracy = acc;
        result.accuracy_std = std;
        result.runtime_seconds = runtime;
        result.reused = true;
        return result;
    }

    let started = Instant::now();
    let mut finals = Vec::with_capacity(options.repeats);
    for r in 0..options.repeats as u64 {
        let mut config = base.clone();
        config.color_space = space;
        config.channel = channel;
        config.template = template;
        config.seed = base.seed + r;
        match train_run(&config) {
            Ok(metrics) => finals.push(metrics.final_test_accuracy),
            Err(e) => {
                result.error = Some(one_line(format!("{} failed: {e}", config.run_name())));
                return result;
            }
        }
    }
    let (mean, std) = mean_std(&finals);
    result.accuracy = mean;
    result.accuracy_std = std;
    result.runtime_seconds = started.elapsed().as_secs_f64();
    if let Err(e) = write_marker(&marker, mean, std, result.runtime_seconds) {
        eprintln!("warning: sweep marker not written: {e}");
    }
    result
}

fn long_csv(cells: &[SweepCellResult]) -> String {
    let mut out = String::from(
        "space,channel,template,base_seed,repeats,accuracy,accuracy_std,baseline,runtime_seconds,status\n",
    );
    for c in cells {
        let (acc, std) = if c.ok() {
            (c.accuracy.to_string(), c.accuracy_std.to_string())
        } else {
            (String::new(), String::new())
        };
        let status = match &c.error {
            None => "ok".to_string(),
            Some(msg) => format!("failed: {msg}"),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            c.space.name(),
            c.channel.label(c.space),
            c.template,
            c.base_seed,
            c.repeats,
            acc,
            std,
            c.baseline,
            c.runtime_seconds,
            status
        ));
    }
    out
}

fn table_csv(cells: &[SweepCellResult]) -> String {
    let mut out = String::from("space,channel");
    for kind in TemplateKind::ALL {
        out.push(',');
        out.push_str(kind.name());
    }
    out.push('\n');
    for (row, &(space, channel)) in SWEEP_ROWS.iter().enumerate() {
        out.push_str(&format!("{},{}", space.name(), channel.label(space)));
        for col in 0..TemplateKind::ALL.len() {
            let cell = &cells[row * TemplateKind::ALL.len() + col];
            out.push(',');
            if cell.ok() {
                out.push_str(&cell.accuracy.to_string());
            }
        }
        out.push('\n');
    }
    out
}

/// Runs the full 12 x 8 sweep.
///
/// `base` supplies everything but the cell coordinates (data and output
/// directories, seed, epochs, and the rest of the protocol). Results
/// land under `<output_dir>/sweep/`: `results.csv` in long form with
/// baselines and status, `results_table.csv` as the accuracy grid, and
/// one marker per finished cell under `cells/` for resumption.
pub fn run_sweep(
    base: &ExperimentConfig,
    options: &SweepOptions,
) -> Result<SweepReport, HarnessError> {
    base.validate()?;
    if options.repeats == 0 {
        return Err(HarnessError::Config(super::ConfigError::Invalid(
            "sweep repeats must be at least 1".into(),
        )));
    }
    let dir = sweep_dir(base);
    let cells_dir = dir.join("cells");
    fs::create_dir_all(&cells_dir).map_err(|e| HarnessError::io(&cells_dir, e))?;

    // Warm the preprocessing caches up front: one pass per color space
    // and seed, so concurrent cells never race to write the same cache.
    for space in [ColorSpace::Rgb01, ColorSpace::Lab, ColorSpace::Ycbcr] {
        for r in 0..options.repeats as u64 {
            super::train::prepare_data(&base.data_dir, space, base.seed + r)?;
        }
    }

    let coords: Vec<(usize, usize)> = (0..SWEEP_ROWS.len())
        .flat_map(|row| (0..TemplateKind::ALL.len()).map(move |col| (row, col)))
        .collect();
    let cells: Vec<SweepCellResult> = if options.workers == 0 {
        coords
            .iter()
            .map(|&(row, col)| run_cell(base, options, row, col))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.workers)
            .build()
            .map_err(|e| HarnessError::Pool(e.to_string()))?;
        pool.install(|| {
            coords
                .par_iter()
                .map(|&(row, col)| run_cell(base, options, row, col))
                .collect()
        })
    };

    let long_path = dir.join("results.csv");
    fs::write(&long_path, long_csv(&cells)).map_err(|e| HarnessError::io(&long_path, e))?;
    let table_path = dir.join("results_table.csv");
    fs::write(&table_path, table_csv(&cells)).map_err(|e| HarnessError::io(&table_path, e))?;

    Ok(SweepReport {
        cells,
        long_csv: long_path,
        table_csv: table_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_covers_ninety_six_cells() {
        assert_eq!(SWEEP_ROWS.len(), 12);
        assert_eq!(SWEEP_ROWS.len() * TemplateKind::ALL.len(), 96);
        // Nine single-channel rows, three all-channel rows.
        let all = SWEEP_ROWS
            .iter()
            .filter(|(_, c)| *c == ChannelSelect::All)
            .count();
        assert_eq!(all, 3);
    }

    #[test]
    fn baseline_lookup_matches_known_cells() {
        assert_eq!(
            baseline_for(ColorSpace::Lab, ChannelSelect::Index(0), TemplateKind::C14),
            Some(0.810)
        );
        assert_eq!(
            baseline_for(ColorSpace::Ycbcr, ChannelSelect::Index(1), TemplateKind::U1Crx),
            Some(0.548)
        );
        assert_eq!(
            baseline_for(ColorSpace::Rgb01, ChannelSelect::Index(1), TemplateKind::C19),
            Some(0.780)
        );
        assert_eq!(
            baseline_for(ColorSpace::Ycbcr, ChannelSelect::All, TemplateKind::C14),
            Some(0.740)
        );
        assert_eq!(
            baseline_for(ColorSpace::Angles, ChannelSelect::All, TemplateKind::C14),
            None
        );
    }

    #[test]
    fn baselines_are_plausible_accuracies() {
        for row in BASELINE_ACCURACY {
            for acc in row {
                assert!((0.5..1.0).contains(&acc), "{acc}");
            }
        }
    }

    #[test]
    fn markers_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cell.csv");
        write_marker(&path, 0.8125, 0.03, 42.5).unwrap();
        assert_eq!(read_marker(&path), Some((0.8125, 0.03, 42.5)));
        fs::write(&path, "accuracy\n0.8\n").unwrap();
        assert_eq!(read_marker(&path), None);
        assert_eq!(read_marker(&dir.path().join("absent.csv")), None);
    }

    #[test]
    fn mean_std_handles_single_and_multiple() {
        assert_eq!(mean_std(&[0.7]), (0.7, 0.0));
        let (mean, std) = mean_std(&[0.7, 0.8, 0.9]);
        assert!((mean - 0.8).abs() < 1e-12);
        assert!((std - 0.1).abs() < 1e-12);
    }

    #[test]
    fn failure_messages_flatten_to_one_csv_field() {
        assert_eq!(one_line("a,b\nc".to_string()), "a; b; c");
    }

    #[test]
    fn table_csv_has_grid_shape() {
        let cells: Vec<SweepCellResult> = (0..SWEEP_ROWS.len())
            .flat_map(|row| {
                (0..TemplateKind::ALL.len()).map(move |col| SweepCellResult {
                    space: SWEEP_ROWS[row].0,
                    channel: SWEEP_ROWS[row].1,
                    template: TemplateKind::ALL[col],
                    base_seed: 1,
                    repeats: 1,
                    accuracy: 0.5 + (row + col) as f64 / 100.0,
                    accuracy_std: 0.0,
                    baseline: BASELINE_ACCURACY[row][col],
                    runtime_seconds: 0.0,
                    reused: false,
                    error: if row == 0 && col == 1 {
                        Some("boom".into())
                    } else {
                        None
                    },
                })
            })
            .collect();
        let table = table_csv(&cells);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 13);
        assert!(lines[0].starts_with("space,channel,U1_CRX,"));
        // The failed cell renders as an empty field.
        assert!(lines[1].contains(",,"));
        let long = long_csv(&cells);
        assert_eq!(long.lines().count(), 97);
        assert!(long.contains("failed: boom"));
    }
}
