//! The work behind each command-line subcommand. Every command stages its
//! output files and renames them into place only once all of them have been
//! written.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::eval::{evaluate_single, SuiteRow, SuiteSummary};
use crate::io::{baseline_csv, read_spectrum_csv, spectrum_csv, OutputBatch};
use crate::plot::Plot;
use crate::snake::{Snake, SnakeResult};
use crate::spectrum::{subtract_baseline, Baseline};
use crate::synth::{generate, suite_specs, RNG_NAME};

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const SUITE_INFO_FILE: &str = "suite_info.txt";
pub const SUMMARY_FILE: &str = "summary.csv";

#[derive(Debug, Clone)]
pub struct CorrectOutcome {
    pub result: SnakeResult,
    pub baseline_path: PathBuf,
    pub corrected_path: PathBuf,
    pub svg_path: Option<PathBuf>,
    /// Area of the snaxels after the last iteration.
    pub final_area: f64,
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

/// Estimate and remove the baseline of one CSV spectrum. Writes
/// `<prefix>.baseline.csv`, `<prefix>.corrected.csv` and optionally
/// `<prefix>.svg`; the prefix defaults to the input path minus extension.
pub fn correct(
    input: &Path,
    config: &RunConfig,
    out_prefix: Option<&Path>,
    svg: bool,
) -> Result<CorrectOutcome> {
    let spectrum = read_spectrum_csv(input)?;
    let snake = Snake::new(&spectrum, &config.snake)?;
    let result = snake.run()?;
    let corrected = subtract_baseline(&spectrum, &result.baseline)?;
    let final_area = snake.area(&result.last_positions);

    let prefix = out_prefix
        .map(Path::to_path_buf)
        .unwrap_or_else(|| input.with_extension(""));
    let baseline_path = with_suffix(&prefix, ".baseline.csv");
    let corrected_path = with_suffix(&prefix, ".corrected.csv");
    let svg_path = (svg || config.plot.svg).then(|| with_suffix(&prefix, ".svg"));

    let mut batch = OutputBatch::new();
    batch.stage(&baseline_path, baseline_csv(&result.baseline).as_bytes())?;
    batch.stage(&corrected_path, spectrum_csv(&corrected).as_bytes())?;
    if let Some(path) = &svg_path {
        let plot = Plot {
            spectrum: Some(&spectrum),
            baseline: Some(&result.baseline),
            corrected: Some(&corrected),
            snaxels: Some(&result.final_positions),
            initial_snaxels: Some(&result.initial_positions),
        };
        batch.stage(path, plot.render().as_bytes())?;
    }
    batch.commit()?;

    Ok(CorrectOutcome {
        result,
        baseline_path,
        corrected_path,
        svg_path,
        final_area,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub index: usize,
    pub slope: f64,
    pub sbr: f64,
    pub snr: f64,
    pub seed: u64,
    pub observed_file: String,
    pub pure_file: String,
    pub baseline_file: String,
}

fn manifest_csv(rows: &[ManifestRow]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| Error::Validation(e.to_string()))?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::Validation(e.to_string()))
}

pub fn read_manifest(dir: &Path) -> Result<Vec<ManifestRow>> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize()
        .map(|row| {
            row.map_err(|e| Error::Parse {
                path: path.clone(),
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })
        })
        .collect()
}

/// Write the synthetic suite into `out_dir`: per spectrum the observed,
/// pure and ground-truth baseline CSVs, plus `manifest.csv`. A non-empty
/// `out_dir` is only written into when `force` is set.
pub fn generate_suite_files(
    config: &RunConfig,
    out_dir: &Path,
    base_seed: Option<u64>,
    force: bool,
) -> Result<Vec<ManifestRow>> {
    if out_dir.as_os_str().is_empty() {
        return Err(Error::Usage("output directory is empty".into()));
    }
    if out_dir.exists() {
        let mut entries = fs::read_dir(out_dir).map_err(|e| Error::io(out_dir, e))?;
        if entries.next().is_some() && !force {
            return Err(Error::Usage(format!(
                "{} is not empty; pass --force to overwrite",
                out_dir.display()
            )));
        }
    } else {
        fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    }

    let suite = &config.suite;
    let base_seed = base_seed.unwrap_or(suite.base_seed);
    let specs = suite_specs(&suite.slopes, &suite.sbrs, &suite.snrs, base_seed, &suite.template())?;

    let mut batch = OutputBatch::new();
    let mut rows = Vec::with_capacity(specs.len());
    for (index, spec) in specs.iter().enumerate() {
        let synthetic = generate(spec)?;
        let row = ManifestRow {
            index,
            slope: spec.slope,
            sbr: spec.sbr,
            snr: spec.snr,
            seed: spec.seed,
            observed_file: format!("{index:03}_observed.csv"),
            pure_file: format!("{index:03}_pure.csv"),
            baseline_file: format!("{index:03}_baseline.csv"),
        };
        batch.stage(out_dir.join(&row.observed_file), spectrum_csv(&synthetic.observed).as_bytes())?;
        batch.stage(out_dir.join(&row.pure_file), spectrum_csv(&synthetic.pure).as_bytes())?;
        batch.stage(
            out_dir.join(&row.baseline_file),
            baseline_csv(&synthetic.baseline_truth).as_bytes(),
        )?;
        rows.push(row);
    }
    let info = format!(
        "rng = {RNG_NAME}\nbase_seed = {base_seed}\nspectra = {}\n\n{}",
        rows.len(),
        config.to_toml_string()
    );
    batch.stage(out_dir.join(SUITE_INFO_FILE), info.as_bytes())?;
    batch.stage(out_dir.join(MANIFEST_FILE), &manifest_csv(&rows)?)?;
    batch.commit()?;
    Ok(rows)
}

/// Correct every observed spectrum listed in `dir/manifest.csv`, score it
/// against its stored ground-truth baseline and write the per-spectrum
/// table to `summary_path` (default `dir/summary.csv`).
pub fn evaluate_suite_dir(
    dir: &Path,
    config: &RunConfig,
    summary_path: Option<&Path>,
) -> Result<SuiteSummary> {
    let manifest = read_manifest(dir)?;
    let rows = manifest
        .iter()
        .map(|entry| {
            let observed = read_spectrum_csv(dir.join(&entry.observed_file))?;
            let truth = Baseline::from(read_spectrum_csv(dir.join(&entry.baseline_file))?);
            let estimated = Snake::new(&observed, &config.snake)?.run()?.baseline;
            let report = evaluate_single(entry.index.to_string(), &estimated, &truth, &config.regions)
                .map_err(|e| match e {
                    Error::Shape(msg) => Error::Shape(format!("{}: {msg}", entry.baseline_file)),
                    other => other,
                })?;
            Ok(SuiteRow {
                slope: entry.slope,
                sbr: entry.sbr,
                snr: entry.snr,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = SuiteSummary::from_rows(rows)?;
    let path = summary_path
        .map(Path::to_path_buf)
        .unwrap_or_else(|| dir.join(SUMMARY_FILE));
    let mut batch = OutputBatch::new();
    batch.stage(&path, summary.to_csv().as_bytes())?;
    batch.commit()?;
    Ok(summary)
}

/// Plot a CSV spectrum, and its baseline and corrected trace when a
/// baseline CSV is given.
pub fn plot_files(input: &Path, baseline: Option<&Path>, out: &Path) -> Result<()> {
    let spectrum = read_spectrum_csv(input)?;
    let baseline = baseline
        .map(|p| read_spectrum_csv(p).map(Baseline::from))
        .transpose()?;
    let corrected = baseline
        .as_ref()
        .map(|b| subtract_baseline(&spectrum, b))
        .transpose()?;
    Plot {
        spectrum: Some(&spectrum),
        baseline: baseline.as_ref(),
        corrected: corrected.as_ref(),
        ..Default::default()
    }
    .write(out)
}
