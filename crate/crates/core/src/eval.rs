//! Figures of merit between an estimated and a ground-truth baseline.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::Baseline;
use crate::synth::SyntheticSpectrum;

/// Channel intervals (inclusive, in channel coordinates) over which the
/// correlation is reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionMap {
    pub uncongested: [f64; 2],
    pub congested: [f64; 2],
    pub full: [f64; 2],
}

impl Default for RegionMap {
    fn default() -> Self {
        Self {
            uncongested: [290.0, 505.0],
            congested: [505.0, 706.0],
            full: [0.0, 1000.0],
        }
    }
}

impl RegionMap {
    pub fn validate(&self) -> Result<()> {
        for (name, [lo, hi]) in [
            ("uncongested", self.uncongested),
            ("congested", self.congested),
            ("full", self.full),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Config(format!("region {name} [{lo}, {hi}] is invalid")));
            }
        }
        let [ul, uh] = self.uncongested;
        let [cl, ch] = self.congested;
        // touching endpoints are allowed; each region owns the shared channel
        if ul < ch && cl < uh {
            return Err(Error::Config(
                "uncongested and congested regions overlap".into(),
            ));
        }
        Ok(())
    }

    /// Index range of the channels inside `[lo, hi]`.
    fn slice(channels: &[f64], [lo, hi]: [f64; 2]) -> Result<RangeInclusive<usize>> {
        let start = channels.partition_point(|&c| c < lo);
        let end = channels.partition_point(|&c| c <= hi);
        if end <= start {
            return Err(Error::Config(format!(
                "region [{lo}, {hi}] contains no channels"
            )));
        }
        Ok(start..=end - 1)
    }
}

/// Pearson correlation, or `None` when either input has zero variance.
pub fn pearson_r(a: &[f64], b: &[f64]) -> Result<Option<f64>> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "correlation inputs differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Shape("correlation needs at least two samples".into()));
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Ok(None);
    }
    Ok(Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0)))
}

/// Pearson-type chi-squared, `sum (est - truth)^2 / truth`.
pub fn chi_squared(estimated: &Baseline, truth: &Baseline) -> Result<f64> {
    check_same_grid(estimated, truth)?;
    let mut total = 0.0;
    for ((c, e), t) in truth.channels().iter().zip(estimated.values()).zip(truth.values()) {
        if *t <= 0.0 {
            return Err(Error::Validation(format!(
                "ground-truth baseline is {t} at channel {c}; chi-squared needs positive values"
            )));
        }
        total += (e - t) * (e - t) / t;
    }
    Ok(total)
}

fn check_same_grid(a: &Baseline, b: &Baseline) -> Result<()> {
    if a.channels() != b.channels() {
        return Err(Error::Shape(format!(
            "baseline grids differ ({} vs {} channels)",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FomReport {
    pub spectrum_id: String,
    pub r_uncongested: Option<f64>,
    pub r_congested: Option<f64>,
    pub r_full: Option<f64>,
    pub chi2_full: f64,
}

pub fn evaluate_single(
    spectrum_id: impl Into<String>,
    estimated: &Baseline,
    truth: &Baseline,
    regions: &RegionMap,
) -> Result<FomReport> {
    check_same_grid(estimated, truth)?;
    let ch = truth.channels();
    let r_over = |region| -> Result<Option<f64>> {
        let idx = RegionMap::slice(ch, region)?;
        pearson_r(&estimated.values()[idx.clone()], &truth.values()[idx])
    };
    let full = RegionMap::slice(ch, regions.full)?;
    let est_full = Baseline::new(
        ch[full.clone()].to_vec(),
        estimated.values()[full.clone()].to_vec(),
    )?;
    let truth_full = Baseline::new(ch[full.clone()].to_vec(), truth.values()[full].to_vec())?;
    Ok(FomReport {
        spectrum_id: spectrum_id.into(),
        r_uncongested: r_over(regions.uncongested)?,
        r_congested: r_over(regions.congested)?,
        r_full: r_over(regions.full)?,
        chi2_full: chi_squared(&est_full, &truth_full)?,
    })
}

/// Mean over the defined values, with the number of undefined ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanWithExclusions {
    pub mean: Option<f64>,
    pub included: usize,
    pub excluded: usize,
}

impl MeanWithExclusions {
    fn of(values: impl Iterator<Item = Option<f64>>) -> Self {
        let (mut sum, mut included, mut excluded) = (0.0, 0, 0);
        for v in values {
            match v {
                Some(x) => {
                    sum += x;
                    included += 1;
                }
                None => excluded += 1,
            }
        }
        Self {
            mean: (included > 0).then(|| sum / included as f64),
            included,
            excluded,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub slope: f64,
    pub sbr: f64,
    pub snr: f64,
    pub report: FomReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub rows: Vec<SuiteRow>,
    pub mean_r_uncongested: MeanWithExclusions,
    pub mean_r_congested: MeanWithExclusions,
    pub mean_r_full: MeanWithExclusions,
    pub mean_chi2: f64,
}

impl SuiteSummary {
    pub fn from_rows(rows: Vec<SuiteRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Parameter("cannot summarize an empty suite".into()));
        }
        let mean_chi2 = rows.iter().map(|r| r.report.chi2_full).sum::<f64>() / rows.len() as f64;
        Ok(Self {
            mean_r_uncongested: MeanWithExclusions::of(rows.iter().map(|r| r.report.r_uncongested)),
            mean_r_congested: MeanWithExclusions::of(rows.iter().map(|r| r.report.r_congested)),
            mean_r_full: MeanWithExclusions::of(rows.iter().map(|r| r.report.r_full)),
            mean_chi2,
            rows,
        })
    }

    /// Mean full-region r over the rows accepted by `keep`.
    pub fn mean_r_full_where(&self, keep: impl Fn(&SuiteRow) -> bool) -> MeanWithExclusions {
        MeanWithExclusions::of(self.rows.iter().filter(|r| keep(r)).map(|r| r.report.r_full))
    }

    /// One row per spectrum: `slope,sbr,snr,r_uncongested,r_congested,r_full,chi2_full`.
    /// Undefined correlations are written as `NA`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("slope,sbr,snr,r_uncongested,r_congested,r_full,chi2_full\n");
        for row in &self.rows {
            let r = &row.report;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                row.slope,
                row.sbr,
                row.snr,
                fmt_r(r.r_uncongested),
                fmt_r(r.r_congested),
                fmt_r(r.r_full),
                r.chi2_full
            );
        }
        out
    }

    /// Compact fixed-width table followed by the suite means.
    pub fn to_text_table(&self) -> String {
        let mut out = format!(
            "{:>6} {:>7} {:>6} {:>8} {:>8} {:>8} {:>12}\n",
            "slope", "sbr", "snr", "r_unc", "r_cong", "r_full", "chi2"
        );
        let cell = |r: Option<f64>| r.map_or_else(|| "NA".to_string(), |v| format!("{v:.4}"));
        for row in &self.rows {
            let r = &row.report;
            let _ = writeln!(
                out,
                "{:>6} {:>7} {:>6} {:>8} {:>8} {:>8} {:>12.4}",
                row.slope,
                row.sbr,
                row.snr,
                cell(r.r_uncongested),
                cell(r.r_congested),
                cell(r.r_full),
                r.chi2_full
            );
        }
        for (name, m) in [
            ("uncongested", &self.mean_r_uncongested),
            ("congested", &self.mean_r_congested),
            ("full", &self.mean_r_full),
        ] {
            let _ = writeln!(
                out,
                "mean r ({name}): {} over {} spectra, {} undefined excluded",
                cell(m.mean),
                m.included,
                m.excluded
            );
        }
        let _ = writeln!(out, "mean chi2 (full): {:.4}", self.mean_chi2);
        out
    }
}

fn fmt_r(r: Option<f64>) -> String {
    r.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

/// Score each estimate against the ground truth stored with its spectrum.
pub fn evaluate_suite(
    results: &[(Baseline, SyntheticSpectrum)],
    regions: &RegionMap,
) -> Result<SuiteSummary> {
    if results.is_empty() {
        return Err(Error::Parameter("cannot summarize an empty suite".into()));
    }
    let rows = results
        .iter()
        .enumerate()
        .map(|(i, (estimated, synthetic))| {
            let spec = &synthetic.spec;
            Ok(SuiteRow {
                slope: spec.slope,
                sbr: spec.sbr,
                snr: spec.snr,
                report: evaluate_single(
                    i.to_string(),
                    estimated,
                    &synthetic.baseline_truth,
                    regions,
                )?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SuiteSummary::from_rows(rows)
}
