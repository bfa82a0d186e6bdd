//! Seeded synthetic Raman benchmark: blurred Lorentzian peaks on a sigmoid
//! baseline with additive Gaussian noise, scaled by signal-to-baseline and
//! signal-to-noise ratios.
//!
//! The baseline is a cumulative normal rescaled to rise from exactly `1`
//! (the bias) at the first channel to exactly `1 + A` at the last, where
//! `A = (max(s) - min(s)) / sbr`. Its width is solved so that the slope at
//! the central channel equals the requested slope.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{gaussian_convolve, Baseline, Spectrum};

/// Name of the noise generator, recorded next to generated suites.
pub const RNG_NAME: &str = "rand_chacha 0.3 ChaCha8Rng::seed_from_u64 + rand_distr 0.4 Normal";

pub const DEFAULT_PEAK_AMPLITUDE: f64 = 5.0;
pub const DEFAULT_SLOPES: [f64; 4] = [0.0, 0.1, 0.3, 1.0];
pub const DEFAULT_SBRS: [f64; 5] = [0.05, 0.1, 1.0, 10.0, 100.0];
pub const DEFAULT_SNRS: [f64; 5] = [2.0, 3.0, 5.0, 10.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakSpec {
    pub center: f64,
    pub fwhm: f64,
    pub amplitude: f64,
}

impl PeakSpec {
    pub fn new(center: f64, fwhm: f64, amplitude: f64) -> Self {
        Self {
            center,
            fwhm,
            amplitude,
        }
    }

    /// Lorentzian line shape; equals `amplitude` at the center and half of
    /// it one half-width away.
    pub fn value_at(&self, x: f64) -> f64 {
        let half = 0.5 * self.fwhm;
        let dx = x - self.center;
        self.amplitude * half * half / (dx * dx + half * half)
    }
}

/// The seven-band layout: an isolated broad band at 340, a second isolated
/// band at 455 and five overlapping bands between 532 and 656.
pub fn default_peaks() -> Vec<PeakSpec> {
    [340.0, 455.0, 532.0, 584.0, 618.0, 641.0, 656.0]
        .into_iter()
        .map(|c| {
            let fwhm = if c == 340.0 { 10.0 } else { 5.7 };
            PeakSpec::new(c, fwhm, DEFAULT_PEAK_AMPLITUDE)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_channels: usize,
    /// Baseline slope at the central channel, intensity per channel.
    pub slope: f64,
    /// Signal-to-baseline ratio; `f64::INFINITY` for no baseline rise.
    pub sbr: f64,
    /// Signal-to-noise ratio; `f64::INFINITY` for noise-free.
    pub snr: f64,
    pub seed: u64,
    pub peaks: Vec<PeakSpec>,
    /// Instrument blur in channels; zero disables it.
    pub blur_sigma: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_channels: 1001,
            slope: 0.1,
            sbr: 1.0,
            snr: f64::INFINITY,
            seed: 0,
            peaks: default_peaks(),
            blur_sigma: 5.0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_channels < 3 {
            return Err(Error::Parameter(format!(
                "n_channels must be at least 3, got {}",
                self.n_channels
            )));
        }
        if !(self.slope >= 0.0 && self.slope.is_finite()) {
            return Err(Error::Parameter(format!(
                "slope must be finite and non-negative, got {}",
                self.slope
            )));
        }
        if !(self.sbr > 0.0) {
            return Err(Error::Parameter(format!("sbr must be positive, got {}", self.sbr)));
        }
        if !(self.snr > 0.0) {
            return Err(Error::Parameter(format!("snr must be positive, got {}", self.snr)));
        }
        if !(self.blur_sigma >= 0.0 && self.blur_sigma.is_finite()) {
            return Err(Error::Parameter(format!(
                "blur_sigma must be non-negative, got {}",
                self.blur_sigma
            )));
        }
        let last = (self.n_channels - 1) as f64;
        for (i, p) in self.peaks.iter().enumerate() {
            if !(p.fwhm > 0.0 && p.fwhm.is_finite()) {
                return Err(Error::Parameter(format!("peak {i}: fwhm must be positive")));
            }
            if !(p.amplitude > 0.0 && p.amplitude.is_finite()) {
                return Err(Error::Parameter(format!("peak {i}: amplitude must be positive")));
            }
            if !(p.center >= 0.0 && p.center <= last) {
                return Err(Error::Parameter(format!(
                    "peak {i}: center {} outside [0, {last}]",
                    p.center
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpectrum {
    pub observed: Spectrum,
    pub pure: Spectrum,
    pub baseline_truth: Baseline,
    pub noise_truth: Vec<f64>,
    /// Standard deviation handed to the noise sampler.
    pub noise_std: f64,
    pub spec: SyntheticSpec,
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Rescaled cumulative-normal step from `1` to `1 + amplitude` across a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sigmoid {
    pub amplitude: f64,
    pub midpoint: f64,
    pub width: f64,
    lo: f64,
    hi: f64,
    cdf_lo: f64,
    cdf_span: f64,
}

impl Sigmoid {
    /// Sigmoid over `[lo, hi]` with the given rise and slope at the center.
    pub fn with_midpoint_slope(lo: f64, hi: f64, amplitude: f64, slope: f64) -> Result<Self> {
        let midpoint = 0.5 * (lo + hi);
        let half_span = 0.5 * (hi - lo);
        // slope = amplitude * phi(0) / (width * erf(half_span / (width sqrt 2)))
        let target = amplitude * INV_SQRT_2PI / slope;
        let ramp_limit = 2.0 * INV_SQRT_2PI * half_span;
        if !(target < ramp_limit) {
            return Err(Error::Parameter(format!(
                "slope {slope} is too gentle for a rise of {amplitude} over {} channels \
                 (needs more than {})",
                hi - lo,
                amplitude / (hi - lo)
            )));
        }
        let scaled = |w: f64| w * libm::erf(half_span / (w * std::f64::consts::SQRT_2));
        let width = if scaled(target) == target {
            target
        } else {
            // scaled() increases monotonically from 0 towards ramp_limit
            let (mut a, mut b) = (target, target);
            while scaled(b) < target {
                b *= 2.0;
            }
            while b - a > 1e-14 * b {
                let m = 0.5 * (a + b);
                if scaled(m) < target {
                    a = m;
                } else {
                    b = m;
                }
            }
            0.5 * (a + b)
        };
        let cdf_lo = normal_cdf((lo - midpoint) / width);
        let cdf_hi = normal_cdf((hi - midpoint) / width);
        Ok(Self {
            amplitude,
            midpoint,
            width,
            lo,
            hi,
            cdf_lo,
            cdf_span: cdf_hi - cdf_lo,
        })
    }

    pub fn value(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 1.0;
        }
        if x >= self.hi {
            return 1.0 + self.amplitude;
        }
        let cdf = normal_cdf((x - self.midpoint) / self.width);
        1.0 + self.amplitude * (cdf - self.cdf_lo) / self.cdf_span
    }
}

fn unit_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64).collect()
}

fn value_range(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// Baseline with bias one whose rise is `signal_range / sbr`.
pub fn sigmoid_baseline(spec: &SyntheticSpec, signal_range: f64) -> Result<Baseline> {
    if !(spec.sbr > 0.0) {
        return Err(Error::Parameter(format!("sbr must be positive, got {}", spec.sbr)));
    }
    if !(signal_range >= 0.0 && signal_range.is_finite()) {
        return Err(Error::Parameter(format!(
            "signal range must be finite and non-negative, got {signal_range}"
        )));
    }
    let channels = unit_grid(spec.n_channels);
    let amplitude = signal_range / spec.sbr;
    let values = if spec.slope == 0.0 || amplitude == 0.0 {
        vec![1.0; spec.n_channels]
    } else {
        let last = (spec.n_channels - 1) as f64;
        let sigmoid = Sigmoid::with_midpoint_slope(0.0, last, amplitude, spec.slope)?;
        channels.iter().map(|&x| sigmoid.value(x)).collect()
    };
    Baseline::new(channels, values)
}

/// Sum of the Lorentzian peaks, optionally blurred.
pub fn pure_signal(spec: &SyntheticSpec) -> Result<Spectrum> {
    let channels = unit_grid(spec.n_channels);
    let raw: Vec<f64> = channels
        .iter()
        .map(|&x| spec.peaks.iter().map(|p| p.value_at(x)).sum())
        .collect();
    let blurred = if spec.blur_sigma > 0.0 {
        gaussian_convolve(&raw, spec.blur_sigma)?
    } else {
        raw
    };
    Spectrum::new(channels, blurred)
}

pub fn noise_std(spec: &SyntheticSpec, signal_range: f64) -> Result<f64> {
    if !(spec.snr > 0.0) {
        return Err(Error::Parameter(format!("snr must be positive, got {}", spec.snr)));
    }
    if spec.snr.is_infinite() {
        Ok(0.0)
    } else {
        Ok(signal_range / spec.snr)
    }
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticSpectrum> {
    spec.validate()?;
    let pure = pure_signal(spec)?;
    let signal_range = value_range(pure.intensities());
    let baseline_truth = sigmoid_baseline(spec, signal_range)?;
    let std = noise_std(spec, signal_range)?;
    let noise_truth = if std > 0.0 {
        let normal = Normal::new(0.0, std).map_err(|e| Error::Parameter(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        (0..spec.n_channels).map(|_| normal.sample(&mut rng)).collect()
    } else {
        vec![0.0; spec.n_channels]
    };
    let observed_values = pure
        .intensities()
        .iter()
        .zip(baseline_truth.values())
        .zip(&noise_truth)
        .map(|((s, b), n)| s + b + n)
        .collect();
    Ok(SyntheticSpectrum {
        observed: pure.with_intensities(observed_values)?,
        pure,
        baseline_truth,
        noise_truth,
        noise_std: std,
        spec: spec.clone(),
    })
}

/// Per-spectrum seed for suite position `index`.
pub fn derive_seed(base_seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base_seed
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The specs of a suite: every (slope, sbr, snr) combination in that order,
/// slopes outermost. Grid, peaks and blur come from `template`.
pub fn suite_specs(
    slopes: &[f64],
    sbrs: &[f64],
    snrs: &[f64],
    base_seed: u64,
    template: &SyntheticSpec,
) -> Result<Vec<SyntheticSpec>> {
    for (name, list) in [("slopes", slopes), ("sbrs", sbrs), ("snrs", snrs)] {
        if list.is_empty() {
            return Err(Error::Parameter(format!("{name} list is empty")));
        }
    }
    let mut specs = Vec::with_capacity(slopes.len() * sbrs.len() * snrs.len());
    for &slope in slopes {
        for &sbr in sbrs {
            for &snr in snrs {
                let index = specs.len() as u64;
                specs.push(SyntheticSpec {
                    slope,
                    sbr,
                    snr,
                    seed: derive_seed(base_seed, index),
                    ..template.clone()
                });
            }
        }
    }
    Ok(specs)
}

pub fn generate_suite(
    slopes: &[f64],
    sbrs: &[f64],
    snrs: &[f64],
    base_seed: u64,
    template: &SyntheticSpec,
) -> Result<Vec<SyntheticSpectrum>> {
    suite_specs(slopes, sbrs, snrs, base_seed, template)?
        .iter()
        .map(generate)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_with(slope: f64, sbr: f64, snr: f64) -> SyntheticSpec {
        SyntheticSpec {
            slope,
            sbr,
            snr,
            ..Default::default()
        }
    }

    #[test]
    fn default_layout() {
        let peaks = default_peaks();
        assert_eq!(peaks.len(), 7);
        let centers: Vec<f64> = peaks.iter().map(|p| p.center).collect();
        assert_eq!(centers, vec![340.0, 455.0, 532.0, 584.0, 618.0, 641.0, 656.0]);
        assert_eq!(peaks[0].fwhm, 10.0);
        assert!(peaks[1..].iter().all(|p| p.fwhm == 5.7));
        let d = SyntheticSpec::default();
        assert_eq!((d.n_channels, d.blur_sigma), (1001, 5.0));
    }

    #[test]
    fn flat_baseline_for_zero_slope() {
        let b = sigmoid_baseline(&spec_with(0.0, 0.3, 10.0), 2.0).unwrap();
        assert!(b.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn amplitude_from_sbr() {
        let b = sigmoid_baseline(&spec_with(1.0, 0.1, 10.0), 1.0).unwrap();
        let max = b.values().iter().copied().fold(f64::MIN, f64::max);
        let min = b.values().iter().copied().fold(f64::MAX, f64::min);
        assert!((max - 1.0 - 10.0).abs() < 1e-12);
        assert_eq!(min, 1.0);
    }

    #[test]
    fn steep_sigmoid_width_and_midpoint() {
        let s = Sigmoid::with_midpoint_slope(0.0, 1000.0, 10.0, 1.0).unwrap();
        assert!((s.width - 10.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert!((s.width - 3.9894).abs() < 1e-4);
        assert!((s.value(500.0) - 1.0 - 5.0).abs() < 1e-12);
        let h = 1e-4;
        let fd = (s.value(500.0 + h) - s.value(500.0 - h)) / (2.0 * h);
        assert!((fd - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gentle_sigmoid_hits_requested_slope() {
        // close to the ramp limit 60 / 1000
        let s = Sigmoid::with_midpoint_slope(0.0, 1000.0, 60.0, 0.07).unwrap();
        assert!(s.width > 300.0);
        let h = 1e-3;
        let fd = (s.value(500.0 + h) - s.value(500.0 - h)) / (2.0 * h);
        assert!((fd - 0.07).abs() < 1e-6 * 0.07 + 1e-9);
        assert_eq!(s.value(0.0), 1.0);
        assert_eq!(s.value(1000.0), 61.0);
    }

    #[test]
    fn too_gentle_slope_is_rejected() {
        let e = Sigmoid::with_midpoint_slope(0.0, 1000.0, 200.0, 0.1).unwrap_err();
        assert!(matches!(e, Error::Parameter(_)));
    }

    #[test]
    fn non_positive_sbr_is_rejected() {
        assert!(sigmoid_baseline(&spec_with(0.1, 0.0, 10.0), 1.0).is_err());
        assert!(sigmoid_baseline(&spec_with(0.1, -1.0, 10.0), 1.0).is_err());
    }

    #[test]
    fn lorentzian_shape() {
        let p = PeakSpec::new(100.0, 8.0, 3.0);
        assert_eq!(p.value_at(100.0), 3.0);
        assert!((p.value_at(104.0) - 1.5).abs() < 1e-15);
        assert!((p.value_at(96.0) - 1.5).abs() < 1e-15);

        let spec = SyntheticSpec {
            peaks: vec![p],
            blur_sigma: 0.0,
            n_channels: 201,
            ..Default::default()
        };
        let s = pure_signal(&spec).unwrap();
        assert_eq!(s.intensities()[100], 3.0);
        assert!((s.intensities()[104] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn blurred_default_peaks_stay_near_their_centers() {
        let s = pure_signal(&SyntheticSpec::default()).unwrap();
        let y = s.intensities();
        let maxima: Vec<usize> = (1..y.len() - 1)
            .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1])
            .collect();
        // blur may merge the closest congested pair into one maximum
        for &m in &maxima {
            let near = default_peaks()
                .iter()
                .any(|p| (p.center - m as f64).abs() <= 2.0);
            assert!(near, "maximum at {m} not near any band: {maxima:?}");
        }
        for c in [340usize, 455, 532, 584] {
            assert!(maxima.iter().any(|&m| m.abs_diff(c) <= 2), "{c}: {maxima:?}");
        }
    }

    #[test]
    fn noise_std_examples() {
        assert_eq!(noise_std(&spec_with(0.1, 1.0, 10.0), 10.0).unwrap(), 1.0);
        assert_eq!(noise_std(&spec_with(0.1, 1.0, 100.0), 1.0).unwrap(), 0.01);
        assert_eq!(noise_std(&spec_with(0.1, 1.0, f64::INFINITY), 5.0).unwrap(), 0.0);
        assert!(noise_std(&spec_with(0.1, 1.0, 0.0), 5.0).is_err());
    }

    #[test]
    fn degenerate_composition_equals_pure() {
        let g = generate(&spec_with(0.0, f64::INFINITY, f64::INFINITY)).unwrap();
        // the flat baseline carries the bias of one
        for (o, p) in g.observed.intensities().iter().zip(g.pure.intensities()) {
            assert_eq!(*o, p + 1.0);
        }
        assert!(g.noise_truth.iter().all(|&n| n == 0.0));
    }

    #[test]
    fn generate_is_deterministic() {
        let spec = SyntheticSpec { seed: 42, ..spec_with(0.3, 1.0, 5.0) };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = SyntheticSpec { seed: 43, ..spec.clone() };
        assert_ne!(
            generate(&spec).unwrap().noise_truth,
            generate(&other).unwrap().noise_truth
        );
    }

    #[test]
    fn noise_level_matches_snr() {
        let g = generate(&SyntheticSpec { seed: 7, ..spec_with(0.1, 1.0, 2.0) }).unwrap();
        let n = g.noise_truth.len() as f64;
        let mean = g.noise_truth.iter().sum::<f64>() / n;
        let var = g.noise_truth.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let range = value_range(g.pure.intensities());
        assert!((var.sqrt() / (range / 2.0) - 1.0).abs() < 0.1);
        assert_eq!(g.noise_std, range / 2.0);
    }

    #[test]
    fn suite_cardinality_and_seeds() {
        let t = SyntheticSpec::default();
        let specs = suite_specs(&DEFAULT_SLOPES, &DEFAULT_SBRS, &DEFAULT_SNRS, 1, &t).unwrap();
        assert_eq!(specs.len(), 100);
        let mut seeds: Vec<u64> = specs.iter().map(|s| s.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 100);
        assert_eq!(specs[0].slope, 0.0);
        assert_eq!(specs[99].slope, 1.0);
        assert_eq!(specs[1].snr, 3.0);

        let one = generate_suite(&[0.3], &[1.0], &[10.0], 9, &t).unwrap();
        assert_eq!(one.len(), 1);
        assert!(suite_specs(&[], &[1.0], &[1.0], 0, &t).is_err());
    }

    #[test]
    fn default_suite_is_feasible() {
        let t = SyntheticSpec::default();
        let suite = generate_suite(&DEFAULT_SLOPES, &DEFAULT_SBRS, &DEFAULT_SNRS, 3, &t).unwrap();
        assert_eq!(suite.len(), 100);
    }

    #[test]
    fn invalid_peaks_rejected() {
        let mut spec = SyntheticSpec::default();
        spec.peaks.push(PeakSpec::new(2000.0, 5.0, 1.0));
        assert!(generate(&spec).is_err());
        let spec = SyntheticSpec { peaks: vec![PeakSpec::new(5.0, 0.0, 1.0)], ..Default::default() };
        assert!(generate(&spec).is_err());
    }
}
