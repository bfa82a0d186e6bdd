//! Signal types and the numeric primitives the rest of the crate builds on:
//! linear sampling at fractional coordinates, finite-difference derivatives,
//! Gaussian smoothing and baseline subtraction.

use crate::error::{Error, Result};

/// A one-dimensional spectrum: intensities on a strictly increasing channel
/// grid (channel index or wavenumber).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    channels: Vec<f64>,
    intensities: Vec<f64>,
}

/// A baseline estimate sampled on the grid of the spectrum it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    channels: Vec<f64>,
    values: Vec<f64>,
}

fn validate_grid(channels: &[f64], values: &[f64], what: &str) -> Result<()> {
    if channels.len() != values.len() {
        return Err(Error::Shape(format!(
            "{} channels but {} {what}",
            channels.len(),
            values.len()
        )));
    }
    if channels.len() < 3 {
        return Err(Error::Validation(format!(
            "need at least 3 channels, got {}",
            channels.len()
        )));
    }
    if let Some(i) = channels.iter().position(|c| !c.is_finite()) {
        return Err(Error::Validation(format!("channel {i} is not finite")));
    }
    if let Some(i) = channels.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::Validation(format!(
            "channels not strictly increasing at index {} ({} then {})",
            i + 1,
            channels[i],
            channels[i + 1]
        )));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Validation(format!(
            "{what} at channel {} is not finite",
            channels[i]
        )));
    }
    Ok(())
}

impl Spectrum {
    pub fn new(channels: Vec<f64>, intensities: Vec<f64>) -> Result<Self> {
        validate_grid(&channels, &intensities, "intensities")?;
        Ok(Self {
            channels,
            intensities,
        })
    }

    /// Spectrum on the unit-spaced grid `0, 1, ..., n - 1`.
    pub fn from_intensities(intensities: Vec<f64>) -> Result<Self> {
        let channels = (0..intensities.len()).map(|i| i as f64).collect();
        Self::new(channels, intensities)
    }

    pub fn channels(&self) -> &[f64] {
        &self.channels
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn first_channel(&self) -> f64 {
        self.channels[0]
    }

    pub fn last_channel(&self) -> f64 {
        self.channels[self.channels.len() - 1]
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.first_channel() && x <= self.last_channel()
    }

    pub(crate) fn check_in_range(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                coordinate: x,
                lo: self.first_channel(),
                hi: self.last_channel(),
            })
        }
    }

    /// Linearly interpolated intensity at a fractional channel coordinate.
    pub fn sample_at(&self, x: f64) -> Result<f64> {
        self.check_in_range(x)?;
        Ok(interpolate(&self.channels, &self.intensities, x))
    }

    /// Central divided differences on the interior, one-sided at the ends.
    pub fn first_derivative(&self) -> Vec<f64> {
        let (x, f) = (&self.channels, &self.intensities);
        let n = x.len();
        let mut d = vec![0.0; n];
        d[0] = (f[1] - f[0]) / (x[1] - x[0]);
        d[n - 1] = (f[n - 1] - f[n - 2]) / (x[n - 1] - x[n - 2]);
        for i in 1..n - 1 {
            d[i] = (f[i + 1] - f[i - 1]) / (x[i + 1] - x[i - 1]);
        }
        d
    }

    /// Three-point second divided difference on the interior; each end
    /// repeats its nearest interior value.
    pub fn second_derivative(&self) -> Vec<f64> {
        let (x, f) = (&self.channels, &self.intensities);
        let n = x.len();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h_left = x[i] - x[i - 1];
            let h_right = x[i + 1] - x[i];
            let slope_left = (f[i] - f[i - 1]) / h_left;
            let slope_right = (f[i + 1] - f[i]) / h_right;
            d[i] = 2.0 * (slope_right - slope_left) / (h_left + h_right);
        }
        d[0] = d[1];
        d[n - 1] = d[n - 2];
        d
    }

    /// The same grid with different intensities.
    pub fn with_intensities(&self, intensities: Vec<f64>) -> Result<Self> {
        Self::new(self.channels.clone(), intensities)
    }
}

impl Baseline {
    pub fn new(channels: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        validate_grid(&channels, &values, "baseline values")?;
        Ok(Self { channels, values })
    }

    /// Baseline values on the grid of `spectrum`.
    pub fn on_grid_of(spectrum: &Spectrum, values: Vec<f64>) -> Result<Self> {
        Self::new(spectrum.channels.clone(), values)
    }

    pub fn channels(&self) -> &[f64] {
        &self.channels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// View the baseline as a spectrum, e.g. for writing or plotting.
    pub fn to_spectrum(&self) -> Spectrum {
        Spectrum {
            channels: self.channels.clone(),
            intensities: self.values.clone(),
        }
    }
}

impl From<Spectrum> for Baseline {
    fn from(s: Spectrum) -> Self {
        Baseline {
            channels: s.channels,
            values: s.intensities,
        }
    }
}

/// Piecewise-linear interpolation of `ys` over the increasing grid `xs`.
/// Coordinates outside the grid take the nearest end value.
pub(crate) fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    // first index with xs[i] > x; x lies in [xs[i-1], xs[i])
    let i = xs.partition_point(|&c| c <= x);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let (y0, y1) = (ys[i - 1], ys[i]);
    if x == x0 {
        return y0;
    }
    let t = (x - x0) / (x1 - x0);
    y0 + t * (y1 - y0)
}

/// Reflect an out-of-range index back into `0..n` (half-sample symmetric,
/// `... c b a | a b c ... x y z | z y x ...`).
fn reflect_index(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let mut j = i.rem_euclid(period);
    if j >= n {
        j = period - 1 - j;
    }
    j as usize
}

/// Normalized Gaussian kernel truncated at `ceil(4 sigma)` samples each side.
pub fn gaussian_kernel(sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Parameter(format!(
            "gaussian sigma must be positive, got {sigma}"
        )));
    }
    let radius = (4.0 * sigma).ceil() as isize;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|k| {
            let z = k as f64 / sigma;
            (-0.5 * z * z).exp()
        })
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|w| *w /= total);
    Ok(kernel)
}

/// Convolve with a normalized, truncated Gaussian using reflected
/// boundaries. The output has the input's length.
pub fn gaussian_convolve(values: &[f64], sigma: f64) -> Result<Vec<f64>> {
    let kernel = gaussian_kernel(sigma)?;
    let n = values.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let radius = (kernel.len() / 2) as isize;
    let out = (0..n as isize)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * values[reflect_index(i + k as isize - radius, n)])
                .sum()
        })
        .collect();
    Ok(out)
}

/// Channel-wise `spectrum - baseline`.
pub fn subtract_baseline(spectrum: &Spectrum, baseline: &Baseline) -> Result<Spectrum> {
    if spectrum.channels != baseline.channels {
        return Err(Error::Shape(format!(
            "baseline grid ({} channels) differs from spectrum grid ({} channels)",
            baseline.len(),
            spectrum.len()
        )));
    }
    let corrected = spectrum
        .intensities
        .iter()
        .zip(&baseline.values)
        .map(|(y, b)| y - b)
        .collect();
    spectrum.with_intensities(corrected)
}
