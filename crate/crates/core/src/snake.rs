//! One-dimensional active contour ("snake") baseline estimation.
//!
//! A handful of control points (snaxels) sit on the spectrum's channel axis.
//! Each iteration moves every movable snaxel, left to right, by
//!
//! ```text
//! x' = x - alpha * F_gravity - gamma * F_inclined - F_spring
//! ```
//!
//! where `F_inclined = f'(x) + f''(x) / 2`, `F_gravity` is the sum of the
//! clipped inclination sines towards both neighbours and
//! `F_spring = -k (x - x_prev)`. The sum of spectrum values at the snaxels
//! (the "area") is tracked each iteration, and the reported baseline is the
//! linear interpolation through the snaxels of the lowest-area iteration
//! (or of the last one, see [`ReportMode`]).
//!
//! With `k > 1` the spring term amplifies the previous displacement, so
//! snaxels keep sweeping through their allowed interval rather than settling;
//! the area minimum over the sweep is what locates the baseline. Each snaxel
//! is kept inside its own cell (half the initial spacing either side of its
//! initial position) unless [`SnakeConfig::confine_to_cells`] is off.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{interpolate, Baseline, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportMode {
    /// Positions after the last iteration.
    Final,
    /// Positions of the iteration with the smallest area.
    MinArea,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SnakeConfig {
    /// Gravity weight.
    pub alpha: f64,
    /// Inclined-force weight.
    pub gamma: f64,
    /// Spring constant.
    pub k: f64,
    pub num_snaxels: usize,
    pub max_iters: usize,
    /// Keep the first and last snaxel on the first and last channel.
    pub fix_endpoints: bool,
    pub report_mode: ReportMode,
    /// Minimum gap between neighbouring snaxels, in channel units.
    pub min_separation: f64,
    /// Restrict each snaxel to half the initial spacing around its start.
    pub confine_to_cells: bool,
    /// Stop once no snaxel moved more than 1e-6 for 50 consecutive iterations.
    pub early_stop: bool,
}

impl Default for SnakeConfig {
    fn default() -> Self {
        Self {
            alpha: 0.3,
            gamma: 0.8,
            k: 1.6,
            num_snaxels: 15,
            max_iters: 2500,
            fix_endpoints: true,
            report_mode: ReportMode::MinArea,
            min_separation: 1.0,
            confine_to_cells: true,
            early_stop: false,
        }
    }
}

/// Cell half-width in units of the initial snaxel spacing.
const CELL_HALF_WIDTH: f64 = 0.5;

const EARLY_STOP_TOLERANCE: f64 = 1e-6;
const EARLY_STOP_PATIENCE: usize = 50;

impl SnakeConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("alpha", self.alpha), ("gamma", self.gamma), ("k", self.k)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::Config(format!(
                    "{name} must be finite and non-negative, got {value}"
                )));
            }
        }
        if self.num_snaxels < 3 {
            return Err(Error::Config(format!(
                "num_snaxels must be at least 3, got {}",
                self.num_snaxels
            )));
        }
        if self.max_iters < 1 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if !(self.min_separation > 0.0 && self.min_separation.is_finite()) {
            return Err(Error::Config(format!(
                "min_separation must be positive, got {}",
                self.min_separation
            )));
        }
        Ok(())
    }
}

/// Evolving snaxel positions plus the running area minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct SnakeState {
    pub positions: Vec<f64>,
    pub prev_positions: Vec<f64>,
    pub iteration: usize,
    pub best_area: f64,
    pub best_positions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnakeResult {
    pub baseline: Baseline,
    /// Snaxel positions the baseline was built from.
    pub final_positions: Vec<f64>,
    pub initial_positions: Vec<f64>,
    /// Positions after the last iteration, whatever the report mode.
    pub last_positions: Vec<f64>,
    /// Area after each iteration.
    pub area_trace: Vec<f64>,
    pub iterations_run: usize,
    /// Smallest area seen, including the initial placement.
    pub best_area: f64,
}

/// `f'(x) + 0.5 f''(x)` with both derivatives linearly interpolated from
/// their per-channel sequences.
pub fn force_inclined(spectrum: &Spectrum, x: f64) -> Result<f64> {
    spectrum.check_in_range(x)?;
    let slope = spectrum.first_derivative();
    let curvature = spectrum.second_derivative();
    Ok(inclined(spectrum.channels(), &slope, &curvature, x))
}

fn inclined(channels: &[f64], slope: &[f64], curvature: &[f64], x: f64) -> f64 {
    interpolate(channels, slope, x) + 0.5 * interpolate(channels, curvature, x)
}

/// Gravity on a snaxel at `x` between neighbours at `x_left` and `x_right`.
pub fn force_gravity(spectrum: &Spectrum, x_left: f64, x: f64, x_right: f64) -> Result<f64> {
    for c in [x_left, x, x_right] {
        spectrum.check_in_range(c)?;
    }
    let at = |c: f64| (c, interpolate(spectrum.channels(), spectrum.intensities(), c));
    Ok(gravity(Some(at(x_left)), at(x), Some(at(x_right))))
}

/// Left term `min(-(f - f_l) / d_l, 0)` plus right term
/// `max((f - f_r) / d_r, 0)`, each `d` the Euclidean distance in the
/// (channel, intensity) plane. A missing neighbour or a zero distance
/// contributes nothing.
fn gravity(left: Option<(f64, f64)>, here: (f64, f64), right: Option<(f64, f64)>) -> f64 {
    let (x, fx) = here;
    let left_term = left.map_or(0.0, |(xl, fl)| {
        let d = (x - xl).hypot(fx - fl);
        if d > 0.0 {
            (-(fx - fl) / d).min(0.0)
        } else {
            0.0
        }
    });
    let right_term = right.map_or(0.0, |(xr, fr)| {
        let d = (x - xr).hypot(fx - fr);
        if d > 0.0 {
            ((fx - fr) / d).max(0.0)
        } else {
            0.0
        }
    });
    left_term + right_term
}

/// Hooke's law against the snaxel's own previous position.
pub fn force_spring(x_current: f64, x_previous: f64, k: f64) -> f64 {
    -k * (x_current - x_previous)
}

/// Sum of the spectrum sampled at each snaxel.
pub fn area(spectrum: &Spectrum, positions: &[f64]) -> Result<f64> {
    for &x in positions {
        spectrum.check_in_range(x)?;
    }
    Ok(area_unchecked(spectrum, positions))
}

fn area_unchecked(spectrum: &Spectrum, positions: &[f64]) -> f64 {
    positions
        .iter()
        .map(|&x| interpolate(spectrum.channels(), spectrum.intensities(), x))
        .sum()
}

/// The snake bound to one spectrum, with derivative sequences and snaxel
/// cells precomputed.
#[derive(Debug, Clone)]
pub struct Snake<'a> {
    spectrum: &'a Spectrum,
    config: SnakeConfig,
    slope: Vec<f64>,
    curvature: Vec<f64>,
    homes: Vec<f64>,
    half_cell: f64,
}

impl<'a> Snake<'a> {
    pub fn new(spectrum: &'a Spectrum, config: &SnakeConfig) -> Result<Self> {
        config.validate()?;
        let n = config.num_snaxels;
        if n > spectrum.len() {
            return Err(Error::Config(format!(
                "num_snaxels ({n}) exceeds the number of channels ({})",
                spectrum.len()
            )));
        }
        let (lo, hi) = (spectrum.first_channel(), spectrum.last_channel());
        let spacing = (hi - lo) / (n - 1) as f64;
        if spacing < config.min_separation {
            return Err(Error::Config(format!(
                "{n} snaxels over [{lo}, {hi}] are {spacing} apart, closer than min_separation {}",
                config.min_separation
            )));
        }
        let homes = (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + i as f64 * spacing
                }
            })
            .collect();
        Ok(Self {
            spectrum,
            config: config.clone(),
            slope: spectrum.first_derivative(),
            curvature: spectrum.second_derivative(),
            homes,
            half_cell: spacing * CELL_HALF_WIDTH,
        })
    }

    pub fn config(&self) -> &SnakeConfig {
        &self.config
    }

    /// Evenly spaced starting positions, first and last channel included.
    pub fn home_positions(&self) -> &[f64] {
        &self.homes
    }

    /// Interval a snaxel may occupy before neighbour spacing is applied.
    pub fn cell(&self, index: usize) -> (f64, f64) {
        let (lo, hi) = (self.spectrum.first_channel(), self.spectrum.last_channel());
        if self.config.confine_to_cells {
            let home = self.homes[index];
            ((home - self.half_cell).max(lo), (home + self.half_cell).min(hi))
        } else {
            (lo, hi)
        }
    }

    fn value_at(&self, x: f64) -> f64 {
        interpolate(self.spectrum.channels(), self.spectrum.intensities(), x)
    }

    pub fn inclined_force(&self, x: f64) -> f64 {
        inclined(self.spectrum.channels(), &self.slope, &self.curvature, x)
    }

    pub fn area(&self, positions: &[f64]) -> f64 {
        area_unchecked(self.spectrum, positions)
    }

    pub fn initialize(&self) -> SnakeState {
        self.state_at(self.homes.clone())
    }

    /// A resting state at arbitrary positions. The positions must be
    /// ordered with the configured spacing and lie inside their cells.
    pub fn state_from_positions(&self, positions: Vec<f64>) -> Result<SnakeState> {
        if positions.len() != self.config.num_snaxels {
            return Err(Error::Config(format!(
                "expected {} snaxel positions, got {}",
                self.config.num_snaxels,
                positions.len()
            )));
        }
        for (i, &x) in positions.iter().enumerate() {
            let (lo, hi) = self.cell(i);
            if !(x >= lo && x <= hi) {
                return Err(Error::Config(format!(
                    "snaxel {i} at {x} outside its allowed interval [{lo}, {hi}]"
                )));
            }
        }
        if let Some(i) = positions
            .windows(2)
            .position(|w| w[1] - w[0] < self.config.min_separation)
        {
            return Err(Error::Config(format!(
                "snaxels {i} and {} closer than min_separation",
                i + 1
            )));
        }
        if self.config.fix_endpoints
            && (positions[0] != self.homes[0]
                || positions[positions.len() - 1] != self.homes[self.homes.len() - 1])
        {
            return Err(Error::Config(
                "fixed endpoints must sit on the first and last channel".into(),
            ));
        }
        Ok(self.state_at(positions))
    }

    fn state_at(&self, positions: Vec<f64>) -> SnakeState {
        let best_area = self.area(&positions);
        SnakeState {
            prev_positions: positions.clone(),
            best_positions: positions.clone(),
            positions,
            iteration: 0,
            best_area,
        }
    }

    /// One left-to-right sweep. Returns the area after the move.
    pub fn step(&self, state: &mut SnakeState) -> f64 {
        let cfg = &self.config;
        let n = state.positions.len();
        let (lo, hi) = (self.spectrum.first_channel(), self.spectrum.last_channel());
        let before = state.positions.clone();
        let movable = if cfg.fix_endpoints { 1..n - 1 } else { 0..n };

        for i in movable {
            let pos = &state.positions;
            let x = pos[i];
            let here = (x, self.value_at(x));
            // left neighbour has already moved this sweep, right has not
            let left = (i > 0).then(|| (pos[i - 1], self.value_at(pos[i - 1])));
            let right = (i + 1 < n).then(|| (pos[i + 1], self.value_at(pos[i + 1])));

            let f_gravity = gravity(left, here, right);
            let f_inclined = self.inclined_force(x);
            let f_spring = force_spring(x, state.prev_positions[i], cfg.k);
            let proposed = x - cfg.alpha * f_gravity - cfg.gamma * f_inclined - f_spring;

            let (cell_lo, cell_hi) = self.cell(i);
            let mut lower = cell_lo.max(lo);
            let mut upper = cell_hi.min(hi);
            if i > 0 {
                lower = lower.max(pos[i - 1] + cfg.min_separation);
            }
            if i + 1 < n {
                upper = upper.min(pos[i + 1] - cfg.min_separation);
            }
            let next = if proposed.is_finite() { proposed } else { x };
            // range last: rounding in the spacing bounds may not leave it
            state.positions[i] = next.max(lower).min(upper).max(lo).min(hi);
        }

        state.prev_positions = before;
        state.iteration += 1;
        let area = self.area(&state.positions);
        if area < state.best_area {
            state.best_area = area;
            state.best_positions.clone_from(&state.positions);
        }
        area
    }

    /// Linear interpolation through `(x_i, f(x_i))` on the spectrum grid,
    /// held constant beyond the outermost snaxels.
    pub fn baseline_through(&self, positions: &[f64]) -> Result<Baseline> {
        let knots_y: Vec<f64> = positions.iter().map(|&x| self.value_at(x)).collect();
        let values = self
            .spectrum
            .channels()
            .iter()
            .map(|&c| interpolate(positions, &knots_y, c))
            .collect();
        Baseline::on_grid_of(self.spectrum, values)
    }

    pub fn run(&self) -> Result<SnakeResult> {
        self.run_from(self.initialize())
    }

    pub fn run_from(&self, mut state: SnakeState) -> Result<SnakeResult> {
        let initial_positions = state.positions.clone();
        let mut area_trace = Vec::with_capacity(self.config.max_iters);
        let mut quiet = 0;
        for _ in 0..self.config.max_iters {
            area_trace.push(self.step(&mut state));
            if self.config.early_stop {
                let moved = state
                    .positions
                    .iter()
                    .zip(&state.prev_positions)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                quiet = if moved < EARLY_STOP_TOLERANCE { quiet + 1 } else { 0 };
                if quiet >= EARLY_STOP_PATIENCE {
                    break;
                }
            }
        }
        let reported = match self.config.report_mode {
            ReportMode::MinArea => state.best_positions.clone(),
            ReportMode::Final => state.positions.clone(),
        };
        Ok(SnakeResult {
            baseline: self.baseline_through(&reported)?,
            final_positions: reported,
            initial_positions,
            last_positions: state.positions,
            iterations_run: area_trace.len(),
            area_trace,
            best_area: state.best_area,
        })
    }
}

pub fn initialize_snaxels(spectrum: &Spectrum, config: &SnakeConfig) -> Result<SnakeState> {
    Ok(Snake::new(spectrum, config)?.initialize())
}

pub fn update_step(
    spectrum: &Spectrum,
    state: &SnakeState,
    config: &SnakeConfig,
) -> Result<SnakeState> {
    let snake = Snake::new(spectrum, config)?;
    let mut next = state.clone();
    snake.step(&mut next);
    Ok(next)
}

pub fn run_snake(spectrum: &Spectrum, config: &SnakeConfig) -> Result<SnakeResult> {
    Snake::new(spectrum, config)?.run()
}
