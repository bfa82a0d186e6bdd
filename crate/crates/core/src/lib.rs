//! Baseline removal for one-dimensional spectra with a force-driven active
//! contour, plus a seeded synthetic Raman benchmark and figures-of-merit
//! evaluation.
//!
//! ```
//! use snake1d::{run_snake, subtract_baseline, SnakeConfig, Spectrum};
//!
//! let spectrum = Spectrum::from_intensities(
//!     (0..200).map(|i| 0.01 * i as f64 + (-((i as f64 - 80.0) / 4.0).powi(2)).exp()).collect(),
//! )?;
//! let result = run_snake(&spectrum, &SnakeConfig::default())?;
//! let corrected = subtract_baseline(&spectrum, &result.baseline)?;
//! assert_eq!(corrected.len(), spectrum.len());
//! # Ok::<(), snake1d::Error>(())
//! ```

pub mod commands;
pub mod config;
pub mod error;
pub mod eval;
pub mod io;
pub mod plot;
pub mod snake;
pub mod spectrum;
pub mod synth;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use eval::{
    chi_squared, evaluate_single, evaluate_suite, pearson_r, FomReport, RegionMap, SuiteSummary,
};
pub use io::{read_spectrum_csv, write_baseline_csv, write_spectrum_csv};
pub use plot::render_svg;
pub use snake::{
    area, force_gravity, force_inclined, force_spring, initialize_snaxels, run_snake,
    update_step, ReportMode, Snake, SnakeConfig, SnakeResult, SnakeState,
};
pub use spectrum::{gaussian_convolve, subtract_baseline, Baseline, Spectrum};
pub use synth::{
    generate, generate_suite, noise_std, pure_signal, sigmoid_baseline, PeakSpec,
    SyntheticSpec, SyntheticSpectrum,
};
