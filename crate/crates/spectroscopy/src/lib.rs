//! Avoided-crossing spectroscopy, from raw transmission maps to fitted
//! polariton models.
//!
//! The pipeline has three movable parts that also work alone:
//!
//! * [`map`] — synthesize or load field-frequency transmission maps,
//! * [`ridge`] — reduce a map to weighted ridge points per branch,
//! * [`fit`] — fit hybrid-mode models to ridge sets in stages: linear
//!   Zeeman dispersion, free-form polynomial magnon lines, and smooth
//!   turnover dispersions for materials with a folded branch.

pub mod fit;
pub mod lm;
pub mod map;
pub mod ridge;

pub use fit::{
    fit_avoided_crossing, fit_linear, fit_polynomial_magnon, fit_turnover, invert_to_magnon,
    usc_bound, FitError, FitParameter, FitResult, FitStage, LinearStageOptions,
    PolynomialStageOptions, TurnoverStageOptions, UscBound,
};
pub use lm::{LmConfig, LmError, LmOutcome};
pub use map::{synth_s21_map, MapError, SpectralMap, SynthConfig};
pub use ridge::{extract_ridges, ExtractConfig, RidgeError, RidgePoint, RidgeSet};
