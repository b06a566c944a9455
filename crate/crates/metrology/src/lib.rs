//! Field-noise metrology of the cavity-magnon polariton transition.
//!
//! The polariton transition frequency `omega_CMP = omega_+ - omega_-`
//! inherits fluctuations of the bias field through the magnon line.  Its
//! first field derivative vanishes wherever the bare modes cross; if the
//! magnon line simultaneously passes through a turning point, the second
//! derivative vanishes too and the transition is insensitive to field
//! noise at second order — a *double-magic* operating point.
//!
//! This crate evaluates the closed-form first and second derivatives,
//! locates magnon-line turning points, and assembles suppression reports
//! that compare the magic configuration against a detuned baseline.

pub mod derivatives;
pub mod magic;
pub mod report;

pub use derivatives::{cmp_derivatives, MetrologyError};
pub use magic::magic_point_search;
pub use report::{sensitivity_report, write_scan, ScanRow, SensitivityConfig, SensitivityReport};
