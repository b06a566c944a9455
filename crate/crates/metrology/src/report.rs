//! Sensitivity reports for magic-point operation.
//!
//! A report pins the cavity exactly onto the magnon turning-point
//! frequency, evaluates the transition-frequency derivatives there,
//! checks them against configurable magic-point thresholds, and
//! quantifies the benefit by comparing the second derivative against a
//! deliberately detuned baseline cavity.

use std::io::Write as _;

use serde::{Deserialize, Serialize};

use polariton_core::{HybridModel, MagnonDispersion};

use crate::derivatives::{cmp_derivatives, MetrologyError};
use crate::magic::magic_point_search;

/// Thresholds and scan layout for [`sensitivity_report`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SensitivityConfig {
    /// Baseline detuning for the suppression ratio, in units of the
    /// coupling rate.
    pub detune_in_g: f64,
    /// Largest first derivative accepted at a magic point, GHz/T.
    pub d1_threshold_ghz_per_t: f64,
    /// Largest second derivative accepted at a magic point, GHz/T².
    pub d2_threshold_ghz_per_t2: f64,
    /// Rows in the field scan table.
    pub scan_points: usize,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        Self {
            detune_in_g: 5.0,
            d1_threshold_ghz_per_t: 1e-3,
            d2_threshold_ghz_per_t2: 1.0,
            scan_points: 401,
        }
    }
}

/// One row of the field scan: transition frequency and its derivatives
/// for the magic (cavity-on-turning-point) configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScanRow {
    pub b_t: f64,
    pub omega_cmp_ghz: f64,
    pub d1_ghz_per_t: f64,
    pub d2_ghz_per_t2: f64,
}

/// Magic-point location, derivatives, suppression ratio, and scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityReport {
    /// Magic field: the magnon-line turning point, tesla.
    pub b_star_t: f64,
    /// Cavity frequency required for double suppression: the magnon
    /// frequency at `b_star_t`, GHz.
    pub omega_c_required_ghz: f64,
    /// Coupling rate the report was evaluated at, GHz.
    pub g_cm_ghz: f64,
    /// Transition frequency at the magic point (exactly `2 g`), GHz.
    pub omega_cmp_ghz: f64,
    /// First transition derivative at the magic point, GHz/T.
    pub d1_ghz_per_t: f64,
    /// Second transition derivative at the magic point, GHz/T².
    pub d2_ghz_per_t2: f64,
    /// `|d2|` of a cavity detuned by `detune_in_g · g`, divided by `|d2|`
    /// at the magic point.
    pub suppression_ratio_d2: f64,
    pub config: SensitivityConfig,
    pub scan: Vec<ScanRow>,
}

/// Builds the full magic-point report for a dispersion and coupling rate.
///
/// The search bracket must contain exactly one magnon turning point.  The
/// report errors — it is not merely annotated — when the derivatives at
/// the located point exceed the configured thresholds, so a report in
/// hand is evidence of suppression.
pub fn sensitivity_report(
    dispersion: &MagnonDispersion,
    g_cm_ghz: f64,
    bracket_t: [f64; 2],
    config: &SensitivityConfig,
) -> Result<SensitivityReport, MetrologyError> {
    if config.scan_points < 2 {
        return Err(MetrologyError::ScanTooSmall(config.scan_points));
    }
    let (b_star, omega_target) = magic_point_search(dispersion, bracket_t)?;

    let magic = HybridModel::new(omega_target, g_cm_ghz, dispersion.clone())?;
    let (d1, d2) = cmp_derivatives(&magic, b_star)?;
    if d1.abs() >= config.d1_threshold_ghz_per_t || d2.abs() >= config.d2_threshold_ghz_per_t2 {
        return Err(MetrologyError::ThresholdExceeded {
            d1_ghz_per_t: d1.abs(),
            d1_limit: config.d1_threshold_ghz_per_t,
            d2_ghz_per_t2: d2.abs(),
            d2_limit: config.d2_threshold_ghz_per_t2,
        });
    }

    // baseline: an otherwise identical cavity detuned by a few couplings
    let detuned = HybridModel::new(
        omega_target + config.detune_in_g * g_cm_ghz,
        g_cm_ghz,
        dispersion.clone(),
    )?;
    let (_, d2_detuned) = cmp_derivatives(&detuned, b_star)?;
    // the magic |d2| can underflow to zero; keep the ratio finite and
    // serializable rather than emitting infinity
    let suppression_ratio_d2 = d2_detuned.abs() / d2.abs().max(1e-300);

    let [lo, hi] = bracket_t;
    let step = (hi - lo) / (config.scan_points - 1) as f64;
    let mut scan = Vec::with_capacity(config.scan_points);
    for i in 0..config.scan_points {
        let b = if i == config.scan_points - 1 {
            hi
        } else {
            lo + step * i as f64
        };
        let (row_d1, row_d2) = cmp_derivatives(&magic, b)?;
        scan.push(ScanRow {
            b_t: b,
            omega_cmp_ghz: magic.transition_frequency_ghz(b),
            d1_ghz_per_t: row_d1,
            d2_ghz_per_t2: row_d2,
        });
    }

    Ok(SensitivityReport {
        b_star_t: b_star,
        omega_c_required_ghz: omega_target,
        g_cm_ghz,
        omega_cmp_ghz: magic.transition_frequency_ghz(b_star),
        d1_ghz_per_t: d1,
        d2_ghz_per_t2: d2,
        suppression_ratio_d2,
        config: *config,
        scan,
    })
}

const SCAN_HEADER: [&str; 4] = ["b_tesla", "omega_cmp_ghz", "d1_ghz_per_t", "d2_ghz_per_t2"];

/// Writes the scan table as CSV with leading `#` comment lines.
pub fn write_scan(report: &SensitivityReport, comments: &[String], out: &mut Vec<u8>) {
    for comment in comments {
        writeln!(out, "# {comment}").expect("writing to memory cannot fail");
    }
    writeln!(out, "{}", SCAN_HEADER.join(",")).expect("writing to memory cannot fail");
    for row in &report.scan {
        writeln!(
            out,
            "{},{},{},{}",
            row.b_t, row.omega_cmp_ghz, row.d1_ghz_per_t, row.d2_ghz_per_t2
        )
        .expect("writing to memory cannot fail");
    }
}
