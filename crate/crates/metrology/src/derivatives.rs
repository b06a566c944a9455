//! Closed-form field derivatives of the CMP transition frequency.
//!
//! In the rotating-wave form the transition frequency obeys
//! `omega_CMP² = Delta² + 4 g²` with detuning `Delta = omega_c - omega_m(B)`,
//! so with magnon-line derivatives `m1 = d omega_m / dB` and
//! `m2 = d² omega_m / dB²`:
//!
//! ```text
//! d omega_CMP / dB  = -Delta · m1 / omega_CMP
//! d² omega_CMP / dB² = ( 4 g² m1² / omega_CMP² - Delta · m2 ) / omega_CMP
//! ```
//!
//! Both vanish together exactly when the modes cross (`Delta = 0`) at a
//! magnon turning point (`m1 = 0`), whatever the curvature `m2` — the
//! double suppression that motivates turnover-based operating points.

use thiserror::Error;

use polariton_core::{HybridModel, ModelError};

#[derive(Debug, Error)]
pub enum MetrologyError {
    #[error(
        "transition frequency vanishes at B = {b_t} T (zero coupling at zero detuning); \
         derivatives are undefined"
    )]
    DegenerateTransition { b_t: f64 },
    #[error("bracket [{lo} T, {hi} T] is not an ascending interval")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("magnon line has no turning point inside [{lo} T, {hi} T]")]
    NoTurningPoint { lo: f64, hi: f64 },
    #[error("magnon line has {count} turning points inside the bracket; pass a tighter one")]
    MultipleTurningPoints { count: usize },
    #[error(
        "point fails the magic-point thresholds: |d1| = {d1_ghz_per_t} GHz/T (limit \
         {d1_limit}), |d2| = {d2_ghz_per_t2} GHz/T² (limit {d2_limit})"
    )]
    ThresholdExceeded {
        d1_ghz_per_t: f64,
        d1_limit: f64,
        d2_ghz_per_t2: f64,
        d2_limit: f64,
    },
    #[error("scan needs at least 2 points, got {0}")]
    ScanTooSmall(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// First and second derivatives of the CMP transition frequency with
/// respect to the bias field, `(GHz/T, GHz/T²)`, evaluated in closed form
/// from the dispersion's analytic derivatives.
pub fn cmp_derivatives(model: &HybridModel, b_t: f64) -> Result<(f64, f64), MetrologyError> {
    let omega_cmp = model.transition_frequency_ghz(b_t);
    if omega_cmp <= 0.0 {
        return Err(MetrologyError::DegenerateTransition { b_t });
    }
    let delta = model.omega_c_ghz - model.magnon_frequency_ghz(b_t);
    let (m1, m2) = model.dispersion.derivatives(b_t);
    let g = model.g_cm_ghz;
    let d1 = -delta * m1 / omega_cmp;
    let d2 = (4.0 * g * g * m1 * m1 / (omega_cmp * omega_cmp) - delta * m2) / omega_cmp;
    Ok((d1, d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use polariton_core::{MagnonDispersion, PolynomialDispersion};

    #[test]
    fn first_derivative_vanishes_exactly_on_resonance() {
        // omega_c built from the same product as omega_m(B) so the
        // detuning is bitwise zero, whatever the slope
        let dispersion = MagnonDispersion::linear(2.0, 0.0);
        let b = 0.2;
        let omega_c = dispersion.frequency_ghz(b);
        let model = HybridModel::new(omega_c, 0.5, dispersion).unwrap();
        let (d1, d2) = cmp_derivatives(&model, b).unwrap();
        assert_eq!(d1, 0.0);
        // at resonance the quadratic term survives: d2 = m1² / (2 g)
        let slope = polariton_core::constants::zeeman_slope_ghz_per_t(2.0);
        assert_relative_eq!(d2, slope * slope / (2.0 * 0.5), max_relative = 1e-12);
    }

    #[test]
    fn both_derivatives_vanish_at_a_resonant_turning_point() {
        // omega_m = 5 - 80 (B - 0.2)², written out so the turning point
        // falls exactly on B = 0.2; the curvature there is large and must
        // not leak into d2
        let c = -80.0;
        let coeffs = vec![5.0 + c * 0.04, -0.4 * c, c];
        let dispersion = MagnonDispersion::Polynomial(PolynomialDispersion::new(coeffs));
        let b = 0.2;
        let (m1, m2) = dispersion.derivatives(b);
        assert_eq!(m1, 0.0);
        assert_relative_eq!(m2, 2.0 * c, max_relative = 1e-12);

        let omega_c = dispersion.frequency_ghz(b);
        let model = HybridModel::new(omega_c, 0.169, dispersion).unwrap();
        let (d1, d2) = cmp_derivatives(&model, b).unwrap();
        assert_eq!(d1, 0.0);
        assert_eq!(d2, 0.0);
        // and the transition itself sits at exactly twice the coupling
        assert_eq!(model.transition_frequency_ghz(b), 2.0 * 0.169);
    }

    #[test]
    fn degenerate_transition_is_an_error_not_a_nan() {
        // zero coupling at zero detuning: omega_CMP = 0
        let dispersion = MagnonDispersion::linear(2.0, 0.0);
        let b = 0.25;
        let omega_c = dispersion.frequency_ghz(b);
        let model = HybridModel::new(omega_c, 0.0, dispersion).unwrap();
        let err = cmp_derivatives(&model, b).unwrap_err();
        assert!(matches!(err, MetrologyError::DegenerateTransition { .. }));
    }

    #[test]
    fn detuned_linear_line_matches_the_hand_expansion() {
        // far from resonance omega_CMP ≈ |Delta| and d1 ≈ -sign(Delta)·m1
        let dispersion = MagnonDispersion::linear(2.0, 0.0);
        let model = HybridModel::new(20.0, 0.01, dispersion.clone()).unwrap();
        let b = 0.1; // omega_m ≈ 2.8 GHz, Delta ≈ +17.2 GHz
        let (d1, _) = cmp_derivatives(&model, b).unwrap();
        let (m1, _) = dispersion.derivatives(b);
        assert_relative_eq!(d1, -m1, max_relative = 1e-5);
    }
}
