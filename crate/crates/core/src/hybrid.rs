//! Hybridized cavity-magnon modes.
//!
//! Diagonalizing the full quadratic photon-magnon Hamiltonian — rotating and
//! counter-rotating terms together — gives the polariton eigenfrequencies
//!
//! ```text
//! omega_±² = (omega_c² + omega_m²)/2
//!            ± sqrt( ((omega_c² - omega_m²)/2)² + 4 omega_c omega_m g² )
//! ```
//!
//! The expression is exact for any coupling strength.  When
//! `g > sqrt(omega_c * omega_m) / 2` the lower squared eigenfrequency turns
//! negative: the mode softens and the closed form has no real solution.
//! That situation is surfaced as [`ModelError::ModeSoftening`], never
//! clamped or silently NaN'd.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispersion::MagnonDispersion;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("cavity frequency must be positive, got {0} GHz")]
    NonPositiveCavity(f64),
    #[error("coupling rate must be non-negative, got {0} GHz")]
    NegativeCoupling(f64),
    #[error("blend width must be positive, got {0} GHz")]
    NonPositiveBlendWidth(f64),
    #[error(
        "mode softening: no real lower eigenfrequency for omega_c = {omega_c_ghz} GHz, \
         omega_m = {omega_m_ghz} GHz, g = {g_cm_ghz} GHz (stability requires \
         g <= sqrt(omega_c * omega_m) / 2)"
    )]
    ModeSoftening {
        omega_c_ghz: f64,
        omega_m_ghz: f64,
        g_cm_ghz: f64,
    },
}

/// One cavity mode coupled to one field-tuned magnon mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridModel {
    /// Bare cavity frequency, GHz.
    pub omega_c_ghz: f64,
    /// Photon-magnon coupling rate, GHz (half the minimum splitting).
    pub g_cm_ghz: f64,
    /// Bare magnon dispersion law.
    pub dispersion: MagnonDispersion,
}

impl HybridModel {
    pub fn new(
        omega_c_ghz: f64,
        g_cm_ghz: f64,
        dispersion: MagnonDispersion,
    ) -> Result<Self, ModelError> {
        if !(omega_c_ghz > 0.0) {
            return Err(ModelError::NonPositiveCavity(omega_c_ghz));
        }
        if !(g_cm_ghz >= 0.0) {
            return Err(ModelError::NegativeCoupling(g_cm_ghz));
        }
        if let MagnonDispersion::SmoothTurnover(t) = &dispersion {
            if !(t.blend_width_ghz > 0.0) {
                return Err(ModelError::NonPositiveBlendWidth(t.blend_width_ghz));
            }
        }
        Ok(Self {
            omega_c_ghz,
            g_cm_ghz,
            dispersion,
        })
    }

    /// Bare magnon frequency at field `b_t`, GHz.
    pub fn magnon_frequency_ghz(&self, b_t: f64) -> f64 {
        self.dispersion.frequency_ghz(b_t)
    }

    /// Full polariton eigenfrequencies `(omega_-, omega_+)` at field `b_t`.
    pub fn eigenfrequencies_ghz(&self, b_t: f64) -> Result<(f64, f64), ModelError> {
        eigenfrequencies_from_parts(
            self.omega_c_ghz,
            self.magnon_frequency_ghz(b_t),
            self.g_cm_ghz,
        )
    }

    /// Rotating-wave eigenfrequencies `(omega_-, omega_+)` at field `b_t`.
    pub fn eigenfrequencies_rwa_ghz(&self, b_t: f64) -> (f64, f64) {
        rwa_eigenfrequencies_from_parts(
            self.omega_c_ghz,
            self.magnon_frequency_ghz(b_t),
            self.g_cm_ghz,
        )
    }

    /// Polariton transition frequency `omega_+ - omega_-` in the
    /// rotating-wave approximation:
    /// `omega_CMP = 2 sqrt(((omega_c - omega_m)/2)² + g²)`.
    ///
    /// Equal to the difference of [`Self::eigenfrequencies_rwa_ghz`] by
    /// construction, and bounded below by `2 g`.
    pub fn transition_frequency_ghz(&self, b_t: f64) -> f64 {
        let omega_m = self.magnon_frequency_ghz(b_t);
        2.0 * f64::hypot(0.5 * (self.omega_c_ghz - omega_m), self.g_cm_ghz)
    }
}

/// Full (beyond rotating-wave) eigenfrequencies for explicit mode
/// frequencies.  Inputs and outputs in GHz; output sorted ascending.
pub fn eigenfrequencies_from_parts(
    omega_c_ghz: f64,
    omega_m_ghz: f64,
    g_cm_ghz: f64,
) -> Result<(f64, f64), ModelError> {
    let wc2 = omega_c_ghz * omega_c_ghz;
    let wm2 = omega_m_ghz * omega_m_ghz;
    let mean = 0.5 * (wc2 + wm2);
    let inner = 0.25 * (wc2 - wm2) * (wc2 - wm2)
        + 4.0 * omega_c_ghz * omega_m_ghz * g_cm_ghz * g_cm_ghz;
    let softening = ModelError::ModeSoftening {
        omega_c_ghz,
        omega_m_ghz,
        g_cm_ghz,
    };
    if inner < 0.0 {
        // possible only for omega_c * omega_m < 0
        return Err(softening);
    }
    let root = inner.sqrt();
    let lower_sq = mean - root;
    if lower_sq < 0.0 {
        return Err(softening);
    }
    Ok((lower_sq.sqrt(), (mean + root).sqrt()))
}

/// Rotating-wave eigenfrequencies for explicit mode frequencies, sorted
/// ascending:
/// `omega_± = (omega_c + omega_m)/2 ± sqrt(((omega_c - omega_m)/2)² + g²)`.
pub fn rwa_eigenfrequencies_from_parts(
    omega_c_ghz: f64,
    omega_m_ghz: f64,
    g_cm_ghz: f64,
) -> (f64, f64) {
    let mid = 0.5 * (omega_c_ghz + omega_m_ghz);
    let half_split = f64::hypot(0.5 * (omega_c_ghz - omega_m_ghz), g_cm_ghz);
    (mid - half_split, mid + half_split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uncoupled_limit_returns_bare_frequencies() {
        let (lo, hi) = eigenfrequencies_from_parts(5.0, 7.0, 0.0).unwrap();
        assert_eq!((lo, hi), (5.0, 7.0));
    }

    #[test]
    fn degenerate_point_has_closed_form_sqrt_shift() {
        // at omega_c = omega_m = omega the exact branches are
        // omega * sqrt(1 ± 2 g / omega)
        let omega = 5.56;
        let g = 0.169;
        let (lo, hi) = eigenfrequencies_from_parts(omega, omega, g).unwrap();
        assert_relative_eq!(lo, omega * (1.0 - 2.0 * g / omega).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(hi, omega * (1.0 + 2.0 * g / omega).sqrt(), max_relative = 1e-12);
        assert_abs_diff_eq!(lo, 5.388, epsilon = 1e-3);
        assert_abs_diff_eq!(hi, 5.727, epsilon = 1e-3);
    }

    #[test]
    fn rwa_agrees_with_full_form_at_weak_coupling() {
        // g / omega_c = 0.01, a spread of detunings: deviation stays below
        // 1e-4 of omega_c on both branches (the counter-rotating correction
        // is bounded by g²/(omega_c + omega_m) ≤ g²/omega_c)
        let omega_c = 5.0;
        let g = 0.05;
        for omega_m in [1.0, 2.5, 4.0, 4.9, 5.0, 5.1, 6.5, 9.0, 20.0] {
            let (lo, hi) = eigenfrequencies_from_parts(omega_c, omega_m, g).unwrap();
            let (rlo, rhi) = rwa_eigenfrequencies_from_parts(omega_c, omega_m, g);
            assert!((lo - rlo).abs() / omega_c < 1e-4);
            assert!((hi - rhi).abs() / omega_c < 1e-4);
        }
    }

    #[test]
    fn rwa_error_scales_with_coupling_ratio_squared() {
        // for g/omega_c < 0.05 the RWA deviates by less than 10 (g/omega)²
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let omega_c = rng.gen_range(2.0..12.0);
            let ratio = rng.gen_range(1e-3..0.05);
            let g = ratio * omega_c;
            let omega_m = omega_c * rng.gen_range(0.5..1.5);
            let (lo, hi) = eigenfrequencies_from_parts(omega_c, omega_m, g).unwrap();
            let (rlo, rhi) = rwa_eigenfrequencies_from_parts(omega_c, omega_m, g);
            let bound = 10.0 * ratio * ratio;
            assert!(
                ((lo - rlo) / lo).abs() < bound,
                "lower branch: omega_c={omega_c} omega_m={omega_m} g={g}"
            );
            assert!(
                ((hi - rhi) / hi).abs() < bound,
                "upper branch: omega_c={omega_c} omega_m={omega_m} g={g}"
            );
        }
    }

    #[test]
    fn transition_equals_rwa_branch_difference() {
        let model = HybridModel::new(5.870, 2.690, MagnonDispersion::linear(2.061, 0.1231))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let b = rng.gen_range(0.0..1.2);
            let (lo, hi) = model.eigenfrequencies_rwa_ghz(b);
            let omega_cmp = model.transition_frequency_ghz(b);
            assert_relative_eq!(omega_cmp, hi - lo, max_relative = 1e-12);
            assert!(omega_cmp >= 2.0 * model.g_cm_ghz * (1.0 - 1e-15));
        }
    }

    #[test]
    fn transition_minimum_is_twice_the_coupling() {
        let model = HybridModel::new(5.870, 2.690, MagnonDispersion::linear(2.061, 0.1231))
            .unwrap();
        // the minimum over field sits where omega_m = omega_c and equals 2g
        let b_res = 5.870 / (2.061 * crate::constants::BOHR_MAGNETON_OVER_PLANCK_GHZ_PER_T)
            - 0.1231;
        let at_res = model.transition_frequency_ghz(b_res);
        assert_relative_eq!(at_res, 2.0 * 2.690, max_relative = 1e-9);
        for db in [-0.05, -0.01, 0.01, 0.05] {
            assert!(model.transition_frequency_ghz(b_res + db) > at_res);
        }
    }

    #[test]
    fn branches_repel_the_bare_frequencies() {
        // omega_- <= min(omega_c, omega_m) and omega_+ >= max(omega_c, omega_m)
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..500 {
            let omega_c: f64 = rng.gen_range(2.0..12.0);
            let omega_m = omega_c * rng.gen_range(0.3..2.5);
            let g_max = 0.5 * (omega_c * omega_m).sqrt();
            let g = rng.gen_range(0.0..0.98 * g_max);
            let (lo, hi) = eigenfrequencies_from_parts(omega_c, omega_m, g).unwrap();
            let slack = 1e-12 * omega_c.max(omega_m);
            assert!(lo <= omega_c.min(omega_m) + slack);
            assert!(hi >= omega_c.max(omega_m) - slack);
        }
    }

    #[test]
    fn mode_softening_is_an_error_not_a_nan() {
        // g beyond sqrt(omega_c omega_m)/2 must refuse, not produce NaN
        let err = eigenfrequencies_from_parts(5.0, 5.0, 2.6).unwrap_err();
        assert!(matches!(err, ModelError::ModeSoftening { .. }));
        // just inside the stability bound still works
        let (lo, _) = eigenfrequencies_from_parts(5.0, 5.0, 2.4999).unwrap();
        assert!(lo > 0.0 && lo.is_finite());
    }

    #[test]
    fn constructor_rejects_invalid_parameters() {
        assert!(matches!(
            HybridModel::new(-1.0, 0.1, MagnonDispersion::linear(2.0, 0.0)),
            Err(ModelError::NonPositiveCavity(_))
        ));
        assert!(matches!(
            HybridModel::new(5.0, -0.1, MagnonDispersion::linear(2.0, 0.0)),
            Err(ModelError::NegativeCoupling(_))
        ));
        let bad_blend = MagnonDispersion::SmoothTurnover(crate::dispersion::SmoothTurnover::new(
            crate::dispersion::LinearZeeman::new(2.0, 0.0),
            crate::dispersion::LinearZeeman::new(-0.7, -0.7),
            0.0,
        ));
        assert!(matches!(
            HybridModel::new(5.0, 0.1, bad_blend),
            Err(ModelError::NonPositiveBlendWidth(_))
        ));
    }
}
