//! Physical constants (CODATA 2018).
//!
//! This module is the single source of truth for every constant used in the
//! workspace; nothing else hard-codes a physical value.

/// Bohr magneton divided by the Planck constant, GHz/T.
///
/// Multiplying by an effective g-factor gives the Zeeman tuning slope of a
/// magnon line in linear frequency.
pub const BOHR_MAGNETON_OVER_PLANCK_GHZ_PER_T: f64 = 13.996244936;

/// Vacuum magnetic permeability, T·m/A.
pub const VACUUM_PERMEABILITY_SI: f64 = 1.25663706212e-6;

/// Reduced Planck constant, J·s.
pub const REDUCED_PLANCK_SI: f64 = 1.054571817e-34;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// Bundle of the constants above, convenient to pass around and to freeze in
/// serialized reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// GHz/T
    pub bohr_magneton_over_planck_ghz_per_t: f64,
    /// T·m/A
    pub vacuum_permeability_si: f64,
    /// J·s
    pub reduced_planck_si: f64,
    /// m/s
    pub speed_of_light_m_per_s: f64,
}

impl PhysicalConstants {
    pub const CODATA: Self = Self {
        bohr_magneton_over_planck_ghz_per_t: BOHR_MAGNETON_OVER_PLANCK_GHZ_PER_T,
        vacuum_permeability_si: VACUUM_PERMEABILITY_SI,
        reduced_planck_si: REDUCED_PLANCK_SI,
        speed_of_light_m_per_s: SPEED_OF_LIGHT_M_PER_S,
    };

    /// Electron-style gyromagnetic ratio for a given g-factor, rad/(s·T).
    ///
    /// `gamma = g * mu_B / hbar = g * 2π * (mu_B / h)`.
    pub fn gyromagnetic_ratio_rad_per_s_t(&self, g_factor: f64) -> f64 {
        g_factor * std::f64::consts::TAU * self.bohr_magneton_over_planck_ghz_per_t * 1e9
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// Zeeman tuning slope for an effective g-factor, GHz/T.
pub fn zeeman_slope_ghz_per_t(g_eff: f64) -> f64 {
    g_eff * BOHR_MAGNETON_OVER_PLANCK_GHZ_PER_T
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bohr_magneton_over_planck_matches_reference_value() {
        // Accepted value 13.996245 GHz/T to the figures quoted in most
        // microwave-magnonics work.
        let rel = (BOHR_MAGNETON_OVER_PLANCK_GHZ_PER_T - 13.996245).abs() / 13.996245;
        assert!(rel < 1e-6, "relative deviation {rel} exceeds 1e-6");
    }

    #[test]
    fn gyromagnetic_ratio_for_g2_is_the_textbook_value() {
        // gamma = 2 mu_B / hbar = 1.75882e11 rad/(s·T), i.e. gamma/2π ≈ 28 GHz/T.
        let gamma = PhysicalConstants::CODATA.gyromagnetic_ratio_rad_per_s_t(2.0);
        assert!((gamma - 1.758_820_0e11).abs() / 1.758_820_0e11 < 1e-5);
    }
}
