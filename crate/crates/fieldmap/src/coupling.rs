//! Coupling rates and overlap factors from field maps.
//!
//! With the static field along z, the cavity's transverse magnetic field
//! couples to the sample's macrospin.  Writing the normalized transverse
//! overlap integrals
//!
//! ```text
//! I_k = ∫_sample H_k dV / sqrt(∫_all |H|² dV),        k ∈ {x, y, z}
//! ```
//!
//! the form factor is `η = sqrt(I_x² + I_y²) / sqrt(V_m)` and the coupling
//! rate follows with no free parameter:
//!
//! ```text
//! g_cm = (γ/2) η sqrt(μ₀ ρ_S ħ ω_c),    ρ_S = macrospin density.
//! ```
//!
//! η compares the *linear* average of the transverse field over the sample
//! with the *quadratic* average over all space, so it rewards both
//! concentration of the field in the sample and phase-uniformity across it;
//! `0 ≤ η ≤ 1` with equality only for a perfectly uniform transverse mode
//! confined to the sample.

use polariton_core::constants::PhysicalConstants;
use serde::{Deserialize, Serialize};

use crate::materials::MaterialSpec;
use crate::quadrature::{integrate, FieldIntegrals};
use crate::types::{FieldMap, FieldMapError};

/// Per-quadrature coupling rates of one field map and material, GHz.
///
/// `g_x` and `g_z` keep the sign of their overlap integral; `g_y` is the
/// magnitude of the y-quadrature coupling (its `i` phase factor is absorbed,
/// only `g_x² + g_y²` is observable).  `omega_z` is the collective
/// longitudinal shift, `omega_z = -S g_z` for total macrospin `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingComponents {
    pub g_x_ghz: f64,
    pub g_y_ghz: f64,
    pub g_z_ghz: f64,
    pub omega_z_ghz: f64,
    /// `sqrt(g_x² + g_y²)`, the rate entering the two-mode model.
    pub g_transverse_ghz: f64,
}

const TAU_E9: f64 = std::f64::consts::TAU * 1e9;

fn checked_integrals(map: &FieldMap) -> Result<FieldIntegrals, FieldMapError> {
    let integrals = integrate(map);
    if integrals.sample_volume_m3 <= 0.0 {
        return Err(FieldMapError::NoSampleCells);
    }
    if integrals.h_energy_all <= 0.0 {
        return Err(FieldMapError::ZeroMagneticEnergy);
    }
    Ok(integrals)
}

/// Transverse form factor `η` of the map, dimensionless in `[0, 1]`.
pub fn form_factor(map: &FieldMap) -> Result<f64, FieldMapError> {
    let i = checked_integrals(map)?;
    let transverse_sq = i.hx_sample * i.hx_sample + i.hy_sample * i.hy_sample;
    let mut eta = (transverse_sq / (i.sample_volume_m3 * i.h_energy_all)).sqrt();
    if eta > 1.0 {
        // Cauchy-Schwarz bounds η by 1; anything beyond rounding is a bug
        assert!(eta < 1.0 + 1e-9, "form factor {eta} exceeds 1 beyond rounding");
        eta = 1.0;
    }
    Ok(eta)
}

/// Magnetic filling factor `ζ_m = ∫_sample |H|² dV / ∫_all |H|² dV`.
pub fn filling_factor_magnetic(map: &FieldMap) -> Result<f64, FieldMapError> {
    let i = checked_integrals(map)?;
    Ok((i.h_energy_sample / i.h_energy_all).clamp(0.0, 1.0))
}

/// Electric filling factor
/// `ζ_e = ∫_sample ε_r |E|² dV / ∫_all ε_r |E|² dV`.
///
/// Uses `FieldMap::sample_eps_r` for sample cells (default 1).
pub fn filling_factor_electric(map: &FieldMap) -> Result<f64, FieldMapError> {
    let i = integrate(map);
    if i.sample_volume_m3 <= 0.0 {
        return Err(FieldMapError::NoSampleCells);
    }
    if i.e_energy_all <= 0.0 {
        return Err(FieldMapError::ZeroElectricEnergy);
    }
    Ok((i.e_energy_sample / i.e_energy_all).clamp(0.0, 1.0))
}

/// Coupling rate from the form factor and material parameters, GHz:
/// `g_cm = (γ/2) η sqrt(μ₀ ρ_S ħ ω_c) / 2π`.
pub fn first_principles_coupling(
    eta: f64,
    omega_c_ghz: f64,
    material: &MaterialSpec,
) -> f64 {
    let k = PhysicalConstants::CODATA;
    let gamma = k.gyromagnetic_ratio_rad_per_s_t(material.g_factor);
    let omega_rad = omega_c_ghz * TAU_E9;
    let rho_s = material.macrospin_density_per_m3();
    0.5 * gamma * eta * (k.vacuum_permeability_si * rho_s * k.reduced_planck_si * omega_rad).sqrt()
        / TAU_E9
}

/// Per-quadrature coupling rates.  Identical physics to
/// [`first_principles_coupling`], resolved by quadrature:
/// `g_x² + g_y²` reproduces the form-factor route exactly.
pub fn coupling_components(
    map: &FieldMap,
    material: &MaterialSpec,
) -> Result<CouplingComponents, FieldMapError> {
    let i = checked_integrals(map)?;
    let k = PhysicalConstants::CODATA;
    let gamma = k.gyromagnetic_ratio_rad_per_s_t(material.g_factor);
    let omega_rad = map.omega_c_ghz * TAU_E9;
    let v_m = i.sample_volume_m3;
    let rho_s = material.macrospin_density_per_m3();
    let total_spin = rho_s * v_m;
    let norm = i.h_energy_all.sqrt();

    // normalized overlap integrals, m^{3/2}
    let ix = i.hx_sample / norm;
    let iy = i.hy_sample / norm;
    let iz = i.hz_sample / norm;

    // transverse quadratures share one prefactor; the longitudinal single-
    // spin rate carries 1/V_m and no sqrt(S)
    let transverse_scale = 0.5 * gamma / v_m
        * (k.vacuum_permeability_si * k.reduced_planck_si * total_spin * omega_rad).sqrt();
    let longitudinal_scale =
        gamma / v_m * (0.5 * k.vacuum_permeability_si * k.reduced_planck_si * omega_rad).sqrt();

    let g_x = transverse_scale * ix / TAU_E9;
    let g_y = (transverse_scale * iy / TAU_E9).abs();
    let g_z = longitudinal_scale * iz / TAU_E9;
    Ok(CouplingComponents {
        g_x_ghz: g_x,
        g_y_ghz: g_y,
        g_z_ghz: g_z,
        omega_z_ghz: -total_spin * g_z,
        g_transverse_ghz: f64::hypot(g_x, g_y),
    })
}

/// Coupling rate from the magnetic filling factor,
/// `g² = ω_c² χ_eff ζ_m`, with `χ_eff` a material/overlap susceptibility
/// scale treated as a free parameter.
pub fn coupling_from_filling(omega_c_ghz: f64, zeta_m: f64, chi_eff: f64) -> f64 {
    omega_c_ghz * (chi_eff * zeta_m).sqrt()
}

/// Rescales a measured coupling rate from one material to another at equal
/// geometry: `g ∝ sqrt(ρ_S)`.
pub fn material_scale(g_ghz: f64, from: &MaterialSpec, to: &MaterialSpec) -> f64 {
    g_ghz * (to.macrospin_density_per_m3() / from.macrospin_density_per_m3()).sqrt()
}

/// Rotates the map by `theta_rad` about the static-field (z) axis:
/// positions and both field vectors.
pub fn rotate_transverse(map: &FieldMap, theta_rad: f64) -> FieldMap {
    let (sin, cos) = theta_rad.sin_cos();
    let rot = |v: &[f64; 3]| [cos * v[0] - sin * v[1], sin * v[0] + cos * v[1], v[2]];
    let cells = map
        .cells
        .iter()
        .map(|c| {
            let mut cell = *c;
            cell.position_m = rot(&c.position_m);
            cell.e_field = rot(&c.e_field);
            cell.h_field = rot(&c.h_field);
            cell
        })
        .collect();
    FieldMap {
        cells,
        omega_c_ghz: map.omega_c_ghz,
        sample_eps_r: map.sample_eps_r,
    }
}
