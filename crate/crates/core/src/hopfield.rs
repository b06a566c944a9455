//! Independent eigenfrequency oracle via Hopfield diagonalization.
//!
//! Instead of the closed form in [`crate::hybrid`], this route writes the
//! Heisenberg equations of motion for the operator vector `(c, b, c†, b†)`
//! under the full quadratic Hamiltonian
//! `H/ħ = omega_c c†c + omega_m b†b + g (c + c†)(b + b†)`
//! and diagonalizes the resulting 4×4 dynamical matrix numerically.  Its
//! spectrum is `{±omega_-, ±omega_+}`; the two routes agree to solver
//! precision whenever the system is stable, which makes this an end-to-end
//! cross-check of the closed form rather than a re-derivation of it.

use nalgebra::Matrix4;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HopfieldError {
    #[error("coupling rate must be non-negative, got {0} GHz")]
    NegativeCoupling(f64),
    #[error(
        "dynamical matrix has complex eigenvalues (max |Im| = {max_im_ghz} GHz): \
         the coupled system is unstable for omega_c = {omega_c_ghz} GHz, \
         omega_m = {omega_m_ghz} GHz, g = {g_cm_ghz} GHz"
    )]
    Unstable {
        omega_c_ghz: f64,
        omega_m_ghz: f64,
        g_cm_ghz: f64,
        max_im_ghz: f64,
    },
}

/// Polariton eigenfrequencies `(omega_-, omega_+)` in GHz from the 4×4
/// dynamical matrix.
///
/// Errors when any eigenvalue keeps an imaginary part above `1e-9` relative
/// — the numerical signature of mode softening that the closed form reports
/// as a domain error.
pub fn eigenfrequencies(
    omega_c_ghz: f64,
    omega_m_ghz: f64,
    g_cm_ghz: f64,
) -> Result<(f64, f64), HopfieldError> {
    if !(g_cm_ghz >= 0.0) {
        return Err(HopfieldError::NegativeCoupling(g_cm_ghz));
    }
    let (wc, wm, g) = (omega_c_ghz, omega_m_ghz, g_cm_ghz);
    #[rustfmt::skip]
    let m = Matrix4::new(
         wc,   g,  0.0,  g,
          g,  wm,   g,  0.0,
        0.0,  -g,  -wc,  -g,
         -g, 0.0,   -g, -wm,
    );
    let eigenvalues = m.complex_eigenvalues();

    let scale = wc.abs().max(wm.abs()).max(1.0);
    let max_im = eigenvalues.iter().map(|l| l.im.abs()).fold(0.0, f64::max);
    if eigenvalues
        .iter()
        .any(|l| l.im.abs() > 1e-9 * l.norm().max(scale))
    {
        return Err(HopfieldError::Unstable {
            omega_c_ghz,
            omega_m_ghz,
            g_cm_ghz,
            max_im_ghz: max_im,
        });
    }

    // spectrum is {±omega_-, ±omega_+}; average each ± pair of magnitudes
    let mut mags: Vec<f64> = eigenvalues.iter().map(|l| l.re.abs()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalue magnitudes are finite"));
    Ok((0.5 * (mags[0] + mags[1]), 0.5 * (mags[2] + mags[3])))
}
