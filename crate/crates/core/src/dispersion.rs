//! Magnon dispersion laws `omega_m(B)` with analytic field derivatives.
//!
//! Three families cover the datasets this toolkit targets: a plain Zeeman
//! line, a polynomial in field for materials with anisotropy corrections,
//! and a smooth turnover that blends a rising and a falling Zeeman line —
//! the shape produced by a mode that hybridizes with a second magnetic
//! branch and turns over instead of tuning monotonically.
//!
//! Derivatives are exact closed forms, not finite differences; downstream
//! sensitivity metrology differentiates through these.

use serde::{Deserialize, Serialize};

use crate::constants::zeeman_slope_ghz_per_t;

/// Linear Zeeman line `omega_m = g_eff * (mu_B/h) * (B + b_off)`.
///
/// `b_off` absorbs anisotropy fields and any calibration offset of the
/// magnet; a negative `g_eff` describes a branch that softens with field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearZeeman {
    pub g_eff: f64,
    pub b_off_t: f64,
}

impl LinearZeeman {
    pub fn new(g_eff: f64, b_off_t: f64) -> Self {
        Self { g_eff, b_off_t }
    }

    /// Tuning slope, GHz/T.
    pub fn slope_ghz_per_t(&self) -> f64 {
        zeeman_slope_ghz_per_t(self.g_eff)
    }

    pub fn frequency_ghz(&self, b_t: f64) -> f64 {
        self.slope_ghz_per_t() * (b_t + self.b_off_t)
    }
}

/// Polynomial dispersion `omega_m = Σ c_k B^k` with coefficients in
/// GHz/T^k, evaluated by Horner's rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialDispersion {
    pub coeffs_ghz: Vec<f64>,
}

impl PolynomialDispersion {
    pub fn new(coeffs_ghz: Vec<f64>) -> Self {
        Self { coeffs_ghz }
    }

    pub fn frequency_ghz(&self, b_t: f64) -> f64 {
        horner(&self.coeffs_ghz, b_t)
    }

    fn first_derivative(&self, b_t: f64) -> f64 {
        let d: Vec<f64> = self
            .coeffs_ghz
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect();
        horner(&d, b_t)
    }

    fn second_derivative(&self, b_t: f64) -> f64 {
        let d: Vec<f64> = self
            .coeffs_ghz
            .iter()
            .enumerate()
            .skip(2)
            .map(|(k, c)| (k * (k - 1)) as f64 * c)
            .collect();
        horner(&d, b_t)
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Smooth minimum of a rising and a falling Zeeman line.
///
/// `omega_m = -w * ln(exp(-f_r/w) + exp(-f_f/w))` with blend width `w` in
/// GHz.  Far from the crossing of the two asymptotes the curve approaches
/// the lower line exponentially fast; at the crossing it rounds the corner
/// over a field scale `w / |slope difference|`.  The curve always sits
/// strictly below both asymptotes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothTurnover {
    pub rising: LinearZeeman,
    pub falling: LinearZeeman,
    pub blend_width_ghz: f64,
}

impl SmoothTurnover {
    pub fn new(rising: LinearZeeman, falling: LinearZeeman, blend_width_ghz: f64) -> Self {
        Self {
            rising,
            falling,
            blend_width_ghz,
        }
    }

    /// Field where the two bare asymptotes cross, i.e. the centre of the
    /// turnover region.  `None` when the lines are parallel.
    pub fn asymptote_crossing_t(&self) -> Option<f64> {
        let ds = self.rising.slope_ghz_per_t() - self.falling.slope_ghz_per_t();
        if ds == 0.0 {
            return None;
        }
        let df = self.falling.frequency_ghz(0.0) - self.rising.frequency_ghz(0.0);
        Some(df / ds)
    }

    pub fn frequency_ghz(&self, b_t: f64) -> f64 {
        let f = self.rising.frequency_ghz(b_t);
        let g = self.falling.frequency_ghz(b_t);
        let w = self.blend_width_ghz;
        // log-sum-exp soft minimum, evaluated from the smaller argument so
        // the exponential never overflows
        let (lo, hi) = if f <= g { (f, g) } else { (g, f) };
        lo - w * (-(hi - lo) / w).exp().ln_1p()
    }

    fn derivatives(&self, b_t: f64) -> (f64, f64) {
        let f = self.rising.frequency_ghz(b_t);
        let g = self.falling.frequency_ghz(b_t);
        let df = self.rising.slope_ghz_per_t();
        let dg = self.falling.slope_ghz_per_t();
        let w = self.blend_width_ghz;
        // logistic weight of the rising line: sigma = 1 / (1 + exp((f-g)/w))
        let u = (f - g) / w;
        let sigma = if u >= 0.0 {
            let e = (-u).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + u.exp())
        };
        let d1 = sigma * df + (1.0 - sigma) * dg;
        let d2 = -sigma * (1.0 - sigma) * (df - dg) * (df - dg) / w;
        (d1, d2)
    }
}

/// A magnon dispersion law: frequency and its first two field derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MagnonDispersion {
    Linear(LinearZeeman),
    Polynomial(PolynomialDispersion),
    SmoothTurnover(SmoothTurnover),
}

impl MagnonDispersion {
    /// Plain Zeeman line, the common case.
    pub fn linear(g_eff: f64, b_off_t: f64) -> Self {
        Self::Linear(LinearZeeman::new(g_eff, b_off_t))
    }

    /// Magnon frequency at field `b_t`, GHz.
    pub fn frequency_ghz(&self, b_t: f64) -> f64 {
        match self {
            Self::Linear(l) => l.frequency_ghz(b_t),
            Self::Polynomial(p) => p.frequency_ghz(b_t),
            Self::SmoothTurnover(t) => t.frequency_ghz(b_t),
        }
    }

    /// `(d omega_m / dB, d² omega_m / dB²)` in (GHz/T, GHz/T²), closed form.
    pub fn derivatives(&self, b_t: f64) -> (f64, f64) {
        match self {
            Self::Linear(l) => (l.slope_ghz_per_t(), 0.0),
            Self::Polynomial(p) => (p.first_derivative(b_t), p.second_derivative(b_t)),
            Self::SmoothTurnover(t) => t.derivatives(b_t),
        }
    }
}
