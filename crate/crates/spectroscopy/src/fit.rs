//! Staged avoided-crossing fits.
//!
//! Ridge points are compared against the exact (beyond rotating-wave)
//! eigenfrequencies; each point's residual is its signed distance to the
//! *nearer* predicted branch, so branch identity follows frequency ordering
//! and stays well defined even as `g -> 0`.  Three stages cover the common
//! experimental workflows:
//!
//! * **linear** — cavity frequency, coupling rate, and a linear Zeeman
//!   magnon line, all free; the workhorse for a single avoided crossing.
//! * **polynomial** — cavity and coupling held fixed while each ridge
//!   frequency is inverted analytically to a bare magnon frequency, then a
//!   polynomial magnon line is fit to the inferred points.
//! * **turnover** — two linear asymptotes fit on user-selected field
//!   windows, then the blend width of a smooth turnover fit on the
//!   remaining points.

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use polariton_core::constants::zeeman_slope_ghz_per_t;
use polariton_core::hybrid::eigenfrequencies_from_parts;
use polariton_core::{
    HybridModel, LinearZeeman, MagnonDispersion, ModelError, PolynomialDispersion, SmoothTurnover,
};

use crate::lm::{minimize, LmConfig, LmError};
use crate::ridge::{RidgePoint, RidgeSet};

#[derive(Debug, Error)]
pub enum FitError {
    #[error("stage needs at least {needed} usable ridge points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("no field column holds two branches; pass an explicit fit window")]
    NoCrossingRegion,
    #[error("invalid initial model: {0}")]
    InvalidInit(String),
    #[error("invalid fit window: {0}")]
    InvalidWindow(String),
    #[error("this operation does not apply to the fitted model: {0}")]
    UnsupportedModel(String),
    #[error("design matrix is rank-deficient; reduce the polynomial order or widen the window")]
    SingularDesign,
    #[error(transparent)]
    Lm(#[from] LmError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One named parameter of a completed fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitParameter {
    pub name: String,
    pub value: f64,
    /// 1σ uncertainty from the Gauss-Newton covariance; `None` for fixed
    /// parameters or when the covariance is unavailable.
    pub sigma: Option<f64>,
    pub fixed: bool,
}

/// A fitted model with its diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    /// Which stage produced this: `"linear"`, `"polynomial"`, `"turnover"`.
    pub stage: String,
    pub model: HybridModel,
    pub parameters: Vec<FitParameter>,
    /// Weighted root-mean-square residual, GHz (weights normalized to
    /// mean 1).  For the polynomial stage the residual lives in inferred
    /// magnon frequency; for the others, in measured branch frequency.
    pub rms_residual_ghz: f64,
    /// Field windows the stage actually fit on.
    pub fit_regions_t: Vec<[f64; 2]>,
    /// `false` flags best-so-far parameters that did not meet tolerance.
    pub converged: bool,
    pub iterations: usize,
    pub n_points: usize,
}

/// Options for the all-free linear stage.
#[derive(Debug, Clone, Default)]
pub struct LinearStageOptions {
    /// Field window to fit on; `None` selects the span of columns where
    /// both branches were extracted (the avoided-crossing region).
    pub window_t: Option<[f64; 2]>,
    pub lm: LmConfig,
}


/// Options for the fixed-cavity polynomial magnon stage.
#[derive(Debug, Clone)]
pub struct PolynomialStageOptions {
    /// Polynomial order of the magnon line (default 3).
    pub order: usize,
    /// Field window; `None` uses every ridge point.
    pub window_t: Option<[f64; 2]>,
}

impl Default for PolynomialStageOptions {
    fn default() -> Self {
        Self {
            order: 3,
            window_t: None,
        }
    }
}

/// Options for the two-asymptote turnover stage.
#[derive(Debug, Clone)]
pub struct TurnoverStageOptions {
    /// Window where the magnon line follows its rising asymptote.
    pub rising_window_t: [f64; 2],
    /// Window where it follows the falling asymptote.
    pub falling_window_t: [f64; 2],
    /// Starting blend width for the second sub-fit, GHz.
    pub init_blend_width_ghz: f64,
    pub lm: LmConfig,
}

impl TurnoverStageOptions {
    pub fn new(rising_window_t: [f64; 2], falling_window_t: [f64; 2]) -> Self {
        Self {
            rising_window_t,
            falling_window_t,
            init_blend_width_ghz: 0.05,
            lm: LmConfig::default(),
        }
    }
}

/// Stage selector for [`fit_avoided_crossing`].
#[derive(Debug, Clone)]
pub enum FitStage {
    Linear(LinearStageOptions),
    /// Cavity frequency and coupling are taken, fixed, from the initial
    /// model.
    PolynomialMagnon(PolynomialStageOptions),
    Turnover(TurnoverStageOptions),
}

/// Dispatches to the stage-specific fitters below.
pub fn fit_avoided_crossing(
    ridges: &RidgeSet,
    init: &HybridModel,
    stage: &FitStage,
) -> Result<FitResult, FitError> {
    match stage {
        FitStage::Linear(options) => fit_linear(ridges, init, options),
        FitStage::PolynomialMagnon(options) => {
            fit_polynomial_magnon(ridges, init.omega_c_ghz, init.g_cm_ghz, options)
        }
        FitStage::Turnover(options) => fit_turnover(ridges, init, options),
    }
}

/// Signed distance from a measured frequency to the nearer exact branch;
/// `None` where the model has no real spectrum.
fn residual_to_nearer_branch(
    omega_c_ghz: f64,
    g_cm_ghz: f64,
    omega_m_ghz: f64,
    measured_ghz: f64,
) -> Option<f64> {
    match eigenfrequencies_from_parts(omega_c_ghz, omega_m_ghz, g_cm_ghz) {
        Ok((lower, upper)) => {
            let d_lower = measured_ghz - lower;
            let d_upper = measured_ghz - upper;
            Some(if d_lower.abs() <= d_upper.abs() {
                d_lower
            } else {
                d_upper
            })
        }
        Err(_) => None,
    }
}

fn validated_window(window: [f64; 2]) -> Result<[f64; 2], FitError> {
    if !(window[0] < window[1]) {
        return Err(FitError::InvalidWindow(format!(
            "[{}, {}] T is not an ascending interval",
            window[0], window[1]
        )));
    }
    Ok(window)
}

fn in_window(p: &RidgePoint, window: [f64; 2]) -> bool {
    p.b_t >= window[0] && p.b_t <= window[1]
}

/// Span of field columns that carry at least two branches.
fn crossing_window(ridges: &RidgeSet) -> Result<[f64; 2], FitError> {
    let mut per_column: BTreeMap<u64, usize> = BTreeMap::new();
    for p in &ridges.points {
        *per_column.entry(p.b_t.to_bits()).or_insert(0) += 1;
    }
    let mut window: Option<[f64; 2]> = None;
    for (bits, count) in per_column {
        if count < 2 {
            continue;
        }
        let b = f64::from_bits(bits);
        window = Some(match window {
            None => [b, b],
            Some([lo, hi]) => [lo.min(b), hi.max(b)],
        });
    }
    match window {
        Some(w) if w[0] < w[1] => Ok(w),
        _ => Err(FitError::NoCrossingRegion),
    }
}

/// Central-difference step: relative to the value with an absolute floor.
fn fd_step(value: f64, floor: f64) -> f64 {
    1e-6 * value.abs().max(floor)
}

/// Largest coupling rate stable at every listed magnon frequency
/// (`g = sqrt(omega_c * omega_m) / 2` is the softening boundary), or
/// `None` when no listed frequency constrains it.
fn stable_coupling_cap(omega_c_ghz: f64, magnon_frequencies_ghz: &[f64]) -> Option<f64> {
    magnon_frequencies_ghz
        .iter()
        .filter(|omega_m| **omega_m > 0.0 && omega_c_ghz > 0.0)
        .map(|omega_m| 0.5 * (omega_c_ghz * omega_m).sqrt())
        .fold(None, |acc: Option<f64>, cap| {
            Some(acc.map_or(cap, |a| a.min(cap)))
        })
}

/// An initial guess that overshoots the coupling can be mode-softened at
/// the low-field edge of the fit window even though the data themselves
/// come from a stable model.  Starting the search from just inside the
/// stability region keeps the first evaluation defined; the optimizer is
/// then free to climb back up.
fn stabilized_initial_coupling(g_init_ghz: f64, cap_ghz: Option<f64>) -> f64 {
    match cap_ghz {
        Some(cap) if g_init_ghz.abs() >= cap => 0.95 * cap,
        _ => g_init_ghz.abs(),
    }
}

fn sigma_at(sigmas: &Option<Vec<f64>>, index: usize) -> Option<f64> {
    sigmas.as_ref().map(|s| s[index])
}

/// Stage A: fit cavity frequency, coupling rate, and a linear magnon line
/// to the avoided crossing.  The initial model must carry a linear
/// dispersion; all four parameters float.
pub fn fit_linear(
    ridges: &RidgeSet,
    init: &HybridModel,
    options: &LinearStageOptions,
) -> Result<FitResult, FitError> {
    let init_line = match &init.dispersion {
        MagnonDispersion::Linear(line) => *line,
        _ => {
            return Err(FitError::InvalidInit(
                "the linear stage needs a linear-dispersion initial model".into(),
            ))
        }
    };
    let window = match options.window_t {
        Some(w) => validated_window(w)?,
        None => crossing_window(ridges)?,
    };
    let points: Vec<&RidgePoint> = ridges
        .points
        .iter()
        .filter(|p| in_window(p, window))
        .collect();
    let needed = 4 * 4;
    if points.len() < needed {
        return Err(FitError::InsufficientPoints {
            needed,
            got: points.len(),
        });
    }

    let fields: Vec<f64> = points.iter().map(|p| p.b_t).collect();
    let freqs: Vec<f64> = points.iter().map(|p| p.freq_ghz).collect();
    let weights: Vec<f64> = points.iter().map(|p| p.weight).collect();

    let residuals = |p: &[f64]| -> Option<Vec<f64>> {
        let [omega_c, g, g_eff, b_off] = [p[0], p[1], p[2], p[3]];
        let slope = zeeman_slope_ghz_per_t(g_eff);
        fields
            .iter()
            .zip(&freqs)
            .map(|(b, f)| {
                let omega_m = slope * (b + b_off);
                residual_to_nearer_branch(omega_c, g, omega_m, *f)
            })
            .collect()
    };

    let init_magnons: Vec<f64> = fields
        .iter()
        .map(|b| init_line.frequency_ghz(*b))
        .collect();
    let g_start = stabilized_initial_coupling(
        init.g_cm_ghz,
        stable_coupling_cap(init.omega_c_ghz, &init_magnons),
    );
    let initial = [
        init.omega_c_ghz,
        g_start,
        init_line.g_eff,
        init_line.b_off_t,
    ];
    let steps = [
        fd_step(initial[0], 1.0),
        fd_step(initial[1], 0.1),
        fd_step(initial[2], 0.1),
        fd_step(initial[3], 0.01),
    ];
    let out = minimize(residuals, &weights, &initial, &steps, &options.lm)?;

    // the eigenfrequencies depend on g only through g², so the sign is a
    // gauge choice; report the physical non-negative rate
    let omega_c = out.params[0];
    let g = out.params[1].abs();
    let g_eff = out.params[2];
    let b_off = out.params[3];
    let model = HybridModel::new(omega_c, g, MagnonDispersion::linear(g_eff, b_off))?;

    let parameters = vec![
        FitParameter {
            name: "omega_c_ghz".into(),
            value: omega_c,
            sigma: sigma_at(&out.sigmas, 0),
            fixed: false,
        },
        FitParameter {
            name: "g_cm_ghz".into(),
            value: g,
            sigma: sigma_at(&out.sigmas, 1),
            fixed: false,
        },
        FitParameter {
            name: "g_eff".into(),
            value: g_eff,
            sigma: sigma_at(&out.sigmas, 2),
            fixed: false,
        },
        FitParameter {
            name: "b_off_t".into(),
            value: b_off,
            sigma: sigma_at(&out.sigmas, 3),
            fixed: false,
        },
    ];

    Ok(FitResult {
        stage: "linear".into(),
        model,
        parameters,
        rms_residual_ghz: (out.cost / points.len() as f64).sqrt(),
        fit_regions_t: vec![window],
        converged: out.converged,
        iterations: out.iterations,
        n_points: points.len(),
    })
}

/// Analytic inversion of the exact eigenfrequency relation: the bare magnon
/// frequency whose spectrum, for cavity `omega_c_ghz` and coupling
/// `g_cm_ghz`, passes through the measured branch frequency.
///
/// Either branch inverts to the same magnon frequency.  With `y = f²` the
/// relation reduces to `(omega_c² - y) omega_m² - 4 omega_c g² omega_m -
/// y (omega_c² - y) = 0`, which has exactly one non-negative root; it is
/// evaluated from the numerically benign side of the quadratic formula so
/// nearby roots never cancel.
pub fn invert_to_magnon(omega_c_ghz: f64, g_cm_ghz: f64, polariton_ghz: f64) -> f64 {
    let y = polariton_ghz * polariton_ghz;
    let a = omega_c_ghz * omega_c_ghz - y;
    if a == 0.0 {
        // a branch touches the bare cavity frequency only as the magnon
        // frequency vanishes
        return 0.0;
    }
    let g_sq = g_cm_ghz * g_cm_ghz;
    let discriminant = 16.0 * omega_c_ghz * omega_c_ghz * g_sq * g_sq + 4.0 * y * a * a;
    let q = 0.5 * (4.0 * omega_c_ghz * g_sq + discriminant.sqrt());
    if a > 0.0 {
        q / a
    } else {
        -y * a / q
    }
}

/// Stage B: hold the cavity frequency and coupling fixed, invert every
/// ridge frequency to a bare magnon frequency, and least-squares-fit a
/// polynomial magnon line through the inferred points.
pub fn fit_polynomial_magnon(
    ridges: &RidgeSet,
    omega_c_ghz: f64,
    g_cm_ghz: f64,
    options: &PolynomialStageOptions,
) -> Result<FitResult, FitError> {
    if !(omega_c_ghz > 0.0) {
        return Err(FitError::InvalidInit(format!(
            "cavity frequency must be positive, got {omega_c_ghz} GHz"
        )));
    }
    if !(g_cm_ghz >= 0.0) {
        return Err(FitError::InvalidInit(format!(
            "coupling rate must be non-negative, got {g_cm_ghz} GHz"
        )));
    }
    let window = options.window_t.map(validated_window).transpose()?;
    let points: Vec<&RidgePoint> = ridges
        .points
        .iter()
        .filter(|p| window.is_none_or(|w| in_window(p, w)))
        .collect();
    let n_coeffs = options.order + 1;
    let needed = 4 * n_coeffs;
    if points.len() < needed {
        return Err(FitError::InsufficientPoints {
            needed,
            got: points.len(),
        });
    }
    let n = points.len();

    let raw_weights: Vec<f64> = points.iter().map(|p| p.weight).collect();
    if raw_weights.iter().any(|w| !(*w > 0.0)) {
        return Err(FitError::Lm(LmError::BadWeights));
    }
    let mean_w: f64 = raw_weights.iter().sum::<f64>() / n as f64;
    let weights: Vec<f64> = raw_weights.iter().map(|w| w / mean_w).collect();

    let inferred: Vec<f64> = points
        .iter()
        .map(|p| invert_to_magnon(omega_c_ghz, g_cm_ghz, p.freq_ghz))
        .collect();

    // weighted Vandermonde least squares via SVD on the √w-scaled system
    let mut design = DMatrix::zeros(n, n_coeffs);
    let mut rhs = DVector::zeros(n);
    for (i, p) in points.iter().enumerate() {
        let sw = weights[i].sqrt();
        let mut power = 1.0;
        for j in 0..n_coeffs {
            design[(i, j)] = sw * power;
            power *= p.b_t;
        }
        rhs[i] = sw * inferred[i];
    }
    let svd = design.clone().svd(true, true);
    let coeffs = svd
        .solve(&rhs, f64::EPSILON * n.max(n_coeffs) as f64)
        .map_err(|_| FitError::SingularDesign)?;
    if svd.rank(f64::EPSILON * svd.singular_values.max() * n.max(n_coeffs) as f64) < n_coeffs {
        return Err(FitError::SingularDesign);
    }

    let poly = PolynomialDispersion::new(coeffs.iter().copied().collect());
    let cost: f64 = points
        .iter()
        .zip(&inferred)
        .zip(&weights)
        .map(|((p, t), w)| {
            let r = poly.frequency_ghz(p.b_t) - t;
            w * r * r
        })
        .sum();

    // covariance of the polynomial coefficients from the normal matrix
    let normal = design.transpose() * &design;
    let sigmas: Option<Vec<f64>> = Cholesky::new(normal).and_then(|ch| {
        if n <= n_coeffs {
            return None;
        }
        let inverse = ch.inverse();
        let variance_scale = cost / (n - n_coeffs) as f64;
        Some(
            (0..n_coeffs)
                .map(|j| (variance_scale * inverse[(j, j)]).max(0.0).sqrt())
                .collect(),
        )
    });

    let mut parameters = vec![
        FitParameter {
            name: "omega_c_ghz".into(),
            value: omega_c_ghz,
            sigma: None,
            fixed: true,
        },
        FitParameter {
            name: "g_cm_ghz".into(),
            value: g_cm_ghz,
            sigma: None,
            fixed: true,
        },
    ];
    for (j, c) in coeffs.iter().enumerate() {
        let name = if j == 0 {
            "c0_ghz".to_string()
        } else {
            format!("c{j}_ghz_per_t{j}")
        };
        parameters.push(FitParameter {
            name,
            value: *c,
            sigma: sigmas.as_ref().map(|s| s[j]),
            fixed: false,
        });
    }

    let span = match window {
        Some(w) => w,
        None => {
            let lo = fields_min(&points);
            let hi = fields_max(&points);
            [lo, hi]
        }
    };
    let model = HybridModel::new(omega_c_ghz, g_cm_ghz, MagnonDispersion::Polynomial(poly))?;

    Ok(FitResult {
        stage: "polynomial".into(),
        model,
        parameters,
        rms_residual_ghz: (cost / n as f64).sqrt(),
        fit_regions_t: vec![span],
        converged: true,
        iterations: 1,
        n_points: n,
    })
}

fn fields_min(points: &[&RidgePoint]) -> f64 {
    points.iter().map(|p| p.b_t).fold(f64::INFINITY, f64::min)
}

fn fields_max(points: &[&RidgePoint]) -> f64 {
    points
        .iter()
        .map(|p| p.b_t)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Per-window line initialization: in every field column keep the point
/// farthest from the cavity frequency (the magnon-like branch) and run an
/// ordinary least-squares line through the survivors.
fn magnon_line_init(
    points: &[&RidgePoint],
    omega_c_init_ghz: f64,
) -> Result<LinearZeeman, FitError> {
    let mut per_column: BTreeMap<u64, &RidgePoint> = BTreeMap::new();
    for p in points {
        per_column
            .entry(p.b_t.to_bits())
            .and_modify(|kept| {
                if (p.freq_ghz - omega_c_init_ghz).abs()
                    > (kept.freq_ghz - omega_c_init_ghz).abs()
                {
                    *kept = p;
                }
            })
            .or_insert(p);
    }
    if per_column.len() < 2 {
        return Err(FitError::InvalidWindow(
            "a turnover window must span at least two field columns".into(),
        ));
    }
    let n = per_column.len() as f64;
    let (mut sum_b, mut sum_f) = (0.0, 0.0);
    for p in per_column.values() {
        sum_b += p.b_t;
        sum_f += p.freq_ghz;
    }
    let (mean_b, mean_f) = (sum_b / n, sum_f / n);
    let (mut sbb, mut sbf) = (0.0, 0.0);
    for p in per_column.values() {
        sbb += (p.b_t - mean_b) * (p.b_t - mean_b);
        sbf += (p.b_t - mean_b) * (p.freq_ghz - mean_f);
    }
    if sbb == 0.0 || sbf == 0.0 {
        return Err(FitError::InvalidWindow(
            "window points do not define a sloped magnon line".into(),
        ));
    }
    let slope = sbf / sbb;
    let intercept = mean_f - slope * mean_b;
    let g_eff = slope / polariton_core::constants::BOHR_MAGNETON_OVER_PLANCK_GHZ_PER_T;
    Ok(LinearZeeman::new(g_eff, intercept / slope))
}

/// Stage C: fit a smooth-turnover magnon line in two sub-fits.  The first
/// floats the cavity frequency, the coupling, and one linear asymptote per
/// user window (six parameters, window points only); the second floats the
/// blend width alone on the points outside both windows.
pub fn fit_turnover(
    ridges: &RidgeSet,
    init: &HybridModel,
    options: &TurnoverStageOptions,
) -> Result<FitResult, FitError> {
    let rising_window = validated_window(options.rising_window_t)?;
    let falling_window = validated_window(options.falling_window_t)?;
    if rising_window[1] >= falling_window[0] {
        return Err(FitError::InvalidWindow(
            "the rising window must lie entirely below the falling window".into(),
        ));
    }
    if !(options.init_blend_width_ghz > 0.0) {
        return Err(FitError::InvalidInit(format!(
            "initial blend width must be positive, got {} GHz",
            options.init_blend_width_ghz
        )));
    }

    let rising_points: Vec<&RidgePoint> = ridges
        .points
        .iter()
        .filter(|p| in_window(p, rising_window))
        .collect();
    let falling_points: Vec<&RidgePoint> = ridges
        .points
        .iter()
        .filter(|p| in_window(p, falling_window))
        .collect();
    let needed = 4 * 6;
    let window_total = rising_points.len() + falling_points.len();
    if rising_points.len() < needed / 3
        || falling_points.len() < needed / 3
        || window_total < needed
    {
        return Err(FitError::InsufficientPoints {
            needed,
            got: window_total,
        });
    }

    let rising_init = magnon_line_init(&rising_points, init.omega_c_ghz)?;
    let falling_init = magnon_line_init(&falling_points, init.omega_c_ghz)?;

    // sub-fit 1: shared (omega_c, g) plus one line per window, fit on the
    // window points with each window's own linear dispersion
    let asymptote_points: Vec<(f64, f64, bool)> = rising_points
        .iter()
        .map(|p| (p.b_t, p.freq_ghz, true))
        .chain(falling_points.iter().map(|p| (p.b_t, p.freq_ghz, false)))
        .collect();
    let asymptote_weights: Vec<f64> = rising_points
        .iter()
        .chain(falling_points.iter())
        .map(|p| p.weight)
        .collect();

    let residuals_lines = |p: &[f64]| -> Option<Vec<f64>> {
        let slope_rising = zeeman_slope_ghz_per_t(p[2]);
        let slope_falling = zeeman_slope_ghz_per_t(p[4]);
        asymptote_points
            .iter()
            .map(|(b, f, is_rising)| {
                let omega_m = if *is_rising {
                    slope_rising * (b + p[3])
                } else {
                    slope_falling * (b + p[5])
                };
                residual_to_nearer_branch(p[0], p[1], omega_m, *f)
            })
            .collect()
    };
    let init_magnons: Vec<f64> = asymptote_points
        .iter()
        .map(|(b, _, is_rising)| {
            if *is_rising {
                rising_init.frequency_ghz(*b)
            } else {
                falling_init.frequency_ghz(*b)
            }
        })
        .collect();
    let g_start = stabilized_initial_coupling(
        init.g_cm_ghz,
        stable_coupling_cap(init.omega_c_ghz, &init_magnons),
    );
    let initial_lines = [
        init.omega_c_ghz,
        g_start,
        rising_init.g_eff,
        rising_init.b_off_t,
        falling_init.g_eff,
        falling_init.b_off_t,
    ];
    let steps_lines = [
        fd_step(initial_lines[0], 1.0),
        fd_step(initial_lines[1], 0.1),
        fd_step(initial_lines[2], 0.1),
        fd_step(initial_lines[3], 0.01),
        fd_step(initial_lines[4], 0.1),
        fd_step(initial_lines[5], 0.01),
    ];
    let lines_fit = minimize(
        residuals_lines,
        &asymptote_weights,
        &initial_lines,
        &steps_lines,
        &options.lm,
    )?;

    let omega_c = lines_fit.params[0];
    let g = lines_fit.params[1].abs();
    let rising = LinearZeeman::new(lines_fit.params[2], lines_fit.params[3]);
    let falling = LinearZeeman::new(lines_fit.params[4], lines_fit.params[5]);

    // sub-fit 2: blend width only (in log space to keep it positive), on
    // the points in neither window — the turnover region
    let blend_points: Vec<&RidgePoint> = ridges
        .points
        .iter()
        .filter(|p| !in_window(p, rising_window) && !in_window(p, falling_window))
        .collect();
    if blend_points.len() < 4 {
        return Err(FitError::InsufficientPoints {
            needed: 4,
            got: blend_points.len(),
        });
    }
    let blend_weights: Vec<f64> = blend_points.iter().map(|p| p.weight).collect();
    let residuals_blend = |p: &[f64]| -> Option<Vec<f64>> {
        let turnover = SmoothTurnover::new(rising, falling, p[0].exp());
        blend_points
            .iter()
            .map(|point| {
                residual_to_nearer_branch(
                    omega_c,
                    g,
                    turnover.frequency_ghz(point.b_t),
                    point.freq_ghz,
                )
            })
            .collect()
    };
    let blend_fit = minimize(
        residuals_blend,
        &blend_weights,
        &[options.init_blend_width_ghz.ln()],
        &[1e-4],
        &options.lm,
    )?;
    let blend_width = blend_fit.params[0].exp();

    let dispersion = MagnonDispersion::SmoothTurnover(SmoothTurnover::new(
        rising,
        falling,
        blend_width,
    ));
    let model = HybridModel::new(omega_c, g, dispersion)?;

    // report the rms of the final composite model over every point used
    let mut cost = 0.0;
    let mut weight_sum = 0.0;
    let mut n_points = 0usize;
    for p in rising_points
        .iter()
        .chain(falling_points.iter())
        .chain(blend_points.iter())
    {
        let omega_m = model.magnon_frequency_ghz(p.b_t);
        let (lower, upper) = eigenfrequencies_from_parts(omega_c, omega_m, g)?;
        let r = {
            let d_lower = p.freq_ghz - lower;
            let d_upper = p.freq_ghz - upper;
            if d_lower.abs() <= d_upper.abs() {
                d_lower
            } else {
                d_upper
            }
        };
        cost += p.weight * r * r;
        weight_sum += p.weight;
        n_points += 1;
    }
    let rms = if weight_sum > 0.0 {
        (cost / weight_sum).sqrt()
    } else {
        0.0
    };

    let sigma_blend = blend_fit
        .sigmas
        .as_ref()
        .map(|s| s[0] * blend_width) // d(exp x) = exp(x) dx
        .filter(|s| s.is_finite());

    let parameters = vec![
        FitParameter {
            name: "omega_c_ghz".into(),
            value: omega_c,
            sigma: sigma_at(&lines_fit.sigmas, 0),
            fixed: false,
        },
        FitParameter {
            name: "g_cm_ghz".into(),
            value: g,
            sigma: sigma_at(&lines_fit.sigmas, 1),
            fixed: false,
        },
        FitParameter {
            name: "rising_g_eff".into(),
            value: rising.g_eff,
            sigma: sigma_at(&lines_fit.sigmas, 2),
            fixed: false,
        },
        FitParameter {
            name: "rising_b_off_t".into(),
            value: rising.b_off_t,
            sigma: sigma_at(&lines_fit.sigmas, 3),
            fixed: false,
        },
        FitParameter {
            name: "falling_g_eff".into(),
            value: falling.g_eff,
            sigma: sigma_at(&lines_fit.sigmas, 4),
            fixed: false,
        },
        FitParameter {
            name: "falling_b_off_t".into(),
            value: falling.b_off_t,
            sigma: sigma_at(&lines_fit.sigmas, 5),
            fixed: false,
        },
        FitParameter {
            name: "blend_width_ghz".into(),
            value: blend_width,
            sigma: sigma_blend,
            fixed: false,
        },
    ];

    Ok(FitResult {
        stage: "turnover".into(),
        model,
        parameters,
        rms_residual_ghz: rms,
        fit_regions_t: vec![rising_window, falling_window],
        converged: lines_fit.converged && blend_fit.converged,
        iterations: lines_fit.iterations + blend_fit.iterations,
        n_points,
    })
}

/// Field up to which the fitted magnon line stays in the ultrastrong
/// regime.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UscBound {
    /// Field where `g / omega_m(B)` falls to 0.1, tesla.
    pub b_t: f64,
    /// Magnon frequency there: exactly `10 g`, GHz.
    pub omega_m_ghz: f64,
    /// The companion cavity-referenced ratio `g / omega_c`.
    pub g_over_omega_c: f64,
}

/// Solves `g / omega_m(B) = 0.1` for a stage-A (linear-dispersion) fit.
pub fn usc_bound(fit: &FitResult) -> Result<UscBound, FitError> {
    let line = match &fit.model.dispersion {
        MagnonDispersion::Linear(line) => line,
        _ => {
            return Err(FitError::UnsupportedModel(
                "the ultrastrong bound is closed-form only for a linear magnon line".into(),
            ))
        }
    };
    let slope = line.slope_ghz_per_t();
    if !(slope > 0.0) {
        return Err(FitError::UnsupportedModel(format!(
            "tuning slope must be positive, got {slope} GHz/T"
        )));
    }
    let omega_m_ghz = 10.0 * fit.model.g_cm_ghz;
    Ok(UscBound {
        b_t: omega_m_ghz / slope - line.b_off_t,
        omega_m_ghz,
        g_over_omega_c: fit.model.g_cm_ghz / fit.model.omega_c_ghz,
    })
}
