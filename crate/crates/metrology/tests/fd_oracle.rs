//! Independent finite-difference oracle for the closed-form transition
//! derivatives.
//!
//! `cmp_derivatives` is checked against 5-point central stencils applied
//! to the transition frequency itself, on 100 seeded random dispersion
//! draws (half polynomial, half smooth-turnover).  Draws are gated so the
//! comparison is numerically meaningful: the stencil step is matched to
//! the local smoothness scale, and configurations whose true derivatives
//! are near zero (where *relative* error loses meaning) are redrawn.

use polariton_core::{
    HybridModel, LinearZeeman, MagnonDispersion, PolynomialDispersion, SmoothTurnover,
};
use polariton_metrology::{cmp_derivatives, magic_point_search};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 5-point first derivative, error O(h⁴ f⁽⁵⁾).
fn fd_first(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// 5-point second derivative, error O(h⁴ f⁽⁶⁾).
fn fd_second(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
        / (12.0 * h * h)
}

struct Draw {
    model: HybridModel,
    b_t: f64,
    step_t: f64,
}

fn polynomial_draw(rng: &mut ChaCha8Rng) -> Draw {
    let coeffs = vec![
        rng.gen_range(2.0..6.0),
        rng.gen_range(10.0..40.0),
        rng.gen_range(-80.0..80.0),
        rng.gen_range(-200.0..200.0),
    ];
    let dispersion = MagnonDispersion::Polynomial(PolynomialDispersion::new(coeffs));
    let b_t = rng.gen_range(0.05..0.30);
    let g = rng.gen_range(0.1..0.5);
    // detune the cavity a few couplings off the magnon line so the
    // transition is smooth on a scale much larger than the stencil step
    let offset = rng.gen_range(2.0..6.0) * g * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let omega_c = (dispersion.frequency_ghz(b_t) + offset).max(0.5);
    Draw {
        model: HybridModel::new(omega_c, g, dispersion).unwrap(),
        b_t,
        step_t: 2e-4,
    }
}

fn turnover_draw(rng: &mut ChaCha8Rng) -> Draw {
    let rising = LinearZeeman::new(rng.gen_range(1.8..2.3), rng.gen_range(0.0..0.02));
    let falling = LinearZeeman::new(rng.gen_range(-0.9..-0.4), rng.gen_range(-0.9..-0.6));
    let blend = rng.gen_range(0.03..0.06);
    let turnover = SmoothTurnover::new(rising, falling, blend);
    let crossing = turnover.asymptote_crossing_t().unwrap();
    let dispersion = MagnonDispersion::SmoothTurnover(turnover);
    // the blend region spans w_B = w / |slope difference| in field
    let slope_gap = rising.slope_ghz_per_t() - falling.slope_ghz_per_t();
    let blend_field = blend / slope_gap;
    let (b_star, _) =
        magic_point_search(&dispersion, [crossing - 0.05, crossing + 0.05]).unwrap();
    let b_t = b_star + rng.gen_range(-2.0..2.0) * blend_field;
    let g = rng.gen_range(0.1..0.3);
    let offset = rng.gen_range(2.0..4.0) * g * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let omega_c = (dispersion.frequency_ghz(b_t) + offset).max(0.5);
    Draw {
        model: HybridModel::new(omega_c, g, dispersion).unwrap(),
        b_t,
        // resolve the blend: steps far below the blend field scale
        step_t: blend_field / 60.0,
    }
}

#[test]
fn closed_form_derivatives_match_finite_differences_on_100_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_816);
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    let mut worst_d1_rel: f64 = 0.0;
    let mut worst_d2_rel: f64 = 0.0;

    while accepted < 100 {
        attempts += 1;
        assert!(attempts < 10_000, "draw acceptance stalled");
        let draw = if accepted.is_multiple_of(2) {
            polynomial_draw(&mut rng)
        } else {
            turnover_draw(&mut rng)
        };
        let (d1, d2) = cmp_derivatives(&draw.model, draw.b_t).unwrap();
        // skip configurations whose derivatives nearly vanish: relative
        // error against ~0 only measures the stencil's noise floor
        if d1.abs() < 0.5 || d2.abs() < 5.0 {
            continue;
        }
        accepted += 1;

        let transition = |b: f64| draw.model.transition_frequency_ghz(b);
        let fd1 = fd_first(transition, draw.b_t, draw.step_t);
        let fd2 = fd_second(transition, draw.b_t, draw.step_t);
        worst_d1_rel = worst_d1_rel.max(((fd1 - d1) / d1).abs());
        worst_d2_rel = worst_d2_rel.max(((fd2 - d2) / d2).abs());
    }

    assert!(
        worst_d1_rel < 1e-6,
        "worst first-derivative relative error {worst_d1_rel}"
    );
    assert!(
        worst_d2_rel < 1e-6,
        "worst second-derivative relative error {worst_d2_rel}"
    );
}
