//! Magnon-line turning-point search.
//!
//! A double-magic operating point needs the bare magnon frequency to pass
//! through a turning point; the cavity is then tuned onto the magnon
//! frequency at that field.  The search brackets the sign change of
//! `d omega_m / dB` on a uniform scan and bisects it down to nanotesla
//! resolution, refusing brackets that contain no turning point or more
//! than one.

use polariton_core::MagnonDispersion;

use crate::derivatives::MetrologyError;

/// Number of scan intervals used to isolate the sign change.
const SCAN_INTERVALS: usize = 1000;
/// Bisection stops when the bracket is narrower than this, tesla.
const FIELD_TOLERANCE_T: f64 = 1e-9;

/// Finds the single field `B*` in `bracket` where `d omega_m / dB`
/// changes sign, to `1e-9` T, and returns it with the magnon frequency
/// there — the cavity frequency required for double suppression.
pub fn magic_point_search(
    dispersion: &MagnonDispersion,
    bracket_t: [f64; 2],
) -> Result<(f64, f64), MetrologyError> {
    let [lo, hi] = bracket_t;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(MetrologyError::InvalidBracket { lo, hi });
    }

    let slope_at = |b: f64| dispersion.derivatives(b).0;

    // locate candidate turning points: exact zeros of the scan and
    // strict sign changes between neighbouring scan points
    let step = (hi - lo) / SCAN_INTERVALS as f64;
    let mut exact_zeros: Vec<f64> = Vec::new();
    let mut sign_changes: Vec<(f64, f64)> = Vec::new();
    let mut prev_b = lo;
    let mut prev_s = slope_at(lo);
    for i in 1..=SCAN_INTERVALS {
        let b = if i == SCAN_INTERVALS {
            hi
        } else {
            lo + step * i as f64
        };
        let s = slope_at(b);
        if prev_s == 0.0 {
            exact_zeros.push(prev_b);
        } else if s != 0.0 && prev_s.signum() != s.signum() {
            sign_changes.push((prev_b, b));
        }
        prev_b = b;
        prev_s = s;
    }
    if prev_s == 0.0 {
        exact_zeros.push(prev_b);
    }

    let count = exact_zeros.len() + sign_changes.len();
    if count == 0 {
        return Err(MetrologyError::NoTurningPoint { lo, hi });
    }
    if count > 1 {
        return Err(MetrologyError::MultipleTurningPoints { count });
    }

    let b_star = if let Some(b) = exact_zeros.first() {
        *b
    } else {
        let (mut left, mut right) = sign_changes[0];
        let left_sign = slope_at(left).signum();
        while right - left > FIELD_TOLERANCE_T {
            let mid = 0.5 * (left + right);
            let s = slope_at(mid);
            if s == 0.0 {
                left = mid;
                right = mid;
                break;
            }
            if s.signum() == left_sign {
                left = mid;
            } else {
                right = mid;
            }
        }
        0.5 * (left + right)
    };

    Ok((b_star, dispersion.frequency_ghz(b_star)))
}
