//! Cross-validation of the closed-form eigenfrequencies against the 4×4
//! Hopfield oracle over a detuning × coupling grid reaching deep-strong
//! coupling.

use polariton_core::hopfield;
use polariton_core::hybrid::eigenfrequencies_from_parts;

#[test]
fn closed_form_and_hopfield_oracle_agree_across_the_coupling_grid() {
    let omega_c = 5.870;
    let n = 10;
    let mut stable = 0usize;
    for i in 0..n {
        // omega_m / omega_c from 0.6 to 4.0
        let ratio_m = 0.6 + 3.4 * i as f64 / (n - 1) as f64;
        let omega_m = ratio_m * omega_c;
        for j in 0..n {
            // g / omega_c from 0.01 to 0.9
            let ratio_g = 0.01 + 0.89 * j as f64 / (n - 1) as f64;
            let g = ratio_g * omega_c;
            let closed = eigenfrequencies_from_parts(omega_c, omega_m, g);
            let oracle = hopfield::eigenfrequencies(omega_c, omega_m, g);
            match (closed, oracle) {
                (Ok((clo, chi)), Ok((hlo, hhi))) => {
                    stable += 1;
                    let rel_lo = ((clo - hlo) / hlo.max(1e-300)).abs();
                    let rel_hi = ((chi - hhi) / hhi).abs();
                    assert!(
                        rel_lo < 1e-10 && rel_hi < 1e-10,
                        "routes disagree at omega_m={omega_m}, g={g}: \
                         ({clo}, {chi}) vs ({hlo}, {hhi})"
                    );
                }
                (Err(_), Err(_)) => {
                    // softening: both routes must refuse, consistently
                    assert!(
                        g > 0.5 * (omega_c * omega_m).sqrt() * (1.0 - 1e-9),
                        "both routes errored on a stable point: omega_m={omega_m}, g={g}"
                    );
                }
                (closed, oracle) => panic!(
                    "routes disagree about stability at omega_m={omega_m}, g={g}: \
                     closed-form {closed:?}, oracle {oracle:?}"
                ),
            }
        }
    }
    assert!(stable >= 60, "grid produced only {stable} stable points");
}
