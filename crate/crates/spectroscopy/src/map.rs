//! Transmission maps over (field, frequency) and their synthesis.

use polariton_core::{HybridModel, ModelError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::io::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("{which} grid is empty")]
    EmptyGrid { which: &'static str },
    #[error("{which} grid must be strictly ascending at index {index}")]
    NonAscendingGrid { which: &'static str, index: usize },
    #[error("magnitude matrix is {rows}×{cols}, expected {expected_rows}×{expected_cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("non-finite magnitude at field index {b_index}, frequency index {f_index}")]
    NonFiniteValue { b_index: usize, f_index: usize },
    #[error("linewidth must be positive, got {0} GHz")]
    NonPositiveLinewidth(f64),
    #[error("noise level must be non-negative, got {0} dB")]
    NegativeNoise(f64),
    #[error("at B = {b_t} T: {source}")]
    Model { b_t: f64, source: ModelError },
    #[error("csv line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A transmission magnitude map sampled on a rectangular
/// field × frequency grid, in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMap {
    /// Strictly ascending, T.
    pub b_grid_t: Vec<f64>,
    /// Strictly ascending, GHz.
    pub f_grid_ghz: Vec<f64>,
    /// `magnitude_db[b_index][f_index]`
    pub magnitude_db: Vec<Vec<f64>>,
}

fn check_ascending(grid: &[f64], which: &'static str) -> Result<(), MapError> {
    if grid.is_empty() {
        return Err(MapError::EmptyGrid { which });
    }
    for (index, pair) in grid.windows(2).enumerate() {
        if !(pair[1] > pair[0]) {
            return Err(MapError::NonAscendingGrid { which, index });
        }
    }
    Ok(())
}

impl SpectralMap {
    pub fn new(
        b_grid_t: Vec<f64>,
        f_grid_ghz: Vec<f64>,
        magnitude_db: Vec<Vec<f64>>,
    ) -> Result<Self, MapError> {
        check_ascending(&b_grid_t, "field")?;
        check_ascending(&f_grid_ghz, "frequency")?;
        if magnitude_db.len() != b_grid_t.len()
            || magnitude_db.iter().any(|row| row.len() != f_grid_ghz.len())
        {
            let cols = magnitude_db.first().map_or(0, |r| r.len());
            return Err(MapError::DimensionMismatch {
                rows: magnitude_db.len(),
                cols,
                expected_rows: b_grid_t.len(),
                expected_cols: f_grid_ghz.len(),
            });
        }
        for (b_index, row) in magnitude_db.iter().enumerate() {
            for (f_index, value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(MapError::NonFiniteValue { b_index, f_index });
                }
            }
        }
        Ok(Self {
            b_grid_t,
            f_grid_ghz,
            magnitude_db,
        })
    }

    /// Evenly spaced grid helper.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Synthesis settings for [`synth_s21_map`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Cavity half linewidth (Lorentzian HWHM), GHz.
    pub kappa_c_ghz: f64,
    /// Magnon half linewidth, GHz.
    pub kappa_m_ghz: f64,
    /// Standard deviation of additive Gaussian noise on the dB map;
    /// zero disables the noise generator entirely.
    pub noise_db: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            kappa_c_ghz: 0.050,
            kappa_m_ghz: 0.075,
            noise_db: 0.0,
            seed: 0,
        }
    }
}

/// Synthesizes a transmission map of the hybridized system.
///
/// Each field column carries two Lorentzian peaks centred on the full
/// (beyond rotating-wave) eigenfrequencies.  Peak amplitudes follow the
/// photon weight of each branch — `cos²θ` and `sin²θ` with the mixing angle
/// `2θ = atan2(2g, omega_c - omega_m)` — and branch linewidths interpolate
/// between the cavity and magnon linewidths with the same weights, so the
/// cavity-like branch stays bright and sharp while the magnon-like branch
/// fades with detuning, as in measured maps.
pub fn synth_s21_map(
    model: &HybridModel,
    b_grid_t: Vec<f64>,
    f_grid_ghz: Vec<f64>,
    config: &SynthConfig,
) -> Result<SpectralMap, MapError> {
    check_ascending(&b_grid_t, "field")?;
    check_ascending(&f_grid_ghz, "frequency")?;
    if !(config.kappa_c_ghz > 0.0) {
        return Err(MapError::NonPositiveLinewidth(config.kappa_c_ghz));
    }
    if !(config.kappa_m_ghz > 0.0) {
        return Err(MapError::NonPositiveLinewidth(config.kappa_m_ghz));
    }
    if config.noise_db < 0.0 {
        return Err(MapError::NegativeNoise(config.noise_db));
    }

    let noise = if config.noise_db > 0.0 {
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        let normal = Normal::new(0.0, config.noise_db).expect("validated above");
        Some((rng, normal))
    } else {
        None
    };
    let (mut rng, normal) = match noise {
        Some((r, n)) => (Some(r), Some(n)),
        None => (None, None),
    };

    let lorentz = |f: f64, f0: f64, kappa: f64| {
        let d = f - f0;
        kappa * kappa / (d * d + kappa * kappa)
    };

    let mut magnitude_db = Vec::with_capacity(b_grid_t.len());
    for &b in &b_grid_t {
        let (lo, hi) = model
            .eigenfrequencies_ghz(b)
            .map_err(|source| MapError::Model { b_t: b, source })?;
        let omega_m = model.magnon_frequency_ghz(b);
        let two_theta = f64::atan2(2.0 * model.g_cm_ghz, model.omega_c_ghz - omega_m);
        let theta = 0.5 * two_theta;
        let (sin2, cos2) = (theta.sin().powi(2), theta.cos().powi(2));
        // photon weight: cos²θ on the upper branch below resonance,
        // migrating to the lower branch above it
        let (amp_hi, amp_lo) = (cos2, sin2);
        let kappa_hi = cos2 * config.kappa_c_ghz + sin2 * config.kappa_m_ghz;
        let kappa_lo = sin2 * config.kappa_c_ghz + cos2 * config.kappa_m_ghz;

        let mut row = Vec::with_capacity(f_grid_ghz.len());
        for &f in &f_grid_ghz {
            let power = amp_lo * lorentz(f, lo, kappa_lo) + amp_hi * lorentz(f, hi, kappa_hi);
            let mut db = 10.0 * power.log10();
            if let (Some(rng), Some(normal)) = (rng.as_mut(), normal.as_ref()) {
                db += normal.sample(rng);
            }
            row.push(db);
        }
        magnitude_db.push(row);
    }

    SpectralMap::new(b_grid_t, f_grid_ghz, magnitude_db)
}

pub const MAP_HEADER: [&str; 3] = ["b_tesla", "freq_ghz", "s21_db"];

/// Serializes a map in long format, one `(B, f, dB)` row per grid point,
/// field-major, prefixed by the given `#` comment lines.
pub fn write_map(map: &SpectralMap, comments: &[String], out: &mut Vec<u8>) {
    for comment in comments {
        writeln!(out, "# {comment}").expect("writing to memory cannot fail");
    }
    writeln!(out, "{}", MAP_HEADER.join(",")).expect("writing to memory cannot fail");
    for (b, row) in map.b_grid_t.iter().zip(&map.magnitude_db) {
        for (f, db) in map.f_grid_ghz.iter().zip(row) {
            writeln!(out, "{b},{f},{db}").expect("writing to memory cannot fail");
        }
    }
}

fn csv_err(e: csv::Error) -> MapError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => MapError::Io(io),
        other => MapError::Csv {
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Reads a long-format map written by [`write_map`] (or produced by an
/// instrument export that follows the same schema).
pub fn read_map(path: &Path) -> Result<SpectralMap, MapError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    {
        let headers = reader.headers().map_err(|e| MapError::Csv {
            line: 1,
            message: e.to_string(),
        })?;
        let got: Vec<&str> = headers.iter().collect();
        if got != MAP_HEADER {
            return Err(MapError::Csv {
                line: 1,
                message: format!("unexpected header {got:?}; expected {MAP_HEADER:?}"),
            });
        }
    }

    let mut b_grid: Vec<f64> = Vec::new();
    let mut f_grid: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut current_f: Vec<f64> = Vec::new();
    let mut first_block_done = false;

    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(MapError::Csv {
                line,
                message: format!("expected 3 fields, got {}", record.len()),
            });
        }
        let num = |idx: usize| -> Result<f64, MapError> {
            record[idx].parse().map_err(|_| MapError::Csv {
                line,
                message: format!(
                    "invalid number {:?} in column {}",
                    &record[idx], MAP_HEADER[idx]
                ),
            })
        };
        let (b, f, db) = (num(0)?, num(1)?, num(2)?);
        let new_block = match b_grid.last() {
            None => true,
            Some(&last) => b != last,
        };
        if new_block {
            if !b_grid.is_empty() {
                if !first_block_done {
                    f_grid = current_f.clone();
                    first_block_done = true;
                } else if current_f != f_grid {
                    return Err(MapError::Csv {
                        line,
                        message: "frequency grid differs between field columns".into(),
                    });
                }
            }
            b_grid.push(b);
            rows.push(Vec::new());
            current_f = Vec::new();
        }
        current_f.push(f);
        rows.last_mut().expect("pushed above").push(db);
    }
    if !first_block_done {
        f_grid = current_f.clone();
    } else if current_f != f_grid {
        return Err(MapError::Csv {
            line: 0,
            message: "frequency grid differs between field columns".into(),
        });
    }

    SpectralMap::new(b_grid, f_grid, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use polariton_core::MagnonDispersion;

    fn block_model() -> HybridModel {
        HybridModel::new(5.870, 2.690, MagnonDispersion::linear(2.061, 0.1231)).unwrap()
    }

    #[test]
    fn column_maxima_sit_on_the_exact_eigenfrequencies() {
        // note the block sample is deep-strong coupled: its lower branch
        // softens below ≈ 0.048 T, so maps start above that field
        let model = block_model();
        let b_grid = SpectralMap::linspace(0.08, 0.3, 61);
        let f_grid = SpectralMap::linspace(1.0, 11.0, 401);
        let df = f_grid[1] - f_grid[0];
        let map = synth_s21_map(&model, b_grid.clone(), f_grid.clone(), &SynthConfig::default())
            .unwrap();
        for (bi, &b) in b_grid.iter().enumerate() {
            let (lo, hi) = model.eigenfrequencies_ghz(b).unwrap();
            // grid argmax nearest each predicted branch must be within one step
            for target in [lo, hi] {
                if target < f_grid[0] + 2.0 * df || target > *f_grid.last().unwrap() - 2.0 * df {
                    continue;
                }
                let (best_f, _) = map.magnitude_db[bi]
                    .iter()
                    .zip(&f_grid)
                    .filter(|(_, f)| (**f - target).abs() < 0.5)
                    .map(|(db, f)| (*f, *db))
                    .fold((f64::NAN, f64::NEG_INFINITY), |acc, (f, db)| {
                        if db > acc.1 {
                            (f, db)
                        } else {
                            acc
                        }
                    });
                assert!(
                    (best_f - target).abs() <= df,
                    "B = {b}: local max {best_f} vs branch {target}"
                );
            }
        }
    }

    #[test]
    fn noise_is_deterministic_per_seed_and_absent_at_zero() {
        let model = block_model();
        let b = SpectralMap::linspace(0.1, 0.2, 5);
        let f = SpectralMap::linspace(4.0, 8.0, 50);
        let mut config = SynthConfig {
            noise_db: 0.5,
            seed: 42,
            ..SynthConfig::default()
        };
        let m1 = synth_s21_map(&model, b.clone(), f.clone(), &config).unwrap();
        let m2 = synth_s21_map(&model, b.clone(), f.clone(), &config).unwrap();
        assert_eq!(m1, m2);
        config.seed = 43;
        let m3 = synth_s21_map(&model, b.clone(), f.clone(), &config).unwrap();
        assert_ne!(m1, m3);
        config.noise_db = 0.0;
        let clean1 = synth_s21_map(&model, b.clone(), f.clone(), &config).unwrap();
        config.seed = 42;
        let clean2 = synth_s21_map(&model, b, f, &config).unwrap();
        assert_eq!(clean1, clean2, "zero noise must not consume the seed");
    }

    #[test]
    fn synthesis_surfaces_mode_softening_with_the_field_value() {
        // deep-strong coupling close to B where omega_m falls to softening
        let model =
            HybridModel::new(5.0, 4.0, MagnonDispersion::linear(2.0, 0.0)).unwrap();
        let b = SpectralMap::linspace(0.01, 0.5, 20);
        let f = SpectralMap::linspace(1.0, 12.0, 30);
        let err = synth_s21_map(&model, b, f, &SynthConfig::default()).unwrap_err();
        match err {
            MapError::Model { b_t, source } => {
                assert!(b_t < 0.3, "softening should trigger at low field, got {b_t}");
                assert!(matches!(source, ModelError::ModeSoftening { .. }));
            }
            other => panic!("expected model error, got {other}"),
        }
    }

    #[test]
    fn map_csv_round_trip_is_exact() {
        let model = block_model();
        let b = SpectralMap::linspace(0.1, 0.4, 7);
        let f = SpectralMap::linspace(3.0, 9.0, 23);
        let config = SynthConfig {
            noise_db: 0.3,
            seed: 7,
            ..SynthConfig::default()
        };
        let map = synth_s21_map(&model, b, f, &config).unwrap();
        let mut buf = Vec::new();
        write_map(&map, &["config_digest=0123456789abcdef".into()], &mut buf);
        let file = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(file.path(), &buf).unwrap();
        let back = read_map(file.path()).unwrap();
        assert_eq!(back, map);
    }

    #[test]
    fn invalid_grids_and_linewidths_are_rejected() {
        let model = block_model();
        let err = synth_s21_map(
            &model,
            vec![0.2, 0.1],
            vec![1.0, 2.0],
            &SynthConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, MapError::NonAscendingGrid { which: "field", .. }));

        let err = synth_s21_map(
            &model,
            vec![0.1, 0.2],
            vec![1.0, 2.0],
            &SynthConfig {
                kappa_c_ghz: 0.0,
                ..SynthConfig::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, MapError::NonPositiveLinewidth(_)));
    }
}
