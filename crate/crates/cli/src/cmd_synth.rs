//! `polariton synth` — synthesize a two-tone transmission map.

use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use polariton_core::{HybridModel, MagnonDispersion};
use polariton_spectroscopy::map::{self, SpectralMap};
use polariton_spectroscopy::SynthConfig;

use crate::error::AppError;
use crate::io::{csv_comments, echo_config, read_config, write_atomic};
use crate::parse::{parse_dispersion, seed_with_env_override};

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// JSON config file; flags override its fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Cavity frequency, GHz.
    #[arg(long, value_name = "GHZ")]
    pub omega_c: Option<f64>,
    /// Coupling rate, GHz.
    #[arg(long, value_name = "GHZ")]
    pub g: Option<f64>,
    /// Magnon dispersion (linear:GEFF,BOFF | poly:C0,C1,... | turnover:GR,BR,GF,BF,W).
    #[arg(long, value_parser = parse_dispersion)]
    pub dispersion: Option<MagnonDispersion>,
    /// Lowest field, T.
    #[arg(long, value_name = "T")]
    pub b_min: Option<f64>,
    /// Highest field, T.
    #[arg(long, value_name = "T")]
    pub b_max: Option<f64>,
    /// Number of field columns.
    #[arg(long, value_name = "N")]
    pub b_points: Option<usize>,
    /// Lowest probe frequency, GHz.
    #[arg(long, value_name = "GHZ")]
    pub f_min: Option<f64>,
    /// Highest probe frequency, GHz.
    #[arg(long, value_name = "GHZ")]
    pub f_max: Option<f64>,
    /// Number of frequency rows.
    #[arg(long, value_name = "N")]
    pub f_points: Option<usize>,
    /// Cavity linewidth, GHz.
    #[arg(long, value_name = "GHZ")]
    pub kappa_c: Option<f64>,
    /// Magnon linewidth, GHz.
    #[arg(long, value_name = "GHZ")]
    pub kappa_m: Option<f64>,
    /// Gaussian noise level added to the map, dB.
    #[arg(long, value_name = "DB")]
    pub noise_db: Option<f64>,
    /// RNG seed (POLARITON_SEED overrides).
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output CSV path.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

/// Effective synth configuration after merging flags over the config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthRunConfig {
    pub omega_c_ghz: f64,
    pub g_cm_ghz: f64,
    pub dispersion: Option<MagnonDispersion>,
    pub b_min_t: f64,
    pub b_max_t: f64,
    pub b_points: usize,
    pub f_min_ghz: f64,
    pub f_max_ghz: f64,
    pub f_points: usize,
    pub kappa_c_ghz: f64,
    pub kappa_m_ghz: f64,
    pub noise_db: f64,
    pub seed: u64,
}

impl Default for SynthRunConfig {
    fn default() -> Self {
        let line = SynthConfig::default();
        SynthRunConfig {
            omega_c_ghz: 0.0,
            g_cm_ghz: 0.0,
            dispersion: None,
            b_min_t: 0.0,
            b_max_t: 0.0,
            b_points: 0,
            f_min_ghz: 0.0,
            f_max_ghz: 0.0,
            f_points: 0,
            kappa_c_ghz: line.kappa_c_ghz,
            kappa_m_ghz: line.kappa_m_ghz,
            noise_db: line.noise_db,
            seed: line.seed,
        }
    }
}

fn merge(args: &SynthArgs, mut config: SynthRunConfig) -> SynthRunConfig {
    if let Some(v) = args.omega_c {
        config.omega_c_ghz = v;
    }
    if let Some(v) = args.g {
        config.g_cm_ghz = v;
    }
    if let Some(v) = &args.dispersion {
        config.dispersion = Some(v.clone());
    }
    if let Some(v) = args.b_min {
        config.b_min_t = v;
    }
    if let Some(v) = args.b_max {
        config.b_max_t = v;
    }
    if let Some(v) = args.b_points {
        config.b_points = v;
    }
    if let Some(v) = args.f_min {
        config.f_min_ghz = v;
    }
    if let Some(v) = args.f_max {
        config.f_max_ghz = v;
    }
    if let Some(v) = args.f_points {
        config.f_points = v;
    }
    if let Some(v) = args.kappa_c {
        config.kappa_c_ghz = v;
    }
    if let Some(v) = args.kappa_m {
        config.kappa_m_ghz = v;
    }
    if let Some(v) = args.noise_db {
        config.noise_db = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    config
}

fn validate(config: &SynthRunConfig) -> Result<(), AppError> {
    if config.dispersion.is_none() {
        return Err(AppError::invalid(
            "a magnon dispersion is required (--dispersion or the config file)",
        ));
    }
    if config.b_points < 2 || config.f_points < 2 {
        return Err(AppError::invalid(format!(
            "grids need at least 2 points per axis, got {}×{}",
            config.b_points, config.f_points
        )));
    }
    if !(config.b_max_t > config.b_min_t) {
        return Err(AppError::invalid(format!(
            "field range must have b_min < b_max, got [{}, {}]",
            config.b_min_t, config.b_max_t
        )));
    }
    if !(config.f_max_ghz > config.f_min_ghz) {
        return Err(AppError::invalid(format!(
            "frequency range must have f_min < f_max, got [{}, {}]",
            config.f_min_ghz, config.f_max_ghz
        )));
    }
    Ok(())
}

pub fn run(args: &SynthArgs) -> Result<(), AppError> {
    let base = match &args.config {
        Some(path) => read_config::<SynthRunConfig>(path)?,
        None => SynthRunConfig::default(),
    };
    let mut config = merge(args, base);
    config.seed = seed_with_env_override(config.seed).map_err(AppError::invalid)?;
    validate(&config)?;
    echo_config("synth", &config);

    let dispersion = config.dispersion.clone().expect("validated above");
    let model = HybridModel::new(config.omega_c_ghz, config.g_cm_ghz, dispersion)?;
    let synth = SynthConfig {
        kappa_c_ghz: config.kappa_c_ghz,
        kappa_m_ghz: config.kappa_m_ghz,
        noise_db: config.noise_db,
        seed: config.seed,
    };
    let b_grid = SpectralMap::linspace(config.b_min_t, config.b_max_t, config.b_points);
    let f_grid = SpectralMap::linspace(config.f_min_ghz, config.f_max_ghz, config.f_points);
    let map = polariton_spectroscopy::synth_s21_map(&model, b_grid, f_grid, &synth)?;

    let mut bytes = Vec::new();
    map::write_map(&map, &csv_comments("spectral-map", &config), &mut bytes);
    write_atomic(&args.out, &bytes)?;
    println!(
        "wrote {} ({} fields × {} frequencies)",
        args.out.display(),
        map.b_grid_t.len(),
        map.f_grid_ghz.len()
    );
    Ok(())
}
