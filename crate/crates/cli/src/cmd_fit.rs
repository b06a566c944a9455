//! `polariton fit` — fit hybrid-mode models to ridge data.
//!
//! Three stages cover the usual workflow:
//!
//! * `a` / `linear` — cavity frequency, coupling, and a linear Zeeman
//!   magnon line, fit simultaneously near the avoided crossing; also
//!   reports the closed-form ultrastrong-coupling bound.
//! * `b` / `polynomial` — holding the stage-A cavity frequency and
//!   coupling fixed, invert each ridge point to a bare magnon frequency
//!   and fit a free-form polynomial magnon line.
//! * `c` / `turnover` — a smooth two-asymptote turnover dispersion for
//!   materials whose tuning line folds back.

use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use polariton_core::{HybridModel, MagnonDispersion};
use polariton_spectroscopy::map::read_map;
use polariton_spectroscopy::ridge::read_ridges;
use polariton_spectroscopy::{
    extract_ridges, fit_linear, fit_polynomial_magnon, fit_turnover, usc_bound, ExtractConfig,
    FitResult, LinearStageOptions, PolynomialStageOptions, RidgeSet, TurnoverStageOptions,
    UscBound,
};

use crate::error::AppError;
use crate::io::{echo_config, read_config, read_file, write_artifact};
use crate::parse::{parse_dispersion, parse_window};

#[derive(Debug, Args)]
pub struct FitArgs {
    /// JSON config file; flags override its fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Input ridge CSV (b_tesla,branch_id,freq_ghz,weight).
    #[arg(long, value_name = "FILE")]
    pub ridges: Option<PathBuf>,
    /// Input transmission map CSV; ridges are extracted first.
    #[arg(long = "map", value_name = "FILE")]
    pub map: Option<PathBuf>,
    /// Ridge extraction: minimum peak prominence, dB (map input only).
    #[arg(long, value_name = "DB")]
    pub min_prominence: Option<f64>,
    /// Ridge extraction: branches per column (map input only).
    #[arg(long, value_name = "N")]
    pub max_branches: Option<usize>,
    /// Ridge extraction: minimum branch length (map input only).
    #[arg(long, value_name = "N")]
    pub min_branch_points: Option<usize>,
    /// Fit stage: a|linear, b|polynomial, c|turnover.
    #[arg(long, value_name = "STAGE")]
    pub stage: Option<String>,
    /// Initial cavity frequency, GHz.
    #[arg(long, value_name = "GHZ")]
    pub omega_c: Option<f64>,
    /// Initial coupling rate, GHz.
    #[arg(long, value_name = "GHZ")]
    pub g: Option<f64>,
    /// Initial magnon dispersion (same syntax as `synth --dispersion`).
    #[arg(long, value_parser = parse_dispersion)]
    pub dispersion: Option<MagnonDispersion>,
    /// Seed the initial model from an earlier fit artifact JSON.
    #[arg(long, value_name = "FILE")]
    pub from_fit: Option<PathBuf>,
    /// Field window LO,HI for stages a and b, T.
    #[arg(long, value_parser = parse_window, value_name = "LO,HI")]
    pub window: Option<[f64; 2]>,
    /// Magnon polynomial order for stage b.
    #[arg(long, value_name = "N")]
    pub order: Option<usize>,
    /// Rising-asymptote window LO,HI for stage c, T.
    #[arg(long, value_parser = parse_window, value_name = "LO,HI")]
    pub rising_window: Option<[f64; 2]>,
    /// Falling-asymptote window LO,HI for stage c, T.
    #[arg(long, value_parser = parse_window, value_name = "LO,HI")]
    pub falling_window: Option<[f64; 2]>,
    /// Initial blend width for stage c, GHz.
    #[arg(long, value_name = "GHZ")]
    pub init_blend_width: Option<f64>,
    /// Output artifact JSON path.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

/// Effective fit configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitRunConfig {
    pub ridges: Option<String>,
    pub map: Option<String>,
    pub min_prominence_db: f64,
    pub max_branches: usize,
    pub min_branch_points: usize,
    pub stage: String,
    pub init_omega_c_ghz: Option<f64>,
    pub init_g_cm_ghz: Option<f64>,
    pub init_dispersion: Option<MagnonDispersion>,
    pub from_fit: Option<String>,
    pub window_t: Option<[f64; 2]>,
    pub order: usize,
    pub rising_window_t: Option<[f64; 2]>,
    pub falling_window_t: Option<[f64; 2]>,
    pub init_blend_width_ghz: f64,
}

impl Default for FitRunConfig {
    fn default() -> Self {
        FitRunConfig {
            ridges: None,
            map: None,
            min_prominence_db: ExtractConfig::default().min_prominence_db,
            max_branches: ExtractConfig::default().max_branches,
            min_branch_points: ExtractConfig::default().min_branch_points,
            stage: "linear".into(),
            init_omega_c_ghz: None,
            init_g_cm_ghz: None,
            init_dispersion: None,
            from_fit: None,
            window_t: None,
            order: PolynomialStageOptions::default().order,
            rising_window_t: None,
            falling_window_t: None,
            init_blend_width_ghz: 0.05,
        }
    }
}

/// The parts of an artifact JSON needed to seed a follow-on fit.
#[derive(Debug, Deserialize)]
struct FitArtifactIn {
    kind: String,
    result: FitOutput,
}

/// `result` payload of a fit artifact.
#[derive(Debug, Serialize, Deserialize)]
pub struct FitOutput {
    pub fit: FitResult,
    /// Field where `g / omega_m(B)` falls to 0.1 (linear stage only).
    pub usc_bound: Option<UscBound>,
}

fn merge(args: &FitArgs, mut config: FitRunConfig) -> FitRunConfig {
    if let Some(v) = &args.ridges {
        config.ridges = Some(v.display().to_string());
    }
    if let Some(v) = &args.map {
        config.map = Some(v.display().to_string());
    }
    if let Some(v) = args.min_prominence {
        config.min_prominence_db = v;
    }
    if let Some(v) = args.max_branches {
        config.max_branches = v;
    }
    if let Some(v) = args.min_branch_points {
        config.min_branch_points = v;
    }
    if let Some(v) = &args.stage {
        config.stage = v.clone();
    }
    if let Some(v) = args.omega_c {
        config.init_omega_c_ghz = Some(v);
    }
    if let Some(v) = args.g {
        config.init_g_cm_ghz = Some(v);
    }
    if let Some(v) = &args.dispersion {
        config.init_dispersion = Some(v.clone());
    }
    if let Some(v) = &args.from_fit {
        config.from_fit = Some(v.display().to_string());
    }
    if let Some(v) = args.window {
        config.window_t = Some(v);
    }
    if let Some(v) = args.order {
        config.order = v;
    }
    if let Some(v) = args.rising_window {
        config.rising_window_t = Some(v);
    }
    if let Some(v) = args.falling_window {
        config.falling_window_t = Some(v);
    }
    if let Some(v) = args.init_blend_width {
        config.init_blend_width_ghz = v;
    }
    config
}

fn load_ridges(config: &FitRunConfig) -> Result<RidgeSet, AppError> {
    match (&config.ridges, &config.map) {
        (Some(_), Some(_)) => Err(AppError::invalid(
            "give either --ridges or --map, not both",
        )),
        (Some(path), None) => Ok(read_ridges(Path::new(path))?),
        (None, Some(path)) => {
            let map = read_map(Path::new(path))?;
            let extract = ExtractConfig {
                min_prominence_db: config.min_prominence_db,
                max_branches: config.max_branches,
                min_branch_points: config.min_branch_points,
            };
            Ok(extract_ridges(&map, &extract)?)
        }
        (None, None) => Err(AppError::invalid(
            "ridge input is required: --ridges CSV or --map CSV",
        )),
    }
}

fn load_seed_fit(path: &str) -> Result<FitResult, AppError> {
    let text = read_file(Path::new(path))?;
    let artifact: FitArtifactIn = serde_json::from_str(&text)
        .map_err(|err| AppError::invalid(format!("fit artifact {path}: {err}")))?;
    if artifact.kind != "fit" {
        return Err(AppError::invalid(format!(
            "artifact {path} has kind {:?}, expected \"fit\"",
            artifact.kind
        )));
    }
    Ok(artifact.result.fit)
}

/// Assemble the initial model from `--from-fit` and/or explicit flags.
fn initial_model(config: &FitRunConfig) -> Result<HybridModel, AppError> {
    let seed = match &config.from_fit {
        Some(path) => Some(load_seed_fit(path)?),
        None => None,
    };
    let omega_c = config
        .init_omega_c_ghz
        .or_else(|| seed.as_ref().map(|fit| fit.model.omega_c_ghz))
        .ok_or_else(|| {
            AppError::invalid("initial cavity frequency is required (--omega-c or --from-fit)")
        })?;
    let g = config
        .init_g_cm_ghz
        .or_else(|| seed.as_ref().map(|fit| fit.model.g_cm_ghz))
        .ok_or_else(|| {
            AppError::invalid("initial coupling is required (--g or --from-fit)")
        })?;
    let dispersion = config
        .init_dispersion
        .clone()
        .or_else(|| seed.map(|fit| fit.model.dispersion))
        .ok_or_else(|| {
            AppError::invalid(
                "an initial magnon dispersion is required (--dispersion or --from-fit)",
            )
        })?;
    Ok(HybridModel::new(omega_c, g, dispersion)?)
}

fn run_stage(config: &FitRunConfig, ridges: &RidgeSet) -> Result<FitOutput, AppError> {
    match config.stage.as_str() {
        "a" | "linear" => {
            let init = initial_model(config)?;
            let options = LinearStageOptions {
                window_t: config.window_t,
                ..LinearStageOptions::default()
            };
            let fit = fit_linear(ridges, &init, &options)?;
            let bound = usc_bound(&fit).ok();
            Ok(FitOutput {
                fit,
                usc_bound: bound,
            })
        }
        "b" | "polynomial" => {
            let init = initial_model(config)?;
            let options = PolynomialStageOptions {
                order: config.order,
                window_t: config.window_t,
            };
            let fit = fit_polynomial_magnon(ridges, init.omega_c_ghz, init.g_cm_ghz, &options)?;
            Ok(FitOutput {
                fit,
                usc_bound: None,
            })
        }
        "c" | "turnover" => {
            let rising = config.rising_window_t.ok_or_else(|| {
                AppError::invalid("the turnover stage needs --rising-window LO,HI")
            })?;
            let falling = config.falling_window_t.ok_or_else(|| {
                AppError::invalid("the turnover stage needs --falling-window LO,HI")
            })?;
            let init = initial_model(config)?;
            let mut options = TurnoverStageOptions::new(rising, falling);
            options.init_blend_width_ghz = config.init_blend_width_ghz;
            let fit = fit_turnover(ridges, &init, &options)?;
            Ok(FitOutput {
                fit,
                usc_bound: None,
            })
        }
        other => Err(AppError::invalid(format!(
            "unknown stage {other:?}; expected a|linear, b|polynomial, or c|turnover"
        ))),
    }
}

pub fn run(args: &FitArgs) -> Result<(), AppError> {
    let base = match &args.config {
        Some(path) => read_config::<FitRunConfig>(path)?,
        None => FitRunConfig::default(),
    };
    let config = merge(args, base);
    echo_config("fit", &config);

    let ridges = load_ridges(&config)?;
    let output = run_stage(&config, &ridges)?;

    println!(
        "stage {} fit: rms residual {:.6} GHz over {} points, converged: {}",
        output.fit.stage, output.fit.rms_residual_ghz, output.fit.n_points, output.fit.converged
    );
    for parameter in &output.fit.parameters {
        match parameter.sigma {
            Some(sigma) => println!(
                "  {} = {:.6} ± {:.6}{}",
                parameter.name,
                parameter.value,
                sigma,
                if parameter.fixed { " (fixed)" } else { "" }
            ),
            None => println!(
                "  {} = {:.6}{}",
                parameter.name,
                parameter.value,
                if parameter.fixed { " (fixed)" } else { "" }
            ),
        }
    }
    if let Some(bound) = &output.usc_bound {
        println!(
            "  ultrastrong bound: B = {:.5} T (g/omega_m = 0.1), g/omega_c = {:.5}",
            bound.b_t, bound.g_over_omega_c
        );
    }

    write_artifact(&args.out, "fit", config, output)?;
    println!("wrote {}", args.out.display());
    Ok(())
}
