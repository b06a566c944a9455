//! `polariton predict` — rescale a measured coupling to another material.
//!
//! At fixed geometry the coupling rate scales with the square root of the
//! macrospin density, so a coupling measured with one sample predicts the
//! coupling for a different material in the same cavity with no new fit.

use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use polariton_fieldmap::materials::resolve_material;
use polariton_fieldmap::{material_scale, MaterialSpec};

use crate::error::AppError;
use crate::io::{echo_config, read_config, write_artifact};

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// JSON config file; flags override its fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Measured coupling rate, GHz.
    #[arg(long, value_name = "GHZ")]
    pub g: Option<f64>,
    /// Material the coupling was measured with.
    #[arg(long, value_name = "NAME")]
    pub from: Option<String>,
    /// Material to predict for.
    #[arg(long, value_name = "NAME")]
    pub to: Option<String>,
    /// JSON file of extra material definitions.
    #[arg(long, value_name = "FILE")]
    pub materials_file: Option<PathBuf>,
    /// Output artifact JSON path.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

/// Effective prediction configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictRunConfig {
    pub g_ghz: f64,
    pub from: String,
    pub to: String,
    pub materials_file: Option<String>,
}

impl Default for PredictRunConfig {
    fn default() -> Self {
        PredictRunConfig {
            g_ghz: 0.0,
            from: String::new(),
            to: String::new(),
            materials_file: None,
        }
    }
}

/// `result` payload of a predict artifact.
#[derive(Debug, Serialize, Deserialize)]
pub struct PredictOutput {
    pub g_scaled_ghz: f64,
    /// `sqrt(ρ_to / ρ_from)` in macrospin density.
    pub scale_factor: f64,
    pub from_material: MaterialSpec,
    pub to_material: MaterialSpec,
}

pub fn run(args: &PredictArgs) -> Result<(), AppError> {
    let mut config = match &args.config {
        Some(path) => read_config::<PredictRunConfig>(path)?,
        None => PredictRunConfig::default(),
    };
    if let Some(v) = args.g {
        config.g_ghz = v;
    }
    if let Some(v) = &args.from {
        config.from = v.clone();
    }
    if let Some(v) = &args.to {
        config.to = v.clone();
    }
    if let Some(v) = &args.materials_file {
        config.materials_file = Some(v.display().to_string());
    }
    if config.from.is_empty() || config.to.is_empty() {
        return Err(AppError::invalid(
            "both --from and --to materials are required",
        ));
    }
    if !(config.g_ghz > 0.0) {
        return Err(AppError::invalid(format!(
            "--g must be a positive coupling rate, got {} GHz",
            config.g_ghz
        )));
    }
    echo_config("predict", &config);

    let materials_file = config.materials_file.as_deref().map(Path::new);
    let from_material = resolve_material(&config.from, materials_file)?;
    let to_material = resolve_material(&config.to, materials_file)?;
    let g_scaled = material_scale(config.g_ghz, &from_material, &to_material);
    let output = PredictOutput {
        g_scaled_ghz: g_scaled,
        scale_factor: g_scaled / config.g_ghz,
        from_material,
        to_material,
    };

    println!(
        "g({}) = {:.4} GHz -> g({}) = {:.4} GHz (x{:.5})",
        config.from, config.g_ghz, config.to, output.g_scaled_ghz, output.scale_factor
    );
    write_artifact(&args.out, "predict", config, output)?;
    println!("wrote {}", args.out.display());
    Ok(())
}
