//! `polariton extract` — reduce a transmission map to ridge points.

use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use polariton_spectroscopy::map::read_map;
use polariton_spectroscopy::ridge::write_ridges;
use polariton_spectroscopy::{extract_ridges, ExtractConfig};

use crate::error::AppError;
use crate::io::{csv_comments, echo_config, read_config, write_atomic};

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// JSON config file; flags override its fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Input transmission map CSV (b_tesla,freq_ghz,s21_db).
    #[arg(long = "map", value_name = "FILE")]
    pub map: PathBuf,
    /// Minimum peak prominence, dB.
    #[arg(long, value_name = "DB")]
    pub min_prominence: Option<f64>,
    /// Keep at most this many branches per field column.
    #[arg(long, value_name = "N")]
    pub max_branches: Option<usize>,
    /// Drop branches with fewer points than this.
    #[arg(long, value_name = "N")]
    pub min_branch_points: Option<usize>,
    /// Output ridge CSV path.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

/// Effective extraction configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractRunConfig {
    pub map: String,
    pub min_prominence_db: f64,
    pub max_branches: usize,
    pub min_branch_points: usize,
}

impl Default for ExtractRunConfig {
    fn default() -> Self {
        let extract = ExtractConfig::default();
        ExtractRunConfig {
            map: String::new(),
            min_prominence_db: extract.min_prominence_db,
            max_branches: extract.max_branches,
            min_branch_points: extract.min_branch_points,
        }
    }
}

pub fn run(args: &ExtractArgs) -> Result<(), AppError> {
    let mut config = match &args.config {
        Some(path) => read_config::<ExtractRunConfig>(path)?,
        None => ExtractRunConfig::default(),
    };
    config.map = args.map.display().to_string();
    if let Some(v) = args.min_prominence {
        config.min_prominence_db = v;
    }
    if let Some(v) = args.max_branches {
        config.max_branches = v;
    }
    if let Some(v) = args.min_branch_points {
        config.min_branch_points = v;
    }
    echo_config("extract", &config);

    let map = read_map(&args.map)?;
    let extract = ExtractConfig {
        min_prominence_db: config.min_prominence_db,
        max_branches: config.max_branches,
        min_branch_points: config.min_branch_points,
    };
    let ridges = extract_ridges(&map, &extract)?;

    let mut bytes = Vec::new();
    write_ridges(&ridges, &csv_comments("ridges", &config), &mut bytes);
    write_atomic(&args.out, &bytes)?;
    let branches = ridges
        .points
        .iter()
        .map(|p| p.branch_id)
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    println!(
        "wrote {} ({} points in {} branches)",
        args.out.display(),
        ridges.points.len(),
        branches
    );
    Ok(())
}
