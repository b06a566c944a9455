//! `polariton magic` — locate a double-magic operating point.
//!
//! A turning point of the magnon dispersion inside the bracket fixes the
//! magic field `B*`; choosing the cavity in resonance there makes both the
//! first and second field derivatives of the polariton transition vanish
//! simultaneously.  The command reports the required cavity frequency, the
//! residual derivatives, the curvature suppression relative to a detuned
//! cavity, and an optional field scan around `B*`.

use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use polariton_core::MagnonDispersion;
use polariton_metrology::{sensitivity_report, write_scan, SensitivityConfig};

use crate::error::AppError;
use crate::io::{csv_comments, echo_config, read_config, read_file, write_artifact, write_atomic};
use crate::parse::{parse_dispersion, parse_window};

#[derive(Debug, Args)]
pub struct MagicArgs {
    /// JSON config file; flags override its fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Magnon dispersion (poly:... or turnover:...; a linear line has no
    /// turning point).
    #[arg(long, value_parser = parse_dispersion)]
    pub dispersion: Option<MagnonDispersion>,
    /// Coupling rate, GHz.
    #[arg(long, value_name = "GHZ")]
    pub g: Option<f64>,
    /// Take dispersion and coupling from a fit artifact JSON.
    #[arg(long, value_name = "FILE")]
    pub from_fit: Option<PathBuf>,
    /// Field bracket LO,HI to search for the turning point, T.
    #[arg(long, value_parser = parse_window, value_name = "LO,HI")]
    pub bracket: Option<[f64; 2]>,
    /// Cavity detuning used for the suppression ratio, in units of g.
    #[arg(long, value_name = "X")]
    pub detune_in_g: Option<f64>,
    /// Acceptance threshold on |d omega/dB| at B*, GHz/T.
    #[arg(long, value_name = "GHZ_PER_T")]
    pub d1_threshold: Option<f64>,
    /// Acceptance threshold on |d² omega/dB²| at B*, GHz/T².
    #[arg(long, value_name = "GHZ_PER_T2")]
    pub d2_threshold: Option<f64>,
    /// Number of points in the field scan.
    #[arg(long, value_name = "N")]
    pub scan_points: Option<usize>,
    /// Also write the field scan as CSV.
    #[arg(long, value_name = "FILE")]
    pub scan_csv: Option<PathBuf>,
    /// Output artifact JSON path.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

/// Effective magic-point configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MagicRunConfig {
    pub dispersion: Option<MagnonDispersion>,
    pub g_cm_ghz: Option<f64>,
    pub from_fit: Option<String>,
    pub bracket_t: Option<[f64; 2]>,
    pub detune_in_g: f64,
    pub d1_threshold_ghz_per_t: f64,
    pub d2_threshold_ghz_per_t2: f64,
    pub scan_points: usize,
}

impl Default for MagicRunConfig {
    fn default() -> Self {
        let sensitivity = SensitivityConfig::default();
        MagicRunConfig {
            dispersion: None,
            g_cm_ghz: None,
            from_fit: None,
            bracket_t: None,
            detune_in_g: sensitivity.detune_in_g,
            d1_threshold_ghz_per_t: sensitivity.d1_threshold_ghz_per_t,
            d2_threshold_ghz_per_t2: sensitivity.d2_threshold_ghz_per_t2,
            scan_points: sensitivity.scan_points,
        }
    }
}

#[derive(Debug, Deserialize)]
struct FitArtifactIn {
    kind: String,
    result: FitResultIn,
}

#[derive(Debug, Deserialize)]
struct FitResultIn {
    fit: FitModelIn,
}

#[derive(Debug, Deserialize)]
struct FitModelIn {
    model: polariton_core::HybridModel,
}

fn merge(args: &MagicArgs, mut config: MagicRunConfig) -> MagicRunConfig {
    if let Some(v) = &args.dispersion {
        config.dispersion = Some(v.clone());
    }
    if let Some(v) = args.g {
        config.g_cm_ghz = Some(v);
    }
    if let Some(v) = &args.from_fit {
        config.from_fit = Some(v.display().to_string());
    }
    if let Some(v) = args.bracket {
        config.bracket_t = Some(v);
    }
    if let Some(v) = args.detune_in_g {
        config.detune_in_g = v;
    }
    if let Some(v) = args.d1_threshold {
        config.d1_threshold_ghz_per_t = v;
    }
    if let Some(v) = args.d2_threshold {
        config.d2_threshold_ghz_per_t2 = v;
    }
    if let Some(v) = args.scan_points {
        config.scan_points = v;
    }
    config
}

pub fn run(args: &MagicArgs) -> Result<(), AppError> {
    let base = match &args.config {
        Some(path) => read_config::<MagicRunConfig>(path)?,
        None => MagicRunConfig::default(),
    };
    let config = merge(args, base);
    echo_config("magic", &config);

    let seed_model = match &config.from_fit {
        Some(path) => {
            let text = read_file(std::path::Path::new(path))?;
            let artifact: FitArtifactIn = serde_json::from_str(&text)
                .map_err(|err| AppError::invalid(format!("fit artifact {path}: {err}")))?;
            if artifact.kind != "fit" {
                return Err(AppError::invalid(format!(
                    "artifact {path} has kind {:?}, expected \"fit\"",
                    artifact.kind
                )));
            }
            Some(artifact.result.fit.model)
        }
        None => None,
    };
    let dispersion = config
        .dispersion
        .clone()
        .or_else(|| seed_model.as_ref().map(|m| m.dispersion.clone()))
        .ok_or_else(|| {
            AppError::invalid("a magnon dispersion is required (--dispersion or --from-fit)")
        })?;
    let g_cm_ghz = config
        .g_cm_ghz
        .or_else(|| seed_model.as_ref().map(|m| m.g_cm_ghz))
        .ok_or_else(|| AppError::invalid("a coupling rate is required (--g or --from-fit)"))?;
    let bracket = config
        .bracket_t
        .ok_or_else(|| AppError::invalid("a search bracket is required (--bracket LO,HI)"))?;

    let sensitivity = SensitivityConfig {
        detune_in_g: config.detune_in_g,
        d1_threshold_ghz_per_t: config.d1_threshold_ghz_per_t,
        d2_threshold_ghz_per_t2: config.d2_threshold_ghz_per_t2,
        scan_points: config.scan_points,
    };
    let report = sensitivity_report(&dispersion, g_cm_ghz, bracket, &sensitivity)?;

    println!(
        "magic point: B* = {:.6} T, cavity must sit at {:.6} GHz",
        report.b_star_t, report.omega_c_required_ghz
    );
    println!(
        "transition {:.6} GHz (= 2g {}): d1 = {:.3e} GHz/T, d2 = {:.3e} GHz/T²",
        report.omega_cmp_ghz,
        if (report.omega_cmp_ghz - 2.0 * g_cm_ghz).abs() < 1e-6 {
            "exactly"
        } else {
            "nominally"
        },
        report.d1_ghz_per_t,
        report.d2_ghz_per_t2
    );
    println!(
        "curvature suppression vs cavity detuned by {}g: {:.1}x",
        config.detune_in_g, report.suppression_ratio_d2
    );

    if let Some(scan_path) = &args.scan_csv {
        let mut bytes = Vec::new();
        write_scan(&report, &csv_comments("magic-scan", &config), &mut bytes);
        write_atomic(scan_path, &bytes)?;
        println!("wrote {} ({} scan rows)", scan_path.display(), report.scan.len());
    }

    write_artifact(&args.out, "magic", config, report)?;
    println!("wrote {}", args.out.display());
    Ok(())
}
