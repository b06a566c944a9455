//! `polariton report` — summarize artifact JSONs on stdout.
//!
//! Reads one or more artifact files produced by `fit`, `couple`, `predict`,
//! or `magic` and prints a compact human-readable digest of each, keyed by
//! the artifact's `kind` field.  Useful for eyeballing a directory of runs
//! without opening the JSON.

use clap::Args;
use serde_json::Value;
use std::path::PathBuf;

use crate::error::AppError;
use crate::io::read_file;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Artifact JSON files to summarize.
    #[arg(value_name = "FILE", required = true)]
    pub artifacts: Vec<PathBuf>,
}

fn number(value: &Value, path: &[&str]) -> Option<f64> {
    let mut cursor = value;
    for key in path {
        cursor = cursor.get(key)?;
    }
    cursor.as_f64()
}

fn string<'v>(value: &'v Value, path: &[&str]) -> Option<&'v str> {
    let mut cursor = value;
    for key in path {
        cursor = cursor.get(key)?;
    }
    cursor.as_str()
}

fn summarize_fit(artifact: &Value) {
    let stage = string(artifact, &["result", "fit", "stage"]).unwrap_or("?");
    let rms = number(artifact, &["result", "fit", "rms_residual_ghz"]).unwrap_or(f64::NAN);
    let converged = artifact
        .pointer("/result/fit/converged")
        .and_then(Value::as_bool)
        .unwrap_or(false);
    println!("  stage {stage}, rms residual {rms:.6} GHz, converged: {converged}");
    if let Some(parameters) = artifact
        .pointer("/result/fit/parameters")
        .and_then(Value::as_array)
    {
        for parameter in parameters {
            let name = string(parameter, &["name"]).unwrap_or("?");
            let value = number(parameter, &["value"]).unwrap_or(f64::NAN);
            match number(parameter, &["sigma"]) {
                Some(sigma) => println!("    {name} = {value:.6} ± {sigma:.6}"),
                None => println!("    {name} = {value:.6}"),
            }
        }
    }
    if let Some(b) = number(artifact, &["result", "usc_bound", "b_t"]) {
        println!("    ultrastrong bound at B = {b:.5} T");
    }
}

fn summarize_coupling(artifact: &Value) {
    let eta = number(artifact, &["result", "eta"]).unwrap_or(f64::NAN);
    let g = number(artifact, &["result", "g_first_principles_ghz"]).unwrap_or(f64::NAN);
    let ratio = number(artifact, &["result", "g_over_omega_c"]).unwrap_or(f64::NAN);
    let class = string(artifact, &["result", "classification"]).unwrap_or("?");
    println!("  eta = {eta:.5}, g = {g:.4} GHz, g/omega_c = {ratio:.4} ({class})");
}

fn summarize_predict(artifact: &Value) {
    let from = string(artifact, &["config", "from"]).unwrap_or("?");
    let to = string(artifact, &["config", "to"]).unwrap_or("?");
    let g_in = number(artifact, &["config", "g_ghz"]).unwrap_or(f64::NAN);
    let g_out = number(artifact, &["result", "g_scaled_ghz"]).unwrap_or(f64::NAN);
    println!("  g({from}) = {g_in:.4} GHz -> g({to}) = {g_out:.4} GHz");
}

fn summarize_magic(artifact: &Value) {
    let b_star = number(artifact, &["result", "b_star_t"]).unwrap_or(f64::NAN);
    let omega_c = number(artifact, &["result", "omega_c_required_ghz"]).unwrap_or(f64::NAN);
    let d1 = number(artifact, &["result", "d1_ghz_per_t"]).unwrap_or(f64::NAN);
    let d2 = number(artifact, &["result", "d2_ghz_per_t2"]).unwrap_or(f64::NAN);
    let suppression =
        number(artifact, &["result", "suppression_ratio_d2"]).unwrap_or(f64::NAN);
    println!(
        "  B* = {b_star:.6} T, cavity at {omega_c:.6} GHz, d1 = {d1:.3e} GHz/T, \
         d2 = {d2:.3e} GHz/T², suppression {suppression:.1}x"
    );
}

pub fn run(args: &ReportArgs) -> Result<(), AppError> {
    for path in &args.artifacts {
        let text = read_file(path)?;
        let artifact: Value = serde_json::from_str(&text)
            .map_err(|err| AppError::invalid(format!("{}: {err}", path.display())))?;
        let kind = string(&artifact, &["kind"]).ok_or_else(|| {
            AppError::invalid(format!("{}: missing \"kind\" field", path.display()))
        })?;
        let digest = string(&artifact, &["config_digest"]).unwrap_or("?");
        println!("{} [{kind}] config_digest={digest}", path.display());
        match kind {
            "fit" => summarize_fit(&artifact),
            "coupling" => summarize_coupling(&artifact),
            "predict" => summarize_predict(&artifact),
            "magic" => summarize_magic(&artifact),
            other => {
                return Err(AppError::invalid(format!(
                    "{}: unknown artifact kind {other:?}",
                    path.display()
                )))
            }
        }
    }
    Ok(())
}
