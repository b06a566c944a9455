//! `polariton couple` — first-principles coupling rates from a field map.
//!
//! The map comes either from a built-in analytic fixture or from a CSV of
//! discretized cells.  The command reports the transverse form factor, the
//! magnetic and electric filling factors, per-quadrature coupling
//! components, the zero-free-parameter coupling prediction for a chosen
//! material, and the coupling-to-cavity-frequency ratio with its regime
//! classification.  When an effective susceptibility is supplied, the
//! independent filling-factor route is reported alongside — the two
//! estimates deliberately stay separate so they can cross-check each other.

use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use polariton_fieldmap::csv_io::{read_cells, write_map};
use polariton_fieldmap::fixtures::sphere_in_cylinder;
use polariton_fieldmap::materials::resolve_material;
use polariton_fieldmap::{
    coupling_components, coupling_from_filling, filling_factor_electric,
    filling_factor_magnetic, first_principles_coupling, form_factor, CouplingComponents,
    FieldMap, MaterialSpec,
};

use crate::error::AppError;
use crate::io::{csv_comments, echo_config, read_config, write_artifact};

#[derive(Debug, Args)]
pub struct CoupleArgs {
    /// JSON config file; flags override its fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Built-in analytic fixture (`sphere-in-cylinder`).
    #[arg(long, value_name = "NAME")]
    pub fixture: Option<String>,
    /// Fixture resolution, cells per sphere diameter.
    #[arg(long, value_name = "N")]
    pub fixture_cells: Option<usize>,
    /// Field-map CSV of cells (x,y,z,volume,Hx,Hy,Hz,Ex,Ey,Ez,region).
    #[arg(long = "map", value_name = "FILE")]
    pub map: Option<PathBuf>,
    /// Cavity frequency, GHz.
    #[arg(long, value_name = "GHZ")]
    pub omega_c: Option<f64>,
    /// Material name (`yig`, `life`, or an entry in --materials-file).
    #[arg(long, value_name = "NAME")]
    pub material: Option<String>,
    /// JSON file of extra material definitions.
    #[arg(long, value_name = "FILE")]
    pub materials_file: Option<PathBuf>,
    /// Sample relative permittivity for the electric filling factor.
    #[arg(long, value_name = "EPS")]
    pub sample_eps_r: Option<f64>,
    /// Effective susceptibility for the filling-factor coupling route.
    #[arg(long, value_name = "CHI")]
    pub chi_eff: Option<f64>,
    /// Also write the field map as CSV (useful for fixtures).
    #[arg(long, value_name = "FILE")]
    pub emit_map: Option<PathBuf>,
    /// Output artifact JSON path.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

/// Effective coupling configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoupleRunConfig {
    pub fixture: Option<String>,
    pub fixture_cells: usize,
    pub map: Option<String>,
    pub omega_c_ghz: f64,
    pub material: String,
    pub materials_file: Option<String>,
    pub sample_eps_r: Option<f64>,
    pub chi_eff: Option<f64>,
}

impl Default for CoupleRunConfig {
    fn default() -> Self {
        CoupleRunConfig {
            fixture: None,
            fixture_cells: 32,
            map: None,
            omega_c_ghz: 0.0,
            material: "yig".into(),
            materials_file: None,
            sample_eps_r: None,
            chi_eff: None,
        }
    }
}

/// `result` payload of a coupling artifact.
#[derive(Debug, Serialize, Deserialize)]
pub struct CoupleOutput {
    pub omega_c_ghz: f64,
    pub material: MaterialSpec,
    /// Transverse form factor `η ∈ [0, 1]`.
    pub eta: f64,
    /// Magnetic filling factor `ζ_m`.
    pub zeta_m: f64,
    /// Electric filling factor `ζ_e`; absent for maps with no electric
    /// field data.
    pub zeta_e: Option<f64>,
    pub components: CouplingComponents,
    /// Zero-free-parameter coupling prediction, GHz.
    pub g_first_principles_ghz: f64,
    pub g_over_omega_c: f64,
    /// `DSC`, `USC`, `below USC`, or `no transverse coupling`.
    pub classification: String,
    /// Independent `ω_c sqrt(χ_eff ζ_m)` route, when `χ_eff` was given.
    pub g_from_filling_ghz: Option<f64>,
}

fn merge(args: &CoupleArgs, mut config: CoupleRunConfig) -> CoupleRunConfig {
    if let Some(v) = &args.fixture {
        config.fixture = Some(v.clone());
    }
    if let Some(v) = args.fixture_cells {
        config.fixture_cells = v;
    }
    if let Some(v) = &args.map {
        config.map = Some(v.display().to_string());
    }
    if let Some(v) = args.omega_c {
        config.omega_c_ghz = v;
    }
    if let Some(v) = &args.material {
        config.material = v.clone();
    }
    if let Some(v) = &args.materials_file {
        config.materials_file = Some(v.display().to_string());
    }
    if let Some(v) = args.sample_eps_r {
        config.sample_eps_r = Some(v);
    }
    if let Some(v) = args.chi_eff {
        config.chi_eff = Some(v);
    }
    config
}

fn load_map(config: &CoupleRunConfig) -> Result<FieldMap, AppError> {
    match (&config.fixture, &config.map) {
        (Some(_), Some(_)) => Err(AppError::invalid(
            "give either --fixture or --map, not both",
        )),
        (Some(name), None) => match name.as_str() {
            "sphere-in-cylinder" => {
                if config.fixture_cells < 4 {
                    return Err(AppError::invalid(format!(
                        "--fixture-cells must be at least 4, got {}",
                        config.fixture_cells
                    )));
                }
                if !(config.omega_c_ghz > 0.0) {
                    return Err(AppError::invalid(format!(
                        "--omega-c must be positive, got {} GHz",
                        config.omega_c_ghz
                    )));
                }
                Ok(sphere_in_cylinder(config.fixture_cells, config.omega_c_ghz)?)
            }
            other => Err(AppError::invalid(format!(
                "unknown fixture {other:?}; available: sphere-in-cylinder"
            ))),
        },
        (None, Some(path)) => {
            if !(config.omega_c_ghz > 0.0) {
                return Err(AppError::invalid(format!(
                    "--omega-c must be positive, got {} GHz",
                    config.omega_c_ghz
                )));
            }
            let cells = read_cells(Path::new(path))?;
            Ok(FieldMap::new(
                cells,
                config.omega_c_ghz,
                config.sample_eps_r,
            )?)
        }
        (None, None) => Err(AppError::invalid(
            "a field map is required: --fixture NAME or --map CSV",
        )),
    }
}

fn classify(g_transverse_ghz: f64, ratio: f64) -> String {
    if g_transverse_ghz == 0.0 {
        "no transverse coupling".into()
    } else if ratio >= 1.0 {
        "DSC".into()
    } else if ratio >= 0.1 {
        "USC".into()
    } else {
        "below USC".into()
    }
}

pub fn run(args: &CoupleArgs) -> Result<(), AppError> {
    let base = match &args.config {
        Some(path) => read_config::<CoupleRunConfig>(path)?,
        None => CoupleRunConfig::default(),
    };
    let config = merge(args, base);
    echo_config("couple", &config);

    let material = resolve_material(
        &config.material,
        config.materials_file.as_deref().map(Path::new),
    )?;
    let map = load_map(&config)?;

    let eta = form_factor(&map)?;
    let zeta_m = filling_factor_magnetic(&map)?;
    let zeta_e = match filling_factor_electric(&map) {
        Ok(value) => Some(value),
        Err(polariton_fieldmap::FieldMapError::ZeroElectricEnergy) => None,
        Err(err) => return Err(err.into()),
    };
    let components = coupling_components(&map, &material)?;
    let g_first_principles = first_principles_coupling(eta, map.omega_c_ghz, &material);
    let ratio = g_first_principles / map.omega_c_ghz;
    let g_from_filling = config
        .chi_eff
        .map(|chi| coupling_from_filling(map.omega_c_ghz, zeta_m, chi));

    let output = CoupleOutput {
        omega_c_ghz: map.omega_c_ghz,
        material,
        eta,
        zeta_m,
        zeta_e,
        components,
        g_first_principles_ghz: g_first_principles,
        g_over_omega_c: ratio,
        classification: classify(components.g_transverse_ghz, ratio),
        g_from_filling_ghz: g_from_filling,
    };

    match output.zeta_e {
        Some(zeta_e) => println!(
            "eta = {:.5}, zeta_m = {:.5}, zeta_e = {:.5}",
            output.eta, output.zeta_m, zeta_e
        ),
        None => println!(
            "eta = {:.5}, zeta_m = {:.5}, zeta_e undefined (no electric field data)",
            output.eta, output.zeta_m
        ),
    }
    println!(
        "g = {:.4} GHz at omega_c = {} GHz: g/omega_c = {:.4} ({})",
        output.g_first_principles_ghz,
        output.omega_c_ghz,
        output.g_over_omega_c,
        output.classification
    );
    if let Some(g) = output.g_from_filling_ghz {
        println!("filling-factor route: g = {g:.4} GHz");
    }

    if let Some(emit) = &args.emit_map {
        let mut bytes = Vec::new();
        write_map(&map, &csv_comments("field-map", &config), &mut bytes);
        crate::io::write_atomic(emit, &bytes)?;
        println!("wrote {} ({} cells)", emit.display(), map.cells.len());
    }

    write_artifact(&args.out, "coupling", config, output)?;
    println!("wrote {}", args.out.display());
    Ok(())
}
