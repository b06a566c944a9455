//! Magnetic material parameters.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::types::FieldMapError;

/// Spin-system parameters of a ferrimagnetic material, reduced to what the
/// coupling formulas need.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    /// Net magnetic moment per spin site, in Bohr magnetons.
    pub moment_ratio: f64,
    /// Number density of spin sites, 1/m³.
    pub spin_density_per_m3: f64,
    /// Landé g-factor of the resonant mode.
    pub g_factor: f64,
}

impl MaterialSpec {
    /// Yttrium iron garnet, the workhorse of cavity magnonics.
    pub fn yig() -> Self {
        Self {
            moment_ratio: 5.0,
            spin_density_per_m3: 2.2e28,
            g_factor: 2.0,
        }
    }

    /// Lithium ferrite: 2.13 times the net spin density of YIG.
    pub fn lithium_ferrite() -> Self {
        Self {
            spin_density_per_m3: 2.13 * 2.2e28,
            ..Self::yig()
        }
    }

    /// Density of effective spin-`1/2` macrospins,
    /// `(moment_ratio / g_factor) * spin_density`, 1/m³.
    ///
    /// The coupling rate scales with the square root of this quantity.
    pub fn macrospin_density_per_m3(&self) -> f64 {
        self.moment_ratio / self.g_factor * self.spin_density_per_m3
    }
}

/// Built-in presets by name.
pub fn builtin_material(name: &str) -> Option<MaterialSpec> {
    match name {
        "yig" => Some(MaterialSpec::yig()),
        "life" | "lithium-ferrite" => Some(MaterialSpec::lithium_ferrite()),
        _ => None,
    }
}

/// Loads named material presets from a JSON file of the form
/// `{"yig": {"moment_ratio": 5.0, "spin_density_per_m3": 2.2e28, "g_factor": 2.0}, ...}`.
pub fn load_materials(path: &Path) -> Result<BTreeMap<String, MaterialSpec>, FieldMapError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Resolves a material by name: the materials file (when given) takes
/// precedence over the built-in presets.
pub fn resolve_material(
    name: &str,
    materials_file: Option<&Path>,
) -> Result<MaterialSpec, FieldMapError> {
    if let Some(path) = materials_file {
        let table = load_materials(path)?;
        if let Some(spec) = table.get(name) {
            return Ok(*spec);
        }
    }
    builtin_material(name).ok_or_else(|| FieldMapError::UnknownMaterial(name.to_string()))
}
