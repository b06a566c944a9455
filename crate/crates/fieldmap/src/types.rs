//! Field-map data model.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldMapError {
    #[error("cavity frequency must be positive, got {0} GHz")]
    NonPositiveCavity(f64),
    #[error("cell {index}: cell volume must be positive, got {volume_m3} m³")]
    NonPositiveCellVolume { index: usize, volume_m3: f64 },
    #[error("cell {index}: field components must be finite")]
    NonFiniteField { index: usize },
    #[error("relative permittivity must be positive, got {0}")]
    NonPositivePermittivity(f64),
    #[error("field map contains no cells")]
    EmptyMap,
    #[error("field map contains no sample cells")]
    NoSampleCells,
    #[error("total magnetic field energy is zero; form factor is undefined")]
    ZeroMagneticEnergy,
    #[error("total electric field energy is zero; electric filling factor is undefined")]
    ZeroElectricEnergy,
    #[error("unknown material {0:?}; expected a built-in name or an entry in the materials file")]
    UnknownMaterial(String),
    #[error("csv line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("materials file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Dielectric classification of a grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// The magnetic sample.
    Sample,
    /// Empty space, relative permittivity 1.
    Vacuum,
    /// A non-magnetic dielectric with the given relative permittivity.
    Dielectric { eps_r: f64 },
}

impl Region {
    pub fn is_sample(&self) -> bool {
        matches!(self, Region::Sample)
    }
}

/// One grid cell of a discretized cavity mode.
///
/// Field amplitudes are real peak values of the mode profile; the overall
/// normalization cancels in every derived quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldCell {
    pub position_m: [f64; 3],
    pub volume_m3: f64,
    pub region: Region,
    /// Electric field amplitude, V/m.
    pub e_field: [f64; 3],
    /// Magnetic field amplitude, A/m.
    pub h_field: [f64; 3],
}

/// A discretized cavity mode with the static field along z and the sample
/// magnetized along z, so the x and y field components are the transverse
/// (coupling) quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    pub cells: Vec<FieldCell>,
    /// Bare frequency of the mapped cavity mode, GHz.
    pub omega_c_ghz: f64,
    /// Relative permittivity of the sample, used only by the electric
    /// filling factor.  Defaults to 1 when not provided.
    pub sample_eps_r: Option<f64>,
}

impl FieldMap {
    pub fn new(
        cells: Vec<FieldCell>,
        omega_c_ghz: f64,
        sample_eps_r: Option<f64>,
    ) -> Result<Self, FieldMapError> {
        if !(omega_c_ghz > 0.0) {
            return Err(FieldMapError::NonPositiveCavity(omega_c_ghz));
        }
        if cells.is_empty() {
            return Err(FieldMapError::EmptyMap);
        }
        if let Some(eps) = sample_eps_r {
            if !(eps > 0.0) {
                return Err(FieldMapError::NonPositivePermittivity(eps));
            }
        }
        for (index, cell) in cells.iter().enumerate() {
            if !(cell.volume_m3 > 0.0) {
                return Err(FieldMapError::NonPositiveCellVolume {
                    index,
                    volume_m3: cell.volume_m3,
                });
            }
            let finite = cell
                .position_m
                .iter()
                .chain(&cell.e_field)
                .chain(&cell.h_field)
                .all(|v| v.is_finite());
            if !finite {
                return Err(FieldMapError::NonFiniteField { index });
            }
            if let Region::Dielectric { eps_r } = cell.region {
                if !(eps_r > 0.0) {
                    return Err(FieldMapError::NonPositivePermittivity(eps_r));
                }
            }
        }
        Ok(Self {
            cells,
            omega_c_ghz,
            sample_eps_r,
        })
    }

    /// Relative permittivity assigned to a cell by its region label.
    pub fn cell_eps_r(&self, cell: &FieldCell) -> f64 {
        match cell.region {
            Region::Sample => self.sample_eps_r.unwrap_or(1.0),
            Region::Vacuum => 1.0,
            Region::Dielectric { eps_r } => eps_r,
        }
    }
}
