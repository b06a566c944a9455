//! Photon-magnon coupling rates from first principles.
//!
//! A discretized cavity field map — cell positions, volumes, complex-free
//! peak field amplitudes and a region label — is reduced to the geometric
//! quantities that fix the coupling of a magnetic sample to the cavity
//! mode: the transverse form factor, magnetic and electric filling factors,
//! and the per-quadrature coupling components.  Combined with a material's
//! spin density this predicts the coupling rate with no free parameters.

pub mod coupling;
pub mod csv_io;
pub mod fixtures;
pub mod materials;
pub mod quadrature;
pub mod types;

pub use coupling::{
    coupling_components, coupling_from_filling, filling_factor_electric,
    filling_factor_magnetic, first_principles_coupling, form_factor, material_scale,
    rotate_transverse, CouplingComponents,
};
pub use materials::MaterialSpec;
pub use types::{FieldCell, FieldMap, FieldMapError, Region};
