//! Closed-form mathematics of cavity-magnon polaritons.
//!
//! The crate models a single cavity mode at frequency `omega_c` coupled to a
//! magnon mode whose frequency `omega_m(B)` is tuned by an applied static
//! field.  All routines keep the counter-rotating terms of the interaction,
//! so they stay valid in the ultrastrong- and deep-strong-coupling regimes
//! where the usual rotating-wave approximation breaks down.
//!
//! Frequencies are linear frequencies in GHz throughout; fields are in
//! tesla.  Angular factors of 2π appear only inside formulas that need SI
//! angular frequencies and never leak through a public signature.

pub mod constants;
pub mod dispersion;
pub mod hopfield;
pub mod hybrid;

pub use constants::PhysicalConstants;
pub use dispersion::{LinearZeeman, MagnonDispersion, PolynomialDispersion, SmoothTurnover};
pub use hybrid::{HybridModel, ModelError};
