//! Residual stresses in layered thick-walled tubes, modelled through a
//! prestrain tensor `F0` that maps each particle of the load-free body to its
//! own stress-free state.
//!
//! Lengths are in mm, stresses in kPa, viscosities in kPa·s, forces in μN
//! and energies in μJ.

pub mod cli;
pub mod config;
pub mod constitutive;
pub mod driver;
pub mod energy_scan;
pub mod error;
pub mod quadrature;
pub mod solve;
pub mod tensor;
pub mod tube;
pub mod viscoelastic;

#[cfg(test)]
mod testutil;

pub use constitutive::{EquilibriumMaterial, HolzapfelFibre, MooneyRivlin, PreStress, StrainEnergy};
pub use driver::{run_point, LoadProgram, PointTrace};
pub use energy_scan::{equilibrate_opened, find_opening_angle, opened_energy, EnergyCurve, OpenedStateCandidate, ScanGrid};
pub use error::{Error, Result};
pub use tensor::Tensor2;
pub use tube::{
    solve_inverse_sf, solve_load_free, LayerMaterial, LayerParams, LayerStack, MaterialLayer, OpeningMap,
    SectorGeometry, TubeGeometry,
};
pub use viscoelastic::{FibreMaxwell, IsoMaxwell, MaxwellBranches, ViscousState};
