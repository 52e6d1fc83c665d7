//! Molecular Hamiltonian input: FCIDUMP files, active-space reduction,
//! water geometries and scan manifests.

mod active_space;
mod fcidump;
mod geometry;
mod hamiltonian;
mod manifest;

pub use active_space::{reduce_active_space, ActiveSpaceSpec};
pub use fcidump::{parse_fcidump, read_fcidump, write_fcidump};
pub use geometry::{build_geometry, Geometry};
pub use hamiltonian::FermionicHamiltonian;
pub use manifest::{load_manifest, load_manifest_file, ScanEntry, ScanManifest};
