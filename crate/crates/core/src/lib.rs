//! Classical simulation of the variational quantum eigensolver for small
//! molecules, benchmarked against exact diagonalization.
//!
//! The pipeline runs FCIDUMP ingestion and active-space reduction
//! ([`chem_io`]), Jordan-Wigner mapping ([`qubit_map`]), a hardware-efficient
//! ansatz ([`ansatz`]) on a dense statevector ([`simulator`]) optimized with
//! SPSA ([`optimizer`]), and potential energy surface scans and fits
//! ([`pes`]). Reference energies come from [`exact_solver`].

pub mod ansatz;
pub mod chem_io;
pub mod error;
pub mod exact_solver;
pub mod format;
pub mod optimizer;
pub mod pes;
pub mod qubit_map;
pub mod rng;
pub mod simulator;
pub mod vqe_engine;

pub use error::{Error, Result};

/// 1 kcal/mol in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 1.6e-3;
