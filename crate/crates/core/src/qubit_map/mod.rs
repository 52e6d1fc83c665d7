//! Pauli operators and the Jordan-Wigner fermion-to-qubit mapping.

mod jordan_wigner;
mod pauli;

pub use jordan_wigner::{annihilation, creation, jordan_wigner, total_number_operator, SpinOrdering};
pub use pauli::{pauli_multiply, Pauli, PauliOperatorSum, PauliTerm, PRUNE_THRESHOLD};
