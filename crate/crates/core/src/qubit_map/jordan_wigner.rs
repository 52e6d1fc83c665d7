//! Jordan-Wigner mapping of the electronic Hamiltonian.
//!
//! `a_p -> (X_p + iY_p)/2 Z_{p-1}...Z_0` and
//! `a_p^+ -> (X_p - iY_p)/2 Z_{p-1}...Z_0`.

use num_complex::Complex64;

use super::{Pauli, PauliOperatorSum, PauliTerm};
use crate::chem_io::FermionicHamiltonian;
use crate::{Error, Result};

const HERMITICITY_TOL: f64 = 1e-10;

/// Largest spatial-orbital count accepted by [`jordan_wigner`].
pub const MAX_SPATIAL_ORBITALS: usize = 16;

/// Spin-orbital layout on the qubit register.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SpinOrdering {
    /// All alpha orbitals on qubits `0..n`, then all beta on `n..2n`.
    #[default]
    Blocked,
}

impl SpinOrdering {
    pub fn qubit(self, spatial: usize, beta: bool, n_spatial: usize) -> usize {
        match self {
            SpinOrdering::Blocked => spatial + if beta { n_spatial } else { 0 },
        }
    }
}

fn ladder(mode: usize, n_qubits: usize, dagger: bool) -> Result<PauliOperatorSum> {
    if mode >= n_qubits {
        return Err(Error::Domain(format!("mode {mode} out of range for {n_qubits} qubits")));
    }
    let tail = (1u64 << mode) - 1;
    let bit = 1u64 << mode;
    let y_sign = if dagger { -0.5 } else { 0.5 };
    PauliOperatorSum::from_terms(
        n_qubits,
        [
            PauliTerm::from_masks(n_qubits, bit, tail, Complex64::new(0.5, 0.0))?,
            PauliTerm::from_masks(n_qubits, bit, tail | bit, Complex64::new(0.0, y_sign))?,
        ],
    )
}

/// Jordan-Wigner image of `a_mode`.
pub fn annihilation(mode: usize, n_qubits: usize) -> Result<PauliOperatorSum> {
    ladder(mode, n_qubits, false)
}

/// Jordan-Wigner image of `a_mode^+`.
pub fn creation(mode: usize, n_qubits: usize) -> Result<PauliOperatorSum> {
    ladder(mode, n_qubits, true)
}

/// Maps `H = e_core + sum h_pq a+_p a_q + 1/2 sum (pq|rs) a+_p a+_r a_s a_q`
/// (spin summed) to a qubit operator. Coefficients of the result are real.
pub fn jordan_wigner(h: &FermionicHamiltonian, ordering: SpinOrdering) -> Result<PauliOperatorSum> {
    let n = h.n_spatial();
    if n > MAX_SPATIAL_ORBITALS {
        return Err(Error::Domain(format!(
            "{n} spatial orbitals exceeds the limit of {MAX_SPATIAL_ORBITALS}"
        )));
    }
    let nq = 2 * n;
    let qubit = |p: usize, beta: bool| ordering.qubit(p, beta, n);
    let ann: Vec<PauliOperatorSum> = (0..nq).map(|m| annihilation(m, nq)).collect::<Result<_>>()?;
    let cre: Vec<PauliOperatorSum> = (0..nq).map(|m| creation(m, nq)).collect::<Result<_>>()?;

    let mut total = PauliOperatorSum::identity(nq, h.e_core());
    let mut accumulate = |op: PauliOperatorSum, factor: f64| -> Result<()> {
        for mut t in op.terms() {
            t.coefficient *= factor;
            total.add_term(t)?;
        }
        Ok(())
    };

    // a+_p a_q for every spin-orbital pair
    let mut hop = vec![None; nq * nq];
    for i in 0..nq {
        for j in 0..nq {
            hop[i * nq + j] = Some(cre[i].try_mul(&ann[j])?);
        }
    }
    let hop = |i: usize, j: usize| hop[i * nq + j].as_ref().expect("filled");

    for spin in [false, true] {
        for p in 0..n {
            for q in 0..n {
                let v = h.h1(p, q);
                if v != 0.0 {
                    accumulate(hop(qubit(p, spin), qubit(q, spin)).clone(), v)?;
                }
            }
        }
    }

    for s1 in [false, true] {
        for s2 in [false, true] {
            for p in 0..n {
                for r in 0..n {
                    let (pp, rr) = (qubit(p, s1), qubit(r, s2));
                    if pp == rr {
                        continue;
                    }
                    let pair = cre[pp].try_mul(&cre[rr])?;
                    for s in 0..n {
                        for q in 0..n {
                            let v = h.h2(p, q, r, s);
                            if v == 0.0 {
                                continue;
                            }
                            let (ss, qq) = (qubit(s, s2), qubit(q, s1));
                            if ss == qq {
                                continue;
                            }
                            let op = pair.try_mul(&ann[ss])?.try_mul(&ann[qq])?;
                            accumulate(op, 0.5 * v)?;
                        }
                    }
                }
            }
        }
    }

    total.realize(HERMITICITY_TOL)
}

/// `N = sum_p (I - Z_p)/2`.
pub fn total_number_operator(n_qubits: usize) -> PauliOperatorSum {
    let mut n = PauliOperatorSum::identity(n_qubits, 0.5 * n_qubits as f64);
    for p in 0..n_qubits {
        n.add_term(
            PauliTerm::single(n_qubits, p, Pauli::Z, Complex64::new(-0.5, 0.0)).expect("in range"),
        )
        .expect("same width");
    }
    n
}
