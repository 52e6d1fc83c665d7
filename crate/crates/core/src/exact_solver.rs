//! Reference energies by dense diagonalization of the qubit Hamiltonian.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::qubit_map::{total_number_operator, PauliOperatorSum};
use crate::{Error, Result};

/// Largest register accepted by [`to_dense`].
pub const MAX_DENSE_QUBITS: usize = 12;

const SECTOR_TOL: f64 = 1e-6;
const DEGENERACY_TOL: f64 = 1e-9;
const LEAK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub ground_energy: f64,
    pub ground_vector: Option<Vec<Complex64>>,
    pub sector_filtered: bool,
    pub n_particles_expected: Option<usize>,
}

/// Dense matrix of `op`, qubit 0 least significant in the basis index.
pub fn to_dense(op: &PauliOperatorSum) -> Result<DMatrix<Complex64>> {
    let n = op.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Resource(format!(
            "{n} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}"
        )));
    }
    let dim = 1usize << n;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for t in op.terms() {
        let x = t.x_mask() as usize;
        let z = t.z_mask() as usize;
        let y_phase = Complex64::i().powu(t.y_count() % 4);
        let c = t.coefficient * y_phase;
        for col in 0..dim {
            let sign = if (col & z).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            m[(col ^ x, col)] += c * sign;
        }
    }
    Ok(m)
}

/// Ascending eigenpairs with eigenvectors as columns.
fn eigh(m: DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Matrix of `h` on the basis states with `n` set bits, or `None` when `h`
/// maps some of them outside that set.
fn number_block(h: &PauliOperatorSum, n: usize) -> Option<(Vec<usize>, DMatrix<Complex64>)> {
    let basis: Vec<usize> = (0..1usize << h.n_qubits()).filter(|i| i.count_ones() as usize == n).collect();
    let position: HashMap<usize, usize> = basis.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut m = DMatrix::<Complex64>::zeros(basis.len(), basis.len());
    let mut leaked: HashMap<usize, Complex64> = HashMap::new();
    for t in h.terms() {
        let x = t.x_mask() as usize;
        let z = t.z_mask() as usize;
        let c = t.coefficient * Complex64::i().powu(t.y_count() % 4);
        for (col, &i) in basis.iter().enumerate() {
            let v = if (i & z).count_ones().is_multiple_of(2) { c } else { -c };
            match position.get(&(i ^ x)) {
                Some(&row) => m[(row, col)] += v,
                None => *leaked.entry((i ^ x) * basis.len() + col).or_default() += v,
            }
        }
    }
    leaked.values().all(|v| v.norm() < LEAK_TOL).then_some((basis, m))
}

/// Ground state from particle-number blocks when `h` conserves the number
/// of set bits.
fn ground_state_by_blocks(h: &PauliOperatorSum, sector: Option<usize>) -> Option<Result<ExactResult>> {
    let n = h.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return None;
    }
    let sectors: Vec<usize> = match sector {
        Some(s) if s > n => return Some(Err(Error::Sector(s))),
        Some(s) => vec![s],
        None => (0..=n).collect(),
    };
    let mut best: Option<(f64, Vec<usize>, DVector<Complex64>)> = None;
    for s in sectors {
        let (basis, m) = number_block(h, s)?;
        let (values, vectors) = eigh(m);
        if best.as_ref().is_none_or(|b| values[0] < b.0 - DEGENERACY_TOL) {
            best = Some((values[0], basis, vectors.column(0).into_owned()));
        }
    }
    let (energy, basis, v) = best.expect("at least one sector");
    let mut full = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (k, &i) in basis.iter().enumerate() {
        full[i] = v[k];
    }
    Some(Ok(ExactResult {
        ground_energy: energy,
        ground_vector: Some(full),
        sector_filtered: sector.is_some(),
        n_particles_expected: sector,
    }))
}

/// Lowest eigenvalue of `h`, optionally restricted to eigenvectors with
/// `<N> = sector`.
///
/// Number-conserving operators are diagonalized block by block. Otherwise
/// the full matrix is used and degenerate eigenspaces are rotated to
/// diagonalize `N`, so sector labels are well defined whenever `[H, N] = 0`.
pub fn ground_state(h: &PauliOperatorSum, sector: Option<usize>) -> Result<ExactResult> {
    if let Some(result) = ground_state_by_blocks(h, sector) {
        return result;
    }
    ground_state_dense(h, sector)
}

fn ground_state_dense(h: &PauliOperatorSum, sector: Option<usize>) -> Result<ExactResult> {
    let dense = to_dense(h)?;
    let (values, vectors) = eigh(dense);

    let Some(target) = sector else {
        return Ok(ExactResult {
            ground_energy: values[0],
            ground_vector: Some(vectors.column(0).iter().copied().collect()),
            sector_filtered: false,
            n_particles_expected: None,
        });
    };

    let number = to_dense(&total_number_operator(h.n_qubits()))?;
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[start] < DEGENERACY_TOL {
            end += 1;
        }
        let block = vectors.columns(start, end - start).into_owned();
        let projected = block.adjoint() * &number * &block;
        let (occupations, rotation) = eigh(projected);
        for (k, occ) in occupations.iter().enumerate() {
            if (occ - target as f64).abs() < SECTOR_TOL {
                let v: DVector<Complex64> = &block * rotation.column(k);
                return Ok(ExactResult {
                    ground_energy: values[start],
                    ground_vector: Some(v.iter().copied().collect()),
                    sector_filtered: true,
                    n_particles_expected: Some(target),
                });
            }
        }
        start = end;
    }
    Err(Error::Sector(target))
}
