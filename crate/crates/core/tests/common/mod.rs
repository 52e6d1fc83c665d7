//! Reference implementations used only by tests: a Fock-space Hamiltonian
//! built from explicit creation/annihilation sign rules, and dense
//! Kronecker-product matrices for Pauli strings and gates.
#![allow(dead_code)]

use h2o_vqe::chem_io::FermionicHamiltonian;
use h2o_vqe::rng::Xoshiro256;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type C = Complex64;

/// Spin-orbital index of spatial orbital `p` with spin `sigma` (0 alpha,
/// 1 beta): alpha orbitals first.
pub fn spin_orbital(n_spatial: usize, p: usize, sigma: usize) -> usize {
    p + sigma * n_spatial
}

/// Applies `a_mode` (or its adjoint) to an occupation bitstring.
fn ladder(det: usize, mode: usize, create: bool) -> Option<(f64, usize)> {
    let occupied = det >> mode & 1 == 1;
    if occupied == create {
        return None;
    }
    let below = (det & ((1 << mode) - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((sign, det ^ (1 << mode)))
}

/// Applies a product of ladder operators, rightmost first.
fn apply_string(det: usize, ops: &[(usize, bool)]) -> Option<(f64, usize)> {
    let mut sign = 1.0;
    let mut d = det;
    for &(mode, create) in ops.iter().rev() {
        let (s, next) = ladder(d, mode, create)?;
        sign *= s;
        d = next;
    }
    Some((sign, d))
}

/// Full Fock-space matrix over `2 n` spin orbitals.
pub fn fock_matrix(h: &FermionicHamiltonian) -> DMatrix<f64> {
    let n = h.n_spatial();
    let modes = 2 * n;
    let dim = 1usize << modes;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for det in 0..dim {
        m[(det, det)] += h.e_core();
        for sigma in 0..2 {
            for p in 0..n {
                for q in 0..n {
                    let v = h.h1(p, q);
                    if v == 0.0 {
                        continue;
                    }
                    let ops = [(spin_orbital(n, p, sigma), true), (spin_orbital(n, q, sigma), false)];
                    if let Some((s, out)) = apply_string(det, &ops) {
                        m[(out, det)] += v * s;
                    }
                }
            }
        }
        for sigma in 0..2 {
            for tau in 0..2 {
                for p in 0..n {
                    for q in 0..n {
                        for r in 0..n {
                            for s_ in 0..n {
                                let v = h.h2(p, q, r, s_);
                                if v == 0.0 {
                                    continue;
                                }
                                let ops = [
                                    (spin_orbital(n, p, sigma), true),
                                    (spin_orbital(n, r, tau), true),
                                    (spin_orbital(n, s_, tau), false),
                                    (spin_orbital(n, q, sigma), false),
                                ];
                                if let Some((s, out)) = apply_string(det, &ops) {
                                    m[(out, det)] += 0.5 * v * s;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    m
}

pub fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn sorted_eigenvalues_complex(m: DMatrix<C>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Spectrum of the Fock matrix restricted to determinants satisfying `keep`.
pub fn restricted_spectrum(m: &DMatrix<f64>, keep: impl Fn(usize) -> bool) -> Vec<f64> {
    let idx: Vec<usize> = (0..m.nrows()).filter(|&d| keep(d)).collect();
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);
    sorted_eigenvalues(sub)
}

/// Closed-shell style determinant energy from Slater-Condon rules, with
/// occupied spin orbitals given as (spatial, spin) pairs.
pub fn slater_condon_energy(h: &FermionicHamiltonian, occupied: &[(usize, usize)]) -> f64 {
    let mut e = h.e_core();
    for &(i, _) in occupied {
        e += h.h1(i, i);
    }
    for &(i, si) in occupied {
        for &(j, sj) in occupied {
            e += 0.5 * h.h2(i, i, j, j);
            if si == sj {
                e -= 0.5 * h.h2(i, j, j, i);
            }
        }
    }
    e
}

/// Aufbau determinant: the lowest `n_alpha` alpha and `n_beta` beta orbitals.
pub fn aufbau(h: &FermionicHamiltonian) -> Vec<(usize, usize)> {
    (0..h.n_alpha())
        .map(|p| (p, 0))
        .chain((0..h.n_beta()).map(|p| (p, 1)))
        .collect()
}

pub fn bitstring(n_spatial: usize, occupied: &[(usize, usize)]) -> usize {
    occupied
        .iter()
        .map(|&(p, s)| 1usize << spin_orbital(n_spatial, p, s))
        .sum()
}

/// A random real Hamiltonian with full 8-fold integral symmetry.
pub fn random_hamiltonian(rng: &mut Xoshiro256, n: usize, n_alpha: usize, n_beta: usize) -> FermionicHamiltonian {
    let mut h1 = vec![0.0; n * n];
    for p in 0..n {
        for q in 0..=p {
            let v = rng.uniform(-1.0, 1.0);
            h1[p * n + q] = v;
            h1[q * n + p] = v;
        }
    }
    let mut h2 = vec![0.0; n * n * n * n];
    let at = |p: usize, q: usize, r: usize, s: usize| ((p * n + q) * n + r) * n + s;
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    if at(p, q, r, s) > canonical(n, p, q, r, s) {
                        continue;
                    }
                    let v = rng.uniform(-0.5, 0.5);
                    for (a, b, c, d) in images(p, q, r, s) {
                        h2[at(a, b, c, d)] = v;
                    }
                }
            }
        }
    }
    let e_core = rng.uniform(-2.0, 2.0);
    FermionicHamiltonian::new(n, n_alpha, n_beta, e_core, h1, h2).expect("symmetric by construction")
}

fn images(p: usize, q: usize, r: usize, s: usize) -> [(usize, usize, usize, usize); 8] {
    [
        (p, q, r, s),
        (q, p, r, s),
        (p, q, s, r),
        (q, p, s, r),
        (r, s, p, q),
        (s, r, p, q),
        (r, s, q, p),
        (s, r, q, p),
    ]
}

fn canonical(n: usize, p: usize, q: usize, r: usize, s: usize) -> usize {
    images(p, q, r, s)
        .iter()
        .map(|&(a, b, c, d)| ((a * n + b) * n + c) * n + d)
        .min()
        .expect("nonempty")
}

pub fn pauli_2x2(c: char) -> DMatrix<C> {
    let z = C::new(0.0, 0.0);
    let o = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    match c {
        'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("bad Pauli {c}"),
    }
}

/// Kronecker product of the label's factors; the leftmost character acts on
/// the most significant qubit.
pub fn pauli_dense(label: &str) -> DMatrix<C> {
    label
        .chars()
        .fold(DMatrix::from_element(1, 1, C::new(1.0, 0.0)), |acc, c| acc.kronecker(&pauli_2x2(c)))
}

pub fn ry_2x2(theta: f64) -> DMatrix<C> {
    let (s, c) = (theta / 2.0).sin_cos();
    DMatrix::from_row_slice(2, 2, &[C::new(c, 0.0), C::new(-s, 0.0), C::new(s, 0.0), C::new(c, 0.0)])
}

pub fn rz_2x2(theta: f64) -> DMatrix<C> {
    let z = C::new(0.0, 0.0);
    DMatrix::from_row_slice(
        2,
        2,
        &[C::from_polar(1.0, -theta / 2.0), z, z, C::from_polar(1.0, theta / 2.0)],
    )
}

/// Embeds a one-qubit matrix acting on `target` in an `n`-qubit register.
pub fn embed(n: usize, target: usize, u: &DMatrix<C>) -> DMatrix<C> {
    (0..n).rev().fold(DMatrix::from_element(1, 1, C::new(1.0, 0.0)), |acc, q| {
        if q == target {
            acc.kronecker(u)
        } else {
            acc.kronecker(&pauli_2x2('I'))
        }
    })
}

/// `|0><0|_c ⊗ I + |1><1|_c ⊗ X_t` built from projectors.
pub fn cnot_dense(n: usize, control: usize, target: usize) -> DMatrix<C> {
    let z = C::new(0.0, 0.0);
    let o = C::new(1.0, 0.0);
    let p0 = DMatrix::from_row_slice(2, 2, &[o, z, z, z]);
    let p1 = DMatrix::from_row_slice(2, 2, &[z, z, z, o]);
    let build = |pc: &DMatrix<C>, ut: &DMatrix<C>| {
        (0..n).rev().fold(DMatrix::from_element(1, 1, o), |acc, q| {
            if q == control {
                acc.kronecker(pc)
            } else if q == target {
                acc.kronecker(ut)
            } else {
                acc.kronecker(&pauli_2x2('I'))
            }
        })
    };
    build(&p0, &pauli_2x2('I')) + build(&p1, &pauli_2x2('X'))
}

pub fn max_abs_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}
