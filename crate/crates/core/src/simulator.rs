//! Dense statevector simulation.
//!
//! Basis index bit `k` is the state of qubit `k` (qubit 0 least
//! significant).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::qubit_map::{PauliOperatorSum, PauliTerm};
use crate::rng::Xoshiro256;
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 24;

const IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    X,
    Ry,
    Rz,
    Cnot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    /// CNOT only.
    pub control: Option<usize>,
    /// Ry/Rz only: index into the parameter vector.
    pub parameter_slot: Option<usize>,
}

impl Gate {
    pub fn x(target: usize) -> Self {
        Self {
            kind: GateKind::X,
            target,
            control: None,
            parameter_slot: None,
        }
    }

    pub fn ry(target: usize, slot: usize) -> Self {
        Self {
            kind: GateKind::Ry,
            target,
            control: None,
            parameter_slot: Some(slot),
        }
    }

    pub fn rz(target: usize, slot: usize) -> Self {
        Self {
            kind: GateKind::Rz,
            target,
            control: None,
            parameter_slot: Some(slot),
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cnot,
            target,
            control: Some(control),
            parameter_slot: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        Self::basis_state(n_qubits, 0)
    }

    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::Resource(format!(
                "{n_qubits} qubits exceeds the statevector limit of {MAX_QUBITS}"
            )));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Domain(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes; the length must be a power of two and the
    /// vector normalized to within 1e-10.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() {
            return Err(Error::Domain(format!("amplitude count {dim} is not a power of two")));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::Resource(format!("{n_qubits} qubits exceeds {MAX_QUBITS}")));
        }
        let state = Self {
            n_qubits,
            amplitudes,
        };
        if (state.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(Error::Domain("amplitudes are not normalized".into()));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::Domain(format!(
                "qubit {q} out of range for {} qubits",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Applies `gate` in place, reading angles from `params`.
    pub fn apply(&mut self, gate: &Gate, params: &[f64]) -> Result<()> {
        self.check_qubit(gate.target)?;
        let angle = || -> Result<f64> {
            let slot = gate
                .parameter_slot
                .ok_or_else(|| Error::Domain("rotation gate without parameter slot".into()))?;
            params.get(slot).copied().ok_or_else(|| {
                Error::Domain(format!("parameter slot {slot} beyond {} parameters", params.len()))
            })
        };
        let t = gate.target;
        let bit = 1usize << t;
        match gate.kind {
            GateKind::X => {
                for i in 0..self.amplitudes.len() {
                    if i & bit == 0 {
                        self.amplitudes.swap(i, i | bit);
                    }
                }
            }
            GateKind::Ry => {
                let (s, c) = (angle()? / 2.0).sin_cos();
                for i in 0..self.amplitudes.len() {
                    if i & bit == 0 {
                        let a0 = self.amplitudes[i];
                        let a1 = self.amplitudes[i | bit];
                        self.amplitudes[i] = a0 * c - a1 * s;
                        self.amplitudes[i | bit] = a0 * s + a1 * c;
                    }
                }
            }
            GateKind::Rz => {
                let half = angle()? / 2.0;
                let lo = Complex64::from_polar(1.0, -half);
                let hi = Complex64::from_polar(1.0, half);
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    *a *= if i & bit == 0 { lo } else { hi };
                }
            }
            GateKind::Cnot => {
                let c = gate
                    .control
                    .ok_or_else(|| Error::Domain("CNOT without control".into()))?;
                self.check_qubit(c)?;
                if c == t {
                    return Err(Error::Domain("CNOT control equals target".into()));
                }
                let cbit = 1usize << c;
                for i in 0..self.amplitudes.len() {
                    if i & cbit != 0 && i & bit == 0 {
                        self.amplitudes.swap(i, i | bit);
                    }
                }
            }
        }
        Ok(())
    }

    /// `<psi|P|psi>` for a single Pauli string, coefficient included.
    pub fn term_expectation(&self, term: &PauliTerm) -> Complex64 {
        // states are unit norm; avoids rounding drift on constant offsets
        if term.is_identity() {
            return term.coefficient;
        }
        let x = term.x_mask() as usize;
        let z = term.z_mask() as usize;
        // P|i> = i^{#Y} (-1)^{popcount(i & z)} |i ^ x>
        let y_phase = match term.y_count() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            let v = self.amplitudes[i ^ x].conj() * a;
            if (i & z).count_ones().is_multiple_of(2) {
                acc += v;
            } else {
                acc -= v;
            }
        }
        acc * y_phase * term.coefficient
    }

    /// Expectation value of a Hermitian operator sum.
    pub fn expectation(&self, op: &PauliOperatorSum) -> Result<f64> {
        if op.n_qubits() != self.n_qubits {
            return Err(Error::Domain(format!(
                "{}-qubit operator on {}-qubit state",
                op.n_qubits(),
                self.n_qubits
            )));
        }
        let total: Complex64 = op.terms().map(|t| self.term_expectation(&t)).sum();
        let scale = op.max_abs_coefficient().max(1.0);
        if total.im.abs() > IMAG_TOL * scale * op.len().max(1) as f64 {
            return Err(Error::Consistency(format!(
                "expectation has imaginary part {:e}; operator not Hermitian",
                total.im
            )));
        }
        Ok(total.re)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multinomial sample of `shots` measurements in the computational
    /// basis, deterministic for a given seed.
    pub fn sample_counts(&self, shots: u64, seed: u64) -> BTreeMap<usize, u64> {
        let probs = self.probabilities();
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        let total = acc;
        let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        let mut rng = Xoshiro256::new(seed);
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let u = rng.next_f64() * total;
            // zero-probability bins never satisfy `c > u` first
            let idx = cumulative.partition_point(|&c| c <= u).min(last_nonzero);
            *counts.entry(idx).or_insert(0) += 1;
        }
        counts
    }

    /// `<index> <re> <im>` per amplitude with modulus above 1e-14.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() > 1e-14 {
                let _ = writeln!(out, "{} {:e} {:e}", i, a.re, a.im);
            }
        }
        out
    }
}

/// Returns a copy of `state` with `gate` applied.
pub fn apply_gate(state: &Statevector, gate: &Gate, params: &[f64]) -> Result<Statevector> {
    let mut next = state.clone();
    next.apply(gate, params)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn x_flips() {
        let s = apply_gate(&Statevector::zero_state(1).unwrap(), &Gate::x(0), &[]).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn ry_pi() {
        let s = apply_gate(&Statevector::zero_state(1).unwrap(), &Gate::ry(0, 0), &[PI]).unwrap();
        assert!(s.amplitudes()[0].norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn bell() {
        let s = Statevector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        // (|00> + |10>)/sqrt2 with qubit 0 written first: qubit 0 in superposition
        let out = apply_gate(&s, &Gate::cnot(0, 1), &[]).unwrap();
        let a = out.amplitudes();
        assert!((a[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((a[3].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(a[1].norm() < 1e-15 && a[2].norm() < 1e-15);
    }

    #[test]
    fn z_expectation_and_identity() {
        let s = Statevector::zero_state(1).unwrap();
        let z = PauliOperatorSum::from_terms(1, [PauliTerm::from_label("Z", c(1.0, 0.0)).unwrap()]).unwrap();
        assert_eq!(s.expectation(&z).unwrap(), 1.0);
        let mut r = Statevector::zero_state(3).unwrap();
        r.apply(&Gate::ry(1, 0), &[0.3]).unwrap();
        assert!((r.expectation(&PauliOperatorSum::identity(3, 2.5)).unwrap() - 2.5).abs() < 1e-15);
        assert!(r.expectation(&z).is_err());
    }

    #[test]
    fn probabilities_basic() {
        let one = Statevector::basis_state(1, 1).unwrap();
        assert_eq!(one.probabilities(), vec![0.0, 1.0]);
        let plus = Statevector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
        let p = plus.probabilities();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sampling() {
        let one = Statevector::basis_state(1, 1).unwrap();
        let counts = one.sample_counts(1000, 3);
        assert_eq!(counts.len(), 1);
        assert_eq!(counts[&1], 1000);

        let plus = Statevector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
        let shots = 1_000_000u64;
        let counts = plus.sample_counts(shots, 11);
        assert_eq!(counts.values().sum::<u64>(), shots);
        let sigma = (shots as f64 * 0.25).sqrt();
        for k in 0..2 {
            assert!((counts[&k] as f64 - 5e5).abs() < 5.0 * sigma);
        }
        assert_eq!(plus.sample_counts(1000, 9), plus.sample_counts(1000, 9));
    }

    #[test]
    fn errors() {
        let mut s = Statevector::zero_state(2).unwrap();
        assert!(s.apply(&Gate::x(2), &[]).is_err());
        assert!(s.apply(&Gate::cnot(1, 1), &[]).is_err());
        assert!(s.apply(&Gate::cnot(3, 1), &[]).is_err());
        assert!(s.apply(&Gate::ry(0, 1), &[0.1]).is_err());
        assert!(matches!(Statevector::zero_state(25), Err(Error::Resource(_))));
    }

    #[test]
    fn dump_lists_nonzero() {
        let s = Statevector::basis_state(2, 2).unwrap();
        assert_eq!(s.dump(), "2 1e0 0e0\n");
    }
}
