//! Hardware-efficient ansatz: Ry and Rz rotation layers with a linear CNOT
//! ladder, started from the Hartree-Fock determinant.
//!
//! The CNOT ladder permutes computational basis states, so an X-prepared
//! HF bitstring would be scrambled by the entanglers even at zero angles.
//! The preparation gates therefore set the preimage of the HF bitstring
//! under the `layers` ladders; with all parameters zero the circuit
//! outputs exactly the HF determinant.

use std::fmt;

use crate::simulator::{Gate, GateKind, Statevector};
use crate::{Error, Result};

/// Occupied qubits of a closed- or open-shell HF determinant in the
/// blocked spin-orbital layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HFReference {
    pub n_qubits: usize,
    pub occupied: Vec<usize>,
}

impl HFReference {
    /// Lowest `n_alpha` alpha qubits and lowest `n_beta` beta qubits.
    pub fn blocked(n_spatial: usize, n_alpha: usize, n_beta: usize) -> Result<Self> {
        if n_alpha > n_spatial || n_beta > n_spatial {
            return Err(Error::Domain(format!(
                "{n_alpha}/{n_beta} electrons do not fit {n_spatial} orbitals"
            )));
        }
        let occupied = (0..n_alpha).chain((0..n_beta).map(|p| p + n_spatial)).collect();
        Ok(Self {
            n_qubits: 2 * n_spatial,
            occupied,
        })
    }

    pub fn bitmask(&self) -> usize {
        self.occupied.iter().fold(0, |m, &q| m | (1 << q))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzCircuit {
    n_qubits: usize,
    layers: usize,
    hf: HFReference,
    prep_gates: Vec<Gate>,
    gates: Vec<Gate>,
    n_params: usize,
}

/// Basis-state image of one CNOT ladder (control i, target i+1, i ascending).
fn ladder_forward(mut b: usize, n: usize) -> usize {
    for q in 0..n.saturating_sub(1) {
        b ^= ((b >> q) & 1) << (q + 1);
    }
    b
}

fn ladder_inverse(mut b: usize, n: usize) -> usize {
    for q in (0..n.saturating_sub(1)).rev() {
        b ^= ((b >> q) & 1) << (q + 1);
    }
    b
}

pub fn build_ansatz(n_qubits: usize, layers: usize, hf: &HFReference) -> Result<AnsatzCircuit> {
    if n_qubits == 0 || n_qubits > crate::simulator::MAX_QUBITS {
        return Err(Error::Domain(format!("unsupported qubit count {n_qubits}")));
    }
    if hf.n_qubits != n_qubits {
        return Err(Error::Domain(format!(
            "HF reference has {} qubits, ansatz {n_qubits}",
            hf.n_qubits
        )));
    }
    if let Some(&q) = hf.occupied.iter().find(|&&q| q >= n_qubits) {
        return Err(Error::Domain(format!("occupied qubit {q} out of range")));
    }

    let mut prep_bits = hf.bitmask();
    for _ in 0..layers {
        prep_bits = ladder_inverse(prep_bits, n_qubits);
    }
    let prep_gates = (0..n_qubits)
        .filter(|q| prep_bits >> q & 1 == 1)
        .map(Gate::x)
        .collect();

    let mut gates = Vec::new();
    let mut slot = 0;
    for layer in 0..=layers {
        for q in 0..n_qubits {
            gates.push(Gate::ry(q, slot));
            slot += 1;
        }
        for q in 0..n_qubits {
            gates.push(Gate::rz(q, slot));
            slot += 1;
        }
        if layer < layers {
            for q in 0..n_qubits - 1 {
                gates.push(Gate::cnot(q, q + 1));
            }
        }
    }

    Ok(AnsatzCircuit {
        n_qubits,
        layers,
        hf: hf.clone(),
        prep_gates,
        gates,
        n_params: slot,
    })
}

impl AnsatzCircuit {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn hf(&self) -> &HFReference {
        &self.hf
    }

    pub fn prep_gates(&self) -> &[Gate] {
        &self.prep_gates
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Basis index reached by the preparation and entanglers at zero angles.
    pub fn zero_angle_bitstring(&self) -> usize {
        let mut b = self.prep_gates.iter().fold(0, |m, g| m | (1 << g.target));
        for _ in 0..self.layers {
            b = ladder_forward(b, self.n_qubits);
        }
        b
    }

    pub fn prepare_state(&self, params: &[f64]) -> Result<Statevector> {
        if params.len() != self.n_params {
            return Err(Error::Domain(format!(
                "expected {} parameters, got {}",
                self.n_params,
                params.len()
            )));
        }
        let mut state = Statevector::zero_state(self.n_qubits)?;
        for g in self.prep_gates.iter().chain(&self.gates) {
            state.apply(g, params)?;
        }
        Ok(state)
    }
}

/// One gate per line: `<kind> <qubits> [slot k]`.
impl fmt::Display for AnsatzCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in self.prep_gates.iter().chain(&self.gates) {
            match g.kind {
                GateKind::X => writeln!(f, "X {}", g.target)?,
                GateKind::Ry => writeln!(f, "RY {} slot {}", g.target, g.parameter_slot.unwrap_or(0))?,
                GateKind::Rz => writeln!(f, "RZ {} slot {}", g.target, g.parameter_slot.unwrap_or(0))?,
                GateKind::Cnot => writeln!(f, "CX {} {}", g.control.unwrap_or(0), g.target)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubit_one_layer() {
        let hf = HFReference {
            n_qubits: 2,
            occupied: vec![0],
        };
        let c = build_ansatz(2, 1, &hf).unwrap();
        assert_eq!(c.n_params(), 8);
        // CX(0,1) maps bits {0,1} to {0}
        assert_eq!(c.zero_angle_bitstring(), 0b01);
        let text = c.to_string();
        let expected_tail = "RY 0 slot 0\nRY 1 slot 1\nRZ 0 slot 2\nRZ 1 slot 3\nCX 0 1\n\
                             RY 0 slot 4\nRY 1 slot 5\nRZ 0 slot 6\nRZ 1 slot 7\n";
        assert!(text.ends_with(expected_tail), "{text}");
        assert_eq!(&text[..text.len() - expected_tail.len()], "X 0\nX 1\n");
    }

    #[test]
    fn depth_zero() {
        let hf = HFReference::blocked(2, 1, 1).unwrap();
        let c = build_ansatz(4, 0, &hf).unwrap();
        assert_eq!(c.n_params(), 8);
        assert!(c.gates().iter().all(|g| g.kind != GateKind::Cnot));
        let xs: Vec<usize> = c.prep_gates().iter().map(|g| g.target).collect();
        assert_eq!(xs, vec![0, 2]);
    }

    #[test]
    fn zero_angles_give_hf_determinant() {
        let hf = HFReference::blocked(3, 2, 2).unwrap();
        assert_eq!(hf.occupied, vec![0, 1, 3, 4]);
        for layers in 0..5 {
            let c = build_ansatz(6, layers, &hf).unwrap();
            assert_eq!(c.zero_angle_bitstring(), 0b011011);
            let p = c.prepare_state(&vec![0.0; c.n_params()]).unwrap().probabilities();
            for (i, v) in p.iter().enumerate() {
                let want = if i == 0b011011 { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-15, "layers {layers} index {i}");
            }
        }
    }

    #[test]
    fn parameter_count_and_slots() {
        let hf = HFReference::blocked(3, 2, 2).unwrap();
        for layers in 0..4 {
            let c = build_ansatz(6, layers, &hf).unwrap();
            assert_eq!(c.n_params(), 2 * 6 * (layers + 1));
            let mut slots: Vec<usize> = c.gates().iter().filter_map(|g| g.parameter_slot).collect();
            slots.sort_unstable();
            assert_eq!(slots, (0..c.n_params()).collect::<Vec<_>>());
            let cnots: Vec<(usize, usize)> = c
                .gates()
                .iter()
                .filter(|g| g.kind == GateKind::Cnot)
                .map(|g| (g.control.unwrap(), g.target))
                .collect();
            assert_eq!(cnots.len(), 5 * layers);
            assert!(cnots.iter().all(|&(a, b)| b == a + 1));
        }
    }

    #[test]
    fn errors() {
        let bad = HFReference {
            n_qubits: 2,
            occupied: vec![2],
        };
        assert!(build_ansatz(2, 1, &bad).is_err());
        let hf = HFReference::blocked(1, 1, 0).unwrap();
        let c = build_ansatz(2, 1, &hf).unwrap();
        assert!(c.prepare_state(&[0.0; 3]).is_err());
    }

    #[test]
    fn ladder_roundtrip() {
        for b in 0..64 {
            assert_eq!(ladder_forward(ladder_inverse(b, 6), 6), b);
        }
    }
}
