mod common;

use common::*;
use h2o_vqe::ansatz::{build_ansatz, HFReference};
use h2o_vqe::chem_io::{read_fcidump, ActiveSpaceSpec};
use h2o_vqe::pes::QubitProblem;
use h2o_vqe::qubit_map::{jordan_wigner, SpinOrdering};
use h2o_vqe::rng::Xoshiro256;

#[test]
fn zero_angles_give_determinant_energy_on_water() {
    let full = read_fcidump(fixture("h2o_sto3g_104.5_0.945.fcidump")).unwrap();
    let problem = QubitProblem::new(&full, &ActiveSpaceSpec::new(vec![0, 1, 2], vec![6])).unwrap();
    assert_eq!(problem.n_qubits(), 6);
    let oracle_sc = slater_condon_energy(&problem.fermionic, &aufbau(&problem.fermionic));
    let det = bitstring(3, &aufbau(&problem.fermionic));
    let oracle_fock = fock_matrix(&problem.fermionic)[(det, det)];
    assert!((oracle_sc - oracle_fock).abs() < 1e-10);
    for layers in 0..=3 {
        let circuit = problem.ansatz(layers).unwrap();
        let e = circuit
            .prepare_state(&vec![0.0; circuit.n_params()])
            .unwrap()
            .expectation(&problem.hamiltonian)
            .unwrap();
        assert!((e - oracle_sc).abs() < 1e-9, "L={layers}: {e} vs {oracle_sc}");
    }
}

#[test]
fn zero_angles_give_determinant_energy_on_random_systems() {
    let mut rng = Xoshiro256::new(77);
    for (n, na, nb) in [(2, 1, 1), (3, 2, 1), (3, 1, 2), (3, 2, 2)] {
        let h = random_hamiltonian(&mut rng, n, na, nb);
        let q = jordan_wigner(&h, SpinOrdering::Blocked).unwrap();
        let hf = HFReference::blocked(n, na, nb).unwrap();
        let circuit = build_ansatz(2 * n, 2, &hf).unwrap();
        let e = circuit
            .prepare_state(&vec![0.0; circuit.n_params()])
            .unwrap()
            .expectation(&q)
            .unwrap();
        let oracle = slater_condon_energy(&h, &aufbau(&h));
        assert!((e - oracle).abs() < 1e-9);
    }
}
