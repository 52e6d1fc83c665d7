mod common;

use common::*;
use h2o_vqe::chem_io::{read_fcidump, reduce_active_space, ActiveSpaceSpec};
use h2o_vqe::rng::Xoshiro256;

/// Determinants with every frozen spin orbital filled and every removed one
/// empty span a block of the full Fock matrix; its spectrum must equal the
/// reduced Hamiltonian's spectrum with matching electron count.
fn check(n: usize, na: usize, nb: usize, frozen: &[usize], removed: &[usize], seed: u64) {
    let mut rng = Xoshiro256::new(seed);
    let full = random_hamiltonian(&mut rng, n, na, nb);
    let spec = ActiveSpaceSpec::new(frozen.to_vec(), removed.to_vec());
    let reduced = reduce_active_space(&full, &spec).unwrap();
    assert_eq!(reduced.n_spatial(), n - frozen.len() - removed.len());
    assert_eq!(reduced.n_alpha(), na - frozen.len());

    let fixed_on: usize = frozen.iter().map(|&p| (1 << p) | (1 << (p + n))).sum();
    let fixed_off: usize = removed.iter().map(|&p| (1 << p) | (1 << (p + n))).sum();
    let alpha_mask = (1usize << n) - 1;
    let oracle = restricted_spectrum(&fock_matrix(&full), |d| {
        d & fixed_on == fixed_on
            && d & fixed_off == 0
            && (d & alpha_mask).count_ones() as usize == na
            && (d >> n).count_ones() as usize == nb
    });
    let na_r = reduced.n_alpha();
    let nb_r = reduced.n_beta();
    let nr = reduced.n_spatial();
    let amask = (1usize << nr) - 1;
    let got = restricted_spectrum(&fock_matrix(&reduced), |d| {
        (d & amask).count_ones() as usize == na_r && (d >> nr).count_ones() as usize == nb_r
    });
    assert_eq!(oracle.len(), got.len());
    for (a, b) in oracle.iter().zip(&got) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn frozen_core_only() {
    check(3, 2, 2, &[0], &[], 1);
}

#[test]
fn frozen_and_removed() {
    check(4, 2, 2, &[0], &[3], 2);
    check(5, 3, 3, &[0, 1], &[4], 3);
}

#[test]
fn open_shell() {
    check(4, 3, 2, &[0], &[3], 4);
}

#[test]
fn nothing_to_reduce() {
    let mut rng = Xoshiro256::new(9);
    let h = random_hamiltonian(&mut rng, 3, 1, 1);
    let same = reduce_active_space(&h, &ActiveSpaceSpec::default()).unwrap();
    assert_eq!(same.max_abs_diff(&h), Some(0.0));
}

#[test]
fn water_hf_energy_survives_reduction() {
    let full = read_fcidump(fixture("h2o_sto3g_104.5_0.945.fcidump")).unwrap();
    let reduced = reduce_active_space(&full, &ActiveSpaceSpec::new(vec![0, 1, 2], vec![6])).unwrap();
    let e_full = slater_condon_energy(&full, &aufbau(&full));
    let e_red = slater_condon_energy(&reduced, &aufbau(&reduced));
    assert!((e_full - e_red).abs() < 1e-9, "{e_full} vs {e_red}");
}
