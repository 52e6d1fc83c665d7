//! VQE objective, random-restart warm start and probability diagnostics.

use rayon::prelude::*;
use serde::Serialize;

use crate::ansatz::AnsatzCircuit;
use crate::format::{round_json, sig12};
use crate::optimizer::{spsa_minimize, OptimizationTrace, SPSAConfig};
use crate::qubit_map::PauliOperatorSum;
use crate::rng::{derive_seed, Xoshiro256};
use crate::simulator::Statevector;
use crate::{Error, Result};

/// Largest and second-largest basis-state probabilities of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityDiagnostics {
    pub top_index: usize,
    pub top_probability: f64,
    pub second_probability: f64,
    pub gap: f64,
}

impl ProbabilityDiagnostics {
    /// Ties go to the lower basis index.
    pub fn from_probabilities(probs: &[f64]) -> Self {
        let mut top = (0usize, f64::NEG_INFINITY);
        let mut second = f64::NEG_INFINITY;
        for (i, &p) in probs.iter().enumerate() {
            if p > top.1 {
                second = top.1;
                top = (i, p);
            } else if p > second {
                second = p;
            }
        }
        let second = second.max(0.0);
        let top_p = top.1.max(0.0);
        Self {
            top_index: top.0,
            top_probability: top_p,
            second_probability: second,
            gap: (top_p - second).clamp(0.0, 1.0),
        }
    }

    /// Estimates from measurement counts.
    pub fn from_counts(counts: &std::collections::BTreeMap<usize, u64>, dim: usize) -> Self {
        let shots: u64 = counts.values().sum();
        let mut probs = vec![0.0; dim];
        for (&i, &c) in counts {
            if i < dim && shots > 0 {
                probs[i] = c as f64 / shots as f64;
            }
        }
        Self::from_probabilities(&probs)
    }
}

pub fn diagnostics_from_state(state: &Statevector) -> ProbabilityDiagnostics {
    ProbabilityDiagnostics::from_probabilities(&state.probabilities())
}

/// `theta -> <psi(theta)|H|psi(theta)>`; NaN on dimension errors so the
/// optimizer aborts with a diagnostic.
pub fn energy(h: &PauliOperatorSum, circuit: &AnsatzCircuit, params: &[f64]) -> Result<f64> {
    circuit.prepare_state(params)?.expectation(h)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VQERun {
    pub energy: f64,
    pub params: Vec<f64>,
    pub initial_params: Vec<f64>,
    #[serde(skip)]
    pub trace: OptimizationTrace,
    pub seed: u64,
    pub diagnostics: ProbabilityDiagnostics,
}

pub fn vqe_energy(
    h: &PauliOperatorSum,
    circuit: &AnsatzCircuit,
    x0: &[f64],
    config: &SPSAConfig,
) -> Result<VQERun> {
    if h.n_qubits() != circuit.n_qubits() {
        return Err(Error::Domain(format!(
            "{}-qubit Hamiltonian with {}-qubit ansatz",
            h.n_qubits(),
            circuit.n_qubits()
        )));
    }
    if x0.len() != circuit.n_params() {
        return Err(Error::Domain(format!(
            "starting point has {} parameters, ansatz needs {}",
            x0.len(),
            circuit.n_params()
        )));
    }
    let objective = |theta: &[f64]| energy(h, circuit, theta).unwrap_or(f64::NAN);
    let trace = spsa_minimize(objective, x0, config)?;
    let state = circuit.prepare_state(&trace.final_params)?;
    let energy = state.expectation(h)?;
    Ok(VQERun {
        energy,
        params: trace.final_params.clone(),
        initial_params: x0.to_vec(),
        diagnostics: diagnostics_from_state(&state),
        seed: config.seed,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WarmStartResult {
    pub runs: Vec<VQERun>,
    /// Run closest to the reference energy.
    pub best_run_index: usize,
    /// Run with the lowest energy.
    pub lowest_run_index: usize,
    pub best_params: Vec<f64>,
    pub reference_energy: f64,
    pub deltas: Vec<f64>,
}

/// Uniform angles in [-pi, pi) for restart `run`.
pub fn random_start(master_seed: u64, run: usize, n_params: usize) -> Vec<f64> {
    let mut rng = Xoshiro256::new(derive_seed(master_seed, 2 * run as u64));
    (0..n_params)
        .map(|_| rng.uniform(-std::f64::consts::PI, std::f64::consts::PI))
        .collect()
}

/// SPSA seed for restart `run`.
pub fn restart_seed(master_seed: u64, run: usize) -> u64 {
    derive_seed(master_seed, 2 * run as u64 + 1)
}

/// Runs VQE `n_restarts` times from random angles and keeps the run whose
/// energy is closest to `reference`. Restarts run in parallel; results are
/// ordered by run index.
pub fn warm_start_search(
    h: &PauliOperatorSum,
    circuit: &AnsatzCircuit,
    n_restarts: usize,
    config: &SPSAConfig,
    reference: f64,
) -> Result<WarmStartResult> {
    if n_restarts == 0 {
        return Err(Error::Domain("warm start needs at least one restart".into()));
    }
    let runs = (0..n_restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = random_start(config.seed, r, circuit.n_params());
            let cfg = SPSAConfig {
                seed: restart_seed(config.seed, r),
                ..config.clone()
            };
            vqe_energy(h, circuit, &x0, &cfg).map_err(|e| e.context(format!("restart {r}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let deltas: Vec<f64> = runs.iter().map(|r| (r.energy - reference).abs()).collect();
    let argmin = |values: &mut dyn Iterator<Item = f64>| {
        values
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best })
            .0
    };
    let best_run_index = argmin(&mut deltas.iter().copied());
    let lowest_run_index = argmin(&mut runs.iter().map(|r| r.energy));
    Ok(WarmStartResult {
        best_params: runs[best_run_index].params.clone(),
        best_run_index,
        lowest_run_index,
        reference_energy: reference,
        deltas,
        runs,
    })
}

impl WarmStartResult {
    /// `run,energy,delta,top_prob,gap`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("run,energy,delta,top_prob,gap\n");
        for (i, (run, delta)) in self.runs.iter().zip(&self.deltas).enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                i,
                sig12(run.energy),
                sig12(*delta),
                sig12(run.diagnostics.top_probability),
                sig12(run.diagnostics.gap)
            ));
        }
        out
    }

    pub fn to_json(&self, config: &SPSAConfig) -> serde_json::Value {
        let runs: Vec<_> = self
            .runs
            .iter()
            .zip(&self.deltas)
            .map(|(r, d)| {
                serde_json::json!({
                    "energy": r.energy,
                    "delta": d,
                    "seed": r.seed,
                    "diagnostics": r.diagnostics,
                    "config": r.trace.config,
                    "n_evaluations": r.trace.n_evaluations,
                    "params": r.params,
                })
            })
            .collect();
        round_json(serde_json::json!({
            "reference_energy": self.reference_energy,
            "best_run_index": self.best_run_index,
            "lowest_run_index": self.lowest_run_index,
            "best_delta": self.deltas[self.best_run_index],
            "best_params": self.best_params,
            "config": config,
            "runs": runs,
        }))
    }
}
