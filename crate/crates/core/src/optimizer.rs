//! Simultaneous perturbation stochastic approximation (SPSA).
//!
//! Iteration `k` (0-based):
//!
//! ```text
//! a_k = a / (k + 1 + A)^alpha        c_k = c / (k + 1)^gamma
//! g_k,i = [f(x_k + c_k D_k) - f(x_k - c_k D_k)] / (2 c_k D_k,i)
//! x_{k+1} = x_k - a_k g_k
//! ```
//!
//! with `D_k` a Rademacher vector drawn from [`Xoshiro256`] seeded by
//! `seed`. Each iteration also evaluates `f(x_{k+1})`; the minimizer
//! returns the best point seen, starting from `x0`.

use serde::{Deserialize, Serialize};

use crate::rng::{derive_seed, Xoshiro256};
use crate::{Error, Result};

const CALIBRATION_STREAM: u64 = 0xCA11_B8A7_E000_0001;
const CALIBRATION_PROBES: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SPSAConfig {
    pub max_iter: usize,
    /// Learning-rate scale; calibrated from probes when `None`.
    pub a: Option<f64>,
    pub c: f64,
    /// Stability constant; `0.1 * max_iter` when `None`.
    #[serde(rename = "A")]
    pub stability: Option<f64>,
    pub alpha: f64,
    pub gamma: f64,
    pub seed: u64,
    /// Per-component magnitude of the first step targeted by calibration.
    pub target_step: f64,
    /// Keep every iterate in the trace.
    pub record_iterates: bool,
}

impl Default for SPSAConfig {
    fn default() -> Self {
        Self {
            max_iter: 300,
            a: None,
            c: 0.1,
            stability: None,
            alpha: 0.602,
            gamma: 0.101,
            seed: 0,
            target_step: 0.1,
            record_iterates: false,
        }
    }
}

impl SPSAConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if let Some(a) = self.a {
            if !(a > 0.0 && a.is_finite()) {
                return bad(format!("a = {a} must be positive"));
            }
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad(format!("c = {} must be positive", self.c));
        }
        if let Some(s) = self.stability {
            if !(s >= 0.0 && s.is_finite()) {
                return bad(format!("A = {s} must be non-negative"));
            }
        }
        if !(0.0 < self.gamma && self.gamma < self.alpha && self.alpha <= 1.0) {
            return bad(format!(
                "need 0 < gamma < alpha <= 1, got gamma={} alpha={}",
                self.gamma, self.alpha
            ));
        }
        if !(self.target_step > 0.0 && self.target_step.is_finite()) {
            return bad("target_step must be positive".into());
        }
        Ok(())
    }

    pub fn stability_constant(&self) -> f64 {
        self.stability.unwrap_or(0.1 * self.max_iter as f64)
    }

    /// Step gain `a_k`; requires a resolved `a`.
    pub fn step_gain(&self, k: usize) -> f64 {
        self.a.unwrap_or(f64::NAN) / (k as f64 + 1.0 + self.stability_constant()).powf(self.alpha)
    }

    pub fn perturbation_gain(&self, k: usize) -> f64 {
        self.c / (k as f64 + 1.0).powf(self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    /// `f(x_{k+1})` for each iteration `k`.
    pub objective_history: Vec<f64>,
    /// `x_{k+1}` per iteration when requested.
    pub iterates: Option<Vec<Vec<f64>>>,
    /// `f(x0)` evaluated before the first step.
    pub initial_value: f64,
    /// All objective calls, calibration included.
    pub n_evaluations: usize,
    pub calibration_evaluations: usize,
    pub final_params: Vec<f64>,
    pub final_value: f64,
    /// Configuration with `a` and `A` resolved.
    pub config: SPSAConfig,
}

impl OptimizationTrace {
    pub fn iterations(&self) -> usize {
        self.objective_history.len()
    }

    /// Running minimum over `f(x0)` followed by the history.
    pub fn best_history(&self) -> Vec<f64> {
        let mut best = self.initial_value;
        std::iter::once(self.initial_value)
            .chain(self.objective_history.iter().copied())
            .map(|v| {
                best = best.min(v);
                best
            })
            .collect()
    }

    /// `iter,value` rows; row 0 is the starting point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,value\n");
        out.push_str(&format!("0,{}\n", crate::format::sig12(self.initial_value)));
        for (k, v) in self.objective_history.iter().enumerate() {
            out.push_str(&format!("{},{}\n", k + 1, crate::format::sig12(*v)));
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        crate::format::round_json(serde_json::json!({
            "final_value": self.final_value,
            "final_params": self.final_params,
            "n_evaluations": self.n_evaluations,
            "iterations": self.iterations(),
            "config": self.config,
        }))
    }
}

fn rademacher(rng: &mut Xoshiro256, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.rademacher()).collect()
}

fn shifted(x: &[f64], delta: &[f64], scale: f64) -> Vec<f64> {
    x.iter().zip(delta).map(|(xi, di)| xi + scale * di).collect()
}

/// Resolves `a` (and `A`) from probe evaluations at `x0` so that the first
/// step moves each component by about `target_step`. A preset `a` is kept.
pub fn calibrate<F>(objective: F, x0: &[f64], config: &SPSAConfig) -> Result<SPSAConfig>
where
    F: Fn(&[f64]) -> f64,
{
    calibrate_counted(&objective, x0, config).map(|(c, _)| c)
}

fn calibrate_counted<F>(objective: &F, x0: &[f64], config: &SPSAConfig) -> Result<(SPSAConfig, usize)>
where
    F: Fn(&[f64]) -> f64,
{
    config.validate()?;
    let mut out = config.clone();
    out.stability = Some(config.stability_constant());
    if config.a.is_some() {
        return Ok((out, 0));
    }
    let mut rng = Xoshiro256::new(derive_seed(config.seed, CALIBRATION_STREAM));
    let c = config.c;
    let mut total = 0.0;
    let mut finite = 0usize;
    for _ in 0..CALIBRATION_PROBES {
        let delta = rademacher(&mut rng, x0.len());
        let diff = objective(&shifted(x0, &delta, c)) - objective(&shifted(x0, &delta, -c));
        if diff.is_finite() {
            total += diff.abs() / (2.0 * c);
            finite += 1;
        }
    }
    if finite == 0 {
        return Err(Error::Optimizer("all calibration probes were non-finite".into()));
    }
    let magnitude = total / finite as f64;
    let scale = (1.0 + out.stability_constant()).powf(config.alpha);
    // a flat objective gives no gradient scale; any positive gain works
    let a = if magnitude > 0.0 {
        config.target_step * scale / magnitude
    } else {
        config.target_step * scale
    };
    out.a = Some(a);
    Ok((out, 2 * CALIBRATION_PROBES))
}

/// Minimizes `objective` from `x0`.
pub fn spsa_minimize<F>(objective: F, x0: &[f64], config: &SPSAConfig) -> Result<OptimizationTrace>
where
    F: Fn(&[f64]) -> f64,
{
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite starting point".into()));
    }
    let (config, calibration_evaluations) = calibrate_counted(&objective, x0, config)?;
    let mut rng = Xoshiro256::new(config.seed);
    let mut evaluations = calibration_evaluations;
    let mut eval = |x: &[f64], k: usize| -> Result<f64> {
        evaluations += 1;
        let v = objective(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Optimizer(format!("objective returned {v} at iteration {k}")))
        }
    };

    let mut x = x0.to_vec();
    let initial_value = eval(&x, 0)?;
    let mut best = (initial_value, x.clone());
    let mut history = Vec::with_capacity(config.max_iter);
    let mut iterates = config.record_iterates.then(Vec::new);

    for k in 0..config.max_iter {
        let ak = config.step_gain(k);
        let ck = config.perturbation_gain(k);
        let delta = rademacher(&mut rng, x.len());
        let plus = eval(&shifted(&x, &delta, ck), k)?;
        let minus = eval(&shifted(&x, &delta, -ck), k)?;
        let diff = (plus - minus) / (2.0 * ck);
        for (xi, di) in x.iter_mut().zip(&delta) {
            *xi -= ak * diff / di;
        }
        let value = eval(&x, k)?;
        history.push(value);
        if let Some(its) = iterates.as_mut() {
            its.push(x.clone());
        }
        if value < best.0 {
            best = (value, x.clone());
        }
    }

    Ok(OptimizationTrace {
        objective_history: history,
        iterates,
        initial_value,
        n_evaluations: evaluations,
        calibration_evaluations,
        final_params: best.1,
        final_value: best.0,
        config,
    })
}

/// The SPSA gradient estimate for one perturbation; exposed for testing the
/// estimator in isolation.
pub fn gradient_estimate<F>(objective: F, x: &[f64], delta: &[f64], ck: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let diff = (objective(&shifted(x, delta, ck)) - objective(&shifted(x, delta, -ck))) / (2.0 * ck);
    delta.iter().map(|d| diff / d).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn quadratic_2d() {
        let trace = spsa_minimize(sphere, &[1.0, 1.0], &SPSAConfig::default()).unwrap();
        let norm = trace.final_params.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm < 0.1, "norm {norm}");
        assert_eq!(trace.iterations(), 300);
        assert_eq!(trace.n_evaluations, 3 * 300 + 1 + 50);
    }

    #[test]
    fn constant_objective() {
        let trace = spsa_minimize(|_| 4.25, &[0.3, -0.2, 0.1], &SPSAConfig::default()).unwrap();
        assert_eq!(trace.final_value, 4.25);
    }

    #[test]
    fn deterministic() {
        let cfg = SPSAConfig {
            seed: 17,
            record_iterates: true,
            ..Default::default()
        };
        let a = spsa_minimize(sphere, &[0.5, -1.0, 2.0], &cfg).unwrap();
        let b = spsa_minimize(sphere, &[0.5, -1.0, 2.0], &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn non_finite_reports_iteration() {
        let cfg = SPSAConfig {
            a: Some(0.1),
            ..Default::default()
        };
        let f = |x: &[f64]| if x[0] < 0.9 { f64::NAN } else { x[0] };
        match spsa_minimize(f, &[1.0], &cfg) {
            Err(Error::Optimizer(msg)) => assert!(msg.contains("iteration"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn calibration() {
        let cfg = SPSAConfig::default();
        let tuned = calibrate(sphere, &[1.0, 2.0], &cfg).unwrap();
        assert!(tuned.a.unwrap() > 0.0);
        assert_eq!(tuned.stability, Some(30.0));
        assert_eq!(tuned, calibrate(sphere, &[1.0, 2.0], &cfg).unwrap());

        let preset = SPSAConfig {
            a: Some(0.7),
            ..Default::default()
        };
        assert_eq!(calibrate(sphere, &[1.0], &preset).unwrap().a, Some(0.7));
        assert!(calibrate(|_| f64::NAN, &[1.0], &cfg).is_err());
    }

    #[test]
    fn gains_decrease() {
        let cfg = SPSAConfig {
            a: Some(0.2),
            ..Default::default()
        };
        for k in 1..cfg.max_iter {
            assert!(cfg.step_gain(k) < cfg.step_gain(k - 1) && cfg.step_gain(k) > 0.0);
            assert!(cfg.perturbation_gain(k) < cfg.perturbation_gain(k - 1) && cfg.perturbation_gain(k) > 0.0);
        }
    }

    #[test]
    fn invalid_configs() {
        for cfg in [
            SPSAConfig { max_iter: 0, ..Default::default() },
            SPSAConfig { c: 0.0, ..Default::default() },
            SPSAConfig { a: Some(-1.0), ..Default::default() },
            SPSAConfig { gamma: 0.7, ..Default::default() },
            SPSAConfig { alpha: 1.5, ..Default::default() },
        ] {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn best_seen_monotone() {
        let trace = spsa_minimize(sphere, &[2.0, -1.0, 0.5, 0.25], &SPSAConfig { seed: 5, ..Default::default() }).unwrap();
        let best = trace.best_history();
        assert!(best.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*best.last().unwrap(), trace.final_value);
        assert_eq!(sphere(&trace.final_params), trace.final_value);
    }

    proptest::proptest! {
        // Unbiasedness on linear objectives: averaged over all 2^d sign
        // vectors the estimate is exactly the gradient.
        #[test]
        fn linear_gradient_unbiased(
            g in proptest::collection::vec(-5.0f64..5.0, 1..9),
            ck in 0.01f64..1.0,
        ) {
            let d = g.len();
            let x: Vec<f64> = (0..d).map(|i| 0.1 * i as f64).collect();
            let f = |v: &[f64]| v.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>();
            let mut mean = vec![0.0; d];
            for signs in 0..(1u32 << d) {
                let delta: Vec<f64> = (0..d).map(|i| if signs >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
                for (m, e) in mean.iter_mut().zip(gradient_estimate(f, &x, &delta, ck)) {
                    *m += e;
                }
            }
            for (m, gi) in mean.iter().zip(&g) {
                proptest::prop_assert!((m / (1u32 << d) as f64 - gi).abs() < 1e-12);
            }
        }
    }
}
