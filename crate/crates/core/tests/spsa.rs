use h2o_vqe::optimizer::{gradient_estimate, spsa_minimize, SPSAConfig};
use h2o_vqe::rng::Xoshiro256;

#[test]
fn quadratic_in_eight_dimensions() {
    let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let x0 = vec![1.0; 8];
    let reached = (0..10)
        .filter(|&seed| {
            let cfg = SPSAConfig {
                seed,
                ..SPSAConfig::default()
            };
            let trace = spsa_minimize(f, &x0, &cfg).unwrap();
            trace.final_params.iter().map(|v| v * v).sum::<f64>().sqrt() < 0.1
        })
        .count();
    assert!(reached >= 9, "{reached} of 10 seeds converged");
}

#[test]
fn estimator_is_exact_on_linear_objectives() {
    let mut rng = Xoshiro256::new(2);
    let g: Vec<f64> = (0..8).map(|_| rng.uniform(-2.0, 2.0)).collect();
    let f = |x: &[f64]| 3.0 + x.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>();
    let x: Vec<f64> = (0..8).map(|_| rng.uniform(-1.0, 1.0)).collect();
    for _ in 0..20 {
        let delta: Vec<f64> = (0..8).map(|_| rng.rademacher()).collect();
        let est = gradient_estimate(f, &x, &delta, 0.1);
        // each component is g_i plus cross terms weighted by delta_j / delta_i
        let dot: f64 = g.iter().zip(&delta).map(|(a, b)| a * b).sum();
        for i in 0..8 {
            assert!((est[i] - dot / delta[i]).abs() < 1e-12);
        }
    }
}
