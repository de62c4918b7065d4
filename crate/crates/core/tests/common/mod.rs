//! Shared helpers for the integration suites: randomized scenario sampling
//! matching the acceptance distribution, and scale-aware comparisons.

// Each integration test target compiles its own copy; not every target
// uses every helper.
#![allow(dead_code)]

use commuter_sir::{EpidemicParams, MobilityParams, PopulationSplit, Scenario};
use rand::Rng;

/// Log-uniform draw over `[1e-2, 1e2]`.
pub fn log_uniform_rate<R: Rng>(rng: &mut R) -> f64 {
    let ln = rng.gen_range((1e-2f64).ln()..=(1e2f64).ln());
    ln.exp()
}

/// One random valid scenario: transmission and commuting rates log-uniform
/// in `[1e-2, 1e2]`, recovery uniform in `[0.05, 1]`, populations uniform
/// in `(0, 1000)`.
pub fn random_scenario<R: Rng>(rng: &mut R) -> Scenario {
    loop {
        let epidemic = EpidemicParams::new(
            log_uniform_rate(rng),
            log_uniform_rate(rng),
            rng.gen_range(0.05..=1.0),
        )
        .unwrap();
        let mobility = MobilityParams::new(
            log_uniform_rate(rng),
            log_uniform_rate(rng),
            log_uniform_rate(rng),
            log_uniform_rate(rng),
        )
        .unwrap();
        let population = PopulationSplit::new(
            rng.gen_range(0.0..1000.0),
            rng.gen_range(0.0..1000.0),
            rng.gen_range(0.0..1000.0),
            rng.gen_range(0.0..1000.0),
        );
        let Ok(population) = population else { continue };
        if let Ok(scenario) = Scenario::new(epidemic, mobility, population) {
            return scenario;
        }
    }
}

/// Tolerances are stated for order-one thresholds; for the extreme rate
/// ratios of the random suite (R up to 2e3, where 1e-12 is below one ulp)
/// they are applied relative to `max(1, |reference|)`.
pub fn scale_of(reference: f64) -> f64 {
    reference.abs().max(1.0)
}

#[allow(dead_code)]
pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    let scale = scale_of(expected);
    assert!(
        (actual - expected).abs() <= tol * scale,
        "{what}: {actual} vs {expected} (tol {tol} x scale {scale})"
    );
}
