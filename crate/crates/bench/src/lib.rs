//! Scenario builders shared by the benchmark targets.

use commuter_sir::{EpidemicParams, MobilityParams, PopulationSplit, Scenario};

/// The asymmetric commuting configuration (slow return from patch 1),
/// evaluated at resident proportions (0.5, 0.5).
pub fn case_a() -> Scenario {
    Scenario::new(
        EpidemicParams::new(0.27, 0.33, 0.3).unwrap(),
        MobilityParams::new(10.0, 10.0, 10.0, 1.0).unwrap(),
        PopulationSplit::from_proportions(1.0, 1.0, 0.5, 0.5).unwrap(),
    )
    .unwrap()
}

/// Fast symmetric commuting, the best-conditioned of the bundled cases.
pub fn case_b() -> Scenario {
    Scenario::new(
        EpidemicParams::new(0.27, 0.33, 0.3).unwrap(),
        MobilityParams::new(10.0, 100.0, 10.0, 100.0).unwrap(),
        PopulationSplit::from_proportions(1.0, 1.0, 0.5, 0.5).unwrap(),
    )
    .unwrap()
}
