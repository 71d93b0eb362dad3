//! Shared fixtures for the planning benchmarks.

use eonplan_core::{GrowthProfile, PhyParams, Planner, PlannerConfig, Scheme, Topology};

/// A ready-to-run planner over the bundled German topology.
pub fn germany17_planner(scheme: Scheme, horizon_year: Option<i32>) -> Planner {
    let cfg = PlannerConfig {
        scheme,
        horizon_year,
        ..PlannerConfig::default()
    };
    Planner::new(
        Topology::germany17(),
        PhyParams::default(),
        GrowthProfile::unexpected(),
        cfg,
    )
    .expect("bundled inputs are valid")
}
