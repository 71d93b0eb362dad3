//! Multi-period planning for elastic optical networks.
//!
//! The crate models a flex-grid core network with bandwidth-variable
//! transponders and plans it year by year against a growing traffic matrix:
//!
//! - [`topology`]: nodes, heterogeneous amplified spans, directed links and
//!   the bundled reference networks.
//! - [`spectrum`]: per-link slot grids with contiguous allocation and dark
//!   fiber-pair upgrades.
//! - [`traffic`]: demand generation from co-located DC/IXP counts and the
//!   expected/unexpected growth profiles.
//! - [`channel`] and [`physics`]: the transponder operating-point catalog
//!   and the Gaussian-noise feasibility filter.
//! - [`routing`]: Yen's k-shortest paths, weighted probabilistic path
//!   choice and first-fit spectrum assignment.
//! - [`ilp`] and [`planner`]: the exact lightpath-addition solver and the
//!   multi-period planning loop with in-place transponder upgrades.
//! - [`report`]: deterministic CSV artifacts.

pub mod channel;
pub mod error;
pub mod ilp;
pub mod physics;
pub mod planner;
pub mod report;
pub mod routing;
pub mod spectrum;
pub mod topology;
pub mod traffic;

pub use channel::{generate_configs, ChannelConfig, Modulation};
pub use error::{Error, Result};
pub use ilp::{solve_additions, AdditionOption, AdditionSolution};
pub use physics::{PathMetrics, PhyParams};
pub use planner::{
    Lightpath, OccupancyRecord, PeriodReport, PlanEvent, Planner, PlannerConfig, Scheme,
    StudyOutcome,
};
pub use routing::{choose_path, first_fit, k_shortest_paths, path_free_weight, CandidatePath};
pub use spectrum::SlotGrid;
pub use topology::{Link, LinkId, Node, NodeId, Span, Topology};
pub use traffic::{
    aggregate_offered_tbps, delta, initial_traffic, offered_traffic, residual_traffic,
    GrowthProfile, TrafficMatrix,
};
