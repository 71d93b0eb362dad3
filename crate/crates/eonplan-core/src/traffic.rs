//! Offered-traffic generation and multi-period growth.
//!
//! Initial demand between two nodes is driven by their combined degree and
//! the per-node imbalance between co-located data centers and exchange
//! points, not by population. Later years scale the base matrix by a yearly
//! growth factor, optionally inflated by a surge profile.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::topology::{Node, NodeId, Topology};

/// |DCs - IXPs| at a node: the traffic weight of the site.
pub fn delta(node: &Node) -> u32 {
    node.dc_count.abs_diff(node.ixp_count)
}

/// Offered Gbps per ordered node pair for one year.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficMatrix {
    pub year: i32,
    entries: BTreeMap<(NodeId, NodeId), f64>,
}

impl TrafficMatrix {
    pub fn new(year: i32, entries: BTreeMap<(NodeId, NodeId), f64>) -> Self {
        TrafficMatrix { year, entries }
    }

    pub fn get(&self, i: NodeId, j: NodeId) -> Option<f64> {
        self.entries.get(&(i, j)).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(NodeId, NodeId), &f64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_gbps(&self) -> f64 {
        self.entries.values().sum()
    }
}

/// Base-year demand for every ordered pair.
///
/// With `N` the combined degree of the two endpoints and `N_avg` the mean
/// degree of the topology, a pair of well-connected hubs (`N` strictly above
/// `2 * N_avg`) attracts `2 * C(N,2) * delta_i * delta_j` Gbps, any other
/// pair `N * delta_i * delta_j` Gbps. Zero-weight pairs stay in the matrix.
pub fn initial_traffic(topo: &Topology, year: i32) -> TrafficMatrix {
    let avg = topo.avg_node_degree();
    let mut entries = BTreeMap::new();
    for a in &topo.nodes {
        for b in &topo.nodes {
            if a.id == b.id {
                continue;
            }
            let combined = (topo.out_links(a.id).len() + topo.out_links(b.id).len()) as u64;
            let weight = u64::from(delta(a)) * u64::from(delta(b));
            let gbps = if combined as f64 > 2.0 * avg {
                2 * (combined * (combined - 1) / 2) * weight
            } else {
                combined * weight
            };
            entries.insert((a.id, b.id), gbps as f64);
        }
    }
    TrafficMatrix::new(year, entries)
}

/// Offered traffic at `year`: every base entry times the year's multiplier.
pub fn offered_traffic(
    tm0: &TrafficMatrix,
    profile: &GrowthProfile,
    year: i32,
) -> Result<TrafficMatrix> {
    let mult = profile.multiplier(year)?;
    let entries = tm0
        .entries
        .iter()
        .map(|(&pair, &gbps)| (pair, gbps * mult))
        .collect();
    Ok(TrafficMatrix::new(year, entries))
}

/// Total offered traffic in Tbps.
pub fn aggregate_offered_tbps(tm: &TrafficMatrix) -> f64 {
    tm.total_gbps() / 1000.0
}

/// Additional offered traffic of a pair: offered at `t` minus the base-year
/// value. The planner further nets out capacity that is already provisioned.
pub fn residual_traffic(
    tm_t: &TrafficMatrix,
    tm_0: &TrafficMatrix,
    pair: (NodeId, NodeId),
) -> Result<f64> {
    let now = tm_t
        .get(pair.0, pair.1)
        .ok_or(Error::UnknownPair(pair.0, pair.1))?;
    let base = tm_0
        .get(pair.0, pair.1)
        .ok_or(Error::UnknownPair(pair.0, pair.1))?;
    Ok(now - base)
}

/// Yearly growth multipliers. `gamma` is the anticipated compound growth
/// (1.0 at the base year); `unexpected` is a surge factor >= 1 on top of it.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthProfile {
    pub base_year: i32,
    pub horizon_year: i32,
    gamma: BTreeMap<i32, f64>,
    unexpected: BTreeMap<i32, f64>,
}

pub const DEFAULT_BASE_YEAR: i32 = 2020;
pub const DEFAULT_HORIZON_YEAR: i32 = 2030;

/// Surge profile: ramps 30% to 90% over 2023-2026, then relaxes while
/// staying above the anticipated curve through 2030.
const SURGE: [(i32, f64); 8] = [
    (2023, 1.3),
    (2024, 1.5),
    (2025, 1.7),
    (2026, 1.9),
    (2027, 1.6),
    (2028, 1.4),
    (2029, 1.3),
    (2030, 1.2),
];

#[derive(Debug, Deserialize)]
struct ProfileEntry {
    gamma: f64,
    #[serde(default = "one")]
    unexpected_multiplier: f64,
}

fn one() -> f64 {
    1.0
}

impl GrowthProfile {
    /// Anticipated growth only: 25% compound per year from the base year.
    pub fn expected() -> Self {
        Self::expected_span(DEFAULT_BASE_YEAR, DEFAULT_HORIZON_YEAR)
    }

    pub fn expected_span(base_year: i32, horizon_year: i32) -> Self {
        let gamma = (base_year..=horizon_year)
            .map(|y| (y, 1.25f64.powi(y - base_year)))
            .collect();
        let unexpected = (base_year..=horizon_year).map(|y| (y, 1.0)).collect();
        GrowthProfile {
            base_year,
            horizon_year,
            gamma,
            unexpected,
        }
    }

    /// Anticipated growth plus the default surge.
    pub fn unexpected() -> Self {
        let mut profile = Self::expected();
        for (year, mult) in SURGE {
            profile.unexpected.insert(year, mult);
        }
        profile
    }

    /// Named scenario used by the command line: `expected` or `unexpected`.
    pub fn scenario(name: &str) -> Option<Self> {
        match name {
            "expected" => Some(Self::expected()),
            "unexpected" => Some(Self::unexpected()),
            _ => None,
        }
    }

    /// Custom profile: a JSON map from year to
    /// `{"gamma": g, "unexpected_multiplier": u}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, ProfileEntry> =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let mut gamma = BTreeMap::new();
        let mut unexpected = BTreeMap::new();
        for (key, entry) in raw {
            let year: i32 = key
                .parse()
                .map_err(|_| Error::BadProfile(format!("bad year key {key:?}")))?;
            gamma.insert(year, entry.gamma);
            unexpected.insert(year, entry.unexpected_multiplier);
        }
        let (&base_year, _) = gamma
            .first_key_value()
            .ok_or_else(|| Error::BadProfile("profile has no years".into()))?;
        let (&horizon_year, _) = gamma.last_key_value().expect("non-empty");
        let profile = GrowthProfile {
            base_year,
            horizon_year,
            gamma,
            unexpected,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let mut prev = None;
        for (&year, &g) in &self.gamma {
            if g < 1.0 {
                return Err(Error::BadProfile(format!("gamma[{year}] = {g} < 1")));
            }
            if let Some(p) = prev {
                if g < p {
                    return Err(Error::BadProfile(format!(
                        "gamma[{year}] decreases ({g} < {p})"
                    )));
                }
            }
            prev = Some(g);
        }
        for (&year, &u) in &self.unexpected {
            if u < 1.0 {
                return Err(Error::BadProfile(format!(
                    "unexpected_multiplier[{year}] = {u} < 1"
                )));
            }
            if !self.gamma.contains_key(&year) {
                return Err(Error::BadProfile(format!(
                    "unexpected_multiplier for year {year} without gamma"
                )));
            }
        }
        Ok(())
    }

    pub fn gamma(&self, year: i32) -> Result<f64> {
        self.gamma
            .get(&year)
            .copied()
            .ok_or(Error::YearOutOfRange(year))
    }

    pub fn unexpected_multiplier(&self, year: i32) -> Result<f64> {
        if year < self.base_year || year > self.horizon_year {
            return Err(Error::YearOutOfRange(year));
        }
        Ok(self.unexpected.get(&year).copied().unwrap_or(1.0))
    }

    /// Effective scaling for the year: gamma times the surge factor.
    pub fn multiplier(&self, year: i32) -> Result<f64> {
        Ok(self.gamma(year)? * self.unexpected_multiplier(year)?)
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.base_year..=self.horizon_year
    }
}
