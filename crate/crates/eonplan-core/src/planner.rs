//! Multi-period planning loop.
//!
//! Each year the planner computes the residual traffic of every demand
//! (offered minus already-provisioned capacity), optionally upgrades
//! provisioned lightpaths in place, then adds the minimal set of new
//! lightpaths via the exact addition solver under the pair's NLI budget,
//! places them first-fit on probabilistically chosen candidate paths, and
//! finally flags links that crossed the saturation threshold.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{generate_configs, ChannelConfig};
use crate::error::{Error, Result};
use crate::ilp::{solve_additions, AdditionOption, AdditionSolution};
use crate::physics::PhyParams;
use crate::routing::{choose_path, first_fit, k_shortest_paths, path_free_weight, CandidatePath};
use crate::spectrum::SlotGrid;
use crate::topology::{LinkId, NodeId, Topology};
use crate::traffic::{
    aggregate_offered_tbps, initial_traffic, offered_traffic, GrowthProfile, TrafficMatrix,
};

const THETA_EPS: f64 = 1e-9;

/// Planning scheme: in-place upgrades before additions, or additions only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Scheme 1: upgrade provisioned lightpaths at their central frequency,
    /// then add what is still missing.
    Upgrading,
    /// Scheme 2: only add new lightpaths.
    AddOnly,
}

impl Scheme {
    pub fn number(self) -> u8 {
        match self {
            Scheme::Upgrading => 1,
            Scheme::AddOnly => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Scheme::Upgrading),
            2 => Some(Scheme::AddOnly),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub scheme: Scheme,
    /// Permitted datarate over-provisioning per demand, Gbps.
    pub delta_gbps: f64,
    /// Link occupancy fraction above which an upgrade warning is raised.
    pub saturation_threshold: f64,
    /// Light a dark fiber pair on flagged links at the start of the next
    /// period.
    pub auto_physical_upgrade: bool,
    /// Candidate paths per demand.
    pub k: usize,
    pub seed: u64,
    /// Plan up to this year (inclusive); defaults to the profile horizon.
    pub horizon_year: Option<i32>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            scheme: Scheme::Upgrading,
            delta_gbps: 100.0,
            saturation_threshold: 0.75,
            auto_physical_upgrade: false,
            k: 3,
            seed: 7,
            horizon_year: None,
        }
    }
}

/// A provisioned transponder: one lightpath is one BVT.
#[derive(Debug, Clone, PartialEq)]
pub struct Lightpath {
    pub id: u32,
    pub pair: (NodeId, NodeId),
    pub path: CandidatePath,
    pub config: ChannelConfig,
    pub fiber_pair: usize,
    pub start_slot: usize,
    pub eta_nli: f64,
    pub provisioned_year: i32,
    pub upgraded_years: Vec<i32>,
}

impl Lightpath {
    pub fn slot_range(&self) -> (usize, usize) {
        (self.start_slot, self.config.slot_count)
    }
}

/// Outcome of one planning year.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodReport {
    pub year: i32,
    pub offered_tbps: f64,
    pub carried_tbps: f64,
    pub unmet_tbps: f64,
    pub bvt_count: usize,
    pub upgrades_performed: usize,
    pub lps_added: usize,
    pub blocked_additions: usize,
    pub flagged_links: Vec<LinkId>,
}

/// Per-link occupancy snapshot taken at the end of a period.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyRecord {
    pub year: i32,
    pub link: LinkId,
    pub ratio: f64,
    pub flagged: bool,
}

/// Trace of planner decisions, kept for reporting and verification.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanEvent {
    Upgrade {
        year: i32,
        lp_id: u32,
        pair: (NodeId, NodeId),
        old_datarate_gbps: u32,
        new_datarate_gbps: u32,
        fiber_pair: usize,
        old_range: (usize, usize),
        new_range: (usize, usize),
    },
    Additions {
        year: i32,
        pair: (NodeId, NodeId),
        theta_gbps: f64,
        nli_budget: Option<f64>,
        planned_count: usize,
        placed_count: usize,
        placed_datarate_gbps: f64,
        placed_eta: f64,
    },
    InfeasibleDemand {
        year: i32,
        pair: (NodeId, NodeId),
        theta_gbps: f64,
    },
}

/// Everything a finished study produced.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutcome {
    pub scheme: Scheme,
    pub seed: u64,
    pub reports: Vec<PeriodReport>,
    pub lightpaths: Vec<Lightpath>,
    pub occupancy: Vec<OccupancyRecord>,
    pub events: Vec<PlanEvent>,
}

/// Cached per-path physics: feasible catalog entries and their NLI
/// coefficients (the topology never changes under the planner).
#[derive(Clone)]
struct PathPhysics {
    valid: Vec<usize>,
    eta: Vec<f64>,
}

/// A tentative in-place upgrade, not yet committed to the grids.
#[derive(Clone)]
struct PlannedUpgrade {
    lp_id: u32,
    config_idx: usize,
}

#[derive(Clone)]
pub struct Planner {
    topo: Topology,
    phy: PhyParams,
    catalog: Vec<ChannelConfig>,
    profile: GrowthProfile,
    cfg: PlannerConfig,
    tm0: TrafficMatrix,
    grids: BTreeMap<LinkId, SlotGrid>,
    lightpaths: Vec<Lightpath>,
    pair_lps: BTreeMap<(NodeId, NodeId), Vec<u32>>,
    pair_paths: BTreeMap<(NodeId, NodeId), Vec<CandidatePath>>,
    physics_cache: BTreeMap<Vec<LinkId>, PathPhysics>,
    pending_fiber_upgrades: Vec<LinkId>,
    events: Vec<PlanEvent>,
    occupancy: Vec<OccupancyRecord>,
}

impl Planner {
    pub fn new(
        topo: Topology,
        phy: PhyParams,
        profile: GrowthProfile,
        cfg: PlannerConfig,
    ) -> Result<Self> {
        if let Some(horizon) = cfg.horizon_year {
            if horizon < profile.base_year || horizon > profile.horizon_year {
                return Err(Error::YearOutOfRange(horizon));
            }
        }
        let catalog = generate_configs(&phy);
        let tm0 = initial_traffic(&topo, profile.base_year);
        let grids = topo
            .links
            .iter()
            .map(|l| (l.id, SlotGrid::new(phy.slots_per_fiber)))
            .collect();
        let mut pair_paths = BTreeMap::new();
        for a in &topo.nodes {
            for b in &topo.nodes {
                if a.id == b.id {
                    continue;
                }
                let paths = k_shortest_paths(&topo, a.id, b.id, cfg.k)?;
                pair_paths.insert((a.id, b.id), paths);
            }
        }
        Ok(Planner {
            topo,
            phy,
            catalog,
            profile,
            cfg,
            tm0,
            grids,
            lightpaths: Vec::new(),
            pair_lps: BTreeMap::new(),
            pair_paths,
            physics_cache: BTreeMap::new(),
            pending_fiber_upgrades: Vec::new(),
            events: Vec::new(),
            occupancy: Vec::new(),
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn catalog(&self) -> &[ChannelConfig] {
        &self.catalog
    }

    pub fn lightpaths(&self) -> &[Lightpath] {
        &self.lightpaths
    }

    pub fn events(&self) -> &[PlanEvent] {
        &self.events
    }

    pub fn grid(&self, link: LinkId) -> Option<&SlotGrid> {
        self.grids.get(&link)
    }

    fn ensure_path_physics(&mut self, links: &[LinkId]) {
        if self.physics_cache.contains_key(links) {
            return;
        }
        let spans = self.topo.path_spans(links);
        let valid = self.phy.valid_config_indices(&spans, &self.catalog);
        let eta = self
            .catalog
            .iter()
            .map(|cfg| self.phy.eta_nli(&spans, cfg).unwrap_or(f64::INFINITY))
            .collect();
        self.physics_cache
            .insert(links.to_vec(), PathPhysics { valid, eta });
    }

    /// Total provisioned datarate of a pair, Gbps.
    fn pair_capacity_gbps(&self, pair: (NodeId, NodeId)) -> f64 {
        self.pair_lps
            .get(&pair)
            .map(|ids| {
                ids.iter()
                    .map(|&id| f64::from(self.lightpaths[id as usize].config.datarate_gbps))
                    .sum()
            })
            .unwrap_or(0.0)
    }

    /// Sum of the NLI coefficients of the pair's provisioned lightpaths;
    /// `None` while the pair has no lightpaths (bootstrap).
    fn pair_nli_budget(&self, pair: (NodeId, NodeId)) -> Option<f64> {
        let ids = self.pair_lps.get(&pair)?;
        if ids.is_empty() {
            return None;
        }
        Some(
            ids.iter()
                .map(|&id| self.lightpaths[id as usize].eta_nli)
                .sum(),
        )
    }

    /// Works out which of the pair's lightpaths can move to a higher
    /// datarate inside their current channel bandwidth, in provisioning
    /// order, without touching any state. Returns the planned moves, the
    /// residual left after the recovered capacity, and the pair's NLI sum
    /// as it would stand after the moves.
    fn plan_upgrades(
        &mut self,
        pair: (NodeId, NodeId),
        mut theta: f64,
    ) -> (Vec<PlannedUpgrade>, f64, Option<f64>) {
        let lp_ids = self.pair_lps.get(&pair).cloned().unwrap_or_default();
        if lp_ids.is_empty() {
            return (Vec::new(), theta, None);
        }
        let mut planned = Vec::new();
        let mut fleet_eta = 0.0;
        for lp_id in &lp_ids {
            fleet_eta += self.lightpaths[*lp_id as usize].eta_nli;
        }
        for lp_id in lp_ids {
            if theta <= THETA_EPS {
                break;
            }
            let (links, old_cfg, old_eta) = {
                let lp = &self.lightpaths[lp_id as usize];
                (lp.path.links.clone(), lp.config.clone(), lp.eta_nli)
            };
            self.ensure_path_physics(&links);
            let physics = &self.physics_cache[&links];
            let mut best: Option<usize> = None;
            for &ci in &physics.valid {
                let cand = &self.catalog[ci];
                if cand.bandwidth_ghz > old_cfg.bandwidth_ghz
                    || cand.datarate_gbps <= old_cfg.datarate_gbps
                {
                    continue;
                }
                // highest datarate wins; at equal datarate prefer the wider
                // (lower-order, more robust) channel
                let better = match best {
                    None => true,
                    Some(b) => {
                        let cur = &self.catalog[b];
                        cand.datarate_gbps > cur.datarate_gbps
                            || (cand.datarate_gbps == cur.datarate_gbps
                                && cand.bandwidth_ghz > cur.bandwidth_ghz)
                    }
                };
                if better {
                    best = Some(ci);
                }
            }
            let Some(best_ci) = best else { continue };
            theta -= f64::from(self.catalog[best_ci].datarate_gbps - old_cfg.datarate_gbps);
            fleet_eta += physics.eta[best_ci] - old_eta;
            planned.push(PlannedUpgrade {
                lp_id,
                config_idx: best_ci,
            });
        }
        (planned, theta, Some(fleet_eta))
    }

    /// Commits planned upgrades: shrinks each slot range around its center
    /// (an odd trim releases the extra slot from the high-frequency side)
    /// and swaps in the new config.
    fn apply_upgrades(&mut self, year: i32, pair: (NodeId, NodeId), planned: &[PlannedUpgrade]) {
        for upgrade in planned {
            let lp = &self.lightpaths[upgrade.lp_id as usize];
            let links = lp.path.links.clone();
            self.ensure_path_physics(&links);
            let lp = &self.lightpaths[upgrade.lp_id as usize];
            let old_cfg = lp.config.clone();
            let fiber_pair = lp.fiber_pair;
            let old_start = lp.start_slot;
            let new_cfg = self.catalog[upgrade.config_idx].clone();
            let new_eta = self.physics_cache[&links].eta[upgrade.config_idx];

            let old_len = old_cfg.slot_count;
            let new_len = new_cfg.slot_count;
            debug_assert!(new_len <= old_len);
            let trim = old_len - new_len;
            let trim_low = trim / 2;
            let new_start = old_start + trim_low;
            if trim > 0 {
                for link in &links {
                    let grid = self.grids.get_mut(link).expect("known link");
                    if trim_low > 0 {
                        grid.release(fiber_pair, old_start, trim_low)
                            .expect("owned slots");
                    }
                    grid.release(fiber_pair, new_start + new_len, trim - trim_low)
                        .expect("owned slots");
                }
            }
            self.events.push(PlanEvent::Upgrade {
                year,
                lp_id: upgrade.lp_id,
                pair,
                old_datarate_gbps: old_cfg.datarate_gbps,
                new_datarate_gbps: new_cfg.datarate_gbps,
                fiber_pair,
                old_range: (old_start, old_len),
                new_range: (new_start, new_len),
            });
            let lp = &mut self.lightpaths[upgrade.lp_id as usize];
            lp.config = new_cfg;
            lp.start_slot = new_start;
            lp.eta_nli = new_eta;
            lp.upgraded_years.push(year);
        }
    }

    /// Candidate indices in placement order: the sampled one first, the
    /// rest by descending free weight, ties by length then position.
    fn retry_order(sampled: usize, weights: &[usize], paths: &[CandidatePath]) -> Vec<usize> {
        let mut rest: Vec<usize> = (0..paths.len()).filter(|&i| i != sampled).collect();
        rest.sort_by(|&a, &b| {
            weights[b]
                .cmp(&weights[a])
                .then(
                    paths[a]
                        .total_length_km
                        .total_cmp(&paths[b].total_length_km),
                )
                .then(a.cmp(&b))
        });
        let mut order = vec![sampled];
        order.extend(rest);
        order
    }

    /// Plans one year and returns its report. Years must be visited in
    /// ascending order starting at the profile base year.
    pub fn plan_period(&mut self, year: i32) -> Result<PeriodReport> {
        // physical upgrades decided at the end of the previous period
        for link in std::mem::take(&mut self.pending_fiber_upgrades) {
            self.grids
                .get_mut(&link)
                .expect("known link")
                .add_fiber_pair();
        }

        let tm_t = offered_traffic(&self.tm0, &self.profile, year)?;

        let mut work: Vec<((NodeId, NodeId), f64)> = tm_t
            .entries()
            .filter_map(|(&pair, &tau)| {
                let theta = tau - self.pair_capacity_gbps(pair);
                (theta > THETA_EPS).then_some((pair, theta))
            })
            .collect();
        work.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

        let mut upgrades_performed = 0;
        let mut lps_added = 0;
        let mut blocked_additions = 0;

        for (pair, theta0) in work {
            // upgrades are planned tentatively: a partial upgrade can leave
            // a residual whose addition window is infeasible even though
            // the un-upgraded residual is solvable, and upgrades must never
            // carry less than plain additions would
            let (planned_upgrades, theta_after, budget_after) =
                if self.cfg.scheme == Scheme::Upgrading {
                    self.plan_upgrades(pair, theta0)
                } else {
                    (Vec::new(), theta0, self.pair_nli_budget(pair))
                };

            if theta_after <= THETA_EPS {
                upgrades_performed += planned_upgrades.len();
                self.apply_upgrades(year, pair, &planned_upgrades);
                continue;
            }

            let paths = self.pair_paths[&pair].clone();
            let mut rng = pair_rng(self.cfg.seed, year, pair);

            // the solver sees the shortest candidate: it has the widest
            // feasible set and the smallest per-config NLI, so a solution
            // within budget always has a path it could be placed on
            let reference_links = paths[0].links.clone();
            self.ensure_path_physics(&reference_links);
            let physics = &self.physics_cache[&reference_links];
            let options: Vec<AdditionOption> = physics
                .valid
                .iter()
                .map(|&ci| AdditionOption {
                    config_idx: ci,
                    datarate_gbps: self.catalog[ci].datarate_gbps,
                    slot_count: self.catalog[ci].slot_count,
                    eta_nli: physics.eta[ci],
                })
                .collect();
            if options.is_empty() {
                upgrades_performed += planned_upgrades.len();
                self.apply_upgrades(year, pair, &planned_upgrades);
                self.events.push(PlanEvent::InfeasibleDemand {
                    year,
                    pair,
                    theta_gbps: theta_after,
                });
                continue;
            }

            let mut chosen = None;
            match solve_additions(theta_after, &options, budget_after, self.cfg.delta_gbps) {
                AdditionSolution::Solution(picks) => {
                    chosen = Some((picks, theta_after, budget_after, true));
                }
                AdditionSolution::Infeasible if !planned_upgrades.is_empty() => {
                    // retry without the upgrades: the wider residual window
                    // may be solvable
                    let budget_now = self.pair_nli_budget(pair);
                    if let AdditionSolution::Solution(picks) =
                        solve_additions(theta0, &options, budget_now, self.cfg.delta_gbps)
                    {
                        chosen = Some((picks, theta0, budget_now, false));
                    }
                }
                AdditionSolution::Infeasible => {}
            }

            match chosen {
                None => {
                    // recovered capacity still helps even though the rest
                    // of the residual stays unmet this period
                    upgrades_performed += planned_upgrades.len();
                    self.apply_upgrades(year, pair, &planned_upgrades);
                    self.events.push(PlanEvent::InfeasibleDemand {
                        year,
                        pair,
                        theta_gbps: theta_after,
                    });
                }
                Some((picks, theta, budget, with_upgrades)) => {
                    if with_upgrades {
                        upgrades_performed += planned_upgrades.len();
                        self.apply_upgrades(year, pair, &planned_upgrades);
                    }
                    let planned_count = picks.len();
                    let mut placed_count = 0;
                    let mut placed_datarate = 0.0;
                    let mut placed_eta = 0.0;
                    for pick in picks {
                        let config_idx = options[pick].config_idx;
                        let config = self.catalog[config_idx].clone();
                        let weights: Vec<usize> = paths
                            .iter()
                            .map(|p| path_free_weight(p, &self.grids))
                            .collect();
                        let sampled = choose_path(&paths, &weights, &mut rng)?;
                        let sampled_idx = paths
                            .iter()
                            .position(|p| p.nodes == sampled.nodes)
                            .expect("sampled from candidates");
                        let mut committed = false;
                        for path_idx in Self::retry_order(sampled_idx, &weights, &paths) {
                            let path = &paths[path_idx];
                            self.ensure_path_physics(&path.links);
                            let physics = &self.physics_cache[&path.links];
                            if !physics.valid.contains(&config_idx) {
                                continue;
                            }
                            let eta_here = physics.eta[config_idx];
                            if let Some(b) = budget {
                                if placed_eta + eta_here > b {
                                    continue;
                                }
                            }
                            let Some((fiber_pair, start)) =
                                first_fit(path, config.slot_count, &self.grids)
                            else {
                                continue;
                            };
                            for link in &path.links {
                                self.grids
                                    .get_mut(link)
                                    .expect("known link")
                                    .allocate(fiber_pair, start, config.slot_count)
                                    .expect("first-fit found the block free");
                            }
                            let id = self.lightpaths.len() as u32;
                            self.lightpaths.push(Lightpath {
                                id,
                                pair,
                                path: path.clone(),
                                config: config.clone(),
                                fiber_pair,
                                start_slot: start,
                                eta_nli: eta_here,
                                provisioned_year: year,
                                upgraded_years: Vec::new(),
                            });
                            self.pair_lps.entry(pair).or_default().push(id);
                            placed_count += 1;
                            placed_datarate += f64::from(config.datarate_gbps);
                            placed_eta += eta_here;
                            committed = true;
                            break;
                        }
                        if !committed {
                            blocked_additions += 1;
                        }
                    }
                    lps_added += placed_count;
                    self.events.push(PlanEvent::Additions {
                        year,
                        pair,
                        theta_gbps: theta,
                        nli_budget: budget,
                        planned_count,
                        placed_count,
                        placed_datarate_gbps: placed_datarate,
                        placed_eta,
                    });
                }
            }
        }

        let flagged = self.check_saturation();
        if self.cfg.auto_physical_upgrade {
            self.pending_fiber_upgrades = flagged.clone();
        }
        for (link, grid) in &self.grids {
            self.occupancy.push(OccupancyRecord {
                year,
                link: *link,
                ratio: grid.occupancy_ratio(),
                flagged: flagged.contains(link),
            });
        }

        let offered_tbps = aggregate_offered_tbps(&tm_t);
        let carried_gbps: f64 = tm_t
            .entries()
            .map(|(&pair, &tau)| tau.min(self.pair_capacity_gbps(pair)))
            .sum();
        let carried_tbps = carried_gbps / 1000.0;

        Ok(PeriodReport {
            year,
            offered_tbps,
            carried_tbps,
            unmet_tbps: offered_tbps - carried_tbps,
            bvt_count: self.lightpaths.len(),
            upgrades_performed,
            lps_added,
            blocked_additions,
            flagged_links: flagged,
        })
    }

    /// Links whose occupancy is strictly above the threshold.
    pub fn check_saturation(&self) -> Vec<LinkId> {
        saturated_links(&self.grids, self.cfg.saturation_threshold)
    }

    /// Verifies that the union of lightpath slot ranges matches the grid
    /// occupancy bit for bit, with no slot claimed twice.
    pub fn reconcile(&self) -> Result<()> {
        let mut expected: BTreeMap<LinkId, Vec<bool>> = self
            .grids
            .iter()
            .map(|(id, grid)| (*id, vec![false; grid.total_slots()]))
            .collect();
        for lp in &self.lightpaths {
            for link in &lp.path.links {
                let grid = &self.grids[link];
                let bits = expected.get_mut(link).expect("known link");
                let base = lp.fiber_pair * grid.slot_count() + lp.start_slot;
                for bit in bits.iter_mut().skip(base).take(lp.config.slot_count) {
                    if *bit {
                        return Err(Error::LedgerMismatch {
                            link: *link,
                            detail: format!("slot claimed twice by lightpath {}", lp.id),
                        });
                    }
                    *bit = true;
                }
            }
        }
        for (link, grid) in &self.grids {
            let bits = &expected[link];
            for pair in 0..grid.fiber_pairs() {
                for (slot, occupied) in grid.pair_bits(pair).iter().enumerate() {
                    let want = bits[pair * grid.slot_count() + slot];
                    if *occupied != want {
                        return Err(Error::LedgerMismatch {
                            link: *link,
                            detail: format!(
                                "fiber pair {pair} slot {slot}: grid={occupied} ledger={want}"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Runs every planning year and consumes the planner.
    pub fn run_study(mut self) -> Result<StudyOutcome> {
        let horizon = self.cfg.horizon_year.unwrap_or(self.profile.horizon_year);
        let mut reports = Vec::new();
        for year in self.profile.base_year..=horizon {
            let report = self.plan_period(year)?;
            self.reconcile()?;
            reports.push(report);
        }
        Ok(StudyOutcome {
            scheme: self.cfg.scheme,
            seed: self.cfg.seed,
            reports,
            lightpaths: self.lightpaths,
            occupancy: self.occupancy,
            events: self.events,
        })
    }
}

/// Links whose occupancy ratio strictly exceeds the threshold.
pub fn saturated_links(grids: &BTreeMap<LinkId, SlotGrid>, threshold: f64) -> Vec<LinkId> {
    grids
        .iter()
        .filter(|(_, grid)| grid.occupancy_ratio() > threshold)
        .map(|(id, _)| *id)
        .collect()
}

/// Independent RNG stream per (seed, year, demand), so runs with the same
/// seed make the same draws at the same decision points regardless of what
/// other demands did.
fn pair_rng(seed: u64, year: i32, pair: (NodeId, NodeId)) -> ChaCha8Rng {
    let mut state = seed ^ 0x9E37_79B9_7F4A_7C15;
    for value in [year as u64, u64::from(pair.0 .0), u64::from(pair.1 .0)] {
        state = splitmix64(state ^ value.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    }
    ChaCha8Rng::seed_from_u64(state)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Modulation;
    use crate::topology::{Link, Node, Span};

    fn span(length_km: f64) -> Span {
        Span {
            length_km,
            loss_db_per_km: 0.2,
            nf_db: 4.3,
        }
    }

    fn two_node_pair(spans: Vec<Span>, dc_count: u32) -> Topology {
        let nodes = vec![
            Node {
                id: NodeId(0),
                name: "a".into(),
                dc_count,
                ixp_count: 0,
            },
            Node {
                id: NodeId(1),
                name: "b".into(),
                dc_count,
                ixp_count: 0,
            },
        ];
        let links = vec![
            Link {
                id: LinkId(0),
                from: NodeId(0),
                to: NodeId(1),
                spans: spans.clone(),
            },
            Link {
                id: LinkId(1),
                from: NodeId(1),
                to: NodeId(0),
                spans,
            },
        ];
        Topology::new(nodes, links).unwrap()
    }

    /// Two nodes joined by one long link of 30 x 100 km spans: GSNR lands
    /// between the 16QAM and 32QAM thresholds.
    fn long_haul_pair() -> Topology {
        two_node_pair((0..30).map(|_| span(100.0)).collect(), 3)
    }

    fn planner(topo: Topology, scheme: Scheme) -> Planner {
        let cfg = PlannerConfig {
            scheme,
            ..PlannerConfig::default()
        };
        Planner::new(topo, PhyParams::default(), GrowthProfile::expected(), cfg).unwrap()
    }

    #[test]
    fn bootstrap_carries_all_offered_traffic() {
        let mut planner = planner(Topology::germany17(), Scheme::Upgrading);
        let report = planner.plan_period(2020).unwrap();
        planner.reconcile().unwrap();
        assert_eq!(report.year, 2020);
        assert!(report.blocked_additions == 0);
        assert!(
            (report.carried_tbps - report.offered_tbps).abs() < 1e-9,
            "carried {} offered {}",
            report.carried_tbps,
            report.offered_tbps
        );
        assert!(report.bvt_count > 0);
        assert_eq!(report.upgrades_performed, 0);
    }

    #[test]
    fn over_provisioning_stays_below_delta() {
        let mut planner = planner(Topology::germany17(), Scheme::Upgrading);
        planner.plan_period(2020).unwrap();
        for event in planner.events() {
            if let PlanEvent::Additions {
                theta_gbps,
                placed_datarate_gbps,
                planned_count,
                placed_count,
                ..
            } = event
            {
                assert_eq!(planned_count, placed_count);
                assert!(placed_datarate_gbps - theta_gbps < 100.0);
                assert!(*placed_datarate_gbps >= *theta_gbps);
            }
        }
    }

    #[test]
    fn identical_runs_are_bitwise_identical() {
        let run = || {
            let mut p = planner(Topology::germany17(), Scheme::Upgrading);
            let reports: Vec<PeriodReport> = (2020..=2022)
                .map(|year| p.plan_period(year).unwrap())
                .collect();
            (reports, p.lightpaths().to_vec())
        };
        let (r1, lp1) = run();
        let (r2, lp2) = run();
        assert_eq!(r1, r2);
        assert_eq!(lp1, lp2);
    }

    #[test]
    fn upgrade_takes_first_higher_datarate_within_bandwidth() {
        // (200G, QPSK) on a 3000 km path: GSNR ~14.2 dB admits 16QAM but
        // not 32/64QAM, so the best in-bandwidth upgrade is (400G, 16QAM)
        // with the identical 6-slot footprint.
        let mut p = planner(long_haul_pair(), Scheme::Upgrading);
        let pair = (NodeId(0), NodeId(1));
        let path = p.pair_paths[&pair][0].clone();
        let qpsk200 = p
            .catalog
            .iter()
            .position(|c| c.datarate_gbps == 200 && c.modulation == Modulation::Qpsk)
            .unwrap();
        let config = p.catalog[qpsk200].clone();
        assert_eq!(config.slot_count, 6);
        for link in &path.links {
            p.grids.get_mut(link).unwrap().allocate(0, 10, 6).unwrap();
        }
        p.lightpaths.push(Lightpath {
            id: 0,
            pair,
            path,
            config,
            fiber_pair: 0,
            start_slot: 10,
            eta_nli: 1.0,
            provisioned_year: 2020,
            upgraded_years: Vec::new(),
        });
        p.pair_lps.insert(pair, vec![0]);

        let (planned, theta, budget) = p.plan_upgrades(pair, 250.0);
        assert_eq!(planned.len(), 1);
        assert_eq!(theta, 50.0);
        assert!(budget.is_some());
        p.apply_upgrades(2021, pair, &planned);
        let lp = &p.lightpaths[0];
        assert_eq!(lp.config.datarate_gbps, 400);
        assert_eq!(lp.config.modulation, Modulation::Qam16);
        assert_eq!(lp.slot_range(), (10, 6));
        assert_eq!(lp.upgraded_years, vec![2021]);
        p.reconcile().unwrap();
    }

    #[test]
    fn upgrade_skips_maxed_out_lightpath() {
        let mut p = planner(long_haul_pair(), Scheme::Upgrading);
        let pair = (NodeId(0), NodeId(1));
        let path = p.pair_paths[&pair][0].clone();
        // (400G, 16QAM) is already the top of the feasible, in-bandwidth set
        let idx = p
            .catalog
            .iter()
            .position(|c| c.datarate_gbps == 400 && c.modulation == Modulation::Qam16)
            .unwrap();
        let config = p.catalog[idx].clone();
        for link in &path.links {
            p.grids
                .get_mut(link)
                .unwrap()
                .allocate(0, 0, config.slot_count)
                .unwrap();
        }
        p.lightpaths.push(Lightpath {
            id: 0,
            pair,
            path,
            config,
            fiber_pair: 0,
            start_slot: 0,
            eta_nli: 1.0,
            provisioned_year: 2020,
            upgraded_years: Vec::new(),
        });
        p.pair_lps.insert(pair, vec![0]);

        let (planned, theta, _) = p.plan_upgrades(pair, 500.0);
        assert!(planned.is_empty());
        assert_eq!(theta, 500.0);
        assert_eq!(p.lightpaths[0].config.datarate_gbps, 400);
    }

    #[test]
    fn upgrade_noop_when_theta_zero() {
        let mut p = planner(long_haul_pair(), Scheme::Upgrading);
        let pair = (NodeId(0), NodeId(1));
        let (planned, theta, budget) = p.plan_upgrades(pair, 0.0);
        assert!(planned.is_empty());
        assert_eq!(theta, 0.0);
        assert!(budget.is_none());
    }

    #[test]
    fn planned_upgrades_touch_no_state_until_applied() {
        let mut p = planner(long_haul_pair(), Scheme::Upgrading);
        let pair = (NodeId(0), NodeId(1));
        let path = p.pair_paths[&pair][0].clone();
        let qpsk200 = p
            .catalog
            .iter()
            .position(|c| c.datarate_gbps == 200 && c.modulation == Modulation::Qpsk)
            .unwrap();
        let config = p.catalog[qpsk200].clone();
        for link in &path.links {
            p.grids.get_mut(link).unwrap().allocate(0, 10, 6).unwrap();
        }
        p.lightpaths.push(Lightpath {
            id: 0,
            pair,
            path,
            config,
            fiber_pair: 0,
            start_slot: 10,
            eta_nli: 1.0,
            provisioned_year: 2020,
            upgraded_years: Vec::new(),
        });
        p.pair_lps.insert(pair, vec![0]);

        let grids_before = p.grids.clone();
        let lightpaths_before = p.lightpaths.clone();
        let (planned, theta, _) = p.plan_upgrades(pair, 250.0);
        assert_eq!(planned.len(), 1);
        assert_eq!(theta, 50.0);
        assert_eq!(p.grids, grids_before);
        assert_eq!(p.lightpaths, lightpaths_before);
        assert!(p.events.is_empty());
    }

    #[test]
    fn odd_trim_frees_the_high_frequency_slot() {
        // metro pair: the whole catalog clears the filter, so a planned
        // (250G, QPSK, 8 slots) -> (450G, 16QAM, 7 slots) move is legal
        // and trims an odd slot count
        let mut p = planner(
            two_node_pair(vec![span(60.0), span(60.0)], 1),
            Scheme::Upgrading,
        );
        let pair = (NodeId(0), NodeId(1));
        let path = p.pair_paths[&pair][0].clone();
        let old_idx = p
            .catalog
            .iter()
            .position(|c| c.datarate_gbps == 250 && c.modulation == Modulation::Qpsk)
            .unwrap();
        let new_idx = p
            .catalog
            .iter()
            .position(|c| c.datarate_gbps == 450 && c.modulation == Modulation::Qam16)
            .unwrap();
        assert_eq!(p.catalog[old_idx].slot_count, 8);
        assert_eq!(p.catalog[new_idx].slot_count, 7);
        assert!(p.catalog[new_idx].bandwidth_ghz <= p.catalog[old_idx].bandwidth_ghz);

        let config = p.catalog[old_idx].clone();
        for link in &path.links {
            p.grids.get_mut(link).unwrap().allocate(0, 10, 8).unwrap();
        }
        p.lightpaths.push(Lightpath {
            id: 0,
            pair,
            path: path.clone(),
            config,
            fiber_pair: 0,
            start_slot: 10,
            eta_nli: 1.0,
            provisioned_year: 2020,
            upgraded_years: Vec::new(),
        });
        p.pair_lps.insert(pair, vec![0]);

        p.apply_upgrades(
            2021,
            pair,
            &[PlannedUpgrade {
                lp_id: 0,
                config_idx: new_idx,
            }],
        );

        let lp = &p.lightpaths[0];
        assert_eq!(lp.slot_range(), (10, 7));
        for link in &path.links {
            let grid = p.grids.get(link).unwrap();
            // slot 17 (the high-frequency edge) is the one released
            assert!(grid.is_free(0, 17, 1));
            assert!(!grid.is_free(0, 10, 1));
            assert!(!grid.is_free(0, 16, 1));
        }
        // half-slot bookkeeping: center moved down by exactly one half slot
        assert_eq!(2 * 10 + 8 - 1, 2 * lp.start_slot + lp.config.slot_count);
        p.reconcile().unwrap();
    }

    #[test]
    fn stranding_upgrade_is_discarded_for_a_solvable_residual() {
        // one (200G, QPSK) lightpath on the 3000 km pair, offered traffic
        // far ahead of it: the in-place upgrade to (400G, 16QAM) would
        // leave a residual whose only-window configs exceed the NLI
        // budget, while the un-upgraded residual window is solvable; the
        // planner must prefer the plain additions
        let topo = two_node_pair((0..30).map(|_| span(100.0)).collect(), 5);
        let mut p = planner(topo, Scheme::Upgrading);
        let pair = (NodeId(0), NodeId(1));
        let path = p.pair_paths[&pair][0].clone();
        let qpsk200 = p
            .catalog
            .iter()
            .position(|c| c.datarate_gbps == 200 && c.modulation == Modulation::Qpsk)
            .unwrap();
        let config = p.catalog[qpsk200].clone();
        let spans = p.topo.path_spans(&path.links);
        let eta = p.phy.eta_nli(&spans, &config).unwrap();
        for link in &path.links {
            p.grids
                .get_mut(link)
                .unwrap()
                .allocate(0, 0, config.slot_count)
                .unwrap();
        }
        p.lightpaths.push(Lightpath {
            id: 0,
            pair,
            path,
            config,
            fiber_pair: 0,
            start_slot: 0,
            eta_nli: eta,
            provisioned_year: 2020,
            upgraded_years: Vec::new(),
        });
        p.pair_lps.insert(pair, vec![0]);

        // tau(0,1) at 2030 is 50 * 1.25^10 = 465.66, so theta = 265.66:
        // upgrading first would strand theta = 65.66 in a 100/150G window
        let report = p.plan_period(2030).unwrap();
        assert_eq!(report.upgrades_performed, 0, "upgrade should be discarded");
        assert!(p
            .events
            .iter()
            .all(|e| !matches!(e, PlanEvent::Upgrade { .. })));
        assert_eq!(p.lightpaths[0].config.datarate_gbps, 200, "fleet untouched");
        assert!(report.lps_added >= 1);
        assert!(
            (report.carried_tbps - report.offered_tbps).abs() < 1e-12,
            "residual must be fully served: carried {} offered {}",
            report.carried_tbps,
            report.offered_tbps
        );
        p.reconcile().unwrap();
    }

    #[test]
    fn odd_trim_releases_extra_high_slot() {
        // (250G, QPSK, 8 slots) upgrades to (500G, 16QAM, 8 slots) on a
        // clean path; force an odd shrink by seeding a custom case instead:
        // (150G, QPSK, 5 slots) -> (300G, 16QAM, 5 slots) keeps parity, so
        // craft (250G, 8QAM, 5 slots) -> (400G, 32QAM, 5 slots)? Stick to
        // arithmetic: verify the trim rule directly over the catalog.
        let phy = PhyParams::default();
        let catalog = generate_configs(&phy);
        for old in &catalog {
            for new in &catalog {
                if new.bandwidth_ghz <= old.bandwidth_ghz && new.slot_count < old.slot_count {
                    let trim = old.slot_count - new.slot_count;
                    let trim_low = trim / 2;
                    let trim_high = trim - trim_low;
                    assert!(trim_high >= trim_low);
                    assert!(trim_high - trim_low <= 1);
                }
            }
        }
    }

    #[test]
    fn scheme2_never_upgrades() {
        let mut p = planner(Topology::germany17(), Scheme::AddOnly);
        for year in 2020..=2023 {
            let report = p.plan_period(year).unwrap();
            assert_eq!(report.upgrades_performed, 0);
        }
        assert!(p
            .events()
            .iter()
            .all(|e| !matches!(e, PlanEvent::Upgrade { .. })));
    }

    #[test]
    fn saturation_threshold_is_strict() {
        let topo = long_haul_pair();
        let mut grids: BTreeMap<LinkId, SlotGrid> = topo
            .links
            .iter()
            .map(|l| (l.id, SlotGrid::new(384)))
            .collect();
        grids
            .get_mut(&LinkId(0))
            .unwrap()
            .allocate(0, 0, 288)
            .unwrap();
        assert!(saturated_links(&grids, 0.75).is_empty());
        grids
            .get_mut(&LinkId(0))
            .unwrap()
            .allocate(0, 288, 1)
            .unwrap();
        assert_eq!(saturated_links(&grids, 0.75), vec![LinkId(0)]);
        // a new fiber pair halves the ratio and clears the flag
        grids.get_mut(&LinkId(0)).unwrap().add_fiber_pair();
        assert!(saturated_links(&grids, 0.75).is_empty());
    }

    #[test]
    fn study_emits_one_report_per_year() {
        let planner = planner(Topology::us_abilene12(), Scheme::Upgrading);
        let outcome = planner.run_study().unwrap();
        assert_eq!(outcome.reports.len(), 11);
        assert_eq!(outcome.reports.first().unwrap().year, 2020);
        assert_eq!(outcome.reports.last().unwrap().year, 2030);
        // additions-only fleet: the count never shrinks
        for pair in outcome.reports.windows(2) {
            assert!(pair[1].bvt_count >= pair[0].bvt_count);
        }
        assert_eq!(outcome.occupancy.len(), 30 * 11);
    }

    #[test]
    fn horizon_at_base_year_gives_single_report() {
        let topo = Topology::us_abilene12();
        let cfg = PlannerConfig {
            horizon_year: Some(2020),
            ..PlannerConfig::default()
        };
        let planner =
            Planner::new(topo, PhyParams::default(), GrowthProfile::expected(), cfg).unwrap();
        let outcome = planner.run_study().unwrap();
        assert_eq!(outcome.reports.len(), 1);
    }

    #[test]
    fn horizon_beyond_profile_is_rejected() {
        let cfg = PlannerConfig {
            horizon_year: Some(2040),
            ..PlannerConfig::default()
        };
        assert!(matches!(
            Planner::new(
                Topology::us_abilene12(),
                PhyParams::default(),
                GrowthProfile::expected(),
                cfg
            ),
            Err(Error::YearOutOfRange(2040))
        ));
    }
}
