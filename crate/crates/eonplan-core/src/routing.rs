//! Candidate-path computation and spectrum assignment.
//!
//! Routing follows a weighted probabilistic scheme: Yen's algorithm yields
//! up to `k` loop-free candidate paths per demand, and one is sampled with
//! probability proportional to the widest slot run that is free end to end.
//! Spectrum is then assigned first-fit with the continuity constraint (the
//! same slot range and fiber-pair index on every traversed link).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use rand::Rng;

use crate::error::{Error, Result};
use crate::spectrum::SlotGrid;
use crate::topology::{LinkId, NodeId, Topology};

/// A loop-free route with its traversed directed links.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePath {
    pub nodes: Vec<NodeId>,
    pub links: Vec<LinkId>,
    pub total_length_km: f64,
}

impl CandidatePath {
    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn dest(&self) -> NodeId {
        *self.nodes.last().expect("non-empty path")
    }
}

/// Orders candidates by length, ties broken on the node sequence so that
/// equal-cost runs are reproducible.
fn path_cmp(a: &CandidatePath, b: &CandidatePath) -> Ordering {
    a.total_length_km
        .total_cmp(&b.total_length_km)
        .then_with(|| a.nodes.cmp(&b.nodes))
}

struct HeapEntry(CandidatePath);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        path_cmp(&self.0, &other.0) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap, we want the shortest on top
        path_cmp(&other.0, &self.0)
    }
}

/// Deterministic Dijkstra on link length, honoring banned nodes and links.
fn shortest_path(
    topo: &Topology,
    src: NodeId,
    dst: NodeId,
    banned_nodes: &BTreeSet<NodeId>,
    banned_links: &BTreeSet<LinkId>,
) -> Option<CandidatePath> {
    let mut dist: BTreeMap<NodeId, f64> = BTreeMap::new();
    let mut prev: BTreeMap<NodeId, LinkId> = BTreeMap::new();
    let mut heap: BinaryHeap<std::cmp::Reverse<(TotalF64, NodeId)>> = BinaryHeap::new();
    dist.insert(src, 0.0);
    heap.push(std::cmp::Reverse((TotalF64(0.0), src)));
    while let Some(std::cmp::Reverse((TotalF64(d), u))) = heap.pop() {
        if dist.get(&u).is_none_or(|best| d > *best) {
            continue;
        }
        if u == dst {
            break;
        }
        for &link_id in topo.out_links(u) {
            if banned_links.contains(&link_id) {
                continue;
            }
            let link = topo.link(link_id).expect("indexed link");
            let v = link.to;
            if banned_nodes.contains(&v) {
                continue;
            }
            let nd = d + link.total_length_km();
            if dist.get(&v).is_none_or(|best| nd < *best) {
                dist.insert(v, nd);
                prev.insert(v, link_id);
                heap.push(std::cmp::Reverse((TotalF64(nd), v)));
            }
        }
    }
    dist.get(&dst)?;
    let mut links = Vec::new();
    let mut nodes = vec![dst];
    let mut cur = dst;
    while cur != src {
        let link_id = *prev.get(&cur)?;
        let link = topo.link(link_id).expect("indexed link");
        links.push(link_id);
        cur = link.from;
        nodes.push(cur);
    }
    links.reverse();
    nodes.reverse();
    Some(CandidatePath {
        nodes,
        links,
        total_length_km: dist[&dst],
    })
}

#[derive(PartialEq)]
struct TotalF64(f64);
impl Eq for TotalF64 {}
impl PartialOrd for TotalF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for TotalF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Up to `k` loop-free paths from `src` to `dst` in non-decreasing length
/// order (Yen's algorithm over physical length).
pub fn k_shortest_paths(
    topo: &Topology,
    src: NodeId,
    dst: NodeId,
    k: usize,
) -> Result<Vec<CandidatePath>> {
    topo.node(src)?;
    topo.node(dst)?;
    let first = shortest_path(topo, src, dst, &BTreeSet::new(), &BTreeSet::new())
        .ok_or(Error::NoPath(src, dst))?;
    let mut found = vec![first];
    let mut seen: BTreeSet<Vec<NodeId>> = BTreeSet::new();
    seen.insert(found[0].nodes.clone());
    let mut candidates: BinaryHeap<HeapEntry> = BinaryHeap::new();

    while found.len() < k {
        let last = found.last().expect("non-empty").clone();
        for spur_idx in 0..last.nodes.len() - 1 {
            let spur_node = last.nodes[spur_idx];
            let root_nodes = &last.nodes[..=spur_idx];
            let root_links = &last.links[..spur_idx];

            // forbid retracing any already-found path sharing this root
            let mut banned_links = BTreeSet::new();
            for path in &found {
                if path.nodes.len() > spur_idx && path.nodes[..=spur_idx] == *root_nodes {
                    if let Some(&next_link) = path.links.get(spur_idx) {
                        banned_links.insert(next_link);
                    }
                }
            }
            let banned_nodes: BTreeSet<NodeId> = root_nodes[..spur_idx].iter().copied().collect();

            if let Some(spur) = shortest_path(topo, spur_node, dst, &banned_nodes, &banned_links) {
                let mut nodes = root_nodes[..spur_idx].to_vec();
                nodes.extend(spur.nodes.iter().copied());
                if seen.insert(nodes.clone()) {
                    let mut links = root_links.to_vec();
                    links.extend(spur.links.iter().copied());
                    let total: f64 = links
                        .iter()
                        .map(|id| topo.link(*id).expect("indexed link").total_length_km())
                        .sum();
                    candidates.push(HeapEntry(CandidatePath {
                        nodes,
                        links,
                        total_length_km: total,
                    }));
                }
            }
        }
        match candidates.pop() {
            Some(HeapEntry(path)) => found.push(path),
            None => break,
        }
    }
    Ok(found)
}

/// Widest slot run simultaneously free on every link of the path within a
/// single fiber-pair index; the maximum over the pair indices shared by all
/// links.
pub fn path_free_weight(path: &CandidatePath, grids: &BTreeMap<LinkId, SlotGrid>) -> usize {
    common_free(path, grids)
        .iter()
        .map(|bits| longest_run(bits))
        .max()
        .unwrap_or(0)
}

/// Free-slot intersection per common fiber-pair index, over the slot range
/// shared by every traversed grid.
fn common_free(path: &CandidatePath, grids: &BTreeMap<LinkId, SlotGrid>) -> Vec<Vec<bool>> {
    if path.links.iter().any(|id| !grids.contains_key(id)) {
        return Vec::new();
    }
    let slot_count = path
        .links
        .iter()
        .map(|id| grids[id].slot_count())
        .min()
        .unwrap_or(0);
    let common_pairs = path
        .links
        .iter()
        .map(|id| grids[id].fiber_pairs())
        .min()
        .unwrap_or(0);
    (0..common_pairs)
        .map(|pair| {
            let mut free = vec![true; slot_count];
            for link_id in &path.links {
                let bits = grids[link_id].pair_bits(pair);
                for (slot, free_slot) in free.iter_mut().enumerate() {
                    if bits[slot] {
                        *free_slot = false;
                    }
                }
            }
            free
        })
        .collect()
}

fn longest_run(free: &[bool]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for &f in free {
        if f {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

/// Samples a candidate with probability proportional to its weight. When
/// every weight is zero the shortest candidate is returned so that the
/// caller can still report the placement as blocked.
pub fn choose_path<'a>(
    candidates: &'a [CandidatePath],
    weights: &[usize],
    rng: &mut impl Rng,
) -> Result<&'a CandidatePath> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    assert_eq!(candidates.len(), weights.len());
    let total: u64 = weights.iter().map(|w| *w as u64).sum();
    if total == 0 {
        return Ok(candidates
            .iter()
            .min_by(|a, b| path_cmp(a, b))
            .expect("non-empty"));
    }
    let mut draw = rng.random_range(0..total);
    for (candidate, &weight) in candidates.iter().zip(weights) {
        let weight = weight as u64;
        if draw < weight {
            return Ok(candidate);
        }
        draw -= weight;
    }
    unreachable!("draw below total weight");
}

/// Lowest feasible `(fiber_pair, start_slot)` for a block of `slot_count`
/// slots free on every link of the path: fiber pair 0 fills up before the
/// next pair is considered. `None` means blocked.
pub fn first_fit(
    path: &CandidatePath,
    slot_count: usize,
    grids: &BTreeMap<LinkId, SlotGrid>,
) -> Option<(usize, usize)> {
    if slot_count == 0 {
        return None;
    }
    for (pair, free) in common_free(path, grids).iter().enumerate() {
        let mut run = 0;
        for (slot, &f) in free.iter().enumerate() {
            if f {
                run += 1;
                if run == slot_count {
                    return Some((pair, slot + 1 - slot_count));
                }
            } else {
                run = 0;
            }
        }
    }
    None
}
