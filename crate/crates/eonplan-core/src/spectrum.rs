//! Flex-grid spectrum state for one directed link.
//!
//! A grid covers `fiber_pairs` parallel fibers of `slot_count` slots each.
//! Allocations are contiguous slot runs confined to a single fiber pair.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SlotGrid {
    slot_count: usize,
    fiber_pairs: usize,
    occ: Vec<bool>,
}

impl SlotGrid {
    /// A fully free grid with a single fiber pair.
    pub fn new(slot_count: usize) -> Self {
        SlotGrid {
            slot_count,
            fiber_pairs: 1,
            occ: vec![false; slot_count],
        }
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    pub fn fiber_pairs(&self) -> usize {
        self.fiber_pairs
    }

    pub fn total_slots(&self) -> usize {
        self.slot_count * self.fiber_pairs
    }

    pub fn occupied_slots(&self) -> usize {
        self.occ.iter().filter(|b| **b).count()
    }

    pub fn free_slots(&self) -> usize {
        self.total_slots() - self.occupied_slots()
    }

    fn check_range(&self, pair: usize, start: usize, len: usize) -> Result<()> {
        if pair >= self.fiber_pairs {
            return Err(Error::UnknownFiberPair(pair));
        }
        if start + len > self.slot_count {
            return Err(Error::SlotOutOfRange { start, len });
        }
        Ok(())
    }

    /// Slot occupancy of one fiber pair.
    pub fn pair_bits(&self, pair: usize) -> &[bool] {
        let base = pair * self.slot_count;
        &self.occ[base..base + self.slot_count]
    }

    pub fn is_free(&self, pair: usize, start: usize, len: usize) -> bool {
        self.check_range(pair, start, len).is_ok()
            && self.pair_bits(pair)[start..start + len].iter().all(|b| !b)
    }

    /// Marks `[start, start + len)` occupied on the given fiber pair.
    /// Fails without side effects on overlap or out-of-range input.
    pub fn allocate(&mut self, pair: usize, start: usize, len: usize) -> Result<()> {
        self.check_range(pair, start, len)?;
        if !self.is_free(pair, start, len) {
            return Err(Error::SlotOverlap { start, len });
        }
        let base = pair * self.slot_count;
        self.occ[base + start..base + start + len].fill(true);
        Ok(())
    }

    /// Clears `[start, start + len)`; every slot must currently be occupied.
    pub fn release(&mut self, pair: usize, start: usize, len: usize) -> Result<()> {
        self.check_range(pair, start, len)?;
        let base = pair * self.slot_count;
        if self.occ[base + start..base + start + len]
            .iter()
            .any(|b| !b)
        {
            return Err(Error::SlotNotAllocated { start, len });
        }
        self.occ[base + start..base + start + len].fill(false);
        Ok(())
    }

    /// Maximal free runs of one fiber pair as `(start, length)`, ascending.
    pub fn contiguous_free_runs(&self, pair: usize) -> Vec<(usize, usize)> {
        let bits = self.pair_bits(pair);
        let mut runs = Vec::new();
        let mut start = None;
        for (i, occupied) in bits.iter().enumerate() {
            match (occupied, start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    runs.push((s, i - s));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            runs.push((s, self.slot_count - s));
        }
        runs
    }

    /// Longest free run on one fiber pair.
    pub fn largest_free_run(&self, pair: usize) -> usize {
        self.contiguous_free_runs(pair)
            .into_iter()
            .map(|(_, len)| len)
            .max()
            .unwrap_or(0)
    }

    /// Occupied fraction across all fiber pairs.
    pub fn occupancy_ratio(&self) -> f64 {
        self.occupied_slots() as f64 / self.total_slots() as f64
    }

    /// Lights a dark fiber pair: existing allocations untouched, the new
    /// pair fully free.
    pub fn add_fiber_pair(&mut self) {
        self.fiber_pairs += 1;
        self.occ.extend(std::iter::repeat_n(false, self.slot_count));
    }
}
