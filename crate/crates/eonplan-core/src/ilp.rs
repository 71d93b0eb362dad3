//! Exact solver for the per-demand lightpath addition problem.
//!
//! Given residual traffic `theta`, find the smallest multiset of channel
//! configurations whose total datarate lands in `[theta, theta + delta)`
//! while the summed NLI coefficient stays within the budget. Ties between
//! minimal-count solutions break on smallest total datarate, then smallest
//! slot footprint, then smallest NLI sum, then the lexicographically
//! smallest option-index multiset. The final rule makes the optimum unique,
//! so independent solvers must return the identical multiset.
//!
//! NLI sums are always accumulated in ascending option-index order; keeping
//! one canonical summation order makes float comparisons reproducible.

/// One admissible configuration on the demand's candidate path.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditionOption {
    /// Index into the channel catalog (kept for the caller's bookkeeping).
    pub config_idx: usize,
    pub datarate_gbps: u32,
    pub slot_count: usize,
    pub eta_nli: f64,
}

/// Outcome of the addition solve.
#[derive(Debug, Clone, PartialEq)]
pub enum AdditionSolution {
    /// Option indices (into the input slice), ascending, with repetition.
    Solution(Vec<usize>),
    /// No multiset satisfies both the datarate window and the NLI budget.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
struct SolutionKey {
    sum_dr: u64,
    sum_slots: u64,
    sum_eta: f64,
    picks: Vec<usize>,
}

impl SolutionKey {
    fn better_than(&self, other: &SolutionKey) -> bool {
        (self.sum_dr, self.sum_slots)
            .cmp(&(other.sum_dr, other.sum_slots))
            .then(self.sum_eta.total_cmp(&other.sum_eta))
            .then(self.picks.cmp(&other.picks))
            .is_lt()
    }
}

struct Search<'a> {
    options: &'a [AdditionOption],
    theta: f64,
    delta: f64,
    budget: Option<f64>,
    /// max datarate over options[i..]
    suffix_max_dr: Vec<u64>,
    /// min datarate over options[i..]
    suffix_min_dr: Vec<u64>,
    best: Option<SolutionKey>,
}

impl Search<'_> {
    fn run(&mut self, count: usize) -> Option<Vec<usize>> {
        self.best = None;
        let mut picks = Vec::with_capacity(count);
        self.descend(0, count, 0, 0, 0.0, &mut picks);
        self.best.take().map(|k| k.picks)
    }

    fn descend(
        &mut self,
        from: usize,
        remaining: usize,
        sum_dr: u64,
        sum_slots: u64,
        sum_eta: f64,
        picks: &mut Vec<usize>,
    ) {
        if remaining == 0 {
            let total = sum_dr as f64;
            if total < self.theta || total >= self.theta + self.delta {
                return;
            }
            if let Some(budget) = self.budget {
                if sum_eta > budget {
                    return;
                }
            }
            let key = SolutionKey {
                sum_dr,
                sum_slots,
                sum_eta,
                picks: picks.clone(),
            };
            if self.best.as_ref().is_none_or(|b| key.better_than(b)) {
                self.best = Some(key);
            }
            return;
        }
        if from >= self.options.len() {
            return;
        }
        // even the largest remaining datarates cannot reach theta
        let reachable = (sum_dr + remaining as u64 * self.suffix_max_dr[from]) as f64;
        if reachable < self.theta {
            return;
        }
        for idx in from..self.options.len() {
            let opt = &self.options[idx];
            let dr = sum_dr + u64::from(opt.datarate_gbps);
            // every later pick only adds datarate, so overshoot is final
            if (dr + (remaining as u64 - 1) * self.suffix_min_dr[idx]) as f64
                >= self.theta + self.delta
            {
                continue;
            }
            let eta = sum_eta + opt.eta_nli;
            if let Some(budget) = self.budget {
                if eta > budget {
                    continue;
                }
            }
            picks.push(idx);
            self.descend(
                idx,
                remaining - 1,
                dr,
                sum_slots + opt.slot_count as u64,
                eta,
                picks,
            );
            picks.pop();
        }
    }
}

/// Solves the addition problem exactly. `nli_budget` of `None` waives the
/// budget constraint (a pair with no provisioned lightpaths yet).
pub fn solve_additions(
    theta_gbps: f64,
    options: &[AdditionOption],
    nli_budget: Option<f64>,
    delta_gbps: f64,
) -> AdditionSolution {
    if theta_gbps <= 0.0 || options.is_empty() {
        return AdditionSolution::Infeasible;
    }
    let min_dr = options
        .iter()
        .map(|o| u64::from(o.datarate_gbps))
        .min()
        .expect("non-empty");
    if min_dr == 0 {
        return AdditionSolution::Infeasible;
    }
    let max_count = ((theta_gbps + delta_gbps) / min_dr as f64).ceil() as usize;
    let mut suffix_max_dr = vec![0u64; options.len()];
    let mut suffix_min_dr = vec![u64::MAX; options.len()];
    let mut max = 0;
    let mut min = u64::MAX;
    for (i, opt) in options.iter().enumerate().rev() {
        max = max.max(u64::from(opt.datarate_gbps));
        min = min.min(u64::from(opt.datarate_gbps));
        suffix_max_dr[i] = max;
        suffix_min_dr[i] = min;
    }
    let mut search = Search {
        options,
        theta: theta_gbps,
        delta: delta_gbps,
        budget: nli_budget,
        suffix_max_dr,
        suffix_min_dr,
        best: None,
    };
    for count in 1..=max_count {
        if let Some(picks) = search.run(count) {
            return AdditionSolution::Solution(picks);
        }
    }
    AdditionSolution::Infeasible
}

/// Canonical NLI sum of a pick list (ascending option index order).
pub fn picks_eta(options: &[AdditionOption], picks: &[usize]) -> f64 {
    picks.iter().map(|&i| options[i].eta_nli).sum()
}

/// Total datarate of a pick list.
pub fn picks_datarate_gbps(options: &[AdditionOption], picks: &[usize]) -> f64 {
    picks
        .iter()
        .map(|&i| f64::from(options[i].datarate_gbps))
        .sum()
}
