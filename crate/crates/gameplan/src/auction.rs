//! Sponsored-search-auction mechanics over behavior profiles.
//!
//! Agents bid scalar values (truthfully, their behavior profile `zeta`);
//! the turn ordering allocates the earliest turn to the highest bid. Turn
//! `k` carries a time reward `alpha_k = 1 / t_k`, and the utility of the
//! occupant of turn `k` is
//!
//! ```text
//! u_k = v_k * alpha_k - sum_{j=k..K} b_{j+1} * (alpha_j - alpha_{j+1})
//! ```
//!
//! with boundary terms `b_{K+1} = 0` and `alpha_{K+1} = 0`, so the last
//! bidder pays nothing. Deviation deltas are computed by differencing two
//! such utility evaluations rather than from closed forms.
//!
//! The module also carries the baseline bidding strategies used for
//! comparison (economic: highest monetary bid first; FIFO: earliest arrival
//! first; random: a seeded permutation), a factorial brute-force oracle for
//! welfare maximization, and a report-valued incentive-compatibility
//! verifier.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::AgentId;

/// Which bidding strategy produced a bid vector / ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyTag {
    Behavior,
    Economic,
    Fifo,
    Random,
}

impl std::fmt::Display for StrategyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StrategyTag::Behavior => "behavior",
            StrategyTag::Economic => "economic",
            StrategyTag::Fifo => "fifo",
            StrategyTag::Random => "random",
        };
        f.write_str(s)
    }
}

/// Per-agent non-negative bids.
#[derive(Debug, Clone)]
pub struct BidVector {
    pub entries: Vec<(AgentId, f64)>,
    pub strategy_tag: StrategyTag,
}

impl BidVector {
    pub fn new(entries: Vec<(AgentId, f64)>, strategy_tag: StrategyTag) -> Result<Self> {
        validate_entries(&entries, "bid")?;
        Ok(BidVector { entries, strategy_tag })
    }
}

/// Per-agent non-negative private valuations. With behavior-based bidding
/// the valuation of an agent equals its behavior profile `zeta`.
#[derive(Debug, Clone)]
pub struct ValuationVector {
    pub entries: Vec<(AgentId, f64)>,
}

impl ValuationVector {
    pub fn new(entries: Vec<(AgentId, f64)>) -> Result<Self> {
        validate_entries(&entries, "valuation")?;
        Ok(ValuationVector { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn validate_entries(entries: &[(AgentId, f64)], what: &str) -> Result<()> {
    let mut ids: Vec<AgentId> = entries.iter().map(|(id, _)| *id).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != entries.len() {
        return Err(Error::invalid(format!("duplicate agent id in {what} vector")));
    }
    for (id, v) in entries {
        if !v.is_finite() || *v < 0.0 {
            return Err(Error::invalid(format!("{what} for agent {id} must be finite and >= 0, got {v}")));
        }
    }
    Ok(())
}

/// A permutation assigning each agent a turn index in `[1, n]`.
/// `by_turn[0]` moves first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurnOrdering {
    pub by_turn: Vec<AgentId>,
}

impl TurnOrdering {
    pub fn n(&self) -> usize {
        self.by_turn.len()
    }

    /// 1-based turn index of `agent`, if present.
    pub fn turn_of(&self, agent: AgentId) -> Option<usize> {
        self.by_turn.iter().position(|&a| a == agent).map(|i| i + 1)
    }

    /// True if the ordering is a bijection onto `[1, n]` over `ids`.
    pub fn is_permutation_of(&self, ids: &[AgentId]) -> bool {
        if self.by_turn.len() != ids.len() {
            return false;
        }
        let mut a = self.by_turn.clone();
        let mut b = ids.to_vec();
        a.sort_unstable();
        b.sort_unstable();
        a.dedup();
        a.len() == b.len() && a == b
    }
}

/// Turn ordering together with turn times and their rewards.
#[derive(Debug, Clone)]
pub struct TurnSchedule {
    pub ordering: TurnOrdering,
    /// Strictly increasing positive times `t_1 < ... < t_n` (seconds).
    pub turn_times: Vec<f64>,
    /// `alpha_k = 1 / t_k`, strictly decreasing.
    pub rewards: Vec<f64>,
}

impl TurnSchedule {
    pub fn new(ordering: TurnOrdering, turn_times: Vec<f64>) -> Result<Self> {
        if ordering.n() != turn_times.len() {
            return Err(Error::invalid(format!(
                "ordering has {} agents but {} turn times given",
                ordering.n(),
                turn_times.len()
            )));
        }
        let rewards = time_rewards(&turn_times)?;
        Ok(TurnSchedule { ordering, turn_times, rewards })
    }

    /// Uniform schedule `t_k = k * tau`.
    pub fn uniform(ordering: TurnOrdering, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::invalid(format!("tau must be positive, got {tau}")));
        }
        let times = (1..=ordering.n()).map(|k| k as f64 * tau).collect();
        TurnSchedule::new(ordering, times)
    }

    pub fn n(&self) -> usize {
        self.ordering.n()
    }
}

/// Full auction outcome: schedule plus per-agent utilities and payments.
#[derive(Debug, Clone)]
pub struct AuctionOutcome {
    pub schedule: TurnSchedule,
    /// Indexed by turn (0-based slot `k-1`), aligned with `schedule.ordering.by_turn`.
    pub utilities: Vec<f64>,
    pub payments: Vec<f64>,
    pub welfare: f64,
}

/// Computes `alpha_k = 1 / t_k` for strictly increasing positive times.
pub fn time_rewards(turn_times: &[f64]) -> Result<Vec<f64>> {
    for (i, &t) in turn_times.iter().enumerate() {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!("turn time {t} at index {i} must be positive")));
        }
        if i > 0 && t <= turn_times[i - 1] {
            return Err(Error::invalid(format!(
                "turn times must be strictly increasing ({} then {t})",
                turn_times[i - 1]
            )));
        }
    }
    Ok(turn_times.iter().map(|t| 1.0 / t).collect())
}

/// Orders agents by descending profile; exact ties broken by seeded
/// randomness so repeated runs with the same seed agree.
pub fn gameplan_ordering(profiles: &ValuationVector, tie_seed: u64) -> Result<TurnOrdering> {
    Ok(gameplan_ordering_counting(profiles, tie_seed)?.0)
}

/// As [`gameplan_ordering`], additionally reporting how many profile
/// comparisons the sort performed (used by the runtime-bound checks).
pub fn gameplan_ordering_counting(
    profiles: &ValuationVector,
    tie_seed: u64,
) -> Result<(TurnOrdering, u64)> {
    if profiles.is_empty() {
        return Err(Error::invalid("cannot order an empty agent set"));
    }
    // Canonical base order, then a seeded tie-rank per agent so that equal
    // profiles land in a reproducible random relative order.
    let mut entries = profiles.entries.clone();
    entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut tie_rank: Vec<usize> = (0..entries.len()).collect();
    tie_rank.shuffle(&mut ChaCha8Rng::seed_from_u64(tie_seed));

    let mut order: Vec<usize> = (0..entries.len()).collect();
    let mut comparisons: u64 = 0;
    order.sort_by(|&i, &j| {
        comparisons += 1;
        entries[j]
            .1
            .total_cmp(&entries[i].1)
            .then_with(|| tie_rank[i].cmp(&tie_rank[j]))
    });
    let by_turn = order.into_iter().map(|i| entries[i].0).collect();
    Ok((TurnOrdering { by_turn }, comparisons))
}

/// Utility and payment of the turn-`k` occupant (1-based), given the full
/// descending bid sequence by slot and the occupant's valuation.
pub fn utility(
    k: usize,
    sorted_bids: &[f64],
    valuation_k: f64,
    schedule: &TurnSchedule,
) -> Result<(f64, f64)> {
    let n = schedule.n();
    if sorted_bids.len() != n {
        return Err(Error::invalid(format!(
            "{} bids given for a {n}-slot schedule",
            sorted_bids.len()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!("turn index {k} out of range 1..={n}")));
    }
    for w in sorted_bids.windows(2) {
        if w[1] > w[0] {
            return Err(Error::invalid("bids must be sorted descending"));
        }
    }
    Ok(slot_utility(k, valuation_k, &sorted_bids[k..], &schedule.rewards))
}

/// Core of the utility formula: only the bids of the slots below `k`
/// enter the payment. `bids_below[0]` is the bid at slot `k + 1`.
fn slot_utility(k: usize, valuation: f64, bids_below: &[f64], rewards: &[f64]) -> (f64, f64) {
    let n = rewards.len();
    let mut payment = 0.0;
    for j in k..=n {
        // boundary terms: bid and reward of slot n + 1 are zero
        let b_next = bids_below.get(j - k).copied().unwrap_or(0.0);
        let alpha_j = rewards[j - 1];
        let alpha_next = if j < n { rewards[j] } else { 0.0 };
        payment += b_next * (alpha_j - alpha_next);
    }
    (valuation * rewards[k - 1] - payment, payment)
}

/// Utility change of the truthful turn-`k` agent if it overbid into slot
/// `k - 1`, displacing that slot's occupant: `u_bar_k - u_k`.
///
/// Computed as the difference of two utility evaluations. Negative whenever
/// the displaced profile is strictly larger.
pub fn overbid_delta(k: usize, truthful_profile: &[f64], schedule: &TurnSchedule) -> Result<f64> {
    let n = schedule.n();
    check_truthful_profile(truthful_profile, n)?;
    if k < 2 || k > n {
        return Err(Error::invalid(format!(
            "overbid requires a higher slot to take: k must be in 2..={n}, got {k}"
        )));
    }
    let (honest, _) = slot_utility(k, truthful_profile[k - 1], &truthful_profile[k..], &schedule.rewards);
    // After the deviation the displaced agent holds slot k; all lower slots
    // keep their occupants, so the deviator's below-bids are the displaced
    // bid followed by the untouched tail.
    let mut below = Vec::with_capacity(n - k + 1);
    below.push(truthful_profile[k - 2]);
    below.extend_from_slice(&truthful_profile[k..]);
    let (deviated, _) = slot_utility(k - 1, truthful_profile[k - 1], &below, &schedule.rewards);
    Ok(deviated - honest)
}

/// Utility *decrease* of the truthful turn-`k` agent if it underbid into
/// slot `k + 1`: `u_k - u_bar_k`. Positive whenever the profile below is
/// strictly smaller.
pub fn underbid_delta(k: usize, truthful_profile: &[f64], schedule: &TurnSchedule) -> Result<f64> {
    let n = schedule.n();
    check_truthful_profile(truthful_profile, n)?;
    if k == 0 || k >= n {
        return Err(Error::invalid(format!(
            "underbid requires a lower slot to drop to: k must be in 1..={}, got {k}",
            n - 1
        )));
    }
    let (honest, _) = slot_utility(k, truthful_profile[k - 1], &truthful_profile[k..], &schedule.rewards);
    // After swapping down one slot, the slots below k + 1 are unchanged.
    let (deviated, _) =
        slot_utility(k + 1, truthful_profile[k - 1], &truthful_profile[k + 1..], &schedule.rewards);
    Ok(honest - deviated)
}

fn check_truthful_profile(profile: &[f64], n: usize) -> Result<()> {
    if profile.len() != n {
        return Err(Error::invalid(format!(
            "profile has {} entries for a {n}-slot schedule",
            profile.len()
        )));
    }
    for w in profile.windows(2) {
        if w[1] > w[0] {
            return Err(Error::invalid("truthful profile must be sorted descending"));
        }
    }
    Ok(())
}

/// Utility change available to an agent with the given valuation and
/// original monetary bid that overbids to take the slot one turn earlier:
/// `(valuation - original_bid) * (1/t_prev - 1/t_cur)`.
///
/// Positive exactly when the valuation exceeds the original bid; the
/// witness that valuation-blind auctions can be manipulated.
pub fn economic_manipulation_gain(
    valuation: f64,
    original_bid: f64,
    t_prev: f64,
    t_cur: f64,
) -> Result<f64> {
    if !(t_prev > 0.0) || !(t_cur > 0.0) {
        return Err(Error::invalid(format!(
            "turn times must be positive, got t_prev = {t_prev}, t_cur = {t_cur}"
        )));
    }
    if t_prev >= t_cur {
        return Err(Error::invalid(format!(
            "t_prev = {t_prev} must precede t_cur = {t_cur}"
        )));
    }
    Ok((valuation - original_bid) * (1.0 / t_prev - 1.0 / t_cur))
}

/// Attributes a baseline strategy may need from each agent.
#[derive(Debug, Clone, Copy)]
pub struct BaselineAgent {
    pub id: AgentId,
    /// Currency units; required by the economic strategy.
    pub budget: Option<f64>,
    /// Seconds at the conflict-zone boundary; required by FIFO.
    pub arrival_time: Option<f64>,
}

/// Baseline orderings: economic sorts by monetary bid (= budget)
/// descending, FIFO by arrival time ascending, random is a seeded uniform
/// permutation. Exact ties break by seeded randomness.
pub fn baseline_ordering(
    strategy: StrategyTag,
    agents: &[BaselineAgent],
    seed: u64,
) -> Result<TurnOrdering> {
    if agents.is_empty() {
        return Err(Error::invalid("cannot order an empty agent set"));
    }
    let mut ids: Vec<AgentId> = agents.iter().map(|a| a.id).collect();
    {
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ids.len() {
            return Err(Error::invalid("duplicate agent id in baseline agent set"));
        }
    }
    match strategy {
        StrategyTag::Behavior => {
            Err(Error::invalid("behavior strategy is ordered via gameplan_ordering"))
        }
        StrategyTag::Economic => {
            let mut keyed = Vec::with_capacity(agents.len());
            for a in agents {
                let b = a.budget.ok_or_else(|| {
                    Error::invalid(format!("economic ordering requires a budget for agent {}", a.id))
                })?;
                if !b.is_finite() || b < 0.0 {
                    return Err(Error::invalid(format!("bad budget {b} for agent {}", a.id)));
                }
                keyed.push((a.id, b));
            }
            let profiles = ValuationVector::new(keyed)?;
            gameplan_ordering(&profiles, seed)
        }
        StrategyTag::Fifo => {
            let mut keyed = Vec::with_capacity(agents.len());
            for a in agents {
                let t = a.arrival_time.ok_or_else(|| {
                    Error::invalid(format!("fifo ordering requires an arrival time for agent {}", a.id))
                })?;
                if !t.is_finite() {
                    return Err(Error::invalid(format!("bad arrival time {t} for agent {}", a.id)));
                }
                keyed.push((a.id, t));
            }
            // earliest arrival first; reuse the descending sorter on negated keys
            let max_t = keyed.iter().map(|(_, t)| *t).fold(f64::NEG_INFINITY, f64::max);
            let inverted: Vec<(AgentId, f64)> =
                keyed.into_iter().map(|(id, t)| (id, max_t - t)).collect();
            let profiles = ValuationVector::new(inverted)?;
            gameplan_ordering(&profiles, seed)
        }
        StrategyTag::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            ids.sort_unstable();
            ids.shuffle(&mut rng);
            Ok(TurnOrdering { by_turn: ids })
        }
    }
}

/// Social welfare `sum_i v_i * alpha_{sigma_i}` of an ordering.
pub fn social_welfare(
    ordering: &TurnOrdering,
    valuations: &ValuationVector,
    rewards: &[f64],
) -> Result<f64> {
    let n = valuations.len();
    if ordering.n() != n || rewards.len() != n {
        return Err(Error::invalid(format!(
            "dimension mismatch: ordering {}, valuations {n}, rewards {}",
            ordering.n(),
            rewards.len()
        )));
    }
    let mut welfare = 0.0;
    for (id, v) in &valuations.entries {
        let turn = ordering
            .turn_of(*id)
            .ok_or_else(|| Error::invalid(format!("agent {id} missing from ordering")))?;
        welfare += v * rewards[turn - 1];
    }
    Ok(welfare)
}

/// Max instance size the factorial oracle accepts.
pub const BRUTE_FORCE_MAX_N: usize = 10;

/// Enumerates every permutation and returns one of maximum social welfare.
/// Independent of the sort-based ordering; used as its oracle.
pub fn brute_force_optimal_ordering(
    valuations: &ValuationVector,
    rewards: &[f64],
) -> Result<(TurnOrdering, f64)> {
    let n = valuations.len();
    if n == 0 {
        return Err(Error::invalid("cannot order an empty agent set"));
    }
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::OracleTooLarge { n, max: BRUTE_FORCE_MAX_N });
    }
    if rewards.len() != n {
        return Err(Error::invalid("rewards length must match valuations"));
    }

    let ids: Vec<AgentId> = valuations.entries.iter().map(|(id, _)| *id).collect();
    let vals: Vec<f64> = valuations.entries.iter().map(|(_, v)| *v).collect();

    // Heap's algorithm over slot assignments; perm[slot] = agent index.
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let welfare_of = |perm: &[usize]| -> f64 {
        perm.iter().enumerate().map(|(slot, &ai)| vals[ai] * rewards[slot]).sum()
    };

    let mut best_perm = perm.clone();
    let mut best = welfare_of(&perm);
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            let w = welfare_of(&perm);
            if w > best {
                best = w;
                best_perm.copy_from_slice(&perm);
            }
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }

    let by_turn = best_perm.into_iter().map(|ai| ids[ai]).collect();
    Ok((TurnOrdering { by_turn }, best))
}

/// One incentive-compatibility violation found by the verifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcViolation {
    /// 1-based turn index of the deviating agent.
    pub k: usize,
    pub deviation: Deviation,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deviation {
    Overbid,
    Underbid,
}

/// Result of checking every unilateral adjacent-slot deviation.
#[derive(Debug, Clone, Default)]
pub struct IcReport {
    pub pass: bool,
    pub violations: Vec<IcViolation>,
    pub checks: usize,
}

/// For every slot `k`, asserts that overbidding strictly loses
/// (`overbid_delta < 0` for `k >= 2`) and underbidding strictly loses
/// (`underbid_delta > 0` for `k <= n - 1`). Expects distinct descending
/// profiles; tie classes are checked separately by the property suites.
pub fn verify_incentive_compatibility(
    truthful_profile: &[f64],
    schedule: &TurnSchedule,
) -> Result<IcReport> {
    let n = schedule.n();
    check_truthful_profile(truthful_profile, n)?;
    let mut report = IcReport { pass: true, violations: Vec::new(), checks: 0 };
    for k in 2..=n {
        let delta = overbid_delta(k, truthful_profile, schedule)?;
        report.checks += 1;
        if delta >= 0.0 {
            report.pass = false;
            report.violations.push(IcViolation { k, deviation: Deviation::Overbid, delta });
        }
    }
    for k in 1..n {
        let delta = underbid_delta(k, truthful_profile, schedule)?;
        report.checks += 1;
        if delta <= 0.0 {
            report.pass = false;
            report.violations.push(IcViolation { k, deviation: Deviation::Underbid, delta });
        }
    }
    Ok(report)
}

/// Runs the full auction: allocation by descending bid, utilities and
/// payments per slot, and the social welfare of the resulting ordering.
pub fn run_auction(
    valuations: &ValuationVector,
    bids: &BidVector,
    turn_times: &[f64],
    tie_seed: u64,
) -> Result<AuctionOutcome> {
    if valuations.len() != bids.entries.len() {
        return Err(Error::invalid("valuations and bids must cover the same agents"));
    }
    let bid_profiles = ValuationVector::new(bids.entries.clone())?;
    let ordering = gameplan_ordering(&bid_profiles, tie_seed)?;
    let schedule = TurnSchedule::new(ordering, turn_times.to_vec())?;

    let bid_of = |id: AgentId| -> Result<f64> {
        bids.entries
            .iter()
            .find(|(a, _)| *a == id)
            .map(|(_, b)| *b)
            .ok_or_else(|| Error::invalid(format!("agent {id} missing a bid")))
    };
    let val_of = |id: AgentId| -> Result<f64> {
        valuations
            .entries
            .iter()
            .find(|(a, _)| *a == id)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::invalid(format!("agent {id} missing a valuation")))
    };

    let sorted_bids: Vec<f64> = schedule
        .ordering
        .by_turn
        .iter()
        .map(|&id| bid_of(id))
        .collect::<Result<_>>()?;

    let mut utilities = Vec::with_capacity(schedule.n());
    let mut payments = Vec::with_capacity(schedule.n());
    for (slot, &id) in schedule.ordering.by_turn.iter().enumerate() {
        let (u, p) = utility(slot + 1, &sorted_bids, val_of(id)?, &schedule)?;
        utilities.push(u);
        payments.push(p);
    }
    let welfare = social_welfare(&schedule.ordering, valuations, &schedule.rewards)?;
    Ok(AuctionOutcome { schedule, utilities, payments, welfare })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<AgentId> {
        (0..n as u32).map(AgentId).collect()
    }

    fn vv(vals: &[f64]) -> ValuationVector {
        ValuationVector::new(
            vals.iter().enumerate().map(|(i, &v)| (AgentId(i as u32), v)).collect(),
        )
        .unwrap()
    }

    fn schedule(times: &[f64]) -> TurnSchedule {
        let n = times.len();
        TurnSchedule::new(TurnOrdering { by_turn: ids(n) }, times.to_vec()).unwrap()
    }

    #[test]
    fn ordering_sorts_descending() {
        // already sorted input
        let p = vv(&[0.9, 0.5, 0.2]);
        let o = gameplan_ordering(&p, 0).unwrap();
        assert_eq!(o.by_turn, ids(3));
        // shuffled input: A:0.2 B:0.9 C:0.5 -> B, C, A
        let p = vv(&[0.2, 0.9, 0.5]);
        let o = gameplan_ordering(&p, 0).unwrap();
        assert_eq!(o.by_turn, vec![AgentId(1), AgentId(2), AgentId(0)]);
        assert_eq!(o.turn_of(AgentId(0)), Some(3));
    }

    #[test]
    fn ordering_ties_deterministic_per_seed() {
        let p = vv(&[0.5, 0.5]);
        let a = gameplan_ordering(&p, 42).unwrap();
        let b = gameplan_ordering(&p, 42).unwrap();
        assert_eq!(a, b);
        // a different seed is allowed to (and here does not have to) differ,
        // but both must still be valid permutations
        let c = gameplan_ordering(&p, 43).unwrap();
        assert!(c.is_permutation_of(&ids(2)));
    }

    #[test]
    fn ordering_rejects_empty() {
        let p = ValuationVector::new(vec![]).unwrap();
        assert!(gameplan_ordering(&p, 0).is_err());
    }

    #[test]
    fn rewards_are_reciprocals() {
        assert_eq!(time_rewards(&[1.0, 2.0, 4.0]).unwrap(), vec![1.0, 0.5, 0.25]);
        assert_eq!(time_rewards(&[3.0]).unwrap(), vec![1.0 / 3.0]);
        assert!(time_rewards(&[2.0, 2.0]).is_err());
        assert!(time_rewards(&[-1.0, 2.0]).is_err());
    }

    #[test]
    fn utility_matches_hand_evaluation() {
        // zeta = b = [0.9, 0.5, 0.2], t = [1, 2, 4]
        let s = schedule(&[1.0, 2.0, 4.0]);
        let bids = [0.9, 0.5, 0.2];
        let (u1, p1) = utility(1, &bids, 0.9, &s).unwrap();
        assert!((u1 - 0.60).abs() < 1e-12, "u1 = {u1}");
        assert!((p1 - 0.30).abs() < 1e-12);
        let (u3, p3) = utility(3, &bids, 0.2, &s).unwrap();
        assert!((u3 - 0.05).abs() < 1e-12, "u3 = {u3}");
        assert_eq!(p3, 0.0);
    }

    #[test]
    fn utility_single_bidder_boundary() {
        let s = schedule(&[2.0]);
        let (u, p) = utility(1, &[0.7], 0.7, &s).unwrap();
        assert!((u - 0.35).abs() < 1e-12);
        assert_eq!(p, 0.0);
    }

    #[test]
    fn utility_rejects_unsorted_and_out_of_range() {
        let s = schedule(&[1.0, 2.0]);
        assert!(utility(1, &[0.2, 0.9], 0.2, &s).is_err());
        assert!(utility(0, &[0.9, 0.2], 0.9, &s).is_err());
        assert!(utility(3, &[0.9, 0.2], 0.9, &s).is_err());
    }

    #[test]
    fn overbid_delta_examples() {
        let s = schedule(&[1.0, 2.0]);
        let d = overbid_delta(2, &[0.9, 0.5], &s).unwrap();
        assert!((d - (-0.20)).abs() < 1e-12, "d = {d}");
        // tie in profile -> zero delta
        let d = overbid_delta(2, &[0.5, 0.5], &s).unwrap();
        assert!(d.abs() < 1e-12);
        // k = 1 has no higher slot
        assert!(overbid_delta(1, &[0.9, 0.5], &s).is_err());
    }

    #[test]
    fn underbid_delta_examples() {
        let s = schedule(&[1.0, 2.0, 4.0]);
        let d = underbid_delta(2, &[0.9, 0.5, 0.2], &s).unwrap();
        assert!((d - 0.075).abs() < 1e-12, "d = {d}");
        let d = underbid_delta(2, &[0.9, 0.5, 0.5], &s).unwrap();
        assert!(d.abs() < 1e-12);
        assert!(underbid_delta(3, &[0.9, 0.5, 0.2], &s).is_err());
    }

    #[test]
    fn economic_gain_examples() {
        let d = economic_manipulation_gain(0.8, 0.3, 1.0, 2.0).unwrap();
        assert!((d - 0.25).abs() < 1e-12);
        assert_eq!(economic_manipulation_gain(0.4, 0.4, 1.0, 2.0).unwrap(), 0.0);
        assert!(economic_manipulation_gain(0.2, 0.4, 1.0, 2.0).unwrap() < 0.0);
        assert!(economic_manipulation_gain(0.8, 0.3, -1.0, 2.0).is_err());
        assert!(economic_manipulation_gain(0.8, 0.3, 2.0, 1.0).is_err());
    }

    #[test]
    fn baseline_orderings() {
        let agents = [
            BaselineAgent { id: AgentId(0), budget: Some(5.0), arrival_time: Some(2.0) },
            BaselineAgent { id: AgentId(1), budget: Some(9.0), arrival_time: Some(1.0) },
        ];
        let fifo = baseline_ordering(StrategyTag::Fifo, &agents, 0).unwrap();
        assert_eq!(fifo.by_turn, vec![AgentId(1), AgentId(0)]);
        let econ = baseline_ordering(StrategyTag::Economic, &agents, 0).unwrap();
        assert_eq!(econ.by_turn, vec![AgentId(1), AgentId(0)]);
        let r1 = baseline_ordering(StrategyTag::Random, &agents, 7).unwrap();
        let r2 = baseline_ordering(StrategyTag::Random, &agents, 7).unwrap();
        assert_eq!(r1, r2);

        let missing = [BaselineAgent { id: AgentId(0), budget: None, arrival_time: None }];
        assert!(baseline_ordering(StrategyTag::Economic, &missing, 0).is_err());
        assert!(baseline_ordering(StrategyTag::Fifo, &missing, 0).is_err());
    }

    #[test]
    fn welfare_examples() {
        let v = vv(&[0.9, 0.5, 0.2]);
        let rewards = [1.0, 0.5, 0.25];
        let sorted = TurnOrdering { by_turn: ids(3) };
        let w = social_welfare(&sorted, &v, &rewards).unwrap();
        assert!((w - 1.2).abs() < 1e-12);
        let swapped = TurnOrdering { by_turn: vec![AgentId(1), AgentId(0), AgentId(2)] };
        let w2 = social_welfare(&swapped, &v, &rewards).unwrap();
        assert!((w2 - 1.0).abs() < 1e-12);
        assert!(w2 < w);
        // dimension mismatch
        assert!(social_welfare(&sorted, &v, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn brute_force_agrees_on_examples() {
        let v = vv(&[0.9, 0.5, 0.2]);
        let rewards = time_rewards(&[1.0, 2.0, 4.0]).unwrap();
        let (o, w) = brute_force_optimal_ordering(&v, &rewards).unwrap();
        assert_eq!(o.by_turn, ids(3));
        assert!((w - 1.2).abs() < 1e-12);

        let v1 = vv(&[0.4]);
        let (o1, w1) = brute_force_optimal_ordering(&v1, &[0.5]).unwrap();
        assert_eq!(o1.by_turn, ids(1));
        assert!((w1 - 0.2).abs() < 1e-12);

        // all-equal valuations: every permutation optimal, welfare = c * sum(alpha)
        let veq = vv(&[0.3, 0.3, 0.3]);
        let (_, weq) = brute_force_optimal_ordering(&veq, &rewards).unwrap();
        let expect = 0.3 * rewards.iter().sum::<f64>();
        assert!((weq - expect).abs() < 1e-12);

        let big = vv(&[0.1; 11]);
        assert!(matches!(
            brute_force_optimal_ordering(&big, &[0.1; 11]),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn ic_verifier_passes_descending_instance() {
        let s = schedule(&[1.0, 2.0, 4.0]);
        let report = verify_incentive_compatibility(&[0.9, 0.5, 0.2], &s).unwrap();
        assert!(report.pass, "violations: {:?}", report.violations);
        assert_eq!(report.checks, 4);
    }

    #[test]
    fn schedule_rejects_decreasing_times() {
        assert!(TurnSchedule::new(TurnOrdering { by_turn: ids(2) }, vec![2.0, 1.0]).is_err());
    }

    #[test]
    fn auction_outcome_invariants() {
        let v = vv(&[0.9, 0.5, 0.2]);
        let bids = BidVector::new(v.entries.clone(), StrategyTag::Behavior).unwrap();
        let out = run_auction(&v, &bids, &[1.0, 2.0, 4.0], 0).unwrap();
        assert!((out.welfare - 1.2).abs() < 1e-12);
        for (slot, (&u, &p)) in out.utilities.iter().zip(&out.payments).enumerate() {
            assert!(p >= 0.0);
            let id = out.schedule.ordering.by_turn[slot];
            let val = v.entries.iter().find(|(a, _)| *a == id).unwrap().1;
            assert!((u - (val * out.schedule.rewards[slot] - p)).abs() < 1e-12);
        }
    }
}
