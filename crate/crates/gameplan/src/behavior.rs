//! Driver-behavior profiling from trajectories.
//!
//! Observed trajectories are sliced into per-timestep snapshots, each
//! snapshot becomes a proximity graph (an edge between two agents whenever
//! their distance is at most the radius `mu`), and a degree centrality with
//! temporal memory is accumulated over the graph sequence. An agent's final
//! centrality value over the observation window is its behavior profile
//! `zeta`: a non-negative aggressiveness score that doubles as the agent's
//! valuation and truthful bid in the auction layer.
//!
//! The memory rule: at each step, an agent's count increases by the number
//! of *new* neighbors that are no faster than it. A neighbor id can
//! contribute at most once over the whole window, no matter how long it
//! stays in range, so the series is monotone non-decreasing and shrinking
//! the radius can never increase any value.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::AgentId;

/// One observed state sample of one agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub agent_id: AgentId,
    /// Seconds, non-negative.
    pub time: f64,
    /// Meters, global frame.
    pub position: Point2,
    /// Scalar speed, meters/second, non-negative.
    pub speed: f64,
}

impl TrajectorySample {
    pub fn validate(&self) -> Result<()> {
        if !self.time.is_finite() || self.time < 0.0 {
            return Err(Error::invalid(format!(
                "sample for agent {} has bad time {}",
                self.agent_id, self.time
            )));
        }
        if !self.position.is_finite() {
            return Err(Error::invalid(format!(
                "sample for agent {} has non-finite position",
                self.agent_id
            )));
        }
        if !self.speed.is_finite() || self.speed < 0.0 {
            return Err(Error::invalid(format!(
                "sample for agent {} has bad speed {}",
                self.agent_id, self.speed
            )));
        }
        Ok(())
    }
}

/// Time-ordered samples of a single agent.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub agent_id: AgentId,
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn new(agent_id: AgentId, samples: Vec<TrajectorySample>) -> Result<Self> {
        for s in &samples {
            s.validate()?;
            if s.agent_id != agent_id {
                return Err(Error::invalid(format!(
                    "trajectory for agent {agent_id} contains a sample for agent {}",
                    s.agent_id
                )));
            }
        }
        for w in samples.windows(2) {
            if w[1].time <= w[0].time {
                return Err(Error::invalid(format!(
                    "trajectory for agent {agent_id} has non-increasing timestamps \
                     ({} then {})",
                    w[0].time, w[1].time
                )));
            }
        }
        Ok(Trajectory { agent_id, samples })
    }

    pub fn start_time(&self) -> Option<f64> {
        self.samples.first().map(|s| s.time)
    }

    pub fn end_time(&self) -> Option<f64> {
        self.samples.last().map(|s| s.time)
    }
}

/// Weighted undirected proximity graph over one snapshot in time.
///
/// Vertices are agents with their positions and speeds; an edge exists
/// between two agents iff their Euclidean distance is at most `radius`,
/// with the distance itself as weight.
#[derive(Debug, Clone)]
pub struct TrafficGraph {
    pub timestamp: f64,
    /// Sorted by agent id.
    pub vertices: Vec<GraphVertex>,
    /// Unordered pairs stored with `a < b`; weight in `[0, radius]`.
    pub edges: Vec<GraphEdge>,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct GraphVertex {
    pub agent_id: AgentId,
    pub position: Point2,
    pub speed: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct GraphEdge {
    pub a: AgentId,
    pub b: AgentId,
    pub weight: f64,
}

impl TrafficGraph {
    pub fn has_vertex(&self, id: AgentId) -> bool {
        self.vertices.iter().any(|v| v.agent_id == id)
    }

    pub fn vertex(&self, id: AgentId) -> Option<&GraphVertex> {
        self.vertices.iter().find(|v| v.agent_id == id)
    }

    /// Neighbor ids of `id` together with the neighbor's speed.
    pub fn neighbors(&self, id: AgentId) -> impl Iterator<Item = (AgentId, f64)> + '_ {
        self.edges.iter().filter_map(move |e| {
            let other = if e.a == id {
                Some(e.b)
            } else if e.b == id {
                Some(e.a)
            } else {
                None
            };
            other.map(|o| (o, self.vertex(o).expect("edge endpoint present").speed))
        })
    }
}

/// Builds the proximity graph for one snapshot.
///
/// All samples must share a single timestamp and carry distinct agent ids.
pub fn build_traffic_graph(samples_at_t: &[TrajectorySample], mu: f64) -> Result<TrafficGraph> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::invalid(format!("radius mu must be positive, got {mu}")));
    }
    if samples_at_t.is_empty() {
        return Err(Error::invalid("empty snapshot"));
    }
    let t = samples_at_t[0].time;
    let mut seen = HashSet::new();
    for s in samples_at_t {
        s.validate()?;
        if s.time != t {
            return Err(Error::invalid(format!(
                "snapshot mixes timestamps {t} and {}",
                s.time
            )));
        }
        if !seen.insert(s.agent_id) {
            return Err(Error::invalid(format!(
                "duplicate agent id {} in snapshot at t = {t}",
                s.agent_id
            )));
        }
    }

    let mut vertices: Vec<GraphVertex> = samples_at_t
        .iter()
        .map(|s| GraphVertex { agent_id: s.agent_id, position: s.position, speed: s.speed })
        .collect();
    vertices.sort_by_key(|v| v.agent_id);

    let mut edges = Vec::new();
    for i in 0..vertices.len() {
        for j in (i + 1)..vertices.len() {
            let d = vertices[i].position.distance(&vertices[j].position);
            if d <= mu {
                edges.push(GraphEdge {
                    a: vertices[i].agent_id,
                    b: vertices[j].agent_id,
                    weight: d,
                });
            }
        }
    }
    Ok(TrafficGraph { timestamp: t, vertices, edges, radius: mu })
}

/// Per-timestep centrality values of one agent, with the memory set of
/// neighbor ids already counted.
#[derive(Debug, Clone)]
pub struct CentralitySeries {
    pub agent_id: AgentId,
    /// One value per graph in the input sequence; monotone non-decreasing.
    pub values: Vec<u32>,
    pub seen_neighbors: HashSet<AgentId>,
}

impl CentralitySeries {
    pub fn final_value(&self) -> u32 {
        self.values.last().copied().unwrap_or(0)
    }
}

/// Extension point for centrality variants; only degree-with-memory is
/// currently provided.
pub trait Centrality {
    fn series(&self, graphs: &[TrafficGraph], agent: AgentId) -> Result<CentralitySeries>;
}

/// Degree centrality with temporal memory.
#[derive(Debug, Clone, Copy, Default)]
pub struct DegreeWithMemory;

impl Centrality for DegreeWithMemory {
    fn series(&self, graphs: &[TrafficGraph], agent: AgentId) -> Result<CentralitySeries> {
        degree_centrality_with_memory(graphs, agent)
    }
}

/// Accumulates, over a time-ordered graph sequence, the number of distinct
/// neighbors of `agent` that were no faster than it when first counted.
///
/// At step `t` the value increases by the number of neighbors `j` with
/// `speed_j <= speed_agent` that have not been counted at any earlier step;
/// each neighbor id contributes at most once over the whole sequence. Steps
/// where the agent is absent from the snapshot contribute nothing and the
/// series carries the previous value forward.
pub fn degree_centrality_with_memory(
    graphs: &[TrafficGraph],
    agent: AgentId,
) -> Result<CentralitySeries> {
    for w in graphs.windows(2) {
        if w[1].timestamp <= w[0].timestamp {
            return Err(Error::invalid(format!(
                "graph sequence not time-ordered ({} then {})",
                w[0].timestamp, w[1].timestamp
            )));
        }
    }
    if !graphs.iter().any(|g| g.has_vertex(agent)) {
        return Err(Error::UnknownAgent(agent));
    }

    let mut seen_neighbors = HashSet::new();
    let mut values = Vec::with_capacity(graphs.len());
    let mut current: u32 = 0;
    for g in graphs {
        if let Some(v) = g.vertex(agent) {
            let own_speed = v.speed;
            for (other, other_speed) in g.neighbors(agent) {
                if other_speed <= own_speed && !seen_neighbors.contains(&other) {
                    seen_neighbors.insert(other);
                    current += 1;
                }
            }
        }
        values.push(current);
    }
    Ok(CentralitySeries { agent_id: agent, values, seen_neighbors })
}

/// Scalar aggressiveness score of one agent over an observation window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehaviorProfile {
    pub agent_id: AgentId,
    /// Non-negative; the final temporal-memory centrality value.
    pub zeta: f64,
    /// Observation window `(start, end)` in seconds, end > start.
    pub window: (f64, f64),
}

/// Computes the behavior profile of `agent` over `window` from a set of
/// trajectories sampled at common timestamps.
///
/// Snapshots are taken at the distinct sample times inside the window;
/// agents without a sample at a given time simply do not appear in that
/// snapshot. `zeta` is the centrality value at the end of the window.
pub fn compute_behavior_profile(
    trajectories: &[Trajectory],
    agent: AgentId,
    mu: f64,
    window: (f64, f64),
) -> Result<BehaviorProfile> {
    let (start, end) = window;
    if !(end > start) {
        return Err(Error::invalid(format!(
            "window end {end} must be greater than start {start}"
        )));
    }
    if !trajectories.iter().any(|t| t.agent_id == agent) {
        return Err(Error::UnknownAgent(agent));
    }

    let data_start = trajectories
        .iter()
        .filter_map(|t| t.start_time())
        .fold(f64::INFINITY, f64::min);
    let data_end = trajectories
        .iter()
        .filter_map(|t| t.end_time())
        .fold(f64::NEG_INFINITY, f64::max);
    if data_start > start + TIME_EPS || data_end < end - TIME_EPS {
        return Err(Error::WindowNotCovered { start, end });
    }

    let graphs = snapshot_graphs(trajectories, mu, window)?;
    if graphs.is_empty() {
        return Err(Error::WindowNotCovered { start, end });
    }
    let series = degree_centrality_with_memory(&graphs, agent)?;
    Ok(BehaviorProfile { agent_id: agent, zeta: series.final_value() as f64, window })
}

const TIME_EPS: f64 = 1e-9;

/// Builds the snapshot graph sequence for a trajectory set over a window.
///
/// Sample times from all trajectories are pooled and deduplicated with a
/// small tolerance so that nominally-equal timestamps group together.
pub fn snapshot_graphs(
    trajectories: &[Trajectory],
    mu: f64,
    window: (f64, f64),
) -> Result<Vec<TrafficGraph>> {
    let (start, end) = window;
    // group samples by (approximately) equal timestamps
    let mut times: Vec<f64> = trajectories
        .iter()
        .flat_map(|t| t.samples.iter().map(|s| s.time))
        .filter(|&t| t >= start - TIME_EPS && t <= end + TIME_EPS)
        .collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup_by(|a, b| (*a - *b).abs() <= TIME_EPS);

    let mut buckets: BTreeMap<usize, Vec<TrajectorySample>> = BTreeMap::new();
    for traj in trajectories {
        for s in &traj.samples {
            if s.time < start - TIME_EPS || s.time > end + TIME_EPS {
                continue;
            }
            let idx = match times.binary_search_by(|t| t.partial_cmp(&s.time).unwrap()) {
                Ok(i) => i,
                Err(i) => {
                    // attach to the nearest grouped time within tolerance
                    let before = i.checked_sub(1).filter(|&k| (times[k] - s.time).abs() <= TIME_EPS);
                    let after = (i < times.len() && (times[i] - s.time).abs() <= TIME_EPS)
                        .then_some(i);
                    before.or(after).ok_or_else(|| {
                        Error::invalid(format!("sample time {} failed to group", s.time))
                    })?
                }
            };
            let mut snap = *s;
            snap.time = times[idx];
            buckets.entry(idx).or_default().push(snap);
        }
    }

    buckets
        .into_values()
        .map(|snap| build_traffic_graph(&snap, mu))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(id: u32, t: f64, x: f64, y: f64, v: f64) -> TrajectorySample {
        TrajectorySample {
            agent_id: AgentId(id),
            time: t,
            position: Point2::new(x, y),
            speed: v,
        }
    }

    #[test]
    fn graph_edge_within_radius() {
        // two agents 5 m apart, mu = 10 -> one edge of weight 5
        let g = build_traffic_graph(&[sample(0, 0.0, 0.0, 0.0, 1.0), sample(1, 0.0, 5.0, 0.0, 1.0)], 10.0)
            .unwrap();
        assert_eq!(g.edges.len(), 1);
        assert!((g.edges[0].weight - 5.0).abs() < 1e-12);
    }

    #[test]
    fn graph_single_vertex_no_edges() {
        let g = build_traffic_graph(&[sample(7, 1.0, 3.0, 4.0, 2.0)], 10.0).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn graph_line_of_three() {
        // agents at x = 0, 8, 20, mu = 10 -> only {0, 8} connected, weight 8
        let g = build_traffic_graph(
            &[
                sample(0, 0.0, 0.0, 0.0, 1.0),
                sample(1, 0.0, 8.0, 0.0, 1.0),
                sample(2, 0.0, 20.0, 0.0, 1.0),
            ],
            10.0,
        )
        .unwrap();
        assert_eq!(g.edges.len(), 1);
        assert_eq!((g.edges[0].a, g.edges[0].b), (AgentId(0), AgentId(1)));
        assert!((g.edges[0].weight - 8.0).abs() < 1e-12);
    }

    #[test]
    fn graph_rejects_duplicates_and_nonfinite() {
        let err = build_traffic_graph(
            &[sample(0, 0.0, 0.0, 0.0, 1.0), sample(0, 0.0, 1.0, 0.0, 1.0)],
            10.0,
        );
        assert!(err.is_err());
        let err = build_traffic_graph(&[sample(0, 0.0, f64::NAN, 0.0, 1.0)], 10.0);
        assert!(err.is_err());
        let err = build_traffic_graph(
            &[sample(0, 0.0, 0.0, 0.0, 1.0), sample(1, 0.5, 1.0, 0.0, 1.0)],
            10.0,
        );
        assert!(err.is_err(), "mixed timestamps must be rejected");
    }

    fn graphs_from_rows(rows: &[Vec<TrajectorySample>], mu: f64) -> Vec<TrafficGraph> {
        rows.iter().map(|r| build_traffic_graph(r, mu).unwrap()).collect()
    }

    #[test]
    fn centrality_no_neighbors_is_all_zero() {
        let rows: Vec<Vec<TrajectorySample>> = (0..5)
            .map(|k| vec![sample(0, k as f64, 0.0, 0.0, 5.0), sample(1, k as f64, 100.0, 0.0, 5.0)])
            .collect();
        let series =
            degree_centrality_with_memory(&graphs_from_rows(&rows, 10.0), AgentId(0)).unwrap();
        assert_eq!(series.values, vec![0; 5]);
    }

    #[test]
    fn centrality_counts_slower_neighbor_once() {
        // neighbor (speed 10) enters range of agent (speed 15) at step 3 of 6
        // and stays: series [0,0,0,1,1,1]
        let rows: Vec<Vec<TrajectorySample>> = (0..6)
            .map(|k| {
                let x_other = if k >= 3 { 5.0 } else { 50.0 };
                vec![
                    sample(0, k as f64, 0.0, 0.0, 15.0),
                    sample(1, k as f64, x_other, 0.0, 10.0),
                ]
            })
            .collect();
        let series =
            degree_centrality_with_memory(&graphs_from_rows(&rows, 10.0), AgentId(0)).unwrap();
        assert_eq!(series.values, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn centrality_ignores_faster_neighbor() {
        let rows: Vec<Vec<TrajectorySample>> = (0..4)
            .map(|k| vec![sample(0, k as f64, 0.0, 0.0, 10.0), sample(1, k as f64, 5.0, 0.0, 15.0)])
            .collect();
        let series =
            degree_centrality_with_memory(&graphs_from_rows(&rows, 10.0), AgentId(0)).unwrap();
        assert_eq!(series.values, vec![0; 4]);
    }

    #[test]
    fn centrality_absent_everywhere_is_error() {
        let rows = vec![vec![sample(0, 0.0, 0.0, 0.0, 1.0)]];
        let err = degree_centrality_with_memory(&graphs_from_rows(&rows, 10.0), AgentId(9));
        assert!(matches!(err, Err(Error::UnknownAgent(_))));
    }

    #[test]
    fn centrality_absent_step_carries_value_forward() {
        let rows = vec![
            vec![sample(0, 0.0, 0.0, 0.0, 10.0), sample(1, 0.0, 5.0, 0.0, 5.0)],
            vec![sample(1, 1.0, 5.0, 0.0, 5.0)], // agent 0 missing
            vec![sample(0, 2.0, 0.0, 0.0, 10.0), sample(1, 2.0, 5.0, 0.0, 5.0)],
        ];
        let series =
            degree_centrality_with_memory(&graphs_from_rows(&rows, 10.0), AgentId(0)).unwrap();
        assert_eq!(series.values, vec![1, 1, 1]);
    }

    fn straight_trajectory(id: u32, x0: f64, y: f64, speed: f64, n: usize, dt: f64) -> Trajectory {
        let samples = (0..n)
            .map(|k| sample(id, k as f64 * dt, x0 + speed * k as f64 * dt, y, speed))
            .collect();
        Trajectory::new(AgentId(id), samples).unwrap()
    }

    #[test]
    fn profile_stationary_far_apart_is_zero() {
        let trajs = vec![
            straight_trajectory(0, 0.0, 0.0, 0.0, 51, 0.1),
            straight_trajectory(1, 50.0, 0.0, 0.0, 51, 0.1),
            straight_trajectory(2, 100.0, 0.0, 0.0, 51, 0.1),
        ];
        let p = compute_behavior_profile(&trajs, AgentId(0), 10.0, (0.0, 5.0)).unwrap();
        assert_eq!(p.zeta, 0.0);
    }

    #[test]
    fn profile_overtaker_counts_each_passed_vehicle() {
        // overtaker at 20 m/s on y = 3.5 passes three 5 m/s vehicles on y = 0
        let trajs = vec![
            straight_trajectory(0, -40.0, 3.5, 20.0, 51, 0.1),
            straight_trajectory(1, 0.0, 0.0, 5.0, 51, 0.1),
            straight_trajectory(2, 15.0, 0.0, 5.0, 51, 0.1),
            straight_trajectory(3, 30.0, 0.0, 5.0, 51, 0.1),
        ];
        let p = compute_behavior_profile(&trajs, AgentId(0), 10.0, (0.0, 5.0)).unwrap();
        assert_eq!(p.zeta, 3.0);
        // the passed vehicles never count the strictly faster overtaker
        for id in 1..=3 {
            let q = compute_behavior_profile(&trajs, AgentId(id), 10.0, (0.0, 5.0)).unwrap();
            assert!(q.zeta <= 2.0, "passed vehicle counts only its own slow peers");
        }
    }

    #[test]
    fn profile_symmetric_pair_far_apart() {
        let trajs = vec![
            straight_trajectory(0, 0.0, 0.0, 8.0, 51, 0.1),
            straight_trajectory(1, 0.0, 1000.0, 8.0, 51, 0.1),
        ];
        let a = compute_behavior_profile(&trajs, AgentId(0), 10.0, (0.0, 5.0)).unwrap();
        let b = compute_behavior_profile(&trajs, AgentId(1), 10.0, (0.0, 5.0)).unwrap();
        assert_eq!(a.zeta, b.zeta);
    }

    #[test]
    fn profile_window_and_agent_errors() {
        let trajs = vec![straight_trajectory(0, 0.0, 0.0, 1.0, 11, 0.1)];
        assert!(matches!(
            compute_behavior_profile(&trajs, AgentId(0), 10.0, (0.0, 5.0)),
            Err(Error::WindowNotCovered { .. })
        ));
        assert!(matches!(
            compute_behavior_profile(&trajs, AgentId(5), 10.0, (0.0, 1.0)),
            Err(Error::UnknownAgent(_))
        ));
    }
}
