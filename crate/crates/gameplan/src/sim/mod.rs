//! Deterministic seeded discrete-time simulation of unsignaled
//! intersections, roundabouts, and merges.
//!
//! An episode runs in two phases. During the observation window agents
//! approach the conflict zone under car-following control while their
//! trajectories are recorded; at the end of the window the recorded
//! trajectories are turned into behavior profiles, the configured strategy
//! produces a turn ordering over them, and the rest of the episode enforces
//! that ordering at the conflict-zone boundary. Baseline strategies
//! additionally run the impatience model: an aggressive agent whose
//! assigned turn sits behind a strictly less aggressive agent jumps one
//! slot, entering the zone alongside its predecessor.

mod idm;
mod scenario;
mod world;

pub use idm::{IdmParams, ACCEL_CHOICES};
pub use scenario::{ConflictZone, Scenario};
pub use world::{
    collision_pairs, detect_collision, detect_deadlock, spawn_scenario, Agent, World,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::AgentId;

/// Which traffic scenario to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    #[serde(rename = "intersection4way", alias = "intersection")]
    Intersection4Way,
    Roundabout,
    Merge,
}

impl ScenarioKind {
    /// Nominal per-turn crossing time used for the reward times `t_k = k * tau`.
    pub fn crossing_tau(&self) -> f64 {
        match self {
            ScenarioKind::Intersection4Way => 3.0,
            ScenarioKind::Roundabout => 4.0,
            ScenarioKind::Merge => 2.5,
        }
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intersection" | "intersection4way" => Ok(ScenarioKind::Intersection4Way),
            "roundabout" => Ok(ScenarioKind::Roundabout),
            "merge" => Ok(ScenarioKind::Merge),
            other => Err(Error::Parse(format!("unknown scenario '{other}'"))),
        }
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ScenarioKind::Intersection4Way => "intersection4way",
            ScenarioKind::Roundabout => "roundabout",
            ScenarioKind::Merge => "merge",
        };
        f.write_str(s)
    }
}

/// How many agents are programmed aggressive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AggressiveSpec {
    /// Fraction of the population; the count is `round(fraction * n)`.
    Fraction(f64),
    /// Explicit count.
    Count(usize),
}

impl AggressiveSpec {
    pub fn count_for(&self, n_agents: usize) -> Result<usize> {
        match self {
            AggressiveSpec::Fraction(f) => {
                if !(0.0..=1.0).contains(f) {
                    return Err(Error::invalid(format!("aggressive fraction {f} not in [0, 1]")));
                }
                Ok(((f * n_agents as f64).round() as usize).min(n_agents))
            }
            AggressiveSpec::Count(c) => {
                if *c > n_agents {
                    return Err(Error::invalid(format!(
                        "aggressive count {c} exceeds {n_agents} agents"
                    )));
                }
                Ok(*c)
            }
        }
    }
}

/// Ordering strategy used for the planning phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderingStrategy {
    GamePlan,
    Economic,
    Fifo,
    Random,
    /// No coordination: agents act on their own behavior programs.
    None,
}

impl std::str::FromStr for OrderingStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gameplan" => Ok(OrderingStrategy::GamePlan),
            "economic" => Ok(OrderingStrategy::Economic),
            "fifo" => Ok(OrderingStrategy::Fifo),
            "random" => Ok(OrderingStrategy::Random),
            "none" => Ok(OrderingStrategy::None),
            other => Err(Error::Parse(format!("unknown strategy '{other}'"))),
        }
    }
}

impl std::fmt::Display for OrderingStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            OrderingStrategy::GamePlan => "gameplan",
            OrderingStrategy::Economic => "economic",
            OrderingStrategy::Fifo => "fifo",
            OrderingStrategy::Random => "random",
            OrderingStrategy::None => "none",
        };
        f.write_str(s)
    }
}

/// Programmed driving style of an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BehaviorClass {
    Aggressive,
    Conservative,
}

/// Full configuration of one simulated episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub lanes_per_approach: usize,
    pub n_agents: usize,
    pub aggressive: AggressiveSpec,
    /// Speed limit, m/s.
    pub max_speed: f64,
    /// Simulated area footprint, m^2.
    pub density_area: f64,
    pub seed: u64,
    /// Seconds; simulation step size.
    pub timestep: f64,
    pub strategy: OrderingStrategy,
    /// Seconds of trajectory observation before the auction runs.
    pub observation_window: f64,
    /// Proximity-graph radius for behavior profiling, meters.
    pub mu: f64,
    /// Episode wall clock limit in simulated seconds.
    pub timeout: f64,
    /// Center-distance collision threshold, meters.
    pub collision_threshold: f64,
    /// Stillness speed for deadlock detection, m/s.
    pub deadlock_eps_speed: f64,
    /// Continuous stillness required before a deadlock is declared, seconds.
    pub deadlock_hold: f64,
    /// Optional observation-noise knob: std-dev of seeded Gaussian noise
    /// added to measured profiles before ordering (0 disables).
    pub zeta_noise_std: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            kind: ScenarioKind::Intersection4Way,
            lanes_per_approach: 2,
            n_agents: 4,
            aggressive: AggressiveSpec::Fraction(0.25),
            max_speed: 20.1,
            density_area: 4800.0,
            seed: 0,
            timestep: 0.1,
            strategy: OrderingStrategy::GamePlan,
            observation_window: 5.0,
            mu: 10.0,
            timeout: 120.0,
            collision_threshold: 2.0,
            deadlock_eps_speed: 0.1,
            deadlock_hold: 5.0,
            zeta_noise_std: 0.0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_agents == 0 {
            return Err(Error::invalid("n_agents must be >= 1"));
        }
        if self.lanes_per_approach == 0 {
            return Err(Error::invalid("lanes_per_approach must be >= 1"));
        }
        if !(self.timestep > 0.0) {
            return Err(Error::invalid("timestep must be positive"));
        }
        if !(self.max_speed > 0.0) {
            return Err(Error::invalid("max_speed must be positive"));
        }
        if !(self.observation_window > 0.0) {
            return Err(Error::invalid("observation window must be positive"));
        }
        self.aggressive.count_for(self.n_agents)?;
        Ok(())
    }
}

/// A collision between a pair of agents, reported once per contact episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub time: f64,
    pub a: AgentId,
    pub b: AgentId,
    pub distance: f64,
}

/// A detected stagnation episode: two or more active agents stationary with
/// the conflict zone empty for at least the hold time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeadlockEvent {
    /// When the stagnation began (both stopped, zone empty).
    pub start: f64,
    /// When the detector fired (start + hold).
    pub detected_at: f64,
    /// When an agent moved again, if the episode resolved.
    pub resolved_at: Option<f64>,
}

impl DeadlockEvent {
    /// Stagnation duration up to resolution (or `end` if unresolved).
    pub fn delay(&self, end: f64) -> f64 {
        self.resolved_at.unwrap_or(end) - self.start
    }
}

/// Per-agent record of the profiling + planning phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentRecord {
    pub id: AgentId,
    pub class: BehaviorClass,
    pub zeta: f64,
    /// 1-based turn index; absent for strategy `none`.
    pub turn: Option<usize>,
    pub defected: bool,
}

/// Outcome of one simulated episode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimOutcome {
    pub seed: u64,
    pub collisions: Vec<CollisionEvent>,
    pub deadlocks: Vec<DeadlockEvent>,
    /// Finishing agents and their time-to-goal in seconds, measured from
    /// the episode start (agents are already moving at spawn).
    pub time_to_goal: Vec<(AgentId, f64)>,
    pub all_finished: bool,
    pub success: bool,
    /// Time at which the episode ended (all finished, first collision, or timeout).
    pub episode_duration: f64,
    pub timed_out: bool,
    pub agents: Vec<AgentRecord>,
}

impl SimOutcome {
    pub fn collision_count(&self) -> usize {
        self.collisions.len()
    }

    pub fn deadlock_count(&self) -> usize {
        self.deadlocks.len()
    }
}

/// Behavior profiles measured over the observation phase only.
#[derive(Debug, Clone)]
pub struct ObservationOutcome {
    pub profiles: Vec<AgentRecord>,
    pub trajectories: Vec<crate::behavior::Trajectory>,
}

/// Runs the full two-phase episode to completion, collision, or timeout.
pub fn run_scenario(config: &ScenarioConfig) -> Result<SimOutcome> {
    let mut world = spawn_scenario(config)?;
    world.run_to_completion()
}

/// Runs only the observation phase and returns the measured profiles;
/// useful for studying the behavior-measurement layer on its own.
pub fn run_observation(config: &ScenarioConfig) -> Result<ObservationOutcome> {
    let mut world = spawn_scenario(config)?;
    world.run_observation_only()
}
