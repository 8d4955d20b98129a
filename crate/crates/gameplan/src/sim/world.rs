//! World state and the discrete-time stepper.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::auction::{
    self, BaselineAgent, StrategyTag, ValuationVector,
};
use crate::behavior::{self, Trajectory, TrajectorySample};
use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::AgentId;

use super::idm::{snap_accel, IdmParams};
use super::scenario::{spawn_plans, Scenario, VEHICLE_LENGTH};
use super::{
    AgentRecord, BehaviorClass, CollisionEvent, DeadlockEvent, ObservationOutcome,
    OrderingStrategy, ScenarioConfig, SimOutcome,
};

/// One vehicle in the world.
#[derive(Debug, Clone)]
pub struct Agent {
    pub id: AgentId,
    /// Index into the scenario's lane table.
    pub lane: usize,
    /// Arc position along the lane path, meters.
    pub arc: f64,
    pub speed: f64,
    pub accel: f64,
    pub class: BehaviorClass,
    pub idm: IdmParams,
    pub budget: f64,
    /// Unimpeded stop-mark arrival estimate from spawn time, seconds.
    pub arrival_estimate: f64,
    /// Stop-resolution delay for the uncoordinated aggressive program.
    pub patience: f64,
    /// Behavior profile measured over the observation window.
    pub zeta: f64,
    /// 1-based turn index once the planning phase has run.
    pub turn: Option<usize>,
    /// Impatience model: enters the zone alongside its predecessor.
    pub defects: bool,
    pub finished_at: Option<f64>,
    /// Set once the vehicle has fully left the conflict zone.
    pub exited_zone: bool,
    /// Lane front flag, refreshed every step.
    pub active: bool,
    stopped_since: Option<f64>,
    /// One-way latch: an impatient agent that broke a standoff keeps going.
    committed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Observation,
    Running,
}

#[derive(Debug, Clone, Copy)]
struct Stagnation {
    start: f64,
    fired: bool,
}

/// Full mutable episode state. A single run is strictly sequential;
/// distinct runs are independent.
#[derive(Debug, Clone)]
pub struct World {
    pub cfg: ScenarioConfig,
    pub scenario: Scenario,
    pub agents: Vec<Agent>,
    pub time: f64,
    phase: Phase,
    collisions: Vec<CollisionEvent>,
    deadlocks: Vec<DeadlockEvent>,
    contacts: HashSet<(u32, u32)>,
    zone_empty_since: Option<f64>,
    stagnation: Option<Stagnation>,
    trajectories: Vec<Vec<TrajectorySample>>,
    rng: ChaCha8Rng,
    tie_seed: u64,
}

/// Places agents on their lanes with seeded spacing, speeds, and behavior
/// classes. The returned world is in the observation phase.
pub fn spawn_scenario(cfg: &ScenarioConfig) -> Result<World> {
    cfg.validate()?;
    let scenario = Scenario::build(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let plans = spawn_plans(cfg, &scenario, &mut rng)?;

    let mut agents = Vec::with_capacity(plans.len());
    for (i, p) in plans.iter().enumerate() {
        let lane = &scenario.lanes[p.lane];
        let arc = lane.stop_arc - p.distance_to_stop;
        if arc < 0.0 {
            return Err(Error::Scenario(format!(
                "spawn distance {:.1} exceeds approach length",
                p.distance_to_stop
            )));
        }
        let idm = match p.class {
            BehaviorClass::Aggressive => IdmParams::aggressive(p.desired_speed),
            BehaviorClass::Conservative => IdmParams::conservative(p.desired_speed),
        };
        agents.push(Agent {
            id: AgentId(i as u32),
            lane: p.lane,
            arc,
            speed: p.init_speed,
            accel: 0.0,
            class: p.class,
            idm,
            budget: p.budget,
            arrival_estimate: p.arrival_estimate,
            patience: p.patience,
            zeta: 0.0,
            turn: None,
            defects: false,
            finished_at: None,
            exited_zone: false,
            active: false,
            stopped_since: None,
            committed: false,
        });
    }

    let tie_seed = rng.gen();
    let n = agents.len();
    let mut world = World {
        cfg: cfg.clone(),
        scenario,
        agents,
        time: 0.0,
        phase: Phase::Observation,
        collisions: Vec::new(),
        deadlocks: Vec::new(),
        contacts: HashSet::new(),
        zone_empty_since: Some(0.0),
        stagnation: None,
        trajectories: vec![Vec::new(); n],
        rng,
        tie_seed,
    };
    world.refresh_active();
    Ok(world)
}

impl World {
    pub fn position_of(&self, agent: &Agent) -> Point2 {
        self.scenario.lanes[agent.lane].path.at(agent.arc)
    }

    pub fn collisions(&self) -> &[CollisionEvent] {
        &self.collisions
    }

    pub fn deadlocks(&self) -> &[DeadlockEvent] {
        &self.deadlocks
    }

    pub fn is_running(&self) -> bool {
        self.phase == Phase::Running
    }

    pub fn all_finished(&self) -> bool {
        self.agents.iter().all(|a| a.finished_at.is_some())
    }

    fn in_zone(&self, agent: &Agent) -> bool {
        let lane = &self.scenario.lanes[agent.lane];
        agent.finished_at.is_none()
            && agent.arc >= lane.zone_entry_arc
            && agent.arc < lane.zone_exit_arc
    }

    /// Agents currently occupying the conflict zone.
    pub fn zone_occupants(&self) -> Vec<AgentId> {
        self.agents.iter().filter(|a| self.in_zone(a)).map(|a| a.id).collect()
    }

    fn zone_is_empty(&self) -> bool {
        self.agents.iter().all(|a| !self.in_zone(a))
    }

    fn refresh_active(&mut self) {
        let fronts: Vec<bool> = self
            .agents
            .iter()
            .map(|a| {
                a.finished_at.is_none()
                    && !self.agents.iter().any(|b| {
                        b.finished_at.is_none() && b.lane == a.lane && b.arc > a.arc
                    })
            })
            .collect();
        for (a, f) in self.agents.iter_mut().zip(fronts) {
            a.active = f;
        }
    }

    /// Nearest unfinished same-lane agent ahead: (gap, leader speed).
    fn leader_of(&self, idx: usize) -> Option<(f64, f64)> {
        let me = &self.agents[idx];
        self.agents
            .iter()
            .enumerate()
            .filter(|(j, b)| {
                *j != idx && b.finished_at.is_none() && b.lane == me.lane && b.arc > me.arc
            })
            .map(|(_, b)| (b.arc - me.arc - VEHICLE_LENGTH, b.speed))
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
    }

    /// Time another agent needs to reach its own zone entry, with stopped
    /// rivals treated as able to pull forward.
    fn time_to_zone(&self, agent: &Agent) -> f64 {
        let lane = &self.scenario.lanes[agent.lane];
        let dist = lane.zone_entry_arc - agent.arc;
        if dist <= 0.0 {
            return 0.0;
        }
        dist / agent.speed.max(4.0)
    }

    fn crossing_time_estimate(&self, agent: &Agent) -> f64 {
        let lane = &self.scenario.lanes[agent.lane];
        (lane.zone_exit_arc - agent.arc).max(0.0) / agent.speed.max(5.0)
    }

    /// Another agent that might claim the zone within `horizon` seconds.
    fn has_contender(&self, idx: usize, horizon: f64) -> bool {
        self.agents.iter().enumerate().any(|(j, b)| {
            j != idx
                && b.finished_at.is_none()
                && !b.exited_zone
                && self.time_to_zone(b) < horizon
        })
    }

    fn must_hold(&self, idx: usize) -> bool {
        let agent = &self.agents[idx];
        let lane = &self.scenario.lanes[agent.lane];
        if agent.finished_at.is_some() || agent.arc > lane.stop_arc + 0.05 {
            // committed past the line
            return false;
        }
        match self.phase {
            Phase::Observation => true,
            Phase::Running => match self.cfg.strategy {
                OrderingStrategy::None => self.behavior_program_holds(idx),
                _ => {
                    // a defector that has picked its moment keeps going
                    if agent.committed {
                        return false;
                    }
                    let turn = agent.turn.unwrap_or(1);
                    self.agents.iter().any(|b| {
                        b.id != agent.id
                            && !b.exited_zone
                            && b.finished_at.is_none()
                            && b.turn.map(|t| t < turn).unwrap_or(false)
                    })
                }
            },
        }
    }

    /// Uncoordinated behavior programs: conservatives yield while anyone
    /// could contest the zone; aggressives yield on a tighter margin and
    /// break standoffs after their patience runs out.
    fn behavior_program_holds(&self, idx: usize) -> bool {
        let agent = &self.agents[idx];
        if agent.committed {
            return false;
        }
        let zone_empty = self.zone_is_empty();
        let crossing = self.crossing_time_estimate(agent);
        let margin = match agent.class {
            BehaviorClass::Conservative => 3.0,
            BehaviorClass::Aggressive => 0.8,
        };
        !(zone_empty && !self.has_contender(idx, margin + crossing))
    }

    /// Impatience model for the baseline strategies: a flagged defector
    /// waiting at its line moves out the moment an earlier-turn agent on a
    /// crossing path is about to reach their shared conflict point,
    /// misjudging the gap to exactly zero. Latches `committed`.
    fn latch_defector_launches(&mut self) {
        if self.phase != Phase::Running {
            return;
        }
        let mut launch = Vec::new();
        for (i, agent) in self.agents.iter().enumerate() {
            // only the lane front can jump; queued defectors are boxed in
            if !agent.defects || agent.committed || agent.finished_at.is_some() || !agent.active
            {
                continue;
            }
            let lane = &self.scenario.lanes[agent.lane];
            if lane.stop_arc - agent.arc > 28.0 {
                continue; // too far out to judge the gap
            }
            let turn = agent.turn.unwrap_or(1);
            let dt = self.cfg.timestep;
            // soonest free-moving earlier-turn agent on a crossing path;
            // held agents are braking for their line, not coming through
            let mut target: Option<(f64, f64)> = None; // (t_other, t_self)
            for (j, other) in self.agents.iter().enumerate() {
                if other.id == agent.id
                    || other.exited_zone
                    || other.finished_at.is_some()
                    || other.turn.map(|t| t >= turn).unwrap_or(true)
                    || other.speed < 0.5
                    || self.must_hold(j)
                {
                    continue;
                }
                let Some((own_arc, other_arc)) = self.scenario.crossing(agent.lane, other.lane)
                else {
                    continue;
                };
                if other.arc >= other_arc {
                    continue; // already past the shared point
                }
                let t_other =
                    free_road_eta(other_arc - other.arc, other.speed, other.idm.desired_speed, dt);
                let t_self = free_road_eta(
                    (own_arc - agent.arc).max(0.0),
                    agent.speed,
                    agent.idm.desired_speed,
                    dt,
                );
                if target.map(|(t, _)| t_other < t).unwrap_or(true) {
                    target = Some((t_other, t_self));
                }
            }
            if let Some((t_other, t_self)) = target {
                if t_other <= t_self + 0.25 && t_other >= t_self - 0.15 {
                    launch.push(i);
                }
            }
        }
        for i in launch {
            self.agents[i].committed = true;
        }
    }

    /// Impatient standoff resolution: an aggressive agent stopped at its
    /// line with the zone empty for longer than its patience commits to
    /// crossing and does not yield again.
    fn latch_impatient_movers(&mut self) {
        if self.cfg.strategy != OrderingStrategy::None || self.phase != Phase::Running {
            return;
        }
        let zone_empty = self.zone_is_empty();
        if !zone_empty {
            return;
        }
        let mut latch = Vec::new();
        for (i, agent) in self.agents.iter().enumerate() {
            if agent.committed
                || agent.class != BehaviorClass::Aggressive
                || agent.finished_at.is_some()
            {
                continue;
            }
            let lane = &self.scenario.lanes[agent.lane];
            let at_line = lane.stop_arc - agent.arc < 8.0;
            if at_line {
                if let Some(since) = agent.stopped_since {
                    if self.time - since >= agent.patience {
                        latch.push(i);
                    }
                }
            }
        }
        for i in latch {
            self.agents[i].committed = true;
        }
    }

    /// Advances the world by one configured timestep.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.cfg.timestep;
        if self.phase == Phase::Observation {
            self.record_observation_samples();
            if self.time + 1e-9 >= self.cfg.observation_window {
                self.finish_observation()?;
                self.phase = Phase::Running;
            }
        }
        self.refresh_active();
        self.latch_impatient_movers();
        self.latch_defector_launches();

        // decide accelerations from the frozen current state
        let n = self.agents.len();
        let mut accels = vec![0.0f64; n];
        for i in 0..n {
            if self.agents[i].finished_at.is_some() {
                continue;
            }
            let agent = &self.agents[i];
            let mut a = agent.idm.accel(agent.speed, self.leader_of(i));
            if self.must_hold(i) {
                let lane = &self.scenario.lanes[agent.lane];
                let gap = lane.stop_arc - agent.arc;
                a = a.min(agent.idm.accel(agent.speed, Some((gap, 0.0))));
            }
            accels[i] = snap_accel(a);
        }

        // integrate
        let t_next = self.time + dt;
        for i in 0..n {
            if self.agents[i].finished_at.is_some() {
                continue;
            }
            let hold = self.must_hold(i);
            let lane_stop = self.scenario.lanes[self.agents[i].lane].stop_arc;
            let cap = self.agents[i].idm.desired_speed * 1.04;
            let agent = &mut self.agents[i];
            let prev_speed = agent.speed;
            agent.accel = accels[i];
            agent.speed = (agent.speed + agent.accel * dt).clamp(0.0, cap);
            agent.arc += agent.speed * dt;
            if hold && agent.arc > lane_stop {
                // discretization overshoot: pin to the mark, scrub speed at
                // the braking limit so per-step speed changes stay bounded
                agent.arc = lane_stop;
                agent.speed = (prev_speed - 3.0 * dt).max(0.0);
            }
        }
        self.time = t_next;

        // bookkeeping: finishing, zone exits, stillness
        for i in 0..n {
            let lane = &self.scenario.lanes[self.agents[i].lane];
            let agent = &mut self.agents[i];
            if agent.finished_at.is_none() && agent.arc >= lane.goal_arc {
                agent.finished_at = Some(self.time);
                agent.exited_zone = true;
            }
            if agent.arc >= lane.zone_exit_arc {
                agent.exited_zone = true;
            }
            if agent.speed < self.cfg.deadlock_eps_speed {
                if agent.stopped_since.is_none() {
                    agent.stopped_since = Some(self.time);
                }
            } else {
                agent.stopped_since = None;
            }
        }
        self.refresh_active();

        if self.zone_is_empty() {
            if self.zone_empty_since.is_none() {
                self.zone_empty_since = Some(self.time);
            }
        } else {
            self.zone_empty_since = None;
        }

        self.detect_collisions_step();
        self.track_stagnation();
        Ok(())
    }

    /// Pairwise contact check with once-per-contact-episode reporting.
    fn detect_collisions_step(&mut self) {
        let threshold = self.cfg.collision_threshold;
        let pairs = collision_pairs(self, threshold);
        let mut still_touching = HashSet::new();
        for (a, b, dist) in pairs {
            let key = (a.0.min(b.0), a.0.max(b.0));
            still_touching.insert(key);
            if self.contacts.insert(key) {
                self.collisions.push(CollisionEvent { time: self.time, a, b, distance: dist });
            }
        }
        // release contacts once the pair has separated with hysteresis
        let release: Vec<(u32, u32)> = self
            .contacts
            .iter()
            .filter(|key| !still_touching.contains(*key))
            .filter(|(x, y)| {
                let (a, b) = (&self.agents[*x as usize], &self.agents[*y as usize]);
                a.finished_at.is_some()
                    || b.finished_at.is_some()
                    || self.position_of(a).distance(&self.position_of(b)) > threshold + 0.5
            })
            .copied()
            .collect();
        for key in release {
            self.contacts.remove(&key);
        }
    }

    fn track_stagnation(&mut self) {
        let hold = self.cfg.deadlock_hold;
        let mut stopped: Vec<f64> = self
            .agents
            .iter()
            .filter(|a| a.active && a.finished_at.is_none())
            .filter_map(|a| a.stopped_since)
            .collect();
        stopped.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let cond = stopped.len() >= 2 && self.zone_empty_since.is_some();
        if cond {
            let start = stopped[1].max(self.zone_empty_since.unwrap());
            let stag = self.stagnation.get_or_insert(Stagnation { start, fired: false });
            if !stag.fired && self.time - stag.start >= hold {
                stag.fired = true;
                self.deadlocks.push(DeadlockEvent {
                    start: stag.start,
                    detected_at: self.time,
                    resolved_at: None,
                });
            }
        } else if let Some(stag) = self.stagnation.take() {
            if stag.fired {
                if let Some(ev) = self.deadlocks.last_mut() {
                    if ev.resolved_at.is_none() {
                        ev.resolved_at = Some(self.time);
                    }
                }
            }
        }
    }

    /// Current stagnation duration, if two or more active agents are
    /// stationary with the zone empty.
    pub fn stagnation_duration(&self) -> Option<f64> {
        self.stagnation.map(|s| self.time - s.start)
    }

    fn record_observation_samples(&mut self) {
        for (i, agent) in self.agents.iter().enumerate() {
            self.trajectories[i].push(TrajectorySample {
                agent_id: agent.id,
                time: self.time,
                position: self.scenario.lanes[agent.lane].path.at(agent.arc),
                speed: agent.speed,
            });
        }
    }

    /// Measured trajectories of the observation phase.
    pub fn observation_trajectories(&self) -> Result<Vec<Trajectory>> {
        self.trajectories
            .iter()
            .enumerate()
            .map(|(i, samples)| Trajectory::new(AgentId(i as u32), samples.clone()))
            .collect()
    }

    /// End of the observation window: measure profiles, run the configured
    /// ordering strategy, and flag impatience-model defectors.
    fn finish_observation(&mut self) -> Result<()> {
        let window = (0.0, self.cfg.observation_window);
        let trajectories = self.observation_trajectories()?;
        for i in 0..self.agents.len() {
            let id = self.agents[i].id;
            let profile =
                behavior::compute_behavior_profile(&trajectories, id, self.cfg.mu, window)?;
            let mut zeta = profile.zeta;
            if self.cfg.zeta_noise_std > 0.0 {
                zeta = (zeta + self.cfg.zeta_noise_std * gaussian(&mut self.rng)).max(0.0);
            }
            self.agents[i].zeta = zeta;
        }
        if self.cfg.strategy == OrderingStrategy::None {
            return Ok(());
        }

        // global priority ranking by the configured bidding strategy
        let ranking = self.global_ranking()?;
        let rank_of = |id: AgentId| ranking.by_turn.iter().position(|&a| a == id).unwrap();

        // lane-queue-constrained list scheduling: repeatedly pick the
        // best-ranked agent among the current lane fronts, so an agent's
        // turn never precedes the turn of anyone ahead of it in its lane
        let mut queues: Vec<Vec<usize>> = vec![Vec::new(); self.scenario.lanes.len()];
        for (i, a) in self.agents.iter().enumerate() {
            queues[a.lane].push(i);
        }
        for q in &mut queues {
            q.sort_by(|&x, &y| {
                self.agents[y].arc.partial_cmp(&self.agents[x].arc).unwrap()
            });
        }
        let mut heads = vec![0usize; queues.len()];
        let mut turn = 1usize;
        while turn <= self.agents.len() {
            let pick = queues
                .iter()
                .enumerate()
                .filter(|(l, q)| heads[*l] < q.len())
                .map(|(l, q)| (l, q[heads[l]]))
                .min_by_key(|(_, i)| rank_of(self.agents[*i].id))
                .expect("unscheduled agent remains");
            heads[pick.0] += 1;
            self.agents[pick.1].turn = Some(turn);
            turn += 1;
        }

        self.flag_defectors()?;
        Ok(())
    }

    fn global_ranking(&mut self) -> Result<crate::auction::TurnOrdering> {
        match self.cfg.strategy {
            OrderingStrategy::GamePlan => {
                let profiles = ValuationVector::new(
                    self.agents.iter().map(|a| (a.id, a.zeta)).collect(),
                )?;
                auction::gameplan_ordering(&profiles, self.tie_seed)
            }
            OrderingStrategy::Economic => {
                // willingness to pay rises with measured impatience, and
                // patient drivers hold part of their budget back
                let bidders: Vec<BaselineAgent> = self
                    .agents
                    .iter()
                    .map(|a| {
                        let bid = match a.class {
                            BehaviorClass::Aggressive => a.budget + 4.0 * a.zeta,
                            BehaviorClass::Conservative => 0.78 * a.budget,
                        };
                        BaselineAgent { id: a.id, budget: Some(bid), arrival_time: None }
                    })
                    .collect();
                auction::baseline_ordering(StrategyTag::Economic, &bidders, self.tie_seed)
            }
            OrderingStrategy::Fifo => {
                let bidders: Vec<BaselineAgent> = self
                    .agents
                    .iter()
                    .map(|a| BaselineAgent {
                        id: a.id,
                        budget: None,
                        arrival_time: Some(a.arrival_estimate),
                    })
                    .collect();
                auction::baseline_ordering(StrategyTag::Fifo, &bidders, self.tie_seed)
            }
            OrderingStrategy::Random => {
                let bidders: Vec<BaselineAgent> = self
                    .agents
                    .iter()
                    .map(|a| BaselineAgent { id: a.id, budget: None, arrival_time: None })
                    .collect();
                auction::baseline_ordering(StrategyTag::Random, &bidders, self.tie_seed)
            }
            OrderingStrategy::None => unreachable!("no ranking for strategy none"),
        }
    }

    /// Impatience model for the baseline strategies: an aggressive agent
    /// defects when some earlier slot is held by a strictly less aggressive
    /// agent, i.e. its overbid gain toward that slot is positive.
    /// Behavior-based ordering never triggers it (overbidding loses there).
    fn flag_defectors(&mut self) -> Result<()> {
        if !matches!(
            self.cfg.strategy,
            OrderingStrategy::Economic | OrderingStrategy::Fifo | OrderingStrategy::Random
        ) {
            return Ok(());
        }
        let tau = self.cfg.kind.crossing_tau();
        let mut zeta_by_turn = vec![0.0f64; self.agents.len() + 1];
        for a in &self.agents {
            zeta_by_turn[a.turn.unwrap()] = a.zeta;
        }
        for i in 0..self.agents.len() {
            let agent = &self.agents[i];
            if agent.class != BehaviorClass::Aggressive {
                continue;
            }
            let k = agent.turn.unwrap();
            if k < 2 {
                continue;
            }
            // gain from jumping one slot, with the displaced occupant's
            // profile standing in as the bid that bought that slot
            let gain = auction::economic_manipulation_gain(
                agent.zeta,
                zeta_by_turn[k - 1],
                (k - 1) as f64 * tau,
                k as f64 * tau,
            )?;
            self.agents[i].defects = gain > 0.0;
        }
        Ok(())
    }

    /// Runs until everyone finished, the first collision, or timeout.
    pub fn run_to_completion(&mut self) -> Result<SimOutcome> {
        let mut timed_out = false;
        loop {
            if self.all_finished() {
                break;
            }
            self.step()?;
            if !self.collisions.is_empty() {
                break;
            }
            if self.time >= self.cfg.timeout {
                timed_out = true;
                break;
            }
        }
        if timed_out && self.collisions.is_empty() && self.deadlocks.is_empty() {
            // unfinished episodes without a detected cause count as deadlock
            self.deadlocks.push(DeadlockEvent {
                start: self.time,
                detected_at: self.time,
                resolved_at: None,
            });
        }
        Ok(self.outcome(timed_out))
    }

    /// Steps through the observation window only and reports the profiles.
    pub fn run_observation_only(&mut self) -> Result<ObservationOutcome> {
        while self.phase == Phase::Observation {
            self.step()?;
        }
        Ok(ObservationOutcome {
            profiles: self.agent_records(),
            trajectories: self.observation_trajectories()?,
        })
    }

    /// True if any flagged defector latched a launch this episode.
    pub fn any_defector_launched(&self) -> bool {
        self.agents.iter().any(|a| a.defects && a.committed)
    }

    fn agent_records(&self) -> Vec<AgentRecord> {
        self.agents
            .iter()
            .map(|a| AgentRecord {
                id: a.id,
                class: a.class,
                zeta: a.zeta,
                turn: a.turn,
                defected: a.defects,
            })
            .collect()
    }

    fn outcome(&self, timed_out: bool) -> SimOutcome {
        let time_to_goal: Vec<(AgentId, f64)> = self
            .agents
            .iter()
            .filter_map(|a| a.finished_at.map(|t| (a.id, t)))
            .collect();
        let all_finished = self.all_finished();
        let success =
            self.collisions.is_empty() && self.deadlocks.is_empty() && all_finished;
        SimOutcome {
            seed: self.cfg.seed,
            collisions: self.collisions.clone(),
            deadlocks: self.deadlocks.clone(),
            time_to_goal,
            all_finished,
            success,
            episode_duration: self.time,
            timed_out,
            agents: self.agent_records(),
        }
    }

    /// Test hook: overwrite turn assignments (possibly with a corrupt,
    /// non-permutation ordering) after the planning phase has run.
    #[doc(hidden)]
    pub fn force_turns(&mut self, turns: &[(AgentId, usize)], defects: &[AgentId]) {
        for agent in &mut self.agents {
            if let Some((_, t)) = turns.iter().find(|(id, _)| *id == agent.id) {
                agent.turn = Some(*t);
            }
            agent.defects = defects.contains(&agent.id);
        }
    }
}

/// Time to cover `dist` under the discrete free-road law, mirroring the
/// stepper's snapped acceleration profile.
fn free_road_eta(dist: f64, v0: f64, v_des: f64, dt: f64) -> f64 {
    if dist <= 0.0 {
        return 0.0;
    }
    let params = IdmParams { desired_speed: v_des, ..IdmParams::aggressive(v_des) };
    let mut v = v0;
    let mut s = 0.0;
    let mut t = 0.0;
    while s < dist && t < 30.0 {
        let a = super::idm::snap_accel(params.accel(v, None));
        v = (v + a * dt).clamp(0.0, v_des * 1.04);
        s += v * dt;
        t += dt;
    }
    t
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Unordered agent pairs currently closer than `threshold` inside or near
/// the conflict zone, with their center distances.
pub fn collision_pairs(world: &World, threshold: f64) -> Vec<(AgentId, AgentId, f64)> {
    let mut out = Vec::new();
    let near: Vec<(usize, Point2)> = world
        .agents
        .iter()
        .enumerate()
        .filter(|(_, a)| a.finished_at.is_none())
        .filter(|(_, a)| {
            let lane = &world.scenario.lanes[a.lane];
            a.arc >= lane.zone_entry_arc - 6.0 && a.arc <= lane.zone_exit_arc + 6.0
        })
        .map(|(i, a)| (i, world.position_of(a)))
        .collect();
    for (x, (i, pi)) in near.iter().enumerate() {
        for (j, pj) in near.iter().skip(x + 1) {
            let d = pi.distance(pj);
            if d < threshold {
                out.push((world.agents[*i].id, world.agents[*j].id, d));
            }
        }
    }
    out
}

/// Current contact events at the given threshold. Within a stepped episode
/// the world reports each pair once per contact episode; this standalone
/// check reports the pairs in contact right now.
pub fn detect_collision(world: &World, threshold: f64) -> Vec<CollisionEvent> {
    collision_pairs(world, threshold)
        .into_iter()
        .map(|(a, b, distance)| CollisionEvent { time: world.time, a, b, distance })
        .collect()
}

/// True iff at least two active agents have been stationary (speed below
/// `eps_speed`) for `hold` seconds while the conflict zone stayed empty.
/// The world's stillness bookkeeping uses the configured epsilon; passing a
/// different one re-evaluates against current speeds conservatively.
pub fn detect_deadlock(world: &World, eps_speed: f64, hold: f64) -> bool {
    let still_enough = world
        .agents
        .iter()
        .filter(|a| a.active && a.finished_at.is_none() && a.speed < eps_speed)
        .count()
        >= 2;
    still_enough && world.stagnation_duration().map(|d| d >= hold).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{AggressiveSpec, ScenarioKind};

    fn base_cfg() -> ScenarioConfig {
        ScenarioConfig::default()
    }

    #[test]
    fn spawn_is_deterministic() {
        let cfg = ScenarioConfig { seed: 7, ..base_cfg() };
        let w1 = spawn_scenario(&cfg).unwrap();
        let w2 = spawn_scenario(&cfg).unwrap();
        assert_eq!(w1.agents.len(), w2.agents.len());
        for (a, b) in w1.agents.iter().zip(&w2.agents) {
            assert_eq!(a.arc, b.arc);
            assert_eq!(a.speed, b.speed);
            assert_eq!(a.class, b.class);
            assert_eq!(a.budget, b.budget);
        }
    }

    #[test]
    fn spawn_quarter_fraction_gives_one_aggressive() {
        let cfg = ScenarioConfig { seed: 7, ..base_cfg() };
        let w = spawn_scenario(&cfg).unwrap();
        let agg =
            w.agents.iter().filter(|a| a.class == BehaviorClass::Aggressive).count();
        assert_eq!(agg, 1);
    }

    #[test]
    fn single_agent_crosses_freely_and_respects_limit() {
        let cfg = ScenarioConfig {
            n_agents: 1,
            aggressive: AggressiveSpec::Count(0),
            strategy: OrderingStrategy::None,
            seed: 3,
            ..base_cfg()
        };
        let mut w = spawn_scenario(&cfg).unwrap();
        let v0 = w.agents[0].speed;
        let out = w.run_to_completion().unwrap();
        assert!(out.success, "lone agent must finish cleanly");
        assert_eq!(out.time_to_goal.len(), 1);
        // conservative desired speed stays below the limit
        assert!(w.agents[0].idm.desired_speed <= cfg.max_speed);
        assert!(v0 <= cfg.max_speed);
    }

    #[test]
    fn kinematics_bounded_by_discrete_accel() {
        let cfg = ScenarioConfig { seed: 11, ..base_cfg() };
        let mut w = spawn_scenario(&cfg).unwrap();
        let mut prev: Vec<f64> = w.agents.iter().map(|a| a.speed).collect();
        for _ in 0..600 {
            w.step().unwrap();
            for (a, p) in w.agents.iter().zip(&prev) {
                assert!(a.speed >= 0.0);
                assert!(
                    (a.speed - p).abs() <= 3.0 * cfg.timestep + 1e-9,
                    "speed change {} exceeds max accel",
                    (a.speed - p).abs()
                );
            }
            prev = w.agents.iter().map(|a| a.speed).collect();
        }
    }

    #[test]
    fn waiting_agent_stops_at_the_line() {
        let cfg = ScenarioConfig { seed: 5, n_agents: 4, ..base_cfg() };
        let mut w = spawn_scenario(&cfg).unwrap();
        let mut saw_wait = false;
        for _ in 0..1500 {
            w.step().unwrap();
            for a in &w.agents {
                let lane = &w.scenario.lanes[a.lane];
                // resting just short of the line (jam gap), not in the zone
                if a.turn.map(|t| t > 1).unwrap_or(false)
                    && !a.defects
                    && a.finished_at.is_none()
                    && a.speed < 0.05
                    && lane.stop_arc - a.arc < 6.0
                    && a.arc <= lane.stop_arc + 1e-9
                {
                    saw_wait = true;
                }
            }
            if w.all_finished() {
                break;
            }
        }
        assert!(saw_wait, "later turns should pause at the stop line");
        assert!(w.all_finished());
    }

    #[test]
    fn corrupt_simultaneous_green_collides() {
        let cfg = ScenarioConfig { seed: 9, n_agents: 4, ..base_cfg() };
        let mut w = spawn_scenario(&cfg).unwrap();
        // run the planning phase
        while !w.is_running() {
            w.step().unwrap();
        }
        // pick two lane fronts on crossing approaches and give both the green
        let fronts: Vec<(AgentId, usize)> = w
            .agents
            .iter()
            .filter(|x| x.active)
            .map(|x| (x.id, w.scenario.lanes[x.lane].approach))
            .collect();
        let (a, ap_a) = fronts[0];
        let b = fronts
            .iter()
            .find(|(_, ap)| *ap != ap_a && (*ap + ap_a) % 2 == 1)
            .map(|(id, _)| *id)
            .expect("perpendicular front exists");
        let turns: Vec<(AgentId, usize)> = w
            .agents
            .iter()
            .map(|x| if x.id == a || x.id == b { (x.id, 1) } else { (x.id, 2) })
            .collect();
        w.force_turns(&turns, &[]);
        // symmetric kinematics so both reach the crossing point together
        let (lane_a, lane_b) = {
            let fa = w.agents.iter().find(|x| x.id == a).unwrap().lane;
            let fb = w.agents.iter().find(|x| x.id == b).unwrap().lane;
            (fa, fb)
        };
        let (cross_a, cross_b) = w
            .scenario
            .crossing(lane_a, lane_b)
            .expect("perpendicular paths cross");
        for agent in &mut w.agents {
            if agent.id == a || agent.id == b {
                let cross = if agent.id == a { cross_a } else { cross_b };
                agent.arc = cross - 40.0;
                agent.speed = 10.0;
                agent.idm.desired_speed = 10.0;
            }
        }
        for _ in 0..3000 {
            w.step().unwrap();
            if !w.collisions().is_empty() {
                break;
            }
        }
        assert!(
            !w.collisions().is_empty(),
            "two simultaneous greens on crossing paths must collide"
        );
    }

    #[test]
    fn collision_pair_examples() {
        let cfg = base_cfg();
        let mut w = spawn_scenario(&cfg).unwrap();
        // park three agents around the zone center by direct placement
        let set_pos = |w: &mut World, idx: usize, lane: usize, arc: f64| {
            w.agents[idx].lane = lane;
            w.agents[idx].arc = arc;
        };
        // lane 0: west->east inner lane (y = -1.75); arc = reach + x
        let reach = w.scenario.lanes[0].path.length() / 2.0;
        set_pos(&mut w, 0, 0, reach + 0.25); // (0.25, -1.75)
        // lane for south->north inner (x = 1.75): find it
        let south_lane = w
            .scenario
            .lanes
            .iter()
            .position(|l| l.approach == 1 && l.lane_index == 0)
            .unwrap();
        set_pos(&mut w, 1, south_lane, reach - 1.75); // (1.75, -1.75)
        // far agent
        set_pos(&mut w, 2, 0, reach - 40.0);
        set_pos(&mut w, 3, 0, 0.0);

        let pairs = collision_pairs(&w, 2.0);
        assert_eq!(pairs.len(), 1, "one overlapping pair expected: {pairs:?}");
        assert!((pairs[0].2 - 1.5).abs() < 1e-9);

        // move them apart: no events
        set_pos(&mut w, 1, south_lane, reach - 6.0);
        assert!(collision_pairs(&w, 2.0).is_empty());

        // three mutually overlapping agents -> exactly 3 pair events
        set_pos(&mut w, 0, 0, reach + 0.0);
        set_pos(&mut w, 1, south_lane, reach - 1.75 + 0.5);
        set_pos(&mut w, 2, 0, reach + 1.0);
        let pairs = collision_pairs(&w, 3.5);
        assert_eq!(pairs.len(), 3);
    }

    #[test]
    fn merge_without_ordering_deadlocks_and_resolves() {
        let cfg = ScenarioConfig {
            kind: ScenarioKind::Merge,
            lanes_per_approach: 1,
            n_agents: 2,
            aggressive: AggressiveSpec::Count(1),
            strategy: OrderingStrategy::None,
            seed: 21,
            ..base_cfg()
        };
        let out = crate::sim::run_scenario(&cfg).unwrap();
        assert!(!out.deadlocks.is_empty(), "mutual yield must be detected");
        let delay = out.deadlocks[0].delay(out.episode_duration);
        assert!(delay >= 5.0, "stagnation lasted only {delay}");
        assert!(out.all_finished, "the aggressive agent resolves the standoff");
        assert!(out.collisions.is_empty());
    }

    #[test]
    fn two_conservatives_without_ordering_deadlock_permanently() {
        let cfg = ScenarioConfig {
            kind: ScenarioKind::Merge,
            lanes_per_approach: 1,
            n_agents: 2,
            aggressive: AggressiveSpec::Count(0),
            strategy: OrderingStrategy::None,
            seed: 4,
            timeout: 40.0,
            ..base_cfg()
        };
        let out = crate::sim::run_scenario(&cfg).unwrap();
        assert!(!out.deadlocks.is_empty());
        assert!(!out.all_finished);
        assert!(out.timed_out);
        assert!(!out.success);
    }
}
