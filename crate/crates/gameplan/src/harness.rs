//! Experiment harness: seeded sweeps over the scenario grid, rate
//! aggregation, strategy comparisons, and machine-readable reports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::sim::{
    run_scenario, AggressiveSpec, OrderingStrategy, ScenarioConfig, ScenarioKind,
};

/// Grid of sweep cells: the cross product of all axes, each cell run
/// `runs_per_cell` times with consecutive seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub strategies: Vec<OrderingStrategy>,
    pub aggressive_fractions: Vec<f64>,
    pub aggressive_counts: Vec<usize>,
    pub n_agents: Vec<usize>,
    pub max_speeds: Vec<f64>,
    pub runs_per_cell: usize,
    pub base_seed: u64,
    pub scenario: ScenarioKind,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            strategies: vec![
                OrderingStrategy::GamePlan,
                OrderingStrategy::Economic,
                OrderingStrategy::Fifo,
                OrderingStrategy::Random,
            ],
            aggressive_fractions: vec![0.20, 0.25, 0.33, 0.50],
            aggressive_counts: vec![1, 2],
            n_agents: vec![4, 6, 8, 10],
            // 45 mph and 60 mph
            max_speeds: vec![20.1, 26.8],
            runs_per_cell: 500,
            base_seed: 1,
            scenario: ScenarioKind::Intersection4Way,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.runs_per_cell == 0 {
            return Err(Error::invalid("runs_per_cell must be >= 1"));
        }
        if self.strategies.is_empty()
            || self.aggressive_fractions.is_empty()
            || self.aggressive_counts.is_empty()
            || self.n_agents.is_empty()
            || self.max_speeds.is_empty()
        {
            return Err(Error::invalid("sweep grid has an empty axis"));
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<CellKey> {
        let mut cells = Vec::new();
        for &strategy in &self.strategies {
            for &fraction in &self.aggressive_fractions {
                for &count in &self.aggressive_counts {
                    for &n in &self.n_agents {
                        for &speed in &self.max_speeds {
                            cells.push(CellKey { strategy, fraction, count, n_agents: n, max_speed: speed });
                        }
                    }
                }
            }
        }
        cells
    }
}

/// Identity of one sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellKey {
    pub strategy: OrderingStrategy,
    pub fraction: f64,
    pub count: usize,
    pub n_agents: usize,
    pub max_speed: f64,
}

impl CellKey {
    /// Fraction and count axes combine to the per-cell aggressive head
    /// count: whichever implies more aggressive agents wins.
    pub fn aggressive_count(&self) -> usize {
        let by_fraction = (self.fraction * self.n_agents as f64).round() as usize;
        by_fraction.max(self.count).min(self.n_agents)
    }

    pub fn config(&self, spec: &SweepSpec, seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            kind: spec.scenario,
            n_agents: self.n_agents,
            aggressive: AggressiveSpec::Count(self.aggressive_count()),
            max_speed: self.max_speed,
            seed,
            strategy: self.strategy,
            ..ScenarioConfig::default()
        }
    }

    /// Strategy-independent identity, used to match cells across strategies.
    pub fn scenario_key(&self) -> (u64, usize, usize, u64) {
        (self.fraction.to_bits(), self.count, self.n_agents, self.max_speed.to_bits())
    }
}

/// Aggregated metrics of one cell. Rates are episode-level percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub cell: CellKey,
    pub episodes: usize,
    pub collision_rate: f64,
    pub deadlock_rate: f64,
    pub success_rate: f64,
    /// Mean episode completion time over successful episodes, seconds.
    pub mean_ttg: f64,
    /// 95% normal-approximation halfwidth of the collision rate,
    /// percentage points.
    pub ci_halfwidth: f64,
    pub defection_episodes: usize,
}

/// Runs every cell of the grid. Episodes use `seed = base_seed + index`
/// within their cell, so the whole table is reproducible from the spec.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<MetricsRow>> {
    spec.validate()?;
    let cells = spec.cells();
    let rows: Result<Vec<MetricsRow>> = cells
        .par_iter()
        .map(|cell| run_cell(spec, cell))
        .collect();
    let mut rows = rows?;
    rows.sort_by(|a, b| {
        let ka = (format!("{}", a.cell.strategy), a.cell.scenario_key());
        let kb = (format!("{}", b.cell.strategy), b.cell.scenario_key());
        ka.partial_cmp(&kb).unwrap()
    });
    Ok(rows)
}

fn run_cell(spec: &SweepSpec, cell: &CellKey) -> Result<MetricsRow> {
    let runs = spec.runs_per_cell;
    let mut collision_eps = 0usize;
    let mut deadlock_eps = 0usize;
    let mut success_eps = 0usize;
    let mut defection_eps = 0usize;
    let mut ttg_sum = 0.0;
    let mut ttg_n = 0usize;
    for i in 0..runs {
        let cfg = cell.config(spec, spec.base_seed + i as u64);
        let out = run_scenario(&cfg).map_err(|e| {
            Error::Scenario(format!(
                "cell {:?} episode seed {} failed: {e}",
                cell,
                spec.base_seed + i as u64
            ))
        })?;
        let collided = !out.collisions.is_empty();
        let deadlocked = !out.deadlocks.is_empty();
        if collided {
            collision_eps += 1;
        }
        if deadlocked {
            deadlock_eps += 1;
        }
        if out.success {
            success_eps += 1;
            ttg_sum += out.episode_duration;
            ttg_n += 1;
        }
        if out.agents.iter().any(|a| a.defected) {
            defection_eps += 1;
        }
    }
    let pct = |k: usize| 100.0 * k as f64 / runs as f64;
    let p = collision_eps as f64 / runs as f64;
    let ci = 100.0 * 1.96 * (p * (1.0 - p) / runs as f64).sqrt();
    Ok(MetricsRow {
        cell: *cell,
        episodes: runs,
        collision_rate: pct(collision_eps),
        deadlock_rate: pct(deadlock_eps),
        success_rate: pct(success_eps),
        mean_ttg: if ttg_n > 0 { ttg_sum / ttg_n as f64 } else { f64::NAN },
        ci_halfwidth: ci,
        defection_episodes: defection_eps,
    })
}

/// Verdict for one adjacent strategy pair within a matched cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairVerdict {
    OrderedStrict,
    Tie,
    /// Wrong direction but confidence intervals overlap.
    Inconclusive,
    /// Wrong direction with disjoint confidence intervals.
    Violation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairComparison {
    pub lower: OrderingStrategy,
    pub higher: OrderingStrategy,
    pub lower_rate: f64,
    pub higher_rate: f64,
    pub verdict: PairVerdict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellComparison {
    pub fraction: f64,
    pub count: usize,
    pub n_agents: usize,
    pub max_speed: f64,
    pub pairs: Vec<PairComparison>,
    pub strictly_ordered: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderingReport {
    pub cells: Vec<CellComparison>,
    pub strictly_ordered_cells: usize,
    pub violations: usize,
    pub pass: bool,
}

/// Expected collision-rate ordering of the strategies, safest first.
pub const STRATEGY_ORDER: [OrderingStrategy; 4] = [
    OrderingStrategy::GamePlan,
    OrderingStrategy::Economic,
    OrderingStrategy::Fifo,
    OrderingStrategy::Random,
];

/// Checks, per matched cell, that collision rates respect
/// gameplan <= economic <= fifo <= random. Wrong-direction pairs whose
/// confidence intervals overlap are flagged inconclusive, not violations.
pub fn compare_strategies(table: &[MetricsRow]) -> Result<OrderingReport> {
    let mut strategies: Vec<OrderingStrategy> =
        table.iter().map(|r| r.cell.strategy).collect();
    strategies.sort_by_key(|s| format!("{s}"));
    strategies.dedup();
    if strategies.len() < 2 {
        return Err(Error::invalid("comparison needs at least two strategies"));
    }

    let mut keys: Vec<(u64, usize, usize, u64)> =
        table.iter().map(|r| r.cell.scenario_key()).collect();
    keys.sort();
    keys.dedup();

    let present: Vec<OrderingStrategy> = STRATEGY_ORDER
        .iter()
        .copied()
        .filter(|s| strategies.contains(s))
        .collect();

    let mut cells = Vec::new();
    let mut strict = 0usize;
    let mut violations = 0usize;
    for key in keys {
        let row_for = |s: OrderingStrategy| -> Result<&MetricsRow> {
            table
                .iter()
                .find(|r| r.cell.strategy == s && r.cell.scenario_key() == key)
                .ok_or_else(|| {
                    Error::invalid(format!("strategy {s} missing for a matched cell"))
                })
        };
        let mut pairs = Vec::new();
        let mut all_strict = true;
        for w in present.windows(2) {
            let lo = row_for(w[0])?;
            let hi = row_for(w[1])?;
            let verdict = if lo.collision_rate < hi.collision_rate {
                PairVerdict::OrderedStrict
            } else if lo.collision_rate == hi.collision_rate {
                PairVerdict::Tie
            } else if lo.collision_rate - lo.ci_halfwidth
                <= hi.collision_rate + hi.ci_halfwidth
            {
                PairVerdict::Inconclusive
            } else {
                PairVerdict::Violation
            };
            if verdict != PairVerdict::OrderedStrict {
                all_strict = false;
            }
            if verdict == PairVerdict::Violation {
                violations += 1;
            }
            pairs.push(PairComparison {
                lower: w[0],
                higher: w[1],
                lower_rate: lo.collision_rate,
                higher_rate: hi.collision_rate,
                verdict,
            });
        }
        let sample = table.iter().find(|r| r.cell.scenario_key() == key).unwrap();
        if all_strict {
            strict += 1;
        }
        cells.push(CellComparison {
            fraction: sample.cell.fraction,
            count: sample.cell.count,
            n_agents: sample.cell.n_agents,
            max_speed: sample.cell.max_speed,
            pairs,
            strictly_ordered: all_strict,
        });
    }
    let pass = violations == 0;
    Ok(OrderingReport { strictly_ordered_cells: strict, violations, pass, cells })
}

/// Output format of [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// Comma-delimited with a header row.
    Delimited,
    /// Structured object text (JSON).
    Structured,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delimited" | "csv" => Ok(ReportFormat::Delimited),
            "structured" | "json" => Ok(ReportFormat::Structured),
            other => Err(Error::Parse(format!("unknown report format '{other}'"))),
        }
    }
}

/// Writes the metrics table with a deterministic column order; rates carry
/// two decimals, matching the reference tables' precision.
pub fn emit_report<W: Write>(mut w: W, table: &[MetricsRow], format: ReportFormat) -> Result<()> {
    if table.is_empty() {
        return Err(Error::invalid("refusing to emit an empty table"));
    }
    match format {
        ReportFormat::Delimited => {
            writeln!(
                w,
                "strategy,aggressive_fraction,aggressive_count,n_agents,max_speed,\
                 episodes,collision_rate,deadlock_rate,success_rate,mean_ttg,ci_halfwidth"
            )?;
            for r in table {
                writeln!(
                    w,
                    "{},{:.2},{},{},{:.1},{},{:.2},{:.2},{:.2},{:.3},{:.2}",
                    r.cell.strategy,
                    r.cell.fraction,
                    r.cell.count,
                    r.cell.n_agents,
                    r.cell.max_speed,
                    r.episodes,
                    r.collision_rate,
                    r.deadlock_rate,
                    r.success_rate,
                    r.mean_ttg,
                    r.ci_halfwidth,
                )?;
            }
        }
        ReportFormat::Structured => {
            #[derive(Serialize)]
            struct Row {
                strategy: String,
                aggressive_fraction: f64,
                aggressive_count: usize,
                n_agents: usize,
                max_speed: f64,
                episodes: usize,
                collision_rate: f64,
                deadlock_rate: f64,
                success_rate: f64,
                mean_ttg: f64,
                ci_halfwidth: f64,
            }
            let rows: Vec<Row> = table
                .iter()
                .map(|r| Row {
                    strategy: format!("{}", r.cell.strategy),
                    aggressive_fraction: round2(r.cell.fraction),
                    aggressive_count: r.cell.count,
                    n_agents: r.cell.n_agents,
                    max_speed: r.cell.max_speed,
                    episodes: r.episodes,
                    collision_rate: round2(r.collision_rate),
                    deadlock_rate: round2(r.deadlock_rate),
                    success_rate: round2(r.success_rate),
                    mean_ttg: (r.mean_ttg * 1000.0).round() / 1000.0,
                    ci_halfwidth: round2(r.ci_halfwidth),
                })
                .collect();
            serde_json::to_writer_pretty(&mut w, &rows)
                .map_err(|e| Error::Parse(e.to_string()))?;
            writeln!(w)?;
        }
    }
    Ok(())
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// On-disk sweep configuration: flat key-value text with one section per
/// sweep axis. Any omitted field falls back to the default grid; CLI flags
/// override file values.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct SweepConfigFile {
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct GridSection {
    pub strategies: Option<Vec<String>>,
    pub fractions: Option<Vec<f64>>,
    pub counts: Option<Vec<usize>>,
    pub agents: Option<Vec<usize>>,
    pub max_speeds: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct RunSection {
    pub runs_per_cell: Option<usize>,
    pub base_seed: Option<u64>,
    pub scenario: Option<String>,
}

impl SweepConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    /// Overlays the file's values onto a base spec.
    pub fn apply(&self, mut spec: SweepSpec) -> Result<SweepSpec> {
        if let Some(strats) = &self.grid.strategies {
            spec.strategies = strats
                .iter()
                .map(|s| s.parse::<OrderingStrategy>())
                .collect::<Result<_>>()?;
        }
        if let Some(f) = &self.grid.fractions {
            spec.aggressive_fractions = f.clone();
        }
        if let Some(c) = &self.grid.counts {
            spec.aggressive_counts = c.clone();
        }
        if let Some(a) = &self.grid.agents {
            spec.n_agents = a.clone();
        }
        if let Some(m) = &self.grid.max_speeds {
            spec.max_speeds = m.clone();
        }
        if let Some(r) = self.run.runs_per_cell {
            spec.runs_per_cell = r;
        }
        if let Some(s) = self.run.base_seed {
            spec.base_seed = s;
        }
        if let Some(sc) = &self.run.scenario {
            spec.scenario = sc.parse()?;
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec() -> SweepSpec {
        SweepSpec {
            strategies: vec![OrderingStrategy::GamePlan],
            aggressive_fractions: vec![0.25],
            aggressive_counts: vec![1],
            n_agents: vec![4],
            max_speeds: vec![20.1],
            runs_per_cell: 1,
            base_seed: 3,
            scenario: ScenarioKind::Intersection4Way,
        }
    }

    #[test]
    fn single_episode_cell_rates_are_zero_or_hundred() {
        let table = run_sweep(&tiny_spec()).unwrap();
        assert_eq!(table.len(), 1);
        let r = &table[0];
        for rate in [r.collision_rate, r.deadlock_rate, r.success_rate] {
            assert!(rate == 0.0 || rate == 100.0);
        }
    }

    #[test]
    fn sweep_is_reproducible() {
        let spec = SweepSpec { runs_per_cell: 3, ..tiny_spec() };
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn report_shapes() {
        let table = run_sweep(&tiny_spec()).unwrap();
        let mut buf = Vec::new();
        emit_report(&mut buf, &table, ReportFormat::Delimited).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2, "header plus one row");

        let mut buf = Vec::new();
        emit_report(&mut buf, &table, ReportFormat::Structured).unwrap();
        let parsed: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), 1);

        assert!(emit_report(&mut Vec::new(), &[], ReportFormat::Delimited).is_err());
    }

    #[test]
    fn comparison_requires_two_strategies() {
        let table = run_sweep(&tiny_spec()).unwrap();
        assert!(compare_strategies(&table).is_err());
    }

    #[test]
    fn config_file_overlays_defaults() {
        let text = r#"
[grid]
strategies = ["gameplan", "random"]
fractions = [0.5]
counts = [1]
agents = [4]
max_speeds = [20.1]

[run]
runs_per_cell = 2
base_seed = 9
scenario = "intersection"
"#;
        let file = SweepConfigFile::parse(text).unwrap();
        let spec = file.apply(SweepSpec::default()).unwrap();
        assert_eq!(spec.strategies.len(), 2);
        assert_eq!(spec.aggressive_fractions, vec![0.5]);
        assert_eq!(spec.runs_per_cell, 2);
        assert_eq!(spec.base_seed, 9);
    }

    #[test]
    fn cell_aggressive_count_combines_axes() {
        let cell = CellKey {
            strategy: OrderingStrategy::GamePlan,
            fraction: 0.5,
            count: 1,
            n_agents: 10,
            max_speed: 20.1,
        };
        assert_eq!(cell.aggressive_count(), 5);
        let cell2 = CellKey { fraction: 0.2, count: 2, n_agents: 4, ..cell };
        assert_eq!(cell2.aggressive_count(), 2);
    }
}
