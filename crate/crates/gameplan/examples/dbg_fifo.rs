use gameplan::sim::*;

fn main() {
    for seed in 0..6 {
        let cfg = ScenarioConfig {
            n_agents: 6,
            aggressive: AggressiveSpec::Fraction(0.5),
            strategy: OrderingStrategy::Fifo,
            seed: 1000 + seed,
            ..ScenarioConfig::default()
        };
        let mut w = spawn_scenario(&cfg).unwrap();
        while !w.is_running() {
            w.step().unwrap();
        }
        let mut rows: Vec<_> = w.agents.iter().collect();
        rows.sort_by_key(|a| a.turn);
        println!("seed {seed}:");
        for a in rows {
            println!(
                "  turn {:?} {:?} zeta={:.1} est={:.2} lane={} defects={}",
                a.turn, a.class, a.zeta, a.arrival_estimate, a.lane, a.defects
            );
        }
    }
}
