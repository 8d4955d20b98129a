use gameplan::sim::*;

fn main() {
    // find fifo episodes with defection and no collision, trace one
    for seed in 1000..1100u64 {
        let cfg = ScenarioConfig {
            n_agents: 4,
            aggressive: AggressiveSpec::Fraction(0.25),
            strategy: OrderingStrategy::Fifo,
            seed,
            ..ScenarioConfig::default()
        };
        let out = run_scenario(&cfg).unwrap();
        let defected = out.agents.iter().any(|a| a.defected);
        if defected && out.collisions.is_empty() {
            println!("seed {seed}: defection without collision; tracing");
            let mut w = spawn_scenario(&cfg).unwrap();
            for _ in 0..1800 {
                w.step().unwrap();
                let t = w.time;
                if w.is_running() && t < 14.0 {
                    let s: Vec<String> = w
                        .agents
                        .iter()
                        .map(|a| {
                            format!(
                                "[{} {:?}{} t{:?} arc={:.0}/{:.0} v={:.1}{}]",
                                a.id,
                                a.class,
                                if a.defects { "*" } else { "" },
                                a.turn,
                                a.arc,
                                w.scenario.lanes[a.lane].stop_arc,
                                a.speed,
                                if a.exited_zone { " out" } else { "" }
                            )
                        })
                        .collect();
                    if (t * 10.0).round() as i64 % 5 == 0 {
                        println!("t={t:.1} {}", s.join(" "));
                    }
                }
                if w.all_finished() {
                    break;
                }
            }
            break;
        }
    }
}
