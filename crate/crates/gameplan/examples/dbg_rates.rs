use gameplan::sim::*;

fn main() {
    // 1. profile separation across seeds
    let mut sep_ok = 0;
    let mut agg_sum = 0.0;
    let mut cons_sum = 0.0;
    let trials = 40;
    for seed in 0..trials {
        let cfg = ScenarioConfig {
            n_agents: 6,
            aggressive: AggressiveSpec::Fraction(0.33),
            seed,
            ..ScenarioConfig::default()
        };
        let obs = run_observation(&cfg).unwrap();
        let agg: Vec<f64> = obs
            .profiles
            .iter()
            .filter(|p| p.class == BehaviorClass::Aggressive)
            .map(|p| p.zeta)
            .collect();
        let cons: Vec<f64> = obs
            .profiles
            .iter()
            .filter(|p| p.class == BehaviorClass::Conservative)
            .map(|p| p.zeta)
            .collect();
        let ma = agg.iter().sum::<f64>() / agg.len() as f64;
        let mc = cons.iter().sum::<f64>() / cons.len() as f64;
        agg_sum += ma;
        cons_sum += mc;
        if ma > mc {
            sep_ok += 1;
        }
    }
    println!(
        "separation: {}/{} seeds, mean agg {:.2} vs cons {:.2}",
        sep_ok,
        trials,
        agg_sum / trials as f64,
        cons_sum / trials as f64
    );

    // 2/3. strategy collision rates on a few cells
    for (n, frac) in [(4usize, 0.25f64), (6, 0.5), (10, 0.2), (10, 0.5), (8, 0.33), (6, 0.2), (10, 0.33)] {
        print!("n={n} frac={frac}: ");
        for strategy in [
            OrderingStrategy::GamePlan,
            OrderingStrategy::Economic,
            OrderingStrategy::Fifo,
            OrderingStrategy::Random,
        ] {
            let runs = 400;
            let mut col = 0;
            let mut dead = 0;
            let mut defect = 0;
            for seed in 0..runs {
                let cfg = ScenarioConfig {
                    n_agents: n,
                    aggressive: AggressiveSpec::Fraction(frac),
                    strategy,
                    seed: 1000 + seed,
                    ..ScenarioConfig::default()
                };
                let out = run_scenario(&cfg).unwrap();
                if !out.collisions.is_empty() {
                    col += 1;
                }
                if !out.deadlocks.is_empty() {
                    dead += 1;
                }
                if out.agents.iter().any(|a| a.defected) {
                    defect += 1;
                }
            }
            print!(
                "{strategy}: C={:.1}% D={:.1}% def={:.1}%  ",
                100.0 * col as f64 / runs as f64,
                100.0 * dead as f64 / runs as f64,
                100.0 * defect as f64 / runs as f64
            );
        }
        println!();
    }

    // 4. merge TTG analog
    let mk = |strategy, seed| ScenarioConfig {
        kind: ScenarioKind::Merge,
        lanes_per_approach: 1,
        n_agents: 2,
        aggressive: AggressiveSpec::Count(1),
        strategy,
        seed,
        ..ScenarioConfig::default()
    };
    for seed in [21, 22, 23, 99] {
        let gp = run_scenario(&mk(OrderingStrategy::GamePlan, seed)).unwrap();
        let none = run_scenario(&mk(OrderingStrategy::None, seed)).unwrap();
        let delay = none.deadlocks.first().map(|d| d.delay(none.episode_duration));
        println!(
            "merge seed {seed}: gp ttg {:.1} (succ {}), none ttg {:.1} (dl {:?}, delay {:?})",
            gp.episode_duration,
            gp.success,
            none.episode_duration,
            none.deadlocks.len(),
            delay
        );
    }
}
