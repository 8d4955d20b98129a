use gameplan::sim::*;

fn main() {
    for (n, frac, strategy) in [
        (10usize, 0.2f64, OrderingStrategy::Random),
        (10, 0.2, OrderingStrategy::Fifo),
        (10, 0.33, OrderingStrategy::Random),
        (10, 0.33, OrderingStrategy::Fifo),
    ] {
        let runs = 200;
        let (mut def, mut launched, mut col) = (0, 0, 0);
        for seed in 0..runs {
            let cfg = ScenarioConfig {
                n_agents: n,
                aggressive: AggressiveSpec::Fraction(frac),
                strategy,
                seed: 1000 + seed,
                ..ScenarioConfig::default()
            };
            let mut w = spawn_scenario(&cfg).unwrap();
            let out = w.run_to_completion().unwrap();
            if out.agents.iter().any(|a| a.defected) {
                def += out.agents.iter().filter(|a| a.defected).count();
            }
            if w.any_defector_launched() {
                launched += 1;
            }
            if !out.collisions.is_empty() {
                col += 1;
            }
        }
        println!(
            "{strategy} n={n} f={frac}: defect-episodes {def}/{runs}, launched {launched}, collided {col}"
        );
    }
}
