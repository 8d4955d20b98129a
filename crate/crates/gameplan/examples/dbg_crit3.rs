use gameplan::sim::*;

fn main() {
    for n in [8usize, 10, 12] {
        for w in [0usize] {
            let _ = w;
            let runs = 400;
            let (mut def, mut col, mut col_given_def) = (0, 0, 0);
            for seed in 0..runs {
                let cfg = ScenarioConfig {
                    n_agents: n,
                    aggressive: AggressiveSpec::Fraction(0.5),
                    strategy: OrderingStrategy::Economic,
                    seed: 5000 + seed,
                    ..ScenarioConfig::default()
                };
                let out = run_scenario(&cfg).unwrap();
                let d = out.agents.iter().any(|a| a.defected);
                let c = !out.collisions.is_empty();
                if d {
                    def += 1;
                    if c {
                        col_given_def += 1;
                    }
                }
                if c {
                    col += 1;
                }
            }
            println!(
                "econ n={n} f=0.5: def {def}/400, C {col}/400, C|def {col_given_def}/{def} = {:.2}",
                col_given_def as f64 / def.max(1) as f64
            );
        }
    }
}
