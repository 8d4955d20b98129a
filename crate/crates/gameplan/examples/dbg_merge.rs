use gameplan::sim::*;

fn main() {
    let cfg = ScenarioConfig {
        kind: ScenarioKind::Merge,
        lanes_per_approach: 1,
        n_agents: 2,
        aggressive: AggressiveSpec::Count(1),
        strategy: OrderingStrategy::None,
        seed: 21,
        ..ScenarioConfig::default()
    };
    let mut w = spawn_scenario(&cfg).unwrap();
    for lane in &w.scenario.lanes {
        println!(
            "lane app={} stop={:.1} zin={:.1} zout={:.1} goal={:.1} len={:.1}",
            lane.approach, lane.stop_arc, lane.zone_entry_arc, lane.zone_exit_arc, lane.goal_arc,
            lane.path.length()
        );
    }
    for k in 0..1200 {
        w.step().unwrap();
        if k % 20 == 0 {
            let s: Vec<String> = w
                .agents
                .iter()
                .map(|a| {
                    format!(
                        "[{} {:?} lane={} arc={:.1} v={:.2} pat={:.1} fin={:?} exz={}]",
                        a.id, a.class, a.lane, a.arc, a.speed, a.patience, a.finished_at,
                        a.exited_zone
                    )
                })
                .collect();
            println!(
                "t={:.1} zoneempty={} stag={:?} dls={} {}",
                w.time,
                w.zone_occupants().is_empty(),
                w.stagnation_duration(),
                w.deadlocks().len(),
                s.join(" ")
            );
        }
        if w.all_finished() {
            println!("done t={:.1}", w.time);
            break;
        }
    }
}
