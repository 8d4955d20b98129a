//! Delimited file formats: trajectory ingestion and profile tables.
//!
//! Trajectories: header `agent_id,time,x,y,speed`, one sample per row,
//! times in seconds and positions in meters. Profiles: header
//! `agent_id,zeta,window_start,window_end`.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::behavior::{BehaviorProfile, Trajectory, TrajectorySample};
use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::AgentId;

pub fn read_trajectories<R: Read>(reader: R) -> Result<Vec<Trajectory>> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    {
        let headers = csv.headers().map_err(|e| Error::Parse(e.to_string()))?;
        let expected = ["agent_id", "time", "x", "y", "speed"];
        let got: Vec<&str> = headers.iter().collect();
        if got != expected {
            return Err(Error::Parse(format!(
                "expected header {expected:?}, got {got:?}"
            )));
        }
    }
    let mut by_agent: BTreeMap<u32, Vec<TrajectorySample>> = BTreeMap::new();
    for (line, record) in csv.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let field = |i: usize| -> Result<f64> {
            record
                .get(i)
                .ok_or_else(|| Error::Parse(format!("row {}: missing column {i}", line + 2)))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))
        };
        let id = record
            .get(0)
            .ok_or_else(|| Error::Parse(format!("row {}: missing agent_id", line + 2)))?
            .parse::<u32>()
            .map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))?;
        let sample = TrajectorySample {
            agent_id: AgentId(id),
            time: field(1)?,
            position: Point2::new(field(2)?, field(3)?),
            speed: field(4)?,
        };
        by_agent.entry(id).or_default().push(sample);
    }
    by_agent
        .into_iter()
        .map(|(id, samples)| Trajectory::new(AgentId(id), samples))
        .collect()
}

pub fn read_trajectories_from_path(path: &Path) -> Result<Vec<Trajectory>> {
    read_trajectories(std::fs::File::open(path)?)
}

pub fn write_trajectories<W: Write>(mut w: W, trajectories: &[Trajectory]) -> Result<()> {
    writeln!(w, "agent_id,time,x,y,speed")?;
    for traj in trajectories {
        for s in &traj.samples {
            writeln!(
                w,
                "{},{:.3},{:.4},{:.4},{:.4}",
                s.agent_id, s.time, s.position.x, s.position.y, s.speed
            )?;
        }
    }
    Ok(())
}

pub fn write_profiles<W: Write>(mut w: W, profiles: &[BehaviorProfile]) -> Result<()> {
    writeln!(w, "agent_id,zeta,window_start,window_end")?;
    for p in profiles {
        writeln!(w, "{},{:.6},{:.3},{:.3}", p.agent_id, p.zeta, p.window.0, p.window.1)?;
    }
    Ok(())
}

pub fn read_profiles<R: Read>(reader: R) -> Result<Vec<BehaviorProfile>> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    {
        let headers = csv.headers().map_err(|e| Error::Parse(e.to_string()))?;
        let got: Vec<&str> = headers.iter().collect();
        if got != ["agent_id", "zeta", "window_start", "window_end"] {
            return Err(Error::Parse(format!("unexpected profile header {got:?}")));
        }
    }
    let mut out = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let parse = |i: usize| -> Result<f64> {
            record
                .get(i)
                .ok_or_else(|| Error::Parse(format!("missing column {i}")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(e.to_string()))
        };
        let id: u32 = record
            .get(0)
            .ok_or_else(|| Error::Parse("missing agent_id".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("{e}")))?;
        out.push(BehaviorProfile {
            agent_id: AgentId(id),
            zeta: parse(1)?,
            window: (parse(2)?, parse(3)?),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trajectory_round_trip() {
        let input = "agent_id,time,x,y,speed\n0,0.0,0.0,1.0,5.0\n0,0.1,0.5,1.0,5.0\n1,0.0,10.0,0.0,3.0\n";
        let trajs = read_trajectories(input.as_bytes()).unwrap();
        assert_eq!(trajs.len(), 2);
        assert_eq!(trajs[0].samples.len(), 2);
        let mut buf = Vec::new();
        write_trajectories(&mut buf, &trajs).unwrap();
        let again = read_trajectories(buf.as_slice()).unwrap();
        assert_eq!(again.len(), 2);
        assert_eq!(again[0].samples.len(), 2);
    }

    #[test]
    fn bad_header_rejected() {
        let input = "id,time,x,y,v\n0,0.0,0.0,1.0,5.0\n";
        assert!(read_trajectories(input.as_bytes()).is_err());
    }

    #[test]
    fn profile_round_trip() {
        let profiles = vec![BehaviorProfile {
            agent_id: AgentId(3),
            zeta: 2.0,
            window: (0.0, 5.0),
        }];
        let mut buf = Vec::new();
        write_profiles(&mut buf, &profiles).unwrap();
        let again = read_profiles(buf.as_slice()).unwrap();
        assert_eq!(again.len(), 1);
        assert_eq!(again[0].agent_id, AgentId(3));
        assert_eq!(again[0].zeta, 2.0);
    }
}
