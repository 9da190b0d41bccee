use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use crate::adversary::ActivationSet;
use crate::geometry::{Coord1, LocalView, Point, Vec2};
use crate::protocols::LightState;

/// What one correct robot computed in a round. Robots left out of the
/// activation set compute too, but their intent is discarded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "P: Point")]
pub struct Intent<P: Point> {
    pub view: LocalView<P>,
    pub local_destination: P,
    pub global_destination: P,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new_color: Option<LightState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "P: Point")]
pub struct RoundRecord<P: Point> {
    /// 1-based index of the round this record describes.
    pub round: u64,
    pub before: [P; 2],
    pub activated: ActivationSet,
    pub crashed: [bool; 2],
    /// `None` for a crashed robot.
    pub intents: [Option<Intent<P>>; 2],
    pub after: [P; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lights: Option<[LightState; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TerminalStatus {
    /// Gathered from this round on (0 when the robots start together).
    Gathered {
        round: u64,
    },
    RoundLimit {
        rounds: u64,
    },
}

impl TerminalStatus {
    pub fn gathered(&self) -> Option<u64> {
        match *self {
            TerminalStatus::Gathered { round } => Some(round),
            TerminalStatus::RoundLimit { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace<P: Point> {
    pub scenario: Scenario<P>,
    pub records: Vec<RoundRecord<P>>,
    pub status: TerminalStatus,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "P: Point")]
struct Header<P: Point> {
    scenario: Scenario<P>,
}

impl<P: Point> Trace<P> {
    /// Distance between the robots before round 1 and after every round.
    pub fn distances(&self) -> Vec<f64> {
        let start = self.scenario.initial_positions;
        std::iter::once(start[0].distance(start[1]))
            .chain(self.records.iter().map(|r| r.after[0].distance(r.after[1])))
            .collect()
    }

    /// Header line, one line per round, then the terminal status.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header = Header {
            scenario: self.scenario.clone(),
        };
        serde_json::to_writer(&mut out, &header)?;
        writeln!(out)?;
        for record in &self.records {
            serde_json::to_writer(&mut out, record)?;
            writeln!(out)?;
        }
        serde_json::to_writer(&mut out, &self.status)?;
        writeln!(out)
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> io::Result<Self> {
        let lines: Vec<String> = input
            .lines()
            .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .collect::<io::Result<_>>()?;
        let bad = |what: &str| io::Error::new(io::ErrorKind::InvalidData, what.to_owned());
        let (first, rest) = lines.split_first().ok_or_else(|| bad("empty trace"))?;
        let (last, middle) = rest
            .split_last()
            .ok_or_else(|| bad("trace has no status line"))?;
        let header: Header<P> = serde_json::from_str(first)?;
        let records = middle
            .iter()
            .map(|l| serde_json::from_str(l))
            .collect::<Result<_, _>>()?;
        Ok(Trace {
            scenario: header.scenario,
            records,
            status: serde_json::from_str(last)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyTrace {
    Line(Trace<Coord1>),
    Plane(Trace<Vec2>),
}

impl AnyTrace {
    pub fn status(&self) -> TerminalStatus {
        match self {
            AnyTrace::Line(t) => t.status,
            AnyTrace::Plane(t) => t.status,
        }
    }

    pub fn rounds(&self) -> usize {
        match self {
            AnyTrace::Line(t) => t.records.len(),
            AnyTrace::Plane(t) => t.records.len(),
        }
    }

    pub fn activations(&self) -> Vec<ActivationSet> {
        match self {
            AnyTrace::Line(t) => t.records.iter().map(|r| r.activated).collect(),
            AnyTrace::Plane(t) => t.records.iter().map(|r| r.activated).collect(),
        }
    }

    pub fn distances(&self) -> Vec<f64> {
        match self {
            AnyTrace::Line(t) => t.distances(),
            AnyTrace::Plane(t) => t.distances(),
        }
    }

    pub fn write_jsonl<W: Write>(&self, out: W) -> io::Result<()> {
        match self {
            AnyTrace::Line(t) => t.write_jsonl(out),
            AnyTrace::Plane(t) => t.write_jsonl(out),
        }
    }
}
