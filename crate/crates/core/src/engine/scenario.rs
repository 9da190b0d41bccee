use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::adversary::{CrashPlan, SchedulerSpec, TruncationStrategy};
use crate::geometry::{AgreementMode, Conformal, Coord1, Point, Vec2, DEFAULT_EPSILON};
use crate::precise;
use crate::protocols::{LightState, ProtocolId, ProtocolSpace};

pub const DEFAULT_MAX_ROUNDS: u64 = 10_000;

/// What a run is expected to do, checked by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Gather,
    NoGather,
}

/// A complete, replayable experiment: initial configuration, private frames,
/// algorithm and adversary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "P: Point", deny_unknown_fields)]
pub struct Scenario<P: Point> {
    pub mode: AgreementMode,
    pub initial_positions: [P; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_lights: Option<[LightState; 2]>,
    /// Maps from the global frame to each robot's frame.
    #[serde(default = "identities::<P>")]
    pub similarities: [P::Map; 2],
    pub protocol: ProtocolId,
    #[serde(default)]
    pub scheduler: SchedulerSpec,
    #[serde(default)]
    pub crash: CrashPlan,
    /// Minimum distance a robot travels before it can be stopped.
    #[serde(default = "unit", serialize_with = "precise::serialize")]
    pub delta: f64,
    #[serde(default)]
    pub truncation: TruncationStrategy,
    #[serde(default = "default_epsilon", serialize_with = "precise::serialize")]
    pub epsilon: f64,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: u64,
    /// Master seed; fills in any scheduler or truncation seed left unset.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
}

fn identities<P: Point>() -> [P::Map; 2] {
    [P::Map::identity(), P::Map::identity()]
}

fn unit() -> f64 {
    1.0
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_max_rounds() -> u64 {
    DEFAULT_MAX_ROUNDS
}

impl<P: Point> Scenario<P> {
    /// FSYNC, rigid, crash-free scenario with identity frames.
    pub fn new(mode: AgreementMode, initial_positions: [P; 2], protocol: ProtocolId) -> Self {
        Scenario {
            mode,
            initial_positions,
            initial_lights: None,
            similarities: identities::<P>(),
            protocol,
            scheduler: SchedulerSpec::Fsync,
            crash: CrashPlan::none(),
            delta: 1.0,
            truncation: TruncationStrategy::Rigid,
            epsilon: DEFAULT_EPSILON,
            max_rounds: DEFAULT_MAX_ROUNDS,
            seed: 0,
            expect: None,
        }
    }

    /// The truncation strategy with an unset seed replaced by the master seed.
    pub fn resolved_truncation(&self) -> TruncationStrategy {
        match &self.truncation {
            TruncationStrategy::UniformRandom { seed: None } => TruncationStrategy::UniformRandom {
                seed: Some(self.seed),
            },
            other => other.clone(),
        }
    }

    pub fn scheduler_seed(&self) -> u64 {
        match self.scheduler {
            SchedulerSpec::SsyncFair { seed: Some(s), .. } => s,
            _ => self.seed,
        }
    }
}

impl<P: ProtocolSpace> Scenario<P> {
    /// Checks every field, collecting all problems rather than the first.
    pub fn validate(&self) -> Result<(), ValidationError> {
        let mut errors = Vec::new();
        let mut bad = |field: &str, message: String| {
            errors.push(FieldError {
                field: field.to_owned(),
                message,
            })
        };
        if self.mode.is_line() != P::IS_LINE {
            bad(
                "mode",
                format!(
                    "{:?} does not match the dimension of the positions",
                    self.mode
                ),
            );
        }
        for (r, p) in self.initial_positions.iter().enumerate() {
            if !p.is_finite() {
                bad(&format!("initial_positions[{r}]"), "must be finite".into());
            }
        }
        for (r, h) in self.similarities.iter().enumerate() {
            if !h.admissible(self.mode) {
                bad(
                    &format!("similarities[{r}]"),
                    format!("{h:?} is not admissible under {:?}", self.mode),
                );
            }
        }
        if let Err(e) = P::resolve(&self.protocol) {
            bad("protocol", e.to_string());
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            bad(
                "delta",
                format!("must be positive and finite, got {}", self.delta),
            );
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            bad(
                "epsilon",
                format!("must be positive and finite, got {}", self.epsilon),
            );
        }
        if self.max_rounds == 0 {
            bad("max_rounds", "must be at least 1".into());
        }
        if let Some(v) = self.crash.victim {
            if v > 1 {
                bad("crash.victim", format!("robot id must be 0 or 1, got {v}"));
            }
        }
        if let SchedulerSpec::SsyncFair { k: 0, .. } = self.scheduler {
            bad("scheduler.k", "fairness window must be at least 1".into());
        }
        if let TruncationStrategy::Custom { fractions } = &self.truncation {
            if fractions.iter().flatten().any(|f| !f.is_finite()) {
                bad("truncation.fractions", "must be finite".into());
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ValidationError(errors))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

/// Every offending field of a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationError(pub Vec<FieldError>);

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid scenario:")?;
        for e in &self.0 {
            write!(f, "\n  {}: {}", e.field, e.message)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

/// A scenario on a line or in the plane, chosen by its `mode`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AnyScenario {
    Line(Scenario<Coord1>),
    Plane(Scenario<Vec2>),
}

fn typed<P: Point>(value: Value) -> Result<Scenario<P>, ScenarioError> {
    serde_path_to_error::deserialize(value).map_err(|e| ScenarioError::Field {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}

impl AnyScenario {
    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let value: Value = serde_json::from_str(text)?;
        let mode = value
            .get("mode")
            .cloned()
            .ok_or_else(|| ScenarioError::Field {
                path: "mode".into(),
                message: "missing field".into(),
            })?;
        let mode: AgreementMode =
            serde_json::from_value(mode).map_err(|e| ScenarioError::Field {
                path: "mode".into(),
                message: e.to_string(),
            })?;
        let scenario = if mode.is_line() {
            AnyScenario::Line(typed(value)?)
        } else {
            AnyScenario::Plane(typed(value)?)
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        match self {
            AnyScenario::Line(s) => s.validate(),
            AnyScenario::Plane(s) => s.validate(),
        }
    }

    pub fn protocol(&self) -> &ProtocolId {
        match self {
            AnyScenario::Line(s) => &s.protocol,
            AnyScenario::Plane(s) => &s.protocol,
        }
    }

    pub fn expect(&self) -> Option<Expectation> {
        match self {
            AnyScenario::Line(s) => s.expect,
            AnyScenario::Plane(s) => s.expect,
        }
    }
}

impl From<Scenario<Coord1>> for AnyScenario {
    fn from(s: Scenario<Coord1>) -> Self {
        AnyScenario::Line(s)
    }
}

impl From<Scenario<Vec2>> for AnyScenario {
    fn from(s: Scenario<Vec2>) -> Self {
        AnyScenario::Plane(s)
    }
}
