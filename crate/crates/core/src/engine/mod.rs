//! The Look-Compute-Move loop.
//!
//! Each round every correct robot looks and computes, the scheduler picks
//! who actually moves, and the adversary decides where each mover stops.
//! Intents are computed for all correct robots before activation because
//! the impossibility scheduler chooses its activation set from them.

mod scenario;
mod trace;

use thiserror::Error;

pub use scenario::{
    AnyScenario, Expectation, FieldError, Scenario, ScenarioError, ValidationError,
    DEFAULT_MAX_ROUNDS,
};
pub use trace::{AnyTrace, Intent, RoundRecord, TerminalStatus, Trace};

use crate::adversary::{
    fsync_activation, impossibility_adversary, ssync_fair_activation,
    symmetry_preserving_truncation, truncate_move, ActivationSet, AdversaryError, RobotSet,
    SchedulerSpec, TruncationStrategy,
};
use crate::geometry::{local_view, AgreementMode, Conformal, Coord1, Point, Vec2};
use crate::protocols::{LightState, Lights, Protocol, ProtocolError, ProtocolId, ProtocolSpace};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error("round {round}: scheduler activated {activated:?} with correct robots {correct:?}")]
    BadActivation {
        round: u64,
        activated: ActivationSet,
        correct: ActivationSet,
    },
    #[error("round limit {0} already reached")]
    Exhausted(u64),
}

/// Positions the engine can simulate.
pub trait Space: ProtocolSpace {
    /// Stops for a pair of moves that must stay mirror-symmetric, or `None`
    /// when the moves are not of that shape.
    fn symmetric_stops(_from: [Self; 2], _to: [Self; 2], _delta: f64) -> Option<[Self; 2]> {
        None
    }
}

impl Space for Coord1 {}

impl Space for Vec2 {
    fn symmetric_stops(from: [Vec2; 2], to: [Vec2; 2], delta: f64) -> Option<[Vec2; 2]> {
        symmetry_preserving_truncation(from, to, delta).ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState<P: Point> {
    pub positions: [P; 2],
    pub lights: Option<[LightState; 2]>,
    pub crashed: [bool; 2],
    /// Rounds executed so far.
    pub round: u64,
    pub similarities: [P::Map; 2],
    pub gathered_since: Option<u64>,
    /// Consecutive rounds each robot has gone without activation.
    pub idle_streak: [u64; 2],
}

impl<P: Point> WorldState<P> {
    pub fn initial(scenario: &Scenario<P>) -> Self {
        let positions = scenario.initial_positions;
        WorldState {
            positions,
            lights: scenario.initial_lights,
            crashed: [0, 1].map(|r| scenario.crash.is_crashed(r, 0)),
            round: 0,
            similarities: scenario.similarities,
            gathered_since: detect_gathering(positions, scenario.epsilon).then_some(0),
            idle_streak: [0, 0],
        }
    }

    pub fn correct(&self) -> RobotSet {
        RobotSet::from_flags(self.crashed.map(|c| !c))
    }
}

pub fn detect_gathering<P: Point>(positions: [P; 2], epsilon: f64) -> bool {
    positions[0].distance(positions[1]) <= epsilon
}

/// Runs one round. Resolves the protocol on every call; [`run`] resolves once.
pub fn step<P: Space>(
    state: &WorldState<P>,
    scenario: &Scenario<P>,
) -> Result<(WorldState<P>, RoundRecord<P>), EngineError> {
    let protocol = P::resolve(&scenario.protocol)?;
    step_with(state, scenario, protocol.as_ref())
}

fn step_with<P: Space>(
    state: &WorldState<P>,
    scenario: &Scenario<P>,
    protocol: &dyn Protocol<P>,
) -> Result<(WorldState<P>, RoundRecord<P>), EngineError> {
    let round = state.round;
    if round >= scenario.max_rounds {
        return Err(EngineError::Exhausted(scenario.max_rounds));
    }
    let crashed = [0, 1].map(|r| state.crashed[r] || scenario.crash.is_crashed(r, round));
    let correct = RobotSet::from_flags(crashed.map(|c| !c));
    let before = state.positions;

    // Look and Compute
    let intents: [Option<Intent<P>>; 2] = [0, 1].map(|r| {
        if crashed[r] {
            return None;
        }
        let h = &state.similarities[r];
        let view = local_view(before, r, h, scenario.epsilon);
        let lights = match state.lights {
            Some(l) => Some(Lights {
                own: l[r],
                other: l[1 - r],
            }),
            None if protocol.needs_lights() => Some(Lights {
                own: LightState::default(),
                other: LightState::default(),
            }),
            None => None,
        };
        let out = protocol.compute(&view, lights);
        let global_destination = before[r] + h.inverse().apply(out.destination);
        Some(Intent {
            view,
            local_destination: out.destination,
            global_destination,
            new_color: out.new_color,
        })
    });

    let activated = match &scenario.scheduler {
        SchedulerSpec::Fsync => fsync_activation(correct)?,
        SchedulerSpec::SsyncFair { k, .. } => ssync_fair_activation(
            round,
            *k,
            scenario.scheduler_seed(),
            correct,
            state.idle_streak,
        )?,
        SchedulerSpec::Impossibility => impossibility_adversary(
            intents.clone().map(|i| i.map(|i| i.global_destination)),
            before,
            scenario.epsilon,
        ),
    };
    if activated.is_empty() || !activated.is_subset(&correct) {
        return Err(EngineError::BadActivation {
            round,
            activated,
            correct,
        });
    }

    // Move
    let truncation = scenario.resolved_truncation();
    let mut after = before;
    let targets = [0, 1].map(|r| {
        intents[r]
            .as_ref()
            .map_or(before[r], |i| i.global_destination)
    });
    let paired = match truncation {
        TruncationStrategy::SymmetryPreserving if activated == RobotSet::BOTH => {
            P::symmetric_stops(before, targets, scenario.delta)
        }
        _ => None,
    };
    match paired {
        Some(stops) => after = stops,
        None => {
            for r in activated.iter() {
                after[r] =
                    truncate_move(before[r], targets[r], scenario.delta, &truncation, round, r)?;
            }
        }
    }

    let mut lights = state.lights;
    for r in activated.iter() {
        if let Some(color) = intents[r].as_ref().and_then(|i| i.new_color) {
            lights.get_or_insert([LightState::default(); 2])[r] = color;
        }
    }

    let executed = round + 1;
    let gathered_since = if detect_gathering(after, scenario.epsilon) {
        Some(state.gathered_since.unwrap_or(executed))
    } else {
        None
    };
    let idle_streak = [0, 1].map(|r| {
        if activated.contains(r) {
            0
        } else {
            state.idle_streak[r] + 1
        }
    });
    let next = WorldState {
        positions: after,
        lights,
        crashed,
        round: executed,
        similarities: state.similarities,
        gathered_since,
        idle_streak,
    };
    let record = RoundRecord {
        round: executed,
        before,
        activated,
        crashed,
        intents,
        after,
        lights,
    };
    Ok((next, record))
}

/// Steps until the robots have been gathered for one confirmation round, or
/// until `max_rounds`.
pub fn run<P: Space>(scenario: &Scenario<P>) -> Result<Trace<P>, EngineError> {
    let protocol = P::resolve(&scenario.protocol)?;
    run_protocol(scenario, protocol.as_ref())
}

/// Like [`run`], but with an explicit algorithm in place of the one the
/// scenario names.
pub fn run_protocol<P: Space>(
    scenario: &Scenario<P>,
    protocol: &dyn Protocol<P>,
) -> Result<Trace<P>, EngineError> {
    scenario.validate()?;
    let mut state = WorldState::initial(scenario);
    let mut records = Vec::new();
    while state.round < scenario.max_rounds {
        let (next, record) = step_with(&state, scenario, protocol)?;
        state = next;
        records.push(record);
        if matches!(state.gathered_since, Some(t) if state.round > t) {
            break;
        }
    }
    let status = match state.gathered_since {
        Some(round) => TerminalStatus::Gathered { round },
        None => TerminalStatus::RoundLimit {
            rounds: state.round,
        },
    };
    Ok(Trace {
        scenario: scenario.clone(),
        records,
        status,
    })
}

pub fn run_any(scenario: &AnyScenario) -> Result<AnyTrace, EngineError> {
    Ok(match scenario {
        AnyScenario::Line(s) => AnyTrace::Line(run(s)?),
        AnyScenario::Plane(s) => AnyTrace::Plane(run(s)?),
    })
}

/// Line agreement that a lifted algorithm inherits from a planar mode: the
/// lexicographic orientation is common exactly when both axes are shared.
fn line_agreement(mode: AgreementMode) -> AgreementMode {
    match mode {
        AgreementMode::BothAxesCommonUnit
        | AgreementMode::BothAxesAnyUnit
        | AgreementMode::Line1DOriented => AgreementMode::Line1DOriented,
        _ => AgreementMode::Line1DDisoriented,
    }
}

fn common_unit<P: Point>(scenario: &Scenario<P>) -> bool {
    match scenario.mode {
        AgreementMode::BothAxesCommonUnit => true,
        AgreementMode::Line1DOriented => scenario
            .similarities
            .iter()
            .all(|h| (h.scale() - 1.0).abs() <= 1e-12),
        _ => false,
    }
}

/// Whether the algorithm is proven to solve rendezvous, crash or no crash,
/// under the scenario's assumptions.
pub fn claims_suir<P: Point>(scenario: &Scenario<P>) -> bool {
    if scenario.scheduler != SchedulerSpec::Fsync {
        // no algorithm solves crash-tolerant rendezvous in SSYNC
        return false;
    }
    let rigid = scenario.truncation == TruncationStrategy::Rigid;
    let crash_free = scenario.crash.victim.is_none();
    let (inner, mode) = match &scenario.protocol {
        ProtocolId::Lift(inner) if !P::IS_LINE => (inner.as_ref(), line_agreement(scenario.mode)),
        other => (other, scenario.mode),
    };
    let shares_y = matches!(
        scenario.mode,
        AgreementMode::OneCommonAxis
            | AgreementMode::BothAxesAnyUnit
            | AgreementMode::BothAxesCommonUnit
    );
    match inner {
        ProtocolId::Mod4Disoriented => mode.is_line(),
        ProtocolId::Mod3BothAxes => mode == AgreementMode::Line1DOriented,
        ProtocolId::RigidCommon => {
            mode == AgreementMode::Line1DOriented && common_unit(scenario) && rigid
        }
        ProtocolId::OneAxisSuir => !P::IS_LINE && shares_y,
        ProtocolId::OneAxisFaultFree => !P::IS_LINE && shares_y && crash_free,
        ProtocolId::LuminousSsync | ProtocolId::GotoOther | ProtocolId::Lift(_) => false,
    }
}

pub fn claims_suir_any(scenario: &AnyScenario) -> bool {
    match scenario {
        AnyScenario::Line(s) => claims_suir(s),
        AnyScenario::Plane(s) => claims_suir(s),
    }
}
