//! Everything the environment controls: who is activated each round, who
//! crashes, and where a moving robot is stopped.
//!
//! Randomized choices are drawn from ChaCha streams keyed by `(seed, round)`
//! or `(seed, round, robot)`, so a schedule can be replayed from its seed
//! without carrying RNG state between rounds.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, Vec2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdversaryError {
    #[error("no correct robot left to activate")]
    NoCorrectRobot,
    #[error("delta must be a positive finite distance, got {0}")]
    BadDelta(f64),
    #[error("fairness window must be at least 1")]
    BadWindow,
    #[error("moves are not mirror-symmetric: {0}")]
    Asymmetric(String),
}

/// A subset of the two robots.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RobotSet([bool; 2]);

/// The robots activated in a round.
pub type ActivationSet = RobotSet;

impl RobotSet {
    pub const EMPTY: RobotSet = RobotSet([false, false]);
    pub const BOTH: RobotSet = RobotSet([true, true]);

    pub fn single(robot: usize) -> Self {
        let mut set = [false; 2];
        set[robot] = true;
        RobotSet(set)
    }

    pub fn from_flags(flags: [bool; 2]) -> Self {
        RobotSet(flags)
    }

    pub fn contains(&self, robot: usize) -> bool {
        self.0[robot]
    }

    pub fn insert(&mut self, robot: usize) {
        self.0[robot] = true;
    }

    pub fn is_empty(&self) -> bool {
        !self.0[0] && !self.0[1]
    }

    pub fn len(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_subset(&self, other: &RobotSet) -> bool {
        (0..2).all(|r| !self.0[r] || other.0[r])
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..2).filter(move |&r| self.0[r])
    }
}

impl fmt::Debug for RobotSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for RobotSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for RobotSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let ids = Vec::<usize>::deserialize(d)?;
        let mut set = RobotSet::EMPTY;
        for id in ids {
            if id > 1 {
                return Err(serde::de::Error::custom(format!(
                    "robot id {id} out of range"
                )));
            }
            set.insert(id);
        }
        Ok(set)
    }
}

/// At most one robot crashes; from `round` on it is never activated again.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CrashPlan {
    pub victim: Option<usize>,
    #[serde(default)]
    pub round: u64,
}

impl CrashPlan {
    pub fn none() -> Self {
        CrashPlan::default()
    }

    pub fn at_start(victim: usize) -> Self {
        CrashPlan {
            victim: Some(victim),
            round: 0,
        }
    }

    pub fn is_crashed(&self, robot: usize, round: u64) -> bool {
        self.victim == Some(robot) && round >= self.round
    }
}

/// How far a moving robot gets before the adversary stops it.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TruncationStrategy {
    /// Every robot reaches its destination.
    #[default]
    Rigid,
    /// Stop as early as allowed: after exactly `min(δ, L)`.
    MinimalDelta,
    /// Stop fraction drawn uniformly from the admissible range.
    UniformRandom {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Pairs of robots heading for a shared apex from a level start are
    /// stopped after the same distance, keeping their y-coordinates equal.
    /// Every other move is stopped as in `MinimalDelta`.
    SymmetryPreserving,
    /// Per-round `[robot 0, robot 1]` stop fractions, cycled; raised to the
    /// admissible minimum when too small.
    Custom { fractions: Vec<[f64; 2]> },
}

/// Who is activated each round.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SchedulerSpec {
    #[default]
    Fsync,
    /// Random non-empty subsets where no correct robot idles `k` rounds in a row.
    SsyncFair {
        k: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// The strategy that defeats every SSYNC algorithm: see
    /// [`impossibility_adversary`].
    Impossibility,
}

const SCHEDULER_LANE: u64 = 0;
const TRUNCATION_LANE: u64 = 1;

fn stream(seed: u64, round: u64, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round.wrapping_mul(4).wrapping_add(lane));
    rng
}

pub fn fsync_activation(correct: RobotSet) -> Result<ActivationSet, AdversaryError> {
    if correct.is_empty() {
        return Err(AdversaryError::NoCorrectRobot);
    }
    Ok(correct)
}

/// A pseudo-random non-empty subset of `correct`, with any robot that has
/// idled `k - 1` rounds in a row forced in.
pub fn ssync_fair_activation(
    round: u64,
    k: u64,
    seed: u64,
    correct: RobotSet,
    idle_streak: [u64; 2],
) -> Result<ActivationSet, AdversaryError> {
    if k == 0 {
        return Err(AdversaryError::BadWindow);
    }
    let members: Vec<usize> = correct.iter().collect();
    let mut active = match members.as_slice() {
        [] => return Err(AdversaryError::NoCorrectRobot),
        [only] => RobotSet::single(*only),
        _ => match stream(seed, round, SCHEDULER_LANE).gen_range(0..3) {
            0 => RobotSet::single(0),
            1 => RobotSet::single(1),
            _ => RobotSet::BOTH,
        },
    };
    for r in members {
        if idle_streak[r] + 1 >= k {
            active.insert(r);
        }
    }
    Ok(active)
}

/// Where a robot moving from `from` towards `to` is stopped.
///
/// The result lies on the segment and is at least `min(δ, |to - from|)` away
/// from `from`. A robot that is not stopped lands on `to` bit-for-bit.
pub fn truncate_move<P: Point>(
    from: P,
    to: P,
    delta: f64,
    strategy: &TruncationStrategy,
    round: u64,
    robot: usize,
) -> Result<P, AdversaryError> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(AdversaryError::BadDelta(delta));
    }
    let len = from.distance(to);
    if len == 0.0 {
        return Ok(from);
    }
    let floor = delta.min(len) / len;
    let t = match strategy {
        TruncationStrategy::Rigid => 1.0,
        TruncationStrategy::MinimalDelta | TruncationStrategy::SymmetryPreserving => floor,
        TruncationStrategy::UniformRandom { seed } => {
            if floor >= 1.0 {
                1.0
            } else {
                let lane = TRUNCATION_LANE + robot as u64;
                stream(seed.unwrap_or(0), round, lane).gen_range(floor..=1.0)
            }
        }
        TruncationStrategy::Custom { fractions } => {
            if fractions.is_empty() {
                1.0
            } else {
                let f = fractions[(round % fractions.len() as u64) as usize][robot];
                f.clamp(floor, 1.0)
            }
        }
    };
    Ok(if t >= 1.0 { to } else { from + (to - from) * t })
}

/// The schedule that keeps any deterministic algorithm from gathering in
/// SSYNC, given each robot's dictated global destination (`None` when
/// crashed).
///
/// Robot 0 plays the designated robot `r`, robot 1 plays `r'`:
/// - `r` idle: activate only `r`;
/// - `r` heading anywhere but `r'`: activate only `r`;
/// - `r` heading to `r'` while `r'` moves: activate both;
/// - otherwise (`r'` idle): activate only `r'`.
///
/// A destination within `epsilon` of a position counts as that position.
pub fn impossibility_adversary<P: Point>(
    dictated: [Option<P>; 2],
    positions: [P; 2],
    epsilon: f64,
) -> ActivationSet {
    let (Some(r_dest), Some(other_dest)) = (dictated[0], dictated[1]) else {
        return RobotSet::from_flags([dictated[0].is_some(), dictated[1].is_some()]);
    };
    let r_idle = r_dest.distance(positions[0]) <= epsilon;
    let r_to_other = r_dest.distance(positions[1]) <= epsilon;
    let other_idle = other_dest.distance(positions[1]) <= epsilon;
    if r_idle || !r_to_other {
        RobotSet::single(0)
    } else if !other_idle {
        RobotSet::BOTH
    } else {
        RobotSet::single(1)
    }
}

/// Stops two robots heading for a shared apex from a level configuration
/// after the same distance `min(δ, L)`, with equal y-coordinates, so the
/// configuration stays symmetric.
pub fn symmetry_preserving_truncation(
    from: [Vec2; 2],
    to: [Vec2; 2],
    delta: f64,
) -> Result<[Vec2; 2], AdversaryError> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(AdversaryError::BadDelta(delta));
    }
    let d = from[0].distance(from[1]);
    let tol = 1e-9 * d.max(1.0);
    let mid_x = (from[0].x + from[1].x) / 2.0;
    if (from[0].y - from[1].y).abs() > tol {
        return Err(AdversaryError::Asymmetric(format!(
            "start heights differ: {} vs {}",
            from[0].y, from[1].y
        )));
    }
    if to[0].distance(to[1]) > tol || (to[0].x - mid_x).abs() > tol {
        return Err(AdversaryError::Asymmetric(format!(
            "targets {:?} and {:?} are not a shared apex above x = {mid_x}",
            to[0], to[1]
        )));
    }
    let lens = [from[0].distance(to[0]), from[1].distance(to[1])];
    if lens.iter().all(|&l| l <= delta) {
        return Ok(to);
    }
    let mut stops = [from[0], from[1]];
    for r in 0..2 {
        if lens[r] > 0.0 {
            stops[r] = from[r] + (to[r] - from[r]) * (delta.min(lens[r]) / lens[r]);
        }
    }
    let y = stops[0].y.max(stops[1].y);
    stops[0].y = y;
    stops[1].y = y;
    Ok(stops)
}
