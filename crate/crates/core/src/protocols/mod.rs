//! Robot algorithms behind one interface: a local view (plus the two light
//! colors, for luminous robots) maps to a destination in the robot's own
//! frame.
//!
//! Protocols are pure. Light state is owned by the engine and threaded in on
//! every call.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{level, Coord1, LocalView, Point, Vec2};

mod levels;
mod lift;
mod luminous;
mod one_axis;
mod rigid;

pub use levels::{
    alg_mod3_both_axes, alg_mod4_disoriented, mod3_rule, mod4_rule, Mod3BothAxes, Mod4Disoriented,
};
pub use lift::{lift_1d_to_2d, orientation_vector, Lifted};
pub use luminous::{alg_luminous_ssync, LuminousSsync};
pub use one_axis::{
    alg_one_axis_fault_free, alg_one_axis_suir, equilateral_apex, north_orientation,
    OneAxisFaultFree, OneAxisSuir,
};
pub use rigid::{alg_goto_other, alg_rigid_common, GotoOther, RigidCommon, UNIT_SLACK};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("unknown protocol `{0}`")]
    Unknown(String),
    #[error(
        "protocol `{id}` needs robots on a line; wrap it as `lift:{id}` to run it in the plane"
    )]
    NeedsLine { id: String },
    #[error("protocol `{id}` is planar and cannot run on a line")]
    NeedsPlane { id: String },
    #[error("`{0}` cannot be lifted: only line protocols can")]
    NotLiftable(String),
    #[error("light color must be 0, 1 or 2, got {0}")]
    BadColor(u8),
}

/// A persistent, externally visible light with three colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct LightState(u8);

impl LightState {
    pub fn new(color: u8) -> Result<Self, ProtocolError> {
        if color < 3 {
            Ok(LightState(color))
        } else {
            Err(ProtocolError::BadColor(color))
        }
    }

    pub fn color(self) -> u8 {
        self.0
    }

    pub fn next(self) -> Self {
        LightState((self.0 + 1) % 3)
    }

    pub fn prev(self) -> Self {
        LightState((self.0 + 2) % 3)
    }
}

impl TryFrom<u8> for LightState {
    type Error = ProtocolError;
    fn try_from(c: u8) -> Result<Self, ProtocolError> {
        LightState::new(c)
    }
}

impl From<LightState> for u8 {
    fn from(l: LightState) -> u8 {
        l.0
    }
}

/// Colors visible to a robot during Look.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lights {
    pub own: LightState,
    pub other: LightState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "P: Point")]
pub struct ProtocolOutput<P> {
    pub destination: P,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub new_color: Option<LightState>,
}

impl<P: Point> ProtocolOutput<P> {
    pub fn stay() -> Self {
        ProtocolOutput {
            destination: P::ORIGIN,
            new_color: None,
        }
    }

    pub fn to(destination: P) -> Self {
        ProtocolOutput {
            destination,
            new_color: None,
        }
    }
}

/// One of the three moves the level-based algorithms choose between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Middle,
    Other,
    Stay,
}

impl Rule {
    /// Destination for a robot that sees the other one at `other`.
    pub fn destination<P: Point>(self, other: P) -> P {
        match self {
            Rule::Middle => other * 0.5,
            Rule::Other => other,
            Rule::Stay => P::ORIGIN,
        }
    }
}

/// Which end of the segment the viewer occupies in its own orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Distance to the other robot (own unit) and which side the viewer is on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidedView1D {
    d: f64,
    side: Side,
}

impl SidedView1D {
    pub fn new(d: f64, side: Side) -> Option<Self> {
        (d.is_finite() && d > 0.0).then_some(SidedView1D { d, side })
    }

    /// The viewer is on the left iff it sees the other robot at a positive
    /// coordinate.
    pub fn from_view(view: &LocalView<Coord1>) -> Option<Self> {
        let b = view.other()?.0;
        let side = if b > 0.0 { Side::Left } else { Side::Right };
        SidedView1D::new(b.abs(), side)
    }

    pub fn distance(&self) -> f64 {
        self.d
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn level(&self) -> i32 {
        level(self.d).expect("positive finite by construction")
    }

    /// Local coordinate of the other robot.
    pub fn other(&self) -> Coord1 {
        match self.side {
            Side::Left => Coord1(self.d),
            Side::Right => Coord1(-self.d),
        }
    }
}

pub trait Protocol<P: Point>: Send + Sync + fmt::Debug {
    fn id(&self) -> ProtocolId;

    fn needs_lights(&self) -> bool {
        false
    }

    fn compute(&self, view: &LocalView<P>, lights: Option<Lights>) -> ProtocolOutput<P>;
}

/// Protocol names used in scenario files.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProtocolId {
    RigidCommon,
    Mod3BothAxes,
    Mod4Disoriented,
    OneAxisFaultFree,
    OneAxisSuir,
    LuminousSsync,
    GotoOther,
    Lift(Box<ProtocolId>),
}

impl ProtocolId {
    pub fn lift(inner: ProtocolId) -> Self {
        ProtocolId::Lift(Box::new(inner))
    }

    /// The line protocol underneath any number of lifts.
    pub fn base(&self) -> &ProtocolId {
        match self {
            ProtocolId::Lift(inner) => inner.base(),
            other => other,
        }
    }

    /// Known-flawed protocols kept around to be defeated by the adversary.
    pub fn is_known_flawed(&self) -> bool {
        matches!(self.base(), ProtocolId::LuminousSsync)
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolId::RigidCommon => f.write_str("rigid_common"),
            ProtocolId::Mod3BothAxes => f.write_str("mod3_both_axes"),
            ProtocolId::Mod4Disoriented => f.write_str("mod4_disoriented"),
            ProtocolId::OneAxisFaultFree => f.write_str("one_axis_fault_free"),
            ProtocolId::OneAxisSuir => f.write_str("one_axis_suir"),
            ProtocolId::LuminousSsync => f.write_str("luminous_ssync"),
            ProtocolId::GotoOther => f.write_str("goto_other"),
            ProtocolId::Lift(inner) => write!(f, "lift:{inner}"),
        }
    }
}

impl FromStr for ProtocolId {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, ProtocolError> {
        if let Some(inner) = s.strip_prefix("lift:") {
            return Ok(ProtocolId::lift(inner.parse()?));
        }
        Ok(match s {
            "rigid_common" => ProtocolId::RigidCommon,
            "mod3_both_axes" => ProtocolId::Mod3BothAxes,
            "mod4_disoriented" => ProtocolId::Mod4Disoriented,
            "one_axis_fault_free" => ProtocolId::OneAxisFaultFree,
            "one_axis_suir" => ProtocolId::OneAxisSuir,
            "luminous_ssync" => ProtocolId::LuminousSsync,
            "goto_other" => ProtocolId::GotoOther,
            other => return Err(ProtocolError::Unknown(other.to_owned())),
        })
    }
}

impl Serialize for ProtocolId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ProtocolId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Positions a protocol can be instantiated over.
pub trait ProtocolSpace: Point {
    fn resolve(id: &ProtocolId) -> Result<Box<dyn Protocol<Self>>, ProtocolError>;
}

impl ProtocolSpace for Coord1 {
    fn resolve(id: &ProtocolId) -> Result<Box<dyn Protocol<Coord1>>, ProtocolError> {
        Ok(match id {
            ProtocolId::RigidCommon => Box::new(RigidCommon),
            ProtocolId::Mod3BothAxes => Box::new(Mod3BothAxes),
            ProtocolId::Mod4Disoriented => Box::new(Mod4Disoriented),
            ProtocolId::LuminousSsync => Box::new(LuminousSsync),
            ProtocolId::GotoOther => Box::new(GotoOther),
            ProtocolId::OneAxisFaultFree | ProtocolId::OneAxisSuir | ProtocolId::Lift(_) => {
                return Err(ProtocolError::NeedsPlane { id: id.to_string() })
            }
        })
    }
}

impl ProtocolSpace for Vec2 {
    fn resolve(id: &ProtocolId) -> Result<Box<dyn Protocol<Vec2>>, ProtocolError> {
        Ok(match id {
            ProtocolId::OneAxisFaultFree => Box::new(OneAxisFaultFree),
            ProtocolId::OneAxisSuir => Box::new(OneAxisSuir),
            ProtocolId::LuminousSsync => Box::new(LuminousSsync),
            ProtocolId::GotoOther => Box::new(GotoOther),
            ProtocolId::Lift(inner) => {
                let inner = Coord1::resolve(inner)
                    .map_err(|_| ProtocolError::NotLiftable(inner.to_string()))?;
                Box::new(lift_1d_to_2d(inner))
            }
            ProtocolId::RigidCommon | ProtocolId::Mod3BothAxes | ProtocolId::Mod4Disoriented => {
                return Err(ProtocolError::NeedsLine { id: id.to_string() })
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for s in [
            "rigid_common",
            "mod3_both_axes",
            "mod4_disoriented",
            "one_axis_fault_free",
            "one_axis_suir",
            "luminous_ssync",
            "goto_other",
            "lift:mod4_disoriented",
            "lift:goto_other",
        ] {
            let id: ProtocolId = s.parse().unwrap();
            assert_eq!(id.to_string(), s);
        }
        assert!(matches!(
            "mod5".parse::<ProtocolId>(),
            Err(ProtocolError::Unknown(_))
        ));
    }

    #[test]
    fn resolution_respects_dimension() {
        let lift: ProtocolId = "lift:mod4_disoriented".parse().unwrap();
        assert!(Vec2::resolve(&lift).is_ok());
        assert!(matches!(
            Coord1::resolve(&lift),
            Err(ProtocolError::NeedsPlane { .. })
        ));
        assert!(matches!(
            Vec2::resolve(&ProtocolId::Mod4Disoriented),
            Err(ProtocolError::NeedsLine { .. })
        ));
        let nested: ProtocolId = "lift:lift:goto_other".parse().unwrap();
        assert!(matches!(
            Vec2::resolve(&nested),
            Err(ProtocolError::NotLiftable(_))
        ));
        let planar: ProtocolId = "lift:one_axis_suir".parse().unwrap();
        assert!(matches!(
            Vec2::resolve(&planar),
            Err(ProtocolError::NotLiftable(_))
        ));
    }

    #[test]
    fn light_arithmetic() {
        let c = LightState::new(2).unwrap();
        assert_eq!(c.next().color(), 0);
        assert_eq!(c.prev().color(), 1);
        assert!(LightState::new(3).is_err());
        assert!(serde_json::from_str::<LightState>("5").is_err());
    }

    #[test]
    fn sided_views() {
        let v = SidedView1D::from_view(&LocalView::OtherAt(Coord1(-0.75))).unwrap();
        assert_eq!(v.side(), Side::Right);
        assert_eq!(v.level(), 1);
        assert_eq!(v.other(), Coord1(-0.75));
        assert!(SidedView1D::from_view(&LocalView::Gathered).is_none());
        assert!(SidedView1D::new(0.0, Side::Left).is_none());
    }
}
