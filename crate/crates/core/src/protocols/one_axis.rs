//! Algorithms for robots that share only the y-axis (a common North).
//!
//! A configuration is symmetric when both robots have the same y-coordinate:
//! neither can tell left from right, so both head for the northern apex of
//! the equilateral triangle built on the segment. Any other configuration has
//! a unique northern robot, which both robots use to orient the joining line.

use super::{
    levels::mod3_rule, Lights, Protocol, ProtocolId, ProtocolOutput, Rule, Side, SidedView1D,
};
use crate::geometry::{LocalView, Point, Vec2};

/// Northern apex of the equilateral triangle on `{(0,0), (x,0)}`.
pub fn equilateral_apex(x: f64) -> Vec2 {
    Vec2::new(x / 2.0, (x * 3f64.sqrt() / 2.0).abs())
}

/// Unit vector along the joining line pointing at the northern robot.
///
/// Depends only on the y-ordering of the robots, so it is the same for both
/// robots regardless of scale or a mirrored x-axis. `None` for symmetric views.
pub fn north_orientation(other: Vec2) -> Option<Vec2> {
    if other.y == 0.0 {
        return None;
    }
    let sign = if other.y > 0.0 { 1.0 } else { -1.0 };
    Some(other * (sign / other.norm()))
}

pub fn alg_one_axis_fault_free(view: &LocalView<Vec2>) -> ProtocolOutput<Vec2> {
    match view.other() {
        None => ProtocolOutput::stay(),
        Some(q) if q.y == 0.0 => ProtocolOutput::to(equilateral_apex(q.x)),
        Some(q) if q.y > 0.0 => ProtocolOutput::to(q),
        // the northern robot waits
        Some(_) => ProtocolOutput::stay(),
    }
}

pub fn alg_one_axis_suir(view: &LocalView<Vec2>) -> ProtocolOutput<Vec2> {
    let Some(q) = view.other() else {
        return ProtocolOutput::stay();
    };
    if north_orientation(q).is_none() {
        return ProtocolOutput::to(equilateral_apex(q.x));
    }
    // the line points north, so the southern robot is the left one
    let side = if q.y > 0.0 { Side::Left } else { Side::Right };
    let rule = SidedView1D::new(q.norm(), side).map_or(Rule::Stay, mod3_rule);
    ProtocolOutput::to(rule.destination(q))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OneAxisFaultFree;

impl Protocol<Vec2> for OneAxisFaultFree {
    fn id(&self) -> ProtocolId {
        ProtocolId::OneAxisFaultFree
    }

    fn compute(&self, view: &LocalView<Vec2>, _: Option<Lights>) -> ProtocolOutput<Vec2> {
        alg_one_axis_fault_free(view)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OneAxisSuir;

impl Protocol<Vec2> for OneAxisSuir {
    fn id(&self) -> ProtocolId {
        ProtocolId::OneAxisSuir
    }

    fn compute(&self, view: &LocalView<Vec2>, _: Option<Lights>) -> ProtocolOutput<Vec2> {
        alg_one_axis_suir(view)
    }
}
