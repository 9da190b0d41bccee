//! The level-driven line algorithms.
//!
//! A robot at own-unit distance `d` from the other robot has level `i` with
//! `d ∈ [2^-i, 2^(1-i))`. The move depends on `i` modulo 3 (robots agreeing on
//! the line's orientation) or modulo 4 (no agreement), and on the side.

use super::{Protocol, ProtocolId, ProtocolOutput, Rule, Side, SidedView1D};
use crate::geometry::{Coord1, LocalView};
use crate::protocols::Lights;

pub fn mod3_rule(view: SidedView1D) -> Rule {
    match (view.level().rem_euclid(3), view.side()) {
        (0, _) => Rule::Middle,
        (1, Side::Left) => Rule::Middle,
        (1, Side::Right) => Rule::Other,
        (2, Side::Left) => Rule::Other,
        (2, Side::Right) => Rule::Middle,
        _ => unreachable!(),
    }
}

pub fn mod4_rule(view: SidedView1D) -> Rule {
    match (view.level().rem_euclid(4), view.side()) {
        (0 | 2, _) => Rule::Middle,
        (1, Side::Left) => Rule::Middle,
        (1, Side::Right) => Rule::Other,
        (3, Side::Left) => Rule::Other,
        (3, Side::Right) => Rule::Middle,
        _ => unreachable!(),
    }
}

pub fn alg_mod3_both_axes(view: SidedView1D) -> ProtocolOutput<Coord1> {
    ProtocolOutput::to(mod3_rule(view).destination(view.other()))
}

pub fn alg_mod4_disoriented(view: SidedView1D) -> ProtocolOutput<Coord1> {
    ProtocolOutput::to(mod4_rule(view).destination(view.other()))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Mod3BothAxes;

impl Protocol<Coord1> for Mod3BothAxes {
    fn id(&self) -> ProtocolId {
        ProtocolId::Mod3BothAxes
    }

    fn compute(&self, view: &LocalView<Coord1>, _: Option<Lights>) -> ProtocolOutput<Coord1> {
        SidedView1D::from_view(view).map_or_else(ProtocolOutput::stay, alg_mod3_both_axes)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Mod4Disoriented;

impl Protocol<Coord1> for Mod4Disoriented {
    fn id(&self) -> ProtocolId {
        ProtocolId::Mod4Disoriented
    }

    fn compute(&self, view: &LocalView<Coord1>, _: Option<Lights>) -> ProtocolOutput<Coord1> {
        SidedView1D::from_view(view).map_or_else(ProtocolOutput::stay, alg_mod4_disoriented)
    }
}
