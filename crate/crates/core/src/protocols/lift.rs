//! Running a line algorithm in the plane.
//!
//! A robot orients the joining line by the lexicographic order of its own
//! local coordinates, reads the other robot's coordinate `b` on that oriented
//! line, runs the line algorithm on `{0, b}` and maps the answer back onto
//! the line. Destinations never leave the line, and since a robot's frame is
//! fixed, its orientation of the line never changes before gathering.

use super::{Lights, Protocol, ProtocolId, ProtocolOutput};
use crate::geometry::{lex_positive, Coord1, LocalView, Point, Vec2};

/// The viewer's private unit vector orienting the line through `{0, other}`:
/// from the lexicographically smaller point to the larger one.
pub fn orientation_vector(other: Vec2) -> Vec2 {
    let unit = other * (1.0 / other.norm());
    if lex_positive(other) {
        unit
    } else {
        -unit
    }
}

#[derive(Debug)]
pub struct Lifted {
    inner: Box<dyn Protocol<Coord1>>,
}

pub fn lift_1d_to_2d(inner: Box<dyn Protocol<Coord1>>) -> Lifted {
    Lifted { inner }
}

impl Lifted {
    /// Line coordinate of `other` along the viewer's orientation.
    pub fn line_coordinate(other: Vec2) -> Coord1 {
        let len = other.norm();
        Coord1(if lex_positive(other) { len } else { -len })
    }
}

impl Protocol<Vec2> for Lifted {
    fn id(&self) -> ProtocolId {
        ProtocolId::lift(self.inner.id())
    }

    fn needs_lights(&self) -> bool {
        self.inner.needs_lights()
    }

    fn compute(&self, view: &LocalView<Vec2>, lights: Option<Lights>) -> ProtocolOutput<Vec2> {
        let Some(q) = view.other() else {
            let out = self.inner.compute(&LocalView::Gathered, lights);
            return ProtocolOutput {
                destination: Vec2::ORIGIN,
                new_color: out.new_color,
            };
        };
        let b = Self::line_coordinate(q);
        let out = self.inner.compute(&LocalView::OtherAt(b), lights);
        // p̄·v written as a multiple of q, so "other" and "middle" are exact
        ProtocolOutput {
            destination: q * (out.destination.0 / b.0),
            new_color: out.new_color,
        }
    }
}
