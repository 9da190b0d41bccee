//! Three-color luminous algorithm for semi-synchronous robots.
//!
//! KNOWN FLAWED. Its correctness argument for the crash-free case does not
//! hold, and no algorithm can solve crash-tolerant rendezvous in SSYNC even
//! with unbounded lights. It ships only as a subject for the impossibility
//! adversary in [`crate::adversary`].

use super::{Lights, Protocol, ProtocolId, ProtocolOutput, Rule};
use crate::geometry::{LocalView, Point};

/// Same colors: advance own color and go to the middle. One ahead: go to the
/// other robot. One behind: step own color back and wait.
pub fn alg_luminous_ssync<P: Point>(view: &LocalView<P>, lights: Lights) -> ProtocolOutput<P> {
    let Some(other) = view.other() else {
        return ProtocolOutput::stay();
    };
    let (rule, new_color) = if lights.own == lights.other {
        (Rule::Middle, Some(lights.own.next()))
    } else if lights.own == lights.other.next() {
        (Rule::Other, None)
    } else {
        (Rule::Stay, Some(lights.own.prev()))
    };
    ProtocolOutput {
        destination: rule.destination(other),
        new_color,
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LuminousSsync;

impl<P: Point> Protocol<P> for LuminousSsync {
    fn id(&self) -> ProtocolId {
        ProtocolId::LuminousSsync
    }

    fn needs_lights(&self) -> bool {
        true
    }

    fn compute(&self, view: &LocalView<P>, lights: Option<Lights>) -> ProtocolOutput<P> {
        let lights = lights.unwrap_or(Lights {
            own: Default::default(),
            other: Default::default(),
        });
        alg_luminous_ssync(view, lights)
    }
}
