use super::{Lights, Protocol, ProtocolId, ProtocolOutput};
use crate::geometry::{Coord1, LocalView, Point};

/// Distances within this relative gap of the unit count as the unit, so a
/// jump of "other + 1" that lands one ulp long still reads as distance 1.
pub const UNIT_SLACK: f64 = 1e-12;

/// Line algorithm for robots sharing axes and unit, with rigid moves.
///
/// Far apart (`d > 1`) both go to the middle. Otherwise the left robot jumps
/// to one unit right of the other robot and the right robot joins the left.
pub fn alg_rigid_common(view: &LocalView<Coord1>) -> ProtocolOutput<Coord1> {
    let Some(Coord1(b)) = view.other() else {
        return ProtocolOutput::stay();
    };
    let dest = if b.abs() > 1.0 + UNIT_SLACK {
        b * 0.5
    } else if b > 0.0 {
        b + 1.0
    } else {
        b
    };
    ProtocolOutput::to(Coord1(dest))
}

pub fn alg_goto_other<P: Point>(view: &LocalView<P>) -> ProtocolOutput<P> {
    view.other()
        .map_or_else(ProtocolOutput::stay, ProtocolOutput::to)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RigidCommon;

impl Protocol<Coord1> for RigidCommon {
    fn id(&self) -> ProtocolId {
        ProtocolId::RigidCommon
    }

    fn compute(&self, view: &LocalView<Coord1>, _: Option<Lights>) -> ProtocolOutput<Coord1> {
        alg_rigid_common(view)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GotoOther;

impl<P: Point> Protocol<P> for GotoOther {
    fn id(&self) -> ProtocolId {
        ProtocolId::GotoOther
    }

    fn compute(&self, view: &LocalView<P>, _: Option<Lights>) -> ProtocolOutput<P> {
        alg_goto_other(view)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;

    fn dest(b: f64) -> f64 {
        alg_rigid_common(&LocalView::OtherAt(Coord1(b)))
            .destination
            .0
    }

    #[test]
    fn rigid_common_examples() {
        assert_eq!(dest(2.0), 1.0);
        assert_eq!(dest(0.8), 1.8);
        assert_eq!(dest(-0.8), -0.8);
        // d = 1 is the near case
        assert_eq!(dest(1.0), 2.0);
        assert_eq!(dest(-1.0), -1.0);
        assert_eq!(dest(-(1.0 + f64::EPSILON)), -(1.0 + f64::EPSILON));
        assert_eq!(dest(-1.001), -0.5005);
        assert_eq!(dest(-3.0), -1.5);
        assert_eq!(
            alg_rigid_common(&LocalView::Gathered),
            ProtocolOutput::stay()
        );
    }

    #[test]
    fn goto_other_examples() {
        let v = LocalView::OtherAt(Vec2::new(3.0, 4.0));
        assert_eq!(alg_goto_other(&v).destination, Vec2::new(3.0, 4.0));
        assert_eq!(
            alg_goto_other(&LocalView::OtherAt(Coord1(-1.0))).destination,
            Coord1(-1.0)
        );
        assert_eq!(
            alg_goto_other::<Vec2>(&LocalView::Gathered).destination,
            Vec2::ORIGIN
        );
    }

    #[test]
    fn never_farther_than_other_plus_one() {
        for b in [-5.0, -1.0, -0.3, 0.01, 0.5, 1.0, 1.01, 40.0] {
            assert!(dest(b).abs() <= b.abs() + 1.0);
        }
    }
}
