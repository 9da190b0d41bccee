//! Coordinate frames for the two-robot model.
//!
//! Positions live in a global analysis frame that no robot can access. Each
//! robot observes the world through a private similarity (uniform scale,
//! rotation, optional reflection across its y-axis) that is fixed for the
//! whole execution. The set of similarities an adversary may hand out is
//! controlled by the [`AgreementMode`].
//!
//! Everything here is a pure function of immutable values.

use std::f64::consts::TAU;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::precise;

/// Default gathering tolerance, in global units.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Tolerance on the projection residual accepted by [`to_line`].
pub const LINE_RESIDUAL: f64 = 1e-9;

/// Angular slack used when checking that a rotation is the identity.
const ANGLE_SLACK: f64 = 1e-12;

/// A vector whose x-component is within this fraction of its length is
/// treated as vertical by [`lex_positive`].
const LEX_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("level is undefined for distance {0}")]
    LevelDomain(f64),
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("scale must be a positive finite real, got {0}")]
    BadScale(f64),
    #[error("a line frame needs two distinct positions")]
    Coincident,
    #[error("point lies {residual:e} away from the line")]
    OffLine { residual: f64 },
}

/// Which transformations the adversary may assign to robots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementMode {
    /// Shared axes and unit: every robot uses the identity.
    BothAxesCommonUnit,
    /// Shared axes, private unit distance.
    BothAxesAnyUnit,
    /// Shared y-axis only; the x-axis may be mirrored.
    OneCommonAxis,
    /// No agreement at all: scale, rotation, reflection.
    Disoriented,
    /// Robots on a line, possibly disagreeing on its direction.
    #[serde(rename = "line1d_disoriented")]
    Line1DDisoriented,
    /// Robots on a line, agreeing on its direction.
    #[serde(rename = "line1d_oriented")]
    Line1DOriented,
}

impl AgreementMode {
    pub const ALL: [AgreementMode; 6] = [
        AgreementMode::BothAxesCommonUnit,
        AgreementMode::BothAxesAnyUnit,
        AgreementMode::OneCommonAxis,
        AgreementMode::Disoriented,
        AgreementMode::Line1DDisoriented,
        AgreementMode::Line1DOriented,
    ];

    pub fn is_line(self) -> bool {
        matches!(
            self,
            AgreementMode::Line1DDisoriented | AgreementMode::Line1DOriented
        )
    }
}

/// Arithmetic shared by line and plane positions.
pub trait Point:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
    + Neg<Output = Self>
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    type Map: Conformal<Self>;

    const ORIGIN: Self;
    const IS_LINE: bool;

    fn norm(self) -> f64;
    fn is_finite(self) -> bool;

    fn distance(self, other: Self) -> f64 {
        (other - self).norm()
    }
}

/// A linear conformal map fixing the origin.
pub trait Conformal<P>:
    Copy + Debug + PartialEq + Serialize + DeserializeOwned + Send + Sync + 'static
{
    fn identity() -> Self;
    fn apply(&self, p: P) -> P;
    fn inverse(&self) -> Self;
    /// `self ∘ inner`: apply `inner` first.
    fn compose(&self, inner: &Self) -> Self;
    fn scale(&self) -> f64;
    /// Whether the adversary may hand this map out under `mode`.
    fn admissible(&self, mode: AgreementMode) -> bool;
}

// ---------------------------------------------------------------------------
// Plane

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Serialize for Vec2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Pair(
            #[serde(serialize_with = "precise::serialize")] f64,
            #[serde(serialize_with = "precise::serialize")] f64,
        );
        Pair(self.x, self.y).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vec2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (x, y) = <(f64, f64)>::deserialize(d)?;
        Ok(Vec2::new(x, y))
    }
}

impl Point for Vec2 {
    type Map = Similarity;

    const ORIGIN: Vec2 = Vec2::new(0.0, 0.0);
    const IS_LINE: bool = false;

    fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Private frame of a robot in the plane: `scale · rotation · reflection`,
/// where the reflection mirrors the x-axis and is applied first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SimilarityRepr", into = "SimilarityRepr")]
pub struct Similarity {
    scale: f64,
    rotation: f64,
    reflect: bool,
}

#[derive(Serialize, Deserialize)]
struct SimilarityRepr {
    #[serde(serialize_with = "precise::serialize")]
    scale: f64,
    #[serde(default, serialize_with = "precise::serialize")]
    rotation: f64,
    #[serde(default)]
    reflect: bool,
}

impl TryFrom<SimilarityRepr> for Similarity {
    type Error = GeometryError;
    fn try_from(r: SimilarityRepr) -> Result<Self, GeometryError> {
        Similarity::new(r.scale, r.rotation, r.reflect)
    }
}

impl From<Similarity> for SimilarityRepr {
    fn from(s: Similarity) -> Self {
        SimilarityRepr {
            scale: s.scale,
            rotation: s.rotation,
            reflect: s.reflect,
        }
    }
}

impl Similarity {
    /// `rotation` is reduced into `[0, 2π)`.
    pub fn new(scale: f64, rotation: f64, reflect: bool) -> Result<Self, GeometryError> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(GeometryError::BadScale(scale));
        }
        if !rotation.is_finite() {
            return Err(GeometryError::NonFinite(rotation));
        }
        Ok(Similarity {
            scale,
            rotation: normalize_angle(rotation),
            reflect,
        })
    }

    pub fn scaling(scale: f64) -> Result<Self, GeometryError> {
        Similarity::new(scale, 0.0, false)
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn reflects(&self) -> bool {
        self.reflect
    }

    fn unrotated(&self) -> bool {
        self.rotation < ANGLE_SLACK || TAU - self.rotation < ANGLE_SLACK
    }
}

fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl Conformal<Vec2> for Similarity {
    fn identity() -> Self {
        Similarity {
            scale: 1.0,
            rotation: 0.0,
            reflect: false,
        }
    }

    fn apply(&self, p: Vec2) -> Vec2 {
        let (x, y) = if self.reflect {
            (-p.x, p.y)
        } else {
            (p.x, p.y)
        };
        let (sin, cos) = self.rotation.sin_cos();
        Vec2::new(
            self.scale * (cos * x - sin * y),
            self.scale * (sin * x + cos * y),
        )
    }

    fn inverse(&self) -> Self {
        // (s R F)⁻¹ = F R⁻¹ / s, and F R(-θ) = R(θ) F.
        let rotation = if self.reflect {
            self.rotation
        } else {
            normalize_angle(-self.rotation)
        };
        Similarity {
            scale: 1.0 / self.scale,
            rotation,
            reflect: self.reflect,
        }
    }

    fn compose(&self, inner: &Self) -> Self {
        let turn = if self.reflect {
            -inner.rotation
        } else {
            inner.rotation
        };
        Similarity {
            scale: self.scale * inner.scale,
            rotation: normalize_angle(self.rotation + turn),
            reflect: self.reflect ^ inner.reflect,
        }
    }

    fn scale(&self) -> f64 {
        self.scale
    }

    fn admissible(&self, mode: AgreementMode) -> bool {
        match mode {
            AgreementMode::BothAxesCommonUnit => {
                (self.scale - 1.0).abs() <= ANGLE_SLACK && self.unrotated() && !self.reflect
            }
            AgreementMode::BothAxesAnyUnit => self.unrotated() && !self.reflect,
            AgreementMode::OneCommonAxis => self.unrotated(),
            AgreementMode::Disoriented => true,
            AgreementMode::Line1DDisoriented | AgreementMode::Line1DOriented => false,
        }
    }
}

// ---------------------------------------------------------------------------
// Line

/// A coordinate on a line.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Coord1(pub f64);

impl Add for Coord1 {
    type Output = Coord1;
    fn add(self, o: Coord1) -> Coord1 {
        Coord1(self.0 + o.0)
    }
}

impl Sub for Coord1 {
    type Output = Coord1;
    fn sub(self, o: Coord1) -> Coord1 {
        Coord1(self.0 - o.0)
    }
}

impl Mul<f64> for Coord1 {
    type Output = Coord1;
    fn mul(self, k: f64) -> Coord1 {
        Coord1(self.0 * k)
    }
}

impl Neg for Coord1 {
    type Output = Coord1;
    fn neg(self) -> Coord1 {
        Coord1(-self.0)
    }
}

impl Serialize for Coord1 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        precise::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Coord1 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        f64::deserialize(d).map(Coord1)
    }
}

impl Point for Coord1 {
    type Map = LineSimilarity;

    const ORIGIN: Coord1 = Coord1(0.0);
    const IS_LINE: bool = true;

    fn norm(self) -> f64 {
        self.0.abs()
    }

    fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

/// Private frame of a robot on a line: `a ↦ sign · scale · a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LineSimilarityRepr", into = "LineSimilarityRepr")]
pub struct LineSimilarity {
    scale: f64,
    flip: bool,
}

#[derive(Serialize, Deserialize)]
struct LineSimilarityRepr {
    #[serde(serialize_with = "precise::serialize")]
    scale: f64,
    #[serde(default = "plus_one")]
    sign: i8,
}

fn plus_one() -> i8 {
    1
}

impl TryFrom<LineSimilarityRepr> for LineSimilarity {
    type Error = String;
    fn try_from(r: LineSimilarityRepr) -> Result<Self, String> {
        let flip = match r.sign {
            1 => false,
            -1 => true,
            other => return Err(format!("sign must be 1 or -1, got {other}")),
        };
        LineSimilarity::new(r.scale, flip).map_err(|e| e.to_string())
    }
}

impl From<LineSimilarity> for LineSimilarityRepr {
    fn from(s: LineSimilarity) -> Self {
        LineSimilarityRepr {
            scale: s.scale,
            sign: s.sign() as i8,
        }
    }
}

impl LineSimilarity {
    pub fn new(scale: f64, flip: bool) -> Result<Self, GeometryError> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(GeometryError::BadScale(scale));
        }
        Ok(LineSimilarity { scale, flip })
    }

    pub fn sign(&self) -> f64 {
        if self.flip {
            -1.0
        } else {
            1.0
        }
    }

    pub fn flips(&self) -> bool {
        self.flip
    }
}

impl Conformal<Coord1> for LineSimilarity {
    fn identity() -> Self {
        LineSimilarity {
            scale: 1.0,
            flip: false,
        }
    }

    fn apply(&self, p: Coord1) -> Coord1 {
        Coord1(self.sign() * self.scale * p.0)
    }

    fn inverse(&self) -> Self {
        LineSimilarity {
            scale: 1.0 / self.scale,
            flip: self.flip,
        }
    }

    fn compose(&self, inner: &Self) -> Self {
        LineSimilarity {
            scale: self.scale * inner.scale,
            flip: self.flip ^ inner.flip,
        }
    }

    fn scale(&self) -> f64 {
        self.scale
    }

    fn admissible(&self, mode: AgreementMode) -> bool {
        match mode {
            AgreementMode::Line1DOriented => !self.flip,
            AgreementMode::Line1DDisoriented => true,
            _ => false,
        }
    }
}

// ---------------------------------------------------------------------------
// Views and levels

/// What a robot sees during Look, in its own frame with itself at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[serde(bound = "P: Point")]
pub enum LocalView<P> {
    Gathered,
    OtherAt(P),
}

impl<P: Point> LocalView<P> {
    pub fn other(&self) -> Option<P> {
        match *self {
            LocalView::Gathered => None,
            LocalView::OtherAt(p) => Some(p),
        }
    }
}

/// Builds the view of robot `viewer` (0 or 1).
///
/// Robots closer than `epsilon` in the global frame see each other as
/// gathered; otherwise the other robot appears at `h(r_other - r_viewer)`.
pub fn local_view<P: Point>(
    positions: [P; 2],
    viewer: usize,
    h: &P::Map,
    epsilon: f64,
) -> LocalView<P> {
    let offset = positions[1 - viewer] - positions[viewer];
    if offset.norm() <= epsilon {
        return LocalView::Gathered;
    }
    let seen = h.apply(offset);
    if seen == P::ORIGIN {
        // only reachable through underflow of a huge down-scaling
        LocalView::Gathered
    } else {
        LocalView::OtherAt(seen)
    }
}

/// The unique `i` with `2^-i ≤ d < 2^(1-i)`.
///
/// Read straight from the binary exponent, so boundaries are exact.
pub fn level(d: f64) -> Result<i32, GeometryError> {
    if !(d.is_finite() && d > 0.0) {
        return Err(GeometryError::LevelDomain(d));
    }
    let biased = ((d.to_bits() >> 52) & 0x7ff) as i32;
    if biased == 0 {
        // subnormal: lift into the normal range first
        return level(d * 2f64.powi(64)).map(|i| i + 64);
    }
    Ok(1023 - biased)
}

/// Lexicographic sign of a nonzero vector: `x > 0`, or `x = 0` and `y > 0`.
///
/// An x-component within `1e-12 · |v|` of zero counts as zero, so a vertical
/// line stays vertical under rotation round-off.
pub fn lex_positive(v: Vec2) -> bool {
    let slack = LEX_SLACK * v.norm();
    if v.x > slack {
        true
    } else if v.x < -slack {
        false
    } else {
        v.y > 0.0
    }
}

/// An oriented line `{origin + a·direction}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFrame {
    pub origin: Vec2,
    pub direction: Vec2,
}

/// Frame of the line through both robots, anchored at the lexicographically
/// smaller position and pointing at the larger one.
pub fn line_frame(config: [Vec2; 2]) -> Result<LineFrame, GeometryError> {
    let diff = config[1] - config[0];
    let len = diff.norm();
    if len == 0.0 {
        return Err(GeometryError::Coincident);
    }
    if !len.is_finite() {
        return Err(GeometryError::NonFinite(len));
    }
    let (origin, towards) = if lex_positive(diff) {
        (config[0], diff)
    } else {
        (config[1], -diff)
    };
    Ok(LineFrame {
        origin,
        direction: towards * (1.0 / len),
    })
}

pub fn to_line(frame: &LineFrame, p: Vec2) -> Result<Coord1, GeometryError> {
    if !p.is_finite() {
        return Err(GeometryError::NonFinite(if p.x.is_finite() {
            p.y
        } else {
            p.x
        }));
    }
    let rel = p - frame.origin;
    let a = rel.dot(frame.direction);
    let residual = (rel - frame.direction * a).norm();
    if residual > LINE_RESIDUAL * rel.norm().max(1.0) {
        return Err(GeometryError::OffLine { residual });
    }
    Ok(Coord1(a))
}

pub fn from_line(frame: &LineFrame, a: Coord1) -> Vec2 {
    frame.origin + frame.direction * a.0
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use approx::assert_relative_eq;
    use proptest::prelude::*;

    use super::*;

    fn close(a: Vec2, b: Vec2, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    /// Independent oracle: walk powers of two until the interval contains d.
    fn level_by_search(d: f64) -> i32 {
        let mut i = 0i32;
        loop {
            let lo = 2f64.powi(-i);
            let hi = 2f64.powi(1 - i);
            if d < lo {
                i += 1;
            } else if d >= hi {
                i -= 1;
            } else {
                return i;
            }
        }
    }

    #[test]
    fn level_examples() {
        assert_eq!(level(1.0), Ok(0));
        assert_eq!(level(0.75), Ok(1));
        assert_eq!(level(5.0), Ok(-2));
        assert_eq!(level(0.3), Ok(2));
        assert_eq!(level(0.14), Ok(3));
        assert_eq!(level(2.0), Ok(-1));
        assert_eq!(level(0.5), Ok(1));
        assert_eq!(level(f64::MIN_POSITIVE / 8.0), Ok(1025));
    }

    #[test]
    fn level_rejects_bad_distances() {
        for d in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(level(d).is_err(), "{d}");
        }
    }

    #[test]
    fn level_matches_search_at_boundaries() {
        for e in -60..60 {
            let p = 2f64.powi(e);
            for d in [p, p * (1.0 - f64::EPSILON / 2.0), p * (1.0 + f64::EPSILON)] {
                assert_eq!(level(d).unwrap(), level_by_search(d), "d = {d:e}");
            }
        }
    }

    #[test]
    fn similarity_examples() {
        let s = Similarity::new(2.0, 0.0, false).unwrap();
        assert_eq!(s.apply(Vec2::new(1.0, 0.0)), Vec2::new(2.0, 0.0));
        let r = Similarity::new(1.0, PI, false).unwrap();
        assert!(close(
            r.apply(Vec2::new(1.0, 0.0)),
            Vec2::new(-1.0, 0.0),
            1e-15
        ));
        let l = LineSimilarity::new(1.0, true).unwrap();
        assert_eq!(l.apply(Coord1(3.0)), Coord1(-3.0));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Similarity::identity().inverse(), Similarity::identity());
        let half = Similarity::scaling(2.0).unwrap().inverse();
        assert_eq!(half.scale(), 0.5);
        assert_eq!(half.rotation(), 0.0);
        let quarter = Similarity::new(1.0, FRAC_PI_2, false).unwrap().inverse();
        assert_relative_eq!(quarter.rotation(), 3.0 * FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn bad_scales_rejected() {
        assert!(Similarity::new(0.0, 0.0, false).is_err());
        assert!(Similarity::new(-1.0, 0.0, false).is_err());
        assert!(Similarity::new(1.0, f64::NAN, false).is_err());
        assert!(LineSimilarity::new(f64::INFINITY, false).is_err());
    }

    #[test]
    fn local_view_examples() {
        let id = Similarity::identity();
        let v = local_view([Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0)], 0, &id, 1e-9);
        assert_eq!(v, LocalView::OtherAt(Vec2::new(2.0, 0.0)));

        let same = [Vec2::new(1.0, 1.0), Vec2::new(1.0, 1.0)];
        let wild = Similarity::new(3.0, 1.0, true).unwrap();
        assert_eq!(local_view(same, 0, &wild, 1e-9), LocalView::Gathered);

        // by hand: (2,0) rotated by π is (-2,0), halved is (-1,0)
        let h = Similarity::new(0.5, PI, false).unwrap();
        let v = local_view([Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0)], 0, &h, 1e-9);
        let p = v.other().unwrap();
        assert!(close(p, Vec2::new(-1.0, 0.0), 1e-12), "{p:?}");
    }

    #[test]
    fn local_view_respects_epsilon() {
        let id = Similarity::identity();
        let pos = [Vec2::new(0.0, 0.0), Vec2::new(1e-12, 0.0)];
        assert_eq!(local_view(pos, 1, &id, 1e-9), LocalView::Gathered);
    }

    #[test]
    fn line_frame_examples() {
        let f = line_frame([Vec2::new(0.0, 0.0), Vec2::new(3.0, 0.0)]).unwrap();
        assert_eq!(f.origin, Vec2::new(0.0, 0.0));
        assert_eq!(f.direction, Vec2::new(1.0, 0.0));

        let f = line_frame([Vec2::new(0.0, 2.0), Vec2::new(0.0, 0.0)]).unwrap();
        assert_eq!(f.origin, Vec2::new(0.0, 0.0));
        assert_eq!(f.direction, Vec2::new(0.0, 1.0));

        // (3,4) normalized
        let f = line_frame([Vec2::new(4.0, 5.0), Vec2::new(1.0, 1.0)]).unwrap();
        assert_eq!(f.origin, Vec2::new(1.0, 1.0));
        assert!(close(f.direction, Vec2::new(0.6, 0.8), 1e-15));

        assert_eq!(
            line_frame([Vec2::new(1.0, 1.0), Vec2::new(1.0, 1.0)]),
            Err(GeometryError::Coincident)
        );
    }

    #[test]
    fn to_line_examples() {
        let x_axis = LineFrame {
            origin: Vec2::ORIGIN,
            direction: Vec2::new(1.0, 0.0),
        };
        assert_eq!(to_line(&x_axis, Vec2::new(5.0, 0.0)), Ok(Coord1(5.0)));
        assert_eq!(from_line(&x_axis, Coord1(0.0)), Vec2::ORIGIN);

        let slanted = line_frame([Vec2::new(1.0, 1.0), Vec2::new(4.0, 5.0)]).unwrap();
        // (3,4)·(0.6,0.8) = 5
        assert_relative_eq!(
            to_line(&slanted, Vec2::new(4.0, 5.0)).unwrap().0,
            5.0,
            epsilon = 1e-12
        );
        assert!(matches!(
            to_line(&slanted, Vec2::new(4.0, 1.0)),
            Err(GeometryError::OffLine { .. })
        ));
    }

    #[test]
    fn mode_membership() {
        let id = Similarity::identity();
        let scaled = Similarity::scaling(2.0).unwrap();
        let mirrored = Similarity::new(2.0, 0.0, true).unwrap();
        let turned = Similarity::new(1.0, 0.3, false).unwrap();
        use AgreementMode::*;
        assert!(id.admissible(BothAxesCommonUnit));
        assert!(!scaled.admissible(BothAxesCommonUnit));
        assert!(scaled.admissible(BothAxesAnyUnit));
        assert!(!mirrored.admissible(BothAxesAnyUnit));
        assert!(mirrored.admissible(OneCommonAxis));
        assert!(!turned.admissible(OneCommonAxis));
        assert!(turned.admissible(Disoriented));
        assert!(!id.admissible(Line1DOriented));

        let flip = LineSimilarity::new(1.0, true).unwrap();
        assert!(flip.admissible(Line1DDisoriented));
        assert!(!flip.admissible(Line1DOriented));
        assert!(!flip.admissible(Disoriented));
    }

    #[test]
    fn scenario_json_shapes() {
        let s: Similarity =
            serde_json::from_str(r#"{"scale": 2, "rotation": 7, "reflect": true}"#).unwrap();
        assert_relative_eq!(s.rotation(), 7.0 - TAU);
        assert!(serde_json::from_str::<Similarity>(r#"{"scale": -2}"#).is_err());
        let l: LineSimilarity = serde_json::from_str(r#"{"scale": 1, "sign": -1}"#).unwrap();
        assert!(l.flips());
        assert!(serde_json::from_str::<LineSimilarity>(r#"{"scale": 1, "sign": 0}"#).is_err());
        let v: LocalView<Vec2> = serde_json::from_str(r#"{"other_at": [1, 2]}"#).unwrap();
        assert_eq!(v, LocalView::OtherAt(Vec2::new(1.0, 2.0)));
        let g: LocalView<Coord1> = serde_json::from_str(r#""gathered""#).unwrap();
        assert_eq!(g, LocalView::Gathered);
    }

    fn finite() -> impl Strategy<Value = f64> {
        -1e3..1e3f64
    }

    fn similarity() -> impl Strategy<Value = Similarity> {
        (1e-3..1e3f64, 0.0..TAU, any::<bool>())
            .prop_map(|(s, r, f)| Similarity::new(s, r, f).unwrap())
    }

    /// Projects raw parameters onto the similarities `mode` admits.
    fn admissible_for(mode: AgreementMode, scale: f64, rotation: f64, reflect: bool) -> Similarity {
        match mode {
            AgreementMode::BothAxesCommonUnit => Similarity::identity(),
            AgreementMode::BothAxesAnyUnit => Similarity::scaling(scale).unwrap(),
            AgreementMode::OneCommonAxis => Similarity::new(scale, 0.0, reflect).unwrap(),
            _ => Similarity::new(scale, rotation, reflect).unwrap(),
        }
    }

    proptest! {
        #[test]
        fn inverse_round_trips(h in similarity(), x in finite(), y in finite()) {
            let p = Vec2::new(x, y);
            let back = h.inverse().apply(h.apply(p));
            prop_assert!(close(back, p, 1e-12 * p.norm().max(1.0)), "{back:?} vs {p:?}");
        }

        #[test]
        fn compose_matches_sequential_application(
            a in similarity(), b in similarity(), x in finite(), y in finite()
        ) {
            let p = Vec2::new(x, y);
            let direct = a.apply(b.apply(p));
            let composed = a.compose(&b).apply(p);
            prop_assert!(close(direct, composed, 1e-9 * direct.norm().max(1.0)));
        }

        #[test]
        fn planar_modes_closed_under_composition(
            idx in 0usize..4,
            (s1, r1, f1) in (1e-3..1e3f64, 0.0..TAU, any::<bool>()),
            (s2, r2, f2) in (1e-3..1e3f64, 0.0..TAU, any::<bool>()),
        ) {
            let mode = AgreementMode::ALL[idx];
            let a = admissible_for(mode, s1, r1, f1);
            let b = admissible_for(mode, s2, r2, f2);
            prop_assert!(a.admissible(mode) && b.admissible(mode));
            prop_assert!(a.compose(&b).admissible(mode));
        }

        #[test]
        fn line_modes_closed_under_composition(
            s1 in 1e-3..1e3f64, s2 in 1e-3..1e3f64, f1 in any::<bool>(), f2 in any::<bool>()
        ) {
            let a = LineSimilarity::new(s1, f1).unwrap();
            let b = LineSimilarity::new(s2, f2).unwrap();
            prop_assert!(a.compose(&b).admissible(AgreementMode::Line1DDisoriented));
            if !f1 && !f2 {
                prop_assert!(a.compose(&b).admissible(AgreementMode::Line1DOriented));
            }
            let p = Coord1(s1 - s2);
            let back = a.inverse().apply(a.apply(p));
            prop_assert!((back.0 - p.0).abs() <= 1e-12 * p.0.abs().max(1.0));
        }

        #[test]
        fn level_is_locally_constant(d in 1e-12..1e12f64, eta in 0.0..1.0f64) {
            let i = level(d).unwrap();
            let top = 2f64.powi(1 - i);
            let nudged = d + (top - d) * eta * 0.999;
            if nudged < top {
                prop_assert_eq!(level(nudged).unwrap(), i);
            }
            prop_assert_eq!(i, level_by_search(d));
        }

        #[test]
        fn level_shifts_when_halved(d in 1e-12..1e12f64) {
            let i = level(d).unwrap();
            let lo = 2f64.powi(-i);
            let hi = 2f64.powi(1 - i);
            prop_assume!(d - lo > 1e-9 * lo && hi - d > 1e-9 * hi);
            prop_assert_eq!(level(d / 2.0).unwrap(), i + 1);
        }

        #[test]
        fn identity_views_are_antisymmetric(
            ax in finite(), ay in finite(), bx in finite(), by in finite()
        ) {
            let pos = [Vec2::new(ax, ay), Vec2::new(bx, by)];
            let id = Similarity::identity();
            match (local_view(pos, 0, &id, 1e-9), local_view(pos, 1, &id, 1e-9)) {
                (LocalView::OtherAt(p), LocalView::OtherAt(q)) => prop_assert_eq!(p, -q),
                (LocalView::Gathered, LocalView::Gathered) => {}
                other => prop_assert!(false, "asymmetric views {other:?}"),
            }
        }

        #[test]
        fn line_round_trip(
            ax in finite(), ay in finite(), bx in finite(), by in finite(), t in -5.0..5.0f64
        ) {
            let pos = [Vec2::new(ax, ay), Vec2::new(bx, by)];
            prop_assume!(pos[0].distance(pos[1]) > 1e-6);
            let frame = line_frame(pos).unwrap();
            prop_assert!((frame.direction.norm() - 1.0).abs() <= 1e-12);
            for p in pos {
                let a = to_line(&frame, p).unwrap();
                prop_assert!(close(from_line(&frame, a), p, 1e-12 * p.norm().max(1.0)));
            }
            let a = Coord1(t * 100.0);
            let back = to_line(&frame, from_line(&frame, a)).unwrap();
            prop_assert!((back.0 - a.0).abs() <= 1e-12 * a.0.abs().max(1.0));
        }
    }
}
