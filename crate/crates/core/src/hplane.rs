//! Upper half-plane points, PSL2(R) transforms and the hyperbolic distance.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `x + iy` of the upper half-plane, `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    x: f64,
    y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidPoint { x, y });
        }
        Ok(Self { x, y })
    }

    /// `i`, the usual base point.
    pub const I: HPoint = HPoint { x: 0.0, y: 1.0 };

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    /// Translate by an integer-free real shift; keeps `y`.
    pub fn shifted(&self, dx: f64) -> Self {
        Self { x: self.x + dx, y: self.y }
    }
}

impl fmt::Display for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.x, self.y)
    }
}

/// Entries below this (relative to the matrix scale) count as zero when
/// choosing the canonical sign.
const SIGN_EPS: f64 = 1e-9;

/// An element of PSL2(R), stored as a unit-determinant matrix with the sign
/// fixed so that the first non-negligible entry of `(a, b, c)` is positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusTransform {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl MobiusTransform {
    pub const IDENTITY: MobiusTransform = MobiusTransform { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Builds a transform from any matrix with positive determinant, rescaling
    /// it to determinant one.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::InvalidTransform { a, b, c, d });
        }
        let s = det.sqrt().recip();
        Ok(Self { a: a * s, b: b * s, c: c * s, d: d * s }.canonical())
    }

    /// Integer matrices of determinant one; no rescaling needed.
    pub fn from_integers(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::InvalidTransform { a: a as f64, b: b as f64, c: c as f64, d: d as f64 });
        }
        Ok(Self { a: a as f64, b: b as f64, c: c as f64, d: d as f64 }.canonical())
    }

    pub fn translation(t: f64) -> Self {
        Self { a: 1.0, b: t, c: 0.0, d: 1.0 }.canonical()
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    fn scale(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    fn canonical(self) -> Self {
        let eps = SIGN_EPS * self.scale().max(1.0);
        let lead = [self.a, self.b, self.c].into_iter().find(|v| v.abs() > eps).unwrap_or(self.d);
        if lead < 0.0 {
            Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            self
        }
    }

    /// Re-impose `ad - bc = 1` after accumulated rounding.
    fn renormalized(self) -> Self {
        let det = self.determinant();
        if (det - 1.0).abs() <= 1e-15 {
            return self.canonical();
        }
        let s = det.sqrt().recip();
        Self { a: self.a * s, b: self.b * s, c: self.c * s, d: self.d * s }.canonical()
    }

    pub fn compose(&self, other: &MobiusTransform) -> MobiusTransform {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
        .renormalized()
    }

    pub fn inverse(&self) -> MobiusTransform {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }.canonical()
    }

    /// Applies `z -> (az + b)/(cz + d)`.
    pub fn apply(&self, z: HPoint) -> Result<HPoint> {
        let (x, y) = (z.x, z.y);
        let cx_d = self.c * x + self.d;
        let denom = cx_d * cx_d + self.c * self.c * y * y;
        let nx = ((self.a * x + self.b) * cx_d + self.a * self.c * y * y) / denom;
        let ny = y / denom;
        if !(ny > 0.0) || !ny.is_finite() || !nx.is_finite() {
            return Err(Error::DegeneratePoint);
        }
        Ok(HPoint { x: nx, y: ny })
    }

    /// `cz + d`, the automorphy factor at `z`.
    pub fn cocycle(&self, z: Complex64) -> Complex64 {
        self.c * z + self.d
    }

    /// Max-norm distance between canonical representatives.
    pub fn distance(&self, other: &MobiusTransform) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }

    pub fn approx_eq(&self, other: &MobiusTransform, tol: f64) -> bool {
        self.distance(other) <= tol * self.scale().max(1.0)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Self::IDENTITY, tol)
    }

    /// Hyperbolic when `|tr| > 2`.
    pub fn is_hyperbolic(&self) -> bool {
        self.trace().abs() > 2.0 + 1e-9
    }

    /// Translation length `2 arccosh(|tr|/2)` of a hyperbolic element.
    pub fn translation_length(&self) -> Option<f64> {
        self.is_hyperbolic().then(|| 2.0 * (self.trace().abs() / 2.0).acosh())
    }
}

impl fmt::Display for MobiusTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// `cosh d(z1, z2) = 1 + |z1 - z2|^2 / (2 y1 y2)`.
pub fn cosh_distance(z1: HPoint, z2: HPoint) -> f64 {
    let dx = z1.x - z2.x;
    let dy = z1.y - z2.y;
    1.0 + (dx * dx + dy * dy) / (2.0 * z1.y * z2.y)
}

/// Hyperbolic distance, via `sinh(d/2) = |z1 - z2| / (2 sqrt(y1 y2))`, which
/// stays accurate for nearby points where `acosh` near 1 loses digits.
pub fn hyp_distance(z1: HPoint, z2: HPoint) -> f64 {
    let dx = z1.x - z2.x;
    let dy = z1.y - z2.y;
    let half = dx.hypot(dy) / (2.0 * (z1.y * z2.y).sqrt());
    2.0 * half.asinh()
}

/// Area density `1/y^2` of the hyperbolic metric against `dx dy`.
pub fn area_density(z: HPoint) -> f64 {
    1.0 / (z.y * z.y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> HPoint {
        HPoint::new(x, y).unwrap()
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(HPoint::new(0.0, 0.0).is_err());
        assert!(HPoint::new(1.0, -2.0).is_err());
        assert!(HPoint::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn apply_examples() {
        let id = MobiusTransform::IDENTITY;
        assert_eq!(id.apply(p(0.0, 1.0)).unwrap(), p(0.0, 1.0));
        let t = MobiusTransform::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(t.apply(p(0.0, 1.0)).unwrap(), p(1.0, 1.0));
        let s = MobiusTransform::new(0.0, -1.0, 1.0, 0.0).unwrap();
        let w = s.apply(p(0.0, 2.0)).unwrap();
        assert!(w.x().abs() < 1e-15);
        assert_relative_eq!(w.y(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn sign_is_canonical() {
        let a = MobiusTransform::new(0.0, 1.0, -1.0, 0.0).unwrap();
        let b = MobiusTransform::new(0.0, -1.0, 1.0, 0.0).unwrap();
        assert_eq!(a, b);
        let m = MobiusTransform::new(-2.0, 0.0, 0.0, -0.5).unwrap();
        assert_eq!(m.entries(), [2.0, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn determinant_renormalized() {
        let m = MobiusTransform::new(2.0, 2.0, 0.0, 2.0).unwrap();
        assert_relative_eq!(m.determinant(), 1.0, epsilon = 1e-15);
        assert!(MobiusTransform::new(1.0, 2.0, 3.0, 4.0).is_err());
    }

    #[test]
    fn compose_examples() {
        let t = MobiusTransform::new(2.0, 1.0, 3.0, 2.0).unwrap();
        assert!(t.compose(&t.inverse()).is_identity(1e-12));
        assert!(MobiusTransform::IDENTITY.compose(&t).approx_eq(&t, 1e-15));
        let tr = MobiusTransform::translation(1.0);
        assert!(tr.compose(&tr).approx_eq(&MobiusTransform::translation(2.0), 1e-15));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(cosh_distance(p(0.0, 1.0), p(0.0, 1.0)), 1.0);
        // (y1/y2 + y2/y1)/2 with y1 = 1, y2 = 2
        assert_relative_eq!(cosh_distance(p(0.0, 1.0), p(0.0, 2.0)), 1.25, epsilon = 1e-15);
        assert_relative_eq!(cosh_distance(p(0.0, 1.0), p(1.0, 1.0)), 1.5, epsilon = 1e-15);
        assert_eq!(hyp_distance(p(0.0, 1.0), p(0.0, 1.0)), 0.0);
        assert_relative_eq!(hyp_distance(p(0.0, 1.0), p(0.0, 2.0)), std::f64::consts::LN_2, epsilon = 1e-15);
    }

    #[test]
    fn distance_stable_for_close_points() {
        let z1 = p(0.3, 0.7);
        let z2 = p(0.3 + 1e-12, 0.7);
        // leading order: |dz| / y
        assert_relative_eq!(hyp_distance(z1, z2), 1e-12 / 0.7, max_relative = 1e-4);
    }

    #[test]
    fn translation_length_of_diagonal() {
        let g = MobiusTransform::new(2.0, 0.0, 0.0, 0.5).unwrap();
        assert_relative_eq!(g.translation_length().unwrap(), 2.0 * std::f64::consts::LN_2, epsilon = 1e-14);
        assert!(MobiusTransform::translation(1.0).translation_length().is_none());
    }

    fn transform() -> impl Strategy<Value = MobiusTransform> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
            .prop_filter_map("positive determinant", |(a, b, c, d)| {
                let det = a * d - b * c;
                (det > 0.05).then(|| MobiusTransform::new(a, b, c, d).unwrap())
            })
    }

    fn point() -> impl Strategy<Value = HPoint> {
        (-2.0..2.0f64, 0.1..3.0f64).prop_map(|(x, y)| HPoint::new(x, y).unwrap())
    }

    proptest! {
        #[test]
        fn isometry(g in transform(), z1 in point(), z2 in point()) {
            let before = hyp_distance(z1, z2);
            let after = hyp_distance(g.apply(z1).unwrap(), g.apply(z2).unwrap());
            prop_assert!((before - after).abs() <= 1e-10 * before.max(1.0));
        }

        #[test]
        fn triangle_inequality(a in point(), b in point(), c in point()) {
            prop_assert!(hyp_distance(a, c) <= hyp_distance(a, b) + hyp_distance(b, c) + 1e-10);
        }

        #[test]
        fn symmetric_and_at_least_one(a in point(), b in point()) {
            prop_assert_eq!(cosh_distance(a, b), cosh_distance(b, a));
            prop_assert!(cosh_distance(a, b) >= 1.0);
        }

        #[test]
        fn compose_is_associative(r in transform(), s in transform(), t in transform()) {
            let left = r.compose(&s).compose(&t);
            let right = r.compose(&s.compose(&t));
            prop_assert!(left.approx_eq(&right, 1e-12), "{} vs {}", left, right);
        }

        #[test]
        fn inverse_two_sided(t in transform()) {
            prop_assert!(t.compose(&t.inverse()).is_identity(1e-12));
            prop_assert!(t.inverse().compose(&t).is_identity(1e-12));
        }

        #[test]
        fn action_is_compatible(s in transform(), t in transform(), z in point()) {
            let lhs = s.compose(&t).apply(z).unwrap();
            let rhs = s.apply(t.apply(z).unwrap()).unwrap();
            prop_assert!(hyp_distance(lhs, rhs) <= 1e-10);
        }
    }
}
