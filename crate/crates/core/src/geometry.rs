//! Exact rational arithmetic and the planar predicates built on it.
//!
//! Every coordinate in the crate is a [`Rat`]; nothing in the decision
//! logic ever touches a float. Floats only appear when rendering SVG.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rat {
        Rat(BigRational::new(num.into(), den.into()))
    }

    pub fn from_int(v: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.0.is_positive() {
            1
        } else if self.0.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    /// Lossy conversion.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Bit length of the larger of numerator and denominator.
    pub fn bit_length(&self) -> u64 {
        self.numer().bits().max(self.denom().bits())
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rat> {
        let bad = || Error::Parse(format!("invalid rational {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(Rat::new(num, den))
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Rat {
        Rat::from_int(v)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$m(&rhs.0))
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat(self.0.$m(rhs.0))
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat {
                Rat(self.0.$m(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

/// A point with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactPoint {
    pub x: Rat,
    pub y: Rat,
}

impl ExactPoint {
    pub fn new(x: Rat, y: Rat) -> ExactPoint {
        ExactPoint { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> ExactPoint {
        ExactPoint::new(Rat::from_int(x), Rat::from_int(y))
    }

    pub fn sub(&self, o: &ExactPoint) -> (Rat, Rat) {
        (&self.x - &o.x, &self.y - &o.y)
    }

    /// `self + t * (to - self)`.
    pub fn lerp(&self, to: &ExactPoint, t: &Rat) -> ExactPoint {
        ExactPoint::new(
            &self.x + &(t * &(&to.x - &self.x)),
            &self.y + &(t * &(&to.y - &self.y)),
        )
    }

    pub fn bit_length(&self) -> u64 {
        self.x.bit_length().max(self.y.bit_length())
    }
}

impl fmt::Debug for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Ccw,
    Cw,
    Collinear,
}

impl Orientation {
    pub fn reversed(self) -> Orientation {
        match self {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
            Orientation::Collinear => Orientation::Collinear,
        }
    }

    fn from_sign(s: i32) -> Orientation {
        match s {
            1 => Orientation::Ccw,
            -1 => Orientation::Cw,
            _ => Orientation::Collinear,
        }
    }
}

/// Twice the signed area of triangle `pqr`.
pub fn cross(p: &ExactPoint, q: &ExactPoint, r: &ExactPoint) -> Rat {
    let (ax, ay) = q.sub(p);
    let (bx, by) = r.sub(p);
    &ax * &by - &ay * &bx
}

pub fn orientation(p: &ExactPoint, q: &ExactPoint, r: &ExactPoint) -> Orientation {
    Orientation::from_sign(cross(p, q, r).signum())
}

/// True iff `a b c d`, taken in this cyclic order, bound a strictly convex
/// counterclockwise quadrilateral. Collinear corners make it non-convex.
pub fn is_strictly_convex_quad(
    a: &ExactPoint,
    b: &ExactPoint,
    c: &ExactPoint,
    d: &ExactPoint,
) -> Result<bool> {
    let pts = [a, b, c, d];
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i] == pts[j] {
                return Err(Error::DegenerateInput(format!(
                    "quadrilateral corners {i} and {j} coincide at {:?}",
                    pts[i]
                )));
            }
        }
    }
    Ok((0..4).all(|i| orientation(pts[i], pts[(i + 1) % 4], pts[(i + 2) % 4]) == Orientation::Ccw))
}

/// Closed-segment containment for a point known to be collinear with `a b`.
fn within_box(a: &ExactPoint, b: &ExactPoint, p: &ExactPoint) -> bool {
    let (lox, hix) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (loy, hiy) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    lox <= &p.x && &p.x <= hix && loy <= &p.y && &p.y <= hiy
}

/// True iff the bounding boxes of `a b` and `c d` are disjoint.
fn boxes_apart(a: &ExactPoint, b: &ExactPoint, c: &ExactPoint, d: &ExactPoint) -> bool {
    let span = |u: &Rat, v: &Rat| if u <= v { (u.clone(), v.clone()) } else { (v.clone(), u.clone()) };
    let ((ax0, ax1), (cx0, cx1)) = (span(&a.x, &b.x), span(&c.x, &d.x));
    if ax1 < cx0 || cx1 < ax0 {
        return true;
    }
    let ((ay0, ay1), (cy0, cy1)) = (span(&a.y, &b.y), span(&c.y, &d.y));
    ay1 < cy0 || cy1 < ay0
}

/// True iff `p` lies on the open segment `a b`.
pub fn on_open_segment(a: &ExactPoint, b: &ExactPoint, p: &ExactPoint) -> bool {
    p != a && p != b && orientation(a, b, p) == Orientation::Collinear && within_box(a, b, p)
}

/// True iff the two segments share a point that is not a common endpoint.
///
/// Touching at a shared endpoint does not count; an endpoint of one segment
/// resting in the interior of the other, or collinear overlap, does.
pub fn segments_properly_intersect(
    s1: (&ExactPoint, &ExactPoint),
    s2: (&ExactPoint, &ExactPoint),
) -> bool {
    let (a, b) = s1;
    let (c, d) = s2;
    if boxes_apart(a, b, c, d) {
        return false;
    }
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    let strict = |o: Orientation| o != Orientation::Collinear;
    if strict(o1) && strict(o2) && strict(o3) && strict(o4) {
        return o1 != o2 && o3 != o4;
    }
    if o1 == Orientation::Collinear
        && o2 == Orientation::Collinear
        && o3 == Orientation::Collinear
        && o4 == Orientation::Collinear
    {
        // Collinear: overlapping unless they only share an endpoint.
        let shared = [a, b].iter().filter(|p| **p == c || **p == d).count();
        let inside = on_open_segment(a, b, c)
            || on_open_segment(a, b, d)
            || on_open_segment(c, d, a)
            || on_open_segment(c, d, b);
        return inside || shared == 2;
    }
    on_open_segment(a, b, c) || on_open_segment(a, b, d) || on_open_segment(c, d, a) || on_open_segment(c, d, b)
}

/// Intersection of the lines `a b` and `c d`, if they are not parallel.
pub fn line_intersection(
    a: &ExactPoint,
    b: &ExactPoint,
    c: &ExactPoint,
    d: &ExactPoint,
) -> Option<ExactPoint> {
    let (rx, ry) = b.sub(a);
    let (sx, sy) = d.sub(c);
    let denom = &rx * &sy - &ry * &sx;
    if denom.is_zero() {
        return None;
    }
    let (qx, qy) = c.sub(a);
    let t = (&qx * &sy - &qy * &sx) / denom;
    Some(a.lerp(b, &t))
}

/// Affine map `p -> M p + t` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub m: [[Rat; 2]; 2],
    pub t: [Rat; 2],
}

impl Affine {
    /// The unique affine map sending `src[i]` to `dst[i]`; `None` when the
    /// source triple is collinear.
    pub fn from_triangles(src: [&ExactPoint; 3], dst: [&ExactPoint; 3]) -> Option<Affine> {
        let (e1x, e1y) = src[1].sub(src[0]);
        let (e2x, e2y) = src[2].sub(src[0]);
        let det = &e1x * &e2y - &e1y * &e2x;
        if det.is_zero() {
            return None;
        }
        // Inverse of [[e1x e2x] [e1y e2y]].
        let inv = [
            [&e2y / &det, -(&e2x / &det)],
            [-(&e1y / &det), &e1x / &det],
        ];
        let (f1x, f1y) = dst[1].sub(dst[0]);
        let (f2x, f2y) = dst[2].sub(dst[0]);
        let f = [[f1x, f2x], [f1y, f2y]];
        let mut m = [[Rat::zero(), Rat::zero()], [Rat::zero(), Rat::zero()]];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = &f[i][0] * &inv[0][j] + &f[i][1] * &inv[1][j];
            }
        }
        let s0 = src[0];
        let t = [
            &dst[0].x - &(&m[0][0] * &s0.x + &m[0][1] * &s0.y),
            &dst[0].y - &(&m[1][0] * &s0.x + &m[1][1] * &s0.y),
        ];
        Some(Affine { m, t })
    }

    pub fn apply(&self, p: &ExactPoint) -> ExactPoint {
        ExactPoint::new(
            &(&self.m[0][0] * &p.x + &self.m[0][1] * &p.y) + &self.t[0],
            &(&self.m[1][0] * &p.x + &self.m[1][1] * &p.y) + &self.t[1],
        )
    }

    pub fn determinant(&self) -> Rat {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: i64, y: i64) -> ExactPoint {
        ExactPoint::from_ints(x, y)
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(0, 1)), Orientation::Ccw);
        assert_eq!(orientation(&p(0, 0), &p(1, 1), &p(2, 2)), Orientation::Collinear);
        assert_eq!(orientation(&p(0, 0), &p(0, 1), &p(1, 0)), Orientation::Cw);
    }

    #[test]
    fn convex_quad_examples() {
        assert!(is_strictly_convex_quad(&p(0, 0), &p(1, 0), &p(1, 1), &p(0, 1)).unwrap());
        // (0,0) (2,0) (1,1) (1,3): the turn at (1,1) is clockwise.
        assert_eq!(orientation(&p(2, 0), &p(1, 1), &p(1, 3)), Orientation::Cw);
        assert!(!is_strictly_convex_quad(&p(0, 0), &p(2, 0), &p(1, 1), &p(1, 3)).unwrap());
        assert!(!is_strictly_convex_quad(&p(0, 0), &p(1, 0), &p(2, 0), &p(1, 1)).unwrap());
        assert!(matches!(
            is_strictly_convex_quad(&p(0, 0), &p(1, 0), &p(0, 0), &p(1, 1)),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn segment_intersection_examples() {
        assert!(segments_properly_intersect((&p(0, 0), &p(2, 2)), (&p(0, 2), &p(2, 0))));
        assert!(!segments_properly_intersect((&p(0, 0), &p(1, 1)), (&p(1, 1), &p(2, 0))));
        assert!(!segments_properly_intersect((&p(0, 0), &p(1, 0)), (&p(0, 1), &p(1, 1))));
        // T-junction and collinear overlap both count.
        assert!(segments_properly_intersect((&p(0, 0), &p(2, 0)), (&p(1, 0), &p(1, 1))));
        assert!(segments_properly_intersect((&p(0, 0), &p(2, 0)), (&p(1, 0), &p(3, 0))));
    }

    #[test]
    fn rat_text_form() {
        let r: Rat = "6/-4".parse().unwrap();
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!("7".parse::<Rat>().unwrap().to_string(), "7/1");
        assert!("1/0".parse::<Rat>().is_err());
    }

    #[test]
    fn affine_from_triangles_maps_corners() {
        let src = [p(0, 0), p(1, 0), p(0, 1)];
        let dst = [p(3, 1), p(3, 4), p(-2, 1)];
        let a = Affine::from_triangles([&src[0], &src[1], &src[2]], [&dst[0], &dst[1], &dst[2]]).unwrap();
        for i in 0..3 {
            assert_eq!(a.apply(&src[i]), dst[i]);
        }
        assert!(a.determinant().signum() > 0);
    }

    fn small() -> impl Strategy<Value = ExactPoint> {
        (-20i64..20, -20i64..20, 1i64..5, 1i64..5)
            .prop_map(|(x, y, dx, dy)| ExactPoint::new(Rat::new(x, dx), Rat::new(y, dy)))
    }

    proptest! {
        #[test]
        fn orientation_antisymmetric(a in small(), b in small(), c in small()) {
            prop_assert_eq!(orientation(&a, &b, &c), orientation(&a, &c, &b).reversed());
        }

        #[test]
        fn rat_addition_associative(a in -50i64..50, b in 1i64..9, c in -50i64..50, d in 1i64..9, e in -50i64..50, f in 1i64..9) {
            let (x, y, z) = (Rat::new(a, b), Rat::new(c, d), Rat::new(e, f));
            let l = (&x + &y) + z.clone();
            let r = x + (y + z);
            prop_assert_eq!(l.to_string(), r.to_string());
        }

        #[test]
        fn convexity_rotation_invariant(a in small(), b in small(), c in small(), d in small()) {
            let q = [a, b, c, d];
            let distinct = (0..4).all(|i| (i + 1..4).all(|j| q[i] != q[j]));
            prop_assume!(distinct);
            let base = is_strictly_convex_quad(&q[0], &q[1], &q[2], &q[3]).unwrap();
            for k in 1..4 {
                let r = is_strictly_convex_quad(&q[k], &q[(k + 1) % 4], &q[(k + 2) % 4], &q[(k + 3) % 4]).unwrap();
                prop_assert_eq!(base, r);
            }
        }
    }
}
