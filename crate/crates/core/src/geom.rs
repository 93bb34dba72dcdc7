//! Small 2D vector/segment toolkit used by the scene model and the ray tracer.

use std::ops::{Add, Mul, Neg, Sub};

/// A point (or vector) in the 2D scene plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Dot product.
    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// 2D cross product (z component of the 3D cross product).
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Euclidean norm.
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Distance to another point.
    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the same direction; zero vectors are returned unchanged.
    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            Point2::new(self.x / n, self.y / n)
        }
    }

    /// Unit vector at the given angle from the +x axis.
    pub fn from_angle(theta: f64) -> Point2 {
        Point2::new(theta.cos(), theta.sin())
    }

    /// Rotate counterclockwise by `theta` radians about the origin.
    pub fn rotated(self, theta: f64) -> Point2 {
        let (s, c) = theta.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// A line segment between two endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Segment { a, b }
    }

    /// Segment direction, not normalized.
    pub fn dir(self) -> Point2 {
        self.b - self.a
    }

    /// Segment length.
    pub fn length(self) -> f64 {
        self.dir().norm()
    }

    /// Point at parameter `t` (0 at `a`, 1 at `b`).
    pub fn at(self, t: f64) -> Point2 {
        self.a + self.dir() * t
    }

    /// Parameter of the perpendicular foot of `p` on the supporting line.
    pub fn project_param(self, p: Point2) -> f64 {
        let d = self.dir();
        (p - self.a).dot(d) / d.dot(d)
    }

    /// Mirror image of `p` across the supporting line.
    pub fn mirror(self, p: Point2) -> Point2 {
        let foot = self.at(self.project_param(p));
        foot + foot - p
    }

    /// Reflect a direction vector off the supporting line (tangential part kept,
    /// normal part flipped).
    pub fn reflect_dir(self, d: Point2) -> Point2 {
        let u = self.dir().normalized();
        u * (2.0 * d.dot(u)) - d
    }

    /// Intersection of the supporting lines of `self` and `other`, as the pair of
    /// line parameters `(t_self, t_other)`; `None` when the lines are parallel.
    pub fn line_intersection(self, other: Segment) -> Option<(f64, f64)> {
        let d1 = self.dir();
        let d2 = other.dir();
        let denom = d1.cross(d2);
        if denom == 0.0 {
            return None;
        }
        let w = other.a - self.a;
        Some((w.cross(d2) / denom, w.cross(d1) / denom))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    #[test]
    fn mirror_across_vertical_line() {
        let wall = Segment::new(Point2::new(2.0, -5.0), Point2::new(2.0, 5.0));
        let img = wall.mirror(Point2::new(0.0, 0.0));
        assert!((img.x - 4.0).abs() < EPS);
        assert!(img.y.abs() < EPS);
    }

    #[test]
    fn mirror_is_an_involution() {
        let seg = Segment::new(Point2::new(0.3, -1.1), Point2::new(2.7, 1.9));
        let p = Point2::new(-0.4, 2.2);
        let back = seg.mirror(seg.mirror(p));
        assert!(back.distance(p) < EPS);
    }

    #[test]
    fn project_param_endpoints() {
        let seg = Segment::new(Point2::new(1.0, 1.0), Point2::new(3.0, 1.0));
        assert!((seg.project_param(Point2::new(1.0, 7.0)) - 0.0).abs() < EPS);
        assert!((seg.project_param(Point2::new(3.0, -2.0)) - 1.0).abs() < EPS);
        assert!((seg.project_param(Point2::new(2.0, 0.5)) - 0.5).abs() < EPS);
    }

    #[test]
    fn reflect_dir_preserves_norm_and_tangent() {
        let seg = Segment::new(Point2::new(0.0, 0.0), Point2::new(1.0, 2.0));
        let d = Point2::new(0.6, -0.8);
        let r = seg.reflect_dir(d);
        assert!((r.norm() - d.norm()).abs() < EPS);
        let u = seg.dir().normalized();
        assert!((r.dot(u) - d.dot(u)).abs() < EPS);
    }

    #[test]
    fn line_intersection_crossing() {
        let s1 = Segment::new(Point2::new(0.0, 0.0), Point2::new(4.0, 0.0));
        let s2 = Segment::new(Point2::new(1.0, -1.0), Point2::new(1.0, 1.0));
        let (t1, t2) = s1.line_intersection(s2).unwrap();
        assert!((t1 - 0.25).abs() < EPS);
        assert!((t2 - 0.5).abs() < EPS);
        assert!(s1.line_intersection(Segment::new(
            Point2::new(0.0, 1.0),
            Point2::new(4.0, 1.0)
        ))
        .is_none());
    }

    #[test]
    fn rotation_is_ccw() {
        let p = Point2::new(1.0, 0.0).rotated(std::f64::consts::FRAC_PI_2);
        assert!(p.x.abs() < EPS && (p.y - 1.0).abs() < EPS);
    }
}
