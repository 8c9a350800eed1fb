//! Planar geometry shared by the map, perception, conflict and metric code.
//!
//! Everything here works in the bird's-eye-view plane: a local metric frame
//! with x east, y north, angles counter-clockwise from +x.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector pointing along `angle`.
    pub fn from_angle(angle: f64) -> Self {
        Vec2::new(angle.cos(), angle.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Rotated +90°.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self * (1.0 / n)
        }
    }

    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
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

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

/// Absolute angular difference in `[0, π]`.
pub fn angle_diff_abs(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// A rotated rectangle in the ground plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox {
    pub center: Vec2,
    pub length: f64,
    pub width: f64,
    pub yaw: f64,
}

impl OrientedBox {
    pub fn new(center: Vec2, length: f64, width: f64, yaw: f64) -> Self {
        OrientedBox {
            center,
            length,
            width,
            yaw,
        }
    }

    pub fn area(&self) -> f64 {
        self.length * self.width
    }

    fn axes(&self) -> (Vec2, Vec2) {
        let fwd = Vec2::from_angle(self.yaw);
        (fwd, fwd.perp())
    }

    /// Corners in counter-clockwise order.
    pub fn corners(&self) -> [Vec2; 4] {
        let (fwd, left) = self.axes();
        let hl = fwd * (self.length / 2.0);
        let hw = left * (self.width / 2.0);
        let c = self.center;
        [c + hl - hw, c + hl + hw, c - hl + hw, c - hl - hw]
    }

    /// Half of the diagonal: radius of the circumscribed circle.
    pub fn bounding_radius(&self) -> f64 {
        0.5 * self.length.hypot(self.width)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let (fwd, left) = self.axes();
        let d = p - self.center;
        d.dot(fwd).abs() <= self.length / 2.0 && d.dot(left).abs() <= self.width / 2.0
    }

    /// Entry parameter in `[0, 1]` at which segment `a → b` first touches
    /// the rectangle, if it does.
    pub fn segment_entry(&self, a: Vec2, b: Vec2) -> Option<f64> {
        // Liang-Barsky in the box frame.
        let (fwd, left) = self.axes();
        let pa = a - self.center;
        let d = b - a;
        let p0 = [pa.dot(fwd), pa.dot(left)];
        let dd = [d.dot(fwd), d.dot(left)];
        let half = [self.length / 2.0, self.width / 2.0];
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for k in 0..2 {
            if dd[k] == 0.0 {
                if p0[k].abs() > half[k] {
                    return None;
                }
                continue;
            }
            let mut ta = (-half[k] - p0[k]) / dd[k];
            let mut tb = (half[k] - p0[k]) / dd[k];
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return None;
            }
        }
        Some(t0)
    }
}

const SAT_EPS: f64 = 1e-9;

/// True when the two rectangles share a region of positive area.
/// Touching edges do not count.
pub fn boxes_overlap(a: &OrientedBox, b: &OrientedBox) -> bool {
    let reach = a.bounding_radius() + b.bounding_radius();
    if a.center.distance(b.center) >= reach {
        return false;
    }
    let ca = a.corners();
    let cb = b.corners();
    let (fa, la) = a.axes();
    let (fb, lb) = b.axes();
    for axis in [fa, la, fb, lb] {
        let (amin, amax) = project(&ca, axis);
        let (bmin, bmax) = project(&cb, axis);
        if amax <= bmin + SAT_EPS || bmax <= amin + SAT_EPS {
            return false;
        }
    }
    true
}

fn project(pts: &[Vec2], axis: Vec2) -> (f64, f64) {
    pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let v = p.dot(axis);
        (lo.min(v), hi.max(v))
    })
}

/// Shoelace area, positive for counter-clockwise polygons.
pub fn polygon_area(poly: &[Vec2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..poly.len() {
        let j = (i + 1) % poly.len();
        acc += poly[i].cross(poly[j]);
    }
    acc / 2.0
}

/// Sutherland-Hodgman clipping of `subject` against a convex CCW `clip`.
pub fn clip_convex(subject: &[Vec2], clip: &[Vec2]) -> Vec<Vec2> {
    let mut output = subject.to_vec();
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        let edge = b - a;
        let inside = |p: Vec2| edge.cross(p - a) >= 0.0;
        let input = std::mem::take(&mut output);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let (cin, pin) = (inside(cur), inside(prev));
            if cin {
                if !pin {
                    output.push(line_intersection(prev, cur, a, b));
                }
                output.push(cur);
            } else if pin {
                output.push(line_intersection(prev, cur, a, b));
            }
        }
    }
    output
}

fn line_intersection(p: Vec2, q: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let r = q - p;
    let s = b - a;
    let denom = r.cross(s);
    if denom == 0.0 {
        return q;
    }
    let t = (a - p).cross(s) / denom;
    p + r * t
}

/// Area of the intersection of two rectangles.
pub fn intersection_area(a: &OrientedBox, b: &OrientedBox) -> f64 {
    if a.center.distance(b.center) >= a.bounding_radius() + b.bounding_radius() {
        return 0.0;
    }
    polygon_area(&clip_convex(&a.corners(), &b.corners())).max(0.0)
}

/// A polyline with cached cumulative arc length, used for lanes and paths.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Vec2>,
    cumulative: Vec<f64>,
}

/// Closest-point query result against a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub arc: f64,
    pub distance: f64,
    /// Positive when the point lies to the left of the direction of travel.
    pub signed_lateral: f64,
    pub foot: Vec2,
}

impl Polyline {
    /// Builds a polyline, dropping consecutive duplicate points.
    pub fn new(points: Vec<Vec2>) -> Self {
        let mut pts: Vec<Vec2> = Vec::with_capacity(points.len());
        for p in points {
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        let mut cumulative = Vec::with_capacity(pts.len());
        let mut acc = 0.0;
        for (i, p) in pts.iter().enumerate() {
            if i > 0 {
                acc += p.distance(pts[i - 1]);
            }
            cumulative.push(acc);
        }
        Polyline {
            points: pts,
            cumulative,
        }
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    fn segment_at(&self, s: f64) -> usize {
        if self.points.len() < 2 {
            return 0;
        }
        let idx = self.cumulative.partition_point(|&c| c <= s);
        idx.saturating_sub(1).min(self.points.len() - 2)
    }

    /// Position at arc length `s` (clamped to the ends).
    pub fn point_at(&self, s: f64) -> Vec2 {
        match self.points.len() {
            0 => Vec2::ZERO,
            1 => self.points[0],
            _ => {
                let i = self.segment_at(s);
                let (a, b) = (self.points[i], self.points[i + 1]);
                let seg = self.cumulative[i + 1] - self.cumulative[i];
                let t = ((s - self.cumulative[i]) / seg).clamp(0.0, 1.0);
                a + (b - a) * t
            }
        }
    }

    /// Heading of the segment containing arc length `s`.
    pub fn heading_at(&self, s: f64) -> f64 {
        if self.points.len() < 2 {
            return 0.0;
        }
        let i = self.segment_at(s);
        (self.points[i + 1] - self.points[i]).angle()
    }

    pub fn project(&self, p: Vec2) -> Projection {
        if self.points.len() == 1 {
            let d = p.distance(self.points[0]);
            return Projection {
                arc: 0.0,
                distance: d,
                signed_lateral: 0.0,
                foot: self.points[0],
            };
        }
        let mut best = Projection {
            arc: 0.0,
            distance: f64::INFINITY,
            signed_lateral: 0.0,
            foot: Vec2::ZERO,
        };
        for i in 0..self.points.len().saturating_sub(1) {
            let (a, b) = (self.points[i], self.points[i + 1]);
            let ab = b - a;
            let len2 = ab.dot(ab);
            let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
            let foot = a + ab * t;
            let d = p.distance(foot);
            if d < best.distance {
                let seg_len = self.cumulative[i + 1] - self.cumulative[i];
                best = Projection {
                    arc: self.cumulative[i] + t * seg_len,
                    distance: d,
                    signed_lateral: ab.normalized().cross(p - a),
                    foot,
                };
            }
        }
        best
    }
}
