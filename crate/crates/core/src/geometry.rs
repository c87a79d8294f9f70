//! Planar primitives: points, convex polygons, hulls and separating-axis tests.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Angle of the vector from `self` to `other`.
    pub fn bearing(self, other: Point) -> f64 {
        (other.y - self.y).atan2(other.x - self.x)
    }

    pub fn lerp(self, other: Point, s: f64) -> Point {
        Point::new(self.x + (other.x - self.x) * s, self.y + (other.y - self.y) * s)
    }

    pub fn rotated(self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Wraps an angle into `(-π, π]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Smallest absolute difference between two angles.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    normalize_angle(a - b).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point,
    pub max: Point,
}

impl Aabb {
    pub fn overlaps(&self, other: &Aabb) -> bool {
        self.min.x <= other.max.x && other.min.x <= self.max.x && self.min.y <= other.max.y && other.min.y <= self.max.y
    }
}

/// Convex polygon with counter-clockwise vertices.
///
/// Serializes as its vertex list; deserializing takes the hull of the points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Point>", into = "Vec<Point>")]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
    aabb: Aabb,
}

impl From<Vec<Point>> for ConvexPolygon {
    fn from(points: Vec<Point>) -> Self {
        ConvexPolygon::hull(&points)
    }
}

impl From<ConvexPolygon> for Vec<Point> {
    fn from(poly: ConvexPolygon) -> Self {
        poly.vertices
    }
}

fn empty_aabb() -> Aabb {
    Aabb { min: Point::default(), max: Point::default() }
}

impl ConvexPolygon {
    /// Builds the convex hull of `points`.
    pub fn hull(points: &[Point]) -> ConvexPolygon {
        let mut pts: Vec<Point> = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup_by(|a, b| (a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12);
        if pts.len() < 3 {
            return ConvexPolygon::from_ccw(pts);
        }
        let mut lower: Vec<Point> = Vec::with_capacity(pts.len());
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Point> = Vec::with_capacity(pts.len());
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        ConvexPolygon::from_ccw(lower)
    }

    fn from_ccw(vertices: Vec<Point>) -> ConvexPolygon {
        let mut poly = ConvexPolygon { vertices, aabb: empty_aabb() };
        poly.refresh_aabb();
        poly
    }

    fn refresh_aabb(&mut self) {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        self.aabb = Aabb { min, max };
    }

    /// Axis-aligned rectangle centered on the origin.
    pub fn rectangle(length: f64, width: f64) -> ConvexPolygon {
        let (hl, hw) = (length / 2.0, width / 2.0);
        ConvexPolygon::from_ccw(vec![
            Point::new(-hl, -hw),
            Point::new(hl, -hw),
            Point::new(hl, hw),
            Point::new(-hl, hw),
        ])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn aabb(&self) -> &Aabb {
        &self.aabb
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                a.x * b.y - b.x * a.y
            })
            .sum::<f64>()
            / 2.0
    }

    /// Largest distance of a vertex from the origin.
    pub fn radius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Rigid transform: rotate by `theta` about the origin, then translate.
    pub fn transformed(&self, theta: f64, at: Point) -> ConvexPolygon {
        ConvexPolygon::from_ccw(self.vertices.iter().map(|v| v.rotated(theta) + at).collect())
    }

    /// Outward offset by `pad` along each edge normal (mitered corners).
    pub fn padded(&self, pad: f64) -> ConvexPolygon {
        if pad <= 0.0 || self.vertices.len() < 3 {
            return self.clone();
        }
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let prev = self.vertices[(i + n - 1) % n];
            let cur = self.vertices[i];
            let next = self.vertices[(i + 1) % n];
            let n1 = outward_normal(prev, cur);
            let n2 = outward_normal(cur, next);
            let bis = Point::new(n1.x + n2.x, n1.y + n2.y);
            let scale = pad / (1.0 + n1.x * n2.x + n1.y * n2.y).max(1e-9);
            out.push(Point::new(cur.x + bis.x * scale, cur.y + bis.y * scale));
        }
        ConvexPolygon::from_ccw(out)
    }

    /// Minkowski sum with an axis-aligned square of half-side `r`, which
    /// contains the sum with a disk of radius `r`.
    pub fn dilated(&self, r: f64) -> ConvexPolygon {
        if r <= 0.0 {
            return self.clone();
        }
        let mut pts = Vec::with_capacity(self.vertices.len() * 4);
        for v in &self.vertices {
            for (dx, dy) in [(-r, -r), (r, -r), (r, r), (-r, r)] {
                pts.push(Point::new(v.x + dx, v.y + dy));
            }
        }
        ConvexPolygon::hull(&pts)
    }

    /// True if `p` lies inside or on the boundary (with tolerance `eps`).
    pub fn contains(&self, p: Point, eps: f64) -> bool {
        let n = self.vertices.len();
        match n {
            0 => false,
            1 => self.vertices[0].dist(p) <= eps,
            2 => point_segment_dist(p, self.vertices[0], self.vertices[1]) <= eps,
            _ => (0..n).all(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                let len = a.dist(b);
                len == 0.0 || cross(a, b, p) / len >= -eps
            }),
        }
    }

    pub fn contains_polygon(&self, other: &ConvexPolygon, eps: f64) -> bool {
        other.vertices.iter().all(|&v| self.contains(v, eps))
    }

    /// Separating-axis test. Touching boundaries count as intersecting.
    pub fn intersects(&self, other: &ConvexPolygon) -> bool {
        if !self.aabb.overlaps(&other.aabb) {
            return false;
        }
        !(has_separating_axis(self, other) || has_separating_axis(other, self))
    }
}

fn outward_normal(a: Point, b: Point) -> Point {
    let d = b - a;
    let len = d.norm().max(1e-12);
    Point::new(d.y / len, -d.x / len)
}

fn point_segment_dist(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let s = (((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, s))
}

fn project(poly: &ConvexPolygon, axis: Point) -> (f64, f64) {
    poly.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        let d = v.x * axis.x + v.y * axis.y;
        (lo.min(d), hi.max(d))
    })
}

fn has_separating_axis(a: &ConvexPolygon, b: &ConvexPolygon) -> bool {
    let n = a.vertices.len();
    let edges: Box<dyn Iterator<Item = Point>> = match n {
        0 => return true,
        1 => Box::new(std::iter::empty()),
        2 => {
            let d = a.vertices[1] - a.vertices[0];
            Box::new([Point::new(-d.y, d.x), d].into_iter())
        }
        _ => Box::new((0..n).map(|i| {
            let d = a.vertices[(i + 1) % n] - a.vertices[i];
            Point::new(-d.y, d.x)
        })),
    };
    for axis in edges {
        if axis.x == 0.0 && axis.y == 0.0 {
            continue;
        }
        let (a0, a1) = project(a, axis);
        let (b0, b1) = project(b, axis);
        if a1 < b0 || b1 < a0 {
            return true;
        }
    }
    false
}
