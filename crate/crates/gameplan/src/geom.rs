//! Minimal 2-D geometry used by the traffic graphs and the simulator.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(&self, other: &Point2, t: f64) -> Point2 {
        Point2::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }
}

/// A polyline with cached cumulative arc lengths, addressed by arc position.
#[derive(Debug, Clone)]
pub struct Polyline {
    points: Vec<Point2>,
    cumulative: Vec<f64>,
}

impl Polyline {
    pub fn new(points: Vec<Point2>) -> Self {
        assert!(points.len() >= 2, "polyline needs at least two points");
        let mut cumulative = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in points.windows(2) {
            acc += w[0].distance(&w[1]);
            cumulative.push(acc);
        }
        Polyline { points, cumulative }
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Position at arc length `s`, clamped to the polyline extent.
    pub fn at(&self, s: f64) -> Point2 {
        if s <= 0.0 {
            return self.points[0];
        }
        if s >= self.length() {
            return *self.points.last().unwrap();
        }
        // cumulative is sorted; find the containing segment
        let idx = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&s).unwrap())
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let seg_len = self.cumulative[idx + 1] - self.cumulative[idx];
        let t = if seg_len > 0.0 { (s - self.cumulative[idx]) / seg_len } else { 0.0 };
        self.points[idx].lerp(&self.points[idx + 1], t)
    }
}

/// Convex or simple polygon with point-containment tests.
#[derive(Debug, Clone)]
pub struct Polygon {
    pub vertices: Vec<Point2>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point2>) -> Self {
        assert!(vertices.len() >= 3, "polygon needs at least three vertices");
        Polygon { vertices }
    }

    pub fn rectangle(cx: f64, cy: f64, half_w: f64, half_h: f64) -> Self {
        Polygon::new(vec![
            Point2::new(cx - half_w, cy - half_h),
            Point2::new(cx + half_w, cy - half_h),
            Point2::new(cx + half_w, cy + half_h),
            Point2::new(cx - half_w, cy + half_h),
        ])
    }

    pub fn regular(cx: f64, cy: f64, radius: f64, sides: usize) -> Self {
        let verts = (0..sides)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / sides as f64;
                Point2::new(cx + radius * a.cos(), cy + radius * a.sin())
            })
            .collect();
        Polygon::new(verts)
    }

    /// Even-odd rule point containment.
    pub fn contains(&self, p: &Point2) -> bool {
        let mut inside = false;
        let n = self.vertices.len();
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[j]);
            if (a.y > p.y) != (b.y > p.y) {
                let x_int = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x_int {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Distance from a point to the polygon boundary (0 if on it).
    pub fn boundary_distance(&self, p: &Point2) -> f64 {
        let n = self.vertices.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            best = best.min(segment_distance(&a, &b, p));
        }
        best
    }

    /// True if the point is inside the polygon or within `margin` of it.
    pub fn contains_within(&self, p: &Point2, margin: f64) -> bool {
        self.contains(p) || self.boundary_distance(p) <= margin
    }
}

fn segment_distance(a: &Point2, b: &Point2, p: &Point2) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return a.distance(p);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(&Point2::new(a.x + t * dx, a.y + t * dy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polyline_interpolates_by_arc_length() {
        let line = Polyline::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(10.0, 0.0),
            Point2::new(10.0, 10.0),
        ]);
        assert_eq!(line.length(), 20.0);
        let p = line.at(15.0);
        assert!((p.x - 10.0).abs() < 1e-12);
        assert!((p.y - 5.0).abs() < 1e-12);
        // clamping
        assert_eq!(line.at(-1.0), Point2::new(0.0, 0.0));
        assert_eq!(line.at(99.0), Point2::new(10.0, 10.0));
    }

    #[test]
    fn polygon_containment_and_margin() {
        let sq = Polygon::rectangle(0.0, 0.0, 5.0, 5.0);
        assert!(sq.contains(&Point2::new(0.0, 0.0)));
        assert!(!sq.contains(&Point2::new(6.0, 0.0)));
        assert!(sq.contains_within(&Point2::new(6.0, 0.0), 1.5));
        assert!(!sq.contains_within(&Point2::new(8.0, 0.0), 1.5));
    }
}
