//! Planar convex hulls (Andrew's monotone chain).

use crate::error::{Error, Result};
use crate::math::Vec2;

/// Distance tolerance (meters) for inclusive membership tests.
pub const HULL_EPS: f64 = 1e-9;

/// Convex polygon with counter-clockwise vertices starting at the
/// lexicographically smallest point. Fewer than three vertices means the
/// input was degenerate (a point or a segment); zero vertices is the empty
/// region.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Hull2D {
    vertices: Vec<Vec2>,
}

impl Hull2D {
    /// The empty region; contains no point.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum::<f64>()
            * 0.5
    }

    /// Inclusive point-in-hull test.
    pub fn contains(&self, p: Vec2) -> bool {
        point_in_hull(self, p)
    }
}

fn turn(o: Vec2, a: Vec2, b: Vec2) -> f64 {
    (a - o).cross(b - o)
}

pub fn convex_hull_2d(points: &[Vec2]) -> Result<Hull2D> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidValue(format!("non-finite point {p:?}")));
    }
    let mut pts = points.to_vec();
    pts.sort_by(Vec2::lex_cmp);
    pts.dedup();
    if pts.len() < 3 {
        return Ok(Hull2D { vertices: pts });
    }

    let mut hull: Vec<Vec2> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    // closing point repeats the start
    hull.pop();
    Ok(Hull2D { vertices: hull })
}

fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// True when `p` is inside the hull or within [`HULL_EPS`] of its boundary.
pub fn point_in_hull(h: &Hull2D, p: Vec2) -> bool {
    let v = &h.vertices;
    match v.len() {
        0 => false,
        1 => (p - v[0]).norm() <= HULL_EPS,
        2 => segment_distance(p, v[0], v[1]) <= HULL_EPS,
        n => (0..n).all(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            let edge = b - a;
            // signed distance to the edge's supporting line, positive inside
            edge.cross(p - a) / edge.norm() >= -HULL_EPS
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y)
    }

    #[test]
    fn square_with_center() {
        let h = convex_hull_2d(&[
            v(0.0, 0.0),
            v(1.0, 0.0),
            v(1.0, 1.0),
            v(0.0, 1.0),
            v(0.5, 0.5),
        ])
        .unwrap();
        assert_eq!(
            h.vertices(),
            &[v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0), v(0.0, 1.0)]
        );
        assert!((h.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn collinear_points_make_a_segment() {
        let h = convex_hull_2d(&[v(2.0, 2.0), v(0.0, 0.0), v(1.0, 1.0)]).unwrap();
        assert_eq!(h.vertices(), &[v(0.0, 0.0), v(2.0, 2.0)]);
        assert!(h.is_degenerate());
        assert!(h.contains(v(1.0, 1.0)));
        assert!(!h.contains(v(1.0, 1.1)));
    }

    #[test]
    fn collinear_edge_points_are_dropped() {
        let h = convex_hull_2d(&[
            v(0.0, 0.0),
            v(0.5, 0.0),
            v(1.0, 0.0),
            v(1.0, 1.0),
            v(0.0, 1.0),
            v(0.0, 0.5),
        ])
        .unwrap();
        assert_eq!(h.vertices().len(), 4);
    }

    #[test]
    fn empty_and_single() {
        assert!(matches!(convex_hull_2d(&[]), Err(Error::EmptyInput)));
        let h = convex_hull_2d(&[v(3.0, 4.0), v(3.0, 4.0)]).unwrap();
        assert_eq!(h.vertices(), &[v(3.0, 4.0)]);
        assert!(h.contains(v(3.0, 4.0)));
        assert!(!Hull2D::empty().contains(v(0.0, 0.0)));
    }

    #[test]
    fn triangle_membership() {
        let h = convex_hull_2d(&[v(0.0, 0.0), v(3.0, 0.0), v(0.0, 3.0)]).unwrap();
        assert!(point_in_hull(&h, v(1.0, 1.0)));
        assert!(!point_in_hull(&h, v(1000.0, 0.0)));
        // midpoint of the hypotenuse
        assert!(point_in_hull(&h, v(1.5, 1.5)));
        assert!(!point_in_hull(&h, v(1.5 + 1e-6, 1.5 + 1e-6)));
    }

    #[test]
    fn rejects_nan() {
        assert!(convex_hull_2d(&[v(f64::NAN, 0.0)]).is_err());
    }
}
