//! Generalized winding numbers by exact solid-angle summation.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::TriMesh;
use crate::error::{Error, Result};
use crate::math::Vec3;

/// Default inside threshold for [`mesh_intersection_count`].
pub const INSIDE_THRESHOLD: f64 = 0.5;

/// Distance below which a query counts as lying on a triangle.
pub const SURFACE_EPS: f64 = 1e-9;

/// Signed solid angle of triangle `abc` seen from `p`
/// (Van Oosterom and Strackee).
fn solid_angle(a: Vec3, b: Vec3, c: Vec3, p: Vec3) -> f64 {
    let (a, b, c) = (a - p, b - p, c - p);
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let num = a.dot(b.cross(c));
    let den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    2.0 * num.atan2(den)
}

/// Winding number of `mesh` around `p`. Points on the surface get whatever
/// the summation yields; use [`winding_number_checked`] to detect them.
pub fn winding_number(mesh: &TriMesh, p: Vec3) -> f64 {
    let v = mesh.vertices();
    mesh.triangles()
        .iter()
        .map(|t| solid_angle(v[t[0]], v[t[1]], v[t[2]], p))
        .sum::<f64>()
        / (4.0 * PI)
}

fn on_triangle(a: Vec3, b: Vec3, c: Vec3, p: Vec3) -> bool {
    let n = (b - a).cross(c - a);
    let len = n.norm();
    if len == 0.0 {
        return false;
    }
    if ((p - a).dot(n) / len).abs() > SURFACE_EPS {
        return false;
    }
    // barycentric sign test in the plane
    let s0 = (b - a).cross(p - a).dot(n);
    let s1 = (c - b).cross(p - b).dot(n);
    let s2 = (a - c).cross(p - c).dot(n);
    s0 >= 0.0 && s1 >= 0.0 && s2 >= 0.0
}

pub fn winding_number_checked(mesh: &TriMesh, p: Vec3) -> Result<f64> {
    if mesh.is_empty() {
        return Err(Error::EmptyInput);
    }
    let v = mesh.vertices();
    if let Some(i) = mesh
        .triangles()
        .iter()
        .position(|t| on_triangle(v[t[0]], v[t[1]], v[t[2]], p))
    {
        return Err(Error::PointOnSurface { triangle: i });
    }
    Ok(winding_number(mesh, p))
}

fn count_inside(query: &TriMesh, container: &TriMesh, threshold: f64) -> usize {
    query
        .vertices()
        .par_iter()
        .filter(|&&p| winding_number(container, p) > threshold)
        .count()
}

/// `(A's vertices inside B, B's vertices inside A)`.
pub fn mesh_intersection_count(a: &TriMesh, b: &TriMesh, threshold: f64) -> Result<(usize, usize)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok((count_inside(a, b, threshold), count_inside(b, a, threshold)))
}
