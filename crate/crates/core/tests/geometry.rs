use std::f64::consts::PI;

use duetkit::geometry::{
    convex_hull_2d, convex_hull_3d, mesh_intersection_count, point_in_hull, winding_number,
    TriMesh, INSIDE_THRESHOLD,
};
use duetkit::math::{Vec2, Vec3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn girard(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let (a, b, c) = (a / a.norm(), b / b.norm(), c / c.norm());
    let corner = |p: Vec3, q: Vec3, r: Vec3| {
        let n1 = p.cross(q);
        let n2 = p.cross(r);
        n1.cross(n2).norm().atan2(n1.dot(n2))
    };
    let excess = corner(a, b, c) + corner(b, c, a) + corner(c, a, b) - PI;
    excess * a.dot(b.cross(c)).signum()
}

fn oracle_winding(mesh: &TriMesh, p: Vec3) -> f64 {
    let v = mesh.vertices();
    mesh.triangles()
        .iter()
        .map(|t| girard(v[t[0]] - p, v[t[1]] - p, v[t[2]] - p))
        .sum::<f64>()
        / (4.0 * PI)
}

/// Odd number of crossings along a fixed, generic ray direction.
fn ray_parity_inside(mesh: &TriMesh, p: Vec3) -> bool {
    let dir = Vec3::new(0.5731, 0.3127, 0.7579);
    let mut hits = 0;
    for i in 0..mesh.triangles().len() {
        let [a, b, c] = mesh.triangle(i);
        let e1 = b - a;
        let e2 = c - a;
        let h = dir.cross(e2);
        let det = e1.dot(h);
        if det.abs() < 1e-14 {
            continue;
        }
        let s = p - a;
        let u = s.dot(h) / det;
        let q = s.cross(e1);
        let v = dir.dot(q) / det;
        let t = e2.dot(q) / det;
        if u >= 0.0 && v >= 0.0 && u + v <= 1.0 && t > 0.0 {
            hits += 1;
        }
    }
    hits % 2 == 1
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<Vec3> {
    (0..n)
        .map(|_| {
            Vec3::new(
                rng.random_range(-r..r),
                rng.random_range(-r..r),
                rng.random_range(-r..r),
            )
        })
        .collect()
}

fn vec2() -> impl Strategy<Value = Vec2> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Vec2::new(x, y))
}

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

#[test]
fn hull_contains_inputs_by_half_planes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let pts: Vec<Vec2> = (0..50)
            .map(|_| Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
            .collect();
        let h = convex_hull_2d(&pts).unwrap();
        let v = h.vertices();
        for p in &pts {
            for i in 0..v.len() {
                let e = v[(i + 1) % v.len()] - v[i];
                assert!(e.cross(*p - v[i]) >= -1e-12, "{p:?} outside edge {i}");
            }
        }
    }
}

#[test]
fn open_mesh_matches_girard_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // a bumpy open sheet
    let n = 6;
    let verts: Vec<Vec3> = (0..=n)
        .flat_map(|i| (0..=n).map(move |j| (i, j)))
        .map(|(i, j)| Vec3::new(i as f64 / n as f64, j as f64 / n as f64, 0.0))
        .map(|p| Vec3::new(p.x, p.y, 0.2 * (3.0 * p.x).sin() * (2.0 * p.y).cos()))
        .collect();
    let id = |i: usize, j: usize| i * (n + 1) + j;
    let mut tris = Vec::new();
    for i in 0..n {
        for j in 0..n {
            tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let sheet = TriMesh::new(verts, tris).unwrap();
    for p in random_points(&mut rng, 500, 1.5) {
        let w = winding_number(&sheet, p);
        assert!((w - oracle_winding(&sheet, p)).abs() < 1e-9, "at {p:?}");
    }
}

#[test]
fn intersection_counts_match_ray_parity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let a = convex_hull_3d(&random_points(&mut rng, 30, 1.0)).unwrap();
        let shift = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            0.0,
        );
        let b = convex_hull_3d(&random_points(&mut rng, 30, 1.0))
            .unwrap()
            .translated(shift);
        let (ab, ba) = mesh_intersection_count(&a, &b, INSIDE_THRESHOLD).unwrap();
        let parity = |q: &TriMesh, c: &TriMesh| {
            q.vertices()
                .iter()
                .filter(|&&p| ray_parity_inside(c, p))
                .count()
        };
        assert_eq!(ab, parity(&a, &b));
        assert_eq!(ba, parity(&b, &a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_is_idempotent_and_contains_inputs(pts in prop::collection::vec(vec2(), 1..60)) {
        let h = convex_hull_2d(&pts).unwrap();
        let again = convex_hull_2d(h.vertices()).unwrap();
        prop_assert_eq!(&again, &h);
        for p in &pts {
            prop_assert!(point_in_hull(&h, *p));
        }
    }

    #[test]
    fn splitting_a_triangle_keeps_winding(
        tri in prop::collection::vec(vec3(1.0), 3),
        t in 0.05..0.95f64,
        p in vec3(2.0),
    ) {
        let (a, b, c) = (tri[0], tri[1], tri[2]);
        prop_assume!((b - a).cross(c - a).norm() > 1e-3);
        let m = a.lerp(b, t);
        let whole = TriMesh::new(vec![a, b, c], vec![[0, 1, 2]]).unwrap();
        let split = TriMesh::new(vec![a, b, c, m], vec![[0, 3, 2], [3, 1, 2]]).unwrap();
        // stay clear of the triangle's plane
        let n = (b - a).cross(c - a);
        prop_assume!(((p - a).dot(n) / n.norm()).abs() > 1e-3);
        prop_assert!((winding_number(&whole, p) - winding_number(&split, p)).abs() < 1e-9);
    }

    #[test]
    fn closed_mesh_dichotomy(pts in prop::collection::vec(vec3(1.0), 6..30), q in vec3(1.5)) {
        let Ok(mesh) = convex_hull_3d(&pts) else { return Ok(()); };
        let w = winding_number(&mesh, q);
        prop_assert!(w.abs() < 1e-3 || (w - 1.0).abs() < 1e-3, "w = {}", w);
    }

    #[test]
    fn intersection_count_swaps(
        pa in prop::collection::vec(vec3(1.0), 8..20),
        pb in prop::collection::vec(vec3(1.0), 8..20),
        shift in vec3(1.0),
    ) {
        let (Ok(a), Ok(b)) = (convex_hull_3d(&pa), convex_hull_3d(&pb)) else { return Ok(()); };
        let b = b.translated(shift);
        let (x, y) = mesh_intersection_count(&a, &b, INSIDE_THRESHOLD).unwrap();
        prop_assert_eq!(mesh_intersection_count(&b, &a, INSIDE_THRESHOLD).unwrap(), (y, x));
    }
}
