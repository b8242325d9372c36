//! Indexed triangle meshes, Wavefront OBJ I/O and 3D convex hulls.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::math::{Aabb, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
}

/// One mesh per frame.
pub type MeshSequence = Vec<TriMesh>;

impl TriMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidValue(format!("non-finite vertex {p:?}")));
        }
        for t in &triangles {
            if let Some(&i) = t.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: vertices.len(),
                });
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::Degenerate(format!(
                    "triangle {t:?} repeats an index"
                )));
            }
        }
        Ok(Self {
            vertices,
            triangles,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, i: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[i];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn translated(&self, offset: Vec3) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|&v| v + offset).collect(),
            triangles: self.triangles.clone(),
        }
    }

    pub fn centroid(&self) -> Vec3 {
        let n = self.vertices.len().max(1) as f64;
        self.vertices.iter().fold(Vec3::ZERO, |acc, &v| acc + v) / n
    }

    /// Uniform scaling about the vertex centroid.
    pub fn scaled_about_centroid(&self, factor: f64) -> TriMesh {
        let c = self.centroid();
        TriMesh {
            vertices: self
                .vertices
                .iter()
                .map(|&v| c + (v - c) * factor)
                .collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Closed box with outward-facing triangles.
    pub fn cuboid(bounds: Aabb) -> TriMesh {
        let (lo, hi) = (bounds.min, bounds.max);
        let vertices = (0..8)
            .map(|i| {
                Vec3::new(
                    if i & 1 == 0 { lo.x } else { hi.x },
                    if i & 2 == 0 { lo.y } else { hi.y },
                    if i & 4 == 0 { lo.z } else { hi.z },
                )
            })
            .collect();
        let triangles = vec![
            [0, 2, 1],
            [1, 2, 3],
            [4, 5, 6],
            [5, 7, 6],
            [0, 1, 4],
            [1, 5, 4],
            [2, 6, 3],
            [3, 6, 7],
            [0, 4, 2],
            [2, 4, 6],
            [1, 3, 5],
            [3, 7, 5],
        ];
        TriMesh {
            vertices,
            triangles,
        }
    }
}

/// Parses the vertex (`v`) and face (`f`) records of an OBJ file.
///
/// Face indices are 1-based; negative indices count back from the latest
/// vertex; `v/vt/vn` forms use only the vertex index. Polygons with more
/// than three corners are fan-triangulated. Other record types are ignored.
pub fn parse_obj(text: &str, name: &str) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        let mut it = l.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it
                    .take(3)
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::format(name, line, "invalid vertex coordinate"))?;
                if c.len() != 3 || c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::format(
                        name,
                        line,
                        "vertex needs three finite coordinates",
                    ));
                }
                vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx = it
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or("");
                        let k: i64 = head.parse().map_err(|_| {
                            Error::format(name, line, format!("invalid face index `{t}`"))
                        })?;
                        let n = vertices.len() as i64;
                        let resolved = if k > 0 { k - 1 } else { n + k };
                        if k == 0 || resolved < 0 || resolved >= n {
                            return Err(Error::format(
                                name,
                                line,
                                format!("face index {k} out of range"),
                            ));
                        }
                        Ok(resolved as usize)
                    })
                    .collect::<Result<Vec<usize>>>()?;
                if idx.len() < 3 {
                    return Err(Error::format(
                        name,
                        line,
                        "face needs at least three corners",
                    ));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, triangles).map_err(|e| Error::format(name, 0, e.to_string()))
}

pub fn write_obj(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}

pub fn read_obj(path: impl AsRef<Path>) -> Result<TriMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_obj(&text, &path.display().to_string())
}

/// Loads every `*.obj` file in a directory, ordered by file name.
pub fn read_mesh_dir(dir: impl AsRef<Path>) -> Result<MeshSequence> {
    let dir = dir.as_ref();
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("obj")))
        .collect();
    paths.sort();
    paths.iter().map(read_obj).collect()
}

/// Convex hull of a point cloud as an outward-oriented closed mesh.
///
/// The returned mesh keeps the full input vertex list (interior points are
/// simply not referenced by any triangle). Incremental construction; points
/// within `eps` of a face plane are treated as lying on it.
pub fn convex_hull_3d(points: &[Vec3]) -> Result<TriMesh> {
    if points.len() < 4 {
        return Err(Error::Degenerate(
            "3D hull needs at least four points".into(),
        ));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidValue("non-finite point".into()));
    }
    let scale = points
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()).max(p.z.abs()))
        .fold(1.0, f64::max);
    let eps = 1e-10 * scale;

    // initial tetrahedron from extreme points
    let i0 = (0..points.len())
        .min_by(|&a, &b| points[a].x.total_cmp(&points[b].x))
        .unwrap();
    let i1 = farthest(points, |p| (p - points[i0]).norm());
    let dir = points[i1] - points[i0];
    if dir.norm() <= eps {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    let i2 = farthest(points, |p| (p - points[i0]).cross(dir).norm());
    let normal = (points[i2] - points[i0]).cross(dir);
    if normal.norm() <= eps * dir.norm() {
        return Err(Error::Degenerate("points are collinear".into()));
    }
    let i3 = farthest(points, |p| (p - points[i0]).dot(normal).abs());
    if (points[i3] - points[i0]).dot(normal).abs() <= eps * normal.norm() {
        return Err(Error::Degenerate("points are coplanar".into()));
    }

    let mut faces: Vec<[usize; 3]> = Vec::new();
    let seed = [i0, i1, i2, i3];
    let inner = seed.iter().fold(Vec3::ZERO, |acc, &i| acc + points[i]) / 4.0;
    for (a, b, c) in [(i0, i1, i2), (i0, i1, i3), (i0, i2, i3), (i1, i2, i3)] {
        faces.push(orient([a, b, c], points, inner));
    }

    for (pi, &p) in points.iter().enumerate() {
        if seed.contains(&pi) {
            continue;
        }
        let visible: Vec<bool> = faces
            .iter()
            .map(|f| plane_distance(f, points, p) > eps)
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let kept_edges: HashSet<(usize, usize)> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, v)| !**v)
            .flat_map(|(f, _)| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
            .collect();
        let mut next = Vec::with_capacity(faces.len() + 4);
        let mut horizon = Vec::new();
        for (f, v) in faces.iter().zip(&visible) {
            if !*v {
                next.push(*f);
                continue;
            }
            for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                if kept_edges.contains(&(b, a)) {
                    horizon.push((a, b));
                }
            }
        }
        for (a, b) in horizon {
            next.push([a, b, pi]);
        }
        faces = next;
    }
    TriMesh::new(points.to_vec(), faces)
}

fn farthest(points: &[Vec3], key: impl Fn(Vec3) -> f64) -> usize {
    (0..points.len())
        .max_by(|&a, &b| key(points[a]).total_cmp(&key(points[b])))
        .unwrap()
}

fn plane_distance(f: &[usize; 3], pts: &[Vec3], p: Vec3) -> f64 {
    let n = (pts[f[1]] - pts[f[0]]).cross(pts[f[2]] - pts[f[0]]);
    let len = n.norm();
    if len == 0.0 {
        return 0.0;
    }
    (p - pts[f[0]]).dot(n) / len
}

fn orient(f: [usize; 3], pts: &[Vec3], inner: Vec3) -> [usize; 3] {
    if plane_distance(&f, pts, inner) > 0.0 {
        [f[0], f[2], f[1]]
    } else {
        f
    }
}
