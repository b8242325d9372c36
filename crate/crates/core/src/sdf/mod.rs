//! Binary occupancy lattices (+1 free, -1 solid) and their sampling.

mod format;
mod synth;

pub use format::{
    decode_grid, encode_grid, read_grid, write_grid, GRID_FORMAT_VERSION, GRID_MAGIC,
};
pub use synth::{
    column_top, plane_top_spread, point_top_spread, rasterize_plane_based, synthesize_plane_based,
    synthesize_point_based, synthesize_point_based_with, walkable_hull, PlacedObstacle,
    PointSynthesis, SceneSynthParams, SceneSynthesis,
};

use crate::error::{Error, Result};
use crate::math::{Aabb, Vec3};

pub const FREE: i8 = 1;
pub const SOLID: i8 = -1;

/// Fractional lattice coordinates closer than this to an integer snap to it.
pub const NODE_SNAP_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleMode {
    /// Clamp queries to the bounding box.
    #[default]
    Clamp,
    /// Reject queries outside the bounding box.
    Strict,
}

/// Regular lattice over an axis-aligned box. Values are stored x-major:
/// node `(i, j, k)` lives at `(i * ny + j) * nz + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdfGrid {
    dims: [usize; 3],
    bbox: Aabb,
    values: Vec<i8>,
}

impl SdfGrid {
    pub fn new(dims: [usize; 3], bbox: Aabb, values: Vec<i8>) -> Result<Self> {
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::BadParams(format!(
                "grid dims must be at least 2 per axis, got {dims:?}"
            )));
        }
        if !bbox.is_proper() {
            return Err(Error::BadParams(format!(
                "grid bbox must satisfy min < max, got {bbox:?}"
            )));
        }
        let n = dims[0]
            .checked_mul(dims[1])
            .and_then(|v| v.checked_mul(dims[2]))
            .ok_or_else(|| Error::BadParams("grid too large".into()))?;
        if values.len() != n {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: n,
            });
        }
        if let Some(v) = values.iter().find(|&&v| v != FREE && v != SOLID) {
            return Err(Error::InvalidValue(format!(
                "grid value {v} is not +1 or -1"
            )));
        }
        Ok(Self { dims, bbox, values })
    }

    pub fn filled(dims: [usize; 3], bbox: Aabb, value: i8) -> Result<Self> {
        let n = dims.iter().product();
        Self::new(dims, bbox, vec![value; n])
    }

    /// Obstacle-free grid.
    pub fn all_free(dims: [usize; 3], bbox: Aabb) -> Result<Self> {
        Self::filled(dims, bbox, FREE)
    }

    /// Free grid with every node inside (or on) one of `boxes` made solid.
    pub fn from_boxes(dims: [usize; 3], bbox: Aabb, boxes: &[Aabb]) -> Result<Self> {
        let mut g = Self::all_free(dims, bbox)?;
        for idx in 0..g.values.len() {
            let p = g.node_pos_linear(idx);
            if boxes.iter().any(|b| b.contains(p)) {
                g.values[idx] = SOLID;
            }
        }
        Ok(g)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> Vec3 {
        let s = self.bbox.max - self.bbox.min;
        Vec3::new(
            s.x / (self.dims[0] - 1) as f64,
            s.y / (self.dims[1] - 1) as f64,
            s.z / (self.dims[2] - 1) as f64,
        )
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> i8 {
        self.values[self.index(i, j, k)]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, k: usize, v: i8) {
        let idx = self.index(i, j, k);
        self.values[idx] = v;
    }

    /// Coordinate of node `idx` along `axis`.
    pub fn axis_coord(&self, axis: usize, idx: usize) -> f64 {
        let (lo, hi) = match axis {
            0 => (self.bbox.min.x, self.bbox.max.x),
            1 => (self.bbox.min.y, self.bbox.max.y),
            _ => (self.bbox.min.z, self.bbox.max.z),
        };
        lo + idx as f64 * (hi - lo) / (self.dims[axis] - 1) as f64
    }

    pub fn node_pos(&self, i: usize, j: usize, k: usize) -> Vec3 {
        Vec3::new(
            self.axis_coord(0, i),
            self.axis_coord(1, j),
            self.axis_coord(2, k),
        )
    }

    fn node_pos_linear(&self, idx: usize) -> Vec3 {
        let k = idx % self.dims[2];
        let j = (idx / self.dims[2]) % self.dims[1];
        let i = idx / (self.dims[1] * self.dims[2]);
        self.node_pos(i, j, k)
    }

    /// Clamp-mode trilinear sample.
    pub fn sample(&self, p: Vec3) -> f64 {
        trilinear(self, self.clamp(p))
    }

    fn clamp(&self, p: Vec3) -> Vec3 {
        let (lo, hi) = (self.bbox.min, self.bbox.max);
        Vec3::new(
            p.x.clamp(lo.x, hi.x),
            p.y.clamp(lo.y, hi.y),
            p.z.clamp(lo.z, hi.z),
        )
    }
}

/// Cell index and interpolation weight along one axis.
fn locate(u: f64, n: usize) -> (usize, f64) {
    let r = u.round();
    let u = if (u - r).abs() < NODE_SNAP_EPS { r } else { u };
    let i0 = (u.floor().max(0.0) as usize).min(n - 2);
    (i0, (u - i0 as f64).clamp(0.0, 1.0))
}

fn trilinear(g: &SdfGrid, p: Vec3) -> f64 {
    let s = g.spacing();
    let rel = p - g.bbox.min;
    let (i, tx) = locate(rel.x / s.x, g.dims[0]);
    let (j, ty) = locate(rel.y / s.y, g.dims[1]);
    let (k, tz) = locate(rel.z / s.z, g.dims[2]);
    let v = |di: usize, dj: usize, dk: usize| f64::from(g.value(i + di, j + dj, k + dk));
    let lerp = |a: f64, b: f64, t: f64| a * (1.0 - t) + b * t;
    let c00 = lerp(v(0, 0, 0), v(1, 0, 0), tx);
    let c10 = lerp(v(0, 1, 0), v(1, 1, 0), tx);
    let c01 = lerp(v(0, 0, 1), v(1, 0, 1), tx);
    let c11 = lerp(v(0, 1, 1), v(1, 1, 1), tx);
    lerp(lerp(c00, c10, ty), lerp(c01, c11, ty), tz)
}

pub fn sample_sdf(grid: &SdfGrid, p: Vec3, mode: SampleMode) -> Result<f64> {
    if !p.is_finite() {
        return Err(Error::InvalidValue(format!("non-finite query {p:?}")));
    }
    match mode {
        SampleMode::Clamp => Ok(grid.sample(p)),
        SampleMode::Strict if grid.bbox.contains(p) => Ok(trilinear(grid, p)),
        SampleMode::Strict => Err(Error::OutOfBounds(p.to_array())),
    }
}

/// One `[x, y, z, value]` row per node in storage order, positions relative
/// to `anchor`.
pub fn condition_points(grid: &SdfGrid, anchor: Vec3) -> Vec<[f64; 4]> {
    let [nx, ny, nz] = grid.dims;
    let mut out = Vec::with_capacity(grid.len());
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let p = grid.node_pos(i, j, k) - anchor;
                out.push([p.x, p.y, p.z, f64::from(grid.value(i, j, k))]);
            }
        }
    }
    out
}
