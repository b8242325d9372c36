//! Synthetic obstacle scenes around a motion's walkable region.
//!
//! Random draw order for the plane-based variant, from one ChaCha8 stream
//! seeded with `params.seed`:
//!
//! 1. ceiling height `~ U[t_ceiling_range]`
//! 2. pattern count `K ~ U{k_range}`
//! 3. per pattern: kind (fair coin), center x, center y (uniform over the box
//!    footprint), half extents a, b `~ U[pattern_extent_range]`,
//!    yaw `~ U[0, pi)`, top height `~ U(t_floor, t_ceiling)`
//!
//! The point-based variant draws the ceiling first, then one height per
//! out-of-hull column in storage order.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SdfGrid, FREE, SOLID};
use crate::error::{Error, Result};
use crate::geometry::{convex_hull_2d, Hull2D, ObstaclePattern, PatternKind, TriMesh};
use crate::math::{Aabb, Vec2, Vec3};
use crate::motion::layout::REST_PELVIS_HEIGHT;

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSynthParams {
    pub box_size: Vec3,
    pub dims: [usize; 3],
    pub t_floor: f64,
    pub t_ceiling_range: (f64, f64),
    pub k_range: (usize, usize),
    pub pattern_extent_range: (f64, f64),
    /// Box center, normally the anchor character's pelvis.
    pub center: Vec3,
    pub seed: u64,
}

impl Default for SceneSynthParams {
    fn default() -> Self {
        let center = Vec3::new(0.0, 0.0, REST_PELVIS_HEIGHT);
        Self {
            box_size: Vec3::new(3.0, 3.0, 3.0),
            dims: [128, 128, 128],
            t_floor: 0.0,
            t_ceiling_range: (1.9, center.z + 1.5),
            k_range: (0, 10),
            pattern_extent_range: (0.1, 0.75),
            center,
            seed: 0,
        }
    }
}

impl SceneSynthParams {
    /// Ceiling drawn between the top of the body and the top of the box.
    pub fn with_body_top(mut self, body_max_z: f64) -> Self {
        self.t_ceiling_range = (body_max_z, self.bbox().max.z);
        self
    }

    pub fn bbox(&self) -> Aabb {
        let half = self.box_size * 0.5;
        Aabb::new(self.center - half, self.center + half)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::BadParams(m));
        let s = self.box_size;
        if !(s.x > 0.0 && s.y > 0.0 && s.z > 0.0) || !s.is_finite() || !self.center.is_finite() {
            return bad(format!("box size must be positive and finite, got {s:?}"));
        }
        if self.dims.iter().any(|&d| d < 2) {
            return bad(format!(
                "dims must be at least 2 per axis, got {:?}",
                self.dims
            ));
        }
        let (lo, hi) = self.t_ceiling_range;
        if !(self.t_floor < lo && lo <= hi) || !hi.is_finite() || !self.t_floor.is_finite() {
            return bad(format!(
                "need t_floor < ceiling low <= ceiling high, got {} / ({lo}, {hi})",
                self.t_floor
            ));
        }
        let (k0, k1) = self.k_range;
        if k0 > k1 || k1 > 64 {
            return bad(format!(
                "k_range must satisfy low <= high <= 64, got ({k0}, {k1})"
            ));
        }
        let (e0, e1) = self.pattern_extent_range;
        if !(e0 > 0.0 && e0 <= e1 && e1.is_finite()) {
            return bad(format!(
                "pattern extents must satisfy 0 < low <= high, got ({e0}, {e1})"
            ));
        }
        Ok(())
    }
}

/// Ground-plane hull of every vertex of every frame.
pub fn walkable_hull(meshes: &[TriMesh]) -> Result<Hull2D> {
    let pts: Vec<Vec2> = meshes
        .iter()
        .flat_map(|m| m.vertices().iter().map(|v| v.xy()))
        .collect();
    convex_hull_2d(&pts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacedObstacle {
    pub pattern: ObstaclePattern,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSynthesis {
    pub grid: SdfGrid,
    pub patterns: Vec<PlacedObstacle>,
    pub t_ceiling: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSynthesis {
    pub grid: SdfGrid,
    pub t_ceiling: f64,
    /// Drawn obstacle height per column in `i * ny + j` order; `None` inside the hull.
    pub column_heights: Vec<Option<f64>>,
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo < hi {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn inclusive(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo < hi {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

pub fn synthesize_plane_based(hull: &Hull2D, params: &SceneSynthParams) -> Result<SceneSynthesis> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let t_ceiling = inclusive(&mut rng, params.t_ceiling_range);
    let k = rng.random_range(params.k_range.0..=params.k_range.1);
    let bbox = params.bbox();
    let mut patterns = Vec::with_capacity(k);
    for _ in 0..k {
        let kind = if rng.random_bool(0.5) {
            PatternKind::Rectangle
        } else {
            PatternKind::Ellipse
        };
        let cx = uniform(&mut rng, bbox.min.x, bbox.max.x);
        let cy = uniform(&mut rng, bbox.min.y, bbox.max.y);
        let a = inclusive(&mut rng, params.pattern_extent_range);
        let b = inclusive(&mut rng, params.pattern_extent_range);
        let yaw = uniform(&mut rng, 0.0, PI);
        let height = uniform(&mut rng, params.t_floor, t_ceiling);
        patterns.push(PlacedObstacle {
            pattern: ObstaclePattern::new(kind, Vec2::new(cx, cy), (a, b), yaw)?,
            height,
        });
    }
    let grid = rasterize_plane_based(hull, params, t_ceiling, &patterns)?;
    Ok(SceneSynthesis {
        grid,
        patterns,
        t_ceiling,
    })
}

fn floor_ceiling(z: f64, t_floor: f64, t_ceiling: f64) -> bool {
    z <= t_floor || z >= t_ceiling
}

/// Rasterizes given obstacles; a column covered by several patterns takes
/// the highest of their heights.
pub fn rasterize_plane_based(
    hull: &Hull2D,
    params: &SceneSynthParams,
    t_ceiling: f64,
    patterns: &[PlacedObstacle],
) -> Result<SdfGrid> {
    params.validate()?;
    let mut grid = SdfGrid::all_free(params.dims, params.bbox())?;
    let [nx, ny, nz] = params.dims;
    for i in 0..nx {
        for j in 0..ny {
            let xy = Vec2::new(grid.axis_coord(0, i), grid.axis_coord(1, j));
            let top = if hull.contains(xy) {
                None
            } else {
                patterns
                    .iter()
                    .filter(|o| o.pattern.contains(xy))
                    .map(|o| o.height)
                    .reduce(f64::max)
            };
            for k in 0..nz {
                let z = grid.axis_coord(2, k);
                let solid =
                    floor_ceiling(z, params.t_floor, t_ceiling) || top.is_some_and(|h| z < h);
                if solid {
                    grid.set(i, j, k, SOLID);
                }
            }
        }
    }
    Ok(grid)
}

pub fn synthesize_point_based(hull: &Hull2D, params: &SceneSynthParams) -> Result<PointSynthesis> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let t_ceiling = inclusive(&mut rng, params.t_ceiling_range);
    let t_floor = params.t_floor;
    synthesize_point_based_with(hull, params, t_ceiling, |_, _| {
        uniform(&mut rng, t_floor, t_ceiling)
    })
}

/// Point-based synthesis with caller-supplied column heights, called once
/// per out-of-hull column `(i, j)` in storage order.
pub fn synthesize_point_based_with(
    hull: &Hull2D,
    params: &SceneSynthParams,
    t_ceiling: f64,
    mut heights: impl FnMut(usize, usize) -> f64,
) -> Result<PointSynthesis> {
    params.validate()?;
    let mut grid = SdfGrid::all_free(params.dims, params.bbox())?;
    let [nx, ny, nz] = params.dims;
    let mut column_heights = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let xy = Vec2::new(grid.axis_coord(0, i), grid.axis_coord(1, j));
            let top = (!hull.contains(xy)).then(|| heights(i, j));
            column_heights.push(top);
            for k in 0..nz {
                let z = grid.axis_coord(2, k);
                if floor_ceiling(z, params.t_floor, t_ceiling) || top.is_some_and(|h| z < h) {
                    grid.set(i, j, k, SOLID);
                }
            }
        }
    }
    Ok(PointSynthesis {
        grid,
        t_ceiling,
        column_heights,
    })
}

/// Index of the topmost node in the solid run that starts just above the
/// floor, or one below that first node when the run is empty.
pub fn column_top(grid: &SdfGrid, i: usize, j: usize, t_floor: f64) -> i64 {
    let nz = grid.dims()[2];
    let first = (0..nz)
        .find(|&k| grid.axis_coord(2, k) > t_floor)
        .unwrap_or(nz);
    let mut top = first as i64 - 1;
    for k in first..nz {
        if grid.value(i, j, k) != SOLID {
            break;
        }
        top = k as i64;
    }
    top
}

fn spread(tops: impl Iterator<Item = i64>) -> usize {
    let (lo, hi) = tops.fold((i64::MAX, i64::MIN), |(lo, hi), t| (lo.min(t), hi.max(t)));
    if lo > hi {
        0
    } else {
        (hi - lo) as usize
    }
}

/// Largest per-pattern spread of column tops. Each out-of-hull column counts
/// toward the pattern(s) providing its maximum covering height.
pub fn plane_top_spread(syn: &SceneSynthesis, hull: &Hull2D, t_floor: f64) -> usize {
    let g = &syn.grid;
    let [nx, ny, _] = g.dims();
    let mut owned: Vec<Vec<i64>> = vec![Vec::new(); syn.patterns.len()];
    for i in 0..nx {
        for j in 0..ny {
            let xy = Vec2::new(g.axis_coord(0, i), g.axis_coord(1, j));
            if hull.contains(xy) {
                continue;
            }
            let covering: Vec<usize> = (0..syn.patterns.len())
                .filter(|&p| syn.patterns[p].pattern.contains(xy))
                .collect();
            let Some(h) = covering
                .iter()
                .map(|&p| syn.patterns[p].height)
                .reduce(f64::max)
            else {
                continue;
            };
            let top = column_top(g, i, j, t_floor);
            for p in covering {
                if syn.patterns[p].height == h {
                    owned[p].push(top);
                }
            }
        }
    }
    owned
        .into_iter()
        .map(|t| spread(t.into_iter()))
        .max()
        .unwrap_or(0)
}

/// Spread of column tops over every out-of-hull column.
pub fn point_top_spread(grid: &SdfGrid, hull: &Hull2D, t_floor: f64) -> usize {
    let [nx, ny, _] = grid.dims();
    spread(
        (0..nx)
            .flat_map(|i| (0..ny).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let xy = Vec2::new(grid.axis_coord(0, i), grid.axis_coord(1, j));
                (!hull.contains(xy)).then(|| column_top(grid, i, j, t_floor))
            }),
    )
}

impl SdfGrid {
    /// Count of free nodes; handy for quick summaries.
    pub fn free_count(&self) -> usize {
        self.values().iter().filter(|&&v| v == FREE).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SceneSynthParams {
        SceneSynthParams {
            dims: [16, 16, 16],
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn validation() {
        assert!(small(0).validate().is_ok());
        let mut p = small(0);
        p.t_ceiling_range = (-1.0, 2.0);
        assert!(matches!(
            synthesize_plane_based(&Hull2D::empty(), &p),
            Err(Error::BadParams(_))
        ));
        let mut p = small(0);
        p.k_range = (3, 65);
        assert!(p.validate().is_err());
        let mut p = small(0);
        p.pattern_extent_range = (0.0, 1.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn no_patterns_leaves_interior_free() {
        let mut p = small(3);
        p.k_range = (0, 0);
        let syn = synthesize_plane_based(&Hull2D::empty(), &p).unwrap();
        assert!(syn.patterns.is_empty());
        let g = &syn.grid;
        for i in 0..16 {
            for j in 0..16 {
                for k in 0..16 {
                    let z = g.axis_coord(2, k);
                    let expect = if z <= p.t_floor || z >= syn.t_ceiling {
                        SOLID
                    } else {
                        FREE
                    };
                    assert_eq!(g.value(i, j, k), expect);
                }
            }
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let a = synthesize_plane_based(&Hull2D::empty(), &small(42)).unwrap();
        let b = synthesize_plane_based(&Hull2D::empty(), &small(42)).unwrap();
        assert_eq!(a, b);
        let c = synthesize_plane_based(&Hull2D::empty(), &small(43)).unwrap();
        assert_ne!(a.grid, c.grid);
    }

    #[test]
    fn column_top_of_empty_and_full_columns() {
        let p = small(0);
        let hull = convex_hull_2d(&[
            Vec2::new(-5.0, -5.0),
            Vec2::new(5.0, -5.0),
            Vec2::new(0.0, 5.0),
        ])
        .unwrap();
        let s = synthesize_point_based_with(&Hull2D::empty(), &p, 2.0, |_, _| 2.0).unwrap();
        let covered = synthesize_point_based_with(&hull, &p, 2.0, |_, _| unreachable!()).unwrap();
        assert!(covered.column_heights.iter().all(Option::is_none));
        let t_full = column_top(&s.grid, 3, 3, p.t_floor);
        let t_empty = column_top(&covered.grid, 3, 3, p.t_floor);
        // the full column merges into the ceiling layer
        assert_eq!(t_full, 15);
        assert!(t_empty < t_full);
        assert_eq!(point_top_spread(&s.grid, &Hull2D::empty(), p.t_floor), 0);
    }
}
