//! Removing character-character collisions by local retiming.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{convex_hull_3d, TriMesh};
use crate::metrics::hhp_per_frame;
use crate::motion::{resample, MarkerFrame, MotionSequence};

/// Inclusive frame range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollisionInterval {
    pub start: usize,
    pub end: usize,
}

impl CollisionInterval {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevisionConfig {
    /// A frame is collided when the fraction of intersecting vertices exceeds this.
    pub hhp_threshold: f64,
    pub max_iterations: usize,
}

impl Default for RevisionConfig {
    fn default() -> Self {
        Self {
            hhp_threshold: 0.02,
            max_iterations: 8,
        }
    }
}

impl RevisionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hhp_threshold > 0.0) || self.max_iterations == 0 {
            return Err(Error::BadParams(
                "hhp_threshold must be positive and max_iterations at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Convex hull of a frame's markers; all 67 markers stay mesh vertices.
pub fn marker_hull_mesh(frame: &MarkerFrame) -> Result<TriMesh> {
    convex_hull_3d(frame.markers())
}

/// Maximal runs of frames whose intersection fraction exceeds the threshold.
pub fn intervals_from_fractions(fractions: &[f64], threshold: f64) -> Vec<CollisionInterval> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &f) in fractions.iter().enumerate() {
        match (f > threshold, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push(CollisionInterval {
                    start: s,
                    end: i - 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(CollisionInterval {
            start: s,
            end: fractions.len() - 1,
        });
    }
    out
}

pub fn detect_collision_intervals(
    a: &[TriMesh],
    b: &[TriMesh],
    cfg: &RevisionConfig,
) -> Result<Vec<CollisionInterval>> {
    cfg.validate()?;
    Ok(intervals_from_fractions(
        &hhp_per_frame(a, b)?,
        cfg.hhp_threshold,
    ))
}

fn collided_frames(iv: &[CollisionInterval]) -> usize {
    iv.iter().map(CollisionInterval::len).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Speeds up before the interval midpoint, slows down after.
    Lead,
    /// Slows down before the midpoint, speeds up after.
    Yield,
}

/// Splits at `m = (start + end) / 2` and trades `h = (end - start) / 2`
/// frames between the two parts; total length is unchanged.
pub fn retime_around(
    seq: &MotionSequence,
    iv: CollisionInterval,
    role: Role,
) -> Result<MotionSequence> {
    let len = seq.len();
    if iv.start > iv.end || iv.end >= len {
        return Err(Error::DegenerateInterval {
            start: iv.start,
            end: iv.end,
            len,
        });
    }
    let m = (iv.start + iv.end) / 2;
    let h = (iv.end - iv.start) / 2;
    if h == 0 {
        return Ok(seq.clone());
    }
    if m < h + 2 || len - m < h + 2 {
        return Err(Error::DegenerateInterval {
            start: iv.start,
            end: iv.end,
            len,
        });
    }
    let (first_len, second_len) = match role {
        Role::Lead => (m - h, len - m + h),
        Role::Yield => (m + h, len - m - h),
    };
    let first = resample(&seq.slice(0, m)?, first_len)?;
    let second = resample(&seq.slice(m, len)?, second_len)?;
    MotionSequence::concat(&[&first, &second])
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevisionStep {
    pub interval: CollisionInterval,
    pub collided_before: usize,
    pub collided_after: usize,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevisionReport {
    pub iterations: usize,
    pub collided_before: usize,
    pub collided_after: usize,
    pub steps: Vec<RevisionStep>,
    pub residual: Vec<CollisionInterval>,
}

impl RevisionReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "iterations={}", self.iterations);
        let _ = writeln!(out, "collided_before={}", self.collided_before);
        let _ = writeln!(out, "collided_after={}", self.collided_after);
        for (i, s) in self.steps.iter().enumerate() {
            let _ = writeln!(
                out,
                "step.{i}=[{},{}] {} -> {} {}",
                s.interval.start,
                s.interval.end,
                s.collided_before,
                s.collided_after,
                if s.accepted { "accepted" } else { "rejected" }
            );
        }
        let residual: Vec<String> = self
            .residual
            .iter()
            .map(|r| format!("[{},{}]", r.start, r.end))
            .collect();
        let _ = writeln!(out, "residual={}", residual.join(","));
        out
    }
}

fn build_meshes<F>(seq: &MotionSequence, builder: &F) -> Result<Vec<TriMesh>>
where
    F: Fn(&MarkerFrame) -> Result<TriMesh> + Sync,
{
    seq.frames().par_iter().map(builder).collect()
}

/// Retimes A (leading) and B (yielding) around one collision interval at a
/// time, keeping a change only when the collided-frame count drops. After an
/// accepted change the scan restarts from the first remaining interval.
/// `iterations` in the report counts accepted changes; every attempt is listed
/// in `steps`.
pub fn revise<F>(
    a: &MotionSequence,
    b: &MotionSequence,
    builder: F,
    cfg: &RevisionConfig,
) -> Result<(MotionSequence, MotionSequence, RevisionReport)>
where
    F: Fn(&MarkerFrame) -> Result<TriMesh> + Sync,
{
    cfg.validate()?;
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let detect = |x: &MotionSequence, y: &MotionSequence| -> Result<Vec<CollisionInterval>> {
        detect_collision_intervals(
            &build_meshes(x, &builder)?,
            &build_meshes(y, &builder)?,
            cfg,
        )
    };
    let mut cur_a = a.clone();
    let mut cur_b = b.clone();
    let mut intervals = detect(&cur_a, &cur_b)?;
    let before = collided_frames(&intervals);
    let mut count = before;
    let mut steps = Vec::new();
    let mut idx = 0;
    let mut iterations = 0;
    while idx < intervals.len() && iterations < cfg.max_iterations {
        let iv = intervals[idx];
        let candidate = retime_around(&cur_a, iv, Role::Lead)
            .and_then(|na| Ok((na, retime_around(&cur_b, iv, Role::Yield)?)));
        let (na, nb) = match candidate {
            Ok(pair) => pair,
            Err(Error::DegenerateInterval { .. }) => {
                steps.push(RevisionStep {
                    interval: iv,
                    collided_before: count,
                    collided_after: count,
                    accepted: false,
                });
                idx += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let next = detect(&na, &nb)?;
        let new_count = collided_frames(&next);
        let accepted = new_count < count;
        log::debug!(
            "retiming around [{}, {}]: {count} -> {new_count} collided frames",
            iv.start,
            iv.end
        );
        steps.push(RevisionStep {
            interval: iv,
            collided_before: count,
            collided_after: new_count,
            accepted,
        });
        if accepted {
            cur_a = na;
            cur_b = nb;
            intervals = next;
            count = new_count;
            iterations += 1;
            idx = 0;
        } else {
            idx += 1;
        }
    }
    let report = RevisionReport {
        iterations,
        collided_before: before,
        collided_after: count,
        steps,
        residual: intervals,
    };
    Ok((cur_a, cur_b, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Vec3;
    use crate::motion::layout::rest_pose;

    fn line(len: usize) -> MotionSequence {
        let frames = (0..len)
            .map(|i| {
                let off = Vec3::new(i as f64, 0.0, 0.0);
                MarkerFrame::new(rest_pose().into_iter().map(|p| p + off).collect(), off).unwrap()
            })
            .collect();
        MotionSequence::new(frames, 40).unwrap()
    }

    #[test]
    fn interval_grouping() {
        let mut f = vec![0.0; 100];
        for i in (10..=15).chain(70..=72) {
            f[i] = 0.5;
        }
        f[99] = 0.03;
        let iv = intervals_from_fractions(&f, 0.02);
        assert_eq!(
            iv,
            vec![
                CollisionInterval { start: 10, end: 15 },
                CollisionInterval { start: 70, end: 72 },
                CollisionInterval { start: 99, end: 99 }
            ]
        );
        assert!(intervals_from_fractions(&[0.0; 5], 0.02).is_empty());
    }

    #[test]
    fn retime_lengths() {
        let s = line(100);
        let iv = CollisionInterval { start: 40, end: 60 };
        for role in [Role::Lead, Role::Yield] {
            let r = retime_around(&s, iv, role).unwrap();
            assert_eq!(r.len(), 100);
            assert_eq!(r.first(), s.first());
            assert_eq!(r.last(), s.last());
        }
        // lead reaches the split point (x = 50) at frame 40, yield at frame 60
        let lead = retime_around(&s, iv, Role::Lead).unwrap();
        assert!((lead.frames()[39].pelvis().x - 49.0).abs() < 1e-9);
        assert!((lead.frames()[40].pelvis().x - 50.0).abs() < 1e-9);
        let yield_ = retime_around(&s, iv, Role::Yield).unwrap();
        assert!((yield_.frames()[60].pelvis().x - 50.0).abs() < 1e-9);
    }

    #[test]
    fn zero_width_is_identity_and_edges_are_rejected() {
        let s = line(20);
        assert_eq!(
            retime_around(&s, CollisionInterval { start: 7, end: 7 }, Role::Lead).unwrap(),
            s
        );
        assert!(matches!(
            retime_around(&s, CollisionInterval { start: 0, end: 4 }, Role::Lead),
            Err(Error::DegenerateInterval { .. })
        ));
        assert!(retime_around(&s, CollisionInterval { start: 15, end: 19 }, Role::Yield).is_err());
        assert!(retime_around(&s, CollisionInterval { start: 15, end: 25 }, Role::Yield).is_err());
    }

    #[test]
    fn clean_pair_is_untouched() {
        let a = line(30);
        let b = a.map_frames(|_, f| f.translated(Vec3::new(0.0, 10.0, 0.0)));
        let (ra, rb, rep) = revise(&a, &b, marker_hull_mesh, &RevisionConfig::default()).unwrap();
        assert_eq!((ra, rb), (a, b));
        assert_eq!(rep.iterations, 0);
        assert_eq!(rep.collided_before, 0);
    }
}
