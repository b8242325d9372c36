//! Two-character canonicalization.
//!
//! `Initial` moves character A's frame-0 pelvis to the origin and turns its
//! frame-0 facing to +Y, applying the same rigid motion to B; all markers
//! stay in that shared world frame. `Improved` expresses every frame of each
//! character relative to its own pelvis and keeps the pelvis trajectories
//! separately.

use std::f64::consts::FRAC_PI_2;

use super::layout::MarkerLayout;
use super::{MarkerFrame, MotionSequence};
use crate::error::{Error, Result};
use crate::math::{Vec2, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Canonicalization {
    Initial,
    Improved,
}

/// Rotation about +z followed by nothing else: `p' = Rz(yaw) * (p - origin)`.
///
/// `origin` is horizontal (z = 0); heights are preserved so the floor stays
/// at its original level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YawTransform {
    pub yaw: f64,
    pub origin: Vec3,
}

impl YawTransform {
    pub const IDENTITY: YawTransform = YawTransform {
        yaw: 0.0,
        origin: Vec3::ZERO,
    };

    pub fn apply(&self, p: Vec3) -> Vec3 {
        (p - self.origin).rotate_z(self.yaw)
    }

    pub fn invert(&self, p: Vec3) -> Vec3 {
        p.rotate_z(-self.yaw) + self.origin
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalPair {
    pub mode: Canonicalization,
    pub seq_a: MotionSequence,
    pub seq_b: MotionSequence,
    pub pelvis_track_a: Vec<Vec3>,
    pub pelvis_track_b: Vec<Vec3>,
    /// Rigid transform applied at canonicalization time (identity for `Improved`).
    pub frame0: YawTransform,
}

/// Heading of a frame: the horizontal left-hip to right-hip direction turned
/// +90 degrees about z. Returned as an angle from +X.
pub fn facing_yaw(frame: &MarkerFrame, layout: &MarkerLayout) -> Result<f64> {
    let m = frame.markers();
    let across: Vec2 = (m[layout.right_hip] - m[layout.left_hip]).xy();
    if across.norm() < 1e-9 {
        return Err(Error::Degenerate(
            "hip markers coincide in the ground plane; facing is undefined".into(),
        ));
    }
    let forward = Vec2::new(-across.y, across.x);
    Ok(forward.y.atan2(forward.x))
}

fn check_pair(a: &MotionSequence, b: &MotionSequence) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.fps() != b.fps() {
        return Err(Error::FpsMismatch(a.fps(), b.fps()));
    }
    Ok(())
}

pub fn canonicalize_initial(a: &MotionSequence, b: &MotionSequence) -> Result<CanonicalPair> {
    canonicalize_initial_with(a, b, &MarkerLayout::default())
}

pub fn canonicalize_initial_with(
    a: &MotionSequence,
    b: &MotionSequence,
    layout: &MarkerLayout,
) -> Result<CanonicalPair> {
    check_pair(a, b)?;
    let first = a.first();
    let heading = facing_yaw(first, layout)?;
    let p0 = first.pelvis();
    let frame0 = YawTransform {
        yaw: FRAC_PI_2 - heading,
        origin: Vec3::new(p0.x, p0.y, 0.0),
    };
    let seq_a = a.map_frames(|_, f| f.map_points(|p| frame0.apply(p)));
    let seq_b = b.map_frames(|_, f| f.map_points(|p| frame0.apply(p)));
    let pelvis_track_a = seq_a.frames().iter().map(|f| f.pelvis()).collect();
    let pelvis_track_b = seq_b.frames().iter().map(|f| f.pelvis()).collect();
    Ok(CanonicalPair {
        mode: Canonicalization::Initial,
        seq_a,
        seq_b,
        pelvis_track_a,
        pelvis_track_b,
        frame0,
    })
}

fn pelvis_local(seq: &MotionSequence) -> (MotionSequence, Vec<Vec3>) {
    let track = seq.frames().iter().map(|f| f.pelvis()).collect();
    let local = seq.map_frames(|_, f| {
        let origin = f.pelvis();
        let mut out = f.map_points(|p| p - origin);
        out.set_pelvis(Vec3::ZERO);
        out
    });
    (local, track)
}

pub fn canonicalize_improved(a: &MotionSequence, b: &MotionSequence) -> Result<CanonicalPair> {
    check_pair(a, b)?;
    let (seq_a, pelvis_track_a) = pelvis_local(a);
    let (seq_b, pelvis_track_b) = pelvis_local(b);
    Ok(CanonicalPair {
        mode: Canonicalization::Improved,
        seq_a,
        seq_b,
        pelvis_track_a,
        pelvis_track_b,
        frame0: YawTransform::IDENTITY,
    })
}

/// Inverse of whichever canonicalization produced `pair`.
pub fn decode(pair: &CanonicalPair) -> Result<(MotionSequence, MotionSequence)> {
    let one = |seq: &MotionSequence, track: &[Vec3]| -> Result<MotionSequence> {
        if seq.len() != track.len() {
            return Err(Error::LengthMismatch {
                left: seq.len(),
                right: track.len(),
            });
        }
        Ok(match pair.mode {
            Canonicalization::Initial => {
                seq.map_frames(|_, f| f.map_points(|p| pair.frame0.invert(p)))
            }
            Canonicalization::Improved => seq.map_frames(|i, f| {
                let origin = track[i];
                let mut out = f.map_points(|p| pair.frame0.invert(p + origin));
                out.set_pelvis(pair.frame0.invert(origin));
                out
            }),
        })
    };
    Ok((
        one(&pair.seq_a, &pair.pelvis_track_a)?,
        one(&pair.seq_b, &pair.pelvis_track_b)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::layout::rest_pose;
    use crate::motion::MARKER_COUNT;

    fn body(ground: Vec3, heading: f64) -> MarkerFrame {
        // rest pose faces +Y, i.e. heading pi/2
        let turn = heading - FRAC_PI_2;
        let markers = rest_pose()
            .into_iter()
            .map(|p| p.rotate_z(turn) + ground)
            .collect();
        MarkerFrame::new(markers, ground + Vec3::new(0.0, 0.0, 0.95)).unwrap()
    }

    fn seq(frames: Vec<MarkerFrame>) -> MotionSequence {
        MotionSequence::new(frames, 40).unwrap()
    }

    fn close(a: &MotionSequence, b: &MotionSequence, tol: f64) -> bool {
        a.frames().iter().zip(b.frames()).all(|(x, y)| {
            (x.pelvis() - y.pelvis()).norm() <= tol
                && x.markers()
                    .iter()
                    .zip(y.markers())
                    .all(|(p, q)| (*p - *q).norm() <= tol)
        })
    }

    #[test]
    fn rest_pose_faces_plus_y() {
        let yaw = facing_yaw(&body(Vec3::ZERO, FRAC_PI_2), &MarkerLayout::default()).unwrap();
        assert!((yaw - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn identity_when_already_canonical() {
        let a = seq(vec![body(Vec3::ZERO, FRAC_PI_2); 3]);
        let b = seq(vec![body(Vec3::new(2.0, 1.0, 0.0), 0.3); 3]);
        let pair = canonicalize_initial(&a, &b).unwrap();
        assert!(close(&pair.seq_a, &a, 1e-12));
        assert!(close(&pair.seq_b, &b, 1e-12));
    }

    #[test]
    fn translation_is_removed() {
        let off = Vec3::new(3.0, -2.0, 0.0);
        let a0 = seq(vec![
            body(Vec3::ZERO, FRAC_PI_2),
            body(Vec3::new(0.0, 0.1, 0.0), FRAC_PI_2),
        ]);
        let b0 = seq(vec![body(Vec3::new(1.0, 1.0, 0.0), 1.0); 2]);
        let shift = |s: &MotionSequence| s.map_frames(|_, f| f.translated(off));
        let pair = canonicalize_initial(&shift(&a0), &shift(&b0)).unwrap();
        assert!(close(&pair.seq_a, &a0, 1e-12));
        assert!(close(&pair.seq_b, &b0, 1e-12));
    }

    #[test]
    fn improved_single_character_definition() {
        let g = Vec3::new(5.0, 5.0, 0.05);
        let raw = body(g, 0.7);
        let a = seq(vec![raw.clone(); 2]);
        let pair = canonicalize_improved(&a, &a).unwrap();
        let pelvis = raw.pelvis();
        for (f, t) in pair.seq_a.frames().iter().zip(&pair.pelvis_track_a) {
            assert_eq!(f.pelvis(), Vec3::ZERO);
            assert_eq!(*t, pelvis);
            for (m, r) in f.markers().iter().zip(raw.markers()) {
                assert_eq!(*m, *r - pelvis);
            }
        }
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let a = seq(vec![body(Vec3::ZERO, 0.0); 2]);
        let b = seq(vec![body(Vec3::ZERO, 0.0); 3]);
        assert!(matches!(
            canonicalize_initial(&a, &b),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            canonicalize_improved(&a, &b),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn decode_of_identity_pair() {
        let a = seq(vec![body(Vec3::ZERO, FRAC_PI_2); 2]);
        let pair = canonicalize_initial(&a, &a).unwrap();
        let (da, db) = decode(&pair).unwrap();
        assert!(close(&da, &a, 1e-12) && close(&db, &a, 1e-12));
        assert_eq!(pair.seq_a.first().markers().len(), MARKER_COUNT);
    }
}
