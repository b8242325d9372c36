//! Marker-based motion data model.
//!
//! A frame holds 67 surface markers plus one pelvis position, z-up, meters.
//! Sequences may carry two optional rotation channels: body joint rotations
//! and a 30-joint hand channel.

mod canonical;
pub mod format;
pub mod layout;
mod quaternion;

pub use canonical::{
    canonicalize_improved, canonicalize_initial, canonicalize_initial_with, decode, facing_yaw,
    CanonicalPair, Canonicalization, YawTransform,
};
pub use quaternion::{Quaternion, SLERP_LINEAR_THRESHOLD};

use crate::error::{Error, Result};
use crate::geometry::TriMesh;
use crate::math::Vec3;

pub const MARKER_COUNT: usize = 67;
pub const HAND_JOINTS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct MarkerFrame {
    markers: Vec<Vec3>,
    pelvis: Vec3,
}

impl MarkerFrame {
    pub fn new(markers: Vec<Vec3>, pelvis: Vec3) -> Result<Self> {
        if markers.len() != MARKER_COUNT {
            return Err(Error::MarkerMismatch(format!(
                "expected {MARKER_COUNT} markers, got {}",
                markers.len()
            )));
        }
        if let Some(i) = markers.iter().position(|m| !m.is_finite()) {
            return Err(Error::InvalidValue(format!("marker {i} is not finite")));
        }
        if !pelvis.is_finite() {
            return Err(Error::InvalidValue("pelvis is not finite".into()));
        }
        Ok(Self { markers, pelvis })
    }

    pub fn markers(&self) -> &[Vec3] {
        &self.markers
    }

    pub fn pelvis(&self) -> Vec3 {
        self.pelvis
    }

    /// Applies `f` to every marker and the pelvis.
    pub fn map_points(&self, mut f: impl FnMut(Vec3) -> Vec3) -> MarkerFrame {
        MarkerFrame {
            markers: self.markers.iter().map(|&m| f(m)).collect(),
            pelvis: f(self.pelvis),
        }
    }

    pub fn translated(&self, offset: Vec3) -> MarkerFrame {
        self.map_points(|p| p + offset)
    }

    pub fn lerp(&self, other: &MarkerFrame, t: f64) -> MarkerFrame {
        MarkerFrame {
            markers: self
                .markers
                .iter()
                .zip(&other.markers)
                .map(|(a, b)| a.lerp(*b, t))
                .collect(),
            pelvis: self.pelvis.lerp(other.pelvis, t),
        }
    }

    /// Marker `i` replaced in place; used by generators and noise injection.
    pub(crate) fn markers_mut(&mut self) -> &mut [Vec3] {
        &mut self.markers
    }

    pub(crate) fn set_pelvis(&mut self, p: Vec3) {
        self.pelvis = p;
    }
}

/// Per-frame list of joint rotations with a fixed joint count.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationTrack {
    joints: usize,
    frames: Vec<Vec<Quaternion>>,
}

impl RotationTrack {
    pub fn new(joints: usize, frames: Vec<Vec<Quaternion>>) -> Result<Self> {
        if joints == 0 {
            return Err(Error::InvalidValue("rotation track needs joints".into()));
        }
        if let Some(f) = frames.iter().find(|f| f.len() != joints) {
            return Err(Error::MarkerMismatch(format!(
                "rotation frame has {} joints, expected {joints}",
                f.len()
            )));
        }
        Ok(Self { joints, frames })
    }

    /// `len` copies of the same pose.
    pub fn constant(pose: Vec<Quaternion>, len: usize) -> Result<Self> {
        let joints = pose.len();
        Self::new(joints, vec![pose; len])
    }

    pub fn joints(&self) -> usize {
        self.joints
    }

    pub fn frames(&self) -> &[Vec<Quaternion>] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn into_frames(self) -> Vec<Vec<Quaternion>> {
        self.frames
    }

    /// Per-joint slerp between two poses.
    pub fn slerp_pose(a: &[Quaternion], b: &[Quaternion], t: f64) -> Vec<Quaternion> {
        a.iter().zip(b).map(|(qa, qb)| qa.slerp(qb, t)).collect()
    }

    /// Largest per-joint rotation angle between two poses.
    pub fn pose_angle(a: &[Quaternion], b: &[Quaternion]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(qa, qb)| qa.angle_to(qb))
            .fold(0.0, f64::max)
    }

    /// Resamples with per-joint slerp using the same time map as [`resample`].
    pub fn resample(&self, new_len: usize) -> Result<RotationTrack> {
        if new_len < 2 {
            return Err(Error::BadLength(new_len));
        }
        if self.frames.is_empty() {
            return Err(Error::EmptyInput);
        }
        let frames = resample_indices(self.frames.len(), new_len)
            .map(|(k, frac)| {
                if frac == 0.0 {
                    self.frames[k].clone()
                } else {
                    Self::slerp_pose(&self.frames[k], &self.frames[k + 1], frac)
                }
            })
            .collect();
        Ok(RotationTrack {
            joints: self.joints,
            frames,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionSequence {
    frames: Vec<MarkerFrame>,
    fps: u32,
    rotations: Option<RotationTrack>,
    hands: Option<RotationTrack>,
}

impl MotionSequence {
    pub fn new(frames: Vec<MarkerFrame>, fps: u32) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::EmptyInput);
        }
        if fps == 0 {
            return Err(Error::InvalidValue("fps must be positive".into()));
        }
        Ok(Self {
            frames,
            fps,
            rotations: None,
            hands: None,
        })
    }

    pub fn with_rotations(mut self, track: RotationTrack) -> Result<Self> {
        self.check_track(&track)?;
        self.rotations = Some(track);
        Ok(self)
    }

    pub fn with_hands(mut self, track: RotationTrack) -> Result<Self> {
        self.check_track(&track)?;
        if track.joints() != HAND_JOINTS {
            return Err(Error::MarkerMismatch(format!(
                "hand channel needs {HAND_JOINTS} joints, got {}",
                track.joints()
            )));
        }
        self.hands = Some(track);
        Ok(self)
    }

    fn check_track(&self, track: &RotationTrack) -> Result<()> {
        if track.len() != self.frames.len() {
            return Err(Error::LengthMismatch {
                left: self.frames.len(),
                right: track.len(),
            });
        }
        Ok(())
    }

    pub fn frames(&self) -> &[MarkerFrame] {
        &self.frames
    }

    pub fn fps(&self) -> u32 {
        self.fps
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn rotations(&self) -> Option<&RotationTrack> {
        self.rotations.as_ref()
    }

    pub fn hands(&self) -> Option<&RotationTrack> {
        self.hands.as_ref()
    }

    pub fn first(&self) -> &MarkerFrame {
        &self.frames[0]
    }

    pub fn last(&self) -> &MarkerFrame {
        &self.frames[self.frames.len() - 1]
    }

    /// Same channels, frames transformed pointwise.
    pub fn map_frames(&self, mut f: impl FnMut(usize, &MarkerFrame) -> MarkerFrame) -> Self {
        Self {
            frames: self
                .frames
                .iter()
                .enumerate()
                .map(|(i, fr)| f(i, fr))
                .collect(),
            fps: self.fps,
            rotations: self.rotations.clone(),
            hands: self.hands.clone(),
        }
    }

    /// Frames `[start, end)` with their channels.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(Error::IndexOutOfRange {
                index: end,
                len: self.len(),
            });
        }
        let cut = |t: &RotationTrack| RotationTrack {
            joints: t.joints,
            frames: t.frames[start..end].to_vec(),
        };
        Ok(Self {
            frames: self.frames[start..end].to_vec(),
            fps: self.fps,
            rotations: self.rotations.as_ref().map(cut),
            hands: self.hands.as_ref().map(cut),
        })
    }

    /// Concatenates sequences. Optional channels survive only when every
    /// part carries them with the same joint count.
    pub fn concat(parts: &[&MotionSequence]) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptyInput)?;
        let mut frames = Vec::new();
        for p in parts {
            if p.fps != first.fps {
                return Err(Error::FpsMismatch(first.fps, p.fps));
            }
            frames.extend(p.frames.iter().cloned());
        }
        let join = |get: fn(&MotionSequence) -> Option<&RotationTrack>| {
            let joints = get(first)?.joints;
            let mut out = Vec::new();
            for p in parts {
                let t = get(p)?;
                if t.joints != joints {
                    return None;
                }
                out.extend(t.frames.iter().cloned());
            }
            Some(RotationTrack {
                joints,
                frames: out,
            })
        };
        Ok(Self {
            frames,
            fps: first.fps,
            rotations: join(|s| s.rotations.as_ref()),
            hands: join(|s| s.hands.as_ref()),
        })
    }

    pub(crate) fn from_parts(
        frames: Vec<MarkerFrame>,
        fps: u32,
        rotations: Option<RotationTrack>,
        hands: Option<RotationTrack>,
    ) -> Self {
        debug_assert!(rotations.as_ref().is_none_or(|t| t.len() == frames.len()));
        debug_assert!(hands.as_ref().is_none_or(|t| t.len() == frames.len()));
        Self {
            frames,
            fps,
            rotations,
            hands,
        }
    }
}

/// Per-frame, per-marker velocities in m/s by forward difference.
///
/// The last frame repeats the previous difference so the output has one
/// entry per input frame.
pub fn velocities(seq: &MotionSequence) -> Result<Vec<Vec<Vec3>>> {
    let n = seq.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let fps = f64::from(seq.fps());
    let frames = seq.frames();
    let mut out: Vec<Vec<Vec3>> = frames
        .windows(2)
        .map(|w| {
            w[0].markers()
                .iter()
                .zip(w[1].markers())
                .map(|(a, b)| (*b - *a) * fps)
                .collect()
        })
        .collect();
    out.push(out[n - 2].clone());
    Ok(out)
}

/// Source position for each output frame: `(floor index, fraction)` with
/// `t = i * (n - 1) / (new_len - 1)`. The last output maps exactly to `n - 1`.
fn resample_indices(n: usize, new_len: usize) -> impl Iterator<Item = (usize, f64)> {
    (0..new_len).map(move |i| {
        if n == 1 {
            return (0, 0.0);
        }
        let num = i * (n - 1);
        let den = new_len - 1;
        let k = num / den;
        let rem = num % den;
        if k >= n - 1 {
            (n - 1, 0.0)
        } else {
            (k, rem as f64 / den as f64)
        }
    })
}

/// Linear per-coordinate resampling to `new_len` frames; endpoints are kept
/// exactly and `new_len == len` is the identity. Rotation channels, when
/// present, are resampled with slerp on the same time map.
pub fn resample(seq: &MotionSequence, new_len: usize) -> Result<MotionSequence> {
    if new_len < 2 {
        return Err(Error::BadLength(new_len));
    }
    let frames = seq.frames();
    let out = resample_indices(frames.len(), new_len)
        .map(|(k, frac)| {
            if frac == 0.0 {
                frames[k].clone()
            } else {
                frames[k].lerp(&frames[k + 1], frac)
            }
        })
        .collect();
    let rotations = seq.rotations().map(|t| t.resample(new_len)).transpose()?;
    let hands = seq.hands().map(|t| t.resample(new_len)).transpose()?;
    Ok(MotionSequence::from_parts(out, seq.fps(), rotations, hands))
}

/// Picks the 67 marker positions out of a mesh's vertex list.
pub fn extract_markers(mesh: &TriMesh, index_map: &[usize; MARKER_COUNT]) -> Result<Vec<Vec3>> {
    let verts = mesh.vertices();
    index_map
        .iter()
        .map(|&i| {
            verts.get(i).copied().ok_or(Error::IndexOutOfRange {
                index: i,
                len: verts.len(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TriMesh;

    fn frame_at(offset: Vec3) -> MarkerFrame {
        let markers = (0..MARKER_COUNT)
            .map(|i| {
                Vec3::new(i as f64 * 0.01, (i % 7) as f64 * 0.02, 0.1 * (i % 5) as f64) + offset
            })
            .collect();
        MarkerFrame::new(markers, offset + Vec3::new(0.0, 0.0, 0.9)).unwrap()
    }

    fn linear_seq(n: usize, step: Vec3) -> MotionSequence {
        MotionSequence::new((0..n).map(|i| frame_at(step * i as f64)).collect(), 40).unwrap()
    }

    #[test]
    fn frame_rejects_wrong_count_and_nan() {
        assert!(MarkerFrame::new(vec![Vec3::ZERO; 66], Vec3::ZERO).is_err());
        let mut m = vec![Vec3::ZERO; MARKER_COUNT];
        m[3].y = f64::NAN;
        assert!(MarkerFrame::new(m, Vec3::ZERO).is_err());
        assert!(MarkerFrame::new(
            vec![Vec3::ZERO; MARKER_COUNT],
            Vec3::new(f64::INFINITY, 0.0, 0.0)
        )
        .is_err());
    }

    #[test]
    fn sequence_requires_frames_and_fps() {
        assert!(MotionSequence::new(vec![], 40).is_err());
        assert!(MotionSequence::new(vec![frame_at(Vec3::ZERO)], 0).is_err());
    }

    #[test]
    fn static_velocities_are_zero() {
        let seq = linear_seq(5, Vec3::ZERO);
        let v = velocities(&seq).unwrap();
        assert_eq!(v.len(), 5);
        assert!(v.iter().flatten().all(|v| *v == Vec3::ZERO));
    }

    #[test]
    fn constant_step_velocity() {
        let seq = linear_seq(6, Vec3::new(0.01, 0.0, 0.0));
        let v = velocities(&seq).unwrap();
        for f in &v {
            for m in f {
                assert!((m.x - 0.4).abs() < 1e-9 && m.y.abs() < 1e-12 && m.z.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn velocity_needs_two_frames() {
        let seq = linear_seq(1, Vec3::ZERO);
        assert!(matches!(velocities(&seq), Err(Error::TooShort { .. })));
    }

    #[test]
    fn velocities_telescope_to_displacement() {
        let frames: Vec<_> = (0..9)
            .map(|i| {
                frame_at(Vec3::new(
                    (i as f64 * 0.7).sin(),
                    (i * i) as f64 * 0.01,
                    0.02 * i as f64,
                ))
            })
            .collect();
        let seq = MotionSequence::new(frames, 30).unwrap();
        let v = velocities(&seq).unwrap();
        for m in 0..MARKER_COUNT {
            let mut sum = Vec3::ZERO;
            for f in &v[..seq.len() - 1] {
                sum += f[m] / 30.0;
            }
            let disp = seq.last().markers()[m] - seq.first().markers()[m];
            assert!((sum - disp).norm() < 1e-6);
        }
    }

    #[test]
    fn resample_identity_and_endpoints() {
        let seq = linear_seq(7, Vec3::new(0.03, -0.01, 0.0));
        assert_eq!(resample(&seq, 7).unwrap(), seq);
        for len in [2, 3, 5, 11, 40] {
            let r = resample(&seq, len).unwrap();
            assert_eq!(r.len(), len);
            assert_eq!(r.first(), seq.first());
            assert_eq!(r.last(), seq.last());
            assert_eq!(r.fps(), seq.fps());
        }
    }

    #[test]
    fn upsample_two_frames_gives_midpoint() {
        let a = frame_at(Vec3::ZERO);
        let b = frame_at(Vec3::new(1.0, 2.0, -0.5));
        let seq = MotionSequence::new(vec![a.clone(), b.clone()], 40).unwrap();
        let r = resample(&seq, 3).unwrap();
        for ((m, x), y) in r.frames()[1]
            .markers()
            .iter()
            .zip(a.markers())
            .zip(b.markers())
        {
            assert!((*m - (*x + *y) * 0.5).norm() < 1e-15);
        }
    }

    #[test]
    fn linear_motion_survives_down_up_resampling() {
        let seq = linear_seq(21, Vec3::new(0.02, 0.01, 0.0));
        let down = resample(&seq, 6).unwrap();
        let up = resample(&down, 21).unwrap();
        for (a, b) in up.frames().iter().zip(seq.frames()) {
            for (p, q) in a.markers().iter().zip(b.markers()) {
                assert!((*p - *q).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn resample_rejects_short_targets() {
        let seq = linear_seq(4, Vec3::ZERO);
        assert!(matches!(resample(&seq, 1), Err(Error::BadLength(1))));
    }

    #[test]
    fn resample_slerps_rotation_channel() {
        let seq = linear_seq(2, Vec3::ZERO);
        let track = RotationTrack::new(
            1,
            vec![vec![Quaternion::IDENTITY], vec![Quaternion::from_yaw(1.0)]],
        )
        .unwrap();
        let seq = seq.with_rotations(track).unwrap();
        let r = resample(&seq, 3).unwrap();
        let mid = r.rotations().unwrap().frames()[1][0];
        assert!(mid.angle_to(&Quaternion::from_yaw(0.5)) < 1e-12);
    }

    #[test]
    fn extract_markers_indexes_vertices() {
        let verts: Vec<Vec3> = (0..100)
            .map(|i| Vec3::new(i as f64, 0.5 * i as f64, 1.0))
            .collect();
        let mesh = TriMesh::new(verts.clone(), vec![[0, 1, 2]]).unwrap();
        let mut map = [0usize; MARKER_COUNT];
        for (k, m) in map.iter_mut().enumerate() {
            *m = (k * 13) % 100;
        }
        let got = extract_markers(&mesh, &map).unwrap();
        for (k, p) in got.iter().enumerate() {
            assert_eq!(*p, verts[map[k]]);
        }
        map[5] = 100;
        assert!(matches!(
            extract_markers(&mesh, &map),
            Err(Error::IndexOutOfRange {
                index: 100,
                len: 100
            })
        ));
    }

    #[test]
    fn extract_identity_map_returns_vertex_list() {
        let verts: Vec<Vec3> = (0..MARKER_COUNT)
            .map(|i| Vec3::new(i as f64, 1.0, 2.0))
            .collect();
        let mesh = TriMesh::new(verts.clone(), vec![[0, 1, 2]]).unwrap();
        let map: [usize; MARKER_COUNT] = std::array::from_fn(|i| i);
        assert_eq!(extract_markers(&mesh, &map).unwrap(), verts);
        let shifted = mesh.translated(Vec3::new(1.0, -2.0, 0.5));
        let moved = extract_markers(&shifted, &map).unwrap();
        for (a, b) in moved.iter().zip(&verts) {
            assert_eq!(*a, *b + Vec3::new(1.0, -2.0, 0.5));
        }
    }
}
