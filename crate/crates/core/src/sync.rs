//! Junction smoothing, order segmentation and segment length alignment.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::math::Vec3;
use crate::motion::layout::MarkerLayout;
use crate::motion::{MarkerFrame, MotionSequence, Quaternion, RotationTrack};
use crate::plot::Command;

pub fn slerp(q0: &Quaternion, q1: &Quaternion, t: f64) -> Quaternion {
    q0.slerp(q1, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JunctionBlendParams {
    pub buffer_frames: usize,
}

impl Default for JunctionBlendParams {
    fn default() -> Self {
        Self { buffer_frames: 4 }
    }
}

fn same_channel(name: &str, a: Option<&RotationTrack>, b: Option<&RotationTrack>) -> Result<()> {
    match (a, b) {
        (None, None) => Ok(()),
        (Some(x), Some(y)) if x.joints() == y.joints() => Ok(()),
        _ => Err(Error::MarkerMismatch(format!(
            "{name} channel differs between sequences"
        ))),
    }
}

/// `prev ++ next` with the first `buffer_frames` frames of `next` replaced by
/// a ramp from `prev`'s last frame to `next[buffer_frames]`. Positions are
/// interpolated linearly, rotation channels with slerp. When `next` is too
/// short the buffer shrinks to `next.len() - 1`.
pub fn blend_junction(
    prev: &MotionSequence,
    next: &MotionSequence,
    params: JunctionBlendParams,
) -> Result<MotionSequence> {
    if params.buffer_frames == 0 {
        return Err(Error::BadParams("buffer_frames must be at least 1".into()));
    }
    if prev.fps() != next.fps() {
        return Err(Error::FpsMismatch(prev.fps(), next.fps()));
    }
    same_channel("rotation", prev.rotations(), next.rotations())?;
    same_channel("hand", prev.hands(), next.hands())?;

    let b = params.buffer_frames.min(next.len() - 1);
    let t = |j: usize| (j + 1) as f64 / (b + 1) as f64;
    let anchor = prev.last();
    let frames: Vec<MarkerFrame> = prev
        .frames()
        .iter()
        .cloned()
        .chain(next.frames().iter().enumerate().map(|(j, f)| {
            if j < b {
                anchor.lerp(&next.frames()[b], t(j))
            } else {
                f.clone()
            }
        }))
        .collect();
    let blend_track =
        |p: Option<&RotationTrack>, n: Option<&RotationTrack>| -> Result<Option<RotationTrack>> {
            let (Some(p), Some(n)) = (p, n) else {
                return Ok(None);
            };
            let last = p.frames().last().ok_or(Error::EmptyInput)?;
            let poses = p
                .frames()
                .iter()
                .cloned()
                .chain(n.frames().iter().enumerate().map(|(j, pose)| {
                    if j < b {
                        RotationTrack::slerp_pose(last, &n.frames()[b], t(j))
                    } else {
                        pose.clone()
                    }
                }))
                .collect();
            RotationTrack::new(p.joints(), poses).map(Some)
        };
    let rotations = blend_track(prev.rotations(), next.rotations())?;
    let hands = blend_track(prev.hands(), next.hands())?;
    Ok(MotionSequence::from_parts(
        frames,
        prev.fps(),
        rotations,
        hands,
    ))
}

/// One character's share of a segment: commands up to and including at most
/// one terminal HHI command.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OrderSegment {
    pub commands: Vec<Command>,
}

impl OrderSegment {
    pub fn hhi(&self) -> Option<&str> {
        match self.commands.last() {
            Some(Command::Hhi(t)) => Some(t),
            _ => None,
        }
    }

    pub fn pre_hhi_count(&self) -> usize {
        self.commands.len() - usize::from(self.hhi().is_some())
    }
}

fn split_after_hhi(cmds: &[Command]) -> Vec<OrderSegment> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for c in cmds {
        cur.push(c.clone());
        if c.is_hhi() {
            out.push(OrderSegment {
                commands: std::mem::take(&mut cur),
            });
        }
    }
    out.push(OrderSegment { commands: cur });
    out
}

/// Splits both lists after every HHI command and pairs the pieces. A tail
/// after the last HHI forms a final pair unless it is empty on both sides.
pub fn segment_orders(a: &[Command], b: &[Command]) -> Result<Vec<(OrderSegment, OrderSegment)>> {
    let ha = a.iter().filter(|c| c.is_hhi()).count();
    let hb = b.iter().filter(|c| c.is_hhi()).count();
    if ha != hb {
        return Err(Error::HhiCountMismatch { a: ha, b: hb });
    }
    let mut pairs: Vec<_> = split_after_hhi(a)
        .into_iter()
        .zip(split_after_hhi(b))
        .collect();
    if pairs.len() > 1
        && pairs
            .last()
            .is_some_and(|(x, y)| x.commands.is_empty() && y.commands.is_empty())
    {
        pairs.pop();
    }
    Ok(pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alignment {
    pub target_frames: usize,
    pub pad_a: usize,
    pub pad_b: usize,
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

pub fn frames_for_orders(count: usize, clip_seconds: f64, fps: u32) -> usize {
    round_half_up(count as f64 * clip_seconds * f64::from(fps))
}

pub fn align_counts(
    count_a: usize,
    count_b: usize,
    clip_seconds: f64,
    fps: u32,
) -> Result<Alignment> {
    if !(clip_seconds > 0.0 && clip_seconds.is_finite()) || fps == 0 {
        return Err(Error::BadParams(format!(
            "clip_seconds must be positive and fps non-zero, got {clip_seconds} s at {fps} fps"
        )));
    }
    let target = frames_for_orders(count_a.max(count_b), clip_seconds, fps);
    Ok(Alignment {
        target_frames: target,
        pad_a: target - frames_for_orders(count_a, clip_seconds, fps),
        pad_b: target - frames_for_orders(count_b, clip_seconds, fps),
    })
}

pub fn align_segment_lengths(
    a: &OrderSegment,
    b: &OrderSegment,
    clip_seconds: f64,
    fps: u32,
) -> Result<Alignment> {
    align_counts(a.pre_hhi_count(), b.pre_hhi_count(), clip_seconds, fps)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoverParams {
    /// Standard deviation of per-coordinate noise, meters.
    pub sigma: f64,
    /// Noise is clamped to `truncate * sigma`.
    pub truncate: f64,
    /// Markers held exactly in place.
    pub pinned: Vec<usize>,
}

impl Default for HoverParams {
    fn default() -> Self {
        Self {
            sigma: 0.002,
            truncate: 3.0,
            pinned: MarkerLayout::default().feet.to_vec(),
        }
    }
}

pub fn pad_with_hover(seq: &MotionSequence, pad: usize, seed: u64) -> Result<MotionSequence> {
    pad_with_hover_with(seq, pad, seed, &HoverParams::default())
}

/// Appends `pad` copies of the last frame with seeded, truncated Gaussian
/// jitter on every marker except the pinned ones. Rotation channels repeat
/// their last pose.
pub fn pad_with_hover_with(
    seq: &MotionSequence,
    pad: usize,
    seed: u64,
    hp: &HoverParams,
) -> Result<MotionSequence> {
    if pad == 0 {
        return Ok(seq.clone());
    }
    if !(hp.sigma >= 0.0 && hp.truncate >= 0.0) {
        return Err(Error::BadParams(
            "hover sigma and truncation must be non-negative".into(),
        ));
    }
    let normal = Normal::new(0.0, hp.sigma).map_err(|e| Error::BadParams(e.to_string()))?;
    let limit = hp.sigma * hp.truncate;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jitter = || {
        let mut d = || normal.sample(&mut rng).clamp(-limit, limit);
        Vec3::new(d(), d(), d())
    };
    let last = seq.last().clone();
    let mut frames = seq.frames().to_vec();
    for _ in 0..pad {
        let mut f = last.clone();
        for (i, m) in f.markers_mut().iter_mut().enumerate() {
            if !hp.pinned.contains(&i) {
                *m += jitter();
            }
        }
        let pelvis = f.pelvis() + jitter();
        f.set_pelvis(pelvis);
        frames.push(f);
    }
    let extend = |t: Option<&RotationTrack>| -> Result<Option<RotationTrack>> {
        t.map(|t| {
            let mut poses = t.frames().to_vec();
            let tail = poses.last().cloned().ok_or(Error::EmptyInput)?;
            poses.extend(std::iter::repeat_n(tail, pad));
            RotationTrack::new(t.joints(), poses)
        })
        .transpose()
    };
    Ok(MotionSequence::from_parts(
        frames,
        seq.fps(),
        extend(seq.rotations())?,
        extend(seq.hands())?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::layout::rest_pose;
    use std::f64::consts::FRAC_PI_2;

    fn at(x: f64) -> MarkerFrame {
        let m = rest_pose()
            .into_iter()
            .map(|p| p + Vec3::new(x, 0.0, 0.0))
            .collect();
        MarkerFrame::new(m, Vec3::new(x, 0.0, 0.95)).unwrap()
    }

    fn seq(xs: &[f64]) -> MotionSequence {
        MotionSequence::new(xs.iter().map(|&x| at(x)).collect(), 40).unwrap()
    }

    fn loco(o: Option<&str>) -> Command {
        Command::Locomotion(o.map(str::to_string))
    }

    #[test]
    fn slerp_quarter_turn_midpoint() {
        let q = slerp(&Quaternion::IDENTITY, &Quaternion::from_yaw(FRAC_PI_2), 0.5);
        assert!(q.angle_to(&Quaternion::from_yaw(FRAC_PI_2 / 2.0)) < 1e-9);
    }

    #[test]
    fn linear_ramp_over_buffer() {
        let out = blend_junction(
            &seq(&[-1.0, 0.0]),
            &seq(&[9.0, 9.0, 9.0, 9.0, 1.0, 2.0]),
            JunctionBlendParams::default(),
        )
        .unwrap();
        let xs: Vec<f64> = out.frames().iter().map(|f| f.pelvis().x).collect();
        let expect = [-1.0, 0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 2.0];
        for (x, e) in xs.iter().zip(expect) {
            assert!((x - e).abs() < 1e-12, "{xs:?}");
        }
    }

    #[test]
    fn continuous_junction_is_plain_concat() {
        let prev = seq(&[0.0, 0.5]);
        let next = seq(&[0.5; 6]);
        let out = blend_junction(&prev, &next, JunctionBlendParams::default()).unwrap();
        assert_eq!(out, MotionSequence::concat(&[&prev, &next]).unwrap());
    }

    #[test]
    fn blend_rejects_mismatches() {
        let other = MotionSequence::new(vec![at(0.0)], 30).unwrap();
        assert!(matches!(
            blend_junction(&seq(&[0.0]), &other, JunctionBlendParams::default()),
            Err(Error::FpsMismatch(40, 30))
        ));
        let hands = RotationTrack::constant(vec![Quaternion::IDENTITY; 30], 1).unwrap();
        let with_hands = seq(&[0.0]).with_hands(hands).unwrap();
        assert!(matches!(
            blend_junction(&seq(&[0.0]), &with_hands, JunctionBlendParams::default()),
            Err(Error::MarkerMismatch(_))
        ));
    }

    #[test]
    fn segments_without_hhi() {
        let a = vec![loco(None), loco(Some("sofa"))];
        let segs = segment_orders(&a, &[]).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].0.commands, a);
        assert_eq!(segs[0].0.pre_hhi_count(), 2);
    }

    #[test]
    fn hhi_only_segments() {
        let a = vec![Command::Hhi("wave".into()), Command::Hhi("hug".into())];
        let segs = segment_orders(&a, &a).unwrap();
        assert_eq!(segs.len(), 2);
        assert!(segs.iter().all(|(x, _)| x.pre_hhi_count() == 0));
        assert!(matches!(
            segment_orders(&a, &a[..1]),
            Err(Error::HhiCountMismatch { a: 2, b: 1 })
        ));
    }

    #[test]
    fn alignment_arithmetic() {
        let al = align_counts(2, 4, 1.25, 40).unwrap();
        assert_eq!(
            al,
            Alignment {
                target_frames: 200,
                pad_a: 100,
                pad_b: 0
            }
        );
        assert_eq!(align_counts(3, 3, 1.25, 40).unwrap().pad_a, 0);
        assert_eq!(
            align_counts(0, 3, 1.25, 40).unwrap(),
            Alignment {
                target_frames: 150,
                pad_a: 150,
                pad_b: 0
            }
        );
        assert!(align_counts(1, 1, 0.0, 40).is_err());
        // 1 * 0.3125 * 40 = 12.5 rounds up
        assert_eq!(align_counts(1, 0, 0.3125, 40).unwrap().target_frames, 13);
    }

    #[test]
    fn hover_padding() {
        let s = seq(&[0.0, 0.1]);
        assert_eq!(pad_with_hover(&s, 0, 1).unwrap(), s);
        let p = pad_with_hover(&s, 100, 7).unwrap();
        assert_eq!(p.len(), 102);
        let end = s.last();
        let last = p.last();
        assert!((last.pelvis() - end.pelvis()).xy().norm() <= 0.01);
        for &m in &MarkerLayout::default().feet {
            assert_eq!(last.markers()[m], end.markers()[m]);
        }
        assert_ne!(last.markers()[30], end.markers()[30]);
        assert_eq!(p, pad_with_hover(&s, 100, 7).unwrap());
    }
}
