//! Line-oriented text format for motion sequences.
//!
//! ```text
//! # comments and blank lines are ignored
//! motion fps=40 frames=2 markers=67
//! <x y z> * 68            one record per frame: 67 markers, then the pelvis
//! <x y z> * 68
//! rotations joints=J      optional: J quaternions (w x y z) per frame
//! <w x y z> * J
//! <w x y z> * J
//! hands joints=30         optional hand channel, same layout
//! ...
//! ```
//!
//! Numbers are decimal with `.` as radix, separated by spaces or tabs.
//! NaN and infinities are rejected. Header keys may appear in any order.
//! A file with `markers=0` carries no frame records and must contain a
//! `hands` section; it stores a standalone hand clip.

use std::fmt::Write as _;
use std::path::Path;

use super::{MarkerFrame, MotionSequence, Quaternion, RotationTrack, HAND_JOINTS, MARKER_COUNT};
use crate::error::{Error, Result};
use crate::math::Vec3;

struct Lines<'a> {
    name: &'a str,
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, name: &'a str) -> Self {
        Self {
            name,
            inner: text.lines().enumerate().peekable(),
        }
    }

    fn skip_blank(&mut self) {
        while let Some((_, l)) = self.inner.peek() {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                self.inner.next();
            } else {
                break;
            }
        }
    }

    fn next_record(&mut self) -> Option<(usize, &'a str)> {
        self.skip_blank();
        self.inner.next().map(|(i, l)| (i + 1, l.trim()))
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::format(self.name, line, msg)
    }
}

fn parse_header(
    lines: &Lines<'_>,
    line: usize,
    rec: &str,
    tag: &str,
    keys: &[&str],
) -> Result<Vec<u64>> {
    let mut words = rec.split_whitespace();
    if words.next() != Some(tag) {
        return Err(lines.err(line, format!("expected `{tag}` header")));
    }
    let mut values = vec![None; keys.len()];
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| lines.err(line, format!("malformed header field `{w}`")))?;
        let slot = keys
            .iter()
            .position(|key| *key == k)
            .ok_or_else(|| lines.err(line, format!("unknown header key `{k}`")))?;
        let n: u64 = v
            .parse()
            .map_err(|_| lines.err(line, format!("`{k}` must be a non-negative integer")))?;
        values[slot] = Some(n);
    }
    keys.iter()
        .zip(values)
        .map(|(k, v)| v.ok_or_else(|| lines.err(line, format!("missing header key `{k}`"))))
        .collect()
}

fn parse_floats(lines: &Lines<'_>, line: usize, rec: &str, expected: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(expected);
    for tok in rec.split_whitespace() {
        let v: f64 = tok
            .parse()
            .map_err(|_| lines.err(line, format!("invalid number `{tok}`")))?;
        if !v.is_finite() {
            return Err(lines.err(line, format!("non-finite number `{tok}`")));
        }
        out.push(v);
    }
    if out.len() != expected {
        return Err(lines.err(
            line,
            format!("expected {expected} numbers, found {}", out.len()),
        ));
    }
    Ok(out)
}

fn parse_track(lines: &mut Lines<'_>, joints: usize, frames: usize) -> Result<RotationTrack> {
    let mut out = Vec::with_capacity(frames);
    for _ in 0..frames {
        let (line, rec) = lines
            .next_record()
            .ok_or_else(|| lines.err(0, "unexpected end of rotation section"))?;
        let v = parse_floats(lines, line, rec, joints * 4)?;
        let pose = v
            .chunks_exact(4)
            .map(|c| Quaternion::new(c[0], c[1], c[2], c[3]))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| lines.err(line, e.to_string()))?;
        out.push(pose);
    }
    RotationTrack::new(joints, out)
}

/// Everything a motion file can carry.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionRecord {
    pub fps: u32,
    pub frames: usize,
    pub body: Vec<MarkerFrame>,
    pub rotations: Option<RotationTrack>,
    pub hands: Option<RotationTrack>,
}

pub fn parse_record(text: &str, name: &str) -> Result<MotionRecord> {
    let mut lines = Lines::new(text, name);
    let (line, rec) = lines
        .next_record()
        .ok_or_else(|| lines.err(1, "missing header"))?;
    let h = parse_header(&lines, line, rec, "motion", &["fps", "frames", "markers"])?;
    let fps = u32::try_from(h[0]).map_err(|_| lines.err(line, "fps out of range"))?;
    if fps == 0 {
        return Err(lines.err(line, "fps must be positive"));
    }
    let frames = h[1] as usize;
    let markers = h[2] as usize;
    if markers != MARKER_COUNT && markers != 0 {
        return Err(lines.err(
            line,
            format!("markers must be {MARKER_COUNT} (or 0 for a hand clip)"),
        ));
    }
    if frames == 0 {
        return Err(lines.err(line, "frames must be positive"));
    }

    let mut body = Vec::new();
    if markers == MARKER_COUNT {
        body.reserve(frames);
        for _ in 0..frames {
            let (line, rec) = lines
                .next_record()
                .ok_or_else(|| lines.err(0, format!("expected {frames} frame records")))?;
            let v = parse_floats(&lines, line, rec, (MARKER_COUNT + 1) * 3)?;
            let pts: Vec<Vec3> = v
                .chunks_exact(3)
                .map(|c| Vec3::new(c[0], c[1], c[2]))
                .collect();
            let pelvis = pts[MARKER_COUNT];
            let frame = MarkerFrame::new(pts[..MARKER_COUNT].to_vec(), pelvis)
                .map_err(|e| lines.err(line, e.to_string()))?;
            body.push(frame);
        }
    }

    let mut rotations = None;
    let mut hands = None;
    while let Some((line, rec)) = lines.next_record() {
        let tag = rec.split_whitespace().next().unwrap_or("");
        match tag {
            "rotations" | "hands" => {
                let h = parse_header(&lines, line, rec, tag, &["joints"])?;
                let joints = h[0] as usize;
                if joints == 0 {
                    return Err(lines.err(line, "joints must be positive"));
                }
                if tag == "hands" && joints != HAND_JOINTS {
                    return Err(lines.err(line, format!("hand channel needs {HAND_JOINTS} joints")));
                }
                let slot = if tag == "hands" {
                    &mut hands
                } else {
                    &mut rotations
                };
                if slot.is_some() {
                    return Err(lines.err(line, format!("duplicate `{tag}` section")));
                }
                *slot = Some(parse_track(&mut lines, joints, frames)?);
            }
            _ => return Err(lines.err(line, format!("unexpected record `{tag}`"))),
        }
    }
    if markers == 0 && hands.is_none() {
        return Err(lines.err(0, "a markers=0 file must contain a hands section"));
    }
    Ok(MotionRecord {
        fps,
        frames,
        body,
        rotations,
        hands,
    })
}

pub fn parse_motion(text: &str, name: &str) -> Result<MotionSequence> {
    let rec = parse_record(text, name)?;
    if rec.body.is_empty() {
        return Err(Error::format(name, 1, "file holds no marker frames"));
    }
    let mut seq = MotionSequence::new(rec.body, rec.fps)?;
    if let Some(t) = rec.rotations {
        seq = seq.with_rotations(t)?;
    }
    if let Some(t) = rec.hands {
        seq = seq.with_hands(t)?;
    }
    Ok(seq)
}

fn write_track(out: &mut String, tag: &str, track: &RotationTrack) {
    let _ = writeln!(out, "{tag} joints={}", track.joints());
    for pose in track.frames() {
        let line: Vec<String> = pose
            .iter()
            .flat_map(|q| q.components())
            .map(|v| v.to_string())
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

pub fn write_motion(seq: &MotionSequence) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "motion fps={} frames={} markers={MARKER_COUNT}",
        seq.fps(),
        seq.len()
    );
    for f in seq.frames() {
        let line: Vec<String> = f
            .markers()
            .iter()
            .chain(std::iter::once(&f.pelvis()))
            .flat_map(|p| p.to_array())
            .map(|v| v.to_string())
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    if let Some(t) = seq.rotations() {
        write_track(&mut out, "rotations", t);
    }
    if let Some(t) = seq.hands() {
        write_track(&mut out, "hands", t);
    }
    out
}

/// Standalone hand clip: header with `markers=0` and a hands section.
pub fn write_hand_clip(fps: u32, track: &RotationTrack) -> String {
    let mut out = format!("motion fps={fps} frames={} markers=0\n", track.len());
    write_track(&mut out, "hands", track);
    out
}

pub fn read_motion(path: impl AsRef<Path>) -> Result<MotionSequence> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_motion(&text, &path.display().to_string())
}

pub fn write_motion_file(path: impl AsRef<Path>, seq: &MotionSequence) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_motion(seq)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_seq() -> MotionSequence {
        let frames = (0..3)
            .map(|i| {
                let m = (0..MARKER_COUNT)
                    .map(|k| Vec3::new(0.1 * k as f64, -0.25 * i as f64, 1.0 / 3.0))
                    .collect();
                MarkerFrame::new(m, Vec3::new(i as f64, 0.5, 0.95)).unwrap()
            })
            .collect();
        MotionSequence::new(frames, 40).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let seq = sample_seq();
        let hands =
            RotationTrack::constant(vec![Quaternion::from_yaw(0.1); HAND_JOINTS], 3).unwrap();
        let rot = RotationTrack::constant(vec![Quaternion::from_yaw(-0.7); 2], 3).unwrap();
        let seq = seq.with_hands(hands).unwrap().with_rotations(rot).unwrap();
        let text = write_motion(&seq);
        assert_eq!(parse_motion(&text, "t").unwrap(), seq);
    }

    #[test]
    fn rejects_nan_and_bad_counts() {
        let text = write_motion(&sample_seq());
        let bad = text.replacen("0.1 ", "NaN ", 1);
        assert!(matches!(
            parse_motion(&bad, "t"),
            Err(Error::Format { line: 2, .. })
        ));
        let bad = text.replacen("0.1 ", "inf ", 1);
        assert!(parse_motion(&bad, "t").is_err());
        let bad = text.replace("frames=3", "frames=4");
        assert!(parse_motion(&bad, "t").is_err());
        let bad = text.replace("markers=67", "markers=66");
        assert!(parse_motion(&bad, "t").is_err());
    }

    #[test]
    fn comments_and_key_order() {
        let text = write_motion(&sample_seq()).replace(
            "motion fps=40 frames=3 markers=67",
            "# produced by a test\n\nmotion markers=67 frames=3 fps=40",
        );
        assert_eq!(parse_motion(&text, "t").unwrap(), sample_seq());
    }

    #[test]
    fn hand_clip_file() {
        let track = RotationTrack::constant(vec![Quaternion::IDENTITY; HAND_JOINTS], 4).unwrap();
        let text = write_hand_clip(30, &track);
        let rec = parse_record(&text, "clip").unwrap();
        assert_eq!(rec.fps, 30);
        assert!(rec.body.is_empty());
        assert_eq!(rec.hands.unwrap(), track);
        assert!(parse_motion(&text, "clip").is_err());
    }
}
