//! Hand-pose clip retrieval by text-embedding similarity, and splicing of the
//! retrieved clip into a generated sequence.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::motion::format::{parse_record, write_hand_clip};
use crate::motion::{MotionSequence, Quaternion, RotationTrack, HAND_JOINTS};

/// Unit-norm tolerance for stored embeddings.
pub const NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct IndexEntry {
    pub clip_id: u64,
    /// Clip length in frames.
    pub length: usize,
    embedding: Vec<f64>,
}

impl IndexEntry {
    pub fn embedding(&self) -> &[f64] {
        &self.embedding
    }
}

/// Eight independent partial sums so the loop vectorizes; the summation
/// order is fixed, so results are reproducible.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    acc.iter().sum::<f64>() + tail
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingIndex {
    dim: usize,
    entries: Vec<IndexEntry>,
    ids: HashSet<u64>,
}

impl EmbeddingIndex {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadParams(
                "embedding dimension must be positive".into(),
            ));
        }
        Ok(Self {
            dim,
            entries: Vec::new(),
            ids: HashSet::new(),
        })
    }

    /// Adds an entry, normalizing the embedding to unit length.
    pub fn push(&mut self, clip_id: u64, length: usize, embedding: Vec<f64>) -> Result<()> {
        if embedding.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: embedding.len(),
            });
        }
        let n = norm(&embedding);
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidValue(format!(
                "embedding of clip {clip_id} is zero or not finite"
            )));
        }
        if !self.ids.insert(clip_id) {
            return Err(Error::DuplicateClip(clip_id));
        }
        self.entries.push(IndexEntry {
            clip_id,
            length,
            embedding: embedding.into_iter().map(|v| v / n).collect(),
        });
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[IndexEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, clip_id: u64) -> Option<&IndexEntry> {
        self.entries.iter().find(|e| e.clip_id == clip_id)
    }

    /// Best entry by cosine similarity, returned with that similarity. Ties go
    /// to the smallest clip id.
    pub fn retrieve_scored(&self, query: &[f64]) -> Result<(u64, f64)> {
        if self.entries.is_empty() {
            return Err(Error::EmptyIndex);
        }
        if query.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: query.len(),
            });
        }
        let qn = norm(query);
        if !qn.is_finite() || qn == 0.0 {
            return Err(Error::InvalidValue(
                "query embedding is zero or not finite".into(),
            ));
        }
        let better = |a: (u64, f64), b: (u64, f64)| match a.1.total_cmp(&b.1) {
            Ordering::Greater => a,
            Ordering::Less => b,
            Ordering::Equal => {
                if a.0 <= b.0 {
                    a
                } else {
                    b
                }
            }
        };
        let (id, score) = self
            .entries
            .par_iter()
            .map(|e| (e.clip_id, dot(&e.embedding, query)))
            .reduce_with(better)
            .ok_or(Error::EmptyIndex)?;
        Ok((id, score / qn))
    }

    pub fn retrieve(&self, query: &[f64]) -> Result<u64> {
        self.retrieve_scored(query).map(|(id, _)| id)
    }

    /// One `clip_id<TAB>length<TAB>floats` line per entry.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let floats: Vec<String> = e.embedding.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}\t{}\t{}", e.clip_id, e.length, floats.join(" "));
        }
        out
    }
}

pub fn parse_floats(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("bad number `{t}`"))
        })
        .collect()
}

/// Parses an index file. Blank lines and `#` comments are skipped; the
/// dimension is taken from the first record.
pub fn parse_index(text: &str, name: &str) -> Result<EmbeddingIndex> {
    let mut index: Option<EmbeddingIndex> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::format(name, i + 1, msg);
        let mut fields = line.split('\t');
        let (Some(id), Some(len), Some(vec), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(bad("expected clip_id<TAB>length<TAB>embedding".into()));
        };
        let id: u64 = id
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad clip id `{id}`")))?;
        let len: usize = len
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad length `{len}`")))?;
        let vec = parse_floats(vec).map_err(bad)?;
        let idx = match &mut index {
            Some(idx) => idx,
            None => index.insert(EmbeddingIndex::new(vec.len()).map_err(|e| bad(e.to_string()))?),
        };
        idx.push(id, len, vec).map_err(|e| bad(e.to_string()))?;
    }
    index.ok_or(Error::EmptyIndex)
}

pub fn read_index(path: impl AsRef<Path>) -> Result<EmbeddingIndex> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_index(&text, &path.display().to_string())
}

/// Reads a query vector: whitespace-separated floats, possibly over several lines.
pub fn read_query(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let v = parse_floats(&text).map_err(|m| Error::format(path.display().to_string(), 0, m))?;
    if v.is_empty() {
        return Err(Error::format(
            path.display().to_string(),
            0,
            "empty query vector",
        ));
    }
    Ok(v)
}

/// Hand-pose clip: both hands, `HAND_JOINTS` rotations per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct HandClip {
    pub fps: u32,
    track: RotationTrack,
}

impl HandClip {
    pub fn new(fps: u32, track: RotationTrack) -> Result<Self> {
        if track.is_empty() {
            return Err(Error::EmptyInput);
        }
        if track.joints() != HAND_JOINTS {
            return Err(Error::MarkerMismatch(format!(
                "hand clip needs {HAND_JOINTS} joints, got {}",
                track.joints()
            )));
        }
        Ok(Self { fps, track })
    }

    pub fn track(&self) -> &RotationTrack {
        &self.track
    }

    pub fn len(&self) -> usize {
        self.track.len()
    }

    pub fn is_empty(&self) -> bool {
        self.track.is_empty()
    }

    pub fn to_text(&self) -> String {
        write_hand_clip(self.fps, &self.track)
    }
}

pub fn parse_hand_clip(text: &str, name: &str) -> Result<HandClip> {
    let rec = parse_record(text, name)?;
    let track = rec
        .hands
        .ok_or_else(|| Error::format(name, 0, "file has no hands section"))?;
    HandClip::new(rec.fps, track)
}

pub fn read_hand_clip(path: impl AsRef<Path>) -> Result<HandClip> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_hand_clip(&text, &path.display().to_string())
}

/// `<dir>/<clip_id>.hand`
pub fn clip_path(dir: impl AsRef<Path>, clip_id: u64) -> PathBuf {
    dir.as_ref().join(format!("{clip_id}.hand"))
}

/// Longer clips are cut to a uniformly drawn window, shorter ones are
/// slerp-upsampled; the result has exactly `target_len` frames.
pub fn fit_clip_length(clip: &HandClip, target_len: usize, seed: u64) -> Result<HandClip> {
    if target_len < 2 {
        return Err(Error::BadLength(target_len));
    }
    let len = clip.len();
    let track = match len.cmp(&target_len) {
        Ordering::Equal => clip.track.clone(),
        Ordering::Greater => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let start = rng.random_range(0..=len - target_len);
            RotationTrack::new(
                HAND_JOINTS,
                clip.track.frames()[start..start + target_len].to_vec(),
            )?
        }
        Ordering::Less => clip.track.resample(target_len)?,
    };
    HandClip::new(clip.fps, track)
}

fn check_ambient(ambient: &[Quaternion]) -> Result<()> {
    if ambient.len() != HAND_JOINTS {
        return Err(Error::MarkerMismatch(format!(
            "ambient hand pose needs {HAND_JOINTS} joints, got {}",
            ambient.len()
        )));
    }
    Ok(())
}

/// Frame `i` of an `n`-frame splice takes `min(1, (i+1)/(b+1), (n-i)/(b+1))`
/// of the clip and the rest from the ambient pose.
fn splice_weight(i: usize, n: usize, blend_frames: usize) -> f64 {
    let d = (blend_frames + 1) as f64;
    (((i + 1) as f64) / d).min((n - i) as f64 / d).min(1.0)
}

fn blended(
    clip: &[Vec<Quaternion>],
    ambient: &[Quaternion],
    blend_frames: usize,
) -> Vec<Vec<Quaternion>> {
    let n = clip.len();
    clip.iter()
        .enumerate()
        .map(|(i, pose)| {
            let w = splice_weight(i, n, blend_frames);
            if w >= 1.0 {
                pose.clone()
            } else {
                RotationTrack::slerp_pose(ambient, pose, w)
            }
        })
        .collect()
}

/// Attaches `clip` as the hand channel, fading in from and out to `ambient`
/// over `blend_frames` frames at each end.
pub fn splice_hands(
    seq: &MotionSequence,
    clip: &HandClip,
    blend_frames: usize,
    ambient: &[Quaternion],
) -> Result<MotionSequence> {
    check_ambient(ambient)?;
    if clip.len() != seq.len() {
        return Err(Error::LengthMismatch {
            left: seq.len(),
            right: clip.len(),
        });
    }
    let track = RotationTrack::new(
        HAND_JOINTS,
        blended(clip.track.frames(), ambient, blend_frames),
    )?;
    seq.clone().with_hands(track)
}

/// Splices `clip` into frames `start..start + clip.len()` of `seq`. Frames
/// outside the range keep their hand poses, or get `ambient` when the
/// sequence has no hand channel yet.
pub fn splice_hands_at(
    seq: &MotionSequence,
    clip: &HandClip,
    start: usize,
    blend_frames: usize,
    ambient: &[Quaternion],
) -> Result<MotionSequence> {
    check_ambient(ambient)?;
    let end = start + clip.len();
    if end > seq.len() {
        return Err(Error::IndexOutOfRange {
            index: end - 1,
            len: seq.len(),
        });
    }
    let mut frames = match seq.hands() {
        Some(t) => t.frames().to_vec(),
        None => vec![ambient.to_vec(); seq.len()],
    };
    for (k, pose) in blended(clip.track.frames(), ambient, blend_frames)
        .into_iter()
        .enumerate()
    {
        frames[start + k] = pose;
    }
    seq.clone()
        .with_hands(RotationTrack::new(HAND_JOINTS, frames)?)
}
