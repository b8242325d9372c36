//! Physical-compliance metrics and the two regularizer formulas.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{mesh_intersection_count, TriMesh, INSIDE_THRESHOLD};
use crate::motion::layout::MarkerLayout;
use crate::motion::{velocities, MarkerFrame, MotionSequence, MARKER_COUNT};
use crate::sdf::SdfGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct ContactParams {
    pub foot_marker_ids: Vec<usize>,
    pub height_eps: f64,
    pub ground_z: f64,
}

impl Default for ContactParams {
    fn default() -> Self {
        Self {
            foot_marker_ids: MarkerLayout::default().feet.to_vec(),
            height_eps: 0.05,
            ground_z: 0.0,
        }
    }
}

impl ContactParams {
    pub fn validate(&self) -> Result<()> {
        if self.foot_marker_ids.is_empty() {
            return Err(Error::BadParams("foot marker set is empty".into()));
        }
        if let Some(&i) = self.foot_marker_ids.iter().find(|&&i| i >= MARKER_COUNT) {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: MARKER_COUNT,
            });
        }
        if !(self.height_eps > 0.0) || !self.ground_z.is_finite() {
            return Err(Error::BadParams(
                "height_eps must be positive, ground_z finite".into(),
            ));
        }
        Ok(())
    }
}

/// Per-frame mean horizontal speed of in-contact foot markers, and the
/// overall mean over all contact samples.
pub fn foot_skate_per_frame(seq: &MotionSequence, cp: &ContactParams) -> Result<(f64, Vec<f64>)> {
    cp.validate()?;
    let vel = velocities(seq)?;
    let mut total = 0.0;
    let mut samples = 0usize;
    let per_frame = seq
        .frames()
        .iter()
        .zip(&vel)
        .map(|(f, v)| {
            let speeds: Vec<f64> = cp
                .foot_marker_ids
                .iter()
                .filter(|&&m| f.markers()[m].z - cp.ground_z <= cp.height_eps)
                .map(|&m| v[m].xy().norm())
                .collect();
            total += speeds.iter().sum::<f64>();
            samples += speeds.len();
            if speeds.is_empty() {
                0.0
            } else {
                speeds.iter().sum::<f64>() / speeds.len() as f64
            }
        })
        .collect();
    let fs = if samples == 0 {
        0.0
    } else {
        total / samples as f64
    };
    Ok((fs, per_frame))
}

pub fn foot_skate(seq: &MotionSequence, cp: &ContactParams) -> Result<f64> {
    foot_skate_per_frame(seq, cp).map(|(fs, _)| fs)
}

fn penetration_per_frame(seq: &MotionSequence, cp: &ContactParams) -> Vec<f64> {
    seq.frames()
        .iter()
        .map(|f| {
            cp.foot_marker_ids
                .iter()
                .map(|&m| (cp.ground_z - f.markers()[m].z).max(0.0))
                .sum::<f64>()
                / cp.foot_marker_ids.len() as f64
        })
        .collect()
}

pub fn foot_penetration(seq: &MotionSequence, cp: &ContactParams) -> Result<f64> {
    cp.validate()?;
    let per = penetration_per_frame(seq, cp);
    Ok(per.iter().sum::<f64>() / per.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenePenetration {
    /// Sum of `max(0, -sdf)` over markers, averaged over frames.
    pub magnitude: f64,
    /// Markers with a negative sample, averaged over frames.
    pub count: f64,
    pub per_frame: Vec<f64>,
}

pub fn human_scene_penetration(seq: &MotionSequence, grid: &SdfGrid) -> ScenePenetration {
    let rows: Vec<(f64, usize)> = seq
        .frames()
        .iter()
        .map(|f| {
            f.markers().iter().fold((0.0, 0), |(m, c), &p| {
                let v = grid.sample(p);
                (m + (-v).max(0.0), c + usize::from(v < 0.0))
            })
        })
        .collect();
    let n = rows.len() as f64;
    ScenePenetration {
        magnitude: rows.iter().map(|r| r.0).sum::<f64>() / n,
        count: rows.iter().map(|r| r.1 as f64).sum::<f64>() / n,
        per_frame: rows.into_iter().map(|r| r.0).collect(),
    }
}

/// Fraction of all vertices lying inside the other mesh, per frame.
pub fn hhp_per_frame(a: &[TriMesh], b: &[TriMesh]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    a.par_iter()
        .zip(b.par_iter())
        .map(|(ma, mb)| {
            let (ab, ba) = mesh_intersection_count(ma, mb, INSIDE_THRESHOLD)?;
            Ok((ab + ba) as f64 / (ma.vertices().len() + mb.vertices().len()) as f64)
        })
        .collect()
}

pub fn human_human_perturbation(a: &[TriMesh], b: &[TriMesh]) -> Result<f64> {
    let per = hhp_per_frame(a, b)?;
    if per.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(per.iter().sum::<f64>() / per.len() as f64)
}

/// Pairwise L1 marker-distance deviation, with the absolute value taken per pair.
pub fn scene_reg(pred: &MarkerFrame, reference: &MarkerFrame) -> f64 {
    let (p, r) = (pred.markers(), reference.markers());
    let mut sum = 0.0;
    for j in 0..p.len() {
        for k in 0..p.len() {
            sum += ((p[j] - p[k]).norm_l1() - (r[j] - r[k]).norm_l1()).abs();
        }
    }
    sum
}

pub fn human_reg(markers: &MarkerFrame, extracted: &MarkerFrame) -> f64 {
    markers
        .markers()
        .iter()
        .zip(extracted.markers())
        .map(|(a, b)| (*a - *b).norm())
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterMetrics {
    pub fs: f64,
    pub fp: f64,
    pub hsp: f64,
    pub hsp_count: f64,
    pub fs_per_frame: Vec<f64>,
    pub fp_per_frame: Vec<f64>,
    pub hsp_per_frame: Vec<f64>,
}

pub fn character_metrics(
    seq: &MotionSequence,
    grid: &SdfGrid,
    cp: &ContactParams,
) -> Result<CharacterMetrics> {
    let (fs, fs_per_frame) = foot_skate_per_frame(seq, cp)?;
    let fp_per_frame = penetration_per_frame(seq, cp);
    let fp = fp_per_frame.iter().sum::<f64>() / fp_per_frame.len() as f64;
    let hsp = human_scene_penetration(seq, grid);
    Ok(CharacterMetrics {
        fs,
        fp,
        hsp: hsp.magnitude,
        hsp_count: hsp.count,
        fs_per_frame,
        fp_per_frame,
        hsp_per_frame: hsp.per_frame,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub characters: Vec<CharacterMetrics>,
    pub hhp: Option<f64>,
    pub hhp_per_frame: Vec<f64>,
}

impl MetricsReport {
    fn mean(&self, f: impl Fn(&CharacterMetrics) -> f64) -> f64 {
        if self.characters.is_empty() {
            return 0.0;
        }
        self.characters.iter().map(f).sum::<f64>() / self.characters.len() as f64
    }

    pub fn fs(&self) -> f64 {
        self.mean(|c| c.fs)
    }

    pub fn fp(&self) -> f64 {
        self.mean(|c| c.fp)
    }

    pub fn hsp(&self) -> f64 {
        self.mean(|c| c.hsp)
    }

    pub fn hsp_count(&self) -> f64 {
        self.mean(|c| c.hsp_count)
    }
}

fn num(v: f64) -> String {
    format!("{v:.8e}")
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(",")
}

/// `key=value` lines; scalars carry 9 significant digits, per-frame series
/// are comma-separated.
pub fn format_report(r: &MetricsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "fs={}", num(r.fs()));
    let _ = writeln!(out, "fp={}", num(r.fp()));
    let _ = writeln!(out, "hsp={}", num(r.hsp()));
    let _ = writeln!(out, "hsp_count={}", num(r.hsp_count()));
    if let Some(h) = r.hhp {
        let _ = writeln!(out, "hhp={}", num(h));
    }
    for (c, name) in r.characters.iter().zip(["a", "b"]) {
        let _ = writeln!(out, "{name}.fs={}", num(c.fs));
        let _ = writeln!(out, "{name}.fp={}", num(c.fp));
        let _ = writeln!(out, "{name}.hsp={}", num(c.hsp));
        let _ = writeln!(out, "{name}.hsp_count={}", num(c.hsp_count));
        let _ = writeln!(out, "{name}.fs_per_frame={}", list(&c.fs_per_frame));
        let _ = writeln!(out, "{name}.fp_per_frame={}", list(&c.fp_per_frame));
        let _ = writeln!(out, "{name}.hsp_per_frame={}", list(&c.hsp_per_frame));
    }
    if r.hhp.is_some() {
        let _ = writeln!(out, "hhp_per_frame={}", list(&r.hhp_per_frame));
    }
    out
}
