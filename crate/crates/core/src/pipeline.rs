//! End-to-end run: plot, orders, synthetic generation, synchronization, hand
//! splicing, collision revision and metrics, with every intermediate result
//! written to a numbered file in the output directory.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::TriMesh;
use crate::hands::{
    clip_path, fit_clip_length, parse_floats, read_hand_clip, read_index, splice_hands_at,
};
use crate::math::Vec2;
use crate::metrics::{
    character_metrics, format_report, hhp_per_frame, ContactParams, MetricsReport,
};
use crate::motion::format::{read_motion, write_motion};
use crate::motion::{MotionSequence, Quaternion, HAND_JOINTS};
use crate::plot::llm::{extract_orders, generate_plot, revise_orders};
use crate::plot::{
    distribute, load_catalog, parse_commands, sample_route_point, validate_and_revise, Command,
    CommandQueues, LlmClient, RetryPolicy, SceneCatalog,
};
use crate::revision::{marker_hull_mesh, revise, RevisionConfig};
use crate::sdf::read_grid;
use crate::sync::{
    align_segment_lengths, blend_junction, frames_for_orders, pad_with_hover, segment_orders,
    JunctionBlendParams,
};
use crate::synthetic::{GaitParams, Walker};

/// Distance each character keeps from the meeting point of an interaction.
pub const MEETING_OFFSET: f64 = 0.45;
/// Peak hand travel of the interaction gesture, meters.
pub const GESTURE_REACH: f64 = 0.12;
const ROUTE_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Plot,
    Orders,
    Generate,
    Sync,
    Hands,
    Revision,
    Metrics,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Plot => "plot",
            Stage::Orders => "orders",
            Stage::Generate => "generate",
            Stage::Sync => "sync",
            Stage::Hands => "hands",
            Stage::Revision => "revision",
            Stage::Metrics => "metrics",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Stage::Config => 2,
            Stage::Plot => 3,
            Stage::Orders => 4,
            Stage::Generate => 5,
            Stage::Sync => 6,
            Stage::Hands => 7,
            Stage::Revision => 8,
            Stage::Metrics => 9,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("stage {stage}: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError> {
        self.map_err(|source| PipelineError { stage, source })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandSources {
    pub index: PathBuf,
    /// Directory of `<clip_id>.hand` files.
    pub clips: PathBuf,
    /// `text<TAB>embedding` lines, one per interaction description.
    pub queries: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub scene: PathBuf,
    pub navgrid: PathBuf,
    pub grid: PathBuf,
    pub motion_a: PathBuf,
    pub motion_b: PathBuf,
    /// Plot text to use instead of asking the language model.
    pub plot: Option<PathBuf>,
    pub hands: Option<HandSources>,
    pub seed: u64,
    pub fps: u32,
    pub clip_seconds: f64,
    pub buffer_frames: usize,
    pub hand_blend_frames: usize,
    pub revision: RevisionConfig,
    /// Attempts per language-model request.
    pub llm_attempts: usize,
    pub out: PathBuf,
}

const KEYS: [&str; 18] = [
    "scene",
    "navgrid",
    "grid",
    "motion_a",
    "motion_b",
    "plot",
    "hand_index",
    "hand_clips",
    "hand_queries",
    "seed",
    "fps",
    "clip_seconds",
    "buffer_frames",
    "hand_blend_frames",
    "hhp_threshold",
    "max_iterations",
    "out",
    "llm_attempts",
];

impl PipelineConfig {
    /// Parses `key = value` lines; relative paths are taken relative to `base`.
    pub fn parse(text: &str, base: &Path, name: &str) -> Result<Self> {
        let mut kv: HashMap<&str, (usize, &str)> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::format(name, i + 1, "expected key = value"));
            };
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(Error::format(name, i + 1, format!("unknown key `{k}`")));
            }
            if kv.insert(k, (i + 1, v.trim())).is_some() {
                return Err(Error::format(name, i + 1, format!("duplicate key `{k}`")));
            }
        }
        let path = |k: &str| kv.get(k).map(|(_, v)| base.join(v));
        let required =
            |k: &str| path(k).ok_or_else(|| Error::format(name, 0, format!("missing key `{k}`")));
        fn number<T: std::str::FromStr>(
            kv: &HashMap<&str, (usize, &str)>,
            name: &str,
            k: &str,
            default: Option<T>,
        ) -> Result<T> {
            match kv.get(k) {
                Some((line, v)) => v
                    .parse()
                    .map_err(|_| Error::format(name, *line, format!("bad value `{v}` for `{k}`"))),
                None => default.ok_or_else(|| Error::format(name, 0, format!("missing key `{k}`"))),
            }
        }
        let hands = match (path("hand_index"), path("hand_clips"), path("hand_queries")) {
            (Some(index), Some(clips), Some(queries)) => Some(HandSources {
                index,
                clips,
                queries,
            }),
            (None, None, None) => None,
            _ => {
                return Err(Error::format(
                    name,
                    0,
                    "hand_index, hand_clips and hand_queries must be given together",
                ))
            }
        };
        let cfg = Self {
            scene: required("scene")?,
            navgrid: required("navgrid")?,
            grid: required("grid")?,
            motion_a: required("motion_a")?,
            motion_b: required("motion_b")?,
            plot: path("plot"),
            hands,
            seed: number(&kv, name, "seed", None)?,
            fps: number(&kv, name, "fps", Some(40))?,
            clip_seconds: number(&kv, name, "clip_seconds", Some(1.25))?,
            buffer_frames: number(&kv, name, "buffer_frames", Some(4))?,
            hand_blend_frames: number(&kv, name, "hand_blend_frames", Some(4))?,
            revision: RevisionConfig {
                hhp_threshold: number(&kv, name, "hhp_threshold", Some(0.02))?,
                max_iterations: number(&kv, name, "max_iterations", Some(8))?,
            },
            llm_attempts: number(&kv, name, "llm_attempts", Some(3))?,
            out: path("out").unwrap_or_else(|| base.join("out")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, &path.display().to_string())
    }

    /// Checks parameter ranges and that every input path exists.
    pub fn validate(&self) -> Result<()> {
        self.revision.validate()?;
        if self.fps == 0
            || !(self.clip_seconds > 0.0 && self.clip_seconds.is_finite())
            || self.buffer_frames == 0
            || self.llm_attempts == 0
        {
            return Err(Error::BadParams(
                "fps, clip_seconds, buffer_frames and llm_attempts must be positive".into(),
            ));
        }
        let mut inputs = vec![
            &self.scene,
            &self.navgrid,
            &self.grid,
            &self.motion_a,
            &self.motion_b,
        ];
        inputs.extend(&self.plot);
        if let Some(h) = &self.hands {
            inputs.extend([&h.index, &h.clips, &h.queries]);
        }
        for p in inputs {
            if !p.exists() {
                return Err(Error::io(
                    p.as_path(),
                    std::io::Error::new(std::io::ErrorKind::NotFound, "input does not exist"),
                ));
            }
        }
        Ok(())
    }
}

/// Mixes a run seed with a stream tag and an index.
pub fn sub_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_ROUTE: u64 = 1;
const STREAM_HOVER: u64 = 2;
const STREAM_HANDS: u64 = 3;

/// Parses `text<TAB>floats` lines mapping interaction descriptions to query embeddings.
pub fn parse_hand_queries(text: &str, name: &str) -> Result<Vec<(String, Vec<f64>)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (t, v) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(name, i + 1, "expected text<TAB>embedding"))?;
        let v = parse_floats(v).map_err(|m| Error::format(name, i + 1, m))?;
        out.push((t.trim().to_string(), v));
    }
    Ok(out)
}

fn find_query<'a>(queries: &'a [(String, Vec<f64>)], text: &str) -> Option<&'a [f64]> {
    let key = text.trim();
    queries
        .iter()
        .find(|(t, _)| t.eq_ignore_ascii_case(key))
        .map(|(_, v)| v.as_slice())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSummary {
    pub out: PathBuf,
    pub report: MetricsReport,
    pub warnings: usize,
    pub collided_before: usize,
    pub collided_after: usize,
}

struct Artifacts<'a> {
    dir: &'a Path,
}

impl Artifacts<'_> {
    fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let p = self.dir.join(name);
        std::fs::write(&p, contents).map_err(|e| Error::io(p, e))
    }
}

/// One character's generated pieces, in playback order.
#[derive(Default)]
struct Track {
    pieces: Vec<MotionSequence>,
    len: usize,
}

impl Track {
    fn push(&mut self, seq: MotionSequence) {
        self.len += seq.len();
        self.pieces.push(seq);
    }

    fn hover(&mut self, walker: &Walker, pad: usize, seed: u64) -> Result<()> {
        if pad == 0 {
            return Ok(());
        }
        let base = match self.pieces.last() {
            Some(p) => p.slice(p.len() - 1, p.len())?,
            None => walker.idle(1)?,
        };
        let padded = pad_with_hover(&base, pad, seed)?;
        self.push(padded.slice(1, padded.len())?);
        Ok(())
    }

    fn raw(&self) -> Result<MotionSequence> {
        let refs: Vec<&MotionSequence> = self.pieces.iter().collect();
        MotionSequence::concat(&refs)
    }

    fn blended(&self, buffer_frames: usize) -> Result<MotionSequence> {
        let mut it = self.pieces.iter();
        let mut seq = it.next().ok_or(Error::EmptyInput)?.clone();
        for p in it {
            seq = blend_junction(&seq, p, JunctionBlendParams { buffer_frames })?;
        }
        Ok(seq)
    }
}

fn route_target(catalog: &SceneCatalog, cmd: &Command, seed: u64) -> Result<Vec2> {
    let target = match cmd {
        Command::Locomotion(t) => t.as_deref(),
        Command::SceneInteraction { object, .. } => Some(object.as_str()),
        Command::Hhi(_) => {
            return Err(Error::InvalidScript(
                "interaction is not a route command".into(),
            ))
        }
    };
    sample_route_point(catalog, target, seed, ROUTE_ATTEMPTS)
}

/// One line per queued command and per interaction pair.
pub fn format_queues(q: &CommandQueues) -> String {
    let mut out = String::new();
    for (name, c) in [("a", &q.a), ("b", &q.b)] {
        for e in &c.locomotion {
            let _ = writeln!(
                out,
                "{name}.locomotion seq={} target={}",
                e.seq,
                e.item.as_deref().unwrap_or("None")
            );
        }
        for e in &c.interaction {
            let _ = writeln!(
                out,
                "{name}.interaction seq={} object={} motion={}",
                e.seq,
                e.item.0,
                e.item.1.as_str()
            );
        }
    }
    for (i, h) in q.hhi.iter().enumerate() {
        let _ = writeln!(
            out,
            "hhi.{i} seq_a={} seq_b={} a={} b={}",
            h.seq[0], h.seq[1], h.texts[0], h.texts[1]
        );
    }
    out
}

/// Runs every stage and writes the numbered artifacts into `cfg.out`.
/// `client` builds the language-model client once the scene is loaded.
pub fn run_pipeline<F>(
    cfg: &PipelineConfig,
    client: F,
) -> std::result::Result<PipelineSummary, PipelineError>
where
    F: FnOnce(&SceneCatalog) -> Result<Box<dyn LlmClient>>,
{
    use Stage::*;
    cfg.validate().at(Config)?;
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| Error::io(&cfg.out, e))
        .at(Config)?;
    let art = Artifacts { dir: &cfg.out };
    let catalog = load_catalog(&cfg.scene, &cfg.navgrid).at(Config)?;
    let start_a = read_motion(&cfg.motion_a).at(Config)?;
    let start_b = read_motion(&cfg.motion_b).at(Config)?;
    let policy = RetryPolicy {
        attempts: cfg.llm_attempts,
        ..RetryPolicy::default()
    };

    // plot
    let llm = client(&catalog).at(Plot)?;
    let plot = match &cfg.plot {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::io(p, e))
            .at(Plot)?,
        None => generate_plot(llm.as_ref(), &catalog, &policy).at(Plot)?,
    };
    art.write("01_plot.txt", &plot).at(Plot)?;

    // orders
    let raw = extract_orders(llm.as_ref(), &plot, &catalog, &policy).at(Orders)?;
    art.write("02_orders_raw.txt", &raw).at(Orders)?;
    let revised = revise_orders(llm.as_ref(), &raw, &catalog, &policy).at(Orders)?;
    art.write("03_orders_revised.txt", &revised).at(Orders)?;
    let script = parse_commands(&revised).at(Orders)?;
    let revision = validate_and_revise(&script, &catalog);
    art.write("04_script.txt", revision.script.to_text())
        .at(Orders)?;
    let warnings: String = revision.warnings.iter().map(|w| format!("{w}\n")).collect();
    art.write("04_warnings.txt", &warnings).at(Orders)?;
    for w in &revision.warnings {
        log::warn!("{w}");
    }
    let queues = distribute(&revision.script).at(Orders)?;
    art.write("05_queues.txt", format_queues(&queues))
        .at(Orders)?;

    // generation and alignment
    let (cmds_a, cmds_b) = revision.script.commands();
    let segments = segment_orders(&cmds_a, &cmds_b).at(Sync)?;
    let clip = |k: usize| {
        frames_for_orders(k + 1, cfg.clip_seconds, cfg.fps)
            - frames_for_orders(k, cfg.clip_seconds, cfg.fps)
    };
    let gait = GaitParams {
        fps: cfg.fps,
        clip_frames: clip(0),
        ..GaitParams::default()
    };
    let mut walkers = [
        Walker::from_frame(start_a.last(), gait.clone()).at(Generate)?,
        Walker::from_frame(start_b.last(), gait).at(Generate)?,
    ];
    let mut tracks = [Track::default(), Track::default()];
    let mut gestures: Vec<(usize, usize, String)> = Vec::new();
    let mut seg_log = String::new();
    let mut order_no = [0u64; 2];
    for (si, (sa, sb)) in segments.iter().enumerate() {
        let align = align_segment_lengths(sa, sb, cfg.clip_seconds, cfg.fps).at(Sync)?;
        let _ = writeln!(
            seg_log,
            "segment {si} target_frames={} pad_a={} pad_b={} hhi={}",
            align.target_frames,
            align.pad_a,
            align.pad_b,
            sa.hhi().unwrap_or("-")
        );
        for (c, seg) in [sa, sb].into_iter().enumerate() {
            let name = ["a", "b"][c];
            for (k, cmd) in seg.commands[..seg.pre_hhi_count()].iter().enumerate() {
                let seed = sub_seed(cfg.seed, STREAM_ROUTE + 16 * c as u64, order_no[c]);
                order_no[c] += 1;
                let target = route_target(&catalog, cmd, seed).at(Generate)?;
                let _ = writeln!(
                    seg_log,
                    "  {name}.{k} {cmd} -> ({:.6}, {:.6})",
                    target.x, target.y
                );
                walkers[c].set_clip_frames(clip(k)).at(Generate)?;
                let piece = walkers[c].walk_to(target, 0.0).at(Generate)?;
                tracks[c].push(piece);
            }
            let pad = [align.pad_a, align.pad_b][c];
            let seed = sub_seed(cfg.seed, STREAM_HOVER, (2 * si + c) as u64);
            tracks[c].hover(&walkers[c], pad, seed).at(Sync)?;
        }
        if tracks[0].len != tracks[1].len {
            return Err(Error::LengthMismatch {
                left: tracks[0].len,
                right: tracks[1].len,
            })
            .at(Sync);
        }
        if let Some(text) = sa.hhi() {
            let meet = (walkers[0].position() + walkers[1].position()) / 2.0;
            let _ = writeln!(
                seg_log,
                "  hhi meeting point ({:.6}, {:.6})",
                meet.x, meet.y
            );
            let start = tracks[0].len + clip(0);
            for c in 0..2 {
                walkers[c].set_clip_frames(clip(0)).at(Generate)?;
                let approach = walkers[c].walk_to(meet, MEETING_OFFSET).at(Generate)?;
                tracks[c].push(approach);
                let g = walkers[c].gesture(GESTURE_REACH).at(Generate)?;
                tracks[c].push(g);
            }
            gestures.push((start, clip(0), text.to_string()));
        }
    }
    art.write("06_segments.txt", &seg_log).at(Sync)?;
    if tracks[0].pieces.is_empty() && tracks[1].pieces.is_empty() {
        return Err(Error::InvalidScript("the script produces no motion".into())).at(Generate);
    }
    let raw_a = tracks[0].raw().at(Generate)?;
    let raw_b = tracks[1].raw().at(Generate)?;
    art.write("07_generated_a.motion", write_motion(&raw_a))
        .at(Generate)?;
    art.write("07_generated_b.motion", write_motion(&raw_b))
        .at(Generate)?;

    let mut seq_a = tracks[0].blended(cfg.buffer_frames).at(Sync)?;
    let mut seq_b = tracks[1].blended(cfg.buffer_frames).at(Sync)?;
    art.write("08_blended_a.motion", write_motion(&seq_a))
        .at(Sync)?;
    art.write("08_blended_b.motion", write_motion(&seq_b))
        .at(Sync)?;

    // hands
    let mut hand_log = String::new();
    match (&cfg.hands, gestures.is_empty()) {
        (_, true) => hand_log.push_str("no interactions\n"),
        (None, false) => hand_log.push_str("no hand sources configured; hands left untouched\n"),
        (Some(src), false) => {
            let index = read_index(&src.index).at(Hands)?;
            let qtext = std::fs::read_to_string(&src.queries)
                .map_err(|e| Error::io(&src.queries, e))
                .at(Hands)?;
            let queries =
                parse_hand_queries(&qtext, &src.queries.display().to_string()).at(Hands)?;
            let ambient = vec![Quaternion::IDENTITY; HAND_JOINTS];
            for (h, (start, len, text)) in gestures.iter().enumerate() {
                let q = find_query(&queries, text)
                    .ok_or_else(|| {
                        Error::InvalidValue(format!("no query embedding for interaction `{text}`"))
                    })
                    .at(Hands)?;
                let (id, sim) = index.retrieve_scored(q).at(Hands)?;
                let clip = read_hand_clip(clip_path(&src.clips, id)).at(Hands)?;
                let fitted =
                    fit_clip_length(&clip, *len, sub_seed(cfg.seed, STREAM_HANDS, h as u64))
                        .at(Hands)?;
                seq_a = splice_hands_at(&seq_a, &fitted, *start, cfg.hand_blend_frames, &ambient)
                    .at(Hands)?;
                seq_b = splice_hands_at(&seq_b, &fitted, *start, cfg.hand_blend_frames, &ambient)
                    .at(Hands)?;
                let _ = writeln!(
                    hand_log,
                    "hhi.{h} frames={start}..{} clip={id} similarity={sim:.8e} text={text}",
                    start + len
                );
            }
        }
    }
    art.write("09_hands.txt", &hand_log).at(Hands)?;
    art.write("09_hands_a.motion", write_motion(&seq_a))
        .at(Hands)?;
    art.write("09_hands_b.motion", write_motion(&seq_b))
        .at(Hands)?;

    // collision revision
    let (rev_a, rev_b, rev) =
        revise(&seq_a, &seq_b, marker_hull_mesh, &cfg.revision).at(Revision)?;
    art.write("10_revision.txt", rev.to_text()).at(Revision)?;
    art.write("10_revised_a.motion", write_motion(&rev_a))
        .at(Revision)?;
    art.write("10_revised_b.motion", write_motion(&rev_b))
        .at(Revision)?;

    // metrics
    let grid = read_grid(&cfg.grid).at(Metrics)?;
    let cp = ContactParams::default();
    let meshes = |s: &MotionSequence| -> Result<Vec<TriMesh>> {
        s.frames().iter().map(marker_hull_mesh).collect()
    };
    let hhp_frames =
        hhp_per_frame(&meshes(&rev_a).at(Metrics)?, &meshes(&rev_b).at(Metrics)?).at(Metrics)?;
    let report = MetricsReport {
        characters: vec![
            character_metrics(&rev_a, &grid, &cp).at(Metrics)?,
            character_metrics(&rev_b, &grid, &cp).at(Metrics)?,
        ],
        hhp: Some(hhp_frames.iter().sum::<f64>() / hhp_frames.len() as f64),
        hhp_per_frame: hhp_frames,
    };
    art.write("11_metrics.txt", format_report(&report))
        .at(Metrics)?;
    Ok(PipelineSummary {
        out: cfg.out.clone(),
        report,
        warnings: revision.warnings.len(),
        collided_before: rev.collided_before,
        collided_after: rev.collided_after,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_seeds_differ() {
        let s: std::collections::HashSet<u64> = (0..4)
            .flat_map(|st| (0..64).map(move |i| sub_seed(7, st, i)))
            .collect();
        assert_eq!(s.len(), 256);
        assert_eq!(sub_seed(7, 1, 2), sub_seed(7, 1, 2));
    }

    #[test]
    fn config_errors() {
        let dir = Path::new(".");
        assert!(matches!(
            PipelineConfig::parse("scene = x\nbogus = 1\n", dir, "c"),
            Err(Error::Format { line: 2, .. })
        ));
        assert!(PipelineConfig::parse("seed = 1\nseed = 2\n", dir, "c").is_err());
        assert!(PipelineConfig::parse("seed = 1\n", dir, "c").is_err());
        assert!(PipelineConfig::parse("hand_index = i\n", dir, "c").is_err());
    }

    #[test]
    fn hand_queries() {
        let q = parse_hand_queries(
            "# q\nThe two persons shake hands\t1 0 0\nwave\t0 1 0\n",
            "q",
        )
        .unwrap();
        assert_eq!(
            find_query(&q, " the two persons shake hands "),
            Some(&[1.0, 0.0, 0.0][..])
        );
        assert!(find_query(&q, "hug").is_none());
        assert!(parse_hand_queries("no tab here 1 2", "q").is_err());
    }

    #[test]
    fn stage_codes_are_distinct() {
        use Stage::*;
        let codes: std::collections::HashSet<i32> = [
            Config, Plot, Orders, Generate, Sync, Hands, Revision, Metrics,
        ]
        .iter()
        .map(Stage::exit_code)
        .collect();
        assert_eq!(codes.len(), 8);
        assert!(!codes.contains(&0) && !codes.contains(&1));
    }
}
