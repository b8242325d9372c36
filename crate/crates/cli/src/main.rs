use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use duetkit::geometry::{convex_hull_2d, read_mesh_dir};
use duetkit::hands::{clip_path, fit_clip_length, read_hand_clip, read_index, read_query};
use duetkit::math::{Vec2, Vec3};
use duetkit::metrics::{
    character_metrics, format_report, hhp_per_frame, ContactParams, MetricsReport,
};
use duetkit::motion::format::{read_motion, write_motion_file};
use duetkit::motion::MotionSequence;
use duetkit::pipeline::{format_queues, run_pipeline, PipelineConfig};
use duetkit::plot::llm::{extract_orders, generate_plot, revise_orders};
use duetkit::plot::{
    distribute, load_catalog, parse_commands, validate_and_revise, HttpClient, LlmClient,
    MockClient, RetryPolicy, SceneCatalog,
};
use duetkit::revision::{marker_hull_mesh, revise, RevisionConfig};
use duetkit::sdf::{read_grid, synthesize_plane_based, write_grid, SceneSynthParams};
use duetkit::sync::{align_segment_lengths, blend_junction, segment_orders, JunctionBlendParams};

#[derive(Parser)]
#[command(name = "duetkit", version, about = "Two-character motion toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize an obstacle grid around a motion's walkable region.
    SceneSynth(SceneSynthArgs),
    /// Physical-compliance metrics for one or two characters.
    Metrics(MetricsArgs),
    #[command(subcommand)]
    Sync(SyncCmd),
    /// Retime two characters to remove collisions.
    Revise(ReviseArgs),
    /// Retrieve and length-fit the hand clip closest to a query embedding.
    RetrieveHands(RetrieveArgs),
    #[command(subcommand)]
    Plot(PlotCmd),
    /// Run every stage end to end.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct SceneSynthArgs {
    #[arg(long)]
    motion: PathBuf,
    /// Edge length of the cubic box, meters.
    #[arg(long, default_value_t = 3.0)]
    size: f64,
    #[arg(long, default_value_t = 128)]
    dims: usize,
    #[arg(long, default_value_t = 10)]
    k_max: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    motion_a: PathBuf,
    #[arg(long)]
    motion_b: Option<PathBuf>,
    /// Directory of per-frame OBJ meshes for character A.
    #[arg(long, requires = "mesh_b")]
    mesh_a: Option<PathBuf>,
    #[arg(long, requires = "mesh_a")]
    mesh_b: Option<PathBuf>,
    #[arg(long)]
    grid: PathBuf,
    /// Report file; printed to stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SyncCmd {
    /// Join two clips with a linear junction ramp.
    Blend {
        #[arg(long)]
        prev: PathBuf,
        #[arg(long)]
        next: PathBuf,
        #[arg(long, default_value_t = 4)]
        buffer: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-segment target lengths and hover padding for two order lists.
    Align {
        #[arg(long)]
        orders_a: PathBuf,
        #[arg(long)]
        orders_b: PathBuf,
        #[arg(long, default_value_t = 1.25)]
        clip_seconds: f64,
        #[arg(long, default_value_t = 40)]
        fps: u32,
    },
}

#[derive(Args)]
struct ReviseArgs {
    #[arg(long)]
    motion_a: PathBuf,
    #[arg(long)]
    motion_b: PathBuf,
    #[arg(long, default_value_t = 0.02)]
    threshold: f64,
    #[arg(long, default_value_t = 8)]
    max_iter: usize,
    #[arg(long)]
    out_a: PathBuf,
    #[arg(long)]
    out_b: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RetrieveArgs {
    #[arg(long)]
    index: PathBuf,
    /// Whitespace-separated query embedding.
    #[arg(long)]
    query_vec: PathBuf,
    /// Directory of `<clip_id>.hand` files; defaults to the index's directory.
    #[arg(long)]
    clips: Option<PathBuf>,
    #[arg(long)]
    target_len: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SceneArgs {
    /// Object catalog (`name minx miny minz maxx maxy maxz` per line).
    #[arg(long)]
    scene: PathBuf,
    /// Walkable-area bitmap; its `.meta` sidecar must sit next to it.
    #[arg(long)]
    navgrid: PathBuf,
    /// Use the offline deterministic client instead of LLM_ENDPOINT.
    #[arg(long)]
    mock: bool,
}

#[derive(Subcommand)]
enum PlotCmd {
    /// Ask for a plot set in the scene.
    Generate {
        #[command(flatten)]
        scene: SceneArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn plot text into order lists.
    Extract {
        #[command(flatten)]
        scene: SceneArgs,
        #[arg(long)]
        plot: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Revise order lists with the model, then apply rule-based repairs.
    Revise {
        #[command(flatten)]
        scene: SceneArgs,
        #[arg(long)]
        orders: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a valid script into per-module queues.
    Distribute {
        #[arg(long)]
        orders: PathBuf,
    },
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    mock: bool,
}

fn read_text(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn client(mock: bool, catalog: &SceneCatalog) -> duetkit::Result<Box<dyn LlmClient>> {
    if mock {
        Ok(Box::new(MockClient::new(catalog)))
    } else {
        Ok(Box::new(HttpClient::from_env()?))
    }
}

fn scene_synth(a: SceneSynthArgs) -> Result<()> {
    let seq = read_motion(&a.motion)?;
    let pts: Vec<Vec2> = seq
        .frames()
        .iter()
        .flat_map(|f| f.markers().iter().map(|m| m.xy()))
        .collect();
    let hull = convex_hull_2d(&pts)?;
    let body_top = seq
        .frames()
        .iter()
        .flat_map(|f| f.markers().iter().map(|m| m.z))
        .fold(f64::NEG_INFINITY, f64::max);
    let first = seq.first().pelvis();
    let params = SceneSynthParams {
        box_size: Vec3::new(a.size, a.size, a.size),
        dims: [a.dims; 3],
        k_range: (0, a.k_max),
        center: Vec3::new(first.x, first.y, a.size / 2.0),
        seed: a.seed,
        ..SceneSynthParams::default()
    }
    .with_body_top(body_top);
    let syn = synthesize_plane_based(&hull, &params)?;
    write_grid(&a.out, &syn.grid)?;
    println!("ceiling={}", syn.t_ceiling);
    println!("patterns={}", syn.patterns.len());
    println!("free_nodes={}", syn.grid.free_count());
    Ok(())
}

fn metrics(a: MetricsArgs) -> Result<()> {
    let grid = read_grid(&a.grid)?;
    let cp = ContactParams::default();
    let seq_a = read_motion(&a.motion_a)?;
    let seq_b = a.motion_b.as_deref().map(read_motion).transpose()?;
    let mut characters = vec![character_metrics(&seq_a, &grid, &cp)?];
    if let Some(b) = &seq_b {
        characters.push(character_metrics(b, &grid, &cp)?);
    }
    let hhp_frames = match (&a.mesh_a, &a.mesh_b, &seq_b) {
        (Some(ma), Some(mb), _) => Some(hhp_per_frame(&read_mesh_dir(ma)?, &read_mesh_dir(mb)?)?),
        (_, _, Some(b)) => {
            let hulls = |s: &MotionSequence| {
                s.frames()
                    .iter()
                    .map(marker_hull_mesh)
                    .collect::<duetkit::Result<Vec<_>>>()
            };
            Some(hhp_per_frame(&hulls(&seq_a)?, &hulls(b)?)?)
        }
        _ => None,
    };
    let report = MetricsReport {
        characters,
        hhp: hhp_frames
            .as_ref()
            .map(|v| v.iter().sum::<f64>() / v.len() as f64),
        hhp_per_frame: hhp_frames.unwrap_or_default(),
    };
    emit(a.report.as_deref(), &format_report(&report))
}

/// Accepts either an `Orders X: [...]` line or a bare bracketed list.
fn read_order_list(p: &Path) -> Result<Vec<duetkit::plot::Command>> {
    let text = read_text(p)?;
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .with_context(|| format!("{} is empty", p.display()))?;
    let line = if line.starts_with('[') {
        format!("Orders A: {line}")
    } else {
        line.to_string()
    };
    let (_, orders) = duetkit::plot::parse_orders_line(&line, 1)
        .with_context(|| format!("parsing {}", p.display()))?;
    let cmds: Vec<_> = orders.iter().filter_map(|o| o.command().cloned()).collect();
    if cmds.len() != orders.len() {
        bail!(
            "{} contains invalid orders; run `plot revise` first",
            p.display()
        );
    }
    Ok(cmds)
}

fn sync(cmd: SyncCmd) -> Result<()> {
    match cmd {
        SyncCmd::Blend {
            prev,
            next,
            buffer,
            out,
        } => {
            let joined = blend_junction(
                &read_motion(&prev)?,
                &read_motion(&next)?,
                JunctionBlendParams {
                    buffer_frames: buffer,
                },
            )?;
            write_motion_file(&out, &joined)?;
        }
        SyncCmd::Align {
            orders_a,
            orders_b,
            clip_seconds,
            fps,
        } => {
            let a = read_order_list(&orders_a)?;
            let b = read_order_list(&orders_b)?;
            for (i, (sa, sb)) in segment_orders(&a, &b)?.iter().enumerate() {
                let al = align_segment_lengths(sa, sb, clip_seconds, fps)?;
                println!(
                    "segment={i} orders_a={} orders_b={} target_frames={} pad_a={} pad_b={}",
                    sa.pre_hhi_count(),
                    sb.pre_hhi_count(),
                    al.target_frames,
                    al.pad_a,
                    al.pad_b
                );
            }
        }
    }
    Ok(())
}

fn revise_cmd(a: ReviseArgs) -> Result<()> {
    let cfg = RevisionConfig {
        hhp_threshold: a.threshold,
        max_iterations: a.max_iter,
    };
    let (ra, rb, report) = revise(
        &read_motion(&a.motion_a)?,
        &read_motion(&a.motion_b)?,
        marker_hull_mesh,
        &cfg,
    )?;
    write_motion_file(&a.out_a, &ra)?;
    write_motion_file(&a.out_b, &rb)?;
    emit(a.report.as_deref(), &report.to_text())
}

fn retrieve(a: RetrieveArgs) -> Result<()> {
    let index = read_index(&a.index)?;
    let query = read_query(&a.query_vec)?;
    let (id, sim) = index.retrieve_scored(&query)?;
    let dir = match a.clips {
        Some(d) => d,
        None => a.index.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let clip = read_hand_clip(clip_path(&dir, id))?;
    let fitted = fit_clip_length(&clip, a.target_len, a.seed)?;
    std::fs::write(&a.out, fitted.to_text())
        .with_context(|| format!("writing {}", a.out.display()))?;
    println!("clip={id} similarity={sim:.8e} frames={}", fitted.len());
    Ok(())
}

fn plot(cmd: PlotCmd) -> Result<()> {
    let policy = RetryPolicy::default();
    let scene = |s: &SceneArgs| -> Result<(SceneCatalog, Box<dyn LlmClient>)> {
        let cat = load_catalog(&s.scene, &s.navgrid)?;
        let c = client(s.mock, &cat)?;
        Ok((cat, c))
    };
    match cmd {
        PlotCmd::Generate { scene: s, out } => {
            let (cat, c) = scene(&s)?;
            emit(out.as_deref(), &generate_plot(c.as_ref(), &cat, &policy)?)
        }
        PlotCmd::Extract {
            scene: s,
            plot,
            out,
        } => {
            let (cat, c) = scene(&s)?;
            emit(
                out.as_deref(),
                &extract_orders(c.as_ref(), &read_text(&plot)?, &cat, &policy)?,
            )
        }
        PlotCmd::Revise {
            scene: s,
            orders,
            out,
        } => {
            let (cat, c) = scene(&s)?;
            let revised = revise_orders(c.as_ref(), &read_text(&orders)?, &cat, &policy)?;
            let r = validate_and_revise(&parse_commands(&revised)?, &cat);
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            emit(out.as_deref(), &r.script.to_text())
        }
        PlotCmd::Distribute { orders } => {
            let q = distribute(&parse_commands(&read_text(&orders)?)?)?;
            print!("{}", format_queues(&q));
            Ok(())
        }
    }
}

fn pipeline(a: PipelineArgs) -> ExitCode {
    let cfg = PipelineConfig::load(&a.config).map(|mut c| {
        if let Some(s) = a.seed {
            c.seed = s;
        }
        if let Some(o) = a.out {
            c.out = o;
        }
        c
    });
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: stage config: {e}");
            return ExitCode::from(duetkit::pipeline::Stage::Config.exit_code() as u8);
        }
    };
    match run_pipeline(&cfg, |cat| client(a.mock, cat)) {
        Ok(s) => {
            println!("artifacts={}", s.out.display());
            println!("warnings={}", s.warnings);
            println!(
                "collided_frames={} -> {}",
                s.collided_before, s.collided_after
            );
            print!(
                "{}",
                format_report(&s.report)
                    .lines()
                    .take(5)
                    .map(|l| format!("{l}\n"))
                    .collect::<String>()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.stage.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Pipeline(a) => return pipeline(a),
        Cmd::SceneSynth(a) => scene_synth(a),
        Cmd::Metrics(a) => metrics(a),
        Cmd::Sync(c) => sync(c),
        Cmd::Revise(a) => revise_cmd(a),
        Cmd::RetrieveHands(a) => retrieve(a),
        Cmd::Plot(c) => plot(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
