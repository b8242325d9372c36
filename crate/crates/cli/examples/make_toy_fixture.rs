//! Regenerates the bundled toy scene under `crates/cli/fixtures/toy`.
//!
//! cargo run -p duetkit-cli --example make_toy_fixture [-- <dir>]

use std::f64::consts::PI;
use std::path::PathBuf;

use duetkit::hands::{EmbeddingIndex, HandClip};
use duetkit::math::{Aabb, Vec2, Vec3};
use duetkit::motion::format::write_motion_file;
use duetkit::motion::{Quaternion, RotationTrack, HAND_JOINTS};
use duetkit::plot::scene::encode_navgrid;
use duetkit::plot::NavGrid;
use duetkit::sdf::{write_grid, SdfGrid};
use duetkit::synthetic::standing_sequence;

const OBJECTS: [(&str, [f64; 6]); 3] = [
    ("sofa", [-3.0, 1.5, 0.0, -1.5, 2.5, 0.8]),
    ("table", [0.5, -2.5, 0.0, 1.5, -1.5, 0.75]),
    ("chair", [2.5, 1.5, 0.0, 3.0, 2.0, 0.9]),
];

fn hand_clip(len: usize, amp: f64, freq: f64) -> HandClip {
    let frames = (0..len)
        .map(|t| {
            (0..HAND_JOINTS)
                .map(|j| {
                    let phase = 2.0 * PI * freq * t as f64 / len as f64 + j as f64 * 0.2;
                    Quaternion::from_axis_angle(
                        Vec3::new(1.0, 0.0, 0.0),
                        amp * (0.5 + 0.5 * phase.sin()),
                    )
                    .unwrap()
                })
                .collect()
        })
        .collect();
    HandClip::new(40, RotationTrack::new(HAND_JOINTS, frames).unwrap()).unwrap()
}

fn main() -> duetkit::Result<()> {
    let dir: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy"));
    let io = |p: PathBuf, s: String| {
        std::fs::write(&p, s).map_err(|e| duetkit::Error::Io { path: p, source: e })
    };
    std::fs::create_dir_all(dir.join("clips")).unwrap();

    let mut catalog = String::from("# name minx miny minz maxx maxy maxz\n");
    for (n, b) in OBJECTS {
        catalog.push_str(&format!(
            "{n} {} {} {} {} {} {}\n",
            b[0], b[1], b[2], b[3], b[4], b[5]
        ));
    }
    io(dir.join("scene.txt"), catalog)?;

    // 8 x 6 m room at 0.25 m cells; object footprints are blocked
    let (w, h, res, origin) = (32, 24, 0.25, Vec2::new(-4.0, -3.0));
    let walkable = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| {
            let c = origin + Vec2::new((x as f64 + 0.5) * res, (y as f64 + 0.5) * res);
            !OBJECTS
                .iter()
                .any(|(_, b)| c.x >= b[0] && c.x <= b[3] && c.y >= b[1] && c.y <= b[4])
        })
        .collect();
    let (pbm, meta) = encode_navgrid(&NavGrid::new(w, h, origin, res, walkable)?);
    io(dir.join("navgrid.pbm"), pbm)?;
    io(dir.join("navgrid.pbm.meta"), meta)?;

    let bbox = Aabb::new(Vec3::new(-4.0, -3.0, -0.5), Vec3::new(4.0, 3.0, 2.5));
    write_grid(
        dir.join("grid.sdfg"),
        &SdfGrid::all_free([33, 25, 13], bbox)?,
    )?;

    write_motion_file(
        dir.join("motion_a.motion"),
        &standing_sequence(Vec2::new(-2.5, 0.0), 0.0, 40, 40)?,
    )?;
    write_motion_file(
        dir.join("motion_b.motion"),
        &standing_sequence(Vec2::new(2.5, 0.0), PI, 40, 40)?,
    )?;

    let clips = [
        (11u64, 30, 0.6, 1.0),
        (12, 60, 0.9, 2.0),
        (13, 80, 0.3, 3.0),
        (14, 45, 1.2, 1.5),
    ];
    let mut index = EmbeddingIndex::new(8)?;
    for (k, &(id, len, amp, freq)) in clips.iter().enumerate() {
        let mut e = vec![0.1; 8];
        e[k * 2] = 1.0;
        e[k * 2 + 1] = 0.5;
        index.push(id, len, e)?;
        io(
            dir.join("clips").join(format!("{id}.hand")),
            hand_clip(len, amp, freq).to_text(),
        )?;
    }
    io(dir.join("hand_index.tsv"), index.to_text())?;
    io(
        dir.join("hand_queries.tsv"),
        "# interaction text<TAB>query embedding\n\
         The two persons shake hands\t0.1 0.2 0.9 0.6 0.1 0.0 0.1 0.1\n\
         The two persons wave at each other\t0.9 0.4 0.1 0.1 0.0 0.1 0.1 0.0\n"
            .to_string(),
    )?;
    io(
        dir.join("query.txt"),
        "0.1 0.2 0.9 0.6 0.1 0.0 0.1 0.1\n".to_string(),
    )?;
    io(
        dir.join("pipeline.cfg"),
        "# toy scene, offline run with --mock\n\
         scene = scene.txt\n\
         navgrid = navgrid.pbm\n\
         grid = grid.sdfg\n\
         motion_a = motion_a.motion\n\
         motion_b = motion_b.motion\n\
         hand_index = hand_index.tsv\n\
         hand_clips = clips\n\
         hand_queries = hand_queries.tsv\n\
         seed = 7\n\
         fps = 40\n\
         clip_seconds = 1.25\n\
         buffer_frames = 4\n\
         hhp_threshold = 0.02\n\
         max_iterations = 8\n\
         out = out\n"
            .to_string(),
    )?;
    println!("wrote {}", dir.display());
    Ok(())
}
