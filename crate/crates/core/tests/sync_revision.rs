use duetkit::math::{Vec2, Vec3};
use duetkit::motion::{MarkerFrame, MotionSequence};
use duetkit::plot::{Command, MotionType};
use duetkit::revision::{
    marker_hull_mesh, retime_around, revise, CollisionInterval, RevisionConfig, Role,
};
use duetkit::sync::{
    align_counts, blend_junction, frames_for_orders, segment_orders, JunctionBlendParams,
};
use duetkit::synthetic::{GaitParams, Walker};
use proptest::prelude::*;

fn glide(from: Vec2, to: Vec2, len: usize) -> MotionSequence {
    let d = to - from;
    let pose = Walker::new(from, d.y.atan2(d.x), GaitParams::default())
        .unwrap()
        .pose();
    let frames: Vec<MarkerFrame> = (0..len)
        .map(|i| {
            let off = d * (i as f64 / (len - 1) as f64);
            pose.translated(Vec3::new(off.x, off.y, 0.0))
        })
        .collect();
    MotionSequence::new(frames, 40).unwrap()
}

fn command() -> impl Strategy<Value = Command> {
    prop_oneof![
        Just(Command::Locomotion(None)),
        "[a-z]{1,6}".prop_map(|o| Command::Locomotion(Some(o))),
        "[a-z]{1,6}".prop_map(|o| Command::SceneInteraction {
            object: o,
            motion: MotionType::Sit
        }),
    ]
}

/// Two command lists with the same number of HHI commands.
fn paired_lists() -> impl Strategy<Value = (Vec<Command>, Vec<Command>)> {
    (0usize..4).prop_flat_map(|h| {
        let side = move || {
            prop::collection::vec(prop::collection::vec(command(), 0..4), h + 1).prop_map(
                |groups| {
                    let mut out = Vec::new();
                    let n = groups.len();
                    for (i, g) in groups.into_iter().enumerate() {
                        out.extend(g);
                        if i + 1 < n {
                            out.push(Command::Hhi(format!("interaction {i}")));
                        }
                    }
                    out
                },
            )
        };
        (side(), side())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn blend_keeps_count_and_outer_frames(
        n_prev in 2usize..30, n_next in 2usize..30, buffer in 1usize..8,
        jump in -2.0..2.0f64,
    ) {
        let prev = glide(Vec2::ZERO, Vec2::new(1.0, 0.0), n_prev);
        let next = glide(Vec2::new(1.0 + jump, 0.5), Vec2::new(3.0, 1.0), n_next);
        let out = blend_junction(&prev, &next, JunctionBlendParams { buffer_frames: buffer }).unwrap();
        prop_assert_eq!(out.len(), n_prev + n_next);
        prop_assert_eq!(&out.frames()[..n_prev], prev.frames());
        let b = buffer.min(n_next - 1);
        prop_assert_eq!(&out.frames()[n_prev + b..], &next.frames()[b..]);
    }

    #[test]
    fn alignment_pads_one_side(a in 0usize..12, b in 0usize..12, clip in 0.25..3.0f64, fps in 10u32..120) {
        let al = align_counts(a, b, clip, fps).unwrap();
        prop_assert_eq!(al.pad_a * al.pad_b, 0);
        prop_assert!(al.target_frames >= frames_for_orders(a, clip, fps));
        prop_assert!(al.target_frames >= frames_for_orders(b, clip, fps));
        prop_assert_eq!(al.target_frames - al.pad_a, frames_for_orders(a, clip, fps));
    }

    #[test]
    fn segments_partition_the_lists((a, b) in paired_lists()) {
        let segs = segment_orders(&a, &b).unwrap();
        let ja: Vec<Command> = segs.iter().flat_map(|(x, _)| x.commands.clone()).collect();
        let jb: Vec<Command> = segs.iter().flat_map(|(_, y)| y.commands.clone()).collect();
        prop_assert_eq!(ja, a);
        prop_assert_eq!(jb, b);
        for (x, y) in &segs {
            prop_assert_eq!(x.hhi().is_some(), y.hhi().is_some());
        }
    }

    #[test]
    fn retiming_preserves_length_and_ends(len in 20usize..120, s in 0usize..120, w in 0usize..40) {
        let seq = glide(Vec2::ZERO, Vec2::new(4.0, 0.0), len);
        let iv = CollisionInterval { start: s.min(len - 1), end: (s + w).min(len - 1) };
        for role in [Role::Lead, Role::Yield] {
            if let Ok(r) = retime_around(&seq, iv, role) {
                prop_assert_eq!(r.len(), len);
                prop_assert_eq!(r.first(), seq.first());
                prop_assert_eq!(r.last(), seq.last());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn revision_preserves_length_and_endpoints(
        angle in 0.3..2.8f64, offset in -0.6..0.6f64, len in 60usize..100,
    ) {
        let a = glide(Vec2::new(-2.5, 0.0), Vec2::new(2.5, 0.0), len);
        let dir = Vec2::new(angle.cos(), angle.sin());
        let b = glide(dir * -2.5 + Vec2::new(offset, 0.0), dir * 2.5 + Vec2::new(offset, 0.0), len);
        let cfg = RevisionConfig::default();
        let (ra, rb, rep) = revise(&a, &b, marker_hull_mesh, &cfg).unwrap();
        prop_assert_eq!((ra.len(), rb.len()), (len, len));
        prop_assert_eq!(ra.first(), a.first());
        prop_assert_eq!(ra.last(), a.last());
        prop_assert_eq!(rb.first(), b.first());
        prop_assert_eq!(rb.last(), b.last());
        prop_assert!(rep.collided_after <= rep.collided_before);
        prop_assert!(rep.iterations <= cfg.max_iterations);
        prop_assert_eq!(rep.steps.iter().filter(|s| s.accepted).count(), rep.iterations);
    }
}
