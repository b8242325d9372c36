//! Synthetic marker motion: standing, walking with planted feet, and a
//! two-arm gesture. Stands in for learned motion generators.
//!
//! A walk is a fixed number of alternating steps. A swinging foot rises
//! vertically, pauses, moves through the air, pauses above its landing spot
//! and drops vertically, so no foot marker near the ground ever moves
//! horizontally.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::math::{Vec2, Vec3};
use crate::motion::facing_yaw;
use crate::motion::layout::{
    rest_pose, MarkerLayout, ARM_MARKERS_LEFT, ARM_MARKERS_RIGHT, REST_PELVIS_HEIGHT,
};
use crate::motion::{MarkerFrame, MotionSequence};

/// Heights of the rising frames of a swing; the last entry is the lift height.
const RISE: [f64; 2] = [0.06, 0.12];
const LIFT_HOLD: usize = 2;
const LAND_HOLD: usize = 3;
/// Frames spent by a swing outside its move phase.
const SWING_OVERHEAD: usize = RISE.len() + LIFT_HOLD + LAND_HOLD + RISE.len();

#[derive(Debug, Clone, PartialEq)]
pub struct GaitParams {
    pub fps: u32,
    /// Frames produced per order.
    pub clip_frames: usize,
    /// Standing frames at the start of every order.
    pub idle_frames: usize,
    pub step_frames: usize,
    pub max_steps: usize,
    /// Longest single foot move, meters.
    pub max_foot_move: f64,
}

impl Default for GaitParams {
    fn default() -> Self {
        Self {
            fps: 40,
            clip_frames: 50,
            idle_frames: 5,
            step_frames: 10,
            max_steps: 4,
            max_foot_move: 0.8,
        }
    }
}

impl GaitParams {
    pub fn validate(&self) -> Result<()> {
        if self.fps == 0
            || self.step_frames <= SWING_OVERHEAD
            || self.max_steps < 2
            || !(self.max_foot_move > 0.0)
        {
            return Err(Error::BadParams(format!(
                "gait needs fps > 0, step_frames > {SWING_OVERHEAD}, max_steps >= 2 and a positive foot move"
            )));
        }
        if self.steps() < 2 {
            return Err(Error::BadParams(format!(
                "{} frames per order leave room for fewer than two steps",
                self.clip_frames
            )));
        }
        Ok(())
    }

    fn steps(&self) -> usize {
        (self.clip_frames.saturating_sub(self.idle_frames) / self.step_frames).min(self.max_steps)
    }

    /// Farthest the body can travel in one order.
    pub fn max_travel(&self) -> f64 {
        self.max_foot_move * (self.steps() / 2) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Foot {
    pos: Vec2,
    yaw: f64,
}

fn wrap_angle(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

fn lerp_angle(a: f64, b: f64, t: f64) -> f64 {
    a + wrap_angle(b - a) * t
}

fn lerp2(a: Vec2, b: Vec2, t: f64) -> Vec2 {
    a + (b - a) * t
}

/// Character state carried from one order to the next.
#[derive(Debug, Clone)]
pub struct Walker {
    params: GaitParams,
    rest: Vec<Vec3>,
    layout: MarkerLayout,
    foot_center: [Vec2; 2],
    body: Vec2,
    heading: f64,
    feet: [Foot; 2],
}

struct Pose {
    body: Vec2,
    heading: f64,
    feet: [Foot; 2],
    lift: [f64; 2],
    arms: Vec3,
}

impl Walker {
    /// Standing at `body` facing `heading` (radians from +X).
    pub fn new(body: Vec2, heading: f64, params: GaitParams) -> Result<Self> {
        params.validate()?;
        if !body.is_finite() || !heading.is_finite() {
            return Err(Error::InvalidValue(
                "walker position and heading must be finite".into(),
            ));
        }
        let rest = rest_pose();
        let layout = MarkerLayout::default();
        let center = |ids: &[usize]| {
            let s = ids.iter().fold(Vec2::ZERO, |acc, &i| acc + rest[i].xy());
            s / ids.len() as f64
        };
        let foot_center = [center(layout.left_foot()), center(layout.right_foot())];
        let feet = foot_center.map(|c| Foot {
            pos: body + c.rotate(heading - FRAC_PI_2),
            yaw: heading,
        });
        Ok(Self {
            params,
            rest,
            layout,
            foot_center,
            body,
            heading,
            feet,
        })
    }

    /// Standing where `frame` stands, facing the way its hips face.
    pub fn from_frame(frame: &MarkerFrame, params: GaitParams) -> Result<Self> {
        let heading = facing_yaw(frame, &MarkerLayout::default())?;
        Self::new(frame.pelvis().xy(), heading, params)
    }

    pub fn params(&self) -> &GaitParams {
        &self.params
    }

    /// Changes the length of subsequent clips.
    pub fn set_clip_frames(&mut self, frames: usize) -> Result<()> {
        let params = GaitParams {
            clip_frames: frames,
            ..self.params.clone()
        };
        params.validate()?;
        self.params = params;
        Ok(())
    }

    pub fn position(&self) -> Vec2 {
        self.body
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    fn frame(&self, p: &Pose) -> MarkerFrame {
        let base = Vec3::new(p.body.x, p.body.y, 0.0);
        let turn = p.heading - FRAC_PI_2;
        let arms = p.arms.rotate_z(turn);
        let mut markers: Vec<Vec3> = self
            .rest
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let m = base + r.rotate_z(turn);
                if ARM_MARKERS_LEFT.contains(&i) || ARM_MARKERS_RIGHT.contains(&i) {
                    m + arms
                } else {
                    m
                }
            })
            .collect();
        for (k, ids) in [self.layout.left_foot(), self.layout.right_foot()]
            .into_iter()
            .enumerate()
        {
            let foot = p.feet[k];
            for &i in ids {
                let local = (self.rest[i].xy() - self.foot_center[k]).rotate(foot.yaw - FRAC_PI_2);
                let xy = foot.pos + local;
                markers[i] = Vec3::new(xy.x, xy.y, self.rest[i].z + p.lift[k]);
            }
        }
        let pelvis = base + Vec3::new(0.0, 0.0, REST_PELVIS_HEIGHT);
        MarkerFrame::new(markers, pelvis).expect("synthetic frame has the full marker set")
    }

    fn standing_pose(&self) -> Pose {
        Pose {
            body: self.body,
            heading: self.heading,
            feet: self.feet,
            lift: [0.0; 2],
            arms: Vec3::ZERO,
        }
    }

    /// Current standing frame.
    pub fn pose(&self) -> MarkerFrame {
        self.frame(&self.standing_pose())
    }

    pub fn idle(&self, frames: usize) -> Result<MotionSequence> {
        MotionSequence::new(vec![self.pose(); frames], self.params.fps)
    }

    /// One order's worth of walking toward `target`, stopping `stop_short`
    /// meters before it. Travel is capped at [`GaitParams::max_travel`]; a
    /// target closer than a millimeter yields a standing clip.
    pub fn walk_to(&mut self, target: Vec2, stop_short: f64) -> Result<MotionSequence> {
        if !target.is_finite() || !stop_short.is_finite() {
            return Err(Error::InvalidValue("walk target must be finite".into()));
        }
        let p = self.params.clone();
        let d = target - self.body;
        let dist = d.norm();
        let travel = (dist - stop_short.max(0.0)).clamp(0.0, p.max_travel());
        if travel < 1e-3 {
            return self.idle(p.clip_frames);
        }
        let dir = d / dist;
        let end_heading = dir.y.atan2(dir.x);
        let end_body = self.body + dir * travel;
        let end_feet = self.foot_center.map(|c| Foot {
            pos: end_body + c.rotate(end_heading - FRAC_PI_2),
            yaw: end_heading,
        });

        let steps = p.steps();
        let moves = [steps.div_ceil(2), steps / 2];
        let start_body = self.body;
        let start_heading = self.heading;
        let start_feet = self.feet;
        let mut frames = vec![self.pose(); p.idle_frames];
        let mut done = [0usize; 2];
        let total = (steps * p.step_frames) as f64;
        let move_frames = p.step_frames - SWING_OVERHEAD;
        for s in 0..steps {
            let k = s % 2;
            done[k] += 1;
            let from = self.feet[k];
            let to = if done[k] == moves[k] {
                end_feet[k]
            } else {
                let t = done[k] as f64 / moves[k] as f64;
                Foot {
                    pos: lerp2(start_feet[k].pos, end_feet[k].pos, t),
                    yaw: lerp_angle(start_feet[k].yaw, end_feet[k].yaw, t),
                }
            };
            // (foot, lift) for each frame of the swing
            let mut swing: Vec<(Foot, f64)> = Vec::with_capacity(p.step_frames);
            swing.extend(RISE.iter().map(|&z| (from, z)));
            swing.extend(std::iter::repeat_n((from, RISE[1]), LIFT_HOLD));
            swing.extend((1..=move_frames).map(|j| {
                let t = j as f64 / move_frames as f64;
                let f = if j == move_frames {
                    to
                } else {
                    Foot {
                        pos: lerp2(from.pos, to.pos, t),
                        yaw: lerp_angle(from.yaw, to.yaw, t),
                    }
                };
                (f, RISE[1])
            }));
            swing.extend(std::iter::repeat_n((to, RISE[1]), LAND_HOLD));
            swing.extend([(to, RISE[0]), (to, 0.0)]);
            for (f, (foot, lift)) in swing.into_iter().enumerate() {
                let t = ((s * p.step_frames + f + 1) as f64 / total).min(1.0);
                let heading = if s == 0 {
                    lerp_angle(
                        start_heading,
                        end_heading,
                        (f + 1) as f64 / p.step_frames as f64,
                    )
                } else {
                    end_heading
                };
                let mut feet = self.feet;
                feet[k] = foot;
                let mut lifts = [0.0; 2];
                lifts[k] = lift;
                let body = if s + 1 == steps && f + 1 == p.step_frames {
                    end_body
                } else {
                    lerp2(start_body, end_body, t)
                };
                frames.push(self.frame(&Pose {
                    body,
                    heading,
                    feet,
                    lift: lifts,
                    arms: Vec3::ZERO,
                }));
            }
            self.feet[k] = to;
        }
        self.body = end_body;
        self.heading = end_heading;
        let tail = p.clip_frames.saturating_sub(frames.len());
        frames.extend(std::iter::repeat_n(self.pose(), tail));
        frames.truncate(p.clip_frames.max(p.idle_frames + steps * p.step_frames));
        MotionSequence::new(frames, p.fps)
    }

    /// One order of both forearms rising and lowering in place. `reach` is
    /// the peak forward displacement of the hand markers in meters.
    pub fn gesture(&self, reach: f64) -> Result<MotionSequence> {
        let p = &self.params;
        let active = p.clip_frames.saturating_sub(p.idle_frames + 1);
        let mut frames = vec![self.pose(); p.idle_frames];
        for j in 1..=active {
            let e = (PI * j as f64 / (active + 1) as f64).sin().powi(2);
            let mut pose = self.standing_pose();
            pose.arms = Vec3::new(0.0, reach * e, 2.5 * reach * e);
            frames.push(self.frame(&pose));
        }
        frames.resize(p.clip_frames.max(frames.len()), self.pose());
        MotionSequence::new(frames, p.fps)
    }
}

/// `len` identical frames of the rest pose standing at `pos` facing `heading`.
pub fn standing_sequence(pos: Vec2, heading: f64, len: usize, fps: u32) -> Result<MotionSequence> {
    let params = GaitParams {
        fps,
        ..GaitParams::default()
    };
    Walker::new(pos, heading, params)?.idle(len)
}
