use crate::error::{Error, Result};
use crate::math::Vec2;

/// Slack (meters, or unit-circle radius for ellipses) on the inclusive boundary.
pub const PATTERN_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    Rectangle,
    Ellipse,
}

/// Rotated rectangle or ellipse footprint of a synthetic obstacle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstaclePattern {
    kind: PatternKind,
    center: Vec2,
    half_extents: (f64, f64),
    yaw: f64,
}

impl ObstaclePattern {
    pub fn new(
        kind: PatternKind,
        center: Vec2,
        half_extents: (f64, f64),
        yaw: f64,
    ) -> Result<Self> {
        let (a, b) = half_extents;
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "pattern half extents must be positive, got ({a}, {b})"
            )));
        }
        if !center.is_finite() || !yaw.is_finite() {
            return Err(Error::InvalidValue(
                "pattern center/yaw must be finite".into(),
            ));
        }
        Ok(Self {
            kind,
            center,
            half_extents,
            yaw,
        })
    }

    pub fn kind(&self) -> PatternKind {
        self.kind
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    pub fn half_extents(&self) -> (f64, f64) {
        self.half_extents
    }

    pub fn yaw(&self) -> f64 {
        self.yaw
    }

    pub fn contains(&self, p: Vec2) -> bool {
        point_in_pattern(self, p)
    }
}

/// Inclusive membership after expressing `p` in the pattern's own frame.
pub fn point_in_pattern(pat: &ObstaclePattern, p: Vec2) -> bool {
    let local = (p - pat.center).rotate(-pat.yaw);
    let (a, b) = pat.half_extents;
    match pat.kind {
        PatternKind::Rectangle => {
            local.x.abs() <= a + PATTERN_EPS && local.y.abs() <= b + PATTERN_EPS
        }
        PatternKind::Ellipse => {
            let u = local.x / a;
            let v = local.y / b;
            u * u + v * v <= 1.0 + PATTERN_EPS
        }
    }
}
