//! Marker index conventions and a rest-pose body template.
//!
//! The toolkit treats marker indices as opaque except for the handful named
//! here. The default layout is the one used by the bundled synthetic bodies;
//! data with a different ordering supplies its own [`MarkerLayout`].

use super::MARKER_COUNT;
use crate::math::Vec3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerLayout {
    pub left_hip: usize,
    pub right_hip: usize,
    /// Heel, toe and two ball markers per foot, left foot first.
    pub feet: [usize; 8],
}

impl Default for MarkerLayout {
    fn default() -> Self {
        Self {
            left_hip: 24,
            right_hip: 25,
            feet: [0, 1, 2, 3, 4, 5, 6, 7],
        }
    }
}

impl MarkerLayout {
    pub fn left_foot(&self) -> &[usize] {
        &self.feet[..4]
    }

    pub fn right_foot(&self) -> &[usize] {
        &self.feet[4..]
    }
}

/// Pelvis height of the rest pose.
pub const REST_PELVIS_HEIGHT: f64 = 0.95;

// Body-local rest pose: x to the body's right, y forward, z up, origin on
// the ground below the pelvis. Left-side entries have negative x.
const REST_POSE: [[f64; 3]; MARKER_COUNT] = [
    // feet: heel, toe, ball inner, ball outer
    [-0.10, -0.08, 0.0],
    [-0.10, 0.16, 0.0],
    [-0.06, 0.09, 0.0],
    [-0.14, 0.08, 0.0],
    [0.10, -0.08, 0.0],
    [0.10, 0.16, 0.0],
    [0.06, 0.09, 0.0],
    [0.14, 0.08, 0.0],
    // ankles
    [-0.07, -0.04, 0.08],
    [-0.13, -0.04, 0.08],
    [0.07, -0.04, 0.08],
    [0.13, -0.04, 0.08],
    // legs
    [-0.10, 0.03, 0.30],
    [-0.10, 0.05, 0.50],
    [-0.15, 0.00, 0.51],
    [-0.11, 0.06, 0.70],
    [0.10, 0.03, 0.30],
    [0.10, 0.05, 0.50],
    [0.15, 0.00, 0.51],
    [0.11, 0.06, 0.70],
    [-0.17, 0.00, 0.75],
    [0.17, 0.00, 0.75],
    // pelvis ring
    [-0.12, 0.10, 0.97],
    [0.12, 0.10, 0.97],
    [-0.16, 0.00, 0.92],
    [0.16, 0.00, 0.92],
    [0.00, -0.11, 1.00],
    [-0.08, -0.10, 1.01],
    [0.08, -0.10, 1.01],
    [0.00, 0.12, 1.05],
    // torso
    [0.00, 0.12, 1.30],
    [0.00, 0.09, 1.45],
    [0.00, -0.08, 1.50],
    [0.00, -0.12, 1.25],
    [-0.10, 0.11, 1.35],
    [0.10, 0.11, 1.35],
    [-0.10, -0.11, 1.36],
    [0.10, -0.11, 1.36],
    [-0.15, 0.00, 1.10],
    [0.15, 0.00, 1.10],
    // arms
    [-0.20, 0.00, 1.45],
    [0.20, 0.00, 1.45],
    [-0.23, 0.00, 1.30],
    [0.23, 0.00, 1.30],
    [-0.25, -0.02, 1.12],
    [0.25, -0.02, 1.12],
    [-0.21, 0.00, 1.13],
    [0.21, 0.00, 1.13],
    [-0.26, 0.02, 0.98],
    [0.26, 0.02, 0.98],
    [-0.24, 0.03, 0.85],
    [-0.28, 0.03, 0.86],
    [0.24, 0.03, 0.85],
    [0.28, 0.03, 0.86],
    [-0.27, 0.05, 0.75],
    [0.27, 0.05, 0.75],
    [-0.24, 0.07, 0.78],
    [0.24, 0.07, 0.78],
    // head and neck
    [0.00, 0.00, 1.75],
    [0.00, 0.09, 1.68],
    [-0.08, 0.02, 1.65],
    [0.08, 0.02, 1.65],
    [0.00, -0.09, 1.66],
    [0.00, 0.08, 1.55],
    [-0.06, 0.07, 1.60],
    [0.06, 0.07, 1.60],
    [0.00, 0.06, 1.50],
];

/// Rest-pose markers in the body-local frame.
pub fn rest_pose() -> Vec<Vec3> {
    REST_POSE.iter().map(|p| Vec3::from_array(*p)).collect()
}

/// Wrist and hand markers, used by gesture animation.
pub const ARM_MARKERS_LEFT: [usize; 8] = [42, 44, 46, 48, 50, 51, 54, 56];
pub const ARM_MARKERS_RIGHT: [usize; 8] = [43, 45, 47, 49, 52, 53, 55, 57];
