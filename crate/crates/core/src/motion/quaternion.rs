use crate::error::{Error, Result};
use crate::math::Vec3;

/// Below this arc angle (radians) slerp falls back to normalized lerp.
pub const SLERP_LINEAR_THRESHOLD: f64 = 1e-6;

/// Unit quaternion `w + xi + yj + zk`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl Default for Quaternion {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Builds a quaternion from raw components, normalizing to unit length.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n < 1e-12 {
            return Err(Error::InvalidValue(format!(
                "quaternion ({w}, {x}, {y}, {z}) cannot be normalized"
            )));
        }
        Ok(Self {
            w: w / n,
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self> {
        let n = axis.norm();
        if !(n > 0.0) || !angle.is_finite() {
            return Err(Error::InvalidValue("zero rotation axis".into()));
        }
        let (s, c) = (angle * 0.5).sin_cos();
        let a = axis / n;
        Self::new(c, a.x * s, a.y * s, a.z * s)
    }

    pub fn from_yaw(angle: f64) -> Self {
        let (s, c) = (angle * 0.5).sin_cos();
        Self {
            w: c,
            x: 0.0,
            y: 0.0,
            z: s,
        }
    }

    pub fn components(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, o: &Quaternion) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn negated(&self) -> Quaternion {
        Quaternion {
            w: -self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn conjugate(&self) -> Quaternion {
        Quaternion {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Hamilton product `self * o`.
    pub fn mul(&self, o: &Quaternion) -> Quaternion {
        Quaternion {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }

    pub fn rotate(&self, v: Vec3) -> Vec3 {
        let u = Vec3::new(self.x, self.y, self.z);
        let t = u.cross(v) * 2.0;
        v + t * self.w + u.cross(t)
    }

    /// Rotation angle between two orientations in `[0, pi]`, treating `q` and `-q` alike.
    pub fn angle_to(&self, o: &Quaternion) -> f64 {
        let o = if self.dot(o) < 0.0 { o.negated() } else { *o };
        let d = self.sub(&o).norm4();
        let s = self.add(&o).norm4();
        4.0 * d.atan2(s)
    }

    /// Spherical linear interpolation along the shorter arc.
    pub fn slerp(&self, other: &Quaternion, t: f64) -> Quaternion {
        let q1 = if self.dot(other) < 0.0 {
            other.negated()
        } else {
            *other
        };
        // half of the rotation angle between the two, computed without acos
        let theta = 2.0 * self.sub(&q1).norm4().atan2(self.add(&q1).norm4());
        let (a, b) = if theta < SLERP_LINEAR_THRESHOLD {
            (1.0 - t, t)
        } else {
            let s = theta.sin();
            (((1.0 - t) * theta).sin() / s, (t * theta).sin() / s)
        };
        let q = Quaternion {
            w: a * self.w + b * q1.w,
            x: a * self.x + b * q1.x,
            y: a * self.y + b * q1.y,
            z: a * self.z + b * q1.z,
        };
        let n = q.norm();
        Quaternion {
            w: q.w / n,
            x: q.x / n,
            y: q.y / n,
            z: q.z / n,
        }
    }

    fn add(&self, o: &Quaternion) -> Quaternion {
        Quaternion {
            w: self.w + o.w,
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z,
        }
    }

    fn sub(&self, o: &Quaternion) -> Quaternion {
        Quaternion {
            w: self.w - o.w,
            x: self.x - o.x,
            y: self.y - o.y,
            z: self.z - o.z,
        }
    }

    fn norm4(&self) -> f64 {
        self.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn normalizes_on_construction() {
        let q = Quaternion::new(2.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(q, Quaternion::IDENTITY);
        assert!(Quaternion::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(Quaternion::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn rotate_quarter_turn_about_z() {
        let q = Quaternion::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), FRAC_PI_2).unwrap();
        let v = q.rotate(Vec3::new(1.0, 0.0, 0.0));
        assert!((v - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn angle_to_ignores_sign() {
        let q = Quaternion::from_yaw(0.3);
        assert!(q.angle_to(&q.negated()) < 1e-15);
        assert!((Quaternion::IDENTITY.angle_to(&q) - 0.3).abs() < 1e-14);
    }
}
