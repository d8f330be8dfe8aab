//! Planar vectors and the direction fields consumed by the interaction model.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Separation below which two points are treated as coincident.
pub const EPS_COINCIDE: f64 = 1e-9;

/// A point or displacement in the plane, in the dataset's length unit.
///
/// Serialized as a two-element array `[x, y]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Counterclockwise rotation by a quarter turn: `(x, y) -> (-y, x)`.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    /// Rotation about the origin by `angle` radians (counterclockwise).
    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Unit vector along `self`, or zero when the norm is below [`EPS_COINCIDE`].
    pub fn normalized_or_zero(self) -> Vec2 {
        let n = self.norm();
        if n < EPS_COINCIDE {
            Vec2::ZERO
        } else {
            Vec2::new(self.x / n, self.y / n)
        }
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Normalized direction from `from` to `to`; zero for coincident points.
pub fn unit_direction(from: Vec2, to: Vec2) -> Vec2 {
    (to - from).normalized_or_zero()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Clockwise,
    Counterclockwise,
}

/// External directional stimulus sampled at each individual's position.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum StimulusField {
    None,
    /// Rotating pattern about `center`. Only the sense enters the direction;
    /// the angular speed is carried as metadata for the experimental condition.
    Rotating {
        center: Vec2,
        angular_speed_deg_per_frame: f64,
        sense: Sense,
    },
}

impl StimulusField {
    /// Unit tangent of the rotation at `pos` (zero at the center, or for `None`).
    ///
    /// The frame index is accepted for fields whose geometry changes over time;
    /// the rotating pattern's tangent does not depend on it.
    pub fn direction(&self, pos: Vec2, _frame: usize) -> Vec2 {
        match *self {
            StimulusField::None => Vec2::ZERO,
            StimulusField::Rotating { center, sense, .. } => {
                let rel = pos - center;
                let r = rel.norm();
                if r == 0.0 {
                    return Vec2::ZERO;
                }
                let ccw = rel.perp() * (1.0 / r);
                match sense {
                    Sense::Counterclockwise => ccw,
                    Sense::Clockwise => -ccw,
                }
            }
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if let StimulusField::Rotating {
            center,
            angular_speed_deg_per_frame,
            ..
        } = *self
        {
            if !center.is_finite() {
                return Err(crate::Error::config("stimulus center must be finite"));
            }
            if !(angular_speed_deg_per_frame > 0.0 && angular_speed_deg_per_frame.is_finite()) {
                return Err(crate::Error::config(format!(
                    "stimulus angular speed must be positive, got {angular_speed_deg_per_frame}"
                )));
            }
        }
        Ok(())
    }

    /// The same field after rotating the plane about the origin.
    pub fn rotated(&self, angle: f64) -> StimulusField {
        match *self {
            StimulusField::None => StimulusField::None,
            StimulusField::Rotating {
                center,
                angular_speed_deg_per_frame,
                sense,
            } => StimulusField::Rotating {
                center: center.rotated(angle),
                angular_speed_deg_per_frame,
                sense,
            },
        }
    }
}
