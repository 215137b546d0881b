//! Vector primitives for homogeneous halfspaces.
//!
//! Everything here is pure: values are immutable once built and every
//! function can be called from any number of threads.

use std::f64::consts::FRAC_PI_2;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norms at or below this are treated as zero.
pub const ZERO_NORM: f64 = 1e-12;

/// Tolerance on `‖w‖ = 1` for a [`Hyperplane`].
pub const UNIT_TOL: f64 = 1e-9;

/// Dykstra rounds used by [`project_cone_cap`].
pub const DYKSTRA_ROUNDS: usize = 50;

/// A label in `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Neg,
    Pos,
}

impl Label {
    pub fn from_sign(value: f64) -> Label {
        // sign(0) = +1
        if value >= 0.0 {
            Label::Pos
        } else {
            Label::Neg
        }
    }

    pub fn from_i8(y: i8) -> Option<Label> {
        match y {
            1 => Some(Label::Pos),
            -1 => Some(Label::Neg),
            _ => None,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Label::Pos => 1.0,
            Label::Neg => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Pos => 1,
            Label::Neg => -1,
        }
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Pos => Label::Neg,
            Label::Neg => Label::Pos,
        }
    }
}

/// A point in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Instance(Vec<f64>);

impl Instance {
    pub fn new(coords: Vec<f64>) -> Result<Instance> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("instance must have d >= 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "instance coordinates must be finite".into(),
            ));
        }
        Ok(Instance(coords))
    }

    /// Wraps coordinates produced by trusted generators.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Instance {
        Instance(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Instance {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Unit normal `w` of the homogeneous halfspace `h_w(x) = sign(w·x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Hyperplane(Vec<f64>);

impl Hyperplane {
    /// Accepts `w` only if it is already unit length.
    pub fn new(w: Vec<f64>) -> Result<Hyperplane> {
        let n = norm(&w);
        if w.is_empty() || !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidParameter(format!(
                "hyperplane normal must be unit length, got norm {n}"
            )));
        }
        Ok(Hyperplane(w))
    }

    /// The `i`-th standard basis vector in `R^d`.
    pub fn basis(d: usize, i: usize) -> Hyperplane {
        assert!(i < d, "basis index {i} out of range for d = {d}");
        let mut w = vec![0.0; d];
        w[i] = 1.0;
        Hyperplane(w)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn negated(&self) -> Hyperplane {
        Hyperplane(self.0.iter().map(|c| -c).collect())
    }

    /// `w·x`, checked for matching dimension.
    pub fn margin(&self, x: &[f64]) -> Result<f64> {
        check_dims(self.dim(), x.len())?;
        Ok(dot(&self.0, x))
    }

    pub fn classify(&self, x: &[f64]) -> Result<Label> {
        Ok(Label::from_sign(self.margin(x)?))
    }
}

impl<'de> Deserialize<'de> for Hyperplane {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let w = Vec::<f64>::deserialize(de)?;
        Hyperplane::new(w).map_err(serde::de::Error::custom)
    }
}

impl Deref for Hyperplane {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `K = {v : ‖v‖ ≤ radius, θ(v, axis) ≤ half_angle}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeCap {
    axis: Hyperplane,
    half_angle: f64,
    radius: f64,
}

impl ConeCap {
    /// Unit-radius cap around `axis`. `half_angle` must lie in `[0, π/2]`;
    /// a zero half-angle degenerates to the segment `[0, axis]`.
    pub fn new(axis: Hyperplane, half_angle: f64) -> Result<ConeCap> {
        ConeCap::with_radius(axis, half_angle, 1.0)
    }

    pub fn with_radius(axis: Hyperplane, half_angle: f64, radius: f64) -> Result<ConeCap> {
        if !(0.0..=FRAC_PI_2).contains(&half_angle) {
            return Err(Error::InvalidParameter(format!(
                "cone half-angle must lie in [0, pi/2], got {half_angle}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cone radius must be positive, got {radius}"
            )));
        }
        Ok(ConeCap {
            axis,
            half_angle,
            radius,
        })
    }

    pub fn axis(&self) -> &Hyperplane {
        &self.axis
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.axis.dim()
    }

    /// Membership with absolute slack on the norm and the angle.
    pub fn contains(&self, v: &[f64], norm_tol: f64, angle_tol: f64) -> bool {
        let n = norm(v);
        if n > self.radius + norm_tol {
            return false;
        }
        if n <= ZERO_NORM {
            return true;
        }
        angle_between(&self.axis, v) <= self.half_angle + angle_tol
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

pub fn normalize(v: &[f64]) -> Result<Hyperplane> {
    let n = norm(v);
    if !(n > ZERO_NORM) || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(Hyperplane(v.iter().map(|c| c / n).collect()))
}

/// Angle in `[0, π]` between two unit vectors.
pub fn angle(u: &Hyperplane, v: &Hyperplane) -> f64 {
    angle_between(u, v)
}

/// Angle between `u` and the direction of an arbitrary nonzero `v`.
///
/// Uses `atan2(‖v - (u·v)u‖, u·v)` so that nearly parallel vectors do not
/// lose precision the way `acos` does.
pub fn angle_between(u: &[f64], v: &[f64]) -> f64 {
    let nu = norm(u);
    let nv = norm(v);
    if nu <= ZERO_NORM || nv <= ZERO_NORM {
        return 0.0;
    }
    let along = dot(u, v) / nu;
    let ortho_sq: f64 = u
        .iter()
        .zip(v)
        .map(|(ui, vi)| {
            let r = vi - along * ui / nu;
            r * r
        })
        .sum();
    ortho_sq.sqrt().atan2(along)
}

pub fn classify(h: &Hyperplane, x: &Instance) -> Result<Label> {
    h.classify(x)
}

/// Closed band `|w·x| ≤ γ`.
pub fn in_band(x: &Instance, w: &Hyperplane, gamma: f64) -> Result<bool> {
    Ok(w.margin(x)?.abs() <= gamma)
}

/// Euclidean projection onto the convex cone `{v : θ(v, axis) ≤ half_angle}`.
pub fn project_cone(v: &[f64], axis: &[f64], half_angle: f64) -> Vec<f64> {
    let a = dot(v, axis);
    let perp: Vec<f64> = v.iter().zip(axis).map(|(vi, ei)| vi - a * ei).collect();
    let r = norm(&perp);
    if r <= ZERO_NORM * (1.0 + a.abs()) {
        // on the axis line
        return if a >= 0.0 { v.to_vec() } else { vec![0.0; v.len()] };
    }
    let phi = r.atan2(a);
    if phi <= half_angle {
        return v.to_vec();
    }
    if phi >= half_angle + FRAC_PI_2 {
        return vec![0.0; v.len()];
    }
    let (s, c) = half_angle.sin_cos();
    // unit boundary ray in the plane spanned by axis and v
    let ray: Vec<f64> = axis
        .iter()
        .zip(&perp)
        .map(|(ei, pi)| c * ei + s * pi / r)
        .collect();
    let t = dot(v, &ray);
    ray.into_iter().map(|ri| t * ri).collect()
}

pub fn project_ball(v: &[f64], radius: f64) -> Vec<f64> {
    let n = norm(v);
    if n <= radius {
        v.to_vec()
    } else {
        v.iter().map(|c| c * radius / n).collect()
    }
}

/// Projection onto `K` by Dykstra's alternating projections between the
/// cone and the ball.
pub fn project_cone_cap(v: &[f64], k: &ConeCap) -> Vec<f64> {
    let d = v.len();
    let axis = k.axis.as_slice();
    let mut x = v.to_vec();
    let mut p = vec![0.0; d];
    let mut q = vec![0.0; d];
    for _ in 0..DYKSTRA_ROUNDS {
        let shifted: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
        let y = project_cone(&shifted, axis, k.half_angle);
        for i in 0..d {
            p[i] = shifted[i] - y[i];
        }
        let shifted: Vec<f64> = y.iter().zip(&q).map(|(a, b)| a + b).collect();
        let next = project_ball(&shifted, k.radius);
        for i in 0..d {
            q[i] = shifted[i] - next[i];
        }
        let moved = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = next;
        if moved == 0.0 {
            break;
        }
    }
    x
}
