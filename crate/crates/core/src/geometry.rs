//! Minimal 2D point/vector type and the point collection used across the crate.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    /// Counter-clockwise rotation by `angle`.
    #[inline]
    pub fn rotate(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    #[inline]
    pub fn distance(self, o: Self) -> T {
        (self - o).norm()
    }

    pub fn cast<U: Real>(self) -> Point2<U> {
        Point2::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()))
    }
}

impl<T: Real> Add for Point2<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> Sub for Point2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Real> Mul<T> for Point2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<T: Real> Neg for Point2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance<T: Real>(p: Point2<T>, a: Point2<T>, b: Point2<T>) -> T {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == T::zero() {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len_sq).max(T::zero()).min(T::one());
    p.distance(a + ab * t)
}

/// Ordered 2D points, optionally tagged with the unit-shape angle each point
/// was generated from.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointSet<T> {
    points: Vec<Point2<T>>,
    phi: Option<Vec<T>>,
}

impl<T: Real> PointSet<T> {
    pub fn new(points: Vec<Point2<T>>) -> Self {
        Self { points, phi: None }
    }

    /// Points with their generating angles. Lengths must match.
    pub fn with_phi(points: Vec<Point2<T>>, phi: Vec<T>) -> Self {
        assert_eq!(points.len(), phi.len(), "one angle per point");
        Self {
            points,
            phi: Some(phi),
        }
    }

    pub fn from_xy(xy: &[(T, T)]) -> Self {
        Self::new(xy.iter().map(|&(x, y)| Point2::new(x, y)).collect())
    }

    pub fn points(&self) -> &[Point2<T>] {
        &self.points
    }

    pub fn phi(&self) -> Option<&[T]> {
        self.phi.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point2<T>> {
        self.points.iter()
    }

    pub fn into_points(self) -> Vec<Point2<T>> {
        self.points
    }

    /// Keeps the points (and their angles) for which `keep(index)` is true.
    pub fn retain_indices(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(i)).collect();
        Self {
            points: idx.iter().map(|&i| self.points[i]).collect(),
            phi: self
                .phi
                .as_ref()
                .map(|phi| idx.iter().map(|&i| phi[i]).collect()),
        }
    }

    /// Applies `f` to every point, keeping provenance.
    pub fn map_points(&self, f: impl FnMut(&Point2<T>) -> Point2<T>) -> Self {
        Self {
            points: self.points.iter().map(f).collect(),
            phi: self.phi.clone(),
        }
    }
}

impl<T: Real> FromIterator<Point2<T>> for PointSet<T> {
    fn from_iter<I: IntoIterator<Item = Point2<T>>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}
