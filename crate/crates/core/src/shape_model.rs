//! Six-parameter shape model, forward map, residuals and evaluation metrics.

use serde::{Deserialize, Serialize};

use crate::error::{FitError, Result};
use crate::geometry::{Point2, PointSet};
use crate::phi_solver::PhiSolver;
use crate::scalar::Real;
use crate::unit_shape::{Family, UnitShapeSpec};

pub const PARAM_NAMES: [&str; 6] = ["x_c", "y_c", "m_x", "m_y", "alpha", "lambda"];

/// Which of the six parameters the optimizer may move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeMask(pub [bool; 6]);

impl Default for FreeMask {
    fn default() -> Self {
        FreeMask([true; 6])
    }
}

impl FreeMask {
    /// All free except the shear.
    pub fn shear_fixed() -> Self {
        FreeMask([true, true, true, true, true, false])
    }

    pub fn is_free(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn lambda_free(&self) -> bool {
        self.0[5]
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..6).filter(|&i| self.0[i]).collect()
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&f| f).count()
    }
}

/// `(x_c, y_c, m_x, m_y, alpha, lambda)`: centroid, axis scales, rotation
/// (radians, counter-clockwise) and shear.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeParams<T> {
    pub x_c: T,
    pub y_c: T,
    pub m_x: T,
    pub m_y: T,
    pub alpha: T,
    pub lambda: T,
    pub free: FreeMask,
}

impl<T: Real> ShapeParams<T> {
    /// All parameters free.
    pub fn new(x_c: T, y_c: T, m_x: T, m_y: T, alpha: T, lambda: T) -> Self {
        Self {
            x_c,
            y_c,
            m_x,
            m_y,
            alpha,
            lambda,
            free: FreeMask::default(),
        }
    }

    pub fn with_free(mut self, free: FreeMask) -> Self {
        self.free = free;
        self
    }

    pub fn to_array(&self) -> [T; 6] {
        [
            self.x_c,
            self.y_c,
            self.m_x,
            self.m_y,
            self.alpha,
            self.lambda,
        ]
    }

    pub fn from_array(v: [T; 6], free: FreeMask) -> Self {
        Self {
            x_c: v[0],
            y_c: v[1],
            m_x: v[2],
            m_y: v[3],
            alpha: v[4],
            lambda: v[5],
            free,
        }
    }

    pub fn get(&self, i: usize) -> T {
        self.to_array()[i]
    }

    pub fn with(&self, i: usize, value: T) -> Self {
        let mut v = self.to_array();
        v[i] = value;
        Self::from_array(v, self.free)
    }

    /// Euclidean norm of the full six-vector.
    pub fn norm(&self) -> T {
        self.to_array()
            .iter()
            .fold(T::zero(), |acc, &v| acc + v * v)
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Whether the shear is pinned at zero (rectangles, plain ellipses).
    pub fn shear_fixed_zero(&self) -> bool {
        !self.free.lambda_free() && self.lambda == T::zero()
    }

    pub fn centroid(&self) -> Point2<T> {
        Point2::new(self.x_c, self.y_c)
    }

    /// `M * p` with `M = [[m_x, 0], [lambda m_y, m_y]]`.
    #[inline]
    pub fn apply_m(&self, p: Point2<T>) -> Point2<T> {
        Point2::new(self.m_x * p.x, self.m_y * (self.lambda * p.x + p.y))
    }

    pub fn cast<U: Real>(&self) -> ShapeParams<U> {
        let v = self.to_array();
        ShapeParams::from_array(v.map(|x| U::lit(x.as_f64())), self.free)
    }
}

/// World-space point of the shape boundary at unit-shape angle `phi`:
/// `T + R(alpha) M P(phi)`.
pub fn forward_point<T: Real>(
    params: &ShapeParams<T>,
    spec: &UnitShapeSpec<T>,
    phi: T,
) -> Point2<T> {
    params.apply_m(spec.point(phi)).rotate(params.alpha) + params.centroid()
}

/// `n` boundary points at uniformly spaced `phi` in `[0, 2 pi)`, tagged with their angles.
pub fn boundary_points<T: Real>(
    params: &ShapeParams<T>,
    spec: &UnitShapeSpec<T>,
    n: usize,
) -> PointSet<T> {
    assert!(n >= 3, "need at least three boundary points");
    let step = T::TAU() / T::from_usize_lossy(n);
    let phi: Vec<T> = (0..n).map(|j| step * T::from_usize_lossy(j)).collect();
    let points = phi
        .iter()
        .map(|&a| forward_point(params, spec, a))
        .collect();
    PointSet::with_phi(points, phi)
}

/// Residual `R^T (X - T) - M P(phi)` for a point with a known angle.
#[inline]
pub fn residual_with_phi<T: Real>(
    point: Point2<T>,
    params: &ShapeParams<T>,
    spec: &UnitShapeSpec<T>,
    phi: T,
) -> Point2<T> {
    (point - params.centroid()).rotate(-params.alpha) - params.apply_m(spec.point(phi))
}

/// Residual with `phi` solved from the current parameters.
pub fn residual<T: Real>(
    point: Point2<T>,
    params: &ShapeParams<T>,
    spec: &UnitShapeSpec<T>,
    solver: &PhiSolver<T>,
) -> Result<Point2<T>> {
    let phi = solver.phi(point, params)?;
    Ok(residual_with_phi(point, params, spec, phi))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RmseReport<T> {
    pub rmse: T,
    /// Points that contributed.
    pub used: usize,
    /// Points skipped because they sit exactly on the centroid.
    pub skipped: usize,
}

/// `sqrt(mean ||L_i||^2)` over all points with a defined angle.
pub fn fitting_rmse<T: Real>(
    points: &PointSet<T>,
    params: &ShapeParams<T>,
    spec: &UnitShapeSpec<T>,
) -> Result<RmseReport<T>> {
    let solver = PhiSolver::new(spec, params.shear_fixed_zero());
    let mut sum = T::zero();
    let mut used = 0usize;
    let mut skipped = 0usize;
    for (index, &p) in points.iter().enumerate() {
        match residual(p, params, spec, &solver) {
            Ok(l) => {
                sum = sum + l.norm_sq();
                used += 1;
            }
            Err(FitError::CoincidentPoint) => skipped += 1,
            Err(e) => {
                return Err(FitError::PhiFailure {
                    index,
                    source: Box::new(e),
                })
            }
        }
    }
    if used == 0 {
        return Err(FitError::TooFewPoints { needed: 1, got: 0 });
    }
    Ok(RmseReport {
        rmse: (sum / T::from_usize_lossy(used)).sqrt(),
        used,
        skipped,
    })
}

const DISTANCE_SAMPLES: usize = 4096;

/// Densely sampled boundary for repeated point-to-curve distance queries.
struct DenseBoundary<'a, T> {
    params: &'a ShapeParams<T>,
    spec: &'a UnitShapeSpec<T>,
    step: T,
    samples: Vec<Point2<T>>,
}

impl<'a, T: Real> DenseBoundary<'a, T> {
    fn new(params: &'a ShapeParams<T>, spec: &'a UnitShapeSpec<T>) -> Self {
        let step = T::TAU() / T::from_usize_lossy(DISTANCE_SAMPLES);
        let samples = (0..DISTANCE_SAMPLES)
            .map(|j| forward_point(params, spec, step * T::from_usize_lossy(j)))
            .collect();
        Self {
            params,
            spec,
            step,
            samples,
        }
    }

    /// Nearest sample followed by golden-section refinement around it.
    fn distance(&self, point: Point2<T>) -> T {
        let mut best = (0, T::infinity());
        for (j, s) in self.samples.iter().enumerate() {
            let d = s.distance(point);
            if d < best.1 {
                best = (j, d);
            }
        }
        let dist = |phi: T| forward_point(self.params, self.spec, phi).distance(point);
        let centre = self.step * T::from_usize_lossy(best.0);
        let (mut a, mut b) = (centre - self.step, centre + self.step);
        let inv_phi = T::lit(0.618_033_988_749_894_9);
        let mut c = b - (b - a) * inv_phi;
        let mut d = a + (b - a) * inv_phi;
        let (mut fc, mut fd) = (dist(c), dist(d));
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - (b - a) * inv_phi;
                fc = dist(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + (b - a) * inv_phi;
                fd = dist(d);
            }
            if (b - a).abs() <= T::epsilon() {
                break;
            }
        }
        best.1.min(fc).min(fd).min(dist((a + b) / T::lit(2.0)))
    }
}

/// Distance from `point` to the rendered boundary: dense sampling over `phi`
/// followed by golden-section refinement around the best sample.
pub fn geometric_distance<T: Real>(
    point: Point2<T>,
    params: &ShapeParams<T>,
    spec: &UnitShapeSpec<T>,
) -> T {
    DenseBoundary::new(params, spec).distance(point)
}

/// Default boundary resolution for Hausdorff comparisons.
pub const HAUSDORFF_SAMPLES: usize = 720;

/// Two-sided Hausdorff distance between two rendered boundaries.
pub fn hausdorff_distance<T: Real>(
    a: &ShapeParams<T>,
    spec_a: &UnitShapeSpec<T>,
    b: &ShapeParams<T>,
    spec_b: &UnitShapeSpec<T>,
    samples: usize,
) -> T {
    let one_sided = |from: &ShapeParams<T>,
                     fs: &UnitShapeSpec<T>,
                     to: &ShapeParams<T>,
                     ts: &UnitShapeSpec<T>| {
        let target = DenseBoundary::new(to, ts);
        boundary_points(from, fs, samples)
            .iter()
            .map(|&p| target.distance(p))
            .fold(T::zero(), T::max)
    };
    one_sided(a, spec_a, b, spec_b).max(one_sided(b, spec_b, a, spec_a))
}

/// Rotation period of `alpha` under which the rendered shape is unchanged.
/// `regular` marks equal scales with zero shear, where the full polygon
/// symmetry applies.
pub fn symmetry_period<T: Real>(family: Family, regular: bool) -> T {
    match (family, regular) {
        (Family::Ellipse, true) => T::zero(),
        (Family::Ellipse, false) => T::PI(),
        (f, true) => T::TAU() / T::from_u32(f.sides().unwrap()).unwrap(),
        (f, false) => {
            if f.sides().unwrap() % 2 == 0 {
                T::PI()
            } else {
                T::TAU()
            }
        }
    }
}

/// Whether `params` describe a regular shape (equal scales, no shear) within `rel_tol`.
pub fn is_regular<T: Real>(params: &ShapeParams<T>, rel_tol: T) -> bool {
    params.lambda == T::zero()
        && (params.m_x - params.m_y).abs() <= rel_tol * params.m_x.abs().max(params.m_y.abs())
}

/// Reduces `a` into `[0, period)`; a zero period maps everything to zero.
pub fn reduce_angle<T: Real>(a: T, period: T) -> T {
    if period == T::zero() {
        return T::zero();
    }
    let r = a % period;
    let r = if r < T::zero() { r + period } else { r };
    if r >= period {
        T::zero()
    } else {
        r
    }
}

/// Signed difference `a - b` folded into `[-period/2, period/2)`.
pub fn angle_delta<T: Real>(a: T, b: T, period: T) -> T {
    if period == T::zero() {
        return T::zero();
    }
    let half = period / T::lit(2.0);
    reduce_angle(a - b + half, period) - half
}

/// Canonical parameters for reporting: for zero-shear ellipses and
/// rectangles `m_x >= m_y` (swapping adds 90 degrees to `alpha`), and `alpha`
/// reduced into `[0, period)` of the shape's symmetry.
pub fn canonicalize<T: Real>(params: &ShapeParams<T>, family: Family) -> ShapeParams<T> {
    let mut out = *params;
    let swappable = matches!(family, Family::Ellipse | Family::Square) && out.lambda == T::zero();
    if swappable && out.m_x < out.m_y {
        std::mem::swap(&mut out.m_x, &mut out.m_y);
        out.alpha = out.alpha + T::FRAC_PI_2();
    }
    let regular = is_regular(&out, T::lit(1e-9));
    out.alpha = reduce_angle(out.alpha, symmetry_period::<T>(family, regular));
    out
}
