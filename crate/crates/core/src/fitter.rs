//! Gauss-Newton shape fitting.
//!
//! Pipeline: centre and scale the points to unit RMS radius, take the
//! principal axis as the starting orientation, iterate
//! `g = -(A^T A)^{-1} A^T L`, `V <- V + g` until `||g|| < eps ||V||`, then
//! map centroid and scales back to the input frame.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FitError, Result};
use crate::geometry::{Point2, PointSet};
use crate::linalg::{lstsq, principal_axis, Matrix};
use crate::phi_solver::PhiSolver;
use crate::scalar::{wrap_angle, Real};
use crate::shape_model::{residual_with_phi, symmetry_period, FreeMask, ShapeParams, PARAM_NAMES};
use crate::unit_shape::{Family, UnitShapeSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JacobianMode {
    /// Analytic explicit terms, finite-difference `d phi / d V`.
    #[default]
    Hybrid,
    /// Central differences of the full residual vector.
    #[serde(rename = "fd")]
    FiniteDifference,
}

impl FromStr for JacobianMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "hybrid" => Ok(JacobianMode::Hybrid),
            "fd" | "finite-difference" => Ok(JacobianMode::FiniteDifference),
            _ => Err(format!(
                "unknown jacobian mode `{s}` (expected hybrid or fd)"
            )),
        }
    }
}

impl fmt::Display for JacobianMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JacobianMode::Hybrid => "hybrid",
            JacobianMode::FiniteDifference => "fd",
        })
    }
}

/// How the shear parameter is treated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaPolicy<T> {
    Fixed(T),
    Free { init: T },
}

impl<T: Real> Default for LambdaPolicy<T> {
    fn default() -> Self {
        LambdaPolicy::Fixed(T::zero())
    }
}

impl<T: Real> LambdaPolicy<T> {
    pub fn free() -> Self {
        LambdaPolicy::Free { init: T::zero() }
    }

    /// Shear that turns the isoceles unit triangle into a right triangle.
    pub fn right_triangle() -> Self {
        LambdaPolicy::Fixed(T::lit(3.0).sqrt() / T::lit(3.0))
    }

    pub fn initial(&self) -> T {
        match *self {
            LambdaPolicy::Fixed(v) => v,
            LambdaPolicy::Free { init } => init,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, LambdaPolicy::Free { .. })
    }

    pub fn mask(&self) -> FreeMask {
        if self.is_free() {
            FreeMask::default()
        } else {
            FreeMask::shear_fixed()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitConfig<T> {
    /// Relative step tolerance: stop once `||g|| < eps ||V||`.
    pub eps: T,
    pub max_iter: usize,
    pub jacobian: JacobianMode,
    /// Maximum step halvings per iteration; 0 gives plain Gauss-Newton.
    pub damping: usize,
    /// Minimum point count; `None` means twice the number of free parameters.
    pub min_points: Option<usize>,
    /// Number of moment-matched starting orientations screened by initial
    /// cost; 1 uses only the principal-axis start.
    pub starts: usize,
}

impl<T: Real> Default for FitConfig<T> {
    fn default() -> Self {
        Self {
            eps: T::lit(1e-6),
            max_iter: 100,
            jacobian: JacobianMode::Hybrid,
            damping: 20,
            min_points: None,
            starts: 8,
        }
    }
}

impl<T: Real> FitConfig<T> {
    fn validate(&self, free: usize) -> Result<()> {
        if !(self.eps > T::zero()) {
            return Err(FitError::InvalidConfig("eps must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(FitError::InvalidConfig(
                "max_iter must be at least 1".into(),
            ));
        }
        if self.starts == 0 {
            return Err(FitError::InvalidConfig("starts must be at least 1".into()));
        }
        if let Some(m) = self.min_points {
            if m < free {
                return Err(FitError::InvalidConfig(format!(
                    "min_points {m} is below the {free} free parameters"
                )));
            }
        }
        Ok(())
    }

    fn min_points_for(&self, free: usize) -> usize {
        self.min_points.unwrap_or(2 * free)
    }
}

/// Translation and scale removed before iterating.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationRecord<T> {
    pub x_mean: T,
    pub y_mean: T,
    pub d_rms: T,
}

impl<T: Real> NormalizationRecord<T> {
    pub fn identity() -> Self {
        Self {
            x_mean: T::zero(),
            y_mean: T::zero(),
            d_rms: T::one(),
        }
    }
}

/// Centres the points, scales them to unit RMS distance from the origin and
/// returns the principal-axis angle of the result.
pub fn preprocess<T: Real>(
    points: &PointSet<T>,
) -> Result<(PointSet<T>, NormalizationRecord<T>, T)> {
    if points.is_empty() {
        return Err(FitError::TooFewPoints { needed: 1, got: 0 });
    }
    let n = T::from_usize_lossy(points.len());
    let (sx, sy) = points
        .iter()
        .fold((T::zero(), T::zero()), |(ax, ay), p| (ax + p.x, ay + p.y));
    let mean = Point2::new(sx / n, sy / n);
    let sum_sq = points
        .iter()
        .fold(T::zero(), |acc, &p| acc + (p - mean).norm_sq());
    let d_rms = (sum_sq / n).sqrt();
    if !(d_rms > T::zero()) {
        return Err(FitError::DegenerateInput);
    }
    let normalized = points.map_points(|&p| (p - mean) * (T::one() / d_rms));
    let alpha0 = principal_axis(normalized.points());
    Ok((
        normalized,
        NormalizationRecord {
            x_mean: mean.x,
            y_mean: mean.y,
            d_rms,
        },
        alpha0,
    ))
}

/// Per-axis second moment of the unit curve over uniformly spaced angles.
/// Every family has E-fold symmetry with E >= 3 (or is a circle), so the
/// moment is the same along every axis.
fn unit_second_moment<T: Real>(spec: &UnitShapeSpec<T>) -> T {
    let n = 720;
    let step = T::TAU() / T::from_usize_lossy(n);
    let sum = (0..n).fold(T::zero(), |acc, j| {
        acc + spec.point(step * T::from_usize_lossy(j)).norm_sq()
    });
    sum / T::from_usize_lossy(2 * n)
}

/// Starting points for the iteration in the normalized frame.
///
/// The first is `(0, 0, 1, 1, alpha0, lambda0)`. The rest spread `alpha`
/// over one symmetry period and pick `m_x`, `m_y` (and a free `lambda`)
/// so the model's covariance matches that of the points.
pub fn initial_candidates<T: Real>(
    points: &[Point2<T>],
    spec: &UnitShapeSpec<T>,
    alpha0: T,
    lambda: LambdaPolicy<T>,
    starts: usize,
) -> Vec<ShapeParams<T>> {
    let mask = lambda.mask();
    let mut out = vec![ShapeParams::new(
        T::zero(),
        T::zero(),
        T::one(),
        T::one(),
        alpha0,
        lambda.initial(),
    )
    .with_free(mask)];
    if starts <= 1 || points.is_empty() {
        return out;
    }
    let n = T::from_usize_lossy(points.len());
    let (mut sxx, mut syy, mut sxy) = (T::zero(), T::zero(), T::zero());
    for p in points {
        sxx = sxx + p.x * p.x;
        syy = syy + p.y * p.y;
        sxy = sxy + p.x * p.y;
    }
    let (sxx, syy, sxy) = (sxx / n, syy / n, sxy / n);
    let s2 = unit_second_moment(spec);
    let period = symmetry_period::<T>(spec.family, false);
    let span = if period > T::zero() { period } else { T::TAU() };
    for j in 0..starts {
        let alpha = alpha0 + span * T::from_usize_lossy(j) / T::from_usize_lossy(starts);
        let (sa, ca) = alpha.sin_cos();
        // covariance in the shape frame
        let a11 = ca * ca * sxx + T::lit(2.0) * sa * ca * sxy + sa * sa * syy;
        let a22 = sa * sa * sxx - T::lit(2.0) * sa * ca * sxy + ca * ca * syy;
        let a12 = (ca * ca - sa * sa) * sxy + sa * ca * (syy - sxx);
        if !(a11 > T::zero() && a22 > T::zero()) {
            continue;
        }
        let m_x = (a11 / s2).sqrt();
        let (m_y, lam) = match lambda {
            LambdaPolicy::Free { .. } => {
                let shear = a12 / (s2 * m_x);
                let rest = a22 / s2 - shear * shear;
                if !(rest > T::zero()) {
                    continue;
                }
                let m_y = rest.sqrt();
                (m_y, shear / m_y)
            }
            LambdaPolicy::Fixed(l) => ((a22 / (s2 * (T::one() + l * l))).sqrt(), l),
        };
        let v = ShapeParams::new(T::zero(), T::zero(), m_x, m_y, alpha, lam).with_free(mask);
        if v.is_finite() {
            out.push(v);
        }
    }
    out
}

/// Maps normalized-frame parameters back to the input frame.
pub fn restore<T: Real>(v: &ShapeParams<T>, record: &NormalizationRecord<T>) -> ShapeParams<T> {
    ShapeParams {
        x_c: v.x_c * record.d_rms + record.x_mean,
        y_c: v.y_c * record.d_rms + record.y_mean,
        m_x: v.m_x * record.d_rms,
        m_y: v.m_y * record.d_rms,
        ..*v
    }
}

/// Residuals and Jacobian for one shape family over a fixed point set.
pub struct Problem<'a, T> {
    points: &'a [Point2<T>],
    spec: UnitShapeSpec<T>,
    solver: PhiSolver<T>,
}

fn phi_at<T: Real>(
    solver: &PhiSolver<T>,
    index: usize,
    p: Point2<T>,
    v: &ShapeParams<T>,
) -> Result<Option<T>> {
    match solver.phi(p, v) {
        Ok(phi) => Ok(Some(phi)),
        Err(FitError::CoincidentPoint) => Ok(None),
        Err(e) => Err(FitError::PhiFailure {
            index,
            source: Box::new(e),
        }),
    }
}

fn fd_step<T: Real>(base: f64) -> T {
    if T::epsilon() > T::lit(1e-10) {
        T::lit(1e-3)
    } else {
        T::lit(base)
    }
}

impl<'a, T: Real> Problem<'a, T> {
    /// `shear_fixed_zero` selects the closed-form rectangle path for squares.
    pub fn new(points: &'a [Point2<T>], spec: UnitShapeSpec<T>, shear_fixed_zero: bool) -> Self {
        Self {
            points,
            solver: PhiSolver::new(&spec, shear_fixed_zero),
            spec,
        }
    }

    pub fn spec(&self) -> &UnitShapeSpec<T> {
        &self.spec
    }

    /// Per-point residual 2-vectors; points on the centroid contribute zero.
    pub fn residuals(&self, v: &ShapeParams<T>) -> Result<Vec<Point2<T>>> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                Ok(match phi_at(&self.solver, i, p, v)? {
                    Some(phi) => residual_with_phi(p, v, &self.spec, phi),
                    None => Point2::zero(),
                })
            })
            .collect()
    }

    /// Stacked residual vector `[L_1x, L_1y, L_2x, ...]`.
    pub fn residual_vector(&self, v: &ShapeParams<T>) -> Result<Vec<T>> {
        Ok(self
            .residuals(v)?
            .into_iter()
            .flat_map(|l| [l.x, l.y])
            .collect())
    }

    pub fn cost(&self, v: &ShapeParams<T>) -> Result<T> {
        Ok(self
            .residuals(v)?
            .iter()
            .fold(T::zero(), |acc, l| acc + l.norm_sq()))
    }

    pub fn jacobian(&self, v: &ShapeParams<T>, mode: JacobianMode) -> Result<Matrix<T>> {
        match mode {
            JacobianMode::Hybrid => self.jacobian_hybrid(v),
            JacobianMode::FiniteDifference => self.jacobian_fd(v),
        }
    }

    fn jacobian_hybrid(&self, v: &ShapeParams<T>) -> Result<Matrix<T>> {
        let free = v.free.free_indices();
        let mut a = Matrix::zeros(2 * self.points.len(), free.len());
        let h = fd_step::<T>(1e-7);
        let two_h = h + h;
        let (sa, ca) = v.alpha.sin_cos();
        for (i, &x) in self.points.iter().enumerate() {
            let Some(phi) = phi_at(&self.solver, i, x, v)? else {
                continue;
            };
            let p = self.spec.point(phi);
            let dp = self.spec.dphi(phi);
            let m_dp = v.apply_m(dp);
            let d = x - v.centroid();
            for (col, &j) in free.iter().enumerate() {
                let explicit = match j {
                    0 => Point2::new(-ca, sa),
                    1 => Point2::new(-sa, -ca),
                    2 => Point2::new(-p.x, T::zero()),
                    3 => Point2::new(T::zero(), -(v.lambda * p.x + p.y)),
                    4 => Point2::new(-sa * d.x + ca * d.y, -ca * d.x - sa * d.y),
                    _ => Point2::new(T::zero(), -v.m_y * p.x),
                };
                let vj = v.get(j);
                let plus = phi_at(&self.solver, i, x, &v.with(j, vj + h))?;
                let minus = phi_at(&self.solver, i, x, &v.with(j, vj - h))?;
                let dphi = match (plus, minus) {
                    (Some(a), Some(b)) => wrap_angle(a - b) / two_h,
                    _ => T::zero(),
                };
                let entry = explicit - m_dp * dphi;
                a.set(2 * i, col, entry.x);
                a.set(2 * i + 1, col, entry.y);
            }
        }
        Ok(a)
    }

    fn jacobian_fd(&self, v: &ShapeParams<T>) -> Result<Matrix<T>> {
        let free = v.free.free_indices();
        let mut a = Matrix::zeros(2 * self.points.len(), free.len());
        for (col, &j) in free.iter().enumerate() {
            let vj = v.get(j);
            let h = fd_step::<T>(1e-6) * vj.abs().max(T::one());
            let lp = self.residual_vector(&v.with(j, vj + h))?;
            let lm = self.residual_vector(&v.with(j, vj - h))?;
            for r in 0..lp.len() {
                a.set(r, col, (lp[r] - lm[r]) / (h + h));
            }
        }
        Ok(a)
    }

    /// Gauss-Newton step `g` over the free parameters, expanded to all six.
    pub fn step(&self, v: &ShapeParams<T>, mode: JacobianMode) -> Result<[T; 6]> {
        let a = self.jacobian(v, mode)?;
        let l = self.residual_vector(v)?;
        let neg_l: Vec<T> = l.iter().map(|&x| -x).collect();
        let free = v.free.free_indices();
        let tol = T::epsilon().sqrt();
        let g = lstsq(&a, &neg_l, tol).map_err(|c| FitError::RankDeficient {
            column: PARAM_NAMES[free[c]],
        })?;
        let mut full = [T::zero(); 6];
        for (k, &j) in free.iter().enumerate() {
            full[j] = g[k];
        }
        Ok(full)
    }
}

/// Result of the normalized-frame iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct Iteration<T> {
    pub params: ShapeParams<T>,
    pub iterations: usize,
    pub converged: bool,
    /// `||g|| / ||V||` of the last computed step.
    pub last_step_ratio: T,
    /// `||L||^2` after every accepted update, starting with the initial value.
    pub cost_history: Vec<T>,
}

fn add_step<T: Real>(v: &ShapeParams<T>, g: &[T; 6], t: T) -> ShapeParams<T> {
    let mut a = v.to_array();
    for j in 0..6 {
        if v.free.is_free(j) {
            a[j] = a[j] + t * g[j];
        }
    }
    ShapeParams::from_array(a, v.free)
}

fn admissible<T: Real>(v: &ShapeParams<T>) -> bool {
    v.is_finite() && v.m_x > T::zero() && v.m_y > T::zero()
}

/// Runs Gauss-Newton from `initial` in whatever frame `problem`'s points are in.
pub fn gauss_newton<T: Real>(
    problem: &Problem<'_, T>,
    config: &FitConfig<T>,
    initial: ShapeParams<T>,
) -> Result<Iteration<T>> {
    let mut v = initial;
    let mut cost = problem.cost(&v)?;
    let mut history = vec![cost];
    let mut converged = false;
    let mut iterations = 0;
    let mut last_ratio = T::infinity();

    while iterations < config.max_iter {
        iterations += 1;
        let g = problem.step(&v, config.jacobian)?;
        let g_norm = g.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
        let v_norm = v.norm();
        last_ratio = if v_norm > T::zero() {
            g_norm / v_norm
        } else {
            T::infinity()
        };
        if !g_norm.is_finite() {
            return Err(FitError::NonFinite);
        }

        if g_norm < config.eps * v_norm {
            converged = true;
            // take the final sub-tolerance step when it does not hurt
            let trial = add_step(&v, &g, T::one());
            if admissible(&trial) {
                if let Ok(c) = problem.cost(&trial) {
                    if c <= cost {
                        v = trial;
                        cost = c;
                        history.push(cost);
                    }
                }
            }
            break;
        }

        let mut accepted = false;
        let mut t = T::one();
        for _ in 0..=config.damping {
            let trial = add_step(&v, &g, t);
            if admissible(&trial) {
                if let Ok(c) = problem.cost(&trial) {
                    if config.damping == 0 || c <= cost {
                        v = trial;
                        cost = c;
                        accepted = true;
                        break;
                    }
                }
            }
            t = t / T::lit(2.0);
        }
        if !accepted {
            break;
        }
        history.push(cost);
    }

    Ok(Iteration {
        params: v,
        iterations,
        converged,
        last_step_ratio: last_ratio,
        cost_history: history,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult<T> {
    pub family: Family,
    /// Parameters in the input frame.
    pub params: ShapeParams<T>,
    /// `sqrt(mean ||L_i||^2)` in the input frame.
    pub rmse: T,
    pub iterations: usize,
    pub converged: bool,
    pub last_step_ratio: T,
    pub residuals: Vec<Point2<T>>,
    pub normalization: NormalizationRecord<T>,
    pub warnings: Vec<String>,
}

/// Full pipeline: preprocess, pick the cheapest starting point, iterate, restore.
pub fn gauss_newton_fit<T: Real>(
    points: &PointSet<T>,
    spec: &UnitShapeSpec<T>,
    config: &FitConfig<T>,
    lambda: LambdaPolicy<T>,
) -> Result<FitResult<T>> {
    let mask = lambda.mask();
    config.validate(mask.count())?;
    let needed = config.min_points_for(mask.count());
    if points.len() < needed {
        return Err(FitError::TooFewPoints {
            needed,
            got: points.len(),
        });
    }
    let (normalized, record, alpha0) = preprocess(points)?;
    let candidates = initial_candidates(normalized.points(), spec, alpha0, lambda, config.starts);
    let shear_zero = candidates[0].shear_fixed_zero();

    let problem = Problem::new(normalized.points(), *spec, shear_zero);
    let mut initial = candidates[0];
    let mut best = problem.cost(&initial)?;
    for c in &candidates[1..] {
        if let Ok(cost) = problem.cost(c) {
            if cost < best {
                best = cost;
                initial = *c;
            }
        }
    }
    let it = gauss_newton(&problem, config, initial)?;

    let params = restore(&it.params, &record);
    let original = Problem::new(points.points(), *spec, shear_zero);
    let residuals = original.residuals(&params)?;
    let n = T::from_usize_lossy(residuals.len());
    let rmse = (residuals.iter().fold(T::zero(), |acc, l| acc + l.norm_sq()) / n).sqrt();

    let mut warnings = Vec::new();
    if !it.converged {
        warnings.push(format!(
            "not converged after {} iterations (last step ratio {:e})",
            it.iterations,
            it.last_step_ratio.as_f64()
        ));
    }
    let centroid_hits = points.iter().filter(|&&p| p == params.centroid()).count();
    if centroid_hits > 0 {
        warnings.push(format!(
            "{centroid_hits} point(s) on the fitted centroid were skipped"
        ));
    }

    Ok(FitResult {
        family: spec.family,
        params,
        rmse,
        iterations: it.iterations,
        converged: it.converged,
        last_step_ratio: it.last_step_ratio,
        residuals,
        normalization: record,
        warnings,
    })
}

/// Convenience wrapper taking a family instead of a spec.
pub fn fit<T: Real>(
    points: &PointSet<T>,
    family: Family,
    config: &FitConfig<T>,
    lambda: LambdaPolicy<T>,
) -> Result<FitResult<T>> {
    gauss_newton_fit(points, &UnitShapeSpec::new(family), config, lambda)
}
