//! Correspondence angle `phi` for a data point under the current shape parameters.
//!
//! A data point at polar angle `theta` (measured in the shape's rotated frame)
//! is matched to the unit-shape point that points the same way once scaled and
//! sheared by `M`. Ellipses have a closed form. Polygons use the d-term
//! approximation of the unit curve, whose squared direction condition is a
//! polynomial in `c = cos(phi)` after Chebyshev substitution:
//!
//! ```text
//! (r^2 + 1) (w c - T_{E-1}(c))^2 + 2 w T_E(c) - w^2 - 1 = 0,   r = p_y / p_x,  w = a / d
//! ```
//!
//! Dividing by `r^2 + 1` and writing `k = 1 / (r^2 + 1)` gives
//! `h(c)^2 + k g(c) = 0` with `h = w c - T_{E-1}` and `g = 2 w T_E - w^2 - 1 < 0`,
//! which stays finite when `cos(theta) = 0`. Its two roots in `[-1, 1]` are
//! the roots of the unsquared branches `h(c) = -/+ sqrt(-k g(c))`.

use crate::chebyshev::{chebyshev_t, Poly};
use crate::error::{FitError, Result};
use crate::geometry::Point2;
use crate::scalar::{sign_nonneg, wrap_angle, Real};
use crate::shape_model::ShapeParams;
use crate::unit_shape::{Family, UnitShapeSpec};

/// Polar angle of `point` around the shape centroid, relative to the shape
/// orientation, in `(-pi, pi]`.
pub fn theta_of<T: Real>(point: Point2<T>, params: &ShapeParams<T>) -> Result<T> {
    let dx = point.x - params.x_c;
    let dy = point.y - params.y_c;
    if dx == T::zero() && dy == T::zero() {
        return Err(FitError::CoincidentPoint);
    }
    Ok(wrap_angle(dy.atan2(dx) - params.alpha))
}

/// Direction of the data point pulled back through `M`, i.e. the direction of
/// the matching unit-shape point. For positive scales its x sign is the sign
/// of `cos(theta)` and its y sign that of `sin(theta - atan(lambda m_y / m_x))`.
#[inline]
pub fn unit_direction<T: Real>(theta: T, params: &ShapeParams<T>) -> Point2<T> {
    let (mut s, c) = theta.sin_cos();
    if theta.abs() == T::PI() {
        s = T::zero();
    }
    Point2::new(
        c / params.m_x,
        s / params.m_y - params.lambda * c / params.m_x,
    )
}

#[inline]
fn k_of_direction<T: Real>(q: Point2<T>) -> T {
    let n = q.norm_sq();
    if n == T::zero() {
        T::one()
    } else {
        q.x * q.x / n
    }
}

/// `r = p_y / p_x = -lambda + tan(theta) m_x / m_y`.
pub fn ratio_r<T: Real>(theta: T, params: &ShapeParams<T>) -> T {
    -params.lambda + theta.tan() * params.m_x / params.m_y
}

/// The cos(phi) polynomial for one polygon family, pre-expanded in the monomial basis.
#[derive(Clone, Debug)]
pub struct CosPolynomial<T> {
    sides: u32,
    w: T,
    h: Poly<T>,
    dh: Poly<T>,
    g: Poly<T>,
    dg: Poly<T>,
}

impl<T: Real> CosPolynomial<T> {
    pub fn new(sides: u32, w: T) -> Self {
        assert!(
            (3..=6).contains(&sides),
            "polygon families have 3 to 6 sides"
        );
        let h = Poly::x().scale(w).sub(&chebyshev_t(sides - 1));
        let g = chebyshev_t(sides)
            .scale(T::lit(2.0) * w)
            .add(&Poly::constant(-(w * w) - T::one()));
        Self {
            sides,
            w,
            dh: h.derivative(),
            dg: g.derivative(),
            h,
            g,
        }
    }

    pub fn for_spec(spec: &UnitShapeSpec<T>) -> Self {
        Self::new(spec.sides, spec.w())
    }

    pub fn sides(&self) -> u32 {
        self.sides
    }

    pub fn w(&self) -> T {
        self.w
    }

    /// `h^2 + k g` as an explicit polynomial of degree `2 (E - 1)`.
    pub fn normalized(&self, k: T) -> Poly<T> {
        self.h.mul(&self.h).add(&self.g.scale(k))
    }

    /// Left-hand side of the cos(phi) equation in its `r` form.
    pub fn eval_with_r(&self, c: T, r: T) -> T {
        let h = self.h.eval(c);
        (r * r + T::one()) * h * h + self.g.eval(c)
    }

    /// Residual of the normalized equation at `c`.
    pub fn residual(&self, c: T, k: T) -> T {
        let h = self.h.eval(c);
        h * h + k * self.g.eval(c)
    }

    #[inline]
    fn branch(&self, c: T, k: T, sign: T) -> (T, T) {
        let h = self.h.eval(c);
        let neg_g = (-self.g.eval(c)).max(T::zero());
        let root = (k * neg_g).sqrt();
        let f = h - sign * root;
        let mut df = self.dh.eval(c);
        if root > T::zero() {
            df = df + sign * k * self.dg.eval(c) / (T::lit(2.0) * root);
        }
        (f, df)
    }

    /// Root in `[-1, 1]` of the branch `h(c) = sign * sqrt(-k g(c))`;
    /// `sign = -1` gives the smaller root `c0`, `+1` the larger `c1`.
    pub fn branch_root(&self, k: T, sign: T) -> Result<T> {
        let one = T::one();
        let eps = T::epsilon();
        let end_tol = T::lit(64.0) * eps * (self.w + one) * (self.w + one);
        let (f_lo, _) = self.branch(-one, k, sign);
        let (f_hi, _) = self.branch(one, k, sign);
        if f_hi.abs() <= end_tol {
            return Ok(one);
        }
        if f_lo.abs() <= end_tol {
            return Ok(-one);
        }
        let (mut neg, mut pos) = if f_lo < T::zero() && f_hi > T::zero() {
            (-one, one)
        } else if f_lo > T::zero() && f_hi < T::zero() {
            (one, -one)
        } else {
            match self.scan_bracket(k, sign) {
                Some(b) => b,
                None => return Err(FitError::RootFailure { found: 0 }),
            }
        };

        let mut x = (sign * k.sqrt()).max(neg.min(pos)).min(neg.max(pos));
        for _ in 0..200 {
            let (f, df) = self.branch(x, k, sign);
            if f == T::zero() {
                return Ok(x);
            }
            if f < T::zero() {
                neg = x;
            } else {
                pos = x;
            }
            let (lo, hi) = (neg.min(pos), neg.max(pos));
            let newton = x - f / df;
            let next = if df != T::zero() && newton > lo && newton < hi {
                newton
            } else {
                (lo + hi) / T::lit(2.0)
            };
            if (next - x).abs() <= T::lit(2.0) * eps * x.abs().max(one) || hi - lo <= eps {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }

    /// Sign-change bracket on a uniform 2000-point grid, used when the
    /// endpoint values do not bracket (only seen with extreme rounding).
    fn scan_bracket(&self, k: T, sign: T) -> Option<(T, T)> {
        let n = 2000usize;
        let step = T::lit(2.0) / T::from_usize_lossy(n);
        let mut prev_c = -T::one();
        let mut prev = self.branch(prev_c, k, sign).0;
        for j in 1..=n {
            let c = -T::one() + step * T::from_usize_lossy(j);
            let f = self.branch(c, k, sign).0;
            if (prev < T::zero()) != (f < T::zero()) {
                return Some(if prev < T::zero() {
                    (prev_c, c)
                } else {
                    (c, prev_c)
                });
            }
            prev_c = c;
            prev = f;
        }
        None
    }

    /// Both roots `(c0, c1)` with `c0 <= c1` for a given `k = 1 / (r^2 + 1)`.
    pub fn roots_k(&self, k: T) -> Result<(T, T)> {
        let found = |r: &Result<T>| usize::from(r.is_ok());
        let c0 = self.branch_root(k, -T::one());
        let c1 = self.branch_root(k, T::one());
        match (c0, c1) {
            (Ok(a), Ok(b)) => Ok((a.min(b), a.max(b))),
            (a, b) => Err(FitError::RootFailure {
                found: found(&a) + found(&b),
            }),
        }
    }

    /// Newton refinement of `phi` directly on the approximated curve, so the
    /// angle is accurate near `cos(phi) = +/-1` where `acos` loses digits.
    fn polish(&self, q: Point2<T>, mut phi: T) -> T {
        let n = q.norm();
        if n == T::zero() {
            return phi;
        }
        let (ux, uy) = (q.x / n, q.y / n);
        let em = T::from_u32(self.sides - 1).unwrap();
        let step_cap = T::lit(1e-3);
        for _ in 0..2 {
            let (s, c) = phi.sin_cos();
            let (sm, cm) = (em * phi).sin_cos();
            let px = self.w * c - cm;
            let py = self.w * s + sm;
            let dpx = -self.w * s + em * sm;
            let dpy = self.w * c + em * cm;
            let g = ux * py - uy * px;
            let dg = ux * dpy - uy * dpx;
            if dg <= T::zero() {
                break;
            }
            let delta = g / dg;
            if !delta.is_finite() || delta.abs() > step_cap {
                break;
            }
            phi = phi - delta;
            if delta.abs() <= T::epsilon() {
                break;
            }
        }
        phi
    }
}

/// Roots `(c0, c1)` of the cos(phi) polynomial for `E` sides, `w = a / d`
/// and ratio `r`; an infinite `r` (data point straight up the local y axis)
/// is the `k = 0` limit.
pub fn polygon_cos_roots<T: Real>(sides: u32, w: T, r: T) -> Result<(T, T)> {
    let k = if r.is_infinite() {
        T::zero()
    } else {
        T::one() / (r * r + T::one())
    };
    CosPolynomial::new(sides, w).roots_k(k)
}

/// Picks `c0` on the far side (`cos(theta) < 0`) and `c1` otherwise, then
/// signs `acos` by which side of the sheared x axis the point lies on.
pub fn phi_polygon<T: Real>(c0: T, c1: T, theta: T, params: &ShapeParams<T>) -> T {
    let q = unit_direction(theta, params);
    let ct = if q.x < T::zero() { c0 } else { c1 };
    sign_nonneg(q.y) * ct.max(-T::one()).min(T::one()).acos()
}

const RECT_P1: f64 = 15.625;
const RECT_P2: f64 = 5.24609375;
const RECT_P4: f64 = 0.2786875;

/// `17 sqrt(16000) / 256`, the exact value behind the rounded 8.3998.
fn rect_p3<T: Real>() -> T {
    T::lit(17.0) * T::lit(16000.0).sqrt() / T::lit(256.0)
}

/// `x = cos^2(phi)` for the square unit shape with zero shear, from the
/// Cardano form of `x^3 + (7.5k - 5.25) x^2 + (6.890625 - 7.5k) x - 2.640625k = 0`,
/// followed by Newton steps on the same cubic to undo cube-root cancellation.
pub fn rectangle_cos_sq<T: Real>(k: T) -> T {
    let half = T::lit(0.5);
    let km = k - half;
    let q1 = T::lit(RECT_P1) * km * km * km - T::lit(RECT_P2) * km;
    let under = ((k * k - k) * (k - k * k - T::lit(RECT_P4))).max(T::zero());
    let q2 = rect_p3::<T>() * under.sqrt();
    let mut x = T::lit(1.75) - T::lit(2.5) * k - (q1 + q2).cbrt() - (q1 - q2).cbrt();
    x = x.max(T::zero()).min(T::one());

    let a2 = T::lit(7.5) * k - T::lit(5.25);
    let a1 = T::lit(6.890625) - T::lit(7.5) * k;
    let a0 = -T::lit(2.640625) * k;
    for _ in 0..3 {
        let f = ((x + a2) * x + a1) * x + a0;
        let df = (T::lit(3.0) * x + T::lit(2.0) * a2) * x + a1;
        if df == T::zero() {
            break;
        }
        let next = (x - f / df).max(T::zero()).min(T::one());
        if next == x {
            break;
        }
        x = next;
    }
    x
}

/// Closed-form angle for squares and rectangles (zero shear).
pub fn phi_rectangle_fast<T: Real>(theta: T, params: &ShapeParams<T>) -> T {
    let q = unit_direction(theta, params);
    let c1 = rectangle_cos_sq(k_of_direction(q)).sqrt();
    // sgn(tan theta) acos(c1) + sgn(sin theta) stp(cos theta) pi, with the
    // negative x axis mapped to +pi
    sign_nonneg(q.y) * (sign_nonneg(q.x) * c1).acos()
}

/// Ellipse angle: `atan((m_x / m_y) tan(theta))` unwrapped to the data
/// point's half plane, generalised to any shear.
pub fn phi_ellipse<T: Real>(theta: T, params: &ShapeParams<T>) -> T {
    let q = unit_direction(theta, params);
    let phi = q.y.atan2(q.x);
    if phi == -T::PI() {
        T::PI()
    } else {
        phi
    }
}

#[derive(Clone, Debug)]
enum Method<T> {
    Ellipse,
    Polygon(CosPolynomial<T>),
    Rectangle(CosPolynomial<T>),
}

/// Family-dispatching angle solver used by the fitter.
#[derive(Clone, Debug)]
pub struct PhiSolver<T> {
    method: Method<T>,
}

impl<T: Real> PhiSolver<T> {
    /// `shear_fixed_zero` enables the closed-form rectangle path for squares.
    pub fn new(spec: &UnitShapeSpec<T>, shear_fixed_zero: bool) -> Self {
        let method = match spec.family {
            Family::Ellipse => Method::Ellipse,
            Family::Square if shear_fixed_zero => Method::Rectangle(CosPolynomial::for_spec(spec)),
            _ => Method::Polygon(CosPolynomial::for_spec(spec)),
        };
        Self { method }
    }

    pub fn uses_rectangle_fast_path(&self) -> bool {
        matches!(self.method, Method::Rectangle(_))
    }

    pub fn phi_from_theta(&self, theta: T, params: &ShapeParams<T>) -> Result<T> {
        if !matches!(self.method, Method::Ellipse) {
            // every unit curve is mirror-symmetric about its x axis
            let q = unit_direction(theta, params);
            if q.y == T::zero() && q.x != T::zero() {
                return Ok(if q.x > T::zero() { T::zero() } else { T::PI() });
            }
        }
        let phi = match &self.method {
            Method::Ellipse => phi_ellipse(theta, params),
            Method::Rectangle(poly) => {
                let q = unit_direction(theta, params);
                poly.polish(q, phi_rectangle_fast(theta, params))
            }
            Method::Polygon(poly) => {
                let q = unit_direction(theta, params);
                let k = k_of_direction(q);
                let sign = sign_nonneg(q.x);
                let c = poly.branch_root(k, sign)?;
                let phi = sign_nonneg(q.y) * c.max(-T::one()).min(T::one()).acos();
                poly.polish(q, phi)
            }
        };
        if phi.is_finite() {
            Ok(phi)
        } else {
            Err(FitError::NonFinite)
        }
    }

    pub fn phi(&self, point: Point2<T>, params: &ShapeParams<T>) -> Result<T> {
        self.phi_from_theta(theta_of(point, params)?, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn params(m_x: f64, m_y: f64, alpha: f64, lambda: f64) -> ShapeParams<f64> {
        ShapeParams::new(0.0, 0.0, m_x, m_y, alpha, lambda)
    }

    #[test]
    fn theta_examples() {
        let p = ShapeParams::new(3.0, -2.0, 1.0, 1.0, 0.0, 0.0);
        assert_abs_diff_eq!(theta_of(Point2::new(4.0, -2.0), &p).unwrap(), 0.0);
        assert_abs_diff_eq!(theta_of(Point2::new(2.0, -2.0), &p).unwrap(), PI);
        let rotated = ShapeParams {
            alpha: FRAC_PI_4,
            ..p
        };
        assert_abs_diff_eq!(
            theta_of(Point2::new(4.0, -1.0), &rotated).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_eq!(
            theta_of(Point2::new(3.0, -2.0), &p),
            Err(FitError::CoincidentPoint)
        );
    }

    #[test]
    fn square_roots_at_axis_and_diagonal() {
        let (c0, c1) = polygon_cos_roots(4, 7.5, 0.0).unwrap();
        assert_abs_diff_eq!(c0, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c1, 1.0, epsilon = 1e-15);
        let (c0, c1) = polygon_cos_roots(4, 7.5, 1.0).unwrap();
        assert_abs_diff_eq!(c0, -0.5f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(c1, 0.5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn infinite_ratio_is_double_root() {
        // k = 0: h(c) = 0, i.e. 7.5 c = 4c^3 - 3c -> c = 0 for the square
        let (c0, c1) = polygon_cos_roots(4, 7.5, f64::INFINITY).unwrap();
        assert_abs_diff_eq!(c0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c1, 0.0, epsilon = 1e-15);
        // triangle: 2c^2 - 3.4c - 1 = 0
        let expected = (3.4 - (3.4f64 * 3.4 + 8.0).sqrt()) / 4.0;
        let (c0, c1) = polygon_cos_roots(3, 3.4, f64::INFINITY).unwrap();
        assert_abs_diff_eq!(c0, expected, epsilon = 1e-14);
        assert_abs_diff_eq!(c1, expected, epsilon = 1e-14);
    }

    #[test]
    fn phi_polygon_examples() {
        let p = params(1.0, 1.0, 0.0, 0.0);
        assert_eq!(phi_polygon(-1.0, 1.0, 0.0, &p), 0.0);
        let h = 0.5f64.sqrt();
        assert_abs_diff_eq!(
            phi_polygon(-h, h, FRAC_PI_4, &p),
            FRAC_PI_4,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            phi_polygon(-h, h, 3.0 * FRAC_PI_4, &p),
            3.0 * FRAC_PI_4,
            epsilon = 1e-15
        );
        // the negative x axis maps to +pi
        assert_abs_diff_eq!(phi_polygon(-1.0, 1.0, PI, &p), PI);
    }

    #[test]
    fn rectangle_fast_examples() {
        let p = params(1.0, 1.0, 0.0, 0.0);
        assert_eq!(rectangle_cos_sq(1.0), 1.0);
        assert_eq!(phi_rectangle_fast(0.0, &p), 0.0);
        assert_abs_diff_eq!(
            phi_rectangle_fast(FRAC_PI_4, &p),
            FRAC_PI_4,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(phi_rectangle_fast(PI, &p), PI);
        assert_abs_diff_eq!(phi_rectangle_fast(PI / 2.0, &p), PI / 2.0, epsilon = 1e-7);
        assert_abs_diff_eq!(phi_rectangle_fast(-PI / 2.0, &p), -PI / 2.0, epsilon = 1e-7);
    }

    #[test]
    fn ellipse_examples() {
        let p = params(1.0, 1.0, 0.0, 0.0);
        assert_eq!(phi_ellipse(0.0, &p), 0.0);
        assert_abs_diff_eq!(
            phi_ellipse(3.0 * FRAC_PI_4, &p),
            3.0 * FRAC_PI_4,
            epsilon = 1e-15
        );
        assert_eq!(phi_ellipse(PI, &p), PI);
        assert_eq!(phi_ellipse(-PI, &p), PI);
        let stretched = params(2.0, 1.0, 0.0, 0.0);
        assert_abs_diff_eq!(
            phi_ellipse(FRAC_PI_4, &stretched),
            2f64.atan(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(phi_ellipse(PI / 2.0, &stretched), PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn solver_dispatch() {
        let sq = UnitShapeSpec::<f64>::new(Family::Square);
        assert!(PhiSolver::new(&sq, true).uses_rectangle_fast_path());
        assert!(!PhiSolver::new(&sq, false).uses_rectangle_fast_path());
        let tri = UnitShapeSpec::<f64>::new(Family::Triangle);
        assert!(!PhiSolver::new(&tri, true).uses_rectangle_fast_path());
    }
}
