//! Trigonometric unit-shape curves.
//!
//! Every supported family is a closed curve `P(phi)` of the form
//!
//! ```text
//! g(phi)  = a + b / (cos(E phi) + 1.08) - c / (cos(2 E phi) + 2)
//! p_x     = S (cos(phi) g(phi) - d cos((E - 1) phi))
//! p_y     = S (sin(phi) g(phi) + d sin((E - 1) phi))
//! ```
//!
//! which approximates the regular E-gon whose incircle has diameter 1
//! (apothem 0.5, an edge midpoint on the +x axis). The circle row collapses
//! to `(cos phi, sin phi) / 2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{point_segment_distance, Point2};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Triangle,
    Square,
    Pentagon,
    Hexagon,
    /// Circle unit shape; scaled by `M` it covers every ellipse.
    #[serde(alias = "circle")]
    Ellipse,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Triangle,
        Family::Square,
        Family::Pentagon,
        Family::Hexagon,
        Family::Ellipse,
    ];

    pub const POLYGONS: [Family; 4] = [
        Family::Triangle,
        Family::Square,
        Family::Pentagon,
        Family::Hexagon,
    ];

    /// Side count, `None` for the ellipse.
    pub fn sides(self) -> Option<u32> {
        match self {
            Family::Triangle => Some(3),
            Family::Square => Some(4),
            Family::Pentagon => Some(5),
            Family::Hexagon => Some(6),
            Family::Ellipse => None,
        }
    }

    pub fn is_polygon(self) -> bool {
        self.sides().is_some()
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Triangle => "triangle",
            Family::Square => "square",
            Family::Pentagon => "pentagon",
            Family::Hexagon => "hexagon",
            Family::Ellipse => "ellipse",
        }
    }

    pub fn spec<T: Real>(self) -> UnitShapeSpec<T> {
        UnitShapeSpec::new(self)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownFamily(pub String);

impl fmt::Display for UnknownFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown shape family `{}` (expected triangle, square, pentagon, hexagon or ellipse)",
            self.0
        )
    }
}

impl std::error::Error for UnknownFamily {}

impl FromStr for Family {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "triangle" => Ok(Family::Triangle),
            "square" | "rectangle" => Ok(Family::Square),
            "pentagon" => Ok(Family::Pentagon),
            "hexagon" => Ok(Family::Hexagon),
            "ellipse" | "circle" => Ok(Family::Ellipse),
            _ => Err(UnknownFamily(s.to_string())),
        }
    }
}

/// Constants `(a, b, c, d, S)` of the unit-shape curve, per family.
const fn coefficients(family: Family) -> [f64; 5] {
    match family {
        Family::Triangle => [17.0, 0.14, 0.42, 5.0, 1.0 / 24.0],
        Family::Square => [15.0, 0.105, 0.21, 2.0, 1.0 / 26.0],
        Family::Pentagon => [13.0, 0.065, 0.13, 1.0, 1.0 / 24.0],
        Family::Hexagon => [10.0, 0.0375, 0.0675, 0.5, 1.0 / 19.0],
        Family::Ellipse => [1.0, 0.0, 0.0, 0.0, 0.5],
    }
}

/// One row of the unit-shape constant table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitShapeSpec<T> {
    pub family: Family,
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub s: T,
    /// Side count E; 0 for the ellipse, where every E-dependent term vanishes.
    pub sides: u32,
}

impl<T: Real> UnitShapeSpec<T> {
    pub fn new(family: Family) -> Self {
        let [a, b, c, d, s] = coefficients(family);
        Self {
            family,
            a: T::lit(a),
            b: T::lit(b),
            c: T::lit(c),
            d: T::lit(d),
            s: T::lit(s),
            sides: family.sides().unwrap_or(0),
        }
    }

    /// `w = a / d`, the ratio driving the cos(phi) polynomial. Undefined for the ellipse.
    pub fn w(&self) -> T {
        self.a / self.d
    }

    #[inline]
    fn e(&self) -> T {
        T::from_u32(self.sides).expect("small integer")
    }

    /// Radial modulation `g(phi)` and its derivative.
    #[inline]
    fn modulation(&self, phi: T) -> (T, T) {
        if self.family == Family::Ellipse {
            return (self.a, T::zero());
        }
        let e = self.e();
        let two = T::lit(2.0);
        let (s1, c1) = (e * phi).sin_cos();
        let (s2, c2) = (two * e * phi).sin_cos();
        let den1 = c1 + T::lit(1.08);
        let den2 = c2 + two;
        let g = self.a + self.b / den1 - self.c / den2;
        let dg = self.b * e * s1 / (den1 * den1) - self.c * two * e * s2 / (den2 * den2);
        (g, dg)
    }

    /// Point on the unit-shape curve at angle parameter `phi`.
    pub fn point(&self, phi: T) -> Point2<T> {
        let (g, _) = self.modulation(phi);
        let (s, c) = phi.sin_cos();
        if self.family == Family::Ellipse {
            return Point2::new(self.s * c * g, self.s * s * g);
        }
        let (sm, cm) = ((self.e() - T::one()) * phi).sin_cos();
        Point2::new(
            self.s * (c * g - self.d * cm),
            self.s * (s * g + self.d * sm),
        )
    }

    /// Analytic derivative `dP/dphi`.
    pub fn dphi(&self, phi: T) -> Point2<T> {
        let (g, dg) = self.modulation(phi);
        let (s, c) = phi.sin_cos();
        if self.family == Family::Ellipse {
            return Point2::new(-self.s * s * g, self.s * c * g);
        }
        let em = self.e() - T::one();
        let (sm, cm) = (em * phi).sin_cos();
        Point2::new(
            self.s * (-s * g + c * dg + self.d * em * sm),
            self.s * (c * g + s * dg + self.d * em * cm),
        )
    }
}

/// Vertices of the regular `sides`-gon with apothem 0.5 and an edge midpoint on +x.
pub fn ideal_polygon_vertices<T: Real>(sides: u32) -> Vec<Point2<T>> {
    let e = T::from_u32(sides).expect("small integer");
    let half = T::PI() / e;
    let radius = T::lit(0.5) / half.cos();
    (0..sides)
        .map(|k| {
            let ang = half + T::TAU() * T::from_u32(k).unwrap() / e;
            Point2::new(radius * ang.cos(), radius * ang.sin())
        })
        .collect()
}

/// Exact distance from `p` to the boundary of the ideal unit polygon.
pub fn ideal_polygon_distance<T: Real>(sides: u32, p: Point2<T>) -> T {
    let verts = ideal_polygon_vertices::<T>(sides);
    (0..verts.len())
        .map(|i| point_segment_distance(p, verts[i], verts[(i + 1) % verts.len()]))
        .fold(T::infinity(), T::min)
}

/// RMS and maximum deviation of the unit-shape curve from the ideal shape,
/// sampled at `n_samples` uniformly spaced angles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fidelity<T> {
    pub rmse: T,
    pub max_deviation: T,
}

pub fn unit_shape_fidelity<T: Real>(spec: &UnitShapeSpec<T>, n_samples: usize) -> Fidelity<T> {
    assert!(n_samples >= 100, "fidelity needs at least 100 samples");
    let n = T::from_usize_lossy(n_samples);
    let half = T::lit(0.5);
    let mut sum_sq = T::zero();
    let mut max_dev = T::zero();
    for j in 0..n_samples {
        let phi = T::TAU() * T::from_usize_lossy(j) / n;
        let dist = match spec.family.sides() {
            Some(e) => ideal_polygon_distance(e, spec.point(phi)),
            // the circle is the polar curve r = S g(phi)
            None => (spec.s * spec.modulation(phi).0 - half).abs(),
        };
        sum_sq = sum_sq + dist * dist;
        max_dev = max_dev.max(dist);
    }
    Fidelity {
        rmse: (sum_sq / n).sqrt(),
        max_deviation: max_dev,
    }
}
