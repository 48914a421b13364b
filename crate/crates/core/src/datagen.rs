//! Synthetic test data: the eleven reference shapes, Gaussian noise and
//! gap injection near polygon vertices / on one side of ellipses.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{FitError, Result};
use crate::fitter::LambdaPolicy;
use crate::geometry::{Point2, PointSet};
use crate::phi_solver::PhiSolver;
use crate::scalar::Real;
use crate::shape_model::{boundary_points, FreeMask, ShapeParams};
use crate::unit_shape::{Family, UnitShapeSpec};

/// Default number of samples per shape.
pub const DEFAULT_SAMPLES: usize = 360;
/// Smallest point count `sample_shape` accepts and gap removal may leave.
pub const MIN_SAMPLES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub family: Family,
    pub x_c: f64,
    pub y_c: f64,
    pub m_x: f64,
    pub m_y: f64,
    pub alpha_deg: f64,
    /// True shear; `None` for shapes generated and fitted with zero shear.
    pub lambda: Option<f64>,
    pub description: &'static str,
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

pub const CATALOG: [CatalogEntry; 11] = [
    entry(
        "T0",
        Family::Triangle,
        4.0,
        43.0,
        15.0,
        15.0,
        35.0,
        None,
        "regular triangle",
    ),
    entry(
        "T1",
        Family::Triangle,
        0.0,
        17.0,
        28.0,
        9.0,
        100.0,
        None,
        "isoceles triangle",
    ),
    entry(
        "T2",
        Family::Triangle,
        15.0,
        -4.0,
        15.0,
        9.0,
        270.0,
        Some(SQRT3 / 3.0),
        "right triangle",
    ),
    entry(
        "R0",
        Family::Square,
        32.0,
        39.0,
        19.0,
        19.0,
        -10.0,
        None,
        "square",
    ),
    entry(
        "R1",
        Family::Square,
        33.0,
        4.0,
        8.0,
        41.0,
        50.0,
        None,
        "rectangle",
    ),
    entry(
        "R2",
        Family::Square,
        32.0,
        21.0,
        8.0,
        16.0,
        80.0,
        Some(SQRT3 / 2.0),
        "rhombus",
    ),
    entry(
        "R3",
        Family::Square,
        49.0,
        27.0,
        15.0,
        7.0,
        60.0,
        Some(0.8),
        "parallelogram",
    ),
    entry(
        "H0",
        Family::Hexagon,
        61.0,
        47.0,
        20.0,
        20.0,
        15.0,
        None,
        "regular hexagon",
    ),
    entry(
        "H1",
        Family::Hexagon,
        68.0,
        24.0,
        24.0,
        16.0,
        10.0,
        Some(0.6),
        "hexagon",
    ),
    entry(
        "E0",
        Family::Ellipse,
        52.0,
        8.0,
        8.0,
        12.0,
        20.0,
        None,
        "ellipse",
    ),
    entry(
        "E1",
        Family::Ellipse,
        68.0,
        0.0,
        32.0,
        8.0,
        55.0,
        None,
        "ellipse",
    ),
];

#[allow(clippy::too_many_arguments)]
const fn entry(
    id: &'static str,
    family: Family,
    x_c: f64,
    y_c: f64,
    m_x: f64,
    m_y: f64,
    alpha_deg: f64,
    lambda: Option<f64>,
    description: &'static str,
) -> CatalogEntry {
    CatalogEntry {
        id,
        family,
        x_c,
        y_c,
        m_x,
        m_y,
        alpha_deg,
        lambda,
        description,
    }
}

pub fn catalog_entry(id: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.id.eq_ignore_ascii_case(id))
}

impl CatalogEntry {
    /// Sheared entries are fitted with the shear free; the rest with it fixed at zero.
    pub fn shear_free(&self) -> bool {
        self.lambda.is_some()
    }

    pub fn params<T: Real>(&self) -> ShapeParams<T> {
        let mask = if self.shear_free() {
            FreeMask::default()
        } else {
            FreeMask::shear_fixed()
        };
        ShapeParams::new(
            T::lit(self.x_c),
            T::lit(self.y_c),
            T::lit(self.m_x),
            T::lit(self.m_y),
            T::lit(self.alpha_deg.to_radians()),
            T::lit(self.lambda.unwrap_or(0.0)),
        )
        .with_free(mask)
    }

    pub fn lambda_policy<T: Real>(&self) -> LambdaPolicy<T> {
        if self.shear_free() {
            LambdaPolicy::free()
        } else {
            LambdaPolicy::Fixed(T::zero())
        }
    }

    pub fn spec<T: Real>(&self) -> UnitShapeSpec<T> {
        UnitShapeSpec::new(self.family)
    }
}

/// `n` boundary points of the entry at uniform angle spacing.
pub fn sample_shape<T: Real>(entry: &CatalogEntry, n: usize) -> Result<PointSet<T>> {
    if n < MIN_SAMPLES {
        return Err(FitError::TooFewPoints {
            needed: MIN_SAMPLES,
            got: n,
        });
    }
    Ok(boundary_points(&entry.params(), &entry.spec(), n))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    /// Per-coordinate standard deviation.
    pub sigma: f64,
    pub seed: u64,
}

/// Adds independent zero-mean Gaussian noise to each coordinate.
pub fn add_noise<T: Real>(points: &PointSet<T>, noise: NoiseSpec) -> Result<PointSet<T>> {
    if !(noise.sigma >= 0.0) || !noise.sigma.is_finite() {
        return Err(FitError::InvalidConfig(format!(
            "noise sigma must be finite and non-negative, got {}",
            noise.sigma
        )));
    }
    if noise.sigma == 0.0 {
        return Ok(points.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let normal = Normal::new(0.0, noise.sigma).expect("validated sigma");
    Ok(points.map_points(|p| {
        let dx = normal.sample(&mut rng);
        let dy = normal.sample(&mut rng);
        Point2::new(p.x + T::lit(dx), p.y + T::lit(dy))
    }))
}

/// Boundary comparisons are shifted by this much so grid points that sit
/// exactly on a window edge land on the same side regardless of rounding.
const WINDOW_SLACK: f64 = 1e-9;

/// Drops points near polygon vertices, or one contiguous arc of an ellipse.
///
/// Polygons lose every point whose angle lies in `[v - f pi / E, v + f pi / E)`
/// around each vertex angle `v = pi / E + 2 pi k / E`; ellipses lose
/// `[pi/2 - f pi, pi/2 + f pi)`. Points without recorded angles are located
/// with the entry's own parameters.
pub fn remove_near_vertices<T: Real>(
    points: &PointSet<T>,
    entry: &CatalogEntry,
    fraction: f64,
) -> Result<PointSet<T>> {
    if !(0.0..0.5).contains(&fraction) {
        return Err(FitError::InvalidConfig(format!(
            "gap fraction must lie in [0, 0.5), got {fraction}"
        )));
    }
    if fraction == 0.0 {
        return Ok(points.clone());
    }
    let phi: Vec<f64> = match points.phi() {
        Some(phi) => phi.iter().map(|p| p.as_f64()).collect(),
        None => {
            let params = entry.params::<T>();
            let solver = PhiSolver::new(&entry.spec(), params.shear_fixed_zero());
            points
                .iter()
                .map(|&p| solver.phi(p, &params).map(|v| v.as_f64()))
                .collect::<Result<_>>()?
        }
    };

    let pi = std::f64::consts::PI;
    let in_window =
        |offset: f64, half: f64| offset >= -half - WINDOW_SLACK && offset < half - WINDOW_SLACK;
    let drop = |phi: f64| -> bool {
        match entry.family.sides() {
            Some(e) => {
                let sector = 2.0 * pi / e as f64;
                let d = (phi - pi / e as f64).rem_euclid(sector);
                let offset = if d < sector / 2.0 { d } else { d - sector };
                in_window(offset, fraction * pi / e as f64)
            }
            None => {
                let offset = (phi - pi / 2.0 + pi).rem_euclid(2.0 * pi) - pi;
                in_window(offset, fraction * pi)
            }
        }
    };
    let kept = points.retain_indices(|i| !drop(phi[i]));
    if kept.len() < MIN_SAMPLES {
        return Err(FitError::TooFewPoints {
            needed: MIN_SAMPLES,
            got: kept.len(),
        });
    }
    Ok(kept)
}

/// One synthetic dataset: sample, optionally remove gaps, then add noise.
pub fn generate<T: Real>(
    entry: &CatalogEntry,
    n: usize,
    gap_fraction: f64,
    noise: NoiseSpec,
) -> Result<PointSet<T>> {
    let sampled = sample_shape(entry, n)?;
    let gapped = remove_near_vertices(&sampled, entry, gap_fraction)?;
    add_noise(&gapped, noise)
}
