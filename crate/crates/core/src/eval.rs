//! Comparison of a fitted shape against ground truth.

use std::fmt::Write as _;

use thiserror::Error;

use crate::shape_model::{
    angle_delta, canonicalize, hausdorff_distance, is_regular, symmetry_period, ShapeParams,
    HAUSDORFF_SAMPLES,
};
use crate::unit_shape::{Family, UnitShapeSpec};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("family mismatch: fit is {fit}, truth is {truth}")]
    FamilyMismatch { fit: Family, truth: Family },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub center: f64,
    pub scale: f64,
    /// Degrees.
    pub angle: f64,
    pub hausdorff: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            center: 0.1,
            scale: 0.2,
            angle: 1.0,
            hausdorff: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub family: Family,
    /// Canonical fit minus canonical truth: `x_c, y_c, m_x, m_y, alpha (deg), lambda`.
    pub deltas: [f64; 6],
    pub centroid_error: f64,
    pub hausdorff: f64,
    /// Symmetry period applied to `alpha`, degrees (0 for circles).
    pub alpha_period_deg: f64,
    pub pass: bool,
}

/// Compares `fit` with `truth` after symmetry canonicalization of both.
pub fn compare(
    family_fit: Family,
    fit: &ShapeParams<f64>,
    family_truth: Family,
    truth: &ShapeParams<f64>,
    tol: &Tolerances,
) -> Result<Comparison, EvalError> {
    if family_fit != family_truth {
        return Err(EvalError::FamilyMismatch {
            fit: family_fit,
            truth: family_truth,
        });
    }
    let family = family_truth;
    let cf = canonicalize(fit, family);
    let ct = canonicalize(truth, family);
    let regular = is_regular(&ct, 1e-9);
    let period = symmetry_period::<f64>(family, regular);
    let deltas = [
        cf.x_c - ct.x_c,
        cf.y_c - ct.y_c,
        cf.m_x - ct.m_x,
        cf.m_y - ct.m_y,
        angle_delta(cf.alpha, ct.alpha, period).to_degrees(),
        cf.lambda - ct.lambda,
    ];
    let spec = UnitShapeSpec::<f64>::new(family);
    let hausdorff = hausdorff_distance(fit, &spec, truth, &spec, HAUSDORFF_SAMPLES);
    let centroid_error = deltas[0].hypot(deltas[1]);
    let pass = deltas[0].abs() <= tol.center
        && deltas[1].abs() <= tol.center
        && deltas[2].abs() <= tol.scale
        && deltas[3].abs() <= tol.scale
        && deltas[4].abs() <= tol.angle
        && tol.hausdorff.is_none_or(|h| hausdorff <= h);
    Ok(Comparison {
        family,
        deltas,
        centroid_error,
        hausdorff,
        alpha_period_deg: period.to_degrees(),
        pass,
    })
}

impl Comparison {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let names = ["x_c", "y_c", "m_x", "m_y", "alpha_deg", "lambda"];
        writeln!(s, "family: {}", self.family).unwrap();
        for (n, d) in names.iter().zip(self.deltas) {
            writeln!(s, "delta {n:<9} {d:+.9}").unwrap();
        }
        writeln!(s, "centroid error  {:.9}", self.centroid_error).unwrap();
        writeln!(s, "hausdorff       {:.9}", self.hausdorff).unwrap();
        write!(s, "result: {}", if self.pass { "PASS" } else { "FAIL" }).unwrap();
        s
    }
}
