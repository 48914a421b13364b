//! Fit report file: a flat JSON object with full-precision numbers.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fitter::{FitResult, NormalizationRecord};
use crate::shape_model::{FreeMask, ShapeParams};
use crate::unit_shape::Family;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("invalid report: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub family: Family,
    pub x_c: f64,
    pub y_c: f64,
    pub m_x: f64,
    pub m_y: f64,
    /// Radians.
    pub alpha: f64,
    pub lambda: f64,
    pub lambda_free: bool,
    pub rmse: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default)]
    pub last_step_ratio: Option<f64>,
    pub norm_x_mean: f64,
    pub norm_y_mean: f64,
    pub norm_d_rms: f64,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl FitReport {
    pub fn from_fit(fit: &FitResult<f64>) -> Self {
        let p = &fit.params;
        Self {
            family: fit.family,
            x_c: p.x_c,
            y_c: p.y_c,
            m_x: p.m_x,
            m_y: p.m_y,
            alpha: p.alpha,
            lambda: p.lambda,
            lambda_free: p.free.lambda_free(),
            rmse: fit.rmse,
            iterations: fit.iterations,
            converged: fit.converged,
            last_step_ratio: fit
                .last_step_ratio
                .is_finite()
                .then_some(fit.last_step_ratio),
            norm_x_mean: fit.normalization.x_mean,
            norm_y_mean: fit.normalization.y_mean,
            norm_d_rms: fit.normalization.d_rms,
            warnings: fit.warnings.clone(),
        }
    }

    /// A report describing known parameters (no fit statistics).
    pub fn from_params(family: Family, params: &ShapeParams<f64>) -> Self {
        Self {
            family,
            x_c: params.x_c,
            y_c: params.y_c,
            m_x: params.m_x,
            m_y: params.m_y,
            alpha: params.alpha,
            lambda: params.lambda,
            lambda_free: params.free.lambda_free(),
            rmse: 0.0,
            iterations: 0,
            converged: true,
            last_step_ratio: None,
            norm_x_mean: 0.0,
            norm_y_mean: 0.0,
            norm_d_rms: 1.0,
            warnings: Vec::new(),
        }
    }

    pub fn params(&self) -> ShapeParams<f64> {
        let mask = if self.lambda_free {
            FreeMask::default()
        } else {
            FreeMask::shear_fixed()
        };
        ShapeParams::new(
            self.x_c,
            self.y_c,
            self.m_x,
            self.m_y,
            self.alpha,
            self.lambda,
        )
        .with_free(mask)
    }

    pub fn normalization(&self) -> NormalizationRecord<f64> {
        NormalizationRecord {
            x_mean: self.norm_x_mean,
            y_mean: self.norm_y_mean,
            d_rms: self.norm_d_rms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, ReportError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), ReportError> {
        let mut s = self.to_json();
        s.push('\n');
        std::fs::write(path, s)?;
        Ok(())
    }

    /// Table-style rounded summary: three decimals, angle in degrees.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let lambda = if self.lambda_free || self.lambda != 0.0 {
            format!("{:.3}", self.lambda)
        } else {
            "/".to_string()
        };
        writeln!(
            s,
            "{:<9} x_c={:.3} y_c={:.3} m_x={:.3} m_y={:.3} alpha={:.2}deg lambda={} rmse={:.3}",
            self.family.name(),
            self.x_c,
            self.y_c,
            self.m_x,
            self.m_y,
            self.alpha.to_degrees(),
            lambda,
            self.rmse
        )
        .unwrap();
        write!(
            s,
            "iterations={} converged={}",
            self.iterations, self.converged
        )
        .unwrap();
        for w in &self.warnings {
            write!(s, "\nwarning: {w}").unwrap();
        }
        s
    }
}
