//! Polygon and ellipse fitting to 2D points.
//!
//! Shapes are described by a trigonometric unit curve (triangle, square,
//! pentagon, hexagon or circle) mapped through
//! `X = T + R(alpha) M P(phi)` with `M = [[m_x, 0], [lambda m_y, m_y]]`.
//! The fitter estimates `(x_c, y_c, m_x, m_y, alpha, lambda)` by Gauss-Newton
//! on the residuals `R^T (X - T) - M P(phi)`, solving each point's angle
//! `phi` from its direction.
//!
//! All numerics are generic over [`Real`] (`f32`/`f64`); the aliases at the
//! crate root pin the common `f64` instantiation.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebyshev;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod fitter;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod phi_solver;
pub mod plot;
pub mod report;
pub mod scalar;
pub mod shape_model;
pub mod unit_shape;

pub use error::{FitError, Result};
pub use fitter::{fit, FitConfig, FitResult, JacobianMode, LambdaPolicy, NormalizationRecord};
pub use geometry::{Point2, PointSet};
pub use scalar::Real;
pub use shape_model::{FreeMask, ShapeParams};
pub use unit_shape::{Family, UnitShapeSpec};

pub type Point = Point2<f64>;
pub type Points = PointSet<f64>;
pub type Params = ShapeParams<f64>;
pub type Spec = UnitShapeSpec<f64>;
pub type Config = FitConfig<f64>;
pub type Fit = FitResult<f64>;
pub type Normalization = NormalizationRecord<f64>;
