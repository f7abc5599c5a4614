//! Gnomonic projection geometry for the 2-sphere of curvature `lambda`.
//!
//! The sphere of radius `R = 1/sqrt(lambda)` is charted by central projection
//! onto the tangent plane at the pole: a point at colatitude `chi` projects to
//! radius `r = R tan(chi)`. The chart covers the open hemisphere
//! `chi in (0, pi/2)`; geodesics map to straight lines.
//!
//! Units: hbar = mass = 1, angles in radians.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("curvature must be nonnegative, got {0}")]
    NegativeCurvature(f64),
    #[error("operation requires strictly positive curvature")]
    FlatCurvature,
    #[error("colatitude {0} outside the open hemisphere (0, pi/2)")]
    OutsideHemisphere(f64),
    #[error("projected radius must be nonnegative, got {0}")]
    NegativeRadius(f64),
}

/// Global curvature context. `lambda = 0` is the flat limit; the sphere
/// radius `R = 1/sqrt(lambda)` is finite only for `lambda > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvedParams {
    lambda: f64,
}

impl CurvedParams {
    pub fn new(lambda: f64) -> Result<Self, GeometryError> {
        if !(lambda >= 0.0) {
            return Err(GeometryError::NegativeCurvature(lambda));
        }
        Ok(Self { lambda })
    }

    pub fn flat() -> Self {
        Self { lambda: 0.0 }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Sphere radius `R = 1/sqrt(lambda)`; errors in the flat limit.
    pub fn radius(&self) -> Result<f64, GeometryError> {
        if self.lambda > 0.0 {
            Ok(1.0 / self.lambda.sqrt())
        } else {
            Err(GeometryError::FlatCurvature)
        }
    }

    /// Conformal weight `1 + lambda r^2` at projected radius `r`.
    pub fn weight(&self, r: f64) -> f64 {
        1.0 + self.lambda * r * r
    }
}

/// Point of the gnomonic chart in polar form, with the colatitude kept
/// alongside. Invariant: `r = R tan(chi)` whenever both are populated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnomonicPoint {
    pub r: f64,
    pub theta: f64,
    pub chi: f64,
}

impl GnomonicPoint {
    /// Cartesian chart coordinates `(x1, x2) = (r cos theta, r sin theta)`.
    pub fn cartesian(&self) -> (f64, f64) {
        (self.r * self.theta.cos(), self.r * self.theta.sin())
    }
}

/// Point on the sphere in the Cartesian embedding, `q0` along the pole axis.
/// Invariant: `q0^2 + q1^2 + q2^2 = 1/lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingPoint {
    pub q1: f64,
    pub q2: f64,
    pub q0: f64,
}

impl EmbeddingPoint {
    pub fn norm_sq(&self) -> f64 {
        self.q0 * self.q0 + self.q1 * self.q1 + self.q2 * self.q2
    }
}

/// Project the sphere point `(chi, theta)` onto the tangent plane:
/// `r = tan(chi)/sqrt(lambda)`.
pub fn project(
    chi: f64,
    theta: f64,
    params: &CurvedParams,
) -> Result<GnomonicPoint, GeometryError> {
    let radius = params.radius()?;
    if !(chi > 0.0 && chi < std::f64::consts::FRAC_PI_2) {
        return Err(GeometryError::OutsideHemisphere(chi));
    }
    Ok(GnomonicPoint {
        r: radius * chi.tan(),
        theta,
        chi,
    })
}

/// Inverse of [`project`]: recover `(chi, theta)` from the chart radius.
pub fn unproject(r: f64, theta: f64, params: &CurvedParams) -> Result<GnomonicPoint, GeometryError> {
    let radius = params.radius()?;
    if !(r >= 0.0) {
        return Err(GeometryError::NegativeRadius(r));
    }
    Ok(GnomonicPoint {
        r,
        theta,
        chi: (r / radius).atan(),
    })
}

/// Lift a chart point to the embedding: `q_i = x_i / sqrt(1 + lambda r^2)`,
/// `q0 = R / sqrt(1 + lambda r^2)`.
pub fn embed(p: &GnomonicPoint, params: &CurvedParams) -> Result<EmbeddingPoint, GeometryError> {
    let radius = params.radius()?;
    let (x1, x2) = p.cartesian();
    let s = params.weight(p.r).sqrt();
    Ok(EmbeddingPoint {
        q1: x1 / s,
        q2: x2 / s,
        q0: radius / s,
    })
}

/// Inverse of [`embed`] on the open hemisphere `q0 > 0`.
pub fn unembed(q: &EmbeddingPoint, params: &CurvedParams) -> Result<GnomonicPoint, GeometryError> {
    let radius = params.radius()?;
    if !(q.q0 > 0.0) {
        return Err(GeometryError::OutsideHemisphere(std::f64::consts::FRAC_PI_2));
    }
    // central projection: x_i = R q_i / q0
    let x1 = radius * q.q1 / q.q0;
    let x2 = radius * q.q2 / q.q0;
    let r = x1.hypot(x2);
    unproject(r, x2.atan2(x1), params)
}
