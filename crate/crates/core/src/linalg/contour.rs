use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{eigenvalues, solve_linear, CMatrix, Solve, Tolerance, C64};
use crate::error::{Result, SocleError};

/// Weight function inside the resolvent integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContourWeight {
    /// `w(alpha) = 1`: the plain Riesz projection.
    One,
    /// `w(alpha) = 1/alpha`: the factored form whose left product with `m`
    /// gives the projection for a cluster away from zero.
    InverseAlpha,
}

/// Trapezoid rule for `(1/2 pi i) \oint w(alpha) (alpha - m)^{-1} d alpha`
/// over the circle `|alpha - center| = radius` with `nodes` equispaced points.
pub fn contour_resolvent_integral(
    m: &CMatrix,
    center: C64,
    radius: f64,
    weight: ContourWeight,
    nodes: usize,
    tol: &Tolerance,
) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(SocleError::Dimension(format!("resolvent needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    if !(radius.is_finite() && radius > 0.0) || nodes == 0 {
        return Err(SocleError::Precondition("contour needs a positive radius and at least one node".into()));
    }
    if weight == ContourWeight::InverseAlpha && center.norm() < radius + tol.cluster_tol {
        return Err(SocleError::Precondition("1/alpha weight needs a contour that excludes the origin".into()));
    }
    for lambda in eigenvalues(m)? {
        if ((lambda - center).norm() - radius).abs() <= tol.cluster_tol {
            return Err(SocleError::ContourHitsSpectrum(lambda));
        }
    }
    let n = m.rows();
    let identity = CMatrix::identity(n);
    let mut acc = CMatrix::zeros(n, n);
    for j in 0..nodes {
        let theta = 2.0 * PI * j as f64 / nodes as f64;
        let dir = C64::from_polar(1.0, theta);
        let alpha = center + dir * radius;
        let shifted = identity.scale(alpha).try_sub(m)?;
        let resolvent = match solve_linear(&shifted, &identity, tol)? {
            Solve::Solution(x) => x,
            Solve::Singular => return Err(SocleError::ContourHitsSpectrum(alpha)),
        };
        let w = match weight {
            ContourWeight::One => C64::new(1.0, 0.0),
            ContourWeight::InverseAlpha => 1.0 / alpha,
        };
        // d alpha / (2 pi i) = radius * dir * d theta / (2 pi)
        let factor = w * dir * (radius / nodes as f64);
        acc = acc.try_add(&resolvent.scale(factor))?;
    }
    Ok(acc)
}
