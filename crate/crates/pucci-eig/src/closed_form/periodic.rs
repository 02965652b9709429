//! Sign-changing global extension of the branch construction to the whole
//! plane.
//!
//! The cell on {|x|, |y| ≤ (1+√ω)π/2} carries four branches (central,
//! east-west, north-south, corner). Each branch is even in its outer
//! coordinate and the outer derivative vanishes at the cell edge, so the
//! periodic extension with period (1+√ω)·π per axis — the minimal one — is
//! automatically C¹ across the seams; the eigen-equation with μ = λ then
//! holds on all of ℝ², for every γ > 0 (not just the bounded-domain range).

use super::eigenfunction::BranchFns;
use crate::error::Error;
use crate::pucci::{pucci_plus, EllipticityPair, Sym2};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Shape of the connected components of the sign sets of the extension.
///
/// `component_class` classifies the negativity set; `positive_component_class`
/// the positivity set, whose components are bounded exactly on the closed
/// admissible band 1/√ω ≤ γ ≤ √ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentClass {
    BoundedPositive,
    ConnectedNegative,
    HorizontalStripes,
    VerticalStripes,
}

fn check_periodic_params(omega: f64, gamma: f64) -> Result<()> {
    if !(omega.is_finite() && omega >= 1.0) {
        return Err(Error::parameter(format!("need omega >= 1, got {omega}")));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::parameter(format!("need gamma > 0, got {gamma}")));
    }
    Ok(())
}

/// Minimal period of the extension along each axis: (1 + √ω)·π.
pub fn periodic_extension_period(omega: f64) -> f64 {
    (1.0 + omega.sqrt()) * PI
}

/// Wraps a coordinate into the fundamental cell [−P/2, P/2].
fn wrap(t: f64, period: f64) -> f64 {
    t - period * (t / period).round()
}

fn eval_cell(ell: &EllipticityPair, gamma: f64, point: (f64, f64)) -> (f64, (f64, f64), Sym2) {
    let omega = ell.omega();
    let period = periodic_extension_period(omega);
    let x = wrap(point.0, period);
    let y = wrap(point.1, period);
    let b = BranchFns::new(omega, gamma);
    let wide_x = x.abs() > FRAC_PI_2;
    let wide_y = y.abs() > FRAC_PI_2;
    match (wide_x, wide_y) {
        (false, false) => b.central(x, y),
        (true, false) => b.east_west(x, y),
        (false, true) => b.north_south(x, y),
        (true, true) => b.corner(x, y),
    }
}

/// Value of the periodic extension; sign-changing, sup = γ + 1 at the
/// lattice of central points, inf = −√ω(γ+1) at the corner centers.
pub fn periodic_extension_value(
    ell: &EllipticityPair,
    gamma: f64,
    point: (f64, f64),
) -> Result<f64> {
    check_periodic_params(ell.omega(), gamma)?;
    Ok(eval_cell(ell, gamma, point).0)
}

pub fn periodic_extension_gradient(
    ell: &EllipticityPair,
    gamma: f64,
    point: (f64, f64),
) -> Result<(f64, f64)> {
    check_periodic_params(ell.omega(), gamma)?;
    Ok(eval_cell(ell, gamma, point).1)
}

pub fn periodic_extension_hessian(
    ell: &EllipticityPair,
    gamma: f64,
    point: (f64, f64),
) -> Result<Sym2> {
    check_periodic_params(ell.omega(), gamma)?;
    Ok(eval_cell(ell, gamma, point).2)
}

/// M⁺(D²u)(p) + λ·u(p) for the extension: identically zero on ℝ².
pub fn periodic_residual(ell: &EllipticityPair, gamma: f64, point: (f64, f64)) -> Result<f64> {
    check_periodic_params(ell.omega(), gamma)?;
    let (v, _, h) = eval_cell(ell, gamma, point);
    Ok(pucci_plus(&h, ell)? + ell.lambda() * v)
}

/// Shape of the negativity set: a single connected open set on the open
/// admissible band, stripes along an axis outside it.
///
/// The ≤ comparisons are checked in the order written, so the fully
/// degenerate case ω = 1, γ = 1 — where the negativity set is a checkerboard
/// of bounded diamonds and both stripe descriptions collapse — reports
/// `HorizontalStripes`.
pub fn component_class(omega: f64, gamma: f64) -> Result<ComponentClass> {
    check_periodic_params(omega, gamma)?;
    let rw = omega.sqrt();
    Ok(if gamma <= 1.0 / rw {
        ComponentClass::HorizontalStripes
    } else if gamma >= rw {
        ComponentClass::VerticalStripes
    } else {
        ComponentClass::ConnectedNegative
    })
}

/// Shape of the positivity set: bounded ovals on the closed admissible band,
/// unbounded stripes beyond it (same orientation as the negative stripes).
pub fn positive_component_class(omega: f64, gamma: f64) -> Result<ComponentClass> {
    check_periodic_params(omega, gamma)?;
    let rw = omega.sqrt();
    Ok(if gamma < 1.0 / rw {
        ComponentClass::HorizontalStripes
    } else if gamma > rw {
        ComponentClass::VerticalStripes
    } else {
        ComponentClass::BoundedPositive
    })
}
