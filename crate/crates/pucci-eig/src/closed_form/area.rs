//! Areas of the explicit domains and the derivative of the area in γ.
//!
//! The oval's area has the closed integral form
//! π² + 4√ω·∫₀^{π/2} [arcsin((γ/√ω)cos x) + arcsin(cos x/(γ√ω))] dx,
//! which is manifestly symmetric under γ → 1/γ. Differentiating under the
//! integral gives a signed integrand vanishing identically at γ = 1, so the
//! area is minimal exactly at the symmetric member of the family.

use super::{check_profile_params, shear_matrix, DomainSpec};
use crate::error::Error;
use crate::quad::integrate;
use crate::Result;
use std::f64::consts::{FRAC_PI_2, PI};

/// Absolute tolerance requested from the quadrature for the area integral.
const AREA_TOL: f64 = 1e-11;

fn clamp_unit(t: f64) -> f64 {
    t.clamp(-1.0, 1.0)
}

fn area_omega_gamma(omega: f64, gamma: f64) -> Result<f64> {
    let rw = omega.sqrt();
    let integral = integrate(
        |x| {
            let c = x.cos();
            clamp_unit(gamma / rw * c).asin() + clamp_unit(c / (gamma * rw)).asin()
        },
        0.0,
        FRAC_PI_2,
        AREA_TOL,
    )?;
    Ok(PI * PI + 4.0 * rw * integral)
}

/// Area of the domain, exact for squares, quadrature elsewhere.
/// Shearing multiplies by det C_a = √(π²−a²)/π; scaling by δ².
pub fn area(spec: &DomainSpec) -> Result<f64> {
    spec.validate()?;
    match spec {
        DomainSpec::OmegaGamma { omega, gamma } => area_omega_gamma(*omega, *gamma),
        DomainSpec::Sheared { omega, gamma, a } => {
            let (c, _) = shear_matrix(*a)?;
            Ok(c.det() * area_omega_gamma(*omega, *gamma)?)
        }
        DomainSpec::Square { halfside } => Ok(4.0 * halfside * halfside),
        DomainSpec::Scaled { base, delta } => Ok(delta * delta * area(base)?),
    }
}

/// d/dγ of the oval's area:
/// (4√ω/γ)·∫₀^{π/2} [1/√(ω/γ² − cos²x) − 1/√(ωγ² − cos²x)]·cos x dx.
///
/// Strictly positive for γ > 1, strictly negative for γ < 1, zero at γ = 1.
/// The endpoints γ = 1/√ω and γ = √ω make one root vanish at x = 0 and are
/// rejected with a parameter error: only the interior sign is ever needed,
/// and the rejection is cheaper than an endpoint-singularity substitution.
pub fn area_derivative_gamma(omega: f64, gamma: f64) -> Result<f64> {
    check_profile_params(omega, gamma)?;
    if gamma == 1.0 {
        // The two roots coincide and the integrand vanishes identically.
        return Ok(0.0);
    }
    if gamma * gamma * omega <= 1.0 || gamma * gamma >= omega {
        return Err(Error::parameter(format!(
            "area derivative needs 1/sqrt(omega) < gamma < sqrt(omega) strictly, got \
             gamma={gamma} for omega={omega}"
        )));
    }
    let rw = omega.sqrt();
    let integral = integrate(
        |x| {
            let c2 = x.cos().powi(2);
            let shrink = (omega / (gamma * gamma) - c2).sqrt();
            let grow = (omega * gamma * gamma - c2).sqrt();
            (1.0 / shrink - 1.0 / grow) * x.cos()
        },
        0.0,
        FRAC_PI_2,
        AREA_TOL,
    )?;
    Ok(4.0 * rw / gamma * integral)
}
