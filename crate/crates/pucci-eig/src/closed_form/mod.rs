//! Explicit plane domains, boundary profiles, and the closed-form
//! eigenfunction machinery built on them.
//!
//! The central object is the two-parameter family `OmegaGamma` with boundary
//! |y| = φ(|x|): a convex, doubly symmetric oval obtained by gluing a
//! trigonometric arc over the central band |x| ≤ π/2 to a stretched arc
//! beyond it. Shears, axis-aligned squares (the classical Laplacian sanity
//! case), and uniform rescalings complete the family.

pub mod area;
pub mod eigenfunction;
pub mod periodic;

pub use area::{area, area_derivative_gamma};
pub use eigenfunction::{corner_asymptotics_check, corner_ratio, PiecewiseEigenfunction};
pub use periodic::{
    component_class, periodic_extension_gradient, periodic_extension_hessian,
    periodic_extension_period, periodic_extension_value, periodic_residual,
    positive_component_class, ComponentClass,
};

use crate::error::Error;
use crate::pucci::EllipticityPair;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

/// Fuzz for closure membership: absorbs roundoff when boundary points are
/// produced analytically as (x, φ(x)). Strict interior tests use none.
const CLOSURE_SLACK: f64 = 1e-9;

/// Fuzz past the right endpoint of φ's support before declaring x outside.
const PROFILE_EDGE_SLACK: f64 = 1e-12;

/// A plane domain from the family studied here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    /// {(x, y) : |y| < φ(|x|)} for the profile with parameters (ω, γ).
    OmegaGamma { omega: f64, gamma: f64 },
    /// Image of `OmegaGamma` under the volume-shrinking shear C_a.
    Sheared { omega: f64, gamma: f64, a: f64 },
    /// Axis-aligned square (−s, s)², the λ = Λ sanity case.
    Square { halfside: f64 },
    /// δ · base, pointwise dilation.
    Scaled { base: Box<DomainSpec>, delta: f64 },
}

impl DomainSpec {
    /// Checks the admissible parameter ranges: ω ≥ 1, 1/√ω ≤ γ ≤ √ω,
    /// |a| < π, halfside > 0, δ > 0 (recursively for `Scaled`).
    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::OmegaGamma { omega, gamma } => check_profile_params(*omega, *gamma),
            DomainSpec::Sheared { omega, gamma, a } => {
                check_profile_params(*omega, *gamma)?;
                if !(a.is_finite() && a.abs() < PI) {
                    return Err(Error::parameter(format!("shear needs |a| < pi, got {a}")));
                }
                Ok(())
            }
            DomainSpec::Square { halfside } => {
                if !(halfside.is_finite() && *halfside > 0.0) {
                    return Err(Error::parameter(format!(
                        "square halfside must be positive, got {halfside}"
                    )));
                }
                Ok(())
            }
            DomainSpec::Scaled { base, delta } => {
                if !(delta.is_finite() && *delta > 0.0) {
                    return Err(Error::parameter(format!(
                        "scale factor must be positive, got {delta}"
                    )));
                }
                base.validate()
            }
        }
    }

    /// Ellipticity ratio the domain is built for (1 for squares).
    pub fn omega(&self) -> f64 {
        match self {
            DomainSpec::OmegaGamma { omega, .. } | DomainSpec::Sheared { omega, .. } => *omega,
            DomainSpec::Square { .. } => 1.0,
            DomainSpec::Scaled { base, .. } => base.omega(),
        }
    }
}

/// Where a point of the plane sits relative to a domain's branch structure.
///
/// `Corner` is produced only by the periodic extension (both |x| and |y|
/// beyond π/2); bounded domains have no closure points there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionTag {
    CentralSquare,
    EastWest,
    NorthSouth,
    Corner,
    Outside,
}

pub(crate) fn check_profile_params(omega: f64, gamma: f64) -> Result<()> {
    if !(omega.is_finite() && omega >= 1.0) {
        return Err(Error::parameter(format!("need omega >= 1, got {omega}")));
    }
    if !gamma.is_finite() {
        return Err(Error::parameter(format!("gamma must be finite, got {gamma}")));
    }
    let rw = omega.sqrt();
    if !(gamma >= 1.0 / rw && gamma <= rw) {
        return Err(Error::parameter(format!(
            "need 1/sqrt(omega) <= gamma <= sqrt(omega), got gamma={gamma} for omega={omega}"
        )));
    }
    Ok(())
}

fn clamp_unit(t: f64) -> f64 {
    t.clamp(-1.0, 1.0)
}

/// Right endpoint of φ's support: π/2 + √ω·arcsin(1/(γ√ω)).
pub(crate) fn profile_x_max(omega: f64, gamma: f64) -> f64 {
    let rw = omega.sqrt();
    FRAC_PI_2 + rw * clamp_unit(1.0 / (gamma * rw)).asin()
}

/// φ on validated parameters and 0 ≤ ax ≤ x_max (arguments clamped to the
/// principal branch to absorb roundoff at the extreme admissible γ).
pub(crate) fn phi_unchecked(omega: f64, gamma: f64, ax: f64) -> f64 {
    let rw = omega.sqrt();
    if ax <= FRAC_PI_2 {
        FRAC_PI_2 + rw * clamp_unit((gamma / rw) * ax.cos()).asin()
    } else {
        clamp_unit(gamma * rw * ((ax - FRAC_PI_2) / rw).sin()).acos()
    }
}

/// Half-width of the `OmegaGamma` domain at abscissa x. Even in x, strictly
/// decreasing on [0, x_max], π/2 + √ω·arcsin(γ/√ω) at 0, zero at x_max.
pub fn phi(omega: f64, gamma: f64, x: f64) -> Result<f64> {
    check_profile_params(omega, gamma)?;
    if !x.is_finite() {
        return Err(Error::domain(format!("profile abscissa must be finite, got {x}")));
    }
    let ax = x.abs();
    let xm = profile_x_max(omega, gamma);
    if ax > xm + PROFILE_EDGE_SLACK {
        return Err(Error::domain(format!(
            "abscissa {x} outside profile support [-{xm}, {xm}]"
        )));
    }
    Ok(phi_unchecked(omega, gamma, ax.min(xm)))
}

/// Max over midpoint samples of |φ_{1/γ}(φ_γ(x)) − |x||: the two profiles
/// are inverse bijections of each other, so this should sit at roundoff.
pub fn phi_inverse_identity_check(omega: f64, gamma: f64, samples: usize) -> Result<f64> {
    check_profile_params(omega, gamma)?;
    if samples == 0 {
        return Err(Error::invalid("need at least one sample".to_string()));
    }
    let xm = profile_x_max(omega, gamma);
    let step = 2.0 * xm / samples as f64;
    let mut worst = 0.0f64;
    for i in 0..samples {
        let x = -xm + (i as f64 + 0.5) * step;
        let forward = phi(omega, gamma, x)?;
        let back = phi(omega, 1.0 / gamma, forward)?;
        worst = worst.max((back - x.abs()).abs());
    }
    Ok(worst)
}

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub xx: f64,
    pub xy: f64,
    pub yx: f64,
    pub yy: f64,
}

impl Mat2 {
    pub fn identity() -> Self {
        Mat2 { xx: 1.0, xy: 0.0, yx: 0.0, yy: 1.0 }
    }

    pub fn apply(&self, p: (f64, f64)) -> (f64, f64) {
        (self.xx * p.0 + self.xy * p.1, self.yx * p.0 + self.yy * p.1)
    }

    /// Aᵀ p, used for gradient pullbacks.
    pub fn apply_transpose(&self, p: (f64, f64)) -> (f64, f64) {
        (self.xx * p.0 + self.yx * p.1, self.xy * p.0 + self.yy * p.1)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            xx: self.xx * o.xx + self.xy * o.yx,
            xy: self.xx * o.xy + self.xy * o.yy,
            yx: self.yx * o.xx + self.yy * o.yx,
            yy: self.yx * o.xy + self.yy * o.yy,
        }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.yx
    }
}

/// The shear C_a = [[√(1−(a/π)²), 0], [a/π, 1]] and its inverse.
/// det C_a = √(π²−a²)/π < 1 for a ≠ 0: the image domain loses area.
pub fn shear_matrix(a: f64) -> Result<(Mat2, Mat2)> {
    if !(a.is_finite() && a.abs() < PI) {
        return Err(Error::parameter(format!("shear needs |a| < pi, got {a}")));
    }
    let ratio = a / PI;
    let c = Mat2 {
        xx: (1.0 - ratio * ratio).sqrt(),
        xy: 0.0,
        yx: ratio,
        yy: 1.0,
    };
    let root = (PI * PI - a * a).sqrt();
    let c_inv = Mat2 {
        xx: PI / root,
        xy: 0.0,
        yx: -a / root,
        yy: 1.0,
    };
    Ok((c, c_inv))
}

/// Strict interior membership. Points outside φ's support are simply outside.
pub fn contains(spec: &DomainSpec, point: (f64, f64)) -> bool {
    match spec {
        DomainSpec::OmegaGamma { omega, gamma } => {
            let ax = point.0.abs();
            let ay = point.1.abs();
            ax < profile_x_max(*omega, *gamma) && ay < phi_unchecked(*omega, *gamma, ax)
        }
        DomainSpec::Sheared { omega, gamma, a } => match shear_matrix(*a) {
            Ok((_, c_inv)) => contains(
                &DomainSpec::OmegaGamma { omega: *omega, gamma: *gamma },
                c_inv.apply(point),
            ),
            Err(_) => false,
        },
        DomainSpec::Square { halfside } => {
            point.0.abs() < *halfside && point.1.abs() < *halfside
        }
        DomainSpec::Scaled { base, delta } => {
            contains(base, (point.0 / delta, point.1 / delta))
        }
    }
}

/// Total classification of a plane point against a domain's branch layout.
///
/// Exact interface points (|x| = π/2 or |y| = π/2) go to the central branch:
/// every evaluated quantity is continuous there, so the choice is
/// observationally irrelevant and keeps the classifier total. Closure
/// membership is tested with a 1e−9 fuzz so analytically generated boundary
/// points never fall out.
pub fn region(spec: &DomainSpec, point: (f64, f64)) -> RegionTag {
    match spec {
        DomainSpec::OmegaGamma { omega, gamma } => {
            let ax = point.0.abs();
            let ay = point.1.abs();
            if ax <= FRAC_PI_2 && ay <= FRAC_PI_2 {
                return RegionTag::CentralSquare;
            }
            let xm = profile_x_max(*omega, *gamma);
            if ax > FRAC_PI_2 && ay <= FRAC_PI_2 {
                if ax <= xm + CLOSURE_SLACK
                    && ay <= phi_unchecked(*omega, *gamma, ax.min(xm)) + CLOSURE_SLACK
                {
                    RegionTag::EastWest
                } else {
                    RegionTag::Outside
                }
            } else if ay > FRAC_PI_2 && ax <= FRAC_PI_2 {
                if ay <= phi_unchecked(*omega, *gamma, ax) + CLOSURE_SLACK {
                    RegionTag::NorthSouth
                } else {
                    RegionTag::Outside
                }
            } else {
                // Both beyond π/2: the profile already dipped below π/2, so
                // no closure point of a bounded domain lives here.
                RegionTag::Outside
            }
        }
        DomainSpec::Sheared { omega, gamma, a } => match shear_matrix(*a) {
            Ok((_, c_inv)) => region(
                &DomainSpec::OmegaGamma { omega: *omega, gamma: *gamma },
                c_inv.apply(point),
            ),
            Err(_) => RegionTag::Outside,
        },
        DomainSpec::Square { halfside } => {
            if point.0.abs() <= halfside + CLOSURE_SLACK
                && point.1.abs() <= halfside + CLOSURE_SLACK
            {
                RegionTag::CentralSquare
            } else {
                RegionTag::Outside
            }
        }
        DomainSpec::Scaled { base, delta } => {
            region(base, (point.0 / delta, point.1 / delta))
        }
    }
}

/// Diagonal defect score (Λ−λ)·(cos²(x/√2) + 1/2) of the separable square
/// candidate cos(x/√2)·cos(y/√2) on the band π/(2√2) ≤ |x| < π/√2.
///
/// Positive exactly when Λ > λ, witnessing that the product candidate cannot
/// solve the sup-operator eigen-equation; the companion report in `verify`
/// tabulates the pointwise residuals computed from the actual Hessian.
pub fn separable_candidate_residual(ell: &EllipticityPair, x: f64) -> Result<f64> {
    let ax = x.abs();
    let lo = PI / (2.0 * SQRT_2);
    let hi = PI / SQRT_2;
    if !(ax >= lo && ax < hi) {
        return Err(Error::domain(format!(
            "diagonal abscissa {x} outside the band [{lo}, {hi})"
        )));
    }
    let c = (x / SQRT_2).cos();
    Ok((ell.big_lambda() - ell.lambda()) * (c * c + 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn og(omega: f64, gamma: f64) -> DomainSpec {
        DomainSpec::OmegaGamma { omega, gamma }
    }

    #[test]
    fn validation_enforces_parameter_ranges() {
        assert!(og(2.0, 1.0).validate().is_ok());
        assert!(og(2.0, 2.0f64.sqrt()).validate().is_ok());
        assert!(og(2.0, 1.0 / 2.0f64.sqrt()).validate().is_ok());
        assert!(og(2.0, 1.5).validate().is_err());
        assert!(og(0.5, 1.0).validate().is_err());
        assert!(DomainSpec::Sheared { omega: 2.0, gamma: 1.0, a: PI }.validate().is_err());
        assert!(DomainSpec::Sheared { omega: 2.0, gamma: 1.0, a: 3.0 }.validate().is_ok());
        assert!(DomainSpec::Square { halfside: 0.0 }.validate().is_err());
        let nested = DomainSpec::Scaled { base: Box::new(og(2.0, 0.5)), delta: 1.0 };
        assert!(nested.validate().is_err());
    }

    #[test]
    fn phi_reference_values() {
        // ω = γ = 1 is the square rotated by 45°, half-diagonal π.
        assert!((phi(1.0, 1.0, 0.0).unwrap() - PI).abs() < 1e-15);
        // Second branch of the rotated square: φ = π − |x|.
        assert!((phi(1.0, 1.0, 3.0 * PI / 4.0).unwrap() - PI / 4.0).abs() < 1e-14);
        // Zero at the right endpoint for any admissible pair.
        for (omega, gamma) in [(1.0, 1.0), (2.0, 1.0), (4.0, 1.3), (2.0, 2.0f64.sqrt())] {
            let xm = profile_x_max(omega, gamma);
            assert!(phi(omega, gamma, xm).unwrap().abs() < 1e-12);
            assert_eq!(phi(omega, gamma, -xm).unwrap(), phi(omega, gamma, xm).unwrap());
        }
    }

    #[test]
    fn phi_rejects_out_of_support_and_bad_params() {
        assert!(phi(1.0, 1.0, PI + 1e-6).is_err());
        assert!(phi(2.0, 1.5, 0.0).is_err());
        assert!(phi(2.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn phi_is_monotone_decreasing_on_support() {
        let (omega, gamma) = (4.0, 1.3);
        let xm = profile_x_max(omega, gamma);
        let mut prev = phi(omega, gamma, 0.0).unwrap();
        for i in 1..=400 {
            let x = xm * (i as f64) / 400.0;
            let v = phi(omega, gamma, x).unwrap();
            assert!(v < prev, "phi must strictly decrease, broke at x={x}");
            prev = v;
        }
    }

    #[test]
    fn phi_inverse_identity_at_reference_pairs() {
        assert!(phi_inverse_identity_check(4.0, 1.3, 1000).unwrap() <= 1e-10);
        assert!(phi_inverse_identity_check(1.0, 1.0, 1000).unwrap() <= 1e-10);
        assert!(phi_inverse_identity_check(2.0, 2.0f64.sqrt(), 1000).unwrap() <= 1e-10);
    }

    #[test]
    fn shear_matrix_reference_values() {
        let (c, c_inv) = shear_matrix(0.0).unwrap();
        assert_eq!(c, Mat2::identity());
        assert_eq!(c_inv, Mat2::identity());

        let (c, c_inv) = shear_matrix(FRAC_PI_2).unwrap();
        assert!((c.xx - 3.0f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((c.yx - 0.5).abs() < 1e-15);
        assert!((c.det() - 3.0f64.sqrt() / 2.0).abs() < 1e-15);

        let prod = c.mul(&c_inv);
        assert!((prod.xx - 1.0).abs() < 1e-14);
        assert!(prod.xy.abs() < 1e-14);
        assert!(prod.yx.abs() < 1e-14);
        assert!((prod.yy - 1.0).abs() < 1e-14);

        assert!(shear_matrix(PI).is_err());
        assert!(shear_matrix(-4.0).is_err());
    }

    #[test]
    fn contains_reference_points() {
        assert!(contains(&og(2.0, 1.0), (0.0, 0.0)));
        // Rotated square |x| + |y| < π: membership is strict, so edge
        // midpoints and vertices are both out.
        assert!(contains(&og(1.0, 1.0), (FRAC_PI_2 - 1e-6, FRAC_PI_2 - 1e-6)));
        assert!(!contains(&og(1.0, 1.0), (FRAC_PI_2, FRAC_PI_2)));
        assert!(!contains(&og(1.0, 1.0), (PI, 0.0)));
        // Image of an interior point lands inside the sheared domain.
        let sheared = DomainSpec::Sheared { omega: 2.0, gamma: 1.0, a: FRAC_PI_2 };
        let (c, _) = shear_matrix(FRAC_PI_2).unwrap();
        assert!(contains(&sheared, c.apply((0.3, -0.7))));
        // Scaling by δ moves the membership threshold with it.
        let scaled = DomainSpec::Scaled { base: Box::new(og(1.0, 1.0)), delta: 0.5 };
        assert!(contains(&scaled, (0.0, 1.5)));
        assert!(!contains(&scaled, (0.0, 1.6)));
    }

    #[test]
    fn region_layout_matches_branch_geometry() {
        let d = og(2.0, 1.0);
        assert_eq!(region(&d, (0.0, 0.0)), RegionTag::CentralSquare);
        // Interface points classify central.
        assert_eq!(region(&d, (FRAC_PI_2, 0.3)), RegionTag::CentralSquare);
        assert_eq!(region(&d, (0.1, FRAC_PI_2)), RegionTag::CentralSquare);
        assert_eq!(region(&d, (FRAC_PI_2 + 0.2, 0.0)), RegionTag::EastWest);
        assert_eq!(region(&d, (0.0, FRAC_PI_2 + 0.2)), RegionTag::NorthSouth);
        assert_eq!(region(&d, (10.0, 0.0)), RegionTag::Outside);
        assert_eq!(region(&d, (2.0, 2.0)), RegionTag::Outside);
        // Analytic boundary points stay classified inside.
        let x = FRAC_PI_2 + 0.3;
        let y = phi(2.0, 1.0, x).unwrap();
        assert_eq!(region(&d, (x, y)), RegionTag::EastWest);
        assert_eq!(region(&d, (0.3, phi(2.0, 1.0, 0.3).unwrap())), RegionTag::NorthSouth);
    }

    #[test]
    fn separable_candidate_residual_reference_values() {
        let e12 = EllipticityPair::new(1.0, 2.0).unwrap();
        // x/√2 = 3π/8.
        let x = 3.0 * PI / 8.0 * SQRT_2;
        let got = separable_candidate_residual(&e12, x).unwrap();
        let want = (3.0 * PI / 8.0).cos().powi(2) + 0.5;
        assert!((got - want).abs() < 1e-14);
        assert!((got - 0.64645).abs() < 1e-4);

        let e11 = EllipticityPair::new(1.0, 1.0).unwrap();
        assert_eq!(separable_candidate_residual(&e11, x).unwrap(), 0.0);

        // Infimum (Λ−λ)/2 approached at the outer edge of the band.
        let near_edge = PI / SQRT_2 - 1e-9;
        let got = separable_candidate_residual(&e12, near_edge).unwrap();
        assert!((got - 0.5).abs() < 1e-7);

        assert!(separable_candidate_residual(&e12, 0.0).is_err());
        assert!(separable_candidate_residual(&e12, PI / SQRT_2).is_err());
    }

    proptest! {
        #[test]
        fn phi_even_and_positive_inside(omega in 1.0f64..9.0, t in 0.0f64..1.0, s in 0.0f64..0.999) {
            let rw = omega.sqrt();
            // Admissible γ sampled by interpolation between the extremes.
            let gamma = (1.0 / rw) * (1.0 - t) + rw * t;
            let xm = profile_x_max(omega, gamma);
            let x = s * xm;
            let plus = phi(omega, gamma, x).unwrap();
            let minus = phi(omega, gamma, -x).unwrap();
            prop_assert_eq!(plus, minus);
            prop_assert!(plus > 0.0);
        }

        #[test]
        fn mirrored_gamma_swaps_axes(omega in 1.0f64..9.0, t in 0.0f64..1.0,
                                     x in -4.0f64..4.0, y in -4.0f64..4.0) {
            let rw = omega.sqrt();
            let gamma = (1.0 / rw) * (1.0 - t) + rw * t;
            let direct = contains(&og(omega, 1.0 / gamma), (x, y));
            let swapped = contains(&og(omega, gamma), (y, x));
            prop_assert_eq!(direct, swapped);
        }

        #[test]
        fn region_tags_partition_the_plane(x in -6.0f64..6.0, y in -6.0f64..6.0) {
            let d = og(2.0, 1.0);
            let tag = region(&d, (x, y));
            if contains(&d, (x, y)) {
                prop_assert!(tag != RegionTag::Outside);
            }
            // Strictly exterior points (beyond the fuzz) must tag Outside.
            let ax = x.abs();
            let xm = profile_x_max(2.0, 1.0);
            let outside = ax > xm + 1e-6
                || y.abs() > phi_unchecked(2.0, 1.0, ax.min(xm)) + 1e-6;
            if outside {
                prop_assert_eq!(tag, RegionTag::Outside);
            }
        }
    }
}
