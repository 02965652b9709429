//! Piecewise closed-form principal eigenfunctions and their exact
//! derivatives.
//!
//! On `OmegaGamma` the function is glued from three branches meeting C¹ at
//! |x| = π/2 and |y| = π/2 (the Hessian is continuous there too: the normal
//! second derivative vanishes on both sides). Sheared domains always pull
//! back through C_a⁻¹ — one source of truth for the branch formulas — and
//! scaled domains divide the point by δ.

use super::{region, shear_matrix, DomainSpec, Mat2, RegionTag};
use crate::error::Error;
use crate::pucci::{pucci_plus, EllipticityPair, Sym2};
use crate::Result;
use std::f64::consts::FRAC_PI_2;

/// Value, gradient, and Hessian of one branch family with parameters
/// (γ, √ω). Shared by the bounded domains and the periodic extension.
pub(crate) struct BranchFns {
    gamma: f64,
    rw: f64,
}

impl BranchFns {
    pub(crate) fn new(omega: f64, gamma: f64) -> Self {
        Self { gamma, rw: omega.sqrt() }
    }

    /// γ·cos x + cos y on |x|, |y| ≤ π/2; Hessian diag(−γcos x, −cos y).
    pub(crate) fn central(&self, x: f64, y: f64) -> (f64, (f64, f64), Sym2) {
        let v = self.gamma * x.cos() + y.cos();
        let g = (-self.gamma * x.sin(), -y.sin());
        let h = Sym2::diag(-self.gamma * x.cos(), -y.cos());
        (v, g, h)
    }

    /// −γ√ω·sin((|x|−π/2)/√ω) + cos y beyond |x| = π/2.
    pub(crate) fn east_west(&self, x: f64, y: f64) -> (f64, (f64, f64), Sym2) {
        let t = (x.abs() - FRAC_PI_2) / self.rw;
        let v = -self.gamma * self.rw * t.sin() + y.cos();
        let g = (-x.signum() * self.gamma * t.cos(), -y.sin());
        let h = Sym2::diag(self.gamma / self.rw * t.sin(), -y.cos());
        (v, g, h)
    }

    /// γ·cos x − √ω·sin((|y|−π/2)/√ω) beyond |y| = π/2.
    pub(crate) fn north_south(&self, x: f64, y: f64) -> (f64, (f64, f64), Sym2) {
        let t = (y.abs() - FRAC_PI_2) / self.rw;
        let v = self.gamma * x.cos() - self.rw * t.sin();
        let g = (-self.gamma * x.sin(), -y.signum() * t.cos());
        let h = Sym2::diag(-self.gamma * x.cos(), t.sin() / self.rw);
        (v, g, h)
    }

    /// −√ω·(γ·sin((|x|−π/2)/√ω) + sin((|y|−π/2)/√ω)); periodic cell only.
    pub(crate) fn corner(&self, x: f64, y: f64) -> (f64, (f64, f64), Sym2) {
        let tx = (x.abs() - FRAC_PI_2) / self.rw;
        let ty = (y.abs() - FRAC_PI_2) / self.rw;
        let v = -self.rw * (self.gamma * tx.sin() + ty.sin());
        let g = (-x.signum() * self.gamma * tx.cos(), -y.signum() * ty.cos());
        let h = Sym2::diag(self.gamma / self.rw * tx.sin(), ty.sin() / self.rw);
        (v, g, h)
    }
}

/// Bᵀ H B for symmetric H: the Hessian transform under a pullback by B.
pub(crate) fn congruence(b: &Mat2, h: &Sym2) -> Sym2 {
    let c1 = (b.xx, b.yx);
    let c2 = (b.xy, b.yy);
    let hc1 = (h.xx * c1.0 + h.xy * c1.1, h.xy * c1.0 + h.yy * c1.1);
    let hc2 = (h.xx * c2.0 + h.xy * c2.1, h.xy * c2.0 + h.yy * c2.1);
    Sym2::new(
        c1.0 * hc1.0 + c1.1 * hc1.1,
        c1.0 * hc2.0 + c1.1 * hc2.1,
        c2.0 * hc2.0 + c2.1 * hc2.1,
    )
}

fn eval_raw(spec: &DomainSpec, point: (f64, f64)) -> Result<(f64, (f64, f64), Sym2)> {
    match spec {
        DomainSpec::OmegaGamma { omega, gamma } => {
            let b = BranchFns::new(*omega, *gamma);
            let (x, y) = point;
            match region(spec, point) {
                RegionTag::CentralSquare => Ok(b.central(x, y)),
                RegionTag::EastWest => Ok(b.east_west(x, y)),
                RegionTag::NorthSouth => Ok(b.north_south(x, y)),
                RegionTag::Corner | RegionTag::Outside => Err(Error::domain(format!(
                    "point ({x}, {y}) lies outside the domain closure"
                ))),
            }
        }
        DomainSpec::Square { halfside } => {
            if region(spec, point) == RegionTag::Outside {
                return Err(Error::domain(format!(
                    "point ({}, {}) lies outside the square",
                    point.0, point.1
                )));
            }
            let k = FRAC_PI_2 / halfside;
            let (cx, sx) = ((k * point.0).cos(), (k * point.0).sin());
            let (cy, sy) = ((k * point.1).cos(), (k * point.1).sin());
            let v = cx * cy;
            let g = (-k * sx * cy, -k * cx * sy);
            let h = Sym2::new(-k * k * cx * cy, k * k * sx * sy, -k * k * cx * cy);
            Ok((v, g, h))
        }
        DomainSpec::Sheared { omega, gamma, a } => {
            let (_, c_inv) = shear_matrix(*a)?;
            let inner = c_inv.apply(point);
            let base = DomainSpec::OmegaGamma { omega: *omega, gamma: *gamma };
            let (v, g, h) = eval_raw(&base, inner)?;
            Ok((v, c_inv.apply_transpose(g), congruence(&c_inv, &h)))
        }
        DomainSpec::Scaled { base, delta } => {
            let (v, g, h) = eval_raw(base, (point.0 / delta, point.1 / delta))?;
            let inv = 1.0 / delta;
            Ok((v, (g.0 * inv, g.1 * inv), inv * inv * h))
        }
    }
}

/// A positive function on a [`DomainSpec`], vanishing on the boundary, with
/// closed-form gradient and Hessian. For `OmegaGamma` and squares it is the
/// principal eigenfunction; for sheared domains it is an eigenfunction
/// exactly when ω = 1 or a = 0 and a strict supersolution otherwise.
#[derive(Debug, Clone)]
pub struct PiecewiseEigenfunction {
    spec: DomainSpec,
    ell: EllipticityPair,
    normalization: f64,
}

impl PiecewiseEigenfunction {
    pub fn new(spec: DomainSpec, ell: EllipticityPair) -> Result<Self> {
        Self::with_normalization(spec, ell, 1.0)
    }

    pub fn with_normalization(
        spec: DomainSpec,
        ell: EllipticityPair,
        normalization: f64,
    ) -> Result<Self> {
        spec.validate()?;
        if !(normalization.is_finite() && normalization > 0.0) {
            return Err(Error::invalid(format!(
                "normalization must be positive, got {normalization}"
            )));
        }
        let spec_omega = spec.omega();
        if (spec_omega - ell.omega()).abs() > 1e-12 * spec_omega {
            return Err(Error::parameter(format!(
                "domain is built for ellipticity ratio {spec_omega}, pair has {}",
                ell.omega()
            )));
        }
        Ok(Self { spec, ell, normalization })
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn ell(&self) -> &EllipticityPair {
        &self.ell
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Supremum of the function, attained at the origin.
    pub fn sup_value(&self) -> f64 {
        fn sup_of(spec: &DomainSpec) -> f64 {
            match spec {
                DomainSpec::OmegaGamma { gamma, .. } | DomainSpec::Sheared { gamma, .. } => {
                    gamma + 1.0
                }
                DomainSpec::Square { .. } => 1.0,
                DomainSpec::Scaled { base, .. } => sup_of(base),
            }
        }
        self.normalization * sup_of(&self.spec)
    }

    /// Exact principal eigenvalue when this function is an eigenfunction;
    /// `None` for genuinely sheared domains with ω > 1, where only the lower
    /// bound is available in closed form.
    pub fn eigenvalue(&self) -> Option<f64> {
        fn eig(spec: &DomainSpec, ell: &EllipticityPair) -> Option<f64> {
            match spec {
                DomainSpec::OmegaGamma { .. } => Some(ell.lambda()),
                DomainSpec::Square { halfside } => {
                    Some(ell.lambda() * std::f64::consts::PI.powi(2) / (2.0 * halfside * halfside))
                }
                DomainSpec::Sheared { a, .. } => {
                    if *a == 0.0 || ell.omega() == 1.0 {
                        Some(sheared_bound(ell, *a))
                    } else {
                        None
                    }
                }
                DomainSpec::Scaled { base, delta } => {
                    eig(base, ell).map(|m| m / (delta * delta))
                }
            }
        }
        eig(&self.spec, &self.ell)
    }

    /// Certified lower bound for the principal eigenvalue; coincides with
    /// [`Self::eigenvalue`] whenever the latter is known.
    pub fn eigenvalue_lower_bound(&self) -> f64 {
        fn bound(spec: &DomainSpec, ell: &EllipticityPair) -> f64 {
            match spec {
                DomainSpec::OmegaGamma { .. } => ell.lambda(),
                DomainSpec::Square { halfside } => {
                    ell.lambda() * std::f64::consts::PI.powi(2) / (2.0 * halfside * halfside)
                }
                DomainSpec::Sheared { a, .. } => sheared_bound(ell, *a),
                DomainSpec::Scaled { base, delta } => bound(base, ell) / (delta * delta),
            }
        }
        bound(&self.spec, &self.ell)
    }

    pub fn region(&self, point: (f64, f64)) -> RegionTag {
        region(&self.spec, point)
    }

    pub fn value(&self, point: (f64, f64)) -> Result<f64> {
        Ok(self.normalization * eval_raw(&self.spec, point)?.0)
    }

    pub fn gradient(&self, point: (f64, f64)) -> Result<(f64, f64)> {
        let (_, g, _) = eval_raw(&self.spec, point)?;
        Ok((self.normalization * g.0, self.normalization * g.1))
    }

    pub fn hessian(&self, point: (f64, f64)) -> Result<Sym2> {
        let (_, _, h) = eval_raw(&self.spec, point)?;
        Ok(self.normalization * h)
    }

    /// M⁺(D²u)(p) + μ·u(p): zero for an eigenfunction at eigenvalue μ,
    /// non-positive for a supersolution.
    pub fn residual(&self, mu: f64, point: (f64, f64)) -> Result<f64> {
        let (v, _, h) = eval_raw(&self.spec, point)?;
        let h = self.normalization * h;
        Ok(pucci_plus(&h, &self.ell)? + mu * self.normalization * v)
    }
}

fn sheared_bound(ell: &EllipticityPair, a: f64) -> f64 {
    let pi2 = std::f64::consts::PI.powi(2);
    ell.lambda() * pi2 / (pi2 - a * a)
}

/// u / Φ near the top corner of the γ = √ω domain, where Φ is the quadratic
/// cone solution anchored at the corner.
///
/// The point probed is (direction·d/√ω, y_top − d) — `direction` ∈ (−1, 1)
/// sweeps the interior opening of the cone, `d` is the vertical distance.
/// The numerator is evaluated in the product form
/// 2√ω·sin((d/√ω+x)/2)·sin((d/√ω−x)/2), which is exactly the north-south
/// branch value at that point but free of catastrophic cancellation, so the
/// ratio stays accurate down to d ~ 1e−8. The limit is 1/(2√ω).
pub fn corner_ratio(ell: &EllipticityPair, direction: f64, distance: f64) -> Result<f64> {
    let omega = ell.omega();
    let rw = omega.sqrt();
    if !(direction.is_finite() && direction.abs() < 1.0) {
        return Err(Error::invalid(format!(
            "direction must lie strictly inside (-1, 1), got {direction}"
        )));
    }
    if !(distance > 0.0 && distance <= rw * FRAC_PI_2) {
        return Err(Error::invalid(format!(
            "distance must lie in (0, sqrt(omega)*pi/2], got {distance}"
        )));
    }
    let b = distance / rw;
    let x = direction * b;
    let u = rw * 2.0 * (0.5 * (b + x)).sin() * (0.5 * (b - x)).sin();
    let cone = distance * distance - omega * x * x;
    Ok(u / cone)
}

/// Minimum of [`corner_ratio`] over a fan of interior directions and a
/// geometric ladder of distances from 1e−2 down to 1e−6. Quadratic vanishing
/// at the corner means this stays pinned near 1/(2√ω), bounded away from 0.
pub fn corner_asymptotics_check(ell: &EllipticityPair, samples: usize) -> Result<f64> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample".to_string()));
    }
    let mut min_ratio = f64::INFINITY;
    for direction in [-0.8, -0.4, 0.0, 0.4, 0.8] {
        for j in 0..samples {
            let f = if samples == 1 { 0.0 } else { j as f64 / (samples - 1) as f64 };
            let d = 1e-2 * 1e-4f64.powf(f);
            min_ratio = min_ratio.min(corner_ratio(ell, direction, d)?);
        }
    }
    Ok(min_ratio)
}
