//! Exact algebra of the Pucci extremal operators on symmetric 2×2 matrices.
//!
//! The sup-operator is
//!
//! ```text
//! M⁺(X) = λ · Σ_{e_i < 0} e_i  +  Λ · Σ_{e_i > 0} e_i
//! ```
//!
//! over the eigenvalues e_i of X, equivalently the maximum of trace(A·X)
//! over symmetric A with spectrum in [λ, Λ]. Everything here is a pure
//! closed-form evaluation; the 2×2 spectrum comes from the trace/determinant
//! formula with a guarded discriminant so results are reproducible bit for
//! bit up to libm.

use crate::error::Error;
use crate::Result;

/// Ellipticity constants 0 < λ ≤ Λ and their ratio ω = Λ/λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticityPair {
    lambda: f64,
    big_lambda: f64,
}

impl EllipticityPair {
    /// Validates 0 < λ ≤ Λ (both finite).
    pub fn new(lambda: f64, big_lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || !big_lambda.is_finite() {
            return Err(Error::invalid(format!(
                "ellipticity constants must be finite, got ({lambda}, {big_lambda})"
            )));
        }
        if !(lambda > 0.0) || big_lambda < lambda {
            return Err(Error::parameter(format!(
                "need 0 < lambda <= Lambda, got ({lambda}, {big_lambda})"
            )));
        }
        Ok(Self { lambda, big_lambda })
    }

    /// Builds the pair from λ and the ratio ω = Λ/λ ≥ 1.
    pub fn from_ratio(lambda: f64, omega: f64) -> Result<Self> {
        if !(omega >= 1.0) {
            return Err(Error::parameter(format!("need omega >= 1, got {omega}")));
        }
        Self::new(lambda, lambda * omega)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn big_lambda(&self) -> f64 {
        self.big_lambda
    }

    /// Ellipticity ratio ω = Λ/λ ≥ 1.
    pub fn omega(&self) -> f64 {
        self.big_lambda / self.lambda
    }
}

/// Symmetric 2×2 matrix, typically a Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Self { xx, xy, yy }
    }

    pub fn diag(xx: f64, yy: f64) -> Self {
        Self { xx, xy: 0.0, yy }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn is_finite(&self) -> bool {
        self.xx.is_finite() && self.xy.is_finite() && self.yy.is_finite()
    }

    /// Eigenvalues sorted descending, `(e_plus, e_minus)`.
    ///
    /// Closed form from trace and determinant; the discriminant is clamped at
    /// zero to absorb negative rounding for near-multiple spectra.
    pub fn eigenvalues(&self) -> Result<(f64, f64)> {
        if !self.is_finite() {
            return Err(Error::invalid(format!("non-finite matrix entries {self:?}")));
        }
        let half_tr = 0.5 * (self.xx + self.yy);
        let half_diff = 0.5 * (self.xx - self.yy);
        // trace²/4 − det = ((xx−yy)/2)² + xy², written in the cancellation-free form
        let disc = (half_diff * half_diff + self.xy * self.xy).max(0.0).sqrt();
        Ok((half_tr + disc, half_tr - disc))
    }

    /// Second derivative along the unit direction of `v`, vᵀ X v / |v|².
    pub fn directional_curvature(&self, v: (f64, f64)) -> f64 {
        let n2 = v.0 * v.0 + v.1 * v.1;
        (self.xx * v.0 * v.0 + 2.0 * self.xy * v.0 * v.1 + self.yy * v.1 * v.1) / n2
    }
}

impl std::ops::Add for Sym2 {
    type Output = Sym2;
    fn add(self, rhs: Sym2) -> Sym2 {
        Sym2::new(self.xx + rhs.xx, self.xy + rhs.xy, self.yy + rhs.yy)
    }
}

impl std::ops::Neg for Sym2 {
    type Output = Sym2;
    fn neg(self) -> Sym2 {
        Sym2::new(-self.xx, -self.xy, -self.yy)
    }
}

impl std::ops::Mul<Sym2> for f64 {
    type Output = Sym2;
    fn mul(self, m: Sym2) -> Sym2 {
        Sym2::new(self * m.xx, self * m.xy, self * m.yy)
    }
}

/// M⁺(X) = λ·(negative eigenvalue part) + Λ·(positive eigenvalue part).
///
/// Zero eigenvalues contribute nothing; the sign tests are strict, which is
/// harmless because the formula is continuous across e = 0 on either branch.
pub fn pucci_plus(m: &Sym2, ell: &EllipticityPair) -> Result<f64> {
    let (ep, em) = m.eigenvalues()?;
    Ok(weighted_part(ep, ell) + weighted_part(em, ell))
}

/// M⁻(X) = λ·(positive part) + Λ·(negative part); satisfies M⁻(X) = −M⁺(−X).
pub fn pucci_minus(m: &Sym2, ell: &EllipticityPair) -> Result<f64> {
    let (ep, em) = m.eigenvalues()?;
    let part = |e: f64| {
        if e > 0.0 {
            ell.lambda() * e
        } else if e < 0.0 {
            ell.big_lambda() * e
        } else {
            0.0
        }
    };
    Ok(part(ep) + part(em))
}

fn weighted_part(e: f64, ell: &EllipticityPair) -> f64 {
    if e > 0.0 {
        ell.big_lambda() * e
    } else if e < 0.0 {
        ell.lambda() * e
    } else {
        0.0
    }
}

/// The degree-2 homogeneous solution Φ(x, y) = y² − ω·x² of M⁺(D²Φ) = 0 on
/// the plane cone {y > √ω |x|}; positive inside, zero on the cone boundary.
pub fn cone_solution(point: (f64, f64), omega: f64) -> Result<f64> {
    if !(omega >= 1.0) {
        return Err(Error::parameter(format!("need omega >= 1, got {omega}")));
    }
    let (x, y) = point;
    Ok(y * y - omega * x * x)
}

/// Hessian of the cone solution, diag(−2ω, 2); constant in space.
pub fn cone_solution_hessian(omega: f64) -> Sym2 {
    Sym2::diag(-2.0 * omega, 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ell(l: f64, ll: f64) -> EllipticityPair {
        EllipticityPair::new(l, ll).unwrap()
    }

    #[test]
    fn ellipticity_pair_validates() {
        assert!(EllipticityPair::new(1.0, 2.0).is_ok());
        assert!(EllipticityPair::new(0.0, 2.0).is_err());
        assert!(EllipticityPair::new(-1.0, 2.0).is_err());
        assert!(EllipticityPair::new(2.0, 1.0).is_err());
        assert!(EllipticityPair::new(1.0, f64::NAN).is_err());
        assert_eq!(ell(0.5, 3.0).omega(), 6.0);
    }

    #[test]
    fn eigenvalues_diagonal_and_offdiagonal() {
        let (ep, em) = Sym2::diag(-1.0, -1.0).eigenvalues().unwrap();
        assert_eq!((ep, em), (-1.0, -1.0));

        let (ep, em) = Sym2::new(0.0, 1.0, 0.0).eigenvalues().unwrap();
        assert_eq!((ep, em), (1.0, -1.0));

        // diag(3, −2ω) with ω = 2
        let (ep, em) = Sym2::diag(3.0, -4.0).eigenvalues().unwrap();
        assert_eq!((ep, em), (3.0, -4.0));
    }

    #[test]
    fn eigenvalues_reject_non_finite() {
        assert!(Sym2::new(f64::NAN, 0.0, 0.0).eigenvalues().is_err());
        assert!(Sym2::new(0.0, f64::INFINITY, 0.0).eigenvalues().is_err());
    }

    #[test]
    fn pucci_plus_examples() {
        let e12 = ell(1.0, 2.0);
        assert_eq!(pucci_plus(&Sym2::diag(-1.0, -1.0), &e12).unwrap(), -2.0);
        // D²Φ = diag(−2ω, 2): M⁺ = 2Λ − 2λω = 0
        let m = cone_solution_hessian(2.0);
        assert_eq!(pucci_plus(&m, &e12).unwrap(), 0.0);
        assert_eq!(pucci_plus(&Sym2::new(0.0, 1.0, 0.0), &e12).unwrap(), 1.0);
    }

    #[test]
    fn pucci_minus_examples() {
        let e12 = ell(1.0, 2.0);
        assert_eq!(pucci_minus(&Sym2::diag(1.0, 1.0), &e12).unwrap(), 2.0);
        // diag(−2ω, 2), ω = 2: λ·2 + Λ·(−4)
        assert_eq!(pucci_minus(&Sym2::diag(-4.0, 2.0), &e12).unwrap(), -6.0);
    }

    #[test]
    fn cone_solution_examples() {
        assert_eq!(cone_solution((0.0, 1.0), 4.0).unwrap(), 1.0);
        // boundary y = √ω·x
        assert_eq!(cone_solution((1.0, 2.0), 4.0).unwrap(), 0.0);
        assert!(cone_solution((0.0, 1.0), 0.5).is_err());
    }

    /// Brute-force Bellman form: max over a fine angle grid and coefficient
    /// choices (a, b) ∈ {λ, Λ}² of a·u_θθ + b·u_⊥⊥. Independent of the
    /// spectral formula.
    fn bellman_brute_force(m: &Sym2, ell: &EllipticityPair, n_angles: usize) -> f64 {
        let (l, ll) = (ell.lambda(), ell.big_lambda());
        let mut best = f64::NEG_INFINITY;
        for k in 0..n_angles {
            let theta = std::f64::consts::FRAC_PI_2 * (k as f64) / (n_angles as f64);
            let v = (theta.cos(), theta.sin());
            let w = (-v.1, v.0);
            let dv = m.directional_curvature(v);
            let dw = m.directional_curvature(w);
            for a in [l, ll] {
                for b in [l, ll] {
                    best = best.max(a * dv + b * dw);
                }
            }
        }
        best
    }

    #[test]
    fn bellman_form_matches_spectral_formula() {
        let cases = [
            (Sym2::new(1.3, -0.7, -2.1), ell(1.0, 2.0)),
            (Sym2::new(-1.0, 0.4, -1.0), ell(0.5, 3.0)),
            (Sym2::new(0.0, 2.0, 0.0), ell(1.0, 4.0)),
            (Sym2::diag(2.0, 2.0), ell(1.0, 1.0)),
        ];
        for (m, e) in cases {
            let exact = pucci_plus(&m, &e).unwrap();
            let brute = bellman_brute_force(&m, &e, 3600);
            let scale = 1.0 + exact.abs();
            assert!(
                (exact - brute).abs() <= 1e-6 * scale,
                "spectral {exact} vs bellman {brute}"
            );
        }
    }

    proptest! {
        #[test]
        fn eigen_reconstruction(xx in -50.0f64..50.0, xy in -50.0f64..50.0, yy in -50.0f64..50.0) {
            let m = Sym2::new(xx, xy, yy);
            let (ep, em) = m.eigenvalues().unwrap();
            prop_assert!(ep >= em);
            let scale = 1.0 + xx.abs().max(xy.abs()).max(yy.abs()).powi(2);
            prop_assert!((ep + em - m.trace()).abs() <= 1e-12 * scale);
            prop_assert!((ep * em - m.det()).abs() <= 1e-12 * scale);
        }

        #[test]
        fn positive_homogeneity(xx in -10.0f64..10.0, xy in -10.0f64..10.0, yy in -10.0f64..10.0,
                                t in 0.0f64..100.0) {
            let e12 = ell(1.0, 2.5);
            let m = Sym2::new(xx, xy, yy);
            let scaled = t * m;
            let a = pucci_plus(&scaled, &e12).unwrap();
            let b = t * pucci_plus(&m, &e12).unwrap();
            let scale = 1.0 + a.abs().max(b.abs());
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }

        #[test]
        fn monotone_in_psd_order(xx in -10.0f64..10.0, xy in -10.0f64..10.0, yy in -10.0f64..10.0,
                                 g11 in -3.0f64..3.0, g12 in -3.0f64..3.0, g22 in -3.0f64..3.0) {
            let e = ell(1.0, 3.0);
            let m = Sym2::new(xx, xy, yy);
            // PSD perturbation GᵀG
            let p = Sym2::new(g11 * g11 + g12 * g12, g11 * g12 + g12 * g22, g12 * g12 + g22 * g22);
            let hi = pucci_plus(&(m + p), &e).unwrap();
            let lo = pucci_plus(&m, &e).unwrap();
            prop_assert!(hi >= lo - 1e-11 * (1.0 + hi.abs().max(lo.abs())));
        }

        #[test]
        fn subadditive(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0,
                       d in -10.0f64..10.0, e_ in -10.0f64..10.0, f in -10.0f64..10.0) {
            let e = ell(1.0, 2.0);
            let m = Sym2::new(a, b, c);
            let n = Sym2::new(d, e_, f);
            let lhs = pucci_plus(&(m + n), &e).unwrap();
            let rhs = pucci_plus(&m, &e).unwrap() + pucci_plus(&n, &e).unwrap();
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            prop_assert!(lhs <= rhs + 1e-12 * scale);
        }

        #[test]
        fn duality(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0) {
            let e = ell(0.7, 3.1);
            let m = Sym2::new(a, b, c);
            let lhs = pucci_plus(&-m, &e).unwrap();
            let rhs = -pucci_minus(&m, &e).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn laplacian_when_ratio_one(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0,
                                    l in 0.1f64..5.0) {
            let e = ell(l, l);
            let m = Sym2::new(a, b, c);
            let got = pucci_plus(&m, &e).unwrap();
            let want = l * m.trace();
            prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }

        #[test]
        fn cone_hessian_is_in_kernel(l in 0.1f64..50.0, ratio in 1.0f64..20.0) {
            let e = EllipticityPair::from_ratio(l, ratio).unwrap();
            let m = cone_solution_hessian(e.omega());
            let v = pucci_plus(&m, &e).unwrap();
            prop_assert!(v.abs() <= 1e-12 * (1.0 + e.big_lambda()));
        }
    }
}
