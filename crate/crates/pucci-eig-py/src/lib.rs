//! Python bindings for the eigenvalue toolkit: domain construction,
//! closed-form eigenfunction evaluation, the grid eigensolver, sweeps,
//! and the verification battery, exposed as the `pucci_eig_py` module.
//!
//! The binding layer is deliberately thin — all numerics live in the core
//! crate; here we only translate types and map errors onto Python
//! exceptions (`ValueError` for bad inputs, `RuntimeError` for numerical
//! failures).

use std::f64::consts::PI;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pucci_eig::closed_form::{
    self, area, area_derivative_gamma, periodic_extension_value, phi, ComponentClass, DomainSpec,
    PiecewiseEigenfunction, RegionTag,
};
use pucci_eig::grid_fd::{build_grid, principal_eigen};
use pucci_eig::pucci::EllipticityPair;
use pucci_eig::verify;
use pucci_eig::Error;

fn to_py(err: Error) -> PyErr {
    match err {
        Error::InvalidInput(_) | Error::Parameter(_) | Error::Domain(_) => {
            PyValueError::new_err(err.to_string())
        }
        _ => PyRuntimeError::new_err(err.to_string()),
    }
}

fn region_name(tag: RegionTag) -> &'static str {
    match tag {
        RegionTag::CentralSquare => "central_square",
        RegionTag::EastWest => "east_west",
        RegionTag::NorthSouth => "north_south",
        RegionTag::Corner => "corner",
        RegionTag::Outside => "outside",
    }
}

fn class_name(class: ComponentClass) -> &'static str {
    match class {
        ComponentClass::BoundedPositive => "bounded_positive",
        ComponentClass::ConnectedNegative => "connected_negative",
        ComponentClass::HorizontalStripes => "horizontal_stripes",
        ComponentClass::VerticalStripes => "vertical_stripes",
    }
}

/// Uniform ellipticity constants 0 < λ ≤ Λ of the extremal operator.
#[pyclass(frozen)]
struct Ellipticity {
    inner: EllipticityPair,
}

#[pymethods]
impl Ellipticity {
    #[new]
    fn new(lambda_: f64, big_lambda: f64) -> PyResult<Self> {
        Ok(Ellipticity {
            inner: EllipticityPair::new(lambda_, big_lambda).map_err(to_py)?,
        })
    }

    /// Lower ellipticity constant λ.
    #[getter]
    fn lambda_(&self) -> f64 {
        self.inner.lambda()
    }

    /// Upper ellipticity constant Λ.
    #[getter]
    fn big_lambda(&self) -> f64 {
        self.inner.big_lambda()
    }

    /// Ellipticity ratio ω = Λ/λ ≥ 1.
    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega()
    }

    fn __repr__(&self) -> String {
        format!(
            "Ellipticity({}, {})",
            self.inner.lambda(),
            self.inner.big_lambda()
        )
    }
}

/// A plane domain: the two-parameter profile family, its sheared images,
/// axis-aligned squares, and uniform rescalings.
#[pyclass(frozen)]
struct Domain {
    inner: DomainSpec,
}

#[pymethods]
impl Domain {
    /// Profile domain with ellipticity ratio `omega` and aspect `gamma`.
    #[staticmethod]
    fn profile(omega: f64, gamma: f64) -> PyResult<Self> {
        let inner = DomainSpec::OmegaGamma { omega, gamma };
        inner.validate().map_err(to_py)?;
        Ok(Domain { inner })
    }

    /// Sheared profile domain; the shear parameter satisfies |a| < π.
    #[staticmethod]
    fn sheared(omega: f64, gamma: f64, a: f64) -> PyResult<Self> {
        let inner = DomainSpec::Sheared { omega, gamma, a };
        inner.validate().map_err(to_py)?;
        Ok(Domain { inner })
    }

    /// Axis-aligned square (−halfside, halfside)².
    #[staticmethod]
    fn square(halfside: f64) -> PyResult<Self> {
        let inner = DomainSpec::Square { halfside };
        inner.validate().map_err(to_py)?;
        Ok(Domain { inner })
    }

    /// Uniform rescaling of another domain by `delta` > 0; the
    /// eigenvalue scales as 1/δ².
    #[staticmethod]
    fn scaled(inner: &Domain, delta: f64) -> PyResult<Self> {
        let spec = DomainSpec::Scaled {
            base: Box::new(inner.inner.clone()),
            delta,
        };
        spec.validate().map_err(to_py)?;
        Ok(Domain { inner: spec })
    }

    /// Exact area (adaptive quadrature for the profile arcs).
    fn area(&self) -> PyResult<f64> {
        area(&self.inner).map_err(to_py)
    }

    /// Strict interior membership.
    fn contains(&self, x: f64, y: f64) -> bool {
        closed_form::contains(&self.inner, (x, y))
    }

    /// Region branch of a point: "central_square", "east_west",
    /// "north_south", "corner", or "outside".
    fn region(&self, x: f64, y: f64) -> &'static str {
        region_name(closed_form::region(&self.inner, (x, y)))
    }

    /// Serialize to the same tagged JSON used by the file formats.
    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    /// Parse a domain from its tagged JSON form.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: DomainSpec =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        inner.validate().map_err(to_py)?;
        Ok(Domain { inner })
    }

    fn __repr__(&self) -> String {
        format!("Domain({:?})", self.inner)
    }
}

/// Closed-form principal eigenfunction of a profile domain (or of a
/// shear/rescaling of one), with analytic derivatives.
#[pyclass(frozen)]
struct Eigenfunction {
    inner: PiecewiseEigenfunction,
}

#[pymethods]
impl Eigenfunction {
    #[new]
    fn new(domain: &Domain, ell: &Ellipticity) -> PyResult<Self> {
        Ok(Eigenfunction {
            inner: PiecewiseEigenfunction::new(domain.inner.clone(), ell.inner)
                .map_err(to_py)?,
        })
    }

    fn value(&self, x: f64, y: f64) -> PyResult<f64> {
        self.inner.value((x, y)).map_err(to_py)
    }

    fn gradient(&self, x: f64, y: f64) -> PyResult<(f64, f64)> {
        self.inner.gradient((x, y)).map_err(to_py)
    }

    /// Hessian as ((xx, xy), (xy, yy)).
    fn hessian(&self, x: f64, y: f64) -> PyResult<((f64, f64), (f64, f64))> {
        let h = self.inner.hessian((x, y)).map_err(to_py)?;
        Ok(((h.xx, h.xy), (h.xy, h.yy)))
    }

    /// Eigen-residual M⁺(D²u) + μ·u at a point; vanishes on the domain
    /// when μ is the true eigenvalue.
    fn residual(&self, mu: f64, x: f64, y: f64) -> PyResult<f64> {
        self.inner.residual(mu, (x, y)).map_err(to_py)
    }

    fn region(&self, x: f64, y: f64) -> &'static str {
        region_name(self.inner.region((x, y)))
    }

    /// Supremum of the eigenfunction over its domain.
    #[getter]
    fn sup_value(&self) -> f64 {
        self.inner.sup_value()
    }

    /// Exact principal eigenvalue when the theory pins it (None for
    /// nonzero shears, where only a lower bound is known).
    #[getter]
    fn eigenvalue(&self) -> Option<f64> {
        self.inner.eigenvalue()
    }

    /// Certified lower bound on the principal eigenvalue.
    #[getter]
    fn eigenvalue_lower_bound(&self) -> f64 {
        self.inner.eigenvalue_lower_bound()
    }
}

/// Result of the grid eigensolve.
#[pyclass(frozen)]
struct GridSolution {
    #[pyo3(get)]
    mu: f64,
    #[pyo3(get)]
    h: f64,
    #[pyo3(get)]
    w: u32,
    #[pyo3(get)]
    iterations: usize,
    #[pyo3(get)]
    residual: f64,
    #[pyo3(get)]
    monotone_certificate: bool,
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    n_interior: usize,
}

#[pymethods]
impl GridSolution {
    fn __repr__(&self) -> String {
        format!(
            "GridSolution(mu={}, h={}, w={}, converged={})",
            self.mu, self.h, self.w, self.converged
        )
    }
}

/// Principal eigenvalue on a grid: monotone wide-stencil discretization,
/// policy iteration for the Dirichlet solves, inverse power iteration for
/// the eigenpair.
#[pyfunction]
#[pyo3(signature = (domain, ell, h=None, w=2, tol=1e-6, max_iter=200))]
fn principal_eigenvalue(
    domain: &Domain,
    ell: &Ellipticity,
    h: Option<f64>,
    w: u32,
    tol: f64,
    max_iter: usize,
) -> PyResult<GridSolution> {
    let h = h.unwrap_or(PI / 32.0);
    let (grid, stencils) = build_grid(&domain.inner, h, w).map_err(to_py)?;
    let solve = principal_eigen(&grid, &stencils, &ell.inner, tol, max_iter).map_err(to_py)?;
    Ok(GridSolution {
        mu: solve.mu,
        h: solve.h,
        w: solve.w,
        iterations: solve.iterations,
        residual: solve.residual_history.last().copied().unwrap_or(f64::NAN),
        monotone_certificate: solve.certified_monotone,
        converged: solve.converged,
        n_interior: grid.n_interior(),
    })
}

/// Boundary profile height: the domain edge is |y| = profile_height(x).
#[pyfunction]
fn profile_height(omega: f64, gamma: f64, x: f64) -> PyResult<f64> {
    phi(omega, gamma, x).map_err(to_py)
}

/// Derivative of the domain area in the aspect parameter; negative below
/// γ = 1 and positive above, witnessing that symmetry minimizes area at a
/// fixed eigenvalue.
#[pyfunction]
fn area_derivative(omega: f64, gamma: f64) -> PyResult<f64> {
    area_derivative_gamma(omega, gamma).map_err(to_py)
}

/// Sign-changing periodic extension of the eigenfunction to the whole
/// plane.
#[pyfunction]
fn periodic_value(ell: &Ellipticity, gamma: f64, x: f64, y: f64) -> PyResult<f64> {
    periodic_extension_value(&ell.inner, gamma, (x, y)).map_err(to_py)
}

/// Classify the sign components of the periodic extension: returns
/// (negative-set class, positive-set class) as strings.
#[pyfunction]
fn classify_components(omega: f64, gamma: f64) -> PyResult<(&'static str, &'static str)> {
    let neg = closed_form::component_class(omega, gamma).map_err(to_py)?;
    let pos = closed_form::positive_component_class(omega, gamma).map_err(to_py)?;
    Ok((class_name(neg), class_name(pos)))
}

/// Run the full verification battery and return the JSON report.
/// Deterministic in (seed, h, w, samples).
#[pyfunction]
#[pyo3(signature = (seed=42, h=None, w=2, samples=2000))]
fn verification_report(seed: u64, h: Option<f64>, w: u32, samples: usize) -> PyResult<String> {
    let opts = verify::VerifyOptions {
        h: h.unwrap_or(PI / 16.0),
        w,
        samples,
    };
    let report = verify::run_all(seed, &opts).map_err(to_py)?;
    pucci_eig::report::json_string(&report).map_err(to_py)
}

/// Sweep the aspect parameter; returns the result rows as JSON.
#[pyfunction]
#[pyo3(signature = (ell, n=9, numerical=false, h=None, w=2))]
fn gamma_sweep_json(
    ell: &Ellipticity,
    n: usize,
    numerical: bool,
    h: Option<f64>,
    w: u32,
) -> PyResult<String> {
    let result =
        verify::gamma_sweep(&ell.inner, n, numerical, h.unwrap_or(PI / 32.0), w).map_err(to_py)?;
    pucci_eig::report::json_string(&result).map_err(to_py)
}

/// Sweep the shear parameter with the one-sided lower-bound check;
/// returns the result rows as JSON.
#[pyfunction]
#[pyo3(signature = (ell, gamma=1.0, a_values=None, h=None, w=2))]
fn shear_sweep_json(
    ell: &Ellipticity,
    gamma: f64,
    a_values: Option<Vec<f64>>,
    h: Option<f64>,
    w: u32,
) -> PyResult<String> {
    let a_values =
        a_values.unwrap_or_else(|| vec![0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0]);
    let result = verify::shear_sweep(
        &ell.inner,
        gamma,
        &a_values,
        h.unwrap_or(PI / 32.0),
        w,
    )
    .map_err(to_py)?;
    pucci_eig::report::json_string(&result).map_err(to_py)
}

#[pymodule]
fn pucci_eig_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Ellipticity>()?;
    m.add_class::<Domain>()?;
    m.add_class::<Eigenfunction>()?;
    m.add_class::<GridSolution>()?;
    m.add_function(wrap_pyfunction!(principal_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(profile_height, m)?)?;
    m.add_function(wrap_pyfunction!(area_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(periodic_value, m)?)?;
    m.add_function(wrap_pyfunction!(classify_components, m)?)?;
    m.add_function(wrap_pyfunction!(verification_report, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_sweep_json, m)?)?;
    m.add_function(wrap_pyfunction!(shear_sweep_json, m)?)?;
    Ok(())
}
