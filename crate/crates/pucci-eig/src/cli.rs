//! Command-line front end: every operation in the crate behind a
//! subcommand, producing deterministic CSV or JSON (schema
//! "pucci-eig/1") on stdout or atomically to a file.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 numerical
//! failure (non-convergence, grid limits, output errors), 3 hard
//! verification failure.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::closed_form::{self, area, DomainSpec, PiecewiseEigenfunction, RegionTag};
use crate::error::Error;
use crate::grid_fd::{build_grid, principal_eigen, DEFAULT_EIG_TOL, DEFAULT_MAX_ITER};
use crate::pucci::EllipticityPair;
use crate::report::{self, csv_float, CsvTable};
use crate::verify::{self, domain_samples, SweepResult, VerifyOptions};
use crate::Result;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "pucci-eig",
    version,
    about = "Principal eigenvalues of the Pucci sup-operator on explicit plane domains",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the principal eigenvalue and eigenfunction on a grid.
    Eig {
        #[command(flatten)]
        ell: EllFlags,
        #[command(flatten)]
        domain: DomainFlags,
        #[command(flatten)]
        grid: GridFlags,
        #[command(flatten)]
        out: OutFlags,
    },
    /// Run the verification battery and emit the full JSON report.
    Verify {
        /// Run every suite (the default; accepted for explicitness).
        #[arg(long)]
        all: bool,
        /// Seed for the randomized identity checks.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Coarse grid spacing for the numerical sweeps.
        #[arg(long, default_value_t = PI / 16.0)]
        h: f64,
        /// Coarse stencil width for the numerical sweeps.
        #[arg(long = "W", default_value_t = 2)]
        w: u32,
        /// Interior samples per closed-form case.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[command(flatten)]
        out: OutFlags,
    },
    /// Exact area of a domain.
    Area {
        #[command(flatten)]
        ell: EllFlags,
        #[command(flatten)]
        domain: DomainFlags,
        #[command(flatten)]
        out: OutFlags,
    },
    /// Sweep the aspect parameter over its admissible interval.
    SweepGamma {
        #[command(flatten)]
        ell: EllFlags,
        /// Number of aspect values (odd, at least 3).
        #[arg(long, default_value_t = 9)]
        n: usize,
        /// Also compute the grid eigenvalue for every aspect value.
        #[arg(long)]
        numerical: bool,
        #[command(flatten)]
        grid: GridFlags,
        #[command(flatten)]
        out: OutFlags,
    },
    /// Sweep the shear parameter and check the eigenvalue lower bound.
    SweepShear {
        #[command(flatten)]
        ell: EllFlags,
        /// Aspect parameter of the profile being sheared.
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Shear values; repeat the flag for several (default four values
        /// spanning [0, 3π/4]).
        #[arg(long = "a")]
        a_values: Vec<f64>,
        /// Coarse grid spacing (the sweep also runs h/2 internally).
        #[arg(long, default_value_t = PI / 32.0)]
        h: f64,
        /// Coarse stencil width (the sweep also runs W+1 internally).
        #[arg(long = "W", default_value_t = 2)]
        w: u32,
        #[command(flatten)]
        out: OutFlags,
    },
    /// Emit boundary polylines and region-classified eigenfunction
    /// samples as plot-ready data.
    Render {
        #[command(flatten)]
        ell: EllFlags,
        #[command(flatten)]
        domain: DomainFlags,
        /// Interior sample count (the boundary gets the same count per
        /// side).
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[command(flatten)]
        out: OutFlags,
    },
}

/// Ellipticity constants; any two of λ, Λ, ω determine the third.
#[derive(Debug, Clone, Args)]
pub struct EllFlags {
    /// Lower ellipticity constant λ.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Upper ellipticity constant Λ.
    #[arg(long = "Lambda")]
    pub big_lambda: Option<f64>,
    /// Ellipticity ratio ω = Λ/λ.
    #[arg(long)]
    pub omega: Option<f64>,
}

impl EllFlags {
    /// Resolves the three interdependent flags into a validated pair.
    ///
    /// All three together must be consistent; two determine the third; ω
    /// alone fixes λ = 1; a single constant (or none) gives the
    /// equal-constants case.
    pub fn resolve(&self) -> Result<EllipticityPair> {
        match (self.lambda, self.big_lambda, self.omega) {
            (Some(l), Some(b), Some(w)) => {
                let ell = EllipticityPair::new(l, b)?;
                if (ell.omega() - w).abs() > 1e-12 * w.abs() {
                    return Err(Error::parameter(format!(
                        "inconsistent constants: Lambda/lambda = {} but omega = {w}",
                        ell.omega()
                    )));
                }
                Ok(ell)
            }
            (Some(l), Some(b), None) => EllipticityPair::new(l, b),
            (Some(l), None, Some(w)) => EllipticityPair::new(l, l * w),
            (None, Some(b), Some(w)) => EllipticityPair::new(b / w, b),
            (None, None, Some(w)) => EllipticityPair::new(1.0, w),
            (Some(l), None, None) => EllipticityPair::new(l, l),
            (None, Some(b), None) => EllipticityPair::new(b, b),
            (None, None, None) => EllipticityPair::new(1.0, 1.0),
        }
    }
}

/// Domain selection: the profile family by default, optionally sheared
/// and/or rescaled, or the plain square.
#[derive(Debug, Clone, Args)]
pub struct DomainFlags {
    /// Aspect parameter γ of the profile domain.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Shear parameter (|a| < π); selects the sheared domain.
    #[arg(long)]
    pub a: Option<f64>,
    /// Similarity scale applied to the selected domain.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Use the square domain; the optional value is the half-side
    /// (default π/√2, the square of area 2π²).
    #[arg(long, num_args = 0..=1)]
    pub square: Option<Option<f64>>,
}

impl DomainFlags {
    pub fn resolve(&self, ell: &EllipticityPair) -> Result<DomainSpec> {
        let base = match self.square {
            Some(halfside) => {
                if self.a.is_some() {
                    return Err(Error::parameter(
                        "--a applies to the profile family, not the square",
                    ));
                }
                DomainSpec::Square {
                    halfside: halfside.unwrap_or(PI / 2.0f64.sqrt()),
                }
            }
            None => {
                let omega = ell.omega();
                match self.a {
                    Some(a) => DomainSpec::Sheared {
                        omega,
                        gamma: self.gamma,
                        a,
                    },
                    None => DomainSpec::OmegaGamma {
                        omega,
                        gamma: self.gamma,
                    },
                }
            }
        };
        let spec = match self.delta {
            Some(delta) => DomainSpec::Scaled {
                base: Box::new(base),
                delta,
            },
            None => base,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Discretization controls for the grid eigensolver.
#[derive(Debug, Clone, Args)]
pub struct GridFlags {
    /// Grid spacing.
    #[arg(long, default_value_t = PI / 32.0)]
    pub h: f64,
    /// Stencil width (1 gives the axis-only five-point scheme).
    #[arg(long = "W", default_value_t = 2)]
    pub w: u32,
    /// Relative eigenvalue tolerance.
    #[arg(long, default_value_t = DEFAULT_EIG_TOL)]
    pub tol: f64,
    /// Iteration cap for the inverse power loop.
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Output destination and format.
#[derive(Debug, Clone, Args)]
pub struct OutFlags {
    /// Output file (written atomically); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; each command's natural default applies when
    /// omitted (JSON for eig/verify/area, CSV for sweeps and render).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl OutFlags {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn emit(&self, content: &str) -> Result<()> {
        report::emit(content, self.out.as_deref())
    }
}

/// Entry point: parses `argv`, configures the thread pool, runs the
/// subcommand, and maps the outcome to the exit-code discipline.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// PUCCI_EIG_THREADS caps the rayon pool; unset means rayon's default.
fn configure_threads() -> Result<()> {
    match std::env::var("PUCCI_EIG_THREADS") {
        Ok(v) => {
            let n: usize = v.parse().map_err(|_| {
                Error::parameter(format!(
                    "PUCCI_EIG_THREADS must be a positive integer, got {v:?}"
                ))
            })?;
            if n == 0 {
                return Err(Error::parameter(
                    "PUCCI_EIG_THREADS must be a positive integer, got 0",
                ));
            }
            // A second initialization in the same process is harmless:
            // the pool is already running with a configured size.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
            Ok(())
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(Error::parameter(format!("PUCCI_EIG_THREADS: {e}"))),
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Parameter(_) | Error::Domain(_) => EXIT_USAGE,
        Error::Grid(_)
        | Error::Quadrature { .. }
        | Error::Iteration(_)
        | Error::Monotonicity(_)
        | Error::Output(_) => EXIT_NUMERICAL,
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Eig {
            ell,
            domain,
            grid,
            out,
        } => cmd_eig(&ell, &domain, &grid, &out),
        Command::Verify {
            all: _,
            seed,
            h,
            w,
            samples,
            out,
        } => cmd_verify(seed, &VerifyOptions { h, w, samples }, &out),
        Command::Area { ell, domain, out } => cmd_area(&ell, &domain, &out),
        Command::SweepGamma {
            ell,
            n,
            numerical,
            grid,
            out,
        } => cmd_sweep_gamma(&ell, n, numerical, &grid, &out),
        Command::SweepShear {
            ell,
            gamma,
            a_values,
            h,
            w,
            out,
        } => cmd_sweep_shear(&ell, gamma, &a_values, h, w, &out),
        Command::Render {
            ell,
            domain,
            samples,
            out,
        } => cmd_render(&ell, &domain, samples, &out),
    }
}

/// JSON document for a single eigenvalue run.
#[derive(Debug, Serialize, Deserialize)]
pub struct EigDocument {
    pub schema: String,
    pub mu: f64,
    pub h: f64,
    #[serde(rename = "W")]
    pub w: u32,
    pub iterations: usize,
    /// Final Bellman residual ‖M⁺u + μu‖∞ relative to ‖u‖∞ = 1.
    pub residual: f64,
    pub monotone_certificate: bool,
    pub converged: bool,
    pub n_interior: usize,
}

fn cmd_eig(
    ell: &EllFlags,
    domain: &DomainFlags,
    grid_flags: &GridFlags,
    out: &OutFlags,
) -> Result<i32> {
    let ell = ell.resolve()?;
    let spec = domain.resolve(&ell)?;
    let (grid, stencils) = build_grid(&spec, grid_flags.h, grid_flags.w)?;
    let solve = principal_eigen(&grid, &stencils, &ell, grid_flags.tol, grid_flags.max_iter)?;
    let doc = EigDocument {
        schema: report::SCHEMA.to_string(),
        mu: solve.mu,
        h: solve.h,
        w: solve.w,
        iterations: solve.iterations,
        residual: solve.residual_history.last().copied().unwrap_or(f64::NAN),
        monotone_certificate: solve.certified_monotone,
        converged: solve.converged,
        n_interior: grid.n_interior(),
    };
    let content = match out.format_or(Format::Json) {
        Format::Json => report::json_string(&doc)?,
        Format::Csv => {
            let mut t = CsvTable::new([
                "mu",
                "h",
                "W",
                "iterations",
                "residual",
                "monotone_certificate",
                "converged",
                "n_interior",
            ]);
            t.push_row([
                csv_float(doc.mu),
                csv_float(doc.h),
                doc.w.to_string(),
                doc.iterations.to_string(),
                csv_float(doc.residual),
                doc.monotone_certificate.to_string(),
                doc.converged.to_string(),
                doc.n_interior.to_string(),
            ]);
            t.render()
        }
    };
    out.emit(&content)?;
    Ok(if doc.converged {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    })
}

fn cmd_verify(seed: u64, opts: &VerifyOptions, out: &OutFlags) -> Result<i32> {
    if out.format_or(Format::Json) == Format::Csv {
        return Err(Error::parameter(
            "the verification report is nested; only --format json is supported",
        ));
    }
    let report_doc = verify::run_all(seed, opts)?;
    out.emit(&report::json_string(&report_doc)?)?;
    Ok(if report_doc.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AreaDocument {
    pub schema: String,
    pub spec: DomainSpec,
    pub area: f64,
}

fn cmd_area(ell: &EllFlags, domain: &DomainFlags, out: &OutFlags) -> Result<i32> {
    let ell = ell.resolve()?;
    let spec = domain.resolve(&ell)?;
    let doc = AreaDocument {
        schema: report::SCHEMA.to_string(),
        area: area(&spec)?,
        spec,
    };
    let content = match out.format_or(Format::Json) {
        Format::Json => report::json_string(&doc)?,
        Format::Csv => {
            let mut t = CsvTable::new(["spec", "area"]);
            let spec_json = serde_json::to_string(&doc.spec)
                .map_err(|e| Error::Output(format!("spec serialization: {e}")))?;
            t.push_row([spec_json, csv_float(doc.area)]);
            t.render()
        }
    };
    out.emit(&content)?;
    Ok(EXIT_OK)
}

/// JSON wrapper adding the schema tag to a sweep result.
#[derive(Debug, Serialize, Deserialize)]
pub struct SweepDocument {
    pub schema: String,
    #[serde(flatten)]
    pub result: SweepResult,
}

fn sweep_csv(result: &SweepResult) -> String {
    let opt_f = |x: Option<f64>| x.map(csv_float).unwrap_or_default();
    let mut t = CsvTable::new([
        result.parameter.as_str(),
        "area",
        "mu_closed",
        "normalized_closed",
        "mu_h",
        "mu_coarse",
        "normalized_h",
        "bound",
        "margin",
        "lower_bound_ok",
        "strict",
        "is_argmin",
    ]);
    for (i, row) in result.rows.iter().enumerate() {
        t.push_row([
            csv_float(row.value),
            csv_float(row.area),
            opt_f(row.mu_closed),
            opt_f(row.normalized_closed),
            opt_f(row.mu_h),
            opt_f(row.mu_coarse),
            opt_f(row.normalized_h),
            opt_f(row.bound),
            opt_f(row.margin),
            row.lower_bound_ok
                .map(|b| b.to_string())
                .unwrap_or_default(),
            row.strict
                .map(|s| match s {
                    verify::StrictFlag::Strict => "strict".to_string(),
                    verify::StrictFlag::Indeterminate => "indeterminate".to_string(),
                })
                .unwrap_or_default(),
            (i == result.argmin).to_string(),
        ]);
    }
    t.render()
}

fn emit_sweep(result: SweepResult, out: &OutFlags) -> Result<i32> {
    let content = match out.format_or(Format::Csv) {
        Format::Csv => sweep_csv(&result),
        Format::Json => report::json_string(&SweepDocument {
            schema: report::SCHEMA.to_string(),
            result,
        })?,
    };
    out.emit(&content)?;
    Ok(EXIT_OK)
}

fn cmd_sweep_gamma(
    ell: &EllFlags,
    n: usize,
    numerical: bool,
    grid: &GridFlags,
    out: &OutFlags,
) -> Result<i32> {
    let ell = ell.resolve()?;
    let result = verify::gamma_sweep(&ell, n, numerical, grid.h, grid.w)?;
    emit_sweep(result, out)
}

fn cmd_sweep_shear(
    ell: &EllFlags,
    gamma: f64,
    a_values: &[f64],
    h: f64,
    w: u32,
    out: &OutFlags,
) -> Result<i32> {
    let ell = ell.resolve()?;
    let defaults = [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0];
    let a_values = if a_values.is_empty() {
        &defaults[..]
    } else {
        a_values
    };
    let result = verify::shear_sweep(&ell, gamma, a_values, h, w)?;
    emit_sweep(result, out)
}

fn region_label(tag: RegionTag) -> &'static str {
    match tag {
        RegionTag::CentralSquare => "central_square",
        RegionTag::EastWest => "east_west",
        RegionTag::NorthSouth => "north_south",
        RegionTag::Corner => "corner",
        RegionTag::Outside => "outside",
    }
}

/// Boundary polylines (top and bottom profile curves mapped through any
/// shear/scale) and region-classified interior samples of the
/// eigenfunction, as plot-ready CSV/JSON rows.
fn cmd_render(
    ell: &EllFlags,
    domain: &DomainFlags,
    samples: usize,
    out: &OutFlags,
) -> Result<i32> {
    let ell = ell.resolve()?;
    let spec = domain.resolve(&ell)?;
    let (params, map) = verify::sampler::base_and_map(&spec);
    let (omega, gamma) = params.ok_or_else(|| {
        Error::parameter("render needs a profile-family domain (no closed form on the square)")
    })?;
    if samples < 4 {
        return Err(Error::parameter("need at least 4 samples"));
    }
    let u = PiecewiseEigenfunction::new(spec.clone(), ell)?;

    #[derive(Serialize, Deserialize)]
    struct RenderRow {
        kind: String,
        region: String,
        x: f64,
        y: f64,
        value: f64,
    }

    let mut rows: Vec<RenderRow> = Vec::new();
    let x_max = closed_form::profile_x_max(omega, gamma);
    let mut max_boundary = 0.0f64;
    for side in [1.0, -1.0] {
        let kind = if side > 0.0 {
            "boundary_top"
        } else {
            "boundary_bottom"
        };
        for i in 0..samples {
            let x = -x_max + 2.0 * x_max * i as f64 / (samples - 1) as f64;
            let y = side * closed_form::phi(omega, gamma, x.abs())?;
            let p = map((x, y));
            let value = u.value(p)?;
            max_boundary = max_boundary.max(value.abs());
            rows.push(RenderRow {
                kind: kind.to_string(),
                region: String::new(),
                x: p.0,
                y: p.1,
                value,
            });
        }
    }
    if max_boundary > 1e-11 * u.sup_value() {
        return Err(Error::Iteration(format!(
            "boundary values should vanish, got {max_boundary:.3e}"
        )));
    }
    for p in domain_samples(&spec, samples)? {
        rows.push(RenderRow {
            kind: "interior".to_string(),
            region: region_label(u.region(p)).to_string(),
            x: p.0,
            y: p.1,
            value: u.value(p)?,
        });
    }

    let content = match out.format_or(Format::Csv) {
        Format::Csv => {
            let mut t = CsvTable::new(["kind", "region", "x", "y", "value"]);
            for r in &rows {
                t.push_row([
                    r.kind.clone(),
                    r.region.clone(),
                    csv_float(r.x),
                    csv_float(r.y),
                    csv_float(r.value),
                ]);
            }
            t.render()
        }
        Format::Json => {
            #[derive(Serialize)]
            struct RenderDocument {
                schema: String,
                rows: Vec<RenderRow>,
            }
            report::json_string(&RenderDocument {
                schema: report::SCHEMA.to_string(),
                rows,
            })?
        }
    };
    out.emit(&content)?;
    Ok(EXIT_OK)
}
