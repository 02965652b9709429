//! Deterministic interior sample sets.
//!
//! Verification sweeps want three kinds of coverage at once: a coarse
//! tensor grid (systematic), a low-discrepancy fill (no lattice aliasing),
//! and hand-placed points hugging the branch interfaces and boundary
//! vertices, where piecewise formulas are most likely to go wrong. The
//! construction is a pure function of the domain and the requested count.

use crate::closed_form::{self, DomainSpec};
use crate::error::Error;
use crate::grid_fd::domain_bbox;
use crate::Result;

/// Offsets used for the near-interface and near-corner probes.
const PROBE_DISTANCES: [f64; 2] = [1e-2, 1e-4];

/// Van der Corput radical inverse in the given base.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Points pressed against the region interfaces and boundary vertices of
/// the axis-aligned profile domain (before any shear or dilation).
fn special_points(omega: f64, gamma: f64) -> Vec<(f64, f64)> {
    let xm = closed_form::profile_x_max(omega, gamma);
    let ym = closed_form::profile_x_max(omega, 1.0 / gamma);
    let mut pts = Vec::new();
    for &d in &PROBE_DISTANCES {
        for sx in [-1.0, 1.0] {
            // Straddle the vertical interfaces |x| = π/2.
            for y in [0.0, -0.8, 1.1] {
                pts.push((sx * (std::f64::consts::FRAC_PI_2 - d), y));
                pts.push((sx * (std::f64::consts::FRAC_PI_2 + d), y));
            }
            // Hug the east/west boundary vertices (±x_max, 0).
            pts.push((sx * (xm - d), 0.0));
            pts.push((sx * (xm - d), d));
        }
        for sy in [-1.0, 1.0] {
            for x in [0.0, 0.7, -1.2] {
                pts.push((x, sy * (std::f64::consts::FRAC_PI_2 - d)));
                pts.push((x, sy * (std::f64::consts::FRAC_PI_2 + d)));
            }
            pts.push((0.0, sy * (ym - d)));
            pts.push((d, sy * (ym - d)));
        }
    }
    pts.push((0.0, 0.0));
    pts
}

fn square_special_points(halfside: f64) -> Vec<(f64, f64)> {
    let mut pts = vec![(0.0, 0.0)];
    for &d in &PROBE_DISTANCES {
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                pts.push((sx * (halfside - d), sy * (halfside - d)));
            }
            pts.push((sx * (halfside - d), 0.0));
            pts.push((0.0, sx * (halfside - d)));
        }
    }
    pts
}

/// Point transform from the underlying profile domain onto a derived one.
pub(crate) type PointMap = Box<dyn Fn((f64, f64)) -> (f64, f64)>;

/// Transform mapping sample points of the underlying profile domain onto
/// `spec`, together with the profile parameters (ω, γ) when they exist.
pub(crate) fn base_and_map(spec: &DomainSpec) -> (Option<(f64, f64)>, PointMap) {
    match spec {
        DomainSpec::OmegaGamma { omega, gamma } => {
            (Some((*omega, *gamma)), Box::new(|p| p))
        }
        DomainSpec::Square { .. } => (None, Box::new(|p| p)),
        DomainSpec::Sheared { omega, gamma, a } => {
            let (c, _) = closed_form::shear_matrix(*a).expect("validated spec");
            (Some((*omega, *gamma)), Box::new(move |p| c.apply(p)))
        }
        DomainSpec::Scaled { base, delta } => {
            let (params, inner) = base_and_map(base);
            let delta = *delta;
            (params, Box::new(move |p| {
                let q = inner(p);
                (delta * q.0, delta * q.1)
            }))
        }
    }
}

/// Exactly `n` strictly interior points of `spec`: interface/corner probes
/// first, then a tensor grid, then a Halton fill. Deterministic in all
/// inputs; errors when the domain cannot supply `n` interior points.
pub fn domain_samples(spec: &DomainSpec, n: usize) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::parameter("sample count must be positive"));
    }
    let (params, map) = base_and_map(spec);

    // Specials and tensor grid live in the profile plane so the map sends
    // them to the right places under shears and dilations.
    let specials = match (params, spec_base_square(spec)) {
        (Some((omega, gamma)), _) => special_points(omega, gamma),
        (None, Some(halfside)) => square_special_points(halfside),
        (None, None) => vec![(0.0, 0.0)],
    };
    let base_spec = profile_base(spec);
    let (x0, x1, y0, y1) = domain_bbox(&base_spec);

    let mut out: Vec<(f64, f64)> = Vec::with_capacity(n);
    // Membership is checked both in the profile plane and after mapping:
    // a point within one ulp of the boundary can lose containment under
    // the map's round trip, and such points are simply dropped.
    let push = |p: (f64, f64), out: &mut Vec<(f64, f64)>| {
        if out.len() < n && closed_form::contains(&base_spec, p) {
            let q = map(p);
            if closed_form::contains(spec, q) {
                out.push(q);
            }
        }
    };

    for p in specials {
        push(p, &mut out);
    }
    let k = ((n as f64).sqrt().ceil() as usize).max(2);
    for j in 0..k {
        for i in 0..k {
            let p = (
                x0 + (x1 - x0) * (i as f64 + 0.5) / k as f64,
                y0 + (y1 - y0) * (j as f64 + 0.5) / k as f64,
            );
            push(p, &mut out);
        }
    }
    let mut idx = 1u64;
    let cap = 1000 * n as u64;
    while out.len() < n && idx < cap {
        let p = (
            x0 + (x1 - x0) * radical_inverse(idx, 2),
            y0 + (y1 - y0) * radical_inverse(idx, 3),
        );
        push(p, &mut out);
        idx += 1;
    }
    if out.len() < n {
        return Err(Error::Domain(format!(
            "could only place {} of {n} interior samples",
            out.len()
        )));
    }
    Ok(out)
}

/// The profile-plane version of `spec`: shears and dilations are stripped,
/// since samples are generated there and mapped forward.
fn profile_base(spec: &DomainSpec) -> DomainSpec {
    match spec {
        DomainSpec::OmegaGamma { .. } | DomainSpec::Square { .. } => spec.clone(),
        DomainSpec::Sheared { omega, gamma, .. } => DomainSpec::OmegaGamma {
            omega: *omega,
            gamma: *gamma,
        },
        DomainSpec::Scaled { base, .. } => profile_base(base),
    }
}

fn spec_base_square(spec: &DomainSpec) -> Option<f64> {
    match spec {
        DomainSpec::Square { halfside } => Some(*halfside),
        DomainSpec::Scaled { base, .. } => spec_base_square(base),
        _ => None,
    }
}
