//! Monotone wide-stencil finite differences for the extremal operator.
//!
//! The discretization follows the classical recipe for degenerate elliptic
//! Bellman operators: at every interior lattice point the operator is the
//! maximum, over a finite set of orthogonal direction pairs and endpoint
//! coefficient choices, of a two-term directional Laplacian. Legs that
//! leave the domain are shortened to the boundary crossing and read the
//! Dirichlet value zero there, so every policy matrix is an M-matrix and
//! the scheme is monotone by construction.
//!
//! Widening the stencil (`w`) refines the angular resolution: the primitive
//! direction pairs with coordinates bounded by `w` leave angular gaps no
//! larger than π/(2w). `w = 1` keeps only the axis pair, which reduces the
//! whole pipeline to the standard five-point scheme with Shortley–Weller
//! boundary corrections.

mod howard;
pub mod sparse;

pub use howard::{
    howard_solve, principal_eigen, PolicyState, SolveReport, DEFAULT_EIG_TOL, DEFAULT_MAX_ITER,
};

use crate::closed_form::{self, DomainSpec};
use crate::error::Error;
use crate::pucci::EllipticityPair;
use crate::Result;

/// Cut fractions are bisected until the bracket is shorter than this times
/// the cell size, then floored away from zero to keep coefficients finite.
const CUT_TOL: f64 = 1e-12;
const CUT_FLOOR: f64 = 1e-9;

/// Hard cap on lattice cells so a typo in `h` fails fast instead of
/// exhausting memory.
const MAX_CELLS: usize = 64_000_000;

/// Interior lattice points of a domain, with the index bookkeeping shared
/// by all solves on it. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Grid {
    h: f64,
    i_min: i64,
    j_min: i64,
    nx: usize,
    ny: usize,
    /// Interior index per lattice cell, `u32::MAX` when not interior.
    index: Vec<u32>,
    /// Coordinates of the interior points in index order.
    points: Vec<(f64, f64)>,
    connected: bool,
}

impl Grid {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_interior(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Whether the interior lattice graph is a single four-connected
    /// component. Disconnected interiors are legal but worth flagging:
    /// the eigen-solver then resolves only the dominant component.
    pub fn is_connected(&self) -> bool {
        self.connected
    }

    fn cell(&self, i: i64, j: i64) -> Option<usize> {
        if i < self.i_min || j < self.j_min {
            return None;
        }
        let (di, dj) = ((i - self.i_min) as usize, (j - self.j_min) as usize);
        if di >= self.nx || dj >= self.ny {
            return None;
        }
        Some(dj * self.nx + di)
    }

    fn interior_at(&self, i: i64, j: i64) -> Option<u32> {
        self.cell(i, j).and_then(|c| {
            let ix = self.index[c];
            (ix != u32::MAX).then_some(ix)
        })
    }

    /// Lattice coordinates (i, j) of interior point `ix`.
    fn lattice_of(&self, ix: usize) -> (i64, i64) {
        let (x, y) = self.points[ix];
        ((x / self.h).round() as i64, (y / self.h).round() as i64)
    }
}

/// One directional leg of a stencil: either a full step to an interior
/// neighbor (`s = 1`) or a shortened step to the boundary crossing at
/// fraction `s ∈ (0, 1]` of the full leg, where the value is zero.
#[derive(Debug, Clone, Copy)]
pub struct Leg {
    pub neighbor: Option<u32>,
    pub s: f64,
}

/// The direction pairs and per-point legs for a grid. Direction `k` pairs
/// the primitive vector `v_k = (p, q)` with its rotation `(−q, p)`; legs
/// are stored per interior point in the order +v, −v, +v⊥, −v⊥.
#[derive(Debug, Clone)]
pub struct StencilSet {
    w: u32,
    frames: Vec<(i64, i64)>,
    /// Squared Euclidean length of each frame vector (both members of an
    /// orthogonal pair share it).
    len2: Vec<f64>,
    legs: Vec<Leg>,
}

impl StencilSet {
    pub fn width(&self) -> u32 {
        self.w
    }

    pub fn frames(&self) -> &[(i64, i64)] {
        &self.frames
    }

    pub fn legs_at(&self, point: usize, frame: usize) -> &[Leg] {
        let base = (point * self.frames.len() + frame) * 4;
        &self.legs[base..base + 4]
    }

    /// Second differences along the pair directions of `frame` at `point`,
    /// normalized so a full-leg stencil reproduces the unit-direction
    /// curvature of a quadratic exactly. Off-grid leg ends contribute the
    /// boundary value zero.
    pub fn pair_second_diffs(
        &self,
        point: usize,
        frame: usize,
        h: f64,
        field: &[f64],
        u0: f64,
    ) -> (f64, f64) {
        let legs = self.legs_at(point, frame);
        let ell2 = h * h * self.len2[frame];
        let dv = directional_second_diff(&legs[0], &legs[1], ell2, field, u0);
        let dw = directional_second_diff(&legs[2], &legs[3], ell2, field, u0);
        (dv, dw)
    }

    /// Shortley–Weller weights (c₊, c₋, c₀) for one direction of `frame`
    /// at `point`; `side` 0 selects the v pair, 1 the v⊥ pair. The second
    /// difference is c₊·u₊ + c₋·u₋ − c₀·u₀ with c₀ = c₊ + c₋.
    pub(crate) fn direction_weights(
        &self,
        point: usize,
        frame: usize,
        side: usize,
        h: f64,
    ) -> (f64, f64, f64) {
        let legs = self.legs_at(point, frame);
        let ell2 = h * h * self.len2[frame];
        let (sp, sm) = (legs[2 * side].s, legs[2 * side + 1].s);
        let c_plus = 2.0 / (ell2 * sp * (sp + sm));
        let c_minus = 2.0 / (ell2 * sm * (sp + sm));
        (c_plus, c_minus, c_plus + c_minus)
    }

    /// Largest angular gap (radians) left by the direction pairs in [0, π).
    pub fn max_angular_gap(&self) -> f64 {
        let mut angles: Vec<f64> = Vec::with_capacity(2 * self.frames.len());
        for &(p, q) in &self.frames {
            let th = (q as f64).atan2(p as f64);
            angles.push(th);
            angles.push(th + std::f64::consts::FRAC_PI_2);
        }
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut gap = angles[0] + std::f64::consts::PI - angles[angles.len() - 1];
        for w in angles.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        gap
    }
}

fn directional_second_diff(plus: &Leg, minus: &Leg, ell2: f64, field: &[f64], u0: f64) -> f64 {
    let (sp, sm) = (plus.s, minus.s);
    let up = plus.neighbor.map_or(0.0, |n| field[n as usize]);
    let um = minus.neighbor.map_or(0.0, |n| field[n as usize]);
    2.0 / ell2 * (up / (sp * (sp + sm)) + um / (sm * (sp + sm)) - u0 / (sp * sm))
}

/// Primitive direction representatives for width `w`: one vector per
/// orthogonal pair, angle in [0, π/2), sorted by angle. Width 1 keeps only
/// the axis pair so the scheme degenerates to five-point differences.
pub fn stencil_frames(w: u32) -> Vec<(i64, i64)> {
    assert!(w >= 1);
    if w == 1 {
        return vec![(1, 0)];
    }
    let mut frames = Vec::new();
    for p in 1..=w as i64 {
        for q in 0..=w as i64 {
            if gcd(p, q) == 1 {
                frames.push((p, q));
            }
        }
    }
    frames.sort_by(|a, b| {
        let ta = (a.1 as f64).atan2(a.0 as f64);
        let tb = (b.1 as f64).atan2(b.0 as f64);
        ta.partial_cmp(&tb).unwrap()
    });
    frames
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Axis-aligned bounding box of the closed domain.
pub(crate) fn domain_bbox(spec: &DomainSpec) -> (f64, f64, f64, f64) {
    match spec {
        DomainSpec::OmegaGamma { omega, gamma } => {
            let xm = closed_form::profile_x_max(*omega, *gamma);
            let ym = closed_form::profile_x_max(*omega, 1.0 / *gamma);
            (-xm, xm, -ym, ym)
        }
        DomainSpec::Square { halfside } => (-halfside, *halfside, -halfside, *halfside),
        DomainSpec::Scaled { base, delta } => {
            let (x0, x1, y0, y1) = domain_bbox(base);
            (delta * x0, delta * x1, delta * y0, delta * y1)
        }
        DomainSpec::Sheared { omega, gamma, a } => {
            let xm = closed_form::profile_x_max(*omega, *gamma);
            let ym = closed_form::profile_x_max(*omega, 1.0 / *gamma);
            // The shear maps (x, y) to (c_xx·x, c_yx·x + y); the image of
            // the base bounding box is a parallelogram containing the
            // image domain.
            let (c, _) = closed_form::shear_matrix(*a).expect("validated spec");
            let x_ext = c.xx * xm;
            let y_ext = c.yx.abs() * xm + ym;
            (-x_ext, x_ext, -y_ext, y_ext)
        }
    }
}

/// Exit fraction of the segment from interior point `from` toward `to`
/// (which is not interior), bisected on strict membership to `CUT_TOL`
/// relative to the cell size. Domains are convex, so the crossing is
/// unique.
fn cut_fraction(spec: &DomainSpec, from: (f64, f64), to: (f64, f64), leg_cells: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let tol = CUT_TOL / leg_cells;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let p = (from.0 + mid * (to.0 - from.0), from.1 + mid * (to.1 - from.1));
        if closed_form::contains(spec, p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).clamp(CUT_FLOOR, 1.0)
}

/// Builds the interior lattice of `spec` with spacing `h` and the stencil
/// legs for width `w`. The lattice is anchored at the origin and covers the
/// closed domain with one cell of margin; interiority is strict membership.
pub fn build_grid(spec: &DomainSpec, h: f64, w: u32) -> Result<(Grid, StencilSet)> {
    spec.validate()?;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::parameter("grid spacing must be positive"));
    }
    if !(1..=16).contains(&w) {
        return Err(Error::parameter("stencil width must be in 1..=16"));
    }
    let (x0, x1, y0, y1) = domain_bbox(spec);
    let i_min = ((x0 - h) / h).floor() as i64;
    let i_max = ((x1 + h) / h).ceil() as i64;
    let j_min = ((y0 - h) / h).floor() as i64;
    let j_max = ((y1 + h) / h).ceil() as i64;
    let nx = (i_max - i_min + 1) as usize;
    let ny = (j_max - j_min + 1) as usize;
    if nx.saturating_mul(ny) > MAX_CELLS {
        return Err(Error::Grid(format!(
            "lattice {nx}×{ny} exceeds the cell cap; increase h"
        )));
    }

    let mut index = vec![u32::MAX; nx * ny];
    let mut points = Vec::new();
    for j in j_min..=j_max {
        for i in i_min..=i_max {
            let p = (i as f64 * h, j as f64 * h);
            if closed_form::contains(spec, p) {
                let cell = ((j - j_min) as usize) * nx + ((i - i_min) as usize);
                if points.len() == u32::MAX as usize {
                    return Err(Error::Grid("interior point count overflow".to_string()));
                }
                index[cell] = points.len() as u32;
                points.push(p);
            }
        }
    }
    if points.is_empty() {
        return Err(Error::Grid(
            "no interior lattice points; decrease h".to_string(),
        ));
    }

    let mut grid = Grid {
        h,
        i_min,
        j_min,
        nx,
        ny,
        index,
        points,
        connected: true,
    };
    grid.connected = interior_is_connected(&grid);

    let frames = stencil_frames(w);
    let len2: Vec<f64> = frames.iter().map(|&(p, q)| (p * p + q * q) as f64).collect();
    let mut legs = Vec::with_capacity(grid.n_interior() * frames.len() * 4);
    for ix in 0..grid.n_interior() {
        let (i, j) = grid.lattice_of(ix);
        let from = grid.points[ix];
        for (k, &(p, q)) in frames.iter().enumerate() {
            for (dp, dq) in [(p, q), (-p, -q), (-q, p), (q, -p)] {
                if let Some(nbr) = grid.interior_at(i + dp, j + dq) {
                    legs.push(Leg { neighbor: Some(nbr), s: 1.0 });
                } else {
                    let to = (from.0 + dp as f64 * h, from.1 + dq as f64 * h);
                    let s = cut_fraction(spec, from, to, len2[k].sqrt());
                    legs.push(Leg { neighbor: None, s });
                }
            }
        }
    }

    Ok((grid, StencilSet { w, frames, len2, legs }))
}

fn interior_is_connected(grid: &Grid) -> bool {
    let n = grid.n_interior();
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    seen[0] = true;
    queue.push_back(0usize);
    let mut reached = 1usize;
    while let Some(ix) = queue.pop_front() {
        let (i, j) = grid.lattice_of(ix);
        for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            if let Some(nbr) = grid.interior_at(i + di, j + dj) {
                let nbr = nbr as usize;
                if !seen[nbr] {
                    seen[nbr] = true;
                    reached += 1;
                    queue.push_back(nbr);
                }
            }
        }
    }
    reached == n
}

/// Largest Bellman value over coefficient choices in {λ, Λ}² for the pair
/// of second differences (dv, dw), together with the choice encoded as
/// bit0 = first coefficient is Λ, bit1 = second is Λ. Ties keep the lowest
/// code, i.e. prefer λ.
#[inline]
fn bellman_coeffs(ell: &EllipticityPair, dv: f64, dw: f64) -> (f64, u8) {
    let (lam, big) = (ell.lambda(), ell.big_lambda());
    let mut best = lam * dv + lam * dw;
    let mut code = 0u8;
    for (c, a, b) in [(1u8, big, lam), (2, lam, big), (3, big, big)] {
        let val = a * dv + b * dw;
        if val > best {
            best = val;
            code = c;
        }
    }
    (best, code)
}

/// Applies the discrete extremal operator to `field` (one value per
/// interior point): the maximum over direction pairs and endpoint
/// coefficients of the two-term directional Laplacian, with zero boundary
/// values on cut legs.
pub fn discrete_pucci_plus(
    grid: &Grid,
    stencils: &StencilSet,
    field: &[f64],
    ell: &EllipticityPair,
) -> Result<Vec<f64>> {
    if field.len() != grid.n_interior() {
        return Err(Error::invalid(format!(
            "field has {} values for {} interior points",
            field.len(),
            grid.n_interior()
        )));
    }
    let nf = stencils.frames().len();
    let mut out = vec![0.0; grid.n_interior()];
    for ix in 0..grid.n_interior() {
        let u0 = field[ix];
        let mut best = f64::NEG_INFINITY;
        for k in 0..nf {
            let (dv, dw) = stencils.pair_second_diffs(ix, k, grid.h(), field, u0);
            let (val, _) = bellman_coeffs(ell, dv, dw);
            if val > best {
                best = val;
            }
        }
        out[ix] = best;
    }
    Ok(out)
}

/// Marks the interior points whose stencil legs all reach interior
/// neighbors (no boundary cuts), where full-leg exactness statements apply.
pub fn full_leg_points(grid: &Grid, stencils: &StencilSet) -> Vec<bool> {
    let nf = stencils.frames().len();
    (0..grid.n_interior())
        .map(|ix| (0..nf).all(|k| stencils.legs_at(ix, k).iter().all(|l| l.neighbor.is_some())))
        .collect()
}

/// Eigenvalue of the domain scaled by `delta`, from the eigenvalue of the
/// base domain: scaling lengths by δ divides curvatures, hence the
/// eigenvalue, by δ².
pub fn rescale_eigenvalue(mu: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::parameter("scale factor must be positive and finite"));
    }
    Ok(mu / (delta * delta))
}
