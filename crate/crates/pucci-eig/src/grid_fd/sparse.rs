//! Minimal CSR kernel and deterministic linear solvers for the policy
//! systems.
//!
//! Every assembled policy matrix is an M-matrix with at most five nonzeros
//! per row, Jacobi-scalable to a well-conditioned system. The workhorse is
//! BiCGStab on the diagonally scaled system with a Gauss–Seidel fallback;
//! all reductions are sequential, so repeated runs are bit-identical.

use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<u32>,
    val: Vec<f64>,
}

impl Csr {
    /// Builds from per-row (column, value) lists; columns are sorted and
    /// must be unique within a row.
    pub fn from_rows(rows: Vec<Vec<(u32, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col = Vec::new();
        let mut val = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0), "duplicate column");
            for (c, v) in row {
                col.push(c);
                val.push(v);
            }
            row_ptr.push(col.len());
        }
        Csr { n, row_ptr, col, val }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.val[k] * x[self.col[k] as usize];
            }
            *yi = acc;
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (i, di) in d.iter_mut().enumerate() {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.col[k] as usize == i {
                    *di = self.val[k];
                }
            }
        }
        d
    }

    pub fn residual_inf(&self, x: &[f64], b: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (i, &bi) in b.iter().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.val[k] * x[self.col[k] as usize];
            }
            worst = worst.max((bi - acc).abs());
        }
        worst
    }

    /// M-matrix certificate: positive diagonal, non-positive off-diagonal,
    /// non-negative row sums up to roundoff, and strict dominance somewhere
    /// (the Dirichlet rows). This is the discrete maximum principle.
    pub fn is_m_matrix(&self) -> bool {
        let mut any_strict = false;
        for i in 0..self.n {
            let mut diag = 0.0;
            let mut rowsum = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let v = self.val[k];
                if self.col[k] as usize == i {
                    diag = v;
                } else if v > 0.0 {
                    return false;
                }
                rowsum += v;
            }
            if !(diag > 0.0) || rowsum < -1e-12 * diag {
                return false;
            }
            if rowsum > 1e-12 * diag {
                any_strict = true;
            }
        }
        any_strict
    }

    /// One Gauss–Seidel sweep in natural order for A x = b.
    fn gauss_seidel_sweep(&self, x: &mut [f64], b: &[f64]) {
        for i in 0..self.n {
            let mut acc = b[i];
            let mut diag = 1.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col[k] as usize;
                if j == i {
                    diag = self.val[k];
                } else {
                    acc -= self.val[k] * x[j];
                }
            }
            x[i] = acc / diag;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves A x = b for an M-matrix A to relative ∞-norm residual `rel_tol`.
///
/// BiCGStab on the Jacobi-scaled system, warm-startable; falls back to
/// Gauss–Seidel sweeps on breakdown or stagnation. Fully sequential.
pub fn solve_m_matrix(a: &Csr, b: &[f64], x0: Option<&[f64]>, rel_tol: f64) -> Result<Vec<f64>> {
    let n = a.n();
    assert_eq!(b.len(), n);
    let b_scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if b_scale == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = rel_tol * b_scale;

    let diag = a.diag();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::Monotonicity(
            "policy matrix has a non-positive diagonal".to_string(),
        ));
    }

    let mut x = match x0 {
        Some(x0) => x0.to_vec(),
        None => vec![0.0; n],
    };

    // Jacobi-scaled right-hand side and residual live in scaled space; the
    // exit test always uses the true unscaled residual.
    let bs: Vec<f64> = (0..n).map(|i| b[i] / diag[i]).collect();
    let scaled_matvec = |x: &[f64], y: &mut [f64]| {
        a.matvec(x, y);
        for i in 0..n {
            y[i] /= diag[i];
        }
    };

    let mut r = vec![0.0; n];
    scaled_matvec(&x, &mut r);
    for i in 0..n {
        r[i] = bs[i] - r[i];
    }
    let r_hat = r.clone();
    let mut rho: f64 = 1.0;
    let mut alpha: f64 = 1.0;
    let mut omega: f64 = 1.0;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];

    let max_bicg = 200 + 20 * (n as f64).sqrt() as usize;
    let mut broke_down = false;
    for _ in 0..max_bicg {
        let rho_next = dot(&r_hat, &r);
        if rho_next.abs() < 1e-300 || omega.abs() < 1e-300 {
            broke_down = true;
            break;
        }
        let beta = (rho_next / rho) * (alpha / omega);
        rho = rho_next;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        scaled_matvec(&p, &mut v);
        let denom = dot(&r_hat, &v);
        if denom.abs() < 1e-300 {
            broke_down = true;
            break;
        }
        alpha = rho / denom;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm2(&s) < 1e-16 * norm2(&bs) {
            for i in 0..n {
                x[i] += alpha * p[i];
            }
            if a.residual_inf(&x, b) <= target {
                return Ok(x);
            }
            scaled_matvec(&x, &mut r);
            for i in 0..n {
                r[i] = bs[i] - r[i];
            }
            continue;
        }
        scaled_matvec(&s, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            broke_down = true;
            break;
        }
        omega = dot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        // Cheap scaled gate before paying for the true residual.
        if norm2(&r) <= 0.1 * rel_tol * norm2(&bs) && a.residual_inf(&x, b) <= target {
            return Ok(x);
        }
    }

    // Gauss–Seidel polish: unconditionally convergent for M-matrices, slow
    // but only ever needed when BiCGStab stalls.
    let _ = broke_down;
    for sweep in 0..200_000usize {
        a.gauss_seidel_sweep(&mut x, b);
        if sweep % 16 == 15 && a.residual_inf(&x, b) <= target {
            return Ok(x);
        }
    }
    if a.residual_inf(&x, b) <= target {
        return Ok(x);
    }
    Err(Error::Iteration(format!(
        "linear solve stalled: residual {} vs target {target}",
        a.residual_inf(&x, b)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1D Dirichlet Laplacian on n points: tridiagonal (2, −1, −1)/h².
    fn laplacian_1d(n: usize, h: f64) -> Csr {
        let c = 1.0 / (h * h);
        let rows = (0..n)
            .map(|i| {
                let mut row = vec![(i as u32, 2.0 * c)];
                if i > 0 {
                    row.push(((i - 1) as u32, -c));
                }
                if i + 1 < n {
                    row.push(((i + 1) as u32, -c));
                }
                row
            })
            .collect();
        Csr::from_rows(rows)
    }

    #[test]
    fn csr_matvec_and_diag() {
        let a = Csr::from_rows(vec![
            vec![(0, 2.0), (1, -1.0)],
            vec![(0, -1.0), (1, 2.0)],
        ]);
        let mut y = vec![0.0; 2];
        a.matvec(&[1.0, 3.0], &mut y);
        assert_eq!(y, vec![-1.0, 5.0]);
        assert_eq!(a.diag(), vec![2.0, 2.0]);
        assert!(a.is_m_matrix());
    }

    #[test]
    fn m_matrix_certificate_rejects_bad_signs() {
        let a = Csr::from_rows(vec![
            vec![(0, 2.0), (1, 0.5)],
            vec![(0, -1.0), (1, 2.0)],
        ]);
        assert!(!a.is_m_matrix());
        // Zero row sums everywhere (no Dirichlet row): no strict dominance.
        let b = Csr::from_rows(vec![
            vec![(0, 1.0), (1, -1.0)],
            vec![(0, -1.0), (1, 1.0)],
        ]);
        assert!(!b.is_m_matrix());
    }

    #[test]
    fn solves_poisson_against_manufactured_solution() {
        // u(x) = x(1−x)/2 solves −u'' = 1 with zero boundary values.
        let n = 127;
        let h = 1.0 / (n as f64 + 1.0);
        let a = laplacian_1d(n, h);
        let b = vec![1.0; n];
        let x = solve_m_matrix(&a, &b, None, 1e-11).unwrap();
        for (i, &xi_val) in x.iter().enumerate() {
            let xi = (i as f64 + 1.0) * h;
            let exact = 0.5 * xi * (1.0 - xi);
            assert!((xi_val - exact).abs() < 1e-10, "at {xi}: {xi_val} vs {exact}");
        }
    }

    #[test]
    fn warm_start_is_accepted_and_refined() {
        let n = 64;
        let h = 1.0 / (n as f64 + 1.0);
        let a = laplacian_1d(n, h);
        let b: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.1).sin().abs() + 0.5).collect();
        let cold = solve_m_matrix(&a, &b, None, 1e-11).unwrap();
        let mut warm_guess = cold.clone();
        for v in &mut warm_guess {
            *v *= 1.0 + 1e-3;
        }
        let warm = solve_m_matrix(&a, &b, Some(&warm_guess), 1e-11).unwrap();
        assert!(a.residual_inf(&warm, &b) <= 1e-11 * b.iter().fold(0.0f64, |m, v| m.max(*v)));
        for i in 0..n {
            assert!((warm[i] - cold[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let a = laplacian_1d(8, 0.1);
        let x = solve_m_matrix(&a, &[0.0; 8], None, 1e-12).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }
}
