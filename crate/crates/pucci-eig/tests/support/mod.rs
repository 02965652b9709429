//! Shared helpers for the integration suites: an independent
//! Shortley–Weller five-point eigenvalue oracle (its own lattice walk,
//! banded LU, and plain inverse power iteration — no code shared with the
//! library's solver path), and a subprocess runner for the CLI binary.
//!
//! Each test target uses the subset it needs, hence the blanket
//! dead-code allowance. Range loops stay indexed: triangular
//! substitution reads earlier solution entries by offset, which iterator
//! forms only obscure.
#![allow(dead_code, clippy::needless_range_loop)]

use std::process::Output;

/// Banded symmetric-profile matrix stored as dense rows of width
/// 2·bandwidth+1; entry (i, j) lives at column j − i + bandwidth.
pub struct Banded {
    n: usize,
    bandwidth: usize,
    data: Vec<f64>,
}

impl Banded {
    pub fn new(n: usize, bandwidth: usize) -> Self {
        Banded {
            n,
            bandwidth,
            data: vec![0.0; n * (2 * bandwidth + 1)],
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.bandwidth >= i && j <= i + self.bandwidth);
        i * (2 * self.bandwidth + 1) + (j + self.bandwidth - i)
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// In-place LU factorization without pivoting; valid here because the
    /// assembled operator is strictly diagonally dominant column-wise
    /// (an M-matrix), which keeps elimination growth bounded.
    pub fn factor(&mut self) {
        let b = self.bandwidth;
        for k in 0..self.n {
            let piv = self.data[self.idx(k, k)];
            assert!(piv > 0.0, "pivot must stay positive for an M-matrix");
            for i in (k + 1)..self.n.min(k + b + 1) {
                let ik = self.idx(i, k);
                let l = self.data[ik] / piv;
                self.data[ik] = l;
                if l != 0.0 {
                    for j in (k + 1)..self.n.min(k + b + 1) {
                        let akj = self.data[self.idx(k, j)];
                        if akj != 0.0 {
                            let ij = self.idx(i, j);
                            self.data[ij] -= l * akj;
                        }
                    }
                }
            }
        }
    }

    /// Solves L·U·x = rhs using the stored factors.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let b = self.bandwidth;
        let mut x = rhs.to_vec();
        for i in 0..self.n {
            let lo = i.saturating_sub(b);
            let mut s = x[i];
            for j in lo..i {
                s -= self.data[self.idx(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..self.n).rev() {
            let hi = self.n.min(i + b + 1);
            let mut s = x[i];
            for j in (i + 1)..hi {
                s -= self.data[self.idx(i, j)] * x[j];
            }
            x[i] = s / self.data[self.idx(i, i)];
        }
        x
    }
}

/// Principal Dirichlet eigenvalue of −Δ on the square |x|,|y| < halfside,
/// discretized with the Shortley–Weller five-point scheme on the
/// origin-anchored lattice of spacing h, cut fractions computed in closed
/// form. Returns (eigenvalue, number of interior points).
pub fn five_point_square_eigenvalue(halfside: f64, h: f64, tol: f64) -> (f64, usize) {
    let m = (halfside / h).ceil() as i64;
    // Strictly interior lattice points, j-major to mirror a row-major scan.
    let mut index = std::collections::HashMap::new();
    let mut points = Vec::new();
    for j in -m..=m {
        for i in -m..=m {
            let (x, y) = (i as f64 * h, j as f64 * h);
            if x.abs() < halfside && y.abs() < halfside {
                index.insert((i, j), points.len());
                points.push((i, j));
            }
        }
    }
    let n = points.len();
    // Row index changes by at most one full lattice row between coupled
    // points.
    let bandwidth = (2 * m + 1) as usize;
    let mut a = Banded::new(n, bandwidth);

    // Fraction of the step h that stays inside when leaving `coord`
    // along the positive axis direction; 1 for a full interior step.
    let cut = |coord: f64| -> f64 {
        let s = (halfside - coord.abs()) / h;
        debug_assert!(s > 0.0 && s <= 1.0 + 1e-12);
        s.min(1.0)
    };

    for (row, &(i, j)) in points.iter().enumerate() {
        let (x, y) = (i as f64 * h, j as f64 * h);
        for (di, dj) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
            // s_plus along (di,dj), s_minus along the opposite leg; each
            // neighbor contributes once via its own (di,dj) entry, so only
            // the +leg coefficient and half the diagonal are added here.
            let (np, nm) = ((i + di, j + dj), (i - di, j - dj));
            let sp = if index.contains_key(&np) {
                1.0
            } else {
                cut(if di != 0 { x } else { y })
            };
            let sm = if index.contains_key(&nm) {
                1.0
            } else {
                cut(if di != 0 { x } else { y })
            };
            let cp = 2.0 / (h * h * sp * (sp + sm));
            // Off-diagonal only for true interior neighbors; the diagonal
            // picks up cp from each of the four directions.
            a.add(row, row, cp);
            if let Some(&col) = index.get(&np) {
                a.add(row, col, -cp);
            }
        }
    }

    a.factor();
    let mut u = vec![1.0; n];
    let mut mu = 0.0f64;
    for _ in 0..500 {
        let v = a.solve(&u);
        let vmax = v.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
        assert!(vmax > 0.0);
        let mu_next = 1.0 / vmax;
        for (ui, &vi) in u.iter_mut().zip(&v) {
            *ui = vi / vmax;
        }
        if (mu_next - mu).abs() <= tol * mu_next {
            return (mu_next, n);
        }
        mu = mu_next;
    }
    panic!("oracle power iteration did not converge to tol {tol:e}");
}

/// Runs the compiled CLI binary with the given arguments and returns the
/// full process output.
pub fn run_cli(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_pucci-eig"))
        .args(args)
        .output()
        .expect("failed to spawn the CLI binary")
}
