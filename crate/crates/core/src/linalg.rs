//! Banded LU for the 1D spatial operators.
//!
//! Entries farther than `band` from the diagonal (periodic wrap, ghost
//! extrapolation reaching past the stencil) are handled by a Woodbury
//! low-rank correction. No pivoting: every system assembled here is
//! diagonally dominant or symmetric positive definite up to boundary rows.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Sparse row-wise matrix, `rows[i]` lists `(column, value)`.
#[derive(Debug, Clone)]
pub struct SparseRows {
    pub n: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl SparseRows {
    pub fn new(n: usize) -> Self {
        Self { n, rows: vec![Vec::new(); n] }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if let Some(e) = self.rows[i].iter_mut().find(|e| e.0 == j) {
            e.1 += v;
        } else {
            self.rows[i].push((j, v));
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|&(j, v)| v * x[j]).sum()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                m[(i, j)] += v;
            }
        }
        m
    }
}

#[derive(Debug, Clone)]
struct BandedLu {
    n: usize,
    band: usize,
    /// Row-major `n × (2 band + 1)`, column offset `j − i + band`.
    data: Vec<f64>,
}

impl BandedLu {
    fn width(&self) -> usize {
        2 * self.band + 1
    }

    fn factor(n: usize, band: usize, mut data: Vec<f64>) -> Result<Self> {
        let w = 2 * band + 1;
        for k in 0..n {
            let pivot = data[k * w + band];
            if pivot.abs() < 1e-300 || !pivot.is_finite() {
                return Err(Error::SingularSystem(format!("zero pivot at row {k}")));
            }
            for i in (k + 1)..n.min(k + band + 1) {
                let lik = data[i * w + (k + band - i)] / pivot;
                data[i * w + (k + band - i)] = lik;
                for j in (k + 1)..n.min(k + band + 1) {
                    data[i * w + (j + band - i)] -= lik * data[k * w + (j + band - k)];
                }
            }
        }
        Ok(Self { n, band, data })
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        let (n, b, w) = (self.n, self.band, self.width());
        for i in 0..n {
            let lo = i.saturating_sub(b);
            let mut s = x[i];
            for j in lo..i {
                s -= self.data[i * w + (j + b - i)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let hi = (i + b + 1).min(n);
            let mut s = x[i];
            for j in (i + 1)..hi {
                s -= self.data[i * w + (j + b - i)] * x[j];
            }
            x[i] = s / self.data[i * w + b];
        }
    }
}

/// Factored `B + U Vᵀ`, with `B` banded and `Vᵀ` selecting columns.
#[derive(Debug, Clone)]
pub struct BandedSolver {
    lu: BandedLu,
    cols: Vec<usize>,
    /// `B⁻¹ U`, one vector per corner column.
    z: Vec<Vec<f64>>,
    cap: Option<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl BandedSolver {
    pub fn factor(a: &SparseRows, band: usize) -> Result<Self> {
        let n = a.n;
        let w = 2 * band + 1;
        let mut data = vec![0.0; n * w];
        let mut cols: Vec<usize> = Vec::new();
        let mut u: Vec<Vec<f64>> = Vec::new();
        for (i, row) in a.rows.iter().enumerate() {
            for &(j, v) in row {
                if i.abs_diff(j) <= band {
                    data[i * w + (j + band - i)] += v;
                } else {
                    let k = match cols.iter().position(|&c| c == j) {
                        Some(k) => k,
                        None => {
                            cols.push(j);
                            u.push(vec![0.0; n]);
                            cols.len() - 1
                        }
                    };
                    u[k][i] += v;
                }
            }
        }
        let lu = BandedLu::factor(n, band, data)?;
        let m = cols.len();
        let mut z = u;
        for zk in z.iter_mut() {
            lu.solve_in_place(zk);
        }
        let cap = if m > 0 {
            let mut c = DMatrix::<f64>::identity(m, m);
            for (r, &col) in cols.iter().enumerate() {
                for k in 0..m {
                    c[(r, k)] += z[k][col];
                }
            }
            let lu = c.lu();
            if !lu.is_invertible() {
                return Err(Error::SingularSystem("singular Woodbury capacitance".into()));
            }
            Some(lu)
        } else {
            None
        };
        Ok(Self { lu, cols, z, cap })
    }

    pub fn n(&self) -> usize {
        self.lu.n
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        self.lu.solve_in_place(x);
        if let Some(cap) = &self.cap {
            let vy = nalgebra::DVector::from_iterator(self.cols.len(), self.cols.iter().map(|&c| x[c]));
            let t = cap.solve(&vy).expect("capacitance factored as invertible");
            for (k, zk) in self.z.iter().enumerate() {
                let tk = t[k];
                for (xi, zi) in x.iter_mut().zip(zk) {
                    *xi -= tk * zi;
                }
            }
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Thomas algorithm for a tridiagonal system; `a` sub, `b` diag, `c` super.
pub fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut x = vec![0.0; n];
    if n == 0 {
        return Ok(x);
    }
    if b[0] == 0.0 {
        return Err(Error::SingularSystem("zero leading diagonal".into()));
    }
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let m = b[i] - a[i] * cp[i - 1];
        if m == 0.0 || !m.is_finite() {
            return Err(Error::SingularSystem(format!("zero pivot at row {i}")));
        }
        cp[i] = c[i] / m;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
    }
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_solve(a: &SparseRows, b: &[f64]) -> Vec<f64> {
        let m = a.to_dense();
        let x = m.lu().solve(&nalgebra::DVector::from_column_slice(b)).unwrap();
        x.iter().copied().collect()
    }

    #[test]
    fn tridiagonal_known_solution() {
        let x = solve_tridiagonal(&[0.0, -1.0, -1.0], &[2.0, 2.0, 2.0], &[-1.0, -1.0, 0.0], &[1.0, 0.0, 1.0]).unwrap();
        for xi in x {
            assert!((xi - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn periodic_tridiagonal_via_corners() {
        let n = 12;
        let mut a = SparseRows::new(n);
        for i in 0..n {
            a.add(i, i, 3.0);
            a.add(i, (i + 1) % n, -1.0);
            a.add(i, (i + n - 1) % n, -0.5);
        }
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let s = BandedSolver::factor(&a, 1).unwrap();
        let x = s.solve(&rhs);
        let r = a.matvec(&x);
        for (ri, bi) in r.iter().zip(&rhs) {
            assert!((ri - bi).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_detected() {
        let mut a = SparseRows::new(3);
        a.add(0, 1, 1.0);
        a.add(1, 1, 1.0);
        a.add(2, 2, 1.0);
        assert!(BandedSolver::factor(&a, 1).is_err());
    }

    proptest! {
        #[test]
        fn banded_matches_dense(
            n in 6usize..30,
            band in 1usize..3,
            seed in prop::collection::vec(-1.0f64..1.0, 200),
            corners in prop::collection::vec((0usize..30, 0usize..30, -0.3f64..0.3), 0..4),
        ) {
            let mut a = SparseRows::new(n);
            let mut k = 0;
            for i in 0..n {
                a.add(i, i, 6.0);
                for o in 1..=band {
                    if i + o < n { a.add(i, i + o, seed[k % 200]); k += 1; }
                    if i >= o { a.add(i, i - o, seed[k % 200]); k += 1; }
                }
            }
            for &(i, j, v) in &corners {
                a.add(i % n, j % n, v);
            }
            let rhs: Vec<f64> = (0..n).map(|i| seed[(i * 7) % 200]).collect();
            let x = BandedSolver::factor(&a, band).unwrap().solve(&rhs);
            let y = dense_solve(&a, &rhs);
            for (xi, yi) in x.iter().zip(&y) {
                prop_assert!((xi - yi).abs() < 1e-10);
            }
        }
    }
}
