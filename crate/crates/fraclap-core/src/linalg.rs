//! Dense symmetric linear algebra at desk scale: Cholesky factorization,
//! tridiagonal SPD solves, and simple spectral condition estimates.

use crate::error::{Error, Result};
use crate::mth;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Dense symmetric matrix stored row-major (full storage, n×n).
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Largest absolute symmetry defect `max |A_ij − A_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut d = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                d = mth::fmax(d, mth::abs(self.get(i, j) - self.get(j, i)));
            }
        }
        d
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            let mut acc = 0.0;
            for (a, xv) in row.iter().zip(x.iter()) {
                acc += a * xv;
            }
            y[i] = acc;
        }
        y
    }

    /// Quadratic form `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let ax = self.mul_vec(x);
        dot(x, &ax)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x * y;
    }
    acc
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    mth::sqrt(dot(a, a))
}

/// Lower-triangular Cholesky factor of an SPD matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>, // row-major lower triangle in full storage
}

impl Cholesky {
    /// Factor `A = L Lᵀ`. Fails with [`Error::LinearSolve`] when a pivot is
    /// not strictly positive (matrix not numerically SPD).
    pub fn factor(a: &SymMatrix) -> Result<Self> {
        let n = a.n;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a.get(i, j);
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(Error::LinearSolve(format!(
                            "pivot {sum:.3e} at row {i}: matrix is not positive definite"
                        )));
                    }
                    l[i * n + i] = mth::sqrt(sum);
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Ok(Cholesky { n, l })
    }

    /// Solve `A x = b` using the stored factor.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut y = b.to_vec();
        // forward: L y = b
        for i in 0..n {
            let mut sum = y[i];
            for k in 0..i {
                sum -= self.l[i * n + k] * y[k];
            }
            y[i] = sum / self.l[i * n + i];
        }
        // backward: Lᵀ x = y
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in (i + 1)..n {
                sum -= self.l[k * n + i] * y[k];
            }
            y[i] = sum / self.l[i * n + i];
        }
        y
    }
}

/// Spectral condition estimate of an SPD matrix: λ_max by power iteration,
/// λ_min by inverse power iteration through a Cholesky factor. Deterministic
/// start vector, fixed iteration count — an estimate, not a guarantee.
pub fn condition_estimate(a: &SymMatrix, chol: &Cholesky) -> f64 {
    let n = a.n;
    if n == 0 {
        return 1.0;
    }
    let mut v = vec![0.0; n];
    for (i, vi) in v.iter_mut().enumerate() {
        // fixed, non-degenerate start vector
        *vi = 1.0 + 0.5 * mth::sin(1.0 + i as f64);
    }
    let nv = norm2(&v);
    for vi in v.iter_mut() {
        *vi /= nv;
    }
    let mut w = v.clone();
    let mut lam_max = 0.0;
    for _ in 0..30 {
        let av = a.mul_vec(&w);
        lam_max = dot(&w, &av);
        let nn = norm2(&av);
        if nn == 0.0 {
            break;
        }
        for (wi, avi) in w.iter_mut().zip(av.iter()) {
            *wi = avi / nn;
        }
    }
    let mut u = v;
    let mut lam_min = lam_max;
    for _ in 0..30 {
        let x = chol.solve(&u);
        let nn = norm2(&x);
        if nn == 0.0 {
            break;
        }
        for (ui, xi) in u.iter_mut().zip(x.iter()) {
            *ui = xi / nn;
        }
        let au = a.mul_vec(&u);
        lam_min = dot(&u, &au);
    }
    if lam_min <= 0.0 {
        return f64::INFINITY;
    }
    lam_max / lam_min
}

/// Solve the SPD tridiagonal system with diagonal `d` and off-diagonal `e`
/// (`e[i]` couples rows i and i+1) by the Thomas algorithm.
pub fn tridiag_spd_solve(d: &[f64], e: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    assert_eq!(e.len() + 1, n.max(1));
    assert_eq!(b.len(), n);
    let mut c = vec![0.0; n]; // modified off-diagonals
    let mut x = vec![0.0; n];
    let mut piv = d[0];
    if piv <= 0.0 {
        return Err(Error::LinearSolve(format!("tridiagonal pivot {piv:.3e} ≤ 0 at row 0")));
    }
    x[0] = b[0] / piv;
    for i in 1..n {
        c[i - 1] = e[i - 1] / piv;
        piv = d[i] - e[i - 1] * c[i - 1];
        if piv <= 0.0 {
            return Err(Error::LinearSolve(format!(
                "tridiagonal pivot {piv:.3e} ≤ 0 at row {i}"
            )));
        }
        x[i] = (b[i] - e[i - 1] * x[i - 1]) / piv;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        // A = tridiag(-1, 2, -1) (4×4), b = ones
        let n = 4;
        let mut a = SymMatrix::zeros(n);
        for i in 0..n {
            a.set(i, i, 2.0);
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
                a.set(i + 1, i, -1.0);
            }
        }
        let ch = Cholesky::factor(&a).unwrap();
        let x = ch.solve(&[1.0, 1.0, 1.0, 1.0]);
        // exact solution of the discrete Poisson problem: x = [2, 3, 3, 2]
        for (got, want) in x.iter().zip([2.0, 3.0, 3.0, 2.0]) {
            assert!(mth::abs(got - want) < 1e-12);
        }
        let ax = a.mul_vec(&x);
        for v in ax {
            assert!(mth::abs(v - 1.0) < 1e-12);
        }

        // condition estimate close to the known spectrum of tridiag(-1,2,-1):
        // λ_k = 2 − 2 cos(kπ/5), so κ₂ = λ_4/λ_1 = (2+φ)/(2−φ) with the
        // golden ratio φ, ≈ 9.4721
        let pi = core::f64::consts::PI;
        let k2 = (2.0 - 2.0 * mth::cos(4.0 * pi / 5.0)) / (2.0 - 2.0 * mth::cos(pi / 5.0));
        let cond = condition_estimate(&a, &ch);
        assert!((cond - k2).abs() / k2 < 1e-2, "cond = {cond}, want ≈ {k2}");
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = SymMatrix::zeros(2);
        a.set(0, 0, 1.0);
        a.set(1, 1, -1.0);
        assert!(Cholesky::factor(&a).is_err());
    }

    #[test]
    fn thomas_matches_cholesky() {
        let n = 6;
        let d = vec![3.0; n];
        let e = vec![-1.0; n - 1];
        let b: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let x = tridiag_spd_solve(&d, &e, &b).unwrap();
        let mut a = SymMatrix::zeros(n);
        for i in 0..n {
            a.set(i, i, 3.0);
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
                a.set(i + 1, i, -1.0);
            }
        }
        let xc = Cholesky::factor(&a).unwrap().solve(&b);
        for (u, v) in x.iter().zip(xc.iter()) {
            assert!(mth::abs(u - v) < 1e-12);
        }
    }
}
