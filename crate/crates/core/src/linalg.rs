//! Small complex linear-algebra helpers: Hermitian positive-definite
//! Cholesky factorization and solves, with diagonal jitter for numerical
//! safety on nearly singular systems.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

/// Jitter added to the diagonal before factorizing.
pub const DEFAULT_JITTER: f64 = 1e-10;

/// Cholesky factor L (lower triangular) of a Hermitian positive definite
/// matrix, `A = L L^H`. Returns None if a pivot is non-positive even after
/// jitter.
pub fn cholesky(a: &Array2<Complex64>, jitter: f64) -> Option<Array2<Complex64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let scale = (0..n).map(|i| a[[i, i]].re.abs()).fold(0.0, f64::max).max(1.0);
    let mut l = Array2::<Complex64>::zeros((n, n));
    for j in 0..n {
        let mut d = a[[j, j]].re + jitter * scale;
        for k in 0..j {
            d -= l[[j, k]].norm_sqr();
        }
        if d <= 0.0 {
            return None;
        }
        let d = d.sqrt();
        l[[j, j]] = Complex64::new(d, 0.0);
        for i in (j + 1)..n {
            let mut v = a[[i, j]];
            for k in 0..j {
                v -= l[[i, k]] * l[[j, k]].conj();
            }
            l[[i, j]] = v / d;
        }
    }
    Some(l)
}

/// Solve `A x = b` given the Cholesky factor of A.
pub fn cholesky_solve(l: &Array2<Complex64>, b: &Array1<Complex64>) -> Array1<Complex64> {
    let n = l.nrows();
    let mut y = b.clone();
    for i in 0..n {
        for k in 0..i {
            let t = l[[i, k]] * y[k];
            y[i] -= t;
        }
        y[i] /= l[[i, i]];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let t = l[[k, i]].conj() * y[k];
            y[i] -= t;
        }
        y[i] /= l[[i, i]];
    }
    y
}

/// Solve the Hermitian positive definite system `A x = b` with jitter.
pub fn hermitian_solve(
    a: &Array2<Complex64>,
    b: &Array1<Complex64>,
    jitter: f64,
) -> Option<Array1<Complex64>> {
    cholesky(a, jitter).map(|l| cholesky_solve(&l, b))
}
