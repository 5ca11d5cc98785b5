//! Complex vector helpers shared by the scenario model and the solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// `a^H b`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Real embedding `[[Re, -Im], [Im, Re]]` of a complex square matrix.
pub fn embed(m: &CMatrix) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for i in 0..n {
            let v = m[(i, j)];
            out[(i, j)] = v.re;
            out[(i + n, j + n)] = v.re;
            out[(i + n, j)] = v.im;
            out[(i, j + n)] = -v.im;
        }
    }
    out
}

/// Inverse of [`embed`], averaging the two copies so any real symmetric
/// matrix maps to the Hermitian matrix nearest to it in this structure.
pub fn unembed(x: &DMatrix<f64>) -> CMatrix {
    let n = x.nrows() / 2;
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let re = 0.5 * (x[(i, j)] + x[(i + n, j + n)]);
            let im = 0.5 * (x[(i + n, j)] - x[(i, j + n)]);
            out[(i, j)] = Complex64::new(re, im);
        }
    }
    // Enforce exact Hermitian symmetry.
    let adj = out.adjoint();
    (out + adj) * Complex64::new(0.5, 0.0)
}

/// `Re tr(A B)` for Hermitian `A`, `B`: the real trace inner product.
pub fn trace_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += (a[(i, j)].conj() * b[(i, j)]).re;
        }
    }
    acc
}

pub fn outer(v: &[Complex64]) -> CMatrix {
    let n = v.len();
    CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
