//! Symmetric cones and their Nesterov-Todd scalings.
//!
//! Vectors in a cone product are stored flat. A PSD block of order `n`
//! occupies `n * n` entries holding the full symmetric matrix in column-major
//! order, so the plain dot product of two blocks is the trace inner product.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// One factor of the cone product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cone {
    /// Nonnegative orthant of the given dimension.
    NonNeg(usize),
    /// Second-order cone `{(t, u) : ||u|| <= t}` of the given total dimension.
    Soc(usize),
    /// Symmetric positive semidefinite matrices of the given order.
    Psd(usize),
}

impl Cone {
    /// Number of stored entries.
    pub fn dim(&self) -> usize {
        match *self {
            Cone::NonNeg(n) | Cone::Soc(n) => n,
            Cone::Psd(n) => n * n,
        }
    }

    /// Barrier degree.
    pub fn degree(&self) -> usize {
        match *self {
            Cone::NonNeg(n) => n,
            Cone::Soc(_) => 1,
            Cone::Psd(n) => n,
        }
    }

    pub fn identity(&self, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        match *self {
            Cone::NonNeg(_) => out.iter_mut().for_each(|v| *v = 1.0),
            Cone::Soc(_) => out[0] = 1.0,
            Cone::Psd(n) => (0..n).for_each(|i| out[i * n + i] = 1.0),
        }
    }

    /// Smallest "eigenvalue" of `v` with respect to the cone: positive iff `v`
    /// is interior.
    pub fn margin(&self, v: &[f64]) -> f64 {
        match *self {
            Cone::NonNeg(_) => v.iter().copied().fold(f64::INFINITY, f64::min),
            Cone::Soc(_) => v[0] - norm(&v[1..]),
            Cone::Psd(n) => {
                if n == 0 {
                    return f64::INFINITY;
                }
                let m = sym_from_slice(n, v);
                m.symmetric_eigenvalues().min()
            }
        }
    }

    /// Jordan product `u o v`.
    pub fn jordan(&self, u: &[f64], v: &[f64], out: &mut [f64]) {
        match *self {
            Cone::NonNeg(_) => {
                for i in 0..out.len() {
                    out[i] = u[i] * v[i];
                }
            }
            Cone::Soc(_) => {
                out[0] = dot(u, v);
                for i in 1..out.len() {
                    out[i] = u[0] * v[i] + v[0] * u[i];
                }
            }
            Cone::Psd(n) => {
                let a = DMatrix::from_column_slice(n, n, u);
                let b = DMatrix::from_column_slice(n, n, v);
                let p = &a * &b;
                for j in 0..n {
                    for i in 0..n {
                        out[j * n + i] = 0.5 * (p[(i, j)] + p[(j, i)]);
                    }
                }
            }
        }
    }

    /// Solves `lambda o x = y` for `x`, where `lambda` is a scaled point
    /// (diagonal for PSD blocks).
    pub fn jordan_div(&self, lambda: &[f64], y: &[f64], out: &mut [f64]) {
        match *self {
            Cone::NonNeg(_) => {
                for i in 0..out.len() {
                    out[i] = y[i] / lambda[i];
                }
            }
            Cone::Soc(_) => {
                let l0 = lambda[0];
                let l1 = &lambda[1..];
                let det = l0 * l0 - dot(l1, l1);
                let x0 = (l0 * y[0] - dot(l1, &y[1..])) / det;
                out[0] = x0;
                for i in 1..out.len() {
                    out[i] = (y[i] - x0 * lambda[i]) / l0;
                }
            }
            Cone::Psd(n) => {
                for j in 0..n {
                    for i in 0..n {
                        let li = lambda[i * n + i];
                        let lj = lambda[j * n + j];
                        out[j * n + i] = 2.0 * y[j * n + i] / (li + lj);
                    }
                }
            }
        }
    }

    /// Largest `alpha` with `lambda + alpha * d` in the cone, for an interior
    /// scaled point `lambda`. Returns infinity when the ray never leaves.
    pub fn max_step(&self, lambda: &[f64], d: &[f64]) -> f64 {
        match *self {
            Cone::NonNeg(_) => {
                let mut a = f64::INFINITY;
                for (l, di) in lambda.iter().zip(d) {
                    if *di < 0.0 {
                        a = a.min(-l / di);
                    }
                }
                a
            }
            Cone::Soc(_) => soc_max_step(lambda, d),
            Cone::Psd(n) => {
                if n == 0 {
                    return f64::INFINITY;
                }
                let mut b = sym_from_slice(n, d);
                for j in 0..n {
                    let sj = lambda[j * n + j].sqrt();
                    for i in 0..n {
                        let si = lambda[i * n + i].sqrt();
                        b[(i, j)] /= si * sj;
                    }
                }
                let emin = b.symmetric_eigenvalues().min();
                if emin < 0.0 {
                    -1.0 / emin
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

fn soc_max_step(x: &[f64], d: &[f64]) -> f64 {
    // f(a) = (x0 + a d0)^2 - ||x1 + a d1||^2 = qa a^2 + 2 qb a + qc
    let qa = d[0] * d[0] - dot(&d[1..], &d[1..]);
    let qb = x[0] * d[0] - dot(&x[1..], &d[1..]);
    let qc = (x[0] * x[0] - dot(&x[1..], &x[1..])).max(0.0);
    let scale = qa.abs().max(qb.abs()).max(qc);
    let mut best = f64::INFINITY;
    if qa.abs() <= 1e-14 * scale {
        if qb < 0.0 {
            best = -qc / (2.0 * qb);
        }
    } else {
        let disc = qb * qb - qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // Stable roots of qa a^2 + 2 qb a + qc.
            let q = -(qb + qb.signum() * sq);
            let r1 = if q != 0.0 { qc / q } else { f64::INFINITY };
            let r2 = q / qa;
            for r in [r1, r2] {
                if r > 0.0 && r < best {
                    best = r;
                }
            }
        }
    }
    // Guard the other nappe: x0 + a d0 must stay nonnegative.
    if d[0] < 0.0 {
        best = best.min(-x[0] / d[0]);
    }
    best
}

/// Nesterov-Todd scaling of one cone at an interior pair `(s, z)`.
#[derive(Debug, Clone)]
pub enum Scaling {
    /// `W = diag(d)`.
    NonNeg { d: Vec<f64> },
    /// Dense symmetric `W` and its inverse.
    Soc { w: DMatrix<f64>, winv: DMatrix<f64> },
    /// `W(V) = R^T V R`.
    Psd { r: DMatrix<f64>, rinv: DMatrix<f64> },
    /// `W = I`, used for the starting point.
    Identity,
}

impl Scaling {
    /// Computes the scaling and the scaled point `lambda = W z = W^{-T} s`.
    /// Returns `None` when either point is not strictly interior.
    pub fn compute(cone: &Cone, s: &[f64], z: &[f64]) -> Option<(Scaling, Vec<f64>)> {
        match *cone {
            Cone::NonNeg(_) => {
                if s.iter().chain(z).any(|v| !(*v > 0.0)) {
                    return None;
                }
                let d: Vec<f64> = s.iter().zip(z).map(|(a, b)| (a / b).sqrt()).collect();
                let lambda = s.iter().zip(z).map(|(a, b)| (a * b).sqrt()).collect();
                Some((Scaling::NonNeg { d }, lambda))
            }
            Cone::Soc(n) => {
                let sj = jnorm(s)?;
                let zj = jnorm(z)?;
                let beta = (sj / zj).sqrt();
                let sn: Vec<f64> = s.iter().map(|v| v / sj).collect();
                let zn: Vec<f64> = z.iter().map(|v| v / zj).collect();
                let gamma = ((1.0 + dot(&sn, &zn)) / 2.0).sqrt();
                let mut wbar = vec![0.0; n];
                wbar[0] = (sn[0] + zn[0]) / (2.0 * gamma);
                for i in 1..n {
                    wbar[i] = (sn[i] - zn[i]) / (2.0 * gamma);
                }
                // W = beta (2 v v' - J) with v = (wbar + e) / sqrt(2 (wbar0 + 1)).
                let vnorm = (2.0 * (wbar[0] + 1.0)).sqrt();
                let mut v = wbar.clone();
                v[0] += 1.0;
                v.iter_mut().for_each(|x| *x /= vnorm);
                let mut w = DMatrix::zeros(n, n);
                let mut winv = DMatrix::zeros(n, n);
                for j in 0..n {
                    for i in 0..n {
                        let sign = |k: usize| if k == 0 { 1.0 } else { -1.0 };
                        let jdiag = if i == j { sign(i) } else { 0.0 };
                        w[(i, j)] = beta * (2.0 * v[i] * v[j] - jdiag);
                        winv[(i, j)] = (2.0 * sign(i) * v[i] * sign(j) * v[j] - jdiag) / beta;
                    }
                }
                let lambda = (&w * DVector::from_column_slice(z)).as_slice().to_vec();
                Some((Scaling::Soc { w, winv }, lambda))
            }
            Cone::Psd(n) => {
                if n == 0 {
                    return Some((
                        Scaling::Psd {
                            r: DMatrix::zeros(0, 0),
                            rinv: DMatrix::zeros(0, 0),
                        },
                        Vec::new(),
                    ));
                }
                let sm = sym_from_slice(n, s);
                let zm = sym_from_slice(n, z);
                let ls = sm.cholesky()?.l();
                let lz = zm.cholesky()?.l();
                let m = lz.transpose() * &ls;
                let svd = m.svd(false, true);
                let v_t = svd.v_t?;
                let sig = svd.singular_values;
                if sig.iter().any(|v| !(*v > 0.0)) {
                    return None;
                }
                let ls_inv = ls.solve_lower_triangular(&DMatrix::identity(n, n))?;
                let mut r = ls * v_t.transpose();
                let mut rinv = &v_t * ls_inv;
                for k in 0..n {
                    let f = sig[k].sqrt();
                    r.column_mut(k).scale_mut(1.0 / f);
                    rinv.row_mut(k).scale_mut(f);
                }
                let mut lambda = vec![0.0; n * n];
                for k in 0..n {
                    lambda[k * n + k] = sig[k];
                }
                Some((Scaling::Psd { r, rinv }, lambda))
            }
        }
    }

    fn psd_apply(left: &DMatrix<f64>, v: &[f64], right: &DMatrix<f64>, out: &mut [f64]) {
        let n = left.nrows();
        let vm = sym_from_slice(n, v);
        let p = left * vm * right;
        for j in 0..n {
            for i in 0..n {
                out[j * n + i] = 0.5 * (p[(i, j)] + p[(j, i)]);
            }
        }
    }

    /// `W v`.
    pub fn w(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Scaling::NonNeg { d } => (0..v.len()).for_each(|i| out[i] = d[i] * v[i]),
            Scaling::Soc { w, .. } => gemv(w, v, out),
            Scaling::Psd { r, .. } => Self::psd_apply(&r.transpose(), v, r, out),
            Scaling::Identity => out.copy_from_slice(v),
        }
    }

    /// `W^T v`.
    pub fn wt(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Psd { r, .. } => Self::psd_apply(r, v, &r.transpose(), out),
            _ => self.w(v, out),
        }
    }

    /// `W^{-1} v`.
    pub fn winv(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Scaling::NonNeg { d } => (0..v.len()).for_each(|i| out[i] = v[i] / d[i]),
            Scaling::Soc { winv, .. } => gemv(winv, v, out),
            Scaling::Psd { rinv, .. } => Self::psd_apply(&rinv.transpose(), v, rinv, out),
            Scaling::Identity => out.copy_from_slice(v),
        }
    }

    /// `W^{-T} v`.
    pub fn winv_t(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Psd { rinv, .. } => Self::psd_apply(rinv, v, &rinv.transpose(), out),
            _ => self.winv(v, out),
        }
    }
}

fn gemv(m: &DMatrix<f64>, v: &[f64], out: &mut [f64]) {
    let n = m.nrows();
    for i in 0..n {
        out[i] = 0.0;
    }
    for j in 0..m.ncols() {
        let vj = v[j];
        if vj == 0.0 {
            continue;
        }
        for i in 0..n {
            out[i] += m[(i, j)] * vj;
        }
    }
}

fn jnorm(v: &[f64]) -> Option<f64> {
    let q = v[0] * v[0] - dot(&v[1..], &v[1..]);
    (v[0] > 0.0 && q > 0.0).then(|| q.sqrt())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Symmetrized matrix view of a stored PSD block.
pub(crate) fn sym_from_slice(n: usize, v: &[f64]) -> DMatrix<f64> {
    let m = DMatrix::from_column_slice(n, n, v);
    (&m + m.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    fn soc_point(v: &[f64]) -> Vec<f64> {
        let mut p = v.to_vec();
        p[0] = norm(&v[1..]) + 0.5 + v[0].abs();
        p
    }

    #[test]
    fn soc_scaling_maps_both_points_to_lambda() {
        let s = soc_point(&[0.3, 1.0, -2.0, 0.5]);
        let z = soc_point(&[1.1, -0.2, 0.7, 0.1]);
        let cone = Cone::Soc(4);
        let (w, lambda) = Scaling::compute(&cone, &s, &z).unwrap();
        let mut ws = vec![0.0; 4];
        w.winv_t(&s, &mut ws);
        for i in 0..4 {
            assert!((ws[i] - lambda[i]).abs() < 1e-10, "{ws:?} vs {lambda:?}");
        }
        let mut back = vec![0.0; 4];
        w.winv(&lambda, &mut back);
        for i in 0..4 {
            assert!((back[i] - z[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn psd_scaling_diagonalizes() {
        let n = 3;
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0]);
        let b = DMatrix::from_row_slice(3, 3, &[1.0, -0.4, 0.0, -0.4, 2.0, 0.5, 0.0, 0.5, 3.0]);
        let cone = Cone::Psd(n);
        let (w, lambda) = Scaling::compute(&cone, a.as_slice(), b.as_slice()).unwrap();
        let mut wz = vec![0.0; 9];
        w.w(b.as_slice(), &mut wz);
        let mut ws = vec![0.0; 9];
        w.winv_t(a.as_slice(), &mut ws);
        for i in 0..9 {
            assert!((wz[i] - lambda[i]).abs() < 1e-10);
            assert!((ws[i] - lambda[i]).abs() < 1e-10);
        }
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(lambda[j * 3 + i].abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn soc_jordan_division_inverts_product() {
        let cone = Cone::Soc(3);
        let l = [2.0, 0.5, -0.7];
        let x = [0.3, -1.0, 0.4];
        let mut y = [0.0; 3];
        cone.jordan(&l, &x, &mut y);
        let mut back = [0.0; 3];
        cone.jordan_div(&l, &y, &mut back);
        for i in 0..3 {
            assert!((back[i] - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn soc_step_hits_boundary() {
        let cone = Cone::Soc(2);
        // (1, 0) + a (0, 1) leaves the cone at a = 1
        let a = cone.max_step(&[1.0, 0.0], &[0.0, 1.0]);
        assert!((a - 1.0).abs() < 1e-12);
        assert!(cone.max_step(&[1.0, 0.0], &[1.0, 0.5]).is_infinite());
    }

    #[test]
    fn psd_step_hits_boundary() {
        let cone = Cone::Psd(2);
        let lambda = [2.0, 0.0, 0.0, 1.0];
        let d = [-1.0, 0.0, 0.0, 0.0];
        assert!((cone.max_step(&lambda, &d) - 2.0).abs() < 1e-12);
    }
}
