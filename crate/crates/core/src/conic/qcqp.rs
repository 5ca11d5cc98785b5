//! Convex QCQPs in complex variables `v` and real variables `t`, posed
//! through second-order cones:
//!
//! ```text
//!   minimize    q't
//!   subject to  sum_r |a_r v + c_r|^2 <= l(v, t)     (squared norm)
//!               || (a_r v + c_r)_r || <= l(v, t)     (norm)
//!               l(v, t) >= 0                          (affine)
//! ```
//!
//! where every `l` is real affine: `Re(g^H v) + d't + e`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::cone::Cone;
use super::ipm::{self, ConeProgram, IpmSettings, IpmStatus};
use super::{ConicError, SolveStatus, Solved};
use crate::linalg::CMatrix;

/// `sum_i a_i v_i + constant`.
#[derive(Debug, Clone, Default)]
pub struct ComplexForm {
    pub terms: Vec<(usize, Complex64)>,
    pub constant: Complex64,
}

impl ComplexForm {
    pub fn new(terms: Vec<(usize, Complex64)>) -> Self {
        Self {
            terms,
            constant: Complex64::new(0.0, 0.0),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: Complex64::new(c, 0.0),
        }
    }

    pub fn eval(&self, v: &[Complex64]) -> Complex64 {
        self.constant + self.terms.iter().map(|(i, a)| a * v[*i]).sum::<Complex64>()
    }
}

/// `Re(sum_i conj(g_i) v_i) + sum_j d_j t_j + constant`.
#[derive(Debug, Clone, Default)]
pub struct AffineForm {
    pub complex: Vec<(usize, Complex64)>,
    pub real: Vec<(usize, f64)>,
    pub constant: f64,
}

impl AffineForm {
    pub fn eval(&self, v: &[Complex64], t: &[f64]) -> f64 {
        self.constant
            + self.complex.iter().map(|(i, g)| (g.conj() * v[*i]).re).sum::<f64>()
            + self.real.iter().map(|(j, d)| d * t[*j]).sum::<f64>()
    }
}

#[derive(Debug, Clone)]
pub enum QcqpConstraint {
    SquaredNorm { forms: Vec<ComplexForm>, bound: AffineForm },
    Norm { forms: Vec<ComplexForm>, bound: AffineForm },
    Affine(AffineForm),
}

impl QcqpConstraint {
    /// `v_S^H Q v_S <= bound` for a Hermitian PSD `Q` over the variables
    /// `vars`. Fails when `Q` has a negative eigenvalue beyond rounding.
    pub fn quadratic(q: &CMatrix, vars: &[usize], bound: AffineForm) -> Result<Self, ConicError> {
        if q.nrows() != vars.len() || q.ncols() != vars.len() {
            return Err(ConicError::Malformed("quadratic form size mismatch".into()));
        }
        let eig = q.clone().symmetric_eigen();
        let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let low = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if low < -1e-10 * top.max(1e-300) {
            return Err(ConicError::NotConvex(low));
        }
        let forms = (0..vars.len())
            .filter(|&r| eig.eigenvalues[r] > 0.0)
            .map(|r| {
                let s = eig.eigenvalues[r].sqrt();
                ComplexForm::new(
                    vars.iter()
                        .enumerate()
                        .map(|(i, &var)| (var, eig.eigenvectors[(i, r)].conj() * s))
                        .collect(),
                )
            })
            .collect();
        Ok(QcqpConstraint::SquaredNorm { forms, bound })
    }

    /// Amount by which the constraint is violated at `(v, t)` (nonpositive
    /// when satisfied).
    pub fn violation(&self, v: &[Complex64], t: &[f64]) -> f64 {
        let sq = |forms: &[ComplexForm]| forms.iter().map(|f| f.eval(v).norm_sqr()).sum::<f64>();
        match self {
            QcqpConstraint::SquaredNorm { forms, bound } => sq(forms) - bound.eval(v, t),
            QcqpConstraint::Norm { forms, bound } => sq(forms).sqrt() - bound.eval(v, t),
            QcqpConstraint::Affine(bound) => -bound.eval(v, t),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct QcqpProblem {
    pub n_complex: usize,
    pub n_real: usize,
    /// Objective coefficients on the real variables.
    pub objective: Vec<f64>,
    pub constraints: Vec<QcqpConstraint>,
}

#[derive(Debug, Clone, Default)]
pub struct QcqpPoint {
    pub v: Vec<Complex64>,
    pub t: Vec<f64>,
}

/// Rows of an affine map `x -> r'x + k` over the real variable vector.
#[derive(Default)]
struct RowBuilder {
    coeffs: Vec<(usize, f64)>,
    constant: f64,
}

impl RowBuilder {
    fn affine(n_complex: usize, f: &AffineForm, scale: f64, shift: f64) -> Self {
        let mut r = Self::default();
        for (i, g) in &f.complex {
            r.coeffs.push((*i, scale * g.re));
            r.coeffs.push((n_complex + i, scale * g.im));
        }
        for (j, d) in &f.real {
            r.coeffs.push((2 * n_complex + j, scale * d));
        }
        r.constant = scale * f.constant + shift;
        r
    }

    /// Real and imaginary parts of `scale * form`.
    fn complex_parts(n_complex: usize, f: &ComplexForm, scale: f64) -> [Self; 2] {
        let mut re = Self::default();
        let mut im = Self::default();
        for (i, a) in &f.terms {
            re.coeffs.push((*i, scale * a.re));
            re.coeffs.push((n_complex + i, -scale * a.im));
            im.coeffs.push((*i, scale * a.im));
            im.coeffs.push((n_complex + i, scale * a.re));
        }
        re.constant = scale * f.constant.re;
        im.constant = scale * f.constant.im;
        [re, im]
    }
}

impl QcqpProblem {
    pub fn new(n_complex: usize, n_real: usize) -> Self {
        Self {
            n_complex,
            n_real,
            objective: vec![0.0; n_real],
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, c: QcqpConstraint) {
        self.constraints.push(c);
    }

    pub fn evaluate(&self, t: &[f64]) -> f64 {
        self.objective.iter().zip(t).map(|(q, x)| q * x).sum()
    }

    /// Largest constraint violation at `(v, t)`, relative to the size of
    /// the constraint's bound.
    pub fn max_violation(&self, p: &QcqpPoint) -> f64 {
        self.constraints
            .iter()
            .map(|c| {
                let bound = match c {
                    QcqpConstraint::SquaredNorm { bound, .. }
                    | QcqpConstraint::Norm { bound, .. }
                    | QcqpConstraint::Affine(bound) => bound.eval(&p.v, &p.t),
                };
                c.violation(&p.v, &p.t) / bound.abs().max(1.0)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn validate(&self) -> Result<(), ConicError> {
        let ok_form = |f: &ComplexForm| f.terms.iter().all(|(i, _)| *i < self.n_complex);
        let ok_aff = |a: &AffineForm| {
            a.complex.iter().all(|(i, _)| *i < self.n_complex)
                && a.real.iter().all(|(j, _)| *j < self.n_real)
        };
        if self.objective.len() != self.n_real {
            return Err(ConicError::Malformed("objective length differs from n_real".into()));
        }
        for c in &self.constraints {
            let ok = match c {
                QcqpConstraint::SquaredNorm { forms, bound } | QcqpConstraint::Norm { forms, bound } => {
                    forms.iter().all(ok_form) && ok_aff(bound)
                }
                QcqpConstraint::Affine(bound) => ok_aff(bound),
            };
            if !ok {
                return Err(ConicError::Malformed("variable index out of range".into()));
            }
        }
        Ok(())
    }

    /// Real variables `[Re v, Im v, t]`; affine constraints first as one
    /// orthant, then one second-order cone per norm constraint.
    pub fn to_cone_program(&self) -> ConeProgram {
        let nc = self.n_complex;
        let n = 2 * nc + self.n_real;
        let mut nonneg = Vec::new();
        let mut socs: Vec<Vec<RowBuilder>> = Vec::new();
        for con in &self.constraints {
            match con {
                QcqpConstraint::Affine(bound) => nonneg.push(RowBuilder::affine(nc, bound, 1.0, 0.0)),
                QcqpConstraint::SquaredNorm { forms, bound } => {
                    // |u|^2 <= l  <=>  (l + 1, l - 1, 2u) in SOC
                    let mut rows = vec![
                        RowBuilder::affine(nc, bound, 1.0, 1.0),
                        RowBuilder::affine(nc, bound, 1.0, -1.0),
                    ];
                    for f in forms {
                        rows.extend(RowBuilder::complex_parts(nc, f, 2.0));
                    }
                    socs.push(rows);
                }
                QcqpConstraint::Norm { forms, bound } => {
                    let mut rows = vec![RowBuilder::affine(nc, bound, 1.0, 0.0)];
                    for f in forms {
                        rows.extend(RowBuilder::complex_parts(nc, f, 1.0));
                    }
                    socs.push(rows);
                }
            }
        }
        let m = nonneg.len() + socs.iter().map(Vec::len).sum::<usize>();
        let mut g = DMatrix::zeros(m, n);
        let mut h = DVector::zeros(m);
        let mut cones = Vec::new();
        let mut row = 0;
        let mut emit = |r: &RowBuilder, row: usize| {
            // s = r'x + k  =>  G row = -r, h = k
            for (j, v) in &r.coeffs {
                g[(row, *j)] -= v;
            }
            h[row] = r.constant;
        };
        if !nonneg.is_empty() {
            cones.push(Cone::NonNeg(nonneg.len()));
            for r in &nonneg {
                emit(r, row);
                row += 1;
            }
        }
        for rows in &socs {
            cones.push(Cone::Soc(rows.len()));
            for r in rows {
                emit(r, row);
                row += 1;
            }
        }
        let mut c = DVector::zeros(n);
        for (j, q) in self.objective.iter().enumerate() {
            c[2 * nc + j] = *q;
        }
        ConeProgram::new(c, g, h, cones)
    }
}

pub fn solve_qcqp(p: &QcqpProblem, settings: &IpmSettings) -> Solved<QcqpPoint> {
    let fail = |status, iterations| Solved {
        status,
        objective: f64::NAN,
        primal: QcqpPoint::default(),
        iterations,
    };
    if p.validate().is_err() {
        return fail(SolveStatus::NumericalFailure, 0);
    }
    let prog = p.to_cone_program();
    let sol = ipm::solve(&prog, settings);
    match sol.status {
        IpmStatus::Optimal => {
            let nc = p.n_complex;
            let x = sol.x.as_slice();
            let v = (0..nc).map(|i| Complex64::new(x[i], x[nc + i])).collect();
            let t = x[2 * nc..].to_vec();
            Solved {
                status: SolveStatus::Optimal,
                objective: p.evaluate(&t),
                primal: QcqpPoint { v, t },
                iterations: sol.iterations,
            }
        }
        IpmStatus::PrimalInfeasible => fail(SolveStatus::Infeasible, sol.iterations),
        IpmStatus::DualInfeasible => fail(SolveStatus::Unbounded, sol.iterations),
        IpmStatus::NumericalFailure => fail(SolveStatus::NumericalFailure, sol.iterations),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn projection_problem(c: f64) -> QcqpProblem {
        let mut p = QcqpProblem::new(1, 1);
        p.objective[0] = 1.0;
        p.push(QcqpConstraint::SquaredNorm {
            forms: vec![ComplexForm::new(vec![(0, one())])],
            bound: AffineForm {
                real: vec![(0, 1.0)],
                ..Default::default()
            },
        });
        p.push(QcqpConstraint::Affine(AffineForm {
            complex: vec![(0, one())],
            constant: -c,
            ..Default::default()
        }));
        p
    }

    #[test]
    fn projection_closed_form() {
        let sol = solve_qcqp(&projection_problem(3.0), &IpmSettings::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 9.0).abs() < 1e-6);
        assert!((sol.primal.v[0].re - 3.0).abs() < 1e-6);
    }

    #[test]
    fn unconstrained_power_is_zero() {
        let mut p = QcqpProblem::new(3, 2);
        p.objective = vec![1.0, 1.0];
        for j in 0..2 {
            p.push(QcqpConstraint::SquaredNorm {
                forms: vec![ComplexForm::new(vec![(j, one())])],
                bound: AffineForm {
                    real: vec![(j, 1.0)],
                    ..Default::default()
                },
            });
        }
        p.push(QcqpConstraint::SquaredNorm {
            forms: vec![ComplexForm::new(vec![(2, one())])],
            bound: AffineForm {
                real: vec![(1, 1.0)],
                ..Default::default()
            },
        });
        let sol = solve_qcqp(&p, &IpmSettings::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(sol.objective.abs() < 1e-7);
        assert!(sol.primal.v.iter().all(|x| x.norm() < 1e-4));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut p = projection_problem(3.0);
        // Re v <= 1 together with Re v >= 3.
        p.push(QcqpConstraint::Affine(AffineForm {
            complex: vec![(0, -one())],
            constant: 1.0,
            ..Default::default()
        }));
        let sol = solve_qcqp(&p, &IpmSettings::default());
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn indefinite_form_is_rejected() {
        let q = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![one(), -one()]));
        assert!(matches!(
            QcqpConstraint::quadratic(&q, &[0, 1], AffineForm::default()),
            Err(ConicError::NotConvex(_))
        ));
    }
}
