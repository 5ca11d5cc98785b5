//! Primal-dual interior-point method for cone programs
//!
//! ```text
//!   minimize    c'x
//!   subject to  G x + s = h,   A x = b,   s in K
//! ```
//!
//! with dual
//!
//! ```text
//!   maximize    -h'z - b'y
//!   subject to  G'z + A'y + c = 0,   z in K
//! ```
//!
//! The iteration runs on the homogeneous self-dual embedding with
//! Nesterov-Todd scaling and a Mehrotra predictor-corrector, so infeasibility
//! of either side is detected from certificates rather than by divergence.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::cone::{dot, norm, Cone, Scaling};

/// A cone program in the `G x + s = h` form.
#[derive(Debug, Clone)]
pub struct ConeProgram {
    pub c: DVector<f64>,
    pub g: DMatrix<f64>,
    pub h: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub cones: Vec<Cone>,
}

impl ConeProgram {
    /// Program without equality constraints.
    pub fn new(c: DVector<f64>, g: DMatrix<f64>, h: DVector<f64>, cones: Vec<Cone>) -> Self {
        let n = c.len();
        Self {
            c,
            g,
            h,
            a: DMatrix::zeros(0, n),
            b: DVector::zeros(0),
            cones,
        }
    }

    pub fn with_equalities(mut self, a: DMatrix<f64>, b: DVector<f64>) -> Self {
        self.a = a;
        self.b = b;
        self
    }

    pub fn n_vars(&self) -> usize {
        self.c.len()
    }

    pub fn cone_dim(&self) -> usize {
        self.cones.iter().map(Cone::dim).sum()
    }

    fn check(&self) -> Result<(), String> {
        let n = self.c.len();
        let m = self.cone_dim();
        if self.g.nrows() != m || self.g.ncols() != n {
            return Err(format!(
                "G is {}x{}, expected {}x{}",
                self.g.nrows(),
                self.g.ncols(),
                m,
                n
            ));
        }
        if self.h.len() != m {
            return Err(format!("h has length {}, expected {}", self.h.len(), m));
        }
        if self.a.ncols() != n || self.a.nrows() != self.b.len() {
            return Err("A/b dimensions disagree".into());
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !(finite(self.c.as_slice())
            && finite(self.g.as_slice())
            && finite(self.h.as_slice())
            && finite(self.a.as_slice())
            && finite(self.b.as_slice()))
        {
            return Err("non-finite problem data".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IpmSettings {
    pub max_iter: usize,
    pub feastol: f64,
    pub abstol: f64,
    pub reltol: f64,
}

impl Default for IpmSettings {
    fn default() -> Self {
        Self {
            max_iter: 100,
            feastol: 1e-9,
            abstol: 1e-10,
            reltol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IpmStatus {
    Optimal,
    /// Certificate that `G x + s = h, A x = b, s in K` is empty.
    PrimalInfeasible,
    /// Certificate that the dual is empty (primal unbounded when feasible).
    DualInfeasible,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct IpmSolution {
    pub status: IpmStatus,
    pub x: DVector<f64>,
    pub s: DVector<f64>,
    pub y: DVector<f64>,
    pub z: DVector<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
}

struct Layout {
    cones: Vec<Cone>,
    offsets: Vec<usize>,
    degree: usize,
}

impl Layout {
    fn new(cones: &[Cone]) -> Self {
        let mut offsets = Vec::with_capacity(cones.len() + 1);
        let mut o = 0;
        for c in cones {
            offsets.push(o);
            o += c.dim();
        }
        offsets.push(o);
        Self {
            cones: cones.to_vec(),
            offsets,
            degree: cones.iter().map(Cone::degree).sum(),
        }
    }

    fn range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    fn margin(&self, v: &[f64]) -> f64 {
        (0..self.cones.len())
            .map(|k| self.cones[k].margin(&v[self.range(k)]))
            .fold(f64::INFINITY, f64::min)
    }

    fn identity(&self) -> Vec<f64> {
        let mut e = vec![0.0; *self.offsets.last().unwrap()];
        for k in 0..self.cones.len() {
            let r = self.range(k);
            self.cones[k].identity(&mut e[r]);
        }
        e
    }

    fn jordan(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        for k in 0..self.cones.len() {
            let r = self.range(k);
            self.cones[k].jordan(&u[r.clone()], &v[r.clone()], &mut out[r]);
        }
        out
    }

    fn jordan_div(&self, lambda: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; y.len()];
        for k in 0..self.cones.len() {
            let r = self.range(k);
            self.cones[k].jordan_div(&lambda[r.clone()], &y[r.clone()], &mut out[r]);
        }
        out
    }

    fn max_step(&self, lambda: &[f64], d: &[f64]) -> f64 {
        (0..self.cones.len())
            .map(|k| {
                let r = self.range(k);
                self.cones[k].max_step(&lambda[r.clone()], &d[r])
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Scaling of the whole cone product, with `G` pre-scaled per cone.
struct ScaledSystem<'a> {
    layout: &'a Layout,
    scalings: Vec<Scaling>,
    /// Per cone: the nonzero columns of `G` in that cone's rows, and
    /// `W^{-T} G` restricted to them.
    blocks: Vec<(Vec<usize>, DMatrix<f64>)>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    kkt: DMatrix<f64>,
    g: &'a DMatrix<f64>,
    a: &'a DMatrix<f64>,
    n: usize,
    p: usize,
}

impl<'a> ScaledSystem<'a> {
    fn new(
        layout: &'a Layout,
        scalings: Vec<Scaling>,
        g: &'a DMatrix<f64>,
        a: &'a DMatrix<f64>,
        nz_cols: &[Vec<usize>],
    ) -> Option<Self> {
        let n = g.ncols();
        let p = a.nrows();
        let mut blocks = Vec::with_capacity(layout.cones.len());
        let mut kkt = DMatrix::<f64>::zeros(n + p, n + p);
        for k in 0..layout.cones.len() {
            let r = layout.range(k);
            let dim = r.len();
            let cols = &nz_cols[k];
            let mut gh = DMatrix::<f64>::zeros(dim, cols.len());
            let mut col = vec![0.0; dim];
            let mut out = vec![0.0; dim];
            for (jj, &j) in cols.iter().enumerate() {
                for (ii, i) in r.clone().enumerate() {
                    col[ii] = g[(i, j)];
                }
                scalings[k].winv_t(&col, &mut out);
                gh.column_mut(jj).copy_from_slice(&out);
            }
            let hk = gh.transpose() * &gh;
            for (ii, &i) in cols.iter().enumerate() {
                for (jj, &j) in cols.iter().enumerate() {
                    kkt[(i, j)] += hk[(ii, jj)];
                }
            }
            blocks.push((cols.clone(), gh));
        }
        for i in 0..p {
            for j in 0..n {
                kkt[(n + i, j)] = a[(i, j)];
                kkt[(j, n + i)] = a[(i, j)];
            }
        }
        // Tiny regularization keeps the factorization defined when G has
        // dependent columns; iterative refinement removes its bias.
        let diag_scale = (0..n).map(|i| kkt[(i, i)].abs()).fold(0.0, f64::max).max(1.0);
        let mut reg = kkt.clone();
        for i in 0..n {
            reg[(i, i)] += 1e-13 * diag_scale;
        }
        for i in n..n + p {
            reg[(i, i)] -= 1e-13 * diag_scale;
        }
        let lu = reg.lu();
        if !lu.is_invertible() {
            return None;
        }
        Some(Self {
            layout,
            scalings,
            blocks,
            lu,
            kkt,
            g,
            a,
            n,
            p,
        })
    }

    fn apply_per_cone(&self, v: &[f64], f: impl Fn(&Scaling, &[f64], &mut [f64])) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for k in 0..self.layout.cones.len() {
            let r = self.layout.range(k);
            f(&self.scalings[k], &v[r.clone()], &mut out[r]);
        }
        out
    }

    fn w(&self, v: &[f64]) -> Vec<f64> {
        self.apply_per_cone(v, |s, a, b| s.w(a, b))
    }
    fn wt(&self, v: &[f64]) -> Vec<f64> {
        self.apply_per_cone(v, |s, a, b| s.wt(a, b))
    }
    fn winv(&self, v: &[f64]) -> Vec<f64> {
        self.apply_per_cone(v, |s, a, b| s.winv(a, b))
    }
    fn winv_t(&self, v: &[f64]) -> Vec<f64> {
        self.apply_per_cone(v, |s, a, b| s.winv_t(a, b))
    }

    /// `(W^{-T} G) dx`, in scaled space.
    fn ghat_mul(&self, dx: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; *self.layout.offsets.last().unwrap()];
        for k in 0..self.layout.cones.len() {
            let r = self.layout.range(k);
            let (cols, gh) = &self.blocks[k];
            for (jj, &j) in cols.iter().enumerate() {
                let v = dx[j];
                if v == 0.0 {
                    continue;
                }
                for (ii, i) in r.clone().enumerate() {
                    out[i] += gh[(ii, jj)] * v;
                }
            }
        }
        out
    }

    /// `(W^{-T} G)^T v`.
    fn ghat_tmul(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for k in 0..self.layout.cones.len() {
            let r = self.layout.range(k);
            let (cols, gh) = &self.blocks[k];
            for (jj, &j) in cols.iter().enumerate() {
                let mut acc = 0.0;
                for (ii, i) in r.clone().enumerate() {
                    acc += gh[(ii, jj)] * v[i];
                }
                out[j] += acc;
            }
        }
        out
    }

    /// Solves
    /// ```text
    ///   [ 0  A'  G'   ] [dx]   [r1]
    ///   [ A  0   0    ] [dy] = [r2]
    ///   [ G  0  -W'W  ] [dz]   [r3]
    /// ```
    /// through the reduced system, then refines against the full one: the
    /// reduction loses accuracy as the scaling degenerates near a solution.
    fn solve(&self, r1: &[f64], r2: &[f64], r3: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (mut dx, mut dy, mut dz) = self.solve_reduced(r1, r2, r3);
        let scale = norm(r1).max(norm(r2)).max(norm(r3));
        for _ in 0..3 {
            let aty = mat_tvec(self.a, &dy);
            let gtz = mat_tvec(self.g, &dz);
            let ax = mat_vec(self.a, &dx);
            let gx = mat_vec(self.g, &dx);
            let wwz = self.wt(&self.w(&dz));
            let e1: Vec<f64> = (0..self.n).map(|i| r1[i] - aty[i] - gtz[i]).collect();
            let e2: Vec<f64> = (0..self.p).map(|i| r2[i] - ax[i]).collect();
            let e3: Vec<f64> = (0..r3.len()).map(|i| r3[i] - gx[i] + wwz[i]).collect();
            let err = norm(&e1).max(norm(&e2)).max(norm(&e3));
            if !(err > 1e-15 * scale) {
                break;
            }
            let (cx, cy, cz) = self.solve_reduced(&e1, &e2, &e3);
            axpy(1.0, &cx, &mut dx);
            axpy(1.0, &cy, &mut dy);
            axpy(1.0, &cz, &mut dz);
        }
        (dx, dy, dz)
    }

    fn solve_reduced(&self, r1: &[f64], r2: &[f64], r3: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let r3h = self.winv_t(r3);
        let gtr = self.ghat_tmul(&r3h);
        let mut rhs = DVector::<f64>::zeros(self.n + self.p);
        for i in 0..self.n {
            rhs[i] = r1[i] + gtr[i];
        }
        for i in 0..self.p {
            rhs[self.n + i] = r2[i];
        }
        let mut sol = self.lu.solve(&rhs).unwrap_or_else(|| DVector::zeros(self.n + self.p));
        for _ in 0..2 {
            let res = &rhs - &self.kkt * &sol;
            if let Some(corr) = self.lu.solve(&res) {
                sol += corr;
            }
        }
        let dx: Vec<f64> = sol.as_slice()[..self.n].to_vec();
        let dy: Vec<f64> = sol.as_slice()[self.n..].to_vec();
        let mut gd = self.ghat_mul(&dx);
        for (g, r) in gd.iter_mut().zip(&r3h) {
            *g -= r;
        }
        let dz = self.winv(&gd);
        (dx, dy, dz)
    }
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn nz_columns(g: &DMatrix<f64>, layout: &Layout) -> Vec<Vec<usize>> {
    (0..layout.cones.len())
        .map(|k| {
            let r = layout.range(k);
            (0..g.ncols())
                .filter(|&j| r.clone().any(|i| g[(i, j)] != 0.0))
                .collect()
        })
        .collect()
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).as_slice().to_vec()
}

fn mat_tvec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m.tr_mul(&DVector::from_column_slice(v))).as_slice().to_vec()
}

/// Diagonal equilibration `G -> E G D`, `A -> F A D`. `E` is constant on
/// every second-order and PSD block so the cones are preserved.
struct Equilibration {
    d: Vec<f64>,
    e: Vec<f64>,
    f: Vec<f64>,
}

impl Equilibration {
    const PASSES: usize = 15;
    const LIMIT: f64 = 1e8;

    /// Ruiz iteration: repeatedly divide rows and columns by the square
    /// root of their largest entry.
    fn compute(prog: &ConeProgram, layout: &Layout) -> Self {
        let (m, n, p) = (prog.g.nrows(), prog.g.ncols(), prog.a.nrows());
        let mut eq = Self {
            d: vec![1.0; n],
            e: vec![1.0; m],
            f: vec![1.0; p],
        };
        let inv_sqrt = |v: f64| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 };
        let clamp = |v: f64| v.clamp(1.0 / Self::LIMIT, Self::LIMIT);
        for _ in 0..Self::PASSES {
            let mut col = vec![0.0f64; n];
            let mut row_g = vec![0.0f64; m];
            let mut row_a = vec![0.0f64; p];
            for j in 0..n {
                for i in 0..m {
                    let v = (prog.g[(i, j)] * eq.e[i] * eq.d[j]).abs();
                    col[j] = col[j].max(v);
                    row_g[i] = row_g[i].max(v);
                }
                for i in 0..p {
                    let v = (prog.a[(i, j)] * eq.f[i] * eq.d[j]).abs();
                    col[j] = col[j].max(v);
                    row_a[i] = row_a[i].max(v);
                }
            }
            for k in 0..layout.cones.len() {
                let r = layout.range(k);
                if matches!(layout.cones[k], Cone::NonNeg(_)) {
                    continue;
                }
                let top = row_g[r.clone()].iter().copied().fold(0.0, f64::max);
                row_g[r].iter_mut().for_each(|v| *v = top);
            }
            let mut spread = 0.0f64;
            for (x, v) in eq.d.iter_mut().zip(&col).chain(eq.e.iter_mut().zip(&row_g)).chain(eq.f.iter_mut().zip(&row_a)) {
                if *v > 0.0 {
                    spread = spread.max((v.ln()).abs());
                }
                *x = clamp(*x * inv_sqrt(*v));
            }
            if spread < 0.1 {
                break;
            }
        }
        eq
    }

    fn apply(&self, prog: &ConeProgram) -> ConeProgram {
        let (d, e, f) = (&self.d, &self.e, &self.f);
        ConeProgram {
            c: DVector::from_fn(d.len(), |j, _| prog.c[j] * d[j]),
            g: DMatrix::from_fn(e.len(), d.len(), |i, j| prog.g[(i, j)] * e[i] * d[j]),
            h: DVector::from_fn(e.len(), |i, _| prog.h[i] * e[i]),
            a: DMatrix::from_fn(f.len(), d.len(), |i, j| prog.a[(i, j)] * f[i] * d[j]),
            b: DVector::from_fn(f.len(), |i, _| prog.b[i] * f[i]),
            cones: prog.cones.clone(),
        }
    }

    fn restore(&self, mut sol: IpmSolution) -> IpmSolution {
        sol.x.iter_mut().zip(&self.d).for_each(|(v, d)| *v *= d);
        sol.s.iter_mut().zip(&self.e).for_each(|(v, e)| *v /= e);
        sol.z.iter_mut().zip(&self.e).for_each(|(v, e)| *v *= e);
        sol.y.iter_mut().zip(&self.f).for_each(|(v, f)| *v *= f);
        sol
    }
}

/// Solves a cone program. The data are equilibrated and rescaled
/// internally, so tolerances apply to the balanced problem.
pub fn solve(prog: &ConeProgram, settings: &IpmSettings) -> IpmSolution {
    if prog.check().is_err() {
        return solve_balanced(prog, settings);
    }
    let eq = Equilibration::compute(prog, &Layout::new(&prog.cones));
    eq.restore(solve_balanced(&eq.apply(prog), settings))
}

fn solve_balanced(prog: &ConeProgram, settings: &IpmSettings) -> IpmSolution {
    let n = prog.n_vars();
    let m = prog.cone_dim();
    let p = prog.b.len();
    let failure = |iters: usize| IpmSolution {
        status: IpmStatus::NumericalFailure,
        x: DVector::zeros(n),
        s: DVector::zeros(m),
        y: DVector::zeros(p),
        z: DVector::zeros(m),
        primal_objective: f64::NAN,
        dual_objective: f64::NAN,
        iterations: iters,
        primal_residual: f64::INFINITY,
        dual_residual: f64::INFINITY,
        gap: f64::INFINITY,
    };
    if prog.check().is_err() {
        return failure(0);
    }

    let positive_or_one = |v: f64| if v > 0.0 { v } else { 1.0 };
    let cscale = positive_or_one(prog.c.amax());
    let pscale = positive_or_one(prog.h.amax().max(prog.b.amax()));
    let c: Vec<f64> = prog.c.iter().map(|v| v / cscale).collect();
    let h: Vec<f64> = prog.h.iter().map(|v| v / pscale).collect();
    let b: Vec<f64> = prog.b.iter().map(|v| v / pscale).collect();
    let g = &prog.g;
    let a = &prog.a;

    let layout = Layout::new(&prog.cones);
    let nz = nz_columns(g, &layout);
    let e = layout.identity();

    let resx0 = norm(&c).max(1.0);
    let resy0 = norm(&b).max(1.0);
    let resz0 = norm(&h).max(1.0);

    // Starting point from two least-squares problems with W = I.
    let ident = vec![Scaling::Identity; layout.cones.len()];
    let Some(sys0) = ScaledSystem::new(&layout, ident, g, a, &nz) else {
        return failure(0);
    };
    let zero_n = vec![0.0; n];
    let zero_p = vec![0.0; p];
    let zero_m = vec![0.0; m];
    let (mut x, _, zp) = sys0.solve(&zero_n, &b, &h);
    let mut s: Vec<f64> = zp.iter().map(|v| -v).collect();
    let negc: Vec<f64> = c.iter().map(|v| -v).collect();
    let (_, mut y, mut z) = sys0.solve(&negc, &zero_p, &zero_m);
    drop(sys0);

    let nrms = norm(&s);
    let ts = -layout.margin(&s);
    if ts >= -1e-8 * nrms.max(1.0) {
        axpy(1.0 + ts, &e, &mut s);
    }
    let nrmz = norm(&z);
    let tz = -layout.margin(&z);
    if tz >= -1e-8 * nrmz.max(1.0) {
        axpy(1.0 + tz, &e, &mut z);
    }
    let mut tau = 1.0;
    let mut kappa = 1.0;
    let nu = layout.degree as f64;

    let mut best: Option<(f64, IpmSolution)> = None;
    let mut status = IpmStatus::NumericalFailure;
    let mut iters = 0;

    for it in 0..=settings.max_iter {
        iters = it;
        // Residuals of the embedding.
        let aty = mat_tvec(a, &y);
        let gtz = mat_tvec(g, &z);
        let ax = mat_vec(a, &x);
        let gx = mat_vec(g, &x);
        let rx: Vec<f64> = (0..n).map(|i| aty[i] + gtz[i] + c[i] * tau).collect();
        let ry: Vec<f64> = (0..p).map(|i| b[i] * tau - ax[i]).collect();
        let rz: Vec<f64> = (0..m).map(|i| s[i] + gx[i] - h[i] * tau).collect();
        let cx = dot(&c, &x);
        let by = dot(&b, &y);
        let hz = dot(&h, &z);
        let rt = kappa + cx + by + hz;

        let sz = dot(&s, &z);
        let gap = sz / (tau * tau);
        // Absolute gap in the caller's units, so rescaling cannot make it
        // look small.
        let abs_gap = gap * cscale * pscale;
        let pcost = cx / tau;
        let dcost = -(by + hz) / tau;
        let relgap = if pcost < 0.0 {
            gap / -pcost
        } else if dcost > 0.0 {
            gap / dcost
        } else {
            f64::INFINITY
        };
        let pres = (norm(&ry) / resy0).max(norm(&rz) / resz0) / tau;
        let dres = norm(&rx) / resx0 / tau;

        let hz_by = hz + by;
        let pinfres = if hz_by < 0.0 {
            let v: Vec<f64> = (0..n).map(|i| aty[i] + gtz[i]).collect();
            norm(&v) / resx0 / -hz_by
        } else {
            f64::INFINITY
        };
        let dinfres = if cx < 0.0 {
            let v1: Vec<f64> = ax.clone();
            let v2: Vec<f64> = (0..m).map(|i| gx[i] + s[i]).collect();
            (norm(&v1) / resy0).max(norm(&v2) / resz0) / -cx
        } else {
            f64::INFINITY
        };

        let snapshot = |st: IpmStatus| IpmSolution {
            status: st,
            x: DVector::from_iterator(n, x.iter().map(|v| v / tau * pscale)),
            s: DVector::from_iterator(m, s.iter().map(|v| v / tau * pscale)),
            y: DVector::from_iterator(p, y.iter().map(|v| v / tau * cscale)),
            z: DVector::from_iterator(m, z.iter().map(|v| v / tau * cscale)),
            primal_objective: pcost * cscale * pscale,
            dual_objective: dcost * cscale * pscale,
            iterations: it,
            primal_residual: pres,
            dual_residual: dres,
            gap: gap * cscale * pscale,
        };

        if pres <= settings.feastol
            && dres <= settings.feastol
            && (abs_gap <= settings.abstol || relgap <= settings.reltol)
        {
            return snapshot(IpmStatus::Optimal);
        }
        if pinfres <= settings.feastol {
            status = IpmStatus::PrimalInfeasible;
            break;
        }
        if dinfres <= settings.feastol {
            status = IpmStatus::DualInfeasible;
            break;
        }
        // Keep the best near-feasible iterate in case the iteration stalls.
        if pres.is_finite() && dres.is_finite() {
            let merit = pres.max(dres).max(relgap.min(abs_gap));
            if best.as_ref().map_or(true, |(bm, _)| merit < *bm) {
                best = Some((merit, snapshot(IpmStatus::NumericalFailure)));
            }
        }
        if it == settings.max_iter {
            break;
        }

        // Scaling at the current iterate.
        let mut scalings = Vec::with_capacity(layout.cones.len());
        let mut lambda = vec![0.0; m];
        let mut ok = true;
        for k in 0..layout.cones.len() {
            let r = layout.range(k);
            match Scaling::compute(&layout.cones[k], &s[r.clone()], &z[r.clone()]) {
                Some((w, l)) => {
                    lambda[r].copy_from_slice(&l);
                    scalings.push(w);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            break;
        }
        let Some(sys) = ScaledSystem::new(&layout, scalings, g, a, &nz) else {
            break;
        };
        let mu = (sz + tau * kappa) / (nu + 1.0);

        let negc: Vec<f64> = c.iter().map(|v| -v).collect();
        let (x2, y2, z2) = sys.solve(&negc, &b, &h);
        let denom_base = dot(&c, &x2) + dot(&b, &y2) + dot(&h, &z2);

        let ll = layout.jordan(&lambda, &lambda);

        // Solve for a direction given the centering data.
        let direction = |frac: f64, ds_rhs: &[f64], dk_rhs: f64| {
            let lds = layout.jordan_div(&lambda, ds_rhs);
            let wt_lds = sys.wt(&lds);
            let r1: Vec<f64> = rx.iter().map(|v| -frac * v).collect();
            let r2: Vec<f64> = ry.iter().map(|v| frac * v).collect();
            let r3: Vec<f64> = (0..m).map(|i| -frac * rz[i] - wt_lds[i]).collect();
            let (x1, y1, z1) = sys.solve(&r1, &r2, &r3);
            let num = -frac * rt - dk_rhs / tau - dot(&c, &x1) - dot(&b, &y1) - dot(&h, &z1);
            let den = -kappa / tau + denom_base;
            let dtau = num / den;
            let dx: Vec<f64> = (0..n).map(|i| x1[i] + dtau * x2[i]).collect();
            let dy: Vec<f64> = (0..p).map(|i| y1[i] + dtau * y2[i]).collect();
            let dz: Vec<f64> = (0..m).map(|i| z1[i] + dtau * z2[i]).collect();
            let dkappa = (dk_rhs - kappa * dtau) / tau;
            let wdz = sys.w(&dz);
            let ds_hat: Vec<f64> = (0..m).map(|i| lds[i] - wdz[i]).collect();
            (dx, dy, dz, dtau, dkappa, ds_hat, wdz)
        };

        let step_len = |ds_hat: &[f64], dz_hat: &[f64], dtau: f64, dkappa: f64| {
            let mut a = layout.max_step(&lambda, ds_hat).min(layout.max_step(&lambda, dz_hat));
            if dtau < 0.0 {
                a = a.min(-tau / dtau);
            }
            if dkappa < 0.0 {
                a = a.min(-kappa / dkappa);
            }
            a
        };

        // Predictor.
        let ds_aff: Vec<f64> = ll.iter().map(|v| -v).collect();
        let (_, _, _, dtau_a, dkappa_a, dsh_a, dzh_a) = direction(1.0, &ds_aff, -tau * kappa);
        let alpha_a = step_len(&dsh_a, &dzh_a, dtau_a, dkappa_a).min(1.0);
        let sigma = (1.0 - alpha_a).powi(3);

        // Corrector.
        let cross = layout.jordan(&dsh_a, &dzh_a);
        let ds_cor: Vec<f64> = (0..m)
            .map(|i| -ll[i] - cross[i] + sigma * mu * e[i])
            .collect();
        let dk_cor = -tau * kappa - dtau_a * dkappa_a + sigma * mu;
        let (dx, dy, dz, dtau, dkappa, dsh, dzh) = direction(1.0 - sigma, &ds_cor, dk_cor);
        let amax = step_len(&dsh, &dzh, dtau, dkappa);
        let alpha = (0.99 * amax).min(1.0);
        if !(alpha > 1e-12) || !alpha.is_finite() {
            break;
        }

        // Update in the original coordinates; mapping back from the scaled
        // point amplifies rounding once the scaling is ill-conditioned.
        let ds = sys.wt(&dsh);
        axpy(alpha, &ds, &mut s);
        axpy(alpha, &dz, &mut z);
        axpy(alpha, &dx, &mut x);
        axpy(alpha, &dy, &mut y);
        tau += alpha * dtau;
        kappa += alpha * dkappa;
        if !(tau > 0.0 && kappa > 0.0) || x.iter().chain(&z).any(|v| !v.is_finite()) {
            break;
        }
    }

    match status {
        IpmStatus::PrimalInfeasible | IpmStatus::DualInfeasible => {
            // Certificates are returned unnormalized by tau.
            IpmSolution {
                status,
                x: DVector::from_vec(x),
                s: DVector::from_vec(s),
                y: DVector::from_vec(y),
                z: DVector::from_vec(z),
                primal_objective: f64::NAN,
                dual_objective: f64::NAN,
                iterations: iters,
                primal_residual: f64::NAN,
                dual_residual: f64::NAN,
                gap: f64::NAN,
            }
        }
        _ => {
            // Accept a stalled iterate only if it is close to the target.
            if let Some((merit, sol)) = best {
                if merit <= 1e3 * settings.feastol.max(settings.reltol) {
                    return IpmSolution {
                        status: IpmStatus::Optimal,
                        ..sol
                    };
                }
                return sol;
            }
            failure(iters)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(c: &[f64], g: &[&[f64]], h: &[f64]) -> ConeProgram {
        let rows = g.len();
        let cols = c.len();
        let gm = DMatrix::from_fn(rows, cols, |i, j| g[i][j]);
        ConeProgram::new(
            DVector::from_column_slice(c),
            gm,
            DVector::from_column_slice(h),
            vec![Cone::NonNeg(rows)],
        )
    }

    #[test]
    fn small_lp() {
        // min -x - y s.t. x + y <= 1, x >= 0, y >= 0
        let p = lp(&[-1.0, -2.0], &[&[1.0, 1.0], &[-1.0, 0.0], &[0.0, -1.0]], &[1.0, 0.0, 0.0]);
        let sol = solve(&p, &IpmSettings::default());
        assert_eq!(sol.status, IpmStatus::Optimal);
        assert!((sol.primal_objective + 2.0).abs() < 1e-7);
        assert!((sol.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn infeasible_lp() {
        // x <= -1, x >= 0
        let p = lp(&[0.0], &[&[1.0], &[-1.0]], &[-1.0, 0.0]);
        assert_eq!(solve(&p, &IpmSettings::default()).status, IpmStatus::PrimalInfeasible);
    }

    #[test]
    fn unbounded_lp() {
        // min -x s.t. x >= 0
        let p = lp(&[-1.0], &[&[-1.0]], &[0.0]);
        assert_eq!(solve(&p, &IpmSettings::default()).status, IpmStatus::DualInfeasible);
    }

    #[test]
    fn equality_constrained_lp() {
        // min x + 2y s.t. x + y = 3, x,y >= 0 -> (3, 0)
        let p = lp(&[1.0, 2.0], &[&[-1.0, 0.0], &[0.0, -1.0]], &[0.0, 0.0])
            .with_equalities(DMatrix::from_row_slice(1, 2, &[1.0, 1.0]), DVector::from_vec(vec![3.0]));
        let sol = solve(&p, &IpmSettings::default());
        assert_eq!(sol.status, IpmStatus::Optimal);
        assert!((sol.primal_objective - 3.0).abs() < 1e-7);
    }

    #[test]
    fn small_socp() {
        // min t s.t. ||(x - 3)|| <= t  written as (t, x - 3) in SOC, x free -> t = 0
        // and min x s.t. ||(1, x)|| <= 2: x >= -sqrt(3)
        let g = DMatrix::from_row_slice(3, 1, &[0.0, 0.0, -1.0]);
        let h = DVector::from_vec(vec![2.0, 1.0, 0.0]);
        let p = ConeProgram::new(DVector::from_vec(vec![1.0]), g, h, vec![Cone::Soc(3)]);
        let sol = solve(&p, &IpmSettings::default());
        assert_eq!(sol.status, IpmStatus::Optimal);
        assert!((sol.x[0] + 3f64.sqrt()).abs() < 1e-6, "{}", sol.x[0]);
    }

    #[test]
    fn small_sdp_lmi() {
        // max y s.t. [[1, y], [y, 1]] psd  -> y = 1
        // as: min -y s.t. -y*[[0,1],[1,0]] + S = I
        let g = DMatrix::from_column_slice(4, 1, &[0.0, -1.0, -1.0, 0.0]);
        let h = DVector::from_vec(vec![1.0, 0.0, 0.0, 1.0]);
        let p = ConeProgram::new(DVector::from_vec(vec![-1.0]), g, h, vec![Cone::Psd(2)]);
        let sol = solve(&p, &IpmSettings::default());
        assert_eq!(sol.status, IpmStatus::Optimal);
        assert!((sol.x[0] - 1.0).abs() < 1e-6, "{}", sol.x[0]);
    }
}
