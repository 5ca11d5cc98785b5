//! Problem data shared by the algorithms: noise-normalized channels, beam
//! definitions, backhaul weights, and the convex subproblems built on them.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::SolverSettings;
use crate::conic::{solve_lp, solve_sdp, LpProblem, SdpProblem, Sense, SolveStatus};
use crate::linalg::{inner, norm_sqr, outer, trace_inner, CMatrix};
use crate::rng;
use crate::scenario::{BeamformerSet, ClusterMatrix, Eta, PeakPower, Scenario};
use crate::smooth::{f_theta, grad_f_theta, SmoothKind};

/// Per-group Hermitian PSD matrices of order `N * L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedSet {
    pub n_ant: usize,
    #[serde(skip)]
    pub w: Vec<CMatrix>,
}

impl LiftedSet {
    /// `Tr(W_m J_n)`.
    pub fn block_power(&self, m: usize, n: usize) -> f64 {
        let l = self.n_ant;
        (n * l..(n + 1) * l).map(|i| self.w[m][(i, i)].re).sum()
    }

    pub fn block_powers(&self) -> Vec<Vec<f64>> {
        let n_bs = self.w.first().map_or(0, |w| w.nrows() / self.n_ant.max(1));
        (0..self.w.len())
            .map(|m| (0..n_bs).map(|n| self.block_power(m, n)).collect())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        self.w.iter().map(|w| w.trace().re).sum()
    }
}

/// Users served by one beamformer.
#[derive(Debug, Clone)]
pub(crate) struct Beam {
    pub users: Vec<usize>,
    pub gamma: f64,
    pub content: usize,
}

pub(crate) struct Model<'a> {
    pub sc: &'a Scenario,
    pub n_bs: usize,
    pub n_ant: usize,
    pub beams: Vec<Beam>,
    /// `h_k / sigma_k`
    pub h: Vec<Vec<Complex64>>,
    /// `||h_k / sigma_k||^2`, used to equilibrate SINR rows.
    pub gain: Vec<f64>,
    /// Backhaul weight of each `(beam, BS)` pair in cost units; zero when
    /// the content is cached.
    pub alpha: Vec<Vec<f64>>,
    pub peak: PeakPower,
}

/// Beamformers recovered from a lifted solution.
pub(crate) struct Recovered {
    pub w: BeamformerSet,
    pub rank_one: bool,
    pub randomized: bool,
}

impl<'a> Model<'a> {
    fn with_beams(sc: &'a Scenario, settings: &SolverSettings, beams: Vec<Beam>, rates: Vec<f64>) -> Self {
        let n_bs = sc.n_bs();
        let h: Vec<Vec<Complex64>> = (0..sc.channels.n_users())
            .map(|k| {
                let s = sc.channels.noise_power[k].sqrt();
                sc.channels.user(k).into_iter().map(|x| x / s).collect()
            })
            .collect();
        let gain = h.iter().map(|v| norm_sqr(v)).collect();
        let unit = sc.radio.cost_scale.backhaul_unit;
        let alpha = beams
            .iter()
            .zip(&rates)
            .map(|(b, r)| {
                (0..n_bs)
                    .map(|n| if sc.cache.cached(b.content, n) { 0.0 } else { r / unit })
                    .collect()
            })
            .collect();
        Self {
            sc,
            n_bs,
            n_ant: sc.n_ant(),
            beams,
            h,
            gain,
            alpha,
            peak: settings.peak_power.unwrap_or_else(|| sc.radio.peak_power()),
        }
    }

    pub fn multicast(sc: &'a Scenario, settings: &SolverSettings) -> Self {
        let beams = sc
            .groups
            .groups
            .iter()
            .zip(&sc.groups.gamma)
            .map(|(g, &gamma)| Beam {
                users: g.users.clone(),
                gamma,
                content: g.content,
            })
            .collect();
        Self::with_beams(sc, settings, beams, sc.groups.rate.clone())
    }

    /// One beam per served user, in group order.
    pub fn unicast(sc: &'a Scenario, settings: &SolverSettings) -> Self {
        let mut beams = Vec::new();
        let mut rates = Vec::new();
        for (m, g) in sc.groups.groups.iter().enumerate() {
            for &k in &g.users {
                beams.push(Beam {
                    users: vec![k],
                    gamma: sc.groups.gamma[m],
                    content: g.content,
                });
                rates.push(sc.groups.rate[m]);
            }
        }
        Self::with_beams(sc, settings, beams, rates)
    }

    pub fn n_beams(&self) -> usize {
        self.beams.len()
    }

    pub fn dim(&self) -> usize {
        self.n_bs * self.n_ant
    }

    /// Weight on one watt in cost units, or 1 in power-only mode.
    pub fn power_weight(&self, eta: Eta) -> f64 {
        match eta {
            Eta::Weight(w) => w / self.sc.radio.cost_scale.power_unit,
            Eta::PowerOnly => 1.0,
        }
    }

    pub fn full_support(&self) -> ClusterMatrix {
        ClusterMatrix::full(self.n_beams(), self.n_bs)
    }

    /// Active BSs of each beam; `None` when a beam with users has none.
    pub fn active_sets(&self, support: &ClusterMatrix) -> Option<Vec<Vec<usize>>> {
        let act: Vec<Vec<usize>> = (0..self.n_beams())
            .map(|m| (0..self.n_bs).filter(|&n| support.get(m, n)).collect())
            .collect();
        let ok = self
            .beams
            .iter()
            .zip(&act)
            .all(|(b, a)| !a.is_empty() || b.users.is_empty() || b.gamma <= 0.0);
        ok.then_some(act)
    }

    fn restrict(&self, v: &[Complex64], act: &[usize]) -> Vec<Complex64> {
        let l = self.n_ant;
        act.iter().flat_map(|&n| v[n * l..(n + 1) * l].iter().copied()).collect()
    }

    /// SDR of power minimization on `support`, each `Tr(W_m J_n)` weighted
    /// by `weights[m][n]`. `None` if some beam has no serving BS.
    pub fn sdr_problem(
        &self,
        support: &ClusterMatrix,
        weights: &[Vec<f64>],
    ) -> Option<(SdpProblem, Vec<Vec<usize>>)> {
        let act = self.active_sets(support)?;
        let l = self.n_ant;
        let objective = act
            .iter()
            .enumerate()
            .map(|(m, a)| {
                let diag: Vec<Complex64> = a
                    .iter()
                    .flat_map(|&n| std::iter::repeat_n(Complex64::new(weights[m][n], 0.0), l))
                    .collect();
                CMatrix::from_diagonal(&DVector::from_vec(diag))
            })
            .collect();
        let mut p = SdpProblem::new(objective);
        for (m, beam) in self.beams.iter().enumerate() {
            for &k in &beam.users {
                let scale = 1.0 / self.gain[k];
                let mut terms = vec![(m, outer(&self.restrict(&self.h[k], &act[m])) * Complex64::new(scale, 0.0))];
                for (j, a) in act.iter().enumerate() {
                    if j != m && !a.is_empty() {
                        let hk = self.restrict(&self.h[k], a);
                        terms.push((j, outer(&hk) * Complex64::new(-beam.gamma * scale, 0.0)));
                    }
                }
                p.push(terms, beam.gamma * scale);
            }
        }
        if let Some(cap) = self.peak.per_bs {
            for n in 0..self.n_bs {
                let terms = self.selector_terms(&act, n, None);
                if !terms.is_empty() {
                    p.push(terms, -cap);
                }
            }
        }
        if let Some(cap) = self.peak.per_antenna {
            for n in 0..self.n_bs {
                for a in 0..l {
                    let terms = self.selector_terms(&act, n, Some(a));
                    if !terms.is_empty() {
                        p.push(terms, -cap);
                    }
                }
            }
        }
        Some((p, act))
    }

    /// `-J` restricted to BS `n` (or one antenna of it) for every beam
    /// served by `n`.
    fn selector_terms(&self, act: &[Vec<usize>], n: usize, antenna: Option<usize>) -> Vec<(usize, CMatrix)> {
        let l = self.n_ant;
        act.iter()
            .enumerate()
            .filter_map(|(m, a)| {
                let pos = a.iter().position(|&x| x == n)?;
                let d = a.len() * l;
                let mut j = CMatrix::zeros(d, d);
                for i in 0..l {
                    if antenna.is_none_or(|ant| ant == i) {
                        j[(pos * l + i, pos * l + i)] = Complex64::new(-1.0, 0.0);
                    }
                }
                Some((m, j))
            })
            .collect()
    }

    /// Embeds reduced matrices back at full order.
    pub fn lift(&self, reduced: &[CMatrix], act: &[Vec<usize>]) -> LiftedSet {
        let l = self.n_ant;
        let dim = self.dim();
        let w = reduced
            .iter()
            .zip(act)
            .map(|(r, a)| {
                let idx: Vec<usize> = a.iter().flat_map(|&n| n * l..(n + 1) * l).collect();
                let mut full = CMatrix::zeros(dim, dim);
                for (ri, &i) in idx.iter().enumerate() {
                    for (rj, &j) in idx.iter().enumerate() {
                        full[(i, j)] = r[(ri, rj)];
                    }
                }
                full
            })
            .collect();
        LiftedSet { n_ant: l, w }
    }

    /// Solves the weighted SDR on `support`. Returns the lifted optimum and
    /// the conic iteration count.
    pub fn solve_sdr(
        &self,
        support: &ClusterMatrix,
        weights: &[Vec<f64>],
        settings: &SolverSettings,
    ) -> Result<(LiftedSet, usize), SdrFailure> {
        let (p, act) = self.sdr_problem(support, weights).ok_or(SdrFailure::Infeasible)?;
        let sol = solve_sdp(&p, &settings.conic);
        match sol.status {
            SolveStatus::Optimal => Ok((self.lift(&sol.primal, &act), sol.iterations)),
            SolveStatus::Infeasible => Err(SdrFailure::Infeasible),
            s => Err(SdrFailure::Numerical(format!("SDP returned {s:?}"))),
        }
    }

    /// `SINR_k / gamma` minimized over served users.
    pub fn margin(&self, w: &BeamformerSet) -> f64 {
        let gains = |k: usize| -> Vec<f64> { w.w.iter().map(|wj| inner(&self.h[k], wj).norm_sqr()).collect() };
        self.min_over_users(|m, k| {
            let g = gains(k);
            let interference: f64 = g.iter().enumerate().filter(|(j, _)| *j != m).map(|(_, x)| x).sum();
            g[m] / (interference + 1.0)
        })
    }

    /// Lifted counterpart of [`Model::margin`].
    pub fn lifted_margin(&self, w: &LiftedSet) -> f64 {
        let hh: Vec<CMatrix> = self.h.iter().map(|h| outer(h)).collect();
        self.min_over_users(|m, k| {
            let g: Vec<f64> = w.w.iter().map(|wj| trace_inner(&hh[k], wj)).collect();
            let interference: f64 = g.iter().enumerate().filter(|(j, _)| *j != m).map(|(_, x)| x).sum();
            g[m] / (interference + 1.0)
        })
    }

    fn min_over_users(&self, sinr: impl Fn(usize, usize) -> f64) -> f64 {
        let mut out = f64::INFINITY;
        for (m, b) in self.beams.iter().enumerate() {
            for &k in &b.users {
                out = out.min(sinr(m, k) / b.gamma);
            }
        }
        out
    }

    /// `sum alpha f_theta(p) + eta' * sum p` over block powers `p`.
    pub fn surrogate(&self, powers: &[Vec<f64>], kind: SmoothKind, theta: f64, eta: Eta) -> f64 {
        let pw = self.power_weight(eta);
        let mut total = 0.0;
        for (m, row) in powers.iter().enumerate() {
            for (n, &p) in row.iter().enumerate() {
                let p = p.max(0.0);
                total += pw * p;
                if eta != Eta::PowerOnly && self.alpha[m][n] > 0.0 {
                    total += self.alpha[m][n] * f_theta(kind, p, theta).expect("valid domain");
                }
            }
        }
        total
    }

    /// Linearized per-block weights `eta' + alpha * f'_theta(p)`.
    pub fn ccp_weights(&self, powers: &[Vec<f64>], kind: SmoothKind, theta: f64, eta: Eta) -> Vec<Vec<f64>> {
        let pw = self.power_weight(eta);
        let mut w: Vec<Vec<f64>> = powers
            .iter()
            .enumerate()
            .map(|(m, row)| {
                row.iter()
                    .enumerate()
                    .map(|(n, &p)| {
                        let slope = if eta == Eta::PowerOnly || self.alpha[m][n] == 0.0 {
                            0.0
                        } else {
                            self.alpha[m][n] * grad_f_theta(kind, p.max(0.0), theta).expect("valid domain")
                        };
                        pw + slope
                    })
                    .collect()
            })
            .collect();
        floor_weights(&mut w);
        w
    }

    /// Power weights for fixed-support power minimization.
    pub fn power_weights(&self) -> Vec<Vec<f64>> {
        vec![vec![1.0; self.n_bs]; self.n_beams()]
    }

    /// Minimum-power per-beam rescaling of `cand` meeting every SINR
    /// target, or `None` if no scaling does.
    pub fn scale(&self, cand: &BeamformerSet, settings: &SolverSettings) -> Option<(BeamformerSet, f64)> {
        let mb = self.n_beams();
        let norms: Vec<f64> = cand.w.iter().map(|w| norm_sqr(w).sqrt()).collect();
        let unit: Vec<Vec<Complex64>> = cand
            .w
            .iter()
            .zip(&norms)
            .map(|(w, &s)| if s > 0.0 { w.iter().map(|x| x / s).collect() } else { w.clone() })
            .collect();
        let mut lp = LpProblem::new(vec![1.0; mb]);
        for (m, beam) in self.beams.iter().enumerate() {
            for &k in &beam.users {
                let a: Vec<f64> = unit.iter().map(|u| inner(&self.h[k], u).norm_sqr()).collect();
                // Zero signal cannot be scaled into feasibility.
                if !(a[m] > 1e-14 * self.gain[k]) {
                    return None;
                }
                let mut coeffs = vec![(m, 1.0)];
                for (j, &aj) in a.iter().enumerate() {
                    if j != m && aj > 0.0 {
                        coeffs.push((j, -beam.gamma * aj / a[m]));
                    }
                }
                lp.push(coeffs, Sense::Ge, beam.gamma / a[m]);
            }
        }
        let l = self.n_ant;
        let block = |m: usize, n: usize| norm_sqr(&unit[m][n * l..(n + 1) * l]);
        if let Some(cap) = self.peak.per_bs {
            for n in 0..self.n_bs {
                let coeffs: Vec<(usize, f64)> = (0..mb).map(|m| (m, block(m, n))).filter(|(_, v)| *v > 0.0).collect();
                lp.push(coeffs, Sense::Le, cap);
            }
        }
        if let Some(cap) = self.peak.per_antenna {
            for i in 0..self.dim() {
                let coeffs: Vec<(usize, f64)> =
                    (0..mb).map(|m| (m, unit[m][i].norm_sqr())).filter(|(_, v)| *v > 0.0).collect();
                lp.push(coeffs, Sense::Le, cap);
            }
        }
        let sol = solve_lp(&lp, &settings.conic);
        if sol.status != SolveStatus::Optimal {
            return None;
        }
        // The solver's residual is relative to the whole right-hand side, so
        // a weak beam can still be short; each SINR row lifts its own beam.
        let mut x = sol.primal.clone();
        for _ in 0..8 {
            let mut lifted = false;
            for con in lp.constraints.iter().filter(|c| c.sense == Sense::Ge) {
                let lhs: f64 = con.coeffs.iter().map(|(j, a)| a * x[*j]).sum();
                if lhs < con.rhs {
                    x[con.coeffs[0].0] += con.rhs - lhs;
                    lifted = true;
                }
            }
            if !lifted {
                break;
            }
        }
        if lp.max_violation(&x) > 1e-7 {
            x = sol.primal;
        }
        let mut out = BeamformerSet { n_ant: l, w: unit };
        for (m, b) in x.iter().enumerate() {
            out.scale(m, b.max(0.0).sqrt());
        }
        let power = crate::scenario::power_cost(&out);
        Some((out, power))
    }

    /// Rank-one extraction when the relaxation is tight, otherwise Gaussian
    /// randomization; either way followed by the scaling LP.
    pub fn recover(
        &self,
        w: &LiftedSet,
        support: &ClusterMatrix,
        settings: &SolverSettings,
        seed: u64,
    ) -> Option<Recovered> {
        if let Some(cand) = extract_rank1_model(w, settings.rank_tol) {
            let cand = self.mask(cand, support);
            if let Some((scaled, _)) = self.scale(&cand, settings) {
                return Some(Recovered {
                    w: scaled,
                    rank_one: true,
                    randomized: false,
                });
            }
        }
        self.randomize(w, support, settings, seed).map(|w| Recovered {
            w,
            rank_one: false,
            randomized: true,
        })
    }

    /// Best scaled candidate among the principal-eigenvector draw and
    /// `n_randomizations` Gaussian draws with covariance `W_m`.
    pub fn randomize(
        &self,
        w: &LiftedSet,
        support: &ClusterMatrix,
        settings: &SolverSettings,
        seed: u64,
    ) -> Option<BeamformerSet> {
        let mut rng = rng::stream(seed, RANDOMIZATION_TAG);
        let factors: Vec<(Vec<f64>, CMatrix)> = w
            .w
            .iter()
            .map(|wm| {
                let e = wm.clone().symmetric_eigen();
                (e.eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect(), e.eigenvectors)
            })
            .collect();
        let dim = self.dim();
        let principal = BeamformerSet {
            n_ant: self.n_ant,
            w: factors
                .iter()
                .map(|(s, u)| {
                    let top = (0..s.len()).max_by(|&a, &b| s[a].total_cmp(&s[b]));
                    match top {
                        Some(r) => u.column(r).iter().map(|x| x * s[r]).collect(),
                        None => vec![Complex64::new(0.0, 0.0); dim],
                    }
                })
                .collect(),
        };
        let mut best: Option<(BeamformerSet, f64)> = None;
        let mut consider = |cand: BeamformerSet| {
            let cand = self.mask(cand, support);
            if let Some((scaled, power)) = self.scale(&cand, settings) {
                if best.as_ref().is_none_or(|(_, p)| power < *p) {
                    best = Some((scaled, power));
                }
            }
        };
        consider(principal);
        for _ in 0..settings.n_randomizations {
            let cand = BeamformerSet {
                n_ant: self.n_ant,
                w: factors
                    .iter()
                    .map(|(s, u)| {
                        let xi: Vec<Complex64> = (0..s.len())
                            .map(|r| {
                                let re: f64 = rng.sample(StandardNormal);
                                let im: f64 = rng.sample(StandardNormal);
                                Complex64::new(re, im) * (s[r] * std::f64::consts::FRAC_1_SQRT_2)
                            })
                            .collect();
                        (0..dim).map(|i| (0..s.len()).map(|r| u[(i, r)] * xi[r]).sum()).collect()
                    })
                    .collect(),
            };
            consider(cand);
        }
        best.map(|(w, _)| w)
    }

    /// Zeroes every block outside `support`.
    pub fn mask(&self, mut w: BeamformerSet, support: &ClusterMatrix) -> BeamformerSet {
        for m in 0..w.n_beams() {
            for n in 0..self.n_bs {
                if !support.get(m, n) {
                    w.block_mut(m, n).iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
                }
            }
        }
        w
    }
}

const RANDOMIZATION_TAG: u64 = 0x5244_4d5a;

/// Replaces zero weights by a small positive one so blocks that carry no
/// cost still have a well-defined minimum-power solution. Positive weights
/// are left alone.
fn floor_weights(w: &mut [Vec<f64>]) {
    let max = w.iter().flatten().copied().fold(0.0, f64::max);
    let floor = if max > 0.0 { 1e-9 * max } else { 1.0 };
    w.iter_mut().flatten().filter(|x| **x <= 0.0).for_each(|x| *x = floor);
}

pub(crate) enum SdrFailure {
    Infeasible,
    Numerical(String),
}

pub(crate) fn extract_rank1_model(w: &LiftedSet, rank_tol: f64) -> Option<BeamformerSet> {
    let mut out = Vec::with_capacity(w.w.len());
    for wm in &w.w {
        let e = wm.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| e.eigenvalues[b].total_cmp(&e.eigenvalues[a]));
        let dim = wm.nrows();
        let Some(&first) = order.first() else {
            out.push(Vec::new());
            continue;
        };
        let l1 = e.eigenvalues[first].max(0.0);
        let l2 = order.get(1).map_or(0.0, |&i| e.eigenvalues[i].max(0.0));
        if l2 > rank_tol * l1 {
            return None;
        }
        if l1 == 0.0 {
            out.push(vec![Complex64::new(0.0, 0.0); dim]);
            continue;
        }
        let s = l1.sqrt();
        out.push(e.eigenvectors.column(first).iter().map(|x| x * s).collect());
    }
    Some(BeamformerSet { n_ant: w.n_ant, w: out })
}
