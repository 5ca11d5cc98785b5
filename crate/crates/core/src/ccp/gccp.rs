use std::time::Instant;

use num_complex::Complex64;

use super::model::Model;
use super::sdr::{p_ini, polish_model, rel_change};
use super::{Diagnostics, SolveError, SolveOutcome, SolverSettings, TraceRow};
use crate::conic::{solve_qcqp, AffineForm, ComplexForm, QcqpConstraint, QcqpProblem, SolveStatus};
use crate::linalg::inner;
use crate::rng::derive_seed;
use crate::scenario::{network_cost, BeamformerSet, ClusterMatrix, Eta, Scenario};
use crate::smooth::{theta_init, theta_next};

/// Variable layout of the linearized subproblem: one complex variable per
/// antenna of every active block and one real `t` per active block.
struct Layout {
    /// `(complex offset, t index)` per `(beam, BS)`, `None` if inactive.
    blocks: Vec<Vec<Option<(usize, usize)>>>,
    n_complex: usize,
    n_real: usize,
}

impl Layout {
    fn new(support: &ClusterMatrix, n_ant: usize) -> Self {
        let mut nc = 0;
        let mut nr = 0;
        let blocks = support
            .s
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&on| {
                        on.then(|| {
                            let b = (nc, nr);
                            nc += n_ant;
                            nr += 1;
                            b
                        })
                    })
                    .collect()
            })
            .collect();
        Self {
            blocks,
            n_complex: nc,
            n_real: nr,
        }
    }

    /// `a^H w_m` as a complex form over the active entries of beam `m`.
    fn inner_form(&self, a: &[Complex64], m: usize, n_ant: usize, scale: f64) -> ComplexForm {
        let mut terms = Vec::new();
        for (n, b) in self.blocks[m].iter().enumerate() {
            if let Some((off, _)) = b {
                for i in 0..n_ant {
                    terms.push((off + i, a[n * n_ant + i].conj() * scale));
                }
            }
        }
        ComplexForm::new(terms)
    }

    fn read(&self, v: &[Complex64], n_beams: usize, n_bs: usize, n_ant: usize) -> BeamformerSet {
        let mut w = BeamformerSet::zeros(n_beams, n_bs, n_ant);
        for m in 0..n_beams {
            for n in 0..n_bs {
                if let Some((off, _)) = self.blocks[m][n] {
                    w.block_mut(m, n).copy_from_slice(&v[off..off + n_ant]);
                }
            }
        }
        w
    }
}

/// Convex subproblem at `point`: minimize `sum weights * t` subject to
/// `||w_mn||^2 <= t_mn`, the SINR constraints with the desired-signal term
/// replaced by its linearization at `point`, and the peak limits.
///
/// The weights span many orders of magnitude once `theta` is small, so each
/// block is posed as `weight * ||w_mn||^2 <= tau_mn` with `tau` carrying
/// unit cost, normalized by the average block cost at `point`. Otherwise
/// the cheap blocks fall below the solver's dual tolerance.
fn linearized(model: &Model, support: &ClusterMatrix, point: &BeamformerSet, weights: &[Vec<f64>]) -> (QcqpProblem, Layout) {
    let l = model.n_ant;
    let lay = Layout::new(support, l);
    let mut p = QcqpProblem::new(lay.n_complex, lay.n_real);
    let powers = point.block_powers();
    let total: f64 = powers.iter().flatten().zip(weights.iter().flatten()).map(|(p, w)| p * w).sum();
    let c2 = (total / lay.n_real.max(1) as f64).max(f64::MIN_POSITIVE);
    for (m, row) in lay.blocks.iter().enumerate() {
        for (n, b) in row.iter().enumerate() {
            if let Some((off, t)) = *b {
                let wt = weights[m][n];
                let a = Complex64::new((wt / c2).sqrt(), 0.0);
                p.objective[t] = 1.0;
                p.push(QcqpConstraint::SquaredNorm {
                    forms: (0..l).map(|i| ComplexForm::new(vec![(off + i, a)])).collect(),
                    bound: AffineForm {
                        real: vec![(t, 1.0 / c2)],
                        ..Default::default()
                    },
                });
            }
        }
    }
    for (m, beam) in model.beams.iter().enumerate() {
        for &k in &beam.users {
            let h = &model.h[k];
            let s = 1.0 / model.gain[k];
            let forms: Vec<ComplexForm> = (0..model.n_beams())
                .filter(|&j| j != m && lay.blocks[j].iter().any(Option::is_some))
                .map(|j| lay.inner_form(h, j, l, (beam.gamma * s).sqrt()))
                .collect();
            // 2 Re{conj(h^H w0) h^H w} - |h^H w0|^2
            let a0 = inner(h, &point.w[m]);
            let mut complex = Vec::new();
            for (n, b) in lay.blocks[m].iter().enumerate() {
                if let Some((off, _)) = b {
                    for i in 0..l {
                        complex.push((off + i, h[n * l + i] * a0 * (2.0 * s)));
                    }
                }
            }
            p.push(QcqpConstraint::SquaredNorm {
                forms,
                bound: AffineForm {
                    complex,
                    real: Vec::new(),
                    constant: -s * (a0.norm_sqr() + beam.gamma),
                },
            });
        }
    }
    if let Some(cap) = model.peak.per_bs {
        for n in 0..model.n_bs {
            let forms: Vec<ComplexForm> = lay
                .blocks
                .iter()
                .filter_map(|row| row[n])
                .flat_map(|(off, _)| (0..l).map(move |i| ComplexForm::new(vec![(off + i, Complex64::new(1.0, 0.0))])))
                .collect();
            if !forms.is_empty() {
                p.push(QcqpConstraint::SquaredNorm {
                    forms,
                    bound: AffineForm {
                        constant: cap,
                        ..Default::default()
                    },
                });
            }
        }
    }
    if let Some(cap) = model.peak.per_antenna {
        for n in 0..model.n_bs {
            for i in 0..l {
                let forms: Vec<ComplexForm> = lay
                    .blocks
                    .iter()
                    .filter_map(|row| row[n].map(|(off, _)| ComplexForm::new(vec![(off + i, Complex64::new(1.0, 0.0))])))
                    .collect();
                if !forms.is_empty() {
                    p.push(QcqpConstraint::SquaredNorm {
                        forms,
                        bound: AffineForm {
                            constant: cap,
                            ..Default::default()
                        },
                    });
                }
            }
        }
    }
    (p, lay)
}

/// One linearize-and-solve step; `None` if the subproblem was not solved.
fn step(model: &Model, support: &ClusterMatrix, point: &BeamformerSet, weights: &[Vec<f64>], settings: &SolverSettings) -> Option<(BeamformerSet, usize)> {
    let (p, lay) = linearized(model, support, point, weights);
    let sol = solve_qcqp(&p, &settings.conic);
    (sol.status == SolveStatus::Optimal)
        .then(|| (lay.read(&sol.primal.v, model.n_beams(), model.n_bs, model.n_ant), sol.iterations))
}

/// Power minimization on a fixed support by the same procedure, started
/// from the feasible `w`.
fn refine(model: &Model, support: &ClusterMatrix, mut w: BeamformerSet, settings: &SolverSettings) -> BeamformerSet {
    let weights = model.power_weights();
    let mut power = crate::scenario::power_cost(&w);
    for _ in 0..settings.ccp_max_iters {
        let Some((next, _)) = step(model, support, &w, &weights, settings) else {
            break;
        };
        let next_power = crate::scenario::power_cost(&next);
        if next_power > power || model.margin(&next) < 1.0 - 1e-6 {
            break;
        }
        w = next;
        let change = rel_change(power, next_power);
        power = next_power;
        if change < settings.ccp_rel_tol {
            break;
        }
    }
    w
}

/// Turns near-sparse beamformers into a clustering and beamformers that
/// exactly respect it: blocks below the threshold are zeroed (each beam
/// keeps its strongest block), powers are rescaled (and, with `refine`,
/// re-optimized on the support), and the result is compared with a fresh
/// power minimization on the same support.
pub(crate) fn finalize(
    model: &Model,
    w: BeamformerSet,
    settings: &SolverSettings,
    seed: u64,
    refine_support: bool,
    diag: &mut Diagnostics,
) -> Result<(BeamformerSet, ClusterMatrix), SolveError> {
    // Without a backhaul weight the problem is full-cooperation power
    // minimization, so nothing is thresholded away.
    let (s, zeroed) = if settings.eta == Eta::PowerOnly {
        (model.full_support(), w.clone())
    } else {
        model.extract_serving(&w, settings.cluster_threshold)
    };
    let mut best: Option<(BeamformerSet, f64)> = None;
    let mut offer = |cand: BeamformerSet| {
        // Compare feasible points only; polishing output can undershoot a
        // weak beam's target.
        let cand = model.scale(&cand, settings).map_or(cand, |(w, _)| w);
        let p = crate::scenario::power_cost(&cand);
        if best.as_ref().is_none_or(|(_, bp)| p < *bp) {
            best = Some((cand, p));
        }
    };
    if let Some((scaled, _)) = model.scale(&zeroed, settings) {
        let out = if refine_support { refine(model, &s, scaled, settings) } else { scaled };
        offer(out);
    }
    if let Ok((rec, iters)) = polish_model(model, &s, settings, derive_seed(seed, 2)) {
        diag.conic_iterations += iters;
        offer(rec.w);
    }
    if let Some((w, _)) = best {
        return Ok((w, s));
    }
    // Keep every block that carries any power; `w` itself is feasible.
    let (s, w) = model.extract(&w, 0.0);
    Ok((w, s))
}

/// Convex-concave procedure directly on the beamformers.
pub fn g_ccp(sc: &Scenario, settings: &SolverSettings, seed: u64) -> Result<SolveOutcome, SolveError> {
    settings.validate()?;
    let start = Instant::now();
    let model = Model::multicast(sc, settings);
    let full = model.full_support();
    let (w0, iters) = p_ini(&model, settings)?;
    let rec = model
        .recover(&w0, &full, settings, seed)
        .ok_or(SolveError::InitializationInfeasible)?;
    let mut diag = Diagnostics {
        conic_iterations: iters,
        rank_one: rec.rank_one,
        randomized: rec.randomized,
        ..Default::default()
    };
    let mut w = rec.w;
    let eta = settings.eta;
    let kind = settings.smooth_kind;
    let mut theta = match settings.fixed_theta {
        Some(t) => t,
        None => theta_init(&w.block_powers().concat()).map_err(|e| SolveError::Settings(e.to_string()))?,
    };
    'outer: loop {
        let pass = diag.outer_passes;
        diag.outer_passes += 1;
        let mut obj = model.surrogate(&w.block_powers(), kind, theta, eta);
        let record = |it: usize, obj: f64, w: &BeamformerSet, trace: &mut Vec<TraceRow>| {
            if settings.trace {
                let (s, z) = model.extract_serving(w, settings.cluster_threshold);
                trace.push(TraceRow {
                    pass,
                    theta,
                    iteration: it,
                    surrogate: obj,
                    true_cost: network_cost(&z, &s, sc, eta).total,
                    min_sinr_margin: model.margin(w),
                });
            }
        };
        record(0, obj, &w, &mut diag.trace);
        let mut converged = false;
        let mut done = 0;
        for it in 1..=settings.ccp_max_iters {
            let weights = model.ccp_weights(&w.block_powers(), kind, theta, eta);
            let Some((next, iters)) = step(&model, &full, &w, &weights, settings) else {
                diag.inner_iterations.push(done);
                diag.inner_converged.push(false);
                break 'outer;
            };
            diag.conic_iterations += iters;
            let new_obj = model.surrogate(&next.block_powers(), kind, theta, eta);
            // Solver error can nudge the surrogate up near a fixed point;
            // such a step is dropped and the pass ends at the current iterate.
            if new_obj > obj {
                converged = rel_change(obj, new_obj) < settings.ccp_rel_tol;
                break;
            }
            w = next;
            done = it;
            record(it, new_obj, &w, &mut diag.trace);
            let change = rel_change(obj, new_obj);
            obj = new_obj;
            if change < settings.ccp_rel_tol {
                converged = true;
                break;
            }
        }
        diag.inner_iterations.push(done);
        diag.inner_converged.push(converged);
        if eta == Eta::PowerOnly || settings.fixed_theta.is_some() {
            break;
        }
        match theta_next(theta, &settings.anneal) {
            Some(t) => theta = t,
            None => break,
        }
    }
    let (w, s) = finalize(&model, w, settings, seed, true, &mut diag)?;
    diag.wall_time = start.elapsed().as_secs_f64();
    Ok(SolveOutcome {
        costs: network_cost(&w, &s, sc, eta),
        min_sinr_margin: model.margin(&w),
        beamformers: w,
        clustering: s,
        diagnostics: diag,
    })
}
