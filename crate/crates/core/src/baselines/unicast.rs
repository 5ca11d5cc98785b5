use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;

use crate::ccp::model::Model;
use crate::ccp::{Diagnostics, SolveError, SolveOutcome, SolverSettings};
use crate::conic::{solve_qcqp, AffineForm, ComplexForm, QcqpConstraint, QcqpProblem, SolveStatus};
use crate::scenario::{power_cost, BeamformerSet, ClusterMatrix, CostBreakdown, Eta, Scenario};

const DELTA: f64 = 1e-6;
const REWEIGHT_ROUNDS: usize = 10;

/// Backhaul of a per-user clustering: each BS fetches one copy of every
/// uncached content it serves, at the largest rate among its users
/// requesting that content. Beams follow the group order of `sc`.
pub fn unicast_backhaul(s: &ClusterMatrix, sc: &Scenario) -> f64 {
    let mut per_copy: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut beam = 0;
    for (m, g) in sc.groups.groups.iter().enumerate() {
        for _ in &g.users {
            for n in 0..sc.n_bs() {
                if s.get(beam, n) && !sc.cache.cached(g.content, n) {
                    let e = per_copy.entry((n, g.content)).or_insert(0.0);
                    *e = e.max(sc.groups.rate[m]);
                }
            }
            beam += 1;
        }
    }
    per_copy.values().sum()
}

/// One reweighted-l1 subproblem: block norms `r_kn >= ||v_kn||` weighted
/// by `rho * alpha`, powers `p_k >= ||v_k||^2` weighted by `eta'`, and the
/// unicast SINR constraints in second-order-cone form.
fn subproblem(model: &Model, rho: &[Vec<f64>], pw: f64, sparse: bool) -> QcqpProblem {
    let (kb, nb, l) = (model.n_beams(), model.n_bs, model.n_ant);
    let dim = nb * l;
    let var = |k: usize, i: usize| k * dim + i;
    let r_idx = |k: usize, n: usize| k * nb + n;
    let p_idx = |k: usize| kb * nb + k;
    let mut p = QcqpProblem::new(kb * dim, kb * nb + kb);
    let one = Complex64::new(1.0, 0.0);
    for k in 0..kb {
        p.objective[p_idx(k)] = pw;
        p.push(QcqpConstraint::SquaredNorm {
            forms: (0..dim).map(|i| ComplexForm::new(vec![(var(k, i), one)])).collect(),
            bound: AffineForm {
                real: vec![(p_idx(k), 1.0)],
                ..Default::default()
            },
        });
        for n in 0..nb {
            p.objective[r_idx(k, n)] = if sparse { rho[k][n] * model.alpha[k][n] } else { 0.0 };
            p.push(QcqpConstraint::Norm {
                forms: (0..l).map(|i| ComplexForm::new(vec![(var(k, n * l + i), one)])).collect(),
                bound: AffineForm {
                    real: vec![(r_idx(k, n), 1.0)],
                    ..Default::default()
                },
            });
        }
        let beam = &model.beams[k];
        for &u in &beam.users {
            let h = &model.h[u];
            let s = 1.0 / model.gain[u].sqrt();
            let form = |j: usize, scale: f64| {
                ComplexForm::new((0..dim).map(|i| (var(j, i), h[i].conj() * scale)).collect())
            };
            let g = beam.gamma.sqrt() * s;
            let mut forms: Vec<ComplexForm> = (0..kb).filter(|&j| j != k).map(|j| form(j, g)).collect();
            forms.push(ComplexForm::constant(g));
            p.push(QcqpConstraint::Norm {
                forms,
                bound: AffineForm {
                    complex: (0..dim).map(|i| (var(k, i), h[i] * s)).collect(),
                    ..Default::default()
                },
            });
        }
    }
    if let Some(cap) = model.peak.per_bs {
        for n in 0..nb {
            p.push(QcqpConstraint::SquaredNorm {
                forms: (0..kb)
                    .flat_map(|k| (0..l).map(move |i| ComplexForm::new(vec![(var(k, n * l + i), one)])))
                    .collect(),
                bound: AffineForm {
                    constant: cap,
                    ..Default::default()
                },
            });
        }
    }
    if let Some(cap) = model.peak.per_antenna {
        for i in 0..dim {
            p.push(QcqpConstraint::SquaredNorm {
                forms: (0..kb).map(|k| ComplexForm::new(vec![(var(k, i), one)])).collect(),
                bound: AffineForm {
                    constant: cap,
                    ..Default::default()
                },
            });
        }
    }
    p
}

/// Sparse unicast beamforming: every served user gets its own beamformer,
/// and BS sparsity comes from iteratively reweighted block l1 norms.
///
/// The outcome holds one beamformer and one clustering row per served
/// user, in group order.
pub fn unicast_sparse_bf(
    sc: &Scenario,
    eta: Eta,
    settings: &SolverSettings,
    seed: u64,
) -> Result<SolveOutcome, SolveError> {
    settings.validate()?;
    let start = Instant::now();
    let model = Model::unicast(sc, settings);
    let (kb, nb, l) = (model.n_beams(), model.n_bs, model.n_ant);
    let pw = model.power_weight(eta);
    let sparse = eta != Eta::PowerOnly;
    let mut rho = vec![vec![1.0; nb]; kb];
    let mut w = BeamformerSet::zeros(kb, nb, l);
    let mut diag = Diagnostics::default();
    let rounds = if sparse { REWEIGHT_ROUNDS } else { 1 };
    for round in 0..rounds {
        let p = subproblem(&model, &rho, pw, sparse);
        let sol = solve_qcqp(&p, &settings.conic);
        match sol.status {
            SolveStatus::Optimal => {}
            SolveStatus::Infeasible if round == 0 => return Err(SolveError::UnicastInfeasible),
            // A later round only changes weights; keep the last iterate.
            _ if round > 0 => break,
            s => return Err(SolveError::Numerical(format!("unicast subproblem returned {s:?}"))),
        }
        diag.conic_iterations += sol.iterations;
        diag.inner_iterations.push(1);
        let dim = nb * l;
        w = BeamformerSet {
            n_ant: l,
            w: (0..kb).map(|k| sol.primal.v[k * dim..(k + 1) * dim].to_vec()).collect(),
        };
        for (k, row) in rho.iter_mut().enumerate() {
            for (n, r) in row.iter_mut().enumerate() {
                *r = 1.0 / (w.block_power(k, n).sqrt() + DELTA);
            }
        }
    }
    diag.outer_passes = diag.inner_iterations.len();
    let (w, s) = crate::ccp::gccp::finalize(&model, w, settings, seed, false, &mut diag)?;
    let costs = CostBreakdown::new(unicast_backhaul(&s, sc), power_cost(&w), eta, sc.radio.cost_scale);
    diag.wall_time = start.elapsed().as_secs_f64();
    Ok(SolveOutcome {
        min_sinr_margin: model.margin(&w),
        beamformers: w,
        clustering: s,
        costs,
        diagnostics: diag,
    })
}
