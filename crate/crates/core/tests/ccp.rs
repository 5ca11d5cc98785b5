use approx::assert_relative_eq;
use cachecast::ccp::*;
use cachecast::linalg::{outer, CMatrix};
use cachecast::scenario::*;
use cachecast::smooth::SmoothKind;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Hand-built network: `rows[k]` is user `k`'s channel, `groups` lists the
/// users of each group (group `m` requests content `m`).
fn manual(rows: &[Vec<Complex64>], n_ant: usize, groups: &[&[usize]], cached: &[(usize, usize)], gamma_db: f64) -> Scenario {
    let mut radio = RadioConfig::small_network();
    radio.sinr_target = gamma_db;
    let width = rows[0].len();
    let h = CMatrix::from_fn(rows.len(), width, |i, j| rows[i][j]);
    let groups = groups
        .iter()
        .enumerate()
        .map(|(m, u)| Group {
            content: m,
            users: u.to_vec(),
        })
        .collect();
    Scenario::manual(radio, h, n_ant, 1.0, groups, rows.len() + 2, cached).unwrap()
}

fn settings(eta: Eta) -> SolverSettings {
    SolverSettings::default().with_eta(eta)
}

const ETAS: [Eta; 3] = [Eta::Weight(1e-6), Eta::Weight(1.0), Eta::PowerOnly];

#[test]
fn p_ini_scalar_closed_form() {
    let sc = manual(&[vec![c(1.0, 0.0)]], 1, &[&[0]], &[], 10.0);
    let w = solve_p_ini(&sc, &settings(Eta::Weight(1.0))).unwrap();
    assert_relative_eq!(w.trace(), 10.0, max_relative = 1e-6);
}

#[test]
fn single_user_every_method_hits_closed_form() {
    let h = vec![c(0.6, -0.2), c(0.1, 0.9), c(-0.4, 0.3)];
    let hn: f64 = h.iter().map(|x| x.norm_sqr()).sum();
    let expect = 10.0 / hn;
    let sc = manual(&[h], 3, &[&[0]], &[], 10.0);
    for eta in ETAS {
        let st = settings(eta);
        assert_relative_eq!(solve_p_ini(&sc, &st).unwrap().trace(), expect, max_relative = 1e-4);
        let full = ClusterMatrix::full(1, 1);
        assert_relative_eq!(polish(&full, &sc, &st, 0).unwrap().costs.power, expect, max_relative = 1e-4);
        for out in [g_ccp(&sc, &st, 0).unwrap(), sdr_ccp(&sc, &st, 0).unwrap()] {
            assert_relative_eq!(out.costs.power, expect, max_relative = 1e-4);
            assert!(out.min_sinr_margin >= 1.0 - 1e-5);
        }
    }
}

#[test]
fn two_user_multicast_served_by_weaker_channel() {
    let (a, b) = (c(0.8, 0.3), c(-0.2, 0.5));
    let expect = 10.0 / a.norm_sqr().min(b.norm_sqr());
    let sc = manual(&[vec![a], vec![b]], 1, &[&[0, 1]], &[], 10.0);
    for eta in ETAS {
        let st = settings(eta);
        assert_relative_eq!(solve_p_ini(&sc, &st).unwrap().trace(), expect, max_relative = 1e-4);
        assert_relative_eq!(
            polish(&ClusterMatrix::full(1, 1), &sc, &st, 1).unwrap().costs.power,
            expect,
            max_relative = 1e-4
        );
        assert_relative_eq!(g_ccp(&sc, &st, 1).unwrap().costs.power, expect, max_relative = 1e-4);
        assert_relative_eq!(sdr_ccp(&sc, &st, 1).unwrap().costs.power, expect, max_relative = 1e-4);
    }
}

// With one antenna and identical channels, SINR_1 * SINR_2 < 1, so two
// groups can never both reach 10 dB.
#[test]
fn identical_channels_for_two_groups_are_infeasible() {
    let h = c(0.7, 0.1);
    let sc = manual(&[vec![h], vec![h]], 1, &[&[0], &[1]], &[], 10.0);
    let st = settings(Eta::Weight(1.0));
    assert_eq!(solve_p_ini(&sc, &st).unwrap_err(), SolveError::PiniInfeasible);
    assert_eq!(g_ccp(&sc, &st, 0).unwrap_err(), SolveError::PiniInfeasible);
    assert_eq!(sdr_ccp(&sc, &st, 0).unwrap_err(), SolveError::PiniInfeasible);
    assert!(SolveError::PiniInfeasible.is_infeasible());
}

#[test]
fn vanishing_target_needs_vanishing_power() {
    let sc = manual(&[vec![c(1.0, 0.0), c(0.5, 0.5)]], 2, &[&[0]], &[], -60.0);
    let w = solve_p_ini(&sc, &settings(Eta::Weight(1.0))).unwrap();
    assert!(w.trace() < 1e-5);
}

#[test]
fn rank_one_extraction_contract() {
    let v = vec![c(0.3, 0.4), c(-1.0, 0.2)];
    let set = LiftedSet {
        n_ant: 2,
        w: vec![outer(&v)],
    };
    let w = extract_rank1(&set, 1e-6).unwrap();
    // equal up to a common phase
    let phase = w.w[0][0] / v[0];
    assert_relative_eq!(phase.norm(), 1.0, max_relative = 1e-9);
    for (a, b) in w.w[0].iter().zip(&v) {
        assert!((a - b * phase).norm() < 1e-9);
    }

    let id = LiftedSet {
        n_ant: 2,
        w: vec![CMatrix::identity(2, 2)],
    };
    assert!(extract_rank1(&id, 0.5).is_none());

    let nearly = LiftedSet {
        n_ant: 2,
        w: vec![CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(1e-9, 0.0)]))],
    };
    let w = extract_rank1(&nearly, 1e-6).unwrap();
    assert_relative_eq!(w.w[0][0].norm(), 1.0, max_relative = 1e-9);
    assert!(w.w[0][1].norm() < 1e-12);
}

#[test]
fn randomization_on_rank_one_input_keeps_its_power() {
    let h = vec![c(0.5, 0.1), c(0.2, -0.7)];
    let hn: f64 = h.iter().map(|x| x.norm_sqr()).sum();
    let sc = manual(&[h.clone()], 2, &[&[0]], &[], 10.0);
    // matched filter at twice the needed power: scaling brings it back
    let mut dir = outer(&h);
    dir *= c(2.0 * 10.0 / (hn * hn), 0.0);
    let set = LiftedSet { n_ant: 2, w: vec![dir] };
    let w = randomize_and_scale(&set, &sc, &settings(Eta::Weight(1.0)), 3).unwrap();
    assert_relative_eq!(power_cost(&w), 10.0 / hn, max_relative = 1e-6);
}

#[test]
fn randomization_without_signal_fails() {
    let sc = manual(&[vec![c(1.0, 0.0), c(0.0, 0.0)]], 2, &[&[0]], &[], 10.0);
    // covariance orthogonal to the only user's channel
    let set = LiftedSet {
        n_ant: 2,
        w: vec![outer(&[c(0.0, 0.0), c(1.0, 0.0)])],
    };
    assert_eq!(
        randomize_and_scale(&set, &sc, &settings(Eta::Weight(1.0)), 0).unwrap_err(),
        SolveError::InitializationInfeasible
    );
}

#[test]
fn cluster_extraction_rules() {
    let groups = MulticastGroups::new(
        vec![Group { content: 0, users: vec![0] }, Group { content: 1, users: vec![1] }],
        10.0,
        1e7,
    )
    .unwrap();
    let mut cache = CachePlacement::empty(2, 2);
    cache.c[1][0] = true;
    let w = BeamformerSet {
        n_ant: 1,
        w: vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1e-3, 0.0)]],
    };
    let (s, zeroed) = extract_clusters(&w, &cache, &groups, 1e-4);
    // (0,1) zero and uncached; (1,0) zero but cached; (1,1) below threshold
    assert_eq!(s.to_bit_string(), "10|10");
    assert_eq!(zeroed.w[1][1], c(0.0, 0.0));
    assert_eq!(backhaul_cost(&s, &cache, &groups), groups.rate[0]);

    let flat = BeamformerSet {
        n_ant: 1,
        w: vec![vec![c(1.0, 0.0); 2]; 2],
    };
    assert_eq!(extract_clusters(&flat, &CachePlacement::empty(2, 2), &groups, 1e-4).0, ClusterMatrix::full(2, 2));
}

#[test]
fn polish_needs_a_serving_bs() {
    let sc = manual(&[vec![c(1.0, 0.0), c(0.5, 0.0)]], 1, &[&[0]], &[], 10.0);
    let s = ClusterMatrix::empty(1, 2);
    assert_eq!(
        polish(&s, &sc, &settings(Eta::Weight(1.0)), 0).unwrap_err(),
        SolveError::ClusteringInfeasible
    );
}

#[test]
fn polish_with_one_bs_uses_only_that_bs() {
    let sc = manual(&[vec![c(1.0, 0.0), c(0.5, 0.0)], vec![c(0.4, 0.0), c(1.0, 0.0)]], 1, &[&[0, 1]], &[], 10.0);
    let mut s = ClusterMatrix::empty(1, 2);
    s.set(0, 1, true);
    let out = polish(&s, &sc, &settings(Eta::Weight(1.0)), 0).unwrap();
    assert_relative_eq!(out.costs.power, 10.0 / 0.25, max_relative = 1e-4);
    assert_eq!(out.beamformers.block_power(0, 0), 0.0);
}

#[test]
fn full_caching_reduces_to_power_minimization() {
    let mut spec = ScenarioSpec::small_network();
    spec.cache_size = 3;
    let sc = Scenario::generate(&spec, 4).unwrap();
    let mut all = sc.clone();
    all.cache = CachePlacement::uniform(4, 3, &[0, 1, 2, 3]);
    let st = settings(Eta::Weight(1e-6));
    let p = polish(&ClusterMatrix::full(all.n_groups(), 3), &all, &st, 0).unwrap().costs.power;
    for out in [g_ccp(&all, &st, 0).unwrap(), sdr_ccp(&all, &st, 0).unwrap()] {
        assert_eq!(out.costs.backhaul, 0.0);
        assert!(out.costs.power <= p * (1.0 + 1e-4), "{} vs {p}", out.costs.power);
    }
}

#[test]
fn power_only_sdr_is_full_cooperation() {
    let sc = Scenario::generate(&ScenarioSpec::small_network(), 2).unwrap();
    let st = settings(Eta::PowerOnly);
    let full = polish(&ClusterMatrix::full(sc.n_groups(), 3), &sc, &st, 2).unwrap();
    for out in [sdr_ccp(&sc, &st, 2).unwrap(), g_ccp(&sc, &st, 2).unwrap()] {
        assert_relative_eq!(out.costs.power, full.costs.power, max_relative = 1e-4);
        assert_eq!(out.clustering, full.clustering);
    }
}

#[test]
fn weak_beam_keeps_its_serving_bs() {
    // Group 1 needs about 1e-8 of group 0's power, far below the global
    // extraction threshold.
    let rows = vec![vec![c(0.01, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(100.0, 0.0)]];
    let sc = manual(&rows, 1, &[&[0], &[1]], &[], 10.0);
    let out = g_ccp(&sc, &settings(Eta::Weight(1.0)), 0).unwrap();
    assert_eq!(out.clustering.to_bit_string(), "10|01");
    assert!(out.min_sinr_margin >= 1.0 - 1e-5);
    assert_relative_eq!(out.costs.power, 10.0 / 1e-4 + 10.0 / 1e4, max_relative = 1e-4);
}

#[test]
fn per_bs_limit_is_respected() {
    let sc = Scenario::generate(&ScenarioSpec::small_network(), 14).unwrap();
    let cap = 0.3;
    let st = SolverSettings {
        peak_power: Some(PeakPower {
            per_antenna: None,
            per_bs: Some(cap),
        }),
        ..settings(Eta::Weight(1e-6))
    };
    let out = g_ccp(&sc, &st, 14).unwrap();
    let powers = out.beamformers.block_powers();
    for n in 0..sc.n_bs() {
        let total: f64 = powers.iter().map(|row| row[n]).sum();
        assert!(total <= cap * (1.0 + 1e-6), "BS {n}: {total}");
    }
    assert!(out.min_sinr_margin >= 1.0 - 1e-5);
}

#[test]
fn relaxation_lower_bounds_every_clustering() {
    let sc = Scenario::generate(&ScenarioSpec::small_network(), 6).unwrap();
    let st = settings(Eta::Weight(1.0));
    let bound = solve_p_ini(&sc, &st).unwrap().trace();
    let m = sc.n_groups();
    for bits in 0u32..(1 << (3 * m)).min(64) {
        let mut s = ClusterMatrix::empty(m, 3);
        for i in 0..3 * m {
            s.set(i / 3, i % 3, bits >> i & 1 == 1);
        }
        if let Ok(o) = polish(&s, &sc, &st, 0) {
            assert!(o.costs.power >= bound * (1.0 - 1e-6));
        }
    }
}

#[test]
fn g_ccp_iterates_stay_feasible_and_descend() {
    for seed in 0..3 {
        let sc = Scenario::generate(&ScenarioSpec::small_network(), seed).unwrap();
        let mut st = settings(Eta::Weight(0.1));
        st.trace = true;
        let out = g_ccp(&sc, &st, seed).unwrap();
        let trace = &out.diagnostics.trace;
        assert!(!trace.is_empty());
        for r in trace {
            assert!(r.min_sinr_margin >= 1.0 - 1e-5, "{r:?}");
        }
        for pair in trace.windows(2) {
            if pair[0].pass == pair[1].pass {
                let tol = 10.0 * 1e-7 * pair[0].surrogate.abs().max(1.0);
                assert!(pair[1].surrogate <= pair[0].surrogate + tol, "{:?}", pair);
            }
        }
    }
}

#[test]
fn outcomes_are_reproducible() {
    let sc = Scenario::generate(&ScenarioSpec::small_network(), 8).unwrap();
    let st = settings(Eta::Weight(0.1));
    for run in [g_ccp, sdr_ccp] {
        let (a, b) = (run(&sc, &st, 5).unwrap(), run(&sc, &st, 5).unwrap());
        assert_eq!(a.beamformers, b.beamformers);
        assert_eq!(a.clustering, b.clustering);
        assert_eq!(a.costs, b.costs);
    }
}

#[test]
fn reported_costs_come_from_beamformers() {
    let sc = Scenario::generate(&ScenarioSpec::small_network(), 3).unwrap();
    for eta in ETAS {
        for out in [g_ccp(&sc, &settings(eta), 3).unwrap(), sdr_ccp(&sc, &settings(eta), 3).unwrap()] {
            let again = network_cost(&out.beamformers, &out.clustering, &sc, eta);
            assert_eq!(again.backhaul, out.costs.backhaul);
            assert_relative_eq!(again.power, out.costs.power, max_relative = 1e-12);
            assert_relative_eq!(min_sinr_margin(&out.beamformers, &sc), out.min_sinr_margin, max_relative = 1e-12);
            // inactive blocks are exactly zero
            for m in 0..sc.n_groups() {
                for n in 0..3 {
                    if !out.clustering.get(m, n) {
                        assert_eq!(out.beamformers.block_power(m, n), 0.0);
                    }
                }
            }
        }
    }
}

#[test]
fn settings_are_checked() {
    let sc = Scenario::generate(&ScenarioSpec::small_network(), 0).unwrap();
    let mut st = settings(Eta::Weight(1.0));
    st.ccp_max_iters = 0;
    assert!(matches!(g_ccp(&sc, &st, 0), Err(SolveError::Settings(_))));
    let mut st = settings(Eta::Weight(1.0));
    st.smooth_kind = SmoothKind::Log;
    st.anneal.beta = 1.5;
    assert!(matches!(sdr_ccp(&sc, &st, 0), Err(SolveError::Settings(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn selection_identities(v in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 6), n_bs in prop_oneof![Just(1usize), Just(2), Just(3), Just(6)]) {
        let v: Vec<Complex64> = v.into_iter().map(|(a, b)| c(a, b)).collect();
        let l = 6 / n_bs;
        let sel = SelectionMatrices::new(n_bs, l);
        let w = outer(&v);
        let total: f64 = (0..n_bs).map(|n| sel.trace(&w, n)).sum();
        prop_assert!((total - w.trace().re).abs() < 1e-12);
        let mut sum = CMatrix::zeros(6, 6);
        for n in 0..n_bs {
            let block: f64 = v[n * l..(n + 1) * l].iter().map(|x| x.norm_sqr()).sum();
            prop_assert!((sel.trace(&w, n) - block).abs() < 1e-12);
            sum += sel.j(n);
            for n2 in (0..n_bs).filter(|&x| x != n) {
                prop_assert!((sel.j(n) * sel.j(n2)).norm() == 0.0);
            }
        }
        prop_assert_eq!(sum, CMatrix::identity(6, 6));
    }
}
