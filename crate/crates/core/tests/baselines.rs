use approx::assert_relative_eq;
use cachecast::baselines::*;
use cachecast::ccp::*;
use cachecast::linalg::CMatrix;
use cachecast::scenario::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `rows[k]` is user `k`'s channel; group `m` requests content `m`.
fn manual(rows: &[Vec<Complex64>], n_ant: usize, groups: &[&[usize]], cached: &[(usize, usize)]) -> Scenario {
    let mut radio = RadioConfig::small_network();
    radio.sinr_target = 10.0;
    let h = CMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
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

fn st(eta: Eta) -> SolverSettings {
    SolverSettings::default().with_eta(eta)
}

fn cost_units(sc: &Scenario, backhaul: f64, power: f64, eta: Eta) -> f64 {
    CostBreakdown::new(backhaul, power, eta, sc.radio.cost_scale).total
}

/// One user, two single-antenna BSs with gains `a > b`. Serving from the
/// strong BS costs `gamma / a` watts and one backhaul copy; serving from
/// both costs `gamma / (a + b)` and two copies.
#[test]
fn two_bs_crossover_matches_enumeration() {
    let (ha, hb) = (c(0.9, 0.2), c(0.3, -0.5));
    let sc = manual(&[vec![ha, hb]], 1, &[&[0]], &[]);
    let (a, b) = (ha.norm_sqr(), hb.norm_sqr());
    let gamma = sc.groups.gamma[0];
    let r = sc.groups.rate[0];
    let single = (r, gamma / a);
    let both = (2.0 * r, gamma / (a + b));
    let scale = sc.radio.cost_scale;
    let crossover = (r / scale.backhaul_unit) / ((single.1 - both.1) / scale.power_unit);
    let table = exhaustive_table(&sc, &st(Eta::Weight(1.0)), 0, true).unwrap();
    assert_eq!(table.records.len(), 4);
    for (eta, expect, bits) in [(0.5 * crossover, single, "10"), (2.0 * crossover, both, "11")] {
        let eta = Eta::Weight(eta);
        let best = table.best(&sc, eta).unwrap();
        assert_eq!(best.best.to_bit_string(), bits);
        assert_relative_eq!(best.outcome.costs.backhaul, expect.0, max_relative = 1e-12);
        assert_relative_eq!(best.outcome.costs.power, expect.1, max_relative = 1e-5);
        assert_relative_eq!(best.outcome.costs.total, cost_units(&sc, expect.0, expect.1, eta), max_relative = 1e-5);
        let greedy = greedy_clustering(&sc, eta, &st(eta), 0).unwrap();
        assert_eq!(greedy.clustering.to_bit_string(), bits);
    }
}

#[test]
fn oracle_tradeoff_is_monotone_in_eta() {
    let rows = vec![
        vec![c(0.7, 0.1), c(-0.2, 0.4), c(0.3, 0.3), c(0.1, -0.6)],
        vec![c(0.2, -0.5), c(0.6, 0.2), c(-0.4, 0.1), c(0.5, 0.5)],
        vec![c(-0.3, 0.2), c(0.1, 0.1), c(0.8, -0.2), c(0.2, 0.6)],
    ];
    let sc = manual(&rows, 2, &[&[0, 1], &[2]], &[]);
    let table = exhaustive_table(&sc, &st(Eta::Weight(1.0)), 3, true).unwrap();
    let mut last: Option<(f64, f64)> = None;
    for eta in [1e-6, 1e-4, 1e-3, 0.01, 0.1, 1.0, 10.0, 100.0] {
        let best = table.best(&sc, Eta::Weight(eta)).unwrap().outcome.costs;
        if let Some((b, p)) = last {
            assert!(best.backhaul >= b, "backhaul fell at eta {eta}");
            assert!(best.power <= p * (1.0 + 1e-12), "power rose at eta {eta}");
        }
        last = Some((best.backhaul, best.power));
    }
}

#[test]
fn heuristics_never_beat_the_oracle() {
    // One user per group, so the relaxation is tight and polishing is exact.
    let rows = vec![
        vec![c(0.9, 0.1), c(0.2, -0.3)],
        vec![c(0.1, 0.4), c(0.8, 0.2)],
    ];
    let sc = manual(&rows, 1, &[&[0], &[1]], &[(0, 1)]);
    let table = exhaustive_table(&sc, &st(Eta::Weight(1.0)), 0, true).unwrap();
    for eta in [Eta::Weight(1e-6), Eta::Weight(0.1), Eta::Weight(10.0), Eta::PowerOnly] {
        let oracle = table.best(&sc, eta).unwrap().outcome.costs.total;
        let s = st(eta);
        for (name, out) in [
            ("greedy", greedy_clustering(&sc, eta, &s, 0)),
            ("g_ccp", g_ccp(&sc, &s, 0)),
            ("sdr_ccp", sdr_ccp(&sc, &s, 0)),
        ] {
            let total = out.unwrap().costs.total;
            assert!(total >= oracle * (1.0 - 1e-4), "{name} at {eta}: {total} < {oracle}");
        }
    }
}

#[test]
fn all_cached_leaves_one_clustering() {
    let rows = vec![vec![c(0.5, 0.5), c(0.3, -0.1)], vec![c(-0.2, 0.6), c(0.7, 0.0)]];
    let sc = manual(&rows, 1, &[&[0], &[1]], &[(0, 0), (0, 1), (1, 0), (1, 1)]);
    let table = exhaustive_table(&sc, &st(Eta::Weight(1.0)), 0, true).unwrap();
    assert_eq!(table.records.len(), 1);
    assert_eq!(table.pruned, 15);
    let best = table.best(&sc, Eta::Weight(1.0)).unwrap();
    assert_eq!(best.best, ClusterMatrix::full(2, 2));
    assert_eq!(best.outcome.costs.backhaul, 0.0);
}

#[test]
fn single_bs_single_group_uncached() {
    let h = vec![c(0.4, 0.3), c(0.0, 0.5)];
    let hn: f64 = h.iter().map(|x| x.norm_sqr()).sum();
    let sc = manual(&[h], 2, &[&[0]], &[]);
    let table = exhaustive_table(&sc, &st(Eta::Weight(1.0)), 0, false).unwrap();
    assert_eq!(table.records.len(), 2);
    assert!(!table.records.iter().find(|r| r.clustering.count() == 0).unwrap().feasible);
    let best = table.best(&sc, Eta::Weight(1.0)).unwrap();
    assert_eq!(best.best, ClusterMatrix::full(1, 1));
    assert_relative_eq!(best.outcome.costs.power, sc.groups.gamma[0] / hn, max_relative = 1e-5);
    assert_relative_eq!(best.outcome.costs.backhaul, sc.groups.rate[0]);
}

#[test]
fn unicast_backhaul_counts_one_copy_per_bs_and_content() {
    let rows = vec![vec![c(1.0, 0.0), c(1.0, 0.0)]; 3];
    let sc = manual(&rows, 1, &[&[0, 1], &[2]], &[(0, 1)]);
    let r = sc.groups.rate[0];
    // Users 0 and 1 share content 0 at BS 0; content 0 is cached at BS 1.
    let s = ClusterMatrix {
        s: vec![vec![true, true], vec![true, false], vec![false, true]],
    };
    assert_relative_eq!(unicast_backhaul(&s, &sc), 2.0 * r);
    let none = ClusterMatrix::empty(3, 2);
    assert_eq!(unicast_backhaul(&none, &sc), 0.0);
}

#[test]
fn unicast_with_one_user_matches_multicast() {
    let h = vec![c(0.8, -0.1), c(0.2, 0.3), c(0.1, 0.2), c(-0.3, 0.1)];
    let sc = manual(&[h], 2, &[&[0]], &[]);
    for eta in [Eta::Weight(1e-6), Eta::Weight(100.0), Eta::PowerOnly] {
        let s = st(eta);
        let uni = unicast_sparse_bf(&sc, eta, &s, 0).unwrap();
        let multi = g_ccp(&sc, &s, 0).unwrap();
        assert_relative_eq!(uni.costs.total, multi.costs.total, max_relative = 1e-3);
        assert!(uni.min_sinr_margin >= 1.0 - 1e-5);
    }
}

#[test]
fn enumeration_limit_is_enforced() {
    // 3 groups x 7 BSs = 21 free pairs, one more than the limit allows.
    let rows: Vec<Vec<Complex64>> = (0..3)
        .map(|k| (0..7).map(|n| c(1.0 + (k * 7 + n) as f64 * 0.01, 0.0)).collect())
        .collect();
    let sc = manual(&rows, 1, &[&[0], &[1], &[2]], &[]);
    match exhaustive_table(&sc, &st(Eta::Weight(1.0)), 0, true) {
        Err(SolveError::TooManyClusterings(n)) => assert_eq!(n, 1 << 21),
        other => panic!("expected the enumeration guard, got {other:?}"),
    }
    assert!(MAX_CLUSTERINGS < 1 << 21);
}

fn micro() -> impl Strategy<Value = (Vec<Vec<Complex64>>, usize, Vec<(usize, usize)>)> {
    (1usize..=2, 1usize..=2).prop_flat_map(|(n_bs, n_groups)| {
        let entry = (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b));
        (
            prop::collection::vec(prop::collection::vec(entry, n_bs), n_groups),
            Just(n_groups),
            prop::collection::vec(any::<bool>(), n_groups * n_bs),
        )
            .prop_map(move |(rows, g, bits)| {
                let cached = bits
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| **b)
                    .map(|(i, _)| (i / n_bs, i % n_bs))
                    .collect();
                (rows, g, cached)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn forcing_cached_pairs_keeps_the_optimum((rows, g, cached) in micro(), eta in prop::sample::select(vec![1e-6, 0.1, 10.0])) {
        prop_assume!(rows.iter().flatten().all(|x| x.norm_sqr() > 0.05));
        let groups: Vec<Vec<usize>> = (0..g).map(|k| vec![k]).collect();
        let refs: Vec<&[usize]> = groups.iter().map(Vec::as_slice).collect();
        let sc = manual(&rows, 1, &refs, &cached);
        let s = st(Eta::Weight(eta));
        let pruned = exhaustive_table(&sc, &s, 0, true).unwrap();
        let full = exhaustive_table(&sc, &s, 0, false).unwrap();
        prop_assert_eq!(full.records.len() as u128, pruned.records.len() as u128 + pruned.pruned);
        let a = pruned.best(&sc, Eta::Weight(eta));
        let b = full.best(&sc, Eta::Weight(eta));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let (x, y) = (a.outcome.costs.total, b.outcome.costs.total);
                prop_assert!((x - y).abs() <= 1e-3 * x.abs().max(y.abs()), "{} vs {}", x, y);
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "pruned {:?} vs unpruned {:?}", a.is_ok(), b.is_ok()),
        }
    }
}
