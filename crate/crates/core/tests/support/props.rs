//! Randomized invariants shared by the property tests and the acceptance
//! run.

use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::sample::subsequence;
use proptest::test_runner::{TestError, TestRunner};

use graphconc::graph::{
    canonical_pairs, parse_edge_list, serialize_edge_list, BlockStructure, Graph,
};
use graphconc::harness::{run_study2, StudyConfig, StudyId};
use graphconc::models::{estimate_with, sample_bernoulli, ModelSpec};
use graphconc::oracle::{
    compute_dependence_profile, exact_theta_star, ExactDistribution, SupportPredicate,
};
use graphconc::stats::{Statistic, StatisticKind};

const SLACK: f64 = 1e-12;

pub const CASES: u32 = 1000;

fn run<S: Strategy>(
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), TestError<String>>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(ProptestConfig {
        cases: CASES,
        failure_persistence: None,
        ..ProptestConfig::default()
    });
    runner.run(&strategy, test).map_err(|e| match e {
        TestError::Abort(r) => TestError::Abort(r),
        TestError::Fail(r, v) => TestError::Fail(r, format!("{v:?}")),
    })
}

fn graph_from(n: usize, directed: bool, bits: &[bool]) -> Graph {
    let edges: Vec<_> = canonical_pairs(n, directed)
        .into_iter()
        .zip(bits)
        .filter(|(_, &b)| b)
        .map(|(e, _)| e)
        .collect();
    Graph::from_edges(n, directed, &edges).unwrap()
}

fn arb_graph(max_n: usize, directed: bool) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(move |n| {
        let pairs = canonical_pairs(n, directed).len();
        prop::collection::vec(any::<bool>(), pairs)
            .prop_map(move |bits| graph_from(n, directed, &bits))
    })
}

fn arb_any_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    prop_oneof![arb_graph(max_n, false), arb_graph(max_n, true)]
}

fn arb_blocks(n: usize) -> impl Strategy<Value = BlockStructure> {
    // sorted random labels, relabelled to contiguous ids
    prop::collection::vec(0..n, n).prop_map(|labels| {
        let mut seen: Vec<usize> = labels.clone();
        seen.sort_unstable();
        seen.dedup();
        let assignment = labels
            .iter()
            .map(|l| seen.binary_search(l).unwrap())
            .collect();
        BlockStructure::new(assignment).unwrap()
    })
}

fn arb_perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn kinds_for(g: &Graph) -> Vec<Statistic> {
    StatisticKind::ALL
        .into_iter()
        .filter(|k| k.needs_directed() == g.is_directed())
        .filter_map(|k| Statistic::simple(k).ok())
        .filter(|s| s.kind() != StatisticKind::GeodesicDistance || g.n() >= 2)
        .collect()
}

fn pools() -> &'static (rayon::ThreadPool, rayon::ThreadPool) {
    static POOLS: OnceLock<(rayon::ThreadPool, rayon::ThreadPool)> = OnceLock::new();
    POOLS.get_or_init(|| {
        let make = |t| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .unwrap()
        };
        (make(1), make(4))
    })
}

fn arb_beta_theta(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 2..=max_n)
}

fn distributions_are_normalized() -> Result<(), TestError<String>> {
    run(arb_any_graph(12), |g| {
        for stat in kinds_for(&g) {
            let events = stat.unit_events(&g).unwrap();
            if events.unit_count() == 0 {
                prop_assert!(stat.distribution(&g).is_err());
                continue;
            }
            let f = stat.distribution(&g).unwrap();
            prop_assert_eq!(f.values.len(), stat.bin_count(g.n()));
            prop_assert!(f.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
            prop_assert!((f.values.iter().sum::<f64>() - 1.0).abs() < SLACK);
        }
        Ok(())
    })
}

fn permutation_invariance() -> Result<(), TestError<String>> {
    run(
        arb_any_graph(10).prop_flat_map(|g| {
            let n = g.n();
            (Just(g), arb_perm(n))
        }),
        |(g, perm)| {
            let h = g.permute(&perm).unwrap();
            prop_assert_eq!(h.edge_count(), g.edge_count());
            for stat in kinds_for(&g) {
                match (stat.distribution(&g), stat.distribution(&h)) {
                    (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                    (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
                }
            }
            Ok(())
        },
    )
}

fn block_statistic_permutation_invariance() -> Result<(), TestError<String>> {
    run(
        arb_graph(9, true).prop_flat_map(|g| {
            let n = g.n();
            (Just(g), arb_blocks(n), arb_perm(n))
        }),
        |(g, blocks, perm)| {
            let relabelled = {
                let mut a = vec![0; g.n()];
                for (i, &p) in perm.iter().enumerate() {
                    a[p] = blocks.block_of(i);
                }
                BlockStructure::new(a).unwrap()
            };
            let f = Statistic::within_block_out_degree(blocks, None)
                .unwrap()
                .distribution(&g)
                .unwrap();
            let h = Statistic::within_block_out_degree(relabelled, None)
                .unwrap()
                .distribution(&g.permute(&perm).unwrap())
                .unwrap();
            prop_assert_eq!(f, h);
            Ok(())
        },
    )
}

fn edge_list_round_trip() -> Result<(), TestError<String>> {
    run(
        arb_any_graph(15).prop_flat_map(|g| {
            let n = g.n();
            (Just(g), prop::option::of(arb_blocks(n)))
        }),
        |(g, blocks)| {
            let text = serialize_edge_list(&g, blocks.as_ref());
            let (back, back_blocks) = parse_edge_list(&text).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(back_blocks, blocks);
            prop_assert_eq!(
                serialize_edge_list(&back, None),
                serialize_edge_list(&g, None)
            );
            Ok(())
        },
    )
}

fn handshake_and_counting_identities() -> Result<(), TestError<String>> {
    run(arb_graph(12, false), |g| {
        let n = g.n();
        let deg = Statistic::degree().distribution(&g).unwrap();
        let degree_sum: f64 = deg
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| k as f64 * v * n as f64)
            .sum();
        prop_assert!((degree_sum - 2.0 * g.edge_count() as f64).abs() < 1e-9);
        if n >= 2 {
            let geo = Statistic::geodesic().distribution(&g).unwrap();
            prop_assert_eq!(geo.basis_count, n * (n - 1) / 2);
            let adjacent = geo.values[0] * geo.basis_count as f64;
            prop_assert!((adjacent - g.edge_count() as f64).abs() < 1e-9);
        }
        let esp = Statistic::esp().unit_events(&g).unwrap();
        prop_assert_eq!(esp.unit_count(), g.edge_count());
        // each triangle gives one shared partner to each of its three edges
        let triangles = (0..n)
            .flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k))))
            .filter(|&(i, j, k)| g.has_edge(i, j) && g.has_edge(j, k) && g.has_edge(i, k))
            .count();
        let partner_sum: usize = esp.categories.iter().sum();
        prop_assert_eq!(partner_sum, 3 * triangles);
        Ok(())
    })
}

fn directed_degree_identities() -> Result<(), TestError<String>> {
    run(arb_graph(10, true), |g| {
        let out = Statistic::simple(StatisticKind::OutDegree)
            .unwrap()
            .unit_events(&g)
            .unwrap();
        let inn = Statistic::simple(StatisticKind::InDegree)
            .unwrap()
            .unit_events(&g)
            .unwrap();
        prop_assert_eq!(out.categories.iter().sum::<usize>(), g.edge_count());
        prop_assert_eq!(inn.categories.iter().sum::<usize>(), g.edge_count());
        Ok(())
    })
}

fn estimates_ignore_thread_count() -> Result<(), TestError<String>> {
    run((any::<u64>(), arb_beta_theta(6)), |(seed, theta)| {
        let probs = graphconc::models::beta_model_probs(&theta);
        let n = theta.len();
        let stat = Statistic::degree();
        let run = || {
            estimate_with(&stat, n, 6, seed, |rng| {
                sample_bernoulli(&probs, false, rng)
            })
            .unwrap()
        };
        let (one, four) = pools();
        let a = one.install(run);
        let b = four.install(run);
        prop_assert_eq!(a, b);
        Ok(())
    })
}

fn exact_law_is_normalized() -> Result<(), TestError<String>> {
    run(arb_beta_theta(4), |theta| {
        let spec = ModelSpec::BetaModel { theta };
        let d = ExactDistribution::from_model(&spec, None).unwrap();
        prop_assert!((d.total_mass() - 1.0).abs() < SLACK);
        prop_assert!(d.iter().all(|(_, p)| p >= 0.0));
        let theta_star = exact_theta_star(&d, &Statistic::degree()).unwrap();
        prop_assert!((theta_star.iter().sum::<f64>() - 1.0).abs() < SLACK);
        Ok(())
    })
}

fn dependence_profile_invariants() -> Result<(), TestError<String>> {
    run((arb_beta_theta(4), 0usize..=6), |(theta, edges)| {
        let spec = ModelSpec::BetaModel { theta };
        let d = ExactDistribution::from_model(&spec, None).unwrap();
        let stat = Statistic::degree();
        let full = compute_dependence_profile(&d, &stat, &SupportPredicate::All).unwrap();
        if let Some(delta) = full.delta_n {
            prop_assert!((delta - full.c_n).abs() < 1e-10);
            prop_assert!(delta <= full.prop1_bound + SLACK);
        }
        prop_assert!(full.d_per_k.iter().all(|&v| v >= 1.0 - SLACK));
        prop_assert!(
            (full.d_n - full.d_per_k.iter().cloned().fold(f64::MIN, f64::max)).abs() < SLACK
        );
        let pred = SupportPredicate::MaxEdges(edges);
        if d.mass(&pred) > 0.0 {
            let restricted = compute_dependence_profile(&d, &stat, &pred).unwrap();
            prop_assert!(restricted.d_n <= full.d_n + SLACK);
        }
        Ok(())
    })
}

fn study_csv_ignores_thread_count() -> Result<(), TestError<String>> {
    run(0u64..1_000_000, |seed| {
        let mut cfg = StudyConfig::defaults(StudyId::Study2);
        // ESP needs edges in at least two theta* draws, which tiny sparse
        // graphs often lack
        cfg.kinds = vec![StatisticKind::Degree, StatisticKind::GeodesicDistance];
        cfg.n_list = vec![4, 5];
        cfg.alpha_list = vec![0.25];
        cfg.replications = 2;
        cfg.theta_star_samples = 3;
        cfg.master_seed = seed;
        let (one, four) = pools();
        let a = one.install(|| run_study2(&cfg).unwrap().to_csv());
        let b = four.install(|| run_study2(&cfg).unwrap().to_csv());
        prop_assert_eq!(a, b);
        Ok(())
    })
}

fn respondent_subsets_stay_normalized() -> Result<(), TestError<String>> {
    run(
        arb_graph(10, true).prop_flat_map(|g| {
            let n = g.n();
            (
                Just(g),
                arb_blocks(n),
                subsequence((0..n).collect::<Vec<_>>(), 1..=n),
            )
        }),
        |(g, blocks, resp)| {
            let stat =
                Statistic::within_block_out_degree(blocks.clone(), Some(resp.clone())).unwrap();
            let f = stat.distribution(&g).unwrap();
            prop_assert_eq!(f.basis_count, resp.len());
            prop_assert!((f.values.iter().sum::<f64>() - 1.0).abs() < SLACK);
            prop_assert_eq!(f.values.len(), blocks.max_block_size());
            Ok(())
        },
    )
}

pub type Suite = (&'static str, fn() -> Result<(), TestError<String>>);

/// Every invariant suite, run with [`CASES`] random cases each.
pub const SUITES: &[Suite] = &[
    ("distributions_are_normalized", distributions_are_normalized),
    ("permutation_invariance", permutation_invariance),
    (
        "block_statistic_permutation_invariance",
        block_statistic_permutation_invariance,
    ),
    ("edge_list_round_trip", edge_list_round_trip),
    (
        "handshake_and_counting_identities",
        handshake_and_counting_identities,
    ),
    ("directed_degree_identities", directed_degree_identities),
    (
        "estimates_ignore_thread_count",
        estimates_ignore_thread_count,
    ),
    ("exact_law_is_normalized", exact_law_is_normalized),
    (
        "dependence_profile_invariants",
        dependence_profile_invariants,
    ),
    (
        "study_csv_ignores_thread_count",
        study_csv_ignores_thread_count,
    ),
    (
        "respondent_subsets_stay_normalized",
        respondent_subsets_stay_normalized,
    ),
];
