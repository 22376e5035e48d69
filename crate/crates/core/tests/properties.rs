mod common;

use martingale_multipliers::filtration::{
    adapted_l1_norm, dual_norm_maximize, lepingle_project, weisz_dual_norm,
};
use martingale_multipliers::harmonics::{dft_forward, dft_inverse, GroupFunction, GroupSpec, MultiIndex};
use martingale_multipliers::harness::{emit_multiplier_table, parse_multiplier_table, parse_multiplier_table_str};
use martingale_multipliers::multiplier::MultiplierTable;
use martingale_multipliers::oracles::davis_garsia::{davis_garsia_solve, DavisGarsiaOptions};
use martingale_multipliers::oracles::samplers::gaussian_adapted;
use martingale_multipliers::rng::{complex_gaussian, seeded};
use num_complex::Complex64;
use proptest::prelude::*;

fn table_strategy() -> impl Strategy<Value = MultiplierTable> {
    (1usize..=3).prop_flat_map(|channels| {
        prop::collection::btree_map(
            (prop::collection::vec(-6i64..=6, 0..4), 0..channels),
            0.0f64..1e6,
            0..12,
        )
        .prop_map(move |m| {
            let mut t = MultiplierTable::new(channels).unwrap();
            for ((idx, s), v) in m {
                let idx = MultiIndex::new(idx);
                if t.get(&idx, s) == 0.0 && !t.iter().any(|(i, c, _)| *i == idx && c == s) {
                    t.insert(idx, s, v).unwrap();
                }
            }
            t
        })
    })
}

proptest! {
    #[test]
    fn table_round_trip(t in table_strategy()) {
        let doc = emit_multiplier_table(&t);
        prop_assert_eq!(&parse_multiplier_table(&doc).unwrap(), &t);
        let text = serde_json::to_string(&doc).unwrap();
        prop_assert_eq!(parse_multiplier_table_str(&text).unwrap(), t);
    }
}

#[test]
fn dft_round_trip_at_4096_points() {
    let g = GroupSpec::torus(16, 3).unwrap();
    assert_eq!(g.size(), 4096);
    let mut rng = seeded(12);
    let f = GroupFunction::new(g.clone(), 1, (0..4096).map(|_| complex_gaussian(&mut rng)).collect()).unwrap();
    let spec = dft_forward(&f);
    assert!(dft_inverse(&spec).max_abs_diff(&f) < 1e-12);
    assert!((spec.energy() - f.mean_sqr()).abs() < 1e-12 * f.mean_sqr());
    let g2 = GroupSpec::cyclic(64, 2).unwrap();
    let f2 = GroupFunction::new(g2, 2, (0..8192).map(|_| complex_gaussian(&mut rng)).collect()).unwrap();
    assert!(dft_inverse(&dft_forward(&f2)).max_abs_diff(&f2) < 1e-12);
}

#[test]
fn lepingle_projection_is_bounded() {
    let mut worst = 0.0f64;
    for (i, (n, depth)) in [(2, 3), (3, 2), (4, 3), (5, 2)].into_iter().enumerate() {
        let g = GroupSpec::cyclic(n, depth).unwrap();
        for t in 0..10 {
            let f = gaussian_adapted(&g, 2, &mut seeded(100 * i as u64 + t)).unwrap();
            worst = worst.max(adapted_l1_norm(&lepingle_project(&f)) / adapted_l1_norm(&f));
        }
    }
    assert!(worst <= 10.0, "{worst}");
}

#[test]
fn exact_dual_norm_is_within_weisz_bracket() {
    for (i, (n, depth)) in [(2, 3), (3, 2), (4, 2), (2, 2)].into_iter().enumerate() {
        let g = GroupSpec::cyclic(n, depth).unwrap();
        let phi = gaussian_adapted(&g, 1 + i % 2, &mut seeded(i as u64)).unwrap();
        let est = dual_norm_maximize(&phi, 50_000).unwrap();
        let w = weisz_dual_norm(&phi);
        assert!(est.value / w >= 0.1 && est.value / w <= 10.0);
        assert!(est.upper_bound - est.value <= 1e-6 * est.value);
    }
}

fn dg_against_search(group: GroupSpec, values: Vec<Complex64>, seed: u64) {
    let f = GroupFunction::scalar(group.clone(), values.clone()).unwrap();
    let solved = davis_garsia_solve(&f, &DavisGarsiaOptions::new(false, 1e-8, 5000)).unwrap();
    let fv: Vec<(f64, f64)> = values.iter().map(|z| (z.re, z.im)).collect();
    let n = fv.len();
    let scale = values.iter().map(|z| z.norm()).sum::<f64>() / n as f64;
    let best = -common::maximize(2 * n, 4000, seed, |x, d| {
        let g: Vec<(f64, f64)> = (0..n).map(|p| (x[2 * p], x[2 * p + 1])).collect();
        -common::dg_objective_direct(&group, &fv, &g, d * scale)
    });
    let direct = common::dg_objective_direct(
        &group,
        &fv,
        &solved.g.values().iter().map(|z| (z.re, z.im)).collect::<Vec<_>>(),
        0.0,
    );
    assert!((direct - solved.objective).abs() < 1e-12, "reported objective is exact");
    assert!(solved.objective <= best * (1.0 + 1e-6), "solver {} vs search {best}", solved.objective);
    assert!((solved.objective - best).abs() <= 1e-3 * best, "solver {} vs search {best}", solved.objective);
}

#[test]
fn davis_garsia_matches_search_on_single_character() {
    let g = GroupSpec::torus(8, 1).unwrap();
    let chi = g.character(&MultiIndex::new(vec![1])).unwrap();
    dg_against_search(g, chi.values().to_vec(), 1);
}

#[test]
fn davis_garsia_matches_search_on_small_instances() {
    for seed in 0..3 {
        let g = GroupSpec::cyclic(2, 2).unwrap();
        let mut rng = seeded(40 + seed);
        dg_against_search(g, (0..4).map(|_| complex_gaussian(&mut rng)).collect(), seed);
    }
    let g = GroupSpec::cyclic(3, 2).unwrap();
    let mut rng = seeded(77);
    dg_against_search(g, (0..9).map(|_| complex_gaussian(&mut rng)).collect(), 9);
}
