use proptest::prelude::*;

use super::*;
use crate::testutil::{aligned_los, random_params};

fn big(n: u128) -> BigUint {
    BigUint::from(n)
}

fn ctx(p: RiceanParams, objective: Scheme, ns: usize, margin: usize) -> SelectionContext {
    let m = p.antennas();
    SelectionContext::new(
        p,
        DftCodebook::new(m).unwrap(),
        objective,
        LinkPowers::from_snr_db(10.0).unwrap(),
        ns,
        margin,
    )
    .unwrap()
}

fn with_k_db(m: usize, nu: usize, k_db: f64, seed: u64) -> RiceanParams {
    let base = random_params(m, nu, seed);
    RiceanParams::new(vec![1.0; nu], vec![10f64.powf(k_db / 10.0); nu], base.los().clone()).unwrap()
}

/// Every `ns`-subset of `0..m` in lexicographic order, by bitmask.
fn all_subsets(m: usize, ns: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..1 << m)
        .filter(|mask| mask.count_ones() as usize == ns)
        .map(|mask| (0..m).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    out.sort();
    out
}

#[test]
fn table_counts() {
    use SelectionScheme::*;
    assert_eq!(comparison_count(PerUser, 256, 8, 4, 0), big(1024));
    assert_eq!(comparison_count(TwoStep, 256, 8, 4, 2), big(1124));
    assert_eq!(comparison_count(PerUser, 128, 4, 2, 0), big(256));
    assert_eq!(comparison_count(TwoStep, 128, 4, 2, 1), big(267));
    assert_eq!(comparison_count(TwoStep, 128, 4, 2, 2), big(282));
    assert_eq!(comparison_count(Exhaustive, 128, 4, 2, 0), big(268_435_456));
    assert_eq!(comparison_count(Exhaustive, 256, 8, 4, 0), big(1) << 64);
}

#[test]
fn binomials() {
    assert_eq!(binomial(16, 2), 120);
    assert_eq!(binomial(8, 8), 1);
    assert_eq!(binomial(10, 0), 1);
    assert_eq!(binomial(52, 5), 2_598_960);
    assert_eq!(binomial(1000, 500), u128::MAX);
}

#[test]
fn context_validation() {
    let p = random_params(8, 2, 1);
    let cb = DftCodebook::new(8).unwrap();
    let pw = LinkPowers::from_snr_db(0.0).unwrap();
    assert!(SelectionContext::new(p.clone(), cb.clone(), Scheme::UlZf, pw, 1, 1).is_err());
    assert!(SelectionContext::new(p.clone(), cb.clone(), Scheme::UlZf, pw, 9, 1).is_err());
    assert!(SelectionContext::new(p.clone(), cb.clone(), Scheme::DlZfLt, pw, 2, 1).is_err());
    assert!(SelectionContext::new(p.clone(), cb.clone(), Scheme::UlZf, pw, 2, 0).is_err());
    assert!(SelectionContext::new(p.clone(), DftCodebook::new(4).unwrap(), Scheme::UlZf, pw, 2, 1).is_err());
    assert!(SelectionContext::new(p, cb, Scheme::DlZfLt, pw, 3, 1).is_ok());
}

#[test]
fn exhaustive_full_selection() {
    let p = random_params(6, 2, 2);
    let r = exhaustive_search(&ctx(p, Scheme::UlMrc, 6, 1)).unwrap();
    assert_eq!(r.selection.indices(), &[0, 1, 2, 3, 4, 5]);
    assert_eq!(r.comparisons, 1);
    assert_eq!(r.theoretical_comparisons, big(6u128.pow(6)));
}

#[test]
fn exhaustive_single_beam_is_strongest() {
    for seed in 0..10 {
        let p = with_k_db(12, 1, 10.0, seed);
        let c = ctx(p, Scheme::UlMrc, 1, 1);
        let powers: Vec<f64> = c.projections().column(0).iter().map(|z| z.norm_sqr()).collect();
        let best = (0..12).fold(0, |b, n| if powers[n] > powers[b] { n } else { b });
        let r = exhaustive_search(&c).unwrap();
        assert_eq!(r.selection.indices(), &[best]);
        assert_eq!(r.comparisons, 12);
    }
}

#[test]
fn exhaustive_matches_brute_force() {
    for (seed, objective) in [(1, Scheme::UlZf), (2, Scheme::UlMrc), (3, Scheme::DlZfLt), (4, Scheme::DlMrtSt)] {
        let p = with_k_db(9, 2, 10.0, seed);
        let c = ctx(p, objective, 3, 1);
        let mut best: Option<(f64, Vec<usize>)> = None;
        for s in all_subsets(9, 3) {
            let v = c.objective_of(&s).unwrap();
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, s));
            }
        }
        let (v, s) = best.unwrap();
        let r = exhaustive_search(&c).unwrap();
        assert_eq!(r.selection.indices(), s.as_slice(), "{objective}");
        assert_eq!(r.objective, v);
        assert_eq!(r.comparisons, 84);
    }
}

#[test]
fn exhaustive_ties_pick_smallest_list() {
    // Rayleigh: the objective does not depend on the beams
    let p = with_k_db(7, 2, f64::NEG_INFINITY, 5);
    let r = exhaustive_search(&ctx(p, Scheme::UlZf, 3, 1)).unwrap();
    assert_eq!(r.selection.indices(), &[0, 1, 2]);
}

#[test]
fn exhaustive_budget() {
    let p = random_params(40, 2, 1);
    let c = ctx(p, Scheme::UlMrc, 10, 1).with_budget(1000);
    match exhaustive_search(&c) {
        Err(Error::BudgetExceeded { candidates, budget }) => {
            assert_eq!(candidates, "847660528");
            assert_eq!(budget, 1000);
        }
        other => panic!("expected budget refusal, got {other:?}"),
    }
}

#[test]
fn exhaustive_dominates_per_user_small() {
    for seed in 0..10 {
        let c = ctx(with_k_db(8, 2, 20.0, seed), Scheme::UlZf, 2, 1);
        let ex = exhaustive_search(&c).unwrap();
        let pu = per_user_selection(&c).unwrap();
        assert!(ex.objective >= pu.objective);
    }
}

#[test]
fn per_user_single_user_takes_strongest() {
    let p = with_k_db(16, 1, 10.0, 3);
    let c = ctx(p, Scheme::UlMrc, 4, 1);
    let powers: Vec<f64> = c.projections().column(0).iter().map(|z| z.norm_sqr()).collect();
    let mut order: Vec<usize> = (0..16).collect();
    order.sort_by(|&a, &b| powers[b].partial_cmp(&powers[a]).unwrap());
    let r = per_user_selection(&c).unwrap();
    assert_eq!(r.selection.indices(), &order[..4]);
    assert_eq!(r.comparisons, 16);
    assert_eq!(r.theoretical_comparisons, big(16));
}

#[test]
fn per_user_skips_collisions() {
    let los = aligned_los(8, &[3, 3]);
    let powers = DftCodebook::new(8)
        .unwrap()
        .beam_projection_powers(&los.column(1).into_owned())
        .unwrap();
    let runner_up = (0..8).filter(|&n| n != 3).fold(0, |b, n| if powers[n] > powers[b] { n } else { b });
    let p = RiceanParams::new(vec![1.0; 2], vec![10.0; 2], los).unwrap();
    let r = per_user_selection(&ctx(p, Scheme::UlMrc, 2, 1)).unwrap();
    assert_eq!(r.selection.indices(), &[3, runner_up]);
}

#[test]
fn per_user_last_user_takes_remainder() {
    let p = with_k_db(32, 3, 10.0, 6);
    let r = per_user_selection(&ctx(p, Scheme::UlMrc, 8, 1)).unwrap();
    assert_eq!(r.selection.len(), 8);
    assert_eq!(r.comparisons, 96);
}

#[test]
fn two_step_counts_match_formula() {
    for (m, ns, nu, n) in [(128, 4, 2, 1), (128, 4, 2, 2), (32, 8, 4, 2), (16, 5, 2, 1), (20, 3, 3, 3)] {
        let c = ctx(with_k_db(m, nu, 10.0, m as u64), Scheme::UlMrc, ns, n);
        let r = two_step_selection(&c).unwrap();
        assert_eq!(big(r.comparisons as u128), r.theoretical_comparisons, "{m} {ns} {nu} {n}");
        assert_eq!(r.selection.len(), ns);
        assert_eq!(r.margin, Some(n));
    }
    let c = ctx(with_k_db(128, 2, 10.0, 1), Scheme::UlMrc, 4, 1);
    assert_eq!(two_step_selection(&c).unwrap().comparisons, 267);
}

#[test]
fn two_step_margin_too_large() {
    let c = ctx(with_k_db(8, 2, 10.0, 1), Scheme::UlMrc, 4, 3);
    assert!(matches!(two_step_selection(&c), Err(Error::Parameter(_))));
}

#[test]
fn two_step_ties_remove_lowest_position() {
    // flat objective: every round drops position 0, leaving the tail of Step 1
    let p = with_k_db(16, 2, f64::NEG_INFINITY, 9);
    let c = ctx(p, Scheme::UlZf, 2, 2);
    let (step1, _) = c.assign_by_power(&[3, 3]);
    let r = two_step_selection(&c).unwrap();
    assert_eq!(r.selection.indices(), &step1[4..]);
}

#[test]
fn select_dispatch() {
    let c = ctx(with_k_db(10, 2, 10.0, 4), Scheme::UlMrc, 3, 1);
    assert_eq!(select(SelectionScheme::Exhaustive, &c).unwrap().scheme, SelectionScheme::Exhaustive);
    assert_eq!(select(SelectionScheme::PerUser, &c).unwrap().scheme, SelectionScheme::PerUser);
    assert_eq!(select(SelectionScheme::TwoStep, &c).unwrap().scheme, SelectionScheme::TwoStep);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dominance_and_validity(seed in any::<u64>(), nu in 1usize..3, extra in 0usize..3, k_db in -5.0f64..25.0) {
        let ns = nu + extra;
        let objective = if extra == 0 { Scheme::UlZf } else { Scheme::DlZfLt };
        let c = ctx(with_k_db(10, nu, k_db, seed), objective, ns, 1);
        let ex = exhaustive_search(&c).unwrap();
        let ts = two_step_selection(&c).unwrap();
        let pu = per_user_selection(&c).unwrap();
        prop_assert!(ex.objective >= ts.objective);
        prop_assert!(ex.objective >= pu.objective);
        for r in [&ex, &ts, &pu] {
            prop_assert_eq!(r.selection.len(), ns);
            prop_assert!(r.selection.indices().iter().all(|&i| i < 10));
            let v = c.objective_of(r.selection.indices()).unwrap();
            prop_assert_eq!(v, r.objective);
        }
        prop_assert_eq!(two_step_selection(&c).unwrap(), ts);
    }
}
