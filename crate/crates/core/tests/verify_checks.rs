use tgasum_core::constants::Estimator;
use tgasum_core::greedy::{self, GreedyOrdering};
use tgasum_core::search::{SearchConfig, Sequential};
use tgasum_core::verify::{self, *};
use tgasum_core::{approx_eq, CoefVector, Sign, SignPattern, Space, SpaceSpec, Weights};

fn space(spec: SpaceSpec) -> Space {
    Space::new(&spec).unwrap()
}

#[test]
fn vp_identity_random_instances() {
    let s = space(SpaceSpec::summing(32));
    let r = check_vp_identity(&s, 500, 7).unwrap();
    assert_eq!(r.status, CheckStatus::ExactPass);
    assert_eq!(r.instances, 500);
    assert!(r.worst_slack >= 0.0);
}

#[test]
fn vp_identity_over_tied_orderings() {
    let x = CoefVector::from_pairs([(1, 1.0), (2, -1.0), (3, 1.0), (4, 0.5), (5, -0.5)]).unwrap();
    let r = check_vp_identity_all_orderings(&x, 10_000).unwrap();
    assert_eq!(r.status, CheckStatus::ExactPass);
    // 3! orderings of the top block times 2! of the next, each at n = 1..=5.
    assert_eq!(r.instances, 12 * 5);
}

#[test]
fn permutation_average_coefficients_and_signs() {
    let eps = SignPattern::new([(1, Sign::Plus), (2, Sign::Minus), (3, Sign::Minus), (4, Sign::Plus)]).unwrap();
    let tail = CoefVector::from_pairs([(7, 0.5), (9, -0.25)]).unwrap();
    let r = check_permutation_average(2, &eps, &tail).unwrap();
    assert_eq!(r.status, CheckStatus::ExactPass, "{:?}", r.notes);
    assert!(r.notes.iter().any(|n| n.ends_with("= 21")));
    let eps3 = SignPattern::new((1..=6).map(|i| (i, if i % 3 == 0 { Sign::Minus } else { Sign::Plus }))).unwrap();
    assert_eq!(check_permutation_average(3, &eps3, &CoefVector::zero()).unwrap().status, CheckStatus::ExactPass);
}

#[test]
fn permutation_average_rejects_tail_outside_q_or_on_a() {
    let eps = SignPattern::constant(&[1, 2]).unwrap();
    assert!(check_permutation_average(1, &eps, &CoefVector::from_pairs([(3, 2.0)]).unwrap()).is_err());
    assert!(check_permutation_average(1, &eps, &CoefVector::from_pairs([(2, 0.5)]).unwrap()).is_err());
}

#[test]
fn qglc_chain_on_l2_and_summing() {
    for spec in [SpaceSpec::lp(2.0, 8), SpaceSpec::summing(8)] {
        let s = space(spec);
        let r = check_qglc_bound(&s, &SearchConfig::exhaustive_with_grid(5), &Sequential).unwrap();
        assert_eq!(r.status, CheckStatus::ConsistentWithinBudget, "{}: {:?}", s.label(), r.notes);
        assert!(r.payload.is_some());
    }
}

#[test]
fn dem_implies_qg_skips_non_democratic_weighted_l1() {
    let s = space(SpaceSpec::weighted_l1(Weights::Geometric(0.5), 8));
    let r = check_dem_implies_qg(&s, &SearchConfig::exhaustive_with_grid(6), &Sequential, DEFAULT_DEMOCRACY_THRESHOLD).unwrap();
    assert_eq!(r.status, CheckStatus::PreconditionFailed);
}

#[test]
fn dem_implies_qg_on_l2() {
    let s = space(SpaceSpec::lp(2.0, 8));
    let r = check_dem_implies_qg(&s, &SearchConfig::exhaustive_with_grid(4), &Sequential, DEFAULT_DEMOCRACY_THRESHOLD).unwrap();
    assert_eq!(r.status, CheckStatus::ConsistentWithinBudget);
    assert!(approx_eq(r.worst_slack, 6.0, 1e-9), "{}", r.worst_slack);
}

#[test]
fn gap_window_flat_vector_on_lp() {
    let s = space(SpaceSpec::lp(2.0, 16));
    let cfg = SearchConfig::exhaustive(4);
    let est = Estimator::new(&s, &cfg);
    let consts = ChainConstants::compute(&est).unwrap();
    let x = CoefVector::from_dense(&[1.0, -1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0]).unwrap();
    let o = GreedyOrdering::lowest_index(&x, 8).unwrap();
    let gaps = GapSequence::new(vec![1, 2, 4], Some(2)).unwrap();
    let r = check_gap_window(&est, &consts, &x, &o, &gaps).unwrap();
    assert_eq!(r.status, CheckStatus::ConsistentWithinBudget);
    assert!(r.notes.iter().any(|n| n.contains("M = 1,")));
    assert!(r.worst_slack >= 2.0 - 1e-12);
}

#[test]
fn gap_window_rejects_windows_outside_support() {
    let s = space(SpaceSpec::summing(16));
    let cfg = SearchConfig::exhaustive(3);
    let est = Estimator::new(&s, &cfg);
    let consts = ChainConstants::compute(&est).unwrap();
    let x = CoefVector::from_dense(&[1.0, 0.5, 0.25]).unwrap();
    let o = GreedyOrdering::lowest_index(&x, 8).unwrap();
    let gaps = GapSequence::new(vec![2], Some(2)).unwrap();
    assert!(check_gap_window(&est, &consts, &x, &o, &gaps).is_err());
}

#[test]
fn gap_window_geometric_profile_on_summing() {
    let s = space(SpaceSpec::summing(16));
    let cfg = SearchConfig::exhaustive(4);
    let est = Estimator::new(&s, &cfg);
    let consts = ChainConstants::compute(&est).unwrap();
    let x = CoefVector::from_dense(&(0..16).map(|j| if j % 3 == 1 { -1.0 } else { 1.0 } * 0.8f64.powi(j)).collect::<Vec<_>>()).unwrap();
    let o = GreedyOrdering::lowest_index(&x, 16).unwrap();
    let gaps = GapSequence::new(vec![2, 4], Some(2)).unwrap();
    let r = check_gap_window(&est, &consts, &x, &o, &gaps).unwrap();
    assert_ne!(r.status, CheckStatus::CounterexampleFound);
}

#[test]
fn log_window_on_summing_dim_64() {
    let s = space(SpaceSpec::summing(64));
    let cfg = SearchConfig::exhaustive_with_grid(4);
    let consts = ChainConstants::compute(&Estimator::new(&s, &cfg)).unwrap();
    let r = check_log_window_batch(&s, &consts, &SearchConfig::random(8, 50, 3), 50, &[1, 2, 4], &Sequential).unwrap();
    assert_eq!(r.status, CheckStatus::ConsistentWithinBudget);
    assert_eq!(r.instances, 50);
    assert!(check_log_window(&s, &consts, &CoefVector::from_dense(&[1.0]).unwrap(), &GreedyOrdering::lowest_index(&CoefVector::from_dense(&[1.0]).unwrap(), 4).unwrap(), 1).is_err());
}

fn geometric(len: usize, r: f64) -> CoefVector {
    CoefVector::from_dense(&(1..=len).map(|j| r.powi(j as i32)).collect::<Vec<_>>()).unwrap()
}

#[test]
fn ell1_decay_dyadic_geometric() {
    let x = geometric(512, 0.5);
    let o = GreedyOrdering::lowest_index(&x, 512).unwrap();
    let r = check_ell1_decay(&x, &o, &GapSequence::dyadic(10), 2, 1.0, DecayVariant::I).unwrap();
    assert_eq!(r.report.status, CheckStatus::ConsistentWithinBudget);
    assert_eq!(r.first_index, Some(2));
    assert!(r.fitted_ratio.unwrap() <= 2.0 / 3.0);
    // Window i covers 2^i + 1 ..= 2^{i+1}: mass 2^{-2^i} (1 - 2^{-2^i}).
    for w in &r.windows {
        let a = 0.5f64.powi(w.start as i32);
        assert!(approx_eq(w.mass, a * (1.0 - a), 1e-12));
    }
}

#[test]
fn ell1_decay_preconditions() {
    let flat = CoefVector::from_dense(&[1.0; 64]).unwrap();
    let o = GreedyOrdering::lowest_index(&flat, 64).unwrap();
    let r = check_ell1_decay(&flat, &o, &GapSequence::dyadic(7), 2, 1.0, DecayVariant::I).unwrap();
    assert_eq!(r.report.status, CheckStatus::PreconditionFailed);
    let harmonic = CoefVector::from_dense(&(1..=256).map(|j| 1.0 / j as f64).collect::<Vec<_>>()).unwrap();
    let o = GreedyOrdering::lowest_index(&harmonic, 256).unwrap();
    for v in [DecayVariant::I, DecayVariant::Ii] {
        let r = check_ell1_decay(&harmonic, &o, &GapSequence::dyadic(9), 2, 1.0, v).unwrap();
        assert_eq!(r.report.status, CheckStatus::PreconditionFailed);
    }
    let no_witness = GapSequence::new(vec![1, 2, 4], None).unwrap();
    assert!(check_ell1_decay(&flat, &o_for(&flat), &no_witness, 2, 1.0, DecayVariant::I).is_err());
}

fn o_for(x: &CoefVector) -> GreedyOrdering {
    GreedyOrdering::lowest_index(x, x.len()).unwrap()
}

#[test]
fn ell1_decay_variant_ii() {
    let x = geometric(512, 0.25);
    let r = check_ell1_decay(&x, &o_for(&x), &GapSequence::dyadic(10), 2, 1.0, DecayVariant::Ii).unwrap();
    assert_eq!(r.report.status, CheckStatus::ConsistentWithinBudget);
    assert_eq!(r.effective_l, 4);
    assert!(approx_eq(r.predicted_ratio, 0.8, 1e-15));
}

#[test]
fn convergent_subsequence_harmonic_l2() {
    let s = space(SpaceSpec::lp(2.0, 512));
    let x = CoefVector::from_dense(&(1..=512).map(|j| 1.0 / j as f64).collect::<Vec<_>>()).unwrap();
    let r = find_convergent_subsequence(&s, &x, &o_for(&x), &GapSequence::dyadic(12), &[1e-1, 1e-2], DEFAULT_SUBSEQUENCE_EPS, Some(3.0)).unwrap();
    assert_eq!(r.route, SubsequenceRoute::LowOscillation);
    assert_eq!(r.d.len(), 9);
    assert!(r.monotone);
    assert!(r.residuals.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(r.bound_check.unwrap().status, CheckStatus::ConsistentWithinBudget);
}

#[test]
fn convergent_subsequence_finite_support_hits_zero() {
    let s = space(SpaceSpec::lp(1.0, 64));
    let x = CoefVector::from_dense(&[5.0, 4.0, 3.0, 2.0, 1.0]).unwrap();
    let o = GreedyOrdering::lowest_index(&x, 64).unwrap();
    let r = find_convergent_subsequence(&s, &x, &o, &GapSequence::dyadic(6), &[1e-3], DEFAULT_SUBSEQUENCE_EPS, None).unwrap();
    assert_eq!(r.route, SubsequenceRoute::LowOscillation);
    for (&d, &res) in r.d.iter().zip(&r.residuals) {
        if d >= 5 {
            assert_eq!(res, 0.0);
        }
    }
    assert!(!r.truncation_limited);
}

#[test]
fn convergent_subsequence_lacunary_falls_back() {
    let s = space(SpaceSpec::lp(2.0, 16));
    let x = CoefVector::from_dense(&(1..=10).map(|j| 2f64.powi(-(1 << j))).collect::<Vec<_>>()).unwrap();
    let r = find_convergent_subsequence(&s, &x, &o_for(&x), &GapSequence::dyadic(5), &[1e-3], DEFAULT_SUBSEQUENCE_EPS, None).unwrap();
    assert_eq!(r.route, SubsequenceRoute::Ell1Fallback);
    assert_eq!(r.low_oscillation, vec![0]);
}

#[test]
fn spreading_condition_examples() {
    let cfg = SearchConfig::default();
    let r = check_spreading_condition(&space(SpaceSpec::l_inf(32)), 1.0, 3, 5, &cfg).unwrap();
    assert_eq!(r.found, Some(vec![4, 5, 6, 7, 8]));
    let r = check_spreading_condition(&space(SpaceSpec::lp(1.0, 32)), 3.0, 2, 4, &cfg).unwrap();
    assert!(r.found.is_none());
    assert!(approx_eq(r.max_norm, 4.0, 1e-12));
    let h: f64 = (1..=6).map(|j| 1.0 / j as f64).sum();
    let r = check_spreading_condition(&space(SpaceSpec::lorentz(Weights::Harmonic, 32)), h, 4, 6, &cfg).unwrap();
    assert!(r.found.is_some() && r.exact_in_signs);
    assert!(approx_eq(r.max_norm, h, 1e-12));
}

#[test]
fn residual_curve_rows() {
    let s = space(SpaceSpec::lp(1.0, 16));
    let x = CoefVector::from_dense(&[4.0, 3.0, 2.0, 1.0]).unwrap();
    let rows = residual_curve(&s, &x, &o_for(&x), 4).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(approx_eq(rows[0].greedy, 6.0, 1e-15));
    assert!(approx_eq(rows[0].cesaro, 6.0, 1e-15));
    // VP_1 keeps the top two coefficients.
    assert!(approx_eq(rows[0].vp, 3.0, 1e-15));
    assert_eq!(rows[3].greedy, 0.0);
    assert_eq!(rows[3].vp, 0.0);
}

#[test]
fn replay_round_trips_and_detects_corruption() {
    let s = space(SpaceSpec::lp(2.0, 16));
    let r = check_vp_identity(&s, 20, 1).unwrap();
    let p = r.payload.unwrap();
    let a = replay(&p).unwrap();
    assert_eq!(a.report.status, CheckStatus::ExactPass);
    assert!(a.mismatch.is_none());
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&replay(&p).unwrap()).unwrap());
    let Payload::VpIdentity { x, ordering, n, .. } = p else { panic!() };
    let bad = Payload::VpIdentity { x, ordering, n, discrepancy: 0.25 };
    assert!(replay(&bad).unwrap().mismatch.is_some());
}

#[test]
fn replay_relation_payload() {
    let s = space(SpaceSpec::summing(8));
    let r = check_qglc_bound(&s, &SearchConfig::exhaustive_with_grid(4), &Sequential).unwrap();
    let p = r.payload.unwrap();
    let json = serde_json::to_string(&p).unwrap();
    let back: Payload = serde_json::from_str(&json).unwrap();
    let out = replay(&back).unwrap();
    assert!(out.holds && out.mismatch.is_none());
    let Payload::Relation { space, relation, witness, lhs, rhs } = back else { panic!() };
    let out = replay(&Payload::Relation { space, relation, witness, lhs: lhs + 1.0, rhs }).unwrap();
    assert!(out.mismatch.is_some());
}

#[test]
fn classification_l2_and_summing() {
    let budget = ClassifyBudget { windows: vec![3, 4, 5], ..ClassifyBudget::default() };
    let l2 = classify_basis(&space(SpaceSpec::lp(2.0, 8)), &budget, &Sequential).unwrap();
    for row in &l2.rows {
        match row.verdict {
            Verdict::LikelyHolds { bound } => assert!(approx_eq(bound, 1.0, 1e-9), "{:?}", row.property),
            ref v => panic!("{:?}: {v:?}", row.property),
        }
    }
    let sum = classify_basis(&space(SpaceSpec::summing(8)), &budget, &Sequential).unwrap();
    assert!(matches!(sum.row(Property::Ucc).verdict, Verdict::FailsWithWitness { .. }));
    assert!(sum.row(Property::Vpqg).verdict.fails());
    assert!(sum.row(Property::Vpqg).implied_failure.is_some());
}

#[test]
fn log_window_length_matches_scan() {
    let x = geometric(6, 0.5);
    let o = GreedyOrdering::lowest_index(&x, verify::log_window_length(3)).unwrap();
    assert_eq!(o.len(), 48);
    assert!(greedy::greedy_sum(&x, &o, 48).is_ok());
}
