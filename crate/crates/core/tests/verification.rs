use udec_core::decoding::{Alpha, ErrorFunction};
use udec_core::lz::{cbar, joint_parse};
use udec_core::model::{AlphabetSpec, BoundaryStates, StateSpec, SystemModel};
use udec_core::oracle::{self, OracleMetric};
use udec_core::verification::{
    check_f_ratio, check_log_ratio_inequality, check_zm92, default_alpha, epsilon_ladder, harmonic_bound, kraft_sum,
    max_kappa, permutation_class, zm92_reports, BoundReport, Verifier,
};

fn two_state(seed: u64) -> SystemModel {
    SystemModel::random(seed, AlphabetSpec::binary(), StateSpec::new(2, 2, 2)).unwrap()
}

fn violations(reports: &[BoundReport]) -> Vec<&BoundReport> {
    reports.iter().filter(|r| r.is_violation()).collect()
}

#[test]
fn report_constructors() {
    let r = BoundReport::at_most("x", 1.0, 2.0);
    assert!(r.holds && !r.is_violation());
    let r = BoundReport::at_most("x", 2.0, 1.0);
    assert!(!r.holds && r.is_violation());
    assert!(BoundReport::at_most("x", 1.0 + 1e-12, 1.0).holds);
    assert!(BoundReport::log_at_most("x", -1000.0, -1000.0 + 1e-12).holds);
    assert!(BoundReport::equal("x", 0.5, 0.5 + 1e-13, false).holds);
    assert!(!BoundReport::equal("x", 0.5, 0.6, false).holds);
}

#[test]
fn kraft_sum_matches_direct_sum() {
    for n in 1..=6 {
        for z in oracle::all_sequences(2, n) {
            let lib = kraft_sum(&z, 2).unwrap();
            let direct: f64 = oracle::all_sequences(2, n).iter().map(|y| 2f64.powf(-oracle::v(y, &z))).sum();
            assert!((lib.sum - direct).abs() < 1e-12 * direct);
            assert!((lib.kappa - direct.log2() / n as f64).abs() < 1e-12);
        }
    }
    // n = 1: v = 0 for every y, so the sum is |Y|.
    assert_eq!(kraft_sum(&[0], 3).unwrap().sum, 3.0);
    assert_eq!(max_kappa(1, 2, 2).unwrap(), Some(1.0));
    assert_eq!(max_kappa(40, 2, 2).unwrap(), None);
}

#[test]
fn f_ratio_grid() {
    for n_rate in [(4usize, 0.3), (8, 0.5), (16, 0.1)] {
        for i in 1..=100 {
            for j in 1..=100 {
                let r = check_f_ratio(i as f64 / 100.0, j as f64 / 100.0, n_rate.0, n_rate.1).unwrap();
                assert!(r.holds, "{r:?}");
            }
        }
    }
    assert!(check_f_ratio(0.0, 0.5, 4, 0.3).is_err());
}

#[test]
fn log_ratio_inequality() {
    for u in [0.0, 1e-12, 0.5, 1.0, 10.0, 1e9] {
        assert!(check_log_ratio_inequality(u).unwrap().holds);
    }
    assert!(check_log_ratio_inequality(-1.0).is_err());
}

#[test]
fn harmonic_sum_matches_oracle() {
    let model = two_state(2);
    let n = 4;
    let v = Verifier::new(&model, n).unwrap();
    let ys = oracle::all_sequences(2, n);
    let py: Vec<f64> = ys.iter().map(|y| oracle::prob_y(&model, y)).collect();
    let bound = harmonic_bound(&model, n).unwrap();
    let s = model.states();
    let expect_bound = n as f64 * (1.0 / (model.pi_min() * (s.theta_size * s.omega_size) as f64)).ln() + 1.0;
    assert!((bound - expect_bound).abs() < 1e-12);
    for z in oracle::all_sequences(2, n) {
        let eo = oracle::set_probs(&py, &oracle::scores(&model, &z, OracleMetric::Ml));
        let direct: f64 = py.iter().zip(&eo).map(|(p, e)| p / e).sum();
        let col = v.column(&z).unwrap();
        assert!((v.harmonic_sum(&col) - direct).abs() < 1e-10 * direct);
        assert!(v.check_harmonic_lemma(&col).holds);
    }
}

#[test]
fn threshold_lemma_for_several_alphas() {
    let model = two_state(3);
    let n = 4;
    let v = Verifier::new(&model, n).unwrap();
    let f = ErrorFunction::new(n, 0.3).unwrap();
    for alpha in [1.5, 10.0, 1e6] {
        let alpha = Alpha::new(alpha).unwrap();
        for z in oracle::all_sequences(2, n) {
            let col = v.column(&z).unwrap();
            let r = v.check_threshold_lemma(&col, alpha, &f);
            assert!(r.holds, "{r:?}");
            assert!(v.check_ml_in_threshold(&col, alpha).holds);
            let e = v.conditional_errors(&col, alpha, &f);
            assert!(e.ml <= e.threshold + 1e-15);
        }
    }
}

#[test]
fn prescribed_alpha() {
    let model = two_state(4);
    let n = 5;
    let a = default_alpha(&model, n).unwrap();
    let expect = 2.0 * cbar(n, 4) as f64 * (model.k() as f64 / model.pi_min()).ln();
    assert!((a.ln() - expect).abs() < 1e-12 * expect);
}

#[test]
fn epsilon_ladder_terms() {
    let model = two_state(5);
    for n in [2usize, 4, 6] {
        let l = epsilon_ladder(&model, n).unwrap();
        let c = cbar(n, 4) as f64;
        let nf = n as f64;
        // |Theta| = |Omega| = |Sigma| = 2, K = 8.
        let e2p = c / nf * (2f64.powi(4) * 2f64.powi(4) * 2f64.powi(2) * std::f64::consts::E).log2();
        let e2 = e2p + c * 8f64.log2() / nf;
        let ln_alpha = 2.0 * c * (8.0 / model.pi_min()).ln();
        let l_bound = nf * (1.0 / (model.pi_min() * 4.0)).ln() + 1.0;
        let e3 = (ln_alpha + l_bound.ln()).exp().ln_1p() / nf;
        assert_eq!(l.cbar, cbar(n, 4));
        assert!((l.eps2_prime - e2p).abs() < 1e-12);
        assert!((l.eps2 - e2).abs() < 1e-12);
        assert!((l.eps3 - e3).abs() < 1e-9 * e3);
        let kappa = l.kappa.unwrap();
        let direct = oracle::all_sequences(2, n)
            .iter()
            .map(|z| kraft_sum(z, 2).unwrap().kappa)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(kappa, direct);
        assert!((l.total.unwrap() - (kappa + e2 + e3)).abs() < 1e-12);
    }
}

#[test]
fn full_sweep_has_no_violations() {
    for seed in [1u64, 2] {
        let model = two_state(seed);
        for n in 2..=4 {
            let v = Verifier::new(&model, n).unwrap();
            let f = ErrorFunction::new(n, 0.3).unwrap();
            let reports = v.sweep(v.default_alpha(), &f).unwrap();
            assert!(reports.len() > 16);
            let bad = violations(&reports);
            assert!(bad.is_empty(), "seed {seed} n {n}: {:?}", bad.first());
        }
    }
}

#[test]
fn sets_match_their_definitions() {
    let model = two_state(6);
    let n = 4;
    let v = Verifier::new(&model, n).unwrap();
    let tables = oracle::Tables::new(&model);
    for z in oracle::all_sequences(2, n).into_iter().step_by(3) {
        for i in 0..16 {
            let pair = v.analyse(i, &z).unwrap();
            let y = v.context().y(i).to_vec();
            let b = pair.parse.boundaries();
            assert_eq!(pair.t_hat.states, tables.t_hat(&y, &z, b).0);
            assert_eq!(pair.s_tilde.states, tables.s_tilde(&y, b).0);
            let e1 = v.e1_set(&pair, &z).unwrap();
            assert!(e1.contains(&i));
            let space = v.context().y_space();
            for w in v.t_set(&pair).unwrap() {
                assert!(e1.contains(&space.encode(&w)));
            }
        }
    }
}

#[test]
fn permutation_class_of_a_memoryless_model() {
    // With one state everywhere, phrases permute freely within (z-phrase, length).
    let model = SystemModel::binary_symmetric(0.1, 0.2).unwrap();
    let y = [0u8, 1, 1, 0, 0, 1, 1, 1];
    let z = [0u8, 0, 0, 0, 0, 0, 0, 0];
    let parse = joint_parse(&y, &z).unwrap();
    let c = parse.c_yz();
    let zeros = BoundaryStates { states: vec![0; c] };
    let class = permutation_class(&y, &parse, &zeros, 0, &zeros, 0).unwrap();
    let mut brute = Vec::new();
    for w in oracle::all_sequences(2, y.len()) {
        let same = (0..c).all(|i| {
            let key = |j: usize| (parse.z_phrase_ids()[j], parse.phrase(j).len());
            let mut a: Vec<&[u8]> = (0..c).filter(|&j| key(j) == key(i)).map(|j| &y[parse.phrase(j)]).collect();
            let mut b: Vec<&[u8]> = (0..c).filter(|&j| key(j) == key(i)).map(|j| &w[parse.phrase(j)]).collect();
            a.sort();
            b.sort();
            a == b
        });
        if same {
            brute.push(w);
        }
    }
    let mut class = class;
    class.sort();
    assert_eq!(class, brute);
    assert!(class.len() > 1);
    assert!(class.iter().all(|w| model.log_prob_y(w).unwrap() == model.log_prob_y(&y).unwrap()));
}

#[test]
fn zm92_on_joint_parses() {
    for seed in 1..=3 {
        let model = two_state(seed);
        for n in 1..=5 {
            for y in oracle::all_sequences(2, n) {
                for z in oracle::all_sequences(2, n).into_iter().step_by(5) {
                    let reports = check_zm92(&model, &y, &z).unwrap();
                    assert!(violations(&reports).is_empty(), "{:?}", reports);
                }
            }
        }
    }
}

#[test]
fn zm92_every_state_on_long_phrases() {
    let segmentations: [&[usize]; 5] = [&[0, 3], &[0, 3, 6], &[0, 6], &[0, 3, 7], &[0, 3, 6, 9]];
    for seed in 1..=3 {
        let model = two_state(seed);
        let pi_min = model.pi_min();
        for b in segmentations {
            let n = *b.last().unwrap();
            for y in oracle::all_sequences(2, n).into_iter().step_by(3) {
                let reports = zm92_reports(&model, &y, b, pi_min, None).unwrap();
                for r in &reports {
                    assert!(!r.advisory && r.holds, "{r:?}");
                }
            }
        }
    }
}

#[test]
fn universal_set_bounds_by_oracle() {
    // P[E_u] <= 2^{n kappa(n,z) + u} and P[E_t] >= 2^{u - n eps2}, recomputed
    // from oracle set probabilities.
    let model = two_state(7);
    let n = 4;
    let alpha = default_alpha(&model, n).unwrap();
    let l = epsilon_ladder(&model, n).unwrap();
    let ys = oracle::all_sequences(2, n);
    let py: Vec<f64> = ys.iter().map(|y| oracle::prob_y(&model, y)).collect();
    for z in oracle::all_sequences(2, n) {
        let uni = oracle::scores(&model, &z, OracleMetric::Universal);
        let eu = oracle::set_probs(&py, &uni);
        let ml = oracle::scores(&model, &z, OracleMetric::Ml);
        let et = oracle::threshold_set_probs(&py, &ml, alpha.ln());
        let kappa = kraft_sum(&z, 2).unwrap().kappa;
        for i in 0..ys.len() {
            assert!(eu[i].log2() <= n as f64 * kappa + uni[i] + 1e-9);
            assert!(uni[i] - n as f64 * l.eps2 <= et[i].log2() + 1e-9);
        }
    }
}
