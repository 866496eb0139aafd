use udec_core::enumerate::SequenceSpace;
use udec_core::lz::joint_parse;
use udec_core::model::{AlphabetSpec, BoundaryStates, ChannelKernel, SourceKernel, StateSpec, SystemModel};
use udec_core::{oracle, Error};

fn two_state(seed: u64) -> SystemModel {
    SystemModel::random(seed, AlphabetSpec::binary(), StateSpec::new(2, 2, 2)).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

#[test]
fn memoryless_pi_is_the_output_distribution() {
    let g = vec![0.3, 0.7];
    let v = vec![0.8, 0.2, 0.1, 0.9];
    let model = SystemModel::memoryless(g.clone(), v.clone(), vec![0.5, 0.5, 0.5, 0.5]).unwrap();
    for y in 0..2 {
        let expect = g[0] * v[y] + g[1] * v[2 + y];
        assert!((model.induced().prob(y, 0, 0, 0, 0) - expect).abs() < 1e-15);
    }
}

#[test]
fn noiseless_symmetric_pi_is_uniform() {
    let model = SystemModel::binary_symmetric(0.0, 0.3).unwrap();
    assert_eq!(model.induced().prob(0, 0, 0, 0, 0), 0.5);
    assert_eq!(model.induced().prob(1, 0, 0, 0, 0), 0.5);
}

#[test]
fn pi_matches_direct_sum() {
    for seed in 1..=3 {
        let model = two_state(seed);
        for tp in 0..2 {
            for op in 0..2 {
                for y in 0..2 {
                    for t in 0..2 {
                        for o in 0..2 {
                            let lib = model.induced().prob(y, t, o, tp, op);
                            let direct = oracle::pi(&model, y, t, o, tp, op);
                            assert!((lib - direct).abs() < 1e-14);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn big_pi_matches_direct_sum_and_marginalizes_to_pi() {
    let model = two_state(7);
    let joint = model.joint();
    let hmm = joint.hmm();
    for prev in 0..joint.k() {
        let (tp, sp, op) = joint.state_of(prev);
        for y in 0..2u8 {
            for z in 0..2u8 {
                for next in 0..joint.k() {
                    let (t, s, o) = joint.state_of(next);
                    let lib = hmm.prob(prev, joint.pair_symbol(y, z) as usize, next);
                    let direct = oracle::big_pi(&model, y as usize, z as usize, t, s, o, tp, sp, op);
                    assert!((lib - direct).abs() < 1e-14);
                }
            }
        }
        for y in 0..2usize {
            for t in 0..2 {
                for o in 0..2 {
                    let mut marginal = 0.0;
                    for z in 0..2u8 {
                        for s in 0..2 {
                            let next = (t * 2 + s) * 2 + o;
                            marginal += hmm.prob(prev, joint.pair_symbol(y as u8, z) as usize, next);
                        }
                    }
                    assert!((marginal - model.induced().prob(y, t, o, tp, op)).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn memoryless_big_pi_is_the_single_letter_joint() {
    let g = vec![0.4, 0.6];
    let v = vec![0.9, 0.1, 0.3, 0.7];
    let w = vec![0.8, 0.2, 0.25, 0.75];
    let model = SystemModel::memoryless(g.clone(), v.clone(), w.clone()).unwrap();
    for y in 0..2 {
        for z in 0..2 {
            let expect: f64 = (0..2).map(|x| g[x] * v[x * 2 + y] * w[x * 2 + z]).sum();
            let pair = model.joint().pair_symbol(y as u8, z as u8) as usize;
            assert!((model.joint().hmm().prob(0, pair, 0) - expect).abs() < 1e-15);
        }
    }
}

#[test]
fn positivity() {
    let model = SystemModel::binary_symmetric(0.0, 0.1).unwrap();
    // V is the identity, so pi still has full support through G.
    assert_eq!(model.check_positivity().unwrap(), 0.5);
    let zero = SystemModel::memoryless(vec![1.0, 0.0], vec![1.0, 0.0, 0.0, 1.0], vec![0.5; 4]).unwrap();
    assert!(matches!(zero.check_positivity(), Err(Error::PositivityViolation { .. })));

    let uniform = SystemModel::new(
        AlphabetSpec::new(2, 2, 2),
        StateSpec::new(2, 1, 2),
        SourceKernel::new(2, 2, vec![0.25; 8]).unwrap(),
        ChannelKernel::secondary(2, 2, 2, vec![0.25; 16]).unwrap(),
        ChannelKernel::primary(2, 2, 1, vec![0.5; 4]).unwrap(),
    )
    .unwrap();
    assert!((uniform.pi_min() - 1.0 / 8.0).abs() < 1e-15);

    let random = two_state(12);
    let scan = random.induced().hmm().table().iter().copied().fold(f64::INFINITY, f64::min);
    assert_eq!(random.pi_min(), scan);
}

#[test]
fn kernel_validation_names_the_row() {
    let err = SourceKernel::new(2, 1, vec![0.5, 0.48]).unwrap_err();
    assert!(matches!(err, Error::RowSum { .. }), "{err}");
    let err = ChannelKernel::secondary(2, 2, 1, vec![0.5, 0.5, -0.1, 1.1]).unwrap_err();
    assert!(matches!(err, Error::Entry { .. }), "{err}");
    // Within tolerance: accepted and renormalized.
    let k = SourceKernel::new(2, 1, vec![0.5, 0.5 + 5e-13]).unwrap();
    assert!((k.table().iter().sum::<f64>() - 1.0).abs() < 1e-15);
}

#[test]
fn single_state_log_prob_is_a_sum_of_logs() {
    let model = SystemModel::binary_symmetric(0.2, 0.1).unwrap();
    let y = [0u8, 1, 1];
    let expect = 3.0 * 0.5f64.ln();
    assert!((model.log_prob_y(&y).unwrap() - expect).abs() < 1e-15);
    let model = SystemModel::memoryless(vec![0.3, 0.7], vec![0.9, 0.1, 0.2, 0.8], vec![0.6, 0.4, 0.1, 0.9]).unwrap();
    let p1: f64 = 0.3 * 0.1 + 0.7 * 0.8;
    let p0: f64 = 1.0 - p1;
    assert!((model.log_prob_y(&y).unwrap() - (p0.ln() + 2.0 * p1.ln())).abs() < 1e-14);
    // P(z|y) is a product of single-letter conditionals.
    let z = [1u8, 1, 0];
    let joint = |y: usize, z: usize| -> f64 {
        let g = [0.3, 0.7];
        let v = [[0.9, 0.1], [0.2, 0.8]];
        let w = [[0.6, 0.4], [0.1, 0.9]];
        (0..2).map(|x| g[x] * v[x][y] * w[x][z]).sum()
    };
    let expect: f64 = y
        .iter()
        .zip(&z)
        .map(|(&a, &b)| (joint(a as usize, b as usize) / [p0, p1][a as usize]).ln())
        .sum();
    assert!((model.log_cond_z_given_y(&y, &z).unwrap() - expect).abs() < 1e-13);
}

#[test]
fn forward_recursions_match_path_enumeration() {
    for seed in 1..=3 {
        let model = two_state(seed);
        let tables = oracle::Tables::new(&model);
        for n in 1..=6 {
            for y in SequenceSpace::new(2, n).unwrap().iter() {
                let lib = model.log_prob_y(&y).unwrap();
                assert!(rel_close(lib, tables.prob_y(&y).ln(), 1e-10));
            }
        }
        for n in 1..=4 {
            let space = SequenceSpace::new(2, n).unwrap();
            for y in space.iter() {
                for z in space.iter() {
                    let lib = model.log_prob_yz(&y, &z).unwrap();
                    assert!(rel_close(lib, tables.prob_yz(&y, &z).ln(), 1e-10));
                }
            }
        }
    }
}

#[test]
fn distributions_normalize() {
    let model = two_state(21);
    for n in 1..=8 {
        let space = SequenceSpace::new(2, n).unwrap();
        let total: f64 = space.iter().map(|y| model.log_prob_y(&y).unwrap().exp()).sum();
        assert!((total - 1.0).abs() < 1e-9, "n={n}: {total}");
    }
    for n in 1..=6 {
        let space = SequenceSpace::new(2, n).unwrap();
        let mut joint = 0.0;
        for y in space.iter() {
            let mut cond = 0.0;
            for z in space.iter() {
                joint += model.log_prob_yz(&y, &z).unwrap().exp();
                cond += model.log_cond_z_given_y(&y, &z).unwrap().exp();
            }
            assert!((cond - 1.0).abs() < 1e-9);
        }
        assert!((joint - 1.0).abs() < 1e-9);
    }
    let z = [1u8, 0, 0, 1];
    for y in SequenceSpace::new(2, 4).unwrap().iter() {
        let ratio = oracle::prob_yz(&model, &y, &z) / oracle::prob_y(&model, &y);
        assert!(rel_close(model.log_cond_z_given_y(&y, &z).unwrap(), ratio.ln(), 1e-10));
    }
}

#[test]
fn conditioning_on_null_is_an_error() {
    let model = SystemModel::memoryless(vec![1.0, 0.0], vec![1.0, 0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    assert!(matches!(model.log_cond_z_given_y(&[1], &[1]), Err(Error::ConditioningOnNull)));
}

#[test]
fn sampling() {
    let model = two_state(5);
    assert_eq!(model.sample_triple(20, 9), model.sample_triple(20, 9));
    assert_ne!(model.sample_triple(20, 9), model.sample_triple(20, 10));

    let det = SystemModel::memoryless(vec![0.0, 1.0], vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 1.0, 1.0, 0.0]).unwrap();
    let t = det.sample_triple(5, 3);
    assert_eq!((t.x, t.y, t.z), (vec![1; 5], vec![1; 5], vec![0; 5]));

    // Empirical P(y_1 = 1) against the pi marginal.
    let trials = 1_000_000u64;
    let mut rng = udec_core::rng::stream_rng(77, 0);
    let mut ones = 0u64;
    for _ in 0..trials {
        ones += model.sample_triple_with(1, &mut rng).y[0] as u64;
    }
    let p = model.log_prob_y(&[1]).unwrap().exp();
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    assert!(((ones as f64 / trials as f64) - p).abs() < 3.0 * se);
}

#[test]
fn boundary_maximizers_match_enumeration() {
    for seed in 1..=3 {
        let model = two_state(seed);
        let tables = oracle::Tables::new(&model);
        for n in 1..=6 {
            let space = SequenceSpace::new(2, n).unwrap();
            for y in space.iter() {
                for z in space.iter().step_by(if n > 4 { 7 } else { 1 }) {
                    let parse = joint_parse(&y, &z).unwrap();
                    let b = parse.boundaries();
                    let (t, lt) = model.t_hat(&y, &z, b).unwrap();
                    let (ot, olt) = tables.t_hat(&y, &z, b);
                    assert_eq!(t.states, ot);
                    assert!(rel_close(lt, olt, 1e-10));
                    let (s, ls) = model.s_tilde(&y, b).unwrap();
                    let (os, ols) = tables.s_tilde(&y, b);
                    assert_eq!(s.states, os);
                    assert!(rel_close(ls, ols, 1e-10));

                    let c = parse.c_yz() as f64;
                    let lyz = model.log_prob_yz(&y, &z).unwrap();
                    assert!(lt >= lyz - c * (model.k() as f64).ln() - 1e-12);
                    assert!(ls >= model.log_prob_y(&y).unwrap() - c * 4f64.ln() - 1e-12);
                }
            }
        }
    }
}

#[test]
fn single_phrase_maximizer_is_the_best_end_state() {
    let model = two_state(8);
    let y = [1u8, 0, 1];
    let t = model.induced().hmm().segment_log_transfer(&y);
    let k = model.induced().state_count();
    let init = model.induced().hmm().initial();
    let row = &t[init * k..(init + 1) * k];
    let best = (0..k).fold(0, |b, s| if row[s] > row[b] { s } else { b });
    let (s, v) = model.s_tilde(&y, &[0, 3]).unwrap();
    assert_eq!(s.states, vec![best]);
    assert_eq!(v, row[best]);
}

#[test]
fn pinned_probabilities_sum_to_the_marginal() {
    let model = two_state(4);
    let y = [0u8, 1, 1, 0, 1];
    let b = [0usize, 1, 3, 5];
    let mut total = 0.0;
    for a in 0..4 {
        for c in 0..4 {
            for d in 0..4 {
                let s = BoundaryStates { states: vec![a, c, d] };
                total += model.log_prob_y_s(&y, &b, &s).unwrap().exp();
            }
        }
    }
    assert!(rel_close(total, model.log_prob_y(&y).unwrap().exp(), 1e-10));
    let one = model.log_prob_y_s(&y, &[0, 5], &BoundaryStates { states: vec![2] }).unwrap();
    let t = model.induced().hmm().segment_log_transfer(&y);
    assert!(rel_close(one, t[model.induced().hmm().initial() * 4 + 2], 1e-12));
}

#[test]
fn probability_floor() {
    let model = two_state(6);
    let floor = (model.pi_min() * 4.0).ln();
    for n in 1..=8 {
        for y in SequenceSpace::new(2, n).unwrap().iter() {
            assert!(model.log_prob_y(&y).unwrap() >= n as f64 * floor - 1e-12);
        }
    }
}
