use udec_core::capacity::{binary_entropy, capacity_memoryless, single_letter_joint};
use udec_core::model::{AlphabetSpec, StateSpec, SystemModel};
use udec_core::{oracle, Error};

#[test]
fn identity_and_independent() {
    let m = SystemModel::binary_symmetric(0.0, 0.0).unwrap();
    assert!((capacity_memoryless(&m).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
    let m = SystemModel::memoryless(vec![0.5, 0.5], vec![1.0, 0.0, 0.0, 1.0], vec![0.3, 0.7, 0.3, 0.7]).unwrap();
    assert!(capacity_memoryless(&m).unwrap().abs() < 1e-15);
}

#[test]
fn binary_symmetric_composition() {
    let m = SystemModel::binary_symmetric(0.0, 0.11).unwrap();
    let expect = std::f64::consts::LN_2 - binary_entropy(0.11);
    let got = capacity_memoryless(&m).unwrap();
    assert!((got - expect).abs() < 1e-14);
    assert!((got - oracle::mutual_information(&m)).abs() < 1e-14);
    // Two flips compose to one with crossover a(1-b) + b(1-a).
    let m = SystemModel::binary_symmetric(0.05, 0.1).unwrap();
    let p = 0.05 * 0.9 + 0.1 * 0.95;
    assert!((capacity_memoryless(&m).unwrap() - (std::f64::consts::LN_2 - binary_entropy(p))).abs() < 1e-14);
}

#[test]
fn random_memoryless_models_match_direct_sum() {
    for seed in 0..10 {
        let m = SystemModel::random(seed, AlphabetSpec::new(3, 2, 3), StateSpec::single()).unwrap();
        let joint = single_letter_joint(&m).unwrap();
        assert!((joint.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((capacity_memoryless(&m).unwrap() - oracle::mutual_information(&m)).abs() < 1e-13);
    }
}

#[test]
fn refuses_memory() {
    let m = SystemModel::random(1, AlphabetSpec::binary(), StateSpec::new(2, 1, 1)).unwrap();
    assert!(matches!(capacity_memoryless(&m), Err(Error::NotMemoryless)));
}

#[test]
fn entropy_endpoints() {
    assert_eq!(binary_entropy(0.0), 0.0);
    assert_eq!(binary_entropy(1.0), 0.0);
    assert!((binary_entropy(0.5) - std::f64::consts::LN_2).abs() < 1e-15);
}
