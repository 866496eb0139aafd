use proptest::prelude::*;
use udec_core::lz::{cbar, cbar_back_solved_epsilon, joint_parse, v_metric, JointParser};
use udec_core::{oracle, Error};

#[test]
fn worked_example() {
    let y = [0u8, 1, 0, 0, 0, 1];
    let z = [0u8, 1, 0, 1, 0, 1];
    let p = joint_parse(&y, &z).unwrap();
    assert_eq!(p.boundaries(), &[0, 1, 2, 4, 6]);
    assert_eq!(p.c_yz(), 4);
    assert_eq!(p.c_z(), 3);
    assert_eq!(p.c_ell(), &[1, 1, 2]);
    assert_eq!(v_metric(&p), 2.0);
    assert_eq!(oracle::parse(&y, &z), (vec![0, 1, 2, 4, 6], vec![1, 1, 2]));
}

#[test]
fn incomplete_last_phrase_is_counted() {
    // (0,0) (0,0)(0,0)... : phrases a, aa, then a repeated "a" at the end.
    let y = [0u8; 4];
    let p = joint_parse(&y, &y).unwrap();
    assert_eq!(p.boundaries(), &[0, 1, 3, 4]);
    assert!(!p.last_complete());
    assert_eq!(p.c_ell(), &[2, 1]);
    let p = joint_parse(&[0u8; 3], &[0u8; 3]).unwrap();
    assert!(p.last_complete());
}

#[test]
fn v_examples() {
    let p = joint_parse(&[0, 1, 2, 3], &[0, 1, 2, 3]).unwrap();
    assert!(p.c_ell().iter().all(|&c| c == 1));
    assert_eq!(p.v(), 0.0);
    // Constant z: the z-phrases are grouped by length alone.
    let y = [0u8, 1, 0, 0, 0, 1, 1, 0, 1, 1];
    let z = [0u8; 10];
    let p = joint_parse(&y, &z).unwrap();
    assert_eq!(p.boundaries(), &[0, 1, 2, 4, 6, 8, 10]);
    assert_eq!(p.c_ell(), &[2, 4]);
    let direct = 2.0 * 2f64.log2() + 4.0 * 4f64.log2();
    assert_eq!(p.v(), direct);
    assert_eq!(p.v(), oracle::v(&y, &z));
}

#[test]
fn errors() {
    assert!(matches!(joint_parse(&[0, 1], &[0]), Err(Error::LengthMismatch { .. })));
    assert!(matches!(joint_parse(&[], &[]), Err(Error::Empty(_))));
}

#[test]
fn cbar_small_cases() {
    assert_eq!(cbar(1, 4), 1);
    assert_eq!(cbar(1, 2), 1);
    assert_eq!(cbar(4, 4), 4);
    assert_eq!(cbar(5, 4), 5);
}

#[test]
fn cbar_equals_exhaustive_maximum() {
    for (a, max_n) in [(2usize, 12usize), (3, 9), (4, 8)] {
        for n in 1..=max_n {
            assert_eq!(cbar(n, a), oracle::max_phrase_count(n, a), "n={n} A={a}");
        }
    }
}

#[test]
fn worked_example_fits_under_cbar() {
    let y = [0u8, 1, 0, 0, 0, 1];
    let z = [0u8, 1, 0, 1, 0, 1];
    assert!(joint_parse(&y, &z).unwrap().c_yz() <= cbar(6, 4));
}

#[test]
fn back_solved_epsilon_reproduces_cbar() {
    for n in [10usize, 100, 1000] {
        let c = cbar(n, 4);
        let eps = cbar_back_solved_epsilon(n, 4, c).unwrap();
        let formula = n as f64 * 4f64.ln() / ((1.0 - eps) * (n as f64).ln());
        assert!((formula - c as f64).abs() < 1e-9 * c as f64);
    }
    assert_eq!(cbar_back_solved_epsilon(1, 4, 1), None);
}

#[test]
fn parser_reuse_matches_fresh_parse() {
    let mut parser = JointParser::new(2, 2);
    let mut last = None;
    for y in oracle::all_sequences(2, 7) {
        let z: Vec<u8> = y.iter().rev().copied().collect();
        let p = parser.parse(&y, &z);
        assert_eq!(Some(&p), Some(&joint_parse(&y, &z).unwrap()));
        last = Some(p);
    }
    assert!(last.is_some());
}

fn pair(max_len: usize, y_size: u8, z_size: u8) -> impl Strategy<Value = (Vec<u8>, Vec<u8>)> {
    (1..=max_len).prop_flat_map(move |n| {
        (
            prop::collection::vec(0..y_size, n),
            prop::collection::vec(0..z_size, n),
        )
    })
}

proptest! {
    #[test]
    fn matches_linear_search_parse((y, z) in pair(40, 3, 2)) {
        let p = joint_parse(&y, &z).unwrap();
        let (b, c) = oracle::parse(&y, &z);
        prop_assert_eq!(p.boundaries(), &b[..]);
        prop_assert_eq!(p.c_ell(), &c[..]);
        prop_assert!((p.v() - oracle::v(&y, &z)).abs() < 1e-12);
    }

    #[test]
    fn structural_invariants((y, z) in pair(60, 2, 2)) {
        let p = joint_parse(&y, &z).unwrap();
        prop_assert_eq!(p.c_ell().iter().sum::<usize>(), p.c_yz());
        prop_assert!(p.c_yz() <= cbar(y.len(), 4));
        let phrases: Vec<Vec<(u8, u8)>> = p
            .phrases()
            .map(|r| r.map(|i| (y[i], z[i])).collect())
            .collect();
        let complete = if p.last_complete() { phrases.len() } else { phrases.len() - 1 };
        for i in 0..complete {
            for j in 0..i {
                prop_assert_ne!(&phrases[i], &phrases[j]);
            }
            // Prefix property: dropping the last pair gives an earlier phrase.
            let head = &phrases[i][..phrases[i].len() - 1];
            prop_assert!(head.is_empty() || phrases[..i].iter().any(|q| q[..] == *head));
        }
        prop_assert_eq!(joint_parse(&y, &z).unwrap(), p);
    }

    #[test]
    fn z_grouping_is_by_content((y, z) in pair(40, 2, 3)) {
        let p = joint_parse(&y, &z).unwrap();
        let zp: Vec<&[u8]> = p.phrases().map(|r| &z[r]).collect();
        for i in 0..zp.len() {
            for j in 0..zp.len() {
                prop_assert_eq!(zp[i] == zp[j], p.z_phrase_ids()[i] == p.z_phrase_ids()[j]);
            }
        }
    }

    #[test]
    fn permuting_y_phrases_within_a_z_class((y, z) in pair(40, 2, 2), pick in any::<prop::sample::Index>()) {
        let p = joint_parse(&y, &z).unwrap();
        let ids = p.z_phrase_ids();
        let c = p.c_yz();
        let i = pick.index(c);
        let Some(j) = (0..c).find(|&j| j != i && ids[j] == ids[i]) else { return Ok(()); };
        let (ri, rj) = (p.phrase(i), p.phrase(j));
        let mut y2 = y.clone();
        let seg_i = y[ri.clone()].to_vec();
        y2[ri.clone()].copy_from_slice(&y[rj.clone()]);
        y2[rj].copy_from_slice(&seg_i);
        let q = joint_parse(&y2, &z).unwrap();
        if q.boundaries() == p.boundaries() {
            prop_assert_eq!(q.c_z(), p.c_z());
            let mut a = p.c_ell().to_vec();
            let mut b = q.c_ell().to_vec();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
        }
    }
}
