mod common;

use common::signed_circulant;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use specwalk::circuits::suite::clock_suite;
use specwalk::circuits::Lowering;
use specwalk::gadget::{
    check_graph, direct_sum_check, find_exchanging_automorphism, path_difference_exact, psi_minus_moment, relabel,
    verify_reduction_identity, walk_counts, AdjacencyOracle, Graph, Permutation, SignedSparseMatrix,
};

#[test]
fn folded_suite_sources_satisfy_the_reduction_identity() {
    let mut checked = 0;
    for inst in clock_suite().into_iter().filter(|i| i.lowering == Lowering::Folded) {
        let clock = inst.clock().unwrap();
        let a = SignedSparseMatrix::new(clock.a_matrix().clone()).unwrap();
        let report = verify_reduction_identity(&a, clock.start_index(), 8).unwrap();
        assert_eq!(report.deltas[0], 1, "{}", inst.name);
        assert!(report.max_growth <= report.norm_a + 1e-9);
        if a.dimension() <= 256 {
            let ds = direct_sum_check(&a).unwrap();
            assert_eq!(ds.max_deviation, 0, "{}", inst.name);
            assert!(ds.spectrum_deviation < 1e-9, "{}", inst.name);
        }
        checked += 1;
    }
    assert!(checked >= 10);
}

#[test]
fn literal_clocks_are_not_signed() {
    let inst = clock_suite()
        .into_iter()
        .find(|i| i.lowering == Lowering::Literal)
        .unwrap();
    assert!(SignedSparseMatrix::new(inst.clock().unwrap().a_matrix().clone()).is_err());
}

#[test]
fn transposition_fallback_on_complete_graph() {
    let k5 = Graph::complete(5).unwrap();
    let p = find_exchanging_automorphism(&k5, 1, 3, None).unwrap();
    assert_eq!((p.apply(1), p.apply(3)), (3, 1));
    // Antipodal vertices of a hexagon are exchanged by a reflection, not a transposition.
    let c6 = Graph::cycle(6).unwrap();
    assert!(find_exchanging_automorphism(&c6, 0, 3, None).is_err());
    let reflection = Permutation::new((0..6).map(|v| (9 - v) % 6).collect()).unwrap();
    assert!(find_exchanging_automorphism(&c6, 0, 3, Some(&reflection)).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn circulant_gadgets_are_regular_and_paired(n in 5usize..14, seed in 0u64..1000) {
        let a = signed_circulant(n, seed);
        let g = a.to_gadget();
        check_graph(&g).unwrap();
        prop_assert_eq!(g.degree(), 4);
        prop_assert_eq!(g.vertex_count(), 2 * n);
        prop_assert!(g.pairing_automorphism().is_automorphism_of(&g));
        let ds = direct_sum_check(&a).unwrap();
        prop_assert_eq!(ds.max_deviation, 0);
        prop_assert!(ds.norm_gadget <= 4.0 + 1e-9);
    }

    #[test]
    fn reduction_identity_on_random_signs(n in 5usize..12, seed in 0u64..1000, j in 0usize..5) {
        let a = signed_circulant(n, seed);
        let report = verify_reduction_identity(&a, j, 8).unwrap();
        let g = a.to_gadget();
        let (q, r) = g.pair_of(j);
        for (m, &delta) in report.deltas.iter().enumerate() {
            let (twice_moment, twice_delta) = psi_minus_moment(&g, q, r, m as u32).unwrap();
            prop_assert_eq!(twice_moment, twice_delta);
            prop_assert_eq!(twice_delta, 2 * delta);
        }
    }

    #[test]
    fn walk_counts_total_d_to_the_m(n in 6usize..30, d in 3usize..5, seed in 0u64..100, m in 0u32..8) {
        prop_assume!(n * d % 2 == 0);
        let g = Graph::random_regular(n, d, seed).unwrap();
        let counts = walk_counts(&g, 0, m).unwrap();
        prop_assert_eq!(counts.iter().sum::<i128>(), (d as i128).pow(m));
    }

    #[test]
    fn path_difference_is_relabel_invariant(n in 5usize..10, seed in 0u64..1000, m in 1u32..7) {
        let g = signed_circulant(n, seed).to_gadget();
        let mut images: Vec<usize> = (0..2 * n).collect();
        images.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let perm = Permutation::new(images).unwrap();
        let h = relabel(&g, &perm).unwrap();
        check_graph(&h).unwrap();
        let before = path_difference_exact(&g, 0, 1, m).unwrap();
        let after = path_difference_exact(&h, perm.apply(0), perm.apply(1), m).unwrap();
        prop_assert_eq!(before, after);
    }
}
