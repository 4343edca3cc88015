use opspace_core::linalg::{c64, operator_norm, DEFAULT_TOL};
use opspace_core::opspace::{
    alpha_norm, assemble_en_tensor, bracket_norm, dematricize, dual_alpha_norm, dual_bracket_norm, matricize,
    AlphaMask, OperatorFamily,
};
use opspace_core::sampling::{gaussian_family, trial_rng};
use proptest::prelude::*;

fn family(seed: u64, n: usize, k: usize, d: usize) -> OperatorFamily {
    let count = n.pow(k as u32);
    OperatorFamily::new(n, k, d, gaussian_family(&mut trial_rng(seed, 0, 0), count, d)).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn adjoint_swaps_mask_for_complement(seed in any::<u64>(), n in 1usize..4, k in 1usize..4, d in 1usize..3) {
        let fam = family(seed, n, k, d);
        let adj = fam.adjoint();
        for alpha in AlphaMask::all(k) {
            prop_assert!(close(alpha_norm(&adj, alpha).unwrap(), alpha_norm(&fam, alpha.complement()).unwrap()));
        }
        prop_assert!(close(bracket_norm(&adj).unwrap(), bracket_norm(&fam).unwrap()));
    }

    #[test]
    fn scaling_is_absolutely_homogeneous(seed in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let fam = family(seed, 2, 2, 2);
        let c = c64(re, im);
        let scaled = fam.scale(c);
        for alpha in AlphaMask::all(2) {
            prop_assert!(close(alpha_norm(&scaled, alpha).unwrap(), c.norm() * alpha_norm(&fam, alpha).unwrap()));
        }
    }

    #[test]
    fn swapping_legs_permutes_masks(seed in any::<u64>(), n in 1usize..4, d in 1usize..3) {
        let fam = family(seed, n, 2, d);
        let swapped = OperatorFamily::from_fn(n, 2, d, |j| fam.get(&[j[1], j[0]]).unwrap().clone()).unwrap();
        for (a, b) in [(&[][..], &[][..]), (&[1][..], &[2][..]), (&[2][..], &[1][..]), (&[1, 2][..], &[1, 2][..])] {
            let lhs = alpha_norm(&swapped, AlphaMask::new(2, a).unwrap()).unwrap();
            let rhs = alpha_norm(&fam, AlphaMask::new(2, b).unwrap()).unwrap();
            prop_assert!(close(lhs, rhs));
        }
    }

    #[test]
    fn relabeling_one_coordinate_is_invariant(seed in any::<u64>(), shift in 1usize..3) {
        let n = 3;
        let fam = family(seed, n, 2, 2);
        let relabeled = OperatorFamily::from_fn(n, 2, 2, |j| fam.get(&[(j[0] + shift) % n, j[1]]).unwrap().clone()).unwrap();
        for alpha in AlphaMask::all(2) {
            prop_assert!(close(alpha_norm(&relabeled, alpha).unwrap(), alpha_norm(&fam, alpha).unwrap()));
        }
    }

    #[test]
    fn matricization_round_trips(seed in any::<u64>(), n in 1usize..4, k in 1usize..4, bits in 0u32..8) {
        let fam = family(seed, n, k, 2);
        let alpha = AlphaMask::from_bits(k, bits & ((1 << k) - 1)).unwrap();
        let m = matricize(&fam, alpha).unwrap();
        prop_assert_eq!(dematricize(&m, n, k, 2, alpha).unwrap(), fam);
    }

    #[test]
    fn duality_bounds_pairings(seed in any::<u64>(), n in 1usize..3, k in 1usize..3) {
        let xi = family(seed, n, k, 2);
        let a = family(seed.wrapping_add(1), n, k, 2);
        let pairing = xi.pairing(&a).unwrap().norm();
        for alpha in AlphaMask::all(k) {
            prop_assert!(pairing <= dual_alpha_norm(&xi, alpha).unwrap() * alpha_norm(&a, alpha).unwrap() * (1.0 + 1e-9));
        }
        let cert = dual_bracket_norm(&xi).unwrap();
        prop_assert!(cert.lower <= cert.upper);
        prop_assert!(pairing <= cert.upper * bracket_norm(&a).unwrap() * (1.0 + 1e-9));
        let min_dual = AlphaMask::all(k)
            .into_iter()
            .map(|alpha| dual_alpha_norm(&xi, alpha).unwrap())
            .fold(f64::INFINITY, f64::min);
        prop_assert!(cert.upper <= min_dual * (1.0 + 1e-9));
    }

    #[test]
    fn assembled_operator_matches_bracket(seed in any::<u64>(), n in 1usize..3, k in 1usize..4, d in 1usize..3) {
        let fam = family(seed, n, k, d);
        let tensor = assemble_en_tensor(&fam).unwrap();
        let total = operator_norm(&tensor.operator, DEFAULT_TOL).unwrap();
        prop_assert!(close(total, bracket_norm(&fam).unwrap()));
        for (alpha, piece) in &tensor.components {
            prop_assert!(close(operator_norm(piece, DEFAULT_TOL).unwrap(), alpha_norm(&fam, *alpha).unwrap()));
        }
    }
}
