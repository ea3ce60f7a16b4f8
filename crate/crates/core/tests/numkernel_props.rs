use pindex_core::bench::gaussian_real;
use pindex_core::numkernel::{self, ComplexDense, C64};
use pindex_core::randomized::sample_ginibre;
use pindex_core::rng::stream_rng;
use proptest::prelude::*;

fn min_dist(z: C64, set: &[C64]) -> f64 {
    set.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eig_reconstructs(seed in any::<u64>()) {
        let m = sample_ginibre(10, seed, 0);
        prop_assume!(numkernel::kappa_v_estimate(&m).unwrap() < 1e6);
        let es = numkernel::eig(&m).unwrap();
        let v = &es.right_vectors;
        let vd = v * &ComplexDense::from_diag(&es.values);
        let rebuilt = &vd * &numkernel::solve(v, &ComplexDense::identity(10)).unwrap();
        let err = numkernel::opnorm(&(&rebuilt - &m)).unwrap();
        prop_assert!(err <= 1e-8 * numkernel::opnorm(&m).unwrap(), "err {err:e}");
    }

    #[test]
    fn opnorm_and_sigma_min_match_svd(seed in any::<u64>(), rows in 1usize..8, cols in 1usize..8) {
        let m = gaussian_real(rows, cols, &mut stream_rng(seed, 1));
        let s = numkernel::singular_values(&m).unwrap();
        prop_assert_eq!(numkernel::opnorm(&m).unwrap(), s[0]);
        prop_assert_eq!(numkernel::sigma_min(&m).unwrap(), *s.last().unwrap());
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn identity_weight_is_plain_norm(seed in any::<u64>(), n in 1usize..9) {
        let m = sample_ginibre(n, seed, 2);
        let w = numkernel::weighted_opnorm(&m, &ComplexDense::identity(n)).unwrap();
        let p = numkernel::opnorm(&m).unwrap();
        prop_assert!((w - p).abs() <= 4.0 * f64::EPSILON * p);
    }

    #[test]
    fn normal_matrices_are_perfectly_conditioned(seed in any::<u64>(), n in 2usize..9) {
        // unitary Q from the eigenvectors of a Hermitian matrix
        let h = sample_ginibre(n, seed, 3);
        let q = numkernel::hermitian_eigen(&(&h + &h.adjoint())).unwrap().vectors;
        let lam: Vec<C64> = (0..n).map(|k| C64::new(k as f64 + 1.0, (k * k) as f64 * 0.3)).collect();
        let m = &(&q * &ComplexDense::from_diag(&lam)) * &q.adjoint();
        let mm = &m * &m.adjoint();
        let comm = numkernel::opnorm(&(&mm - &(&m.adjoint() * &m))).unwrap();
        prop_assert!(comm <= 1e-12 * numkernel::opnorm(&mm).unwrap().max(1.0));
        prop_assert!(numkernel::kappa_v_estimate(&m).unwrap() <= 1.0 + 1e-6);
    }

    #[test]
    fn bauer_fike(seed in any::<u64>(), size in 1e-6f64..1e-3) {
        let m = sample_ginibre(8, seed, 4);
        let d = sample_ginibre(8, seed, 5);
        let d = d.scale_real(size / numkernel::opnorm(&d).unwrap());
        let k = numkernel::kappa_v_estimate(&m).unwrap();
        let base = numkernel::eigenvalues(&m).unwrap();
        let moved = numkernel::eigenvalues(&(&m + &d)).unwrap();
        let dn = numkernel::opnorm(&d).unwrap();
        for z in moved {
            prop_assert!(min_dist(z, &base) <= k * dn * (1.0 + 1e-9));
        }
    }
}
