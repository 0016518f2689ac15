use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use tree_harmonic::lp::{layercake_residual, lp_norm, weak_norm, DistributionProfile};
use tree_harmonic::psdo::{kernel_from_symbol, symbol_from_decomposition, NuclearDecomposition};
use tree_harmonic::transform::{fh_forward, fh_inverse};
use tree_harmonic::{Context, TreeFunction};

fn ctx() -> &'static Context {
    static CTX: OnceLock<Context> = OnceLock::new();
    CTX.get_or_init(|| Context::new(2, 3, 3, 128).unwrap())
}

fn tree_function(n: usize) -> impl Strategy<Value = TreeFunction> {
    prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), n)
        .prop_map(|v| TreeFunction::from_values(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()))
}

/// Values drawn from a few levels so that ties are common.
fn tied_function() -> impl Strategy<Value = TreeFunction> {
    prop::collection::vec(0u8..5, 1..60)
        .prop_map(|v| TreeFunction::from_values(v.into_iter().map(|k| Complex64::new(0.75 * k as f64, 0.0)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inversion_recovers_any_function(f in tree_function(22)) {
        let c = ctx();
        let back = fh_inverse(c, &fh_forward(c, &f).unwrap()).unwrap();
        let scale = f.max_abs().max(1e-300);
        prop_assert!(back.axpy(Complex64::new(-1.0, 0.0), &f).max_abs() <= 1e-8 * scale);
    }

    #[test]
    fn transform_is_linear(f in tree_function(22), g in tree_function(22), a in -3.0f64..3.0) {
        let c = ctx();
        let lhs = fh_forward(c, &f.axpy(Complex64::new(a, 0.0), &g)).unwrap();
        let (hf, hg) = (fh_forward(c, &f).unwrap(), fh_forward(c, &g).unwrap());
        for ((l, x), y) in lhs.values.iter().zip(&hf.values).zip(&hg.values) {
            prop_assert!((l - (x + a * y)).norm() <= 1e-11 * (1.0 + x.norm() + y.norm()));
        }
    }

    #[test]
    fn layercake_is_exact(f in tree_function(40), p in 1.0f64..6.0) {
        let np = lp_norm(&f, p).unwrap().powf(p);
        prop_assert!(layercake_residual(&f, p).unwrap() <= 1e-10 * np.max(1e-300));
    }

    #[test]
    fn layercake_with_ties(f in tied_function(), p in 1.0f64..4.0) {
        let np = lp_norm(&f, p).unwrap().powf(p);
        prop_assert!(layercake_residual(&f, p).unwrap() <= 1e-12 * np.max(1.0));
    }

    #[test]
    fn chebyshev(f in tree_function(30), q_exp in 1.0f64..5.0) {
        prop_assert!(weak_norm(&f, q_exp).unwrap() <= lp_norm(&f, q_exp).unwrap() * (1.0 + 1e-14));
    }

    #[test]
    fn distribution_is_a_decreasing_step(f in tied_function(), lambdas in prop::collection::vec(0.0f64..4.0, 2..20)) {
        let m = DistributionProfile::new(&f);
        let mut l = lambdas;
        l.sort_by(f64::total_cmp);
        for w in l.windows(2) {
            prop_assert!(m.m(w[0]) >= m.m(w[1]));
        }
        prop_assert_eq!(m.m(m.max()), 0);
        // Right-continuity at every breakpoint.
        for &v in m.sorted_abs() {
            prop_assert_eq!(m.m(v), m.m(v + 1e-9 * (1.0 + v)));
        }
    }

    #[test]
    fn decomposition_kernels_match_outer_products(
        pairs in prop::collection::vec((tree_function(22), tree_function(22)), 1..4)
    ) {
        let c = ctx();
        let d = NuclearDecomposition::new(pairs);
        let k = kernel_from_symbol(c, &symbol_from_decomposition(c, &d).unwrap()).unwrap();
        let oracle = d.outer_product_kernel(c.vertices());
        prop_assert!(k.max_abs_diff(&oracle) <= 1e-9 * oracle.max_abs().max(1e-300));
    }
}
