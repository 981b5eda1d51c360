use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uniformity_core::algebra::Modulus;
use uniformity_core::counting::{
    average_product_direct, average_product_dual, count_solutions, degenerate_fraction, solution_probability,
    CountMethod,
};
use uniformity_core::functions::{random_bounded_complex, GroupDomain, GroupFunction, IndicatorSet};
use uniformity_core::sample::random_system;
use uniformity_core::systems::LinearFormSystem;
use uniformity_core::Budget;

/// A random system over F_p^n with at most 5 forms in at most 3 variables.
fn instance() -> impl Strategy<Value = (LinearFormSystem, GroupDomain, u64)> {
    (prop::sample::select(vec![3u32, 5]), 1usize..3, 1usize..4, 1usize..6, any::<u64>()).prop_filter_map(
        "random system",
        |(p, n, d, m, seed)| {
            let p = Modulus::new(p).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sys = random_system(p, d, m, &mut rng).ok()?;
            let dom = GroupDomain::new(p, n).unwrap();
            (sys.len() == m && (dom.size() as u64).pow(d as u32) <= 15_625).then_some((sys, dom, seed))
        },
    )
}

fn functions(sys: &LinearFormSystem, d: GroupDomain, seed: u64) -> Vec<GroupFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..sys.len()).map(|_| random_bounded_complex(d, &mut rng)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn direct_and_dual_agree((sys, d, seed) in instance()) {
        let fs = functions(&sys, d, seed);
        let a = average_product_direct(&sys, &fs, Budget::default()).unwrap();
        let b = average_product_dual(&sys, &fs, Budget::default()).unwrap();
        prop_assert!((a - b).norm() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn average_is_multilinear((sys, d, seed) in instance(), slot in any::<prop::sample::Index>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let fs = functions(&sys, d, seed);
        let gs = functions(&sys, d, seed.wrapping_add(1));
        let i = slot.index(sys.len());
        let c = Complex64::new(re, im);
        let mut mixed = fs.clone();
        mixed[i] = fs[i].map(|v| v * c).add(&gs[i]).unwrap();
        let mut other = fs.clone();
        other[i] = gs[i].clone();
        let lhs = average_product_direct(&sys, &mixed, Budget::default()).unwrap();
        let rhs = c * average_product_direct(&sys, &fs, Budget::default()).unwrap()
            + average_product_direct(&sys, &other, Budget::default()).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn counts_match_indicator_averages((sys, d, seed) in instance()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = IndicatorSet::new(d, (0..d.size()).map(|_| rng.random::<bool>()).collect()).unwrap();
        let count = count_solutions(&sys, &a, Budget::default()).unwrap();
        let total = (d.size() as u128).pow(sys.vars() as u32);
        let fs = vec![a.indicator(); sys.len()];
        let avg = average_product_dual(&sys, &fs, Budget::default()).unwrap();
        prop_assert!((avg.re - count as f64 / total as f64).abs() < 1e-9);
        prop_assert!(avg.im.abs() < 1e-9);
        let rep = solution_probability(&sys, &a, CountMethod::Both, Budget::default()).unwrap();
        prop_assert_eq!(rep.count, Some(count));
        prop_assert!(rep.is_consistent() && rep.methods_agree == Some(true));
    }

    #[test]
    fn degenerate_fraction_matches_enumeration((sys, d, _seed) in instance()) {
        // Tuples on which two forms take the same value.
        let Some(frac) = degenerate_fraction(&sys, d.dim()) else { return Ok(()); };
        let ar = d.arith();
        let total = d.size().pow(sys.vars() as u32);
        let mut hits = 0usize;
        for t in 0..total {
            let xs: Vec<usize> = (0..sys.vars()).map(|j| t / d.size().pow(j as u32) % d.size()).collect();
            let vals: Vec<usize> = (0..sys.len())
                .map(|i| {
                    let c = sys.form(i).coeffs().coords();
                    xs.iter().zip(c).fold(0, |acc, (&x, &ci)| ar.add(acc, ar.scale(ci, x)))
                })
                .collect();
            let mut sorted = vals.clone();
            sorted.sort_unstable();
            sorted.dedup();
            hits += (sorted.len() < vals.len()) as usize;
        }
        let expected = num_rational::BigRational::new(hits.into(), total.into());
        prop_assert_eq!(frac, expected);
    }
}
