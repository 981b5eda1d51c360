use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{Modulus, QuadraticForm};
use crate::budget::{saturating_pow, Budget};
use crate::counting::{solution_probability, CountMethod};
use crate::error::Result;
use crate::functions::{roots_of_unity, GroupDomain, IndicatorSet};
use crate::systems::LinearFormSystem;
use crate::verification::report::{Check, ExperimentReport, Relation};

/// `E_x ω^{q(x)}` over `F_p^n`.
pub fn gauss_sum(q: &QuadraticForm, budget: Budget) -> Result<Complex64> {
    let p = q.modulus();
    let domain = GroupDomain::new(p, q.dim())?;
    budget.check(saturating_pow(domain.size() as u128, 1) * q.dim().max(1) as u128)?;
    let roots = roots_of_unity(p);
    let sum: Complex64 = (0..domain.size())
        .map(|i| roots[q.eval(&domain.coords(i)) as usize])
        .sum();
    Ok(sum / domain.size() as f64)
}

/// Lemma-style report: `|E ω^q| ≤ p^{−r/2}`, with equality when `b = 0`.
pub fn verify_gauss(q: &QuadraticForm, budget: Budget) -> Result<ExperimentReport> {
    let p = q.modulus();
    let r = q.rank();
    let g = gauss_sum(q, budget)?;
    let bound = (p.get() as f64).powf(-(r as f64) / 2.0);
    let mut rep = ExperimentReport::new("gauss");
    rep.param("p", p.get()).param("n", q.dim()).param("rank", r);
    rep.observe("re", g.re).observe("im", g.im).observe("modulus", g.norm());
    rep.check(Check::float("modulus at most p^(-r/2)", g.norm(), Relation::Le, bound, 1e-10));
    if q.linear_part().is_zero() {
        rep.check(Check::float("equality when b = 0", g.norm(), Relation::Eq, bound, 1e-10));
    }
    Ok(rep)
}

/// `{x ∈ F_p^n : xᵀx = 0}`.
pub fn quadratic_zero_set(p: Modulus, n: usize) -> Result<IndicatorSet> {
    let domain = GroupDomain::new(p, n)?;
    Ok(IndicatorSet::from_predicate(domain, |x| {
        x.iter().fold(0, |acc, &c| p.add(acc, p.mul(c, c))) == 0
    }))
}

pub(crate) fn inv_power(p: Modulus, e: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p.get()).pow(e as u32))
}

/// Probability that every `L_i(x)` lies in the quadratic zero set, checked
/// against `p^{−m}` (square-independent systems) or against the lower bound
/// forced by a maximal square-independent subsystem of size `l`.
pub fn verify_badex(sys: &LinearFormSystem, n: usize, method: CountMethod, budget: Budget) -> Result<ExperimentReport> {
    let p = sys.modulus();
    let a = quadratic_zero_set(p, n)?;
    let m = sys.len();
    let alpha = a.density_exact();
    let count = solution_probability(sys, &a, method, budget)?;
    let independent = sys.is_square_independent();
    let kept = sys.maximal_square_independent_subsystem();

    let mut rep = ExperimentReport::new("badex");
    rep.param("p", p.get())
        .param("n", n)
        .param("m", m)
        .param("d", sys.vars())
        .param("system", sys.to_file());
    rep.observe("density", alpha.to_string())
        .observe("square_independent", independent)
        .observe("maximal_subsystem", &kept)
        .observe("count", &count);

    let minus_n = -(n as i64);
    rep.check(Check::exact_power("density within p^(-n/2) of 1/p", &(&alpha - inv_power(p, 1)), p, Some(minus_n)));

    let observed: BigRational = match (&count.count, &count.observed_exact) {
        (Some(c), _) => BigRational::new(BigInt::from(*c), BigInt::from(count.total)),
        _ => BigRational::from_float(count.observed).unwrap_or_else(BigRational::zero),
    };
    if count.count.is_none() {
        rep.note("exact count unavailable; comparisons use the floating-point probability");
    }
    if count.methods_agree.is_some() {
        rep.check(Check::float(
            "direct and dual agree",
            (count.direct.unwrap_or(f64::NAN) - count.dual.unwrap_or(f64::NAN)).abs(),
            Relation::Le,
            0.0,
            crate::counting::ORACLE_TOLERANCE,
        ));
    }
    let alpha_m = num_traits::pow(alpha.clone(), m);
    rep.observe("alpha_m", num_traits::ToPrimitive::to_f64(&alpha_m));
    if !alpha_m.is_zero() {
        rep.observe(
            "excess_ratio",
            num_traits::ToPrimitive::to_f64(&(&observed / &alpha_m)),
        );
    }
    if independent {
        rep.check(Check::exact_power(
            "probability within p^(-n/2) of p^(-m)",
            &(&observed - inv_power(p, m)),
            p,
            Some(minus_n),
        ));
    } else {
        let l = kept.len();
        rep.observe("l", l);
        let name = "probability at least p^(-l) - p^(-n/2)";
        if n % 2 == 0 {
            let threshold = inv_power(p, l) - inv_power(p, n / 2);
            rep.check(Check::exact_at_least(name, &observed, &threshold));
        } else {
            // p^{-n/2} is irrational for odd n.
            let slack = (p.get() as f64).powf(-(n as f64) / 2.0);
            rep.check(Check::float(
                name,
                num_traits::ToPrimitive::to_f64(&observed).unwrap_or(f64::NAN),
                Relation::Ge,
                num_traits::ToPrimitive::to_f64(&inv_power(p, l)).unwrap_or(f64::NAN) - slack,
                0.0,
            ));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FpMatrix, FpVector};

    #[test]
    fn gauss_examples() {
        let p5 = Modulus::new(5).unwrap();
        let q = QuadraticForm::scaled_dot(p5, 1, 1);
        let g = gauss_sum(&q, Budget::default()).unwrap();
        // (1 + 2ω + 2ω⁴)/5 with ω = e^{2πi/5}.
        let w = roots_of_unity(p5);
        let want = (Complex64::one() + w[1] * 2.0 + w[4] * 2.0) / 5.0;
        assert!((g - want).norm() < 1e-14);
        assert!((g.norm() - 5f64.sqrt() / 5.0).abs() < 1e-14);

        let zero = QuadraticForm::zero(p5, 3);
        assert!((gauss_sum(&zero, Budget::default()).unwrap() - 1.0).norm() < 1e-14);

        let q2 = QuadraticForm::scaled_dot(p5, 2, 1);
        assert!((gauss_sum(&q2, Budget::default()).unwrap().norm() - 0.2).abs() < 1e-14);
    }

    #[test]
    fn gauss_with_linear_part_is_at_most_bound() {
        let p = Modulus::new(7).unwrap();
        let m = FpMatrix::from_rows(p, &[vec![1, 2], vec![2, 0]]).unwrap();
        let q = QuadraticForm::new(m, FpVector::from_i64(p, &[3, 1])).unwrap();
        let rep = verify_gauss(&q, Budget::default()).unwrap();
        assert!(rep.pass && rep.audit());
    }

    #[test]
    fn zero_set_examples() {
        let a = quadratic_zero_set(Modulus::new(5).unwrap(), 2).unwrap();
        assert_eq!(a.count(), 9);
        let b = quadratic_zero_set(Modulus::new(3).unwrap(), 1).unwrap();
        assert_eq!(b.members(), &[true, false, false]);
        assert!(a.contains(0));
    }

    #[test]
    fn single_form_probability_is_density() {
        let p = Modulus::new(5).unwrap();
        let sys = LinearFormSystem::new(p, 1, &[vec![1]]).unwrap();
        let rep = verify_badex(&sys, 2, CountMethod::Direct, Budget::default()).unwrap();
        assert!(rep.pass && rep.audit());
        let count = &rep.observed["count"];
        assert_eq!(count["observed_exact"], "9/25");
    }

    #[test]
    fn four_ap_exceeds_independent_prediction() {
        let p = Modulus::new(5).unwrap();
        let sys = LinearFormSystem::builtin("ap4", p).unwrap();
        let rep = verify_badex(&sys, 2, CountMethod::Both, Budget::default()).unwrap();
        assert!(rep.pass && rep.audit(), "{rep:#?}");
        assert_eq!(rep.observed["l"], 3);
    }
}
