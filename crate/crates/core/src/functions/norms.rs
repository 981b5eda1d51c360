//! Gowers uniformity norms.
//!
//! `‖f‖_{U^k}^{2^k} = E_{x,h_1..h_k} ∏_{ω∈{0,1}^k} C^{|ω|} f(x + ω·h)`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::{saturating_pow, Budget};
use crate::error::{Error, Result};
use crate::functions::domain::{GroupArith, GroupDomain};
use crate::functions::fourier::{convolve, fourier};
use crate::functions::function::{ExactFunction, GroupFunction};

/// How a norm was evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMethod {
    /// Every term of the defining expectation.
    Direct,
    /// `E_{h_1..h_{k-1}} |E_x Δ_h f(x)|²`.
    Derivative,
    /// `(Σ_r |f̂(r)|⁴)^{1/4}`, U^2 only.
    Fourier,
    /// Exact rational arithmetic.
    Exact,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub norm: String,
    pub value: f64,
    /// `‖f‖^{2^k}` before taking the root.
    pub power: f64,
    pub method: NormMethod,
    pub domain: GroupDomain,
    pub op_count: u128,
}

fn check_order(k: usize) -> Result<()> {
    if !(2..=6).contains(&k) {
        return Err(Error::InvalidArgument(format!("U^{k} is supported for 2 ≤ k ≤ 6")));
    }
    Ok(())
}

/// Number of terms in the defining expectation, `N^{k+1}`.
pub fn direct_op_count(domain: &GroupDomain, k: usize) -> u128 {
    saturating_pow(domain.size() as u128, k + 1)
}

/// Work done by the derivative evaluation, `N^k · 2^{k-1}`.
pub fn derivative_op_count(domain: &GroupDomain, k: usize) -> u128 {
    saturating_pow(domain.size() as u128, k).saturating_mul(1 << (k - 1))
}

/// `Δ_{h_1..h_j} f(x) = ∏_{ω∈{0,1}^j} C^{|ω|} f(x + ω·h)` for all `x`.
fn derivative(f: &[Complex64], ar: &GroupArith, hs: &[usize], out: &mut Vec<Complex64>) {
    out.clear();
    out.extend_from_slice(f);
    let mut shifted = vec![Complex64::zero(); f.len()];
    for &h in hs {
        for (x, slot) in shifted.iter_mut().enumerate() {
            *slot = out[ar.add(x, h)].conj();
        }
        for (a, b) in out.iter_mut().zip(&shifted) {
            *a *= b;
        }
    }
}

/// Sums `term(h_1, .., h_{k-1})` over all tuples; parallel over `h_1`,
/// reduced in index order so the result is independent of thread count.
fn sum_over_shifts<F>(size: usize, depth: usize, term: F) -> Complex64
where
    F: Fn(&[usize], &mut Vec<Complex64>) -> Complex64 + Sync,
{
    let partials: Vec<Complex64> = (0..size)
        .into_par_iter()
        .map(|h1| {
            let mut hs = vec![0usize; depth];
            hs[0] = h1;
            let mut scratch = Vec::with_capacity(size);
            let mut acc = Complex64::zero();
            let inner = saturating_pow(size as u128, depth - 1) as usize;
            for t in 0..inner {
                let mut rest = t;
                for slot in hs[1..].iter_mut().rev() {
                    *slot = rest % size;
                    rest /= size;
                }
                acc += term(&hs, &mut scratch);
            }
            acc
        })
        .collect();
    partials.into_iter().sum()
}

/// `‖f‖_{U^k}^{2^k}` by enumerating every `(x, h_1, .., h_k)`.
pub fn uk_power_direct(f: &GroupFunction, k: usize, budget: Budget) -> Result<f64> {
    check_order(k)?;
    let d = f.domain();
    budget.check(direct_op_count(d, k))?;
    let ar = d.arith();
    let n = d.size();
    let vals = f.values();
    let total = sum_over_shifts(n, k - 1, |hs, scratch| {
        derivative(vals, &ar, hs, scratch);
        let mut acc = Complex64::zero();
        for x in 0..n {
            let dx = scratch[x];
            for h in 0..n {
                acc += dx * scratch[ar.add(x, h)].conj();
            }
        }
        acc
    });
    Ok(total.re / saturating_pow(n as u128, k + 1) as f64)
}

/// `‖f‖_{U^k}^{2^k} = E_{h_1..h_{k-1}} |E_x Δ_h f(x)|²`.
pub fn uk_power_derivative(f: &GroupFunction, k: usize, budget: Budget) -> Result<f64> {
    check_order(k)?;
    let d = f.domain();
    budget.check(derivative_op_count(d, k))?;
    let ar = d.arith();
    let n = d.size();
    let vals = f.values();
    let total = sum_over_shifts(n, k - 1, |hs, scratch| {
        derivative(vals, &ar, hs, scratch);
        let s: Complex64 = scratch.iter().sum();
        Complex64::new(s.norm_sqr(), 0.0)
    });
    Ok(total.re / saturating_pow(n as u128, k + 1) as f64)
}

fn root(power: f64, k: usize) -> f64 {
    power.max(0.0).powf(1.0 / (1u32 << k) as f64)
}

/// `‖f‖_{U^k}` from the definition.
pub fn uk_norm(f: &GroupFunction, k: usize, budget: Budget) -> Result<f64> {
    Ok(root(uk_power_direct(f, k, budget)?, k))
}

/// `Σ_r |f̂(r)|⁴`.
pub fn u2_power_fast(f: &GroupFunction) -> f64 {
    fourier(f).values().iter().map(|c| c.norm_sqr() * c.norm_sqr()).sum()
}

pub fn u2_norm_fast(f: &GroupFunction) -> f64 {
    root(u2_power_fast(f), 2)
}

/// `‖f*f‖_2²`, the third route to `‖f‖_{U^2}^4`.
pub fn u2_power_convolution(f: &GroupFunction) -> f64 {
    let c = convolve(f, f).expect("same domain");
    let l2 = c.l2_norm();
    l2 * l2
}

/// Evaluates `‖f‖_{U^k}` with the requested method.
pub fn norm_report(f: &GroupFunction, k: usize, method: NormMethod, budget: Budget) -> Result<NormReport> {
    check_order(k)?;
    let d = *f.domain();
    let (power, op_count) = match method {
        NormMethod::Direct => (uk_power_direct(f, k, budget)?, direct_op_count(&d, k)),
        NormMethod::Derivative => (uk_power_derivative(f, k, budget)?, derivative_op_count(&d, k)),
        NormMethod::Fourier => {
            if k != 2 {
                return Err(Error::InvalidArgument("the Fourier method computes U^2 only".into()));
            }
            let n = d.size() as u128;
            let ops = n * d.dim() as u128 * d.modulus().get() as u128 + n;
            budget.check(ops)?;
            (u2_power_fast(f), ops)
        }
        NormMethod::Exact => {
            let exact = exact_from_float(f)?;
            let ops = derivative_op_count(&d, k);
            let v = uk_power_exact(&exact, k, budget)?;
            (num_traits::ToPrimitive::to_f64(&v).unwrap_or(f64::NAN), ops)
        }
    };
    Ok(NormReport {
        norm: format!("U{k}"),
        value: root(power, k),
        power,
        method,
        domain: d,
        op_count,
    })
}

/// Like [`norm_report`] with [`NormMethod::Exact`], without passing through floats.
pub fn norm_report_exact(f: &ExactFunction, k: usize, budget: Budget) -> Result<NormReport> {
    let power = num_traits::ToPrimitive::to_f64(&uk_power_exact(f, k, budget)?).unwrap_or(f64::NAN);
    Ok(NormReport {
        norm: format!("U{k}"),
        value: root(power, k),
        power,
        method: NormMethod::Exact,
        domain: *f.domain(),
        op_count: derivative_op_count(f.domain(), k),
    })
}

fn exact_from_float(f: &GroupFunction) -> Result<ExactFunction> {
    let vals = f
        .real_values()?
        .into_iter()
        .map(|v| BigRational::from_float(v).ok_or_else(|| Error::InvalidArgument("non-finite value".into())))
        .collect::<Result<Vec<_>>>()?;
    ExactFunction::new(*f.domain(), vals)
}

/// `‖f‖_{U^k}^{2^k}` in exact arithmetic for a rational-valued `f`.
pub fn uk_power_exact(f: &ExactFunction, k: usize, budget: Budget) -> Result<BigRational> {
    check_order(k)?;
    let d = f.domain();
    budget.check(derivative_op_count(d, k))?;
    let ar = d.arith();
    let n = d.size();
    let depth = k - 1;
    let tuples = saturating_pow(n as u128, depth) as usize;
    let partials: Vec<BigRational> = (0..tuples)
        .into_par_iter()
        .map(|t| {
            let mut rest = t;
            let mut dv = f.values().to_vec();
            for _ in 0..depth {
                let h = rest % n;
                rest /= n;
                dv = (0..n).map(|x| &dv[x] * &dv[ar.add(x, h)]).collect();
            }
            let s = dv.iter().fold(BigRational::zero(), |acc, v| acc + v);
            &s * &s
        })
        .collect();
    let total = partials.into_iter().fold(BigRational::zero(), |acc, v| acc + v);
    Ok(total / BigInt::from(n).pow(k as u32 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Modulus;
    use crate::functions::{balanced, balanced_exact, random_bounded_complex, random_signs, IndicatorSet};
    use num_traits::ToPrimitive;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn domain(p: u32, n: usize) -> GroupDomain {
        GroupDomain::new(Modulus::new(p).unwrap(), n).unwrap()
    }

    /// The definition written out for k = 2 and 3, no shared code paths.
    fn brute_power(f: &GroupFunction, k: usize) -> f64 {
        let d = f.domain();
        let p = d.modulus();
        let n = d.size();
        let add = |a: usize, b: usize| -> usize {
            let (x, y) = (d.coords(a), d.coords(b));
            d.index(&x.iter().zip(&y).map(|(&u, &v)| p.add(u, v)).collect::<Vec<_>>())
        };
        let mut acc = Complex64::zero();
        let hs_count = n.pow(k as u32);
        for x in 0..n {
            for t in 0..hs_count {
                let hs: Vec<usize> = (0..k).map(|j| (t / n.pow(j as u32)) % n).collect();
                let mut prod = Complex64::new(1.0, 0.0);
                for w in 0..(1usize << k) {
                    let mut pt = x;
                    for (j, &h) in hs.iter().enumerate() {
                        if w >> j & 1 == 1 {
                            pt = add(pt, h);
                        }
                    }
                    let v = f.value(pt);
                    prod *= if w.count_ones() % 2 == 1 { v.conj() } else { v };
                }
                acc += prod;
            }
        }
        acc.re / (n as f64).powi(k as i32 + 1)
    }

    #[test]
    fn matches_brute_force_definition() {
        let d = domain(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let f = random_bounded_complex(d, &mut rng);
            for k in [2, 3] {
                let want = brute_power(&f, k);
                assert!((uk_power_direct(&f, k, Budget::default()).unwrap() - want).abs() < 1e-12);
                assert!((uk_power_derivative(&f, k, Budget::default()).unwrap() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constants_and_characters() {
        let d = domain(5, 2);
        let c = GroupFunction::constant(d, Complex64::new(0.4, 0.0));
        for k in [2, 3] {
            assert!((uk_norm(&c, k, Budget::default()).unwrap() - 0.4).abs() < 1e-12);
        }
        assert!((u2_norm_fast(&c) - 0.4).abs() < 1e-12);
        let chi = GroupFunction::character(d, &[2, 1]);
        assert!((uk_norm(&chi, 2, Budget::default()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_set_gap_between_u2_and_u3() {
        let d = domain(5, 2);
        let p = d.modulus();
        let a = IndicatorSet::from_predicate(d, |x| x.iter().fold(0, |acc, &c| p.add(acc, p.mul(c, c))) == 0);
        let f = balanced(&a);
        let u2 = uk_norm(&f, 2, Budget::default()).unwrap();
        let u3 = uk_norm(&f, 3, Budget::default()).unwrap();
        assert!(u2 <= 5f64.powf(-0.5));
        assert!(u3 >= 0.2);
    }

    #[test]
    fn three_routes_to_u2_agree() {
        let d = domain(3, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_signs(d, &mut rng);
        let direct = uk_power_direct(&f, 2, Budget::default()).unwrap();
        assert!((direct - u2_power_fast(&f)).abs() < 1e-9);
        assert!((direct - u2_power_convolution(&f)).abs() < 1e-9);
    }

    #[test]
    fn exact_mode_matches_float() {
        let d = domain(3, 2);
        let p = d.modulus();
        let a = IndicatorSet::from_predicate(d, |x| p.add(x[0], p.mul(x[1], x[1])) == 1);
        let fe = balanced_exact(&a);
        let ff = balanced(&a);
        for k in [2, 3] {
            let exact = uk_power_exact(&fe, k, Budget::default()).unwrap().to_f64().unwrap();
            assert!((exact - uk_power_direct(&ff, k, Budget::default()).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn budget_refusal_reports_required_count() {
        let d = domain(5, 3);
        let f = GroupFunction::constant(d, Complex64::new(1.0, 0.0));
        let err = uk_power_direct(&f, 3, Budget::new(1000).unwrap()).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetExceeded {
                required: 125u128.pow(4),
                budget: 1000
            }
        );
    }

    #[test]
    fn parallel_reduction_is_thread_count_independent() {
        let d = domain(3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_bounded_complex(d, &mut rng);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| uk_power_direct(&f, 3, Budget::default()).unwrap());
        let b = many.install(|| uk_power_direct(&f, 3, Budget::default()).unwrap());
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
