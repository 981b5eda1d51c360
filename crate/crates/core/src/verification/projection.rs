//! Conditional expectations on factors and the inequalities built on them.

use num_complex::Complex64;

use crate::budget::Budget;
use crate::counting::average_product_direct;
use crate::error::{Error, Result};
use crate::functions::{u2_power_fast, uk_power_direct, GroupDomain, GroupFunction};
use crate::systems::{Complexity, LinearFormSystem};
use crate::verification::factor::QuadraticFactor;
use crate::verification::report::{Check, ExperimentReport, Relation, FLOAT_TOLERANCE};

fn average_on_cells(f: &GroupFunction, cell_of: &[usize], cells: usize) -> GroupFunction {
    let mut sums = vec![Complex64::new(0.0, 0.0); cells];
    let mut counts = vec![0usize; cells];
    for (i, &c) in cell_of.iter().enumerate() {
        sums[c] += f.value(i);
        counts[c] += 1;
    }
    let values = cell_of.iter().map(|&c| sums[c] / counts[c] as f64).collect();
    GroupFunction::new(*f.domain(), values).expect("same size")
}

fn check_domain(f: &GroupFunction, factor: &QuadraticFactor) -> Result<GroupDomain> {
    let d = *f.domain();
    if d.modulus() != factor.modulus() || d.dim() != factor.dim() {
        return Err(Error::InvalidArgument("function and factor live on different spaces".into()));
    }
    Ok(d)
}

/// `E(f|B_1)`: the average of `f` over each fiber of `Γ_1`.
pub fn linear_projection(f: &GroupFunction, factor: &QuadraticFactor) -> Result<GroupFunction> {
    let d = check_domain(f, factor)?;
    let (g1, _) = factor.tables(&d);
    let cells = (factor.modulus().get() as usize).pow(factor.d1() as u32);
    Ok(average_on_cells(f, &g1, cells))
}

/// `E(f|B_2)`: the average of `f` over each atom `V_a ∩ W_b`.
pub fn quadratic_projection(f: &GroupFunction, factor: &QuadraticFactor) -> Result<GroupFunction> {
    let d = check_domain(f, factor)?;
    let atoms = factor.atom_table(&d);
    let cells = (factor.modulus().get() as usize).pow((factor.d1() + factor.d2()) as u32);
    Ok(average_on_cells(f, &atoms, cells))
}

/// Checks, for `g = E(f|B_1)` and `f_1 = E(f|B_2)`:
/// `‖g‖_2^4 ≤ p^{d_1}‖g‖_{U^2}^4`, `‖g‖_{U^2} ≤ ‖f‖_{U^2}`,
/// `‖f‖_{U^2}^4 = ‖g‖_{U^2}^4 + ‖f−g‖_{U^2}^4` and `E f_1 = E f`.
pub fn verify_projection_lemmas(f: &GroupFunction, factor: &QuadraticFactor) -> Result<ExperimentReport> {
    if !f.is_real() {
        return Err(Error::NotReal);
    }
    let g = linear_projection(f, factor)?;
    let f1 = quadratic_projection(f, factor)?;
    let p = factor.modulus().get() as f64;
    let d1 = factor.d1();
    let (uf, ug, ur) = (u2_power_fast(f), u2_power_fast(&g), u2_power_fast(&f.sub(&g)?));
    let l2 = g.l2_norm();

    let mut rep = ExperimentReport::new("projections");
    rep.param("p", factor.modulus().get())
        .param("n", factor.dim())
        .param("d1", d1)
        .param("d2", factor.d2());
    rep.observe("u2_f_4", uf)
        .observe("u2_g_4", ug)
        .observe("u2_f_minus_g_4", ur)
        .observe("l2_g", l2)
        .observe("mean_f", f.mean().re)
        .observe("mean_f1", f1.mean().re);
    rep.check(Check::float(
        "||g||_2^4 <= p^d1 ||g||_U2^4",
        l2.powi(4),
        Relation::Le,
        p.powi(d1 as i32) * ug,
        FLOAT_TOLERANCE,
    ));
    rep.check(Check::float("||g||_U2 <= ||f||_U2", ug.powf(0.25), Relation::Le, uf.powf(0.25), FLOAT_TOLERANCE));
    rep.check(Check::float(
        "||f||_U2^4 = ||g||_U2^4 + ||f-g||_U2^4",
        uf,
        Relation::Eq,
        ug + ur,
        FLOAT_TOLERANCE,
    ));
    rep.check(Check::float("E f1 = E f", f1.mean().re, Relation::Eq, f.mean().re, FLOAT_TOLERANCE));
    Ok(rep)
}

fn require_real_bounded(f: &GroupFunction) -> Result<()> {
    if !f.is_real() {
        return Err(Error::NotReal);
    }
    f.ensure_bounded()
}

/// `E ∏ f_1(L_i(x)) ≤ 4^m c p^{d_1/4} + 2^{m+1} p^{m(d_1+d_2) − r/2}` with
/// `f_1 = E(f|B_2)` and `c = ‖f‖_{U^2}`.
pub fn verify_bound1(
    f: &GroupFunction,
    factor: &QuadraticFactor,
    sys: &LinearFormSystem,
    budget: Budget,
) -> Result<ExperimentReport> {
    if !sys.is_square_independent() {
        return Err(Error::NotSquareIndependent);
    }
    require_real_bounded(f)?;
    let f1 = quadratic_projection(f, factor)?;
    let m = sys.len();
    let lhs = average_product_direct(sys, &vec![f1; m], budget)?;
    let c = u2_power_fast(f).max(0.0).powf(0.25);
    let p = factor.modulus().get() as f64;
    let (d1, d2) = (factor.d1() as f64, factor.d2() as f64);
    let r = factor.rank();
    let first = 4f64.powi(m as i32) * c * p.powf(d1 / 4.0);
    let second = match r {
        Some(r) => 2f64.powi(m as i32 + 1) * p.powf(m as f64 * (d1 + d2) - r as f64 / 2.0),
        None => 0.0,
    };
    let mut rep = ExperimentReport::new("bound1");
    rep.param("p", factor.modulus().get())
        .param("n", factor.dim())
        .param("d1", factor.d1())
        .param("d2", factor.d2())
        .param("r", r)
        .param("m", m)
        .param("system", sys.to_file());
    rep.observe("c", c)
        .observe("average_re", lhs.re)
        .observe("average_im", lhs.im)
        .observe("linear_term", first)
        .observe("quadratic_term", second);
    rep.check(Check::float("|E prod f1(L_i x)| <= bound", lhs.norm(), Relation::Le, first + second, FLOAT_TOLERANCE));
    Ok(rep)
}

/// Compares `‖a+f‖_{U^3}^8` with `a^8 + ‖f‖_{U^3}^8` for a mean-zero `f`.
///
/// Expanding the eight-fold product, subsets of at most three cube vertices
/// average to zero, leaving `Σ_{k=4}^{7} C(8,k) a^{8−k}` cross terms; with
/// each bounded by `‖f‖_{U^2}` the gap is at most `22.375·c ≤ 24c` for `a ≤ 1/2`.
pub fn verify_pythagoras(f: &GroupFunction, a: f64, budget: Budget) -> Result<ExperimentReport> {
    if !f.is_real() {
        return Err(Error::NotReal);
    }
    let shifted = f.map(|v| v + a);
    shifted.ensure_bounded()?;
    let mean = f.mean().norm();
    if mean > FLOAT_TOLERANCE {
        return Err(Error::InvalidArgument(format!("f must have mean zero (|E f| = {mean})")));
    }
    let g8 = uk_power_direct(&shifted, 3, budget)?;
    let f8 = uk_power_direct(f, 3, budget)?;
    let gap = (g8 - a.powi(8) - f8).abs();
    let c = u2_power_fast(f).max(0.0).powf(0.25);
    let cross: f64 = (4..=7).map(|k| binomial(8, k) * a.abs().powi(8 - k as i32)).sum();

    let mut rep = ExperimentReport::new("pythagoras");
    rep.param("p", f.domain().modulus().get()).param("n", f.domain().dim()).param("a", a);
    rep.observe("u3_shifted_8", g8)
        .observe("u3_f_8", f8)
        .observe("gap", gap)
        .observe("c", c)
        .observe("cross_term_weight", cross);
    rep.check(Check::float("gap <= 24 ||f||_U2", gap, Relation::Le, 24.0 * c, FLOAT_TOLERANCE).derived());
    rep.note("the 24c tolerance comes from counting cross terms, not from a stated bound");
    Ok(rep)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `|E ∏ f_i(L_i(x))| ≤ min_i ‖f_i‖_{U^{k+1}}` for a system of complexity at most `k`.
pub fn verify_gvn(sys: &LinearFormSystem, fs: &[GroupFunction], k: usize, budget: Budget) -> Result<ExperimentReport> {
    let cs = sys.cs_complexity()?;
    if !matches!(cs, Complexity::Finite(s) if s <= k) {
        return Err(Error::ComplexityTooHigh {
            actual: cs.to_string(),
            required: k,
        });
    }
    for f in fs {
        f.ensure_bounded()?;
    }
    let lhs = average_product_direct(sys, fs, budget)?;
    let norms = fs
        .iter()
        .map(|f| uk_power_direct(f, k + 1, budget).map(|v| v.max(0.0).powf(1.0 / (1u32 << (k + 1)) as f64)))
        .collect::<Result<Vec<_>>>()?;
    let min = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let mut rep = ExperimentReport::new("gvn");
    rep.param("p", sys.modulus().get())
        .param("n", fs[0].domain().dim())
        .param("k", k)
        .param("system", sys.to_file());
    rep.observe("cs_complexity", cs)
        .observe("average_re", lhs.re)
        .observe("average_im", lhs.im)
        .observe("norms", &norms);
    rep.check(Check::float(
        format!("|average| <= min ||f_i||_U{}", k + 1),
        lhs.norm(),
        Relation::Le,
        min,
        FLOAT_TOLERANCE,
    ));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FpMatrix, Modulus, QuadraticForm};
    use crate::functions::{balanced, random_bounded_real, random_signs};
    use crate::verification::factor::QuadraticMap;
    use crate::verification::gauss::quadratic_zero_set;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn domain(p: u32, n: usize) -> GroupDomain {
        GroupDomain::new(Modulus::new(p).unwrap(), n).unwrap()
    }

    #[test]
    fn projection_of_constant_is_itself() {
        let d = domain(3, 2);
        let p = d.modulus();
        let f = GroupFunction::constant(d, Complex64::new(0.5, 0.0));
        let factor = QuadraticFactor::new(
            FpMatrix::from_rows(p, &[vec![1, 1]]).unwrap(),
            QuadraticMap::new(p, 2, vec![QuadraticForm::scaled_dot(p, 2, 1)]).unwrap(),
        )
        .unwrap();
        assert!(linear_projection(&f, &factor).unwrap().max_abs_diff(&f) < 1e-15);
        let rep = verify_projection_lemmas(&f, &factor).unwrap();
        assert!(rep.pass && rep.audit());
    }

    #[test]
    fn linear_projection_by_hand() {
        // Γ_1 = first coordinate: g(x) is the mean of f over the line {x_0 fixed}.
        let d = domain(3, 2);
        let p = d.modulus();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_bounded_real(d, &mut rng);
        let factor = QuadraticFactor::new(FpMatrix::from_rows(p, &[vec![1, 0]]).unwrap(), QuadraticMap::empty(p, 2))
            .unwrap();
        let g = linear_projection(&f, &factor).unwrap();
        for x0 in 0..3 {
            let mean: f64 = (0..3).map(|t| f.value(x0 * 3 + t).re).sum::<f64>() / 3.0;
            for t in 0..3 {
                assert!((g.value(x0 * 3 + t).re - mean).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn pythagorean_identity_random() {
        let d = domain(3, 3);
        let p = d.modulus();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let factor = QuadraticFactor::new(FpMatrix::from_rows(p, &[vec![1, 2, 0]]).unwrap(), QuadraticMap::empty(p, 3))
            .unwrap();
        for _ in 0..5 {
            let f = random_bounded_real(d, &mut rng);
            let rep = verify_projection_lemmas(&f, &factor).unwrap();
            assert!(rep.pass && rep.audit(), "{rep:#?}");
        }
    }

    #[test]
    fn bound1_cases() {
        let p = Modulus::new(5).unwrap();
        let d = domain(5, 2);
        let sys = LinearFormSystem::builtin("gw6b", p).unwrap();
        let factor = QuadraticFactor::quadratic_only(
            QuadraticMap::new(p, 2, vec![QuadraticForm::scaled_dot(p, 2, 1)]).unwrap(),
        );
        let zero = GroupFunction::constant(d, Complex64::new(0.0, 0.0));
        let rep = verify_bound1(&zero, &factor, &sys, Budget::default()).unwrap();
        assert!(rep.pass && rep.audit());
        assert_eq!(rep.observed["average_re"], 0.0);

        let f = balanced(&quadratic_zero_set(p, 2).unwrap());
        assert!(verify_bound1(&f, &factor, &sys, Budget::default()).unwrap().pass);

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let signs = random_signs(d, &mut rng);
        let lin = QuadraticFactor::new(FpMatrix::from_rows(p, &[vec![1, 0]]).unwrap(), QuadraticMap::empty(p, 2))
            .unwrap();
        assert!(verify_bound1(&signs, &lin, &sys, Budget::default()).unwrap().pass);
    }

    #[test]
    fn pythagoras_trivial_cases() {
        let d = domain(3, 2);
        let zero = GroupFunction::constant(d, Complex64::new(0.0, 0.0));
        let rep = verify_pythagoras(&zero, 0.5, Budget::default()).unwrap();
        assert!(rep.observed["gap"].as_f64().unwrap() < 1e-15);

        let f = balanced(&quadratic_zero_set(d.modulus(), 2).unwrap()).scale(0.5);
        let rep = verify_pythagoras(&f, 0.0, Budget::default()).unwrap();
        assert!(rep.observed["gap"].as_f64().unwrap() < 1e-15);
    }

    #[test]
    fn gvn_cases() {
        let p = Modulus::new(5).unwrap();
        let d = domain(5, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let ap3 = LinearFormSystem::builtin("ap3", p).unwrap();
        let fs: Vec<_> = (0..3).map(|_| random_signs(d, &mut rng)).collect();
        let rep = verify_gvn(&ap3, &fs, 1, Budget::default()).unwrap();
        assert!(rep.pass && rep.audit());

        let ones = vec![GroupFunction::constant(d, Complex64::new(1.0, 0.0)); 3];
        let rep = verify_gvn(&ap3, &ones, 1, Budget::default()).unwrap();
        assert!(rep.pass);
        assert!((rep.observed["average_re"].as_f64().unwrap() - 1.0).abs() < 1e-12);

        let ap4 = LinearFormSystem::builtin("ap4", p).unwrap();
        let fs4: Vec<_> = (0..4).map(|_| random_signs(d, &mut rng)).collect();
        assert_eq!(
            verify_gvn(&ap4, &fs4, 1, Budget::default()).unwrap_err(),
            Error::ComplexityTooHigh {
                actual: "2".into(),
                required: 1
            }
        );
    }
}
