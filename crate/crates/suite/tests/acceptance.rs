//! The twelve acceptance criteria, each reported as one PASS/FAIL line.
//! Runs without the libtest harness so the lines are never captured.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uniformity_core::algebra::{Modulus, QuadraticForm};
use uniformity_core::counting::{average_product_direct, average_product_dual, solution_probability, CountMethod};
use uniformity_core::functions::{
    balanced, random_bounded_complex, random_bounded_real, u2_power_convolution, u2_power_fast, uk_power_derivative,
    uk_power_direct, GroupDomain,
};
use uniformity_core::hypergraph::{lift, octahedral_power, vertex_uniformity_counterexample};
use uniformity_core::sample::{random_factor, random_system};
use uniformity_core::systems::{Complexity, LinearFormSystem};
use uniformity_core::verification::{
    atom_distribution, exact_power_bound_holds, gauss_sum, quadratic_zero_set, verify_gvn, verify_projection_lemmas,
    verify_pythagoras, ExperimentReport,
};
use uniformity_core::Budget;

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            details: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, detail: impl Into<String>) {
        let detail = detail.into();
        self.details.push(format!("{} {detail}", if ok { "ok  " } else { "FAIL" }));
        self.pass &= ok;
    }

    fn info(&mut self, detail: impl Into<String>) {
        self.details.push(format!("     {}", detail.into()));
    }

    fn within(&mut self, elapsed: Duration, limit: Duration) {
        self.require(elapsed <= limit, format!("runtime {elapsed:.2?} (limit {limit:.0?})"));
    }
}

fn p(v: u32) -> Modulus {
    Modulus::new(v).unwrap()
}

fn budget() -> Budget {
    Budget::default()
}

fn audited(out: &mut Outcome, rep: &ExperimentReport) {
    if !rep.audit() {
        out.require(false, format!("report `{}` does not recompute from its stored numbers", rep.name));
    }
}

fn c01_complexity_table() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let expected = [("diff3", 1), ("ap4", 2), ("gw6a", 2), ("gw6b", 2), ("cube7", 2), ("ap5", 3)];
    for (name, want) in expected {
        let got = LinearFormSystem::builtin(name, p(7)).unwrap().cs_complexity().unwrap();
        out.require(got == Complexity::Finite(want), format!("{name}: computed {got}, expected {want}"));
    }
    out.within(start.elapsed(), Duration::from_secs(1));
    out
}

fn c02_square_independence() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let expected = [("ap4", false), ("gw6a", true), ("gw6b", true), ("cube7", true)];
    for (name, want) in expected {
        let got = LinearFormSystem::builtin(name, p(7)).unwrap().power_independence(1).unwrap();
        out.require(got == want, format!("{name} at p = 7: independent = {got}"));
    }
    let gw6a5 = LinearFormSystem::builtin("gw6a", p(5)).unwrap().power_independence(1).unwrap();
    out.info(format!("gw6a at p = 5: independent = {gw6a5} (its squares are dependent mod 5)"));
    out.within(start.elapsed(), Duration::from_secs(1));
    out
}

fn c03_normal_form() -> Outcome {
    let mut out = Outcome::new();
    let nf4 = LinearFormSystem::builtin("nf4", p(7)).unwrap().normal_form_check(2);
    out.require(nf4.is_some(), format!("nf4 is in 2-normal form: witness {nf4:?}"));
    let ap4 = LinearFormSystem::builtin("ap4", p(7)).unwrap().normal_form_check(2);
    out.require(ap4.is_none(), "ap4 is not in 2-normal form");
    out
}

fn c04_gauss_equality() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    for (pp, n) in [(3u32, 2usize), (5, 1), (5, 2), (7, 2)] {
        let g = gauss_sum(&QuadraticForm::scaled_dot(p(pp), n, 1), budget()).unwrap();
        let want = (pp as f64).powf(-(n as f64) / 2.0);
        out.require((g.norm() - want).abs() <= 1e-10, format!("p = {pp}, n = {n}: |sum| = {:.15}, p^(-n/2) = {want:.15}", g.norm()));
    }
    out.within(start.elapsed(), Duration::from_secs(1));
    out
}

fn probability(sys: &LinearFormSystem, n: usize, method: CountMethod) -> (BigRational, BigRational, Option<bool>) {
    let a = quadratic_zero_set(sys.modulus(), n).unwrap();
    let rep = solution_probability(sys, &a, method, budget()).unwrap();
    let exact: BigRational = rep.observed_exact.as_deref().expect("exact count").parse().unwrap();
    (exact, a.density_exact(), rep.methods_agree)
}

fn inv_pow(p: u32, e: usize) -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(p).pow(e as u32))
}

fn c05_quadratic_zero_set() -> Outcome {
    let mut out = Outcome::new();
    let gw6a = LinearFormSystem::builtin("gw6a", p(5)).unwrap();

    // (a) at n = 4; direct enumeration is 5^12 tuples.
    let (pr, _, _) = probability(&gw6a, 4, CountMethod::Direct);
    let dev = &pr - inv_pow(5, 6);
    out.require(
        exact_power_bound_holds(&dev, 5, Some(-4)),
        format!("gw6a, n = 4: P = {pr} ~ {:.6e}, |P - 5^-6| = {:.6e} <= 5^-2", pr.to_f64().unwrap(), dev.to_f64().unwrap().abs()),
    );
    // The same system at n = 3 with the dual count as a cross-check.
    let (pr3, _, agree) = probability(&gw6a, 3, CountMethod::Both);
    let dev3 = &pr3 - inv_pow(5, 6);
    out.require(agree == Some(true), "gw6a, n = 3: direct and dual counts agree");
    out.require(
        exact_power_bound_holds(&dev3, 5, Some(-3)),
        format!("gw6a, n = 3: |P - 5^-6| = {:.6e} <= 5^(-3/2)", dev3.to_f64().unwrap().abs()),
    );
    out.info("gw6a is square-dependent mod 5, so this is a check of the stated bound rather than an instance of the theorem");
    let gw6b = LinearFormSystem::builtin("gw6b", p(5)).unwrap();
    let (prb, _, _) = probability(&gw6b, 4, CountMethod::Direct);
    let devb = &prb - inv_pow(5, 6);
    out.require(
        exact_power_bound_holds(&devb, 5, Some(-4)),
        format!("gw6b (square-independent), n = 4: |P - 5^-6| = {:.6e} <= 5^-2", devb.to_f64().unwrap().abs()),
    );

    // (b) four-term progressions.
    let ap4 = LinearFormSystem::builtin("ap4", p(5)).unwrap();
    let (pa, alpha, _) = probability(&ap4, 4, CountMethod::Direct);
    let alpha4 = num_traits::pow(alpha.clone(), 4);
    let ratio = (&pa / &alpha4).to_f64().unwrap();
    out.require(
        pa >= &alpha4 * BigRational::new(3.into(), 2.into()),
        format!("ap4, n = 4: P = {pa}, alpha = {alpha}, P / alpha^4 = {ratio:.4} >= 1.5"),
    );
    out
}

fn c06_direct_equals_dual() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 50 {
        let pp = if rng.random::<bool>() { 3 } else { 5 };
        let n = rng.random_range(1..=3usize);
        let d = rng.random_range(1..=3usize);
        let m = rng.random_range(1..=5usize);
        let dom = GroupDomain::new(p(pp), n).unwrap();
        if (dom.size() as u128).pow(d as u32) * m as u128 > 50_000_000 {
            continue;
        }
        let Ok(sys) = random_system(p(pp), d, m, &mut rng) else { continue };
        let fs: Vec<_> = (0..m).map(|_| random_bounded_complex(dom, &mut rng)).collect();
        let a = average_product_direct(&sys, &fs, budget()).unwrap();
        let b = average_product_dual(&sys, &fs, budget()).unwrap();
        worst = worst.max((a - b).norm());
        done += 1;
    }
    out.require(worst <= 1e-8, format!("50 instances, largest |direct - dual| = {worst:.3e}"));
    out
}

fn c07_u2_identities() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst, mut monotone) = (0.0f64, true);
    for i in 0..100 {
        let (pp, n) = [(3u32, 1usize), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2)][i % 7];
        let f = random_bounded_complex(GroupDomain::new(p(pp), n).unwrap(), &mut rng);
        let u2 = uk_power_direct(&f, 2, budget()).unwrap().powf(0.25);
        let fast = u2_power_fast(&f).powf(0.25);
        let conv = u2_power_convolution(&f).powf(0.25);
        worst = worst.max((u2 - fast).abs()).max((u2 - conv).abs());
        let u3 = uk_power_derivative(&f, 3, budget()).unwrap().max(0.0).powf(0.125);
        monotone &= u2 <= u3 + 1e-12;
    }
    out.require(worst <= 1e-9, format!("100 functions, largest disagreement between U2 routes = {worst:.3e}"));
    out.require(monotone, "||f||_U2 <= ||f||_U3 on every function");
    out
}

fn c08_generalized_von_neumann() -> Outcome {
    let mut out = Outcome::new();
    let dom = GroupDomain::new(p(5), 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (name, k) in [("diff3", 1usize), ("ap3", 1), ("gw6a", 2)] {
        let sys = LinearFormSystem::builtin(name, p(5)).unwrap();
        let (mut failures, mut slack) = (0, f64::INFINITY);
        for _ in 0..200 {
            let fs: Vec<_> = (0..sys.len()).map(|_| random_bounded_complex(dom, &mut rng)).collect();
            let rep = verify_gvn(&sys, &fs, k, budget()).unwrap();
            audited(&mut out, &rep);
            failures += (!rep.pass) as usize;
            let c = &rep.checks[0];
            slack = slack.min(c.rhs - c.lhs);
        }
        out.require(failures == 0, format!("{name}, k = {k}: {failures} failures in 200, smallest margin {slack:.3e}"));
    }
    out
}

fn c09_projection_lemmas() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = 0;
    for i in 0..50 {
        let pp = if i % 2 == 0 { 3 } else { 5 };
        let n = rng.random_range(2..=if pp == 3 { 4 } else { 3 });
        let d1 = rng.random_range(0..=2usize.min(n));
        let d2 = rng.random_range(0..=2usize);
        let factor = random_factor(p(pp), n, d1, d2, &mut rng).unwrap();
        let f = random_bounded_real(GroupDomain::new(p(pp), n).unwrap(), &mut rng);
        let rep = verify_projection_lemmas(&f, &factor).unwrap();
        audited(&mut out, &rep);
        if !rep.pass {
            failures += 1;
            out.info(format!("failed: p = {pp}, n = {n}, d1 = {d1}, d2 = {d2}"));
        }
    }
    out.require(failures == 0, format!("{failures} failures in 50 instances"));
    out
}

fn c10_atoms() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failures = 0;
    let mut ranks = Vec::new();
    for _ in 0..20 {
        let n = rng.random_range(2..=5usize);
        let d1 = rng.random_range(0..=1usize.min(n));
        let d2 = rng.random_range(1..=2usize);
        let factor = random_factor(p(5), n, d1, d2, &mut rng).unwrap();
        ranks.push(factor.rank());
        let rep = atom_distribution(&factor, budget()).unwrap();
        audited(&mut out, &rep);
        failures += (!rep.pass) as usize;
    }
    out.require(failures == 0, format!("{failures} failures in 20 factors"));
    out.info(format!("ranks: {ranks:?}"));
    out
}

fn c11_pythagoras() -> Outcome {
    let mut out = Outcome::new();
    let f = balanced(&quadratic_zero_set(p(5), 3).unwrap()).scale(0.5);
    let rep = verify_pythagoras(&f, 0.5, budget()).unwrap();
    audited(&mut out, &rep);
    let c = &rep.checks[0];
    out.require(rep.pass, format!("gap = {:.6e} <= 24c = {:.6e} (derived tolerance)", c.lhs, c.rhs));
    out.info(format!("c = ||f||_U2 = {}", rep.observed["c"]));
    out
}

fn c12_hypergraph() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    for seed in 0..5 {
        let rep = vertex_uniformity_counterexample(seed, 64, budget()).unwrap();
        audited(&mut out, &rep);
        let close = &rep.checks[0];
        out.require(close.passed, format!("seed {seed}: value {:.5} vs 5/18 = {:.5}", close.lhs, close.rhs));
        for c in &rep.checks[1..] {
            out.info(format!("seed {seed}: {} -> {}", c.name, if c.passed { "holds" } else { "fails" }));
        }
    }
    let dom = GroupDomain::new(p(3), 2).unwrap();
    let g = random_bounded_complex(dom, &mut ChaCha8Rng::seed_from_u64(12));
    let oct = octahedral_power(&lift(&g), budget()).unwrap();
    let u3 = uk_power_direct(&g, 3, budget()).unwrap();
    out.require((oct - u3).abs() <= 1e-9, format!("lift on F_3^2: |oct^8 - U3^8| = {:.3e}", (oct - u3).abs()));
    out.within(start.elapsed(), Duration::from_secs(60));
    out
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("complexity table", c01_complexity_table),
        ("square independence", c02_square_independence),
        ("normal form", c03_normal_form),
        ("Gauss sum equality", c04_gauss_equality),
        ("quadratic zero set counts, p = 5, n = 4", c05_quadratic_zero_set),
        ("direct and dual counts agree", c06_direct_equals_dual),
        ("U2 identities and monotonicity", c07_u2_identities),
        ("generalized von Neumann bound", c08_generalized_von_neumann),
        ("projection lemmas", c09_projection_lemmas),
        ("atom equidistribution", c10_atoms),
        ("Pythagoras gap", c11_pythagoras),
        ("hypergraph counterexample and lift", c12_hypergraph),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome {
                pass: false,
                details: vec![format!("FAIL panicked: {msg}")],
            }
        });
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2}: {verdict}  {name}  [{:.2?}]", i + 1, start.elapsed());
        for d in &outcome.details {
            println!("      {d}");
        }
        if !outcome.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
    } else {
        println!("acceptance: criteria {failed:?} fail");
        std::process::exit(1);
    }
}
