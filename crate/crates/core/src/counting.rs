//! Exact configuration averages `E_x ∏_i f_i(L_i(x))` over `x ∈ (F_p^n)^d`.
//!
//! Two independent routes: enumeration of the physical tuples, and the
//! frequency side `Σ_{r ∈ R} ∏_i f̂_i(r_i)` where `R` consists of the tuples
//! whose every coordinate is a linear relation among the forms.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{FpMatrix, FpVector};
use crate::budget::{saturating_pow, Budget};
use crate::error::{Error, Result};
use crate::functions::{fourier, GroupArith, GroupDomain, GroupFunction, IndicatorSet};
use crate::systems::LinearFormSystem;

/// Work is split into this many contiguous ranges of the first variable,
/// independent of the thread count, and reduced in order.
const CHUNKS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Direct,
    Dual,
    Both,
}

impl std::str::FromStr for CountMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Self::Direct),
            "dual" => Ok(Self::Dual),
            "both" => Ok(Self::Both),
            _ => Err(Error::Parse(format!("unknown method `{s}`"))),
        }
    }
}

/// Odometer over a product of choice sets. Level `u` contributes, for each
/// choice `c`, the offsets `tables[u][c*m..(c+1)*m]` to the `m` running
/// indices, combined with group addition.
pub(crate) struct TupleWalk<'a> {
    pub ar: &'a GroupArith,
    pub m: usize,
    pub tables: Vec<Vec<usize>>,
    pub choices: usize,
}

impl TupleWalk<'_> {
    pub fn total(&self) -> u128 {
        saturating_pow(self.choices as u128, self.tables.len())
    }

    /// Calls `visit(choices, values)` on every tuple whose first choice lies in `range`.
    pub fn walk_range(&self, range: std::ops::Range<usize>, mut visit: impl FnMut(&[usize], &[usize])) {
        let depth = self.tables.len();
        let m = self.m;
        let mut xs = vec![0usize; depth];
        let mut partial = vec![0usize; depth * m];
        let fill = |u: usize, xs: &[usize], partial: &mut [usize]| {
            let off = &self.tables[u][xs[u] * m..(xs[u] + 1) * m];
            if u == 0 {
                partial[..m].copy_from_slice(off);
            } else {
                let (prev, cur) = partial.split_at_mut(u * m);
                let prev = &prev[(u - 1) * m..];
                for i in 0..m {
                    cur[i] = self.ar.add(prev[i], off[i]);
                }
            }
        };
        for x0 in range {
            xs[0] = x0;
            fill(0, &xs, &mut partial);
            for u in 1..depth {
                xs[u] = 0;
                fill(u, &xs, &mut partial);
            }
            loop {
                visit(&xs, &partial[(depth - 1) * m..]);
                let mut u = depth - 1;
                loop {
                    if u == 0 {
                        break;
                    }
                    xs[u] += 1;
                    if xs[u] < self.choices {
                        break;
                    }
                    xs[u] = 0;
                    u -= 1;
                }
                if u == 0 {
                    break;
                }
                for v in u..depth {
                    fill(v, &xs, &mut partial);
                }
            }
        }
    }

    /// Deterministic chunked parallel fold.
    pub fn fold<A, I, F, M>(&self, init: I, visit: F, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, &[usize], &[usize]) + Sync,
        M: Fn(&mut A, A),
    {
        let n = self.choices;
        let chunks = CHUNKS.min(n).max(1);
        let partials: Vec<A> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = c * n / chunks;
                let hi = (c + 1) * n / chunks;
                let mut acc = init();
                self.walk_range(lo..hi, |xs, vals| visit(&mut acc, xs, vals));
                acc
            })
            .collect();
        let mut it = partials.into_iter();
        let mut acc = it.next().unwrap_or_else(&init);
        for part in it {
            merge(&mut acc, part);
        }
        acc
    }
}

/// Walk over `x ∈ (F_p^n)^d` yielding the indices of `L_i(x)`.
pub(crate) fn direct_walk<'a>(sys: &LinearFormSystem, ar: &'a GroupArith) -> TupleWalk<'a> {
    let m = sys.len();
    let size = ar.domain().size();
    let tables = (0..sys.vars())
        .map(|u| {
            let mut t = vec![0usize; size * m];
            for x in 0..size {
                for (i, form) in sys.forms().iter().enumerate() {
                    t[x * m + i] = ar.scale(form.coeffs().coords()[u], x);
                }
            }
            t
        })
        .collect();
    TupleWalk {
        ar,
        m,
        tables,
        choices: size,
    }
}

fn check_inputs(sys: &LinearFormSystem, fs: &[GroupFunction]) -> Result<GroupDomain> {
    if fs.len() != sys.len() {
        return Err(Error::DimensionMismatch {
            expected: sys.len(),
            found: fs.len(),
        });
    }
    let d = *fs[0].domain();
    for f in fs {
        crate::functions::same_domain(&d, f.domain())?;
    }
    if d.modulus() != sys.modulus() {
        return Err(Error::ModulusMismatch {
            left: sys.modulus().get(),
            right: d.modulus().get(),
        });
    }
    Ok(d)
}

/// `p^{nd}·m` table lookups.
pub fn direct_op_count(sys: &LinearFormSystem, domain: &GroupDomain) -> u128 {
    saturating_pow(domain.size() as u128, sys.vars()).saturating_mul(sys.len() as u128)
}

/// `p^{n·dim W}·m` where `W` is the relation space.
pub fn dual_op_count(sys: &LinearFormSystem, domain: &GroupDomain) -> u128 {
    let w = sys.relation_space().relations.dim();
    saturating_pow(domain.modulus().get() as u128, w * domain.dim()).saturating_mul(sys.len() as u128)
}

/// `E_{x ∈ (F_p^n)^d} ∏_i f_i(L_i(x))` by enumeration.
pub fn average_product_direct(sys: &LinearFormSystem, fs: &[GroupFunction], budget: Budget) -> Result<Complex64> {
    let d = check_inputs(sys, fs)?;
    budget.check(direct_op_count(sys, &d))?;
    let ar = d.arith();
    let walk = direct_walk(sys, &ar);
    let tables: Vec<&[Complex64]> = fs.iter().map(|f| f.values()).collect();
    let sum = walk.fold(
        Complex64::zero,
        |acc, _, vals| {
            let mut prod = Complex64::one();
            for (t, &v) in tables.iter().zip(vals) {
                prod *= t[v];
            }
            *acc += prod;
        },
        |a, b| *a += b,
    );
    Ok(sum / walk.total() as f64)
}

/// `Σ_{r ∈ R} ∏_i f̂_i(r_i)`.
pub fn average_product_dual(sys: &LinearFormSystem, fs: &[GroupFunction], budget: Budget) -> Result<Complex64> {
    let d = check_inputs(sys, fs)?;
    budget.check(dual_op_count(sys, &d))?;
    let hats: Vec<GroupFunction> = fs.iter().map(fourier).collect();
    let w = sys.relation_space().relations;
    if w.dim() == 0 {
        return Ok(hats.iter().map(|h| h.value(0)).product());
    }
    let elements = w.elements();
    let ar = d.arith();
    let m = sys.len();
    let tables = (0..d.dim())
        .map(|j| {
            let mut t = vec![0usize; elements.len() * m];
            for (c, e) in elements.iter().enumerate() {
                for i in 0..m {
                    t[c * m + i] = ar.place(j, e.coords()[i]);
                }
            }
            t
        })
        .collect();
    let walk = TupleWalk {
        ar: &ar,
        m,
        tables,
        choices: elements.len(),
    };
    let vals: Vec<&[Complex64]> = hats.iter().map(|h| h.values()).collect();
    Ok(walk.fold(
        Complex64::zero,
        |acc, _, idx| {
            let mut prod = Complex64::one();
            for (t, &v) in vals.iter().zip(idx) {
                prod *= t[v];
            }
            *acc += prod;
        },
        |a, b| *a += b,
    ))
}

/// Number of `x ∈ (F_p^n)^d` with `L_i(x) ∈ A` for all `i`.
pub fn count_solutions(sys: &LinearFormSystem, a: &IndicatorSet, budget: Budget) -> Result<u128> {
    let d = *a.domain();
    if d.modulus() != sys.modulus() {
        return Err(Error::ModulusMismatch {
            left: sys.modulus().get(),
            right: d.modulus().get(),
        });
    }
    budget.check(direct_op_count(sys, &d))?;
    let ar = d.arith();
    let walk = direct_walk(sys, &ar);
    let members = a.members();
    Ok(walk.fold(
        || 0u128,
        |acc, _, vals| {
            if vals.iter().all(|&v| members[v]) {
                *acc += 1;
            }
        },
        |a, b| *a += b,
    ))
}

/// Fraction of `x ∈ (F_p^n)^d` at which two forms agree, exact, by
/// inclusion–exclusion over the kernels of the difference forms. `None`
/// when there are too many distinct kernels for the alternating sum.
pub fn degenerate_fraction(sys: &LinearFormSystem, n: usize) -> Option<BigRational> {
    let p = sys.modulus();
    let mut diffs: Vec<FpVector> = Vec::new();
    for i in 0..sys.len() {
        for j in i + 1..sys.len() {
            let v = sys.form(i).coeffs().sub(sys.form(j).coeffs());
            let fresh = diffs
                .iter()
                .all(|w| !crate::algebra::in_span(&v, std::slice::from_ref(w)).unwrap_or(false));
            if fresh {
                diffs.push(v);
            }
        }
    }
    if diffs.len() > 20 {
        return None;
    }
    let pn = BigInt::from(p.get()).pow(n as u32);
    let mut total = BigRational::zero();
    for mask in 1u32..(1 << diffs.len()) {
        let chosen: Vec<FpVector> = (0..diffs.len())
            .filter(|&k| mask >> k & 1 == 1)
            .map(|k| diffs[k].clone())
            .collect();
        let rank = FpMatrix::from_vectors(p, sys.vars(), &chosen).expect("shape").rank();
        let term = BigRational::new(BigInt::one(), pn.pow(rank as u32));
        if mask.count_ones() % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    Some(total)
}

/// Observed probability against its reference value.
#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub method: CountMethod,
    pub observed: f64,
    pub reference: f64,
    pub deviation: f64,
    pub bound: Option<f64>,
    pub within_bound: Option<bool>,
    pub op_count: u128,
    /// Exact number of solutions, when counted or recovered.
    pub count: Option<u128>,
    /// `p^{nd}`.
    pub total: u128,
    pub observed_exact: Option<String>,
    pub direct: Option<f64>,
    pub dual: Option<f64>,
    pub methods_agree: Option<bool>,
    pub degenerate_fraction: Option<f64>,
}

/// Tolerance for agreement between the two counting routes.
pub const ORACLE_TOLERANCE: f64 = 1e-8;

impl CountReport {
    /// Recomputes `deviation` and the bound check from the stored values.
    pub fn is_consistent(&self) -> bool {
        let dev_ok = (self.deviation - (self.observed - self.reference).abs()).abs() <= 1e-15;
        let bound_ok = match (self.bound, self.within_bound) {
            (Some(b), Some(w)) => w == (self.deviation <= b + 1e-9),
            (None, None) => true,
            _ => false,
        };
        let agree_ok = match (self.direct, self.dual, self.methods_agree) {
            (Some(a), Some(b), Some(w)) => w == ((a - b).abs() <= ORACLE_TOLERANCE),
            (_, _, None) => true,
            _ => false,
        };
        dev_ok && bound_ok && agree_ok
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self.within_bound = Some(self.deviation <= bound + 1e-9);
        self
    }

    pub fn passed(&self) -> bool {
        self.within_bound.unwrap_or(true) && self.methods_agree.unwrap_or(true)
    }
}

/// Probability that `L_i(x) ∈ A` for every `i`, against `α^m`.
pub fn solution_probability(
    sys: &LinearFormSystem,
    a: &IndicatorSet,
    method: CountMethod,
    budget: Budget,
) -> Result<CountReport> {
    let d = *a.domain();
    let total = saturating_pow(d.size() as u128, sys.vars());
    let alpha = a.density_exact();
    let reference = num_traits::pow(alpha, sys.len()).to_f64().unwrap_or(f64::NAN);
    let (mut direct, mut dual, mut count, mut exact) = (None, None, None, None);
    let mut op_count = 0u128;
    if matches!(method, CountMethod::Direct | CountMethod::Both) {
        let c = count_solutions(sys, a, budget)?;
        let q = BigRational::new(BigInt::from(c), BigInt::from(total));
        direct = Some(q.to_f64().unwrap_or(f64::NAN));
        exact = Some(q.to_string());
        count = Some(c);
        op_count += direct_op_count(sys, &d);
    }
    if matches!(method, CountMethod::Dual | CountMethod::Both) {
        let f = a.indicator();
        let fs = vec![f; sys.len()];
        let v = average_product_dual(sys, &fs, budget)?;
        dual = Some(v.re);
        op_count += dual_op_count(sys, &d);
        if count.is_none() {
            let scaled = v.re * total as f64;
            let rounded = scaled.round();
            if (scaled - rounded).abs() < 1e-3 && rounded >= 0.0 {
                let c = rounded as u128;
                count = Some(c);
                exact = Some(BigRational::new(BigInt::from(c), BigInt::from(total)).to_string());
            }
        }
    }
    let observed = direct.or(dual).expect("at least one method ran");
    let methods_agree = match (direct, dual) {
        (Some(a), Some(b)) => Some((a - b).abs() <= ORACLE_TOLERANCE),
        _ => None,
    };
    Ok(CountReport {
        method,
        observed,
        reference,
        deviation: (observed - reference).abs(),
        bound: None,
        within_bound: None,
        op_count,
        count,
        total,
        observed_exact: exact,
        direct,
        dual,
        methods_agree,
        degenerate_fraction: degenerate_fraction(sys, d.dim()).and_then(|q| q.to_f64()),
    })
}
