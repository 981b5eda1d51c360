//! Quadratic factors `(B_1, B_2)` and the equidistribution of their atoms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{FpMatrix, FpVector, Modulus, QuadraticForm};
use crate::budget::{saturating_pow, Budget};
use crate::counting::direct_walk;
use crate::error::{Error, Result};
use crate::functions::GroupDomain;
use crate::systems::LinearFormSystem;
use crate::verification::gauss::inv_power;
use crate::verification::report::{Check, ExperimentReport, Relation};

/// `Γ_2 : x ↦ (q_1(x), …, q_{d_2}(x))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticMap {
    p: Modulus,
    n: usize,
    forms: Vec<QuadraticForm>,
}

impl QuadraticMap {
    pub fn new(p: Modulus, n: usize, forms: Vec<QuadraticForm>) -> Result<Self> {
        for q in &forms {
            if q.modulus() != p {
                return Err(Error::ModulusMismatch {
                    left: p.get(),
                    right: q.modulus().get(),
                });
            }
            if q.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: q.dim(),
                });
            }
        }
        Ok(Self { p, n, forms })
    }

    pub fn empty(p: Modulus, n: usize) -> Self {
        Self { p, n, forms: Vec::new() }
    }

    pub fn modulus(&self) -> Modulus {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn forms(&self) -> &[QuadraticForm] {
        &self.forms
    }

    pub fn eval(&self, x: &[u32]) -> Vec<u32> {
        self.forms.iter().map(|q| q.eval(x)).collect()
    }
}

/// Minimum rank of `Σ λ_i β_i` over nonzero `λ`; `None` when there are no
/// forms, in which case every rank condition holds vacuously.
pub fn factor_rank(gamma2: &QuadraticMap) -> Option<usize> {
    let d2 = gamma2.len();
    if d2 == 0 {
        return None;
    }
    let p = gamma2.p;
    // Rank is invariant under scaling λ, so take the first nonzero entry to be 1.
    let mut best = usize::MAX;
    for lead in 0..d2 {
        let free = d2 - lead - 1;
        for t in 0..saturating_pow(p.get() as u128, free) as usize {
            let mut lambda = vec![0u32; d2];
            lambda[lead] = 1;
            let mut rest = t;
            for slot in lambda[lead + 1..].iter_mut() {
                *slot = (rest % p.get() as usize) as u32;
                rest /= p.get() as usize;
            }
            let comb = QuadraticForm::combination(&gamma2.forms, &lambda).expect("shapes checked");
            best = best.min(comb.rank());
            if best == 0 {
                return Some(0);
            }
        }
    }
    Some(best)
}

/// A linear map `Γ_1` (surjective, `d_1 × n`) together with a quadratic map `Γ_2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticFactor {
    gamma1: FpMatrix,
    gamma2: QuadraticMap,
}

impl QuadraticFactor {
    pub fn new(gamma1: FpMatrix, gamma2: QuadraticMap) -> Result<Self> {
        if gamma1.cols() != gamma2.dim() {
            return Err(Error::DimensionMismatch {
                expected: gamma2.dim(),
                found: gamma1.cols(),
            });
        }
        if gamma1.modulus() != gamma2.modulus() {
            return Err(Error::ModulusMismatch {
                left: gamma1.modulus().get(),
                right: gamma2.modulus().get(),
            });
        }
        if gamma1.rank() != gamma1.rows() {
            return Err(Error::InvalidArgument("the linear part of a factor must be surjective".into()));
        }
        Ok(Self { gamma1, gamma2 })
    }

    /// Factor with no linear part.
    pub fn quadratic_only(gamma2: QuadraticMap) -> Self {
        let gamma1 = FpMatrix::zeros(gamma2.p, 0, gamma2.n);
        Self { gamma1, gamma2 }
    }

    pub fn modulus(&self) -> Modulus {
        self.gamma2.p
    }

    pub fn dim(&self) -> usize {
        self.gamma2.n
    }

    pub fn d1(&self) -> usize {
        self.gamma1.rows()
    }

    pub fn d2(&self) -> usize {
        self.gamma2.len()
    }

    pub fn gamma1(&self) -> &FpMatrix {
        &self.gamma1
    }

    pub fn gamma2(&self) -> &QuadraticMap {
        &self.gamma2
    }

    pub fn rank(&self) -> Option<usize> {
        factor_rank(&self.gamma2)
    }

    /// Per point of `F_p^n`, the packed values of `Γ_1 x` and `Γ_2 x`.
    pub(crate) fn tables(&self, domain: &GroupDomain) -> (Vec<usize>, Vec<usize>) {
        let p = self.modulus();
        let mut g1 = Vec::with_capacity(domain.size());
        let mut g2 = Vec::with_capacity(domain.size());
        for i in 0..domain.size() {
            let x = domain.coords(i);
            g1.push(pack(p, &self.gamma1.mul_vec(&x)));
            g2.push(pack(p, &self.gamma2.eval(&x)));
        }
        (g1, g2)
    }

    /// Atom index `(Γ_1 x, Γ_2 x)` packed into `[0, p^{d_1+d_2})`.
    pub(crate) fn atom_table(&self, domain: &GroupDomain) -> Vec<usize> {
        let (g1, g2) = self.tables(domain);
        let cells2 = (self.modulus().get() as usize).pow(self.d2() as u32);
        g1.iter().zip(&g2).map(|(&a, &b)| a * cells2 + b).collect()
    }
}

/// Lexicographic index of a vector in `F_p^k`.
pub(crate) fn pack(p: Modulus, v: &[u32]) -> usize {
    v.iter().fold(0, |acc, &c| acc * p.get() as usize + c as usize)
}

fn rank_twice_exponent(r: Option<usize>, shift_twice: i64) -> Option<i64> {
    r.map(|r| shift_twice - r as i64)
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomHistogram {
    pub cells: usize,
    pub min_count: u64,
    pub max_count: u64,
    pub empty_cells: usize,
    pub worst_deviation: String,
}

/// Exact distribution of `(Γ_1 x, Γ_2 x)` against `p^{−d_1−d_2}`.
pub fn atom_distribution(factor: &QuadraticFactor, budget: Budget) -> Result<ExperimentReport> {
    let p = factor.modulus();
    let domain = GroupDomain::new(p, factor.dim())?;
    let dims = factor.d1() + factor.d2();
    budget.check((domain.size() as u128).saturating_mul((dims.max(1) * factor.dim()) as u128))?;
    let cells = saturating_pow(p.get() as u128, dims) as usize;
    let mut hist = vec![0u64; cells];
    for a in factor.atom_table(&domain) {
        hist[a] += 1;
    }
    let n_pts = BigInt::from(domain.size());
    let target = inv_power(p, dims);
    let mut worst = BigRational::zero();
    for &c in &hist {
        let dev = BigRational::new(BigInt::from(c), n_pts.clone()) - &target;
        let dev = if dev < BigRational::zero() { -dev } else { dev };
        if dev > worst {
            worst = dev;
        }
    }
    let r = factor.rank();
    let mut rep = ExperimentReport::new("atoms");
    rep.param("p", p.get())
        .param("n", factor.dim())
        .param("d1", factor.d1())
        .param("d2", factor.d2())
        .param("r", r);
    rep.observe(
        "histogram",
        AtomHistogram {
            cells,
            min_count: hist.iter().copied().min().unwrap_or(0),
            max_count: hist.iter().copied().max().unwrap_or(0),
            empty_cells: hist.iter().filter(|&&c| c == 0).count(),
            worst_deviation: worst.to_string(),
        },
    );
    rep.check(Check::exact_power(
        "every atom within p^(-r/2) of p^(-d1-d2)",
        &worst,
        p,
        rank_twice_exponent(r, 0),
    ));
    Ok(rep)
}

fn require_square_independent(sys: &LinearFormSystem) -> Result<()> {
    if !sys.is_square_independent() {
        return Err(Error::NotSquareIndependent);
    }
    Ok(())
}

fn check_targets(targets: &[FpVector], m: usize, width: usize, p: Modulus) -> Result<Vec<usize>> {
    if targets.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: targets.len(),
        });
    }
    targets
        .iter()
        .map(|t| {
            if t.dim() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    found: t.dim(),
                });
            }
            Ok(pack(p, t.coords()))
        })
        .collect()
}

/// Probability that `Γ_2(L_i(x)) = φ_i(x) + b_i` for all `i`, against `p^{−m d_2}`.
///
/// Each `φ_i` is a `d_2 × nd` matrix acting on `(x_1, …, x_d)` concatenated;
/// an empty slice means every `φ_i` is zero, likewise for `bs`.
pub fn verify_quadfactor(
    sys: &LinearFormSystem,
    gamma2: &QuadraticMap,
    phis: &[FpMatrix],
    bs: &[FpVector],
    budget: Budget,
) -> Result<ExperimentReport> {
    require_square_independent(sys)?;
    let p = sys.modulus();
    if gamma2.p != p {
        return Err(Error::ModulusMismatch {
            left: p.get(),
            right: gamma2.p.get(),
        });
    }
    let (m, d, n, d2) = (sys.len(), sys.vars(), gamma2.n, gamma2.len());
    let domain = GroupDomain::new(p, n)?;
    let ops = saturating_pow(domain.size() as u128, d).saturating_mul((m * (d + 1)) as u128);
    budget.check(ops)?;

    let zeros = vec![FpVector::zeros(p, d2); m];
    let b_packed = check_targets(if bs.is_empty() { &zeros } else { bs }, m, d2, p)?;
    let target_domain = GroupDomain::new(p, d2)?;
    let tar = target_domain.arith();
    // phi_tab[(i*d + u)*N + x] = packed φ_i restricted to the u-th block, at x.
    let phi_tab: Option<Vec<usize>> = if phis.is_empty() {
        None
    } else {
        if phis.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: phis.len(),
            });
        }
        let mut tab = vec![0usize; m * d * domain.size()];
        for (i, phi) in phis.iter().enumerate() {
            if phi.rows() != d2 || phi.cols() != n * d {
                return Err(Error::InvalidArgument(format!(
                    "phi_{i} must be {d2}×{} (got {}×{})",
                    n * d,
                    phi.rows(),
                    phi.cols()
                )));
            }
            for u in 0..d {
                for xi in 0..domain.size() {
                    let x = domain.coords(xi);
                    let v: Vec<u32> = (0..d2)
                        .map(|j| {
                            (0..n).fold(0, |acc, t| p.add(acc, p.mul(phi.get(j, u * n + t), x[t])))
                        })
                        .collect();
                    tab[(i * d + u) * domain.size() + xi] = pack(p, &v);
                }
            }
        }
        Some(tab)
    };
    let g2: Vec<usize> = (0..domain.size()).map(|i| pack(p, &gamma2.eval(&domain.coords(i)))).collect();
    let ar = domain.arith();
    let walk = direct_walk(sys, &ar);
    let size = domain.size();
    let hits = walk.fold(
        || 0u128,
        |acc, xs, vals| {
            let ok = (0..m).all(|i| {
                let mut want = b_packed[i];
                if let Some(tab) = &phi_tab {
                    for (u, &x) in xs.iter().enumerate() {
                        want = tar.add(want, tab[(i * d + u) * size + x]);
                    }
                }
                g2[vals[i]] == want
            });
            if ok {
                *acc += 1;
            }
        },
        |a, b| *a += b,
    );
    let total = walk.total();
    let prob = BigRational::new(BigInt::from(hits), BigInt::from(total));
    let r = factor_rank(gamma2);
    let mut rep = ExperimentReport::new("quadfactor");
    rep.param("p", p.get())
        .param("n", n)
        .param("m", m)
        .param("d", d)
        .param("d2", d2)
        .param("r", r)
        .param("system", sys.to_file())
        .param("phi_zero", phis.is_empty());
    rep.observe("count", hits.to_string())
        .observe("total", total.to_string())
        .observe("probability", prob.to_string())
        .observe("reference", inv_power(p, m * d2).to_string());
    rep.check(Check::exact_power(
        "probability within p^(-r/2) of p^(-m d2)",
        &(&prob - inv_power(p, m * d2)),
        p,
        rank_twice_exponent(r, 0),
    ));
    Ok(rep)
}

/// Whether `(a_1, …, a_m)` lies in `Z = {a : Σ μ_i a_i = 0 for every relation μ}`.
pub fn in_relation_image(sys: &LinearFormSystem, a: &[FpVector]) -> bool {
    let p = sys.modulus();
    let w = sys.relation_space().relations;
    let width = a.first().map(|v| v.dim()).unwrap_or(0);
    w.basis().iter().all(|mu| {
        (0..width).all(|j| {
            mu.coords()
                .iter()
                .zip(a)
                .fold(0, |acc, (&c, ai)| p.add(acc, p.mul(c, ai.coords()[j])))
                == 0
        })
    })
}

/// Largest histogram of `φ(x) = (Γ_1 L_i(x))_i` kept in memory.
const IMAGE_CELL_LIMIT: u128 = 1 << 16;

/// Probability that `Γ_1(L_i(x)) = a_i` and `Γ_2(L_i(x)) = b_i` for every `i`.
///
/// Outside `Z` the probability must vanish; inside it must be within
/// `p^{d_1 − d'd_1 − r/2}` of `p^{−d_1 d' − d_2 m}`. When small enough the
/// image of `φ` is also enumerated and compared with `Z`.
pub fn verify_completefactor(
    sys: &LinearFormSystem,
    factor: &QuadraticFactor,
    a: &[FpVector],
    b: &[FpVector],
    budget: Budget,
) -> Result<ExperimentReport> {
    require_square_independent(sys)?;
    let p = sys.modulus();
    if factor.modulus() != p {
        return Err(Error::ModulusMismatch {
            left: p.get(),
            right: factor.modulus().get(),
        });
    }
    let (m, d, n, d1, d2) = (sys.len(), sys.vars(), factor.dim(), factor.d1(), factor.d2());
    let domain = GroupDomain::new(p, n)?;
    budget.check(saturating_pow(domain.size() as u128, d).saturating_mul(2 * m as u128))?;
    let a_packed = check_targets(a, m, d1, p)?;
    let b_packed = check_targets(b, m, d2, p)?;
    let in_z = in_relation_image(sys, a);
    let d_prime = sys.relation_space().linear_rank;

    let (g1, g2) = factor.tables(&domain);
    let cells1 = saturating_pow(p.get() as u128, d1);
    let image_cells = saturating_pow(cells1, m);
    let track_image = image_cells <= IMAGE_CELL_LIMIT;
    let ar = domain.arith();
    let walk = direct_walk(sys, &ar);
    let (hits, image) = walk.fold(
        || (0u128, if track_image { vec![0u64; image_cells as usize] } else { Vec::new() }),
        |acc, _, vals| {
            if (0..m).all(|i| g1[vals[i]] == a_packed[i] && g2[vals[i]] == b_packed[i]) {
                acc.0 += 1;
            }
            if track_image {
                let key = vals.iter().fold(0usize, |k, &v| k * cells1 as usize + g1[v]);
                acc.1[key] += 1;
            }
        },
        |x, y| {
            x.0 += y.0;
            for (s, t) in x.1.iter_mut().zip(y.1) {
                *s += t;
            }
        },
    );
    let total = walk.total();
    let prob = BigRational::new(BigInt::from(hits), BigInt::from(total));
    let r = factor.rank();

    let mut rep = ExperimentReport::new("completefactor");
    rep.param("p", p.get())
        .param("n", n)
        .param("m", m)
        .param("d", d)
        .param("d1", d1)
        .param("d2", d2)
        .param("d_prime", d_prime)
        .param("r", r)
        .param("system", sys.to_file());
    rep.observe("a_in_z", in_z)
        .observe("count", hits.to_string())
        .observe("total", total.to_string())
        .observe("probability", prob.to_string());
    if in_z {
        let reference = inv_power(p, d1 * d_prime + d2 * m);
        rep.observe("reference", reference.to_string());
        let shift = 2 * (d1 as i64) - 2 * (d_prime * d1) as i64;
        rep.check(Check::exact_power(
            "probability within p^(d1 - d' d1 - r/2) of p^(-d1 d' - d2 m)",
            &(&prob - reference),
            p,
            rank_twice_exponent(r, shift),
        ));
    } else {
        rep.check(Check::exact_power("probability is zero outside Z", &prob, p, None));
    }

    if track_image {
        let reached: Vec<usize> = (0..image.len()).filter(|&k| image[k] > 0).collect();
        let outside = reached
            .iter()
            .filter(|&&k| {
                let mut rest = k;
                let mut parts = vec![Vec::new(); m];
                for i in (0..m).rev() {
                    let cell = rest % cells1 as usize;
                    rest /= cells1 as usize;
                    let mut coords = vec![0u32; d1];
                    let mut c = cell;
                    for slot in coords.iter_mut().rev() {
                        *slot = (c % p.get() as usize) as u32;
                        c /= p.get() as usize;
                    }
                    parts[i] = coords;
                }
                let vs: Vec<FpVector> = parts.into_iter().map(|c| FpVector::new(p, c)).collect();
                !in_relation_image(sys, &vs)
            })
            .count();
        let expected = saturating_pow(p.get() as u128, d_prime * d1) as f64;
        rep.observe("image_size", reached.len());
        rep.check(Check::float("image of phi has p^(d' d1) points", reached.len() as f64, Relation::Eq, expected, 0.0));
        rep.check(Check::float("image of phi lies in Z", outside as f64, Relation::Eq, 0.0, 0.0));
    } else {
        rep.note("image of phi not enumerated: too many cells");
    }
    Ok(rep)
}
