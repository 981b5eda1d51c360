//! Functions on `X × Y × Z`: the octahedral norm, lifts of group functions,
//! and a vertex-uniform weighted hypergraph with the wrong count of pairs of
//! faces sharing an edge.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::functions::GroupFunction;
use crate::verification::{Check, ExperimentReport, Relation};

/// Dense complex table on `X × Y × Z`, indexed `(x·|Y| + y)·|Z| + z`.
#[derive(Clone, Debug, PartialEq)]
pub struct TripartiteFunction {
    nx: usize,
    ny: usize,
    nz: usize,
    values: Vec<Complex64>,
}

impl TripartiteFunction {
    pub fn new(nx: usize, ny: usize, nz: usize, values: Vec<Complex64>) -> Result<Self> {
        let size = nx * ny * nz;
        if size == 0 {
            return Err(Error::InvalidArgument("vertex classes must be nonempty".into()));
        }
        if values.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: values.len(),
            });
        }
        Ok(Self { nx, ny, nz, values })
    }

    pub fn from_fn(nx: usize, ny: usize, nz: usize, f: impl Fn(usize, usize, usize) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(nx * ny * nz);
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    values.push(f(x, y, z));
                }
            }
        }
        Self { nx, ny, nz, values }
    }

    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nz)
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize, z: usize) -> Complex64 {
        self.values[(x * self.ny + y) * self.nz + z]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }
}

/// `F(x, y, z) = g(x + y + z)` on `G × G × G`.
pub fn lift(g: &GroupFunction) -> TripartiteFunction {
    let d = g.domain();
    let ar = d.arith();
    let n = d.size();
    TripartiteFunction::from_fn(n, n, n, |x, y, z| g.value(ar.add(ar.add(x, y), z)))
}

/// Operations performed by [`octahedral_power`].
pub fn octahedral_op_count(f: &TripartiteFunction) -> u128 {
    let (x, y, z) = (f.nx as u128, f.ny as u128, f.nz as u128);
    x * x * y * y * z
}

/// Eighth power of the octahedral norm,
/// `E ∏_{ε∈{0,1}^3} C^{|ε|} F(x(ε_1), y(ε_2), z(ε_3))`,
/// evaluated as `E_{x(·),y(·)} |E_z G(z)|²` with
/// `G(z) = F(x0,y0,z) conj F(x0,y1,z) conj F(x1,y0,z) F(x1,y1,z)`.
pub fn octahedral_power(f: &TripartiteFunction, budget: Budget) -> Result<f64> {
    budget.check(octahedral_op_count(f))?;
    let (nx, ny, nz) = (f.nx, f.ny, f.nz);
    let partials: Vec<f64> = (0..nx)
        .into_par_iter()
        .map(|x0| {
            let mut acc = 0.0;
            for x1 in 0..nx {
                for y0 in 0..ny {
                    for y1 in 0..ny {
                        let mut s = Complex64::zero();
                        for z in 0..nz {
                            s += f.at(x0, y0, z) * f.at(x0, y1, z).conj() * f.at(x1, y0, z).conj() * f.at(x1, y1, z);
                        }
                        acc += s.norm_sqr();
                    }
                }
            }
            acc
        })
        .collect();
    let total: f64 = partials.into_iter().sum();
    let denom = (nx as f64).powi(2) * (ny as f64).powi(2) * (nz as f64).powi(2);
    Ok(total / denom)
}

pub fn octahedral_norm(f: &TripartiteFunction, budget: Budget) -> Result<f64> {
    Ok(octahedral_power(f, budget)?.max(0.0).powf(0.125))
}

/// A symmetric `±1` function on `X²`, diagonal included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricSigns {
    n: usize,
    values: Vec<i8>,
}

impl SymmetricSigns {
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut values = vec![0i8; n * n];
        for x in 0..n {
            for y in x..n {
                let s = if rng.random::<bool>() { 1 } else { -1 };
                values[x * n + y] = s;
                values[y * n + x] = s;
            }
        }
        Self { n, values }
    }

    pub fn constant(n: usize, sign: i8) -> Self {
        Self {
            n,
            values: vec![sign.signum(); n * n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> i8 {
        self.values[x * self.n + y]
    }

    /// `H(x,y,z) = (3 + u(x,y) + u(y,z) + u(x,z)) / 6`.
    #[inline]
    pub fn weight(&self, x: usize, y: usize, z: usize) -> f64 {
        (3 + self.get(x, y) as i32 + self.get(y, z) as i32 + self.get(x, z) as i32) as f64 / 6.0
    }

    pub fn hypergraph(&self) -> TripartiteFunction {
        let n = self.n;
        TripartiteFunction::from_fn(n, n, n, |x, y, z| Complex64::new(self.weight(x, y, z), 0.0))
    }
}

/// `E_{x,y,z,w} H(x,y,z) H(x,y,w) = E_{x,y} (E_z H(x,y,z))²`.
pub fn shared_pair_average(u: &SymmetricSigns) -> f64 {
    let n = u.n;
    let partials: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut acc = 0.0;
            for y in 0..n {
                let s: f64 = (0..n).map(|z| u.weight(x, y, z)).sum::<f64>() / n as f64;
                acc += s * s;
            }
            acc
        })
        .collect();
    partials.into_iter().sum::<f64>() / (n * n) as f64
}

/// `E_u` of [`shared_pair_average`] over uniformly random symmetric `u`,
/// exactly. Writing `H·H' = (3+a+b+c)(3+a+b'+c')/36` with
/// `a = u(x,y)`, `b = u(y,z)`, `c = u(x,z)`, `b' = u(y,w)`, `c' = u(x,w)`,
/// single factors average to zero and `E u(e)u(e') = [e = e']`, so each
/// tuple contributes `(9 + #{coinciding edge pairs})/36`. That count only
/// depends on which of `x, y, z, w` are equal, so we sum over the fifteen
/// equality patterns weighted by how many tuples realise each.
pub fn shared_pair_expectation(n: usize) -> BigRational {
    let mut total = BigRational::zero();
    let n_big = BigInt::from(n);
    for labels in set_partitions(4) {
        let blocks = labels.iter().copied().max().map_or(0, |b| b + 1);
        if blocks > n {
            continue;
        }
        let mut tuples = BigInt::from(1);
        for i in 0..blocks {
            tuples *= &n_big - i;
        }
        let (x, y, z, w) = (labels[0], labels[1], labels[2], labels[3]);
        let edge = |s: usize, t: usize| (s.min(t), s.max(t));
        let left = [edge(x, y), edge(y, z), edge(x, z)];
        let right = [edge(x, y), edge(y, w), edge(x, w)];
        let matched = left.iter().flat_map(|l| right.iter().map(move |r| (l == r) as i64)).sum::<i64>();
        total += BigRational::new(tuples * (9 + matched), BigInt::from(36));
    }
    total / n_big.pow(4)
}

/// Restricted-growth labelings of `k` items: one per set partition.
fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0usize]];
    for _ in 1..k {
        out = out
            .into_iter()
            .flat_map(|v| {
                let next = v.iter().copied().max().unwrap_or(0) + 1;
                (0..=next).map(move |b| {
                    let mut w = v.clone();
                    w.push(b);
                    w
                })
            })
            .collect();
    }
    out
}

/// `|E H(x,y,z) a(x) b(y) c(z) − (1/2) E a E b E c|`.
pub fn vertex_correlation(u: &SymmetricSigns, a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let n = u.n;
    let partials: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut acc = 0.0;
            for y in 0..n {
                let row: f64 = (0..n).map(|z| u.weight(x, y, z) * c[z]).sum();
                acc += a[x] * b[y] * row;
            }
            acc
        })
        .collect();
    let e = partials.into_iter().sum::<f64>() / (n as f64).powi(3);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    (e - 0.5 * mean(a) * mean(b) * mean(c)).abs()
}

/// Distance allowed between the observed value and 5/18 at a given size.
pub const COUNTEREXAMPLE_TOLERANCE: f64 = 0.02;

/// Number of random `(a, b, c)` triples tested for vertex uniformity.
pub const VERTEX_TRIALS: usize = 20;

/// Draws `u` from `seed`, evaluates the shared-pair average of `H` and checks
/// that it sits near 5/18 rather than `(1/2)²`, while `H` has density about
/// one half and is vertex uniform.
pub fn vertex_uniformity_counterexample(seed: u64, n: usize, budget: Budget) -> Result<ExperimentReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("size must be positive".into()));
    }
    let n3 = (n as u128).pow(3);
    budget.check(n3 * (VERTEX_TRIALS as u128 + 2))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = SymmetricSigns::random(n, &mut rng);
    let value = shared_pair_average(&u);
    let expected = shared_pair_expectation(n);
    let expected_f = expected.to_f64().unwrap_or(f64::NAN);
    let density = {
        let s: i64 = u.values.iter().map(|&v| v as i64).sum();
        // E H = 1/2 + (E u(x,y) + E u(y,z) + E u(x,z)) / 6 = 1/2 + E u / 2.
        0.5 + s as f64 / (n * n) as f64 / 2.0
    };
    let slack = 3.0 / (n as f64).sqrt();
    let mut worst_vertex = 0.0f64;
    for _ in 0..VERTEX_TRIALS {
        let mut draw = || (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect::<Vec<f64>>();
        let (a, b, c) = (draw(), draw(), draw());
        worst_vertex = worst_vertex.max(vertex_correlation(&u, &a, &b, &c));
    }

    let five_18 = 5.0 / 18.0;
    let mut rep = ExperimentReport::new("counterexample");
    rep.param("seed", seed).param("size", n).param("vertex_trials", VERTEX_TRIALS);
    rep.observe("value", value)
        .observe("expected_over_u", expected.to_string())
        .observe("expected_over_u_f64", expected_f)
        .observe("degenerate_correction", expected_f - five_18)
        .observe("density", density)
        .observe("worst_vertex_correlation", worst_vertex);
    rep.check(Check::float(
        "value within tolerance of 5/18",
        value,
        Relation::Eq,
        five_18,
        COUNTEREXAMPLE_TOLERANCE,
    ));
    rep.check(Check::float(
        "value closer to 5/18 than to 1/4",
        (value - five_18).abs(),
        Relation::Le,
        (value - 0.25).abs(),
        0.0,
    ));
    rep.check(Check::float("density within 3/sqrt(N) of 1/2", density, Relation::Eq, 0.5, slack));
    rep.check(Check::float(
        "vertex correlations at most 3/sqrt(N)",
        worst_vertex,
        Relation::Le,
        slack,
        0.0,
    ));
    rep.note("expected_over_u counts degenerate tuples (z = w, x = y, ...); its distance from 5/18 is O(1/N)");
    Ok(rep)
}

/// Sum of `u(x,y) v(y,z) w(x,z)` over all `u, v, w ∈ {f_2, …, f_m}`, where
/// `f_k` takes independent uniformly random `k`-th roots of unity.
pub fn roots_of_unity_function(n: usize, m: usize, seed: u64) -> Result<TripartiteFunction> {
    if !(2..=3).contains(&m) {
        return Err(Error::InvalidArgument("the demonstration supports 2 ≤ m ≤ 3".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fks: Vec<Vec<Complex64>> = (2..=m)
        .map(|k| {
            (0..n * n)
                .map(|_| {
                    let j = rng.random_range(0..k);
                    Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / k as f64)
                })
                .collect()
        })
        .collect();
    Ok(TripartiteFunction::from_fn(n, n, n, |x, y, z| {
        let mut s = Complex64::zero();
        for u in &fks {
            for v in &fks {
                for w in &fks {
                    s += u[x * n + y] * v[y * n + z] * w[x * n + z];
                }
            }
        }
        s
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct RootsDemo {
    pub size: usize,
    pub m: usize,
    pub seed: u64,
    /// `E f(x,y,z)`.
    pub single_face: [f64; 2],
    /// `E f(x,y,z) f(x,y,w)`: two faces sharing the pair `{x,y}`.
    pub shared_pair: [f64; 2],
}

/// Reports the two averages for the generated function; nothing is asserted.
pub fn roots_of_unity_demo(n: usize, m: usize, seed: u64) -> Result<RootsDemo> {
    let f = roots_of_unity_function(n, m, seed)?;
    let mean = f.mean();
    let mut acc = Complex64::zero();
    for x in 0..n {
        for y in 0..n {
            let s: Complex64 = (0..n).map(|z| f.at(x, y, z)).sum();
            acc += s * s;
        }
    }
    let shared = acc / (n as f64).powi(4);
    Ok(RootsDemo {
        size: n,
        m,
        seed,
        single_face: [mean.re, mean.im],
        shared_pair: [shared.re, shared.im],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Modulus;
    use crate::functions::{random_bounded_complex, uk_power_direct, GroupDomain};

    fn brute_octahedral(f: &TripartiteFunction) -> f64 {
        let (nx, ny, nz) = f.sizes();
        let mut acc = Complex64::zero();
        for t in 0..(nx * nx * ny * ny * nz * nz) {
            let mut r = t;
            let mut take = |k: usize| {
                let v = r % k;
                r /= k;
                v
            };
            let xs = [take(nx), take(nx)];
            let ys = [take(ny), take(ny)];
            let zs = [take(nz), take(nz)];
            let mut prod = Complex64::new(1.0, 0.0);
            for e in 0..8usize {
                let (a, b, c) = (e & 1, e >> 1 & 1, e >> 2 & 1);
                let v = f.at(xs[a], ys[b], zs[c]);
                prod *= if (a + b + c) % 2 == 1 { v.conj() } else { v };
            }
            acc += prod;
        }
        acc.re / ((nx * ny * nz) as f64).powi(2)
    }

    #[test]
    fn octahedral_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let vals = (0..2 * 3 * 2)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let f = TripartiteFunction::new(2, 3, 2, vals).unwrap();
        assert!((octahedral_power(&f, Budget::default()).unwrap() - brute_octahedral(&f)).abs() < 1e-12);
    }

    #[test]
    fn constant_and_vertex_functions() {
        let c = TripartiteFunction::from_fn(3, 3, 3, |_, _, _| Complex64::new(0.7, 0.0));
        assert!((octahedral_norm(&c, Budget::default()).unwrap() - 0.7).abs() < 1e-12);
        let a = TripartiteFunction::from_fn(4, 2, 2, |x, _, _| Complex64::new(if x % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
        assert!((octahedral_norm(&a, Budget::default()).unwrap() - 1.0).abs() < 1e-12);
        let zero = TripartiteFunction::from_fn(2, 2, 2, |_, _, _| Complex64::zero());
        assert_eq!(octahedral_norm(&zero, Budget::default()).unwrap(), 0.0);
    }

    #[test]
    fn lift_identity() {
        let d = GroupDomain::new(Modulus::new(3).unwrap(), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_bounded_complex(d, &mut rng);
        let oct = octahedral_power(&lift(&g), Budget::default()).unwrap();
        let u3 = uk_power_direct(&g, 3, Budget::default()).unwrap();
        assert!((oct - u3).abs() < 1e-12);
        let chi = GroupFunction::character(d, &[1, 2]);
        assert!((octahedral_norm(&lift(&chi), Budget::default()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_signs() {
        assert_eq!(shared_pair_average(&SymmetricSigns::constant(5, 1)), 1.0);
        assert_eq!(shared_pair_average(&SymmetricSigns::constant(5, -1)), 0.0);
    }

    #[test]
    fn exact_expectation_against_enumeration_of_u() {
        // n = 2: three free signs on the pairs {0,0}, {0,1}, {1,1}.
        let n = 2;
        let mut mean = 0.0;
        for bits in 0..8u32 {
            let s = |b: u32| if bits >> b & 1 == 1 { 1i8 } else { -1 };
            let u = SymmetricSigns {
                n,
                values: vec![s(0), s(1), s(1), s(2)],
            };
            mean += shared_pair_average(&u) / 8.0;
        }
        let exact = shared_pair_expectation(n).to_f64().unwrap();
        assert!((mean - exact).abs() < 1e-14);
        assert_eq!(set_partitions(4).len(), 15);
    }

    #[test]
    fn expectation_tends_to_five_eighteenths() {
        let e = shared_pair_expectation(10_000).to_f64().unwrap();
        assert!((e - 5.0 / 18.0).abs() < 1e-3);
    }

    #[test]
    fn roots_demo_runs() {
        let demo = roots_of_unity_demo(6, 3, 4).unwrap();
        assert!(demo.shared_pair[0].is_finite());
        assert!(roots_of_unity_function(3, 4, 0).is_err());
    }
}
