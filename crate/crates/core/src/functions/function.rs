//! Dense functions on F_p^n.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::Modulus;
use crate::error::{Error, Result};
use crate::functions::domain::GroupDomain;

/// Slack used when checking `‖f‖_∞ ≤ 1` on floating-point tables.
pub const BOUNDED_SLACK: f64 = 1e-12;

/// Largest domain on which exact-rational tables are allowed.
pub const EXACT_DOMAIN_LIMIT: usize = 10_000;

/// A complex-valued function on F_p^n, stored in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupFunction {
    domain: GroupDomain,
    values: Vec<Complex64>,
}

impl GroupFunction {
    pub fn new(domain: GroupDomain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != domain.size() {
            return Err(Error::DimensionMismatch {
                expected: domain.size(),
                found: values.len(),
            });
        }
        Ok(Self { domain, values })
    }

    pub fn from_real(domain: GroupDomain, values: Vec<f64>) -> Result<Self> {
        Self::new(domain, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(domain: GroupDomain, c: Complex64) -> Self {
        Self {
            domain,
            values: vec![c; domain.size()],
        }
    }

    pub fn from_fn(domain: GroupDomain, mut f: impl FnMut(&[u32]) -> Complex64) -> Self {
        let values = (0..domain.size()).map(|i| f(&domain.coords(i))).collect();
        Self { domain, values }
    }

    /// The character `x ↦ ω^{sᵀx}`.
    pub fn character(domain: GroupDomain, s: &[u32]) -> Self {
        let p = domain.modulus();
        let roots = roots_of_unity(p);
        Self::from_fn(domain, |x| {
            let e = x.iter().zip(s).fold(0, |acc, (&a, &b)| p.add(acc, p.mul(a, b)));
            roots[e as usize]
        })
    }

    pub fn domain(&self) -> &GroupDomain {
        &self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, index: usize) -> Complex64 {
        self.values[index]
    }

    pub fn at(&self, coords: &[u32]) -> Complex64 {
        self.values[self.domain.index(coords)]
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn real_values(&self) -> Result<Vec<f64>> {
        if !self.is_real() {
            return Err(Error::NotReal);
        }
        Ok(self.values.iter().map(|v| v.re).collect())
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `‖f‖_2 = (E|f|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64).sqrt()
    }

    /// `‖f‖_1 = E|f|`.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() / self.values.len() as f64
    }

    /// Errors unless `‖f‖_∞ ≤ 1`.
    pub fn ensure_bounded(&self) -> Result<()> {
        let sup = self.sup_norm();
        if sup > 1.0 + BOUNDED_SLACK {
            return Err(Error::Unbounded { value: sup });
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            domain: self.domain,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        same_domain(&self.domain, &other.domain)?;
        Ok(Self {
            domain: self.domain,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Largest pointwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn same_domain(a: &GroupDomain, b: &GroupDomain) -> Result<()> {
    if a != b {
        return Err(Error::InvalidArgument(format!(
            "functions live on different domains ({}^{} vs {}^{})",
            a.modulus(),
            a.dim(),
            b.modulus(),
            b.dim()
        )));
    }
    Ok(())
}

/// `ω^t = exp(2πi t / p)` for `t ∈ [0, p)`.
pub fn roots_of_unity(p: Modulus) -> Vec<Complex64> {
    let p = p.get();
    (0..p)
        .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / p as f64))
        .collect()
}

/// A subset `A ⊆ F_p^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicatorSet {
    domain: GroupDomain,
    members: Vec<bool>,
}

impl IndicatorSet {
    pub fn new(domain: GroupDomain, members: Vec<bool>) -> Result<Self> {
        if members.len() != domain.size() {
            return Err(Error::DimensionMismatch {
                expected: domain.size(),
                found: members.len(),
            });
        }
        Ok(Self { domain, members })
    }

    pub fn from_predicate(domain: GroupDomain, mut pred: impl FnMut(&[u32]) -> bool) -> Self {
        let members = (0..domain.size()).map(|i| pred(&domain.coords(i))).collect();
        Self { domain, members }
    }

    pub fn from_points(domain: GroupDomain, points: &[Vec<u32>]) -> Result<Self> {
        let p = domain.modulus().get();
        let mut members = vec![false; domain.size()];
        for pt in points {
            if pt.len() != domain.dim() {
                return Err(Error::DimensionMismatch {
                    expected: domain.dim(),
                    found: pt.len(),
                });
            }
            if let Some(&bad) = pt.iter().find(|&&c| c >= p) {
                return Err(Error::InvalidArgument(format!("coordinate {bad} is not reduced mod {p}")));
            }
            members[domain.index(pt)] = true;
        }
        Ok(Self { domain, members })
    }

    pub fn full(domain: GroupDomain) -> Self {
        Self {
            domain,
            members: vec![true; domain.size()],
        }
    }

    pub fn empty(domain: GroupDomain) -> Self {
        Self {
            domain,
            members: vec![false; domain.size()],
        }
    }

    pub fn domain(&self) -> &GroupDomain {
        &self.domain
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members[index]
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    /// `α = |A| / N`, exactly.
    pub fn density_exact(&self) -> BigRational {
        BigRational::new(BigInt::from(self.count()), BigInt::from(self.domain.size()))
    }

    pub fn density(&self) -> f64 {
        self.count() as f64 / self.domain.size() as f64
    }

    pub fn points(&self) -> Vec<Vec<u32>> {
        (0..self.domain.size())
            .filter(|&i| self.members[i])
            .map(|i| self.domain.coords(i))
            .collect()
    }

    pub fn indicator(&self) -> GroupFunction {
        GroupFunction {
            domain: self.domain,
            values: self
                .members
                .iter()
                .map(|&m| Complex64::new(if m { 1.0 } else { 0.0 }, 0.0))
                .collect(),
        }
    }
}

/// The balanced function `A − α`.
pub fn balanced(a: &IndicatorSet) -> GroupFunction {
    let alpha = a.density_exact();
    let exact = ExactFunction::from_indicator(a).shift(&-alpha);
    exact.to_float()
}

/// An exact rational-valued function, the oracle for floating-point identities.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactFunction {
    domain: GroupDomain,
    values: Vec<BigRational>,
}

impl ExactFunction {
    pub fn new(domain: GroupDomain, values: Vec<BigRational>) -> Result<Self> {
        if domain.size() > EXACT_DOMAIN_LIMIT {
            return Err(Error::InvalidArgument(format!(
                "exact tables are limited to {EXACT_DOMAIN_LIMIT} points"
            )));
        }
        if values.len() != domain.size() {
            return Err(Error::DimensionMismatch {
                expected: domain.size(),
                found: values.len(),
            });
        }
        Ok(Self { domain, values })
    }

    pub fn from_indicator(a: &IndicatorSet) -> Self {
        Self {
            domain: a.domain,
            values: a
                .members
                .iter()
                .map(|&m| BigRational::from_integer(BigInt::from(m as u8)))
                .collect(),
        }
    }

    pub fn domain(&self) -> &GroupDomain {
        &self.domain
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn shift(&self, c: &BigRational) -> Self {
        Self {
            domain: self.domain,
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    pub fn mean(&self) -> BigRational {
        let total = self.values.iter().fold(BigRational::zero(), |acc, v| acc + v);
        total / BigInt::from(self.values.len())
    }

    pub fn to_float(&self) -> GroupFunction {
        GroupFunction {
            domain: self.domain,
            values: self
                .values
                .iter()
                .map(|v| Complex64::new(v.to_f64().unwrap_or(f64::NAN), 0.0))
                .collect(),
        }
    }
}

/// Exact balanced function `A − α`.
pub fn balanced_exact(a: &IndicatorSet) -> ExactFunction {
    ExactFunction::from_indicator(a).shift(&-a.density_exact())
}

/// On-disk function formats.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum FunctionFile {
    /// `values[i] = [re, im]` in lexicographic order.
    Complex { p: u32, n: usize, values: Vec<[f64; 2]> },
    /// Values written as `"a/b"` or `"a"`.
    Rational { p: u32, n: usize, values: Vec<String> },
    /// Member points of a set.
    Indicator { p: u32, n: usize, members: Vec<Vec<u32>> },
}

/// Parsed contents of a function file.
#[derive(Clone, Debug)]
pub enum LoadedFunction {
    Complex(GroupFunction),
    Rational(ExactFunction),
    Indicator(IndicatorSet),
}

impl LoadedFunction {
    pub fn to_float(&self) -> GroupFunction {
        match self {
            LoadedFunction::Complex(f) => f.clone(),
            LoadedFunction::Rational(f) => f.to_float(),
            LoadedFunction::Indicator(a) => a.indicator(),
        }
    }
}

impl FunctionFile {
    pub fn load(&self) -> Result<LoadedFunction> {
        match self {
            FunctionFile::Complex { p, n, values } => {
                let domain = GroupDomain::new(Modulus::new(*p)?, *n)?;
                let values = values.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                Ok(LoadedFunction::Complex(GroupFunction::new(domain, values)?))
            }
            FunctionFile::Rational { p, n, values } => {
                let domain = GroupDomain::new(Modulus::new(*p)?, *n)?;
                let values = values.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
                Ok(LoadedFunction::Rational(ExactFunction::new(domain, values)?))
            }
            FunctionFile::Indicator { p, n, members } => {
                let domain = GroupDomain::new(Modulus::new(*p)?, *n)?;
                Ok(LoadedFunction::Indicator(IndicatorSet::from_points(domain, members)?))
            }
        }
    }

    pub fn from_function(f: &GroupFunction) -> Self {
        FunctionFile::Complex {
            p: f.domain.modulus().get(),
            n: f.domain.dim(),
            values: f.values.iter().map(|v| [v.re, v.im]).collect(),
        }
    }

    pub fn from_exact(f: &ExactFunction) -> Self {
        FunctionFile::Rational {
            p: f.domain.modulus().get(),
            n: f.domain.dim(),
            values: f.values.iter().map(|v| v.to_string()).collect(),
        }
    }

    pub fn from_set(a: &IndicatorSet) -> Self {
        FunctionFile::Indicator {
            p: a.domain.modulus().get(),
            n: a.domain.dim(),
            members: a.points(),
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("`{s}` is not a rational number"));
    let s = s.trim();
    match s.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(num, den))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Uniformly random ±1 values.
pub fn random_signs<R: Rng + ?Sized>(domain: GroupDomain, rng: &mut R) -> GroupFunction {
    let values = (0..domain.size())
        .map(|_| Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0))
        .collect();
    GroupFunction { domain, values }
}

/// Uniform real values in `[-1, 1]`.
pub fn random_bounded_real<R: Rng + ?Sized>(domain: GroupDomain, rng: &mut R) -> GroupFunction {
    let values = (0..domain.size())
        .map(|_| Complex64::new(rng.random_range(-1.0..=1.0), 0.0))
        .collect();
    GroupFunction { domain, values }
}

/// Complex values of modulus at most one.
pub fn random_bounded_complex<R: Rng + ?Sized>(domain: GroupDomain, rng: &mut R) -> GroupFunction {
    let values = (0..domain.size())
        .map(|_| {
            let r: f64 = rng.random_range(0.0..=1.0);
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(r, theta)
        })
        .collect();
    GroupFunction { domain, values }
}
