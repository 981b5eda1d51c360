//! Prime-field scalars and vectors.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An odd prime modulus `p`.
///
/// Every field object carries its modulus; arithmetic between objects with
/// different moduli is a programming error and panics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Modulus(u32);

impl Modulus {
    pub fn new(p: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidModulus(p as u64));
        }
        Ok(Self(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    /// Reduces a signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        let p = self.0 as u64;
        (if s >= p { s - p } else { s }) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.0 as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.0 != 0, "inverse of zero mod {}", self.0);
        self.pow(a, self.0 as u64 - 2)
    }

    /// Signed representative in `(-p/2, p/2]`.
    pub fn centered(self, a: u32) -> i64 {
        let a = a as i64;
        let p = self.0 as i64;
        if a > p / 2 {
            a - p
        } else {
            a
        }
    }
}

impl TryFrom<u32> for Modulus {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        Self::new(p)
    }
}

impl From<Modulus> for u32 {
    fn from(m: Modulus) -> u32 {
        m.0
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u32,
    p: Modulus,
}

impl FpScalar {
    pub fn new(p: Modulus, value: i64) -> Self {
        Self {
            value: p.reduce(value),
            p,
        }
    }

    pub fn zero(p: Modulus) -> Self {
        Self { value: 0, p }
    }

    pub fn one(p: Modulus) -> Self {
        Self { value: 1, p }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> Modulus {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<Self> {
        (!self.is_zero()).then(|| Self {
            value: self.p.inv(self.value),
            p: self.p,
        })
    }

    pub fn pow(self, exp: u64) -> Self {
        Self {
            value: self.p.pow(self.value, exp),
            p: self.p,
        }
    }

    fn same_field(self, other: Self) -> Modulus {
        assert_eq!(self.p, other.p, "mixed moduli");
        self.p
    }
}

impl Add for FpScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let p = self.same_field(rhs);
        Self {
            value: p.add(self.value, rhs.value),
            p,
        }
    }
}

impl Sub for FpScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let p = self.same_field(rhs);
        Self {
            value: p.sub(self.value, rhs.value),
            p,
        }
    }
}

impl Mul for FpScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let p = self.same_field(rhs);
        Self {
            value: p.mul(self.value, rhs.value),
            p,
        }
    }
}

impl Neg for FpScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: self.p.neg(self.value),
            p: self.p,
        }
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A vector in F_p^n. Coordinates are stored reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpVector {
    p: Modulus,
    coords: Vec<u32>,
}

impl FpVector {
    pub fn new(p: Modulus, coords: Vec<u32>) -> Self {
        let coords = coords.into_iter().map(|c| c % p.get()).collect();
        Self { p, coords }
    }

    pub fn from_i64(p: Modulus, coords: &[i64]) -> Self {
        Self {
            p,
            coords: coords.iter().map(|&c| p.reduce(c)).collect(),
        }
    }

    pub fn zeros(p: Modulus, n: usize) -> Self {
        Self {
            p,
            coords: vec![0; n],
        }
    }

    pub fn unit(p: Modulus, n: usize, i: usize) -> Self {
        let mut v = Self::zeros(p, n);
        v.coords[i] = 1;
        v
    }

    pub fn modulus(&self) -> Modulus {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn get(&self, i: usize) -> FpScalar {
        FpScalar {
            value: self.coords[i],
            p: self.p,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn dot(&self, other: &Self) -> u32 {
        assert_eq!(self.p, other.p, "mixed moduli");
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let p = self.p;
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(0, |acc, (&a, &b)| p.add(acc, p.mul(a, b)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed moduli");
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let p = self.p;
        Self {
            p,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| p.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(p_minus_one(self.p)))
    }

    pub fn scale(&self, c: u32) -> Self {
        let p = self.p;
        Self {
            p,
            coords: self.coords.iter().map(|&a| p.mul(a, c)).collect(),
        }
    }

    pub fn into_coords(self) -> Vec<u32> {
        self.coords
    }
}

fn p_minus_one(p: Modulus) -> u32 {
    p.get() - 1
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
