//! The group F_p^n with a fixed base-p lexicographic enumeration.

use serde::Serialize;

use crate::algebra::Modulus;
use crate::error::{Error, Result};

/// Largest domain for which a full addition table is materialised.
const ADD_TABLE_LIMIT: usize = 4096;

/// Points are indexed by `Σ_j x_j p^{n-1-j}`: the first coordinate is the
/// most significant digit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupDomain {
    p: Modulus,
    n: usize,
    #[serde(skip)]
    size: usize,
}

impl GroupDomain {
    pub fn new(p: Modulus, n: usize) -> Result<Self> {
        let size = (p.get() as usize)
            .checked_pow(n as u32)
            .filter(|&s| s <= u32::MAX as usize)
            .ok_or_else(|| Error::InvalidArgument(format!("{p}^{n} points do not fit in memory indexing")))?;
        Ok(Self { p, n, size })
    }

    pub fn modulus(&self) -> Modulus {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `N = p^n`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn coords(&self, mut index: usize) -> Vec<u32> {
        let p = self.p.get() as usize;
        let mut out = vec![0u32; self.n];
        for slot in out.iter_mut().rev() {
            *slot = (index % p) as u32;
            index /= p;
        }
        out
    }

    pub fn index(&self, coords: &[u32]) -> usize {
        let p = self.p.get() as usize;
        coords.iter().fold(0, |acc, &c| acc * p + (c as usize % p))
    }

    pub fn dot(&self, a: usize, b: usize) -> u32 {
        let p = self.p;
        self.coords(a)
            .iter()
            .zip(self.coords(b))
            .fold(0, |acc, (&x, y)| p.add(acc, p.mul(x, y)))
    }

    /// Precomputed group operations for hot loops.
    pub fn arith(&self) -> GroupArith {
        GroupArith::new(*self)
    }
}

/// Addition, negation and scalar multiplication on point indices.
#[derive(Clone, Debug)]
pub struct GroupArith {
    domain: GroupDomain,
    add: Option<Vec<u32>>,
    neg: Vec<u32>,
    scalar: Vec<u32>,
    place: Vec<usize>,
}

impl GroupArith {
    fn new(domain: GroupDomain) -> Self {
        let size = domain.size;
        let p = domain.p;
        let place: Vec<usize> = (0..domain.n)
            .map(|j| (p.get() as usize).pow((domain.n - 1 - j) as u32))
            .collect();
        let mut arith = Self {
            domain,
            add: None,
            neg: Vec::new(),
            scalar: Vec::new(),
            place,
        };
        arith.neg = (0..size).map(|a| arith.scale_digits(a, p.get() - 1) as u32).collect();
        arith.scalar = (0..p.get())
            .flat_map(|c| (0..size).map(move |a| (c, a)))
            .map(|(c, a)| arith.scale_digits(a, c) as u32)
            .collect();
        if size <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; size * size];
            for a in 0..size {
                for b in a..size {
                    let s = arith.add_digits(a, b) as u32;
                    table[a * size + b] = s;
                    table[b * size + a] = s;
                }
            }
            arith.add = Some(table);
        }
        arith
    }

    pub fn domain(&self) -> &GroupDomain {
        &self.domain
    }

    fn add_digits(&self, a: usize, b: usize) -> usize {
        let p = self.domain.p.get() as usize;
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.domain.n {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    fn scale_digits(&self, a: usize, c: u32) -> usize {
        let p = self.domain.p.get() as usize;
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.domain.n {
            out += ((a % p) * c as usize % p) * place;
            a /= p;
            place *= p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        match &self.add {
            Some(t) => t[a * self.domain.size + b] as usize,
            None => self.add_digits(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// `c · a` for a scalar `c ∈ F_p`.
    #[inline]
    pub fn scale(&self, c: u32, a: usize) -> usize {
        self.scalar[c as usize * self.domain.size + a] as usize
    }

    /// Index contribution of coordinate `j` holding value `v`.
    #[inline]
    pub fn place(&self, j: usize, v: u32) -> usize {
        self.place[j] * v as usize
    }
}
