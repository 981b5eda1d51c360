//! Seeded random instances for experiments and property runs.

use rand::Rng;

use crate::algebra::{FpMatrix, FpVector, Modulus, QuadraticForm};
use crate::error::Result;
use crate::systems::LinearFormSystem;
use crate::verification::{QuadraticFactor, QuadraticMap};

pub fn random_vector<R: Rng + ?Sized>(p: Modulus, n: usize, rng: &mut R) -> FpVector {
    FpVector::new(p, (0..n).map(|_| rng.random_range(0..p.get())).collect())
}

pub fn random_matrix<R: Rng + ?Sized>(p: Modulus, rows: usize, cols: usize, rng: &mut R) -> FpMatrix {
    let mut m = FpMatrix::zeros(p, rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, rng.random_range(0..p.get()));
        }
    }
    m
}

/// Random quadratic form, symmetric part and linear part both uniform.
pub fn random_quadratic_form<R: Rng + ?Sized>(p: Modulus, n: usize, linear: bool, rng: &mut R) -> QuadraticForm {
    let mut m = FpMatrix::zeros(p, n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(0..p.get());
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    let b = if linear { random_vector(p, n, rng) } else { FpVector::zeros(p, n) };
    QuadraticForm::new(m, b).expect("square symmetric matrix")
}

/// Uniform surjective `rows × cols` matrix, by rejection.
pub fn random_surjection<R: Rng + ?Sized>(p: Modulus, rows: usize, cols: usize, rng: &mut R) -> FpMatrix {
    assert!(rows <= cols, "a surjection needs rows ≤ cols");
    loop {
        let m = random_matrix(p, rows, cols, rng);
        if m.rank() == rows {
            return m;
        }
    }
}

/// Random factor with `d1` linear and `d2` quadratic coordinates.
pub fn random_factor<R: Rng + ?Sized>(p: Modulus, n: usize, d1: usize, d2: usize, rng: &mut R) -> Result<QuadraticFactor> {
    let gamma1 = random_surjection(p, d1, n, rng);
    let forms = (0..d2).map(|_| random_quadratic_form(p, n, true, rng)).collect();
    QuadraticFactor::new(gamma1, QuadraticMap::new(p, n, forms)?)
}

/// Random system of `m` nonzero forms in `d` variables.
pub fn random_system<R: Rng + ?Sized>(p: Modulus, d: usize, m: usize, rng: &mut R) -> Result<LinearFormSystem> {
    let rows: Vec<Vec<i64>> = (0..m)
        .map(|_| loop {
            let row: Vec<i64> = (0..d).map(|_| rng.random_range(0..p.get()) as i64).collect();
            if row.iter().any(|&c| c != 0) {
                break row;
            }
        })
        .collect();
    LinearFormSystem::new(p, d, &rows)
}
