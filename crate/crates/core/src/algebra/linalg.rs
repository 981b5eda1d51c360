//! Dense matrices over F_p, exact Gaussian elimination and subspaces.

use std::fmt;

use crate::algebra::field::{FpScalar, FpVector, Modulus};
use crate::error::{Error, Result};

/// A dense row-major matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: Modulus,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(p: Modulus, rows: usize, cols: usize) -> Self {
        Self {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: Modulus, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing mod p.
    pub fn from_rows(p: Modulus, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|&c| p.reduce(c)));
        }
        Ok(Self {
            p,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Stacks vectors as rows. `cols` is needed when the list is empty.
    pub fn from_vectors(p: Modulus, cols: usize, vectors: &[FpVector]) -> Result<Self> {
        let mut m = Self::zeros(p, vectors.len(), cols);
        for (i, v) in vectors.iter().enumerate() {
            if v.modulus() != p {
                return Err(Error::ModulusMismatch {
                    left: p.get(),
                    right: v.modulus().get(),
                });
            }
            if v.dim() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: v.dim(),
                });
            }
            m.row_mut(i).copy_from_slice(v.coords());
        }
        Ok(m)
    }

    pub fn diagonal(p: Modulus, diag: &[i64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(p, n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = p.reduce(d);
        }
        m
    }

    pub fn modulus(&self) -> Modulus {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn entry(&self, r: usize, c: usize) -> FpScalar {
        FpScalar::new(self.p, self.get(r, c) as i64)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.p.get();
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn row_mut(&mut self, r: usize) -> &mut [u32] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vector(&self, r: usize) -> FpVector {
        FpVector::new(self.p, self.row(r).to_vec())
    }

    pub fn row_vectors(&self) -> Vec<FpVector> {
        (0..self.rows).map(|r| self.row_vector(r)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        let p = self.p;
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| p.add(acc, p.mul(a, b)))
            })
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed moduli");
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let p = self.p;
        let mut out = Self::zeros(p, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    out.data[idx] = p.add(out.data[idx], p.mul(a, other.get(k, c)));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed moduli");
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let p = self.p;
        Self {
            p,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| p.add(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: u32) -> Self {
        let p = self.p;
        Self {
            p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| p.mul(a, c)).collect(),
        }
    }

    /// Reduced row echelon form and the pivot columns.
    ///
    /// Pivots are chosen as the first nonzero entry in each column, scanning
    /// rows top to bottom, so the result is deterministic.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pivot) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if pivot != row {
                for c in 0..m.cols {
                    m.data.swap(pivot * m.cols + c, row * m.cols + c);
                }
            }
            let inv = p.inv(m.get(row, col));
            for c in col..m.cols {
                let v = m.get(row, c);
                m.data[row * m.cols + c] = p.mul(v, inv);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..m.cols {
                    let sub = p.mul(factor, m.get(row, c));
                    let idx = r * m.cols + c;
                    m.data[idx] = p.sub(m.data[idx], sub);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : M x = 0}`.
    pub fn kernel(&self) -> Vec<FpVector> {
        let p = self.p;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u32; self.cols];
                v[f] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = p.neg(r.get(i, f));
                }
                FpVector::new(p, v)
            })
            .collect()
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Rank of a matrix over F_p.
pub fn rank(m: &FpMatrix) -> usize {
    m.rank()
}

/// Whether `v` lies in the F_p-span of `spanning`.
pub fn in_span(v: &FpVector, spanning: &[FpVector]) -> Result<bool> {
    if v.is_zero() {
        check_compatible(v, spanning)?;
        return Ok(true);
    }
    check_compatible(v, spanning)?;
    if spanning.is_empty() {
        return Ok(false);
    }
    let base = FpMatrix::from_vectors(v.modulus(), v.dim(), spanning)?;
    let mut with_v = spanning.to_vec();
    with_v.push(v.clone());
    let extended = FpMatrix::from_vectors(v.modulus(), v.dim(), &with_v)?;
    Ok(base.rank() == extended.rank())
}

fn check_compatible(v: &FpVector, others: &[FpVector]) -> Result<()> {
    for w in others {
        if w.modulus() != v.modulus() {
            return Err(Error::ModulusMismatch {
                left: v.modulus().get(),
                right: w.modulus().get(),
            });
        }
        if w.dim() != v.dim() {
            return Err(Error::DimensionMismatch {
                expected: v.dim(),
                found: w.dim(),
            });
        }
    }
    Ok(())
}

/// A linear or affine subspace of F_p^n: `offset + span(basis)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    p: Modulus,
    ambient: usize,
    basis: Vec<FpVector>,
    offset: Option<FpVector>,
}

impl Subspace {
    /// A linear subspace; the basis must be independent.
    pub fn linear(p: Modulus, ambient: usize, basis: Vec<FpVector>) -> Result<Self> {
        let m = FpMatrix::from_vectors(p, ambient, &basis)?;
        if m.rank() != basis.len() {
            return Err(Error::DependentBasis);
        }
        Ok(Self {
            p,
            ambient,
            basis,
            offset: None,
        })
    }

    /// Span of arbitrary vectors (a basis is extracted).
    pub fn span(p: Modulus, ambient: usize, vectors: &[FpVector]) -> Result<Self> {
        let m = FpMatrix::from_vectors(p, ambient, vectors)?;
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row_vector(i)).collect();
        Ok(Self {
            p,
            ambient,
            basis,
            offset: None,
        })
    }

    pub fn full(p: Modulus, ambient: usize) -> Self {
        Self {
            p,
            ambient,
            basis: (0..ambient).map(|i| FpVector::unit(p, ambient, i)).collect(),
            offset: None,
        }
    }

    pub fn with_offset(mut self, offset: FpVector) -> Result<Self> {
        if offset.dim() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: offset.dim(),
            });
        }
        self.offset = (!offset.is_zero()).then_some(offset);
        Ok(self)
    }

    pub fn modulus(&self) -> Modulus {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.basis.len()
    }

    pub fn basis(&self) -> &[FpVector] {
        &self.basis
    }

    pub fn offset(&self) -> Option<&FpVector> {
        self.offset.as_ref()
    }

    pub fn is_linear(&self) -> bool {
        self.offset.is_none()
    }

    pub fn contains(&self, v: &FpVector) -> Result<bool> {
        let shifted = match &self.offset {
            Some(o) => v.sub(o),
            None => v.clone(),
        };
        in_span(&shifted, &self.basis)
    }

    /// All `p^dim` elements in base-p order of the coefficient vector.
    pub fn elements(&self) -> Vec<FpVector> {
        let p = self.p;
        let k = self.basis.len();
        let count = (p.get() as usize).pow(k as u32);
        let mut out = Vec::with_capacity(count);
        let mut coeffs = vec![0u32; k];
        for _ in 0..count {
            let mut v = self
                .offset
                .clone()
                .unwrap_or_else(|| FpVector::zeros(p, self.ambient));
            for (c, b) in coeffs.iter().zip(&self.basis) {
                if *c != 0 {
                    v = v.add(&b.scale(*c));
                }
            }
            out.push(v);
            for c in coeffs.iter_mut().rev() {
                *c += 1;
                if *c < p.get() {
                    break;
                }
                *c = 0;
            }
        }
        out
    }
}

/// Solution set of `M x = rhs`, or `None` if the system is inconsistent.
pub fn solve_affine(m: &FpMatrix, rhs: &FpVector) -> Result<Option<Subspace>> {
    if rhs.dim() != m.rows() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: rhs.dim(),
        });
    }
    let p = m.modulus();
    let n = m.cols();
    let mut aug = FpMatrix::zeros(p, m.rows(), n + 1);
    for r in 0..m.rows() {
        for c in 0..n {
            aug.set(r, c, m.get(r, c));
        }
        aug.set(r, n, rhs.coords()[r]);
    }
    let (red, pivots) = aug.rref();
    if pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut particular = vec![0u32; n];
    for (i, &pc) in pivots.iter().enumerate() {
        particular[pc] = red.get(i, n);
    }
    let kernel = m.kernel();
    let sub = Subspace {
        p,
        ambient: n,
        basis: kernel,
        offset: None,
    };
    sub.with_offset(FpVector::new(p, particular)).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u32) -> Modulus {
        Modulus::new(v).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&FpMatrix::identity(p(5), 3)), 3);
        assert_eq!(rank(&FpMatrix::zeros(p(5), 3, 4)), 0);
        let m = FpMatrix::from_rows(p(5), &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn in_span_examples() {
        let q = p(5);
        let e = |a, b| FpVector::from_i64(q, &[a, b]);
        assert!(in_span(&e(1, 1), &[e(1, 0), e(0, 1)]).unwrap());
        assert!(!in_span(&e(1, 0), &[]).unwrap());
        assert!(in_span(&e(2, 4), &[e(1, 2)]).unwrap());
        assert!(!in_span(&e(1, 0), &[e(1, 2)]).unwrap());
    }

    #[test]
    fn in_span_rejects_dimension_mismatch() {
        let q = p(5);
        let v = FpVector::from_i64(q, &[1, 0]);
        let w = FpVector::from_i64(q, &[1, 0, 0]);
        assert!(matches!(
            in_span(&v, &[w]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = FpMatrix::from_rows(p(7), &[vec![1, 2, 3, 4], vec![2, 4, 6, 1]]).unwrap();
        let ker = m.kernel();
        assert_eq!(ker.len(), 4 - m.rank());
        for v in ker {
            assert!(m.mul_vec(v.coords()).iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn solve_affine_examples() {
        let q = p(5);
        let v = FpVector::from_i64(q, &[3, 1, 4]);
        let sol = solve_affine(&FpMatrix::identity(q, 3), &v).unwrap().unwrap();
        assert_eq!(sol.dim(), 0);
        assert_eq!(sol.offset(), Some(&v));

        let zero = FpMatrix::zeros(q, 2, 2);
        assert!(solve_affine(&zero, &FpVector::from_i64(q, &[1, 0]))
            .unwrap()
            .is_none());

        let m = FpMatrix::from_rows(q, &[vec![1, 2], vec![2, 4]]).unwrap();
        let line = solve_affine(&m, &FpVector::from_i64(q, &[1, 2]))
            .unwrap()
            .unwrap();
        assert_eq!(line.dim(), 1);
        for x in line.elements() {
            assert_eq!(m.mul_vec(x.coords()), vec![1, 2]);
        }
    }

    #[test]
    fn subspace_elements_enumerate_the_span() {
        let q = p(3);
        let s = Subspace::linear(
            q,
            3,
            vec![
                FpVector::from_i64(q, &[1, 1, 0]),
                FpVector::from_i64(q, &[0, 1, 1]),
            ],
        )
        .unwrap();
        let elems = s.elements();
        assert_eq!(elems.len(), 9);
        let mut uniq = elems.clone();
        uniq.sort_by(|a, b| a.coords().cmp(b.coords()));
        uniq.dedup();
        assert_eq!(uniq.len(), 9);
        assert!(elems.iter().all(|e| s.contains(e).unwrap()));
    }

    #[test]
    fn dependent_basis_rejected() {
        let q = p(5);
        let v = FpVector::from_i64(q, &[1, 2]);
        assert_eq!(
            Subspace::linear(q, 2, vec![v.clone(), v.scale(3)]),
            Err(Error::DependentBasis)
        );
    }
}
