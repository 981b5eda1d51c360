//! Quadratic forms `q(x) = xᵀ M x + bᵀ x` and symmetric bilinear forms over F_p.

use crate::algebra::field::{FpVector, Modulus};
use crate::algebra::linalg::{FpMatrix, Subspace};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    m: FpMatrix,
    b: FpVector,
}

impl QuadraticForm {
    pub fn new(m: FpMatrix, b: FpVector) -> Result<Self> {
        if !m.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if b.dim() != m.rows() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: b.dim(),
            });
        }
        if b.modulus() != m.modulus() {
            return Err(Error::ModulusMismatch {
                left: m.modulus().get(),
                right: b.modulus().get(),
            });
        }
        Ok(Self { m, b })
    }

    /// Purely quadratic form `xᵀ M x`.
    pub fn homogeneous(m: FpMatrix) -> Result<Self> {
        let b = FpVector::zeros(m.modulus(), m.rows());
        Self::new(m, b)
    }

    /// `η · xᵀ x` on F_p^n.
    pub fn scaled_dot(p: Modulus, n: usize, eta: i64) -> Self {
        let m = FpMatrix::identity(p, n).scale(p.reduce(eta));
        Self {
            m,
            b: FpVector::zeros(p, n),
        }
    }

    pub fn zero(p: Modulus, n: usize) -> Self {
        Self {
            m: FpMatrix::zeros(p, n, n),
            b: FpVector::zeros(p, n),
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.m.modulus()
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &FpMatrix {
        &self.m
    }

    pub fn linear_part(&self) -> &FpVector {
        &self.b
    }

    pub fn rank(&self) -> usize {
        self.m.rank()
    }

    pub fn eval(&self, x: &[u32]) -> u32 {
        assert_eq!(x.len(), self.dim(), "dimension mismatch");
        let p = self.modulus();
        let mx = self.m.mul_vec(x);
        let quad = x
            .iter()
            .zip(&mx)
            .fold(0, |acc, (&a, &b)| p.add(acc, p.mul(a, b)));
        let lin = x
            .iter()
            .zip(self.b.coords())
            .fold(0, |acc, (&a, &b)| p.add(acc, p.mul(a, b)));
        p.add(quad, lin)
    }

    /// `Σ λ_i q_i` for forms on a common space.
    pub fn combination(forms: &[QuadraticForm], lambda: &[u32]) -> Result<Self> {
        let first = forms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty combination".into()))?;
        if lambda.len() != forms.len() {
            return Err(Error::DimensionMismatch {
                expected: forms.len(),
                found: lambda.len(),
            });
        }
        let p = first.modulus();
        let n = first.dim();
        let mut m = FpMatrix::zeros(p, n, n);
        let mut b = FpVector::zeros(p, n);
        for (q, &l) in forms.iter().zip(lambda) {
            if q.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: q.dim(),
                });
            }
            if l != 0 {
                m = m.add(&q.m.scale(l));
                b = b.add(&q.b.scale(l));
            }
        }
        Ok(Self { m, b })
    }
}

/// A symmetric bilinear form `β(x, y) = xᵀ B y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricBilinearForm {
    b: FpMatrix,
}

impl SymmetricBilinearForm {
    pub fn new(b: FpMatrix) -> Result<Self> {
        if !b.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(Self { b })
    }

    pub fn matrix(&self) -> &FpMatrix {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.b.rows()
    }

    pub fn rank(&self) -> usize {
        self.b.rank()
    }

    pub fn eval(&self, x: &[u32], y: &[u32]) -> u32 {
        let p = self.b.modulus();
        let by = self.b.mul_vec(y);
        x.iter()
            .zip(&by)
            .fold(0, |acc, (&a, &b)| p.add(acc, p.mul(a, b)))
    }
}

/// Polarization `β(x,y) = (q(x+y) − q(x) − q(y)) / 2`.
///
/// For `q(x) = xᵀ M x + bᵀ x` this is `xᵀ M y`: the linear part cancels and the
/// halving is exact because the modulus is odd.
pub fn bilinear_of(q: &QuadraticForm) -> SymmetricBilinearForm {
    SymmetricBilinearForm { b: q.m.clone() }
}

/// Restriction of `β` to a linear subspace `W`, written in the basis of `W`.
pub fn restrict(beta: &SymmetricBilinearForm, w: &Subspace) -> Result<SymmetricBilinearForm> {
    if !w.is_linear() {
        return Err(Error::AffineSubspace);
    }
    if w.ambient_dim() != beta.dim() {
        return Err(Error::DimensionMismatch {
            expected: beta.dim(),
            found: w.ambient_dim(),
        });
    }
    let p = beta.b.modulus();
    let k = w.dim();
    let mut out = FpMatrix::zeros(p, k, k);
    for (i, wi) in w.basis().iter().enumerate() {
        for (j, wj) in w.basis().iter().enumerate().skip(i) {
            let v = beta.eval(wi.coords(), wj.coords());
            out.set(i, j, v);
            out.set(j, i, v);
        }
    }
    Ok(SymmetricBilinearForm { b: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::FpVector;

    fn p5() -> Modulus {
        Modulus::new(5).unwrap()
    }

    /// Polarization evaluated straight from the definition.
    fn polarize(q: &QuadraticForm, x: &[u32], y: &[u32]) -> u32 {
        let p = q.modulus();
        let sum: Vec<u32> = x.iter().zip(y).map(|(&a, &b)| p.add(a, b)).collect();
        let num = p.sub(p.sub(q.eval(&sum), q.eval(x)), q.eval(y));
        p.mul(num, p.inv(2))
    }

    fn all_points(p: Modulus, n: usize) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..p.get()).map(move |c| {
                        let mut w = v.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn polarization_of_dot_is_identity() {
        let q = QuadraticForm::scaled_dot(p5(), 2, 1);
        assert_eq!(bilinear_of(&q).matrix(), &FpMatrix::identity(p5(), 2));
    }

    #[test]
    fn linear_part_vanishes_under_polarization() {
        let p = p5();
        let q = QuadraticForm::new(FpMatrix::zeros(p, 2, 2), FpVector::from_i64(p, &[1, 3])).unwrap();
        assert!(bilinear_of(&q).matrix().is_zero());
    }

    #[test]
    fn off_diagonal_example_matches_definition() {
        let p = p5();
        let m = FpMatrix::from_rows(p, &[vec![0, 1], vec![1, 0]]).unwrap();
        let q = QuadraticForm::homogeneous(m.clone()).unwrap();
        assert_eq!(q.eval(&[2, 3]), p.mul(2, p.mul(2, 3)));
        let beta = bilinear_of(&q);
        assert_eq!(beta.matrix(), &m);
        for x in all_points(p, 2) {
            for y in all_points(p, 2) {
                assert_eq!(beta.eval(&x, &y), polarize(&q, &x, &y));
            }
        }
    }

    #[test]
    fn polarization_matches_definition_with_linear_part() {
        let p = Modulus::new(7).unwrap();
        let m = FpMatrix::from_rows(p, &[vec![1, 2, 0], vec![2, 3, 5], vec![0, 5, 6]]).unwrap();
        let q = QuadraticForm::new(m, FpVector::from_i64(p, &[4, 0, 1])).unwrap();
        let beta = bilinear_of(&q);
        let pts = all_points(p, 3);
        for x in pts.iter().step_by(5) {
            for y in pts.iter().step_by(7) {
                assert_eq!(beta.eval(x, y), polarize(&q, x, y));
            }
        }
    }

    #[test]
    fn non_symmetric_matrix_rejected() {
        let m = FpMatrix::from_rows(p5(), &[vec![0, 1], vec![0, 0]]).unwrap();
        assert_eq!(QuadraticForm::homogeneous(m), Err(Error::NotSymmetric));
    }

    #[test]
    fn restrict_examples() {
        let p = p5();
        let beta = SymmetricBilinearForm::new(FpMatrix::identity(p, 4)).unwrap();
        let w = Subspace::linear(p, 4, vec![FpVector::unit(p, 4, 0), FpVector::unit(p, 4, 1)]).unwrap();
        let r = restrict(&beta, &w).unwrap();
        assert_eq!(r.matrix(), &FpMatrix::identity(p, 2));
        assert_eq!(r.rank(), 2);

        let full = restrict(&beta, &Subspace::full(p, 4)).unwrap();
        assert_eq!(full.rank(), 4);
    }

    #[test]
    fn restrict_rejects_affine_subspace() {
        let p = p5();
        let beta = SymmetricBilinearForm::new(FpMatrix::identity(p, 2)).unwrap();
        let w = Subspace::linear(p, 2, vec![FpVector::unit(p, 2, 0)])
            .unwrap()
            .with_offset(FpVector::unit(p, 2, 1))
            .unwrap();
        assert_eq!(restrict(&beta, &w), Err(Error::AffineSubspace));
    }

    #[test]
    fn codim_one_restriction_of_identity() {
        // W = {x : x_0 + 2 x_3 + x_5 = 0} in F_5^6.
        let p = p5();
        let normal = FpMatrix::from_rows(p, &[vec![1, 0, 0, 2, 0, 1]]).unwrap();
        let w = Subspace::linear(p, 6, normal.kernel()).unwrap();
        assert_eq!(w.codim(), 1);
        let beta = SymmetricBilinearForm::new(FpMatrix::identity(p, 6)).unwrap();
        assert!(restrict(&beta, &w).unwrap().rank() >= 4);
    }
}
