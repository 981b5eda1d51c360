//! Systems of linear forms `L = (L_1, …, L_m)` in `d` variables and their
//! complexity invariants.
//!
//! Forms and variables are indexed from zero throughout the API.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{in_span, FpMatrix, FpVector, Modulus, Subspace};
use crate::error::{Error, Result};

/// Largest system the exact partition search accepts.
pub const MAX_PARTITION_FORMS: usize = 12;

/// A nonzero linear form `Σ_u c_u x_u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearForm {
    coeffs: FpVector,
}

impl LinearForm {
    pub fn new(coeffs: FpVector) -> Result<Self> {
        if coeffs.is_zero() {
            return Err(Error::InvalidSystem("linear form is identically zero".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &FpVector {
        &self.coeffs
    }

    pub fn vars(&self) -> usize {
        self.coeffs.dim()
    }

    /// Indices of the variables the form depends on.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs
            .coords()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(u, _)| u)
            .collect()
    }

    pub fn is_multiple_of(&self, other: &LinearForm) -> bool {
        in_span(&self.coeffs, std::slice::from_ref(&other.coeffs)).unwrap_or(false)
    }
}

/// CS-complexity, which may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Complexity {
    Finite(usize),
    Infinite,
}

impl Complexity {
    pub fn finite(self) -> Option<usize> {
        match self {
            Complexity::Finite(s) => Some(s),
            Complexity::Infinite => None,
        }
    }
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Complexity::Finite(s) => write!(f, "{s}"),
            Complexity::Infinite => write!(f, "infinite"),
        }
    }
}

impl Serialize for Complexity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Complexity::Finite(v) => s.serialize_u64(*v as u64),
            Complexity::Infinite => s.serialize_str("infinite"),
        }
    }
}

/// Fingerprint sets `τ_i ⊆ σ_i`, one per form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalFormWitness {
    pub tau: Vec<Vec<usize>>,
}

/// Linear relations `μ` with `Σ μ_i L_i = 0`.
#[derive(Clone, Debug)]
pub struct RelationSpace {
    /// Subspace `W ⊆ F_p^m`.
    pub relations: Subspace,
    /// Dimension `d'` of the span of the forms; `dim W + d' = m`.
    pub linear_rank: usize,
}

/// On-disk representation of a system.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemFile {
    pub p: u32,
    pub d: usize,
    pub forms: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFormSystem {
    p: Modulus,
    d: usize,
    forms: Vec<LinearForm>,
}

/// Names of the built-in systems.
pub const BUILTIN_SYSTEMS: &[&str] = &[
    "ap3", "ap4", "ap5", "diff3", "gw6a", "gw6b", "cube7", "nf4",
];

impl LinearFormSystem {
    /// Builds a system from signed coefficient rows.
    ///
    /// Every coefficient must satisfy `|c| < p`; a modulus that is too small
    /// to separate the integer coefficients is rejected rather than reduced.
    pub fn new(p: Modulus, d: usize, rows: &[Vec<i64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidSystem("a system needs at least one form".into()));
        }
        if d == 0 {
            return Err(Error::InvalidSystem("a system needs at least one variable".into()));
        }
        let mut forms = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            if let Some(&c) = row.iter().find(|c| c.unsigned_abs() >= p.get() as u64) {
                return Err(Error::CoefficientTooLarge { coefficient: c, p: p.get() });
            }
            forms.push(LinearForm::new(FpVector::from_i64(p, row))?);
        }
        for i in 0..forms.len() {
            for j in 0..i {
                if forms[i] == forms[j] {
                    return Err(Error::InvalidSystem(format!("forms {j} and {i} coincide")));
                }
            }
        }
        Ok(Self { p, d, forms })
    }

    pub fn from_file(file: &SystemFile) -> Result<Self> {
        Self::new(Modulus::new(file.p)?, file.d, &file.forms)
    }

    pub fn to_file(&self) -> SystemFile {
        SystemFile {
            p: self.p.get(),
            d: self.d,
            forms: self
                .forms
                .iter()
                .map(|f| f.coeffs.coords().iter().map(|&c| self.p.centered(c)).collect())
                .collect(),
        }
    }

    /// One of the named systems in [`BUILTIN_SYSTEMS`].
    pub fn builtin(name: &str, p: Modulus) -> Result<Self> {
        let (d, rows): (usize, Vec<Vec<i64>>) = match name {
            "ap3" | "ap4" | "ap5" => {
                let k: i64 = name[2..].parse().unwrap();
                (2, (0..k).map(|i| vec![1, i]).collect())
            }
            "diff3" => (3, vec![vec![-1, 1, 0], vec![-1, 0, 1], vec![0, -1, 1]]),
            "gw6a" => (
                3,
                vec![
                    vec![1, 0, 0],
                    vec![0, 1, 0],
                    vec![0, 0, 1],
                    vec![1, 1, 1],
                    vec![1, 2, -1],
                    vec![1, -1, 2],
                ],
            ),
            "gw6b" => (
                3,
                vec![
                    vec![1, 0, 0],
                    vec![1, 1, 0],
                    vec![1, 0, 1],
                    vec![1, 1, 1],
                    vec![1, 1, -1],
                    vec![1, -1, 1],
                ],
            ),
            "cube7" => (
                4,
                vec![
                    vec![1, 0, 0, 0],
                    vec![1, 1, 0, 0],
                    vec![1, 0, 1, 0],
                    vec![1, 0, 0, 1],
                    vec![1, 1, 1, 0],
                    vec![1, 1, 0, 1],
                    vec![1, 0, 1, 1],
                ],
            ),
            "nf4" => (
                4,
                vec![
                    vec![-3, -2, -1, 0],
                    vec![-2, -1, 0, 1],
                    vec![-1, 0, 1, 2],
                    vec![0, 1, 2, 3],
                ],
            ),
            other => {
                return Err(Error::InvalidArgument(format!("unknown built-in system `{other}`")))
            }
        };
        Self::new(p, d, &rows)
    }

    pub fn modulus(&self) -> Modulus {
        self.p
    }

    pub fn vars(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn forms(&self) -> &[LinearForm] {
        &self.forms
    }

    pub fn form(&self, i: usize) -> &LinearForm {
        &self.forms[i]
    }

    /// `m × d` matrix of coefficients `c_{iu}`.
    pub fn coefficient_matrix(&self) -> FpMatrix {
        let rows: Vec<FpVector> = self.forms.iter().map(|f| f.coeffs.clone()).collect();
        FpMatrix::from_vectors(self.p, self.d, &rows).expect("forms share shape")
    }

    /// Subsystem on the given form indices (in the order given).
    pub fn subsystem(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidSystem("empty subsystem".into()));
        }
        let forms = indices
            .iter()
            .map(|&i| {
                self.forms
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::InvalidArgument(format!("form index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            p: self.p,
            d: self.d,
            forms,
        })
    }

    pub fn support(&self, i: usize) -> Vec<usize> {
        self.forms[i].support()
    }

    fn check_partition_cap(&self) -> Result<()> {
        if self.len() > MAX_PARTITION_FORMS {
            return Err(Error::TooManyForms {
                m: self.len(),
                cap: MAX_PARTITION_FORMS,
            });
        }
        Ok(())
    }

    /// Fewest classes into which `{L_j : j ≠ i}` can be partitioned with `L_i`
    /// outside the span of every class; `None` if no partition exists.
    pub fn min_classes_at(&self, i: usize) -> Result<Option<usize>> {
        self.check_partition_cap()?;
        if i >= self.len() {
            return Err(Error::InvalidArgument(format!("form index {i} out of range")));
        }
        let target = &self.forms[i];
        let others: Vec<&FpVector> = self
            .forms
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, f)| &f.coeffs)
            .collect();
        if others.is_empty() {
            return Ok(Some(0));
        }
        // A singleton class spans L_i exactly when it is a multiple of L_i.
        if self
            .forms
            .iter()
            .enumerate()
            .any(|(j, f)| j != i && f.is_multiple_of(target))
        {
            return Ok(None);
        }
        for k in 1..=others.len() {
            let mut classes: Vec<Vec<FpVector>> = Vec::with_capacity(k);
            if assign(&others, 0, k, &mut classes, &target.coeffs) {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// Whether the system is `s`-complex at form `i`.
    pub fn is_s_complex_at(&self, i: usize, s: usize) -> Result<bool> {
        Ok(self.min_classes_at(i)?.is_some_and(|k| k <= s + 1))
    }

    /// Least `s` for which the system is `s`-complex at every form.
    pub fn cs_complexity(&self) -> Result<Complexity> {
        self.check_partition_cap()?;
        let mut worst = 0;
        for i in 0..self.len() {
            match self.min_classes_at(i)? {
                None => return Ok(Complexity::Infinite),
                Some(k) => worst = worst.max(k.saturating_sub(1)),
            }
        }
        Ok(Complexity::Finite(worst))
    }

    /// A witness that the system is in `s`-normal form, if one exists.
    ///
    /// For each form the candidate sets are tried by increasing size, then
    /// lexicographically, so the witness is deterministic.
    pub fn normal_form_check(&self, s: usize) -> Option<NormalFormWitness> {
        let supports: Vec<Vec<usize>> = self.forms.iter().map(LinearForm::support).collect();
        let mut tau = Vec::with_capacity(self.len());
        for (i, sigma) in supports.iter().enumerate() {
            let max = (s + 1).min(sigma.len());
            let found = (1..=max).find_map(|size| {
                subsets(sigma, size).into_iter().find(|t| {
                    supports
                        .iter()
                        .enumerate()
                        .all(|(j, other)| j == i || !t.iter().all(|u| other.contains(u)))
                })
            });
            tau.push(found?);
        }
        Some(NormalFormWitness { tau })
    }

    /// Coefficient vector of `L_i^{k+1}` in the monomial basis of degree
    /// `k + 1`, with multinomial coefficients included.
    pub fn power_coefficients(&self, i: usize, k: usize) -> Result<FpVector> {
        self.check_power_modulus(k)?;
        Ok(power_vector(self.p, self.forms[i].coeffs.coords(), k + 1))
    }

    fn check_power_modulus(&self, k: usize) -> Result<()> {
        if k == 0 {
            return Err(Error::InvalidArgument("power order k must be at least 1".into()));
        }
        if (self.p.get() as usize) <= k + 1 {
            return Err(Error::ModulusTooSmall {
                p: self.p.get(),
                needed: (k + 1) as u32,
            });
        }
        Ok(())
    }

    /// Whether the forms `L_i^{k+1}` are linearly independent over F_p.
    /// `k = 1` is square-independence.
    pub fn power_independence(&self, k: usize) -> Result<bool> {
        self.check_power_modulus(k)?;
        let rows: Vec<FpVector> = (0..self.len())
            .map(|i| power_vector(self.p, self.forms[i].coeffs.coords(), k + 1))
            .collect();
        let cols = rows[0].dim();
        let m = FpMatrix::from_vectors(self.p, cols, &rows)?;
        Ok(m.rank() == self.len())
    }

    pub fn is_square_independent(&self) -> bool {
        self.power_independence(1).expect("odd modulus exceeds 2")
    }

    /// Smallest `k ≥ 1` with `L_i^{k+1}` independent. This is the conjectured
    /// true complexity, not a proven value.
    pub fn conjectured_true_complexity(&self) -> Result<usize> {
        let max_k = self.len().min(self.p.get() as usize - 2);
        for k in 1..=max_k {
            if self.power_independence(k)? {
                return Ok(k);
            }
        }
        Err(Error::NoIndependentPower { max_k })
    }

    /// Greedy maximal square-independent subsystem, lowest index first.
    pub fn maximal_square_independent_subsystem(&self) -> Vec<usize> {
        let mut kept: Vec<usize> = Vec::new();
        let mut kept_rows: Vec<FpVector> = Vec::new();
        for i in 0..self.len() {
            let row = power_vector(self.p, self.forms[i].coeffs.coords(), 2);
            if !in_span(&row, &kept_rows).expect("shared shape") {
                kept.push(i);
                kept_rows.push(row);
            }
        }
        kept
    }

    /// Relations `μ ∈ F_p^m` with `Σ μ_i L_i = 0`.
    pub fn relation_space(&self) -> RelationSpace {
        let c = self.coefficient_matrix();
        let basis = c.transpose().kernel();
        let relations =
            Subspace::linear(self.p, self.len(), basis).expect("kernel basis is independent");
        RelationSpace {
            linear_rank: self.len() - relations.dim(),
            relations,
        }
    }

    /// Evaluates every form at a tuple of field elements.
    pub fn eval_scalar(&self, x: &[u32]) -> Vec<u32> {
        let p = self.p;
        self.forms
            .iter()
            .map(|f| {
                f.coeffs
                    .coords()
                    .iter()
                    .zip(x)
                    .fold(0, |acc, (&c, &v)| p.add(acc, p.mul(c, v)))
            })
            .collect()
    }
}

impl fmt::Display for LinearFormSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 4] = ["x", "y", "z", "w"];
        let name = |u: usize| {
            if self.d <= NAMES.len() {
                NAMES[u].to_string()
            } else {
                format!("x{}", u + 1)
            }
        };
        write!(f, "(")?;
        for (i, form) in self.forms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let mut first = true;
            for (u, &c) in form.coeffs.coords().iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let c = self.p.centered(c);
                let sign = if c < 0 { "-" } else if first { "" } else { "+" };
                let mag = c.unsigned_abs();
                if mag == 1 {
                    write!(f, "{sign}{}", name(u))?;
                } else {
                    write!(f, "{sign}{mag}{}", name(u))?;
                }
                first = false;
            }
        }
        write!(f, ")")
    }
}

/// Branch and bound over class assignments; a class is pruned as soon as its
/// span would capture the target.
fn assign(
    forms: &[&FpVector],
    next: usize,
    max_classes: usize,
    classes: &mut Vec<Vec<FpVector>>,
    target: &FpVector,
) -> bool {
    if next == forms.len() {
        return true;
    }
    let form = forms[next];
    for c in 0..classes.len() {
        classes[c].push(form.clone());
        let ok = !in_span(target, &classes[c]).expect("shared shape");
        if ok && assign(forms, next + 1, max_classes, classes, target) {
            return true;
        }
        classes[c].pop();
    }
    if classes.len() < max_classes {
        // Singleton classes never capture the target: multiples were excluded.
        classes.push(vec![form.clone()]);
        if assign(forms, next + 1, max_classes, classes, target) {
            return true;
        }
        classes.pop();
    }
    false
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, size, 0, &mut Vec::new(), &mut out);
    out
}

/// Exponent vectors of total degree `degree` in `d` variables, lexicographically
/// descending in the first variable.
pub(crate) fn monomials(d: usize, degree: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        return vec![vec![degree]];
    }
    let mut out = Vec::new();
    for first in (0..=degree).rev() {
        for mut rest in monomials(d - 1, degree - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn multinomial(exps: &[usize]) -> u128 {
    // Built as a product of binomials to stay exact.
    let mut total = 0usize;
    let mut acc: u128 = 1;
    for &e in exps {
        for j in 1..=e {
            total += 1;
            acc = acc * total as u128 / j as u128;
        }
    }
    acc
}

fn power_vector(p: Modulus, coeffs: &[u32], degree: usize) -> FpVector {
    let coords = monomials(coeffs.len(), degree)
        .iter()
        .map(|exps| {
            let m = (multinomial(exps) % p.get() as u128) as u32;
            exps.iter()
                .zip(coeffs)
                .fold(m, |acc, (&e, &c)| p.mul(acc, p.pow(c, e as u64)))
        })
        .collect();
    FpVector::new(p, coords)
}
