//! Characters of F_p^n with `f̂(r) = E_x f(x) ω^{rᵀx}`.
//!
//! The transform is applied one axis at a time with p-point sums, so the
//! cost is `N·n·p`. Inversion is `f(x) = Σ_r f̂(r) ω^{−rᵀx}`.

use num_complex::Complex64;

use crate::error::Result;
use crate::functions::domain::GroupDomain;
use crate::functions::function::{roots_of_unity, same_domain, GroupFunction};

/// `f̂(r) = E_x f(x) ω^{rᵀx}`, indexed by `r` in the same order as `x`.
pub fn fourier(f: &GroupFunction) -> GroupFunction {
    let mut v = f.values().to_vec();
    axis_transforms(f.domain(), &mut v, 1);
    let n = f.domain().size() as f64;
    for c in &mut v {
        *c /= n;
    }
    GroupFunction::new(*f.domain(), v).expect("size preserved")
}

/// `f(x) = Σ_r f̂(r) ω^{−rᵀx}`.
pub fn inverse_fourier(fhat: &GroupFunction) -> GroupFunction {
    let mut v = fhat.values().to_vec();
    axis_transforms(fhat.domain(), &mut v, -1);
    GroupFunction::new(*fhat.domain(), v).expect("size preserved")
}

/// In place: `v[.., r_j, ..] ← Σ_t v[.., t, ..] ω^{sign·r_j t}` along every axis.
fn axis_transforms(domain: &GroupDomain, v: &mut [Complex64], sign: i64) {
    let p = domain.modulus().get() as usize;
    let roots = roots_of_unity(domain.modulus());
    let size = domain.size();
    let mut line = vec![Complex64::new(0.0, 0.0); p];
    let mut stride = 1;
    for _ in 0..domain.dim() {
        let block = stride * p;
        for base in (0..size).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = v[start + t * stride];
                }
                for r in 0..p {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (t, &val) in line.iter().enumerate() {
                        let e = (sign.rem_euclid(p as i64) as usize * r * t) % p;
                        acc += val * roots[e];
                    }
                    v[start + r * stride] = acc;
                }
            }
        }
        stride = block;
    }
}

/// `(f*g)(x) = E_{y+z=x} f(y) g(z)`, computed through the transform.
pub fn convolve(f: &GroupFunction, g: &GroupFunction) -> Result<GroupFunction> {
    same_domain(f.domain(), g.domain())?;
    let (fh, gh) = (fourier(f), fourier(g));
    let prod: Vec<Complex64> = fh.values().iter().zip(gh.values()).map(|(a, b)| a * b).collect();
    Ok(inverse_fourier(&GroupFunction::new(*f.domain(), prod)?))
}

/// Convolution by its defining sum, `N²` operations.
pub fn convolve_direct(f: &GroupFunction, g: &GroupFunction) -> Result<GroupFunction> {
    same_domain(f.domain(), g.domain())?;
    let d = f.domain();
    let ar = d.arith();
    let n = d.size();
    let values = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| f.value(y) * g.value(ar.sub(x, y)))
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    GroupFunction::new(*d, values)
}
