//! One-point codes on the Hermitian curve `y^q + y = x^(q+1)` over GF(q^2).
//!
//! The curve has `q^3` affine rational points and genus `q(q-1)/2`. The
//! Riemann-Roch space `L(m P_inf)` is spanned by `x^i y^j` with `j < q` and
//! pole order `q i + (q+1) j <= m`.

use super::{CurveDegree, EvalBasis, Function, PointSet, Relation};
use crate::algebra::{prime_power, Field};
use crate::codes::{Family, LinearCode};
use crate::error::{Error, Result};

pub fn hermitian_genus(q: u32) -> u32 {
    q * (q - 1) / 2
}

fn curve_field(q: u32) -> Result<Field> {
    let (p, e) = prime_power(q as u64).ok_or(Error::NotPrime(q as u64))?;
    Field::new(p as u32, 2 * e, None)
}

/// All affine points, ordered lexicographically in `(x, y)`.
pub fn hermitian_points(q: u32) -> Result<PointSet> {
    let f = curve_field(q)?;
    let mut points = Vec::new();
    for x in f.elements() {
        let rhs = f.pow(x, q as u64 + 1);
        for y in f.elements() {
            if f.add(f.pow(y, q as u64), y) == rhs {
                points.push(vec![x, y]);
            }
        }
    }
    debug_assert_eq!(points.len() as u32, q * q * q);
    PointSet::new(&f, points)
}

/// Basis of `L(m P_inf)` in increasing pole order.
pub fn hermitian_basis(q: u32, m: u32) -> Result<EvalBasis> {
    let f = curve_field(q)?;
    let mut monomials: Vec<(u32, u32)> = (0..q)
        .flat_map(|j| (0..=m / q).map(move |i| (i, j)))
        .filter(|&(i, j)| q * i + (q + 1) * j <= m)
        .collect();
    monomials.sort_by_key(|&(i, j)| (q * i + (q + 1) * j, j));
    EvalBasis::new(
        &f,
        vec!["x".into(), "y".into()],
        monomials
            .into_iter()
            .map(|(i, j)| Function::monomial(vec![i, j]))
            .collect(),
        Some(CurveDegree {
            weights: vec![q as i64, q as i64 + 1],
        }),
        Relation::Hermitian { q },
    )
}

/// The one-point code `C(m P_inf, D)` on all `q^3` affine points, defined for
/// `2g <= m < q^3`, where its dimension is `m - g + 1`.
pub fn hermitian_code(q: u32, m: u32) -> Result<LinearCode> {
    if prime_power(q as u64).is_none() {
        return Err(Error::NotPrime(q as u64));
    }
    let g = hermitian_genus(q);
    let n = q * q * q;
    if m < 2 * g || m >= n {
        return Err(Error::InvalidParameter(format!(
            "Hermitian code needs {} <= m < {n}, got m = {m}",
            2 * g
        )));
    }
    hermitian_code_on(q, m, n as usize)
}

/// The code of `L(m P_inf)` on the first `n` points, without the range
/// guard. Used for punctured mother codes.
pub fn hermitian_code_on(q: u32, m: u32, n: usize) -> Result<LinearCode> {
    let points = hermitian_points(q)?.prefix(n)?;
    let basis = hermitian_basis(q, m)?;
    Ok(super::eval_code(&basis, &points)?.with_family(Family::Hermitian { q, m }))
}

/// Smallest `m` whose Riemann-Roch space has dimension `k`.
pub fn hermitian_degree_for_dim(q: u32, k: usize) -> u32 {
    let mut m = 0;
    loop {
        if hermitian_basis(q, m).map(|b| b.dim()).unwrap_or(0) >= k {
            return m;
        }
        m += 1;
    }
}
