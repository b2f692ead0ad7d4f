//! Univariate polynomials over a [`Field`], little-endian coefficients.

use super::field::{Elem, Field};
use crate::error::{Error, Result};

pub fn trim(p: &mut Vec<Elem>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Degree, with the zero polynomial reported as `None`.
pub fn degree(p: &[Elem]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

pub fn eval(f: &Field, p: &[Elem], x: Elem) -> Elem {
    p.iter().rev().fold(0, |acc, &c| f.mul_add(c, acc, x))
}

pub fn mul(f: &Field, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.mul_add(out[i + j], x, y);
        }
    }
    trim(&mut out);
    out
}

/// Quotient and remainder.
pub fn divmod(f: &Field, a: &[Elem], b: &[Elem]) -> Result<(Vec<Elem>, Vec<Elem>)> {
    let db = degree(b).ok_or(Error::DivisionByZero)?;
    let mut r = a.to_vec();
    trim(&mut r);
    let lead_inv = f.inv(b[db])?;
    let mut q = vec![0; r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let factor = f.mul(r[dr], lead_inv);
        let shift = dr - db;
        q[shift] = factor;
        let neg = f.neg(factor);
        for (i, &bi) in b[..=db].iter().enumerate() {
            r[shift + i] = f.mul_add(r[shift + i], neg, bi);
        }
        trim(&mut r);
    }
    trim(&mut q);
    Ok((q, r))
}

/// Lagrange interpolation through `(xs[i], ys[i])`.
pub fn interpolate(f: &Field, xs: &[Elem], ys: &[Elem]) -> Result<Vec<Elem>> {
    let mut out = vec![0; xs.len()];
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis = vec![1];
        let mut denom = 1;
        for (j, &xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = mul(f, &basis, &[f.neg(xj), 1]);
            denom = f.mul(denom, f.sub(xi, xj));
        }
        let scale = f.div(yi, denom)?;
        for (o, &b) in out.iter_mut().zip(&basis) {
            *o = f.mul_add(*o, scale, b);
        }
    }
    trim(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divmod_exact_and_remainder() {
        let f = Field::prime(7).unwrap();
        // (x+1)(x+2) = x^2 + 3x + 2
        let p = mul(&f, &[1, 1], &[2, 1]);
        assert_eq!(p, vec![2, 3, 1]);
        let (q, r) = divmod(&f, &p, &[1, 1]).unwrap();
        assert_eq!((q, r), (vec![2, 1], vec![]));
        let (_, r) = divmod(&f, &[3, 0, 1], &[1, 1]).unwrap();
        assert_eq!(r, vec![4]);
    }

    #[test]
    fn interpolation_reproduces_values() {
        let f = Field::prime(11).unwrap();
        let xs = [1, 4, 7, 9];
        let ys = [3, 0, 10, 5];
        let p = interpolate(&f, &xs, &ys).unwrap();
        for (&x, &y) in xs.iter().zip(&ys) {
            assert_eq!(eval(&f, &p, x), y);
        }
    }
}
