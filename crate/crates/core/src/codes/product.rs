//! Hadamard-Schur (coordinatewise) products of codes and log-additivity.

use serde::Serialize;

use super::{Family, LinearCode};
use crate::algebra::{Elem, FMatrix};
use crate::error::{Error, Result};
use crate::evalcodes::eval_code;

/// Verdict of `d(C1 o C2) >= d(C1) + d(C2) - n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogAdditivity {
    pub n: usize,
    pub d1: usize,
    pub d2: usize,
    pub d_product: usize,
    /// `d1 + d2 - n`, possibly negative.
    pub bound: i64,
    pub holds: bool,
    /// A minimum-weight codeword of the product when the bound fails.
    pub witness: Option<Vec<Elem>>,
}

impl LinearCode {
    /// Span of all coordinatewise products `a o b`, `a` in `self`, `b` in
    /// `other`, computed from the `k1 * k2` products of generator rows.
    pub fn hs_product(&self, other: &LinearCode) -> Result<LinearCode> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "lengths {} and {} differ",
                self.len(),
                other.len()
            )));
        }
        let f = &self.field;
        let n = self.len();
        let g1 = &self.generator;
        let g2 = &other.generator;
        let mut rows = Vec::with_capacity(g1.rows() * g2.rows() * n);
        for i in 0..g1.rows() {
            for j in 0..g2.rows() {
                rows.extend(g1.row(i).iter().zip(g2.row(j)).map(|(&a, &b)| f.mul(a, b)));
            }
        }
        let spanning = FMatrix::from_vec(f, g1.rows() * g2.rows(), n, rows)?;
        let mut code = LinearCode::from_spanning_rows(&spanning)?;

        // On common points the product is the evaluation code of the product
        // space; keep that structure when its basis stays independent.
        if let (Some(e1), Some(e2)) = (self.evaluation(), other.evaluation()) {
            if e1.points() == e2.points() {
                if let Some(structured) = e1
                    .basis()
                    .tensor(e2.basis())
                    .and_then(|b| eval_code(&b, e1.points()))
                    .ok()
                    .filter(|c| c.same_code(&code).unwrap_or(false))
                {
                    code = structured;
                }
            }
        }

        // Products of RS codes on common points are again RS codes.
        if let (
            Family::ReedSolomon { points: p1, k: k1 },
            Family::ReedSolomon { points: p2, k: k2 },
        ) = (&self.family, &other.family)
        {
            let k = (k1 + k2 - 1).min(n);
            if p1 == p2 && code.dim() == k {
                return Ok(code.with_family(Family::ReedSolomon {
                    points: p1.clone(),
                    k,
                }));
            }
        }
        Ok(code)
    }

    /// `C o C o ... o C` with `order` factors.
    pub fn hs_power(&self, order: usize) -> Result<LinearCode> {
        if order == 0 {
            return Err(Error::InvalidParameter("Schur power order must be at least 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..order {
            acc = acc.hs_product(self)?;
        }
        Ok(acc)
    }

    /// Decides log-additivity from the exact distance of the product code.
    pub fn is_log_additive(&self, other: &LinearCode) -> Result<LogAdditivity> {
        let product = self.hs_product(other)?;
        let n = self.len();
        let d1 = self.min_distance()?;
        let d2 = other.min_distance()?;
        let (d_product, witness) = product.min_weight_codeword()?;
        let bound = d1 as i64 + d2 as i64 - n as i64;
        let holds = d_product as i64 >= bound;
        Ok(LogAdditivity {
            n,
            d1,
            d2,
            d_product,
            bound,
            holds,
            witness: (!holds).then_some(witness),
        })
    }

    /// `min w(x o y)` over nonzero `x` in `self` and `y` in `other`. Over a
    /// field `w(x o y) = |supp x ∩ supp y|`, so only distinct supports are
    /// compared.
    pub fn min_pairwise_product_weight(&self, other: &LinearCode) -> Result<usize> {
        if self.len() != other.len() {
            return Err(Error::Dimension("codes differ in length".into()));
        }
        let s1 = self.supports()?;
        let s2 = other.supports()?;
        let mut best = usize::MAX;
        for a in &s1 {
            for b in &s2 {
                best = best.min((a & b).count_ones() as usize);
            }
        }
        Ok(best)
    }
}
