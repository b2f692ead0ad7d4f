//! Generic `[n, k]` linear codes over a finite field.
//!
//! Coordinates of a code are identified with worker IDs. Words are stored as
//! `n x L` matrices: row `w` is the symbol at coordinate `w`, and `L > 1`
//! carries matrix-valued symbols flattened row-major. Every linear operation
//! (embedding, erasure decoding) acts on the `L` columns independently, which
//! is exactly the entrywise extension of a scalar code to matrix symbols.

mod decode;
mod enumerate;
mod product;

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::algebra::{Elem, FMatrix, Field};
use crate::error::{Error, Result};
use crate::evalcodes::Evaluation;

pub use decode::{stack_symbols, unstack_symbols, RsDecoded};
pub use enumerate::{weight, NearestCodeword, ENUMERATION_BUDGET};
pub use product::LogAdditivity;

/// Where a code came from. Decoders dispatch on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Generic,
    /// Evaluations of polynomials of degree `< k` at distinct `points`.
    ReedSolomon { points: Vec<Elem>, k: usize },
    /// One-point code `L(m P_inf)` on the Hermitian curve over GF(q^2).
    Hermitian { q: u32, m: u32 },
    Evaluation,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Generic => "generic",
            Family::ReedSolomon { .. } => "rs",
            Family::Hermitian { .. } => "hermitian",
            Family::Evaluation => "evaluation",
        }
    }
}

#[derive(Clone)]
pub struct LinearCode {
    field: Field,
    generator: FMatrix,
    parity_check: FMatrix,
    family: Family,
    evaluation: Option<Arc<Evaluation>>,
    distance: OnceLock<usize>,
}

impl fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}] {} code over {}",
            self.len(),
            self.dim(),
            self.family.name(),
            self.field
        )
    }
}

/// Parameters of a code together with its generalized genus and designed
/// recovery threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodeReport {
    pub family: String,
    pub field: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub genus: usize,
    pub designed_threshold: usize,
}

impl CodeReport {
    pub fn to_text(&self) -> String {
        let rows = [
            ("family", self.family.clone()),
            ("field", self.field.clone()),
            ("n", self.n.to_string()),
            ("k", self.k.to_string()),
            ("d", self.d.to_string()),
            ("genus", self.genus.to_string()),
            ("designed threshold", self.designed_threshold.to_string()),
        ];
        rows.iter()
            .map(|(k, v)| format!("{k:<20}{v}\n"))
            .collect()
    }
}

impl LinearCode {
    /// Code spanned by the rows of a full-rank `k x n` generator.
    pub fn from_generator(generator: FMatrix) -> Result<Self> {
        let (k, n) = generator.shape();
        if k == 0 || n == 0 {
            return Err(Error::InvalidParameter("a code needs 1 <= k <= n".into()));
        }
        let rank = generator.rank();
        if rank != k {
            return Err(Error::RankDeficient { rows: k, rank });
        }
        let parity_check = generator.nullspace();
        Ok(LinearCode {
            field: generator.field().clone(),
            generator,
            parity_check,
            family: Family::Generic,
            evaluation: None,
            distance: OnceLock::new(),
        })
    }

    /// Code spanned by the rows of an arbitrary matrix.
    pub fn from_spanning_rows(rows: &FMatrix) -> Result<Self> {
        Self::from_generator(rows.row_space_basis())
    }

    pub(crate) fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    pub(crate) fn with_evaluation(mut self, evaluation: Evaluation) -> Self {
        self.evaluation = Some(Arc::new(evaluation));
        self
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn generator(&self) -> &FMatrix {
        &self.generator
    }

    pub fn parity_check(&self) -> &FMatrix {
        &self.parity_check
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn evaluation(&self) -> Option<&Evaluation> {
        self.evaluation.as_deref()
    }

    /// Block length `n`.
    pub fn len(&self) -> usize {
        self.generator.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dimension `k`.
    pub fn dim(&self) -> usize {
        self.generator.rows()
    }

    /// Encodes a `k x L` message into an `n x L` codeword.
    pub fn encode(&self, message: &FMatrix) -> Result<FMatrix> {
        self.generator.transpose().mul(message)
    }

    pub fn encode_scalars(&self, message: &[Elem]) -> Result<Vec<Elem>> {
        Ok(self
            .encode(&FMatrix::column(&self.field, message)?)?
            .into_data())
    }

    pub fn is_codeword(&self, word: &[Elem]) -> bool {
        word.len() == self.len()
            && FMatrix::column(&self.field, word)
                .and_then(|w| self.parity_check.mul(&w))
                .map(|s| s.is_zero())
                .unwrap_or(false)
    }

    pub fn same_code(&self, other: &LinearCode) -> Result<bool> {
        if self.field != other.field || self.len() != other.len() {
            return Ok(false);
        }
        self.generator.same_row_space(&other.generator)
    }

    /// Exact minimum distance, cached after the first enumeration.
    pub fn min_distance(&self) -> Result<usize> {
        if let Some(&d) = self.distance.get() {
            return Ok(d);
        }
        let (d, _) = self.min_weight_codeword()?;
        let _ = self.distance.set(d);
        Ok(d)
    }

    /// Cached distance, if it has been computed.
    pub fn known_distance(&self) -> Option<usize> {
        self.distance.get().copied()
    }

    /// `n - k + 1 - d`.
    pub fn generalized_genus(&self) -> Result<usize> {
        let d = self.min_distance()?;
        Ok(self.len() + 1 - self.dim() - d)
    }

    pub fn report(&self) -> Result<CodeReport> {
        let d = self.min_distance()?;
        Ok(CodeReport {
            family: self.family.name().into(),
            field: self.field.label(),
            n: self.len(),
            k: self.dim(),
            d,
            genus: self.len() + 1 - self.dim() - d,
            designed_threshold: self.len() - d + 1,
        })
    }

    /// Distance without enumeration where the family allows it: `n - k + 1`
    /// for Reed-Solomon codes (exact, they are MDS), `n - max curve degree`
    /// for evaluation codes with a curve degree (a lower bound). Returns
    /// `(bound, exact)`.
    pub fn distance_bound(&self) -> Option<(usize, bool)> {
        if let Some(&d) = self.distance.get() {
            return Some((d, true));
        }
        match &self.family {
            Family::ReedSolomon { .. } => Some((self.len() + 1 - self.dim(), true)),
            _ => {
                let deg = self.evaluation.as_ref()?.basis().max_degree()?;
                let bound = (self.len() as i64 - deg).max(1) as usize;
                Some((bound, false))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_generator_is_full_space() {
        let f = Field::prime(5).unwrap();
        let c = LinearCode::from_generator(FMatrix::identity(&f, 4)).unwrap();
        assert_eq!((c.len(), c.dim()), (4, 4));
        assert_eq!(c.parity_check().rows(), 0);
        assert_eq!(c.min_distance().unwrap(), 1);
        assert_eq!(c.generalized_genus().unwrap(), 0);
    }

    #[test]
    fn repetition_code() {
        let f = Field::prime(2).unwrap();
        let g = FMatrix::from_rows(&f, &[vec![1; 5]]).unwrap();
        let c = LinearCode::from_generator(g).unwrap();
        assert_eq!(c.min_distance().unwrap(), 5);
        let h = c.parity_check();
        assert!(c.generator().mul(&h.transpose()).unwrap().is_zero());
    }

    #[test]
    fn ternary_3_2_code_has_distance_2() {
        // all 9 codewords of span{(1,1,1),(0,1,2)} enumerated by hand:
        // the nonzero ones of weight 2 are (1,0,2)*c and (0,1,2)*c.
        let f = Field::prime(3).unwrap();
        let g = FMatrix::from_rows(&f, &[vec![1, 1, 1], vec![0, 1, 2]]).unwrap();
        let c = LinearCode::from_generator(g).unwrap();
        assert_eq!(c.min_distance().unwrap(), 2);
    }

    #[test]
    fn rank_deficient_generator_rejected() {
        let f = Field::prime(7).unwrap();
        let g = FMatrix::from_rows(&f, &[vec![1, 2, 3], vec![2, 4, 6]]).unwrap();
        assert_eq!(
            LinearCode::from_generator(g).unwrap_err(),
            Error::RankDeficient { rows: 2, rank: 1 }
        );
    }

    #[test]
    fn report_text_is_aligned() {
        let f = Field::prime(2).unwrap();
        let c = LinearCode::from_generator(FMatrix::from_rows(&f, &[vec![1; 3]]).unwrap()).unwrap();
        let text = c.report().unwrap().to_text();
        assert!(text.contains("designed threshold  1"));
        assert!(text.lines().all(|l| l.len() >= 21));
    }
}
