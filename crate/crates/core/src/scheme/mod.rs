//! Coded computation schemes: batch and general matrix multiplication, and
//! coded evaluation of a multilinear map from a rank-1 decomposition.
//!
//! Each scheme runs in three separable phases: the master encodes one task
//! per worker, workers compute independently, and the master decodes the
//! product codeword from the results that arrived.

mod matmul;
mod multilinear;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{Elem, FMatrix};
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::subsets::{binomial, tail_first};

pub use matmul::{
    composed_encoders, decode_batch, decode_general, decode_present, encode_batch, encode_general,
    run_batch_matmul, run_general_matmul, worker_compute, Decoded,
};
pub(crate) use matmul::{compute_all, decode_table};
pub use multilinear::{decode_multilinear, encode_multilinear, run_multilinear};

/// How the product-code distance in a plan was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceSource {
    /// Exhaustive minimum-weight search.
    Enumerated,
    /// Known in closed form (Reed-Solomon codes are MDS).
    Analytic,
    /// Only the designed lower bound from the curve degree.
    DesignedOnly,
}

/// Largest number of candidate positions tried when searching for a common
/// information set.
const INFO_SET_SEARCH_BUDGET: u128 = 1 << 20;

/// Codes, fault budgets and positions for one coded job.
#[derive(Clone, Debug)]
pub struct JobPlan {
    codes: Vec<LinearCode>,
    product: LinearCode,
    distance: usize,
    distance_source: DistanceSource,
    stragglers: usize,
    byzantine: usize,
    positions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlanSummary {
    pub field: String,
    pub codes: Vec<String>,
    pub workers: usize,
    pub k: usize,
    pub product_dim: usize,
    pub product_distance: usize,
    pub distance_source: DistanceSource,
    pub stragglers: usize,
    pub byzantine: usize,
    pub positions: Vec<usize>,
    pub wait_for: usize,
    pub designed_threshold: usize,
}

impl JobPlan {
    /// Plan for `k` products `A_i B_i` coded with `c1` and `c2`.
    pub fn batch_matmul(
        c1: &LinearCode,
        c2: &LinearCode,
        workers: usize,
        stragglers: usize,
        byzantine: usize,
    ) -> Result<Self> {
        Self::new(vec![c1.clone(), c2.clone()], workers, stragglers, byzantine)
    }

    /// Plan over the codes `C_1, ..., C_j`; workers return the coordinatewise
    /// product of their `j` symbols, which lies in `C_1 o ... o C_j`.
    pub fn new(codes: Vec<LinearCode>, workers: usize, stragglers: usize, byzantine: usize) -> Result<Self> {
        let first = codes
            .first()
            .ok_or_else(|| Error::InvalidParameter("a plan needs at least one code".into()))?;
        let (n, k) = (first.len(), first.dim());
        for c in &codes {
            if c.field() != first.field() {
                return Err(Error::FieldMismatch);
            }
            if (c.len(), c.dim()) != (n, k) {
                return Err(Error::InvalidParameter(format!(
                    "codes must share parameters: [{n},{k}] and [{},{}]",
                    c.len(),
                    c.dim()
                )));
            }
        }
        if workers != n {
            return Err(Error::Hypothesis(format!(
                "the number of workers N = {workers} must equal the code length n = {n}"
            )));
        }
        let mut product = first.clone();
        for c in &codes[1..] {
            product = product.hs_product(c)?;
        }
        let (distance, distance_source) = product_distance(&product)?;
        let needed = 2 * byzantine + stragglers + 1;
        if distance < needed {
            return Err(Error::Hypothesis(format!(
                "d(C1 o ... o C{}) = {distance} < 2b + s + 1 = {needed} (b = {byzantine}, s = {stragglers})",
                codes.len()
            )));
        }
        let positions = common_information_set(&codes)?;
        Ok(JobPlan {
            codes,
            product,
            distance,
            distance_source,
            stragglers,
            byzantine,
            positions,
        })
    }

    pub fn codes(&self) -> &[LinearCode] {
        &self.codes
    }

    /// `C_1 o ... o C_j`.
    pub fn product(&self) -> &LinearCode {
        &self.product
    }

    pub fn product_distance(&self) -> usize {
        self.distance
    }

    pub fn distance_source(&self) -> DistanceSource {
        self.distance_source
    }

    pub fn workers(&self) -> usize {
        self.product.len()
    }

    pub fn k(&self) -> usize {
        self.codes[0].dim()
    }

    pub fn stragglers(&self) -> usize {
        self.stragglers
    }

    pub fn byzantine(&self) -> usize {
        self.byzantine
    }

    /// Common information set carrying the plain inputs.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// `n - d + 1`: any this many honest results determine the product
    /// codeword.
    pub fn designed_threshold(&self) -> usize {
        self.workers() - self.distance + 1
    }

    /// Results the master waits for: the designed threshold plus `2b`.
    pub fn wait_for(&self) -> usize {
        (self.designed_threshold() + 2 * self.byzantine).min(self.workers())
    }

    pub fn summary(&self) -> PlanSummary {
        PlanSummary {
            field: self.product.field().label(),
            codes: self.codes.iter().map(describe_code).collect(),
            workers: self.workers(),
            k: self.k(),
            product_dim: self.product.dim(),
            product_distance: self.distance,
            distance_source: self.distance_source,
            stragglers: self.stragglers,
            byzantine: self.byzantine,
            positions: self.positions.clone(),
            wait_for: self.wait_for(),
            designed_threshold: self.designed_threshold(),
        }
    }
}

pub(crate) fn describe_code(c: &LinearCode) -> String {
    use crate::codes::Family;
    match c.family() {
        Family::ReedSolomon { k, .. } => {
            format!("rs:{}:{}:{k}", c.field().order(), c.len())
        }
        Family::Hermitian { q, m } => format!("hermitian:{q}:{m} [{},{}]", c.len(), c.dim()),
        other => format!("{} [{},{}]", other.name(), c.len(), c.dim()),
    }
}

pub(crate) fn product_distance(product: &LinearCode) -> Result<(usize, DistanceSource)> {
    if let Some((d, true)) = product.distance_bound() {
        let source = if product.known_distance().is_some() {
            DistanceSource::Enumerated
        } else {
            DistanceSource::Analytic
        };
        return Ok((d, source));
    }
    match product.min_distance() {
        Ok(d) => Ok((d, DistanceSource::Enumerated)),
        Err(Error::EnumerationBudget { .. }) => product
            .distance_bound()
            .map(|(d, _)| (d, DistanceSource::DesignedOnly))
            .ok_or_else(|| {
                Error::InvalidParameter(
                    "product code too large to enumerate and no designed distance is known".into(),
                )
            }),
        Err(e) => Err(e),
    }
}

/// Positions that are an information set of every code: the last `k` when
/// possible, otherwise the first in tail-first order.
pub fn common_information_set(codes: &[LinearCode]) -> Result<Vec<usize>> {
    let (n, k) = (codes[0].len(), codes[0].dim());
    let ok = |pos: &[usize]| codes.iter().all(|c| c.is_information_set(pos));
    let tail = codes[0].tail_positions();
    if ok(&tail) {
        return Ok(tail);
    }
    let pivots = codes[0].find_information_set(&tail);
    if ok(&pivots) {
        return Ok(pivots);
    }
    if binomial(n, k) > INFO_SET_SEARCH_BUDGET {
        return Err(Error::InvalidParameter("no common information set found within budget".into()));
    }
    tail_first(n, k)
        .find(|p| ok(p))
        .ok_or_else(|| Error::InvalidParameter("the codes have no common information set".into()))
}

/// What one worker is asked to compute.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    /// Coded blocks `Ã_w`, `B̃_w`; the worker returns `Ã_w B̃_w`.
    Matmul { a: FMatrix, b: FMatrix },
    /// Coded scalars `t̃_1 .. t̃_l` and vector `ỹ`; the worker returns
    /// `t̃_1 ... t̃_l ỹ` as a `1 x p` matrix.
    Multilinear { scalars: Vec<Elem>, vector: FMatrix },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WorkerTask {
    pub worker: usize,
    pub payload: Payload,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Straggler,
    Byzantine,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WorkerResult {
    pub worker: usize,
    /// Absent for stragglers.
    pub value: Option<FMatrix>,
    pub status: Status,
}

/// Stragglers and byzantine replacements applied to honest results.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FaultPattern {
    pub stragglers: Vec<usize>,
    /// Worker -> value returned instead of the true result.
    pub corruptions: BTreeMap<usize, FMatrix>,
}

impl FaultPattern {
    pub fn stragglers(ids: &[usize]) -> Self {
        FaultPattern {
            stragglers: ids.to_vec(),
            corruptions: BTreeMap::new(),
        }
    }

    /// Applies the pattern to a full set of honest results.
    pub fn apply(&self, honest: Vec<WorkerResult>) -> Result<Vec<WorkerResult>> {
        if let Some(&w) = self.stragglers.iter().find(|w| self.corruptions.contains_key(w)) {
            return Err(Error::InvalidParameter(format!(
                "worker {w} cannot be both a straggler and byzantine"
            )));
        }
        let n = honest.len();
        if let Some(&w) = self.stragglers.iter().chain(self.corruptions.keys()).find(|&&w| w >= n) {
            return Err(Error::InvalidParameter(format!("no worker {w} among {n}")));
        }
        Ok(honest
            .into_iter()
            .map(|mut r| {
                if self.stragglers.contains(&r.worker) {
                    r.value = None;
                    r.status = Status::Straggler;
                } else if let Some(v) = self.corruptions.get(&r.worker) {
                    r.value = Some(v.clone());
                    r.status = Status::Byzantine;
                }
                r
            })
            .collect())
    }
}

/// Results indexed by worker ID. Later entries for the same worker win,
/// so the table does not depend on arrival order otherwise.
pub fn result_table(n: usize, results: &[WorkerResult]) -> Result<Vec<Option<FMatrix>>> {
    let mut table = vec![None; n];
    for r in results {
        if r.worker >= n {
            return Err(Error::InvalidParameter(format!("result from unknown worker {}", r.worker)));
        }
        if let Some(v) = &r.value {
            table[r.worker] = Some(v.clone());
        }
    }
    Ok(table)
}
