//! Collusion-secure coded matrix multiplication.
//!
//! The `k` real inputs are padded with `t` uniformly random matrices and
//! embedded at `k + t` systematic coordinates of a mother code of length
//! `N + k + t`. Those coordinates are deleted before dispatch, so each of
//! the `N` workers sees only a coordinate of the punctured codeword. A set
//! `W` of colluders learns nothing when the padding-to-observation map onto
//! `W` is surjective; for the mother code this holds for every `|W| <= t - 𝔤`.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Elem, FMatrix, Field};
use crate::codes::{stack_symbols, unstack_symbols, Family, LinearCode};
use crate::error::{Error, Result};
use crate::evalcodes::{hermitian_code_on, hermitian_degree_for_dim, hermitian_genus, rs_code_prefix};
use crate::scheme::{
    compute_all, decode_table, product_distance, result_table, DistanceSource, FaultPattern, Payload,
    WorkerResult, WorkerTask,
};
use crate::subsets::{binomial, tail_first, Combinations};

/// Code family used for the mother code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MotherFamily {
    /// Reed-Solomon over GF(q) on the first `N + k + t` elements.
    ReedSolomon { q: u64 },
    /// One-point Hermitian code over GF(q^2) on the first `N + k + t` points.
    Hermitian { q: u32 },
}

#[derive(Clone, Debug)]
pub struct SecurePlan {
    mother: LinearCode,
    product: LinearCode,
    product_distance: usize,
    distance_source: DistanceSource,
    workers: usize,
    k: usize,
    t: usize,
    byzantine: usize,
    /// Mother-code coordinates carrying `(A_1..A_k, R_1..R_t)`.
    systematic: Vec<usize>,
    /// Mother-code coordinate of each worker.
    worker_positions: Vec<usize>,
    generalized_genus: usize,
    curve_genus: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SecurePlanSummary {
    pub field: String,
    pub mother: String,
    pub n: usize,
    pub workers: usize,
    pub k: usize,
    pub padding: usize,
    pub byzantine: usize,
    pub collusion_tolerance: usize,
    pub generalized_genus: usize,
    pub curve_genus: Option<usize>,
    pub systematic_positions: Vec<usize>,
    pub worker_positions: Vec<usize>,
    pub product_distance: usize,
    pub distance_source: DistanceSource,
    pub wait_for: usize,
}

impl SecurePlan {
    /// Builds the mother code of length `N + k + t` and dimension `k + t`.
    pub fn new(family: &MotherFamily, workers: usize, k: usize, t: usize) -> Result<Self> {
        let n = workers + k + t;
        if k == 0 || workers == 0 {
            return Err(Error::InvalidParameter("need k >= 1 and N >= 1".into()));
        }
        let (mother, curve_genus) = match family {
            MotherFamily::ReedSolomon { q } => {
                let field = Field::of_order(*q)?;
                if (*q as usize) < n {
                    return Err(Error::InvalidParameter(format!(
                        "Reed-Solomon length N + k + t = {n} exceeds the field order {q}"
                    )));
                }
                (rs_code_prefix(&field, n, k + t)?, None)
            }
            MotherFamily::Hermitian { q } => {
                let points = (*q as usize).pow(3);
                if points < n {
                    return Err(Error::InvalidParameter(format!(
                        "length N + k + t = {n} exceeds the {points} points of the Hermitian curve"
                    )));
                }
                let m = hermitian_degree_for_dim(*q, k + t);
                let code = hermitian_code_on(*q, m, n)
                    .map_err(|e| Error::InvalidParameter(format!("no [{n},{}] Hermitian mother code: {e}", k + t)))?;
                (code, Some(hermitian_genus(*q) as usize))
            }
        };
        let generalized_genus = match mother.distance_bound() {
            Some((d, true)) => n + 1 - (k + t) - d,
            _ => mother.generalized_genus()?,
        };
        if t <= generalized_genus {
            return Err(Error::Hypothesis(format!(
                "collusion tolerance t - 𝔤 = {t} - {generalized_genus} must be positive"
            )));
        }
        let systematic = tail_first(n, k + t)
            .take(1 << 16)
            .find(|s| mother.is_information_set(s))
            .ok_or_else(|| Error::InvalidParameter("no information set found for the mother code".into()))?;
        let worker_positions = (0..n).filter(|i| !systematic.contains(i)).collect();
        let product = mother.hs_product(&mother)?;
        let (product_distance, distance_source) = product_distance(&product)?;
        if product_distance < k + t + 1 {
            return Err(Error::Hypothesis(format!(
                "d(C o C) = {product_distance} < (k + t) + 1 = {}: the workers cannot determine the product",
                k + t + 1
            )));
        }
        Ok(SecurePlan {
            mother,
            product,
            product_distance,
            distance_source,
            workers,
            k,
            t,
            byzantine: 0,
            systematic,
            worker_positions,
            generalized_genus,
            curve_genus,
        })
    }

    /// Tolerates `b` byzantine workers; the master then waits for `2b` more
    /// results.
    pub fn with_byzantine(mut self, b: usize) -> Result<Self> {
        let n = self.mother.len();
        if self.product_distance < 2 * b + (n - self.workers) + 1 {
            return Err(Error::Hypothesis(format!(
                "d(C o C) = {} < 2b + (k + t) + 1 = {}",
                self.product_distance,
                2 * b + (n - self.workers) + 1
            )));
        }
        self.byzantine = b;
        Ok(self)
    }

    pub fn mother(&self) -> &LinearCode {
        &self.mother
    }

    pub fn product(&self) -> &LinearCode {
        &self.product
    }

    pub fn field(&self) -> &Field {
        self.mother.field()
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn padding(&self) -> usize {
        self.t
    }

    pub fn byzantine(&self) -> usize {
        self.byzantine
    }

    /// `c = t - 𝔤`.
    pub fn collusion_tolerance(&self) -> usize {
        self.t - self.generalized_genus
    }

    pub fn generalized_genus(&self) -> usize {
        self.generalized_genus
    }

    /// Genus of the curve for AG mother codes.
    pub fn curve_genus(&self) -> Option<usize> {
        self.curve_genus
    }

    pub fn systematic_positions(&self) -> &[usize] {
        &self.systematic
    }

    pub fn worker_positions(&self) -> &[usize] {
        &self.worker_positions
    }

    pub fn product_distance(&self) -> usize {
        self.product_distance
    }

    /// Worker results needed to decode: `n - d(C o C) + 1 + 2b`, all of them
    /// from workers since the systematic coordinates are never dispatched.
    pub fn wait_for(&self) -> usize {
        (self.mother.len() + 1 + 2 * self.byzantine)
            .saturating_sub(self.product_distance)
            .min(self.workers)
    }

    pub fn summary(&self) -> SecurePlanSummary {
        SecurePlanSummary {
            field: self.field().label(),
            mother: crate::scheme::describe_code(&self.mother),
            n: self.mother.len(),
            workers: self.workers,
            k: self.k,
            padding: self.t,
            byzantine: self.byzantine,
            collusion_tolerance: self.collusion_tolerance(),
            generalized_genus: self.generalized_genus,
            curve_genus: self.curve_genus,
            systematic_positions: self.systematic.clone(),
            worker_positions: self.worker_positions.clone(),
            product_distance: self.product_distance,
            distance_source: self.distance_source,
            wait_for: self.wait_for(),
        }
    }

    /// `n x (k + t)` map from `(inputs, padding)` to the mother codeword.
    pub fn encoder(&self) -> Result<FMatrix> {
        self.mother.systematic_encoder(&self.systematic)
    }
}

/// Tasks plus the padding that produced them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecureEncoding {
    pub tasks: Vec<WorkerTask>,
    pub seed: u64,
}

/// Draws `t` uniform padding matrices per side from the seed and encodes.
pub fn secure_encode(plan: &SecurePlan, a: &[FMatrix], b: &[FMatrix], seed: u64) -> Result<SecureEncoding> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Dimension("no input blocks".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = plan.field();
    let (pa, sa) = a[0].shape();
    let (sb, qb) = b[0].shape();
    let r: Vec<FMatrix> = (0..plan.t).map(|_| FMatrix::random(f, pa, sa, &mut rng)).collect();
    let s: Vec<FMatrix> = (0..plan.t).map(|_| FMatrix::random(f, sb, qb, &mut rng)).collect();
    Ok(SecureEncoding {
        tasks: secure_encode_with_padding(plan, a, b, &r, &s)?,
        seed,
    })
}

/// Encodes with explicit padding `R_1..R_t` and `S_1..S_t`.
pub fn secure_encode_with_padding(
    plan: &SecurePlan,
    a: &[FMatrix],
    b: &[FMatrix],
    r: &[FMatrix],
    s: &[FMatrix],
) -> Result<Vec<WorkerTask>> {
    if a.len() != plan.k || b.len() != plan.k {
        return Err(Error::Dimension(format!(
            "{} A and {} B blocks for k = {}",
            a.len(),
            b.len(),
            plan.k
        )));
    }
    if r.len() != plan.t || s.len() != plan.t {
        return Err(Error::Dimension(format!("padding must have t = {} blocks per side", plan.t)));
    }
    if a[0].cols() != b[0].rows() {
        return Err(Error::Dimension("inner block dimensions differ".into()));
    }
    let side = |inputs: &[FMatrix], pad: &[FMatrix]| -> Result<Vec<FMatrix>> {
        let all: Vec<FMatrix> = inputs.iter().chain(pad).cloned().collect();
        let (rows, cols) = all[0].shape();
        let word = plan.mother.systematic_embed(&plan.systematic, &stack_symbols(&all)?)?;
        unstack_symbols(&word.select_rows(&plan.worker_positions), rows, cols)
    };
    let ea = side(a, r)?;
    let eb = side(b, s)?;
    Ok(ea
        .into_iter()
        .zip(eb)
        .enumerate()
        .map(|(worker, (a, b))| WorkerTask {
            worker,
            payload: Payload::Matmul { a, b },
        })
        .collect())
}

/// Decodes `A_i B_i` from the lowest-ID `wait_for` present results.
pub fn secure_decode(plan: &SecurePlan, results: &[WorkerResult]) -> Result<Vec<FMatrix>> {
    let table = result_table(plan.workers, results)?;
    let present: Vec<usize> = (0..plan.workers).filter(|&w| table[w].is_some()).collect();
    let required = plan.wait_for();
    if present.len() < required {
        return Err(Error::InsufficientResults {
            present: present.len(),
            required,
        });
    }
    let mut full = vec![None; plan.mother.len()];
    for &w in &present[..required] {
        full[plan.worker_positions[w]] = table[w].clone();
    }
    let shape = full
        .iter()
        .flatten()
        .next()
        .map(FMatrix::shape)
        .expect("at least one result");
    let decoded = decode_table(&plan.product, plan.byzantine, &full, required)?;
    decoded.blocks_at(&plan.systematic[..plan.k], shape.0, shape.1)
}

pub fn run_secure_matmul(
    plan: &SecurePlan,
    a: &[FMatrix],
    b: &[FMatrix],
    seed: u64,
    faults: &FaultPattern,
) -> Result<Vec<FMatrix>> {
    let enc = secure_encode(plan, a, b, seed)?;
    let results = faults.apply(compute_all(&enc.tasks)?)?;
    secure_decode(plan, &results)
}

/// Outcome of the masking check over colluder sets of one size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeakageReport {
    pub colluders: usize,
    pub sets_checked: u64,
    pub total_sets: u128,
    pub exhaustive: bool,
    pub secure: bool,
    /// First colluder set (in lexicographic order) whose observations are
    /// not fully masked.
    pub witness: Option<Vec<usize>>,
}

/// Rank of the padding-to-observation map for one colluder set.
pub fn masking_rank(plan: &SecurePlan, colluders: &[usize]) -> Result<usize> {
    if let Some(&w) = colluders.iter().find(|&&w| w >= plan.workers) {
        return Err(Error::InvalidParameter(format!("no worker {w}")));
    }
    let e = plan.encoder()?;
    let rows: Vec<usize> = colluders.iter().map(|&w| plan.worker_positions[w]).collect();
    let pad_cols: Vec<usize> = (plan.k..plan.k + plan.t).collect();
    Ok(e.select_rows(&rows).select_columns(&pad_cols).rank())
}

/// Checks that every colluder set of the given size observes symbols that
/// the padding alone makes uniform: the `|W| x t` block of the encoder
/// restricted to colluder rows and padding columns must have rank `|W|`.
/// Exhaustive when `C(N, |W|) <= max_sets`, otherwise the first `max_sets`
/// sets in lexicographic order.
pub fn collusion_leakage_check(plan: &SecurePlan, colluders: usize, max_sets: u64) -> Result<LeakageReport> {
    let total = binomial(plan.workers, colluders);
    let exhaustive = total <= max_sets as u128;
    let sets: Vec<Vec<usize>> = Combinations::new(plan.workers, colluders)
        .take(max_sets as usize)
        .collect();
    let e = plan.encoder()?;
    let pad_cols: Vec<usize> = (plan.k..plan.k + plan.t).collect();
    let pad = e.select_columns(&pad_cols);
    let witness = sets
        .par_iter()
        .find_first(|w| {
            let rows: Vec<usize> = w.iter().map(|&i| plan.worker_positions[i]).collect();
            pad.select_rows(&rows).rank() < w.len()
        })
        .cloned();
    Ok(LeakageReport {
        colluders,
        sets_checked: sets.len() as u64,
        total_sets: total,
        exhaustive,
        secure: witness.is_none(),
        witness,
    })
}

/// Exhaustive distribution of what `colluders` observe as the padding
/// ranges over all values, for `1 x 1` blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniformityReport {
    pub paddings: u64,
    pub distinct_observations: u64,
    pub possible_observations: u64,
    pub min_count: u64,
    pub max_count: u64,
    pub uniform: bool,
}

pub fn uniformity_check(plan: &SecurePlan, colluders: &[usize], a: &[Elem], b: &[Elem]) -> Result<UniformityReport> {
    let f = plan.field();
    let q = f.order() as u64;
    let t = plan.t;
    let paddings = q
        .checked_pow(2 * t as u32)
        .filter(|&p| p <= 1 << 22)
        .ok_or_else(|| Error::InvalidParameter("padding space too large to enumerate".into()))?;
    let scalar = |v: Elem| FMatrix::from_vec(f, 1, 1, vec![v]);
    let a: Vec<FMatrix> = a.iter().map(|&v| scalar(v)).collect::<Result<_>>()?;
    let b: Vec<FMatrix> = b.iter().map(|&v| scalar(v)).collect::<Result<_>>()?;
    let mut counts: BTreeMap<Vec<Elem>, u64> = BTreeMap::new();
    let mut digits = vec![0; 2 * t];
    for _ in 0..paddings {
        let r: Vec<FMatrix> = digits[..t].iter().map(|&v| scalar(v)).collect::<Result<_>>()?;
        let s: Vec<FMatrix> = digits[t..].iter().map(|&v| scalar(v)).collect::<Result<_>>()?;
        let tasks = secure_encode_with_padding(plan, &a, &b, &r, &s)?;
        let obs: Vec<Elem> = colluders
            .iter()
            .flat_map(|&w| match &tasks[w].payload {
                Payload::Matmul { a, b } => vec![a.get(0, 0), b.get(0, 0)],
                Payload::Multilinear { .. } => unreachable!("secure tasks are matrix products"),
            })
            .collect();
        *counts.entry(obs).or_default() += 1;
        for d in digits.iter_mut().rev() {
            *d += 1;
            if (*d as u64) < q {
                break;
            }
            *d = 0;
        }
    }
    let possible = q.pow(2 * colluders.len() as u32);
    let min_count = counts.values().copied().min().unwrap_or(0);
    let max_count = counts.values().copied().max().unwrap_or(0);
    let distinct = counts.len() as u64;
    Ok(UniformityReport {
        paddings,
        distinct_observations: distinct,
        possible_observations: possible,
        min_count,
        max_count,
        uniform: distinct == possible && min_count == max_count,
    })
}

/// Designed thresholds for the secure scheme with tensor rank `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SecureThresholdReport {
    pub rank: usize,
    pub padding: usize,
    /// Genus used in the formulas: the curve genus for AG codes, otherwise
    /// the generalized genus.
    pub genus: usize,
    pub generalized_genus: usize,
    /// `2(r + t) - 1 + g`.
    pub designed: usize,
    /// `2(r + c) - 1 + 3g` with `c = t - g`.
    pub designed_alt: usize,
    /// `2r - 1 + g`, the scheme without padding.
    pub insecure: usize,
    /// `n - d(C o C) + 1` read off the product code.
    pub from_product: usize,
    pub measured: Option<usize>,
}

pub fn secure_threshold_report(plan: &SecurePlan, rank: usize) -> Result<SecureThresholdReport> {
    if rank > plan.k {
        return Err(Error::Hypothesis(format!(
            "tensor rank r = {rank} exceeds the number of real inputs k = {}",
            plan.k
        )));
    }
    let g = plan.curve_genus.unwrap_or(plan.generalized_genus);
    let t = plan.t;
    let c = t.saturating_sub(g);
    Ok(SecureThresholdReport {
        rank,
        padding: t,
        genus: g,
        generalized_genus: plan.generalized_genus,
        designed: 2 * (rank + t) - 1 + g,
        designed_alt: 2 * (rank + c) - 1 + 3 * g,
        insecure: 2 * rank - 1 + g,
        from_product: (plan.mother.len() + 1).saturating_sub(plan.product_distance),
        measured: None,
    })
}

impl MotherFamily {
    pub fn of_code(code: &LinearCode) -> Option<Self> {
        match code.family() {
            Family::ReedSolomon { .. } => Some(MotherFamily::ReedSolomon {
                q: code.field().order() as u64,
            }),
            Family::Hermitian { q, .. } => Some(MotherFamily::Hermitian { q: *q }),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs_plan() -> SecurePlan {
        SecurePlan::new(&MotherFamily::ReedSolomon { q: 17 }, 10, 2, 2).unwrap()
    }

    #[test]
    fn rs_plan_parameters() {
        let p = rs_plan();
        assert_eq!((p.mother().len(), p.mother().dim()), (14, 4));
        assert_eq!(p.collusion_tolerance(), 2);
        assert_eq!(p.systematic_positions(), &[10, 11, 12, 13]);
        assert_eq!(p.worker_positions(), &(0..10).collect::<Vec<_>>()[..]);
        assert_eq!(p.wait_for(), 7);
    }

    #[test]
    fn zero_padding_is_rejected() {
        let err = SecurePlan::new(&MotherFamily::ReedSolomon { q: 17 }, 10, 2, 0).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
        assert!(SecurePlan::new(&MotherFamily::ReedSolomon { q: 7 }, 10, 2, 2).is_err());
    }

    #[test]
    fn masking_is_sharp_for_rs() {
        let p = rs_plan();
        assert!(collusion_leakage_check(&p, 2, 1000).unwrap().secure);
        let three = collusion_leakage_check(&p, 3, 1000).unwrap();
        assert_eq!(three.witness, Some(vec![0, 1, 2]));
        assert!(collusion_leakage_check(&p, 0, 1000).unwrap().secure);
    }

    #[test]
    fn seeds_change_tasks_not_results() {
        let p = rs_plan();
        let f = p.field().clone();
        let a: Vec<FMatrix> = (0..2).map(|i| FMatrix::from_vec(&f, 2, 2, vec![i, 1, 2, 3]).unwrap()).collect();
        let b: Vec<FMatrix> = (0..2).map(|i| FMatrix::from_vec(&f, 2, 1, vec![5, i]).unwrap()).collect();
        let e1 = secure_encode(&p, &a, &b, 1).unwrap();
        assert_eq!(e1, secure_encode(&p, &a, &b, 1).unwrap());
        assert_ne!(e1.tasks, secure_encode(&p, &a, &b, 2).unwrap().tasks);
        for seed in [1, 2] {
            let out = run_secure_matmul(&p, &a, &b, seed, &FaultPattern::stragglers(&[1, 4, 9])).unwrap();
            for i in 0..2 {
                assert_eq!(out[i], a[i].mul(&b[i]).unwrap());
            }
        }
    }

    #[test]
    fn threshold_formulas() {
        let p = rs_plan();
        let r = secure_threshold_report(&p, 2).unwrap();
        assert_eq!((r.designed, r.designed_alt, r.insecure, r.from_product), (7, 7, 3, 7));
    }
}
