//! Empirical recovery thresholds: the smallest `R` such that every (or every
//! sampled) set of `R` honest workers determines the output.

use rayon::prelude::*;
use serde::Serialize;

use super::{sample_rng, sample_subset, Job, Mode, SCHEMA_VERSION};
use crate::algebra::FMatrix;
use crate::codes::{Family, LinearCode};
use crate::error::{Error, Result};
use crate::evalcodes::hermitian_genus;
use crate::scheme::{compute_all, describe_code, WorkerResult};
use crate::subsets::{binomial, mask, Combinations};

/// Something whose recovery from a set of workers can be tested.
pub trait RecoveryTarget: Sync {
    fn workers(&self) -> usize;
    fn recovers(&self, present: &[usize]) -> bool;
}

/// Honest results of one job run: recovery from a worker set means the
/// output symbols are the same for every product codeword agreeing with
/// those workers, and equal to the true products.
#[derive(Clone, Debug)]
pub struct JobTarget {
    code: LinearCode,
    worker_positions: Vec<usize>,
    received: FMatrix,
    targets: Vec<usize>,
    expected: FMatrix,
}

impl JobTarget {
    pub fn new(job: &Job, seed: u64) -> Result<Self> {
        let inputs = job.random_inputs(seed);
        let results = compute_all(&job.encode(&inputs, seed)?)?;
        let (code, worker_positions, targets) = match job {
            Job::Batch { plan, .. } | Job::General { plan, .. } | Job::Multilinear { plan, .. } => (
                plan.product().clone(),
                (0..plan.workers()).collect(),
                plan.positions().to_vec(),
            ),
            Job::Secure { plan, .. } => (
                plan.product().clone(),
                plan.worker_positions().to_vec(),
                plan.systematic_positions()[..plan.k()].to_vec(),
            ),
        };
        let received = stack_results(&code, &worker_positions, &results)?;
        let expected = match job {
            Job::Secure { .. } => {
                let products = job.reference(&inputs)?;
                let data: Vec<_> = products.iter().flat_map(|m| m.data().iter().copied()).collect();
                FMatrix::from_vec(code.field(), products.len(), received.cols(), data)?
            }
            _ => received.select_rows(&targets),
        };
        Ok(JobTarget {
            code,
            worker_positions,
            received,
            targets,
            expected,
        })
    }
}

fn stack_results(code: &LinearCode, positions: &[usize], results: &[WorkerResult]) -> Result<FMatrix> {
    let width = results
        .iter()
        .find_map(|r| r.value.as_ref())
        .map(|v| v.rows() * v.cols())
        .ok_or(Error::InsufficientResults { present: 0, required: 1 })?;
    let mut received = FMatrix::zeros(code.field(), code.len(), width);
    for r in results {
        if let Some(v) = &r.value {
            received.row_mut(positions[r.worker]).copy_from_slice(v.data());
        }
    }
    Ok(received)
}

impl RecoveryTarget for JobTarget {
    fn workers(&self) -> usize {
        self.worker_positions.len()
    }

    fn recovers(&self, present: &[usize]) -> bool {
        let at: Vec<usize> = present.iter().map(|&w| self.worker_positions[w]).collect();
        self.code
            .erasure_decode_at(&self.received, &mask(self.code.len(), &at), &self.targets)
            .is_ok_and(|got| got == self.expected)
    }
}

/// Checks at one subset size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeCheck {
    pub size: usize,
    pub checked: u64,
    /// Lexicographically first failing subset found, if any.
    pub failure: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdMeasurement {
    /// `None` when even all workers together fail.
    pub measured: Option<usize>,
    pub mode: String,
    /// Subsets checked per size in sampled mode.
    pub trials: Option<u64>,
    pub checked: u64,
    pub sizes: Vec<SizeCheck>,
    /// A failing subset of size `measured - 1`.
    pub witness: Option<Vec<usize>>,
    /// Exhaustive mode: whether every size above `measured` was also checked
    /// and passed.
    pub monotone: Option<bool>,
    /// Sampled mode only bounds the threshold from above.
    pub guarantee: String,
}

/// Most subsets an exhaustive measurement may check.
pub const SUBSET_BUDGET: u64 = 1 << 22;

const CHUNK: usize = 2048;

/// First failing subset of size `size`, scanning lexicographically in
/// parallel chunks. Returns the failure and the number of subsets checked.
fn first_failure<T: RecoveryTarget>(
    target: &T,
    size: usize,
    spent: u64,
    budget: u64,
) -> Result<(Option<Vec<usize>>, u64)> {
    let n = target.workers();
    let mut it = Combinations::new(n, size);
    let mut checked = 0u64;
    loop {
        let chunk: Vec<Vec<usize>> = it.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            return Ok((None, checked));
        }
        if spent + checked + chunk.len() as u64 > budget {
            return Err(Error::EnumerationBudget {
                size: binomial(n, size),
                budget: budget as u128,
            });
        }
        let hit = chunk.par_iter().position_first(|s| !target.recovers(s));
        match hit {
            Some(i) => return Ok((Some(chunk[i].clone()), checked + i as u64 + 1)),
            None => checked += chunk.len() as u64,
        }
    }
}

pub fn measure_recovery_threshold<T: RecoveryTarget>(target: &T, mode: Mode, seed: u64) -> Result<ThresholdMeasurement> {
    match mode {
        Mode::Exhaustive => measure_exhaustive(target, SUBSET_BUDGET),
        Mode::Sampled { trials } => measure_sampled(target, trials, seed),
    }
}

fn measure_exhaustive<T: RecoveryTarget>(target: &T, budget: u64) -> Result<ThresholdMeasurement> {
    let n = target.workers();
    let mut sizes = Vec::new();
    let mut checked = 0u64;
    let mut measured = None;
    let mut monotone = true;
    for size in 1..=n {
        let (failure, c) = first_failure(target, size, checked, budget)?;
        checked += c;
        if failure.is_some() && measured.is_some() {
            monotone = false;
        }
        if failure.is_none() && measured.is_none() {
            measured = Some(size);
        }
        sizes.push(SizeCheck { size, checked: c, failure });
    }
    let witness = witness_below(measured, &sizes);
    Ok(ThresholdMeasurement {
        measured,
        mode: Mode::Exhaustive.name().into(),
        trials: None,
        checked,
        sizes,
        witness,
        monotone: Some(monotone),
        guarantee: "every subset of each size from the measured value up was checked; each smaller size has a failing subset".into(),
    })
}

fn measure_sampled<T: RecoveryTarget>(target: &T, trials: u64, seed: u64) -> Result<ThresholdMeasurement> {
    if trials == 0 {
        return Err(Error::InvalidParameter("sampled mode needs at least one trial".into()));
    }
    let n = target.workers();
    let mut rng = sample_rng(seed);
    let mut sizes = Vec::new();
    let mut checked = 0u64;
    let mut measured = None;
    for size in 1..=n {
        let subsets: Vec<Vec<usize>> = (0..trials).map(|_| sample_subset(&mut rng, n, size)).collect();
        let hit = subsets.par_iter().position_first(|s| !target.recovers(s));
        let c = hit.map_or(trials, |i| i as u64 + 1);
        checked += c;
        let failure = hit.map(|i| subsets[i].clone());
        let done = failure.is_none();
        sizes.push(SizeCheck { size, checked: c, failure });
        if done {
            measured = Some(size);
            break;
        }
    }
    let witness = witness_below(measured, &sizes);
    Ok(ThresholdMeasurement {
        measured,
        mode: "sampled".into(),
        trials: Some(trials),
        checked,
        sizes,
        witness,
        monotone: None,
        guarantee: format!("no failure found in {trials} random subsets of the measured size; the true threshold may be larger"),
    })
}

fn witness_below(measured: Option<usize>, sizes: &[SizeCheck]) -> Option<Vec<usize>> {
    let m = measured?;
    sizes.iter().find(|s| s.size + 1 == m).and_then(|s| s.failure.clone())
}

/// A measured threshold next to the closed-form predictions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdReport {
    pub schema_version: u32,
    pub job: String,
    pub code: String,
    /// Number of codes multiplied together.
    pub ell: usize,
    /// Dimension of each factor code.
    pub k: usize,
    /// Generalized genus of a factor code.
    pub genus: usize,
    /// Curve genus for Hermitian codes.
    pub curve_genus: Option<usize>,
    pub workers: usize,
    pub product_dim: usize,
    pub product_distance: usize,
    /// `n - d + 1` of the product code.
    pub designed: usize,
    /// `ell * k + g - 1`, with `g` the curve genus when there is one.
    pub key_ag: usize,
    /// `ell * (k + 𝔤 - 1) + 1`, from `d(C^ell) >= ell * d - (ell - 1) * n`.
    pub log_additive_bound: usize,
    pub measured: Option<usize>,
    /// Names of the formulas equal to the measured value.
    pub matches: Vec<String>,
    pub measurement: ThresholdMeasurement,
}

fn exact_genus(code: &LinearCode) -> Result<usize> {
    match code.distance_bound() {
        Some((d, true)) => Ok(code.len() + 1 - code.dim() - d),
        _ => code.generalized_genus(),
    }
}

/// Measures a job's threshold and compares it with the formulas.
pub fn threshold_report(job: &Job, mode: Mode, seed: u64) -> Result<ThresholdReport> {
    let (code, ell, product, product_distance) = match job {
        Job::Batch { plan, .. } | Job::General { plan, .. } | Job::Multilinear { plan, .. } => (
            plan.codes()[0].clone(),
            plan.codes().len(),
            plan.product(),
            plan.product_distance(),
        ),
        Job::Secure { plan, .. } => (plan.mother().clone(), 2, plan.product(), plan.product_distance()),
    };
    let k = code.dim();
    let genus = match job {
        Job::Secure { plan, .. } => plan.generalized_genus(),
        _ => exact_genus(&code)?,
    };
    let curve_genus = match code.family() {
        Family::Hermitian { q, .. } => Some(hermitian_genus(*q) as usize),
        _ => None,
    };
    let g = curve_genus.unwrap_or(genus);
    let designed = job.designed_threshold();
    let key_ag = ell * k + g - 1;
    let log_additive_bound = ell * (k + genus - 1) + 1;
    let target = JobTarget::new(job, seed)?;
    let measurement = measure_recovery_threshold(&target, mode, seed)?;
    let measured = measurement.measured;
    let matches = [
        ("designed", designed),
        ("key_ag", key_ag),
        ("log_additive_bound", log_additive_bound),
    ]
    .iter()
    .filter(|(_, v)| Some(*v) == measured)
    .map(|(name, _)| name.to_string())
    .collect();
    Ok(ThresholdReport {
        schema_version: SCHEMA_VERSION,
        job: job.name().into(),
        code: describe_code(&code),
        ell,
        k,
        genus,
        curve_genus,
        workers: job.workers(),
        product_dim: product.dim(),
        product_distance,
        designed,
        key_ag,
        log_additive_bound,
        measured,
        matches,
        measurement,
    })
}

pub fn csv_header() -> &'static str {
    "code,ℓ,k,𝔤,designed,measured,mode,trials"
}

impl ThresholdReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            csv_field(&self.code),
            self.ell,
            self.k,
            self.genus,
            self.designed,
            self.measured.map_or(String::new(), |m| m.to_string()),
            self.measurement.mode,
            self.measurement.trials.map_or(String::new(), |t| t.to_string()),
        )
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
