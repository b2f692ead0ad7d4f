//! Simulated master-worker runs with straggler and byzantine injection,
//! replayable transcripts, and recovery-threshold measurement.

mod spec;
mod threshold;

use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{Elem, FMatrix, Field};
use crate::error::{Error, Result};
use crate::scheme::{
    decode_batch, decode_general, decode_multilinear, encode_batch, encode_general, encode_multilinear,
    worker_compute, FaultPattern, JobPlan, Status, WorkerResult, WorkerTask,
};
use crate::security::{secure_decode, secure_encode, SecurePlan};
use crate::subsets::{binomial, Combinations};
use crate::tensors::{BilinearTensor, BlockMatrix, MultilinearDecomp};

pub use spec::{parse_config, parse_tensor, CodeSpec, Mode, TensorSpec};
pub use threshold::{
    csv_header, measure_recovery_threshold, threshold_report, JobTarget, RecoveryTarget, ThresholdMeasurement,
    ThresholdReport, SUBSET_BUDGET,
};

/// Version of every JSON document the harness writes.
pub const SCHEMA_VERSION: u32 = 1;

/// A planned computation.
#[derive(Clone, Debug)]
pub enum Job {
    /// `k` products `A_i B_i` of `p x s` by `s x q` blocks.
    Batch { plan: JobPlan, block: (usize, usize, usize) },
    /// One product of block matrices through a bilinear tensor.
    General {
        plan: JobPlan,
        tensor: BilinearTensor,
        block: (usize, usize, usize),
    },
    Multilinear { plan: JobPlan, map: MultilinearDecomp },
    Secure { plan: SecurePlan, block: (usize, usize, usize) },
}

/// Inputs of a job.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Inputs {
    Pairs { a: Vec<FMatrix>, b: Vec<FMatrix> },
    Matrices { a: FMatrix, b: FMatrix },
    Vectors { xs: Vec<Vec<Elem>> },
}

/// Independent random stream `stream` derived from `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const INPUT_STREAM: u64 = 1;
const FAULT_STREAM: u64 = 2;
const SAMPLE_STREAM: u64 = 3;

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Batch { .. } => "batch-matmul",
            Job::General { .. } => "general-matmul",
            Job::Multilinear { .. } => "tensor",
            Job::Secure { .. } => "secure-matmul",
        }
    }

    pub fn field(&self) -> &Field {
        match self {
            Job::Batch { plan, .. } | Job::General { plan, .. } | Job::Multilinear { plan, .. } => {
                plan.product().field()
            }
            Job::Secure { plan, .. } => plan.field(),
        }
    }

    pub fn workers(&self) -> usize {
        match self {
            Job::Batch { plan, .. } | Job::General { plan, .. } | Job::Multilinear { plan, .. } => plan.workers(),
            Job::Secure { plan, .. } => plan.workers(),
        }
    }

    pub fn wait_for(&self) -> usize {
        match self {
            Job::Batch { plan, .. } | Job::General { plan, .. } | Job::Multilinear { plan, .. } => plan.wait_for(),
            Job::Secure { plan, .. } => plan.wait_for(),
        }
    }

    /// `n - d + 1` over the workers.
    pub fn designed_threshold(&self) -> usize {
        match self {
            Job::Secure { plan, .. } => plan.wait_for() - 2 * plan.byzantine(),
            Job::Batch { plan, .. } | Job::General { plan, .. } | Job::Multilinear { plan, .. } => {
                plan.designed_threshold()
            }
        }
    }

    pub fn byzantine(&self) -> usize {
        match self {
            Job::Batch { plan, .. } | Job::General { plan, .. } | Job::Multilinear { plan, .. } => plan.byzantine(),
            Job::Secure { plan, .. } => plan.byzantine(),
        }
    }

    pub fn plan_json(&self) -> serde_json::Value {
        let v = match self {
            Job::Batch { plan, .. } | Job::Multilinear { plan, .. } => serde_json::to_value(plan.summary()),
            Job::General { plan, tensor, .. } => {
                let mut v = serde_json::to_value(plan.summary()).expect("summary serializes");
                v["tensor"] = tensor.to_json();
                Ok(v)
            }
            Job::Secure { plan, .. } => serde_json::to_value(plan.summary()),
        };
        v.expect("summary serializes")
    }

    /// Uniform random inputs from the seed.
    pub fn random_inputs(&self, seed: u64) -> Inputs {
        let mut rng = rng_for(seed, INPUT_STREAM);
        let f = self.field().clone();
        let pairs = |k: usize, (p, s, q): (usize, usize, usize), rng: &mut ChaCha8Rng| Inputs::Pairs {
            a: (0..k).map(|_| FMatrix::random(&f, p, s, rng)).collect(),
            b: (0..k).map(|_| FMatrix::random(&f, s, q, rng)).collect(),
        };
        match self {
            Job::Batch { plan, block } => pairs(plan.k(), *block, &mut rng),
            Job::Secure { plan, block } => pairs(plan.k(), *block, &mut rng),
            Job::General { tensor, block, .. } => {
                let (c, z, u) = tensor.shape();
                let (p, s, q) = *block;
                Inputs::Matrices {
                    a: FMatrix::random(&f, c * p, z * s, &mut rng),
                    b: FMatrix::random(&f, z * s, u * q, &mut rng),
                }
            }
            Job::Multilinear { map, .. } => Inputs::Vectors {
                xs: map
                    .input_dims()
                    .iter()
                    .map(|&m| (0..m).map(|_| f.random(&mut rng)).collect())
                    .collect(),
            },
        }
    }

    fn general_blocks(tensor: &BilinearTensor, a: &FMatrix, b: &FMatrix) -> Result<(BlockMatrix, BlockMatrix)> {
        let (c, z, u) = tensor.shape();
        Ok((BlockMatrix::partition(a, c, z)?, BlockMatrix::partition(b, z, u)?))
    }

    /// One task per worker.
    pub fn encode(&self, inputs: &Inputs, seed: u64) -> Result<Vec<WorkerTask>> {
        match (self, inputs) {
            (Job::Batch { plan, .. }, Inputs::Pairs { a, b }) => encode_batch(plan, a, b),
            (Job::Secure { plan, .. }, Inputs::Pairs { a, b }) => Ok(secure_encode(plan, a, b, seed)?.tasks),
            (Job::General { plan, tensor, .. }, Inputs::Matrices { a, b }) => {
                let (ab, bb) = Self::general_blocks(tensor, a, b)?;
                encode_general(plan, tensor, &ab, &bb)
            }
            (Job::Multilinear { plan, map }, Inputs::Vectors { xs }) => encode_multilinear(plan, map, xs),
            _ => Err(Error::InvalidParameter(format!("inputs do not fit a {} job", self.name()))),
        }
    }

    /// The computation's output from worker results.
    pub fn decode(&self, results: &[WorkerResult]) -> Result<Vec<FMatrix>> {
        match self {
            Job::Batch { plan, .. } => decode_batch(plan, results),
            Job::Secure { plan, .. } => secure_decode(plan, results),
            Job::General { plan, tensor, .. } => Ok(vec![decode_general(plan, tensor, results)?.assemble()]),
            Job::Multilinear { plan, map } => {
                let v = decode_multilinear(plan, map, results)?;
                Ok(vec![FMatrix::from_vec(map.field(), 1, v.len(), v)?])
            }
        }
    }

    /// The same computation done directly.
    pub fn reference(&self, inputs: &Inputs) -> Result<Vec<FMatrix>> {
        match (self, inputs) {
            (Job::Batch { .. } | Job::Secure { .. }, Inputs::Pairs { a, b }) => {
                a.iter().zip(b).map(|(x, y)| x.mul(y)).collect()
            }
            (Job::General { .. }, Inputs::Matrices { a, b }) => Ok(vec![a.mul(b)?]),
            (Job::Multilinear { map, .. }, Inputs::Vectors { xs }) => {
                let v = map.eval(xs)?;
                Ok(vec![FMatrix::from_vec(map.field(), 1, v.len(), v)?])
            }
            _ => Err(Error::InvalidParameter(format!("inputs do not fit a {} job", self.name()))),
        }
    }
}

/// How a set of faulty workers is chosen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Selection {
    Explicit { workers: Vec<usize> },
    /// `count` distinct workers drawn from the seeded stream.
    Random { count: usize },
    /// Every subset of size `count` in turn.
    Adversarial { count: usize },
}

impl Selection {
    pub fn none() -> Self {
        Selection::Explicit { workers: Vec::new() }
    }

    fn count(&self) -> usize {
        match self {
            Selection::Explicit { workers } => workers.len(),
            Selection::Random { count } | Selection::Adversarial { count } => *count,
        }
    }
}

/// Straggler and byzantine selections. Byzantine workers are chosen among
/// the non-stragglers; their results are replaced by uniform random values,
/// redrawn while equal to the true result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaultSpec {
    pub stragglers: Selection,
    pub byzantine: Selection,
    pub seed: u64,
}

/// Most fault patterns an adversarial selection may expand to.
pub const PATTERN_BUDGET: u128 = 1 << 16;

impl FaultSpec {
    pub fn none() -> Self {
        FaultSpec {
            stragglers: Selection::none(),
            byzantine: Selection::none(),
            seed: 0,
        }
    }

    /// Straggler and byzantine sets, one pair per pattern to run.
    pub fn patterns(&self, n: usize) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
        let s = self.stragglers.count();
        let b = self.byzantine.count();
        if s + b > n {
            return Err(Error::InvalidParameter(format!("{s} stragglers and {b} byzantine among {n} workers")));
        }
        let mut rng = rng_for(self.seed, FAULT_STREAM);
        let total = match (&self.stragglers, &self.byzantine) {
            (Selection::Adversarial { .. }, Selection::Adversarial { .. }) => binomial(n, s).saturating_mul(binomial(n - s, b)),
            (Selection::Adversarial { .. }, _) => binomial(n, s),
            (_, Selection::Adversarial { .. }) => binomial(n - s, b),
            _ => 1,
        };
        if total > PATTERN_BUDGET {
            return Err(Error::EnumerationBudget {
                size: total,
                budget: PATTERN_BUDGET,
            });
        }
        let straggler_sets: Vec<Vec<usize>> = match &self.stragglers {
            Selection::Explicit { workers } => {
                check_ids(workers, n)?;
                vec![workers.clone()]
            }
            Selection::Random { count } => vec![sorted(sample(&mut rng, n, *count).into_vec())],
            Selection::Adversarial { count } => Combinations::new(n, *count).collect(),
        };
        let mut out = Vec::new();
        for st in straggler_sets {
            let rest: Vec<usize> = (0..n).filter(|w| !st.contains(w)).collect();
            let byz_sets: Vec<Vec<usize>> = match &self.byzantine {
                Selection::Explicit { workers } => {
                    check_ids(workers, n)?;
                    if workers.iter().any(|w| st.contains(w)) {
                        return Err(Error::InvalidParameter(
                            "straggler and byzantine sets must be disjoint".into(),
                        ));
                    }
                    vec![workers.clone()]
                }
                Selection::Random { count } => {
                    vec![sorted(sample(&mut rng, rest.len(), *count).into_iter().map(|i| rest[i]).collect())]
                }
                Selection::Adversarial { count } => Combinations::new(rest.len(), *count)
                    .map(|c| c.into_iter().map(|i| rest[i]).collect())
                    .collect(),
            };
            for bz in byz_sets {
                out.push((st.clone(), bz));
            }
        }
        Ok(out)
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

fn check_ids(ids: &[usize], n: usize) -> Result<()> {
    match ids.iter().find(|&&w| w >= n) {
        Some(w) => Err(Error::InvalidParameter(format!("no worker {w} among {n}"))),
        None => Ok(()),
    }
}

/// Replaces each byzantine result by a uniform value different from it.
pub fn corrupt<R: rand::Rng>(honest: &[WorkerResult], byzantine: &[usize], rng: &mut R) -> Result<FaultPattern> {
    let mut pattern = FaultPattern::default();
    for &w in byzantine {
        let truth = honest
            .iter()
            .find(|r| r.worker == w)
            .and_then(|r| r.value.as_ref())
            .ok_or_else(|| Error::InvalidParameter(format!("no result from worker {w}")))?;
        let (rows, cols) = truth.shape();
        let value = loop {
            let v = FMatrix::random(truth.field(), rows, cols, rng);
            if &v != truth {
                break v;
            }
        };
        pattern.corruptions.insert(w, value);
    }
    Ok(pattern)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WorkerRecord {
    pub worker: usize,
    pub status: Status,
    pub task: WorkerTask,
    pub result: Option<FMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub success: bool,
    pub matches_reference: bool,
    pub error: Option<String>,
}

/// Record of one simulated run (the first failing fault pattern, or the
/// first pattern when all succeed).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transcript {
    pub schema_version: u32,
    pub job: String,
    pub plan: serde_json::Value,
    pub seed: u64,
    pub fault_spec: FaultSpec,
    pub stragglers: Vec<usize>,
    pub byzantine: Vec<usize>,
    pub inputs: Inputs,
    pub workers: Vec<WorkerRecord>,
    pub outcome: Outcome,
    pub output: Option<Vec<FMatrix>>,
    pub reference: Vec<FMatrix>,
    pub patterns_tested: u64,
    pub patterns_failed: u64,
    pub designed_threshold: usize,
    pub wait_for: usize,
    pub measured_threshold: Option<usize>,
    /// Not serialized, so equal seeds give byte-identical JSON.
    #[serde(skip)]
    pub wall_clock: Duration,
}

struct Run {
    stragglers: Vec<usize>,
    byzantine: Vec<usize>,
    results: Vec<WorkerResult>,
    output: Result<Vec<FMatrix>>,
}

/// Encode, compute, inject faults, decode; once per fault pattern.
pub fn simulate(job: &Job, inputs: &Inputs, faults: &FaultSpec) -> Result<Transcript> {
    let start = Instant::now();
    let n = job.workers();
    let tasks = job.encode(inputs, faults.seed)?;
    let honest: Vec<WorkerResult> = crate::scheme::compute_all(&tasks)?;
    let reference = job.reference(inputs)?;
    let patterns = faults.patterns(n)?;
    let mut rng = rng_for(faults.seed, FAULT_STREAM ^ 0x100);

    let mut first: Option<Run> = None;
    let mut first_failure: Option<Run> = None;
    let mut failed = 0u64;
    for (stragglers, byzantine) in &patterns {
        let mut pattern = corrupt(&honest, byzantine, &mut rng)?;
        pattern.stragglers = stragglers.clone();
        let results = pattern.apply(honest.clone())?;
        let output = job.decode(&results);
        let ok = matches!(&output, Ok(o) if *o == reference);
        let run = Run {
            stragglers: stragglers.clone(),
            byzantine: byzantine.clone(),
            results,
            output,
        };
        if !ok {
            failed += 1;
            if first_failure.is_none() {
                first_failure = Some(run);
                continue;
            }
        }
        if first.is_none() {
            first = Some(run);
        }
    }
    let run = first_failure.or(first).expect("at least one pattern");
    let workers = tasks
        .iter()
        .zip(&run.results)
        .map(|(t, r)| WorkerRecord {
            worker: t.worker,
            status: r.status,
            task: t.clone(),
            result: r.value.clone(),
        })
        .collect();
    let (output, error) = match run.output {
        Ok(o) => (Some(o), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let matches_reference = output.as_ref() == Some(&reference);
    Ok(Transcript {
        schema_version: SCHEMA_VERSION,
        job: job.name().into(),
        plan: job.plan_json(),
        seed: faults.seed,
        fault_spec: faults.clone(),
        stragglers: run.stragglers,
        byzantine: run.byzantine,
        inputs: inputs.clone(),
        workers,
        outcome: Outcome {
            success: failed == 0,
            matches_reference,
            error,
        },
        output,
        reference,
        patterns_tested: patterns.len() as u64,
        patterns_failed: failed,
        designed_threshold: job.designed_threshold(),
        wait_for: job.wait_for(),
        measured_threshold: None,
        wall_clock: start.elapsed(),
    })
}

/// One honest run of a job on the given workers only, for replay tests.
pub fn run_on(job: &Job, inputs: &Inputs, seed: u64, present: &[usize]) -> Result<Vec<FMatrix>> {
    let tasks = job.encode(inputs, seed)?;
    let results: Vec<WorkerResult> = tasks
        .iter()
        .filter(|t| present.contains(&t.worker))
        .map(worker_compute)
        .collect::<Result<_>>()?;
    job.decode(&results)
}

pub(crate) fn sample_subset(rng: &mut ChaCha8Rng, n: usize, size: usize) -> Vec<usize> {
    sorted(sample(rng, n, size).into_vec())
}

pub(crate) fn sample_rng(seed: u64) -> ChaCha8Rng {
    rng_for(seed, SAMPLE_STREAM)
}
