//! Coded batch matrix multiplication and its composition with a bilinear
//! tensor for a single large product.

use rayon::prelude::*;

use super::{result_table, FaultPattern, JobPlan, Payload, Status, WorkerResult, WorkerTask};
use crate::algebra::{FMatrix, Field};
use crate::codes::{stack_symbols, unstack_symbols, Family, LinearCode};
use crate::error::{Error, Result};
use crate::tensors::{BilinearTensor, BlockMatrix};

/// The product codeword recovered by the master.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    /// `n x L` codeword of the product code.
    pub codeword: FMatrix,
    /// Workers whose results were used.
    pub used: Vec<usize>,
    /// Used workers whose results disagreed with the codeword.
    pub corrected: Vec<usize>,
}

impl Decoded {
    /// Symbols at `positions` reshaped to `rows x cols` blocks.
    pub fn blocks_at(&self, positions: &[usize], rows: usize, cols: usize) -> Result<Vec<FMatrix>> {
        unstack_symbols(&self.codeword.select_rows(positions), rows, cols)
    }
}

fn check_blocks(blocks: &[FMatrix], k: usize, side: &str) -> Result<(usize, usize)> {
    if blocks.len() != k {
        return Err(Error::Dimension(format!("{} {side} blocks for k = {k}", blocks.len())));
    }
    let shape = blocks[0].shape();
    if blocks.iter().any(|b| b.shape() != shape) {
        return Err(Error::Dimension(format!("{side} blocks differ in shape")));
    }
    Ok(shape)
}

fn require_matmul(plan: &JobPlan) -> Result<()> {
    if plan.codes().len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "matrix multiplication needs two codes, the plan has {}",
            plan.codes().len()
        )));
    }
    Ok(())
}

/// Systematically embeds `A_1..A_k` in `C1` and `B_1..B_k` in `C2` at the
/// plan positions; worker `w` receives coordinate `w` of both codewords.
pub fn encode_batch(plan: &JobPlan, a: &[FMatrix], b: &[FMatrix]) -> Result<Vec<WorkerTask>> {
    require_matmul(plan)?;
    let (p, s) = check_blocks(a, plan.k(), "A")?;
    let (s2, q) = check_blocks(b, plan.k(), "B")?;
    if s != s2 {
        return Err(Error::Dimension(format!("A blocks are {p}x{s} but B blocks are {s2}x{q}")));
    }
    let pos = plan.positions();
    let ea = plan.codes()[0].systematic_embed(pos, &stack_symbols(a)?)?;
    let eb = plan.codes()[1].systematic_embed(pos, &stack_symbols(b)?)?;
    let ua = unstack_symbols(&ea, p, s)?;
    let ub = unstack_symbols(&eb, s, q)?;
    Ok(ua
        .into_iter()
        .zip(ub)
        .enumerate()
        .map(|(worker, (a, b))| WorkerTask {
            worker,
            payload: Payload::Matmul { a, b },
        })
        .collect())
}

/// Honest worker computation.
pub fn worker_compute(task: &WorkerTask) -> Result<WorkerResult> {
    let value = match &task.payload {
        Payload::Matmul { a, b } => a.mul(b)?,
        Payload::Multilinear { scalars, vector } => {
            let f = vector.field();
            let s = scalars.iter().fold(f.one(), |acc, &x| f.mul(acc, x));
            vector.scale(s)
        }
    };
    Ok(WorkerResult {
        worker: task.worker,
        value: Some(value),
        status: Status::Ok,
    })
}

pub(crate) fn compute_all(tasks: &[WorkerTask]) -> Result<Vec<WorkerResult>> {
    tasks.par_iter().map(worker_compute).collect()
}

/// Decodes the product codeword from every present result, treating absent
/// workers as erasures and correcting up to `b` errors.
pub fn decode_present(plan: &JobPlan, results: &[WorkerResult]) -> Result<Decoded> {
    let table = result_table(plan.workers(), results)?;
    decode_table(plan.product(), plan.byzantine(), &table, plan.designed_threshold())
}

/// Decodes a position-indexed table of symbols of `product` (absent entries
/// are erasures) with up to `b` errors: erasure decoding when `b = 0`,
/// Berlekamp-Welch for Reed-Solomon codes, nearest codeword otherwise.
pub(crate) fn decode_table(
    product: &LinearCode,
    b: usize,
    table: &[Option<FMatrix>],
    required: usize,
) -> Result<Decoded> {
    let n = product.len();
    let used: Vec<usize> = (0..n).filter(|&w| table[w].is_some()).collect();
    let first = used
        .first()
        .and_then(|&w| table[w].as_ref())
        .ok_or(Error::InsufficientResults { present: 0, required })?;
    let field = first.field().clone();
    let shape = first.shape();
    let mut received = FMatrix::zeros(&field, n, shape.0 * shape.1);
    for &w in &used {
        let v = table[w].as_ref().expect("present");
        if v.shape() != shape {
            return Err(Error::Dimension(format!("worker {w} returned a {:?} result", v.shape())));
        }
        received.row_mut(w).copy_from_slice(v.data());
    }
    let present: Vec<bool> = table.iter().map(Option::is_some).collect();
    let codeword = if b == 0 {
        product.erasure_decode(&received, &present)?
    } else if matches!(product.family(), Family::ReedSolomon { .. }) {
        product.rs_error_erasure_decode(&received, &present, b)?.codeword
    } else {
        nearest_decode(product, &received, &used, &field)?
    };
    let corrected = used
        .iter()
        .copied()
        .filter(|&w| codeword.row(w) != received.row(w))
        .collect();
    Ok(Decoded {
        codeword,
        used,
        corrected,
    })
}

/// Column-wise nearest-codeword decoding on the code punctured to the
/// present positions.
fn nearest_decode(code: &LinearCode, received: &FMatrix, used: &[usize], field: &Field) -> Result<FMatrix> {
    let punctured = LinearCode::from_generator(code.generator().select_columns(used))
        .map_err(|_| Error::DecodeFailure("present positions do not determine the codeword".into()))?;
    let mut message = FMatrix::zeros(field, code.dim(), received.cols());
    for col in 0..received.cols() {
        let word: Vec<_> = used.iter().map(|&w| received.get(w, col)).collect();
        let near = punctured.nearest_codeword(&word)?;
        for (r, &m) in near.message.iter().enumerate() {
            message.set(r, col, m);
        }
    }
    code.encode(&message)
}

/// Decodes from the lowest-ID `wait_for` present results and reads
/// `A_i B_i` at the plan positions.
pub fn decode_batch(plan: &JobPlan, results: &[WorkerResult]) -> Result<Vec<FMatrix>> {
    require_matmul(plan)?;
    let (decoded, shape) = decode_waited(plan, results)?;
    decoded.blocks_at(plan.positions(), shape.0, shape.1)
}

pub(crate) fn decode_waited(plan: &JobPlan, results: &[WorkerResult]) -> Result<(Decoded, (usize, usize))> {
    let table = result_table(plan.workers(), results)?;
    let present: Vec<usize> = (0..plan.workers()).filter(|&w| table[w].is_some()).collect();
    let required = plan.wait_for();
    if present.len() < required {
        return Err(Error::InsufficientResults {
            present: present.len(),
            required,
        });
    }
    let waited: Vec<WorkerResult> = present[..required]
        .iter()
        .map(|&w| WorkerResult {
            worker: w,
            value: table[w].clone(),
            status: Status::Ok,
        })
        .collect();
    let shape = waited[0].value.as_ref().expect("present").shape();
    Ok((decode_present(plan, &waited)?, shape))
}

/// Encode, compute on every worker, apply faults, decode.
pub fn run_batch_matmul(plan: &JobPlan, a: &[FMatrix], b: &[FMatrix], faults: &FaultPattern) -> Result<Vec<FMatrix>> {
    let tasks = encode_batch(plan, a, b)?;
    let results = faults.apply(compute_all(&tasks)?)?;
    decode_batch(plan, &results)
}

fn check_tensor(plan: &JobPlan, t: &BilinearTensor) -> Result<()> {
    require_matmul(plan)?;
    if plan.k() < t.rank() {
        return Err(Error::Hypothesis(format!(
            "code dimension k = {} < tensor rank R = {}",
            plan.k(),
            t.rank()
        )));
    }
    if t.field() != plan.product().field() {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

fn pad(mut blocks: Vec<FMatrix>, k: usize) -> Vec<FMatrix> {
    let (f, shape) = (blocks[0].field().clone(), blocks[0].shape());
    blocks.resize_with(k, || FMatrix::zeros(&f, shape.0, shape.1));
    blocks
}

/// Tensor-encodes `A` and `B` into `r` block pairs (zero-padded to `k`)
/// and codes them as a batch.
pub fn encode_general(plan: &JobPlan, t: &BilinearTensor, a: &BlockMatrix, b: &BlockMatrix) -> Result<Vec<WorkerTask>> {
    check_tensor(plan, t)?;
    let (ah, bh) = t.encode(a, b)?;
    encode_batch(plan, &pad(ah, plan.k()), &pad(bh, plan.k()))
}

/// Recovers the `r` products and applies the tensor's decode map.
pub fn decode_general(plan: &JobPlan, t: &BilinearTensor, results: &[WorkerResult]) -> Result<BlockMatrix> {
    check_tensor(plan, t)?;
    let products = decode_batch(plan, results)?;
    t.decode(&products[..t.rank()])
}

/// The per-worker linear maps from raw blocks to coded blocks: row `w` of
/// the first matrix gives `Ã_w = sum_a M[w][a] A_a` (blocks flattened
/// row-major), and likewise for `B`.
pub fn composed_encoders(plan: &JobPlan, t: &BilinearTensor) -> Result<(FMatrix, FMatrix)> {
    check_tensor(plan, t)?;
    let f = t.field();
    let k = plan.k();
    let padded = |m: &FMatrix| m.vstack(&FMatrix::zeros(f, k - m.rows(), m.cols()));
    let e1 = plan.codes()[0].systematic_encoder(plan.positions())?;
    let e2 = plan.codes()[1].systematic_encoder(plan.positions())?;
    Ok((e1.mul(&padded(t.gamma())?)?, e2.mul(&padded(t.delta())?)?))
}

pub fn run_general_matmul(
    plan: &JobPlan,
    t: &BilinearTensor,
    a: &BlockMatrix,
    b: &BlockMatrix,
    faults: &FaultPattern,
) -> Result<BlockMatrix> {
    let tasks = encode_general(plan, t, a, b)?;
    let results = faults.apply(compute_all(&tasks)?)?;
    decode_general(plan, t, &results)
}
