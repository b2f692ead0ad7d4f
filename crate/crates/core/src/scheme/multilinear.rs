//! Coded evaluation of a multilinear map `T(x_1, ..., x_l) = sum_i t^(i)`
//! given as `R` rank-1 terms.
//!
//! Term `i` contributes `t^(i)_1(x_1) ... t^(i)_l(x_l) y_i`. The scalars
//! `t^(i)_j(x_j)` are embedded at the plan positions of `C_j` and the
//! vectors `y_i` at those of `C_(l+1)`; each worker multiplies its `l`
//! scalars into its vector, so the results form a codeword of
//! `C_1 o ... o C_(l+1)` whose systematic symbols are the rank-1 values.

use super::matmul::{compute_all, decode_waited};
use super::{FaultPattern, JobPlan, Payload, WorkerResult, WorkerTask};
use crate::algebra::{Elem, FMatrix};
use crate::error::{Error, Result};
use crate::tensors::MultilinearDecomp;

fn check(plan: &JobPlan, t: &MultilinearDecomp) -> Result<()> {
    if plan.codes().len() != t.arity() + 1 {
        return Err(Error::InvalidParameter(format!(
            "a map with {} inputs needs {} codes, the plan has {}",
            t.arity(),
            t.arity() + 1,
            plan.codes().len()
        )));
    }
    if plan.k() < t.rank() {
        return Err(Error::Hypothesis(format!(
            "code dimension k = {} < decomposition rank R = {}",
            plan.k(),
            t.rank()
        )));
    }
    if t.field() != plan.product().field() {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

pub fn encode_multilinear(plan: &JobPlan, t: &MultilinearDecomp, xs: &[Vec<Elem>]) -> Result<Vec<WorkerTask>> {
    check(plan, t)?;
    t.check_inputs(xs)?;
    let f = t.field();
    let k = plan.k();
    let pos = plan.positions();
    let mut scalar_words = Vec::with_capacity(t.arity());
    for j in 0..t.arity() {
        let mut message = FMatrix::zeros(f, k, 1);
        for (i, term) in t.terms().iter().enumerate() {
            message.set(i, 0, term.form_values(f, xs)[j]);
        }
        scalar_words.push(plan.codes()[j].systematic_embed(pos, &message)?);
    }
    let mut vectors = FMatrix::zeros(f, k, t.output_dim());
    for (i, term) in t.terms().iter().enumerate() {
        vectors.row_mut(i).copy_from_slice(&term.output);
    }
    let vector_word = plan.codes()[t.arity()].systematic_embed(pos, &vectors)?;
    (0..plan.workers())
        .map(|w| {
            Ok(WorkerTask {
                worker: w,
                payload: Payload::Multilinear {
                    scalars: scalar_words.iter().map(|c| c.get(w, 0)).collect(),
                    vector: FMatrix::from_vec(f, 1, t.output_dim(), vector_word.row(w).to_vec())?,
                },
            })
        })
        .collect()
}

/// Decodes the product codeword and sums the rank-1 values.
pub fn decode_multilinear(plan: &JobPlan, t: &MultilinearDecomp, results: &[WorkerResult]) -> Result<Vec<Elem>> {
    check(plan, t)?;
    let (decoded, _) = decode_waited(plan, results)?;
    let f = t.field();
    let mut out = vec![0; t.output_dim()];
    for &p in &plan.positions()[..t.rank()] {
        for (o, &v) in out.iter_mut().zip(decoded.codeword.row(p)) {
            *o = f.add(*o, v);
        }
    }
    Ok(out)
}

pub fn run_multilinear(
    plan: &JobPlan,
    t: &MultilinearDecomp,
    xs: &[Vec<Elem>],
    faults: &FaultPattern,
) -> Result<Vec<Elem>> {
    let tasks = encode_multilinear(plan, t, xs)?;
    let results = faults.apply(compute_all(&tasks)?)?;
    decode_multilinear(plan, t, &results)
}
