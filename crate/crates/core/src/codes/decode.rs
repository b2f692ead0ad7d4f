//! Systematic embedding, erasure decoding and error-and-erasure decoding.

use std::collections::BTreeSet;

use super::{Family, LinearCode};
use crate::algebra::{poly, Elem, FMatrix, Field, Solution};
use crate::error::{Error, Result};

/// Result of Berlekamp-Welch decoding on a Reed-Solomon code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsDecoded {
    /// `n x L` codeword.
    pub codeword: FMatrix,
    /// Present coordinates whose symbol disagreed with the decoded codeword.
    pub corrected: Vec<usize>,
    /// Whether `2b + e <= d - 1` held; outside the bound the output is only a
    /// candidate.
    pub within_bound: bool,
}

/// Flattens equally-shaped blocks into the rows of a `k x (P*Q)` matrix.
pub fn stack_symbols(blocks: &[FMatrix]) -> Result<FMatrix> {
    let first = blocks
        .first()
        .ok_or_else(|| Error::InvalidParameter("no message blocks".into()))?;
    let field = first.field().clone();
    let shape = first.shape();
    let mut data = Vec::with_capacity(blocks.len() * shape.0 * shape.1);
    for b in blocks {
        if b.shape() != shape {
            return Err(Error::Dimension(format!(
                "block of shape {:?} among blocks of shape {shape:?}",
                b.shape()
            )));
        }
        if b.field() != &field {
            return Err(Error::FieldMismatch);
        }
        data.extend_from_slice(b.data());
    }
    FMatrix::from_vec(&field, blocks.len(), shape.0 * shape.1, data)
}

/// Inverse of [`stack_symbols`].
pub fn unstack_symbols(word: &FMatrix, rows: usize, cols: usize) -> Result<Vec<FMatrix>> {
    if rows * cols != word.cols() {
        return Err(Error::Dimension(format!(
            "symbols of length {} cannot be {rows}x{cols} blocks",
            word.cols()
        )));
    }
    (0..word.rows())
        .map(|r| FMatrix::from_vec(word.field(), rows, cols, word.row(r).to_vec()))
        .collect()
}

fn present_positions(n: usize, present: &[bool]) -> Result<Vec<usize>> {
    if present.len() != n {
        return Err(Error::Dimension(format!(
            "erasure mask of length {} for a code of length {n}",
            present.len()
        )));
    }
    Ok((0..n).filter(|&i| present[i]).collect())
}

impl LinearCode {
    fn check_positions(&self, positions: &[usize]) -> Result<()> {
        let distinct: BTreeSet<_> = positions.iter().collect();
        if positions.len() != self.dim()
            || distinct.len() != positions.len()
            || positions.iter().any(|&p| p >= self.len())
        {
            return Err(Error::NotInformationSet(positions.to_vec()));
        }
        Ok(())
    }

    pub fn is_information_set(&self, positions: &[usize]) -> bool {
        self.check_positions(positions).is_ok()
            && self.generator.select_columns(positions).rank() == self.dim()
    }

    /// `preferred` if it is an information set, otherwise the
    /// lexicographically first one (the pivot columns of the reduced
    /// generator).
    pub fn find_information_set(&self, preferred: &[usize]) -> Vec<usize> {
        if self.is_information_set(preferred) {
            preferred.to_vec()
        } else {
            self.generator.rref().pivots
        }
    }

    /// The last `k` coordinates.
    pub fn tail_positions(&self) -> Vec<usize> {
        (self.len() - self.dim()..self.len()).collect()
    }

    /// The codeword whose symbols at `positions` are the rows of `message`
    /// (`k x L`), solved through the parity-check matrix: the remaining
    /// coordinates satisfy `H_rest c_rest = -H_pos message`.
    pub fn systematic_embed(&self, positions: &[usize], message: &FMatrix) -> Result<FMatrix> {
        self.check_positions(positions)?;
        if message.rows() != self.dim() {
            return Err(Error::Dimension(format!(
                "message has {} symbols, code dimension is {}",
                message.rows(),
                self.dim()
            )));
        }
        if message.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        let n = self.len();
        let cols = message.cols();
        let mut out = FMatrix::zeros(&self.field, n, cols);
        for (i, &p) in positions.iter().enumerate() {
            out.row_mut(p).copy_from_slice(message.row(i));
        }
        let rest: Vec<usize> = (0..n).filter(|i| !positions.contains(i)).collect();
        if rest.is_empty() {
            return Ok(out);
        }
        let h = &self.parity_check;
        let rhs = h
            .select_columns(positions)
            .mul(message)?
            .scale(self.field.neg(1));
        let solved = h
            .select_columns(&rest)
            .solve(&rhs)?
            .unique()
            .ok_or_else(|| Error::NotInformationSet(positions.to_vec()))?;
        for (i, &p) in rest.iter().enumerate() {
            out.row_mut(p).copy_from_slice(solved.row(i));
        }
        Ok(out)
    }

    /// The `n x k` linear map `message -> systematic codeword`.
    pub fn systematic_encoder(&self, positions: &[usize]) -> Result<FMatrix> {
        self.systematic_embed(positions, &FMatrix::identity(&self.field, self.dim()))
    }

    /// Recovers the unique codeword agreeing with the present symbols.
    pub fn erasure_decode(&self, received: &FMatrix, present: &[bool]) -> Result<FMatrix> {
        let pos = present_positions(self.len(), present)?;
        if received.rows() != self.len() {
            return Err(Error::Dimension("received word has the wrong length".into()));
        }
        let system = self.generator.select_columns(&pos).transpose();
        let rhs = received.select_rows(&pos);
        match system.solve(&rhs)? {
            Solution::Infeasible => Err(Error::DecodeFailure(
                "present symbols are not consistent with any codeword".into(),
            )),
            Solution::Feasible { nullspace, .. } if nullspace.rows() > 0 => {
                Err(Error::DecodeFailure(format!(
                    "{} present symbols leave {} degrees of freedom",
                    pos.len(),
                    nullspace.rows()
                )))
            }
            Solution::Feasible { particular, .. } => self.encode(&particular),
        }
    }

    /// Symbols at `positions` of every codeword agreeing with the present
    /// symbols, provided they are the same for all such codewords. This can
    /// succeed when the full codeword is not determined.
    pub fn erasure_decode_at(&self, received: &FMatrix, present: &[bool], positions: &[usize]) -> Result<FMatrix> {
        let pos = present_positions(self.len(), present)?;
        if received.rows() != self.len() {
            return Err(Error::Dimension("received word has the wrong length".into()));
        }
        let system = self.generator.select_columns(&pos).transpose();
        let rhs = received.select_rows(&pos);
        let Solution::Feasible { particular, nullspace } = system.solve(&rhs)? else {
            return Err(Error::DecodeFailure(
                "present symbols are not consistent with any codeword".into(),
            ));
        };
        let at = self.generator.select_columns(positions);
        if nullspace.rows() > 0 && !nullspace.mul(&at)?.is_zero() {
            return Err(Error::DecodeFailure(format!(
                "{} present symbols do not determine positions {positions:?}",
                pos.len()
            )));
        }
        at.transpose().mul(&particular)
    }

    /// Berlekamp-Welch decoding of a Reed-Solomon (or RS Schur power) code
    /// with `b` errors and the given erasures, one symbol column at a time.
    pub fn rs_error_erasure_decode(
        &self,
        received: &FMatrix,
        present: &[bool],
        b: usize,
    ) -> Result<RsDecoded> {
        let Family::ReedSolomon { points, k } = &self.family else {
            return Err(Error::NotReedSolomon);
        };
        let pos = present_positions(self.len(), present)?;
        if received.rows() != self.len() {
            return Err(Error::Dimension("received word has the wrong length".into()));
        }
        if pos.len() < *k {
            return Err(Error::DecodeFailure(format!(
                "{} present symbols for a dimension-{k} code",
                pos.len()
            )));
        }
        let erasures = self.len() - pos.len();
        let d = self.len() - k + 1;
        let within_bound = 2 * b + erasures < d;
        let xs: Vec<Elem> = pos.iter().map(|&i| points[i]).collect();

        let f = &self.field;
        let mut codeword = FMatrix::zeros(f, self.len(), received.cols());
        let mut corrected = BTreeSet::new();
        for col in 0..received.cols() {
            let ys: Vec<Elem> = pos.iter().map(|&i| received.get(i, col)).collect();
            let message = berlekamp_welch(f, &xs, &ys, *k, b)?;
            for (j, &x) in points.iter().enumerate() {
                codeword.set(j, col, poly::eval(f, &message, x));
            }
            for &i in &pos {
                if codeword.get(i, col) != received.get(i, col) {
                    corrected.insert(i);
                }
            }
        }
        Ok(RsDecoded {
            codeword,
            corrected: corrected.into_iter().collect(),
            within_bound,
        })
    }

    /// Encodes `k` equally-shaped matrix blocks; symbol `w` is
    /// `sum_i G[i][w] * blocks[i]`.
    pub fn encode_matrix_message(&self, blocks: &[FMatrix]) -> Result<Vec<FMatrix>> {
        if blocks.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "{} blocks for a dimension-{} code",
                blocks.len(),
                self.dim()
            )));
        }
        let (r, c) = blocks[0].shape();
        let word = self.encode(&stack_symbols(blocks)?)?;
        unstack_symbols(&word, r, c)
    }
}

/// Finds the polynomial of degree `< k` agreeing with all but at most `b`
/// of the points. Solves `Q(x_i) = y_i E(x_i)` with `E` monic of degree `b`
/// and `deg Q < k + b`, then divides.
fn berlekamp_welch(f: &Field, xs: &[Elem], ys: &[Elem], k: usize, b: usize) -> Result<Vec<Elem>> {
    let unknowns = k + 2 * b;
    let mut a = FMatrix::zeros(f, xs.len(), unknowns);
    let mut rhs = FMatrix::zeros(f, xs.len(), 1);
    for (r, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let mut xp = 1;
        for j in 0..k + b {
            a.set(r, j, xp);
            if j < b {
                a.set(r, k + b + j, f.neg(f.mul(y, xp)));
            }
            if j == b {
                rhs.set(r, 0, f.mul(y, xp));
            }
            xp = f.mul(xp, x);
        }
    }
    let sol = match a.solve(&rhs)? {
        Solution::Feasible { particular, .. } => particular.into_data(),
        Solution::Infeasible => {
            return Err(Error::DecodeFailure("too many errors: key equation has no solution".into()))
        }
    };
    let q = sol[..k + b].to_vec();
    let mut e = sol[k + b..].to_vec();
    e.push(1);
    let (message, rem) = poly::divmod(f, &q, &e)?;
    if !rem.is_empty() || poly::degree(&message).is_some_and(|d| d >= k) {
        return Err(Error::DecodeFailure("too many errors: E does not divide Q".into()));
    }
    let disagreements = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| poly::eval(f, &message, x) != y)
        .count();
    if disagreements > b {
        return Err(Error::DecodeFailure(format!(
            "decoded polynomial disagrees with {disagreements} > {b} symbols"
        )));
    }
    Ok(message)
}
