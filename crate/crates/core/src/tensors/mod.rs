//! Block matrices, bilinear matrix-multiplication tensors `(gamma, delta,
//! eta)` and rank-1 multilinear decompositions.

mod bilinear;
mod multilinear;

pub use bilinear::{BilinearTensor, Counterexample, TensorVerdict, VerifyMode};
pub use multilinear::{MultilinearDecomp, Rank1Tensor};

use crate::algebra::{FMatrix, Field};
use crate::error::{Error, Result};

/// A `grid.0 x grid.1` grid of equally-shaped blocks, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMatrix {
    grid: (usize, usize),
    block_shape: (usize, usize),
    blocks: Vec<FMatrix>,
}

impl BlockMatrix {
    pub fn from_blocks(grid: (usize, usize), blocks: Vec<FMatrix>) -> Result<Self> {
        if grid.0 == 0 || grid.1 == 0 || blocks.len() != grid.0 * grid.1 {
            return Err(Error::Dimension(format!(
                "{} blocks for a {}x{} grid",
                blocks.len(),
                grid.0,
                grid.1
            )));
        }
        let block_shape = blocks[0].shape();
        let field = blocks[0].field();
        if blocks.iter().any(|b| b.shape() != block_shape) {
            return Err(Error::Dimension("blocks of different shapes".into()));
        }
        if blocks.iter().any(|b| b.field() != field) {
            return Err(Error::FieldMismatch);
        }
        Ok(BlockMatrix {
            grid,
            block_shape,
            blocks,
        })
    }

    /// Splits `m` into a `rows x cols` grid of equal blocks.
    pub fn partition(m: &FMatrix, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || !m.rows().is_multiple_of(rows) || !m.cols().is_multiple_of(cols) {
            return Err(Error::Dimension(format!(
                "a {}x{} matrix does not split into a {rows}x{cols} grid",
                m.rows(),
                m.cols()
            )));
        }
        let (p, s) = (m.rows() / rows, m.cols() / cols);
        let mut blocks = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let data = (0..p)
                    .flat_map(|r| m.row(i * p + r)[j * s..(j + 1) * s].to_vec())
                    .collect();
                blocks.push(FMatrix::from_vec(m.field(), p, s, data)?);
            }
        }
        Self::from_blocks((rows, cols), blocks)
    }

    pub fn assemble(&self) -> FMatrix {
        let (p, s) = self.block_shape;
        let mut out = FMatrix::zeros(self.field(), self.grid.0 * p, self.grid.1 * s);
        for i in 0..self.grid.0 {
            for j in 0..self.grid.1 {
                let b = self.block(i, j);
                for r in 0..p {
                    out.row_mut(i * p + r)[j * s..(j + 1) * s].copy_from_slice(b.row(r));
                }
            }
        }
        out
    }

    pub fn field(&self) -> &Field {
        self.blocks[0].field()
    }

    pub fn grid(&self) -> (usize, usize) {
        self.grid
    }

    pub fn block_shape(&self) -> (usize, usize) {
        self.block_shape
    }

    pub fn block(&self, i: usize, j: usize) -> &FMatrix {
        &self.blocks[i * self.grid.1 + j]
    }

    /// Blocks in row-major order.
    pub fn blocks(&self) -> &[FMatrix] {
        &self.blocks
    }

    /// Plain block product `C_ij = sum_k A_ik B_kj`.
    pub fn mul(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        if self.grid.1 != other.grid.0 || self.block_shape.1 != other.block_shape.0 {
            return Err(Error::Dimension("block grids do not compose".into()));
        }
        let mut blocks = Vec::with_capacity(self.grid.0 * other.grid.1);
        for i in 0..self.grid.0 {
            for j in 0..other.grid.1 {
                let mut acc = FMatrix::zeros(self.field(), self.block_shape.0, other.block_shape.1);
                for k in 0..self.grid.1 {
                    acc = acc.add(&self.block(i, k).mul(other.block(k, j))?)?;
                }
                blocks.push(acc);
            }
        }
        BlockMatrix::from_blocks((self.grid.0, other.grid.1), blocks)
    }
}
