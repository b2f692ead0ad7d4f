//! Bilinear algorithms for block matrix multiplication.
//!
//! A tensor of shape `(chi, zeta, upsilon)` and rank `r` multiplies a
//! `chi x zeta` block matrix `A` by a `zeta x upsilon` block matrix `B` with
//! `r` block products:
//!
//! ```text
//! Â_t = sum_a gamma[t][a] A_a,   B̂_t = sum_b delta[t][b] B_b,
//! C_c = sum_t eta[c][t] Â_t B̂_t,
//! ```
//!
//! where blocks are flattened row-major (`a = i * zeta + kappa`, and so on).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::BlockMatrix;
use crate::algebra::{Elem, FMatrix, Field};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearTensor {
    shape: (usize, usize, usize),
    gamma: FMatrix,
    delta: FMatrix,
    eta: FMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every pair of scalar inputs; needs `q^(chi zeta + zeta upsilon)`
    /// within the enumeration budget.
    Exhaustive,
    /// Seeded random scalar inputs.
    Randomized { trials: u64, seed: u64 },
    /// Coefficient comparison of both sides as polynomials in the entries.
    Formal,
}

/// Inputs on which the two sides of the identity differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub a: FMatrix,
    pub b: FMatrix,
    pub expected: FMatrix,
    pub got: FMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorVerdict {
    pub passed: bool,
    pub mode: String,
    /// Input pairs (or coefficient identities) checked.
    pub checked: u64,
    /// Upper bound on the chance that a randomized run misses a broken
    /// identity: `(2/q)^trials`, since each side is a polynomial of total
    /// degree 2 in the entries.
    pub miss_probability: Option<f64>,
    pub counterexample: Option<Counterexample>,
}

const EXHAUSTIVE_BUDGET: u128 = 1 << 24;

impl BilinearTensor {
    pub fn new(shape: (usize, usize, usize), gamma: FMatrix, delta: FMatrix, eta: FMatrix) -> Result<Self> {
        let (chi, zeta, ups) = shape;
        let r = gamma.rows();
        if chi == 0 || zeta == 0 || ups == 0 {
            return Err(Error::InvalidParameter("tensor shape must be positive".into()));
        }
        if gamma.cols() != chi * zeta || delta.shape() != (r, zeta * ups) || eta.shape() != (chi * ups, r) {
            return Err(Error::Dimension(format!(
                "coefficient maps {:?}, {:?}, {:?} do not fit shape {shape:?}",
                gamma.shape(),
                delta.shape(),
                eta.shape()
            )));
        }
        if gamma.field() != delta.field() || gamma.field() != eta.field() {
            return Err(Error::FieldMismatch);
        }
        Ok(BilinearTensor {
            shape,
            gamma,
            delta,
            eta,
        })
    }

    /// Schoolbook multiplication: one product per `(i, kappa, j)`.
    pub fn naive(field: &Field, chi: usize, zeta: usize, ups: usize) -> Result<Self> {
        let r = chi * zeta * ups;
        let mut gamma = FMatrix::zeros(field, r, chi * zeta);
        let mut delta = FMatrix::zeros(field, r, zeta * ups);
        let mut eta = FMatrix::zeros(field, chi * ups, r);
        let mut t = 0;
        for i in 0..chi {
            for k in 0..zeta {
                for j in 0..ups {
                    gamma.set(t, i * zeta + k, 1);
                    delta.set(t, k * ups + j, 1);
                    eta.set(i * ups + j, t, 1);
                    t += 1;
                }
            }
        }
        Self::new((chi, zeta, ups), gamma, delta, eta)
    }

    /// Strassen's rank-7 algorithm for 2x2 block matrices.
    pub fn strassen(field: &Field) -> Self {
        let m = |rows: &[[i64; 4]]| {
            let data = rows.iter().flatten().map(|&v| field.from_int(v)).collect();
            FMatrix::from_vec(field, rows.len(), 4, data).expect("fixed shape")
        };
        // blocks ordered 11, 12, 21, 22
        let gamma = m(&[
            [1, 0, 0, 1],
            [0, 0, 1, 1],
            [1, 0, 0, 0],
            [0, 0, 0, 1],
            [1, 1, 0, 0],
            [-1, 0, 1, 0],
            [0, 1, 0, -1],
        ]);
        let delta = m(&[
            [1, 0, 0, 1],
            [1, 0, 0, 0],
            [0, 1, 0, -1],
            [-1, 0, 1, 0],
            [0, 0, 0, 1],
            [1, 1, 0, 0],
            [0, 0, 1, 1],
        ]);
        let eta_t = m(&[
            [1, 0, 0, 1],
            [0, 0, 1, -1],
            [0, 1, 0, 1],
            [1, 0, 1, 0],
            [-1, 1, 0, 0],
            [0, 0, 0, 1],
            [1, 0, 0, 0],
        ]);
        Self::new((2, 2, 2), gamma, delta, eta_t.transpose()).expect("fixed shape")
    }

    /// `strassen^s`: `2^s x 2^s` blocks with `7^s` products.
    pub fn strassen_power(field: &Field, s: u32) -> Result<Self> {
        if s == 0 {
            return Self::naive(field, 1, 1, 1);
        }
        let base = Self::strassen(field);
        let mut acc = base.clone();
        for _ in 1..s {
            acc = acc.compose(&base)?;
        }
        Ok(acc)
    }

    /// Tensor product: runs `self` on the outer block grid and `inner` on
    /// each block, giving shape `(chi1 chi2, zeta1 zeta2, ups1 ups2)` and rank
    /// `r1 r2`.
    pub fn compose(&self, inner: &BilinearTensor) -> Result<Self> {
        if self.field() != inner.field() {
            return Err(Error::FieldMismatch);
        }
        let (c1, z1, u1) = self.shape;
        let (c2, z2, u2) = inner.shape;
        let (r1, r2) = (self.rank(), inner.rank());
        let field = self.field();
        let kron = |m1: &FMatrix, m2: &FMatrix, rows1: usize, cols1: usize, rows2: usize, cols2: usize| {
            // m1 is indexed by (t1, (x1, y1)) with grid rows1 x cols1, likewise m2.
            let cols = rows1 * rows2 * cols1 * cols2;
            let mut out = FMatrix::zeros(field, r1 * r2, cols);
            for t1 in 0..r1 {
                for t2 in 0..r2 {
                    for x1 in 0..rows1 {
                        for y1 in 0..cols1 {
                            let v1 = m1.get(t1, x1 * cols1 + y1);
                            if v1 == 0 {
                                continue;
                            }
                            for x2 in 0..rows2 {
                                for y2 in 0..cols2 {
                                    let x = x1 * rows2 + x2;
                                    let y = y1 * cols2 + y2;
                                    let v = field.mul(v1, m2.get(t2, x2 * cols2 + y2));
                                    out.set(t1 * r2 + t2, x * cols1 * cols2 + y, v);
                                }
                            }
                        }
                    }
                }
            }
            out
        };
        let gamma = kron(&self.gamma, &inner.gamma, c1, z1, c2, z2);
        let delta = kron(&self.delta, &inner.delta, z1, u1, z2, u2);
        let eta = kron(
            &self.eta.transpose(),
            &inner.eta.transpose(),
            c1,
            u1,
            c2,
            u2,
        )
        .transpose();
        Self::new((c1 * c2, z1 * z2, u1 * u2), gamma, delta, eta)
    }

    pub fn field(&self) -> &Field {
        self.gamma.field()
    }

    /// `(chi, zeta, upsilon)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        self.shape
    }

    pub fn rank(&self) -> usize {
        self.gamma.rows()
    }

    /// `r x (chi zeta)`.
    pub fn gamma(&self) -> &FMatrix {
        &self.gamma
    }

    /// `r x (zeta upsilon)`.
    pub fn delta(&self) -> &FMatrix {
        &self.delta
    }

    /// `(chi upsilon) x r`.
    pub fn eta(&self) -> &FMatrix {
        &self.eta
    }

    /// Replaces one decode coefficient, for negative tests.
    pub fn with_eta_entry(&self, row: usize, col: usize, value: Elem) -> Self {
        let mut out = self.clone();
        out.eta.set(row, col, value);
        out
    }

    fn combine(coeffs: &FMatrix, blocks: &[FMatrix]) -> Result<Vec<FMatrix>> {
        let field = blocks[0].field();
        let (p, s) = blocks[0].shape();
        (0..coeffs.rows())
            .map(|t| {
                let mut acc = FMatrix::zeros(field, p, s);
                for (&c, b) in coeffs.row(t).iter().zip(blocks) {
                    if c != 0 {
                        acc.add_scaled(c, b)?;
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    /// `Â_1..Â_r`.
    pub fn encode_a(&self, a: &BlockMatrix) -> Result<Vec<FMatrix>> {
        if a.grid() != (self.shape.0, self.shape.1) {
            return Err(Error::Dimension(format!(
                "A has a {:?} block grid, the tensor expects {:?}",
                a.grid(),
                (self.shape.0, self.shape.1)
            )));
        }
        if a.field() != self.field() {
            return Err(Error::FieldMismatch);
        }
        Self::combine(&self.gamma, a.blocks())
    }

    /// `B̂_1..B̂_r`.
    pub fn encode_b(&self, b: &BlockMatrix) -> Result<Vec<FMatrix>> {
        if b.grid() != (self.shape.1, self.shape.2) {
            return Err(Error::Dimension(format!(
                "B has a {:?} block grid, the tensor expects {:?}",
                b.grid(),
                (self.shape.1, self.shape.2)
            )));
        }
        if b.field() != self.field() {
            return Err(Error::FieldMismatch);
        }
        Self::combine(&self.delta, b.blocks())
    }

    pub fn encode(&self, a: &BlockMatrix, b: &BlockMatrix) -> Result<(Vec<FMatrix>, Vec<FMatrix>)> {
        if a.block_shape().1 != b.block_shape().0 {
            return Err(Error::Dimension("inner block dimensions differ".into()));
        }
        Ok((self.encode_a(a)?, self.encode_b(b)?))
    }

    /// `C` from the `r` products `Â_t B̂_t`.
    pub fn decode(&self, products: &[FMatrix]) -> Result<BlockMatrix> {
        if products.len() != self.rank() {
            return Err(Error::Dimension(format!(
                "{} products for a rank-{} tensor",
                products.len(),
                self.rank()
            )));
        }
        let shape = products[0].shape();
        if products.iter().any(|p| p.shape() != shape) {
            return Err(Error::Dimension("products of different shapes".into()));
        }
        BlockMatrix::from_blocks((self.shape.0, self.shape.2), Self::combine(&self.eta, products)?)
    }

    /// Encode, multiply pointwise, decode.
    pub fn multiply(&self, a: &BlockMatrix, b: &BlockMatrix) -> Result<BlockMatrix> {
        let (ah, bh) = self.encode(a, b)?;
        let products = ah
            .iter()
            .zip(&bh)
            .map(|(x, y)| x.mul(y))
            .collect::<Result<Vec<_>>>()?;
        self.decode(&products)
    }

    fn check_scalar(&self, a: &FMatrix, b: &FMatrix) -> Option<Counterexample> {
        let expected = a.mul(b).expect("shapes from the tensor");
        let (c, z, u) = self.shape;
        let blocks = |m: &FMatrix, rows, cols| BlockMatrix::partition(m, rows, cols).expect("scalar blocks");
        let got = self
            .multiply(&blocks(a, c, z), &blocks(b, z, u))
            .expect("shapes from the tensor")
            .assemble();
        (got != expected).then(|| Counterexample {
            a: a.clone(),
            b: b.clone(),
            expected,
            got,
        })
    }

    /// Checks `sum_t eta[c][t] Â_t B̂_t = sum_kappa A_{i kappa} B_{kappa j}`.
    pub fn verify(&self, mode: VerifyMode) -> Result<TensorVerdict> {
        let f = self.field();
        let (c, z, u) = self.shape;
        let q = f.order() as u128;
        match mode {
            VerifyMode::Exhaustive => {
                let vars = (c * z + z * u) as u32;
                let total = q.checked_pow(vars).filter(|&t| t <= EXHAUSTIVE_BUDGET).ok_or(
                    Error::EnumerationBudget {
                        size: q.checked_pow(vars).unwrap_or(u128::MAX),
                        budget: EXHAUSTIVE_BUDGET,
                    },
                )?;
                let mut digits = vec![0; vars as usize];
                let mut checked = 0u64;
                for _ in 0..total {
                    let a = FMatrix::from_vec(f, c, z, digits[..c * z].to_vec())?;
                    let b = FMatrix::from_vec(f, z, u, digits[c * z..].to_vec())?;
                    checked += 1;
                    if let Some(ce) = self.check_scalar(&a, &b) {
                        return Ok(verdict("exhaustive", checked, None, Some(ce)));
                    }
                    for d in digits.iter_mut().rev() {
                        *d += 1;
                        if (*d as u128) < q {
                            break;
                        }
                        *d = 0;
                    }
                }
                Ok(verdict("exhaustive", checked, None, None))
            }
            VerifyMode::Randomized { trials, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let miss = (2.0 / q as f64).min(1.0).powf(trials as f64);
                for t in 0..trials {
                    let a = FMatrix::random(f, c, z, &mut rng);
                    let b = FMatrix::random(f, z, u, &mut rng);
                    if let Some(ce) = self.check_scalar(&a, &b) {
                        return Ok(verdict("randomized", t + 1, Some(miss), Some(ce)));
                    }
                }
                Ok(verdict("randomized", trials, Some(miss), None))
            }
            VerifyMode::Formal => {
                let mut checked = 0;
                for i in 0..c {
                    for j in 0..u {
                        let out = i * u + j;
                        for a in 0..c * z {
                            for b in 0..z * u {
                                let lhs = (0..self.rank()).fold(0, |acc, t| {
                                    f.mul_add(
                                        acc,
                                        self.eta.get(out, t),
                                        f.mul(self.gamma.get(t, a), self.delta.get(t, b)),
                                    )
                                });
                                let (ai, ak) = (a / z, a % z);
                                let (bk, bj) = (b / u, b % u);
                                let rhs = u32::from(ai == i && bj == j && ak == bk);
                                checked += 1;
                                if lhs != rhs {
                                    let mut am = FMatrix::zeros(f, c, z);
                                    am.set(ai, ak, 1);
                                    let mut bm = FMatrix::zeros(f, z, u);
                                    bm.set(bk, bj, 1);
                                    let ce = self.check_scalar(&am, &bm);
                                    return Ok(verdict("formal", checked, None, ce));
                                }
                            }
                        }
                    }
                }
                Ok(verdict("formal", checked, None, None))
            }
        }
    }

    /// `{"field", "shape", "rank", "gamma", "delta", "eta"}` with matrices as
    /// rows of coefficient vectors.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "field": self.field().label(),
            "shape": [self.shape.0, self.shape.1, self.shape.2],
            "rank": self.rank(),
            "gamma": self.gamma.to_coeff_rows(),
            "delta": self.delta.to_coeff_rows(),
            "eta": self.eta.to_coeff_rows(),
        })
    }
}

fn verdict(mode: &str, checked: u64, miss: Option<f64>, ce: Option<Counterexample>) -> TensorVerdict {
    TensorVerdict {
        passed: ce.is_none(),
        mode: mode.into(),
        checked,
        miss_probability: miss,
        counterexample: ce,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_and_shapes() {
        let f = Field::prime(7).unwrap();
        assert_eq!(BilinearTensor::naive(&f, 1, 1, 1).unwrap().rank(), 1);
        assert_eq!(BilinearTensor::naive(&f, 2, 2, 2).unwrap().rank(), 8);
        assert_eq!(BilinearTensor::naive(&f, 2, 3, 4).unwrap().rank(), 24);
        let s2 = BilinearTensor::strassen_power(&f, 2).unwrap();
        assert_eq!((s2.shape(), s2.rank()), ((4, 4, 4), 49));
        assert!(BilinearTensor::naive(&f, 0, 1, 1).is_err());
    }

    #[test]
    fn strassen_first_product_reads_diagonal() {
        let f = Field::prime(7).unwrap();
        let t = BilinearTensor::strassen(&f);
        assert_eq!(t.gamma().row(0), &[1, 0, 0, 1]);
        assert_eq!(t.delta().row(0), &[1, 0, 0, 1]);
    }

    #[test]
    fn formal_verification() {
        let f = Field::prime(5).unwrap();
        for t in [
            BilinearTensor::strassen(&f),
            BilinearTensor::naive(&f, 2, 3, 2).unwrap(),
            BilinearTensor::strassen_power(&f, 2).unwrap(),
            BilinearTensor::naive(&f, 1, 2, 1).unwrap().compose(&BilinearTensor::strassen(&f)).unwrap(),
        ] {
            assert!(t.verify(VerifyMode::Formal).unwrap().passed);
        }
    }

    #[test]
    fn broken_eta_is_caught_with_counterexample() {
        let f = Field::prime(3).unwrap();
        let t = BilinearTensor::strassen(&f).with_eta_entry(0, 0, 2);
        for mode in [
            VerifyMode::Exhaustive,
            VerifyMode::Formal,
            VerifyMode::Randomized { trials: 200, seed: 3 },
        ] {
            let v = t.verify(mode).unwrap();
            assert!(!v.passed);
            let ce = v.counterexample.unwrap();
            assert_eq!(ce.expected, ce.a.mul(&ce.b).unwrap());
            assert_ne!(ce.expected, ce.got);
        }
    }

    #[test]
    fn exhaustive_budget() {
        let f = Field::prime(7).unwrap();
        let t = BilinearTensor::naive(&f, 3, 3, 3).unwrap();
        assert!(matches!(t.verify(VerifyMode::Exhaustive), Err(Error::EnumerationBudget { .. })));
    }

    #[test]
    fn json_shape() {
        let f = Field::of_order(4).unwrap();
        let v = BilinearTensor::strassen(&f).to_json();
        assert_eq!(v["rank"], 7);
        assert_eq!(v["shape"], json!([2, 2, 2]));
        assert_eq!(v["gamma"][0][0], json!([1, 0]));
    }
}
