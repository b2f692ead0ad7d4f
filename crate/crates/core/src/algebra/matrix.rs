use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::field::{Elem, Field};
use crate::error::{Error, Result};

/// Dense row-major matrix over a finite field.
#[derive(Clone, PartialEq, Eq)]
pub struct FMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

/// Gauss-Jordan reduced row-echelon form.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: FMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Outcome of solving `A X = B`.
#[derive(Clone, Debug)]
pub enum Solution {
    /// `particular` solves the system; every solution is `particular` plus a
    /// combination of the rows of `nullspace` (one basis vector per row,
    /// applied to each right-hand-side column).
    Feasible { particular: FMatrix, nullspace: FMatrix },
    Infeasible,
}

impl Solution {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Solution::Feasible { .. })
    }

    /// The solution if it exists and is unique.
    pub fn unique(self) -> Option<FMatrix> {
        match self {
            Solution::Feasible { particular, nullspace } if nullspace.rows() == 0 => Some(particular),
            _ => None,
        }
    }
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|&e| self.field.format(e)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl FMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        FMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_vec(field: &Field, rows: usize, cols: usize, data: Vec<Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&e| !field.contains(e)) {
            return Err(Error::InvalidElement(bad, field.order()));
        }
        Ok(FMatrix {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows(field: &Field, rows: &[Vec<Elem>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_vec(field, rows.len(), cols, rows.concat())
    }

    /// Column vector.
    pub fn column(field: &Field, entries: &[Elem]) -> Result<Self> {
        Self::from_vec(field, entries.len(), 1, entries.to_vec())
    }

    /// Matrix with independent uniform entries.
    pub fn random<R: rand::Rng + ?Sized>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| field.random(rng)).collect();
        FMatrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Elem> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Elem] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o = f.mul_add(*o, a, b);
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Elem, Elem) -> Elem) -> Result<Self> {
        self.check_field(other)?;
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!(
                "shapes {:?} and {:?} differ",
                self.shape(),
                other.shape()
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| op(a, b)).collect();
        Ok(FMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let f = self.field.clone();
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let f = self.field.clone();
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn scale(&self, s: Elem) -> Self {
        let data = self.data.iter().map(|&a| self.field.mul(a, s)).collect();
        FMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// `self += s * other`, in place.
    pub fn add_scaled(&mut self, s: Elem, other: &Self) -> Result<()> {
        self.check_field(other)?;
        if self.shape() != other.shape() {
            return Err(Error::Dimension("add_scaled shape mismatch".into()));
        }
        if s == 0 {
            return Ok(());
        }
        let f = self.field.clone();
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = f.mul_add(*a, s, b);
        }
        Ok(())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(&self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.data[r * cols.len() + j] = self.get(r, c);
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        FMatrix {
            field: self.field.clone(),
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::Dimension("vstack column mismatch".into()));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FMatrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols,
            data,
        })
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(Error::Dimension("hstack row mismatch".into()));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(FMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols,
            data,
        })
    }

    /// Gauss-Jordan elimination restricted to the first `limit` columns for
    /// pivot selection; later columns are carried along.
    fn eliminate(&mut self, limit: usize) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..limit {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for c in 0..self.cols {
                    self.data.swap(pr * self.cols + c, row * self.cols + c);
                }
            }
            let inv = f.inv(self.get(row, col)).expect("pivot is nonzero");
            for c in 0..self.cols {
                let v = self.get(row, c);
                self.set(row, c, f.mul(v, inv));
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col);
                if factor == 0 {
                    continue;
                }
                let neg = f.neg(factor);
                for c in col..self.cols {
                    let v = f.mul_add(self.get(r, c), neg, self.get(row, c));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rref(&self) -> Rref {
        let mut reduced = self.clone();
        let pivots = reduced.eliminate(self.cols);
        Rref {
            reduced,
            rank: pivots.len(),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of `{x : A x = 0}`, one vector per row.
    pub fn nullspace(&self) -> FMatrix {
        let Rref { reduced, pivots, .. } = self.rref();
        self.nullspace_from(&reduced, &pivots, self.cols)
    }

    fn nullspace_from(&self, reduced: &FMatrix, pivots: &[usize], n: usize) -> FMatrix {
        let f = &self.field;
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut basis = FMatrix::zeros(f, free.len(), n);
        for (i, &fc) in free.iter().enumerate() {
            basis.set(i, fc, 1);
            for (r, &pc) in pivots.iter().enumerate() {
                basis.set(i, pc, f.neg(reduced.get(r, fc)));
            }
        }
        basis
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &FMatrix) -> Result<Solution> {
        self.check_field(b)?;
        if self.rows != b.rows {
            return Err(Error::Dimension(format!(
                "{} equations but right-hand side has {} rows",
                self.rows, b.rows
            )));
        }
        let n = self.cols;
        let mut aug = self.hstack(b)?;
        let pivots = aug.eliminate(n);
        // Any remaining nonzero entry in the right-hand block below the pivot
        // rows is a contradiction.
        for r in pivots.len()..aug.rows {
            if aug.row(r)[n..].iter().any(|&e| e != 0) {
                return Ok(Solution::Infeasible);
            }
        }
        let mut particular = FMatrix::zeros(&self.field, n, b.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                particular.set(pc, j, aug.get(r, n + j));
            }
        }
        let nullspace = self.nullspace_from(&aug, &pivots, n);
        Ok(Solution::Feasible { particular, nullspace })
    }

    pub fn inverse(&self) -> Result<FMatrix> {
        if self.rows != self.cols {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        self.solve(&FMatrix::identity(&self.field, self.rows))?
            .unique()
            .ok_or(Error::Singular)
    }

    /// Nonzero rows of the reduced echelon form: a canonical basis of the
    /// row space.
    pub fn row_space_basis(&self) -> FMatrix {
        let Rref { reduced, rank, .. } = self.rref();
        reduced.select_rows(&(0..rank).collect::<Vec<_>>())
    }

    /// Row-space equality, via ranks.
    pub fn same_row_space(&self, other: &FMatrix) -> Result<bool> {
        let r1 = self.rank();
        let r2 = other.rank();
        Ok(r1 == r2 && self.vstack(other)?.rank() == r1)
    }

    /// Entries as coefficient vectors, the JSON exchange form.
    pub fn to_coeff_rows(&self) -> Vec<Vec<Vec<u32>>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|&e| self.field.coeffs(e)).collect())
            .collect()
    }
}

/// JSON form of a matrix: `{"field": "2^2", "rows": [[[c0, c1], ...], ...]}`.
/// On input, entries may also be plain integers in canonical element order.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    field: String,
    #[serde(default)]
    cols: Option<usize>,
    rows: Vec<Vec<EntryRepr>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Coeffs(Vec<u32>),
    Index(u32),
}

impl Serialize for FMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            field: self.field.label(),
            cols: Some(self.cols),
            rows: self
                .to_coeff_rows()
                .into_iter()
                .map(|r| r.into_iter().map(EntryRepr::Coeffs).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        let field = Field::parse(&repr.field).map_err(D::Error::custom)?;
        let cols = repr.cols.unwrap_or_else(|| repr.rows.first().map_or(0, Vec::len));
        let mut data = Vec::new();
        for row in &repr.rows {
            if row.len() != cols {
                return Err(D::Error::custom("ragged matrix rows"));
            }
            for e in row {
                let v = match e {
                    EntryRepr::Coeffs(c) => field.from_coeffs(c).map_err(D::Error::custom)?,
                    EntryRepr::Index(i) if field.contains(*i) => *i,
                    EntryRepr::Index(i) => {
                        return Err(D::Error::custom(Error::InvalidElement(*i, field.order())))
                    }
                };
                data.push(v);
            }
        }
        FMatrix::from_vec(&field, repr.rows.len(), cols, data).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf7() -> Field {
        Field::prime(7).unwrap()
    }

    #[test]
    fn rref_examples() {
        let f = gf7();
        let id = FMatrix::identity(&f, 3).rref();
        assert_eq!((id.rank, id.pivots), (3, vec![0, 1, 2]));
        let z = FMatrix::zeros(&f, 2, 3).rref();
        assert_eq!((z.rank, z.pivots.len()), (0, 0));
        let m = FMatrix::from_rows(&f, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn solve_examples() {
        let f = gf7();
        let x = FMatrix::identity(&f, 2)
            .solve(&FMatrix::column(&f, &[3, 4]).unwrap())
            .unwrap()
            .unique()
            .unwrap();
        assert_eq!(x.data(), &[3, 4]);

        let f2 = Field::prime(2).unwrap();
        let a = FMatrix::from_rows(&f2, &[vec![1, 1]]).unwrap();
        match a.solve(&FMatrix::column(&f2, &[0]).unwrap()).unwrap() {
            Solution::Feasible { particular, nullspace } => {
                assert_eq!(particular.data(), &[0, 0]);
                assert_eq!(nullspace.to_rows(), vec![vec![1, 1]]);
            }
            Solution::Infeasible => panic!("expected a solution"),
        }

        let a = FMatrix::from_rows(&f2, &[vec![1], vec![1]]).unwrap();
        let s = a.solve(&FMatrix::column(&f2, &[0, 1]).unwrap()).unwrap();
        assert!(!s.is_feasible());
    }

    #[test]
    fn solve_dimension_mismatch() {
        let f = gf7();
        let a = FMatrix::identity(&f, 2);
        assert!(matches!(
            a.solve(&FMatrix::column(&f, &[1, 2, 3]).unwrap()),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn inverse_roundtrip() {
        let f = gf7();
        let m = FMatrix::from_rows(&f, &[vec![2, 3], vec![1, 4]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), FMatrix::identity(&f, 2));
        let s = FMatrix::from_rows(&f, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(s.inverse(), Err(Error::Singular));
    }

    #[test]
    fn json_roundtrip_and_integer_entries() {
        let f = Field::parse("2^2").unwrap();
        let m = FMatrix::from_rows(&f, &[vec![0, 1, 2, 3]]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"{"field":"2^2","cols":4,"rows":[[[0,0],[1,0],[0,1],[1,1]]]}"#);
        let back: FMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        let ints: FMatrix = serde_json::from_str(r#"{"field":"7","rows":[[1,2],[3,4]]}"#).unwrap();
        assert_eq!(ints.to_rows(), vec![vec![1, 2], vec![3, 4]]);
    }
}
