//! Multilinear maps `T: F^{m_1} x ... x F^{m_l} -> F^p` written as sums of
//! rank-1 terms `t(x_1, ..., x_l) = t_1(x_1) ... t_l(x_l) y`.

use super::BilinearTensor;
use crate::algebra::{Elem, Field};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank1Tensor {
    /// One linear form per input slot, as a coefficient vector.
    pub forms: Vec<Vec<Elem>>,
    pub output: Vec<Elem>,
}

impl Rank1Tensor {
    /// `t_j(x_j)` for every slot.
    pub fn form_values(&self, field: &Field, xs: &[Vec<Elem>]) -> Vec<Elem> {
        self.forms
            .iter()
            .zip(xs)
            .map(|(t, x)| dot(field, t, x))
            .collect()
    }

    pub fn eval(&self, field: &Field, xs: &[Vec<Elem>]) -> Vec<Elem> {
        let s = self
            .form_values(field, xs)
            .into_iter()
            .fold(1, |acc, v| field.mul(acc, v));
        self.output.iter().map(|&y| field.mul(s, y)).collect()
    }
}

fn dot(field: &Field, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| field.mul_add(acc, x, y))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearDecomp {
    field: Field,
    input_dims: Vec<usize>,
    output_dim: usize,
    terms: Vec<Rank1Tensor>,
}

impl MultilinearDecomp {
    pub fn new(field: &Field, input_dims: Vec<usize>, output_dim: usize, terms: Vec<Rank1Tensor>) -> Result<Self> {
        if input_dims.is_empty() {
            return Err(Error::InvalidParameter("a multilinear map needs at least one input".into()));
        }
        for (i, t) in terms.iter().enumerate() {
            let dims_ok = t.forms.len() == input_dims.len()
                && t.forms.iter().zip(&input_dims).all(|(f, &m)| f.len() == m);
            if !dims_ok || t.output.len() != output_dim {
                return Err(Error::Dimension(format!("term {i} does not match the input/output dimensions")));
            }
            if t.forms.iter().flatten().chain(&t.output).any(|&c| !field.contains(c)) {
                return Err(Error::InvalidParameter(format!("term {i} has entries outside the field")));
            }
        }
        Ok(MultilinearDecomp {
            field: field.clone(),
            input_dims,
            output_dim,
            terms,
        })
    }

    /// `x . y = sum_i x_i y_i` with `m` terms `e_i(x) e_i(y) * 1`.
    pub fn dot_product(field: &Field, m: usize) -> Self {
        let terms = (0..m)
            .map(|i| {
                let e = unit(m, i);
                Rank1Tensor {
                    forms: vec![e.clone(), e],
                    output: vec![1],
                }
            })
            .collect();
        Self::new(field, vec![m, m], 1, terms).expect("well formed")
    }

    /// `sum_i x_i y_i z_i`.
    pub fn trilinear_trace(field: &Field, m: usize) -> Self {
        let terms = (0..m)
            .map(|i| Rank1Tensor {
                forms: vec![unit(m, i); 3],
                output: vec![1],
            })
            .collect();
        Self::new(field, vec![m; 3], 1, terms).expect("well formed")
    }

    /// Scalar-block matrix multiplication as a bilinear map
    /// `(vec A, vec B) -> vec C`, one term per tensor product.
    pub fn from_bilinear(t: &BilinearTensor) -> Self {
        let (c, z, u) = t.shape();
        let terms = (0..t.rank())
            .map(|i| Rank1Tensor {
                forms: vec![t.gamma().row(i).to_vec(), t.delta().row(i).to_vec()],
                output: t.eta().col(i),
            })
            .collect();
        Self::new(t.field(), vec![c * z, z * u], c * u, terms).expect("shapes from the tensor")
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Number of input slots `l`.
    pub fn arity(&self) -> usize {
        self.input_dims.len()
    }

    pub fn input_dims(&self) -> &[usize] {
        &self.input_dims
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    /// Number of rank-1 terms, an upper bound on the tensor rank.
    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Rank1Tensor] {
        &self.terms
    }

    pub fn check_inputs(&self, xs: &[Vec<Elem>]) -> Result<()> {
        if xs.len() != self.arity() || xs.iter().zip(&self.input_dims).any(|(x, &m)| x.len() != m) {
            return Err(Error::Dimension(format!(
                "inputs of lengths {:?}, expected {:?}",
                xs.iter().map(Vec::len).collect::<Vec<_>>(),
                self.input_dims
            )));
        }
        if xs.iter().flatten().any(|&c| !self.field.contains(c)) {
            return Err(Error::InvalidParameter("input entries outside the field".into()));
        }
        Ok(())
    }

    pub fn eval(&self, xs: &[Vec<Elem>]) -> Result<Vec<Elem>> {
        self.check_inputs(xs)?;
        let f = &self.field;
        let mut out = vec![0; self.output_dim];
        for t in &self.terms {
            for (o, v) in out.iter_mut().zip(t.eval(f, xs)) {
                *o = f.add(*o, v);
            }
        }
        Ok(out)
    }
}

fn unit(m: usize, i: usize) -> Vec<Elem> {
    let mut e = vec![0; m];
    e[i] = 1;
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FMatrix;

    #[test]
    fn dot_product_matches_direct_sum() {
        let f = Field::prime(7).unwrap();
        let t = MultilinearDecomp::dot_product(&f, 3);
        let (x, y) = (vec![1, 5, 6], vec![3, 3, 2]);
        let direct = (3 + 5 * 3 + 6 * 2) % 7;
        assert_eq!(t.eval(&[x, y]).unwrap(), vec![direct]);
        assert_eq!(t.rank(), 3);
    }

    #[test]
    fn zero_input_gives_zero() {
        let f = Field::prime(5).unwrap();
        let t = MultilinearDecomp::trilinear_trace(&f, 2);
        assert_eq!(t.eval(&[vec![0, 0], vec![1, 2], vec![3, 4]]).unwrap(), vec![0]);
    }

    #[test]
    fn bilinear_view_multiplies_matrices() {
        let f = Field::prime(7).unwrap();
        let t = MultilinearDecomp::from_bilinear(&BilinearTensor::strassen(&f));
        let a = FMatrix::from_rows(&f, &[vec![1, 2], vec![3, 4]]).unwrap();
        let b = FMatrix::from_rows(&f, &[vec![5, 6], vec![0, 1]]).unwrap();
        let c = t.eval(&[a.data().to_vec(), b.data().to_vec()]).unwrap();
        assert_eq!(c, a.mul(&b).unwrap().into_data());
    }

    #[test]
    fn dimension_errors() {
        let f = Field::prime(7).unwrap();
        let t = MultilinearDecomp::dot_product(&f, 2);
        assert!(t.eval(&[vec![1, 2]]).is_err());
        assert!(t.eval(&[vec![1, 2], vec![1]]).is_err());
        let bad = Rank1Tensor {
            forms: vec![vec![1]],
            output: vec![1, 1],
        };
        assert!(MultilinearDecomp::new(&f, vec![1], 1, vec![bad]).is_err());
    }
}
