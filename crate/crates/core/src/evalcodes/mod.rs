//! Evaluation codes `C(V, D) = {(f(P_1), ..., f(P_n)) : f in V}`.
//!
//! A function space `V` is described by an [`EvalBasis`]: sparse polynomials
//! in named variables, an optional curve degree (a weight per variable, so the
//! degree of a monomial is additive under products) and an optional curve
//! relation used to keep monomials in canonical form. Reed-Solomon codes are
//! the univariate case with weight 1; one-point Hermitian codes use the
//! variables `x, y` with weights `q, q+1` (their pole orders at infinity) and
//! the relation `y^q = x^(q+1) - y`.

mod hermitian;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::algebra::{Elem, FMatrix, Field};
use crate::codes::{Family, LinearCode};
use crate::error::{Error, Result};

pub use hermitian::{
    hermitian_basis, hermitian_code, hermitian_code_on, hermitian_degree_for_dim, hermitian_genus,
    hermitian_points,
};

/// Exponent vector, one entry per variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn eval(&self, f: &Field, point: &[Elem]) -> Elem {
        self.0
            .iter()
            .zip(point)
            .fold(1, |acc, (&e, &x)| f.mul(acc, f.pow(x, e as u64)))
    }
}

/// Sparse polynomial function with nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Function {
    terms: BTreeMap<Monomial, Elem>,
}

impl Function {
    pub fn monomial(exps: Vec<u32>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(exps), 1);
        Function { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Elem)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, f: &Field, m: Monomial, c: Elem) {
        let entry = self.terms.entry(m.clone()).or_insert(0);
        *entry = f.add(*entry, c);
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    fn mul(&self, f: &Field, other: &Function) -> Function {
        let mut out = Function::default();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(f, ma.mul(mb), f.mul(ca, cb));
            }
        }
        out
    }

    pub fn eval(&self, f: &Field, point: &[Elem]) -> Elem {
        self.terms
            .iter()
            .fold(0, |acc, (m, &c)| f.mul_add(acc, c, m.eval(f, point)))
    }
}

/// Curve degree: `deg(x^e) = sum_v weight_v * e_v`, extended to functions by
/// the maximum over supporting monomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveDegree {
    pub weights: Vec<i64>,
}

impl CurveDegree {
    pub fn of_monomial(&self, m: &Monomial) -> i64 {
        self.weights.iter().zip(&m.0).map(|(w, &e)| w * e as i64).sum()
    }
}

/// Rewriting rule applied to every monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Relation {
    None,
    /// `y^q = x^(q+1) - y` on variables `(x, y)`.
    Hermitian { q: u32 },
}

#[derive(Clone, Debug)]
pub struct EvalBasis {
    field: Field,
    variables: Vec<String>,
    functions: Vec<Function>,
    degree: Option<CurveDegree>,
    relation: Relation,
}

/// Distinct evaluation points in a fixed order; position `i` is worker `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    field: Field,
    points: Vec<Vec<Elem>>,
}

/// The structure behind an evaluation code.
#[derive(Clone, Debug)]
pub struct Evaluation {
    basis: EvalBasis,
    points: PointSet,
}

impl Evaluation {
    pub fn basis(&self) -> &EvalBasis {
        &self.basis
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }
}

impl PointSet {
    pub fn new(field: &Field, points: Vec<Vec<Elem>>) -> Result<Self> {
        let arity = points.first().map_or(0, Vec::len);
        let mut seen = BTreeSet::new();
        for p in &points {
            if p.len() != arity {
                return Err(Error::Dimension("points of different arity".into()));
            }
            if let Some(&bad) = p.iter().find(|&&c| !field.contains(c)) {
                return Err(Error::InvalidElement(bad, field.order()));
            }
            if !seen.insert(p.clone()) {
                return Err(Error::InvalidParameter(format!("repeated point {p:?}")));
            }
        }
        Ok(PointSet {
            field: field.clone(),
            points,
        })
    }

    /// One-coordinate points.
    pub fn scalars(field: &Field, xs: &[Elem]) -> Result<Self> {
        Self::new(field, xs.iter().map(|&x| vec![x]).collect())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<Elem>] {
        &self.points
    }

    /// First `n` points, the puncturing used for shorter codes.
    pub fn prefix(&self, n: usize) -> Result<PointSet> {
        if n > self.len() {
            return Err(Error::InvalidParameter(format!(
                "{n} points requested from a set of {}",
                self.len()
            )));
        }
        Ok(PointSet {
            field: self.field.clone(),
            points: self.points[..n].to_vec(),
        })
    }
}

impl EvalBasis {
    pub fn new(
        field: &Field,
        variables: Vec<String>,
        functions: Vec<Function>,
        degree: Option<CurveDegree>,
        relation: Relation,
    ) -> Result<Self> {
        let arity = variables.len();
        if functions
            .iter()
            .any(|f| f.terms.keys().any(|m| m.0.len() != arity))
        {
            return Err(Error::Dimension("monomial arity differs from variable count".into()));
        }
        if degree.as_ref().is_some_and(|d| d.weights.len() != arity) {
            return Err(Error::Dimension("one curve-degree weight per variable".into()));
        }
        let mut basis = EvalBasis {
            field: field.clone(),
            variables,
            functions: Vec::new(),
            degree,
            relation,
        };
        basis.functions = functions.into_iter().map(|f| basis.reduce(f)).collect();
        Ok(basis)
    }

    /// `{1, x, ..., x^(k-1)}` with `deg x^i = i`.
    pub fn polynomials_below(field: &Field, k: usize) -> Self {
        let functions = (0..k as u32).map(|i| Function::monomial(vec![i])).collect();
        EvalBasis::new(
            field,
            vec!["x".into()],
            functions,
            Some(CurveDegree { weights: vec![1] }),
            Relation::None,
        )
        .expect("univariate monomials are well formed")
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn functions(&self) -> &[Function] {
        &self.functions
    }

    pub fn dim(&self) -> usize {
        self.functions.len()
    }

    pub fn curve_degree(&self) -> Option<&CurveDegree> {
        self.degree.as_ref()
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    /// Rewrites a function into canonical form under the curve relation.
    pub fn reduce(&self, f: Function) -> Function {
        let Relation::Hermitian { q } = self.relation else {
            return f;
        };
        let field = &self.field;
        let minus_one = field.neg(1);
        let mut out = Function::default();
        let mut work: Vec<(Monomial, Elem)> = f.terms.into_iter().collect();
        while let Some((m, c)) = work.pop() {
            let (i, j) = (m.0[0], m.0[1]);
            if j < q {
                out.add_term(field, m, c);
            } else {
                work.push((Monomial(vec![i + q + 1, j - q]), c));
                work.push((Monomial(vec![i, j - q + 1]), field.mul(c, minus_one)));
            }
        }
        out
    }

    /// Curve degree of a function: the maximum over its supporting monomials
    /// after reduction.
    pub fn curve_degree_of(&self, f: &Function) -> Result<i64> {
        let deg = self.degree.as_ref().ok_or(Error::NoEvaluation)?;
        self.reduce(f.clone())
            .terms
            .keys()
            .map(|m| deg.of_monomial(m))
            .max()
            .ok_or_else(|| Error::InvalidParameter("the zero function has no degree".into()))
    }

    /// `sum_i coeffs[i] * f_i`.
    pub fn combination(&self, coeffs: &[Elem]) -> Function {
        let mut out = Function::default();
        for (f, &c) in self.functions.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            for (m, &fc) in &f.terms {
                out.add_term(&self.field, m.clone(), self.field.mul(c, fc));
            }
        }
        out
    }

    /// Degree of each basis function.
    pub fn degrees(&self) -> Option<Vec<i64>> {
        self.degree.as_ref()?;
        self.functions
            .iter()
            .map(|f| self.curve_degree_of(f).ok())
            .collect()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.degrees()?.into_iter().max()
    }

    /// `dim V x n` matrix `(f_i(P_j))`.
    pub fn evaluation_matrix(&self, points: &PointSet) -> Result<FMatrix> {
        if points.field != self.field {
            return Err(Error::FieldMismatch);
        }
        if points.points.first().is_some_and(|p| p.len() != self.variables.len()) {
            return Err(Error::Dimension("point arity differs from variable count".into()));
        }
        let data = self
            .functions
            .iter()
            .flat_map(|f| points.points.iter().map(move |p| f.eval(&self.field, p)))
            .collect();
        FMatrix::from_vec(&self.field, self.dim(), points.len(), data)
    }

    /// Basis of `V (x) W = span{f g}`, reduced by the curve relation and
    /// echelonized over monomials ordered by decreasing curve degree, so each
    /// basis function has a distinct leading monomial carrying its degree.
    pub fn tensor(&self, other: &EvalBasis) -> Result<EvalBasis> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.variables != other.variables || self.relation != other.relation {
            return Err(Error::InvalidParameter("incompatible variable sets".into()));
        }
        let degree = match (&self.degree, &other.degree) {
            (Some(a), Some(b)) if a == b => Some(a.clone()),
            _ => None,
        };
        let products: Vec<Function> = self
            .functions
            .iter()
            .flat_map(|f| other.functions.iter().map(move |g| (f, g)))
            .map(|(f, g)| self.reduce(f.mul(&self.field, g)))
            .collect();
        let functions = echelonize(&self.field, &products, degree.as_ref());
        Ok(EvalBasis {
            field: self.field.clone(),
            variables: self.variables.clone(),
            functions,
            degree,
            relation: self.relation,
        })
    }

    /// Basis functions of degree at most `bound`.
    pub fn truncate(&self, bound: i64) -> Result<EvalBasis> {
        let degrees = self.degrees().ok_or(Error::NoEvaluation)?;
        let functions: Vec<Function> = self
            .functions
            .iter()
            .zip(&degrees)
            .filter(|(_, &d)| d <= bound)
            .map(|(f, _)| f.clone())
            .collect();
        if functions.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "no basis function has degree <= {bound}"
            )));
        }
        Ok(EvalBasis {
            functions,
            ..self.clone()
        })
    }
}

/// Row-reduces functions as coefficient vectors over their monomials.
fn echelonize(field: &Field, functions: &[Function], degree: Option<&CurveDegree>) -> Vec<Function> {
    let mut monomials: Vec<Monomial> = functions
        .iter()
        .flat_map(|f| f.terms.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    // highest degree first, ties by decreasing exponent vector
    monomials.sort_by(|a, b| {
        let da = degree.map_or(0, |d| d.of_monomial(a));
        let db = degree.map_or(0, |d| d.of_monomial(b));
        db.cmp(&da).then_with(|| b.cmp(a))
    });
    let index: BTreeMap<&Monomial, usize> = monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut data = vec![0; functions.len() * monomials.len()];
    for (r, f) in functions.iter().enumerate() {
        for (m, &c) in &f.terms {
            data[r * monomials.len() + index[m]] = c;
        }
    }
    let Ok(matrix) = FMatrix::from_vec(field, functions.len(), monomials.len(), data) else {
        return Vec::new();
    };
    let mut out: Vec<Function> = matrix
        .row_space_basis()
        .to_rows()
        .into_iter()
        .map(|row| {
            let mut f = Function::default();
            for (c, m) in row.into_iter().zip(&monomials) {
                if c != 0 {
                    f.add_term(field, m.clone(), c);
                }
            }
            f
        })
        .collect();
    // lowest degree first, matching the monomial bases
    out.reverse();
    out
}

/// `C(V, D)` with generator `(f_i(P_j))`; the basis must stay linearly
/// independent on `D`.
pub fn eval_code(basis: &EvalBasis, points: &PointSet) -> Result<LinearCode> {
    let g = basis.evaluation_matrix(points)?;
    let code = LinearCode::from_generator(g)?;
    Ok(code
        .with_family(Family::Evaluation)
        .with_evaluation(Evaluation {
            basis: basis.clone(),
            points: points.clone(),
        }))
}

/// The row space of `(f_i(P_j))`, for function spaces that may collapse on
/// `D`.
pub fn eval_span_code(basis: &EvalBasis, points: &PointSet) -> Result<LinearCode> {
    LinearCode::from_spanning_rows(&basis.evaluation_matrix(points)?)
}

/// Reed-Solomon code: polynomials of degree `< k` evaluated at distinct
/// `points`.
pub fn rs_code(field: &Field, points: &[Elem], k: usize) -> Result<LinearCode> {
    let n = points.len();
    if n > field.order() as usize {
        return Err(Error::InvalidParameter(format!(
            "{n} points exceed the field order {}",
            field.order()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let set = PointSet::scalars(field, points)?;
    let basis = EvalBasis::polynomials_below(field, k);
    Ok(eval_code(&basis, &set)?.with_family(Family::ReedSolomon {
        points: points.to_vec(),
        k,
    }))
}

/// Reed-Solomon code on the first `n` field elements in canonical order.
pub fn rs_code_prefix(field: &Field, n: usize, k: usize) -> Result<LinearCode> {
    let points: Vec<Elem> = field.elements().take(n).collect();
    if points.len() < n {
        return Err(Error::InvalidParameter(format!(
            "{n} points exceed the field order {}",
            field.order()
        )));
    }
    rs_code(field, &points, k)
}

/// Curve degree of a basis element or codeword function of an evaluation
/// code.
pub fn curve_degree_of(code: &LinearCode, f: &Function) -> Result<i64> {
    code.evaluation()
        .ok_or(Error::NoEvaluation)?
        .basis
        .curve_degree_of(f)
}

/// Subcode spanned by the basis functions of curve degree at most `bound`.
pub fn truncate_by_degree(code: &LinearCode, bound: i64) -> Result<LinearCode> {
    let ev = code.evaluation().ok_or(Error::NoEvaluation)?;
    let basis = ev.basis.truncate(bound)?;
    let truncated = eval_code(&basis, &ev.points)?;
    let family = match code.family() {
        Family::ReedSolomon { points, .. } => Family::ReedSolomon {
            points: points.clone(),
            k: basis.dim(),
        },
        Family::Hermitian { q, .. } => Family::Hermitian {
            q: *q,
            m: bound.max(0) as u32,
        },
        other => other.clone(),
    };
    Ok(truncated.with_family(family))
}

/// Row-space comparison of `C(V,D) o C(W,D)` and `C(V (x) W, D)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TensorIdentity {
    pub equal: bool,
    pub product_dim: usize,
    pub tensor_dim: usize,
    /// A codeword of one side outside the other.
    pub counterexample: Option<Vec<Elem>>,
}

pub fn verify_hs_equals_tensor(v: &EvalBasis, w: &EvalBasis, points: &PointSet) -> Result<TensorIdentity> {
    let product = eval_span_code(v, points)?.hs_product(&eval_span_code(w, points)?)?;
    let tensor = eval_span_code(&v.tensor(w)?, points)?;
    let equal = product.same_code(&tensor)?;
    let counterexample = if equal {
        None
    } else {
        let outside = |a: &LinearCode, b: &LinearCode| {
            (0..a.dim())
                .map(|r| a.generator().row(r).to_vec())
                .find(|row| !b.is_codeword(row))
        };
        outside(&product, &tensor).or_else(|| outside(&tensor, &product))
    };
    Ok(TensorIdentity {
        equal,
        product_dim: product.dim(),
        tensor_dim: tensor.dim(),
        counterexample,
    })
}

#[derive(Serialize)]
struct TermRepr {
    exponents: Vec<u32>,
    coeff: Vec<u32>,
}

#[derive(Serialize)]
struct BasisRepr {
    field: String,
    variables: Vec<String>,
    functions: Vec<Vec<TermRepr>>,
    degrees: Option<Vec<i64>>,
    relation: Relation,
}

impl EvalBasis {
    /// JSON dump for external verification; coefficients as coefficient
    /// vectors.
    pub fn to_json(&self) -> serde_json::Value {
        let repr = BasisRepr {
            field: self.field.label(),
            variables: self.variables.clone(),
            functions: self
                .functions
                .iter()
                .map(|f| {
                    f.terms()
                        .map(|(m, c)| TermRepr {
                            exponents: m.0.clone(),
                            coeff: self.field.coeffs(c),
                        })
                        .collect()
                })
                .collect(),
            degrees: self.degrees(),
            relation: self.relation,
        };
        serde_json::to_value(repr).expect("basis serializes")
    }
}

impl PointSet {
    pub fn to_json(&self) -> serde_json::Value {
        let pts: Vec<Vec<Vec<u32>>> = self
            .points
            .iter()
            .map(|p| p.iter().map(|&c| self.field.coeffs(c)).collect())
            .collect();
        serde_json::json!({ "field": self.field.label(), "points": pts })
    }
}
