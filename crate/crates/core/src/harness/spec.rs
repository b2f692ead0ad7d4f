//! Text forms of codes, tensors, measurement modes and config files.

use crate::algebra::Field;
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::evalcodes::{hermitian_code, rs_code_prefix};
use crate::tensors::{BilinearTensor, MultilinearDecomp};

/// `rs:<q>:<n>:<k>` or `hermitian:<q>:<m>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeSpec {
    ReedSolomon { q: u64, n: usize, k: usize },
    Hermitian { q: u32, m: u32 },
    /// Family only (`rs`, `rs:<q>`, `hermitian`, `hermitian:<q>`), for
    /// constructions that pick their own length.
    RsFamily { q: Option<u64> },
    HermitianFamily { q: Option<u32> },
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Syntax(format!("{what} must be a non-negative integer, got {s:?}")))
}

impl CodeSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        match parts.as_slice() {
            ["rs"] => Ok(CodeSpec::RsFamily { q: None }),
            ["rs", q] => Ok(CodeSpec::RsFamily { q: Some(num(q, "q")?) }),
            ["rs", q, n, k] => Ok(CodeSpec::ReedSolomon {
                q: num(q, "q")?,
                n: num(n, "n")?,
                k: num(k, "k")?,
            }),
            ["hermitian"] => Ok(CodeSpec::HermitianFamily { q: None }),
            ["hermitian", q] => Ok(CodeSpec::HermitianFamily { q: Some(num(q, "q")?) }),
            ["hermitian", q, m] => Ok(CodeSpec::Hermitian {
                q: num(q, "q")?,
                m: num(m, "m")?,
            }),
            _ => Err(Error::Syntax(format!(
                "code {text:?}: expected rs:<q>:<n>:<k> or hermitian:<q>:<m>"
            ))),
        }
    }

    /// Builds the code; `field` overrides the field of an RS spec (it must
    /// have order `q`).
    pub fn build(&self, field: Option<&Field>) -> Result<LinearCode> {
        match *self {
            CodeSpec::ReedSolomon { q, n, k } => {
                let f = match field {
                    Some(f) if f.order() as u64 == q => f.clone(),
                    Some(f) => {
                        return Err(Error::InvalidParameter(format!(
                            "--field {} does not have order {q}",
                            f.label()
                        )))
                    }
                    None => Field::of_order(q)?,
                };
                rs_code_prefix(&f, n, k)
            }
            CodeSpec::Hermitian { q, m } => hermitian_code(q, m),
            _ => Err(Error::Syntax(
                "a full code needs rs:<q>:<n>:<k> or hermitian:<q>:<m>".into(),
            )),
        }
    }
}

/// A computation to distribute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TensorSpec {
    Bilinear(BilinearTensor),
    Multilinear(MultilinearDecomp),
}

/// `naive:<chi>x<zeta>x<upsilon>`, `strassen`, `strassen^<s>`, or the
/// multilinear examples `dot:<m>` and `trace3:<m>`.
pub fn parse_tensor(text: &str, field: &Field) -> Result<TensorSpec> {
    let text = text.trim();
    if text == "strassen" {
        return Ok(TensorSpec::Bilinear(BilinearTensor::strassen(field)));
    }
    if let Some(s) = text.strip_prefix("strassen^") {
        return Ok(TensorSpec::Bilinear(BilinearTensor::strassen_power(field, num(s, "s")?)?));
    }
    if let Some(shape) = text.strip_prefix("naive:") {
        let dims: Vec<usize> = shape
            .split('x')
            .map(|d| num(d, "tensor dimension"))
            .collect::<Result<_>>()?;
        let [c, z, u] = dims[..] else {
            return Err(Error::Syntax(format!("naive tensor shape {shape:?}: expected AxBxC")));
        };
        return Ok(TensorSpec::Bilinear(BilinearTensor::naive(field, c, z, u)?));
    }
    if let Some(m) = text.strip_prefix("dot:") {
        return Ok(TensorSpec::Multilinear(MultilinearDecomp::dot_product(field, num(m, "m")?)));
    }
    if let Some(m) = text.strip_prefix("trace3:") {
        return Ok(TensorSpec::Multilinear(MultilinearDecomp::trilinear_trace(field, num(m, "m")?)));
    }
    Err(Error::Syntax(format!(
        "tensor {text:?}: expected naive:<a>x<b>x<c>, strassen, strassen^<s>, dot:<m> or trace3:<m>"
    )))
}

/// How recovery thresholds are measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Sampled { trials: u64 },
}

impl Mode {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "exhaustive" => Ok(Mode::Exhaustive),
            t => match t.strip_prefix("sampled:") {
                Some(n) => Ok(Mode::Sampled { trials: num(n, "trials")? }),
                None => Err(Error::Syntax(format!(
                    "mode {text:?}: expected exhaustive or sampled:<trials>"
                ))),
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Sampled { .. } => "sampled",
        }
    }
}

/// Parses a flat `key = value` file; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Syntax(format!("config line {}: expected key = value", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(Error::Syntax(format!("config line {}: bad key {k:?}", i + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_specs() {
        assert_eq!(
            CodeSpec::parse("rs:17:15:7").unwrap(),
            CodeSpec::ReedSolomon { q: 17, n: 15, k: 7 }
        );
        assert_eq!(CodeSpec::parse("hermitian:2:3").unwrap(), CodeSpec::Hermitian { q: 2, m: 3 });
        assert_eq!(CodeSpec::parse("rs").unwrap(), CodeSpec::RsFamily { q: None });
        assert!(CodeSpec::parse("rs:7:x:3").is_err());
        assert!(CodeSpec::parse("golay").is_err());
        let c = CodeSpec::parse("rs:8:8:3").unwrap().build(None).unwrap();
        assert_eq!((c.field().order(), c.len(), c.dim()), (8, 8, 3));
        assert!(CodeSpec::parse("rs:7:7:3")
            .unwrap()
            .build(Some(&Field::prime(5).unwrap()))
            .is_err());
    }

    #[test]
    fn tensor_specs() {
        let f = Field::prime(7).unwrap();
        let TensorSpec::Bilinear(t) = parse_tensor("naive:2x3x2", &f).unwrap() else { panic!() };
        assert_eq!(t.rank(), 12);
        let TensorSpec::Bilinear(t) = parse_tensor("strassen^2", &f).unwrap() else { panic!() };
        assert_eq!(t.rank(), 49);
        assert!(matches!(parse_tensor("dot:3", &f).unwrap(), TensorSpec::Multilinear(_)));
        assert!(parse_tensor("naive:2x2", &f).is_err());
        assert!(parse_tensor("winograd", &f).is_err());
    }

    #[test]
    fn modes_and_config() {
        assert_eq!(Mode::parse("sampled:200").unwrap(), Mode::Sampled { trials: 200 });
        assert!(Mode::parse("sampled").is_err());
        let cfg = parse_config("# sweep\ncode = rs:7:7:3\n\nworkers=7 # all\n").unwrap();
        assert_eq!(cfg, vec![("code".into(), "rs:7:7:3".into()), ("workers".into(), "7".into())]);
        assert!(parse_config("workers 7").is_err());
    }
}
