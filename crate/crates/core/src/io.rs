//! File formats: JSON instance documents and the line-oriented QUBO/Ising
//! export.
//!
//! Instance documents:
//!
//! ```text
//! { "kind": "cs", "m": 2, "n": 3, "A": [[...], [...]], "y": [...], "lambda": 0.1 }
//! { "kind": "cs-uncertain", "m": .., "n": .., "A0": [[...]], "Ai": [[[...]], ...],
//!   "y": [...], "gamma": .., "lambda": .. }
//! ```
//!
//! Either kind may carry `"truth": { "x": [...], "d": [...] }`.
//!
//! Model export (0-based indices, reals with 17 significant digits):
//!
//! ```text
//! # type ising
//! # n 2
//! # offset 1.1000000000000001e0
//! h 0 -4.5000000000000001e-1
//! J 0 1 2.5000000000000000e-1
//! ```

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{BinarySignal, CsInstance, UncertainCsInstance};
use crate::linalg::Matrix;
use crate::qubo_ising::{IsingModel, QuadTerms, QuadraticModel, QuboModel, Vartype};
use crate::scalar::Scalar;

/// Ground truth emitted by the generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub x: BinarySignal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Cs(CsInstance<f64>),
    Uncertain(UncertainCsInstance<f64>),
}

impl Instance {
    pub fn n(&self) -> usize {
        match self {
            Instance::Cs(i) => i.n(),
            Instance::Uncertain(i) => i.n(),
        }
    }

    pub fn m(&self) -> usize {
        match self {
            Instance::Cs(i) => i.m(),
            Instance::Uncertain(i) => i.m(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceDocument {
    pub instance: Instance,
    pub truth: Option<Truth>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum RawDocument {
    #[serde(rename = "cs")]
    Cs {
        m: usize,
        n: usize,
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        y: Vec<f64>,
        lambda: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truth: Option<Truth>,
    },
    #[serde(rename = "cs-uncertain")]
    Uncertain {
        m: usize,
        n: usize,
        #[serde(rename = "A0")]
        a0: Vec<Vec<f64>>,
        #[serde(rename = "Ai")]
        ai: Vec<Vec<Vec<f64>>>,
        y: Vec<f64>,
        gamma: f64,
        lambda: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truth: Option<Truth>,
    },
}

fn matrix_from(rows: &[Vec<f64>], m: usize, n: usize, name: &str) -> Result<Matrix<f64>> {
    if rows.len() != m {
        return Err(Error::dim(format!("{name} has {} rows, expected m = {m}", rows.len())));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::dim(format!(
            "{name} row {i} has {} entries, expected n = {n}",
            rows[i].len()
        )));
    }
    Matrix::from_rows(rows)
}

impl InstanceDocument {
    pub fn new(instance: Instance, truth: Option<Truth>) -> Self {
        Self { instance, truth }
    }

    pub fn to_json(&self) -> String {
        let raw = match &self.instance {
            Instance::Cs(i) => RawDocument::Cs {
                m: i.m(),
                n: i.n(),
                a: i.a().to_rows(),
                y: i.y().to_vec(),
                lambda: i.lambda(),
                truth: self.truth.clone(),
            },
            Instance::Uncertain(i) => RawDocument::Uncertain {
                m: i.m(),
                n: i.n(),
                a0: i.a0().to_rows(),
                ai: i.perturbations().iter().map(Matrix::to_rows).collect(),
                y: i.y().to_vec(),
                gamma: i.gamma(),
                lambda: i.lambda(),
                truth: self.truth.clone(),
            },
        };
        serde_json::to_string_pretty(&raw).expect("instance documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawDocument = serde_json::from_str(text).map_err(json_error)?;
        let (instance, truth) = match raw {
            RawDocument::Cs { m, n, a, y, lambda, truth } => {
                let a = matrix_from(&a, m, n, "A")?;
                (Instance::Cs(CsInstance::new(a, y, lambda)?), truth)
            }
            RawDocument::Uncertain {
                m,
                n,
                a0,
                ai,
                y,
                gamma,
                lambda,
                truth,
            } => {
                let a0 = matrix_from(&a0, m, n, "A0")?;
                let ai = ai
                    .iter()
                    .enumerate()
                    .map(|(i, rows)| matrix_from(rows, m, n, &format!("Ai[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                let inst = UncertainCsInstance::new(a0, ai, y, gamma, lambda)?;
                if let Some(d) = truth.as_ref().and_then(|t| t.d.as_ref()) {
                    if d.len() != inst.r() {
                        return Err(Error::dim(format!("truth.d has length {}, expected r = {}", d.len(), inst.r())));
                    }
                }
                (Instance::Uncertain(inst), truth)
            }
        };
        if let Some(t) = &truth {
            if t.x.len() != instance.n() {
                return Err(Error::dim(format!(
                    "truth.x has length {}, expected n = {}",
                    t.x.len(),
                    instance.n()
                )));
            }
        }
        Ok(Self { instance, truth })
    }
}

/// Maps a serde error to [`Error::Parse`], naming the field when serde does.
fn json_error(e: serde_json::Error) -> Error {
    let msg = e.to_string();
    let field = msg
        .split('`')
        .nth(1)
        .map(str::to_owned)
        .unwrap_or_else(|| "document".to_owned());
    Error::parse(field, msg)
}

pub fn save_instance(doc: &InstanceDocument, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, doc.to_json() + "\n")?;
    Ok(())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<InstanceDocument> {
    InstanceDocument::from_json(&std::fs::read_to_string(path)?)
}

/// A model read from the text export.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelFile {
    Qubo(QuboModel<f64>),
    Ising(IsingModel<f64>),
}

pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders a model in the text export format.
pub fn write_model<T: Scalar, M: QuadraticModel<T> + ?Sized>(model: &M) -> String {
    let kind = match model.vartype() {
        Vartype::Binary => "qubo",
        Vartype::Spin => "ising",
    };
    let mut out = String::new();
    writeln!(out, "# type {kind}").unwrap();
    writeln!(out, "# n {}", model.num_vars()).unwrap();
    writeln!(out, "# offset {}", format_real(model.offset().as_f64())).unwrap();
    for (i, h) in model.linear().iter().enumerate() {
        writeln!(out, "h {i} {}", format_real(h.as_f64())).unwrap();
    }
    for (&(i, j), w) in model.quadratic() {
        writeln!(out, "J {i} {j} {}", format_real(w.as_f64())).unwrap();
    }
    out
}

pub fn read_model(text: &str) -> Result<ModelFile> {
    let mut kind: Option<Vartype> = None;
    let mut n: Option<usize> = None;
    let mut offset = 0.0;
    let mut linear: Vec<(usize, f64)> = Vec::new();
    let mut quad = QuadTerms::new();

    fn num<F: std::str::FromStr>(tok: Option<&str>, field: &str, line: usize) -> Result<F> {
        tok.and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(field, format!("line {line}: expected a number")))
    }

    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("#") => match toks.next() {
                Some("type") => {
                    kind = Some(match toks.next() {
                        Some("qubo") => Vartype::Binary,
                        Some("ising") => Vartype::Spin,
                        _ => return Err(Error::parse("type", format!("line {lineno}: expected qubo or ising"))),
                    })
                }
                Some("n") => n = Some(num(toks.next(), "n", lineno)?),
                Some("offset") => offset = num(toks.next(), "offset", lineno)?,
                _ => {}
            },
            Some(t) if t.starts_with('#') => {}
            Some("h") => {
                let i = num(toks.next(), "h", lineno)?;
                linear.push((i, num(toks.next(), "h", lineno)?));
            }
            Some("J") => {
                let i: usize = num(toks.next(), "J", lineno)?;
                let j: usize = num(toks.next(), "J", lineno)?;
                let w: f64 = num(toks.next(), "J", lineno)?;
                if i >= j {
                    return Err(Error::parse("J", format!("line {lineno}: expected i < j")));
                }
                if quad.insert((i, j), w).is_some() {
                    return Err(Error::parse("J", format!("line {lineno}: duplicate term ({i}, {j})")));
                }
            }
            Some(other) => return Err(Error::parse("line", format!("line {lineno}: unknown record `{other}`"))),
            None => {}
        }
    }
    let kind = kind.ok_or_else(|| Error::parse("type", "missing `# type` header"))?;
    let n = n.ok_or_else(|| Error::parse("n", "missing `# n` header"))?;
    let mut lin = vec![0.0; n];
    for (i, h) in linear {
        if i >= n {
            return Err(Error::dim(format!("linear index {i} out of range for n = {n}")));
        }
        lin[i] = h;
    }
    Ok(match kind {
        Vartype::Binary => ModelFile::Qubo(QuboModel::new(lin, quad, offset)?),
        Vartype::Spin => ModelFile::Ising(IsingModel::new(lin, quad, offset)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_planted, gen_uncertain_planted, Distribution};

    #[test]
    fn cs_round_trip_is_exact() {
        let (inst, x) = gen_planted::<f64>(5, 7, 2, Distribution::Gaussian, 3).unwrap();
        let doc = InstanceDocument::new(Instance::Cs(inst), Some(Truth { x, d: None }));
        assert_eq!(InstanceDocument::from_json(&doc.to_json()).unwrap(), doc);
    }

    #[test]
    fn uncertain_round_trip_is_exact() {
        let (inst, x, d) = gen_uncertain_planted::<f64>(4, 6, 2, 2, 50.0, true, 8).unwrap();
        let doc = InstanceDocument::new(Instance::Uncertain(inst), Some(Truth { x, d: Some(d) }));
        assert_eq!(InstanceDocument::from_json(&doc.to_json()).unwrap(), doc);
    }

    #[test]
    fn y_length_mismatch_is_dimension_error() {
        let text = r#"{"kind":"cs","m":2,"n":2,"A":[[1,0],[0,1]],"y":[1],"lambda":0.1}"#;
        assert!(matches!(InstanceDocument::from_json(text), Err(Error::Dimension(_))));
        let text = r#"{"kind":"cs","m":2,"n":2,"A":[[1,0],[0]],"y":[1,0],"lambda":0.1}"#;
        assert!(matches!(InstanceDocument::from_json(text), Err(Error::Dimension(_))));
    }

    #[test]
    fn missing_lambda_names_the_field() {
        let text = r#"{"kind":"cs","m":1,"n":1,"A":[[1]],"y":[1]}"#;
        match InstanceDocument::from_json(text) {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "lambda"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_kind_is_parse_error() {
        let text = r#"{"kind":"qubo","m":1}"#;
        assert!(matches!(InstanceDocument::from_json(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn model_text_round_trip() {
        let q = QuboModel::new(vec![-0.9, 1.1, 0.1 + 0.2], [((0, 2), 2.0 / 3.0)], 1.0).unwrap();
        let text = write_model(&q);
        assert!(text.starts_with("# type qubo\n# n 3\n# offset 1.0000000000000000e0\n"));
        assert_eq!(read_model(&text).unwrap(), ModelFile::Qubo(q));

        let s = IsingModel::new(vec![-0.45, 0.55], [((0, 1), -1e-300)], 1.1).unwrap();
        assert_eq!(read_model(&write_model(&s)).unwrap(), ModelFile::Ising(s));
    }

    #[test]
    fn model_text_errors() {
        assert!(matches!(read_model("# n 2\n"), Err(Error::Parse { .. })));
        assert!(matches!(read_model("# type ising\n"), Err(Error::Parse { .. })));
        assert!(read_model("# type ising\n# n 2\nJ 1 0 1.0\n").is_err());
        assert!(read_model("# type ising\n# n 2\nh 5 1.0\n").is_err());
        assert!(read_model("# type ising\n# n 2\nx 1\n").is_err());
    }
}
