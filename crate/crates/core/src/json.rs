//! JSON forms of states, chart vectors, tensors and matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::herm::{ComplexMatrix, RealMatrix};
use crate::linfisher::FisherForm;
use crate::orbit::LambdaState;
use crate::tol::Tolerances;

/// `{"n": int, "lambda": [floats]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaStateJson {
    pub n: usize,
    pub lambda: Vec<f64>,
}

impl LambdaStateJson {
    pub fn into_state(self, tol: &Tolerances) -> Result<LambdaState> {
        if self.n != self.lambda.len() {
            return Err(Error::LengthMismatch {
                declared: self.n,
                actual: self.lambda.len(),
            });
        }
        LambdaState::new(&self.lambda, tol)
    }
}

impl From<&LambdaState> for LambdaStateJson {
    fn from(s: &LambdaState) -> Self {
        Self {
            n: s.n(),
            lambda: s.lambda().to_vec(),
        }
    }
}

pub fn real_matrix_rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| m.row(r).iter().copied().collect())
        .collect()
}

pub fn complex_matrix_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub(crate) fn ser_real_matrix<S: Serializer>(
    m: &RealMatrix,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    real_matrix_rows(m).serialize(s)
}

/// Parses a square matrix given either as rows of numbers (real form) or
/// rows of `[re, im]` pairs (complex form).
pub fn parse_matrix(value: &Value) -> Result<FisherForm> {
    let rows = value
        .as_array()
        .ok_or_else(|| Error::Malformed("matrix must be an array of rows".into()))?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::Malformed("matrix is empty".into()));
    }
    let first = rows[0]
        .as_array()
        .and_then(|r| r.first())
        .ok_or_else(|| Error::Malformed("matrix rows must be non-empty arrays".into()))?;
    let complex = first.is_array();
    let mut real = RealMatrix::zeros(n, n);
    let mut cplx = ComplexMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Malformed(format!("row {i} is not an array")))?;
        if row.len() != n {
            return Err(Error::Malformed(format!(
                "row {i} has {} entries, expected {n} (matrix must be square)",
                row.len()
            )));
        }
        for (j, entry) in row.iter().enumerate() {
            if complex {
                let pair = entry.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                    Error::Malformed(format!("entry ({i},{j}) is not a [re, im] pair"))
                })?;
                let re = number(&pair[0], i, j)?;
                let im = number(&pair[1], i, j)?;
                cplx[(i, j)] = Complex64::new(re, im);
            } else {
                real[(i, j)] = number(entry, i, j)?;
            }
        }
    }
    Ok(if complex {
        FisherForm::Complex(cplx)
    } else {
        FisherForm::Real(real)
    })
}

fn number(v: &Value, i: usize, j: usize) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| Error::Malformed(format!("entry ({i},{j}) is not a number")))?;
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(x)
}

pub fn form_to_json(m: &FisherForm) -> Value {
    match m {
        FisherForm::Real(r) => serde_json::to_value(real_matrix_rows(r)).expect("finite matrix"),
        FisherForm::Complex(c) => {
            serde_json::to_value(complex_matrix_rows(c)).expect("finite matrix")
        }
    }
}
