//! JSON input schema and serialization helpers.

use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::lattice::{validate_with, BosonicLatticeData, LatticeError, SectionConvention};
use crate::linalg::{QMatrix, QVec};
use crate::scalar::{format_rational, parse_rational, Rational};

pub fn ser_vectors<S: Serializer>(vs: &[QVec], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = vs
        .iter()
        .map(|v| v.iter().map(format_rational).collect())
        .collect();
    rows.serialize(s)
}

pub fn ser_vector<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    let row: Vec<String> = v.iter().map(format_rational).collect();
    row.serialize(s)
}

pub fn ser_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    format_rational(r).serialize(s)
}

pub fn vector_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("MalformedInput: {0}")]
    Malformed(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl InputError {
    pub fn name(&self) -> &'static str {
        match self {
            InputError::Malformed(_) => "MalformedInput",
            InputError::Lattice(e) => e.name(),
        }
    }
}

/// The on-disk description of a set of bosonic lattice data.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct LatticeInput {
    pub dim: usize,
    pub gram: Vec<Vec<Value>>,
    pub lattice_basis: Vec<Vec<Value>>,
    pub ff: Vec<Value>,
}

fn rational_value(v: &Value) -> Result<Rational, InputError> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| InputError::Malformed(e.to_string())),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(i.into()))
            } else {
                Err(InputError::Malformed(format!(
                    "non-integer JSON number {n}; write rationals as \"p/q\" strings"
                )))
            }
        }
        other => Err(InputError::Malformed(format!(
            "expected a rational, found {other}"
        ))),
    }
}

fn rational_row(row: &[Value]) -> Result<QVec, InputError> {
    row.iter().map(rational_value).collect()
}

pub fn parse_rational_vector(text: &str) -> Result<QVec, InputError> {
    text.split(',')
        .map(|t| parse_rational(t).map_err(|e| InputError::Malformed(e.to_string())))
        .collect()
}

impl LatticeInput {
    pub fn from_json(text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(|e| InputError::Malformed(e.to_string()))
    }

    pub fn build(&self) -> Result<BosonicLatticeData, InputError> {
        self.build_with(SectionConvention::NonNegative)
    }

    pub fn build_with(
        &self,
        convention: SectionConvention,
    ) -> Result<BosonicLatticeData, InputError> {
        let n = self.dim;
        if n == 0 {
            return Err(InputError::Malformed("dim must be positive".into()));
        }
        if self.gram.len() != n || self.gram.iter().any(|r| r.len() != n) {
            return Err(LatticeError::ShapeMismatch(format!("gram must be {n}x{n}")).into());
        }
        let gram_rows: Vec<QVec> = self
            .gram
            .iter()
            .map(|r| rational_row(r))
            .collect::<Result<_, _>>()?;
        let basis: Vec<QVec> = self
            .lattice_basis
            .iter()
            .map(|r| rational_row(r))
            .collect::<Result<_, _>>()?;
        let ff = rational_row(&self.ff)?;
        Ok(validate_with(
            QMatrix::from_rows(&gram_rows, n),
            basis,
            ff,
            convention,
        )?)
    }

    pub fn from_data(data: &BosonicLatticeData) -> Self {
        let strings = |v: &[Rational]| {
            v.iter()
                .map(|x| Value::String(format_rational(x)))
                .collect()
        };
        LatticeInput {
            dim: data.dim(),
            gram: data
                .space()
                .gram()
                .to_rows()
                .iter()
                .map(|r| strings(r))
                .collect(),
            lattice_basis: data.lattice_basis().iter().map(|r| strings(r)).collect(),
            ff: strings(data.ff_rep()),
        }
    }
}

pub fn load_data(text: &str) -> Result<BosonicLatticeData, InputError> {
    LatticeInput::from_json(text)?.build()
}
