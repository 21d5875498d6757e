//! Input files and flag values.

use num_complex::Complex64;
use serde::Deserialize;
use std::path::Path;

use steinlab::intcore::{ComplexPoint, IntMatrix, LatticeVector};

use crate::CliError;

/// A file read once, so that its bytes feed both parsing and provenance.
pub struct InputFile {
    pub label: String,
    pub bytes: Vec<u8>,
}

impl InputFile {
    pub fn read(label: &str, path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Ok(InputFile {
            label: label.to_string(),
            bytes,
        })
    }

    pub fn json<T: for<'de> Deserialize<'de>>(&self) -> Result<T, CliError> {
        serde_json::from_slice(&self.bytes)
            .map_err(|e| CliError::Input(format!("{}: {e}", self.label)))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixInput {
    Tagged(IntMatrix),
    Rows(Vec<Vec<i64>>),
}

/// Either `{"dim": d, "rows": [...]}` or a bare array of integer rows.
pub fn parse_matrix(file: &InputFile) -> Result<IntMatrix, CliError> {
    match file.json::<MatrixInput>()? {
        MatrixInput::Tagged(m) => Ok(m),
        MatrixInput::Rows(rows) => {
            let n = rows.len();
            if n == 0 || rows.iter().any(|r| r.len() != n) {
                return Err(CliError::Input(format!(
                    "{}: matrix must be square",
                    file.label
                )));
            }
            Ok(IntMatrix::from_i64(&rows))
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VectorInput {
    Tagged(LatticeVector),
    Plain(Vec<i64>),
}

pub fn parse_vector_file(file: &InputFile) -> Result<LatticeVector, CliError> {
    Ok(match file.json::<VectorInput>()? {
        VectorInput::Tagged(v) => v,
        VectorInput::Plain(v) => LatticeVector::from_i64(&v),
    })
}

/// `"1,0,-2"`.
pub fn parse_int_list(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| CliError::Input(format!("bad integer {t:?} in {s:?}")))
        })
        .collect()
}

pub fn parse_real_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Input(format!("bad number {t:?} in {s:?}")))
        })
        .collect()
}

/// `"x"` or `"x,y"` for `x + iy`.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    match parse_real_list(s)?.as_slice() {
        [re] => Ok(Complex64::new(*re, 0.0)),
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(CliError::Input(format!(
            "expected \"re\" or \"re,im\", got {s:?}"
        ))),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexInput {
    Object { re: f64, im: f64 },
    Pair([f64; 2]),
    Real(f64),
}

impl From<ComplexInput> for Complex64 {
    fn from(c: ComplexInput) -> Self {
        match c {
            ComplexInput::Object { re, im } => Complex64::new(re, im),
            ComplexInput::Pair([re, im]) => Complex64::new(re, im),
            ComplexInput::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

/// A complex number as `{"re":..,"im":..}`, `[re, im]` or a real.
pub fn parse_complex_file(file: &InputFile) -> Result<Complex64, CliError> {
    Ok(file.json::<ComplexInput>()?.into())
}

/// An array of complex coordinates.
pub fn parse_point_file(file: &InputFile) -> Result<ComplexPoint, CliError> {
    let coords: Vec<ComplexInput> = file.json()?;
    ComplexPoint::new(coords.into_iter().map(Complex64::from).collect()).map_err(CliError::from)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AngleInput {
    Turns(Vec<f64>),
    TaggedTurns { turns: Vec<f64> },
    TaggedRadians { radians: Vec<f64> },
}

/// Rotation angles as fractions of a turn: a bare array, `{"turns": [...]}`
/// or `{"radians": [...]}`.
pub fn parse_turns(file: &InputFile) -> Result<Vec<f64>, CliError> {
    let turns = match file.json::<AngleInput>()? {
        AngleInput::Turns(t) | AngleInput::TaggedTurns { turns: t } => t,
        AngleInput::TaggedRadians { radians } => radians
            .into_iter()
            .map(|r| r / std::f64::consts::TAU)
            .collect(),
    };
    if turns.is_empty() || turns.iter().any(|t| !t.is_finite()) {
        return Err(CliError::Input(format!(
            "{}: need finite angles",
            file.label
        )));
    }
    Ok(turns)
}
