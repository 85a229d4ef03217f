//! State and unitary files.
//!
//! ```json
//! {"dims": [2, 2], "matrix": [[[0.5, 0], [0, 0], ...], ...]}
//! {"dims": [2, 2], "amplitudes": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]}
//! ```

use serde_json::Value;

use crate::error::Error;
use crate::gates::UNITARY_TOL;
use crate::qmat::{ComplexMatrix, C64};
use crate::qstate::{density_from_ket, DensityMatrix, Ket};

/// Malformed input (exit 2) versus well-formed but invalid content (exit 3).
#[derive(Debug, Clone, PartialEq)]
pub enum InputError {
    Parse(String),
    Invalid(Error),
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Parse(msg) => write!(f, "parse error: {msg}"),
            Self::Invalid(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        Self::Invalid(e)
    }
}

fn parse_err(msg: impl Into<String>) -> InputError {
    InputError::Parse(msg.into())
}

#[derive(Debug, Clone)]
pub enum StateInput {
    Density(DensityMatrix),
    Pure { ket: Ket, dims: (usize, usize) },
}

impl StateInput {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            Self::Density(rho) => rho.dims(),
            Self::Pure { dims, .. } => *dims,
        }
    }

    pub fn density(&self) -> Result<DensityMatrix, InputError> {
        match self {
            Self::Density(rho) => Ok(rho.clone()),
            Self::Pure { ket, dims } => Ok(density_from_ket(ket, dims.0, dims.1)?),
        }
    }
}

fn parse_root(text: &str) -> Result<serde_json::Map<String, Value>, InputError> {
    let value: Value = serde_json::from_str(text).map_err(|e| parse_err(format!("invalid JSON: {e}")))?;
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(parse_err("top level must be an object")),
    }
}

fn parse_dims(root: &serde_json::Map<String, Value>) -> Result<(usize, usize), InputError> {
    let dims = root
        .get("dims")
        .ok_or_else(|| parse_err("missing field `dims`"))?
        .as_array()
        .ok_or_else(|| parse_err("field `dims` must be an array [dA, dB]"))?;
    if dims.len() != 2 {
        return Err(parse_err(format!(
            "field `dims` must have 2 entries, found {}",
            dims.len()
        )));
    }
    let mut out = [0usize; 2];
    for (i, d) in dims.iter().enumerate() {
        out[i] = d
            .as_u64()
            .filter(|&d| d >= 1)
            .ok_or_else(|| parse_err(format!("field `dims[{i}]` must be a positive integer")))?
            as usize;
    }
    Ok((out[0], out[1]))
}

fn parse_complex(v: &Value, path: &str) -> Result<C64, InputError> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| parse_err(format!("field `{path}` must be a [re, im] pair")))?;
    let part = |k: usize| {
        pair[k]
            .as_f64()
            .ok_or_else(|| parse_err(format!("field `{path}[{k}]` must be a number")))
    };
    Ok(C64::new(part(0)?, part(1)?))
}

fn parse_matrix(v: &Value, n: usize) -> Result<ComplexMatrix, InputError> {
    let rows = v
        .as_array()
        .ok_or_else(|| parse_err("field `matrix` must be an array of rows"))?;
    if rows.len() != n {
        return Err(parse_err(format!(
            "field `matrix` has {} rows, dims require {n}",
            rows.len()
        )));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| parse_err(format!("field `matrix[{i}]` must be an array")))?;
        if row.len() != n {
            return Err(parse_err(format!(
                "field `matrix[{i}]` has {} entries, expected {n}",
                row.len()
            )));
        }
        for (j, z) in row.iter().enumerate() {
            data.push(parse_complex(z, &format!("matrix[{i}][{j}]"))?);
        }
    }
    Ok(ComplexMatrix::new(n, data)?)
}

fn parse_amplitudes(v: &Value, n: usize) -> Result<Vec<C64>, InputError> {
    let amps = v
        .as_array()
        .ok_or_else(|| parse_err("field `amplitudes` must be an array"))?;
    if amps.len() != n {
        return Err(parse_err(format!(
            "field `amplitudes` has {} entries, dims require {n}",
            amps.len()
        )));
    }
    amps.iter()
        .enumerate()
        .map(|(i, z)| parse_complex(z, &format!("amplitudes[{i}]")))
        .collect()
}

pub fn parse_state(text: &str) -> Result<StateInput, InputError> {
    let root = parse_root(text)?;
    let dims = parse_dims(&root)?;
    let n = dims.0 * dims.1;
    match (root.get("matrix"), root.get("amplitudes")) {
        (Some(_), Some(_)) => Err(parse_err("give either `matrix` or `amplitudes`, not both")),
        (Some(m), None) => Ok(StateInput::Density(DensityMatrix::new(
            parse_matrix(m, n)?,
            dims.0,
            dims.1,
        )?)),
        (None, Some(a)) => Ok(StateInput::Pure {
            ket: Ket::new(parse_amplitudes(a, n)?)?,
            dims,
        }),
        (None, None) => Err(parse_err("missing field `matrix` or `amplitudes`")),
    }
}

pub fn parse_unitary(text: &str) -> Result<(ComplexMatrix, (usize, usize)), InputError> {
    let root = parse_root(text)?;
    let dims = parse_dims(&root)?;
    let m = root.get("matrix").ok_or_else(|| parse_err("missing field `matrix`"))?;
    let u = parse_matrix(m, dims.0 * dims.1)?;
    u.ensure_unitary(UNITARY_TOL)?;
    Ok((u, dims))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_amplitudes() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!(r#"{{"dims":[2,2],"amplitudes":[[{h},0],[0,0],[0,0],[{h},0]]}}"#);
        let s = parse_state(&text).unwrap();
        assert_eq!(s.dims(), (2, 2));
        assert!((s.density().unwrap().purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (r#"{"dims":[2],"matrix":[]}"#, "dims"),
            (r#"{"dims":[2,"x"],"matrix":[]}"#, "dims[1]"),
            (r#"{"dims":[1,2],"matrix":[[[1,0],[0,0]],[[0,0],"z"]]}"#, "matrix[1]"),
            (r#"{"dims":[1,2],"matrix":[[[1,0],[0,0]],[[0,0],[0]]]}"#, "matrix[1][1]"),
            (r#"{"dims":[1,2],"amplitudes":[[1,0],[0,"q"]]}"#, "amplitudes[1][1]"),
            (r#"{"dims":[1,2]}"#, "matrix"),
            ("[1]", "object"),
        ];
        for (text, needle) in cases {
            match parse_state(text) {
                Err(InputError::Parse(msg)) => assert!(msg.contains(needle), "{msg} lacks {needle}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn invalid_content_is_not_a_parse_error() {
        let text = r#"{"dims":[1,2],"matrix":[[[0.5,0],[0.5,0]],[[0,0],[0.5,0]]]}"#;
        assert!(matches!(
            parse_state(text),
            Err(InputError::Invalid(Error::NotHermitian { .. }))
        ));
        let text = r#"{"dims":[1,2],"amplitudes":[[1,0],[1,0]]}"#;
        assert!(matches!(parse_state(text), Err(InputError::Invalid(_))));
    }

    #[test]
    fn unitary_file() {
        let text = r#"{"dims":[1,2],"matrix":[[[0,0],[1,0]],[[1,0],[0,0]]]}"#;
        assert!(parse_unitary(text).is_ok());
        let text = r#"{"dims":[1,2],"matrix":[[[1,0],[1,0]],[[0,0],[1,0]]]}"#;
        assert!(matches!(
            parse_unitary(text),
            Err(InputError::Invalid(Error::NotUnitary { .. }))
        ));
    }
}
