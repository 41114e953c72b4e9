//! Text format for states consumed by the CLI.
//!
//! ```json
//! { "k": 3, "dims": [2, 2, 2],
//!   "amps": [ {"idx": [0,0,0], "re": 0.7071067811865476, "im": 0.0},
//!             {"idx": [1,1,1], "re": 0.7071067811865476, "im": 0.0} ] }
//! ```
//!
//! `im` may be omitted. Whitespace is insignificant.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PureState;
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    k: usize,
    dims: Vec<usize>,
    amps: Vec<AmpRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmpRecord {
    idx: Vec<usize>,
    re: f64,
    #[serde(default)]
    im: f64,
}

/// Line (1-based) of the `nth` occurrence of `needle`, or the last line.
fn line_of_nth(text: &str, needle: &str, nth: usize) -> usize {
    text.match_indices(needle)
        .nth(nth)
        .map(|(pos, _)| text[..pos].matches('\n').count() + 1)
        .unwrap_or_else(|| text.lines().count().max(1))
}

fn field_from_message(msg: &str) -> String {
    msg.split('`').nth(1).unwrap_or("document").to_string()
}

pub fn parse_state(text: &str) -> Result<PureState> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        field: field_from_message(&e.to_string()),
        message: e.to_string(),
    })?;
    let line_field = |field: &str, message: String| Error::Parse {
        line: line_of_nth(text, &format!("\"{field}\""), 0),
        field: field.to_string(),
        message,
    };
    if file.dims.len() != file.k {
        return Err(line_field(
            "dims",
            format!("has {} entries but k = {}", file.dims.len(), file.k),
        ));
    }
    if file.amps.is_empty() {
        return Err(line_field("amps", "no amplitudes".into()));
    }
    for (n, rec) in file.amps.iter().enumerate() {
        let bad = if rec.idx.len() != file.k {
            Some(format!("amps[{n}].idx has length {}, expected {}", rec.idx.len(), file.k))
        } else {
            rec.idx
                .iter()
                .zip(&file.dims)
                .position(|(i, d)| i >= d)
                .map(|j| format!("amps[{n}].idx[{j}] = {} exceeds dims[{j}] = {}", rec.idx[j], file.dims[j]))
        };
        if let Some(message) = bad {
            return Err(Error::Parse {
                line: line_of_nth(text, "\"idx\"", n),
                field: format!("amps[{n}].idx"),
                message,
            });
        }
    }
    let amps = file
        .amps
        .into_iter()
        .map(|r| (r.idx, Complex64::new(r.re, r.im)));
    PureState::new(file.dims, amps).map_err(|e| line_field("amps", e.to_string()))
}

pub fn render_state(state: &PureState) -> String {
    let file = StateFile {
        k: state.k(),
        dims: state.dims().to_vec(),
        amps: state
            .amps()
            .iter()
            .map(|(idx, a)| AmpRecord {
                idx: idx.clone(),
                re: a.re,
                im: a.im,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("state serializes")
}
