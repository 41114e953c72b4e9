//! Loading states from files or built-in families, and local rotations.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;

use ghz_forge::states::{family, parse_state, LocalUnitary, PureState};

/// A state source: exactly one of a file or a family with its parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSource {
    File(std::path::PathBuf),
    Family { name: String, param: f64 },
}

impl StateSource {
    pub fn from_flags(file: Option<&Path>, family: Option<&str>, param: Option<f64>) -> Result<Self> {
        match (file, family, param) {
            (Some(f), None, None) => Ok(Self::File(f.to_path_buf())),
            (None, Some(name), Some(param)) => Ok(Self::Family {
                name: name.to_string(),
                param,
            }),
            (None, Some(_), None) => bail!("--family needs --param"),
            (Some(_), Some(_), _) => bail!("give either --file or --family, not both"),
            _ => bail!("a state is required: --file PATH or --family NAME --param V"),
        }
    }

    pub fn load(&self) -> Result<PureState> {
        match self {
            Self::File(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(parse_state(&text).with_context(|| format!("parsing {}", path.display()))?)
            }
            Self::Family { name, param } => Ok(family(name, *param)?),
        }
    }
}

/// Parses a complex literal: `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || anyhow!("malformed complex number `{s}`");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0));
    };
    // split at the last sign that is not the leading one or part of an exponent
    let split = body
        .char_indices()
        .rev()
        .find(|&(i, c)| (c == '+' || c == '-') && i > 0 && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i);
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re.parse().map_err(|_| bad())?, im))
}

/// `site:hadamard`, `site:identity` or `site:[a,b;c,d]`.
pub fn parse_rotation(spec: &str, state: &PureState) -> Result<LocalUnitary> {
    let (site, name) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("rotation `{spec}` must look like SITE:NAME"))?;
    let site: usize = site.trim().parse().with_context(|| format!("bad site in `{spec}`"))?;
    let dim = *state
        .dims()
        .get(site)
        .ok_or_else(|| anyhow!("site {site} out of range for a {}-party state", state.k()))?;
    let name = name.trim();
    match name {
        "hadamard" => {
            if dim != 2 {
                bail!("hadamard needs a qubit site, site {site} has dimension {dim}");
            }
            Ok(LocalUnitary::hadamard(site))
        }
        "identity" => Ok(LocalUnitary::identity(site, dim)),
        m if m.starts_with('[') && m.ends_with(']') => {
            let rows: Vec<&str> = m[1..m.len() - 1].split(';').collect();
            let entries = rows
                .iter()
                .flat_map(|r| r.split(','))
                .map(parse_complex)
                .collect::<Result<Vec<_>>>()?;
            if rows.len() != 2 || entries.len() != 4 {
                bail!("inline rotation must be a 2x2 matrix [a,b;c,d], got `{m}`");
            }
            Ok(LocalUnitary::new(site, 2, entries)?)
        }
        other => bail!("unknown rotation `{other}` (expected hadamard, identity or [a,b;c,d])"),
    }
}

pub fn apply_rotations(mut state: PureState, specs: &[String]) -> Result<PureState> {
    for spec in specs {
        let u = parse_rotation(spec, &state)?;
        state = state.apply_local_unitary(&u)?;
    }
    Ok(state)
}

/// Six decimals, with values that round to zero printed unsigned.
pub fn fmt6(v: f64) -> String {
    if v.abs() < 5e-7 {
        "0.000000".to_string()
    } else {
        format!("{v:.6}")
    }
}
