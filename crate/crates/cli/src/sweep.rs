//! CSV parameter sweeps over one-parameter families.

use std::fmt::Write as _;

use anyhow::{bail, Result};

use ghz_forge::bounds::theorem1_bound;
use ghz_forge::marginals::{cut_upper_bound, smolin_bound, streltsov_bound};
use ghz_forge::states::family;

use crate::input::{apply_rotations, fmt6};

pub const BOUND_NAMES: &[&str] = &["theorem1", "smolin", "streltsov", "cut"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub bounds: Vec<String>,
    /// Rotations applied before the basis-dependent `theorem1` column.
    pub rotations: Vec<String>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            bail!("a sweep needs at least 2 steps, got {}", self.steps);
        }
        let domain = match self.family.as_str() {
            "asymmetric-w" | "asymmetric_w" => (0.0, 0.5),
            "rohrlich" => (0.0, 1.0),
            other => bail!("`{other}` has no continuous parameter; sweep asymmetric-w or rohrlich"),
        };
        for v in [self.start, self.stop] {
            if !(domain.0..=domain.1).contains(&v) {
                bail!("{v} is outside the {} domain [{}, {}]", self.family, domain.0, domain.1);
            }
        }
        if self.bounds.is_empty() {
            bail!("no bounds selected");
        }
        if let Some(b) = self.bounds.iter().find(|b| !BOUND_NAMES.contains(&b.as_str())) {
            bail!("unknown bound `{b}` (expected {})", BOUND_NAMES.join(", "));
        }
        Ok(())
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.steps - 1;
        // exact endpoints, independent of accumulated rounding
        (0..=n).map(move |i| if i == n { self.stop } else { self.start + (self.stop - self.start) * i as f64 / n as f64 })
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<String> {
    spec.validate()?;
    let mut out = String::new();
    writeln!(out, "p,{}", spec.bounds.join(","))?;
    for p in spec.grid() {
        let psi = family(&spec.family, p)?;
        let mut row = vec![fmt6(p)];
        for b in &spec.bounds {
            let v = match b.as_str() {
                "theorem1" => {
                    let rotated = apply_rotations(psi.clone(), &spec.rotations)?;
                    theorem1_bound(&rotated.distribution())?.value
                }
                "smolin" => smolin_bound(&psi)?,
                "streltsov" => streltsov_bound(&psi)?,
                _ => cut_upper_bound(&psi)?,
            };
            row.push(fmt6(v));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(out)
}
