//! Randomized property suites behind `ghz-forge verify`.

use std::fmt::Write as _;

use anyhow::{bail, Result};

use ghz_forge::entropy::{nielsen_convertible, EntropyProfile, SubsetMask};
use ghz_forge::lp::{solve_dual, solve_primal, CoveringLP};
use ghz_forge::protocol::{exact_expectation, meanbounds_sandwich, HomogeneousModel, SubsetGenerator};
use ghz_forge::rng::CounterRng;
use ghz_forge::states::SupportSet;

pub const LEMMAS: &[&str] = &["meanbounds", "duality", "majorization"];

const DUALITY_TOL: f64 = 1e-9;
const SANDWICH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub lemma: String,
    pub trials: usize,
    pub failures: usize,
    /// Human-readable dump of the first (shrunk) failure.
    pub counterexample: Option<String>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "lemma={} trials={} failures={}\n{}\n",
            self.lemma,
            self.trials,
            self.failures,
            if self.passed() { "PASS" } else { "FAIL" }
        );
        if let Some(c) = &self.counterexample {
            s.push_str("counterexample:\n");
            s.push_str(c);
        }
        s
    }
}

/// Repeatedly applies the first simplification that keeps `fails` true.
fn shrink<T: Clone>(mut case: T, candidates: impl Fn(&T) -> Vec<T>, fails: impl Fn(&T) -> bool) -> T {
    'outer: loop {
        for c in candidates(&case) {
            if fails(&c) {
                case = c;
                continue 'outer;
            }
        }
        return case;
    }
}

fn run<T: Clone>(
    lemma: &str,
    cases: Vec<T>,
    fails: impl Fn(&T) -> bool,
    candidates: impl Fn(&T) -> Vec<T>,
    dump: impl Fn(&T) -> String,
) -> Summary {
    let trials = cases.len();
    let failing: Vec<&T> = cases.iter().filter(|c| fails(c)).collect();
    Summary {
        lemma: lemma.into(),
        trials,
        failures: failing.len(),
        counterexample: failing.first().map(|c| dump(&shrink((*c).clone(), &candidates, &fails))),
    }
}

pub fn verify(lemma: &str, trials: usize, seed: u64, plant: bool) -> Result<Summary> {
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    match lemma {
        "duality" => Ok(duality(trials, seed)),
        "meanbounds" => Ok(meanbounds(trials, seed)),
        "majorization" => Ok(majorization(trials, seed, plant)),
        other => bail!("unknown lemma `{other}` (expected {})", LEMMAS.join(", ")),
    }
}

fn duality_gap(values: &[f64]) -> Option<f64> {
    let k = values.len().trailing_zeros() as usize;
    let profile = EntropyProfile::from_fn(k, |m| values[m.0 as usize]).ok()?;
    let lp = CoveringLP::new(profile.clone());
    let (p, d) = (solve_primal(&lp).ok()?, solve_dual(&lp).ok()?);
    let mut gap = (p.objective - d.objective).abs();
    for m in SubsetMask::proper(k) {
        let lhs: f64 = m.sites().map(|j| p.x[j]).sum();
        gap = gap.max(profile.get(m) - lhs);
    }
    for j in 0..k {
        let load: f64 = d.certificate.iter().filter(|(m, _)| m.contains(j)).map(|(_, y)| y).sum();
        gap = gap.max(load - 1.0);
    }
    gap = gap.max(-d.certificate.values().cloned().fold(0.0, f64::min));
    gap = gap.max((d.dual_objective(&profile) - d.objective).abs());
    Some(gap)
}

fn duality(trials: usize, seed: u64) -> Summary {
    let cases: Vec<Vec<f64>> = (0..trials)
        .map(|t| {
            let mut rng = CounterRng::stream(seed, &[0, t as u64]);
            let k = 2 + rng.below(3) as usize;
            (0..1usize << k).map(|_| 2.0 * rng.next_f64()).collect()
        })
        .collect();
    run(
        "duality",
        cases,
        |v| duality_gap(v).is_none_or(|g| g > DUALITY_TOL),
        |v| {
            (0..v.len())
                .filter(|&i| v[i] != 0.0)
                .map(|i| {
                    let mut w = v.clone();
                    w[i] = 0.0;
                    w
                })
                .collect()
        },
        |v| {
            let k = v.len().trailing_zeros() as usize;
            let mut s = String::new();
            for m in SubsetMask::proper(k) {
                let _ = writeln!(s, "h{m}={}", v[m.0 as usize]);
            }
            let _ = writeln!(s, "violation={:?}", duality_gap(v));
            s
        },
    )
}

/// A small support with weights and a random-subset generator.
#[derive(Debug, Clone)]
pub struct SandwichCase {
    pub dims: Vec<usize>,
    pub support: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
    pub generator: SubsetGenerator,
}

impl SandwichCase {
    /// `(lower, exact, upper)`, or `None` if the instance is invalid.
    pub fn evaluate(&self) -> Option<(f64, f64, f64)> {
        let phi = SupportSet::new(self.dims.clone(), self.support.iter().cloned()).ok()?;
        let weight = |e: &[usize]| self.support.iter().position(|s| s == e).map_or(0.0, |i| self.weights[i]);
        let model = match &self.generator {
            SubsetGenerator::IndependentInclusion(q) => HomogeneousModel::independent(q).ok()?,
            SubsetGenerator::PartitionCell(m) => HomogeneousModel::partition(m).ok()?,
            SubsetGenerator::Deterministic(_) => return None,
        };
        let (lo, hi) = meanbounds_sandwich(&phi, &weight, &model).ok()?;
        let exact = exact_expectation(&phi, &weight, &self.generator).ok()?;
        Some((lo, exact, hi))
    }

    fn fails(&self) -> bool {
        self.evaluate()
            .is_none_or(|(lo, ex, hi)| ex < lo - SANDWICH_TOL || ex > hi + SANDWICH_TOL)
    }
}

/// A random `k = 3` instance with at most three indices per site.
fn sandwich_case(rng: &mut CounterRng, partition: bool) -> SandwichCase {
    let dims: Vec<usize> = (0..3).map(|_| 1 + rng.below(3) as usize).collect();
    let mut support = Vec::new();
    for a in 0..dims[0] {
        for b in 0..dims[1] {
            for c in 0..dims[2] {
                if rng.bernoulli(0.5) {
                    support.push(vec![a, b, c]);
                }
            }
        }
    }
    if support.is_empty() {
        support.push(dims.iter().map(|&d| rng.below(d as u64) as usize).collect());
    }
    let weights = support.iter().map(|_| rng.next_f64()).collect();
    let generator = if partition {
        SubsetGenerator::PartitionCell((0..3).map(|_| 1 + rng.below(3)).collect())
    } else {
        SubsetGenerator::IndependentInclusion((0..3).map(|_| 0.1 + 0.8 * rng.next_f64()).collect())
    };
    SandwichCase {
        dims,
        support,
        weights,
        generator,
    }
}

/// Both homogeneous models, alternating, on small random instances.
pub fn sandwich_corpus(trials: usize, seed: u64) -> Vec<SandwichCase> {
    (0..trials)
        .map(|t| sandwich_case(&mut CounterRng::stream(seed, &[1, t as u64]), t % 2 == 1))
        .collect()
}

fn meanbounds(trials: usize, seed: u64) -> Summary {
    run(
        "meanbounds",
        sandwich_corpus(trials, seed),
        SandwichCase::fails,
        |c| {
            (0..c.support.len())
                .filter(|_| c.support.len() > 1)
                .map(|i| {
                    let mut d = c.clone();
                    d.support.remove(i);
                    d.weights.remove(i);
                    d
                })
                .collect()
        },
        |c| {
            format!(
                "dims={:?}\nsupport={:?}\nweights={:?}\ngenerator={:?}\n(lower, exact, upper)={:?}\n",
                c.dims,
                c.support,
                c.weights,
                c.generator,
                c.evaluate()
            )
        },
    )
}

/// `p ≺ q` via the threshold characterization
/// `Σ_i (p_i − t)⁺ ≤ Σ_i (q_i − t)⁺` at every entry `t` of `p` or `q`.
pub fn majorized_by_thresholds(p: &[f64], q: &[f64]) -> bool {
    let excess = |v: &[f64], t: f64| v.iter().map(|x| (x - t).max(0.0)).sum::<f64>();
    p.iter()
        .chain(q)
        .chain(std::iter::once(&0.0))
        .all(|&t| excess(p, t) <= excess(q, t) + 1e-12)
        && (p.iter().sum::<f64>() - q.iter().sum::<f64>()).abs() < 1e-9
}

#[derive(Debug, Clone)]
struct MajorizationCase {
    p: Vec<f64>,
    q: Vec<f64>,
    /// Known truth value of `p ≺ q`, when the pair was built to have one.
    expected: Option<bool>,
}

impl MajorizationCase {
    fn fails(&self) -> bool {
        let got = nielsen_convertible(&self.p, &self.q);
        got != majorized_by_thresholds(&self.p, &self.q) || self.expected.is_some_and(|e| e != got)
    }
}

fn random_simplex(rng: &mut CounterRng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.next_f64()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn majorization(trials: usize, seed: u64, plant: bool) -> Summary {
    let mut cases: Vec<MajorizationCase> = (0..trials)
        .map(|t| {
            let mut rng = CounterRng::stream(seed, &[2, t as u64]);
            let n = 2 + rng.below(5) as usize;
            let q = random_simplex(&mut rng, n);
            if t % 2 == 0 {
                // a product of T-transforms is doubly stochastic, so p ≺ q
                let mut p = q.clone();
                for _ in 0..3 {
                    let (i, j) = (rng.below(n as u64) as usize, rng.below(n as u64) as usize);
                    let l = rng.next_f64();
                    let (a, b) = (p[i], p[j]);
                    p[i] = l * a + (1.0 - l) * b;
                    p[j] = l * b + (1.0 - l) * a;
                }
                MajorizationCase { p, q, expected: Some(true) }
            } else {
                let p = random_simplex(&mut rng, n);
                MajorizationCase { p, q, expected: None }
            }
        })
        .collect();
    if plant {
        // a product state cannot be turned into a maximally entangled one,
        // so this claimed conversion is false
        cases.push(MajorizationCase {
            p: vec![1.0, 0.0],
            q: vec![0.5, 0.5],
            expected: Some(true),
        });
    }
    run(
        "majorization",
        cases,
        MajorizationCase::fails,
        |_| Vec::new(),
        |c| {
            format!(
                "p={:?}\nq={:?}\nclaimed={:?}\nnielsen_convertible={}\nthreshold_oracle={}\n",
                c.p,
                c.q,
                c.expected,
                nielsen_convertible(&c.p, &c.q),
                majorized_by_thresholds(&c.p, &c.q)
            )
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert!(majorized_by_thresholds(&[0.5, 0.5], &[1.0, 0.0]));
        assert!(!majorized_by_thresholds(&[1.0, 0.0], &[0.5, 0.5]));
        assert!(majorized_by_thresholds(&[0.4, 0.3, 0.3], &[0.5, 0.4, 0.1]));
    }

    #[test]
    fn shrink_reaches_fixpoint() {
        let r = shrink(10u32, |&x| if x > 0 { vec![x - 1] } else { vec![] }, |&x| x >= 3);
        assert_eq!(r, 3);
    }
}
