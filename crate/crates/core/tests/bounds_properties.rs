use num_complex::Complex64;
use proptest::prelude::*;

use ghz_forge::bounds::{oneshot_n, symmetric_closed_form, theorem1_bound, OneShotParams, Witness};
use ghz_forge::marginals::cut_upper_bound;
use ghz_forge::states::{w, LocalUnitary, PureState};

/// A random pure state on `d × d × d` with roughly half the amplitudes zero.
fn pure_state(d: usize) -> impl Strategy<Value = PureState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, any::<bool>()), d * d * d).prop_filter_map(
        "zero vector",
        move |cells| {
            let amps: Vec<(Vec<usize>, Complex64)> = cells
                .iter()
                .enumerate()
                .filter(|(_, c)| c.2)
                .map(|(i, &(re, im, _))| (vec![i / (d * d), i / d % d, i % d], Complex64::new(re, im)))
                .filter(|(_, a)| a.norm() > 1e-3)
                .collect();
            if amps.is_empty() {
                return None;
            }
            PureState::normalized(vec![d; 3], amps).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn theorem1_below_cut(psi in pure_state(2)) {
        let t = theorem1_bound(&psi.distribution()).unwrap().value;
        prop_assert!(t <= cut_upper_bound(&psi).unwrap() + 1e-9);
    }

    #[test]
    fn theorem1_invariant_under_relabelings(
        psi in pure_state(3),
        order in Just(vec![0usize, 1, 2]).prop_shuffle(),
        perm in Just(vec![0usize, 1, 2]).prop_shuffle(),
        site in 0usize..3,
    ) {
        let base = theorem1_bound(&psi.distribution()).unwrap().value;
        let moved = psi.permute_parties(&order).unwrap();
        prop_assert!((theorem1_bound(&moved.distribution()).unwrap().value - base).abs() < 1e-9);
        let relabeled = psi.apply_local_unitary(&LocalUnitary::permutation(site, &perm).unwrap()).unwrap();
        prop_assert!((theorem1_bound(&relabeled.distribution()).unwrap().value - base).abs() < 1e-9);
    }
}

#[test]
fn w_states_reach_log_k_over_k_minus_1() {
    for k in 3..=8 {
        let p = w(k).unwrap().distribution();
        let want = (k as f64 / (k as f64 - 1.0)).log2();
        assert!((theorem1_bound(&p).unwrap().value - want).abs() < 1e-9, "k = {k}");
        assert!((symmetric_closed_form(&p).unwrap() - want).abs() < 1e-9, "k = {k}");
    }
}

fn raw(q: &ghz_forge::states::JointDistribution, m: Vec<u64>, alpha: f64, eps: f64) -> (f64, f64, f64) {
    let r = oneshot_n(q, &OneShotParams::new(m, alpha, eps).unwrap()).unwrap();
    let Witness::OneShot(w) = r.witness else { unreachable!() };
    // the two exponents inside the log-sum-exp
    let a = (1.0 - alpha) / alpha * (w.entropy - w.log_m_sum);
    let b = -w.delta / alpha;
    (w.raw(), a, b)
}

#[test]
fn oneshot_count_monotone_in_eps() {
    let q = w(3).unwrap().tensor_power(4).unwrap().distribution();
    for m in [2u64, 4, 8] {
        for alpha in [1.5, 2.0, 4.0] {
            let mut last = f64::NEG_INFINITY;
            for eps in [0.05, 0.1, 0.2, 0.4, 0.8] {
                let (v, _, _) = raw(&q, vec![m; 3], alpha, eps);
                assert!(v >= last - 1e-12);
                last = v;
            }
        }
    }
}

#[test]
fn oneshot_count_monotone_in_m_when_collisions_dominate() {
    let q = w(3).unwrap().tensor_power(6).unwrap().distribution();
    let mut compared = 0;
    for alpha in [1.5, 3.0, 6.0] {
        for base in [1u64, 2, 3, 4, 6] {
            let m0 = vec![base; 3];
            let mut steps: Vec<Vec<u64>> = (0..3)
                .map(|site| {
                    let mut m1 = m0.clone();
                    m1[site] += 1;
                    m1
                })
                .collect();
            steps.push(vec![base + 1; 3]);
            for m1 in steps {
                let (v0, a0, b0) = raw(&q, m0.clone(), alpha, 0.3);
                let (v1, a1, b1) = raw(&q, m1.clone(), alpha, 0.3);
                // Δ grows (b falls) and the collision exponent dominates at both points
                if b1 < b0 - 1e-12 && b0 > a0 + 4.0 && b1 > a1 + 4.0 {
                    compared += 1;
                    assert!(v1 >= v0 - 1e-9, "α={alpha} {m0:?} → {m1:?}: {v0} → {v1}");
                }
            }
        }
    }
    assert!(compared >= 5, "only {compared} comparisons");
}
