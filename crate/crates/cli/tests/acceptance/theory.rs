use rand::Rng;
use ufgm_core::theory::{
    explicit_bound, implicit_bound, lemma3_bound, lemma4_c, recurrence_extremal, RateInputs, RecurrenceSpec,
};

use crate::ensure;
use crate::support::{log_uniform, rng, Traces};

const SPECS: usize = 200;
const STEPS: usize = 500;
/// Agreement between the library's extremal sequence and the one rebuilt here.
const SEQUENCE_RTOL: f64 = 1e-9;
/// The `lemma3_bound` inequality is attained with equality when every q is 0, so the
/// comparison allows round-off.
const LEMMA3_RTOL: f64 = 1e-12;

fn random_spec(r: &mut rand_chacha::ChaCha8Rng) -> Vec<(f64, f64)> {
    let count = r.random_range(1..=4);
    (0..count)
        .map(|_| {
            let alpha = log_uniform(r, 1e-3, 1e3);
            // Endpoints of q get their own share of draws.
            let q = match r.random_range(0..5) {
                0 => 0.0,
                1 => 1.0,
                _ => r.random_range(0.0..1.0),
            };
            (alpha, q)
        })
        .collect()
}

/// Increment `d` solving `Σ α d^{1+q}/(a + d)^q = 1`, by plain bisection on a
/// bracket grown from 1.
fn increment(pairs: &[(f64, f64)], a: f64) -> f64 {
    let f = |d: f64| {
        pairs
            .iter()
            .map(|&(al, q)| al * d.powf(1.0 + q) / (a + d).powf(q))
            .sum::<f64>()
            - 1.0
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Root of `Σ α Δ C^{−(1+q)} = 1` by bisection in `ln C`.
fn root_c(pairs: &[(f64, f64)], delta: f64) -> f64 {
    let f = |t: f64| {
        pairs
            .iter()
            .map(|&(al, q)| al * delta * (-(1.0 + q) * t).exp())
            .sum::<f64>()
            - 1.0
    };
    let (mut lo, mut hi) = (-700.0, 700.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi.exp()
}

/// Extremal sequences of random recurrences: `k ≤ lemma3_bound(A_k)` at every
/// `k ≤ 500`, and reaching `Δ = A_500` takes at most `5·C(Δ)` steps.
pub fn recurrence_simulation(_: &mut Traces) -> Result<String, String> {
    let mut r = rng(2024);
    let mut lemma3_slack = f64::INFINITY;
    let mut lemma4_slack = f64::INFINITY;
    for s in 0..SPECS {
        let pairs = random_spec(&mut r);
        let spec = RecurrenceSpec::new(pairs.clone()).map_err(|e| e.to_string())?;
        let seq = recurrence_extremal(&spec, STEPS).map_err(|e| e.to_string())?;
        ensure!(seq.len() == STEPS + 1, "spec {s}: {} terms", seq.len());

        let mut a = 1.0 / pairs.iter().map(|p| p.0).sum::<f64>();
        ensure!(seq[1] == a, "spec {s}: A_1 = {} expected {a}", seq[1]);
        for (k, &ak) in seq.iter().enumerate().skip(2) {
            a += increment(&pairs, a);
            let rel = (ak - a).abs() / a;
            ensure!(
                rel <= SEQUENCE_RTOL,
                "spec {s}, k = {k}: A_k = {ak} vs rebuilt {a} ({rel:.2e})"
            );
        }

        for (k, &ak) in seq.iter().enumerate().skip(1) {
            let rhs: f64 = pairs
                .iter()
                .map(|&(al, q)| (1.0 + q) * (al * ak).powf(1.0 / (1.0 + q)))
                .sum();
            ensure!(
                k as f64 <= rhs * (1.0 + LEMMA3_RTOL),
                "spec {s} {pairs:?}: k = {k} > {rhs}"
            );
            ensure!(
                (lemma3_bound(&spec, ak) - rhs).abs() <= 1e-12 * rhs,
                "spec {s}: lemma3_bound disagrees at k = {k}"
            );
            lemma3_slack = lemma3_slack.min(rhs / k as f64);
        }

        let delta = seq[STEPS];
        let c = root_c(&pairs, delta);
        let lib_c = lemma4_c(&spec, delta).map_err(|e| e.to_string())?;
        ensure!((lib_c - c).abs() <= 1e-9 * c, "spec {s}: lemma4_c {lib_c} vs {c}");
        let first = seq.iter().position(|&x| x >= delta).unwrap();
        ensure!(
            first as f64 <= 5.0 * c,
            "spec {s}: reached Δ at k = {first} > 5C = {}",
            5.0 * c
        );
        lemma4_slack = lemma4_slack.min(5.0 * c / first as f64);
    }
    Ok(format!(
        "{SPECS} specs x {STEPS} steps; min lemma3 rhs/k = {lemma3_slack:.3}, min 5C/k = {lemma4_slack:.3}"
    ))
}

const SPLIT_M: f64 = 1.0;
const SPLIT_EPS: f64 = 1e-3;
const SPLIT_XI: f64 = 1.0;
const SPLIT_COUNTS: [usize; 4] = [1, 2, 4, 8];
const SPLIT_RTOL: f64 = 1e-9;

/// Splitting `(M, v)` into `|J|` copies of `(M/|J|, v)` leaves the implicit K
/// unchanged while the explicit bound grows. At `v = 0` the explicit bound's
/// `|J|` dependence cancels exactly, so growth is asserted for `v > 0` and
/// flatness for `v = 0`.
pub fn uniform_split(_: &mut Traces) -> Result<String, String> {
    let mut summary = Vec::new();
    for v in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let mut ks = Vec::new();
        let mut explicit = Vec::new();
        for j in SPLIT_COUNTS {
            let inputs = RateInputs::uniform_split(SPLIT_M, v, j, SPLIT_EPS, SPLIT_XI).map_err(|e| e.to_string())?;
            ks.push(implicit_bound(&inputs).map_err(|e| e.to_string())?.k);
            explicit.push(explicit_bound(&inputs));
        }
        for (j, k) in SPLIT_COUNTS.iter().zip(&ks) {
            ensure!(
                (k - ks[0]).abs() <= SPLIT_RTOL * ks[0],
                "v = {v}: K({j}) = {k} differs from K(1) = {}",
                ks[0]
            );
        }
        for w in explicit.windows(2) {
            if v > 0.0 {
                ensure!(w[1] > w[0], "v = {v}: explicit bound did not grow: {explicit:?}");
            } else {
                ensure!(
                    (w[1] - w[0]).abs() <= SPLIT_RTOL * w[0],
                    "v = 0: explicit bound moved: {explicit:?}"
                );
            }
        }
        summary.push(format!(
            "v={v}: K={:.4e}, explicit x{:.2}",
            ks[0],
            explicit[3] / explicit[0]
        ));
    }
    Ok(summary.join("; "))
}
