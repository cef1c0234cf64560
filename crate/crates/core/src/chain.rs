//! Analytic model of the encoded chain.
//!
//! Each encoded Bell measurement fails when more than `t` of its `n` outputs
//! are wrong, so a block's logical error probability `Q` is a binomial tail.
//! A chain of `L` stations accumulates `2L` such chances, giving the
//! fidelity `(1 - Q)^(2L)` and the maximum number of connections for a
//! target fidelity.

use crate::codes::{resource_estimate, CssCode, CODE_NAMES};
use crate::error::{check_prob, domain, Result};

/// `(P[X <= t], P[X > t])` for `X ~ Binomial(n, q)`, each summed directly in
/// log space so neither tail loses precision to cancellation.
pub(crate) fn binomial_tails(n: u64, t: u64, q: f64) -> (f64, f64) {
    let (lo, up) = binomial_log_tails(n, t, q);
    (lo.exp().min(1.0), up.exp().min(1.0))
}

/// Natural logs of [`binomial_tails`], which stay finite far below `f64` underflow.
fn binomial_log_tails(n: u64, t: u64, q: f64) -> (f64, f64) {
    if t >= n || q == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    if q == 1.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    let ln_q = q.ln();
    let ln_1mq = (-q).ln_1p();
    let odds = ln_q - ln_1mq;
    let step = |j: u64| ((n - j) as f64).ln() - ((j + 1) as f64).ln() + odds;

    let mut lower = Vec::with_capacity(t as usize + 1);
    let mut l = n as f64 * ln_1mq;
    for j in 0..=t {
        lower.push(l);
        if j < t {
            l += step(j);
        }
    }
    // Restart from a direct evaluation so lower-tail rounding does not carry over.
    let mut u = ln_choose(n, t + 1) + (t + 1) as f64 * ln_q + (n - t - 1) as f64 * ln_1mq;
    let mut upper = Vec::with_capacity((n - t) as usize);
    for j in t + 1..=n {
        upper.push(u);
        if j < n {
            u += step(j);
        }
    }
    (log_sum_exp(&lower).min(0.0), log_sum_exp(&upper).min(0.0))
}

fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (1..=k)
        .map(|i| ((n - k + i) as f64).ln() - (i as f64).ln())
        .sum()
}

fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let s: f64 = logs.iter().map(|&l| (l - max).exp()).sum();
    max + s.ln()
}

/// Probability that more than `t` of `n` independent outputs are wrong,
/// each with probability `q` (exact tail sum).
pub fn logical_error_prob(n: u64, t: u64, q: f64) -> Result<f64> {
    check_prob("q", q)?;
    if t > n {
        return Err(domain(format!("t = {t} exceeds n = {n}")));
    }
    Ok(binomial_tails(n, t, q).1)
}

/// Logical error probability of `code` at per-qubit error rate `q`.
pub fn code_logical_error(code: &CssCode, q: f64) -> Result<f64> {
    logical_error_prob(code.n() as u64, code.t() as u64, q)
}

/// Large-code approximation `(2 pi t)^(-1/2) (e^(1 + 1/2n) n q / (t + 1))^(t + 1)`.
pub fn logical_error_prob_asymptotic(n: u64, t: u64, q: f64) -> Result<f64> {
    check_prob("q", q)?;
    if t == 0 || t > n {
        return Err(domain(format!(
            "asymptotic form needs 1 <= t <= n, got n={n}, t={t}"
        )));
    }
    let (n, t) = (n as f64, t as f64);
    let base = (1.0 + 1.0 / (2.0 * n)).exp() * n * q / (t + 1.0);
    Ok(base.powf(t + 1.0) / (2.0 * std::f64::consts::PI * t).sqrt())
}

/// Error rate at which the base of the asymptotic form equals one.
pub fn critical_error_rate(n: u64, t: u64) -> f64 {
    let n = n as f64;
    (t as f64 + 1.0) / ((1.0 + 1.0 / (2.0 * n)).exp() * n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainFidelity {
    /// `(1 - Q)^(2L)`.
    pub fidelity: f64,
    /// `(1 - Q)^(2L - 2)`: the L - 2 Bell measurements plus the final recovery.
    pub refined: f64,
}

fn check_chain(q_logical: f64, stations: f64) -> Result<()> {
    check_prob("Q", q_logical)?;
    if !(stations >= 2.0) {
        return Err(domain(format!(
            "a chain needs at least 2 stations, got {stations}"
        )));
    }
    Ok(())
}

fn survive(q_logical: f64, exponent: f64) -> f64 {
    if exponent.is_infinite() {
        return if q_logical == 0.0 { 1.0 } else { 0.0 };
    }
    (exponent * (-q_logical).ln_1p()).exp()
}

/// End-to-end fidelity of a chain of `stations` (real-valued so that it can
/// be evaluated at a fractional `L*`).
pub fn chain_fidelity(q_logical: f64, stations: f64) -> Result<ChainFidelity> {
    check_chain(q_logical, stations)?;
    Ok(ChainFidelity {
        fidelity: survive(q_logical, 2.0 * stations),
        refined: survive(q_logical, 2.0 * stations - 2.0),
    })
}

/// Key correlation `(1 - Q)^L`.
pub fn key_correlation(q_logical: f64, stations: f64) -> Result<f64> {
    check_chain(q_logical, stations)?;
    Ok(survive(q_logical, stations))
}

/// Largest `L` with `(1 - Q)^(2L) >= f_star`, as a real number.
///
/// Returns `f64::INFINITY` when `Q = 0`.
pub fn max_connections(q_logical: f64, f_star: f64) -> Result<f64> {
    check_prob("Q", q_logical)?;
    if !(f_star > 0.0 && f_star < 1.0) {
        return Err(domain(format!(
            "target fidelity must lie in (0, 1), got {f_star}"
        )));
    }
    if q_logical == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(f_star.ln() / (2.0 * (-q_logical).ln_1p()))
}

/// `L*` for a registered code at per-qubit error rate `q`.
pub fn code_max_connections(code: &CssCode, q: f64, f_star: f64) -> Result<f64> {
    max_connections(code_logical_error(code, q)?, f_star)
}

/// Estimates the error threshold of the code family `t = floor(ratio * n)`:
/// the largest `q` at which `Q` still falls when the block grows from
/// `n_max / 2` to `n_max`.
pub fn threshold_scan(ratio: f64, n_max: u64) -> Result<f64> {
    if !(ratio > 0.0 && ratio <= 0.5) {
        return Err(domain(format!("ratio must lie in (0, 1/2], got {ratio}")));
    }
    let big = n_max;
    let small = n_max / 2;
    let t_of = |n: u64| (ratio * n as f64).floor() as u64;
    if small < 1 || t_of(big) <= t_of(small) {
        return Err(domain(format!(
            "n_max = {n_max} is too small to hold two distinct family members at ratio {ratio}"
        )));
    }
    let falls = |q: f64| {
        let (lo_big, up_big) = binomial_log_tails(big, t_of(big), q);
        let (lo_small, up_small) = binomial_log_tails(small, t_of(small), q);
        let half = 0.5f64.ln();
        if up_big < half && up_small < half {
            up_big < up_small
        } else {
            lo_big > lo_small
        }
    };
    let (mut lo, mut hi) = (1e-9, 0.5);
    if !falls(lo) {
        return Ok(0.0);
    }
    if falls(hi) {
        return Ok(hi);
    }
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if falls(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Per-code summary of the analytic chain model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub resources: usize,
    /// Per-qubit effective error rate.
    pub q: f64,
    /// Per-block logical error rate.
    pub logical_error: f64,
    /// `L*`, possibly infinite.
    pub max_connections: f64,
    /// Fidelity at `L*` (equals the target).
    pub fidelity: f64,
    pub fidelity_refined: f64,
    pub correlation: f64,
    pub distance_km: f64,
}

/// Evaluates one code at `(q, f_star, l0_km)`.
///
/// Repetition codes use the same `q` for the one error species they correct.
pub fn chain_report(code: &CssCode, q: f64, f_star: f64, l0_km: f64) -> Result<ChainReport> {
    if !(l0_km > 0.0) {
        return Err(domain(format!(
            "station spacing must be positive, got {l0_km}"
        )));
    }
    let logical_error = code_logical_error(code, q)?;
    let l_star = max_connections(logical_error, f_star)?;
    Ok(ChainReport {
        code: code.name().to_string(),
        n: code.n(),
        k: code.k(),
        t: code.t(),
        resources: resource_estimate(code).total,
        q,
        logical_error,
        max_connections: l_star,
        fidelity: survive(logical_error, 2.0 * l_star),
        fidelity_refined: survive(logical_error, 2.0 * l_star - 2.0),
        correlation: survive(logical_error, l_star),
        distance_km: l_star * l0_km,
    })
}

/// One report per registered code, in display order.
pub fn table1_report(q: f64, f_star: f64, l0_km: f64) -> Result<Vec<ChainReport>> {
    CODE_NAMES
        .iter()
        .map(|name| chain_report(&crate::codes::build_code(name)?, q, f_star, l0_km))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::build_code;
    use proptest::prelude::*;

    /// Sum of i.i.d. pattern probabilities over all 2^n patterns of weight > t.
    fn enumerate(n: u32, t: u32, q: f64) -> f64 {
        (0u32..1 << n)
            .filter(|p| p.count_ones() > t)
            .map(|p| {
                let w = p.count_ones() as i32;
                q.powi(w) * (1.0 - q).powi(n as i32 - w)
            })
            .sum()
    }

    #[test]
    fn logical_error_examples() {
        let ham = logical_error_prob(7, 1, 3e-3).unwrap();
        assert!((ham - enumerate(7, 1, 3e-3)).abs() < 1e-18);
        assert!((ham - 1.871e-4).abs() < 1e-7, "{ham}");
        assert_eq!(logical_error_prob(23, 3, 0.0).unwrap(), 0.0);
        let rep = logical_error_prob(3, 1, 3e-3).unwrap();
        let q: f64 = 3e-3;
        let hand = 3.0 * q * q * (1.0 - q) + q.powi(3);
        assert!((rep - hand).abs() / hand < 1e-13);
        assert!((rep - 2.6946e-5).abs() < 1e-9);
        assert!(logical_error_prob(3, 4, 0.1).is_err());
        assert!(logical_error_prob(3, 1, 1.5).is_err());
    }

    #[test]
    fn tails_at_endpoints() {
        assert_eq!(logical_error_prob(5, 2, 1.0).unwrap(), 1.0);
        assert_eq!(logical_error_prob(5, 5, 0.7).unwrap(), 0.0);
        let (lo, up) = binomial_tails(2000, 1000, 0.5);
        assert!((lo + up - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enumeration_matches_for_small_blocks() {
        for n in 1..=10u32 {
            for t in 0..n {
                for q in [1e-3, 1e-2, 5e-2, 1e-1] {
                    let exact = enumerate(n, t, q);
                    let got = logical_error_prob(n as u64, t as u64, q).unwrap();
                    assert!((got - exact).abs() <= 1e-12 * exact, "n={n} t={t} q={q}");
                }
            }
        }
    }

    #[test]
    fn asymptotic_examples() {
        let exact = logical_error_prob(23, 3, 3e-3).unwrap();
        let approx = logical_error_prob_asymptotic(23, 3, 3e-3).unwrap();
        let ratio = approx / exact;
        assert!((0.1..=10.0).contains(&ratio), "{ratio}");
        assert_eq!(logical_error_prob_asymptotic(23, 3, 0.0).unwrap(), 0.0);
        assert!(logical_error_prob_asymptotic(7, 0, 0.1).is_err());

        let t = 50u64;
        let n = 19 * t;
        let q = critical_error_rate(n, t);
        let at_critical = logical_error_prob_asymptotic(n, t, q).unwrap();
        let expected = 1.0 / (2.0 * std::f64::consts::PI * t as f64).sqrt();
        assert!((at_critical - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn fidelity_examples() {
        assert_eq!(chain_fidelity(0.0, 10.0).unwrap().fidelity, 1.0);
        let f = chain_fidelity(1.871e-4, 137.0).unwrap();
        assert!((f.fidelity - 0.95).abs() < 1e-3, "{}", f.fidelity);
        let half = chain_fidelity(0.5, 2.0).unwrap();
        assert!((half.fidelity - 0.0625).abs() < 1e-15);
        assert!((half.refined - 0.25).abs() < 1e-15);
        assert!(chain_fidelity(0.1, 1.0).is_err());
    }

    #[test]
    fn correlation_examples() {
        assert_eq!(key_correlation(0.0, 5.0).unwrap(), 1.0);
        let c = key_correlation(1.871e-4, 137.0).unwrap();
        assert!((c - 0.9747).abs() < 5e-4, "{c}");
        assert!(key_correlation(0.1, 0.0).is_err());
    }

    #[test]
    fn max_connections_examples() {
        let none = max_connections(3e-3, 0.95).unwrap();
        assert!((none - 8.5).abs() < 0.1, "{none}");
        let ham = code_max_connections(&build_code("hamming-7").unwrap(), 3e-3, 0.95).unwrap();
        assert!((ham / 140.0 - 1.0).abs() < 0.05, "{ham}");
        let golay = build_code("golay-23").unwrap();
        let g = code_max_connections(&golay, 3e-3, 0.95).unwrap();
        assert!((g / 3.7e4 - 1.0).abs() < 0.05, "{g}");
        let hi = code_max_connections(&golay, 3e-3, 0.999).unwrap();
        assert!((hi / 730.0 - 1.0).abs() < 0.01, "{hi}");
        assert_eq!(max_connections(0.0, 0.95).unwrap(), f64::INFINITY);
        assert!(max_connections(1e-3, 1.0).is_err());
        assert!(max_connections(1e-3, 0.0).is_err());
    }

    #[test]
    fn threshold_examples() {
        let qc = threshold_scan(1.0 / 19.0, 2000).unwrap();
        assert!((0.045..=0.055).contains(&qc), "{qc}");
        let crude = critical_error_rate(1_000_000, 1_000_000 / 19);
        assert!((crude - 0.0194).abs() < 5e-4, "{crude}");
        let rep = threshold_scan(0.5, 2000).unwrap();
        assert!((rep - 0.5).abs() < 5e-3, "{rep}");
        assert!(threshold_scan(1.0 / 19.0, 10).is_err());
        assert!(threshold_scan(0.7, 2000).is_err());
    }

    #[test]
    fn table1_examples() {
        let rows = table1_report(3e-3, 0.95, 10.0).unwrap();
        let row = |name: &str| rows.iter().find(|r| r.code == name).unwrap().clone();
        let within = |got: f64, want: f64| (got / want).max(want / got) < 1.15;
        assert!(within(row("repetition-5").distance_km, 1.0e6));
        assert!(within(row("bacon-shor-25").distance_km, 4.3e3));
        assert!(within(row("bch-127").distance_km, 4.0e7));
        for r in &rows {
            assert!((r.fidelity - 0.95).abs() < 1e-9);
            assert!(r.fidelity <= r.fidelity_refined);
            assert!((r.correlation * r.correlation - r.fidelity).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn logical_error_monotone_in_q(n in 1u64..60, t_frac in 0.0..1.0f64, q in 1e-4..0.49f64, dq in 1e-4..0.01f64) {
            let t = ((n as f64 - 1.0) * t_frac) as u64;
            let a = logical_error_prob(n, t, q).unwrap();
            let b = logical_error_prob(n, t, (q + dq).min(0.5)).unwrap();
            prop_assert!(b >= a * (1.0 - 1e-12));
        }

        #[test]
        fn fidelity_identities(q_log in 0.0..0.2f64, stations in 2.0..5000.0f64) {
            let f = chain_fidelity(q_log, stations).unwrap();
            let expected = 2.0 * stations * (-q_log).ln_1p();
            prop_assume!(expected > -700.0);
            prop_assert!((f.fidelity.ln() - expected).abs() <= 1e-12 * expected.abs().max(1e-300));
            if q_log < 1.0 {
                prop_assert!((f.refined / f.fidelity - (1.0 - q_log).powi(-2)).abs() < 1e-9);
            }
            let c = key_correlation(q_log, stations).unwrap();
            prop_assert!((c * c - f.fidelity).abs() < 1e-12);
        }

        #[test]
        fn max_connections_inverts_fidelity(q_log in 1e-9..0.05f64, f_star in 0.5..0.9999f64) {
            let l = max_connections(q_log, f_star).unwrap();
            prop_assume!(l >= 2.0);
            let f = chain_fidelity(q_log, l).unwrap().fidelity;
            prop_assert!((f / f_star - 1.0).abs() < 1e-9);
        }
    }
}
