//! Entanglement purification between neighbouring stations and the resulting
//! cycle time.
//!
//! Pairs are Bell-diagonal. One purification round takes two pairs, applies
//! the bilateral rotation that exchanges the `Phi-` and `Psi-` weights, a
//! bilateral CNOT, and keeps the control pair when both target qubits read
//! the same Z value. Counting how many pairs survive `l` rounds gives the
//! failure probability for collecting `n` purified pairs from `N0` raw ones.

use std::collections::BTreeMap;

use crate::error::{check_prob, domain, Error, Result};

/// Entries below this are dropped from a [`NumberDist`].
pub const TRUNCATION: f64 = 1e-15;

/// Largest raw-pair count [`required_pairs`] will consider.
pub const MAX_PAIRS: u64 = 1 << 16;

/// Bell-diagonal two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDiagState {
    pub phi_plus: f64,
    pub psi_plus: f64,
    pub psi_minus: f64,
    pub phi_minus: f64,
}

impl BellDiagState {
    pub fn new(phi_plus: f64, psi_plus: f64, psi_minus: f64, phi_minus: f64) -> Result<Self> {
        let s = Self {
            phi_plus,
            psi_plus,
            psi_minus,
            phi_minus,
        };
        s.validate()?;
        Ok(s)
    }

    /// Werner state of fidelity `f0`: the remaining weight split evenly.
    pub fn depolarized(f0: f64) -> Result<Self> {
        check_prob("f0", f0)?;
        let rest = (1.0 - f0) / 3.0;
        Self::new(f0, rest, rest, rest)
    }

    pub fn fidelity(&self) -> f64 {
        self.phi_plus
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.to_array();
        if c.iter().any(|&x| !(x >= 0.0)) {
            return Err(domain(format!(
                "Bell coefficients must be nonnegative, got {c:?}"
            )));
        }
        let sum: f64 = c.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(domain(format!("Bell coefficients sum to {sum}, not 1")));
        }
        Ok(())
    }

    /// Weights indexed by `(bit_parity << 1) | phase`: `Phi+`, `Phi-`, `Psi+`, `Psi-`.
    fn to_array(self) -> [f64; 4] {
        [self.phi_plus, self.phi_minus, self.psi_plus, self.psi_minus]
    }

    fn from_array(a: [f64; 4]) -> Self {
        Self {
            phi_plus: a[0],
            phi_minus: a[1],
            psi_plus: a[2],
            psi_minus: a[3],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurifyOutcome {
    pub success_prob: f64,
    pub state: BellDiagState,
}

/// One purification round on two copies of `state`.
///
/// Each bilateral CNOT is followed by two-qubit depolarizing noise of
/// strength `beta` on that side. Since a Bell-diagonal pair has maximally
/// mixed marginals, this replaces the four-qubit state by the identity with
/// probability `1 - (1 - beta)^2`. Each of the two measured bits flips with
/// probability `delta`, which swaps the kept and discarded branches when
/// exactly one flips.
pub fn purify_step(state: &BellDiagState, beta: f64, delta: f64) -> Result<PurifyOutcome> {
    state.validate()?;
    check_prob("beta", beta)?;
    check_prob("delta", delta)?;

    let mut a = state.to_array();
    a.swap(1, 3);

    let mut agree = [0.0; 4];
    let mut differ = [0.0; 4];
    for (i, &wa) in a.iter().enumerate() {
        for (j, &wb) in a.iter().enumerate() {
            let (pa, fa) = (i >> 1, i & 1);
            let (pb, fb) = (j >> 1, j & 1);
            // Parity flows control -> target, phase flows target -> control.
            let out = (pa << 1) | (fa ^ fb);
            if pa == pb {
                agree[out] += wa * wb;
            } else {
                differ[out] += wa * wb;
            }
        }
    }

    let mixed = 1.0 - (1.0 - beta) * (1.0 - beta);
    let flip = 2.0 * delta * (1.0 - delta);
    let mut kept = [0.0; 4];
    for k in 0..4 {
        kept[k] = (1.0 - mixed) * ((1.0 - flip) * agree[k] + flip * differ[k]) + mixed * 0.125;
    }
    let success_prob: f64 = kept.iter().sum();
    if success_prob <= 0.0 {
        return Err(domain("purification round never succeeds"));
    }
    for k in &mut kept {
        *k /= success_prob;
    }
    Ok(PurifyOutcome {
        success_prob,
        state: BellDiagState::from_array(kept),
    })
}

/// Success probabilities and fidelities over `levels` rounds starting from
/// Werner pairs of fidelity `f0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PurificationSchedule {
    /// `r_i`: success probability of round `i`.
    pub success: Vec<f64>,
    /// Fidelity after each round.
    pub fidelity: Vec<f64>,
    pub final_state: BellDiagState,
}

pub fn purification_schedule(
    f0: f64,
    beta: f64,
    delta: f64,
    levels: usize,
) -> Result<PurificationSchedule> {
    let mut state = BellDiagState::depolarized(f0)?;
    let mut success = Vec::with_capacity(levels);
    let mut fidelity = Vec::with_capacity(levels);
    for _ in 0..levels {
        let out = purify_step(&state, beta, delta)?;
        success.push(out.success_prob);
        fidelity.push(out.state.fidelity());
        state = out.state;
    }
    Ok(PurificationSchedule {
        success,
        fidelity,
        final_state: state,
    })
}

/// Distribution of the number of level-`level` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberDist {
    pub level: usize,
    pub probs: BTreeMap<u64, f64>,
    /// Probability mass dropped by truncation below [`TRUNCATION`].
    pub truncated_mass: f64,
}

impl NumberDist {
    pub fn prob(&self, m: u64) -> f64 {
        self.probs.get(&m).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().map(|(&m, &p)| m as f64 * p).sum()
    }

    /// `P[m < n]`.
    pub fn below(&self, n: u64) -> f64 {
        self.probs.range(..n).map(|(_, &p)| p).sum()
    }
}

fn check_rates(r: &[f64], levels: usize) -> Result<()> {
    if r.len() < levels {
        return Err(domain(format!(
            "{levels} levels need {levels} success probabilities, got {}",
            r.len()
        )));
    }
    r.iter()
        .try_for_each(|&x| check_prob("success probability", x))
}

/// Binomial(j, r) pmf over m = 0..=j, normalized to sum to one.
fn binomial_row(j: u64, r: f64) -> Vec<f64> {
    let mut row = vec![0.0; j as usize + 1];
    if r == 0.0 || j == 0 {
        row[0] = 1.0;
        return row;
    }
    if r == 1.0 {
        row[j as usize] = 1.0;
        return row;
    }
    let odds = r.ln() - (-r).ln_1p();
    let mut l = j as f64 * (-r).ln_1p();
    let mut logs = Vec::with_capacity(j as usize + 1);
    for m in 0..=j {
        logs.push(l);
        if m < j {
            l += ((j - m) as f64).ln() - ((m + 1) as f64).ln() + odds;
        }
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (slot, &lg) in row.iter_mut().zip(&logs) {
        *slot = (lg - max).exp();
        sum += *slot;
    }
    row.iter_mut().for_each(|x| *x /= sum);
    row
}

/// Number distribution after `levels` rounds, starting from exactly `n0` raw pairs.
///
/// Pairs are used two at a time (an odd one left over is wasted) and each
/// round at level `i` succeeds independently with probability `r[i]`.
pub fn number_distribution(n0: u64, r: &[f64], levels: usize) -> Result<NumberDist> {
    check_rates(r, levels)?;
    let mut dist = vec![0.0; n0 as usize + 1];
    dist[n0 as usize] = 1.0;
    let mut truncated = 0.0;
    for &rate in &r[..levels] {
        let half = (dist.len() - 1) / 2;
        let mut paired = vec![0.0; half + 1];
        for (m, &p) in dist.iter().enumerate() {
            paired[m / 2] += p;
        }
        let mut next = vec![0.0; half + 1];
        for (j, &pj) in paired.iter().enumerate() {
            if pj == 0.0 {
                continue;
            }
            for (m, b) in binomial_row(j as u64, rate).into_iter().enumerate() {
                next[m] += b * pj;
            }
        }
        for p in &mut next {
            if *p < TRUNCATION {
                truncated += *p;
                *p = 0.0;
            }
        }
        dist = next;
    }
    let mut probs = BTreeMap::new();
    for (m, &p) in dist.iter().enumerate() {
        if p >= TRUNCATION {
            probs.insert(m as u64, p);
        } else {
            truncated += p;
        }
    }
    Ok(NumberDist {
        level: levels,
        probs,
        truncated_mass: truncated,
    })
}

/// Probability of ending with fewer than `n` level-`levels` pairs.
pub fn failure_probability(n0: u64, n: u64, r: &[f64], levels: usize) -> Result<f64> {
    Ok(number_distribution(n0, r, levels)?.below(n))
}

/// Smallest `N0` whose failure probability is at most `p_target`.
pub fn required_pairs(n: u64, r: &[f64], levels: usize, p_target: f64) -> Result<u64> {
    check_rates(r, levels)?;
    if !(p_target > 0.0 && p_target < 1.0) {
        return Err(domain(format!(
            "target failure probability must lie in (0, 1), got {p_target}"
        )));
    }
    if n == 0 {
        return Ok(0);
    }
    if r[..levels].contains(&0.0) {
        return Err(Error::Unreachable {
            target: p_target,
            why: "a purification level never succeeds".into(),
        });
    }
    let fails = |n0: u64| failure_probability(n0, n, r, levels).map(|p| p > p_target);
    // Fewer than n * 2^levels raw pairs can never yield n purified ones.
    let floor = n << levels;
    let mut lo = floor - 1;
    let mut hi = floor;
    while fails(hi)? {
        lo = hi;
        hi *= 2;
        if hi > MAX_PAIRS {
            return Err(Error::Unreachable {
                target: p_target,
                why: format!("needs more than {MAX_PAIRS} raw pairs"),
            });
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fails(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Fiber link between neighbouring stations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub l0_km: f64,
    pub l_att_km: f64,
    pub v_km_s: f64,
    /// Photon collection and detection efficiency.
    pub eta: f64,
    /// Qubits per station available for pair generation.
    pub n_eng: f64,
}

impl LinkParams {
    /// 10 km spacing, 20 km attenuation length, 2e5 km/s, eta = 0.3, and
    /// `n_eng = 4n` generation qubits for blocks of `n` qubits.
    pub fn for_block(n: usize) -> Self {
        Self {
            l0_km: 10.0,
            l_att_km: 20.0,
            v_km_s: 2e5,
            eta: 0.3,
            n_eng: 4.0 * n as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("l0_km", self.l0_km),
            ("l_att_km", self.l_att_km),
            ("v_km_s", self.v_km_s),
            ("n_eng", self.n_eng),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(domain(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        Ok(())
    }

    /// `(l0 / v) e^(l0 / l_att) / eta^2`: cycle time per unit of `kappa`.
    pub fn time_per_kappa(&self) -> f64 {
        self.l0_km / self.v_km_s * (self.l0_km / self.l_att_km).exp() / (self.eta * self.eta)
    }
}

/// Unpurified pair generation rate per second.
pub fn generation_rate(link: &LinkParams) -> Result<f64> {
    link.validate()?;
    Ok(link.v_km_s / link.l0_km
        * link.eta
        * link.eta
        * (-link.l0_km / link.l_att_km).exp()
        * link.n_eng)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleTime {
    pub tau_c: f64,
    pub kappa: f64,
}

/// Time to collect `n0` raw pairs on both sides of a station.
pub fn cycle_time(link: &LinkParams, n0: u64) -> Result<CycleTime> {
    let rate = generation_rate(link)?;
    Ok(CycleTime {
        tau_c: 2.0 * n0 as f64 / rate,
        kappa: 2.0 * n0 as f64 / link.n_eng,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRate {
    /// One key bit per cycle.
    pub raw: f64,
    /// After discarding mismatched bases.
    pub sifted: f64,
}

pub fn key_rate(tau_c: f64) -> Result<KeyRate> {
    if !(tau_c > 0.0) {
        return Err(domain(format!("cycle time must be positive, got {tau_c}")));
    }
    Ok(KeyRate {
        raw: 1.0 / tau_c,
        sifted: 0.5 / tau_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_pair_is_fixed_point() {
        let perfect = BellDiagState::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let out = purify_step(&perfect, 0.0, 0.0).unwrap();
        assert_eq!(out.success_prob, 1.0);
        assert_eq!(out.state, perfect);
    }

    #[test]
    fn noiseless_round_improves_werner_pair() {
        let w = BellDiagState::depolarized(0.95).unwrap();
        let out = purify_step(&w, 0.0, 0.0).unwrap();
        assert!(out.state.fidelity() > 0.95);
        out.state.validate().unwrap();
    }

    #[test]
    fn three_noisy_rounds_reach_target_fidelity() {
        let s = purification_schedule(0.95, 1e-3, 1e-3, 3).unwrap();
        let f = *s.fidelity.last().unwrap();
        assert!((f - 0.9984).abs() < 0.002, "{f}");
    }

    #[test]
    fn rejects_unnormalized_state() {
        let bad = BellDiagState {
            phi_plus: 0.9,
            psi_plus: 0.0,
            psi_minus: 0.0,
            phi_minus: 0.0,
        };
        assert!(purify_step(&bad, 0.0, 0.0).is_err());
        assert!(BellDiagState::new(1.1, -0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn distribution_examples() {
        let d = number_distribution(4, &[1.0], 1).unwrap();
        assert_eq!(d.prob(2), 1.0);
        let d = number_distribution(1, &[0.3], 1).unwrap();
        assert_eq!(d.prob(0), 1.0);
        let d = number_distribution(2, &[0.5], 1).unwrap();
        assert_eq!((d.prob(0), d.prob(1)), (0.5, 0.5));
        assert!(number_distribution(4, &[0.5], 2).is_err());
        assert!(number_distribution(4, &[1.5], 1).is_err());
    }

    #[test]
    fn failure_examples() {
        assert_eq!(failure_probability(2, 1, &[1.0], 1).unwrap(), 0.0);
        assert_eq!(failure_probability(2, 1, &[0.5], 1).unwrap(), 0.5);
        // Deterministic halving: 8n raw pairs always give n after three rounds.
        assert_eq!(failure_probability(56, 7, &[1.0; 3], 3).unwrap(), 0.0);
        assert_eq!(failure_probability(55, 7, &[1.0; 3], 3).unwrap(), 1.0);
    }

    #[test]
    fn fifteen_raw_pairs_per_purified_pair() {
        let s = purification_schedule(0.95, 1e-3, 1e-3, 3).unwrap();
        assert!(failure_probability(15 * 23, 23, &s.success, 3).unwrap() < 1e-5);
        // Odd pair counts waste one pair, so 105 behaves like 104 for n = 7.
        let n0 = required_pairs(7, &s.success, 3, 1e-5).unwrap();
        assert!((104..=106).contains(&n0), "{n0}");
    }

    #[test]
    fn required_pairs_examples() {
        assert_eq!(required_pairs(1, &[1.0], 1, 0.1).unwrap(), 2);
        assert_eq!(required_pairs(0, &[0.5], 1, 0.1).unwrap(), 0);
        assert!(matches!(
            required_pairs(3, &[0.9, 0.0], 2, 1e-3),
            Err(Error::Unreachable { .. })
        ));
        assert!(required_pairs(3, &[0.9], 1, 1.0).is_err());

        let s = purification_schedule(0.95, 1e-3, 1e-3, 3).unwrap();
        let mut last = u64::MAX;
        for target in [1e-9, 1e-7, 1e-5, 1e-3, 1e-1] {
            let n0 = required_pairs(7, &s.success, 3, target).unwrap();
            assert!(n0 <= last);
            last = n0;
        }
        let ratio = required_pairs(7, &s.success, 3, 1e-5).unwrap() as f64 / 7.0;
        assert!((ratio - 15.0).abs() <= 3.0, "{ratio}");
    }

    #[test]
    fn link_rates() {
        let link = LinkParams::for_block(7);
        let per_qubit = generation_rate(&link).unwrap() / link.n_eng;
        assert!((per_qubit - 1.09e3).abs() < 5.0, "{per_qubit}");
        let lossless = LinkParams {
            eta: 1.0,
            l0_km: 1e-6,
            ..link
        };
        let r = generation_rate(&lossless).unwrap();
        let limit = lossless.v_km_s / lossless.l0_km * lossless.n_eng;
        assert!((r / limit - 1.0).abs() < 1e-6);
        let doubled = LinkParams {
            n_eng: 2.0 * link.n_eng,
            ..link
        };
        assert!(
            (generation_rate(&doubled).unwrap() / generation_rate(&link).unwrap() - 2.0).abs()
                < 1e-12
        );
        assert!(generation_rate(&LinkParams { eta: 0.0, ..link }).is_err());
    }

    #[test]
    fn cycle_time_examples() {
        let link = LinkParams::for_block(7);
        assert!((link.time_per_kappa() - 0.9e-3).abs() < 0.05 * 0.9e-3);
        let eight = cycle_time(&link, (4.0 * link.n_eng) as u64).unwrap();
        assert!((eight.kappa - 8.0).abs() < 1e-12);
        assert!((eight.tau_c - 7.3e-3).abs() < 0.1e-3, "{}", eight.tau_c);
        let unit = cycle_time(&link, (link.n_eng / 2.0) as u64).unwrap();
        assert!((unit.kappa - 1.0).abs() < 1e-12);
        assert!((unit.tau_c / link.time_per_kappa() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn key_rate_examples() {
        let r = key_rate(7e-3).unwrap();
        assert!((r.raw - 142.857).abs() < 0.01);
        assert!((r.sifted - 71.43).abs() < 0.01);
        assert_eq!(key_rate(1.0).unwrap().raw, 1.0);
        assert!(key_rate(0.0).is_err());
    }

    proptest! {
        #[test]
        fn noiseless_purification_improves(f in 0.51..0.999f64) {
            let w = BellDiagState::depolarized(f).unwrap();
            let out = purify_step(&w, 0.0, 0.0).unwrap();
            prop_assert!(out.state.fidelity() > f);
        }

        #[test]
        fn purify_output_is_valid(
            a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64, d in 0.0..1.0f64,
            beta in 0.0..0.1f64, delta in 0.0..0.1f64,
        ) {
            let s = a + b + c + d;
            prop_assume!(s > 1e-3);
            let st = BellDiagState::new(a / s, b / s, c / s, d / s).unwrap();
            let out = purify_step(&st, beta, delta).unwrap();
            out.state.validate().unwrap();
            prop_assert!(out.success_prob > 0.0 && out.success_prob <= 1.0 + 1e-12);
        }

        #[test]
        fn distribution_normalized_and_mean_halves(n0 in 0u64..300, r1 in 0.0..1.0f64, r2 in 0.0..1.0f64) {
            let rates = [r1, r2];
            let mut prev_mean = n0 as f64;
            let mut prev = number_distribution(n0, &rates, 0).unwrap();
            prop_assert_eq!(prev.prob(n0), 1.0);
            for level in 1..=2 {
                let d = number_distribution(n0, &rates, level).unwrap();
                prop_assert!((d.total() + d.truncated_mass - 1.0).abs() < 1e-9);
                let half_mean: f64 = prev.probs.iter().map(|(&m, &p)| (m / 2) as f64 * p).sum();
                prop_assert!((d.mean() - rates[level - 1] * half_mean).abs() < 1e-9 * prev_mean.max(1.0));
                prev_mean = d.mean();
                prev = d;
            }
        }

        #[test]
        fn failure_monotone(n0 in 8u64..200, n in 1u64..12, r in 0.3..1.0f64) {
            let rates = [r, r];
            let p = failure_probability(n0, n, &rates, 2).unwrap();
            prop_assert!(failure_probability(n0 + 1, n, &rates, 2).unwrap() <= p + 1e-12);
            prop_assert!(failure_probability(n0, n + 1, &rates, 2).unwrap() >= p - 1e-12);
        }
    }
}
