//! Physical error parameters and the effective per-qubit output error rates.
//!
//! Every operation in the protocol (CNOTs, teleported CNOTs, X/Z measurements)
//! keeps bit-flip and phase errors separate, so each physical qubit carries a
//! pair `(b, p)` of flip probabilities that add linearly through the
//! preparation, purification, teleported-CNOT and connection stages.

use crate::error::{check_prob, domain, Result};

/// Gate, measurement and memory error parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorParams {
    /// Two-qubit gate depolarizing probability.
    pub beta: f64,
    /// Measurement flip probability.
    pub delta: f64,
    /// Memory error probability over one cycle.
    pub mu: f64,
    /// Memory decoherence rate in 1/s.
    pub gamma: f64,
    /// Fidelity of unpurified pairs.
    pub f0: f64,
}

impl Default for ErrorParams {
    fn default() -> Self {
        Self {
            beta: 1e-3,
            delta: 1e-3,
            mu: 0.0,
            gamma: 0.1,
            f0: 0.95,
        }
    }
}

impl ErrorParams {
    pub fn validate(&self) -> Result<()> {
        check_prob("beta", self.beta)?;
        check_prob("delta", self.delta)?;
        check_prob("mu", self.mu)?;
        if !(self.gamma >= 0.0) {
            return Err(domain(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if !(0.25..=1.0).contains(&self.f0) {
            return Err(domain(format!("f0 must lie in [0.25, 1], got {}", self.f0)));
        }
        Ok(())
    }

    /// Same parameters with `mu` derived from `gamma` over a cycle of `tau_c` seconds.
    pub fn with_cycle_time(mut self, tau_c: f64) -> Result<Self> {
        self.mu = memory_error_prob(self.gamma, tau_c)?;
        Ok(self)
    }
}

/// Memory error probability `1 - exp(-gamma * tau_c)`.
pub fn memory_error_prob(gamma: f64, tau_c: f64) -> Result<f64> {
    if !(gamma >= 0.0) || !(tau_c >= 0.0) {
        return Err(domain(format!(
            "gamma and tau_c must be >= 0, got gamma={gamma}, tau_c={tau_c}"
        )));
    }
    if tau_c == 0.0 || gamma == 0.0 {
        return Ok(0.0);
    }
    Ok(-(-gamma * tau_c).exp_m1())
}

/// Bit-flip and phase probabilities for one physical qubit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FlipPair {
    pub bit: f64,
    pub phase: f64,
}

/// Intermediate stages of the effective-error pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStages {
    /// Encoded-block qubits after state distillation.
    pub distilled: FlipPair,
    /// Qubits of a purified physical Bell pair.
    pub purified: FlipPair,
    /// Control qubit after the teleported CNOT.
    pub control: FlipPair,
    /// Target qubit after the teleported CNOT.
    pub target: FlipPair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveError {
    /// Wrong-output probability for Z-basis measurements.
    pub q_b: f64,
    /// Wrong-output probability for X-basis measurements.
    pub q_p: f64,
    /// `max(q_b, q_p)`.
    pub q: f64,
    /// Set when a linearized total exceeded 1 and was clamped.
    pub saturated: bool,
    pub stages: ErrorStages,
}

pub fn error_stages(p: &ErrorParams) -> ErrorStages {
    let (beta, delta, mu) = (p.beta, p.delta, p.mu);
    let distilled = FlipPair {
        bit: beta / 4.0 + mu / 2.0,
        phase: beta / 2.0 + mu / 2.0,
    };
    let purified = FlipPair {
        bit: beta / 2.0,
        phase: beta / 4.0,
    };
    let control = FlipPair {
        bit: distilled.bit + beta / 2.0,
        phase: 2.0 * distilled.phase + 2.0 * purified.phase + beta + delta,
    };
    // The target's phase error picks up the distilled block's phase error,
    // mirroring the control's bit error; only this reading reaches the
    // 4 beta total for X-basis outputs.
    let target = FlipPair {
        bit: 2.0 * distilled.bit + 2.0 * purified.bit + beta + delta,
        phase: distilled.phase + beta / 2.0,
    };
    ErrorStages {
        distilled,
        purified,
        control,
        target,
    }
}

/// Accumulates the pipeline into the per-qubit output error rates at connection.
///
/// Gate and measurement errors are summed through the stages. Memory error
/// is charged once per output qubit: the stages report its `mu / 2` share
/// per distilled qubit, but the three distilled inputs feeding one output
/// sit in memory over the same cycle, so the total carries a single `mu`.
pub fn effective_error_probabilities(p: &ErrorParams) -> Result<EffectiveError> {
    p.validate()?;
    let stages = error_stages(p);
    let gates = error_stages(&ErrorParams { mu: 0.0, ..*p });
    let connect = p.beta / 2.0 + p.delta;
    let raw_b = gates.control.bit + gates.target.bit + connect + p.mu;
    let raw_p = gates.control.phase + gates.target.phase + connect + p.mu;
    let saturated = raw_b > 1.0 || raw_p > 1.0;
    let q_b = raw_b.min(1.0);
    let q_p = raw_p.min(1.0);
    Ok(EffectiveError {
        q_b,
        q_p,
        q: q_b.max(q_p),
        saturated,
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(beta: f64, delta: f64, mu: f64) -> ErrorParams {
        ErrorParams {
            beta,
            delta,
            mu,
            ..ErrorParams::default()
        }
    }

    #[test]
    fn memory_error_examples() {
        assert_eq!(memory_error_prob(0.0, 5.0).unwrap(), 0.0);
        let mu = memory_error_prob(0.1, 7e-3).unwrap();
        assert!((mu - 6.997e-4).abs() < 1e-7, "{mu}");
        assert_eq!(memory_error_prob(f64::INFINITY, 1.0).unwrap(), 1.0);
        assert!(memory_error_prob(-1.0, 1.0).is_err());
        assert!(memory_error_prob(1.0, -1.0).is_err());
        assert!(memory_error_prob(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn effective_error_examples() {
        let e = effective_error_probabilities(&params(1e-3, 1e-3, 0.0)).unwrap();
        assert!((e.q_b - 5.75e-3).abs() < 1e-15);
        assert!((e.q_p - 6.0e-3).abs() < 1e-15);
        assert_eq!(e.q, e.q_p);

        let zero = effective_error_probabilities(&params(0.0, 0.0, 0.0)).unwrap();
        assert_eq!((zero.q_b, zero.q_p, zero.q), (0.0, 0.0, 0.0));

        let op = effective_error_probabilities(&params(5e-4, 5e-4, 0.0)).unwrap();
        assert!((op.q - 3.0e-3).abs() < 1e-15);
    }

    #[test]
    fn stage_values() {
        let s = error_stages(&params(4e-3, 0.0, 2e-3));
        assert!((s.distilled.bit - 2e-3).abs() < 1e-18);
        assert!((s.distilled.phase - 3e-3).abs() < 1e-18);
        assert!((s.purified.bit - 2e-3).abs() < 1e-18);
        assert!((s.purified.phase - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn saturation_is_flagged() {
        let e = effective_error_probabilities(&params(0.3, 0.3, 0.3)).unwrap();
        assert!(e.saturated);
        assert_eq!(e.q, 1.0);
        assert!(
            !effective_error_probabilities(&params(1e-3, 1e-3, 1e-3))
                .unwrap()
                .saturated
        );
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(effective_error_probabilities(&params(-1e-3, 0.0, 0.0)).is_err());
        let bad_f0 = ErrorParams {
            f0: 0.1,
            ..ErrorParams::default()
        };
        assert!(bad_f0.validate().is_err());
        let bad_gamma = ErrorParams {
            gamma: -1.0,
            ..ErrorParams::default()
        };
        assert!(bad_gamma.validate().is_err());
    }

    #[test]
    fn cycle_time_sets_mu() {
        let p = ErrorParams::default().with_cycle_time(7e-3).unwrap();
        assert!((p.mu - 6.997e-4).abs() < 1e-7);
    }

    proptest! {
        #[test]
        fn phase_exceeds_bit_by_quarter_beta(beta in 0.0..0.05f64, delta in 0.0..0.05f64, mu in 0.0..0.05f64) {
            let e = effective_error_probabilities(&params(beta, delta, mu)).unwrap();
            prop_assert!((e.q_p - e.q_b - beta / 4.0).abs() < 1e-15);
            prop_assert!((e.q - (4.0 * beta + 2.0 * delta + mu)).abs() < 1e-15);
        }

        #[test]
        fn monotone_in_each_parameter(
            beta in 0.0..0.05f64, delta in 0.0..0.05f64, mu in 0.0..0.05f64, bump in 0.0..0.01f64,
        ) {
            let base = effective_error_probabilities(&params(beta, delta, mu)).unwrap();
            for bumped in [params(beta + bump, delta, mu), params(beta, delta + bump, mu), params(beta, delta, mu + bump)] {
                let e = effective_error_probabilities(&bumped).unwrap();
                prop_assert!(e.q_b >= base.q_b && e.q_p >= base.q_p);
            }
        }
    }
}
