//! Strategies for sending a qubit through one copy of `α|00⟩ + β|11⟩`.
//!
//! * direct: the standard teleportation circuit with Pauli corrections
//!   `I, Z, X, ZX` keyed to the Bell outcomes `φ⁺, φ⁻, ψ⁺, ψ⁻`;
//! * purification: Procrustean filtering to a maximally entangled pair
//!   (success `2α²`), falling back to the best classical strategy;
//! * combined: partial filtering to `α′ ∈ [α, 1/√2]` (success `(α/α′)²`),
//!   then direct teleportation, with the classical fallback on failure.
//!
//! Only the standard corrections are used for the direct branch; whether
//! biased corrections could do better for two known states is left open.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::classical::fidelity_optimized;
use crate::ensemble::{Channel, TwoStateEnsemble};
use crate::error::{Error, Result};
use crate::optim::bracketed_max;

/// Grid cells scanned before golden-section refinement of `α′`.
const ALPHA_PRIME_GRID: usize = 256;
/// Final bracket width for `α′`.
const ALPHA_PRIME_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    Purification,
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStrategyReport {
    pub fidelity: f64,
    pub method: Method,
    /// Purification target of the combined scheme.
    pub alpha_prime: Option<f64>,
}

/// `cos⁴(θ/2) + sin⁴(θ/2) + αβ sin²θ` for the input
/// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`; independent of `φ`.
pub fn direct_fidelity_state(theta: f64, channel: &Channel) -> f64 {
    let (s, c) = (theta / 2.0).sin_cos();
    c.powi(4) + s.powi(4) + channel.alpha() * channel.beta() * theta.sin().powi(2)
}

/// Haar average of [`direct_fidelity_state`]: `⅔(1 + αβ)`.
pub fn average_fidelity_direct(channel: &Channel) -> f64 {
    2.0 / 3.0 * (1.0 + channel.alpha() * channel.beta())
}

/// Overlap of the channel with `φ⁺`: `½(1 + 2αβ)`.
pub fn singlet_fraction(channel: &Channel) -> f64 {
    0.5 * (1.0 + 2.0 * channel.alpha() * channel.beta())
}

/// Optimal average teleportation fidelity `(2f + 1)/3` from the singlet
/// fraction `f`.
pub fn horodecki_optimal_fidelity(channel: &Channel) -> f64 {
    (2.0 * singlet_fraction(channel) + 1.0) / 3.0
}

/// Direct teleportation of the two-state ensemble. Both signals share the
/// value of [`direct_fidelity_state`] at the ensemble angle, so this is the
/// same expression.
pub fn two_state_direct_fidelity(ens: &TwoStateEnsemble, channel: &Channel) -> f64 {
    direct_fidelity_state(ens.theta(), channel)
}

/// Procrustean filtering succeeds with probability `2α²`.
pub fn purification_success_probability(channel: &Channel) -> f64 {
    2.0 * channel.alpha().powi(2)
}

/// Unknown input: `2α²·1 + (1 − 2α²)·⅔ = ⅔(1 + α²)`.
pub fn purification_fidelity_unknown(channel: &Channel) -> f64 {
    2.0 / 3.0 * (1.0 + channel.alpha().powi(2))
}

/// Two-state input: `2α² + (1 − 2α²) F_cl` with the optimized classical
/// fidelity on failure.
pub fn purification_fidelity_two_state(ens: &TwoStateEnsemble, channel: &Channel) -> f64 {
    let p = purification_success_probability(channel);
    p + (1.0 - p) * fidelity_optimized(ens).fidelity
}

/// Probability `(α/α′)²` that filtering reaches `α′`. When both are zero
/// nothing is filtered and the weight is one.
pub fn partial_purification_probability(channel: &Channel, alpha_prime: f64) -> Result<f64> {
    check_alpha_prime(channel, alpha_prime)?;
    if alpha_prime == 0.0 {
        return Ok(1.0);
    }
    Ok(((channel.alpha() / alpha_prime).powi(2)).min(1.0))
}

fn check_alpha_prime(channel: &Channel, alpha_prime: f64) -> Result<()> {
    let slack = 1e-12;
    if !alpha_prime.is_finite()
        || alpha_prime < channel.alpha() - slack
        || alpha_prime > FRAC_1_SQRT_2 + slack
    {
        return Err(Error::AlphaPrimeOutOfRange {
            alpha: channel.alpha(),
            alpha_prime,
        });
    }
    Ok(())
}

/// `(α/α′)² F_dir(α′) + (1 − (α/α′)²) F_cl`.
pub fn combined_fidelity(
    ens: &TwoStateEnsemble,
    channel: &Channel,
    alpha_prime: f64,
) -> Result<f64> {
    let p = partial_purification_probability(channel, alpha_prime)?;
    let target = Channel::new(alpha_prime.clamp(channel.alpha(), FRAC_1_SQRT_2))?;
    Ok(p * two_state_direct_fidelity(ens, &target) + (1.0 - p) * fidelity_optimized(ens).fidelity)
}

/// Maximizes [`combined_fidelity`] over `α′ ∈ [α, 1/√2]` by a grid scan
/// followed by golden-section refinement. Both endpoints are among the
/// scanned points, so the result never falls below the direct or
/// purification value.
pub fn optimize_combined(ens: &TwoStateEnsemble, channel: &Channel) -> ChannelStrategyReport {
    let lo = channel.alpha();
    let hi = FRAC_1_SQRT_2;
    let f = |ap: f64| combined_fidelity(ens, channel, ap).expect("α′ within bounds");
    let best = bracketed_max(f, lo, hi, ALPHA_PRIME_GRID, ALPHA_PRIME_TOL);

    // At α = 0 the filter never succeeds for α′ > 0, so the fidelity jumps
    // from F_dir(0) to F_cl; the open-interval value is the purification one.
    let purification = purification_fidelity_two_state(ens, channel);
    let (fidelity, alpha_prime) = if purification > best.value {
        (purification, hi)
    } else {
        (best.value, best.x)
    };
    ChannelStrategyReport {
        fidelity,
        method: Method::Combined,
        alpha_prime: Some(alpha_prime),
    }
}

/// Report for the direct method.
pub fn direct_report(ens: &TwoStateEnsemble, channel: &Channel) -> ChannelStrategyReport {
    ChannelStrategyReport {
        fidelity: two_state_direct_fidelity(ens, channel),
        method: Method::Direct,
        alpha_prime: None,
    }
}

/// Report for the full-purification method.
pub fn purification_report(ens: &TwoStateEnsemble, channel: &Channel) -> ChannelStrategyReport {
    ChannelStrategyReport {
        fidelity: purification_fidelity_two_state(ens, channel),
        method: Method::Purification,
        alpha_prime: Some(FRAC_1_SQRT_2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn ch(a2: f64) -> Channel {
        Channel::from_alpha_sq(a2).unwrap()
    }

    fn ens(t: f64) -> TwoStateEnsemble {
        TwoStateEnsemble::new(t).unwrap()
    }

    #[test]
    fn direct_examples() {
        for t in [0.0, 0.4, 1.3, PI] {
            assert!((direct_fidelity_state(t, &Channel::maximal()) - 1.0).abs() < 1e-15);
        }
        assert!((direct_fidelity_state(FRAC_PI_2, &Channel::product()) - 0.5).abs() < 1e-15);
        let v = direct_fidelity_state(PI / 4.0, &ch(0.3));
        assert!((v - (0.75 + 0.21f64.sqrt() * 0.5)).abs() < 1e-14);
        assert!((v - 0.979129).abs() < 1e-6);
    }

    #[test]
    fn average_and_singlet_examples() {
        assert!((average_fidelity_direct(&Channel::maximal()) - 1.0).abs() < 1e-15);
        assert!((average_fidelity_direct(&Channel::product()) - 2.0 / 3.0).abs() < 1e-15);
        assert!((average_fidelity_direct(&ch(0.3)) - 0.972172).abs() < 1e-6);
        assert!((singlet_fraction(&Channel::maximal()) - 1.0).abs() < 1e-15);
        assert!((singlet_fraction(&Channel::product()) - 0.5).abs() < 1e-15);
        assert!((singlet_fraction(&ch(0.3)) - 0.958258).abs() < 1e-6);
        assert!((horodecki_optimal_fidelity(&Channel::maximal()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singlet_fraction_is_overlap_with_phi_plus() {
        for k in 0..=20 {
            let c = ch(0.5 * k as f64 / 20.0);
            let f = crate::qcore::BellState::PhiPlus
                .state()
                .overlap_sqr(&c.state())
                .unwrap();
            assert!((f - singlet_fraction(&c)).abs() < 1e-14);
        }
    }

    #[test]
    fn average_is_the_sphere_integral() {
        // ∫ F(θ) sinθ dθ / 2 by composite Simpson.
        let c = ch(0.17);
        let n = 2000;
        let h = PI / n as f64;
        let integral: f64 = (0..=n)
            .map(|k| {
                let t = k as f64 * h;
                let w = if k == 0 || k == n {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * direct_fidelity_state(t, &c) * t.sin()
            })
            .sum::<f64>()
            * h
            / 3.0
            / 2.0;
        assert!((integral - average_fidelity_direct(&c)).abs() < 1e-10);
    }

    #[test]
    fn horodecki_identity_on_grid() {
        for k in 0..=100 {
            let c = ch(0.5 * k as f64 / 100.0);
            assert!((horodecki_optimal_fidelity(&c) - average_fidelity_direct(&c)).abs() <= 1e-15);
        }
    }

    #[test]
    fn two_state_direct_examples() {
        for t in [0.2, PI / 4.0, 1.4] {
            for a2 in [0.0, 0.1, 0.3, 0.49] {
                assert!(two_state_direct_fidelity(&ens(t), &ch(a2)) < 1.0);
            }
        }
        for a2 in [0.0, 0.2, 0.5] {
            assert!((two_state_direct_fidelity(&ens(0.0), &ch(a2)) - 1.0).abs() < 1e-15);
        }
        assert!((two_state_direct_fidelity(&ens(PI / 4.0), &ch(0.3)) - 0.979129).abs() < 1e-6);
    }

    #[test]
    fn purification_examples() {
        assert!((purification_fidelity_unknown(&Channel::maximal()) - 1.0).abs() < 1e-15);
        assert!((purification_fidelity_unknown(&Channel::product()) - 2.0 / 3.0).abs() < 1e-15);
        assert!((purification_fidelity_unknown(&ch(0.3)) - 0.866667).abs() < 1e-6);
        for t in [0.0, 0.5, PI / 4.0, FRAC_PI_2] {
            assert!(
                (purification_fidelity_two_state(&ens(t), &Channel::maximal()) - 1.0).abs() < 1e-15
            );
        }
        let e = ens(PI / 4.0);
        assert!((purification_fidelity_two_state(&e, &Channel::product()) - 0.933013).abs() < 1e-6);
        assert!((purification_fidelity_two_state(&e, &ch(0.3)) - 0.973205).abs() < 1e-6);
    }

    #[test]
    fn combined_endpoint_reductions() {
        for t in [0.1, PI / 4.0, 1.2] {
            for a2 in [0.0, 0.05, 0.2, 0.45] {
                let (e, c) = (ens(t), ch(a2));
                let at_alpha = combined_fidelity(&e, &c, c.alpha()).unwrap();
                assert_eq!(at_alpha, two_state_direct_fidelity(&e, &c));
                let at_max = combined_fidelity(&e, &c, FRAC_1_SQRT_2).unwrap();
                assert!((at_max - purification_fidelity_two_state(&e, &c)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn combined_interior_value() {
        let (e, c) = (ens(PI / 4.0), ch(0.2));
        let ap = 0.35f64.sqrt();
        let w = 0.2 / 0.35;
        let expected =
            w * (0.75 + (0.35f64 * 0.65).sqrt() * 0.5) + (1.0 - w) * 0.5 * (1.0 + 0.75f64.sqrt());
        assert!((combined_fidelity(&e, &c, ap).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn combined_rejects_out_of_range_targets() {
        let (e, c) = (ens(0.5), ch(0.2));
        assert!(matches!(
            combined_fidelity(&e, &c, 0.1),
            Err(Error::AlphaPrimeOutOfRange { .. })
        ));
        assert!(matches!(
            combined_fidelity(&e, &c, 0.8),
            Err(Error::AlphaPrimeOutOfRange { .. })
        ));
        assert!(combined_fidelity(&e, &c, f64::NAN).is_err());
    }

    #[test]
    fn optimize_examples() {
        let r = optimize_combined(&ens(PI / 4.0), &Channel::maximal());
        assert!((r.fidelity - 1.0).abs() < 1e-15);
        assert!((r.alpha_prime.unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
        let r = optimize_combined(&ens(0.0), &ch(0.2));
        assert!((r.fidelity - 1.0).abs() < 1e-15);
    }

    #[test]
    fn optimize_agrees_with_dense_grid() {
        let (e, c) = (ens(PI / 4.0), ch(0.2));
        let r = optimize_combined(&e, &c);
        let n = 100_000;
        let (lo, hi) = (c.alpha(), FRAC_1_SQRT_2);
        let (gx, gv) = (0..=n)
            .map(|k| {
                let ap = lo + (hi - lo) * k as f64 / n as f64;
                (ap, combined_fidelity(&e, &c, ap).unwrap())
            })
            .fold(
                (0.0, f64::NEG_INFINITY),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            );
        assert!(
            (r.alpha_prime.unwrap() - gx).abs() < 1e-5,
            "{:?} vs {gx}",
            r.alpha_prime
        );
        assert!(r.fidelity >= gv - 1e-12);
        assert!((r.fidelity - gv).abs() < 1e-6);
    }

    #[test]
    fn optimized_dominates_both_methods() {
        for i in 0..25 {
            for j in 0..25 {
                let e = ens(FRAC_PI_2 * i as f64 / 24.0);
                let c = ch(0.5 * j as f64 / 24.0);
                let r = optimize_combined(&e, &c);
                assert!(r.fidelity >= two_state_direct_fidelity(&e, &c) - 1e-12);
                assert!(r.fidelity >= purification_fidelity_two_state(&e, &c) - 1e-12);
                assert!(r.fidelity <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn direct_falls_below_classical_at_low_entanglement() {
        let e = ens(PI / 4.0);
        let classical = fidelity_optimized(&e).fidelity;
        assert!(two_state_direct_fidelity(&e, &ch(0.01)) < classical);
        assert!(two_state_direct_fidelity(&e, &ch(0.45)) > classical);
    }

    #[test]
    fn unknown_state_monotonicity_and_dominance() {
        let mut prev = (0.0, 0.0);
        for k in 0..=200 {
            let c = ch(0.5 * k as f64 / 200.0);
            let (d, p) = (
                average_fidelity_direct(&c),
                purification_fidelity_unknown(&c),
            );
            assert!(d >= prev.0 && p >= prev.1);
            assert!(d >= p);
            prev = (d, p);
        }
    }
}
