//! Exact execution of measure-and-correct protocols.
//!
//! Nothing here consults the closed-form fidelities: every number comes from
//! building the joint state, projecting it onto the Bell basis, applying the
//! correction for each outcome, tracing down to the output qubits and
//! taking the overlap with the ideal output. Outcome sums are exact; the
//! Monte Carlo entry points sample outcomes (and Haar inputs) instead.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;

use crate::classical::{optimal_guess_angle, ClassicalStrategy};
use crate::ensemble::{Channel, TwoStateEnsemble};
use crate::error::{Error, Result};
use crate::mc::{self, McEstimate};
use crate::qcore::{
    bell_measure, c, fidelity, gates, BellState, DensityMatrix, LocalOperator, Mat2, PureState,
    PROB_CUTOFF,
};

/// Minimum Monte Carlo sample count.
pub const MIN_SAMPLES: usize = 100;

/// Seed for the Monte Carlo entry points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

/// The correction applied for each Bell outcome on every receiving qubit:
/// `I` for φ⁺, `Z` for φ⁻, `X` for ψ⁺, and for ψ⁻ first `X` then `Z`.
pub fn standard_correction(bell: BellState) -> Mat2 {
    match bell {
        BellState::PhiPlus => gates::identity(),
        BellState::PhiMinus => gates::z(),
        BellState::PsiPlus => gates::x(),
        BellState::PsiMinus => gates::z() * gates::x(),
    }
}

/// A one-shot teleportation-style protocol. The input qubit is prepended
/// as qubit 0 of the register `input ⊗ resource`; `measured_pair` indexes
/// that register. Corrections and `targets` index the qubits left after
/// the measurement, in their original order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    resource: PureState,
    measured_pair: (usize, usize),
    corrections: BTreeMap<BellState, LocalOperator>,
    targets: Vec<usize>,
}

impl ProtocolSpec {
    pub fn new(
        resource: PureState,
        measured_pair: (usize, usize),
        corrections: BTreeMap<BellState, LocalOperator>,
        targets: Vec<usize>,
    ) -> Result<Self> {
        let total = resource.n_qubits() + 1;
        if total < 3 {
            return Err(Error::TooFewQubits { n_qubits: total });
        }
        let (i, j) = measured_pair;
        for q in [i, j] {
            if q >= total {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: total,
                });
            }
        }
        if i == j {
            return Err(Error::CoincidentQubits);
        }
        let remaining = total - 2;
        for bell in BellState::ALL {
            let op = corrections
                .get(&bell)
                .ok_or(Error::MissingCorrection(bell.index()))?;
            if op.n_qubits() != remaining {
                return Err(Error::DimensionMismatch {
                    expected: remaining,
                    found: op.n_qubits(),
                });
            }
        }
        let mut sorted = targets.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() || sorted.len() != targets.len() {
            return Err(Error::InvalidKeep);
        }
        if let Some(&q) = sorted.iter().find(|&&q| q >= remaining) {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: remaining,
            });
        }
        Ok(Self {
            resource,
            measured_pair,
            corrections,
            targets: sorted,
        })
    }

    /// Measure (input, first resource qubit); apply [`standard_correction`]
    /// on every remaining qubit.
    pub fn pauli_broadcast(resource: PureState, targets: Vec<usize>) -> Result<Self> {
        let remaining = resource.n_qubits().saturating_sub(1);
        let corrections = BellState::ALL
            .iter()
            .map(|&b| {
                Ok((
                    b,
                    LocalOperator::uniform(remaining, standard_correction(b))?,
                ))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Self::new(resource, (0, 1), corrections, targets)
    }

    /// Textbook teleportation through an arbitrary two-qubit resource.
    pub fn teleportation_through(resource: PureState) -> Result<Self> {
        if resource.n_qubits() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: resource.n_qubits(),
            });
        }
        Self::pauli_broadcast(resource, vec![0])
    }

    /// Textbook teleportation through `α|00⟩ + β|11⟩`.
    pub fn standard_teleportation(channel: &Channel) -> Self {
        Self::teleportation_through(channel.state()).expect("two-qubit channel")
    }

    pub fn resource(&self) -> &PureState {
        &self.resource
    }

    pub fn measured_pair(&self) -> (usize, usize) {
        self.measured_pair
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn correction(&self, bell: BellState) -> &LocalOperator {
        &self.corrections[&bell]
    }
}

/// One Bell branch after correction.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeRecord {
    pub bell: BellState,
    pub probability: f64,
    /// Corrected state of all unmeasured qubits.
    pub corrected: Option<PureState>,
    /// Fidelity of the output qubits with `|input⟩^{⊗k}`.
    pub fidelity: f64,
}

fn output_state(corrected: &PureState, targets: &[usize]) -> Result<DensityMatrix> {
    if targets.len() == corrected.n_qubits() {
        Ok(corrected.projector())
    } else {
        corrected.reduced(targets)
    }
}

fn check_input(input: &PureState) -> Result<()> {
    if input.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: input.n_qubits(),
        });
    }
    Ok(())
}

/// Every branch of the protocol for one input.
pub fn enumerate_outcomes(input: &PureState, spec: &ProtocolSpec) -> Result<Vec<OutcomeRecord>> {
    check_input(input)?;
    let joint = input.tensor(&spec.resource);
    let target = input.power(spec.targets.len());
    bell_measure(&joint, spec.measured_pair)?
        .into_iter()
        .map(|o| {
            let (corrected, fid) = match &o.post_state {
                Some(post) => {
                    let corrected = spec.correction(o.bell).apply(post)?;
                    let out = output_state(&corrected, &spec.targets)?;
                    let fid = fidelity(&target, &out)?;
                    (Some(corrected), fid)
                }
                None => (None, 0.0),
            };
            Ok(OutcomeRecord {
                bell: o.bell,
                probability: o.probability,
                corrected,
                fidelity: fid,
            })
        })
        .collect()
}

/// `Σᵢ pᵢ Fᵢ` over the four Bell outcomes.
pub fn enumerate_protocol_fidelity(input: &PureState, spec: &ProtocolSpec) -> Result<f64> {
    Ok(enumerate_outcomes(input, spec)?
        .iter()
        .map(|o| o.probability * o.fidelity)
        .sum())
}

/// Equal-prior average of [`enumerate_protocol_fidelity`] over the pair.
pub fn two_state_protocol_fidelity(ens: &TwoStateEnsemble, spec: &ProtocolSpec) -> Result<f64> {
    let (a, b) = ens.states();
    Ok(0.5 * (enumerate_protocol_fidelity(&a, spec)? + enumerate_protocol_fidelity(&b, spec)?))
}

/// Samples Bell outcomes for a fixed input and averages their fidelities.
pub fn mc_protocol_fidelity(
    input: &PureState,
    spec: &ProtocolSpec,
    samples: usize,
    seed: RngSeed,
) -> Result<McEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            samples,
            min: MIN_SAMPLES,
        });
    }
    let outcomes = enumerate_outcomes(input, spec)?;
    let probs: Vec<f64> = outcomes.iter().map(|o| o.probability).collect();
    let fids: Vec<f64> = outcomes.iter().map(|o| o.fidelity).collect();
    Ok(mc::estimate(samples, seed.0, |rng| {
        fids[mc::sample_index(rng, &probs)]
    }))
}

/// Haar-random inputs, sampled Bell outcomes: estimates the average
/// fidelity of the protocol over all pure qubit states.
pub fn mc_haar_protocol_fidelity(
    spec: &ProtocolSpec,
    samples: usize,
    seed: RngSeed,
) -> Result<McEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            samples,
            min: MIN_SAMPLES,
        });
    }
    Ok(mc::estimate(samples, seed.0, |rng| {
        let input = mc::haar_qubit(rng);
        let joint = input.tensor(&spec.resource);
        let branches = bell_measure(&joint, spec.measured_pair).expect("validated spec");
        let probs: Vec<f64> = branches.iter().map(|b| b.probability).collect();
        let pick = &branches[mc::sample_index(rng, &probs)];
        let post = pick
            .post_state
            .as_ref()
            .expect("sampled outcome has weight");
        let corrected = spec
            .correction(pick.bell)
            .apply(post)
            .expect("validated spec");
        let out = output_state(&corrected, &spec.targets).expect("validated spec");
        fidelity(&input.power(spec.targets.len()), &out).expect("matching dimension")
    }))
}

/// Exact measure-and-prepare evaluation through density matrices:
/// `½ Σⱼ Σᵢ Tr(Aᵢ ρⱼ) ⟨ψⱼ|αᵢ⟩⟨αᵢ|ψⱼ⟩`.
pub fn enumerate_classical_strategy(strategy: &ClassicalStrategy, ens: &TwoStateEnsemble) -> f64 {
    let (a, b) = ens.states();
    let score = |psi: &PureState| -> f64 {
        let rho = psi.projector();
        strategy
            .povm()
            .iter()
            .zip(strategy.guesses())
            .map(|(elem, guess)| {
                let elem = DMatrix::from_fn(2, 2, |i, j| elem[(i, j)]);
                let p = (elem * rho.matrix()).trace().re;
                p * fidelity(psi, &guess.projector()).expect("qubit states")
            })
            .sum()
    };
    0.5 * (score(&a) + score(&b))
}

/// Branches of local filtering `diag(1, k)` on Alice's half of the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub success_probability: f64,
    /// Renormalized two-qubit state after a successful filter, if success
    /// is possible.
    pub success_state: Option<PureState>,
    /// Product state left behind on failure, if failure is possible.
    pub failure_state: Option<PureState>,
}

/// Filters `α|00⟩ + β|11⟩` toward `α′|00⟩ + β′|11⟩` with the Kraus pair
/// `diag(1, k)`, `diag(0, √(1 − k²))`, `k = αβ′ / (βα′)`.
pub fn procrustean_filter(channel: &Channel, alpha_prime: f64) -> Result<FilterOutcome> {
    let (alpha, beta) = (channel.alpha(), channel.beta());
    if !alpha_prime.is_finite()
        || alpha_prime < alpha - 1e-12
        || alpha_prime > FRAC_1_SQRT_2 + 1e-12
    {
        return Err(Error::AlphaPrimeOutOfRange { alpha, alpha_prime });
    }
    let alpha_prime = alpha_prime.clamp(alpha, FRAC_1_SQRT_2);
    let beta_prime = (1.0 - alpha_prime * alpha_prime).sqrt();
    let k = if alpha_prime == 0.0 {
        1.0
    } else {
        (alpha * beta_prime / (beta * alpha_prime)).min(1.0)
    };

    let amps = channel.state().amplitudes().to_vec();
    // Alice holds qubit 0: |1⟩ on her side means indices 2 and 3.
    let filtered = vec![amps[0], amps[1], amps[2] * k, amps[3] * k];
    let success_probability: f64 = filtered.iter().map(|a| a.norm_sqr()).sum();
    let success_state = if success_probability > PROB_CUTOFF {
        Some(PureState::normalized(filtered)?)
    } else {
        None
    };
    let fail_amp = (1.0 - k * k).sqrt();
    let failed = vec![c(0.0), c(0.0), amps[2] * fail_amp, amps[3] * fail_amp];
    let failure_state = if 1.0 - success_probability > PROB_CUTOFF {
        Some(PureState::normalized(failed)?)
    } else {
        None
    };
    Ok(FilterOutcome {
        success_probability,
        success_state,
        failure_state,
    })
}

fn classical_fallback(ens: &TwoStateEnsemble) -> f64 {
    let strategy = match optimal_guess_angle(ens) {
        Ok(g) => ClassicalStrategy::tilted_guess(g),
        // Coinciding signals: name either one.
        Err(_) => ClassicalStrategy::min_error(ens),
    };
    enumerate_classical_strategy(&strategy, ens)
}

/// Partial filtering to `α′`, teleportation on success, the best classical
/// strategy on failure; exact expectation over both branches.
pub fn simulate_combined(
    ens: &TwoStateEnsemble,
    channel: &Channel,
    alpha_prime: f64,
) -> Result<f64> {
    let filter = procrustean_filter(channel, alpha_prime)?;
    let teleported = match &filter.success_state {
        Some(state) => {
            two_state_protocol_fidelity(ens, &ProtocolSpec::teleportation_through(state.clone())?)?
        }
        None => 0.0,
    };
    let p = filter.success_probability;
    let fallback = if filter.failure_state.is_some() {
        classical_fallback(ens)
    } else {
        0.0
    };
    Ok(p * teleported + (1.0 - p) * fallback)
}

/// Full purification branch structure: filtering to a maximally entangled
/// pair succeeds with probability `2α²`.
pub fn simulate_purification_branch(ens: &TwoStateEnsemble, channel: &Channel) -> Result<f64> {
    simulate_combined(ens, channel, FRAC_1_SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::C64;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn ch(a2: f64) -> Channel {
        Channel::from_alpha_sq(a2).unwrap()
    }

    fn ens(t: f64) -> TwoStateEnsemble {
        TwoStateEnsemble::new(t).unwrap()
    }

    // Closed form kept local to the tests so the oracle code stays free of it.
    fn dirtwo(theta: f64, c: &Channel) -> f64 {
        let (s, co) = (theta / 2.0).sin_cos();
        co.powi(4) + s.powi(4) + c.alpha() * c.beta() * theta.sin().powi(2)
    }

    #[test]
    fn maximal_channel_teleports_exactly() {
        let spec = ProtocolSpec::standard_teleportation(&Channel::maximal());
        for (t, p) in [(0.0, 0.0), (0.7, 1.3), (PI / 2.0, -0.4), (2.9, 5.0)] {
            let f = enumerate_protocol_fidelity(&PureState::qubit(t, p), &spec).unwrap();
            assert!((f - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn corrected_states_equal_input_for_maximal_channel() {
        let spec = ProtocolSpec::standard_teleportation(&Channel::maximal());
        let input = PureState::qubit(1.1, 2.2);
        for o in enumerate_outcomes(&input, &spec).unwrap() {
            let out = o.corrected.unwrap();
            assert!(out.max_abs_diff(&input).unwrap() < 1e-14, "{}", o.bell);
            assert!((o.probability - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn enumeration_matches_dirtwo() {
        let spec = ProtocolSpec::standard_teleportation(&ch(0.3));
        let f = enumerate_protocol_fidelity(&PureState::qubit(PI / 4.0, 0.0), &spec).unwrap();
        assert!((f - dirtwo(PI / 4.0, &ch(0.3))).abs() < 1e-12);
        assert!((f - 0.979129).abs() < 1e-6);
        for a2 in [0.0, 0.2, 0.5] {
            let spec = ProtocolSpec::standard_teleportation(&ch(a2));
            assert!(
                (enumerate_protocol_fidelity(&PureState::zero(), &spec).unwrap() - 1.0).abs()
                    < 1e-14
            );
        }
    }

    #[test]
    fn enumeration_is_phase_independent() {
        let spec = ProtocolSpec::standard_teleportation(&ch(0.15));
        let base = enumerate_protocol_fidelity(&PureState::qubit(1.0, 0.0), &spec).unwrap();
        for phi in [0.3, 1.7, 4.0] {
            let f = enumerate_protocol_fidelity(&PureState::qubit(1.0, phi), &spec).unwrap();
            assert!((f - base).abs() < 1e-13);
        }
    }

    #[test]
    fn probabilities_are_a_distribution() {
        for (t, a2) in [(0.3, 0.1), (1.2, 0.4), (PI / 4.0, 0.0)] {
            let spec = ProtocolSpec::standard_teleportation(&ch(a2));
            let outs = enumerate_outcomes(&PureState::qubit(t, 0.5), &spec).unwrap();
            assert!(outs.iter().all(|o| o.probability >= 0.0));
            let total: f64 = outs.iter().map(|o| o.probability).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spec_validation() {
        let full = ProtocolSpec::standard_teleportation(&ch(0.2));
        let mut partial = full.corrections.clone();
        partial.remove(&BellState::PsiPlus);
        let err = ProtocolSpec::new(ch(0.2).state(), (0, 1), partial, vec![0]);
        assert_eq!(err, Err(Error::MissingCorrection(3)));
        let err = ProtocolSpec::new(ch(0.2).state(), (1, 1), full.corrections.clone(), vec![0]);
        assert_eq!(err, Err(Error::CoincidentQubits));
        let err = ProtocolSpec::new(ch(0.2).state(), (0, 1), full.corrections.clone(), vec![1]);
        assert!(matches!(err, Err(Error::QubitOutOfRange { .. })));
        let err = ProtocolSpec::new(ch(0.2).state(), (0, 1), full.corrections.clone(), vec![]);
        assert_eq!(err, Err(Error::InvalidKeep));
        assert!(ProtocolSpec::teleportation_through(PureState::zero()).is_err());
        assert!(enumerate_protocol_fidelity(&ch(0.2).state(), &full).is_err());
    }

    #[test]
    fn mc_examples() {
        let input = PureState::qubit(PI / 4.0, 0.0);
        let spec = ProtocolSpec::standard_teleportation(&Channel::maximal());
        let est = mc_protocol_fidelity(&input, &spec, 10_000, RngSeed(1)).unwrap();
        assert!((est.mean - 1.0).abs() < 1e-12 && est.stderr < 1e-12);

        let spec = ProtocolSpec::standard_teleportation(&ch(0.3));
        let exact = enumerate_protocol_fidelity(&input, &spec).unwrap();
        let est = mc_protocol_fidelity(&input, &spec, 1_000_000, RngSeed(42)).unwrap();
        assert!(
            (est.mean - exact).abs() <= 4.0 * est.stderr,
            "{est:?} vs {exact}"
        );
        assert_eq!(
            est,
            mc_protocol_fidelity(&input, &spec, 1_000_000, RngSeed(42)).unwrap()
        );
        assert!(mc_protocol_fidelity(&input, &spec, 99, RngSeed(1)).is_err());
    }

    #[test]
    fn haar_average_matches_two_thirds_formula() {
        let c = ch(0.3);
        let est = mc_haar_protocol_fidelity(
            &ProtocolSpec::standard_teleportation(&c),
            200_000,
            RngSeed(9),
        )
        .unwrap();
        let target = 2.0 / 3.0 * (1.0 + c.alpha() * c.beta());
        assert!(est.z_score(target) < 4.0, "{est:?} vs {target}");
    }

    #[test]
    fn classical_enumeration_examples() {
        let e = ens(PI / 4.0);
        let f = enumerate_classical_strategy(&ClassicalStrategy::min_error(&e), &e);
        assert!((f - 0.92678).abs() < 1e-5);
        let f = enumerate_classical_strategy(&ClassicalStrategy::unambiguous(&e), &e);
        let s = (PI / 4.0).sin();
        assert!((f - (1.0 - 0.5 * s + 0.5 * s.powi(3))).abs() < 1e-12);
        let e0 = ens(0.0);
        assert!(
            (enumerate_classical_strategy(&ClassicalStrategy::min_error(&e0), &e0) - 1.0).abs()
                < 1e-15
        );
    }

    #[test]
    fn classical_enumeration_agrees_with_evaluator() {
        for k in 0..=30 {
            let e = ens(FRAC_PI_2 * k as f64 / 30.0);
            for strat in [
                ClassicalStrategy::min_error(&e),
                ClassicalStrategy::unambiguous(&e),
                ClassicalStrategy::tilted_guess(0.4 + k as f64 * 0.02),
            ] {
                let a = enumerate_classical_strategy(&strat, &e);
                let b = crate::classical::classical_fidelity(&strat, &e);
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn filter_reaches_target_with_expected_probability() {
        let c = ch(0.2);
        for ap2 in [0.2f64, 0.3, 0.45, 0.5] {
            let f = procrustean_filter(&c, ap2.sqrt()).unwrap();
            assert!((f.success_probability - 0.2 / ap2).abs() < 1e-14);
            let want = ch(ap2).state();
            assert!(f.success_state.unwrap().max_abs_diff(&want).unwrap() < 1e-14);
        }
        let full = procrustean_filter(&c, FRAC_1_SQRT_2).unwrap();
        assert!((full.success_probability - 0.4).abs() < 1e-14);
        let failed = full.failure_state.unwrap();
        assert!(
            failed
                .max_abs_diff(&PureState::basis(2, 3).unwrap())
                .unwrap()
                < 1e-14
        );
        assert!(procrustean_filter(&c, 0.1).is_err());
        let none = procrustean_filter(&c, c.alpha()).unwrap();
        assert!(none.failure_state.is_none());
    }

    #[test]
    fn purification_branch_examples() {
        for t in [0.0, 0.6, PI / 4.0] {
            assert!(
                (simulate_purification_branch(&ens(t), &Channel::maximal()).unwrap() - 1.0).abs()
                    < 1e-14
            );
        }
        let e = ens(PI / 4.0);
        let classical = 0.5 * (1.0 + 0.75f64.sqrt());
        assert!(
            (simulate_purification_branch(&e, &Channel::product()).unwrap() - classical).abs()
                < 1e-12
        );
        let v = simulate_purification_branch(&e, &ch(0.3)).unwrap();
        assert!((v - (0.6 + 0.4 * classical)).abs() < 1e-12);
        assert!((v - 0.973205).abs() < 1e-6);
    }

    #[test]
    fn combined_simulation_matches_formula_structure() {
        let (e, c) = (ens(PI / 4.0), ch(0.2));
        let classical = 0.5 * (1.0 + 0.75f64.sqrt());
        for ap2 in [0.2f64, 0.27, 0.35, 0.5] {
            let w = 0.2 / ap2;
            let expected = w * dirtwo(PI / 4.0, &ch(ap2)) + (1.0 - w) * classical;
            let sim = simulate_combined(&e, &c, ap2.sqrt()).unwrap();
            assert!((sim - expected).abs() < 1e-12, "α′²={ap2}");
        }
    }

    #[test]
    fn standard_corrections_are_the_listed_paulis() {
        let eq = |a: Mat2, b: Mat2| (a - b).iter().all(|z| z.norm() < 1e-15);
        assert!(eq(
            standard_correction(BellState::PhiPlus),
            Mat2::identity()
        ));
        assert!(eq(standard_correction(BellState::PhiMinus), gates::z()));
        assert!(eq(standard_correction(BellState::PsiPlus), gates::x()));
        // ZX = iY
        assert!(eq(
            standard_correction(BellState::PsiMinus),
            gates::y() * C64::new(0.0, 1.0)
        ));
    }
}
