//! Transmission without entanglement: Alice measures, Bob prepares a guess.
//!
//! The general evaluator [`classical_fidelity`] scores any POVM with one
//! guessed state per outcome. The closed forms below cover the
//! minimum-error measurement with unbiased guesses, unambiguous
//! discrimination, and the minimum-error measurement with guesses tilted
//! toward the other signal state. The tilted-guess fidelity is the best
//! known classical value for this ensemble and agrees with the
//! Fuchs–Peres expression; no optimality proof is implied.

use crate::ensemble::TwoStateEnsemble;
use crate::error::{Error, Result};
use crate::mc::{self, McEstimate};
use crate::qcore::{c, Mat2, PureState, C64};

const POVM_SUM_TOL: f64 = 1e-10;
const POVM_PSD_TOL: f64 = 1e-12;

/// A POVM `{Aᵢ}` together with Bob's guessed state for each outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalStrategy {
    povm: Vec<Mat2>,
    guesses: Vec<PureState>,
}

fn hermitian_2x2_eigenvalues(m: &Mat2) -> (f64, f64) {
    let (a, d) = (m[(0, 0)].re, m[(1, 1)].re);
    let mid = 0.5 * (a + d);
    let r = (0.25 * (a - d).powi(2) + m[(0, 1)].norm_sqr()).sqrt();
    (mid - r, mid + r)
}

fn outer(v: [f64; 2], weight: f64) -> Mat2 {
    Mat2::new(
        c(weight * v[0] * v[0]),
        c(weight * v[0] * v[1]),
        c(weight * v[1] * v[0]),
        c(weight * v[1] * v[1]),
    )
}

/// `⟨ψ|A|ψ⟩` for a qubit.
fn expectation(a: &Mat2, psi: &[C64]) -> f64 {
    let mut acc = C64::default();
    for i in 0..2 {
        for j in 0..2 {
            acc += psi[i].conj() * a[(i, j)] * psi[j];
        }
    }
    acc.re
}

impl ClassicalStrategy {
    pub fn new(povm: Vec<Mat2>, guesses: Vec<PureState>) -> Result<Self> {
        if povm.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        if povm.len() != guesses.len() {
            return Err(Error::InvalidPovm(format!(
                "{} elements but {} guesses",
                povm.len(),
                guesses.len()
            )));
        }
        if let Some(g) = guesses.iter().find(|g| g.n_qubits() != 1) {
            return Err(Error::InvalidPovm(format!(
                "guess on {} qubits",
                g.n_qubits()
            )));
        }
        for (i, a) in povm.iter().enumerate() {
            let herm = (a - a.adjoint())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if herm > POVM_PSD_TOL {
                return Err(Error::InvalidPovm(format!("element {i} is not Hermitian")));
            }
            let (lo, _) = hermitian_2x2_eigenvalues(a);
            if lo < -POVM_PSD_TOL {
                return Err(Error::InvalidPovm(format!(
                    "element {i} has eigenvalue {lo:e}"
                )));
            }
        }
        let total: Mat2 = povm.iter().sum();
        let dev = (total - Mat2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > POVM_SUM_TOL {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {dev:e}"
            )));
        }
        Ok(Self { povm, guesses })
    }

    /// Projective `{|0⟩⟨0|, |1⟩⟨1|}` measurement with the given guesses.
    pub fn computational(guess0: PureState, guess1: PureState) -> Result<Self> {
        Self::new(
            vec![outer([1.0, 0.0], 1.0), outer([0.0, 1.0], 1.0)],
            vec![guess0, guess1],
        )
    }

    /// Minimum-error measurement; Bob prepares the state Alice names.
    pub fn min_error(ens: &TwoStateEnsemble) -> Self {
        let (a, b) = ens.states();
        Self::computational(a, b).expect("projective measurement")
    }

    /// Minimum-error measurement with guesses `cos(g/2)|0⟩ + sin(g/2)|1⟩`
    /// and its `0 ↔ 1` mirror. `g = θ` recovers [`Self::min_error`].
    pub fn tilted_guess(guess_angle: f64) -> Self {
        let (s, co) = (guess_angle / 2.0).sin_cos();
        Self::computational(
            PureState::from_real(&[co, s]).expect("unit vector"),
            PureState::from_real(&[s, co]).expect("unit vector"),
        )
        .expect("projective measurement")
    }

    /// Unambiguous discrimination. Outcomes 1 and 2 identify `ψ₁` and `ψ₂`
    /// with certainty; the inconclusive element is split in two halves
    /// guessing `ψ₁` and `ψ₂`, which is Bob's fair coin toss.
    pub fn unambiguous(ens: &TwoStateEnsemble) -> Self {
        let (s, co) = (ens.theta() / 2.0).sin_cos();
        let overlap = ens.overlap();
        // Largest weight keeping the inconclusive element positive.
        let w = 1.0 / (1.0 + overlap);
        let perp_psi2 = [co, -s];
        let perp_psi1 = [s, -co];
        let a1 = outer(perp_psi2, w);
        let a2 = outer(perp_psi1, w);
        let inconclusive = (Mat2::identity() - a1 - a2) * c(0.5);
        let (g1, g2) = ens.states();
        Self::new(
            vec![a1, a2, inconclusive, inconclusive],
            vec![g1.clone(), g2.clone(), g1, g2],
        )
        .expect("unambiguous POVM is valid by construction")
    }

    pub fn povm(&self) -> &[Mat2] {
        &self.povm
    }

    pub fn guesses(&self) -> &[PureState] {
        &self.guesses
    }

    /// Outcome distribution `P(i|ψ)`.
    pub fn outcome_probabilities(&self, psi: &PureState) -> Result<Vec<f64>> {
        if psi.n_qubits() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: psi.dim(),
            });
        }
        Ok(self
            .povm
            .iter()
            .map(|a| expectation(a, psi.amplitudes()))
            .collect())
    }

    /// `Σᵢ P(i|ψ) |⟨ψ|αᵢ⟩|²` for a single input.
    pub fn fidelity_for(&self, psi: &PureState) -> Result<f64> {
        let probs = self.outcome_probabilities(psi)?;
        probs
            .iter()
            .zip(&self.guesses)
            .map(|(p, g)| Ok(p * psi.overlap_sqr(g)?))
            .sum()
    }
}

/// Outputs of a classical strategy evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyReport {
    pub fidelity: f64,
    pub error_probability: Option<f64>,
    pub guess_angle: Option<f64>,
}

/// `½ Σᵢ Σⱼ ⟨ψⱼ|Aᵢ|ψⱼ⟩ |⟨ψⱼ|αᵢ⟩|²` over the equal-prior pair.
pub fn classical_fidelity(strategy: &ClassicalStrategy, ens: &TwoStateEnsemble) -> f64 {
    let (a, b) = ens.states();
    let fa = strategy.fidelity_for(&a).expect("qubit input");
    let fb = strategy.fidelity_for(&b).expect("qubit input");
    0.5 * (fa + fb)
}

/// Helstrom minimum error `½(1 − cos θ)`.
pub fn min_error_probability(ens: &TwoStateEnsemble) -> f64 {
    0.5 * (1.0 - ens.theta().cos())
}

/// Minimum-error measurement with unbiased guesses:
/// `(1 − Pₑ) + Pₑ sin²θ = 1 − ½(1 − cos θ) cos²θ`.
pub fn fidelity_min_error(ens: &TwoStateEnsemble) -> f64 {
    let ct = ens.theta().cos();
    1.0 - 0.5 * (1.0 - ct) * ct * ct
}

/// Success probability `1 − sin θ` of unambiguous discrimination.
pub fn unambiguous_success_probability(ens: &TwoStateEnsemble) -> f64 {
    1.0 - ens.overlap()
}

/// `1 − ½ sin θ + ½ sin³θ`.
pub fn fidelity_unambiguous(ens: &TwoStateEnsemble) -> f64 {
    let s = ens.overlap();
    1.0 - 0.5 * s + 0.5 * s.powi(3)
}

/// Symmetric two-term fidelity of the tilted-guess strategy,
/// `cos²(θ/2) cos²((θ−g)/2) + sin²(θ/2) sin²((θ+g)/2)`.
pub fn tilted_guess_fidelity(ens: &TwoStateEnsemble, guess_angle: f64) -> f64 {
    let t = ens.theta();
    let (s, co) = (t / 2.0).sin_cos();
    co * co * ((t - guess_angle) / 2.0).cos().powi(2)
        + s * s * ((t + guess_angle) / 2.0).sin().powi(2)
}

/// `p(1|ψ₁) sin(θ − g) + p(2|ψ₁) sin(θ + g)`: twice the derivative of
/// [`tilted_guess_fidelity`] in `g`.
pub fn tilted_guess_slope(ens: &TwoStateEnsemble, guess_angle: f64) -> f64 {
    let t = ens.theta();
    let (s, co) = (t / 2.0).sin_cos();
    co * co * (t - guess_angle).sin() + s * s * (t + guess_angle).sin()
}

/// `arctan(sin θ / cos²θ)`; undefined when the two states coincide.
pub fn optimal_guess_angle(ens: &TwoStateEnsemble) -> Result<f64> {
    let t = ens.theta();
    let ct = t.cos();
    if ct < 1e-12 {
        return Err(Error::DegenerateEnsemble);
    }
    Ok((t.sin() / (ct * ct)).atan())
}

/// Tilted-guess strategy at its optimal angle.
pub fn fidelity_optimized(ens: &TwoStateEnsemble) -> StrategyReport {
    let error_probability = Some(min_error_probability(ens));
    match optimal_guess_angle(ens) {
        Ok(g) => StrategyReport {
            fidelity: tilted_guess_fidelity(ens, g),
            error_probability,
            guess_angle: Some(g),
        },
        // Both signals are the same state: guessing it is exact.
        Err(_) => StrategyReport {
            fidelity: 1.0,
            error_probability,
            guess_angle: None,
        },
    }
}

/// `½(1 + √(1 − s² + s⁴))` with `s = |⟨ψ₁|ψ₂⟩|`.
pub fn fidelity_fuchs_peres(ens: &TwoStateEnsemble) -> f64 {
    let s2 = ens.overlap().powi(2);
    0.5 * (1.0 + (1.0 - s2 + s2 * s2).sqrt())
}

/// Inputs for [`unknown_state_classical_fidelity_with`].
#[derive(Debug, Clone, PartialEq)]
pub enum InputDistribution {
    /// Uniform over the Bloch sphere.
    Haar,
    /// Always the same state.
    Fixed(PureState),
}

/// Monte Carlo average of the measure-and-prepare fidelity (computational
/// basis measurement, Bob prepares the measured basis state) over
/// Haar-random inputs. Converges to 2/3.
pub fn unknown_state_classical_fidelity(samples: usize, seed: u64) -> Result<McEstimate> {
    unknown_state_classical_fidelity_with(&InputDistribution::Haar, samples, seed)
}

pub fn unknown_state_classical_fidelity_with(
    inputs: &InputDistribution,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::TooFewSamples { samples, min: 1 });
    }
    if let InputDistribution::Fixed(psi) = inputs {
        if psi.n_qubits() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: psi.dim(),
            });
        }
    }
    let strategy = ClassicalStrategy::computational(PureState::zero(), PureState::one())?;
    Ok(mc::estimate(samples, seed, |rng| {
        let psi = match inputs {
            InputDistribution::Haar => mc::haar_qubit(rng),
            InputDistribution::Fixed(psi) => psi.clone(),
        };
        strategy.fidelity_for(&psi).expect("qubit input")
    }))
}
