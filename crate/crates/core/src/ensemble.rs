//! The two-state source and the pure entangled channel.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use crate::error::{Error, Result};
use crate::qcore::{von_neumann_entropy, DensityMatrix, PureState};

const ANGLE_SLACK: f64 = 1e-12;

/// Equal-prior source of `cos(θ/2)|0⟩ + sin(θ/2)|1⟩` and
/// `sin(θ/2)|0⟩ + cos(θ/2)|1⟩`, with `θ ∈ [0, π/2]`.
///
/// `θ = 0` gives orthogonal basis states, `θ = π/4` the maximally
/// non-orthogonal pair, and `θ = π/2` makes the two states coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStateEnsemble {
    theta: f64,
}

impl TwoStateEnsemble {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&theta) {
            return Err(Error::ThetaOutOfRange { theta });
        }
        Ok(Self {
            theta: theta.clamp(0.0, FRAC_PI_2),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The pair `(|ψ₁⟩, |ψ₂⟩)`.
    pub fn states(&self) -> (PureState, PureState) {
        let (s, c) = (self.theta / 2.0).sin_cos();
        (
            PureState::from_real(&[c, s]).expect("unit vector"),
            PureState::from_real(&[s, c]).expect("unit vector"),
        )
    }

    /// `⟨ψ₁|ψ₂⟩ = sin θ` (real and nonnegative on this domain).
    pub fn overlap(&self) -> f64 {
        self.theta.sin()
    }

    /// `½(|ψ₁⟩⟨ψ₁| + |ψ₂⟩⟨ψ₂|)`.
    pub fn density(&self) -> DensityMatrix {
        let (a, b) = self.states();
        DensityMatrix::mixture(&[(0.5, &a), (0.5, &b)]).expect("equal mixture of unit vectors")
    }

    /// Von Neumann entropy of [`Self::density`] in bits: the asymptotic
    /// qubits (and ebits) needed per transmitted signal.
    pub fn source_entropy(&self) -> f64 {
        von_neumann_entropy(&self.density())
    }
}

/// Free-function spelling of [`TwoStateEnsemble::states`].
pub fn make_states(ens: &TwoStateEnsemble) -> (PureState, PureState) {
    ens.states()
}

pub fn overlap(ens: &TwoStateEnsemble) -> f64 {
    ens.overlap()
}

pub fn ensemble_density(ens: &TwoStateEnsemble) -> DensityMatrix {
    ens.density()
}

pub fn source_entropy(ens: &TwoStateEnsemble) -> f64 {
    ens.source_entropy()
}

/// `H(p) = −p log₂ p − (1−p) log₂(1−p)`.
pub fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

/// The shared pure resource `α|00⟩ + β|11⟩` with real `0 ≤ α ≤ β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    alpha: f64,
    beta: f64,
}

impl Channel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || !(-ANGLE_SLACK..=FRAC_1_SQRT_2 + ANGLE_SLACK).contains(&alpha) {
            return Err(Error::AlphaOutOfRange { alpha });
        }
        let alpha = alpha.clamp(0.0, FRAC_1_SQRT_2);
        Ok(Self {
            alpha,
            beta: (1.0 - alpha * alpha).sqrt(),
        })
    }

    /// Channel with `α² = alpha_sq`, `alpha_sq ∈ [0, ½]`.
    pub fn from_alpha_sq(alpha_sq: f64) -> Result<Self> {
        if !alpha_sq.is_finite() || !(-ANGLE_SLACK..=0.5 + ANGLE_SLACK).contains(&alpha_sq) {
            return Err(Error::AlphaOutOfRange {
                alpha: alpha_sq.abs().sqrt(),
            });
        }
        let alpha_sq = alpha_sq.clamp(0.0, 0.5);
        Ok(Self {
            alpha: alpha_sq.sqrt(),
            beta: (1.0 - alpha_sq).sqrt(),
        })
    }

    pub fn maximal() -> Self {
        Self {
            alpha: FRAC_1_SQRT_2,
            beta: FRAC_1_SQRT_2,
        }
    }

    /// The unentangled limit `|11⟩`.
    pub fn product() -> Self {
        Self {
            alpha: 0.0,
            beta: 1.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Two-qubit state vector `α|00⟩ + β|11⟩`.
    pub fn state(&self) -> PureState {
        PureState::from_real(&[self.alpha, 0.0, 0.0, self.beta]).expect("α² + β² = 1")
    }

    /// Entanglement entropy of the channel in ebits.
    pub fn entanglement(&self) -> f64 {
        binary_entropy(self.alpha * self.alpha)
    }
}
