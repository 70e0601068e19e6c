//! One-to-two telecloning through the four-qubit state
//! `(|0⟩|φ₀⟩ + |1⟩|φ₁⟩)/√2`, qubits ordered (port, ancilla, B, C).
//!
//! The clone states are
//!
//! ```text
//! φ₀ = a|0,00⟩ + b|1⟩(|01⟩ + |10⟩) + c|0,11⟩
//! φ₁ = X⊗X⊗X φ₀
//! ```
//!
//! so `φ₀` lives on even parity and `φ₁` on odd parity. The Bell outcome on
//! (input, port) is undone by `P⊗P⊗P` on (ancilla, B, C), which leaves
//! `xφ₀ + yφ₁` for the input `x|0⟩ + y|1⟩`.

use std::f64::consts::FRAC_PI_2;

use crate::ensemble::TwoStateEnsemble;
use crate::error::{Error, Result};
use crate::optim::nelder_mead_max;
use crate::protocol::{enumerate_outcomes, ProtocolSpec};
use crate::qcore::{fidelity, BellState, DensityMatrix, PureState, C64};

const COEFF_TOL: f64 = 1e-10;
/// Starting grid per angle for the coefficient search.
const COEFF_GRID: usize = 16;
/// Local refinements launched from the best grid points.
const COEFF_STARTS: usize = 3;
const OPTIMAL_GRID: usize = 12;

/// Amplitudes of the symmetric ancilla-assisted cloner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloneCoeffs {
    a: f64,
    b: f64,
    c: f64,
}

impl CloneCoeffs {
    /// Requires `a, b, c ≥ 0` and `a² + 2b² + c² = 1`.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if ![a, b, c].iter().all(|x| x.is_finite() && *x >= 0.0) {
            return Err(Error::InvalidCoeffs(format!(
                "negative or non-finite ({a}, {b}, {c})"
            )));
        }
        let norm = a * a + 2.0 * b * b + c * c;
        if (norm - 1.0).abs() > COEFF_TOL {
            return Err(Error::InvalidCoeffs(format!("a² + 2b² + c² = {norm}")));
        }
        Ok(Self { a, b, c })
    }

    /// `a = cos u`, `b = sin u cos v / √2`, `c = sin u sin v`. Any angles
    /// are accepted; magnitudes are taken.
    pub fn from_angles(u: f64, v: f64) -> Self {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        Self {
            a: cu.abs(),
            b: (su * cv).abs() * std::f64::consts::FRAC_1_SQRT_2,
            c: (su * sv).abs(),
        }
    }

    /// The optimal universal 1→2 cloner: `(√(2/3), √(1/6), 0)`.
    pub fn universal() -> Self {
        Self {
            a: (2.0f64 / 3.0).sqrt(),
            b: (1.0f64 / 6.0).sqrt(),
            c: 0.0,
        }
    }

    /// `(1, 0, 0)`: copies basis states perfectly.
    pub fn basis_copier() -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            c: 0.0,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// `(φ₀, φ₁)` on (ancilla, B, C).
pub fn build_clone_states(coeffs: &CloneCoeffs) -> (PureState, PureState) {
    let CloneCoeffs { a, b, c: cc } = *coeffs;
    let phi0 = [a, 0.0, 0.0, cc, 0.0, b, b, 0.0];
    let phi1: Vec<f64> = (0..8).map(|i| phi0[7 - i]).collect();
    let build = |amps: &[f64]| PureState::from_real(amps).expect("validated coefficients");
    (build(&phi0), build(&phi1))
}

/// The telecloning resource and the coefficients it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct TelecloningSystem {
    state: PureState,
    coeffs: CloneCoeffs,
}

impl TelecloningSystem {
    pub fn build(coeffs: CloneCoeffs) -> Self {
        let (phi0, phi1) = build_clone_states(&coeffs);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps: Vec<C64> = phi0
            .amplitudes()
            .iter()
            .map(|&z| z * h)
            .chain(phi1.amplitudes().iter().map(|&z| z * h))
            .collect();
        let state = PureState::new(amps).expect("orthonormal branches");
        Self { state, coeffs }
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn coeffs(&self) -> CloneCoeffs {
        self.coeffs
    }

    /// Bell measurement on (input, port), `P⊗P⊗P` on (ancilla, B, C),
    /// output (B, C).
    pub fn protocol_spec(&self) -> ProtocolSpec {
        ProtocolSpec::pauli_broadcast(self.state.clone(), vec![1, 2]).expect("four-qubit resource")
    }
}

/// Alias for [`TelecloningSystem::build`].
pub fn build_telecloning_state(coeffs: CloneCoeffs) -> TelecloningSystem {
    TelecloningSystem::build(coeffs)
}

/// One corrected branch of the protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct TelecloneBranch {
    pub bell: BellState,
    pub probability: f64,
    /// State of (ancilla, B, C) after correction.
    pub corrected: PureState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TelecloneResult {
    pub per_outcome: Vec<TelecloneBranch>,
    pub clone_b: DensityMatrix,
    pub clone_c: DensityMatrix,
    pub joint_clones: DensityMatrix,
}

/// Runs the protocol for one input and averages the receivers' state over
/// the outcomes.
pub fn teleclone(input: &PureState, system: &TelecloningSystem) -> Result<TelecloneResult> {
    let outcomes = enumerate_outcomes(input, &system.protocol_spec())?;
    let mut per_outcome = Vec::with_capacity(4);
    let mut parts = Vec::with_capacity(4);
    for o in outcomes {
        let corrected = o.corrected.ok_or(Error::NotNormalized { norm_sq: 0.0 })?;
        parts.push((o.probability, corrected.reduced(&[1, 2])?));
        per_outcome.push(TelecloneBranch {
            bell: o.bell,
            probability: o.probability,
            corrected,
        });
    }
    let joint_clones = DensityMatrix::weighted_sum(&parts)?;
    Ok(TelecloneResult {
        clone_b: joint_clones.partial_trace(&[0])?,
        clone_c: joint_clones.partial_trace(&[1])?,
        per_outcome,
        joint_clones,
    })
}

/// The cloner applied locally: `x|0⟩ + y|1⟩ ↦ xφ₀ + yφ₁`.
pub fn apply_cloner(input: &PureState, coeffs: &CloneCoeffs) -> Result<PureState> {
    if input.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: input.n_qubits(),
        });
    }
    let (phi0, phi1) = build_clone_states(coeffs);
    let (x, y) = (input.amplitudes()[0], input.amplitudes()[1]);
    let amps = phi0
        .amplitudes()
        .iter()
        .zip(phi1.amplitudes())
        .map(|(&p, &q)| x * p + y * q)
        .collect();
    PureState::new(amps)
}

fn two_state_average(ens: &TwoStateEnsemble, f: impl Fn(&PureState) -> Result<f64>) -> Result<f64> {
    let (a, b) = ens.states();
    Ok(0.5 * (f(&a)? + f(&b)?))
}

/// `½ Σⱼ ⟨ψⱼψⱼ|ρ_BC⁽ʲ⁾|ψⱼψⱼ⟩` with `ρ_BC` produced by telecloning.
pub fn global_clone_fidelity(ens: &TwoStateEnsemble, coeffs: &CloneCoeffs) -> Result<f64> {
    let system = TelecloningSystem::build(*coeffs);
    two_state_average(ens, |psi| {
        fidelity(&psi.power(2), &teleclone(psi, &system)?.joint_clones)
    })
}

/// Same average with the cloner applied on the spot, no teleportation.
pub fn cloner_global_fidelity(ens: &TwoStateEnsemble, coeffs: &CloneCoeffs) -> Result<f64> {
    two_state_average(ens, |psi| {
        fidelity(&psi.power(2), &apply_cloner(psi, coeffs)?.reduced(&[1, 2])?)
    })
}

/// Best coefficients for the two-state ensemble: a grid over the angles of
/// [`CloneCoeffs::from_angles`], then Nelder–Mead from the best few points.
pub fn optimize_coeffs(ens: &TwoStateEnsemble) -> CloneCoeffs {
    let objective = |x: &[f64]| {
        cloner_global_fidelity(ens, &CloneCoeffs::from_angles(x[0], x[1]))
            .expect("valid coefficients")
    };
    let step = FRAC_PI_2 / COEFF_GRID as f64;
    let mut grid: Vec<(f64, [f64; 2])> = (0..=COEFF_GRID)
        .flat_map(|i| (0..=COEFF_GRID).map(move |j| [i as f64 * step, j as f64 * step]))
        .map(|x| (objective(&x), x))
        .collect();
    grid.sort_by(|p, q| q.0.total_cmp(&p.0));
    let best = grid
        .iter()
        .take(COEFF_STARTS)
        .map(|(_, x)| nelder_mead_max(objective, x, step / 2.0, 1e-15, 1e-10, 4_000))
        .max_by(|p, q| p.value.total_cmp(&q.value))
        .expect("at least one start");
    let top = grid[0];
    if best.value >= top.0 {
        CloneCoeffs::from_angles(best.x[0], best.x[1])
    } else {
        CloneCoeffs::from_angles(top.1[0], top.1[1])
    }
}

// Unit vector in the real symmetric two-qubit subspace, basis
// {|00⟩, (|01⟩+|10⟩)/√2, |11⟩}, with its two tangent directions.
fn sphere_frame(u: f64, v: f64) -> [[f64; 3]; 3] {
    let (su, cu) = u.sin_cos();
    let (sv, cv) = v.sin_cos();
    [
        [cu, su * cv, su * sv],
        [-su, cu * cv, cu * sv],
        [0.0, -sv, cv],
    ]
}

fn dot(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    p.iter().zip(q).map(|(x, y)| x * y).sum()
}

/// Best global fidelity of any pair of pure symmetric two-qubit outputs
/// `χ₁, χ₂` with `⟨χ₁|χ₂⟩ = ⟨ψ₁|ψ₂⟩`, the constraint every isometry obeys.
/// `χ₂ = sχ₁ + √(1 − s²) n` with `n ⊥ χ₁` covers the constraint surface
/// with three angles.
pub fn optimal_global_fidelity(ens: &TwoStateEnsemble) -> f64 {
    let s = ens.overlap();
    let r = (1.0 - s * s).max(0.0).sqrt();
    let (sh, ch) = (ens.theta() / 2.0).sin_cos();
    let cross = std::f64::consts::SQRT_2 * ch * sh;
    let t1 = [ch * ch, cross, sh * sh];
    let t2 = [sh * sh, cross, ch * ch];
    let objective = |x: &[f64]| {
        let [chi1, e1, e2] = sphere_frame(x[0], x[1]);
        let (sw, cw) = x[2].sin_cos();
        let chi2: [f64; 3] = std::array::from_fn(|k| s * chi1[k] + r * (cw * e1[k] + sw * e2[k]));
        0.5 * (dot(&t1, &chi1).powi(2) + dot(&t2, &chi2).powi(2))
    };
    let step = std::f64::consts::PI / OPTIMAL_GRID as f64;
    let mut best = (f64::NEG_INFINITY, [0.0; 3]);
    for i in 0..=OPTIMAL_GRID {
        for j in 0..=OPTIMAL_GRID {
            for k in 0..2 * OPTIMAL_GRID {
                let x = [i as f64 * step, j as f64 * step, k as f64 * step];
                let v = objective(&x);
                if v > best.0 {
                    best = (v, x);
                }
            }
        }
    }
    nelder_mead_max(objective, &best.1, step / 2.0, 1e-16, 1e-11, 6_000)
        .value
        .max(best.0)
}

/// Reduced state of (B, C).
pub fn receivers_state(system: &TelecloningSystem) -> DensityMatrix {
    system.state.reduced(&[2, 3]).expect("four-qubit state")
}

/// Entropy across (port, ancilla) | (B, C), in ebits.
pub fn alice_receivers_entanglement(system: &TelecloningSystem) -> f64 {
    receivers_state(system).entropy()
}

/// The four single-qubit reduced states.
pub fn single_qubit_marginals(system: &TelecloningSystem) -> Vec<DensityMatrix> {
    (0..4)
        .map(|q| system.state.reduced(&[q]).expect("qubit in range"))
        .collect()
}

/// Entropy between qubit `q` and the other three.
pub fn qubit_rest_entanglement(system: &TelecloningSystem, q: usize) -> Result<f64> {
    Ok(system.state.reduced(&[q])?.entropy())
}

/// The closed-form (B, C) matrix
///
/// ```text
///       ⎛ n    0    0    2m ⎞
///  ½ ·  ⎜ 0    b²   0    0  ⎟      n = a² + b² + c²,  m = a(b + c)
///       ⎜ 0    0    b²   0  ⎟
///       ⎝ 2m   0    0    n  ⎠
/// ```
///
/// kept for comparison with [`receivers_state`]. It has unit trace but is
/// not the traced state, and is not even positive when `2a(b + c) > n`
/// (for example `a = b = c = ½`), in which case this returns an error.
pub fn rho34_formula(coeffs: &CloneCoeffs) -> Result<DensityMatrix> {
    let CloneCoeffs { a, b, c: cc } = *coeffs;
    let n = 0.5 * (a * a + b * b + cc * cc);
    let m = a * (b + cc);
    let h = 0.5 * b * b;
    #[rustfmt::skip]
    let data = [
        n,   0.0, 0.0, m,
        0.0, h,   0.0, 0.0,
        0.0, 0.0, h,   0.0,
        m,   0.0, 0.0, n,
    ];
    DensityMatrix::from_real(4, &data)
}
