//! Dense complex linear algebra for small qubit registers.
//!
//! Amplitudes are indexed big-endian: qubit 0 is the most significant bit of
//! the basis index, so `|1⟩ ⊗ |0⟩` has its weight at index 2. Everything in
//! this crate stays at or below five qubits, so plain dense vectors and
//! matrices are used throughout.

use std::fmt;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;

/// Normalization and unitarity tolerance.
pub const NORM_TOL: f64 = 1e-12;
/// Hermiticity and trace tolerance for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted for a density matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues below this are dropped from entropy sums.
pub const EIGEN_CUTOFF: f64 = 1e-12;
/// Outcomes below this probability carry no post-measurement state.
pub const PROB_CUTOFF: f64 = 1e-12;

const MAX_QUBITS: usize = 16;

#[inline]
pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() || len.trailing_zeros() as usize > MAX_QUBITS {
        return Err(Error::BadDimension { len });
    }
    Ok(len.trailing_zeros() as usize)
}

/// Spreads the bits of `value` over `positions` of an `n`-qubit index.
/// `positions[0]` receives the most significant bit of `value`.
fn scatter(value: usize, positions: &[usize], n: usize) -> usize {
    let k = positions.len();
    positions.iter().enumerate().fold(0, |acc, (slot, &q)| {
        let bit = (value >> (k - 1 - slot)) & 1;
        acc | (bit << (n - 1 - q))
    })
}

fn complement(keep: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|q| !keep.contains(q)).collect()
}

fn checked_subset(keep: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&q) = keep.iter().find(|&&q| q >= n) {
        return Err(Error::QubitOutOfRange {
            index: q,
            n_qubits: n,
        });
    }
    if keep.is_empty() || keep.len() == n {
        return Err(Error::InvalidKeep);
    }
    Ok(keep)
}

/// A normalized state vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl PureState {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { n_qubits, amps })
    }

    /// Builds a state from arbitrary nonzero amplitudes, rescaling to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= f64::MIN_POSITIVE {
            return Err(Error::NotNormalized { norm_sq });
        }
        let scale = norm_sq.sqrt().recip();
        Ok(Self {
            n_qubits,
            amps: amps.into_iter().map(|a| a * scale).collect(),
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| c(a)).collect())
    }

    /// Computational basis state `|index⟩` on `n_qubits` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::BadDimension {
                len: 1 << n_qubits.min(MAX_QUBITS + 1),
            });
        }
        let dim = 1 << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut amps = vec![C64::default(); dim];
        amps[index] = c(1.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn zero() -> Self {
        Self {
            n_qubits: 1,
            amps: vec![c(1.0), c(0.0)],
        }
    }

    pub fn one() -> Self {
        Self {
            n_qubits: 1,
            amps: vec![c(0.0), c(1.0)],
        }
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            n_qubits: 1,
            amps: vec![c(h), c(h)],
        }
    }

    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            n_qubits: 1,
            amps: vec![c(h), c(-h)],
        }
    }

    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn qubit(theta: f64, phi: f64) -> Self {
        let (s, co) = (theta / 2.0).sin_cos();
        Self {
            n_qubits: 1,
            amps: vec![c(co), C64::from_polar(s, phi)],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap_sqr(&self, other: &PureState) -> Result<f64> {
        self.inner(other).map(|z| z.norm_sqr())
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        PureState {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        }
    }

    /// `|ψ⟩^{⊗k}` for `k ≥ 1`.
    pub fn power(&self, k: usize) -> PureState {
        assert!(k >= 1, "tensor power needs k >= 1");
        (1..k).fold(self.clone(), |acc, _| acc.tensor(self))
    }

    pub fn projector(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        DensityMatrix {
            n_qubits: self.n_qubits,
            m: &v * v.adjoint(),
        }
    }

    /// Reduced state on `keep`, computed straight from the amplitudes.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.n_qubits;
        let keep = checked_subset(keep, n)?;
        let traced = complement(&keep, n);
        let kd = 1 << keep.len();
        let td = 1 << traced.len();
        let mut m = DMatrix::<C64>::zeros(kd, kd);
        for t in 0..td {
            let base = scatter(t, &traced, n);
            for i in 0..kd {
                let ai = self.amps[base | scatter(i, &keep, n)];
                if ai == C64::default() {
                    continue;
                }
                for j in 0..kd {
                    m[(i, j)] += ai * self.amps[base | scatter(j, &keep, n)].conj();
                }
            }
        }
        Ok(DensityMatrix {
            n_qubits: keep.len(),
            m,
        })
    }

    /// Largest amplitude difference after removing the best global phase.
    pub fn phase_distance(&self, other: &PureState) -> Result<f64> {
        let z = self.inner(other)?;
        let phase = if z.norm() > 0.0 { z / z.norm() } else { c(1.0) };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest elementwise difference, with no phase freedom.
    pub fn max_abs_diff(&self, other: &PureState) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub(crate) fn from_parts(n_qubits: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < 1e-15 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(
                f,
                "({:.6}{:+.6}i)|{:0w$b}⟩",
                a.re,
                a.im,
                i,
                w = self.n_qubits
            )?;
        }
        Ok(())
    }
}

/// Free-function form of [`PureState::tensor`].
pub fn tensor(a: &PureState, b: &PureState) -> PureState {
    a.tensor(b)
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    m: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates and wraps `m`, symmetrizing away rounding noise.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let n_qubits = qubits_for_len(m.nrows())?;
        let deviation = (&m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = m.trace().re;
        if (trace - 1.0).abs() > HERMITIAN_TOL {
            return Err(Error::BadTrace { trace });
        }
        let rho = Self {
            n_qubits,
            m: (&m + m.adjoint()) * c(0.5),
        };
        let min_eigenvalue = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(rho)
    }

    pub fn from_real(rows: usize, data: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_row_iterator(
            rows,
            rows,
            data.iter().map(|&x| c(x)),
        ))
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        Self {
            n_qubits,
            m: DMatrix::identity(d, d) * c(1.0 / d as f64),
        }
    }

    /// `Σ pᵢ |ψᵢ⟩⟨ψᵢ|`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &PureState)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::BadTrace { trace: 0.0 })?;
        let d = first.1.dim();
        let mut m = DMatrix::<C64>::zeros(d, d);
        for (p, psi) in parts {
            if psi.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: psi.dim(),
                });
            }
            if *p < 0.0 {
                return Err(Error::NotPositive { min_eigenvalue: *p });
            }
            m += psi.projector().m * c(*p);
        }
        Self::new(m)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(self)
    }

    /// Largest elementwise distance to `other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok((&self.m - &other.m)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    /// `U ρ U†` for a local unitary.
    pub fn conjugate(&self, op: &LocalOperator) -> Result<DensityMatrix> {
        if op.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: op.n_qubits(),
            });
        }
        let u = op.matrix();
        Ok(Self {
            n_qubits: self.n_qubits,
            m: &u * &self.m * u.adjoint(),
        })
    }

    /// `Σ pᵢ ρᵢ` of already valid states; weights should sum to one.
    pub(crate) fn weighted_sum(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let d = parts
            .first()
            .map(|p| p.1.dim())
            .ok_or(Error::BadTrace { trace: 0.0 })?;
        let mut m = DMatrix::<C64>::zeros(d, d);
        for (p, rho) in parts {
            m += &rho.m * c(*p);
        }
        Self::new(m)
    }
}

/// Ascending eigenvalues of a Hermitian matrix, symmetrized first.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let sym = (m + m.adjoint()) * c(0.5);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `−Σ λ log₂ λ` over a spectrum, skipping values below [`EIGEN_CUTOFF`].
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    let s: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > EIGEN_CUTOFF)
        .map(|&l| -l * l.log2())
        .sum();
    s.max(0.0)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

/// Reduced state on the qubits in `keep` (order of kept qubits preserved).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits;
    let keep = checked_subset(keep, n)?;
    let traced = complement(&keep, n);
    let kd = 1 << keep.len();
    let td = 1 << traced.len();
    let mut m = DMatrix::<C64>::zeros(kd, kd);
    for i in 0..kd {
        let si = scatter(i, &keep, n);
        for j in 0..kd {
            let sj = scatter(j, &keep, n);
            m[(i, j)] = (0..td)
                .map(|t| {
                    let st = scatter(t, &traced, n);
                    rho.m[(si | st, sj | st)]
                })
                .sum();
        }
    }
    Ok(DensityMatrix {
        n_qubits: keep.len(),
        m,
    })
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity(psi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: psi.dim(),
        });
    }
    let a = &psi.amps;
    let mut acc = C64::default();
    for i in 0..a.len() {
        for j in 0..a.len() {
            acc += a[i].conj() * rho.m[(i, j)] * a[j];
        }
    }
    Ok(acc.re)
}

/// Single-qubit gates.
pub mod gates {
    use super::{c, Mat2, C64};

    pub fn identity() -> Mat2 {
        Mat2::identity()
    }

    pub fn x() -> Mat2 {
        Mat2::new(c(0.0), c(1.0), c(1.0), c(0.0))
    }

    pub fn y() -> Mat2 {
        Mat2::new(c(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), c(0.0))
    }

    pub fn z() -> Mat2 {
        Mat2::new(c(1.0), c(0.0), c(0.0), c(-1.0))
    }

    pub fn hadamard() -> Mat2 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Mat2::new(c(h), c(h), c(h), c(-h))
    }

    /// Real rotation `exp(−i t Y / 2)`.
    pub fn ry(t: f64) -> Mat2 {
        let (s, co) = (t / 2.0).sin_cos();
        Mat2::new(c(co), c(-s), c(s), c(co))
    }

    /// `diag(1, e^{i t})`.
    pub fn phase(t: f64) -> Mat2 {
        Mat2::new(c(1.0), c(0.0), c(0.0), C64::from_polar(1.0, t))
    }
}

/// A product of single-qubit unitaries, one per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    ops: Vec<Mat2>,
}

impl LocalOperator {
    pub fn new(ops: Vec<Mat2>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::BadDimension { len: 1 });
        }
        for (position, u) in ops.iter().enumerate() {
            let dev = (u.adjoint() * u - Mat2::identity())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if dev > NORM_TOL {
                return Err(Error::NotUnitary { position });
            }
        }
        Ok(Self { ops })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            ops: vec![Mat2::identity(); n_qubits],
        }
    }

    /// `u` on every qubit.
    pub fn uniform(n_qubits: usize, u: Mat2) -> Result<Self> {
        Self::new(vec![u; n_qubits])
    }

    /// `u` on `position`, identity elsewhere.
    pub fn single(n_qubits: usize, position: usize, u: Mat2) -> Result<Self> {
        if position >= n_qubits {
            return Err(Error::QubitOutOfRange {
                index: position,
                n_qubits,
            });
        }
        let mut ops = vec![Mat2::identity(); n_qubits];
        ops[position] = u;
        Self::new(ops)
    }

    pub fn n_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn factors(&self) -> &[Mat2] {
        &self.ops
    }

    /// Dense `2^n × 2^n` matrix of the product.
    pub fn matrix(&self) -> DMatrix<C64> {
        self.ops.iter().fold(DMatrix::identity(1, 1), |acc, u| {
            let u = DMatrix::from_fn(2, 2, |i, j| u[(i, j)]);
            acc.kronecker(&u)
        })
    }

    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        apply_local(self, state)
    }
}

/// Applies each factor of `op` to its qubit.
pub fn apply_local(op: &LocalOperator, state: &PureState) -> Result<PureState> {
    let n = state.n_qubits;
    if op.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: op.n_qubits(),
        });
    }
    let mut amps = state.amps.clone();
    for (q, u) in op.ops.iter().enumerate() {
        if *u == Mat2::identity() {
            continue;
        }
        let mask = 1 << (n - 1 - q);
        for i in (0..amps.len()).filter(|i| i & mask == 0) {
            let (a0, a1) = (amps[i], amps[i | mask]);
            amps[i] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
            amps[i | mask] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
        }
    }
    Ok(PureState { n_qubits: n, amps })
}

/// The four Bell vectors, in the order φ⁺, φ⁻, ψ⁺, ψ⁻.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    /// Outcome label 1..=4.
    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn from_index(index: usize) -> Option<Self> {
        index.checked_sub(1).and_then(|i| Self::ALL.get(i).copied())
    }

    /// Amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn amplitudes(self) -> [f64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            BellState::PhiPlus => [h, 0.0, 0.0, h],
            BellState::PhiMinus => [h, 0.0, 0.0, -h],
            BellState::PsiPlus => [0.0, h, h, 0.0],
            BellState::PsiMinus => [0.0, h, -h, 0.0],
        }
    }

    pub fn state(self) -> PureState {
        PureState::from_parts(2, self.amplitudes().iter().map(|&a| c(a)).collect())
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
        })
    }
}

/// One branch of a Bell measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct BellOutcome {
    pub bell: BellState,
    pub probability: f64,
    /// Renormalized state of the unmeasured qubits; `None` when nothing is
    /// left unmeasured or the branch has (numerically) zero probability.
    pub post_state: Option<PureState>,
}

/// Projects qubits `pair = (i, j)` onto the Bell basis. Qubit `i` plays the
/// first slot of each Bell vector; the remaining qubits keep their order.
pub fn bell_measure(state: &PureState, pair: (usize, usize)) -> Result<[BellOutcome; 4]> {
    let n = state.n_qubits;
    if n < 2 {
        return Err(Error::TooFewQubits { n_qubits: n });
    }
    let (i, j) = pair;
    for q in [i, j] {
        if q >= n {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: n,
            });
        }
    }
    if i == j {
        return Err(Error::CoincidentQubits);
    }
    let measured = [i, j];
    let rest = complement(&measured, n);
    let rd = 1 << rest.len();

    Ok(BellState::ALL.map(|bell| {
        let coeffs = bell.amplitudes();
        let proj: Vec<C64> = (0..rd)
            .map(|r| {
                let base = scatter(r, &rest, n);
                (0..4)
                    .filter(|&xy| coeffs[xy] != 0.0)
                    .map(|xy| state.amps[base | scatter(xy, &measured, n)] * coeffs[xy])
                    .sum()
            })
            .collect();
        let probability: f64 = proj.iter().map(|a| a.norm_sqr()).sum();
        let post_state = if rest.is_empty() || probability <= PROB_CUTOFF {
            None
        } else {
            let scale = probability.sqrt().recip();
            Some(PureState::from_parts(
                rest.len(),
                proj.into_iter().map(|a| a * scale).collect(),
            ))
        };
        BellOutcome {
            bell,
            probability,
            post_state,
        }
    }))
}
