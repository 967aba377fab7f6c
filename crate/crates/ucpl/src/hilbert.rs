//! The Hilbert-space backend: projections as events, density matrices as
//! states, conditioning by the Lüders rule ρ ↦ eρe / tr(ρe).
//!
//! State-quantified questions ("for all μ ...") are decided here through
//! operator identities, which are exact because every quantity involved is
//! linear in the density matrix: e → f for all states reduces to
//! f = efe + e′fe′, weak comeasurability to aba = bab over the quadruple
//! {e, e′, f, f′}, and strong comeasurability to abdba = badab for d running
//! over a family of projections spanning the self-adjoint matrices.

use crate::matrix::{self, CMat};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Module-wide validation tolerance τ. Classification operations take a
/// caller-supplied tolerance instead; validation stays strict.
pub const VALIDATION_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum HilbertError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("not self-adjoint: ‖M − M†‖ = {defect:.3e} exceeds tol {tol:.1e}")]
    NotSelfAdjoint { defect: f64, tol: f64 },
    #[error("not idempotent: ‖M² − M‖ = {defect:.3e} exceeds tol {tol:.1e}")]
    NotIdempotent { defect: f64, tol: f64 },
    #[error("not positive semidefinite: minimum eigenvalue {min_eig:.3e} below −{tol:.1e}")]
    NotPositive { min_eig: f64, tol: f64 },
    #[error("trace {trace} differs from 1 beyond tol {tol:.1e}")]
    TraceNotOne { trace: f64, tol: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("cannot condition on a null event: probability {prob:.3e} ≤ tol {tol:.1e}")]
    NullConditioningEvent { prob: f64, tol: f64 },
    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },
    #[error("not real: largest imaginary entry {max_imag:.3e} exceeds tol {tol:.1e}")]
    NotReal { max_imag: f64, tol: f64 },
}

/// A self-adjoint idempotent matrix; an event of the Hilbert backend.
#[derive(Clone, PartialEq)]
pub struct Projection {
    matrix: CMat,
}

impl fmt::Debug for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Projection(dim {}, rank ≈ {:.3})", self.dim(), matrix::trace_re(&self.matrix))
    }
}

impl Projection {
    /// Validates self-adjointness and idempotence within `tol`.
    pub fn new(matrix: CMat, tol: f64) -> Result<Self, HilbertError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(HilbertError::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        let herm = matrix::hermiticity_defect(&matrix);
        if herm > tol {
            return Err(HilbertError::NotSelfAdjoint { defect: herm, tol });
        }
        let idem = matrix::idempotency_defect(&matrix);
        if idem > tol {
            return Err(HilbertError::NotIdempotent { defect: idem, tol });
        }
        Ok(Projection { matrix })
    }

    pub fn zero(dim: usize) -> Self {
        Projection { matrix: matrix::zeros(dim) }
    }

    pub fn one(dim: usize) -> Self {
        Projection { matrix: matrix::identity(dim) }
    }

    /// Diagonal 0/1 projection from indicator entries.
    pub fn diagonal(pattern: &[u8]) -> Self {
        let dim = pattern.len();
        let mut m = matrix::zeros(dim);
        for (i, &p) in pattern.iter().enumerate() {
            if p != 0 {
                m[(i, i)] = Complex64::new(1.0, 0.0);
            }
        }
        Projection { matrix: m }
    }

    /// Bypasses validation; used by the sweep's documented bug-injection
    /// test hook to smuggle a perturbed matrix past the type invariants.
    pub(crate) fn from_matrix_unchecked(matrix: CMat) -> Self {
        Projection { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// The orthocomplement e′ = 1 − e.
    pub fn complement(&self) -> Projection {
        Projection { matrix: matrix::identity(self.dim()) - &self.matrix }
    }

    pub fn rank_estimate(&self) -> f64 {
        matrix::trace_re(&self.matrix)
    }
}

/// A positive unit-trace matrix; a state of the Hilbert backend evaluated by
/// μ(f) = tr(ρ·f).
#[derive(Clone, PartialEq)]
pub struct DensityState {
    matrix: CMat,
}

impl fmt::Debug for DensityState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityState(dim {})", self.dim())
    }
}

impl DensityState {
    /// Validates positivity (eigenvalues ≥ −tol) and unit trace within `tol`.
    pub fn new(matrix: CMat, tol: f64) -> Result<Self, HilbertError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(HilbertError::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        let herm = matrix::hermiticity_defect(&matrix);
        if herm > tol {
            return Err(HilbertError::NotSelfAdjoint { defect: herm, tol });
        }
        let eigs = matrix::hermitian_eigenvalues(&matrix);
        if let Some(&min_eig) = eigs.first() {
            if min_eig < -tol {
                return Err(HilbertError::NotPositive { min_eig, tol });
            }
        }
        let trace = matrix::trace_re(&matrix);
        if (trace - 1.0).abs() > tol {
            return Err(HilbertError::TraceNotOne { trace, tol });
        }
        Ok(DensityState { matrix })
    }

    /// Maximally mixed state 𝟙/dim.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityState { matrix: matrix::identity(dim) / Complex64::new(dim as f64, 0.0) }
    }

    /// Internal constructor for matrices that are positive and normalized by
    /// construction (Lüders outputs, normalized rank-one witnesses).
    pub(crate) fn normalized_unchecked(matrix: CMat) -> Self {
        DensityState { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// μ(f) = tr(ρ·f).
    pub fn expect(&self, f: &Projection) -> f64 {
        matrix::trace_re(&(&self.matrix * f.matrix()))
    }
}

fn check_same_dim(e: &Projection, f: &Projection) -> Result<usize, HilbertError> {
    if e.dim() != f.dim() {
        return Err(HilbertError::DimMismatch { left: e.dim(), right: f.dim() });
    }
    Ok(e.dim())
}

/// Conditional probability μ(f|e) = tr(ρ·efe) / tr(ρ·e), clamped into [0,1]
/// when rounding places it within τ of a boundary.
pub fn cond_prob(
    rho: &DensityState,
    e: &Projection,
    f: &Projection,
    tol: f64,
) -> Result<f64, HilbertError> {
    let pe = rho.expect(e);
    if pe <= tol {
        return Err(HilbertError::NullConditioningEvent { prob: pe, tol });
    }
    let raw = matrix::trace_re(&(rho.matrix() * e.matrix() * f.matrix() * e.matrix())) / pe;
    Ok(clamp_probability(raw))
}

fn clamp_probability(p: f64) -> f64 {
    if (-VALIDATION_TOL..0.0).contains(&p) {
        0.0
    } else if p > 1.0 && p <= 1.0 + VALIDATION_TOL {
        1.0
    } else {
        p
    }
}

/// The Lüders transition ρ ↦ eρe / tr(ρe), the state after a measurement
/// with outcome e.
pub fn lueders_condition(
    rho: &DensityState,
    e: &Projection,
    tol: f64,
) -> Result<DensityState, HilbertError> {
    let pe = rho.expect(e);
    if pe <= tol {
        return Err(HilbertError::NullConditioningEvent { prob: pe, tol });
    }
    let mut m = e.matrix() * rho.matrix() * e.matrix();
    // symmetrize away the last rounding, then renormalize on the real trace
    m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = matrix::trace_re(&m);
    m /= Complex64::new(tr, 0.0);
    Ok(DensityState::normalized_unchecked(m))
}

/// Probability that a sequence of measurements yields the chain outcomes and
/// then d: for chain (a,b) this is μ(a)·μ_a(b)·(μ_a)_b(d) = tr(b·a·ρ·a·b·d).
/// The trace form realizes the zero-product convention automatically: it
/// vanishes whenever any intermediate probability does.
pub fn sequential_weight(rho: &DensityState, chain: &[&Projection], d: &Projection) -> f64 {
    assert!(!chain.is_empty(), "measurement chain must be nonempty");
    let mut m = rho.matrix().clone();
    for a in chain {
        m = a.matrix() * m * a.matrix();
    }
    let w = matrix::trace_re(&(&m * d.matrix()));
    if w < 0.0 && w > -1e-12 {
        0.0
    } else {
        w
    }
}

/// True iff ‖ef − fe‖ ≤ tol in the Frobenius norm.
pub fn commutes(e: &Projection, f: &Projection, tol: f64) -> Result<bool, HilbertError> {
    Ok(commutator_defect(e, f)? <= tol)
}

/// ‖ef − fe‖.
pub fn commutator_defect(e: &Projection, f: &Projection) -> Result<f64, HilbertError> {
    check_same_dim(e, f)?;
    let ef = e.matrix() * f.matrix();
    let fe = f.matrix() * e.matrix();
    Ok(matrix::fro_dist(&ef, &fe))
}

/// The operator residual f − (efe + e′fe′); its vanishing is equivalent to
/// “e → f in every state”.
pub fn influence_defect_operator(e: &Projection, f: &Projection) -> Result<CMat, HilbertError> {
    check_same_dim(e, f)?;
    let ec = e.complement();
    let compressed =
        e.matrix() * f.matrix() * e.matrix() + ec.matrix() * f.matrix() * ec.matrix();
    Ok(f.matrix() - compressed)
}

/// True iff f = efe + e′fe′ within tol; agrees with [`commutes`] on all pairs.
pub fn influence_free_operator(
    e: &Projection,
    f: &Projection,
    tol: f64,
) -> Result<bool, HilbertError> {
    Ok(matrix::fro_norm(&influence_defect_operator(e, f)?) <= tol)
}

/// The commutation-based Boolean decomposition d₁ = ef′, d₂ = ef, d₃ = fe′
/// with e = d₁+d₂ and f = d₂+d₃; absent for non-commuting pairs.
pub fn algebraic_decomposition(
    e: &Projection,
    f: &Projection,
    tol: f64,
) -> Result<Option<(Projection, Projection, Projection)>, HilbertError> {
    if !commutes(e, f, tol)? {
        return Ok(None);
    }
    // products of projections commuting within tol are projections within a
    // small multiple of tol
    let slack = (tol * 8.0).max(VALIDATION_TOL);
    let d1 = Projection::new(e.matrix() * f.complement().matrix(), slack)?;
    let d2 = Projection::new(e.matrix() * f.matrix(), slack)?;
    let d3 = Projection::new(f.matrix() * e.complement().matrix(), slack)?;
    Ok(Some((d1, d2, d3)))
}

/// The conditioning-map decomposition d₀ = P_e f, d₁ = e − d₀, d₂ = f − d₀,
/// available whenever e → f holds operator-exactly; the three parts are
/// pairwise orthogonal projections.
pub fn lemma4_decomposition(
    e: &Projection,
    f: &Projection,
    tol: f64,
) -> Result<Option<(Projection, Projection, Projection)>, HilbertError> {
    if !influence_free_operator(e, f, tol)? {
        return Ok(None);
    }
    let slack = (tol * 8.0).max(VALIDATION_TOL);
    let d0m = e.matrix() * f.matrix() * e.matrix();
    let d0 = Projection::new(d0m.clone(), slack)?;
    let d1 = Projection::new(e.matrix() - &d0m, slack)?;
    let d2 = Projection::new(f.matrix() - &d0m, slack)?;
    Ok(Some((d0, d1, d2)))
}

/// Mutual orthogonality defect max ‖dᵢ·dⱼ‖ over distinct pairs.
pub fn orthogonality_defect(parts: &[&Projection]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..parts.len() {
        for j in 0..parts.len() {
            if i != j {
                let prod = parts[i].matrix() * parts[j].matrix();
                worst = worst.max(matrix::fro_norm(&prod));
            }
        }
    }
    worst
}

/// A family of projections spanning the self-adjoint dim×dim matrices over ℝ:
/// the diagonal units Eᵢᵢ together with the rank-one projections onto
/// (eᵢ+eⱼ)/√2 and (eᵢ+i·eⱼ)/√2. Quantifying a real-linear identity over this
/// family discharges it for every event.
pub fn spanning_projection_family(dim: usize) -> Vec<Projection> {
    let mut fam = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        let mut m = matrix::zeros(dim);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        fam.push(Projection { matrix: m });
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut re = matrix::zeros(dim);
            re[(i, i)] = Complex64::new(0.5, 0.0);
            re[(j, j)] = Complex64::new(0.5, 0.0);
            re[(i, j)] = Complex64::new(0.5, 0.0);
            re[(j, i)] = Complex64::new(0.5, 0.0);
            fam.push(Projection { matrix: re });

            let mut im = matrix::zeros(dim);
            im[(i, i)] = Complex64::new(0.5, 0.0);
            im[(j, j)] = Complex64::new(0.5, 0.0);
            im[(i, j)] = Complex64::new(0.0, -0.5);
            im[(j, i)] = Complex64::new(0.0, 0.5);
            fam.push(Projection { matrix: im });
        }
    }
    fam
}

/// Deterministic random projection of exact rank for a fixed seed.
pub fn random_projection(dim: usize, rank: usize, seed: u64) -> Result<Projection, HilbertError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_projection_rng(dim, rank, &mut rng, false)
}

/// Draws a rank-`rank` projection from `rng`; `real` restricts to real
/// symmetric matrices (the Jordan backend's class).
pub fn random_projection_rng<R: Rng>(
    dim: usize,
    rank: usize,
    rng: &mut R,
    real: bool,
) -> Result<Projection, HilbertError> {
    if rank > dim {
        return Err(HilbertError::InvalidRank { rank, dim });
    }
    if rank == 0 {
        return Ok(Projection::zero(dim));
    }
    if rank == dim {
        return Ok(Projection::one(dim));
    }
    let v = matrix::orthonormal_columns(dim, rank, rng, real);
    Ok(Projection { matrix: &v * v.adjoint() })
}

/// Deterministic full-support random density matrix for a fixed seed.
pub fn random_density(dim: usize, seed: u64) -> DensityState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_density_rng(dim, &mut rng)
}

pub fn random_density_rng<R: Rng>(dim: usize, rng: &mut R) -> DensityState {
    let g = matrix::random_gaussian(dim, rng);
    let mut m = &g * g.adjoint();
    let tr = matrix::trace_re(&m);
    m /= Complex64::new(tr, 0.0);
    DensityState::normalized_unchecked(m)
}

/// Named collection of projections and states sharing one dimension.
#[derive(Clone, Debug)]
pub struct HilbertScenario {
    dim: usize,
    projections: Vec<(String, Projection)>,
    states: Vec<(String, DensityState)>,
}

impl HilbertScenario {
    pub fn new(
        dim: usize,
        projections: Vec<(String, Projection)>,
        states: Vec<(String, DensityState)>,
    ) -> Result<Self, HilbertError> {
        for (_, p) in &projections {
            if p.dim() != dim {
                return Err(HilbertError::DimMismatch { left: dim, right: p.dim() });
            }
        }
        for (_, s) in &states {
            if s.dim() != dim {
                return Err(HilbertError::DimMismatch { left: dim, right: s.dim() });
            }
        }
        Ok(HilbertScenario { dim, projections, states })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn projections(&self) -> &[(String, Projection)] {
        &self.projections
    }

    pub fn states(&self) -> &[(String, DensityState)] {
        &self.states
    }

    pub fn projection(&self, name: &str) -> Option<&Projection> {
        self.projections.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    pub fn state(&self, name: &str) -> Option<&DensityState> {
        self.states.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }
}
