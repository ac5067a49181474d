//! Finite-dimensional Hilbert-space substrate.
//!
//! Continuum integrals are replaced by weighted sums: a state on a grid of
//! spacing `Δ` carries the weight `Δ` on every point, an intrinsically
//! discrete representation carries weight 1. Dirac deltas become Kronecker
//! deltas divided by the weight.
//!
//! Eigenvectors are stored with unit weighted norm (`V†WV = I`). The
//! delta-normalized eigenfunctions used by the coefficient and transform
//! formulas are obtained by dividing column `k` by `√measure[k]`, where the
//! measure is the quadrature weight attached to the eigenvalue lattice.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalue gaps below this (scaled by `max(1, |λ|max)`) mark a basis degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;
/// Components within this relative distance of the largest magnitude tie for the gauge pivot.
pub const GAUGE_TIE_TOL: f64 = 1e-9;

/// Tag of the position representation used by grid-based states and operators.
pub const POSITION: &str = "position";

#[inline]
pub(crate) fn cis(phase: f64) -> C64 {
    C64::from_polar(1.0, phase)
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Uniform one-dimensional grid in natural units.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    spacing: f64,
}

impl Grid {
    /// `n` points starting at `start` with the given spacing.
    pub fn new(n: usize, start: f64, spacing: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        if !(spacing > 0.0) || !spacing.is_finite() || !start.is_finite() {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {spacing}")));
        }
        let points = (0..n).map(|j| start + j as f64 * spacing).collect();
        Ok(Grid { points, spacing })
    }

    /// Periodic grid covering `[lo, hi)` with `n` points.
    pub fn over(n: usize, lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::InvalidGrid(format!("empty domain [{lo}, {hi})")));
        }
        Grid::new(n, lo, (hi - lo) / n as f64)
    }

    /// Grid of `n` points `(j - n/2)·spacing`, which contains the origin.
    pub fn centered(n: usize, spacing: f64) -> Result<Self> {
        Grid::new(n, -((n / 2) as f64) * spacing, spacing)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Length of the periodic cell, `n·Δ`.
    pub fn period(&self) -> f64 {
        self.len() as f64 * self.spacing
    }

    /// Momentum lattice `2πħk/(nΔ)` for `k = -⌊n/2⌋ .. ⌈n/2⌉-1`, ascending.
    pub fn momentum_lattice(&self, cfg: &PhysicalConfig) -> Vec<f64> {
        let n = self.len() as i64;
        let dp = self.momentum_spacing(cfg);
        (-(n / 2)..(n - n / 2)).map(|k| k as f64 * dp).collect()
    }

    pub fn momentum_spacing(&self, cfg: &PhysicalConfig) -> f64 {
        2.0 * std::f64::consts::PI * cfg.hbar / self.period()
    }
}

/// Physical constants of a model, in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    pub hbar: f64,
    pub force: f64,
    pub mass: f64,
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        PhysicalConfig {
            hbar: 1.0,
            force: 1.0,
            mass: 1.0,
        }
    }
}

impl PhysicalConfig {
    pub fn new(hbar: f64, force: f64, mass: f64) -> Result<Self> {
        let cfg = PhysicalConfig { hbar, force, mass };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "hbar must be positive, got {}",
                self.hbar
            )));
        }
        if !(self.mass > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mass must be positive, got {}",
                self.mass
            )));
        }
        if !self.force.is_finite() {
            return Err(Error::InvalidConfig("force must be finite".into()));
        }
        Ok(())
    }
}

/// Name of the basis a vector or matrix is expressed in.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisTag(String);

impl BasisTag {
    pub fn new(name: impl Into<String>) -> Self {
        BasisTag(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn position() -> Self {
        BasisTag::new(POSITION)
    }
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for BasisTag {
    fn from(s: &str) -> Self {
        BasisTag::new(s)
    }
}

/// Complex amplitudes in a tagged basis, with the quadrature weight of each component.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: BasisTag,
    amplitudes: DVector<C64>,
    weights: Vec<f64>,
}

impl StateVector {
    pub fn new(basis: BasisTag, amplitudes: DVector<C64>, weights: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: amplitudes.len(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::BadWeights("quadrature weights must be positive".into()));
        }
        Ok(StateVector {
            basis,
            amplitudes,
            weights,
        })
    }

    /// Wave function sampled on a grid (position representation).
    pub fn on_grid(grid: &Grid, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: amplitudes.len(),
            });
        }
        StateVector::new(BasisTag::position(), amplitudes, vec![grid.spacing(); grid.len()])
    }

    pub fn basis(&self) -> &BasisTag {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// `Σ |ψ_j|² w_j`.
    pub fn norm_sq(&self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| a.norm_sqr() * w)
            .sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sq() - 1.0).abs() <= tol
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sq().sqrt();
        if n > 0.0 {
            self.amplitudes /= C64::from(n);
        }
        self
    }

    /// Weighted inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .zip(&self.weights)
            .map(|((a, b), w)| a.conj() * b * *w)
            .sum())
    }

    /// Born probabilities `|ψ_j|² w_j`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| a.norm_sqr() * w)
            .collect()
    }

    fn check_same(&self, other: &StateVector) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::basis(&self.basis, &other.basis));
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }
}

/// Square complex matrix acting on amplitude vectors of a representation with uniform weight.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    label: String,
    basis: BasisTag,
    entries: DMatrix<C64>,
    weight: f64,
    hermitian: bool,
}

impl OperatorMatrix {
    /// General (not necessarily Hermitian) operator; the Hermitian flag is set
    /// when the matrix passes the Hermiticity tolerance.
    pub fn new(basis: BasisTag, entries: DMatrix<C64>, weight: f64) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        if !(weight > 0.0) {
            return Err(Error::BadWeights(format!(
                "representation weight must be positive, got {weight}"
            )));
        }
        let hermitian = hermitian_deviation(&entries) <= HERMITIAN_TOL;
        Ok(OperatorMatrix {
            label: "op".into(),
            basis,
            entries,
            weight,
            hermitian,
        })
    }

    /// Hermitian operator; fails if the matrix is not Hermitian to tolerance.
    pub fn hermitian(basis: BasisTag, entries: DMatrix<C64>, weight: f64) -> Result<Self> {
        let op = OperatorMatrix::new(basis, entries, weight)?;
        if !op.hermitian {
            return Err(Error::NotHermitian {
                deviation: op.hermitian_deviation(),
            });
        }
        Ok(op)
    }

    pub fn identity(basis: BasisTag, n: usize, weight: f64) -> Result<Self> {
        OperatorMatrix::hermitian(basis, DMatrix::identity(n, n), weight).map(|o| o.with_label("1"))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn basis(&self) -> &BasisTag {
        &self.basis
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// `max|G − G†| / max|G|`.
    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.entries)
    }

    fn check_compatible(&self, other: &OperatorMatrix) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::basis(&self.basis, &other.basis));
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Operator product `self · other`.
    pub fn product(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_compatible(other)?;
        OperatorMatrix::new(self.basis.clone(), &self.entries * &other.entries, self.weight)
            .map(|o| o.with_label(format!("{}{}", self.label, other.label)))
    }

    /// `self + other`.
    pub fn sum(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_compatible(other)?;
        OperatorMatrix::new(self.basis.clone(), &self.entries + &other.entries, self.weight)
            .map(|o| o.with_label(format!("{}+{}", self.label, other.label)))
    }

    pub fn scaled(&self, factor: C64) -> OperatorMatrix {
        let mut out = self.clone();
        out.entries *= factor;
        out.hermitian = hermitian_deviation(&out.entries) <= HERMITIAN_TOL;
        out
    }

    /// Polynomial `Σ c_k A^k` in this operator.
    pub fn polynomial(&self, coeffs: &[f64]) -> Result<OperatorMatrix> {
        let n = self.dim();
        let mut acc = DMatrix::<C64>::zeros(n, n);
        let mut power = DMatrix::<C64>::identity(n, n);
        for (k, c) in coeffs.iter().enumerate() {
            if k > 0 {
                power = &power * &self.entries;
            }
            acc += &power * C64::from(*c);
        }
        OperatorMatrix::new(self.basis.clone(), acc, self.weight).map(|o| o.with_label(format!("p({})", self.label)))
    }

    /// Max-entry norm of `[self, other]`.
    pub fn commutator_norm(&self, other: &OperatorMatrix) -> Result<f64> {
        self.check_compatible(other)?;
        let c = &self.entries * &other.entries - &other.entries * &self.entries;
        Ok(max_abs(&c))
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.basis() != &self.basis {
            return Err(Error::basis(&self.basis, state.basis()));
        }
        StateVector::new(
            self.basis.clone(),
            &self.entries * state.amplitudes(),
            state.weights().to_vec(),
        )
    }

    /// `⟨ψ|G|ψ⟩` with the representation weights.
    pub fn expectation(&self, state: &StateVector) -> Result<C64> {
        state.inner(&self.apply(state)?)
    }
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    max_abs(&(m - m.adjoint())) / scale
}

/// Density kernel `ρ(x, x')`; as an operator it acts with the representation weight.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: BasisTag,
    entries: DMatrix<C64>,
    weight: f64,
}

impl DensityMatrix {
    /// Pure state `ρ = |ψ⟩⟨ψ|`.
    pub fn pure(state: &StateVector) -> Result<Self> {
        make_density(&[(1.0, state.clone())])
    }

    pub fn basis(&self) -> &BasisTag {
        &self.basis
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Weighted trace `Σ ρ(x_j, x_j) w`.
    pub fn trace(&self) -> C64 {
        self.entries.trace() * self.weight
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        let op = &self.entries * C64::from(self.weight);
        (&op * &op).trace().re
    }

    /// The same object as an operator matrix acting on amplitude vectors.
    pub fn as_operator(&self) -> Result<OperatorMatrix> {
        OperatorMatrix::new(self.basis.clone(), &self.entries * C64::from(self.weight), self.weight)
            .map(|o| o.with_label("rho"))
    }

    /// Eigenvalues of `ρ` as an operator, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        let op = &self.entries * C64::from(self.weight);
        let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(op).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Linear combination `Σ c_i ρ_i` (used to test linearity in ρ).
    pub fn mix(parts: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
        let (_, first) = parts.first().ok_or_else(|| Error::BadWeights("empty mixture".into()))?;
        let mut entries = DMatrix::<C64>::zeros(first.dim(), first.dim());
        for (c, rho) in parts {
            if rho.basis != first.basis {
                return Err(Error::basis(&first.basis, &rho.basis));
            }
            entries += &rho.entries * C64::from(*c);
        }
        Ok(DensityMatrix {
            basis: first.basis.clone(),
            entries,
            weight: first.weight,
        })
    }
}

/// Mixture `ρ = Σ p_i |ψ_i⟩⟨ψ_i|` of normalized states in a common basis.
pub fn make_density(states: &[(f64, StateVector)]) -> Result<DensityMatrix> {
    let (_, first) = states
        .first()
        .ok_or_else(|| Error::BadWeights("empty mixture".into()))?;
    let total: f64 = states.iter().map(|(p, _)| *p).sum();
    if states.iter().any(|(p, _)| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::BadWeights(format!(
            "mixture weights must be non-negative and sum to 1 (sum = {total})"
        )));
    }
    let w = first.weights()[0];
    if first.weights().iter().any(|x| (x - w).abs() > 1e-12 * w) {
        return Err(Error::BadWeights(
            "density matrices need a uniform representation weight".into(),
        ));
    }
    let n = first.len();
    let mut entries = DMatrix::<C64>::zeros(n, n);
    for (p, psi) in states {
        if psi.basis() != first.basis() {
            return Err(Error::basis(first.basis(), psi.basis()));
        }
        if psi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: psi.len(),
            });
        }
        let a = psi.amplitudes();
        entries += a * a.adjoint() * C64::from(*p);
    }
    Ok(DensityMatrix {
        basis: first.basis().clone(),
        entries,
        weight: w,
    })
}

/// Position operator `diag(x_j)` on a grid.
pub fn make_position_operator(grid: &Grid) -> OperatorMatrix {
    let diag = DVector::from_iterator(grid.len(), grid.points().iter().map(|x| C64::from(*x)));
    OperatorMatrix::hermitian(BasisTag::position(), DMatrix::from_diagonal(&diag), grid.spacing())
        .expect("diagonal real matrix is Hermitian")
        .with_label("q")
}

/// Unitary discrete Fourier matrix `e^{i p_k x_j/ħ}/√n` (columns are plane waves).
pub(crate) fn fourier_modes(grid: &Grid, cfg: &PhysicalConfig) -> (Vec<f64>, DMatrix<C64>) {
    let p = grid.momentum_lattice(cfg);
    let n = grid.len();
    let norm = 1.0 / (n as f64).sqrt();
    let u = DMatrix::from_fn(n, n, |j, k| cis(p[k] * grid.points()[j] / cfg.hbar) * norm);
    (p, u)
}

/// Spectral momentum operator `−iħ d/dx` on the periodic grid.
pub fn make_momentum_operator(grid: &Grid, cfg: &PhysicalConfig) -> OperatorMatrix {
    let (p, u) = fourier_modes(grid, cfg);
    let diag = DVector::from_iterator(p.len(), p.iter().map(|x| C64::from(*x)));
    let m = &u * DMatrix::from_diagonal(&diag) * u.adjoint();
    let sym = (&m + m.adjoint()) * C64::from(0.5);
    OperatorMatrix::hermitian(BasisTag::position(), sym, grid.spacing())
        .expect("symmetrized matrix is Hermitian")
        .with_label("p")
}

/// Orthonormal eigenbasis of a Hermitian operator, with the c-variable lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    source: String,
    tag: BasisTag,
    representation: BasisTag,
    values: Vec<f64>,
    vectors: DMatrix<C64>,
    rep_weight: f64,
    measure: Vec<f64>,
    degenerate: bool,
}

impl EigenBasis {
    /// Assemble a basis from explicit eigenpairs. Columns must be orthonormal
    /// with respect to the representation weight; the gauge is fixed here.
    pub fn from_parts(
        source: impl Into<String>,
        representation: BasisTag,
        values: Vec<f64>,
        vectors: DMatrix<C64>,
        rep_weight: f64,
    ) -> Result<Self> {
        if vectors.ncols() != values.len() || !vectors.is_square() {
            return Err(Error::DimensionMismatch {
                expected: values.len(),
                found: vectors.ncols(),
            });
        }
        let source = source.into();
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let values: Vec<f64> = order.iter().map(|&k| values[k]).collect();
        let mut sorted = DMatrix::<C64>::zeros(vectors.nrows(), vectors.ncols());
        for (dst, &src) in order.iter().enumerate() {
            sorted.set_column(dst, &vectors.column(src));
        }
        fix_gauge(&mut sorted);
        let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let degenerate = values.windows(2).any(|w| w[1] - w[0] < DEGENERACY_GAP * scale);
        Ok(EigenBasis {
            tag: BasisTag::new(format!("eig({source})")),
            source,
            representation,
            measure: vec![1.0; values.len()],
            values,
            vectors: sorted,
            rep_weight,
            degenerate,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Tag of coefficient vectors expressed in this basis.
    pub fn tag(&self) -> &BasisTag {
        &self.tag
    }

    /// Tag of the representation the eigenvectors are written in.
    pub fn representation(&self) -> &BasisTag {
        &self.representation
    }

    /// Eigenvalues, ascending. These are the c-variable lattice.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvectors with unit weighted norm, one per column.
    pub fn vectors(&self) -> &DMatrix<C64> {
        &self.vectors
    }

    pub fn rep_weight(&self) -> f64 {
        self.rep_weight
    }

    /// Quadrature weight attached to each eigenvalue.
    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Replace the eigenvalue measure.
    pub fn with_measure(mut self, measure: Vec<f64>) -> Result<Self> {
        if measure.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: measure.len(),
            });
        }
        if measure.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::BadWeights("eigenvalue measure must be positive".into()));
        }
        self.measure = measure;
        Ok(self)
    }

    pub fn with_uniform_measure(self, h: f64) -> Result<Self> {
        let n = self.len();
        self.with_measure(vec![h; n])
    }

    /// Rename the source operator (and the basis tag derived from it).
    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self.tag = BasisTag::new(format!("eig({})", self.source));
        self
    }

    /// Delta-normalized eigenfunctions `u_k = v_k/√measure_k`.
    pub fn eigenfunctions(&self) -> DMatrix<C64> {
        let mut u = self.vectors.clone();
        for (k, mut col) in u.column_iter_mut().enumerate() {
            col /= C64::from(self.measure[k].sqrt());
        }
        u
    }

    /// Copy with column `k` multiplied by `e^{iφ_k}`; the gauge rule is not re-applied.
    pub fn regauged(&self, phases: &[f64]) -> Result<Self> {
        if phases.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: phases.len(),
            });
        }
        let mut out = self.clone();
        for (k, mut col) in out.vectors.column_iter_mut().enumerate() {
            col *= cis(phases[k]);
        }
        Ok(out)
    }

    /// `max|V†WV − I|`.
    pub fn orthonormality_deviation(&self) -> f64 {
        let g = self.vectors.adjoint() * &self.vectors * C64::from(self.rep_weight);
        max_abs(&(g - DMatrix::identity(self.len(), self.len())))
    }

    /// `max_k ‖A v_k − λ_k v_k‖ / ‖A‖` (max-entry norms).
    pub fn residual(&self, op: &OperatorMatrix) -> f64 {
        let av = op.entries() * &self.vectors;
        let scale = max_abs(op.entries()).max(f64::MIN_POSITIVE);
        (0..self.len())
            .map(|k| {
                let r = av.column(k) - self.vectors.column(k) * C64::from(self.values[k]);
                r.iter().fold(0.0_f64, |m, z| m.max(z.norm())) * self.rep_weight.sqrt()
            })
            .fold(0.0, f64::max)
            / scale
    }
}

/// Largest-magnitude component of each column made real and positive; ties go to the lowest index.
fn fix_gauge(v: &mut DMatrix<C64>) {
    for mut col in v.column_iter_mut() {
        let big = col.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        if big == 0.0 {
            continue;
        }
        let pivot = col
            .iter()
            .position(|z| z.norm() >= big * (1.0 - GAUGE_TIE_TOL))
            .expect("maximum exists");
        let z = col[pivot];
        col *= z.conj() / z.norm();
        col[pivot] = C64::new(col[pivot].re, 0.0);
    }
}

/// Eigendecomposition of a Hermitian operator: ascending eigenvalues, fixed gauge, unit measure.
pub fn eigendecompose(op: &OperatorMatrix) -> Result<EigenBasis> {
    let deviation = op.hermitian_deviation();
    if !op.is_hermitian() || deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    // Exact Hermitian input keeps the solver's real diagonal clean.
    let h = (op.entries() + op.entries().adjoint()) * C64::from(0.5);
    let eig = nalgebra::SymmetricEigen::new(h);
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let vectors = eig.eigenvectors / C64::from(op.weight().sqrt());
    EigenBasis::from_parts(op.label(), op.basis().clone(), values, vectors, op.weight())
}

/// Coefficients `A_k = Σ_j u*_k(x_j) ψ_j w_j` of a state in an eigenbasis.
pub fn coefficients(state: &StateVector, basis: &EigenBasis) -> Result<StateVector> {
    if state.basis() != basis.representation() {
        return Err(Error::basis(basis.representation(), state.basis()));
    }
    if state.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: state.len(),
        });
    }
    let weighted = DVector::from_iterator(
        state.len(),
        state.amplitudes().iter().zip(state.weights()).map(|(a, w)| a * *w),
    );
    let amps = basis.eigenfunctions().adjoint() * weighted;
    StateVector::new(basis.tag().clone(), amps, basis.measure().to_vec())
}

/// Inverse of [`coefficients`]: `ψ_j = Σ_k A_k u_k(x_j) w_k`.
pub fn reconstruct(coeffs: &StateVector, basis: &EigenBasis) -> Result<StateVector> {
    if coeffs.basis() != basis.tag() {
        return Err(Error::basis(basis.tag(), coeffs.basis()));
    }
    if coeffs.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: coeffs.len(),
        });
    }
    let weighted = DVector::from_iterator(
        coeffs.len(),
        coeffs.amplitudes().iter().zip(basis.measure()).map(|(a, w)| a * *w),
    );
    let psi = basis.eigenfunctions() * weighted;
    StateVector::new(
        basis.representation().clone(),
        psi,
        vec![basis.rep_weight(); basis.len()],
    )
}
