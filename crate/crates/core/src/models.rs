//! Canonical systems: the position/momentum pair, a particle under constant
//! force, the harmonic oscillator, and a few state builders.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hilbert::{
    coefficients, eigendecompose, fourier_modes, make_momentum_operator, make_position_operator, BasisTag, EigenBasis,
    Grid, OperatorMatrix, PhysicalConfig, StateVector,
};
use crate::quasidist::PhaseGrid;
use crate::transform::{compute_transform, TransformMatrix};

/// Boundary amplitude above which a Gaussian is considered clipped by the grid.
pub const CLIP_TOL: f64 = 1e-8;

/// Position eigenbasis with measure `Δ`: values are the grid points.
pub fn position_basis(grid: &Grid) -> EigenBasis {
    let n = grid.len();
    let v = DMatrix::<C64>::identity(n, n) / C64::from(grid.spacing().sqrt());
    EigenBasis::from_parts("q", BasisTag::position(), grid.points().to_vec(), v, grid.spacing())
        .and_then(|b| b.with_uniform_measure(grid.spacing()))
        .expect("position basis is well formed")
}

/// Momentum eigenbasis built from the Fourier modes, with measure `Δp`.
pub fn momentum_basis(grid: &Grid, cfg: &PhysicalConfig) -> EigenBasis {
    let (p, u) = fourier_modes(grid, cfg);
    let v = u / C64::from(grid.spacing().sqrt());
    EigenBasis::from_parts("p", BasisTag::position(), p, v, grid.spacing())
        .and_then(|b| b.with_uniform_measure(grid.momentum_spacing(cfg)))
        .expect("momentum basis is well formed")
}

/// Position and momentum bases with their transformation matrix `T(p,q)`.
pub fn qp_pair(grid: &Grid, cfg: &PhysicalConfig) -> Result<(EigenBasis, EigenBasis, TransformMatrix)> {
    cfg.validate()?;
    let q = position_basis(grid);
    let p = momentum_basis(grid, cfg);
    let t = compute_transform(&q, &p)?;
    Ok((q, p, t))
}

/// Two operators, their eigenbases and the transformation matrix between them.
#[derive(Debug, Clone)]
pub struct OperatorPair {
    pub a: OperatorMatrix,
    pub b: OperatorMatrix,
    pub basis_a: EigenBasis,
    pub basis_b: EigenBasis,
    pub transform: TransformMatrix,
}

impl OperatorPair {
    /// Eigendecompose both operators (unit measures).
    pub fn new(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<Self> {
        let basis_a = eigendecompose(a)?;
        let basis_b = eigendecompose(b)?;
        Self::from_bases(a, b, basis_a, basis_b)
    }

    pub fn from_bases(
        a: &OperatorMatrix,
        b: &OperatorMatrix,
        basis_a: EigenBasis,
        basis_b: EigenBasis,
    ) -> Result<Self> {
        let transform = compute_transform(&basis_a, &basis_b)?;
        Ok(OperatorPair {
            a: a.clone(),
            b: b.clone(),
            basis_a,
            basis_b,
            transform,
        })
    }

    /// The `(q, p)` pair on a grid.
    pub fn qp(grid: &Grid, cfg: &PhysicalConfig) -> Result<Self> {
        let (basis_a, basis_b, transform) = qp_pair(grid, cfg)?;
        Ok(OperatorPair {
            a: make_position_operator(grid),
            b: make_momentum_operator(grid, cfg),
            basis_a,
            basis_b,
            transform,
        })
    }

    /// `(A(α), B(β))` for a state in the common representation.
    pub fn coefficients(&self, state: &StateVector) -> Result<(StateVector, StateVector)> {
        Ok((coefficients(state, &self.basis_a)?, coefficients(state, &self.basis_b)?))
    }

    pub fn phase_grid(&self, hbar: f64) -> Result<PhaseGrid> {
        PhaseGrid::for_transform(&self.transform, hbar)
    }

    /// Copy with the eigenvector phases of both bases rotated.
    pub fn regauged(&self, phases_a: &[f64], phases_b: &[f64]) -> Result<Self> {
        let basis_a = self.basis_a.regauged(phases_a)?;
        let basis_b = self.basis_b.regauged(phases_b)?;
        Self::from_bases(&self.a, &self.b, basis_a, basis_b)
    }
}

/// Particle of mass `m` under a constant force `f`: `H = f·Q + P²/2m`.
#[derive(Debug, Clone)]
pub struct LinearForceSystem {
    cfg: PhysicalConfig,
    grid: Grid,
    q: OperatorMatrix,
    p: OperatorMatrix,
    h: OperatorMatrix,
}

impl LinearForceSystem {
    pub fn new(cfg: &PhysicalConfig, grid: &Grid) -> Result<Self> {
        cfg.validate()?;
        if cfg.force == 0.0 {
            return Err(Error::ZeroForce);
        }
        let q = make_position_operator(grid);
        let p = make_momentum_operator(grid, cfg);
        let kinetic = p.product(&p)?.scaled(C64::from(0.5 / cfg.mass));
        let h = q.scaled(C64::from(cfg.force)).sum(&kinetic)?;
        let h = OperatorMatrix::hermitian(h.basis().clone(), h.entries().clone(), h.weight())?.with_label("H");
        Ok(LinearForceSystem {
            cfg: *cfg,
            grid: grid.clone(),
            q,
            p,
            h,
        })
    }

    pub fn config(&self) -> &PhysicalConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn hamiltonian(&self) -> &OperatorMatrix {
        &self.h
    }

    pub fn position(&self) -> &OperatorMatrix {
        &self.q
    }

    pub fn momentum(&self) -> &OperatorMatrix {
        &self.p
    }

    /// Phase of `⟨β|p⟩`, the energy-momentum transformation entry: `(βp − p³/6m)/ħf`.
    pub fn analytic_momentum_phase(&self, beta: f64, p: f64) -> f64 {
        let c = &self.cfg;
        (beta * p - p.powi(3) / (6.0 * c.mass)) / (c.hbar * c.force)
    }

    pub fn energy_basis(&self) -> Result<EigenBasis> {
        eigendecompose(&self.h)
    }

    /// `(a, b) = (q, H)`.
    pub fn position_pair(&self) -> Result<OperatorPair> {
        OperatorPair::from_bases(&self.q, &self.h, position_basis(&self.grid), self.energy_basis()?)
    }

    /// `(a, b) = (p, H)`.
    pub fn momentum_pair(&self) -> Result<OperatorPair> {
        OperatorPair::from_bases(
            &self.p,
            &self.h,
            momentum_basis(&self.grid, &self.cfg),
            self.energy_basis()?,
        )
    }
}

pub fn linear_force_system(cfg: &PhysicalConfig, grid: &Grid) -> Result<LinearForceSystem> {
    LinearForceSystem::new(cfg, grid)
}

/// `H = P²/2m + mω²Q²/2`.
pub fn harmonic_oscillator(omega: f64, cfg: &PhysicalConfig, grid: &Grid) -> Result<OperatorMatrix> {
    cfg.validate()?;
    if !(omega > 0.0) {
        return Err(Error::InvalidConfig(format!("omega must be positive, got {omega}")));
    }
    let q = make_position_operator(grid);
    let p = make_momentum_operator(grid, cfg);
    let kinetic = p.product(&p)?.scaled(C64::from(0.5 / cfg.mass));
    let potential = q.product(&q)?.scaled(C64::from(0.5 * cfg.mass * omega * omega));
    let h = kinetic.sum(&potential)?;
    Ok(OperatorMatrix::hermitian(h.basis().clone(), h.entries().clone(), h.weight())?.with_label("H"))
}

/// Normalized `ψ(q) ∝ e^{−(q−q0)²/4σ² + ip0·q/ħ}`.
pub fn gaussian_state(q0: f64, p0: f64, sigma: f64, grid: &Grid, cfg: &PhysicalConfig) -> Result<StateVector> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidConfig(format!("sigma must be positive, got {sigma}")));
    }
    let amps = DVector::from_iterator(
        grid.len(),
        grid.points().iter().map(|&q| {
            let env = (-(q - q0).powi(2) / (4.0 * sigma * sigma)).exp();
            C64::from_polar(env, p0 * q / cfg.hbar)
        }),
    );
    let psi = StateVector::on_grid(grid, amps)?.normalized();
    let edge = psi.amplitudes()[0].norm().max(psi.amplitudes()[grid.len() - 1].norm());
    if !edge.is_finite() || edge > CLIP_TOL {
        return Err(Error::SupportClipped {
            boundary_amplitude: edge,
        });
    }
    Ok(psi)
}

/// Normalized state with uniformly random components, reproducible from `seed`.
pub fn random_state(grid: &Grid, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = DVector::from_fn(grid.len(), |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    StateVector::on_grid(grid, amps)
        .expect("grid-sized vector")
        .normalized()
}

/// Random Hermitian operator on a grid, reproducible from `seed`.
pub fn random_hermitian(grid: &Grid, seed: u64) -> OperatorMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.len();
    let m = DMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let h = (&m + m.adjoint()) * C64::from(0.5);
    OperatorMatrix::hermitian(BasisTag::position(), h, grid.spacing())
        .expect("symmetrized")
        .with_label("g")
}
