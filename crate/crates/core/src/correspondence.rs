//! Operators to c-functions, and the two ways of computing an expectation value.
//!
//! The Margenau-Hill c-function is `⟨α|g|β⟩ / T*(β,α)`, an entrywise ratio on
//! the eigenvalue lattices. Other families reweight its Fourier data by
//! `e^{−iθτħ/2}/Φ(θ,τ)`, the inverse of the factor applied to distributions,
//! so that `ΣΣ g·P·w·w` is unchanged.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{cis, fourier_modes, BasisTag, DensityMatrix, EigenBasis, Grid, OperatorMatrix, PhysicalConfig};
use crate::quasidist::{
    chirp_sum, lattice_field, lattice_masses, output_field, synthesize, EvalMode, FieldRole, Kernel, PhaseAxis,
    PhaseGrid, PhaseSpaceField, Provenance, MH_FAMILY, UNIFORM_TOL,
};
use crate::transform::TransformMatrix;

/// `|Φ|` below this cannot be divided by.
pub const KERNEL_ZERO_TOL: f64 = 1e-12;

/// A c-function together with the operator it represents.
#[derive(Debug, Clone, PartialEq)]
pub struct CFunction {
    field: PhaseSpaceField,
    source: String,
}

impl CFunction {
    pub fn field(&self) -> &PhaseSpaceField {
        &self.field
    }

    pub fn values(&self) -> &DMatrix<C64> {
        self.field.values()
    }

    pub fn family(&self) -> &str {
        self.field.family()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn into_field(self) -> PhaseSpaceField {
        self.field
    }
}

fn check_bases(g: &OperatorMatrix, basis_a: &EigenBasis, basis_b: &EigenBasis, t: &TransformMatrix) -> Result<()> {
    if g.basis() != basis_a.representation() {
        return Err(Error::basis(basis_a.representation(), g.basis()));
    }
    if basis_a.tag() != t.alpha_basis() {
        return Err(Error::basis(t.alpha_basis(), basis_a.tag()));
    }
    if basis_b.tag() != t.beta_basis() {
        return Err(Error::basis(t.beta_basis(), basis_b.tag()));
    }
    if g.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: g.dim(),
        });
    }
    Ok(())
}

/// `g_MH(α_j, β_k) = ⟨α_j|g|β_k⟩ / T*(β_k, α_j)`.
pub fn mh_cfunction(
    g: &OperatorMatrix,
    basis_a: &EigenBasis,
    basis_b: &EigenBasis,
    t: &TransformMatrix,
) -> Result<CFunction> {
    check_bases(g, basis_a, basis_b, t)?;
    t.require_nonsingular()?;
    let elems = basis_a.eigenfunctions().adjoint() * g.entries() * basis_b.eigenfunctions() * C64::from(g.weight());
    let tt = t.entries();
    let values = DMatrix::from_fn(t.dim(), t.dim(), |j, k| elems[(j, k)] / tt[(k, j)].conj());
    Ok(CFunction {
        field: lattice_field(FieldRole::CFunction, t, values, MH_FAMILY, g.label())?,
        source: g.label().into(),
    })
}

/// Kernel-class c-function from a lattice Margenau-Hill c-function.
pub fn cfunction_from_mh(gmh: &CFunction, grid: &PhaseGrid, kernel: &Kernel) -> Result<CFunction> {
    let f = gmh.field();
    f.expect_role(FieldRole::CFunction)?;
    if f.family() != MH_FAMILY || f.provenance().mode != EvalMode::Exact {
        return Err(Error::FamilyMismatch {
            cfunction: f.family().into(),
            distribution: MH_FAMILY.into(),
        });
    }
    let phi = grid.kernel_values(kernel);
    let (th, ta) = (grid.alpha().theta(), grid.beta().theta());
    for n in 0..th.len() {
        for m in 0..ta.len() {
            if phi[(n, m)].norm() < KERNEL_ZERO_TOL {
                return Err(Error::KernelZero {
                    theta: th[n],
                    tau: ta[m],
                });
            }
        }
    }
    let same = |x: &[f64], y: &[f64]| {
        x.len() == y.len() && x.iter().zip(y).all(|(u, v)| (u - v).abs() <= 1e-12 * u.abs().max(1.0))
    };
    if !same(f.alpha(), grid.alpha().lattice()) || !same(f.beta(), grid.beta().lattice()) {
        return Err(Error::AxesMismatch);
    }
    let g_mh = grid.alpha().dual() * f.values() * grid.beta().dual().transpose();
    let g = g_mh.component_mul(&grid.chirp(-1.0)).component_div(&phi);
    let field = output_field(
        FieldRole::CFunction,
        grid,
        synthesize(&g, grid, 1.0),
        Provenance {
            family: kernel.id().into(),
            mode: EvalMode::Spectral,
            pair: f.provenance().pair.clone(),
            source: gmh.source.clone(),
        },
    )?;
    Ok(CFunction {
        field,
        source: gmh.source.clone(),
    })
}

/// Wigner-type c-function on the grid's output axes.
pub fn wigner_cfunction(
    g: &OperatorMatrix,
    basis_a: &EigenBasis,
    basis_b: &EigenBasis,
    t: &TransformMatrix,
    grid: &PhaseGrid,
    mode: EvalMode,
) -> Result<CFunction> {
    let gmh = mh_cfunction(g, basis_a, basis_b, t)?;
    match mode {
        EvalMode::Spectral => cfunction_from_mh(&gmh, grid, &Kernel::wigner()),
        EvalMode::Direct => {
            let values = chirp_sum(
                &lattice_masses(gmh.field()),
                t.alpha_values(),
                t.beta_values(),
                grid.alpha().output(),
                grid.beta().output(),
                grid.hbar(),
                1.0,
            );
            let field = output_field(
                FieldRole::CFunction,
                grid,
                values,
                Provenance {
                    family: "wigner".into(),
                    mode: EvalMode::Direct,
                    pair: gmh.field().provenance().pair.clone(),
                    source: g.label().into(),
                },
            )?;
            Ok(CFunction {
                field,
                source: g.label().into(),
            })
        }
        EvalMode::Exact => Err(Error::InvalidConfig(
            "the Wigner-type c-function has no exact lattice mode".into(),
        )),
    }
}

/// C-function for an arbitrary kernel (spectral evaluation).
pub fn general_cfunction(
    g: &OperatorMatrix,
    basis_a: &EigenBasis,
    basis_b: &EigenBasis,
    t: &TransformMatrix,
    kernel: &Kernel,
    grid: &PhaseGrid,
) -> Result<CFunction> {
    cfunction_from_mh(&mh_cfunction(g, basis_a, basis_b, t)?, grid, kernel)
}

/// `Tr[gρ]` with the representation weight.
pub fn expectation_trace(g: &OperatorMatrix, rho: &DensityMatrix) -> Result<C64> {
    if g.basis() != rho.basis() {
        return Err(Error::basis(g.basis(), rho.basis()));
    }
    if g.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: rho.dim(),
        });
    }
    Ok((g.entries() * rho.entries()).trace() * rho.weight())
}

/// `ΣΣ g(α,β)·P(α,β)·wα·wβ`.
pub fn expectation_phase_space(gc: &CFunction, p: &PhaseSpaceField) -> Result<C64> {
    gc.field().expect_role(FieldRole::CFunction)?;
    p.expect_role(FieldRole::Distribution)?;
    if !gc.field().same_axes(p) {
        return Err(Error::AxesMismatch);
    }
    if gc.family() != p.family() {
        return Err(Error::FamilyMismatch {
            cfunction: gc.family().into(),
            distribution: p.family().into(),
        });
    }
    let (wa, wb) = (p.alpha_weights(), p.beta_weights());
    let mut acc = C64::from(0.0);
    for j in 0..wb.len() {
        for i in 0..wa.len() {
            acc += gc.values()[(i, j)] * p.values()[(i, j)] * (wa[i] * wb[j]);
        }
    }
    Ok(acc)
}

/// Terms with `|ĝ·Φ|` below this fraction of the largest are skipped by [`quantize_qp`].
pub const QUANTIZE_SKIP: f64 = 1e-15;

/// Operator with the given classical symbol on the `(q, p)` lattice:
/// `G = ΣΣ ĝ(θ,τ)·Φ(θ,τ)·e^{i(θQ+τP)} dθ dτ`.
pub fn quantize_qp(classical: &PhaseSpaceField, kernel: &Kernel, cfg: &PhysicalConfig) -> Result<OperatorMatrix> {
    let (qs, ps) = (classical.alpha(), classical.beta());
    let uniform = |x: &[f64]| {
        x.len() >= 2 && {
            let d = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
            x.windows(2).all(|w| ((w[1] - w[0]) - d).abs() <= UNIFORM_TOL * d.abs())
        }
    };
    if !uniform(qs) || !uniform(ps) {
        return Err(Error::AxesNotUniform);
    }
    let n = qs.len();
    let grid = Grid::new(n, qs[0], qs[1] - qs[0])?;
    let lattice = grid.momentum_lattice(cfg);
    if ps.len() != n
        || ps
            .iter()
            .zip(&lattice)
            .any(|(a, b)| (a - b).abs() > 1e-9 * b.abs().max(1.0))
    {
        return Err(Error::InvalidAxes(
            "β axis is not the momentum lattice of the α grid".into(),
        ));
    }
    let (ax, bx) = (PhaseAxis::for_lattice(qs)?, PhaseAxis::for_lattice(ps)?);
    let (dq, dp) = (ax.spacing(), bx.spacing());
    let (th, ta) = (ax.theta().to_vec(), bx.theta().to_vec());
    let c = dq * dp / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
    let ghat = ax.analysis().map(|z| z.conj())
        * classical.values()
        * bx.analysis().map(|z| z.conj()).transpose()
        * C64::from(c);
    let coef = DMatrix::from_fn(th.len(), ta.len(), |i, j| {
        ghat[(i, j)] * kernel.eval(th[i], ta[j], cfg.hbar) * (ax.dtheta() * bx.dtheta())
    });
    let cutoff = QUANTIZE_SKIP * coef.iter().fold(0.0_f64, |m, z| m.max(z.norm()));

    let (_, u) = fourier_modes(&grid, cfg);
    let q_diag: Vec<f64> = grid.points().to_vec();
    let p_op = crate::hilbert::make_momentum_operator(&grid, cfg);
    let q_op = crate::hilbert::make_position_operator(&grid);

    let rows: Vec<DMatrix<C64>> = (0..th.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = DMatrix::<C64>::zeros(n, n);
            for j in 0..ta.len() {
                let z = coef[(i, j)];
                if z.norm() <= cutoff {
                    continue;
                }
                acc += phase_point(th[i], ta[j], &q_diag, &lattice, &u, &q_op, &p_op) * z;
            }
            acc
        })
        .collect();
    let mut total = DMatrix::<C64>::zeros(n, n);
    for r in rows {
        total += r;
    }
    Ok(OperatorMatrix::new(BasisTag::position(), total, grid.spacing())?
        .with_label(format!("Q[{}]", classical.provenance().source)))
}

/// `e^{i(θQ+τP)}`.
fn phase_point(
    theta: f64,
    tau: f64,
    q: &[f64],
    p: &[f64],
    u: &DMatrix<C64>,
    q_op: &OperatorMatrix,
    p_op: &OperatorMatrix,
) -> DMatrix<C64> {
    let n = q.len();
    if tau == 0.0 {
        let d = nalgebra::DVector::from_iterator(n, q.iter().map(|x| cis(theta * x)));
        return DMatrix::from_diagonal(&d);
    }
    if theta == 0.0 {
        let d = nalgebra::DVector::from_iterator(n, p.iter().map(|x| cis(tau * x)));
        return u * DMatrix::from_diagonal(&d) * u.adjoint();
    }
    let h = q_op.entries() * C64::from(theta) + p_op.entries() * C64::from(tau);
    let eig = nalgebra::SymmetricEigen::new(h);
    let d = nalgebra::DVector::from_iterator(n, eig.eigenvalues.iter().map(|l| cis(*l)));
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
}
