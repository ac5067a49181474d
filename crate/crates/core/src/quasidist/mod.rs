//! Joint quasi-distributions of two operators.
//!
//! The Margenau-Hill distribution is an exact product on the eigenvalue
//! lattices. Every other member of the kernel class is obtained from it
//! through its characteristic function
//! `M_Φ(θ,τ) = Φ(θ,τ)·e^{iθτħ/2}·M_MH(θ,τ)` on the working grid, followed by
//! an inverse transform onto the output axes. The Wigner-type distribution
//! (`Φ ≡ 1`) also has a literal double-sum evaluator.

mod field;
mod grid;
mod kernel;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

pub use field::{EvalMode, FieldRole, Marginal, PhaseSpaceField, Provenance};
pub use grid::{PhaseAxis, PhaseGrid, MAX_REFINE, OVERSAMPLE, UNIFORM_TOL};
pub use kernel::{Kernel, KernelTable};

use crate::error::{Error, Result};
use crate::hilbert::{
    cis, coefficients, eigendecompose, max_abs, DensityMatrix, EigenBasis, OperatorMatrix, StateVector,
};
use crate::transform::{compute_transform, TransformMatrix};

pub const MH_FAMILY: &str = "margenau-hill";

pub(crate) fn check_pair(a: &StateVector, b: &StateVector, t: &TransformMatrix) -> Result<()> {
    if a.basis() != t.alpha_basis() {
        return Err(Error::basis(t.alpha_basis(), a.basis()));
    }
    if b.basis() != t.beta_basis() {
        return Err(Error::basis(t.beta_basis(), b.basis()));
    }
    if a.len() != t.dim() || b.len() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: a.len().max(b.len()),
        });
    }
    Ok(())
}

pub(crate) fn pair_label(t: &TransformMatrix) -> String {
    format!("{},{}", t.alpha_basis(), t.beta_basis())
}

pub(crate) fn lattice_field(
    role: FieldRole,
    t: &TransformMatrix,
    values: DMatrix<C64>,
    family: &str,
    source: &str,
) -> Result<PhaseSpaceField> {
    PhaseSpaceField::new(
        role,
        (t.alpha_values().to_vec(), t.alpha_weights().to_vec()),
        (t.beta_values().to_vec(), t.beta_weights().to_vec()),
        values,
        Provenance {
            family: family.into(),
            mode: EvalMode::Exact,
            pair: pair_label(t),
            source: source.into(),
        },
    )
}

/// `P_MH(α_j, β_k) = A*(α_j)·T*(β_k, α_j)·B(β_k)` on the eigenvalue lattices.
pub fn mh_distribution(a: &StateVector, b: &StateVector, t: &TransformMatrix) -> Result<PhaseSpaceField> {
    check_pair(a, b, t)?;
    let (aa, bb, tt) = (a.amplitudes(), b.amplitudes(), t.entries());
    let values = DMatrix::from_fn(t.dim(), t.dim(), |j, k| aa[j].conj() * tt[(k, j)].conj() * bb[k]);
    lattice_field(FieldRole::Distribution, t, values, MH_FAMILY, "state")
}

/// Margenau-Hill distribution of a density matrix, `⟨β|ρ|α⟩⟨α|β⟩`. Linear in `ρ`.
pub fn mh_distribution_from_density(
    rho: &DensityMatrix,
    basis_a: &EigenBasis,
    basis_b: &EigenBasis,
    t: &TransformMatrix,
) -> Result<PhaseSpaceField> {
    if rho.basis() != basis_a.representation() {
        return Err(Error::basis(basis_a.representation(), rho.basis()));
    }
    if basis_a.tag() != t.alpha_basis() || basis_b.tag() != t.beta_basis() {
        return Err(Error::basis(t.alpha_basis(), basis_a.tag()));
    }
    let w = C64::from(rho.weight() * rho.weight());
    let r = basis_b.eigenfunctions().adjoint() * rho.entries() * basis_a.eigenfunctions() * w;
    let tt = t.entries();
    let values = DMatrix::from_fn(t.dim(), t.dim(), |j, k| r[(k, j)] * tt[(k, j)].conj());
    lattice_field(FieldRole::Distribution, t, values, MH_FAMILY, "density")
}

/// `P·wα·wβ`: probability-like masses of a lattice field.
pub(crate) fn lattice_masses(p: &PhaseSpaceField) -> DMatrix<C64> {
    DMatrix::from_fn(p.alpha().len(), p.beta().len(), |j, k| {
        p.values()[(j, k)] * (p.alpha_weights()[j] * p.beta_weights()[k])
    })
}

fn check_on_lattice(p: &PhaseSpaceField, grid: &PhaseGrid) -> Result<()> {
    let same = |x: &[f64], y: &[f64]| {
        x.len() == y.len() && x.iter().zip(y).all(|(u, v)| (u - v).abs() <= 1e-12 * u.abs().max(1.0))
    };
    if !same(p.alpha(), grid.alpha().lattice()) || !same(p.beta(), grid.beta().lattice()) {
        return Err(Error::AxesMismatch);
    }
    Ok(())
}

/// `M_MH(θ,τ) = Σ e^{iθα+iτβ} P_MH w w` on the working grid.
pub fn mh_characteristic(mh: &PhaseSpaceField, grid: &PhaseGrid) -> Result<DMatrix<C64>> {
    check_on_lattice(mh, grid)?;
    Ok(grid.alpha().analysis() * lattice_masses(mh) * grid.beta().analysis().transpose())
}

/// `(dθdτ/4π²)·Σ e^{−iθα−iτβ} M(θ,τ)` onto the output axes.
pub(crate) fn synthesize(m: &DMatrix<C64>, grid: &PhaseGrid, sign: f64) -> DMatrix<C64> {
    let c = grid.alpha().dtheta() * grid.beta().dtheta() / (4.0 * PI * PI);
    grid.alpha().synthesis(sign) * m * grid.beta().synthesis(sign).transpose() * C64::from(c)
}

pub(crate) fn output_field(
    role: FieldRole,
    grid: &PhaseGrid,
    values: DMatrix<C64>,
    provenance: Provenance,
) -> Result<PhaseSpaceField> {
    let (a, b) = (grid.alpha(), grid.beta());
    PhaseSpaceField::new(
        role,
        (a.output().to_vec(), vec![a.spacing(); a.output().len()]),
        (b.output().to_vec(), vec![b.spacing(); b.output().len()]),
        values,
        provenance,
    )
}

/// Kernel-class distribution from a lattice Margenau-Hill distribution.
pub fn distribution_from_mh(mh: &PhaseSpaceField, grid: &PhaseGrid, kernel: &Kernel) -> Result<PhaseSpaceField> {
    mh.expect_role(FieldRole::Distribution)?;
    if mh.family() != MH_FAMILY || mh.provenance().mode != EvalMode::Exact {
        return Err(Error::FamilyMismatch {
            cfunction: MH_FAMILY.into(),
            distribution: mh.family().into(),
        });
    }
    let m_mh = mh_characteristic(mh, grid)?;
    let m = m_mh
        .component_mul(&grid.kernel_values(kernel))
        .component_mul(&grid.chirp(1.0));
    output_field(
        FieldRole::Distribution,
        grid,
        synthesize(&m, grid, -1.0),
        Provenance {
            family: kernel.id().into(),
            mode: EvalMode::Spectral,
            pair: mh.provenance().pair.clone(),
            source: mh.provenance().source.clone(),
        },
    )
}

/// Chirp double sum `(1/πħ)·Σ_jk c_jk·e^{2is(x−xa_j)(y−xb_k)/ħ}` at all `(x, y)` pairs.
///
/// `s = −1` evaluates distributions, `s = +1` c-functions.
pub(crate) fn chirp_sum(
    c: &DMatrix<C64>,
    xa: &[f64],
    xb: &[f64],
    pa: &[f64],
    pb: &[f64],
    hbar: f64,
    s: f64,
) -> DMatrix<C64> {
    let k = 2.0 * s / hbar;
    let x = DMatrix::from_fn(pa.len(), xb.len(), |a, j| cis(-k * pa[a] * xb[j]));
    let cp = DMatrix::from_fn(xa.len(), xb.len(), |i, j| c[(i, j)] * cis(k * xa[i] * xb[j]));
    let y = DMatrix::from_fn(xa.len(), pb.len(), |i, b| cis(-k * xa[i] * pb[b]));
    let mut r = x * cp.transpose() * y;
    let norm = 1.0 / (PI * hbar);
    for a in 0..pa.len() {
        for b in 0..pb.len() {
            r[(a, b)] *= cis(k * pa[a] * pb[b]) * norm;
        }
    }
    r
}

/// Wigner-type distribution (`Φ ≡ 1`) on the grid's output axes.
pub fn wigner_distribution(
    a: &StateVector,
    b: &StateVector,
    t: &TransformMatrix,
    grid: &PhaseGrid,
    mode: EvalMode,
) -> Result<PhaseSpaceField> {
    let mh = mh_distribution(a, b, t)?;
    match mode {
        EvalMode::Spectral => distribution_from_mh(&mh, grid, &Kernel::wigner()),
        EvalMode::Direct => {
            check_on_lattice(&mh, grid)?;
            let values = chirp_sum(
                &lattice_masses(&mh),
                t.alpha_values(),
                t.beta_values(),
                grid.alpha().output(),
                grid.beta().output(),
                grid.hbar(),
                -1.0,
            );
            output_field(
                FieldRole::Distribution,
                grid,
                values,
                Provenance {
                    family: "wigner".into(),
                    mode: EvalMode::Direct,
                    pair: pair_label(t),
                    source: "state".into(),
                },
            )
        }
        EvalMode::Exact => Err(Error::InvalidConfig(
            "the Wigner-type distribution has no exact lattice mode".into(),
        )),
    }
}

/// Distribution for an arbitrary kernel (spectral evaluation).
pub fn general_distribution(
    a: &StateVector,
    b: &StateVector,
    t: &TransformMatrix,
    kernel: &Kernel,
    grid: &PhaseGrid,
) -> Result<PhaseSpaceField> {
    distribution_from_mh(&mh_distribution(a, b, t)?, grid, kernel)
}

/// Weighted sum over β. Real part in `values`, worst imaginary residue in `max_imag`.
pub fn marginal_alpha(p: &PhaseSpaceField) -> Result<Marginal> {
    p.expect_role(FieldRole::Distribution)?;
    Ok(field::marginal_from(p.alpha(), p.alpha_sums()))
}

/// Weighted sum over α.
pub fn marginal_beta(p: &PhaseSpaceField) -> Result<Marginal> {
    p.expect_role(FieldRole::Distribution)?;
    Ok(field::marginal_from(p.beta(), p.beta_sums()))
}

fn lattice_probabilities(
    p: &PhaseSpaceField,
    axis: &PhaseAxis,
    sums: Vec<C64>,
    out: &[f64],
    weights: &[f64],
) -> Marginal {
    let on_lattice = out.len() == axis.lattice().len()
        && out
            .iter()
            .zip(axis.lattice())
            .all(|(u, v)| (u - v).abs() <= 1e-12 * u.abs().max(1.0))
        && p.provenance().mode == EvalMode::Exact;
    let masses: Vec<C64> = if on_lattice {
        sums.iter().zip(weights).map(|(s, w)| s * *w).collect()
    } else {
        axis.project(&sums)
    };
    field::marginal_from(axis.lattice(), masses)
}

/// α-marginal as probabilities on the eigenvalue lattice (`|A(α_j)|²·w_j` for marginal-preserving kernels).
pub fn lattice_marginal_alpha(p: &PhaseSpaceField, grid: &PhaseGrid) -> Result<Marginal> {
    p.expect_role(FieldRole::Distribution)?;
    check_axes(p, grid)?;
    Ok(lattice_probabilities(
        p,
        grid.alpha(),
        p.alpha_sums(),
        p.alpha(),
        p.alpha_weights(),
    ))
}

/// β-marginal as probabilities on the eigenvalue lattice.
pub fn lattice_marginal_beta(p: &PhaseSpaceField, grid: &PhaseGrid) -> Result<Marginal> {
    p.expect_role(FieldRole::Distribution)?;
    check_axes(p, grid)?;
    Ok(lattice_probabilities(
        p,
        grid.beta(),
        p.beta_sums(),
        p.beta(),
        p.beta_weights(),
    ))
}

fn check_axes(p: &PhaseSpaceField, grid: &PhaseGrid) -> Result<()> {
    if p.provenance().mode == EvalMode::Exact {
        return check_on_lattice(p, grid);
    }
    let same = |x: &[f64], y: &[f64]| {
        x.len() == y.len() && x.iter().zip(y).all(|(u, v)| (u - v).abs() <= 1e-12 * u.abs().max(1.0))
    };
    if !same(p.alpha(), grid.alpha().output()) || !same(p.beta(), grid.beta().output()) {
        return Err(Error::AxesMismatch);
    }
    Ok(())
}

fn mean_spacing(x: &[f64]) -> f64 {
    if x.len() < 2 {
        1.0
    } else {
        (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64
    }
}

/// `M(θ,τ) = ΣΣ e^{iθα+iτβ} P(α,β) wα wβ`.
pub fn characteristic_function(p: &PhaseSpaceField, theta: &[f64], tau: &[f64]) -> Result<PhaseSpaceField> {
    p.expect_role(FieldRole::Distribution)?;
    let fa = DMatrix::from_fn(theta.len(), p.alpha().len(), |n, i| cis(theta[n] * p.alpha()[i]));
    let fb = DMatrix::from_fn(tau.len(), p.beta().len(), |m, j| cis(tau[m] * p.beta()[j]));
    let values = fa * lattice_masses(p) * fb.transpose();
    let mut prov = p.provenance().clone();
    prov.source = format!("char({})", prov.source);
    PhaseSpaceField::new(
        FieldRole::CharFunction,
        (theta.to_vec(), vec![mean_spacing(theta); theta.len()]),
        (tau.to_vec(), vec![mean_spacing(tau); tau.len()]),
        values,
        prov,
    )
}

/// Deviation between `M_Φ` and `Φ·M_W` on the working grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelRelationReport {
    pub kernel: String,
    pub max_deviation: f64,
    pub max_abs_wigner: f64,
}

/// Both sides computed independently: each from its own distribution, then its characteristic function.
pub fn kernel_relation_check(
    a: &StateVector,
    b: &StateVector,
    t: &TransformMatrix,
    kernel: &Kernel,
    grid: &PhaseGrid,
) -> Result<KernelRelationReport> {
    let (th, ta) = (grid.alpha().theta(), grid.beta().theta());
    let m_phi = characteristic_function(&general_distribution(a, b, t, kernel, grid)?, th, ta)?;
    let m_w = characteristic_function(&wigner_distribution(a, b, t, grid, EvalMode::Spectral)?, th, ta)?;
    let rhs = m_w.values().component_mul(&grid.kernel_values(kernel));
    Ok(KernelRelationReport {
        kernel: kernel.id().into(),
        max_deviation: max_abs(&(m_phi.values() - rhs)),
        max_abs_wigner: max_abs(m_w.values()),
    })
}

/// Mass bookkeeping for a pair of commuting operators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseReport {
    pub commutator_norm: f64,
    /// `γ(α_j) = ⟨α_j|b|α_j⟩`.
    pub gamma: Vec<f64>,
    pub mh_off_mass: f64,
    pub mh_on_mass: f64,
    pub wigner_off_mass: f64,
    pub wigner_on_mass: f64,
}

impl CollapseReport {
    pub const MH_TOL: f64 = 1e-8;
    pub const WIGNER_TOL: f64 = 1e-4;

    pub fn mh_collapses(&self) -> bool {
        self.mh_off_mass <= Self::MH_TOL
    }

    pub fn wigner_collapses(&self) -> bool {
        self.wigner_off_mass <= Self::WIGNER_TOL
    }
}

/// Relative commutator size above which two operators are not treated as commuting.
pub const COMMUTING_TOL: f64 = 1e-10;

/// For commuting `a`, `b = γ(a)`: mass of `P_MH` and of the direct-sum Wigner-type
/// distribution at lattice points with `β_k ≠ γ(α_j)`.
pub fn commuting_collapse_check(
    a: &OperatorMatrix,
    b: &OperatorMatrix,
    state: &StateVector,
    hbar: f64,
) -> Result<CollapseReport> {
    let scale = (max_abs(a.entries()) * max_abs(b.entries())).max(f64::MIN_POSITIVE);
    let commutator_norm = a.commutator_norm(b)?;
    if commutator_norm > COMMUTING_TOL * scale {
        return Err(Error::NotCommuting { norm: commutator_norm });
    }
    let ba = eigendecompose(a)?;
    let bb = eigendecompose(b)?;
    let t = compute_transform(&ba, &bb)?;
    let ca = coefficients(state, &ba)?;
    let cb = coefficients(state, &bb)?;
    let mh = mh_distribution(&ca, &cb, &t)?;

    let u = ba.vectors();
    let gb = b.entries() * u;
    let gamma: Vec<f64> = (0..ba.len())
        .map(|j| (u.column(j).dotc(&gb.column(j)) * b.weight()).re)
        .collect();
    let bscale = bb.values().iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let on = |j: usize, k: usize| (bb.values()[k] - gamma[j]).abs() <= 1e-8 * bscale;

    let masses = lattice_masses(&mh);
    let wig = chirp_sum(&masses, ba.values(), bb.values(), ba.values(), bb.values(), hbar, -1.0);
    let (wa, wb) = (ba.measure(), bb.measure());
    let mut report = CollapseReport {
        commutator_norm,
        gamma: gamma.clone(),
        mh_off_mass: 0.0,
        mh_on_mass: 0.0,
        wigner_off_mass: 0.0,
        wigner_on_mass: 0.0,
    };
    for j in 0..ba.len() {
        for k in 0..bb.len() {
            let pm = masses[(j, k)].norm();
            let pw = wig[(j, k)].norm() * wa[j] * wb[k];
            if on(j, k) {
                report.mh_on_mass += pm;
                report.wigner_on_mass += pw;
            } else {
                report.mh_off_mass += pm;
                report.wigner_off_mass += pw;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{Grid, PhysicalConfig};
    use crate::models::{gaussian_state, OperatorPair};

    fn balanced(n: usize) -> Grid {
        let l = (2.0 * PI * n as f64).sqrt();
        Grid::over(n, -l / 2.0, l / 2.0).unwrap()
    }

    fn setup(n: usize, q0: f64, p0: f64) -> (OperatorPair, StateVector, StateVector, PhaseGrid) {
        let cfg = PhysicalConfig::default();
        let g = balanced(n);
        let pair = OperatorPair::qp(&g, &cfg).unwrap();
        let psi = gaussian_state(q0, p0, 0.5f64.sqrt(), &g, &cfg).unwrap();
        let (a, b) = pair.coefficients(&psi).unwrap();
        let grid = pair.phase_grid(cfg.hbar).unwrap();
        (pair, a, b, grid)
    }

    fn analytic_wigner(q: f64, p: f64, q0: f64, p0: f64) -> f64 {
        let s2 = 0.5;
        (-(q - q0).powi(2) / (2.0 * s2) - 2.0 * s2 * (p - p0).powi(2)).exp() / PI
    }

    #[test]
    fn kirkwood_form_on_qp() {
        let (pair, a, b, _) = setup(32, 0.4, -0.3);
        let p = mh_distribution(&a, &b, &pair.transform).unwrap();
        let qs = pair.basis_a.values();
        let ps = pair.basis_b.values();
        let dq = qs[1] - qs[0];
        // independent φ(p) = Σ e^{−ipq}ψ(q)Δ/√(2π)
        let phi: Vec<C64> = ps
            .iter()
            .map(|&pk| {
                qs.iter()
                    .zip(a.amplitudes().iter())
                    .map(|(&q, z)| cis(-pk * q) * z * dq)
                    .sum::<C64>()
                    / (2.0 * PI).sqrt()
            })
            .collect();
        for j in 0..32 {
            for k in 0..32 {
                let expect = a.amplitudes()[j].conj() * cis(qs[j] * ps[k]) * phi[k] / (2.0 * PI).sqrt();
                assert!((p.values()[(j, k)] - expect).norm() < 1e-10);
            }
        }
        let ma = marginal_alpha(&p).unwrap();
        let mb = marginal_beta(&p).unwrap();
        for j in 0..32 {
            assert!((ma.values[j] - a.amplitudes()[j].norm_sqr()).abs() < 1e-10);
            assert!((mb.values[j] - b.amplitudes()[j].norm_sqr()).abs() < 1e-10);
        }
        assert!(ma.max_imag < 1e-10 && mb.max_imag < 1e-10);
    }

    #[test]
    fn spectral_wigner_matches_gaussian() {
        let (q0, p0) = (0.5, -0.8);
        let (pair, a, b, grid) = setup(64, q0, p0);
        let w = wigner_distribution(&a, &b, &pair.transform, &grid, EvalMode::Spectral).unwrap();
        let mut err = 0.0_f64;
        for (i, &q) in w.alpha().iter().enumerate() {
            for (j, &p) in w.beta().iter().enumerate() {
                err = err.max((w.values()[(i, j)] - C64::from(analytic_wigner(q, p, q0, p0))).norm());
            }
        }
        assert!(err < 1e-6, "{err}");
        assert!((w.total() - C64::from(1.0)).norm() < 1e-10);
    }

    #[test]
    fn direct_and_spectral_agree_in_the_interior() {
        let (pair, a, b, grid) = setup(48, 0.2, 0.3);
        let s = wigner_distribution(&a, &b, &pair.transform, &grid, EvalMode::Spectral).unwrap();
        let d = wigner_distribution(&a, &b, &pair.transform, &grid, EvalMode::Direct).unwrap();
        let n = s.alpha().len();
        let mut err = 0.0_f64;
        for i in n / 4..3 * n / 4 {
            for j in n / 4..3 * n / 4 {
                err = err.max((s.values()[(i, j)] - d.values()[(i, j)]).norm());
            }
        }
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn kernel_reductions_on_qp() {
        let (pair, a, b, grid) = setup(32, -0.3, 0.6);
        let t = &pair.transform;
        let mh = mh_distribution(&a, &b, t).unwrap();
        let via = general_distribution(&a, &b, t, &Kernel::margenau_hill(), &grid).unwrap();
        assert!((via.values() - mh.values()).camax() < 1e-10);
        let conj = general_distribution(&a, &b, t, &Kernel::rihaczek(), &grid).unwrap();
        assert!((conj.values() - mh.values().map(|z| z.conj())).camax() < 1e-10);
        let w = wigner_distribution(&a, &b, t, &grid, EvalMode::Spectral).unwrap();
        let g = general_distribution(&a, &b, t, &Kernel::wigner(), &grid).unwrap();
        assert_eq!(w.values(), g.values());
    }

    #[test]
    fn gaussian_kernel_smooths_to_a_positive_gaussian() {
        let (q0, p0) = (0.3, 0.1);
        let (pair, a, b, grid) = setup(64, q0, p0);
        let sk = 0.9;
        let p = general_distribution(&a, &b, &pair.transform, &Kernel::gaussian(sk).unwrap(), &grid).unwrap();
        let vq = 0.5 + sk * sk / 2.0;
        let vp = 0.5 + 1.0 / (2.0 * sk * sk);
        let mut err = 0.0_f64;
        for (i, &q) in p.alpha().iter().enumerate() {
            for (j, &pp) in p.beta().iter().enumerate() {
                let expect = (-(q - q0).powi(2) / (2.0 * vq) - (pp - p0).powi(2) / (2.0 * vp)).exp()
                    / (2.0 * PI * (vq * vp).sqrt());
                err = err.max((p.values()[(i, j)] - C64::from(expect)).norm());
            }
        }
        assert!(err < 1e-6, "{err}");
        assert!(p.min_real() >= -1e-8);
    }

    #[test]
    fn kernel_relation_holds() {
        let (pair, a, b, grid) = setup(32, 0.0, 0.5);
        for k in [
            Kernel::wigner(),
            Kernel::margenau_hill(),
            Kernel::gaussian(1.3).unwrap(),
        ] {
            let r = kernel_relation_check(&a, &b, &pair.transform, &k, &grid).unwrap();
            assert!(r.max_deviation < 1e-6, "{} {}", r.kernel, r.max_deviation);
        }
    }

    #[test]
    fn characteristic_function_moments() {
        let (pair, a, b, grid) = setup(32, 0.3, 0.0);
        let p = wigner_distribution(&a, &b, &pair.transform, &grid, EvalMode::Spectral).unwrap();
        let h = 1e-4;
        let m = characteristic_function(&p, &[-h, 0.0, h], &[0.0]).unwrap();
        assert!((m.values()[(1, 0)] - C64::from(1.0)).norm() < 1e-8);
        let deriv = (m.values()[(2, 0)] - m.values()[(0, 0)]) / C64::new(0.0, 2.0 * h);
        let mean: f64 = a
            .amplitudes()
            .iter()
            .zip(a.weights())
            .zip(pair.basis_a.values())
            .map(|((z, w), x)| z.norm_sqr() * w * x)
            .sum();
        assert!((deriv.re - mean).abs() < 1e-4);
        assert!(matches!(
            characteristic_function(&m, &[0.0], &[0.0]),
            Err(Error::WrongRole { .. })
        ));
    }

    #[test]
    fn commuting_pair_collapses_for_mh() {
        let cfg = PhysicalConfig::default();
        let g = Grid::over(16, 0.5, 3.0).unwrap();
        let a = crate::hilbert::make_position_operator(&g);
        let b = a.polynomial(&[0.3, -1.0, 0.5, 0.2]).unwrap();
        let psi = crate::models::random_state(&g, 11);
        let r = commuting_collapse_check(&a, &b, &psi, cfg.hbar).unwrap();
        assert!(r.mh_collapses(), "{}", r.mh_off_mass);
        assert!((r.mh_on_mass - 1.0).abs() < 1e-10);
        let p = crate::hilbert::make_momentum_operator(&g, &cfg);
        assert!(matches!(
            commuting_collapse_check(&a, &p, &psi, 1.0),
            Err(Error::NotCommuting { .. })
        ));
    }
}
