//! Working `(θ,τ)` grids and the phase-space output axes conjugate to them.
//!
//! Each axis pairs a uniform frequency grid `θ_n = (n − K/2)·dθ` with an
//! output axis of spacing `h = 2π/(K·dθ)`, so that the synthesis matrix
//! `e^{−iθ_n x_a}` is a scaled unitary DFT. Sums over the output axis and
//! sums over the working grid then convert into each other without error.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::kernel::Kernel;
use crate::error::{Error, Result};
use crate::hilbert::cis;
use crate::transform::TransformMatrix;

/// Working-grid oversampling for non-uniform lattices.
pub const OVERSAMPLE: usize = 4;
/// Output spacing is at least `span / (MAX_REFINE·(N−1))`, which bounds `K` when gaps nearly vanish.
pub const MAX_REFINE: usize = 8;
/// Relative tolerance used to decide that a lattice is uniform.
pub const UNIFORM_TOL: f64 = 1e-9;

fn is_uniform(x: &[f64]) -> bool {
    let d = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    d > 0.0 && x.windows(2).all(|w| ((w[1] - w[0]) - d).abs() <= UNIFORM_TOL * d)
}

/// One axis of a phase-space grid: eigenvalue lattice, working frequencies and output points.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAxis {
    lattice: Vec<f64>,
    spacing: f64,
    dtheta: f64,
    theta: Vec<f64>,
    output: Vec<f64>,
    uniform: bool,
}

impl PhaseAxis {
    /// Default axis for an eigenvalue lattice. A uniform lattice is its own output axis.
    pub fn for_lattice(lattice: &[f64]) -> Result<Self> {
        check_lattice(lattice)?;
        let n = lattice.len();
        if is_uniform(lattice) {
            let h = (lattice[n - 1] - lattice[0]) / (n - 1) as f64;
            return Ok(Self::build(lattice, h, n, lattice.to_vec(), true));
        }
        let span = lattice[n - 1] - lattice[0];
        let min_gap = lattice.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let h = min_gap.max(span / (MAX_REFINE * (n - 1)) as f64);
        let m = (span / h - 1e-9).ceil() as usize + 1;
        let mut k = OVERSAMPLE * m;
        k += k % 2;
        let off = (k - m) / 2;
        let output = (0..k).map(|a| lattice[0] + (a as f64 - off as f64) * h).collect();
        Ok(Self::build(lattice, h, k, output, false))
    }

    /// Axis with a caller-chosen uniform output grid; its length sets the working-grid size.
    pub fn with_output(lattice: &[f64], output: &[f64]) -> Result<Self> {
        check_lattice(lattice)?;
        if output.len() < 2 {
            return Err(Error::InvalidAxes("output axis needs at least 2 points".into()));
        }
        if !is_uniform(output) {
            return Err(Error::AxesNotUniform);
        }
        let h = (output[output.len() - 1] - output[0]) / (output.len() - 1) as f64;
        Ok(Self::build(
            lattice,
            h,
            output.len(),
            output.to_vec(),
            is_uniform(lattice),
        ))
    }

    fn build(lattice: &[f64], h: f64, k: usize, output: Vec<f64>, uniform: bool) -> Self {
        let dtheta = 2.0 * std::f64::consts::PI / (k as f64 * h);
        let theta = (0..k).map(|n| (n as f64 - (k / 2) as f64) * dtheta).collect();
        PhaseAxis {
            lattice: lattice.to_vec(),
            spacing: h,
            dtheta,
            theta,
            output,
            uniform,
        }
    }

    pub fn lattice(&self) -> &[f64] {
        &self.lattice
    }

    /// Output-axis spacing `h` (also the output quadrature weight).
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn dtheta(&self) -> f64 {
        self.dtheta
    }

    /// Working frequencies.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn output(&self) -> &[f64] {
        &self.output
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Index of `θ = 0` in the working grid.
    pub fn zero_index(&self) -> usize {
        self.theta.len() / 2
    }

    /// `F[n,j] = e^{iθ_n x_j}` (working × lattice).
    pub fn analysis(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.theta.len(), self.lattice.len(), |n, j| {
            cis(self.theta[n] * self.lattice[j])
        })
    }

    /// `E[a,n] = e^{sign·iθ_n x_a}` (output × working).
    pub fn synthesis(&self, sign: f64) -> DMatrix<C64> {
        DMatrix::from_fn(self.output.len(), self.theta.len(), |a, n| {
            cis(sign * self.theta[n] * self.output[a])
        })
    }

    /// Dual frame `F̃` (working × lattice) used for c-function Fourier data.
    ///
    /// `(dθ/2π)·F̃ᵀF = I`, and constants on the lattice go to a spike at `θ = 0`.
    pub fn dual(&self) -> DMatrix<C64> {
        let f = self.analysis();
        let (k, n) = f.shape();
        let c = C64::from(2.0 * std::f64::consts::PI / self.dtheta);
        let fp = pinv(&f);
        // X = c·F⁺ + (c/N)·1·e0ᵀ(I − F F⁺)
        let resid_row = {
            let ffp = &f * &fp;
            let z = self.zero_index();
            DMatrix::from_fn(
                1,
                k,
                |_, m| if m == z { C64::from(1.0) } else { C64::from(0.0) } - ffp[(z, m)],
            )
        };
        let mut x = &fp * c;
        let corr = resid_row * (c / n as f64);
        for j in 0..n {
            for m in 0..k {
                x[(j, m)] += corr[(0, m)];
            }
        }
        x.transpose()
    }

    /// Lattice masses of a density sampled on the output axis, recovered through
    /// the exact inverse DFT and the lattice pseudo-inverse.
    pub fn project(&self, density: &[C64]) -> Vec<C64> {
        let e = self.synthesis(1.0);
        let d = nalgebra::DVector::from_column_slice(density);
        let spectrum = e.transpose() * d * C64::from(self.spacing);
        (pinv(&self.analysis()) * spectrum).iter().copied().collect()
    }
}

fn check_lattice(x: &[f64]) -> Result<()> {
    if x.len() < 2 {
        return Err(Error::InvalidAxes("lattice needs at least 2 points".into()));
    }
    if x.iter().any(|v| !v.is_finite()) || x.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidAxes("lattice must be finite and ascending".into()));
    }
    Ok(())
}

pub(crate) fn pinv(m: &DMatrix<C64>) -> DMatrix<C64> {
    let scale = m.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    m.clone()
        .pseudo_inverse(1e-13 * scale * m.nrows().max(m.ncols()) as f64)
        .expect("non-negative tolerance")
}

/// Pair of phase axes plus `ħ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    alpha: PhaseAxis,
    beta: PhaseAxis,
    hbar: f64,
}

impl PhaseGrid {
    pub fn new(alpha: PhaseAxis, beta: PhaseAxis, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) {
            return Err(Error::InvalidConfig(format!("hbar must be positive, got {hbar}")));
        }
        Ok(PhaseGrid { alpha, beta, hbar })
    }

    /// Default grid for the eigenvalue lattices of a transformation matrix.
    pub fn for_transform(t: &TransformMatrix, hbar: f64) -> Result<Self> {
        PhaseGrid::new(
            PhaseAxis::for_lattice(t.alpha_values())?,
            PhaseAxis::for_lattice(t.beta_values())?,
            hbar,
        )
    }

    /// Grid with caller-chosen uniform output axes.
    pub fn with_output(t: &TransformMatrix, alpha_out: &[f64], beta_out: &[f64], hbar: f64) -> Result<Self> {
        PhaseGrid::new(
            PhaseAxis::with_output(t.alpha_values(), alpha_out)?,
            PhaseAxis::with_output(t.beta_values(), beta_out)?,
            hbar,
        )
    }

    pub fn alpha(&self) -> &PhaseAxis {
        &self.alpha
    }

    pub fn beta(&self) -> &PhaseAxis {
        &self.beta
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `Φ(θ_n, τ_m)` on the working grid.
    pub fn kernel_values(&self, kernel: &Kernel) -> DMatrix<C64> {
        DMatrix::from_fn(self.alpha.theta.len(), self.beta.theta.len(), |n, m| {
            kernel.eval(self.alpha.theta[n], self.beta.theta[m], self.hbar)
        })
    }

    /// `e^{sign·iθτħ/2}` on the working grid.
    pub fn chirp(&self, sign: f64) -> DMatrix<C64> {
        DMatrix::from_fn(self.alpha.theta.len(), self.beta.theta.len(), |n, m| {
            cis(sign * self.alpha.theta[n] * self.beta.theta[m] * self.hbar / 2.0)
        })
    }

    /// Whether the kernel preserves marginals on this working grid.
    pub fn preserves_marginals(&self, kernel: &Kernel) -> bool {
        kernel.is_marginal_preserving(self.alpha.theta(), self.beta.theta(), self.hbar, 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_lattice_is_its_own_output() {
        let x: Vec<f64> = (0..8).map(|j| -2.0 + 0.5 * j as f64).collect();
        let ax = PhaseAxis::for_lattice(&x).unwrap();
        assert!(ax.is_uniform());
        assert_eq!(ax.output(), &x[..]);
        assert_eq!(ax.theta().len(), 8);
        assert_eq!(ax.theta()[ax.zero_index()], 0.0);
        // with unit spacing measure the dual is the plain weighted transform
        let plain = ax.analysis().map(|z| z.conj() * 0.5);
        assert!((ax.dual() - plain).camax() < 1e-12);
    }

    #[test]
    fn synthesis_is_scaled_unitary() {
        let x = [0.0, 0.3, 1.0, 1.1, 2.5];
        let ax = PhaseAxis::for_lattice(&x).unwrap();
        let e = ax.synthesis(-1.0);
        let k = ax.theta().len();
        let g = e.adjoint() * &e;
        assert!((g - DMatrix::identity(k, k) * C64::from(k as f64)).camax() < 1e-9 * k as f64);
        assert!(ax.output()[0] <= x[0] && *ax.output().last().unwrap() >= x[4]);
    }

    #[test]
    fn dual_frame_inverts_analysis() {
        let x = [-1.0, -0.2, 0.1, 0.9, 2.0, 2.2];
        let ax = PhaseAxis::for_lattice(&x).unwrap();
        let id = ax.dual().transpose() * ax.analysis() * C64::from(ax.dtheta() / (2.0 * std::f64::consts::PI));
        assert!((id - DMatrix::identity(6, 6)).camax() < 1e-10);
        let ones = ax.dual() * nalgebra::DVector::from_element(6, C64::from(1.0));
        let z = ax.zero_index();
        for (n, v) in ones.iter().enumerate() {
            let expect = if n == z {
                2.0 * std::f64::consts::PI / ax.dtheta()
            } else {
                0.0
            };
            assert!((v - C64::from(expect)).norm() < 1e-8, "{n} {v}");
        }
    }

    #[test]
    fn projection_recovers_lattice_masses() {
        let x = [-1.0, -0.2, 0.1, 0.9, 2.0, 2.2];
        let p = [0.1, 0.2, 0.05, 0.3, 0.15, 0.2];
        let ax = PhaseAxis::for_lattice(&x).unwrap();
        // band-limited density on the output axis with these lattice masses
        let spec = ax.analysis() * nalgebra::DVector::from_iterator(6, p.iter().map(|v| C64::from(*v)));
        let dens = ax.synthesis(-1.0) * spec * C64::from(ax.dtheta() / (2.0 * std::f64::consts::PI));
        let back = ax.project(dens.as_slice());
        for (b, v) in back.iter().zip(p) {
            assert!((b - C64::from(v)).norm() < 1e-10);
        }
    }

    #[test]
    fn custom_output_must_be_uniform() {
        let x = [0.0, 1.0, 2.0];
        assert!(matches!(
            PhaseAxis::with_output(&x, &[0.0, 1.0, 3.0]),
            Err(Error::AxesNotUniform)
        ));
        let ax = PhaseAxis::with_output(&x, &[-1.0, 0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(ax.theta().len(), 6);
        assert!(matches!(PhaseAxis::for_lattice(&[1.0]), Err(Error::InvalidAxes(_))));
    }
}
