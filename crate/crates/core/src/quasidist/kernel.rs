use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::cis;

type KernelFn = dyn Fn(f64, f64, f64) -> C64 + Send + Sync;

#[derive(Clone)]
enum Shape {
    Unit,
    /// `e^{i·sign·θτħ/2}`
    Chirp(f64),
    /// `e^{−ħ(θ²σ²+τ²/σ²)/4}`
    Gaussian(f64),
    Table(Arc<KernelTable>),
    Custom(Arc<KernelFn>),
}

/// Kernel `Φ(θ,τ)` selecting a member of the distribution class.
///
/// Evaluation takes `ħ` so that built-in kernels stay unit-agnostic.
#[derive(Clone)]
pub struct Kernel {
    id: String,
    shape: Shape,
    scale: f64,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("id", &self.id)
            .field("scale", &self.scale)
            .finish()
    }
}

impl Kernel {
    /// `Φ ≡ 1`.
    pub fn wigner() -> Self {
        Kernel {
            id: "wigner".into(),
            shape: Shape::Unit,
            scale: 1.0,
        }
    }

    /// `Φ = e^{−iθτħ/2}`, the kernel whose distribution is `A*(α)T*(β,α)B(β)`.
    pub fn margenau_hill() -> Self {
        Kernel {
            id: "margenau-hill".into(),
            shape: Shape::Chirp(-1.0),
            scale: 1.0,
        }
    }

    /// `Φ = e^{+iθτħ/2}`; gives the complex conjugate of the Margenau-Hill distribution for the qp pair.
    pub fn rihaczek() -> Self {
        Kernel {
            id: "rihaczek".into(),
            shape: Shape::Chirp(1.0),
            scale: 1.0,
        }
    }

    /// Gaussian smoothing kernel `e^{−ħ(θ²σ²+τ²/σ²)/4}`; positive for the qp pair.
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "gaussian kernel width must be positive, got {sigma}"
            )));
        }
        Ok(Kernel {
            id: format!("gaussian({sigma})"),
            shape: Shape::Gaussian(sigma),
            scale: 1.0,
        })
    }

    pub fn custom(id: impl Into<String>, f: impl Fn(f64, f64, f64) -> C64 + Send + Sync + 'static) -> Self {
        Kernel {
            id: id.into(),
            shape: Shape::Custom(Arc::new(f)),
            scale: 1.0,
        }
    }

    pub fn table(id: impl Into<String>, table: KernelTable) -> Self {
        Kernel {
            id: id.into(),
            shape: Shape::Table(Arc::new(table)),
            scale: 1.0,
        }
    }

    /// Multiply the kernel by a constant. Any factor other than 1 breaks normalization.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.scale *= factor;
        if factor != 1.0 {
            self.id = format!("{}*{}", self.id, factor);
        }
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// `Φ(θ,τ)`.
    pub fn eval(&self, theta: f64, tau: f64, hbar: f64) -> C64 {
        let v = match &self.shape {
            Shape::Unit => C64::from(1.0),
            Shape::Chirp(s) => cis(s * theta * tau * hbar / 2.0),
            Shape::Gaussian(sigma) => {
                let s2 = sigma * sigma;
                C64::from((-hbar * (theta * theta * s2 + tau * tau / s2) / 4.0).exp())
            }
            Shape::Table(t) => t.interpolate(theta, tau),
            Shape::Custom(f) => f(theta, tau, hbar),
        };
        v * self.scale
    }

    /// `|Φ(0,0) − 1|`.
    pub fn normalization_error(&self, hbar: f64) -> f64 {
        (self.eval(0.0, 0.0, hbar) - 1.0).norm()
    }

    /// True iff `Φ(θ,0) = Φ(0,τ) = 1` on the given samples, within `tol`.
    pub fn is_marginal_preserving(&self, thetas: &[f64], taus: &[f64], hbar: f64, tol: f64) -> bool {
        thetas.iter().all(|&t| (self.eval(t, 0.0, hbar) - 1.0).norm() <= tol)
            && taus.iter().all(|&t| (self.eval(0.0, t, hbar) - 1.0).norm() <= tol)
    }
}

/// Tabulated kernel on a uniform `(θ,τ)` grid, bilinearly interpolated; zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    theta0: f64,
    dtheta: f64,
    tau0: f64,
    dtau: f64,
    /// Row-major, τ fastest.
    values: Vec<C64>,
    n_theta: usize,
    n_tau: usize,
}

impl KernelTable {
    pub fn new(thetas: &[f64], taus: &[f64], values: Vec<C64>) -> Result<Self> {
        let axis = |x: &[f64]| -> Result<(f64, f64)> {
            if x.len() < 2 {
                return Err(Error::InvalidAxes(
                    "kernel table needs at least 2 samples per axis".into(),
                ));
            }
            let d = x[1] - x[0];
            if !(d > 0.0) || x.windows(2).any(|w| ((w[1] - w[0]) - d).abs() > 1e-9 * d) {
                return Err(Error::AxesNotUniform);
            }
            Ok((x[0], d))
        };
        let (theta0, dtheta) = axis(thetas)?;
        let (tau0, dtau) = axis(taus)?;
        if values.len() != thetas.len() * taus.len() {
            return Err(Error::DimensionMismatch {
                expected: thetas.len() * taus.len(),
                found: values.len(),
            });
        }
        Ok(KernelTable {
            theta0,
            dtheta,
            tau0,
            dtau,
            values,
            n_theta: thetas.len(),
            n_tau: taus.len(),
        })
    }

    fn at(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.n_tau + j]
    }

    pub fn interpolate(&self, theta: f64, tau: f64) -> C64 {
        let x = (theta - self.theta0) / self.dtheta;
        let y = (tau - self.tau0) / self.dtau;
        let eps = 1e-9;
        if x < -eps || y < -eps || x > (self.n_theta - 1) as f64 + eps || y > (self.n_tau - 1) as f64 + eps {
            return C64::from(0.0);
        }
        let i = (x.floor().max(0.0) as usize).min(self.n_theta - 2);
        let j = (y.floor().max(0.0) as usize).min(self.n_tau - 2);
        let fx = (x - i as f64).clamp(0.0, 1.0);
        let fy = (y - j as f64).clamp(0.0, 1.0);
        self.at(i, j) * ((1.0 - fx) * (1.0 - fy))
            + self.at(i + 1, j) * (fx * (1.0 - fy))
            + self.at(i, j + 1) * ((1.0 - fx) * fy)
            + self.at(i + 1, j + 1) * (fx * fy)
    }
}
