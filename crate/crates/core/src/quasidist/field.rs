use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldRole {
    Distribution,
    CFunction,
    CharFunction,
}

impl fmt::Display for FieldRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldRole::Distribution => "distribution",
            FieldRole::CFunction => "cfunction",
            FieldRole::CharFunction => "charfunction",
        })
    }
}

/// How a field was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    /// Product form on the eigenvalue lattices (Margenau-Hill family only).
    Exact,
    /// Literal chirp-kernel double sum over the lattices.
    Direct,
    /// Route through characteristic functions on the working grid.
    #[default]
    Spectral,
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalMode::Exact => "exact",
            EvalMode::Direct => "direct",
            EvalMode::Spectral => "spectral",
        })
    }
}

/// Record of what produced a field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Provenance {
    /// Kernel id of the distribution family (`wigner`, `margenau-hill`, ...).
    pub family: String,
    pub mode: EvalMode,
    /// `"a,b"` operator names.
    pub pair: String,
    /// State or operator the field was built from.
    pub source: String,
}

/// Complex field over a 2D grid with quadrature weights on each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceField {
    role: FieldRole,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    alpha_weights: Vec<f64>,
    beta_weights: Vec<f64>,
    values: DMatrix<C64>,
    provenance: Provenance,
}

/// One marginal of a distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Marginal {
    pub axis: Vec<f64>,
    /// Real part of the weighted sum over the other axis.
    pub values: Vec<f64>,
    pub max_imag: f64,
}

impl PhaseSpaceField {
    pub fn new(
        role: FieldRole,
        (alpha, alpha_weights): (Vec<f64>, Vec<f64>),
        (beta, beta_weights): (Vec<f64>, Vec<f64>),
        values: DMatrix<C64>,
        provenance: Provenance,
    ) -> Result<Self> {
        if alpha.len() != alpha_weights.len() || beta.len() != beta_weights.len() {
            return Err(Error::InvalidAxes("axis and weight lengths differ".into()));
        }
        if values.shape() != (alpha.len(), beta.len()) {
            return Err(Error::DimensionMismatch {
                expected: alpha.len() * beta.len(),
                found: values.len(),
            });
        }
        for x in [&alpha, &beta] {
            if x.windows(2).any(|w| !(w[1] >= w[0])) {
                return Err(Error::InvalidAxes("axes must be ascending".into()));
            }
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidAxes("field values must be finite".into()));
        }
        Ok(PhaseSpaceField {
            role,
            alpha,
            beta,
            alpha_weights,
            beta_weights,
            values,
            provenance,
        })
    }

    pub fn role(&self) -> FieldRole {
        self.role
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn alpha_weights(&self) -> &[f64] {
        &self.alpha_weights
    }

    pub fn beta_weights(&self) -> &[f64] {
        &self.beta_weights
    }

    /// `values[(i, j)]` sits at `(alpha[i], beta[j])`.
    pub fn values(&self) -> &DMatrix<C64> {
        &self.values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn family(&self) -> &str {
        &self.provenance.family
    }

    pub fn expect_role(&self, role: FieldRole) -> Result<()> {
        if self.role != role {
            return Err(Error::WrongRole {
                expected: role.to_string(),
                found: self.role.to_string(),
            });
        }
        Ok(())
    }

    /// `Σ_ij values_ij · wα_i · wβ_j`.
    pub fn total(&self) -> C64 {
        let mut acc = C64::from(0.0);
        for (j, wb) in self.beta_weights.iter().enumerate() {
            for (i, wa) in self.alpha_weights.iter().enumerate() {
                acc += self.values[(i, j)] * (wa * wb);
            }
        }
        acc
    }

    pub fn min_real(&self) -> f64 {
        self.values.iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// True when both fields live on the same axes and weights (to `1e-12` relative).
    pub fn same_axes(&self, other: &PhaseSpaceField) -> bool {
        let close = |a: &[f64], b: &[f64]| {
            a.len() == b.len()
                && a.iter()
                    .zip(b)
                    .all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0))
        };
        close(&self.alpha, &other.alpha)
            && close(&self.beta, &other.beta)
            && close(&self.alpha_weights, &other.alpha_weights)
            && close(&self.beta_weights, &other.beta_weights)
    }

    /// Weighted sum over β at each α.
    pub fn alpha_sums(&self) -> Vec<C64> {
        (0..self.alpha.len())
            .map(|i| {
                (0..self.beta.len())
                    .map(|j| self.values[(i, j)] * self.beta_weights[j])
                    .sum()
            })
            .collect()
    }

    /// Weighted sum over α at each β.
    pub fn beta_sums(&self) -> Vec<C64> {
        (0..self.beta.len())
            .map(|j| {
                (0..self.alpha.len())
                    .map(|i| self.values[(i, j)] * self.alpha_weights[i])
                    .sum()
            })
            .collect()
    }
}

pub(crate) fn marginal_from(axis: &[f64], sums: Vec<C64>) -> Marginal {
    Marginal {
        axis: axis.to_vec(),
        max_imag: sums.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
        values: sums.iter().map(|z| z.re).collect(),
    }
}
