//! Transformation matrix `T(β,α) = Σ_x v*_β(x) u_α(x) w_x` between two eigenbases.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{max_abs, BasisTag, EigenBasis, StateVector};

/// Entries of `T` with modulus below this are treated as zeros.
pub const SINGULAR_THRESHOLD: f64 = 1e-10;

/// Dense change-of-basis matrix, rows indexed by β and columns by α.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix {
    alpha_basis: BasisTag,
    beta_basis: BasisTag,
    alpha_values: Vec<f64>,
    beta_values: Vec<f64>,
    alpha_weights: Vec<f64>,
    beta_weights: Vec<f64>,
    entries: DMatrix<C64>,
}

impl TransformMatrix {
    /// Build from explicit data; used for analytic transforms and perturbation tests.
    pub fn from_parts(
        alpha: (&BasisTag, &[f64], &[f64]),
        beta: (&BasisTag, &[f64], &[f64]),
        entries: DMatrix<C64>,
    ) -> Result<Self> {
        let (na, nb) = (alpha.1.len(), beta.1.len());
        if alpha.2.len() != na || beta.2.len() != nb {
            return Err(Error::DimensionMismatch {
                expected: na,
                found: alpha.2.len(),
            });
        }
        if entries.nrows() != nb || entries.ncols() != na {
            return Err(Error::DimensionMismatch {
                expected: nb * na,
                found: entries.nrows() * entries.ncols(),
            });
        }
        if na != nb {
            return Err(Error::DimensionMismatch {
                expected: na,
                found: nb,
            });
        }
        Ok(TransformMatrix {
            alpha_basis: alpha.0.clone(),
            beta_basis: beta.0.clone(),
            alpha_values: alpha.1.to_vec(),
            beta_values: beta.1.to_vec(),
            alpha_weights: alpha.2.to_vec(),
            beta_weights: beta.2.to_vec(),
            entries,
        })
    }

    /// Column (α) basis tag.
    pub fn alpha_basis(&self) -> &BasisTag {
        &self.alpha_basis
    }

    /// Row (β) basis tag.
    pub fn beta_basis(&self) -> &BasisTag {
        &self.beta_basis
    }

    pub fn alpha_values(&self) -> &[f64] {
        &self.alpha_values
    }

    pub fn beta_values(&self) -> &[f64] {
        &self.beta_values
    }

    pub fn alpha_weights(&self) -> &[f64] {
        &self.alpha_weights
    }

    pub fn beta_weights(&self) -> &[f64] {
        &self.beta_weights
    }

    /// `entries[(β, α)]`.
    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.alpha_values.len()
    }

    /// `T(c←a) = T(c←b)·W_b·T(b←a)`.
    pub fn compose(first: &TransformMatrix, second: &TransformMatrix) -> Result<TransformMatrix> {
        if first.beta_basis != second.alpha_basis {
            return Err(Error::basis(&second.alpha_basis, &first.beta_basis));
        }
        let wb = DMatrix::from_diagonal(&real_diag(&first.beta_weights));
        let entries = &second.entries * wb * &first.entries;
        Ok(TransformMatrix {
            alpha_basis: first.alpha_basis.clone(),
            beta_basis: second.beta_basis.clone(),
            alpha_values: first.alpha_values.clone(),
            beta_values: second.beta_values.clone(),
            alpha_weights: first.alpha_weights.clone(),
            beta_weights: second.beta_weights.clone(),
            entries,
        })
    }

    /// `W_b^{1/2} T W_a^{1/2}`, which is unitary when `T` is valid.
    pub fn scaled(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.entries.nrows(), self.entries.ncols(), |b, a| {
            self.entries[(b, a)] * (self.beta_weights[b] * self.alpha_weights[a]).sqrt()
        })
    }

    /// Fails with `SingularTransform` if any `|T| < SINGULAR_THRESHOLD`.
    pub fn require_nonsingular(&self) -> Result<()> {
        let (count, min_abs) = singular_stats(&self.entries);
        if count > 0 {
            return Err(Error::SingularTransform {
                count,
                threshold: SINGULAR_THRESHOLD,
                min_abs,
            });
        }
        Ok(())
    }
}

fn real_diag(w: &[f64]) -> DVector<C64> {
    DVector::from_iterator(w.len(), w.iter().map(|x| C64::from(*x)))
}

fn singular_stats(t: &DMatrix<C64>) -> (usize, f64) {
    let mut count = 0;
    let mut min_abs = f64::INFINITY;
    for z in t.iter() {
        let m = z.norm();
        min_abs = min_abs.min(m);
        if m < SINGULAR_THRESHOLD {
            count += 1;
        }
    }
    (count, min_abs)
}

/// Transformation matrix between two eigenbases written over the same representation.
pub fn compute_transform(basis_a: &EigenBasis, basis_b: &EigenBasis) -> Result<TransformMatrix> {
    if basis_a.representation() != basis_b.representation() {
        return Err(Error::basis(basis_a.representation(), basis_b.representation()));
    }
    if basis_a.len() != basis_b.len() {
        return Err(Error::DimensionMismatch {
            expected: basis_a.len(),
            found: basis_b.len(),
        });
    }
    let wa = basis_a.rep_weight();
    let wb = basis_b.rep_weight();
    if (wa - wb).abs() > 1e-12 * wa.max(wb) {
        return Err(Error::BadWeights(format!(
            "representation weights differ ({wa} vs {wb})"
        )));
    }
    let entries = basis_b.eigenfunctions().adjoint() * basis_a.eigenfunctions() * C64::from(wa);
    Ok(TransformMatrix {
        alpha_basis: basis_a.tag().clone(),
        beta_basis: basis_b.tag().clone(),
        alpha_values: basis_a.values().to_vec(),
        beta_values: basis_b.values().to_vec(),
        alpha_weights: basis_a.measure().to_vec(),
        beta_weights: basis_b.measure().to_vec(),
        entries,
    })
}

/// `B(β) = Σ_α T(β,α) A(α) w_α`.
pub fn transform_coefficients(a: &StateVector, t: &TransformMatrix) -> Result<StateVector> {
    if a.basis() != &t.alpha_basis {
        return Err(Error::basis(&t.alpha_basis, a.basis()));
    }
    let wa = DVector::from_iterator(
        a.len(),
        a.amplitudes().iter().zip(&t.alpha_weights).map(|(z, w)| z * *w),
    );
    StateVector::new(t.beta_basis.clone(), &t.entries * wa, t.beta_weights.clone())
}

/// `A(α) = Σ_β T*(β,α) B(β) w_β`.
pub fn inverse_transform_coefficients(b: &StateVector, t: &TransformMatrix) -> Result<StateVector> {
    if b.basis() != &t.beta_basis {
        return Err(Error::basis(&t.beta_basis, b.basis()));
    }
    let wb = DVector::from_iterator(b.len(), b.amplitudes().iter().zip(&t.beta_weights).map(|(z, w)| z * *w));
    StateVector::new(t.alpha_basis.clone(), t.entries.adjoint() * wb, t.alpha_weights.clone())
}

/// Health report for a transformation matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformReport {
    /// `max|W_a^{1/2}(T†W_bT)W_a^{1/2} − I|`.
    pub unitarity_deviation: f64,
    /// `max|W_b^{1/2}(T W_a T†)W_b^{1/2} − I|`, i.e. `T†` acting as the inverse of `T`.
    pub adjoint_deviation: f64,
    pub min_abs: f64,
    pub singular_count: usize,
    /// `(β index, α index)` of entries below the threshold.
    pub singular_entries: Vec<(usize, usize)>,
}

impl TransformReport {
    pub fn is_singular(&self) -> bool {
        self.singular_count > 0
    }
}

pub fn validate_transform(t: &TransformMatrix) -> TransformReport {
    let s = t.scaled();
    let n = t.dim();
    let id = DMatrix::<C64>::identity(n, n);
    let unitarity_deviation = max_abs(&(s.adjoint() * &s - &id));
    let adjoint_deviation = max_abs(&(&s * s.adjoint() - &id));
    let (singular_count, min_abs) = singular_stats(&t.entries);
    let singular_entries = (0..t.entries.nrows())
        .flat_map(|b| (0..t.entries.ncols()).map(move |a| (b, a)))
        .filter(|&ix| t.entries[ix].norm() < SINGULAR_THRESHOLD)
        .collect();
    TransformReport {
        unitarity_deviation,
        adjoint_deviation,
        min_abs,
        singular_count,
        singular_entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{
        eigendecompose, make_momentum_operator, make_position_operator, Grid, OperatorMatrix, PhysicalConfig,
    };

    fn bases(n: usize) -> (Grid, EigenBasis, EigenBasis) {
        let cfg = PhysicalConfig::default();
        let g = Grid::over(n, -5.0, 5.0).unwrap();
        let q = eigendecompose(&make_position_operator(&g)).unwrap();
        let p = eigendecompose(&make_momentum_operator(&g, &cfg)).unwrap();
        (g, q, p)
    }

    #[test]
    fn same_basis_gives_weighted_identity() {
        let (g, q, _) = bases(8);
        let q = q.with_uniform_measure(g.spacing()).unwrap();
        let t = compute_transform(&q, &q).unwrap();
        for b in 0..8 {
            for a in 0..8 {
                let expect = if a == b { 1.0 / g.spacing() } else { 0.0 };
                assert!((t.entries()[(b, a)] - C64::from(expect)).norm() < 1e-12);
            }
        }
        let r = validate_transform(&t);
        assert!(r.unitarity_deviation < 1e-12 && r.adjoint_deviation < 1e-12);
        assert!(r.singular_count > 0);
    }

    #[test]
    fn unit_measure_transform_is_unitary() {
        let (_, q, p) = bases(16);
        let t = compute_transform(&q, &p).unwrap();
        let r = validate_transform(&t);
        assert!(r.unitarity_deviation < 1e-10, "{r:?}");
        assert!(r.adjoint_deviation < 1e-10);
        assert!(!r.is_singular());
    }

    #[test]
    fn round_trip_through_transform() {
        let (g, q, p) = bases(16);
        let t = compute_transform(&q, &p).unwrap();
        let amps = DVector::from_fn(16, |j, _| C64::new((j as f64 * 0.3).sin(), (j as f64 * 0.7).cos()));
        let psi = StateVector::on_grid(&g, amps).unwrap().normalized();
        let a = crate::hilbert::coefficients(&psi, &q).unwrap();
        let b = transform_coefficients(&a, &t).unwrap();
        assert!((b.norm_sq() - 1.0).abs() < 1e-10);
        let direct = crate::hilbert::coefficients(&psi, &p).unwrap();
        assert!((b.amplitudes() - direct.amplitudes()).camax() < 1e-10);
        let back = inverse_transform_coefficients(&b, &t).unwrap();
        assert!((back.amplitudes() - a.amplitudes()).camax() < 1e-10);
        assert!(matches!(
            transform_coefficients(&b, &t),
            Err(Error::BasisMismatch { .. })
        ));
    }

    #[test]
    fn representation_mismatch_is_rejected() {
        let (_, q, _) = bases(4);
        let other = OperatorMatrix::identity("elsewhere".into(), 4, 1.0).unwrap();
        let o = eigendecompose(&other).unwrap();
        assert!(matches!(compute_transform(&q, &o), Err(Error::BasisMismatch { .. })));
    }

    #[test]
    fn nonsingular_guard() {
        let (_, q, p) = bases(8);
        let t = compute_transform(&q, &p).unwrap();
        assert!(t.require_nonsingular().is_ok());
        let t = compute_transform(&q, &q).unwrap();
        assert!(matches!(
            t.require_nonsingular(),
            Err(Error::SingularTransform { count: 56, .. })
        ));
    }
}
