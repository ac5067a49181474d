//! Build the operator for a classical symbol on the (q, p) lattice, then map it
//! back to a c-function with the same kernel.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use phasespace::correspondence::{general_cfunction, quantize_qp};
use phasespace::hilbert::{Grid, PhysicalConfig};
use phasespace::models::OperatorPair;
use phasespace::quasidist::{FieldRole, Kernel, PhaseSpaceField, Provenance};
use phasespace::C64;

fn main() -> phasespace::Result<()> {
    let n = 48;
    let cfg = PhysicalConfig::default();
    let l = (2.0 * PI * n as f64).sqrt();
    let grid = Grid::over(n, -l / 2.0, l / 2.0)?;
    let pair = OperatorPair::qp(&grid, &cfg)?;
    let pg = pair.phase_grid(cfg.hbar)?;
    let (qs, ps) = (pair.basis_a.values(), pair.basis_b.values());

    let symbol = |q: f64, p: f64| q * q + p * p;
    let classical = PhaseSpaceField::new(
        FieldRole::CFunction,
        (qs.to_vec(), pair.basis_a.measure().to_vec()),
        (ps.to_vec(), pair.basis_b.measure().to_vec()),
        DMatrix::from_fn(n, n, |i, j| C64::from(symbol(qs[i], ps[j]))),
        Provenance::default(),
    )?;

    for k in [Kernel::wigner(), Kernel::margenau_hill()] {
        let op = quantize_qp(&classical, &k, &cfg)?;
        let back = general_cfunction(&op, &pair.basis_a, &pair.basis_b, &pair.transform, &k, &pg)?;
        let (lo, hi) = (n / 4, 3 * n / 4);
        let mut err = 0.0f64;
        for i in lo..hi {
            for j in lo..hi {
                err = err.max((back.values()[(i, j)] - classical.values()[(i, j)]).norm());
            }
        }
        println!(
            "{:<14} hermitian: {:<5} interior round-trip error {err:.3e}",
            k.id(),
            op.is_hermitian()
        );
    }
    Ok(())
}
