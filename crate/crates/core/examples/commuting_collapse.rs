//! b = a² commutes with a. The Margenau-Hill distribution then lives on the
//! curve β = α²; the direct-sum Wigner-type distribution does not.

use std::f64::consts::PI;

use phasespace::hilbert::{make_position_operator, Grid, PhysicalConfig};
use phasespace::models::gaussian_state;
use phasespace::quasidist::commuting_collapse_check;

fn main() -> phasespace::Result<()> {
    let n = 64;
    let cfg = PhysicalConfig::default();
    let l = (2.0 * PI * n as f64).sqrt();
    let grid = Grid::over(n, -l / 2.0, l / 2.0)?;
    let a = make_position_operator(&grid);
    let b = a.polynomial(&[0.0, 0.0, 1.0])?;
    let psi = gaussian_state(0.3, 0.0, 0.9, &grid, &cfg)?;

    let r = commuting_collapse_check(&a, &b, &psi, cfg.hbar)?;
    println!("‖[a,b]‖ = {:.2e}", r.commutator_norm);
    println!(
        "margenau-hill  on {:.6}  off {:.3e}  collapses: {}",
        r.mh_on_mass,
        r.mh_off_mass,
        r.mh_collapses()
    );
    println!(
        "wigner (quad.) on {:.6}  off {:.3e}  collapses: {}",
        r.wigner_on_mass,
        r.wigner_off_mass,
        r.wigner_collapses()
    );
    Ok(())
}
