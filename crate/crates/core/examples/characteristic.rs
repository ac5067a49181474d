//! Characteristic function of a distribution and the moments read off its
//! derivatives at the origin.

use std::f64::consts::PI;

use phasespace::hilbert::{Grid, PhysicalConfig};
use phasespace::models::{gaussian_state, OperatorPair};
use phasespace::quasidist::{characteristic_function, wigner_distribution, EvalMode};

fn main() -> phasespace::Result<()> {
    let n = 64;
    let cfg = PhysicalConfig::default();
    let l = (2.0 * PI * n as f64).sqrt();
    let grid = Grid::over(n, -l / 2.0, l / 2.0)?;
    let pair = OperatorPair::qp(&grid, &cfg)?;
    let pg = pair.phase_grid(cfg.hbar)?;
    let psi = gaussian_state(1.1, -0.4, 0.8, &grid, &cfg)?;
    let (a, b) = pair.coefficients(&psi)?;
    let w = wigner_distribution(&a, &b, &pair.transform, &pg, EvalMode::Spectral)?;

    // small symmetric stencil around the origin
    let h = 1e-3;
    let axis = [-h, 0.0, h];
    let m = characteristic_function(&w, &axis, &axis)?;
    let v = m.values();
    let mean_q = (v[(2, 1)] - v[(0, 1)]) / (2.0 * h);
    let mean_p = (v[(1, 2)] - v[(1, 0)]) / (2.0 * h);
    let second_q = -(v[(2, 1)] - 2.0 * v[(1, 1)] + v[(0, 1)]) / (h * h);
    println!("M(0,0) = {:.12}", v[(1, 1)].re);
    println!("<q>  = {:.6}  (expected 1.1)", mean_q.im);
    println!("<p>  = {:.6}  (expected -0.4)", mean_p.im);
    println!("<q²> = {:.6}  (expected {:.6})", second_q.re, 1.1f64.powi(2) + 0.64);

    let full = characteristic_function(&w, pg.alpha().theta(), pg.beta().theta())?;
    println!(
        "working grid {}x{}, max |M| = {:.6}",
        full.alpha().len(),
        full.beta().len(),
        full.values().iter().map(|z| z.norm()).fold(0.0, f64::max)
    );
    Ok(())
}
