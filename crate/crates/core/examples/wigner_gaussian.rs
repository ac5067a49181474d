//! Wigner-type distribution of a displaced Gaussian on the (q, p) pair,
//! compared with the closed form and checked against both marginals.
//!
//!     cargo run --example wigner_gaussian

use std::f64::consts::PI;

use phasespace::hilbert::{Grid, PhysicalConfig};
use phasespace::models::{gaussian_state, OperatorPair};
use phasespace::quasidist::{lattice_marginal_alpha, lattice_marginal_beta, wigner_distribution, EvalMode};

fn main() -> phasespace::Result<()> {
    let n = 64;
    let cfg = PhysicalConfig::default();
    let l = (2.0 * PI * n as f64).sqrt();
    let grid = Grid::over(n, -l / 2.0, l / 2.0)?;
    let (q0, p0, sigma) = (0.8, -0.5, 0.5f64.sqrt());

    let psi = gaussian_state(q0, p0, sigma, &grid, &cfg)?;
    let pair = OperatorPair::qp(&grid, &cfg)?;
    let pg = pair.phase_grid(cfg.hbar)?;
    let (a, b) = pair.coefficients(&psi)?;
    let w = wigner_distribution(&a, &b, &pair.transform, &pg, EvalMode::Spectral)?;

    let analytic = |q: f64, p: f64| {
        (-(q - q0).powi(2) / (2.0 * sigma * sigma) - 2.0 * sigma * sigma * (p - p0).powi(2)).exp() / PI
    };
    let mut err = 0.0f64;
    for (i, &q) in w.alpha().iter().enumerate() {
        for (j, &p) in w.beta().iter().enumerate() {
            err = err.max((w.values()[(i, j)].re - analytic(q, p)).abs());
        }
    }
    println!("n = {n}, mass = {:.12}", w.total().re);
    println!("max |W - W_exact| = {err:.3e}");
    println!("min W = {:.3e}, max |Im W| = {:.3e}", w.min_real(), w.max_imag());

    let ma = lattice_marginal_alpha(&w, &pg)?;
    let mb = lattice_marginal_beta(&w, &pg)?;
    let dev = |m: &[f64], e: &[f64]| m.iter().zip(e).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    println!("q marginal deviation {:.3e}", dev(&ma.values, &a.probabilities()));
    println!("p marginal deviation {:.3e}", dev(&mb.values, &b.probabilities()));
    Ok(())
}
