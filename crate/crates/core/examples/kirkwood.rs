//! Margenau-Hill distribution on the (q, p) pair. On the lattice it is the
//! product ψ*(q) e^{iqp/ħ} φ(p) / √(2πħ), with φ the discrete Fourier transform of ψ.

use std::f64::consts::PI;

use phasespace::hilbert::{Grid, PhysicalConfig};
use phasespace::models::{random_state, OperatorPair};
use phasespace::quasidist::{marginal_alpha, marginal_beta, mh_distribution};
use phasespace::C64;

fn main() -> phasespace::Result<()> {
    let n = 48;
    let cfg = PhysicalConfig::default();
    let l = (2.0 * PI * n as f64).sqrt();
    let grid = Grid::over(n, -l / 2.0, l / 2.0)?;
    let pair = OperatorPair::qp(&grid, &cfg)?;

    let psi = random_state(&grid, 11);
    let (a, b) = pair.coefficients(&psi)?;
    let p = mh_distribution(&a, &b, &pair.transform)?;

    let (qs, ps) = (pair.basis_a.values(), pair.basis_b.values());
    let dq = grid.spacing();
    let phi: Vec<C64> = ps
        .iter()
        .map(|&p| {
            qs.iter()
                .zip(psi.amplitudes().iter())
                .map(|(&q, z)| C64::from_polar(1.0, -p * q / cfg.hbar) * z * dq)
                .sum::<C64>()
                / (2.0 * PI * cfg.hbar).sqrt()
        })
        .collect();
    let mut err = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let want = psi.amplitudes()[j].conj() * C64::from_polar(1.0, qs[j] * ps[k] / cfg.hbar) * phi[k]
                / (2.0 * PI * cfg.hbar).sqrt();
            err = err.max((p.values()[(j, k)] - want).norm());
        }
    }
    println!("max deviation from the product form: {err:.3e}");

    let mq = marginal_alpha(&p)?;
    let mp = marginal_beta(&p)?;
    let dq: f64 = mq
        .values
        .iter()
        .zip(psi.amplitudes().iter())
        .map(|(m, z)| (m - z.norm_sqr()).abs())
        .fold(0.0, f64::max);
    let dp: f64 = mp
        .values
        .iter()
        .zip(&phi)
        .map(|(m, z)| (m - z.norm_sqr()).abs())
        .fold(0.0, f64::max);
    println!("marginals: |ψ(q)|² to {dq:.1e}, |φ(p)|² to {dp:.1e}");
    println!(
        "imaginary part up to {:.3e}; real part down to {:.3e}",
        p.max_imag(),
        p.min_real()
    );
    Ok(())
}
