//! c-functions and the factorized expectation value ΣΣ g(α,β) P(α,β) for a
//! random Hermitian operator, in three families.

use std::f64::consts::PI;

use phasespace::correspondence::{expectation_phase_space, expectation_trace, general_cfunction, mh_cfunction};
use phasespace::hilbert::{make_density, Grid, PhysicalConfig};
use phasespace::models::{random_hermitian, random_state, OperatorPair};
use phasespace::quasidist::{general_distribution, mh_distribution, Kernel};

fn main() -> phasespace::Result<()> {
    let n = 32;
    let cfg = PhysicalConfig::default();
    let l = (2.0 * PI * n as f64).sqrt();
    let grid = Grid::over(n, -l / 2.0, l / 2.0)?;
    let pair = OperatorPair::qp(&grid, &cfg)?;
    let pg = pair.phase_grid(cfg.hbar)?;
    let (ba, bb, t) = (&pair.basis_a, &pair.basis_b, &pair.transform);

    let g = random_hermitian(&grid, 42);
    let psi = random_state(&grid, 7);
    let rho = make_density(&[(1.0, psi.clone())])?;
    let (a, b) = pair.coefficients(&psi)?;
    let exact = expectation_trace(&g, &rho)?;
    println!("Tr[gρ] = {:.12}", exact.re);

    let mh = expectation_phase_space(&mh_cfunction(&g, ba, bb, t)?, &mh_distribution(&a, &b, t)?)?;
    println!("margenau-hill  {:.12}  diff {:.2e}", mh.re, (mh - exact).norm());
    for k in [Kernel::wigner(), Kernel::gaussian(1.2)?] {
        let c = general_cfunction(&g, ba, bb, t, &k, &pg)?;
        let p = general_distribution(&a, &b, t, &k, &pg)?;
        let v = expectation_phase_space(&c, &p)?;
        println!("{:<14} {:.12}  diff {:.2e}", k.id(), v.re, (v - exact).norm());
    }
    Ok(())
}
