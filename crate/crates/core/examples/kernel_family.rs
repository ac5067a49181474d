//! One state, several kernels. Prints normalization, marginal preservation and
//! the largest deviation of M_Φ from Φ·M_W on the working grid.

use std::f64::consts::PI;

use phasespace::hilbert::{Grid, PhysicalConfig};
use phasespace::models::{gaussian_state, OperatorPair};
use phasespace::quasidist::{general_distribution, kernel_relation_check, Kernel};

fn main() -> phasespace::Result<()> {
    let n = 32;
    let cfg = PhysicalConfig::default();
    let l = (2.0 * PI * n as f64).sqrt();
    let grid = Grid::over(n, -l / 2.0, l / 2.0)?;
    let pair = OperatorPair::qp(&grid, &cfg)?;
    let pg = pair.phase_grid(cfg.hbar)?;
    let psi = gaussian_state(0.4, 0.9, 0.6, &grid, &cfg)?;
    let (a, b) = pair.coefficients(&psi)?;

    let kernels = [
        Kernel::wigner(),
        Kernel::margenau_hill(),
        Kernel::rihaczek(),
        Kernel::gaussian(1.0)?,
        Kernel::custom("born-jordan", |th, ta, h| {
            let x = th * ta * h / 2.0;
            let v = if x.abs() < 1e-12 { 1.0 } else { x.sin() / x };
            v.into()
        }),
    ];
    println!(
        "{:<14} {:>10} {:>9} {:>12} {:>12}",
        "kernel", "mass", "marginal", "min Re P", "relation"
    );
    for k in &kernels {
        let p = general_distribution(&a, &b, &pair.transform, k, &pg)?;
        let r = kernel_relation_check(&a, &b, &pair.transform, k, &pg)?;
        println!(
            "{:<14} {:>10.6} {:>9} {:>12.3e} {:>12.3e}",
            k.id(),
            p.total().re,
            pg.preserves_marginals(k),
            p.min_real(),
            r.max_deviation
        );
    }
    Ok(())
}
