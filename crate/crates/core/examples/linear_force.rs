//! Particle under a constant force. Compares the numeric momentum-energy
//! transformation with its analytic phase, then builds distributions on (q, H).

use std::f64::consts::PI;

use phasespace::hilbert::{Grid, PhysicalConfig};
use phasespace::models::{linear_force_system, random_state};
use phasespace::quasidist::{
    lattice_marginal_alpha, lattice_marginal_beta, mh_distribution, wigner_distribution, EvalMode,
};

fn main() -> phasespace::Result<()> {
    let cfg = PhysicalConfig::new(1.0, 1.0, 1.0)?;
    let grid = Grid::over(128, -50.0, 50.0)?;
    let sys = linear_force_system(&cfg, &grid)?;

    // ⟨E|p⟩ against the analytic phase, up to constants per row and per column:
    // compare double ratios T(k,j)T(k0,j0) / T(k,j0)T(k0,j) on the interior half
    let mp = sys.momentum_pair()?;
    let t = &mp.transform;
    let (ps, es) = (t.alpha_values(), t.beta_values());
    let n = ps.len();
    let (lo, hi, c) = (n / 4, 3 * n / 4, n / 2);
    let ph = |k: usize, j: usize| sys.analytic_momentum_phase(es[k], ps[j]);
    let (mut phase_err, mut mag_err) = (0.0f64, 0.0f64);
    for k in lo..hi {
        for j in lo..hi {
            let e = t.entries();
            let r = e[(k, j)] * e[(c, c)] / (e[(k, c)] * e[(c, j)]);
            let want = ph(k, j) + ph(c, c) - ph(k, c) - ph(c, j);
            phase_err = phase_err.max(((r.arg() - want + PI).rem_euclid(2.0 * PI) - PI).abs());
            mag_err = mag_err.max((r.norm() - 1.0).abs());
        }
    }
    println!(
        "p in [{:.3}, {:.3}], E in [{:.3}, {:.3}]",
        ps[lo],
        ps[hi - 1],
        es[lo],
        es[hi - 1]
    );
    println!("phase error {phase_err:.3e}, magnitude error {mag_err:.3e}");

    let small = Grid::over(48, -12.0, 12.0)?;
    let sys = linear_force_system(&cfg, &small)?;
    let qp = sys.position_pair()?;
    let pg = qp.phase_grid(cfg.hbar)?;
    let psi = random_state(&small, 2);
    let (a, b) = qp.coefficients(&psi)?;
    let mh = mh_distribution(&a, &b, &qp.transform)?;
    let w = wigner_distribution(&a, &b, &qp.transform, &pg, EvalMode::Spectral)?;
    println!(
        "(q, H): MH mass {:.12}, Wigner mass {:.12}",
        mh.total().re,
        w.total().re
    );
    let ma = lattice_marginal_alpha(&w, &pg)?;
    let mb = lattice_marginal_beta(&w, &pg)?;
    let dev = |m: &[f64], e: &[f64]| m.iter().zip(e).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    println!(
        "Wigner marginals on a {} x {} working grid: q {:.2e}, H {:.2e}",
        pg.alpha().theta().len(),
        pg.beta().theta().len(),
        dev(&ma.values, &a.probabilities()),
        dev(&mb.values, &b.probabilities())
    );
    Ok(())
}
