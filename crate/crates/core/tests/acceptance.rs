//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints its `criterion N: PASS|FAIL ...` line; exits 1 if any fail.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use phasespace::cli::{cmd_compute, Opts};
use phasespace::correspondence::{
    expectation_phase_space, expectation_trace, general_cfunction, mh_cfunction, quantize_qp, CFunction,
};
use phasespace::hilbert::{make_density, make_position_operator, Grid, PhysicalConfig, StateVector};
use phasespace::models::{
    gaussian_state, harmonic_oscillator, linear_force_system, random_hermitian, random_state, OperatorPair,
};
use phasespace::quasidist::{
    characteristic_function, commuting_collapse_check, general_distribution, kernel_relation_check,
    lattice_marginal_alpha, lattice_marginal_beta, mh_characteristic, mh_distribution, wigner_distribution, EvalMode,
    FieldRole, Kernel, PhaseGrid, PhaseSpaceField, Provenance,
};
use phasespace::C64;

/// Pass flag and the measured numbers.
type Outcome = (bool, String);

type Symbol = fn(f64, f64) -> f64;

fn balanced(n: usize) -> Grid {
    let l = (2.0 * PI * n as f64).sqrt();
    Grid::over(n, -l / 2.0, l / 2.0).unwrap()
}

fn qp(n: usize) -> (Grid, OperatorPair) {
    let g = balanced(n);
    let pair = OperatorPair::qp(&g, &PhysicalConfig::default()).unwrap();
    (g, pair)
}

fn linear_qh(n: usize, half_width: f64) -> (Grid, OperatorPair) {
    let g = Grid::over(n, -half_width, half_width).unwrap();
    let sys = linear_force_system(&PhysicalConfig::default(), &g).unwrap();
    (g, sys.position_pair().unwrap())
}

fn oscillator_qh(n: usize, half_width: f64) -> (Grid, OperatorPair) {
    let g = Grid::over(n, -half_width, half_width).unwrap();
    let cfg = PhysicalConfig::default();
    let h = harmonic_oscillator(1.0, &cfg, &g).unwrap();
    (g.clone(), OperatorPair::new(&make_position_operator(&g), &h).unwrap())
}

fn max_dev(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Gaussian width that keeps `Φ` as large as possible at the corners of the working grid.
fn balanced_gaussian(grid: &PhaseGrid) -> Kernel {
    let amax = |x: &[f64]| x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (th, ta) = (amax(grid.alpha().theta()), amax(grid.beta().theta()));
    Kernel::gaussian((ta / th).sqrt()).unwrap()
}

fn mh_marginal_dev(p: &PhaseSpaceField, pair: &OperatorPair, a: &StateVector, b: &StateVector) -> f64 {
    let (wa, wb) = (pair.basis_a.measure(), pair.basis_b.measure());
    let pa: Vec<f64> = p.alpha_sums().iter().zip(wa).map(|(s, w)| s.re * w).collect();
    let pb: Vec<f64> = p.beta_sums().iter().zip(wb).map(|(s, w)| s.re * w).collect();
    let imag = p
        .alpha_sums()
        .iter()
        .chain(&p.beta_sums())
        .fold(0.0f64, |m, s| m.max(s.im.abs()));
    max_dev(&pa, &a.probabilities())
        .max(max_dev(&pb, &b.probabilities()))
        .max(imag)
}

fn criterion_01_factorization() -> Outcome {
    let start = Instant::now();
    let (mut mh_worst, mut gen_worst) = (0.0f64, 0.0f64);
    let mut kernels_used = Vec::new();
    for (name, (grid, pair)) in [("qp", qp(32)), ("linear (q,H)", linear_qh(32, 10.0))] {
        let pg = pair.phase_grid(1.0).unwrap();
        let (ba, bb, t) = (&pair.basis_a, &pair.basis_b, &pair.transform);
        let kernels = [Kernel::wigner(), Kernel::rihaczek(), balanced_gaussian(&pg)];
        kernels_used.push(format!("{name}: {}", kernels[2].id()));
        for seed in 0..50u64 {
            let g = random_hermitian(&grid, 1000 + seed);
            let psi = random_state(&grid, 2000 + seed);
            let exact = expectation_trace(&g, &make_density(&[(1.0, psi.clone())]).unwrap()).unwrap();
            let scale = exact.norm().max(1.0);
            let (a, b) = pair.coefficients(&psi).unwrap();
            let mh = expectation_phase_space(
                &mh_cfunction(&g, ba, bb, t).unwrap(),
                &mh_distribution(&a, &b, t).unwrap(),
            )
            .unwrap();
            mh_worst = mh_worst.max((mh - exact).norm() / scale);
            for k in &kernels {
                let c = general_cfunction(&g, ba, bb, t, k, &pg).unwrap();
                let p = general_distribution(&a, &b, t, k, &pg).unwrap();
                let v = expectation_phase_space(&c, &p).unwrap();
                gen_worst = gen_worst.max((v - exact).norm() / scale);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = mh_worst <= 1e-9 && gen_worst <= 1e-4 && secs <= 60.0;
    (
        pass,
        format!(
            "mh={mh_worst:.2e} (tol 1e-9) wigner/rihaczek/gaussian={gen_worst:.2e} (tol 1e-4) time={secs:.1}s [{}]",
            kernels_used.join(", ")
        ),
    )
}

fn criterion_02_marginals() -> Outcome {
    let cfg = PhysicalConfig::default();
    let (mut mh_worst, mut w_worst) = (0.0f64, 0.0f64);
    let states = [(0.0, 0.0, 0.5f64.sqrt()), (0.8, -0.5, 0.6), (-1.0, 1.2, 0.7)];
    for (grid, pair) in [qp(64), oscillator_qh(64, 8.0)] {
        let pg = pair.phase_grid(cfg.hbar).unwrap();
        for &(q0, p0, s) in &states {
            let psi = gaussian_state(q0, p0, s, &grid, &cfg).unwrap();
            let (a, b) = pair.coefficients(&psi).unwrap();
            let mh = mh_distribution(&a, &b, &pair.transform).unwrap();
            mh_worst = mh_worst.max(mh_marginal_dev(&mh, &pair, &a, &b));
            let w = wigner_distribution(&a, &b, &pair.transform, &pg, EvalMode::Spectral).unwrap();
            let ma = lattice_marginal_alpha(&w, &pg).unwrap();
            let mb = lattice_marginal_beta(&w, &pg).unwrap();
            let d = max_dev(&ma.values, &a.probabilities())
                .max(max_dev(&mb.values, &b.probabilities()))
                .max(ma.max_imag)
                .max(mb.max_imag);
            w_worst = w_worst.max(d);
        }
    }
    (
        mh_worst <= 1e-10 && w_worst <= 1e-6,
        format!("mh={mh_worst:.2e} (tol 1e-10) wigner={w_worst:.2e} (tol 1e-6)"),
    )
}

/// `P·wq·wp` from ψ(q) and an explicitly summed Fourier transform.
fn kirkwood_masses(psi: &[C64], qs: &[f64], ps: &[f64], hbar: f64) -> DMatrix<C64> {
    let (dq, dp) = (qs[1] - qs[0], ps[1] - ps[0]);
    let norm = (2.0 * PI * hbar).sqrt();
    let phi: Vec<C64> = ps
        .iter()
        .map(|&p| {
            qs.iter()
                .zip(psi)
                .map(|(&q, z)| C64::from_polar(1.0, -p * q / hbar) * z * dq)
                .sum::<C64>()
                / norm
        })
        .collect();
    DMatrix::from_fn(qs.len(), ps.len(), |j, k| {
        psi[j].conj() * C64::from_polar(1.0, qs[j] * ps[k] / hbar) * phi[k] / norm * dq * dp
    })
}

fn criterion_03_qp_reductions() -> Outcome {
    let cfg = PhysicalConfig::default();
    let (grid, pair) = qp(64);
    let pg = pair.phase_grid(cfg.hbar).unwrap();
    let (q0, p0, s) = (0.8, -0.5, 0.5f64.sqrt());
    let psi = gaussian_state(q0, p0, s, &grid, &cfg).unwrap();
    let (a, b) = pair.coefficients(&psi).unwrap();

    let w = wigner_distribution(&a, &b, &pair.transform, &pg, EvalMode::Spectral).unwrap();
    let analytic = |q: f64, p: f64| (-(q - q0).powi(2) / (2.0 * s * s) - 2.0 * s * s * (p - p0).powi(2)).exp() / PI;
    let mut w_err = 0.0f64;
    for (i, &q) in w.alpha().iter().enumerate() {
        for (j, &p) in w.beta().iter().enumerate() {
            w_err = w_err.max((w.values()[(i, j)] - C64::from(analytic(q, p))).norm());
        }
    }

    let mut k_err = 0.0f64;
    for seed in [0, 5] {
        let state = if seed == 0 {
            psi.clone()
        } else {
            random_state(&grid, seed)
        };
        let (a, b) = pair.coefficients(&state).unwrap();
        let p = mh_distribution(&a, &b, &pair.transform).unwrap();
        let (qs, ps) = (pair.basis_a.values(), pair.basis_b.values());
        let m = kirkwood_masses(state.amplitudes().as_slice(), qs, ps, cfg.hbar);
        let (wq, wp) = (pair.basis_a.measure(), pair.basis_b.measure());
        for j in 0..qs.len() {
            for k in 0..ps.len() {
                k_err = k_err.max((p.values()[(j, k)] * (wq[j] * wp[k]) - m[(j, k)]).norm());
            }
        }
    }
    (
        w_err <= 1e-6 && k_err <= 1e-10,
        format!("wigner vs closed form={w_err:.2e} (tol 1e-6) mh vs kirkwood={k_err:.2e} (tol 1e-10)"),
    )
}

fn criterion_04_kernel_relation() -> Outcome {
    let cfg = PhysicalConfig::default();
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    let cases = [(qp(64), None), (linear_qh(32, 10.0), Some(4u64))];
    for ((grid, pair), seed) in cases {
        let psi = match seed {
            None => gaussian_state(0.5, -0.3, 0.7, &grid, &cfg).unwrap(),
            Some(s) => random_state(&grid, s),
        };
        let pg = pair.phase_grid(cfg.hbar).unwrap();
        let (a, b) = pair.coefficients(&psi).unwrap();
        for k in [
            Kernel::wigner(),
            Kernel::margenau_hill(),
            Kernel::gaussian(1.0).unwrap(),
        ] {
            let r = kernel_relation_check(&a, &b, &pair.transform, &k, &pg).unwrap();
            worst = worst.max(r.max_deviation);
            lines.push(format!("{}={:.1e}", k.id(), r.max_deviation));
        }
    }
    (
        worst <= 1e-6,
        format!("max={worst:.2e} (tol 1e-6) [{}]", lines.join(" ")),
    )
}

fn criterion_05_kernel_reductions() -> Outcome {
    let cfg = PhysicalConfig::default();
    let one = Kernel::custom("constant-one", |_, _, _| C64::from(1.0));

    // Φ ≡ 1 against the Wigner-type distribution and its closed form on (q, p)
    let (grid, pair) = qp(64);
    let pg = pair.phase_grid(cfg.hbar).unwrap();
    let (q0, p0, s) = (-0.4, 0.9, 0.8);
    let psi = gaussian_state(q0, p0, s, &grid, &cfg).unwrap();
    let (a, b) = pair.coefficients(&psi).unwrap();
    let p_one = general_distribution(&a, &b, &pair.transform, &one, &pg).unwrap();
    let w = wigner_distribution(&a, &b, &pair.transform, &pg, EvalMode::Spectral).unwrap();
    let mut unit_err = max_abs_diff(p_one.values(), w.values());
    for (i, &q) in p_one.alpha().iter().enumerate() {
        for (j, &p) in p_one.beta().iter().enumerate() {
            let want = (-(q - q0).powi(2) / (2.0 * s * s) - 2.0 * s * s * (p - p0).powi(2)).exp() / PI;
            unit_err = unit_err.max((p_one.values()[(i, j)] - C64::from(want)).norm());
        }
    }

    // margenau-hill kernel against the exact lattice distribution
    let mut mh_err = 0.0f64;
    let p_k = general_distribution(&a, &b, &pair.transform, &Kernel::margenau_hill(), &pg).unwrap();
    let p_mh = mh_distribution(&a, &b, &pair.transform).unwrap();
    mh_err = mh_err.max(max_abs_diff(p_k.values(), p_mh.values()));

    // non-uniform lattice: compare both on the common working grid
    let (grid, pair) = linear_qh(32, 10.0);
    let pg = pair.phase_grid(cfg.hbar).unwrap();
    let psi = random_state(&grid, 11);
    let (a, b) = pair.coefficients(&psi).unwrap();
    let p_k = general_distribution(&a, &b, &pair.transform, &Kernel::margenau_hill(), &pg).unwrap();
    let p_mh = mh_distribution(&a, &b, &pair.transform).unwrap();
    let m_k = characteristic_function(&p_k, pg.alpha().theta(), pg.beta().theta()).unwrap();
    let m_mh = mh_characteristic(&p_mh, &pg).unwrap();
    mh_err = mh_err.max(max_abs_diff(m_k.values(), &m_mh));
    let ma = lattice_marginal_alpha(&p_k, &pg).unwrap();
    let mb = lattice_marginal_beta(&p_k, &pg).unwrap();
    mh_err = mh_err
        .max(max_dev(&ma.values, &a.probabilities()))
        .max(max_dev(&mb.values, &b.probabilities()));

    (
        unit_err <= 1e-8 && mh_err <= 1e-8,
        format!("unit kernel={unit_err:.2e} margenau-hill kernel={mh_err:.2e} (tol 1e-8)"),
    )
}

fn criterion_06_commuting_collapse() -> Outcome {
    let cfg = PhysicalConfig::default();
    let grid = balanced(64);
    let a = make_position_operator(&grid);
    let psi = gaussian_state(0.3, 0.2, 0.9, &grid, &cfg).unwrap();
    let (mut mh_off, mut w_off, mut w_on) = (0.0f64, 0.0f64, 0.0f64);
    for coeffs in [vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0, 0.2]] {
        let b = a.polynomial(&coeffs).unwrap();
        let r = commuting_collapse_check(&a, &b, &psi, cfg.hbar).unwrap();
        mh_off = mh_off.max(r.mh_off_mass);
        w_off = w_off.max(r.wigner_off_mass);
        w_on = w_on.max(r.wigner_on_mass);
    }
    (mh_off <= 1e-8 && w_off <= 1e-4,
        format!("mh off-curve mass={mh_off:.2e} (tol 1e-8) wigner off-curve mass={w_off:.2e} (tol 1e-4, on-curve {w_on:.2e})"),
    )
}

fn criterion_07_linear_force_transform() -> Outcome {
    let cfg = PhysicalConfig::default();
    let grid = Grid::over(128, -50.0, 50.0).unwrap();
    let sys = linear_force_system(&cfg, &grid).unwrap();
    let pair = sys.momentum_pair().unwrap();
    let t = &pair.transform;
    let (ps, es) = (t.alpha_values(), t.beta_values());
    let n = ps.len();
    // rows and columns carry arbitrary phases, so compare double ratios on the interior half
    let (lo, hi, c) = (n / 4, 3 * n / 4, n / 2);
    let ph = |k: usize, j: usize| sys.analytic_momentum_phase(es[k], ps[j]);
    let e = t.entries();
    let (mut phase_err, mut mag_err) = (0.0f64, 0.0f64);
    for k in lo..hi {
        for j in lo..hi {
            let r = e[(k, j)] * e[(c, c)] / (e[(k, c)] * e[(c, j)]);
            let want = ph(k, j) + ph(c, c) - ph(k, c) - ph(c, j);
            phase_err = phase_err.max(((r.arg() - want + PI).rem_euclid(2.0 * PI) - PI).abs());
            mag_err = mag_err.max((r.norm() - 1.0).abs());
        }
    }
    (
        phase_err <= 1e-3 && mag_err <= 1e-3,
        format!("phase={phase_err:.2e} magnitude={mag_err:.2e} (tol 1e-3)"),
    )
}

fn criterion_08_quantization_round_trip() -> Outcome {
    let cfg = PhysicalConfig::default();
    let n = 48;
    let (_, pair) = qp(n);
    let pg = pair.phase_grid(cfg.hbar).unwrap();
    let (qs, ps) = (pair.basis_a.values(), pair.basis_b.values());
    let symbols: [(&str, Symbol); 4] = [
        ("1", |_, _| 1.0),
        ("q", |q, _| q),
        ("p", |_, p| p),
        ("q^2+p^2", |q, p| q * q + p * p),
    ];
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for (name, f) in symbols {
        let classical = PhaseSpaceField::new(
            FieldRole::CFunction,
            (qs.to_vec(), pair.basis_a.measure().to_vec()),
            (ps.to_vec(), pair.basis_b.measure().to_vec()),
            DMatrix::from_fn(n, n, |i, j| C64::from(f(qs[i], ps[j]))),
            Provenance::default(),
        )
        .unwrap();
        for k in [Kernel::wigner(), Kernel::margenau_hill()] {
            let op = quantize_qp(&classical, &k, &cfg).unwrap();
            let back: CFunction =
                general_cfunction(&op, &pair.basis_a, &pair.basis_b, &pair.transform, &k, &pg).unwrap();
            let mut err = 0.0f64;
            for i in n / 4..3 * n / 4 {
                for j in n / 4..3 * n / 4 {
                    err = err.max((back.values()[(i, j)] - classical.values()[(i, j)]).norm());
                }
            }
            lines.push(format!("{name}/{}={err:.1e}", k.id()));
            worst = worst.max(err);
        }
    }
    (
        worst <= 1e-4,
        format!("max={worst:.2e} (tol 1e-4) [{}]", lines.join(" ")),
    )
}

fn criterion_09_gauge_invariance() -> Outcome {
    let cfg = PhysicalConfig::default();
    let phases = |n: usize, s: f64| {
        (0..n)
            .map(|j| (s * (j * j) as f64 + 0.37 * j as f64).rem_euclid(2.0 * PI))
            .collect::<Vec<_>>()
    };
    let (mut d_err, mut m_err, mut e_err) = (0.0f64, 0.0f64, 0.0f64);
    for (grid, pair) in [qp(32), linear_qh(32, 10.0)] {
        let rotated = pair.regauged(&phases(32, 0.71), &phases(32, 1.93)).unwrap();
        let psi = random_state(&grid, 17);
        let g = random_hermitian(&grid, 18);
        let pg = pair.phase_grid(cfg.hbar).unwrap();
        let mut runs = Vec::new();
        for pr in [&pair, &rotated] {
            let (a, b) = pr.coefficients(&psi).unwrap();
            let t = &pr.transform;
            let mut fields = Vec::new();
            let mut margs = Vec::new();
            let mut exps = Vec::new();
            let mh = mh_distribution(&a, &b, t).unwrap();
            exps.push(expectation_phase_space(&mh_cfunction(&g, &pr.basis_a, &pr.basis_b, t).unwrap(), &mh).unwrap());
            margs.extend(mh.alpha_sums().iter().chain(&mh.beta_sums()).map(|z| z.re));
            fields.push(mh);
            for k in [Kernel::wigner(), Kernel::rihaczek()] {
                let p = general_distribution(&a, &b, t, &k, &pg).unwrap();
                let c = general_cfunction(&g, &pr.basis_a, &pr.basis_b, t, &k, &pg).unwrap();
                exps.push(expectation_phase_space(&c, &p).unwrap());
                margs.extend(lattice_marginal_alpha(&p, &pg).unwrap().values);
                margs.extend(lattice_marginal_beta(&p, &pg).unwrap().values);
                fields.push(p);
            }
            runs.push((fields, margs, exps));
        }
        let (x, y) = (&runs[0], &runs[1]);
        for (p, q) in x.0.iter().zip(&y.0) {
            d_err = d_err.max(max_abs_diff(p.values(), q.values()));
        }
        m_err = m_err.max(max_dev(&x.1, &y.1));
        for (u, v) in x.2.iter().zip(&y.2) {
            e_err = e_err.max((u - v).norm());
        }
    }
    (
        d_err <= 1e-10 && m_err <= 1e-10 && e_err <= 1e-10,
        format!("distributions={d_err:.2e} marginals={m_err:.2e} expectations={e_err:.2e} (tol 1e-10)"),
    )
}

fn criterion_10_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("job.json");
    std::fs::write(
        &cfg_path,
        r#"{"system": {"kind": "linear-force"}, "pair": ["q", "H"],
  "state": {"kind": "random", "seed": 3}, "kernel": {"id": "wigner"},
  "grid": {"n": 32, "domain": [-10, 10]},
  "outputs": {"fields": ["dist", "cfn", "charfn", "marginals"], "operator": {"random": 5}}}"#,
    )
    .unwrap();
    let run = |sub: &str| {
        let opts = Opts {
            config: cfg_path.clone(),
            out: Some(dir.path().join(sub)),
            field: None,
            check: Vec::new(),
            tol: None,
            mode: None,
            operator: None,
        };
        cmd_compute(&opts).unwrap();
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.path().join(sub))
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        files
    };
    let (first, second) = (run("first"), run("second"));
    let names: Vec<&str> = first.iter().map(|(n, _)| n.as_str()).collect();
    let same = first == second && first.len() == 6;
    (
        same,
        format!("{} files byte-identical across runs: {}", names.len(), names.join(" ")),
    )
}

fn main() {
    let criteria: [fn() -> Outcome; 10] = [
        criterion_01_factorization,
        criterion_02_marginals,
        criterion_03_qp_reductions,
        criterion_04_kernel_relation,
        criterion_05_kernel_reductions,
        criterion_06_commuting_collapse,
        criterion_07_linear_force_transform,
        criterion_08_quantization_round_trip,
        criterion_09_gauge_invariance,
        criterion_10_determinism,
    ];
    let mut failed = Vec::new();
    for (i, f) in criteria.iter().enumerate() {
        let k = i + 1;
        match std::panic::catch_unwind(f) {
            Ok((true, detail)) => println!("criterion {k}: PASS {detail}"),
            Ok((false, detail)) => {
                println!("criterion {k}: FAIL {detail}");
                failed.push(k);
            }
            Err(_) => {
                println!("criterion {k}: FAIL panicked");
                failed.push(k);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
