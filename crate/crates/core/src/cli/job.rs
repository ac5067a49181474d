//! Turn a [`JobConfig`] into operators, a state, a kernel and a phase grid.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::config::{JobConfig, KernelSpec, ModeSpec, OperatorSpec, StateSpec, SystemSpec};
use super::CliError;
use crate::hilbert::{
    eigendecompose, make_momentum_operator, make_position_operator, BasisTag, EigenBasis, Grid, OperatorMatrix,
    PhysicalConfig, StateVector,
};
use crate::models::{
    gaussian_state, harmonic_oscillator, momentum_basis, position_basis, random_hermitian, random_state,
    LinearForceSystem, OperatorPair,
};
use crate::quasidist::{EvalMode, Kernel, KernelTable, PhaseGrid, MH_FAMILY};
use crate::C64;

/// Everything a subcommand needs, built once from the config.
#[derive(Debug, Clone)]
pub struct Job {
    pub cfg: PhysicalConfig,
    pub grid: Grid,
    pub representation: BasisTag,
    pub pair: OperatorPair,
    pub pair_specs: [OperatorSpec; 2],
    pub state: StateVector,
    pub kernel: Kernel,
    pub mode: EvalMode,
    pub phase_grid: PhaseGrid,
    pub operator: Option<OperatorMatrix>,
}

struct Context<'a> {
    system: &'a SystemSpec,
    cfg: PhysicalConfig,
    /// Abstract grid for custom systems: `n` points at spacing equal to the representation weight.
    grid: Grid,
    representation: BasisTag,
    weight: f64,
}

impl Context<'_> {
    fn on_grid(&self) -> bool {
        !matches!(self.system, SystemSpec::Custom { .. })
    }

    fn operator(&self, spec: &OperatorSpec) -> Result<OperatorMatrix, CliError> {
        let op = match spec {
            OperatorSpec::Name(name) => self.named(name)?,
            OperatorSpec::Poly { of, poly } => self.operator(of)?.polynomial(poly)?,
            OperatorSpec::Product { product } => {
                let mut it = product.iter();
                let first = it.next().ok_or_else(|| CliError::config("empty operator product"))?;
                let mut acc = self.operator(first)?;
                for o in it {
                    acc = acc.product(&self.operator(o)?)?;
                }
                acc
            }
            OperatorSpec::Random { random } => {
                let h = random_hermitian(&self.grid, *random);
                OperatorMatrix::hermitian(self.representation.clone(), h.entries().clone(), self.weight)?
            }
            OperatorSpec::File { path } => {
                let m = read_matrix(path, self.grid.len())?;
                OperatorMatrix::new(self.representation.clone(), m, self.weight)?
            }
        };
        Ok(op.with_label(spec.label()))
    }

    fn named(&self, name: &str) -> Result<OperatorMatrix, CliError> {
        let n = self.grid.len();
        match (name, self.system) {
            ("identity" | "1", _) => Ok(OperatorMatrix::identity(self.representation.clone(), n, self.weight)?),
            (_, SystemSpec::Custom { .. }) => Err(CliError::config(format!(
                "operator `{name}` is not available for custom systems"
            ))),
            ("q", _) => Ok(make_position_operator(&self.grid)),
            ("p", _) => Ok(make_momentum_operator(&self.grid, &self.cfg)),
            ("H", SystemSpec::LinearForce) => Ok(LinearForceSystem::new(&self.cfg, &self.grid)?.hamiltonian().clone()),
            ("H", SystemSpec::Oscillator { omega }) => Ok(harmonic_oscillator(*omega, &self.cfg, &self.grid)?),
            ("H", SystemSpec::Qp) => Ok(harmonic_oscillator(1.0, &self.cfg, &self.grid)?),
            _ => Err(CliError::config(format!("unknown operator `{name}`"))),
        }
    }

    /// Position and momentum keep their lattice measures; everything else is eigendecomposed.
    fn basis(&self, spec: &OperatorSpec, op: &OperatorMatrix) -> Result<EigenBasis, CliError> {
        if self.on_grid() {
            match spec {
                OperatorSpec::Name(n) if n == "q" => return Ok(position_basis(&self.grid)),
                OperatorSpec::Name(n) if n == "p" => return Ok(momentum_basis(&self.grid, &self.cfg)),
                _ => {}
            }
        }
        let op =
            OperatorMatrix::hermitian(op.basis().clone(), op.entries().clone(), op.weight())?.with_label(op.label());
        Ok(eigendecompose(&op)?)
    }

    fn state(&self, spec: &StateSpec) -> Result<StateVector, CliError> {
        let n = self.grid.len();
        let weights = vec![self.weight; n];
        match spec {
            StateSpec::Gaussian { q0, p0, sigma } => {
                if !self.on_grid() {
                    return Err(CliError::config("gaussian states need a grid system"));
                }
                Ok(gaussian_state(*q0, *p0, *sigma, &self.grid, &self.cfg)?)
            }
            StateSpec::Random { seed } => {
                let s = random_state(&self.grid, *seed);
                Ok(StateVector::new(
                    self.representation.clone(),
                    s.amplitudes().clone(),
                    weights,
                )?)
            }
            StateSpec::Eigenstate { operator, index } => {
                let op = self.operator(operator)?;
                let basis = self.basis(operator, &op)?;
                if *index >= basis.len() {
                    return Err(CliError::config(format!("eigenstate index {index} out of range")));
                }
                let u = basis.eigenfunctions().column(*index).into_owned();
                Ok(StateVector::new(self.representation.clone(), u, weights)?.normalized())
            }
            StateSpec::File { path } => {
                let v = read_vector(path, n)?;
                Ok(StateVector::new(self.representation.clone(), v, weights)?.normalized())
            }
        }
    }
}

pub fn build_kernel(spec: &KernelSpec) -> Result<Kernel, CliError> {
    let k = match spec.id.as_str() {
        "wigner" => Kernel::wigner(),
        MH_FAMILY => Kernel::margenau_hill(),
        "rihaczek" => Kernel::rihaczek(),
        "gaussian" => {
            let s = spec
                .sigma
                .ok_or_else(|| CliError::config("gaussian kernel needs `sigma`"))?;
            Kernel::gaussian(s)?
        }
        "table" => {
            let path = spec
                .path
                .as_ref()
                .ok_or_else(|| CliError::config("table kernel needs `path`"))?;
            Kernel::table(table_id(path), read_kernel_table(path)?)
        }
        other => return Err(CliError::config(format!("unknown kernel `{other}`"))),
    };
    Ok(match spec.scale {
        Some(f) if f != 1.0 => k.scaled(f),
        _ => k,
    })
}

fn table_id(path: &Path) -> String {
    format!(
        "table:{}",
        path.file_name().map(|s| s.to_string_lossy()).unwrap_or_default()
    )
}

/// Exact lattice evaluation is the default for the Margenau-Hill kernel, spectral otherwise.
pub fn resolve_mode(spec: Option<ModeSpec>, kernel: &Kernel) -> EvalMode {
    match spec {
        Some(ModeSpec::Exact) => EvalMode::Exact,
        Some(ModeSpec::Direct) => EvalMode::Direct,
        Some(ModeSpec::Spectral) => EvalMode::Spectral,
        None if kernel.id() == MH_FAMILY => EvalMode::Exact,
        None => EvalMode::Spectral,
    }
}

fn axis(spec: [f64; 3]) -> Result<Vec<f64>, CliError> {
    let [lo, hi, count] = spec;
    if count < 2.0 || count.fract() != 0.0 || !(hi > lo) {
        return Err(CliError::config("axes need lo < hi and an integer count ≥ 2"));
    }
    let m = count as usize;
    Ok((0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect())
}

impl Job {
    pub fn build(
        config: &JobConfig,
        mode_override: Option<ModeSpec>,
        operator_override: Option<&OperatorSpec>,
    ) -> Result<Self, CliError> {
        let ph = config.physics;
        let cfg = PhysicalConfig::new(ph.hbar, ph.force, ph.mass)?;
        let n = config.dim().ok_or_else(|| CliError::config("missing dimension"))?;
        let (grid, representation, weight) = match &config.system {
            SystemSpec::Custom { basis, weight, .. } => {
                if !(*weight > 0.0) {
                    return Err(CliError::config("custom weight must be positive"));
                }
                (Grid::new(n, 0.0, *weight)?, BasisTag::new(basis.clone()), *weight)
            }
            _ => {
                let domain = config.grid.and_then(|g| g.domain);
                let grid = match domain {
                    Some([lo, hi]) => Grid::over(n, lo, hi)?,
                    None => {
                        let l = (2.0 * PI * cfg.hbar * n as f64).sqrt();
                        Grid::over(n, -l / 2.0, l / 2.0)?
                    }
                };
                let w = grid.spacing();
                (grid, BasisTag::position(), w)
            }
        };
        let ctx = Context {
            system: &config.system,
            cfg,
            grid,
            representation,
            weight,
        };

        let [sa, sb] = &config.pair;
        let a = ctx.operator(sa)?;
        let b = ctx.operator(sb)?;
        let pair = OperatorPair::from_bases(&a, &b, ctx.basis(sa, &a)?, ctx.basis(sb, &b)?)?;
        let state = ctx.state(&config.state)?;
        let kernel = build_kernel(&config.kernel)?;
        let mode = resolve_mode(mode_override.or(config.mode), &kernel);
        let phase_grid = match &config.axes {
            Some(ax) => PhaseGrid::with_output(&pair.transform, &axis(ax.alpha)?, &axis(ax.beta)?, cfg.hbar)?,
            None => pair.phase_grid(cfg.hbar)?,
        };
        let operator = match operator_override.or(config.outputs.operator.as_ref()) {
            Some(spec) => Some(ctx.operator(spec)?),
            None => None,
        };
        Ok(Job {
            cfg,
            grid: ctx.grid,
            representation: ctx.representation,
            pair,
            pair_specs: config.pair.clone(),
            state,
            kernel,
            mode,
            phase_grid,
            operator,
        })
    }

    pub fn pair_label(&self) -> String {
        format!("{},{}", self.pair_specs[0].label(), self.pair_specs[1].label())
    }
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match parsed {
            Ok(r) => rows.push(r),
            // a single non-numeric header row is allowed
            Err(_) if rows.is_empty() && ln == 0 => continue,
            Err(e) => return Err(CliError::config(format!("{}:{}: {e}", path.display(), ln + 1))),
        }
    }
    Ok(rows)
}

/// `n` rows of `2n` columns, `re,im` interleaved.
pub fn read_matrix(path: &Path, n: usize) -> Result<DMatrix<C64>, CliError> {
    let rows = read_rows(path)?;
    if rows.len() != n || rows.iter().any(|r| r.len() != 2 * n) {
        return Err(CliError::config(format!(
            "{}: expected {n} rows of {} columns",
            path.display(),
            2 * n
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        C64::new(rows[i][2 * j], rows[i][2 * j + 1])
    }))
}

pub fn read_vector(path: &Path, n: usize) -> Result<DVector<C64>, CliError> {
    let rows = read_rows(path)?;
    if rows.len() != n || rows.iter().any(|r| r.len() != 2) {
        return Err(CliError::config(format!(
            "{}: expected {n} rows of re,im",
            path.display()
        )));
    }
    Ok(DVector::from_fn(n, |i, _| C64::new(rows[i][0], rows[i][1])))
}

/// Rows `theta,tau,re,im` covering a full uniform grid, any order.
pub fn read_kernel_table(path: &Path) -> Result<KernelTable, CliError> {
    let rows = read_rows(path)?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != 4) {
        return Err(CliError::config(format!(
            "{}: expected rows of theta,tau,re,im",
            path.display()
        )));
    }
    let distinct = |k: usize| {
        let mut v: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let (thetas, taus) = (distinct(0), distinct(1));
    if thetas.len() * taus.len() != rows.len() {
        return Err(CliError::config(format!(
            "{}: table does not cover a full grid",
            path.display()
        )));
    }
    let mut values = vec![C64::from(0.0); rows.len()];
    for r in &rows {
        let i = thetas.partition_point(|&t| t < r[0]);
        let j = taus.partition_point(|&t| t < r[1]);
        values[i * taus.len() + j] = C64::new(r[2], r[3]);
    }
    Ok(KernelTable::new(&thetas, &taus, values)?)
}
