//! JSON job description.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;

pub const MAX_DIM: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub system: SystemSpec,
    #[serde(default)]
    pub physics: PhysicsSpec,
    pub pair: [OperatorSpec; 2],
    pub state: StateSpec,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub mode: Option<ModeSpec>,
    #[serde(default)]
    pub axes: Option<AxesSpec>,
    #[serde(default)]
    pub outputs: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    Qp,
    LinearForce,
    Oscillator {
        #[serde(default = "one")]
        omega: f64,
    },
    /// Operators supplied as matrix files over an abstract representation.
    Custom {
        dim: usize,
        #[serde(default = "custom_basis")]
        basis: String,
        #[serde(default = "one")]
        weight: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn custom_basis() -> String {
    "custom".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSpec {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub force: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

impl Default for PhysicsSpec {
    fn default() -> Self {
        PhysicsSpec {
            hbar: 1.0,
            force: 1.0,
            mass: 1.0,
        }
    }
}

/// An operator: a built-in name (`q`, `p`, `H`, `identity`), a polynomial in
/// another operator, a product, a seeded random Hermitian matrix, or a matrix file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Name(String),
    Poly { of: Box<OperatorSpec>, poly: Vec<f64> },
    Product { product: Vec<OperatorSpec> },
    Random { random: u64 },
    File { path: PathBuf },
}

impl OperatorSpec {
    pub fn label(&self) -> String {
        match self {
            OperatorSpec::Name(n) => n.clone(),
            OperatorSpec::Poly { of, poly } => format!("poly{:?}({})", poly, of.label()),
            OperatorSpec::Product { product } => product.iter().map(|p| p.label()).collect::<Vec<_>>().join("*"),
            OperatorSpec::Random { random } => format!("random({random})"),
            OperatorSpec::File { path } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "file".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    Gaussian {
        #[serde(default)]
        q0: f64,
        #[serde(default)]
        p0: f64,
        sigma: f64,
    },
    Random {
        seed: u64,
    },
    Eigenstate {
        operator: OperatorSpec,
        #[serde(default)]
        index: usize,
    },
    /// One `re,im` line per component.
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub id: String,
    #[serde(default)]
    pub sigma: Option<f64>,
    /// Table file with `theta,tau,re,im` rows on a uniform grid.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub scale: Option<f64>,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec {
            id: "wigner".into(),
            sigma: None,
            path: None,
            scale: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    /// `[lo, hi)`; defaults to the balanced width `√(2πħn)` centred on 0.
    #[serde(default)]
    pub domain: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeSpec {
    Exact,
    Direct,
    Spectral,
}

/// Explicit output axes `[lo, hi, count]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxesSpec {
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Dist,
    Cfn,
    Charfn,
    Marginals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_fields")]
    pub fields: Vec<FieldKind>,
    /// Operator for c-functions and expectations.
    #[serde(default)]
    pub operator: Option<OperatorSpec>,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_fields() -> Vec<FieldKind> {
    vec![FieldKind::Dist]
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: default_dir(),
            fields: default_fields(),
            operator: None,
        }
    }
}

impl JobConfig {
    /// Parse and validate; relative file paths are resolved against the config's directory.
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes =
            std::fs::read(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: JobConfig =
            serde_json::from_slice(&bytes).map_err(|e| CliError::config(format!("invalid config: {e}")))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok((cfg, bytes))
    }

    pub fn from_json(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut cfg: JobConfig =
            serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid config: {e}")))?;
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        fn fix(p: &mut PathBuf, base: &Path) {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        fn fix_op(op: &mut OperatorSpec, base: &Path) {
            match op {
                OperatorSpec::File { path } => fix(path, base),
                OperatorSpec::Poly { of, .. } => fix_op(of, base),
                OperatorSpec::Product { product } => product.iter_mut().for_each(|o| fix_op(o, base)),
                _ => {}
            }
        }
        self.pair.iter_mut().for_each(|o| fix_op(o, base));
        if let Some(o) = self.outputs.operator.as_mut() {
            fix_op(o, base);
        }
        match &mut self.state {
            StateSpec::File { path } => fix(path, base),
            StateSpec::Eigenstate { operator, .. } => fix_op(operator, base),
            _ => {}
        }
        if let Some(p) = self.kernel.path.as_mut() {
            fix(p, base);
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.system {
            SystemSpec::Custom { dim, .. } => Some(*dim),
            _ => self.grid.map(|g| g.n),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let n = self
            .dim()
            .ok_or_else(|| CliError::config("grid-based systems need a `grid` section"))?;
        if !(2..=MAX_DIM).contains(&n) {
            return Err(CliError::config(format!("dimension must be in 2..={MAX_DIM}, got {n}")));
        }
        let mut files = Vec::new();
        fn collect<'a>(op: &'a OperatorSpec, out: &mut Vec<&'a Path>) {
            match op {
                OperatorSpec::File { path } => out.push(path),
                OperatorSpec::Poly { of, .. } => collect(of, out),
                OperatorSpec::Product { product } => product.iter().for_each(|o| collect(o, out)),
                _ => {}
            }
        }
        self.pair.iter().for_each(|o| collect(o, &mut files));
        if let Some(o) = &self.outputs.operator {
            collect(o, &mut files);
        }
        match &self.state {
            StateSpec::File { path } => files.push(path),
            StateSpec::Eigenstate { operator, .. } => collect(operator, &mut files),
            _ => {}
        }
        if let Some(p) = &self.kernel.path {
            files.push(p);
        }
        for f in files {
            if !f.is_file() {
                return Err(CliError::config(format!(
                    "referenced file {} does not exist",
                    f.display()
                )));
            }
        }
        Ok(())
    }
}
