//! TOML run configuration.
//!
//! Parsing never stops at the first problem: every violation is collected
//! and returned together in [`CliError::Config`].

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use ghcyl::classifier::Budgets;
use ghcyl::spectral::{CylinderGrid, GridFunction};
use ghcyl::{ComplexPolynomial, OperatorSpec, TrigPolynomial, C64};
use serde::Serialize;
use toml::{Table, Value};

use crate::error::{CliError, CliResult};

pub const OPERATOR_KINDS: [&str; 3] = ["const_split", "first_order_t", "tube"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "json" => Some(Self::Json),
            "csv" => Some(Self::Csv),
            "svg" => Some(Self::Svg),
            _ => None,
        }
    }
}

/// Residual thresholds used to mark reports as passing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub const_residual: f64,
    pub tube_residual: f64,
    pub conjugation_residual: f64,
    pub ode_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { const_residual: 1e-6, tube_residual: 1e-5, conjugation_residual: 1e-6, ode_residual: 1e-5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: BTreeSet<Format>,
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

/// Closed-form test functions on the cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// `cos t · e^{−x²/2}`.
    GaussianCos,
    /// Mixed spectrum `2^{−|k|} √(2π) e^{−ξ²/2}`.
    PoissonGaussian,
    /// `e^{−x²/2}`, a single t-mode.
    GaussianMode,
}

impl Builtin {
    pub const NAMES: [&'static str; 3] = ["gaussian_cos", "poisson_gaussian", "gaussian_mode"];

    fn parse(s: &str) -> Option<Self> {
        match s {
            "gaussian_cos" => Some(Self::GaussianCos),
            "poisson_gaussian" => Some(Self::PoissonGaussian),
            "gaussian_mode" => Some(Self::GaussianMode),
            _ => None,
        }
    }

    pub fn sample(self, grid: CylinderGrid) -> GridFunction {
        GridFunction::from_fn(grid, |t, x| {
            let g = (-x * x / 2.0).exp();
            // Σ 2^{−|k|} e^{ikt} = (3/4) / (5/4 − cos t).
            let tpart = match self {
                Self::GaussianCos => t.cos(),
                Self::PoissonGaussian => 0.75 / (1.25 - t.cos()),
                Self::GaussianMode => 1.0,
            };
            C64::new(tpart * g, 0.0)
        })
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(Self::NAMES[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Forcing {
    Builtin(Builtin),
    Csv(PathBuf),
}

impl Forcing {
    pub fn load(&self, grid: CylinderGrid) -> CliResult<GridFunction> {
        match self {
            Self::Builtin(b) => Ok(b.sample(grid)),
            Self::Csv(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                GridFunction::from_csv(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
            }
        }
    }

    /// Path-free label for reports.
    pub fn label(&self) -> String {
        match self {
            Self::Builtin(b) => b.to_string(),
            Self::Csv(_) => "csv".to_string(),
        }
    }
}

/// Regularity claimed for `fit-decay`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Claims {
    pub sigma: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleConfig {
    pub sigma1: f64,
    pub mu: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Absent only when the config has no `[operator]` section and the
    /// command does not need one.
    pub operator: Option<OperatorSpec>,
    pub grid: CylinderGrid,
    pub budgets: Budgets,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
    pub forcing: Forcing,
    pub claims: Claims,
    pub counterexample: CounterexampleConfig,
    pub seed: u64,
}

impl RunConfig {
    pub fn operator(&self) -> CliResult<&OperatorSpec> {
        self.operator.as_ref().ok_or_else(|| CliError::Config(vec!["missing section [operator]".into()]))
    }
}

/// Command-line values that replace config entries before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<String>>,
    pub k_budget: Option<i64>,
    pub grid: Option<(i64, i64)>,
    pub x_half: Option<f64>,
    pub seed: Option<u64>,
}

impl Overrides {
    fn apply(&self, root: &mut Table) {
        let mut set = |section: &str, key: &str, v: Value| {
            let entry = root.entry(section).or_insert_with(|| Value::Table(Table::new()));
            if let Value::Table(t) = entry {
                t.insert(key.into(), v);
            }
        };
        if let Some(f) = &self.formats {
            set("output", "formats", Value::Array(f.iter().map(|s| Value::String(s.clone())).collect()));
        }
        if let Some(k) = self.k_budget {
            set("budgets", "k_budget", Value::Integer(k));
        }
        if let Some((m, n)) = self.grid {
            set("grid", "m", Value::Integer(m));
            set("grid", "n", Value::Integer(n));
        }
        if let Some(x) = self.x_half {
            set("grid", "x_half", Value::Float(x));
        }
        if let Some(s) = self.seed {
            root.insert("seed".into(), Value::Integer(s as i64));
        }
    }
}

/// Reads, overrides and validates a config file. Relative paths inside
/// the file resolve against its directory.
pub fn parse_config(path: &Path, overrides: &Overrides) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config_str(&text, &base, overrides)
}

pub fn parse_config_str(text: &str, base: &Path, overrides: &Overrides) -> CliResult<RunConfig> {
    let mut root: Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(vec![e.to_string()]))?;
    overrides.apply(&mut root);
    let mut cfg = Validator::default().run(&root, base)?;
    if let Some(out) = &overrides.out {
        cfg.output.dir = out.clone();
    }
    Ok(cfg)
}

/// Config used when no file is given; has no operator.
pub fn default_config(overrides: &Overrides) -> CliResult<RunConfig> {
    parse_config_str("", Path::new("."), overrides)
}

#[derive(Default)]
struct Validator {
    errs: Vec<String>,
}

impl Validator {
    fn run(mut self, root: &Table, base: &Path) -> CliResult<RunConfig> {
        self.allowed(
            root,
            "",
            &["operator", "grid", "budgets", "tolerances", "output", "forcing", "claims", "counterexample", "seed"],
        );
        let empty = Table::new();
        let operator = match self.table(root, "operator") {
            Some(t) => self.operator(t),
            None => None,
        };

        let g = self.table(root, "grid").unwrap_or(&empty);
        self.allowed(g, "grid", &["m", "n", "x_half"]);
        let m = self.count(g, "grid.m", 64);
        let n = self.count(g, "grid.n", 512);
        let x_half = self.positive(g, "grid.x_half", 12.0);
        for (name, v) in [("grid.m", m), ("grid.n", n)] {
            if v != 0 && (!v.is_power_of_two() || v < 2) {
                self.errs.push(format!("{name} = {v} is not a power of two >= 2"));
            }
        }
        let grid = CylinderGrid { m, n, x_half };

        let b = self.table(root, "budgets").unwrap_or(&empty);
        self.allowed(b, "budgets", &["k_budget", "xi_samples"]);
        let budgets = Budgets {
            k_budget: self.count(b, "budgets.k_budget", 64) as i64,
            xi_samples: self.count(b, "budgets.xi_samples", 400),
            ..Budgets::default()
        };

        let t = self.table(root, "tolerances").unwrap_or(&empty);
        self.allowed(t, "tolerances", &["const_residual", "tube_residual", "conjugation_residual", "ode_residual"]);
        let d = Tolerances::default();
        let tolerances = Tolerances {
            const_residual: self.positive(t, "tolerances.const_residual", d.const_residual),
            tube_residual: self.positive(t, "tolerances.tube_residual", d.tube_residual),
            conjugation_residual: self.positive(t, "tolerances.conjugation_residual", d.conjugation_residual),
            ode_residual: self.positive(t, "tolerances.ode_residual", d.ode_residual),
        };

        let o = self.table(root, "output").unwrap_or(&empty);
        self.allowed(o, "output", &["dir", "formats"]);
        let dir = match o.get("dir") {
            None => PathBuf::from("ghcyl-out"),
            Some(Value::String(s)) if !s.is_empty() => base.join(s),
            Some(v) => {
                self.errs.push(format!("output.dir must be a nonempty string, got {v}"));
                PathBuf::new()
            }
        };
        let formats = self.formats(o);
        let output = OutputConfig { dir, formats };

        let f = self.table(root, "forcing").unwrap_or(&empty);
        self.allowed(f, "forcing", &["builtin", "csv"]);
        let forcing = match (f.get("builtin"), f.get("csv")) {
            (Some(_), Some(_)) => {
                self.errs.push("forcing: give either builtin or csv, not both".into());
                Forcing::Builtin(Builtin::GaussianCos)
            }
            (None, Some(Value::String(p))) => Forcing::Csv(base.join(p)),
            (None, Some(v)) => {
                self.errs.push(format!("forcing.csv must be a path string, got {v}"));
                Forcing::Builtin(Builtin::GaussianCos)
            }
            (Some(Value::String(s)), None) => Forcing::Builtin(Builtin::parse(s).unwrap_or_else(|| {
                self.errs
                    .push(format!("forcing.builtin `{s}` is unknown; valid names are {}", Builtin::NAMES.join(", ")));
                Builtin::GaussianCos
            })),
            (Some(v), None) => {
                self.errs.push(format!("forcing.builtin must be a string, got {v}"));
                Forcing::Builtin(Builtin::GaussianCos)
            }
            (None, None) => Forcing::Builtin(Builtin::GaussianCos),
        };

        let c = self.table(root, "claims").unwrap_or(&empty);
        self.allowed(c, "claims", &["sigma", "mu"]);
        let claims = Claims { sigma: self.positive(c, "claims.sigma", 1.0), mu: self.positive(c, "claims.mu", 1.0) };

        let ce = self.table(root, "counterexample").unwrap_or(&empty);
        self.allowed(ce, "counterexample", &["sigma1", "mu", "delta"]);
        let counterexample = CounterexampleConfig {
            sigma1: self.positive(ce, "counterexample.sigma1", 1.5),
            mu: self.positive(ce, "counterexample.mu", 2.0),
            delta: self.positive(ce, "counterexample.delta", 0.3),
        };

        let seed = match root.get("seed") {
            None => 0,
            Some(Value::Integer(s)) if *s >= 0 => *s as u64,
            Some(v) => {
                self.errs.push(format!("seed must be a nonnegative integer, got {v}"));
                0
            }
        };

        if !self.errs.is_empty() {
            return Err(CliError::Config(self.errs));
        }
        Ok(RunConfig { operator, grid, budgets, tolerances, output, forcing, claims, counterexample, seed })
    }

    fn table<'a>(&mut self, root: &'a Table, name: &str) -> Option<&'a Table> {
        match root.get(name)? {
            Value::Table(t) => Some(t),
            v => {
                self.errs.push(format!("[{name}] must be a table, got {v}"));
                None
            }
        }
    }

    fn allowed(&mut self, t: &Table, section: &str, keys: &[&str]) {
        for k in t.keys().filter(|k| !keys.contains(&k.as_str())) {
            let full = if section.is_empty() { k.clone() } else { format!("{section}.{k}") };
            self.errs.push(format!("unknown key `{full}`"));
        }
    }

    fn number(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.errs.push(format!("{path} must be a number, got {v}"));
                None
            }
        }
    }

    fn positive(&mut self, t: &Table, path: &str, default: f64) -> f64 {
        let key = path.rsplit('.').next().unwrap_or(path);
        let Some(v) = t.get(key) else { return default };
        match self.number(v, path) {
            Some(x) if x.is_finite() && x > 0.0 => x,
            Some(x) => {
                self.errs.push(format!("{path} = {x} must be positive"));
                default
            }
            None => default,
        }
    }

    /// Integer `≥ 1`; a violation yields 0.
    fn count(&mut self, t: &Table, path: &str, default: usize) -> usize {
        let key = path.rsplit('.').next().unwrap_or(path);
        match t.get(key) {
            None => default,
            Some(Value::Integer(i)) if *i >= 1 => *i as usize,
            Some(Value::Integer(i)) => {
                self.errs.push(format!("{path} = {i} must be at least 1"));
                0
            }
            Some(v) => {
                self.errs.push(format!("{path} must be an integer, got {v}"));
                0
            }
        }
    }

    fn formats(&mut self, o: &Table) -> BTreeSet<Format> {
        let default = BTreeSet::from([Format::Json, Format::Csv]);
        let Some(v) = o.get("formats") else { return default };
        let Value::Array(items) = v else {
            self.errs.push(format!("output.formats must be an array of strings, got {v}"));
            return default;
        };
        let mut out = BTreeSet::new();
        for item in items {
            match item.as_str().and_then(Format::parse) {
                Some(f) => {
                    out.insert(f);
                }
                None => self.errs.push(format!("output.formats: `{item}` is not one of json, csv, svg")),
            }
        }
        out
    }

    fn complex(&mut self, v: &Value, path: &str) -> Option<C64> {
        match v.as_array().map(Vec::as_slice) {
            Some([re, im]) => {
                let re = self.number(re, &format!("{path}[0]"));
                let im = self.number(im, &format!("{path}[1]"));
                Some(C64::new(re?, im?))
            }
            _ => {
                self.errs.push(format!("{path} must be a [re, im] pair, got {v}"));
                None
            }
        }
    }

    fn polynomial(&mut self, t: &Table, path: &str) -> Option<ComplexPolynomial> {
        let key = path.rsplit('.').next().unwrap_or(path);
        let Some(v) = t.get(key) else {
            self.errs.push(format!("missing key `{path}`"));
            return None;
        };
        let Value::Array(items) = v else {
            self.errs.push(format!("{path} must be an array of [re, im] pairs"));
            return None;
        };
        let coeffs: Vec<Option<C64>> =
            items.iter().enumerate().map(|(i, c)| self.complex(c, &format!("{path}[{i}]"))).collect();
        coeffs.into_iter().collect::<Option<Vec<_>>>().map(ComplexPolynomial::new)
    }

    /// Absent keys mean the zero polynomial.
    fn trig(&mut self, t: &Table, path: &str) -> Option<TrigPolynomial> {
        let key = path.rsplit('.').next().unwrap_or(path);
        let Some(v) = t.get(key) else { return Some(TrigPolynomial::zero()) };
        let Value::Array(items) = v else {
            self.errs.push(format!("{path} must be an array of {{n, re, im}} records"));
            return None;
        };
        let mut terms = Vec::new();
        let mut ok = true;
        for (i, item) in items.iter().enumerate() {
            let p = format!("{path}[{i}]");
            let Value::Table(rec) = item else {
                self.errs.push(format!("{p} must be an {{n, re, im}} record, got {item}"));
                ok = false;
                continue;
            };
            self.allowed(rec, &p, &["n", "re", "im"]);
            let n = match rec.get("n") {
                Some(Value::Integer(n)) => Some(*n),
                Some(v) => {
                    self.errs.push(format!("{p}.n must be an integer, got {v}"));
                    None
                }
                None => {
                    self.errs.push(format!("missing key `{p}.n`"));
                    None
                }
            };
            let re = rec.get("re").map_or(Some(0.0), |v| self.number(v, &format!("{p}.re")));
            let im = rec.get("im").map_or(Some(0.0), |v| self.number(v, &format!("{p}.im")));
            match (n, re, im) {
                (Some(n), Some(re), Some(im)) => terms.push((n, C64::new(re, im))),
                _ => ok = false,
            }
        }
        ok.then(|| TrigPolynomial::new(terms))
    }

    fn operator(&mut self, t: &Table) -> Option<OperatorSpec> {
        let kind = match t.get("kind") {
            Some(Value::String(k)) => k.as_str(),
            Some(v) => {
                self.errs.push(format!("operator.kind must be a string, got {v}"));
                return None;
            }
            None => {
                self.errs.push(format!("missing key `operator.kind` (one of {})", OPERATOR_KINDS.join(", ")));
                return None;
            }
        };
        match kind {
            "const_split" => {
                self.allowed(t, "operator", &["kind", "p", "q"]);
                let p = self.polynomial(t, "operator.p");
                let q = self.polynomial(t, "operator.q");
                Some(OperatorSpec::const_split(p?, q?))
            }
            "first_order_t" => {
                self.allowed(t, "operator", &["kind", "c1", "c2", "c3"]);
                let mut get = |key: &str, default: Option<C64>| match t.get(key) {
                    Some(v) => self.complex(v, &format!("operator.{key}")),
                    None if default.is_some() => default,
                    None => {
                        self.errs.push(format!("missing key `operator.{key}`"));
                        None
                    }
                };
                let c1 = get("c1", None);
                let c2 = get("c2", Some(C64::new(1.0, 0.0)));
                let c3 = get("c3", None);
                Some(OperatorSpec::first_order_t(c1?, c2?, c3?))
            }
            "tube" => {
                self.allowed(t, "operator", &["kind", "a", "b", "q"]);
                let a = self.trig(t, "operator.a");
                let b = self.trig(t, "operator.b");
                let q = self.trig(t, "operator.q");
                match OperatorSpec::tube(a?, b?, q?) {
                    Ok(op) => Some(op),
                    Err(e) => {
                        self.errs.push(format!("operator: {e}"));
                        None
                    }
                }
            }
            other => {
                self.errs
                    .push(format!("unknown operator kind `{other}`; valid kinds are {}", OPERATOR_KINDS.join(", ")));
                None
            }
        }
    }
}
