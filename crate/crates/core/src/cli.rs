//! Run configuration and the `levels`, `compare` and `scan` commands.
//!
//! Commands build a [`Table`] which is rendered either as CSV (17 significant
//! digits, fixed column and row order) or as a JSON document.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::correction::{compute_q_with, delta1_numeric, CorrectionScheme, QForm};
use crate::error::{Error, Result};
use crate::oracle::{fd_spectrum_auto, FdGrid, OracleSpectrum};
use crate::potential::{
    from_shape_class, make_builtin, PhysicalScale, ShapeClassSpec, WellDescriptor,
};
use crate::quadrature::{phase_at_asymptote, phase_integral, QuadratureConfig};
use crate::solver::{LevelSolver, QMode, SolverOptions, SpectrumReport};

pub const SHAPE_CLASS: &str = "shape-class";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Obj,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "obj" | "json" => Ok(OutputFormat::Obj),
            other => Err(Error::Config(format!(
                "unknown format `{other}` (csv or obj)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSection {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B", default)]
    pub b: f64,
    #[serde(rename = "C", default)]
    pub c: f64,
    #[serde(default)]
    pub a0: f64,
    #[serde(default)]
    pub a1: f64,
    #[serde(default)]
    pub a2: f64,
    #[serde(default)]
    pub s0: f64,
    #[serde(default = "default_shape_half_width")]
    pub half_width: f64,
}

fn default_shape_half_width() -> f64 {
    40.0
}

impl ShapeSection {
    fn spec(&self) -> ShapeClassSpec {
        ShapeClassSpec {
            a: self.a,
            b: self.b,
            c: self.c,
            a0: self.a0,
            a1: self.a1,
            a2: self.a2,
            s0: self.s0,
        }
    }

    fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "A" => &mut self.a,
            "B" => &mut self.b,
            "C" => &mut self.c,
            "a0" => &mut self.a0,
            "a1" => &mut self.a1,
            "a2" => &mut self.a2,
            "s0" => &mut self.s0,
            "half_width" => &mut self.half_width,
            other => {
                return Err(Error::Config(format!(
                    "shape class has no parameter `{other}`"
                )))
            }
        };
        *slot = value;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub n_nodes: Option<usize>,
    pub eps_stencil_factor: Option<f64>,
    pub tail_tol: Option<f64>,
    pub root_tol: Option<f64>,
    pub refine_limit: Option<u32>,
}

impl QuadratureSection {
    fn config(&self) -> QuadratureConfig {
        let d = QuadratureConfig::default();
        QuadratureConfig {
            n_nodes: self.n_nodes.unwrap_or(d.n_nodes),
            eps_stencil_factor: self.eps_stencil_factor.unwrap_or(d.eps_stencil_factor),
            tail_tol: self.tail_tol.unwrap_or(d.tail_tol),
            root_tol: self.root_tol.unwrap_or(d.root_tol),
            refine_limit: self.refine_limit.unwrap_or(d.refine_limit),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(rename = "L")]
    pub half_width: Option<f64>,
    #[serde(rename = "N")]
    pub points: Option<usize>,
    pub m: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub param: String,
    pub values: Vec<f64>,
}

/// A complete, reproducible run description.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub well: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub shape: Option<ShapeSection>,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub schemes: Vec<String>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub q_form: Option<String>,
    #[serde(default)]
    pub q_mode: Option<String>,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub oracle: OracleSection,
    #[serde(default)]
    pub scan: Option<ScanSection>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_beta() -> f64 {
    1.0
}

fn default_n_max() -> usize {
    10
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            well: String::new(),
            params: BTreeMap::new(),
            shape: None,
            beta: default_beta(),
            schemes: Vec::new(),
            n_max: default_n_max(),
            q_form: None,
            q_mode: None,
            quadrature: QuadratureSection::default(),
            oracle: OracleSection::default(),
            scan: None,
            format: OutputFormat::Csv,
            output: None,
        }
    }
}

pub const DEFAULT_ORACLE_L: f64 = 15.0;
pub const DEFAULT_ORACLE_N: usize = 4001;

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().replace('\n', " ")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Sets a well parameter; shape-class coefficients go to the `shape` section.
    pub fn set_param(&mut self, key: &str, value: f64) -> Result<()> {
        if self.well == SHAPE_CLASS {
            self.shape
                .get_or_insert(ShapeSection {
                    a: 1.0,
                    b: 0.0,
                    c: 0.0,
                    a0: 0.0,
                    a1: 0.0,
                    a2: 0.0,
                    s0: 0.0,
                    half_width: default_shape_half_width(),
                })
                .set(key, value)
        } else {
            self.params.insert(key.to_string(), value);
            Ok(())
        }
    }

    pub fn schemes(&self) -> Result<Vec<CorrectionScheme>> {
        if self.schemes.is_empty() {
            return Err(Error::Config("at least one scheme is required".into()));
        }
        self.schemes.iter().map(|s| s.parse()).collect()
    }

    pub fn scale(&self) -> Result<PhysicalScale> {
        PhysicalScale::new(self.beta)
    }

    pub fn solver_options(&self) -> Result<SolverOptions> {
        let quadrature = self.quadrature.config();
        quadrature.validate()?;
        let q_form = match &self.q_form {
            Some(s) => s.parse()?,
            None => QForm::Product,
        };
        let q_mode = match self.q_mode.as_deref() {
            None | Some("per-well") => QMode::PerWell,
            Some("per-level") => QMode::PerLevel,
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown q mode `{other}` (per-well or per-level)"
                )))
            }
        };
        Ok(SolverOptions {
            quadrature,
            q_form,
            q_mode,
            ..SolverOptions::default()
        })
    }

    pub fn build_well(&self) -> Result<WellDescriptor> {
        if self.well == SHAPE_CLASS {
            let shape = self
                .shape
                .ok_or_else(|| Error::Config("shape-class well needs a [shape] section".into()))?;
            return from_shape_class(shape.spec(), shape.half_width);
        }
        let params: Vec<(&str, f64)> = self.params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        make_builtin(&self.well, &params)
    }

    /// Validates everything a command needs before any numerics run.
    pub fn validate(&self) -> Result<()> {
        self.schemes()?;
        self.scale()?;
        self.solver_options()?;
        self.build_well()?;
        if let Some(n) = self.oracle.points {
            if n < 501 || n % 2 == 0 {
                return Err(Error::Config(format!(
                    "oracle N = {n} must be odd and >= 501"
                )));
            }
        }
        Ok(())
    }

    fn oracle_grid(&self, well: &WellDescriptor, top: f64) -> FdGrid {
        let points = self.oracle.points.unwrap_or(DEFAULT_ORACLE_N);
        let half_width = match (self.oracle.half_width, well.asymptote()) {
            (Some(l), _) => l,
            (None, Some(_)) => DEFAULT_ORACLE_L,
            (None, None) => confining_half_width(well, top),
        };
        FdGrid { half_width, points }
    }
}

/// Box half-width for a confining well: `V(±L)` at least six times the height of `top`.
fn confining_half_width(well: &WellDescriptor, top: f64) -> f64 {
    let (x0, v_min) = well.minimum();
    let wall = v_min + 6.0 * (top - v_min).max(1.0);
    let mut l = 1.0;
    while (well.value(x0 + l) < wall || well.value(x0 - l) < wall) && l < 1e6 {
        l *= 1.25;
    }
    l + x0.abs()
}

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(usize),
    Num(f64),
    Empty,
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Text(s) => serde_json::Value::String(s.clone()),
            Cell::Int(i) => serde_json::Value::from(*i),
            Cell::Num(x) => serde_json::Number::from_f64(*x)
                .map_or(serde_json::Value::Null, serde_json::Value::Number),
            Cell::Empty => serde_json::Value::Null,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Rows whose `scheme` column equals `scheme`.
    pub fn rows_for<'a>(&'a self, scheme: &'a str) -> impl Iterator<Item = &'a Vec<Cell>> + 'a {
        let idx = self.column("scheme");
        self.rows
            .iter()
            .filter(move |r| idx.and_then(|i| r[i].as_str()) == Some(scheme))
    }

    pub fn value(&self, row: &[Cell], column: &str) -> Option<f64> {
        self.column(column).and_then(|i| row[i].as_f64())
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer
            .write_record(&self.columns)
            .expect("writing to memory");
        for row in &self.rows {
            writer
                .write_record(row.iter().map(Cell::csv))
                .expect("writing to memory");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({ "command": self.command, "rows": rows });
        let mut text = serde_json::to_string_pretty(&doc).expect("serialisable");
        text.push('\n');
        text
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Obj => self.to_json(),
        }
    }
}

pub const LEVELS_COLUMNS: [&str; 9] = [
    "scheme", "n", "eps", "delta", "delta1", "q", "mu", "gamma", "residual",
];

pub const COMPARE_COLUMNS: [&str; 11] = [
    "scheme",
    "n",
    "eps",
    "eps_oracle",
    "abs_err",
    "delta",
    "delta_ex",
    "delta_err",
    "q",
    "mu",
    "gamma",
];

pub const SCAN_COLUMNS: [&str; 10] = [
    "param",
    "value",
    "scheme",
    "status",
    "eps0",
    "eps0_oracle",
    "delta1",
    "q",
    "mu",
    "gamma",
];

fn spectra(config: &RunConfig, well: &WellDescriptor) -> Result<Vec<SpectrumReport>> {
    let scale = config.scale()?;
    let opts = config.solver_options()?;
    config
        .schemes()?
        .into_iter()
        .map(|scheme| LevelSolver::new(well, scheme, scale, opts)?.spectrum(config.n_max))
        .collect()
}

/// One spectrum per scheme.
pub fn cmd_levels(config: &RunConfig) -> Result<Table> {
    config.validate()?;
    let well = config.build_well()?;
    let mut table = Table::new("levels", &LEVELS_COLUMNS);
    for report in spectra(config, &well)? {
        for level in &report.levels {
            table.rows.push(vec![
                Cell::Text(report.scheme.name().into()),
                Cell::Int(level.n),
                Cell::Num(level.eps),
                Cell::Num(level.delta),
                level.delta1.into(),
                level.q.into(),
                level.mu.into(),
                level.gamma.into(),
                Cell::Num(level.residual),
            ]);
        }
    }
    Ok(table)
}

/// Scheme spectra together with the oracle they were compared against.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub table: Table,
    pub oracle: OracleSpectrum,
    pub spectra: Vec<SpectrumReport>,
}

pub fn compare(config: &RunConfig) -> Result<Comparison> {
    config.validate()?;
    let well = config.build_well()?;
    let scale = config.scale()?;
    let cfg = config.quadrature.config();
    let spectra = spectra(config, &well)?;

    let top = spectra
        .iter()
        .flat_map(|r| r.levels.iter().map(|l| l.eps))
        .fold(well.v_min() + 1.0, f64::max);
    let max_levels = spectra.iter().map(|r| r.count()).max().unwrap_or(0);
    let m = match (config.oracle.m, well.asymptote()) {
        (Some(m), _) => Some(m),
        (None, Some(_)) => None,
        (None, None) => Some(max_levels.max(1)),
    };
    let oracle = fd_spectrum_auto(&well, scale, config.oracle_grid(&well, top), m)?;

    let mut table = Table::new("compare", &COMPARE_COLUMNS);
    for report in &spectra {
        let rows = report.count().max(oracle.len().min(config.n_max + 1));
        for n in 0..rows {
            let level = report.levels.get(n);
            let eps_oracle = oracle.get(n);
            let delta_ex = match eps_oracle {
                Some(e) => Some(phase_integral(&well, e, scale, &cfg)? - (n as f64 + 0.5)),
                None => None,
            };
            let abs_err = match (level, eps_oracle) {
                (Some(l), Some(e)) => Some((l.eps - e).abs()),
                _ => None,
            };
            let delta_err = match (level, delta_ex) {
                (Some(l), Some(d)) => Some(l.delta - d),
                _ => None,
            };
            table.rows.push(vec![
                Cell::Text(report.scheme.name().into()),
                Cell::Int(n),
                level.map(|l| l.eps).into(),
                eps_oracle.into(),
                abs_err.into(),
                level.map(|l| l.delta).into(),
                delta_ex.into(),
                delta_err.into(),
                level.and_then(|l| l.q).into(),
                level.and_then(|l| l.mu).into(),
                level.and_then(|l| l.gamma).into(),
            ]);
        }
    }
    Ok(Comparison {
        table,
        oracle,
        spectra,
    })
}

pub fn cmd_compare(config: &RunConfig) -> Result<Table> {
    Ok(compare(config)?.table)
}

/// Ground-state diagnostics across a grid of one well parameter.
pub fn cmd_scan(config: &RunConfig) -> Result<Table> {
    let scan = config
        .scan
        .as_ref()
        .ok_or_else(|| Error::Config("scan needs a sweep (parameter and values)".into()))?;
    if scan.values.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    config.validate()?;
    let schemes = config.schemes()?;
    let scale = config.scale()?;
    let opts = config.solver_options()?;

    let mut table = Table::new("scan", &SCAN_COLUMNS);
    for &value in &scan.values {
        let mut point = config.clone();
        point.set_param(&scan.param, value)?;
        let well = point.build_well()?;

        // q and μ describe the well itself, so they are reported for every scheme.
        let well_q = match well.asymptote() {
            Some(u) => {
                let phi_u = phase_at_asymptote(&well, scale, &opts.quadrature)?;
                let d1 = delta1_numeric(&well, 0.5 * (well.v_min() + u), scale, &opts.quadrature)?;
                Some(compute_q_with(opts.q_form, d1, phi_u)?)
            }
            None => None,
        };
        let m = if well.asymptote().is_some() {
            None
        } else {
            Some(1)
        };
        let oracle = fd_spectrum_auto(
            &well,
            scale,
            point.oracle_grid(&well, well.v_min() + 1.0),
            m,
        )?;

        for &scheme in &schemes {
            let solved = LevelSolver::new(&well, scheme, scale, opts)?.solve_level(0);
            let (status, level) = match solved {
                Ok(level) => ("ok", Some(level)),
                Err(Error::LevelNotFound { .. } | Error::RootNotBracketed { .. }) => {
                    ("missed", None)
                }
                Err(e) => return Err(e),
            };
            table.rows.push(vec![
                Cell::Text(scan.param.clone()),
                Cell::Num(value),
                Cell::Text(scheme.name().into()),
                Cell::Text(status.into()),
                level.as_ref().map(|l| l.eps).into(),
                oracle.get(0).into(),
                level.as_ref().and_then(|l| l.delta1).into(),
                well_q.into(),
                well_q.map(|q| 1.0 - q).into(),
                level.as_ref().and_then(|l| l.gamma).into(),
            ]);
        }
    }
    Ok(table)
}
