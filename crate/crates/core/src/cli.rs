//! The `ctm-zeta` command line: spectra, zeta sweeps, coefficient tables,
//! walk distributions, and the self-verification suites.
//!
//! Exit codes: 0 success, 1 when any sweep row errored (remaining rows still
//! run) or a verification failed, 2 on usage, parse or I/O errors.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::lattice::kernel;
use crate::linalg::{evolution_matrix, lu_determinant, matrix_power_trace, ComplexMatrix, EvolutionParams};
use crate::spectra::{
    build_torus_transition, hermitian_eigenvalues, torus_eigenvalues, Spectrum, TorusSpec,
    TransitionMatrix,
};
use crate::verify::{self, Level};
use crate::zeta::{
    ctm_coeff, ctm_zeta_inverse_spectral, dtm_coeff, dtm_zeta_inverse, dtrw_return_probability,
    torus_coeff_finite, torus_coeff_limit_bessel, torus_coeff_limit_quadrature,
    torus_dtm_coeff_finite, torus_dtm_zeta_inverse_finite, torus_zeta_inverse_finite,
    torus_zeta_inverse_limit, ZetaValue, DEFAULT_LIMIT_GRID, MIN_LIMIT_GRID,
};

/// Largest vertex count for which sweeps also run the dense-matrix
/// cross-checks (determinant, trace).
pub const CROSSCHECK_MAX_VERTICES: usize = 512;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ROW_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ctm-zeta", version, about = "Zeta functions of continuous-time walks on tori and graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of the transition matrix.
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Inverse zeta values over a (ξ, t, u) sweep.
    Zeta(SweepArgs),
    /// Coefficients C_r over a (ξ, t, r) sweep.
    Coeff(SweepArgs),
    /// Walk distributions and kernels on ℤ.
    Walk {
        kind: WalkKind,
        /// Interpolation angle for `kernel` (radians, or classical/quantum).
        #[arg(long, default_value = "0")]
        xi: String,
        #[arg(long)]
        t: f64,
        /// Starting truncation radius; widened until normalized.
        #[arg(long, default_value_t = 0)]
        radius: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the built-in consistency suites.
    Verify {
        #[arg(value_enum, default_value = "quick")]
        level: VerifyLevel,
    },
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct GraphArgs {
    /// Torus `d,N`.
    #[arg(long)]
    pub torus: Option<String>,
    /// Dense CSV transition matrix.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "ctm")]
    pub model: Model,
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Comma-separated angles (radians, or `classical` / `quantum`).
    #[arg(long, default_value = "0")]
    pub xi: String,
    /// Comma-separated times.
    #[arg(long, default_value = "1")]
    pub t: String,
    /// Semicolon-separated complex values `re,im` (or plain reals).
    #[arg(long, default_value = "0.5")]
    pub u: String,
    /// Comma-separated coefficient indices.
    #[arg(long, default_value = "1")]
    pub r: String,
    /// Grid size for N → ∞ quadratures.
    #[arg(long)]
    pub grid: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Ctm,
    Dtm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WalkKind {
    Ctrw,
    Ctqw,
    Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyLevel {
    Quick,
    Full,
}

// ---------------------------------------------------------------------------
// sweep configuration

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    Torus(TorusSpec),
    MatrixFile(PathBuf),
}

/// A parsed sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub model: Model,
    pub graph: GraphSpec,
    pub xi_list: Vec<f64>,
    pub t_list: Vec<f64>,
    pub u_list: Vec<Complex64>,
    pub r_list: Vec<u32>,
    pub limit: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    pub fn from_args(args: &SweepArgs) -> Result<Self> {
        let t_list: Vec<f64> = parse_list(&args.t, "t")?;
        if let Some(t) = t_list.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(Error::Parse(format!("t = {t} must be finite and ≥ 0")));
        }
        Ok(Self {
            model: args.model,
            graph: parse_graph(&args.graph)?,
            xi_list: parse_xi_list(&args.xi)?,
            t_list,
            u_list: parse_u_list(&args.u)?,
            r_list: parse_list(&args.r, "r")?,
            limit: args.grid,
            format: args.output.format,
            out: args.output.out.clone(),
        })
    }
}

pub fn parse_graph(args: &GraphArgs) -> Result<GraphSpec> {
    match (&args.torus, &args.matrix) {
        (Some(t), None) => {
            let parts: Vec<&str> = t.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("--torus expects d,N, got {t:?}")));
            }
            let d = parts[0]
                .parse()
                .map_err(|_| Error::Parse(format!("bad torus dimension {:?}", parts[0])))?;
            let n = parts[1]
                .parse()
                .map_err(|_| Error::Parse(format!("bad torus side {:?}", parts[1])))?;
            Ok(GraphSpec::Torus(TorusSpec::new(d, n)?))
        }
        (None, Some(path)) => Ok(GraphSpec::MatrixFile(path.clone())),
        _ => Err(Error::Parse("give exactly one of --torus or --matrix".into())),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    let out: Vec<T> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| Error::Parse(format!("bad {what} value {p:?}"))))
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::Parse(format!("empty {what} list")));
    }
    Ok(out)
}

/// `ξ` values in radians; `classical` is 0 and `quantum` is π/2.
pub fn parse_xi(token: &str) -> Result<f64> {
    match token.trim() {
        "classical" => Ok(0.0),
        "quantum" => Ok(FRAC_PI_2),
        other => match other.parse::<f64>() {
            Ok(xi) if (0.0..=FRAC_PI_2).contains(&xi) => Ok(xi),
            Ok(xi) => Err(Error::Parse(format!("ξ = {xi} outside [0, π/2]"))),
            Err(_) => Err(Error::Parse(format!("bad ξ value {other:?}"))),
        },
    }
}

fn parse_xi_list(s: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_xi)
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::Parse("empty ξ list".into()));
    }
    Ok(out)
}

/// `re,im;re,im;…`; an entry without a comma is real.
pub fn parse_u_list(s: &str) -> Result<Vec<Complex64>> {
    let out: Vec<Complex64> = s
        .split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let parts: Vec<&str> = p.split(',').map(str::trim).collect();
            let num = |x: &str| {
                x.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad u component {x:?}")))
            };
            match parts.as_slice() {
                [re] => Ok(Complex64::new(num(re)?, 0.0)),
                [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
                _ => Err(Error::Parse(format!("bad u value {p:?}"))),
            }
        })
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::Parse("empty u list".into()));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// tables

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Complex(Complex64),
    Text(String),
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Scalar,
    Complex,
}

/// Rows of typed cells. Complex columns serialize as `<name>_re,<name>_im`
/// in CSV and as `[re, im]` in JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<(&'static str, ColumnKind)>,
    pub rows: Vec<Vec<Cell>>,
}

/// 17 significant digits, scientific.
fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

impl Table {
    fn new(command: &'static str, columns: Vec<(&'static str, ColumnKind)>) -> Self {
        Self {
            command,
            columns,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut header = Vec::new();
        for (name, kind) in &self.columns {
            match kind {
                ColumnKind::Scalar => header.push(name.to_string()),
                ColumnKind::Complex => {
                    header.push(format!("{name}_re"));
                    header.push(format!("{name}_im"));
                }
            }
        }
        let mut out = header.join(",");
        out.push('\n');
        for row in &self.rows {
            let mut fields = Vec::new();
            for (cell, (_, kind)) in row.iter().zip(&self.columns) {
                match (cell, kind) {
                    (Cell::Complex(z), _) => {
                        fields.push(fmt_real(z.re));
                        fields.push(fmt_real(z.im));
                    }
                    (Cell::Empty, ColumnKind::Complex) => {
                        fields.push(String::new());
                        fields.push(String::new());
                    }
                    (Cell::Empty, ColumnKind::Scalar) => fields.push(String::new()),
                    (Cell::Int(i), _) => fields.push(i.to_string()),
                    (Cell::Real(x), _) => fields.push(fmt_real(*x)),
                    (Cell::Text(s), _) => fields.push(csv_escape(s)),
                }
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (cell, (name, _)) in row.iter().zip(&self.columns) {
                    let v = match cell {
                        Cell::Int(i) => json!(i),
                        Cell::Real(x) => json!(x),
                        Cell::Complex(z) => json!([z.re, z.im]),
                        Cell::Text(s) => json!(s),
                        Cell::Empty => Value::Null,
                    };
                    obj.insert(name.to_string(), v);
                }
                Value::Object(obj)
            })
            .collect();
        let columns: Vec<&str> = self.columns.iter().map(|(n, _)| *n).collect();
        let doc = json!({
            "schema_version": "1",
            "command": self.command,
            "columns": columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn has_errors(&self) -> bool {
        let Some(idx) = self.columns.iter().position(|(n, _)| *n == "error") else {
            return false;
        };
        self.rows.iter().any(|r| matches!(&r[idx], Cell::Text(s) if !s.is_empty()))
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt_complex(z: Option<Complex64>) -> Cell {
    z.map_or(Cell::Empty, Cell::Complex)
}

fn opt_real(x: Option<f64>) -> Cell {
    x.map_or(Cell::Empty, Cell::Real)
}

// ---------------------------------------------------------------------------
// graph loading

/// A loaded graph: torus (closed form available) or dense matrix.
enum Graph {
    Torus(TorusSpec),
    Matrix(TransitionMatrix),
}

impl Graph {
    fn load(spec: &GraphSpec) -> Result<Self> {
        Ok(match spec {
            GraphSpec::Torus(t) => Graph::Torus(*t),
            GraphSpec::MatrixFile(path) => Graph::Matrix(TransitionMatrix::from_csv_path(path)?),
        })
    }

    fn vertex_count(&self) -> usize {
        match self {
            Graph::Torus(t) => t.vertex_count(),
            Graph::Matrix(m) => m.n(),
        }
    }

    /// Dense matrix when small enough for cross-checks.
    fn dense(&self) -> Result<Option<TransitionMatrix>> {
        match self {
            Graph::Torus(t) if t.vertex_count() <= CROSSCHECK_MAX_VERTICES => {
                Ok(Some(build_torus_transition(t)?))
            }
            Graph::Torus(_) => Ok(None),
            Graph::Matrix(m) => Ok(Some(m.clone())),
        }
    }

    /// Spectrum when obtainable (torus closed form or symmetric matrix).
    fn spectrum(&self) -> Option<Spectrum> {
        match self {
            Graph::Torus(t) => Some(crate::spectra::torus_spectrum(t)),
            Graph::Matrix(m) => hermitian_eigenvalues(m).ok(),
        }
    }
}

// ---------------------------------------------------------------------------
// commands

pub fn cmd_spectrum(graph: &GraphSpec) -> Result<Table> {
    let mut table = Table::new(
        "spectrum",
        vec![("index", ColumnKind::Scalar), ("lambda", ColumnKind::Complex)],
    );
    let values: Vec<Complex64> = match Graph::load(graph)? {
        Graph::Torus(t) => torus_eigenvalues(&t)
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect(),
        Graph::Matrix(m) => hermitian_eigenvalues(&m)?.values().to_vec(),
    };
    for (i, v) in values.into_iter().enumerate() {
        table.push(vec![Cell::Int(i as i64), Cell::Complex(v)]);
    }
    Ok(table)
}

fn relative_residual(det: Complex64, value: &ZetaValue, n: usize) -> f64 {
    (det - value.determinant_power(n)).norm() / (1.0 + det.norm())
}

fn det_identity_minus(m: &ComplexMatrix, u: Complex64) -> Complex64 {
    let mut a = m.scale(-u);
    for i in 0..m.n() {
        a.set(i, i, a.get(i, i) + Complex64::new(1.0, 0.0));
    }
    lu_determinant(&a)
}

fn check_u(u: Complex64) -> Result<()> {
    // every supported model has ρ = 1
    if u.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::Radius {
            rho: 1.0,
            product: u.norm(),
        })
    }
}

pub fn cmd_zeta(config: &SweepConfig) -> Result<Table> {
    let mut table = Table::new(
        "zeta",
        vec![
            ("model", ColumnKind::Scalar),
            ("xi", ColumnKind::Scalar),
            ("t", ColumnKind::Scalar),
            ("u", ColumnKind::Complex),
            ("method", ColumnKind::Scalar),
            ("log_zeta_inverse", ColumnKind::Complex),
            ("zeta_inverse", ColumnKind::Complex),
            ("determinant", ColumnKind::Complex),
            ("residual", ColumnKind::Scalar),
            ("error", ColumnKind::Scalar),
        ],
    );
    let graph = Graph::load(&config.graph)?;
    let dense = graph.dense()?;
    let spectrum = graph.spectrum();
    let n = graph.vertex_count();

    let row = |model: &str,
               xi: Option<f64>,
               t: Option<f64>,
               u: Complex64,
               method: &str,
               value: Option<ZetaValue>,
               det: Option<Complex64>,
               residual: Option<f64>,
               error: Option<&Error>| {
        vec![
            Cell::Text(model.into()),
            opt_real(xi),
            opt_real(t),
            Cell::Complex(u),
            Cell::Text(method.into()),
            opt_complex(value.map(|v| v.log_zeta_inverse)),
            opt_complex(value.map(|v| v.zeta_inverse)),
            opt_complex(det),
            opt_real(residual),
            Cell::Text(error.map(|e| e.to_string()).unwrap_or_default()),
        ]
    };

    match config.model {
        Model::Ctm => {
            for &xi in &config.xi_list {
                for &t in &config.t_list {
                    let params = match EvolutionParams::new(xi, t) {
                        Ok(p) => p,
                        Err(e) => {
                            for &u in &config.u_list {
                                table.push(row("ctm", Some(xi), Some(t), u, "-", None, None, None, Some(&e)));
                            }
                            continue;
                        }
                    };
                    let evolved = dense.as_ref().map(|p| evolution_matrix(p, params));
                    for &u in &config.u_list {
                        let method = match graph {
                            Graph::Torus(_) => "grid",
                            Graph::Matrix(_) => "spectral",
                        };
                        let result = (|| -> Result<(Option<ZetaValue>, Option<Complex64>)> {
                            check_u(u)?;
                            let value = match (&graph, &spectrum) {
                                (Graph::Torus(spec), _) => Some(torus_zeta_inverse_finite(spec, params, u)?),
                                (Graph::Matrix(_), Some(s)) => Some(ctm_zeta_inverse_spectral(s, params, u)?),
                                (Graph::Matrix(_), None) => None,
                            };
                            let det = match &evolved {
                                Some(Ok(m)) => Some(det_identity_minus(m, u)),
                                Some(Err(e)) => return Err(e.clone()),
                                None => None,
                            };
                            Ok((value, det))
                        })();
                        match result {
                            Ok((value, det)) => {
                                let residual = match (value, det) {
                                    (Some(v), Some(d)) => Some(relative_residual(d, &v, n)),
                                    _ => None,
                                };
                                let method = if value.is_none() { "determinant" } else { method };
                                table.push(row("ctm", Some(xi), Some(t), u, method, value, det, residual, None));
                            }
                            Err(e) => table.push(row("ctm", Some(xi), Some(t), u, method, None, None, None, Some(&e))),
                        }
                        if let (Some(grid), Graph::Torus(spec)) = (config.limit, &graph) {
                            match torus_zeta_inverse_limit(spec.d(), params, u, grid) {
                                Ok(est) => table.push(row(
                                    "ctm", Some(xi), Some(t), u, "limit", Some(est.value), None,
                                    Some(est.two_grid_delta), None,
                                )),
                                Err(e) => table.push(row("ctm", Some(xi), Some(t), u, "limit", None, None, None, Some(&e))),
                            }
                        }
                    }
                }
            }
        }
        Model::Dtm => {
            for &u in &config.u_list {
                let result = (|| -> Result<(Option<ZetaValue>, Option<Complex64>)> {
                    check_u(u)?;
                    let value = match (&graph, &spectrum) {
                        (Graph::Torus(spec), _) => Some(torus_dtm_zeta_inverse_finite(spec, u)?),
                        (Graph::Matrix(_), Some(s)) => Some(dtm_zeta_inverse(s, u)?),
                        (Graph::Matrix(_), None) => None,
                    };
                    let det = dense
                        .as_ref()
                        .map(|p| det_identity_minus(&ComplexMatrix::from_transition(p), u));
                    Ok((value, det))
                })();
                let method = match (&graph, &spectrum) {
                    (Graph::Torus(_), _) => "grid",
                    (Graph::Matrix(_), Some(_)) => "spectral",
                    (Graph::Matrix(_), None) => "determinant",
                };
                match result {
                    Ok((value, det)) => {
                        let residual = match (value, det) {
                            (Some(v), Some(d)) => Some(relative_residual(d, &v, n)),
                            _ => None,
                        };
                        table.push(row("dtm", None, None, u, method, value, det, residual, None));
                    }
                    Err(e) => table.push(row("dtm", None, None, u, method, None, None, None, Some(&e))),
                }
            }
        }
    }
    Ok(table)
}

pub fn cmd_coeff(config: &SweepConfig) -> Result<Table> {
    let mut table = Table::new(
        "coeff",
        vec![
            ("model", ColumnKind::Scalar),
            ("xi", ColumnKind::Scalar),
            ("t", ColumnKind::Scalar),
            ("r", ColumnKind::Scalar),
            ("finite", ColumnKind::Complex),
            ("trace", ColumnKind::Complex),
            ("limit", ColumnKind::Complex),
            ("limit_delta", ColumnKind::Scalar),
            ("closed_form", ColumnKind::Complex),
            ("error", ColumnKind::Scalar),
        ],
    );
    let graph = Graph::load(&config.graph)?;
    let dense = graph.dense()?;
    let spectrum = graph.spectrum();
    let grid = config.limit.unwrap_or(DEFAULT_LIMIT_GRID);
    let n = graph.vertex_count() as f64;

    struct Cols {
        finite: Option<Complex64>,
        trace: Option<Complex64>,
        limit: Option<Complex64>,
        delta: Option<f64>,
        closed: Option<Complex64>,
    }

    let empty_row = |model: &str, xi: Option<f64>, t: Option<f64>, r: u32, e: &Error| {
        vec![
            Cell::Text(model.into()),
            opt_real(xi),
            opt_real(t),
            Cell::Int(r as i64),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Text(e.to_string()),
        ]
    };
    let full_row = |model: &str, xi: Option<f64>, t: Option<f64>, r: u32, c: Cols| {
        vec![
            Cell::Text(model.into()),
            opt_real(xi),
            opt_real(t),
            Cell::Int(r as i64),
            opt_complex(c.finite),
            opt_complex(c.trace),
            opt_complex(c.limit),
            opt_real(c.delta),
            opt_complex(c.closed),
            Cell::Text(String::new()),
        ]
    };

    match config.model {
        Model::Ctm => {
            for &xi in &config.xi_list {
                for &t in &config.t_list {
                    let params = match EvolutionParams::new(xi, t) {
                        Ok(p) => p,
                        Err(e) => {
                            for &r in &config.r_list {
                                table.push(empty_row("ctm", Some(xi), Some(t), r, &e));
                            }
                            continue;
                        }
                    };
                    let evolved = dense.as_ref().map(|p| evolution_matrix(p, params));
                    for &r in &config.r_list {
                        let result = (|| -> Result<Cols> {
                            let finite = match (&graph, &spectrum) {
                                (Graph::Torus(spec), _) => Some(torus_coeff_finite(spec, params, r)?.c),
                                (Graph::Matrix(_), Some(s)) => Some(ctm_coeff(s, params, r)?.c),
                                (Graph::Matrix(_), None) => None,
                            };
                            let trace = match &evolved {
                                Some(Ok(m)) if r > 0 => Some(matrix_power_trace(m, r) / n),
                                Some(Err(e)) => return Err(e.clone()),
                                _ => None,
                            };
                            let (limit, delta, closed) = match &graph {
                                Graph::Torus(spec) => {
                                    let est = torus_coeff_limit_quadrature(spec.d(), params, r, grid)?;
                                    let closed = torus_coeff_limit_bessel(spec.d(), params, r)?;
                                    (Some(est.value.c), Some(est.two_grid_delta), Some(closed.c))
                                }
                                Graph::Matrix(_) => (None, None, None),
                            };
                            Ok(Cols { finite, trace, limit, delta, closed })
                        })();
                        match result {
                            Ok(c) => table.push(full_row("ctm", Some(xi), Some(t), r, c)),
                            Err(e) => table.push(empty_row("ctm", Some(xi), Some(t), r, &e)),
                        }
                    }
                }
            }
        }
        Model::Dtm => {
            for &r in &config.r_list {
                let result = (|| -> Result<Cols> {
                    let finite = match (&graph, &spectrum) {
                        (Graph::Torus(spec), _) => Some(torus_dtm_coeff_finite(spec, r)?.c),
                        (Graph::Matrix(_), Some(s)) => Some(dtm_coeff(s, r)?.c),
                        (Graph::Matrix(_), None) => None,
                    };
                    let trace = match &dense {
                        Some(p) if r > 0 => {
                            Some(matrix_power_trace(&ComplexMatrix::from_transition(p), r) / n)
                        }
                        _ => None,
                    };
                    let (limit, delta, closed) = match &graph {
                        Graph::Torus(spec) => {
                            if grid < MIN_LIMIT_GRID {
                                return Err(Error::Size(format!(
                                    "limit grid {grid} below minimum {MIN_LIMIT_GRID}"
                                )));
                            }
                            let fine = torus_dtm_coeff_finite(&TorusSpec::new(spec.d(), grid)?, r)?.c;
                            let coarse =
                                torus_dtm_coeff_finite(&TorusSpec::new(spec.d(), grid / 2)?, r)?.c;
                            let closed = if spec.d() <= 2 {
                                Some(Complex64::new(dtrw_return_probability(spec.d(), r, grid)?.value, 0.0))
                            } else {
                                None
                            };
                            (Some(fine), Some((fine - coarse).norm()), closed)
                        }
                        Graph::Matrix(_) => (None, None, None),
                    };
                    Ok(Cols { finite, trace, limit, delta, closed })
                })();
                match result {
                    Ok(c) => table.push(full_row("dtm", None, None, r, c)),
                    Err(e) => table.push(empty_row("dtm", None, None, r, &e)),
                }
            }
        }
    }
    Ok(table)
}

pub fn cmd_walk(kind: WalkKind, xi: f64, t: f64, radius: usize) -> Result<Table> {
    let xi = match kind {
        WalkKind::Ctrw => 0.0,
        WalkKind::Ctqw => FRAC_PI_2,
        WalkKind::Kernel => xi,
    };
    let k = kernel(EvolutionParams::new(xi, t)?, radius)?;
    let r = k.radius() as i64;
    let sites = (-r..=r).zip(k.values().iter().copied());
    let table = match kind {
        WalkKind::Ctrw | WalkKind::Ctqw => {
            let mut table = Table::new(
                "walk",
                vec![("site", ColumnKind::Scalar), ("probability", ColumnKind::Scalar)],
            );
            for (x, g) in sites {
                let p = if kind == WalkKind::Ctrw { g.re } else { g.norm_sqr() };
                table.push(vec![Cell::Int(x), Cell::Real(p)]);
            }
            table
        }
        WalkKind::Kernel => {
            let mut table = Table::new(
                "walk",
                vec![("site", ColumnKind::Scalar), ("value", ColumnKind::Complex)],
            );
            for (x, g) in sites {
                table.push(vec![Cell::Int(x), Cell::Complex(g)]);
            }
            table
        }
    };
    Ok(table)
}

/// Runs the suites, writing one line per check; true when all passed.
pub fn cmd_verify(level: Level, out: &mut dyn Write) -> std::io::Result<bool> {
    let mut all = true;
    for outcome in verify::run(level) {
        writeln!(out, "{}", outcome.line())?;
        all &= outcome.passed;
    }
    Ok(all)
}

fn emit(table: &Table, output: &OutputArgs) -> Result<()> {
    let text = table.render(output.format);
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_table(table: Result<Table>, output: &OutputArgs) -> i32 {
    match table.and_then(|t| emit(&t, output).map(|_| t)) {
        Ok(t) if t.has_errors() => EXIT_ROW_ERROR,
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Executes a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Spectrum { graph, output } => {
            run_table(parse_graph(&graph).and_then(|g| cmd_spectrum(&g)), &output)
        }
        Command::Zeta(args) => run_table(SweepConfig::from_args(&args).and_then(|c| cmd_zeta(&c)), &args.output),
        Command::Coeff(args) => run_table(SweepConfig::from_args(&args).and_then(|c| cmd_coeff(&c)), &args.output),
        Command::Walk { kind, xi, t, radius, output } => {
            run_table(parse_xi(&xi).and_then(|xi| cmd_walk(kind, xi, t, radius)), &output)
        }
        Command::Verify { level } => {
            let level = match level {
                VerifyLevel::Quick => Level::Quick,
                VerifyLevel::Full => Level::Full,
            };
            let stdout = std::io::stdout();
            match cmd_verify(level, &mut stdout.lock()) {
                Ok(true) => EXIT_OK,
                Ok(false) => EXIT_ROW_ERROR,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_USAGE
                }
            }
        }
    }
}

/// Parses `std::env::args` and runs; clap usage errors exit with code 2.
pub fn main_from_env() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_tokens() {
        assert_eq!(parse_xi("quantum").unwrap(), FRAC_PI_2);
        assert_eq!(parse_xi("classical").unwrap(), 0.0);
        assert!(parse_xi("nope").is_err());
        let us = parse_u_list("0.3; 0,0.5 ;-0.25,0.25").unwrap();
        assert_eq!(us, vec![
            Complex64::new(0.3, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(-0.25, 0.25)
        ]);
        assert!(parse_u_list("1,2,3").is_err());
        assert!(parse_u_list("").is_err());
        assert!(parse_list::<u32>("1,x", "r").is_err());
        let g = parse_graph(&GraphArgs { torus: Some("2, 3".into()), matrix: None }).unwrap();
        assert_eq!(g, GraphSpec::Torus(TorusSpec::new(2, 3).unwrap()));
        assert!(parse_graph(&GraphArgs { torus: Some("2".into()), matrix: None }).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("x", vec![("a", ColumnKind::Scalar), ("z", ColumnKind::Complex)]);
        t.push(vec![Cell::Int(3), Cell::Complex(Complex64::new(0.5, -1.0))]);
        t.push(vec![Cell::Text("a,b".into()), Cell::Empty]);
        assert_eq!(
            t.to_csv(),
            "a,z_re,z_im\n3,5.0000000000000000e-1,-1.0000000000000000e0\n\"a,b\",,\n"
        );
        let json: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(json["schema_version"], "1");
        assert_eq!(json["rows"][0]["z"], json!([0.5, -1.0]));
    }

    #[test]
    fn walk_at_time_zero_is_single_row() {
        let t = cmd_walk(WalkKind::Ctrw, 0.0, 0.0, 0).unwrap();
        assert_eq!(t.rows, vec![vec![Cell::Int(0), Cell::Real(1.0)]]);
    }

    #[test]
    fn zeta_rows_and_errors() {
        let config = SweepConfig {
            model: Model::Ctm,
            graph: GraphSpec::Torus(TorusSpec::new(1, 8).unwrap()),
            xi_list: vec![0.0],
            t_list: vec![0.0, 1.0],
            u_list: vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(1.5, 0.0)],
            r_list: vec![1],
            limit: Some(64),
            format: Format::Csv,
            out: None,
        };
        let table = cmd_zeta(&config).unwrap();
        assert!(table.has_errors());
        let zeta_col = 6;
        let resid_col = 8;
        let mut checked = 0;
        for row in &table.rows {
            let (Cell::Complex(u), Cell::Real(t)) = (&row[3], &row[2]) else { panic!() };
            if let Cell::Complex(z) = row[zeta_col] {
                if u.norm() == 0.0 {
                    assert_eq!(z, Complex64::new(1.0, 0.0));
                    checked += 1;
                }
                if *t == 0.0 && u.re == 0.5 {
                    assert!((z - Complex64::new(0.5, 0.0)).norm() < 1e-15);
                    checked += 1;
                }
            }
            if let Cell::Real(res) = row[resid_col] {
                assert!(res <= 1e-9);
            }
        }
        assert!(checked >= 4);
    }
}
