//! Refinement sweeps over `(p, N, method)` cells for the source and
//! eigenvalue problems, plus CSV / markdown reporting.
//!
//! Cells run in parallel; results are merged in configuration order so the
//! output never depends on scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Deserialize;

use crate::analytic::{self, ExactEigenpair, ExactFunction};
use crate::assembly::{self, InterfaceProblem};
use crate::basis::{DofVector, EnrichedSpace, Method};
use crate::densela;
use crate::error::{Error, Result};
use crate::errors::{self, ErrorRecord};
use crate::mesh::Mesh1D;

/// Largest degree accepted by a sweep.
pub const MAX_SWEEP_DEGREE: usize = 6;

/// Minimum relative gap between neighbouring exact eigenvalues for rank
/// matching to be trusted.
pub const EIGEN_GAP: f64 = 0.01;

/// Samples written by [`dump_eigenfunction`].
pub const DUMP_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Source,
    Eigen,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Source => "source",
            ProblemKind::Eigen => "eigen",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "source" => Ok(ProblemKind::Source),
            "eigen" => Ok(ProblemKind::Eigen),
            other => Err(Error::Config(format!("unknown problem '{other}'"))),
        }
    }
}

/// Error measure requested from a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Output {
    /// Relative eigenvalue error.
    RelLambda,
    /// H1 seminorm of the error.
    H1Semi,
    /// L2 norm of the error.
    L2,
}

impl FromStr for Output {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rel_lambda" => Ok(Output::RelLambda),
            "h1_semi" => Ok(Output::H1Semi),
            "l2" => Ok(Output::L2),
            other => Err(Error::Config(format!("unknown output '{other}'"))),
        }
    }
}

impl Output {
    /// Quantity identifier as it appears in reports. `index` is the
    /// eigenpair rank, absent for the source problem.
    pub fn quantity(self, index: Option<usize>) -> String {
        match (self, index) {
            (Output::RelLambda, Some(i)) => format!("rel_lambda_{i}"),
            (Output::H1Semi, Some(i)) => format!("h1_semi_u{i}"),
            (Output::L2, Some(i)) => format!("l2_u{i}"),
            (Output::H1Semi, None) => "h1_semi_u".into(),
            (Output::L2, None) => "l2_u".into(),
            (Output::RelLambda, None) => "rel_lambda".into(),
        }
    }
}

/// A named problem from the built-in registry.
#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub name: &'static str,
    pub problem: ProblemKind,
    pub gamma: f64,
    pub eta: f64,
    /// Whether `gamma` may be overridden.
    pub gamma_free: bool,
    pub outputs: &'static [Output],
}

const CASES: &[Case] = &[
    Case {
        name: "case1",
        problem: ProblemKind::Eigen,
        gamma: 1.0 / 3.0,
        eta: 1.0,
        gamma_free: true,
        outputs: &[Output::RelLambda],
    },
    Case {
        name: "case2",
        problem: ProblemKind::Eigen,
        gamma: 1.0 / 3.0,
        eta: 4.0,
        gamma_free: false,
        outputs: &[Output::RelLambda, Output::H1Semi, Output::L2],
    },
    Case {
        name: "case3",
        problem: ProblemKind::Eigen,
        gamma: std::f64::consts::FRAC_1_PI,
        eta: std::f64::consts::E * std::f64::consts::E,
        gamma_free: false,
        outputs: &[Output::RelLambda],
    },
    Case {
        name: "manufactured",
        problem: ProblemKind::Source,
        gamma: analytic::MANUFACTURED_GAMMA,
        eta: 4.0,
        gamma_free: false,
        outputs: &[Output::H1Semi, Output::L2],
    },
];

/// Registry lookup. `"1"`/`"example1"` and `"2"`/`"example2"` name the two
/// eigenvalue benchmarks (`case2`, `case3`).
pub fn lookup_case(name: &str) -> Result<Case> {
    let key = match name.trim().to_ascii_lowercase().as_str() {
        "1" | "example1" => "case2".to_string(),
        "2" | "example2" => "case3".to_string(),
        other => other.to_string(),
    };
    CASES
        .iter()
        .find(|c| c.name == key)
        .cloned()
        .ok_or_else(|| Error::Config(format!("unknown case '{name}'")))
}

/// Partially specified configuration, as read from a file or the command
/// line. Later layers override earlier ones via [`RawConfig::merge`].
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub problem: Option<String>,
    pub case: Option<String>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub degrees: Option<Vec<usize>>,
    #[serde(alias = "N")]
    pub ns: Option<Vec<usize>>,
    pub methods: Option<Vec<String>>,
    pub eigen_indices: Option<Vec<usize>>,
    pub outputs: Option<Vec<String>>,
    pub dump_matrices: Option<PathBuf>,
}

impl RawConfig {
    /// Parse a flat `key = value` (TOML) configuration.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fields set in `other` win.
    pub fn merge(self, other: RawConfig) -> RawConfig {
        RawConfig {
            problem: other.problem.or(self.problem),
            case: other.case.or(self.case),
            gamma: other.gamma.or(self.gamma),
            eta: other.eta.or(self.eta),
            degrees: other.degrees.or(self.degrees),
            ns: other.ns.or(self.ns),
            methods: other.methods.or(self.methods),
            eigen_indices: other.eigen_indices.or(self.eigen_indices),
            outputs: other.outputs.or(self.outputs),
            dump_matrices: other.dump_matrices.or(self.dump_matrices),
        }
    }

    /// Fill defaults from the case registry and validate.
    pub fn resolve(self) -> Result<SweepConfig> {
        let case_name = match (&self.case, &self.problem) {
            (Some(c), _) => c.clone(),
            (None, Some(p)) if p.trim().eq_ignore_ascii_case("source") => "manufactured".into(),
            (None, _) => "case2".into(),
        };
        let custom = case_name.trim().eq_ignore_ascii_case("custom");
        let case = if custom { None } else { Some(lookup_case(&case_name)?) };

        let problem = match (&self.problem, &case) {
            (Some(p), _) => p.parse()?,
            (None, Some(c)) => c.problem,
            (None, None) => ProblemKind::Eigen,
        };
        let (gamma, eta) = match &case {
            Some(c) => {
                let gamma = match self.gamma {
                    Some(g) if c.gamma_free => g,
                    Some(g) if g != c.gamma => {
                        return Err(Error::Config(format!("case '{}' has a fixed interface", c.name)))
                    }
                    _ => c.gamma,
                };
                if matches!(self.eta, Some(e) if e != c.eta) {
                    return Err(Error::Config(format!("case '{}' has a fixed coefficient ratio", c.name)));
                }
                (gamma, c.eta)
            }
            None => (
                self.gamma.ok_or_else(|| Error::Config("custom case needs gamma".into()))?,
                self.eta.ok_or_else(|| Error::Config("custom case needs eta".into()))?,
            ),
        };
        let methods = match self.methods {
            Some(ms) => ms.iter().map(|m| m.parse()).collect::<Result<Vec<Method>>>()?,
            None => vec![Method::Fem, Method::Sgfem],
        };
        let outputs = match self.outputs {
            Some(os) => os.iter().map(|o| o.parse()).collect::<Result<Vec<Output>>>()?,
            None => match (&case, problem) {
                (Some(c), _) if c.problem == problem => c.outputs.to_vec(),
                (_, ProblemKind::Source) => vec![Output::H1Semi, Output::L2],
                (_, ProblemKind::Eigen) => vec![Output::RelLambda],
            },
        };
        let cfg = SweepConfig {
            problem,
            case: case.map_or("custom", |c| c.name).to_string(),
            gamma,
            eta,
            degrees: self.degrees.unwrap_or_else(|| vec![1, 2, 3]),
            ns: self.ns.unwrap_or_else(|| vec![10, 20, 40, 80, 160]),
            methods,
            eigen_indices: self.eigen_indices.unwrap_or_else(|| vec![1, 4, 8]),
            outputs,
            dump_matrices: self.dump_matrices,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Fully resolved sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub problem: ProblemKind,
    pub case: String,
    pub gamma: f64,
    pub eta: f64,
    pub degrees: Vec<usize>,
    pub ns: Vec<usize>,
    pub methods: Vec<Method>,
    pub eigen_indices: Vec<usize>,
    pub outputs: Vec<Output>,
    /// Write `K`, `M` (and `F`) of every cell here in MatrixMarket format.
    pub dump_matrices: Option<PathBuf>,
}

impl SweepConfig {
    /// Registry defaults for `case` with no overrides.
    pub fn for_case(case: &str) -> Result<Self> {
        RawConfig { case: Some(case.into()), ..Default::default() }.resolve()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad(format!("gamma = {} must lie in (0, 1)", self.gamma));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("eta = {} must be positive", self.eta));
        }
        if self.degrees.is_empty() || self.degrees.iter().any(|&p| p == 0 || p > MAX_SWEEP_DEGREE) {
            return bad(format!("degrees must be a non-empty subset of 1..={MAX_SWEEP_DEGREE}"));
        }
        if self.ns.is_empty() || self.ns[0] < 2 || self.ns.windows(2).any(|w| w[0] >= w[1]) {
            return bad("element counts must be strictly ascending and at least 2".into());
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if self.outputs.is_empty() {
            return bad("no outputs selected".into());
        }
        match self.problem {
            ProblemKind::Source => {
                if self.case != "manufactured" {
                    return bad(format!("case '{}' has no manufactured solution", self.case));
                }
                if self.outputs.contains(&Output::RelLambda) {
                    return bad("rel_lambda is only defined for eigenvalue sweeps".into());
                }
            }
            ProblemKind::Eigen => {
                if self.case == "manufactured" {
                    return bad("the manufactured case is a source problem".into());
                }
                if self.eigen_indices.is_empty() || self.eigen_indices.contains(&0) {
                    return bad("eigen indices must be 1-based and non-empty".into());
                }
            }
        }
        Ok(())
    }

    /// Quantity identifiers in report order.
    pub fn quantities(&self) -> Vec<String> {
        match self.problem {
            ProblemKind::Source => self.outputs.iter().map(|o| o.quantity(None)).collect(),
            ProblemKind::Eigen => self
                .outputs
                .iter()
                .flat_map(|o| self.eigen_indices.iter().map(move |&i| o.quantity(Some(i))))
                .collect(),
        }
    }

    fn problem_data(&self) -> InterfaceProblem {
        match self.problem {
            ProblemKind::Source => analytic::manufactured_problem().0,
            ProblemKind::Eigen => InterfaceProblem::piecewise_constant(self.gamma, 1.0, self.eta),
        }
    }

    fn cells(&self) -> Vec<(usize, usize, Method)> {
        let mut cells = Vec::new();
        for &p in &self.degrees {
            for &n in &self.ns {
                for &m in &self.methods {
                    cells.push((p, n, m));
                }
            }
        }
        cells
    }
}

/// Fitted convergence rate for one `(method, p, quantity)` column.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRecord {
    pub method: Method,
    pub p: usize,
    pub quantity: String,
    pub rate: f64,
}

#[derive(Debug, Clone)]
pub struct Metadata {
    pub config: SweepConfig,
    pub wall_time: Duration,
    pub version: &'static str,
    /// `(p, N)` of SGFEM cells whose mesh fits the interface, where the
    /// enrichment was switched off.
    pub fitting_cells: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct Report {
    /// Problem label written to the CSV `problem` column.
    pub problem: String,
    pub rows: Vec<ErrorRecord>,
    pub rates: Vec<RateRecord>,
    pub metadata: Metadata,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn value(&self, method: Method, p: usize, n: usize, quantity: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.p == p && r.n == n && r.quantity == quantity)
            .map(|r| r.value)
    }

    pub fn rate(&self, method: Method, p: usize, quantity: &str) -> Option<f64> {
        self.rates
            .iter()
            .find(|r| r.method == method && r.p == p && r.quantity == quantity)
            .map(|r| r.rate)
    }
}

#[derive(Default)]
struct CellOut {
    rows: Vec<ErrorRecord>,
    warnings: Vec<String>,
    fitting: bool,
}

fn cell_space(cfg: &SweepConfig, p: usize, n: usize, method: Method) -> Result<EnrichedSpace> {
    EnrichedSpace::new(Mesh1D::uniform(n, cfg.gamma)?, p, method)
}

fn dump_cell(dir: &Path, p: usize, n: usize, method: Method, sys: &assembly::BlockSystem) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let stem = format!("p{p}_N{n}_{}", method.name().to_ascii_lowercase());
    assembly::write_matrix_market(&dir.join(format!("K_{stem}.mtx")), &sys.stiffness)?;
    assembly::write_matrix_market(&dir.join(format!("M_{stem}.mtx")), &sys.mass)?;
    if let Some(f) = &sys.load {
        let col = nalgebra::DMatrix::from_column_slice(f.len(), 1, f.as_slice());
        assembly::write_matrix_market(&dir.join(format!("F_{stem}.mtx")), &col)?;
    }
    Ok(())
}

fn record(p: usize, n: usize, method: Method, quantity: String, value: f64) -> ErrorRecord {
    ErrorRecord { n, p, method, quantity, value }
}

fn source_cell(
    cfg: &SweepConfig,
    prob: &InterfaceProblem,
    exact: &ExactFunction,
    (p, n, method): (usize, usize, Method),
) -> Result<CellOut> {
    let space = cell_space(cfg, p, n, method)?;
    let sys = assembly::assemble_system(&space, prob)?;
    if let Some(dir) = &cfg.dump_matrices {
        dump_cell(dir, p, n, method, &sys)?;
    }
    let load = sys.load.as_ref().ok_or(Error::MissingSource)?;
    let x = densela::solve_spd(&sys.stiffness, load)?;
    let uh = DofVector::from_full(x.as_slice(), space.n_fem());
    let mut out = CellOut { fitting: method == Method::Sgfem && space.mesh().is_fitting(), ..Default::default() };
    for &o in &cfg.outputs {
        let value = match o {
            Output::H1Semi => errors::h1_semi_error(&uh, &space, exact),
            Output::L2 => errors::l2_error(&uh, &space, exact),
            Output::RelLambda => unreachable!("rejected by validate"),
        };
        out.rows.push(record(p, n, method, o.quantity(None), value));
    }
    Ok(out)
}

/// Discrete eigenpairs `1..=count` with Rayleigh-quotient eigenvalues.
fn discrete_eigenpairs(
    space: &EnrichedSpace,
    sys: &assembly::BlockSystem,
    prob: &InterfaceProblem,
    count: usize,
) -> Result<Vec<(f64, DofVector)>> {
    let sol = densela::generalized_eigs(&sys.stiffness, &sys.mass, count)?;
    Ok((0..count)
        .map(|i| {
            let u = sol.dof_vector(i, space.n_fem());
            (assembly::rayleigh_quotient(&u, space, prob), u)
        })
        .collect())
}

fn eigen_cell(
    cfg: &SweepConfig,
    prob: &InterfaceProblem,
    pairs: &[ExactEigenpair],
    exact: &[ExactFunction],
    (p, n, method): (usize, usize, Method),
) -> Result<CellOut> {
    let space = cell_space(cfg, p, n, method)?;
    let sys = assembly::assemble(&space, prob)?;
    if let Some(dir) = &cfg.dump_matrices {
        dump_cell(dir, p, n, method, &sys)?;
    }
    let count = *cfg.eigen_indices.iter().max().expect("validated");
    let discrete = discrete_eigenpairs(&space, &sys, prob, count)?;
    let mut out = CellOut { fitting: method == Method::Sgfem && space.mesh().is_fitting(), ..Default::default() };
    let wants_functions = cfg.outputs.iter().any(|o| *o != Output::RelLambda);
    let mut aligned = BTreeMap::new();
    if wants_functions {
        for &i in &cfg.eigen_indices {
            match errors::align_eigenfunction(&discrete[i - 1].1, &space, &exact[i - 1]) {
                Ok(u) => {
                    aligned.insert(i, u);
                }
                Err(Error::DegenerateAlignment { inner }) => out.warnings.push(format!(
                    "p={p} N={n} {method}: skipped u{i} errors, alignment degenerate ((u_h, u) = {inner:.3})"
                )),
                Err(e) => return Err(e),
            }
        }
    }
    for &o in &cfg.outputs {
        for &i in &cfg.eigen_indices {
            let value = match o {
                Output::RelLambda => errors::relative_eigenvalue_error(discrete[i - 1].0, pairs[i - 1].lambda)?,
                Output::H1Semi => match aligned.get(&i) {
                    Some(u) => errors::h1_semi_error(u, &space, &exact[i - 1]),
                    None => continue,
                },
                Output::L2 => match aligned.get(&i) {
                    Some(u) => errors::l2_error(u, &space, &exact[i - 1]),
                    None => continue,
                },
            };
            out.rows.push(record(p, n, method, o.quantity(Some(i)), value));
        }
    }
    Ok(out)
}

/// Exact eigenpairs `1..=count` after checking that each requested rank is
/// separated from its neighbours.
fn exact_eigenpairs(cfg: &SweepConfig) -> Result<Vec<ExactEigenpair>> {
    let count = *cfg.eigen_indices.iter().max().expect("validated");
    let mut pairs = analytic::solve_matching_system(cfg.gamma, cfg.eta, count + 1)?;
    for &i in &cfg.eigen_indices {
        let lam = pairs[i - 1].lambda;
        let below = if i >= 2 { Some(pairs[i - 2].lambda) } else { None };
        let above = Some(pairs[i].lambda);
        for other in [below, above].into_iter().flatten() {
            if (lam - other).abs() <= EIGEN_GAP * lam {
                return Err(Error::EigenvalueMismatch(format!(
                    "exact eigenvalue {i} ({lam}) is within {}% of its neighbour {other}",
                    EIGEN_GAP * 100.0
                )));
            }
        }
    }
    pairs.truncate(count);
    Ok(pairs)
}

fn run_cells(
    cfg: &SweepConfig,
    start: Instant,
    work: impl Fn((usize, usize, Method)) -> Result<CellOut> + Sync,
) -> Result<Report> {
    cfg.validate()?;
    let cells = cfg.cells();
    let results: Vec<Result<CellOut>> = cells.par_iter().map(|&c| work(c)).collect();
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    let mut fitting_cells = Vec::new();
    for (&(p, n, method), res) in cells.iter().zip(results) {
        let out = res.map_err(|e| Error::Cell { p, n, method: method.name().into(), source: Box::new(e) })?;
        if out.fitting {
            fitting_cells.push((p, n));
        }
        rows.extend(out.rows);
        warnings.extend(out.warnings);
    }
    fitting_cells.dedup();
    let (rates, rate_warnings) = fit_rates(cfg, &rows);
    warnings.extend(rate_warnings);
    Ok(Report {
        problem: cfg.case.clone(),
        rows,
        rates,
        metadata: Metadata {
            config: cfg.clone(),
            wall_time: start.elapsed(),
            version: env!("CARGO_PKG_VERSION"),
            fitting_cells,
        },
        warnings,
    })
}

fn fit_rates(cfg: &SweepConfig, rows: &[ErrorRecord]) -> (Vec<RateRecord>, Vec<String>) {
    let mut rates = Vec::new();
    let mut warnings = Vec::new();
    for quantity in cfg.quantities() {
        for &p in &cfg.degrees {
            for &method in &cfg.methods {
                let group: Vec<ErrorRecord> = rows
                    .iter()
                    .filter(|r| r.p == p && r.method == method && r.quantity == quantity)
                    .cloned()
                    .collect();
                match errors::fit_rate(&group) {
                    Ok(rate) => rates.push(RateRecord { method, p, quantity: quantity.clone(), rate }),
                    Err(e) => warnings.push(format!("no rate for {method} p={p} {quantity}: {e}")),
                }
            }
        }
    }
    (rates, warnings)
}

/// Solve the manufactured source problem on every cell.
pub fn run_source_sweep(cfg: &SweepConfig) -> Result<Report> {
    let start = Instant::now();
    if cfg.problem != ProblemKind::Source {
        return Err(Error::Config("not a source-problem configuration".into()));
    }
    let prob = cfg.problem_data();
    let (_, exact) = analytic::manufactured_problem();
    run_cells(cfg, start, |c| source_cell(cfg, &prob, &exact, c))
}

/// Solve the eigenvalue problem on every cell and compare the requested
/// eigenpairs with the exact ones by rank.
pub fn run_eigen_sweep(cfg: &SweepConfig) -> Result<Report> {
    let start = Instant::now();
    if cfg.problem != ProblemKind::Eigen {
        return Err(Error::Config("not an eigenvalue configuration".into()));
    }
    cfg.validate()?;
    let prob = cfg.problem_data();
    let pairs = exact_eigenpairs(cfg)?;
    let exact: Vec<ExactFunction> =
        pairs.iter().map(|pair| analytic::exact_eigenfunction(pair, cfg.gamma, cfg.eta)).collect();
    run_cells(cfg, start, |c| eigen_cell(cfg, &prob, &pairs, &exact, c))
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Report> {
    match cfg.problem {
        ProblemKind::Source => run_source_sweep(cfg),
        ProblemKind::Eigen => run_eigen_sweep(cfg),
    }
}

/// Write `(x, u_h(x), u(x))` on [`DUMP_POINTS`] equispaced points for the
/// aligned discrete eigenfunction of rank `index`.
pub fn dump_eigenfunction(
    cfg: &SweepConfig,
    p: usize,
    n: usize,
    method: Method,
    index: usize,
    out: impl Write,
) -> Result<()> {
    if cfg.problem != ProblemKind::Eigen || index == 0 {
        return Err(Error::Config("eigenfunction dumps need an eigenvalue case and a 1-based index".into()));
    }
    let prob = cfg.problem_data();
    let pairs = analytic::solve_matching_system(cfg.gamma, cfg.eta, index)?;
    let exact = analytic::exact_eigenfunction(&pairs[index - 1], cfg.gamma, cfg.eta);
    let space = cell_space(cfg, p, n, method)?;
    let sys = assembly::assemble(&space, &prob)?;
    let discrete = discrete_eigenpairs(&space, &sys, &prob, index)?;
    let uh = errors::align_eigenfunction(&discrete[index - 1].1, &space, &exact)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "u_h", "u"]).map_err(std::io::Error::from)?;
    for k in 0..DUMP_POINTS {
        let x = k as f64 / (DUMP_POINTS - 1) as f64;
        let (v, _) = space.eval(&uh, x)?;
        w.write_record([sci17(x), sci17(v), sci17(exact.eval(x))]).map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

/// Scaled condition number of the stiffness matrix for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CondRecord {
    pub method: Method,
    pub p: usize,
    pub n: usize,
    pub cond: f64,
}

pub fn condition_numbers(
    gamma: f64,
    eta: f64,
    p: usize,
    ns: &[usize],
    methods: &[Method],
) -> Result<Vec<CondRecord>> {
    let prob = InterfaceProblem::piecewise_constant(gamma, 1.0, eta);
    let cells: Vec<(usize, Method)> = ns.iter().flat_map(|&n| methods.iter().map(move |&m| (n, m))).collect();
    cells
        .par_iter()
        .map(|&(n, method)| {
            let space = EnrichedSpace::new(Mesh1D::uniform(n, gamma)?, p, method)?;
            let sys = assembly::assemble(&space, &prob)?;
            let cond = densela::scaled_condition_number(&sys.stiffness)?;
            Ok(CondRecord { method, p, n, cond })
        })
        .collect()
}

/// Least-squares slope of `log(cond)` against `log(N)`.
pub fn growth_slope(records: &[CondRecord]) -> Result<f64> {
    let as_errors: Vec<ErrorRecord> =
        records.iter().map(|r| record(r.p, r.n, r.method, "cond".into(), r.cond)).collect();
    Ok(-errors::fit_rate(&as_errors)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

/// 17 significant digits: enough to round-trip any `f64`.
pub fn sci17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Three significant digits with a signed exponent, e.g. `4.92E-5`.
pub fn sci3(v: f64) -> String {
    let s = format!("{v:.2e}");
    match s.split_once('e') {
        Some((mant, exp)) => {
            let e: i32 = exp.parse().expect("float exponent");
            format!("{mant}E{e:+}")
        }
        None => s,
    }
}

pub const CSV_HEADER: [&str; 6] = ["problem", "method", "p", "N", "quantity", "value"];

pub fn write_csv(report: &Report, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(std::io::Error::from)?;
    for r in &report.rows {
        w.write_record([
            report.problem.clone(),
            r.method.name().to_string(),
            r.p.to_string(),
            r.n.to_string(),
            r.quantity.clone(),
            sci17(r.value),
        ])
        .map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

/// One parsed CSV line.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub problem: String,
    pub record: ErrorRecord,
}

pub fn read_csv(input: impl Read) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(std::io::Error::from)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(std::io::Error::from)?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| field(i).parse::<usize>().map_err(|e| Error::Config(format!("{e}")));
        rows.push(CsvRow {
            problem: field(0).to_string(),
            record: ErrorRecord {
                method: field(1).parse()?,
                p: num(2)?,
                n: num(3)?,
                quantity: field(4).to_string(),
                value: field(5).parse().map_err(|e| Error::Config(format!("{e}")))?,
            },
        });
    }
    Ok(rows)
}

/// One table per quantity: rows `N`, columns method within degree, and a
/// final row of fitted rates.
pub fn render_markdown(report: &Report) -> String {
    let cfg = &report.metadata.config;
    let mut s = String::new();
    for quantity in cfg.quantities() {
        s.push_str(&format!("### {} {}\n\n| N |", report.problem, quantity));
        for &p in &cfg.degrees {
            for &m in &cfg.methods {
                s.push_str(&format!(" {m} p={p} |"));
            }
        }
        s.push_str("\n|---:|");
        s.push_str(&"---:|".repeat(cfg.degrees.len() * cfg.methods.len()));
        s.push('\n');
        for &n in &cfg.ns {
            s.push_str(&format!("| {n} |"));
            for &p in &cfg.degrees {
                for &m in &cfg.methods {
                    let cell = report.value(m, p, n, &quantity).map_or("-".into(), sci3);
                    s.push_str(&format!(" {cell} |"));
                }
            }
            s.push('\n');
        }
        s.push_str("| rate |");
        for &p in &cfg.degrees {
            for &m in &cfg.methods {
                let cell = report.rate(m, p, &quantity).map_or("-".into(), |r| format!("{r:.2}"));
                s.push_str(&format!(" {cell} |"));
            }
        }
        s.push_str("\n\n");
    }
    s
}

pub fn emit_report(report: &Report, format: Format, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => write_csv(report, &mut out)?,
        Format::Markdown => out.write_all(render_markdown(report).as_bytes())?,
    }
    out.flush()?;
    Ok(())
}
