//! Numerical studies: h- and p-convergence on the smooth exponential problem,
//! slab-matrix conditioning for both seed choices, the particle-in-a-box run
//! for all four spaces, and the Trefftz basis checks.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::assembly::{assemble_slab, march, solve_global, BoundaryData, Below, DiscreteSolution, Discretization};
use crate::error::{Error, Result};
use crate::exact::{series_eval, ExpSolution, SquareWellSeries};
use crate::field::{Difference, Partial, PiecewiseField};
use crate::linalg::cond2;
use crate::mesh::{build_cartesian_mesh, Mesh, SpaceTimeDomain};
use crate::norms::dg_norm_with;
use crate::poly::{Frame, PolynomialJson};
use crate::spaces::{trefftz_basis, verify_trefftz_basis, BasisReport, SeedChoice, SpaceKind};

/// Slab matrices larger than this are not passed to the SVD.
pub const CONDITIONING_DOF_CAP: usize = 2000;
/// Solutions whose smallest LU pivot ratio falls below this are reported
/// as ill-conditioned.
pub const ILL_CONDITIONED_PIVOT_RATIO: f64 = 1e-13;
/// Errors below this are treated as exact and get no rate.
pub const EXACT_ERROR_FLOOR: f64 = 1e-13;

pub const CSV_HEADER: &str = "level,h_x,h_t,n_dofs,dg_error,rate,cond2";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ConvH,
    ConvP,
    Conditioning,
    Singular,
    VerifyBasis,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::ConvH => "conv-h",
            Experiment::ConvP => "conv-p",
            Experiment::Conditioning => "conditioning",
            Experiment::Singular => "singular",
            Experiment::VerifyBasis => "verify-basis",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conv-h" => Ok(Experiment::ConvH),
            "conv-p" => Ok(Experiment::ConvP),
            "conditioning" => Ok(Experiment::Conditioning),
            "singular" => Ok(Experiment::Singular),
            "verify-basis" => Ok(Experiment::VerifyBasis),
            other => Err(Error::InvalidConfig(format!("unknown experiment `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceFamily {
    Trefftz,
    QuasiTrefftz,
    Full,
    Planewave,
}

impl SpaceFamily {
    pub const ALL: [SpaceFamily; 4] =
        [SpaceFamily::Trefftz, SpaceFamily::QuasiTrefftz, SpaceFamily::Full, SpaceFamily::Planewave];

    pub fn kind(self, p: u32, seed: SeedChoice) -> SpaceKind {
        match self {
            SpaceFamily::Trefftz => SpaceKind::TrefftzPoly { p, seed },
            SpaceFamily::QuasiTrefftz => SpaceKind::QuasiTrefftz { p },
            SpaceFamily::Full => SpaceKind::FullPoly { p },
            SpaceFamily::Planewave => SpaceKind::PlaneWave { p },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SpaceFamily::Trefftz => "trefftz",
            SpaceFamily::QuasiTrefftz => "quasi-trefftz",
            SpaceFamily::Full => "full",
            SpaceFamily::Planewave => "planewave",
        }
    }
}

impl FromStr for SpaceFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SpaceFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown space `{s}`")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub space: SpaceFamily,
    /// Degree; the largest degree for `conv-p`.
    pub p: u32,
    pub levels: usize,
    pub kappa: f64,
    pub seed_choice: SeedChoice,
    pub quad_n: Option<usize>,
    pub out: Option<PathBuf>,
    pub global_oracle: bool,
    /// Replace the exponential data by `ψ₀ = g_D = 1`.
    pub constant_data: bool,
    /// Space dimension for `verify-basis`; all of 1..=3 when absent.
    pub dim: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        let (p, levels) = match experiment {
            Experiment::ConvP => (5, 1),
            Experiment::Singular => (1, 4),
            Experiment::VerifyBasis => (2, 1),
            Experiment::ConvH | Experiment::Conditioning => (1, 5),
        };
        Self {
            experiment,
            space: SpaceFamily::Trefftz,
            p,
            levels,
            kappa: 5.0,
            seed_choice: SeedChoice::B,
            quad_n: None,
            out: None,
            global_oracle: false,
            constant_data: false,
            dim: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !self.kappa.is_finite() {
            return bad(format!("kappa must be finite, got {}", self.kappa));
        }
        if self.levels == 0 {
            return bad("levels must be at least 1".into());
        }
        if self.levels > 8 {
            return bad(format!("levels = {} exceeds the supported maximum of 8", self.levels));
        }
        if matches!(self.experiment, Experiment::ConvH | Experiment::Conditioning) && self.levels < 2 {
            return bad("rates and slopes need at least 2 levels".into());
        }
        if self.experiment == Experiment::ConvP && self.p == 0 {
            return bad("conv-p needs p >= 1".into());
        }
        if self.p > 12 {
            return bad(format!("p = {} exceeds the supported maximum of 12", self.p));
        }
        if let Some(n) = self.quad_n {
            if n == 0 || n > crate::quadrature::MAX_NODES {
                return bad(format!("quad-n must be in 1..={}", crate::quadrature::MAX_NODES));
            }
        }
        match self.experiment {
            Experiment::VerifyBasis => {
                if let Some(d) = self.dim {
                    if !(1..=3).contains(&d) {
                        return bad(format!("dim must be 1, 2 or 3, got {d}"));
                    }
                }
                if self.p > 3 {
                    return bad("verify-basis supports p <= 3".into());
                }
            }
            Experiment::Conditioning if self.space != SpaceFamily::Trefftz => {
                return bad("conditioning runs the Trefftz polynomial space".into());
            }
            _ => {
                if self.experiment != Experiment::Singular {
                    self.space.kind(self.p, self.seed_choice).validate()?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h_x: f64,
    pub h_t: f64,
    pub n_dofs: usize,
    /// `None` when the solve failed or was too ill-conditioned to trust.
    pub dg_error: Option<f64>,
    /// `log₂(e_{j−1} / e_j)`; absent on the first row.
    pub rate: Option<f64>,
    pub cond2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub label: String,
    pub rows: Vec<ConvergenceRow>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:e},{:e},{},{},{},{}",
                r.level,
                r.h_x,
                r.h_t,
                r.n_dofs,
                fmt_opt(r.dg_error),
                fmt_opt(r.rate),
                fmt_opt(r.cond2)
            );
        }
        s
    }

    pub fn errors(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.dg_error).collect()
    }

    pub fn last_rate(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.rate)
    }

    /// Fills `rate` from consecutive stored errors.
    fn fill_rates(&mut self) {
        for j in 1..self.rows.len() {
            self.rows[j].rate = match (self.rows[j - 1].dg_error, self.rows[j].dg_error) {
                (Some(a), Some(b)) if a > EXACT_ERROR_FLOOR && b > EXACT_ERROR_FLOOR => Some((a / b).log2()),
                _ => None,
            };
        }
    }
}

/// Least-squares slope of `log₂ y` against `log₂ x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite()).map(|(x, y)| (x.log2(), y.log2())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Known solution used to measure errors.
#[derive(Debug, Clone)]
pub enum ExactField {
    Exp(ExpSolution),
    Constant(Complex64),
    Series(SquareWellSeries),
}

impl PiecewiseField for ExactField {
    fn eval(&self, element: usize, x: f64, t: f64, which: Partial) -> Complex64 {
        match self {
            ExactField::Exp(s) => s.eval(element, x, t, which),
            ExactField::Constant(c) => crate::field::Constant(*c).eval(element, x, t, which),
            ExactField::Series(s) => series_eval(s, x, t, which),
        }
    }
}

impl ExactField {
    pub fn boundary_data(&self) -> BoundaryData {
        match self {
            ExactField::Series(_) => {
                BoundaryData::new(SquareWellSeries::initial_datum, |_, _| Complex64::new(0.0, 0.0))
            }
            other => BoundaryData::from_field(other.clone()),
        }
    }
}

/// `(0,1)²` with `h_x = h_t = 0.1 · 2^{−j}`.
pub fn smooth_mesh(level: usize) -> Result<Mesh> {
    let n = 10 << level;
    build_cartesian_mesh(SpaceTimeDomain::unit(), n, n)
}

/// `(0,1) × (0,0.1)` with `h_x = 0.5 · 2^{−j}`, `h_t = 0.05 · 2^{−j}`.
pub fn singular_mesh(level: usize) -> Result<Mesh> {
    let n = 2 << level;
    build_cartesian_mesh(SpaceTimeDomain::new(0.0, 1.0, 0.1)?, n, n)
}

/// Nominal `(h_x, h_t)` of a uniform mesh.
pub fn nominal_sizes(mesh: &Mesh) -> (f64, f64) {
    let d = &mesh.domain;
    let nx = mesh.elements.len() / mesh.n_slabs;
    ((d.x_hi - d.x_lo) / nx as f64, d.t_final / mesh.n_slabs as f64)
}

/// Outcome of one solve with its DG error.
#[derive(Debug, Clone)]
pub struct LevelResult {
    pub n_dofs: usize,
    pub dg_error: Option<f64>,
    pub warning: Option<String>,
    pub solution: Option<DiscreteSolution>,
}

/// Solves on `mesh` and measures `⦀ψ − ψ_hp⦀_DG`. Ill-conditioned solves are
/// reported without an error value; singular ones are returned as errors.
pub fn solve_and_measure(
    mesh: &Mesh,
    kind: SpaceKind,
    exact: &ExactField,
    quad_n: Option<usize>,
    global: bool,
) -> Result<LevelResult> {
    let disc = Discretization::with_quadrature(mesh, kind, quad_n)?;
    let data = exact.boundary_data();
    let sol = if global { solve_global(&disc, &data)? } else { march(&disc, &data)? };
    let ratio = sol.diagnostics.min_pivot_ratio;
    let n_dofs = disc.n_dofs();
    if !(ratio >= ILL_CONDITIONED_PIVOT_RATIO) {
        return Ok(LevelResult {
            n_dofs,
            dg_error: None,
            warning: Some(format!("ill-conditioned: LU pivot ratio {ratio:.2e}")),
            solution: Some(sol),
        });
    }
    let err = dg_norm_with(&Difference(exact, &sol), mesh, &disc.quad.data);
    let warning = (ratio < 1e-10).then(|| format!("poorly conditioned: LU pivot ratio {ratio:.2e}"));
    Ok(LevelResult { n_dofs, dg_error: Some(err), warning, solution: Some(sol) })
}

fn smooth_exact(config: &ExperimentConfig) -> ExactField {
    if config.constant_data {
        ExactField::Constant(Complex64::new(1.0, 0.0))
    } else {
        ExactField::Exp(ExpSolution::new(config.kappa))
    }
}

fn at_level<T>(level: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::AtLevel { level, source: Box::new(e) })
}

pub fn run_conv_h(config: &ExperimentConfig) -> Result<ConvergenceTable> {
    config.validate()?;
    let kind = config.space.kind(config.p, config.seed_choice);
    let exact = smooth_exact(config);
    let rows = (0..config.levels)
        .into_par_iter()
        .map(|level| {
            at_level(level, (|| {
                let mesh = smooth_mesh(level)?;
                let r = solve_and_measure(&mesh, kind, &exact, config.quad_n, config.global_oracle)?;
                let (h_x, h_t) = nominal_sizes(&mesh);
                Ok(ConvergenceRow {
                    level,
                    h_x,
                    h_t,
                    n_dofs: r.n_dofs,
                    dg_error: r.dg_error,
                    rate: None,
                    cond2: None,
                    warning: r.warning,
                })
            })())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = ConvergenceTable { label: format!("{kind}"), rows };
    table.fill_rates();
    Ok(table)
}

/// Degrees `1..=p` on the `h = 0.1` mesh; the `level` column holds `p`.
pub fn run_conv_p(config: &ExperimentConfig) -> Result<ConvergenceTable> {
    config.validate()?;
    let exact = smooth_exact(config);
    let mesh = smooth_mesh(0)?;
    let (h_x, h_t) = nominal_sizes(&mesh);
    let rows = (1..=config.p)
        .into_par_iter()
        .map(|p| {
            let kind = config.space.kind(p, config.seed_choice);
            let r = at_level(p as usize, solve_and_measure(&mesh, kind, &exact, config.quad_n, config.global_oracle))?;
            Ok(ConvergenceRow {
                level: p as usize,
                h_x,
                h_t,
                n_dofs: r.n_dofs,
                dg_error: r.dg_error,
                rate: None,
                cond2: None,
                warning: r.warning,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = ConvergenceTable { label: format!("{} p=1..{}", config.space.name(), config.p), rows };
    table.fill_rates();
    Ok(table)
}

/// `cond₂` of the first-slab matrix of the Trefftz space on one mesh.
pub fn first_slab_condition(mesh: &Mesh, p: u32, seed: SeedChoice, quad_n: Option<usize>) -> Result<(usize, f64)> {
    let disc = Discretization::with_quadrature(mesh, SpaceKind::TrefftzPoly { p, seed }, quad_n)?;
    let n = disc.slab_dofs(0)?.len();
    if n > CONDITIONING_DOF_CAP {
        return Err(Error::SystemTooLarge { dofs: n, cap: CONDITIONING_DOF_CAP });
    }
    let sys = assemble_slab(&disc, 0, &BoundaryData::zero(), Below::Initial)?;
    Ok((n, cond2(&sys.matrix)))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditioningReport {
    pub p: u32,
    pub choice_a: ConvergenceTable,
    pub choice_b: ConvergenceTable,
    /// Fitted `d log₂ cond₂ / d log₂ h`.
    pub slope_a: Option<f64>,
    pub slope_b: Option<f64>,
}

pub fn run_conditioning(config: &ExperimentConfig) -> Result<ConditioningReport> {
    config.validate()?;
    let table = |seed: SeedChoice| -> Result<ConvergenceTable> {
        let rows = (0..config.levels)
            .into_par_iter()
            .map(|level| {
                at_level(level, (|| {
                    let mesh = smooth_mesh(level)?;
                    let (n, c) = first_slab_condition(&mesh, config.p, seed, config.quad_n)?;
                    let (h_x, h_t) = nominal_sizes(&mesh);
                    Ok(ConvergenceRow {
                        level,
                        h_x,
                        h_t,
                        n_dofs: n,
                        dg_error: None,
                        rate: None,
                        cond2: Some(c),
                        warning: None,
                    })
                })())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConvergenceTable { label: format!("trefftz p={} seed={seed:?}", config.p), rows })
    };
    let slope = |t: &ConvergenceTable| {
        loglog_slope(&t.rows.iter().filter_map(|r| r.cond2.map(|c| (r.h_x, c))).collect::<Vec<_>>())
    };
    let (choice_a, choice_b) = (table(SeedChoice::A)?, table(SeedChoice::B)?);
    Ok(ConditioningReport { p: config.p, slope_a: slope(&choice_a), slope_b: slope(&choice_b), choice_a, choice_b })
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularReport {
    pub p: u32,
    pub tables: Vec<(SpaceFamily, ConvergenceTable)>,
    /// `‖ψ(·,0) − ψ₀‖_{L²(0,1)}` for the truncated series.
    pub series_initial_error: f64,
}

/// The particle-in-a-box problem for all four spaces. Failed or
/// ill-conditioned solves leave the error empty.
pub fn run_singular(config: &ExperimentConfig) -> Result<SingularReport> {
    config.validate()?;
    let exact = ExactField::Series(SquareWellSeries::default());
    let tables = SpaceFamily::ALL
        .into_par_iter()
        .map(|family| {
            let kind = family.kind(config.p, config.seed_choice);
            kind.validate()?;
            let rows = (0..config.levels)
                .into_par_iter()
                .map(|level| {
                    let mesh = at_level(level, singular_mesh(level))?;
                    let (h_x, h_t) = nominal_sizes(&mesh);
                    let mut row =
                        ConvergenceRow { level, h_x, h_t, n_dofs: 0, dg_error: None, rate: None, cond2: None, warning: None };
                    match solve_and_measure(&mesh, kind, &exact, config.quad_n, config.global_oracle) {
                        Ok(r) => {
                            row.n_dofs = r.n_dofs;
                            row.dg_error = r.dg_error;
                            row.warning = r.warning;
                        }
                        Err(e) if e.is_solver_failure() => {
                            row.n_dofs = mesh.elements.len() * kind.local_dim();
                            row.warning = Some(format!("unavailable: {e}"));
                        }
                        Err(e) => return Err(Error::AtLevel { level, source: Box::new(e) }),
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut t = ConvergenceTable { label: format!("{kind}"), rows };
            t.fill_rates();
            Ok((family, t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SingularReport { p: config.p, tables, series_initial_error: series_initial_error(DEFAULT_CHECK_CELLS) })
}

const DEFAULT_CHECK_CELLS: usize = 64;

/// `‖ψ_series(·,0) − √30 x(1−x)‖_{L²(0,1)}` on `cells` subintervals.
pub fn series_initial_error(cells: usize) -> f64 {
    let s = SquareWellSeries::default();
    let rule = crate::quadrature::gauss_legendre(20).expect("supported rule size");
    (0..cells)
        .map(|c| {
            let (lo, hi) = (c as f64 / cells as f64, (c + 1) as f64 / cells as f64);
            rule.mapped(lo, hi)
                .map(|(x, w)| w * (series_eval(&s, x, 0.0, Partial::Value) - SquareWellSeries::initial_datum(x)).norm_sqr())
                .sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyBasisEntry {
    #[serde(flatten)]
    pub report: BasisReport,
    pub basis: Vec<PolynomialJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyBasisReport {
    pub entries: Vec<VerifyBasisEntry>,
    pub passed: bool,
}

/// Basis checks for the requested `d` (or all of 1..=3) and `p = 0..=p`.
pub fn verify_basis(config: &ExperimentConfig) -> Result<VerifyBasisReport> {
    config.validate()?;
    let dims: Vec<usize> = config.dim.map(|d| vec![d]).unwrap_or_else(|| vec![1, 2, 3]);
    let mut entries = Vec::new();
    for d in dims {
        for p in 0..=config.p {
            let report = verify_trefftz_basis(d, p, config.seed_choice);
            let basis = trefftz_basis(d, p, Frame::unit(d), config.seed_choice).polynomials().map(|q| q.to_json()).collect();
            entries.push(VerifyBasisEntry { report, basis });
        }
    }
    let passed = entries.iter().all(|e| e.report.passed);
    Ok(VerifyBasisReport { entries, passed })
}

/// Everything an experiment produced, ready to be written out.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    /// `(file stem, table)` pairs.
    pub tables: Vec<(String, ConvergenceTable)>,
    pub summary: serde_json::Value,
    /// False when a basis check failed.
    pub passed: bool,
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let name = config.experiment.name();
    let cfg = serde_json::to_value(config)?;
    let out = match config.experiment {
        Experiment::ConvH | Experiment::ConvP => {
            let t = if config.experiment == Experiment::ConvH { run_conv_h(config)? } else { run_conv_p(config)? };
            let slope = loglog_slope(
                &t.rows.iter().filter_map(|r| r.dg_error.map(|e| (r.h_x, e))).collect::<Vec<_>>(),
            );
            let summary = serde_json::json!({
                "experiment": name, "config": cfg, "table": t,
                "error_slope": if config.experiment == Experiment::ConvH { slope } else { None },
            });
            ExperimentOutput { tables: vec![(name.to_string(), t)], summary, passed: true }
        }
        Experiment::Conditioning => {
            let r = run_conditioning(config)?;
            let summary = serde_json::json!({
                "experiment": name, "config": cfg, "p": r.p,
                "slope_a": r.slope_a, "slope_b": r.slope_b,
                "expected_slope_a": -(2.0 * f64::from(r.p) + 1.0), "expected_slope_b": -1.0,
                "choice_a": r.choice_a, "choice_b": r.choice_b,
            });
            ExperimentOutput {
                tables: vec![(format!("{name}_a"), r.choice_a), (format!("{name}_b"), r.choice_b)],
                summary,
                passed: true,
            }
        }
        Experiment::Singular => {
            let r = run_singular(config)?;
            let summary = serde_json::json!({
                "experiment": name, "config": cfg, "p": r.p,
                "series_initial_error": r.series_initial_error,
                "tables": r.tables.iter().map(|(f, t)| serde_json::json!({"space": f, "table": t})).collect::<Vec<_>>(),
            });
            let tables = r.tables.into_iter().map(|(f, t)| (format!("{name}_{}", f.name()), t)).collect();
            ExperimentOutput { tables, summary, passed: true }
        }
        Experiment::VerifyBasis => {
            let r = verify_basis(config)?;
            let summary = serde_json::json!({"experiment": name, "config": cfg, "report": r});
            ExperimentOutput { tables: Vec::new(), summary, passed: r.passed }
        }
    };
    Ok(out)
}

/// Writes `<stem>.csv` per table and `summary.json` into `dir`.
pub fn write_outputs(dir: &Path, output: &ExperimentOutput) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (stem, table) in &output.tables {
        let path = dir.join(format!("{stem}.csv"));
        std::fs::write(&path, table.to_csv())?;
        written.push(path);
    }
    let path = dir.join("summary.json");
    std::fs::write(&path, serde_json::to_string_pretty(&output.summary)? + "\n")?;
    written.push(path);
    Ok(written)
}
