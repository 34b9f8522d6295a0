//! Command-line interface.
//!
//! Exit codes: 0 success or agreement, 1 usage error, 2 invalid algebra,
//! 3 unreadable or malformed file, 4 disagreement or inconclusive verdict,
//! 5 `dim u(L)` above the ambient cap.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::catalog::{self, CatalogError};
use crate::env::DEFAULT_AMBIENT_CAP;
use crate::identities::{
    self, CheckConfig, ComputedVerdicts, CrossCheckReport, EnvAmbient, Identity, IdentityError, IdentityVerdict,
    Prediction, Truth,
};
use crate::io::{AlgebraFile, FileError};
use crate::liealg::{validate, Algebra, AlgebraError, ElementPNilpotence, SubspacePNilpotence, DEFAULT_PNIL_BUDGET};
use crate::linalg::Subspace;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_DISAGREE: i32 = 4;
pub const EXIT_AMBIENT: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "ulie", version, about = "Restricted Lie algebras, u(L), and Lie identities on symmetric elements")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest dim u(L) = p^n that may be coordinatized.
    #[arg(long, global = true, default_value_t = DEFAULT_AMBIENT_CAP)]
    pub ambient_cap: usize,
    /// Random elements y tried when the Engel check cannot enumerate.
    #[arg(long, global = true, default_value_t = 200)]
    pub engel_samples: usize,
    /// Enumerate every y when the subspace has at most this many elements.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub engel_exhaustive_limit: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Add wall-clock timings to JSON reports (they are then no longer reproducible byte for byte).
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the Jacobi identity and restrictedness of an algebra file.
    Validate { file: String },
    /// Series, center, derived algebra and p-nilpotence of L.
    Analyze { source: String },
    /// Dimensions of u(L), u(L)^+ and u(L)^-, or the generator multiplication tables.
    Env {
        source: String,
        /// Emit the left-multiplication matrices of the generators as JSON.
        #[arg(long)]
        table: bool,
    },
    /// Decide one identity on u(L)^+ (or u(L)) and compare with the prediction.
    Check {
        source: String,
        #[arg(long, value_enum)]
        identity: IdentityArg,
        #[arg(long, value_enum, default_value_t = SubspaceArg::Plus)]
        subspace: SubspaceArg,
    },
    /// Compare predicted and computed verdicts on u(L)^+ and u(L).
    Crosscheck {
        #[arg(required_unless_present = "all_catalog", conflicts_with = "all_catalog")]
        source: Option<String>,
        #[arg(long)]
        all_catalog: bool,
    },
    /// Built-in algebras.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List,
    /// Write the algebra file of a catalog id.
    Emit { id: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentityArg {
    Nilpotent,
    Solvable,
    Engel,
}

impl From<IdentityArg> for Identity {
    fn from(a: IdentityArg) -> Self {
        match a {
            IdentityArg::Nilpotent => Identity::LieNilpotent,
            IdentityArg::Solvable => Identity::LieSolvable,
            IdentityArg::Engel => Identity::BoundedEngel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SubspaceArg {
    Plus,
    Full,
}

/// Settings shared by all commands.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub check: CheckConfig,
    pub json_output: bool,
    pub timings: bool,
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> Self {
        Self {
            check: CheckConfig {
                ambient_cap: cli.ambient_cap,
                engel_samples: cli.engel_samples,
                engel_exhaustive_limit: cli.engel_exhaustive_limit,
                seed: cli.seed,
                pnil_budget: DEFAULT_PNIL_BUDGET,
            },
            json_output: cli.json,
            timings: cli.timings,
        }
    }
}

/// A command failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        let code = if e.is_parse_error() { EXIT_PARSE } else { EXIT_INVALID };
        Failure::new(code, e.to_string())
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        Failure::new(EXIT_INVALID, e.to_string())
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::UnknownId(_) | CatalogError::BadParameter(_) => Failure::new(EXIT_USAGE, e.to_string()),
            _ => Failure::new(EXIT_INVALID, e.to_string()),
        }
    }
}

impl From<IdentityError> for Failure {
    fn from(e: IdentityError) -> Self {
        let code = match e {
            IdentityError::AmbientTooLarge { .. } => EXIT_AMBIENT,
            IdentityError::Algebra(_) => EXIT_INVALID,
            _ => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let config = RunConfig::from_cli(&cli);
    match execute(&cli.command, &config, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))
}

fn line(out: &mut dyn Write, text: impl AsRef<str>) -> Result<(), Failure> {
    writeln!(out, "{}", text.as_ref()).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))
}

/// Loads an algebra from a file path or, if no such file exists, a catalog id.
pub fn load_source(source: &str) -> Result<(String, Algebra), Failure> {
    let path = Path::new(source);
    if !path.exists() {
        if let Ok(entry) = catalog::builtin(source) {
            return Ok((entry.id, entry.algebra));
        }
        if source.contains('(') {
            catalog::builtin(source)?;
        }
    }
    let spec = AlgebraFile::read(path)?.to_spec()?;
    Ok((source.to_string(), validate(&spec)?))
}

#[derive(Serialize)]
struct Timed<'a, T: Serialize> {
    #[serde(flatten)]
    report: &'a T,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings_ms: Option<f64>,
}

fn emit_timed<T: Serialize>(out: &mut dyn Write, report: &T, config: &RunConfig, start: Instant) -> Result<(), Failure> {
    let timings_ms = config.timings.then(|| start.elapsed().as_secs_f64() * 1e3);
    emit(out, &Timed { report, timings_ms })
}

fn execute(command: &Command, config: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Validate { file } => cmd_validate(file, config, out),
        Command::Analyze { source } => cmd_analyze(source, config, out),
        Command::Env { source, table } => cmd_env(source, *table, config, out),
        Command::Check {
            source,
            identity,
            subspace,
        } => cmd_check(source, (*identity).into(), *subspace, config, out),
        Command::Crosscheck { source, all_catalog } => {
            let ids: Vec<String> = match (source, all_catalog) {
                (_, true) => catalog::DEFAULT_IDS.iter().map(|s| s.to_string()).collect(),
                (Some(s), false) => vec![s.clone()],
                (None, false) => return Err(Failure::new(EXIT_USAGE, "crosscheck needs a source or --all-catalog")),
            };
            cmd_crosscheck(&ids, *all_catalog, config, out)
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                let listing = catalog::listing()?;
                if config.json_output {
                    emit(out, &listing)?;
                } else {
                    for l in listing {
                        line(
                            out,
                            format!(
                                "{:<20} dim {:<2} dim u(L) {:<5} expected {}",
                                l.id,
                                l.dim,
                                l.envelope_dim,
                                prediction_text(&l.expected)
                            ),
                        )?;
                    }
                }
                Ok(EXIT_OK)
            }
            CatalogAction::Emit { id } => {
                let entry = catalog::builtin(id)?;
                line(out, AlgebraFile::from_algebra(&entry.algebra).to_json())?;
                Ok(EXIT_OK)
            }
        },
    }
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    p: u8,
    dim: usize,
    envelope_dim: u128,
}

pub fn cmd_validate(file: &str, config: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let spec = AlgebraFile::read(Path::new(file))?.to_spec()?;
    let alg = validate(&spec)?;
    let report = ValidateReport {
        valid: true,
        p: alg.field().p(),
        dim: alg.dim(),
        envelope_dim: alg.enveloping().dim(),
    };
    if config.json_output {
        emit(out, &report)?;
    } else {
        line(
            out,
            format!(
                "valid: dim L = {} over F_{}, dim u(L) = {}",
                report.dim, report.p, report.envelope_dim
            ),
        )?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct AnalyzeReport {
    algebra: String,
    p: u8,
    dim: usize,
    lower_central_dims: Vec<usize>,
    derived_dims: Vec<usize>,
    nilpotent: bool,
    solvable: bool,
    center_dim: usize,
    lderived_dim: usize,
    lderived_closure_dim: usize,
    basis_p_nilpotence: Vec<ElementPNilpotence>,
    l_p_nilpotent: SubspacePNilpotence,
    lderived_p_nilpotent: SubspacePNilpotence,
}

fn pnil_text(v: &SubspacePNilpotence) -> &'static str {
    match v.holds() {
        Some(true) => "yes",
        Some(false) => "no",
        None => "undecided",
    }
}

pub fn cmd_analyze(source: &str, config: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let (id, alg) = load_source(source)?;
    let lcs = alg.lower_central_series();
    let ds = alg.derived_series();
    let structural = identities::structural_predicates(&alg)?;
    let full = Subspace::full(alg.field(), alg.dim());
    let basis_p_nilpotence = (0..alg.dim())
        .map(|i| alg.is_p_nilpotent_element(&alg.basis_vector(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let report = AnalyzeReport {
        algebra: id,
        p: alg.field().p(),
        dim: alg.dim(),
        lower_central_dims: lcs.dims(),
        derived_dims: ds.dims(),
        nilpotent: lcs.terminated_zero,
        solvable: ds.terminated_zero,
        center_dim: alg.center().dim(),
        lderived_dim: structural.lderived_dim,
        lderived_closure_dim: structural.lderived_closure_dim,
        basis_p_nilpotence,
        l_p_nilpotent: alg.is_p_nilpotent_subspace(&full, config.check.pnil_budget)?,
        lderived_p_nilpotent: structural.lderived_p_nilpotent,
    };
    if config.json_output {
        emit(out, &report)?;
        return Ok(EXIT_OK);
    }
    line(out, format!("algebra {} over F_{}, dim {}", report.algebra, report.p, report.dim))?;
    line(out, format!("lower central dims {:?} (nilpotent: {})", report.lower_central_dims, report.nilpotent))?;
    line(out, format!("derived dims {:?} (solvable: {})", report.derived_dims, report.solvable))?;
    line(out, format!("center dim {}", report.center_dim))?;
    line(
        out,
        format!(
            "L' dim {}, restricted closure dim {}, p-nilpotent: {}",
            report.lderived_dim,
            report.lderived_closure_dim,
            pnil_text(&report.lderived_p_nilpotent)
        ),
    )?;
    line(out, format!("L p-nilpotent: {}", pnil_text(&report.l_p_nilpotent)))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct EnvReport {
    algebra: String,
    envelope_dim: usize,
    plus_dim: usize,
    minus_dim: usize,
}

pub fn cmd_env(source: &str, table: bool, config: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let (id, alg) = load_source(source)?;
    let env = alg.enveloping();
    let cap = config.check.ambient_cap;
    let ambient = |e| Failure::from(IdentityError::from(e));
    if table {
        let tables = (0..alg.dim())
            .map(|i| env.left_multiplication_matrix(i, cap))
            .collect::<Result<Vec<_>, _>>()
            .map_err(ambient)?;
        emit(out, &tables)?;
        return Ok(EXIT_OK);
    }
    let d = env.ambient_dim(cap).map_err(ambient)?;
    let dec = env.symmetric_decomposition(cap).map_err(ambient)?;
    let report = EnvReport {
        algebra: id,
        envelope_dim: d,
        plus_dim: dec.plus.dim(),
        minus_dim: dec.minus.dim(),
    };
    if config.json_output {
        emit(out, &report)?;
    } else {
        line(
            out,
            format!(
                "{}: dim u(L) = {}, dim u(L)^+ = {}, dim u(L)^- = {}",
                report.algebra, report.envelope_dim, report.plus_dim, report.minus_dim
            ),
        )?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CheckReport {
    algebra: String,
    subspace: &'static str,
    subspace_dim: usize,
    verdict: IdentityVerdict,
    predicted: bool,
    agreement: bool,
}

fn verdict_text(v: &IdentityVerdict) -> String {
    match (v.holds, v.bound) {
        (Truth::Holds, Some(b)) => format!("holds({b})"),
        (Truth::Holds, None) => "holds".into(),
        (Truth::Fails, _) => "fails".into(),
        (Truth::Inconclusive, Some(b)) => format!("inconclusive(best {b})"),
        (Truth::Inconclusive, None) => "inconclusive".into(),
    }
}

fn prediction_text(p: &Prediction) -> String {
    format!(
        "nilpotent={} solvable={} engel={}",
        p.lie_nilpotent, p.lie_solvable, p.bounded_engel
    )
}

pub fn cmd_check(
    source: &str,
    identity: Identity,
    subspace: SubspaceArg,
    config: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let start = Instant::now();
    let (id, alg) = load_source(source)?;
    let predicted = identities::structural_predicates(&alg)?.prediction().get(identity);
    let amb = EnvAmbient::new(alg.enveloping(), config.check.ambient_cap)?;
    let (label, v) = match subspace {
        SubspaceArg::Plus => ("plus", amb.symmetric_subspace()?),
        SubspaceArg::Full => ("full", Subspace::full(alg.field(), amb.dim())),
    };
    let verdict = match identity {
        Identity::LieNilpotent => amb.nilpotency_chain(&v)?.1,
        Identity::LieSolvable => amb.solvability_chain(&v)?.1,
        Identity::BoundedEngel => {
            let (state, _) = amb.nilpotency_chain(&v)?;
            let step = match state.status {
                identities::ChainStatus::ReachedZero { step } => Some(step),
                _ => None,
            };
            amb.engel_check(&v, &config.check, step)?
        }
    };
    let agreement = verdict.holds.decided() == Some(predicted);
    let report = CheckReport {
        algebra: id,
        subspace: label,
        subspace_dim: v.dim(),
        verdict,
        predicted,
        agreement,
    };
    if config.json_output {
        emit_timed(out, &report, config, start)?;
    } else {
        line(
            out,
            format!(
                "{} {} on u(L){} (dim {}): {} (predicted {}){}",
                report.algebra,
                identity.name(),
                if label == "plus" { "^+" } else { "" },
                report.subspace_dim,
                verdict_text(&report.verdict),
                if predicted { "holds" } else { "fails" },
                if agreement { "" } else { " DISAGREEMENT" }
            ),
        )?;
        if let Some((s, y)) = report.verdict.engel_witness() {
            let env = alg.enveloping();
            line(out, format!("  witness s = {}, y = {}", env.format(s), env.format(y)))?;
        }
    }
    Ok(if agreement { EXIT_OK } else { EXIT_DISAGREE })
}

fn verdicts_text(label: &str, v: &ComputedVerdicts) -> String {
    format!(
        "  {label:<6} (dim {:>3})  nilpotent={} solvable={} engel={}",
        v.subspace_dim,
        verdict_text(&v.lie_nilpotent),
        verdict_text(&v.lie_solvable),
        verdict_text(&v.bounded_engel)
    )
}

pub fn cmd_crosscheck(ids: &[String], as_list: bool, config: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let start = Instant::now();
    let mut reports: Vec<CrossCheckReport> = Vec::with_capacity(ids.len());
    for source in ids {
        let (id, alg) = load_source(source)?;
        reports.push(identities::cross_check(&id, &alg, &config.check)?);
    }
    let all_agree = reports.iter().all(|r| r.agreement);
    if config.json_output {
        if as_list {
            emit_timed(out, &CatalogRun { reports: &reports }, config, start)?;
        } else {
            emit_timed(out, &reports[0], config, start)?;
        }
    } else {
        for r in &reports {
            let status = if r.agreement {
                "agreement".to_string()
            } else {
                let mut parts = Vec::new();
                if !r.disagreements.is_empty() {
                    parts.push(format!("DISAGREEMENT {:?}", r.disagreements));
                }
                if !r.inconclusive.is_empty() {
                    parts.push(format!("INCONCLUSIVE {:?}", r.inconclusive));
                }
                parts.join(", ")
            };
            line(out, format!("{}: {}", r.algebra, status))?;
            line(out, format!("  predicted          {}", prediction_text(&r.predicted)))?;
            line(out, verdicts_text("u(L)^+", &r.computed_plus))?;
            line(out, verdicts_text("u(L)", &r.computed_full))?;
        }
    }
    Ok(if all_agree { EXIT_OK } else { EXIT_DISAGREE })
}

#[derive(Serialize)]
struct CatalogRun<'a> {
    reports: &'a [CrossCheckReport],
}
