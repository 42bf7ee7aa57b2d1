//! Command-line workflows: declarative TOML configs with flag overrides,
//! the four commands (bound curves, Monte Carlo validation, pattern
//! optimization, verification suite), and CSV/JSON result emission.
//!
//! Exit-code contract: 0 = success, 1 = config or I/O error, 2 = property
//! or dominance failure. Every output file embeds the fully resolved config
//! so a run can be reproduced from its own artifact.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundEngine, BoundKind, ThetaPartition};
use crate::channel::{FadingModel, NoiseSpec};
use crate::codec::{CodeParams, Flavor};
use crate::error::Error;
use crate::optimizer::{brute_force_best_pattern, greedy_pattern_with, ttp_pattern};
use crate::pattern::TransmissionPattern;
use crate::sim::{sweep, SimConfig};
use crate::verify::{run_all, FaultInjection};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_CHECK: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Check(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Check(_) => EXIT_CHECK,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindSelect {
    Gallager,
    Refined,
    Both,
}

impl KindSelect {
    fn kinds(self) -> Vec<BoundKind> {
        match self {
            KindSelect::Gallager => vec![BoundKind::Gallager],
            KindSelect::Refined => vec![BoundKind::Refined],
            KindSelect::Both => vec![BoundKind::Refined, BoundKind::Gallager],
        }
    }
}

/// Flag overrides applied on top of the config file.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub theta_n: Option<usize>,
    pub trials: Option<u64>,
    pub bound: Option<KindSelect>,
}

// ---------------------------------------------------------------------------
// Config file schema
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    seed: Option<u64>,
    code: CodeSection,
    pattern: Option<PatternSection>,
    /// One `channel` table or a `channels` array of tables.
    channel: Option<ChannelSection>,
    #[serde(default)]
    channels: Vec<ChannelSection>,
    snr: Option<SnrSection>,
    bound: Option<BoundSection>,
    sim: Option<SimSection>,
    optimize: Option<OptimizeSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeSection {
    n: u32,
    k: u32,
    c: u32,
    v: u32,
    flavor: Flavor,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternSection {
    ells: Option<Vec<u32>>,
    passes: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelSection {
    family: String,
    omega: Option<f64>,
    m: Option<f64>,
    kfactor: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SnrSection {
    db: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundSection {
    kind: Option<KindSelect>,
    theta_n: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimSection {
    trials: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizeSection {
    p_ini: u32,
    budget: u64,
    snr_db: f64,
}

pub fn load_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Resolved configuration (echoed into every output)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ResolvedChannel {
    pub family: String,
    pub omega: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kfactor: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolvedConfig {
    pub command: String,
    pub seed: u64,
    pub n: u32,
    pub k: u32,
    pub c: u32,
    pub v: u32,
    pub flavor: String,
    pub pattern: Vec<u32>,
    pub channels: Vec<ResolvedChannel>,
    pub snr_db: Vec<f64>,
    pub bound_kind: String,
    pub theta_n: usize,
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_ini: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

struct Resolved {
    params: CodeParams,
    pattern: TransmissionPattern,
    models: Vec<(ResolvedChannel, FadingModel)>,
    snr_db: Vec<f64>,
    kind: KindSelect,
    theta_n: usize,
    trials: u64,
    seed: u64,
    optimize: Option<(u32, u64, f64)>,
}

fn resolve(file: &FileConfig, overrides: &Overrides, command: &str) -> Result<Resolved, CliError> {
    let params = CodeParams::new(
        file.code.n,
        file.code.k,
        file.code.c,
        file.code.v,
        file.code.flavor,
    )?;
    let pattern = match &file.pattern {
        Some(PatternSection { ells: Some(e), passes: None }) => TransmissionPattern::new(e.clone())?,
        Some(PatternSection { ells: None, passes: Some(p) }) => {
            TransmissionPattern::uniform(*p, params.segments())
        }
        Some(_) => {
            return Err(CliError::Config(
                "pattern: specify exactly one of `ells` or `passes`".into(),
            ))
        }
        None => {
            if command == "optimize" {
                // The optimizer builds its own patterns.
                TransmissionPattern::uniform(1, params.segments())
            } else {
                return Err(CliError::Config("missing [pattern] section".into()));
            }
        }
    };
    if pattern.len() != params.segments() {
        return Err(CliError::Config(format!(
            "pattern has {} entries but n/k = {}",
            pattern.len(),
            params.segments()
        )));
    }

    let mut sections: Vec<ChannelSection> = file.channels.clone();
    if let Some(single) = &file.channel {
        sections.insert(0, single.clone());
    }
    if sections.is_empty() {
        return Err(CliError::Config(
            "no channel configured: add a [channel] table or a [[channels]] array".into(),
        ));
    }
    let mut models = Vec::with_capacity(sections.len());
    for section in &sections {
        let omega = section.omega.unwrap_or(1.0);
        let model = match section.family.as_str() {
            "awgn" => FadingModel::awgn(params.flavor),
            "rayleigh" => FadingModel::rayleigh(omega, params.flavor)?,
            "nakagami" => {
                let m = section.m.ok_or_else(|| {
                    CliError::Config("nakagami channel requires `m`".into())
                })?;
                FadingModel::nakagami(omega, m, params.flavor)?
            }
            "rician" => {
                let k = section.kfactor.ok_or_else(|| {
                    CliError::Config("rician channel requires `kfactor`".into())
                })?;
                FadingModel::rician(omega, k, params.flavor)?
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown fading family `{other}` (expected awgn|rayleigh|nakagami|rician)"
                )))
            }
        };
        models.push((
            ResolvedChannel {
                family: model.family_name().to_string(),
                omega: model.omega(),
                m: model.m(),
                kfactor: model.kfactor(),
            },
            model,
        ));
    }

    let snr_db = match &file.snr {
        Some(SnrSection { db: Some(list), start: None, stop: None, step: None }) => list.clone(),
        Some(SnrSection { db: None, start: Some(a), stop: Some(b), step: Some(s) }) => {
            if !s.is_finite() || *s <= 0.0 || b < a {
                return Err(CliError::Config("snr: need step > 0 and stop >= start".into()));
            }
            let mut out = vec![];
            let mut i = 0u32;
            loop {
                let v = a + f64::from(i) * s;
                if v > b + 1e-9 {
                    break;
                }
                out.push(v);
                i += 1;
            }
            out
        }
        Some(_) => {
            return Err(CliError::Config(
                "snr: specify either `db = [..]` or all of `start`/`stop`/`step`".into(),
            ))
        }
        None => vec![],
    };
    if snr_db.is_empty() && command != "optimize" {
        return Err(CliError::Config("empty SNR grid".into()));
    }

    let kind = overrides
        .bound
        .or(file.bound.as_ref().and_then(|b| b.kind))
        .unwrap_or(KindSelect::Both);
    let theta_n = overrides
        .theta_n
        .or(file.bound.as_ref().and_then(|b| b.theta_n))
        .unwrap_or(20);
    if theta_n == 0 {
        return Err(CliError::Config("theta_n must be >= 1".into()));
    }
    let trials = overrides
        .trials
        .or(file.sim.as_ref().and_then(|s| s.trials))
        .unwrap_or(10_000);
    let seed = overrides.seed.or(file.seed).unwrap_or(0);
    let optimize = file
        .optimize
        .as_ref()
        .map(|o| (o.p_ini, o.budget, o.snr_db));

    Ok(Resolved {
        params,
        pattern,
        models,
        snr_db,
        kind,
        theta_n,
        trials,
        seed,
        optimize,
    })
}

impl Resolved {
    fn echo(&self, command: &str) -> ResolvedConfig {
        ResolvedConfig {
            command: command.to_string(),
            seed: self.seed,
            n: self.params.n,
            k: self.params.k,
            c: self.params.c,
            v: self.params.v,
            flavor: match self.params.flavor {
                Flavor::Real => "real".into(),
                Flavor::Complex => "complex".into(),
            },
            pattern: self.pattern.ells().to_vec(),
            channels: self.models.iter().map(|(c, _)| c.clone()).collect(),
            snr_db: self.snr_db.clone(),
            bound_kind: match self.kind {
                KindSelect::Gallager => "gallager".into(),
                KindSelect::Refined => "refined".into(),
                KindSelect::Both => "both".into(),
            },
            theta_n: self.theta_n,
            trials: self.trials,
            p_ini: self.optimize.map(|o| o.0),
            budget: self.optimize.map(|o| o.1),
        }
    }
}

// ---------------------------------------------------------------------------
// Output rows
// ---------------------------------------------------------------------------

/// A typed output row: fixed CSV column set plus a JSON mirror with
/// identical field names.
pub trait Row: Serialize {
    fn header() -> &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub family: String,
    pub omega: f64,
    pub m: Option<f64>,
    pub kfactor: Option<f64>,
    pub flavor: String,
    pub snr_db: f64,
    pub kind: String,
    pub theta_n: usize,
    pub a: usize,
    pub epsilon_a: f64,
    pub p_e: f64,
}

impl Row for BoundRow {
    fn header() -> &'static [&'static str] {
        &[
            "family", "omega", "m", "kfactor", "flavor", "snr_db", "kind", "theta_n", "a",
            "epsilon_a", "p_e",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.family.clone(),
            self.omega.to_string(),
            opt_cell(self.m),
            opt_cell(self.kfactor),
            self.flavor.clone(),
            self.snr_db.to_string(),
            self.kind.clone(),
            self.theta_n.to_string(),
            self.a.to_string(),
            self.epsilon_a.to_string(),
            self.p_e.to_string(),
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulateRow {
    pub family: String,
    pub omega: f64,
    pub m: Option<f64>,
    pub kfactor: Option<f64>,
    pub flavor: String,
    pub snr_db: f64,
    pub theta_n: usize,
    pub errors: u64,
    pub trials: u64,
    pub bler: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub bound_refined: f64,
    pub bound_gallager: f64,
    pub dominance_ok: bool,
}

impl Row for SimulateRow {
    fn header() -> &'static [&'static str] {
        &[
            "family", "omega", "m", "kfactor", "flavor", "snr_db", "theta_n", "errors", "trials",
            "bler", "ci95_lo", "ci95_hi", "bound_refined", "bound_gallager", "dominance_ok",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.family.clone(),
            self.omega.to_string(),
            opt_cell(self.m),
            opt_cell(self.kfactor),
            self.flavor.clone(),
            self.snr_db.to_string(),
            self.theta_n.to_string(),
            self.errors.to_string(),
            self.trials.to_string(),
            self.bler.to_string(),
            self.ci95_lo.to_string(),
            self.ci95_hi.to_string(),
            self.bound_refined.to_string(),
            self.bound_gallager.to_string(),
            self.dominance_ok.to_string(),
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizeRow {
    /// step | final | ttp | brute_force
    pub record: String,
    pub step: Option<usize>,
    /// Pattern in bracket form, e.g. [3,3,3,10].
    pub pattern: String,
    pub p_e: f64,
}

impl Row for OptimizeRow {
    fn header() -> &'static [&'static str] {
        &["record", "step", "pattern", "p_e"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.record.clone(),
            self.step.map(|s| s.to_string()).unwrap_or_default(),
            self.pattern.clone(),
            self.p_e.to_string(),
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyRow {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Row for VerifyRow {
    fn header() -> &'static [&'static str] {
        &["name", "passed", "measured", "threshold", "detail"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.name.clone(),
            self.passed.to_string(),
            self.measured.to_string(),
            self.threshold.to_string(),
            csv_quote(&self.detail),
        ]
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes rows as CSV (resolved config echoed in `#` comment lines) or as a
/// JSON object `{config, rows}` whose rows mirror the CSV columns.
pub fn write_output<R: Row>(
    format: OutputFormat,
    out: Option<&Path>,
    echo: &ResolvedConfig,
    rows: &[R],
) -> Result<(), CliError> {
    let text = match format {
        OutputFormat::Csv => {
            let mut s = String::new();
            let echo_toml =
                toml::to_string(echo).map_err(|e| CliError::Io(format!("config echo: {e}")))?;
            for line in echo_toml.lines() {
                s.push_str("# ");
                s.push_str(line);
                s.push('\n');
            }
            s.push_str(&R::header().join(","));
            s.push('\n');
            for row in rows {
                s.push_str(&row.cells().join(","));
                s.push('\n');
            }
            s
        }
        OutputFormat::Json => {
            let doc = serde_json::json!({ "config": echo, "rows": rows });
            let mut s = serde_json::to_string_pretty(&doc)
                .map_err(|e| CliError::Io(format!("json: {e}")))?;
            s.push('\n');
            s
        }
    };
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Bound curves: one row per (channel, SNR, kind, segment).
pub fn cmd_bound(
    file: &FileConfig,
    overrides: &Overrides,
) -> Result<(ResolvedConfig, Vec<BoundRow>), CliError> {
    let r = resolve(file, overrides, "bound")?;
    let partition = ThetaPartition::uniform(r.theta_n);
    let flavor = match r.params.flavor {
        Flavor::Real => "real",
        Flavor::Complex => "complex",
    };
    let mut rows = vec![];
    for (channel, model) in &r.models {
        for &snr_db in &r.snr_db {
            let noise = NoiseSpec::from_snr_db(snr_db, model.omega())?;
            let engine = BoundEngine::new(&r.params, model, &noise, Some(&partition))?;
            for kind in r.kind.kinds() {
                let report = engine.evaluate(kind, &r.pattern)?;
                for (i, &eps) in report.epsilons.iter().enumerate() {
                    rows.push(BoundRow {
                        family: channel.family.clone(),
                        omega: channel.omega,
                        m: channel.m,
                        kfactor: channel.kfactor,
                        flavor: flavor.into(),
                        snr_db,
                        kind: kind.to_string(),
                        theta_n: r.theta_n,
                        a: i + 1,
                        epsilon_a: eps,
                        p_e: report.p_e,
                    });
                }
            }
        }
    }
    Ok((r.echo("bound"), rows))
}

/// Monte Carlo validation with paired bounds. Returns the dominance
/// violation count alongside the rows; the caller maps violations to the
/// checked exit code.
pub fn cmd_simulate(
    file: &FileConfig,
    overrides: &Overrides,
) -> Result<(ResolvedConfig, Vec<SimulateRow>, usize), CliError> {
    let r = resolve(file, overrides, "simulate")?;
    let flavor = match r.params.flavor {
        Flavor::Real => "real",
        Flavor::Complex => "complex",
    };
    let configs: Vec<SimConfig> = r
        .models
        .iter()
        .map(|(_, model)| SimConfig {
            params: r.params,
            pattern: r.pattern.clone(),
            model: *model,
            snr_db_grid: r.snr_db.clone(),
            trials: r.trials,
            seed: r.seed,
            theta_n: r.theta_n,
        })
        .collect();
    let mut rows = vec![];
    let mut violations = 0usize;
    for ((channel, _), result) in r.models.iter().zip(sweep(&configs)) {
        let result = result?;
        for p in &result.points {
            if !p.dominance_ok {
                violations += 1;
            }
            rows.push(SimulateRow {
                family: channel.family.clone(),
                omega: channel.omega,
                m: channel.m,
                kfactor: channel.kfactor,
                flavor: flavor.into(),
                snr_db: p.snr_db,
                theta_n: r.theta_n,
                errors: p.errors,
                trials: p.trials,
                bler: p.bler,
                ci95_lo: p.ci95_lo,
                ci95_hi: p.ci95_hi,
                bound_refined: p.bound_refined,
                bound_gallager: p.bound_gallager,
                dominance_ok: p.dominance_ok,
            });
        }
    }
    Ok((r.echo("simulate"), rows, violations))
}

/// Greedy trajectory, final/TTP patterns, and (when enumerable) the
/// brute-force optimum.
pub fn cmd_optimize(
    file: &FileConfig,
    overrides: &Overrides,
) -> Result<(ResolvedConfig, Vec<OptimizeRow>), CliError> {
    let r = resolve(file, overrides, "optimize")?;
    let (p_ini, budget, snr_db) = r
        .optimize
        .ok_or_else(|| CliError::Config("missing [optimize] section".into()))?;
    let (_, model) = &r.models[0];
    let noise = NoiseSpec::from_snr_db(snr_db, model.omega())?;
    let sigma2 = noise.sigma2();
    let partition = ThetaPartition::uniform(r.theta_n);
    let kind = match r.kind {
        KindSelect::Gallager => BoundKind::Gallager,
        _ => BoundKind::Refined,
    };
    let (final_pattern, trajectory) =
        greedy_pattern_with(kind, &r.params, model, sigma2, &partition, p_ini, budget)?;
    let engine = BoundEngine::new(&r.params, model, &noise, Some(&partition))?;
    let mut rows = vec![];
    for (step, ells) in trajectory.iter().enumerate() {
        let pattern = TransmissionPattern::new(ells.clone())?;
        rows.push(OptimizeRow {
            record: "step".into(),
            step: Some(step),
            pattern: pattern.to_string(),
            p_e: engine.evaluate(kind, &pattern)?.p_e,
        });
    }
    let final_pe = engine.evaluate(kind, &final_pattern)?.p_e;
    rows.push(OptimizeRow {
        record: "final".into(),
        step: None,
        pattern: final_pattern.to_string(),
        p_e: final_pe,
    });
    let base = TransmissionPattern::uniform(p_ini, r.params.segments());
    let ttp = ttp_pattern(&base, (budget - p_ini as u64 * r.params.segments() as u64) as u32);
    rows.push(OptimizeRow {
        record: "ttp".into(),
        step: None,
        pattern: ttp.to_string(),
        p_e: engine.evaluate(kind, &ttp)?.p_e,
    });
    match brute_force_best_pattern(&r.params, model, sigma2, &partition, budget) {
        Ok((best, value)) => rows.push(OptimizeRow {
            record: "brute_force".into(),
            step: None,
            pattern: best.to_string(),
            p_e: value,
        }),
        Err(Error::EnumerationGuard { count, max }) => {
            eprintln!("note: skipping brute-force oracle ({count} compositions exceed {max})");
        }
        Err(e) => return Err(e.into()),
    }
    let mut echo = r.echo("optimize");
    echo.snr_db = vec![snr_db];
    Ok((echo, rows))
}

/// Runs the property suite, printing one line per check. Returns the rows
/// and the failure count.
pub fn cmd_verify(seed: u64, fault: FaultInjection) -> (Vec<VerifyRow>, usize) {
    let reports = run_all(seed, fault);
    let mut rows = vec![];
    let mut failures = 0usize;
    for r in reports {
        if !r.passed {
            failures += 1;
        }
        println!(
            "{} {:<32} measured={:<12.6e} threshold={:<12.6e} {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.measured,
            r.threshold,
            r.detail
        );
        rows.push(VerifyRow {
            name: r.name.to_string(),
            passed: r.passed,
            measured: r.measured,
            threshold: r.threshold,
            detail: r.detail,
        });
    }
    (rows, failures)
}

// ---------------------------------------------------------------------------
// Top-level dispatch
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum CommandSpec {
    Bound,
    Simulate,
    Optimize,
    Verify { inject_fault: Option<String> },
}

#[derive(Clone, Debug)]
pub struct RunSpec {
    pub command: CommandSpec,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub overrides: Overrides,
}

fn require_config(spec: &RunSpec) -> Result<FileConfig, CliError> {
    let path = spec
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required for this command".into()))?;
    load_config(path)
}

pub fn run(spec: &RunSpec) -> Result<(), CliError> {
    match &spec.command {
        CommandSpec::Bound => {
            let file = require_config(spec)?;
            let (echo, rows) = cmd_bound(&file, &spec.overrides)?;
            write_output(spec.format, spec.out.as_deref(), &echo, &rows)
        }
        CommandSpec::Simulate => {
            let file = require_config(spec)?;
            let (echo, rows, violations) = cmd_simulate(&file, &spec.overrides)?;
            write_output(spec.format, spec.out.as_deref(), &echo, &rows)?;
            let total = rows.len();
            println!(
                "dominance: {}/{} points with Wilson 95% upper limit above the refined bound",
                violations, total
            );
            if violations > 0 {
                return Err(CliError::Check(format!(
                    "{violations} of {total} points violate CI-upper dominance"
                )));
            }
            Ok(())
        }
        CommandSpec::Optimize => {
            let file = require_config(spec)?;
            let (echo, rows) = cmd_optimize(&file, &spec.overrides)?;
            write_output(spec.format, spec.out.as_deref(), &echo, &rows)
        }
        CommandSpec::Verify { inject_fault } => {
            let fault = match inject_fault.as_deref() {
                None => FaultInjection::None,
                Some("rician-sign") => FaultInjection::RicianSign,
                Some(other) => {
                    return Err(CliError::Config(format!(
                        "unknown fault `{other}` (expected rician-sign)"
                    )))
                }
            };
            let seed = spec.overrides.seed.unwrap_or(0);
            let (rows, failures) = cmd_verify(seed, fault);
            if spec.out.is_some() {
                let echo = ResolvedConfig {
                    command: "verify".into(),
                    seed,
                    n: 0,
                    k: 0,
                    c: 0,
                    v: 0,
                    flavor: String::new(),
                    pattern: vec![],
                    channels: vec![],
                    snr_db: vec![],
                    bound_kind: String::new(),
                    theta_n: 0,
                    trials: 0,
                    p_ini: None,
                    budget: None,
                };
                write_output(spec.format, spec.out.as_deref(), &echo, &rows)?;
            }
            if failures > 0 {
                return Err(CliError::Check(format!("{failures} verification checks failed")));
            }
            Ok(())
        }
    }
}
