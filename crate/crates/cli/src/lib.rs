//! Command handlers behind the `clonecast` binary.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use clonecast::channels::{
    oracle_bloch, reconcile_with, write_discrepancy_log, ClonerVariant, DiscrepancyReport, OracleChannel, Pairing,
    VariantName,
};
use clonecast::cloner::{
    build_isometry, clone_joint, oracle_clone_joint, realizable_mu_max, schwartz_feasible, schwartz_mu_max, si_params,
    CloningMachine, MachineKind,
};
use clonecast::random::{random_product, random_pure, random_two_qubit, seeded_rng, StateRng};
use clonecast::scan::{
    optimize_with, region_fraction, scan_bds_with, ChannelPath, EnsembleMode, EnsembleSpec, Objective, ScanRecord,
};
use clonecast::separability::ppt_test;
use clonecast::states::{bloch_from_density, BellDiagonal, TwoQubitBloch};
use rand::Rng;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Core(#[from] clonecast::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use clonecast::Error as E;
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Core(
                E::InvalidMachine(_)
                | E::NoUniversalMachine { .. }
                | E::InfeasibleMachine(_)
                | E::InvalidEnsemble(_)
                | E::InvalidGrid(_)
                | E::NoClosedForm { .. },
            ) => 2,
            CliError::Core(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "clonecast", version, about = "Cloning machines and entanglement broadcasting for two-qubit states")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the overlap inequality over a (λ, μ) grid.
    Feasibility(FeasibilityArgs),
    /// Classify a Bell-diagonal grid for one variant.
    Scan(ScanArgs),
    /// Run the seeded consistency suites.
    Verify(VerifyArgs),
    /// Optimize machines for restricted input ensembles.
    Optimize(OptimizeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Certified,
    Oracle,
    ClosedForm,
}

#[derive(Debug, Args)]
pub struct FeasibilityArgs {
    /// System dimension M.
    #[arg(long, short = 'm', default_value_t = 2)]
    pub dim: usize,
    /// `start:stop:step` or a single value.
    #[arg(long, default_value = "0:0.5:0.05")]
    pub lambda: String,
    #[arg(long, default_value = "0:1:0.05")]
    pub mu: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub variant: String,
    #[arg(long, default_value_t = clonecast::scan::DEFAULT_STEP)]
    pub step: f64,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long)]
    pub pairing: Option<String>,
    /// Channel evaluation: printed formulas where certified, or one path throughout.
    #[arg(long, value_enum, default_value_t = PathArg::Certified)]
    pub path: PathArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Where to write the printed-formula discrepancy log.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// orthogonal, non-orthogonal or both.
    #[arg(long, default_value = "both")]
    pub kind: String,
    #[arg(long, default_value = "local")]
    pub mode: String,
    /// Comma-separated values; `pi`, `pi/8` and `3pi/8` forms are accepted.
    #[arg(long)]
    pub z: Option<String>,
    #[arg(long, default_value = "mean")]
    pub objective: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

pub fn run(config: RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    match config.command {
        Command::Feasibility(a) => cmd_feasibility(&a, stdout),
        Command::Scan(a) => cmd_scan(&a, stdout),
        Command::Verify(a) => cmd_verify(&a, stdout),
        Command::Optimize(a) => cmd_optimize(&a, stdout),
    }
}

/// Reals at 12 significant digits, trailing zeros trimmed.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..12).contains(&exp) {
        trim(format!("{:.*}", (11 - exp).max(0) as usize, x))
    } else {
        format!("{}e{exp}", trim(mant.to_string()))
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Writes to `out` when given, otherwise to `stdout`.
fn emit(out: Option<&Path>, stdout: &mut dyn Write, body: &str) -> CliResult<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
            w.write_all(body.as_bytes()).and_then(|_| w.flush()).map_err(io_err(path))
        }
        None => stdout.write_all(body.as_bytes()).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn say(stdout: &mut dyn Write, line: &str) -> CliResult<()> {
    writeln!(stdout, "{line}").map_err(io_err(Path::new("<stdout>")))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

/// `start:stop:step` or a single value.
pub fn parse_range(text: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| usage(format!("bad number `{p}` in range `{text}`"))))
        .collect::<CliResult<_>>()?;
    match parts[..] {
        [v] => Ok(vec![v]),
        [a, b, h] => {
            if !(h > 0.0) || b < a || !(a.is_finite() && b.is_finite()) {
                return Err(usage(format!("empty range `{text}`")));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            Ok((0..=n).map(|k| ((a + k as f64 * h) * 1e12).round() / 1e12).collect())
        }
        _ => Err(usage(format!("range `{text}` must be start:stop:step or a single value"))),
    }
}

/// A number or a multiple of π: `0.3`, `pi`, `pi/8`, `3pi/8`, `3*pi/8`.
pub fn parse_z(token: &str) -> CliResult<f64> {
    let t = token.trim().to_ascii_lowercase().replace('*', "");
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let bad = || usage(format!("cannot read z value `{token}`"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let coeff = match num.strip_suffix("pi").ok_or_else(bad)? {
        "" => 1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(coeff * PI / den)
}

pub fn cmd_feasibility(a: &FeasibilityArgs, stdout: &mut dyn Write) -> CliResult<()> {
    if a.dim < 2 {
        return Err(usage("dimension must be at least 2"));
    }
    let lambdas = parse_range(&a.lambda)?;
    let mus = parse_range(&a.mu)?;
    if lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(usage("λ range must lie within [0, 1]"));
    }
    if mus.iter().any(|m| !(-1.0..=1.0).contains(m)) {
        return Err(usage("μ range must lie within [-1, 1]"));
    }
    let m = a.dim;

    #[derive(serde::Serialize)]
    struct Row {
        lambda: f64,
        mu: f64,
        feasible: bool,
        si_compatible: bool,
        max_mu: f64,
        realizable: bool,
    }
    let rows: Vec<Row> = lambdas
        .iter()
        .flat_map(|&lambda| {
            mus.iter().map(move |&mu| {
                let feasible = schwartz_feasible(lambda, mu, m);
                Row {
                    lambda,
                    mu,
                    feasible,
                    si_compatible: schwartz_feasible(lambda, 1.0 - m as f64 * lambda, m),
                    max_mu: if feasible || schwartz_feasible(lambda, 0.0, m) { schwartz_mu_max(lambda, m) } else { 0.0 },
                    realizable: feasible && mu.abs() <= realizable_mu_max(lambda, m) + 1e-12,
                }
            })
        })
        .collect();

    let body = match a.format {
        OutputFormat::Json => to_json(&rows),
        OutputFormat::Csv => {
            let mut s = String::from("lambda,mu,feasible,si_compatible,max_mu,realizable\n");
            for r in &rows {
                s += &format!(
                    "{},{},{},{},{},{}\n",
                    fmt_real(r.lambda),
                    fmt_real(r.mu),
                    r.feasible,
                    r.si_compatible,
                    fmt_real(r.max_mu),
                    r.realizable
                );
            }
            s
        }
    };
    emit(a.out.as_deref(), stdout, &body)
}

/// The variant named on the command line with any parameter overrides.
pub fn resolve_variant(a: &ScanArgs) -> CliResult<ClonerVariant> {
    let name: VariantName = a.variant.parse().map_err(usage)?;
    let default = name.default_machine();
    let machine = match (default, a.d, a.lambda, a.mu) {
        (_, None, None, None) => default,
        (CloningMachine::Orthogonal { dim, .. }, Some(d), None, None) => CloningMachine::orthogonal(dim, d)?,
        (CloningMachine::NonOrthogonal { dim, lambda, mu }, None, l, m) if l.is_some() || m.is_some() => {
            CloningMachine::non_orthogonal(dim, l.unwrap_or(lambda), m.unwrap_or(mu))?
        }
        _ => {
            return Err(usage(format!(
                "{name} is {}: use --d for orthogonal variants, --lambda/--mu for non-orthogonal ones",
                name.kind().label()
            )))
        }
    };
    let mut v = ClonerVariant::with_machine(name, machine)?;
    if let Some(p) = &a.pairing {
        v = v.with_pairing(Pairing::from_str(p).map_err(usage)?);
    }
    Ok(v)
}

pub fn scan_csv(records: &[ScanRecord]) -> String {
    let mut s = String::from(
        "c1,c2,c3,variant,valid_bds,local_separable,nonlocal_inseparable,broadcast,min_pt_local,min_pt_nonlocal\n",
    );
    for r in records {
        s += &format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            fmt_real(r.c1),
            fmt_real(r.c2),
            fmt_real(r.c3),
            r.variant,
            r.valid_bds,
            r.local_separable,
            r.nonlocal_inseparable,
            r.broadcast,
            fmt_opt(r.min_pt_local),
            fmt_opt(r.min_pt_nonlocal)
        );
    }
    s
}

pub fn cmd_scan(a: &ScanArgs, stdout: &mut dyn Write) -> CliResult<()> {
    if !(a.step > 0.0 && a.step <= 0.5) {
        return Err(usage(format!("--step {} outside (0, 0.5]", a.step)));
    }
    let variant = resolve_variant(a)?;
    let path = match a.path {
        PathArg::Certified => ChannelPath::Certified,
        PathArg::Oracle => ChannelPath::Oracle,
        PathArg::ClosedForm => ChannelPath::ClosedForm,
    };
    let records = scan_bds_with(&variant, a.step, path)?;
    for r in &records {
        r.validate()?;
    }
    let body = match a.format {
        OutputFormat::Csv => scan_csv(&records),
        OutputFormat::Json => to_json(&records),
    };
    emit(a.out.as_deref(), stdout, &body)?;

    let valid = records.iter().filter(|r| r.valid_bds).count();
    let hits = records.iter().filter(|r| r.broadcast).count();
    let summary = format!(
        "{} step={} points={} valid={valid} broadcast={hits} fraction={}",
        variant.name,
        fmt_real(a.step),
        records.len(),
        fmt_real(region_fraction(&records))
    );
    if a.out.is_some() {
        say(stdout, &summary)
    } else {
        eprintln!("{summary}");
        Ok(())
    }
}

/// Outcome of one verification suite.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub max_deviation: f64,
    pub detail: String,
}

fn random_machine(rng: &mut StateRng, kind: MachineKind, dim: usize) -> CloningMachine {
    let hi = 1.0 / (2.0 * (dim as f64 - 1.0));
    match kind {
        MachineKind::Orthogonal => CloningMachine::orthogonal(dim, rng.random_range(0.0..=hi).sqrt()).unwrap(),
        MachineKind::NonOrthogonal => {
            let l = rng.random_range(0.0..=hi);
            let mu = rng.random_range(-1.0..=1.0) * realizable_mu_max(l, dim);
            CloningMachine::non_orthogonal(dim, l, mu).unwrap()
        }
    }
}

/// Closed-form joint clones against the isometry oracle on seeded
/// machines and inputs: both kinds on qubits, orthogonal on `M = 4`.
pub fn suite_oracle_equivalence(seed: u64, trials: usize) -> CliResult<SuiteResult> {
    let mut rng = seeded_rng(seed);
    let mut worst: f64 = 0.0;
    for (kind, dim) in [(MachineKind::Orthogonal, 2), (MachineKind::NonOrthogonal, 2), (MachineKind::Orthogonal, 4)] {
        for _ in 0..trials {
            let m = random_machine(&mut rng, kind, dim);
            let psi = random_pure(&mut rng, dim);
            let dev = clone_joint(&m, &psi)?.matrix().max_abs_diff(oracle_clone_joint(&m, &psi)?.matrix());
            worst = worst.max(dev);
        }
    }
    Ok(SuiteResult {
        name: "oracle-equivalence",
        passed: worst < 1e-10,
        max_deviation: worst,
        detail: format!("{} machine/state pairs", 3 * trials),
    })
}

/// Oracle non-local outputs of the state-independent variants against
/// `{ηx, ηy, η²T}` (local, η = 2/3) and `{ηx, ηy, ηT}` (non-local, η = 3/5).
pub fn suite_si_reference(seed: u64, trials: usize) -> CliResult<SuiteResult> {
    let mut rng = seeded_rng(seed ^ 0x51);
    let mut worst: f64 = 0.0;
    for (name, eta, t_scale) in [
        (VariantName::Osil, 2.0 / 3.0, 4.0 / 9.0),
        (VariantName::Nosil, 2.0 / 3.0, 4.0 / 9.0),
        (VariantName::Osinl, 0.6, 0.6),
    ] {
        let oracle = ClonerVariant::new(name).oracle()?;
        for _ in 0..trials {
            let s = bloch_from_density(&random_two_qubit(&mut rng))?;
            let expected =
                TwoQubitBloch::unchecked(s.x.map(|e| eta * e), s.y.map(|e| eta * e), s.t.map(|r| r.map(|e| t_scale * e)));
            let got = oracle_bloch(&oracle, &s)?;
            worst = worst.max(got[2].max_abs_diff(&expected)).max(got[3].max_abs_diff(&expected));
        }
    }
    Ok(SuiteResult {
        name: "si-reference-forms",
        passed: worst < 1e-10,
        max_deviation: worst,
        detail: format!("{} inputs per variant", trials),
    })
}

fn random_bds(rng: &mut StateRng) -> BellDiagonal {
    loop {
        let c = [0; 3].map(|_| rng.random_range(-1.0..=1.0));
        let s = BellDiagonal { c };
        if s.is_valid() {
            return s;
        }
    }
}

/// Printed formulas against the oracle for the state-independent variants
/// on Bell-diagonal inputs, the domain the scans use them on.
pub fn suite_si_closed_form(seed: u64, trials: usize) -> CliResult<SuiteResult> {
    let mut rng = seeded_rng(seed ^ 0xb5);
    let mut worst: f64 = 0.0;
    for name in VariantName::ALL.into_iter().filter(|v| v.is_state_independent()) {
        let oracle = ClonerVariant::new(name).oracle()?;
        for _ in 0..trials {
            worst = worst.max(reconcile_with(&oracle, &random_bds(&mut rng).bloch())?.max());
        }
    }
    Ok(SuiteResult {
        name: "si-closed-form-bds",
        passed: worst < 1e-10,
        max_deviation: worst,
        detail: format!("{} Bell-diagonal inputs per variant", trials),
    })
}

/// Eigenvalue and determinant verdicts on `states` random two-qubit states.
pub fn suite_criterion_agreement(seed: u64, states: usize) -> CliResult<(SuiteResult, usize)> {
    let mut rng = seeded_rng(seed ^ 0xc0);
    let (mut disagree, mut band, mut entangled) = (0, 0, 0);
    for _ in 0..states {
        let v = ppt_test(&random_two_qubit(&mut rng))?;
        entangled += v.inseparable as usize;
        match v.criteria_agree() {
            Some(true) => {}
            Some(false) => disagree += 1,
            None => band += 1,
        }
    }
    Ok((
        SuiteResult {
            name: "criterion-agreement",
            passed: disagree == 0,
            max_deviation: disagree as f64,
            detail: format!("{states} states, {entangled} entangled, {disagree} disagreements, {band} in tolerance band"),
        },
        band,
    ))
}

/// Local variants act as product channels: on product inputs every
/// non-local output has `T = x yᵀ`.
pub fn suite_product_channel(seed: u64, trials: usize) -> CliResult<SuiteResult> {
    let mut rng = seeded_rng(seed ^ 0x9d);
    let mut worst: f64 = 0.0;
    for name in VariantName::ALL.into_iter().filter(|v| v.is_local()) {
        let oracle = OracleChannel::new(ClonerVariant::new(name))?;
        for _ in 0..trials {
            let (a, b) = random_product(&mut rng);
            let out = oracle.apply(&a.tensor(&b))?;
            for rho in [&out.nonlocal.0, &out.nonlocal.1] {
                let s = bloch_from_density(rho)?;
                for u in 0..3 {
                    for w in 0..3 {
                        worst = worst.max((s.t[u][w] - s.x[u] * s.y[w]).abs());
                    }
                }
            }
        }
    }
    Ok(SuiteResult {
        name: "product-channel",
        passed: worst < 1e-10,
        max_deviation: worst,
        detail: format!("{} product inputs per local variant", trials),
    })
}

/// Printed formulas against the oracle on generic inputs, all variants.
pub fn discrepancy_reports(seed: u64, trials: usize) -> CliResult<Vec<DiscrepancyReport>> {
    let mut rng = seeded_rng(seed ^ 0xd1);
    let mut reports = Vec::new();
    for name in VariantName::ALL {
        let oracle = ClonerVariant::new(name).oracle()?;
        for _ in 0..trials {
            let s = bloch_from_density(&random_two_qubit(&mut rng))?;
            reports.push(reconcile_with(&oracle, &s)?);
        }
    }
    Ok(reports)
}

pub fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let (agreement, _) = suite_criterion_agreement(a.seed, 100 * a.trials)?;
    let suites = vec![
        suite_oracle_equivalence(a.seed, a.trials)?,
        suite_si_reference(a.seed, a.trials)?,
        suite_si_closed_form(a.seed, a.trials)?,
        agreement,
        suite_product_channel(a.seed, a.trials)?,
    ];
    for s in &suites {
        say(
            stdout,
            &format!(
                "{:<22} {}  max_deviation={:.3e}  {}",
                s.name,
                if s.passed { "PASS" } else { "FAIL" },
                s.max_deviation,
                s.detail
            ),
        )?;
    }

    let reports = discrepancy_reports(a.seed, a.trials)?;
    for name in VariantName::ALL {
        let worst = reports.iter().filter(|r| r.variant == name).map(|r| r.max()).fold(0.0, f64::max);
        say(stdout, &format!("printed-form deviation {:<7} {worst:.3e}", name.as_str()))?;
    }
    if let Some(path) = &a.out {
        let f = File::create(path).map_err(io_err(path))?;
        write_discrepancy_log(BufWriter::new(f), &reports).map_err(io_err(path))?;
    }

    let failed: Vec<&str> = suites.iter().filter(|s| !s.passed).map(|s| s.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}

fn parse_kinds(s: &str) -> CliResult<Vec<MachineKind>> {
    match s.to_ascii_lowercase().as_str() {
        "orthogonal" | "o" => Ok(vec![MachineKind::Orthogonal]),
        "non-orthogonal" | "nonorthogonal" | "no" => Ok(vec![MachineKind::NonOrthogonal]),
        "both" => Ok(vec![MachineKind::Orthogonal, MachineKind::NonOrthogonal]),
        _ => Err(usage(format!("unknown kind `{s}` (expected orthogonal, non-orthogonal or both)"))),
    }
}

fn default_z(mode: EnsembleMode) -> Vec<f64> {
    match mode {
        EnsembleMode::LocalQubit => (0..=4).map(|k| k as f64 * PI / 8.0).collect(),
        EnsembleMode::NonlocalTwoQubit => (0..=5).map(|k| k as f64 * 0.1).collect(),
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct OptimizeRow {
    pub z: f64,
    pub kind: MachineKind,
    pub mode: EnsembleMode,
    pub d: Option<f64>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub distortion: f64,
}

pub fn optimize_rows(kinds: &[MachineKind], mode: EnsembleMode, zs: &[f64], objective: Objective) -> CliResult<Vec<OptimizeRow>> {
    let mut rows = Vec::new();
    for &z in zs {
        let spec = EnsembleSpec::new(mode, z).map_err(|e| usage(e.to_string()))?;
        for &kind in kinds {
            let o = optimize_with(kind, &spec, objective)?;
            let (d, lambda, mu) = match o.machine {
                CloningMachine::Orthogonal { d, .. } => (Some(d), None, None),
                CloningMachine::NonOrthogonal { lambda, mu, .. } => (None, Some(lambda), Some(mu)),
            };
            rows.push(OptimizeRow { z, kind, mode, d, lambda, mu, distortion: o.distortion });
        }
    }
    Ok(rows)
}

pub fn cmd_optimize(a: &OptimizeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let kinds = parse_kinds(&a.kind)?;
    let mode: EnsembleMode = a.mode.parse().map_err(usage)?;
    let objective: Objective = a.objective.parse().map_err(usage)?;
    let zs = match &a.z {
        Some(list) => list.split(',').map(parse_z).collect::<CliResult<Vec<_>>>()?,
        None => default_z(mode),
    };
    let rows = optimize_rows(&kinds, mode, &zs, objective)?;
    let body = match a.format {
        OutputFormat::Json => to_json(&rows),
        OutputFormat::Csv => {
            let mut s = String::from("z,kind,mode,d,lambda,mu,distortion\n");
            for r in &rows {
                s += &format!(
                    "{},{},{},{},{},{},{}\n",
                    fmt_real(r.z),
                    r.kind.label(),
                    r.mode.label(),
                    fmt_opt(r.d),
                    fmt_opt(r.lambda),
                    fmt_opt(r.mu),
                    fmt_real(r.distortion)
                );
            }
            s
        }
    };
    emit(a.out.as_deref(), stdout, &body)
}

/// Whether the state-independent non-orthogonal machine exists at `dim`,
/// and that its isometry can be built when it does.
pub fn universal_machine_available(dim: usize) -> bool {
    si_params(MachineKind::NonOrthogonal, dim).is_ok_and(|m| build_isometry(&m).is_ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting() {
        assert_eq!(fmt_real(0.0), "0");
        assert_eq!(fmt_real(-1.0), "-1");
        assert_eq!(fmt_real(0.1), "0.1");
        assert_eq!(fmt_real(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_real(-5.5e-17), "-5.5e-17");
        assert_eq!(fmt_real(0.7071067811865476), "0.707106781187");
        assert_eq!(fmt_real(123456.0), "123456");
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:0.5:0.25").unwrap(), vec![0.0, 0.25, 0.5]);
        assert_eq!(parse_range("0.3").unwrap(), vec![0.3]);
        assert_eq!(parse_range("0:1:0.1").unwrap().len(), 11);
        for bad in ["0.5:0:0.1", "0:1:0", "0:1", "a:b:c"] {
            assert!(matches!(parse_range(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn z_tokens() {
        assert_eq!(parse_z("0.25").unwrap(), 0.25);
        assert!((parse_z("pi/8").unwrap() - PI / 8.0).abs() < 1e-15);
        assert!((parse_z("3pi/8").unwrap() - 3.0 * PI / 8.0).abs() < 1e-15);
        assert!((parse_z("3*pi/8").unwrap() - 3.0 * PI / 8.0).abs() < 1e-15);
        assert!((parse_z("PI/2").unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(parse_z("tau").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(usage("x").exit_code(), 2);
        assert_eq!(CliError::Verification("x".into()).exit_code(), 1);
        assert_eq!(CliError::Io { path: "p".into(), source: io::Error::other("x") }.exit_code(), 3);
        assert_eq!(CliError::Core(clonecast::Error::InvalidMachine("x".into())).exit_code(), 2);
    }

    #[test]
    fn universal_qubit_machine_only_below_four() {
        assert!(universal_machine_available(2));
        assert!(!universal_machine_available(4));
    }
}
