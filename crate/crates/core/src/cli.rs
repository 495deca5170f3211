//! Command-line front end: config parsing, the four subcommands, and the
//! CSV interchange format for sweeps.
//!
//! Exit codes are a stable contract: 0 ok, 1 usage or parse error,
//! 2 validation failure, 3 verification found the menu infeasible.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::error::Error;
use crate::model::{CostModel, ModelSpec, PrivacyInterval, RiskModel, TypePair, UtilityModel};
use crate::oracle;
use crate::risk_analysis::{self, SweepTable};
use crate::screening::{self, Contract, ContractMenu, Regime, SolveOptions, SolveReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

/// Command failure carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed arguments, config, grid, or menu file (exit 1).
    Usage(String),
    /// The model spec violates an invariant or the command's preconditions
    /// (exit 2).
    Validation(String),
    /// Verification completed and the menu is infeasible (exit 3).
    Infeasible,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Infeasible => EXIT_INFEASIBLE,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Validation(m) => m.clone(),
            CliError::Infeasible => "menu is infeasible".to_string(),
        }
    }
}

// -------------------------------------------------------------------------
// Config schema. Unknown keys are errors everywhere.

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    types: TypesSection,
    interval: IntervalSection,
    utility: UtilitySection,
    cost: CostSection,
    risk: RiskSection,
    #[serde(default)]
    run: RunSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypesSection {
    theta_low: f64,
    theta_high: f64,
    prior_high: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalSection {
    x_min: f64,
    x_max: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UtilitySection {
    kind: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostSection {
    kind: String,
    zeta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RiskSection {
    kind: String,
    m: Option<f64>,
    loss_low: Option<f64>,
    loss_high: Option<f64>,
}

/// Tolerance overrides and sweep defaults; every field optional.
#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub tol: Option<f64>,
    pub feas_tol: Option<f64>,
    /// Grid spec `p_min,p_max,n`.
    pub grid: Option<String>,
    pub out: Option<String>,
    pub oracle_steps: Option<usize>,
    pub jobs: Option<usize>,
}

/// A parsed config: the model plus run options.
#[derive(Debug)]
pub struct RunConfig {
    pub spec: ModelSpec,
    pub run: RunSection,
}

impl RunConfig {
    pub fn solve_options(&self) -> SolveOptions {
        let mut opts = SolveOptions::default();
        if let Some(tol) = self.run.tol {
            opts.tol = tol;
        }
        if let Some(feas_tol) = self.run.feas_tol {
            opts.feas_tol = feas_tol;
        }
        opts
    }
}

/// Loads and parses a config file. Parse-level problems (unreadable file,
/// bad TOML, unknown keys, unknown kinds, missing parameters) are usage
/// errors; semantic invariant violations surface later through `validate`.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let file: ConfigFile = toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;

    let utility = match file.utility.kind.as_str() {
        "linear_in_type" => UtilityModel::LinearInType,
        other => {
            return Err(CliError::Usage(format!(
                "[utility] kind: unknown value {other:?} (expected \"linear_in_type\")"
            )))
        }
    };
    let cost = match file.cost.kind.as_str() {
        "quadratic" => {
            let zeta = file.cost.zeta.ok_or_else(|| {
                CliError::Usage("[cost] zeta is required for kind = \"quadratic\"".to_string())
            })?;
            CostModel::Quadratic { zeta }
        }
        other => {
            return Err(CliError::Usage(format!(
                "[cost] kind: unknown value {other:?} (expected \"quadratic\")"
            )))
        }
    };
    let risk = match file.risk.kind.as_str() {
        "none" => RiskModel::None,
        "linear_breach" => {
            let missing =
                || CliError::Usage("[risk] linear_breach requires m, loss_low, loss_high".to_string());
            RiskModel::LinearBreach {
                m: file.risk.m.ok_or_else(missing)?,
                loss_low: file.risk.loss_low.ok_or_else(missing)?,
                loss_high: file.risk.loss_high.ok_or_else(missing)?,
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "[risk] kind: unknown value {other:?} (expected \"none\" or \"linear_breach\")"
            )))
        }
    };

    let spec = ModelSpec {
        types: TypePair {
            theta_low: file.types.theta_low,
            theta_high: file.types.theta_high,
            prior_high: file.types.prior_high,
        },
        interval: PrivacyInterval { x_min: file.interval.x_min, x_max: file.interval.x_max },
        utility,
        cost,
        risk,
    };
    Ok(RunConfig { spec, run: file.run })
}

fn validated(spec: &ModelSpec) -> Result<(), CliError> {
    let report = spec.validate();
    if report.is_valid() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("model spec invalid: {}", report.summary())))
    }
}

fn solver_error(e: Error) -> CliError {
    match e {
        Error::InvalidSpec(_) | Error::BadPrior(_) | Error::RiskInactive => {
            CliError::Validation(e.to_string())
        }
        Error::BadGrid(_) | Error::Argument(_) | Error::OutOfDomain { .. } => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Validation(other.to_string()),
    }
}

// -------------------------------------------------------------------------
// Number and CSV formatting.

/// Formats with `sig` significant digits in plain positional notation.
pub fn fmt_sig(v: f64, sig: usize) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return format!("{:.*}", sig, 0.0);
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - exp).clamp(0, 17) as usize;
    let s = format!("{:.*}", decimals, v);
    // Rounding a negative value this close to zero would print "-0.000...".
    if s.starts_with('-') && s.trim_start_matches(['-', '0', '.']).is_empty() {
        s[1..].to_string()
    } else {
        s
    }
}

/// Exact header of the sweep CSV.
pub const SWEEP_CSV_HEADER: &str =
    "p,regime,risk,x_L,x_H,t_L,t_H,rent,profit,welfare,boundary_L,boundary_H";

/// Serializes a sweep to CSV with 12 significant digits per number. Output
/// depends only on the table contents, so identical configs produce
/// byte-identical files.
pub fn sweep_to_csv(table: &SweepTable) -> String {
    let mut out = String::with_capacity(64 * (table.rows.len() + 1));
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in &table.rows {
        let r = &row.report;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt_sig(row.p, 12),
            row.regime.label(),
            if row.risk_on { "on" } else { "off" },
            fmt_sig(r.menu.low.x, 12),
            fmt_sig(r.menu.high.x, 12),
            fmt_sig(r.menu.low.t, 12),
            fmt_sig(r.menu.high.t, 12),
            fmt_sig(r.information_rent, 12),
            fmt_sig(r.profit, 12),
            fmt_sig(r.welfare, 12),
            r.boundary_low.label(),
            r.boundary_high.label(),
        ));
    }
    out
}

/// Parses a `p_min,p_max,n` grid spec into an inclusive linspace.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "grid must be p_min,p_max,n — got {spec:?}"
        )));
    }
    let p_min: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("grid p_min: cannot parse {:?}", parts[0])))?;
    let p_max: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("grid p_max: cannot parse {:?}", parts[1])))?;
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("grid n: cannot parse {:?}", parts[2])))?;
    if n < 2 {
        return Err(CliError::Usage(format!("grid n must be at least 2, got {n}")));
    }
    if !(p_min < p_max) {
        return Err(CliError::Usage(format!(
            "grid requires p_min < p_max, got {p_min} >= {p_max}"
        )));
    }
    let h = (p_max - p_min) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { p_max } else { p_min + h * i as f64 })
        .collect())
}

// -------------------------------------------------------------------------
// Subcommands.

#[derive(Debug, Parser)]
#[command(
    name = "privacy-contracts",
    about = "Two-type privacy screening contracts: solve, sweep, verify, compare",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve first-best and second-best menus for a config.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sweep the prior over a grid and emit a CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Grid spec `p_min,p_max,n`; overrides [run].grid.
        #[arg(long)]
        grid: Option<String>,
        /// Output CSV path; overrides [run].out. Stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the sweep.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check an explicit menu (file with x_L, t_L, x_H, t_H) against the
    /// four constraints.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Menu file: four numbers, comma or whitespace separated.
        menu: PathBuf,
    },
    /// Compare the with-risk and no-risk optima and test the ordering
    /// results.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Also certify both second-best solves against the brute-force
        /// oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        oracle_steps: Option<usize>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = write!(out, "{e}");
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(out, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn with_jobs<R>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R
where
    R: Send,
{
    match jobs {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .unwrap_or_else(|_| unreachable!("thread pool construction cannot fail for n > 0")),
        _ => f(),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { config } => cmd_solve(&config, out),
        Command::Sweep { config, grid, out: out_path, jobs } => {
            cmd_sweep(&config, grid.as_deref(), out_path.as_deref(), jobs, out)
        }
        Command::Verify { config, menu } => cmd_verify(&config, &menu, out),
        Command::Compare { config, oracle, oracle_steps, jobs } => {
            cmd_compare(&config, oracle, oracle_steps, jobs, out)
        }
    }
}

fn print_report(out: &mut dyn Write, title: &str, r: &SolveReport) {
    let _ = writeln!(out, "== {title} ==");
    let _ = writeln!(
        out,
        "  low:  x = {} ({}), t = {}",
        fmt_sig(r.menu.low.x, 12),
        r.boundary_low.label(),
        fmt_sig(r.menu.low.t, 12)
    );
    let _ = writeln!(
        out,
        "  high: x = {} ({}), t = {}",
        fmt_sig(r.menu.high.x, 12),
        r.boundary_high.label(),
        fmt_sig(r.menu.high.t, 12)
    );
    let _ = writeln!(
        out,
        "  rent = {}, profit = {}, welfare = {}",
        fmt_sig(r.information_rent, 12),
        fmt_sig(r.profit, 12),
        fmt_sig(r.welfare, 12)
    );
    let res = &r.residuals;
    let _ = writeln!(
        out,
        "  residuals: ic_high = {:+.3e}, ic_low = {:+.3e}, ir_low = {:+.3e}, ir_high = {:+.3e}",
        res.ic_high, res.ic_low, res.ir_low, res.ir_high
    );
}

fn cmd_solve(config_path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(config_path)?;
    validated(&cfg.spec)?;
    let opts = cfg.solve_options();

    let specs: Vec<(String, ModelSpec)> = if cfg.spec.risk.is_active() {
        vec![
            ("risk off".to_string(), cfg.spec.without_risk()),
            ("risk on".to_string(), cfg.spec.clone()),
        ]
    } else {
        vec![("risk off".to_string(), cfg.spec.clone())]
    };

    for (label, spec) in &specs {
        let fb = screening::solve_first_best_with(spec, &opts).map_err(solver_error)?;
        print_report(out, &format!("first-best ({label})"), &fb);
        let sb = screening::solve_second_best_with(spec, &opts).map_err(solver_error)?;
        print_report(out, &format!("second-best ({label})"), &sb);
    }
    Ok(())
}

fn cmd_sweep(
    config_path: &Path,
    grid_flag: Option<&str>,
    out_flag: Option<&Path>,
    jobs: Option<usize>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = load_config(config_path)?;
    validated(&cfg.spec)?;
    let opts = cfg.solve_options();

    let grid_spec = grid_flag
        .map(str::to_string)
        .or_else(|| cfg.run.grid.clone())
        .ok_or_else(|| CliError::Usage("no grid: pass --grid or set [run].grid".to_string()))?;
    let grid = parse_grid(&grid_spec)?;

    let jobs = jobs.or(cfg.run.jobs);
    let table = with_jobs(jobs, || risk_analysis::sweep_p_with(&cfg.spec, &grid, &opts))
        .map_err(solver_error)?;
    let csv = sweep_to_csv(&table);

    let out_path = out_flag
        .map(Path::to_path_buf)
        .or_else(|| cfg.run.out.as_ref().map(PathBuf::from));
    match out_path {
        Some(path) => {
            std::fs::write(&path, &csv)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            // Run metadata lives beside the data so the CSV stays
            // byte-reproducible.
            let sidecar = path.with_extension("meta");
            let meta = format!(
                "tool = \"privacy-contracts {}\"\nconfig = {:?}\ngrid = \"{grid_spec}\"\nrows = {}\n",
                env!("CARGO_PKG_VERSION"),
                config_path.display().to_string(),
                table.rows.len()
            );
            let _ = std::fs::write(sidecar, meta);
            let _ = writeln!(out, "wrote {} rows to {}", table.rows.len(), path.display());
        }
        None => {
            let _ = out.write_all(csv.as_bytes());
        }
    }
    Ok(())
}

fn parse_menu_file(path: &Path) -> Result<(f64, f64, f64, f64), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read menu {}: {e}", path.display())))?;
    let nums: Vec<f64> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split([',', ' ', '\t']))
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("menu file: cannot parse {s:?} as a number")))
        })
        .collect::<Result<_, _>>()?;
    if nums.len() != 4 {
        return Err(CliError::Usage(format!(
            "menu file must contain exactly four numbers x_L, t_L, x_H, t_H — found {}",
            nums.len()
        )));
    }
    Ok((nums[0], nums[1], nums[2], nums[3]))
}

fn cmd_verify(config_path: &Path, menu_path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(config_path)?;
    validated(&cfg.spec)?;
    let opts = cfg.solve_options();
    let (x_l, t_l, x_h, t_h) = parse_menu_file(menu_path)?;
    for x in [x_l, x_h] {
        if !cfg.spec.interval.contains(x) {
            return Err(CliError::Usage(format!(
                "menu allocation x = {x} lies outside the privacy interval [{}, {}]",
                cfg.spec.interval.x_min, cfg.spec.interval.x_max
            )));
        }
    }
    let menu = ContractMenu {
        low: Contract { x: x_l, t: t_l },
        high: Contract { x: x_h, t: t_h },
        regime: Regime::SecondBest,
        risk_active: cfg.spec.risk.is_active(),
    };
    let res = screening::verify_menu(&cfg.spec, &menu).map_err(solver_error)?;
    let _ = writeln!(out, "ic_high = {}", fmt_sig(res.ic_high, 12));
    let _ = writeln!(out, "ic_low  = {}", fmt_sig(res.ic_low, 12));
    let _ = writeln!(out, "ir_low  = {}", fmt_sig(res.ir_low, 12));
    let _ = writeln!(out, "ir_high = {}", fmt_sig(res.ir_high, 12));
    if res.feasible(opts.feas_tol) {
        let _ = writeln!(out, "verdict: feasible");
        Ok(())
    } else {
        let _ = writeln!(out, "verdict: infeasible");
        Err(CliError::Infeasible)
    }
}

fn cmd_compare(
    config_path: &Path,
    oracle_flag: bool,
    oracle_steps: Option<usize>,
    jobs: Option<usize>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = load_config(config_path)?;
    validated(&cfg.spec)?;
    if !cfg.spec.risk.is_active() {
        return Err(CliError::Validation(
            "compare requires an active risk model in the config".to_string(),
        ));
    }
    let opts = cfg.solve_options();
    let jobs = jobs.or(cfg.run.jobs);

    let report =
        with_jobs(jobs, || risk_analysis::compare_with(&cfg.spec, &opts)).map_err(solver_error)?;

    let th = &report.thresholds;
    let _ = writeln!(out, "== thresholds ==");
    match th.p_bar {
        Some(p_bar) => {
            let _ = writeln!(out, "  p_bar   = {}", fmt_sig(p_bar, 12));
        }
        None => {
            let _ = writeln!(out, "  p_bar   = (absent: l(theta_H) = 0)");
        }
    }
    let _ = writeln!(out, "  p_hat*  = {}", fmt_sig(th.p_star_norisk, 12));
    let _ = writeln!(out, "  p*      = {}", fmt_sig(th.p_star_risk, 12));

    print_report(out, "second-best (risk off)", &report.no_risk);
    print_report(out, "second-best (risk on)", &report.with_risk);

    let _ = writeln!(out, "== orderings ==");
    for c in &report.orderings {
        match c.verdict {
            risk_analysis::Verdict::Skipped => {
                let _ = writeln!(out, "  {:<14} SKIPPED  {}", c.name, c.inequality);
            }
            v => {
                let _ = writeln!(
                    out,
                    "  {:<14} {:<16} {}  [lhs = {}, rhs = {}, slack = {:+.3e}]",
                    c.name,
                    v.label(),
                    c.inequality,
                    fmt_sig(c.lhs, 12),
                    fmt_sig(c.rhs, 12),
                    c.slack
                );
            }
        }
    }

    if oracle_flag {
        let steps = oracle_steps.or(cfg.run.oracle_steps).unwrap_or(oracle::DEFAULT_X_STEPS);
        let _ = writeln!(out, "== oracle certification ({steps} steps) ==");
        for (label, spec, solved) in [
            ("risk off", cfg.spec.without_risk(), &report.no_risk),
            ("risk on", cfg.spec.clone(), &report.with_risk),
        ] {
            let result = with_jobs(jobs, || oracle::solve_p1_bruteforce(&spec, steps))
                .map_err(solver_error)?;
            let diff = (solved.profit - result.profit).abs();
            let _ = writeln!(
                out,
                "  {label}: |solver - oracle| = {:.3e}, certified gap = {:.3e} ({})",
                diff,
                result.certified_gap_bound,
                if diff <= result.certified_gap_bound + 1e-9 { "ok" } else { "EXCEEDED" }
            );
        }
    }
    Ok(())
}
