//! Command-line interface.
//!
//! Exit codes: 0 when no test rejects (or a non-test command succeeds), 1
//! when a test rejects, 2 on any input or usage error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use powgof_core::alternatives::Family;
use powgof_core::efficiency::{efficiency, efficiency_table, lao_check, EfficiencyReport, TableRow};
use powgof_core::model::NullFamily;
use powgof_core::rng::branch;
use powgof_core::simulation::check_critical_request;
use powgof_core::stats::{integral_null_mean, integral_normal_p_value, PValueMethod};
use powgof_core::{AsymptoticConstants, Statistic};
use serde::Serialize;

use crate::io::read_sample;
use crate::report::{exact, fixed, opt, to_json, Format, Table};
use crate::simulation::{critical_values, null_distribution, power_study, CriticalValueTable};

/// Seed used when neither `--seed` nor the environment variable is set.
pub const DEFAULT_SEED: u64 = 12345;
/// Environment variable supplying the default seed.
pub const SEED_ENV: &str = "POWGOF_SEED";
/// Smallest `n` at which the integral test defaults to the normal approximation.
pub const NORMAL_MIN_N: usize = 100;

#[derive(Parser, Debug)]
#[command(
    name = "powgof",
    version,
    about = "Goodness-of-fit tests for the power-function distribution based on the min-ratio characterization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Test whether a sample on (0, 1) follows a power-function law x^λ
    Test(TestArgs),
    /// Tabulate Monte Carlo critical values of the null distribution
    Critvals(CritvalsArgs),
    /// Local Bahadur efficiency against an alternative family
    Efficiency(EfficiencyArgs),
    /// Monte Carlo power against an alternative family
    Power(PowerArgs),
    /// Recompute both efficiency tables and the asymptotic constants
    Tables(TablesArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StatChoice {
    I,
    D,
    Both,
}

impl StatChoice {
    pub fn statistics(self) -> Vec<Statistic> {
        match self {
            StatChoice::I => vec![Statistic::Integral],
            StatChoice::D => vec![Statistic::Kolmogorov],
            StatChoice::Both => Statistic::ALL.to_vec(),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PvalueChoice {
    /// Monte Carlo null distribution at the sample size
    Mc,
    /// Normal limit of √n·I with variance 5/108 (integral statistic only)
    Normal,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sidedness {
    /// Reject for large values
    Greater,
    /// Reject for large |I - E I| (integral statistic only)
    TwoSided,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SimOptions {
    /// Monte Carlo replications
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    /// Base seed of all random streams
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads (default: all cores); results do not depend on it
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct TestArgs {
    /// Data file, one observation per line or single-column CSV; `-` reads stdin
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = StatChoice::Both)]
    pub statistic: StatChoice,
    /// Significance level
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    /// p-value method for I [default: mc below n = 100, normal otherwise]; D always uses mc
    #[arg(long, value_enum)]
    pub pvalue: Option<PvalueChoice>,
    /// Rejection region for I; D always rejects for large values
    #[arg(long, value_enum, default_value_t = Sidedness::Greater)]
    pub alternative: Sidedness,
    #[command(flatten)]
    pub sim: SimOptions,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct CritvalsArgs {
    #[arg(long, value_enum, default_value_t = StatChoice::Both)]
    pub statistic: StatChoice,
    /// Sample size
    #[arg(long)]
    pub n: usize,
    /// Upper-tail levels, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.01])]
    pub levels: Vec<f64>,
    #[command(flatten)]
    pub sim: SimOptions,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct EfficiencyArgs {
    /// Alternative: g1:r=<r>, g2, g3, lao-i[:c1=..,c2=..], lao-d[:c3=..,c4=..]
    pub family: String,
    #[arg(long, value_enum, default_value_t = StatChoice::Both)]
    pub statistic: StatChoice,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct PowerArgs {
    /// Alternative family, as for `efficiency`
    #[arg(long)]
    pub family: String,
    /// Alternative parameter values, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub theta: Vec<f64>,
    /// Sample size
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = StatChoice::Both)]
    pub statistic: StatChoice,
    /// Significance level
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    #[command(flatten)]
    pub sim: SimOptions,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct TablesArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

/// How a command finished without error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Accepted,
    Rejected,
}

/// Parses the process arguments, runs the command and maps the result to an
/// exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    match run(cli, &mut out) {
        Ok(Outcome::Accepted) => ExitCode::SUCCESS,
        Ok(Outcome::Rejected) => ExitCode::from(1),
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Outcome> {
    match cli.command {
        Command::Test(a) => cmd_test(&a, out),
        Command::Critvals(a) => cmd_critvals(&a, out).map(|_| Outcome::Accepted),
        Command::Efficiency(a) => cmd_efficiency(&a, out).map(|_| Outcome::Accepted),
        Command::Power(a) => cmd_power(&a, out).map(|_| Outcome::Accepted),
        Command::Tables(a) => cmd_tables(&a, out).map(|_| Outcome::Accepted),
    }
}

fn parse_family(spec: &str) -> Result<Family> {
    Family::from_str(spec).with_context(|| format!("family `{spec}`"))
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        bail!("level {level} must lie in (0, 1)");
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct TestConfig<'a> {
    file: String,
    n: usize,
    statistic: StatChoice,
    level: f64,
    pvalue_integral: PvalueChoice,
    alternative: Sidedness,
    #[serde(flatten)]
    sim: &'a SimOptions,
}

#[derive(Debug, Serialize)]
struct TestRow {
    statistic: &'static str,
    raw_value: f64,
    scaled_value: f64,
    n: usize,
    alternative: Sidedness,
    p_value: f64,
    p_value_method: &'static str,
    rejected: bool,
}

fn cmd_test(a: &TestArgs, out: &mut dyn Write) -> Result<Outcome> {
    check_level(a.level)?;
    let sample = read_sample(&a.file)?;
    let n = sample.len();
    let stats = a.statistic.statistics();
    if a.pvalue == Some(PvalueChoice::Normal) && a.statistic == StatChoice::D {
        bail!("the Kolmogorov statistic has no normal approximation; use --pvalue mc");
    }
    let pvalue_i = a.pvalue.unwrap_or(if n < NORMAL_MIN_N {
        PvalueChoice::Mc
    } else {
        PvalueChoice::Normal
    });
    let two_sided = a.alternative == Sidedness::TwoSided;
    let mut rows = Vec::new();
    for stat in stats {
        let outcome = stat.outcome(&sample)?;
        let use_mc = stat == Statistic::Kolmogorov || pvalue_i == PvalueChoice::Mc;
        let (p, method) = if use_mc {
            check_critical_request(&[a.level], a.sim.reps)?;
            let null = null_distribution(
                stat,
                NullFamily::new(1.0)?,
                n,
                a.sim.reps,
                a.sim.seed,
                branch::NULL,
                a.sim.threads,
            )?;
            let p = if stat == Statistic::Integral && two_sided {
                null.two_sided_p_value(outcome.raw_value, integral_null_mean(n))
            } else {
                null.upper_p_value(outcome.raw_value)
            };
            (p, PValueMethod::MonteCarlo)
        } else {
            (
                integral_normal_p_value(&outcome, two_sided),
                PValueMethod::NormalApprox,
            )
        };
        let outcome = outcome.with_p_value(p, method, a.level);
        rows.push(TestRow {
            statistic: stat.symbol(),
            raw_value: outcome.raw_value,
            scaled_value: outcome.scaled_value,
            n,
            alternative: if stat == Statistic::Integral {
                a.alternative
            } else {
                Sidedness::Greater
            },
            p_value: p,
            p_value_method: method.as_str(),
            rejected: outcome.rejected == Some(true),
        });
    }
    let config = TestConfig {
        file: a.file.display().to_string(),
        n,
        statistic: a.statistic,
        level: a.level,
        pvalue_integral: pvalue_i,
        alternative: a.alternative,
        sim: &a.sim,
    };
    let mut t = Table::new([
        "statistic",
        "value",
        "sqrt(n)*value",
        "p-value",
        "method",
        "decision",
    ]);
    for r in &rows {
        t.push(vec![
            r.statistic.into(),
            fixed(r.raw_value, 6),
            fixed(r.scaled_value, 6),
            fixed(r.p_value, 4),
            r.p_value_method.into(),
            if r.rejected { "reject" } else { "accept" }.into(),
        ]);
    }
    let meta = meta_sim(&a.sim, &[("file", config.file.clone()), ("n", n.to_string())]);
    match a.format {
        Format::Json => out.write_all(to_json("test", &config, &rows).as_bytes())?,
        Format::Csv => out.write_all(t.to_csv(&meta).as_bytes())?,
        Format::Table => {
            let t = t.titled(format!("sample {} (n = {n}), level {}", config.file, a.level));
            out.write_all(t.render().as_bytes())?;
            writeln!(out, "seed {}, reps {}", a.sim.seed, a.sim.reps)?;
        }
    }
    Ok(if rows.iter().any(|r| r.rejected) {
        Outcome::Rejected
    } else {
        Outcome::Accepted
    })
}

fn meta_sim(sim: &SimOptions, extra: &[(&'static str, String)]) -> Vec<(&'static str, String)> {
    let mut m = vec![
        ("tool", format!("powgof {}", crate::report::TOOL_VERSION)),
        ("seed", sim.seed.to_string()),
        ("reps", sim.reps.to_string()),
    ];
    m.extend_from_slice(extra);
    m
}

#[derive(Debug, Serialize)]
struct CritvalsConfig<'a> {
    statistic: StatChoice,
    n: usize,
    levels: &'a [f64],
    #[serde(flatten)]
    sim: &'a SimOptions,
}

fn cmd_critvals(a: &CritvalsArgs, out: &mut dyn Write) -> Result<()> {
    let tables = a
        .statistic
        .statistics()
        .into_iter()
        .map(|s| critical_values(s, a.n, &a.levels, a.sim.reps, a.sim.seed, a.sim.threads))
        .collect::<powgof_core::Result<Vec<CriticalValueTable>>>()?;
    let config = CritvalsConfig {
        statistic: a.statistic,
        n: a.n,
        levels: &a.levels,
        sim: &a.sim,
    };
    let mut t = Table::new(["statistic", "level", "critical value", "sqrt(n)*value", "std error"]);
    for tab in &tables {
        for i in 0..tab.levels.len() {
            t.push(vec![
                tab.statistic.into(),
                exact(tab.levels[i]),
                fixed(tab.quantiles[i], 6),
                fixed(tab.scaled_quantiles[i], 6),
                fixed(tab.standard_errors[i], 6),
            ]);
        }
    }
    match a.format {
        Format::Json => out.write_all(to_json("critvals", &config, &tables).as_bytes())?,
        Format::Csv => {
            let meta = meta_sim(&a.sim, &[("n", a.n.to_string())]);
            out.write_all(t.to_csv(&meta).as_bytes())?
        }
        Format::Table => {
            let title = format!(
                "Monte Carlo critical values, n = {}, reps = {}, seed = {}",
                a.n, a.sim.reps, a.sim.seed
            );
            out.write_all(t.titled(title).render().as_bytes())?
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct EfficiencyRow {
    statistic: &'static str,
    family: String,
    b_coeff: f64,
    slope_coeff: f64,
    kl_coeff: f64,
    efficiency: f64,
    argmax_t: Option<f64>,
    locally_optimal: bool,
}

impl EfficiencyRow {
    fn new(r: &EfficiencyReport, locally_optimal: bool) -> Self {
        EfficiencyRow {
            statistic: r.statistic.symbol(),
            family: r.family.clone(),
            b_coeff: r.b_coeff,
            slope_coeff: r.slope_coeff,
            kl_coeff: r.kl_coeff,
            efficiency: r.efficiency,
            argmax_t: r.argmax_t,
            locally_optimal,
        }
    }
}

#[derive(Debug, Serialize)]
struct EfficiencyConfig<'a> {
    family: &'a str,
    statistic: StatChoice,
}

fn cmd_efficiency(a: &EfficiencyArgs, out: &mut dyn Write) -> Result<()> {
    let family = parse_family(&a.family)?;
    let mut rows = Vec::new();
    for stat in a.statistic.statistics() {
        let report = efficiency(stat, &family)?;
        let lao = lao_check(stat, &family)?;
        rows.push(EfficiencyRow::new(&report, lao.is_lao));
    }
    let config = EfficiencyConfig {
        family: &a.family,
        statistic: a.statistic,
    };
    let mut t = Table::new([
        "statistic",
        "family",
        "b",
        "slope",
        "KL",
        "efficiency",
        "argmax t",
        "optimal",
    ]);
    for r in &rows {
        t.push(vec![
            r.statistic.into(),
            r.family.clone(),
            fixed(r.b_coeff, 6),
            fixed(r.slope_coeff, 6),
            fixed(r.kl_coeff, 6),
            fixed(r.efficiency, 4),
            opt(r.argmax_t, 4),
            if r.locally_optimal { "yes" } else { "no" }.into(),
        ]);
    }
    render_simple(out, a.format, "efficiency", &config, &rows, t)
}

fn render_simple<C: Serialize, R: Serialize>(
    out: &mut dyn Write,
    format: Format,
    command: &str,
    config: &C,
    result: &R,
    table: Table,
) -> Result<()> {
    let meta = [("tool", format!("powgof {}", crate::report::TOOL_VERSION))];
    match format {
        Format::Json => out.write_all(to_json(command, config, result).as_bytes())?,
        Format::Csv => out.write_all(table.to_csv(&meta).as_bytes())?,
        Format::Table => out.write_all(table.render().as_bytes())?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct PowerConfig<'a> {
    family: &'a str,
    theta: &'a [f64],
    n: usize,
    statistic: StatChoice,
    level: f64,
    #[serde(flatten)]
    sim: &'a SimOptions,
}

fn cmd_power(a: &PowerArgs, out: &mut dyn Write) -> Result<()> {
    check_level(a.level)?;
    let family = parse_family(&a.family)?;
    let mut results = Vec::new();
    for stat in a.statistic.statistics() {
        for &theta in &a.theta {
            results.push(power_study(
                stat,
                &family,
                theta,
                a.n,
                a.level,
                a.sim.reps,
                a.sim.seed,
                a.sim.threads,
            )?);
        }
    }
    let config = PowerConfig {
        family: &a.family,
        theta: &a.theta,
        n: a.n,
        statistic: a.statistic,
        level: a.level,
        sim: &a.sim,
    };
    let mut t = Table::new([
        "statistic",
        "family",
        "theta",
        "critical value",
        "power",
        "99% CI low",
        "99% CI high",
    ]);
    for r in &results {
        t.push(vec![
            r.statistic.into(),
            r.family.clone(),
            exact(r.theta),
            fixed(r.critical_value, 6),
            fixed(r.rate, 4),
            fixed(r.ci_low, 4),
            fixed(r.ci_high, 4),
        ]);
    }
    match a.format {
        Format::Json => out.write_all(to_json("power", &config, &results).as_bytes())?,
        Format::Csv => {
            let meta = meta_sim(&a.sim, &[("n", a.n.to_string()), ("level", exact(a.level))]);
            out.write_all(t.to_csv(&meta).as_bytes())?
        }
        Format::Table => {
            let title = format!(
                "Monte Carlo power, n = {}, level = {}, reps = {}, seed = {}",
                a.n, a.level, a.sim.reps, a.sim.seed
            );
            out.write_all(t.titled(title).render().as_bytes())?
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct Constant {
    name: &'static str,
    exact: &'static str,
    value: f64,
}

#[derive(Debug, Serialize)]
struct TableEntry {
    family: &'static str,
    b_coeff: f64,
    slope_coeff: f64,
    kl_coeff: f64,
    efficiency: f64,
    argmax_t: Option<f64>,
    r_star: Option<f64>,
}

#[derive(Debug, Serialize)]
struct TablesResult {
    integral: Vec<TableEntry>,
    kolmogorov: Vec<TableEntry>,
    constants: Vec<Constant>,
}

fn constants() -> Vec<Constant> {
    let (t_star, d2) = powgof_core::kernel::xi_variance_argmax();
    vec![
        Constant {
            name: "projection variance of the integral kernel",
            exact: "5/972",
            value: AsymptoticConstants::delta2_i(),
        },
        Constant {
            name: "limit variance of sqrt(n)*I",
            exact: "5/108",
            value: AsymptoticConstants::var_limit_i(),
        },
        Constant {
            name: "tail rate coefficient of I",
            exact: "54/5",
            value: AsymptoticConstants::rate_coeff_i(),
        },
        Constant {
            name: "maximizing threshold t*",
            exact: "(1+sqrt(7))/6",
            value: t_star,
        },
        Constant {
            name: "projection variance at t*",
            exact: "t*(1+t*-2t*^2)/12",
            value: d2,
        },
        Constant {
            name: "tail rate coefficient of D",
            exact: "1/(8*delta^2(t*))",
            value: AsymptoticConstants::rate_coeff_d(),
        },
    ]
}

fn entries(rows: &[TableRow]) -> Vec<TableEntry> {
    rows.iter()
        .map(|r| TableEntry {
            family: r.label,
            b_coeff: r.report.b_coeff,
            slope_coeff: r.report.slope_coeff,
            kl_coeff: r.report.kl_coeff,
            efficiency: r.report.efficiency,
            argmax_t: r.report.argmax_t,
            r_star: r.r_star,
        })
        .collect()
}

fn entry_table(title: &str, rows: &[TableEntry]) -> Table {
    let mut t = Table::new(["family", "r*", "b", "slope", "KL", "efficiency", "argmax t"])
        .titled(title);
    for r in rows {
        t.push(vec![
            r.family.into(),
            opt(r.r_star, 4),
            fixed(r.b_coeff, 6),
            fixed(r.slope_coeff, 6),
            fixed(r.kl_coeff, 6),
            fixed(r.efficiency, 4),
            opt(r.argmax_t, 4),
        ]);
    }
    t
}

fn cmd_tables(a: &TablesArgs, out: &mut dyn Write) -> Result<()> {
    let result = TablesResult {
        integral: entries(&efficiency_table(Statistic::Integral)?),
        kolmogorov: entries(&efficiency_table(Statistic::Kolmogorov)?),
        constants: constants(),
    };
    let t1 = entry_table("Local Bahadur efficiency of I", &result.integral);
    let t2 = entry_table("Local Bahadur efficiency of D", &result.kolmogorov);
    let mut tc = Table::new(["constant", "exact", "value"]).titled("Constants");
    for c in &result.constants {
        tc.push(vec![c.name.into(), c.exact.into(), fixed(c.value, 7)]);
    }
    match a.format {
        Format::Json => {
            out.write_all(to_json("tables", &serde_json::json!({}), &result).as_bytes())?
        }
        Format::Csv => {
            let mut all = Table::new(["statistic", "family", "r*", "b", "slope", "KL", "efficiency"]);
            for (sym, rows) in [("I", &result.integral), ("D", &result.kolmogorov)] {
                for r in rows {
                    all.push(vec![
                        sym.into(),
                        r.family.into(),
                        r.r_star.map(exact).unwrap_or_default(),
                        exact(r.b_coeff),
                        exact(r.slope_coeff),
                        exact(r.kl_coeff),
                        exact(r.efficiency),
                    ]);
                }
            }
            let meta = [("tool", format!("powgof {}", crate::report::TOOL_VERSION))];
            out.write_all(all.to_csv(&meta).as_bytes())?;
        }
        Format::Table => {
            out.write_all(t1.render().as_bytes())?;
            out.write_all(b"\n")?;
            out.write_all(t2.render().as_bytes())?;
            out.write_all(b"\n")?;
            out.write_all(tc.render().as_bytes())?;
        }
    }
    Ok(())
}
