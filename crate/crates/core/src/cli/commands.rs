//! Subcommands of the `tree-harmonic` binary.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
//! configuration and I/O errors.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};

use super::config::{extract_tolerance_flags, RunConfig};
use super::formats::{
    decomposition_from_json, kernel_from_csv, kernel_to_csv, read_text, spectral_from_csv, spectral_to_csv,
    symbol_from_csv, tree_function_from_json, tree_function_to_json, write_text,
};
use super::report::{fmt_f64, sha256_hex, ReportSet};
use super::suite;
use crate::context::Context;
use crate::exec::Exec;
use crate::psdo::{kernel_from_symbol, symbol_from_decomposition, NuclearDecomposition};
use crate::transform::{fh_forward, fh_inverse};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tree-harmonic",
    version,
    about = "Fourier-Helgason transform and pseudo-differential operators on homogeneous trees",
    after_help = "Tolerances: --tol.<check> <value> overrides the tolerance of one check."
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// key=value configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Tree degree: every vertex has q+1 neighbours.
    #[arg(long, global = true)]
    q: Option<usize>,
    /// Ball radius.
    #[arg(long = "R", global = true)]
    radius: Option<usize>,
    /// Cylinder depth (default: R).
    #[arg(long = "D", global = true)]
    depth: Option<usize>,
    /// Number of spectral nodes.
    #[arg(long = "M", global = true)]
    nodes: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for reports and generated files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run every loop on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Print nothing on success; failures still go to stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the ball, cylinders and spectral grid and write them as CSV.
    Build,
    /// Fourier-Helgason transform of a tree function (JSON) to a spectral CSV.
    Transform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Inverse transform of a spectral CSV to a tree function (JSON).
    Invert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Plancherel mass, c-function, inversion and Plancherel identity checks.
    Plancherel,
    /// Kernel of a decomposition (JSON) or grid symbol (CSV), written as CSV.
    Kernel {
        /// Nuclear decomposition file.
        #[arg(long, conflicts_with = "symbol")]
        input: Option<PathBuf>,
        /// Grid symbol file.
        #[arg(long)]
        symbol: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Hilbert-Schmidt norm via the symbol against the kernel's Frobenius norm.
    HsCheck(DecompositionInput),
    /// Symbol, kernel and nuclear traces.
    TraceCheck(DecompositionInput),
    /// Both adjoint formulas against the conjugate-transposed kernel.
    AdjointCheck(DecompositionInput),
    /// Product symbol against the product of kernels.
    ProductCheck {
        #[arg(long, requires = "sigma")]
        eta: Option<PathBuf>,
        #[arg(long, requires = "eta")]
        sigma: Option<PathBuf>,
    },
    /// Schatten norms and the power identity for kernels.
    Schatten {
        /// Kernel CSV; seeded random kernels when absent.
        #[arg(long)]
        kernel: Option<PathBuf>,
        /// Exponents r of the reported Schatten norms.
        #[arg(long, value_delimiter = ',', default_values_t = [2.0 / 3.0, 1.0, 2.0])]
        r: Vec<f64>,
    },
    /// Layer-cake, weak-type and kernel bound checks.
    LpReport {
        /// Kernel CSV; the seeded weak-type kernel when absent.
        #[arg(long)]
        kernel: Option<PathBuf>,
    },
    /// Every check.
    Suite,
}

#[derive(Debug, Args)]
struct DecompositionInput {
    /// Nuclear decomposition file; the seeded family when absent.
    #[arg(long)]
    input: Option<PathBuf>,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run(args: Vec<String>) -> i32 {
    let (args, tols) = match extract_tolerance_flags(args) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cfg = match configure(&cli.global, &tols) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let exec = if cli.global.sequential { Exec::Sequential } else { Exec::Parallel };
    match dispatch(&cfg, exec, &cli.command) {
        Ok(reports) => finish(&cfg, &reports, cli.global.quiet),
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn configure(g: &GlobalArgs, tols: &[(String, String)]) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &g.config {
        cfg.apply_file(path)?;
    }
    if let Some(v) = g.q {
        cfg.q = v;
    }
    if let Some(v) = g.radius {
        cfg.radius = v;
    }
    if let Some(v) = g.depth {
        cfg.depth = Some(v);
    }
    if let Some(v) = g.nodes {
        cfg.nodes = v;
    }
    if let Some(v) = g.seed {
        cfg.seed = v;
    }
    if let Some(v) = &g.out {
        cfg.out = v.clone();
    }
    for (name, value) in tols {
        cfg.set(&format!("tol.{name}"), value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Writes reports (if any), prints one line per check and maps the outcome to an exit code.
fn finish(cfg: &RunConfig, reports: &ReportSet, quiet: bool) -> i32 {
    if reports.reports.is_empty() {
        return EXIT_PASS;
    }
    if let Err(e) = reports.write(&cfg.out) {
        eprintln!("error: writing reports to {}: {e}", cfg.out.display());
        return EXIT_USAGE;
    }
    let mut stdout = std::io::stdout().lock();
    for r in reports.reports.iter().filter(|_| !quiet) {
        let _ = writeln!(
            stdout,
            "{} {} residual={} tolerance={}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            fmt_f64(r.residual),
            fmt_f64(r.tolerance)
        );
    }
    if reports.all_pass() {
        EXIT_PASS
    } else {
        for r in reports.failures() {
            eprintln!(
                "failed: {} residual={} tolerance={}{}",
                r.name,
                fmt_f64(r.residual),
                fmt_f64(r.tolerance),
                r.witness.as_deref().map(|w| format!(" at {w}")).unwrap_or_default()
            );
        }
        EXIT_CHECK_FAILED
    }
}

fn file_digest(path: &Path) -> anyhow::Result<String> {
    Ok(format!("input={}", sha256_hex(&read_text(path)?)))
}

fn decompositions(cfg: &RunConfig, ctx: &Context, input: &Option<PathBuf>) -> anyhow::Result<(Vec<NuclearDecomposition>, String)> {
    match input {
        Some(path) => Ok((vec![decomposition_from_json(ctx, &read_text(path)?)?], file_digest(path)?)),
        None => Ok((suite::decomposition_family(cfg, ctx.vertices()), String::new())),
    }
}

fn dispatch(cfg: &RunConfig, exec: Exec, command: &Command) -> anyhow::Result<ReportSet> {
    if let Command::Suite = command {
        return suite::run_suite(cfg, exec);
    }
    let ctx = suite::context(cfg, exec)?;
    let mut out = ReportSet::default();
    match command {
        Command::Suite => unreachable!(),
        Command::Build => build(cfg, &ctx)?,
        Command::Transform { input, output } => {
            let f = tree_function_from_json(&ctx, &read_text(input)?)?;
            write_text(output, &spectral_to_csv(&ctx, &fh_forward(&ctx, &f)?))?;
        }
        Command::Invert { input, output } => {
            let big_f = spectral_from_csv(&ctx, &read_text(input)?)?;
            write_text(output, &tree_function_to_json(&ctx, &fh_inverse(&ctx, &big_f)?))?;
        }
        Command::Plancherel => {
            out.push(suite::check_plancherel_mass(cfg, &ctx)?);
            out.push(suite::check_c_function(cfg)?);
            out.push(suite::check_round_trip(cfg, &ctx)?);
            out.push(suite::check_plancherel_identity(cfg, &ctx)?);
        }
        Command::Kernel { input, symbol, output } => {
            let output = output.clone().unwrap_or_else(|| cfg.out.join("kernel.csv"));
            if let Some(path) = symbol {
                let sigma = symbol_from_csv(&ctx, &read_text(path)?)?;
                out.push(suite::check_kernel_apply(cfg, &ctx, &sigma, &file_digest(path)?)?);
                write_text(&output, &kernel_to_csv(&ctx, &kernel_from_symbol(&ctx, &sigma)?))?;
            } else {
                let (decs, extra) = decompositions(cfg, &ctx, input)?;
                out.push(suite::check_nuclear_kernel(cfg, &ctx, &decs, &extra)?);
                let sigma = symbol_from_decomposition(&ctx, &decs[0])?;
                write_text(&output, &kernel_to_csv(&ctx, &kernel_from_symbol(&ctx, &sigma)?))?;
            }
        }
        Command::HsCheck(d) => {
            let (decs, extra) = decompositions(cfg, &ctx, &d.input)?;
            out.push(suite::check_hs_equality(cfg, &ctx, &decs, &extra)?);
        }
        Command::TraceCheck(d) => {
            let (decs, extra) = decompositions(cfg, &ctx, &d.input)?;
            out.push(suite::check_trace(cfg, &ctx, &decs, &extra)?);
        }
        Command::AdjointCheck(d) => {
            let (decs, extra) = decompositions(cfg, &ctx, &d.input)?;
            out.push(suite::check_adjoint(cfg, &ctx, &decs, &extra)?);
        }
        Command::ProductCheck { eta, sigma } => {
            let (pairs, extra) = match (eta, sigma) {
                (Some(e), Some(s)) => (
                    vec![(
                        decomposition_from_json(&ctx, &read_text(e)?).context("eta")?,
                        decomposition_from_json(&ctx, &read_text(s)?).context("sigma")?,
                    )],
                    format!("{}\n{}", file_digest(e)?, file_digest(s)?),
                ),
                _ => (suite::product_family(cfg, ctx.vertices()), String::new()),
            };
            out.push(suite::check_product(cfg, &ctx, &pairs, &extra)?);
        }
        Command::Schatten { kernel, r } => {
            let (kernels, extra) = match kernel {
                Some(path) => (vec![kernel_from_csv(&ctx, &read_text(path)?)?], file_digest(path)?),
                None => (suite::schatten_family(cfg, ctx.vertices()), String::new()),
            };
            let mut hs = suite::check_schatten_hs(cfg, &kernels, &extra)?;
            for &rv in r {
                let norms = kernels
                    .iter()
                    .map(|k| crate::psdo::schatten_norm(k, rv))
                    .collect::<crate::error::Result<Vec<_>>>()?;
                hs = hs.value(&format!("schatten_r{rv:.6}"), norms);
            }
            out.push(hs);
            out.push(suite::check_schatten_power(cfg, &kernels, &extra)?);
        }
        Command::LpReport { kernel } => {
            let (k, extra) = match kernel {
                Some(path) => (kernel_from_csv(&ctx, &read_text(path)?)?, file_digest(path)?),
                None => (suite::weak_kernel(cfg, &ctx)?, String::new()),
            };
            let n = ctx.vertices();
            let family = suite::weak_family(cfg, n);
            out.push(suite::check_layercake(cfg, &ctx)?);
            out.push(suite::check_strong_type(cfg, exec, &k, &family, &extra)?);
            let (lr, pointwise) = suite::check_lr_embedding(cfg, exec, &k, &family, &extra)?;
            out.push(lr);
            out.push(pointwise);
            out.push(suite::check_kernel_lq(cfg, exec, &k, &suite::lq_family(cfg, n), &extra)?);
            out.push(suite::check_kernel_lq_tight(cfg, exec, n)?);
        }
    }
    Ok(out)
}

fn build(cfg: &RunConfig, ctx: &Context) -> anyhow::Result<()> {
    let mut tree = String::from("vertex,parent,depth\n");
    for (v, vert) in ctx.ball().vertices().iter().enumerate() {
        let parent = vert.parent.map(|p| p.to_string()).unwrap_or_default();
        tree.push_str(&format!("{v},{parent},{}\n", vert.depth));
    }
    write_text(&cfg.out.join("tree.csv"), &tree)?;

    let mut heights = String::from("vertex,cylinder,height\n");
    for x in 0..ctx.vertices() {
        for (c, h) in ctx.heights().row(x).iter().enumerate() {
            heights.push_str(&format!("{x},{c},{h}\n"));
        }
    }
    write_text(&cfg.out.join("heights.csv"), &heights)?;

    let g = ctx.grid();
    let mut grid = String::from("m,s,base_weight,weight\n");
    for m in 0..g.len() {
        grid.push_str(&format!(
            "{m},{},{},{}\n",
            fmt_f64(g.nodes()[m]),
            fmt_f64(g.base_weights()[m]),
            fmt_f64(g.weights()[m])
        ));
    }
    write_text(&cfg.out.join("grid.csv"), &grid)?;
    println!(
        "q={} R={} D={} M={}: {} vertices, {} cylinders of weight {}, spectral mass {}",
        ctx.q(),
        ctx.ball().radius(),
        ctx.partition().depth(),
        ctx.nodes(),
        ctx.vertices(),
        ctx.cylinders(),
        ctx.partition().weight(),
        fmt_f64(g.total_mass())
    );
    Ok(())
}
