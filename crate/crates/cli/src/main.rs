//! Command-line driver: family construction, set measurements, energies,
//! slope diagnostics, sweeps, exponent fits and report rendering.
//!
//! Exit codes: 0 success, 1 input error, 2 resource limit.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sumprod_core::budget::MemoryBudget;
use sumprod_core::construction;
use sumprod_core::energy::{energy, energy_bounds_report, EnergyKind};
use sumprod_core::error::Error;
use sumprod_core::fit::fit_exponent;
use sumprod_core::report::{emit_report, ReportFormat};
use sumprod_core::set::{binary_op, combine, BinaryOp, Combined, CombineOptions};
use sumprod_core::setfile;
use sumprod_core::slopes::{cluster_mu, SlopeDecomposition};
use sumprod_core::sweep::{parse_config, parse_csv, run_sweep};

#[derive(Parser)]
#[command(name = "sumprod", version, about = "Exact sumset/product-set workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureOp {
    Sum,
    Prod,
    Ratio,
    Diff,
    #[value(name = "aa+a")]
    AaPlusA,
    #[value(name = "ab+c")]
    AbPlusC,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Additive,
    Multiplicative,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Build the primorial construction at cardinality n and measure it.
    Construct {
        #[arg(long)]
        n: u64,
        /// Override the selection threshold.
        #[arg(long)]
        theta: Option<f64>,
        /// Working-memory budget in MiB.
        #[arg(long, default_value_t = 8192)]
        budget_mb: u64,
        /// Write the constructed set to this file.
        #[arg(long)]
        out_set: Option<PathBuf>,
    },
    /// Apply a set operation and print the result as a set file.
    Measure {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, value_enum)]
        op: MeasureOp,
        /// Second operand (defaults to --set).
        #[arg(long)]
        b: Option<PathBuf>,
        /// Third operand for ab+c (defaults to --set).
        #[arg(long)]
        c: Option<PathBuf>,
        #[arg(long, default_value_t = 8192)]
        budget_mb: u64,
    },
    /// Additive or multiplicative energy of a set.
    Energy {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, value_enum, default_value = "additive")]
        kind: KindArg,
        /// Also print the four Cauchy-Schwarz lower bounds.
        #[arg(long)]
        bounds: bool,
    },
    /// Slope decomposition of A x A: one "slope mass" line per slope.
    Slopes {
        #[arg(long)]
        set: PathBuf,
        /// Append the selected dyadic level as comments.
        #[arg(long)]
        dyadic: bool,
    },
    /// Cluster diagnostics at half-width M over the refined dyadic family.
    Cluster {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        m: usize,
        /// Emit machine-readable CSV rows instead of the text report.
        #[arg(long)]
        csv: bool,
    },
    /// Run a sweep configuration and write one CSV row per (family, n).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the worker count from the config.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Least-squares exponent fit of log y against log x.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Render a sweep CSV as csv, svg or text.
    Report {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, value_enum)]
        format: FormatArg,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Construct {
            n,
            theta,
            budget_mb,
            out_set,
        } => {
            let budget = MemoryBudget::new(budget_mb << 20);
            let report = construction::construction_report(n, theta, &budget)?;
            print!("{}", report.to_kv_text());
            if let Some(path) = out_set {
                setfile::write_set(&path, &report.set)?;
            }
        }
        Command::Measure {
            set,
            op,
            b,
            c,
            budget_mb,
        } => {
            let a = setfile::read_set(&set)?;
            let bset = b.map(|p| setfile::read_set(&p)).transpose()?;
            let cset = c.map(|p| setfile::read_set(&p)).transpose()?;
            let b = bset.as_ref().unwrap_or(&a);
            let opts = CombineOptions {
                budget: MemoryBudget::new(budget_mb << 20),
                count_only_fallback: true,
            };
            let (label, result) = match op {
                MeasureOp::Sum => ("sum", Combined::Set(binary_op(BinaryOp::Sum, &a, b)?)),
                MeasureOp::Diff => (
                    "diff",
                    Combined::Set(binary_op(BinaryOp::Difference, &a, b)?),
                ),
                MeasureOp::Prod => ("prod", Combined::Set(binary_op(BinaryOp::Product, &a, b)?)),
                MeasureOp::Ratio => ("ratio", Combined::Set(binary_op(BinaryOp::Ratio, &a, b)?)),
                MeasureOp::AaPlusA => ("aa+a", combine(&a, &a, &a, &opts)?),
                MeasureOp::AbPlusC => {
                    let c = cset.as_ref().unwrap_or(&a);
                    ("ab+c", combine(&a, b, c, &opts)?)
                }
            };
            println!("# op={label} cardinality={}", result.cardinality());
            if let Combined::Set(s) = result {
                print!("{}", setfile::format_set(&s));
            }
        }
        Command::Energy { set, kind, bounds } => {
            let a = setfile::read_set(&set)?;
            match kind {
                KindArg::Additive => {
                    println!("e_plus = {}", energy(EnergyKind::Additive, &a, &a)?)
                }
                KindArg::Multiplicative => {
                    println!("e_mult = {}", energy(EnergyKind::Multiplicative, &a, &a)?)
                }
            }
            if bounds {
                let r = energy_bounds_report(&a)?;
                println!("e_plus = {}", r.e_plus);
                println!("e_mult = {}", r.e_mult);
                println!("k_ratio = {}", r.k_ratio);
                println!("lb_sum = {} (|A+A| = {})", r.lb_sum, r.size_sum);
                println!("lb_diff = {} (|A-A| = {})", r.lb_diff, r.size_diff);
                println!("lb_prod = {} (|AA| = {})", r.lb_prod, r.size_prod);
                println!("lb_ratio = {} (|A/A| = {})", r.lb_ratio, r.size_ratio);
                println!("bounds_hold = {}", r.bounds_hold());
            }
        }
        Command::Slopes { set, dyadic } => {
            let a = setfile::read_set(&set)?;
            let decomp = SlopeDecomposition::new(&a)?;
            for line in decomp.entries() {
                println!("{} {}", line.slope, line.mass());
            }
            if dyadic {
                let level = decomp.dyadic_select()?;
                println!("# tau = {}", level.tau);
                println!("# mass = {}", level.mass);
                println!("# slopes = {}", level.member_count());
                println!(
                    "# mass_guarantee_met = {}",
                    level.meets_mass_guarantee(&decomp)
                );
            }
        }
        Command::Cluster { set, m, csv } => {
            let a = setfile::read_set(&set)?;
            let analysis = cluster_mu(&a, m)?;
            if csv {
                println!("index,slope_lo,slope_hi,mu_actual,main_term,collision_sum,holds");
                for c in &analysis.clusters {
                    println!(
                        "{},{},{},{},{},{},{}",
                        c.index,
                        c.slope_lo,
                        c.slope_hi,
                        c.mu_actual,
                        c.main_term,
                        c.collision_sum,
                        c.holds
                    );
                }
            } else {
                println!(
                    "tau = {}, t0 = {}, M = {}, slopes = {}, full clusters = {}",
                    analysis.tau,
                    analysis.t0,
                    analysis.m,
                    analysis.slopes.len(),
                    analysis.clusters.len()
                );
                for c in &analysis.clusters {
                    println!(
                        "cluster {}: slopes ({}, {}), mu = {}, main term = {}, collisions = {}, bound holds: {}",
                        c.index,
                        c.slope_lo,
                        c.slope_hi,
                        c.mu_actual,
                        c.main_term,
                        c.collision_sum,
                        c.holds
                    );
                }
            }
        }
        Command::Sweep {
            config,
            out,
            workers,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = parse_config(&text)?;
            if let Some(w) = workers {
                cfg.workers = w;
            }
            run_sweep(&cfg, &out)?;
            println!(
                "wrote {} ({} families x {} sizes)",
                out.display(),
                cfg.families.len(),
                cfg.sizes.len()
            );
        }
        Command::Fit { csv, x, y } => {
            let table = parse_csv(&std::fs::read_to_string(&csv)?)?;
            let points = table.numeric_pairs(&x, &y)?;
            let fit = fit_exponent(&points)?;
            println!(
                "slope = {:.6}\nintercept = {:.6}\nresidual = {:.6}\npoints = {}",
                fit.slope,
                fit.intercept,
                fit.residual,
                points.len()
            );
        }
        Command::Report { csv, format, out } => {
            let table = parse_csv(&std::fs::read_to_string(&csv)?)?;
            let format = match format {
                FormatArg::Csv => ReportFormat::Csv,
                FormatArg::Svg => ReportFormat::SvgScatter,
                FormatArg::Text => ReportFormat::Text,
            };
            let rendered = emit_report(&table, format)?;
            match out {
                Some(path) => std::fs::write(path, rendered)?,
                None => print!("{rendered}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ResourceLimit(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
