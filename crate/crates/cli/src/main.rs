//! Command-line front end: sphere sampling, distance matrices, figure data,
//! simulation models, diagram computation, clustering, and the self-test
//! suite.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 self-test failure.

mod commands;
mod manifest;
mod selftest;

use clap::{Parser, Subcommand};
use persphere::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "persphere", version, about = "Persistence spheres, partial transport, and baseline summaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the persistence sphere of a diagram onto a polar grid file.
    Sphere {
        /// Diagram CSV (birth,death[,weight] lines).
        #[arg(long)]
        diagram: PathBuf,
        /// Polar grid as LATxLON.
        #[arg(long, default_value = "100x200")]
        grid: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pairwise distance matrix over diagram files.
    Dist {
        /// pot1, sw, sphere-L2, sphere-sup, landscape-L2, image-L2.
        #[arg(long)]
        metric: String,
        #[arg(long, default_value = "100x200")]
        grid: String,
        /// flat, pers, pers2, pers4, pers8, arctan:SCALE. Reweights the
        /// measures for sphere metrics and sets the kernel weight for
        /// image-L2.
        #[arg(long, default_value = "flat")]
        weight: String,
        /// Number of sliced-Wasserstein directions.
        #[arg(long, default_value_t = 50)]
        n_dirs: usize,
        /// Persistence-image pixel size (defaults to extent / 100).
        #[arg(long)]
        pixel_size: Option<f64>,
        /// Gaussian bandwidth (defaults to 10 pixels).
        #[arg(long)]
        sigma: Option<f64>,
        /// Birth-degeneracy fix: adds a zero-lifetime anchor at this value.
        #[arg(long)]
        h0_fix: Option<f64>,
        /// Landscape time-grid resolution.
        #[arg(long, default_value_t = 1001)]
        t_samples: usize,
        #[arg(long)]
        out: PathBuf,
        /// Diagram files.
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Emit figure data (decay, deletion, pl-growth, pi-saturation).
    Figures {
        #[arg(long)]
        name: String,
        /// Kernel bandwidth for pi-saturation.
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate simulation data (fda-i..iv, csr, thomas, matern2, lattice,
    /// pp) plus a run manifest.
    Simulate {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Replicates per class or family (defaults: 50 FDA, 30 PP).
        #[arg(long)]
        replicates: Option<usize>,
        /// FDA noise scale.
        #[arg(long, default_value_t = 10.0)]
        noise: f64,
        /// Override the per-replicate sample count (FDA) or cloud size (PP).
        #[arg(long)]
        n: Option<usize>,
        /// Rips cap multiple recorded for PP runs.
        #[arg(long, default_value_t = 7.0)]
        cap: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Vietoris-Rips H0/H1 diagrams of point-cloud files.
    Rips {
        /// Cap multiple of the typical spacing sqrt(area / n).
        #[arg(long, default_value_t = 7.0)]
        cap: f64,
        /// Window side length; bounding box estimate when omitted.
        #[arg(long)]
        side: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        clouds: Vec<PathBuf>,
    },
    /// Sublevel-set H0 diagrams of sampled-curve files.
    Sublevel {
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        curves: Vec<PathBuf>,
    },
    /// Average-linkage clustering of a distance matrix.
    Cluster {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
        /// Optional reference labels; prints the Rand index when given.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pearson correlation between two distance matrices.
    Correlate { a: PathBuf, b: PathBuf },
    /// Run the built-in invariant suite.
    Selftest {
        /// Corrupt the transport cost by 1% to demonstrate failure surfacing.
        #[arg(long)]
        mutate: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful exits.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> persphere::Result<ExitCode> {
    match cli.command {
        Command::Sphere { diagram, grid, out } => {
            commands::cmd_sphere(&diagram, commands::parse_grid(&grid)?, &out)?;
        }
        Command::Dist {
            metric,
            grid,
            weight,
            n_dirs,
            pixel_size,
            sigma,
            h0_fix,
            t_samples,
            out,
            files,
        } => {
            let opts = commands::DistOptions {
                metric,
                grid: commands::parse_grid(&grid)?,
                weight: commands::parse_weight(&weight)?,
                n_dirs,
                pixel_size,
                sigma,
                h0_fix,
                t_samples,
            };
            commands::cmd_dist(&files, &opts, &out)?;
        }
        Command::Figures { name, sigma, out } => {
            commands::cmd_figures(&name, sigma, &out)?;
        }
        Command::Simulate {
            model,
            seed,
            replicates,
            noise,
            n,
            cap,
            out,
        } => {
            let opts = commands::SimulateOptions {
                model,
                seed,
                replicates,
                noise,
                n,
                cap,
            };
            commands::cmd_simulate(&opts, &out)?;
        }
        Command::Rips {
            cap,
            side,
            out,
            clouds,
        } => {
            commands::cmd_rips(&clouds, cap, side, &out)?;
        }
        Command::Sublevel { out, curves } => {
            commands::cmd_sublevel(&curves, &out)?;
        }
        Command::Cluster {
            matrix,
            k,
            labels,
            out,
        } => {
            commands::cmd_cluster(&matrix, k, labels.as_deref(), &out)?;
        }
        Command::Correlate { a, b } => {
            commands::cmd_correlate(&a, &b)?;
        }
        Command::Selftest { mutate } => {
            let reports = selftest::run(mutate);
            let mut failures = 0;
            for r in &reports {
                let status = if r.passed { "ok" } else { "FAIL" };
                if r.detail.is_empty() {
                    println!("{status:4} {}", r.name);
                } else {
                    println!("{status:4} {} ({})", r.name, r.detail);
                }
                if !r.passed {
                    failures += 1;
                }
            }
            println!("{} checks, {} failed", reports.len(), failures);
            if failures > 0 {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
