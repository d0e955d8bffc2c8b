//! Command-line front end for multibeam synthesis: reads a TOML run config,
//! plans and verifies the design, and exports plans, reports, patterns, cuts
//! and sweep tables.

pub mod analysis;
pub mod config;
pub mod error;
pub mod export;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use multibeam::pattern::DirectivityOracle;
use multibeam::synthesis::{plan, verify, DesignMode, SynthesisPlan, VerifyOptions};

use crate::config::{Overrides, RunConfig, Settings};
pub use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "multibeam",
    version,
    about = "Closed-form multibeam synthesis for planar arrays"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: GlobalOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Resolve the design and write plan.toml
    Plan,
    /// Plan, then compare oracle and predicted directivities (report.toml)
    Verify,
    /// Export the full-grid pattern (pattern.csv)
    Pattern,
    /// Export φ = const cuts (cut_phi<φ>.csv)
    Cut,
    /// Verify across array lengths (sweep_length.csv)
    SweepLength,
    /// Verify across quantization depths (sweep_quant.csv)
    SweepQuant,
    /// Cross-term power error per beam set (error_table.csv)
    ErrorTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOptions {
    /// Run config (TOML)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Largest accepted |oracle − predicted| in dB
    #[arg(long, global = true, value_name = "FLOAT")]
    pub tolerance_db: Option<f64>,
    /// Angular grid step for both θ and φ
    #[arg(long, global = true, value_name = "FLOAT")]
    pub grid_step_deg: Option<f64>,
    /// Reject scan-limit and beam-layout violations
    #[arg(long, global = true, conflicts_with = "permissive")]
    pub strict: bool,
    /// Downgrade scan-limit and beam-layout violations to warnings
    #[arg(long, global = true)]
    pub permissive: bool,
    /// Evaluate patterns through the FFT path
    #[arg(long, global = true, value_enum, value_name = "on|off")]
    pub fast_path: Option<Switch>,
    /// Cut azimuth (repeatable); defaults to the beam azimuths
    #[arg(
        long = "phi-deg",
        global = true,
        value_name = "FLOAT",
        allow_negative_numbers = true
    )]
    pub phi_deg: Vec<f64>,
}

impl GlobalOptions {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            tolerance_db: self.tolerance_db,
            grid_step_deg: self.grid_step_deg,
            mode: if self.strict {
                Some(DesignMode::Strict)
            } else if self.permissive {
                Some(DesignMode::Permissive)
            } else {
                None
            },
            fast_path: self.fast_path.map(|s| s == Switch::On),
            phi_deg: self.phi_deg.clone(),
        }
    }
}

/// Runs one command, writing its files and printing a short summary.
pub fn run(cli: &Cli) -> Result<()> {
    let path = cli
        .options
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let config = RunConfig::load(path)?;
    let settings = config.settings(&cli.options.overrides())?;
    match cli.command {
        Command::Plan => cmd_plan(&config, &settings),
        Command::Verify => cmd_verify(&settings),
        Command::Pattern => cmd_pattern(&settings),
        Command::Cut => cmd_cut(&settings),
        Command::SweepLength => cmd_sweep_length(&settings),
        Command::SweepQuant => cmd_sweep_quant(&settings),
        Command::ErrorTable => cmd_error_table(&settings),
    }
}

fn resolved_plan(settings: &Settings) -> Result<SynthesisPlan> {
    let p = plan(&settings.spec)?;
    for w in &p.warnings {
        eprintln!("warning: {w}");
    }
    Ok(p)
}

fn cmd_plan(config: &RunConfig, settings: &Settings) -> Result<()> {
    let p = resolved_plan(settings)?;
    export::ensure_dir(&settings.out_dir)?;
    let file = settings.out_dir.join("plan.toml");
    let doc = export::plan_document(&p, config, settings.spec.mode);
    export::write_text(&file, &doc.to_toml()?)?;
    println!(
        "array {}x{} at d = {} wavelengths (L = {:.4})",
        p.geometry.n_x(),
        p.geometry.n_y(),
        p.geometry.spacing(),
        p.aperture.length_wavelengths
    );
    for (i, e) in p.entries.iter().enumerate() {
        println!(
            "beam {i}: ({}, {}) deg  a = {:.6}  D = {:.3} dBi",
            e.direction.theta_deg(),
            e.direction.phi_deg(),
            e.coefficient,
            e.directivity_dbi()
        );
    }
    println!("wrote {}", file.display());
    Ok(())
}

fn cmd_verify(settings: &Settings) -> Result<()> {
    let p = resolved_plan(settings)?;
    let options = VerifyOptions {
        path: settings.path,
        ..VerifyOptions::default()
    };
    let report = verify(&p, &settings.grid, options)?;
    export::ensure_dir(&settings.out_dir)?;
    let file = settings.out_dir.join("report.toml");
    export::write_text(
        &file,
        &export::report_document(&p, &report, &settings.grid, settings.tolerance_db)?,
    )?;
    print!("{}", export::report_table(&report));
    println!("wrote {}", file.display());
    if report.within_tolerance(settings.tolerance_db) {
        Ok(())
    } else {
        Err(CliError::Tolerance {
            max_delta_db: report.max_abs_delta_db(),
            tolerance_db: settings.tolerance_db,
        })
    }
}

fn cmd_pattern(settings: &Settings) -> Result<()> {
    let p = resolved_plan(settings)?;
    let oracle = DirectivityOracle::new(p.excitation(), &settings.grid, settings.path)?;
    export::ensure_dir(&settings.out_dir)?;
    let file = settings.out_dir.join("pattern.csv");
    export::write_pattern(&file, &oracle)?;
    println!("wrote {}", file.display());
    Ok(())
}

fn cmd_cut(settings: &Settings) -> Result<()> {
    let p = resolved_plan(settings)?;
    let oracle = DirectivityOracle::new(p.excitation(), &settings.grid, settings.path)?;
    let phis = if settings.cut_phis_deg.is_empty() {
        analysis::beam_azimuths(&p)
    } else {
        settings.cut_phis_deg.clone()
    };
    export::ensure_dir(&settings.out_dir)?;
    for phi in phis {
        let points = analysis::cut(&oracle, phi, settings.cut_step_deg)?;
        let file = export::cut_file_name(&settings.out_dir, phi);
        export::write_cut(&file, &points)?;
        println!("wrote {}", file.display());
    }
    Ok(())
}

fn cmd_sweep_length(settings: &Settings) -> Result<()> {
    let cases = analysis::length_sweep(
        &settings.spec,
        &settings.sweep_lengths,
        &settings.grid,
        settings.path,
    )?;
    export::ensure_dir(&settings.out_dir)?;
    let file = settings.out_dir.join("sweep_length.csv");
    export::write_length_sweep(&file, &cases)?;
    for c in &cases {
        println!(
            "L = {:>6.3}  N = {:>3}  max |delta| = {:.3} dB",
            c.length_wavelengths,
            c.n,
            c.report.max_abs_delta_db()
        );
    }
    println!("wrote {}", file.display());
    Ok(())
}

fn cmd_sweep_quant(settings: &Settings) -> Result<()> {
    let cases = analysis::quant_sweep(
        &settings.spec,
        &settings.sweep_bits,
        &settings.grid,
        settings.path,
    )?;
    export::ensure_dir(&settings.out_dir)?;
    let file = settings.out_dir.join("sweep_quant.csv");
    export::write_quant_sweep(&file, &cases)?;
    for c in &cases {
        println!(
            "bits = {:>10}  max |delta| = {:.3} dB",
            export::depth_label(c.depth),
            c.report.max_abs_delta_db()
        );
    }
    println!("wrote {}", file.display());
    Ok(())
}

fn cmd_error_table(settings: &Settings) -> Result<()> {
    let geometry = analysis::design_geometry(&settings.spec)?;
    let cases = if settings.error_cases.is_empty() {
        analysis::default_error_cases(&settings.spec)?
    } else {
        settings.error_cases.clone()
    };
    let rows = analysis::error_table(&geometry, &cases, &settings.grid, settings.path)?;
    export::ensure_dir(&settings.out_dir)?;
    let file = settings.out_dir.join("error_table.csv");
    export::write_error_table(&file, &rows)?;
    for r in &rows {
        println!("{:<24} relative error = {:.3e}", r.label, r.relative_error);
    }
    println!("wrote {}", file.display());
    Ok(())
}
