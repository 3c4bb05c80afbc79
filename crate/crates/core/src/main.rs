use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use vpsplit::runner::{self, parse_taus, Mode, RunConfig};
use vpsplit::{Error, Result};

/// Semi-Lagrangian Vlasov-Poisson solver with Hamiltonian splitting schemes.
///
/// Settings are read from an optional key=value file (keys are the long
/// flag names) and then overridden by flags given on the command line.
#[derive(Debug, Parser)]
#[command(name = "vpsplit", version)]
struct Cli {
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// spatial dimension, 1 or 2
    #[arg(long)]
    dim: Option<usize>,
    /// strang, 3jump, o6-23, o6-9, o6-11, o6-13, o6-11-d1 or lie
    #[arg(long)]
    scheme: Option<String>,
    /// points per spatial direction
    #[arg(long)]
    nx: Option<usize>,
    /// points per velocity direction
    #[arg(long)]
    nv: Option<usize>,
    /// wave number of the perturbation; the box length is 2 pi / k
    #[arg(long)]
    k: Option<f64>,
    /// velocity cut-off
    #[arg(long)]
    vmax: Option<f64>,
    /// perturbation amplitude in [0, 1)
    #[arg(long)]
    amplitude: Option<f64>,
    /// time step
    #[arg(long)]
    tau: Option<f64>,
    /// final time
    #[arg(long)]
    tfinal: Option<f64>,
    /// odd Lagrange interpolation order
    #[arg(long)]
    order: Option<usize>,
    /// run, sweep or verify
    #[arg(long)]
    mode: Option<String>,
    /// comma-separated time steps for a sweep
    #[arg(long)]
    taus: Option<String>,
    /// output file (standard output when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// binary dump of the final distribution (run mode)
    #[arg(long)]
    snapshot: Option<PathBuf>,
}

impl Cli {
    fn into_config(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$target = v; })*
            };
        }
        take!(dim => dim, scheme => scheme, nx => nx, nv => nv, k => k, vmax => v_max,
              amplitude => amplitude, tau => tau, tfinal => t_final, order => order);
        if let Some(m) = self.mode {
            cfg.mode = m.parse()?;
        }
        if let Some(t) = self.taus {
            cfg.taus = parse_taus(&t)?;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if self.snapshot.is_some() {
            cfg.snapshot = self.snapshot;
        }
        Ok(cfg)
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Returns the exit status of a completed command.
fn execute(cfg: &RunConfig) -> Result<u8> {
    let started = Instant::now();
    match cfg.mode {
        Mode::Run => {
            let out = runner::run(cfg)?;
            runner::write_run_csv(&out.records, sink(cfg.out.as_deref())?)?;
            if let Some(path) = &cfg.snapshot {
                runner::write_snapshot(&out.state, BufWriter::new(File::create(path)?))?;
            }
            let (eh, el) = out.errors()?;
            eprintln!(
                "{} steps, err_H = {eh:.3e}, err_L2 = {el:.3e}, wall {:.2}s",
                out.records.len() - 1,
                started.elapsed().as_secs_f64()
            );
            Ok(0)
        }
        Mode::Sweep => {
            let sweep = runner::convergence_sweep(cfg)?;
            runner::write_sweep_csv(&sweep, sink(cfg.out.as_deref())?)?;
            eprintln!(
                "{}: slope {:.3} over {} of {} points, wall {:.2}s",
                sweep.scheme,
                sweep.slope,
                sweep.rows.iter().filter(|r| r.fitted).count(),
                sweep.rows.len(),
                started.elapsed().as_secs_f64()
            );
            Ok(0)
        }
        Mode::Verify => {
            let report = runner::verify_schemes();
            runner::write_verify_report(&report, sink(cfg.out.as_deref())?)?;
            Ok(if report.passed() { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // malformed arguments are configuration errors
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = cli.into_config().and_then(|cfg| execute(&cfg));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Error::exit_code(&e) as u8)
        }
    }
}
