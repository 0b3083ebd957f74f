use clap::{Args, Parser, Subcommand};
use hdlab_cli::{emit_plots, exit, run, CliError, Command, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Experiments on higher-derivative and nonlocal oscillators.
#[derive(Parser)]
#[command(name = "hdlab", version)]
struct Cli {
    #[command(subcommand)]
    group: Group,
}

#[derive(Subcommand)]
enum Group {
    /// classical Pais-Uhlenbeck oscillator
    #[command(subcommand)]
    Pu(PuCmd),
    /// modes of the nonlocal oscillator
    #[command(subcommand)]
    Nonlocal(NonlocalCmd),
    /// special functions
    #[command(subcommand)]
    Sf(SfCmd),
    /// closed-form and Trotter kernels
    #[command(subcommand)]
    Propagator(PropagatorCmd),
    /// grid experiments
    #[command(subcommand)]
    Lab(LabCmd),
    /// run the command named inside a JSON config
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// write a gnuplot script for CSV artifacts
    EmitPlots {
        #[arg(required = true)]
        artifacts: Vec<PathBuf>,
        /// script path; stdout when absent
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Invocation {
    #[command(flatten)]
    config: ExperimentConfig,
    /// JSON file whose keys override the flags
    #[arg(long = "config", value_name = "FILE")]
    config_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PuCmd {
    Classical(Invocation),
    DecoupleCheck(Invocation),
    XGrowth(Invocation),
}

#[derive(Subcommand)]
enum NonlocalCmd {
    Modes(Invocation),
    Residues(Invocation),
    PfCheck(Invocation),
    Trajectory(Invocation),
    Spectrum(Invocation),
}

#[derive(Subcommand)]
enum SfCmd {
    DCheck(Invocation),
    Eigenfunction(Invocation),
}

#[derive(Subcommand)]
enum PropagatorCmd {
    Closed(Invocation),
    TrotterConverge(Invocation),
    SpectralIdentity(Invocation),
    EuclidPitfall(Invocation),
}

#[derive(Subcommand)]
enum LabCmd {
    Evolve(Invocation),
    Dilrot(Invocation),
    DivergenceScan(Invocation),
    Commutator(Invocation),
}

fn resolve(command: Command, inv: Invocation) -> Result<ExperimentConfig, CliError> {
    let mut config = inv.config;
    config.command = command;
    if let Some(file) = inv.config_file {
        config = config.overridden_by(&file)?;
        if config.command != command {
            return Err(CliError::Config(format!(
                "{} names command {:?} but {:?} was invoked",
                file.display(),
                config.command.name(),
                command.name()
            )));
        }
    }
    Ok(config)
}

fn dispatch(group: Group) -> Result<(), CliError> {
    use Command as C;
    let (command, inv) = match group {
        Group::Pu(PuCmd::Classical(i)) => (C::PuClassical, i),
        Group::Pu(PuCmd::DecoupleCheck(i)) => (C::PuDecoupleCheck, i),
        Group::Pu(PuCmd::XGrowth(i)) => (C::PuXGrowth, i),
        Group::Nonlocal(NonlocalCmd::Modes(i)) => (C::NonlocalModes, i),
        Group::Nonlocal(NonlocalCmd::Residues(i)) => (C::NonlocalResidues, i),
        Group::Nonlocal(NonlocalCmd::PfCheck(i)) => (C::NonlocalPfCheck, i),
        Group::Nonlocal(NonlocalCmd::Trajectory(i)) => (C::NonlocalTrajectory, i),
        Group::Nonlocal(NonlocalCmd::Spectrum(i)) => (C::NonlocalSpectrum, i),
        Group::Sf(SfCmd::DCheck(i)) => (C::SfDCheck, i),
        Group::Sf(SfCmd::Eigenfunction(i)) => (C::SfEigenfunction, i),
        Group::Propagator(PropagatorCmd::Closed(i)) => (C::PropagatorClosed, i),
        Group::Propagator(PropagatorCmd::TrotterConverge(i)) => (C::PropagatorTrotterConverge, i),
        Group::Propagator(PropagatorCmd::SpectralIdentity(i)) => (C::PropagatorSpectralIdentity, i),
        Group::Propagator(PropagatorCmd::EuclidPitfall(i)) => (C::PropagatorEuclidPitfall, i),
        Group::Lab(LabCmd::Evolve(i)) => (C::LabEvolve, i),
        Group::Lab(LabCmd::Dilrot(i)) => (C::LabDilrot, i),
        Group::Lab(LabCmd::DivergenceScan(i)) => (C::LabDivergenceScan, i),
        Group::Lab(LabCmd::Commutator(i)) => (C::LabCommutator, i),
        Group::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config.display())))?;
            return report(ExperimentConfig::from_json(&text)?);
        }
        Group::EmitPlots { artifacts, output } => {
            let script = emit_plots(&artifacts)?;
            match output {
                Some(p) => {
                    std::fs::write(&p, script)?;
                    println!("{}", p.display());
                }
                None => print!("{script}"),
            }
            return Ok(());
        }
    };
    report(resolve(command, inv)?)
}

fn report(config: ExperimentConfig) -> Result<(), CliError> {
    let out = run(&config)?;
    println!("{}: {}", config.command, out.summary);
    for p in &out.artifacts {
        println!("  {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match dispatch(cli.group) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hdlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
