use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use limsup_cli::{
    emit_plot_data, envelope::write_atomic, output_path, run, CliError, CliResult, Command, Flags, PlotKind,
};

#[derive(Parser)]
#[command(name = "limsup", version, about = "Seeded experiments on limsup sets, ubiquity and geodesic excursions")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Run the command named in a config file
    Run(Flags),
    /// Convergence of a series `Σ r^u f(ψ(r))`
    Classify(Flags),
    /// Critical exponent of `Σ r^u ψ(r)^s`
    CriticalExponent(Flags),
    /// Stage measures and partial sums
    StageScan(Flags),
    /// Ubiquity ratios over balls
    Ubiquity(Flags),
    /// Counting experiment against the asymptotic 2 Σ qψ(q)
    Schmidt(Flags),
    /// Continued fraction expansions and quotient statistics
    Cf(Flags),
    /// Cusp excursions of a geodesic
    Excursions(Flags),
    /// Logarithm-law statistic of a geodesic
    Loglaw(Flags),
    /// Horoball listings and counts
    Horoballs(Flags),
    /// Pairwise disjointness of Ford circles
    Disjointness(Flags),
}

impl Sub {
    fn split(self) -> (Option<Command>, Flags) {
        match self {
            Sub::Run(f) => (None, f),
            Sub::Classify(f) => (Some(Command::Classify), f),
            Sub::CriticalExponent(f) => (Some(Command::CriticalExponent), f),
            Sub::StageScan(f) => (Some(Command::StageScan), f),
            Sub::Ubiquity(f) => (Some(Command::Ubiquity), f),
            Sub::Schmidt(f) => (Some(Command::Schmidt), f),
            Sub::Cf(f) => (Some(Command::Cf), f),
            Sub::Excursions(f) => (Some(Command::Excursions), f),
            Sub::Loglaw(f) => (Some(Command::Loglaw), f),
            Sub::Horoballs(f) => (Some(Command::Horoballs), f),
            Sub::Disjointness(f) => (Some(Command::Disjointness), f),
        }
    }
}

fn execute(command: Option<Command>, flags: Flags) -> CliResult<()> {
    let config = flags.resolve(command)?;
    let plot_kind = match &flags.plot {
        Some(_) => Some(
            PlotKind::for_command(config.command)
                .ok_or_else(|| CliError::Usage(format!("`{}` has no plot data", config.command)))?,
        ),
        None => None,
    };
    if let Some(n) = flags.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let envelope = run(&config)?;
    let format = config.output.format;
    match output_path(&config) {
        Some(path) => {
            write_atomic(&path, |w| envelope.write(format, w))?;
            println!("{}", envelope.payload.line);
        }
        None => {
            let mut out = std::io::stdout().lock();
            envelope.write(format, &mut out)?;
            out.flush()?;
            eprintln!("{}", envelope.payload.line);
        }
    }
    if let (Some(path), Some(kind)) = (&flags.plot, plot_kind) {
        let mut buf = Vec::new();
        emit_plot_data(&envelope, kind, &mut buf)?;
        write_atomic(path, |w| w.write_all(&buf))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, flags) = cli.command.split();
    match execute(command, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
