use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(
    name = "aqctpc",
    version,
    about = "Asymmetric quantum concatenated and tensor product codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DepthArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
#[allow(clippy::upper_case_acronyms)]
enum TableArg {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
    #[value(name = "III")]
    III,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code from a spec file and print its parameters.
    Construct {
        #[arg(long)]
        spec: PathBuf,
        /// Write H_X, H_Z and G_CC to this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the published tables and compare with the printed values.
    Tables {
        /// One table; all three when absent.
        #[arg(long, value_enum)]
        table: Option<TableArg>,
        #[arg(long, value_enum, default_value = "quick")]
        depth: DepthArg,
    },
    /// Run the structural and exhaustive checks on a code.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the spec's depth.
        #[arg(long, value_enum)]
        depth: Option<DepthArg>,
    },
    /// Monte-Carlo decoding over the asymmetric channel.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        pz: f64,
        /// Ratio p_z / p_x.
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Overrides the spec's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Write `simulation.txt` and `simulation.timing` here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit asymptotic bound curves, one file per θ.
    Bounds {
        #[arg(long, num_args = 1.., default_values_t = [1.0, 10.0, 100.0])]
        theta: Vec<f64>,
        /// Step of the δ_z grid.
        #[arg(long, default_value_t = 0.001)]
        grid: f64,
        /// `n k d` inner codes; the bundled list when absent.
        #[arg(long)]
        constituents: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct { spec, out } => commands::construct(&spec, out.as_deref()),
        Command::Tables { table, depth } => commands::tables(table.map(Into::into), depth.into()),
        Command::Verify { spec, depth } => commands::verify(&spec, depth.map(Into::into)),
        Command::Simulate {
            spec,
            pz,
            theta,
            trials,
            seed,
            workers,
            out,
        } => commands::simulate(&commands::SimulateArgs {
            spec,
            p_z: pz,
            theta,
            trials,
            seed,
            workers,
            out,
        }),
        Command::Bounds {
            theta,
            grid,
            constituents,
            out,
        } => commands::bounds(&theta, grid, constituents.as_deref(), &out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

impl From<DepthArg> for aqctpc::spec::Depth {
    fn from(d: DepthArg) -> Self {
        match d {
            DepthArg::Quick => aqctpc::spec::Depth::Quick,
            DepthArg::Full => aqctpc::spec::Depth::Full,
        }
    }
}

impl From<TableArg> for aqctpc::tables::TableId {
    fn from(t: TableArg) -> Self {
        match t {
            TableArg::I => aqctpc::tables::TableId::I,
            TableArg::II => aqctpc::tables::TableId::II,
            TableArg::III => aqctpc::tables::TableId::III,
        }
    }
}
