use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jacmod::report::{run, AnalysisReport, RunConfig};
use jacmod::theory::NodalMetadata;
use jacmod::{AnalysisError, FieldConfig, Strategy};

/// Hilbert vectors of Jacobian modules of reduced plane curves.
#[derive(Parser)]
#[command(name = "jacmod", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a curve and check every applicable formula against the oracle.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        /// Print the report as JSON.
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// Print the Hilbert vector of N(f) as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Print `k,n,source` rows of the Hilbert vector of N(f).
    PlotData {
        #[command(flatten)]
        input: InputArgs,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Homogeneous polynomial in x, y, z, e.g. "x^3 + y^3 + z^3".
    #[arg(allow_hyphen_values = true)]
    polynomial: Option<String>,
    /// Degree, for formula-only runs without a polynomial.
    #[arg(long)]
    degree: Option<usize>,
    /// gfp, gfp:PRIME or rational.
    #[arg(long, default_value = "gfp")]
    field: String,
    /// Seed for the random primes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Degrees above this skip the oracle unless --force-oracle is given.
    #[arg(long, default_value_t = 40)]
    max_degree_cap: usize,
    /// Evaluate formulas only (needs --exponents).
    #[arg(long, conflicts_with = "force_oracle")]
    skip_oracle: bool,
    /// Run the oracle above --max-degree-cap.
    #[arg(long)]
    force_oracle: bool,
    /// Syzygy exponents, comma separated; checked against the oracle or used for formulas.
    #[arg(long, value_delimiter = ',')]
    exponents: Option<Vec<usize>>,
    /// Global Tjurina number; checked against the oracle.
    #[arg(long)]
    tau: Option<usize>,
    /// Assert the curve is nodal (requires --nodes).
    #[arg(long, requires = "nodes")]
    nodal: bool,
    /// Number of nodes.
    #[arg(long, requires = "nodal")]
    nodes: Option<usize>,
    /// Number of irreducible components.
    #[arg(long, default_value_t = 1, requires = "nodal")]
    components: usize,
    /// Assert all components are rational.
    #[arg(long, requires = "nodal")]
    rational: bool,
    /// Run eliminations on one thread.
    #[arg(long)]
    sequential: bool,
}

impl InputArgs {
    fn config(&self) -> Result<RunConfig, AnalysisError> {
        let field = FieldConfig::parse(&self.field, self.seed).map_err(AnalysisError::Usage)?;
        let nodal = self.nodal.then(|| NodalMetadata {
            nodes: self.nodes.unwrap_or(0),
            components: self.components,
            rational_components: self.rational,
        });
        Ok(RunConfig {
            field,
            max_degree_cap: self.max_degree_cap,
            skip_oracle: self.skip_oracle,
            force_oracle: self.force_oracle,
            exponents: self.exponents.clone(),
            tau: self.tau,
            nodal,
            strategy: if self.sequential {
                Strategy::Sequential
            } else {
                Strategy::default()
            },
        })
    }

    fn run(&self) -> Result<AnalysisReport, AnalysisError> {
        run(self.polynomial.as_deref(), self.degree, &self.config()?)
    }
}

fn fail(e: AnalysisError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_input_error() { 2 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze { input, json, csv } => match input.run() {
            Ok(report) => {
                if json {
                    println!("{}", report.to_json());
                } else if csv {
                    print!("{}", report.to_csv());
                } else {
                    print!("{}", report.to_table());
                }
                for f in report.analysis.failures() {
                    eprintln!("check failed: {}: {}", f.name, f.detail);
                }
                ExitCode::from(report.exit_code() as u8)
            }
            Err(e) => fail(e),
        },
        Command::PlotData { input } => match input.run() {
            Ok(report) => {
                print!("{}", report.to_csv());
                ExitCode::from(report.exit_code() as u8)
            }
            Err(e) => fail(e),
        },
    }
}
