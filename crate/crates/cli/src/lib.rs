//! Driver behind the `epsample` binary.
//!
//! Every subcommand prints one JSON report (`schema`, the validated
//! `config`, a `metrics` block and, unless `--no-timing`, a `timing`
//! block). `bench` writes one record per grid cell as CSV and, with
//! `--out`, as JSON. Exit codes: 2 configuration, 3 data, 4 broken
//! invariant.

pub mod args;
pub mod bench;
pub mod commands;
pub mod config;
pub mod report;

pub use args::{Cli, Command};
pub use config::RunConfig;
pub use report::{Failure, Report};

pub fn run(cli: Cli) -> Result<(), Failure> {
    let name = cli.command.name();
    match cli.command {
        Command::Cutting(a) => commands::cutting(RunConfig::from_args(name, &a)?),
        Command::Partition(a) => commands::partition(RunConfig::from_args(name, &a)?),
        Command::Sample(a) => commands::sample(RunConfig::from_args(name, &a)?),
        Command::Evaluate(a) => commands::evaluate(RunConfig::from_args(name, &a)?),
        Command::Anomaly(a) => commands::anomaly(RunConfig::from_args(name, &a)?),
        Command::Bench(a) => bench::bench(a),
        Command::Render(a) => commands::render(RunConfig::from_args(name, &a.common)?, a.what),
    }
}
