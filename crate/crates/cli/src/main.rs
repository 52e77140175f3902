//! `delta-lab` command-line front end.
//!
//! Exit status: 0 on success, 2 when the input is rejected, 1 for internal
//! failures. Errors are written to stderr as one JSON line.

use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use delta_lab_client::{ClientError, DeltaLabClient};
use delta_lab_core::api::{ApiError, ClassicalRequest};
use delta_lab_core::export::{
    classical_table, coef_table, density_table, field_table, report_table, sweep_table,
    ExportFormat,
};
use delta_lab_core::retardation::sweep_retardation;
use delta_lab_core::scattering::solve_coefficients;
use delta_lab_core::{analyze, load_scenario, Error, Scenario, SolveCache, SweepAxis};

#[derive(Parser)]
#[command(
    name = "delta-lab",
    version,
    about = "Scattering off finite sums of 1D delta potentials"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, default_value = "csv", value_parser = parse_format)]
    format: ExportFormat,
    /// Evaluate on a running service instead of locally (field, retard, classical).
    #[arg(long, global = true, env = "DELTA_LAB_REMOTE")]
    remote: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-k coefficients, R, T, |R|², |T|² and residuals.
    Coef {
        #[arg(long)]
        scenario: PathBuf,
        /// Wavenumbers to solve at; defaults to the scenario spectrum.
        #[arg(long = "k", allow_negative_numbers = true)]
        k: Vec<f64>,
    },
    /// Free and non-free densities on the scenario grid.
    Field {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario time.
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
    },
    /// Retardation report for a scenario.
    Retard {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Classical particle crossing a triangular barrier or well.
    Classical {
        #[arg(long = "m", default_value_t = 1.0)]
        mass: f64,
        #[arg(long)]
        v0: f64,
        #[arg(long = "F0", allow_negative_numbers = true)]
        f0: f64,
        #[arg(long)]
        w: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x0: f64,
    },
    /// Retardation reports along one parameter axis.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// coupling_scale, n_waves, dk or scatterer_spacing.
        #[arg(long)]
        axis: String,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        values: Vec<f64>,
    },
    /// Run the HTTP service.
    Serve {
        /// Listen address; falls back to DELTA_LAB_BIND, then 127.0.0.1:7878.
        #[arg(long)]
        bind: Option<String>,
        /// Scenario returned by /api/defaults.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Allowed CORS origin; any origin when omitted.
        #[arg(long)]
        cors_origin: Option<String>,
    },
}

fn parse_format(s: &str) -> Result<ExportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failure ready to be reported: exit status plus the JSON line.
struct Failure {
    status: u8,
    error: ApiError,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure {
            status: if err.is_validation() { 2 } else { 1 },
            error: ApiError::from(&err),
        }
    }
}

impl From<ClientError> for Failure {
    fn from(err: ClientError) -> Self {
        let status = if err.is_validation() { 2 } else { 1 };
        let error = match err {
            ClientError::Api { error, .. } => error,
            ClientError::Decode(e) => ApiError::from(&e),
            other => ApiError {
                error: "transport_error".into(),
                message: other.to_string(),
                pointer: None,
            },
        };
        Failure { status, error }
    }
}

fn internal(message: String) -> Failure {
    Failure {
        status: 1,
        error: ApiError {
            error: "internal_error".into(),
            message,
            pointer: None,
        },
    }
}

fn usage(message: String) -> Failure {
    Failure {
        status: 2,
        error: ApiError {
            error: "usage_error".into(),
            message,
            pointer: None,
        },
    }
}

fn json_line(value: &impl serde::Serialize) -> String {
    serde_json::to_string(value).expect("output serialises") + "\n"
}

async fn run(cli: Cli) -> Result<String, Failure> {
    let format = cli.format;
    let remote = cli.remote.map(DeltaLabClient::new);
    match cli.command {
        Command::Coef { scenario, k } => {
            local_only(&remote, "coef")?;
            let scenario = load_scenario(&scenario)?;
            let ks = if k.is_empty() {
                (0..scenario.spectrum.n_waves)
                    .map(|m| scenario.spectrum.wavenumber(m))
                    .collect()
            } else {
                k
            };
            let solutions = ks
                .iter()
                .map(|&k| solve_coefficients(&scenario.set, k))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(coef_table(&solutions).render(format))
        }
        Command::Field { scenario, t } => {
            let mut scenario = load_scenario(&scenario)?;
            if let Some(t) = t {
                scenario.t = t;
                scenario.validate()?;
            }
            let table = match &remote {
                Some(client) => {
                    let r = client.evaluate(&scenario).await?;
                    density_table(&r.grid_x, &r.free_density, &r.nonfree_density)?
                }
                None => field_table(&analyze(&scenario, None)?),
            };
            Ok(table.render(format))
        }
        Command::Retard { scenario } => {
            let scenario = load_scenario(&scenario)?;
            let report = match &remote {
                Some(client) => client.evaluate(&scenario).await?.report,
                None => analyze(&scenario, None)?.report,
            };
            Ok(match format {
                ExportFormat::Json => json_line(&report),
                ExportFormat::Csv => report_table(&report).to_csv(),
            })
        }
        Command::Classical {
            mass,
            v0,
            f0,
            w,
            x0,
        } => {
            let request = ClassicalRequest {
                mass,
                v0,
                f0,
                w,
                x0,
            };
            let result = match &remote {
                Some(client) => client.classical(&request).await?,
                None => request.evaluate()?,
            };
            Ok(match format {
                ExportFormat::Json => json_line(&result),
                ExportFormat::Csv => classical_table(&result).to_csv(),
            })
        }
        Command::Sweep {
            scenario,
            axis,
            values,
        } => {
            local_only(&remote, "sweep")?;
            let axis: SweepAxis = axis.parse()?;
            let scenario = load_scenario(&scenario)?;
            let cache = SolveCache::default();
            let points = sweep_retardation(&scenario, axis, &values, Some(&cache))?;
            Ok(sweep_table(axis, &points).render(format))
        }
        Command::Serve {
            bind,
            scenario,
            cors_origin,
        } => {
            let defaults = match scenario {
                Some(path) => load_scenario(&path)?,
                None => Scenario::example(),
            };
            let addr = delta_lab_server::resolve_bind(bind.as_deref()).map_err(usage)?;
            let cors = delta_lab_server::cors_layer(cors_origin.as_deref()).map_err(usage)?;
            let listener = tokio::net::TcpListener::bind(addr)
                .await
                .map_err(|e| internal(format!("cannot bind {addr}: {e}")))?;
            delta_lab_server::serve(listener, defaults, cors)
                .await
                .map_err(|e| internal(format!("server failed: {e}")))?;
            Ok(String::new())
        }
    }
}

fn local_only(remote: &Option<DeltaLabClient>, command: &str) -> Result<(), Failure> {
    match remote {
        Some(_) => Err(usage(format!(
            "`{command}` has no service endpoint; drop --remote"
        ))),
        None => Ok(()),
    }
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_ansi(std::io::stderr().is_terminal())
        .with_writer(std::io::stderr)
        .init();

    let cli = Cli::parse();
    match run(cli).await {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("{}", failure.error.to_line());
            ExitCode::from(failure.status)
        }
    }
}
