//! Command-line front end for the `curv` crate.
//!
//! Five subcommands over a shared input surface (a graph family spec or an
//! edge-list file):
//!
//! * `curvature` — per-vertex curvature reports on a dimension grid,
//! * `function`  — flat `(vertex, n, k, sharp)` samples for plotting,
//! * `analyze`   — structural diagnostics at selected vertices,
//! * `product`   — Cartesian-product curvature via the `*`-product,
//! * `check-cd`  — whole-graph `CD(k, N)` verdicts.
//!
//! Every command renders to a table, JSON, or CSV; the JSON form
//! deserializes back to the in-memory report, and all output is
//! deterministic byte for byte. Exit codes: 0 on success, 1 for argument
//! or input-parsing problems, 2 for computation failures.

pub mod args;
pub mod commands;
pub mod report;

use clap::error::ErrorKind;
use clap::Parser;
use thiserror::Error;

use curv::dim::DimensionError;
use curv::engine::EngineError;
use curv::families::FamilyError;
use curv::graph::GraphError;
use curv::linalg::LinalgError;
use curv::matrices::MatrixError;
use curv::spectral::SpectralError;
use curv::star::StarError;

/// Errors surfaced to the terminal, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or malformed input: exit code 1.
    #[error("{0}")]
    Usage(String),
    /// A computation failed on well-formed input: exit code 2.
    #[error("{0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Math(_) => 2,
        }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            // Undefined curvature is a property of the graph, not a typo in
            // the invocation.
            GraphError::IsolatedVertex(_) => CliError::Math(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Graph(g) => g.into(),
            other => CliError::Math(other.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Graph(g) => g.into(),
            FamilyError::Linalg(l) => CliError::Math(l.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<StarError> for CliError {
    fn from(e: StarError) -> Self {
        match e {
            StarError::Graph(g) => g.into(),
            other => CliError::Math(other.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        CliError::Math(e.to_string())
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        CliError::Math(e.to_string())
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        CliError::Math(e.to_string())
    }
}

impl From<DimensionError> for CliError {
    fn from(e: DimensionError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Parses an argument vector into the typed command structure.
/// `--help`/`--version` surface as `Err(Ok(text))`-style usage errors here;
/// use [`run`] for the full terminal behavior.
pub fn parse<I, T>(argv: I) -> Result<args::Cli, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    args::Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.render().to_string()))
}

/// Parses an argument vector and runs the selected command, returning the
/// text destined for stdout. `--help`/`--version` come back as `Ok` text.
pub fn run<I, T>(argv: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(rendered),
                _ => Err(CliError::Usage(rendered)),
            };
        }
    };
    match cli.command {
        args::Command::Curvature(a) => {
            let out = commands::cmd_curvature(&a)?;
            commands::render_curvature(&out, a.format)
        }
        args::Command::Function(a) => {
            let out = commands::cmd_function(&a)?;
            commands::render_function(&out, a.format)
        }
        args::Command::Analyze(a) => {
            let out = commands::cmd_analyze(&a)?;
            commands::render_analyze(&out, a.format)
        }
        args::Command::Product(a) => {
            let out = commands::cmd_product(&a)?;
            commands::render_product(&out, a.format)
        }
        args::Command::CheckCd(a) => {
            let out = commands::cmd_check_cd(&a)?;
            commands::render_check_cd(&out, a.format)
        }
    }
}
