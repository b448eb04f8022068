//! Shared CLI plumbing: family flags, output handling, complex JSON shims.

use std::fmt;
use std::path::PathBuf;

use quadlin::coeffs::{CoefficientFamily, FamilyRegime};

#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

pub type CliResult = Result<i32, CliError>;

/// Coefficient-family flags shared by most subcommands.
#[derive(clap::Args, Clone, Debug)]
pub struct FamilyArgs {
    /// Torus regime: rectangular, rhombic or degenerate.
    #[arg(long, default_value = "rectangular")]
    pub regime: String,
    /// Imaginary part of the modulus (ignored in the degenerate regime).
    #[arg(long, default_value_t = 1.0)]
    pub tau0: f64,
    /// Shift parameter of the h family.
    #[arg(long, default_value_t = 0.0)]
    pub lambda0: f64,
}

impl FamilyArgs {
    pub fn regime(&self) -> Result<FamilyRegime, CliError> {
        match self.regime.as_str() {
            "rectangular" => Ok(FamilyRegime::Rectangular),
            "rhombic" => Ok(FamilyRegime::Rhombic),
            "degenerate" => Ok(FamilyRegime::Degenerate),
            other => Err(CliError(format!(
                "unknown regime '{other}', expected rectangular | rhombic | degenerate"
            ))),
        }
    }

    pub fn family(&self) -> Result<CoefficientFamily<f64>, CliError> {
        CoefficientFamily::new(self.regime()?, self.tau0, self.lambda0)
            .map_err(|e| CliError(e.to_string()))
    }
}

/// Output style of exported artifacts.
#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

/// Writes to the path when given, otherwise to stdout.
pub fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

/// Selects the oracle evaluation path; `extended` switches the identity
/// suites to double-double arithmetic.
pub fn extended_precision() -> Result<bool, CliError> {
    match std::env::var("QUADLIN_PRECISION") {
        Ok(v) if v == "extended" => Ok(true),
        Ok(v) if v == "double" || v.is_empty() => Ok(false),
        Ok(v) => Err(CliError(format!(
            "QUADLIN_PRECISION must be 'double' or 'extended', got '{v}'"
        ))),
        Err(_) => Ok(false),
    }
}
