mod compare;
mod ldcheck;
mod limits;
mod simulate;

pub use compare::{compare, CompareArgs, CompareReport, CompareRow, LawSource};
pub use ldcheck::{ldcheck, LdConfig, LdPoint, LdRow};
pub use limits::{limits, LimitsConfig, LimitsEntry};
pub use simulate::{simulate, SimulateArgs, SimulateOutcome};

use std::path::Path;

use crate::error::{CliError, CliResult};

fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Core errors raised while checking inputs are validation failures; the
/// rest are runtime failures.
fn classify(err: heavyeig::Error) -> CliError {
    match err {
        heavyeig::Error::InvalidParameter { .. }
        | heavyeig::Error::NotSummable { .. }
        | heavyeig::Error::ReducibleChain => CliError::Validation(err.to_string()),
        other => CliError::Run(other),
    }
}
