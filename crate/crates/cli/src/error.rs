//! Error-to-exit-code mapping.
//!
//! * 2 — input/parse: unreadable or malformed case files (and clap usage
//!   errors, which clap itself exits 2 on).
//! * 3 — configuration: parameter values outside their domains.
//! * 4 — numerical domain: operations whose preconditions hold but whose
//!   math degenerates (non-PD covariances, negative discriminant, ...).

use vuix_core::attack::AttackError;
use vuix_core::grid::GridError;
use vuix_core::stochastic::ModelError;
use vuix_core::vuix::VuixError;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }

    /// Output-channel failures (filesystem, broken pipe) are input/output
    /// problems, not config or math.
    pub fn output(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    /// A closed stdout (`vuix ... | head`) is not an error worth reporting:
    /// the reader simply stopped. Exit 0 silently, like other line tools.
    pub fn stdout(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            CliError {
                code: 0,
                message: String::new(),
            }
        } else {
            CliError::output(format!("writing to stdout: {e}"))
        }
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        // Everything a case file can get wrong is an input problem.
        CliError::input(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidRho(_) | ModelError::NonpositiveNoise(_) => {
                CliError::config(e.to_string())
            }
            ModelError::DegenerateSignal(_)
            | ModelError::DimensionMismatch(_)
            | ModelError::NotPositiveSemidefinite(_)
            | ModelError::NotPositiveDefinite => CliError::numerical(e.to_string()),
        }
    }
}

impl From<AttackError> for CliError {
    fn from(e: AttackError) -> Self {
        match e {
            AttackError::LambdaBelowOne(_)
            | AttackError::InvalidParams(_)
            | AttackError::InvalidAttackSet(_)
            | AttackError::IndexAttacked(_) => CliError::config(e.to_string()),
            AttackError::NegativeDiscriminant { .. }
            | AttackError::SingularFactorization(_)
            | AttackError::InvalidCovariance(_)
            | AttackError::DimensionMismatch(_) => CliError::numerical(e.to_string()),
        }
    }
}

impl From<VuixError> for CliError {
    fn from(e: VuixError) -> Self {
        match e {
            VuixError::InvalidK { .. }
            | VuixError::InvalidTrials(_)
            | VuixError::IndexAttacked(_)
            | VuixError::EmptyFreeSet => CliError::config(e.to_string()),
            VuixError::DimensionMismatch(_) | VuixError::Numerical(_) => {
                CliError::numerical(e.to_string())
            }
            VuixError::Attack(inner) => inner.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_family() {
        assert_eq!(
            CliError::from(GridError::Malformed("x".into())).code,
            EXIT_INPUT
        );
        assert_eq!(
            CliError::from(ModelError::InvalidRho(2.0)).code,
            EXIT_CONFIG
        );
        assert_eq!(
            CliError::from(ModelError::NotPositiveDefinite).code,
            EXIT_NUMERICAL
        );
        assert_eq!(
            CliError::from(AttackError::LambdaBelowOne(0.5)).code,
            EXIT_CONFIG
        );
        assert_eq!(
            CliError::from(AttackError::NegativeDiscriminant {
                w: 1.0,
                sigma2: 1.0,
                lambda: 0.5
            })
            .code,
            EXIT_NUMERICAL
        );
        assert_eq!(
            CliError::from(VuixError::InvalidK { k: 3, m: 3 }).code,
            EXIT_CONFIG
        );
        assert_eq!(
            CliError::from(VuixError::Attack(AttackError::NegativeDiscriminant {
                w: 1.0,
                sigma2: 1.0,
                lambda: 0.5
            }))
            .code,
            EXIT_NUMERICAL
        );
    }
}
