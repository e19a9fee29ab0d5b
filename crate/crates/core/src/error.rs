use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is non-finite or violates its domain.
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// A gain formula would divide by zero.
    GainSingularity { divisor: &'static str },
    /// Transfer function evaluated within tolerance of a pole.
    NearPole { distance: f64 },
    /// Root finder did not reach the residual tolerance.
    RootFinding { residual: f64 },
    /// Structurally invalid request (bad grid, mismatched lengths, ...).
    InvalidInput(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter { name, value, reason }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value, reason } => {
                write!(f, "invalid parameter {name} = {value}: {reason}")
            }
            Error::GainSingularity { divisor } => {
                write!(f, "gain singularity: {divisor} is zero")
            }
            Error::NearPole { distance } => {
                write!(f, "evaluation point is {distance:e} from a pole")
            }
            Error::RootFinding { residual } => {
                write!(f, "root finding did not converge (relative residual {residual:e})")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
