use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invariant `{name}` violated: residual {residual:.3e} exceeds {tolerance:.3e}")]
    InvariantViolated {
        name: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("bilinear form is singular")]
    SingularForm,

    #[error("not factorizable: the Casimir element is singular")]
    NotFactorizable,

    #[error("non-semisimple element: diagonalization defect {defect:.3e}")]
    NonSemisimple { defect: f64 },

    #[error("{function} evaluated at {argument} lies {distance:.3e} from the pole {pole}")]
    PoleProximity {
        function: String,
        argument: Complex64,
        pole: Complex64,
        distance: f64,
    },

    #[error("sampling region too constrained after {rejections} consecutive rejections")]
    SamplingTooConstrained { rejections: usize },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invariant(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Error::InvariantViolated {
            name: name.into(),
            residual,
            tolerance,
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
