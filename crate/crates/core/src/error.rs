use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid basis label {label:?} for subsystem {subsystem:?}")]
    InvalidLabel { subsystem: String, label: String },

    #[error("unknown subsystem {0:?}")]
    UnknownSubsystem(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("g_L = g_R = 0: the cavity is empty, use empty_cavity_phase instead")]
    DegenerateCoupling,

    #[error("integration step {step} exceeds the accuracy limit {limit}")]
    Accuracy { step: f64, limit: f64 },

    #[error("non-finite amplitude at t = {0}")]
    NumericalBlowup(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("graph error: {0}")]
    Graph(String),

    #[error("state is not a single-excitation state: {0}")]
    NotSingleExcitation(String),

    #[error("subsystem {0:?} is entangled with the rest of the register")]
    NotProduct(String),

    #[error("outcome probabilities sum to {0}, expected 1")]
    LossyWiring(f64),

    #[error("retry walk with p_flip = 0 never reaches the detector")]
    DegenerateWalk,
}

impl Error {
    /// True for errors caused by bad caller input rather than a broken
    /// internal invariant.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidLabel { .. }
                | Error::UnknownSubsystem(_)
                | Error::Parameter(_)
                | Error::DegenerateCoupling
                | Error::Accuracy { .. }
                | Error::Graph(_)
                | Error::DegenerateWalk
        )
    }
}
