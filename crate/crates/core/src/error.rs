use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: f64 },

    #[error("{function}: argument outside domain ({detail})")]
    Domain { function: &'static str, detail: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{function} did not converge: {detail}")]
    NonConvergence { function: &'static str, detail: String },

    #[error("no contour abscissa separates the pole families (left poles up to {left}, right poles from {right})")]
    ContourPlacement { left: f64, right: f64 },

    #[error("Mellin-Barnes integrand does not decay along the contour (rate {rate})")]
    DecayCheck { rate: f64 },

    #[error("overflow in {0}")]
    Overflow(String),

    #[error("infeasible: {detail}")]
    Infeasible { detail: String, minimal_n: Option<usize> },

    #[error("aliasing: {tail_mass:e} of probability mass falls outside the log grid")]
    Aliasing { tail_mass: f64 },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { function, detail: detail.into() }
    }

    pub(crate) fn no_conv(function: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence { function, detail: detail.into() }
    }

    /// Innermost error, skipping `Context` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self.root(), Error::Infeasible { .. })
    }

    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::NonConvergence { .. }
                | Error::ContourPlacement { .. }
                | Error::DecayCheck { .. }
                | Error::Aliasing { .. }
                | Error::Overflow(_)
        )
    }
}

pub(crate) trait ResultExt<T> {
    fn context(self, ctx: impl FnOnce() -> String) -> Result<T>;
}

impl<T> ResultExt<T> for Result<T> {
    fn context(self, ctx: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| Error::Context { context: ctx(), source: Box::new(e) })
    }
}
