use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to be
/// printed as a one-line diagnostic.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sieve limit {limit} needs about {needed} bytes, over the memory budget of {budget} bytes")]
    Capacity { limit: u64, needed: u64, budget: u64 },

    #[error("{what} = {value} is out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported subset spec: {0}")]
    UnsupportedSpec(String),

    #[error("prime table covers {have} but {need} is required")]
    InsufficientTable { need: u64, have: u64 },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("no root of the alpha equation in (1/2, 1) for N = {n}: f(1/2) = {f_low}, f(1) = {f_high}")]
    NoRoot { n: f64, f_low: f64, f_high: f64 },

    #[error("inequality crossover not found below {scan_limit}: {reason}")]
    NotFound { scan_limit: u64, reason: String },

    #[error("{origin}: {reason}")]
    Format { origin: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
