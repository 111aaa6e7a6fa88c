use thiserror::Error;

/// Errors shared by all modules of the crate.
///
/// Inconsistent congruence systems and vanishing densities are *not* errors;
/// they are meaningful return values. Errors are reserved for resource limits,
/// 128-bit overflow and invalid inputs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An allocation would exceed the configured memory budget.
    #[error("capacity: {required} bytes needed for limit {limit}, budget is {budget} bytes")]
    Capacity {
        limit: u64,
        required: u128,
        budget: u128,
    },

    /// A 128-bit intermediate overflowed. Overflow is a hard error, never
    /// wraparound; when a specific prime is responsible it is reported.
    #[error("overflow in {what}{}", prime.map(|p| format!(" at p = {p}")).unwrap_or_default())]
    Overflow {
        what: &'static str,
        prime: Option<u64>,
    },

    /// A table lookup past the sieved limit.
    #[error("n = {n} is out of table range (limit {limit})")]
    OutOfRange { n: u64, limit: u64 },

    /// Division by a vanishing local factor: the tuple classes cover every
    /// residue modulo a power of `p`.
    #[error("local factor vanishes at p = {p}: configuration is inadmissible there")]
    Inadmissible { p: u64 },

    /// Rejected input (exponents below 2, empty tuple, malformed values).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
