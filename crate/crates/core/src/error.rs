use crate::codec::Flavor;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),

    #[error("invalid fading model: {0}")]
    InvalidModel(String),

    #[error("invalid domain input: {0}")]
    Domain(String),

    #[error("pattern has {got} entries but n/k = {want}")]
    PatternLength { got: usize, want: usize },

    #[error("message does not fit in {n} bits")]
    MessageRange { n: u32 },

    #[error("constellation ({0}) does not match the code parameters ({1})")]
    ConstellationMismatch(String, String),

    #[error("code flavor {code:?} does not match channel flavor {channel:?}")]
    FlavorMismatch { code: Flavor, channel: Flavor },

    #[error("{got} observations supplied but the pattern transmits {want} symbols")]
    ObservationLength { got: usize, want: usize },

    #[error("n = {n} exceeds the exhaustive ML search guard (n <= {max})")]
    ExhaustiveGuard { n: u32, max: u32 },

    #[error("tail sum L_{a} = 0 makes the bound vacuous")]
    EmptyTail { a: usize },

    #[error("the AWGN family has no fading modulus distribution")]
    NoModulusPdf,

    #[error("invalid theta partition: {0}")]
    InvalidPartition(String),

    #[error("infeasible budget: p_ini * n/k = {need} exceeds the symbol budget {budget}")]
    InfeasibleBudget { need: u64, budget: u64 },

    #[error("{count} compositions exceed the enumeration guard {max}")]
    EnumerationGuard { count: u128, max: u128 },

    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
