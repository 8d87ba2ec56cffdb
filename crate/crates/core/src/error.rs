use thiserror::Error;

/// Errors produced by state construction, moment evaluation and the searches.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector norm underflows; cannot normalize")]
    ZeroVector,

    #[error("Fock cutoff {cutoff} too small: truncated weight {tail:e} exceeds tolerance")]
    CutoffTooSmall { cutoff: usize, tail: f64 },

    #[error("state is not normalizable: amplitudes do not decay before cutoff {max_cutoff}")]
    NotNormalizable { max_cutoff: usize },

    #[error("nonlinearity vanishes at n = {n}")]
    ZeroFactorValue { n: usize },

    #[error("nonlinearity is not finite at n = {n}")]
    NonFiniteFactor { n: usize },

    #[error("expectation value is not real: imaginary part {imag:e}")]
    NonHermitianResult { imag: f64 },

    #[error("moment sum carries an imaginary residue: {re:e} + {im:e}i")]
    ImaginaryResidue { re: f64, im: f64 },

    #[error("no closed form available for K = {k}, N = {n}")]
    UnsupportedPair { k: usize, n: usize },

    #[error("function does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("function is not unimodal on the bracket: {minima} interior minima")]
    NotUnimodal { minima: usize },

    #[error("no squeezing for K = {k}, N = {n}")]
    NoSqueezing { k: usize, n: usize },

    #[error("no squeezing found for K = {k} up to order {n_max}")]
    NotFound { k: usize, n_max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
