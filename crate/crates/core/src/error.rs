use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("site {site} out of range for a chain of length {len}")]
    SiteOutOfRange { site: usize, len: usize },

    #[error("invalid chain spec: {0}")]
    InvalidSpec(String),

    #[error("chain length {len} exceeds the dense-solver cap of {max} sites")]
    ChainTooLong { len: usize, max: usize },

    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("alpha coefficient index m = {0} must be 1 or 2")]
    InvalidAlphaIndex(i32),

    #[error("sin(3 phi) vanishes at phi = {phi}; first-order edge correction is singular")]
    SingularCorrection { phi: f64 },

    #[error("edge-mode expansion assumes uniform flip couplings")]
    NonUniformFlip,

    #[error("perturbation order {0} not supported (use 2 or 3)")]
    InvalidOrder(usize),

    #[error("couplings outside the perturbative regime: f/J = {ratio:.3} >= {limit}")]
    NonPerturbative { ratio: f64, limit: f64 },

    #[error("unperturbed ground space has dimension {0}, expected 3")]
    DegenerateBasis(usize),

    #[error("operation requires L = {expected}, got L = {got}")]
    WrongLength { expected: usize, got: usize },

    #[error("operation requires at least {min} sites, got {got}")]
    ChainTooShort { min: usize, got: usize },

    #[error("no bond dominates its neighbouring flip couplings; decimation rule inapplicable")]
    NoDominantBond,

    #[error("phase denominator {0} is not a power of 3")]
    DenominatorNotPowerOfThree(u64),

    #[error("gate does not have the required form: {0}")]
    WrongGate(String),

    #[error("classification exceeds bound k_max = {0}")]
    ExceedsBound(usize),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("sample count must be positive")]
    EmptySample,

    #[error("four-photon resonance violated: residual {residual:.3e}")]
    ResonanceViolated { residual: f64 },

    #[error("boost energy Delta vanishes; adiabatic elimination undefined")]
    ZeroBoost,

    #[error("step too large: dt * |H| = {0:.3e} exceeds 0.1")]
    StepTooLarge(f64),

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("F_l vanishes on the loop at s = {0:.6}")]
    VanishingDenominator(f64),

    #[error("Berry loop is not closed: phase winds by {0:.6} rad")]
    OpenLoop(f64),

    #[error("target unreachable: best residual {0:.3e}")]
    Unreachable(f64),
}
