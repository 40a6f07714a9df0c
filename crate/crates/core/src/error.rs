use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus is not irreducible over F_{p}")]
    ReducibleModulus { p: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field of size {p}^{degree} exceeds the supported range")]
    ExtensionTooLarge { p: u32, degree: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operands live over different rings")]
    RingMismatch,
    #[error("leading coefficient of the divisor is not a unit")]
    NonUnitLeadingCoeff,
    #[error("left division needs a q-th root that does not exist over a ring with nilpotents")]
    NoQthRoot,
    #[error("point count did not stabilise by s = {s_max} (found {found} of {expected} points)")]
    BoundTooSmall { s_max: usize, found: u128, expected: u128 },
    #[error("operation requires the base ring to be a field")]
    NotAField,
    #[error("T does not map to 0 in the residue field; the module is not of characteristic p")]
    NotCharacteristicP,
    #[error("kernel of the isogeny candidate is not stable under e_T (remainder has degree {remainder_degree})")]
    KernelNotStable { remainder_degree: usize },
    #[error("polynomial is not additive")]
    NotAdditive,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("map is not an M-structure")]
    NotMStructure,
    #[error("generated divisor is not additive")]
    NotAdditiveDivisor,
    #[error("divisor is not a subscheme of the target")]
    NotSubscheme,
    #[error("skew division left a nonzero remainder")]
    NotDivisible,
    #[error("no solution over extensions of degree <= {bound}")]
    ExtensionBoundExceeded { bound: usize },
    #[error("flag carries no generator witness")]
    NoWitness,
    #[error("sub-simplex is not contained in the closure of the standard simplex")]
    InvalidSubsimplex,
    #[error("Newton points have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("only the cocharacter (1,0,...,0) is supported")]
    UnsupportedMu,
    #[error("no adapted basis: {0}")]
    NotAdapted(String),
    #[error("coefficient does not lie in F_q")]
    NotFqCoefficient,
    #[error("invalid flag: {0}")]
    InvalidFlag(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}
