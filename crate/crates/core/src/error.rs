use alloc::string::String;
use core::fmt;

/// Errors reported by the computation kernels.
///
/// Budget and degeneracy conditions are separated from plain argument
/// errors so the CLI can map them to distinct exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A code does not decode to a monic polynomial.
    NonMonicCode { code: u64 },
    /// A coefficient is not reduced mod q.
    CoefficientRange { coeff: u64, q: u64 },
    /// The requested operation needs a non-constant polynomial.
    ConstantPolynomial,
    /// The modulus of a residue table must be irreducible.
    NonPrimeModulus { code: u64 },
    /// The modulus of a residue table must have degree at least 2.
    ModulusDegree { degree: usize },
    /// A table would exceed its entry budget.
    BudgetExceeded { needed: u64, budget: u64 },
    /// The principal character is not allowed here.
    PrincipalCharacter,
    /// A character index is out of range for the group.
    CharIndexRange { index: u64, order: u64 },
    /// An argument is divisible by the modulus.
    DivisibleByModulus,
    /// The L-polynomial vanished identically (internal error for j != 0).
    ZeroPolynomial,
    /// A moment order must be non-negative.
    NegativeMomentOrder,
    /// A grid of thresholds must be strictly increasing.
    GridNotIncreasing,
    /// The prime cutoff x must satisfy 2 <= x <= |Q|.
    CutoffOutOfRange,
    /// The mean-value identity requires y^m <= |Q|.
    HypothesisViolated { y_pow_m: u64, modulus_norm: u64 },
    /// Block indices must satisfy 1 <= i <= l <= J.
    BlockIndexOrder { i: usize, l: usize, j_cap: usize },
    /// The segmentation schedule is degenerate (J = 0).
    DegenerateSchedule,
    /// A majorant check was invoked on an out-of-range block value.
    MajorantPrecondition { block: usize, value: f64, threshold: f64 },
    /// Mollifier coefficient expansion would exceed the memory budget.
    MemoryBudget { window: usize, needed: u64, budget: u64 },
    /// Exponent k = 1 has no Hoelder split.
    HolderExponentOne,
    /// Anything else worth a message.
    Invalid(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonMonicCode { code } => {
                write!(f, "code {code} does not encode a monic polynomial")
            }
            Error::CoefficientRange { coeff, q } => {
                write!(f, "coefficient {coeff} is not reduced mod {q}")
            }
            Error::ConstantPolynomial => write!(f, "constant polynomial not allowed"),
            Error::NonPrimeModulus { code } => {
                write!(f, "modulus (code {code}) is not irreducible")
            }
            Error::ModulusDegree { degree } => {
                write!(f, "modulus degree {degree} is below the minimum of 2")
            }
            Error::BudgetExceeded { needed, budget } => {
                write!(f, "table needs {needed} entries, budget is {budget}")
            }
            Error::PrincipalCharacter => write!(f, "principal character not allowed"),
            Error::CharIndexRange { index, order } => {
                write!(f, "character index {index} out of range for group order {order}")
            }
            Error::DivisibleByModulus => write!(f, "argument is divisible by the modulus"),
            Error::ZeroPolynomial => write!(f, "L-polynomial is identically zero"),
            Error::NegativeMomentOrder => write!(f, "moment order must be non-negative"),
            Error::GridNotIncreasing => write!(f, "threshold grid must be strictly increasing"),
            Error::CutoffOutOfRange => write!(f, "cutoff x must satisfy 2 <= x <= |Q|"),
            Error::HypothesisViolated { y_pow_m, modulus_norm } => {
                write!(f, "mean-value hypothesis fails: y^m = {y_pow_m} > |Q| = {modulus_norm}")
            }
            Error::BlockIndexOrder { i, l, j_cap } => {
                write!(f, "block indices must satisfy 1 <= i <= l <= J, got i={i} l={l} J={j_cap}")
            }
            Error::DegenerateSchedule => write!(f, "segmentation schedule is degenerate (J = 0)"),
            Error::MajorantPrecondition { block, value, threshold } => {
                write!(
                    f,
                    "majorant precondition fails: |Re block {block}| = {value} exceeds {threshold}"
                )
            }
            Error::MemoryBudget { window, needed, budget } => {
                write!(
                    f,
                    "mollifier window {window} needs {needed} coefficients, budget is {budget}"
                )
            }
            Error::HolderExponentOne => write!(f, "k = 1 has no Hoelder split"),
            Error::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

/// True when the error is a budget or degeneracy condition rather than a
/// malformed argument.
impl Error {
    pub fn is_budget_or_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. }
                | Error::MemoryBudget { .. }
                | Error::DegenerateSchedule
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
