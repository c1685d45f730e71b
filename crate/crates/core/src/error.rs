use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("elements belong to different group instances: {0} vs {1}")]
    MixedInstance(String, String),

    #[error("element {element} is not a member of {instance}")]
    NotMember { element: String, instance: String },

    #[error("lower bound of an empty list")]
    EmptyList,

    #[error("{0} has no enumerable intervals")]
    NotEnumerable(String),

    #[error("argument {0} is not above the identity")]
    BelowIdentity(String),

    #[error("products differ: {0} vs {1}")]
    UnequalProducts(String, String),

    #[error("permutation lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("not a bijection: {0:?}")]
    NotBijection(Vec<usize>),

    #[error("interpolation precondition violated: {0}")]
    Precondition(String),

    #[error("window of about {estimate} elements exceeds the cap of {cap}")]
    WindowTooLarge { estimate: u128, cap: u128 },

    #[error("refinement failed: {0}")]
    Refinement(String),

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("invalid parameter: {0}")]
    Invalid(String),
}
