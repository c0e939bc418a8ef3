use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("coin matrix is not unitary (max deviation {deviation:e})")]
    NonUnitaryCoin { deviation: f64 },

    #[error("coin state is not normalized (norm² = {norm_sqr})")]
    UnnormalizedChirality { norm_sqr: f64 },

    #[error("lattice size mismatch: field has {field} sites, traps have {traps}")]
    SizeMismatch { field: usize, traps: usize },

    #[error("site {site} is outside 1..={size}")]
    SiteOutOfRange { site: usize, size: usize },

    #[error("duplicate trap site {0}")]
    DuplicateTrap(usize),

    #[error("walker starts on trap site {0}")]
    StartOnTrap(usize),

    #[error("every site is trapped; no walkers can be placed")]
    NoWalkers,

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("probability mass {mass:e} within one site of the window edge; enlarge the window")]
    WindowOverflow { mass: f64 },

    #[error("fit failed: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
