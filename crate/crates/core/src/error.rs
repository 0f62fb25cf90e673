use alloc::string::String;

use thiserror::Error;

use crate::modforms::Level;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty coefficient window [{lo}, {hi}]")]
    EmptyWindow { lo: i64, hi: i64 },

    #[error("leading coefficient at q^{exponent} is zero")]
    ZeroLeadingCoefficient { exponent: i64 },

    #[error("invalid Eisenstein weight {0}: must be even and positive")]
    InvalidEisensteinWeight(i64),

    #[error("monomial of weight {found} in a form of total weight {expected}")]
    WeightMismatch { expected: i64, found: i64 },

    #[error("window holds {available} coefficients, {required} needed for a certified solve")]
    Precision { required: usize, available: usize },

    #[error(
        "not in the level {level} space of weight {weight} and pole order {pole_order}: first mismatch at q^{exponent}"
    )]
    NotInSpace {
        level: Level,
        weight: i64,
        pole_order: u32,
        exponent: i64,
    },

    #[error("{0} is not a divisor class")]
    NotADivisor(String),

    #[error("no catalogue entry for {0}")]
    Uncatalogued(String),

    #[error("reduction stopped at irreducible atom {0}")]
    IrreducibleAtom(String),

    #[error("inconsistent degeneration plan: {0}")]
    InvalidPlan(String),

    #[error("invalid U-perp index {0} (must be 1..=20)")]
    BadLatticeIndex(u8),
}

pub type Result<T> = core::result::Result<T, Error>;
