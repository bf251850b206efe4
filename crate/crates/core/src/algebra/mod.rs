//! Algebraic substrate: negacyclic ring arithmetic, lattice bases, and the
//! prime-order pairing group the signcryption transcript lives in.

pub mod basis;
pub mod group;
pub mod ring;

pub use basis::{generate_basis, lattice_point, LatticeBasis, BASIS_DIM, ENTRY_BOUND};
pub use group::{
    pairing_eval, GroupElement, GroupParams, GroupScalar, PairingOutput, GROUP_ORDER,
    TARGET_MODULUS,
};
pub use ring::{
    ring_add, ring_mul, sample_small, seeded_rng, RingElement, RingParams, SmallRingElement,
    RING_DEGREE, RING_MODULUS,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("invalid ring parameters: {0}")]
    InvalidRingParams(&'static str),
    #[error("invalid group parameters: {0}")]
    InvalidGroupParams(&'static str),
    #[error("basis dimension {0} outside supported range 2..=16")]
    InvalidBasisDim(usize),
    #[error("operands belong to different ring instances")]
    ParamMismatch,
    #[error("operands belong to different group instances")]
    GroupMismatch,
    #[error("coefficient outside [0, q)")]
    CoefficientRange,
    #[error("element encoding outside group range")]
    ElementOutOfRange,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("encoding length mismatch: expected {expected}, got {got}")]
    EncodingLength { expected: usize, got: usize },
    #[error("seed must be nonempty")]
    EmptySeed,
    #[error("integer overflow in lattice combination")]
    Overflow,
}
