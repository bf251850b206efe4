//! Deterministic discrete-event simulation of the product-chain network:
//! batched block submission, endorsement, an ordering pipeline with a cost
//! model, per-node commits, ledger reads, and seeded failure injection.

mod engine;
mod scenario;
mod sweep;

pub use engine::{
    calibrated_error_rates, run_scenario, run_scenario_with, threshold_rank, BlockOutcome,
    BlockStatus, FailureClass, ReadOutcome, SimEvent, SimEventKind, SimOptions, SimResult,
    CONGESTION_KNEE_TX, CONGESTION_MICROS_PER_TX, CONTENTION_MICROS_PER_EXTRA_ENDORSER,
    READ_LOOKUP_MICROS, TX_MEAN_BYTES,
};
pub use scenario::{Scenario, DEFAULT_LINK_RATE_BPS, MEASURED_COMMIT_DELAYS_MICROS};
pub use sweep::{sweep_blocksize, sweep_endorsers, CurvePoint};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("unknown scenario key {0:?}")]
    UnknownKey(String),
    #[error("duplicate scenario key {0:?}")]
    DuplicateKey(String),
    #[error("scenario line {0:?} is not key = value")]
    MalformedLine(String),
    #[error("scenario value for {key}: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("scenario field {field}: {reason}")]
    InvalidField { field: &'static str, reason: &'static str },
    #[error("sweep point {0} out of range {1}")]
    SweepPointOutOfRange(u64, &'static str),
    #[error("sweep requires at least one point")]
    EmptySweep,
    #[error(transparent)]
    Ledger(#[from] crate::ledger::LedgerError),
    #[error(transparent)]
    Signcrypt(#[from] crate::signcryption::SigncryptError),
    #[error(transparent)]
    Consensus(#[from] crate::consensus_poa::PoAError),
    #[error(transparent)]
    Identity(#[from] crate::identity::IdentityError),
}
