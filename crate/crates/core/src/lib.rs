//! Core algorithms for a product-chain ledger: negacyclic ring and lattice
//! algebra, a pairing group with a transparent evaluation map, a
//! matrix-compression hash, multi-receiver signcryption, rating-based
//! endorsement, the hash-chained ledger itself, and a deterministic network
//! simulator with its metrics pipeline.

pub mod algebra;
pub mod consensus_poa;
pub mod hashing;
pub mod identity;
pub mod ledger;
pub mod metrics;
pub mod netsim;
pub mod signcryption;

pub use algebra::{
    generate_basis, lattice_point, pairing_eval, ring_add, ring_mul, sample_small, seeded_rng,
    AlgebraError, GroupElement, GroupParams, GroupScalar, LatticeBasis, PairingOutput, RingElement,
    RingParams, SmallRingElement, BASIS_DIM, ENTRY_BOUND, GROUP_ORDER, RING_DEGREE, RING_MODULUS,
    TARGET_MODULUS,
};
pub use hashing::{
    expand_mask, h1, h2, h3, lash_compress, tagged_digest, Digest, HashError, HashParams, Lash,
    LASH_COLS, LASH_MODULUS, LASH_OUTPUT_BITS, LASH_ROWS,
};
pub use identity::{
    derive_partial_key, generate_keypair, pseudo_id, validate_credentials, DocumentType,
    IdentityError, KeyPair, PartialKey, ProofMetrics, StakeholderRole, StakeholderWallet,
    WalletRegistry,
};
pub use consensus_poa::{
    access_decision, endorse_proposal, evaluate_service, update_rating, AccessDecision,
    EndorseOutcome, EndorserView, PoAConfig, PoAError, RatingState, RejectReason, ServiceRecord,
    ServiceType, MAX_RATING,
};
pub use ledger::{
    load_chain, save_chain, validate_chain, Chain, ChainVerdict, LedgerError, Prodblock,
};
pub use metrics::{
    block_throughput, export, fit_r2, measure, read_latency, read_throughput,
    stamp_block_count_fits, success_rate, transaction_latency, transaction_throughput,
    ExportFormat, MetricReport, MetricsError, CSV_HEADER,
};
pub use netsim::{
    calibrated_error_rates, run_scenario, run_scenario_with, sweep_blocksize, sweep_endorsers,
    threshold_rank, BlockOutcome, BlockStatus, CurvePoint, FailureClass, ReadOutcome, Scenario,
    SimError, SimEvent, SimEventKind, SimOptions, SimResult,
};
pub use signcryption::{signcrypt, unsigncrypt, verify_only, Ciphertext, Plaintext, SigncryptError};
