//! The event engine: endorsement, ordering pipeline, commits, reads, and
//! failure injection.
//!
//! All submissions happen at time zero; the orderer is a single FIFO server
//! whose per-block service time carries the cost model (serialization over
//! the link, a congestion penalty past the knee, and endorser contention).
//! Every quantity is integer microseconds of simulated time.

use rand_chacha::rand_core::RngCore;

use crate::algebra::{seeded_rng, GroupElement};
use crate::consensus_poa::{
    access_decision, endorse_proposal, AccessDecision, EndorseOutcome, EndorserView, PoAConfig,
    RatingState,
};
use crate::identity::{DocumentType, ProofMetrics, StakeholderRole, StakeholderWallet};
use crate::ledger::Chain;
use crate::signcryption::{signcrypt, verify_only, Ciphertext, Plaintext};

use super::{Scenario, SimError};

/// modeled mean transaction size on the wire
pub const TX_MEAN_BYTES: u64 = 200;
/// congestion sets in past this many transactions per block
pub const CONGESTION_KNEE_TX: u64 = 600;
/// queueing penalty per transaction past the knee
pub const CONGESTION_MICROS_PER_TX: u64 = 25_000;
/// resource-sharing cost per endorser beyond the first
pub const CONTENTION_MICROS_PER_EXTRA_ENDORSER: u64 = 3_714;
/// ledger lookup cost scale: this many microseconds per ln(chain length)
pub const READ_LOOKUP_MICROS: u64 = 5_500_000;

/// Execution knobs that are not part of the scenario contract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// commit-delay jitter as a fraction (e.g. 0.10 for ±10%), seeded
    pub jitter_fraction: Option<f64>,
    /// overrides the contention cost; None keeps the default
    pub contention_micros: Option<u64>,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { jitter_fraction: None, contention_micros: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureClass {
    Consensus,
    Syntax,
    Version,
}

impl std::fmt::Display for FailureClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FailureClass::Consensus => "consensus",
            FailureClass::Syntax => "syntax",
            FailureClass::Version => "version",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockStatus {
    Committed,
    Failed(FailureClass),
}

/// Per-block outcome. Failed blocks carry no pipeline or commit times.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOutcome {
    pub index: usize,
    pub submit_micros: u64,
    /// orderer finish time; the block's timestamp on the ledger
    pub finish_micros: Option<u64>,
    /// one commit time per node, node order
    pub commit_micros: Vec<u64>,
    /// time when the threshold share of nodes had committed
    pub confirmation_micros: Option<u64>,
    pub status: BlockStatus,
}

/// One ledger read: issued at its block's confirmation, answered after the
/// lookup and transfer delays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadOutcome {
    pub block_index: usize,
    pub submit_micros: u64,
    pub response_micros: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SimEventKind {
    Submit { block: usize },
    Endorse { block: usize },
    Commit { block: usize, node: usize },
    ReadRequest { read: usize },
    ReadResponse { read: usize },
}

impl SimEventKind {
    /// tie-break rank when times collide
    fn rank(&self) -> (u8, usize, usize) {
        match *self {
            SimEventKind::Submit { block } => (0, 0, block),
            SimEventKind::Endorse { block } => (1, 0, block),
            SimEventKind::Commit { block, node } => (2, node, block),
            SimEventKind::ReadRequest { read } => (3, 0, read),
            SimEventKind::ReadResponse { read } => (4, 0, read),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimEvent {
    pub time_micros: u64,
    pub kind: SimEventKind,
}

/// Everything a run produced: outcomes, the time-sorted event log, and the
/// ledger the committed blocks were appended to.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub node_count: usize,
    pub network_threshold: f64,
    pub tx_per_block: u64,
    pub block_count: usize,
    pub blocks: Vec<BlockOutcome>,
    pub reads: Vec<ReadOutcome>,
    pub events: Vec<SimEvent>,
    pub chain: Chain,
}

impl SimResult {
    pub fn committed_blocks(&self) -> usize {
        self.blocks.iter().filter(|b| b.status == BlockStatus::Committed).count()
    }

    pub fn committed_tx(&self) -> u64 {
        self.committed_blocks() as u64 * self.tx_per_block
    }
}

/// How many nodes must commit before a block counts as confirmed. The small
/// epsilon keeps exact fractions like 0.05 * 20 from rounding up on float
/// dust.
pub fn threshold_rank(threshold: f64, node_count: usize) -> usize {
    let raw = (threshold * node_count as f64 - 1e-9).ceil() as usize;
    raw.clamp(1, node_count)
}

/// transmission time of `bytes` over `link_rate` bits per second; zero rate
/// models free serialization
fn transfer_micros(bytes: u64, link_rate: u64) -> u64 {
    if link_rate == 0 {
        return 0;
    }
    let bits = (bytes as u128) * 8 * 1_000_000;
    bits.div_ceil(link_rate as u128) as u64
}

fn service_micros(s: &Scenario, contention_micros: u64) -> u64 {
    let serialization = transfer_micros(s.tx_per_block * TX_MEAN_BYTES, s.link_rate);
    let congestion = s.tx_per_block.saturating_sub(CONGESTION_KNEE_TX) * CONGESTION_MICROS_PER_TX;
    let contention = (s.endorser_count as u64 - 1) * contention_micros;
    serialization + congestion + contention
}

/// Failure rates that reproduce the benchmark success-rate table: zero
/// through 50 blocks, then deficits of 0.10, 0.13, 0.40, 0.50 and 0.52
/// percentage points at 60..100 blocks, linearly interpolated and split
/// evenly across the three classes. The deficits average 0.33 points across
/// the affected rows.
pub fn calibrated_error_rates(block_count: usize) -> [f64; 3] {
    const ROWS: [(f64, f64); 10] = [
        (10.0, 0.0),
        (20.0, 0.0),
        (30.0, 0.0),
        (40.0, 0.0),
        (50.0, 0.0),
        (60.0, 0.10),
        (70.0, 0.13),
        (80.0, 0.40),
        (90.0, 0.50),
        (100.0, 0.52),
    ];
    let b = block_count as f64;
    let deficit_pp = if b <= ROWS[0].0 {
        ROWS[0].1
    } else if b >= ROWS[9].0 {
        ROWS[9].1
    } else {
        let mut value = ROWS[9].1;
        for pair in ROWS.windows(2) {
            let ((x0, y0), (x1, y1)) = (pair[0], pair[1]);
            if b <= x1 {
                value = y0 + (y1 - y0) * (b - x0) / (x1 - x0);
                break;
            }
        }
        value
    };
    let total = deficit_pp / 100.0;
    [total / 3.0; 3]
}

/// Per-run failure schedule. A golden-ratio offset on the seed plus a
/// systematic (low-discrepancy) walk makes the failure count for B blocks
/// exactly floor or ceil of B * p, with the marginal probability of any
/// single block failing equal to p over uniform seeds; ensembles of seeds
/// then hit the calibrated mean at O(1/runs) instead of O(1/sqrt(runs)).
struct FailureSchedule {
    total_rate: f64,
    offset: f64,
}

impl FailureSchedule {
    fn new(rng_seed: u64, rates: [f64; 3]) -> Self {
        let golden = 0.618_033_988_749_894_9_f64;
        Self {
            total_rate: rates.iter().sum(),
            offset: ((rng_seed as f64 + 1.0) * golden).fract(),
        }
    }

    fn fails(&self, block: usize) -> bool {
        let k = block as f64;
        (self.offset + (k + 1.0) * self.total_rate).floor()
            > (self.offset + k * self.total_rate).floor()
    }
}

fn uniform_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

pub fn run_scenario(s: &Scenario) -> Result<SimResult, SimError> {
    run_scenario_with(s, SimOptions::default())
}

pub fn run_scenario_with(s: &Scenario, opts: SimOptions) -> Result<SimResult, SimError> {
    s.validate()?;
    let contention = opts.contention_micros.unwrap_or(CONTENTION_MICROS_PER_EXTRA_ENDORSER);
    let poa_cfg = PoAConfig::default_config();
    let seed_bytes = s.rng_seed.to_le_bytes();

    // deterministic cast: one initiating wallet plus the endorser set
    let mut chain = Chain::genesis();
    let initiator = chain
        .register(&ProofMetrics::new(
            DocumentType::TradeLicense,
            format!("sim initiator seed {}", s.rng_seed).into_bytes(),
            StakeholderRole::Manufacturer,
        ))?
        .clone();
    let endorsers: Vec<StakeholderWallet> = (0..s.endorser_count)
        .map(|i| {
            chain
                .register(&ProofMetrics::new(
                    DocumentType::TradeLicense,
                    format!("sim endorser {i} seed {}", s.rng_seed).into_bytes(),
                    StakeholderRole::Logistics,
                ))
                .map(|w| w.clone())
        })
        .collect::<Result<_, _>>()?;
    let endorser_pubs: Vec<GroupElement> = endorsers.iter().map(|w| w.keys.public()).collect();
    let initiator_rating = RatingState::new();

    // commit delays, optionally jittered per node for this run
    let mut jitter_rng = seeded_rng(b"netsim jitter", &seed_bytes);
    let delays: Vec<u64> = s
        .commit_delays_micros
        .iter()
        .map(|&d| match opts.jitter_fraction {
            Some(f) => {
                let scale = 1.0 + f * (2.0 * uniform_f64(&mut jitter_rng) - 1.0);
                (d as f64 * scale).round() as u64
            }
            None => d,
        })
        .collect();

    let schedule = FailureSchedule::new(s.rng_seed, s.error_rates);
    let mut class_rng = seeded_rng(b"netsim fault class", &seed_bytes);
    let service = service_micros(s, contention);
    let rank = threshold_rank(s.network_threshold, s.node_count);

    let mut blocks = Vec::with_capacity(s.block_count);
    let mut events = Vec::new();
    let mut orderer_free = 0u64;

    for k in 0..s.block_count {
        let submit = 0u64;
        events.push(SimEvent { time_micros: submit, kind: SimEventKind::Submit { block: k } });

        // the real payload: one signcrypted message addressed to the endorsers
        let m = Plaintext::new(
            format!("prodblock {k} carrying {} transactions", s.tx_per_block).into_bytes(),
            initiator.pseudo_id.clone(),
            initiator.keys.public(),
        )?;
        let mut block_seed = b"netsim block".to_vec();
        block_seed.extend_from_slice(&(k as u64).to_le_bytes());
        block_seed.extend_from_slice(&seed_bytes);
        let honest = signcrypt(&initiator.keys, &endorser_pubs, &m, &block_seed)?;

        // failure injection decides what the endorsers actually receive
        let injected: Option<FailureClass> = if schedule.fails(k) {
            let v = uniform_f64(&mut class_rng) * schedule.total_rate;
            Some(if v < s.error_rates[0] {
                FailureClass::Consensus
            } else if v < s.error_rates[0] + s.error_rates[1] {
                FailureClass::Syntax
            } else {
                FailureClass::Version
            })
        } else {
            None
        };

        let mut wire = honest.encode();
        if injected == Some(FailureClass::Version) {
            // stamp an unknown wire version
            wire[0] = wire[0].wrapping_add(1);
        }

        let status = match Ciphertext::decode(chain.params(), &wire) {
            Err(_) => BlockStatus::Failed(FailureClass::Version),
            Ok(mut proposal) => {
                if injected == Some(FailureClass::Syntax) {
                    // corrupt the signature component
                    proposal.w = proposal.w.add(&GroupElement::generator(chain.params()));
                }
                let sig_ok = verify_only(&initiator.keys.public(), &endorser_pubs, &proposal);
                let gate = access_decision(&initiator_rating) == AccessDecision::Allow;
                let views: Vec<EndorserView> = match injected {
                    Some(FailureClass::Consensus) => {
                        // one endorser short of the quorum answers favorably
                        let passing = threshold_rank(poa_cfg.endorsement_quorum, s.endorser_count)
                            .saturating_sub(1);
                        (0..s.endorser_count)
                            .map(|i| EndorserView {
                                signature_valid: sig_ok,
                                access_allowed: i < passing,
                            })
                            .collect()
                    }
                    _ => endorsers
                        .iter()
                        .map(|_| EndorserView { signature_valid: sig_ok, access_allowed: gate })
                        .collect(),
                };
                match endorse_proposal(&views, &poa_cfg)? {
                    EndorseOutcome::Accept => BlockStatus::Committed,
                    EndorseOutcome::Reject(_) => {
                        BlockStatus::Failed(injected.unwrap_or(FailureClass::Consensus))
                    }
                }
            }
        };

        match status {
            BlockStatus::Committed => {
                events.push(SimEvent { time_micros: submit, kind: SimEventKind::Endorse { block: k } });
                let finish = orderer_free.max(submit) + service;
                orderer_free = finish;
                let block = chain.build_block(&initiator, honest, finish)?;
                chain.append(block)?;
                let commit_micros: Vec<u64> = delays.iter().map(|&d| finish + d).collect();
                let mut sorted = commit_micros.clone();
                sorted.sort_unstable();
                let confirmation = sorted[rank - 1];
                for (node, &t) in commit_micros.iter().enumerate() {
                    events.push(SimEvent {
                        time_micros: t,
                        kind: SimEventKind::Commit { block: k, node },
                    });
                }
                blocks.push(BlockOutcome {
                    index: k,
                    submit_micros: submit,
                    finish_micros: Some(finish),
                    commit_micros,
                    confirmation_micros: Some(confirmation),
                    status,
                });
            }
            BlockStatus::Failed(_) => {
                blocks.push(BlockOutcome {
                    index: k,
                    submit_micros: submit,
                    finish_micros: None,
                    commit_micros: Vec::new(),
                    confirmation_micros: None,
                    status,
                });
            }
        }
    }

    // one read per committed block, issued at its confirmation against the
    // chain as grown so far
    let mut reads = Vec::new();
    let block_bytes = s.tx_per_block * TX_MEAN_BYTES;
    for outcome in blocks.iter().filter(|b| b.status == BlockStatus::Committed) {
        let read = reads.len();
        let submit = outcome.confirmation_micros.expect("committed blocks are confirmed");
        let chain_len = 2 + read + 1;
        let lookup = (READ_LOOKUP_MICROS as f64 * (chain_len as f64).ln()).round() as u64;
        let response = submit + lookup + transfer_micros(block_bytes, s.link_rate);
        events.push(SimEvent { time_micros: submit, kind: SimEventKind::ReadRequest { read } });
        events.push(SimEvent { time_micros: response, kind: SimEventKind::ReadResponse { read } });
        reads.push(ReadOutcome { block_index: outcome.index, submit_micros: submit, response_micros: response });
    }

    events.sort_by_key(|e| (e.time_micros, e.kind.rank()));

    Ok(SimResult {
        node_count: s.node_count,
        network_threshold: s.network_threshold,
        tx_per_block: s.tx_per_block,
        block_count: s.block_count,
        blocks,
        reads,
        events,
        chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::{validate_chain, ChainVerdict};

    fn exact_latency_scenario() -> Scenario {
        Scenario {
            block_count: 1,
            endorser_count: 1,
            link_rate: 0,
            ..Scenario::default_scenario()
        }
    }

    #[test]
    fn single_block_confirmation_matches_table_delays() {
        let s = exact_latency_scenario();
        let result = run_scenario(&s).unwrap();
        assert_eq!(result.blocks[0].confirmation_micros, Some(11_010_000));

        let first = Scenario { network_threshold: 0.05, ..exact_latency_scenario() };
        let result = run_scenario(&first).unwrap();
        assert_eq!(result.blocks[0].confirmation_micros, Some(3_670_000));
    }

    #[test]
    fn threshold_rank_handles_float_dust() {
        assert_eq!(threshold_rank(1.0, 20), 20);
        assert_eq!(threshold_rank(0.05, 20), 1);
        assert_eq!(threshold_rank(0.5, 20), 10);
        assert_eq!(threshold_rank(0.51, 20), 11);
        assert_eq!(threshold_rank(0.001, 20), 1);
    }

    #[test]
    fn zero_error_rates_commit_everything() {
        let s = Scenario { block_count: 25, ..Scenario::default_scenario() };
        let result = run_scenario(&s).unwrap();
        assert_eq!(result.committed_blocks(), 25);
        assert_eq!(result.reads.len(), 25);
    }

    #[test]
    fn identical_seeds_identical_results() {
        let s = Scenario {
            block_count: 12,
            error_rates: [0.05, 0.05, 0.05],
            rng_seed: 9,
            ..Scenario::default_scenario()
        };
        let a = run_scenario(&s).unwrap();
        let b = run_scenario(&s).unwrap();
        assert_eq!(a, b);
        let c = run_scenario(&Scenario { rng_seed: 10, ..s }).unwrap();
        assert_ne!(a.chain.blocks(), c.chain.blocks(), "seed must steer the run");
    }

    #[test]
    fn conservation_and_single_failure_class() {
        let s = Scenario {
            block_count: 100,
            error_rates: [0.1, 0.1, 0.1],
            rng_seed: 3,
            ..Scenario::default_scenario()
        };
        let result = run_scenario(&s).unwrap();
        let committed = result.committed_blocks();
        let failed = result.blocks.iter().filter(|b| matches!(b.status, BlockStatus::Failed(_))).count();
        assert_eq!(committed + failed, 100);
        // systematic schedule: failures within one of 100 * 0.3
        assert!((29..=31).contains(&failed), "failed = {failed}");
        for b in &result.blocks {
            if let BlockStatus::Failed(_) = b.status {
                assert!(b.commit_micros.is_empty());
                assert_eq!(b.confirmation_micros, None);
            }
        }
    }

    #[test]
    fn every_failure_class_mechanizes() {
        for (rates, class) in [
            ([1.0, 0.0, 0.0], FailureClass::Consensus),
            ([0.0, 1.0, 0.0], FailureClass::Syntax),
            ([0.0, 0.0, 1.0], FailureClass::Version),
        ] {
            let s = Scenario {
                block_count: 5,
                error_rates: rates,
                ..Scenario::default_scenario()
            };
            let result = run_scenario(&s).unwrap();
            assert_eq!(result.committed_blocks(), 0);
            for b in &result.blocks {
                assert_eq!(b.status, BlockStatus::Failed(class), "rates {rates:?}");
            }
        }
    }

    #[test]
    fn causality_and_sorted_event_log() {
        let s = Scenario {
            block_count: 8,
            error_rates: [0.1, 0.0, 0.1],
            ..Scenario::default_scenario()
        };
        let result = run_scenario(&s).unwrap();
        for b in &result.blocks {
            for &t in &b.commit_micros {
                assert!(t >= b.submit_micros);
            }
        }
        for pair in result.events.windows(2) {
            assert!(pair[0].time_micros <= pair[1].time_micros);
        }
    }

    #[test]
    fn simulated_ledger_validates() {
        let s = Scenario {
            block_count: 30,
            error_rates: [0.05, 0.05, 0.05],
            rng_seed: 7,
            ..Scenario::default_scenario()
        };
        let result = run_scenario(&s).unwrap();
        assert_eq!(validate_chain(&result.chain), ChainVerdict::Valid);
        assert_eq!(result.chain.len(), 2 + result.committed_blocks());
    }

    #[test]
    fn pipeline_times_follow_the_cost_model() {
        // 100 tx * 200 B * 8 bits = 160000 bits over 120 kbps
        let s = Scenario { block_count: 3, endorser_count: 1, ..Scenario::default_scenario() };
        let result = run_scenario(&s).unwrap();
        let expected_service = 1_333_334u64;
        for (i, b) in result.blocks.iter().enumerate() {
            assert_eq!(b.finish_micros, Some(expected_service * (i as u64 + 1)));
        }
        // contention adds per-endorser cost
        let s6 = Scenario { block_count: 1, ..Scenario::default_scenario() };
        let r6 = run_scenario(&s6).unwrap();
        assert_eq!(r6.blocks[0].finish_micros, Some(expected_service + 5 * 3_714));
        // congestion kicks in past the knee
        let s_knee = Scenario {
            block_count: 1,
            endorser_count: 1,
            tx_per_block: 601,
            ..Scenario::default_scenario()
        };
        let r = run_scenario(&s_knee).unwrap();
        let ser = (601u64 * 200 * 8 * 1_000_000).div_ceil(120_000);
        assert_eq!(r.blocks[0].finish_micros, Some(ser + 25_000));
    }

    #[test]
    fn read_times_follow_the_lookup_model() {
        let s = Scenario { block_count: 4, endorser_count: 1, link_rate: 0, ..Scenario::default_scenario() };
        let result = run_scenario(&s).unwrap();
        for (i, read) in result.reads.iter().enumerate() {
            let lookup = (READ_LOOKUP_MICROS as f64 * ((3 + i) as f64).ln()).round() as u64;
            assert_eq!(read.response_micros, read.submit_micros + lookup);
        }
    }

    #[test]
    fn jitter_stays_within_band_and_is_deterministic() {
        let s = exact_latency_scenario();
        let opts = SimOptions { jitter_fraction: Some(0.10), contention_micros: None };
        let a = run_scenario_with(&s, opts).unwrap();
        let b = run_scenario_with(&s, opts).unwrap();
        assert_eq!(a, b);
        let base = &s.commit_delays_micros;
        let jittered = &a.blocks[0].commit_micros;
        let mut moved = 0;
        for (j, &t) in jittered.iter().enumerate() {
            let d = t as f64;
            assert!(d >= base[j] as f64 * 0.899 && d <= base[j] as f64 * 1.101, "node {j}");
            if t != base[j] {
                moved += 1;
            }
        }
        assert!(moved > 10, "jitter should actually move most delays");
    }

    #[test]
    fn calibration_matches_the_success_table() {
        let expect = [
            (10, 0.0),
            (50, 0.0),
            (60, 0.10),
            (70, 0.13),
            (80, 0.40),
            (90, 0.50),
            (100, 0.52),
            (200, 0.52),
        ];
        for (blocks, deficit_pp) in expect {
            let rates = calibrated_error_rates(blocks);
            let total = rates.iter().sum::<f64>() * 100.0;
            assert!((total - deficit_pp).abs() < 1e-9, "blocks {blocks}: {total} vs {deficit_pp}");
            assert!((rates[0] - rates[1]).abs() < 1e-12 && (rates[1] - rates[2]).abs() < 1e-12);
        }
        // interpolation between rows
        let mid = calibrated_error_rates(65).iter().sum::<f64>() * 100.0;
        assert!((mid - 0.115).abs() < 1e-9);
    }

    #[test]
    fn systematic_schedule_marginals() {
        // failure count is floor or ceil of B * p for every seed
        for seed in 0..50u64 {
            let schedule = FailureSchedule::new(seed, [0.004, 0.004, 0.004]);
            let fails = (0..100).filter(|&k| schedule.fails(k)).count();
            assert!(fails == 1 || fails == 2, "seed {seed}: {fails}");
        }
        // and the ensemble mean approaches B * p
        let total: usize = (0..1000u64)
            .map(|seed| {
                let schedule = FailureSchedule::new(seed, [0.004, 0.004, 0.004]);
                (0..100).filter(|&k| schedule.fails(k)).count()
            })
            .sum();
        let mean = total as f64 / 1000.0;
        assert!((mean - 1.2).abs() < 0.05, "mean failures {mean}");
    }
}
