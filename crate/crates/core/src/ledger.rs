//! The product-block chain: block construction, hash linking, genesis
//! bootstrap, validation, and the append-only file format.
//!
//! Timestamps are simulated time in integer microseconds, so canonical
//! serialization never touches floating point.

use std::io::{Read, Write};

use crate::hashing::{lash_compress, Digest};
use crate::identity::{
    DocumentType, ProofMetrics, StakeholderRole, StakeholderWallet, WalletRegistry,
};
use crate::signcryption::{Ciphertext, SigncryptError};
use crate::algebra::{GroupElement, GroupParams};

const FILE_MAGIC: &[u8; 4] = b"PRDC";
const FILE_VERSION: u8 = 1;

/// One ledger entry. The hash covers every other field, so any byte of the
/// header or payload is tamper-evident.
#[derive(Debug, Clone, PartialEq)]
pub struct Prodblock {
    pub(crate) height: u64,
    pub(crate) prev_hash: Digest,
    pub(crate) timestamp_micros: u64,
    pub(crate) initiator: Digest,
    pub(crate) payload: Ciphertext,
    pub(crate) block_hash: Digest,
}

impl Prodblock {
    pub fn height(&self) -> u64 {
        self.height
    }

    pub fn prev_hash(&self) -> &Digest {
        &self.prev_hash
    }

    pub fn timestamp_micros(&self) -> u64 {
        self.timestamp_micros
    }

    pub fn initiator(&self) -> &Digest {
        &self.initiator
    }

    pub fn payload(&self) -> &Ciphertext {
        &self.payload
    }

    pub fn block_hash(&self) -> &Digest {
        &self.block_hash
    }

    /// everything the block hash covers, in fixed order
    fn canonical_bytes(&self) -> Vec<u8> {
        let payload = self.payload.encode();
        let mut out = Vec::with_capacity(84 + payload.len());
        out.extend_from_slice(&self.height.to_be_bytes());
        out.extend_from_slice(self.prev_hash.as_bytes());
        out.extend_from_slice(&self.timestamp_micros.to_be_bytes());
        out.extend_from_slice(self.initiator.as_bytes());
        out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&payload);
        out
    }

    fn compute_hash(&self) -> Digest {
        lash_compress(&self.canonical_bytes())
    }

    /// wire encoding: canonical bytes followed by the block hash
    pub fn encode(&self) -> Vec<u8> {
        let mut out = self.canonical_bytes();
        out.extend_from_slice(self.block_hash.as_bytes());
        out
    }

    pub fn decode(params: GroupParams, bytes: &[u8]) -> Result<Self, LedgerError> {
        if bytes.len() < 84 + 32 {
            return Err(LedgerError::Truncated);
        }
        let height = u64::from_be_bytes(bytes[0..8].try_into().unwrap());
        let prev_hash = Digest::new(bytes[8..40].to_vec());
        let timestamp_micros = u64::from_be_bytes(bytes[40..48].try_into().unwrap());
        let initiator = Digest::new(bytes[48..80].to_vec());
        let payload_len = u32::from_be_bytes(bytes[80..84].try_into().unwrap()) as usize;
        if bytes.len() != 84 + payload_len + 32 {
            return Err(LedgerError::Truncated);
        }
        let payload = Ciphertext::decode(params, &bytes[84..84 + payload_len])?;
        let block_hash = Digest::new(bytes[84 + payload_len..].to_vec());
        Ok(Self { height, prev_hash, timestamp_micros, initiator, payload, block_hash })
    }
}

/// all-zero values inside a well-formed transcript; hashes deterministically
fn genesis_payload(params: GroupParams) -> Ciphertext {
    Ciphertext {
        t: GroupElement::identity(params),
        y: Vec::new(),
        w: GroupElement::identity(params),
        z: vec![[0u8; 32]],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainVerdict {
    Valid,
    FirstBadIndex(usize),
}

/// The chain plus the registry that gates who may initiate blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    blocks: Vec<Prodblock>,
    registry: WalletRegistry,
    params: GroupParams,
}

impl Chain {
    /// Two fixed genesis blocks under a reserved all-zero initiator, plus
    /// three virtual organization accounts in the registry.
    pub fn genesis() -> Chain {
        let params = GroupParams::default_params();
        let mut registry = WalletRegistry::new();
        for (n, role) in [
            StakeholderRole::Supplier,
            StakeholderRole::Manufacturer,
            StakeholderRole::Distributor,
        ]
        .iter()
        .enumerate()
        {
            let pm = ProofMetrics::new(
                DocumentType::TradeLicense,
                format!("genesis organization account {}", n + 1).into_bytes(),
                *role,
            );
            registry.register(&pm).expect("genesis credentials are distinct");
        }

        let mut blocks: Vec<Prodblock> = Vec::with_capacity(2);
        for height in 0..2u64 {
            let prev_hash = match blocks.last() {
                Some(prev) => prev.block_hash.clone(),
                None => Digest::zero(),
            };
            let mut block = Prodblock {
                height,
                prev_hash,
                timestamp_micros: 0,
                initiator: Digest::zero(),
                payload: genesis_payload(params),
                block_hash: Digest::zero(),
            };
            block.block_hash = block.compute_hash();
            blocks.push(block);
        }
        Chain { blocks, registry, params }
    }

    pub fn blocks(&self) -> &[Prodblock] {
        &self.blocks
    }

    pub fn tip(&self) -> &Prodblock {
        self.blocks.last().expect("chain holds at least the genesis blocks")
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn registry(&self) -> &WalletRegistry {
        &self.registry
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    /// Register a stakeholder so they may initiate blocks.
    pub fn register(&mut self, pm: &ProofMetrics) -> Result<&StakeholderWallet, LedgerError> {
        self.registry.register(pm).map_err(LedgerError::Identity)
    }

    /// Build the next block on the current tip without appending it.
    pub fn build_block(
        &self,
        initiator: &StakeholderWallet,
        payload: Ciphertext,
        timestamp_micros: u64,
    ) -> Result<Prodblock, LedgerError> {
        if !self.registry.contains(&initiator.pseudo_id) {
            return Err(LedgerError::UnregisteredInitiator(initiator.pseudo_id.to_hex()));
        }
        let tip = self.tip();
        if timestamp_micros < tip.timestamp_micros {
            return Err(LedgerError::TimestampRegression {
                tip: tip.timestamp_micros,
                got: timestamp_micros,
            });
        }
        let mut block = Prodblock {
            height: tip.height + 1,
            prev_hash: tip.block_hash.clone(),
            timestamp_micros,
            initiator: initiator.pseudo_id.clone(),
            payload,
            block_hash: Digest::zero(),
        };
        block.block_hash = block.compute_hash();
        Ok(block)
    }

    /// Append a block that links to the current tip. The error names the
    /// field that failed.
    pub fn append(&mut self, block: Prodblock) -> Result<(), LedgerError> {
        let tip = self.tip();
        if block.height != tip.height + 1 {
            return Err(LedgerError::HeightMismatch { expected: tip.height + 1, got: block.height });
        }
        if block.prev_hash != tip.block_hash {
            return Err(LedgerError::PrevHashMismatch);
        }
        if block.compute_hash() != block.block_hash {
            return Err(LedgerError::HashMismatch);
        }
        self.blocks.push(block);
        Ok(())
    }
}

/// Walk the whole chain and report the first index whose height, link, or
/// hash fails to check out.
pub fn validate_chain(chain: &Chain) -> ChainVerdict {
    for (i, block) in chain.blocks.iter().enumerate() {
        let expected_prev = if i == 0 {
            Digest::zero()
        } else {
            chain.blocks[i - 1].block_hash.clone()
        };
        if block.height != i as u64
            || block.prev_hash != expected_prev
            || block.compute_hash() != block.block_hash
        {
            return ChainVerdict::FirstBadIndex(i);
        }
    }
    ChainVerdict::Valid
}

/// Write the chain as magic, version, then length-prefixed block encodings.
/// The registry is not part of the file.
pub fn save_chain(chain: &Chain, out: &mut impl Write) -> std::io::Result<()> {
    out.write_all(FILE_MAGIC)?;
    out.write_all(&[FILE_VERSION])?;
    for block in &chain.blocks {
        let bytes = block.encode();
        out.write_all(&(bytes.len() as u32).to_be_bytes())?;
        out.write_all(&bytes)?;
    }
    Ok(())
}

/// Read a chain file back. Blocks round-trip byte-exactly; the registry is
/// reset to the genesis organizations.
pub fn load_chain(input: &mut impl Read) -> Result<Chain, LedgerError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() < 5 || &bytes[..4] != FILE_MAGIC {
        return Err(LedgerError::BadMagic);
    }
    if bytes[4] != FILE_VERSION {
        return Err(LedgerError::UnsupportedFileVersion(bytes[4]));
    }
    let params = GroupParams::default_params();
    let mut blocks = Vec::new();
    let mut at = 5usize;
    while at < bytes.len() {
        if at + 4 > bytes.len() {
            return Err(LedgerError::Truncated);
        }
        let len = u32::from_be_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
        at += 4;
        if at + len > bytes.len() {
            return Err(LedgerError::Truncated);
        }
        blocks.push(Prodblock::decode(params, &bytes[at..at + len])?);
        at += len;
    }
    if blocks.is_empty() {
        return Err(LedgerError::EmptyFile);
    }
    let registry = Chain::genesis().registry;
    Ok(Chain { blocks, registry, params })
}

#[derive(Debug, thiserror::Error)]
pub enum LedgerError {
    #[error("initiator {0} is not registered")]
    UnregisteredInitiator(String),
    #[error("timestamp regressed: tip at {tip} microseconds, block at {got}")]
    TimestampRegression { tip: u64, got: u64 },
    #[error("height mismatch: expected {expected}, block carries {got}")]
    HeightMismatch { expected: u64, got: u64 },
    #[error("prev_hash does not match the tip block hash")]
    PrevHashMismatch,
    #[error("block_hash does not match the block contents")]
    HashMismatch,
    #[error("ledger file lacks the expected magic bytes")]
    BadMagic,
    #[error("unsupported ledger file version {0}")]
    UnsupportedFileVersion(u8),
    #[error("ledger data truncated")]
    Truncated,
    #[error("ledger file holds no blocks")]
    EmptyFile,
    #[error(transparent)]
    Payload(#[from] SigncryptError),
    #[error(transparent)]
    Identity(#[from] crate::identity::IdentityError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
