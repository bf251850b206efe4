//! Compression hash and the domain-separated protocol hashes built on it.

pub mod lash;
pub mod protocol;

pub use lash::{
    lash_compress, HashParams, Lash, LASH_COLS, LASH_MODULUS, LASH_OUTPUT_BITS, LASH_ROWS,
};
pub use protocol::{expand_mask, h1, h2, h3, tagged_digest, MASK_SEED_BITS};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Hash output. Displayed and serialized as lowercase hex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest(Vec<u8>);

impl Digest {
    pub fn new(bytes: Vec<u8>) -> Self {
        Self(bytes)
    }

    /// the all-zero 256-bit digest, reserved for genesis bookkeeping
    pub fn zero() -> Self {
        Self(vec![0u8; LASH_OUTPUT_BITS / 8])
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, HashError> {
        hex::decode(s)
            .map(Self)
            .map_err(|_| HashError::MalformedHex)
    }
}

impl std::fmt::Debug for Digest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl std::fmt::Display for Digest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Digest::from_hex(&s).map_err(D::Error::custom)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum HashError {
    #[error("invalid hash parameters: {0}")]
    InvalidParams(&'static str),
    #[error("receiver list must be nonempty")]
    EmptyReceiverList,
    #[error("group elements from different instances")]
    GroupMismatch,
    #[error("malformed hex digest")]
    MalformedHex,
}
