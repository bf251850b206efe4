//! Protocol hash functions over the compression hash, separated by a leading
//! domain tag so the three transcript roles can never alias each other.

use crate::algebra::{GroupElement, GroupScalar};

use super::lash::lash_compress;
use super::{Digest, HashError};

/// mask-seed derivation (plaintext hiding)
pub const TAG_MASK_SEED: u8 = 0x01;
/// signature binding over ciphertext body and receiver set
pub const TAG_BINDING: u8 = 0x02;
/// per-receiver key wrap
pub const TAG_KEY_WRAP: u8 = 0x03;
/// counter-mode mask expansion
pub const TAG_MASK_EXPAND: u8 = 0x04;
/// pseudo-identity derivation
pub const TAG_PSEUDO_ID: u8 = 0x05;
/// partial-key derivation from a serialized basis
pub const TAG_PARTIAL_KEY: u8 = 0x06;

/// width of mask seeds and key-wrap strings, in bits
pub const MASK_SEED_BITS: usize = 256;

/// Digest of `payload` under a single-byte domain tag.
pub fn tagged_digest(tag: u8, payload: &[u8]) -> Digest {
    let mut input = Vec::with_capacity(1 + payload.len());
    input.push(tag);
    input.extend_from_slice(payload);
    lash_compress(&input)
}

/// Mask seed for a session element: 256-bit digest of its encoding.
pub fn h1(r: &GroupElement) -> Digest {
    tagged_digest(TAG_MASK_SEED, &r.encode())
}

/// Binding scalar over the masked body, the session point, and the ordered
/// receiver list. Any permutation of the receivers changes the output.
pub fn h2(
    y: &[u8],
    t: &GroupElement,
    receivers: &[GroupElement],
) -> Result<GroupScalar, HashError> {
    if receivers.is_empty() {
        return Err(HashError::EmptyReceiverList);
    }
    let params = t.params();
    if receivers.iter().any(|r| r.params() != params) {
        return Err(HashError::GroupMismatch);
    }
    let mut payload = Vec::with_capacity(4 + y.len() + 8 + 2 + 8 * receivers.len());
    payload.extend_from_slice(&(y.len() as u32).to_be_bytes());
    payload.extend_from_slice(y);
    payload.extend_from_slice(&t.encode());
    payload.extend_from_slice(&(receivers.len() as u16).to_be_bytes());
    for r in receivers {
        payload.extend_from_slice(&r.encode());
    }
    let digest = tagged_digest(TAG_BINDING, &payload);
    let wide = u128::from_le_bytes(digest.as_bytes()[..16].try_into().expect("digest width"));
    Ok(GroupScalar::from_wide(params, wide))
}

/// Key-wrap string for one receiver: digest over the session point, the
/// receiver key, and the shared point only that receiver can recompute.
pub fn h3(
    t: &GroupElement,
    receiver: &GroupElement,
    shared: &GroupElement,
) -> Result<Digest, HashError> {
    if receiver.params() != t.params() || shared.params() != t.params() {
        return Err(HashError::GroupMismatch);
    }
    let mut payload = Vec::with_capacity(24);
    payload.extend_from_slice(&t.encode());
    payload.extend_from_slice(&receiver.encode());
    payload.extend_from_slice(&shared.encode());
    Ok(tagged_digest(TAG_KEY_WRAP, &payload))
}

/// Counter-mode expansion of a digest into `bits` mask bits. Prefix-stable:
/// a shorter request is a prefix of any longer one for the same seed. Unused
/// bits of the final byte are zero.
pub fn expand_mask(seed: &Digest, bits: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(bits.div_ceil(8));
    let mut counter = 0u64;
    while out.len() * 8 < bits {
        let mut payload = Vec::with_capacity(seed.as_bytes().len() + 8);
        payload.extend_from_slice(seed.as_bytes());
        payload.extend_from_slice(&counter.to_le_bytes());
        out.extend_from_slice(tagged_digest(TAG_MASK_EXPAND, &payload).as_bytes());
        counter += 1;
    }
    out.truncate(bits.div_ceil(8));
    if bits % 8 != 0 {
        let keep = bits % 8;
        if let Some(last) = out.last_mut() {
            *last &= (1u8 << keep) - 1;
        }
    }
    out
}
