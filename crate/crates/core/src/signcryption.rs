//! Multi-receiver signcryption over the pairing group.
//!
//! A sender addresses one ciphertext to N receivers: the message is masked
//! once under a random group element R, and R is wrapped separately for each
//! receiver under a Diffie-Hellman shared secret. The signature w binds the
//! masked message, the ephemeral point, and the receiver list through the
//! binding scalar; endorsers can check it without decrypting.

use crate::algebra::{pairing_eval, seeded_rng, GroupElement, GroupParams, GroupScalar};
use crate::hashing::{expand_mask, h1, h2, h3, Digest, HashError};
use crate::identity::KeyPair;

use rand_chacha::rand_core::RngCore;

/// wire format version; decode rejects anything else
const WIRE_VERSION: u8 = 1;

/// key wraps carry an 8-byte element padded to the hash width, so the unwrap
/// side can reject garbage by its 24 zero bytes
const WRAP_BYTES: usize = 32;

/// Message content: opaque product info, the initiator's pseudo-identity,
/// and the initiator's public key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plaintext {
    product_info: Vec<u8>,
    initiator_id: Digest,
    initiator_pub: GroupElement,
}

impl Plaintext {
    pub fn new(
        product_info: Vec<u8>,
        initiator_id: Digest,
        initiator_pub: GroupElement,
    ) -> Result<Self, SigncryptError> {
        if product_info.is_empty() {
            return Err(SigncryptError::EmptyProductInfo);
        }
        Ok(Self { product_info, initiator_id, initiator_pub })
    }

    pub fn product_info(&self) -> &[u8] {
        &self.product_info
    }

    pub fn initiator_id(&self) -> &Digest {
        &self.initiator_id
    }

    pub fn initiator_pub(&self) -> GroupElement {
        self.initiator_pub
    }

    /// canonical serialization: u32 BE info length, info, identity digest,
    /// initiator key
    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + self.product_info.len() + 40);
        out.extend_from_slice(&(self.product_info.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.product_info);
        out.extend_from_slice(self.initiator_id.as_bytes());
        out.extend_from_slice(&self.initiator_pub.encode());
        out
    }

    /// strict inverse of serialize: the length field must account for every
    /// byte, so a wrong mask survives with probability about 2^-32
    pub fn deserialize(params: GroupParams, bytes: &[u8]) -> Result<Self, SigncryptError> {
        if bytes.len() < 4 + 1 + 32 + 8 {
            return Err(SigncryptError::PlaintextInvalid);
        }
        let len = u32::from_be_bytes(bytes[..4].try_into().unwrap()) as usize;
        if bytes.len() != 4 + len + 32 + 8 || len == 0 {
            return Err(SigncryptError::PlaintextInvalid);
        }
        let product_info = bytes[4..4 + len].to_vec();
        let initiator_id = Digest::new(bytes[4 + len..4 + len + 32].to_vec());
        let initiator_pub = GroupElement::decode(params, &bytes[4 + len + 32..])
            .map_err(|_| SigncryptError::PlaintextInvalid)?;
        Ok(Self { product_info, initiator_id, initiator_pub })
    }
}

/// Signcrypted transcript c = (t, y, w, z).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    pub(crate) t: GroupElement,
    pub(crate) y: Vec<u8>,
    pub(crate) w: GroupElement,
    pub(crate) z: Vec<[u8; WRAP_BYTES]>,
}

impl Ciphertext {
    pub fn t(&self) -> GroupElement {
        self.t
    }

    pub fn y(&self) -> &[u8] {
        &self.y
    }

    pub fn w(&self) -> GroupElement {
        self.w
    }

    pub fn receiver_count(&self) -> usize {
        self.z.len()
    }

    /// version ‖ t ‖ u32 BE |y| ‖ y ‖ w ‖ u16 BE N ‖ z_1..z_N
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(23 + self.y.len() + WRAP_BYTES * self.z.len());
        out.push(WIRE_VERSION);
        out.extend_from_slice(&self.t.encode());
        out.extend_from_slice(&(self.y.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.y);
        out.extend_from_slice(&self.w.encode());
        out.extend_from_slice(&(self.z.len() as u16).to_be_bytes());
        for wrap in &self.z {
            out.extend_from_slice(wrap);
        }
        out
    }

    pub fn decode(params: GroupParams, bytes: &[u8]) -> Result<Self, SigncryptError> {
        let mut at = 0usize;
        let take = |at: &mut usize, n: usize| -> Result<&[u8], SigncryptError> {
            let end = at.checked_add(n).ok_or(SigncryptError::Truncated)?;
            if end > bytes.len() {
                return Err(SigncryptError::Truncated);
            }
            let slice = &bytes[*at..end];
            *at = end;
            Ok(slice)
        };
        let version = take(&mut at, 1)?[0];
        if version != WIRE_VERSION {
            return Err(SigncryptError::UnsupportedVersion(version));
        }
        let t = GroupElement::decode(params, take(&mut at, 8)?)?;
        let y_len = u32::from_be_bytes(take(&mut at, 4)?.try_into().unwrap()) as usize;
        let y = take(&mut at, y_len)?.to_vec();
        let w = GroupElement::decode(params, take(&mut at, 8)?)?;
        let n = u16::from_be_bytes(take(&mut at, 2)?.try_into().unwrap()) as usize;
        if n == 0 {
            return Err(SigncryptError::EmptyReceivers);
        }
        let mut z = Vec::with_capacity(n);
        for _ in 0..n {
            z.push(take(&mut at, WRAP_BYTES)?.try_into().unwrap());
        }
        if at != bytes.len() {
            return Err(SigncryptError::TrailingBytes);
        }
        Ok(Self { t, y, w, z })
    }
}

/// uniform draw via rejection; modulo alone would skew the low residues
fn random_scalar<R: RngCore>(rng: &mut R, params: GroupParams) -> GroupScalar {
    let order = params.order;
    let bound = u64::MAX - u64::MAX % order;
    loop {
        let v = rng.next_u64();
        if v < bound {
            return GroupScalar::new(params, v % order);
        }
    }
}

fn random_nonzero_scalar<R: RngCore>(rng: &mut R, params: GroupParams) -> GroupScalar {
    loop {
        let s = random_scalar(rng, params);
        if !s.is_zero() {
            return s;
        }
    }
}

fn wrap_mask(
    t: &GroupElement,
    receiver: &GroupElement,
    shared: &GroupElement,
) -> Result<[u8; WRAP_BYTES], SigncryptError> {
    let digest = h3(t, receiver, shared)?;
    Ok(digest.as_bytes().try_into().expect("key-wrap digest width"))
}

/// Signcrypt one plaintext for every listed receiver. The whole transcript
/// is a deterministic function of the arguments; callers own freshness by
/// supplying a fresh rng_seed.
pub fn signcrypt(
    sender: &KeyPair,
    receivers: &[GroupElement],
    m: &Plaintext,
    rng_seed: &[u8],
) -> Result<Ciphertext, SigncryptError> {
    if receivers.is_empty() {
        return Err(SigncryptError::EmptyReceivers);
    }
    let params = sender.public().params();
    let mut rng = seeded_rng(b"signcrypt", rng_seed);
    let r = random_nonzero_scalar(&mut rng, params);
    let hidden = GroupElement::generator(params).scalar_mul(&random_nonzero_scalar(&mut rng, params));
    let t = GroupElement::generator(params).scalar_mul(&r);

    let serialized = m.serialize();
    let mask = expand_mask(&h1(&hidden), serialized.len() * 8);
    let y: Vec<u8> = serialized.iter().zip(&mask).map(|(a, b)| a ^ b).collect();

    let h = h2(&y, &t, receivers)?;
    let w = GroupElement::generator(params).scalar_mul(&sender.private().mul(&h));

    let mut padded = [0u8; WRAP_BYTES];
    padded[..8].copy_from_slice(&hidden.encode());
    let mut z = Vec::with_capacity(receivers.len());
    for receiver in receivers {
        let shared = receiver.scalar_mul(&r);
        let mask = wrap_mask(&t, receiver, &shared)?;
        let mut wrap = [0u8; WRAP_BYTES];
        for (o, (a, b)) in wrap.iter_mut().zip(padded.iter().zip(&mask)) {
            *o = a ^ b;
        }
        z.push(wrap);
    }
    Ok(Ciphertext { t, y, w, z })
}

fn signature_holds(
    sender_pub: &GroupElement,
    receivers: &[GroupElement],
    c: &Ciphertext,
) -> Result<bool, SigncryptError> {
    let params = sender_pub.params();
    let h = h2(&c.y, &c.t, receivers)?;
    let lhs = pairing_eval(&GroupElement::generator(params), &c.w)?;
    let rhs = pairing_eval(sender_pub, &GroupElement::generator(params).scalar_mul(&h))?;
    Ok(lhs == rhs)
}

/// Signature check alone, for parties that hold no receiver key. Malformed
/// input verifies as false rather than erroring.
pub fn verify_only(sender_pub: &GroupElement, receivers: &[GroupElement], c: &Ciphertext) -> bool {
    signature_holds(sender_pub, receivers, c).unwrap_or(false)
}

/// Verify and decrypt as receiver `receiver_index`. Rejections are typed:
/// a failed pairing check, a key wrap that does not unwrap to a padded
/// element, and a plaintext that does not deserialize are distinct errors.
pub fn unsigncrypt(
    receiver_index: usize,
    receiver: &KeyPair,
    sender_pub: &GroupElement,
    receivers: &[GroupElement],
    c: &Ciphertext,
) -> Result<Plaintext, SigncryptError> {
    if receivers.len() != c.z.len() {
        return Err(SigncryptError::ReceiverCountMismatch { expected: c.z.len(), got: receivers.len() });
    }
    let Some(own_pub) = receivers.get(receiver_index) else {
        return Err(SigncryptError::ReceiverIndexOutOfRange {
            index: receiver_index,
            count: receivers.len(),
        });
    };
    if *own_pub != receiver.public() {
        return Err(SigncryptError::ReceiverKeyMismatch);
    }
    if !signature_holds(sender_pub, receivers, c)? {
        return Err(SigncryptError::SignatureInvalid);
    }

    let shared = c.t.scalar_mul(&receiver.private());
    let mask = wrap_mask(&c.t, own_pub, &shared)?;
    let mut padded = [0u8; WRAP_BYTES];
    for (o, (a, b)) in padded.iter_mut().zip(c.z[receiver_index].iter().zip(&mask)) {
        *o = a ^ b;
    }
    // the signature does not cover z, so the zero padding and the strict
    // element decode are what reject a tampered wrap
    if padded[8..].iter().any(|&b| b != 0) {
        return Err(SigncryptError::KeyWrapInvalid);
    }
    let hidden = GroupElement::decode(sender_pub.params(), &padded[..8])
        .map_err(|_| SigncryptError::KeyWrapInvalid)?;

    let mask = expand_mask(&h1(&hidden), c.y.len() * 8);
    let serialized: Vec<u8> = c.y.iter().zip(&mask).map(|(a, b)| a ^ b).collect();
    Plaintext::deserialize(sender_pub.params(), &serialized)
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SigncryptError {
    #[error("receiver list must be nonempty")]
    EmptyReceivers,
    #[error("product info must be nonempty")]
    EmptyProductInfo,
    #[error("receiver index {index} out of range for {count} receivers")]
    ReceiverIndexOutOfRange { index: usize, count: usize },
    #[error("receiver list has {got} keys but ciphertext carries {expected} wraps")]
    ReceiverCountMismatch { expected: usize, got: usize },
    #[error("receiver key does not match the indexed receiver")]
    ReceiverKeyMismatch,
    #[error("signature verification failed")]
    SignatureInvalid,
    #[error("key wrap failed to unwrap")]
    KeyWrapInvalid,
    #[error("plaintext failed to deserialize")]
    PlaintextInvalid,
    #[error("unsupported ciphertext version {0}")]
    UnsupportedVersion(u8),
    #[error("ciphertext truncated")]
    Truncated,
    #[error("ciphertext carries trailing bytes")]
    TrailingBytes,
    #[error(transparent)]
    Hash(#[from] HashError),
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
}
