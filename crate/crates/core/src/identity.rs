//! Stakeholder registration: credential validation, pseudo-identities, and
//! key material derived deterministically from credential bytes.
//!
//! The operative keypair lives in the pairing group. The ring-layer noise
//! product survives only as `key_commitment` on the wallet, an auxiliary
//! binding value that verification never reads.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::algebra::ring::seeded_rng;
use crate::algebra::{
    generate_basis as basis_from_seed, ring_add, ring_mul, sample_small, GroupElement,
    GroupParams, GroupScalar, LatticeBasis, RingElement, RingParams, BASIS_DIM,
};
use crate::hashing::protocol::{TAG_PARTIAL_KEY, TAG_PSEUDO_ID};
use crate::hashing::{tagged_digest, Digest};

use rand_chacha::rand_core::RngCore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum DocumentType {
    TradeLicense,
    NationalId,
    InternationalId,
}

impl DocumentType {
    fn tag(&self) -> u8 {
        match self {
            DocumentType::TradeLicense => 1,
            DocumentType::NationalId => 2,
            DocumentType::InternationalId => 3,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DocumentType::TradeLicense => "trade-license",
            DocumentType::NationalId => "national-id",
            DocumentType::InternationalId => "international-id",
        }
    }
}

impl FromStr for DocumentType {
    type Err = IdentityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trade-license" => Ok(DocumentType::TradeLicense),
            "national-id" => Ok(DocumentType::NationalId),
            "international-id" => Ok(DocumentType::InternationalId),
            other => Err(IdentityError::UnknownDocumentType(other.to_string())),
        }
    }
}

impl std::fmt::Display for DocumentType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum StakeholderRole {
    Supplier,
    Manufacturer,
    Distributor,
    Retailer,
    Customer,
    Logistics,
}

impl StakeholderRole {
    fn tag(&self) -> u8 {
        match self {
            StakeholderRole::Supplier => 1,
            StakeholderRole::Manufacturer => 2,
            StakeholderRole::Distributor => 3,
            StakeholderRole::Retailer => 4,
            StakeholderRole::Customer => 5,
            StakeholderRole::Logistics => 6,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            StakeholderRole::Supplier => "supplier",
            StakeholderRole::Manufacturer => "manufacturer",
            StakeholderRole::Distributor => "distributor",
            StakeholderRole::Retailer => "retailer",
            StakeholderRole::Customer => "customer",
            StakeholderRole::Logistics => "logistics",
        }
    }

    pub fn all() -> [StakeholderRole; 6] {
        [
            StakeholderRole::Supplier,
            StakeholderRole::Manufacturer,
            StakeholderRole::Distributor,
            StakeholderRole::Retailer,
            StakeholderRole::Customer,
            StakeholderRole::Logistics,
        ]
    }
}

impl FromStr for StakeholderRole {
    type Err = IdentityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "supplier" => Ok(StakeholderRole::Supplier),
            "manufacturer" => Ok(StakeholderRole::Manufacturer),
            "distributor" => Ok(StakeholderRole::Distributor),
            "retailer" => Ok(StakeholderRole::Retailer),
            "customer" => Ok(StakeholderRole::Customer),
            "logistics" => Ok(StakeholderRole::Logistics),
            other => Err(IdentityError::UnknownRole(other.to_string())),
        }
    }
}

impl std::fmt::Display for StakeholderRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Registration credentials: a typed identity document plus the role the
/// stakeholder will hold in the product chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofMetrics {
    pub document_type: DocumentType,
    pub document: Vec<u8>,
    pub role: StakeholderRole,
}

impl ProofMetrics {
    pub fn new(document_type: DocumentType, document: Vec<u8>, role: StakeholderRole) -> Self {
        Self { document_type, document, role }
    }

    /// injective serialization feeding every derivation below
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(6 + self.document.len());
        out.push(self.document_type.tag());
        out.push(self.role.tag());
        out.extend_from_slice(&(self.document.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.document);
        out
    }
}

/// Credentials are acceptable when the document is nonempty; the enums keep
/// type and role inside their closed sets by construction.
pub fn validate_credentials(pm: &ProofMetrics) -> Result<(), IdentityError> {
    if pm.document.is_empty() {
        return Err(IdentityError::EmptyDocument);
    }
    Ok(())
}

/// Full-rank basis derived from validated credentials; equal credentials
/// yield the identical basis.
pub fn generate_basis(pm: &ProofMetrics) -> Result<LatticeBasis, IdentityError> {
    validate_credentials(pm)?;
    Ok(basis_from_seed(&pm.canonical_bytes(), BASIS_DIM)?)
}

/// Intermediate key material: digest of the serialized credential basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialKey(Digest);

impl PartialKey {
    pub fn digest(&self) -> &Digest {
        &self.0
    }
}

pub fn derive_partial_key(pm: &ProofMetrics) -> Result<PartialKey, IdentityError> {
    let basis = generate_basis(pm)?;
    Ok(PartialKey(tagged_digest(TAG_PARTIAL_KEY, &basis.encode())))
}

/// Signing keypair in the pairing group. The private scalar is never zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyPair {
    private: GroupScalar,
    public: GroupElement,
}

impl KeyPair {
    pub fn from_private(private: GroupScalar) -> Result<Self, IdentityError> {
        if private.is_zero() {
            return Err(IdentityError::ZeroScalar);
        }
        let public = GroupElement::generator(private.params()).scalar_mul(&private);
        Ok(Self { private, public })
    }

    pub fn private(&self) -> GroupScalar {
        self.private
    }

    pub fn public(&self) -> GroupElement {
        self.public
    }
}

/// map a ternary vector to a scalar: sum of (t_i + 1) * 3^i
fn scalar_from_trits(trits: &[i8], params: GroupParams) -> GroupScalar {
    let order = params.order;
    let mut acc = 0u64;
    for &t in trits.iter().rev() {
        let digit = (t + 1) as u64;
        acc = ((acc as u128 * 3 + digit as u128) % order as u128) as u64;
    }
    GroupScalar::new(params, acc)
}

/// key material shared by keypair and commitment derivation; the counter
/// skips the measure-zero draws that reduce to the zero scalar
fn derive_key_material(
    partial: &PartialKey,
    pm: &ProofMetrics,
) -> Result<(KeyPair, RingElement), IdentityError> {
    let params = GroupParams::default_params();
    let ring = RingParams::default_params();
    let mut seed = Vec::new();
    seed.extend_from_slice(partial.0.as_bytes());
    seed.extend_from_slice(&pm.canonical_bytes());
    let base_len = seed.len();
    for counter in 0u64.. {
        seed.truncate(base_len);
        seed.extend_from_slice(&counter.to_le_bytes());
        let secret = sample_small(&seed, ring)?;
        let scalar = scalar_from_trits(secret.coeffs(), params);
        if scalar.is_zero() {
            continue;
        }
        let keys = KeyPair::from_private(scalar)?;
        let mut noise_seed = b"noise:".to_vec();
        noise_seed.extend_from_slice(&seed);
        let noise = sample_small(&noise_seed, ring)?;
        let commitment = ring_add(&ring_mul(&ring_generator(ring), &secret.lift())?, &noise.lift())?;
        return Ok((keys, commitment));
    }
    unreachable!("counter loop yields a nonzero scalar")
}

/// Keypair derived from a partial key and its credentials.
pub fn generate_keypair(partial: &PartialKey, pm: &ProofMetrics) -> Result<KeyPair, IdentityError> {
    validate_credentials(pm)?;
    derive_key_material(partial, pm).map(|(keys, _)| keys)
}

/// fixed public ring element combining secrets into the key commitment
fn ring_generator(params: RingParams) -> RingElement {
    let mut rng = seeded_rng(b"identity-ring-generator", b"v1");
    let coeffs = (0..params.n()).map(|_| rng.next_u64() % params.q()).collect();
    RingElement::from_coeffs(params, coeffs).expect("generator coefficients in range")
}

/// Pseudo-identity: digest of the canonical credentials.
pub fn pseudo_id(pm: &ProofMetrics) -> Digest {
    tagged_digest(TAG_PSEUDO_ID, &pm.canonical_bytes())
}

/// Registered stakeholder: pseudonymous identity, keys, and the auxiliary
/// ring commitment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StakeholderWallet {
    pub pseudo_id: Digest,
    pub role: StakeholderRole,
    pub keys: KeyPair,
    pub key_commitment: RingElement,
}

/// Wallet store keyed by pseudo-identity; iteration order is the byte order
/// of the identities, so walks are deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WalletRegistry {
    wallets: BTreeMap<Digest, StakeholderWallet>,
}

impl WalletRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validate credentials, derive the wallet, and store it. The same
    /// credentials can register only once.
    pub fn register(&mut self, pm: &ProofMetrics) -> Result<&StakeholderWallet, IdentityError> {
        validate_credentials(pm)?;
        let id = pseudo_id(pm);
        if self.wallets.contains_key(&id) {
            return Err(IdentityError::DuplicatePseudoId(id.to_hex()));
        }
        let partial = derive_partial_key(pm)?;
        let (keys, key_commitment) = derive_key_material(&partial, pm)?;
        let wallet = StakeholderWallet { pseudo_id: id.clone(), role: pm.role, keys, key_commitment };
        Ok(self.wallets.entry(id).or_insert(wallet))
    }

    pub fn get(&self, id: &Digest) -> Option<&StakeholderWallet> {
        self.wallets.get(id)
    }

    pub fn contains(&self, id: &Digest) -> bool {
        self.wallets.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.wallets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wallets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &StakeholderWallet> {
        self.wallets.values()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum IdentityError {
    #[error("credential document must be nonempty")]
    EmptyDocument,
    #[error("unknown value for field role: {0:?}")]
    UnknownRole(String),
    #[error("unknown value for field document_type: {0:?}")]
    UnknownDocumentType(String),
    #[error("pseudo-identity already registered: {0}")]
    DuplicatePseudoId(String),
    #[error("private scalar must be nonzero")]
    ZeroScalar,
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_pm(n: u32) -> ProofMetrics {
        ProofMetrics::new(
            DocumentType::TradeLicense,
            format!("license-{n:05}").into_bytes(),
            StakeholderRole::all()[(n % 6) as usize],
        )
    }

    #[test]
    fn registration_is_deterministic() {
        let pm = sample_pm(7);
        let mut reg_a = WalletRegistry::new();
        let mut reg_b = WalletRegistry::new();
        let a = reg_a.register(&pm).unwrap().clone();
        let b = reg_b.register(&pm).unwrap().clone();
        assert_eq!(a, b);
        assert_eq!(a.pseudo_id, pseudo_id(&pm));
    }

    #[test]
    fn distinct_credentials_distinct_material() {
        let mut ids = std::collections::HashSet::new();
        let mut pubs = std::collections::HashSet::new();
        for n in 0..500 {
            let pm = sample_pm(n);
            let partial = derive_partial_key(&pm).unwrap();
            let keys = generate_keypair(&partial, &pm).unwrap();
            assert!(ids.insert(pseudo_id(&pm)));
            assert!(pubs.insert(keys.public().encode()));
        }
    }

    #[test]
    fn empty_document_rejected_everywhere() {
        let pm = ProofMetrics::new(DocumentType::NationalId, vec![], StakeholderRole::Customer);
        assert!(matches!(validate_credentials(&pm), Err(IdentityError::EmptyDocument)));
        assert!(generate_basis(&pm).is_err());
        assert!(derive_partial_key(&pm).is_err());
        assert!(WalletRegistry::new().register(&pm).is_err());
    }

    #[test]
    fn unknown_strings_name_the_field() {
        let err = StakeholderRole::from_str("wholesaler").unwrap_err();
        assert!(err.to_string().contains("role"), "{err}");
        let err = DocumentType::from_str("passport").unwrap_err();
        assert!(err.to_string().contains("document_type"), "{err}");
    }

    #[test]
    fn enum_strings_roundtrip() {
        for role in StakeholderRole::all() {
            assert_eq!(StakeholderRole::from_str(role.as_str()).unwrap(), role);
        }
        for ty in [DocumentType::TradeLicense, DocumentType::NationalId, DocumentType::InternationalId] {
            assert_eq!(DocumentType::from_str(ty.as_str()).unwrap(), ty);
        }
    }

    #[test]
    fn unit_private_key_gives_generator() {
        let p = GroupParams::default_params();
        let keys = KeyPair::from_private(GroupScalar::new(p, 1)).unwrap();
        assert_eq!(keys.public(), GroupElement::generator(p));
    }

    #[test]
    fn zero_private_key_rejected() {
        let p = GroupParams::default_params();
        assert!(matches!(
            KeyPair::from_private(GroupScalar::new(p, 0)),
            Err(IdentityError::ZeroScalar)
        ));
    }

    #[test]
    fn trit_scalar_map_hand_values() {
        let p = GroupParams::default_params();
        // all -1 digits collapse to zero: the retry loop must skip this draw
        assert!(scalar_from_trits(&[-1; 256], p).is_zero());
        assert_eq!(scalar_from_trits(&[0], p).value(), 1);
        assert_eq!(scalar_from_trits(&[1], p).value(), 2);
        // digits (0, 2) read little-endian in base 3
        assert_eq!(scalar_from_trits(&[-1, 1], p).value(), 6);
        assert_eq!(scalar_from_trits(&[1, 0, 1], p).value(), 2 + 3 + 18);
    }

    #[test]
    fn derived_scalars_never_zero() {
        for n in 0..1000 {
            let pm = sample_pm(n);
            let partial = derive_partial_key(&pm).unwrap();
            let keys = generate_keypair(&partial, &pm).unwrap();
            assert!(!keys.private().is_zero());
        }
    }

    #[test]
    fn duplicate_registration_rejected() {
        let mut reg = WalletRegistry::new();
        let pm = sample_pm(3);
        reg.register(&pm).unwrap();
        assert!(matches!(
            reg.register(&pm),
            Err(IdentityError::DuplicatePseudoId(_))
        ));
        assert_eq!(reg.len(), 1);
    }

    #[test]
    fn registry_iterates_in_id_order() {
        let mut reg = WalletRegistry::new();
        for n in 0..20 {
            reg.register(&sample_pm(n)).unwrap();
        }
        let ids: Vec<_> = reg.iter().map(|w| w.pseudo_id.clone()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn commitment_binds_credentials() {
        let a = {
            let pm = sample_pm(1);
            let mut reg = WalletRegistry::new();
            reg.register(&pm).unwrap().key_commitment.clone()
        };
        let b = {
            let pm = sample_pm(2);
            let mut reg = WalletRegistry::new();
            reg.register(&pm).unwrap().key_commitment.clone()
        };
        assert_ne!(a, b);
    }
}
