//! Prime-order group with a symmetric bilinear map.
//!
//! The default realization is transparent and deliberately non-hiding: a
//! group element stores the discrete log a of aP directly, and the pairing
//! sends (aP, bP) to g^(ab) in a multiplicative subgroup of Z_p^*. That makes
//! every pairing identity exact and testable while keeping the protocol code
//! against the abstract interface. Alternative realizations plug in as
//! different `GroupParams`; nothing outside this file assumes transparency.

use super::ring::{is_prime_u64, mul_mod, pow_mod};
use super::AlgebraError;

/// Group description: additive group order, and the modulus plus generator
/// of the multiplicative target group. The generator must have exact
/// multiplicative order `order` mod `target_modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupParams {
    pub order: u64,
    pub target_modulus: u64,
    pub target_generator: u64,
}

/// default group order: prime, with 2*order + 1 prime as well
pub const GROUP_ORDER: u64 = 4611686018427385619;
/// default target modulus 2*order + 1; squares mod it form the order-`order`
/// subgroup generated by 4
pub const TARGET_MODULUS: u64 = 9223372036854771239;

impl GroupParams {
    pub fn default_params() -> Self {
        Self {
            order: GROUP_ORDER,
            target_modulus: TARGET_MODULUS,
            target_generator: 4,
        }
    }

    /// small safe-prime instance for exhaustive tests
    pub fn toy_params() -> Self {
        Self { order: 11, target_modulus: 23, target_generator: 4 }
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        if !is_prime_u64(self.order) || !is_prime_u64(self.target_modulus) {
            return Err(AlgebraError::InvalidGroupParams("order and modulus must be prime"));
        }
        if (self.target_modulus - 1) % self.order != 0 {
            return Err(AlgebraError::InvalidGroupParams("order must divide modulus - 1"));
        }
        let g = self.target_generator % self.target_modulus;
        if g <= 1 || pow_mod(g, self.order, self.target_modulus) != 1 {
            return Err(AlgebraError::InvalidGroupParams("generator order mismatch"));
        }
        Ok(())
    }
}

/// Residue mod the group order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupScalar {
    params: GroupParams,
    value: u64,
}

impl GroupScalar {
    pub fn new(params: GroupParams, value: u64) -> Self {
        Self { params, value: value % params.order }
    }

    pub fn from_wide(params: GroupParams, value: u128) -> Self {
        Self { params, value: (value % params.order as u128) as u64 }
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn add(&self, other: &GroupScalar) -> GroupScalar {
        assert_eq!(self.params, other.params, "scalar params mismatch");
        GroupScalar::from_wide(self.params, self.value as u128 + other.value as u128)
    }

    pub fn mul(&self, other: &GroupScalar) -> GroupScalar {
        assert_eq!(self.params, other.params, "scalar params mismatch");
        GroupScalar::from_wide(self.params, self.value as u128 * other.value as u128)
    }
}

/// Element of the additive source group, written as a multiple of the
/// generator P.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupElement {
    params: GroupParams,
    value: u64,
}

impl GroupElement {
    pub fn generator(params: GroupParams) -> Self {
        Self { params, value: 1 % params.order }
    }

    pub fn identity(params: GroupParams) -> Self {
        Self { params, value: 0 }
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn is_identity(&self) -> bool {
        self.value == 0
    }

    pub fn add(&self, other: &GroupElement) -> GroupElement {
        assert_eq!(self.params, other.params, "element params mismatch");
        GroupElement {
            params: self.params,
            value: ((self.value as u128 + other.value as u128) % self.params.order as u128) as u64,
        }
    }

    pub fn scalar_mul(&self, s: &GroupScalar) -> GroupElement {
        assert_eq!(self.params, s.params(), "element params mismatch");
        GroupElement {
            params: self.params,
            value: mul_mod(self.value, s.value(), self.params.order),
        }
    }

    /// canonical encoding: 8-byte little-endian discrete log
    pub fn encode(&self) -> [u8; 8] {
        self.value.to_le_bytes()
    }

    pub fn decode(params: GroupParams, bytes: &[u8]) -> Result<Self, AlgebraError> {
        let arr: [u8; 8] = bytes
            .try_into()
            .map_err(|_| AlgebraError::EncodingLength { expected: 8, got: bytes.len() })?;
        let value = u64::from_le_bytes(arr);
        if value >= params.order {
            return Err(AlgebraError::ElementOutOfRange);
        }
        Ok(Self { params, value })
    }
}

/// Element of the multiplicative target group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairingOutput {
    params: GroupParams,
    value: u64,
}

impl PairingOutput {
    pub fn identity(params: GroupParams) -> Self {
        Self { params, value: 1 }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn mul(&self, other: &PairingOutput) -> PairingOutput {
        assert_eq!(self.params, other.params, "target params mismatch");
        PairingOutput {
            params: self.params,
            value: mul_mod(self.value, other.value, self.params.target_modulus),
        }
    }

    pub fn pow(&self, exp: u64) -> PairingOutput {
        PairingOutput {
            params: self.params,
            value: pow_mod(self.value, exp, self.params.target_modulus),
        }
    }
}

/// Bilinear map e(aP, bP) = g^(ab). Symmetric by construction; elements from
/// different group instances are rejected.
pub fn pairing_eval(a: &GroupElement, b: &GroupElement) -> Result<PairingOutput, AlgebraError> {
    if a.params != b.params {
        return Err(AlgebraError::GroupMismatch);
    }
    let exp = mul_mod(a.value, b.value, a.params.order);
    Ok(PairingOutput {
        params: a.params,
        value: pow_mod(a.params.target_generator, exp, a.params.target_modulus),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::RngCore;

    #[test]
    fn default_and_toy_params_are_well_formed() {
        GroupParams::default_params().validate().unwrap();
        GroupParams::toy_params().validate().unwrap();
        let bad = GroupParams { order: 12, target_modulus: 23, target_generator: 4 };
        assert!(bad.validate().is_err());
        let bad_gen = GroupParams { order: 11, target_modulus: 23, target_generator: 5 };
        assert!(bad_gen.validate().is_err(), "5 is a non-residue mod 23");
    }

    #[test]
    fn bilinearity_on_toy_grid() {
        // e(aP, bP) = e(P, P)^(ab) for every pair in the toy group
        let p = GroupParams::toy_params();
        let gen = GroupElement::generator(p);
        let base = pairing_eval(&gen, &gen).unwrap();
        for a in 0..11u64 {
            for b in 0..11u64 {
                let ap = gen.scalar_mul(&GroupScalar::new(p, a));
                let bp = gen.scalar_mul(&GroupScalar::new(p, b));
                let lhs = pairing_eval(&ap, &bp).unwrap();
                assert_eq!(lhs, base.pow(a * b % 11));
            }
        }
    }

    #[test]
    fn bilinearity_on_default_params() {
        let p = GroupParams::default_params();
        let gen = GroupElement::generator(p);
        let base = pairing_eval(&gen, &gen).unwrap();
        let mut rng = super::super::ring::seeded_rng(b"test-pairing", b"g");
        for _ in 0..200 {
            let a = rng.next_u64() % p.order;
            let b = rng.next_u64() % p.order;
            let ap = gen.scalar_mul(&GroupScalar::new(p, a));
            let bp = gen.scalar_mul(&GroupScalar::new(p, b));
            let lhs = pairing_eval(&ap, &bp).unwrap();
            let rhs = base.pow(mul_mod(a, b, p.order));
            assert_eq!(lhs, rhs);
            // symmetry
            assert_eq!(lhs, pairing_eval(&bp, &ap).unwrap());
        }
    }

    #[test]
    fn pairing_is_nondegenerate() {
        let p = GroupParams::default_params();
        let gen = GroupElement::generator(p);
        let e = pairing_eval(&gen, &gen).unwrap();
        assert_ne!(e, PairingOutput::identity(p));
        assert_eq!(e.value(), p.target_generator);
    }

    #[test]
    fn order_annihilates_generator() {
        let p = GroupParams::default_params();
        let gen = GroupElement::generator(p);
        let q = GroupScalar::new(p, p.order); // reduces to zero
        assert!(gen.scalar_mul(&q).is_identity());
    }

    #[test]
    fn mismatched_groups_rejected() {
        let a = GroupElement::generator(GroupParams::default_params());
        let b = GroupElement::generator(GroupParams::toy_params());
        assert!(matches!(pairing_eval(&a, &b), Err(AlgebraError::GroupMismatch)));
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let p = GroupParams::toy_params();
        let gen = GroupElement::generator(p);
        let base = pairing_eval(&gen, &gen).unwrap();
        let mut acc = PairingOutput::identity(p);
        for e in 0..30u64 {
            assert_eq!(base.pow(e), acc);
            acc = acc.mul(&base);
        }
    }

    #[test]
    fn encode_decode_roundtrip_and_range_check() {
        let p = GroupParams::default_params();
        let e = GroupElement::generator(p).scalar_mul(&GroupScalar::new(p, 123456789));
        let bytes = e.encode();
        assert_eq!(GroupElement::decode(p, &bytes).unwrap(), e);
        assert!(GroupElement::decode(p, &u64::MAX.to_le_bytes()).is_err());
        assert!(GroupElement::decode(p, &[1, 2, 3]).is_err());
    }

    #[test]
    fn scalar_arithmetic_reduces() {
        let p = GroupParams::toy_params();
        let a = GroupScalar::new(p, 9);
        let b = GroupScalar::new(p, 8);
        assert_eq!(a.add(&b).value(), 6); // 17 mod 11
        assert_eq!(a.mul(&b).value(), 6); // 72 mod 11
        assert_eq!(GroupScalar::new(p, 11).value(), 0);
    }
}
