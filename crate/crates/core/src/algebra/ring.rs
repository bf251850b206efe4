//! Negacyclic polynomial ring Z_q[X]/(X^n + 1).
//!
//! Arithmetic here backs key derivation and the wallet key commitment; the
//! signcryption transcript itself lives in the prime-order group layer.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest as _, Sha256};

use super::AlgebraError;

/// default ring degree; also the bit width of protocol mask seeds
pub const RING_DEGREE: usize = 256;
/// default coefficient modulus, prime and congruent to 1 mod 2n
pub const RING_MODULUS: u64 = 12289;

/// Dimensions of a negacyclic ring instance.
///
/// q must be prime, q ≡ 1 (mod 2n), n a power of two ≥ 4, and q < 2^16 so
/// coefficients fit the canonical 16-bit wire encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingParams {
    n: usize,
    q: u64,
}

impl RingParams {
    pub fn new(n: usize, q: u64) -> Result<Self, AlgebraError> {
        if n < 4 || !n.is_power_of_two() {
            return Err(AlgebraError::InvalidRingParams("n must be a power of two >= 4"));
        }
        if q >= 1 << 16 {
            return Err(AlgebraError::InvalidRingParams("q must fit 16-bit encoding"));
        }
        if !is_prime_u64(q) {
            return Err(AlgebraError::InvalidRingParams("q must be prime"));
        }
        if q % (2 * n as u64) != 1 {
            return Err(AlgebraError::InvalidRingParams("q must be 1 mod 2n"));
        }
        Ok(Self { n, q })
    }

    pub fn default_params() -> Self {
        // constants are validated in tests; skip re-checking on every call
        Self { n: RING_DEGREE, q: RING_MODULUS }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }
}

/// Element of Z_q[X]/(X^n + 1) with coefficients reduced into [0, q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    params: RingParams,
    coeffs: Vec<u64>,
}

impl RingElement {
    pub fn from_coeffs(params: RingParams, coeffs: Vec<u64>) -> Result<Self, AlgebraError> {
        if coeffs.len() != params.n {
            return Err(AlgebraError::DimensionMismatch {
                expected: params.n,
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|&c| c >= params.q) {
            return Err(AlgebraError::CoefficientRange);
        }
        Ok(Self { params, coeffs })
    }

    pub fn zero(params: RingParams) -> Self {
        Self { params, coeffs: vec![0; params.n] }
    }

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// canonical encoding: n little-endian 16-bit residues
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 * self.coeffs.len());
        for &c in &self.coeffs {
            out.extend_from_slice(&(c as u16).to_le_bytes());
        }
        out
    }

    pub fn decode(params: RingParams, bytes: &[u8]) -> Result<Self, AlgebraError> {
        if bytes.len() != 2 * params.n {
            return Err(AlgebraError::EncodingLength {
                expected: 2 * params.n,
                got: bytes.len(),
            });
        }
        let coeffs = bytes
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]) as u64)
            .collect::<Vec<_>>();
        Self::from_coeffs(params, coeffs)
    }
}

/// Coefficient-wise sum in R_q.
pub fn ring_add(a: &RingElement, b: &RingElement) -> Result<RingElement, AlgebraError> {
    if a.params != b.params {
        return Err(AlgebraError::ParamMismatch);
    }
    let q = a.params.q;
    let coeffs = a
        .coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(&x, &y)| (x + y) % q)
        .collect();
    Ok(RingElement { params: a.params, coeffs })
}

/// Product in R_q; the X^n ≡ -1 wraparound is applied term by term.
pub fn ring_mul(a: &RingElement, b: &RingElement) -> Result<RingElement, AlgebraError> {
    if a.params != b.params {
        return Err(AlgebraError::ParamMismatch);
    }
    let n = a.params.n;
    let q = a.params.q;
    let mut acc = vec![0u64; n];
    for i in 0..n {
        if a.coeffs[i] == 0 {
            continue;
        }
        for j in 0..n {
            let prod = a.coeffs[i] * b.coeffs[j] % q;
            let k = i + j;
            if k < n {
                acc[k] = (acc[k] + prod) % q;
            } else {
                // X^(k) = X^(k-n) * X^n = -X^(k-n)
                acc[k - n] = (acc[k - n] + q - prod) % q;
            }
        }
    }
    Ok(RingElement { params: a.params, coeffs: acc })
}

/// Ternary element with coefficients in {-1, 0, 1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallRingElement {
    params: RingParams,
    coeffs: Vec<i8>,
}

impl SmallRingElement {
    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn coeffs(&self) -> &[i8] {
        &self.coeffs
    }

    /// lift into R_q, mapping -1 to q-1
    pub fn lift(&self) -> RingElement {
        let q = self.params.q;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| match c {
                -1 => q - 1,
                0 => 0,
                _ => 1,
            })
            .collect();
        RingElement { params: self.params, coeffs }
    }
}

/// Deterministic ternary sampler: a fixed seed maps to one element, symbols
/// drawn with equal probability via rejection of the single biased byte value.
pub fn sample_small(seed: &[u8], params: RingParams) -> Result<SmallRingElement, AlgebraError> {
    if seed.is_empty() {
        return Err(AlgebraError::EmptySeed);
    }
    let mut rng = seeded_rng(b"ring-sample-small", seed);
    let mut coeffs = Vec::with_capacity(params.n);
    let mut buf = [0u8; 64];
    let mut pos = buf.len();
    while coeffs.len() < params.n {
        if pos == buf.len() {
            rng.fill_bytes(&mut buf);
            pos = 0;
        }
        let byte = buf[pos];
        pos += 1;
        // 255 = 85 * 3, so only byte value 255 is rejected
        if byte == 255 {
            continue;
        }
        coeffs.push((byte % 3) as i8 - 1);
    }
    Ok(SmallRingElement { params, coeffs })
}

/// ChaCha20 stream keyed by a domain tag plus caller seed; the indirection
/// through SHA-256 admits seeds of any length.
pub fn seeded_rng(domain: &[u8], seed: &[u8]) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update((domain.len() as u64).to_le_bytes());
    h.update(domain);
    h.update(seed);
    ChaCha20Rng::from_seed(h.finalize().into())
}

pub(crate) fn is_prime_u64(v: u64) -> bool {
    if v < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if v == p {
            return true;
        }
        if v % p == 0 {
            return false;
        }
    }
    // deterministic Miller-Rabin for the full u64 range
    let d = (v - 1) >> (v - 1).trailing_zeros();
    let r = (v - 1).trailing_zeros();
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % v, d, v);
        if x == 1 || x == v - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, v);
            if x == v - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn small_params() -> RingParams {
        RingParams::new(4, 17).unwrap()
    }

    fn elem(params: RingParams, coeffs: &[u64]) -> RingElement {
        RingElement::from_coeffs(params, coeffs.to_vec()).unwrap()
    }

    /// oracle: plain schoolbook convolution into 2n-1 terms, then explicit
    /// X^n = -1 folding; shares no code with ring_mul
    fn schoolbook_negacyclic(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let n = a.len();
        let mut wide = vec![0u64; 2 * n - 1];
        for i in 0..n {
            for j in 0..n {
                wide[i + j] = (wide[i + j] + a[i] * b[j]) % q;
            }
        }
        let mut out = vec![0u64; n];
        for (k, &w) in wide.iter().enumerate() {
            if k < n {
                out[k] = (out[k] + w) % q;
            } else {
                out[k - n] = (out[k - n] + q - w) % q;
            }
        }
        out
    }

    fn random_elem(rng: &mut ChaCha20Rng, params: RingParams) -> RingElement {
        let coeffs = (0..params.n()).map(|_| rng.next_u64() % params.q()).collect();
        RingElement::from_coeffs(params, coeffs).unwrap()
    }

    #[test]
    fn add_wraps_modulus() {
        // (1 + X) + (16 + X) = 2X over Z_17[X]/(X^4+1)
        let p = small_params();
        let a = elem(p, &[1, 1, 0, 0]);
        let b = elem(p, &[16, 1, 0, 0]);
        let sum = ring_add(&a, &b).unwrap();
        assert_eq!(sum.coeffs(), &[0, 2, 0, 0]);
    }

    #[test]
    fn negacyclic_wraparound_sign() {
        // X^3 * X = X^4 = -1 = q - 1
        let p = small_params();
        let x3 = elem(p, &[0, 0, 0, 1]);
        let x = elem(p, &[0, 1, 0, 0]);
        let prod = ring_mul(&x3, &x).unwrap();
        assert_eq!(prod.coeffs(), &[16, 0, 0, 0]);
    }

    #[test]
    fn mul_matches_schoolbook_oracle() {
        for (n, q) in [(4usize, 17u64), (8, 97)] {
            let params = RingParams::new(n, q).unwrap();
            let mut rng = seeded_rng(b"test-ring-oracle", &[n as u8]);
            for _ in 0..2000 {
                let a = random_elem(&mut rng, params);
                let b = random_elem(&mut rng, params);
                let got = ring_mul(&a, &b).unwrap();
                let want = schoolbook_negacyclic(a.coeffs(), b.coeffs(), q);
                assert_eq!(got.coeffs(), &want[..]);
            }
        }
    }

    #[test]
    fn ring_axioms_hold() {
        let params = RingParams::new(8, 97).unwrap();
        let mut rng = seeded_rng(b"test-ring-axioms", b"x");
        for _ in 0..200 {
            let a = random_elem(&mut rng, params);
            let b = random_elem(&mut rng, params);
            let c = random_elem(&mut rng, params);
            // commutativity
            assert_eq!(ring_mul(&a, &b).unwrap(), ring_mul(&b, &a).unwrap());
            assert_eq!(ring_add(&a, &b).unwrap(), ring_add(&b, &a).unwrap());
            // associativity
            let ab_c = ring_mul(&ring_mul(&a, &b).unwrap(), &c).unwrap();
            let a_bc = ring_mul(&a, &ring_mul(&b, &c).unwrap()).unwrap();
            assert_eq!(ab_c, a_bc);
            // distributivity
            let lhs = ring_mul(&a, &ring_add(&b, &c).unwrap()).unwrap();
            let rhs = ring_add(&ring_mul(&a, &b).unwrap(), &ring_mul(&a, &c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn params_validation() {
        assert!(RingParams::new(4, 16).is_err()); // composite
        assert!(RingParams::new(4, 13).is_err()); // 13 % 8 != 1
        assert!(RingParams::new(3, 17).is_err()); // not a power of two
        assert!(RingParams::new(2, 5).is_err()); // below minimum degree
        assert!(RingParams::new(256, 12289).is_ok());
        assert!(RingParams::new(8, 97).is_ok());
    }

    #[test]
    fn default_params_satisfy_contract() {
        let p = RingParams::new(RING_DEGREE, RING_MODULUS).unwrap();
        assert_eq!(p, RingParams::default_params());
        assert_eq!(RING_MODULUS % (2 * RING_DEGREE as u64), 1);
    }

    #[test]
    fn mismatched_params_rejected() {
        let a = RingElement::zero(small_params());
        let b = RingElement::zero(RingParams::new(8, 97).unwrap());
        assert!(matches!(ring_add(&a, &b), Err(AlgebraError::ParamMismatch)));
        assert!(matches!(ring_mul(&a, &b), Err(AlgebraError::ParamMismatch)));
    }

    #[test]
    fn encode_decode_roundtrip() {
        let params = RingParams::default_params();
        let mut rng = seeded_rng(b"test-ring-encode", b"r");
        for _ in 0..50 {
            let a = random_elem(&mut rng, params);
            let bytes = a.encode();
            assert_eq!(bytes.len(), 2 * params.n());
            assert_eq!(RingElement::decode(params, &bytes).unwrap(), a);
        }
        assert!(RingElement::decode(params, &[0u8; 3]).is_err());
    }

    #[test]
    fn decode_rejects_out_of_range() {
        let p = small_params();
        let mut bytes = RingElement::zero(p).encode();
        bytes[0] = 17; // coefficient 17 >= q
        assert!(matches!(
            RingElement::decode(p, &bytes),
            Err(AlgebraError::CoefficientRange)
        ));
    }

    #[test]
    fn sampler_is_deterministic_and_seed_sensitive() {
        let p = RingParams::default_params();
        let a = sample_small(b"seed-a", p).unwrap();
        let b = sample_small(b"seed-a", p).unwrap();
        let c = sample_small(b"seed-b", p).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(sample_small(b"", p).is_err());
    }

    #[test]
    fn sampler_symbol_balance() {
        // 40 samples of degree 256 = 10240 draws; each symbol should sit
        // near 1/3 of the mass
        let p = RingParams::default_params();
        let mut counts = [0usize; 3];
        for i in 0..40u32 {
            let s = sample_small(&i.to_le_bytes(), p).unwrap();
            for &c in s.coeffs() {
                counts[(c + 1) as usize] += 1;
            }
        }
        let total = counts.iter().sum::<usize>() as f64;
        for &count in &counts {
            let freq = count as f64 / total;
            assert!((0.30..=0.37).contains(&freq), "symbol frequency {freq}");
        }
    }

    #[test]
    fn lift_maps_negative_to_q_minus_one() {
        let p = small_params();
        let s = SmallRingElement { params: p, coeffs: vec![-1, 0, 1, -1] };
        assert_eq!(s.lift().coeffs(), &[16, 0, 1, 16]);
    }

    #[test]
    fn primality_helper_agrees_with_trial_division() {
        // oracle: naive trial division up to sqrt
        fn naive(v: u64) -> bool {
            if v < 2 {
                return false;
            }
            let mut d = 2u64;
            while d * d <= v {
                if v % d == 0 {
                    return false;
                }
                d += 1;
            }
            true
        }
        for v in 0..2000u64 {
            assert_eq!(is_prime_u64(v), naive(v), "disagree at {v}");
        }
        assert!(is_prime_u64(12289));
        assert!(is_prime_u64(4611686018427385619));
        assert!(is_prime_u64(9223372036854771239));
        assert!(!is_prime_u64(4611686018427385619 * 2 + 2));
    }
}
