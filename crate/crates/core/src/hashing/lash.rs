//! Lattice compression hash: digests are matrix-vector products of a fixed
//! public matrix with the bit-decomposed input, reduced mod a small prime.
//!
//! Long inputs run through a chained compression: each block absorbs the
//! previous state vector (bit-decomposed) alongside fresh message bits, and
//! the final state serializes to the digest. Padding appends a single 1 bit
//! and the 64-bit message bit-length, so distinct lengths never collide on
//! the block boundary.

use std::sync::OnceLock;

use rand_chacha::rand_core::RngCore;

use crate::algebra::ring::{is_prime_u64, seeded_rng};

use super::{Digest, HashError};

/// default matrix height
pub const LASH_ROWS: usize = 160;
/// default matrix width in bit columns
pub const LASH_COLS: usize = 2048;
/// default coefficient modulus
pub const LASH_MODULUS: u64 = 257;
/// default digest width in bits
pub const LASH_OUTPUT_BITS: usize = 256;

/// everything public about the hash derives from this string
const MATRIX_SEED: &[u8] = b"prodchain lattice hash matrix v1";
const IV_SEED: &[u8] = b"prodchain lattice hash iv v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HashParams {
    pub rows: usize,
    pub cols: usize,
    pub modulus: u64,
    pub output_bits: usize,
}

impl HashParams {
    pub fn default_params() -> Self {
        Self {
            rows: LASH_ROWS,
            cols: LASH_COLS,
            modulus: LASH_MODULUS,
            output_bits: LASH_OUTPUT_BITS,
        }
    }

    pub fn validate(&self) -> Result<(), HashError> {
        if self.modulus < 3 || self.modulus >= 1 << 16 || !is_prime_u64(self.modulus) {
            return Err(HashError::InvalidParams("modulus must be a small prime"));
        }
        if self.output_bits == 0 || self.output_bits % 8 != 0 {
            return Err(HashError::InvalidParams("output_bits must be a positive byte multiple"));
        }
        if self.rows == 0 || self.rows * (self.modulus.ilog2() as usize) < self.output_bits {
            return Err(HashError::InvalidParams("rows * log2(modulus) must cover output_bits"));
        }
        if self.data_bits_per_block() < 72 {
            return Err(HashError::InvalidParams("cols leave no room for message bits"));
        }
        Ok(())
    }

    /// bits needed to represent a residue in [0, modulus); chaining width
    fn bits_per_value(&self) -> usize {
        (64 - (self.modulus - 1).leading_zeros()) as usize
    }

    /// bits taken per residue when extracting the digest; the floor width
    /// keeps every extracted bit close to balanced, where the chaining
    /// width would pin a near-constant top bit into the output
    fn digest_bits_per_value(&self) -> usize {
        self.modulus.ilog2() as usize
    }

    fn state_bits(&self) -> usize {
        self.rows * self.bits_per_value()
    }

    fn data_bits_per_block(&self) -> usize {
        self.cols.saturating_sub(self.state_bits())
    }

    fn seed_material(&self) -> Vec<u8> {
        let mut m = Vec::with_capacity(20);
        m.extend_from_slice(&(self.rows as u32).to_le_bytes());
        m.extend_from_slice(&(self.cols as u32).to_le_bytes());
        m.extend_from_slice(&self.modulus.to_le_bytes());
        m.extend_from_slice(&(self.output_bits as u32).to_le_bytes());
        m
    }
}

/// A hash instance: validated parameters plus the derived public matrix.
pub struct Lash {
    params: HashParams,
    /// the matrix columns packed four 16-bit lanes per word, column-major;
    /// the hot loop adds whole words and lane sums stay below 2^16 between
    /// flushes. rows beyond the height are zero padding
    packed: Vec<u64>,
    /// u64 words per packed column, rows padded up to a multiple of four
    words_per_column: usize,
    /// column adds a lane can take before it could overflow
    flush_every: u32,
    iv: Vec<u16>,
}

impl Lash {
    pub fn new(params: HashParams) -> Result<Self, HashError> {
        params.validate()?;
        let seed = params.seed_material();
        let matrix = derive_residues(MATRIX_SEED, &seed, params.rows * params.cols, params.modulus);
        let iv = derive_residues(IV_SEED, &seed, params.rows, params.modulus);
        let words_per_column = params.rows.div_ceil(4);
        let lane = |col: usize, row: usize| -> u64 {
            if row < params.rows {
                matrix[col * params.rows + row] as u64
            } else {
                0
            }
        };
        let packed = (0..params.cols * words_per_column)
            .map(|w| {
                let (col, word) = (w / words_per_column, w % words_per_column);
                let base = word * 4;
                lane(col, base)
                    | lane(col, base + 1) << 16
                    | lane(col, base + 2) << 32
                    | lane(col, base + 3) << 48
            })
            .collect();
        let flush_every = (u16::MAX as u32 / (params.modulus as u32 - 1)).max(1);
        Ok(Self { params, packed, words_per_column, flush_every, iv })
    }

    pub fn params(&self) -> HashParams {
        self.params
    }

    /// shared instance for the default parameters; the matrix derivation is
    /// paid once per process
    pub fn default_instance() -> &'static Lash {
        static INSTANCE: OnceLock<Lash> = OnceLock::new();
        INSTANCE.get_or_init(|| Lash::new(HashParams::default_params()).expect("default params"))
    }

    pub fn compress(&self, input: &[u8]) -> Digest {
        let p = &self.params;
        let rows = p.rows;
        let bpv = p.bits_per_value();
        let data_bits = p.data_bits_per_block();
        let msg_bits = input.len() * 8;
        // message ‖ 1 ‖ zero fill ‖ 64-bit LE bit length
        let padded_bits = (msg_bits + 1 + 64).div_ceil(data_bits) * data_bits;
        let length_start = padded_bits - 64;
        let modulus = p.modulus as u32;

        let mut state = self.iv.clone();
        let mut sums = ColumnSums::new(self);
        for block in 0..padded_bits / data_bits {
            sums.reset();
            // state feedback occupies columns [0, state_bits)
            for (i, &value) in state.iter().enumerate() {
                let mut v = value;
                let mut col = i * bpv;
                while v != 0 {
                    if v & 1 == 1 {
                        sums.add_column(self, col);
                    }
                    v >>= 1;
                    col += 1;
                }
            }
            // message bits occupy columns [state_bits, cols)
            let base = block * data_bits;
            for offset in 0..data_bits {
                let g = base + offset;
                let bit = if g < msg_bits {
                    input[g >> 3] >> (g & 7) & 1 == 1
                } else if g == msg_bits {
                    true
                } else if g >= length_start {
                    (msg_bits as u64) >> (g - length_start) & 1 == 1
                } else {
                    false
                };
                if bit {
                    sums.add_column(self, p.state_bits() + offset);
                }
            }
            let acc = sums.finish();
            for (s, &a) in state.iter_mut().zip(&acc[..rows]) {
                *s = (a % modulus) as u16;
            }
        }

        // digest: leading output_bits of the state's per-value bit expansion
        let dbpv = p.digest_bits_per_value();
        let mut out = vec![0u8; p.output_bits / 8];
        let mut g = 0usize;
        'serialize: for &value in &state {
            for t in 0..dbpv {
                if g == p.output_bits {
                    break 'serialize;
                }
                if value >> t & 1 == 1 {
                    out[g >> 3] |= 1 << (g & 7);
                }
                g += 1;
            }
        }
        Digest::new(out)
    }

}

/// Running column sums in packed lanes, spilled into 32-bit accumulators
/// before any lane can overflow.
struct ColumnSums {
    lanes: Vec<u64>,
    acc: Vec<u32>,
    pending: u32,
}

impl ColumnSums {
    fn new(lash: &Lash) -> Self {
        Self {
            lanes: vec![0; lash.words_per_column],
            acc: vec![0; lash.words_per_column * 4],
            pending: 0,
        }
    }

    fn reset(&mut self) {
        self.lanes.fill(0);
        self.acc.fill(0);
        self.pending = 0;
    }

    #[inline]
    fn add_column(&mut self, lash: &Lash, col: usize) {
        let wpc = lash.words_per_column;
        let words = &lash.packed[col * wpc..(col + 1) * wpc];
        for (l, &w) in self.lanes.iter_mut().zip(words) {
            *l += w;
        }
        self.pending += 1;
        if self.pending == lash.flush_every {
            self.flush();
        }
    }

    fn flush(&mut self) {
        for (w, l) in self.lanes.iter_mut().enumerate() {
            let v = *l;
            self.acc[w * 4] += (v & 0xffff) as u32;
            self.acc[w * 4 + 1] += (v >> 16 & 0xffff) as u32;
            self.acc[w * 4 + 2] += (v >> 32 & 0xffff) as u32;
            self.acc[w * 4 + 3] += (v >> 48) as u32;
            *l = 0;
        }
        self.pending = 0;
    }

    fn finish(&mut self) -> &[u32] {
        if self.pending > 0 {
            self.flush();
        }
        &self.acc
    }
}

/// Digest under the default parameters.
pub fn lash_compress(input: &[u8]) -> Digest {
    Lash::default_instance().compress(input)
}

/// uniform residues mod `modulus` from a domain-separated stream
fn derive_residues(domain: &[u8], seed: &[u8], count: usize, modulus: u64) -> Vec<u16> {
    let mut rng = seeded_rng(domain, seed);
    let span = modulus as u32;
    let reject_from = u32::MAX - u32::MAX % span;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = rng.next_u32();
        if v < reject_from {
            out.push((v % span) as u16);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::RngCore;

    #[test]
    fn digest_is_deterministic() {
        let a = lash_compress(b"product record 17");
        let b = lash_compress(b"product record 17");
        assert_eq!(a, b);
        assert_ne!(a, lash_compress(b"product record 18"));
    }

    #[test]
    fn digest_length_contract() {
        for size in [0usize, 1, 31, 75, 76, 77, 608, 4096, 1 << 16, 1 << 20] {
            let input = vec![0xa5u8; size];
            let d = lash_compress(&input);
            assert_eq!(d.as_bytes().len(), LASH_OUTPUT_BITS / 8, "size {size}");
        }
    }

    #[test]
    fn single_bit_flips_change_digest() {
        let mut rng = crate::algebra::ring::seeded_rng(b"test-avalanche", b"a");
        let mut collisions = 0;
        for _ in 0..1000 {
            let mut input = vec![0u8; 64];
            rng.fill_bytes(&mut input);
            let before = lash_compress(&input);
            let bit = (rng.next_u32() as usize) % (input.len() * 8);
            input[bit >> 3] ^= 1 << (bit & 7);
            if lash_compress(&input) == before {
                collisions += 1;
            }
        }
        assert_eq!(collisions, 0);
    }

    #[test]
    fn no_collisions_among_random_inputs() {
        // 1e5 distinct inputs: 8-byte counter plus 24 random bytes
        let mut rng = crate::algebra::ring::seeded_rng(b"test-collisions", b"c");
        let mut seen = std::collections::HashSet::with_capacity(100_000);
        for i in 0u64..100_000 {
            let mut input = [0u8; 32];
            input[..8].copy_from_slice(&i.to_le_bytes());
            rng.fill_bytes(&mut input[8..]);
            assert!(seen.insert(lash_compress(&input)), "collision at input {i}");
        }
    }

    #[test]
    fn trailing_zeros_are_not_absorbed_silently() {
        // length padding separates inputs that differ only by zero suffix
        let a = lash_compress(&[0u8; 10]);
        let b = lash_compress(&[0u8; 11]);
        assert_ne!(a, b);
        assert_ne!(lash_compress(b""), lash_compress(&[0u8]));
    }

    #[test]
    fn custom_params_produce_requested_width() {
        let params = HashParams { rows: 16, cols: 256, modulus: 13, output_bits: 32 };
        let lash = Lash::new(params).unwrap();
        let d = lash.compress(b"abc");
        assert_eq!(d.as_bytes().len(), 4);
        assert_ne!(d, lash.compress(b"abd"));
    }

    #[test]
    fn param_validation_rejections() {
        let ok = HashParams::default_params();
        assert!(ok.validate().is_ok());
        let composite = HashParams { modulus: 256, ..ok };
        assert!(composite.validate().is_err());
        let ragged = HashParams { output_bits: 100, ..ok };
        assert!(ragged.validate().is_err());
        let shallow = HashParams { rows: 16, output_bits: 256, ..ok };
        assert!(shallow.validate().is_err(), "16 rows cannot cover 256 bits");
        let narrow = HashParams { cols: LASH_ROWS * 9 + 16, ..ok };
        assert!(narrow.validate().is_err(), "no room for message bits");
    }

    /// matrix entry (row, col) unpacked from the lane representation
    fn matrix_entry(lash: &Lash, col: usize, row: usize) -> u64 {
        let word = lash.packed[col * lash.words_per_column + row / 4];
        word >> (16 * (row % 4)) & 0xffff
    }

    #[test]
    fn distinct_params_distinct_matrices() {
        let a = Lash::new(HashParams { rows: 16, cols: 256, modulus: 13, output_bits: 32 }).unwrap();
        let b = Lash::new(HashParams { rows: 16, cols: 256, modulus: 17, output_bits: 32 }).unwrap();
        assert_ne!(a.packed, b.packed);
    }

    #[test]
    fn matrix_residues_in_range_and_balanced() {
        let lash = Lash::default_instance();
        assert_eq!(lash.packed.len(), LASH_COLS * LASH_ROWS.div_ceil(4));
        let mut sum = 0u64;
        for col in 0..LASH_COLS {
            for row in 0..LASH_ROWS {
                let v = matrix_entry(lash, col, row);
                assert!(v < LASH_MODULUS, "entry ({row}, {col}) = {v} out of range");
                sum += v;
            }
        }
        // crude uniformity: mean of residues near (modulus-1)/2
        let mean = sum as f64 / (LASH_ROWS * LASH_COLS) as f64;
        assert!((mean - 128.0).abs() < 2.0, "matrix mean {mean}");
    }
}
