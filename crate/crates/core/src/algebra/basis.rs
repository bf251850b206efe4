//! Full-rank integer lattice bases derived deterministically from credential
//! bytes; the serialized basis seeds partial-key hashing.

use rand_chacha::rand_core::RngCore;

use super::ring::seeded_rng;
use super::AlgebraError;

/// default basis dimension
pub const BASIS_DIM: usize = 8;
/// basis entries are sampled from [-ENTRY_BOUND, ENTRY_BOUND]
pub const ENTRY_BOUND: i64 = 9;

/// Square integer matrix with nonzero determinant; rows are the basis vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    vectors: Vec<Vec<i64>>,
}

impl LatticeBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    /// canonical encoding: dimension then row-major little-endian entries
    pub fn encode(&self) -> Vec<u8> {
        let dim = self.dim();
        let mut out = Vec::with_capacity(4 + 8 * dim * dim);
        out.extend_from_slice(&(dim as u32).to_be_bytes());
        for row in &self.vectors {
            for &v in row {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }
}

/// Derive a full-rank basis from seed bytes. Degenerate draws are resampled
/// under an incremented counter, so the map stays total and deterministic.
pub fn generate_basis(seed: &[u8], dim: usize) -> Result<LatticeBasis, AlgebraError> {
    if seed.is_empty() {
        return Err(AlgebraError::EmptySeed);
    }
    if dim < 2 || dim > 16 {
        return Err(AlgebraError::InvalidBasisDim(dim));
    }
    let span = (2 * ENTRY_BOUND + 1) as u64;
    let reject_from = u64::MAX - u64::MAX % span;
    for counter in 0u64.. {
        let mut keyed = Vec::with_capacity(seed.len() + 8);
        keyed.extend_from_slice(seed);
        keyed.extend_from_slice(&counter.to_le_bytes());
        let mut rng = seeded_rng(b"lattice-basis", &keyed);
        let mut vectors = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut row = Vec::with_capacity(dim);
            while row.len() < dim {
                let v = rng.next_u64();
                if v >= reject_from {
                    continue;
                }
                row.push((v % span) as i64 - ENTRY_BOUND);
            }
            vectors.push(row);
        }
        if determinant(&vectors) != 0 {
            return Ok(LatticeBasis { vectors });
        }
    }
    unreachable!("counter loop yields a nonsingular draw")
}

/// Integer combination sum_i coeffs[i] * basis[i].
pub fn lattice_point(basis: &LatticeBasis, coeffs: &[i64]) -> Result<Vec<i64>, AlgebraError> {
    if coeffs.len() != basis.dim() {
        return Err(AlgebraError::DimensionMismatch {
            expected: basis.dim(),
            got: coeffs.len(),
        });
    }
    let dim = basis.dim();
    let mut out = vec![0i64; dim];
    for (c, row) in coeffs.iter().zip(&basis.vectors) {
        for (o, &v) in out.iter_mut().zip(row) {
            let wide = *o as i128 + *c as i128 * v as i128;
            *o = i64::try_from(wide).map_err(|_| AlgebraError::Overflow)?;
        }
    }
    Ok(out)
}

/// Bareiss fraction-free elimination; exact over i128 for the entry bounds
/// and dimensions accepted above.
fn determinant(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|row| row.iter().map(|&v| v as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let swap = (k + 1..n).find(|&r| a[r][k] != 0);
            match swap {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}
