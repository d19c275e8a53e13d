//! Exact matrix rank of integer matrices.
//!
//! The rank over the rationals is computed modulo two 31-bit primes. Reduction
//! mod p can only lose rank, so agreement of both residues is accepted; on
//! disagreement the rank is recomputed exactly by fraction-free (Bareiss)
//! elimination over big integers.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub const PRIMES: [u64; 2] = [2_147_483_647, 2_147_483_629];

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    /// `lambda * I - self` for a square matrix.
    pub fn shifted(&self, lambda: i64) -> IntMatrix {
        let mut m = self.clone();
        for v in m.data.iter_mut() {
            *v = -*v;
        }
        for i in 0..self.rows.min(self.cols) {
            let d = m.get(i, i) + lambda;
            m.set(i, i, d);
        }
        m
    }
}

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

pub(crate) fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

pub(crate) fn reduce(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

/// Rank of `m` over GF(p) by Gaussian elimination. Rows with a zero in the
/// pivot column are skipped, which keeps sparse matrices cheap.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<u64> = m.data.iter().map(|&v| reduce(v, p)).collect();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        if piv != rank {
            for k in c..cols {
                a.swap(piv * cols + k, rank * cols + k);
            }
        }
        let inv = invmod(a[rank * cols + c], p);
        for k in c..cols {
            a[rank * cols + k] = mulmod(a[rank * cols + k], inv, p);
        }
        for r in rank + 1..rows {
            let f = a[r * cols + c];
            if f == 0 {
                continue;
            }
            for k in c..cols {
                let sub = mulmod(f, a[rank * cols + k], p);
                let cell = &mut a[r * cols + k];
                *cell = (*cell + p - sub) % p;
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over the rationals by Bareiss fraction-free elimination.
pub fn rank_bareiss(m: &IntMatrix) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<BigInt> = m.data.iter().map(|&v| BigInt::from(v)).collect();
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| !a[r * cols + c].is_zero()) else {
            continue;
        };
        if piv != rank {
            for k in 0..cols {
                a.swap(piv * cols + k, rank * cols + k);
            }
        }
        let pivot = a[rank * cols + c].clone();
        for r in rank + 1..rows {
            let f = a[r * cols + c].clone();
            for k in 0..cols {
                let v = (&pivot * &a[r * cols + k] - &f * &a[rank * cols + k]) / &prev;
                a[r * cols + k] = v;
            }
        }
        prev = pivot.abs();
        if prev.is_zero() {
            prev = BigInt::from(1);
        }
        rank += 1;
    }
    rank
}

/// Rank over the rationals of any integer matrix.
pub fn rational_rank(m: &IntMatrix) -> usize {
    let a = rank_mod_p(m, PRIMES[0]);
    let b = rank_mod_p(m, PRIMES[1]);
    if a == b {
        a
    } else {
        rank_bareiss(m)
    }
}

/// Rank over the rationals of a square integer matrix.
pub fn exact_rank(m: &IntMatrix) -> Result<usize> {
    if m.rows != m.cols {
        return Err(Error::invalid(format!("matrix is {}x{}, expected square", m.rows, m.cols)));
    }
    Ok(rational_rank(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_adjacency(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n - 1 {
            m.set(i + 1, i, 1);
        }
        m
    }

    #[test]
    fn basic_ranks() {
        assert_eq!(exact_rank(&IntMatrix::zeros(5, 5)).unwrap(), 0);
        assert_eq!(exact_rank(&chain_adjacency(5)).unwrap(), 4);
        let mut cycle = chain_adjacency(6);
        cycle.set(0, 5, 1);
        assert_eq!(exact_rank(&cycle).unwrap(), 6);
        assert!(exact_rank(&IntMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn rank_drops_modulo_a_dividing_prime() {
        // det = p, so the matrix is singular mod p only.
        let p = PRIMES[0] as i64;
        let m = IntMatrix::from_rows(vec![vec![p, 0], vec![0, 1]]).unwrap();
        assert_eq!(rank_mod_p(&m, PRIMES[0]), 1);
        assert_eq!(rank_mod_p(&m, PRIMES[1]), 2);
        assert_eq!(rational_rank(&m), 2);
    }

    #[test]
    fn bareiss_matches_modular_on_small_examples() {
        let m = IntMatrix::from_rows(vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]).unwrap();
        assert_eq!(rank_bareiss(&m), 2);
        assert_eq!(rational_rank(&m), 2);
        let rect = IntMatrix::from_rows(vec![vec![0, 1, 1, 0], vec![0, 2, 2, 0]]).unwrap();
        assert_eq!(rank_bareiss(&rect), 1);
        assert_eq!(rational_rank(&rect), 1);
    }

    #[test]
    fn shifted_matrix() {
        let a = chain_adjacency(3);
        let s = a.shifted(2);
        assert_eq!(s.get(0, 0), 2);
        assert_eq!(s.get(1, 0), -1);
        assert_eq!(exact_rank(&a.shifted(0)).unwrap(), 2);
        assert_eq!(exact_rank(&IntMatrix::identity(4)).unwrap(), 4);
    }
}
