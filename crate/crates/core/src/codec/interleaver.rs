use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::{Error, Result};

/// A permutation of `0..N`. Interleaving reads `out[i] = in[perm[i]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Interleaver {
    perm: Vec<usize>,
    seed: Option<u64>,
    stream: Option<u64>,
}

impl Interleaver {
    /// Fisher–Yates shuffle driven by ChaCha20 seeded with `seed` on stream
    /// `stream`: for `i = N-1 down to 1`, swap `i` with `j` uniform in `0..=i`
    /// (drawn as `u64`).
    pub fn random(size: usize, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut perm: Vec<usize> = (0..size).collect();
        for i in (1..size).rev() {
            let j = rng.random_range(0..=i as u64) as usize;
            perm.swap(i, j);
        }
        Self {
            perm,
            seed: Some(seed),
            stream: Some(stream),
        }
    }

    pub fn identity(size: usize) -> Self {
        Self {
            perm: (0..size).collect(),
            seed: None,
            stream: None,
        }
    }

    pub fn from_permutation(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter(format!(
                    "not a permutation of 0..{}",
                    perm.len()
                )));
            }
        }
        Ok(Self {
            perm,
            seed: None,
            stream: None,
        })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn interleave_into<T: Copy>(&self, input: &[T], out: &mut [T]) {
        for (o, &p) in out.iter_mut().zip(&self.perm) {
            *o = input[p];
        }
    }

    pub fn deinterleave_into<T: Copy>(&self, input: &[T], out: &mut [T]) {
        for (&x, &p) in input.iter().zip(&self.perm) {
            out[p] = x;
        }
    }

    pub fn interleave<T: Copy + Default>(&self, input: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); input.len()];
        self.interleave_into(input, &mut out);
        out
    }

    pub fn deinterleave<T: Copy + Default>(&self, input: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); input.len()];
        self.deinterleave_into(input, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn is_a_bijection_and_reproducible() {
        let a = Interleaver::random(1000, 7, 1);
        let mut sorted = a.permutation().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..1000).collect::<Vec<_>>());
        assert_eq!(a, Interleaver::random(1000, 7, 1));
        assert_ne!(a, Interleaver::random(1000, 7, 2));
        assert_ne!(a, Interleaver::random(1000, 8, 1));
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Interleaver::from_permutation(vec![0, 0, 1]).is_err());
        assert!(Interleaver::from_permutation(vec![0, 3, 1]).is_err());
        assert!(Interleaver::from_permutation(vec![2, 0, 1]).is_ok());
    }
}
