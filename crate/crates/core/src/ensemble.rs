use std::fmt;

use crate::linear_code::BlockCodeSpec;
use crate::{Error, Result};

/// An `(n, k)` outer code repeated `L` times, followed by one or two
/// interleaved accumulators. `N = nL`, `K = kL`.
#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    pub outer: BlockCodeSpec,
    repetitions: usize,
    stages: usize,
}

impl EnsembleSpec {
    pub fn new(outer: BlockCodeSpec, repetitions: usize, stages: usize) -> Result<Self> {
        if repetitions == 0 {
            return Err(Error::out_of_range("L", repetitions, "L >= 1"));
        }
        if !(1..=2).contains(&stages) {
            return Err(Error::out_of_range("stages", stages, "{1, 2}"));
        }
        if outer.k == 0 || outer.k >= outer.n {
            return Err(Error::InvalidParameter(format!(
                "outer code {} does not give a rate in (0, 1)",
                outer.label()
            )));
        }
        Ok(Self {
            outer,
            repetitions,
            stages,
        })
    }

    /// Ensemble with output block length `N`, which must be a multiple of `n`.
    pub fn with_block_length(
        outer: BlockCodeSpec,
        block_length: usize,
        stages: usize,
    ) -> Result<Self> {
        if block_length == 0 || !block_length.is_multiple_of(outer.n) {
            return Err(Error::InvalidParameter(format!(
                "block length {block_length} is not a positive multiple of n = {}",
                outer.n
            )));
        }
        let l = block_length / outer.n;
        Self::new(outer, l, stages)
    }

    /// Number of outer codewords per frame.
    pub fn repetitions(&self) -> usize {
        self.repetitions
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    /// Output block length `N`.
    pub fn block_length(&self) -> usize {
        self.outer.n * self.repetitions
    }

    /// Input block length `K`.
    pub fn message_length(&self) -> usize {
        self.outer.k * self.repetitions
    }

    pub fn rate(&self) -> f64 {
        self.outer.rate()
    }

    /// Ensemble name such as `(31,26)AA`.
    pub fn family_label(&self) -> String {
        format!("{}{}", self.outer.label(), "A".repeat(self.stages))
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} N={}", self.family_label(), self.block_length())
    }
}
