//! Per-iteration training-point selection.
//!
//! Each draw picks a class with probability 1/2, then a row uniformly
//! within that class, so every positive row carries probability
//! 1/(2·n₊) and every negative row 1/(2·n₋). The draw discipline is
//! fixed: one generator word for the class choice (top bit), one for the
//! within-class index (modulo), which keeps seeded sample sequences
//! portable across implementations.

use crate::data::{Dataset, LabeledPoint};
use crate::rng::{rng_from_seed, RngCore, Xoshiro256PlusPlus};

/// Deterministic balanced sampler over a dataset.
pub struct BalancedSampler<'a> {
    rng: Xoshiro256PlusPlus,
    dataset: &'a Dataset,
}

impl<'a> BalancedSampler<'a> {
    pub fn new(dataset: &'a Dataset, seed: u64) -> Self {
        BalancedSampler {
            rng: rng_from_seed(seed),
            dataset,
        }
    }

    /// Draw the next training point; returns its row index and the point.
    pub fn next_sample(&mut self) -> (usize, &'a LabeledPoint) {
        let class_word = self.rng.next_u64();
        let indices = if class_word >> 63 == 0 {
            self.dataset.positive_indices()
        } else {
            self.dataset.negative_indices()
        };
        let pick = self.rng.next_u64() % indices.len() as u64;
        let row = indices[pick as usize];
        (row, self.dataset.point(row))
    }
}
