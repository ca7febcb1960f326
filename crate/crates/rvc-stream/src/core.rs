//! Shared domain types: samples, the sliding labeled window, and seeded
//! randomness. Everything downstream builds on these.

use std::collections::VecDeque;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A feature vector. All samples in one stream share the same dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: Vec<f64>,
}

impl Sample {
    pub fn new(features: Vec<f64>) -> Self {
        Self { features }
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }
}

/// A sample together with its real-valued target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub sample: Sample,
    pub target: f64,
}

impl LabeledSample {
    pub fn new(features: Vec<f64>, target: f64) -> Self {
        Self {
            sample: Sample::new(features),
            target,
        }
    }
}

/// FIFO buffer of the most recent labeled samples; bounds the training set.
/// Eviction is strictly oldest-first.
#[derive(Debug, Clone)]
pub struct LabeledWindow {
    capacity: usize,
    entries: VecDeque<LabeledSample>,
}

impl LabeledWindow {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "window capacity must be positive");
        Self {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    /// Append `item`; drop the oldest entry if the capacity would be exceeded.
    pub fn push(&mut self, item: LabeledSample) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(item);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Oldest-first iteration.
    pub fn iter(&self) -> impl Iterator<Item = &LabeledSample> {
        self.entries.iter()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.target).collect()
    }
}

/// Seed for one trial. Identical seed and inputs give bit-identical runs;
/// `stream` derives independent per-component generators from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Derive a generator for the component identified by `tag`. Distinct
    /// tags give statistically independent streams from the same seed.
    pub fn stream(self, tag: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(splitmix64(self.0 ^ splitmix64(tag)))
    }

    /// Derive a child seed, e.g. one per trial index.
    pub fn child(self, tag: u64) -> RngSeed {
        RngSeed(splitmix64(self.0 ^ splitmix64(tag)))
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}
