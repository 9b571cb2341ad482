//! Streaming anomaly scoring with a forest of random cut trees.
//!
//! The scalar stream is shingled into overlapping fixed-length vectors, each
//! shingle is inserted into every tree (evicting the oldest shingle FIFO when
//! a tree reaches capacity), and the anomaly score of the newest sample is
//! the forest-mean collusive displacement of its shingle.

mod tree;

pub use tree::RcTree;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub num_trees: usize,
    /// Max shingles per tree; the oldest is forgotten when full.
    pub tree_capacity: usize,
    /// Shingle length (forest dimensionality).
    pub shingle: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            num_trees: 40,
            tree_capacity: 256,
            shingle: 4,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_trees == 0 || self.tree_capacity < 2 || self.shingle == 0 {
            return Err(Error::InvalidConfig(
                "forest needs num_trees >= 1, tree_capacity >= 2, shingle >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// A forest of random cut trees over shingled points.
pub struct Forest {
    config: ForestConfig,
    trees: Vec<(RcTree, ChaCha8Rng)>,
    window: Vec<f64>,
    live_keys: std::collections::VecDeque<u64>,
    next_key: u64,
}

impl Forest {
    pub fn new(config: ForestConfig) -> Result<Self> {
        config.validate()?;
        let trees = (0..config.num_trees)
            .map(|i| {
                // splitmix step decorrelates per-tree streams from one seed
                let tree_seed = config
                    .seed
                    .wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                (
                    RcTree::new(config.shingle),
                    ChaCha8Rng::seed_from_u64(tree_seed),
                )
            })
            .collect();
        Ok(Self {
            config,
            trees,
            window: Vec::new(),
            live_keys: std::collections::VecDeque::new(),
            next_key: 0,
        })
    }

    /// Feeds one scalar; returns the forest-mean CoDisp of the completed
    /// shingle, or `None` while the first shingle is still filling.
    pub fn update(&mut self, value: f64) -> Result<Option<f64>> {
        if !value.is_finite() {
            return Err(Error::NonFiniteInput(self.next_key));
        }
        self.window.push(value);
        if self.window.len() > self.config.shingle {
            self.window.remove(0);
        }
        if self.window.len() < self.config.shingle {
            return Ok(None);
        }
        let point = self.window.clone();
        let key = self.next_key;
        self.next_key += 1;
        if self.live_keys.len() == self.config.tree_capacity {
            let oldest = self.live_keys.pop_front().expect("capacity >= 2");
            for (tree, _) in &mut self.trees {
                tree.forget(oldest)?;
            }
        }
        let mut total = 0.0;
        for (tree, rng) in &mut self.trees {
            tree.insert(key, &point, rng)?;
            total += tree.codisp(key)?;
        }
        self.live_keys.push_back(key);
        Ok(Some(total / self.trees.len() as f64))
    }
}

/// Scores a whole series. Output is aligned to sample indices; entries before
/// the first complete shingle are 0.
pub fn score_stream(series: &TimeSeries, config: &ForestConfig) -> Result<Vec<f64>> {
    if series.len() < config.shingle {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            bootstrap: config.shingle,
        });
    }
    let mut forest = Forest::new(*config)?;
    let mut scores = Vec::with_capacity(series.len());
    for sample in series.samples() {
        scores.push(forest.update(sample.value)?.unwrap_or(0.0));
    }
    Ok(scores)
}

/// Peak comparison between true-stream and processed-stream score curves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakReport {
    pub tau: f64,
    pub true_peaks: Vec<usize>,
    pub processed_peaks: Vec<usize>,
    /// Processed peaks with no true peak at the same index.
    pub false_positives: Vec<usize>,
    /// True peaks absent from the processed curve.
    pub missed: Vec<usize>,
    pub preserved: bool,
}

/// Indices whose score exceeds `tau`, with consecutive indices collapsed to
/// the local maximum so one anomaly registers as one peak.
pub fn find_peaks(scores: &[f64], tau: f64) -> Vec<usize> {
    let mut peaks = Vec::new();
    let mut run_best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s > tau {
            run_best = Some(match run_best {
                Some(b) if scores[b] >= s => b,
                _ => i,
            });
        } else if let Some(b) = run_best.take() {
            peaks.push(b);
        }
    }
    if let Some(b) = run_best {
        peaks.push(b);
    }
    peaks
}

/// Compares peak sets; `tolerance` allows a processed peak to match a true
/// peak within that many indices (0 = exact positions).
pub fn peak_report(
    scores_true: &[f64],
    scores_processed: &[f64],
    tau: f64,
    tolerance: usize,
) -> PeakReport {
    let true_peaks = find_peaks(scores_true, tau);
    let processed_peaks = find_peaks(scores_processed, tau);
    let matches = |a: usize, set: &[usize]| {
        set.iter()
            .any(|&b| a.abs_diff(b) <= tolerance)
    };
    let false_positives: Vec<usize> = processed_peaks
        .iter()
        .copied()
        .filter(|&p| !matches(p, &true_peaks))
        .collect();
    let missed: Vec<usize> = true_peaks
        .iter()
        .copied()
        .filter(|&p| !matches(p, &processed_peaks))
        .collect();
    let preserved = false_positives.is_empty() && missed.is_empty();
    PeakReport {
        tau,
        true_peaks,
        processed_peaks,
        false_positives,
        missed,
        preserved,
    }
}
