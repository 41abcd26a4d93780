use serde::{Deserialize, Serialize};

use super::rng::SplitMix64;
use super::{Criterion, ForestConfig};

/// A binary tree stored as parallel arrays. Node 0 is the root.
///
/// Internal nodes send `x[feature] <= threshold` left. Leaves have
/// `feature == -1` and carry a class distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub feature: Vec<i32>,
    pub threshold: Vec<f64>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    /// Class probabilities for leaves, empty for internal nodes.
    pub distribution: Vec<Vec<f64>>,
}

impl DecisionTree {
    pub fn node_count(&self) -> usize {
        self.feature.len()
    }

    pub fn leaf_distribution(&self, row: &[f64]) -> &[f64] {
        let mut node = 0usize;
        loop {
            let feature = self.feature[node];
            if feature < 0 {
                return &self.distribution[node];
            }
            node = if row[feature as usize] <= self.threshold[node] {
                self.left[node] as usize
            } else {
                self.right[node] as usize
            };
        }
    }

    /// Checks the structural invariants: children point forward to valid
    /// nodes, thresholds are finite and leaf distributions sum to one.
    pub fn is_well_formed(&self, num_features: usize, num_classes: usize) -> bool {
        let n = self.node_count();
        if n == 0
            || [self.threshold.len(), self.left.len(), self.right.len(), self.distribution.len()]
                .iter()
                .any(|&len| len != n)
        {
            return false;
        }
        let mut parents = vec![0usize; n];
        for i in 0..n {
            if self.feature[i] < 0 {
                let dist = &self.distribution[i];
                let sum: f64 = dist.iter().sum();
                if dist.len() != num_classes || (sum - 1.0).abs() > 1e-9 {
                    return false;
                }
            } else {
                let (l, r) = (self.left[i] as usize, self.right[i] as usize);
                if self.feature[i] as usize >= num_features
                    || !self.threshold[i].is_finite()
                    || l <= i
                    || r <= i
                    || l >= n
                    || r >= n
                {
                    return false;
                }
                parents[l] += 1;
                parents[r] += 1;
            }
        }
        parents[0] == 0 && parents[1..].iter().all(|&p| p == 1)
    }
}

pub(crate) struct TreeBuilder<'a> {
    pub rows: &'a [&'a [f64]],
    pub classes: &'a [usize],
    pub num_classes: usize,
    pub num_features: usize,
    pub features_per_split: usize,
    pub cfg: &'a ForestConfig,
}

struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

const MIN_GAIN: f64 = 1e-12;

fn impurity(counts: &[usize], total: usize, criterion: Criterion) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    match criterion {
        Criterion::Entropy => counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / total;
                -p * p.log2()
            })
            .sum(),
        Criterion::Gini => {
            1.0 - counts
                .iter()
                .map(|&c| (c as f64 / total).powi(2))
                .sum::<f64>()
        }
    }
}

impl TreeBuilder<'_> {
    /// Grows one tree from `sample` (row indices, repeats allowed).
    pub fn grow(&self, sample: Vec<usize>, rng: &mut SplitMix64) -> DecisionTree {
        let mut tree = DecisionTree {
            feature: Vec::new(),
            threshold: Vec::new(),
            left: Vec::new(),
            right: Vec::new(),
            distribution: Vec::new(),
        };
        self.grow_node(&mut tree, sample, 0, rng);
        tree
    }

    fn class_counts(&self, indices: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for &i in indices {
            counts[self.classes[i]] += 1;
        }
        counts
    }

    fn push_leaf(tree: &mut DecisionTree, counts: &[usize], total: usize) -> usize {
        let id = tree.feature.len();
        tree.feature.push(-1);
        tree.threshold.push(0.0);
        tree.left.push(0);
        tree.right.push(0);
        tree.distribution
            .push(counts.iter().map(|&c| c as f64 / total as f64).collect());
        id
    }

    fn grow_node(&self, tree: &mut DecisionTree, indices: Vec<usize>, depth: usize, rng: &mut SplitMix64) -> usize {
        let counts = self.class_counts(&indices);
        let total = indices.len();
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_reached = self.cfg.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_reached || total < 2 * self.cfg.min_samples_leaf.max(1) {
            return Self::push_leaf(tree, &counts, total);
        }

        let Some(split) = self.best_split(&indices, &counts, rng) else {
            return Self::push_leaf(tree, &counts, total);
        };

        let id = tree.feature.len();
        tree.feature.push(split.feature as i32);
        tree.threshold.push(split.threshold);
        tree.left.push(0);
        tree.right.push(0);
        tree.distribution.push(Vec::new());

        let (left, right): (Vec<usize>, Vec<usize>) = indices
            .into_iter()
            .partition(|&i| self.rows[i][split.feature] <= split.threshold);
        let l = self.grow_node(tree, left, depth + 1, rng);
        let r = self.grow_node(tree, right, depth + 1, rng);
        tree.left[id] = l as u32;
        tree.right[id] = r as u32;
        id
    }

    /// Tries features in random order. After the first
    /// `features_per_split` candidates, keeps going only until one yields
    /// positive gain.
    fn best_split(&self, indices: &[usize], counts: &[usize], rng: &mut SplitMix64) -> Option<Split> {
        let mut order: Vec<usize> = (0..self.num_features).collect();
        rng.shuffle(&mut order);
        let parent = impurity(counts, indices.len(), self.cfg.criterion);

        let mut best: Option<Split> = None;
        for (tried, &feature) in order.iter().enumerate() {
            if tried >= self.features_per_split && best.is_some() {
                break;
            }
            if let Some(split) = self.best_threshold(indices, feature, parent) {
                if best.as_ref().map_or(true, |b| split.gain > b.gain) {
                    best = Some(split);
                }
            }
        }
        best
    }

    fn best_threshold(&self, indices: &[usize], feature: usize, parent: f64) -> Option<Split> {
        let mut values: Vec<(f64, usize)> = indices
            .iter()
            .map(|&i| (self.rows[i][feature], self.classes[i]))
            .collect();
        values.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let total = values.len();
        if values[0].0 == values[total - 1].0 {
            return None;
        }

        let min_leaf = self.cfg.min_samples_leaf.max(1);
        let mut left = vec![0usize; self.num_classes];
        let mut right = vec![0usize; self.num_classes];
        for &(_, c) in &values {
            right[c] += 1;
        }
        let mut best: Option<Split> = None;
        for i in 0..total - 1 {
            let (v, c) = values[i];
            left[c] += 1;
            right[c] -= 1;
            let next = values[i + 1].0;
            let n_left = i + 1;
            let n_right = total - n_left;
            if v == next || n_left < min_leaf || n_right < min_leaf {
                continue;
            }
            let children = (n_left as f64 * impurity(&left, n_left, self.cfg.criterion)
                + n_right as f64 * impurity(&right, n_right, self.cfg.criterion))
                / total as f64;
            let gain = parent - children;
            if gain > MIN_GAIN && best.as_ref().map_or(true, |b| gain > b.gain) {
                let mut threshold = v + (next - v) / 2.0;
                if threshold >= next {
                    threshold = v;
                }
                best = Some(Split {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
        best
    }
}
