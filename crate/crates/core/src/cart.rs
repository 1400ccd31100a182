//! CART regression trees.
//!
//! Nodes are grown greedily: every candidate feature is sorted, every
//! midpoint between consecutive distinct values is scored by the reduction
//! in sum of squared errors, and the best split is kept when it clears the
//! complexity threshold. Examples with `x[feature] < threshold` go left.
//!
//! Ties between splits with equal SSE reduction (within a relative
//! tolerance of `1e-12` of the node SSE) go to the lowest feature index,
//! then the smallest threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfmt::{format_column, format_g, signif};
use crate::series::TrainingSet;

/// Relative tolerance under which two SSE reductions count as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Minimum examples in a node for a split to be attempted.
    pub min_split: usize,
    /// Minimum examples in each child.
    pub min_bucket: usize,
    /// Maximum depth; the root has depth 0.
    pub max_depth: usize,
    /// Minimum SSE reduction, relative to the root SSE, for a split to be kept.
    pub cp: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            min_split: 20,
            min_bucket: 7,
            max_depth: 30,
            cp: 0.01,
        }
    }
}

impl TreeParams {
    /// Default parameters with a different `min_split`; `min_bucket`
    /// follows as `ceil(min_split / 3)`.
    pub fn with_min_split(min_split: usize) -> Self {
        TreeParams {
            min_split,
            min_bucket: min_split.div_ceil(3).max(1),
            ..Default::default()
        }
    }

    /// Fully grown trees for ensembles.
    pub fn deep() -> Self {
        TreeParams {
            min_split: 2,
            min_bucket: 1,
            max_depth: 30,
            cp: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_split == 0 || self.min_bucket == 0 {
            return Err(Error::InvalidParams(
                "min_split and min_bucket must be positive".into(),
            ));
        }
        if self.min_bucket > self.min_split {
            return Err(Error::InvalidParams(format!(
                "min_bucket ({}) exceeds min_split ({})",
                self.min_bucket, self.min_split
            )));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidParams("max_depth must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.cp) {
            return Err(Error::InvalidParams(format!("cp {} outside [0, 1]", self.cp)));
        }
        Ok(())
    }
}

/// Supplies the candidate features for each split attempt.
pub trait FeatureSampler {
    fn candidates(&mut self, n_features: usize) -> Vec<usize>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    /// Heap numbering: root 1, children of `k` are `2k` and `2k + 1`.
    pub id: u64,
    pub n: usize,
    pub mean: f64,
    pub sse: f64,
    pub split: Option<Split>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }
}

/// A fitted regression tree; nodes are stored in preorder, root first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub feature_names: Vec<String>,
    pub nodes: Vec<Node>,
}

struct Grower<'a, 's> {
    features: &'a [Vec<f64>],
    targets: &'a [f64],
    params: TreeParams,
    root_sse: f64,
    n_features: usize,
    sampler: Option<&'s mut dyn FeatureSampler>,
    nodes: Vec<Node>,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

fn mean_and_sse(targets: &[f64], rows: &[usize]) -> (f64, f64) {
    let n = rows.len() as f64;
    let mean = rows.iter().map(|&r| targets[r]).sum::<f64>() / n;
    let sse = rows.iter().map(|&r| (targets[r] - mean).powi(2)).sum();
    (mean, sse)
}

impl Grower<'_, '_> {
    fn grow(&mut self, rows: Vec<usize>, depth: usize, id: u64) -> usize {
        let (mean, sse) = mean_and_sse(self.targets, &rows);
        let index = self.nodes.len();
        self.nodes.push(Node {
            id,
            n: rows.len(),
            mean,
            sse,
            split: None,
        });

        let eligible = rows.len() >= self.params.min_split
            && rows.len() >= 2 * self.params.min_bucket
            && depth < self.params.max_depth
            && sse > 0.0;
        if !eligible {
            return index;
        }
        let Some(best) = self.best_split(&rows, sse) else {
            return index;
        };
        if best.gain < self.params.cp * self.root_sse || best.gain <= TIE_TOLERANCE * sse {
            return index;
        }
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.features[r][best.feature] < best.threshold);
        let left = self.grow(left_rows, depth + 1, 2 * id);
        let right = self.grow(right_rows, depth + 1, 2 * id + 1);
        self.nodes[index].split = Some(Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        });
        index
    }

    fn best_split(&mut self, rows: &[usize], node_sse: f64) -> Option<Candidate> {
        let mut candidates = match self.sampler.as_deref_mut() {
            Some(sampler) => sampler.candidates(self.n_features),
            None => (0..self.n_features).collect(),
        };
        candidates.sort_unstable();
        candidates.dedup();

        let n = rows.len();
        let min_bucket = self.params.min_bucket;
        let tolerance = TIE_TOLERANCE * node_sse;
        let mut best: Option<Candidate> = None;
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
        let mut right_sse = vec![0.0; n + 1];

        for feature in candidates.into_iter().filter(|&f| f < self.n_features) {
            pairs.clear();
            pairs.extend(rows.iter().map(|&r| (self.features[r][feature], self.targets[r])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            if pairs[0].0 == pairs[n - 1].0 {
                continue;
            }

            // right_sse[k] = SSE of pairs[k..], via Welford from the back
            let (mut mean, mut m2) = (0.0, 0.0);
            for k in (0..n).rev() {
                let count = (n - k) as f64;
                let y = pairs[k].1;
                let delta = y - mean;
                mean += delta / count;
                m2 += delta * (y - mean);
                right_sse[k] = m2;
            }

            let (mut mean, mut m2) = (0.0, 0.0);
            for k in 1..n {
                let y = pairs[k - 1].1;
                let delta = y - mean;
                mean += delta / k as f64;
                m2 += delta * (y - mean);
                if k < min_bucket || n - k < min_bucket {
                    continue;
                }
                let (lo, hi) = (pairs[k - 1].0, pairs[k].0);
                if lo >= hi {
                    continue;
                }
                let gain = node_sse - (m2 + right_sse[k]);
                let better = match &best {
                    None => true,
                    Some(b) => gain > b.gain + tolerance,
                };
                if better {
                    let mut threshold = (lo + hi) / 2.0;
                    if !threshold.is_finite() {
                        threshold = lo / 2.0 + hi / 2.0;
                    }
                    if threshold <= lo {
                        threshold = hi;
                    }
                    best = Some(Candidate {
                        feature,
                        threshold,
                        gain,
                    });
                }
            }
        }
        best
    }
}

/// Fits a tree on the whole training set.
pub fn fit_tree(
    ts: &TrainingSet,
    params: &TreeParams,
    sampler: Option<&mut dyn FeatureSampler>,
) -> Result<RegressionTree> {
    fit_tree_on_rows(ts, (0..ts.n_rows()).collect(), params, sampler)
}

/// Fits a tree on the rows of `ts` listed in `rows` (repetitions allowed).
pub fn fit_tree_on_rows(
    ts: &TrainingSet,
    rows: Vec<usize>,
    params: &TreeParams,
    sampler: Option<&mut dyn FeatureSampler>,
) -> Result<RegressionTree> {
    params.validate()?;
    if ts.is_empty() || rows.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if let Some(&bad) = rows.iter().find(|&&r| r >= ts.n_rows()) {
        return Err(Error::InvalidParams(format!("row index {bad} out of range")));
    }
    let (_, root_sse) = mean_and_sse(&ts.targets, &rows);
    let mut grower = Grower {
        features: &ts.features,
        targets: &ts.targets,
        params: *params,
        root_sse,
        n_features: ts.n_features(),
        sampler,
        nodes: Vec::new(),
    };
    grower.grow(rows, 0, 1);
    Ok(RegressionTree {
        feature_names: ts.feature_names.clone(),
        nodes: grower.nodes,
    })
}

/// One conjunct of a rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub feature: usize,
    pub name: String,
    pub threshold: f64,
    /// `true` for `x < threshold`, `false` for `x >= threshold`.
    pub less_than: bool,
}

impl Condition {
    pub fn holds(&self, x: &[f64]) -> bool {
        (x[self.feature] < self.threshold) == self.less_than
    }
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let op = if self.less_than { "<" } else { ">=" };
        write!(f, "{} {} {}", self.name, op, format_g(self.threshold, 7))
    }
}

/// A leaf expressed as a conjunction of threshold tests.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub prediction: f64,
    pub n: usize,
}

impl Rule {
    pub fn applies(&self, x: &[f64]) -> bool {
        self.conditions.iter().all(|c| c.holds(x))
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if !self.conditions.is_empty() {
            let parts: Vec<String> = self.conditions.iter().map(|c| c.to_string()).collect();
            write!(f, "if {}, ", parts.join(" and "))?;
        }
        write!(f, "predict {}", format_g(self.prediction, 7))
    }
}

impl RegressionTree {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn depth(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| 63 - n.id.leading_zeros() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                got: x.len(),
            });
        }
        Ok(self.nodes[self.leaf_index(x)].mean)
    }

    /// Index of the leaf `x` is routed to.
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        while let Some(split) = self.nodes[i].split {
            i = if x[split.feature] < split.threshold {
                split.left
            } else {
                split.right
            };
        }
        i
    }

    /// One rule per leaf, in preorder.
    pub fn to_rules(&self) -> Vec<Rule> {
        let mut rules = Vec::new();
        let mut stack: Vec<(usize, Vec<Condition>)> = vec![(0, Vec::new())];
        while let Some((i, conditions)) = stack.pop() {
            let node = &self.nodes[i];
            match node.split {
                None => rules.push(Rule {
                    conditions,
                    prediction: node.mean,
                    n: node.n,
                }),
                Some(split) => {
                    let make = |less_than| Condition {
                        feature: split.feature,
                        name: self.feature_names[split.feature].clone(),
                        threshold: split.threshold,
                        less_than,
                    };
                    let mut right = conditions.clone();
                    right.push(make(false));
                    let mut left = conditions;
                    left.push(make(true));
                    stack.push((split.right, right));
                    stack.push((split.left, left));
                }
            }
        }
        rules
    }

    /// Node listing in the `node), split, n, deviance, yval` layout.
    pub fn dump(&self) -> String {
        const DIGITS: usize = 4;
        let mut labels = vec![String::new(); self.nodes.len()];
        labels[0] = "root".into();
        for node in &self.nodes {
            if let Some(split) = node.split {
                let name = &self.feature_names[split.feature];
                let cut = format_g(signif(split.threshold, DIGITS), DIGITS);
                labels[split.left] = format!("{name}< {cut}");
                labels[split.right] = format!("{name}>={cut}");
            }
        }
        let ids: Vec<String> = self.nodes.iter().map(|n| n.id.to_string()).collect();
        let id_width = ids.iter().map(String::len).max().unwrap_or(1);
        let deviance: Vec<f64> = self.nodes.iter().map(|n| signif(n.sse, DIGITS)).collect();
        let yval: Vec<f64> = self.nodes.iter().map(|n| signif(n.mean, DIGITS)).collect();
        let deviance = format_column(&deviance, 7);
        let yval = format_column(&yval, 7);

        let mut out = format!(
            "n= {} \n\nnode), split, n, deviance, yval\n* denotes terminal node\n\n",
            self.root().n
        );
        for (i, node) in self.nodes.iter().enumerate() {
            let depth = 63 - node.id.leading_zeros() as usize;
            let term = if node.is_leaf() { "*" } else { " " };
            out.push_str(&format!(
                "{}{:>w$}) {} {} {} {} {}\n",
                " ".repeat(2 * depth),
                ids[i],
                labels[i],
                node.n,
                deviance[i],
                yval[i],
                term,
                w = id_width
            ));
        }
        out
    }

    /// Structural checks for trees loaded from disk.
    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::ModelFormat("tree has no nodes".into()));
        }
        for node in &self.nodes {
            if let Some(s) = node.split {
                if s.feature >= self.n_features()
                    || s.left >= self.nodes.len()
                    || s.right >= self.nodes.len()
                    || s.left == 0
                    || s.right == 0
                {
                    return Err(Error::ModelFormat(format!("node {} is malformed", node.id)));
                }
            }
        }
        Ok(())
    }
}
