//! Bagging and random forests of regression trees.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cart::{fit_tree_on_rows, FeatureSampler, RegressionTree, TreeParams};
use crate::error::{Error, Result};
use crate::rng::TreeStream;
use crate::series::TrainingSet;

pub const DEFAULT_BAGGING_TREES: usize = 25;
pub const DEFAULT_FOREST_TREES: usize = 500;

/// How each member's training sample is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bootstrap {
    /// Size-n resample with replacement.
    Resample,
    /// Every tree sees the training set unchanged.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub n_trees: usize,
    /// Candidate features per split; `None` means all of them (bagging).
    pub mtry: Option<usize>,
    pub tree_params: TreeParams,
    pub seed: u64,
    pub bootstrap: Bootstrap,
}

impl EnsembleParams {
    pub fn bagging(seed: u64) -> Self {
        EnsembleParams {
            n_trees: DEFAULT_BAGGING_TREES,
            mtry: None,
            tree_params: TreeParams::deep(),
            seed,
            bootstrap: Bootstrap::Resample,
        }
    }

    /// 500 trees considering a third of the `n_features` features per split.
    pub fn random_forest(n_features: usize, seed: u64) -> Self {
        EnsembleParams {
            n_trees: DEFAULT_FOREST_TREES,
            mtry: Some(default_mtry(n_features)),
            ..Self::bagging(seed)
        }
    }

    fn resolved_mtry(&self, n_features: usize) -> Result<usize> {
        let mtry = self.mtry.unwrap_or(n_features);
        if mtry == 0 || mtry > n_features {
            return Err(Error::InvalidParams(format!(
                "mtry {mtry} outside 1..={n_features}"
            )));
        }
        Ok(mtry)
    }
}

pub fn default_mtry(n_features: usize) -> usize {
    (n_features / 3).max(1)
}

/// Callback receiving `(tree index, candidate features)`.
pub type SplitObserver<'a> = dyn Fn(usize, &[usize]) + Sync + 'a;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<RegressionTree>,
    pub params: EnsembleParams,
}

struct StreamSampler<'a> {
    stream: &'a mut TreeStream,
    mtry: usize,
    tree: usize,
    observer: Option<&'a SplitObserver<'a>>,
}

impl FeatureSampler for StreamSampler<'_> {
    fn candidates(&mut self, n_features: usize) -> Vec<usize> {
        let picked = if self.mtry >= n_features {
            (0..n_features).collect()
        } else {
            self.stream.subset(n_features, self.mtry)
        };
        if let Some(observe) = self.observer {
            observe(self.tree, &picked);
        }
        picked
    }
}

fn fit_member(
    ts: &TrainingSet,
    params: &EnsembleParams,
    mtry: usize,
    tree: usize,
    observer: Option<&SplitObserver<'_>>,
) -> Result<RegressionTree> {
    let mut stream = TreeStream::new(params.seed, tree as u64);
    let n = ts.n_rows();
    let rows: Vec<usize> = match params.bootstrap {
        Bootstrap::Resample => (0..n).map(|_| stream.below(n)).collect(),
        Bootstrap::Identity => (0..n).collect(),
    };
    let mut sampler = StreamSampler {
        stream: &mut stream,
        mtry,
        tree,
        observer,
    };
    fit_tree_on_rows(ts, rows, &params.tree_params, Some(&mut sampler))
}

pub fn fit_forest(ts: &TrainingSet, params: &EnsembleParams) -> Result<Forest> {
    fit_forest_inner(ts, params, None)
}

/// Like [`fit_forest`], but reports every candidate feature set drawn,
/// as `(tree index, candidates)`.
pub fn fit_forest_observed(
    ts: &TrainingSet,
    params: &EnsembleParams,
    observer: &SplitObserver<'_>,
) -> Result<Forest> {
    fit_forest_inner(ts, params, Some(observer))
}

fn fit_forest_inner(
    ts: &TrainingSet,
    params: &EnsembleParams,
    observer: Option<&SplitObserver<'_>>,
) -> Result<Forest> {
    if ts.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if params.n_trees == 0 {
        return Err(Error::InvalidParams("n_trees must be at least 1".into()));
    }
    params.tree_params.validate()?;
    let mtry = params.resolved_mtry(ts.n_features())?;
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|i| fit_member(ts, params, mtry, i, observer))
        .collect::<Result<Vec<_>>>()?;
    Ok(Forest {
        trees,
        params: *params,
    })
}

impl Forest {
    pub fn n_features(&self) -> usize {
        self.trees[0].n_features()
    }

    /// Mean of member predictions, summed in tree order.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let mut sum = 0.0;
        for tree in &self.trees {
            sum += tree.predict(x)?;
        }
        Ok(sum / self.trees.len() as f64)
    }

    pub fn member_predictions(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.trees.iter().map(|t| t.predict(x)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.trees.is_empty() || self.trees.len() != self.params.n_trees {
            return Err(Error::ModelFormat("forest tree count mismatch".into()));
        }
        let p = self.trees[0].n_features();
        for tree in &self.trees {
            tree.validate()?;
            if tree.n_features() != p {
                return Err(Error::ModelFormat("forest members disagree on features".into()));
            }
        }
        Ok(())
    }
}
