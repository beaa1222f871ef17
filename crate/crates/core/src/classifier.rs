//! CART decision tree: training, prediction, and model serialization.
//!
//! Plain deterministic CART with the Gini criterion and no pruning: every
//! feature and every midpoint between consecutive distinct sorted values is
//! a candidate split, the largest size-weighted impurity decrease wins, and
//! ties break toward the lowest feature index, then the lowest threshold.
//! Routing is boundary-inclusive left (`feature <= threshold`), which must
//! stay fixed for cross-implementation reproducibility.

use std::io::{BufRead, BufReader, Read, Write};

use crate::trace::{FeatureVector, Mode};

/// First line of a serialized model.
pub const MODEL_VERSION: &str = "cellmode-tree v1";

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeParams {
    /// Maximum root-to-leaf path length in edges; the root sits at depth 0.
    pub max_depth: usize,
    /// Minimum training instances per leaf.
    pub min_leaf: usize,
    /// Minimum training instances a node needs to be split further.
    pub min_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 12,
            min_leaf: 5,
            min_split: 10,
        }
    }
}

impl TreeParams {
    fn validate(&self) -> Result<(), TrainError> {
        if self.max_depth < 1 || self.min_leaf < 1 || self.min_split < 2 {
            return Err(TrainError::BadParams(format!(
                "max_depth >= 1, min_leaf >= 1, min_split >= 2 required, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        counts: [u64; 3],
    },
}

/// A trained decision tree. Nodes are stored in preorder; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    /// Smallest feature-vector length the tree can route.
    dims: usize,
}

/// Training failure.
#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("need at least {needed} labeled instances, got {got}")]
    TooFewInstances { needed: usize, got: usize },
    #[error("instance {0} has no label")]
    Unlabeled(usize),
    #[error("instance {index} has {got} features, expected {expected}")]
    DimsMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("instance {index} feature {feature} is not finite")]
    NonFinite { index: usize, feature: usize },
    #[error("{0}")]
    BadParams(String),
    #[error("class counts are all zero")]
    AllZeroCounts,
}

/// Prediction or model (de)serialization failure.
#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("unsupported model header {0:?} (expected {MODEL_VERSION:?})")]
    BadVersion(String),
    #[error("model line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("model structure invalid: {0}")]
    Structure(String),
    #[error("feature vector has {got} values but the model routes on {needed}")]
    BadVector { needed: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Gini impurity of a three-class count vector: `1 - sum(p_i^2)`.
///
/// Ranges over [0, 2/3]; zero means a pure node.
pub fn gini_impurity(class_counts: [u64; 3]) -> Result<f64, TrainError> {
    let total: u64 = class_counts.iter().sum();
    if total == 0 {
        return Err(TrainError::AllZeroCounts);
    }
    let total = total as f64;
    Ok(1.0
        - class_counts
            .iter()
            .map(|&c| {
                let p = c as f64 / total;
                p * p
            })
            .sum::<f64>())
}

fn majority(counts: &[u64; 3]) -> Mode {
    // Highest count wins; ties go to the lowest mode index.
    let mut best = Mode::Stationary;
    for mode in Mode::ALL {
        if counts[mode.index()] > counts[best.index()] {
            best = mode;
        }
    }
    best
}

struct Builder<'a> {
    data: &'a [(&'a [f64], Mode)],
    params: TreeParams,
    nodes: Vec<Node>,
}

struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Builder<'_> {
    fn class_counts(&self, indices: &[usize]) -> [u64; 3] {
        let mut counts = [0u64; 3];
        for &i in indices {
            counts[self.data[i].1.index()] += 1;
        }
        counts
    }

    fn best_split(&self, indices: &mut [usize], parent_gini: f64) -> Option<Split> {
        let n = indices.len();
        let dims = self.data[indices[0]].0.len();
        let mut best: Option<Split> = None;

        for feature in 0..dims {
            indices.sort_by(|&a, &b| {
                self.data[a].0[feature].total_cmp(&self.data[b].0[feature])
            });
            let mut left = [0u64; 3];
            let mut right = self.class_counts(indices);
            for pos in 0..n - 1 {
                let class = self.data[indices[pos]].1.index();
                left[class] += 1;
                right[class] -= 1;

                let a = self.data[indices[pos]].0[feature];
                let b = self.data[indices[pos + 1]].0[feature];
                if a == b {
                    continue;
                }
                let n_left = pos + 1;
                let n_right = n - n_left;
                if n_left < self.params.min_leaf || n_right < self.params.min_leaf {
                    continue;
                }

                let weighted = (n_left as f64 * gini_impurity(left).expect("non-empty")
                    + n_right as f64 * gini_impurity(right).expect("non-empty"))
                    / n as f64;
                let gain = parent_gini - weighted;
                // Strict improvement keeps the first candidate on ties:
                // lowest feature index, then lowest threshold.
                if gain > best.as_ref().map_or(0.0, |s| s.gain) {
                    // Midpoint, nudged back onto the left value if rounding
                    // pushed it to b, so `x <= threshold` reproduces the
                    // evaluated partition exactly.
                    let mut threshold = (a + b) / 2.0;
                    if threshold >= b {
                        threshold = a;
                    }
                    best = Some(Split {
                        feature,
                        threshold,
                        gain,
                    });
                }
            }
        }
        best
    }

    fn build(&mut self, indices: &mut [usize], depth: usize) -> usize {
        let counts = self.class_counts(indices);
        let gini = gini_impurity(counts).expect("node is non-empty");
        let splittable = depth < self.params.max_depth
            && indices.len() >= self.params.min_split
            && gini > 0.0;

        let split = if splittable {
            self.best_split(indices, gini)
        } else {
            None
        };

        let Some(split) = split else {
            let id = self.nodes.len();
            self.nodes.push(Node::Leaf { counts });
            return id;
        };

        let (mut left, mut right): (Vec<usize>, Vec<usize>) = indices
            .iter()
            .partition(|&&i| self.data[i].0[split.feature] <= split.threshold);

        let id = self.nodes.len();
        // Placeholder patched after both subtrees are laid out in preorder.
        self.nodes.push(Node::Leaf { counts });
        let left_id = self.build(&mut left, depth + 1);
        let right_id = self.build(&mut right, depth + 1);
        self.nodes[id] = Node::Internal {
            feature: split.feature,
            threshold: split.threshold,
            left: left_id,
            right: right_id,
        };
        id
    }
}

/// Trains a CART tree on labeled instances.
///
/// Training is deterministic: equal instances and parameters produce
/// byte-identical serialized models. `seed` is accepted for interface
/// stability but unused; CART as specified has no random choices.
pub fn train(
    instances: &[FeatureVector],
    params: &TreeParams,
    _seed: u64,
) -> Result<DecisionTree, TrainError> {
    params.validate()?;
    if instances.len() < self_min(params) {
        return Err(TrainError::TooFewInstances {
            needed: self_min(params),
            got: instances.len(),
        });
    }
    let dims = instances[0].features.len();
    let mut data: Vec<(&[f64], Mode)> = Vec::with_capacity(instances.len());
    for (index, instance) in instances.iter().enumerate() {
        let label = instance.label.ok_or(TrainError::Unlabeled(index))?;
        if instance.features.len() != dims {
            return Err(TrainError::DimsMismatch {
                index,
                expected: dims,
                got: instance.features.len(),
            });
        }
        if let Some(feature) = instance.features.iter().position(|f| !f.is_finite()) {
            return Err(TrainError::NonFinite { index, feature });
        }
        data.push((instance.features.as_slice(), label));
    }

    let mut builder = Builder {
        data: &data,
        params: *params,
        nodes: Vec::new(),
    };
    let mut indices: Vec<usize> = (0..data.len()).collect();
    builder.build(&mut indices, 0);
    Ok(DecisionTree {
        nodes: builder.nodes,
        dims,
    })
}

fn self_min(params: &TreeParams) -> usize {
    params.min_split
}

impl DecisionTree {
    /// Routes a feature vector to a leaf and returns its majority mode.
    ///
    /// Total on finite vectors of sufficient length; routing sends
    /// `feature <= threshold` left.
    pub fn predict(&self, features: &[f64]) -> Result<Mode, ModelError> {
        if features.len() < self.dims {
            return Err(ModelError::BadVector {
                needed: self.dims,
                got: features.len(),
            });
        }
        let mut node = 0usize;
        loop {
            match &self.nodes[node] {
                Node::Leaf { counts } => return Ok(majority(counts)),
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if features[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// Number of nodes (internal plus leaves).
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        fn depth_at(nodes: &[Node], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Internal { left, right, .. } => {
                    1 + depth_at(nodes, *left).max(depth_at(nodes, *right))
                }
            }
        }
        depth_at(&self.nodes, 0)
    }

    /// Serializes the tree to the versioned line format.
    pub fn save<W: Write>(&self, mut writer: W) -> Result<(), ModelError> {
        writeln!(writer, "{MODEL_VERSION}")?;
        for (id, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => writeln!(writer, "N {id} {feature} {threshold} {left} {right}")?,
                Node::Leaf { counts } => {
                    writeln!(writer, "L {id} {} {} {}", counts[0], counts[1], counts[2])?
                }
            }
        }
        Ok(())
    }

    /// Serializes to a string; see [`DecisionTree::save`].
    pub fn save_to_string(&self) -> String {
        let mut bytes = Vec::new();
        self.save(&mut bytes).expect("writing to memory");
        String::from_utf8(bytes).expect("model text is ASCII")
    }

    /// Loads a tree saved by [`DecisionTree::save`].
    ///
    /// Fails closed: structural corruption (dangling references, cycles,
    /// unreachable or duplicate nodes, truncation) is an error, never a
    /// partial tree.
    pub fn load<R: Read>(reader: R) -> Result<DecisionTree, ModelError> {
        let mut lines = BufReader::new(reader).lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim_end() != MODEL_VERSION {
            return Err(ModelError::BadVersion(header));
        }

        let mut parsed: Vec<Option<Node>> = Vec::new();
        for (offset, line) in lines.enumerate() {
            let line = line?;
            let line_no = offset + 2;
            if line.trim().is_empty() {
                continue;
            }
            let malformed = |message: &str| ModelError::Malformed {
                line: line_no,
                message: message.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let (id, node) = match fields.as_slice() {
                ["N", id, feature, threshold, left, right] => {
                    let threshold: f64 = threshold
                        .parse()
                        .map_err(|_| malformed("bad threshold"))?;
                    if !threshold.is_finite() {
                        return Err(malformed("non-finite threshold"));
                    }
                    (
                        id.parse::<usize>().map_err(|_| malformed("bad node id"))?,
                        Node::Internal {
                            feature: feature
                                .parse()
                                .map_err(|_| malformed("bad feature index"))?,
                            threshold,
                            left: left.parse().map_err(|_| malformed("bad child id"))?,
                            right: right.parse().map_err(|_| malformed("bad child id"))?,
                        },
                    )
                }
                ["L", id, c0, c1, c2] => {
                    let counts = [
                        c0.parse().map_err(|_| malformed("bad count"))?,
                        c1.parse().map_err(|_| malformed("bad count"))?,
                        c2.parse().map_err(|_| malformed("bad count"))?,
                    ];
                    if counts.iter().all(|&c| c == 0) {
                        return Err(malformed("leaf with all-zero counts"));
                    }
                    (
                        id.parse::<usize>().map_err(|_| malformed("bad node id"))?,
                        Node::Leaf { counts },
                    )
                }
                _ => return Err(malformed("expected `N <id> <feature> <threshold> <left> <right>` or `L <id> <c0> <c1> <c2>`")),
            };
            if parsed.len() <= id {
                parsed.resize(id + 1, None);
            }
            if parsed[id].is_some() {
                return Err(ModelError::Structure(format!("duplicate node id {id}")));
            }
            parsed[id] = Some(node);
        }

        let nodes: Vec<Node> = parsed
            .into_iter()
            .enumerate()
            .map(|(id, node)| node.ok_or(ModelError::Structure(format!("missing node id {id}"))))
            .collect::<Result<_, _>>()?;
        if nodes.is_empty() {
            return Err(ModelError::Structure("no nodes".to_string()));
        }

        // Every node must be reached exactly once from the root: that
        // rules out dangling references, sharing, cycles, and orphans.
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![0usize];
        let mut dims = 0usize;
        while let Some(id) = stack.pop() {
            let node = nodes
                .get(id)
                .ok_or(ModelError::Structure(format!("dangling reference to {id}")))?;
            if seen[id] {
                return Err(ModelError::Structure(format!(
                    "node {id} reachable more than once"
                )));
            }
            seen[id] = true;
            if let Node::Internal {
                feature,
                left,
                right,
                ..
            } = node
            {
                dims = dims.max(feature + 1);
                stack.push(*left);
                stack.push(*right);
            }
        }
        if let Some(orphan) = seen.iter().position(|&s| !s) {
            return Err(ModelError::Structure(format!(
                "node {orphan} unreachable from the root"
            )));
        }

        Ok(DecisionTree { nodes, dims })
    }
}
