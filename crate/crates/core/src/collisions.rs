//! Collision detection: cluster examples by embedding, sum class vectors
//! per cluster, and flag clusters whose class spread exceeds the allowed
//! count `k`.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::emotext::{LabeledExample, EMOTION_COUNT};
use crate::error::Error;
use crate::mathkit::cosine_similarity;

/// Slack applied to the similarity threshold so that exact duplicates
/// still group at `tau = 1.0`.
const TAU_SLACK: f64 = 1e-12;

/// Parameters of the collision search: `k` is the allowed number of
/// dominant classes per cluster, `tau` the cosine clustering threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionParams {
    pub k: usize,
    pub tau: f64,
}

impl CollisionParams {
    pub fn new(k: usize, tau: f64) -> Result<CollisionParams, Error> {
        if !(1..=EMOTION_COUNT).contains(&k) {
            return Err(Error::InvalidParameter {
                name: "k",
                message: "must be between 1 and 7".to_string(),
            });
        }
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::InvalidParameter {
                name: "tau",
                message: "must be between 0 and 1".to_string(),
            });
        }
        Ok(CollisionParams { k, tau })
    }
}

impl Default for CollisionParams {
    fn default() -> Self {
        CollisionParams { k: 2, tau: 0.995 }
    }
}

/// Per-cluster aggregate: summed class vector, its mean, and the number
/// of classes `Z` at or above that mean.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    pub id: usize,
    pub size: usize,
    pub class_sums: [f64; EMOTION_COUNT],
    pub mean: f64,
    pub z: usize,
    pub collision: bool,
}

/// Greedy leader clustering over cosine similarity: scan in input order,
/// join the first existing leader with similarity ≥ `tau`, else open a
/// new cluster. Returns a cluster id per example.
pub fn cluster_objects(examples: &[LabeledExample], tau: f64) -> Result<Vec<usize>, Error> {
    if examples.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    let dim = examples[0].embedding.len();
    let mut leaders: Vec<usize> = Vec::new();
    let mut ids = Vec::with_capacity(examples.len());
    for example in examples {
        if example.embedding.len() != dim {
            return Err(Error::Dimension {
                context: "cluster_objects embedding",
                expected: dim,
                actual: example.embedding.len(),
            });
        }
        let mut assigned = None;
        for (cluster, leader) in leaders.iter().enumerate() {
            let cos = cosine_similarity(&example.embedding, &examples[*leader].embedding)?;
            if cos >= tau - TAU_SLACK {
                assigned = Some(cluster);
                break;
            }
        }
        match assigned {
            Some(cluster) => ids.push(cluster),
            None => {
                leaders.push(ids.len());
                ids.push(leaders.len() - 1);
            }
        }
    }
    Ok(ids)
}

/// Steps 4–6: per-cluster class sums, their mean over the 7 classes, and
/// `Z` = number of classes with sum ≥ mean.
pub fn cluster_stats(
    examples: &[LabeledExample],
    ids: &[usize],
) -> Result<Vec<ClusterStats>, Error> {
    if examples.len() != ids.len() {
        return Err(Error::Dimension {
            context: "cluster_stats ids",
            expected: examples.len(),
            actual: ids.len(),
        });
    }
    let clusters = ids.iter().copied().max().map_or(0, |m| m + 1);
    let mut stats: Vec<ClusterStats> = (0..clusters)
        .map(|id| ClusterStats {
            id,
            size: 0,
            class_sums: [0.0; EMOTION_COUNT],
            mean: 0.0,
            z: 0,
            collision: false,
        })
        .collect();
    for (example, id) in examples.iter().zip(ids) {
        let entry = &mut stats[*id];
        entry.size += 1;
        for (sum, value) in entry.class_sums.iter_mut().zip(example.emotions.values()) {
            *sum += value;
        }
    }
    for entry in &mut stats {
        entry.mean = entry.class_sums.iter().sum::<f64>() / EMOTION_COUNT as f64;
        entry.z = entry
            .class_sums
            .iter()
            .filter(|sum| **sum >= entry.mean)
            .count();
    }
    Ok(stats)
}

/// Full collision pass: cluster, aggregate, flag clusters with `Z > k`,
/// and propagate the flag to every member example.
pub fn mark_collisions(
    examples: &mut [LabeledExample],
    params: &CollisionParams,
) -> Result<Vec<ClusterStats>, Error> {
    CollisionParams::new(params.k, params.tau)?;
    let ids = cluster_objects(examples, params.tau)?;
    let mut stats = cluster_stats(examples, &ids)?;
    for entry in &mut stats {
        entry.collision = entry.z > params.k;
    }
    for (example, id) in examples.iter_mut().zip(&ids) {
        example.collision = stats[*id].collision;
    }
    Ok(stats)
}

/// Drop flagged examples, preserving input order.
pub fn filter_collisions(examples: &[LabeledExample]) -> Vec<LabeledExample> {
    examples.iter().filter(|e| !e.collision).cloned().collect()
}
