//! Synthetic labelled datasets for desk-scale verification: orthonormal
//! class anchors, one direction per emotion, plus Gaussian noise.

use emogan_core::emotext::{EmotionVector, LabeledExample, EMOTION_COUNT};
use emogan_core::mathkit::{dot, norm, standard_normal, EPS_NORM};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};

/// Recipe for a synthetic dataset.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub dim: usize,
    pub noise_sigma: f64,
    pub examples_per_combo: usize,
    pub combos: Vec<EmotionVector>,
    pub seed: u64,
}

/// Seven random orthonormal directions in `dim` dimensions
/// (Gram-Schmidt over Gaussian draws).
pub fn orthonormal_anchors(dim: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
    if dim < EMOTION_COUNT {
        return Err(CliError::Usage(format!(
            "dim must be at least {EMOTION_COUNT} for orthonormal anchors, got {dim}"
        )));
    }
    let mut anchors: Vec<Vec<f64>> = Vec::with_capacity(EMOTION_COUNT);
    while anchors.len() < EMOTION_COUNT {
        let mut candidate: Vec<f64> = (0..dim).map(|_| standard_normal(rng)).collect();
        for anchor in &anchors {
            let projection = dot(&candidate, anchor).unwrap();
            for (c, a) in candidate.iter_mut().zip(anchor) {
                *c -= projection * a;
            }
        }
        let n = norm(&candidate);
        if n < 1e-6 {
            continue; // degenerate draw, take another
        }
        for c in &mut candidate {
            *c /= n;
        }
        anchors.push(candidate);
    }
    Ok(anchors)
}

/// Generate the dataset: for each requested combination, the normalized
/// sum of its active anchors plus `N(0, σ²)` noise per component.
pub fn generate(spec: &SyntheticSpec) -> Result<Vec<LabeledExample>> {
    if spec.noise_sigma < 0.0 {
        return Err(CliError::Usage("noise_sigma must be non-negative".into()));
    }
    if spec.examples_per_combo == 0 {
        return Err(CliError::Usage(
            "examples_per_combo must be at least 1".into(),
        ));
    }
    if spec.combos.is_empty() {
        return Err(CliError::Usage("combos must not be empty".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for combo in &spec.combos {
        if !combo.is_binary() {
            return Err(CliError::Usage(
                "combos must be binary emotion vectors".into(),
            ));
        }
        let mask: u8 = combo
            .values()
            .iter()
            .fold(0, |acc, v| (acc << 1) | (*v as u8));
        if !seen.insert(mask) {
            return Err(CliError::Usage("combos must be distinct".into()));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let anchors = orthonormal_anchors(spec.dim, &mut rng)?;
    let mut examples = Vec::with_capacity(spec.combos.len() * spec.examples_per_combo);
    for combo in &spec.combos {
        let mut base = vec![0.0; spec.dim];
        for class in combo.active_classes() {
            for (b, a) in base.iter_mut().zip(&anchors[class]) {
                *b += a;
            }
        }
        let n = norm(&base);
        if n > EPS_NORM {
            for b in &mut base {
                *b /= n;
            }
        }
        for _ in 0..spec.examples_per_combo {
            let embedding: Vec<f64> = base
                .iter()
                .map(|b| b + spec.noise_sigma * standard_normal(&mut rng))
                .collect();
            examples.push(LabeledExample::new(embedding, combo.clone()));
        }
    }
    Ok(examples)
}
