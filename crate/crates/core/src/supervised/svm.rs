//! L2-regularized hinge-loss linear classifier trained by epoch-wise
//! stochastic subgradient descent with step size 1/(reg * t). Shuffling
//! is driven solely by the seed, so identical inputs give bit-identical
//! models.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_binary, check_dims, FeatureVector, SupervisedError};
use crate::corpus::Polarity;

pub const DEFAULT_EPOCHS: usize = 50;
pub const DEFAULT_REG: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub reg: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl SvmModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self, dim: usize) -> Result<(), SupervisedError> {
        if self.weights.len() != dim {
            return Err(SupervisedError::BadArtifact(
                "weight length does not match feature space".to_string(),
            ));
        }
        if !self.bias.is_finite() || self.weights.iter().any(|w| !w.is_finite()) {
            return Err(SupervisedError::BadArtifact(
                "non-finite model parameters".to_string(),
            ));
        }
        if self.reg <= 0.0 {
            return Err(SupervisedError::BadArtifact(
                "non-positive regularization".to_string(),
            ));
        }
        Ok(())
    }
}

fn label_sign(label: Polarity) -> f64 {
    match label {
        Polarity::Positive => 1.0,
        _ => -1.0,
    }
}

fn margin(model_w: &[f64], bias: f64, vector: &FeatureVector) -> f64 {
    bias + vector.indices().iter().map(|&i| model_w[i]).sum::<f64>()
}

pub fn train_svm(
    vectors: &[FeatureVector],
    labels: &[Polarity],
    dim: usize,
    reg: f64,
    epochs: usize,
    seed: u64,
) -> Result<SvmModel, SupervisedError> {
    assert_eq!(vectors.len(), labels.len());
    if vectors.is_empty() {
        return Err(SupervisedError::EmptyTrainingSet);
    }
    if reg <= 0.0 {
        return Err(SupervisedError::NonPositiveReg);
    }
    check_binary(labels)?;
    for v in vectors {
        check_dims(v, dim)?;
    }

    let mut weights = vec![0.0f64; dim];
    let mut bias = 0.0f64;
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 0u64;
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &idx in &order {
            t += 1;
            let eta = 1.0 / (reg * t as f64);
            let y = label_sign(labels[idx]);
            let m = y * margin(&weights, bias, &vectors[idx]);
            let shrink = 1.0 - eta * reg;
            for w in &mut weights {
                *w *= shrink;
            }
            if m < 1.0 {
                for &i in vectors[idx].indices() {
                    weights[i] += eta * y;
                }
                // bias is not regularized
                bias += eta * y;
            }
        }
    }
    Ok(SvmModel {
        weights,
        bias,
        reg,
        epochs,
        seed,
    })
}

/// sign(w . x + b); a zero margin resolves negative.
pub fn predict_svm(model: &SvmModel, vector: &FeatureVector) -> Result<Polarity, SupervisedError> {
    check_dims(vector, model.dim())?;
    let m = margin(&model.weights, model.bias, vector);
    Ok(if m > 0.0 {
        Polarity::Positive
    } else {
        Polarity::Negative
    })
}

/// Regularized training objective: (reg/2)|w|^2 + mean hinge loss.
pub fn svm_objective(
    weights: &[f64],
    bias: f64,
    reg: f64,
    vectors: &[FeatureVector],
    labels: &[Polarity],
) -> f64 {
    let norm_sq: f64 = weights.iter().map(|w| w * w).sum();
    let hinge: f64 = vectors
        .iter()
        .zip(labels)
        .map(|(v, &l)| (1.0 - label_sign(l) * margin(weights, bias, v)).max(0.0))
        .sum::<f64>()
        / vectors.len() as f64;
    0.5 * reg * norm_sq + hinge
}
