//! Bernoulli naive Bayes over binary presence vectors, with add-1
//! Laplace smoothing. Both presence and absence terms enter the
//! posterior, matching the presence/absence feature definition.

use serde::{Deserialize, Serialize};

use super::{check_binary, check_dims, FeatureVector, SupervisedError};
use crate::corpus::Polarity;

const CLASSES: [Polarity; 2] = [Polarity::Positive, Polarity::Negative];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    /// log P(class), indexed [positive, negative].
    pub log_prior: [f64; 2],
    /// Per feature, log P(present | class).
    pub log_present: Vec<[f64; 2]>,
    /// Per feature, log P(absent | class).
    pub log_absent: Vec<[f64; 2]>,
}

impl NbModel {
    pub fn dim(&self) -> usize {
        self.log_present.len()
    }

    pub fn validate(&self, dim: usize) -> Result<(), SupervisedError> {
        let bad = |reason: &str| Err(SupervisedError::BadArtifact(reason.to_string()));
        if self.log_present.len() != dim || self.log_absent.len() != dim {
            return bad("parameter length does not match feature space");
        }
        let prior_sum: f64 = self.log_prior.iter().map(|lp| lp.exp()).sum();
        if (prior_sum - 1.0).abs() > 1e-12 {
            return bad("class priors do not sum to 1");
        }
        for (p, a) in self.log_present.iter().zip(&self.log_absent) {
            for c in 0..2 {
                if (p[c].exp() + a[c].exp() - 1.0).abs() > 1e-12 {
                    return bad("P(present) + P(absent) != 1");
                }
            }
        }
        Ok(())
    }
}

fn class_index(p: Polarity) -> usize {
    match p {
        Polarity::Positive => 0,
        _ => 1,
    }
}

/// Trains on labeled presence vectors. `dim` is the feature-space size.
pub fn train_nb(
    vectors: &[FeatureVector],
    labels: &[Polarity],
    dim: usize,
) -> Result<NbModel, SupervisedError> {
    assert_eq!(vectors.len(), labels.len());
    if vectors.is_empty() {
        return Err(SupervisedError::EmptyTrainingSet);
    }
    check_binary(labels)?;
    for v in vectors {
        check_dims(v, dim)?;
    }

    let mut class_counts = [0usize; 2];
    let mut present_counts = vec![[0usize; 2]; dim];
    for (vector, &label) in vectors.iter().zip(labels) {
        let c = class_index(label);
        class_counts[c] += 1;
        for &i in vector.indices() {
            present_counts[i][c] += 1;
        }
    }

    let total = vectors.len() as f64;
    let log_prior = CLASSES.map(|p| (class_counts[class_index(p)] as f64 / total).ln());
    let mut log_present = Vec::with_capacity(dim);
    let mut log_absent = Vec::with_capacity(dim);
    for counts in &present_counts {
        let mut lp = [0.0; 2];
        let mut la = [0.0; 2];
        for c in 0..2 {
            // add-1 smoothing over the two outcomes (present / absent)
            let p = (counts[c] as f64 + 1.0) / (class_counts[c] as f64 + 2.0);
            lp[c] = p.ln();
            la[c] = (1.0 - p).ln();
        }
        log_present.push(lp);
        log_absent.push(la);
    }
    Ok(NbModel {
        log_prior,
        log_present,
        log_absent,
    })
}

/// Argmax of class posteriors in log space; returns the winning class
/// and the normalized posterior pair (positive, negative). An exact tie
/// resolves negative.
pub fn predict_nb(
    model: &NbModel,
    vector: &FeatureVector,
) -> Result<(Polarity, [f64; 2]), SupervisedError> {
    check_dims(vector, model.dim())?;
    // Accumulating the class log-odds in one sum keeps symmetric cases
    // at an exact zero, where the tie rule applies.
    let mut log_odds = model.log_prior[0] - model.log_prior[1];
    for (i, (lp, la)) in model.log_present.iter().zip(&model.log_absent).enumerate() {
        let term = if vector.is_active(i) { lp } else { la };
        log_odds += term[0] - term[1];
    }
    let pos_posterior = 1.0 / (1.0 + (-log_odds).exp());
    let posterior = [pos_posterior, 1.0 - pos_posterior];
    let polarity = if log_odds > 0.0 {
        Polarity::Positive
    } else {
        Polarity::Negative
    };
    Ok((polarity, posterior))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(indices: &[usize]) -> FeatureVector {
        FeatureVector::from_indices(indices.to_vec())
    }

    // 2 positive docs with feature A, 2 negative with feature B.
    fn toy() -> (Vec<FeatureVector>, Vec<Polarity>) {
        (
            vec![v(&[0]), v(&[0]), v(&[1]), v(&[1])],
            vec![
                Polarity::Positive,
                Polarity::Positive,
                Polarity::Negative,
                Polarity::Negative,
            ],
        )
    }

    #[test]
    fn smoothed_conditional_is_three_quarters() {
        let (vectors, labels) = toy();
        let model = train_nb(&vectors, &labels, 2).unwrap();
        // P(A present | positive) = (2+1)/(2+2)
        assert!((model.log_present[0][0].exp() - 0.75).abs() < 1e-12);
        // P(A present | negative) = (0+1)/(2+2)
        assert!((model.log_present[0][1].exp() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn toy_docs_classified_to_own_label() {
        let (vectors, labels) = toy();
        let model = train_nb(&vectors, &labels, 2).unwrap();
        assert_eq!(predict_nb(&model, &v(&[0])).unwrap().0, Polarity::Positive);
        assert_eq!(predict_nb(&model, &v(&[1])).unwrap().0, Polarity::Negative);
    }

    #[test]
    fn symmetric_swap_gives_symmetric_model() {
        let (vectors, labels) = toy();
        let model = train_nb(&vectors, &labels, 2).unwrap();
        let swapped_vectors = vec![v(&[1]), v(&[1]), v(&[0]), v(&[0])];
        let swapped = train_nb(&swapped_vectors, &labels, 2).unwrap();
        assert!((model.log_present[0][0] - swapped.log_present[1][0]).abs() < 1e-12);
        assert!((model.log_present[1][1] - swapped.log_present[0][1]).abs() < 1e-12);
    }

    #[test]
    fn symmetric_tie_resolves_negative() {
        let (vectors, labels) = toy();
        let model = train_nb(&vectors, &labels, 2).unwrap();
        // empty vector: absence terms are symmetric across classes
        let (pol, posterior) = predict_nb(&model, &v(&[])).unwrap();
        assert!((posterior[0] - 0.5).abs() < 1e-12);
        assert!((posterior[1] - 0.5).abs() < 1e-12);
        assert_eq!(pol, Polarity::Negative);
    }

    #[test]
    fn posteriors_sum_to_one() {
        let (vectors, labels) = toy();
        let model = train_nb(&vectors, &labels, 2).unwrap();
        for indices in [&[][..], &[0], &[1], &[0, 1]] {
            let (_, posterior) = predict_nb(&model, &v(indices)).unwrap();
            assert!((posterior[0] + posterior[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn missing_class_rejected() {
        let vectors = vec![v(&[0])];
        let labels = vec![Polarity::Positive];
        assert!(matches!(
            train_nb(&vectors, &labels, 1),
            Err(SupervisedError::MissingClass(Polarity::Negative))
        ));
    }

    #[test]
    fn neutral_label_rejected() {
        let vectors = vec![v(&[0]), v(&[0])];
        let labels = vec![Polarity::Positive, Polarity::Neutral];
        assert!(matches!(
            train_nb(&vectors, &labels, 1),
            Err(SupervisedError::NonBinaryLabel(_))
        ));
    }

    #[test]
    fn out_of_range_vector_rejected() {
        let (vectors, labels) = toy();
        let model = train_nb(&vectors, &labels, 2).unwrap();
        assert!(matches!(
            predict_nb(&model, &v(&[5])),
            Err(SupervisedError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn model_invariants_validate() {
        let (vectors, labels) = toy();
        let model = train_nb(&vectors, &labels, 2).unwrap();
        model.validate(2).unwrap();
    }

    // Duplicating the training set must not change any decision.
    #[test]
    fn duplication_argmax_invariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let dim = 6usize;
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for i in 0..30 {
            let indices: Vec<usize> = (0..dim).filter(|_| rng.gen_bool(0.4)).collect();
            vectors.push(v(&indices));
            labels.push(if i % 2 == 0 {
                Polarity::Positive
            } else {
                Polarity::Negative
            });
        }
        let model = train_nb(&vectors, &labels, dim).unwrap();
        let doubled_vectors: Vec<FeatureVector> =
            vectors.iter().chain(vectors.iter()).cloned().collect();
        let doubled_labels: Vec<Polarity> =
            labels.iter().chain(labels.iter()).copied().collect();
        let doubled = train_nb(&doubled_vectors, &doubled_labels, dim).unwrap();
        for _ in 0..100 {
            let indices: Vec<usize> = (0..dim).filter(|_| rng.gen_bool(0.4)).collect();
            let probe = v(&indices);
            assert_eq!(
                predict_nb(&model, &probe).unwrap().0,
                predict_nb(&doubled, &probe).unwrap().0
            );
        }
    }
}
