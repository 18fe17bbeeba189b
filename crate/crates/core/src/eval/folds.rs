//! Stratified k-fold plans with a nested validation split.
//!
//! Per-class indices are shuffled once and dealt to folds through a
//! cursor that carries across classes, so test folds are balanced to
//! within one sample both per class and in total. A seeded 20%
//! stratified subset of each fold's training portion is spared as the
//! validation set; by default it sits idle and is only consumed when
//! boosting early-stop is enabled.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng, tag};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub folds: Vec<Fold>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.folds.len()
    }
}

const VALIDATION_FRACTION: f64 = 0.2;

/// Builds a stratified k-fold plan. Each class must have at least `k`
/// members.
pub fn stratified_kfold(labels: &[u8], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Config(format!("fold count {k} must be at least 2")));
    }
    if labels.len() < k {
        return Err(Error::InsufficientData(format!(
            "{} samples cannot fill {k} folds",
            labels.len()
        )));
    }
    let classes: Vec<u8> = {
        let mut c: Vec<u8> = labels.to_vec();
        c.sort_unstable();
        c.dedup();
        c
    };
    let mut shuffle_rng = rng(derive_seed(seed, &[tag::FOLDS]));
    let mut test_sets: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut cursor = 0usize;
    for &class in &classes {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        // Two members keep the class present in every training set even
        // when a round-robin pass leaves it out of some test folds.
        if members.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "class {class} has {} sample(s), cannot stratify over {k} folds",
                members.len()
            )));
        }
        members.shuffle(&mut shuffle_rng);
        for idx in members {
            test_sets[cursor % k].push(idx);
            cursor += 1;
        }
    }

    let mut folds = Vec::with_capacity(k);
    for (f, test) in test_sets.iter_mut().enumerate() {
        test.sort_unstable();
        let mut train_pool: Vec<usize> = (0..labels.len())
            .filter(|i| !test.contains(i))
            .collect();
        // Stratified validation subset of the training portion.
        let mut val_rng = rng(derive_seed(seed, &[tag::FOLD_VALIDATION, f as u64]));
        let mut validation = Vec::new();
        for &class in &classes {
            let mut members: Vec<usize> = train_pool
                .iter()
                .copied()
                .filter(|&i| labels[i] == class)
                .collect();
            members.shuffle(&mut val_rng);
            let take = (members.len() as f64 * VALIDATION_FRACTION).floor() as usize;
            validation.extend_from_slice(&members[..take]);
        }
        validation.sort_unstable();
        train_pool.retain(|i| !validation.contains(i));
        folds.push(Fold {
            train: train_pool,
            validation,
            test: std::mem::take(test),
        });
    }
    Ok(FoldPlan { folds })
}
