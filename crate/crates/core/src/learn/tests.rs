use rand::Rng;

use super::*;
use crate::seed::rng;

fn all_kinds() -> Vec<ClassifierKind> {
    vec![
        ClassifierKind::cart(),
        ClassifierKind::random_forest(),
        ClassifierKind::extra_trees(),
        ClassifierKind::adaboost(),
        ClassifierKind::gradient_boosting(),
        ClassifierKind::knn(),
        ClassifierKind::logistic(),
        ClassifierKind::lda(),
    ]
}

fn random_problem(seed: u64, n: usize, d: usize) -> (Matrix, Vec<u8>) {
    let mut r = rng(seed);
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let label = u8::from(i % 2 == 0);
        let mut row = Vec::with_capacity(d);
        for j in 0..d {
            let shift = if j == 0 { 2.0 * label as f64 } else { 0.0 };
            row.push(shift + r.random::<f64>());
        }
        rows.push(row);
        y.push(label);
    }
    (Matrix::from_rows(rows).unwrap(), y)
}

#[test]
fn fits_are_pure_functions_of_spec_and_data() {
    let (x, y) = random_problem(3, 30, 4);
    for kind in all_kinds() {
        let spec = ClassifierSpec::new(kind, 17).unwrap();
        let a = fit(&spec, &x, &y).unwrap();
        let b = fit(&spec, &x, &y).unwrap();
        assert_eq!(
            a.to_json().unwrap(),
            b.to_json().unwrap(),
            "{} fit is not deterministic",
            spec.kind.name()
        );
    }
}

#[test]
fn scores_mirror_under_label_complement() {
    let (x, y) = random_problem(11, 24, 3);
    let flipped: Vec<u8> = y.iter().map(|&v| 1 - v).collect();
    for kind in all_kinds() {
        let spec = ClassifierSpec::new(kind.clone(), 5).unwrap();
        let direct = fit(&spec, &x, &y).unwrap().predict_scores(&x).unwrap();
        let complement = fit(&spec, &x, &flipped)
            .unwrap()
            .predict_scores(&x)
            .unwrap();
        for (i, (s, c)) in direct.iter().zip(complement.iter()).enumerate() {
            assert!(
                (s - (1.0 - c)).abs() < 1e-9,
                "{}: sample {i}, {s} vs 1-{c}",
                kind.name()
            );
        }
    }
}

#[test]
fn knn_nearest_neighbor_example() {
    let x = Matrix::from_rows(vec![vec![0.0], vec![10.0]]).unwrap();
    let y = vec![0, 1];
    let spec = ClassifierSpec::new(ClassifierKind::Knn { k: 1 }, 0).unwrap();
    let model = fit(&spec, &x, &y).unwrap();
    let q = Matrix::from_rows(vec![vec![1.0]]).unwrap();
    assert_eq!(model.predict_labels(&q).unwrap(), vec![0]);
}

#[test]
fn single_class_labels_are_unsupported() {
    let x = Matrix::from_rows(vec![vec![1.0], vec![2.0]]).unwrap();
    let err = fit(
        &ClassifierSpec::new(ClassifierKind::cart(), 0).unwrap(),
        &x,
        &[1, 1],
    )
    .unwrap_err();
    assert!(matches!(err, Error::Unsupported(_)));
}

#[test]
fn non_finite_features_are_rejected() {
    let x = Matrix::from_rows(vec![vec![1.0], vec![f64::NAN]]).unwrap();
    let err = fit(
        &ClassifierSpec::new(ClassifierKind::cart(), 0).unwrap(),
        &x,
        &[0, 1],
    )
    .unwrap_err();
    assert!(matches!(err, Error::Validation(_)));
}

#[test]
fn prediction_shape_is_checked() {
    let (x, y) = random_problem(2, 10, 3);
    let model = fit(&ClassifierSpec::new(ClassifierKind::knn(), 0).unwrap(), &x, &y).unwrap();
    let wrong = Matrix::from_rows(vec![vec![1.0, 2.0]]).unwrap();
    assert!(matches!(
        model.predict_scores(&wrong),
        Err(Error::Shape(_))
    ));
}

#[test]
fn importances_normalize_and_rank_noise_last() {
    // Two informative features, one label-independent noise feature.
    let mut r = rng(8);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for i in 0..80 {
        let label = u8::from(i % 2 == 0);
        rows.push(vec![
            3.0 * label as f64 + r.random::<f64>(),
            -2.0 * label as f64 + r.random::<f64>(),
            r.random::<f64>(),
        ]);
        y.push(label);
    }
    let x = Matrix::from_rows(rows).unwrap();
    let spec = ClassifierSpec::new(
        ClassifierKind::RandomForest {
            trees: 200,
            max_depth: None,
            min_leaf: 1,
            feature_subsample: FeatureSubsample::Sqrt,
            bootstrap: true,
        },
        21,
    )
    .unwrap();
    let model = fit(&spec, &x, &y).unwrap();
    let imp = model.feature_importances().unwrap();
    assert!((imp.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(imp[2] < imp[0] && imp[2] < imp[1], "importances: {imp:?}");
}

#[test]
fn importances_unsupported_for_non_tree_models() {
    let (x, y) = random_problem(4, 12, 2);
    let model = fit(&ClassifierSpec::new(ClassifierKind::knn(), 0).unwrap(), &x, &y).unwrap();
    assert!(matches!(
        model.feature_importances(),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn label_copy_feature_ranks_first() {
    let mut r = rng(13);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for i in 0..40 {
        let label = u8::from(i % 2 == 0);
        rows.push(vec![r.random::<f64>(), label as f64, r.random::<f64>()]);
        y.push(label);
    }
    let x = Matrix::from_rows(rows).unwrap();
    for ranker in RankerKind::all() {
        let order = rank_features(ranker, &x, &y, 2).unwrap();
        assert_eq!(order[0], 1, "{}: {order:?}", ranker.name());
    }
}

#[test]
fn ranking_is_deterministic() {
    let (x, y) = random_problem(19, 40, 6);
    for ranker in RankerKind::all() {
        let a = rank_features(ranker, &x, &y, 33).unwrap();
        let b = rank_features(ranker, &x, &y, 33).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn deterministic_ranker_is_permutation_equivariant() {
    // Gradient boosting has no random component, so permuting the
    // feature columns permutes its ranking identically as long as no
    // two features ever tie on split decrease (exact ties fall back to
    // index order, which is position-dependent by construction). Two
    // overlapping features of clearly different strength keep the fit
    // tie-free.
    let mut r = rng(29);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for i in 0..24 {
        let label = u8::from(i % 2 == 0);
        let l = label as f64;
        rows.push(vec![
            1.4 * l + 2.0 * r.random::<f64>(),
            0.5 * l + 2.0 * r.random::<f64>(),
        ]);
        y.push(label);
    }
    let x = Matrix::from_rows(rows).unwrap();
    let perm = [1usize, 0];
    let xp = x.select_cols(&perm);
    let base = rank_features(RankerKind::GradientBoosting, &x, &y, 0).unwrap();
    let permuted = rank_features(RankerKind::GradientBoosting, &xp, &y, 0).unwrap();
    let expected: Vec<usize> = base
        .iter()
        .map(|&orig| perm.iter().position(|&p| p == orig).unwrap())
        .collect();
    assert_eq!(permuted, expected);
    // The stronger feature leads both rankings.
    assert_eq!(base[0], 0);
    assert_eq!(permuted[0], 1);
}

#[test]
fn serialization_round_trips_for_every_family() {
    let (x, y) = random_problem(7, 20, 3);
    for kind in all_kinds() {
        let spec = ClassifierSpec::new(kind, 77).unwrap();
        let model = fit(&spec, &x, &y)
            .unwrap()
            .with_feature_names(vec!["a".into(), "b".into(), "c".into()]);
        let json = model.to_json().unwrap();
        let back = TrainedModel::from_json(&json).unwrap();
        assert_eq!(model, back);
        let s0 = model.predict_scores(&x).unwrap();
        let s1 = back.predict_scores(&x).unwrap();
        assert_eq!(s0, s1);
    }
}

#[test]
fn spec_validation_catches_bad_hyperparameters() {
    assert!(ClassifierSpec::new(
        ClassifierKind::GradientBoosting {
            stages: 10,
            max_depth: 3,
            learning_rate: 1.5,
        },
        0
    )
    .is_err());
    assert!(ClassifierSpec::new(ClassifierKind::Knn { k: 0 }, 0).is_err());
    assert!(ClassifierSpec::new(
        ClassifierKind::Adaboost {
            stages: 10,
            weak_depth: 4,
        },
        0
    )
    .is_err());
}

#[test]
fn hand_computed_gini_decrease_example() {
    // y = (0,0,1,1) over x = (1,2,3,4): threshold 2.5 gives pure
    // children, decrease 0.5 from a 0.5-impurity parent.
    let x = Matrix::from_rows(vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]]).unwrap();
    let y = vec![0, 0, 1, 1];
    let spec = ClassifierSpec::new(
        ClassifierKind::Cart {
            max_depth: Some(1),
            min_leaf: 1,
        },
        0,
    )
    .unwrap();
    let model = fit(&spec, &x, &y).unwrap();
    match model.tree().unwrap() {
        TreeNode::Split {
            threshold,
            impurity_decrease,
            ..
        } => {
            assert!((threshold - 2.5).abs() < 1e-12);
            assert!((impurity_decrease - 0.5).abs() < 1e-12);
        }
        TreeNode::Leaf { .. } => panic!("expected a split"),
    }
    assert_eq!(model.predict_labels(&x).unwrap(), y);
}
