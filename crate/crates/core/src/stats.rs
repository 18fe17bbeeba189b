//! Cohort-table statistics: 2×2 chi-square, Wilcoxon rank-sum with
//! normal approximation, and grouped descriptive summaries.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Two-sided tail of the standard normal at |z|.
fn normal_two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

/// Survival function of the chi-square distribution with one degree of
/// freedom.
fn chi_square_1df_p(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    erfc((x / 2.0).sqrt())
}

/// Counts of a 2×2 contingency table, rows = groups, columns =
/// categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable2x2 {
    pub counts: [[u64; 2]; 2],
}

impl ContingencyTable2x2 {
    pub fn new(counts: [[u64; 2]; 2]) -> Result<Self> {
        let total: u64 = counts.iter().flatten().sum();
        if total == 0 {
            return Err(Error::DegenerateTable("empty contingency table".into()));
        }
        Ok(ContingencyTable2x2 { counts })
    }
}

/// Pearson chi-square statistic and p-value, without continuity
/// correction.
pub fn chi_square_2x2(table: &ContingencyTable2x2) -> Result<(f64, f64)> {
    let c = &table.counts;
    let row = [c[0][0] + c[0][1], c[1][0] + c[1][1]];
    let col = [c[0][0] + c[1][0], c[0][1] + c[1][1]];
    let total = (row[0] + row[1]) as f64;
    if row.contains(&0) || col.contains(&0) {
        return Err(Error::DegenerateTable(
            "a row or column marginal is zero".into(),
        ));
    }
    let mut statistic = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let expected = row[i] as f64 * col[j] as f64 / total;
            let diff = c[i][j] as f64 - expected;
            statistic += diff * diff / expected;
        }
    }
    Ok((statistic, chi_square_1df_p(statistic)))
}

/// Mid-ranks of the pooled sample plus the tie-group sizes.
fn mid_ranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].partial_cmp(&pooled[b]).unwrap());
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        let rank = (i + 1 + j + 1) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

/// Wilcoxon rank-sum test with mid-ranks for ties and a tie-corrected
/// normal approximation. Returns the signed z statistic and the
/// two-sided p-value. A pooled sample with no rank variation yields
/// `(0, 1)`.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData(
            "rank-sum test needs two non-empty samples".into(),
        ));
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Validation("rank-sum input contains non-finite values".into()));
    }
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let n = na + nb;
    let mut pooled = Vec::with_capacity(a.len() + b.len());
    pooled.extend_from_slice(a);
    pooled.extend_from_slice(b);
    let (ranks, ties) = mid_ranks(&pooled);
    let w: f64 = ranks[..a.len()].iter().sum();
    let expected = na * (n + 1.0) / 2.0;
    let tie_term: f64 = ties
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return Ok((0.0, 1.0));
    }
    let z = (w - expected) / variance.sqrt();
    Ok((z, normal_two_sided_p(z).min(1.0)))
}

/// Descriptive summary of one sample. Non-finite inputs count as
/// missing. Quartiles interpolate linearly between order statistics
/// (inclusive method); the standard deviation is the sample (n − 1)
/// form used in cohort tables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveSummary {
    pub n: usize,
    pub missing: usize,
    pub mean: f64,
    pub std: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

fn quantile_inclusive(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

pub fn descriptive_summary(values: &[f64]) -> Result<DescriptiveSummary> {
    let mut clean: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let missing = values.len() - clean.len();
    if clean.is_empty() {
        return Err(Error::InsufficientData("summary of an empty sample".into()));
    }
    clean.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let n = clean.len();
    let mean = clean.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        (clean.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(DescriptiveSummary {
        n,
        missing,
        mean,
        std,
        median: quantile_inclusive(&clean, 0.5),
        q1: quantile_inclusive(&clean, 0.25),
        q3: quantile_inclusive(&clean, 0.75),
        min: clean[0],
        max: clean[n - 1],
    })
}

/// Summaries per group and pooled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub control: DescriptiveSummary,
    pub diabetic: DescriptiveSummary,
    pub pooled: DescriptiveSummary,
}

pub fn group_summary(control: &[f64], diabetic: &[f64]) -> Result<GroupSummary> {
    let mut pooled = control.to_vec();
    pooled.extend_from_slice(diabetic);
    Ok(GroupSummary {
        control: descriptive_summary(control)?,
        diabetic: descriptive_summary(diabetic)?,
        pooled: descriptive_summary(&pooled)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gender_table_reproduces_published_statistic() {
        let table = ContingencyTable2x2::new([[58, 32], [66, 178]]).unwrap();
        let (stat, p) = chi_square_2x2(&table).unwrap();
        assert!((stat - 39.3886).abs() < 0.01, "stat = {stat}");
        assert!(p < 0.0001);
    }

    #[test]
    fn proportional_table_scores_zero() {
        let table = ContingencyTable2x2::new([[10, 10], [20, 20]]).unwrap();
        let (stat, p) = chi_square_2x2(&table).unwrap();
        assert!(stat.abs() < 1e-12);
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_table_hand_computed() {
        let table = ContingencyTable2x2::new([[10, 0], [0, 10]]).unwrap();
        let (stat, _) = chi_square_2x2(&table).unwrap();
        assert!((stat - 20.0).abs() < 1e-12);
    }

    #[test]
    fn zero_marginal_is_degenerate() {
        let table = ContingencyTable2x2::new([[5, 0], [7, 0]]).unwrap();
        assert!(chi_square_2x2(&table).is_err());
    }

    #[test]
    fn chi_square_invariant_under_row_and_column_swap() {
        let (s0, _) = chi_square_2x2(&ContingencyTable2x2::new([[12, 5], [3, 20]]).unwrap())
            .unwrap();
        let (s1, _) = chi_square_2x2(&ContingencyTable2x2::new([[3, 20], [12, 5]]).unwrap())
            .unwrap();
        let (s2, _) = chi_square_2x2(&ContingencyTable2x2::new([[5, 12], [20, 3]]).unwrap())
            .unwrap();
        assert!((s0 - s1).abs() < 1e-12);
        assert!((s0 - s2).abs() < 1e-12);
    }

    #[test]
    fn identical_samples_give_zero_z() {
        let a = [1.0, 2.0, 3.0];
        let (z, p) = rank_sum_test(&a, &a).unwrap();
        assert_eq!(z, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_computed_rank_sum() {
        let (z, _) = rank_sum_test(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert!((z - (-1.549)).abs() < 0.001, "z = {z}");
    }

    #[test]
    fn constant_pooled_sample_degenerates_cleanly() {
        let (z, p) = rank_sum_test(&[5.0, 5.0], &[5.0, 5.0, 5.0]).unwrap();
        assert_eq!((z, p), (0.0, 1.0));
    }

    #[test]
    fn rank_sum_invariant_under_monotone_transform() {
        let a = [0.3, 1.2, 2.8, 0.9];
        let b = [1.1, 3.5, 2.2];
        let (z0, _) = rank_sum_test(&a, &b).unwrap();
        let ta: Vec<f64> = a.iter().map(|v| v.exp()).collect();
        let tb: Vec<f64> = b.iter().map(|v| v.exp()).collect();
        let (z1, _) = rank_sum_test(&ta, &tb).unwrap();
        assert!((z0 - z1).abs() < 1e-12);
    }

    #[test]
    fn z_matches_exhaustive_permutation_moments() {
        // For samples this small the permutation mean and variance of W
        // are exactly the normal-approximation formulas, so the z
        // scores must agree.
        let cases: [(&[f64], &[f64]); 3] = [
            (&[1.0, 3.0, 3.0], &[2.0, 5.0, 6.0]),
            (&[4.0, 4.0], &[4.0, 1.0, 7.0, 4.0]),
            (&[2.5, 8.0, 2.5], &[1.0, 2.5, 9.0]),
        ];
        for (a, b) in cases {
            let (z, _) = rank_sum_test(a, b).unwrap();
            let z_perm = permutation_z(a, b);
            assert!((z - z_perm).abs() < 0.02, "z = {z}, permutation {z_perm}");
        }
    }

    fn permutation_z(a: &[f64], b: &[f64]) -> f64 {
        let mut pooled = a.to_vec();
        pooled.extend_from_slice(b);
        let (ranks, _) = mid_ranks(&pooled);
        let w_obs: f64 = ranks[..a.len()].iter().sum();
        let n = pooled.len();
        let k = a.len();
        let mut sums = Vec::new();
        let mut chosen = vec![false; n];
        enumerate_subsets(&ranks, &mut chosen, 0, k, 0.0, &mut sums);
        let mean = sums.iter().sum::<f64>() / sums.len() as f64;
        let var = sums.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / sums.len() as f64;
        (w_obs - mean) / var.sqrt()
    }

    fn enumerate_subsets(
        ranks: &[f64],
        chosen: &mut [bool],
        start: usize,
        remaining: usize,
        acc: f64,
        out: &mut Vec<f64>,
    ) {
        if remaining == 0 {
            out.push(acc);
            return;
        }
        for i in start..=ranks.len() - remaining {
            chosen[i] = true;
            enumerate_subsets(ranks, chosen, i + 1, remaining - 1, acc + ranks[i], out);
            chosen[i] = false;
        }
    }

    #[test]
    fn inclusive_quartiles_hand_case() {
        let s = descriptive_summary(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!((s.q1, s.median, s.q3), (2.0, 3.0, 4.0));
        assert_eq!((s.min, s.max), (1.0, 5.0));
    }

    #[test]
    fn constant_sample_summary() {
        let s = descriptive_summary(&[4.2; 6]).unwrap();
        assert_eq!(s.std, 0.0);
        assert_eq!(s.min, s.max);
    }

    #[test]
    fn non_finite_values_count_as_missing() {
        let s = descriptive_summary(&[1.0, f64::NAN, 3.0]).unwrap();
        assert_eq!(s.n, 2);
        assert_eq!(s.missing, 1);
    }

    #[test]
    fn summary_ordering_invariant() {
        let s = descriptive_summary(&[9.0, 1.0, 5.0, 3.0, 7.0, 2.0]).unwrap();
        assert!(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max);
    }

    #[test]
    fn scaling_preserves_test_statistics() {
        let a = [1.0, 4.0, 2.0, 6.0];
        let b = [3.0, 5.0, 8.0];
        let (z0, _) = rank_sum_test(&a, &b).unwrap();
        let sa: Vec<f64> = a.iter().map(|v| v * 10.0).collect();
        let sb: Vec<f64> = b.iter().map(|v| v * 10.0).collect();
        let (z1, _) = rank_sum_test(&sa, &sb).unwrap();
        assert!((z0 - z1).abs() < 1e-12);
    }
}
