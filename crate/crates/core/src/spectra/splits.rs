use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{SpectraError, TissueClass};

/// One labeled feature vector attributed to a subject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub subject: String,
    pub label: TissueClass,
    pub features: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub train_subjects: Vec<String>,
    pub test_subjects: Vec<String>,
    /// Indices into the dataset after per-subject capping.
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub cap: usize,
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Per-subject sample indices after capping every subject at three times
/// the smallest subject's count. Subsampling is seeded and the kept indices
/// are returned in ascending order.
pub fn capped_groups(samples: &[LabeledSample], seed: u64) -> (BTreeMap<String, Vec<usize>>, usize) {
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        groups.entry(s.subject.clone()).or_default().push(i);
    }
    let min = groups.values().map(Vec::len).min().unwrap_or(0);
    let cap = 3 * min;
    for (k, (_, idx)) in groups.iter_mut().enumerate() {
        if idx.len() > cap {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let mut keep: Vec<usize> = rand::seq::index::sample(&mut rng, idx.len(), cap)
                .into_iter()
                .map(|j| idx[j])
                .collect();
            keep.sort_unstable();
            *idx = keep;
        }
    }
    (groups, cap)
}

/// Every subject-level train/test partition at the ratio `train:test`.
///
/// With `n` subjects the test side holds `round(n·test / (train + test))`
/// subjects, so `4:2` over six subjects yields `C(6, 2) = 15` plans.
pub fn make_splits(samples: &[LabeledSample], train: usize, test: usize, seed: u64) -> Result<Vec<SplitPlan>, SpectraError> {
    let (groups, cap) = capped_groups(samples, seed);
    let n = groups.len();
    if train == 0 || test == 0 || n < train + test {
        return Err(SpectraError::TooFewSubjects {
            needed: train + test,
            got: n,
        });
    }
    let n_test = ((n * test) as f64 / (train + test) as f64).round() as usize;
    let ids: Vec<&String> = groups.keys().collect();
    Ok(combinations(n, n_test)
        .into_iter()
        .map(|test_set| {
            let mut plan = SplitPlan {
                train_subjects: Vec::new(),
                test_subjects: Vec::new(),
                train_indices: Vec::new(),
                test_indices: Vec::new(),
                cap,
            };
            for (k, id) in ids.iter().enumerate() {
                let members = &groups[*id];
                if test_set.contains(&k) {
                    plan.test_subjects.push((*id).clone());
                    plan.test_indices.extend(members);
                } else {
                    plan.train_subjects.push((*id).clone());
                    plan.train_indices.extend(members);
                }
            }
            plan
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(counts: &[usize]) -> Vec<LabeledSample> {
        counts
            .iter()
            .enumerate()
            .flat_map(|(s, &c)| {
                (0..c).map(move |i| LabeledSample {
                    subject: format!("m{s}"),
                    label: TissueClass::from_index(i % 2),
                    features: vec![i as f64],
                })
            })
            .collect()
    }

    #[test]
    fn six_subjects_four_two() {
        let plans = make_splits(&dataset(&[4; 6]), 4, 2, 0).unwrap();
        assert_eq!(plans.len(), 15);
        for p in &plans {
            assert_eq!(p.train_subjects.len(), 4);
            assert!(p.train_subjects.iter().all(|s| !p.test_subjects.contains(s)));
        }
    }

    #[test]
    fn three_subjects_two_one() {
        assert_eq!(make_splits(&dataset(&[3, 3, 3]), 2, 1, 0).unwrap().len(), 3);
        assert!(matches!(
            make_splits(&dataset(&[3, 3]), 2, 1, 0),
            Err(SpectraError::TooFewSubjects { .. })
        ));
    }

    #[test]
    fn caps_at_three_times_minimum() {
        let (groups, cap) = capped_groups(&dataset(&[5, 15, 50]), 7);
        assert_eq!(cap, 15);
        let sizes: Vec<usize> = groups.values().map(Vec::len).collect();
        assert_eq!(sizes, vec![5, 15, 15]);
        assert_eq!(capped_groups(&dataset(&[5, 15, 50]), 7).0, groups);
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(6, 2).len(), 15);
        assert_eq!(combinations(5, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(4, 4), vec![vec![0, 1, 2, 3]]);
    }
}
