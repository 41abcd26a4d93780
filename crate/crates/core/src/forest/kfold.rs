use std::collections::BTreeMap;

use crate::corpus::GradeLabel;
use crate::error::{Error, Result};

use super::rng::SplitMix64;

/// Fold index per input row.
pub type FoldAssignment = Vec<usize>;

/// Stratified fold assignment.
///
/// Rows are grouped by class and sorted by id, so input order does not
/// matter. Each class is shuffled with one seeded generator (classes in
/// ascending order), then rows are dealt round-robin, continuing the deal
/// across classes. Every class must have at least `k` rows.
pub fn stratified_kfold(ids: &[&str], labels: &[GradeLabel], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    if ids.len() != labels.len() {
        return Err(Error::LengthMismatch(ids.len(), labels.len()));
    }
    if ids.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut by_class: BTreeMap<GradeLabel, Vec<usize>> = BTreeMap::new();
    for (i, &label) in labels.iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }
    if let Some((label, members)) = by_class.iter().find(|(_, m)| m.len() < k) {
        return Err(Error::ClassTooSmall {
            label: label.level(),
            count: members.len(),
            k,
        });
    }

    let mut rng = SplitMix64::new(seed);
    let mut folds = vec![0; ids.len()];
    let mut position = 0;
    for members in by_class.values_mut() {
        members.sort_by(|&a, &b| ids[a].cmp(ids[b]));
        rng.shuffle(members);
        for &row in members.iter() {
            folds[row] = position % k;
            position += 1;
        }
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grades(levels: &[u8]) -> Vec<GradeLabel> {
        levels.iter().map(|&l| GradeLabel::new(l).unwrap()).collect()
    }

    #[test]
    fn exact_divisibility() {
        let ids: Vec<String> = (0..10).map(|i| format!("d{i}")).collect();
        let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
        let labels = grades(&[1, 1, 1, 1, 1, 2, 2, 2, 2, 2]);
        let folds = stratified_kfold(&ids, &labels, 5, 1).unwrap();
        for f in 0..5 {
            for g in [1, 2] {
                let n = (0..10).filter(|&i| folds[i] == f && labels[i].level() == g).count();
                assert_eq!(n, 1);
            }
        }
        assert_eq!(folds, stratified_kfold(&ids, &labels, 5, 1).unwrap());
    }

    #[test]
    fn small_class() {
        let ids = ["a", "b", "c", "d", "e", "f", "g", "h"];
        let labels = grades(&[1, 1, 1, 1, 1, 2, 2, 2]);
        let err = stratified_kfold(&ids, &labels, 5, 1).unwrap_err();
        assert!(matches!(err, Error::ClassTooSmall { label: 2, count: 3, k: 5 }));
        assert!(stratified_kfold(&ids, &labels, 1, 1).is_err());
    }

    proptest! {
        #[test]
        fn balanced_and_order_free(
            counts in proptest::collection::vec(5usize..20, 3),
            seed in any::<u64>(),
            rotate in 0usize..50,
        ) {
            let mut rows: Vec<(String, GradeLabel)> = Vec::new();
            for (c, &n) in counts.iter().enumerate() {
                for i in 0..n {
                    rows.push((format!("g{c}-{i:02}"), GradeLabel::new(c as u8 + 1).unwrap()));
                }
            }
            let ids: Vec<&str> = rows.iter().map(|r| r.0.as_str()).collect();
            let labels: Vec<GradeLabel> = rows.iter().map(|r| r.1).collect();
            let k = 5;
            let folds = stratified_kfold(&ids, &labels, k, seed).unwrap();
            for (c, &n) in counts.iter().enumerate() {
                let label = GradeLabel::new(c as u8 + 1).unwrap();
                for f in 0..k {
                    let in_fold = (0..rows.len()).filter(|&i| folds[i] == f && labels[i] == label).count();
                    prop_assert!(in_fold * k + k >= n && in_fold * k <= n + k);
                }
            }

            let shift = rotate % rows.len();
            let mut permuted = rows.clone();
            permuted.rotate_left(shift);
            let pids: Vec<&str> = permuted.iter().map(|r| r.0.as_str()).collect();
            let plabels: Vec<GradeLabel> = permuted.iter().map(|r| r.1).collect();
            let pfolds = stratified_kfold(&pids, &plabels, k, seed).unwrap();
            for (i, id) in ids.iter().enumerate() {
                let j = pids.iter().position(|p| p == id).unwrap();
                prop_assert_eq!(folds[i], pfolds[j]);
            }
        }
    }
}
