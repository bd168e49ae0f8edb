mod oracle;

use bugmatch_core::eval::{commit_metrics, line_metrics, roc_auc, split_periods, ConfusionCounts, Role};
use bugmatch_core::{EvalMode, Label};
use proptest::prelude::*;

fn label(b: bool) -> Label {
    if b { Label::Buggy } else { Label::Clean }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn commit_metrics_match_brute_force(rows in prop::collection::vec((any::<bool>(), any::<bool>(), 0u8..8), 0..60)) {
        let mut counts = ConfusionCounts::default();
        let mut scores = Vec::new();
        for &(p, a, s) in &rows {
            counts.record(p, a);
            scores.push((f64::from(s) / 7.0, label(a)));
        }
        prop_assert_eq!(counts.total() as usize, rows.len());
        let m = commit_metrics(&counts, &scores);
        let (pred, act): (Vec<bool>, Vec<bool>) = rows.iter().map(|r| (r.0, r.1)).unzip();
        let b = oracle::commit_metrics(&pred, &act);
        for (x, y) in [(m.precision, b.precision), (m.recall, b.recall), (m.f1, b.f1), (m.far, b.far), (m.d2h, b.d2h)] {
            prop_assert!((x - y).abs() <= 1e-12, "{} vs {}", x, y);
            prop_assert!((0.0..=1.0).contains(&x));
        }
        match (m.auc, oracle::pair_auc(&scores)) {
            (None, None) => {}
            (Some(a), Some((num, den))) => prop_assert!((a - num as f64 / den as f64).abs() <= 1e-12),
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn auc_invariant_under_increasing_maps(rows in prop::collection::vec((0u16..500, any::<bool>()), 2..50)) {
        let scores: Vec<(f64, Label)> = rows.iter().map(|&(s, b)| (f64::from(s), label(b))).collect();
        let mapped: Vec<(f64, Label)> = scores.iter().map(|&(s, l)| (s * s * s + 3.0 * s - 2.0, l)).collect();
        let logged: Vec<(f64, Label)> = scores.iter().map(|&(s, l)| ((1.0 + s).ln(), l)).collect();
        prop_assert_eq!(roc_auc(&scores), roc_auc(&mapped));
        prop_assert_eq!(roc_auc(&scores), roc_auc(&logged));
    }

    #[test]
    fn line_metrics_match_brute_force(buggy in prop::collection::vec(any::<bool>(), 1..80), k in 1usize..20) {
        let m = line_metrics(&buggy, k);
        let b = oracle::line_metrics(&buggy, k);
        prop_assert!((m.top_k_accuracy - b.top_k).abs() <= 1e-12);
        prop_assert!((m.recall_at_20pct_loc - b.recall_20).abs() <= 1e-12);
        prop_assert!((m.effort_at_20pct_recall - b.effort_20).abs() <= 1e-12);
        prop_assert_eq!(m.ifa, b.ifa);
    }

    #[test]
    fn splits_never_time_travel(mut days in prop::collection::vec(0i64..800, 2..120), w in 1u32..200, g in 0u32..100) {
        days.sort_unstable();
        let ts: Vec<i64> = days.iter().map(|d| d * 86_400 + 17).collect();
        let inc = split_periods(&ts, w, g, EvalMode::Increasing);
        let con = split_periods(&ts, w, g, EvalMode::Constant);
        let Ok(inc) = inc else { return Ok(()) };
        let con = con.unwrap();
        for s in &inc {
            let train: Vec<i64> = ts.iter().copied().filter(|&t| s.role(t) == Role::Train).collect();
            let test: Vec<i64> = ts.iter().copied().filter(|&t| s.role(t) == Role::Test).collect();
            prop_assert!(!train.is_empty() && !test.is_empty());
            prop_assert!(train.iter().max() < test.iter().min());
            for &t in &ts {
                if s.gap_range.contains(t) {
                    prop_assert_eq!(s.role(t), Role::Gap);
                }
            }
        }
        // every constant-mode training set is contained in the increasing one
        for c in &con {
            let Some(i) = inc.iter().find(|i| i.test_range == c.test_range) else {
                prop_assert!(false, "constant period without increasing twin");
                unreachable!()
            };
            for &t in &ts {
                if c.role(t) == Role::Train {
                    prop_assert_eq!(i.role(t), Role::Train);
                }
            }
        }
    }
}

#[test]
fn always_clean_reference() {
    let counts = ConfusionCounts { tp: 0, fp: 0, tn: 40, fn_: 6 };
    let m = commit_metrics(&counts, &[]);
    assert_eq!((m.recall, m.far, m.precision), (0.0, 0.0, 0.0));
    assert!((m.d2h - 0.5f64.sqrt()).abs() < 1e-15);
}
