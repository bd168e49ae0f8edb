use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{EvalError, EvalMode};

pub const SECONDS_PER_DAY: i64 = 86_400;

/// Half-open `[start, end)` range of Unix seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeRange {
    pub start: i64,
    pub end: i64,
}

impl TimeRange {
    pub fn contains(&self, ts: i64) -> bool {
        self.start <= ts && ts < self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Train,
    Gap,
    Test,
    Unused,
}

/// One evaluable period: train, then a verification-latency gap, then test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodSplit {
    pub period_index: usize,
    pub mode: EvalMode,
    pub train_range: TimeRange,
    pub gap_range: TimeRange,
    pub test_range: TimeRange,
}

impl PeriodSplit {
    pub fn role(&self, ts: i64) -> Role {
        if self.test_range.contains(ts) {
            Role::Test
        } else if self.gap_range.contains(ts) {
            Role::Gap
        } else if self.train_range.contains(ts) {
            Role::Train
        } else {
            Role::Unused
        }
    }
}

/// Cuts a sorted timestamp sequence into consecutive windows of
/// `window_days`, starting at the first commit. Every window after the first
/// is a test window; the `gap_days` before it are left out, and training
/// covers everything earlier (increasing mode) or only the one window before
/// the gap (constant mode). Periods with no training or no test commits are
/// dropped.
pub fn split_periods(
    timestamps: &[i64],
    window_days: u32,
    gap_days: u32,
    mode: EvalMode,
) -> Result<Vec<PeriodSplit>, EvalError> {
    if window_days == 0 {
        return Err(EvalError::InvalidWindow);
    }
    if timestamps.windows(2).any(|w| w[0] > w[1]) {
        return Err(EvalError::Unsorted);
    }
    let window = i64::from(window_days) * SECONDS_PER_DAY;
    let gap = i64::from(gap_days) * SECONDS_PER_DAY;
    let (Some(&first), Some(&last)) = (timestamps.first(), timestamps.last()) else {
        return Err(EvalError::TooShort {
            span_seconds: 0,
            required_seconds: window + gap,
        });
    };
    if last - first < window + gap {
        return Err(EvalError::TooShort {
            span_seconds: last - first,
            required_seconds: window + gap,
        });
    }

    let count_in = |r: TimeRange| {
        let lo = timestamps.partition_point(|&t| t < r.start);
        let hi = timestamps.partition_point(|&t| t < r.end);
        hi - lo
    };

    let mut splits = Vec::new();
    let mut j = 1i64;
    while first + j * window <= last {
        let test_start = first + j * window;
        let train_end = test_start - gap;
        let test_range = TimeRange {
            start: test_start,
            end: test_start + window,
        };
        let gap_range = TimeRange {
            start: train_end,
            end: test_start,
        };
        let train_range = match mode {
            EvalMode::Increasing => TimeRange {
                start: first,
                end: train_end,
            },
            EvalMode::Constant => TimeRange {
                start: train_end - window,
                end: train_end,
            },
        };
        j += 1;
        if train_range.end <= first || count_in(train_range) == 0 || count_in(test_range) == 0 {
            continue;
        }
        splits.push(PeriodSplit {
            period_index: splits.len(),
            mode,
            train_range,
            gap_range,
            test_range,
        });
    }
    Ok(splits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const DAY: i64 = SECONDS_PER_DAY;

    #[test]
    fn three_windows_give_two_periods() {
        let ts: Vec<i64> = (0..90).map(|d| d * DAY).collect();
        let splits = split_periods(&ts, 30, 0, EvalMode::Increasing).unwrap();
        assert_eq!(splits.len(), 2);
        assert_eq!(splits[0].test_range, TimeRange { start: 30 * DAY, end: 60 * DAY });
        assert_eq!(splits[1].train_range, TimeRange { start: 0, end: 60 * DAY });
        let constant = split_periods(&ts, 30, 0, EvalMode::Constant).unwrap();
        assert_eq!(constant[1].train_range, TimeRange { start: 30 * DAY, end: 60 * DAY });
    }

    #[test]
    fn eighteen_months_of_half_year_windows() {
        // one commit every 3 days for 540 days
        let ts: Vec<i64> = (0..180).map(|i| 1_500_000_000 + i * 3 * DAY).collect();
        let splits = split_periods(&ts, 180, 0, EvalMode::Increasing).unwrap();
        assert_eq!(splits.len(), 2);
    }

    #[test]
    fn gap_commits_are_in_neither_set() {
        let ts: Vec<i64> = (0..120).map(|d| d * DAY).collect();
        let splits = split_periods(&ts, 30, 30, EvalMode::Increasing).unwrap();
        // test window [30, 60) has its gap covering all of [0, 30): no training
        assert_eq!(splits.len(), 2);
        let p = splits[0];
        assert_eq!(p.test_range.start, 60 * DAY);
        assert_eq!(p.gap_range, TimeRange { start: 30 * DAY, end: 60 * DAY });
        for &t in &ts {
            let role = p.role(t);
            if (30 * DAY..60 * DAY).contains(&t) {
                assert_eq!(role, Role::Gap);
            }
            if role == Role::Train {
                assert!(t < p.gap_range.start);
            }
        }
    }

    #[test]
    fn too_short_and_bad_input() {
        let ts = vec![0, 10 * DAY];
        assert!(matches!(
            split_periods(&ts, 30, 0, EvalMode::Increasing),
            Err(EvalError::TooShort { .. })
        ));
        assert!(matches!(
            split_periods(&[0, 40 * DAY], 30, 20, EvalMode::Increasing),
            Err(EvalError::TooShort { .. })
        ));
        assert_eq!(split_periods(&[5, 1], 30, 0, EvalMode::Increasing), Err(EvalError::Unsorted));
        assert_eq!(split_periods(&[0, 1], 0, 0, EvalMode::Increasing), Err(EvalError::InvalidWindow));
        assert!(split_periods(&[], 30, 0, EvalMode::Increasing).is_err());
    }

    #[test]
    fn empty_windows_skipped() {
        // nothing in [30, 60)
        let ts = vec![0, DAY, 61 * DAY, 95 * DAY];
        let splits = split_periods(&ts, 30, 0, EvalMode::Constant).unwrap();
        // test [60,90) trains on empty [30,60); test [90,120) trains on [60,90)
        assert_eq!(splits.len(), 1);
        assert_eq!(splits[0].test_range.start, 90 * DAY);
        assert_eq!(splits[0].period_index, 0);
    }
}
