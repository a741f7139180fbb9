use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_PARTITIONS: usize = 4;

/// Contiguous column regions that may execute gates concurrently.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionConfig {
    ranges: Vec<Range<usize>>,
}

impl PartitionConfig {
    pub fn single(cols: usize) -> Self {
        Self {
            ranges: vec![0..cols],
        }
    }

    /// `k` equal-width partitions; `cols` must be divisible by `k`.
    pub fn even(cols: usize, k: usize) -> Result<Self> {
        if k == 0 || !cols.is_multiple_of(k) {
            return Err(Error::Config(format!(
                "{cols} columns cannot be split into {k} equal partitions"
            )));
        }
        let w = cols / k;
        Self::from_ranges(cols, (0..k).map(|i| i * w..(i + 1) * w).collect())
    }

    pub fn from_ranges(cols: usize, mut ranges: Vec<Range<usize>>) -> Result<Self> {
        if ranges.is_empty() || ranges.len() > MAX_PARTITIONS {
            return Err(Error::Config(format!(
                "partition count {} not in 1..={MAX_PARTITIONS}",
                ranges.len()
            )));
        }
        ranges.sort_by_key(|r| r.start);
        let mut next = 0;
        for r in &ranges {
            if r.start != next || r.end <= r.start {
                return Err(Error::Config(format!(
                    "partition ranges must be disjoint, non-empty and contiguous; got {ranges:?}"
                )));
            }
            next = r.end;
        }
        if next != cols {
            return Err(Error::Config(format!(
                "partitions cover {next} of {cols} columns"
            )));
        }
        Ok(Self { ranges })
    }

    pub fn count(&self) -> usize {
        self.ranges.len()
    }

    pub fn ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }

    pub fn partition_of(&self, col: usize) -> usize {
        self.ranges
            .iter()
            .position(|r| r.contains(&col))
            .expect("column validated against crossbar width")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_way_split() {
        let p = PartitionConfig::even(1024, 4).unwrap();
        assert_eq!(p.count(), 4);
        assert!(p.ranges().iter().all(|r| r.len() == 256));
        assert_eq!(p.partition_of(700), 2);
    }

    #[test]
    fn rejects_overlap_gap_and_count() {
        assert!(PartitionConfig::from_ranges(8, vec![0..4, 3..6, 6..8]).is_err());
        assert!(PartitionConfig::from_ranges(8, vec![0..3, 4..8]).is_err());
        assert!(PartitionConfig::from_ranges(8, vec![0..7]).is_err());
        assert!(PartitionConfig::from_ranges(10, (0..5).map(|i| 2 * i..2 * i + 2).collect()).is_err());
        assert!(PartitionConfig::even(10, 3).is_err());
        assert!(PartitionConfig::from_ranges(8, vec![0..3, 3..5, 5..8]).is_ok());
    }
}
