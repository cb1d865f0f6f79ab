//! Heterogeneous Euclidean-Overlap Metric (HEOM).
//!
//! Per attribute: range-normalized absolute difference on numeric values,
//! 0/1 overlap on categorical values, and distance 1 when either side is
//! missing. The overall distance is the Euclidean combination
//! `sqrt(sum d_a^2)`. Used by the k-NN learner and by the neighborhood-based
//! hardness and complexity measures.

use crate::datakit::{min_max_ranges, AttrRange, Cell, Dataset, Instance};

#[derive(Clone, Debug)]
pub struct Heom {
    ranges: Vec<AttrRange>,
}

impl Heom {
    /// Normalization ranges come from the given (training) dataset.
    pub fn fit(ds: &Dataset) -> Self {
        Heom { ranges: min_max_ranges(ds) }
    }

    /// Build from precomputed ranges (one per attribute).
    pub fn from_ranges(ranges: Vec<AttrRange>) -> Self {
        Heom { ranges }
    }

    pub fn distance(&self, a: &Instance, b: &Instance) -> f64 {
        debug_assert_eq!(a.values.len(), self.ranges.len());
        debug_assert_eq!(b.values.len(), self.ranges.len());
        let mut sum = 0.0;
        for (j, range) in self.ranges.iter().enumerate() {
            let d = per_attribute(&a.values[j], &b.values[j], range);
            sum += d * d;
        }
        sum.sqrt()
    }
}

fn per_attribute(a: &Cell, b: &Cell, range: &AttrRange) -> f64 {
    match (a, b) {
        (Cell::Missing, _) | (_, Cell::Missing) => 1.0,
        (Cell::Cat(x), Cell::Cat(y)) => {
            if x == y {
                0.0
            } else {
                1.0
            }
        }
        (Cell::Num(x), Cell::Num(y)) => match range {
            AttrRange::Numeric { min, max } if max > min => (x - y).abs() / (max - min),
            // Degenerate range (constant training attribute): overlap rule.
            _ => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
        },
        // Mixed cell kinds cannot occur on a validated dataset.
        _ => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datakit::{AttributeMeta, Instance};

    fn ds() -> Dataset {
        Dataset::new(
            "t",
            vec![
                AttributeMeta::numeric("a"),
                AttributeMeta::categorical("b", vec!["x".into(), "y".into()]),
            ],
            vec!["p".into(), "q".into()],
            vec![
                Instance { values: vec![Cell::Num(0.0), Cell::Cat(0)], label: 0 },
                Instance { values: vec![Cell::Num(10.0), Cell::Cat(1)], label: 1 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn zero_on_identical_complete_instances() {
        let ds = ds();
        let h = Heom::fit(&ds);
        assert_eq!(h.distance(&ds.instances[0], &ds.instances[0]), 0.0);
    }

    #[test]
    fn symmetric_and_normalized() {
        let ds = ds();
        let h = Heom::fit(&ds);
        let d01 = h.distance(&ds.instances[0], &ds.instances[1]);
        let d10 = h.distance(&ds.instances[1], &ds.instances[0]);
        assert_eq!(d01, d10);
        // numeric diff 10/10 = 1, categorical 1 -> sqrt(2)
        assert!((d01 - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn missing_counts_as_unit_distance() {
        let ds = ds();
        let h = Heom::fit(&ds);
        let m = Instance { values: vec![Cell::Missing, Cell::Cat(0)], label: 0 };
        let d = h.distance(&m, &ds.instances[0]);
        assert!((d - 1.0).abs() < 1e-12);
    }
}
