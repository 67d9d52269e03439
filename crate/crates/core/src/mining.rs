//! Opposition mining: pair every sample with the sample whose output lies
//! closest to the opposite of its own output.

use alloc::vec::Vec;
use core::cmp::Ordering;


use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::opposition::{scheme_opposite, update_range, Bounds, OppositionScheme, RunningRange};

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub inputs: Vec<f64>,
    pub output: f64,
}

/// Observed points `<x1..xn, y>` with declared input bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    rows: Vec<Sample>,
    input_bounds: Vec<Bounds>,
    output_range: RunningRange,
}

impl SampleSet {
    /// Validates dimensionality, bounds membership and finiteness.
    pub fn new(rows: Vec<Sample>, input_bounds: Vec<Bounds>) -> Result<Self> {
        let dim = input_bounds.len();
        if dim == 0 {
            return Err(Error::Config("samples need at least one input dimension".into()));
        }
        let mut output_range = RunningRange::empty();
        for row in &rows {
            if row.inputs.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.inputs.len(),
                });
            }
            for (&x, b) in row.inputs.iter().zip(&input_bounds) {
                if !x.is_finite() {
                    return Err(Error::NonFinite("sample input"));
                }
                if !b.contains(x) {
                    return Err(Error::Domain {
                        value: x,
                        reason: "lies outside the declared input bounds",
                    });
                }
            }
            output_range = update_range(output_range, row.output)?;
        }
        Ok(Self {
            rows,
            input_bounds,
            output_range,
        })
    }

    /// Builds a sample set whose bounds are the per-column extremes of the data.
    ///
    /// A constant column gets a unit-width interval centred on its value.
    pub fn with_observed_bounds(rows: Vec<Sample>) -> Result<Self> {
        let dim = rows.first().map(|r| r.inputs.len()).ok_or(Error::InsufficientData {
            needed: 1,
            got: 0,
        })?;
        let mut bounds = Vec::with_capacity(dim);
        for d in 0..dim {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for row in &rows {
                let x = *row.inputs.get(d).ok_or(Error::DimensionMismatch {
                    expected: dim,
                    got: row.inputs.len(),
                })?;
                lo = lo.min(x);
                hi = hi.max(x);
            }
            bounds.push(if lo < hi {
                Bounds::new(lo, hi)?
            } else {
                Bounds::new(lo - 0.5, hi + 0.5)?
            });
        }
        Self::new(rows, bounds)
    }

    pub fn rows(&self) -> &[Sample] {
        &self.rows
    }

    pub fn input_bounds(&self) -> &[Bounds] {
        &self.input_bounds
    }

    pub fn output_range(&self) -> &RunningRange {
        &self.output_range
    }

    pub fn dim(&self) -> usize {
        self.input_bounds.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, sample: Sample) -> Result<()> {
        if sample.inputs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: sample.inputs.len(),
            });
        }
        for (&x, b) in sample.inputs.iter().zip(&self.input_bounds) {
            if !b.contains(x) {
                return Err(Error::Domain {
                    value: x,
                    reason: "lies outside the declared input bounds",
                });
            }
        }
        self.output_range = update_range(self.output_range, sample.output)?;
        self.rows.push(sample);
        Ok(())
    }
}

/// A sample paired with its mined type-II opposite.
#[derive(Debug, Clone, PartialEq)]
pub struct MinedPair {
    pub inputs: Vec<f64>,
    pub output: f64,
    pub opposite_inputs: Vec<f64>,
    /// The opposite output the match was searched for.
    pub opposite_output_target: f64,
    /// `|opposite_output_target - output of the matched row|`.
    pub match_error: f64,
    /// Index of the matched row in the source sample set.
    pub matched_row: usize,
}

/// Mines one opposite per row.
///
/// The match for row `i` is the row `j` (possibly `i` itself) minimising
/// `|opp(y_i) - y_j|`; ties resolve to the smallest `j`.
pub fn mine_opposites(samples: &SampleSet, scheme: OppositionScheme) -> Result<Vec<MinedPair>> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let range = samples.output_range();
    let index = OutputIndex::new(samples.rows());
    samples
        .rows()
        .iter()
        .map(|row| {
            let target = scheme_opposite(row.output, scheme, range)?;
            let (j, diff) = index.nearest(target);
            Ok(MinedPair {
                inputs: row.inputs.clone(),
                output: row.output,
                opposite_inputs: samples.rows()[j].inputs.clone(),
                opposite_output_target: target,
                match_error: diff,
                matched_row: j,
            })
        })
        .collect()
}

/// Rows sorted by `(output, index)` for nearest-output queries.
struct OutputIndex {
    sorted: Vec<(f64, usize)>,
}

impl OutputIndex {
    fn new(rows: &[Sample]) -> Self {
        let mut sorted: Vec<(f64, usize)> =
            rows.iter().enumerate().map(|(i, r)| (r.output, i)).collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
        Self { sorted }
    }

    /// Returns `(row, |target - y_row|)`, matching a first-minimum linear scan.
    fn nearest(&self, target: f64) -> (usize, f64) {
        let s = &self.sorted;
        let split = s.partition_point(|&(y, _)| y < target);
        let diff = |k: usize| (target - s[k].0).abs();

        let mut best = f64::INFINITY;
        if split > 0 {
            best = best.min(diff(split - 1));
        }
        if split < s.len() {
            best = best.min(diff(split));
        }
        // Rounding makes |target - y| only weakly monotone on each side, so
        // every row whose computed difference ties the best one is a candidate.
        let mut winner = usize::MAX;
        let mut k = split;
        while k > 0 && diff(k - 1) == best {
            winner = winner.min(s[k - 1].1);
            k -= 1;
        }
        let mut k = split;
        while k < s.len() && diff(k) == best {
            winner = winner.min(s[k].1);
            k += 1;
        }
        (winner, best)
    }
}

/// Lays mined pairs out as FIS training data: inputs `<x1..xn, y>`, targets `<ox1..oxn>`.
pub fn mining_dataset(pairs: &[MinedPair]) -> Result<(Matrix, Matrix)> {
    let first = pairs.first().ok_or(Error::InsufficientData { needed: 1, got: 0 })?;
    let dim = first.inputs.len();
    let mut inputs = Vec::with_capacity(pairs.len() * (dim + 1));
    let mut targets = Vec::with_capacity(pairs.len() * dim);
    for p in pairs {
        if p.inputs.len() != dim || p.opposite_inputs.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.inputs.len().max(p.opposite_inputs.len()),
            });
        }
        inputs.extend_from_slice(&p.inputs);
        inputs.push(p.output);
        targets.extend_from_slice(&p.opposite_inputs);
    }
    Ok((
        Matrix::from_row_major(pairs.len(), dim + 1, inputs)?,
        Matrix::from_row_major(pairs.len(), dim, targets)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    /// Algorithm-as-written reference: quadratic scan with strict `<`.
    fn mine_linear(samples: &SampleSet, scheme: OppositionScheme) -> Vec<(usize, f64, f64)> {
        let range = samples.output_range();
        samples
            .rows()
            .iter()
            .map(|row| {
                let opp_y = scheme_opposite(row.output, scheme, range).unwrap();
                let mut min_diff = f64::INFINITY;
                let mut best = 0;
                for (j, other) in samples.rows().iter().enumerate() {
                    let this_diff = (opp_y - other.output).abs();
                    if this_diff < min_diff {
                        min_diff = this_diff;
                        best = j;
                    }
                }
                (best, opp_y, min_diff)
            })
            .collect()
    }

    fn squares() -> SampleSet {
        let rows = (0..4)
            .map(|x| Sample {
                inputs: vec![x as f64],
                output: (x * x) as f64,
            })
            .collect();
        SampleSet::new(rows, vec![Bounds::new(0.0, 3.0).unwrap()]).unwrap()
    }

    #[test]
    fn squares_hand_trace() {
        let pairs = mine_opposites(&squares(), OppositionScheme::T1).unwrap();
        assert_eq!(pairs.len(), 4);
        // y=0 -> oppY=9 -> x=3 exactly
        assert_eq!(pairs[0].opposite_inputs, vec![3.0]);
        assert_eq!(pairs[0].opposite_output_target, 9.0);
        assert_eq!(pairs[0].match_error, 0.0);
        // y=4 -> oppY=5 -> nearest output is 4 (itself)
        assert_eq!(pairs[2].opposite_inputs, vec![2.0]);
        assert_eq!(pairs[2].match_error, 1.0);
        // y=1 -> oppY=8 -> 9 at x=3; y=9 -> oppY=0 -> x=0
        assert_eq!(pairs[1].opposite_inputs, vec![3.0]);
        assert_eq!(pairs[3].opposite_inputs, vec![0.0]);
    }

    #[test]
    fn constant_outputs_all_match_first_row() {
        let rows = (0..5)
            .map(|x| Sample {
                inputs: vec![x as f64],
                output: 7.0,
            })
            .collect();
        let set = SampleSet::new(rows, vec![Bounds::new(0.0, 4.0).unwrap()]).unwrap();
        let pairs = mine_opposites(&set, OppositionScheme::T3).unwrap();
        for p in &pairs {
            assert_eq!(p.opposite_output_target, 7.0);
            assert_eq!(p.opposite_inputs, vec![0.0]);
            assert_eq!(p.matched_row, 0);
        }
        assert_eq!(
            mine_opposites(&set, OppositionScheme::T1),
            Err(Error::DegenerateRange(7.0))
        );
    }

    #[test]
    fn too_few_rows() {
        let set = SampleSet::new(
            vec![Sample {
                inputs: vec![0.5],
                output: 1.0,
            }],
            vec![Bounds::new(0.0, 1.0).unwrap()],
        )
        .unwrap();
        assert_eq!(
            mine_opposites(&set, OppositionScheme::T1),
            Err(Error::InsufficientData { needed: 2, got: 1 })
        );
    }

    #[test]
    fn sample_set_validation() {
        let b = vec![Bounds::new(0.0, 1.0).unwrap()];
        let out_of_bounds = vec![Sample {
            inputs: vec![2.0],
            output: 0.0,
        }];
        assert!(SampleSet::new(out_of_bounds, b.clone()).is_err());
        let wrong_dim = vec![Sample {
            inputs: vec![0.1, 0.2],
            output: 0.0,
        }];
        assert!(SampleSet::new(wrong_dim, b).is_err());
    }

    #[test]
    fn dataset_layout() {
        let pair = MinedPair {
            inputs: vec![2.0],
            output: 4.0,
            opposite_inputs: vec![3.0],
            opposite_output_target: 9.0,
            match_error: 0.0,
            matched_row: 3,
        };
        let (x, t) = mining_dataset(&[pair]).unwrap();
        assert_eq!((x.rows(), x.cols()), (1, 2));
        assert_eq!(x.row(0), &[2.0, 4.0]);
        assert_eq!(t.row(0), &[3.0]);

        let pairs = mine_opposites(&squares(), OppositionScheme::T1).unwrap();
        let (x, t) = mining_dataset(&pairs).unwrap();
        assert_eq!((x.rows(), x.cols(), t.rows(), t.cols()), (4, 2, 4, 1));
        assert_eq!(t.column(0).collect::<Vec<_>>(), vec![3.0, 3.0, 2.0, 0.0]);

        let wide = MinedPair {
            inputs: vec![1.0, 2.0],
            output: 0.5,
            opposite_inputs: vec![3.0, 4.0],
            opposite_output_target: 0.0,
            match_error: 0.0,
            matched_row: 0,
        };
        let (x, _) = mining_dataset(&[wide]).unwrap();
        assert_eq!(x.cols(), 3);
        assert!(mining_dataset(&[]).is_err());
    }

    fn arb_samples() -> impl Strategy<Value = SampleSet> {
        // Coarse outputs force plenty of exact ties.
        proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0, -20i32..20), 2..60).prop_map(|raw| {
            let rows = raw
                .into_iter()
                .map(|(a, b, y)| Sample {
                    inputs: vec![a, b],
                    output: y as f64 * 0.25,
                })
                .collect();
            let b = Bounds::new(0.0, 1.0).unwrap();
            SampleSet::new(rows, vec![b, b]).unwrap()
        })
    }

    proptest! {
        #[test]
        fn indexed_search_matches_linear_scan(set in arb_samples(), s in 0usize..3) {
            let scheme = OppositionScheme::ALL[s];
            let Ok(fast) = mine_opposites(&set, scheme) else {
                prop_assume!(false);
                unreachable!()
            };
            let slow = mine_linear(&set, scheme);
            for (p, (j, opp_y, diff)) in fast.iter().zip(slow) {
                prop_assert_eq!(p.matched_row, j);
                prop_assert_eq!(p.opposite_output_target, opp_y);
                prop_assert_eq!(p.match_error, diff);
            }
        }

        #[test]
        fn count_and_closure(set in arb_samples()) {
            prop_assume!(!set.output_range().is_degenerate());
            let pairs = mine_opposites(&set, OppositionScheme::T1).unwrap();
            prop_assert_eq!(pairs.len(), set.len());
            for p in &pairs {
                prop_assert!(set.rows().iter().any(|r| r.inputs == p.opposite_inputs));
                let matched = set.rows()[p.matched_row].output;
                prop_assert_eq!(p.match_error, (p.opposite_output_target - matched).abs());
            }
            prop_assert_eq!(pairs, mine_opposites(&set, OppositionScheme::T1).unwrap());
        }
    }
}
