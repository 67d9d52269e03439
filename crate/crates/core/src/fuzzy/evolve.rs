//! Incremental rule-base evolution.
//!
//! New rows are appended to the accumulated training data, normalization is
//! refit over everything seen so far, and clustering restarts from the
//! previous rule centers mapped into the new normalized space.

use alloc::vec::Vec;

use super::fis::{build_with_norms, fit_norms, FisModel};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// All training rows seen so far.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct History {
    inputs: Matrix,
    targets: Matrix,
}

impl History {
    pub fn new(inputs: Matrix, targets: Matrix) -> Result<Self> {
        if inputs.rows() != targets.rows() {
            return Err(Error::DimensionMismatch {
                expected: inputs.rows(),
                got: targets.rows(),
            });
        }
        Ok(Self { inputs, targets })
    }

    pub fn inputs(&self) -> &Matrix {
        &self.inputs
    }

    pub fn targets(&self) -> &Matrix {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.inputs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.rows() == 0
    }

    fn append(&mut self, inputs: &Matrix, targets: &Matrix) -> Result<()> {
        let new_inputs = self.inputs.vstack(inputs)?;
        let new_targets = self.targets.vstack(targets)?;
        self.inputs = new_inputs;
        self.targets = new_targets;
        Ok(())
    }
}

/// Folds a batch (one row or many) into `history` and returns the retrained model.
///
/// An empty batch returns `model` unchanged and leaves `history` untouched.
pub fn evolve_update(
    model: &FisModel,
    new_inputs: &Matrix,
    new_targets: &Matrix,
    history: &mut History,
) -> Result<FisModel> {
    if new_inputs.rows() != new_targets.rows() {
        return Err(Error::DimensionMismatch {
            expected: new_inputs.rows(),
            got: new_targets.rows(),
        });
    }
    if new_inputs.rows() == 0 {
        return Ok(model.clone());
    }
    if new_inputs.cols() != model.n_inputs() {
        return Err(Error::DimensionMismatch {
            expected: model.n_inputs(),
            got: new_inputs.cols(),
        });
    }
    if new_targets.cols() != model.n_outputs() {
        return Err(Error::DimensionMismatch {
            expected: model.n_outputs(),
            got: new_targets.cols(),
        });
    }
    history.append(new_inputs, new_targets)?;

    let (input_norms, _) = fit_norms(&history.inputs);
    let (output_norms, degenerate) = fit_norms(&history.targets);
    let warm = warm_centers(model, &input_norms, &output_norms)?;
    build_with_norms(
        &history.inputs,
        &history.targets,
        &model.config,
        input_norms,
        output_norms,
        degenerate,
        Some(&warm),
    )
}

/// Previous rule centers re-expressed under new norms, in the joint
/// `(input || target)` space. The target part of a rule center is the rule's
/// own consequent evaluated there.
fn warm_centers(
    model: &FisModel,
    input_norms: &[super::fis::Norm],
    output_norms: &[super::fis::Norm],
) -> Result<Matrix> {
    let rows: Vec<Vec<f64>> = model
        .rules
        .iter()
        .map(|rule| {
            let inputs = rule
                .centers
                .iter()
                .zip(&model.input_norms)
                .zip(input_norms)
                .map(|((&c, old), new)| new.apply(old.invert(c)));
            let targets = (0..model.n_outputs()).map(|o| {
                let raw = model.output_norms[o].invert(rule.consequent(o, &rule.centers));
                output_norms[o].apply(raw)
            });
            inputs.chain(targets).collect()
        })
        .collect();
    Matrix::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::{build_fis, TrainConfig};

    fn data(range: core::ops::Range<usize>) -> (Matrix, Matrix) {
        let xs: Vec<f64> = range.map(|i| i as f64 * 0.37 % 10.0).collect();
        (
            Matrix::from_rows(xs.iter().map(|&x| [x, x * x])).unwrap(),
            Matrix::from_rows(xs.iter().map(|&x| [10.0 - x])).unwrap(),
        )
    }

    #[test]
    fn empty_batch_is_identity() {
        let (x, t) = data(0..40);
        let model = build_fis(&x, &t, &TrainConfig::default().with_clusters(4)).unwrap();
        let mut history = History::new(x, t).unwrap();
        let before = history.clone();
        let next = evolve_update(&model, &Matrix::zeros(0, 2), &Matrix::zeros(0, 1), &mut history).unwrap();
        assert_eq!(next, model);
        assert_eq!(history, before);
    }

    #[test]
    fn one_by_one_and_block_keep_rule_count() {
        let cfg = TrainConfig::default().with_clusters(5).with_seed(2);
        let (x, t) = data(0..30);
        let model = build_fis(&x, &t, &cfg).unwrap();

        let (bx, bt) = data(30..45);
        let mut history = History::new(x.clone(), t.clone()).unwrap();
        let block = evolve_update(&model, &bx, &bt, &mut history).unwrap();
        assert_eq!(history.len(), 45);

        let scratch = build_fis(&x.vstack(&bx).unwrap(), &t.vstack(&bt).unwrap(), &cfg).unwrap();
        assert_eq!(block.rules.len(), scratch.rules.len());

        let mut history = History::new(x, t).unwrap();
        let mut evolving = model;
        for i in 0..bx.rows() {
            let xi = Matrix::from_rows([bx.row(i)]).unwrap();
            let ti = Matrix::from_rows([bt.row(i)]).unwrap();
            evolving = evolve_update(&evolving, &xi, &ti, &mut history).unwrap();
        }
        assert_eq!(history.len(), 45);
        assert_eq!(evolving.rules.len(), 5);
        evolving.validate().unwrap();
    }

    #[test]
    fn dimension_checks() {
        let (x, t) = data(0..20);
        let model = build_fis(&x, &t, &TrainConfig::default().with_clusters(2)).unwrap();
        let mut history = History::new(x, t).unwrap();
        let bad = Matrix::from_rows([[1.0]]).unwrap();
        assert!(evolve_update(&model, &bad, &bad, &mut history).is_err());
        assert_eq!(history.len(), 20);
    }
}
