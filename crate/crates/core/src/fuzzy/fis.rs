//! Takagi-Sugeno rule extraction from fuzzy clusters, and inference.
//!
//! Each FCM cluster of the joint normalized `(input || target)` space yields
//! one rule:
//!
//! ```text
//! IF x_1 is G(c_1, s_1) AND ... AND x_d is G(c_d, s_d)
//! THEN t_o = w_o0 + w_o1 x_1 + ... + w_od x_d      (one row per output o)
//! ```
//!
//! with Gaussian antecedents `G(c, s)(x) = exp(-(x - c)^2 / (2 s^2))` combined
//! by the product T-norm, and the crisp output is the firing-strength weighted
//! mean of the rule consequents.

use alloc::vec;
use alloc::vec::Vec;

// unused when std is linked somewhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use super::fcm::{fcm_cluster, fuzzify, squared_distance, TrainConfig};
use crate::error::{Error, Result};
use crate::matrix::{solve_symmetric, Matrix};

/// Smallest admissible Gaussian width, in normalized units.
pub const WIDTH_FLOOR: f64 = 0.01;

/// Normal equations whose condition estimate, taken over their numerical
/// rank, exceeds this fall back to a constant consequent. Exactly dependent
/// regressors are dropped by the minimum-norm solution instead.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// Affine map `normalized = (raw - offset) / scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Norm {
    pub offset: f64,
    pub scale: f64,
}

impl Norm {
    /// Min-max normalization of `values` to `[0, 1]`.
    ///
    /// Returns the norm and whether the column was constant (in which case
    /// the scale is clamped to 1).
    pub fn fit<I: IntoIterator<Item = f64>>(values: I) -> (Self, bool) {
        let (lo, hi) = values
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            let offset = if lo.is_finite() { lo } else { 0.0 };
            return (Self { offset, scale: 1.0 }, true);
        }
        (Self {
            offset: lo,
            scale: hi - lo,
        }, false)
    }

    #[inline]
    pub fn apply(&self, raw: f64) -> f64 {
        (raw - self.offset) / self.scale
    }

    #[inline]
    pub fn invert(&self, normalized: f64) -> f64 {
        self.offset + normalized * self.scale
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FuzzyRule {
    /// Antecedent Gaussian centers, normalized units.
    pub centers: Vec<f64>,
    /// Antecedent Gaussian widths, normalized units.
    pub widths: Vec<f64>,
    /// One row `[w0, w1, .., wd]` per output, normalized units.
    pub consequents: Vec<Vec<f64>>,
}

impl FuzzyRule {
    /// Product of the per-dimension Gaussian memberships of a normalized input.
    pub fn firing_strength(&self, x: &[f64]) -> f64 {
        let exponent: f64 = x
            .iter()
            .zip(&self.centers)
            .zip(&self.widths)
            .map(|((&xv, &c), &s)| (xv - c) * (xv - c) / (2.0 * s * s))
            .sum();
        (-exponent).exp()
    }

    /// Consequent value of output `o` at a normalized input.
    pub fn consequent(&self, o: usize, x: &[f64]) -> f64 {
        let w = &self.consequents[o];
        w[0] + w[1..].iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FisModel {
    pub rules: Vec<FuzzyRule>,
    pub input_norms: Vec<Norm>,
    pub output_norms: Vec<Norm>,
    pub config: TrainConfig,
    /// Output columns whose training targets were constant.
    #[cfg_attr(feature = "serde", serde(default))]
    pub degenerate_outputs: Vec<usize>,
}

impl FisModel {
    pub fn n_inputs(&self) -> usize {
        self.input_norms.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.output_norms.len()
    }

    /// Checks the structural invariants, for models that did not come from
    /// [`build_fis`] (for example, deserialized ones).
    pub fn validate(&self) -> Result<()> {
        let (d, o) = (self.n_inputs(), self.n_outputs());
        if self.rules.is_empty() {
            return Err(Error::Config("model has no rules".into()));
        }
        if d == 0 || o == 0 {
            return Err(Error::Config("model needs at least one input and one output".into()));
        }
        for norm in self.input_norms.iter().chain(&self.output_norms) {
            if norm.scale <= 0.0 || !norm.scale.is_finite() || !norm.offset.is_finite() {
                return Err(Error::Config("normalization scales must be positive and finite".into()));
            }
        }
        for rule in &self.rules {
            if rule.centers.len() != d || rule.widths.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: rule.centers.len().min(rule.widths.len()),
                });
            }
            if rule.widths.iter().any(|&s| s <= 0.0 || !s.is_finite()) {
                return Err(Error::Config("rule widths must be strictly positive".into()));
            }
            if rule.consequents.len() != o || rule.consequents.iter().any(|w| w.len() != d + 1) {
                return Err(Error::DimensionMismatch {
                    expected: o * (d + 1),
                    got: rule.consequents.iter().map(Vec::len).sum(),
                });
            }
            let finite = rule
                .centers
                .iter()
                .chain(rule.consequents.iter().flatten())
                .all(|v| v.is_finite());
            if !finite {
                return Err(Error::NonFinite("rule parameters"));
            }
        }
        Ok(())
    }

    pub fn predict(&self, input: &[f64]) -> Result<Vec<f64>> {
        fis_predict(self, input)
    }

    pub(crate) fn normalize_input(&self, input: &[f64]) -> Vec<f64> {
        input.iter().zip(&self.input_norms).map(|(&x, n)| n.apply(x)).collect()
    }
}

/// Extracts a rule base mapping `inputs` rows to `targets` rows.
pub fn build_fis(inputs: &Matrix, targets: &Matrix, cfg: &TrainConfig) -> Result<FisModel> {
    let (input_norms, _) = fit_norms(inputs);
    let (output_norms, degenerate_outputs) = fit_norms(targets);
    build_with_norms(inputs, targets, cfg, input_norms, output_norms, degenerate_outputs, None)
}

pub(crate) fn fit_norms(m: &Matrix) -> (Vec<Norm>, Vec<usize>) {
    let mut norms = Vec::with_capacity(m.cols());
    let mut degenerate = Vec::new();
    for j in 0..m.cols() {
        let (norm, flat) = Norm::fit(m.column(j));
        if flat {
            degenerate.push(j);
        }
        norms.push(norm);
    }
    (norms, degenerate)
}

pub(crate) fn build_with_norms(
    inputs: &Matrix,
    targets: &Matrix,
    cfg: &TrainConfig,
    input_norms: Vec<Norm>,
    output_norms: Vec<Norm>,
    degenerate_outputs: Vec<usize>,
    init_centers: Option<&Matrix>,
) -> Result<FisModel> {
    if inputs.rows() != targets.rows() {
        return Err(Error::DimensionMismatch {
            expected: inputs.rows(),
            got: targets.rows(),
        });
    }
    if inputs.cols() == 0 || targets.cols() == 0 {
        return Err(Error::Config("need at least one input and one target column".into()));
    }
    let d = inputs.cols();
    let n_out = targets.cols();
    let joint = normalize(inputs, &input_norms).hstack(&normalize(targets, &output_norms))?;
    let fcm = fcm_cluster(&joint, cfg, init_centers)?;

    let m = cfg.fuzzy_exponent_m;
    let mut rules = Vec::with_capacity(cfg.n_clusters);
    for j in 0..cfg.n_clusters {
        let center = fcm.centers.row(j);
        let weights: Vec<f64> = (0..joint.rows())
            .map(|i| fuzzify(fcm.memberships[(i, j)], m))
            .collect();
        let total: f64 = weights.iter().sum();

        let centers = center[..d].to_vec();
        let widths = (0..d)
            .map(|k| {
                let var = if total > 0.0 {
                    joint
                        .iter_rows()
                        .zip(&weights)
                        .map(|(row, w)| w * (row[k] - centers[k]) * (row[k] - centers[k]))
                        .sum::<f64>()
                        / total
                } else {
                    0.0
                };
                var.sqrt().max(WIDTH_FLOOR)
            })
            .collect();

        let consequents = fit_consequents(&joint, &weights, d, n_out, &center[d..]);
        rules.push(FuzzyRule {
            centers,
            widths,
            consequents,
        });
    }

    Ok(FisModel {
        rules,
        input_norms,
        output_norms,
        config: cfg.clone(),
        degenerate_outputs,
    })
}

/// Weighted least squares of each target column on `(1, inputs)`.
fn fit_consequents(joint: &Matrix, weights: &[f64], d: usize, n_out: usize, target_center: &[f64]) -> Vec<Vec<f64>> {
    let p = d + 1;
    let mut normal = vec![0.0; p * p];
    let mut rhs = vec![vec![0.0; p]; n_out];
    let mut z = vec![0.0; p];
    for (row, &w) in joint.iter_rows().zip(weights) {
        if w == 0.0 {
            continue;
        }
        z[0] = 1.0;
        z[1..].copy_from_slice(&row[..d]);
        for a in 0..p {
            let wa = w * z[a];
            for b in 0..p {
                normal[a * p + b] += wa * z[b];
            }
            for (o, r) in rhs.iter_mut().enumerate() {
                r[a] += wa * row[d + o];
            }
        }
    }
    rhs.iter()
        .enumerate()
        .map(|(o, r)| match solve_symmetric(&normal, r) {
            Ok(sol) if sol.rank > 0 && sol.effective_condition <= SINGULAR_CONDITION && sol.x.iter().all(|v| v.is_finite()) => sol.x,
            _ => {
                let mut constant = vec![0.0; p];
                constant[0] = target_center[o];
                constant
            }
        })
        .collect()
}

fn normalize(m: &Matrix, norms: &[Norm]) -> Matrix {
    let mut out = m.clone();
    for i in 0..out.rows() {
        for (v, n) in out.row_mut(i).iter_mut().zip(norms) {
            *v = n.apply(*v);
        }
    }
    out
}

/// Evaluates the rule base at `input` (raw units), returning raw-unit outputs.
///
/// When every firing strength underflows to zero the rule with the nearest
/// antecedent center decides alone.
pub fn fis_predict(model: &FisModel, input: &[f64]) -> Result<Vec<f64>> {
    if input.len() != model.n_inputs() {
        return Err(Error::DimensionMismatch {
            expected: model.n_inputs(),
            got: input.len(),
        });
    }
    if input.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("prediction input"));
    }
    let x = model.normalize_input(input);
    let strengths: Vec<f64> = model.rules.iter().map(|r| r.firing_strength(&x)).collect();
    let total: f64 = strengths.iter().sum();

    let normalized: Vec<f64> = if total > 0.0 {
        (0..model.n_outputs())
            .map(|o| {
                model
                    .rules
                    .iter()
                    .zip(&strengths)
                    .filter(|(_, &w)| w > 0.0)
                    .map(|(r, &w)| w * r.consequent(o, &x))
                    .sum::<f64>()
                    / total
            })
            .collect()
    } else {
        let nearest = model
            .rules
            .iter()
            .min_by(|a, b| {
                squared_distance(&a.centers, &x).total_cmp(&squared_distance(&b.centers, &x))
            })
            .ok_or_else(|| Error::Config("model has no rules".into()))?;
        (0..model.n_outputs()).map(|o| nearest.consequent(o, &x)).collect()
    };

    Ok(normalized
        .into_iter()
        .zip(&model.output_norms)
        .map(|(v, n)| n.invert(v))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit_norms(n: usize) -> Vec<Norm> {
        vec![Norm { offset: 0.0, scale: 1.0 }; n]
    }

    fn model(rules: Vec<FuzzyRule>, d: usize, o: usize) -> FisModel {
        FisModel {
            rules,
            input_norms: unit_norms(d),
            output_norms: unit_norms(o),
            config: TrainConfig::default(),
            degenerate_outputs: Vec::new(),
        }
    }

    #[test]
    fn single_rule_reproduces_its_consequent() {
        let m = model(
            vec![FuzzyRule {
                centers: vec![0.3],
                widths: vec![0.2],
                consequents: vec![vec![1.0, 2.0]],
            }],
            1,
            1,
        );
        for x in [-3.0, 0.0, 0.25, 1.0, 7.5] {
            let y = fis_predict(&m, &[x]).unwrap()[0];
            assert!((y - (2.0 * x + 1.0)).abs() <= 1e-12, "{x}: {y}");
        }
    }

    #[test]
    fn equal_strengths_average_constants() {
        let rule = |c: f64| FuzzyRule {
            centers: vec![0.0],
            widths: vec![1.0],
            consequents: vec![vec![c, 0.0]],
        };
        let m = model(vec![rule(2.0), rule(5.0)], 1, 1);
        assert!((fis_predict(&m, &[0.4]).unwrap()[0] - 3.5).abs() < 1e-12);
    }

    #[test]
    fn input_at_narrow_rule_center_returns_that_rule() {
        let m = model(
            vec![
                FuzzyRule {
                    centers: vec![0.2],
                    widths: vec![0.01],
                    consequents: vec![vec![4.0, 0.0]],
                },
                FuzzyRule {
                    centers: vec![0.8],
                    widths: vec![0.01],
                    consequents: vec![vec![-1.0, 0.0]],
                },
            ],
            1,
            1,
        );
        // second rule fires at exp(-0.36 / 0.0002) ~ 0, far below 1e-6 relative
        let y = fis_predict(&m, &[0.2]).unwrap()[0];
        assert!((y - 4.0).abs() < 1e-6);
    }

    #[test]
    fn underflow_falls_back_to_nearest_rule() {
        let m = model(
            vec![
                FuzzyRule {
                    centers: vec![0.0],
                    widths: vec![0.01],
                    consequents: vec![vec![1.0, 0.0]],
                },
                FuzzyRule {
                    centers: vec![1.0],
                    widths: vec![0.01],
                    consequents: vec![vec![2.0, 0.0]],
                },
            ],
            1,
            1,
        );
        assert_eq!(fis_predict(&m, &[50.0]).unwrap(), vec![2.0]);
        assert_eq!(fis_predict(&m, &[-50.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let m = model(
            vec![FuzzyRule {
                centers: vec![0.0, 0.0],
                widths: vec![1.0, 1.0],
                consequents: vec![vec![0.0, 0.0, 0.0]],
            }],
            2,
            1,
        );
        assert!(matches!(fis_predict(&m, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn constant_target_single_cluster() {
        let inputs = Matrix::from_rows((0..12).map(|i| [i as f64, (i * i) as f64])).unwrap();
        let targets = Matrix::from_rows((0..12).map(|_| [3.25])).unwrap();
        let m = build_fis(&inputs, &targets, &TrainConfig::default().with_clusters(1)).unwrap();
        assert_eq!(m.degenerate_outputs, vec![0]);
        for x in [0.0, 5.5, 20.0] {
            let y = m.predict(&[x, x * x]).unwrap()[0];
            assert!((y - 3.25).abs() < 1e-9);
        }
    }

    #[test]
    fn recovers_exact_linear_map() {
        // t = 3x - 2 on x in [0, 4]
        let inputs = Matrix::from_rows((0..40).map(|i| [i as f64 * 0.1])).unwrap();
        let targets = Matrix::from_rows((0..40).map(|i| [3.0 * (i as f64 * 0.1) - 2.0])).unwrap();
        let m = build_fis(&inputs, &targets, &TrainConfig::default().with_clusters(2).with_seed(5)).unwrap();
        for (x, t) in inputs.iter_rows().zip(targets.iter_rows()) {
            let y = m.predict(x).unwrap()[0];
            assert!((y - t[0]).abs() < 1e-3, "{} -> {y} vs {}", x[0], t[0]);
        }
    }

    #[test]
    fn one_cluster_per_row_nearly_interpolates() {
        let xs = [0.0, 1.1, 2.0, 3.3, 4.1, 5.0, 6.2, 7.0, 8.4, 9.0];
        let inputs = Matrix::from_rows(xs.iter().map(|&x| [x])).unwrap();
        let targets = Matrix::from_rows(xs.iter().map(|&x| [(x * 0.7).sin() * 5.0])).unwrap();
        let m = build_fis(&inputs, &targets, &TrainConfig::default().with_clusters(10).with_seed(1)).unwrap();
        for (x, t) in inputs.iter_rows().zip(targets.iter_rows()) {
            let y = m.predict(x).unwrap()[0];
            assert!((y - t[0]).abs() < 1e-3, "{} -> {y} vs {}", x[0], t[0]);
        }
    }

    #[test]
    fn widths_respect_floor_and_model_validates() {
        let inputs = Matrix::from_rows((0..30).map(|i| [(i / 10) as f64])).unwrap();
        let targets = Matrix::from_rows((0..30).map(|i| [(i / 10) as f64 * 2.0])).unwrap();
        let m = build_fis(&inputs, &targets, &TrainConfig::default().with_clusters(3)).unwrap();
        assert!(m.rules.iter().flat_map(|r| &r.widths).all(|&s| s >= WIDTH_FLOOR));
        m.validate().unwrap();
    }

    #[test]
    fn norm_fit_flags_constant_columns() {
        let (n, flat) = Norm::fit([2.0, 2.0, 2.0]);
        assert!(flat);
        assert_eq!((n.offset, n.scale), (2.0, 1.0));
        let (n, flat) = Norm::fit([1.0, 5.0]);
        assert!(!flat);
        assert_eq!(n.apply(3.0), 0.5);
        assert_eq!(n.invert(0.5), 3.0);
    }
}
