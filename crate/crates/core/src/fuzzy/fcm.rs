//! Fuzzy c-means clustering.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

// unused when std is linked somewhere in the build
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Clustering and rule-extraction settings.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub n_clusters: usize,
    pub fuzzy_exponent_m: f64,
    pub max_iter: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            n_clusters: 30,
            fuzzy_exponent_m: 2.0,
            max_iter: 5000,
            epsilon: 1e-5,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn with_clusters(mut self, n_clusters: usize) -> Self {
        self.n_clusters = n_clusters;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.fuzzy_exponent_m.is_nan() || self.fuzzy_exponent_m <= 1.0 || !self.fuzzy_exponent_m.is_finite() {
            return Err(Error::Config(format!(
                "fuzzy exponent must be > 1, got {}",
                self.fuzzy_exponent_m
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Config(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if self.n_clusters == 0 {
            return Err(Error::Config("n_clusters must be at least 1".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FcmResult {
    /// `n_clusters x d`
    pub centers: Matrix,
    /// `n_rows x n_clusters`, row-stochastic; consistent with `centers`.
    pub memberships: Matrix,
    pub iterations_used: usize,
    /// Largest absolute coordinate change of any center in the last iteration.
    pub final_shift: f64,
    /// Weighted objective `sum u^m d^2` after each center update.
    pub objective_history: Vec<f64>,
}

/// Runs FCM on the rows of `data`.
///
/// Centers start from `init_centers` when given, otherwise from
/// `cfg.n_clusters` distinct data rows drawn with `cfg.seed`.
pub fn fcm_cluster(data: &Matrix, cfg: &TrainConfig, init_centers: Option<&Matrix>) -> Result<FcmResult> {
    cfg.validate()?;
    let n = data.rows();
    let c = cfg.n_clusters;
    if n < c {
        return Err(Error::Config(format!(
            "n_clusters ({c}) exceeds the number of rows ({n})"
        )));
    }
    if !data.is_finite() {
        return Err(Error::NonFinite("clustering data"));
    }
    let mut centers = match init_centers {
        Some(init) => {
            if init.rows() != c || init.cols() != data.cols() {
                return Err(Error::DimensionMismatch {
                    expected: c * data.cols(),
                    got: init.rows() * init.cols(),
                });
            }
            init.clone()
        }
        None => seeded_centers(data, c, cfg.seed),
    };

    let m = cfg.fuzzy_exponent_m;
    let mut memberships = Matrix::zeros(n, c);
    let mut objective_history = Vec::new();
    let mut iterations_used = 0;
    let mut final_shift = f64::INFINITY;

    while iterations_used < cfg.max_iter {
        update_memberships(data, &centers, m, &mut memberships);
        let next = weighted_centers(data, &memberships, m, &centers);
        final_shift = next
            .as_slice()
            .iter()
            .zip(centers.as_slice())
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        centers = next;
        iterations_used += 1;

        let objective = fcm_objective(data, &centers, &memberships, m);
        if let Some(&previous) = objective_history.last() {
            debug_assert!(
                objective <= previous * (1.0 + 1e-9) + 1e-300,
                "FCM objective increased: {previous} -> {objective}"
            );
        }
        objective_history.push(objective);

        if final_shift < cfg.epsilon {
            break;
        }
    }
    update_memberships(data, &centers, m, &mut memberships);

    Ok(FcmResult {
        centers,
        memberships,
        iterations_used,
        final_shift,
        objective_history,
    })
}

/// `sum_i sum_j u_ij^m * |x_i - v_j|^2`
pub fn fcm_objective(data: &Matrix, centers: &Matrix, memberships: &Matrix, m: f64) -> f64 {
    let mut total = 0.0;
    for (i, x) in data.iter_rows().enumerate() {
        for (j, v) in centers.iter_rows().enumerate() {
            total += fuzzify(memberships[(i, j)], m) * squared_distance(x, v);
        }
    }
    total
}

fn seeded_centers(data: &Matrix, c: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, data.rows(), c);
    let mut centers = Matrix::zeros(c, data.cols());
    for (j, i) in picked.iter().enumerate() {
        centers.row_mut(j).copy_from_slice(data.row(i));
    }
    centers
}

/// Fills `out` with `u_ij = 1 / sum_k (d_ij / d_ik)^(2/(m-1))`.
///
/// A row that coincides with one or more centers splits its membership
/// equally among them.
fn update_memberships(data: &Matrix, centers: &Matrix, m: f64, out: &mut Matrix) {
    let c = centers.rows();
    let exponent = 1.0 / (m - 1.0);
    let mut d2 = vec![0.0; c];
    for i in 0..data.rows() {
        let x = data.row(i);
        for (j, v) in centers.iter_rows().enumerate() {
            d2[j] = squared_distance(x, v);
        }
        let row = out.row_mut(i);
        let nearest = d2.iter().copied().fold(f64::INFINITY, f64::min);
        if nearest == 0.0 {
            let hits = d2.iter().filter(|&&d| d == 0.0).count() as f64;
            for (u, &d) in row.iter_mut().zip(&d2) {
                *u = if d == 0.0 { 1.0 / hits } else { 0.0 };
            }
            continue;
        }
        // (d_min^2 / d_j^2)^(1/(m-1)) stays in (0, 1], avoiding overflow.
        let mut total = 0.0;
        for (u, &d) in row.iter_mut().zip(&d2) {
            let ratio = nearest / d;
            *u = if exponent == 1.0 { ratio } else { ratio.powf(exponent) };
            total += *u;
        }
        for u in row.iter_mut() {
            *u /= total;
        }
    }
}

fn weighted_centers(data: &Matrix, memberships: &Matrix, m: f64, previous: &Matrix) -> Matrix {
    let c = memberships.cols();
    let d = data.cols();
    let mut sums = Matrix::zeros(c, d);
    let mut weights = vec![0.0; c];
    for (i, x) in data.iter_rows().enumerate() {
        for j in 0..c {
            let w = fuzzify(memberships[(i, j)], m);
            if w == 0.0 {
                continue;
            }
            weights[j] += w;
            for (s, &xv) in sums.row_mut(j).iter_mut().zip(x) {
                *s += w * xv;
            }
        }
    }
    for (j, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            for s in sums.row_mut(j) {
                *s /= w;
            }
        } else {
            sums.row_mut(j).copy_from_slice(previous.row(j));
        }
    }
    sums
}

#[inline]
pub(crate) fn fuzzify(u: f64, m: f64) -> f64 {
    if m == 2.0 {
        u * u
    } else {
        u.powf(m)
    }
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
