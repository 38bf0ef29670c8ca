//! Fully connected ReLU network with a two-way softmax head, trained with
//! Adam on the negative log-likelihood.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{SpectraError, TissueClass};

pub const FULL_HIDDEN: [usize; 3] = [1024, 512, 256];

/// Weights are stored `in × out` so a batch (`rows = samples`) propagates
/// as `A·W + b`. Column-major storage of that layout is exactly the
/// row-major `out × in` array used on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MlpFile", try_from = "MlpFile")]
pub struct MlpModel {
    sizes: Vec<usize>,
    weights: Vec<DMatrix<f64>>,
    biases: Vec<DVector<f64>>,
    pub norm_mean: f64,
    pub norm_std: f64,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct MlpFile {
    layer_sizes: Vec<usize>,
    /// One `out × in` row-major array per layer.
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    norm_mean: f64,
    norm_std: f64,
    seed: u64,
}

impl From<MlpModel> for MlpFile {
    fn from(m: MlpModel) -> Self {
        MlpFile {
            layer_sizes: m.sizes,
            weights: m.weights.iter().map(|w| w.as_slice().to_vec()).collect(),
            biases: m.biases.iter().map(|b| b.as_slice().to_vec()).collect(),
            norm_mean: m.norm_mean,
            norm_std: m.norm_std,
            seed: m.seed,
        }
    }
}

impl TryFrom<MlpFile> for MlpModel {
    type Error = String;

    fn try_from(f: MlpFile) -> Result<Self, String> {
        let layers = f.layer_sizes.len().saturating_sub(1);
        if layers == 0 || f.weights.len() != layers || f.biases.len() != layers {
            return Err("layer count mismatch".into());
        }
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..layers {
            let (i, o) = (f.layer_sizes[l], f.layer_sizes[l + 1]);
            if f.weights[l].len() != i * o || f.biases[l].len() != o {
                return Err(format!("layer {l} has the wrong number of parameters"));
            }
            if f.weights[l].iter().chain(&f.biases[l]).any(|v| !v.is_finite()) {
                return Err(format!("layer {l} has non-finite parameters"));
            }
            weights.push(DMatrix::from_column_slice(i, o, &f.weights[l]));
            biases.push(DVector::from_column_slice(&f.biases[l]));
        }
        Ok(MlpModel {
            sizes: f.layer_sizes,
            weights,
            biases,
            norm_mean: f.norm_mean,
            norm_std: f.norm_std,
            seed: f.seed,
        })
    }
}

/// Parameter gradients, laid out like the model.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<DMatrix<f64>>,
    pub biases: Vec<DVector<f64>>,
}

impl MlpModel {
    /// He-uniform initialization: `U(−√(6/fan_in), √(6/fan_in))`, zero biases.
    pub fn new(input: usize, hidden: &[usize], seed: u64) -> Self {
        let mut sizes = vec![input];
        sizes.extend_from_slice(hidden);
        sizes.push(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = sizes
            .windows(2)
            .map(|w| {
                let bound = (6.0 / w[0] as f64).sqrt();
                DMatrix::from_fn(w[0], w[1], |_, _| rng.random_range(-bound..bound))
            })
            .collect();
        let biases = sizes[1..].iter().map(|&n| DVector::zeros(n)).collect();
        Self {
            sizes,
            weights,
            biases,
            norm_mean: 0.0,
            norm_std: 1.0,
            seed,
        }
    }

    /// Same shape with every parameter zero.
    pub fn zeroed(input: usize, hidden: &[usize]) -> Self {
        let mut m = Self::new(input, hidden, 0);
        m.weights.iter_mut().for_each(|w| w.fill(0.0));
        m
    }

    pub fn input_width(&self) -> usize {
        self.sizes[0]
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn weights(&self) -> &[DMatrix<f64>] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [DMatrix<f64>] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [DVector<f64>] {
        &mut self.biases
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>() + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|v| v.is_finite()))
            && self.biases.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }

    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| (v - self.norm_mean) / self.norm_std).collect()
    }

    /// Pre-activations for each layer given a normalized batch.
    fn forward_batch(&self, x: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
        let mut zs: Vec<DMatrix<f64>> = Vec::with_capacity(self.weights.len());
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let mut z = if l == 0 { x * w } else { relu(&zs[l - 1]) * w };
            for mut row in z.row_iter_mut() {
                row += b.transpose();
            }
            zs.push(z);
        }
        zs
    }

    /// Class probabilities for an already normalized input vector.
    pub fn forward(&self, x: &[f64]) -> Result<[f64; 2], SpectraError> {
        if x.len() != self.input_width() {
            return Err(SpectraError::ShapeMismatch {
                expected: self.input_width(),
                got: x.len(),
            });
        }
        let xm = DMatrix::from_row_slice(1, x.len(), x);
        let logits = self.forward_batch(&xm).pop().expect("at least one layer");
        Ok(softmax2([logits[(0, 0)], logits[(0, 1)]]))
    }

    /// Normalizes raw features with the stored statistics, then classifies.
    pub fn predict(&self, features: &[f64]) -> Result<TissueClass, SpectraError> {
        let p = self.forward(&self.normalize(features))?;
        Ok(if p[1] > p[0] { TissueClass::Tumor } else { TissueClass::Healthy })
    }

    /// Weighted mean NLL and its gradient for a normalized batch.
    pub fn loss_and_gradients(&self, x: &DMatrix<f64>, y: &[usize], class_weight: [f64; 2]) -> (f64, Gradients) {
        let zs = self.forward_batch(x);
        let logits = zs.last().expect("at least one layer");
        let n = x.nrows();
        let total_w: f64 = y.iter().map(|&c| class_weight[c]).sum();
        let mut loss = 0.0;
        let mut dz = DMatrix::zeros(n, 2);
        for i in 0..n {
            let l = [logits[(i, 0)], logits[(i, 1)]];
            let lse = log_sum_exp2(l);
            let w = class_weight[y[i]] / total_w;
            loss -= w * (l[y[i]] - lse);
            for c in 0..2 {
                let p = (l[c] - lse).exp();
                dz[(i, c)] = w * (p - if c == y[i] { 1.0 } else { 0.0 });
            }
        }
        let layers = self.weights.len();
        let mut gw = vec![DMatrix::zeros(0, 0); layers];
        let mut gb = vec![DVector::zeros(0); layers];
        for l in (0..layers).rev() {
            let input = if l == 0 { x.clone() } else { relu(&zs[l - 1]) };
            gw[l] = input.tr_mul(&dz);
            gb[l] = dz.row_sum().transpose();
            if l > 0 {
                let mut da = (&self.weights[l] * dz.transpose()).transpose();
                da.zip_apply(&zs[l - 1], |d, z| {
                    if z <= 0.0 {
                        *d = 0.0
                    }
                });
                dz = da;
            }
        }
        (loss, Gradients { weights: gw, biases: gb })
    }

    pub fn loss(&self, x: &DMatrix<f64>, y: &[usize], class_weight: [f64; 2]) -> f64 {
        let zs = self.forward_batch(x);
        let logits = zs.last().expect("at least one layer");
        let total_w: f64 = y.iter().map(|&c| class_weight[c]).sum();
        (0..x.nrows())
            .map(|i| {
                let l = [logits[(i, 0)], logits[(i, 1)]];
                -class_weight[y[i]] / total_w * (l[y[i]] - log_sum_exp2(l))
            })
            .sum()
    }
}

fn relu(z: &DMatrix<f64>) -> DMatrix<f64> {
    z.map(|v| v.max(0.0))
}

fn log_sum_exp2(l: [f64; 2]) -> f64 {
    let m = l[0].max(l[1]);
    m + ((l[0] - m).exp() + (l[1] - m).exp()).ln()
}

pub fn softmax2(l: [f64; 2]) -> [f64; 2] {
    let lse = log_sum_exp2(l);
    [(l[0] - lse).exp(), (l[1] - lse).exp()]
}

pub fn mlp_forward(model: &MlpModel, x: &[f64]) -> Result<[f64; 2], SpectraError> {
    model.forward(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Inverse-frequency class weights in the loss.
    pub class_weighting: bool,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: FULL_HIDDEN.to_vec(),
            epochs: 150,
            batch_size: 16,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            class_weighting: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    /// Mean training loss per epoch.
    pub epoch_loss: Vec<f64>,
}

struct Adam {
    m_w: Vec<DMatrix<f64>>,
    v_w: Vec<DMatrix<f64>>,
    m_b: Vec<DVector<f64>>,
    v_b: Vec<DVector<f64>>,
    t: i32,
}

impl Adam {
    fn new(model: &MlpModel) -> Self {
        let zw = || model.weights.iter().map(|w| DMatrix::zeros(w.nrows(), w.ncols())).collect::<Vec<_>>();
        let zb = || model.biases.iter().map(|b| DVector::zeros(b.len())).collect::<Vec<_>>();
        Self {
            m_w: zw(),
            v_w: zw(),
            m_b: zb(),
            v_b: zb(),
            t: 0,
        }
    }

    fn step(&mut self, model: &mut MlpModel, g: &Gradients, cfg: &TrainConfig) {
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t);
        let c2 = 1.0 - cfg.beta2.powi(self.t);
        let lr = cfg.learning_rate;
        let (b1, b2, eps) = (cfg.beta1, cfg.beta2, cfg.epsilon);
        let update = |p: &mut [f64], m: &mut [f64], v: &mut [f64], g: &[f64]| {
            for k in 0..p.len() {
                m[k] = b1 * m[k] + (1.0 - b1) * g[k];
                v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
                p[k] -= lr * (m[k] / c1) / ((v[k] / c2).sqrt() + eps);
            }
        };
        for l in 0..model.weights.len() {
            update(
                model.weights[l].as_mut_slice(),
                self.m_w[l].as_mut_slice(),
                self.v_w[l].as_mut_slice(),
                g.weights[l].as_slice(),
            );
            update(
                model.biases[l].as_mut_slice(),
                self.m_b[l].as_mut_slice(),
                self.v_b[l].as_mut_slice(),
                g.biases[l].as_slice(),
            );
        }
    }
}

/// Global scalar mean and standard deviation over every feature value.
pub fn normalization_stats(x: &[Vec<f64>]) -> (f64, f64) {
    let n: usize = x.iter().map(|r| r.len()).sum();
    if n == 0 {
        return (0.0, 1.0);
    }
    let mean = x.iter().flatten().sum::<f64>() / n as f64;
    let var = x.iter().flatten().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let std = var.sqrt();
    (mean, if std > 1e-12 { std } else { 1.0 })
}

fn batch_matrix(model: &MlpModel, x: &[Vec<f64>], idx: &[usize]) -> DMatrix<f64> {
    let width = model.input_width();
    DMatrix::from_fn(idx.len(), width, |r, c| (x[idx[r]][c] - model.norm_mean) / model.norm_std)
}

/// Trains on raw feature rows. Normalization statistics come from `x` only.
pub fn train(x: &[Vec<f64>], y: &[TissueClass], cfg: &TrainConfig) -> Result<(MlpModel, TrainHistory), SpectraError> {
    if x.is_empty() || x.len() != y.len() {
        return Err(SpectraError::EmptyInput);
    }
    let width = x[0].len();
    if let Some(bad) = x.iter().find(|r| r.len() != width) {
        return Err(SpectraError::ShapeMismatch {
            expected: width,
            got: bad.len(),
        });
    }
    let labels: Vec<usize> = y.iter().map(|c| c.index()).collect();
    let counts = [0, 1].map(|c| labels.iter().filter(|&&l| l == c).count());
    if counts.contains(&0) {
        return Err(SpectraError::SingleClassTrainingSet);
    }
    let class_weight = if cfg.class_weighting {
        let n = labels.len() as f64;
        [n / (2.0 * counts[0] as f64), n / (2.0 * counts[1] as f64)]
    } else {
        [1.0, 1.0]
    };

    let mut model = MlpModel::new(width, &cfg.hidden, cfg.seed);
    (model.norm_mean, model.norm_std) = normalization_stats(x);
    let mut adam = Adam::new(&model);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5348_5546_464c_4500);
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut history = TrainHistory { epoch_loss: Vec::new() };
    let batch = cfg.batch_size.max(1);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut sum = 0.0;
        for chunk in order.chunks(batch) {
            let xb = batch_matrix(&model, x, chunk);
            let yb: Vec<usize> = chunk.iter().map(|&i| labels[i]).collect();
            let (loss, g) = model.loss_and_gradients(&xb, &yb, class_weight);
            sum += loss * chunk.len() as f64;
            adam.step(&mut model, &g, cfg);
        }
        history.epoch_loss.push(sum / x.len() as f64);
    }
    Ok((model, history))
}

/// Trains on the rows of `dataset` selected by the plan's training indices.
pub fn mlp_train(
    dataset: &[super::splits::LabeledSample],
    split: &super::SplitPlan,
    cfg: &TrainConfig,
) -> Result<(MlpModel, TrainHistory), SpectraError> {
    let x: Vec<Vec<f64>> = split.train_indices.iter().map(|&i| dataset[i].features.clone()).collect();
    let y: Vec<TissueClass> = split.train_indices.iter().map(|&i| dataset[i].label).collect();
    train(&x, &y, cfg)
}

fn param_mut(m: &mut MlpModel, is_bias: bool, l: usize, k: usize) -> &mut f64 {
    if is_bias {
        &mut m.biases[l][k]
    } else {
        &mut m.weights[l].as_mut_slice()[k]
    }
}

/// Maximum relative error between the analytic gradient and central finite
/// differences (`h = 1e-5`) on `samples` randomly chosen parameters.
///
/// Relative error is `|a − n| / max(|a|, |n|, 1e-8)`, so parameters with
/// vanishing gradients are compared absolutely.
pub fn gradient_check(model: &MlpModel, x: &[Vec<f64>], y: &[TissueClass], samples: usize, seed: u64) -> f64 {
    let idx: Vec<usize> = (0..x.len()).collect();
    let xb = batch_matrix(model, x, &idx);
    let yb: Vec<usize> = y.iter().map(|c| c.index()).collect();
    let w = [1.0, 1.0];
    let (_, g) = model.loss_and_gradients(&xb, &yb, w);
    let h = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = model.weights.len();
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let l = rng.random_range(0..layers);
        let is_bias = rng.random_bool(0.1);
        let (k, analytic) = if is_bias {
            let k = rng.random_range(0..probe.biases[l].len());
            (k, g.biases[l][k])
        } else {
            let k = rng.random_range(0..probe.weights[l].len());
            (k, g.weights[l].as_slice()[k])
        };
        let orig = *param_mut(&mut probe, is_bias, l, k);
        *param_mut(&mut probe, is_bias, l, k) = orig + h;
        let plus = probe.loss(&xb, &yb, w);
        *param_mut(&mut probe, is_bias, l, k) = orig - h;
        let minus = probe.loss(&xb, &yb, w);
        *param_mut(&mut probe, is_bias, l, k) = orig;
        let numeric = (plus - minus) / (2.0 * h);
        let err = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
        worst = worst.max(err);
    }
    worst
}
