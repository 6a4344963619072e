//! Dense vector/matrix arithmetic, losses, forecast normalization, Adam,
//! and analytic gradients for linear layers.
//!
//! Everything here is a pure function of its inputs; optimizer state is
//! passed in and returned, never shared. All arithmetic is in `f64`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::Error;

/// Magnitudes below this are treated as zero in norm guards.
pub const EPS_NORM: f64 = 1e-12;

fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<(), Error> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension {
            context,
            expected,
            actual,
        })
    }
}

/// Dot product of two equal-length vectors.
pub fn dot(a: &[f64], b: &[f64]) -> Result<f64, Error> {
    check_len("dot", a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(x, y)| x * y).sum())
}

/// Euclidean norm.
pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(a.iter().map(|x| x * x).sum::<f64>())
}

/// Cosine similarity; returns 0 when either norm is below [`EPS_NORM`].
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64, Error> {
    check_len("cosine_similarity", a.len(), b.len())?;
    let na = norm(a);
    let nb = norm(b);
    if na < EPS_NORM || nb < EPS_NORM {
        return Ok(0.0);
    }
    Ok(dot(a, b)? / (na * nb))
}

/// Mean squared error and its gradient with respect to `pred`.
pub fn mse_loss(pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>), Error> {
    check_len("mse_loss", pred.len(), target.len())?;
    let n = pred.len() as f64;
    let mut grad = vec![0.0; pred.len()];
    let mut loss = 0.0;
    for i in 0..pred.len() {
        let d = pred[i] - target[i];
        loss += d * d;
        grad[i] = 2.0 * d / n;
    }
    Ok((loss / n, grad))
}

/// `1 - cosine_similarity(pred, target)` and its gradient with respect
/// to `pred`.
///
/// A zero-norm target is rejected. A zero-norm prediction yields loss 1
/// and the descent direction `-target/‖target‖`.
pub fn cosine_loss(pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>), Error> {
    check_len("cosine_loss", pred.len(), target.len())?;
    let nt = norm(target);
    if nt < EPS_NORM {
        return Err(Error::DegenerateTarget);
    }
    let np = norm(pred);
    if np < EPS_NORM {
        let grad = target.iter().map(|t| -t / nt).collect();
        return Ok((1.0, grad));
    }
    let cos = dot(pred, target)? / (np * nt);
    let mut grad = vec![0.0; pred.len()];
    for i in 0..pred.len() {
        grad[i] = cos * pred[i] / (np * np) - target[i] / (np * nt);
    }
    Ok((1.0 - cos, grad))
}

/// Min-shift plus sum-normalization onto the probability simplex.
///
/// Subtracts the (signed) minimum and divides by the shifted sum; a
/// constant vector falls back to the uniform distribution.
pub fn normalize_forecast(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    debug_assert!(n > 0);
    let min = v
        .iter()
        .fold(f64::INFINITY, |m, &x| if x < m { x } else { m });
    let sum: f64 = v.iter().map(|x| x - min).sum();
    if sum < EPS_NORM {
        return vec![1.0 / n as f64; n];
    }
    v.iter().map(|x| (x - min) / sum).collect()
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix, Error> {
        check_len("Matrix::from_vec", rows * cols, data.len())?;
        Ok(Matrix { rows, cols, data })
    }

    /// Identity-like matrix (1 on the main diagonal), not necessarily square.
    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: f64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn add_assign(&mut self, other: &Matrix) -> Result<(), Error> {
        check_len("Matrix::add_assign", self.data.len(), other.data.len())?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: f64) {
        for a in &mut self.data {
            *a *= factor;
        }
    }

    pub fn fill(&mut self, value: f64) {
        for a in &mut self.data {
            *a = value;
        }
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.cols)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamParams {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamParams {
    pub fn with_lr(lr: f64) -> Self {
        AdamParams {
            lr,
            ..AdamParams::default()
        }
    }
}

/// Per-parameter Adam state (first/second moments plus the step counter).
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    params: AdamParams,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    beta1_pow: f64,
    beta2_pow: f64,
}

impl AdamState {
    pub fn new(len: usize, params: AdamParams) -> AdamState {
        AdamState {
            params,
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
            beta1_pow: 1.0,
            beta2_pow: 1.0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    pub fn params(&self) -> AdamParams {
        self.params
    }

    /// One bias-corrected Adam update of `values` in place.
    pub fn step(&mut self, values: &mut [f64], grads: &[f64]) -> Result<(), Error> {
        check_len("adam_step state", self.m.len(), values.len())?;
        check_len("adam_step grads", values.len(), grads.len())?;
        let AdamParams {
            lr,
            beta1,
            beta2,
            eps,
        } = self.params;
        self.t += 1;
        self.beta1_pow *= beta1;
        self.beta2_pow *= beta2;
        let m_corr = 1.0 - self.beta1_pow;
        let v_corr = 1.0 - self.beta2_pow;
        for i in 0..values.len() {
            let g = grads[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            let m_hat = self.m[i] / m_corr;
            let v_hat = self.v[i] / v_corr;
            values[i] -= lr * m_hat / (libm::sqrt(v_hat) + eps);
        }
        Ok(())
    }
}

/// `y = Wx + b` for a row-major `out×in` weight matrix.
pub fn linear_forward(weights: &Matrix, bias: &[f64], input: &[f64]) -> Result<Vec<f64>, Error> {
    check_len("linear_forward input", weights.cols(), input.len())?;
    check_len("linear_forward bias", weights.rows(), bias.len())?;
    let mut out = Vec::with_capacity(weights.rows());
    for (row, b) in weights.iter_rows().zip(bias) {
        let mut acc = *b;
        for (w, x) in row.iter().zip(input) {
            acc += w * x;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Gradients of a linear layer with respect to weights, bias, and input.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGrads {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub input: Vec<f64>,
}

/// Analytic backward pass for `y = Wx + b` given the upstream gradient
/// `∂L/∂y`: `dW = g ⊗ x`, `db = g`, `dx = Wᵀg`.
pub fn linear_backward(
    weights: &Matrix,
    input: &[f64],
    upstream: &[f64],
) -> Result<LinearGrads, Error> {
    check_len("linear_backward input", weights.cols(), input.len())?;
    check_len("linear_backward upstream", weights.rows(), upstream.len())?;
    let mut dw = Matrix::zeros(weights.rows(), weights.cols());
    let mut dx = vec![0.0; input.len()];
    for (o, &g) in upstream.iter().enumerate() {
        let w_row = weights.row(o);
        let dw_row = dw.row_mut(o);
        for i in 0..input.len() {
            dw_row[i] = g * input[i];
            dx[i] += g * w_row[i];
        }
    }
    Ok(LinearGrads {
        weights: dw,
        bias: upstream.to_vec(),
        input: dx,
    })
}

/// Standard normal draw via Box-Muller.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}
