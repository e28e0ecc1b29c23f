//! Minimal single-layer GRU for one-step-ahead prediction of a scalar
//! series, trained with truncated BPTT over fixed windows.
//!
//! Cell, with `h₀ = 0`:
//!
//! ```text
//! z  = σ(W_z x + U_z h + b_z)
//! r  = σ(W_r x + U_r h + b_r)
//! h̃ = tanh(W_h x + U_h (r ⊙ h) + b_h)
//! h' = (1 − z) ⊙ h + z ⊙ h̃
//! ŷ  = σ(w_o · h_L + b_o)
//! ```

mod checkpoint;
mod train;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use train::{generate, prepare_training_data, train, GruConfig, TrainingRun, DISCARD_POINTS, ORBIT_POINTS};

use rand::Rng;
use thiserror::Error;

use crate::chaos::ChaosError;

#[derive(Debug, Error)]
pub enum GruError {
    #[error("window has {got} values, model expects {expected}")]
    Shape { expected: usize, got: usize },
    #[error("training diverged in epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid training data: {0}")]
    Data(String),
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Chaos(#[from] ChaosError),
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Weights live in one flat vector so that gradients, updates and
/// checkpoints all share a layout. Per gate `g ∈ {z, r, h}`:
/// `W_g` (H), `U_g` (H×H row-major), `b_g` (H); then `w_o` (H), `b_o`.
#[derive(Debug, Clone, PartialEq)]
pub struct GruModel {
    hidden: usize,
    sequence_length: usize,
    params: Vec<f64>,
}

#[derive(Clone, Copy)]
struct Gate {
    w: usize,
    u: usize,
    b: usize,
}

/// Per-step activations kept for the backward pass.
struct StepCache {
    x: f64,
    h_prev: Vec<f64>,
    z: Vec<f64>,
    r: Vec<f64>,
    c: Vec<f64>,
}

pub(crate) struct Trace {
    steps: Vec<StepCache>,
    h: Vec<f64>,
    y: f64,
}

impl GruModel {
    pub fn param_count(hidden: usize) -> usize {
        3 * (2 * hidden + hidden * hidden) + hidden + 1
    }

    pub fn zeros(hidden: usize, sequence_length: usize) -> Result<Self, GruError> {
        if hidden == 0 || sequence_length == 0 {
            return Err(GruError::Config("hidden_units and sequence_length must be positive".into()));
        }
        Ok(Self {
            hidden,
            sequence_length,
            params: vec![0.0; Self::param_count(hidden)],
        })
    }

    /// Uniform init in `±1/√H`.
    pub fn random<R: Rng + ?Sized>(hidden: usize, sequence_length: usize, rng: &mut R) -> Result<Self, GruError> {
        let mut m = Self::zeros(hidden, sequence_length)?;
        let k = 1.0 / (hidden as f64).sqrt();
        m.params.iter_mut().for_each(|p| *p = rng.gen_range(-k..k));
        Ok(m)
    }

    pub fn from_params(hidden: usize, sequence_length: usize, params: Vec<f64>) -> Result<Self, GruError> {
        let mut m = Self::zeros(hidden, sequence_length)?;
        if params.len() != m.params.len() {
            return Err(GruError::Shape {
                expected: m.params.len(),
                got: params.len(),
            });
        }
        if let Some(i) = params.iter().position(|p| !p.is_finite()) {
            return Err(GruError::Checkpoint(format!("parameter {i} is not finite")));
        }
        m.params = params;
        Ok(m)
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden
    }

    pub fn sequence_length(&self) -> usize {
        self.sequence_length
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn gate(&self, g: usize) -> Gate {
        let h = self.hidden;
        let base = g * (2 * h + h * h);
        Gate {
            w: base,
            u: base + h,
            b: base + h + h * h,
        }
    }

    fn out_w(&self) -> usize {
        3 * (2 * self.hidden + self.hidden * self.hidden)
    }

    fn out_b(&self) -> usize {
        self.out_w() + self.hidden
    }

    /// `g.w·x + g.u·v + g.b` for every unit.
    fn pre_activation(&self, g: Gate, x: f64, v: &[f64], out: &mut [f64]) {
        let h = self.hidden;
        let p = &self.params;
        for (i, o) in out.iter_mut().enumerate() {
            let row = &p[g.u + i * h..g.u + (i + 1) * h];
            *o = p[g.w + i] * x + p[g.b + i] + row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        }
    }

    fn check(&self, window: &[f64]) -> Result<(), GruError> {
        if window.len() != self.sequence_length {
            return Err(GruError::Shape {
                expected: self.sequence_length,
                got: window.len(),
            });
        }
        Ok(())
    }

    /// One-step-ahead prediction for a window of `sequence_length` values.
    pub fn forward(&self, window: &[f64]) -> Result<f64, GruError> {
        self.check(window)?;
        let n = self.hidden;
        let (mut h, mut z, mut r, mut c, mut rh) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for &x in window {
            self.cell(x, &h, &mut z, &mut r, &mut c, &mut rh);
            for i in 0..n {
                h[i] = (1.0 - z[i]) * h[i] + z[i] * c[i];
            }
        }
        Ok(self.head(&h))
    }

    fn cell(&self, x: f64, h: &[f64], z: &mut [f64], r: &mut [f64], c: &mut [f64], rh: &mut [f64]) {
        self.pre_activation(self.gate(0), x, h, z);
        self.pre_activation(self.gate(1), x, h, r);
        z.iter_mut().for_each(|v| *v = sigmoid(*v));
        r.iter_mut().for_each(|v| *v = sigmoid(*v));
        for i in 0..h.len() {
            rh[i] = r[i] * h[i];
        }
        self.pre_activation(self.gate(2), x, rh, c);
        c.iter_mut().for_each(|v| *v = v.tanh());
    }

    fn head(&self, h: &[f64]) -> f64 {
        let w = &self.params[self.out_w()..self.out_b()];
        sigmoid(self.params[self.out_b()] + w.iter().zip(h).map(|(a, b)| a * b).sum::<f64>())
    }

    pub(crate) fn forward_trace(&self, window: &[f64]) -> Result<Trace, GruError> {
        self.check(window)?;
        let n = self.hidden;
        let mut h = vec![0.0; n];
        let mut rh = vec![0.0; n];
        let mut steps = Vec::with_capacity(window.len());
        for &x in window {
            let (mut z, mut r, mut c) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
            self.cell(x, &h, &mut z, &mut r, &mut c, &mut rh);
            let next: Vec<f64> = (0..n).map(|i| (1.0 - z[i]) * h[i] + z[i] * c[i]).collect();
            steps.push(StepCache {
                x,
                h_prev: std::mem::replace(&mut h, next),
                z,
                r,
                c,
            });
        }
        let y = self.head(&h);
        Ok(Trace { steps, h, y })
    }

    /// Adds `∂ℓ/∂θ · scale` to `grad`, where `ℓ = (ŷ − target)²`.
    /// Returns `ℓ`.
    pub(crate) fn accumulate_gradient(&self, trace: &Trace, target: f64, scale: f64, grad: &mut [f64]) -> f64 {
        let n = self.hidden;
        let p = &self.params;
        let err = trace.y - target;
        let d_out = scale * 2.0 * err * trace.y * (1.0 - trace.y);
        let (ow, ob) = (self.out_w(), self.out_b());
        grad[ob] += d_out;
        let mut dh = vec![0.0; n];
        for i in 0..n {
            grad[ow + i] += d_out * trace.h[i];
            dh[i] = d_out * p[ow + i];
        }
        let (gz, gr, gc) = (self.gate(0), self.gate(1), self.gate(2));
        let mut da_z = vec![0.0; n];
        let mut da_r = vec![0.0; n];
        let mut da_c = vec![0.0; n];
        let mut d_rh = vec![0.0; n];
        for s in trace.steps.iter().rev() {
            let mut dh_prev = vec![0.0; n];
            for i in 0..n {
                let dz = dh[i] * (s.c[i] - s.h_prev[i]);
                let dc = dh[i] * s.z[i];
                dh_prev[i] = dh[i] * (1.0 - s.z[i]);
                da_c[i] = dc * (1.0 - s.c[i] * s.c[i]);
                da_z[i] = dz * s.z[i] * (1.0 - s.z[i]);
            }
            // candidate: input is r ⊙ h_prev
            d_rh.iter_mut().for_each(|v| *v = 0.0);
            for i in 0..n {
                let d = da_c[i];
                grad[gc.w + i] += d * s.x;
                grad[gc.b + i] += d;
                let row = gc.u + i * n;
                for j in 0..n {
                    grad[row + j] += d * s.r[j] * s.h_prev[j];
                    d_rh[j] += p[row + j] * d;
                }
            }
            for j in 0..n {
                dh_prev[j] += d_rh[j] * s.r[j];
                let dr = d_rh[j] * s.h_prev[j];
                da_r[j] = dr * s.r[j] * (1.0 - s.r[j]);
            }
            for (g, da) in [(gz, &da_z), (gr, &da_r)] {
                for i in 0..n {
                    let d = da[i];
                    grad[g.w + i] += d * s.x;
                    grad[g.b + i] += d;
                    let row = g.u + i * n;
                    for j in 0..n {
                        grad[row + j] += d * s.h_prev[j];
                        dh_prev[j] += p[row + j] * d;
                    }
                }
            }
            dh = dh_prev;
        }
        err * err
    }

    /// Gradient of the squared error on one window.
    pub fn gradient(&self, window: &[f64], target: f64) -> Result<(f64, Vec<f64>), GruError> {
        let trace = self.forward_trace(window)?;
        let mut g = vec![0.0; self.params.len()];
        let loss = self.accumulate_gradient(&trace, target, 1.0, &mut g);
        Ok((loss, g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_model_outputs_squashed_bias() {
        let mut m = GruModel::zeros(4, 3).unwrap();
        assert_eq!(m.forward(&[0.0; 3]).unwrap(), 0.5);
        let ob = m.out_b();
        m.params_mut()[ob] = 0.8;
        assert_eq!(m.forward(&[0.0; 3]).unwrap(), sigmoid(0.8));
        // zero gates keep h at 0 whatever the input
        assert_eq!(m.forward(&[1.0, -2.0, 3.0]).unwrap(), sigmoid(0.8));
    }

    #[test]
    fn shape_mismatch() {
        let m = GruModel::zeros(2, 5).unwrap();
        assert!(matches!(m.forward(&[0.0; 4]), Err(GruError::Shape { expected: 5, got: 4 })));
        assert!(GruModel::zeros(0, 5).is_err());
        assert!(GruModel::from_params(2, 5, vec![0.0; 3]).is_err());
    }

    #[test]
    fn hand_set_single_unit() {
        // layout for H = 1: [Wz, Uz, bz, Wr, Ur, br, Wh, Uh, bh, wo, bo];
        // expected value from tests/oracle/gru_cell.py
        let p = vec![0.5, -0.3, 0.1, 0.2, 0.4, -0.2, 1.5, 0.7, 0.05, 2.0, -0.5];
        let m = GruModel::from_params(1, 2, p).unwrap();
        let y = m.forward(&[0.3, 0.8]).unwrap();
        assert!((y - 0.681_313_439_202_544_1).abs() < 1e-15, "{y:.17}");
    }

    fn central_difference(m: &GruModel, window: &[f64], target: f64, i: usize, eps: f64) -> f64 {
        let mut plus = m.clone();
        plus.params[i] += eps;
        let mut minus = m.clone();
        minus.params[i] -= eps;
        let lp = (plus.forward(window).unwrap() - target).powi(2);
        let lm = (minus.forward(window).unwrap() - target).powi(2);
        (lp - lm) / (2.0 * eps)
    }

    fn check_gradient(hidden: usize, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = GruModel::random(hidden, 6, &mut rng).unwrap();
        let window: Vec<f64> = (0..6).map(|_| rng.gen()).collect();
        let target = 0.9;
        let (_, g) = m.gradient(&window, target).unwrap();
        for (i, &a) in g.iter().enumerate() {
            let fd = central_difference(&m, &window, target, i, 1e-6);
            let denom = a.abs().max(fd.abs());
            if denom > 1e-8 {
                assert!((a - fd).abs() / denom < 1e-4, "param {i}: analytic {a}, fd {fd}");
            } else {
                assert!((a - fd).abs() < 1e-10, "param {i}: analytic {a}, fd {fd}");
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences_one_unit() {
        for seed in 0..10 {
            check_gradient(1, seed);
        }
    }

    #[test]
    fn gradient_matches_finite_differences_four_units() {
        check_gradient(4, 99);
    }
}
