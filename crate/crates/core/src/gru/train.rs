use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GruError, GruModel};
use crate::chaos::{step_scphm, KeyBundle};

/// Orbit length iterated for training data.
pub const ORBIT_POINTS: usize = 30_000;
/// Leading iterates dropped before the retained segment.
pub const DISCARD_POINTS: usize = 6_000;

const CLIP_NORM: f64 = 1.0;

/// x-component of the 2D-SCPHM orbit from the key's initial state,
/// iterates 6001..=30000, min-max scaled to `[0, 1]`.
pub fn prepare_training_data(keys: &KeyBundle) -> Result<Vec<f64>, GruError> {
    let params = keys.params();
    let mut s = (keys.x0(), keys.y0());
    let mut xs = Vec::with_capacity(ORBIT_POINTS - DISCARD_POINTS);
    for i in 0..ORBIT_POINTS {
        s = step_scphm(s, params)?;
        if i >= DISCARD_POINTS {
            xs.push(s.0);
        }
    }
    let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    if hi <= lo {
        return Err(GruError::Data(format!("orbit is constant at {lo}")));
    }
    Ok(xs.into_iter().map(|v| (v - lo) / (hi - lo)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GruConfig {
    pub hidden_units: usize,
    pub sequence_length: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Prefix of the data used for training.
    pub train_points: usize,
    /// Windows per gradient step.
    pub batch_size: usize,
    /// Seeds weight init and window shuffling.
    pub seed: u64,
}

impl Default for GruConfig {
    fn default() -> Self {
        Self {
            hidden_units: 32,
            sequence_length: 20,
            learning_rate: 1e-2,
            epochs: 200,
            train_points: 24_000,
            batch_size: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub model: GruModel,
    /// Mean squared one-step error per epoch, measured on each batch just
    /// before its update.
    pub losses: Vec<f64>,
}

/// Mini-batch gradient descent with the gradient clipped to norm 1.
pub fn train(data: &[f64], config: &GruConfig) -> Result<TrainingRun, GruError> {
    let l = config.sequence_length;
    if config.train_points > data.len() {
        return Err(GruError::Config(format!(
            "train_points {} exceeds {} available",
            config.train_points,
            data.len()
        )));
    }
    if config.train_points <= l {
        return Err(GruError::Config(format!("need more than {l} points, got {}", config.train_points)));
    }
    if config.batch_size == 0 || !(config.learning_rate > 0.0) {
        return Err(GruError::Config("batch_size and learning_rate must be positive".into()));
    }
    let data = &data[..config.train_points];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = GruModel::random(config.hidden_units, l, &mut rng)?;
    let mut starts: Vec<usize> = (0..data.len() - l).collect();
    let mut grad = vec![0.0; model.params.len()];
    let mut losses = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        starts.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in starts.chunks(config.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let scale = 1.0 / batch.len() as f64;
            for &s in batch {
                let trace = model.forward_trace(&data[s..s + l])?;
                total += model.accumulate_gradient(&trace, data[s + l], scale, &mut grad);
            }
            let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if !norm.is_finite() {
                return Err(GruError::Diverged { epoch });
            }
            let step = config.learning_rate * if norm > CLIP_NORM { CLIP_NORM / norm } else { 1.0 };
            model.params.iter_mut().zip(&grad).for_each(|(p, g)| *p -= step * g);
        }
        let loss = total / starts.len() as f64;
        if !loss.is_finite() {
            return Err(GruError::Diverged { epoch });
        }
        losses.push(loss);
    }
    Ok(TrainingRun { model, losses })
}

/// Closed-loop generation: each prediction is appended to the window and
/// the oldest value dropped.
pub fn generate(model: &GruModel, seed_window: &[f64], n: usize) -> Result<Vec<f64>, GruError> {
    model.check(seed_window)?;
    let mut window = seed_window.to_vec();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let y = model.forward(&window)?;
        out.push(y);
        window.rotate_left(1);
        *window.last_mut().expect("non-empty window") = y;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(epochs: usize) -> GruConfig {
        GruConfig {
            hidden_units: 4,
            sequence_length: 5,
            learning_rate: 0.1,
            epochs,
            train_points: 200,
            batch_size: 4,
            seed: 3,
        }
    }

    #[test]
    fn training_data_shape() {
        let keys = KeyBundle::from_values(0.1, 0.2, 0.3, 1.4, 1000).unwrap();
        let d = prepare_training_data(&keys).unwrap();
        assert_eq!(d.len(), 24_000);
        assert!(d.contains(&0.0) && d.contains(&1.0));
        assert!(d.iter().all(|v| (0.0..=1.0).contains(v)));

        // first retained point is iterate 6001
        let mut s = (keys.x0(), keys.y0());
        let mut xs = Vec::new();
        for _ in 0..ORBIT_POINTS {
            s = step_scphm(s, keys.params()).unwrap();
            xs.push(s.0);
        }
        let tail = &xs[DISCARD_POINTS..];
        let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(d[0], (xs[6000] - lo) / (hi - lo));
    }

    #[test]
    fn constant_series_is_learned() {
        let data = vec![0.7; 200];
        let run = train(&data, &small(50)).unwrap();
        assert!(*run.losses.last().unwrap() < 1e-4, "{:?}", run.losses.last());
        let y = run.model.forward(&[0.7; 5]).unwrap();
        assert!((y - 0.7).abs() < 1e-2);
    }

    #[test]
    fn smoothed_loss_is_non_increasing() {
        let data: Vec<f64> = (0..200).map(|i| 0.5 + 0.4 * (i as f64 * 0.3).sin()).collect();
        let run = train(&data, &small(60)).unwrap();
        let smooth: Vec<f64> = run.losses.windows(5).map(|w| w.iter().sum::<f64>() / 5.0).collect();
        for w in smooth.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9), "{smooth:?}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let data: Vec<f64> = (0..200).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let a = train(&data, &small(3)).unwrap();
        let b = train(&data, &small(3)).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.losses, b.losses);
    }

    #[test]
    fn config_errors() {
        let data = vec![0.5; 10];
        assert!(matches!(train(&data, &small(1)), Err(GruError::Config(_))));
        let cfg = GruConfig {
            train_points: 5,
            ..small(1)
        };
        assert!(train(&data, &cfg).is_err());
    }

    #[test]
    fn generation() {
        let m = GruModel::random(3, 4, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(generate(&m, &[0.1; 4], 0).unwrap().is_empty());
        let g = generate(&m, &[0.1, 0.2, 0.3, 0.4], 50).unwrap();
        assert_eq!(g.len(), 50);
        assert!(g.iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(g[0], m.forward(&[0.1, 0.2, 0.3, 0.4]).unwrap());
        assert_eq!(g[1], m.forward(&[0.2, 0.3, 0.4, g[0]]).unwrap());
        assert!(generate(&m, &[0.1; 3], 1).is_err());
    }
}
