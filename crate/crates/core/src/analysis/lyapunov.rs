//! Benettin estimator for the two Lyapunov exponents of a planar map.
//!
//! The leading tangent vector is pushed through the analytic Jacobian and
//! renormalised every step; its log stretch averages to LE1. In two
//! dimensions the QR step needs nothing more: `ln|det J|` is the sum of both
//! log stretches, so LE2 accumulates `ln|det J| − ln R11`. The determinant
//! is taken on a rescaled Jacobian because SCPHM entries can reach 1e250.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AnalysisError, SEED_STATE};
use crate::chaos::{ChaoticMap, Jacobian, MapId, MapParams, PlanarMap, State};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovPair {
    pub le1: f64,
    pub le2: f64,
}

fn ln_abs_det(j: &Jacobian) -> f64 {
    let s = j.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if s == 0.0 {
        return f64::NEG_INFINITY;
    }
    let d = (j[0][0] / s) * (j[1][1] / s) - (j[0][1] / s) * (j[1][0] / s);
    2.0 * s.ln() + d.abs().ln()
}

/// Exponents of `map` along the orbit of `seed`, sorted descending.
pub fn lyapunov_pair<M: PlanarMap + ?Sized>(
    map: &M,
    seed: State,
    n_iter: usize,
    transient: usize,
) -> Result<LyapunovPair, AnalysisError> {
    if n_iter == 0 {
        return Err(AnalysisError::Param("n_iter must be positive".into()));
    }
    let mut state = seed;
    for _ in 0..transient {
        state = map.step(state)?;
    }
    let mut q = (1.0f64, 0.0f64);
    let (mut s1, mut s2) = (0.0, 0.0);
    for step in 0..n_iter {
        let j = map.jacobian(state)?;
        let v = (j[0][0] * q.0 + j[0][1] * q.1, j[1][0] * q.0 + j[1][1] * q.1);
        let r11 = v.0.hypot(v.1);
        let ld = ln_abs_det(&j);
        if r11 == 0.0 || !r11.is_finite() || !ld.is_finite() {
            return Err(AnalysisError::DegenerateTangent { step });
        }
        let lr = r11.ln();
        s1 += lr;
        s2 += ld - lr;
        q = (v.0 / r11, v.1 / r11);
        state = map.step(state)?;
    }
    let (a, b) = (s1 / n_iter as f64, s2 / n_iter as f64);
    Ok(LyapunovPair {
        le1: a.max(b),
        le2: a.min(b),
    })
}

/// [`lyapunov_pair`] for a named map from the fixed seed state.
pub fn lyapunov_for(map: MapId, params: MapParams, n_iter: usize, transient: usize) -> Result<LyapunovPair, AnalysisError> {
    lyapunov_pair(&ChaoticMap::new(map, params), SEED_STATE, n_iter, transient)
}

/// Exponents over a parameter grid. Cells sit at interval midpoints, so a
/// range `(0, 25)` never evaluates an endpoint. Failed cells are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovGrid {
    pub map: MapId,
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    /// Row-major: `cells[i * b_values.len() + j]` is `(a_values[i], b_values[j])`.
    pub cells: Vec<Option<LyapunovPair>>,
}

impl LyapunovGrid {
    pub fn get(&self, i: usize, j: usize) -> Option<LyapunovPair> {
        self.cells[i * self.b_values.len() + j]
    }

    pub fn missing(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }

    /// Mean `(LE1, LE2)` over the cells that converged.
    pub fn mean(&self) -> Option<LyapunovPair> {
        let ok: Vec<_> = self.cells.iter().flatten().collect();
        if ok.is_empty() {
            return None;
        }
        let n = ok.len() as f64;
        Some(LyapunovPair {
            le1: ok.iter().map(|p| p.le1).sum::<f64>() / n,
            le2: ok.iter().map(|p| p.le2).sum::<f64>() / n,
        })
    }

    /// `a,b,le1,le2` rows; missing cells have empty exponent fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,b,le1,le2\n");
        for (i, a) in self.a_values.iter().enumerate() {
            for (j, b) in self.b_values.iter().enumerate() {
                match self.get(i, j) {
                    Some(p) => out.push_str(&format!("{a},{b},{},{}\n", p.le1, p.le2)),
                    None => out.push_str(&format!("{a},{b},,\n")),
                }
            }
        }
        out
    }
}

fn midpoints((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
}

pub fn lyapunov_grid(
    map: MapId,
    a_range: (f64, f64),
    b_range: (f64, f64),
    resolution: (usize, usize),
    n_iter: usize,
    transient: usize,
) -> Result<LyapunovGrid, AnalysisError> {
    if resolution.0 < 2 || resolution.1 < 2 {
        return Err(AnalysisError::Param(format!("resolution {resolution:?} below 2x2")));
    }
    let a_values = midpoints(a_range, resolution.0);
    let b_values = midpoints(b_range, resolution.1);
    let cells = (0..a_values.len() * b_values.len())
        .into_par_iter()
        .map(|k| {
            let params = MapParams::new(a_values[k / b_values.len()], b_values[k % b_values.len()]);
            lyapunov_for(map, params, n_iter, transient).ok()
        })
        .collect();
    Ok(LyapunovGrid {
        map,
        a_values,
        b_values,
        cells,
    })
}
