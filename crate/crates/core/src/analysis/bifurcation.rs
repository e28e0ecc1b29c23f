use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AnalysisError, SEED_STATE};
use crate::chaos::{ChaoticMap, MapId, MapParams, PlanarMap, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifurcationConfig {
    pub map: MapId,
    pub sweep: SweepParam,
    /// Value of the parameter that is not swept.
    pub fixed: f64,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub transient: usize,
    pub keep: usize,
}

/// States retained at one sweep value. `None` marks an iterate that
/// overflowed or hit a singularity; the orbit restarts from the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationSample {
    pub param_value: f64,
    pub retained_states: Vec<Option<State>>,
}

fn sample(map: &ChaoticMap, transient: usize, keep: usize) -> Vec<Option<State>> {
    let mut s = SEED_STATE;
    for _ in 0..transient {
        match map.step(s) {
            Ok(n) => s = n,
            Err(_) => s = SEED_STATE,
        }
    }
    (0..keep)
        .map(|_| match map.step(s) {
            Ok(n) => {
                s = n;
                Some(n)
            }
            Err(_) => {
                s = SEED_STATE;
                None
            }
        })
        .collect()
}

pub fn bifurcation_scan(cfg: &BifurcationConfig) -> Result<Vec<BifurcationSample>, AnalysisError> {
    if cfg.steps < 2 || cfg.keep == 0 {
        return Err(AnalysisError::Param(format!(
            "need steps >= 2 and keep >= 1, got {} and {}",
            cfg.steps, cfg.keep
        )));
    }
    Ok((0..cfg.steps)
        .into_par_iter()
        .map(|i| {
            let v = cfg.lo + (cfg.hi - cfg.lo) * i as f64 / (cfg.steps - 1) as f64;
            let params = match cfg.sweep {
                SweepParam::A => MapParams::new(v, cfg.fixed),
                SweepParam::B => MapParams::new(cfg.fixed, v),
            };
            BifurcationSample {
                param_value: v,
                retained_states: sample(&ChaoticMap::new(cfg.map, params), cfg.transient, cfg.keep),
            }
        })
        .collect())
}

/// `param,x,y` rows; gaps are left out.
pub fn bifurcation_csv(samples: &[BifurcationSample]) -> String {
    let mut out = String::from("param,x,y\n");
    for s in samples {
        for (x, y) in s.retained_states.iter().flatten() {
            out.push_str(&format!("{},{x},{y}\n", s.param_value));
        }
    }
    out
}
