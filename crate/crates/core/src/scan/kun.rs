//! Region-hopping Kun scan.
//!
//! 1. Split the grid into `r_rows × r_cols` regions; the last region row and
//!    column absorb the remainder.
//! 2. Each region is walked boustrophedon from a corner chosen by its index
//!    (top-left, top-right, bottom-right, bottom-left, repeating).
//! 3. Pixels are emitted round-robin across regions. Every `⌊MN / R⌋`
//!    emissions the starting region shifts by `offset_j + 1`, where
//!    `offset_j = ⌊|ctrl_j| · 10⁶⌋ mod R` cycles through the three control
//!    values. Exhausted regions are skipped.
//! 4. The resulting bijection is composed with itself `rounds` times.

use serde::{Deserialize, Serialize};

use super::permutation::PermutationMap;
use super::ScanError;
use crate::Dims;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KunScanConfig {
    pub region_grid: (usize, usize),
    pub rounds: usize,
    pub ctrl: [f64; 3],
}

impl Default for KunScanConfig {
    fn default() -> Self {
        KunScanConfig {
            region_grid: (3, 3),
            rounds: 3,
            ctrl: [0.0; 3],
        }
    }
}

impl KunScanConfig {
    pub fn with_ctrl(ctrl: [f64; 3]) -> Self {
        KunScanConfig {
            ctrl,
            ..KunScanConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        let (rr, rc) = self.region_grid;
        if rr == 0 || rc == 0 {
            return Err(ScanError::Config(format!("region grid {rr}x{rc} must be at least 1x1")));
        }
        if self.rounds == 0 {
            return Err(ScanError::Config("rounds must be at least 1".into()));
        }
        if let Some(c) = self.ctrl.iter().find(|c| !c.is_finite()) {
            return Err(ScanError::Config(format!("control value {c} is not finite")));
        }
        Ok(())
    }
}

fn split(total: usize, parts: usize) -> Vec<(usize, usize)> {
    let base = total / parts;
    (0..parts)
        .map(|i| {
            let len = if i + 1 == parts { total - base * i } else { base };
            (base * i, len)
        })
        .collect()
}

fn regions((rows, cols): Dims, (rr, rc): (usize, usize)) -> Vec<Vec<usize>> {
    // never more regions than pixels along an axis
    let bands = split(rows, rr.min(rows));
    let strips = split(cols, rc.min(cols));
    let mut out = Vec::with_capacity(bands.len() * strips.len());
    for &(r0, h) in &bands {
        for &(c0, w) in &strips {
            let corner = out.len() % 4;
            let mut seq = Vec::with_capacity(h * w);
            for i in 0..h {
                for k in 0..w {
                    let j = if i % 2 == 0 { k } else { w - 1 - k };
                    let r = if corner >= 2 { h - 1 - i } else { i };
                    let c = if corner == 1 || corner == 2 { w - 1 - j } else { j };
                    seq.push((r0 + r) * cols + c0 + c);
                }
            }
            out.push(seq);
        }
    }
    out
}

/// One round of the scan, before self-composition.
fn single_round(dims: Dims, config: &KunScanConfig) -> Vec<usize> {
    let n = dims.0 * dims.1;
    let regions = regions(dims, config.region_grid);
    let r_count = regions.len();
    let offsets = config
        .ctrl
        .map(|c| ((c.abs() * 1e6).floor() % r_count as f64) as usize);
    let epoch = (n / r_count).max(1);
    let mut cursor = vec![0usize; r_count];
    let mut shift = 0usize;
    let mut forward = Vec::with_capacity(n);
    for k in 0..n {
        if k > 0 && k % epoch == 0 {
            shift += offsets[(k / epoch) % 3] + 1;
        }
        let mut r = (k + shift) % r_count;
        while cursor[r] >= regions[r].len() {
            r = (r + 1) % r_count;
        }
        forward.push(regions[r][cursor[r]]);
        cursor[r] += 1;
    }
    forward
}

pub fn build_kun_scan(dims: Dims, config: &KunScanConfig) -> Result<PermutationMap, ScanError> {
    config.validate()?;
    if dims.0 == 0 || dims.1 == 0 {
        return Err(ScanError::Config("image dimensions must be at least 1x1".into()));
    }
    let base = PermutationMap::from_trusted(single_round(dims, config), dims);
    Ok(base.power(config.rounds))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(grid: (usize, usize), rounds: usize, ctrl: [f64; 3]) -> KunScanConfig {
        KunScanConfig {
            region_grid: grid,
            rounds,
            ctrl,
        }
    }

    #[test]
    fn degenerate_cases() {
        let p = build_kun_scan((1, 1), &KunScanConfig::default()).unwrap();
        assert_eq!(p.forward(), &[0]);
        let p = build_kun_scan((2, 2), &cfg((1, 1), 1, [0.0; 3])).unwrap();
        assert_eq!(p.forward(), &[0, 1, 3, 2]);
    }

    #[test]
    fn golden_4x4_two_by_two_regions() {
        // Independent Python enumeration (see tests/oracle/kun_scan.py).
        let p = build_kun_scan((4, 4), &cfg((2, 2), 1, [0.3, 0.7, 0.11])).unwrap();
        assert_eq!(p.forward(), GOLDEN_4X4);
        let p = build_kun_scan((4, 4), &cfg((2, 2), 3, [0.3, 0.7, 0.11])).unwrap();
        assert_eq!(p.forward(), GOLDEN_4X4_THREE_ROUNDS);
    }

    const GOLDEN_4X4: &[usize] = &[0, 3, 13, 14, 2, 12, 15, 1, 8, 11, 5, 6, 10, 4, 7, 9];
    const GOLDEN_4X4_THREE_ROUNDS: &[usize] = &[0, 7, 2, 1, 4, 5, 11, 14, 8, 15, 10, 9, 12, 13, 3, 6];

    #[test]
    fn rejects_bad_config() {
        assert!(build_kun_scan((4, 4), &cfg((0, 2), 1, [0.0; 3])).is_err());
        assert!(build_kun_scan((4, 4), &cfg((2, 2), 0, [0.0; 3])).is_err());
        assert!(build_kun_scan((4, 4), &cfg((2, 2), 1, [f64::NAN, 0.0, 0.0])).is_err());
    }

    #[test]
    fn bijective_for_many_shapes_and_configs() {
        let ctrls = [[0.0; 3], [0.3, 0.7, 0.11], [12.1, -3.3, 7.77]];
        for rows in (1..=64).step_by(9).chain([64]) {
            for cols in (1..=64).step_by(11).chain([64]) {
                for grid in [(1, 1), (2, 2), (3, 3), (5, 7)] {
                    for ctrl in ctrls {
                        let p = build_kun_scan((rows, cols), &cfg(grid, 2, ctrl)).unwrap();
                        assert!(PermutationMap::new(p.forward().to_vec(), (rows, cols)).is_ok());
                    }
                }
            }
        }
    }

    #[test]
    fn order_exceeds_six_on_16x16() {
        for ctrl in [[0.0; 3], [0.3, 0.7, 0.11], [12.1, -3.3, 7.77]] {
            let one = build_kun_scan((16, 16), &KunScanConfig { rounds: 1, ..KunScanConfig::with_ctrl(ctrl) }).unwrap();
            for r in 1..=6 {
                assert!(!one.power(r).is_identity(), "ctrl {ctrl:?} has order {r}");
            }
        }
    }

    #[test]
    fn rounds_compose() {
        let c = KunScanConfig::with_ctrl([0.5, 1.5, 2.5]);
        let three = build_kun_scan((10, 13), &c).unwrap();
        let one = build_kun_scan((10, 13), &KunScanConfig { rounds: 1, ..c }).unwrap();
        assert_eq!(three, one.then(&one).then(&one));
        assert_eq!(three, build_kun_scan((10, 13), &c).unwrap());
    }
}
