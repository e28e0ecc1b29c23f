use serde::{Deserialize, Serialize};

use super::keys::KeyBundle;
use super::maps::{step_scphm, MapId, MapParams};
use super::ChaosError;
use crate::Dims;

/// Paired state sequences of one map run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaoticOrbit {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub params: MapParams,
    pub map_id: MapId,
}

impl ChaoticOrbit {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// `x0, y0, x1, y1, ...`
    pub fn interleaved(&self) -> impl Iterator<Item = f64> + '_ {
        self.xs.iter().zip(&self.ys).flat_map(|(&x, &y)| [x, y])
    }
}

/// `x_s` drives diffusion, `y_ctrl` parameterises the scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeystreamPartition {
    pub x_s: Vec<f64>,
    pub y_ctrl: [f64; 3],
}

fn pairs_for(values: usize) -> usize {
    (values + 3).div_ceil(2)
}

/// Iterates the 2D-SCPHM from the key's initial state, drops the first
/// `n0 + extra_discard` pairs and keeps `⌈(values + 3) / 2⌉` pairs, enough
/// for `values` keystream entries plus the three control values.
pub fn generate_orbit_values(
    keys: &KeyBundle,
    values: usize,
    extra_discard: u64,
) -> Result<ChaoticOrbit, ChaosError> {
    let params = keys.params();
    let keep = pairs_for(values);
    let discard = keys.n0() + extra_discard;
    let mut state = (keys.x0(), keys.y0());
    for _ in 0..discard {
        state = step_scphm(state, params)?;
    }
    let mut xs = Vec::with_capacity(keep);
    let mut ys = Vec::with_capacity(keep);
    for _ in 0..keep {
        state = step_scphm(state, params)?;
        xs.push(state.0);
        ys.push(state.1);
    }
    Ok(ChaoticOrbit {
        xs,
        ys,
        params,
        map_id: MapId::Scphm,
    })
}

/// Orbit sized for an `M × N` image.
pub fn generate_orbit(keys: &KeyBundle, (rows, cols): Dims) -> Result<ChaoticOrbit, ChaosError> {
    if rows == 0 || cols == 0 {
        return Err(ChaosError::EmptyDims);
    }
    generate_orbit_values(keys, rows * cols, 0)
}

/// Interleaves the orbit and splits it into `values` keystream entries and
/// the next three control values.
pub fn partition_keystream(
    orbit: &ChaoticOrbit,
    values: usize,
) -> Result<KeystreamPartition, ChaosError> {
    let need = values + 3;
    let have = 2 * orbit.len();
    if have < need {
        return Err(ChaosError::Length { need, got: have });
    }
    let mut it = orbit.interleaved();
    let x_s: Vec<f64> = it.by_ref().take(values).collect();
    let mut y_ctrl = [0.0; 3];
    for slot in &mut y_ctrl {
        *slot = it.next().expect("length checked");
    }
    Ok(KeystreamPartition { x_s, y_ctrl })
}

/// `floor(|v| · 10^10) mod 256`.
#[inline]
pub fn quantize_byte(v: f64) -> u8 {
    // fmod is exact, so this is exact for every finite scaled value.
    ((v.abs() * 1e10).floor() % 256.0) as u8
}

pub fn quantize_bytes(values: &[f64]) -> Result<Vec<u8>, ChaosError> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v.is_finite() {
                Ok(quantize_byte(v))
            } else {
                Err(ChaosError::NonFinite(i))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::KeyComponent;
    use proptest::prelude::*;

    fn keys() -> KeyBundle {
        KeyBundle::from_values(0.1, 0.2, 20.0, 21.0, 1000).unwrap()
    }

    #[test]
    fn orbit_lengths() {
        assert_eq!(generate_orbit(&keys(), (1, 1)).unwrap().len(), 2);
        assert_eq!(generate_orbit(&keys(), (2, 2)).unwrap().len(), 4);
        assert_eq!(generate_orbit(&keys(), (4, 4)).unwrap().len(), 10);
        assert_eq!(generate_orbit(&keys(), (3, 5)).unwrap().len(), 9);
        assert_eq!(generate_orbit(&keys(), (0, 5)).unwrap_err(), ChaosError::EmptyDims);
    }

    #[test]
    fn discard_count_shifts_the_orbit() {
        let k = keys();
        let full = generate_orbit_values(&k, 20, 0).unwrap();
        let later = generate_orbit_values(&k, 20, 3).unwrap();
        assert_eq!(full.xs[3..], later.xs[..full.len() - 3]);
    }

    #[test]
    fn partition_interleave_order() {
        let (p, q, r, s) = (1.0, 2.0, 3.0, 4.0);
        let orbit = ChaoticOrbit {
            xs: vec![p, q],
            ys: vec![r, s],
            params: MapParams::new(1.0, 1.0),
            map_id: MapId::Scphm,
        };
        let part = partition_keystream(&orbit, 1).unwrap();
        assert_eq!(part.x_s, vec![p]);
        assert_eq!(part.y_ctrl, [r, q, s]);

        let orbit = ChaoticOrbit {
            xs: vec![10.0, 11.0, 12.0],
            ys: vec![20.0, 21.0, 22.0],
            ..orbit
        };
        let part = partition_keystream(&orbit, 3).unwrap();
        assert_eq!(part.x_s, vec![10.0, 20.0, 11.0]);
        assert_eq!(part.y_ctrl, [21.0, 12.0, 22.0]);
        assert_eq!(
            partition_keystream(&orbit, 4).unwrap_err(),
            ChaosError::Length { need: 7, got: 6 }
        );
    }

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize_bytes(&[0.0, 1.0, -1.0]).unwrap(), vec![0, 0, 0]);
        // 2^-20 · 1e10 = 9536.74… → 9536 mod 256 = 64; 2^-10 · 1e10 = 9765625 → 249
        let (p20, p10) = (2f64.powi(-20), 2f64.powi(-10));
        assert_eq!(quantize_bytes(&[p20, -p10]).unwrap(), vec![64, 249]);
        assert_eq!(quantize_bytes(&[0.5, f64::NAN]).unwrap_err(), ChaosError::NonFinite(1));
    }

    #[test]
    fn quantized_slice_is_uniform() {
        // χ²(255) upper 1% point.
        const CRITICAL: f64 = 310.457;
        let orbit = generate_orbit_values(&keys(), 1000, 0).unwrap();
        let part = partition_keystream(&orbit, 1000).unwrap();
        let bytes = quantize_bytes(&part.x_s).unwrap();
        let mut hist = [0u32; 256];
        for b in bytes {
            hist[b as usize] += 1;
        }
        let expected = 1000.0 / 256.0;
        let chi2: f64 = hist.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < CRITICAL, "chi2 = {chi2}");
    }

    #[test]
    fn orbit_is_deterministic_and_bounded() {
        let k = keys();
        let a = generate_orbit_values(&k, 5000, 0).unwrap();
        let b = generate_orbit_values(&k, 5000, 0).unwrap();
        assert_eq!(a, b);
        assert!(a.xs.iter().all(|x| x.abs() <= k.a()));
        assert!(a.ys.iter().all(|y| y.abs() <= k.b()));
    }

    #[test]
    fn x0_lsb_flip_decorrelates_bytes() {
        let k = keys();
        let f = k.with_flipped_lsb(KeyComponent::X0);
        let n = 10_000;
        let bytes = |k: &KeyBundle| {
            let o = generate_orbit_values(k, n, 0).unwrap();
            quantize_bytes(&partition_keystream(&o, n).unwrap().x_s).unwrap()
        };
        let (a, b) = (bytes(&k), bytes(&f));
        let same = a.iter().zip(&b).filter(|(x, y)| x == y).count();
        assert!(same as f64 / n as f64 <= 0.01, "{same} identical bytes");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn partition_yields_exact_count(rows in 1usize..20, cols in 1usize..20, seed in any::<u64>()) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k = KeyBundle::random(&mut rng);
            let orbit = generate_orbit(&k, (rows, cols)).unwrap();
            let part = partition_keystream(&orbit, rows * cols).unwrap();
            prop_assert_eq!(part.x_s.len() + part.y_ctrl.len(), rows * cols + 3);
        }
    }
}
