use super::CipherError;
use crate::chaos::{step_scphm, ChaosError, MapParams};

/// Orbit steps skipped before the substitution box is sampled.
const SBOX_WARMUP: usize = 64;

fn check_len(a: usize, b: usize) -> Result<(), CipherError> {
    if a == b {
        Ok(())
    } else {
        Err(CipherError::Length { left: a, right: b })
    }
}

/// Plain XOR chain `C_i = P_i ⊕ C_{i−1} ⊕ K_i`.
pub fn xda_forward(pixels: &[u8], keystream: &[u8], c0: u8) -> Result<Vec<u8>, CipherError> {
    check_len(pixels.len(), keystream.len())?;
    let mut prev = c0;
    Ok(pixels
        .iter()
        .zip(keystream)
        .map(|(&p, &k)| {
            prev ^= p ^ k;
            prev
        })
        .collect())
}

/// `P_i = C_i ⊕ C_{i−1} ⊕ K_i`.
pub fn xda_inverse(cipher: &[u8], keystream: &[u8], c0: u8) -> Result<Vec<u8>, CipherError> {
    check_len(cipher.len(), keystream.len())?;
    let mut prev = c0;
    Ok(cipher
        .iter()
        .zip(keystream)
        .map(|(&c, &k)| std::mem::replace(&mut prev, c) ^ c ^ k)
        .collect())
}

/// Key-dependent byte permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SBox([u8; 256]);

impl SBox {
    pub fn identity() -> Self {
        SBox(std::array::from_fn(|i| i as u8))
    }

    /// Ranks 256 x-values of an orbit started at `seed`; ties keep index order.
    pub fn from_orbit(params: MapParams, seed: (f64, f64)) -> Result<Self, ChaosError> {
        let mut s = seed;
        for _ in 0..SBOX_WARMUP {
            s = step_scphm(s, params)?;
        }
        let mut xs = [0.0; 256];
        for x in &mut xs {
            s = step_scphm(s, params)?;
            *x = s.0;
        }
        let mut order: Vec<usize> = (0..256).collect();
        order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]).then(i.cmp(&j)));
        let mut table = [0u8; 256];
        for (rank, &i) in order.iter().enumerate() {
            table[i] = rank as u8;
        }
        Ok(SBox(table))
    }

    #[inline]
    pub fn get(&self, v: u8) -> u8 {
        self.0[v as usize]
    }

    pub fn table(&self) -> &[u8; 256] {
        &self.0
    }
}

/// Substitution input from the two previous chain values. Mixing two
/// values lets a difference die out again (with chance ~1/256), as it would
/// for independent ciphertexts; a single `S(C_{i−1})` never cancels.
#[inline]
fn mix(sbox: &SBox, a: u8, b: u8) -> u8 {
    sbox.get(a.wrapping_add(b))
}

/// Forward pass `C_i = P_i ⊕ S(C_{i−1} + C_{i−2}) ⊕ K_i`, then a backward
/// pass `D_i = C_i ⊕ S(D_{i+1} + D_{i+2}) ⊕ K'_i`; every missing neighbour
/// is `c0`.
pub fn diffuse(pixels: &[u8], k_fwd: &[u8], k_bwd: &[u8], sbox: &SBox, c0: u8) -> Result<Vec<u8>, CipherError> {
    check_len(pixels.len(), k_fwd.len())?;
    check_len(pixels.len(), k_bwd.len())?;
    let mut out = Vec::with_capacity(pixels.len());
    let (mut p1, mut p2) = (c0, c0);
    for (&p, &k) in pixels.iter().zip(k_fwd) {
        let c = p ^ mix(sbox, p1, p2) ^ k;
        (p1, p2) = (c, p1);
        out.push(c);
    }
    let (mut n1, mut n2) = (c0, c0);
    for (c, &k) in out.iter_mut().zip(k_bwd).rev() {
        let d = *c ^ mix(sbox, n1, n2) ^ k;
        (n1, n2) = (d, n1);
        *c = d;
    }
    Ok(out)
}

pub fn undiffuse(cipher: &[u8], k_fwd: &[u8], k_bwd: &[u8], sbox: &SBox, c0: u8) -> Result<Vec<u8>, CipherError> {
    check_len(cipher.len(), k_fwd.len())?;
    check_len(cipher.len(), k_bwd.len())?;
    let n = cipher.len();
    let at = |v: &[u8], i: usize| v.get(i).copied().unwrap_or(c0);
    let mid: Vec<u8> = (0..n)
        .map(|i| cipher[i] ^ mix(sbox, at(cipher, i + 1), at(cipher, i + 2)) ^ k_bwd[i])
        .collect();
    let before = |i: usize, back: usize| if i >= back { mid[i - back] } else { c0 };
    Ok((0..n).map(|i| mid[i] ^ mix(sbox, before(i, 1), before(i, 2)) ^ k_fwd[i]).collect())
}
