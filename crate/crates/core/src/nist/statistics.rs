//! The ten test statistics, each taking a `0/1` byte slice.
//!
//! These functions assume their inputs are long enough; minimum lengths
//! are enforced by [`super::run_test`].

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;

/// Regularised upper incomplete gamma `Q(a, x)`.
pub fn igamc(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        gamma_ur(a, x)
    }
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn frequency(bits: &[u8]) -> f64 {
    let n = bits.len() as f64;
    let s: i64 = bits.iter().map(|&b| 2 * b as i64 - 1).sum();
    erfc(s.unsigned_abs() as f64 / (2.0 * n).sqrt())
}

pub fn block_frequency(bits: &[u8], m: usize) -> f64 {
    let blocks = bits.len() / m;
    let chi2: f64 = bits
        .chunks_exact(m)
        .map(|b| {
            let pi = b.iter().map(|&v| v as f64).sum::<f64>() / m as f64;
            (pi - 0.5).powi(2)
        })
        .sum::<f64>()
        * 4.0
        * m as f64;
    igamc(blocks as f64 / 2.0, chi2 / 2.0)
}

fn cusum_p(n: usize, z: u64) -> f64 {
    let n_f = n as f64;
    let z_f = z as f64;
    let sq = n_f.sqrt();
    let mut sum1 = 0.0;
    let mut k = ((-n_f / z_f + 1.0) / 4.0) as i64;
    while (k as f64) <= (n_f / z_f - 1.0) / 4.0 {
        sum1 += normal_cdf((4 * k + 1) as f64 * z_f / sq) - normal_cdf((4 * k - 1) as f64 * z_f / sq);
        k += 1;
    }
    let mut sum2 = 0.0;
    let mut k = ((-n_f / z_f - 3.0) / 4.0) as i64;
    while (k as f64) <= (n_f / z_f - 1.0) / 4.0 {
        sum2 += normal_cdf((4 * k + 3) as f64 * z_f / sq) - normal_cdf((4 * k + 1) as f64 * z_f / sq);
        k += 1;
    }
    (1.0 - sum1 + sum2).clamp(0.0, 1.0)
}

/// `(forward, reverse)`.
pub fn cumulative_sums(bits: &[u8]) -> (f64, f64) {
    let max_excursion = |it: &mut dyn Iterator<Item = &u8>| {
        let mut s = 0i64;
        let mut z = 0u64;
        for &b in it {
            s += 2 * b as i64 - 1;
            z = z.max(s.unsigned_abs());
        }
        z
    };
    let zf = max_excursion(&mut bits.iter());
    let zr = max_excursion(&mut bits.iter().rev());
    let n = bits.len();
    let p = |z: u64| if z == 0 { 1.0 } else { cusum_p(n, z) };
    (p(zf), p(zr))
}

pub fn runs(bits: &[u8]) -> f64 {
    let n = bits.len() as f64;
    let pi = bits.iter().map(|&b| b as f64).sum::<f64>() / n;
    if (pi - 0.5).abs() >= 2.0 / n.sqrt() {
        return 0.0;
    }
    let v = 1 + bits.windows(2).filter(|w| w[0] != w[1]).count();
    let q = pi * (1.0 - pi);
    erfc((v as f64 - 2.0 * n * q).abs() / (2.0 * (2.0 * n).sqrt() * q))
}

/// Block size, class bounds and class probabilities by stream length.
fn longest_run_table(n: usize) -> (usize, usize, &'static [f64]) {
    const P8: [f64; 4] = [0.2148, 0.3672, 0.2305, 0.1875];
    const P128: [f64; 6] = [0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124];
    const P10K: [f64; 7] = [0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727];
    if n < 6272 {
        (8, 1, &P8)
    } else if n < 750_000 {
        (128, 4, &P128)
    } else {
        (10_000, 10, &P10K)
    }
}

pub fn longest_run(bits: &[u8]) -> f64 {
    let (m, lowest, pi) = longest_run_table(bits.len());
    let k = pi.len() - 1;
    let mut v = vec![0usize; pi.len()];
    let blocks = bits.len() / m;
    for block in bits.chunks_exact(m) {
        let (mut run, mut best) = (0usize, 0usize);
        for &b in block {
            run = if b == 1 { run + 1 } else { 0 };
            best = best.max(run);
        }
        v[best.clamp(lowest, lowest + k) - lowest] += 1;
    }
    let nb = blocks as f64;
    let chi2: f64 = v
        .iter()
        .zip(pi)
        .map(|(&vi, &p)| (vi as f64 - nb * p).powi(2) / (nb * p))
        .sum();
    igamc(k as f64 / 2.0, chi2 / 2.0)
}

/// Rank over GF(2) of `rows`, each a `q`-bit row packed into a u64.
pub fn gf2_rank(mut rows: Vec<u64>, q: usize) -> usize {
    let mut rank = 0;
    for col in (0..q).rev() {
        let bit = 1u64 << col;
        if let Some(p) = (rank..rows.len()).find(|&i| rows[i] & bit != 0) {
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r & bit != 0 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Probability that a random `m × q` binary matrix has rank `r`.
fn rank_probability(r: usize, m: usize, q: usize) -> f64 {
    let (r_i, m_i, q_i) = (r as i32, m as i32, q as i32);
    let mut p = 2f64.powi(r_i * (q_i + m_i - r_i) - m_i * q_i);
    for i in 0..r_i {
        p *= (1.0 - 2f64.powi(i - q_i)) * (1.0 - 2f64.powi(i - m_i)) / (1.0 - 2f64.powi(i - r_i));
    }
    p
}

/// Rank test with the exact class probabilities for `m × q` matrices.
pub fn binary_matrix_rank(bits: &[u8], m: usize, q: usize) -> f64 {
    let full = m.min(q);
    let p_full = rank_probability(full, m, q);
    let p_minus1 = rank_probability(full - 1, m, q);
    binary_matrix_rank_with(bits, m, q, [p_full, p_minus1, 1.0 - p_full - p_minus1])
}

/// Rank test against given probabilities of rank `full`, `full − 1` and lower.
pub fn binary_matrix_rank_with(bits: &[u8], m: usize, q: usize, probs: [f64; 3]) -> f64 {
    assert!(q <= 64, "rows are packed into u64");
    let full = m.min(q);
    let (mut f_full, mut f_minus1) = (0usize, 0usize);
    let blocks = bits.len() / (m * q);
    for mat in bits.chunks_exact(m * q) {
        let rows = mat
            .chunks_exact(q)
            .map(|row| row.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
            .collect();
        match gf2_rank(rows, q) {
            r if r == full => f_full += 1,
            r if r + 1 == full => f_minus1 += 1,
            _ => {}
        }
    }
    let [p_full, p_minus1, p_rest] = probs;
    let n = blocks as f64;
    let rest = (blocks - f_full - f_minus1) as f64;
    let chi2 = (f_full as f64 - p_full * n).powi(2) / (p_full * n)
        + (f_minus1 as f64 - p_minus1 * n).powi(2) / (p_minus1 * n)
        + (rest - p_rest * n).powi(2) / (p_rest * n);
    (-chi2 / 2.0).exp()
}

pub fn discrete_fourier_transform(bits: &[u8]) -> f64 {
    let n = bits.len();
    let mut buf: Vec<Complex<f64>> = bits.iter().map(|&b| Complex::new(2.0 * b as f64 - 1.0, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let nf = n as f64;
    let threshold = ((1.0f64 / 0.05).ln() * nf).sqrt();
    let n0 = 0.95 * nf / 2.0;
    let n1 = buf[..n / 2].iter().filter(|c| c.norm() < threshold).count() as f64;
    let d = (n1 - n0) / (nf * 0.95 * 0.05 / 4.0).sqrt();
    erfc(d.abs() / std::f64::consts::SQRT_2)
}

/// Counts of every overlapping `m`-bit pattern, wrapping around the end.
fn pattern_counts(bits: &[u8], m: usize) -> Vec<u64> {
    let mut counts = vec![0u64; 1 << m];
    if m == 0 {
        counts[0] = bits.len() as u64;
        return counts;
    }
    let n = bits.len();
    let mask = (1usize << m) - 1;
    let mut w = 0usize;
    for &b in &bits[..m - 1] {
        w = (w << 1) | b as usize;
    }
    for i in 0..n {
        w = ((w << 1) | bits[(i + m - 1) % n] as usize) & mask;
        counts[w] += 1;
    }
    counts
}

pub fn approximate_entropy(bits: &[u8], m: usize) -> f64 {
    let n = bits.len() as f64;
    let phi = |m: usize| -> f64 {
        pattern_counts(bits, m)
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                p * p.ln()
            })
            .sum()
    };
    let apen = phi(m) - phi(m + 1);
    let chi2 = 2.0 * n * (std::f64::consts::LN_2 - apen);
    igamc(2f64.powi(m as i32 - 1), chi2 / 2.0)
}

/// `(P1, P2)`.
pub fn serial(bits: &[u8], m: usize) -> (f64, f64) {
    let n = bits.len() as f64;
    let psi = |m: usize| -> f64 {
        if m == 0 {
            return 0.0;
        }
        let sum: f64 = pattern_counts(bits, m).iter().map(|&c| (c as f64).powi(2)).sum();
        2f64.powi(m as i32) / n * sum - n
    };
    let (p0, p1, p2) = (psi(m), psi(m - 1), psi(m.saturating_sub(2)));
    let del1 = p0 - p1;
    let del2 = p0 - 2.0 * p1 + p2;
    (
        igamc(2f64.powi(m as i32 - 2), del1 / 2.0),
        igamc(2f64.powi(m as i32 - 3), del2 / 2.0),
    )
}

/// Shortest LFSR generating `bits` (Berlekamp–Massey).
pub fn berlekamp_massey(bits: &[u8]) -> usize {
    let n = bits.len();
    let mut c = vec![0u8; n + 1];
    let mut b = vec![0u8; n + 1];
    c[0] = 1;
    b[0] = 1;
    let (mut l, mut m) = (0usize, -1isize);
    for i in 0..n {
        let mut d = bits[i];
        for j in 1..=l {
            d ^= c[j] & bits[i - j];
        }
        if d == 1 {
            let t = c.clone();
            let shift = (i as isize - m) as usize;
            for j in 0..=n - shift {
                c[j + shift] ^= b[j];
            }
            if 2 * l <= i {
                l = i + 1 - l;
                m = i as isize;
                b = t;
            }
        }
    }
    l
}

pub fn linear_complexity(bits: &[u8], m: usize) -> f64 {
    const PI: [f64; 7] = [0.010417, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833];
    let mf = m as f64;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let mu = mf / 2.0 + (9.0 - sign) / 36.0 - (mf / 3.0 + 2.0 / 9.0) / 2f64.powf(mf);
    let mut v = [0usize; 7];
    let blocks = bits.len() / m;
    for block in bits.chunks_exact(m) {
        let t = sign * (berlekamp_massey(block) as f64 - mu) + 2.0 / 9.0;
        let class = match t {
            t if t <= -2.5 => 0,
            t if t <= -1.5 => 1,
            t if t <= -0.5 => 2,
            t if t <= 0.5 => 3,
            t if t <= 1.5 => 4,
            t if t <= 2.5 => 5,
            _ => 6,
        };
        v[class] += 1;
    }
    let nb = blocks as f64;
    let chi2: f64 = v
        .iter()
        .zip(PI)
        .map(|(&vi, p)| (vi as f64 - nb * p).powi(2) / (nb * p))
        .sum();
    igamc(3.0, chi2 / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The 100-bit sequence used by the SP 800-22 worked examples.
    const EPSILON_100: &str = "1100100100001111110110101010001000100001011010001100001000110100110001001100011001100010100010111000";

    fn bits(s: &str) -> Vec<u8> {
        s.bytes().map(|c| c - b'0').collect()
    }

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 5e-7, "{a} vs {b}");
    }

    #[test]
    fn worked_examples() {
        let e = bits(EPSILON_100);
        close(frequency(&e), 0.109599);
        close(block_frequency(&e, 10), 0.706438);
        close(runs(&e), 0.500798);
        let (f, r) = cumulative_sums(&e);
        close(f, 0.219194);
        close(r, 0.114866);
        // numpy FFT oracle: 48 of the first 50 moduli fall below T = 17.308
        close(discrete_fourier_transform(&e), 0.646355);
        close(approximate_entropy(&e, 2), 0.235301);
    }

    #[test]
    fn small_examples() {
        let (p1, p2) = serial(&bits("0011011101"), 3);
        close(p1, 0.808792);
        close(p2, 0.670320);
        // the standard's 3x3 example scores against the rounded 32x32 class probabilities
        let p32 = [0.2888, 0.5776, 0.1336];
        close(binary_matrix_rank_with(&bits("01011001001010101101"), 3, 3, p32), 0.741948);
        close(approximate_entropy(&bits("0100110101"), 3), 0.261961);
        assert_eq!(berlekamp_massey(&bits("1101011110001")), 4);
    }

    #[test]
    fn longest_run_worked_example() {
        let e = bits(
            "11001100000101010110110001001100111000000000001001001101010100010001001111010110100000001101011111001100111001101101100010110010",
        );
        close(longest_run(&e), 0.180598);
    }

    #[test]
    fn frequency_extremes() {
        let alt: Vec<u8> = (0..100).map(|i| (i % 2) as u8).collect();
        assert_eq!(frequency(&alt), 1.0);
        let ones = vec![1u8; 100];
        assert_eq!(frequency(&ones), erfc(10.0 / 2f64.sqrt()));
        assert!(frequency(&ones) < 1e-20);
    }

    #[test]
    fn rank_probabilities_for_32() {
        // 0.2888, 0.5776, 0.1336 to four places
        assert!((rank_probability(32, 32, 32) - 0.2888).abs() < 5e-5);
        assert!((rank_probability(31, 32, 32) - 0.5776).abs() < 5e-5);
        assert_eq!(gf2_rank(vec![0b11, 0b11], 2), 1);
        assert_eq!(gf2_rank(vec![0b10, 0b01], 2), 2);
    }

    #[test]
    fn berlekamp_massey_brute_force() {
        // Brute-force search over every LFSR of length ≤ 6.
        fn brute(s: &[u8]) -> Option<usize> {
            for l in 0..=6 {
                for taps in 0u32..(1 << l) {
                    let ok = (l..s.len()).all(|i| {
                        let mut v = 0u8;
                        for j in 0..l {
                            v ^= ((taps >> j) & 1) as u8 & s[i - 1 - j];
                        }
                        v == s[i]
                    });
                    if ok {
                        return Some(l);
                    }
                }
            }
            None
        }
        for x in 0u32..(1 << 12) {
            let s: Vec<u8> = (0..12).map(|i| ((x >> i) & 1) as u8).collect();
            match brute(&s) {
                Some(l) => assert_eq!(berlekamp_massey(&s), l, "{s:?}"),
                None => assert!(berlekamp_massey(&s) > 6, "{s:?}"),
            }
        }
    }
}
