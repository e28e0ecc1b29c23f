use std::fmt;

use serde::{Deserialize, Serialize};

use super::maps::{MapParams, SCPHM_PARAM_MAX};
use super::ChaosError;

/// Fractional precision of every key component.
pub const KEY_BITS: u32 = 52;
const KEY_MASK: u64 = (1 << KEY_BITS) - 1;
/// 2^52 + 1, exact in f64.
const DENOM: f64 = 4_503_599_627_370_497.0;
const HEX_DIGITS: usize = 13;

const N0_MODULUS: u64 = 10_000;
const N0_BASE: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyComponent {
    X0,
    Y0,
    A,
    B,
    N0,
}

impl KeyComponent {
    pub const ALL: [KeyComponent; 5] = [
        KeyComponent::X0,
        KeyComponent::Y0,
        KeyComponent::A,
        KeyComponent::B,
        KeyComponent::N0,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for KeyComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeyComponent::X0 => "x0",
            KeyComponent::Y0 => "y0",
            KeyComponent::A => "a",
            KeyComponent::B => "b",
            KeyComponent::N0 => "n0",
        })
    }
}

impl std::str::FromStr for KeyComponent {
    type Err = ChaosError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        KeyComponent::ALL
            .into_iter()
            .find(|k| k.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| ChaosError::Key(format!("unknown key component `{s}`")))
    }
}

/// The five secret keys, each a 52-bit integer.
///
/// Real components are decoded as fixed-point fractions mapped into open
/// intervals: `x0, y0 ∈ (−1, 1)` and `a, b ∈ (0, 25)`. The discard count is
/// `N0 = (k mod 10⁴) + 1000`. Five 52-bit fields give a 2^260 key space.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KeyBundle {
    raw: [u64; 5],
}

fn decode_unit(k: u64) -> f64 {
    (k + 1) as f64 / DENOM
}

fn encode_unit(f: f64) -> u64 {
    let k = (f * DENOM).round() - 1.0;
    k.clamp(0.0, KEY_MASK as f64) as u64
}

impl KeyBundle {
    /// Builds a bundle from raw 52-bit components in the order x0, y0, a, b, N0.
    pub fn from_raw(raw: [u64; 5]) -> Result<Self, ChaosError> {
        if let Some(i) = raw.iter().position(|&k| k > KEY_MASK) {
            return Err(ChaosError::Key(format!(
                "component {} exceeds {KEY_BITS} bits",
                KeyComponent::ALL[i]
            )));
        }
        Ok(KeyBundle { raw })
    }

    /// Nearest encodable bundle to the given values.
    pub fn from_values(x0: f64, y0: f64, a: f64, b: f64, n0: u64) -> Result<Self, ChaosError> {
        let open = |name: &str, v: f64, lo: f64, hi: f64| {
            if v > lo && v < hi {
                Ok(())
            } else {
                Err(ChaosError::Key(format!("{name} = {v} outside ({lo}, {hi})")))
            }
        };
        open("x0", x0, -1.0, 1.0)?;
        open("y0", y0, -1.0, 1.0)?;
        open("a", a, 0.0, SCPHM_PARAM_MAX)?;
        open("b", b, 0.0, SCPHM_PARAM_MAX)?;
        if !(N0_BASE..N0_BASE + N0_MODULUS).contains(&n0) {
            return Err(ChaosError::Key(format!(
                "n0 = {n0} outside [{N0_BASE}, {})",
                N0_BASE + N0_MODULUS
            )));
        }
        KeyBundle::from_raw([
            encode_unit((x0 + 1.0) / 2.0),
            encode_unit((y0 + 1.0) / 2.0),
            encode_unit(a / SCPHM_PARAM_MAX),
            encode_unit(b / SCPHM_PARAM_MAX),
            n0 - N0_BASE,
        ])
    }

    /// Uniformly random bundle.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        let mut raw = [0u64; 5];
        for k in &mut raw {
            *k = rng.gen::<u64>() & KEY_MASK;
        }
        KeyBundle { raw }
    }

    pub fn raw(&self) -> [u64; 5] {
        self.raw
    }

    pub fn x0(&self) -> f64 {
        2.0 * decode_unit(self.raw[0]) - 1.0
    }

    pub fn y0(&self) -> f64 {
        2.0 * decode_unit(self.raw[1]) - 1.0
    }

    pub fn a(&self) -> f64 {
        SCPHM_PARAM_MAX * decode_unit(self.raw[2])
    }

    pub fn b(&self) -> f64 {
        SCPHM_PARAM_MAX * decode_unit(self.raw[3])
    }

    pub fn n0(&self) -> u64 {
        self.raw[4] % N0_MODULUS + N0_BASE
    }

    pub fn params(&self) -> MapParams {
        MapParams::new(self.a(), self.b())
    }

    pub fn get(&self, which: KeyComponent) -> u64 {
        self.raw[which.index()]
    }

    pub fn with_raw(&self, which: KeyComponent, value: u64) -> Result<Self, ChaosError> {
        let mut raw = self.raw;
        raw[which.index()] = value;
        KeyBundle::from_raw(raw)
    }

    /// Same bundle with the least-significant bit of one component flipped.
    pub fn with_flipped_lsb(&self, which: KeyComponent) -> Self {
        let mut raw = self.raw;
        raw[which.index()] ^= 1;
        KeyBundle { raw }
    }

    /// Initial diffusion byte: XOR of the little-endian bytes of all five
    /// 52-bit components.
    pub fn c0(&self) -> u8 {
        self.raw
            .iter()
            .flat_map(|k| k.to_le_bytes())
            .fold(0u8, |acc, b| acc ^ b)
    }

    /// Key-file text: five 13-digit lowercase hex lines.
    pub fn to_key_file(&self) -> String {
        let mut out = String::from("# kunie key: x0, y0, a, b, n0\n");
        for k in self.raw {
            out.push_str(&format!("{k:013x}\n"));
        }
        out
    }

    /// Parses a key file; blank lines and `#` comments are ignored.
    pub fn parse_key_file(text: &str) -> Result<Self, ChaosError> {
        let mut raw = Vec::with_capacity(5);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.len() != HEX_DIGITS
                || !line.bytes().all(|c| c.is_ascii_digit() || (b'a'..=b'f').contains(&c))
            {
                return Err(ChaosError::Key(format!(
                    "line {}: expected {HEX_DIGITS} lowercase hex digits, got `{line}`",
                    lineno + 1
                )));
            }
            raw.push(u64::from_str_radix(line, 16).expect("validated hex"));
        }
        let raw: [u64; 5] = raw
            .try_into()
            .map_err(|v: Vec<u64>| ChaosError::Key(format!("expected 5 keys, found {}", v.len())))?;
        KeyBundle::from_raw(raw)
    }
}

impl fmt::Debug for KeyBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KeyBundle")
            .field("x0", &self.x0())
            .field("y0", &self.y0())
            .field("a", &self.a())
            .field("b", &self.b())
            .field("n0", &self.n0())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decoded_ranges_are_open() {
        let lo = KeyBundle::from_raw([0; 5]).unwrap();
        let hi = KeyBundle::from_raw([KEY_MASK; 5]).unwrap();
        assert!(lo.x0() > -1.0 && hi.x0() < 1.0);
        assert!(lo.a() > 0.0 && hi.a() < 25.0);
        assert_eq!(lo.n0(), 1000);
        assert_eq!(hi.n0(), KEY_MASK % 10_000 + 1000);
    }

    #[test]
    fn from_values_is_close() {
        let k = KeyBundle::from_values(0.1, 0.2, 20.0, 21.0, 1000).unwrap();
        assert!((k.x0() - 0.1).abs() < 1e-15);
        assert!((k.y0() - 0.2).abs() < 1e-15);
        assert!((k.a() - 20.0).abs() < 1e-14);
        assert!((k.b() - 21.0).abs() < 1e-14);
        assert_eq!(k.n0(), 1000);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(KeyBundle::from_values(1.0, 0.0, 1.0, 1.0, 1000).is_err());
        assert!(KeyBundle::from_values(0.0, 0.0, 25.0, 1.0, 1000).is_err());
        assert!(KeyBundle::from_values(0.0, 0.0, 1.0, 1.0, 999).is_err());
        assert!(KeyBundle::from_raw([1 << 52, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn lsb_flip_moves_each_component() {
        let k = KeyBundle::from_values(0.1, 0.2, 20.0, 21.0, 1234).unwrap();
        let f = k.with_flipped_lsb(KeyComponent::X0);
        assert_ne!(f.x0(), k.x0());
        assert!((f.x0() - k.x0()).abs() < 1e-15);
        assert_ne!(k.with_flipped_lsb(KeyComponent::A).a(), k.a());
        assert_ne!(k.with_flipped_lsb(KeyComponent::B).b(), k.b());
        assert_eq!(k.with_flipped_lsb(KeyComponent::N0).n0().abs_diff(k.n0()), 1);
    }

    #[test]
    fn key_file_format() {
        let k = KeyBundle::from_raw([0x1, 0xabc, 0xfffffffffffff, 0x0123456789abc, 42]).unwrap();
        let text = k.to_key_file();
        assert!(text.contains("\n0000000000001\n0000000000abc\nfffffffffffff\n0123456789abc\n000000000002a\n"));
        assert_eq!(KeyBundle::parse_key_file(&text).unwrap(), k);
    }

    #[test]
    fn key_file_errors() {
        assert!(KeyBundle::parse_key_file("0000000000001\n").is_err());
        let upper = "000000000000A\n0000000000001\n0000000000001\n0000000000001\n0000000000001\n";
        assert!(KeyBundle::parse_key_file(upper).is_err());
        let short = "00001\n0000000000001\n0000000000001\n0000000000001\n0000000000001\n";
        assert!(KeyBundle::parse_key_file(short).is_err());
    }

    #[test]
    fn c0_is_xor_fold() {
        let k = KeyBundle::from_raw([0x01, 0x02, 0x04, 0x0100, 0x80]).unwrap();
        assert_eq!(k.c0(), 0x01 ^ 0x02 ^ 0x04 ^ 0x01 ^ 0x80);
    }

    proptest! {
        #[test]
        fn key_file_round_trip(raw in proptest::array::uniform5(0u64..(1u64 << 52))) {
            let k = KeyBundle::from_raw(raw).unwrap();
            let with_comment = format!("# header\n\n{}", k.to_key_file());
            prop_assert_eq!(KeyBundle::parse_key_file(&with_comment).unwrap(), k);
        }
    }
}
