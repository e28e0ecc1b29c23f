//! Ten tests from the NIST SP 800-22 battery.
//!
//! Tests reporting two statistics (cumulative sums, serial) pass only if
//! both P-values do; their headline P-value is the smaller one. The
//! template, universal and random-excursion tests are not implemented.

pub mod statistics;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chaos::{generate_orbit_values, quantize_byte, ChaosError, ChaoticOrbit, KeyBundle};

pub const ALPHA: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NistError {
    #[error("{test}: stream has {got} bits, needs at least {min}")]
    TooShort { test: NistTest, min: usize, got: usize },
    #[error("need {need} source values for {bits} bits, have {got}")]
    InsufficientData { need: usize, got: usize, bits: usize },
    #[error("bad test parameter: {0}")]
    Param(String),
    #[error("{} test(s) failed to run: {}", .0.len(), .0.join("; "))]
    Suite(Vec<String>),
    #[error(transparent)]
    Chaos(#[from] ChaosError),
}

/// A bit sequence packed most-significant-bit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitStream {
    bytes: Vec<u8>,
    len: usize,
}

impl BitStream {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let len = bytes.len() * 8;
        BitStream { bytes, len }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut bytes = vec![0u8; bits.len().div_ceil(8)];
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                bytes[i / 8] |= 0x80 >> (i % 8);
            }
        }
        BitStream { bytes, len: bits.len() }
    }

    /// Parses a string of `0`/`1` characters, ignoring anything else.
    pub fn parse(s: &str) -> Self {
        let bits: Vec<u8> = s.bytes().filter_map(|c| matches!(c, b'0' | b'1').then(|| c - b'0')).collect();
        BitStream::from_bits(&bits)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.len);
        (self.bytes[i / 8] >> (7 - i % 8)) & 1
    }

    /// One `0`/`1` byte per bit.
    pub fn unpack(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub fn truncated(&self, len: usize) -> BitStream {
        let len = len.min(self.len);
        let mut bytes = self.bytes[..len.div_ceil(8)].to_vec();
        if len % 8 != 0 {
            *bytes.last_mut().expect("non-empty") &= 0xffu8 << (8 - len % 8);
        }
        BitStream { bytes, len }
    }
}

/// Quantises each value to a byte and unpacks the bytes MSB first.
pub fn bits_from_values(values: &[f64], n_bits: usize) -> Result<BitStream, NistError> {
    let need = n_bits.div_ceil(8);
    if values.len() < need {
        return Err(NistError::InsufficientData {
            need,
            got: values.len(),
            bits: n_bits,
        });
    }
    let bytes = values[..need].iter().map(|&v| quantize_byte(v)).collect();
    Ok(BitStream::from_bytes(bytes).truncated(n_bits))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitComponent {
    X,
    Y,
}

pub fn bits_from_orbit(orbit: &ChaoticOrbit, component: OrbitComponent, n_bits: usize) -> Result<BitStream, NistError> {
    match component {
        OrbitComponent::X => bits_from_values(&orbit.xs, n_bits),
        OrbitComponent::Y => bits_from_values(&orbit.ys, n_bits),
    }
}

/// The x- and y-streams of a keyed orbit (after the key's discard).
pub fn streams_from_keys(keys: &KeyBundle, n_bits: usize) -> Result<(BitStream, BitStream), NistError> {
    let pairs = n_bits.div_ceil(8);
    let orbit = generate_orbit_values(keys, 2 * pairs, 0)?;
    Ok((
        bits_from_orbit(&orbit, OrbitComponent::X, n_bits)?,
        bits_from_orbit(&orbit, OrbitComponent::Y, n_bits)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NistTest {
    Frequency,
    BlockFrequency,
    CumulativeSums,
    Runs,
    LongestRun,
    Rank,
    Dft,
    ApproximateEntropy,
    Serial,
    LinearComplexity,
}

impl NistTest {
    pub const ALL: [NistTest; 10] = [
        NistTest::Frequency,
        NistTest::BlockFrequency,
        NistTest::CumulativeSums,
        NistTest::Runs,
        NistTest::LongestRun,
        NistTest::Rank,
        NistTest::Dft,
        NistTest::ApproximateEntropy,
        NistTest::Serial,
        NistTest::LinearComplexity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NistTest::Frequency => "Frequency",
            NistTest::BlockFrequency => "Block Frequency",
            NistTest::CumulativeSums => "Cumulative Sums",
            NistTest::Runs => "Runs",
            NistTest::LongestRun => "Longest Run",
            NistTest::Rank => "Rank",
            NistTest::Dft => "FFT",
            NistTest::ApproximateEntropy => "Approximate Entropy",
            NistTest::Serial => "Serial",
            NistTest::LinearComplexity => "Linear Complexity",
        }
    }
}

impl fmt::Display for NistTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestParams {
    pub block_frequency_m: usize,
    pub approximate_entropy_m: usize,
    pub serial_m: usize,
    pub linear_complexity_m: usize,
}

impl Default for TestParams {
    fn default() -> Self {
        TestParams {
            block_frequency_m: 128,
            approximate_entropy_m: 2,
            serial_m: 3,
            linear_complexity_m: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test: NistTest,
    /// The smallest of `p_values`.
    pub p_value: f64,
    pub p_values: Vec<f64>,
    pub pass: bool,
}

impl TestResult {
    fn new(test: NistTest, p_values: Vec<f64>) -> Self {
        let p_value = p_values.iter().copied().fold(f64::INFINITY, f64::min);
        TestResult {
            test,
            p_value,
            p_values,
            pass: p_value >= ALPHA,
        }
    }
}

/// Shortest stream each test accepts under `params`.
pub fn minimum_length(test: NistTest, params: &TestParams) -> usize {
    match test {
        NistTest::Frequency | NistTest::CumulativeSums | NistTest::Runs => 100,
        NistTest::BlockFrequency => params.block_frequency_m.max(100),
        NistTest::LongestRun => 128,
        NistTest::Rank => 38 * 32 * 32,
        NistTest::Dft => 1000,
        // m < ⌊log2 n⌋ − 5
        NistTest::ApproximateEntropy => 1 << (params.approximate_entropy_m + 6),
        NistTest::Serial => 1 << (params.serial_m + 3),
        NistTest::LinearComplexity => 200 * params.linear_complexity_m,
    }
}

fn check_params(params: &TestParams) -> Result<(), NistError> {
    let p = params;
    if p.block_frequency_m == 0 || p.serial_m < 2 || p.serial_m > 20 || p.approximate_entropy_m > 20 || p.linear_complexity_m < 2 {
        return Err(NistError::Param(format!("{p:?}")));
    }
    Ok(())
}

pub fn run_test(stream: &BitStream, test: NistTest, params: &TestParams) -> Result<TestResult, NistError> {
    check_params(params)?;
    let min = minimum_length(test, params);
    if stream.len() < min {
        return Err(NistError::TooShort {
            test,
            min,
            got: stream.len(),
        });
    }
    let bits = stream.unpack();
    Ok(run_unpacked(&bits, test, params))
}

fn run_unpacked(bits: &[u8], test: NistTest, params: &TestParams) -> TestResult {
    use statistics as s;
    let p = match test {
        NistTest::Frequency => vec![s::frequency(bits)],
        NistTest::BlockFrequency => vec![s::block_frequency(bits, params.block_frequency_m)],
        NistTest::CumulativeSums => {
            let (f, r) = s::cumulative_sums(bits);
            vec![f, r]
        }
        NistTest::Runs => vec![s::runs(bits)],
        NistTest::LongestRun => vec![s::longest_run(bits)],
        NistTest::Rank => vec![s::binary_matrix_rank(bits, 32, 32)],
        NistTest::Dft => vec![s::discrete_fourier_transform(bits)],
        NistTest::ApproximateEntropy => vec![s::approximate_entropy(bits, params.approximate_entropy_m)],
        NistTest::Serial => {
            let (a, b) = s::serial(bits, params.serial_m);
            vec![a, b]
        }
        NistTest::LinearComplexity => vec![s::linear_complexity(bits, params.linear_complexity_m)],
    };
    TestResult::new(test, p.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
}

/// All ten tests on one stream, in [`NistTest::ALL`] order.
pub fn run_all(stream: &BitStream, params: &TestParams) -> Result<Vec<TestResult>, NistError> {
    check_params(params)?;
    let bits = stream.unpack();
    let results: Vec<Result<TestResult, NistError>> = NistTest::ALL
        .par_iter()
        .map(|&t| {
            let min = minimum_length(t, params);
            if bits.len() < min {
                Err(NistError::TooShort { test: t, min, got: bits.len() })
            } else {
                Ok(run_unpacked(&bits, t, params))
            }
        })
        .collect();
    let errors: Vec<String> = results.iter().filter_map(|r| r.as_ref().err().map(|e| e.to_string())).collect();
    if !errors.is_empty() {
        return Err(NistError::Suite(errors));
    }
    Ok(results.into_iter().map(|r| r.expect("checked")).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub stream: OrbitComponent,
    pub result: TestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub bits: usize,
    pub entries: Vec<SuiteEntry>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.result.pass)
    }

    fn lookup(&self, stream: OrbitComponent, test: NistTest) -> Option<&TestResult> {
        self.entries
            .iter()
            .find(|e| e.stream == stream && e.result.test == test)
            .map(|e| &e.result)
    }

    /// One row per test: name, P-value of each stream, passes out of two.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<22}{:>12}{:>12}{:>8}\n", "Test", "P-value x", "P-value y", "Pass");
        for t in NistTest::ALL {
            let (Some(x), Some(y)) = (self.lookup(OrbitComponent::X, t), self.lookup(OrbitComponent::Y, t)) else {
                continue;
            };
            let passes = x.pass as u8 + y.pass as u8;
            out.push_str(&format!("{:<22}{:>12.6}{:>12.6}{:>6}/2\n", t.name(), x.p_value, y.p_value, passes));
        }
        out
    }
}

/// Runs every test on the x- and y-streams.
pub fn run_suite(stream_x: &BitStream, stream_y: &BitStream, params: &TestParams) -> Result<SuiteReport, NistError> {
    let mut entries = Vec::with_capacity(2 * NistTest::ALL.len());
    let mut errors = Vec::new();
    for (label, s) in [(OrbitComponent::X, stream_x), (OrbitComponent::Y, stream_y)] {
        match run_all(s, params) {
            Ok(rs) => entries.extend(rs.into_iter().map(|result| SuiteEntry { stream: label, result })),
            Err(NistError::Suite(e)) => errors.extend(e.into_iter().map(|m| format!("{label:?}: {m}"))),
            Err(e) => return Err(e),
        }
    }
    if !errors.is_empty() {
        return Err(NistError::Suite(errors));
    }
    Ok(SuiteReport {
        bits: stream_x.len(),
        entries,
    })
}
