//! Boolean functions on the hypercube and their Fourier analysis.
//!
//! A function `f: {0,1}ⁿ → {0,1}` is stored as its truth table, indexed by
//! `x` read as an n-bit little-endian integer. Its sign form is
//! `φ(x) = (-1)^{f(x)}` and its Fourier coefficients are
//! `φ̂(S) = 2⁻ⁿ Σ_x (-1)^{S·x} φ(x)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::TAU_ZERO;
use crate::error::{Error, Result};

/// Largest accepted input size.
pub const MAX_BITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BooleanFunction {
    n: usize,
    table: Vec<u8>,
}

/// Hamming weight `|S|` of a subset encoded as a bitmask.
#[inline]
pub fn weight(s: usize) -> usize {
    s.count_ones() as usize
}

/// The character value `(-1)^{S·x}`.
#[inline]
pub fn character(s: usize, x: usize) -> f64 {
    if (s & x).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl BooleanFunction {
    pub fn new(n: usize, table: Vec<u8>) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::Input(format!(
                "bit count must be in 1..={MAX_BITS}, got {n}"
            )));
        }
        if table.len() != 1 << n {
            return Err(Error::Input(format!(
                "truth table for n = {n} needs {} entries, got {}",
                1usize << n,
                table.len()
            )));
        }
        if let Some(pos) = table.iter().position(|&b| b > 1) {
            return Err(Error::Input(format!(
                "truth table entry {pos} is {}, expected 0 or 1",
                table[pos]
            )));
        }
        Ok(BooleanFunction { n, table })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::Input(format!(
                "bit count must be in 1..={MAX_BITS}, got {n}"
            )));
        }
        Self::new(n, (0..1usize << n).map(|x| f(x) as u8).collect())
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Self::from_fn(n, |_| value)
    }

    pub fn or(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x != 0)
    }

    pub fn and(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x == (1 << n) - 1)
    }

    pub fn parity(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x.count_ones() % 2 == 1)
    }

    /// Majority; defined only for odd `n` so that there are no ties.
    pub fn majority(n: usize) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(Error::Input(format!(
                "majority needs an odd bit count, got {n}"
            )));
        }
        Self::from_fn(n, |x| 2 * weight(x) > n)
    }

    /// Catalog lookup: `or`, `and`, `parity`, `maj`.
    pub fn catalog(name: &str, n: usize) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "or" => Self::or(n),
            "and" => Self::and(n),
            "parity" | "xor" => Self::parity(n),
            "maj" | "majority" => Self::majority(n),
            other => Err(Error::Input(format!(
                "unknown catalog function `{other}` (expected or, and, parity, maj)"
            ))),
        }
    }

    /// Parses a truth table given either as a hex integer (`0x8` is AND₂:
    /// bit `x` of the integer is `f(x)`) or as an explicit list of `2ⁿ`
    /// bits in index order, optionally comma separated (`0,1,1,1` or `0111`).
    pub fn parse_table(n: usize, spec: &str) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::Input(format!(
                "bit count must be in 1..={MAX_BITS}, got {n}"
            )));
        }
        let spec = spec.trim();
        let size = 1usize << n;
        if let Some(hex) = spec
            .strip_prefix("0x")
            .or_else(|| spec.strip_prefix("0X"))
        {
            let hex = hex.trim_start_matches('0');
            let mut table = vec![0u8; size];
            for (j, ch) in hex.chars().rev().enumerate() {
                let digit = ch
                    .to_digit(16)
                    .ok_or_else(|| Error::Input(format!("invalid hex digit `{ch}` in table")))?;
                for b in 0..4 {
                    if digit >> b & 1 == 1 {
                        let idx = 4 * j + b;
                        if idx >= size {
                            return Err(Error::Input(format!(
                                "hex table {spec} has bits beyond 2^{n} entries"
                            )));
                        }
                        table[idx] = 1;
                    }
                }
            }
            return Self::new(n, table);
        }
        let bits: Vec<u8> = spec
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Input(format!("invalid bit `{other}` in table"))),
            })
            .collect::<Result<_>>()?;
        Self::new(n, bits)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::Input(format!(
                "bit count must be in 1..={MAX_BITS}, got {n}"
            )));
        }
        Self::new(n, (0..1usize << n).map(|_| rng.random_range(0..2u8)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn value(&self, x: usize) -> u8 {
        self.table[x]
    }

    /// `φ(x) = (-1)^{f(x)}` as a float.
    pub fn sign(&self, x: usize) -> f64 {
        if self.table[x] == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn sign_table(&self) -> Vec<f64> {
        (0..self.size()).map(|x| self.sign(x)).collect()
    }

    pub fn is_constant(&self) -> bool {
        self.table.iter().all(|&b| b == self.table[0])
    }

    /// Hex form of the truth table, e.g. `0x8` for AND₂.
    pub fn to_hex(&self) -> String {
        let mut digits = String::new();
        for chunk in self.table.chunks(4).rev() {
            let mut d = 0u32;
            for (b, &bit) in chunk.iter().enumerate() {
                d |= (bit as u32) << b;
            }
            digits.push(std::char::from_digit(d, 16).unwrap());
        }
        let trimmed = digits.trim_start_matches('0');
        format!("0x{}", if trimmed.is_empty() { "0" } else { trimmed })
    }

    /// Exact Fourier spectrum of the sign form, computed in integers.
    pub fn spectrum(&self) -> FourierSpectrum {
        let mut scaled: Vec<i64> = self
            .table
            .iter()
            .map(|&b| if b == 0 { 1 } else { -1 })
            .collect();
        walsh_hadamard_i64(&mut scaled);
        FourierSpectrum::from_scaled(self.n, scaled)
    }

    /// `deg(φ) = max{|S| : φ̂(S) ≠ 0}`.
    pub fn degree(&self) -> usize {
        self.spectrum().degree()
    }
}

/// In-place unnormalized Walsh–Hadamard transform: `v[S] ← Σ_x (-1)^{S·x} v[x]`.
pub fn walsh_hadamard(v: &mut [f64]) {
    let len = v.len();
    assert!(len.is_power_of_two(), "WHT length must be a power of two");
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for j in block..block + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Integer version of [`walsh_hadamard`]; exact for ±1 tables up to n = 16.
pub fn walsh_hadamard_i64(v: &mut [i64]) {
    let len = v.len();
    assert!(len.is_power_of_two(), "WHT length must be a power of two");
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for j in block..block + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSpectrum {
    n: usize,
    coeffs: Vec<f64>,
    /// `2ⁿ·φ̂(S)` when the spectrum came from an integer table.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    scaled: Option<Vec<i64>>,
}

/// `φ̂(S) = 2⁻ⁿ Σ_x (-1)^{S·x} φ(x)` for an arbitrary real table.
pub fn fourier_transform(values: &[f64]) -> Result<FourierSpectrum> {
    let len = values.len();
    if !len.is_power_of_two() || len < 2 {
        return Err(Error::Input(format!(
            "table length {len} is not a power of two ≥ 2"
        )));
    }
    let n = len.trailing_zeros() as usize;
    let mut coeffs = values.to_vec();
    walsh_hadamard(&mut coeffs);
    let scale = 1.0 / len as f64;
    coeffs.iter_mut().for_each(|c| *c *= scale);
    Ok(FourierSpectrum {
        n,
        coeffs,
        scaled: None,
    })
}

impl FourierSpectrum {
    fn from_scaled(n: usize, scaled: Vec<i64>) -> Self {
        let scale = 1.0 / (1u64 << n) as f64;
        let coeffs = scaled.iter().map(|&c| c as f64 * scale).collect();
        FourierSpectrum {
            n,
            coeffs,
            scaled: Some(scaled),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, s: usize) -> f64 {
        self.coeffs[s]
    }

    pub fn is_exact(&self) -> bool {
        self.scaled.is_some()
    }

    /// Max `|S|` with a nonzero coefficient; exact spectra test against zero,
    /// floating-point spectra against [`TAU_ZERO`].
    pub fn degree(&self) -> usize {
        self.degree_with(TAU_ZERO)
    }

    pub fn degree_with(&self, tau: f64) -> usize {
        match &self.scaled {
            Some(sc) => (0..sc.len())
                .filter(|&s| sc[s] != 0)
                .map(weight)
                .max()
                .unwrap_or(0),
            None => (0..self.coeffs.len())
                .filter(|&s| self.coeffs[s].abs() > tau)
                .map(weight)
                .max()
                .unwrap_or(0),
        }
    }

    /// `Σ_S φ̂(S)²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// `Σ_{|S| ≥ t} φ̂(S)²`.
    pub fn mass_at_or_above(&self, t: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(s, _)| weight(*s) >= t)
            .map(|(_, c)| c * c)
            .sum()
    }

    /// `φ(x) = Σ_S (-1)^{S·x} φ̂(S)`.
    pub fn inverse(&self) -> Vec<f64> {
        let mut v = self.coeffs.clone();
        walsh_hadamard(&mut v);
        v
    }

    /// Exact inverse for integer spectra: returns the original integer table.
    pub fn inverse_exact(&self) -> Option<Vec<i64>> {
        let scaled = self.scaled.as_ref()?;
        let mut v = scaled.clone();
        walsh_hadamard_i64(&mut v);
        let size = 1i64 << self.n;
        Some(v.into_iter().map(|e| e / size).collect())
    }
}
