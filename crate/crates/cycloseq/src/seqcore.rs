//! Periodic sequences over Z2/Z4 and their exact analysis: Gray mapping,
//! periodic correlation over Gaussian integers, symbol balance, cyclic
//! shifts, and the CRT interleaving of Z2 × Zp supports into Z_{2p}.
//!
//! No floating point anywhere; a correlation value is a Gaussian integer
//! (re, im) and every identity asserted in tests is exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;
use thiserror::Error;

use crate::par;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum SeqError {
    #[error("symbol {value} out of range for alphabet Z{modulus}")]
    SymbolOutOfRange { value: u8, modulus: u8 },
    #[error("empty sequence")]
    Empty,
    #[error("sequences have different periods ({0} vs {1})")]
    PeriodMismatch(usize, usize),
    #[error("sequences have different alphabets")]
    AlphabetMismatch,
    #[error("operation requires a binary sequence")]
    BinaryOnly,
    #[error("invalid symbol character {0:?}")]
    BadSymbolChar(char),
    #[error("shift {tau} out of range for period {period}")]
    ShiftOutOfRange { tau: usize, period: usize },
    #[error("parity check failed while halving an exact combination")]
    HalfIntegerParity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Alphabet {
    Binary,
    Quaternary,
}

impl Alphabet {
    pub fn modulus(self) -> u8 {
        match self {
            Alphabet::Binary => 2,
            Alphabet::Quaternary => 4,
        }
    }
}

/// A finite symbol vector over Z2 or Z4, read cyclically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodicSeq {
    alphabet: Alphabet,
    symbols: Vec<u8>,
}

impl PeriodicSeq {
    pub fn new(alphabet: Alphabet, symbols: Vec<u8>) -> Result<Self, SeqError> {
        if symbols.is_empty() {
            return Err(SeqError::Empty);
        }
        let m = alphabet.modulus();
        if let Some(&value) = symbols.iter().find(|&&s| s >= m) {
            return Err(SeqError::SymbolOutOfRange { value, modulus: m });
        }
        Ok(Self { alphabet, symbols })
    }

    /// Binary characteristic sequence of a support set inside Z_period.
    pub fn characteristic(period: usize, support: impl IntoIterator<Item = u64>) -> Result<Self, SeqError> {
        if period == 0 {
            return Err(SeqError::Empty);
        }
        let mut symbols = vec![0u8; period];
        for t in support {
            symbols[(t as usize) % period] = 1;
        }
        Ok(Self { alphabet: Alphabet::Binary, symbols })
    }

    /// Parses the one-symbol-per-character text form ("0123", index 0 first).
    /// With `alphabet = None` the alphabet is inferred: binary unless a 2 or 3
    /// occurs.
    pub fn parse(text: &str, alphabet: Option<Alphabet>) -> Result<Self, SeqError> {
        let mut symbols = Vec::with_capacity(text.len());
        for c in text.chars() {
            let v = c.to_digit(10).filter(|&d| d < 4).ok_or(SeqError::BadSymbolChar(c))? as u8;
            symbols.push(v);
        }
        let alphabet = alphabet.unwrap_or_else(|| {
            if symbols.iter().any(|&s| s > 1) {
                Alphabet::Quaternary
            } else {
                Alphabet::Binary
            }
        });
        Self::new(alphabet, symbols)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn modulus(&self) -> u8 {
        self.alphabet.modulus()
    }

    pub fn period(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Symbol at t, read cyclically for any t.
    pub fn symbol(&self, t: usize) -> u8 {
        self.symbols[t % self.symbols.len()]
    }

    /// Left cyclic shift: the sequence t -> s(t + tau).
    pub fn shift(&self, tau: usize) -> Result<Self, SeqError> {
        let n = self.period();
        if tau >= n {
            return Err(SeqError::ShiftOutOfRange { tau, period: n });
        }
        let symbols = (0..n).map(|t| self.symbols[(t + tau) % n]).collect();
        Ok(Self { alphabet: self.alphabet, symbols })
    }

    /// Bitwise complement; binary only.
    pub fn complement(&self) -> Result<Self, SeqError> {
        if self.alphabet != Alphabet::Binary {
            return Err(SeqError::BinaryOnly);
        }
        let symbols = self.symbols.iter().map(|&b| 1 - b).collect();
        Ok(Self { alphabet: Alphabet::Binary, symbols })
    }

    /// Support of a binary sequence (positions of ones).
    pub fn support(&self) -> Result<Vec<u64>, SeqError> {
        if self.alphabet != Alphabet::Binary {
            return Err(SeqError::BinaryOnly);
        }
        Ok(self
            .symbols
            .iter()
            .enumerate()
            .filter_map(|(t, &b)| (b == 1).then_some(t as u64))
            .collect())
    }
}

impl fmt::Display for PeriodicSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Gray image of a Z4 symbol as a bit pair.
pub fn gray(symbol: u8) -> (u8, u8) {
    match symbol {
        0 => (0, 0),
        1 => (0, 1),
        2 => (1, 1),
        3 => (1, 0),
        _ => panic!("gray: symbol {symbol} out of Z4"),
    }
}

/// Inverse Gray map of a bit pair.
pub fn gray_inverse(b1: u8, b2: u8) -> u8 {
    match (b1, b2) {
        (0, 0) => 0,
        (0, 1) => 1,
        (1, 1) => 2,
        (1, 0) => 3,
        _ => panic!("gray_inverse: ({b1},{b2}) is not a bit pair"),
    }
}

/// Merges two binary sequences into the quaternary sequence
/// t -> gray_inverse(s1(t), s2(t)).
pub fn gray_combine(s1: &PeriodicSeq, s2: &PeriodicSeq) -> Result<PeriodicSeq, SeqError> {
    if s1.alphabet() != Alphabet::Binary || s2.alphabet() != Alphabet::Binary {
        return Err(SeqError::BinaryOnly);
    }
    if s1.period() != s2.period() {
        return Err(SeqError::PeriodMismatch(s1.period(), s2.period()));
    }
    let symbols = s1
        .symbols()
        .iter()
        .zip(s2.symbols())
        .map(|(&a, &b)| gray_inverse(a, b))
        .collect();
    PeriodicSeq::new(Alphabet::Quaternary, symbols)
}

/// Splits a quaternary sequence into its Gray bit-pair components.
pub fn gray_split(s: &PeriodicSeq) -> (PeriodicSeq, PeriodicSeq) {
    let (first, second): (Vec<u8>, Vec<u8>) = s.symbols().iter().map(|&v| gray(v)).unzip();
    (
        PeriodicSeq { alphabet: Alphabet::Binary, symbols: first },
        PeriodicSeq { alphabet: Alphabet::Binary, symbols: second },
    )
}

/// Exact correlation value: an element of Z[i]. For binary correlations the
/// imaginary part is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

impl GaussianInt {
    pub const ZERO: Self = Self { re: 0, im: 0 };

    pub fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }

    pub fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }

    /// |z|² as an exact integer.
    pub fn norm_sq(self) -> u64 {
        let n = self.re as i128 * self.re as i128 + self.im as i128 * self.im as i128;
        u64::try_from(n).expect("norm within design bounds")
    }

    pub fn is_real(self) -> bool {
        self.im == 0
    }
}

impl Add for GaussianInt {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for GaussianInt {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Neg for GaussianInt {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }
}

impl Mul for GaussianInt {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl From<i64> for GaussianInt {
    fn from(re: i64) -> Self {
        Self { re, im: 0 }
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, im) => write!(f, "{im}i"),
            (re, im) if im < 0 => write!(f, "{re}{im}i"),
            (re, im) => write!(f, "{re}+{im}i"),
        }
    }
}

// i^k and (-1)^k as Gaussian integers
const POWERS_I: [GaussianInt; 4] = [
    GaussianInt { re: 1, im: 0 },
    GaussianInt { re: 0, im: 1 },
    GaussianInt { re: -1, im: 0 },
    GaussianInt { re: 0, im: -1 },
];

fn omega_power(alphabet: Alphabet, k: u8) -> GaussianInt {
    match alphabet {
        Alphabet::Binary => {
            if k == 0 {
                GaussianInt::new(1, 0)
            } else {
                GaussianInt::new(-1, 0)
            }
        }
        Alphabet::Quaternary => POWERS_I[k as usize],
    }
}

/// Periodic correlation Σ_t ω^{s1(t) − s2(t+τ)} over one period, with
/// ω = −1 for binary and ω = i for quaternary sequences.
pub fn correlation(s1: &PeriodicSeq, s2: &PeriodicSeq, tau: usize) -> Result<GaussianInt, SeqError> {
    if s1.alphabet() != s2.alphabet() {
        return Err(SeqError::AlphabetMismatch);
    }
    if s1.period() != s2.period() {
        return Err(SeqError::PeriodMismatch(s1.period(), s2.period()));
    }
    Ok(correlation_unchecked(s1, s2, tau))
}

fn correlation_unchecked(s1: &PeriodicSeq, s2: &PeriodicSeq, tau: usize) -> GaussianInt {
    let n = s1.period();
    let m = s1.modulus();
    let a = s1.symbols();
    let b = s2.symbols();
    let mut acc = GaussianInt::ZERO;
    for t in 0..n {
        let d = (a[t] + m - b[(t + tau) % n]) % m;
        acc = acc + omega_power(s1.alphabet(), d);
    }
    acc
}

/// Autocorrelation of s at shift τ.
pub fn autocorrelation(s: &PeriodicSeq, tau: usize) -> GaussianInt {
    correlation_unchecked(s, s, tau % s.period())
}

/// Multiset of autocorrelation values over τ = 0..N−1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrelationProfile {
    entries: BTreeMap<GaussianInt, usize>,
}

impl CorrelationProfile {
    fn from_values(values: Vec<GaussianInt>) -> Self {
        let mut entries = BTreeMap::new();
        for v in values {
            *entries.entry(v).or_insert(0) += 1;
        }
        Self { entries }
    }

    /// Builds a profile from (value, multiplicity) pairs, mostly for spelling
    /// out expected distributions in tests.
    pub fn from_entries(pairs: impl IntoIterator<Item = (GaussianInt, usize)>) -> Self {
        let mut entries = BTreeMap::new();
        for (v, c) in pairs {
            if c > 0 {
                *entries.entry(v).or_insert(0) += c;
            }
        }
        Self { entries }
    }

    pub fn entries(&self) -> impl Iterator<Item = (GaussianInt, usize)> + '_ {
        self.entries.iter().map(|(&v, &c)| (v, c))
    }

    pub fn multiplicity(&self, value: GaussianInt) -> usize {
        self.entries.get(&value).copied().unwrap_or(0)
    }

    pub fn distinct_values(&self) -> usize {
        self.entries.len()
    }

    pub fn total(&self) -> usize {
        self.entries.values().sum()
    }
}

/// Full autocorrelation distribution; shift loop fans out on rayon when the
/// `parallel` feature is on.
pub fn autocorrelation_profile(s: &PeriodicSeq) -> CorrelationProfile {
    let n = s.period();
    CorrelationProfile::from_values(par::map_range(n, 64, |tau| correlation_unchecked(s, s, tau)))
}

/// Always-sequential variant of [`autocorrelation_profile`]; same values.
pub fn autocorrelation_profile_seq(s: &PeriodicSeq) -> CorrelationProfile {
    let n = s.period();
    CorrelationProfile::from_values((0..n).map(|tau| correlation_unchecked(s, s, tau)).collect())
}

/// max |R(τ)|² over out-of-phase shifts, exact.
pub fn rmax_sq(s: &PeriodicSeq) -> u64 {
    (1..s.period())
        .map(|tau| autocorrelation(s, tau).norm_sq())
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BalanceClass {
    Balanced,
    AlmostBalanced,
    Unbalanced,
}

impl fmt::Display for BalanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BalanceClass::Balanced => "balanced",
            BalanceClass::AlmostBalanced => "almost-balanced",
            BalanceClass::Unbalanced => "unbalanced",
        };
        f.write_str(s)
    }
}

/// Symbol counts N_k and the max−min classification (≤1 balanced,
/// ≤2 almost balanced).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalanceReport {
    pub counts: Vec<usize>,
    pub class: BalanceClass,
}

pub fn balance_counts(s: &PeriodicSeq) -> BalanceReport {
    let m = s.modulus() as usize;
    let mut counts = vec![0usize; m];
    for &v in s.symbols() {
        counts[v as usize] += 1;
    }
    let max = *counts.iter().max().unwrap();
    let min = *counts.iter().min().unwrap();
    let class = match max - min {
        0 | 1 => BalanceClass::Balanced,
        2 => BalanceClass::AlmostBalanced,
        _ => BalanceClass::Unbalanced,
    };
    BalanceReport { counts, class }
}

/// The Krone–Sarwate combination
/// ½[R_{s1}(τ) + R_{s2}(τ)] + (ω/2)[R_{s1,s2}(τ) − R_{s2,s1}(τ)]
/// for binary s1, s2 and ω = i. Both brackets are provably even, so the
/// result is computed over doubled integers and halved with a parity check;
/// it equals the autocorrelation of the Gray-combined quaternary sequence.
pub fn krone_sarwate_check(
    s1: &PeriodicSeq,
    s2: &PeriodicSeq,
    tau: usize,
) -> Result<GaussianInt, SeqError> {
    if s1.alphabet() != Alphabet::Binary || s2.alphabet() != Alphabet::Binary {
        return Err(SeqError::BinaryOnly);
    }
    let sum = correlation(s1, s1, tau)?.re + correlation(s2, s2, tau)?.re;
    let skew = correlation(s1, s2, tau)?.re - correlation(s2, s1, tau)?.re;
    if sum % 2 != 0 || skew % 2 != 0 {
        return Err(SeqError::HalfIntegerParity);
    }
    Ok(GaussianInt::new(sum / 2, skew / 2))
}

/// CRT interleaving ψ: the unique t ∈ Z_{2p} with t ≡ u (mod 2) and
/// t ≡ v (mod p), for odd p.
pub fn crt_interleave(u: u8, v: u64, p: u64) -> u64 {
    debug_assert!(p % 2 == 1 && u < 2);
    let v = v % p;
    if v % 2 == u as u64 {
        v
    } else {
        v + p
    }
}

/// ψ applied pointwise to a set of (u, v) pairs.
pub fn crt_support(pairs: impl IntoIterator<Item = (u8, u64)>, p: u64) -> Vec<u64> {
    let mut out: Vec<u64> = pairs.into_iter().map(|(u, v)| crt_interleave(u, v, p)).collect();
    out.sort_unstable();
    out
}

/// Inverse of ψ.
pub fn crt_split(t: u64, p: u64) -> (u8, u64) {
    ((t % 2) as u8, t % p)
}
