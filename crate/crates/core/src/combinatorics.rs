//! Counting primitives shared by every other module.
//!
//! Exact values live in [`BigCount`], an unbounded unsigned integer. Values that are
//! too large to materialize (the construction parameters grow like `C(s,R)^2`) are
//! carried as [`LogValue`], a natural-log magnitude. [`Magnitude`] holds either.
//!
//! Subsets of `{0,..,n-1}` are [`KSubset`]s, ordered colexicographically everywhere:
//! `A < B` iff the largest element of the symmetric difference lies in `B`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Result};

/// Largest `n` for which all binomials are served exactly from a table.
const TABLE_N: usize = 128;

/// Binomials up to this `n` are evaluated on the exact path by default.
pub const EXACT_N_LIMIT: u64 = 512;

/// Exact nonnegative integer of unbounded size.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn one() -> Self {
        BigCount(BigUint::one())
    }

    pub fn from_u64(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }

    pub fn from_u128(v: u128) -> Self {
        BigCount(BigUint::from(v))
    }

    pub fn from_biguint(v: BigUint) -> Self {
        BigCount(v)
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn bits(&self) -> u64 {
        self.0.bits()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn to_u128(&self) -> Option<u128> {
        self.0.to_u128()
    }

    pub fn to_usize(&self) -> Option<usize> {
        self.0.to_usize()
    }

    /// Nearest `f64`; `+inf` beyond the `f64` range.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Natural logarithm, `-inf` for zero. Accurate to `f64` rounding at any size.
    pub fn ln(&self) -> f64 {
        let bits = self.0.bits();
        if bits == 0 {
            return f64::NEG_INFINITY;
        }
        if bits <= 1000 {
            return self.to_f64().ln();
        }
        let shift = bits - 64;
        let top = (&self.0 >> shift).to_u64().expect("64 leading bits");
        (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
    }

    pub fn checked_sub(&self, other: &BigCount) -> Option<BigCount> {
        if self.0 >= other.0 {
            Some(BigCount(&self.0 - &other.0))
        } else {
            None
        }
    }

    pub fn div_floor(&self, other: &BigCount) -> BigCount {
        BigCount(self.0.div_floor(&other.0))
    }

    pub fn div_ceil(&self, other: &BigCount) -> BigCount {
        let (q, r) = self.0.div_rem(&other.0);
        if r.is_zero() {
            BigCount(q)
        } else {
            BigCount(q + 1u32)
        }
    }

    pub fn pow(&self, exp: u32) -> BigCount {
        BigCount(num_traits::pow(self.0.clone(), exp as usize))
    }

    /// `self / other` as an `f64`, accurate even when both operands overflow `f64`.
    pub fn ratio_f64(&self, other: &BigCount) -> f64 {
        if other.is_zero() {
            return if self.is_zero() {
                f64::NAN
            } else {
                f64::INFINITY
            };
        }
        if self.bits() <= 1000 && other.bits() <= 1000 {
            return self.to_f64() / other.to_f64();
        }
        (self.ln() - other.ln()).exp()
    }

    /// `floor(self / x)` for a positive finite `x`, computed exactly by treating `x`
    /// as the dyadic rational it represents.
    pub fn div_floor_f64(&self, x: f64) -> Result<BigCount> {
        if !(x.is_finite() && x > 0.0) {
            return domain(format!("divisor {x} must be positive and finite"));
        }
        let (mantissa, exponent) = decompose_f64(x);
        // self / (m * 2^e)
        let m = BigUint::from(mantissa);
        let q = if exponent >= 0 {
            self.0.div_floor(&(m << exponent as u64))
        } else {
            (&self.0 << (-exponent) as u64).div_floor(&m)
        };
        Ok(BigCount(q))
    }
}

fn decompose_f64(x: f64) -> (u64, i64) {
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount::from_u64(v)
    }
}

impl From<usize> for BigCount {
    fn from(v: usize) -> Self {
        BigCount::from_u64(v as u64)
    }
}

impl Add for BigCount {
    type Output = BigCount;
    fn add(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 + rhs.0)
    }
}

impl Add<&BigCount> for &BigCount {
    type Output = BigCount;
    fn add(self, rhs: &BigCount) -> BigCount {
        BigCount(&self.0 + &rhs.0)
    }
}

impl Mul for BigCount {
    type Output = BigCount;
    fn mul(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 * rhs.0)
    }
}

impl Mul<&BigCount> for &BigCount {
    type Output = BigCount;
    fn mul(self, rhs: &BigCount) -> BigCount {
        BigCount(&self.0 * &rhs.0)
    }
}

impl std::iter::Sum for BigCount {
    fn sum<I: Iterator<Item = BigCount>>(iter: I) -> Self {
        iter.fold(BigCount::zero(), |a, b| a + b)
    }
}

// Decimal strings keep arbitrarily large counts lossless in JSON.
impl Serialize for BigCount {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_str_radix(10))
    }
}

impl<'de> Deserialize<'de> for BigCount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Str(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Ok(BigCount::from_u64(v)),
            Repr::Str(s) => BigUint::parse_bytes(s.as_bytes(), 10)
                .map(BigCount)
                .ok_or_else(|| serde::de::Error::custom(format!("invalid count {s:?}"))),
        }
    }
}

/// A nonnegative real stored as its natural logarithm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    #[serde(with = "nullable_ln")]
    pub log_magnitude: f64,
    pub is_zero: bool,
}

impl LogValue {
    pub fn zero() -> Self {
        LogValue {
            log_magnitude: f64::NEG_INFINITY,
            is_zero: true,
        }
    }

    pub fn one() -> Self {
        LogValue::from_ln(0.0)
    }

    pub fn from_ln(ln: f64) -> Self {
        if ln == f64::NEG_INFINITY {
            return LogValue::zero();
        }
        LogValue {
            log_magnitude: ln,
            is_zero: false,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x >= 0.0, "LogValue::from_f64 of negative {x}");
        if x == 0.0 {
            LogValue::zero()
        } else {
            LogValue::from_ln(x.ln())
        }
    }

    pub fn from_count(c: &BigCount) -> Self {
        if c.is_zero() {
            LogValue::zero()
        } else {
            LogValue::from_ln(c.ln())
        }
    }

    pub fn ln(&self) -> f64 {
        if self.is_zero {
            f64::NEG_INFINITY
        } else {
            self.log_magnitude
        }
    }

    /// The value itself; overflows to `+inf` past `f64::MAX`.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero {
            0.0
        } else {
            self.log_magnitude.exp()
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: LogValue) -> LogValue {
        if self.is_zero || other.is_zero {
            return LogValue::zero();
        }
        LogValue::from_ln(self.log_magnitude + other.log_magnitude)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, other: LogValue) -> LogValue {
        assert!(!other.is_zero, "LogValue division by zero");
        if self.is_zero {
            return LogValue::zero();
        }
        LogValue::from_ln(self.log_magnitude - other.log_magnitude)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: LogValue) -> LogValue {
        if self.is_zero {
            return other;
        }
        if other.is_zero {
            return self;
        }
        let (hi, lo) = if self.log_magnitude >= other.log_magnitude {
            (self.log_magnitude, other.log_magnitude)
        } else {
            (other.log_magnitude, self.log_magnitude)
        };
        LogValue::from_ln(hi + (lo - hi).exp().ln_1p())
    }

    pub fn powi(self, e: f64) -> LogValue {
        if self.is_zero {
            return if e == 0.0 {
                LogValue::one()
            } else {
                LogValue::zero()
            };
        }
        LogValue::from_ln(self.log_magnitude * e)
    }

    /// Log-sum-exp over an iterator of log values.
    pub fn sum<I: IntoIterator<Item = LogValue>>(items: I) -> LogValue {
        let items: Vec<LogValue> = items.into_iter().filter(|v| !v.is_zero).collect();
        let Some(max) = items
            .iter()
            .map(|v| v.log_magnitude)
            .max_by(|a, b| a.total_cmp(b))
        else {
            return LogValue::zero();
        };
        let acc: f64 = items.iter().map(|v| (v.log_magnitude - max).exp()).sum();
        LogValue::from_ln(max + acc.ln())
    }
}

// JSON has no infinities; the zero value's `-inf` is written as `null`.
mod nullable_ln {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln().partial_cmp(&other.ln())
    }
}

/// Which arithmetic produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithPath {
    Exact,
    LogSpace,
}

/// A count that is exact when it could be materialized and log-scale otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Magnitude {
    Exact(BigCount),
    Log(LogValue),
}

impl Magnitude {
    pub fn ln(&self) -> f64 {
        match self {
            Magnitude::Exact(c) => c.ln(),
            Magnitude::Log(v) => v.ln(),
        }
    }

    pub fn log_value(&self) -> LogValue {
        match self {
            Magnitude::Exact(c) => LogValue::from_count(c),
            Magnitude::Log(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&BigCount> {
        match self {
            Magnitude::Exact(c) => Some(c),
            Magnitude::Log(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Magnitude::Exact(c) => c.to_f64(),
            Magnitude::Log(v) => v.to_f64(),
        }
    }

    pub fn path(&self) -> ArithPath {
        match self {
            Magnitude::Exact(_) => ArithPath::Exact,
            Magnitude::Log(_) => ArithPath::LogSpace,
        }
    }

    /// `self / other` as an `f64`; exact operands are divided as integers first.
    pub fn ratio_f64(&self, other: &Magnitude) -> f64 {
        match (self, other) {
            (Magnitude::Exact(a), Magnitude::Exact(b)) => a.ratio_f64(b),
            _ => (self.ln() - other.ln()).exp(),
        }
    }
}

impl From<BigCount> for Magnitude {
    fn from(c: BigCount) -> Self {
        Magnitude::Exact(c)
    }
}

fn pascal_table() -> &'static Vec<Vec<u128>> {
    static TABLE: OnceLock<Vec<Vec<u128>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(TABLE_N + 1);
        for n in 0..=TABLE_N {
            let mut row = vec![1u128; n + 1];
            for k in 1..n {
                row[k] = rows[n - 1][k - 1] + rows[n - 1][k];
            }
            rows.push(row);
        }
        rows
    })
}

/// `C(n,k)` as a `u128` for `n <= 128`; zero when `k > n`.
pub fn binomial_small(n: usize, k: usize) -> u128 {
    assert!(n <= TABLE_N, "binomial_small needs n <= {TABLE_N}, got {n}");
    if k > n {
        0
    } else {
        pascal_table()[n][k]
    }
}

/// `C(n,k)` as a `u64` when it fits.
pub fn binomial_u64(n: u64, k: u64) -> Option<u64> {
    if n as usize <= TABLE_N {
        return u64::try_from(binomial_small(n as usize, k as usize)).ok();
    }
    binomial(n, k).to_u64()
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigCount {
    if k > n {
        return BigCount::zero();
    }
    if n as usize <= TABLE_N {
        return BigCount::from_u128(binomial_small(n as usize, k as usize));
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        // acc = C(n-k+i-1, i-1) before this step, so the division is exact
        acc *= n - k + i;
        acc /= i;
    }
    BigCount(acc)
}

/// Exact binomial with a `BigCount` top argument.
pub fn binomial_big(n: &BigCount, k: u64) -> BigCount {
    if let Some(small) = n.to_u64() {
        return binomial(small, k);
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= &n.0 - i;
        acc /= i + 1;
    }
    BigCount(acc)
}

/// `ln(n!)`, summed exactly below a threshold and by Stirling's series above it.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 4096 {
        return (2..=n).map(|i| (i as f64).ln()).sum();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x + 0.5 * (std::f64::consts::TAU * x).ln() + inv / 12.0 - inv * inv2 / 360.0
        + inv * inv2 * inv2 / 1260.0
}

/// Terms above this count switch `log_binomial` from summation to log-gamma differences.
const LOG_SUM_TERMS: u64 = 10_000_000;

/// `ln C(n,k)`.
pub fn log_binomial(n: u64, k: u64) -> Result<LogValue> {
    if k > n {
        return domain(format!("log_binomial needs k <= n, got n={n}, k={k}"));
    }
    let k = k.min(n - k);
    if n <= EXACT_N_LIMIT {
        return Ok(LogValue::from_count(&binomial(n, k)));
    }
    if k <= LOG_SUM_TERMS {
        let base = (n - k) as f64;
        let sum: f64 = (1..=k).map(|i| ((base + i as f64) / i as f64).ln()).sum();
        return Ok(LogValue::from_ln(sum));
    }
    Ok(LogValue::from_ln(
        ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k),
    ))
}

/// `ln C(n,k)` for an exact `n` of any size.
pub fn log_binomial_count(n: &BigCount, k: u64) -> Result<LogValue> {
    if let Some(small) = n.to_u64() {
        return log_binomial(small, k);
    }
    log_binomial_ln(n.ln(), k)
}

/// `ln C(n,k)` when only `ln n` is known and `n` exceeds `2^64`, so `k/n` is negligible
/// beyond the second-order correction.
pub fn log_binomial_ln(ln_n: f64, k: u64) -> Result<LogValue> {
    if ln_n < 44.0 {
        return domain(format!(
            "log_binomial_ln needs n >= 2^63 (ln n = {ln_n}); use the exact path"
        ));
    }
    if k == 0 {
        return Ok(LogValue::one());
    }
    let kf = k as f64;
    if kf.ln() > ln_n - 20.0 {
        return domain("log_binomial_ln needs k much smaller than n");
    }
    // sum_{i<k} ln(n-i) = k ln n - sum i/n - ...; the first correction is k(k-1)/(2n)
    let correction = (kf * (kf - 1.0) / 2.0).max(0.0);
    let correction = if correction == 0.0 {
        0.0
    } else {
        (correction.ln() - ln_n).exp()
    };
    Ok(LogValue::from_ln(kf * ln_n - correction - ln_factorial(k)))
}

/// Strictly increasing list of vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KSubset {
    elements: Vec<usize>,
}

impl KSubset {
    pub fn new(elements: Vec<usize>, n: usize) -> Result<Self> {
        if !elements.windows(2).all(|w| w[0] < w[1]) {
            return domain(format!("subset {elements:?} is not strictly increasing"));
        }
        if let Some(&last) = elements.last() {
            if last >= n {
                return domain(format!("subset {elements:?} leaves [0,{n})"));
            }
        }
        Ok(KSubset { elements })
    }

    /// Sorts and deduplicates, then checks the range.
    pub fn from_unsorted(mut elements: Vec<usize>, n: usize) -> Result<Self> {
        elements.sort_unstable();
        let len = elements.len();
        elements.dedup();
        if elements.len() != len {
            return domain("subset has repeated elements");
        }
        KSubset::new(elements, n)
    }

    pub(crate) fn new_unchecked(elements: Vec<usize>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        KSubset { elements }
    }

    /// `{0, .., k-1}`, the colex-first `k`-set.
    pub fn initial(k: usize) -> Self {
        KSubset {
            elements: (0..k).collect(),
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<usize> {
        self.elements
    }

    pub fn k(&self) -> usize {
        self.elements.len()
    }

    pub fn max(&self) -> Option<usize> {
        self.elements.last().copied()
    }

    /// Bitmask of the elements; requires every element below 128.
    pub fn mask(&self) -> u128 {
        self.elements.iter().fold(0u128, |m, &v| {
            assert!(v < 128, "mask needs elements < 128");
            m | (1u128 << v)
        })
    }

    pub fn from_mask(mut mask: u128) -> Self {
        let mut elements = Vec::with_capacity(mask.count_ones() as usize);
        while mask != 0 {
            elements.push(mask.trailing_zeros() as usize);
            mask &= mask - 1;
        }
        KSubset { elements }
    }

    pub fn is_subset_of(&self, other: &KSubset) -> bool {
        let mut it = other.elements.iter();
        self.elements.iter().all(|x| it.by_ref().any(|y| y == x))
    }

    /// Advances to the colex successor inside `[0,n)`; false when `self` was last.
    pub fn advance(&mut self, n: usize) -> bool {
        next_colex(&mut self.elements, n)
    }
}

impl Ord for KSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.elements
            .len()
            .cmp(&other.elements.len())
            .then_with(|| self.elements.iter().rev().cmp(other.elements.iter().rev()))
    }
}

impl PartialOrd for KSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// In-place colex successor of a sorted `k`-subset of `[0,n)`.
pub fn next_colex(a: &mut [usize], n: usize) -> bool {
    let k = a.len();
    for i in 0..k {
        let limit = if i + 1 < k { a[i + 1] } else { n };
        if a[i] + 1 < limit {
            a[i] += 1;
            for (j, slot) in a.iter_mut().enumerate().take(i) {
                *slot = j;
            }
            return true;
        }
    }
    false
}

/// Colex rank: `sum_i C(a_i, i+1)` for `a_0 < a_1 < ...`.
pub fn rank_colex(s: &KSubset) -> BigCount {
    if s.max().is_none_or(|m| m < TABLE_N) {
        return BigCount::from_u128(rank_colex_small(s.elements()));
    }
    s.elements
        .iter()
        .enumerate()
        .map(|(i, &a)| binomial(a as u64, i as u64 + 1))
        .sum()
}

/// Colex rank for elements below 128.
pub fn rank_colex_small(elements: &[usize]) -> u128 {
    elements
        .iter()
        .enumerate()
        .map(|(i, &a)| binomial_small(a, i + 1))
        .sum()
}

/// Inverse of [`rank_colex`] over the `k`-subsets of `[0,n)`.
pub fn unrank_colex(index: &BigCount, k: usize, n: usize) -> Result<KSubset> {
    let total = binomial(n as u64, k as u64);
    if *index >= total {
        return domain(format!(
            "rank {index} out of range for C({n},{k}) = {total}"
        ));
    }
    if n <= TABLE_N {
        let idx = index.to_u128().expect("rank below C(128,k) fits u128");
        return Ok(KSubset::new_unchecked(unrank_colex_small(idx, k, n)));
    }
    let mut rest = index.clone();
    let mut elements = vec![0usize; k];
    let mut hi = n;
    for i in (1..=k).rev() {
        // largest a < hi with C(a, i) <= rest
        let (mut lo, mut top) = (i - 1, hi - 1);
        while lo < top {
            let mid = lo + (top - lo).div_ceil(2);
            if binomial(mid as u64, i as u64) <= rest {
                lo = mid;
            } else {
                top = mid - 1;
            }
        }
        elements[i - 1] = lo;
        rest = rest
            .checked_sub(&binomial(lo as u64, i as u64))
            .expect("binomial below remaining rank");
        hi = lo;
    }
    Ok(KSubset::new_unchecked(elements))
}

/// Unrank for `n <= 128`; `index` must be below `C(n,k)`.
pub fn unrank_colex_small(mut index: u128, k: usize, n: usize) -> Vec<usize> {
    let mut elements = vec![0usize; k];
    let mut a = n;
    for i in (1..=k).rev() {
        loop {
            a -= 1;
            let c = binomial_small(a, i);
            if c <= index {
                index -= c;
                elements[i - 1] = a;
                break;
            }
        }
    }
    elements
}

/// Colex stream of the `k`-subsets of `[0,n)`.
#[derive(Clone, Debug)]
pub struct SubsetIter {
    n: usize,
    current: Option<Vec<usize>>,
    remaining: Option<u128>,
}

impl Iterator for SubsetIter {
    type Item = KSubset;

    fn next(&mut self) -> Option<KSubset> {
        if self.remaining == Some(0) {
            return None;
        }
        let cur = self.current.as_mut()?;
        let out = KSubset::new_unchecked(cur.clone());
        if !next_colex(cur, self.n) {
            self.current = None;
        }
        if let Some(r) = self.remaining.as_mut() {
            *r -= 1;
        }
        Some(out)
    }
}

/// All `k`-subsets of `[0,n)` in colex order.
pub fn enumerate_subsets(n: usize, k: usize) -> SubsetIter {
    SubsetIter {
        n,
        current: (k <= n).then(|| (0..k).collect()),
        remaining: None,
    }
}

/// The `k`-subsets with colex ranks in `[start, start + len)`.
pub fn enumerate_rank_range(n: usize, k: usize, start: &BigCount, len: u128) -> Result<SubsetIter> {
    let first = unrank_colex(start, k, n)?;
    Ok(SubsetIter {
        n,
        current: Some(first.into_elements()),
        remaining: Some(len),
    })
}

/// Splits `[0,total)` into at most `parts` contiguous, nearly equal ranges.
pub fn split_ranks(total: u128, parts: usize) -> Vec<(u128, u128)> {
    let parts = (parts.max(1) as u128).min(total.max(1));
    let base = total / parts;
    let extra = total % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = 0u128;
    for i in 0..parts {
        let len = base + u128::from(i < extra);
        if len > 0 {
            out.push((start, len));
        }
        start += len;
    }
    out
}
