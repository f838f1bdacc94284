//! Uniform hypergraphs and the Turán-property verifier.

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    binomial, enumerate_rank_range, enumerate_subsets, rank_colex, split_ranks, unrank_colex,
    BigCount, KSubset,
};
use crate::error::{domain, Error, Result};

/// Edge masks are kept only while every vertex fits in a `u128`.
const MASK_LIMIT: usize = 128;

/// Default cap on the number of `s`-sets an exhaustive check may visit.
pub const DEFAULT_EXHAUSTIVE_BUDGET: u128 = 1_000_000_000;

/// Below this many `s`-sets the verifier stays on one thread.
const PARALLEL_THRESHOLD: u128 = 1 << 14;

/// An `r`-uniform hypergraph on `{0,..,n-1}` with edges in colex order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "SystemFile", try_from = "SystemFile")]
pub struct UniformHypergraph {
    n: usize,
    r: usize,
    edges: Vec<KSubset>,
    masks: Option<Vec<u128>>,
}

impl UniformHypergraph {
    /// Validates and sorts `edges`; duplicates are rejected.
    pub fn new(n: usize, r: usize, mut edges: Vec<KSubset>) -> Result<Self> {
        for e in &edges {
            if e.k() != r {
                return domain(format!(
                    "edge {:?} does not have {r} vertices",
                    e.elements()
                ));
            }
            if e.max().is_some_and(|m| m >= n) {
                return domain(format!("edge {:?} leaves [0,{n})", e.elements()));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return domain(format!("duplicate edge {:?}", w[0].elements()));
        }
        Ok(Self::from_sorted(n, r, edges))
    }

    /// Like [`new`](Self::new) but silently merges duplicate edges.
    pub fn from_edge_set(n: usize, r: usize, mut edges: Vec<KSubset>) -> Result<Self> {
        edges.sort_unstable();
        edges.dedup();
        Self::new(n, r, edges)
    }

    pub(crate) fn from_sorted(n: usize, r: usize, edges: Vec<KSubset>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let masks = (n <= MASK_LIMIT).then(|| edges.iter().map(KSubset::mask).collect());
        UniformHypergraph { n, r, edges, masks }
    }

    pub fn empty(n: usize, r: usize) -> Self {
        Self::from_sorted(n, r, Vec::new())
    }

    /// All `r`-subsets of `[0,n)`.
    pub fn complete(n: usize, r: usize) -> Self {
        Self::from_sorted(n, r, enumerate_subsets(n, r).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn edges(&self) -> &[KSubset] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn masks(&self) -> Option<&[u128]> {
        self.masks.as_deref()
    }

    /// Whether `e` is an edge.
    pub fn has_edge(&self, e: &KSubset) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    /// True iff some edge lies inside `set`.
    pub fn contains_edge(&self, set: &KSubset) -> Result<bool> {
        if set.max().is_some_and(|m| m >= self.n) {
            return domain(format!("set {:?} leaves [0,{})", set.elements(), self.n));
        }
        if set.k() < self.r {
            return Ok(false);
        }
        Ok(match &self.masks {
            Some(masks) => {
                let m = set.mask();
                masks.iter().any(|&e| e & !m == 0)
            }
            None => self.edges.iter().any(|e| e.is_subset_of(set)),
        })
    }

    /// Shifts every vertex by `offset` into a larger ground set of size `n`.
    pub fn shifted(&self, offset: usize, n: usize) -> Result<Self> {
        if self.n + offset > n {
            return domain("shift leaves the ground set");
        }
        let edges = self
            .edges
            .iter()
            .map(|e| KSubset::new_unchecked(e.elements().iter().map(|v| v + offset).collect()))
            .collect();
        // colex order is preserved by translation
        Ok(Self::from_sorted(n, self.r, edges))
    }

    pub fn to_file(&self) -> SystemFile {
        SystemFile {
            n: self.n,
            r: self.r,
            edges: self.edges.iter().map(|e| e.elements().to_vec()).collect(),
        }
    }

    pub fn from_file(file: SystemFile) -> Result<Self> {
        let edges = file
            .edges
            .into_iter()
            .map(|e| KSubset::new(e, file.n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.n, file.r, edges)
    }

    /// Canonical JSON: `{"n":..,"r":..,"edges":[[..],..]}` with edges in colex order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("system file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SystemFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    /// Plain text: a `# n=<n> r=<r>` header, then one edge per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("# n={} r={}\n", self.n, self.r);
        for e in &self.edges {
            let line: Vec<String> = e.elements().iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty system file".into()))?;
        let (n, r) = parse_header(header)?;
        let mut edges = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let verts = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?;
            edges.push(KSubset::new(verts, n)?);
        }
        Self::new(n, r, edges)
    }
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse(format!("missing '# n=.. r=..' header, got {line:?}")))?;
    let (mut n, mut r) = (None, None);
    for tok in body.split_whitespace() {
        match tok.split_once('=') {
            Some(("n", v)) => n = v.parse().ok(),
            Some(("r", v)) => r = v.parse().ok(),
            _ => {}
        }
    }
    match (n, r) {
        (Some(n), Some(r)) => Ok((n, r)),
        _ => Err(Error::Parse(format!("bad header {line:?}"))),
    }
}

impl From<UniformHypergraph> for SystemFile {
    fn from(h: UniformHypergraph) -> Self {
        h.to_file()
    }
}

impl TryFrom<SystemFile> for UniformHypergraph {
    type Error = Error;
    fn try_from(file: SystemFile) -> Result<Self> {
        UniformHypergraph::from_file(file)
    }
}

/// On-disk form of a system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemFile {
    pub n: usize,
    pub r: usize,
    pub edges: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMode {
    Exhaustive,
    Sampled,
}

/// Outcome of a Turán-property check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub is_turan: bool,
    pub n: usize,
    pub s: usize,
    pub r: usize,
    /// An `s`-set containing no edge; colex-least in exhaustive mode.
    pub witness: Option<KSubset>,
    pub sets_checked: BigCount,
    pub mode: VerifyMode,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

fn check_verify_args(h: &UniformHypergraph, s: usize) -> Result<()> {
    if !(h.r < s && s <= h.n) {
        return domain(format!(
            "verification needs r < s <= n, got r={}, s={s}, n={}",
            h.r, h.n
        ));
    }
    Ok(())
}

/// Exhaustive check with the default budget of 10^9 `s`-sets.
pub fn is_turan_system(h: &UniformHypergraph, s: usize) -> Result<VerifyReport> {
    is_turan_system_with_budget(h, s, DEFAULT_EXHAUSTIVE_BUDGET)
}

/// Checks every `s`-set in colex order; the witness is the colex-least uncovered set
/// regardless of how the rank range is split across threads.
pub fn is_turan_system_with_budget(
    h: &UniformHypergraph,
    s: usize,
    budget: u128,
) -> Result<VerifyReport> {
    check_verify_args(h, s)?;
    let total_big = binomial(h.n as u64, s as u64);
    let total = match total_big.to_u128() {
        Some(t) if t <= budget => t,
        _ => {
            return Err(Error::Budget {
                what: format!("exhaustive check of C({},{}) sets", h.n, s),
                required: total_big,
                budget: BigCount::from_u128(budget),
            })
        }
    };
    let checker = CoverChecker::new(h, s);
    let first_bad = if total < PARALLEL_THRESHOLD {
        checker.first_uncovered(enumerate_subsets(h.n, s))
    } else {
        let ranges = split_ranks(total, rayon::current_num_threads() * 16);
        let best_chunk = AtomicUsize::new(usize::MAX);
        ranges
            .par_iter()
            .enumerate()
            .filter_map(|(idx, &(start, len))| {
                if idx > best_chunk.load(Ordering::Relaxed) {
                    return None;
                }
                let iter = enumerate_rank_range(h.n, s, &BigCount::from_u128(start), len)
                    .expect("range inside [0, C(n,s))");
                let found = checker.first_uncovered(iter);
                if found.is_some() {
                    best_chunk.fetch_min(idx, Ordering::Relaxed);
                }
                found.map(|w| (idx, w))
            })
            .min_by_key(|(idx, _)| *idx)
            .map(|(_, w)| w)
    };
    let sets_checked = match &first_bad {
        Some(w) => &rank_colex(w) + &BigCount::one(),
        None => total_big,
    };
    Ok(VerifyReport {
        is_turan: first_bad.is_none(),
        n: h.n,
        s,
        r: h.r,
        witness: first_bad,
        sets_checked,
        mode: VerifyMode::Exhaustive,
        trials: None,
        seed: None,
    })
}

/// Monte Carlo screen: `trials` uniform `s`-sets drawn by unranking uniform ranks.
pub fn sample_verify(
    h: &UniformHypergraph,
    s: usize,
    trials: u64,
    seed: u64,
) -> Result<VerifyReport> {
    check_verify_args(h, s)?;
    if trials == 0 {
        return domain("sample_verify needs at least one trial");
    }
    let total = binomial(h.n as u64, s as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checker = CoverChecker::new(h, s);
    let mut witness = None;
    let mut checked = 0u64;
    for _ in 0..trials {
        checked += 1;
        let rank = uniform_below(&mut rng, &total);
        let set = unrank_colex(&rank, s, h.n)?;
        if !checker.covers(&set) {
            witness = Some(set);
            break;
        }
    }
    Ok(VerifyReport {
        is_turan: witness.is_none(),
        n: h.n,
        s,
        r: h.r,
        witness,
        sets_checked: BigCount::from_u64(checked),
        mode: VerifyMode::Sampled,
        trials: Some(trials),
        seed: Some(seed),
    })
}

/// Uniform integer in `[0, bound)` by rejection on the bit length of `bound`.
pub(crate) fn uniform_below<R: Rng>(rng: &mut R, bound: &BigCount) -> BigCount {
    assert!(!bound.is_zero(), "empty range");
    if let Some(b) = bound.to_u128() {
        return BigCount::from_u128(rng.random_range(0..b));
    }
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let top_mask = if bits.is_multiple_of(8) {
        0xff
    } else {
        (1u8 << (bits % 8)) - 1
    };
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill(&mut buf[..]);
        buf[bytes - 1] &= top_mask;
        let v = BigCount::from_biguint(num_bigint::BigUint::from_bytes_le(&buf));
        if v < *bound {
            return v;
        }
    }
}

/// Picks the cheaper covering test for a given `(H, s)`.
struct CoverChecker<'a> {
    h: &'a UniformHypergraph,
    lookup: Option<HashSet<u128>>,
    subset_patterns: Vec<Vec<usize>>,
}

impl<'a> CoverChecker<'a> {
    fn new(h: &'a UniformHypergraph, s: usize) -> Self {
        let inner = binomial(s as u64, h.r as u64)
            .to_u128()
            .unwrap_or(u128::MAX);
        let use_lookup = h.masks.is_some() && inner < h.edges.len() as u128;
        let (lookup, subset_patterns) = if use_lookup {
            let set: HashSet<u128> = h.masks.as_ref().unwrap().iter().copied().collect();
            let patterns = enumerate_subsets(s, h.r)
                .map(KSubset::into_elements)
                .collect();
            (Some(set), patterns)
        } else {
            (None, Vec::new())
        };
        CoverChecker {
            h,
            lookup,
            subset_patterns,
        }
    }

    fn covers(&self, set: &KSubset) -> bool {
        if let Some(lookup) = &self.lookup {
            let el = set.elements();
            return self.subset_patterns.iter().any(|pat| {
                let m = pat.iter().fold(0u128, |m, &i| m | (1u128 << el[i]));
                lookup.contains(&m)
            });
        }
        match &self.h.masks {
            Some(masks) => {
                let m = set.mask();
                masks.iter().any(|&e| e & !m == 0)
            }
            None => self.h.edges.iter().any(|e| e.is_subset_of(set)),
        }
    }

    fn first_uncovered(&self, iter: impl Iterator<Item = KSubset>) -> Option<KSubset> {
        iter.into_iter().find(|set| !self.covers(set))
    }
}

/// Edge density as an exact fraction and as a float.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub numerator: BigCount,
    pub denominator: BigCount,
    pub value: f64,
}

pub fn density(h: &UniformHypergraph) -> Density {
    let numerator = BigCount::from_u64(h.len() as u64);
    let denominator = binomial(h.n as u64, h.r as u64);
    let value = numerator.ratio_f64(&denominator);
    Density {
        numerator,
        denominator,
        value,
    }
}
