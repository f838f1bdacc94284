//! Exact `T(n,s,r)` by branch and bound over covers of the `s`-sets by `r`-sets,
//! a closed form for `r = 2`, and a JSON cache of proven values.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    binomial_small, enumerate_subsets, rank_colex_small, BigCount, KSubset,
};
use crate::constructions::trivial_prefix_system;
use crate::error::{domain, Error, Result};
use crate::hypergraph::{is_turan_system, UniformHypergraph};

/// Largest number of `s`-sets the solver will index.
pub const MAX_S_SETS: u128 = 1 << 16;

/// Default node budget for one solve.
pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub n: usize,
    pub s: usize,
    pub r: usize,
    pub optimum: usize,
    pub witness: UniformHypergraph,
    pub nodes_explored: u64,
    pub proven_optimal: bool,
    pub budget_exhausted: bool,
}

struct Instance {
    words: usize,
    /// `s`-sets containing each `r`-set, as bitsets over `s`-set ranks.
    cover: Vec<Vec<u64>>,
    /// `r`-set ranks inside each `s`-set, in colex order.
    inside: Vec<Vec<u32>>,
    max_cover: usize,
}

impl Instance {
    fn new(n: usize, s: usize, r: usize) -> Self {
        let m = binomial_small(n, s) as usize;
        let words = m.div_ceil(64);
        let mut cover = vec![vec![0u64; words]; binomial_small(n, r) as usize];
        let patterns: Vec<Vec<usize>> = enumerate_subsets(s, r)
            .map(KSubset::into_elements)
            .collect();
        let mut inside = Vec::with_capacity(m);
        let mut sub = Vec::with_capacity(r);
        for (i, set) in enumerate_subsets(n, s).enumerate() {
            let el = set.elements();
            let ranks: Vec<u32> = patterns
                .iter()
                .map(|pat| {
                    sub.clear();
                    sub.extend(pat.iter().map(|&p| el[p]));
                    rank_colex_small(&sub) as u32
                })
                .collect();
            for &j in &ranks {
                cover[j as usize][i / 64] |= 1 << (i % 64);
            }
            inside.push(ranks);
        }
        Instance {
            words,
            cover,
            inside,
            max_cover: binomial_small(n - r, s - r) as usize,
        }
    }
}

struct Search<'a> {
    inst: &'a Instance,
    best: usize,
    best_edges: Option<Vec<u32>>,
    chosen: Vec<u32>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    /// Scratch marks for the packing bound, stamped per call.
    used: Vec<u32>,
    stamp: u32,
}

impl Search<'_> {
    /// Uncovered `s`-sets pairwise sharing no `r`-subset each need their own edge.
    fn packing_bound(&mut self, uncovered: &[u64]) -> usize {
        self.stamp += 1;
        let mut count = 0;
        for (w, &word) in uncovered.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let i = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let ranks = &self.inst.inside[i];
                if ranks.iter().all(|&j| self.used[j as usize] != self.stamp) {
                    count += 1;
                    for &j in ranks {
                        self.used[j as usize] = self.stamp;
                    }
                }
            }
        }
        count
    }

    fn dfs(&mut self, uncovered: &mut [u64], root: bool) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let Some(first) = uncovered
            .iter()
            .position(|&w| w != 0)
            .map(|w| w * 64 + uncovered[w].trailing_zeros() as usize)
        else {
            if self.chosen.len() < self.best {
                self.best = self.chosen.len();
                self.best_edges = Some(self.chosen.clone());
            }
            return;
        };
        let remaining: usize = uncovered.iter().map(|w| w.count_ones() as usize).sum();
        let lb = remaining
            .div_ceil(self.inst.max_cover)
            .max(self.packing_bound(uncovered));
        if self.chosen.len() + lb >= self.best {
            return;
        }
        // every r-subset of the first s-set is equivalent to {0..r-1} at the root
        let children: Vec<u32> = if root {
            vec![self.inst.inside[first][0]]
        } else {
            self.inst.inside[first].clone()
        };
        let mut child = vec![0u64; self.inst.words];
        for j in children {
            let cov = &self.inst.cover[j as usize];
            for (c, (u, m)) in child.iter_mut().zip(uncovered.iter().zip(cov)) {
                *c = u & !m;
            }
            self.chosen.push(j);
            self.dfs(&mut child, false);
            self.chosen.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

/// Minimum Turán `(n,s,r)`-system. Returns the best system found with
/// `proven_optimal = false` when `max_nodes` runs out.
pub fn solve_min_turan(n: usize, s: usize, r: usize, max_nodes: u64) -> Result<SolveResult> {
    if !(1 <= r && r < s && s <= n) {
        return domain(format!("solver needs 1 <= r < s <= n, got ({n},{s},{r})"));
    }
    let s_sets = if n <= 128 {
        binomial_small(n, s)
    } else {
        u128::MAX
    };
    if s_sets > MAX_S_SETS || binomial_small(n, r) > MAX_S_SETS {
        return Err(Error::Budget {
            what: format!("solver indexing C({n},{s}) s-sets"),
            required: crate::combinatorics::binomial(n as u64, s as u64),
            budget: BigCount::from_u128(MAX_S_SETS),
        });
    }
    let inst = Instance::new(n, s, r);
    let incumbent = trivial_prefix_system(n, s, r)?;
    let mut search = Search {
        inst: &inst,
        best: incumbent.len(),
        best_edges: None,
        chosen: Vec::new(),
        nodes: 0,
        budget: max_nodes,
        exhausted: false,
        used: vec![0; inst.cover.len()],
        stamp: 0,
    };
    let m = s_sets as usize;
    let mut uncovered = vec![u64::MAX; inst.words];
    if !m.is_multiple_of(64) {
        uncovered[inst.words - 1] = (1u64 << (m % 64)) - 1;
    }
    search.dfs(&mut uncovered, true);

    let witness = match &search.best_edges {
        Some(ranks) => {
            let all: Vec<KSubset> = enumerate_subsets(n, r).collect();
            let edges = ranks.iter().map(|&j| all[j as usize].clone()).collect();
            UniformHypergraph::new(n, r, edges)?
        }
        None => incumbent,
    };
    Ok(SolveResult {
        n,
        s,
        r,
        optimum: witness.len(),
        witness,
        nodes_explored: search.nodes,
        proven_optimal: !search.exhausted,
        budget_exhausted: search.exhausted,
    })
}

/// `C(n,2) - ex(n, K_s)` with `ex` the edge count of the balanced `(s-1)`-partite graph.
pub fn turan_r2_value(n: u64, s: u64) -> Result<u64> {
    if !(2 < s && s <= n) {
        return domain(format!("r = 2 formula needs 2 < s <= n, got n={n}, s={s}"));
    }
    let parts = s - 1;
    let (q, rem) = (n / parts, n % parts);
    let squares = rem * (q + 1) * (q + 1) + (parts - rem) * q * q;
    let ex = (n * n - squares) / 2;
    Ok(n * (n - 1) / 2 - ex)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub optimum: usize,
    pub edges: Vec<Vec<usize>>,
    /// Seconds since the Unix epoch.
    pub verified_at: u64,
}

/// Proven optima keyed by `"n,s,r"`. Entries are re-verified before use.
#[derive(Clone, Debug, Default)]
pub struct ValueCache {
    path: Option<PathBuf>,
    entries: BTreeMap<String, CacheEntry>,
}

fn key(n: usize, s: usize, r: usize) -> String {
    format!("{n},{s},{r}")
}

impl ValueCache {
    /// Path from `TURAN_CACHE`, else `.turan-cache.json`.
    pub fn default_path() -> PathBuf {
        std::env::var_os("TURAN_CACHE")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".turan-cache.json"))
    }

    pub fn in_memory() -> Self {
        ValueCache::default()
    }

    /// Loads the cache; a missing file gives an empty cache and a corrupt one is
    /// ignored with a warning.
    pub fn load(path: impl AsRef<Path>) -> Self {
        let path = path.as_ref().to_path_buf();
        let entries = match std::fs::read_to_string(&path) {
            Ok(text) => match serde_json::from_str(&text) {
                Ok(entries) => entries,
                Err(e) => {
                    log::warn!("ignoring corrupt cache {}: {e}", path.display());
                    BTreeMap::new()
                }
            },
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => {
                log::warn!("ignoring unreadable cache {}: {e}", path.display());
                BTreeMap::new()
            }
        };
        ValueCache {
            path: Some(path),
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// A cached optimum whose witness still verifies.
    pub fn get(&self, n: usize, s: usize, r: usize) -> Option<SolveResult> {
        let entry = self.entries.get(&key(n, s, r))?;
        let check = || -> Result<Option<UniformHypergraph>> {
            let edges = entry
                .edges
                .iter()
                .map(|e| KSubset::new(e.clone(), n))
                .collect::<Result<Vec<_>>>()?;
            let h = UniformHypergraph::new(n, r, edges)?;
            let ok = h.len() == entry.optimum
                && entry.edges.iter().all(|e| e.len() == r)
                && is_turan_system(&h, s)?.is_turan;
            Ok(ok.then_some(h))
        };
        match check() {
            Ok(Some(witness)) => Some(SolveResult {
                n,
                s,
                r,
                optimum: entry.optimum,
                witness,
                nodes_explored: 0,
                proven_optimal: true,
                budget_exhausted: false,
            }),
            Ok(None) | Err(_) => {
                log::warn!("cached witness for ({n},{s},{r}) failed re-verification; ignoring it");
                None
            }
        }
    }

    /// Records a proven optimum; other results are not cached.
    pub fn insert(&mut self, result: &SolveResult) {
        if !result.proven_optimal {
            return;
        }
        let verified_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        self.entries.insert(
            key(result.n, result.s, result.r),
            CacheEntry {
                optimum: result.optimum,
                edges: result
                    .witness
                    .edges()
                    .iter()
                    .map(|e| e.elements().to_vec())
                    .collect(),
                verified_at,
            },
        );
    }

    /// Writes the cache back to its file, if it has one.
    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_string_pretty(&self.entries)?)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Cache hit, or a fresh solve that is recorded when proven.
    pub fn solve(&mut self, n: usize, s: usize, r: usize, max_nodes: u64) -> Result<SolveResult> {
        if let Some(hit) = self.get(n, s, r) {
            return Ok(hit);
        }
        let result = solve_min_turan(n, s, r, max_nodes)?;
        self.insert(&result);
        Ok(result)
    }

    #[cfg(test)]
    fn entry_mut(&mut self, n: usize, s: usize, r: usize) -> Option<&mut CacheEntry> {
        self.entries.get_mut(&key(n, s, r))
    }
}

/// Base supplier returning optimal systems, memoized per instance. Falls back to the
/// prefix system when a solve is not proven within `max_nodes`.
pub fn exact_supplier(
    max_nodes: u64,
) -> impl Fn(usize, usize, usize) -> Result<UniformHypergraph> + Sync {
    let memo: Mutex<HashMap<(usize, usize, usize), UniformHypergraph>> = Mutex::new(HashMap::new());
    move |n, s, r| {
        if n < s {
            return Ok(UniformHypergraph::empty(n, r));
        }
        if let Some(h) = memo.lock().expect("memo lock").get(&(n, s, r)) {
            return Ok(h.clone());
        }
        let h = solve_min_turan(n, s, r, max_nodes)?.witness;
        memo.lock().expect("memo lock").insert((n, s, r), h.clone());
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::counting_lower_T;

    fn optimum(n: usize, s: usize, r: usize) -> SolveResult {
        let res = solve_min_turan(n, s, r, DEFAULT_NODE_BUDGET).unwrap();
        assert!(res.proven_optimal);
        assert!(is_turan_system(&res.witness, s).unwrap().is_turan);
        assert_eq!(res.witness.len(), res.optimum);
        res
    }

    /// Smallest cover by trying every edge set in order of size.
    fn brute_force(n: usize, s: usize, r: usize) -> usize {
        let all: Vec<KSubset> = enumerate_subsets(n, r).collect();
        for size in 0..=all.len() {
            for pick in enumerate_subsets(all.len(), size) {
                let edges = pick.elements().iter().map(|&i| all[i].clone()).collect();
                let h = UniformHypergraph::new(n, r, edges).unwrap();
                if is_turan_system(&h, s).unwrap().is_turan {
                    return size;
                }
            }
        }
        unreachable!("the complete system is Turán")
    }

    #[test]
    fn small_optima() {
        assert_eq!(optimum(5, 5, 3).optimum, 1);
        assert_eq!(optimum(4, 3, 2).optimum, 2);
        assert_eq!(optimum(5, 3, 2).optimum, 4);
        assert_eq!(optimum(5, 4, 3).optimum, 3);
    }

    #[test]
    fn agrees_with_brute_force() {
        for &(n, s, r) in &[
            (4, 3, 2),
            (5, 3, 2),
            (5, 4, 3),
            (5, 4, 2),
            (6, 5, 3),
            (5, 3, 1),
        ] {
            assert_eq!(
                optimum(n, s, r).optimum,
                brute_force(n, s, r),
                "({n},{s},{r})"
            );
        }
    }

    #[test]
    fn r2_formula() {
        assert_eq!(turan_r2_value(4, 3).unwrap(), 2);
        assert_eq!(turan_r2_value(5, 3).unwrap(), 4);
        assert_eq!(turan_r2_value(7, 7).unwrap(), 1);
        assert!(turan_r2_value(4, 2).is_err());
        for n in 3..=7 {
            for s in 3..=n {
                let res = optimum(n, s, 2);
                assert_eq!(
                    res.optimum as u64,
                    turan_r2_value(n as u64, s as u64).unwrap()
                );
            }
        }
    }

    #[test]
    fn sandwich() {
        for &(n, s, r) in &[(6, 4, 3), (6, 5, 3), (7, 5, 4), (6, 4, 2)] {
            let res = optimum(n, s, r);
            let lo = counting_lower_T(n as u64, s as u64, r as u64).unwrap();
            assert!(BigCount::from_u64(res.optimum as u64) >= lo);
            assert!(res.optimum <= binomial_small(n - s + r, r) as usize);
        }
    }

    #[test]
    fn budget_exhaustion_keeps_incumbent() {
        let res = solve_min_turan(7, 4, 3, 5).unwrap();
        assert!(res.budget_exhausted && !res.proven_optimal);
        assert!(is_turan_system(&res.witness, 4).unwrap().is_turan);
    }

    #[test]
    fn deterministic() {
        let a = solve_min_turan(6, 4, 3, DEFAULT_NODE_BUDGET).unwrap();
        let b = solve_min_turan(6, 4, 3, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cache_round_trip_and_tamper() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let mut cache = ValueCache::load(&path);
        assert!(cache.is_empty());
        let res = cache.solve(4, 3, 2, DEFAULT_NODE_BUDGET).unwrap();
        cache.save().unwrap();

        let mut reloaded = ValueCache::load(&path);
        let hit = reloaded.get(4, 3, 2).unwrap();
        assert_eq!((hit.optimum, &hit.witness), (res.optimum, &res.witness));

        reloaded.entry_mut(4, 3, 2).unwrap().edges = vec![vec![0, 1], vec![1, 2]];
        assert!(reloaded.get(4, 3, 2).is_none());
        reloaded.entry_mut(4, 3, 2).unwrap().edges = vec![vec![0, 9]];
        assert!(reloaded.get(4, 3, 2).is_none());

        std::fs::write(&path, "{not json").unwrap();
        assert!(ValueCache::load(&path).is_empty());
    }

    #[test]
    fn supplier_memoizes() {
        let supply = exact_supplier(DEFAULT_NODE_BUDGET);
        let a = supply(5, 4, 3).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(supply(5, 4, 3).unwrap(), a);
        assert!(supply(3, 4, 3).unwrap().is_empty());
    }
}
