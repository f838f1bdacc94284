//! Randomized and explicit Turán-system constructions.
//!
//! * [`trivial_prefix_system`]: every `r`-set inside the first `n-s+r` vertices.
//! * [`paper_parameters`] / [`lll_condition`]: the Frankl–Rödl colouring parameters
//!   and the Local Lemma arithmetic behind them, valid at any scale.
//! * [`frankl_rodl_color`]: Moser–Tardos resampling for an `ell`-colouring of the
//!   `r`-sets of `[N]` in which every `s`-set sees every colour.
//! * [`blowup`]: `m` clones per vertex plus every `r`-set meeting a clone class twice.
//! * [`recursive_system`]: the initial-segment recursion `G = S* ∪ T*`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    binomial, binomial_big, binomial_small, enumerate_subsets, log_binomial, log_binomial_count,
    log_binomial_ln, rank_colex_small, ArithPath, BigCount, KSubset, LogValue, Magnitude,
    EXACT_N_LIMIT,
};
use crate::error::{domain, Error, Result};
use crate::hypergraph::UniformHypergraph;

/// Bit size above which `C(s,R)` is no longer materialized exactly.
const EXACT_BINOMIAL_BITS: f64 = (1u64 << 22) as f64;

/// Bit size above which `C(N-s,R)` and the dependency degree switch to log space.
const EXACT_DELTA_BITS: u64 = 1 << 16;

/// Default cap on the number of `r`-sets a construction may materialize.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 24;

/// Relative slack used to bracket floors of quotients by `f64` logarithms.
const FLOOR_SLACK: f64 = 1e-12;

/// All `r`-subsets of `{0,..,n-s+r-1}`. Any `s`-set has at least `r` vertices there.
pub fn trivial_prefix_system(n: usize, s: usize, r: usize) -> Result<UniformHypergraph> {
    if !(r < s && s <= n) {
        return domain(format!("prefix system needs r < s <= n, got ({n},{s},{r})"));
    }
    let prefix = n - (s - r);
    let edges = enumerate_subsets(prefix, r).collect();
    Ok(UniformHypergraph::from_sorted(n, r, edges))
}

/// The colouring parameters `N = floor(r(r-1) C(s,R) / (2R))` and
/// `ell = floor(C(s,R) / ln(C(s,R)^2 C(N-s,R)))` with `s = r + R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaperParameters {
    pub r: u64,
    pub big_r: u64,
    pub s: u64,
    pub binom_s_r: Magnitude,
    pub n_vertices: Magnitude,
    /// `ln(C(s,R)^2 C(N-s,R))`, the denominator in `ell`.
    pub log_argument: f64,
    pub ell: Magnitude,
    pub path: ArithPath,
    /// `ell < 1` or `N <= s`: the colouring is vacuous.
    pub degenerate: bool,
}

impl PaperParameters {
    /// Number of colours actually usable, at least one.
    pub fn effective_ell(&self) -> Magnitude {
        match &self.ell {
            Magnitude::Exact(e) if e.is_zero() => Magnitude::Exact(BigCount::one()),
            other => other.clone(),
        }
    }
}

/// `C(n,k)`, exact when its size is moderate and in log space otherwise.
pub fn binomial_magnitude(n: u64, k: u64) -> Result<Magnitude> {
    let ln = log_binomial(n, k)?;
    if ln.ln() / std::f64::consts::LN_2 <= EXACT_BINOMIAL_BITS {
        Ok(Magnitude::Exact(binomial(n, k)))
    } else {
        Ok(Magnitude::Log(ln))
    }
}

/// `ln C(m, k)` for `m = N - s` given either exactly or by its logarithm.
fn log_binomial_magnitude(m: &Magnitude, k: u64) -> Result<LogValue> {
    match m {
        Magnitude::Exact(c) => log_binomial_count(c, k),
        Magnitude::Log(v) => log_binomial_ln(v.ln(), k),
    }
}

/// `N - s`, exact or via `ln(N) + ln(1 - s/N)`.
fn minus_small(n: &Magnitude, s: u64) -> Magnitude {
    match n {
        Magnitude::Exact(c) => Magnitude::Exact(
            c.checked_sub(&BigCount::from_u64(s))
                .unwrap_or_else(BigCount::zero),
        ),
        Magnitude::Log(v) => {
            let frac = ((s as f64).ln() - v.ln()).exp();
            Magnitude::Log(LogValue::from_ln(v.ln() + (-frac).ln_1p()))
        }
    }
}

/// Floor of `num / x` for a real `x`, exact when the result is below `2^50`.
fn floor_quotient(num: &Magnitude, x: f64, label: &str) -> Result<Magnitude> {
    let ln_q = num.ln() - x.ln();
    if ln_q < 50.0 * std::f64::consts::LN_2 {
        let exact_num = match num {
            Magnitude::Exact(c) => c.clone(),
            Magnitude::Log(_) => return Err(Error::UnresolvedFloor(label.into())),
        };
        let lo = exact_num.div_floor_f64(x * (1.0 + FLOOR_SLACK))?;
        let hi = exact_num.div_floor_f64(x * (1.0 - FLOOR_SLACK))?;
        if lo != hi {
            return Err(Error::UnresolvedFloor(label.into()));
        }
        return Ok(Magnitude::Exact(lo));
    }
    // beyond 2^50 the floor moves the value by less than one part in 2^50
    match num {
        Magnitude::Exact(c) => Ok(Magnitude::Exact(c.div_floor_f64(x)?)),
        Magnitude::Log(_) => Ok(Magnitude::Log(LogValue::from_ln(ln_q))),
    }
}

pub fn paper_parameters(r: u64, big_r: u64) -> Result<PaperParameters> {
    if big_r < 1 || r < 2 {
        return domain(format!(
            "paper parameters need R >= 1 and r >= 2, got r={r}, R={big_r}"
        ));
    }
    let s = r + big_r;
    let binom_s_r = binomial_magnitude(s, big_r)?;
    let n_vertices = match &binom_s_r {
        Magnitude::Exact(c) => {
            let num = &BigCount::from_u64(r * (r - 1)) * c;
            Magnitude::Exact(num.div_floor(&BigCount::from_u64(2 * big_r)))
        }
        Magnitude::Log(v) => Magnitude::Log(LogValue::from_ln(
            ((r * (r - 1)) as f64).ln() + v.ln() - ((2 * big_r) as f64).ln(),
        )),
    };
    let choice = ell_for_vertices(&binom_s_r, &n_vertices, s, big_r)?;
    Ok(PaperParameters {
        r,
        big_r,
        s,
        binom_s_r,
        n_vertices,
        log_argument: choice.log_argument,
        ell: choice.ell,
        path: choice.path,
        degenerate: choice.degenerate,
    })
}

/// `ell = floor(C(s,R) / ln(C(s,R)^2 C(N-s,R)))` for a given vertex count `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllChoice {
    pub log_argument: f64,
    pub ell: Magnitude,
    pub path: ArithPath,
    pub degenerate: bool,
}

pub fn ell_for_vertices(
    binom_s_r: &Magnitude,
    n_vertices: &Magnitude,
    s: u64,
    big_r: u64,
) -> Result<EllChoice> {
    let rest = minus_small(n_vertices, s);
    let exact_rest = rest
        .exact()
        .filter(|c| c.bits().saturating_mul(big_r) <= EXACT_DELTA_BITS);
    let log_argument = match (exact_rest, binom_s_r) {
        (Some(rest), Magnitude::Exact(c)) => {
            let x = &(c * c) * &binomial_big(rest, big_r);
            x.ln()
        }
        _ => {
            let tail = if rest.exact().is_some_and(BigCount::is_zero) {
                LogValue::zero()
            } else {
                log_binomial_magnitude(&rest, big_r)?
            };
            2.0 * binom_s_r.ln() + tail.ln()
        }
    };
    let n_le_s = match n_vertices {
        Magnitude::Exact(c) => *c <= BigCount::from_u64(s),
        Magnitude::Log(_) => false,
    };
    let (ell, degenerate) = if n_le_s || !(log_argument > 0.0) {
        (Magnitude::Exact(BigCount::zero()), true)
    } else {
        let ell = floor_quotient(binom_s_r, log_argument, "ell")?;
        let zero = ell.exact().is_some_and(BigCount::is_zero);
        (ell, zero)
    };
    let path = if binom_s_r.path() == ArithPath::Exact
        && exact_rest.is_some()
        && ell.path() == ArithPath::Exact
    {
        ArithPath::Exact
    } else {
        ArithPath::LogSpace
    };
    Ok(EllChoice {
        log_argument,
        ell,
        path,
        degenerate,
    })
}

/// Local Lemma arithmetic for the colouring of `C([N], r)` with `ell` colours.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LllCertificate {
    pub n_vertices: Magnitude,
    pub s: u64,
    pub r: u64,
    pub big_r: u64,
    pub ell: Magnitude,
    /// `ln` of the bad-event bound `ell (1 - 1/ell)^{C(s,R)}`.
    pub log_p_bound: LogValue,
    /// Dependency degree `sum_{i=r}^{s} C(s,i) C(N-s,s-i)`, summed in log space.
    pub log_delta: LogValue,
    pub delta_exact: Option<BigCount>,
    /// `2 C(s,R) C(N-s,R)`.
    pub log_delta_upper: LogValue,
    /// `3 <= R <= s/2` and `N >= C(s,3)`, under which the upper bound applies.
    pub delta_upper_valid: bool,
    pub delta_upper_holds: Option<bool>,
    /// `e p Delta < 1`.
    pub condition_holds: bool,
    /// `exp(C(s,R)/ell) > e ell Delta`.
    pub paper_condition_holds: bool,
    /// The same with `Delta` replaced by its upper bound.
    pub paper_condition_with_upper_holds: bool,
    pub path: ArithPath,
}

/// Ratios of consecutive terms of the dependency-degree sum,
/// `(s-i)^2 / ((i+1)(N-2s+i+1))` for `i = r..s-1`.
pub fn delta_term_ratios(n_vertices: &BigCount, s: u64, r: u64) -> Result<Vec<f64>> {
    if n_vertices < &BigCount::from_u64(2 * s) {
        return domain("term ratios need N >= 2s");
    }
    let base = n_vertices
        .checked_sub(&BigCount::from_u64(2 * s))
        .expect("N >= 2s");
    Ok((r..s)
        .map(|i| {
            let num = BigCount::from_u64((s - i) * (s - i));
            let den = &BigCount::from_u64(i + 1) * &(&base + &BigCount::from_u64(i + 1));
            num.ratio_f64(&den)
        })
        .collect())
}

pub fn lll_condition(
    n_vertices: &Magnitude,
    s: u64,
    r: u64,
    ell: &Magnitude,
) -> Result<LllCertificate> {
    if !(r < s) {
        return domain(format!("LLL condition needs r < s, got r={r}, s={s}"));
    }
    if let Magnitude::Exact(n) = n_vertices {
        if *n < BigCount::from_u64(s) {
            return domain("LLL condition needs s <= N");
        }
    }
    if ell.ln() < 0.0 || ell.exact().is_some_and(BigCount::is_zero) {
        return domain("LLL condition needs ell >= 1");
    }
    let big_r = s - r;
    let binom_s_r = binomial_magnitude(s, big_r)?;
    let rest = minus_small(n_vertices, s);

    // Log-space sum, accumulated incrementally over j = s - i = 0..=R.
    let ln_rest_minus = |j: u64| -> f64 {
        match &rest {
            Magnitude::Exact(c) => match c.to_u64() {
                Some(m) => ((m - j) as f64).ln(),
                None => c.ln() + (-((j as f64).ln() - c.ln()).exp()).ln_1p(),
            },
            Magnitude::Log(v) => v.ln() + (-((j as f64).ln() - v.ln()).exp()).ln_1p(),
        }
    };
    let rest_small = rest.exact().and_then(BigCount::to_u64);
    let mut terms = Vec::with_capacity(big_r as usize + 1);
    let mut ln_c_s_i = 0.0; // ln C(s, s)
    let mut ln_c_rest_j = 0.0; // ln C(N-s, 0)
    for j in 0..=big_r {
        let i = s - j;
        if j > 0 {
            ln_c_s_i += ((i + 1) as f64).ln() - ((s - i) as f64).ln();
            if rest_small.is_some_and(|m| m < j) {
                ln_c_rest_j = f64::NEG_INFINITY;
            } else {
                ln_c_rest_j += ln_rest_minus(j - 1) - (j as f64).ln();
            }
        }
        terms.push(LogValue::from_ln(ln_c_s_i + ln_c_rest_j));
    }
    let log_delta = LogValue::sum(terms);

    let exact_rest = rest
        .exact()
        .filter(|c| c.bits().saturating_mul(big_r) <= EXACT_DELTA_BITS && s <= 4 * EXACT_N_LIMIT);
    let delta_exact = exact_rest.map(|rest| {
        (r..=s)
            .map(|i| &binomial(s, i) * &binomial_big(rest, s - i))
            .sum::<BigCount>()
    });

    let log_rest_r = if rest.exact().is_some_and(BigCount::is_zero) {
        LogValue::zero()
    } else {
        log_binomial_magnitude(&rest, big_r)?
    };
    let log_delta_upper = LogValue::from_f64(2.0)
        .mul(binom_s_r.log_value())
        .mul(log_rest_r);
    let n_ge_c_s_3 = match n_vertices {
        Magnitude::Exact(n) => *n >= binomial(s, 3),
        Magnitude::Log(v) => v.ln() >= log_binomial(s, 3)?.ln(),
    };
    let delta_upper_valid = big_r >= 3 && 2 * big_r <= s && n_ge_c_s_3;
    let delta_upper_holds = match (&delta_exact, exact_rest, &binom_s_r) {
        (Some(d), Some(rest), Magnitude::Exact(c)) => {
            let upper = &(&BigCount::from_u64(2) * c) * &binomial_big(rest, big_r);
            Some(*d <= upper)
        }
        _ => None,
    };

    let ell_is_one = ell.exact().is_some_and(|e| *e == BigCount::one());
    let ratio = binom_s_r.ratio_f64(ell); // C(s,R) / ell
    let ln_ell = ell.ln();
    let ln_delta = log_delta.ln();
    // p <= ell (1 - 1/ell)^C = ell exp(-(C/ell) * phi), phi = -ell ln(1 - 1/ell) >= 1
    let phi = {
        let x = (-ln_ell).exp();
        let raw = if x >= 1e-8 {
            -(-x).ln_1p() / x
        } else {
            1.0 + x / 2.0
        };
        raw.max(1.0)
    };
    let log_p_bound = if ell_is_one {
        LogValue::zero()
    } else {
        LogValue::from_ln(ln_ell - ratio * phi)
    };
    let base = 1.0 + ln_delta + ln_ell;
    let condition_holds = ell_is_one || base - ratio * phi < 0.0;
    let paper_condition_holds = base - ratio < 0.0;
    let paper_condition_with_upper_holds = 1.0 + log_delta_upper.ln() + ln_ell - ratio < 0.0;

    let path = if delta_exact.is_some() && ell.path() == ArithPath::Exact {
        ArithPath::Exact
    } else {
        ArithPath::LogSpace
    };
    Ok(LllCertificate {
        n_vertices: n_vertices.clone(),
        s,
        r,
        big_r,
        ell: ell.clone(),
        log_p_bound,
        log_delta,
        delta_exact,
        log_delta_upper,
        delta_upper_valid,
        delta_upper_holds,
        condition_holds,
        paper_condition_holds,
        paper_condition_with_upper_holds,
        path,
    })
}

/// Result of a successful Moser–Tardos colouring run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColoringOutcome {
    pub n_vertices: usize,
    pub s: usize,
    pub r: usize,
    pub ell: usize,
    pub seed: u64,
    /// Colour of each `r`-set, indexed by colex rank.
    pub coloring: Vec<u32>,
    pub rounds_used: u64,
    pub least_color: u32,
    pub least_class: UniformHypergraph,
    pub class_sizes: Vec<BigCount>,
}

impl ColoringOutcome {
    /// The `r`-sets of one colour.
    pub fn class(&self, color: u32) -> UniformHypergraph {
        let edges = enumerate_subsets(self.n_vertices, self.r)
            .zip(&self.coloring)
            .filter(|(_, &c)| c == color)
            .map(|(e, _)| e)
            .collect();
        UniformHypergraph::from_sorted(self.n_vertices, self.r, edges)
    }
}

/// Colours `C([N], r)` with `ell` colours so that every `s`-set sees all of them.
///
/// Each round resamples the `r`-subsets of the colex-least `s`-set that misses a
/// colour. Fails with [`Error::RoundCap`] after `max_rounds` resamplings.
pub fn frankl_rodl_color(
    n_vertices: usize,
    s: usize,
    r: usize,
    ell: usize,
    seed: u64,
    max_rounds: u64,
) -> Result<ColoringOutcome> {
    if !(r < s && s <= n_vertices) {
        return domain(format!(
            "colouring needs r < s <= N, got ({n_vertices},{s},{r})"
        ));
    }
    if ell < 1 {
        return domain("colouring needs ell >= 1");
    }
    if n_vertices > 128 {
        return domain("colouring runs only at desk scale (N <= 128)");
    }
    let r_sets = binomial_small(n_vertices, r);
    let events = binomial_small(n_vertices, s) * binomial_small(s, r);
    if r_sets > DEFAULT_ENUMERATION_BUDGET || events > DEFAULT_ENUMERATION_BUDGET * 4 {
        return Err(Error::Budget {
            what: format!("colouring C({n_vertices},{r}) r-sets"),
            required: BigCount::from_u128(events.max(r_sets)),
            budget: BigCount::from_u128(DEFAULT_ENUMERATION_BUDGET),
        });
    }
    let patterns: Vec<Vec<usize>> = enumerate_subsets(s, r)
        .map(KSubset::into_elements)
        .collect();
    let event_sets: Vec<KSubset> = enumerate_subsets(n_vertices, s).collect();
    let event_members: Vec<Vec<u32>> = event_sets
        .iter()
        .map(|set| {
            let el = set.elements();
            patterns
                .iter()
                .map(|pat| {
                    let sub: Vec<usize> = pat.iter().map(|&i| el[i]).collect();
                    rank_colex_small(&sub) as u32
                })
                .collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coloring: Vec<u32> = (0..r_sets)
        .map(|_| rng.random_range(0..ell as u32))
        .collect();
    let mut seen = vec![false; ell];
    let mut violated = |coloring: &[u32]| -> Option<usize> {
        event_members.iter().position(|members| {
            seen.iter_mut().for_each(|x| *x = false);
            let mut distinct = 0;
            for &m in members {
                let c = coloring[m as usize] as usize;
                if !seen[c] {
                    seen[c] = true;
                    distinct += 1;
                }
            }
            distinct < ell
        })
    };
    let mut rounds = 0u64;
    while let Some(bad) = violated(&coloring) {
        if rounds >= max_rounds {
            return Err(Error::RoundCap {
                rounds,
                last_violated: event_sets[bad].elements().to_vec(),
            });
        }
        for &m in &event_members[bad] {
            coloring[m as usize] = rng.random_range(0..ell as u32);
        }
        rounds += 1;
    }

    let mut sizes = vec![0u64; ell];
    for &c in &coloring {
        sizes[c as usize] += 1;
    }
    let least_color = (0..ell).min_by_key(|&c| (sizes[c], c)).expect("ell >= 1") as u32;
    let mut outcome = ColoringOutcome {
        n_vertices,
        s,
        r,
        ell,
        seed,
        coloring,
        rounds_used: rounds,
        least_color,
        least_class: UniformHypergraph::empty(n_vertices, r),
        class_sizes: sizes.into_iter().map(BigCount::from_u64).collect(),
    };
    outcome.least_class = outcome.class(least_color);
    Ok(outcome)
}

/// Size accounting for a blowup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub m: usize,
    pub base_n: usize,
    /// Part of each vertex of `[mN]`: `v mod N`.
    pub part_map: Vec<usize>,
    pub transversal_edges: BigCount,
    pub degenerate_edges: BigCount,
    /// `m^r |A|`.
    pub size_transversal: BigCount,
    /// `N C(m,2) C(mN-2, r-2)`.
    pub size_degenerate: BigCount,
    pub cap_holds: bool,
    /// `|A| / C(N,r) + r(r-1) / (2N)`; equals `1/ell + ...` when `|A| = C(N,r)/ell`.
    pub f: f64,
}

impl BlowupReport {
    /// `f = 1/ell + r(r-1)/(2N)` for a colour class of an `ell`-colouring.
    pub fn f_for_colors(ell: u64, base_n: usize, r: usize) -> f64 {
        1.0 / ell as f64 + (r * (r - 1)) as f64 / (2.0 * base_n as f64)
    }
}

/// Replaces each vertex of `a` by `m` clones (vertex `v` of `[mN]` lies in part `v mod N`).
/// Keeps the transversal `r`-sets that project onto edges of `a` and adds every
/// `r`-set meeting some part twice.
pub fn blowup(a: &UniformHypergraph, m: usize) -> Result<(UniformHypergraph, BlowupReport)> {
    blowup_with_budget(a, m, DEFAULT_ENUMERATION_BUDGET)
}

pub fn blowup_with_budget(
    a: &UniformHypergraph,
    m: usize,
    budget: u128,
) -> Result<(UniformHypergraph, BlowupReport)> {
    let (base_n, r) = (a.n(), a.r());
    if m < 1 {
        return domain("blowup needs m >= 1");
    }
    if r < 2 {
        return domain("blowup needs r >= 2");
    }
    let n = m * base_n;
    let required = binomial(n as u64, r as u64);
    if required > BigCount::from_u128(budget) || n > 128 {
        return Err(Error::Budget {
            what: format!("blowup enumerating C({n},{r}) r-sets"),
            required,
            budget: BigCount::from_u128(budget),
        });
    }
    let mut edges = Vec::new();
    let (mut transversal, mut degenerate) = (0u64, 0u64);
    for e in enumerate_subsets(n, r) {
        let mut parts: Vec<usize> = e.elements().iter().map(|v| v % base_n).collect();
        parts.sort_unstable();
        if parts.windows(2).any(|w| w[0] == w[1]) {
            degenerate += 1;
            edges.push(e);
        } else if a.has_edge(&KSubset::new_unchecked(parts)) {
            transversal += 1;
            edges.push(e);
        }
    }
    let b = UniformHypergraph::from_sorted(n, r, edges);

    let size_transversal =
        &BigCount::from_u64(m as u64).pow(r as u32) * &BigCount::from_u64(a.len() as u64);
    let size_degenerate = &(&BigCount::from_u64(base_n as u64) * &binomial(m as u64, 2))
        * &binomial(n as u64 - 2, r as u64 - 2);
    let cap = &size_transversal + &size_degenerate;
    let f = BigCount::from_u64(a.len() as u64).ratio_f64(&binomial(base_n as u64, r as u64))
        + (r * (r - 1)) as f64 / (2.0 * base_n as f64);
    let report = BlowupReport {
        m,
        base_n,
        part_map: (0..n).map(|v| v % base_n).collect(),
        transversal_edges: BigCount::from_u64(transversal),
        degenerate_edges: BigCount::from_u64(degenerate),
        cap_holds: BigCount::from_u64(b.len() as u64) <= cap,
        size_transversal,
        size_degenerate,
        f,
    };
    Ok((b, report))
}

/// Parameters of the initial-segment recursion for a Turán `(n, r+R, r)`-system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionParams {
    pub n: usize,
    pub r: usize,
    pub big_r: usize,
    pub k: usize,
    pub c: f64,
}

impl RecursionParams {
    pub fn s(&self) -> usize {
        self.r + self.big_r
    }

    /// `(s', r') = (r-k+R, r-k)` for the tail systems.
    pub fn inner(&self) -> (usize, usize) {
        (self.r - self.k + self.big_r, self.r - self.k)
    }

    pub fn p(&self) -> f64 {
        self.c / binomial_small(self.k, self.big_r) as f64
    }

    fn validate(&self) -> Result<()> {
        let RecursionParams { n, r, big_r, k, c } = *self;
        if big_r < 1 {
            return domain("recursion needs R >= 1");
        }
        if !(big_r <= k && k < r) {
            return domain(format!(
                "recursion needs R <= k <= r-1, got k={k}, R={big_r}, r={r}"
            ));
        }
        if n < r + big_r {
            return domain(format!("recursion needs n >= r+R, got n={n}"));
        }
        if n > 128 {
            return domain("recursion runs only at desk scale (n <= 128)");
        }
        let top = binomial_small(k, big_r) as f64;
        if !(c >= 0.0 && c <= top) {
            return domain(format!(
                "recursion needs c in [0, C(k,R)] = [0, {top}], got {c}"
            ));
        }
        Ok(())
    }
}

/// Supplies Turán `(n', s', r')`-systems on `{0,..,n'-1}`; called with `n' < s'` it
/// should return the empty system.
pub type BaseSupplier<'a> = dyn Fn(usize, usize, usize) -> Result<UniformHypergraph> + Sync + 'a;

/// [`trivial_prefix_system`] extended by the empty system below `s'`.
pub fn prefix_supplier(n: usize, s: usize, r: usize) -> Result<UniformHypergraph> {
    if n < s {
        Ok(UniformHypergraph::empty(n, r))
    } else {
        trivial_prefix_system(n, s, r)
    }
}

/// One draw of the recursion together with the parts it was assembled from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionSample {
    pub params: RecursionParams,
    pub seed: u64,
    pub p: f64,
    /// Sampled `(k-R)`-sets.
    pub s_sets: Vec<KSubset>,
    /// `k`-sets not containing any member of `s_sets`.
    pub t_sets: Vec<KSubset>,
    pub s_star: UniformHypergraph,
    pub t_star: UniformHypergraph,
    /// Attempts discarded before this one.
    pub retries: u32,
    pub expected_size: f64,
}

/// Tail systems by tail length `0..n`, produced once per run.
fn tail_systems(
    params: &RecursionParams,
    supplier: &BaseSupplier,
) -> Result<Vec<UniformHypergraph>> {
    let (s_in, r_in) = params.inner();
    (0..params.n)
        .map(|t| {
            if t < s_in {
                return Ok(UniformHypergraph::empty(t, r_in));
            }
            let sys = supplier(t, s_in, r_in)?;
            if sys.n() != t || sys.r() != r_in {
                return domain(format!(
                    "base supplier returned an ({},{})-system for ({t},{r_in})",
                    sys.n(),
                    sys.r()
                ));
            }
            Ok(sys)
        })
        .collect()
}

fn draw_once<R: Rng>(
    params: &RecursionParams,
    tails: &[UniformHypergraph],
    rng: &mut R,
) -> (
    UniformHypergraph,
    Vec<KSubset>,
    Vec<KSubset>,
    UniformHypergraph,
    UniformHypergraph,
) {
    let RecursionParams { n, r, big_r, k, .. } = *params;
    let seg = k - big_r;
    let p = params.p();
    let in_s: Vec<bool> = (0..binomial_small(n, seg))
        .map(|_| rng.random::<f64>() < p)
        .collect();
    let s_sets: Vec<KSubset> = enumerate_subsets(n, seg)
        .zip(&in_s)
        .filter(|(_, &b)| b)
        .map(|(x, _)| x)
        .collect();

    let s_star: Vec<KSubset> = enumerate_subsets(n, r)
        .filter(|e| in_s[rank_colex_small(&e.elements()[..seg]) as usize])
        .collect();

    let patterns: Vec<Vec<usize>> = enumerate_subsets(k, seg)
        .map(KSubset::into_elements)
        .collect();
    let mut sub = Vec::with_capacity(seg);
    let t_sets: Vec<KSubset> = enumerate_subsets(n, k)
        .filter(|x| {
            let el = x.elements();
            !patterns.iter().any(|pat| {
                sub.clear();
                sub.extend(pat.iter().map(|&i| el[i]));
                in_s[rank_colex_small(&sub) as usize]
            })
        })
        .collect();

    let mut t_star = Vec::new();
    for y in &t_sets {
        let top = y.max().expect("k >= 1");
        let tail = &tails[n - 1 - top];
        for z in tail.edges() {
            let mut e = y.elements().to_vec();
            e.extend(z.elements().iter().map(|v| v + top + 1));
            t_star.push(KSubset::new_unchecked(e));
        }
    }
    t_star.sort_unstable();

    let mut all = s_star.clone();
    all.extend(t_star.iter().cloned());
    all.sort_unstable();
    debug_assert!(
        all.windows(2).all(|w| w[0] < w[1]),
        "S* and T* are disjoint"
    );
    (
        UniformHypergraph::from_sorted(n, r, all),
        s_sets,
        t_sets,
        UniformHypergraph::from_sorted(n, r, s_star),
        UniformHypergraph::from_sorted(n, r, t_star),
    )
}

/// A single unconditioned draw of `G = S* ∪ T*` (no retry towards the mean).
pub fn sample_recursive_system(
    params: &RecursionParams,
    seed: u64,
    supplier: &BaseSupplier,
) -> Result<(UniformHypergraph, RecursionSample)> {
    params.validate()?;
    let tails = tail_systems(params, supplier)?;
    let expected = expected_from_tails(params, &tails)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (g, s_sets, t_sets, s_star, t_star) = draw_once(params, &tails, &mut rng);
    Ok((
        g,
        RecursionSample {
            params: *params,
            seed,
            p: params.p(),
            s_sets,
            t_sets,
            s_star,
            t_star,
            retries: 0,
            expected_size: expected.expected,
        },
    ))
}

/// Maximum number of draws [`recursive_system`] makes.
pub const MAX_RECURSION_ATTEMPTS: u32 = 1000;

/// Draws `G = S* ∪ T*` until `|G|` is at most its expectation.
pub fn recursive_system(
    params: &RecursionParams,
    seed: u64,
    supplier: &BaseSupplier,
) -> Result<(UniformHypergraph, RecursionSample)> {
    params.validate()?;
    let tails = tail_systems(params, supplier)?;
    let expected = expected_from_tails(params, &tails)?.expected;
    let threshold = expected * (1.0 + 1e-12) + 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = usize::MAX;
    for attempt in 0..MAX_RECURSION_ATTEMPTS {
        let (g, s_sets, t_sets, s_star, t_star) = draw_once(params, &tails, &mut rng);
        if (g.len() as f64) <= threshold {
            let sample = RecursionSample {
                params: *params,
                seed,
                p: params.p(),
                s_sets,
                t_sets,
                s_star,
                t_star,
                retries: attempt,
                expected_size: expected,
            };
            return Ok((g, sample));
        }
        best = best.min(g.len());
    }
    Err(Error::RetryCap {
        attempts: MAX_RECURSION_ATTEMPTS,
        expected,
        best,
    })
}

/// Expected size of `G` and the closed-form cap it is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedSize {
    /// `p C(n,r)`.
    pub s_star_term: f64,
    /// `sum_v C(v,k-1) (1-p)^{C(k,R)} T(n-1-v, r-k+R, r-k)` over 0-based maxima `v`.
    pub t_star_term: f64,
    pub expected: f64,
    /// `(c/C(k,R) + e^{-c} mu_inner / C(r-k+R,R)) C(n,r)` when `mu_inner` is given.
    pub closed_form_cap: Option<f64>,
}

/// `E|S*| + E|T*|` with `t_oracle(n')` giving the tail system size on `n'` vertices.
pub fn expected_recursive_size(
    params: &RecursionParams,
    t_oracle: &dyn Fn(usize) -> f64,
    mu_inner: Option<f64>,
) -> Result<ExpectedSize> {
    params.validate()?;
    let RecursionParams { n, r, big_r, k, c } = *params;
    let p = params.p();
    let c_k_r = binomial_small(k, big_r) as f64;
    let c_n_r = binomial_small(n, r) as f64;
    let miss = (1.0 - p).powf(c_k_r);
    let t_star_term: f64 = (k - 1..n)
        .map(|v| binomial_small(v, k - 1) as f64 * miss * t_oracle(n - 1 - v))
        .sum();
    let s_star_term = p * c_n_r;
    let (s_in, _) = params.inner();
    let closed_form_cap = mu_inner
        .map(|mu| (c / c_k_r + (-c).exp() * mu / binomial_small(s_in, big_r) as f64) * c_n_r);
    Ok(ExpectedSize {
        s_star_term,
        t_star_term,
        expected: s_star_term + t_star_term,
        closed_form_cap,
    })
}

fn expected_from_tails(
    params: &RecursionParams,
    tails: &[UniformHypergraph],
) -> Result<ExpectedSize> {
    expected_recursive_size(params, &|t| tails[t].len() as f64, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::is_turan_system;

    #[test]
    fn prefix_examples() {
        let h = trivial_prefix_system(5, 4, 3).unwrap();
        assert_eq!(h.len(), 4);
        assert!(is_turan_system(&h, 4).unwrap().is_turan);
        let h = trivial_prefix_system(6, 4, 2).unwrap();
        assert_eq!(h.len(), 6);
        assert!(is_turan_system(&h, 4).unwrap().is_turan);
        let h = trivial_prefix_system(5, 5, 3).unwrap();
        assert_eq!(h.len(), 1);
        assert!(is_turan_system(&h, 5).unwrap().is_turan);
        assert!(trivial_prefix_system(5, 3, 3).is_err());
    }

    #[test]
    fn paper_parameters_small() {
        let p = paper_parameters(4, 2).unwrap();
        assert_eq!(p.n_vertices, Magnitude::Exact(BigCount::from_u64(45)));
        assert!((p.log_argument - 166_725f64.ln()).abs() < 1e-12);
        assert_eq!(p.ell, Magnitude::Exact(BigCount::one()));
        assert_eq!(p.path, ArithPath::Exact);
        assert!(!p.degenerate);

        let p = paper_parameters(2, 1).unwrap();
        assert_eq!(p.n_vertices, Magnitude::Exact(BigCount::from_u64(3)));
        assert!(p.degenerate);
        assert_eq!(p.effective_ell(), Magnitude::Exact(BigCount::one()));
        assert!(paper_parameters(1, 1).is_err());
        assert!(paper_parameters(5, 0).is_err());
    }

    #[test]
    fn paper_parameters_direct_formula() {
        // independent float evaluation for a mid-size cell
        let (r, big_r) = (40u64, 5u64);
        let s = r + big_r;
        let c = binomial(s, big_r).to_f64();
        let n = (r * (r - 1)) as f64 * c / (2 * big_r) as f64;
        let p = paper_parameters(r, big_r).unwrap();
        let n_exact = p.n_vertices.exact().unwrap().to_f64();
        assert!((n_exact - n.floor()).abs() <= 1.0);
        let rest = n_exact - s as f64;
        let ln_tail: f64 = (0..big_r).map(|i| (rest - i as f64).ln()).sum::<f64>()
            - (1..=big_r).map(|i| (i as f64).ln()).sum::<f64>();
        let ell = (c / (2.0 * c.ln() + ln_tail)).floor();
        assert_eq!(p.ell.exact().unwrap().to_f64(), ell);
    }

    #[test]
    fn lll_ell_one_always_holds() {
        let cert = lll_condition(
            &Magnitude::Exact(BigCount::from_u64(45)),
            6,
            4,
            &Magnitude::Exact(BigCount::one()),
        )
        .unwrap();
        assert!(cert.log_p_bound.is_zero);
        assert!(cert.condition_holds);
    }

    #[test]
    fn dependency_degree_routes_agree() {
        for &(n, s, r) in &[(45u64, 6u64, 4u64), (300, 8, 5), (5000, 9, 6), (20, 6, 3)] {
            let cert = lll_condition(
                &Magnitude::Exact(BigCount::from_u64(n)),
                s,
                r,
                &Magnitude::Exact(BigCount::from_u64(2)),
            )
            .unwrap();
            let exact = cert.delta_exact.clone().unwrap();
            // brute force: count s-sets meeting a fixed s-set in >= r points
            let brute: u64 = (r..=s)
                .map(|i| binomial_u64_checked(s, i) * binomial_u64_checked(n - s, s - i))
                .sum();
            assert_eq!(exact, BigCount::from_u64(brute));
            let rel = (cert.log_delta.ln() - exact.ln()).abs() / exact.ln();
            assert!(rel <= 1e-9, "({n},{s},{r}) rel {rel}");
        }
    }

    fn binomial_u64_checked(n: u64, k: u64) -> u64 {
        crate::combinatorics::binomial_u64(n, k).unwrap()
    }

    #[test]
    fn dependency_degree_by_enumeration() {
        // N = 8, s = 4, r = 2: count 4-sets B with |A ∩ B| >= 2 for A = {0,1,2,3}
        let a = KSubset::initial(4);
        let brute = enumerate_subsets(8, 4)
            .filter(|b| {
                b.elements()
                    .iter()
                    .filter(|v| a.elements().contains(v))
                    .count()
                    >= 2
            })
            .count() as u64;
        let cert = lll_condition(
            &Magnitude::Exact(BigCount::from_u64(8)),
            4,
            2,
            &Magnitude::Exact(BigCount::from_u64(3)),
        )
        .unwrap();
        assert_eq!(cert.delta_exact.unwrap(), BigCount::from_u64(brute));
    }

    #[test]
    fn consecutive_term_ratio_at_most_half() {
        let n = binomial(13, 3);
        let ratios = delta_term_ratios(&n, 13, 10).unwrap();
        assert_eq!(ratios.len(), 3);
        // oracle: the same ratio from exact consecutive terms
        let rest = n.to_u64().unwrap() - 13;
        for (idx, i) in (10u64..13).enumerate() {
            let t = |i: u64| binomial(13, i).to_f64() * binomial(rest, 13 - i).to_f64();
            let direct = t(i + 1) / t(i);
            assert!((direct - ratios[idx]).abs() <= 1e-12 * direct.max(1e-300));
            assert!(ratios[idx] <= 0.5);
        }
        let cert = lll_condition(
            &Magnitude::Exact(n.clone()),
            13,
            10,
            &Magnitude::Exact(BigCount::from_u64(2)),
        )
        .unwrap();
        assert!(cert.delta_upper_valid);
        assert_eq!(cert.delta_upper_holds, Some(true));
    }

    #[test]
    fn paper_condition_implies_condition() {
        for ell in [2u64, 3, 5, 17] {
            for n in [30u64, 200, 5000] {
                let cert = lll_condition(
                    &Magnitude::Exact(BigCount::from_u64(n)),
                    8,
                    5,
                    &Magnitude::Exact(BigCount::from_u64(ell)),
                )
                .unwrap();
                if cert.paper_condition_holds {
                    assert!(cert.condition_holds);
                }
            }
        }
    }

    #[test]
    fn coloring_single_color() {
        let out = frankl_rodl_color(6, 4, 3, 1, 0, 10).unwrap();
        assert_eq!(out.rounds_used, 0);
        assert_eq!(out.least_class, UniformHypergraph::complete(6, 3));
    }

    #[test]
    fn coloring_two_colors_verified() {
        let out = frankl_rodl_color(6, 4, 3, 2, 7, 100_000).unwrap();
        for color in 0..2 {
            assert!(is_turan_system(&out.class(color), 4).unwrap().is_turan);
        }
        assert!(out.least_class.len() * 2 <= 20);
        let again = frankl_rodl_color(6, 4, 3, 2, 7, 100_000).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn coloring_round_cap() {
        // C(4,3) = 4 < 5 colours, so every 4-set is always bad
        let err = frankl_rodl_color(6, 4, 3, 5, 1, 3).unwrap_err();
        match err {
            Error::RoundCap {
                rounds,
                last_violated,
            } => {
                assert_eq!(rounds, 3);
                assert_eq!(last_violated.len(), 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn blowup_identity_and_cap() {
        let a = UniformHypergraph::new(
            4,
            2,
            vec![
                KSubset::new(vec![0, 1], 4).unwrap(),
                KSubset::new(vec![2, 3], 4).unwrap(),
            ],
        )
        .unwrap();
        let (b1, _) = blowup(&a, 1).unwrap();
        assert_eq!(b1, a);
        let (b, rep) = blowup(&a, 2).unwrap();
        assert_eq!(b.n(), 8);
        assert!(is_turan_system(&b, 3).unwrap().is_turan);
        // m^r |A| = 4 * 2 = 8, N C(m,2) C(mN-2, r-2) = 4 * 1 * 1 = 4
        assert_eq!(rep.size_transversal, BigCount::from_u64(8));
        assert_eq!(rep.size_degenerate, BigCount::from_u64(4));
        assert_eq!(rep.transversal_edges, BigCount::from_u64(8));
        assert_eq!(rep.degenerate_edges, BigCount::from_u64(4));
        assert!(rep.cap_holds);
        assert_eq!(rep.part_map[5], 1);
    }

    #[test]
    fn blowup_refuses_over_budget() {
        let a = UniformHypergraph::complete(6, 3);
        assert!(matches!(
            blowup_with_budget(&a, 3, 10),
            Err(Error::Budget { .. })
        ));
    }

    fn params(n: usize, r: usize, big_r: usize, k: usize, c: f64) -> RecursionParams {
        RecursionParams { n, r, big_r, k, c }
    }

    #[test]
    fn recursion_all_sampled() {
        let p = params(8, 3, 1, 2, 2.0); // c = C(2,1): p = 1
        let (g, sample) = recursive_system(&p, 5, &prefix_supplier).unwrap();
        assert_eq!(g, UniformHypergraph::complete(8, 3));
        assert!(sample.t_sets.is_empty());
        assert_eq!(sample.retries, 0);
    }

    #[test]
    fn recursion_nothing_sampled() {
        let p = params(8, 3, 1, 2, 0.0);
        let (g, sample) = recursive_system(&p, 5, &prefix_supplier).unwrap();
        assert!(sample.s_sets.is_empty());
        assert!(sample.s_star.is_empty());
        assert_eq!(sample.t_sets.len(), 28);
        assert!(is_turan_system(&g, 4).unwrap().is_turan);
    }

    #[test]
    fn recursion_seeded_example() {
        let p = params(8, 3, 1, 2, 1.0);
        let (g, sample) = recursive_system(&p, 11, &prefix_supplier).unwrap();
        assert!(is_turan_system(&g, 4).unwrap().is_turan);
        assert!(g.len() as f64 <= sample.expected_size + 1e-9);
        let (g2, _) = recursive_system(&p, 11, &prefix_supplier).unwrap();
        assert_eq!(g.to_json(), g2.to_json());
    }

    #[test]
    fn recursion_structure() {
        let p = params(9, 4, 2, 3, 1.5);
        let (_, sample) = sample_recursive_system(&p, 3, &prefix_supplier).unwrap();
        let seg = p.k - p.big_r;
        for e in sample.s_star.edges() {
            let head = KSubset::new(e.elements()[..seg].to_vec(), p.n).unwrap();
            assert!(sample.s_sets.contains(&head));
        }
        for x in enumerate_subsets(p.n, p.k) {
            let hit = sample.s_sets.iter().any(|u| u.is_subset_of(&x));
            assert_eq!(!hit, sample.t_sets.contains(&x));
        }
    }

    #[test]
    fn recursion_domain_errors() {
        assert!(recursive_system(&params(8, 3, 1, 3, 1.0), 0, &prefix_supplier).is_err());
        assert!(recursive_system(&params(8, 3, 2, 1, 1.0), 0, &prefix_supplier).is_err());
        assert!(recursive_system(&params(8, 3, 1, 2, 2.5), 0, &prefix_supplier).is_err());
        assert!(recursive_system(&params(3, 3, 1, 2, 1.0), 0, &prefix_supplier).is_err());
    }

    #[test]
    fn expected_size_edges() {
        let p = params(8, 3, 1, 2, 2.0);
        let e = expected_recursive_size(&p, &|_| 1.0, None).unwrap();
        assert_eq!(e.expected, 56.0);
        // p = 0: sum over maxima of C(v, k-1) equals C(n, k)
        let p = params(8, 3, 1, 2, 0.0);
        let e = expected_recursive_size(&p, &|_| 1.0, None).unwrap();
        assert_eq!(e.expected, 28.0);
    }

    #[test]
    fn expected_size_by_maximum_enumeration() {
        // reindexing check: group k-sets by their maximum directly
        let p = params(10, 4, 1, 2, 0.7);
        let oracle = |t: usize| (t * t) as f64;
        let e = expected_recursive_size(&p, &oracle, None).unwrap();
        let miss = (1.0 - p.p()).powf(binomial_small(2, 1) as f64);
        let direct: f64 = enumerate_subsets(10, 2)
            .map(|y| miss * oracle(10 - 1 - KSubset::max(&y).unwrap()))
            .sum();
        assert!((e.t_star_term - direct).abs() < 1e-9);
    }

    #[test]
    fn certificate_serializes() {
        let p = paper_parameters(10, 3).unwrap();
        let cert = lll_condition(&p.n_vertices, p.s, p.r, &p.effective_ell()).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: LllCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back.delta_exact, cert.delta_exact);
        assert_eq!(back.condition_holds, cert.condition_holds);
    }
}
