//! Closed-form bounds on `mu(s,r) = t(s,r) C(s,r)` and the parameter schedules of
//! the recursive upper-bound argument.
//!
//! Asymptotic formulas are evaluated as their leading terms; each [`BoundReport`]
//! says so in its `assumptions`.

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, log_binomial, BigCount, LogValue, Magnitude};
use crate::constructions::{ell_for_vertices, lll_condition, paper_parameters, PaperParameters};
use crate::error::{domain, Result};

/// Relative slack for comparisons of quantities that are equal in exact arithmetic.
const REL_TOL: f64 = 1e-12;

fn le_tol(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * a.abs().max(b.abs()).max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Lower,
    Upper,
    AsymptoticUpper,
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::Lower => "lower",
            BoundKind::Upper => "upper",
            BoundKind::AsymptoticUpper => "asymptotic-upper",
        }
    }
}

/// One bound on the `mu` scale.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub kind: BoundKind,
    /// May be `inf` (serialized as `null`) when only `ln_value` is representable.
    pub value: f64,
    pub ln_value: f64,
    pub assumptions: Vec<String>,
    pub exact_path: bool,
}

impl BoundReport {
    fn new(
        name: &str,
        kind: BoundKind,
        value: LogValue,
        exact_path: bool,
        assumptions: &[&str],
    ) -> Self {
        BoundReport {
            name: name.into(),
            kind,
            value: value.to_f64(),
            ln_value: value.ln(),
            assumptions: assumptions.iter().map(|s| s.to_string()).collect(),
            exact_path,
        }
    }
}

/// `ceil(C(n,r) / C(s,r))`, the double-counting lower bound on `T(n,s,r)`.
#[allow(non_snake_case)]
pub fn counting_lower_T(n: u64, s: u64, r: u64) -> Result<BigCount> {
    if !(r < s && s <= n) {
        return domain(format!(
            "counting bound needs r < s <= n, got ({n},{s},{r})"
        ));
    }
    Ok(binomial(n, r).div_ceil(&binomial(s, r)))
}

/// `mu(s,r) >= s/r`.
pub fn decaen_lower_mu(s: u64, r: u64) -> Result<f64> {
    if !(1 <= r && r < s) {
        return domain(format!("de Caen bound needs 1 <= r < s, got s={s}, r={r}"));
    }
    Ok(s as f64 / r as f64)
}

/// Root of `e^x = (x+1)^{R+1}` beyond `R` and `alpha = (c0+1)^{R+1} / c0^R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub big_r: u64,
    pub c0: f64,
    pub alpha: f64,
    pub ln_alpha: f64,
    /// `|e^{c0} - (c0+1)^{R+1}| / e^{c0}`.
    pub residual: f64,
}

pub fn pikhurko_c0(big_r: u64) -> Result<RootResult> {
    if big_r < 1 {
        return domain("root needs R >= 1");
    }
    let a = (big_r + 1) as f64;
    let g = |x: f64| x - a * x.ln_1p();
    // g decreases on [0,R] and increases after it, so the bracket [R, hi] is unique
    let mut lo = big_r as f64;
    let mut hi = 2.0 * lo;
    while g(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c0 = if g(lo).abs() <= g(hi).abs() { lo } else { hi };
    let ln_alpha = a * c0.ln_1p() - big_r as f64 * c0.ln();
    Ok(RootResult {
        big_r,
        c0,
        alpha: ln_alpha.exp(),
        ln_alpha,
        residual: (-g(c0)).exp_m1().abs(),
    })
}

/// `R ln R + 3R ln ln R`; defined for `R > e`.
pub fn eq2_mu_bound(big_r: u64) -> Result<f64> {
    let x = big_r as f64;
    if x <= std::f64::consts::E {
        return domain(format!("R ln R + 3R ln ln R needs R > e, got R={big_r}"));
    }
    Ok(x * x.ln() + 3.0 * x * x.ln().ln())
}

/// `R(R+4) ln r`.
pub fn frankl_rodl_mu_bound(r: f64, big_r: u64) -> Result<f64> {
    if !(r >= 3.0) {
        return domain(format!("R(R+4) ln r needs r >= 3, got r={r}"));
    }
    let x = big_r as f64;
    Ok(x * (x + 4.0) * r.ln())
}

/// `R ln C(r+R, R)`.
pub fn sidorenko_mu_bound(r: u64, big_r: u64) -> Result<f64> {
    if big_r < 1 {
        return domain("R ln C(r+R,R) needs R >= 1");
    }
    Ok(big_r as f64 * log_binomial(r + big_r, big_r)?.ln())
}

/// Right side of the recursion lemma,
/// `C(r+R,R) (c/C(k,R) + mu_inner / (e^c C(r-k+R,R)))`.
pub fn lemma_rhs(r: u64, big_r: u64, k: u64, c: f64, mu_inner: f64) -> Result<f64> {
    if !(mu_inner.is_finite() && mu_inner > 0.0) {
        return domain(format!(
            "lemma needs a finite mu_inner >= 1, got {mu_inner}"
        ));
    }
    Ok(lemma_rhs_log(r, big_r, k, c, LogValue::from_f64(mu_inner))?.to_f64())
}

/// [`lemma_rhs`] with `mu_inner` and the result in log space.
pub fn lemma_rhs_log(r: u64, big_r: u64, k: u64, c: f64, mu_inner: LogValue) -> Result<LogValue> {
    if big_r < 1 || !(big_r <= k && k < r) {
        return domain(format!(
            "lemma needs R >= 1 and R <= k <= r-1, got r={r}, R={big_r}, k={k}"
        ));
    }
    let ln_c_k = log_binomial(k, big_r)?.ln();
    if !(c.is_finite() && c >= 0.0) || (c > 0.0 && !le_tol(c.ln(), ln_c_k)) {
        return domain(format!(
            "lemma needs c in [0, C(k,R)], got c={c}, k={k}, R={big_r}"
        ));
    }
    if mu_inner.ln() < -REL_TOL || !mu_inner.ln().is_finite() {
        return domain(format!(
            "lemma needs a finite mu_inner >= 1, got ln = {}",
            mu_inner.ln()
        ));
    }
    let sampled = if c == 0.0 {
        LogValue::zero()
    } else {
        LogValue::from_ln(c.ln() - ln_c_k)
    };
    let inner = LogValue::from_ln(mu_inner.ln() - c - log_binomial(r - k + big_r, big_r)?.ln());
    Ok(LogValue::from_ln(log_binomial(r + big_r, big_r)?.ln()).mul(sampled.add(inner)))
}

/// `C(r1,R)/C(r2,R)` against `((r1-R)/(r2-R))^R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fact22 {
    pub lhs: f64,
    pub rhs: f64,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
    pub holds: bool,
}

pub fn fact22_check(r1: u64, r2: u64, big_r: u64) -> Result<Fact22> {
    if !(r1 >= r2 && r2 > big_r && big_r >= 1) {
        return domain(format!(
            "ratio fact needs r1 >= r2 > R >= 1, got ({r1},{r2},{big_r})"
        ));
    }
    let gap = (r1 - r2) as f64;
    // prod (r1-i)/(r2-i) = prod (1 + gap/(r2-i))
    let ln_lhs: f64 = (0..big_r).map(|i| (gap / (r2 - i) as f64).ln_1p()).sum();
    let ln_rhs = big_r as f64 * (gap / (r2 - big_r) as f64).ln_1p();
    Ok(Fact22 {
        lhs: ln_lhs.exp(),
        rhs: ln_rhs.exp(),
        ln_lhs,
        ln_rhs,
        holds: le_tol(ln_lhs, ln_rhs),
    })
}

/// `x = m 2^e` exactly.
fn decompose(x: f64) -> (u64, i32) {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    }
}

/// `ceil(a / (b + x))` for integers `a, b` and a finite `x >= 0`, exactly.
fn ceil_div_by_sum(a: u64, b: u64, x: f64) -> u64 {
    let (m, e) = decompose(x);
    let (num, den) = if e >= 0 {
        (
            BigUint::from(a),
            BigUint::from(b) + (BigUint::from(m) << e as usize),
        )
    } else {
        let shift = (-e) as usize;
        (
            BigUint::from(a) << shift,
            (BigUint::from(b) << shift) + BigUint::from(m),
        )
    };
    let (q, rem) = num.div_rem(&den);
    let q = if rem == BigUint::ZERO { q } else { q + 1u32 };
    u64::try_from(q).expect("quotient below a")
}

/// `ceil(R r / (R + delta)) + R`.
pub fn segment_k(r: u64, big_r: u64, delta: f64) -> u64 {
    ceil_div_by_sum(big_r * r, big_r, delta) + big_r
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fact23Plan {
    pub k: u64,
    pub k_below_r: bool,
    /// `r/(k-R)`, to be at most `1 + delta/R`.
    pub segment_ratio: f64,
    pub segment_ok: bool,
    /// `r/(r-k)`, to be at most `3R/delta`.
    pub tail_ratio: f64,
    pub tail_ok: bool,
}

impl Fact23Plan {
    pub fn all_hold(&self) -> bool {
        self.k_below_r && self.segment_ok && self.tail_ok
    }
}

fn fact23_unchecked(r: u64, big_r: u64, delta: f64) -> Fact23Plan {
    let k = segment_k(r, big_r, delta);
    let (rf, bf) = (r as f64, big_r as f64);
    let segment_ratio = rf / (k - big_r) as f64;
    let tail_ratio = if k < r {
        rf / (r - k) as f64
    } else {
        f64::INFINITY
    };
    Fact23Plan {
        k,
        k_below_r: k < r,
        segment_ratio,
        segment_ok: le_tol(segment_ratio, 1.0 + delta / bf),
        tail_ratio,
        tail_ok: le_tol(tail_ratio, 3.0 * bf / delta),
    }
}

fn fact23_in_domain(r: u64, big_r: u64, delta: f64) -> bool {
    let lower = 18.0 * (big_r * big_r) as f64 / r as f64;
    r >= 1 && big_r >= 1 && delta.is_finite() && le_tol(lower, delta) && delta <= big_r as f64
}

/// `k = ceil(Rr/(R+delta)) + R` and the three inequalities it satisfies
/// for `18R^2/r <= delta <= R`.
pub fn fact23_plan(r: u64, big_r: u64, delta: f64) -> Result<Fact23Plan> {
    if !fact23_in_domain(r, big_r, delta) {
        return domain(format!(
            "segment plan needs 18R^2/r <= delta <= R, got r={r}, R={big_r}, delta={delta}"
        ));
    }
    Ok(fact23_unchecked(r, big_r, delta))
}

/// Parameters of the direct (`R >= ln r`) step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case1Params {
    pub r: u64,
    pub big_r: u64,
    pub eps1: f64,
    /// `max(eps1, 18R^2/r)`.
    pub delta: f64,
    pub delta_is_eps1: bool,
    pub k: u64,
    /// `R ln(3R/delta) + ln(2R^3)`.
    pub c: f64,
    pub c_within_binomial: bool,
    pub fact23: Option<Fact23Plan>,
    /// `R >= ln r`.
    pub in_regime: bool,
    /// `R <= sqrt(18 r ln r)`.
    pub r_range_ok: bool,
    /// `e^delta c + 1`, the value the step yields given `mu <= 2R^3` one level down.
    pub mu_estimate: f64,
}

pub fn case1_parameters(r: u64, big_r: u64, eps1: f64) -> Result<Case1Params> {
    if r < 2 || big_r < 1 || !(eps1 > 0.0) {
        return domain(format!(
            "direct step needs r >= 2, R >= 1, eps1 > 0, got ({r},{big_r},{eps1})"
        ));
    }
    let (rf, bf) = (r as f64, big_r as f64);
    let floor_delta = 18.0 * bf * bf / rf;
    let delta_is_eps1 = eps1 >= floor_delta;
    let delta = eps1.max(floor_delta);
    let k = segment_k(r, big_r, delta);
    let c = bf * (3.0 * bf / delta).ln() + (2.0 * bf.powi(3)).ln();
    let c_within_binomial = c >= 0.0 && (c == 0.0 || le_tol(c.ln(), log_binomial(k, big_r)?.ln()));
    let in_regime = bf >= rf.ln();
    if !in_regime {
        log::warn!("direct step evaluated off its regime: R={big_r} < ln r for r={r}");
    }
    Ok(Case1Params {
        r,
        big_r,
        eps1,
        delta,
        delta_is_eps1,
        k,
        c,
        c_within_binomial,
        fact23: fact23_in_domain(r, big_r, delta).then(|| fact23_unchecked(r, big_r, delta)),
        in_regime,
        r_range_ok: bf <= (18.0 * rf * rf.ln()).sqrt(),
        mu_estimate: delta.exp() * c + 1.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    /// `R >= ln r_i`.
    Case1,
    /// `R < ln r_i`.
    Case2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub r_i: u64,
    pub k_i: u64,
    /// `r_i - k_i`.
    pub r_next: i64,
    /// `r_{i+1} >= eps1 r_i / (2(R+eps1))`.
    pub step_bound_holds: bool,
    pub c: Option<f64>,
    /// The constant was moved into `[0, C(k_i,R)]`.
    pub c_clamped: bool,
    pub mu_bound: Option<LogValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceBase {
    pub r_base: u64,
    pub base_mu: LogValue,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionTrace {
    pub r: u64,
    pub big_r: u64,
    pub eps1: f64,
    /// `18R^2/eps1`; the schedule stops once `r_{i+1}` drops below it.
    pub threshold: f64,
    pub t: usize,
    pub entries: Vec<TraceEntry>,
    pub case_tags: Vec<CaseTag>,
    /// `ceil(ln r / ln(1 + eps1/(2R))) + 1`.
    pub step_limit: u64,
    pub within_step_limit: bool,
    pub strictly_decreasing: bool,
    /// `r < 18R^2/eps1` already, so there are no steps.
    pub start_below_threshold: bool,
    pub base: Option<TraceBase>,
    pub final_mu: Option<LogValue>,
    /// `final_mu / (R ln R)`, for `R >= 2`.
    pub ratio_to_r_ln_r: Option<f64>,
}

impl RecursionTrace {
    /// `r_{t+1}`, or `r` itself when there are no steps.
    pub fn base_level(&self) -> i64 {
        self.entries.last().map_or(self.r as i64, |e| e.r_next)
    }
}

/// `k_i = ceil(R r_i/(R+eps1)) + R`, `r_{i+1} = r_i - k_i`, stopping once
/// `r_{i+1} < 18R^2/eps1`.
pub fn thm12ii_schedule(r: u64, big_r: u64, eps1: f64) -> Result<RecursionTrace> {
    if big_r < 1 || r < 1 || !(eps1 > 0.0 && eps1.is_finite()) {
        return domain(format!(
            "schedule needs r, R >= 1 and eps1 > 0, got ({r},{big_r},{eps1})"
        ));
    }
    let bf = big_r as f64;
    let threshold = 18.0 * bf * bf / eps1;
    let mut entries = Vec::new();
    let mut case_tags = Vec::new();
    let start_below_threshold = (r as f64) < threshold;
    let mut r_i = r;
    if !start_below_threshold {
        loop {
            let k_i = segment_k(r_i, big_r, eps1);
            let r_next = r_i as i64 - k_i as i64;
            let floor = eps1 * r_i as f64 / (2.0 * (bf + eps1));
            entries.push(TraceEntry {
                r_i,
                k_i,
                r_next,
                step_bound_holds: le_tol(floor, r_next as f64),
                c: None,
                c_clamped: false,
                mu_bound: None,
            });
            case_tags.push(if bf >= (r_i as f64).ln() {
                CaseTag::Case1
            } else {
                CaseTag::Case2
            });
            if (r_next as f64) < threshold {
                break;
            }
            r_i = r_next as u64;
        }
    }
    let step_limit = ((r as f64).ln() / (eps1 / (2.0 * bf)).ln_1p()).ceil() as u64 + 1;
    let strictly_decreasing = entries.iter().all(|e| e.r_next < e.r_i as i64)
        && entries.windows(2).all(|w| w[1].r_i as i64 == w[0].r_next);
    Ok(RecursionTrace {
        r,
        big_r,
        eps1,
        threshold,
        t: entries.len(),
        within_step_limit: entries.len() as u64 <= step_limit,
        entries,
        case_tags,
        step_limit,
        strictly_decreasing,
        start_below_threshold,
        base: None,
        final_mu: None,
        ratio_to_r_ln_r: None,
    })
}

/// `ln mu` at the base level `(r_base + R, r_base)`.
pub type BaseMu<'a> = dyn Fn(u64, u64) -> Result<LogValue> + 'a;

/// `mu(r+R, r) <= C(r+R, R)` from the complete system.
pub fn complete_base_mu(r: u64, big_r: u64) -> Result<LogValue> {
    log_binomial(r + big_r, big_r)
}

/// Evaluates the recursion lemma backwards along the schedule from a base bound at
/// `r_{t+1}`, with `c = R ln(3R/eps1) + ln(2R ln R)` clamped into `[0, C(k_i,R)]`.
pub fn thm12ii_certificate(
    r: u64,
    big_r: u64,
    eps1: f64,
    base_mu: Option<&BaseMu>,
) -> Result<RecursionTrace> {
    let mut trace = thm12ii_schedule(r, big_r, eps1)?;
    let level = trace.base_level();
    if level < 1 {
        return domain(format!("schedule ends at r_(t+1) = {level}; no base level"));
    }
    let r_base = level as u64;
    let (mut mu, source) = match base_mu {
        Some(f) => (f(r_base, big_r)?, "supplied"),
        None => (complete_base_mu(r_base, big_r)?, "complete system C(r+R,R)"),
    };
    if !(mu.ln() >= -REL_TOL && mu.ln().is_finite()) {
        return domain(format!(
            "base mu must be finite and >= 1, got ln = {}",
            mu.ln()
        ));
    }
    trace.base = Some(TraceBase {
        r_base,
        base_mu: mu,
        source: source.into(),
    });
    let bf = big_r as f64;
    let raw_c = bf * (3.0 * bf / eps1).ln() + (2.0 * bf * bf.ln()).ln();
    for entry in trace.entries.iter_mut().rev() {
        let ln_top = log_binomial(entry.k_i, big_r)?.ln();
        let mut c = raw_c;
        if !(c >= 0.0) {
            c = 0.0;
        } else if c > 0.0 && c.ln() > ln_top {
            c = ln_top.exp();
        }
        entry.c_clamped = c != raw_c;
        entry.c = Some(c);
        mu = lemma_rhs_log(entry.r_i, big_r, entry.k_i, c, mu)?;
        entry.mu_bound = Some(mu);
    }
    trace.final_mu = Some(mu);
    trace.ratio_to_r_ln_r = (big_r >= 2).then(|| (mu.ln() - (bf * bf.ln()).ln()).exp());
    Ok(trace)
}

/// `C(s,R) f` with `f = 1/ell + r(r-1)/(2N)` at the colouring parameters, against `R ln C(s,R)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub params: PaperParameters,
    pub lhs: f64,
    /// `R ln C(s,R)`.
    pub target: f64,
    pub ratio: f64,
    /// `2 ln C(s,R) + R ln N + r(r-1) C(s,R)/(2N)`.
    pub majorant: f64,
    /// `2 ln C(s,R) + R(2 ln r + ln C(s,R)) + R`.
    pub majorant_coarse: f64,
    /// `R >= 3` and `R <= r / ln r`.
    pub in_regime: bool,
    /// `ell < 2`: the ratio says little.
    pub degenerate: bool,
    pub lhs_half_n: Option<f64>,
    pub lhs_double_n: Option<f64>,
    /// Neither perturbation lowers `lhs` by more than 1%.
    pub n_choice_near_optimal: Option<bool>,
}

fn chain_lhs(binom: &Magnitude, n_vertices: &Magnitude, ell: &Magnitude, r: u64) -> f64 {
    let ell = match ell {
        Magnitude::Exact(e) if e.is_zero() => Magnitude::Exact(BigCount::one()),
        other => other.clone(),
    };
    binom.ratio_f64(&ell) + (r * (r - 1)) as f64 / 2.0 * binom.ratio_f64(n_vertices)
}

fn lhs_at_scaled_n(params: &PaperParameters, double: bool) -> Option<f64> {
    let n = match &params.n_vertices {
        Magnitude::Exact(c) => Magnitude::Exact(if double {
            c * &BigCount::from_u64(2)
        } else {
            c.div_floor(&BigCount::from_u64(2))
        }),
        Magnitude::Log(v) => {
            let shift = if double { 2f64.ln() } else { -(2f64.ln()) };
            Magnitude::Log(LogValue::from_ln(v.ln() + shift))
        }
    };
    let choice = ell_for_vertices(&params.binom_s_r, &n, params.s, params.big_r).ok()?;
    (!choice.degenerate).then(|| chain_lhs(&params.binom_s_r, &n, &choice.ell, params.r))
}

pub fn thm12i_chain_check(r: u64, big_r: u64) -> Result<ChainCheck> {
    let params = paper_parameters(r, big_r)?;
    Ok(chain_check_from(params))
}

/// [`thm12i_chain_check`] for precomputed parameters.
pub fn chain_check_from(params: PaperParameters) -> ChainCheck {
    let (r, bf) = (params.r, params.big_r as f64);
    let ln_c = params.binom_s_r.ln();
    let lhs = chain_lhs(&params.binom_s_r, &params.n_vertices, &params.ell, r);
    let target = bf * ln_c;
    let spread = (r * (r - 1)) as f64 / 2.0 * params.binom_s_r.ratio_f64(&params.n_vertices);
    let majorant = 2.0 * ln_c + bf * params.n_vertices.ln() + spread;
    let majorant_coarse = 2.0 * ln_c + bf * (2.0 * (r as f64).ln() + ln_c) + bf;
    let degenerate = params.degenerate || params.ell.ln() < 2f64.ln();
    let lhs_half_n = lhs_at_scaled_n(&params, false);
    let lhs_double_n = lhs_at_scaled_n(&params, true);
    let n_choice_near_optimal = match (lhs_half_n, lhs_double_n) {
        (None, None) => None,
        (a, b) => Some([a, b].into_iter().flatten().all(|v| v >= 0.99 * lhs)),
    };
    ChainCheck {
        in_regime: params.big_r >= 3 && bf <= r as f64 / (r as f64).ln(),
        lhs,
        target,
        ratio: lhs / target,
        majorant,
        majorant_coarse,
        degenerate,
        lhs_half_n,
        lhs_double_n,
        n_choice_near_optimal,
        params,
    }
}

/// Every bound applicable at `(r, R)`; `eps1` enables the recursive certificate.
pub fn all_bounds(r: u64, big_r: u64, eps1: Option<f64>) -> Result<Vec<BoundReport>> {
    if r < 2 || big_r < 1 {
        return domain(format!(
            "bounds need r >= 2 and R >= 1, got r={r}, R={big_r}"
        ));
    }
    const LEADING: &str = "leading term only; o(1) dropped";
    let s = r + big_r;
    let mut out = vec![
        BoundReport::new(
            "trivial",
            BoundKind::Lower,
            LogValue::one(),
            true,
            &["mu >= 1"],
        ),
        BoundReport::new(
            "de_caen",
            BoundKind::Lower,
            LogValue::from_f64(decaen_lower_mu(s, r)?),
            true,
            &["mu >= s/r"],
        ),
    ];
    let root = pikhurko_c0(big_r)?;
    out.push(BoundReport::new(
        "alpha",
        BoundKind::AsymptoticUpper,
        LogValue::from_ln(root.ln_alpha),
        false,
        &["R fixed, r -> infinity", LEADING],
    ));
    if let Ok(v) = eq2_mu_bound(big_r) {
        out.push(BoundReport::new(
            "r_ln_r_plus",
            BoundKind::AsymptoticUpper,
            LogValue::from_f64(v),
            false,
            &["R sufficiently large, limsup over r", LEADING],
        ));
    }
    if let Ok(v) = frankl_rodl_mu_bound(r as f64, big_r) {
        out.push(BoundReport::new(
            "frankl_rodl",
            BoundKind::AsymptoticUpper,
            LogValue::from_f64(v),
            false,
            &["R fixed, r -> infinity", LEADING],
        ));
    }
    let sidorenko = sidorenko_mu_bound(r, big_r)?;
    let sid_regime = big_r as f64 >= r as f64 / (r as f64).log2();
    out.push(BoundReport::new(
        "sidorenko",
        BoundKind::AsymptoticUpper,
        LogValue::from_f64(sidorenko),
        false,
        &[
            LEADING,
            if sid_regime {
                "R >= r/log2 r"
            } else {
                "R large (extended range)"
            },
        ],
    ));

    match paper_parameters(r, big_r) {
        Ok(params) if !params.degenerate => {
            let lll = lll_condition(&params.n_vertices, s, r, &params.ell)?;
            let exact = params.path == crate::combinatorics::ArithPath::Exact;
            let chain = chain_check_from(params);
            let (kind, note) = if lll.condition_holds {
                (
                    BoundKind::Upper,
                    "Local Lemma condition certified at (N, ell)",
                )
            } else {
                (
                    BoundKind::AsymptoticUpper,
                    "Local Lemma condition not certified",
                )
            };
            out.push(BoundReport::new(
                "thm12i_chain",
                kind,
                LogValue::from_f64(chain.lhs),
                exact,
                &[
                    "C(s,R) (1/ell + r(r-1)/(2N)) at the colouring parameters",
                    note,
                ],
            ));
            out.push(BoundReport::new(
                "thm12i_chain_ratio",
                BoundKind::AsymptoticUpper,
                LogValue::from_f64(chain.ratio),
                exact,
                &["ratio to R ln C(s,R), not on the mu scale"],
            ));
        }
        Ok(_) => log::debug!("colouring parameters degenerate at r={r}, R={big_r}"),
        Err(e) => log::debug!("colouring parameters unavailable at r={r}, R={big_r}: {e}"),
    }

    let rf = r as f64;
    let bf = big_r as f64;
    if big_r >= 2 && bf <= (18.0 * rf * rf.ln()).sqrt() {
        let leading = LogValue::from_ln(18.0 * bf * bf / rf + (bf * bf.ln()).ln());
        out.push(BoundReport::new(
            "thm12ii_leading",
            BoundKind::AsymptoticUpper,
            leading,
            false,
            &["R <= sqrt(18 r ln r)", "e^{18R^2/r} R ln R", LEADING],
        ));
    }
    if let Some(eps1) = eps1 {
        match thm12ii_certificate(r, big_r, eps1, None) {
            Ok(trace) => {
                let mu = trace.final_mu.expect("certificate sets final_mu");
                out.push(BoundReport::new(
                    "thm12ii_certificate",
                    BoundKind::Upper,
                    mu,
                    false,
                    &[
                        "recursion lemma evaluated along the schedule",
                        "base mu <= C(r_base+R, R)",
                    ],
                ));
            }
            Err(e) => log::debug!("no recursive certificate at r={r}, R={big_r}: {e}"),
        }
    }
    Ok(out)
}
