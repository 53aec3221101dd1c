//! Test-count bounds, Lovász-local-lemma code-size bounds and the
//! construction-size estimates for the BCH-based separable codes.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{E, LN_2};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::alpha::alpha;
use crate::error::{domain, Error, Result};
use crate::info::{binomial, mutual_information, ModelKind, PartitionIndex, TestModel};

/// Largest `n * (m + 1)` handled by the exact rational probabilities.
const MAX_EXACT_BITS: usize = 1 << 16;
/// Code-size searches stop here; beyond it float counts lose integer precision.
const MAX_SEARCH_N: u64 = 1 << 53;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundKind {
    SufficientN,
    NecessaryN,
    DisjunctMaxN,
    DisjunctMaxNAgt,
    SeparableMaxN,
    GvEstimate,
    SphereEstimate,
    RateRatio,
}

impl BoundKind {
    pub const ALL: [BoundKind; 8] = [
        BoundKind::SufficientN,
        BoundKind::NecessaryN,
        BoundKind::DisjunctMaxN,
        BoundKind::DisjunctMaxNAgt,
        BoundKind::SeparableMaxN,
        BoundKind::GvEstimate,
        BoundKind::SphereEstimate,
        BoundKind::RateRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::SufficientN => "sufficient_n",
            BoundKind::NecessaryN => "necessary_n",
            BoundKind::DisjunctMaxN => "disjunct_maxN",
            BoundKind::DisjunctMaxNAgt => "disjunct_maxN_agt",
            BoundKind::SeparableMaxN => "separable_maxN",
            BoundKind::GvEstimate => "gv_estimate",
            BoundKind::SphereEstimate => "sphere_estimate",
            BoundKind::RateRatio => "rate_ratio",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    /// Finite-size value: the bound expression itself for test counts, the
    /// search result for code sizes.
    pub exact: f64,
    pub asymptotic: f64,
    /// Integer reading of `exact` where one applies (smallest admissible test
    /// count, largest admissible code size, ...).
    pub integer: Option<u64>,
    /// `log2 B` for the code-size bounds.
    pub rate: Option<f64>,
    pub inputs: Vec<(&'static str, f64)>,
    pub flags: Vec<&'static str>,
}

/// `log2 C(n, k)` via log-gamma.
pub fn log2_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let lg = |x: u64| libm::lgamma(x as f64 + 1.0);
    (lg(n) - lg(k) - lg(n - k)) / LN_2
}

fn model_inputs(n_subjects: u64, m: usize, model: &TestModel) -> Vec<(&'static str, f64)> {
    let mut inputs = vec![("N", n_subjects as f64), ("m", m as f64), ("p", model.p)];
    if let Some(q) = model.q {
        inputs.push(("q", q));
    }
    if let ModelKind::Ggt { eta1, eta2 } = model.kind {
        inputs.push(("eta1", eta1 as f64));
        inputs.push(("eta2", eta2 as f64));
    }
    inputs
}

/// `max_i numerator(i) / I(i)` over the splits of the defective set.
fn per_split_max(m: usize, model: &TestModel, numerator: impl Fn(usize) -> f64) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for part in PartitionIndex::all(m)? {
        let info = mutual_information(model, part)?;
        if info <= 0.0 {
            return Err(domain(alloc::format!("mutual information vanishes at i = {}", part.i())));
        }
        best = best.max(numerator(part.i()) / info);
    }
    Ok(best)
}

fn test_count_setup(n_subjects: u64, m: usize, model: &TestModel) -> Result<f64> {
    if m as u64 >= n_subjects {
        return Err(domain("need m < N"));
    }
    let a = alpha(m, model)?;
    Ok(libm::log2(n_subjects as f64) / a)
}

/// Sufficient number of tests: `n > max_i log2(C(N-m, i) C(m, i)) / I(i)`.
/// The integer reading is the smallest `n` strictly above the expression.
pub fn sufficient_tests(n_subjects: u64, m: usize, model: &TestModel) -> Result<BoundReport> {
    let asymptotic = test_count_setup(n_subjects, m, model)?;
    let rest = n_subjects - m as u64;
    let exact = per_split_max(m, model, |i| {
        log2_binomial(rest, i as u64) + log2_binomial(m as u64, i as u64)
    })?;
    Ok(BoundReport {
        kind: BoundKind::SufficientN,
        exact,
        asymptotic,
        integer: Some(libm::floor(exact) as u64 + 1),
        rate: None,
        inputs: model_inputs(n_subjects, m, model),
        flags: Vec::new(),
    })
}

/// Necessary number of tests: `n >= max_i log2 C(N - m + i, i) / I(i)`.
pub fn necessary_tests(n_subjects: u64, m: usize, model: &TestModel) -> Result<BoundReport> {
    let asymptotic = test_count_setup(n_subjects, m, model)?;
    let rest = n_subjects - m as u64;
    let exact = per_split_max(m, model, |i| log2_binomial(rest + i as u64, i as u64))?;
    Ok(BoundReport {
        kind: BoundKind::NecessaryN,
        exact,
        asymptotic,
        integer: Some(libm::ceil(exact) as u64),
        rate: None,
        inputs: model_inputs(n_subjects, m, model),
        flags: Vec::new(),
    })
}

/// An exact probability bound with its large-`n` approximation.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityBound {
    pub exact: BigRational,
    pub asymptotic: f64,
}

impl ProbabilityBound {
    pub fn exact_f64(&self) -> f64 {
        self.exact.to_f64().unwrap_or(f64::NAN)
    }

    /// Exceeding one is allowed (the bound stays valid) but worth flagging.
    pub fn exceeds_one(&self) -> bool {
        self.exact > BigRational::one()
    }
}

fn pow2(bits: usize) -> BigInt {
    BigInt::one() << bits
}

/// Falling factorial `x (x - 1) ... (x - k + 1)`.
fn falling(x: &BigInt, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, t| acc * (x - BigInt::from(t)))
}

/// Probability bound for the bad event of one `(m + 1)`-set of random
/// codewords in the symmetric disjunct construction:
/// `1 - [2^{n(m+1)} - (m+1)(2^{m+1}-2)^n] / ((m+1)! C(2^n, m+1))`,
/// approximately `(m + 1)(1 - 2^{-m})^n`.
pub fn lll_disjunct_pprime(n: usize, m: usize) -> Result<ProbabilityBound> {
    if n == 0 || m < 2 {
        return Err(domain("need n >= 1 and m >= 2"));
    }
    if n.saturating_mul(m + 1) > MAX_EXACT_BITS {
        return Err(Error::Guard(alloc::format!("n (m + 1) = {} exceeds {MAX_EXACT_BITS} bits", n * (m + 1))));
    }
    if n < usize::BITS as usize && (1usize << n) < m + 1 {
        return Err(domain("2^n < m + 1: not enough distinct codewords"));
    }
    let k = m + 1;
    let bad = pow2(n * k) - BigInt::from(k) * (pow2(k) - BigInt::from(2)).pow(n as u32);
    let denom = falling(&pow2(n), k);
    let exact = BigRational::one() - BigRational::new(bad, denom);
    let asymptotic = k as f64 * libm::pow(1.0 - libm::exp2(-(m as f64)), n as f64);
    Ok(ProbabilityBound { exact, asymptotic })
}

/// Probability bound for a colliding pair of pairs in the separable
/// construction: `(3 6^n - 6 4^n + 3 2^n) / (2^n (2^n - 1)(2^n - 2)(2^n - 3))`,
/// approximately `3 (3/8)^n`.
pub fn lll_separable_pdprime(n: usize) -> Result<ProbabilityBound> {
    if n < 2 {
        return Err(domain("need 2^n >= 4"));
    }
    if n.saturating_mul(3) > MAX_EXACT_BITS {
        return Err(Error::Guard(alloc::format!("n = {n} too large for exact evaluation")));
    }
    let pw = |b: u32| BigInt::from(b).pow(n as u32);
    let num = BigInt::from(3) * pw(6) - BigInt::from(6) * pw(4) + BigInt::from(3) * pw(2);
    let exact = BigRational::new(num, falling(&pow2(n), 4));
    let asymptotic = 3.0 * libm::pow(0.375, n as f64);
    Ok(ProbabilityBound { exact, asymptotic })
}

/// Number of `k`-sets that share at least one element with a fixed `k`-set
/// among `N` items: `C(N, k) - C(N - k, k)`, summed as
/// `sum_{j>=1} C(k, j) C(N - k, k - j)` to avoid cancellation.
fn dependent_sets(n_items: u64, k: usize) -> f64 {
    if n_items < k as u64 {
        return 0.0;
    }
    let rest = (n_items - k as u64) as f64;
    (1..=k).map(|j| binomial(k, j) * binomial_f(rest, k - j)).sum()
}

/// `C(x, k)` for a float `x` and small `k`.
fn binomial_f(x: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * (x - t as f64) / (t + 1) as f64)
}

/// Largest `N` with `e * prob * dependent_sets(N, k) < 1`.
fn lll_search(prob: f64, k: usize) -> Result<u64> {
    let holds = |n: u64| E * prob * dependent_sets(n, k) < 1.0;
    if prob.is_nan() || prob <= 0.0 {
        return Err(domain("event probability is zero; the local lemma gives no finite size"));
    }
    let mut lo = k as u64 - 1;
    let mut hi = k as u64;
    while holds(hi) {
        lo = hi;
        hi = hi.checked_mul(2).filter(|&h| h <= MAX_SEARCH_N).ok_or_else(|| {
            Error::Guard(alloc::format!("code size exceeds {MAX_SEARCH_N}"))
        })?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `A = [m! / ((m+1)^2 e)]^{1/m}`.
pub fn lll_constant_a(m: usize) -> f64 {
    let fact: f64 = (1..=m).map(|k| k as f64).product();
    libm::pow(fact / ((m + 1) as f64 * (m + 1) as f64 * E), 1.0 / m as f64)
}

/// `B_S = [2^m / (2^m - 1)]^{1/m}`.
pub fn lll_base_symmetric(m: usize) -> f64 {
    let two_m = libm::exp2(m as f64);
    libm::pow(two_m / (two_m - 1.0), 1.0 / m as f64)
}

/// `B_A = [2^{m+1} / (2^{m+1} - 1)]^{1/m}`.
pub fn lll_base_asymmetric(m: usize) -> f64 {
    let two_m1 = libm::exp2(m as f64 + 1.0);
    libm::pow(two_m1 / (two_m1 - 1.0), 1.0 / m as f64)
}

/// `-log2(1 - 2^-k)`, exact even when `2^-k` is far below `f64` spacing at 1.
fn deficit(k: f64) -> f64 {
    -libm::log1p(-libm::exp2(-k)) / LN_2
}

/// `R_S(m) = log2 B_S`.
pub fn rate_symmetric(m: usize) -> f64 {
    deficit(m as f64) / m as f64
}

/// `R_A(m) = log2 B_A`.
pub fn rate_asymmetric(m: usize) -> f64 {
    deficit(m as f64 + 1.0) / m as f64
}

/// `R_S(m) / R_A(m) = (m - log2(2^m - 1)) / (m + 1 - log2(2^{m+1} - 1))`.
pub fn rate_ratio(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(domain("need m >= 2"));
    }
    let mf = m as f64;
    // log2(2^k - 1) = k - deficit(k)
    Ok(deficit(mf) / deficit(mf + 1.0))
}

pub fn rate_ratio_report(m: usize) -> Result<BoundReport> {
    let exact = rate_ratio(m)?;
    Ok(BoundReport {
        kind: BoundKind::RateRatio,
        exact,
        asymptotic: rate_symmetric(m) / rate_asymmetric(m),
        integer: None,
        rate: None,
        inputs: vec![("m", m as f64)],
        flags: Vec::new(),
    })
}

/// Largest code size guaranteed by the local lemma for symmetric
/// `m`-disjunct codes of length `n`, with the asymptotic `A B_S^n`.
pub fn lll_disjunct_max_n(n: usize, m: usize) -> Result<BoundReport> {
    let prob = lll_disjunct_pprime(n, m)?;
    let size = lll_search(prob.exact_f64(), m + 1)?;
    let mut flags = Vec::new();
    if prob.exceeds_one() {
        flags.push("pprime_exceeds_one");
    }
    Ok(BoundReport {
        kind: BoundKind::DisjunctMaxN,
        exact: size as f64,
        asymptotic: lll_constant_a(m) * libm::pow(lll_base_symmetric(m), n as f64),
        integer: Some(size),
        rate: Some(rate_symmetric(m)),
        inputs: vec![("n", n as f64), ("m", m as f64)],
        flags,
    })
}

/// Asymmetric counterpart of [`lll_disjunct_max_n`]. Only the large-`n`
/// event probability `(m + 1)(1 - 2^{-(m+1)})^n` is available, so the search
/// runs on it and the report is flagged accordingly.
pub fn lll_disjunct_max_n_agt(n: usize, m: usize) -> Result<BoundReport> {
    if n == 0 || m < 2 {
        return Err(domain("need n >= 1 and m >= 2"));
    }
    let prob = (m + 1) as f64 * libm::pow(1.0 - libm::exp2(-(m as f64 + 1.0)), n as f64);
    let size = lll_search(prob, m + 1)?;
    Ok(BoundReport {
        kind: BoundKind::DisjunctMaxNAgt,
        exact: size as f64,
        asymptotic: lll_constant_a(m) * libm::pow(lll_base_asymmetric(m), n as f64),
        integer: Some(size),
        rate: Some(rate_asymmetric(m)),
        inputs: vec![("n", n as f64), ("m", m as f64)],
        flags: vec!["event_probability_asymptotic"],
    })
}

/// `A' = (2e)^{-1/3}`.
pub fn lll_separable_constant() -> f64 {
    libm::cbrt(1.0 / (2.0 * E))
}

/// `B'_S = (8/3)^{1/3}`.
pub fn lll_separable_base() -> f64 {
    libm::cbrt(8.0 / 3.0)
}

/// Largest 2-separable code size guaranteed by the local lemma at length `n`.
pub fn lll_separable_max_n(n: usize) -> Result<BoundReport> {
    let prob = lll_separable_pdprime(n)?;
    let size = lll_search(prob.exact_f64(), 4)?;
    let mut flags = Vec::new();
    if prob.exceeds_one() {
        flags.push("pdprime_exceeds_one");
    }
    Ok(BoundReport {
        kind: BoundKind::SeparableMaxN,
        exact: size as f64,
        asymptotic: lll_separable_constant() * libm::pow(lll_separable_base(), n as f64),
        integer: Some(size),
        rate: Some(libm::log2(lll_separable_base())),
        inputs: vec![("n", n as f64), ("m", 2.0)],
        flags,
    })
}

/// Code-size estimates for the parity-check construction with `r` parity bits.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionEstimates {
    pub r: u32,
    /// `6^{1/3} 2^{r/3}`
    pub gv: f64,
    /// `24^{1/4} 2^{r/4}`
    pub sphere: f64,
    /// Largest `n` with `n (n^2 - 3n + 8) / 6 < 2^r`.
    pub gv_max_n: u64,
    /// Smallest `n` with `sum_{i<=4} C(n, i) >= 2^r`.
    pub sphere_min_n: u64,
}

/// Largest supported parity-bit count (keeps the integer checks in `u128`).
pub const MAX_PARITY_BITS: u32 = 120;

fn check_parity_bits(r: u32) -> Result<()> {
    if r == 0 || r > MAX_PARITY_BITS {
        return Err(domain(alloc::format!("need 1 <= r <= {MAX_PARITY_BITS}")));
    }
    Ok(())
}

/// The exact Gilbert-Varshamov condition `n (n^2 - 3n + 8) / 6 < 2^r`.
pub fn gv_holds(n: u64, r: u32) -> Result<bool> {
    check_parity_bits(r)?;
    let n = u128::from(n);
    let lhs = n.checked_mul(n * n + 8).and_then(|v| v.checked_sub(3 * n * n));
    // n (n^2 - 3n + 8) < 6 * 2^r, multiplied out to stay in integers
    Ok(match lhs {
        Some(v) => v < 6u128 << r,
        None => false,
    })
}

fn sphere_volume_at_least(n: u64, r: u32) -> bool {
    let total: u128 = (0..=4u64).map(|i| binomial_u128(n, i)).sum();
    total >= 1u128 << r
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, t| acc * u128::from(n - t) / u128::from(t + 1))
}

pub fn construction_size_estimates(r: u32) -> Result<ConstructionEstimates> {
    check_parity_bits(r)?;
    let rf = r as f64;
    // both exact counts grow like 2^{r/3} at most, far below 2^44
    let mut lo = 1u64;
    let mut hi = 1u64 << 44;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if gv_holds(mid, r)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gv_max_n = lo;
    let (mut lo, mut hi) = (0u64, 1u64 << 32);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if sphere_volume_at_least(mid, r) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ConstructionEstimates {
        r,
        gv: libm::cbrt(6.0) * libm::exp2(rf / 3.0),
        sphere: libm::pow(24.0, 0.25) * libm::exp2(rf / 4.0),
        gv_max_n,
        sphere_min_n: hi,
    })
}

pub fn gv_report(r: u32) -> Result<BoundReport> {
    let est = construction_size_estimates(r)?;
    Ok(BoundReport {
        kind: BoundKind::GvEstimate,
        exact: est.gv_max_n as f64,
        asymptotic: est.gv,
        integer: Some(est.gv_max_n),
        rate: None,
        inputs: vec![("r", r as f64)],
        flags: Vec::new(),
    })
}

pub fn sphere_report(r: u32) -> Result<BoundReport> {
    let est = construction_size_estimates(r)?;
    Ok(BoundReport {
        kind: BoundKind::SphereEstimate,
        exact: est.sphere_min_n as f64,
        asymptotic: est.sphere,
        integer: Some(est.sphere_min_n),
        rate: None,
        inputs: vec![("r", r as f64)],
        flags: Vec::new(),
    })
}
