//! Per-test mutual information `I(X_{D1}; X_{D2}, y)` for asymmetric,
//! symmetric and two-threshold group testing, in bits.
//!
//! The defective set of size `m` is split into `D1` (size `i`) and `D2`
//! (size `m - i`). Every subject joins a test independently with
//! probability `p`. Noisy variants pass the test outcome through a
//! Bernoulli(`q`) noise word: ternary-summed for symmetric tests, OR-ed for
//! asymmetric tests.
//!
//! The closed forms are cross-checked by [`mi_oracle`], which enumerates all
//! `2^m` inclusion patterns and evaluates the conditional entropies directly.

use alloc::vec;

use crate::error::{check_probability, domain, Error, Result};

/// Tolerance for the three-point simplex `z + g <= 1` before it is an error.
const SIMPLEX_SLACK: f64 = 1e-12;

/// Largest defective count the enumeration oracle accepts (cost `2^m`).
pub const ORACLE_MAX_M: usize = 20;

/// `-x log2 x` with `0 log 0 = 0`.
#[inline]
pub(crate) fn neg_x_log2(x: f64) -> f64 {
    if x > 0.0 {
        -x * libm::log2(x)
    } else {
        0.0
    }
}

/// Binary entropy `h(z)` in bits.
pub fn entropy2(z: f64) -> Result<f64> {
    check_probability("z", z)?;
    Ok(neg_x_log2(z) + neg_x_log2(1.0 - z))
}

/// Ternary entropy of `(z, g, 1 - z - g)` in bits.
pub fn entropy3(z: f64, g: f64) -> Result<f64> {
    check_probability("z", z)?;
    check_probability("g", g)?;
    let rest = 1.0 - z - g;
    if rest < -SIMPLEX_SLACK {
        return Err(domain("entropy3 arguments leave the probability simplex"));
    }
    Ok(neg_x_log2(z) + neg_x_log2(g) + neg_x_log2(rest.max(0.0)))
}

#[inline]
fn h2(z: f64) -> f64 {
    neg_x_log2(z) + neg_x_log2(1.0 - z)
}

#[inline]
fn h3(z: f64, g: f64) -> f64 {
    let rest = 1.0 - z - g;
    debug_assert!(rest >= -SIMPLEX_SLACK, "h3({z}, {g}) off the simplex");
    neg_x_log2(z) + neg_x_log2(g) + neg_x_log2(rest.max(0.0))
}

#[inline]
pub(crate) fn powi(x: f64, k: usize) -> f64 {
    libm::pow(x, k as f64)
}

/// `C(n, k)` as a float, by the multiplicative formula.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

/// Which testing scheme produces the outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Agt,
    Sgt,
    Ggt,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Agt => "agt",
            Family::Sgt => "sgt",
            Family::Ggt => "ggt",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Classical Boolean-OR tests.
    Agt,
    /// Ternary tests: 0 with no defective pooled, 1 with all of them, else 2.
    Sgt,
    /// Two thresholds on the pooled defective count `k`: 0 when `k <= eta1`,
    /// 1 when `k > eta2`, else 2.
    Ggt { eta1: usize, eta2: usize },
}

impl ModelKind {
    pub fn family(self) -> Family {
        match self {
            ModelKind::Agt => Family::Agt,
            ModelKind::Sgt => Family::Sgt,
            ModelKind::Ggt { .. } => Family::Ggt,
        }
    }

    /// Outcome symbol (0, 1 or 2) for `k` pooled defectives out of `m`.
    pub fn outcome(self, k: usize, m: usize) -> u8 {
        match self {
            ModelKind::Agt => u8::from(k > 0),
            ModelKind::Sgt if k == 0 => 0,
            ModelKind::Sgt if k == m => 1,
            ModelKind::Sgt => 2,
            ModelKind::Ggt { eta1, .. } if k <= eta1 => 0,
            ModelKind::Ggt { eta2, .. } if k > eta2 => 1,
            ModelKind::Ggt { .. } => 2,
        }
    }
}

/// A fully parameterized testing model: scheme, inclusion probability `p`,
/// and noise parameter `q` (absent for noise-free testing).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestModel {
    pub kind: ModelKind,
    pub p: f64,
    pub q: Option<f64>,
}

impl TestModel {
    pub fn agt(p: f64) -> Self {
        Self { kind: ModelKind::Agt, p, q: None }
    }

    pub fn sgt(p: f64) -> Self {
        Self { kind: ModelKind::Sgt, p, q: None }
    }

    pub fn ggt(p: f64, eta1: usize, eta2: usize) -> Self {
        Self { kind: ModelKind::Ggt { eta1, eta2 }, p, q: None }
    }

    pub fn with_noise(self, q: f64) -> Self {
        Self { q: Some(q), ..self }
    }

    /// Checks the parameters against a defective count `m`.
    pub fn validate(&self, m: usize) -> Result<()> {
        check_probability("p", self.p)?;
        if let Some(q) = self.q {
            check_probability("q", q)?;
        }
        if let ModelKind::Ggt { eta1, eta2 } = self.kind {
            if eta1 > eta2 || eta2 + 1 > m {
                return Err(Error::Thresholds { eta1, eta2, m });
            }
            if self.q.is_some() {
                return Err(domain("noisy two-threshold testing has no closed form"));
            }
        }
        Ok(())
    }
}

/// The split `|D1| = i`, `|D2| = m - i` of a defective set of size `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PartitionIndex {
    m: usize,
    i: usize,
}

impl PartitionIndex {
    pub fn new(m: usize, i: usize) -> Result<Self> {
        if m < 2 {
            return Err(domain("closed forms need m >= 2 defectives"));
        }
        if i == 0 || i > m {
            return Err(domain("partition size i must satisfy 1 <= i <= m"));
        }
        Ok(Self { m, i })
    }

    pub fn m(self) -> usize {
        self.m
    }

    pub fn i(self) -> usize {
        self.i
    }

    /// Every split `i = 1..=m`.
    pub fn all(m: usize) -> Result<impl Iterator<Item = PartitionIndex>> {
        PartitionIndex::new(m, 1)?;
        Ok((1..=m).map(move |i| PartitionIndex { m, i }))
    }
}

/// Noise-free symmetric testing.
pub fn mi_sgt(part: PartitionIndex, p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(sgt_unchecked(part.m, part.i, p))
}

pub(crate) fn sgt_unchecked(m: usize, i: usize, p: f64) -> f64 {
    let r = 1.0 - p;
    if i < m {
        powi(r, m - i) * h2(powi(r, i)) + powi(p, m - i) * h2(powi(p, i))
    } else {
        h3(powi(p, m), powi(r, m))
    }
}

/// Noise-free asymmetric (Boolean OR) testing.
pub fn mi_agt(part: PartitionIndex, p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(agt_unchecked(part.m, part.i, p))
}

pub(crate) fn agt_unchecked(m: usize, i: usize, p: f64) -> f64 {
    let r = 1.0 - p;
    powi(r, m - i) * h2(powi(r, i))
}

/// Symmetric testing under dilution noise (ternary sum with Bernoulli(`q`)).
pub fn mi_sgt_noisy(part: PartitionIndex, p: f64, q: f64) -> Result<f64> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    Ok(sgt_noisy_unchecked(part.m, part.i, p, q))
}

pub(crate) fn sgt_noisy_unchecked(m: usize, i: usize, p: f64, q: f64) -> f64 {
    let r = 1.0 - p;
    let given_all = (powi(r, m) + powi(p, m)) * h2(q);
    let given_d2 = if i < m {
        powi(r, m - i) * h2(powi(r, i) * (1.0 - q)) + powi(p, m - i) * h2(powi(p, i) * q)
    } else {
        h3(powi(p, m) * q, powi(r, m) * (1.0 - q))
    };
    given_d2 - given_all
}

/// Asymmetric testing with false alarms (outcome OR-ed with Bernoulli(`q`)).
pub fn mi_agt_noisy(part: PartitionIndex, p: f64, q: f64) -> Result<f64> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    Ok(agt_noisy_unchecked(part.m, part.i, p, q))
}

pub(crate) fn agt_noisy_unchecked(m: usize, i: usize, p: f64, q: f64) -> f64 {
    let r = 1.0 - p;
    powi(r, m - i) * h2(powi(r, i) * (1.0 - q)) - powi(r, m) * h2(q)
}

/// Two-threshold testing with thresholds `eta1 <= eta2 <= m - 1`.
///
/// With `w2` the number of `D2` members pooled, `p0(k) = P(w2 = k)`, and
/// given `w2 = k` the outcome is 0 with probability `p1(k) = P(X <= eta1 - k)`
/// and 1 with probability `p2(k) = P(X > eta2 - k)` for `X ~ Bin(i, p)`.
/// Once `k` exceeds `eta1` the outcome can no longer be 0, and past `eta2`
/// it is always 1 and carries no information.
pub fn mi_ggt(part: PartitionIndex, p: f64, eta1: usize, eta2: usize) -> Result<f64> {
    check_probability("p", p)?;
    let (m, i) = (part.m, part.i);
    if eta1 > eta2 || eta2 + 1 > m {
        return Err(Error::Thresholds { eta1, eta2, m });
    }
    let r = 1.0 - p;
    let pmf = |n: usize, l: usize| binomial(n, l) * powi(p, l) * powi(r, n - l);
    let lower = |t: usize| (0..=t.min(i)).map(|l| pmf(i, l)).sum::<f64>();
    // upper tail summed directly rather than as 1 - lower
    let upper = |t: usize| (t + 1..=i).map(|l| pmf(i, l)).sum::<f64>();

    let mut total = 0.0;
    for k in 0..=eta1.min(m - i) {
        let p1 = lower(eta1 - k);
        let p2 = upper(eta2 - k);
        if p1 + p2 > 1.0 + SIMPLEX_SLACK {
            return Err(domain("threshold outcome probabilities exceed one"));
        }
        total += pmf(m - i, k) * h3(p1, p2);
    }
    for k in eta1 + 1..=eta2.min(m - i) {
        total += pmf(m - i, k) * h2(upper(eta2 - k));
    }
    Ok(total)
}

/// Mutual information for a fully parameterized model, using the closed form
/// that matches it.
pub fn mutual_information(model: &TestModel, part: PartitionIndex) -> Result<f64> {
    model.validate(part.m)?;
    let (m, i, p) = (part.m, part.i, model.p);
    Ok(match (model.kind, model.q) {
        (ModelKind::Agt, None) => agt_unchecked(m, i, p),
        (ModelKind::Agt, Some(q)) => agt_noisy_unchecked(m, i, p, q),
        (ModelKind::Sgt, None) => sgt_unchecked(m, i, p),
        (ModelKind::Sgt, Some(q)) => sgt_noisy_unchecked(m, i, p, q),
        (ModelKind::Ggt { eta1, eta2 }, _) => mi_ggt(part, p, eta1, eta2)?,
    })
}

/// Outcome distribution over `{0, 1, 2}` after the noise channel.
fn channel(kind: ModelKind, symbol: u8, q: Option<f64>) -> [f64; 3] {
    let mut out = [0.0; 3];
    match (q, kind) {
        (None, _) => out[symbol as usize] = 1.0,
        // OR with the noise bit
        (Some(q), ModelKind::Agt) => match symbol {
            0 => {
                out[0] = 1.0 - q;
                out[1] = q;
            }
            _ => out[1] = 1.0,
        },
        // ternary sum with the noise bit
        (Some(q), _) => match symbol {
            0 => {
                out[0] = 1.0 - q;
                out[2] = q;
            }
            1 => {
                out[1] = q;
                out[2] = 1.0 - q;
            }
            _ => out[2] = 1.0,
        },
    }
    out
}

/// Enumeration oracle: builds the exact joint law of `(X_{D1}, X_{D2}, y)`
/// for one test by walking all `2^m` inclusion patterns, then returns
/// `H(y | X_{D2}) - H(y | X_D)`.
pub fn mi_oracle(model: &TestModel, part: PartitionIndex) -> Result<f64> {
    let (m, i) = (part.m, part.i);
    if m > ORACLE_MAX_M {
        return Err(Error::Guard(alloc::format!("oracle enumerates 2^m patterns; m = {m} > {ORACLE_MAX_M}")));
    }
    model.validate(m)?;
    let p = model.p;
    // bits 0..i are D1, bits i..m are D2
    let mut joint_d2 = vec![[0.0f64; 3]; 1 << (m - i)];
    let mut h_given_all = 0.0;
    for pattern in 0u32..(1 << m) {
        let k = pattern.count_ones() as usize;
        let mut weight = 1.0;
        for _ in 0..k {
            weight *= p;
        }
        for _ in k..m {
            weight *= 1.0 - p;
        }
        let out = channel(model.kind, model.kind.outcome(k, m), model.q);
        h_given_all += weight * out.iter().map(|&v| neg_x_log2(v)).sum::<f64>();
        let slot = &mut joint_d2[(pattern >> i) as usize];
        for (acc, v) in slot.iter_mut().zip(out) {
            *acc += weight * v;
        }
    }
    let h_given_d2: f64 = joint_d2
        .iter()
        .map(|row| {
            let mass: f64 = row.iter().sum();
            if mass > 0.0 {
                row.iter().map(|&v| mass * neg_x_log2(v / mass)).sum()
            } else {
                0.0
            }
        })
        .sum();
    Ok(h_given_d2 - h_given_all)
}
