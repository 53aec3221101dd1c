//! The design criterion `alpha(m, p) = min_i I(i) / i` and its maximization
//! over the inclusion probability (and, for two-threshold tests, over every
//! threshold pair).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::info::{
    agt_noisy_unchecked, agt_unchecked, binomial, neg_x_log2, powi, sgt_noisy_unchecked, sgt_unchecked,
    Family, ModelKind, PartitionIndex, TestModel,
};
use crate::optimize::{golden_max, interior_grid, local_maxima};

/// Per-split mutual informations `(i, I(i))` for `i = 1..=m`.
pub fn alpha_terms(m: usize, model: &TestModel) -> Result<Vec<(usize, f64)>> {
    model.validate(m)?;
    PartitionIndex::all(m)?
        .map(|part| Ok((part.i(), crate::info::mutual_information(model, part)?)))
        .collect()
}

/// `min_i I(i) / i`, in bits per defective.
pub fn alpha(m: usize, model: &TestModel) -> Result<f64> {
    Ok(min_ratio(alpha_terms(m, model)?.into_iter().map(|(_, v)| v)))
}

fn min_ratio<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms
        .into_iter()
        .enumerate()
        .map(|(k, v)| v / (k + 1) as f64)
        .fold(f64::INFINITY, f64::min)
}

/// One maximizing design: inclusion probability and, for two-threshold
/// tests, the thresholds `(eta1, eta2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Maximizer {
    pub p: f64,
    pub thresholds: Option<(usize, usize)>,
    pub alpha: f64,
}

impl Maximizer {
    pub fn model(&self, family: Family, q: Option<f64>) -> TestModel {
        let kind = match (family, self.thresholds) {
            (Family::Agt, _) => ModelKind::Agt,
            (Family::Sgt, _) => ModelKind::Sgt,
            (Family::Ggt, Some((eta1, eta2))) => ModelKind::Ggt { eta1, eta2 },
            (Family::Ggt, None) => unreachable!("two-threshold maximizers always carry thresholds"),
        };
        TestModel { kind, p: self.p, q }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaResult {
    pub m: usize,
    pub family: Family,
    pub q: Option<f64>,
    /// Best `alpha` found.
    pub value: f64,
    /// Every refined local optimum within the reporting tolerance of `value`,
    /// sorted by `p` and then thresholds.
    pub maximizers: Vec<Maximizer>,
    /// `(i, I(i))` at the best maximizer.
    pub per_i: Vec<(usize, f64)>,
}

impl AlphaResult {
    /// The maximizer attaining `value` (the first in `p` order on ties).
    pub fn best(&self) -> &Maximizer {
        self.maximizers
            .iter()
            .fold(&self.maximizers[0], |acc, mx| if mx.alpha > acc.alpha { mx } else { acc })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerSettings {
    /// Interior grid points `p_j = (j + 1) / (grid_points + 1)`.
    pub grid_points: usize,
    /// Grid local maxima this far below the grid optimum are not refined.
    pub refine_window: f64,
    /// Golden-section bracket width at which refinement stops.
    pub p_tolerance: f64,
    /// Refined optima within this distance of the best are reported.
    pub report_tolerance: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { grid_points: 2001, refine_window: 1e-2, p_tolerance: 1e-12, report_tolerance: 1e-6 }
    }
}

/// Maximizes `alpha` over `p` (and thresholds for [`Family::Ggt`]) with the
/// default settings.
pub fn alpha_opt(m: usize, family: Family, q: Option<f64>) -> Result<AlphaResult> {
    alpha_opt_with(m, family, q, &OptimizerSettings::default())
}

pub fn alpha_opt_with(m: usize, family: Family, q: Option<f64>, settings: &OptimizerSettings) -> Result<AlphaResult> {
    PartitionIndex::new(m, 1)?;
    if let Some(q) = q {
        crate::error::check_probability("q", q)?;
        if family == Family::Ggt {
            return Err(domain("noisy two-threshold testing has no closed form"));
        }
    }
    if settings.grid_points < 3 {
        return Err(domain("optimizer grid needs at least 3 points"));
    }

    let grid = interior_grid(settings.grid_points);
    let configs: Vec<Option<(usize, usize)>> = match family {
        Family::Ggt => (0..m).flat_map(|e1| (e1..m).map(move |e2| Some((e1, e2)))).collect(),
        _ => vec![None],
    };

    // values[c][j]: alpha of configuration c at grid point j
    let mut values = vec![vec![0.0; grid.len()]; configs.len()];
    for (j, &p) in grid.iter().enumerate() {
        match family {
            Family::Ggt => {
                let table = GgtTable::new(m, p, true);
                for (c, cfg) in configs.iter().enumerate() {
                    let (e1, e2) = cfg.expect("threshold pair");
                    values[c][j] = table.alpha(e1, e2);
                }
            }
            _ => values[0][j] = closed_alpha(m, family, p, q),
        }
    }
    let grid_best = values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut found: Vec<Maximizer> = Vec::new();
    for (cfg, row) in configs.iter().zip(&values) {
        for j in local_maxima(row) {
            if row[j] < grid_best - settings.refine_window {
                continue;
            }
            let lo = if j == 0 { 0.0 } else { grid[j - 1] };
            let hi = if j + 1 == grid.len() { 1.0 } else { grid[j + 1] };
            let objective = |p: f64| match cfg {
                Some((e1, e2)) => GgtTable::new(m, p, false).alpha(*e1, *e2),
                None => closed_alpha(m, family, p, q),
            };
            let (mut p, mut a) = golden_max(objective, lo, hi, settings.p_tolerance);
            if row[j] > a {
                (p, a) = (grid[j], row[j]);
            }
            found.push(Maximizer { p, thresholds: *cfg, alpha: a });
        }
    }

    let value = found.iter().map(|mx| mx.alpha).fold(f64::NEG_INFINITY, f64::max);
    found.retain(|mx| mx.alpha >= value - settings.report_tolerance);
    found.sort_by(|a, b| a.p.total_cmp(&b.p).then(a.thresholds.cmp(&b.thresholds)));
    let mut maximizers: Vec<Maximizer> = Vec::with_capacity(found.len());
    for mx in found {
        match maximizers
            .iter_mut()
            .find(|kept| kept.thresholds == mx.thresholds && (kept.p - mx.p).abs() < 1e-6)
        {
            Some(kept) if mx.alpha > kept.alpha => *kept = mx,
            Some(_) => {}
            None => maximizers.push(mx),
        }
    }

    let mut result = AlphaResult { m, family, q, value, maximizers, per_i: Vec::new() };
    let best = result.best().model(family, q);
    result.per_i = alpha_terms(m, &best)?;
    Ok(result)
}

fn closed_alpha(m: usize, family: Family, p: f64, q: Option<f64>) -> f64 {
    min_ratio((1..=m).map(|i| match (family, q) {
        (Family::Agt, None) => agt_unchecked(m, i, p),
        (Family::Agt, Some(q)) => agt_noisy_unchecked(m, i, p, q),
        (Family::Sgt, None) => sgt_unchecked(m, i, p),
        (Family::Sgt, Some(q)) => sgt_noisy_unchecked(m, i, p, q),
        (Family::Ggt, _) => unreachable!("two-threshold alpha goes through GgtTable"),
    }))
}

/// Per-`p` tables that make two-threshold mutual information cheap for every
/// threshold pair at once.
///
/// With `X ~ Bin(i, p)` for the `D1` count, it stores `f(P(X <= t))` and
/// `f(P(X > t))` for `f(x) = -x log2 x`, and optionally `f(P(a < X <= b))`
/// for all `a <= b`; `mi` then assembles the three-point and two-point
/// entropies from table lookups.
pub(crate) struct GgtTable {
    m: usize,
    /// `pmf[n][l] = P(Bin(n, p) = l)`
    pmf: Vec<Vec<f64>>,
    lower_f: Vec<Vec<f64>>,
    upper_f: Vec<Vec<f64>>,
    mid_f: Option<Vec<f64>>,
}

impl GgtTable {
    pub(crate) fn new(m: usize, p: f64, with_mid: bool) -> Self {
        let r = 1.0 - p;
        let pmf: Vec<Vec<f64>> = (0..=m)
            .map(|n| (0..=n).map(|l| binomial(n, l) * powi(p, l) * powi(r, n - l)).collect())
            .collect();
        let mut lower_f = vec![vec![0.0; m]; m + 1];
        let mut upper_f = vec![vec![0.0; m]; m + 1];
        for i in 1..=m {
            let mut acc = 0.0;
            for t in 0..m {
                if t <= i {
                    acc += pmf[i][t];
                }
                lower_f[i][t] = neg_x_log2(acc.min(1.0));
            }
            for t in 0..m {
                let tail: f64 = (t + 1..=i).rev().map(|l| pmf[i][l]).sum();
                upper_f[i][t] = neg_x_log2(tail);
            }
        }
        let mid_f = with_mid.then(|| {
            let mut table = vec![0.0; (m + 1) * m * m];
            for i in 1..=m {
                for a in 0..m {
                    let mut acc = 0.0;
                    for b in a..m {
                        if b >= 1 && b <= i && b > a {
                            acc += pmf[i][b];
                        }
                        table[(i * m + a) * m + b] = neg_x_log2(acc);
                    }
                }
            }
            table
        });
        Self { m, pmf, lower_f, upper_f, mid_f }
    }

    fn mid(&self, i: usize, a: usize, b: usize) -> f64 {
        match &self.mid_f {
            Some(table) => table[(i * self.m + a) * self.m + b],
            None => neg_x_log2((a + 1..=b.min(i)).map(|l| self.pmf[i][l]).sum()),
        }
    }

    pub(crate) fn mi(&self, i: usize, eta1: usize, eta2: usize) -> f64 {
        let d2 = &self.pmf[self.m - i];
        let mut total = 0.0;
        for k in 0..=eta1.min(self.m - i) {
            let (a, b) = (eta1 - k, eta2 - k);
            total += d2[k] * (self.lower_f[i][a] + self.upper_f[i][b] + self.mid(i, a, b));
        }
        for k in eta1 + 1..=eta2.min(self.m - i) {
            let b = eta2 - k;
            total += d2[k] * (self.lower_f[i][b] + self.upper_f[i][b]);
        }
        total
    }

    pub(crate) fn alpha(&self, eta1: usize, eta2: usize) -> f64 {
        min_ratio((1..=self.m).map(|i| self.mi(i, eta1, eta2)))
    }
}

/// Checks the table evaluator against the direct closed form.
#[cfg(test)]
fn table_matches_closed_form(m: usize, p: f64) -> bool {
    let full = GgtTable::new(m, p, true);
    let lazy = GgtTable::new(m, p, false);
    (0..m).all(|e1| {
        (e1..m).all(|e2| {
            (1..=m).all(|i| {
                let direct = crate::info::mi_ggt(PartitionIndex::new(m, i).unwrap(), p, e1, e2).unwrap();
                (full.mi(i, e1, e2) - direct).abs() < 1e-12 && (lazy.mi(i, e1, e2) - direct).abs() < 1e-12
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_examples() {
        assert!((alpha(2, &TestModel::sgt(0.5)).unwrap() - 0.75).abs() < 1e-15);
        let p = 1.0 - libm::sqrt(0.5);
        assert!((alpha(2, &TestModel::agt(p)).unwrap() - 0.5).abs() < 1e-12);
        assert!((alpha(2, &TestModel::ggt(0.5, 0, 1)).unwrap() - 0.75).abs() < 1e-15);
        assert!(alpha(1, &TestModel::sgt(0.5)).is_err());
    }

    #[test]
    fn table_evaluator_agrees_with_closed_form() {
        for m in 2..=9 {
            for p in [0.013, 0.2, 0.5, 0.77, 0.999] {
                assert!(table_matches_closed_form(m, p), "m={m} p={p}");
            }
        }
    }

    #[test]
    fn sgt_and_agt_optima_at_two() {
        let s = alpha_opt(2, Family::Sgt, None).unwrap();
        assert!((s.value - 0.75).abs() < 1e-12);
        assert_eq!(s.maximizers.len(), 1);
        assert!((s.maximizers[0].p - 0.5).abs() < 1e-6);
        let a = alpha_opt(2, Family::Agt, None).unwrap();
        assert!((a.value - 0.5).abs() < 1e-9);
        assert!((a.maximizers[0].p - (1.0 - libm::sqrt(0.5))).abs() < 1e-5);
    }

    #[test]
    fn ggt_small_rows() {
        let r = alpha_opt(2, Family::Ggt, None).unwrap();
        assert_eq!(r.maximizers.len(), 1);
        assert_eq!(r.maximizers[0].thresholds, Some((0, 1)));
        let r = alpha_opt(3, Family::Ggt, None).unwrap();
        let rows: Vec<_> = r.maximizers.iter().map(|mx| (libm::round(mx.p * 1000.0), mx.thresholds)).collect();
        assert_eq!(rows, [(351.0, Some((0, 1))), (649.0, Some((1, 2)))]);
        for (i, v) in &r.per_i {
            assert!(v / *i as f64 >= r.value - 1e-9);
        }
    }

    #[test]
    fn noisy_ggt_is_rejected() {
        assert!(alpha_opt(3, Family::Ggt, Some(0.5)).is_err());
        assert!(alpha_opt(1, Family::Sgt, None).is_err());
    }
}
