//! Exhaustive verifiers for symmetric disjunct and separable codes, the
//! parity-check distance test, and the BCH parity-check construction of
//! symmetric 2-separable codes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use itertools::Itertools;

use crate::error::{domain, Error, Result};
use crate::gf2m::GaloisField;
use crate::ternary::{column_sum, BinaryWord, CodeMatrix, SubjectSet, TernaryWord};

/// Default exhaustive-search limits.
pub const DISJUNCT_MAX_SUBJECTS: usize = 20;
pub const DISJUNCT_MAX_M: usize = 3;
/// Number of subsets of size `1..=m` whose sums the separable check may
/// tabulate (`C(40, 1) + C(40, 2)`).
pub const SEPARABLE_MAX_SUMS: u64 = 820;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    Disjunct,
    Separable,
    Dmin5,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::Disjunct => "disjunct",
            Property::Separable => "separable",
            Property::Dmin5 => "dmin5",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Property::Disjunct, Property::Separable, Property::Dmin5]
            .into_iter()
            .find(|p| p.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Counterexample {
    /// `sum(set_x)` is included in `sum(set_y)` although `set_x` is not a
    /// subset of `set_y`.
    Inclusion { set_x: SubjectSet, set_y: SubjectSet },
    /// Two different sets with equal ternary sums.
    Collision { set_x: SubjectSet, set_y: SubjectSet },
    /// Distinct columns whose XOR vanishes.
    Dependency { columns: SubjectSet },
}

impl Counterexample {
    /// Recomputes the violation from scratch; true when it reproduces.
    pub fn replay(&self, code: &CodeMatrix) -> Result<bool> {
        use crate::ternary::{is_included, observation};
        Ok(match self {
            Counterexample::Inclusion { set_x, set_y } => {
                is_included(&observation(code, set_x)?, &observation(code, set_y)?)? && !set_x.is_subset(set_y)
            }
            Counterexample::Collision { set_x, set_y } => {
                set_x != set_y && observation(code, set_x)? == observation(code, set_y)?
            }
            Counterexample::Dependency { columns } => {
                let mut acc = BinaryWord::zeros(code.rows());
                for j in columns.iter() {
                    acc = acc.xor(code.column(j))?;
                }
                !columns.is_empty() && acc.is_zero()
            }
        })
    }

    /// The two sums involved, for reporting (absent for dependencies).
    pub fn sums(&self, code: &CodeMatrix) -> Option<(TernaryWord, TernaryWord)> {
        match self {
            Counterexample::Inclusion { set_x, set_y } | Counterexample::Collision { set_x, set_y } => {
                Some((column_sum(code, set_x.indices()), column_sum(code, set_y.indices())))
            }
            Counterexample::Dependency { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationWitness {
    pub property: Property,
    /// Set-size bound checked (absent for the distance test).
    pub m: Option<usize>,
    pub verdict: bool,
    pub counterexample: Option<Counterexample>,
}

impl VerificationWitness {
    fn pass(property: Property, m: Option<usize>) -> Self {
        Self { property, m, verdict: true, counterexample: None }
    }

    fn fail(property: Property, m: Option<usize>, cx: Counterexample) -> Self {
        Self { property, m, verdict: false, counterexample: Some(cx) }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Run even when the instance exceeds the default size limits.
    pub force: bool,
}

/// All subsets of `0..n` with sizes `1..=m`, ordered by size then
/// lexicographically.
fn subsets(n: usize, m: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..=m.min(n)).flat_map(move |s| (0..n).combinations(s))
}

fn count_subsets(n: usize, m: usize) -> u64 {
    (1..=m.min(n) as u64).map(|s| binomial_u64(n as u64, s)).fold(0u64, u64::saturating_add)
}

fn binomial_u64(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, t| acc.saturating_mul(n - t) / (t + 1))
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(domain("m must be at least 1"));
    }
    Ok(())
}

pub fn verify_disjunct(code: &CodeMatrix, m: usize) -> Result<VerificationWitness> {
    verify_disjunct_with(code, m, VerifyOptions::default())
}

/// Symmetric `m`-disjunctness: for all column sets `S`, `T` of sizes
/// `1..=m`, `sum(S)` included in `sum(T)` forces `S ⊆ T`.
///
/// Inclusion is transitive and every member of `S` is included in `sum(S)`,
/// so a violating pair exists exactly when some single column `j` is
/// included in `sum(T)` with `j` outside `T`. The reported witness is the
/// first violation with `S` ordered by size then lexicographically, which is
/// always such a singleton.
pub fn verify_disjunct_with(code: &CodeMatrix, m: usize, opts: VerifyOptions) -> Result<VerificationWitness> {
    check_m(m)?;
    let n = code.cols();
    if !opts.force && (n > DISJUNCT_MAX_SUBJECTS || m > DISJUNCT_MAX_M) {
        return Err(Error::Guard(format!(
            "disjunct check limited to N <= {DISJUNCT_MAX_SUBJECTS}, m <= {DISJUNCT_MAX_M} (got N = {n}, m = {m})"
        )));
    }
    let sums: Vec<(Vec<usize>, TernaryWord)> = subsets(n, m).map(|t| {
        let sum = column_sum(code, &t);
        (t, sum)
    }).collect();
    for j in 0..n {
        let single = column_sum(code, &[j]);
        for (t, sum) in &sums {
            if !t.contains(&j) && sum.includes(&single)? {
                return Ok(VerificationWitness::fail(
                    Property::Disjunct,
                    Some(m),
                    Counterexample::Inclusion {
                        set_x: SubjectSet::from_sorted(alloc::vec![j]),
                        set_y: SubjectSet::from_sorted(t.clone()),
                    },
                ));
            }
        }
    }
    Ok(VerificationWitness::pass(Property::Disjunct, Some(m)))
}

pub fn verify_separable(code: &CodeMatrix, m: usize) -> Result<VerificationWitness> {
    verify_separable_with(code, m, VerifyOptions::default())
}

/// Symmetric `m`-separability: distinct column sets of sizes `1..=m` (sizes
/// may differ) have distinct ternary sums. The witness pairs the first set
/// producing a sum with the first later set that repeats it.
pub fn verify_separable_with(code: &CodeMatrix, m: usize, opts: VerifyOptions) -> Result<VerificationWitness> {
    check_m(m)?;
    let count = count_subsets(code.cols(), m);
    if !opts.force && count > SEPARABLE_MAX_SUMS {
        return Err(Error::Guard(format!(
            "separable check limited to {SEPARABLE_MAX_SUMS} subset sums (got {count})"
        )));
    }
    let mut seen: BTreeMap<TernaryWord, Vec<usize>> = BTreeMap::new();
    for set in subsets(code.cols(), m) {
        let sum = column_sum(code, &set);
        if let Some(first) = seen.get(&sum) {
            return Ok(VerificationWitness::fail(
                Property::Separable,
                Some(m),
                Counterexample::Collision {
                    set_x: SubjectSet::from_sorted(first.clone()),
                    set_y: SubjectSet::from_sorted(set),
                },
            ));
        }
        seen.insert(sum, set);
    }
    Ok(VerificationWitness::pass(Property::Separable, Some(m)))
}

/// First set of at most four distinct columns with vanishing XOR, if any.
/// Checked in order: zero column, repeated column, a pair XOR equal to a
/// third column, two disjoint pairs with equal XOR.
pub fn dependent_columns(h: &CodeMatrix) -> Option<SubjectSet> {
    let cols = h.columns();
    let set = |mut v: Vec<usize>| {
        v.sort_unstable();
        SubjectSet::from_sorted(v)
    };
    if let Some(j) = cols.iter().position(BinaryWord::is_zero) {
        return Some(set(alloc::vec![j]));
    }
    let mut index: BTreeMap<&BinaryWord, usize> = BTreeMap::new();
    for (j, c) in cols.iter().enumerate() {
        if let Some(&first) = index.get(c) {
            return Some(set(alloc::vec![first, j]));
        }
        index.insert(c, j);
    }
    let pairs: Vec<(usize, usize, BinaryWord)> = (0..cols.len())
        .tuple_combinations()
        .map(|(a, b)| (a, b, cols[a].xor(&cols[b]).expect("equal lengths")))
        .collect();
    for (a, b, x) in &pairs {
        if let Some(&c) = index.get(x) {
            return Some(set(alloc::vec![*a, *b, c]));
        }
    }
    let mut by_xor: BTreeMap<&BinaryWord, (usize, usize)> = BTreeMap::new();
    for (a, b, x) in &pairs {
        if let Some(&(c, d)) = by_xor.get(x) {
            return Some(set(alloc::vec![c, d, *a, *b]));
        }
        by_xor.insert(x, (*a, *b));
    }
    None
}

/// True when every set of at most four distinct columns is linearly
/// independent over GF(2), i.e. `h` is the parity-check matrix of a code with
/// minimum distance at least five.
pub fn min_distance_at_least_5(h: &CodeMatrix) -> bool {
    dependent_columns(h).is_none()
}

pub fn verify_dmin5(h: &CodeMatrix) -> VerificationWitness {
    match dependent_columns(h) {
        None => VerificationWitness::pass(Property::Dmin5, None),
        Some(columns) => VerificationWitness::fail(Property::Dmin5, None, Counterexample::Dependency { columns }),
    }
}

/// Parity-check matrix of the double-error-correcting binary BCH code of
/// length `2^k - 1`: column `j` holds `a^j` in rows `0..k` and `a^{3j}` in rows
/// `k..2k`, least significant bit first, for the primitive element `a`.
pub fn bch_parity_check(k: u32) -> Result<CodeMatrix> {
    let field = GaloisField::new(k)?;
    let alpha = field.generator();
    let alpha3 = alpha.pow(3);
    let k = k as usize;
    let mut lo = field.one();
    let mut hi = field.one();
    let mut columns = Vec::with_capacity(field.order() as usize - 1);
    for _ in 0..field.order() - 1 {
        let bits = (0..k).map(|t| lo.value() >> t & 1 == 1).chain((0..k).map(|t| hi.value() >> t & 1 == 1));
        columns.push(BinaryWord::from_bits(bits));
        lo = crate::gf2m::gf_mul(lo, alpha)?;
        hi = crate::gf2m::gf_mul(hi, alpha3)?;
    }
    CodeMatrix::from_columns(columns)
}

/// Parses the matrix text format: one row (test) per line, one `0`/`1` per
/// subject. Surrounding whitespace and blank lines are ignored.
pub fn load_matrix(text: &str) -> Result<CodeMatrix> {
    let rows = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::parse::<BinaryWord>)
        .collect::<Result<Vec<_>>>()?;
    CodeMatrix::from_rows(&rows)
}

/// Inverse of [`load_matrix`]; every row ends with a newline.
pub fn save_matrix(code: &CodeMatrix) -> String {
    let mut out = String::with_capacity(code.rows() * (code.cols() + 1));
    for t in 0..code.rows() {
        out.extend(code.row(t).iter().map(|b| if b { '1' } else { '0' }));
        out.push('\n');
    }
    out
}
