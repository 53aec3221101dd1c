//! Ternary observation algebra.
//!
//! Symbols live in `{0, 1, 2}`. Ternary addition keeps `0 + 0 = 0` and
//! `1 + 1 = 1`; every other combination is `2`. A noise-free symmetric test
//! outcome is the ternary sum of the defectives' binary signatures.
//!
//! Words are stored as two packed bit planes: `ones` marks positions equal to
//! 1 and `nonzero` marks positions different from 0 (so `ones ⊆ nonzero`, and
//! a 2 is a set `nonzero` bit with a clear `ones` bit). Under that encoding
//! ternary addition is `(ones₁ & ones₂, nonzero₁ | nonzero₂)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Add;
use core::str::FromStr;

use rand::Rng;

use crate::error::{check_probability, Error, Result};

const WORD_BITS: usize = 64;

pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

pub(crate) fn tail_mask(len: usize) -> u64 {
    match len % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum TernarySymbol {
    Zero = 0,
    One = 1,
    Two = 2,
}

impl TernarySymbol {
    pub fn from_value(value: u8) -> Option<Self> {
        match value {
            0 => Some(Self::Zero),
            1 => Some(Self::One),
            2 => Some(Self::Two),
            _ => None,
        }
    }

    pub fn value(self) -> u8 {
        self as u8
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            '0' => Ok(Self::Zero),
            '1' => Ok(Self::One),
            '2' => Ok(Self::Two),
            other => Err(Error::InvalidSymbol(other)),
        }
    }

    pub fn to_char(self) -> char {
        (b'0' + self.value()) as char
    }
}

impl Add for TernarySymbol {
    type Output = TernarySymbol;

    fn add(self, rhs: Self) -> Self {
        tern_add(self, rhs)
    }
}

/// Ternary addition: equal 0s or equal 1s are preserved, anything else is 2.
pub fn tern_add(a: TernarySymbol, b: TernarySymbol) -> TernarySymbol {
    use TernarySymbol::*;
    match (a, b) {
        (Zero, Zero) => Zero,
        (One, One) => One,
        _ => Two,
    }
}

/// A binary signature of fixed length (one bit per test).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryWord {
    len: usize,
    bits: Vec<u64>,
}

impl BinaryWord {
    pub fn zeros(len: usize) -> Self {
        Self { len, bits: vec![0; words_for(len)] }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut word = Self::zeros(0);
        for (t, b) in bits.into_iter().enumerate() {
            if t % WORD_BITS == 0 {
                word.bits.push(0);
            }
            if b {
                word.bits[t / WORD_BITS] |= 1 << (t % WORD_BITS);
            }
            word.len = t + 1;
        }
        word
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, t: usize) -> bool {
        assert!(t < self.len, "bit {t} out of range for length {}", self.len);
        self.bits[t / WORD_BITS] >> (t % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, t: usize, value: bool) {
        assert!(t < self.len, "bit {t} out of range for length {}", self.len);
        let mask = 1u64 << (t % WORD_BITS);
        if value {
            self.bits[t / WORD_BITS] |= mask;
        } else {
            self.bits[t / WORD_BITS] &= !mask;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |t| self.get(t))
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Packed little-endian bit storage; bit `t` is bit `t % 64` of word `t / 64`.
    pub fn as_words(&self) -> &[u64] {
        &self.bits
    }

    /// Componentwise XOR (addition over GF(2)).
    pub fn xor(&self, other: &Self) -> Result<Self> {
        same_len(self.len, other.len)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect();
        Ok(Self { len: self.len, bits })
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryWord({self})")
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidSymbol(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(bits))
    }
}

/// A word over `{0, 1, 2}`: an observation vector or a ternary sum of codewords.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TernaryWord {
    len: usize,
    ones: Vec<u64>,
    nonzero: Vec<u64>,
}

impl TernaryWord {
    pub fn from_symbols<I: IntoIterator<Item = TernarySymbol>>(symbols: I) -> Self {
        let mut ones = Vec::new();
        let mut nonzero = Vec::new();
        let mut len = 0;
        for (t, s) in symbols.into_iter().enumerate() {
            if t % WORD_BITS == 0 {
                ones.push(0);
                nonzero.push(0);
            }
            let bit = 1u64 << (t % WORD_BITS);
            match s {
                TernarySymbol::Zero => {}
                TernarySymbol::One => {
                    ones[t / WORD_BITS] |= bit;
                    nonzero[t / WORD_BITS] |= bit;
                }
                TernarySymbol::Two => nonzero[t / WORD_BITS] |= bit,
            }
            len = t + 1;
        }
        Self { len, ones, nonzero }
    }

    /// Builds a word from its bit planes. Bits of `ones` outside `nonzero`
    /// would encode an invalid symbol and are rejected.
    pub(crate) fn from_planes(len: usize, mut ones: Vec<u64>, mut nonzero: Vec<u64>) -> Self {
        debug_assert_eq!(ones.len(), words_for(len));
        debug_assert_eq!(nonzero.len(), words_for(len));
        debug_assert!(ones.iter().zip(&nonzero).all(|(o, n)| o & !n == 0));
        if let (Some(o), Some(n)) = (ones.last_mut(), nonzero.last_mut()) {
            *o &= tail_mask(len);
            *n &= tail_mask(len);
        }
        Self { len, ones, nonzero }
    }

    pub fn filled(len: usize, symbol: TernarySymbol) -> Self {
        Self::from_symbols(core::iter::repeat(symbol).take(len))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, t: usize) -> TernarySymbol {
        assert!(t < self.len, "symbol {t} out of range for length {}", self.len);
        let (w, b) = (t / WORD_BITS, t % WORD_BITS);
        match (self.ones[w] >> b & 1, self.nonzero[w] >> b & 1) {
            (0, 0) => TernarySymbol::Zero,
            (1, _) => TernarySymbol::One,
            _ => TernarySymbol::Two,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = TernarySymbol> + '_ {
        (0..self.len).map(move |t| self.get(t))
    }

    pub fn count(&self, symbol: TernarySymbol) -> usize {
        let ones: usize = self.ones.iter().map(|w| w.count_ones() as usize).sum();
        let nonzero: usize = self.nonzero.iter().map(|w| w.count_ones() as usize).sum();
        match symbol {
            TernarySymbol::Zero => self.len - nonzero,
            TernarySymbol::One => ones,
            TernarySymbol::Two => nonzero - ones,
        }
    }

    /// Positions equal to 1.
    pub fn ones_plane(&self) -> &[u64] {
        &self.ones
    }

    /// Positions different from 0.
    pub fn nonzero_plane(&self) -> &[u64] {
        &self.nonzero
    }

    /// Componentwise ternary sum of two words of equal length.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        same_len(self.len, other.len)?;
        let ones = self.ones.iter().zip(&other.ones).map(|(a, b)| a & b).collect();
        let nonzero = self.nonzero.iter().zip(&other.nonzero).map(|(a, b)| a | b).collect();
        Ok(Self { len: self.len, ones, nonzero })
    }

    /// `true` when `other` is included in `self`, i.e. `self + other == self`.
    pub fn includes(&self, other: &Self) -> Result<bool> {
        same_len(self.len, other.len)?;
        Ok(planes_include(&self.ones, &self.nonzero, &other.ones, &other.nonzero))
    }
}

/// Inclusion test on raw planes: `y ⊑ x` iff every 1 of `x` is a 1 of `y`
/// and every non-zero of `y` is a non-zero of `x`.
pub(crate) fn planes_include(x_ones: &[u64], x_nonzero: &[u64], y_ones: &[u64], y_nonzero: &[u64]) -> bool {
    x_ones
        .iter()
        .zip(x_nonzero)
        .zip(y_ones.iter().zip(y_nonzero))
        .all(|((xo, xn), (yo, yn))| xo & !yo == 0 && yn & !xn == 0)
}

impl From<&BinaryWord> for TernaryWord {
    fn from(word: &BinaryWord) -> Self {
        Self { len: word.len, ones: word.bits.clone(), nonzero: word.bits.clone() }
    }
}

impl fmt::Debug for TernaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TernaryWord({self})")
    }
}

impl fmt::Display for TernaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use fmt::Write;
        for s in self.iter() {
            f.write_char(s.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for TernaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s.chars().map(TernarySymbol::from_char).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_symbols(symbols))
    }
}

fn same_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}

/// Ternary sum of a non-empty list of equal-length words.
pub fn word_sum(words: &[TernaryWord]) -> Result<TernaryWord> {
    let (first, rest) = words.split_first().ok_or(Error::Empty("word list"))?;
    rest.iter().try_fold(first.clone(), |acc, w| acc.try_add(w))
}

/// `true` iff `y` is included in `x` (`x + y == x`).
pub fn is_included(y: &TernaryWord, x: &TernaryWord) -> Result<bool> {
    x.includes(y)
}

/// An `n × N` binary design: column `j` is the test signature of subject `j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CodeMatrix {
    rows: usize,
    columns: Vec<BinaryWord>,
}

impl CodeMatrix {
    pub fn from_columns(columns: Vec<BinaryWord>) -> Result<Self> {
        let rows = columns.first().ok_or(Error::Empty("code has no columns"))?.len();
        if rows == 0 {
            return Err(Error::Empty("code has no rows"));
        }
        for c in &columns {
            same_len(rows, c.len())?;
        }
        Ok(Self { rows, columns })
    }

    /// Builds a code from its rows (tests), each row listing one bit per subject.
    pub fn from_rows(rows: &[BinaryWord]) -> Result<Self> {
        let width = rows.first().ok_or(Error::Empty("code has no rows"))?.len();
        for r in rows {
            same_len(width, r.len())?;
        }
        let columns = (0..width).map(|j| BinaryWord::from_bits(rows.iter().map(|r| r.get(j)))).collect();
        Self::from_columns(columns)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_columns((0..n).map(|j| BinaryWord::from_bits((0..n).map(|t| t == j))).collect())
    }

    /// Number of tests `n`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of subjects `N`.
    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.columns[col].get(row)
    }

    pub fn column(&self, j: usize) -> &BinaryWord {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[BinaryWord] {
        &self.columns
    }

    pub fn row(&self, t: usize) -> BinaryWord {
        BinaryWord::from_bits(self.columns.iter().map(|c| c.get(t)))
    }

    fn check_subjects(&self, set: &SubjectSet) -> Result<()> {
        match set.indices.last() {
            Some(&index) if index >= self.cols() => Err(Error::SubjectIndex { index, subjects: self.cols() }),
            _ => Ok(()),
        }
    }
}

impl fmt::Debug for CodeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CodeMatrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols())
            .field("columns", &self.columns)
            .finish()
    }
}

/// A sorted set of subject indices (a defective set, or one side of a
/// verification witness).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubjectSet {
    indices: Vec<usize>,
}

impl SubjectSet {
    pub fn new<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateSubject(w[0]));
        }
        Ok(Self { indices })
    }

    /// Wraps indices already known to be strictly increasing.
    pub(crate) fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self { indices }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.indices.iter().all(|&j| other.contains(j))
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }
}

impl fmt::Display for SubjectSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, j) in self.indices.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{j}")?;
        }
        f.write_str("}")
    }
}

/// Ternary sum of the selected columns, without validation.
pub(crate) fn column_sum(code: &CodeMatrix, subjects: &[usize]) -> TernaryWord {
    let words = words_for(code.rows);
    let mut ones = vec![u64::MAX; words];
    let mut nonzero = vec![0u64; words];
    for &j in subjects {
        for (k, &w) in code.columns[j].bits.iter().enumerate() {
            ones[k] &= w;
            nonzero[k] |= w;
        }
    }
    TernaryWord::from_planes(code.rows, ones, nonzero)
}

/// Noise-free symmetric observation: the ternary sum of the defectives' columns.
pub fn observation(code: &CodeMatrix, defectives: &SubjectSet) -> Result<TernaryWord> {
    if defectives.is_empty() {
        return Err(Error::Empty("defective set"));
    }
    code.check_subjects(defectives)?;
    Ok(column_sum(code, defectives.indices()))
}

/// Per-test outcome from the number `k` of defectives in the pool:
/// 0 when `k <= eta1`, 1 when `k > eta2`, otherwise 2.
pub(crate) fn threshold_word(code: &CodeMatrix, subjects: &[usize], eta1: usize, eta2: usize) -> TernaryWord {
    let words = words_for(code.rows);
    // at_least[c] marks tests containing at least c of the subjects seen so far.
    let depth = eta2 + 2;
    let mut at_least = vec![vec![0u64; words]; depth];
    at_least[0].iter_mut().for_each(|w| *w = u64::MAX);
    for &j in subjects {
        let col = &code.columns[j].bits;
        for c in (1..depth).rev() {
            let (lower, upper) = at_least.split_at_mut(c);
            for k in 0..words {
                upper[0][k] |= lower[c - 1][k] & col[k];
            }
        }
    }
    let ones = at_least[eta2 + 1].clone();
    let nonzero = at_least[eta1 + 1].clone();
    TernaryWord::from_planes(code.rows, ones, nonzero)
}

/// Generalized (two-threshold) observation: a test reads 0 when at most
/// `eta1` defectives are pooled, 1 when more than `eta2` are, and 2 otherwise.
pub fn ggt_observation(code: &CodeMatrix, defectives: &SubjectSet, eta1: usize, eta2: usize) -> Result<TernaryWord> {
    if defectives.is_empty() {
        return Err(Error::Empty("defective set"));
    }
    code.check_subjects(defectives)?;
    let m = defectives.len();
    if eta1 > eta2 || eta2 + 1 > m {
        return Err(Error::Thresholds { eta1, eta2, m });
    }
    Ok(threshold_word(code, defectives.indices(), eta1, eta2))
}

/// Draws `len` independent Bernoulli(`q`) bits in position order.
pub fn draw_noise<R: Rng + ?Sized>(len: usize, q: f64, rng: &mut R) -> Result<BinaryWord> {
    check_probability("q", q)?;
    Ok(BinaryWord::from_bits((0..len).map(|_| rng.random_bool(q))))
}

/// Dilution noise: returns `y + z` (ternary sum) for a fresh Bernoulli(`q`)
/// noise word `z`. A 2 is never altered, a 0 turns into 2 where `z = 1` and a
/// 1 turns into 2 where `z = 0`.
pub fn apply_noise<R: Rng + ?Sized>(y: &TernaryWord, q: f64, rng: &mut R) -> Result<TernaryWord> {
    let z = draw_noise(y.len(), q, rng)?;
    y.try_add(&TernaryWord::from(&z))
}

/// False-alarm noise for asymmetric tests: `y OR z`, so a 0 reads as 1 where
/// `z = 1` and 1s are never altered.
pub fn apply_or_noise<R: Rng + ?Sized>(y: &TernaryWord, q: f64, rng: &mut R) -> Result<TernaryWord> {
    let z = draw_noise(y.len(), q, rng)?;
    let flip: Vec<u64> = z.bits.iter().zip(&y.nonzero).map(|(z, n)| z & !n).collect();
    let ones = y.ones.iter().zip(&flip).map(|(o, f)| o | f).collect();
    let nonzero = y.nonzero.iter().zip(&flip).map(|(n, f)| n | f).collect();
    Ok(TernaryWord::from_planes(y.len, ones, nonzero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use TernarySymbol::*;

    fn tw(s: &str) -> TernaryWord {
        s.parse().unwrap()
    }

    fn code(cols: &[&str]) -> CodeMatrix {
        CodeMatrix::from_columns(cols.iter().map(|c| c.parse().unwrap()).collect()).unwrap()
    }

    fn set(ix: &[usize]) -> SubjectSet {
        SubjectSet::new(ix.iter().copied()).unwrap()
    }

    const ALL: [TernarySymbol; 3] = [Zero, One, Two];

    #[test]
    fn addition_table() {
        assert_eq!(tern_add(Zero, Zero), Zero);
        assert_eq!(tern_add(One, Zero), Two);
        assert_eq!(tern_add(Two, Two), Two);
        assert_eq!(tern_add(One, One), One);
        assert_eq!(Zero + Two, Two);
    }

    #[test]
    fn addition_laws_exhaustive() {
        for a in ALL {
            assert_eq!(a + a, a);
            for b in ALL {
                assert_eq!(a + b, b + a);
                for c in ALL {
                    assert_eq!((a + b) + c, a + (b + c));
                }
            }
        }
    }

    #[test]
    fn text_forms() {
        assert_eq!(tw("0122").to_string(), "0122");
        assert_eq!(tw("0122").count(Two), 2);
        assert!(matches!("013".parse::<TernaryWord>(), Err(Error::InvalidSymbol('3'))));
        assert!(matches!("012".parse::<BinaryWord>(), Err(Error::InvalidSymbol('2'))));
        let long: TernaryWord = "012".repeat(50).parse().unwrap();
        assert_eq!(long.len(), 150);
        assert_eq!(long.to_string(), "012".repeat(50));
    }

    #[test]
    fn word_sum_examples() {
        assert_eq!(word_sum(&[tw("100"), tw("010")]).unwrap(), tw("220"));
        assert_eq!(word_sum(&[tw("1202")]).unwrap(), tw("1202"));
        assert_eq!(word_sum(&[tw("111"), tw("111"), tw("111")]).unwrap(), tw("111"));
        assert_eq!(word_sum(&[]), Err(Error::Empty("word list")));
        assert_eq!(
            word_sum(&[tw("10"), tw("100")]),
            Err(Error::LengthMismatch { expected: 2, found: 3 })
        );
    }

    /// All words of length `len` over {0,1,2}.
    fn all_words(len: usize) -> Vec<TernaryWord> {
        let total = 3usize.pow(len as u32);
        (0..total)
            .map(|mut code| {
                TernaryWord::from_symbols((0..len).map(|_| {
                    let s = TernarySymbol::from_value((code % 3) as u8).unwrap();
                    code /= 3;
                    s
                }))
            })
            .collect()
    }

    #[test]
    fn word_sum_matches_characterization() {
        for len in 1..=3 {
            let words = all_words(len);
            for size in 1..=3usize {
                let mut idx = vec![0usize; size];
                loop {
                    let picked: Vec<TernaryWord> = idx.iter().map(|&i| words[i].clone()).collect();
                    let sum = word_sum(&picked).unwrap();
                    for t in 0..len {
                        let expect = if picked.iter().all(|w| w.get(t) == Zero) {
                            Zero
                        } else if picked.iter().all(|w| w.get(t) == One) {
                            One
                        } else {
                            Two
                        };
                        assert_eq!(sum.get(t), expect);
                    }
                    // odometer over index tuples
                    let mut k = 0;
                    while k < size {
                        idx[k] += 1;
                        if idx[k] < words.len() {
                            break;
                        }
                        idx[k] = 0;
                        k += 1;
                    }
                    if k == size {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn inclusion_examples() {
        assert!(is_included(&tw("100"), &tw("220")).unwrap());
        assert!(!is_included(&tw("001"), &tw("220")).unwrap());
        for w in all_words(3) {
            assert!(is_included(&w, &w).unwrap());
        }
        assert!(is_included(&tw("10"), &tw("101")).is_err());
    }

    #[test]
    fn inclusion_agrees_with_sum_definition() {
        let words = all_words(3);
        for x in &words {
            for y in &words {
                let by_sum = word_sum(&[x.clone(), y.clone()]).unwrap() == *x;
                assert_eq!(is_included(y, x).unwrap(), by_sum, "y={y} x={x}");
            }
        }
    }

    #[test]
    fn observation_examples() {
        let id = CodeMatrix::identity(3).unwrap();
        assert_eq!(observation(&id, &set(&[0, 1])).unwrap(), tw("220"));
        assert_eq!(observation(&id, &set(&[0])).unwrap(), tw("100"));
        let dup = code(&["1010", "1010"]);
        assert_eq!(observation(&dup, &set(&[0, 1])).unwrap(), tw("1010"));
        assert_eq!(observation(&id, &SubjectSet::empty()), Err(Error::Empty("defective set")));
        assert_eq!(
            observation(&id, &set(&[3])),
            Err(Error::SubjectIndex { index: 3, subjects: 3 })
        );
    }

    #[test]
    fn subject_set_rejects_duplicates() {
        assert_eq!(SubjectSet::new([2, 1, 2]), Err(Error::DuplicateSubject(2)));
        assert_eq!(set(&[3, 1]).indices(), &[1, 3]);
        assert_eq!(set(&[3, 1]).to_string(), "{1,3}");
    }

    #[test]
    fn ggt_examples() {
        let id = CodeMatrix::identity(3).unwrap();
        assert_eq!(ggt_observation(&id, &set(&[0, 1]), 0, 1).unwrap(), tw("220"));
        assert_eq!(ggt_observation(&id, &set(&[0, 1]), 1, 1).unwrap(), tw("000"));
        let ones = code(&["11", "11"]);
        assert_eq!(ggt_observation(&ones, &set(&[0, 1]), 0, 0).unwrap(), tw("11"));
        assert_eq!(
            ggt_observation(&id, &set(&[0, 1]), 1, 0),
            Err(Error::Thresholds { eta1: 1, eta2: 0, m: 2 })
        );
        assert_eq!(
            ggt_observation(&id, &set(&[0, 1]), 0, 2),
            Err(Error::Thresholds { eta1: 0, eta2: 2, m: 2 })
        );
    }

    /// Every n×N binary matrix is a number below 2^(n·N); enumerate a slice
    /// of small codes and all defective sets up to size 4.
    #[test]
    fn ggt_reductions_exhaustive() {
        for n in 1..=3usize {
            for cols in 1..=4usize {
                let total = 1u64 << (n * cols);
                for bits in 0..total {
                    let columns = (0..cols)
                        .map(|j| BinaryWord::from_bits((0..n).map(|t| bits >> (j * n + t) & 1 == 1)))
                        .collect();
                    let c = CodeMatrix::from_columns(columns).unwrap();
                    for mask in 1u32..(1 << cols) {
                        let d = SubjectSet::new((0..cols).filter(|j| mask >> j & 1 == 1)).unwrap();
                        let m = d.len();
                        let sym = observation(&c, &d).unwrap();
                        assert_eq!(ggt_observation(&c, &d, 0, m - 1).unwrap(), sym);
                        let or = ggt_observation(&c, &d, 0, 0).unwrap();
                        assert_eq!(or.count(Two), 0);
                        for t in 0..n {
                            let any = d.iter().any(|j| c.get(t, j));
                            assert_eq!(or.get(t) == One, any);
                        }
                        for j in d.iter() {
                            assert!(is_included(&TernaryWord::from(c.column(j)), &sym).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn noise_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(apply_noise(&tw("222"), 0.3, &mut rng).unwrap(), tw("222"));
        assert_eq!(apply_noise(&tw("01"), 1.0, &mut rng).unwrap(), tw("21"));
        assert_eq!(apply_noise(&tw("01"), 0.0, &mut rng).unwrap(), tw("02"));
        assert_eq!(apply_noise(&tw("0120"), 0.0, &mut rng).unwrap(), tw("0220"));
        assert_eq!(apply_noise(&tw("0120"), 1.0, &mut rng).unwrap(), tw("2122"));
        assert!(matches!(apply_noise(&tw("0"), 1.5, &mut rng), Err(Error::Probability { .. })));
        assert_eq!(apply_or_noise(&tw("0102"), 1.0, &mut rng).unwrap(), tw("1112"));
        assert_eq!(apply_or_noise(&tw("0102"), 0.0, &mut rng).unwrap(), tw("0102"));
    }

    #[test]
    fn noise_is_reproducible_and_transitions_are_legal() {
        let y: TernaryWord = "012".repeat(40).parse().unwrap();
        let a = apply_noise(&y, 0.4, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = apply_noise(&y, 0.4, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        for t in 0..y.len() {
            match y.get(t) {
                Two => assert_eq!(a.get(t), Two),
                s => assert!(a.get(t) == s || a.get(t) == Two),
            }
        }
    }
}
