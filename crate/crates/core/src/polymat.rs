//! Binary polynomial generator matrices.
//!
//! Entry `(i, j)` of a `k x n` matrix is stored as a `u64` whose bit `l` is the
//! coefficient of `D^l`. The matrix carries a degree bound `m` (its memory);
//! prefixes keep the parent's `k` and `n` and take the prefix degree as bound.
//!
//! Octal text uses the left-aligned convention: the coefficient string
//! `g^(0) g^(1) ... g^(m)` is padded with zero bits on the right to a multiple
//! of three and read as octal digits, most significant first.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported degree bound.
pub const MAX_MEMORY: usize = 63;

/// A `k x n` binary polynomial generator matrix with memory `m`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GeneratorMatrix {
    k: usize,
    n: usize,
    m: usize,
    polys: Vec<u64>,
}

fn degree_mask(m: usize) -> u64 {
    if m >= 63 {
        u64::MAX
    } else {
        (1u64 << (m + 1)) - 1
    }
}

/// Reverses the low `width` bits of `x`.
pub(crate) fn reverse_bits(x: u64, width: usize) -> u64 {
    if width == 0 {
        0
    } else {
        x.reverse_bits() >> (64 - width)
    }
}

fn octal_digits(m: usize) -> usize {
    (m + 1).div_ceil(3)
}

impl GeneratorMatrix {
    /// Builds a matrix from row-major polynomials. Zero rows are allowed here
    /// (the search starts from the all-zero matrix); text ingestion rejects them.
    pub fn new(k: usize, n: usize, m: usize, polys: Vec<u64>) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::Dimensions {
                k,
                n,
                m,
                reason: "k and n must be positive",
            });
        }
        if k > n {
            return Err(Error::Dimensions {
                k,
                n,
                m,
                reason: "k must not exceed n",
            });
        }
        if n > 16 || k > 8 {
            return Err(Error::Dimensions {
                k,
                n,
                m,
                reason: "at most 8 inputs and 16 outputs are supported",
            });
        }
        if m > MAX_MEMORY {
            return Err(Error::Dimensions {
                k,
                n,
                m,
                reason: "memory exceeds 63",
            });
        }
        if polys.len() != k * n {
            return Err(Error::WordCount {
                expected: k * n,
                found: polys.len(),
            });
        }
        if polys.iter().any(|&g| g & !degree_mask(m) != 0) {
            return Err(Error::Dimensions {
                k,
                n,
                m,
                reason: "polynomial degree exceeds the memory",
            });
        }
        Ok(Self { k, n, m, polys })
    }

    /// The all-zero `k x n` matrix with degree bound `m`.
    pub fn zero(k: usize, n: usize, m: usize) -> Result<Self> {
        Self::new(k, n, m, vec![0; k * n])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Declared memory (degree bound).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Polynomial `g_ij(D)` with bit `l` holding the coefficient of `D^l`.
    pub fn poly(&self, i: usize, j: usize) -> u64 {
        self.polys[i * self.n + j]
    }

    /// Row-major polynomials.
    pub fn polys(&self) -> &[u64] {
        &self.polys
    }

    /// Coefficient `g_ij^(l)`.
    pub fn coeff(&self, i: usize, j: usize, l: usize) -> bool {
        l <= self.m && (self.poly(i, j) >> l) & 1 == 1
    }

    /// Largest degree actually present, `None` for the zero matrix.
    pub fn degree(&self) -> Option<usize> {
        let all = self.polys.iter().fold(0u64, |acc, &g| acc | g);
        (all != 0).then(|| 63 - all.leading_zeros() as usize)
    }

    /// Degree of row `i`, `None` if the row is zero.
    pub fn row_degree(&self, i: usize) -> Option<usize> {
        let all = (0..self.n).fold(0u64, |acc, j| acc | self.poly(i, j));
        (all != 0).then(|| 63 - all.leading_zeros() as usize)
    }

    pub fn has_zero_row(&self) -> bool {
        (0..self.k).any(|i| self.row_degree(i).is_none())
    }

    /// Coefficient matrix `G^(l)` as a row-major bit vector (bit `i * n + j`).
    pub fn layer(&self, l: usize) -> u64 {
        let mut out = 0u64;
        for (idx, &g) in self.polys.iter().enumerate() {
            if l <= self.m && (g >> l) & 1 == 1 {
                out |= 1 << idx;
            }
        }
        out
    }

    /// Packed comparison key of `g_ij`: `g^(0)` is the most significant of
    /// `m + 1` bits, so polynomial order is integer order.
    pub fn poly_key(&self, i: usize, j: usize) -> u64 {
        reverse_bits(self.poly(i, j), self.m + 1)
    }

    fn row_key(&self, i: usize) -> Vec<u64> {
        (0..self.n).map(|j| self.poly_key(i, j)).collect()
    }

    fn col_key(&self, j: usize) -> Vec<u64> {
        (0..self.k).map(|i| self.poly_key(i, j)).collect()
    }

    /// Lexicographic order on the row-major sequence of packed polynomials.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        let a = (0..self.k * self.n).map(|idx| reverse_bits(self.polys[idx], self.m + 1));
        let b = (0..other.k * other.n).map(|idx| reverse_bits(other.polys[idx], other.m + 1));
        a.cmp(b)
    }

    pub fn has_sorted_rows(&self) -> bool {
        (1..self.k).all(|i| self.row_key(i - 1) <= self.row_key(i))
    }

    pub fn has_sorted_cols(&self) -> bool {
        (1..self.n).all(|j| self.col_key(j - 1) <= self.col_key(j))
    }

    pub fn has_sorted_rows_cols(&self) -> bool {
        self.has_sorted_rows() && self.has_sorted_cols()
    }

    /// Relabels inputs and outputs: entry `(i, j)` of the result is
    /// entry `(rows(i), cols(j))` of `self`.
    pub fn permute(&self, rows: &Permutation, cols: &Permutation) -> Result<Self> {
        if rows.len() != self.k {
            return Err(Error::Permutation(self.k));
        }
        if cols.len() != self.n {
            return Err(Error::Permutation(self.n));
        }
        let mut polys = Vec::with_capacity(self.k * self.n);
        for i in 0..self.k {
            for j in 0..self.n {
                polys.push(self.poly(rows.apply(i), cols.apply(j)));
            }
        }
        Ok(Self { polys, ..*self })
    }

    fn sort_rows(&self) -> Self {
        let mut order: Vec<usize> = (0..self.k).collect();
        order.sort_by_key(|&i| self.row_key(i));
        self.permute(&Permutation(order), &Permutation::identity(self.n))
            .expect("sizes match")
    }

    fn sort_cols(&self) -> Self {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&j| self.col_key(j));
        self.permute(&Permutation::identity(self.k), &Permutation(order))
            .expect("sizes match")
    }

    /// Sorts rows, then columns, repeatedly until both are sorted at once.
    ///
    /// Each column sort lexicographically lowers the row-major sequence and each
    /// row sort lowers the column-major one; in practice a fixed point is found
    /// within a couple of rounds. If none is found the lowest sorted
    /// permutation is chosen by enumeration.
    pub fn sorted_form(&self) -> Self {
        let mut cur = self.clone();
        for _ in 0..64 {
            if cur.has_sorted_rows_cols() {
                return cur;
            }
            cur = cur.sort_rows().sort_cols();
        }
        self.permutations()
            .filter(GeneratorMatrix::has_sorted_rows_cols)
            .min_by(GeneratorMatrix::lex_cmp)
            .unwrap_or(cur)
    }

    /// All row/column relabelings of this matrix (with repetitions when
    /// rows or columns coincide).
    pub fn permutations(&self) -> impl Iterator<Item = GeneratorMatrix> + '_ {
        let rows = Permutation::all(self.k);
        let cols = Permutation::all(self.n);
        rows.into_iter().flat_map(move |r| {
            cols.clone()
                .into_iter()
                .map(move |c| self.permute(&r, &c).expect("sizes match"))
        })
    }

    /// Generator of the reverse code, `D^m G(D^{-1})`.
    pub fn reverse(&self) -> Self {
        let polys = self
            .polys
            .iter()
            .map(|&g| reverse_bits(g, self.m + 1))
            .collect();
        Self { polys, ..*self }
    }

    /// `G^[0,p](D)` as an object with degree bound `p`.
    pub fn prefix(&self, p: usize) -> Result<Self> {
        if p > self.m {
            return Err(Error::PrefixRange { p, m: self.m });
        }
        let mask = degree_mask(p);
        let polys = self.polys.iter().map(|&g| g & mask).collect();
        Ok(Self {
            m: p,
            polys,
            ..*self
        })
    }

    /// Same polynomials with a larger degree bound.
    pub fn with_memory(&self, m: usize) -> Result<Self> {
        if m < self.m && self.degree().is_some_and(|d| d > m) {
            return Err(Error::PrefixRange { p: m, m: self.m });
        }
        Self::new(self.k, self.n, m, self.polys.clone())
    }

    /// `G(D) + layer * D^l` where `layer` is a row-major bit matrix.
    pub fn with_layer(&self, l: usize, layer: u64) -> Result<Self> {
        let m = self.m.max(l);
        let polys = self
            .polys
            .iter()
            .enumerate()
            .map(|(idx, &g)| g ^ (((layer >> idx) & 1) << l))
            .collect();
        Self::new(self.k, self.n, m, polys)
    }

    /// Parses `k * n` whitespace-separated left-aligned octal words.
    pub fn parse_octal(text: &str, k: usize, n: usize, m: usize) -> Result<Self> {
        let words: Vec<&str> = text.split_whitespace().collect();
        if words.len() != k * n {
            return Err(Error::WordCount {
                expected: k * n,
                found: words.len(),
            });
        }
        if m > MAX_MEMORY {
            return Err(Error::Dimensions {
                k,
                n,
                m,
                reason: "memory exceeds 63",
            });
        }
        let needed = octal_digits(m);
        let mut polys = Vec::with_capacity(k * n);
        for word in words {
            if !word.bytes().all(|b| (b'0'..=b'7').contains(&b)) {
                return Err(Error::OctalDigit {
                    word: word.to_string(),
                });
            }
            let digits = word.len();
            if digits < needed {
                return Err(Error::WordTooShort {
                    word: word.to_string(),
                    digits,
                    needed,
                    m,
                });
            }
            let width = 3 * digits;
            let mut g = 0u64;
            for (pos, b) in word.bytes().enumerate() {
                let digit = b - b'0';
                for bit in 0..3 {
                    if (digit >> (2 - bit)) & 1 == 1 {
                        let l = 3 * pos + bit;
                        if l > m {
                            return Err(Error::DegreeOverflow {
                                word: word.to_string(),
                                m,
                            });
                        }
                        g |= 1 << l;
                    }
                }
            }
            debug_assert!(width > m);
            polys.push(g);
        }
        let g = Self::new(k, n, m, polys)?;
        if let Some(row) = (0..k).find(|&i| g.row_degree(i).is_none()) {
            return Err(Error::ZeroRow { row });
        }
        Ok(g)
    }

    /// Minimal-length left-aligned octal word of one polynomial.
    pub fn octal_word(&self, i: usize, j: usize) -> String {
        let digits = octal_digits(self.m);
        let g = self.poly(i, j);
        (0..digits)
            .map(|pos| {
                let d = (0..3).fold(0u8, |acc, bit| {
                    let l = 3 * pos + bit;
                    acc | ((((g >> l) & 1) as u8) << (2 - bit))
                });
                char::from(b'0' + d)
            })
            .collect()
    }

    /// Row-major octal words separated by single spaces.
    pub fn to_octal(&self) -> String {
        let mut words = Vec::with_capacity(self.k * self.n);
        for i in 0..self.k {
            for j in 0..self.n {
                words.push(self.octal_word(i, j));
            }
        }
        words.join(" ")
    }
}

impl fmt::Display for GeneratorMatrix {
    /// The interchange line `k n m : w11 ... wkn`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} : {}", self.k, self.n, self.m, self.to_octal())
    }
}

impl FromStr for GeneratorMatrix {
    type Err = Error;

    /// Parses `k n m : words`. Anything after `;` or `#` is ignored.
    fn from_str(line: &str) -> Result<Self> {
        let body = line.split(['#', ';']).next().unwrap_or("");
        let syntax = |reason: &str| Error::Syntax {
            line: line.to_string(),
            reason: reason.to_string(),
        };
        let (head, words) = body
            .split_once(':')
            .ok_or_else(|| syntax("missing ':' separator"))?;
        let dims: Vec<usize> = head
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| syntax("dimensions must be integers"))?;
        let [k, n, m] = dims[..] else {
            return Err(syntax("expected 'k n m' before ':'"));
        };
        GeneratorMatrix::parse_octal(words, k, n, m)
    }
}

/// Forms `G(D) = G^F(D) + [G^(m/2) D^(m/2)] + D^m G_B(D^{-1})` where
/// `G_B` is `backward` with rows and columns relabeled by `rows`/`cols`.
///
/// Accepted shapes:
/// * odd `m`: both halves of degree bound `(m-1)/2`, no middle;
/// * even `m`: both halves of bound `m/2 - 1` plus a middle layer
///   (a bound-0 matrix);
/// * even `m`, accelerated: forward half of bound `m/2`, backward half of
///   bound `m/2 - 1`, no middle.
pub fn concat_halves(
    forward: &GeneratorMatrix,
    backward: &GeneratorMatrix,
    m: usize,
    middle: Option<&GeneratorMatrix>,
    rows: &Permutation,
    cols: &Permutation,
) -> Result<GeneratorMatrix> {
    if forward.k != backward.k || forward.n != backward.n {
        return Err(Error::Concat("halves have different dimensions".into()));
    }
    if m == 0 {
        return Err(Error::Concat("memory 0 has no halves".into()));
    }
    let (pf, pb) = (forward.m, backward.m);
    if m % 2 == 1 {
        let p = (m - 1) / 2;
        if middle.is_some() {
            return Err(Error::Concat("odd memory takes no middle layer".into()));
        }
        if pf != p || pb != p {
            return Err(Error::Concat(format!(
                "odd memory {m} needs halves of degree {p}, got {pf} and {pb}"
            )));
        }
    } else {
        let p = m / 2 - 1;
        match middle {
            Some(mid) => {
                if pf != p || pb != p {
                    return Err(Error::Concat(format!(
                        "even memory {m} needs halves of degree {p}, got {pf} and {pb}"
                    )));
                }
                if mid.m != 0 || mid.k != forward.k || mid.n != forward.n {
                    return Err(Error::Concat("middle must be a k x n constant".into()));
                }
            }
            None => {
                if pf != p + 1 || pb != p {
                    return Err(Error::Concat(format!(
                        "accelerated even memory {m} needs degrees {} and {p}, got {pf} and {pb}",
                        p + 1
                    )));
                }
            }
        }
    }
    let back = backward.permute(rows, cols)?;
    let mut polys = forward.polys.clone();
    for (g, &b) in polys.iter_mut().zip(&back.polys) {
        // coefficient l of the backward half lands at degree m - l
        *g |= reverse_bits(b, pb + 1) << (m - pb);
    }
    if let Some(mid) = middle {
        for (g, &c) in polys.iter_mut().zip(&mid.polys) {
            *g |= (c & 1) << (m / 2);
        }
    }
    GeneratorMatrix::new(forward.k, forward.n, m, polys)
}

/// A bijection on `{0, .., l-1}`; `apply(i)` is the image of `i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(l: usize) -> Self {
        Self((0..l).collect())
    }

    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &x in &map {
            if x >= map.len() || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Permutation(map.len()));
            }
        }
        Ok(Self(map))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Self(inv)
    }

    /// All `l!` permutations in lexicographic order.
    pub fn all(l: usize) -> Vec<Permutation> {
        let mut cur: Vec<usize> = (0..l).collect();
        let mut out = vec![Self(cur.clone())];
        loop {
            let Some(i) = (1..l).rev().find(|&i| cur[i - 1] < cur[i]) else {
                return out;
            };
            let j = (i..l).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot");
            cur.swap(i - 1, j);
            cur[i..].reverse();
            out.push(Self(cur.clone()));
        }
    }
}
