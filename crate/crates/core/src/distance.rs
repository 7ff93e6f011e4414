//! Column distance functions, distance profiles and related bounds.

use std::cmp::Ordering;
use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::gf2poly;
use crate::polymat::{GeneratorMatrix, Permutation};
use crate::trellis::Encoder;

/// How far a profile extends: the full column distance function (`s = -inf`,
/// evaluated to a chosen depth) or `d_[0, m-s]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shortening {
    Unbounded,
    By(usize),
}

impl fmt::Display for Shortening {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shortening::Unbounded => f.write_str("-inf"),
            Shortening::By(s) => write!(f, "{s}"),
        }
    }
}

impl std::str::FromStr for Shortening {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-inf" | "inf" | "cdf" => Ok(Shortening::Unbounded),
            t => t
                .parse()
                .map(Shortening::By)
                .map_err(|_| Error::Search(format!("bad shortening {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    /// Forward column distances.
    Column,
    /// Forward distance profile.
    Forward(Shortening),
    /// Elementwise minimum of the forward and reverse profiles.
    Bidirectional(Shortening),
}

/// A sequence `d_0, .., d_L` of column distances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub values: Vec<u32>,
    pub kind: ProfileKind,
}

/// Outcome of comparing two profiles or spectra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quality {
    Better,
    Equal,
    Worse,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Comma-separated values, the format used in the code tables.
    pub fn to_csv(&self) -> String {
        self.values
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    /// `d` is better than `d'` when they agree up to some index and `d` is
    /// larger there.
    pub fn compare(&self, other: &Profile) -> Result<Quality> {
        compare_profiles(&self.values, &other.values)
    }
}

pub fn compare_profiles(a: &[u32], b: &[u32]) -> Result<Quality> {
    if a.len() != b.len() {
        return Err(Error::ProfileLength(a.len(), b.len()));
    }
    Ok(match a.cmp(b) {
        Ordering::Greater => Quality::Better,
        Ordering::Equal => Quality::Equal,
        Ordering::Less => Quality::Worse,
    })
}

/// Column distances `d_0..=d_depth`: minimum output weight over input
/// sequences with a nonzero first block.
///
/// Per-state minimum weights are propagated depth by depth. States heavier
/// than a bound are dropped; the bound starts at `d_0` and is raised whenever
/// some depth has no surviving state, so the final pass keeps exactly the
/// states that can still attain `d_depth`.
pub fn column_distances(g: &GeneratorMatrix, depth: usize) -> Result<Vec<u32>> {
    let enc = Encoder::new(g)?;
    let k = enc.k();
    let first: Vec<(u64, u32)> = (1..1u64 << k)
        .map(|u| (enc.next_state(0, u), enc.output_weight(0, u)))
        .collect();
    let mut bound = first.iter().map(|&(_, w)| w).min().expect("k >= 1");
    loop {
        if let Some(values) = bounded_column_distances(&enc, &first, depth, bound) {
            return Ok(values);
        }
        bound += 1;
    }
}

fn bounded_column_distances(
    enc: &Encoder,
    first: &[(u64, u32)],
    depth: usize,
    bound: u32,
) -> Option<Vec<u32>> {
    let mut frontier: FxHashMap<u64, u32> = FxHashMap::default();
    for &(s, w) in first {
        if w <= bound {
            let e = frontier.entry(s).or_insert(w);
            *e = (*e).min(w);
        }
    }
    let mut values = Vec::with_capacity(depth + 1);
    let inputs = 1u64 << enc.k();
    let mut next: FxHashMap<u64, u32> = FxHashMap::default();
    for l in 0..=depth {
        if l > 0 {
            next.clear();
            for (&s, &w) in &frontier {
                for u in 0..inputs {
                    let nw = w + enc.output_weight(s, u);
                    if nw <= bound {
                        let e = next.entry(enc.next_state(s, u)).or_insert(nw);
                        *e = (*e).min(nw);
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next);
        }
        values.push(*frontier.values().min()?);
    }
    Some(values)
}

/// Column distance function evaluated to `depth`.
pub fn cdf(g: &GeneratorMatrix, depth: usize) -> Result<Profile> {
    Ok(Profile {
        values: column_distances(g, depth)?,
        kind: ProfileKind::Column,
    })
}

/// Distance profile `d_[0, m-s]`.
pub fn dp(g: &GeneratorMatrix, s: usize) -> Result<Profile> {
    let depth = shortened_depth(g, s)?;
    Ok(Profile {
        values: column_distances(g, depth)?,
        kind: ProfileKind::Forward(Shortening::By(s)),
    })
}

fn shortened_depth(g: &GeneratorMatrix, s: usize) -> Result<usize> {
    g.m().checked_sub(s).ok_or(Error::Search(format!(
        "shortening {s} exceeds memory {}",
        g.m()
    )))
}

/// Elementwise minimum of the column distances of `G` and its reverse,
/// evaluated to `depth`.
pub fn bidirectional_distances(g: &GeneratorMatrix, depth: usize) -> Result<Vec<u32>> {
    let fwd = column_distances(g, depth)?;
    let rev = column_distances(&g.reverse(), depth)?;
    Ok(fwd.iter().zip(&rev).map(|(&a, &b)| a.min(b)).collect())
}

/// Bidirectional distance profile `BDP^(s)`, of length `m - s + 1`.
pub fn bdp(g: &GeneratorMatrix, s: usize) -> Result<Profile> {
    let depth = shortened_depth(g, s)?;
    Ok(Profile {
        values: bidirectional_distances(g, depth)?,
        kind: ProfileKind::Bidirectional(Shortening::By(s)),
    })
}

/// Bidirectional column distance function evaluated to `depth`.
pub fn bcdf(g: &GeneratorMatrix, depth: usize) -> Result<Profile> {
    Ok(Profile {
        values: bidirectional_distances(g, depth)?,
        kind: ProfileKind::Bidirectional(Shortening::Unbounded),
    })
}

/// Griesmer upper bound on the free distance of a rate `k/n`, memory `m` code:
/// the largest `d` with `sum_{l=0}^{ki-1} ceil(d / 2^l) <= (m + i) n` for all
/// `i >= 1`.
///
/// For a given `d` only `i` up to the first value with `2^{k(i-1)} >= d` is
/// checked: past that point each further `i` adds `k` ones on the left and
/// `n > k` on the right.
pub fn griesmer_bound(k: usize, n: usize, m: usize) -> u64 {
    let (k, n, m) = (k as u64, n as u64, m as u64);
    let satisfies = |d: u64| {
        let mut i = 1u64;
        loop {
            let lhs: u64 = (0..k * i)
                .map(|l| if l >= 64 { 1 } else { d.div_ceil(1u64 << l) })
                .sum();
            if lhs > (m + i) * n {
                return false;
            }
            let shift = k * (i - 1);
            if shift >= 63 || (1u64 << shift) >= d {
                return true;
            }
            i += 1;
        }
    };
    // the left side grows with d, so the feasible set is an initial segment
    let mut d = 0;
    while satisfies(d + 1) {
        d += 1;
    }
    d
}

/// Largest `k m` for which [`is_catastrophic`] walks the state graph.
pub const STATE_GRAPH_LIMIT: usize = 22;

/// True when the encoder maps some infinite-weight input to a finite-weight
/// output, or has rank below `k`.
///
/// For `k m <= STATE_GRAPH_LIMIT` this looks for a cycle of zero-output
/// branches through nonzero states; for larger encoders it uses the
/// equivalent algebraic test (the gcd of the `k x k` minors is not a power
/// of `D`).
pub fn is_catastrophic(g: &GeneratorMatrix) -> Result<bool> {
    let gcd = minors_gcd(g)?;
    if gcd == 0 {
        return Ok(true);
    }
    if g.k() * g.m() <= STATE_GRAPH_LIMIT {
        has_zero_output_cycle(g)
    } else {
        Ok(gcd.count_ones() != 1)
    }
}

/// Gcd of all `k x k` minors of `G(D)`; zero when `G` is rank deficient.
pub fn minors_gcd(g: &GeneratorMatrix) -> Result<u128> {
    let (k, n) = (g.k(), g.n());
    let perms = Permutation::all(k);
    let mut acc = 0u128;
    let mut cols: Vec<usize> = (0..k).collect();
    loop {
        let mut det = 0u128;
        for p in &perms {
            let mut term = 1u128;
            for i in 0..k {
                term = gf2poly::mul(term, u128::from(g.poly(i, cols[p.apply(i)])))
                    .ok_or(Error::StateSpace(k * g.m()))?;
            }
            det ^= term;
        }
        acc = gf2poly::gcd(acc, det);
        // next k-subset of columns in lexicographic order
        let Some(pos) = (0..k).rev().find(|&i| cols[i] < n - k + i) else {
            return Ok(acc);
        };
        cols[pos] += 1;
        for i in pos + 1..k {
            cols[i] = cols[i - 1] + 1;
        }
    }
}

/// State-graph test: does some cycle of nonzero states consist only of
/// zero-output branches? Found by repeatedly removing states with no
/// incoming zero-output branch; whatever survives lies on or feeds a cycle.
pub fn has_zero_output_cycle(g: &GeneratorMatrix) -> Result<bool> {
    let enc = Encoder::new(g)?;
    let bits = enc.state_bits();
    if bits > 30 {
        return Err(Error::StateSpace(bits));
    }
    let states = 1usize << bits;
    let inputs = 1u64 << enc.k();
    let mut indeg = vec![0u32; states];
    for s in 1..states as u64 {
        for u in 0..inputs {
            let t = enc.next_state(s, u);
            if t != 0 && enc.output(s, u) == 0 {
                indeg[t as usize] += 1;
            }
        }
    }
    let mut stack: Vec<u64> = (1..states as u64).filter(|&s| indeg[s as usize] == 0).collect();
    let mut removed = stack.len();
    while let Some(s) = stack.pop() {
        for u in 0..inputs {
            let t = enc.next_state(s, u);
            if t != 0 && enc.output(s, u) == 0 {
                let d = &mut indeg[t as usize];
                *d -= 1;
                if *d == 0 {
                    removed += 1;
                    stack.push(t);
                }
            }
        }
    }
    Ok(removed < states - 1)
}
