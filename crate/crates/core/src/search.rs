//! Two-stage search for optimum bidirectional codes.
//!
//! Stage I grows the sets of ODP codes `U_0, U_1, ..` one coefficient layer
//! at a time. Stage II concatenates forward and backward halves taken from
//! those sets, keeps the candidates with the best bidirectional profile,
//! removes trivially equivalent duplicates and finally ranks the survivors by
//! their information distance spectra.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::count::Count;
use crate::distance::{
    bidirectional_distances, column_distances, is_catastrophic, Profile, ProfileKind, Quality,
    Shortening,
};
use crate::error::{Error, Result};
use crate::polymat::{concat_halves, GeneratorMatrix, Permutation};
use crate::spectrum::{compare_spectra, spectra, Spectrum};

/// How even memories are handled in stage II.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvenMode {
    /// Loop over every middle layer `G^(m/2)`.
    Full,
    /// Take forward halves of memory `m/2` and skip the middle loop; falls
    /// back to `Full` when the result cannot be certified.
    Accelerated,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    /// Extra depth beyond `m` at which the bidirectional column distance
    /// function is compared when `s = -inf`; `None` means `2m`.
    pub cdf_extra_depth: Option<usize>,
    /// Spectrum terms used for the final selection.
    pub spectrum_terms: usize,
    pub even_mode: EvenMode,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            cdf_extra_depth: None,
            spectrum_terms: 16,
            even_mode: EvenMode::Accelerated,
        }
    }
}

impl SearchConfig {
    /// Last profile index compared for memory `m` and shortening `s`.
    pub fn profile_depth(&self, m: usize, s: Shortening) -> usize {
        match s {
            Shortening::Unbounded => m + self.cdf_extra_depth.unwrap_or(2 * m),
            Shortening::By(s) => m - s,
        }
    }
}

/// Codes sharing one optimal profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSet {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub s: Option<Shortening>,
    pub members: Vec<GeneratorMatrix>,
    pub profile: Profile,
}

impl CodeSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Best profile seen so far and every candidate attaining it.
#[derive(Clone, Debug, Default)]
struct Bucket {
    profile: Vec<u32>,
    members: Vec<GeneratorMatrix>,
}

impl Bucket {
    fn offer(mut self, profile: Vec<u32>, g: GeneratorMatrix) -> Self {
        match profile.cmp(&self.profile) {
            Ordering::Greater => Bucket {
                profile,
                members: vec![g],
            },
            Ordering::Equal => {
                self.members.push(g);
                self
            }
            Ordering::Less => self,
        }
    }

    fn join(mut self, other: Bucket) -> Self {
        match other.profile.cmp(&self.profile) {
            Ordering::Greater => other,
            Ordering::Equal => {
                self.members.extend(other.members);
                self
            }
            Ordering::Less => self,
        }
    }

    /// Members in ascending matrix order, so results do not depend on how
    /// the work was split.
    fn finish(mut self) -> Self {
        self.members.sort_by(GeneratorMatrix::lex_cmp);
        self.members.dedup();
        self
    }
}

fn check_rate(k: usize, n: usize) -> Result<()> {
    if k == 0 || k >= n || k * n > 24 {
        return Err(Error::Search(format!(
            "rate {k}/{n} is outside the searchable range (1 <= k < n, k n <= 24)"
        )));
    }
    Ok(())
}

/// Stage I: the ODP sets `U_0, .., U_{m_max}` (index `m` holds `U_m`).
///
/// Every prefix in `U_{m-1}` is extended by every `k x n` layer; only
/// matrices with sorted rows and columns are evaluated, and those with the
/// best distance profile are kept. Catastrophic matrices are not excluded.
pub fn odp_sets(k: usize, n: usize, m_max: usize) -> Result<Vec<CodeSet>> {
    check_rate(k, n)?;
    let mut sets: Vec<CodeSet> = Vec::with_capacity(m_max + 1);
    let mut prev = vec![GeneratorMatrix::zero(k, n, 0)?];
    for m in 0..=m_max {
        let layers = 1u64 << (k * n);
        let bucket = prev
            .par_iter()
            .flat_map_iter(|g| (0..layers).map(move |layer| (g, layer)))
            .map(|(g, layer)| -> Result<Option<(Vec<u32>, GeneratorMatrix)>> {
                let cand = g.with_layer(m, layer)?;
                if !cand.has_sorted_rows_cols() {
                    return Ok(None);
                }
                Ok(Some((column_distances(&cand, m)?, cand)))
            })
            .try_fold(Bucket::default, |b, r| {
                Ok::<_, Error>(match r? {
                    Some((p, g)) => b.offer(p, g),
                    None => b,
                })
            })
            .try_reduce(Bucket::default, |a, b| Ok(a.join(b)))?
            .finish();
        prev = bucket.members.clone();
        sets.push(CodeSet {
            k,
            n,
            m,
            s: None,
            members: bucket.members,
            profile: Profile {
                values: bucket.profile,
                kind: ProfileKind::Forward(Shortening::By(0)),
            },
        });
    }
    Ok(sets)
}

/// Stage II: the OBCDF (`s = Unbounded`) or `OBDP^(s)` set for memory `m`,
/// after removal of trivially equivalent members.
///
/// `odp` must hold at least `U_0 ..= U_{floor(m/2)}`, as returned by
/// [`odp_sets`].
pub fn obdp_set(
    k: usize,
    n: usize,
    m: usize,
    s: Shortening,
    odp: &[CodeSet],
    cfg: &SearchConfig,
) -> Result<CodeSet> {
    check_rate(k, n)?;
    if let Shortening::By(s) = s {
        if m < (2 * s).saturating_sub(1).max(1) {
            return Err(Error::Search(format!(
                "memory {m} is below max(1, 2s - 1) for s = {s}"
            )));
        }
    } else if m == 0 {
        return Err(Error::Search("memory must be at least 1".into()));
    }
    if odp.len() <= m / 2 || odp.iter().any(|u| u.k != k || u.n != n) {
        return Err(Error::Search(format!(
            "stage II for memory {m} needs ODP sets of rate {k}/{n} up to memory {}",
            m / 2
        )));
    }
    let depth = cfg.profile_depth(m, s);
    let bucket = if m % 2 == 1 {
        let p = (m - 1) / 2;
        concatenations(&odp[p].members, &odp[p].members, m, &[None], depth)?
    } else if cfg.even_mode == EvenMode::Accelerated {
        let half = m / 2;
        let b = concatenations(&odp[half].members, &odp[half - 1].members, m, &[None], depth)?;
        // certified when the reverse profile also reaches the ODP value at m/2
        let target = &odp[half].profile.values;
        if !b.members.is_empty() && b.profile[..=half] == target[..] {
            b
        } else {
            full_even(k, n, m, odp, depth)?
        }
    } else {
        full_even(k, n, m, odp, depth)?
    };
    let bucket = if bucket.members.is_empty() && m == 1 {
        exhaustive(k, n, m, depth)?
    } else {
        bucket
    };
    if bucket.members.is_empty() {
        return Err(Error::Search(format!(
            "every candidate of memory {m} is catastrophic"
        )));
    }
    let members = dedup_trivial_equiv(&bucket.members);
    Ok(CodeSet {
        k,
        n,
        m,
        s: Some(s),
        members,
        profile: Profile {
            values: bucket.profile,
            kind: ProfileKind::Bidirectional(s),
        },
    })
}

fn full_even(k: usize, n: usize, m: usize, odp: &[CodeSet], depth: usize) -> Result<Bucket> {
    let p = m / 2 - 1;
    let middles = (0..1u64 << (k * n))
        .map(|layer| GeneratorMatrix::zero(k, n, 0)?.with_layer(0, layer).map(Some))
        .collect::<Result<Vec<_>>>()?;
    concatenations(&odp[p].members, &odp[p].members, m, &middles, depth)
}

/// Every non-catastrophic concatenation of a forward half, an optional
/// middle layer and a relabeled backward half, reduced to the best bucket.
fn concatenations(
    forward: &[GeneratorMatrix],
    backward: &[GeneratorMatrix],
    m: usize,
    middles: &[Option<GeneratorMatrix>],
    depth: usize,
) -> Result<Bucket> {
    let Some(first) = forward.first() else {
        return Ok(Bucket::default());
    };
    let rows = Permutation::all(first.k());
    let cols = Permutation::all(first.n());
    let jobs: Vec<_> = forward
        .iter()
        .flat_map(|f| backward.iter().map(move |b| (f, b)))
        .flat_map(|(f, b)| middles.iter().map(move |mid| (f, b, mid)))
        .collect();
    let bucket = jobs
        .par_iter()
        .map(|&(f, b, mid)| -> Result<Bucket> {
            let mut bucket = Bucket::default();
            for pi in &rows {
                for rho in &cols {
                    let g = concat_halves(f, b, m, mid.as_ref(), pi, rho)?;
                    if is_catastrophic(&g)? {
                        continue;
                    }
                    let profile = bidirectional_distances(&g, depth)?;
                    bucket = bucket.offer(profile, g);
                }
            }
            Ok(bucket)
        })
        .try_reduce(Bucket::default, |a, b| Ok(a.join(b)))?;
    Ok(bucket.finish())
}

/// All non-catastrophic matrices of memory `m` with sorted rows and columns.
fn exhaustive(k: usize, n: usize, m: usize, depth: usize) -> Result<Bucket> {
    let bits = k * n * (m + 1);
    if bits > 30 {
        return Err(Error::Search(format!("exhaustive search over 2^{bits} matrices")));
    }
    let bucket = (0u64..1 << bits)
        .into_par_iter()
        .map(|word| -> Result<Option<(Vec<u32>, GeneratorMatrix)>> {
            let mask = (1u64 << (m + 1)) - 1;
            let polys = (0..k * n).map(|i| (word >> (i * (m + 1))) & mask).collect();
            let g = GeneratorMatrix::new(k, n, m, polys)?;
            if g.has_zero_row() || !g.has_sorted_rows_cols() || is_catastrophic(&g)? {
                return Ok(None);
            }
            Ok(Some((bidirectional_distances(&g, depth)?, g)))
        })
        .try_fold(Bucket::default, |b, r| {
            Ok::<_, Error>(match r? {
                Some((p, g)) => b.offer(p, g),
                None => b,
            })
        })
        .try_reduce(Bucket::default, |a, b| Ok(a.join(b)))?;
    Ok(bucket.finish())
}

/// Lowest member, under [`GeneratorMatrix::lex_cmp`], of the class of `g`
/// under row/column relabeling and reversal.
pub fn canonical_form(g: &GeneratorMatrix) -> GeneratorMatrix {
    let rev = g.reverse();
    g.permutations()
        .chain(rev.permutations())
        .min_by(GeneratorMatrix::lex_cmp)
        .expect("at least the identity relabeling")
}

pub fn trivially_equivalent(a: &GeneratorMatrix, b: &GeneratorMatrix) -> bool {
    (a.k(), a.n(), a.m()) == (b.k(), b.n(), b.m()) && canonical_form(a) == canonical_form(b)
}

/// Keeps the lexicographically lowest member of each class of trivially
/// equivalent matrices; output is sorted.
pub fn dedup_trivial_equiv(members: &[GeneratorMatrix]) -> Vec<GeneratorMatrix> {
    let keyed: Vec<(GeneratorMatrix, &GeneratorMatrix)> =
        members.par_iter().map(|g| (canonical_form(g), g)).collect();
    let mut best: BTreeMap<Vec<u64>, &GeneratorMatrix> = BTreeMap::new();
    for (key, g) in keyed {
        let slot = best.entry(key.polys().to_vec()).or_insert(g);
        if g.lex_cmp(slot) == Ordering::Less {
            *slot = g;
        }
    }
    let mut out: Vec<GeneratorMatrix> = best.into_values().cloned().collect();
    out.sort_by(GeneratorMatrix::lex_cmp);
    out
}

/// Codes paired with their spectra.
pub type Ranked<C> = Vec<(GeneratorMatrix, Spectrum<C>)>;

/// Members with the lowest information spectrum over `terms` terms, with
/// their spectra. Ties are all returned.
pub fn select_best_spectrum<C: Count>(
    members: &[GeneratorMatrix],
    terms: usize,
) -> Result<Ranked<C>> {
    let scored = members
        .par_iter()
        .map(|g| Ok((g.clone(), spectra::<C>(g, terms)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Vec<(GeneratorMatrix, Spectrum<C>)> = Vec::new();
    for (g, s) in scored {
        match best.first().map(|(_, b)| compare_spectra(&s, b)) {
            None | Some(Quality::Equal) => best.push((g, s)),
            Some(Quality::Better) => best = vec![(g, s)],
            Some(Quality::Worse) => {}
        }
    }
    Ok(best)
}

/// Stage I, stage II and spectrum selection for one `(k, n, m, s)`.
pub fn search<C: Count>(
    k: usize,
    n: usize,
    m: usize,
    s: Shortening,
    cfg: &SearchConfig,
) -> Result<(CodeSet, Ranked<C>)> {
    let odp = odp_sets(k, n, m / 2)?;
    let set = obdp_set(k, n, m, s, &odp, cfg)?;
    let best = select_best_spectrum(&set.members, cfg.spectrum_terms)?;
    Ok((set, best))
}
