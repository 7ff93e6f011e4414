//! Free distance and information/code distance spectra by error-event
//! enumeration on the weight-capped state graph.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rustc_hash::FxHashMap;

use crate::count::Count;
use crate::distance::{is_catastrophic, Quality};
use crate::error::{Error, Result};
use crate::polymat::GeneratorMatrix;
use crate::trellis::{EncoderState, Encoder};

/// Spectrum terms listed in the code tables.
pub const TABLE_TERMS: usize = 16;

/// Largest `k m` for which a full table of distances back to the zero state
/// is built and used to prune the census.
pub const RETURN_TABLE_BITS: usize = 24;

/// Free distance plus `a_d` and `c_d` for `d = d_free, .., d_free + T - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Spectrum<C> {
    pub d_free: u32,
    pub a: Vec<C>,
    pub c: Vec<C>,
}

impl<C: Count> Spectrum<C> {
    pub fn terms(&self) -> usize {
        self.a.len()
    }

    /// `c_d`, zero outside the computed window below it.
    pub fn c_at(&self, d: u32) -> Option<C> {
        if d < self.d_free {
            return Some(C::zero());
        }
        self.c.get((d - self.d_free) as usize).cloned()
    }
}

impl<C: fmt::Display> fmt::Display for Spectrum<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[C]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{} : {} : {}", self.d_free, join(&self.a), join(&self.c))
    }
}

impl<C: FromStr> FromStr for Spectrum<C> {
    type Err = Error;

    /// Parses `d_inf : a0,a1,.. : c0,c1,..`.
    fn from_str(text: &str) -> Result<Self> {
        let syntax = |reason: &str| Error::Syntax {
            line: text.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let [d, a, c] = parts[..] else {
            return Err(syntax("expected 'd_inf : a.. : c..'"));
        };
        let list = |s: &str| -> Result<Vec<C>> {
            s.split(',')
                .map(|x| x.trim().parse().map_err(|_| syntax("bad count")))
                .collect()
        };
        let spectrum = Spectrum {
            d_free: d.parse().map_err(|_| syntax("bad free distance"))?,
            a: list(a)?,
            c: list(c)?,
        };
        if spectrum.a.len() != spectrum.c.len() {
            return Err(syntax("a and c differ in length"));
        }
        Ok(spectrum)
    }
}

/// Lower `c` is better. Both sequences are placed on the absolute weight
/// axis (zeros below each free distance) and compared over the weights known
/// for both.
pub fn compare_spectra<C: Count>(x: &Spectrum<C>, y: &Spectrum<C>) -> Quality {
    let lo = x.d_free.min(y.d_free);
    let hi = (x.d_free as usize + x.c.len()).min(y.d_free as usize + y.c.len()) as u32;
    for d in lo..hi {
        let (cx, cy) = (x.c_at(d).expect("in range"), y.c_at(d).expect("in range"));
        match cx.cmp(&cy) {
            std::cmp::Ordering::Less => return Quality::Better,
            std::cmp::Ordering::Greater => return Quality::Worse,
            std::cmp::Ordering::Equal => {}
        }
    }
    Quality::Equal
}

/// Limits on the error-event census.
#[derive(Clone, Copy, Debug)]
pub struct CensusLimits {
    /// Maximum number of `(state, weight)` updates before giving up.
    pub steps: usize,
}

impl Default for CensusLimits {
    fn default() -> Self {
        Self { steps: 1 << 34 }
    }
}

/// Minimum codeword weight of an error event.
pub fn free_distance(g: &GeneratorMatrix) -> Result<u32> {
    if is_catastrophic(g)? {
        return Err(Error::Catastrophic);
    }
    let enc = Encoder::new(g)?;
    free_distance_unchecked(&enc, CensusLimits::default().steps)
}

/// Shortest path from the zero state back to it over a nonzero first branch,
/// by Dijkstra with the state map kept sparse.
fn free_distance_unchecked(enc: &Encoder, step_limit: usize) -> Result<u32> {
    let mut best: FxHashMap<EncoderState, u32> = FxHashMap::default();
    let mut heap = BinaryHeap::new();
    let mut answer = u32::MAX;
    for u in 1..1u64 << enc.k() {
        let (s, w) = (enc.next_state(0, u), enc.output_weight(0, u));
        if s == 0 {
            answer = answer.min(w);
        } else if best.get(&s).is_none_or(|&b| w < b) {
            best.insert(s, w);
            heap.push(Reverse((w, s)));
        }
    }
    let mut steps = 0;
    while let Some(Reverse((w, s))) = heap.pop() {
        if w >= answer {
            break;
        }
        if best.get(&s).is_some_and(|&b| b < w) {
            continue;
        }
        steps += 1;
        if steps > step_limit {
            return Err(Error::StepLimit(step_limit));
        }
        for u in 0..1u64 << enc.k() {
            let (t, v) = (enc.next_state(s, u), w + enc.output_weight(s, u));
            if t == 0 {
                answer = answer.min(v);
            } else if v < answer && best.get(&t).is_none_or(|&b| v < b) {
                best.insert(t, v);
                heap.push(Reverse((v, t)));
            }
        }
    }
    Ok(answer)
}

/// `h[s]`: least output weight of a path from `s` to the zero state.
fn return_distances(enc: &Encoder) -> Vec<u32> {
    let (k, m) = (enc.k(), enc.m());
    let states = 1usize << (k * m);
    let mut h = vec![u32::MAX; states];
    h[0] = 0;
    let mut heap = BinaryHeap::from([Reverse((0u32, 0u64))]);
    let high = k * (m - 1);
    while let Some(Reverse((w, t))) = heap.pop() {
        if h[t as usize] < w {
            continue;
        }
        // predecessors of t: s = (t >> k) | x << k(m-1), input u = low block of t
        let u = t & ((1 << k) - 1);
        for x in 0..1u64 << k {
            let s = (t >> k) | (x << high);
            if s == 0 {
                continue;
            }
            let v = w + enc.output_weight(s, u);
            if v < h[s as usize] {
                h[s as usize] = v;
                heap.push(Reverse((v, s)));
            }
        }
    }
    h
}

/// Exact `a_d, c_d` for `d = d_free .. d_free + terms - 1`.
pub fn spectra<C: Count>(g: &GeneratorMatrix, terms: usize) -> Result<Spectrum<C>> {
    spectra_with_limits(g, terms, CensusLimits::default())
}

pub fn spectra_with_limits<C: Count>(
    g: &GeneratorMatrix,
    terms: usize,
    limits: CensusLimits,
) -> Result<Spectrum<C>> {
    if terms == 0 {
        return Err(Error::Search("spectrum needs at least one term".into()));
    }
    if is_catastrophic(g)? {
        return Err(Error::Catastrophic);
    }
    let enc = Encoder::new(g)?;
    let h = (enc.state_bits() <= RETURN_TABLE_BITS && enc.m() > 0).then(|| return_distances(&enc));
    let d_free = match &h {
        Some(h) => (1..1u64 << enc.k())
            .map(|u| enc.output_weight(0, u) + h[enc.next_state(0, u) as usize])
            .min()
            .expect("k >= 1"),
        None => free_distance_unchecked(&enc, limits.steps)?,
    };
    let cap = d_free + terms as u32 - 1;
    let mut a = vec![C::zero(); terms];
    let mut c = vec![C::zero(); terms];
    let lower = |s: EncoderState| h.as_ref().map_or(0, |h| h[s as usize]);

    // live paths: state -> weight -> (path count, summed information weight)
    type Cell<C> = FxHashMap<u32, (C, C)>;
    let mut live: FxHashMap<EncoderState, Cell<C>> = FxHashMap::default();
    let record = |w: u32, n: &C, iw: &C, a: &mut [C], c: &mut [C]| -> Result<()> {
        let idx = (w - d_free) as usize;
        a[idx] = a[idx].checked_add(n).ok_or(Error::CountOverflow)?;
        c[idx] = c[idx].checked_add(iw).ok_or(Error::CountOverflow)?;
        Ok(())
    };

    for u in 1..1u64 << enc.k() {
        let (s, w) = (enc.next_state(0, u), enc.output_weight(0, u));
        let iw = C::from_u32(u.count_ones()).ok_or(Error::CountOverflow)?;
        if s == 0 {
            if w <= cap {
                record(w, &C::one(), &iw, &mut a, &mut c)?;
            }
        } else if w + lower(s) <= cap {
            merge(live.entry(s).or_default(), w, C::one(), iw)?;
        }
    }

    let mut steps = 0usize;
    while !live.is_empty() {
        let mut next: FxHashMap<EncoderState, Cell<C>> = FxHashMap::default();
        for (s, cell) in live {
            for (w, (n, iw)) in cell {
                steps += 1;
                if steps > limits.steps {
                    return Err(Error::StepLimit(limits.steps));
                }
                for u in 0..1u64 << enc.k() {
                    let t = enc.next_state(s, u);
                    let v = w + enc.output_weight(s, u);
                    if v + lower(t) > cap {
                        continue;
                    }
                    let bits = C::from_u32(u.count_ones()).ok_or(Error::CountOverflow)?;
                    let extra = n.checked_mul(&bits).ok_or(Error::CountOverflow)?;
                    let niw = iw.checked_add(&extra).ok_or(Error::CountOverflow)?;
                    if t == 0 {
                        record(v, &n, &niw, &mut a, &mut c)?;
                    } else {
                        merge(next.entry(t).or_default(), v, n.clone(), niw)?;
                    }
                }
            }
        }
        live = next;
    }
    Ok(Spectrum { d_free, a, c })
}

fn merge<C: Count>(cell: &mut FxHashMap<u32, (C, C)>, w: u32, n: C, iw: C) -> Result<()> {
    match cell.get_mut(&w) {
        Some((cn, ciw)) => {
            *cn = cn.checked_add(&n).ok_or(Error::CountOverflow)?;
            *ciw = ciw.checked_add(&iw).ok_or(Error::CountOverflow)?;
        }
        None => {
            cell.insert(w, (n, iw));
        }
    }
    Ok(())
}

/// 128-bit spectrum; ample for the 16-term tables.
pub type Spectrum128 = Spectrum<u128>;
/// Arbitrary-precision spectrum for long windows.
pub type ExactSpectrum = Spectrum<BigUint>;
