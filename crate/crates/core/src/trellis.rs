//! Feedforward encoder state machine and zero-terminated frame encoding.
//!
//! The encoder state holds the last `m` information blocks, newest block in
//! the low `k` bits: `state = u_{t-1} | u_{t-2} << k | ... | u_{t-m} << k(m-1)`.
//! Bit `i` of a block is input `i`. Output blocks use bit `j` for output `j`.

use crate::error::{Error, Result};
use crate::polymat::GeneratorMatrix;

/// Encoder state: the last `m` information blocks, newest first.
pub type EncoderState = u64;

/// Shift-register realization of a generator matrix.
#[derive(Clone, Debug)]
pub struct Encoder {
    k: usize,
    n: usize,
    m: usize,
    /// For output `j`, bit `l * k + i` is `g_ij^(l)`.
    taps: Vec<u64>,
}

impl Encoder {
    /// Needs `k (m + 1) <= 64` so that a state plus one input block fits a word.
    pub fn new(g: &GeneratorMatrix) -> Result<Self> {
        let (k, n, m) = (g.k(), g.n(), g.m());
        if k * (m + 1) > 64 {
            return Err(Error::StateSpace(k * m));
        }
        let taps = (0..n)
            .map(|j| {
                let mut t = 0u64;
                for l in 0..=m {
                    for i in 0..k {
                        if g.coeff(i, j, l) {
                            t |= 1 << (l * k + i);
                        }
                    }
                }
                t
            })
            .collect();
        Ok(Self { k, n, m, taps })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of state bits, `k m`.
    pub fn state_bits(&self) -> usize {
        self.k * self.m
    }

    pub fn state_mask(&self) -> u64 {
        mask(self.state_bits())
    }

    /// Output block for input block `u` in state `s`.
    #[inline]
    pub fn output(&self, s: EncoderState, u: u64) -> u64 {
        let reg = (s << self.k) | u;
        self.taps
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &t)| acc | (((reg & t).count_ones() as u64) & 1) << j)
    }

    /// Hamming weight of the output block.
    #[inline]
    pub fn output_weight(&self, s: EncoderState, u: u64) -> u32 {
        let reg = (s << self.k) | u;
        self.taps
            .iter()
            .map(|&t| (reg & t).count_ones() & 1)
            .sum()
    }

    #[inline]
    pub fn next_state(&self, s: EncoderState, u: u64) -> EncoderState {
        ((s << self.k) | u) & self.state_mask()
    }

    /// One encoder step: `(next state, output block)`.
    #[inline]
    pub fn step(&self, s: EncoderState, u: u64) -> (EncoderState, u64) {
        (self.next_state(s, u), self.output(s, u))
    }

    /// Encodes `info_bits` (a multiple of `k` bits) followed by `m` zero blocks.
    pub fn encode(&self, info_bits: &[u8]) -> Result<Frame> {
        if !info_bits.len().is_multiple_of(self.k) {
            return Err(Error::FrameLength(info_bits.len(), self.k));
        }
        let blocks = info_bits.len() / self.k;
        let mut code_bits = Vec::with_capacity((blocks + self.m) * self.n);
        let mut s = 0;
        for t in 0..blocks + self.m {
            let u = if t < blocks {
                pack_block(&info_bits[t * self.k..(t + 1) * self.k])
            } else {
                0
            };
            let (next, v) = self.step(s, u);
            unpack_block(v, self.n, &mut code_bits);
            s = next;
        }
        debug_assert_eq!(s, 0);
        Ok(Frame {
            info_bits: info_bits.to_vec(),
            code_bits,
        })
    }
}

/// A zero-terminated codeword together with its information bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub info_bits: Vec<u8>,
    pub code_bits: Vec<u8>,
}

/// Convenience wrapper around [`Encoder::encode`].
pub fn encode(g: &GeneratorMatrix, info_bits: &[u8]) -> Result<Frame> {
    Encoder::new(g)?.encode(info_bits)
}

pub(crate) fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Packs a slice of 0/1 values into a block, element `i` at bit `i`.
pub fn pack_block(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (u64::from(b & 1) << i))
}

/// Appends the low `width` bits of `block` to `out`, bit 0 first.
pub fn unpack_block(block: u64, width: usize, out: &mut Vec<u8>) {
    out.extend((0..width).map(|i| ((block >> i) & 1) as u8));
}

/// Reverses the order of the `m` blocks of `k` bits in a state; bits inside a
/// block keep their order.
pub fn reverse_blocks(s: EncoderState, k: usize, m: usize) -> EncoderState {
    let bm = mask(k);
    (0..m).fold(0, |acc, l| acc | (((s >> (l * k)) & bm) << ((m - 1 - l) * k)))
}
