//! Maximum-likelihood and sequential decoders for zero-terminated frames.

mod bistack;
mod metric;
mod stack;
mod viterbi;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::polymat::GeneratorMatrix;
use crate::trellis::mask;

pub use bistack::{bistack_decode, BistackConfig, Direction, MergeScope, Schedule};
pub use metric::{fano_branch_metric, fano_symbol_metric, BranchMetrics};
pub use stack::stack_decode;
pub use viterbi::{viterbi, VITERBI_MAX_STATE_BITS};

/// Channel outputs for one zero-terminated frame, with the noise level the
/// receiver assumes.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftFrame<F> {
    /// One observation per code bit, `(K/k + m) n` in total.
    pub r: Vec<F>,
    /// Noise standard deviation.
    pub sigma: F,
    /// Information bits `K`.
    pub info_len: usize,
}

impl<F: Float> SoftFrame<F> {
    pub fn new(r: Vec<F>, sigma: F, info_len: usize, g: &GeneratorMatrix) -> Result<Self> {
        let frame = Self { r, sigma, info_len };
        frame.blocks(g)?;
        Ok(frame)
    }

    /// `(L, T)`: information blocks and total blocks, after checking that the
    /// frame fits `g`.
    pub fn blocks(&self, g: &GeneratorMatrix) -> Result<(usize, usize)> {
        if !self.info_len.is_multiple_of(g.k()) {
            return Err(Error::FrameLength(self.info_len, g.k()));
        }
        let l = self.info_len / g.k();
        let t = l + g.m();
        if self.r.len() != t * g.n() {
            return Err(Error::ObservationLength {
                expected: t * g.n(),
                found: self.r.len(),
            });
        }
        Ok((l, t))
    }

    /// Noise-free observations of a codeword (`+1` for 0, `-1` for 1).
    pub fn noiseless(code_bits: &[u8], sigma: F, info_len: usize) -> Self {
        let r = code_bits
            .iter()
            .map(|&b| if b == 0 { F::one() } else { -F::one() })
            .collect();
        Self { r, sigma, info_len }
    }
}

/// Result of decoding one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutcome<F> {
    /// Decoded information bits; `None` when the decoder gave up.
    pub info_bits: Option<Vec<u8>>,
    pub failed: bool,
    /// Nodes placed in the code tree(s), roots included.
    pub inserted: u64,
    /// Nodes whose successors were generated.
    pub extended: u64,
    /// Metric of the chosen path: correlation for the Viterbi decoder, Fano
    /// metric for the stack decoders.
    pub metric: F,
}

impl<F: Float> DecodeOutcome<F> {
    pub(crate) fn failure(inserted: u64, extended: u64) -> Self {
        Self {
            info_bits: None,
            failed: true,
            inserted,
            extended,
            metric: F::neg_infinity(),
        }
    }
}

/// Information bits from a sequence of input blocks, block `t` bit `i` at
/// position `t k + i`.
pub(crate) fn blocks_to_bits(blocks: &[u64], k: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(blocks.len() * k);
    for &b in blocks {
        crate::trellis::unpack_block(b & mask(k), k, &mut out);
    }
    out
}

/// Correlation `sum (1 - 2 v_i) r_i` of a codeword with the observations.
pub fn correlation<F: Float>(code_bits: &[u8], r: &[F]) -> F {
    code_bits
        .iter()
        .zip(r)
        .fold(F::zero(), |acc, (&b, &x)| if b == 0 { acc + x } else { acc - x })
}
