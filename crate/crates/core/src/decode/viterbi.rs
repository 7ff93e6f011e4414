use num_traits::Float;

use super::{blocks_to_bits, BranchMetrics, DecodeOutcome, SoftFrame};
use crate::error::{Error, Result};
use crate::polymat::GeneratorMatrix;
use crate::trellis::Encoder;

/// Largest number of state bits the Viterbi decoder accepts.
pub const VITERBI_MAX_STATE_BITS: usize = 20;

/// Maximum-likelihood decoding of a zero-terminated frame by maximizing the
/// correlation between the bipolar codeword and the observations.
///
/// Among equally good predecessors the one reached first (lowest input
/// block, then lowest dropped block) survives.
pub fn viterbi<F: Float>(g: &GeneratorMatrix, frame: &SoftFrame<F>) -> Result<DecodeOutcome<F>> {
    let (l, t_total) = frame.blocks(g)?;
    let enc = Encoder::new(g)?;
    let (k, bits) = (g.k(), enc.state_bits());
    if bits > VITERBI_MAX_STATE_BITS {
        return Err(Error::StateSpace(bits));
    }
    let states = 1usize << bits;
    let metrics = BranchMetrics::correlation(&frame.r, g.n());
    let mut score = vec![F::neg_infinity(); states];
    let mut next = vec![F::neg_infinity(); states];
    score[0] = F::zero();
    // survivor of (t + 1, state): the block shifted out of the predecessor,
    // or the input block itself when there is no memory
    let mut dropped = vec![0u8; t_total * states];
    let shift = k * g.m().saturating_sub(1);
    for t in 0..t_total {
        next.fill(F::neg_infinity());
        let inputs = if t < l { 1u64 << k } else { 1 };
        let row = &mut dropped[t * states..(t + 1) * states];
        for (s, &base) in score.iter().enumerate() {
            if base == F::neg_infinity() {
                continue;
            }
            for u in 0..inputs {
                let (ns, v) = enc.step(s as u64, u);
                let cand = base + metrics.get(t, v);
                if cand > next[ns as usize] {
                    next[ns as usize] = cand;
                    row[ns as usize] = if g.m() == 0 { u as u8 } else { (s >> shift) as u8 };
                }
            }
        }
        std::mem::swap(&mut score, &mut next);
    }
    let metric = score[0];
    let mut blocks = vec![0u64; t_total];
    let mut s = 0u64;
    for t in (0..t_total).rev() {
        let x = u64::from(dropped[t * states + s as usize]);
        if g.m() == 0 {
            blocks[t] = x;
        } else {
            blocks[t] = s & ((1 << k) - 1);
            s = (s >> k) | (x << shift);
        }
    }
    Ok(DecodeOutcome {
        info_bits: Some(blocks_to_bits(&blocks[..l], k)),
        failed: false,
        inserted: 0,
        extended: 0,
        metric,
    })
}
