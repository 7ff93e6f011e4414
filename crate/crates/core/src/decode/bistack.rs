use num_traits::Float;
use rustc_hash::FxHashMap;

use super::stack::{fano_rate, Node, Tree};
use super::{blocks_to_bits, BranchMetrics, DecodeOutcome, SoftFrame};
use crate::error::{Error, Result};
use crate::polymat::GeneratorMatrix;
use crate::trellis::{reverse_blocks, Encoder, EncoderState};

/// Which tree is extended next.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Schedule {
    /// The tree whose best node has the larger metric.
    #[default]
    LargerTop,
    /// Forward and backward in turn.
    Alternate,
}

/// The tree extended first and on metric ties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

/// Which nodes take part in merge detection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MergeScope {
    /// Every newly inserted node is matched against all inserted nodes of
    /// the other tree.
    #[default]
    Inserted,
    /// Only extended nodes are matched, against extended nodes of the other
    /// tree.
    Extended,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BistackConfig {
    /// Cap on the nodes of both trees together, roots included.
    pub max_nodes: u64,
    pub schedule: Schedule,
    pub merge: MergeScope,
    pub first: Direction,
}

impl BistackConfig {
    pub fn new(max_nodes: u64) -> Self {
        Self {
            max_nodes,
            schedule: Schedule::default(),
            merge: MergeScope::default(),
            first: Direction::default(),
        }
    }
}

/// Best node per `(depth, state)` of one tree.
type Index = FxHashMap<(u32, EncoderState), u32>;

fn remember<F: Float>(index: &mut Index, tree: &Tree<F>, idx: u32) {
    let node = tree.nodes[idx as usize];
    let slot = index.entry((node.depth, node.state)).or_insert(idx);
    if node.metric > tree.nodes[*slot as usize].metric {
        *slot = idx;
    }
}

/// Bidirectional stack algorithm.
///
/// The forward tree decodes with `g` from the start of the frame. The
/// backward tree decodes with the reverse generator from the end of the
/// frame, on the observation blocks in reverse order (bit order inside a
/// block unchanged); its input sequence is the information blocks in
/// reverse order followed by the zero tail. A forward node at depth `t` and
/// a backward node at depth `T - t` form a codeword when the forward state
/// equals the block-reversed backward state.
pub fn bistack_decode<F: Float>(
    g: &GeneratorMatrix,
    frame: &SoftFrame<F>,
    cfg: &BistackConfig,
) -> Result<DecodeOutcome<F>> {
    if cfg.max_nodes < 2 {
        return Err(Error::Config(
            "the bidirectional decoder needs room for two roots".into(),
        ));
    }
    let (l, t_total) = frame.blocks(g)?;
    let (k, m) = (g.k(), g.m());
    let fwd_metrics = BranchMetrics::fano(&frame.r, g.n(), frame.sigma, fano_rate(g));
    let bwd_metrics = fwd_metrics.reversed();
    let mut trees = [
        Tree::new(Encoder::new(g)?, fwd_metrics, l, t_total),
        Tree::new(Encoder::new(&g.reverse())?, bwd_metrics, l, t_total),
    ];
    let mut index = [Index::default(), Index::default()];
    if cfg.merge == MergeScope::Inserted {
        remember(&mut index[0], &trees[0], 0);
        remember(&mut index[1], &trees[1], 0);
    }
    let (mut inserted, mut extended) = (2u64, 0u64);
    let preferred = match cfg.first {
        Direction::Forward => 0usize,
        Direction::Backward => 1,
    };
    let mut turn = preferred;

    // other-tree node completing `node` of tree `side`, if any
    let partner = |index: &Index, node: &Node<F>| -> Option<u32> {
        let depth = t_total.checked_sub(node.depth as usize)? as u32;
        index
            .get(&(depth, reverse_blocks(node.state, k, m)))
            .copied()
    };

    loop {
        let side = match cfg.schedule {
            Schedule::LargerTop => match (trees[0].top_metric(), trees[1].top_metric()) {
                (Some(a), Some(b)) if a == b => preferred,
                (Some(a), Some(b)) => usize::from(b > a),
                (Some(_), None) => 0,
                (None, Some(_)) => 1,
                (None, None) => unreachable!("a tree runs dry only after reaching full depth"),
            },
            Schedule::Alternate => {
                let s = if trees[turn].top_metric().is_some() { turn } else { 1 - turn };
                turn = 1 - s;
                s
            }
        };
        let idx = trees[side].pop().expect("chosen tree is not empty");
        let node = trees[side].nodes[idx as usize];
        if node.depth as usize == t_total {
            return Ok(finish(&trees, side, idx, None, l, k, inserted, extended));
        }
        extended += 1;
        if cfg.merge == MergeScope::Extended {
            remember(&mut index[side], &trees[side], idx);
            if let Some(other) = partner(&index[1 - side], &node) {
                return Ok(finish(&trees, side, idx, Some(other), l, k, inserted, extended));
            }
        }
        let children: Vec<Node<F>> = trees[side].successors(idx).collect();
        for child in children {
            if inserted == cfg.max_nodes {
                return Ok(DecodeOutcome::failure(inserted, extended));
            }
            inserted += 1;
            let cidx = trees[side].insert(child);
            if cfg.merge == MergeScope::Inserted {
                remember(&mut index[side], &trees[side], cidx);
                if let Some(other) = partner(&index[1 - side], &child) {
                    return Ok(finish(&trees, side, cidx, Some(other), l, k, inserted, extended));
                }
            }
        }
    }
}

/// Joins a node of tree `side` with its partner in the other tree (or uses
/// it alone when it already spans the frame).
#[allow(clippy::too_many_arguments)]
fn finish<F: Float>(
    trees: &[Tree<F>; 2],
    side: usize,
    idx: u32,
    other: Option<u32>,
    l: usize,
    k: usize,
    inserted: u64,
    extended: u64,
) -> DecodeOutcome<F> {
    let (f_idx, b_idx) = if side == 0 { (Some(idx), other) } else { (other, Some(idx)) };
    let metric_of = |t: usize, i: Option<u32>| i.map_or(F::zero(), |i| trees[t].nodes[i as usize].metric);
    let fwd = f_idx.map(|i| trees[0].path(i)).unwrap_or_default();
    let bwd = b_idx.map(|i| trees[1].path(i)).unwrap_or_default();
    let blocks: Vec<u64> = (0..l)
        .map(|j| if j < fwd.len() { fwd[j] } else { bwd[l - 1 - j] })
        .collect();
    debug_assert!(fwd.len() + bwd.len() == trees[0].total());
    DecodeOutcome {
        info_bits: Some(blocks_to_bits(&blocks, k)),
        failed: false,
        inserted,
        extended,
        metric: metric_of(0, f_idx) + metric_of(1, b_idx),
    }
}
