use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_traits::Float;

use super::{blocks_to_bits, BranchMetrics, DecodeOutcome, SoftFrame};
use crate::error::{Error, Result};
use crate::polymat::GeneratorMatrix;
use crate::trellis::{EncoderState, Encoder};

const NO_PARENT: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Node<F> {
    pub parent: u32,
    pub depth: u32,
    pub state: EncoderState,
    pub input: u64,
    pub metric: F,
}

/// Stack entry: larger metric first, then earlier insertion.
struct Entry<F> {
    metric: F,
    seq: u64,
    idx: u32,
}

impl<F: Float> PartialEq for Entry<F> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<F: Float> Eq for Entry<F> {}

impl<F: Float> PartialOrd for Entry<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<F: Float> Ord for Entry<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.metric
            .partial_cmp(&other.metric)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// One best-first code tree over a frame of `total` blocks whose first
/// `info` blocks carry information.
pub(crate) struct Tree<F> {
    enc: Encoder,
    metrics: BranchMetrics<F>,
    info: usize,
    total: usize,
    pub nodes: Vec<Node<F>>,
    heap: BinaryHeap<Entry<F>>,
    seq: u64,
}

impl<F: Float> Tree<F> {
    pub fn new(enc: Encoder, metrics: BranchMetrics<F>, info: usize, total: usize) -> Self {
        let mut tree = Self {
            enc,
            metrics,
            info,
            total,
            nodes: Vec::new(),
            heap: BinaryHeap::new(),
            seq: 0,
        };
        tree.insert(Node {
            parent: NO_PARENT,
            depth: 0,
            state: 0,
            input: 0,
            metric: F::zero(),
        });
        tree
    }

    pub fn insert(&mut self, node: Node<F>) -> u32 {
        let idx = self.nodes.len() as u32;
        self.heap.push(Entry {
            metric: node.metric,
            seq: self.seq,
            idx,
        });
        self.seq += 1;
        self.nodes.push(node);
        idx
    }

    pub fn top_metric(&self) -> Option<F> {
        self.heap.peek().map(|e| e.metric)
    }

    pub fn pop(&mut self) -> Option<u32> {
        self.heap.pop().map(|e| e.idx)
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Successors of a node: every input block inside the information part,
    /// only the zero block in the termination tail.
    pub fn successors(&self, idx: u32) -> impl Iterator<Item = Node<F>> + '_ {
        let node = self.nodes[idx as usize];
        let t = node.depth as usize;
        let inputs = if t < self.info { 1u64 << self.enc.k() } else { 1 };
        (0..inputs).map(move |u| {
            let (state, v) = self.enc.step(node.state, u);
            Node {
                parent: idx,
                depth: node.depth + 1,
                state,
                input: u,
                metric: node.metric + self.metrics.get(t, v),
            }
        })
    }

    /// Input blocks along the path from the root to `idx`.
    pub fn path(&self, mut idx: u32) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.nodes[idx as usize].depth as usize);
        while self.nodes[idx as usize].parent != NO_PARENT {
            out.push(self.nodes[idx as usize].input);
            idx = self.nodes[idx as usize].parent;
        }
        out.reverse();
        out
    }
}

pub(crate) fn fano_rate<F: Float>(g: &GeneratorMatrix) -> F {
    F::from(g.k() as f64 / g.n() as f64).expect("rate is representable")
}

/// Stack algorithm: repeatedly extends the node with the largest Fano
/// metric. Succeeds when the top node reaches full depth; fails when an
/// insertion would make the tree exceed `max_nodes` nodes (root included).
pub fn stack_decode<F: Float>(
    g: &GeneratorMatrix,
    frame: &SoftFrame<F>,
    max_nodes: u64,
) -> Result<DecodeOutcome<F>> {
    if max_nodes == 0 {
        return Err(Error::Config("the tree-size cap must be positive".into()));
    }
    let (l, t_total) = frame.blocks(g)?;
    let metrics = BranchMetrics::fano(&frame.r, g.n(), frame.sigma, fano_rate(g));
    let mut tree = Tree::new(Encoder::new(g)?, metrics, l, t_total);
    let (mut inserted, mut extended) = (1u64, 0u64);
    while let Some(idx) = tree.pop() {
        let node = tree.nodes[idx as usize];
        if node.depth as usize == t_total {
            let blocks = tree.path(idx);
            return Ok(DecodeOutcome {
                info_bits: Some(blocks_to_bits(&blocks[..l], g.k())),
                failed: false,
                inserted,
                extended,
                metric: node.metric,
            });
        }
        extended += 1;
        let children: Vec<Node<F>> = tree.successors(idx).collect();
        for child in children {
            if inserted == max_nodes {
                return Ok(DecodeOutcome::failure(inserted, extended));
            }
            inserted += 1;
            tree.insert(child);
        }
    }
    unreachable!("the zero-input tail always leads to full depth")
}
