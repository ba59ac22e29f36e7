//! Minimum-weight perfect-matching decoding over the matching graph, with
//! class-conditioned variants and hidden-detector inference.
//!
//! The decoder precomputes all-pairs shortest paths over the matching graph
//! (terminals transitable, so a chain may pass through a boundary and come
//! back out — the weight and class bookkeeping stay exact either way) plus a
//! multi-source table of distances to the nearest *absorbing* node, where the
//! absorbers are both terminals and every hidden detector. Decoding a defect
//! set reduces to a minimum-weight perfect matching on a small dense instance:
//! one vertex per defect plus one virtual copy per defect, pair edges carrying
//! shortest-path distances, copy edges carrying exit distances, and copy-copy
//! edges free so exits are optional.
//!
//! Class accounting rests on the parity potential of [`MatchingGraph`]: the
//! observable class of any correction equals the XOR of the base class of its
//! defect set with the parity of chain endpoints landing on terminal 1. The
//! class-conditioned decoder exploits this by restricting exits to terminal 0
//! and, when the requested class differs from the base class, adding
//! terminal 1 itself as one extra defect that must be matched — forcing
//! exactly one crossing chain.
//!
//! Matching runs on integer weights (fixed-point, 2^20 scale) so optimality
//! is exact arithmetic; reported weights are re-accumulated in f64 from the
//! chosen chains.

pub mod blossom;

pub use blossom::{max_weight_matching, min_weight_perfect_matching};

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::graph::MatchingGraph;

/// Fixed-point scale for matching weights: ~1e-6 resolution on edge weights
/// that are O(10), far below any physically distinct alternative.
const WEIGHT_SCALE: f64 = (1u64 << 20) as f64;

/// A decoding failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    /// No correction exists for this defect set (a component without a
    /// boundary holds an odd number of defects).
    #[error("no correction exists for this defect set")]
    Unmatchable,
    /// No correction with the requested observable class exists.
    #[error("no correction with the requested observable class exists")]
    InfeasibleClass,
}

/// A correction: a multiset of mechanism indices whose detector effects cancel
/// the defect set, together with its total weight and observable class.
#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    /// Sum of edge weights along every chain, in f64.
    pub weight: f64,
    /// XOR of the observable-flip bits of `edges`.
    pub class: bool,
    /// Mechanism indices with multiplicity, sorted ascending. Multiplicity
    /// above one only ever involves zero-weight edges.
    pub edges: Vec<u32>,
}

/// Min-heap entry for deterministic Dijkstra: pops are ordered by
/// (distance, source rank, node), so equal-distance ties always resolve the
/// same way and prefer lower-ranked sources.
#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    rank: u32,
    node: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed so BinaryHeap (a max-heap) pops the smallest entry.
        other
            .dist
            .partial_cmp(&self.dist)
            .expect("edge weights are finite")
            .then(other.rank.cmp(&self.rank))
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Matching-based decoder over a [`MatchingGraph`].
pub struct Decoder {
    graph: MatchingGraph,
    /// Node count including both terminals; row stride of `dist` and `pred`.
    stride: usize,
    /// All-pairs shortest-path distances, row-major by source node.
    dist: Vec<f64>,
    /// `pred[src * stride + v]` is the edge by which `v` was reached from
    /// `src`, or `u32::MAX` at `src` itself and unreachable nodes.
    pred: Vec<u32>,
    /// Distance from each node to its nearest absorbing node (terminal or
    /// hidden detector).
    absorb_dist: Vec<f64>,
    /// The absorbing node ultimately reached, `u32::MAX` if none reachable.
    absorb_sink: Vec<u32>,
}

impl Decoder {
    /// Build the decoder, precomputing shortest-path and absorption tables.
    pub fn new(graph: MatchingGraph) -> Self {
        let stride = graph.n_nodes();
        let mut dist = vec![f64::INFINITY; stride * stride];
        let mut pred = vec![u32::MAX; stride * stride];
        let mut settled = vec![false; stride];
        let mut heap = BinaryHeap::new();
        for src in 0..stride {
            let (drow, prow) = (&mut dist[src * stride..][..stride], &mut pred[src * stride..][..stride]);
            settled.fill(false);
            drow[src] = 0.0;
            heap.push(HeapEntry { dist: 0.0, rank: 0, node: src as u32 });
            Self::run_dijkstra(&graph, &mut heap, &mut settled, drow, prow, None);
        }

        // Multi-source absorption: terminal 0 (rank 0), terminal 1 (rank 1),
        // then hidden detectors in id order. Rank only breaks exact ties.
        let mut absorb_dist = vec![f64::INFINITY; stride];
        // Predecessors of the absorption run are never consulted; scratch only.
        let mut absorb_pred = vec![u32::MAX; stride];
        let mut absorb_sink = vec![u32::MAX; stride];
        let mut sources = vec![graph.terminal(false), graph.terminal(true)];
        sources.extend_from_slice(graph.hidden());
        settled.fill(false);
        for (rank, &s) in sources.iter().enumerate() {
            absorb_dist[s as usize] = 0.0;
            absorb_sink[s as usize] = s;
            heap.push(HeapEntry { dist: 0.0, rank: rank as u32, node: s });
        }
        Self::run_dijkstra(
            &graph,
            &mut heap,
            &mut settled,
            &mut absorb_dist,
            &mut absorb_pred,
            Some(&mut absorb_sink),
        );

        Decoder { graph, stride, dist, pred, absorb_dist, absorb_sink }
    }

    /// Shared Dijkstra loop. `sink` propagates the originating source of each
    /// relaxed node; sources must be pre-seeded with distance 0 and their own
    /// sink before being pushed.
    fn run_dijkstra(
        graph: &MatchingGraph,
        heap: &mut BinaryHeap<HeapEntry>,
        settled: &mut [bool],
        dist: &mut [f64],
        pred: &mut [u32],
        mut sink: Option<&mut Vec<u32>>,
    ) {
        while let Some(HeapEntry { dist: d, rank, node }) = heap.pop() {
            let u = node as usize;
            if settled[u] {
                continue;
            }
            settled[u] = true;
            for &e in graph.adjacency(node) {
                let edge = &graph.edges()[e as usize];
                let v = edge.other(node) as usize;
                let nd = d + edge.weight;
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = e;
                    if let Some(sink) = sink.as_deref_mut() {
                        sink[v] = sink[u];
                    }
                    heap.push(HeapEntry { dist: nd, rank, node: v as u32 });
                }
            }
        }
    }

    /// The underlying matching graph.
    pub fn graph(&self) -> &MatchingGraph {
        &self.graph
    }

    /// Shortest-path distance between two graph nodes (terminals included).
    pub fn distance(&self, a: u32, b: u32) -> f64 {
        self.dist[a as usize * self.stride + b as usize]
    }

    /// Edges of the shortest path from `src` to `dst`, appended to `out`.
    fn push_path(&self, src: u32, dst: u32, out: &mut Vec<u32>) {
        let row = src as usize * self.stride;
        let mut cur = dst;
        while cur != src {
            let e = self.pred[row + cur as usize];
            debug_assert_ne!(e, u32::MAX, "path requested between disconnected nodes");
            out.push(e);
            cur = self.graph.edges()[e as usize].other(cur);
        }
    }

    /// Decode a defect set to the overall minimum-weight correction, exits
    /// free to either terminal (ties prefer terminal 0).
    pub fn decode(&self, defects: &[u32]) -> Result<Correction, DecodeError> {
        self.check_defects(defects);
        let t0 = self.graph.terminal(false);
        let t1 = self.graph.terminal(true);
        let exits: Vec<u32> = defects
            .iter()
            .map(|&d| if self.distance(d, t0) <= self.distance(d, t1) { t0 } else { t1 })
            .collect();
        let exit_w: Vec<f64> = defects.iter().zip(&exits).map(|(&d, &t)| self.distance(d, t)).collect();
        let mates = self.match_instance(defects, &exit_w).ok_or(DecodeError::Unmatchable)?;
        Ok(self.collect(defects, &exits, &exit_w, &mates))
    }

    /// Decode a defect set to the minimum-weight correction whose observable
    /// class equals `class`.
    pub fn decode_conditioned(&self, defects: &[u32], class: bool) -> Result<Correction, DecodeError> {
        self.check_defects(defects);
        let t0 = self.graph.terminal(false);
        let t1 = self.graph.terminal(true);
        let crossing = class != self.graph.base_class(defects);
        let mut nodes = defects.to_vec();
        if crossing {
            nodes.push(t1);
        }
        let exit_w: Vec<f64> = nodes.iter().map(|&v| self.distance(v, t0)).collect();
        let exits = vec![t0; nodes.len()];
        let mates = self.match_instance(&nodes, &exit_w).ok_or(DecodeError::InfeasibleClass)?;
        let c = self.collect(&nodes, &exits, &exit_w, &mates);
        debug_assert_eq!(c.class, class);
        Ok(c)
    }

    /// Minimum correction weight for each observable class,
    /// `f64::INFINITY` where no correction of that class exists.
    pub fn class_weights(&self, defects: &[u32]) -> [f64; 2] {
        self.check_defects(defects);
        let t0 = self.graph.terminal(false);
        let t1 = self.graph.terminal(true);
        let base = self.graph.base_class(defects);
        let mut out = [f64::INFINITY; 2];
        let mut nodes = defects.to_vec();
        for crossing in [false, true] {
            if crossing {
                nodes.push(t1);
            }
            let exit_w: Vec<f64> = nodes.iter().map(|&v| self.distance(v, t0)).collect();
            if let Some(mates) = self.match_instance(&nodes, &exit_w) {
                out[(base ^ crossing) as usize] = self.matched_weight(&nodes, &exit_w, &mates);
            }
        }
        out
    }

    /// Absolute weight difference between the two class-conditioned optima.
    /// Infinite when either class is infeasible.
    pub fn logical_gap(&self, defects: &[u32]) -> f64 {
        let [w0, w1] = self.class_weights(defects);
        if w0.is_infinite() || w1.is_infinite() {
            f64::INFINITY
        } else {
            (w0 - w1).abs()
        }
    }

    /// Most likely hidden-detector assignment given the visible defects:
    /// chains may terminate on hidden detectors (absorbing them as inferred
    /// defects) as well as on terminals. Returns one bit per entry of
    /// [`MatchingGraph::hidden`], or `None` if no finite-weight explanation
    /// exists.
    pub fn infer_hidden(&self, visible_defects: &[u32]) -> Option<Vec<bool>> {
        self.check_defects(visible_defects);
        debug_assert!(
            visible_defects.iter().all(|&d| !self.graph.hidden().contains(&d)),
            "hidden detectors cannot appear in a visible defect set"
        );
        let exit_w: Vec<f64> =
            visible_defects.iter().map(|&d| self.absorb_dist[d as usize]).collect();
        let mates = self.match_instance(visible_defects, &exit_w)?;
        let hidden = self.graph.hidden();
        let mut bits = vec![false; hidden.len()];
        let k = visible_defects.len();
        for (i, &d) in visible_defects.iter().enumerate() {
            if mates[i] == (k + i) as u32 {
                let sink = self.absorb_sink[d as usize];
                if let Ok(h) = hidden.binary_search(&sink) {
                    bits[h] ^= true;
                }
            }
        }
        Some(bits)
    }

    fn check_defects(&self, defects: &[u32]) {
        debug_assert!(
            defects.windows(2).all(|w| w[0] < w[1]),
            "defects must be sorted and distinct"
        );
        debug_assert!(
            defects.iter().all(|&d| d < self.graph.n_detectors() as u32),
            "defect id out of range"
        );
    }

    /// Build and solve the matching instance: vertices `0..k` are the given
    /// graph nodes, `k..2k` their virtual copies. Returns mates, or `None`
    /// if no perfect matching exists.
    fn match_instance(&self, nodes: &[u32], exit_w: &[f64]) -> Option<Vec<u32>> {
        let k = nodes.len();
        if k == 0 {
            return Some(Vec::new());
        }
        let quantize = |w: f64| (w * WEIGHT_SCALE).round() as i64;
        let mut edges = Vec::with_capacity(k * k + k);
        for i in 0..k {
            for j in i + 1..k {
                let w = self.distance(nodes[i], nodes[j]);
                if w.is_finite() {
                    edges.push((i as u32, j as u32, quantize(w)));
                }
            }
        }
        for (i, &w) in exit_w.iter().enumerate() {
            if w.is_finite() {
                edges.push((i as u32, (k + i) as u32, quantize(w)));
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                edges.push(((k + i) as u32, (k + j) as u32, 0));
            }
        }
        min_weight_perfect_matching(2 * k, &edges)
    }

    /// Total f64 weight of the matched connections, without reconstructing
    /// paths. `nodes[i]` matched to its copy pays `exit_w[i]`; matched pairs
    /// pay the pairwise distance; copy-copy pairs are free.
    fn matched_weight(&self, nodes: &[u32], exit_w: &[f64], mates: &[u32]) -> f64 {
        let k = nodes.len();
        let mut total = 0.0;
        for i in 0..k {
            let m = mates[i] as usize;
            if m == k + i {
                total += exit_w[i];
            } else if m > i && m < k {
                total += self.distance(nodes[i], nodes[m]);
            }
        }
        total
    }

    /// Reconstruct the full correction from a solved instance.
    fn collect(&self, nodes: &[u32], exits: &[u32], exit_w: &[f64], mates: &[u32]) -> Correction {
        let k = nodes.len();
        let mut edges = Vec::new();
        for i in 0..k {
            let m = mates[i] as usize;
            if m == k + i {
                self.push_path(nodes[i], exits[i], &mut edges);
            } else if m > i && m < k {
                self.push_path(nodes[i], nodes[m], &mut edges);
            }
        }
        edges.sort_unstable();
        let weight = self.matched_weight(nodes, exit_w, mates);
        debug_assert!({
            let walked: f64 = edges.iter().map(|&e| self.graph.edges()[e as usize].weight).sum();
            (walked - weight).abs() <= 1e-9 * (1.0 + weight)
        });
        let class = edges
            .iter()
            .fold(false, |c, &e| c ^ self.graph.edges()[e as usize].frame);
        Correction { weight, class, edges }
    }
}
