//! Weighted matching graph over detectors, with two boundary terminals.
//!
//! Every error mechanism becomes exactly one edge, and the edge index
//! equals the mechanism index. Mechanisms on two detectors are interior
//! edges; single-detector mechanisms attach their detector to one of the
//! two terminals; a detector-free mechanism that flips the observable
//! joins the terminals directly; a detector-free mechanism with no
//! observable action is kept as an inert self-loop so indices stay
//! aligned, but it never enters the adjacency.
//!
//! The construction assigns each detector a parity potential such that
//! every edge's observable-flip bit equals the potential difference
//! across it, with the terminals pinned at potentials 0 and 1. Any chain
//! of edges then flips the observable iff the potentials of its two
//! endpoints differ — no per-path tracking is ever needed. Models that
//! admit no such potential (some cycle has odd total flip parity) are
//! rejected: their corrections' observable action is path-dependent in a
//! way plain minimum-weight matching cannot book-keep.
//!
//! Within one connected component the potential is only defined up to a
//! global flip; the orientation is fixed by attaching the component's
//! lowest-indexed boundary edge to terminal 0. A component whose boundary
//! edges all reach the same terminal (or that has no boundary at all) is
//! *rigid*: the observable action of any correction of a given defect set
//! inside it is forced, so such components can never flip the correction
//! class. Components reaching both terminals are *flippable*.

use std::collections::VecDeque;

use thiserror::Error;

use crate::circuits::dem::DetectorErrorModel;

/// Mechanism probabilities are clamped to at least this value before
/// taking the log-likelihood weight, keeping weights finite.
pub const MIN_EDGE_PROBABILITY: f64 = 1e-10;

/// Log-likelihood weight of an error with probability `p`:
/// `ln((1 - p) / p)`, with `p` clamped to [`MIN_EDGE_PROBABILITY`].
/// Zero at `p = 0.5`, strictly positive below.
pub fn edge_weight(p: f64) -> f64 {
    let p = p.max(MIN_EDGE_PROBABILITY);
    ((1.0 - p) / p).ln()
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("mechanism {mechanism} acts on {count} detectors; matching needs at most two")]
    NotGraphlike { mechanism: usize, count: usize },
    #[error("mechanism {mechanism} has probability {p}, above one half")]
    ProbabilityAboveHalf { mechanism: usize, p: f64 },
    #[error("detectors {u} and {v} close a cycle with odd observable parity")]
    OddFrameCycle { u: u32, v: u32 },
}

/// One edge of the matching graph. `a` and `b` are node indices: detectors
/// first, then terminal 0 and terminal 1. For a single-detector mechanism
/// `a` is the detector and `b` a terminal; an inert placeholder has
/// `a == b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphEdge {
    pub a: u32,
    pub b: u32,
    pub weight: f64,
    /// Whether traversing this edge flips the logical observable.
    pub frame: bool,
    pub p: f64,
}

impl GraphEdge {
    pub fn other(&self, node: u32) -> u32 {
        if node == self.a {
            self.b
        } else {
            self.a
        }
    }

    /// Detector-free, observable-free placeholder; never part of any path.
    pub fn is_inert(&self) -> bool {
        self.a == self.b
    }
}

#[derive(Debug, Clone)]
pub struct MatchingGraph {
    n_detectors: usize,
    edges: Vec<GraphEdge>,
    /// Edge indices incident to each node (detectors, then both terminals).
    adj: Vec<Vec<u32>>,
    phi: Vec<bool>,
    component: Vec<u32>,
    n_components: u32,
    /// Per component: bit 0 set if some boundary edge reaches terminal 0,
    /// bit 1 if some reaches terminal 1.
    comp_sides: Vec<u8>,
    hidden: Vec<u32>,
    coords: Vec<(i32, i32)>,
}

impl MatchingGraph {
    pub fn new(dem: &DetectorErrorModel) -> Result<Self, GraphError> {
        let n = dem.n_detectors;
        for (i, m) in dem.mechanisms.iter().enumerate() {
            if m.detectors.len() > 2 {
                return Err(GraphError::NotGraphlike {
                    mechanism: i,
                    count: m.detectors.len(),
                });
            }
            if m.p > 0.5 {
                return Err(GraphError::ProbabilityAboveHalf {
                    mechanism: i,
                    p: m.p,
                });
            }
        }

        // Assign potentials by search over interior edges, checking every
        // non-tree edge for parity consistency.
        let mut interior: Vec<Vec<(u32, bool)>> = vec![Vec::new(); n];
        for m in &dem.mechanisms {
            if let [u, v] = m.detectors[..] {
                interior[u as usize].push((v, m.flips_observable));
                interior[v as usize].push((u, m.flips_observable));
            }
        }
        let mut phi = vec![false; n];
        let mut component = vec![u32::MAX; n];
        let mut n_components = 0u32;
        for root in 0..n {
            if component[root] != u32::MAX {
                continue;
            }
            let c = n_components;
            n_components += 1;
            component[root] = c;
            let mut queue = VecDeque::from([root as u32]);
            while let Some(u) = queue.pop_front() {
                for &(v, f) in &interior[u as usize] {
                    let want = phi[u as usize] ^ f;
                    if component[v as usize] == u32::MAX {
                        component[v as usize] = c;
                        phi[v as usize] = want;
                        queue.push_back(v);
                    } else if phi[v as usize] != want {
                        return Err(GraphError::OddFrameCycle { u, v });
                    }
                }
            }
        }

        // Orient each component so its lowest-indexed boundary edge
        // attaches to terminal 0.
        let mut flip_comp = vec![None::<bool>; n_components as usize];
        for m in &dem.mechanisms {
            if let [v] = m.detectors[..] {
                let c = component[v as usize] as usize;
                if flip_comp[c].is_none() {
                    flip_comp[c] = Some(phi[v as usize] ^ m.flips_observable);
                }
            }
        }
        for d in 0..n {
            if flip_comp[component[d] as usize] == Some(true) {
                phi[d] = !phi[d];
            }
        }

        let term = [n as u32, n as u32 + 1];
        let mut comp_sides = vec![0u8; n_components as usize];
        let mut edges = Vec::with_capacity(dem.mechanisms.len());
        for m in &dem.mechanisms {
            let (a, b) = match m.detectors[..] {
                [u, v] => (u, v),
                [v] => {
                    let side = phi[v as usize] ^ m.flips_observable;
                    comp_sides[component[v as usize] as usize] |= 1 << side as u8;
                    (v, term[side as usize])
                }
                [] if m.flips_observable => (term[0], term[1]),
                [] => (term[0], term[0]),
                _ => unreachable!("arity checked above"),
            };
            edges.push(GraphEdge {
                a,
                b,
                weight: edge_weight(m.p),
                frame: m.flips_observable,
                p: m.p,
            });
        }

        let mut adj = vec![Vec::new(); n + 2];
        for (i, e) in edges.iter().enumerate() {
            if e.is_inert() {
                continue;
            }
            adj[e.a as usize].push(i as u32);
            adj[e.b as usize].push(i as u32);
        }

        Ok(Self {
            n_detectors: n,
            edges,
            adj,
            phi,
            component,
            n_components,
            comp_sides,
            hidden: dem.hidden_ids(),
            coords: dem.detector_coords.clone(),
        })
    }

    pub fn n_detectors(&self) -> usize {
        self.n_detectors
    }

    /// Total node count: every detector plus the two terminals.
    pub fn n_nodes(&self) -> usize {
        self.n_detectors + 2
    }

    /// Node index of a boundary terminal. Terminal 0 has potential 0,
    /// terminal 1 potential 1; a chain joining them flips the observable.
    pub fn terminal(&self, side: bool) -> u32 {
        self.n_detectors as u32 + side as u32
    }

    pub fn is_terminal(&self, node: u32) -> bool {
        node as usize >= self.n_detectors
    }

    /// Parity potential of a detector.
    pub fn phi(&self, detector: u32) -> bool {
        self.phi[detector as usize]
    }

    /// Observable class forced by endpoint bookkeeping: the XOR of the
    /// potentials of the given defects. Any correction of these defects
    /// has class `base_class ^ (number of odd-degree visits to terminal 1)`.
    pub fn base_class(&self, defects: &[u32]) -> bool {
        defects.iter().fold(false, |acc, &d| acc ^ self.phi[d as usize])
    }

    pub fn component_of(&self, detector: u32) -> u32 {
        self.component[detector as usize]
    }

    pub fn n_components(&self) -> u32 {
        self.n_components
    }

    /// Whether corrections inside this component can reach both terminals,
    /// i.e. whether rerouting its defects can flip the observable class.
    pub fn component_flippable(&self, component: u32) -> bool {
        self.comp_sides[component as usize] == 0b11
    }

    /// Hidden detectors, ascending.
    pub fn hidden(&self) -> &[u32] {
        &self.hidden
    }

    /// Layout coordinate (position, round) of a detector.
    pub fn coords(&self, detector: u32) -> (i32, i32) {
        self.coords[detector as usize]
    }

    /// Hidden detectors living in flippable components: the only hidden
    /// detectors whose unknown values can affect the correction class.
    pub fn flippable_hidden(&self) -> Vec<u32> {
        self.hidden
            .iter()
            .copied()
            .filter(|&d| self.component_flippable(self.component[d as usize]))
            .collect()
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    /// Edge indices incident to a node (terminals included).
    pub fn adjacency(&self, node: u32) -> &[u32] {
        &self.adj[node as usize]
    }
}
