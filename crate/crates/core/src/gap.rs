//! Partial logical gap scoring.
//!
//! A shot's *logical gap* is the weight difference between the best
//! corrections of the two observable classes — a confidence score for the
//! decoded class. When some detectors are unobservable ("hidden"), the gap
//! must marginalize over their possible values σ. With per-assignment class
//! optima (w0, w1), likelihood P(σ) = e^{−w0} + e^{−w1} and per-assignment
//! gap factor G(σ) = e^{−|w0−w1|}, the partial gap is
//!
//! ```text
//!     G_P = Σ_σ P(σ) G(σ) / Σ_σ P(σ),        score = −ln G_P ≥ 0.
//! ```
//!
//! Three estimators are provided:
//! - [`GapEngine::partial_gap_exact`] sums every hidden assignment. Hidden
//!   detectors in components that cannot flip the observable class
//!   contribute identical factors to numerator and denominator, so the sum
//!   only enumerates hidden detectors of class-flippable components — the
//!   value is exactly the full sum, not an approximation.
//! - [`GapEngine::partial_gap_split`] explores a bounded tree of single-bit
//!   perturbations of the inferred hidden assignment, guided by the critical
//!   string between the two class decodes.
//! - [`GapEngine::partial_gap_greedy`] runs two single-bit hill climbs from
//!   the inferred assignment, one maximizing likelihood and one maximizing
//!   likelihood times gap factor.
//!
//! A fourth scorer, [`GapEngine::full_gap`], consumes the true hidden values
//! and scores the complete syndrome — the hindsight baseline the partial
//! estimators are measured against.
//!
//! All scoring projects the defect set onto class-flippable components first:
//! defects of non-flippable components shift both class weights equally and
//! cancel in every score. Reported classes and weights refer to the projected
//! minimum-weight explanation.

use std::collections::HashMap;

use crate::decoder::Decoder;

/// Default ceiling on the total hidden-detector count accepted by
/// [`GapEngine::partial_gap_exact`].
pub const DEFAULT_HIDDEN_CAP: usize = 20;

/// Deterministic ceiling on split-search node evaluations; beyond it nodes
/// are still scored but no longer expanded.
const SPLIT_NODE_CAP: usize = 50_000;

/// Scoring failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum GapError {
    /// The model's total hidden-detector count exceeds the exact-enumeration
    /// cap.
    #[error("{count} hidden detectors exceed the exact-enumeration cap of {cap}")]
    TooManyHidden { count: usize, cap: usize },
    /// No hidden assignment gives the defects a finite-weight explanation.
    #[error("no finite-weight explanation of the defects exists")]
    NoExplanation,
}

/// One scored shot: the gap score plus the hard decoding output it
/// accompanies (class and weight of the minimum-weight explanation with the
/// hidden assignment inferred, over class-flippable components).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapScore {
    /// −ln Ĝ_P, clamped at zero; +∞ when one class is infeasible under every
    /// explored assignment.
    pub score: f64,
    /// Observable class of the minimum-weight explanation.
    pub class: bool,
    /// Weight of that explanation.
    pub weight: f64,
}

/// Streaming log-sum-exp accumulator.
struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    fn new() -> Self {
        LogSum { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.sum += (x - self.max).exp();
        }
    }

    /// ln Σ e^{x_i}, −∞ if nothing was added.
    fn value(&self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// ln(e^{−w0} + e^{−w1}), infinity-aware.
fn ln_p(w: [f64; 2]) -> f64 {
    let (lo, hi) = (w[0].min(w[1]), w[0].max(w[1]));
    if lo.is_infinite() {
        f64::NEG_INFINITY
    } else if hi.is_infinite() {
        -lo
    } else {
        -lo + (-(hi - lo)).exp().ln_1p()
    }
}

/// ln((e^{−w0} + e^{−w1}) · e^{−|w0−w1|}), infinity-aware.
fn ln_pg(w: [f64; 2]) -> f64 {
    let (lo, hi) = (w[0].min(w[1]), w[0].max(w[1]));
    if hi.is_infinite() {
        f64::NEG_INFINITY
    } else {
        -hi + (-(hi - lo)).exp().ln_1p()
    }
}

/// Partial-gap scoring engine over a [`Decoder`].
pub struct GapEngine {
    decoder: Decoder,
    /// Hidden detectors of class-flippable components, ascending — the
    /// enumerable/searchable assignment bits.
    flip_hidden: Vec<u32>,
    /// Per detector: does it live in a class-flippable component?
    keep: Vec<bool>,
    /// Position coordinate of each detector (shadow lookup key).
    position: Vec<i32>,
    /// `(position, round)` → flippable hidden detector, for the first and
    /// last hidden rounds of the flippable components.
    shadow_rounds: Vec<HashMap<i32, u32>>,
    /// Total hidden count, governing the exact-enumeration cap.
    hidden_total: usize,
    hidden_cap: usize,
    /// Components with no boundary edges and no hidden detectors: their
    /// defect count must be even, or no explanation exists at all.
    parity_bound: Vec<bool>,
}

impl GapEngine {
    pub fn new(decoder: Decoder) -> Self {
        Self::with_hidden_cap(decoder, DEFAULT_HIDDEN_CAP)
    }

    /// As [`GapEngine::new`] with a custom exact-enumeration cap.
    pub fn with_hidden_cap(decoder: Decoder, hidden_cap: usize) -> Self {
        let g = decoder.graph();
        let n = g.n_detectors();
        let keep: Vec<bool> =
            (0..n as u32).map(|d| g.component_flippable(g.component_of(d))).collect();
        let flip_hidden = g.flippable_hidden();
        let position: Vec<i32> = (0..n as u32).map(|d| g.coords(d).0).collect();

        // Shadow lookup: hidden detectors of flippable components at the
        // first and last hidden rounds, keyed by position.
        let rounds: Vec<i32> = flip_hidden.iter().map(|&d| g.coords(d).1).collect();
        let mut shadow_rounds = Vec::new();
        if let (Some(&rmin), Some(&rmax)) = (rounds.iter().min(), rounds.iter().max()) {
            for r in if rmin == rmax { vec![rmin] } else { vec![rmin, rmax] } {
                let map: HashMap<i32, u32> = flip_hidden
                    .iter()
                    .filter(|&&d| g.coords(d).1 == r)
                    .map(|&d| (g.coords(d).0, d))
                    .collect();
                shadow_rounds.push(map);
            }
        }
        let hidden_total = g.hidden().len();

        // A component never touched by the exits and holding no hidden
        // detector keeps its defect parity under every assignment: odd
        // parity there means probability zero across the board.
        let mut parity_bound = vec![true; g.n_components() as usize];
        for e in g.edges() {
            if g.is_terminal(e.a) != g.is_terminal(e.b) {
                let d = if g.is_terminal(e.a) { e.b } else { e.a };
                parity_bound[g.component_of(d) as usize] = false;
            }
        }
        for &h in g.hidden() {
            parity_bound[g.component_of(h) as usize] = false;
        }

        GapEngine {
            decoder,
            flip_hidden,
            keep,
            position,
            shadow_rounds,
            hidden_total,
            hidden_cap,
            parity_bound,
        }
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    /// The assignment bits the estimators explore: hidden detectors of
    /// class-flippable components, ascending.
    pub fn searchable_hidden(&self) -> &[u32] {
        &self.flip_hidden
    }

    /// Defects restricted to class-flippable components, order preserved.
    ///
    /// Dropped defects cancel exactly in the score — except when a
    /// parity-bound component holds an odd number of them, which makes the
    /// whole syndrome unexplainable.
    fn project(&self, defects: &[u32]) -> Result<Vec<u32>, GapError> {
        let g = self.decoder.graph();
        let mut odd: HashMap<u32, bool> = HashMap::new();
        let mut kept = Vec::with_capacity(defects.len());
        for &d in defects {
            if self.keep[d as usize] {
                kept.push(d);
            } else {
                let c = g.component_of(d);
                if self.parity_bound[c as usize] {
                    *odd.entry(c).or_insert(false) ^= true;
                }
            }
        }
        if odd.values().any(|&b| b) {
            return Err(GapError::NoExplanation);
        }
        Ok(kept)
    }

    /// Inferred hidden assignment (as a mask over `flip_hidden`) plus the
    /// class and weight of the resulting minimum-weight explanation.
    fn hard_output(&self, vis: &[u32]) -> Result<(u64, bool, f64), GapError> {
        let bits = self.decoder.infer_hidden(vis).ok_or(GapError::NoExplanation)?;
        let hidden = self.decoder.graph().hidden();
        let mut mask = 0u64;
        for (i, &h) in hidden.iter().enumerate() {
            if bits[i] {
                if let Ok(b) = self.flip_hidden.binary_search(&h) {
                    mask |= 1 << b;
                }
            }
        }
        let full = self.with_mask(vis, mask);
        let c = self.decoder.decode(&full).map_err(|_| GapError::NoExplanation)?;
        Ok((mask, c.class, c.weight))
    }

    /// Visible defects merged with the hidden bits of `mask`, sorted.
    fn with_mask(&self, vis: &[u32], mask: u64) -> Vec<u32> {
        let mut out = Vec::with_capacity(vis.len() + mask.count_ones() as usize);
        let mut vi = 0;
        for (b, &h) in self.flip_hidden.iter().enumerate() {
            if mask >> b & 1 == 0 {
                continue;
            }
            while vi < vis.len() && vis[vi] < h {
                out.push(vis[vi]);
                vi += 1;
            }
            out.push(h);
        }
        out.extend_from_slice(&vis[vi..]);
        out
    }

    /// Exact partial-gap score by enumeration of hidden assignments.
    ///
    /// Errors with [`GapError::TooManyHidden`] when the model's total hidden
    /// count exceeds the cap (the internal enumeration covers only hidden
    /// detectors that can affect the class, but the cap is a contract on the
    /// model size).
    pub fn partial_gap_exact(&self, visible: &[u32]) -> Result<GapScore, GapError> {
        if self.hidden_total > self.hidden_cap {
            return Err(GapError::TooManyHidden {
                count: self.hidden_total,
                cap: self.hidden_cap,
            });
        }
        let vis = self.project(visible)?;
        let (_, class, weight) = self.hard_output(&vis)?;
        let mut lse_p = LogSum::new();
        let mut lse_pg = LogSum::new();
        for mask in 0..1u64 << self.flip_hidden.len() {
            let w = self.decoder.class_weights(&self.with_mask(&vis, mask));
            lse_p.add(ln_p(w));
            lse_pg.add(ln_pg(w));
        }
        if lse_p.value() == f64::NEG_INFINITY {
            return Err(GapError::NoExplanation);
        }
        Ok(GapScore { score: (lse_p.value() - lse_pg.value()).max(0.0), class, weight })
    }

    /// Mechanisms used by exactly one of the two class-conditioned decodes
    /// of `defects` — the chain along which the classes disagree. `None`
    /// when either class is infeasible.
    pub fn find_critical_string(&self, defects: &[u32]) -> Option<Vec<u32>> {
        let c0 = self.decoder.decode_conditioned(defects, false).ok()?;
        let c1 = self.decoder.decode_conditioned(defects, true).ok()?;
        let mut counts: HashMap<u32, u32> = HashMap::new();
        for &e in c0.edges.iter().chain(&c1.edges) {
            *counts.entry(e).or_insert(0) += 1;
        }
        // The symmetric difference is an edge set, not necessarily a simple
        // chain: the two decodes may route distinct pairs through a shared
        // node, so degrees up to 4 occur. The shadow only needs the
        // positions this set touches.
        let mut string: Vec<u32> =
            counts.into_iter().filter(|&(_, c)| c % 2 == 1).map(|(e, _)| e).collect();
        string.sort_unstable();
        Some(string)
    }

    /// Shadow of a critical string: for each distinct detector position on
    /// the string, the flippable hidden detectors at that position in the
    /// first and last hidden rounds. Sorted, deduplicated.
    pub fn shadow(&self, string: &[u32]) -> Vec<u32> {
        let g = self.decoder.graph();
        let mut out = Vec::new();
        for &e in string {
            let edge = &g.edges()[e as usize];
            for node in [edge.a, edge.b] {
                if g.is_terminal(node) {
                    continue;
                }
                let q = self.position[node as usize];
                for map in &self.shadow_rounds {
                    if let Some(&h) = map.get(&q) {
                        out.push(h);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Minimum over the explored perturbation tree of max(w0, w1).
    ///
    /// The root is `defects` as given; a node expands (while depth remains)
    /// only if its value does not exceed its parent's, and children flip one
    /// hidden bit from the shadow of the node's critical string.
    pub fn split_string(&self, defects: &[u32], depth: u32) -> f64 {
        let mut base: Vec<u32> = Vec::new();
        let mut mask0 = 0u64;
        for &d in defects {
            match self.flip_hidden.binary_search(&d) {
                Ok(b) => mask0 |= 1 << b,
                Err(_) => base.push(d),
            }
        }
        let mut search = SplitSearch {
            engine: self,
            base,
            weights: HashMap::new(),
            shadows: HashMap::new(),
            visited: HashMap::new(),
            evals: 0,
            best: f64::INFINITY,
        };
        search.visit(mask0, f64::INFINITY, depth);
        search.best
    }

    /// Split estimate of the partial-gap score: the split-string value minus
    /// the minimum explanation weight, clamped at zero.
    pub fn partial_gap_split(&self, visible: &[u32], depth: u32) -> Result<GapScore, GapError> {
        let vis = self.project(visible)?;
        let (mask, class, weight) = self.hard_output(&vis)?;
        let split = self.split_string(&self.with_mask(&vis, mask), depth);
        Ok(GapScore { score: (split - weight).max(0.0), class, weight })
    }

    /// Greedy estimate of the partial-gap score from two single-bit hill
    /// climbs seeded at the inferred hidden assignment: one maximizing
    /// ln P, one maximizing ln(P·G); the score is their difference.
    pub fn partial_gap_greedy(&self, visible: &[u32]) -> Result<GapScore, GapError> {
        let vis = self.project(visible)?;
        let (mask0, class, weight) = self.hard_output(&vis)?;
        let mut weights: HashMap<u64, [f64; 2]> = HashMap::new();
        let mut eval = |mask: u64| -> [f64; 2] {
            *weights
                .entry(mask)
                .or_insert_with(|| self.decoder.class_weights(&self.with_mask(&vis, mask)))
        };
        let climb = |eval: &mut dyn FnMut(u64) -> [f64; 2], obj: fn([f64; 2]) -> f64| -> u64 {
            let mut cur = mask0;
            let mut cur_val = obj(eval(cur));
            loop {
                let mut improved = false;
                for b in 0..self.flip_hidden.len() {
                    let cand = cur ^ (1 << b);
                    let v = obj(eval(cand));
                    if v > cur_val {
                        cur = cand;
                        cur_val = v;
                        improved = true;
                    }
                }
                if !improved {
                    return cur;
                }
            }
        };
        let best_pg = climb(&mut eval, ln_pg);
        let best_p = climb(&mut eval, ln_p);
        let top_pg = ln_pg(eval(best_pg));
        // Considering the PG climb's endpoint for the P maximum keeps the
        // score nonnegative by construction (P ≥ P·G pointwise).
        let top_p = ln_p(eval(best_p)).max(ln_p(eval(best_pg)));
        if top_p == f64::NEG_INFINITY {
            return Err(GapError::NoExplanation);
        }
        Ok(GapScore { score: (top_p - top_pg).max(0.0), class, weight })
    }

    /// Hindsight baseline: the plain logical gap of the complete syndrome,
    /// with the true hidden values supplied (aligned with
    /// `decoder.graph().hidden()`).
    pub fn full_gap(&self, visible: &[u32], hidden_values: &[bool]) -> Result<GapScore, GapError> {
        let g = self.decoder.graph();
        debug_assert_eq!(hidden_values.len(), g.hidden().len());
        let mut full: Vec<u32> = self.project(visible)?;
        for (i, &h) in g.hidden().iter().enumerate() {
            if hidden_values[i] && self.keep[h as usize] {
                full.push(h);
            }
        }
        full.sort_unstable();
        let c = self.decoder.decode(&full).map_err(|_| GapError::NoExplanation)?;
        let [w0, w1] = self.decoder.class_weights(&full);
        let score = if w0.is_infinite() || w1.is_infinite() {
            f64::INFINITY
        } else {
            (w0 - w1).abs()
        };
        Ok(GapScore { score, class: c.class, weight: c.weight })
    }
}

/// State of one split-string search.
struct SplitSearch<'a> {
    engine: &'a GapEngine,
    /// Defects outside the searchable hidden set, sorted.
    base: Vec<u32>,
    weights: HashMap<u64, [f64; 2]>,
    shadows: HashMap<u64, Vec<u32>>,
    /// Per mask, the (threshold, depth) pairs already explored; a revisit
    /// dominated by one of them cannot add nodes.
    visited: HashMap<u64, Vec<(f64, u32)>>,
    evals: usize,
    best: f64,
}

impl SplitSearch<'_> {
    fn defects(&self, mask: u64) -> Vec<u32> {
        let mut out = self.engine.with_mask(&self.base, mask);
        out.sort_unstable();
        out
    }

    fn class_weights(&mut self, mask: u64) -> [f64; 2] {
        if let Some(&w) = self.weights.get(&mask) {
            return w;
        }
        self.evals += 1;
        let w = self.engine.decoder.class_weights(&self.defects(mask));
        self.weights.insert(mask, w);
        w
    }

    fn visit(&mut self, mask: u64, threshold: f64, depth: u32) {
        if let Some(prev) = self.visited.get(&mask) {
            if prev.iter().any(|&(t, d)| t >= threshold && d >= depth) {
                return;
            }
        }
        self.visited.entry(mask).or_default().push((threshold, depth));

        let w = self.class_weights(mask);
        let t = w[0].max(w[1]);
        self.best = self.best.min(t);
        if t > threshold || depth == 0 || self.evals >= SPLIT_NODE_CAP {
            return;
        }
        let shadow = if let Some(s) = self.shadows.get(&mask) {
            s.clone()
        } else {
            let s = self
                .engine
                .find_critical_string(&self.defects(mask))
                .map(|string| self.engine.shadow(&string))
                .unwrap_or_default();
            self.shadows.insert(mask, s.clone());
            s
        };
        for h in shadow {
            let b = self
                .engine
                .flip_hidden
                .binary_search(&h)
                .expect("shadow contains only searchable hidden detectors");
            self.visit(mask ^ (1 << b), t, depth - 1);
        }
    }
}
