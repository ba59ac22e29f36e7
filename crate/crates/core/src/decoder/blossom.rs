//! Maximum-weight general matching (blossom algorithm), O(n^3).
//!
//! Classic primal-dual implementation over integer weights: vertex and
//! blossom dual variables stay exact integers throughout (edge weights are
//! doubled internally), so there are no floating-point comparisons anywhere
//! in the optimality logic. Callers quantize real weights before calling.
//!
//! `max_weight_matching` maximizes total weight; with `max_cardinality` it
//! maximizes cardinality first and weight among maximum matchings, which is
//! what reductions to minimum-weight *perfect* matching need (negate the
//! weights, demand maximum cardinality, check every vertex got matched).

/// Compute a maximum-weight matching on `n_vertices` vertices.
///
/// `edges` lists undirected edges `(u, v, weight)` with `u != v`; parallel
/// edges are allowed. Returns `mate` with `mate[v]` the partner of `v` or
/// `-1` if unmatched.
pub fn max_weight_matching(
    n_vertices: usize,
    edges: &[(u32, u32, i64)],
    max_cardinality: bool,
) -> Vec<i64> {
    if edges.is_empty() || n_vertices == 0 {
        return vec![-1; n_vertices];
    }
    let mut m = Matcher::new(n_vertices, edges, max_cardinality);
    m.solve();
    m.into_mates()
}

const LABEL_FREE: u8 = 0;
const LABEL_S: u8 = 1;
const LABEL_T: u8 = 2;

struct Matcher<'a> {
    nvertex: usize,
    edges: &'a [(u32, u32, i64)],
    max_cardinality: bool,
    /// endpoint[p]: vertex at endpoint index p (edge p/2, side p%2).
    endpoint: Vec<u32>,
    /// neighbend[v]: remote endpoint indices of edges incident to v.
    neighbend: Vec<Vec<u32>>,
    /// mate[v]: remote endpoint index of the matched edge, or -1.
    mate: Vec<i64>,
    /// Label per vertex (0..n) and per blossom (n..2n): free / S / T.
    /// Bit 2 is used transiently while scanning for a blossom base.
    label: Vec<u8>,
    /// labelend[b]: endpoint index through which the label was assigned.
    labelend: Vec<i64>,
    /// inblossom[v]: top-level blossom containing vertex v.
    inblossom: Vec<u32>,
    blossomparent: Vec<i64>,
    blossomchilds: Vec<Option<Vec<u32>>>,
    blossombase: Vec<i64>,
    blossomendps: Vec<Option<Vec<u32>>>,
    /// bestedge[b]: least-slack edge candidate for delta steps, or -1.
    bestedge: Vec<i64>,
    blossombestedges: Vec<Option<Vec<u32>>>,
    unusedblossoms: Vec<u32>,
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<u32>,
}

impl<'a> Matcher<'a> {
    fn new(nvertex: usize, edges: &'a [(u32, u32, i64)], max_cardinality: bool) -> Self {
        let nedge = edges.len();
        let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let mut endpoint = Vec::with_capacity(2 * nedge);
        let mut neighbend = vec![Vec::new(); nvertex];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            debug_assert!(i != j, "self-loops are not matchable");
            debug_assert!((i as usize) < nvertex && (j as usize) < nvertex);
            endpoint.push(i);
            endpoint.push(j);
            neighbend[i as usize].push(2 * k as u32 + 1);
            neighbend[j as usize].push(2 * k as u32);
        }
        Matcher {
            nvertex,
            edges,
            max_cardinality,
            endpoint,
            neighbend,
            mate: vec![-1; nvertex],
            label: vec![LABEL_FREE; 2 * nvertex],
            labelend: vec![-1; 2 * nvertex],
            inblossom: (0..nvertex as u32).collect(),
            blossomparent: vec![-1; 2 * nvertex],
            blossomchilds: vec![None; 2 * nvertex],
            blossombase: (0..nvertex as i64)
                .chain(std::iter::repeat(-1).take(nvertex))
                .collect(),
            blossomendps: vec![None; 2 * nvertex],
            bestedge: vec![-1; 2 * nvertex],
            blossombestedges: vec![None; 2 * nvertex],
            unusedblossoms: (nvertex as u32..2 * nvertex as u32).collect(),
            dualvar: std::iter::repeat(maxweight)
                .take(nvertex)
                .chain(std::iter::repeat(0).take(nvertex))
                .collect(),
            allowedge: vec![false; nedge],
            queue: Vec::new(),
        }
    }

    fn slack(&self, k: usize) -> i64 {
        let (i, j, wt) = self.edges[k];
        self.dualvar[i as usize] + self.dualvar[j as usize] - 2 * wt
    }

    fn leaves_into(&self, b: usize, out: &mut Vec<u32>) {
        if b < self.nvertex {
            out.push(b as u32);
            return;
        }
        for &c in self.blossomchilds[b].as_ref().unwrap() {
            self.leaves_into(c as usize, out);
        }
    }

    fn leaves(&self, b: usize) -> Vec<u32> {
        let mut out = Vec::new();
        self.leaves_into(b, &mut out);
        out
    }

    /// Label vertex/blossom `w` with S (t=1, entered via endpoint p) or
    /// T (t=2); a T label immediately propagates S to the mate of its base.
    fn assign_label(&mut self, w: u32, t: u8, p: i64) {
        let b = self.inblossom[w as usize] as usize;
        debug_assert!(self.label[w as usize] == LABEL_FREE && self.label[b] == LABEL_FREE);
        self.label[w as usize] = t;
        self.label[b] = t;
        self.labelend[w as usize] = p;
        self.labelend[b] = p;
        self.bestedge[w as usize] = -1;
        self.bestedge[b] = -1;
        if t == LABEL_S {
            let lv = self.leaves(b);
            self.queue.extend(lv);
        } else if t == LABEL_T {
            let base = self.blossombase[b];
            debug_assert!(base >= 0);
            let mb = self.mate[base as usize];
            debug_assert!(mb >= 0, "T-labeled blossom base must be matched");
            self.assign_label(self.endpoint[mb as usize], LABEL_S, mb ^ 1);
        }
    }

    /// Trace back from both ends of an S-S edge to find the common ancestor
    /// base vertex (a new blossom) or -1 (an augmenting path).
    fn scan_blossom(&mut self, v: u32, w: u32) -> i64 {
        let mut path: Vec<usize> = Vec::new();
        let mut base: i64 = -1;
        let mut v: i64 = v as i64;
        let mut w: i64 = w as i64;
        while v != -1 || w != -1 {
            let mut b = self.inblossom[v as usize] as usize;
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], LABEL_S);
            path.push(b);
            self.label[b] = 5;
            debug_assert_eq!(self.labelend[b], self.mate[self.blossombase[b] as usize]);
            if self.labelend[b] == -1 {
                v = -1;
            } else {
                v = self.endpoint[self.labelend[b] as usize] as i64;
                b = self.inblossom[v as usize] as usize;
                debug_assert_eq!(self.label[b], LABEL_T);
                debug_assert!(self.labelend[b] >= 0);
                v = self.endpoint[self.labelend[b] as usize] as i64;
            }
            if w != -1 {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = LABEL_S;
        }
        base
    }

    /// Contract the circuit through S-S edge k with common base `base`
    /// into a new blossom.
    fn add_blossom(&mut self, base: i64, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base as usize] as usize;
        let mut bv = self.inblossom[v as usize] as usize;
        let mut bw = self.inblossom[w as usize] as usize;
        let b = self.unusedblossoms.pop().expect("blossom pool exhausted") as usize;
        self.blossombase[b] = base;
        self.blossomparent[b] = -1;
        self.blossomparent[bb] = b as i64;
        let mut path: Vec<u32> = Vec::new();
        let mut endps: Vec<u32> = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b as i64;
            path.push(bv as u32);
            endps.push(self.labelend[bv] as u32);
            debug_assert!(
                self.label[bv] == LABEL_T
                    || (self.label[bv] == LABEL_S
                        && self.labelend[bv] == self.mate[self.blossombase[bv] as usize])
            );
            debug_assert!(self.labelend[bv] >= 0);
            v = self.endpoint[self.labelend[bv] as usize];
            bv = self.inblossom[v as usize] as usize;
        }
        path.push(bb as u32);
        path.reverse();
        endps.reverse();
        endps.push(2 * k as u32);
        while bw != bb {
            self.blossomparent[bw] = b as i64;
            path.push(bw as u32);
            endps.push(self.labelend[bw] as u32 ^ 1);
            debug_assert!(
                self.label[bw] == LABEL_T
                    || (self.label[bw] == LABEL_S
                        && self.labelend[bw] == self.mate[self.blossombase[bw] as usize])
            );
            debug_assert!(self.labelend[bw] >= 0);
            w = self.endpoint[self.labelend[bw] as usize];
            bw = self.inblossom[w as usize] as usize;
        }
        debug_assert_eq!(self.label[bb], LABEL_S);
        self.label[b] = LABEL_S;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        self.blossomchilds[b] = Some(path);
        self.blossomendps[b] = Some(endps);
        let lv = self.leaves(b);
        for &v in &lv {
            if self.label[self.inblossom[v as usize] as usize] == LABEL_T {
                self.queue.push(v);
            }
            self.inblossom[v as usize] = b as u32;
        }
        // Recompute least-slack edges from the new blossom to each
        // neighbouring S-blossom.
        let mut bestedgeto: Vec<i64> = vec![-1; 2 * self.nvertex];
        let path = self.blossomchilds[b].clone().unwrap();
        for &bv in &path {
            let bv = bv as usize;
            let nblists: Vec<Vec<u32>> = match self.blossombestedges[bv].take() {
                Some(bel) => vec![bel],
                None => self
                    .leaves(bv)
                    .iter()
                    .map(|&v| {
                        self.neighbend[v as usize]
                            .iter()
                            .map(|&p| p / 2)
                            .collect()
                    })
                    .collect(),
            };
            for nblist in nblists {
                for k in nblist {
                    let k = k as usize;
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j as usize] as usize == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let bj = self.inblossom[j as usize] as usize;
                    if bj != b
                        && self.label[bj] == LABEL_S
                        && (bestedgeto[bj] == -1 || self.slack(k) < self.slack(bestedgeto[bj] as usize))
                    {
                        bestedgeto[bj] = k as i64;
                    }
                }
            }
            self.bestedge[bv] = -1;
        }
        let kept: Vec<u32> = bestedgeto
            .iter()
            .filter(|&&k| k != -1)
            .map(|&k| k as u32)
            .collect();
        self.bestedge[b] = -1;
        for &k in &kept {
            if self.bestedge[b] == -1 || self.slack(k as usize) < self.slack(self.bestedge[b] as usize)
            {
                self.bestedge[b] = k as i64;
            }
        }
        self.blossombestedges[b] = Some(kept);
    }

    /// Undo a blossom: promote its children to top level. During a stage
    /// (endstage=false) a T-blossom's children are relabeled to preserve
    /// the alternating forest.
    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone().unwrap();
        for &s in &childs {
            let s = s as usize;
            self.blossomparent[s] = -1;
            if s < self.nvertex {
                self.inblossom[s] = s as u32;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.leaves(s) {
                    self.inblossom[v as usize] = s as u32;
                }
            }
        }
        if !endstage && self.label[b] == LABEL_T {
            debug_assert!(self.labelend[b] >= 0);
            let entrychild =
                self.inblossom[self.endpoint[(self.labelend[b] ^ 1) as usize] as usize] as usize;
            let childs = self.blossomchilds[b].clone().unwrap();
            let endps = self.blossomendps[b].clone().unwrap();
            let nchild = childs.len() as i64;
            let mut j = childs
                .iter()
                .position(|&c| c as usize == entrychild)
                .unwrap() as i64;
            let (jstep, endptrick): (i64, i64) = if j & 1 != 0 {
                j -= nchild;
                (1, 0)
            } else {
                (-1, 1)
            };
            let at = |j: i64| -> usize { childs[j.rem_euclid(nchild) as usize] as usize };
            let ep = |j: i64| -> i64 { endps[j.rem_euclid(nchild) as usize] as i64 };
            let mut p = self.labelend[b];
            while j != 0 {
                self.label[self.endpoint[(p ^ 1) as usize] as usize] = LABEL_FREE;
                self.label[self.endpoint
                    [((ep(j - endptrick) ^ endptrick) ^ 1) as usize]
                    as usize] = LABEL_FREE;
                self.assign_label(self.endpoint[(p ^ 1) as usize], LABEL_T, p);
                self.allowedge[(ep(j - endptrick) / 2) as usize] = true;
                j += jstep;
                p = ep(j - endptrick) ^ endptrick;
                self.allowedge[(p / 2) as usize] = true;
                j += jstep;
            }
            // Relabel the base sub-blossom through the walk's final
            // endpoint, without stepping through to its mate.
            let bv = at(0);
            let base_vertex = self.endpoint[(p ^ 1) as usize] as usize;
            self.label[base_vertex] = LABEL_T;
            self.label[bv] = LABEL_T;
            self.labelend[base_vertex] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = -1;
            j += jstep;
            while at(j) != entrychild {
                let bv = at(j);
                if self.label[bv] == LABEL_S {
                    j += jstep;
                    continue;
                }
                let lv = self.leaves(bv);
                let mut labeled = None;
                for &v in &lv {
                    if self.label[v as usize] != LABEL_FREE {
                        labeled = Some(v);
                        break;
                    }
                }
                if let Some(v) = labeled {
                    debug_assert_eq!(self.label[v as usize], LABEL_T);
                    debug_assert_eq!(self.inblossom[v as usize] as usize, bv);
                    self.label[v as usize] = LABEL_FREE;
                    let base = self.blossombase[bv] as usize;
                    let mb = self.mate[base];
                    self.label[self.endpoint[mb as usize] as usize] = LABEL_FREE;
                    let le = self.labelend[v as usize];
                    self.assign_label(v, LABEL_T, le);
                }
                j += jstep;
            }
        }
        self.label[b] = LABEL_FREE;
        self.labelend[b] = -1;
        self.blossomchilds[b] = None;
        self.blossomendps[b] = None;
        self.blossombase[b] = -1;
        self.blossombestedges[b] = None;
        self.bestedge[b] = -1;
        self.unusedblossoms.push(b as u32);
    }

    /// Swap matched and unmatched edges along the path within blossom b
    /// from vertex v to the base, making v the new base.
    fn augment_blossom(&mut self, b: usize, v: u32) {
        let mut t = v as usize;
        while self.blossomparent[t] != b as i64 {
            t = self.blossomparent[t] as usize;
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let childs = self.blossomchilds[b].clone().unwrap();
        let endps = self.blossomendps[b].clone().unwrap();
        let nchild = childs.len() as i64;
        let i = childs.iter().position(|&c| c as usize == t).unwrap() as i64;
        let mut j = i;
        let (jstep, endptrick): (i64, i64) = if i & 1 != 0 {
            j -= nchild;
            (1, 0)
        } else {
            (-1, 1)
        };
        let at = |j: i64| -> usize { childs[j.rem_euclid(nchild) as usize] as usize };
        let ep = |j: i64| -> i64 { endps[j.rem_euclid(nchild) as usize] as i64 };
        while j != 0 {
            j += jstep;
            let t = at(j);
            let p = ep(j - endptrick) ^ endptrick;
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p as usize]);
            }
            j += jstep;
            let t = at(j);
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[(p ^ 1) as usize]);
            }
            self.mate[self.endpoint[p as usize] as usize] = p ^ 1;
            self.mate[self.endpoint[(p ^ 1) as usize] as usize] = p;
        }
        let i = i as usize;
        let mut ch = self.blossomchilds[b].take().unwrap();
        ch.rotate_left(i);
        self.blossomchilds[b] = Some(ch);
        let mut en = self.blossomendps[b].take().unwrap();
        en.rotate_left(i);
        self.blossomendps[b] = Some(en);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b].as_ref().unwrap()[0] as usize];
        debug_assert_eq!(self.blossombase[b], self.blossombase[v as usize]);
    }

    /// Augment the matching along the path through S-S edge k.
    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k as i64 + 1), (w, 2 * k as i64)] {
            loop {
                let bs = self.inblossom[s as usize] as usize;
                debug_assert_eq!(self.label[bs], LABEL_S);
                debug_assert_eq!(self.labelend[bs], self.mate[self.blossombase[bs] as usize]);
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s as usize] = p;
                if self.labelend[bs] == -1 {
                    break;
                }
                let t = self.endpoint[self.labelend[bs] as usize];
                let bt = self.inblossom[t as usize] as usize;
                debug_assert_eq!(self.label[bt], LABEL_T);
                debug_assert!(self.labelend[bt] >= 0);
                s = self.endpoint[self.labelend[bt] as usize];
                let j = self.endpoint[(self.labelend[bt] ^ 1) as usize];
                debug_assert_eq!(self.blossombase[bt], t as i64);
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j as usize] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn solve(&mut self) {
        for _stage in 0..self.nvertex {
            self.label.fill(LABEL_FREE);
            self.bestedge.fill(-1);
            for bb in self.blossombestedges[self.nvertex..].iter_mut() {
                *bb = None;
            }
            self.allowedge.fill(false);
            self.queue.clear();
            for v in 0..self.nvertex as u32 {
                if self.mate[v as usize] == -1
                    && self.label[self.inblossom[v as usize] as usize] == LABEL_FREE
                {
                    self.assign_label(v, LABEL_S, -1);
                }
            }
            let mut augmented = false;
            loop {
                while let Some(v) = self.queue.pop() {
                    debug_assert_eq!(self.label[self.inblossom[v as usize] as usize], LABEL_S);
                    let nbe = self.neighbend[v as usize].clone();
                    for p in nbe {
                        let k = (p / 2) as usize;
                        let w = self.endpoint[p as usize];
                        if self.inblossom[v as usize] == self.inblossom[w as usize] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            let bw = self.inblossom[w as usize] as usize;
                            if self.label[bw] == LABEL_FREE {
                                self.assign_label(w, LABEL_T, p as i64 ^ 1);
                            } else if self.label[bw] == LABEL_S {
                                let base = self.scan_blossom(v, w);
                                if base >= 0 {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w as usize] == LABEL_FREE {
                                debug_assert_eq!(self.label[bw], LABEL_T);
                                self.label[w as usize] = LABEL_T;
                                self.labelend[w as usize] = p as i64 ^ 1;
                            }
                        } else if self.label[self.inblossom[w as usize] as usize] == LABEL_S {
                            let b = self.inblossom[v as usize] as usize;
                            if self.bestedge[b] == -1
                                || kslack < self.slack(self.bestedge[b] as usize)
                            {
                                self.bestedge[b] = k as i64;
                            }
                        } else if self.label[w as usize] == LABEL_FREE
                            && (self.bestedge[w as usize] == -1
                                || kslack < self.slack(self.bestedge[w as usize] as usize))
                        {
                            self.bestedge[w as usize] = k as i64;
                        }
                    }
                    if augmented {
                        break;
                    }
                }
                if augmented {
                    break;
                }

                // No augmenting path under the current duals: compute the
                // largest safe dual change.
                let mut deltatype: i32 = -1;
                let mut delta: i64 = 0;
                let mut deltaedge: i64 = -1;
                let mut deltablossom: i64 = -1;
                if !self.max_cardinality {
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex].iter().copied().min().unwrap();
                }
                for v in 0..self.nvertex {
                    if self.label[self.inblossom[v] as usize] == LABEL_FREE
                        && self.bestedge[v] != -1
                    {
                        let d = self.slack(self.bestedge[v] as usize);
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * self.nvertex {
                    if self.blossomparent[b] == -1
                        && self.label[b] == LABEL_S
                        && self.bestedge[b] != -1
                    {
                        let kslack = self.slack(self.bestedge[b] as usize);
                        debug_assert_eq!(kslack % 2, 0, "S-S slacks stay even");
                        let d = kslack / 2;
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] >= 0
                        && self.blossomparent[b] == -1
                        && self.label[b] == LABEL_T
                        && (deltatype == -1 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b as i64;
                    }
                }
                if deltatype == -1 {
                    debug_assert!(self.max_cardinality);
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex]
                        .iter()
                        .copied()
                        .min()
                        .unwrap()
                        .max(0);
                }

                for v in 0..self.nvertex {
                    match self.label[self.inblossom[v] as usize] {
                        LABEL_S => self.dualvar[v] -= delta,
                        LABEL_T => self.dualvar[v] += delta,
                        _ => {}
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] >= 0 && self.blossomparent[b] == -1 {
                        match self.label[b] {
                            LABEL_S => self.dualvar[b] += delta,
                            LABEL_T => self.dualvar[b] -= delta,
                            _ => {}
                        }
                    }
                }

                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge as usize] = true;
                        let (i, j, _) = self.edges[deltaedge as usize];
                        let i = if self.label[self.inblossom[i as usize] as usize] == LABEL_FREE {
                            j
                        } else {
                            i
                        };
                        debug_assert_eq!(
                            self.label[self.inblossom[i as usize] as usize],
                            LABEL_S
                        );
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge as usize] = true;
                        let (i, _, _) = self.edges[deltaedge as usize];
                        debug_assert_eq!(
                            self.label[self.inblossom[i as usize] as usize],
                            LABEL_S
                        );
                        self.queue.push(i);
                    }
                    4 => self.expand_blossom(deltablossom as usize, false),
                    _ => unreachable!(),
                }
            }

            if !augmented {
                break;
            }
            for b in self.nvertex..2 * self.nvertex {
                if self.blossomparent[b] == -1
                    && self.blossombase[b] >= 0
                    && self.label[b] == LABEL_S
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
    }

    fn into_mates(self) -> Vec<i64> {
        let mut mate = self.mate;
        for v in 0..self.nvertex {
            if mate[v] >= 0 {
                mate[v] = self.endpoint[mate[v] as usize] as i64;
            }
        }
        for v in 0..self.nvertex {
            debug_assert!(mate[v] == -1 || mate[mate[v] as usize] == v as i64);
        }
        mate
    }
}

/// Minimum-weight perfect matching via weight negation. Returns `mate`
/// (partner per vertex) or `None` if no perfect matching exists.
pub fn min_weight_perfect_matching(
    n_vertices: usize,
    edges: &[(u32, u32, i64)],
) -> Option<Vec<u32>> {
    let negated: Vec<(u32, u32, i64)> = edges.iter().map(|&(u, v, w)| (u, v, -w)).collect();
    let mates = max_weight_matching(n_vertices, &negated, true);
    mates
        .iter()
        .map(|&m| if m < 0 { None } else { Some(m as u32) })
        .collect()
}
