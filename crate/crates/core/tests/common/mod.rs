//! Shared test oracles, implemented independently of the library internals:
//! brute-force pairing enumeration over syndrome graphs, graph-state
//! determinism checks, unweighted distance searches, a linear-domain
//! partial-gap enumerator, and small statistics helpers.

#![allow(dead_code)]

use gapsel::circuits::NoisyCircuit;
use gapsel::DetectorErrorModel;

pub const W_EPS: f64 = 1e-10;

/// ln((1-p)/p) with the probability clamped away from 0, matching the
/// documented edge-weight convention.
pub fn edge_weight(p: f64) -> f64 {
    let p = p.max(W_EPS);
    ((1.0 - p) / p).ln()
}

/// One boundary attachment: the detector it hangs off, its weight, and the
/// raw frame bit of the attaching mechanism.
struct Exit {
    node: usize,
    weight: f64,
    frame: u8,
}

/// Brute-force distance/parity tables over a detector error model.
pub struct OracleTables {
    pub n: usize,
    /// Bulk all-pairs distances (boundary never transited).
    pub dist: Vec<Vec<f64>>,
    /// Cheapest boundary exit of either frame parity, per detector:
    /// `exit[par][v]`.
    pub exit: [Vec<f64>; 2],
    /// Cheapest defect-free boundary-to-boundary chain with odd frame.
    pub crossing: f64,
    /// Z2 potential: any interior u-v path has frame parity phi[u]^phi[v].
    pub phi: Vec<u8>,
}

/// Builds oracle tables by plain Floyd-Warshall plus a BFS potential.
/// Panics if any interior cycle has odd frame parity.
pub fn build_tables(dem: &DetectorErrorModel) -> OracleTables {
    let n = dem.n_detectors;
    let inf = f64::INFINITY;
    let mut dist = vec![vec![inf; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    let mut adj: Vec<Vec<(usize, u8)>> = vec![Vec::new(); n];
    let mut boundary: Vec<(usize, f64, u8)> = Vec::new(); // (node, w, frame)
    let mut direct_crossing = inf;
    for m in &dem.mechanisms {
        let w = edge_weight(m.p);
        let f = m.flips_observable as u8;
        match m.detectors.len() {
            0 => {
                if m.flips_observable {
                    direct_crossing = direct_crossing.min(w);
                }
            }
            1 => {
                let u = m.detectors[0] as usize;
                boundary.push((u, w, f));
            }
            2 => {
                let (u, v) = (m.detectors[0] as usize, m.detectors[1] as usize);
                if w < dist[u][v] {
                    dist[u][v] = w;
                    dist[v][u] = w;
                }
                adj[u].push((v, f));
                adj[v].push((u, f));
            }
            _ => panic!("oracle only handles graphlike models"),
        }
    }
    for k in 0..n {
        for i in 0..n {
            if dist[i][k].is_infinite() {
                continue;
            }
            for j in 0..n {
                let c = dist[i][k] + dist[k][j];
                if c < dist[i][j] {
                    dist[i][j] = c;
                }
            }
        }
    }
    // Z2 potential via BFS over interior edges; frame parity toggles across
    // each edge. Interior cycles of odd frame would make it ill-defined.
    let mut phi = vec![0u8; n];
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, f) in &adj[u] {
                let want = phi[u] ^ f;
                if seen[v] {
                    assert_eq!(phi[v], want, "interior cycle with odd frame parity");
                } else {
                    seen[v] = true;
                    phi[v] = want;
                    queue.push_back(v);
                }
            }
        }
    }
    let exits: Vec<Exit> = boundary
        .iter()
        .map(|&(u, w, f)| Exit { node: u, weight: w, frame: f })
        .collect();
    let mut exit = [vec![inf; n], vec![inf; n]];
    for v in 0..n {
        for e in &exits {
            let c = dist[v][e.node] + e.weight;
            // frame parity of the whole chain v -> attach -> out
            let par = (phi[v] ^ phi[e.node] ^ e.frame) as usize;
            if c < exit[par][v] {
                exit[par][v] = c;
            }
        }
    }
    let mut crossing = direct_crossing;
    for e in &exits {
        // extend by the cheapest continuation whose parity makes the total odd
        let other = exit[(e.frame ^ 1) as usize][e.node];
        if e.weight + other < crossing {
            crossing = e.weight + other;
        }
    }
    OracleTables { n, dist, exit, crossing, phi }
}

/// Minimum correction weight per logical class, by exhaustive enumeration of
/// defect pairings (partner, or boundary exit of either parity) plus at most
/// one defect-free crossing chain. Infinity marks an infeasible class.
pub fn oracle_class_weights(t: &OracleTables, defects: &[usize]) -> [f64; 2] {
    let mut best = [f64::INFINITY; 2];
    let mut rem: Vec<usize> = defects.to_vec();
    rec_pairings(t, &mut rem, 0.0, 0, &mut best);
    best
}

fn rec_pairings(t: &OracleTables, rem: &mut Vec<usize>, cost: f64, parity: u8, best: &mut [f64; 2]) {
    if cost >= best[0] && cost >= best[1] {
        return;
    }
    let Some(&x) = rem.first() else {
        if cost < best[parity as usize] {
            best[parity as usize] = cost;
        }
        let crossed = cost + t.crossing;
        if crossed < best[(parity ^ 1) as usize] {
            best[(parity ^ 1) as usize] = crossed;
        }
        return;
    };
    rem.remove(0);
    for par in [0u8, 1u8] {
        let c = t.exit[par as usize][x];
        if c.is_finite() {
            rec_pairings(t, rem, cost + c, parity ^ par, best);
        }
    }
    for j in 0..rem.len() {
        let y = rem.remove(j);
        let d = t.dist[x][y];
        if d.is_finite() {
            rec_pairings(t, rem, cost + d, parity ^ t.phi[x] ^ t.phi[y], best);
        }
        rem.insert(j, y);
    }
    rem.insert(0, x);
}

/// Literal linear-domain partial gap: enumerate every assignment of the given
/// hidden detectors, accumulate P = e^{-w0} + e^{-w1} and P*G with
/// G = e^{-|w0-w1|}, and return the score -ln(sum PG / sum P).
/// Only sound for small weights; intended for hand-sized models.
pub fn oracle_partial_gap(t: &OracleTables, visible_defects: &[usize], hidden: &[usize]) -> f64 {
    assert!(hidden.len() <= 22, "oracle enumeration too large");
    let mut sum_p = 0.0f64;
    let mut sum_pg = 0.0f64;
    for mask in 0u64..(1u64 << hidden.len()) {
        let mut defects: Vec<usize> = visible_defects.to_vec();
        for (b, &h) in hidden.iter().enumerate() {
            if mask >> b & 1 == 1 {
                defects.push(h);
            }
        }
        let [w0, w1] = oracle_class_weights(t, &defects);
        let p = (-w0).exp() + (-w1).exp();
        if p == 0.0 {
            continue;
        }
        let g = -(w0 - w1).abs();
        sum_p += p;
        sum_pg += p * g.exp();
    }
    assert!(sum_p > 0.0, "no likelihood mass in enumeration");
    -(sum_pg / sum_p).ln()
}

/// Asserts that every detector parity set and the observable of `c` are
/// deterministic under the noiseless circuit, via the graph-state stabilizer
/// rule: for the X-measured set S_X and Z-measured set S_Z of a parity group,
/// every qubit u must satisfy |N(u) ∩ S_X| ≡ [u ∈ S_Z]  (mod 2).
pub fn assert_deterministic_parities(c: &NoisyCircuit) {
    let meas = c.measurements();
    let adj = c.adjacency();
    let nq = adj.len();
    let mut groups: Vec<Vec<u32>> = c.detectors.iter().map(|d| d.measurements.clone()).collect();
    groups.push(c.observable.clone());
    for (gi, group) in groups.iter().enumerate() {
        let mut in_x = vec![false; nq];
        let mut in_z = vec![false; nq];
        for &mi in group {
            let (q, is_x) = meas[mi as usize];
            if is_x {
                in_x[q as usize] = true;
            } else {
                in_z[q as usize] = true;
            }
        }
        for u in 0..nq {
            let parity = adj[u].iter().filter(|&&v| in_x[v as usize]).count() % 2;
            assert_eq!(
                parity == 1,
                in_z[u],
                "parity group {gi} is not deterministic at qubit {u}"
            );
        }
    }
}

/// Unweighted code distance: fewest mechanisms whose combined detector flips
/// vanish while the observable flips. BFS over (node, accumulated frame)
/// states with all boundary attachments merged into one virtual node.
pub fn oracle_bfs_distance(dem: &DetectorErrorModel) -> usize {
    let n = dem.n_detectors;
    let b = n; // merged boundary
    let mut adj: Vec<Vec<(usize, u8)>> = vec![Vec::new(); n + 1];
    for m in &dem.mechanisms {
        let f = m.flips_observable as u8;
        match m.detectors.len() {
            0 => {
                if m.flips_observable {
                    adj[b].push((b, 1));
                }
            }
            1 => {
                let u = m.detectors[0] as usize;
                adj[u].push((b, f));
                adj[b].push((u, f));
            }
            2 => {
                let (u, v) = (m.detectors[0] as usize, m.detectors[1] as usize);
                adj[u].push((v, f));
                adj[v].push((u, f));
            }
            _ => panic!("oracle only handles graphlike models"),
        }
    }
    let mut dist = vec![[usize::MAX; 2]; n + 1];
    dist[b][0] = 0;
    let mut queue = std::collections::VecDeque::from([(b, 0u8)]);
    while let Some((u, par)) = queue.pop_front() {
        let d = dist[u][par as usize];
        for &(v, f) in &adj[u] {
            let np = (par ^ f) as usize;
            if dist[v][np] == usize::MAX {
                dist[v][np] = d + 1;
                queue.push_back((v, np as u8));
            }
        }
    }
    dist[b][1]
}

/// Exhaustive distance check: the smallest mechanism subset of size at most
/// `max_w` with empty net syndrome and flipped observable, if one exists.
/// Detector count must fit in a u64 bitmask.
pub fn oracle_distance_exhaustive(dem: &DetectorErrorModel, max_w: usize) -> Option<usize> {
    assert!(dem.n_detectors <= 64);
    let masks: Vec<(u64, bool)> = dem
        .mechanisms
        .iter()
        .map(|m| {
            let mut mask = 0u64;
            for &d in &m.detectors {
                mask ^= 1u64 << d;
            }
            (mask, m.flips_observable)
        })
        .collect();
    let mut best: Option<usize> = None;
    fn rec(
        masks: &[(u64, bool)],
        from: usize,
        syn: u64,
        obs: bool,
        used: usize,
        cap: usize,
        best: &mut Option<usize>,
    ) {
        if syn == 0 && obs {
            if best.map_or(true, |b| used < b) {
                *best = Some(used);
            }
            return;
        }
        if used == cap || best.is_some_and(|b| used + 1 >= b) {
            return;
        }
        for i in from..masks.len() {
            rec(masks, i + 1, syn ^ masks[i].0, obs ^ masks[i].1, used + 1, cap, best);
        }
    }
    rec(&masks, 0, 0, false, 0, max_w, &mut best);
    best
}

/// Probability that an odd number of independent events with probabilities
/// `ps` occur: (1 - prod(1-2p)) / 2.
pub fn xor_probability(ps: &[f64]) -> f64 {
    (1.0 - ps.iter().fold(1.0, |acc, &p| acc * (1.0 - 2.0 * p))) / 2.0
}

/// Expected marginal firing rate of each detector under the model.
pub fn detector_rates(dem: &DetectorErrorModel) -> Vec<f64> {
    let mut per_det: Vec<Vec<f64>> = vec![Vec::new(); dem.n_detectors];
    for m in &dem.mechanisms {
        for &d in &m.detectors {
            per_det[d as usize].push(m.p);
        }
    }
    per_det.iter().map(|ps| xor_probability(ps)).collect()
}

/// Wilson score interval at normal quantile `z`.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    assert!(n > 0);
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Average ranks (ties share the mean of their positions).
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// Ordinary least squares y = a*x + b.
pub fn linfit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let a = sxy / sxx;
    (a, my - a * mx)
}
