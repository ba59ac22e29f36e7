//! Counter-based Monte Carlo sampling of detector error models.
//!
//! Every shot is generated from its own RNG stream, derived from the global
//! seed and the shot index alone. Batches therefore produce identical results
//! regardless of thread count or call granularity.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::dem::DetectorErrorModel;

/// Outcome of one sampled shot, with detectors split by visibility.
///
/// `visible[i]` / `hidden[j]` correspond to `DetectorErrorModel::visible_ids()[i]`
/// and `hidden_ids()[j]` respectively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shot {
    pub visible: Vec<bool>,
    pub hidden: Vec<bool>,
    pub observable: bool,
}

/// Mechanisms sharing one probability, for geometric skip-sampling.
struct Group {
    p: f64,
    ln_1mp: f64,
    members: Vec<u32>,
}

/// Where a detector flip lands in a [`Shot`]: visible or hidden part + index.
#[derive(Clone, Copy)]
struct Slot {
    hidden: bool,
    idx: u32,
}

/// Deterministic per-shot sampler over a [`DetectorErrorModel`].
pub struct ShotSampler {
    dem: Arc<DetectorErrorModel>,
    groups: Vec<Group>,
    slots: Vec<Slot>,
    n_visible: usize,
    n_hidden: usize,
    seed: u64,
}

impl ShotSampler {
    pub fn new(dem: Arc<DetectorErrorModel>, seed: u64) -> Self {
        let mut groups: Vec<Group> = Vec::new();
        for (i, mech) in dem.mechanisms.iter().enumerate() {
            match groups.iter_mut().find(|g| g.p == mech.p) {
                Some(g) => g.members.push(i as u32),
                None => groups.push(Group {
                    p: mech.p,
                    ln_1mp: (-mech.p).ln_1p(),
                    members: vec![i as u32],
                }),
            }
        }
        let mut slots = Vec::with_capacity(dem.n_detectors);
        let mut n_visible = 0u32;
        let mut n_hidden = 0u32;
        for d in 0..dem.n_detectors {
            if dem.hidden[d] {
                slots.push(Slot { hidden: true, idx: n_hidden });
                n_hidden += 1;
            } else {
                slots.push(Slot { hidden: false, idx: n_visible });
                n_visible += 1;
            }
        }
        Self {
            dem,
            groups,
            slots,
            n_visible: n_visible as usize,
            n_hidden: n_hidden as usize,
            seed,
        }
    }

    pub fn dem(&self) -> &DetectorErrorModel {
        &self.dem
    }

    /// Samples the shot at `index`. Identical inputs give identical shots.
    pub fn sample_shot(&self, index: u64) -> Shot {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let mut shot = Shot {
            visible: vec![false; self.n_visible],
            hidden: vec![false; self.n_hidden],
            observable: false,
        };
        let flip = |shot: &mut Shot, mech_id: u32| {
            let mech = &self.dem.mechanisms[mech_id as usize];
            for &d in &mech.detectors {
                let slot = self.slots[d as usize];
                let part = if slot.hidden { &mut shot.hidden } else { &mut shot.visible };
                part[slot.idx as usize] ^= true;
            }
            shot.observable ^= mech.flips_observable;
        };
        for g in &self.groups {
            if g.p >= 1.0 {
                for &m in &g.members {
                    flip(&mut shot, m);
                }
                continue;
            }
            let n = g.members.len() as f64;
            let mut pos = 0.0f64;
            loop {
                let u: f64 = rng.gen();
                pos += ((-u).ln_1p() / g.ln_1mp).floor();
                if !(pos < n) {
                    break;
                }
                flip(&mut shot, g.members[pos as usize]);
                pos += 1.0;
            }
        }
        shot
    }

    /// Samples `count` consecutive shots starting at `start`, in parallel.
    pub fn sample_batch(&self, start: u64, count: usize) -> Vec<Shot> {
        (0..count as u64)
            .into_par_iter()
            .map(|i| self.sample_shot(start + i))
            .collect()
    }
}
