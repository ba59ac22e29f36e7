//! Noisy cluster-state preparation circuits.
//!
//! A [`NoisyCircuit`] is a straight-line sequence of qubit preparations, CZ
//! gates, probabilistic dephasing events and destructive single-qubit
//! measurements, together with the parity checks (detectors) and the logical
//! observable that make its outcomes meaningful. Dephasing commutes with CZ,
//! so every noise event either flips the next X-basis measurement of its
//! qubit or is erased by a later Z-basis measurement or preparation. That
//! collapse turns the circuit into a detector error model: independent flip
//! mechanisms, each touching at most two detectors and possibly the
//! observable.

pub mod dem;
mod repetition;
mod sampler;
mod surface;

pub use repetition::repetition_cluster;
pub use sampler::{Shot, ShotSampler};
pub use surface::surface_cluster;

use std::collections::BTreeMap;

use dem::{DetectorErrorModel, Mechanism};

/// One primitive operation in a noisy preparation circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircuitOp {
    /// Prepare a qubit in |+>.
    PreparePlus(u32),
    /// Apply a CZ gate between two qubits.
    Cz(u32, u32),
    /// Apply Z to a qubit with the given probability.
    Dephase(u32, f64),
    /// Measure a qubit in the X basis.
    MeasureX(u32),
    /// Measure a qubit in the Z basis.
    MeasureZ(u32),
}

/// A parity of measurement outcomes that is deterministic on the noiseless
/// circuit.
#[derive(Debug, Clone)]
pub struct DetectorDef {
    /// Indices into the circuit's measurement sequence.
    pub measurements: Vec<u32>,
    /// (spatial, temporal) label carried through to reports.
    pub coord: (i32, i32),
    /// Hidden detectors are not available when the prepared state is handed
    /// off; decoding has to marginalize over them.
    pub hidden: bool,
}

/// A preparation circuit plus the parity checks and logical observable
/// defined over its measurement record.
#[derive(Debug, Clone)]
pub struct NoisyCircuit {
    pub n_qubits: u32,
    pub ops: Vec<CircuitOp>,
    pub detectors: Vec<DetectorDef>,
    /// Measurement indices whose joint parity defines the logical
    /// observable.
    pub observable: Vec<u32>,
}

/// Failure modes when collapsing a circuit to a detector error model.
#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("qubit {0} is measured more than once")]
    QubitRemeasured(u32),
    #[error("detector {det} lists measurement {meas} more than once")]
    DuplicateMeasurement { det: usize, meas: u32 },
    #[error("detector {det} references measurement {meas}, past the end of the record")]
    BadMeasurementRef { det: usize, meas: u32 },
    #[error("observable references measurement {0}, past the end of the record")]
    BadObservableRef(u32),
    #[error("a flip of measurement {meas} touches {n} detectors; matching needs at most two")]
    NotGraphlike { meas: u32, n: usize },
}

impl NoisyCircuit {
    /// The measurement record: (qubit, is_x_basis) in measurement order.
    pub fn measurements(&self) -> Vec<(u32, bool)> {
        self.ops
            .iter()
            .filter_map(|op| match *op {
                CircuitOp::MeasureX(q) => Some((q, true)),
                CircuitOp::MeasureZ(q) => Some((q, false)),
                _ => None,
            })
            .collect()
    }

    /// CZ adjacency lists over qubits.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n_qubits as usize];
        for op in &self.ops {
            if let CircuitOp::Cz(a, b) = *op {
                adj[a as usize].push(b);
                adj[b as usize].push(a);
            }
        }
        adj
    }

    /// Collapse the circuit's dephasing events into a detector error model.
    ///
    /// A Z flip commutes with every CZ, so it flips exactly the next X-basis
    /// measurement of its qubit, or nothing if the qubit is next measured in
    /// Z or re-prepared. Flips hitting the same measurement combine like
    /// independent coins; mechanisms that touch no detector and not the
    /// observable are dropped.
    pub fn extract_dem(&self) -> Result<DetectorErrorModel, ModelError> {
        let meas = self.measurements();
        let n_meas = meas.len();
        let mut seen = vec![false; self.n_qubits as usize];
        for &(q, _) in &meas {
            if seen[q as usize] {
                return Err(ModelError::QubitRemeasured(q));
            }
            seen[q as usize] = true;
        }

        let mut meas_dets: Vec<Vec<u32>> = vec![Vec::new(); n_meas];
        for (det, def) in self.detectors.iter().enumerate() {
            for &m in &def.measurements {
                if m as usize >= n_meas {
                    return Err(ModelError::BadMeasurementRef { det, meas: m });
                }
                if meas_dets[m as usize].contains(&(det as u32)) {
                    return Err(ModelError::DuplicateMeasurement { det, meas: m });
                }
                meas_dets[m as usize].push(det as u32);
            }
        }
        let mut meas_obs = vec![false; n_meas];
        for &m in &self.observable {
            if m as usize >= n_meas {
                return Err(ModelError::BadObservableRef(m));
            }
            meas_obs[m as usize] ^= true;
        }

        // Reverse scan: at each point, next_x[q] is the X measurement a Z
        // flip on q would reach.
        let mut next_x: Vec<Option<u32>> = vec![None; self.n_qubits as usize];
        let mut idx = n_meas;
        let mut flips: Vec<(u32, f64)> = Vec::new();
        for op in self.ops.iter().rev() {
            match *op {
                CircuitOp::MeasureX(q) => {
                    idx -= 1;
                    next_x[q as usize] = Some(idx as u32);
                }
                CircuitOp::MeasureZ(q) => {
                    idx -= 1;
                    next_x[q as usize] = None;
                }
                CircuitOp::PreparePlus(q) => next_x[q as usize] = None,
                CircuitOp::Cz(..) => {}
                CircuitOp::Dephase(q, p) => {
                    if p > 0.0 {
                        if let Some(m) = next_x[q as usize] {
                            flips.push((m, p));
                        }
                    }
                }
            }
        }

        let mut merged: BTreeMap<(Vec<u32>, bool), f64> = BTreeMap::new();
        for (m, p) in flips {
            let mut dets = meas_dets[m as usize].clone();
            dets.sort_unstable();
            let obs = meas_obs[m as usize];
            if dets.is_empty() && !obs {
                continue;
            }
            if dets.len() > 2 {
                return Err(ModelError::NotGraphlike { meas: m, n: dets.len() });
            }
            let q = merged.entry((dets, obs)).or_insert(0.0);
            *q = *q * (1.0 - p) + p * (1.0 - *q);
        }

        Ok(DetectorErrorModel {
            n_detectors: self.detectors.len(),
            mechanisms: merged
                .into_iter()
                .map(|((detectors, flips_observable), p)| Mechanism {
                    p,
                    detectors,
                    flips_observable,
                })
                .collect(),
            detector_coords: self.detectors.iter().map(|d| d.coord).collect(),
            hidden: self.detectors.iter().map(|d| d.hidden).collect(),
        })
    }
}
