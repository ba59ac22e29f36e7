//! Repetition-code cluster chains: a line of data qubits threaded through
//! alternating check and bare sheets, with parity ancillas bonded to every
//! other sheet.

use super::{CircuitOp, DetectorDef, NoisyCircuit};

/// Build the noisy preparation circuit of a length-`d` repetition-code
/// cluster.
///
/// The chain runs through sheets 0..=2d+1. Check layer `t` (t = 1..=d+1)
/// bonds one ancilla per neighboring data pair to sheet 2(t-1); layer d+1
/// and the final sheet transition are noiseless, standing in for ideal
/// consumption of the state. Sheet-0 data are measured in Z and anchor the
/// first detector round; everything else is measured in X. Every noisy CZ
/// dephases both its endpoints with probability `p`. The last detector
/// round is hidden: its checks are not known when the state is handed off.
pub fn repetition_cluster(d: usize, p: f64) -> NoisyCircuit {
    assert!(d >= 3 && d % 2 == 1, "code distance must be odd and at least 3");
    assert!(
        p > 0.0 && p < 0.5,
        "dephasing rate must lie strictly inside (0, 0.5)"
    );
    let n_sheets = 2 * d + 2;
    let data = |sheet: usize, k: usize| (sheet * d + k) as u32;
    let anc_base = n_sheets * d;
    let anc = |layer: usize, k: usize| (anc_base + (layer - 1) * (d - 1) + k) as u32;
    let n_qubits = (anc_base + (d + 1) * (d - 1)) as u32;

    let mut ops: Vec<CircuitOp> = (0..n_qubits).map(CircuitOp::PreparePlus).collect();

    // Check-layer bonds; the last layer is noiseless.
    for t in 1..=d + 1 {
        let sheet = 2 * (t - 1);
        let noisy = t <= d;
        for k in 0..d - 1 {
            for q in [data(sheet, k), data(sheet, k + 1)] {
                ops.push(CircuitOp::Cz(anc(t, k), q));
                if noisy {
                    ops.push(CircuitOp::Dephase(anc(t, k), p));
                    ops.push(CircuitOp::Dephase(q, p));
                }
            }
        }
    }
    // Sheet-to-sheet bonds; the last transition is noiseless.
    for sheet in 0..n_sheets - 1 {
        let noisy = sheet < n_sheets - 2;
        for k in 0..d {
            ops.push(CircuitOp::Cz(data(sheet, k), data(sheet + 1, k)));
            if noisy {
                ops.push(CircuitOp::Dephase(data(sheet, k), p));
                ops.push(CircuitOp::Dephase(data(sheet + 1, k), p));
            }
        }
    }

    // Measurement record: sheet-0 references in Z, then data sheets in X,
    // then ancilla layers.
    let mut order: Vec<(u32, bool)> = Vec::new();
    for k in 0..d {
        order.push((data(0, k), false));
    }
    for sheet in 1..n_sheets {
        for k in 0..d {
            order.push((data(sheet, k), true));
        }
    }
    for t in 1..=d + 1 {
        for k in 0..d - 1 {
            order.push((anc(t, k), true));
        }
    }
    let mut meas_of = vec![0u32; n_qubits as usize];
    for (i, &(q, x)) in order.iter().enumerate() {
        meas_of[q as usize] = i as u32;
        ops.push(if x {
            CircuitOp::MeasureX(q)
        } else {
            CircuitOp::MeasureZ(q)
        });
    }
    let m = |q: u32| meas_of[q as usize];

    let mut detectors = Vec::new();
    // Anchored first round: each layer-1 ancilla against two Z references.
    for k in 0..d - 1 {
        detectors.push(DetectorDef {
            measurements: vec![m(anc(1, k)), m(data(0, k)), m(data(0, k + 1))],
            coord: (k as i32, 0),
            hidden: false,
        });
    }
    // Bulk rounds: two consecutive check layers around a bare sheet.
    for t in 1..=d {
        for k in 0..d - 1 {
            detectors.push(DetectorDef {
                measurements: vec![
                    m(anc(t, k)),
                    m(data(2 * t - 1, k)),
                    m(data(2 * t - 1, k + 1)),
                    m(anc(t + 1, k)),
                ],
                coord: (k as i32, t as i32),
                hidden: t == d,
            });
        }
    }

    // Logical membrane: X on every odd sheet plus the Z references.
    let mut observable: Vec<u32> = (0..d).map(|k| m(data(0, k))).collect();
    for sheet in (1..n_sheets).step_by(2) {
        for k in 0..d {
            observable.push(m(data(sheet, k)));
        }
    }

    NoisyCircuit {
        n_qubits,
        ops,
        detectors,
        observable,
    }
}
