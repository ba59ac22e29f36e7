//! Surface-code cluster blocks: sheets of data qubits bonded alternately to
//! the two plaquette sublattices of the rotated layout.

use super::{CircuitOp, DetectorDef, NoisyCircuit};

struct Cell {
    support: Vec<(usize, usize)>,
}

/// Rotated-layout plaquettes of one sublattice on a d x d patch. Cells sit
/// at (cx, cy) in {-1..d-1}^2 and cover the patch qubits under a 2x2
/// footprint; sublattice membership checkerboards on cx+cy. One sublattice
/// keeps its two-qubit cells on the left/right patch edges, the other on
/// the top/bottom edges, and corners are never kept.
fn cells(d: usize, decoded: bool) -> Vec<Cell> {
    let di = d as i32;
    let mut out = Vec::new();
    for cy in -1..di {
        for cx in -1..di {
            if ((cx + cy).rem_euclid(2) == 0) != decoded {
                continue;
            }
            let x_edge = cx == -1 || cx == di - 1;
            let y_edge = cy == -1 || cy == di - 1;
            let keep = match (x_edge, y_edge) {
                (true, true) => false,
                (true, false) => decoded,
                (false, true) => !decoded,
                (false, false) => true,
            };
            if !keep {
                continue;
            }
            let mut support = Vec::new();
            for y in cy..=cy + 1 {
                for x in cx..=cx + 1 {
                    if (0..di).contains(&x) && (0..di).contains(&y) {
                        support.push((x as usize, y as usize));
                    }
                }
            }
            out.push(Cell { support });
        }
    }
    out
}

/// Build the noisy preparation circuit of a distance-`d` surface-code
/// cluster block.
///
/// Data sheets 0..=2d+4 alternate their plaquette bonds: odd sheets carry
/// the decoded sublattice's ancillas, even sheets the other's. Consecutive
/// same-sublattice ancilla sheets and the data sheet between them form one
/// detector round; the decoded sublattice additionally opens with a
/// boundary round pairing the first data sheet directly with the first
/// check sheet, so each sublattice has d+2 rounds, first and last hidden.
/// All check layers are noisy except the final one per sublattice (sheets
/// 2d+3 and 2d+4): the block is d+1 noisy stabilizer layers closed by one
/// layer of noiseless checks. The first rounds are noisy *and* hidden —
/// a check fault there also fires the following visible round, while a
/// boundary data fault fires hidden detectors only, which is exactly the
/// error class postselection cannot see. The final data sheet enters the
/// observable unchecked and stays noiseless. The observable is the X
/// parity of all even-sheet data, a membrane crossed only by left-right
/// spanning chains of decoded-sublattice flips.
pub fn surface_cluster(d: usize, p: f64) -> NoisyCircuit {
    assert!(d >= 3 && d % 2 == 1, "code distance must be odd and at least 3");
    assert!(
        p > 0.0 && p < 0.5,
        "dephasing rate must lie strictly inside (0, 0.5)"
    );
    let n_sheets = 2 * d + 5;
    let nd = d * d;
    let b_cells = cells(d, true);
    let a_cells = cells(d, false);

    let data = |sheet: usize, x: usize, y: usize| (sheet * nd + y * d + x) as u32;
    let mut anc_offset = vec![0usize; n_sheets + 1];
    for sheet in 0..n_sheets {
        let count = if sheet % 2 == 0 {
            a_cells.len()
        } else {
            b_cells.len()
        };
        anc_offset[sheet + 1] = anc_offset[sheet] + count;
    }
    let anc_base = n_sheets * nd;
    let anc = |sheet: usize, cell: usize| (anc_base + anc_offset[sheet] + cell) as u32;
    let n_qubits = (anc_base + anc_offset[n_sheets]) as u32;

    let mut ops: Vec<CircuitOp> = (0..n_qubits).map(CircuitOp::PreparePlus).collect();

    // Plaquette bonds: ancilla to its cell's data on the same sheet. Every
    // CZ dephases both endpoints except in the two final check sheets
    // (2d+3, 2d+4), the noiseless closure layer. A noisy copy of a closure
    // check would mimic a frame-carrying data fault's detector signature —
    // the closure anchors the last hidden rounds and appears in no later
    // round — opening an undetectable weight-2 logical.
    for sheet in 0..n_sheets {
        let cells = if sheet % 2 == 0 { &a_cells } else { &b_cells };
        let noisy = sheet <= 2 * d + 2;
        for (i, c) in cells.iter().enumerate() {
            for &(x, y) in &c.support {
                ops.push(CircuitOp::Cz(anc(sheet, i), data(sheet, x, y)));
                if noisy {
                    ops.push(CircuitOp::Dephase(anc(sheet, i), p));
                    ops.push(CircuitOp::Dephase(data(sheet, x, y), p));
                }
            }
        }
    }
    // Sheet-to-sheet bonds; only the transition into the final data sheet
    // is noiseless, because that sheet feeds the observable membrane
    // without appearing in any detector.
    for sheet in 0..n_sheets - 1 {
        let noisy = sheet <= 2 * d + 2;
        for y in 0..d {
            for x in 0..d {
                ops.push(CircuitOp::Cz(data(sheet, x, y), data(sheet + 1, x, y)));
                if noisy {
                    ops.push(CircuitOp::Dephase(data(sheet, x, y), p));
                    ops.push(CircuitOp::Dephase(data(sheet + 1, x, y), p));
                }
            }
        }
    }

    // Measurement record: everything in X, sheet-major, data before
    // ancillas.
    let mut order: Vec<u32> = Vec::new();
    for sheet in 0..n_sheets {
        for y in 0..d {
            for x in 0..d {
                order.push(data(sheet, x, y));
            }
        }
        let count = anc_offset[sheet + 1] - anc_offset[sheet];
        for i in 0..count {
            order.push(anc(sheet, i));
        }
    }
    let mut meas_of = vec![0u32; n_qubits as usize];
    for (i, &q) in order.iter().enumerate() {
        meas_of[q as usize] = i as u32;
        ops.push(CircuitOp::MeasureX(q));
    }
    let m = |q: u32| meas_of[q as usize];

    let mut detectors = Vec::new();
    // Decoded sublattice: a boundary round on the first data sheet, then
    // rounds pairing consecutive odd ancilla sheets.
    for r in 0..=d + 1 {
        for (i, c) in b_cells.iter().enumerate() {
            let mut meas = Vec::new();
            if r > 0 {
                meas.push(m(anc(2 * r - 1, i)));
            }
            meas.extend(c.support.iter().map(|&(x, y)| m(data(2 * r, x, y))));
            meas.push(m(anc(2 * r + 1, i)));
            detectors.push(DetectorDef {
                measurements: meas,
                coord: (i as i32, r as i32),
                hidden: r == 0 || r == d + 1,
            });
        }
    }
    // Undecoded sublattice: rounds pair consecutive even ancilla sheets.
    for r in 0..=d + 1 {
        for (j, c) in a_cells.iter().enumerate() {
            let mut meas = vec![m(anc(2 * r, j))];
            meas.extend(c.support.iter().map(|&(x, y)| m(data(2 * r + 1, x, y))));
            meas.push(m(anc(2 * r + 2, j)));
            detectors.push(DetectorDef {
                measurements: meas,
                coord: ((b_cells.len() + j) as i32, r as i32),
                hidden: r == 0 || r == d + 1,
            });
        }
    }

    // Logical membrane: X on every even-sheet data qubit.
    let mut observable = Vec::new();
    for sheet in (0..n_sheets).step_by(2) {
        for y in 0..d {
            for x in 0..d {
                observable.push(m(data(sheet, x, y)));
            }
        }
    }

    NoisyCircuit {
        n_qubits,
        ops,
        detectors,
        observable,
    }
}
