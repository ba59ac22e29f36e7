//! Detector error models: independent flip mechanisms over detectors, with
//! a plain-text round-trip format.

use std::fmt::Write as _;

/// One independent error mechanism: with probability `p`, flip every listed
/// detector and (optionally) the logical observable.
#[derive(Debug, Clone, PartialEq)]
pub struct Mechanism {
    pub p: f64,
    /// Sorted, distinct detector indices; at most two for matchable models.
    pub detectors: Vec<u32>,
    pub flips_observable: bool,
}

/// A set of independent mechanisms over `n_detectors` parity checks, some of
/// which may be hidden at decoding time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectorErrorModel {
    pub n_detectors: usize,
    pub mechanisms: Vec<Mechanism>,
    /// (spatial, temporal) label per detector.
    pub detector_coords: Vec<(i32, i32)>,
    /// Detectors whose outcomes are unavailable when decoding.
    pub hidden: Vec<bool>,
}

#[derive(Debug, thiserror::Error)]
pub enum DemParseError {
    #[error("line {0}: {1}")]
    Malformed(usize, String),
    #[error("line {line}: probability {p} outside (0, 1)")]
    BadProbability { line: usize, p: f64 },
    #[error("line {0}: duplicate detector in mechanism")]
    DuplicateDetector(usize),
}

impl DetectorErrorModel {
    pub fn hidden_ids(&self) -> Vec<u32> {
        (0..self.n_detectors as u32)
            .filter(|&d| self.hidden[d as usize])
            .collect()
    }

    pub fn visible_ids(&self) -> Vec<u32> {
        (0..self.n_detectors as u32)
            .filter(|&d| !self.hidden[d as usize])
            .collect()
    }

    /// Serialize to the plain-text format parsed by [`Self::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (d, &(q, t)) in self.detector_coords.iter().enumerate() {
            writeln!(out, "detector({q}, {t}) D{d}").unwrap();
        }
        let hid = self.hidden_ids();
        if !hid.is_empty() {
            out.push_str("hidden");
            for d in hid {
                write!(out, " D{d}").unwrap();
            }
            out.push('\n');
        }
        for m in &self.mechanisms {
            write!(out, "error({})", m.p).unwrap();
            for d in &m.detectors {
                write!(out, " D{d}").unwrap();
            }
            if m.flips_observable {
                out.push_str(" L0");
            }
            out.push('\n');
        }
        out
    }

    /// Parse the plain-text format:
    ///
    /// ```text
    /// detector(0, 1) D0
    /// hidden D3 D7
    /// error(0.001996) D0 D1 L0
    /// ```
    ///
    /// Blank lines and `#` comments are skipped. The detector count is the
    /// largest index mentioned plus one; coordinates default to (0, 0).
    pub fn parse(text: &str) -> Result<Self, DemParseError> {
        let mut coords: Vec<(u32, (i32, i32))> = Vec::new();
        let mut hidden_ids: Vec<u32> = Vec::new();
        let mut mechanisms: Vec<Mechanism> = Vec::new();
        let mut max_det: Option<u32> = None;
        let bump = |d: u32, max_det: &mut Option<u32>| {
            *max_det = Some(max_det.map_or(d, |m: u32| m.max(d)));
        };

        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| DemParseError::Malformed(line, msg.into());
            if let Some(rest) = s.strip_prefix("detector(") {
                let (head, tail) = rest
                    .split_once(')')
                    .ok_or_else(|| bad("missing ')' after coordinates"))?;
                let (qs, ts) = head
                    .split_once(',')
                    .ok_or_else(|| bad("expected two coordinates"))?;
                let q: i32 = qs.trim().parse().map_err(|_| bad("bad coordinate"))?;
                let t: i32 = ts.trim().parse().map_err(|_| bad("bad coordinate"))?;
                let d = parse_det(tail.trim(), || bad("expected one detector"))?;
                bump(d, &mut max_det);
                coords.push((d, (q, t)));
            } else if let Some(rest) = s.strip_prefix("hidden") {
                for tok in rest.split_whitespace() {
                    let d = parse_det(tok, || bad("expected detector list"))?;
                    bump(d, &mut max_det);
                    hidden_ids.push(d);
                }
            } else if let Some(rest) = s.strip_prefix("error(") {
                let (ps, tail) = rest
                    .split_once(')')
                    .ok_or_else(|| bad("missing ')' after probability"))?;
                let p: f64 = ps.trim().parse().map_err(|_| bad("bad probability"))?;
                if !(p > 0.0 && p < 1.0) {
                    return Err(DemParseError::BadProbability { line, p });
                }
                let mut detectors = Vec::new();
                let mut flips_observable = false;
                for tok in tail.split_whitespace() {
                    if tok == "L0" {
                        flips_observable = true;
                    } else {
                        let d = parse_det(tok, || bad("expected D<i> or L0"))?;
                        bump(d, &mut max_det);
                        detectors.push(d);
                    }
                }
                detectors.sort_unstable();
                if detectors.windows(2).any(|w| w[0] == w[1]) {
                    return Err(DemParseError::DuplicateDetector(line));
                }
                mechanisms.push(Mechanism {
                    p,
                    detectors,
                    flips_observable,
                });
            } else {
                return Err(bad("unrecognized line"));
            }
        }

        let n_detectors = max_det.map_or(0, |m| m as usize + 1);
        let mut detector_coords = vec![(0, 0); n_detectors];
        for (d, c) in coords {
            detector_coords[d as usize] = c;
        }
        let mut hidden = vec![false; n_detectors];
        for d in hidden_ids {
            hidden[d as usize] = true;
        }
        Ok(DetectorErrorModel {
            n_detectors,
            mechanisms,
            detector_coords,
            hidden,
        })
    }
}

fn parse_det(tok: &str, err: impl Fn() -> DemParseError) -> Result<u32, DemParseError> {
    tok.strip_prefix('D')
        .and_then(|v| v.parse().ok())
        .ok_or_else(err)
}
