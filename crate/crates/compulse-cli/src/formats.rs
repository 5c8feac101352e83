//! Stable file formats: sequence files, grid CSV, contour sets and run
//! reports, all written atomically (temp file + rename).

use std::f64::consts::PI;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use compulse::catalog::SequenceRecord;
use compulse::landscape::{ContourSet, LandscapeGrid};
use compulse::su2::{wrap_phase, CompositeSequence, GateKind, Pulse};

use crate::CliError;

/// Schema version stamped into every file this tool writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PulseFile {
    pub omega: f64,
    pub tau: f64,
    /// Phase in units of π, matching the published tables.
    pub phase_over_pi: f64,
}

/// On-disk form of a composite sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceFile {
    pub schema_version: u32,
    pub name: String,
    pub target: String,
    pub symmetric: bool,
    pub pulses: Vec<PulseFile>,
    #[serde(default)]
    pub provenance: String,
    #[serde(default)]
    pub claimed_orders: Vec<(usize, usize)>,
}

/// Phase in π units whose product with π reproduces `phase` bit-exactly.
///
/// Catalog phases are stored as correctly rounded products `c·π`, so an
/// exact preimage exists within a couple of ulps of `phase/π`; searching
/// those candidates makes export∘import the identity. Phases with no
/// exact preimage (arbitrary radians) fall back to the nearest quotient.
fn phase_over_pi_exact(phase: f64) -> f64 {
    let guess = phase / PI;
    let up = guess.next_up();
    let down = guess.next_down();
    for cand in [guess, up, down, up.next_up(), down.next_down()] {
        if wrap_phase(cand * PI) == phase {
            return cand;
        }
    }
    guess
}

impl SequenceFile {
    pub fn from_sequence(
        seq: &CompositeSequence,
        provenance: &str,
        claimed_orders: &[(usize, usize)],
    ) -> Self {
        SequenceFile {
            schema_version: SCHEMA_VERSION,
            name: seq.name.clone(),
            target: seq.target.to_string(),
            symmetric: seq.symmetric,
            pulses: seq
                .pulses
                .iter()
                .map(|p| PulseFile {
                    omega: p.omega,
                    tau: p.tau,
                    phase_over_pi: phase_over_pi_exact(p.phase),
                })
                .collect(),
            provenance: provenance.to_string(),
            claimed_orders: claimed_orders.to_vec(),
        }
    }

    pub fn from_record(rec: &SequenceRecord) -> Self {
        SequenceFile::from_sequence(&rec.sequence, &rec.provenance, &rec.claimed_orders)
    }

    /// Reconstruct the in-memory sequence, validating as it goes.
    pub fn to_sequence(&self) -> Result<CompositeSequence, CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::usage(format!(
                "sequence file: unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let target = GateKind::from_str(&self.target)
            .map_err(|e| CliError::usage(format!("sequence file: {e}")))?;
        let pulses: Result<Vec<Pulse>, CliError> = self
            .pulses
            .iter()
            .map(|p| {
                Pulse::new(p.omega, p.tau, p.phase_over_pi * PI)
                    .map_err(|e| CliError::usage(format!("sequence file: {e}")))
            })
            .collect();
        CompositeSequence::new(self.name.clone(), pulses?, target, self.symmetric)
            .map_err(|e| CliError::usage(format!("sequence file: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let body = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::runtime(format!("serializing sequence file: {e}")))?;
        write_atomic(path, &body)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let body = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("reading {}: {e}", path.display())))?;
        serde_json::from_str(&body)
            .map_err(|e| CliError::usage(format!("malformed sequence file {}: {e}", path.display())))
    }
}

/// C-style `%.12e` formatting (two-digit signed exponent).
pub fn fmt_e12(x: f64) -> String {
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponential format");
    let (sign, digits) = match exp.strip_prefix('-') {
        Some(d) => ('-', d),
        None => ('+', exp),
    };
    format!("{mantissa}e{sign}{digits:0>2}")
}

/// Grid CSV: header plus one node per line, row-major in ε.
pub fn grid_to_csv(grid: &LandscapeGrid) -> String {
    let mut out = String::from("epsilon,delta,infidelity\n");
    for (i, &e) in grid.eps_axis.iter().enumerate() {
        for (j, &d) in grid.delta_axis.iter().enumerate() {
            out.push_str(&fmt_e12(e));
            out.push(',');
            out.push_str(&fmt_e12(d));
            out.push(',');
            out.push_str(&fmt_e12(grid.values[i][j]));
            out.push('\n');
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct PolylineFile {
    closed: bool,
    vertices: Vec<(f64, f64)>,
}

#[derive(Debug, Serialize)]
struct LevelContoursFile {
    level: f64,
    polylines: Vec<PolylineFile>,
}

#[derive(Debug, Serialize)]
struct ContourFile {
    schema_version: u32,
    levels: Vec<f64>,
    contours: Vec<LevelContoursFile>,
}

pub fn contours_to_json(set: &ContourSet) -> Result<String, CliError> {
    let file = ContourFile {
        schema_version: SCHEMA_VERSION,
        levels: set.levels.clone(),
        contours: set
            .levels
            .iter()
            .zip(set.polylines.iter())
            .map(|(&level, lines)| LevelContoursFile {
                level,
                polylines: lines
                    .iter()
                    .map(|l| PolylineFile { closed: l.closed, vertices: l.vertices.clone() })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file)
        .map_err(|e| CliError::runtime(format!("serializing contours: {e}")))
}

/// Write a file atomically: the content lands under a temporary name in
/// the same directory, then a rename makes it visible.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io_err = |e: io::Error| CliError::runtime(format!("writing {}: {e}", path.display()));
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::usage(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}
