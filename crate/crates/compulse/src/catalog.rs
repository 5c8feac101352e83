//! The named composite sequences, with provenance and self-checks.
//!
//! Every sequence ships with the derivative orders it is expected to
//! annihilate (`claimed_orders`, empty where the source makes no such
//! claim), the tabulated total pulse area where one is published, and a
//! one-line provenance note. Closed-form phase constants are recomputed
//! at machine precision; [`closed_form_check`] compares them against the
//! tabulated 4-decimal approximations and flags the known source
//! inconsistencies instead of silently papering over them.
//!
//! Conventions worth knowing before reading the tables:
//!
//! - The X-family entries are nominal π pulses (`ω = 1, τ = 1`) with the
//!   listed phases; CORPSE varies durations instead, BB1 and the
//!   variable-amplitude entries vary what their names say.
//! - Eleven- and thirteen-pulse phases are published to four decimals
//!   only; the catalog stores them polished to machine precision against
//!   their defining gate and derivative conditions (largest adjustment
//!   below 5e−5·π), so nominal-gate and derivative tests hold to solver
//!   tolerance rather than print precision.
//! - The universal five-pulse pair is stored with the constant phase
//!   shift applied (−2π/3 for U5a, +2π/3 for U5b) so that every stored
//!   record produces `−iX` exactly at nominal parameters.
//! - The Hadamard-family amplitudes are tabulated in half-period time
//!   units. Stored pulses use `τ = 1` (which reproduces the tabulated
//!   dynamics); the published areas count each segment as half a
//!   reference period, and [`SequenceRecord::nominal_area_over_pi`]
//!   follows that accounting.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jet::sequence_jet;
use crate::su2::{
    compose, infidelity, shift_all_phases, wrap_phase, CompositeSequence, ErrorPoint, GateKind,
    Pulse,
};

/// A catalog entry: the sequence plus its paper-trail metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceRecord {
    /// The sequence itself.
    pub sequence: CompositeSequence,
    /// Where the parameters come from and how they were derived.
    pub provenance: String,
    /// Derivative orders `(m, n)` expected to vanish, sorted by
    /// `(m+n, m)`; empty when the source claims none.
    pub claimed_orders: Vec<(usize, usize)>,
    /// Published total area `𝒜` in units of π, where given.
    pub tabulated_area_over_pi: Option<f64>,
    /// Per-pulse duration used by the source's area accounting when it
    /// differs from the stored pulse durations.
    pub area_accounting_tau: Option<f64>,
}

impl SequenceRecord {
    /// Total nominal area in units of π under the source's accounting.
    pub fn nominal_area_over_pi(&self) -> f64 {
        match self.area_accounting_tau {
            Some(tau) => self.sequence.pulses.iter().map(|p| p.omega * tau).sum(),
            None => self.sequence.area_over_pi(),
        }
    }
}

/// `ζ = arccos(−1/4)`, the BB1 phase unit.
pub fn bb1_zeta() -> f64 {
    (-0.25f64).acos()
}

/// `ξ = arccos((3 + √61)/16)`, the seven-pulse phase unit.
pub fn seven_pulse_xi() -> f64 {
    ((3.0 + 61.0f64.sqrt()) / 16.0).acos()
}

/// `ξ₁ = arctan √15` and `ξ₂ = arctan(√15/9)`, the nine-pulse units.
pub fn nine_pulse_xi() -> (f64, f64) {
    (15.0f64.sqrt().atan(), (15.0f64.sqrt() / 9.0).atan())
}

/// Eleven-pulse half phases in units of π, polished to machine precision
/// from the tabulated 4-decimal values against the conditions
/// `D₁,₀ = D₀,₁ = D₁,₁ = D₂,₀ = D₀,₂ = D₂,₁ = 0` (X11a) and the same set
/// with `D₁,₂` instead of `D₂,₁` (X11b).
const X11A_HALF: [f64; 6] = [
    0.553287963923767112,
    0.800890576275558486,
    0.709124578074796341,
    1.446378595393728930,
    0.680928960217859536,
    0.392144661094271263,
];
const X11B_HALF: [f64; 6] = [
    1.553287963923758010,
    0.800890576275548494,
    1.709124578074785680,
    1.446378595393718050,
    1.680928960217848540,
    0.392144661094260383,
];

/// Thirteen-pulse half phases in units of π, polished against all
/// conditions through `D₁,₂` and `D₂,₁`.
const X13A_HALF: [f64; 7] = [
    0.532481436989065249,
    0.507255851578396033,
    1.291533360855087850,
    0.444306828004031706,
    0.730195292688732511,
    0.480829162212123573,
    1.756363502523331290,
];
const X13B_HALF: [f64; 7] = [
    0.532481436989061918,
    1.507255851578392260,
    1.291533360855084300,
    1.444306828004027650,
    0.730195292688728292,
    1.480829162212119470,
    1.756363502523327070,
];

/// Build a symmetric π-pulse sequence from half phases given in units of
/// π. Phases are reduced into `[0, 2)` before the single multiplication
/// by π, so every stored phase is the correctly rounded product of a
/// π-unit value — the representation the sequence file format uses.
fn sym_pi(name: &str, half_over_pi: &[f64]) -> CompositeSequence {
    let half: Vec<f64> = half_over_pi.iter().map(|p| p.rem_euclid(2.0) * PI).collect();
    CompositeSequence::symmetric_pi(name, &half, GateKind::X)
        .expect("catalog symmetric sequences are well-formed")
}

fn var_amp(
    name: &str,
    omegas: &[f64],
    phases_over_pi: &[f64],
    tau: f64,
    target: GateKind,
) -> CompositeSequence {
    let pulses = omegas
        .iter()
        .zip(phases_over_pi.iter())
        .map(|(&w, &p)| Pulse::new(w, tau, p * PI).expect("catalog pulses are well-formed"))
        .collect();
    CompositeSequence::new(name, pulses, target, false)
        .expect("catalog sequences are well-formed")
}

fn record(
    sequence: CompositeSequence,
    provenance: &str,
    claimed: &[(usize, usize)],
    area: Option<f64>,
    area_tau: Option<f64>,
) -> SequenceRecord {
    SequenceRecord {
        sequence,
        provenance: provenance.to_string(),
        claimed_orders: claimed.to_vec(),
        tabulated_area_over_pi: area,
        area_accounting_tau: area_tau,
    }
}

const FIRST_ORDER: [(usize, usize); 3] = [(0, 1), (1, 0), (1, 1)];
const SECOND_ORDER: [(usize, usize); 5] = [(0, 1), (1, 0), (0, 2), (1, 1), (2, 0)];

/// All catalog names in lexicographic order.
pub const NAMES: [&str; 39] = [
    "B3d", "B3r", "B5", "BB1", "CORPSE", "G5", "H10", "H15", "H3", "H4", "H5", "H6", "H7", "H8",
    "U11a", "U11b", "U13a", "U13b", "U5a", "U5b", "U7a", "U7b", "U9a", "U9b", "X1", "X11a",
    "X11b", "X11c", "X13a", "X13b", "X5a", "X5b", "X5c", "X7a", "X7b", "X7c", "X9a", "X9b", "X9c",
];

fn build(name: &str) -> Option<SequenceRecord> {
    let xi = seven_pulse_xi();
    let (xi1, xi2) = nine_pulse_xi();
    let rec = match name {
        "X1" => record(
            sym_pi("X1", &[0.0]),
            "single resonant pi pulse, the uncompensated benchmark",
            &[],
            None,
            None,
        ),
        "CORPSE" => record(
            CompositeSequence::new(
                "CORPSE",
                vec![
                    Pulse::new(1.0, 7.0 / 3.0, 0.0).unwrap(),
                    Pulse::new(1.0, 5.0 / 3.0, PI).unwrap(),
                    Pulse::new(1.0, 1.0 / 3.0, 0.0).unwrap(),
                ],
                GateKind::X,
                false,
            )
            .unwrap(),
            "three-pulse benchmark with areas (7/3, 5/3, 1/3)pi and phases (0, 1, 0)pi; \
             compensates the detuning to first order",
            &[(0, 1)],
            None,
            None,
        ),
        "B3r" => record(
            sym_pi("B3r", &[1.0 / 3.0, 5.0 / 3.0]),
            "three-pulse benchmark robust to Rabi-frequency errors (SCROFULOUS family)",
            &[(1, 0)],
            None,
            None,
        ),
        "B3d" => record(
            sym_pi("B3d", &[2.0 / 3.0, 1.0 / 3.0]),
            "three-pulse benchmark robust to detuning errors",
            &[(0, 1), (1, 1)],
            None,
            None,
        ),
        "X5a" => record(
            sym_pi("X5a", &[2.0 / 3.0, -1.0 / 6.0, 1.0 / 3.0]),
            "analytic symmetric five-pulse solution of the first-order conditions",
            &FIRST_ORDER,
            None,
            None,
        ),
        "X5b" => record(
            sym_pi("X5b", &[2.0 / 3.0, 5.0 / 6.0, 1.0 / 3.0]),
            "analytic symmetric five-pulse solution of the first-order conditions \
             (center phase shifted by pi relative to X5a)",
            &FIRST_ORDER,
            None,
            None,
        ),
        "U5a" => record(
            sym_pi("U5a", &[4.0 / 3.0, 1.0 / 6.0, 5.0 / 3.0]),
            "universal five-pulse sequence, stored with the constant shift -2pi/3 applied \
             so the nominal propagator is -iX; coincides with the phase-negated X5a",
            &FIRST_ORDER,
            None,
            None,
        ),
        "U5b" => record(
            sym_pi("U5b", &[2.0 / 3.0, 5.0 / 6.0, 1.0 / 3.0]),
            "universal five-pulse sequence, stored with the constant shift +2pi/3 applied \
             so the nominal propagator is -iX; coincides with X5b",
            &FIRST_ORDER,
            None,
            None,
        ),
        "BB1" => {
            let zp = bb1_zeta() / PI;
            record(
                CompositeSequence::new(
                    "BB1",
                    [0.0, zp, 3.0 * zp, 3.0 * zp, zp]
                        .iter()
                        .map(|&p| Pulse::pi(p.rem_euclid(2.0) * PI))
                        .collect(),
                    GateKind::X,
                    false,
                )
                .unwrap(),
                "Wimperis broadband five-pulse sequence, zeta = arccos(-1/4); \
                 compensates the Rabi frequency to second order",
                &[(1, 0), (2, 0)],
                None,
                None,
            )
        }
        "G5" => record(
            sym_pi("G5", &[-0.432839, -0.11463, 0.636418]),
            "symmetric five-pulse amplitude-robust solution, tabulated decimals \
             (the published closed form for the first phase is inconsistent with them; \
             the decimals are authoritative here)",
            &[],
            None,
            None,
        ),
        "B5" => record(
            sym_pi("B5", &[4.0 / 5.0, 0.0, 2.0 / 5.0]),
            "five-pulse amplitude-robust sequence, phase-shifted by -4pi/5 from its \
             original form to produce -iX",
            &[(1, 0)],
            None,
            None,
        ),
        "U7a" => record(
            sym_pi("U7a", &[5.0 / 12.0, 1.0 / 2.0, 19.0 / 12.0, 0.0]),
            "universal seven-pulse sequence, phase-shifted to produce -iX",
            &[],
            None,
            None,
        ),
        "U7b" => record(
            sym_pi("U7b", &[7.0 / 12.0, 3.0 / 2.0, 17.0 / 12.0, 0.0]),
            "universal seven-pulse sequence, phase-shifted to produce -iX",
            &[],
            None,
            None,
        ),
        "X7a" => record(
            sym_pi(
                "X7a",
                &[
                    1.0 - xi / PI,
                    7.0 / 3.0 - 2.0 * xi / PI,
                    8.0 / 3.0 - 3.0 * xi / PI,
                    5.0 / 3.0 - 4.0 * xi / PI,
                ],
            ),
            "analytic symmetric seven-pulse solution: first-order conditions plus the \
             second-order amplitude condition, xi = arccos((3+sqrt(61))/16)",
            &[(0, 1), (1, 0), (1, 1), (2, 0)],
            None,
            None,
        ),
        "X7b" => record(
            sym_pi(
                "X7b",
                &[
                    2.0 - xi / PI,
                    7.0 / 3.0 - 2.0 * xi / PI,
                    5.0 / 3.0 - 3.0 * xi / PI,
                    5.0 / 3.0 - 4.0 * xi / PI,
                ],
            ),
            "analytic symmetric seven-pulse solution: first-order conditions plus the \
             second-order detuning condition; the center phase is 5pi/3 - 3xi, consistent \
             with the tabulated decimal (the published fraction 2pi/3 breaks the conditions)",
            &[(0, 1), (1, 0), (0, 2), (1, 1)],
            None,
            None,
        ),
        "U9a" => record(
            sym_pi("U9a", &[4.0 / 3.0, 35.0 / 24.0, 3.0 / 4.0, 35.0 / 24.0, 5.0 / 3.0]),
            "universal nine-pulse sequence, phase-shifted to produce -iX",
            &[],
            None,
            None,
        ),
        "U9b" => record(
            sym_pi("U9b", &[2.0 / 3.0, 37.0 / 24.0, 5.0 / 4.0, 37.0 / 24.0, 1.0 / 3.0]),
            "universal nine-pulse sequence, phase-shifted to produce -iX",
            &[],
            None,
            None,
        ),
        "X9a" => record(
            sym_pi(
                "X9a",
                &[
                    xi1 / PI + 1.0,
                    xi2 / PI,
                    2.0 * xi1 / PI,
                    5.0 * xi1 / PI - xi2 / PI,
                    4.0 * xi1 / PI,
                ],
            ),
            "analytic nine-pulse solution of all first- and second-order conditions, \
             xi1 = arctan(sqrt(15)), xi2 = arctan(sqrt(15)/9)",
            &SECOND_ORDER,
            None,
            None,
        ),
        "X9b" => record(
            sym_pi(
                "X9b",
                &[
                    xi1 / PI + 1.0,
                    xi2 / PI + 1.0,
                    2.0 * xi1 / PI,
                    5.0 * xi1 / PI - xi2 / PI - 1.0,
                    4.0 * xi1 / PI,
                ],
            ),
            "analytic nine-pulse solution of all first- and second-order conditions \
             (second and fourth phases shifted by pi relative to X9a)",
            &SECOND_ORDER,
            None,
            None,
        ),
        "U11a" => record(
            sym_pi("U11a", &[5.0 / 12.0, 4.0 / 3.0, 5.0 / 4.0, 1.0 / 3.0, 1.0 / 2.0, 0.0]),
            "universal eleven-pulse sequence, phase-shifted to produce -iX",
            &[],
            None,
            None,
        ),
        "U11b" => record(
            sym_pi("U11b", &[5.0 / 12.0, 1.0 / 3.0, 5.0 / 4.0, 4.0 / 3.0, 1.0 / 2.0, 1.0]),
            "universal eleven-pulse sequence, phase-shifted to produce -iX",
            &[],
            None,
            None,
        ),
        "X11a" => record(
            sym_pi("X11a", &X11A_HALF),
            "numerical eleven-pulse solution canceling the first- and second-order \
             conditions plus D[2,1]; tabulated 4-decimal phases polished to machine \
             precision against those conditions",
            &[(0, 1), (1, 0), (0, 2), (1, 1), (2, 0), (2, 1)],
            None,
            None,
        ),
        "X11b" => record(
            sym_pi("X11b", &X11B_HALF),
            "numerical eleven-pulse solution canceling the first- and second-order \
             conditions plus D[1,2]; tabulated 4-decimal phases polished to machine \
             precision against those conditions",
            &[(0, 1), (1, 0), (0, 2), (1, 1), (2, 0), (1, 2)],
            None,
            None,
        ),
        "U13a" => record(
            sym_pi(
                "U13a",
                &[1.0 / 2.0, 7.0 / 8.0, 9.0 / 4.0, 23.0 / 24.0, 5.0 / 6.0, 49.0 / 24.0, 7.0 / 12.0],
            ),
            "universal thirteen-pulse sequence, phase-shifted to produce -iX",
            &[],
            None,
            None,
        ),
        "U13b" => record(
            sym_pi(
                "U13b",
                &[1.0 / 2.0, 15.0 / 8.0, 9.0 / 4.0, 47.0 / 24.0, 5.0 / 6.0, 25.0 / 24.0, 7.0 / 12.0],
            ),
            "universal thirteen-pulse sequence, phase-shifted to produce -iX",
            &[],
            None,
            None,
        ),
        "X13a" => record(
            sym_pi("X13a", &X13A_HALF),
            "numerical thirteen-pulse solution canceling every condition through \
             D[1,2] and D[2,1]; tabulated phases polished to machine precision",
            &[(0, 1), (1, 0), (0, 2), (1, 1), (2, 0), (1, 2), (2, 1)],
            None,
            None,
        ),
        "X13b" => record(
            sym_pi("X13b", &X13B_HALF),
            "numerical thirteen-pulse solution canceling every condition through \
             D[1,2] and D[2,1]; tabulated phases polished to machine precision",
            &[(0, 1), (1, 0), (0, 2), (1, 1), (2, 0), (1, 2), (2, 1)],
            None,
            None,
        ),
        "X5c" => record(
            var_amp(
                "X5c",
                &[0.9974, 2.0, 0.9985, 2.0, 0.9974],
                &[0.6605, 0.9741, 0.3164, 0.9741, 0.6605],
                1.0,
                GateKind::X,
            ),
            "variable-amplitude five-pulse solution minimizing the mean infidelity \
             over the calibration box",
            &[],
            Some(6.993),
            None,
        ),
        "X7c" => record(
            var_amp(
                "X7c",
                &[0.9947, 0.8532, 1.1369, 0.9909, 1.1412, 0.853, 0.9884],
                &[0.3645, 0.1215, 0.1182, 0.7512, 0.1301, 0.1446, 0.4025],
                1.0,
                GateKind::X,
            ),
            "variable-amplitude seven-pulse solution minimizing the mean infidelity \
             over the calibration box",
            &[],
            Some(6.958),
            None,
        ),
        "X9c" => record(
            var_amp(
                "X9c",
                &[0.9808, 1.9845, 0.9821, 1.987, 0.986, 1.978, 0.9822, 2.0, 0.9617],
                &[1.7068, 1.2315, 1.8541, 1.1962, 0.6935, 1.1553, 0.4903, 1.1095, 0.9444],
                1.0,
                GateKind::X,
            ),
            "variable-amplitude nine-pulse solution minimizing the mean infidelity \
             over the calibration box",
            &[],
            Some(12.842),
            None,
        ),
        "X11c" => record(
            var_amp(
                "X11c",
                &[
                    0.9328, 0.978, 1.0012, 1.0091, 0.876, 1.1016, 0.9973, 1.0054, 1.0225, 0.9976,
                    0.9274,
                ],
                &[
                    0.0933, 1.0372, 1.8939, 1.0681, 0.6867, 0.6947, 1.1986, 0.1885, 1.6011,
                    1.2569, 0.7698,
                ],
                1.0,
                GateKind::X,
            ),
            "variable-amplitude eleven-pulse solution minimizing the mean infidelity \
             over the calibration box",
            &[],
            Some(10.849),
            None,
        ),
        "H3" => hadamard_record("H3", &[0.986, 1.1996, 1.7027], &[0.0, 0.0, 1.0], 1.944, ""),
        "H4" => hadamard_record(
            "H4",
            &[1.48, 0.9629, 1.0565, 0.7785],
            &[0.1691, 0.7314, 0.2464, 0.6099],
            2.139,
            "",
        ),
        "H5" => hadamard_record(
            "H5",
            &[1.2821, 1.9916, 0.9944, 1.9924, 1.286],
            &[1.2276, 0.1928, 1.3804, 0.1911, 1.2256],
            3.773,
            "",
        ),
        "H6" => hadamard_record(
            "H6",
            &[0.5102, 0.8294, 0.927, 1.9335, 0.9121, 0.3089],
            &[1.309, 1.0795, 0.4598, 1.2186, 0.4975, 1.3794],
            2.710,
            "",
        ),
        "H7" => hadamard_record(
            "H7",
            &[1.3064, 1.0895, 1.0043, 0.999, 2.0, 0.9574, 0.7351],
            &[0.2205, 0.2867, 0.8073, 1.8094, 1.2824, 1.7885, 0.6264],
            4.046,
            "; source-ambiguous: the tabulated phase row has a malformed bracket, \
             the seven values are taken in printed order",
        ),
        "H8" => hadamard_record(
            "H8",
            &[1.3315, 0.7078, 1.6136, 0.9083, 1.3398, 0.9064, 1.7474, 1.1608],
            &[0.8179, 0.6373, 0.0913, 0.768, 0.1225, 0.2334, 0.9024, 0.1902],
            4.858,
            "",
        ),
        "H10" => hadamard_record(
            "H10",
            &[0.0035, 1.5479, 0.9249, 1.409, 0.3187, 0.3829, 1.4208, 0.9399, 1.124, 0.9641],
            &[0.2848, 1.0292, 1.6984, 0.9726, 1.036, 0.1623, 1.9968, 0.6467, 1.9738, 1.9592],
            4.518,
            "",
        ),
        "H15" => hadamard_record(
            "H15",
            &[
                0.1612, 0.9629, 0.9401, 0.7359, 0.779, 0.7857, 0.8733, 0.6415, 1.1298, 0.8665,
                0.5438, 0.9953, 0.5926, 0.7286, 0.2502,
            ],
            &[
                0.7747, 0.6769, 1.7227, 0.0297, 0.0113, 1.2504, 1.8338, 0.0691, 1.71, 0.726,
                0.9383, 1.0377, 0.2238, 0.633, 0.9892,
            ],
            5.493,
            "",
        ),
        _ => return None,
    };
    Some(rec)
}

fn hadamard_record(
    name: &str,
    omegas: &[f64],
    phases_over_pi: &[f64],
    area: f64,
    note: &str,
) -> SequenceRecord {
    record(
        var_amp(name, omegas, phases_over_pi, 1.0, GateKind::Rx90),
        &format!(
            "variable-amplitude sequence for Rx(pi/2) minimizing the mean infidelity over \
             the calibration box; amplitudes tabulated in half-period time units{note}"
        ),
        &[],
        Some(area),
        // the source counts each segment as half a reference period
        Some(0.5),
    )
}

/// Look up a sequence by name (case-insensitive).
pub fn get(name: &str) -> Result<SequenceRecord> {
    let canonical = NAMES
        .iter()
        .find(|n| n.eq_ignore_ascii_case(name))
        .copied();
    match canonical.and_then(build) {
        Some(rec) => Ok(rec),
        None => Err(Error::UnknownSequence {
            name: name.to_string(),
            near: near_matches(name),
        }),
    }
}

/// All catalog names, optionally filtering by target gate, in
/// lexicographic order.
pub fn list(filter: Option<GateKind>) -> Vec<String> {
    NAMES
        .iter()
        .filter(|n| match filter {
            None => true,
            Some(kind) => build(n).map(|r| r.sequence.target == kind).unwrap_or(false),
        })
        .map(|n| n.to_string())
        .collect()
}

fn near_matches(name: &str) -> Vec<String> {
    let mut scored: Vec<(usize, &str)> = NAMES
        .iter()
        .map(|n| (edit_distance(&name.to_ascii_lowercase(), &n.to_ascii_lowercase()), *n))
        .filter(|&(d, _)| d <= 2)
        .collect();
    scored.sort();
    scored.into_iter().take(3).map(|(_, n)| n.to_string()).collect()
}

fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut cur = vec![i + 1];
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur.push(sub.min(prev[j + 1] + 1).min(cur[j] + 1));
        }
        prev = cur;
    }
    prev[b.len()]
}

/// One row of the closed-form report.
#[derive(Debug, Clone)]
pub struct CheckRow {
    /// What is being compared.
    pub label: String,
    /// Tabulated value.
    pub expected: f64,
    /// Recomputed value.
    pub actual: f64,
    /// Comparison tolerance.
    pub tolerance: f64,
    /// Whether `|expected − actual| ≤ tolerance`.
    pub pass: bool,
    /// Explanation for rows that document a known source inconsistency.
    pub note: Option<String>,
}

/// Result of recomputing the closed-form constants and tabulated areas.
#[derive(Debug, Clone)]
pub struct ClosedFormReport {
    /// All comparison rows.
    pub rows: Vec<CheckRow>,
}

impl ClosedFormReport {
    /// True when every row without an explanatory note passes.
    pub fn all_unnoted_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass || r.note.is_some())
    }
}

fn row(rows: &mut Vec<CheckRow>, label: impl Into<String>, expected: f64, actual: f64, tol: f64) {
    rows.push(CheckRow {
        label: label.into(),
        expected,
        actual,
        tolerance: tol,
        pass: (expected - actual).abs() <= tol,
        note: None,
    });
}

/// Recompute every closed-form constant and derived phase, compare with
/// the tabulated 4-decimal values, check the five-pulse center-phase
/// identity and the universal-pair phase-shift correspondence, and check
/// all published areas.
pub fn closed_form_check() -> ClosedFormReport {
    let mut rows = Vec::new();
    let tol = 5e-4;

    let xi = seven_pulse_xi();
    row(&mut rows, "xi/pi", 0.2639, xi / PI, tol);
    let x7a = [1.0 - xi / PI, 7.0 / 3.0 - 2.0 * xi / PI, 8.0 / 3.0 - 3.0 * xi / PI, 5.0 / 3.0 - 4.0 * xi / PI];
    for (k, (tab, act)) in [0.7361, 1.8056, 1.8751, 0.6112].iter().zip(x7a).enumerate() {
        row(&mut rows, format!("X7a phi{}/pi", k + 1), *tab, act, tol);
    }
    let x7b = [2.0 - xi / PI, 7.0 / 3.0 - 2.0 * xi / PI, 5.0 / 3.0 - 3.0 * xi / PI, 5.0 / 3.0 - 4.0 * xi / PI];
    for (k, (tab, act)) in [1.7361, 1.8056, 0.8751, 0.6112].iter().zip(x7b).enumerate() {
        let mut r = CheckRow {
            label: format!("X7b phi{}/pi", k + 1),
            expected: *tab,
            actual: act,
            tolerance: tol,
            pass: (tab - act).abs() <= tol,
            note: None,
        };
        if k == 2 {
            r.note = Some(
                "recomputed from the corrected center phase 5pi/3 - 3xi; the published \
                 fraction 2pi/3 - 3xi gives -0.1249pi and breaks the derivative conditions"
                    .into(),
            );
        }
        rows.push(r);
    }

    let (xi1, xi2) = nine_pulse_xi();
    let x9a = [xi1 / PI + 1.0, xi2 / PI, 2.0 * xi1 / PI, 5.0 * xi1 / PI - xi2 / PI, 4.0 * xi1 / PI];
    for (k, (tab, act)) in [1.4196, 0.1294, 0.8391, 1.9685, 1.6783].iter().zip(x9a).enumerate() {
        row(&mut rows, format!("X9a phi{}/pi", k + 1), *tab, act, tol);
    }
    let x9b = [xi1 / PI + 1.0, xi2 / PI + 1.0, 2.0 * xi1 / PI, 5.0 * xi1 / PI - xi2 / PI - 1.0, 4.0 * xi1 / PI];
    for (k, (tab, act)) in [1.4196, 1.1294, 0.8391, 0.9685, 1.6783].iter().zip(x9b).enumerate() {
        row(&mut rows, format!("X9b phi{}/pi", k + 1), *tab, act, tol);
    }

    // five-pulse center-phase identity phi3 = 2 phi2 - 2 phi1 (mod 2pi)
    for name in ["X5a", "X5b", "G5"] {
        let seq = get(name).expect("catalog name").sequence;
        let (p1, p2, p3) = (seq.pulses[0].phase, seq.pulses[1].phase, seq.pulses[2].phase);
        let derived = wrap_phase(2.0 * p2 - 2.0 * p1);
        row(
            &mut rows,
            format!("{name} center-phase identity (radians, mod 2pi)"),
            p3,
            derived,
            1e-9,
        );
    }

    // G5 closed forms versus the tabulated decimals
    let g5_phi2 = ((3.0 * 10.0f64.sqrt() - 2.0) / 8.0).asin() / PI - 0.5;
    row(&mut rows, "G5 phi2/pi from arcsin((3*sqrt(10)-2)/8) - pi/2", -0.11463, g5_phi2, tol);
    let g5_phi1 = (0.5 - (5.0f64 / 8.0).sqrt()).asin() / PI;
    rows.push(CheckRow {
        label: "G5 phi1/pi from arcsin(1/2 - sqrt(5/8))".into(),
        expected: -0.432839,
        actual: g5_phi1,
        tolerance: tol,
        pass: (g5_phi1 - (-0.432839)).abs() <= tol,
        note: Some(
            "the published closed form evaluates to -0.0939pi, far from the tabulated \
             -0.4328pi; the tabulated decimals satisfy the gate identity and the \
             amplitude-robustness conditions to print precision, so they are authoritative"
                .into(),
        ),
    });

    // universal five-pulse correspondence under the published shifts
    let (u5a_raw, u5b_raw) = universal_five_unshifted();
    let x5a = get("X5a").expect("catalog name").sequence;
    let x5b = get("X5b").expect("catalog name").sequence;
    let shifted_b = shift_all_phases(&u5b_raw, 2.0 * PI / 3.0);
    row(
        &mut rows,
        "max |shift(U5b, +2pi/3) - X5b| phase deviation (radians, mod 2pi)",
        0.0,
        max_phase_deviation(&shifted_b, &x5b),
        1e-12,
    );
    let shifted_a = shift_all_phases(&u5a_raw, -2.0 * PI / 3.0);
    let negated_x5a = CompositeSequence::symmetric_pi(
        "-X5a",
        &x5a.pulses[..3].iter().map(|p| -p.phase).collect::<Vec<_>>(),
        GateKind::X,
    )
    .expect("negated X5a is well-formed");
    rows.push(CheckRow {
        label: "max |shift(U5a, -2pi/3) - negated X5a| phase deviation (radians, mod 2pi)".into(),
        expected: 0.0,
        actual: max_phase_deviation(&shifted_a, &negated_x5a),
        tolerance: 1e-12,
        pass: max_phase_deviation(&shifted_a, &negated_x5a) <= 1e-12,
        note: Some(
            "the shift lands exactly on the phase-negated X5a, the redundant partner \
             that generates the same infidelity landscape; it is not equal to X5a \
             phase-by-phase"
                .into(),
        ),
    });

    // published areas
    for name in NAMES {
        let rec = get(name).expect("catalog name");
        if let Some(area) = rec.tabulated_area_over_pi {
            row(
                &mut rows,
                format!("{name} area/pi"),
                area,
                rec.nominal_area_over_pi(),
                5e-3,
            );
        }
    }

    ClosedFormReport { rows }
}

/// Largest per-pulse phase deviation between two sequences, mod 2π.
fn max_phase_deviation(a: &CompositeSequence, b: &CompositeSequence) -> f64 {
    a.pulses
        .iter()
        .zip(b.pulses.iter())
        .map(|(p, q)| {
            let d = (p.phase - q.phase).abs() % (2.0 * PI);
            d.min(2.0 * PI - d)
        })
        .fold(0.0, f64::max)
}

/// The original (unshifted) universal five-pulse sequences. Their nominal
/// propagator is `−iX` only up to the off-diagonal phases `e^{±iπ/6}`,
/// which the constant shifts `∓2π/3` remove.
pub fn universal_five_unshifted() -> (CompositeSequence, CompositeSequence) {
    (
        sym_pi("U5a-unshifted", &[0.0, 5.0 / 6.0, 1.0 / 3.0]),
        sym_pi("U5b-unshifted", &[0.0, 1.0 / 6.0, 5.0 / 3.0]),
    )
}

/// The consistent first-order Rabi bracket for the symmetric five-pulse
/// family with the center-phase identity applied:
/// `D₁,₀𝒰₁₁ = −(π/2)·[1 + 2cos φ₁ + 2cos(2φ₁ − φ₂)]`.
pub fn five_pulse_rabi_bracket(phi1: f64, phi2: f64) -> f64 {
    1.0 + 2.0 * phi1.cos() + 2.0 * (2.0 * phi1 - phi2).cos()
}

/// The same bracket as published, with `−2cos φ₁`; it cannot vanish
/// together with the detuning bracket because the two sum to 2.
pub fn five_pulse_rabi_bracket_published(phi1: f64, phi2: f64) -> f64 {
    1.0 - 2.0 * phi1.cos() + 2.0 * (2.0 * phi1 - phi2).cos()
}

/// The first-order detuning bracket, `D₀,₁𝒰₁₁ = i·[1 + 2cos φ₁ −
/// 2cos(2φ₁ − φ₂)]` (correct as published).
pub fn five_pulse_detuning_bracket(phi1: f64, phi2: f64) -> f64 {
    1.0 + 2.0 * phi1.cos() - 2.0 * (2.0 * phi1 - phi2).cos()
}

/// Numerical audit of the five-pulse first-order slope formulas.
#[derive(Debug, Clone)]
pub struct BracketCheck {
    /// Max deviation of (published Rabi bracket + detuning bracket) from
    /// 2 over the sample set; the two cannot vanish simultaneously.
    pub published_sum_max_dev: f64,
    /// Published Rabi bracket at the X5a phases (2, not 0).
    pub published_rabi_at_x5a: f64,
    /// Consistent Rabi bracket at the X5a phases (vanishes).
    pub consistent_rabi_at_x5a: f64,
    /// Max error of `−(π/2)·consistent bracket` against the jet-engine
    /// `D₁,₀𝒰₁₁` over the sample set.
    pub rabi_jet_max_err: f64,
    /// Max error of the detuning bracket against the jet-engine
    /// `D₀,₁𝒰₁₁/i` over the sample set.
    pub detuning_jet_max_err: f64,
}

/// Check the five-pulse slope formulas against the jet engine on a
/// deterministic sample of phase pairs. The jet engine is ground truth:
/// it shows the published Rabi bracket carries a sign typo on the
/// `2cos φ₁` term, while the detuning bracket is correct as published.
pub fn five_pulse_bracket_check() -> BracketCheck {
    let samples: Vec<(f64, f64)> = (0..12)
        .map(|k| (0.37 + 0.52 * k as f64, 1.11 + 0.83 * k as f64))
        .collect();
    let mut sum_dev = 0.0f64;
    let mut rabi_err = 0.0f64;
    let mut det_err = 0.0f64;
    for &(p1, p2) in &samples {
        let published = five_pulse_rabi_bracket_published(p1, p2);
        let det = five_pulse_detuning_bracket(p1, p2);
        sum_dev = sum_dev.max((published + det - 2.0).abs());
        let half = [p1, p2, 2.0 * p2 - 2.0 * p1];
        let seq = CompositeSequence::symmetric_pi("sample", &half, GateKind::X)
            .expect("well-formed sample sequence");
        let jet = sequence_jet(&seq, 1);
        let d10 = jet.a.derivative(1, 0).expect("order within truncation");
        let d01 = jet.a.derivative(0, 1).expect("order within truncation");
        rabi_err = rabi_err
            .max((d10.re - (-PI / 2.0) * five_pulse_rabi_bracket(p1, p2)).abs() + d10.im.abs());
        det_err = det_err.max((d01.im - det).abs() + d01.re.abs());
    }
    let x5a = (2.0 * PI / 3.0, -PI / 6.0);
    BracketCheck {
        published_sum_max_dev: sum_dev,
        published_rabi_at_x5a: five_pulse_rabi_bracket_published(x5a.0, x5a.1),
        consistent_rabi_at_x5a: five_pulse_rabi_bracket(x5a.0, x5a.1),
        rabi_jet_max_err: rabi_err,
        detuning_jet_max_err: det_err,
    }
}

/// Origin infidelity of a record against its own target.
pub fn origin_infidelity(rec: &SequenceRecord) -> f64 {
    let u = compose(&rec.sequence, &ErrorPoint::ORIGIN);
    infidelity(&u.to_gate(), &rec.sequence.target_matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::sequence_derivative;

    #[test]
    fn x5a_phases_match_the_table() {
        let rec = get("X5a").unwrap();
        let phases: Vec<f64> = rec.sequence.pulses.iter().map(|p| p.phase / PI).collect();
        let expected = [2.0 / 3.0, 11.0 / 6.0, 1.0 / 3.0, 11.0 / 6.0, 2.0 / 3.0];
        for (a, b) in phases.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(rec.sequence.symmetric);
    }

    #[test]
    fn bb1_uses_the_arccos_phase_unit() {
        let rec = get("BB1").unwrap();
        let z = bb1_zeta();
        let phases: Vec<f64> = rec.sequence.pulses.iter().map(|p| p.phase).collect();
        for (a, b) in phases.iter().zip([0.0, z, 3.0 * z, 3.0 * z, z]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn h3_record_matches_the_table() {
        let rec = get("H3").unwrap();
        let omegas: Vec<f64> = rec.sequence.pulses.iter().map(|p| p.omega).collect();
        assert_eq!(omegas, vec![0.986, 1.1996, 1.7027]);
        assert_eq!(rec.sequence.target, GateKind::Rx90);
        assert!((rec.nominal_area_over_pi() - 1.944).abs() < 5e-3);
    }

    #[test]
    fn lookup_is_case_insensitive_and_idempotent() {
        let a = get("x5a").unwrap();
        let b = get("X5A").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_name_reports_near_matches() {
        match get("X5d") {
            Err(Error::UnknownSequence { near, .. }) => {
                assert!(near.contains(&"X5a".to_string()), "near = {near:?}");
            }
            other => panic!("expected UnknownSequence, got {other:?}"),
        }
    }

    #[test]
    fn list_filters_by_target() {
        let all = list(None);
        assert_eq!(all.len(), NAMES.len());
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        let x = list(Some(GateKind::X));
        assert!(x.contains(&"X5a".to_string()));
        assert!(x.contains(&"U13b".to_string()));
        assert!(x.contains(&"CORPSE".to_string()));
        assert!(!x.contains(&"H3".to_string()));
        let h = list(Some(GateKind::Rx90));
        assert_eq!(h, vec!["H10", "H15", "H3", "H4", "H5", "H6", "H7", "H8"]);
    }

    #[test]
    fn analytic_records_hit_their_gate_exactly() {
        for name in NAMES {
            let rec = get(name).unwrap();
            let limit = if rec.tabulated_area_over_pi.is_some() { 1e-2 } else { 1e-12 };
            let infid = origin_infidelity(&rec);
            assert!(infid < limit, "{name}: origin infidelity {infid:.3e} ≥ {limit:.0e}");
        }
    }

    #[test]
    fn claimed_orders_vanish() {
        for name in NAMES {
            let rec = get(name).unwrap();
            for &(m, n) in &rec.claimed_orders {
                let norm = sequence_derivative(&rec.sequence, m, n).unwrap().frobenius_norm();
                assert!(norm < 1e-9, "{name}: D[{m},{n}] = {norm:.3e}");
            }
        }
    }

    #[test]
    fn claimed_orders_are_sorted_and_nontrivial() {
        for name in NAMES {
            let rec = get(name).unwrap();
            assert!(rec.claimed_orders.iter().all(|&(m, n)| m + n >= 1), "{name}");
            let mut sorted = rec.claimed_orders.clone();
            sorted.sort_by_key(|&(m, n)| (m + n, m));
            assert_eq!(sorted, rec.claimed_orders, "{name}");
        }
    }

    #[test]
    fn tabulated_areas_match() {
        for name in NAMES {
            let rec = get(name).unwrap();
            if let Some(area) = rec.tabulated_area_over_pi {
                let actual = rec.nominal_area_over_pi();
                assert!((actual - area).abs() < 5e-3, "{name}: {actual} vs {area}");
            }
        }
    }

    #[test]
    fn polished_phases_stay_within_print_precision() {
        for (name, printed) in [
            ("X11a", vec![0.5533, 0.8009, 0.7091, 1.4464, 0.6809, 0.3921]),
            ("X11b", vec![1.5533, 0.8009, 1.7091, 1.4464, 1.6809, 0.3921]),
            ("X13a", vec![0.5325, 0.5073, 1.2915, 0.4443, 0.7302, 0.4808, 1.7564]),
            ("X13b", vec![0.5325, 1.5073, 1.2915, 1.4443, 0.7302, 1.4808, 1.7564]),
        ] {
            let rec = get(name).unwrap();
            for (pulse, tab) in rec.sequence.pulses.iter().zip(printed.iter()) {
                assert!(
                    (pulse.phase / PI - tab).abs() < 1.5e-4,
                    "{name}: {} vs {tab}",
                    pulse.phase / PI
                );
            }
        }
    }

    #[test]
    fn closed_form_report_passes_where_expected() {
        let report = closed_form_check();
        assert!(report.all_unnoted_pass(), "rows: {:#?}", report.rows);
        // the G5 phi1 inconsistency must be flagged, not hidden
        let flagged = report
            .rows
            .iter()
            .find(|r| r.label.contains("G5 phi1"))
            .expect("G5 phi1 row present");
        assert!(!flagged.pass && flagged.note.is_some());
    }

    #[test]
    fn bracket_check_pins_the_sign_variant() {
        let check = five_pulse_bracket_check();
        assert!(check.published_sum_max_dev < 1e-12);
        assert!((check.published_rabi_at_x5a - 2.0).abs() < 1e-12);
        assert!(check.consistent_rabi_at_x5a.abs() < 1e-12);
        assert!(check.rabi_jet_max_err < 1e-9);
        assert!(check.detuning_jet_max_err < 1e-9);
    }

    #[test]
    fn u5b_coincides_with_x5b_after_the_shift() {
        let u5b = get("U5b").unwrap().sequence;
        let x5b = get("X5b").unwrap().sequence;
        assert!(max_phase_deviation(&u5b, &x5b) < 1e-12);
    }
}
