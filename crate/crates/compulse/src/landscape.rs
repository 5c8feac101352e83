//! Infidelity fields over `(ε, δ)` boxes, contour extraction and scalar
//! robustness metrics.
//!
//! The landscape of a sequence is the gate infidelity `1 − F` sampled on
//! a uniform grid. Contours at the usual display levels (1e−4 innermost
//! to 1e−1 outermost) are traced with marching squares and linear edge
//! interpolation; the robustness window of a sequence is summarized by
//! the fraction of grid nodes below a level.
//!
//! Grids store raw infidelity; logarithmic color or level handling is the
//! consumer's concern.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::su2::{
    axis_samples, compose, infidelity, CompositeSequence, ErrorBox, ErrorPoint, GateMatrix,
};

/// A sampled infidelity field; `values[i][j]` belongs to
/// `(eps_axis[i], delta_axis[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeGrid {
    /// Strictly increasing ε sample values.
    pub eps_axis: Vec<f64>,
    /// Strictly increasing δ sample values.
    pub delta_axis: Vec<f64>,
    /// Infidelity per node, row = ε index, column = δ index; all values
    /// lie in `[0, 2/3]`.
    pub values: Vec<Vec<f64>>,
}

impl LandscapeGrid {
    /// Validate axes and matrix dimensions.
    pub fn new(eps_axis: Vec<f64>, delta_axis: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        for axis in [&eps_axis, &delta_axis] {
            if axis.len() < 2 || axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid("axis", "axes must be strictly increasing, length ≥ 2"));
            }
        }
        if values.len() != eps_axis.len() || values.iter().any(|row| row.len() != delta_axis.len()) {
            return Err(Error::invalid("values", "matrix dimensions must match the axes"));
        }
        if values.iter().flatten().any(|&v| !(0.0..=2.0 / 3.0 + 1e-12).contains(&v)) {
            return Err(Error::invalid("values", "infidelity values must lie in [0, 2/3]"));
        }
        Ok(LandscapeGrid { eps_axis, delta_axis, values })
    }
}

/// Evaluate the infidelity of a sequence against a target on a uniform
/// grid over `bx` (endpoints included). Nodes are evaluated in parallel;
/// output placement is by index, so the result does not depend on the
/// schedule.
pub fn eval_grid(
    s: &CompositeSequence,
    g: &GateMatrix,
    bx: &ErrorBox,
    resolution: (usize, usize),
) -> Result<LandscapeGrid> {
    let (ne, nd) = resolution;
    if ne < 2 || nd < 2 {
        return Err(Error::invalid("resolution", "need at least 2×2 nodes"));
    }
    if bx.eps.0 >= bx.eps.1 || bx.delta.0 >= bx.delta.1 {
        return Err(Error::invalid("box", "landscape box must have positive extent on both axes"));
    }
    let eps_axis = axis_samples(bx.eps.0, bx.eps.1, ne);
    let delta_axis = axis_samples(bx.delta.0, bx.delta.1, nd);
    let values: Vec<Vec<f64>> = eps_axis
        .par_iter()
        .map(|&e| {
            delta_axis
                .iter()
                .map(|&d| {
                    let v =
                        infidelity(&compose(s, &ErrorPoint { epsilon: e, delta: d }).to_gate(), g);
                    // rounding can push an exact gate a few ulp past F = 1
                    v.clamp(0.0, 2.0 / 3.0)
                })
                .collect()
        })
        .collect();
    LandscapeGrid::new(eps_axis, delta_axis, values)
}

/// Fraction of grid nodes with infidelity strictly below `level`.
pub fn robust_fraction(grid: &LandscapeGrid, level: f64) -> f64 {
    let total = grid.eps_axis.len() * grid.delta_axis.len();
    let below = grid.values.iter().flatten().filter(|&&v| v < level).count();
    below as f64 / total as f64
}

/// A chain of contour vertices in `(ε, δ)` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    /// Vertices in traversal order. For closed loops the first vertex is
    /// not repeated at the end.
    pub vertices: Vec<(f64, f64)>,
    /// Whether the chain closes onto itself.
    pub closed: bool,
}

/// Iso-infidelity contours of a grid at a list of levels.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourSet {
    /// The levels, in the order requested.
    pub levels: Vec<f64>,
    /// One list of polylines per level.
    pub polylines: Vec<Vec<Polyline>>,
}

/// Identity of a grid edge carrying a contour vertex. `Eps` edges connect
/// `(i, j)`–`(i+1, j)`, `Delta` edges connect `(i, j)`–`(i, j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeKey {
    Eps(usize, usize),
    Delta(usize, usize),
}

/// Trace iso-level contours with marching squares.
///
/// Cells with all four corners on one side produce nothing; saddle cells
/// are disambiguated by the cell-center average. Segments are chained
/// into polylines by shared grid edges and closed where loops exist.
/// A level outside the value range simply yields no polylines.
pub fn contours(grid: &LandscapeGrid, levels: &[f64]) -> Result<ContourSet> {
    if levels.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
        return Err(Error::invalid("levels", "contour levels must be positive"));
    }
    let polylines = levels.iter().map(|&l| trace_level(grid, l)).collect();
    Ok(ContourSet { levels: levels.to_vec(), polylines })
}

fn trace_level(grid: &LandscapeGrid, level: f64) -> Vec<Polyline> {
    use std::collections::HashMap;

    let ne = grid.eps_axis.len();
    let nd = grid.delta_axis.len();
    let above = |i: usize, j: usize| grid.values[i][j] > level;

    // interpolated crossing point on an edge
    let vertex = |key: EdgeKey| -> (f64, f64) {
        match key {
            EdgeKey::Eps(i, j) => {
                let (v0, v1) = (grid.values[i][j], grid.values[i + 1][j]);
                let t = (level - v0) / (v1 - v0);
                let e = grid.eps_axis[i] + t * (grid.eps_axis[i + 1] - grid.eps_axis[i]);
                (e, grid.delta_axis[j])
            }
            EdgeKey::Delta(i, j) => {
                let (v0, v1) = (grid.values[i][j], grid.values[i][j + 1]);
                let t = (level - v0) / (v1 - v0);
                let d = grid.delta_axis[j] + t * (grid.delta_axis[j + 1] - grid.delta_axis[j]);
                (grid.eps_axis[i], d)
            }
        }
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for i in 0..ne - 1 {
        for j in 0..nd - 1 {
            // corners counter-clockwise from (i, j); edge k sits between
            // corner k and corner k+1
            let corner = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let edges = [
                EdgeKey::Eps(i, j),
                EdgeKey::Delta(i + 1, j),
                EdgeKey::Eps(i, j + 1),
                EdgeKey::Delta(i, j),
            ];
            let state: Vec<bool> = corner.iter().map(|&(a, b)| above(a, b)).collect();
            let crossing: Vec<usize> =
                (0..4).filter(|&k| state[k] != state[(k + 1) % 4]).collect();
            match crossing.len() {
                0 => {}
                2 => segments.push((edges[crossing[0]], edges[crossing[1]])),
                4 => {
                    // saddle: decide by the center average which diagonal
                    // pockets the contour wraps around
                    let center = (grid.values[i][j]
                        + grid.values[i + 1][j]
                        + grid.values[i + 1][j + 1]
                        + grid.values[i][j + 1])
                        / 4.0;
                    if (center > level) == state[0] {
                        // pockets at corners 1 and 3
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        // pockets at corners 0 and 2
                        segments.push((edges[3], edges[0]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => unreachable!("a cell boundary changes state an even number of times"),
            }
        }
    }

    // chain segments into polylines via shared edge keys
    let mut adjacency: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (idx, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(idx);
        adjacency.entry(*b).or_default().push(idx);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    for first in 0..segments.len() {
        if used[first] {
            continue;
        }
        used[first] = true;
        let (start, end) = segments[first];
        let mut chain = vec![start, end];
        // extend forward from `end`, then backward from `start`
        for _dir in 0..2 {
            loop {
                let tip = *chain.last().unwrap();
                let next = adjacency
                    .get(&tip)
                    .and_then(|c| c.iter().copied().find(|&s| !used[s]));
                match next {
                    Some(s) => {
                        used[s] = true;
                        let (a, b) = segments[s];
                        chain.push(if a == tip { b } else { a });
                    }
                    None => break,
                }
            }
            chain.reverse();
        }
        let closed = chain.len() > 2 && chain.first() == chain.last();
        if closed {
            chain.pop();
        }
        polylines.push(Polyline { vertices: chain.into_iter().map(vertex).collect(), closed });
    }
    polylines
}
