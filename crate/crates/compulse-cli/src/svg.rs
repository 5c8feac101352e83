//! Minimal static SVG rendering of a contour set: the display follows
//! the usual convention of detuning error on the horizontal axis and
//! Rabi-frequency error on the vertical axis, one stroke color per
//! level, no fidelity claims attached.

use compulse::landscape::{ContourSet, LandscapeGrid};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 640.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 700.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 590.0;

/// Innermost (smallest level) to outermost stroke colors.
const PALETTE: [&str; 6] = ["#1f77b4", "#2ca02c", "#ff7f0e", "#d62728", "#9467bd", "#8c564b"];

pub fn render(grid: &LandscapeGrid, contours: &ContourSet, title: &str) -> String {
    let (d_lo, d_hi) = (grid.delta_axis[0], *grid.delta_axis.last().unwrap());
    let (e_lo, e_hi) = (grid.eps_axis[0], *grid.eps_axis.last().unwrap());
    let x = |delta: f64| LEFT + (delta - d_lo) / (d_hi - d_lo) * (RIGHT - LEFT);
    let y = |eps: f64| BOTTOM - (eps - e_lo) / (e_hi - e_lo) * (BOTTOM - TOP);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"14\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{}\" height=\"{}\" fill=\"none\" \
         stroke=\"black\"/>\n",
        RIGHT - LEFT,
        BOTTOM - TOP
    ));
    // zero axes when they lie inside the box
    if d_lo < 0.0 && d_hi > 0.0 {
        svg.push_str(&format!(
            "  <line x1=\"{0}\" y1=\"{TOP}\" x2=\"{0}\" y2=\"{BOTTOM}\" stroke=\"#cccccc\"/>\n",
            x(0.0)
        ));
    }
    if e_lo < 0.0 && e_hi > 0.0 {
        svg.push_str(&format!(
            "  <line x1=\"{LEFT}\" y1=\"{0}\" x2=\"{RIGHT}\" y2=\"{0}\" stroke=\"#cccccc\"/>\n",
            y(0.0)
        ));
    }

    // levels sorted ascending pick their palette color by rank
    let mut order: Vec<usize> = (0..contours.levels.len()).collect();
    order.sort_by(|&a, &b| contours.levels[a].total_cmp(&contours.levels[b]));
    for (rank, &idx) in order.iter().enumerate() {
        let color = PALETTE[rank.min(PALETTE.len() - 1)];
        for line in &contours.polylines[idx] {
            if line.vertices.is_empty() {
                continue;
            }
            let mut d = String::new();
            for (k, &(eps, delta)) in line.vertices.iter().enumerate() {
                let cmd = if k == 0 { 'M' } else { 'L' };
                d.push_str(&format!("{cmd}{:.2} {:.2} ", x(delta), y(eps)));
            }
            if line.closed {
                d.push('Z');
            }
            svg.push_str(&format!(
                "  <path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                d.trim_end()
            ));
        }
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" fill=\"{color}\">{:.0e}</text>\n",
            RIGHT - 60.0,
            TOP + 20.0 + 18.0 * rank as f64,
            contours.levels[idx]
        ));
    }

    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"18\">{title}</text>\n",
        (LEFT + RIGHT) / 2.0
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">detuning error &#948;</text>\n",
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "  <text x=\"24\" y=\"{}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 24 {})\">Rabi error &#949;</text>\n",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    ));
    for (val, lab_x, lab_y, anchor) in [
        (d_lo, x(d_lo), BOTTOM + 20.0, "middle"),
        (d_hi, x(d_hi), BOTTOM + 20.0, "middle"),
        (e_lo, LEFT - 8.0, y(e_lo) + 5.0, "end"),
        (e_hi, LEFT - 8.0, y(e_hi) + 5.0, "end"),
    ] {
        svg.push_str(&format!(
            "  <text x=\"{lab_x}\" y=\"{lab_y}\" text-anchor=\"{anchor}\">{val}</text>\n"
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
