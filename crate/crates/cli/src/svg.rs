//! SVG rendering of the symbol cloud with the certified rate circles
//! overlaid. User units are complex-plane coordinates (viewBox covers
//! [-1.2, 1.2] on both axes, y pointing up), so every radius and point
//! position is written directly.

use std::io::{self, Write};

use dys_srg::classes::{AlgoParams, FunctionClassParams};
use dys_srg::symbol::for_each_symbol_point;

/// One origin-centered rate circle to overlay.
pub struct RateCircle {
    pub label: &'static str,
    pub rho: f64,
}

const CIRCLE_COLORS: [&str; 4] = ["#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
const POINT_COLOR: &str = "#1f77b4";
const POINT_SIZE: f64 = 0.006;

/// Streams the figure: background, axes, the grid_n^3 symbol points as
/// `<rect class="pt">` squares, one `<circle>` per rate circle, and a legend.
/// `<circle>` elements are used for nothing else, so consumers can count
/// them.
pub fn write_cloud_svg(
    w: &mut dyn Write,
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
    grid_n: usize,
    circles: &[RateCircle],
    sup_modulus: f64,
) -> io::Result<()> {
    writeln!(
        w,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"840\" height=\"840\" viewBox=\"-1.2 -1.2 2.4 2.4\">"
    )?;
    writeln!(
        w,
        "<rect x=\"-1.2\" y=\"-1.2\" width=\"2.4\" height=\"2.4\" fill=\"#ffffff\"/>"
    )?;
    writeln!(w, "<g stroke=\"#cccccc\" stroke-width=\"0.004\">")?;
    writeln!(w, "<line x1=\"-1.2\" y1=\"0\" x2=\"1.2\" y2=\"0\"/>")?;
    writeln!(w, "<line x1=\"0\" y1=\"-1.2\" x2=\"0\" y2=\"1.2\"/>")?;
    writeln!(w, "</g>")?;

    writeln!(w, "<g fill=\"{POINT_COLOR}\" fill-opacity=\"0.35\">")?;
    let half = POINT_SIZE / 2.0;
    let mut err: Option<io::Error> = None;
    for_each_symbol_point(f, g, h, params, grid_n, |_, pt| {
        if err.is_some() {
            return;
        }
        // SVG y points down; the plot's y axis is the imaginary part, up
        let x = pt.value.re - half;
        let y = -pt.value.im - half;
        if let Err(e) = writeln!(
            w,
            "<rect class=\"pt\" x=\"{x:.6}\" y=\"{y:.6}\" width=\"{POINT_SIZE}\" height=\"{POINT_SIZE}\"/>"
        ) {
            err = Some(e);
        }
    })
    .expect("caller checked finite L_h");
    if let Some(e) = err {
        return Err(e);
    }
    writeln!(w, "</g>")?;

    for (idx, c) in circles.iter().enumerate() {
        let color = CIRCLE_COLORS[idx % CIRCLE_COLORS.len()];
        writeln!(
            w,
            "<circle cx=\"0\" cy=\"0\" r=\"{:.6}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"0.008\"/>",
            c.rho
        )?;
    }

    writeln!(
        w,
        "<g font-family=\"monospace\" font-size=\"0.07\" text-anchor=\"start\">"
    )?;
    let mut row = 0usize;
    for (idx, c) in circles.iter().enumerate() {
        let color = CIRCLE_COLORS[idx % CIRCLE_COLORS.len()];
        writeln!(
            w,
            "<text x=\"-1.15\" y=\"{:.2}\" fill=\"{color}\">{} = {:.6}</text>",
            -1.08 + 0.09 * row as f64,
            c.label,
            c.rho
        )?;
        row += 1;
    }
    writeln!(
        w,
        "<text x=\"-1.15\" y=\"{:.2}\" fill=\"{POINT_COLOR}\">sampled sup = {sup_modulus:.6}</text>",
        -1.08 + 0.09 * row as f64
    )?;
    writeln!(w, "</g>")?;
    writeln!(w, "</svg>")
}
