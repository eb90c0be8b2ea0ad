//! SVG scatter projections of sweep records.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Result, Sp2Error};
use crate::grid::ReachRecord;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 55.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    ThetaPhi,
    ZTheta,
    ZPhi,
}

impl std::str::FromStr for Projection {
    type Err = Sp2Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta-phi" => Ok(Projection::ThetaPhi),
            "z-theta" => Ok(Projection::ZTheta),
            "z-phi" => Ok(Projection::ZPhi),
            other => Err(Sp2Error::Domain(format!(
                "unknown projection '{other}' (expected theta-phi, z-theta or z-phi)"
            ))),
        }
    }
}

impl Projection {
    /// (x, y) data values plus whether each axis is log-scaled.
    fn extract(&self, r: &ReachRecord) -> (f64, f64) {
        match self {
            Projection::ThetaPhi => (r.theta, r.phi),
            Projection::ZTheta => (r.z, r.theta),
            Projection::ZPhi => (r.z, r.phi),
        }
    }

    fn labels(&self) -> (&'static str, &'static str) {
        match self {
            Projection::ThetaPhi => ("theta [rad]", "phi [rad]"),
            Projection::ZTheta => ("z (log)", "theta [rad]"),
            Projection::ZPhi => ("z (log)", "phi [rad]"),
        }
    }

    fn x_is_log(&self) -> bool {
        !matches!(self, Projection::ThetaPhi)
    }
}

struct AxisScale {
    lo: f64,
    hi: f64,
    log: bool,
}

impl AxisScale {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !(hi > lo) {
            // single point or degenerate span
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        Self {
            lo: lo - pad,
            hi: hi + pad,
            log,
        }
    }

    fn fraction(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }
}

/// Renders a 2-D scatter of reached (blue) vs unreached (gray) records.
pub fn render_scatter(records: &[ReachRecord], projection: Projection, path: &Path) -> Result<()> {
    let svg = scatter_svg(records, projection)?;
    std::fs::write(path, svg).map_err(|e| Sp2Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Produces the SVG document as a string.
pub fn scatter_svg(records: &[ReachRecord], projection: Projection) -> Result<String> {
    if records.is_empty() {
        return Err(Sp2Error::EmptyInput);
    }
    let xs = AxisScale::new(
        records.iter().map(|r| projection.extract(r).0),
        projection.x_is_log(),
    );
    let ys = AxisScale::new(records.iter().map(|r| projection.extract(r).1), false);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |v: f64| MARGIN_LEFT + xs.fraction(v) * plot_w;
    let py = |v: f64| MARGIN_TOP + (1.0 - ys.fraction(v)) * plot_h;

    let (xlabel, ylabel) = projection.labels();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    // frame
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    // axis ticks: 5 per axis
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = xs.lo + f * (xs.hi - xs.lo);
        let xpix = MARGIN_LEFT + f * plot_w;
        let xshown = if xs.log { 10f64.powf(xv) } else { xv };
        let _ = writeln!(
            svg,
            r#"<line x1="{xpix}" y1="{y0}" x2="{xpix}" y2="{y1}" stroke="black"/><text x="{xpix}" y="{ty}" font-size="11" text-anchor="middle">{v:.3}</text>"#,
            y0 = MARGIN_TOP + plot_h,
            y1 = MARGIN_TOP + plot_h + 5.0,
            ty = MARGIN_TOP + plot_h + 18.0,
            v = xshown,
        );
        let yv = ys.lo + f * (ys.hi - ys.lo);
        let ypix = MARGIN_TOP + (1.0 - f) * plot_h;
        let _ = writeln!(
            svg,
            r#"<line x1="{x0}" y1="{ypix}" x2="{x1}" y2="{ypix}" stroke="black"/><text x="{tx}" y="{typ}" font-size="11" text-anchor="end">{v:.3}</text>"#,
            x0 = MARGIN_LEFT - 5.0,
            x1 = MARGIN_LEFT,
            tx = MARGIN_LEFT - 8.0,
            typ = ypix + 4.0,
            v = yv,
        );
    }
    // axis labels
    let _ = writeln!(
        svg,
        r#"<text x="{x}" y="{y}" font-size="13" text-anchor="middle">{xlabel}</text>"#,
        x = MARGIN_LEFT + plot_w / 2.0,
        y = HEIGHT - 12.0,
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{y}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {y})">{ylabel}</text>"#,
        y = MARGIN_TOP + plot_h / 2.0,
    );
    // points: unreached underneath, reached on top
    for r in records.iter().filter(|r| !r.reached()) {
        let (x, y) = projection.extract(r);
        let _ = writeln!(
            svg,
            r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="3" fill="none" stroke="#b0b0b0" class="unreached"/>"##,
            cx = px(x),
            cy = py(y),
        );
    }
    for r in records.iter().filter(|r| r.reached()) {
        let (x, y) = projection.extract(r);
        let _ = writeln!(
            svg,
            r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="3" fill="#2060c0" class="reached"/>"##,
            cx = px(x),
            cy = py(y),
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
