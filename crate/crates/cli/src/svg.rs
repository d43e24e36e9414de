//! Standalone SVG plots. Each file carries its data as CSV inside a
//! `<metadata>` block so the numbers survive without the picture.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const PAD: f64 = 60.0;

/// A rectangular grid of values; `None` cells stay blank.
pub struct Heatmap<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    /// `cells[row][col]`, row 0 at the bottom.
    pub cells: Vec<Vec<Option<f64>>>,
}

/// Points with a fitted line per series.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub fit: Option<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str, data: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<metadata><![CDATA[
{data}]]></metadata>
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>
"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) {
    let (x0, x1, y0, y1) = (PAD, WIDTH - PAD, HEIGHT - PAD, PAD);
    let _ = write!(
        out,
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>
<text x="{}" y="{}" text-anchor="middle">{}</text>
<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>
<text x="{x0}" y="{}" text-anchor="middle">{}</text>
<text x="{x1}" y="{}" text-anchor="middle">{}</text>
<text x="{}" y="{y0}" text-anchor="end">{}</text>
<text x="{}" y="{}" text-anchor="end">{}</text>
"#,
        (x0 + x1) / 2.0,
        HEIGHT - 16.0,
        escape(x_label),
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label),
        y0 + 16.0,
        tick(x.0),
        y0 + 16.0,
        tick(x.1),
        x0 - 6.0,
        tick(y.0),
        x0 - 6.0,
        y1 + 4.0,
        tick(y.1),
    );
}

fn tick(v: f64) -> String {
    format!("{v:.3}")
}

/// Blue below zero, red above, white at zero; scaled by the largest magnitude.
fn color(v: f64, scale: f64) -> String {
    let s = if scale > 0.0 { (v / scale).clamp(-1.0, 1.0) } else { 0.0 };
    let fade = |s: f64| (255.0 * (1.0 - s.abs())).round() as u8;
    if s < 0.0 {
        format!("rgb({0},{0},255)", fade(s))
    } else {
        format!("rgb(255,{0},{0})", fade(s))
    }
}

pub fn heatmap(map: &Heatmap) -> String {
    let rows = map.cells.len();
    let cols = map.cells.first().map_or(0, Vec::len);
    let mut data = String::from("row,col,x,y,value\n");
    let (dx, dy) = (
        (map.x_range.1 - map.x_range.0) / cols.max(1) as f64,
        (map.y_range.1 - map.y_range.0) / rows.max(1) as f64,
    );
    let scale = map.cells.iter().flatten().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    for (r, row) in map.cells.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if let Some(v) = v {
                let x = map.x_range.0 + (c as f64 + 0.5) * dx;
                let y = map.y_range.0 + (r as f64 + 0.5) * dy;
                let _ = writeln!(data, "{r},{c},{x},{y},{v:e}");
            }
        }
    }
    let mut out = String::new();
    header(&mut out, map.title, &data);
    let (w, h) = ((WIDTH - 2.0 * PAD) / cols.max(1) as f64, (HEIGHT - 2.0 * PAD) / rows.max(1) as f64);
    for (r, row) in map.cells.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if let Some(v) = v {
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                    PAD + c as f64 * w,
                    HEIGHT - PAD - (r + 1) as f64 * h,
                    w + 0.05,
                    h + 0.05,
                    color(*v, scale)
                );
            }
        }
    }
    axes(&mut out, map.x_label, map.y_label, map.x_range, map.y_range);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="44" text-anchor="middle">max |value| {scale:.3e}; blue &lt; 0 &lt; red</text>"#,
        WIDTH / 2.0
    );
    out.push_str("</svg>\n");
    out
}

const PALETTE: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

pub fn scatter(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut xr, mut yr) = ((f64::INFINITY, f64::NEG_INFINITY), (f64::INFINITY, f64::NEG_INFINITY));
    for &(x, y) in all {
        xr = (xr.0.min(x), xr.1.max(x));
        yr = (yr.0.min(y), yr.1.max(y));
    }
    if !xr.0.is_finite() {
        xr = (0.0, 1.0);
        yr = (0.0, 1.0);
    }
    let span = |r: (f64, f64)| if r.1 > r.0 { r.1 - r.0 } else { 1.0 };
    let px = |x: f64| PAD + (x - xr.0) / span(xr) * (WIDTH - 2.0 * PAD);
    let py = |y: f64| HEIGHT - PAD - (y - yr.0) / span(yr) * (HEIGHT - 2.0 * PAD);
    let mut data = String::from("series,x,y\n");
    for s in series {
        for (x, y) in &s.points {
            let _ = writeln!(data, "{},{x:e},{y:e}", s.label);
        }
    }
    let mut out = String::new();
    header(&mut out, title, &data);
    for (k, s) in series.iter().enumerate() {
        let col = PALETTE[k % PALETTE.len()];
        for &(x, y) in &s.points {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{col}"/>"#, px(x), py(y));
        }
        if let Some((slope, intercept)) = s.fit {
            let (a, b) = (xr.0, xr.1);
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{col}"/>"#,
                px(a),
                py(slope * a + intercept),
                px(b),
                py(slope * b + intercept)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{col}">{}</text>"#,
            PAD + 10.0,
            PAD + 14.0 * (k + 1) as f64,
            escape(&s.label)
        );
    }
    axes(&mut out, x_label, y_label, xr, yr);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heatmap_embeds_its_data() {
        let svg = heatmap(&Heatmap {
            title: "a < b",
            x_label: "t",
            y_label: "l",
            x_range: (0.0, 1.0),
            y_range: (0.0, 2.0),
            cells: vec![vec![Some(-1.0), None], vec![Some(0.5), Some(0.0)]],
        });
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("a &lt; b"));
        assert!(svg.contains("0,0,0.25,0.5,-1e0"));
        assert_eq!(svg.matches("<rect x=").count(), 3);
    }

    #[test]
    fn scatter_draws_fits() {
        let svg = scatter(
            "fit",
            "log r",
            "log m",
            &[Series {
                label: "p".into(),
                points: vec![(0.0, 0.0), (1.0, 2.0)],
                fit: Some((2.0, 0.0)),
            }],
        );
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg.matches("<line").count(), 1);
    }
}
