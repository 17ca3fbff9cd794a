//! Log-log scatter plot of piece counts against component counts.

use std::fmt::Write;

const W: f64 = 480.0;
const H: f64 = 360.0;
const PAD: f64 = 48.0;

/// Points `(n, p)` on log axes, the least-squares line through them and
/// its slope in the title.
pub fn loglog_plot(samples: &[(u64, u64)], slope: Option<f64>, title: &str) -> String {
    let pts: Vec<(f64, f64)> = samples.iter().filter(|&&(n, p)| n > 0 && p > 0).map(|&(n, p)| ((n as f64).ln(), (p as f64).ln())).collect();
    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    let heading = match slope {
        Some(s) => format!("{title} (slope {s:.3})"),
        None => title.to_string(),
    };
    writeln!(out, r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#, W / 2.0, escape(&heading)).unwrap();
    writeln!(out, r#"<line x1="{PAD}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, H - PAD, W - PAD / 2.0, H - PAD).unwrap();
    writeln!(out, r#"<line x1="{PAD}" y1="{}" x2="{PAD}" y2="{}" stroke="black"/>"#, H - PAD, PAD / 2.0).unwrap();
    writeln!(out, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">log n</text>"#, W / 2.0, H - 12.0).unwrap();
    writeln!(out, r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">log p</text>"#, H / 2.0, H / 2.0).unwrap();

    if !pts.is_empty() {
        let (x0, x1) = extent(pts.iter().map(|p| p.0));
        let (y0, y1) = extent(pts.iter().map(|p| p.1));
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 1.5 * PAD);
        let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 1.5 * PAD);
        for &(n, p) in samples.iter().filter(|&&(n, p)| n > 0 && p > 0) {
            let (x, y) = ((n as f64).ln(), (p as f64).ln());
            writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="steelblue"><title>n={n} p={p}</title></circle>"#, sx(x), sy(y)).unwrap();
        }
        if let Some(s) = slope {
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
            let fy = |x: f64| my + s * (x - mx);
            writeln!(
                out,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="firebrick" stroke-dasharray="4 3"/>"#,
                sx(x0),
                sy(fy(x0)),
                sx(x1),
                sy(fy(x1))
            )
            .unwrap();
        }
    }
    out.push_str("</svg>\n");
    out
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
