//! Standalone SVG charts plus sibling `.dat` tables for every sweep.
//!
//! Two views per dimension N: the separation/compression measures against
//! k, and the raw phase distances against k on a logarithmic vertical axis.
//! The `.dat` files carry exactly the numbers behind the curves (written
//! through `Display`, which round-trips `f64`), so plots can be rebuilt or
//! re-rendered elsewhere without loss.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::sweep::SummaryRow;

/// Nonpositive values cannot sit on a log axis; they are clamped to this
/// floor (with a warning) instead of breaking the chart.
pub const LOG_FLOOR: f64 = 1e-12;

struct Curve {
    name: &'static str,
    color: &'static str,
    /// (x, y, se); se of 0 suppresses the error bar.
    points: Vec<(f64, f64, f64)>,
}

/// Writes both chart pairs for every N present in the summary table.
/// Returns the created file paths.
pub fn emit_plots(summaries: &[SummaryRow], out_dir: &Path) -> Result<Vec<PathBuf>> {
    if summaries.is_empty() {
        return Err(HarnessError::Config("cannot plot an empty sweep table".into()));
    }
    std::fs::create_dir_all(out_dir)?;
    let mut ns: Vec<usize> = summaries.iter().map(|s| s.n).collect();
    ns.sort_unstable();
    ns.dedup();

    let mut written = Vec::new();
    for n in ns {
        // Rows with no successful run leave a gap in every curve.
        let rows: Vec<&SummaryRow> = summaries
            .iter()
            .filter(|s| s.n == n && s.reached > 0)
            .collect();
        if rows.is_empty() {
            eprintln!("plot: no successful runs for N = {n}, skipping");
            continue;
        }

        let sp_curves = vec![
            Curve {
                name: "sp_b (separation)",
                color: "#1f77b4",
                points: rows
                    .iter()
                    .map(|r| (r.k as f64, r.mean_sp_b, r.se_sp_b))
                    .collect(),
            },
            Curve {
                name: "sp_w (compression)",
                color: "#d62728",
                points: rows
                    .iter()
                    .map(|r| (r.k as f64, r.mean_sp_w, r.se_sp_w))
                    .collect(),
            },
        ];
        let sp_base = out_dir.join(format!("sp_vs_k_n{n}"));
        written.push(write_dat(
            &sp_base.with_extension("dat"),
            &format!("separation/compression vs k (N = {n})"),
            "k mean_sp_b se_sp_b mean_sp_w se_sp_w",
            &rows,
            |r| vec![r.mean_sp_b, r.se_sp_b, r.mean_sp_w, r.se_sp_w],
        )?);
        written.push(write_svg(
            &sp_base.with_extension("svg"),
            &format!("Separation and compression vs k (N = {n})"),
            "k (covariant features)",
            "distance change",
            &sp_curves,
            false,
        )?);

        let dist_curves = vec![
            Curve {
                name: "within, unsupervised",
                color: "#1f77b4",
                points: rows
                    .iter()
                    .map(|r| (r.k as f64, r.mean_d_within_u, r.se_d_within_u))
                    .collect(),
            },
            Curve {
                name: "between, unsupervised",
                color: "#2ca02c",
                points: rows
                    .iter()
                    .map(|r| (r.k as f64, r.mean_d_between_u, r.se_d_between_u))
                    .collect(),
            },
            Curve {
                name: "within, supervised",
                color: "#d62728",
                points: rows
                    .iter()
                    .map(|r| (r.k as f64, r.mean_d_within_s, r.se_d_within_s))
                    .collect(),
            },
            Curve {
                name: "between, supervised",
                color: "#ff7f0e",
                points: rows
                    .iter()
                    .map(|r| (r.k as f64, r.mean_d_between_s, r.se_d_between_s))
                    .collect(),
            },
        ];
        let dist_base = out_dir.join(format!("distances_vs_k_n{n}"));
        written.push(write_dat(
            &dist_base.with_extension("dat"),
            &format!("mean pairwise distances vs k (N = {n})"),
            "k mean_d_within_u se_d_within_u mean_d_between_u se_d_between_u mean_d_within_s se_d_within_s mean_d_between_s se_d_between_s",
            &rows,
            |r| {
                vec![
                    r.mean_d_within_u,
                    r.se_d_within_u,
                    r.mean_d_between_u,
                    r.se_d_between_u,
                    r.mean_d_within_s,
                    r.se_d_within_s,
                    r.mean_d_between_s,
                    r.se_d_between_s,
                ]
            },
        )?);
        written.push(write_svg(
            &dist_base.with_extension("svg"),
            &format!("Mean pairwise distances vs k (N = {n}, log scale)"),
            "k (covariant features)",
            "mean pairwise distance",
            &dist_curves,
            true,
        )?);
    }
    Ok(written)
}

fn write_dat<F>(
    path: &Path,
    title: &str,
    columns: &str,
    rows: &[&SummaryRow],
    values: F,
) -> Result<PathBuf>
where
    F: Fn(&SummaryRow) -> Vec<f64>,
{
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# {title}")?;
    writeln!(w, "# columns: {columns}")?;
    for row in rows {
        write!(w, "{}", row.k)?;
        for v in values(row) {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(path.to_path_buf())
}

/// Parses a `.dat` table back into numeric rows.
pub fn read_dat(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|e| HarnessError::Config(format!("bad .dat value {tok:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

const WIDTH: f64 = 680.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 210.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 58.0;

fn write_svg(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    curves: &[Curve],
    log_y: bool,
) -> Result<PathBuf> {
    let mut clamped = false;
    let transform = |y: f64| -> f64 {
        if log_y {
            y.max(LOG_FLOOR).log10()
        } else {
            y
        }
    };

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for curve in curves {
        for &(x, y, se) in &curve.points {
            if !y.is_finite() {
                continue;
            }
            if log_y && y <= LOG_FLOOR {
                clamped = true;
            }
            xs.push(x);
            ys.push(transform(y - se));
            ys.push(transform(y + se));
            ys.push(transform(y));
        }
    }
    if clamped {
        eprintln!(
            "plot {}: nonpositive distance means clamped to {LOG_FLOOR} on the log axis",
            path.display()
        );
    }
    if xs.is_empty() {
        return Err(HarnessError::Config("no finite points to plot".into()));
    }
    let (mut x_min, mut x_max) = min_max(&xs);
    let (mut y_min, mut y_max) = min_max(&ys);
    if x_min == x_max {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if y_min == y_max {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let x_pad = 0.05 * (x_max - x_min);
    let y_pad = 0.08 * (y_max - y_min);
    x_min -= x_pad;
    x_max += x_pad;
    y_min -= y_pad;
    y_max += y_pad;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = move |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = move |y: f64| MARGIN_TOP + plot_h - (y - y_min) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    ));

    // Frame.
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n"
    ));

    // Axis ticks and grid.
    for i in 0..=5 {
        let fx = x_min + (x_max - x_min) * i as f64 / 5.0;
        let px = sx(fx);
        svg.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{}\" x2=\"{px:.2}\" y2=\"{}\" stroke=\"#333\"/>\n",
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_TOP + plot_h + 18.0,
            tick_label(fx)
        ));
    }
    for i in 0..=5 {
        let fy = y_min + (y_max - y_min) * i as f64 / 5.0;
        let py = sy(fy);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{py:.2}\" x2=\"{}\" y2=\"{py:.2}\" stroke=\"#ddd\"/>\n",
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        ));
        let label = if log_y {
            format!("1e{}", tick_label(fy))
        } else {
            tick_label(fy)
        };
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            MARGIN_LEFT - 8.0,
            py + 4.0,
            label
        ));
    }

    // Zero line for linear charts.
    if !log_y && y_min < 0.0 && y_max > 0.0 {
        let py = sy(0.0);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{py:.2}\" x2=\"{}\" y2=\"{py:.2}\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n",
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        ));
    }

    // Axis labels.
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        escape(x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">{}</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(y_label)
    ));

    // Curves: error bars, polyline, markers.
    for curve in curves {
        let mut sorted: Vec<&(f64, f64, f64)> = curve
            .points
            .iter()
            .filter(|(_, y, _)| y.is_finite())
            .collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for &&(x, y, se) in &sorted {
            if se > 0.0 {
                let px = sx(x);
                svg.push_str(&format!(
                    "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"1\"/>\n",
                    sy(transform(y + se)),
                    sy(transform(y - se)),
                    curve.color
                ));
            }
        }
        let path_points: Vec<String> = sorted
            .iter()
            .map(|&&(x, y, _)| format!("{:.2},{:.2}", sx(x), sy(transform(y))))
            .collect();
        if path_points.len() > 1 {
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"/>\n",
                path_points.join(" "),
                curve.color
            ));
        }
        for &&(x, y, _) in &sorted {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\"/>\n",
                sx(x),
                sy(transform(y)),
                curve.color
            ));
        }
    }

    // Legend.
    for (i, curve) in curves.iter().enumerate() {
        let ly = MARGIN_TOP + 14.0 + 20.0 * i as f64;
        let lx = MARGIN_LEFT + plot_w + 14.0;
        svg.push_str(&format!(
            "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            lx + 22.0,
            curve.color
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            lx + 28.0,
            ly + 4.0,
            escape(curve.name)
        ));
    }
    svg.push_str("</svg>\n");

    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(svg.as_bytes())?;
    w.flush()?;
    Ok(path.to_path_buf())
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else if v.abs() >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
