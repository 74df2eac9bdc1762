//! Minimal SVG line plots of aggregated return curves. CSV stays the
//! authoritative output; the SVG is a convenience view: one panel per
//! environment, one line per (algorithm, degree) with its confidence band.

use super::{AggRow, HarnessError};

const PANEL_WIDTH: f64 = 560.0;
const PANEL_HEIGHT: f64 = 380.0;
const MARGIN: f64 = 50.0;

const PALETTE: [&str; 6] = ["#d95f02", "#7570b3", "#1b9e77", "#e7298a", "#66a61e", "#e6ab02"];

/// Parse rows back out of an aggregate CSV (comment lines ignored).
pub fn parse_aggregate_csv(text: &str) -> Result<Vec<AggRow>, HarnessError> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("env,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(HarnessError::Config(format!("bad aggregate row: `{line}`")));
        }
        let parse_f = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| HarnessError::Config(format!("bad float `{s}` in `{line}`")))
        };
        rows.push(AggRow {
            env: fields[0].to_string(),
            algo: fields[1].to_string(),
            degree: fields[2]
                .parse()
                .map_err(|_| HarnessError::Config(format!("bad degree in `{line}`")))?,
            episode: fields[3]
                .parse()
                .map_err(|_| HarnessError::Config(format!("bad episode in `{line}`")))?,
            mean: parse_f(fields[4])?,
            ci_lo: parse_f(fields[5])?,
            ci_hi: parse_f(fields[6])?,
        });
    }
    Ok(rows)
}

/// Render aggregated curves as a standalone SVG document.
pub fn render_svg(rows: &[AggRow]) -> String {
    let mut envs: Vec<String> = Vec::new();
    for r in rows {
        if !envs.contains(&r.env) {
            envs.push(r.env.clone());
        }
    }
    let total_width = MARGIN + envs.len() as f64 * (PANEL_WIDTH + MARGIN);
    let total_height = PANEL_HEIGHT + 2.0 * MARGIN + 40.0;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total_width:.0}\" height=\"{total_height:.0}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (panel, env) in envs.iter().enumerate() {
        let x0 = MARGIN + panel as f64 * (PANEL_WIDTH + MARGIN);
        render_panel(&mut svg, rows, env, x0, MARGIN);
    }
    svg.push_str("</svg>\n");
    svg
}

fn render_panel(svg: &mut String, rows: &[AggRow], env: &str, x0: f64, y0: f64) {
    let panel: Vec<&AggRow> = rows.iter().filter(|r| r.env == env).collect();
    if panel.is_empty() {
        return;
    }
    let x_max = panel.iter().map(|r| r.episode).max().unwrap_or(1) as f64;
    let x_min = 1.0f64.min(x_max);
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for r in &panel {
        y_min = y_min.min(r.ci_lo);
        y_max = y_max.max(r.ci_hi);
    }
    if y_min == y_max {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    let (y_min, y_max) = (y_min - pad, y_max + pad);
    let sx = |ep: f64| x0 + (ep - x_min) / (x_max - x_min).max(1.0) * PANEL_WIDTH;
    let sy = |v: f64| y0 + PANEL_HEIGHT - (v - y_min) / (y_max - y_min) * PANEL_HEIGHT;

    // frame and labels
    let _ = std::fmt::Write::write_fmt(
        svg,
        format_args!(
            "<rect x=\"{x0}\" y=\"{y0}\" width=\"{PANEL_WIDTH}\" height=\"{PANEL_HEIGHT}\" fill=\"none\" stroke=\"#444\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"14\">{env}</text>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">episode</text>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{y_max:.3}</text>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{y_min:.3}</text>\n",
            x0 + PANEL_WIDTH / 2.0,
            y0 - 10.0,
            x0 + PANEL_WIDTH / 2.0,
            y0 + PANEL_HEIGHT + 30.0,
            x0 - 4.0,
            y0 + 10.0,
            x0 - 4.0,
            y0 + PANEL_HEIGHT,
        ),
    );

    let mut curves: Vec<(String, usize)> = Vec::new();
    for r in &panel {
        let key = (r.algo.clone(), r.degree);
        if !curves.contains(&key) {
            curves.push(key);
        }
    }
    for (ci, (algo, degree)) in curves.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let series: Vec<&&AggRow> =
            panel.iter().filter(|r| &r.algo == algo && r.degree == *degree).collect();
        // confidence band
        let mut band = String::from("<polygon fill=\"");
        band.push_str(color);
        band.push_str("\" fill-opacity=\"0.15\" stroke=\"none\" points=\"");
        for r in &series {
            let _ = std::fmt::Write::write_fmt(
                &mut band,
                format_args!("{:.2},{:.2} ", sx(r.episode as f64), sy(r.ci_hi)),
            );
        }
        for r in series.iter().rev() {
            let _ = std::fmt::Write::write_fmt(
                &mut band,
                format_args!("{:.2},{:.2} ", sx(r.episode as f64), sy(r.ci_lo)),
            );
        }
        band.push_str("\"/>\n");
        svg.push_str(&band);
        // mean line
        let mut line = format!("<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"");
        for r in &series {
            let _ = std::fmt::Write::write_fmt(
                &mut line,
                format_args!("{:.2},{:.2} ", sx(r.episode as f64), sy(r.mean)),
            );
        }
        line.push_str("\"/>\n");
        svg.push_str(&line);
        // legend entry
        let _ = std::fmt::Write::write_fmt(
            svg,
            format_args!(
                "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\">{algo}({degree})</text>\n",
                x0 + 10.0,
                y0 + 16.0 + 16.0 * ci as f64,
            ),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<AggRow> {
        (1..=10)
            .flat_map(|ep| {
                [("legendre_lsvi", 3usize, -1.0), ("monomial_lsvi", 3, -3.0)].map(
                    move |(algo, degree, level)| AggRow {
                        env: "lqr_left".into(),
                        algo: algo.into(),
                        degree,
                        episode: ep,
                        mean: level + ep as f64 * 0.05,
                        ci_lo: level + ep as f64 * 0.05 - 0.2,
                        ci_hi: level + ep as f64 * 0.05 + 0.2,
                    },
                )
            })
            .collect()
    }

    #[test]
    fn renders_well_formed_svg() {
        let svg = render_svg(&sample_rows());
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert!(svg.contains("legendre_lsvi(3)"));
    }

    #[test]
    fn aggregate_csv_round_trip() {
        let rows = sample_rows();
        let mut record = crate::harness::RunRecord {
            aggregate: rows.clone(),
            ..Default::default()
        };
        record.master_seed = 7;
        let text = record.to_aggregate_csv();
        let parsed = parse_aggregate_csv(&text).unwrap();
        assert_eq!(parsed.len(), rows.len());
        assert_eq!(parsed[0].env, "lqr_left");
        assert_eq!(parsed[0].mean, rows[0].mean);
    }

    #[test]
    fn parse_rejects_malformed_rows() {
        assert!(parse_aggregate_csv("a,b,c\n").is_err());
        assert!(parse_aggregate_csv("e,a,3,1,x,0,0\n").is_err());
    }
}
