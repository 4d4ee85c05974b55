//! Plot emission: a gnuplot-compatible whitespace-delimited data file and a
//! self-contained SVG line chart of the error curves and theorem bounds
//! versus n, on log-log axes.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::experiment::{fmt_f64, RunError, SummaryRow};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 70.0;

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    values: Vec<f64>,
}

/// Writes `summary.dat` and `summary.svg` into `dir` from nonempty summary
/// rows.
pub fn emit_plot_data(rows: &[SummaryRow], dir: &Path) -> Result<(), RunError> {
    if rows.is_empty() {
        return Err(RunError::Config(
            "cannot plot an empty set of summary rows".into(),
        ));
    }
    fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let dat_path = dir.join("summary.dat");
    let mut f = fs::File::create(&dat_path).map_err(|source| RunError::Io {
        path: dat_path.clone(),
        source,
    })?;
    f.write_all(gnuplot_dat(rows).as_bytes())
        .map_err(|source| RunError::Io {
            path: dat_path.clone(),
            source,
        })?;

    let svg_path = dir.join("summary.svg");
    let mut f = fs::File::create(&svg_path).map_err(|source| RunError::Io {
        path: svg_path.clone(),
        source,
    })?;
    f.write_all(svg_chart(rows).as_bytes())
        .map_err(|source| RunError::Io {
            path: svg_path.clone(),
            source,
        })?;
    Ok(())
}

/// One whitespace-delimited row per grid point, with a commented header
/// naming every column.
pub fn gnuplot_dat(rows: &[SummaryRow]) -> String {
    let mut out = String::from(
        "# n p K replicates mean_mspe se_mspe mean_mspe_hat se_mspe_hat \
thm1_bound thm2_bound frac_est1_holds frac_est3_holds mean_max_U u_bound mean_max_V v_bound\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {}\n",
            r.n,
            r.p,
            fmt_f64(r.k),
            r.replicates,
            fmt_f64(r.mean_mspe),
            fmt_f64(r.se_mspe),
            fmt_f64(r.mean_mspe_hat),
            fmt_f64(r.se_mspe_hat),
            fmt_f64(r.thm1_bound),
            fmt_f64(r.thm2_bound),
            fmt_f64(r.frac_est1_holds),
            fmt_f64(r.frac_est3_holds),
            fmt_f64(r.mean_max_u),
            fmt_f64(r.u_bound),
            fmt_f64(r.mean_max_v),
            fmt_f64(r.v_bound),
        ));
    }
    out
}

/// Self-contained SVG with the four series on log-log axes.
pub fn svg_chart(rows: &[SummaryRow]) -> String {
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let series = [
        Series {
            label: "mean MSPE",
            color: "#1f77b4",
            values: rows.iter().map(|r| r.mean_mspe).collect(),
        },
        Series {
            label: "mean estimated MSPE",
            color: "#ff7f0e",
            values: rows.iter().map(|r| r.mean_mspe_hat).collect(),
        },
        Series {
            label: "prediction-error bound",
            color: "#d62728",
            values: rows.iter().map(|r| r.thm1_bound).collect(),
        },
        Series {
            label: "estimated-error bound",
            color: "#2ca02c",
            values: rows.iter().map(|r| r.thm2_bound).collect(),
        },
    ];

    // log-scale limits; nonpositive values are floored so an exact zero
    // (e.g. a noiseless run) still renders
    let floor = 1e-16;
    let log = |v: f64| v.max(floor).log10();
    let x_min = log(ns.iter().cloned().fold(f64::INFINITY, f64::min));
    let x_max = log(ns.iter().cloned().fold(0.0, f64::max));
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in &series {
        for &v in &s.values {
            y_min = y_min.min(log(v));
            y_max = y_max.max(log(v));
        }
    }
    let x_span = (x_max - x_min).max(1e-9);
    let y_pad = 0.05 * (y_max - y_min).max(1.0);
    let (y_min, y_max) = (y_min - y_pad, y_max + y_pad);
    let y_span = y_max - y_min;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |v: f64| MARGIN_LEFT + (log(v) - x_min) / x_span * plot_w;
    let sy = |v: f64| MARGIN_TOP + (y_max - log(v)) / y_span * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
<text x=\"{:.1}\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">\
Prediction error and bounds vs sample size (log-log)</text>\n",
        WIDTH / 2.0
    ));

    // frame
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" \
fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n"
    ));

    // x ticks at each observed n, y ticks at integer decades
    for &n in &ns {
        let x = sx(n);
        svg.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
<text x=\"{x:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
text-anchor=\"middle\">{n}</text>\n",
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 6.0,
            MARGIN_TOP + plot_h + 22.0,
        ));
    }
    let first_decade = y_min.ceil() as i64;
    let last_decade = y_max.floor() as i64;
    for d in first_decade..=last_decade {
        let y = MARGIN_TOP + (y_max - d as f64) / y_span * plot_h;
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>\n\
<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
text-anchor=\"end\">1e{d}</text>\n",
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w,
            MARGIN_LEFT - 8.0,
            y + 4.0,
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"14\" \
text-anchor=\"middle\">n</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 18.0,
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"14\" \
text-anchor=\"middle\" transform=\"rotate(-90 20 {:.1})\">error</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
    ));

    // series: polyline plus point markers
    for s in &series {
        let points: Vec<String> = ns
            .iter()
            .zip(&s.values)
            .map(|(&n, &v)| format!("{:.2},{:.2}", sx(n), sy(v)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            points.join(" "),
            s.color
        ));
        for (&n, &v) in ns.iter().zip(&s.values) {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"{}\"/>\n",
                sx(n),
                sy(v),
                s.color
            ));
        }
    }

    // legend
    for (i, s) in series.iter().enumerate() {
        let y = MARGIN_TOP + 16.0 + 20.0 * i as f64;
        let x = MARGIN_LEFT + plot_w - 230.0;
        svg.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"{}\" \
stroke-width=\"3\"/>\n\
<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            x + 26.0,
            s.color,
            x + 34.0,
            y + 4.0,
            s.label
        ));
    }

    svg.push_str("</svg>\n");
    svg
}
