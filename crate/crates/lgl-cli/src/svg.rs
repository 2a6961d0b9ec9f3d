//! Deterministic SVG line plots: log10 abscissa, linear ordinate, a marked
//! reference line at ordinate 1.

use std::fmt::Write as _;

use lgl_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorClass {
    Grey,
    Black,
    Accent,
}

impl ColorClass {
    fn stroke(self) -> &'static str {
        match self {
            ColorClass::Grey => "#999999",
            ColorClass::Black => "#111111",
            ColorClass::Accent => "#b03a2e",
        }
    }

    fn class_name(self) -> &'static str {
        match self {
            ColorClass::Grey => "grey",
            ColorClass::Black => "black",
            ColorClass::Accent => "accent",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlotSeries {
    pub label: String,
    pub class: ColorClass,
    /// (t, ordinate) pairs, ascending in t. May be empty: a declared series
    /// with no representable points still renders as an empty polyline.
    pub points: Vec<(u64, f64)>,
}

const WIDTH: f64 = 880.0;
const HEIGHT: f64 = 540.0;
const ML: f64 = 64.0;
const MR: f64 = 168.0;
const MT: f64 = 30.0;
const MB: f64 = 56.0;

fn validate(series: &[PlotSeries], t_min: u64, t_max: u64) -> Result<()> {
    if series.is_empty() {
        return Err(Error::InvalidArgument("plot needs at least one series".into()));
    }
    if t_min == 0 || t_min >= t_max {
        return Err(Error::InvalidArgument(format!(
            "plot range needs 1 <= t_min < t_max, got {t_min}..{t_max}"
        )));
    }
    for s in series {
        for w in s.points.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidArgument(format!(
                    "series {} is not ascending in t",
                    s.label
                )));
            }
        }
        if let Some(&(t, v)) = s.points.iter().find(|&&(t, v)| {
            !v.is_finite() || t < t_min || t > t_max
        }) {
            return Err(Error::InvalidArgument(format!(
                "series {} has an out-of-range or non-finite point ({t}, {v})",
                s.label
            )));
        }
    }
    Ok(())
}

/// Largest "nice" step (1, 2, 2.5 or 5 times a power of ten) below raw.
fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac >= 5.0 {
        5.0
    } else if frac >= 2.5 {
        2.5
    } else if frac >= 2.0 {
        2.0
    } else {
        1.0
    };
    nice * mag
}

/// Render the series to a standalone SVG document.
///
/// The abscissa is log10(t); the ordinate is linear and always includes 1,
/// where a dashed line with id "ref-unity" marks the asymptotic floor the
/// plotted quantity is expected to stay above.
pub fn render_bz_plot(series: &[PlotSeries], t_min: u64, t_max: u64) -> Result<String> {
    validate(series, t_min, t_max)?;

    let lo = (t_min as f64).log10();
    let hi = (t_max as f64).log10();
    let px = |t: u64| ML + ((t as f64).log10() - lo) / (hi - lo) * (WIDTH - ML - MR);

    let values: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|&(_, v)| v)).collect();
    let vmin = values.iter().copied().fold(1.0f64, f64::min);
    let vmax = values.iter().copied().fold(1.0f64, f64::max);
    let span = (vmax - vmin).max(0.5);
    let (ymin, ymax) = (vmin - 0.08 * span, vmax + 0.08 * span);
    let py = |v: f64| HEIGHT - MB - (v - ymin) / (ymax - ymin) * (HEIGHT - MT - MB);

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" \
         viewBox=\"0 0 {WIDTH:.0} {HEIGHT:.0}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(
        w,
        "<desc>Density ordinate log(t/count)/log L(t), L(t) = t^(logloglog t/loglog t), \
         against t on a log10 axis. Counts are sampled on a geometric checkpoint grid; \
         declared series with no positive counts in range render as empty polylines.</desc>"
    );
    let _ = writeln!(w, "<rect width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" fill=\"#ffffff\"/>");

    // x axis: decade ticks with minor subdivisions
    let _ = writeln!(w, "<g class=\"axis-x\" data-scale=\"log10\" stroke=\"#333333\">");
    let _ = writeln!(
        w,
        "<line x1=\"{ML:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>",
        HEIGHT - MB,
        WIDTH - MR,
        HEIGHT - MB
    );
    let e_lo = lo.ceil() as i32;
    let e_hi = hi.floor() as i32;
    for e in e_lo..=e_hi {
        let t = 10f64.powi(e);
        let x = ML + (e as f64 - lo) / (hi - lo) * (WIDTH - ML - MR);
        let _ = writeln!(
            w,
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\"/>",
            HEIGHT - MB,
            HEIGHT - MB + 6.0
        );
        let _ = writeln!(
            w,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" stroke=\"none\" \
             fill=\"#333333\">1e{e}</text>",
            HEIGHT - MB + 20.0
        );
        for m in 2..10 {
            let tm = t * m as f64;
            if tm.log10() < lo || tm.log10() > hi {
                continue;
            }
            let xm = ML + (tm.log10() - lo) / (hi - lo) * (WIDTH - ML - MR);
            let _ = writeln!(
                w,
                "<line x1=\"{xm:.2}\" y1=\"{:.2}\" x2=\"{xm:.2}\" y2=\"{:.2}\"/>",
                HEIGHT - MB,
                HEIGHT - MB + 3.0
            );
        }
    }
    let _ = writeln!(
        w,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" stroke=\"none\" \
         fill=\"#333333\">t</text>",
        (ML + WIDTH - MR) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(w, "</g>");

    // y axis: nice linear ticks
    let _ = writeln!(w, "<g class=\"axis-y\" stroke=\"#333333\">");
    let _ = writeln!(
        w,
        "<line x1=\"{ML:.2}\" y1=\"{MT:.2}\" x2=\"{ML:.2}\" y2=\"{:.2}\"/>",
        HEIGHT - MB
    );
    let step = nice_step((ymax - ymin) / 6.0);
    let mut tick = (ymin / step).ceil() * step;
    while tick <= ymax {
        let y = py(tick);
        let _ = writeln!(w, "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{ML:.2}\" y2=\"{y:.2}\"/>", ML - 6.0);
        let _ = writeln!(
            w,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" stroke=\"none\" \
             fill=\"#333333\">{tick:.2}</text>",
            ML - 10.0,
            y + 4.0
        );
        tick += step;
    }
    let _ = writeln!(w, "</g>");

    // the asymptotic floor
    let yref = py(1.0);
    let _ = writeln!(
        w,
        "<line id=\"ref-unity\" x1=\"{ML:.2}\" y1=\"{yref:.2}\" x2=\"{:.2}\" y2=\"{yref:.2}\" \
         stroke=\"#b03a2e\" stroke-dasharray=\"6 4\" stroke-width=\"1\"/>",
        WIDTH - MR
    );

    for s in series {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(t, v)| format!("{:.2},{:.2}", px(t), py(v)))
            .collect();
        let _ = writeln!(
            w,
            "<polyline class=\"series {}\" data-label=\"{}\" data-points=\"{}\" fill=\"none\" \
             stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>",
            s.class.class_name(),
            s.label,
            s.points.len(),
            s.class.stroke(),
            pts.join(" ")
        );
    }

    // legend: individual entries while they fit, one grouped entry per class
    // beyond that
    let legend_x = WIDTH - MR + 16.0;
    let mut entries: Vec<(ColorClass, String)> = Vec::new();
    if series.len() <= 12 {
        entries.extend(series.iter().map(|s| (s.class, s.label.clone())));
    } else {
        for class in [ColorClass::Grey, ColorClass::Black, ColorClass::Accent] {
            let in_class: Vec<&PlotSeries> = series.iter().filter(|s| s.class == class).collect();
            match in_class.as_slice() {
                [] => {}
                [only] => entries.push((class, only.label.clone())),
                [first, .., last] => {
                    entries.push((class, format!("{} .. {}", first.label, last.label)))
                }
            }
        }
    }
    let _ = writeln!(w, "<g class=\"legend\">");
    for (i, (class, label)) in entries.iter().enumerate() {
        let y = MT + 14.0 + 18.0 * i as f64;
        let _ = writeln!(
            w,
            "<line x1=\"{legend_x:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
             stroke=\"{}\" stroke-width=\"2\"/>",
            y - 4.0,
            legend_x + 22.0,
            y - 4.0,
            class.stroke()
        );
        let _ = writeln!(
            w,
            "<text x=\"{:.2}\" y=\"{y:.2}\" fill=\"#333333\">{label}</text>",
            legend_x + 28.0
        );
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, "</svg>");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_series() -> Vec<PlotSeries> {
        vec![PlotSeries {
            label: "z=5".into(),
            class: ColorClass::Grey,
            points: vec![(1000, 1.2), (10_000, 1.1)],
        }]
    }

    #[test]
    fn single_series_structure() {
        let svg = render_bz_plot(&one_series(), 1000, 100_000).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("id=\"ref-unity\""));
        assert!(svg.contains("data-scale=\"log10\""));
        assert!(svg.contains("1e3"));
        assert!(svg.contains("1e5"));
    }

    #[test]
    fn empty_series_list_rejected() {
        assert!(matches!(
            render_bz_plot(&[], 10, 100),
            Err(Error::InvalidArgument(_))
        ));
        assert!(render_bz_plot(&one_series(), 100, 100).is_err());
    }

    #[test]
    fn twenty_series_two_classes() {
        let mut series = Vec::new();
        for z in 101..=110u64 {
            series.push(PlotSeries {
                label: format!("z={z}"),
                class: ColorClass::Grey,
                points: vec![(1000, 1.0 + z as f64 / 1000.0), (10_000, 1.2)],
            });
        }
        for z in 1001..=1010u64 {
            series.push(PlotSeries {
                label: format!("z={z}"),
                class: ColorClass::Black,
                points: if z == 1006 { vec![] } else { vec![(5000, 1.4)] },
            });
        }
        let svg = render_bz_plot(&series, 1000, 100_000).unwrap();
        assert_eq!(svg.matches("class=\"series grey\"").count(), 10);
        assert_eq!(svg.matches("class=\"series black\"").count(), 10);
        // the empty series still declares itself
        assert!(svg.contains("data-label=\"z=1006\" data-points=\"0\""));
        // grouped legend
        assert!(svg.contains("z=101 .. z=110"));
    }

    #[test]
    fn deterministic_output() {
        let a = render_bz_plot(&one_series(), 1000, 100_000).unwrap();
        let b = render_bz_plot(&one_series(), 1000, 100_000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_points() {
        let bad = vec![PlotSeries {
            label: "x".into(),
            class: ColorClass::Accent,
            points: vec![(50, f64::NAN)],
        }];
        assert!(render_bz_plot(&bad, 10, 100).is_err());
        let unsorted = vec![PlotSeries {
            label: "x".into(),
            class: ColorClass::Accent,
            points: vec![(90, 1.0), (20, 1.0)],
        }];
        assert!(render_bz_plot(&unsorted, 10, 100).is_err());
    }
}
