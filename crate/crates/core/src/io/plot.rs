use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::slope::CurveMarkers;

/// One panel of a figure: a CSV emitted by [`super::write_curve`] and the
/// vertical markers to draw on it.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotPanel {
    pub title: String,
    /// Path of the CSV as the script should reference it.
    pub csv: String,
    pub bounds: bool,
    pub markers: CurveMarkers,
    pub ylabel: String,
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

fn vline(s: &mut String, x: f64, style: &str, label: &str) {
    let _ = writeln!(s, "set arrow from first {x:e}, graph 0 to first {x:e}, graph 1 nohead {style}  # {label}");
}

/// gnuplot script: log-log axes, solid curve, dash-dot bounds, dashed purple
/// `δ` line, dotted red `τ₀` line, dashed grey turning point. Several panels
/// are laid out side by side.
pub fn render_plot_script(panels: &[PlotPanel], image: &str) -> String {
    let mut s = String::new();
    let w = 640 * panels.len().max(1);
    let _ = writeln!(s, "set terminal pngcairo size {w},480 enhanced");
    let _ = writeln!(s, "set output {}", quote(image));
    s.push_str("set datafile separator ','\nset datafile missing ''\nset logscale xy\n");
    s.push_str("set format x '10^{%L}'\nset format y '10^{%L}'\nset xlabel 'τ'\nset key top left\n");
    if panels.len() > 1 {
        let _ = writeln!(s, "set multiplot layout 1,{}", panels.len());
    }
    for p in panels {
        let _ = writeln!(s, "\nset title {}", quote(&p.title));
        let _ = writeln!(s, "set ylabel {}", quote(&p.ylabel));
        if let Some(d) = p.markers.delta {
            vline(&mut s, d, "dt 2 lw 2 lc rgb 'purple'", "delta");
        }
        if let Some(t) = p.markers.tau0 {
            vline(&mut s, t, "dt 3 lw 2 lc rgb 'red'", "tau0");
        }
        if let Some(t) = p.markers.turning_point {
            vline(&mut s, t, "dt 2 lw 1 lc rgb 'gray40'", "turning point");
        }
        let csv = quote(&p.csv);
        let _ = write!(s, "plot {csv} using 1:2 with lines lw 2 lc rgb 'black' title 'min |λ|'");
        if p.bounds {
            s.push_str(", \\\n     '' using 1:3 with lines dt '-.' lc rgb 'blue' title 'lower bound'");
            s.push_str(", \\\n     '' using 1:4 with lines dt '-.' lc rgb 'blue' title 'upper bound'");
        }
        s.push('\n');
        s.push_str("unset arrow\n");
    }
    if panels.len() > 1 {
        s.push_str("unset multiplot\n");
    }
    s
}

pub fn emit_plot_script(panels: &[PlotPanel], path: &Path, image: &str) -> Result<()> {
    super::write_atomic(path, render_plot_script(panels, image).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel(bounds: bool, markers: CurveMarkers) -> PlotPanel {
        PlotPanel { title: "t".into(), csv: "c.csv".into(), bounds, markers, ylabel: "min |λ|".into() }
    }

    fn count(s: &str, prefix: &str) -> usize {
        s.lines().filter(|l| l.trim_start().starts_with(prefix)).count()
    }

    #[test]
    fn single_plain_curve() {
        let s = render_plot_script(&[panel(false, CurveMarkers::default())], "f.png");
        assert_eq!(count(&s, "plot "), 1);
        assert_eq!(count(&s, "set arrow"), 0);
        assert!(!s.contains("multiplot"));
        assert!(s.contains("set logscale xy"));
    }

    #[test]
    fn markers_become_vertical_lines() {
        let m = CurveMarkers { delta: Some(1e-7), tau0: Some(0.3), turning_point: None };
        let s = render_plot_script(&[panel(true, m)], "f.png");
        assert_eq!(count(&s, "set arrow"), 2);
        assert!(s.contains("dt '-.'"));
    }

    #[test]
    fn three_panels() {
        let p = panel(true, CurveMarkers::default());
        let s = render_plot_script(&[p.clone(), p.clone(), p], "f.png");
        assert!(s.contains("set multiplot layout 1,3"));
        assert_eq!(count(&s, "plot "), 3);
    }
}
