//! CSV, JSON and minimal SVG emitters for run artifacts.
//!
//! Everything renders to strings; the CLI decides where files live. The
//! SVG output is a self-contained line plot / heatmap with no external
//! renderer dependency, meant for quick inspection rather than publication.

use std::fmt::Write as _;

use crate::dirac::SpinorField;
use crate::lattice::{LatticeEigensystem, LevelClass, SublatticeEnvelopes};
use crate::spectroscopy::{LdosMap, SpectrumTrace, TraceValues};

/// Continuum level set: `n, e_mhz, residual`.
pub fn csv_levels(levels: &crate::dirac::LevelSet) -> String {
    let mut s = String::from("n,e_mhz,residual\n");
    for (i, (e, r)) in levels.energies_mhz.iter().zip(&levels.residuals).enumerate() {
        let _ = writeln!(s, "{},{},{}", i + 1, e, r);
    }
    s
}

/// Spinor field as JSON arrays (`x_mm`, `re1`, `im1`, `re2`, `im2`).
pub fn spinor_field_json(field: &SpinorField) -> serde_json::Value {
    serde_json::json!({
        "x_mm": field.x_mm,
        "re1": field.comp1.iter().map(|c| c.re).collect::<Vec<f64>>(),
        "im1": field.comp1.iter().map(|c| c.im).collect::<Vec<f64>>(),
        "re2": field.comp2.iter().map(|c| c.re).collect::<Vec<f64>>(),
        "im2": field.comp2.iter().map(|c| c.im).collect::<Vec<f64>>(),
    })
}

/// Levels side by side: `index, f_lattice_mhz, e_lattice_mhz, e_continuum_mhz, delta_mhz`.
pub fn csv_level_comparison(cmp: &crate::lattice::LevelComparison, f0_mhz: f64) -> String {
    let mut s = String::from("index,f_lattice_mhz,e_lattice_mhz,e_continuum_mhz,delta_mhz\n");
    for i in 0..cmp.lattice_mhz.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            i + 1,
            cmp.lattice_mhz[i] + f0_mhz,
            cmp.lattice_mhz[i],
            cmp.continuum_mhz[i],
            cmp.delta_mhz[i]
        );
    }
    s
}

/// Full eigensystem: `index, f_mhz, class`.
pub fn csv_eigensystem(eig: &LatticeEigensystem) -> String {
    let mut s = String::from("index,f_mhz,class\n");
    for (i, f) in eig.frequencies_mhz.iter().enumerate() {
        let class = match eig.classes.get(i) {
            Some(LevelClass::HoleBand) => "hole_band",
            Some(LevelClass::KleinWindow) => "klein_window",
            Some(LevelClass::ParticleBand) => "particle_band",
            None => "unclassified",
        };
        let _ = writeln!(s, "{},{},{}", i, f, class);
    }
    s
}

/// Spinor field samples: `x_mm, re1, im1, re2, im2`.
pub fn csv_spinor_field(field: &SpinorField) -> String {
    let mut s = String::from("x_mm,re1,im1,re2,im2\n");
    for i in 0..field.x_mm.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            field.x_mm[i],
            field.comp1[i].re,
            field.comp1[i].im,
            field.comp2[i].re,
            field.comp2[i].im
        );
    }
    s
}

/// Envelope profile: `site, sublattice, x_mm, intensity`.
pub fn csv_envelopes(env: &SublatticeEnvelopes) -> String {
    let mut s = String::from("site,sublattice,x_mm,intensity\n");
    for (j, (x, v)) in env.a_x_mm.iter().zip(&env.a_intensity).enumerate() {
        let _ = writeln!(s, "{},A,{},{}", j + 1, x, v);
    }
    for (j, (x, v)) in env.b_x_mm.iter().zip(&env.b_intensity).enumerate() {
        let _ = writeln!(s, "{},B,{},{}", j + 1, x, v);
    }
    s
}

/// Reflection trace: `freq_mhz, re, im`; LDOS trace: `freq_mhz, ldos`.
pub fn csv_trace(trace: &SpectrumTrace) -> String {
    match &trace.values {
        TraceValues::Reflection(v) => {
            let mut s = String::from("freq_mhz,re,im\n");
            for (f, z) in trace.freq_mhz.iter().zip(v) {
                let _ = writeln!(s, "{},{},{}", f, z.re, z.im);
            }
            s
        }
        TraceValues::Ldos(v) => {
            let mut s = String::from("freq_mhz,ldos\n");
            for (f, y) in trace.freq_mhz.iter().zip(v) {
                let _ = writeln!(s, "{},{}", f, y);
            }
            s
        }
    }
}

/// LDOS map as a matrix with a site header column and frequency header row.
pub fn csv_ldos_map(map: &LdosMap) -> String {
    let mut s = String::from("site");
    for f in &map.freq_mhz {
        let _ = write!(s, ",{f}");
    }
    s.push('\n');
    for (row, site) in map.values.iter().zip(&map.sites) {
        let _ = write!(s, "{site}");
        for v in row {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

const PLOT_W: f64 = 800.0;
const PLOT_H: f64 = 480.0;
const MARGIN: f64 = 50.0;

fn map_x(x: f64, lo: f64, hi: f64) -> f64 {
    MARGIN + (x - lo) / (hi - lo).max(1e-300) * (PLOT_W - 2.0 * MARGIN)
}

fn map_y(y: f64, lo: f64, hi: f64) -> f64 {
    PLOT_H - MARGIN - (y - lo) / (hi - lo).max(1e-300) * (PLOT_H - 2.0 * MARGIN)
}

/// Minimal multi-series line plot. `series` pairs a label with points.
pub fn svg_line_plot(title: &str, series: &[(&str, &[(f64, f64)])]) -> String {
    let all = series.iter().flat_map(|(_, pts)| pts.iter());
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if !x_lo.is_finite() {
        (x_lo, x_hi, y_lo, y_hi) = (0.0, 1.0, 0.0, 1.0);
    }
    if y_lo == y_hi {
        y_hi = y_lo + 1.0;
    }
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" \
         viewBox=\"0 0 {PLOT_W} {PLOT_H}\">\n\
         <rect width=\"{PLOT_W}\" height=\"{PLOT_H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{}</text>\n",
        PLOT_W / 2.0,
        xml_escape(title)
    );
    // Axes.
    let _ = writeln!(
        s,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>",
        m = MARGIN,
        r = PLOT_W - MARGIN,
        t = MARGIN,
        b = PLOT_H - MARGIN
    );
    let _ = writeln!(
        s,
        "<text x=\"{m}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"11\">{x_lo:.4}</text>\n\
         <text x=\"{r}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"end\">{x_hi:.4}</text>\n\
         <text x=\"{xlab}\" y=\"{t}\" font-family=\"sans-serif\" font-size=\"11\">{y_hi:.4}</text>\n\
         <text x=\"{xlab}\" y=\"{b}\" font-family=\"sans-serif\" font-size=\"11\">{y_lo:.4}</text>",
        m = MARGIN,
        r = PLOT_W - MARGIN,
        y = PLOT_H - MARGIN + 16.0,
        xlab = 4.0,
        t = MARGIN + 4.0,
        b = PLOT_H - MARGIN
    );
    for (idx, (label, pts)) in series.iter().enumerate() {
        if pts.is_empty() {
            continue;
        }
        let color = colors[idx % colors.len()];
        let path: String = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| {
                format!(
                    "{}{:.2},{:.2}",
                    if i == 0 { "M" } else { " L" },
                    map_x(x, x_lo, x_hi),
                    map_y(y, y_lo, y_hi)
                )
            })
            .collect();
        let _ = writeln!(s, "<path d=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\"/>");
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
             fill=\"{color}\">{}</text>",
            PLOT_W - MARGIN - 120.0,
            MARGIN + 16.0 * (idx as f64 + 1.0),
            xml_escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Heatmap of `values[row][col]` over the given axes (row = y).
pub fn svg_heatmap(
    title: &str,
    x_axis: &[f64],
    y_axis: &[f64],
    values: &[Vec<f64>],
) -> String {
    let v_max = values
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, &v| m.max(v))
        .max(1e-300);
    let (rows, cols) = (values.len(), x_axis.len());
    let cell_w = (PLOT_W - 2.0 * MARGIN) / cols as f64;
    let cell_h = (PLOT_H - 2.0 * MARGIN) / rows as f64;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" \
         viewBox=\"0 0 {PLOT_W} {PLOT_H}\">\n\
         <rect width=\"{PLOT_W}\" height=\"{PLOT_H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{}</text>\n",
        PLOT_W / 2.0,
        xml_escape(title)
    );
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let x = MARGIN + j as f64 * cell_w;
            let y = PLOT_H - MARGIN - (i as f64 + 1.0) * cell_h;
            let _ = writeln!(
                s,
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                cell_w + 0.5,
                cell_h + 0.5,
                heat_color(v / v_max)
            );
        }
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{:.2} .. {:.2} MHz, \
         {} rows</text>",
        MARGIN,
        PLOT_H - MARGIN + 16.0,
        x_axis.first().copied().unwrap_or(0.0),
        x_axis.last().copied().unwrap_or(0.0),
        y_axis.len()
    );
    s.push_str("</svg>\n");
    s
}

/// Dark-blue to yellow ramp on [0, 1].
fn heat_color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0).powf(0.5);
    let r = (255.0 * t) as u8;
    let g = (224.0 * t * t + 16.0 * t) as u8;
    let b = (96.0 * (1.0 - t) + 32.0) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
