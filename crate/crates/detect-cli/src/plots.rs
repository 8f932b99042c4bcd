//! Deterministic SVG rendering of ROC curves and sweep bars, plus the point
//! CSVs that back them. Identical inputs produce byte-identical files.

use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};
use crate::roc::RocCurve;
use crate::sweep::SweepResult;

const SIZE: f64 = 560.0;
const MARGIN: f64 = 60.0;

fn sx(v: f64) -> f64 {
    MARGIN + v * (SIZE - 2.0 * MARGIN)
}

fn sy(v: f64) -> f64 {
    SIZE - MARGIN - v * (SIZE - 2.0 * MARGIN)
}

fn svg_header(title: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" ",
            "viewBox=\"0 0 {s} {s}\">\n",
            "<rect width=\"{s}\" height=\"{s}\" fill=\"white\"/>\n",
            "<text x=\"{mid:.6}\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" ",
            "font-size=\"16\">{title}</text>\n"
        ),
        s = SIZE,
        mid = SIZE / 2.0,
        title = title
    )
}

fn roc_svg(name: &str, curve: &RocCurve) -> String {
    let mut svg = svg_header(&format!("{name} (AUC {:.4})", curve.auc));
    // Axes box and chance diagonal.
    svg.push_str(&format!(
        "<rect x=\"{:.6}\" y=\"{:.6}\" width=\"{:.6}\" height=\"{:.6}\" fill=\"none\" stroke=\"black\"/>\n",
        sx(0.0),
        sy(1.0),
        SIZE - 2.0 * MARGIN,
        SIZE - 2.0 * MARGIN
    ));
    svg.push_str(&format!(
        "<line x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n",
        sx(0.0),
        sy(0.0),
        sx(1.0),
        sy(1.0)
    ));
    let pts: Vec<String> = curve
        .points
        .iter()
        .rev() // from (0,0) to (1,1)
        .map(|p| format!("{:.6},{:.6}", sx(p.fpr), sy(p.tpr)))
        .collect();
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"crimson\" stroke-width=\"2\"/>\n",
        pts.join(" ")
    ));
    svg.push_str(&format!(
        "<text x=\"{:.6}\" y=\"{:.6}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">false positive rate</text>\n",
        SIZE / 2.0,
        SIZE - 18.0
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{:.6}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 {mid:.6})\">true positive rate</text>\n",
        SIZE / 2.0,
        mid = SIZE / 2.0
    ));
    svg.push_str("</svg>\n");
    svg
}

fn sweep_svg(result: &SweepResult) -> String {
    let mut svg = svg_header("AUC by method and parameters");
    let cells: Vec<_> = result.cells.iter().filter(|c| c.auc.is_some()).collect();
    if cells.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let n = cells.len() as f64;
    let band = (SIZE - 2.0 * MARGIN) / n;
    for (i, cell) in cells.iter().enumerate() {
        let auc = cell.auc.unwrap();
        let x = MARGIN + i as f64 * band;
        let y = sy(auc);
        svg.push_str(&format!(
            "<rect x=\"{:.6}\" y=\"{:.6}\" width=\"{:.6}\" height=\"{:.6}\" fill=\"steelblue\"/>\n",
            x + band * 0.1,
            y,
            band * 0.8,
            sy(0.0) - y
        ));
        svg.push_str(&format!(
            "<text x=\"{:.6}\" y=\"{:.6}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\" transform=\"rotate(-45 {:.6} {:.6})\">{}/{}/B{}/{}</text>\n",
            x + band * 0.5,
            sy(0.0) + 14.0,
            x + band * 0.5,
            sy(0.0) + 14.0,
            cell.attack,
            cell.method,
            cell.block,
            cell.param
        ));
    }
    // Chance line at 0.5.
    svg.push_str(&format!(
        "<line x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n",
        sx(0.0),
        sy(0.5),
        sx(1.0),
        sy(0.5)
    ));
    svg.push_str("</svg>\n");
    svg
}

/// Writes one SVG per named curve plus a combined `roc_points.csv`, and the
/// sweep bars + `sweep.csv` when a sweep is given. Returns the files written;
/// an empty input writes nothing and succeeds.
pub fn emit_plots(
    curves: &[(String, RocCurve)],
    sweep: Option<&SweepResult>,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if curves.is_empty() && sweep.is_none() {
        return Ok(written);
    }
    std::fs::create_dir_all(out_dir).map_err(CliError::io(out_dir))?;

    if !curves.is_empty() {
        let mut points_csv = String::from("curve,tau,fpr,tpr\n");
        for (name, curve) in curves {
            let path = out_dir.join(format!("roc_{name}.svg"));
            std::fs::write(&path, roc_svg(name, curve)).map_err(CliError::io(&path))?;
            written.push(path);
            for p in &curve.points {
                points_csv.push_str(&format!("{name},{},{},{}\n", p.tau, p.fpr, p.tpr));
            }
        }
        let path = out_dir.join("roc_points.csv");
        std::fs::write(&path, points_csv).map_err(CliError::io(&path))?;
        written.push(path);
    }

    if let Some(result) = sweep {
        let path = out_dir.join("sweep.svg");
        std::fs::write(&path, sweep_svg(result)).map_err(CliError::io(&path))?;
        written.push(path);
        let path = out_dir.join("sweep.csv");
        std::fs::write(&path, result.to_csv()).map_err(CliError::io(&path))?;
        written.push(path);
    }
    Ok(written)
}
