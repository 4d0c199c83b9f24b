//! Report rendering: text tables, CSV dumps and the SVG histogram of MSE
//! values. Everything is a pure string of the report contents, so a rerun
//! with identical inputs rewrites identical bytes.

use std::fmt::Write as _;

use crate::pipeline::experiment::{
    CellCurve, ModelFamily, MseRow, Regime, RegimeRow, RunReport, EPOCH_CHECKPOINTS,
};

pub fn mse_csv(rows: &[MseRow]) -> String {
    let mut out = String::from("id,mse_he,mse_proposed\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.id, r.he, r.proposed);
    }
    out
}

/// Error grid at the epoch checkpoints, Table-3 style.
pub fn grid_csv(curves: &[CellCurve]) -> String {
    let mut out = String::from("regime,model,hidden,batch,epoch,v_error,t_error,v_loss,t_loss\n");
    for c in curves {
        for &ep in EPOCH_CHECKPOINTS.iter().filter(|&&e| e <= c.history.len()) {
            let m = &c.history[ep - 1];
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                c.regime.name(),
                c.family.name(),
                c.cell.hidden,
                c.cell.batch,
                ep,
                m.v_error,
                m.t_error,
                m.v_loss,
                m.t_loss
            );
        }
    }
    out
}

/// Accuracy/sensitivity/specificity/confusion rows, Table-4 style.
pub fn metrics_csv(rows: &[RegimeRow]) -> String {
    let mut out = String::from(
        "regime,model,hidden,batch,accuracy,sensitivity,specificity,tp,fp,tn,fn\n",
    );
    for r in rows {
        let c = r.metrics.confusion;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.regime.name(),
            r.family.name(),
            r.cell.hidden,
            r.cell.batch,
            r.metrics.accuracy,
            r.metrics.sensitivity,
            r.metrics.specificity,
            c.tp,
            c.fp,
            c.tn,
            c.fn_
        );
    }
    out
}

/// Histogram of the MSE values of both methods as a self-contained SVG.
pub fn mse_histogram_svg(rows: &[MseRow]) -> String {
    const BINS: usize = 12;
    const W: f64 = 640.0;
    const H: f64 = 360.0;
    const MARGIN: f64 = 45.0;

    let values: Vec<f64> = rows.iter().flat_map(|r| [r.he, r.proposed]).collect();
    let hi = values.iter().cloned().fold(0.0f64, f64::max).max(1e-12);
    let mut he_bins = [0usize; BINS];
    let mut prop_bins = [0usize; BINS];
    for r in rows {
        let b = |v: f64| ((v / hi * BINS as f64) as usize).min(BINS - 1);
        he_bins[b(r.he)] += 1;
        prop_bins[b(r.proposed)] += 1;
    }
    let peak = he_bins.iter().chain(&prop_bins).copied().max().unwrap_or(1).max(1) as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">MSE histogram: reference HE vs proposed</text>",
        MARGIN
    );
    let plot_w = W - 2.0 * MARGIN;
    let plot_h = H - 2.0 * MARGIN;
    let bar_w = plot_w / BINS as f64 / 2.2;
    for (i, (&he, &prop)) in he_bins.iter().zip(&prop_bins).enumerate() {
        let x0 = MARGIN + i as f64 * plot_w / BINS as f64;
        for (offset, count, color) in
            [(0.0, he, "#d95f02"), (bar_w, prop, "#1b9e77")]
        {
            let h = plot_h * count as f64 / peak;
            let _ = writeln!(
                svg,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                x0 + offset,
                H - MARGIN - h,
                bar_w,
                h,
                color
            );
        }
    }
    let _ = writeln!(
        svg,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>",
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">0</text>",
        MARGIN,
        H - MARGIN + 16.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{hi:.4}</text>",
        W - MARGIN - 30.0,
        H - MARGIN + 16.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"36\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#d95f02\">HE</text>",
        MARGIN
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"36\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#1b9e77\">proposed</text>",
        MARGIN + 30.0
    );
    svg.push_str("</svg>\n");
    svg
}

/// Human-readable summary of the whole run.
pub fn render_report(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str("retcad run report\n=================\n\n");

    if !report.mse_rows.is_empty() {
        out.push_str("MSE vs original (reference HE / proposed)\n");
        let _ = writeln!(out, "{:<12} {:>12} {:>12}", "image", "he", "proposed");
        for r in &report.mse_rows {
            let _ = writeln!(out, "{:<12} {:>12.6} {:>12.6}", r.id, r.he, r.proposed);
        }
        let better =
            report.mse_rows.iter().filter(|r| r.proposed < r.he).count();
        let _ = writeln!(
            out,
            "proposed below HE on {better}/{} images\n",
            report.mse_rows.len()
        );
    }

    if !report.t_final_counts.is_empty() {
        out.push_str("dynamic structuring element t_final distribution\n");
        for (t, count) in &report.t_final_counts {
            let _ = writeln!(out, "  t = {t:>2}: {count} bands");
        }
        out.push('\n');
    }

    if !report.curves.is_empty() {
        out.push_str("error grid (checkpoint epochs)\n");
        let _ = writeln!(
            out,
            "{:<7} {:<5} {:>3} {:>4} {:>6} {:>10} {:>10}",
            "regime", "model", "hu", "bs", "epoch", "v_error%", "t_error%"
        );
        for c in &report.curves {
            for &ep in EPOCH_CHECKPOINTS.iter().filter(|&&e| e <= c.history.len()) {
                let m = &c.history[ep - 1];
                let _ = writeln!(
                    out,
                    "{:<7} {:<5} {:>3} {:>4} {:>6} {:>10.4} {:>10.4}",
                    c.regime.name(),
                    c.family.name(),
                    c.cell.hidden,
                    c.cell.batch,
                    ep,
                    m.v_error,
                    m.t_error
                );
            }
        }
        out.push('\n');
    }

    if !report.regime_rows.is_empty() {
        out.push_str("best grid cells (test split)\n");
        let _ = writeln!(
            out,
            "{:<7} {:<5} {:>3} {:>4} {:>9} {:>12} {:>12}  confusion (tp fp tn fn)",
            "regime", "model", "hu", "bs", "accuracy", "sensitivity", "specificity"
        );
        for r in &report.regime_rows {
            let c = r.metrics.confusion;
            let _ = writeln!(
                out,
                "{:<7} {:<5} {:>3} {:>4} {:>9.2} {:>12.2} {:>12.2}  {:.2} {:.2} {:.2} {:.2}",
                r.regime.name(),
                r.family.name(),
                r.cell.hidden,
                r.cell.batch,
                r.metrics.accuracy,
                r.metrics.sensitivity,
                r.metrics.specificity,
                c.tp,
                c.fp,
                c.tn,
                c.fn_
            );
        }
        out.push('\n');
    }

    // Comparative summary mirroring the headline claims.
    let best = |regime: Regime, family: ModelFamily| {
        report
            .regime_rows
            .iter()
            .find(|r| r.regime == regime && r.family == family)
            .map(|r| r.metrics.accuracy)
    };
    if let (Some(wnn), Some(mlp)) = (
        best(Regime::AfterEnhancement, ModelFamily::Wnn),
        best(Regime::AfterEnhancement, ModelFamily::Mlp),
    ) {
        let _ = writeln!(
            out,
            "after-enhancement best accuracy: wnn {wnn:.2}% vs mlp {mlp:.2}%"
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::config::PipelineConfig;
    use crate::pipeline::experiment::{run_experiment, synthetic_image_set, ExperimentConfig};

    #[test]
    fn report_artifacts_are_deterministic_strings() {
        let cfg = PipelineConfig::default();
        let exp = ExperimentConfig { epochs: 12, ..Default::default() };
        let images = synthetic_image_set(16, 64, 3);
        let report = run_experiment(&images, &cfg, &exp).unwrap();

        let text_a = render_report(&report);
        let csv_a = mse_csv(&report.mse_rows);
        let svg_a = mse_histogram_svg(&report.mse_rows);
        let grid_a = grid_csv(&report.curves);
        let metrics_a = metrics_csv(&report.regime_rows);

        let report_b = run_experiment(&images, &cfg, &exp).unwrap();
        assert_eq!(text_a, render_report(&report_b));
        assert_eq!(csv_a, mse_csv(&report_b.mse_rows));
        assert_eq!(svg_a, mse_histogram_svg(&report_b.mse_rows));
        assert_eq!(grid_a, grid_csv(&report_b.curves));
        assert_eq!(metrics_a, metrics_csv(&report_b.regime_rows));

        assert!(svg_a.starts_with("<svg"));
        assert!(text_a.contains("error grid"));
        // Timings exist in memory but never in the artifacts.
        assert!(!report.timings.is_empty());
        assert!(!text_a.contains("seconds"));
    }
}
