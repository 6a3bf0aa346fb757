use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};

use super::bounds::BoundReport;
use super::run::RunReport;
use super::sweep::SweepReport;

pub const TRANSCRIPT_HEADER: [&str; 9] = [
    "trial",
    "t",
    "x",
    "y",
    "pred_dist",
    "mistake_prob",
    "predictor_mistake",
    "learner",
    "seed",
];

pub const BOUND_HEADER: [&str; 5] = ["bound_name", "analytic", "measured_mean", "stderr", "pass"];

pub const SWEEP_HEADER: [&str; 8] = [
    "axis",
    "value",
    "measured_mean",
    "stderr",
    "predictor_mistakes_mean",
    "per_round",
    "bound_name",
    "bound",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

/// One row per round of every trial, in trial order.
pub fn write_transcripts<W: Write>(report: &RunReport, out: W) -> Result<()> {
    let labels = report.config.class.build().label_count();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRANSCRIPT_HEADER).map_err(csv_err)?;
    for trial in &report.trials {
        for r in &trial.transcript.rounds {
            w.write_record([
                trial.index.to_string(),
                r.t.to_string(),
                r.x.to_string(),
                r.y.to_string(),
                r.prediction.format_dist(labels),
                format!("{}", r.prediction.mistake_prob(r.y)),
                u8::from(r.predictor_mistake).to_string(),
                report.learner.clone(),
                trial.seed.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::Config(format!("csv: {e}")))
}

pub fn write_bounds<W: Write>(report: &BoundReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BOUND_HEADER).map_err(csv_err)?;
    for r in &report.rows {
        w.write_record([
            r.name.clone(),
            format!("{:.6}", r.analytic),
            format!("{:.6}", r.measured_mean),
            format!("{:.6}", r.stderr),
            r.pass.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Config(format!("csv: {e}")))
}

pub fn write_sweep<W: Write>(report: &SweepReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for p in &report.points {
        w.write_record([
            report.axis_name().to_string(),
            p.value.to_string(),
            format!("{:.6}", p.measured_mean),
            format!("{:.6}", p.stderr),
            format!("{:.6}", p.predictor_mistakes_mean),
            format!("{:.6}", p.per_round),
            p.bound_name.clone(),
            p.bound.map_or(String::new(), |b| format!("{b:.6}")),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Config(format!("csv: {e}")))
}

/// A line chart of measurement and bound against the sweep axis.
pub fn sweep_svg(report: &SweepReport) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let xs: Vec<f64> = report.points.iter().map(|p| p.value as f64).collect();
    let measured: Vec<f64> = report.points.iter().map(|p| p.measured_mean).collect();
    let bound: Vec<f64> = report.points.iter().filter_map(|p| p.bound).collect();
    let (x0, x1) = span(&xs);
    let (_, y1) = span(measured.iter().chain(&bound).copied().chain([0.0]).collect::<Vec<_>>().as_slice());
    let sx = |x: f64| pad + (x - x0) / (x1 - x0).max(1e-12) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - y / y1.max(1e-12) * (h - 2.0 * pad);
    let line = |ys: &[f64]| {
        xs.iter()
            .zip(ys)
            .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">"#);
    let _ = writeln!(
        s,
        r#"<line x1="{pad}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{pad}" y1="{pad}" x2="{pad}" y2="{b}" stroke="black"/>"#,
        b = h - pad,
        r = w - pad
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, w / 2.0, h - 10.0, report.axis_name());
    let _ = writeln!(s, r#"<text x="5" y="{}">{y1:.2}</text>"#, pad);
    let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" points="{}"/>"#, line(&measured));
    if bound.len() == xs.len() {
        let _ = writeln!(s, r#"<polyline fill="none" stroke="firebrick" stroke-dasharray="4" points="{}"/>"#, line(&bound));
    }
    let _ = writeln!(s, r#"<text x="{}" y="20" fill="steelblue">measured</text>"#, w - 200.0);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="36" fill="firebrick">bound ({})</text>"#,
        w - 200.0,
        report.points.first().map_or("", |p| p.bound_name.as_str())
    );
    s.push_str("</svg>\n");
    s
}

fn span(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)))
}
