//! CSV, JSON and SVG artifacts.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use lowmach_core::diagnostics::EnergyReport;
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::run::{CpeRow, PairRun, PeRow};
use crate::svg::{LinePlot, Series};
use crate::sweep::{SweepReport, SweepSummary};

pub const REPORT_COLUMNS: [&str; 14] = [
    "t",
    "E",
    "E_psi_h2",
    "E_eps_psit_l2",
    "E_xi_h2",
    "E_xit_l2",
    "D",
    "mass",
    "momentum_x",
    "momentum_y",
    "pe_l2_sq",
    "conv_h2_v",
    "conv_h2_rho",
    "conv_h1_w",
];

/// 17 significant digits: enough to round-trip every `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn report_record(r: &EnergyReport) -> [f64; 14] {
    [
        r.t,
        r.energy.total(),
        r.energy.psi_h2,
        r.energy.eps_psit_l2,
        r.energy.xi_h2,
        r.energy.xit_l2,
        r.dissipation.total(),
        r.mass,
        r.momentum[0],
        r.momentum[1],
        r.pe_l2_sq,
        r.convergence.v_h2,
        r.convergence.rho_h2,
        r.convergence.w_h1,
    ]
}

fn write_rows<const N: usize>(out: impl Write, header: [&str; N], rows: impl Iterator<Item = [f64; N]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|x| fmt_f64(*x)))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_reports_csv(out: impl Write, reports: &[EnergyReport]) -> Result<()> {
    write_rows(out, REPORT_COLUMNS, reports.iter().map(report_record))
}

pub fn write_pe_csv(out: impl Write, rows: &[PeRow]) -> Result<()> {
    let header = ["step", "t", "l2_sq", "momentum_x", "momentum_y", "dissipation"];
    write_rows(
        out,
        header,
        rows.iter()
            .map(|r| [r.step as f64, r.t, r.l2_sq, r.momentum_x, r.momentum_y, r.dissipation]),
    )
}

pub fn write_cpe_csv(out: impl Write, rows: &[CpeRow]) -> Result<()> {
    let header = [
        "step",
        "t",
        "mass",
        "momentum_x",
        "momentum_y",
        "total_energy",
        "rho_min",
        "rho_max",
    ];
    write_rows(
        out,
        header,
        rows.iter().map(|r| {
            [
                r.step as f64,
                r.t,
                r.mass,
                r.momentum_x,
                r.momentum_y,
                r.total_energy,
                r.rho_min,
                r.rho_max,
            ]
        }),
    )
}

/// Parse a CSV written by [`write_reports_csv`] back into columns.
pub fn read_csv_columns(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut cols = vec![Vec::new(); header.len()];
    for rec in r.records() {
        let rec = rec?;
        for (c, field) in cols.iter_mut().zip(rec.iter()) {
            let v = field
                .parse::<f64>()
                .map_err(|e| HarnessError::Config(vec![format!("bad number `{field}`: {e}")]))?;
            c.push(v);
        }
    }
    Ok((header, cols))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn create(path: &Path) -> Result<fs::File> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    fs::File::create(path).map_err(|e| HarnessError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    create(path)?
        .write_all(text.as_bytes())
        .map_err(|e| HarnessError::io(path, e))
}

pub fn pair_csv_name(eps: f64) -> String {
    format!("pair_eps_{eps}.csv")
}

/// `pair_eps_<ε>.csv` into `dir`.
pub fn write_pair(dir: &Path, run: &PairRun) -> Result<PathBuf> {
    let path = dir.join(pair_csv_name(run.eps));
    write_reports_csv(create(&path)?, &run.reports)?;
    Ok(path)
}

pub fn write_pe(dir: &Path, rows: &[PeRow]) -> Result<PathBuf> {
    let path = dir.join("pe.csv");
    write_pe_csv(create(&path)?, rows)?;
    Ok(path)
}

pub fn write_cpe(dir: &Path, eps: f64, rows: &[CpeRow]) -> Result<PathBuf> {
    let path = dir.join(format!("cpe_eps_{eps}.csv"));
    write_cpe_csv(create(&path)?, rows)?;
    Ok(path)
}

/// Log-log plot of the sup-in-time errors against ε.
pub fn rate_plot(summary: &SweepSummary) -> String {
    let pts = |f: &dyn Fn(&crate::sweep::SweepEntry) -> f64| -> Vec<(f64, f64)> {
        summary.entries.iter().map(|e| (e.eps, f(e))).collect()
    };
    let v = pts(&|e| e.sup.v_h2);
    let first = v[0];
    let reference: Vec<(f64, f64)> = v.iter().map(|&(e, _)| (e, first.1 * e / first.0)).collect();
    LinePlot {
        title: format!("sup-in-time errors (slope {:.3})", summary.slope),
        x_label: "eps".into(),
        y_label: "norm".into(),
        log_x: true,
        log_y: true,
        series: vec![
            Series::new("|v - v_p|_H2", v),
            Series::new("|xi|_H2", pts(&|e| e.sup.xi_h2)),
            Series::new("|w - w_p|_H1", pts(&|e| e.sup.w_h1)),
            Series::new("slope 1", reference),
        ],
    }
    .render()
}

/// `E(t)/ε²` for every ε.
pub fn energy_plot(runs: &[PairRun]) -> String {
    LinePlot {
        title: "E(t) / eps^2".into(),
        x_label: "t".into(),
        y_label: "E / eps^2".into(),
        log_x: false,
        log_y: true,
        series: runs
            .iter()
            .map(|r| {
                let e2 = r.eps * r.eps;
                Series::new(
                    &format!("eps = {}", r.eps),
                    r.reports
                        .iter()
                        .map(|x| (x.t, x.energy.total() / e2))
                        .filter(|p| p.1 > 0.0)
                        .collect(),
                )
            })
            .collect(),
    }
    .render()
}

/// Every artifact of a sweep; returns the written paths.
pub fn write_sweep(dir: &Path, report: &SweepReport) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for run in &report.runs {
        paths.push(write_pair(dir, run)?);
    }
    let summary = dir.join("summary.json");
    write_text(&summary, &to_json(&report.summary))?;
    paths.push(summary);
    let rates = dir.join("rates.svg");
    write_text(&rates, &rate_plot(&report.summary))?;
    paths.push(rates);
    let energy = dir.join("energy.svg");
    write_text(&energy, &energy_plot(&report.runs))?;
    paths.push(energy);
    Ok(paths)
}
