//! CSV tables. Floats use the shortest representation that parses back to
//! the same value, so equal results give equal bytes.

use std::io::Write;

use vemsupg_core::analysis::{ErrorReport, LayerSample};
use vemsupg_core::mesh::MeshFamily;

use crate::pipeline::{ConvergenceRun, LayerRun};

pub const CONVERGENCE_HEADER: [&str; 11] = [
    "family",
    "k",
    "refinement",
    "h_max",
    "ndof",
    "err_l2",
    "err_h1",
    "err_energy",
    "rate_l2",
    "rate_h1",
    "rate_energy",
];

pub const SWEEP_HEADER: [&str; 9] = ["family", "k", "n", "alpha", "h_max", "ndof", "err_l2", "err_h1", "err_energy"];

pub const LAYER_HEADER: [&str; 11] = [
    "family",
    "k",
    "n",
    "h_max",
    "ndof",
    "min",
    "max",
    "plateau_low",
    "plateau_high",
    "n_low",
    "n_high",
];

pub const SAMPLES_HEADER: [&str; 3] = ["x", "y", "u"];

/// Family label of a row; meshes read from a file have none.
pub fn family_label(family: Option<MeshFamily>) -> &'static str {
    family.map_or("file", MeshFamily::as_str)
}

fn opt(v: Option<f64>) -> String {
    v.map(|r| r.to_string()).unwrap_or_default()
}

/// One row per refinement; the rates of the first row of every run are empty.
pub fn write_convergence<W: Write>(out: W, runs: &[ConvergenceRun]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CONVERGENCE_HEADER)?;
    for run in runs {
        let rates = run.table.rates();
        for ((r, rate), refinement) in run.table.rows.iter().zip(&rates).zip(&run.refinements) {
            w.write_record([
                family_label(run.family).to_string(),
                run.k.to_string(),
                refinement.to_string(),
                r.h_max.to_string(),
                r.ndof.to_string(),
                r.err_l2.to_string(),
                r.err_h1.to_string(),
                r.err_energy.to_string(),
                opt(rate[0]),
                opt(rate[1]),
                opt(rate[2]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub family: MeshFamily,
    pub k: usize,
    pub n: usize,
    pub alpha: f64,
    pub report: ErrorReport,
}

pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for row in rows {
        let r = &row.report;
        w.write_record([
            row.family.as_str().to_string(),
            row.k.to_string(),
            row.n.to_string(),
            row.alpha.to_string(),
            r.h_max.to_string(),
            r.ndof.to_string(),
            r.err_l2.to_string(),
            r.err_h1.to_string(),
            r.err_energy.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct LayerRow {
    pub family: Option<MeshFamily>,
    pub k: usize,
    pub n: usize,
    pub run: LayerRun,
}

pub fn write_layer<W: Write>(out: W, rows: &[LayerRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LAYER_HEADER)?;
    for row in rows {
        let m = &row.run.metrics;
        w.write_record([
            family_label(row.family).to_string(),
            row.k.to_string(),
            row.n.to_string(),
            row.run.h_max.to_string(),
            row.run.ndof.to_string(),
            m.min.to_string(),
            m.max.to_string(),
            m.plateau_low.to_string(),
            m.plateau_high.to_string(),
            m.n_low.to_string(),
            m.n_high.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_samples<W: Write>(out: W, samples: &[LayerSample]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SAMPLES_HEADER)?;
    for s in samples {
        w.write_record([s.x.to_string(), s.y.to_string(), s.u.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use vemsupg_core::analysis::ConvergenceTable;

    fn report(e: f64) -> ErrorReport {
        ErrorReport {
            h_max: e,
            ndof: 10,
            err_l2: e,
            err_h1: e,
            err_energy: e,
            ..Default::default()
        }
    }

    #[test]
    fn convergence_rates_empty_on_first_row() {
        let mut table = ConvergenceTable::default();
        table.push(report(0.5));
        table.push(report(0.125));
        let run = ConvergenceRun {
            family: Some(MeshFamily::M1),
            k: 2,
            table,
            refinements: vec![0, 1],
            failures: vec![],
        };
        let mut buf = Vec::new();
        write_convergence(&mut buf, &[run]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CONVERGENCE_HEADER.join(","));
        assert_eq!(lines[1], "m1,2,0,0.5,10,0.5,0.5,0.5,,,");
        assert_eq!(lines[2], "m1,2,1,0.125,10,0.125,0.125,0.125,2,2,2");
    }

    #[test]
    fn floats_round_trip() {
        let s = [LayerSample { x: 0.1, y: 1.0 / 3.0, u: -2.5e-17 }];
        let mut buf = Vec::new();
        write_samples(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row, vec![s[0].x, s[0].y, s[0].u]);
    }
}
