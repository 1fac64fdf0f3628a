//! Plot-ready CSV extracted from result envelopes.

use std::io::Write;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Command;
use crate::envelope::ResultEnvelope;
use crate::error::{usage, CliResult};

const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    /// Stage measure and partial sum against n.
    StageMeasure,
    /// Ubiquity ratio against n, one series per ball.
    Ratio,
    /// Histogram of R(x, N) over its prediction.
    Histogram,
    /// Running maximum of pen / log t against log t.
    Loglaw,
    /// Horoball count ratio against log R.
    HoroballRatio,
}

impl PlotKind {
    pub fn source(self) -> Command {
        match self {
            PlotKind::StageMeasure => Command::StageScan,
            PlotKind::Ratio => Command::Ubiquity,
            PlotKind::Histogram => Command::Schmidt,
            PlotKind::Loglaw => Command::Loglaw,
            PlotKind::HoroballRatio => Command::Horoballs,
        }
    }

    /// The natural plot for a command's envelope, if it has one.
    pub fn for_command(command: Command) -> Option<Self> {
        [PlotKind::StageMeasure, PlotKind::Ratio, PlotKind::Histogram, PlotKind::Loglaw, PlotKind::HoroballRatio]
            .into_iter()
            .find(|k| k.source() == command)
    }

    fn header(self) -> &'static [&'static str] {
        match self {
            PlotKind::StageMeasure => &["n", "measure", "partial_sum"],
            PlotKind::Ratio => &["ball", "n", "ratio"],
            PlotKind::Histogram => &["bin_lo", "bin_hi", "count"],
            PlotKind::Loglaw => &["log_t", "running_max"],
            PlotKind::HoroballRatio => &["log_r", "ratio"],
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Writes the columns of `kind`. An empty payload yields the header alone.
pub fn emit_plot_data<W: Write>(env: &ResultEnvelope, kind: PlotKind, w: W) -> CliResult<()> {
    let command = env.config.command;
    if kind.source() != command {
        return Err(usage(format!("plot kind {kind:?} needs a {} envelope, got {command}", kind.source())));
    }
    let p = &env.payload;
    let col = |name: &str| p.column(name).ok_or_else(|| usage(format!("envelope has no `{name}` column")));
    let mut out = csv::Writer::from_writer(w);
    out.write_record(kind.header()).map_err(std::io::Error::from)?;
    match kind {
        PlotKind::Histogram => {
            let i = col("ratio")?;
            let values: Vec<f64> = p.rows.iter().filter_map(|r| r[i].as_f64()).collect();
            for (lo, hi, count) in histogram(&values, HISTOGRAM_BINS) {
                out.write_record([lo.to_string(), hi.to_string(), count.to_string()]).map_err(std::io::Error::from)?;
            }
        }
        PlotKind::Ratio => {
            let (lo, hi, n, ratio) = (col("ball_lo")?, col("ball_hi")?, col("n")?, col("ratio")?);
            for r in &p.rows {
                let ball = format!("{}:{}", cell(&r[lo]), cell(&r[hi]));
                out.write_record([ball, cell(&r[n]), cell(&r[ratio])]).map_err(std::io::Error::from)?;
            }
        }
        _ => {
            let idx = kind.header().iter().map(|c| col(c)).collect::<CliResult<Vec<_>>>()?;
            for r in &p.rows {
                out.write_record(idx.iter().map(|&i| cell(&r[i]))).map_err(std::io::Error::from)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Equal-width bins over `[min, max]`; the last bin is closed.
fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    let Some(min) = values.iter().copied().reduce(f64::min) else {
        return Vec::new();
    };
    let max = values.iter().copied().fold(min, f64::max);
    if max == min {
        return vec![(min, max, values.len())];
    }
    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let b = (((v - min) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (min + i as f64 * width, if i + 1 == bins { max } else { min + (i + 1) as f64 * width }, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts_everything() {
        let v: Vec<f64> = (0..101).map(|i| i as f64 / 100.0).collect();
        let h = histogram(&v, 10);
        assert_eq!(h.len(), 10);
        assert_eq!(h.iter().map(|b| b.2).sum::<usize>(), 101);
        assert_eq!(h[9].1, 1.0);
        assert_eq!(histogram(&[2.0, 2.0], 5), vec![(2.0, 2.0, 2)]);
        assert!(histogram(&[], 5).is_empty());
    }

    #[test]
    fn every_kind_has_a_source() {
        for kind in PlotKind::value_variants() {
            assert_eq!(PlotKind::for_command(kind.source()), Some(*kind));
        }
        assert_eq!(PlotKind::for_command(Command::Classify), None);
    }
}
