//! Schmidt's counting function `R(x, N) = #{q <= N : |x - p/q| < ψ(q) for some p}`.

use std::io::{self, Write};

use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{series_classify, Convergence, Rational, SeriesSpec};
use crate::seed::sample_rng;
use crate::systems::RadiusFn;

/// `q ψ(q)` for `q = 1..=N`, shared across many `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiTable {
    q_psi: Vec<f64>,
}

impl PsiTable {
    pub fn new(psi: &RadiusFn, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("N must be at least 1".into()));
        }
        let q_psi = (1..=n)
            .map(|q| Ok(q as f64 * psi.float_at(Ratio::from_integer(q as i128))?))
            .collect::<Result<Vec<_>>>()?;
        Ok(PsiTable { q_psi })
    }

    pub fn len(&self) -> u64 {
        self.q_psi.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.q_psi.is_empty()
    }

    /// `R(x, N)` for the table's `N`.
    pub fn count(&self, x: f64) -> u64 {
        let mut hits = 0;
        for (i, &bound) in self.q_psi.iter().enumerate() {
            let qx = (i + 1) as f64 * x;
            // distance from qx to the nearest integer; both neighbours are covered
            let frac = qx - qx.floor();
            if frac.min(1.0 - frac) < bound {
                hits += 1;
            }
        }
        hits
    }

    /// `2 Σ q ψ(q)`.
    pub fn prediction(&self) -> f64 {
        2.0 * self.q_psi.iter().sum::<f64>()
    }

    /// First `q` with `2 q ψ(q) >= 1`.
    pub fn first_violation(&self) -> Option<u64> {
        self.q_psi.iter().position(|&v| 2.0 * v >= 1.0).map(|i| i as u64 + 1)
    }
}

pub fn count_r(x: f64, n: u64, psi: &RadiusFn) -> Result<u64> {
    Ok(PsiTable::new(psi, n)?.count(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub value: f64,
    /// First `q` violating `2 q ψ(q) < 1`, if any.
    pub violation: Option<u64>,
}

impl Prediction {
    pub fn condition_holds(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn schmidt_prediction(psi: &RadiusFn, n: u64) -> Result<Prediction> {
    let t = PsiTable::new(psi, n)?;
    Ok(Prediction { value: t.prediction(), violation: t.first_violation() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub seed_index: u64,
    pub x: f64,
    pub n: u64,
    pub count: u64,
    pub prediction: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSummary {
    pub prediction: Prediction,
    pub mean_ratio: Option<f64>,
    pub stddev: Option<f64>,
    /// `Σ q ψ(q)` converges, so the asymptotic does not apply.
    pub outside_hypothesis: bool,
    pub records: Vec<CountRecord>,
}

/// `R(x, N) / 2Σqψ(q)` for `samples` uniform `x`; sample `i` draws from stream `i` of `seed`.
pub fn schmidt_experiment(psi: &RadiusFn, n: u64, samples: u64, seed: u64) -> Result<SchmidtSummary> {
    let table = PsiTable::new(psi, n)?;
    let prediction = Prediction { value: table.prediction(), violation: table.first_violation() };
    let outside_hypothesis = match psi {
        RadiusFn::Zero => true,
        RadiusFn::Form(f) => SeriesSpec::new(Rational::from_integer(1), None, f.clone())
            .map(|s| series_classify(&s) == Convergence::Convergent)
            .unwrap_or(false),
    };
    let records: Vec<CountRecord> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let x: f64 = sample_rng(seed, i).random();
            let count = table.count(x);
            let ratio = if prediction.value > 0.0 { count as f64 / prediction.value } else { f64::NAN };
            CountRecord { seed_index: i, x, n, count, prediction: prediction.value, ratio }
        })
        .collect();
    let (mean_ratio, stddev) = mean_std(records.iter().map(|r| r.ratio));
    Ok(SchmidtSummary { prediction, mean_ratio, stddev, outside_hypothesis, records })
}

fn mean_std(values: impl Iterator<Item = f64>) -> (Option<f64>, Option<f64>) {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        return (None, None);
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let std = if v.len() > 1 {
        let ss: f64 = v.iter().map(|x| (x - mean).powi(2)).sum();
        Some((ss / (v.len() - 1) as f64).sqrt())
    } else {
        None
    };
    (Some(mean), std)
}

impl SchmidtSummary {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "seed_index,x,N,count,prediction,ratio")?;
        for r in &self.records {
            writeln!(w, "{},{:.17e},{},{},{:.17e},{:.17e}", r.seed_index, r.x, r.n, r.count, r.prediction, r.ratio)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::FunctionForm;

    fn psi(text: &str) -> RadiusFn {
        FunctionForm::parse(text).unwrap().into()
    }

    #[test]
    fn zero_is_always_hit() {
        assert_eq!(count_r(0.0, 100, &psi("r^-3")).unwrap(), 100);
    }

    #[test]
    fn half_hits_even_denominators() {
        assert_eq!(count_r(0.5, 100, &psi("1/4 * r^-1")).unwrap(), 50);
    }

    #[test]
    fn prediction_closed_form() {
        let p = schmidt_prediction(&psi("1/4 * r^-1"), 100_000).unwrap();
        assert!((p.value - 50_000.0).abs() < 1e-6);
        assert!(p.condition_holds());
        let bad = schmidt_prediction(&psi("r^-1"), 10).unwrap();
        assert_eq!(bad.violation, Some(1));
        assert_eq!(schmidt_prediction(&RadiusFn::Zero, 10).unwrap().value, 0.0);
    }

    #[test]
    fn empty_experiment() {
        let s = schmidt_experiment(&psi("1/4 * r^-1"), 100, 0, 1).unwrap();
        assert!(s.records.is_empty());
        assert_eq!(s.mean_ratio, None);
    }

    #[test]
    fn experiment_is_reproducible() {
        let a = schmidt_experiment(&psi("1/4 * r^-1"), 1000, 8, 42).unwrap();
        let b = schmidt_experiment(&psi("1/4 * r^-1"), 1000, 8, 42).unwrap();
        assert_eq!(a, b);
        assert!(!a.outside_hypothesis);
        let c = schmidt_experiment(&psi("r^-3"), 1000, 4, 42).unwrap();
        assert!(c.outside_hypothesis);
    }
}
