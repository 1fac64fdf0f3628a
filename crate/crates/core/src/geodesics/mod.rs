//! Continued fractions, directions on the boundary, and the geodesic flow on the modular surface.

mod flow;
mod hyperbolic;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::sample_rng;

pub use flow::{excursions, loglaw_statistic, ExcursionRecord, ExcursionScan, Geodesic, Loglaw, PredictedExcursion};
pub use hyperbolic::{
    apply, basepoint_offset, determinant, geodesic_point, hyperbolic_distance, penetration, reduce_to_fundamental,
    BoundaryPoint, GeodesicState, Point, Reduction, Word, IDENTITY,
};

/// Frozen bound on `|peak penetration − log a|` for the excursion driven by the quotient `a`.
pub const PEAK_CONSTANT: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CfStatus {
    /// All requested quotients are certified.
    Complete,
    /// The input is rational and its expansion ended.
    Rational,
    /// The input interval no longer determines the next quotient.
    PrecisionExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfExpansion {
    pub x: f64,
    pub quotients: Vec<u64>,
    pub convergents: Vec<(BigInt, BigInt)>,
    pub status: CfStatus,
}

/// `(p_n, q_n)` for `n = 1..=len`, seeded with `p_{-1}/q_{-1} = 1/0` and `p_0/q_0 = 0/1`.
pub fn convergents(quotients: &[u64]) -> Vec<(BigInt, BigInt)> {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::with_capacity(quotients.len());
    for &a in quotients {
        let a = BigInt::from(a);
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        out.push((p2.clone(), q2.clone()));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    out
}

/// Expansion of `x`, treated as uncertain by one ulp in each direction.
pub fn cf_expand(x: f64, depth: usize) -> Result<CfExpansion> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain { value: x, domain: "(0, 1)".into() });
    }
    let lo = BigRational::from_float(x.next_down()).expect("finite");
    let hi = BigRational::from_float(x.next_up()).expect("finite");
    let mut cf = cf_expand_interval(&lo, &hi, depth)?;
    cf.x = x;
    Ok(cf)
}

/// Expansion of an exact value in `(0, 1)`; rationals end with `CfStatus::Rational`.
pub fn cf_expand_exact(x: &BigRational, depth: usize) -> Result<CfExpansion> {
    cf_expand_interval(x, x, depth)
}

/// Quotients shared by every point of `[lo, hi] ⊂ (0, 1)`.
pub fn cf_expand_interval(lo: &BigRational, hi: &BigRational, depth: usize) -> Result<CfExpansion> {
    if !lo.is_positive() || lo > hi || hi >= &BigRational::one() {
        return Err(Error::Invalid(format!("need 0 < lo <= hi < 1, got [{lo}, {hi}]")));
    }
    let x = ((lo + hi) / BigInt::from(2)).to_f64().unwrap_or(f64::NAN);
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let mut quotients = Vec::new();
    let mut status = CfStatus::Complete;
    while quotients.len() < depth {
        if lo.is_zero() && hi.is_zero() {
            status = CfStatus::Rational;
            break;
        }
        if !lo.is_positive() {
            status = CfStatus::PrecisionExhausted;
            break;
        }
        let (inv_lo, inv_hi) = (lo.recip(), hi.recip());
        let a = inv_hi.floor();
        if inv_lo.floor() != a {
            status = CfStatus::PrecisionExhausted;
            break;
        }
        let Some(digit) = a.to_integer().to_u64() else {
            status = CfStatus::PrecisionExhausted;
            break;
        };
        quotients.push(digit);
        (lo, hi) = (inv_hi - &a, inv_lo - &a);
    }
    if status == CfStatus::Complete && lo.is_zero() && hi.is_zero() {
        status = CfStatus::Rational;
    }
    let convergents = convergents(&quotients);
    Ok(CfExpansion { x, quotients, convergents, status })
}

/// Quotients `a_1..a_depth` of a uniformly random `x ∈ (0, 1)`. Each quotient is drawn from its exact
/// conditional law `P(a_{n+1} >= k | a_1..a_n) = (1 + r) / (k + r)` with `r = q_{n-1} / q_n`.
pub fn random_quotients<R: Rng>(rng: &mut R, depth: usize) -> Vec<u64> {
    let mut r = 0.0f64;
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        let u = 1.0 - rng.random::<f64>();
        let a = ((1.0 + r) / u - r).floor().clamp(1.0, 1e18) as u64;
        out.push(a);
        r = 1.0 / (a as f64 + r);
    }
    out
}

/// `log₂(1 + 1/(k(k+2)))`.
pub fn gauss_kuzmin(k: u64) -> f64 {
    let k = k as f64;
    (1.0 + 1.0 / (k * (k + 2.0))).log2()
}

/// Empirical `P(a_n = k)` for `k = 1..=k_max`, pooled over `samples` random points and `depth` quotients each.
pub fn quotient_frequencies(seed: u64, samples: u64, depth: usize, k_max: u64) -> Vec<f64> {
    let counts = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut c = vec![0u64; k_max as usize];
            for a in random_quotients(&mut sample_rng(seed, i), depth) {
                if a <= k_max {
                    c[a as usize - 1] += 1;
                }
            }
            c
        })
        .reduce(
            || vec![0u64; k_max as usize],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let total = (samples as f64) * depth as f64;
    counts.into_iter().map(|c| c as f64 / total).collect()
}

/// A boundary point in `(0, 1)` given by its quotients: a prefix followed by a repeating block.
/// An empty block makes the point rational, unless the expansion is only known up to its prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Direction {
    prefix: Vec<u64>,
    period: Vec<u64>,
    truncated: bool,
}

impl Direction {
    pub fn periodic(prefix: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if prefix.iter().chain(&period).any(|&a| a == 0) {
            return Err(Error::Invalid("partial quotients must be positive".into()));
        }
        if prefix.is_empty() && period.is_empty() {
            return Err(Error::Invalid("a direction needs at least one quotient".into()));
        }
        Ok(Direction { prefix, period, truncated: false })
    }

    pub fn finite(digits: Vec<u64>) -> Result<Self> {
        Self::periodic(digits, Vec::new())
    }

    /// `(√5 − 1)/2 = [0; 1, 1, 1, ...]`
    pub fn golden() -> Self {
        Direction { prefix: Vec::new(), period: vec![1], truncated: false }
    }

    /// `√2 − 1 = [0; 2, 2, 2, ...]`
    pub fn sqrt2_minus_1() -> Self {
        Direction { prefix: Vec::new(), period: vec![2], truncated: false }
    }

    /// All quotients 1 except `a_position = value`.
    pub fn planted(position: usize, value: u64) -> Result<Self> {
        if position == 0 {
            return Err(Error::Invalid("quotient positions start at 1".into()));
        }
        let mut prefix = vec![1; position];
        prefix[position - 1] = value;
        Self::periodic(prefix, vec![1])
    }

    /// A uniformly random point, known to `depth` quotients; sample `index` of `seed`.
    pub fn random(seed: u64, index: u64, depth: usize) -> Self {
        Direction {
            prefix: random_quotients(&mut sample_rng(seed, index), depth.max(1)),
            period: Vec::new(),
            truncated: true,
        }
    }

    /// An irrational point of which only the first quotients are known.
    pub fn known_prefix(digits: Vec<u64>) -> Result<Self> {
        let mut d = Self::finite(digits)?;
        d.truncated = true;
        Ok(d)
    }

    /// Only finitely many quotients are available.
    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// The quotients end, so the point is the rational they spell.
    pub fn is_rational(&self) -> bool {
        self.period.is_empty() && !self.truncated
    }

    /// `a_n`, counting from 1.
    pub fn digit(&self, n: usize) -> Option<u64> {
        if n == 0 {
            return None;
        }
        if n <= self.prefix.len() {
            return Some(self.prefix[n - 1]);
        }
        if self.period.is_empty() {
            return None;
        }
        Some(self.period[(n - 1 - self.prefix.len()) % self.period.len()])
    }

    /// The first `n` quotients, or all of them if the expansion is shorter.
    pub fn digits(&self, n: usize) -> Vec<u64> {
        (1..=n).map_while(|i| self.digit(i)).collect()
    }

    pub fn value(&self) -> f64 {
        self.digits(96).iter().rev().fold(0.0, |tail, &a| 1.0 / (a as f64 + tail))
    }

    /// Exact value of the first `n` quotients.
    pub fn truncation(&self, n: usize) -> BigRational {
        let (p, q) = convergents(&self.digits(n)).pop().unwrap_or((BigInt::zero(), BigInt::one()));
        BigRational::new(p, q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sandwich {
    pub hits: u64,
    pub violations: u64,
}

/// Ford bases `p/q` with `q <= q_max` inside `ψ(2q²)` and inside `ψ_ε(2q²)` of `x`, where
/// `ψ(r) = r^{-τ} (log r)^{-τ}` and `ψ_ε(r) = r^{-τ} (log r)^{-τ(1+ε)}`.
pub fn sandwich_membership(x: f64, tau: f64, epsilon: f64, q_max: u64) -> Result<Sandwich> {
    if !(tau >= 1.0) {
        return Err(Error::Domain { value: tau, domain: "tau >= 1".into() });
    }
    if !(epsilon > 0.0) {
        return Err(Error::Domain { value: epsilon, domain: "epsilon > 0".into() });
    }
    if !x.is_finite() {
        return Err(Error::Domain { value: x, domain: "finite x".into() });
    }
    let tally = (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let l = 2.0 * (q as f64).powi(2);
            let psi = l.powf(-tau) * l.ln().powf(-tau);
            let psi_eps = l.powf(-tau) * l.ln().powf(-tau * (1.0 + epsilon));
            let qf = q as f64;
            let first = (qf * (x - psi)).ceil() as i64;
            let last = (qf * (x + psi)).floor() as i64;
            let mut s = Sandwich { hits: 0, violations: 0 };
            for p in first..=last {
                if p.gcd(&(q as i64)) != 1 {
                    continue;
                }
                let d = (x - p as f64 / qf).abs();
                s.hits += u64::from(d < psi);
                s.violations += u64::from(d < psi_eps);
            }
            s
        })
        .reduce(
            || Sandwich { hits: 0, violations: 0 },
            |a, b| Sandwich { hits: a.hits + b.hits, violations: a.violations + b.violations },
        );
    Ok(tally)
}
