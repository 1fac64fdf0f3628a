//! Symbolic function families used as approximating, ubiquity and dimension
//! functions.
//!
//! A [`FunctionForm`] is either a power-log monomial
//! `scale * r^a * (log r)^b * (log log r)^c` or the exponential family
//! `exp(-r^w)`. Dimension functions live in the small-argument regime, where
//! the logarithms are taken of `1/r` instead of `r`.
//!
//! Everything that depends on summability is decided on exponents, never on
//! partial sums; see [`series`].

mod parse;
mod regular;
pub mod series;

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use regular::{is_k_regular, KRegularity, RegularityCheck};
pub use series::{
    compute_g, critical_exponent, liouville_gauge_classify, log_critical_exponent, series_classify, Asymptotic,
    Convergence, CriticalExponent, GLimit, GReport, SeriesSpec,
};

/// Exact rational used for exponents and scales.
pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    PowerLog,
    ExpPower,
}

/// Which end of the half-line the form is meant for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `r -> infinity`; logarithms of `r`.
    Large,
    /// `r -> 0`; logarithms of `1/r`.
    Small,
}

/// The set of arguments on which a form is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub lo_inclusive: bool,
    /// Upper bound, only present in the small-argument regime.
    pub hi: Option<f64>,
}

impl Domain {
    pub fn contains(&self, r: f64) -> bool {
        if r.is_nan() {
            return false;
        }
        let above = if self.lo_inclusive { r >= self.lo } else { r > self.lo };
        above && self.hi.is_none_or(|hi| r < hi)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_inclusive { '[' } else { '(' };
        match self.hi {
            Some(hi) => write!(f, "{open}{}, {hi})", self.lo),
            None => write!(f, "{open}{}, inf)", self.lo),
        }
    }
}

/// A member of the power × log × log-log family, or of `exp(-r^w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionForm {
    scale: Rational,
    power: Rational,
    log_power: Rational,
    loglog_power: Rational,
    family: Family,
    omega: Rational,
    regime: Regime,
    domain: Domain,
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

impl FunctionForm {
    /// `scale * r^a * (log r)^b * (log log r)^c` for large `r`.
    pub fn power_log(scale: Rational, a: Rational, b: Rational, c: Rational) -> Result<Self> {
        Self::build(scale, a, b, c, Family::PowerLog, Rational::zero(), Regime::Large)
    }

    /// Shorthand for `r^a`.
    pub fn power(a: Rational) -> Self {
        Self::power_log(r(1), a, r(0), r(0)).expect("unit scale is positive")
    }

    /// A power-log approximating function; rejected unless eventually decreasing.
    pub fn approximating(scale: Rational, a: Rational, b: Rational, c: Rational) -> Result<Self> {
        let form = Self::power_log(scale, a, b, c)?;
        form.check_approximating()?;
        Ok(form)
    }

    /// `scale * x^a * (log 1/x)^b * (log log 1/x)^c` for small `x`, rejected
    /// unless it tends to zero and increases near the origin.
    pub fn dimension(scale: Rational, a: Rational, b: Rational, c: Rational) -> Result<Self> {
        let form = Self::build(scale, a, b, c, Family::PowerLog, Rational::zero(), Regime::Small)?;
        form.check_dimension()?;
        Ok(form)
    }

    /// `exp(-r^omega)`.
    pub fn exp_power(omega: Rational) -> Result<Self> {
        if !omega.is_positive() {
            return Err(Error::Invalid(format!("exp(-r^w) needs w > 0, got {omega}")));
        }
        Self::build(r(1), r(0), r(0), r(0), Family::ExpPower, omega, Regime::Large)
    }

    /// The same form multiplied by a positive constant.
    pub fn scaled(&self, factor: Rational) -> Result<Self> {
        if self.family == Family::ExpPower {
            return Err(Error::NotClosed("exp(-r^w) carries no scale factor".into()));
        }
        Self::build(
            self.scale * factor,
            self.power,
            self.log_power,
            self.loglog_power,
            self.family,
            self.omega,
            self.regime,
        )
    }

    fn build(
        scale: Rational,
        power: Rational,
        log_power: Rational,
        loglog_power: Rational,
        family: Family,
        omega: Rational,
        regime: Regime,
    ) -> Result<Self> {
        if !scale.is_positive() {
            return Err(Error::Invalid(format!("scale must be positive, got {scale}")));
        }
        let domain = match (family, regime) {
            (Family::ExpPower, _) => Domain { lo: 0.0, lo_inclusive: true, hi: None },
            (Family::PowerLog, Regime::Large) => {
                if !loglog_power.is_zero() {
                    Domain { lo: std::f64::consts::E, lo_inclusive: false, hi: None }
                } else if !log_power.is_zero() {
                    Domain { lo: 1.0, lo_inclusive: false, hi: None }
                } else if power.is_negative() {
                    Domain { lo: 0.0, lo_inclusive: false, hi: None }
                } else {
                    Domain { lo: 0.0, lo_inclusive: true, hi: None }
                }
            }
            (Family::PowerLog, Regime::Small) => {
                let hi = if !loglog_power.is_zero() {
                    Some((-1.0f64).exp())
                } else if !log_power.is_zero() {
                    Some(1.0)
                } else {
                    None
                };
                Domain { lo: 0.0, lo_inclusive: false, hi }
            }
        };
        Ok(FunctionForm { scale, power, log_power, loglog_power, family, omega, regime, domain })
    }

    /// Whether the form is eventually strictly decreasing as `r -> infinity`.
    pub fn is_eventually_decreasing(&self) -> bool {
        match self.family {
            Family::ExpPower => true,
            Family::PowerLog => {
                self.regime == Regime::Large && lex_sign(self.power, self.log_power, self.loglog_power) < 0
            }
        }
    }

    /// Whether the form tends to zero (and increases) as `r -> 0`.
    pub fn is_gauge(&self) -> bool {
        // x^a (log 1/x)^b (loglog 1/x)^c -> 0 iff the leading non-zero
        // exponent, read in the order (a, -b, -c), is positive.
        self.family == Family::PowerLog
            && self.regime == Regime::Small
            && lex_sign(self.power, -self.log_power, -self.loglog_power) > 0
    }

    /// Reinterpret a log-free large-argument form such as `r^(2/3)` as a
    /// dimension function near zero.
    pub fn as_dimension(&self) -> Result<Self> {
        if self.regime == Regime::Small {
            self.check_dimension()?;
            return Ok(self.clone());
        }
        if self.family != Family::PowerLog || !self.log_power.is_zero() || !self.loglog_power.is_zero() {
            return Err(Error::Invalid(format!("{self} uses log(r); write dimension functions with log(1/r)")));
        }
        Self::dimension(self.scale, self.power, self.log_power, self.loglog_power)
    }

    fn check_approximating(&self) -> Result<()> {
        if self.is_eventually_decreasing() {
            Ok(())
        } else {
            Err(Error::Invalid(format!("approximating function must be eventually decreasing: {self}")))
        }
    }

    fn check_dimension(&self) -> Result<()> {
        if self.is_gauge() {
            Ok(())
        } else {
            Err(Error::Invalid(format!("dimension function must tend to 0 and increase near 0: {self}")))
        }
    }

    pub fn scale(&self) -> Rational {
        self.scale
    }
    pub fn power_exp(&self) -> Rational {
        self.power
    }
    pub fn log_exp(&self) -> Rational {
        self.log_power
    }
    pub fn loglog_exp(&self) -> Rational {
        self.loglog_power
    }
    pub fn family(&self) -> Family {
        self.family
    }
    pub fn omega(&self) -> Rational {
        self.omega
    }
    pub fn regime(&self) -> Regime {
        self.regime
    }
    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Smallest integer strictly inside the domain (large regime); summations start here.
    pub fn summation_start(&self) -> u64 {
        let lo = self.domain.lo;
        let start = lo.floor() as u64 + 1;
        start.max(1)
    }

    /// Value at `r`.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if !self.domain.contains(r) {
            return Err(Error::Domain { value: r, domain: self.domain.to_string() });
        }
        Ok(match self.family {
            Family::ExpPower => (-pow_rat(r, self.omega)).exp(),
            Family::PowerLog => {
                let (l, ll) = match self.regime {
                    Regime::Large => (r.ln(), r.ln().ln()),
                    Regime::Small => ((1.0 / r).ln(), (1.0 / r).ln().ln()),
                };
                let mut v = ratio_f64(self.scale) * pow_rat(r, self.power);
                if !self.log_power.is_zero() {
                    v *= pow_rat(l, self.log_power);
                }
                if !self.loglog_power.is_zero() {
                    v *= pow_rat(ll, self.loglog_power);
                }
                v
            }
        })
    }

    /// Natural log of the value, given `ln r`. Avoids under- and overflow for
    /// arguments like `k^n` with large `n`.
    pub fn ln_evaluate_from_ln(&self, ln_r: f64) -> Result<f64> {
        let domain_err = || Error::Domain { value: ln_r.exp(), domain: self.domain.to_string() };
        match self.family {
            Family::ExpPower => Ok(-(ratio_f64(self.omega) * ln_r).exp()),
            Family::PowerLog => {
                let l = match self.regime {
                    Regime::Large => ln_r,
                    Regime::Small => -ln_r,
                };
                let mut v = ratio_f64(self.scale).ln() + ratio_f64(self.power) * ln_r;
                if !self.log_power.is_zero() {
                    if l <= 0.0 {
                        return Err(domain_err());
                    }
                    v += ratio_f64(self.log_power) * l.ln();
                }
                if !self.loglog_power.is_zero() {
                    if l <= 1.0 {
                        return Err(domain_err());
                    }
                    v += ratio_f64(self.loglog_power) * l.ln().ln();
                }
                Ok(v)
            }
        }
    }

    /// Exact value at a positive integer when the form is `scale * q^a` with integer `a`.
    pub fn evaluate_rational(&self, q: i128) -> Option<Ratio<i128>> {
        self.evaluate_at_ratio(Ratio::from_integer(q))
    }

    /// Exact value at a positive rational `w` when the form is `scale * w^a`
    /// with integer `a`; `None` if not of that shape or on overflow.
    pub fn evaluate_at_ratio(&self, w: Ratio<i128>) -> Option<Ratio<i128>> {
        if !self.is_rational_on_integers() || w <= Ratio::from_integer(0) {
            return None;
        }
        let a = *self.power.numer();
        let e: u32 = a.unsigned_abs().try_into().ok()?;
        let n = w.numer().checked_pow(e)?;
        let d = w.denom().checked_pow(e)?;
        let (n, d) = if a >= 0 { (n, d) } else { (d, n) };
        let sn = (*self.scale.numer() as i128).checked_mul(n)?;
        let sd = (*self.scale.denom() as i128).checked_mul(d)?;
        Some(Ratio::new(sn, sd))
    }

    /// Whether the form is identically zero-free of logarithms and exactly rational on integers.
    pub fn is_rational_on_integers(&self) -> bool {
        self.family == Family::PowerLog
            && self.log_power.is_zero()
            && self.loglog_power.is_zero()
            && self.power.is_integer()
    }

    /// Parse the compact text form, e.g. `6 * r^-2`, `r^-3 * log(r)^-2`, `exp(-r^2)`,
    /// `r^(2/3) * log(1/r)^(1/10)`. A `log(1/r)` factor selects the small-argument regime.
    pub fn parse(text: &str) -> Result<Self> {
        parse::parse_form(text)
    }
}

impl std::str::FromStr for FunctionForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for FunctionForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.family == Family::ExpPower {
            return write!(f, "exp(-r^{})", fmt_exp(self.omega));
        }
        let arg = match self.regime {
            Regime::Large => "r",
            Regime::Small => "1/r",
        };
        let mut parts = Vec::new();
        if !self.scale.is_one() {
            parts.push(format!("{}", self.scale));
        }
        if !self.power.is_zero() {
            parts.push(format!("r^{}", fmt_exp(self.power)));
        }
        if !self.log_power.is_zero() {
            parts.push(format!("log({arg})^{}", fmt_exp(self.log_power)));
        }
        if !self.loglog_power.is_zero() {
            parts.push(format!("loglog({arg})^{}", fmt_exp(self.loglog_power)));
        }
        if parts.is_empty() {
            parts.push("1".to_string());
        }
        write!(f, "{}", parts.join(" * "))
    }
}

fn fmt_exp(e: Rational) -> String {
    if e.is_integer() {
        format!("{}", e.numer())
    } else {
        format!("({}/{})", e.numer(), e.denom())
    }
}

/// Sign of the lexicographically first non-zero exponent.
pub(crate) fn lex_sign(a: Rational, b: Rational, c: Rational) -> i8 {
    for e in [a, b, c] {
        if e.is_positive() {
            return 1;
        }
        if e.is_negative() {
            return -1;
        }
    }
    0
}

pub(crate) fn ratio_f64(q: Rational) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

/// `x^e`, using repeated multiplication for integer exponents.
pub(crate) fn pow_rat(x: f64, e: Rational) -> f64 {
    if e.is_integer() {
        if let Ok(n) = i32::try_from(*e.numer()) {
            return x.powi(n);
        }
    }
    if e.denom().is_even() || x >= 0.0 {
        x.powf(ratio_f64(e))
    } else {
        // odd-denominator root of a negative base
        -(-x).powf(ratio_f64(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn evaluate_power() {
        let f = FunctionForm::power(r(-3));
        assert_eq!(f.evaluate(2.0).unwrap(), 0.125);
    }

    #[test]
    fn evaluate_exp_at_zero() {
        let f = FunctionForm::exp_power(r(1)).unwrap();
        assert_eq!(f.evaluate(0.0).unwrap(), 1.0);
    }

    #[test]
    fn evaluate_log_at_e() {
        let f = FunctionForm::power_log(r(1), r(-2), r(-2), r(0)).unwrap();
        let e = std::f64::consts::E;
        assert_relative_eq!(f.evaluate(e).unwrap(), e.powi(-2), max_relative = 1e-15);
    }

    #[test]
    fn domain_enforced() {
        let f = FunctionForm::power_log(r(1), r(-1), r(-1), r(0)).unwrap();
        assert!(matches!(f.evaluate(1.0), Err(Error::Domain { .. })));
        let g = FunctionForm::power_log(r(1), r(-1), r(0), r(1)).unwrap();
        assert!(g.evaluate(2.7).is_err());
        assert!(g.evaluate(2.72).is_ok());
        assert_eq!(g.summation_start(), 3);
        let d = FunctionForm::dimension(r(1), r(0), r(-1), r(0)).unwrap();
        assert!(d.evaluate(1.0).is_err());
        assert!(d.evaluate(0.5).is_ok());
    }

    #[test]
    fn approximating_role_enforced() {
        assert!(FunctionForm::approximating(r(1), r(-2), r(0), r(0)).is_ok());
        assert!(FunctionForm::approximating(r(1), r(0), r(-1), r(0)).is_ok());
        assert!(FunctionForm::approximating(r(1), r(0), r(0), r(-1)).is_ok());
        assert!(FunctionForm::approximating(r(1), r(0), r(0), r(0)).is_err());
        assert!(FunctionForm::approximating(r(1), r(1), r(-5), r(0)).is_err());
        assert!(FunctionForm::approximating(r(1), r(0), r(1), r(-9)).is_err());
    }

    #[test]
    fn dimension_role_enforced() {
        assert!(FunctionForm::dimension(r(1), q(2, 3), r(1), r(0)).is_ok());
        assert!(FunctionForm::dimension(r(1), r(0), r(-1), r(2)).is_ok());
        assert!(FunctionForm::dimension(r(1), r(0), r(1), r(0)).is_err());
        assert!(FunctionForm::dimension(r(1), r(0), r(0), r(0)).is_err());
        assert!(FunctionForm::dimension(r(1), r(-1), r(0), r(0)).is_err());
    }

    #[test]
    fn nonpositive_scale_rejected() {
        assert!(FunctionForm::power_log(r(0), r(1), r(0), r(0)).is_err());
        assert!(FunctionForm::exp_power(r(0)).is_err());
    }

    #[test]
    fn ln_evaluate_matches_evaluate() {
        let f = FunctionForm::power_log(q(3, 2), q(-5, 2), r(1), r(-2)).unwrap();
        for x in [3.0, 10.0, 1e5] {
            let direct = f.evaluate(x).unwrap().ln();
            assert_relative_eq!(f.ln_evaluate_from_ln(x.ln()).unwrap(), direct, max_relative = 1e-12);
        }
        let g = FunctionForm::dimension(r(1), q(1, 2), r(2), r(0)).unwrap();
        let x: f64 = 1e-7;
        assert_relative_eq!(g.ln_evaluate_from_ln(x.ln()).unwrap(), g.evaluate(x).unwrap().ln(), max_relative = 1e-12);
    }

    #[test]
    fn rational_evaluation() {
        let f = FunctionForm::power_log(r(6), r(-2), r(0), r(0)).unwrap();
        assert_eq!(f.evaluate_rational(6), Some(Ratio::new(1, 6)));
        let g = FunctionForm::power_log(r(1), r(-2), r(1), r(0)).unwrap();
        assert_eq!(g.evaluate_rational(6), None);
    }

    #[test]
    fn display_roundtrip_examples() {
        for s in ["r^-3", "6 * r^-2", "exp(-r^2)", "r^-2 * log(r)^(-3/2) * loglog(r)^1"] {
            let f = FunctionForm::parse(s).unwrap();
            assert_eq!(FunctionForm::parse(&f.to_string()).unwrap(), f);
        }
    }
}
