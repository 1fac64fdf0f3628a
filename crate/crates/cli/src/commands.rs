//! One function per command. Each parses and checks every parameter it reads before computing.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive};
use serde_json::Value;

use limsup_core::counting::schmidt_experiment;
use limsup_core::functions::{
    critical_exponent, log_critical_exponent, series_classify, Convergence, FunctionForm, Rational, SeriesSpec,
};
use limsup_core::geodesics::{
    cf_expand, cf_expand_exact, convergents, excursions, gauss_kuzmin, loglaw_statistic, quotient_frequencies,
    sandwich_membership, CfStatus, Direction,
};
use limsup_core::horoballs::{disjointness_check, enumerate_horoballs, horoball_count_ratio};
use limsup_core::intervals::Exact;
use limsup_core::systems::{
    stage_measure_scan, MeasureOptions, RadiusFn, RadiusRule, ResonantSystem, StageSpec, DEFAULT_CAP,
};
use limsup_core::ubiquity::{empirical_kappa, estimate_kappa, Ball};

use crate::config::{Command, ExperimentConfig, Params, RuleKind, SystemKind};
use crate::envelope::{num, Payload};
use crate::error::{usage, CliResult};

pub fn dispatch(cfg: &ExperimentConfig) -> CliResult<Payload> {
    let p = &cfg.params;
    match cfg.command {
        Command::Classify => classify(p),
        Command::CriticalExponent => critical(p),
        Command::StageScan => stage_scan(p),
        Command::Ubiquity => ubiquity(p),
        Command::Schmidt => schmidt(p, cfg.seed),
        Command::Cf => cf(p, cfg.seed),
        Command::Excursions => excursion_scan(p, cfg.seed),
        Command::Loglaw => loglaw(p, cfg.seed),
        Command::Horoballs => horoballs(p),
        Command::Disjointness => disjointness(p),
    }
}

fn need<'a, T>(v: &'a Option<T>, flag: &str) -> CliResult<&'a T> {
    v.as_ref().ok_or_else(|| usage(format!("missing --{flag}")))
}

fn function(text: &str, flag: &str) -> CliResult<FunctionForm> {
    FunctionForm::parse(text).map_err(|e| usage(format!("--{flag} `{text}`: {e}")))
}

/// `a/b`, an integer, or a terminating decimal.
fn fraction(text: &str, flag: &str) -> CliResult<Ratio<i128>> {
    let t = text.trim();
    let bad = || usage(format!("--{flag}: `{text}` is not a fraction"));
    if let Ok(q) = Ratio::<i128>::from_str(t) {
        return Ok(q);
    }
    let (neg, body) = t.strip_prefix('-').map_or((false, t), |b| (true, b));
    let (int, frac) = body.split_once('.').ok_or_else(bad)?;
    if frac.len() > 30 || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) || body == "." {
        return Err(bad());
    }
    let digits: i128 = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let q = Ratio::new(digits, 10i128.pow(frac.len() as u32));
    Ok(if neg { -q } else { q })
}

fn rational(text: &str, flag: &str) -> CliResult<Rational> {
    let q = fraction(text, flag)?;
    match (i64::try_from(*q.numer()), i64::try_from(*q.denom())) {
        (Ok(n), Ok(d)) => Ok(Rational::new(n, d)),
        _ => Err(usage(format!("--{flag}: `{text}` is too large"))),
    }
}

fn fraction_list(text: &str, flag: &str) -> CliResult<Vec<Exact>> {
    text.split(',').map(|s| fraction(s, flag)).collect()
}

fn window(text: &str, flag: &str) -> CliResult<(Exact, Exact)> {
    let (lo, hi) = text.split_once(':').ok_or_else(|| usage(format!("--{flag}: expected `lo:hi`, got `{text}`")))?;
    Ok((fraction(lo, flag)?, fraction(hi, flag)?))
}

fn positive(x: f64, flag: &str) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!("--{flag} must be positive and finite, got {x}")))
    }
}

fn options(p: &Params) -> MeasureOptions {
    let d = MeasureOptions::default();
    MeasureOptions { cap: p.cap.map_or(d.cap, u128::from), exact_limit: p.exact_limit.unwrap_or(d.exact_limit) }
}

fn system(p: &Params) -> ResonantSystem {
    match p.system.unwrap_or(SystemKind::Rationals) {
        SystemKind::Rationals => ResonantSystem::rationals(),
        SystemKind::Coprime => ResonantSystem::coprime_rationals(),
        SystemKind::Ford => ResonantSystem::ford(),
    }
}

fn big(x: &BigInt) -> Value {
    x.to_i64().map_or_else(|| Value::String(x.to_string()), Value::from)
}

fn opt<T: Into<Value>>(x: Option<T>) -> Value {
    x.map_or(Value::Null, Into::into)
}

fn classify(p: &Params) -> CliResult<Payload> {
    let text = need(&p.series, "series")?;
    let gauge = p.gauge.as_deref().map(|g| function(g, "gauge").and_then(|f| Ok(f.as_dimension()?))).transpose()?;
    let has_gauge = gauge.is_some();
    let spec = SeriesSpec::parse(text, gauge).map_err(|e| usage(format!("--series `{text}`: {e}")))?;
    let verdict = series_classify(&spec);
    let s = spec.summand();
    let meaning = match (has_gauge, verdict) {
        (false, Convergence::Divergent) => "Khintchine divergence case: full measure",
        (false, Convergence::Convergent) => "Khintchine convergence case: null measure",
        (true, Convergence::Divergent) => "Jarník divergence case: H^f(W) = H^f(I)",
        (true, Convergence::Convergent) => "Jarník convergence case: H^f(W) = 0",
    };
    let mut out =
        Payload::new(&["series", "weight_power", "decay", "omega", "power", "log_power", "loglog_power", "verdict"]);
    out.push(vec![
        text.as_str().into(),
        spec.weight_power().to_string().into(),
        s.decay.to_string().into(),
        s.omega.to_string().into(),
        s.power.to_string().into(),
        s.log_power.to_string().into(),
        s.loglog_power.to_string().into(),
        verdict.to_string().into(),
    ]);
    out.summarize("verdict", verdict.to_string());
    out.summarize("interpretation", meaning);
    out.line = format!("{verdict} ⇒ {meaning}");
    Ok(out)
}

fn critical(p: &Params) -> CliResult<Payload> {
    let mut out = Payload::new(&["psi", "weight", "dim", "critical_exponent"]);
    let value = match (&p.psi, &p.omega) {
        (Some(text), None) => {
            let psi = function(text, "psi")?;
            let weight = rational(p.weight.as_deref().unwrap_or("1"), "weight")?;
            let s = critical_exponent(&psi, weight)?;
            out.push(vec![psi.to_string().into(), weight.to_string().into(), Value::Null, s.to_string().into()]);
            s
        }
        (None, Some(omega)) => {
            let omega = rational(omega, "omega")?;
            let dim = p.dim.unwrap_or(1);
            let s = log_critical_exponent(omega, dim)?;
            let psi = FunctionForm::exp_power(omega)?;
            out.push(vec![psi.to_string().into(), Value::Null, dim.into(), s.to_string().into()]);
            s
        }
        _ => return Err(usage("give exactly one of --psi or --omega")),
    };
    out.summarize("critical_exponent", value.to_string());
    out.line = value.to_string();
    Ok(out)
}

fn stage_scan(p: &Params) -> CliResult<Payload> {
    let psi: RadiusFn = function(need(&p.psi, "psi")?, "psi")?.into();
    let rule = match p.rule.unwrap_or(RuleKind::PerPoint) {
        RuleKind::PerPoint => RadiusRule::PerPoint(psi),
        RuleKind::Uniform => RadiusRule::Uniform(psi),
    };
    let (n_lo, n_hi) = (p.n_lo.unwrap_or(1), *need(&p.n_hi, "n-hi")?);
    if n_lo < 1 || n_lo > n_hi {
        return Err(usage(format!("need 1 <= n-lo <= n-hi, got {n_lo}..={n_hi}")));
    }
    let spec = StageSpec::new(system(p), rule, *need(&p.k, "k")?, n_lo)?;
    spec.with_n(n_hi)?.window()?;
    let scan = stage_measure_scan(&spec, n_lo, n_hi, options(p))?;
    let mut out =
        Payload::new(&["n", "measure", "measure_lo", "measure_hi", "partial_sum", "partial_sum_lo", "partial_sum_hi"]);
    for r in &scan.rows {
        out.push(vec![
            r.n.into(),
            num(r.measure),
            num(r.measure_lo),
            num(r.measure_hi),
            num(r.partial_sum),
            num(r.partial_sum_lo),
            num(r.partial_sum_hi),
        ]);
    }
    let last = scan.rows.last().map_or(0.0, |r| r.partial_sum);
    let trend = format!("{:?}", scan.trend).to_lowercase();
    out.summarize("trend", trend.as_str());
    out.summarize("partial_sum", num(last));
    out.line = format!("stages {n_lo}..={n_hi}: partial sum {last:.6e}, trend {trend}");
    Ok(out)
}

fn ubiquity(p: &Params) -> CliResult<Payload> {
    let rho: RadiusFn = function(need(&p.psi, "psi")?, "psi")?.into();
    let k = *need(&p.k, "k")?;
    let (n_lo, n_hi) = (p.n_lo.unwrap_or(1), *need(&p.n_hi, "n-hi")?);
    if n_lo < 1 || n_lo > n_hi {
        return Err(usage(format!("need 1 <= n-lo <= n-hi, got {n_lo}..={n_hi}")));
    }
    let target = p.target.unwrap_or(0.5);
    if !(0.0..=1.0).contains(&target) {
        return Err(usage(format!("--target must lie in [0, 1], got {target}")));
    }
    let balls = need(&p.balls, "balls")?
        .split(',')
        .map(|b| window(b, "balls").and_then(|(lo, hi)| Ok(Ball::from_interval(lo, hi)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let sys = system(p);
    StageSpec::new(sys, RadiusRule::Uniform(rho.clone()), k, n_hi)?.window()?;
    let reports = estimate_kappa(&sys, &rho, k, &balls, n_lo, n_hi, target, options(p))?;
    let mut out = Payload::new(&["ball_lo", "ball_hi", "n", "ratio", "ratio_lo", "ratio_hi"]);
    for rep in &reports {
        let (lo, hi) = (rep.ball.lo().to_string(), rep.ball.hi().to_string());
        for r in &rep.per_n {
            out.push(vec![
                lo.as_str().into(),
                hi.as_str().into(),
                r.n.into(),
                num(r.ratio),
                num(r.ratio_lo),
                num(r.ratio_hi),
            ]);
        }
    }
    let kappa = empirical_kappa(&reports);
    let reached = reports.iter().all(|r| r.n_min.is_some());
    out.summarize("kappa", opt(kappa.map(num)));
    out.summarize("target", num(target));
    out.summarize("all_reach_target", reached);
    out.line = match kappa {
        Some(k) => {
            format!("empirical kappa {k:.6} over {} balls; every ball reaches {target}: {reached}", reports.len())
        }
        None => "no balls".into(),
    };
    Ok(out)
}

fn schmidt(p: &Params, seed: u64) -> CliResult<Payload> {
    let psi: RadiusFn = function(need(&p.psi, "psi")?, "psi")?.into();
    let n = *need(&p.n_max, "n-max")?;
    if n == 0 {
        return Err(usage("--n-max must be at least 1"));
    }
    let samples = p.samples.unwrap_or(100);
    let s = schmidt_experiment(&psi, n, samples, seed)?;
    let mut out = Payload::new(&["seed_index", "x", "n", "count", "prediction", "ratio"]);
    for r in &s.records {
        out.push(vec![r.seed_index.into(), num(r.x), r.n.into(), r.count.into(), num(r.prediction), num(r.ratio)]);
    }
    out.summarize("prediction", num(s.prediction.value));
    out.summarize("first_violation", opt(s.prediction.violation));
    out.summarize("mean_ratio", opt(s.mean_ratio.map(num)));
    out.summarize("stddev", opt(s.stddev.map(num)));
    out.summarize("outside_hypothesis", s.outside_hypothesis);
    let stat = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.5}"));
    out.line = format!(
        "prediction {:.6}; mean ratio {}, stddev {} over {samples} samples{}",
        s.prediction.value,
        stat(s.mean_ratio),
        stat(s.stddev),
        if s.outside_hypothesis { " (outside hypothesis: Σ qψ(q) converges)" } else { "" }
    );
    Ok(out)
}

/// Parsed `--x`: either an exact or floating value, or a direction given by its quotients.
enum Point {
    Exact(BigRational),
    Float(f64),
    Quotients(Direction),
}

fn point(p: &Params, seed: u64, default_depth: usize) -> CliResult<Point> {
    let text = need(&p.x, "x")?.trim();
    let bad = |msg: String| usage(format!("--x `{text}`: {msg}"));
    let q = |s: &str| s.trim().parse::<u64>().map_err(|e| bad(e.to_string()));
    let list = |s: &str| -> CliResult<Vec<u64>> {
        if s.trim().is_empty() {
            Ok(Vec::new())
        } else {
            s.split(',').map(q).collect()
        }
    };
    let dir = match text {
        "golden" => Direction::golden(),
        "sqrt2" => Direction::sqrt2_minus_1(),
        "random" => Direction::random(seed, p.index.unwrap_or(0), p.depth.unwrap_or(default_depth)),
        _ if text.starts_with("planted:") => {
            let (pos, value) =
                text["planted:".len()..].split_once(':').ok_or_else(|| bad("expected planted:POS:VALUE".into()))?;
            Direction::planted(q(pos)? as usize, q(value)?)?
        }
        _ if text.starts_with("cf:") => {
            let body = &text["cf:".len()..];
            let (prefix, period) = body.split_once(';').unwrap_or((body, ""));
            Direction::periodic(list(prefix)?, list(period)?)?
        }
        _ if text.contains('/') => {
            let x = BigRational::from_str(text).map_err(|e| bad(e.to_string()))?;
            if !x.is_positive() || x >= BigRational::from_integer(1.into()) {
                return Err(bad("must lie in (0, 1)".into()));
            }
            return Ok(Point::Exact(x));
        }
        _ => {
            let x: f64 = text.parse().map_err(|_| bad("not a number or a known direction".into()))?;
            if !(x > 0.0 && x < 1.0) {
                return Err(bad("must lie in (0, 1)".into()));
            }
            return Ok(Point::Float(x));
        }
    };
    Ok(Point::Quotients(dir))
}

/// The point as a geodesic direction; values are expanded to all certified quotients.
fn direction(p: &Params, seed: u64, t_max: f64) -> CliResult<Direction> {
    let default_depth = (t_max / 1.5).ceil() as usize + 200;
    Ok(match point(p, seed, default_depth)? {
        Point::Quotients(d) => d,
        Point::Exact(x) => Direction::finite(cf_expand_exact(&x, usize::MAX)?.quotients)?,
        Point::Float(x) => Direction::known_prefix(cf_expand(x, 64)?.quotients)?,
    })
}

fn cf(p: &Params, seed: u64) -> CliResult<Payload> {
    if p.samples.is_some() {
        return cf_frequencies(p, seed);
    }
    if p.tau.is_some() {
        return sandwich(p, seed);
    }
    let depth = p.depth.unwrap_or(20);
    let (quotients, status, value) = match point(p, seed, depth)? {
        Point::Exact(x) => {
            let e = cf_expand_exact(&x, depth)?;
            (e.quotients, e.status, e.x)
        }
        Point::Float(x) => {
            let e = cf_expand(x, depth)?;
            (e.quotients, e.status, e.x)
        }
        Point::Quotients(d) => {
            let q = d.digits(depth);
            let status = if q.len() < depth && d.is_rational() {
                CfStatus::Rational
            } else if q.len() < depth {
                CfStatus::PrecisionExhausted
            } else {
                CfStatus::Complete
            };
            (q, status, d.value())
        }
    };
    let mut out = Payload::new(&["n", "a_n", "p_n", "q_n"]);
    for (i, (a, (pn, qn))) in quotients.iter().zip(convergents(&quotients)).enumerate() {
        out.push(vec![(i + 1).into(), (*a).into(), big(&pn), big(&qn)]);
    }
    let status = format!("{status:?}").to_lowercase();
    let digits = quotients.iter().map(u64::to_string).collect::<Vec<_>>().join(", ");
    out.summarize("x", num(value));
    out.summarize("quotients", quotients.len());
    out.summarize("status", status.as_str());
    out.line = format!("[0; {digits}] ({status})");
    Ok(out)
}

fn cf_frequencies(p: &Params, seed: u64) -> CliResult<Payload> {
    let samples = *need(&p.samples, "samples")?;
    let depth = p.depth.unwrap_or(1000);
    let k_max = p.k_max.unwrap_or(10);
    if samples == 0 || depth == 0 || !(1..=1_000_000).contains(&k_max) {
        return Err(usage("need samples >= 1, depth >= 1 and 1 <= k-max <= 1e6"));
    }
    let freq = quotient_frequencies(seed, samples, depth, k_max);
    let mut out = Payload::new(&["k", "frequency", "gauss_kuzmin", "abs_error"]);
    let mut worst: f64 = 0.0;
    for (k, f) in (1..=k_max).zip(freq) {
        let g = gauss_kuzmin(k);
        worst = worst.max((f - g).abs());
        out.push(vec![k.into(), num(f), num(g), num((f - g).abs())]);
    }
    out.summarize("max_abs_error", num(worst));
    out.line = format!("{samples} x {depth} quotients; max deviation from Gauss-Kuzmin {worst:.3e}");
    Ok(out)
}

fn sandwich(p: &Params, seed: u64) -> CliResult<Payload> {
    let tau = *need(&p.tau, "tau")?;
    let eps = positive(*need(&p.epsilon, "epsilon")?, "epsilon")?;
    let q_max = p.q_max.unwrap_or(1000);
    if q_max < 1 {
        return Err(usage("--q-max must be at least 1"));
    }
    let x = match point(p, seed, 400)? {
        Point::Exact(x) => x.to_f64().unwrap_or(f64::NAN),
        Point::Float(x) => x,
        Point::Quotients(d) => d.value(),
    };
    let s = sandwich_membership(x, tau, eps, q_max as u64)?;
    let mut out = Payload::new(&["x", "tau", "epsilon", "q_max", "hits", "violations"]);
    out.push(vec![num(x), num(tau), num(eps), q_max.into(), s.hits.into(), s.violations.into()]);
    out.summarize("hits", s.hits);
    out.summarize("violations", s.violations);
    out.line = format!("{} hits inside psi, {} inside psi_eps, q <= {q_max}", s.hits, s.violations);
    Ok(out)
}

fn excursion_scan(p: &Params, seed: u64) -> CliResult<Payload> {
    let t_max = positive(*need(&p.t_max, "t-max")?, "t-max")?;
    let step = positive(p.step.unwrap_or(1e-3), "step")?;
    let d = direction(p, seed, t_max)?;
    let scan = excursions(&d, t_max, step)?;
    let mut out = Payload::new(&[
        "index",
        "t_enter",
        "t_peak",
        "t_exit",
        "peak_pen",
        "convergent_index",
        "quotient",
        "log_quotient",
        "truncated",
    ]);
    for r in &scan.records {
        out.push(vec![
            r.index.into(),
            num(r.t_enter),
            num(r.t_peak),
            num(r.t_exit),
            num(r.peak_pen),
            opt(r.convergent_index),
            opt(r.quotient),
            opt(r.quotient.map(|a| num((a as f64).ln()))),
            r.truncated.into(),
        ]);
    }
    let deepest = scan.records.iter().map(|r| r.peak_pen).fold(0.0, f64::max);
    out.summarize("excursions", scan.records.len());
    out.summarize("predicted", scan.predicted);
    out.summarize("deepest", num(deepest));
    out.summarize("warnings", scan.warnings.clone());
    out.line = format!(
        "{} excursions ({} predicted) up to T = {t_max}, deepest {deepest:.4}{}",
        scan.records.len(),
        scan.predicted,
        if scan.warnings.is_empty() { String::new() } else { format!("; {} warnings", scan.warnings.len()) }
    );
    Ok(out)
}

fn loglaw(p: &Params, seed: u64) -> CliResult<Payload> {
    let t_max = *need(&p.t_max, "t-max")?;
    if t_max.is_nan() || t_max <= std::f64::consts::E || t_max.is_infinite() {
        return Err(usage(format!("--t-max must exceed e, got {t_max}")));
    }
    let alpha = p.alpha.unwrap_or(0.0);
    if !(0.0..1.0).contains(&alpha) {
        return Err(usage(format!("--alpha must lie in [0, 1), got {alpha}")));
    }
    let step = positive(p.step.unwrap_or(1e-2), "step")?;
    let d = direction(p, seed, t_max)?;
    let law = loglaw_statistic(&d, t_max, alpha, step)?;
    let mut out = Payload::new(&["t", "log_t", "running_max"]);
    for &(t, m) in &law.trace {
        out.push(vec![num(t), num(t.ln()), num(m)]);
    }
    out.summarize("statistic", num(law.value));
    out.line = format!("max (pen - {alpha} t) / log t over (e, {t_max}] = {:.6}", law.value);
    Ok(out)
}

fn horoballs(p: &Params) -> CliResult<Payload> {
    let (lo, hi) = window(p.base.as_deref().unwrap_or("0:1"), "base")?;
    if lo >= hi {
        return Err(usage("--base needs lo < hi"));
    }
    let cap = p.cap.map_or(DEFAULT_CAP, u128::from);
    match (&p.radii, &p.r_lo, &p.r_hi) {
        (Some(radii), None, None) => {
            let radii = fraction_list(radii, "radii")?;
            let lambda = fraction(p.lambda.as_deref().unwrap_or("1/4"), "lambda")?;
            if radii.iter().any(|r| !r.is_positive()) {
                return Err(usage("--radii must be positive"));
            }
            if !(lambda.is_positive() && lambda < Ratio::from_integer(1)) {
                return Err(usage("--lambda must lie in (0, 1)"));
            }
            let mut out = Payload::new(&["r", "log_r", "lambda", "count", "ratio"]);
            let mut ratios = Vec::new();
            for r in radii {
                let row = horoball_count_ratio(lo, hi, r, lambda, cap)?;
                let log_r = (*r.numer() as f64).ln() - (*r.denom() as f64).ln();
                out.push(vec![
                    r.to_string().into(),
                    num(log_r),
                    lambda.to_string().into(),
                    row.count.into(),
                    num(row.ratio),
                ]);
                ratios.push(row.ratio);
            }
            let max = ratios.iter().copied().fold(f64::MIN, f64::max);
            let min = ratios.iter().copied().fold(f64::MAX, f64::min);
            out.summarize("min_ratio", num(min));
            out.summarize("max_ratio", num(max));
            out.line = format!("count · R / m(B) ranges over [{min:.4}, {max:.4}]");
            Ok(out)
        }
        (None, Some(r_lo), Some(r_hi)) => {
            let (r_lo, r_hi) = (fraction(r_lo, "r-lo")?, fraction(r_hi, "r-hi")?);
            let balls = enumerate_horoballs(lo, hi, r_lo, r_hi, cap)?;
            let mut out = Payload::new(&["p", "q", "base", "radius"]);
            for b in &balls {
                out.push(vec![b.p.into(), b.q.into(), b.base().to_string().into(), b.radius().to_string().into()]);
            }
            out.summarize("count", balls.len());
            out.line = format!("{} horoballs with base in [{lo}, {hi}) and radius in [{r_lo}, {r_hi})", balls.len());
            Ok(out)
        }
        _ => Err(usage("give either --radii, or both --r-lo and --r-hi")),
    }
}

fn disjointness(p: &Params) -> CliResult<Payload> {
    let q_max = *need(&p.q_max, "q-max")?;
    if q_max < 1 {
        return Err(usage("--q-max must be at least 1"));
    }
    let r = disjointness_check(q_max)?;
    let mut out = Payload::new(&["q_max", "circles", "pairs", "tangent", "separated", "failures"]);
    out.push(vec![
        r.q_max.into(),
        r.circles.into(),
        r.pairs.into(),
        r.tangent.into(),
        r.separated.into(),
        r.failures.len().into(),
    ]);
    out.summarize("holds", r.holds());
    out.summarize("failures", r.failures.len());
    if !r.holds() {
        let (a, b) = r.failures[0];
        return Err(
            limsup_core::Error::Invariant(format!("Ford circles {}/{} and {}/{} overlap", a.p, a.q, b.p, b.q)).into()
        );
    }
    out.line = format!(
        "{} circles, {} pairs: {} tangent, {} separated, none overlap",
        r.circles, r.pairs, r.tangent, r.separated
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions() {
        assert_eq!(fraction("3/4", "x").unwrap(), Ratio::new(3, 4));
        assert_eq!(fraction("0.125", "x").unwrap(), Ratio::new(1, 8));
        assert_eq!(fraction("-2", "x").unwrap(), Ratio::from_integer(-2));
        assert_eq!(fraction("-1.5", "x").unwrap(), Ratio::new(-3, 2));
        assert!(fraction("1/0x", "x").is_err());
        assert!(fraction(".", "x").is_err());
    }

    #[test]
    fn points() {
        let p = |x: &str| Params { x: Some(x.into()), ..Params::default() };
        assert!(matches!(point(&p("2/7"), 0, 10).unwrap(), Point::Exact(_)));
        assert!(matches!(point(&p("0.3"), 0, 10).unwrap(), Point::Float(_)));
        let Point::Quotients(d) = point(&p("cf:1,2;3"), 0, 10).unwrap() else { panic!() };
        assert_eq!(d.digits(5), vec![1, 2, 3, 3, 3]);
        let Point::Quotients(d) = point(&p("planted:3:9"), 0, 10).unwrap() else { panic!() };
        assert_eq!(d.digits(4), vec![1, 1, 9, 1]);
        for bad in ["7/3", "1.5", "planted:0:3", "cf:", "banana"] {
            assert!(point(&p(bad), 0, 10).is_err(), "{bad}");
        }
    }
}
