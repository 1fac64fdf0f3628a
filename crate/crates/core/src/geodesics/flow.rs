//! The geodesic from `i` toward a boundary point, followed through renormalised frames.
//!
//! Frame `n` is the original picture pulled back by `[[p_{n-1}, p_n], [q_{n-1}, q_n]]`. There the geodesic
//! joins `−r_n` to `t_n`, with `r_n = a_n + 1/r_{n-1}` (`r_0 = 1/x`) and `t_n = [0; a_{n+1}, a_{n+2}, ...]`,
//! so every frame is a semicircle of moderate size and long times never need tiny heights.
//! Consecutive frames are related by `z_{n+1} = 1/z_n − a_{n+1}`.

use serde::{Deserialize, Serialize};

use super::hyperbolic::{penetration, reduce_point, Point};
use super::Direction;
use crate::error::{Error, Result};

/// Quotients past the last frame used, so truncating the tail does not move `t_n`.
const TAIL_MARGIN: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frame {
    digit: u64,
    center: f64,
    rho: f64,
    /// time at which this frame's semicircle peaks
    top: f64,
}

impl Frame {
    fn height(&self, t: f64) -> f64 {
        self.rho / (t - self.top).cosh()
    }

    fn point(&self, t: f64) -> Point {
        let s = t - self.top;
        Point::new(self.center + self.rho * s.tanh(), self.rho / s.cosh())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    frames: Vec<Frame>,
    horizon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedExcursion {
    pub convergent_index: usize,
    pub quotient: u64,
    pub t_peak: f64,
    pub peak_pen: f64,
    pub half_width: f64,
}

impl Geodesic {
    /// Frames covering `[0, t_max]`.
    pub fn new(direction: &Direction, t_max: f64) -> Result<Self> {
        if !(t_max >= 0.0) || !t_max.is_finite() {
            return Err(Error::Domain { value: t_max, domain: "finite T >= 0".into() });
        }
        let mut want = 64 + (t_max / 0.5).ceil() as usize;
        loop {
            let g = Self::with_digits(direction, want + TAIL_MARGIN);
            if g.horizon >= t_max {
                return Ok(g);
            }
            if direction.is_finite() && direction.digits(want + TAIL_MARGIN + 1).len() < want + TAIL_MARGIN + 1 {
                return Err(Error::Invalid(format!(
                    "direction is known to {} quotients, reaching time {:.3} < T = {t_max}",
                    direction.digits(usize::MAX).len(),
                    g.horizon
                )));
            }
            want *= 2;
        }
    }

    fn with_digits(direction: &Direction, n: usize) -> Self {
        let digits = direction.digits(n);
        let exact_end = direction.is_rational() && digits.len() < n;
        let len = digits.len();
        // tails t_k = [0; a_{k+1}, ...], k = 0..=len
        let mut tails = vec![0.0; len + 1];
        for k in (0..len).rev() {
            tails[k] = 1.0 / (digits[k] as f64 + tails[k + 1]);
        }
        let usable = if exact_end { len } else { len.saturating_sub(TAIL_MARGIN) };
        let mut frames = Vec::with_capacity(usable + 1);
        let x = tails[0];
        let mut r = 1.0 / x;
        // frame 0 passes through i at t = 0, where tan(θ/2) = x
        let mut top = x.ln();
        for k in 0..=usable {
            let t = tails[k];
            let digit = if k == 0 { 0 } else { digits[k - 1] };
            frames.push(Frame { digit, center: (t - r) / 2.0, rho: (t + r) / 2.0, top });
            if k == usable {
                break;
            }
            // top of frame k+1, pulled back into frame k, sits at u = e^{-(t - top_k)} = Im / (Re + r_k)
            let a = digits[k] as f64;
            let r_next = a + 1.0 / r;
            let t_next = tails[k + 1];
            let (c_next, rho_next) = ((t_next - r_next) / 2.0, (t_next + r_next) / 2.0);
            let w_re = a + c_next;
            let w_norm = w_re * w_re + rho_next * rho_next;
            top += ((w_re + r * w_norm) / rho_next).ln();
            r = r_next;
        }
        let horizon = if exact_end { f64::INFINITY } else { frames.last().map_or(0.0, |f| f.top) };
        Geodesic { frames, horizon }
    }

    /// Largest time the frames describe accurately.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    fn frame_at(&self, t: f64) -> &Frame {
        let n = self.frames.partition_point(|f| f.top <= t);
        let lo = n.saturating_sub(2);
        let hi = (n + 2).min(self.frames.len());
        self.frames[lo..hi].iter().max_by(|a, b| a.height(t).total_cmp(&b.height(t))).expect("at least one frame")
    }

    /// A point of the modular orbit of `γ(t)`, in a frame where it sits well above the axis.
    pub fn point(&self, t: f64) -> Point {
        self.frame_at(t).point(t)
    }

    pub fn reduced(&self, t: f64) -> Point {
        reduce_point(self.point(t))
    }

    pub fn penetration(&self, t: f64) -> f64 {
        penetration(self.reduced(t))
    }

    /// Excursions read off the quotients: frame `n` rises above `Im = 1` whenever its radius exceeds 1.
    pub fn predicted(&self, t_max: f64) -> Vec<PredictedExcursion> {
        self.frames
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, f)| f.rho > 1.0)
            .map(|(n, f)| PredictedExcursion {
                convergent_index: n - 1,
                quotient: f.digit,
                t_peak: f.top,
                peak_pen: f.rho.ln(),
                half_width: f.rho.acosh(),
            })
            .filter(|p| p.t_peak + p.half_width > 0.0 && p.t_peak - p.half_width < t_max)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcursionRecord {
    pub index: usize,
    pub t_enter: f64,
    pub t_peak: f64,
    pub t_exit: f64,
    pub peak_pen: f64,
    /// `n` such that the excursion tracks `p_n / q_n`; the driving quotient is `a_{n+1}`.
    pub convergent_index: Option<usize>,
    pub quotient: Option<u64>,
    /// Cut off by the start or the end of the sampled window.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionScan {
    pub records: Vec<ExcursionRecord>,
    pub predicted: usize,
    pub warnings: Vec<String>,
}

impl ExcursionScan {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,t_enter,t_peak,t_exit,peak_pen,convergent_index,quotient,truncated")?;
        for r in &self.records {
            let opt = |v: Option<u64>| v.map_or(String::new(), |v| v.to_string());
            writeln!(
                w,
                "{},{:.12e},{:.12e},{:.12e},{:.12e},{},{},{}",
                r.index,
                r.t_enter,
                r.t_peak,
                r.t_exit,
                r.peak_pen,
                opt(r.convergent_index.map(|n| n as u64)),
                opt(r.quotient),
                r.truncated
            )?;
        }
        Ok(())
    }
}

fn sample_times(t0: f64, t_max: f64, step: f64) -> impl Iterator<Item = f64> {
    let n = ((t_max - t0) / step).floor() as u64;
    (0..=n).map(move |j| t0 + j as f64 * step).chain((t0 + n as f64 * step < t_max).then_some(t_max))
}

fn bisect_entry(g: &Geodesic, mut outside: f64, mut inside: f64) -> f64 {
    for _ in 0..64 {
        let mid = 0.5 * (outside + inside);
        if g.penetration(mid) > 0.0 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
fn maximise(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc >= fd {
            b = d;
            (d, fd) = (c, fc);
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            (c, fc) = (d, fd);
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Cusp excursions of the geodesic toward `direction` on `[0, T]`, found by sampling every `step`.
pub fn excursions(direction: &Direction, t_max: f64, step: f64) -> Result<ExcursionScan> {
    if !(t_max > 0.0) || !(step > 0.0) {
        return Err(Error::Invalid(format!("need T > 0 and step > 0, got T = {t_max}, step = {step}")));
    }
    let g = Geodesic::new(direction, t_max)?;
    let times: Vec<f64> = sample_times(0.0, t_max, step).collect();
    let pens: Vec<f64> = times.iter().map(|&t| g.penetration(t)).collect();
    let predicted = g.predicted(t_max);
    let mut records = Vec::new();
    let mut j = 0;
    while j < times.len() {
        if pens[j] <= 0.0 {
            j += 1;
            continue;
        }
        let start = j;
        while j + 1 < times.len() && pens[j + 1] > 0.0 {
            j += 1;
        }
        let end = j;
        j += 1;
        let t_enter = if start == 0 { times[0] } else { bisect_entry(&g, times[start - 1], times[start]) };
        let t_exit = if end + 1 == times.len() { times[end] } else { bisect_entry(&g, times[end + 1], times[end]) };
        let best = (start..=end).max_by(|&a, &b| pens[a].total_cmp(&pens[b])).expect("non-empty run");
        let lo = if best > start { times[best - 1] } else { t_enter };
        let hi = if best < end { times[best + 1] } else { t_exit };
        let (t_peak, peak_pen) = maximise(|t| g.penetration(t), lo, hi);
        let (t_peak, peak_pen) = if pens[best] > peak_pen { (times[best], pens[best]) } else { (t_peak, peak_pen) };
        let matched = predicted
            .iter()
            .filter(|p| p.t_peak >= t_enter && p.t_peak <= t_exit)
            .min_by(|a, b| (a.t_peak - t_peak).abs().total_cmp(&(b.t_peak - t_peak).abs()));
        records.push(ExcursionRecord {
            index: records.len(),
            t_enter,
            t_peak,
            t_exit,
            peak_pen,
            convergent_index: matched.map(|p| p.convergent_index),
            quotient: matched.map(|p| p.quotient),
            truncated: start == 0 || end + 1 == times.len(),
        });
    }
    let mut warnings = Vec::new();
    for p in &predicted {
        if !records.iter().any(|r| r.t_enter <= p.t_peak.max(0.0) && p.t_peak.min(t_max) <= r.t_exit) {
            warnings.push(format!(
                "step too coarse: missed the excursion at t = {:.6} (pen {:.4}, width {:.3e})",
                p.t_peak,
                p.peak_pen,
                2.0 * p.half_width
            ));
        }
    }
    Ok(ExcursionScan { records, predicted: predicted.len(), warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Loglaw {
    pub value: f64,
    /// `(t, running maximum)` at every time the maximum grows, then at `T`.
    pub trace: Vec<(f64, f64)>,
}

/// `max (pen(γ(t)) − αt) / log t` over sampled `t ∈ (e, T]`, with the exact excursion peaks added to the samples.
pub fn loglaw_statistic(direction: &Direction, t_max: f64, alpha: f64, step: f64) -> Result<Loglaw> {
    let e = std::f64::consts::E;
    if !(t_max > e) {
        return Err(Error::Domain { value: t_max, domain: "T > e".into() });
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain { value: alpha, domain: "[0, 1)".into() });
    }
    if !(step > 0.0) {
        return Err(Error::Domain { value: step, domain: "step > 0".into() });
    }
    let g = Geodesic::new(direction, t_max)?;
    let score = |t: f64, pen: f64| (pen - alpha * t) / t.ln();
    let mut points: Vec<(f64, f64)> =
        sample_times(e, t_max, step).filter(|&t| t > e).map(|t| (t, score(t, g.penetration(t)))).collect();
    for p in g.predicted(t_max) {
        if p.t_peak > e && p.t_peak <= t_max {
            points.push((p.t_peak, score(p.t_peak, p.peak_pen)));
        }
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = f64::NEG_INFINITY;
    let mut trace = Vec::new();
    for (t, s) in points {
        if s > best {
            best = s;
            trace.push((t, best));
        }
    }
    if trace.last().is_some_and(|&(t, _)| t < t_max) {
        trace.push((t_max, best));
    }
    Ok(Loglaw { value: best, trace })
}

#[cfg(test)]
mod tests {
    use super::super::hyperbolic::{geodesic_point, BoundaryPoint};
    use super::*;

    #[test]
    fn frames_agree_with_direct_ray() {
        for d in [
            Direction::golden(),
            Direction::sqrt2_minus_1(),
            Direction::random(11, 0, 400),
            Direction::planted(3, 40).unwrap(),
        ] {
            let g = Geodesic::new(&d, 12.0).unwrap();
            let x = d.value();
            for j in 0..=240 {
                let t = j as f64 * 0.05;
                let direct = reduce_point(geodesic_point(BoundaryPoint::Real(x), t).z);
                let framed = g.reduced(t);
                assert!((direct.im - framed.im).abs() < 1e-6 * direct.im, "t = {t}: {direct} vs {framed}");
            }
        }
    }

    #[test]
    fn starts_at_i() {
        let g = Geodesic::new(&Direction::random(1, 2, 200), 5.0).unwrap();
        assert!((g.reduced(0.0) - Point::i()).norm() < 1e-12);
    }

    #[test]
    fn finite_direction_runs_out() {
        let d = Direction::random(4, 0, 20);
        assert!(Geodesic::new(&d, 1e4).is_err());
    }

    #[test]
    fn rational_direction_has_unbounded_horizon() {
        let d = Direction::finite(vec![2, 3]).unwrap();
        let g = Geodesic::new(&d, 100.0).unwrap();
        assert!(g.horizon().is_infinite());
        // the ray ends in the cusp at 3/7
        assert!(g.penetration(60.0) > 50.0);
    }

    #[test]
    fn planted_peak() {
        let d = Direction::planted(12, 1_000_000).unwrap();
        let scan = excursions(&d, 80.0, 0.01).unwrap();
        assert!(scan.warnings.is_empty(), "{:?}", scan.warnings);
        let big: Vec<_> = scan.records.iter().filter(|r| r.peak_pen > 5.0).collect();
        assert_eq!(big.len(), 1);
        assert_eq!(big[0].convergent_index, Some(11));
        assert!((big[0].peak_pen - 1e6f64.ln()).abs() <= super::super::PEAK_CONSTANT);
    }

    #[test]
    fn loglaw_trace_is_monotone() {
        let l = loglaw_statistic(&Direction::random(8, 1, 2000), 1000.0, 0.0, 0.01).unwrap();
        assert!(l.trace.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
        assert_eq!(l.trace.last().unwrap().1, l.value);
    }
}
