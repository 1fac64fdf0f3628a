//! Upper half-plane geometry: geodesic rays from `i`, distance, and reduction to the standard
//! fundamental domain of SL(2,Z).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = Complex64;

/// Integer matrix `[[a, b], [c, d]]` acting by Möbius transformation.
pub type Word = [[i64; 2]; 2];

pub const IDENTITY: Word = [[1, 0], [0, 1]];

const REDUCTION_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint {
    Infinity,
    Real(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub z: Point,
    pub t: f64,
}

/// The unit-speed ray from `i` toward `x`, at time `t`: the rotation about `i` that sends `∞` to `x`,
/// applied to `i e^t`.
pub fn geodesic_point(x: BoundaryPoint, t: f64) -> GeodesicState {
    let z = match x {
        BoundaryPoint::Infinity => Point::new(0.0, t.exp()),
        BoundaryPoint::Real(x) => {
            let norm = x.hypot(1.0);
            let (cos, sin) = (-x / norm, 1.0 / norm);
            // (cos·w + sin) / (−sin·w + cos) with w = i e^t, divided through by e^t
            let decay = (-t).exp();
            let num = Point::new(sin * decay, cos);
            let den = Point::new(cos * decay, -sin);
            num / den
        }
    };
    GeodesicState { z, t }
}

pub fn hyperbolic_distance(a: Point, b: Point) -> f64 {
    2.0 * ((a - b).norm() / (2.0 * (a.im * b.im).sqrt())).asinh()
}

pub fn apply(word: &Word, z: Point) -> Point {
    let [[a, b], [c, d]] = *word;
    (z * a as f64 + b as f64) / (z * c as f64 + d as f64)
}

pub fn determinant(word: &Word) -> i128 {
    word[0][0] as i128 * word[1][1] as i128 - word[0][1] as i128 * word[1][0] as i128
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub z: Point,
    pub word: Word,
}

fn overflow() -> Error {
    Error::Invariant("reduction word overflowed i64".into())
}

/// Translates into `|Re z| <= 1/2` and inverts while `|z| < 1`; `word · z = reduced`.
pub fn reduce_to_fundamental(z: Point) -> Result<Reduction> {
    if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain { value: z.im, domain: "Im z > 0".into() });
    }
    let mut z = z;
    let mut w = IDENTITY;
    for _ in 0..REDUCTION_CAP {
        let n = z.re.round();
        if n != 0.0 {
            z.re -= n;
            let n = n as i64;
            let row = |x: i64, y: i64| n.checked_mul(y).and_then(|ny| x.checked_sub(ny)).ok_or_else(overflow);
            w[0] = [row(w[0][0], w[1][0])?, row(w[0][1], w[1][1])?];
        }
        if z.norm_sqr() < 1.0 {
            z = -z.inv();
            let neg = |x: i64| x.checked_neg().ok_or_else(overflow);
            w = [[neg(w[1][0])?, neg(w[1][1])?], w[0]];
        } else {
            return Ok(Reduction { z, word: w });
        }
    }
    Err(Error::Invariant(format!("reduction did not terminate in {REDUCTION_CAP} steps")))
}

/// Reduced point without tracking the word.
pub(crate) fn reduce_point(mut z: Point) -> Point {
    for _ in 0..REDUCTION_CAP {
        z.re -= z.re.round();
        if z.norm_sqr() < 1.0 {
            z = -z.inv();
        } else {
            break;
        }
    }
    z
}

/// `log Im z` above the horocycle `Im = 1`, else 0.
pub fn penetration(z_reduced: Point) -> f64 {
    if z_reduced.im > 1.0 {
        z_reduced.im.ln()
    } else {
        0.0
    }
}

/// Largest gap between `log Im z` and the distance from `i`, over the cusp region `{Im z >= 1, |Re z| <= 1/2}`.
pub fn basepoint_offset() -> f64 {
    (9.0f64 / 8.0).acosh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn close(a: Point, b: Point, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn rays() {
        let up = geodesic_point(BoundaryPoint::Infinity, 2.0);
        assert!(close(up.z, Point::new(0.0, 2.0f64.exp()), 1e-12));
        for x in [-3.0, 0.0, 0.3, 7.0] {
            assert!(close(geodesic_point(BoundaryPoint::Real(x), 0.0).z, Point::i(), 1e-14));
            let far = geodesic_point(BoundaryPoint::Real(x), 40.0).z;
            assert!((far.re - x).abs() < 1e-12 && far.im < 1e-12);
        }
        let down = geodesic_point(BoundaryPoint::Real(0.0), 1.0).z;
        assert!(close(down, Point::new(0.0, (-1.0f64).exp()), 1e-15));
    }

    #[test]
    fn reductions() {
        let r = reduce_to_fundamental(Point::i()).unwrap();
        assert_eq!(r.word, IDENTITY);
        let r = reduce_to_fundamental(Point::new(5.0, 1.0)).unwrap();
        assert!(close(r.z, Point::i(), 1e-15));
        assert_eq!(r.word, [[1, -5], [0, 1]]);
        let r = reduce_to_fundamental(Point::new(0.0, 0.5)).unwrap();
        assert!(close(r.z, Point::new(0.0, 2.0), 1e-15));
        assert_eq!(r.word, [[0, -1], [1, 0]]);
        assert!(reduce_to_fundamental(Point::new(0.0, -1.0)).is_err());
    }

    #[test]
    fn penetration_values() {
        assert_eq!(penetration(Point::i()), 0.0);
        assert!((penetration(Point::new(0.0, E)) - 1.0).abs() < 1e-15);
        assert!((penetration(Point::new(0.0, 2.0)) - 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn offset_bounds_corner() {
        let corner = Point::new(0.5, 1.0);
        assert!((hyperbolic_distance(corner, Point::i()) - basepoint_offset()).abs() < 1e-12);
    }
}
