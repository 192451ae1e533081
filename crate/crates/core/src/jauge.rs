//! Dimension functions `φ_{s,t}(x) = x^s exp((ln 1/x)^{1−t})`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jauge {
    pub s: f64,
    pub t: f64,
}

impl Jauge {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return invalid(format!("s = {s} must be positive"));
        }
        if !(t > 0.0 && t <= 1.0) {
            return invalid(format!("t = {t} outside (0, 1]"));
        }
        Ok(Self { s, t })
    }

    /// `ln φ(x)`, finite even where `φ` underflows.
    pub fn ln_eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Domain(x));
        }
        let l = (1.0 / x).ln();
        Ok(-self.s * l + l.powf(1.0 - self.t))
    }
}

pub fn jauge_eval(j: &Jauge, x: f64) -> Result<f64> {
    Ok(j.ln_eval(x)?.exp())
}

/// Points at which [`jauge_compare`] checks its verdict.
pub const PROBES: [f64; 3] = [1e-4, 1e-8, 1e-12];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JaugeComparison {
    pub a: Jauge,
    pub b: Jauge,
    /// `Less` when `φ_a ≤ φ_b` near 0 with `φ_a ≠ φ_b`, `Equal` for the
    /// same pair, `Greater` otherwise.
    #[serde(serialize_with = "ser_ordering")]
    pub verdict: Ordering,
    /// Whether the sign of `ln φ_a − ln φ_b` matches the verdict at each
    /// probe.
    pub agreement: Vec<bool>,
    /// Smallest `x` on a logarithmic scan of `[e^{−700}, 1/2]` where the
    /// numerical order disagrees with the verdict; below it the verdict
    /// holds on the whole scan.
    pub crossover: Option<f64>,
}

fn ser_ordering<S: serde::Serializer>(o: &Ordering, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(match o {
        Ordering::Less => "less",
        Ordering::Equal => "equal",
        Ordering::Greater => "greater",
    })
}

impl JaugeComparison {
    pub fn agrees(&self) -> bool {
        self.agreement.iter().all(|&a| a)
    }
}

fn consistent(verdict: Ordering, diff: f64) -> bool {
    match verdict {
        Ordering::Less => diff <= 0.0,
        Ordering::Greater => diff >= 0.0,
        Ordering::Equal => diff == 0.0,
    }
}

/// Order of `φ_a` and `φ_b` as `x → 0`: `φ_a ≤ φ_b` iff `s_a > s_b`, or
/// `s_a = s_b` and `t_a ≥ t_b`.
pub fn jauge_compare(a: &Jauge, b: &Jauge) -> JaugeComparison {
    let verdict = if a.s == b.s && a.t == b.t {
        Ordering::Equal
    } else if a.s > b.s || (a.s == b.s && a.t >= b.t) {
        Ordering::Less
    } else {
        Ordering::Greater
    };
    let diff = |x: f64| a.ln_eval(x).unwrap() - b.ln_eval(x).unwrap();
    let agreement = PROBES.iter().map(|&x| consistent(verdict, diff(x))).collect();
    // u = ln(1/x) from ln 2 to 700 in geometric steps
    let mut crossover = None;
    let (lo, hi) = (2f64.ln(), 700f64);
    let steps = 2000;
    for i in 0..=steps {
        let u = lo * (hi / lo).powf(i as f64 / steps as f64);
        let x = (-u).exp();
        if !consistent(verdict, diff(x)) {
            crossover = Some(x);
        }
    }
    JaugeComparison { a: *a, b: *b, verdict, agreement, crossover }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_one_is_scaled_power() {
        let j = Jauge::new(1.7, 1.0).unwrap();
        for x in [0.5f64, 1e-3, 1e-9] {
            let want = std::f64::consts::E * x.powf(1.7);
            assert!((jauge_eval(&j, x).unwrap() / want - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn reference_values() {
        let x = 1e-6f64;
        let direct = |s: f64, t: f64| x.powf(s) * (1e6f64.ln().powf(1.0 - t)).exp();
        let a = jauge_eval(&Jauge::new(1.0, 0.5).unwrap(), x).unwrap();
        let b = jauge_eval(&Jauge::new(1.0, 0.3).unwrap(), x).unwrap();
        assert!((a / direct(1.0, 0.5) - 1.0).abs() < 1e-13);
        assert!((b / direct(1.0, 0.3) - 1.0).abs() < 1e-13);
        assert!((a - 4.11e-5).abs() < 0.01e-5, "{a}");
        assert!((b - 5.37e-4).abs() < 0.01e-4, "{b}");
        assert!(b > a);
    }

    #[test]
    fn domain() {
        let j = Jauge::new(1.0, 0.5).unwrap();
        for x in [0.0, 1.0, -0.2, 1.5] {
            assert!(matches!(jauge_eval(&j, x), Err(Error::Domain(_))));
        }
        assert!(Jauge::new(1.0, 0.0).is_err());
        assert!(Jauge::new(0.0, 0.5).is_err());
    }

    #[test]
    fn comparison_branches() {
        let c = jauge_compare(&Jauge::new(1.0, 0.5).unwrap(), &Jauge::new(1.0, 0.3).unwrap());
        assert_eq!(c.verdict, Ordering::Less);
        assert!(c.agrees());
        let c = jauge_compare(&Jauge::new(2.0, 0.1).unwrap(), &Jauge::new(1.0, 0.9).unwrap());
        assert_eq!(c.verdict, Ordering::Less);
        assert!(c.agrees());
        let c = jauge_compare(&Jauge::new(1.0, 0.9).unwrap(), &Jauge::new(2.0, 0.1).unwrap());
        assert_eq!(c.verdict, Ordering::Greater);
        assert!(c.agrees());
        let j = Jauge::new(1.0, 0.5).unwrap();
        let c = jauge_compare(&j, &j);
        assert_eq!(c.verdict, Ordering::Equal);
        assert!(c.agrees());
        assert_eq!(c.crossover, None);
    }

    #[test]
    fn close_exponents_cross_late() {
        // s differs by 0.05: the log term wins until ln(1/x) is large.
        let c = jauge_compare(&Jauge::new(1.05, 0.1).unwrap(), &Jauge::new(1.0, 0.9).unwrap());
        assert_eq!(c.verdict, Ordering::Less);
        assert!(!c.agrees());
        let x = c.crossover.unwrap();
        assert!(x < 1e-12);
    }
}
