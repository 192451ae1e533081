//! Dyadic rationals, the arc families built on them, and dyadic exponents.
//!
//! A point `x` is α-approximable when `|x − k/2^j| ≤ 2^{−αj}` for infinitely
//! many `j`; its dyadic exponent is the supremum of such `α`. Everything here
//! works at finite depth, so exponents are always reported together with the
//! depth that produced them.

use crate::error::{invalid, Error, Result};
use crate::io::fmt17;

/// `K / 2^J` in lowest terms: `K` odd, `0 < K < 2^J`. The point `0` is
/// carried as `0 / 2^0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numer: u64,
    level: u32,
}

impl DyadicRational {
    /// Canonical form of `k / 2^j`, reduced modulo 1.
    pub fn new(k: u64, j: u32) -> Result<Self> {
        if j > 63 {
            return invalid(format!("level {j} exceeds 63"));
        }
        let mut numer = k & ((1u64 << j) - 1);
        let mut level = j;
        if numer == 0 {
            return Ok(Self { numer: 0, level: 0 });
        }
        while numer % 2 == 0 {
            numer /= 2;
            level -= 1;
        }
        Ok(Self { numer, level })
    }

    pub fn numer(&self) -> u64 {
        self.numer
    }

    /// Generation `J` at which this center first appears.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn value(&self) -> f64 {
        self.numer as f64 / (1u64 << self.level) as f64
    }
}

/// One arc `[center − radius, center + radius]` on the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub center: f64,
    pub radius: f64,
}

/// Circular distance between two points of T.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// A finite union of arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalFamily {
    arcs: Vec<Arc>,
    label: String,
}

impl IntervalFamily {
    pub fn new(arcs: Vec<Arc>, label: impl Into<String>) -> Result<Self> {
        let mut out = Vec::with_capacity(arcs.len());
        for a in arcs {
            if !(a.radius > 0.0) || !a.center.is_finite() {
                return invalid(format!("bad arc {a:?}"));
            }
            out.push(Arc { center: a.center.rem_euclid(1.0), radius: a.radius });
        }
        Ok(Self { arcs: out, label: label.into() })
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.arcs.iter().any(|a| circle_dist(a.center, x) <= a.radius)
    }

    /// Index of an arc containing `x`, if any.
    pub fn arc_containing(&self, x: f64) -> Option<usize> {
        self.arcs.iter().position(|a| circle_dist(a.center, x) <= a.radius)
    }

    /// `Σ min(2r, 1)`: the measure when the arcs are disjoint.
    pub fn total_length(&self) -> f64 {
        self.arcs.iter().map(|a| (2.0 * a.radius).min(1.0)).sum()
    }

    // Arcs cut into sorted intervals of [0, 1].
    fn pieces(&self) -> Vec<(f64, f64)> {
        let mut v = Vec::with_capacity(self.arcs.len() + 2);
        for a in &self.arcs {
            if a.radius >= 0.5 {
                return vec![(0.0, 1.0)];
            }
            let (lo, hi) = (a.center - a.radius, a.center + a.radius);
            if lo < 0.0 {
                v.push((lo + 1.0, 1.0));
                v.push((0.0, hi));
            } else if hi > 1.0 {
                v.push((lo, 1.0));
                v.push((0.0, hi - 1.0));
            } else {
                v.push((lo, hi));
            }
        }
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        v
    }

    /// Lebesgue measure of the union.
    pub fn measure(&self) -> f64 {
        let mut total = 0.0;
        let mut cur: Option<(f64, f64)> = None;
        for (lo, hi) in self.pieces() {
            match cur {
                Some((a, b)) if lo <= b => cur = Some((a, b.max(hi))),
                Some((a, b)) => {
                    total += b - a;
                    cur = Some((lo, hi));
                }
                None => cur = Some((lo, hi)),
            }
        }
        if let Some((a, b)) = cur {
            total += b - a;
        }
        total
    }

    /// True when two arcs share more than an endpoint.
    pub fn has_overlap(&self) -> bool {
        let mut last_hi = f64::NEG_INFINITY;
        for (lo, hi) in self.pieces() {
            if lo < last_hi {
                return true;
            }
            last_hi = last_hi.max(hi);
        }
        false
    }

    /// CSV with columns `center,radius`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("center,radius\n");
        for a in &self.arcs {
            s.push_str(&format!("{},{}\n", fmt17(a.center), fmt17(a.radius)));
        }
        s
    }
}

/// Whether the union of arcs covers all of T. Closed arcs, so touching
/// endpoints count as covered.
pub fn covering_check(family: &IntervalFamily) -> bool {
    let mut reach = 0.0;
    for (lo, hi) in family.pieces() {
        if lo > reach {
            return false;
        }
        reach = f64::max(reach, hi);
    }
    reach >= 1.0
}

/// `𝐈_{J,j}`: arcs of radius `2^{−j}` (or `2^{1−j}` when `primed`) around
/// the `2^{J−1}` odd centers `K/2^J`.
pub fn interval_family_ijj(big_j: u32, j: u32, primed: bool) -> Result<IntervalFamily> {
    if big_j < 1 || big_j > j || j > 52 {
        return invalid(format!("need 1 <= J <= j <= 52, got J = {big_j}, j = {j}"));
    }
    let radius = if primed { 2f64.powi(1 - j as i32) } else { 2f64.powi(-(j as i32)) };
    let scale = 2f64.powi(-(big_j as i32));
    let arcs = (0..1u64 << (big_j - 1))
        .map(|i| Arc { center: (2 * i + 1) as f64 * scale, radius })
        .collect();
    let name = if primed { "I'" } else { "I" };
    IntervalFamily::new(arcs, format!("{name}_{{{big_j},{j}}}"))
}

/// All dyadic intervals `I_{k,j} = [k/2^j − 2^{−j}, k/2^j + 2^{−j}]`.
pub fn dyadic_intervals(j: u32) -> Result<IntervalFamily> {
    if j > 24 {
        return invalid("level too large for an explicit family");
    }
    let r = 2f64.powi(-(j as i32));
    let arcs = (0..1u64 << j).map(|k| Arc { center: k as f64 * r, radius: r }).collect();
    IntervalFamily::new(arcs, format!("I_{{k,{j}}}"))
}

/// Odd centers `K/2^J` with `J = ⌊j/α⌋ + 1`, blown up to radius `2^{−j/α}`.
pub fn blown_up_family(j: u32, alpha: f64) -> Result<IntervalFamily> {
    if !(alpha >= 1.0) {
        return invalid("alpha must be >= 1");
    }
    let big_j = (j as f64 / alpha).floor() as u32 + 1;
    if big_j > 24 {
        return invalid("level too large for an explicit family");
    }
    let radius = 2f64.powf(-(j as f64) / alpha);
    let scale = 2f64.powi(-(big_j as i32));
    let arcs = (0..1u64 << (big_j - 1))
        .map(|i| Arc { center: (2 * i + 1) as f64 * scale, radius })
        .collect();
    IntervalFamily::new(arcs, format!("blowup_{{{big_j},{j}}}^{alpha}"))
}

/// `I_k^β`: arcs of radius `ε/2` at `m/k`, `ε = 1/(k·exp((ln k)^β))`.
pub fn ikbeta_family(k: u64, beta: f64) -> Result<IntervalFamily> {
    if k < 2 {
        return invalid("k must be >= 2");
    }
    if !(beta > 0.0 && beta < 1.0) {
        return invalid("beta must lie in (0, 1)");
    }
    let radius = 0.5 * kk_epsilon(k, beta);
    let arcs = (0..k).map(|m| Arc { center: m as f64 / k as f64, radius }).collect();
    IntervalFamily::new(arcs, format!("I_{k}^{beta}"))
}

/// `ε = 1/(k·exp((ln k)^β))`.
pub fn kk_epsilon(k: u64, beta: f64) -> f64 {
    let kf = k as f64;
    1.0 / (kf * kf.ln().powf(beta).exp())
}

/// A point built from binary digits at positions `a_1 < a_2 < …`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicPoint {
    pub x: f64,
    /// Digit positions `a_m`.
    pub digits: Vec<u32>,
    /// Exact value as `numer / 2^{a_depth}`.
    pub numer: u128,
}

impl DyadicPoint {
    /// Partial sums `K_m / 2^{a_m}` as (numerator, level).
    pub fn approximants(&self) -> Vec<(u128, u32)> {
        let mut acc = 0u128;
        let mut out = Vec::with_capacity(self.digits.len());
        let mut prev = 0u32;
        for &a in &self.digits {
            acc = (acc << (a - prev)) + 1;
            prev = a;
            out.push((acc, a));
        }
        out
    }
}

/// `x = Σ_{m ≤ depth} 2^{−a_m}`, `a_1 = 2`, `a_{m+1} = ⌈α a_m⌉`. For `α = 1`
/// the gaps are one digit (a generic point of exponent 1).
pub fn point_with_exponent(alpha: f64, depth: usize) -> Result<DyadicPoint> {
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return invalid("alpha must be a finite number >= 1");
    }
    if depth < 2 {
        return invalid("depth must be >= 2");
    }
    let mut digits = vec![2u32];
    while digits.len() < depth {
        let a = *digits.last().unwrap() as f64;
        let next = if alpha == 1.0 { a + 1.0 } else { (alpha * a).ceil().max(a + 1.0) };
        if next > 128.0 {
            return Err(Error::DepthOverflow(next as u32));
        }
        digits.push(next as u32);
    }
    let last = *digits.last().unwrap();
    let numer = digits.iter().fold(0u128, |acc, &a| {
        acc + if last - a == 128 { 0 } else { 1u128 << (last - a) }
    });
    let x = digits.iter().map(|&a| 2f64.powi(-(a as i32))).sum();
    Ok(DyadicPoint { x, digits, numer })
}

/// Finite-depth exponent estimate together with the depth that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentEstimate {
    pub exponent: f64,
    pub jmax: u32,
    /// Level attaining the maximum.
    pub best_j: u32,
}

/// `max_{4 ≤ j ≤ jmax} log2(1/dist(x, 2^{−j}Z)) / j`, clamped to ≥ 1.
pub fn dyadic_exponent_estimate(x: f64, jmax: u32) -> Result<ExponentEstimate> {
    if jmax < 4 || jmax > 60 {
        return invalid("jmax must lie in [4, 60]");
    }
    let x = x.rem_euclid(1.0);
    let mut best = (1.0f64, 4u32);
    for j in 1..=jmax {
        let scaled = x * 2f64.powi(j as i32);
        let dist = (scaled - scaled.round()).abs() * 2f64.powi(-(j as i32));
        if dist == 0.0 {
            let d = DyadicRational::new(scaled.round() as u64, j)?;
            return Err(Error::ExactDyadic { numer: d.numer(), level: d.level() });
        }
        if j < 4 {
            continue;
        }
        let e = -dist.log2() / j as f64;
        if e > best.0 {
            best = (e, j);
        }
    }
    Ok(ExponentEstimate { exponent: best.0, jmax, best_j: best.1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_dyadics() {
        let d = DyadicRational::new(12, 5).unwrap();
        assert_eq!((d.numer(), d.level()), (3, 3));
        assert_eq!(DyadicRational::new(32, 5).unwrap().level(), 0);
        assert_eq!(DyadicRational::new(5, 4).unwrap().value(), 5.0 / 16.0);
    }

    #[test]
    fn family_i13() {
        let f = interval_family_ijj(1, 3, false).unwrap();
        assert_eq!(f.arcs(), &[Arc { center: 0.5, radius: 0.125 }]);
    }

    #[test]
    fn primed_family_measure() {
        let f = interval_family_ijj(2, 4, true).unwrap();
        let centers: Vec<f64> = f.arcs().iter().map(|a| a.center).collect();
        assert_eq!(centers, vec![0.25, 0.75]);
        assert!(f.arcs().iter().all(|a| a.radius == 0.125));
        assert_eq!(f.measure(), 0.5);
        assert_eq!(f.measure(), 2f64.powi(2 - 1) * 2f64.powi(2 - 4));
    }

    #[test]
    fn top_generation_covers_circle() {
        let f = interval_family_ijj(3, 3, false).unwrap();
        assert_eq!(f.len(), 4);
        assert!(covering_check(&f));
        assert!(!f.has_overlap());
        for i in 0..1000 {
            assert!(f.contains(i as f64 / 1000.0));
        }
    }

    #[test]
    fn family_sizes_and_disjointness() {
        for j in 2..=10 {
            for big_j in 1..=j {
                for primed in [false, true] {
                    let f = interval_family_ijj(big_j, j, primed).unwrap();
                    assert_eq!(f.len(), 1 << (big_j - 1));
                    if big_j < j {
                        assert!(!f.has_overlap(), "J = {big_j}, j = {j}, primed = {primed}");
                        // primed arcs at J = j − 1 touch end to end
                        assert_eq!(covering_check(&f), primed && big_j + 1 == j);
                    }
                }
            }
        }
    }

    #[test]
    fn ikbeta_geometry() {
        let f = ikbeta_family(2, 0.5).unwrap();
        let eps = 1.0 / (2.0 * (2f64.ln().sqrt()).exp());
        assert_eq!(f.arcs()[0], Arc { center: 0.0, radius: eps / 2.0 });
        assert_eq!(f.arcs()[1].center, 0.5);

        let f = ikbeta_family(100, 0.5).unwrap();
        assert!(!f.has_overlap());
        let expect = (-(100f64.ln().sqrt())).exp();
        assert!((f.measure() - expect).abs() < 1e-12);
        assert!((f.total_length() - expect).abs() < 1e-12);
    }

    #[test]
    fn dyadic_intervals_cover() {
        assert!(covering_check(&dyadic_intervals(6).unwrap()));
        for j in [4, 9, 13] {
            for alpha in [1.5, 2.0, 3.7] {
                assert!(covering_check(&blown_up_family(j, alpha).unwrap()), "j = {j}, alpha = {alpha}");
            }
        }
    }

    #[test]
    fn points_with_prescribed_exponent() {
        let p = point_with_exponent(2.0, 4).unwrap();
        assert_eq!(p.digits, vec![2, 4, 8, 16]);
        assert_eq!(p.x, 0.25 + 1.0 / 16.0 + 1.0 / 256.0 + 1.0 / 65536.0);
        assert_eq!(p.numer, (1 << 14) + (1 << 12) + (1 << 8) + 1);

        let g = point_with_exponent(1.0, 5).unwrap();
        assert_eq!(g.digits, vec![2, 3, 4, 5, 6]);

        let deep = point_with_exponent(4.0, 4).unwrap();
        assert_eq!(deep.digits, vec![2, 8, 32, 128]);
        assert!(matches!(point_with_exponent(4.0, 5), Err(Error::DepthOverflow(512))));
    }

    #[test]
    fn approximants_satisfy_defining_inequality() {
        for alpha in [1.5, 2.0, 3.0] {
            let p = point_with_exponent(alpha, 4).unwrap();
            let apx = p.approximants();
            for w in apx.windows(2) {
                let (k, a) = w[0];
                let next = w[1].1;
                let err = p.x - k as f64 / 2f64.powi(a as i32);
                assert!(err > 0.0 && err <= 2f64.powi(1 - next as i32));
                // |x − K/2^a| ≤ 2^{−(α−η)a} for small η
                assert!(err <= 2f64.powf(-(alpha - 0.3) * a as f64), "alpha {alpha}, a {a}");
            }
        }
    }

    /// Scan every k/2^j directly; independent of the rounding shortcut.
    fn exponent_oracle(x: f64, jmax: u32) -> f64 {
        let mut best = 1.0f64;
        for j in 4..=jmax {
            let n = 1u64 << j;
            let d = (0..=n).map(|k| (x - k as f64 / n as f64).abs()).fold(f64::INFINITY, f64::min);
            best = best.max(-d.log2() / j as f64);
        }
        best
    }

    #[test]
    fn exponent_estimates() {
        // 1/3 stays at distance (1/3)2^{−j} from the level-j grid, so the
        // per-level ratio is 1 + log2(3)/j; the maximum sits at j = 4.
        let e = dyadic_exponent_estimate(1.0 / 3.0, 20).unwrap();
        assert_eq!(e.best_j, 4);
        assert!((e.exponent - (1.0 + 3f64.log2() / 4.0)).abs() < 1e-12, "{e:?}");
        assert!((e.exponent - exponent_oracle(1.0 / 3.0, 20)).abs() < 1e-12);

        let p = point_with_exponent(3.0, 4).unwrap();
        let e = dyadic_exponent_estimate(p.x, 30).unwrap();
        assert!((2.7..=3.3).contains(&e.exponent), "{e:?}");

        let p = point_with_exponent(2.0, 4).unwrap();
        let e = dyadic_exponent_estimate(p.x, 15).unwrap();
        assert!((1.8..=2.2).contains(&e.exponent), "{e:?}");
        assert!((e.exponent - exponent_oracle(p.x, 15)).abs() < 1e-12);
        // at depth 16 the truncated point is itself K/2^16
        assert!(matches!(dyadic_exponent_estimate(p.x, 16), Err(Error::ExactDyadic { level: 16, .. })));

        assert!(matches!(
            dyadic_exponent_estimate(5.0 / 16.0, 10),
            Err(Error::ExactDyadic { numer: 5, level: 4 })
        ));
    }

    fn grid_covers(f: &IntervalFamily) -> bool {
        // Dense membership probe including every arc endpoint.
        let mut probes: Vec<f64> = (0..4096).map(|i| i as f64 / 4096.0).collect();
        for a in f.arcs() {
            for t in [a.center - a.radius, a.center + a.radius] {
                probes.push((t + 1e-12).rem_euclid(1.0));
                probes.push((t - 1e-12).rem_euclid(1.0));
            }
        }
        probes.iter().all(|&x| f.contains(x))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn covering_agrees_with_membership_probe(
            arcs in prop::collection::vec((0u32..64, 1u32..40), 1..24)
        ) {
            let fam = IntervalFamily::new(
                arcs.iter().map(|&(c, r)| Arc { center: c as f64 / 64.0, radius: r as f64 / 512.0 }).collect(),
                "rand",
            ).unwrap();
            prop_assert_eq!(covering_check(&fam), grid_covers(&fam));
        }
    }
}
