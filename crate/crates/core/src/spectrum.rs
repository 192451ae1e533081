//! Divergence indices of partial sums, their level sets on grids, and
//! box-counting spectra.
//!
//! At a point `x` the polynomial index is `max_n log|S_n f(x)| / log n` and
//! the logarithmic index is `max_n log|S_n f(x)| / log log n`, both taken
//! over checkpoints `n ∈ [n_min, N]` and clamped at 0. The max over finite
//! `n` stands in for the limsup.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::io::fmt17;
use crate::jauge::Jauge;
use crate::trig::{partial_sum_envelope, partial_sum_profile, partial_sum_running_max, TrigPoly};

/// Default smallest checkpoint.
pub const N_MIN: u64 = 16;
/// Checkpoints per octave.
pub const PER_OCTAVE: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Mode {
    #[serde(rename = "lp")]
    Lp { p: f64 },
    #[serde(rename = "ct")]
    Ct,
}

impl Mode {
    /// Index for a running maximum `r` at checkpoint `n`, clamped at 0.
    pub fn index(&self, r: f64, n: u64) -> f64 {
        let num = r.ln();
        let den = match self {
            Mode::Lp { .. } => (n as f64).ln(),
            Mode::Ct => (n as f64).ln().ln(),
        };
        let v = num / den;
        if v > 0.0 {
            v
        } else {
            0.0
        }
    }

    /// Upper end of the admissible range of indices.
    pub fn beta_max(&self) -> f64 {
        match self {
            Mode::Lp { p } => 1.0 / p,
            Mode::Ct => 1.0,
        }
    }

    /// Reference dimension `1 − βp` (LP) or `1` (CT).
    pub fn reference_dim(&self, beta: f64) -> f64 {
        match self {
            Mode::Lp { p } => 1.0 - beta * p,
            Mode::Ct => 1.0,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Lp { p } => write!(f, "lp(p={p})"),
            Mode::Ct => f.write_str("ct"),
        }
    }
}

/// `n_min, ..., n_max` spaced `2^{1/8}` apart, always ending at `n_max`.
pub fn geometric_checkpoints(n_min: u64, n_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let n = (n_min as f64 * 2f64.powf(i as f64 / PER_OCTAVE as f64)).round() as u64;
        if n >= n_max {
            break;
        }
        if out.last() != Some(&n) {
            out.push(n);
        }
        i += 1;
    }
    out.push(n_max);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceProfile {
    pub x: f64,
    pub n_min: u64,
    pub n_max: u64,
    pub checkpoints: Vec<u64>,
    pub running_max: Vec<f64>,
    pub beta_poly: f64,
    pub beta_log: f64,
}

impl DivergenceProfile {
    pub fn beta(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Lp { .. } => self.beta_poly,
            Mode::Ct => self.beta_log,
        }
    }
}

fn max_index(mode: Mode, checkpoints: &[u64], maxima: &[f64]) -> f64 {
    checkpoints.iter().zip(maxima).map(|(&n, &r)| mode.index(r, n)).fold(0.0, f64::max)
}

fn check_n(f: &TrigPoly, n_max: u64) -> Result<()> {
    if n_max < 64 {
        return invalid(format!("N = {n_max} below 64"));
    }
    if n_max > f.degree() {
        return invalid(format!("N = {n_max} exceeds the degree {}", f.degree()));
    }
    Ok(())
}

/// Running maximum of `|S_n f(x)|` on geometric checkpoints and both
/// indices.
pub fn divergence_profile(f: &TrigPoly, x: f64, n_max: u64) -> Result<DivergenceProfile> {
    check_n(f, n_max)?;
    let checkpoints = geometric_checkpoints(N_MIN, n_max);
    let all: Vec<u64> = (0..=n_max).collect();
    let values = partial_sum_profile(f, x, &all)?;
    let mut best = 0.0f64;
    let mut running = Vec::with_capacity(n_max as usize + 1);
    for v in &values {
        best = best.max(v.norm());
        running.push(best);
    }
    let running_max: Vec<f64> = checkpoints.iter().map(|&n| running[n as usize]).collect();
    Ok(DivergenceProfile {
        x,
        n_min: N_MIN,
        n_max,
        beta_poly: max_index(Mode::Lp { p: 1.0 }, &checkpoints, &running_max),
        beta_log: max_index(Mode::Ct, &checkpoints, &running_max),
        checkpoints,
        running_max,
    })
}

/// Index of every point `m/M` of the grid.
pub fn grid_indices(f: &TrigPoly, mode: Mode, m: usize, n_max: u64) -> Result<Vec<f64>> {
    check_n(f, n_max)?;
    if m < 2 || !m.is_power_of_two() {
        return invalid(format!("grid size {m} is not a power of two"));
    }
    let checkpoints = geometric_checkpoints(N_MIN, n_max);
    let xs: Vec<f64> = (0..m).map(|i| i as f64 / m as f64).collect();
    let maxima = partial_sum_running_max(f, &xs, &checkpoints)?;
    Ok(maxima.iter().map(|r| max_index(mode, &checkpoints, r)).collect())
}

/// Points of a dyadic grid of size `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridSet {
    pub m: usize,
    pub indices: Vec<usize>,
}

impl GridSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        self.indices.iter().map(move |&i| i as f64 / self.m as f64)
    }
}

/// Grid points whose index lies in `[beta − eta, beta + eta]`.
pub fn level_set_from_indices(indices: &[f64], beta: f64, eta: f64) -> GridSet {
    let picked = indices
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= beta - eta && b <= beta + eta)
        .map(|(i, _)| i)
        .collect();
    GridSet { m: indices.len(), indices: picked }
}

pub fn level_set_grid(f: &TrigPoly, mode: Mode, m: usize, n_max: u64, beta: f64, eta: f64) -> Result<GridSet> {
    Ok(level_set_from_indices(&grid_indices(f, mode, m, n_max)?, beta, eta))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCount {
    pub dim: f64,
    pub residual: f64,
    /// `(s, occupied cells of length 2^{−s})`.
    pub counts: Vec<(u32, usize)>,
}

/// Least-squares slope of `log2 N(s)` against `s` for `s0 ≤ s ≤ s1`, where
/// `N(s)` counts occupied dyadic cells of length `2^{−s}`.
pub fn boxcount_dimension(set: &GridSet, s0: u32, s1: u32) -> Result<BoxCount> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let levels = set.m.trailing_zeros();
    if !set.m.is_power_of_two() || s0 < 1 || s0 >= s1 || s1 > levels {
        return invalid(format!("scales {s0}..{s1} invalid for a grid of {} points", set.m));
    }
    let counts: Vec<(u32, usize)> = (s0..=s1)
        .map(|s| {
            let shift = levels - s;
            let mut cells: Vec<usize> = set.indices.iter().map(|i| i >> shift).collect();
            cells.sort_unstable();
            cells.dedup();
            (s, cells.len())
        })
        .collect();
    let pts: Vec<(f64, f64)> = counts.iter().map(|&(s, c)| (s as f64, (c as f64).log2())).collect();
    let (slope, intercept) = least_squares(&pts);
    let residual = pts.iter().map(|(x, y)| (y - slope * x - intercept).abs()).fold(0.0, f64::max);
    Ok(BoxCount { dim: slope, residual, counts })
}

/// `(slope, intercept)` of the least-squares line.
pub fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (slope, my - slope * mx)
}

/// `N(s)·φ(2^{−s})`: the jauge mass of the covering by occupied cells.
pub fn jauge_mass(set: &GridSet, s: u32, j: &Jauge) -> Result<f64> {
    let levels = set.m.trailing_zeros();
    if s < 1 || s > levels {
        return invalid(format!("scale {s} outside 1..={levels}"));
    }
    let mut cells: Vec<usize> = set.indices.iter().map(|i| i >> (levels - s)).collect();
    cells.sort_unstable();
    cells.dedup();
    Ok(cells.len() as f64 * j.ln_eval(2f64.powi(-(s as i32)))?.exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinSpec {
    pub centers: Vec<f64>,
    pub half_width: f64,
    pub s0: u32,
    pub s1: u32,
}

impl BinSpec {
    /// Centers `0, 0.1, …` up to the admissible range of `mode`, half
    /// width 0.05, box-count scales `2..log2(M) − 2`.
    pub fn default_for(mode: Mode, m: usize) -> Self {
        let top = mode.beta_max();
        let count = (top / 0.1 + 1e-9).floor() as usize;
        let centers = (0..=count).map(|i| i as f64 / 10.0).collect();
        let levels = m.trailing_zeros();
        BinSpec { centers, half_width: 0.05, s0: 2, s1: levels.saturating_sub(2).max(3) }
    }

    /// Bin of `v`: the one with `c − h < v ≤ c + h`; values on an edge go to
    /// the lower bin.
    pub fn bin_of(&self, v: f64) -> Option<usize> {
        self.centers.iter().position(|&c| v > c - self.half_width && v <= c + self.half_width)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBin {
    pub beta_center: f64,
    pub half_width: f64,
    pub count: usize,
    pub dim: Option<f64>,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub mode: Mode,
    pub grid_m: usize,
    pub n_max: u64,
    pub n_min: u64,
    pub s0: u32,
    pub s1: u32,
    pub bins: Vec<SpectrumBin>,
}

impl SpectrumTable {
    /// Builds the table from per-point indices.
    pub fn from_indices(indices: &[f64], mode: Mode, n_max: u64, spec: &BinSpec) -> Result<Self> {
        let m = indices.len();
        let mut members = vec![Vec::new(); spec.centers.len()];
        for (i, &b) in indices.iter().enumerate() {
            if let Some(k) = spec.bin_of(b) {
                members[k].push(i);
            }
        }
        let mut bins = Vec::with_capacity(members.len());
        for (c, idx) in spec.centers.iter().zip(members) {
            let count = idx.len();
            let (dim, residual) = if count == 0 {
                (None, None)
            } else {
                let b = boxcount_dimension(&GridSet { m, indices: idx }, spec.s0, spec.s1)?;
                (Some(b.dim.clamp(0.0, 1.0)), Some(b.residual))
            };
            bins.push(SpectrumBin { beta_center: *c, half_width: spec.half_width, count, dim, residual });
        }
        Ok(SpectrumTable { mode, grid_m: m, n_max, n_min: N_MIN, s0: spec.s0, s1: spec.s1, bins })
    }

    /// Slope of `dim` against `β` over the nonempty bins whose centers are
    /// listed; `None` with fewer than two such bins.
    pub fn fitted_slope(&self, centers: &[f64]) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .bins
            .iter()
            .filter(|b| centers.iter().any(|c| (c - b.beta_center).abs() < 1e-12))
            .filter_map(|b| b.dim.map(|d| (b.beta_center, d)))
            .collect();
        if pts.len() < 2 {
            None
        } else {
            Some(least_squares(&pts).0)
        }
    }

    /// CSV `beta_center,half_width,count,dim,residual`; empty bins carry
    /// `NaN`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("beta_center,half_width,count,dim,residual\n");
        for b in &self.bins {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt17(b.beta_center),
                fmt17(b.half_width),
                b.count,
                fmt17(b.dim.unwrap_or(f64::NAN)),
                fmt17(b.residual.unwrap_or(f64::NAN)),
            ));
        }
        s
    }

    /// JSON document with the table and the reference curve.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            #[serde(flatten)]
            table: &'a SpectrumTable,
            reference: Vec<(f64, f64)>,
        }
        let reference = self.bins.iter().map(|b| (b.beta_center, self.mode.reference_dim(b.beta_center))).collect();
        Ok(serde_json::to_string_pretty(&Doc { table: self, reference })?)
    }
}

pub fn empirical_spectrum(f: &TrigPoly, mode: Mode, m: usize, n_max: u64, spec: &BinSpec) -> Result<SpectrumTable> {
    let indices = grid_indices(f, mode, m, n_max)?;
    SpectrumTable::from_indices(&indices, mode, n_max, spec)
}

/// `max` over the grid of `max_{1 ≤ n' ≤ n} |S_{n'} f(x)| / n'^a` at each
/// checkpoint.
pub fn upper_envelope(f: &TrigPoly, m: usize, checkpoints: &[u64], a: f64) -> Result<Vec<f64>> {
    let xs: Vec<f64> = (0..m).map(|i| i as f64 / m as f64).collect();
    let env = partial_sum_envelope(f, &xs, checkpoints, a)?;
    let mut out = vec![0.0f64; checkpoints.len()];
    for row in &env {
        for (o, v) in out.iter_mut().zip(row) {
            *o = o.max(*v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{ikbeta_family, interval_family_ijj};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn full(m: usize) -> GridSet {
        GridSet { m, indices: (0..m).collect() }
    }

    /// Left endpoints of the depth-`d` triadic Cantor intervals, built by
    /// repeated subdivision.
    fn cantor_intervals(depth: u32) -> Vec<(f64, f64)> {
        let mut v = vec![(0.0, 1.0)];
        for _ in 0..depth {
            v = v
                .into_iter()
                .flat_map(|(a, b): (f64, f64)| {
                    let t = (b - a) / 3.0;
                    [(a, a + t), (b - t, b)]
                })
                .collect();
        }
        v
    }

    #[test]
    fn checkpoints_are_geometric() {
        let c = geometric_checkpoints(16, 1000);
        assert_eq!(c[0], 16);
        assert_eq!(*c.last().unwrap(), 1000);
        assert!(c.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(geometric_checkpoints(16, 64).len(), 17);
    }

    #[test]
    fn monomial_profile() {
        let f = TrigPoly::monomial(5).add_scaled(&TrigPoly::monomial(100), Complex64::default());
        for x in [0.0, 0.3, 0.77] {
            let pr = divergence_profile(&f, x, 100).unwrap();
            assert_eq!(pr.beta_poly, 0.0);
            assert_eq!(pr.beta_log, 0.0);
            assert!(pr.running_max.iter().all(|&r| (r - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn dirichlet_profile_index() {
        // |S_n D_N(0)| = 2n + 1, so log|S_n|/log n decreases to 1 and the
        // maximum sits at the first checkpoint.
        let f = TrigPoly::dirichlet(4096);
        let pr = divergence_profile(&f, 0.0, 4096).unwrap();
        let want = 33f64.ln() / 16f64.ln();
        assert!((pr.beta_poly - want).abs() < 1e-9);
        assert!(pr.running_max.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn level_set_of_monomial() {
        let f = TrigPoly::monomial(5).add_scaled(&TrigPoly::monomial(100), Complex64::default());
        let s = level_set_grid(&f, Mode::Lp { p: 2.0 }, 256, 100, 0.0, 0.05).unwrap();
        assert_eq!(s.len(), 256);
        let t = empirical_spectrum(&f, Mode::Lp { p: 2.0 }, 256, 100, &BinSpec::default_for(Mode::Lp { p: 2.0 }, 256))
            .unwrap();
        assert_eq!(t.bins[0].count, 256);
        assert!((t.bins[0].dim.unwrap() - 1.0).abs() < 1e-12);
        assert!(t.bins[1..].iter().all(|b| b.count == 0 && b.dim.is_none()));
    }

    #[test]
    fn boxcount_oracles() {
        let b = boxcount_dimension(&full(1 << 14), 2, 12).unwrap();
        assert!((b.dim - 1.0).abs() < 1e-9);
        let b = boxcount_dimension(&GridSet { m: 1 << 14, indices: vec![1234] }, 2, 12).unwrap();
        assert_eq!(b.dim, 0.0);
        assert!(matches!(boxcount_dimension(&GridSet { m: 8, indices: vec![] }, 1, 3), Err(Error::EmptySet)));
    }

    #[test]
    fn boxcount_cantor() {
        let m = 1usize << 14;
        let iv = cantor_intervals(8);
        let indices: Vec<usize> = (0..m)
            .filter(|&i| {
                let x = i as f64 / m as f64;
                iv.iter().any(|&(a, b)| x >= a && x <= b)
            })
            .collect();
        let b = boxcount_dimension(&GridSet { m, indices }, 2, 12).unwrap();
        assert!((0.58..=0.68).contains(&b.dim), "{b:?}");
    }

    #[test]
    fn boxcount_on_arc_families() {
        let m = 1usize << 16;
        for fam in [interval_family_ijj(6, 9, false).unwrap(), ikbeta_family(64, 0.5).unwrap()] {
            let indices: Vec<usize> = (0..m).filter(|&i| fam.contains(i as f64 / m as f64)).collect();
            let set = GridSet { m, indices };
            let b = boxcount_dimension(&set, 14, 16).unwrap();
            assert!((b.dim - 1.0).abs() < 0.05, "{} {b:?}", fam.label());
            let (_, c) = *b.counts.last().unwrap();
            let mu = fam.measure();
            assert!((c as f64 / m as f64 - mu).abs() <= mu * 0.05 + 2.0 * fam.len() as f64 / m as f64);
        }
    }

    #[test]
    fn bins_ties_go_low() {
        let spec = BinSpec { centers: vec![0.0, 0.1, 0.2], half_width: 0.05, s0: 2, s1: 4 };
        assert_eq!(spec.bin_of(0.0), Some(0));
        assert_eq!(spec.bin_of(0.05), Some(0));
        assert_eq!(spec.bin_of(0.0500001), Some(1));
        assert_eq!(spec.bin_of(0.25), Some(2));
        assert_eq!(spec.bin_of(0.26), None);
    }

    #[test]
    fn table_csv_and_json() {
        let idx = vec![0.0; 64];
        let spec = BinSpec { centers: vec![0.0, 0.1], half_width: 0.05, s0: 2, s1: 5 };
        let t = SpectrumTable::from_indices(&idx, Mode::Lp { p: 2.0 }, 100, &spec).unwrap();
        let csv = t.to_csv();
        assert_eq!(csv.lines().next().unwrap(), "beta_center,half_width,count,dim,residual");
        assert!(csv.lines().nth(2).unwrap().ends_with("NaN,NaN"));
        let json: serde_json::Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(json["mode"]["kind"], "lp");
        assert_eq!(json["mode"]["p"], 2.0);
        assert_eq!(json["reference"][1][1], 0.8);
        assert_eq!(t.fitted_slope(&[0.0, 0.1]), None);
        let back: SpectrumTable = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn envelope_of_dirichlet() {
        let f = TrigPoly::dirichlet(256);
        let e = upper_envelope(&f, 1024, &[64, 256], 1.0).unwrap();
        // |S_n D(0)|/n = (2n+1)/n peaks at n = 1
        assert!((e[0] - 3.0).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn running_max_is_monotone(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 70..200), x in 0.0f64..1.0) {
            let f = TrigPoly::new(-3, coeffs.iter().map(|&(a, b)| Complex64::new(a, b)).collect(), "r").unwrap();
            let n = f.degree();
            let pr = divergence_profile(&f, x, n).unwrap();
            prop_assert!(pr.running_max.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(pr.beta_poly >= 0.0 && pr.beta_log >= 0.0);
        }

        #[test]
        fn boxcount_subset_monotone(bits in prop::collection::vec(any::<bool>(), 256)) {
            let indices: Vec<usize> = bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
            prop_assume!(!indices.is_empty());
            let b = boxcount_dimension(&GridSet { m: 256, indices }, 1, 8).unwrap();
            prop_assert!(b.dim >= -1e-12 && b.dim <= 1.0 + 1e-12);
        }
    }
}
