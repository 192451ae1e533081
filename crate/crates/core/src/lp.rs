//! Block polynomials whose partial sums jump on dyadic arcs, and the
//! saturating function for `L^p(T)` assembled from them.
//!
//! For `1 ≤ J ≤ j`, `χ_{J,j}` is the piecewise linear bump equal to 1 on
//! `𝐈_{J,j}` and 0 off `𝐈'_{J,j}`, and
//!
//! ```text
//! g_{J,j} = e_{(2J−1)2^j} σ_{2^j} χ_{J,j},    g_j = Σ_J c_{J,j} g_{J,j},
//! g = Σ_j j^{−2} e_{j2^{j+1}} g_j.
//! ```

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dyadic::{interval_family_ijj, IntervalFamily};
use crate::error::{invalid, Error, Result};
use crate::trig::{phase, TrigPoly, TAU};

/// Largest generation accepted by [`build_gj`].
pub const GJ_CAP: u32 = 16;
/// Largest truncation level accepted by [`build_saturating_lp`].
pub const LP_JMAX_CAP: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpBlockSpec {
    pub p: f64,
    pub j: u32,
    pub big_j: u32,
}

impl LpBlockSpec {
    pub fn new(p: f64, big_j: u32, j: u32) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return invalid(format!("p = {p} must lie in (1, inf)"));
        }
        check_indices(big_j, j)?;
        Ok(Self { p, j, big_j })
    }

    /// `c_{J,j} = (1/j)·2^{−(J−j+1)/p}`.
    pub fn c(&self) -> f64 {
        let e = (self.big_j as f64 - self.j as f64 + 1.0) / self.p;
        2f64.powf(-e) / self.j as f64
    }

    /// Center frequency `(2J−1)2^j`.
    pub fn center(&self) -> i64 {
        (2 * self.big_j as i64 - 1) << self.j
    }

    /// `n_{J,j} = (2J−1)2^j − (2^j−1)`.
    pub fn n(&self) -> i64 {
        self.center() - ((1i64 << self.j) - 1)
    }

    /// `m_{J,j} = (2J−1)2^j + (2^j−1)`.
    pub fn m(&self) -> i64 {
        self.center() + ((1i64 << self.j) - 1)
    }
}

fn check_indices(big_j: u32, j: u32) -> Result<()> {
    if big_j < 1 || big_j > j {
        return invalid(format!("need 1 <= J <= j, got J = {big_j}, j = {j}"));
    }
    if j > 40 {
        return Err(Error::GenerationTooLarge { requested: j, cap: 40 });
    }
    Ok(())
}

/// Fourier transform of the trapezoid that is 1 on `[−a, a]` and 0 off
/// `[−b, b]`.
fn trapezoid_hat(k: i64, a: f64, b: f64) -> f64 {
    if k == 0 {
        return a + b;
    }
    let kf = k as f64;
    ((TAU * kf * a).cos() - (TAU * kf * b).cos()) / (2.0 * std::f64::consts::PI.powi(2) * kf * kf * (b - a))
}

/// `Σ_{K odd < 2^J} e^{−2πikK/2^J}`.
fn odd_center_sum(k: i64, big_j: u32) -> f64 {
    let period = 1i64 << big_j;
    let half = period / 2;
    let r = k.rem_euclid(period);
    if r == 0 {
        half as f64
    } else if r == half {
        -(half as f64)
    } else {
        0.0
    }
}

/// Coefficients of `χ_{J,j}` on `|k| ≤ 2^j`, in closed form.
pub fn build_chi(big_j: u32, j: u32) -> Result<TrigPoly> {
    check_indices(big_j, j)?;
    let label = format!("chi_{{{big_j},{j}}}");
    let r = 1i64 << j;
    if big_j == j {
        let mut coeffs = vec![Complex64::default(); (2 * r + 1) as usize];
        coeffs[r as usize] = Complex64::new(1.0, 0.0);
        return TrigPoly::new(-r, coeffs, label);
    }
    let a = 2f64.powi(-(j as i32));
    let b = 2.0 * a;
    let coeffs = (-r..=r)
        .map(|k| Complex64::new(odd_center_sum(k, big_j) * trapezoid_hat(k, a, b), 0.0))
        .collect();
    TrigPoly::new(-r, coeffs, label)
}

/// `g_{J,j} = e_{(2J−1)2^j} σ_{2^j} χ_{J,j}` (unscaled).
pub fn build_block(big_j: u32, j: u32, p: f64) -> Result<TrigPoly> {
    let spec = LpBlockSpec::new(p, big_j, j)?;
    block(&spec)
}

fn block(spec: &LpBlockSpec) -> Result<TrigPoly> {
    let chi = build_chi(spec.big_j, spec.j)?;
    Ok(chi
        .fejer_sum(1 << spec.j)?
        .modulate(spec.center())
        .with_label(format!("g_{{{},{}}}", spec.big_j, spec.j)))
}

// g_j written into `out` at frequency offset `offset`, scaled by `w`.
fn accumulate_gj(out: &mut [Complex64], base: i64, offset: i64, j: u32, p: f64, w: f64) -> Result<()> {
    for big_j in 1..=j {
        let spec = LpBlockSpec::new(p, big_j, j)?;
        let b = block(&spec)?;
        let c = w * spec.c();
        for (i, a) in b.coeffs().iter().enumerate() {
            let k = b.kmin() + i as i64 + offset - base;
            out[k as usize] += a * c;
        }
    }
    Ok(())
}

/// `g_j = Σ_J c_{J,j} g_{J,j}`, stored on the window `[0, j·2^{j+1})`.
pub fn build_gj(j: u32, p: f64) -> Result<TrigPoly> {
    if j < 3 {
        return invalid(format!("g_j needs j >= 3 (Fejér window 2^j >= 8), got {j}"));
    }
    if j > GJ_CAP {
        return Err(Error::GenerationTooLarge { requested: j, cap: GJ_CAP });
    }
    gj_unchecked(j, p)
}

fn gj_unchecked(j: u32, p: f64) -> Result<TrigPoly> {
    let width = (j as usize) << (j + 1);
    let mut coeffs = vec![Complex64::default(); width];
    accumulate_gj(&mut coeffs, 0, 0, j, p, 1.0)?;
    TrigPoly::new(0, coeffs, format!("g_{j}"))
}

/// Frequency offset `j·2^{j+1}` of the `j`-th summand of the saturating
/// function.
pub fn lp_offset(j: u32) -> i64 {
    (j as i64) << (j + 1)
}

/// `g = Σ_{j=1}^{jmax} j^{−2} e_{j2^{j+1}} g_j`.
pub fn build_saturating_lp(p: f64, jmax: u32) -> Result<TrigPoly> {
    if jmax < 3 {
        return invalid(format!("jmax must be >= 3, got {jmax}"));
    }
    if jmax > LP_JMAX_CAP {
        return Err(Error::GenerationTooLarge { requested: jmax, cap: LP_JMAX_CAP });
    }
    if !(p > 1.0) || !p.is_finite() {
        return invalid(format!("p = {p} must lie in (1, inf)"));
    }
    let top = 2 * lp_offset(jmax);
    let mut coeffs = vec![Complex64::default(); top as usize];
    for j in 1..=jmax {
        let w = 1.0 / (j as f64 * j as f64);
        accumulate_gj(&mut coeffs, 0, lp_offset(j), j, p, w)?;
    }
    TrigPoly::new(0, coeffs, format!("g_lp(p={p},jmax={jmax})"))
}

/// `h_j = f_j + (1/j) e_{j2^{j+1}} g_j` for a caller-supplied `f_j`.
pub fn build_hj(f_j: &TrigPoly, j: u32, p: f64) -> Result<TrigPoly> {
    let g = build_gj(j, p)?.modulate(lp_offset(j));
    Ok(f_j.add_scaled(&g, Complex64::new(1.0 / j as f64, 0.0)).with_label(format!("h_{j}")))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpWitness {
    pub x: f64,
    pub n1: u64,
    pub n2: u64,
    pub gap: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `S_{n2}P(x) − S_{n1}P(x)`: the frequencies with `n1 < |k| ≤ n2`.
pub fn partial_sum_gap(poly: &TrigPoly, x: f64, n1: u64, n2: u64) -> Complex64 {
    let mut acc = Complex64::default();
    let (n1, n2) = (n1 as i64, n2 as i64);
    let mut add_run = |lo: i64, hi: i64| {
        let lo = lo.max(poly.kmin());
        let hi = hi.min(poly.kmax());
        if lo > hi {
            return;
        }
        let w = phase(1, x);
        let mut z = phase(lo, x);
        for (step, k) in (lo..=hi).enumerate() {
            if step > 0 {
                if step % 64 == 0 {
                    z = phase(k, x);
                } else {
                    z *= w;
                }
            }
            acc += poly.coeff(k) * z;
        }
    };
    add_run(n1 + 1, n2);
    add_run(-n2, -n1 - 1);
    acc
}

/// The pair `(n_{J,j} − 1, m_{J,j})` and the jump of the partial sums
/// across it at `x ∈ 𝐈_{J,j}`.
///
/// With `shifted`, `poly` is the full saturating function: indices move by
/// `j·2^{j+1}` and the bound picks up the factor `j^{−2}`.
pub fn witness_jump(poly: &TrigPoly, x: f64, big_j: u32, j: u32, p: f64, shifted: bool) -> Result<JumpWitness> {
    if j < 3 {
        return invalid(format!("jump lemma needs j >= 3, got {j}"));
    }
    let spec = LpBlockSpec::new(p, big_j, j)?;
    let family = interval_family_ijj(big_j, j, false)?;
    if !family.contains(x) {
        return Err(Error::PointOutsideFamily { x, family: family.label().to_string() });
    }
    let (offset, weight) = if shifted { (lp_offset(j), 1.0 / (j as f64 * j as f64)) } else { (0, 1.0) };
    let n1 = (spec.n() - 1 + offset) as u64;
    let n2 = (spec.m() + offset) as u64;
    let gap = partial_sum_gap(poly, x, n1, n2).norm();
    let bound = weight * spec.c() / 4.0;
    Ok(JumpWitness { x, n1, n2, gap, bound, holds: gap >= bound - 1e-12 })
}

/// `samples` points spread over each arc of `family`, endpoints included.
pub fn arc_samples(family: &IntervalFamily, samples: usize) -> Vec<f64> {
    let mut xs = Vec::with_capacity(family.len() * samples);
    for a in family.arcs() {
        for i in 0..samples {
            let s = if samples == 1 { 0.0 } else { 2.0 * i as f64 / (samples - 1) as f64 - 1.0 };
            xs.push((a.center + s * a.radius).rem_euclid(1.0));
        }
    }
    xs
}

/// One row of a jump sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRow {
    pub big_j: u32,
    pub j: u32,
    pub witness: JumpWitness,
}

/// Witnesses for every `J ≤ j` at `samples_per_arc` points on each arc of
/// `𝐈_{J,j}`, computed on `g_j`.
pub fn jump_sweep(j: u32, p: f64, samples_per_arc: usize) -> Result<Vec<JumpRow>> {
    let gj = build_gj(j, p)?;
    let mut jobs = Vec::new();
    for big_j in 1..=j {
        let fam = interval_family_ijj(big_j, j, false)?;
        jobs.extend(arc_samples(&fam, samples_per_arc).into_iter().map(|x| (big_j, x)));
    }
    jobs.par_iter()
        .map(|&(big_j, x)| Ok(JumpRow { big_j, j, witness: witness_jump(&gj, x, big_j, j, p, false)? }))
        .collect()
}

/// `min |σ_{2^j}χ_{J,j}|` over `samples_per_arc` points on each arc of
/// `𝐈_{J,j}`.
pub fn sigma_chi_min_on_arcs(big_j: u32, j: u32, samples_per_arc: usize) -> Result<f64> {
    let s = build_chi(big_j, j)?.fejer_sum(1 << j)?;
    let fam = interval_family_ijj(big_j, j, false)?;
    Ok(arc_samples(&fam, samples_per_arc)
        .par_iter()
        .map(|&x| s.eval(x).norm())
        .reduce(|| f64::INFINITY, f64::min))
}
