//! Polynomials bounded by 1 whose partial sums are large on a union of arcs.
//!
//! With `ε = 1/(k·exp((ln k)^β))` and `z_j = e^{2πij/k}`,
//!
//! ```text
//! f(z) = (1/k) Σ_j (1+ε)/(1+ε − z̄_j z) = 1/(1 − (z/(1+ε))^k),
//! g(x) = log f(e^{2πix}),    P = (2/π) e_n σ_n(Im g).
//! ```
//!
//! `Re f > 0` on the closed disk, so `|Im g| ≤ π/2` and `‖P‖∞ ≤ 1`, while
//! `|S_n P| = |σ_n g|/π` is of size `(ln k)^β` on the arcs `I_k^β`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::kk_epsilon;
use crate::error::{invalid, Error, Result};
use crate::trig::{cis_turns, coefficients_from_samples, partial_sum_grid, SampledFunction, TrigPoly};

/// Tail tolerance used when `g` is sampled for a block.
pub const CT_TAIL_TOL: f64 = 1e-10;
/// Largest sample count a block build may reach.
pub const CT_MAX_GRID: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CtBlockSpec {
    pub beta: f64,
    pub delta: f64,
    pub k: u64,
    pub epsilon: f64,
    pub n: u64,
}

/// `f` at `e^{2πix}`, closed form.
pub fn kk_f(k: u64, epsilon: f64, x: f64) -> Complex64 {
    let rho = (-(k as f64) * epsilon.ln_1p()).exp();
    let u = cis_turns((k as f64 * x).rem_euclid(1.0)) * rho;
    Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - u)
}

/// `g = log f` at `e^{2πix}`: `−log(1 − (z/(1+ε))^k)`.
pub fn kk_g(k: u64, epsilon: f64, x: f64) -> Complex64 {
    kk_f(k, epsilon, x).ln()
}

/// Measured constants in the four properties of `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KkReport {
    pub k: u64,
    pub beta: f64,
    pub epsilon: f64,
    /// `min Re f` over the grid.
    pub min_re: f64,
    /// `min Re f` over sampled points of `I_k^β`.
    pub min_re_arcs: f64,
    /// `max |f|` over the grid.
    pub max_abs: f64,
    /// `min Re f / ε` (P1).
    pub c_p1: f64,
    /// `min_{I_k^β} Re f / exp((ln k)^β)` (P2).
    pub c_p2: f64,
    /// `max |f| / exp((ln k)^β)` (P3).
    pub c_p3: f64,
}

fn check_params(k: u64, beta: f64) -> Result<()> {
    if k < 1 {
        return invalid("k must be >= 1");
    }
    if !(beta > 0.0 && beta < 1.0) {
        return invalid(format!("beta = {beta} outside (0, 1)"));
    }
    Ok(())
}

fn arc_points(k: u64, epsilon: f64, per_arc: usize) -> impl Iterator<Item = f64> {
    let per = per_arc.max(2);
    (0..k).flat_map(move |a| {
        (0..per).map(move |i| {
            let s = i as f64 / (per - 1) as f64 - 0.5;
            (a as f64 / k as f64 + s * epsilon).rem_euclid(1.0)
        })
    })
}

/// Samples of `f` on `M` points together with the (P1)–(P3) constants.
pub fn eval_kk_f(k: u64, beta: f64, m: usize) -> Result<(SampledFunction, KkReport)> {
    check_params(k, beta)?;
    if m < 64 * k as usize {
        return invalid(format!("grid {m} below 64k = {}", 64 * k));
    }
    let eps = kk_epsilon_any(k, beta);
    let f = SampledFunction::from_fn(m, format!("f_{k}"), |t| kk_f(k, eps, t))?;
    let min_re = f.samples().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let max_abs = f.sup_abs();
    let min_re_arcs = arc_points(k, eps, 16).map(|x| kk_f(k, eps, x).re).fold(f64::INFINITY, f64::min);
    let peak = (k as f64).ln().powf(beta).exp();
    let report = KkReport {
        k,
        beta,
        epsilon: eps,
        min_re,
        min_re_arcs,
        max_abs,
        c_p1: min_re / eps,
        c_p2: min_re_arcs / peak,
        c_p3: max_abs / peak,
    };
    Ok((f, report))
}

// ε also for k = 1, where it equals 1.
fn kk_epsilon_any(k: u64, beta: f64) -> f64 {
    if k == 1 {
        1.0
    } else {
        kk_epsilon(k, beta)
    }
}

/// `g = log f` sampled on `M` points and its certified coefficients.
#[derive(Debug, Clone)]
pub struct GBuild {
    pub k: u64,
    pub beta: f64,
    pub epsilon: f64,
    pub samples: SampledFunction,
    /// Coefficients on `|m| < 3M/8`.
    pub coeffs: TrigPoly,
    pub sup_im: f64,
}

impl GBuild {
    pub fn grid(&self) -> usize {
        self.samples.len()
    }

    /// `Σ_{m<0}|ĝ(m)|² / Σ|ĝ(m)|²`.
    pub fn negative_energy_fraction(&self) -> f64 {
        let mut neg = 0.0;
        let mut all = 0.0;
        for (i, c) in self.coeffs.coeffs().iter().enumerate() {
            let e = c.norm_sqr();
            all += e;
            if self.coeffs.kmin() + (i as i64) < 0 {
                neg += e;
            }
        }
        neg / all
    }
}

/// Principal logarithm of the samples of `f` and its Fourier coefficients.
pub fn build_g(k: u64, beta: f64, m: usize, tail_tol: f64) -> Result<GBuild> {
    check_params(k, beta)?;
    if k < 2 {
        return invalid("k must be >= 2");
    }
    let eps = kk_epsilon(k, beta);
    let f = SampledFunction::from_fn(m, format!("f_{k}"), |t| kk_f(k, eps, t))?;
    if let Some((index, z)) = f.samples().iter().enumerate().find(|(_, z)| !(z.re > 0.0)) {
        return Err(Error::LogBranch { re: z.re, index });
    }
    let samples = f.map(|z| z.ln());
    let sup_im = samples.samples().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let half = (m / 2 - m / crate::trig::EDGE_BAND_FRACTION) as i64 - 1;
    let coeffs = coefficients_from_samples(&samples, -half, half, tail_tol)?.with_label(format!("g_{k}"));
    Ok(GBuild { k, beta, epsilon: eps, samples, coeffs, sup_im })
}

/// Smallest grid (from `64k` upward) on which `g` passes the tail test.
pub fn build_g_auto(k: u64, beta: f64, min_grid: usize) -> Result<GBuild> {
    let mut m = (64 * k as usize).max(min_grid).next_power_of_two();
    loop {
        match build_g(k, beta, m, CT_TAIL_TOL) {
            Err(Error::TailNotDecayed { .. }) if m < CT_MAX_GRID => m *= 2,
            other => return other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedN {
    pub n: u64,
    /// Spectral `sup |g'|` on the grid refined twice.
    pub sup_dg: f64,
    /// The same on the grid refined once.
    pub sup_dg_coarse: f64,
    /// `n / (k³ exp(3 (ln k)^β))`.
    pub ratio: f64,
}

/// `n = ⌈sup |g'|⌉` (at least 4), so that `‖g'‖∞ ≤ n`.
pub fn resolve_n(g: &GBuild) -> Result<ResolvedN> {
    let fine = g.samples.derivative_sup(4);
    let coarse = g.samples.derivative_sup(2);
    if (fine - coarse).abs() > 0.01 * fine.max(1e-300) {
        return invalid(format!("sup |g'| not resolved: {coarse} vs {fine} under refinement"));
    }
    let n = (fine.ceil() as u64).max(4);
    let kf = g.k as f64;
    let ratio = n as f64 / (kf.powi(3) * (3.0 * kf.ln().powf(g.beta)).exp());
    Ok(ResolvedN { n, sup_dg: fine, sup_dg_coarse: coarse, ratio })
}

/// `n` for a bare sample set (used for degenerate inputs).
pub fn resolve_n_samples(samples: &SampledFunction) -> u64 {
    (samples.derivative_sup(4).ceil() as u64).max(4)
}

#[derive(Debug, Clone)]
pub struct CtBlock {
    pub spec: CtBlockSpec,
    pub g: GBuild,
    pub resolved: ResolvedN,
    pub p: TrigPoly,
}

/// `P = (2/π) e_n σ_n(Im g)` from coefficients of `g`.
pub fn p_from_g(g_coeffs: &TrigPoly, n: u64) -> Result<TrigPoly> {
    let im = g_coeffs.truncate(n - 1).imag_part();
    Ok(im
        .fejer_sum(n)?
        .scale(Complex64::new(2.0 / std::f64::consts::PI, 0.0))
        .modulate(n as i64))
}

/// Full block for `(k, β, δ)`.
pub fn build_p(k: u64, beta: f64, delta: f64) -> Result<CtBlock> {
    if !(delta > 0.0 && delta < 1.0 / 3.0) {
        return invalid(format!("delta = {delta} outside (0, 1/3)"));
    }
    let mut g = build_g_auto(k, beta, 0)?;
    let mut resolved = resolve_n(&g)?;
    let need = 8 * (resolved.n as usize).next_power_of_two();
    if need > g.grid() {
        g = build_g_auto(k, beta, need)?;
        resolved = resolve_n(&g)?;
    }
    let n = resolved.n;
    if (n as usize) >= g.coeffs.degree() as usize {
        return invalid("sample grid too small for the resolved n");
    }
    let p = p_from_g(&g.coeffs, n)?.with_label(format!("P(k={k},beta={beta})"));
    let spec = CtBlockSpec { beta, delta, k, epsilon: g.epsilon, n };
    Ok(CtBlock { spec, g, resolved, p })
}

impl CtBlock {
    /// `σ_n g` as a polynomial.
    pub fn sigma_g(&self) -> Result<TrigPoly> {
        self.g.coeffs.truncate(self.spec.n - 1).fejer_sum(self.spec.n)
    }

    /// `max |P|` on a grid four times the window.
    pub fn p_sup(&self) -> Result<f64> {
        let m = (4 * self.p.width()).next_power_of_two();
        Ok(self.p.sample(m)?.sup_abs())
    }

    /// Largest relative deviation from `|S_nP| = |σ_n g|/π` over `points`
    /// equispaced points.
    pub fn identity_error(&self, points: usize) -> Result<f64> {
        let n = self.spec.n;
        let m = (2 * self.p.width()).next_power_of_two().max(points);
        let snp = partial_sum_grid(&self.p, m, n)?;
        let sg = self.sigma_g()?.sample(m)?;
        let stride = m / points;
        let mut worst = 0.0f64;
        for i in (0..m).step_by(stride.max(1)) {
            let a = snp.samples()[i].norm();
            let b = sg.samples()[i].norm() / std::f64::consts::PI;
            worst = worst.max((a - b).abs() / b.max(1e-300));
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CtBoundRow {
    pub arc: u64,
    pub x: f64,
    pub s_n_p: f64,
    pub threshold: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CtBoundReport {
    pub k: u64,
    pub n: u64,
    pub beta: f64,
    pub delta: f64,
    pub grid: usize,
    /// `min log|S_nP(x)| / log log n` over the sampled arc points.
    pub min_ratio: f64,
    pub target: f64,
    pub flag: bool,
    pub rows: Vec<CtBoundRow>,
}

/// Checks `log|S_nP(x)| ≥ (1−δ)β log log n` on a grid with at least
/// `per_arc` points inside every arc of `I_k^β`.
pub fn verify_ct_bound(spec: &CtBlockSpec, p: &TrigPoly, per_arc: usize) -> Result<CtBoundReport> {
    let n = spec.n;
    let per_arc = per_arc.max(16);
    let fine = (per_arc as f64 / spec.epsilon).ceil() as usize;
    let m = fine.max(2 * p.width()).next_power_of_two();
    let snp = partial_sum_grid(p, m, n)?;
    let lln = (n as f64).ln().ln();
    let target = (1.0 - spec.delta) * spec.beta;
    let threshold = (target * lln).exp();
    let k = spec.k;
    let rows: Vec<CtBoundRow> = (0..k)
        .into_par_iter()
        .flat_map_iter(|arc| {
            let c = arc as f64 / k as f64;
            let lo = ((c - spec.epsilon / 2.0) * m as f64).ceil() as i64;
            let hi = ((c + spec.epsilon / 2.0) * m as f64).floor() as i64;
            let snp = &snp;
            (lo..=hi).map(move |i| {
                let s = snp.samples()[i.rem_euclid(m as i64) as usize].norm();
                CtBoundRow { arc, x: (i as f64 / m as f64).rem_euclid(1.0), s_n_p: s, threshold, holds: s.ln() >= target * lln }
            })
        })
        .collect();
    let min_ratio = rows.iter().map(|r| r.s_n_p.ln() / lln).fold(f64::INFINITY, f64::min);
    Ok(CtBoundReport {
        k,
        n,
        beta: spec.beta,
        delta: spec.delta,
        grid: m,
        min_ratio,
        target,
        flag: rows.iter().all(|r| r.holds),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaturatingCtConfig {
    pub betas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub weights: Vec<f64>,
    pub jmax: u32,
    pub k_min: u64,
}

/// Placement record for one block `ε_l j^{−2} e_{n_{j,l}} P_{j,l}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacedBlock {
    pub j: u32,
    pub l: u32,
    pub spec: CtBlockSpec,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct SaturatingCt {
    pub poly: TrigPoly,
    pub blocks: Vec<PlacedBlock>,
}

/// Largest `jmax` accepted by [`build_saturating_ct`].
pub const CT_JMAX_CAP: u32 = 6;

/// `Σ_{j ≤ jmax} j^{−2} Σ_{l ≤ j} ε_l e_{n_{j,l}} P_{j,l}`.
///
/// Each `k_{j,l}` is the smallest power of two `≥ max(j, k_min)` whose
/// resolved `n` clears the placement rule `n_{j,l+1} ≥ 3n_{j,l}`,
/// `3n_{j,j} < n_{j+1,1}`.
pub fn build_saturating_ct(cfg: &SaturatingCtConfig) -> Result<SaturatingCt> {
    let jmax = cfg.jmax;
    if jmax == 0 {
        return invalid("jmax must be >= 1");
    }
    if jmax > CT_JMAX_CAP {
        return Err(Error::GenerationTooLarge { requested: jmax, cap: CT_JMAX_CAP });
    }
    let need = jmax as usize;
    if cfg.betas.len() < need || cfg.deltas.len() < need || cfg.weights.len() < need {
        return invalid(format!("need at least {need} betas, deltas and weights"));
    }
    for (i, b) in cfg.betas.iter().enumerate() {
        if cfg.betas[..i].contains(b) {
            return invalid("betas must be pairwise distinct");
        }
    }
    if cfg.weights.iter().any(|w| *w <= 0.0) || cfg.weights.iter().sum::<f64>() > 1.0 + 1e-12 {
        return invalid("weights must be positive with sum <= 1");
    }
    let mut blocks = Vec::new();
    let mut parts: Vec<(i64, TrigPoly, f64)> = Vec::new();
    let mut floor = 0u64;
    for j in 1..=jmax {
        for l in 1..=j {
            let (beta, delta) = (cfg.betas[l as usize - 1], cfg.deltas[l as usize - 1]);
            let mut k = (j as u64).max(cfg.k_min).max(2).next_power_of_two();
            let block = loop {
                let b = build_p(k, beta, delta)?;
                if b.spec.n > floor {
                    break b;
                }
                k *= 2;
                if k > 1 << 20 {
                    return invalid("no admissible k below 2^20");
                }
            };
            let n = block.spec.n;
            // within a generation n_{j,l+1} ≥ 3n_{j,l}; across, 3n_{j,j} < n_{j+1,1}
            floor = if l < j { 3 * n - 1 } else { 3 * n };
            let weight = cfg.weights[l as usize - 1] / (j * j) as f64;
            blocks.push(PlacedBlock { j, l, spec: block.spec, weight });
            parts.push((n as i64, block.p, weight));
        }
    }
    let top = parts.iter().map(|(s, p, _)| s + p.kmax()).max().unwrap();
    let mut coeffs = vec![Complex64::default(); (top + 1) as usize];
    for (shift, p, w) in &parts {
        for (i, c) in p.coeffs().iter().enumerate() {
            coeffs[(shift + p.kmin() + i as i64) as usize] += c * w;
        }
    }
    let poly = TrigPoly::new(0, coeffs, format!("g_ct(jmax={jmax})"))?;
    Ok(SaturatingCt { poly, blocks })
}
