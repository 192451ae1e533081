//! Trigonometric polynomials on the circle T = R/Z.
//!
//! A [`TrigPoly`] stores the amplitudes of `e_k(t) = exp(2πikt)` over a dense
//! integer window `kmin..=kmax`. Partial sums `S_n`, Fejér sums `σ_n`, grid
//! evaluation and norms all live here; every constructed function in the crate
//! is eventually one of these windows.
//!
//! Grids are always `M` equispaced points `t_m = m / M` with `M` a power of
//! two. On such a grid the trapezoid rule is exact for polynomials whose
//! window fits inside `M` frequencies, so norms and means computed here are
//! spectral quantities rather than approximations.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad;

pub(crate) const TAU: f64 = std::f64::consts::TAU;

/// Phasor resynchronisation period for recurrences `z_{k+1} = z_k · w`.
const RESYNC: usize = 64;

/// `exp(2πit)`, with `t` reduced to `[-1/2, 1/2]` before scaling.
#[inline]
pub fn cis_turns(t: f64) -> Complex64 {
    let r = t - t.round();
    let (s, c) = (TAU * r).sin_cos();
    Complex64::new(c, s)
}

/// `exp(2πi k x)`.
#[inline]
pub fn phase(k: i64, x: f64) -> Complex64 {
    cis_turns((k as f64 * x).fract())
}

pub(crate) fn is_power_of_two(m: usize) -> bool {
    m >= 2 && m.is_power_of_two()
}

pub(crate) fn fft_forward(len: usize) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft_forward(len)
}

pub(crate) fn fft_inverse(len: usize) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft_inverse(len)
}

/// Signed frequency represented by DFT bin `i` of an `m`-point transform,
/// in `(-m/2, m/2]`.
#[inline]
pub fn signed_frequency(i: usize, m: usize) -> i64 {
    if i <= m / 2 {
        i as i64
    } else {
        i as i64 - m as i64
    }
}

#[inline]
fn bin(k: i64, m: usize) -> usize {
    k.rem_euclid(m as i64) as usize
}

/// A trigonometric polynomial `Σ_{k=kmin}^{kmax} c_k e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    kmin: i64,
    coeffs: Vec<Complex64>,
    label: String,
}

impl TrigPoly {
    pub fn new(kmin: i64, coeffs: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if coeffs.is_empty() {
            return invalid("coefficient window must be nonempty");
        }
        if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return invalid(format!("non-finite amplitude at k = {}", kmin + i as i64));
        }
        Ok(Self { kmin, coeffs, label: label.into() })
    }

    pub fn zero() -> Self {
        Self { kmin: 0, coeffs: vec![Complex64::default()], label: "0".into() }
    }

    /// The character `e_k`.
    pub fn monomial(k: i64) -> Self {
        Self { kmin: k, coeffs: vec![Complex64::new(1.0, 0.0)], label: format!("e_{k}") }
    }

    /// Dirichlet kernel `D_n = Σ_{|k|≤n} e_k`.
    pub fn dirichlet(n: u64) -> Self {
        let n = n as i64;
        Self {
            kmin: -n,
            coeffs: vec![Complex64::new(1.0, 0.0); (2 * n + 1) as usize],
            label: format!("D_{n}"),
        }
    }

    /// Fejér kernel `F_n = Σ_{|k|<n} (1 − |k|/n) e_k`.
    pub fn fejer_kernel(n: u64) -> Self {
        assert!(n >= 1, "Fejér kernel needs n >= 1");
        let ni = n as i64;
        let coeffs = (-(ni - 1)..ni)
            .map(|k| Complex64::new(1.0 - k.abs() as f64 / n as f64, 0.0))
            .collect();
        Self { kmin: -(ni - 1), coeffs, label: format!("F_{n}") }
    }

    pub fn kmin(&self) -> i64 {
        self.kmin
    }

    pub fn kmax(&self) -> i64 {
        self.kmin + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Amplitude at frequency `k` (zero outside the window).
    pub fn coeff(&self, k: i64) -> Complex64 {
        if k < self.kmin || k > self.kmax() {
            Complex64::default()
        } else {
            self.coeffs[(k - self.kmin) as usize]
        }
    }

    /// Smallest and largest frequency carrying a nonzero amplitude.
    pub fn spectrum(&self) -> Option<(i64, i64)> {
        let first = self.coeffs.iter().position(|c| *c != Complex64::default())?;
        let last = self.coeffs.iter().rposition(|c| *c != Complex64::default())?;
        Some((self.kmin + first as i64, self.kmin + last as i64))
    }

    /// Number of frequencies in the stored window.
    pub fn width(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest `|k|` in the window.
    pub fn degree(&self) -> u64 {
        self.kmin.unsigned_abs().max(self.kmax().unsigned_abs())
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let w = cis_turns(x);
        let mut z = Complex64::default();
        let mut acc = Complex64::default();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i % RESYNC == 0 {
                z = phase(self.kmin + i as i64, x);
            } else {
                z *= w;
            }
            acc += c * z;
        }
        acc
    }

    pub fn scale(mut self, a: Complex64) -> Self {
        self.coeffs.iter_mut().for_each(|c| *c *= a);
        self
    }

    /// `self + a·other`, on the union of the two windows.
    pub fn add_scaled(&self, other: &TrigPoly, a: Complex64) -> TrigPoly {
        let lo = self.kmin.min(other.kmin);
        let hi = self.kmax().max(other.kmax());
        let mut coeffs = vec![Complex64::default(); (hi - lo + 1) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.kmin - lo) as usize + i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[(other.kmin - lo) as usize + i] += a * c;
        }
        TrigPoly { kmin: lo, coeffs, label: self.label.clone() }
    }

    /// Multiplication by `e_m`: every amplitude moves from `k` to `k + m`.
    pub fn modulate(&self, m: i64) -> TrigPoly {
        TrigPoly { kmin: self.kmin + m, coeffs: self.coeffs.clone(), label: self.label.clone() }
    }

    /// Fejér sum `σ_n P`: amplitudes weighted by `max(0, 1 − |k|/n)`.
    pub fn fejer_sum(&self, n: u64) -> Result<TrigPoly> {
        if n == 0 {
            return invalid("Fejér sum needs n >= 1");
        }
        let lim = n as i64 - 1;
        let lo = self.kmin.max(-lim);
        let hi = self.kmax().min(lim);
        if lo > hi {
            return Ok(TrigPoly::zero().with_label(format!("sigma_{n}({})", self.label)));
        }
        let coeffs = (lo..=hi)
            .map(|k| self.coeff(k) * (1.0 - k.abs() as f64 / n as f64))
            .collect();
        Ok(TrigPoly { kmin: lo, coeffs, label: format!("sigma_{n}({})", self.label) })
    }

    /// Partial sum `S_n P` as a polynomial (window clipped to `[-n, n]`).
    pub fn truncate(&self, n: u64) -> TrigPoly {
        let n = n as i64;
        let lo = self.kmin.max(-n);
        let hi = self.kmax().min(n);
        if lo > hi {
            return TrigPoly::zero();
        }
        let start = (lo - self.kmin) as usize;
        let end = (hi - self.kmin) as usize;
        TrigPoly { kmin: lo, coeffs: self.coeffs[start..=end].to_vec(), label: format!("S_{n}({})", self.label) }
    }

    /// Formal derivative `d/dt`: amplitude at `k` multiplied by `2πik`.
    pub fn derivative(&self) -> TrigPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Complex64::new(0.0, TAU * (self.kmin + i as i64) as f64))
            .collect();
        TrigPoly { kmin: self.kmin, coeffs, label: format!("{}'", self.label) }
    }

    /// Real-part projection: `(P + P̄)/2`, whose amplitude at `k` is
    /// `(c_k + conj(c_{-k}))/2`.
    pub fn real_part(&self) -> TrigPoly {
        self.conj_combine(Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0))
    }

    /// Imaginary-part projection: `(P − P̄)/(2i)`.
    pub fn imag_part(&self) -> TrigPoly {
        self.conj_combine(Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.5))
    }

    // a·P + b·P̄
    fn conj_combine(&self, a: Complex64, b: Complex64) -> TrigPoly {
        let r = self.degree() as i64;
        let coeffs = (-r..=r).map(|k| a * self.coeff(k) + b * self.coeff(-k).conj()).collect();
        TrigPoly { kmin: -r, coeffs, label: self.label.clone() }
    }

    /// Σ|c_k|², the mean square of P on the circle.
    pub fn mean_square(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Samples `P(m/M)` by one inverse FFT. Requires the window to fit in `M`
    /// frequencies.
    pub fn sample(&self, m: usize) -> Result<SampledFunction> {
        if !is_power_of_two(m) {
            return invalid(format!("grid size {m} is not a power of two >= 2"));
        }
        if self.width() > m {
            return Err(Error::Aliasing { grid: m, needed: self.width() });
        }
        let mut buf = vec![Complex64::default(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            buf[bin(self.kmin + i as i64, m)] += c;
        }
        fft_inverse(m).process(&mut buf);
        SampledFunction::new(buf, self.label.clone())
    }

    /// Grid supremum of `|P|` on the smallest aliasing-safe grid refined
    /// `oversample` times.
    pub fn sup_norm(&self, oversample: usize) -> f64 {
        let m = (self.width() * oversample.max(1)).next_power_of_two().max(2);
        self.sample(m).map(|s| s.sup_abs()).unwrap_or(f64::NAN)
    }
}

#[derive(Serialize, Deserialize)]
struct TrigPolyDoc {
    label: String,
    kmin: i64,
    kmax: i64,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for TrigPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TrigPolyDoc {
            label: self.label.clone(),
            kmin: self.kmin,
            kmax: self.kmax(),
            re: self.coeffs.iter().map(|c| c.re).collect(),
            im: self.coeffs.iter().map(|c| c.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = TrigPolyDoc::deserialize(d)?;
        let width = doc.kmax - doc.kmin + 1;
        if width < 1 || doc.re.len() as i64 != width || doc.im.len() as i64 != width {
            return Err(D::Error::custom("re/im lengths must equal kmax - kmin + 1"));
        }
        let coeffs = doc.re.into_iter().zip(doc.im).map(|(r, i)| Complex64::new(r, i)).collect();
        TrigPoly::new(doc.kmin, coeffs, doc.label).map_err(D::Error::custom)
    }
}

/// Equispaced samples `f(m/M)`, `M` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    samples: Vec<Complex64>,
    label: String,
}

impl SampledFunction {
    pub fn new(samples: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if !is_power_of_two(samples.len()) {
            return invalid(format!("sample count {} is not a power of two >= 2", samples.len()));
        }
        Ok(Self { samples, label: label.into() })
    }

    pub fn from_fn(m: usize, label: impl Into<String>, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let samples = (0..m).map(|i| f(i as f64 / m as f64)).collect();
        Self::new(samples, label)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn t(&self, m: usize) -> f64 {
        m as f64 / self.len() as f64
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sup_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> SampledFunction {
        SampledFunction { samples: self.samples.iter().map(|&z| f(z)).collect(), label: self.label.clone() }
    }

    /// All `M` DFT coefficients, bin `i` holding frequency
    /// `signed_frequency(i, M)`.
    pub fn dft(&self) -> Vec<Complex64> {
        let m = self.len();
        let mut buf = self.samples.clone();
        fft_forward(m).process(&mut buf);
        let inv = 1.0 / m as f64;
        buf.iter_mut().for_each(|c| *c *= inv);
        buf
    }

    /// Grid supremum of the spectral derivative `|f'|`, taken on the grid
    /// refined `refine` times by zero padding. The Nyquist bin is dropped.
    pub fn derivative_sup(&self, refine: usize) -> f64 {
        let m = self.len();
        let big = m * refine.max(1);
        let coeffs = self.dft();
        let mut buf = vec![Complex64::default(); big];
        for (i, c) in coeffs.iter().enumerate() {
            if i == m / 2 {
                continue;
            }
            let k = signed_frequency(i, m);
            buf[bin(k, big)] = c * Complex64::new(0.0, TAU * k as f64);
        }
        fft_inverse(big).process(&mut buf);
        buf.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `S_n P(x)` at each checkpoint `n`.
///
/// The sum is grown one frequency pair at a time, so the cost is the size of
/// the window plus the number of checkpoints.
pub fn partial_sum_profile(p: &TrigPoly, x: f64, checkpoints: &[u64]) -> Result<Vec<Complex64>> {
    check_checkpoints(checkpoints)?;
    let (n_start, n_end) = sweep_range(p, *checkpoints.last().unwrap());
    let w = cis_turns(x);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut s = Complex64::default();
    let mut cps = checkpoints.iter().peekable();
    while let Some(&&cp) = cps.peek() {
        if cp >= n_start {
            break;
        }
        out.push(s);
        cps.next();
    }
    let mut z = Complex64::default();
    for (step, n) in (n_start..=n_end).enumerate() {
        if step % RESYNC == 0 {
            z = phase(n as i64, x);
        } else {
            z *= w;
        }
        let ni = n as i64;
        s += p.coeff(ni) * z;
        if n > 0 {
            s += p.coeff(-ni) * z.conj();
        }
        while let Some(&&cp) = cps.peek() {
            if cp != n {
                break;
            }
            out.push(s);
            cps.next();
        }
    }
    out.extend(cps.map(|_| s));
    Ok(out)
}

/// For each point, the running maximum `max_{n' ≤ n} |S_{n'} P(x)|` at every
/// checkpoint `n`.
///
/// Points are processed in fixed-size blocks so the inner loop over points
/// vectorises; blocks run in parallel and are reassembled in input order.
pub fn partial_sum_running_max(p: &TrigPoly, xs: &[f64], checkpoints: &[u64]) -> Result<Vec<Vec<f64>>> {
    check_checkpoints(checkpoints)?;
    Ok(sweep(p, xs, checkpoints, None))
}

/// For each point, `max_{1 ≤ n' ≤ n} |S_{n'} P(x)| / n'^a` at every
/// checkpoint `n`.
pub fn partial_sum_envelope(p: &TrigPoly, xs: &[f64], checkpoints: &[u64], a: f64) -> Result<Vec<Vec<f64>>> {
    check_checkpoints(checkpoints)?;
    if !(a >= 0.0) {
        return invalid("envelope exponent must be >= 0");
    }
    let last = *checkpoints.last().unwrap();
    let (_, n_end) = sweep_range(p, last);
    let weights: Vec<f64> = (0..=n_end).map(|n| if n == 0 { 0.0 } else { (n as f64).powf(-2.0 * a) }).collect();
    Ok(sweep(p, xs, checkpoints, Some(&weights)))
}

// Shared sweep: running maximum of `w(n)|S_n|²`, reported as a square root.
fn sweep(p: &TrigPoly, xs: &[f64], checkpoints: &[u64], weights: Option<&[f64]>) -> Vec<Vec<f64>> {
    const BLOCK: usize = 64;
    let (n_start, n_end) = sweep_range(p, *checkpoints.last().unwrap());
    let one_sided = p.kmin() >= 0;
    let blocks: Vec<Vec<Vec<f64>>> = xs
        .par_chunks(BLOCK)
        .map(|chunk| {
            let len = chunk.len();
            let mut sr = [0.0f64; BLOCK];
            let mut si = [0.0f64; BLOCK];
            let mut zr = [0.0f64; BLOCK];
            let mut zi = [0.0f64; BLOCK];
            let mut wr = [0.0f64; BLOCK];
            let mut wi = [0.0f64; BLOCK];
            let mut mx = [0.0f64; BLOCK];
            for (i, &x) in chunk.iter().enumerate() {
                let w = cis_turns(x);
                wr[i] = w.re;
                wi[i] = w.im;
            }
            let mut out = vec![Vec::with_capacity(checkpoints.len()); len];
            let mut cps = checkpoints.iter().peekable();
            while let Some(&&cp) = cps.peek() {
                if cp >= n_start {
                    break;
                }
                out.iter_mut().for_each(|o| o.push(0.0));
                cps.next();
            }
            for (step, n) in (n_start..=n_end).enumerate() {
                if step % RESYNC == 0 {
                    for i in 0..len {
                        let z = phase(n as i64, chunk[i]);
                        zr[i] = z.re;
                        zi[i] = z.im;
                    }
                }
                let a = p.coeff(n as i64);
                let wn = weights.map_or(1.0, |w| w[n as usize]);
                if one_sided || n == 0 {
                    for i in 0..BLOCK {
                        sr[i] += a.re * zr[i] - a.im * zi[i];
                        si[i] += a.re * zi[i] + a.im * zr[i];
                        mx[i] = mx[i].max(wn * (sr[i] * sr[i] + si[i] * si[i]));
                        let t = zr[i] * wr[i] - zi[i] * wi[i];
                        zi[i] = zr[i] * wi[i] + zi[i] * wr[i];
                        zr[i] = t;
                    }
                } else {
                    let b = p.coeff(-(n as i64));
                    for i in 0..BLOCK {
                        sr[i] += a.re * zr[i] - a.im * zi[i] + b.re * zr[i] + b.im * zi[i];
                        si[i] += a.re * zi[i] + a.im * zr[i] + b.im * zr[i] - b.re * zi[i];
                        mx[i] = mx[i].max(wn * (sr[i] * sr[i] + si[i] * si[i]));
                        let t = zr[i] * wr[i] - zi[i] * wi[i];
                        zi[i] = zr[i] * wi[i] + zi[i] * wr[i];
                        zr[i] = t;
                    }
                }
                while let Some(&&cp) = cps.peek() {
                    if cp != n {
                        break;
                    }
                    for i in 0..len {
                        out[i].push(mx[i].sqrt());
                    }
                    cps.next();
                }
            }
            for _ in cps {
                for i in 0..len {
                    out[i].push(mx[i].sqrt());
                }
            }
            out
        })
        .collect();
    blocks.into_iter().flatten().collect()
}

fn check_checkpoints(checkpoints: &[u64]) -> Result<()> {
    if checkpoints.is_empty() {
        return invalid("checkpoints must be nonempty");
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("checkpoints must be strictly increasing");
    }
    Ok(())
}

// Range of n over which S_n P changes, clipped to the last checkpoint.
fn sweep_range(p: &TrigPoly, last: u64) -> (u64, u64) {
    let start = if p.kmin() <= 0 && p.kmax() >= 0 {
        0
    } else {
        p.kmin().unsigned_abs().min(p.kmax().unsigned_abs())
    };
    let end = p.degree().min(last);
    (start.min(end), end)
}

/// `S_n P` sampled on `M` equispaced points through one inverse FFT of the
/// truncated window.
pub fn partial_sum_grid(p: &TrigPoly, m: usize, n: u64) -> Result<SampledFunction> {
    let truncated = p.truncate(n);
    if !is_power_of_two(m) {
        return invalid(format!("grid size {m} is not a power of two >= 2"));
    }
    if truncated.width() > m {
        return Err(Error::Aliasing { grid: m, needed: truncated.width() });
    }
    truncated.sample(m)
}

/// Fraction of `M` (on each side of Nyquist) treated as the edge band when
/// certifying coefficient decay.
pub const EDGE_BAND_FRACTION: usize = 8;

/// DFT projection of samples onto the window `kmin..=kmax`.
///
/// The largest amplitude in the band `|k| ≥ M/2 − M/8` (excluding any
/// frequency inside the requested window) must not exceed `tail_tol`;
/// otherwise the samples are too coarse and aliasing is not under control.
pub fn coefficients_from_samples(f: &SampledFunction, kmin: i64, kmax: i64, tail_tol: f64) -> Result<TrigPoly> {
    let m = f.len();
    if kmin > kmax || (kmax - kmin) as usize >= m {
        return invalid(format!("window [{kmin}, {kmax}] does not fit in {m} samples"));
    }
    let dft = f.dft();
    let edge = (m / 2 - m / EDGE_BAND_FRACTION) as i64;
    let tail = dft
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let k = signed_frequency(*i, m);
            k.abs() >= edge && !(kmin..=kmax).contains(&k)
        })
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    if tail > tail_tol {
        return Err(Error::TailNotDecayed { tail, tol: tail_tol, grid: m });
    }
    let coeffs = (kmin..=kmax).map(|k| dft[bin(k, m)]).collect();
    TrigPoly::new(kmin, coeffs, f.label().to_string())
}

/// `(mean over M samples of |P|^p)^{1/p}`.
pub fn lp_norm(p: &TrigPoly, exponent: f64, m: usize) -> Result<f64> {
    if !(exponent >= 1.0) || !exponent.is_finite() {
        return invalid(format!("exponent {exponent} must be finite and >= 1"));
    }
    if m < 4 * p.width() {
        return invalid(format!("quadrature size {m} below 4 x window {}", p.width()));
    }
    let s = p.sample(m)?;
    let mean = s.samples().iter().map(|z| z.norm().powf(exponent)).sum::<f64>() / m as f64;
    Ok(mean.powf(1.0 / exponent))
}

/// `lp_norm` refined by doubling `M` until successive values differ by at
/// most `tol`. Returns the value and the final grid size.
pub fn lp_norm_certified(p: &TrigPoly, exponent: f64, tol: f64) -> Result<(f64, usize)> {
    let mut m = (4 * p.width()).next_power_of_two();
    let mut prev = lp_norm(p, exponent, m)?;
    for _ in 0..8 {
        m *= 2;
        let next = lp_norm(p, exponent, m)?;
        if (next - prev).abs() <= tol {
            return Ok((next, m));
        }
        prev = next;
    }
    Ok((prev, m))
}

/// `∫_T |D_n|`, integrated lobe by lobe between the zeros `j/(2n+1)` with a
/// `nodes`-point Gauss–Legendre rule on each lobe.
pub fn dirichlet_l1_norm(n: u64, nodes: usize) -> Result<f64> {
    if n == 0 {
        return invalid("Dirichlet norm needs n >= 1");
    }
    if nodes == 0 {
        return invalid("need at least one node per lobe");
    }
    let (gx, gw) = quad::gauss_legendre(nodes);
    let q = (2 * n + 1) as f64;
    let d = |t: f64| ((q * std::f64::consts::PI * t).sin() / (std::f64::consts::PI * t).sin()).abs();
    // |D_n| is even about 1/2: integrate [0, 1/2] and double.
    let mut total = 0.0;
    for j in 0..=n {
        let a = j as f64 / q;
        let b = ((j + 1) as f64 / q).min(0.5);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        total += h * gx.iter().zip(&gw).map(|(x, w)| w * d(c + h * x)).sum::<f64>();
    }
    Ok(2.0 * total)
}

/// `dirichlet_l1_norm` with the node count doubled until two successive
/// estimates agree within `tol`. Returns the value and node count used.
pub fn dirichlet_l1_norm_certified(n: u64, tol: f64) -> Result<(f64, usize)> {
    let mut nodes = 4;
    let mut prev = dirichlet_l1_norm(n, nodes)?;
    loop {
        let next = dirichlet_l1_norm(n, 2 * nodes)?;
        nodes *= 2;
        if (next - prev).abs() <= tol || nodes >= 256 {
            return Ok((next, nodes));
        }
        prev = next;
    }
}
