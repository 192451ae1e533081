//! File formats: TrigPoly JSON, SampledFunction CSV, and the fixed
//! 17-significant-digit number format shared by every CSV writer.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::trig::{SampledFunction, TrigPoly};

/// Scientific notation with 17 significant digits; round-trips every `f64`.
pub fn fmt17(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.16e}")
}

pub fn write_poly_json(p: &TrigPoly, path: impl AsRef<Path>) -> Result<()> {
    let mut s = serde_json::to_string(p)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

pub fn read_poly_json(path: impl AsRef<Path>) -> Result<TrigPoly> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// `t,re,im` rows, LF line endings.
pub fn sampled_to_csv(f: &SampledFunction) -> String {
    let mut out = String::from("t,re,im\n");
    for (m, z) in f.samples().iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", fmt17(f.t(m)), fmt17(z.re), fmt17(z.im)));
    }
    out
}

pub fn sampled_from_csv(text: &str, label: &str) -> Result<SampledFunction> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "t,re,im" => {}
        other => return Err(Error::Parse(format!("bad header {other:?}"))),
    }
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected 3 columns", i + 2)));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)));
        samples.push(Complex64::new(num(cols[1])?, num(cols[2])?));
    }
    SampledFunction::new(samples, label)
}
