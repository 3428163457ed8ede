use anyhow::{bail, Context, Result};

use tensor_spectra::params::{ThetaWeights, Weighting};

/// Parses a decimal or a fraction `a/b`.
pub fn number(s: &str) -> Result<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().with_context(|| format!("bad numerator in {s:?}"))?;
            let d: f64 = d.trim().parse().with_context(|| format!("bad denominator in {s:?}"))?;
            if d == 0.0 {
                bail!("zero denominator in {s:?}");
            }
            n / d
        }
        None => s.parse().with_context(|| format!("not a number: {s:?}"))?,
    };
    if !v.is_finite() {
        bail!("not a finite number: {s:?}");
    }
    Ok(v)
}

pub fn triple(s: &str) -> Result<[f64; 3]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        bail!("expected three comma-separated values, got {s:?}");
    }
    Ok([number(parts[0])?, number(parts[1])?, number(parts[2])?])
}

pub fn weighting(s: &str) -> Result<Weighting> {
    Ok(Weighting::new(triple(s)?)?)
}

pub fn theta(s: &str) -> Result<ThetaWeights> {
    Ok(ThetaWeights::new(triple(s)?)?)
}

pub fn usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',').map(|v| v.trim().parse::<usize>().with_context(|| format!("not a count: {v:?}"))).collect()
}
