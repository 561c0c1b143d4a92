//! Post-processing of sweep series: resonance detection, exponential fits and current normalisation.

use serde::Serialize;
use tiltdiode::noninteracting::ballistic_current;

use crate::error::{CliError, Result};

/// Minimum ratio between a resonance peak and the lower of its neighbouring minima.
pub const DEFAULT_PROMINENCE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonance {
    pub index: usize,
    pub x: f64,
    pub value: f64,
    /// Peak over the lower neighbouring minimum; infinite when that minimum is not positive.
    pub prominence: f64,
}

/// Interior local maxima; a flat top is reported at its left end.
pub fn local_maxima(y: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        if y[i] <= y[i - 1] {
            continue;
        }
        let mut j = i;
        while j + 1 < y.len() && y[j + 1] == y[i] {
            j += 1;
        }
        if j + 1 < y.len() && y[j + 1] < y[i] {
            out.push(i);
        }
    }
    out
}

/// Local maxima of `y` whose height over the lower neighbouring local minimum
/// (grid endpoints count as minima) is at least `prominence`.
pub fn find_resonances(x: &[f64], y: &[f64], prominence: f64) -> Vec<Resonance> {
    assert_eq!(x.len(), y.len());
    let descend = |mut k: usize, step: isize| -> f64 {
        loop {
            let next = k as isize + step;
            if next < 0 || next as usize >= y.len() || y[next as usize] > y[k] {
                return y[k];
            }
            k = next as usize;
        }
    };
    local_maxima(y)
        .into_iter()
        .filter_map(|i| {
            let floor = descend(i, -1).min(descend(i, 1));
            let ratio = if floor > 0.0 { y[i] / floor } else { f64::INFINITY };
            (ratio >= prominence).then_some(Resonance { index: i, x: x[i], value: y[i], prominence: ratio })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpFit {
    /// Slope of `ln J` against `x`.
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub intercept_stderr: f64,
    pub points: usize,
}

/// Least squares of `ln J` on `x`.
pub fn fit_exponential(series: &[(f64, f64)]) -> Result<ExpFit> {
    let n = series.len();
    if n < 3 {
        return Err(CliError::Fit(format!("need at least 3 points, got {n}")));
    }
    if let Some(&(x, j)) = series.iter().find(|p| !(p.1 > 0.0) || !p.1.is_finite()) {
        return Err(CliError::Fit(format!("non-positive current {j} at x = {x}")));
    }
    let nf = n as f64;
    let mx = series.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = series.iter().map(|p| p.1.ln()).sum::<f64>() / nf;
    let sxx: f64 = series.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(CliError::Fit("all x values coincide".into()));
    }
    let sxy: f64 = series.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = series.iter().map(|p| (p.1.ln() - intercept - slope * p.0).powi(2)).sum();
    let s2 = ssr / (nf - 2.0);
    let sum_x2: f64 = series.iter().map(|p| p.0 * p.0).sum();
    Ok(ExpFit {
        slope,
        intercept,
        stderr: (s2 / sxx).sqrt(),
        intercept_stderr: (s2 * sum_x2 / (nf * sxx)).sqrt(),
        points: n,
    })
}

/// `J / 𝒥₀` with `𝒥₀ = 2Γf / (Γ² + 16)`.
pub fn normalize_current(current: f64, coupling: f64, driving: f64) -> Result<f64> {
    if driving == 0.0 {
        return Err(CliError::Config("normalisation needs nonzero driving".into()));
    }
    if !(coupling > 0.0) {
        return Err(CliError::Config(format!("coupling must be positive, got {coupling}")));
    }
    Ok(current / ballistic_current(coupling, driving))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resonances_need_prominence() {
        let x: Vec<f64> = (0..9).map(|i| i as f64).collect();
        let y = [1.0, 0.1, 5.0, 0.1, 0.09, 0.1, 0.095, 0.02, 0.3];
        let r = find_resonances(&x, &y, 10.0);
        assert_eq!(r.iter().map(|r| r.index).collect::<Vec<_>>(), vec![2]);
        assert!((r[0].prominence - 5.0 / 0.09).abs() < 1e-12);
        assert_eq!(local_maxima(&y), vec![2, 5]);
    }

    #[test]
    fn plateaus_count_once() {
        assert_eq!(local_maxima(&[0.0, 1.0, 1.0, 0.0]), vec![1]);
        assert!(local_maxima(&[1.0, 1.0, 1.0]).is_empty());
        assert!(local_maxima(&[0.0, 1.0, 1.0, 2.0]).is_empty());
    }

    #[test]
    fn exact_exponential() {
        let s: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, (-2.0 * i as f64).exp())).collect();
        let f = fit_exponential(&s).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!(f.intercept.abs() < 1e-12);
        assert!(f.stderr < 1e-12);
        let flat = fit_exponential(&[(1.0, 3.0), (2.0, 3.0), (5.0, 3.0)]).unwrap();
        assert_eq!(flat.slope, 0.0);
    }

    #[test]
    fn fit_rejects_bad_series() {
        assert!(fit_exponential(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        let err = fit_exponential(&[(1.0, 1.0), (2.5, 0.0), (3.0, 1.0)]).unwrap_err();
        assert!(err.to_string().contains("x = 2.5"));
    }

    #[test]
    fn normalisation() {
        assert!((normalize_current(2.0 / 17.0, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(normalize_current(0.0, 1.0, 1.0).unwrap(), 0.0);
        assert!((normalize_current(0.25, 4.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(normalize_current(0.1, 1.0, 0.0).is_err());
    }
}
