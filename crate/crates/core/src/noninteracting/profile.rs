use super::CoefficientSet;

/// Population profile `⟨n_j⟩` against position `x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub x: Vec<f64>,
    pub populations: Vec<f64>,
}

impl Profile {
    /// Piecewise-linear interpolation, clamped to the end values.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.x.len();
        if x <= self.x[0] {
            return self.populations[0];
        }
        if x >= self.x[n - 1] {
            return self.populations[n - 1];
        }
        let i = self.x.partition_point(|&v| v <= x).max(1);
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        let w = (x - x0) / (x1 - x0);
        self.populations[i - 1] * (1.0 - w) + self.populations[i] * w
    }
}

/// Positions are `j` or, when `rescaled`, `j/N`.
pub fn profile(coeffs: &CoefficientSet, rescaled: bool) -> Profile {
    let n = coeffs.n_sites();
    let scale = if rescaled { 1.0 / n as f64 } else { 1.0 };
    Profile {
        x: (1..=n).map(|j| j as f64 * scale).collect(),
        populations: coeffs.populations(),
    }
}
