use super::ballistic_current;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SmallTilt,
    LargeTilt,
}

/// Closed-form current and, where available, site populations.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticReference {
    pub current: f64,
    pub populations: Option<Vec<f64>>,
}

/// Leading-order closed forms for `N = 4` and `N = 5` at unit hopping.
///
/// Large-tilt populations are returned for `N = 4` at any `f` and for `N = 5`
/// only at `f = 1`.
pub fn analytic_reference(n: usize, regime: Regime, e: f64, gamma: f64, f: f64) -> Result<AnalyticReference> {
    let g2 = 16.0 + gamma * gamma;
    let out = match (n, regime) {
        (4, Regime::SmallTilt) => AnalyticReference {
            current: ballistic_current(gamma, f) - 0.5 * e * e * gamma * f * (160.0 + gamma * gamma) / (g2 * g2),
            populations: None,
        },
        (5, Regime::SmallTilt) => AnalyticReference {
            current: ballistic_current(gamma, f) - 2.0 * e * e * gamma * f * (80.0 + gamma * gamma) / (g2 * g2),
            populations: None,
        },
        (4, Regime::LargeTilt) => {
            let a1 = f * (1.0 - e.powi(-4));
            let a2 = f * (1.0 - 2.5 * e.powi(-2));
            let pops = [a1, a2, -a2, -a1].iter().map(|a| 0.5 * (a + 1.0)).collect();
            AnalyticReference { current: gamma * f * e.powi(-4) / 8.0, populations: Some(pops) }
        }
        (5, Regime::LargeTilt) => {
            let (e2, e4) = (e.powi(-2), e.powi(-4));
            let pops = (f == 1.0).then(|| vec![1.0 - e4 / 8.0, 1.0 - e2 / 2.0, 0.0, e2 / 2.0, e4 / 8.0]);
            AnalyticReference { current: gamma * f * e4 / 32.0, populations: pops }
        }
        _ => return Err(invalid(format!("closed forms exist for N = 4 and N = 5 only, got {n}"))),
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_values() {
        let r = analytic_reference(4, Regime::LargeTilt, 10.0, 1.0, 1.0).unwrap();
        assert!((r.current - 1.25e-5).abs() < 1e-18);
        assert!((r.populations.unwrap()[1] - 0.9875).abs() < 1e-15);
        let s = analytic_reference(4, Regime::SmallTilt, 0.1, 1.0, 1.0).unwrap();
        assert!((s.current - 0.114862).abs() < 5e-7);
        let five = analytic_reference(5, Regime::LargeTilt, 10.0, 1.0, 1.0).unwrap();
        assert_eq!(five.populations.unwrap()[2], 0.0);
        assert!(analytic_reference(6, Regime::SmallTilt, 0.1, 1.0, 1.0).is_err());
    }
}
