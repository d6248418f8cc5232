use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Geometric grid of frequencies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    /// Move each point to the nearest odd multiple of π.
    pub snap_odd_pi: bool,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        LambdaGrid { min: 1e2, max: 1e5, points: 40, snap_odd_pi: false }
    }
}

impl LambdaGrid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        let g = LambdaGrid { min, max, points, snap_odd_pi: false };
        g.values()?;
        Ok(g)
    }

    pub fn snapped(mut self) -> Self {
        self.snap_odd_pi = true;
        self
    }

    pub fn decades(&self) -> f64 {
        (self.max / self.min).log10()
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.min > 0.0 && self.max > self.min && self.points >= 4) {
            return Err(Error::Precondition(format!(
                "lambda grid [{}, {}] with {} points",
                self.min, self.max, self.points
            )));
        }
        let r = (self.max / self.min).ln() / (self.points - 1) as f64;
        let mut v: Vec<f64> = (0..self.points).map(|k| self.min * (r * k as f64).exp()).collect();
        if self.snap_odd_pi {
            for x in &mut v {
                let k = ((*x / PI - 1.0) / 2.0).round().max(0.0);
                *x = (2.0 * k + 1.0) * PI;
            }
        }
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition("lambda grid is not strictly increasing".into()));
        }
        Ok(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS deviation in `log10`.
    pub residual: f64,
    pub points: usize,
}

/// Least-squares line through `(log10 x, log10 y)`; nonpositive `y` are dropped.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(_, y)| **y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    let n = pts.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Some(LineFit { slope, intercept, residual: (ss / nf).sqrt(), points: n })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

pub(crate) const MAX_RESIDUAL: f64 = 0.02;
pub(crate) const MAX_DRIFT: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub phase: String,
    pub lambda_grid: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// `−slope` of `log|I|` against `log λ` on the fit window.
    pub fitted_exponent: f64,
    pub residual: f64,
    pub expected_exponent: f64,
    pub tolerance: f64,
    /// Only `fitted ≥ expected` is required.
    pub lower_bound: bool,
    /// First grid index of the fit window.
    pub fit_start: usize,
    /// Largest relative change of `|I(λ)|` when the subdivision tolerance is halved.
    pub quadrature_drift: f64,
    pub verdict: Verdict,
}

impl DecayFit {
    /// Fit on the upper half of the grid.
    pub(crate) fn upper_half(
        phase: String,
        lambda_grid: Vec<f64>,
        magnitudes: Vec<f64>,
        expected_exponent: f64,
        tolerance: f64,
        quadrature_drift: f64,
    ) -> DecayFit {
        let start = lambda_grid.len() / 2;
        let fit = loglog_fit(&lambda_grid[start..], &magnitudes[start..]);
        let mut out = DecayFit {
            phase,
            lambda_grid,
            magnitudes,
            fitted_exponent: f64::NAN,
            residual: f64::NAN,
            expected_exponent,
            tolerance,
            lower_bound: false,
            fit_start: start,
            quadrature_drift,
            verdict: Verdict::Inconclusive,
        };
        if let Some(f) = fit {
            out.fitted_exponent = -f.slope;
            out.residual = f.residual;
            if expected_exponent.is_finite() {
                let ok = (out.fitted_exponent - expected_exponent).abs() <= tolerance
                    && f.residual < MAX_RESIDUAL
                    && quadrature_drift < MAX_DRIFT;
                out.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
            }
        }
        out
    }

    /// Fit on every point above `floor`, requiring only `fitted ≥ bound`.
    pub(crate) fn above_floor(
        phase: String,
        lambda_grid: Vec<f64>,
        magnitudes: Vec<f64>,
        bound: f64,
        floor: f64,
        quadrature_drift: f64,
    ) -> DecayFit {
        let start = magnitudes.iter().position(|m| *m > floor).unwrap_or(magnitudes.len());
        let end = magnitudes.iter().rposition(|m| *m > floor).map_or(start, |i| i + 1);
        let fit = loglog_fit(&lambda_grid[start..end], &magnitudes[start..end]);
        let mut out = DecayFit {
            phase,
            lambda_grid,
            magnitudes,
            fitted_exponent: f64::NAN,
            residual: f64::NAN,
            expected_exponent: bound,
            tolerance: f64::INFINITY,
            lower_bound: true,
            fit_start: start,
            quadrature_drift,
            verdict: Verdict::Inconclusive,
        };
        if let Some(f) = fit {
            out.fitted_exponent = -f.slope;
            out.residual = f.residual;
            out.verdict = if out.fitted_exponent > bound { Verdict::Pass } else { Verdict::Fail };
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn error(&self) -> f64 {
        self.fitted_exponent - self.expected_exponent
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = LambdaGrid::default().values().unwrap();
        assert_eq!(g.len(), 40);
        assert!((g[0] - 1e2).abs() < 1e-9 && (g[39] - 1e5).abs() < 1e-6);
        let s = LambdaGrid::default().snapped().values().unwrap();
        for x in s {
            let k = x / PI;
            assert!((k - k.round()).abs() < 1e-9 && k.round() as i64 % 2 == 1);
        }
        assert!(LambdaGrid::new(10.0, 1.0, 10).is_err());
    }

    #[test]
    fn exact_power_law() {
        let x: Vec<f64> = (1..20).map(|k| k as f64 * 10.0).collect();
        let y: Vec<f64> = x.iter().map(|x| 3.0 * x.powf(-0.4)).collect();
        let f = loglog_fit(&x, &y).unwrap();
        assert!((f.slope + 0.4).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }
}
