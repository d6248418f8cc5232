//! Floating-point checks of the decay and boundedness statements behind the exponents:
//! oscillatory-integral decay fits, oscillatory sums, dominance and Knapp-box probes.

mod decay;
mod fit;
mod probes;
mod quadrature;
mod sums;

use std::fmt;

use serde::Serialize;

use crate::poly::{to_f64, UniPoly};

pub use decay::{
    airy_scaling_check, bump, surface_decay_fit, surface_path, van_der_corput_fit, AiryCheck, AiryRegime, Cutoff,
    SurfacePath,
};
pub use fit::{loglog_fit, DecayFit, LambdaGrid, LineFit, Verdict};
pub use probes::{
    critical_value_identity_check, dominance_probe, dominance_sweep, knapp_box_probe, DominanceRegion, DominanceReport,
    KnappBoxReport, MAX_DOMINANCE_RATIO,
};
pub use quadrature::OscillatoryQuadrature;
pub use sums::{
    geometric_sum_check, oscillatory_sum_bound, run_sum_matrix, MAX_GROWTH, MIN_DENOMINATOR, SumBoundOutcome, SumBoundTrial, SumKind,
    SumMatrixConfig, SumMatrixReport, TensorBump,
};

/// Dense real polynomial, coefficients in ascending order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealPoly {
    pub coeffs: Vec<f64>,
}

impl RealPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        RealPoly { coeffs }
    }

    pub fn monomial(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        RealPoly { coeffs: c }
    }

    pub fn from_unipoly(p: &UniPoly) -> Self {
        RealPoly::new(p.coeffs().iter().map(to_f64).collect())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        RealPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }
}

impl fmt::Display for RealPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0.0 {
                continue;
            }
            let sign = if *c < 0.0 { "-" } else { "+" };
            if first {
                if *c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (k, a == 1.0) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "s")?,
                (1, false) => write!(f, "{a}*s")?,
                (_, true) => write!(f, "s^{k}")?,
                (_, false) => write!(f, "{a}*s^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
