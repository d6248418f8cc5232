use std::f64::consts::TAU;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dyadic subdivision until `λ·(phase range)` stays below `cycles·2π` on every cell,
/// then Gauss–Legendre on each cell.
#[derive(Clone, Debug)]
pub struct OscillatoryQuadrature {
    rule: Vec<(f64, f64)>,
    pub cycles: f64,
    /// Cells are never wider than this fraction of the interval.
    pub max_fraction: f64,
    pub max_cells: usize,
}

impl Default for OscillatoryQuadrature {
    fn default() -> Self {
        OscillatoryQuadrature::new(20)
    }
}

impl OscillatoryQuadrature {
    pub fn new(order: usize) -> Self {
        let gl = GaussLegendre::new(NonZeroUsize::new(order.max(2)).expect("nonzero"));
        OscillatoryQuadrature {
            rule: gl.as_node_weight_pairs().to_vec(),
            cycles: 1.0,
            max_fraction: 1.0 / 16.0,
            max_cells: 1 << 22,
        }
    }

    pub fn with_cycles(mut self, cycles: f64) -> Self {
        self.cycles = cycles;
        self
    }

    /// Gauss–Legendre on a single cell.
    pub fn cell<F: Fn(f64) -> Complex64>(&self, f: &F, a: f64, b: f64) -> Complex64 {
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in &self.rule {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }

    pub fn try_cell<F: FnMut(f64) -> Result<Complex64>>(&self, mut f: F, a: f64, b: f64) -> Result<Complex64> {
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in &self.rule {
            acc += f(mid + half * x)? * *w;
        }
        Ok(acc * half)
    }

    /// Real integral on `cells` equal pieces.
    pub fn smooth<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, cells: usize) -> f64 {
        let h = (b - a) / cells as f64;
        let mut acc = 0.0;
        for k in 0..cells {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
            for (x, w) in &self.rule {
                acc += f(mid + half * x) * w * half;
            }
        }
        acc
    }

    /// `∫_a^b e^{iλ·phase(s)} amp(s) ds`.
    pub fn integrate<P, A>(&self, phase: &P, amp: &A, lambda: f64, a: f64, b: f64) -> Result<Complex64>
    where
        P: Fn(f64) -> f64,
        A: Fn(f64) -> f64,
    {
        if !(b > a) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let budget = self.cycles * TAU;
        let max_width = (b - a) * self.max_fraction;
        let min_width = (b - a) * 1e-12;
        let f = |s: f64| Complex64::from_polar(amp(s), lambda * phase(s));
        let mut stack = vec![(a, b)];
        let mut cells = 0usize;
        let mut acc = Complex64::new(0.0, 0.0);
        while let Some((lo, hi)) = stack.pop() {
            let w = hi - lo;
            let resolved = w <= max_width && {
                let (mut pmin, mut pmax) = (f64::INFINITY, f64::NEG_INFINITY);
                for k in 0..=4 {
                    let p = phase(lo + w * k as f64 / 4.0);
                    pmin = pmin.min(p);
                    pmax = pmax.max(p);
                }
                lambda * (pmax - pmin) <= budget
            };
            if resolved || w < min_width {
                cells += 1;
                if cells > self.max_cells {
                    return Err(Error::Quadrature(format!(
                        "more than {} cells at lambda = {lambda}",
                        self.max_cells
                    )));
                }
                acc += self.cell(&f, lo, hi);
            } else {
                let mid = (lo + hi) / 2.0;
                stack.push((mid, hi));
                stack.push((lo, mid));
            }
        }
        Ok(acc)
    }
}
