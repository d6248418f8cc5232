use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::fit::{DecayFit, LambdaGrid, Verdict};
use super::quadrature::OscillatoryQuadrature;
use super::RealPoly;
use crate::adaptedness::{height, linear_height};
use crate::error::{Error, Result};
use crate::poly::{to_f64, LinearMap, PuiseuxPoly};
use crate::varchenko::adapted_coordinates;

/// `exp(1 − 1/(1 − s²))` on `|s| < 1`, zero outside; equals 1 at the origin.
pub fn bump(s: f64) -> f64 {
    let q = 1.0 - s * s;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

/// Tensor cutoff `η(x) = bump(x1/r)·bump(x2/r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cutoff {
    pub radius: f64,
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff { radius: 0.5 }
    }
}

impl Cutoff {
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        bump(x1 / self.radius) * bump(x2 / self.radius)
    }
}

/// `|I|` on the grid with the default and a twice finer subdivision tolerance.
fn magnitudes<F>(grid: &[f64], eval: F) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(f64, &OscillatoryQuadrature) -> Result<Complex64> + Sync,
{
    let coarse = OscillatoryQuadrature::default();
    let fine = OscillatoryQuadrature::default().with_cycles(0.5);
    let pairs: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&l| Ok((eval(l, &coarse)?.norm(), eval(l, &fine)?.norm())))
        .collect::<Result<_>>()?;
    Ok(pairs.into_iter().unzip())
}

fn drift(coarse: &[f64], fine: &[f64], floor: f64) -> f64 {
    coarse
        .iter()
        .zip(fine)
        .filter(|(c, _)| **c > floor)
        .map(|(c, f)| (c - f).abs() / c)
        .fold(0.0, f64::max)
}

/// Decay of `∫_I e^{iλf} g` against the `λ^{−1/M}` rate.
pub fn van_der_corput_fit(
    m: u32,
    f: &RealPoly,
    g: &(dyn Fn(f64) -> f64 + Sync),
    interval: (f64, f64),
    grid: &LambdaGrid,
) -> Result<DecayFit> {
    let (a, b) = interval;
    if m == 0 || !(b > a) {
        return Err(Error::Precondition("need M >= 1 and a nonempty interval".into()));
    }
    if grid.decades() < 3.0 - 1e-9 {
        return Err(Error::Precondition(format!("lambda grid spans {:.2} decades", grid.decades())));
    }
    let dm = f.nth_derivative(m);
    let samples = 1024;
    for k in 0..=samples {
        let s = a + (b - a) * k as f64 / samples as f64;
        if dm.eval(s).abs() < 1.0 - 1e-12 {
            return Err(Error::Precondition(format!("|f^({m})({s})| < 1")));
        }
    }
    let lambdas = grid.values()?;
    let phase = |s: f64| f.eval(s);
    let (coarse, fine) = magnitudes(&lambdas, |l, q| q.integrate(&phase, &|s| g(s), l, a, b))?;
    let d = drift(&coarse, &fine, 0.0);
    Ok(DecayFit::upper_half(
        format!("vdc M={m}: f(s) = {f} on [{a}, {b}]"),
        lambdas,
        coarse,
        1.0 / m as f64,
        0.05,
        d,
    ))
}

/// How a surface integral is reduced before quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfacePath {
    /// Adapted coordinates make the phase a function of `y2` alone.
    OneDimensional,
    /// `φ = p(x1) + q(x2)`, so the integral factors.
    Separable,
    /// Nested 2-D quadrature.
    Nested,
}

/// Cubic interpolation table on a uniform grid.
struct Table {
    lo: f64,
    h: f64,
    v: Vec<f64>,
}

impl Table {
    fn eval(&self, z: f64) -> f64 {
        let x = (z - self.lo) / self.h;
        let n = self.v.len();
        if !(x >= 0.0) || x > (n - 1) as f64 {
            return 0.0;
        }
        let i = (x.floor() as usize).min(n - 2);
        let t = x - i as f64;
        let at = |k: isize| {
            let j = i as isize + k;
            if j < 0 || j as usize >= n {
                0.0
            } else {
                self.v[j as usize]
            }
        };
        let (p0, p1, p2, p3) = (at(-1), at(0), at(1), at(2));
        // four-point Lagrange on nodes −1, 0, 1, 2
        let (a, b, c, d) = (t + 1.0, t, t - 1.0, t - 2.0);
        -b * c * d / 6.0 * p0 + a * c * d / 2.0 * p1 - a * b * d / 2.0 * p2 + a * b * c / 6.0 * p3
    }
}

enum Plan {
    OneD { phase: RealPoly, table: Table, hi: f64 },
    Separable { p1: RealPoly, p2: RealPoly, constant: f64, radius: f64 },
    Nested { phi: PuiseuxPoly, cutoff: Cutoff },
}

const TABLE_POINTS: usize = 1 << 15;
const NESTED_BUDGET: usize = 1 << 26;

fn lin_f64(t: &LinearMap) -> [f64; 4] {
    [to_f64(&t.a), to_f64(&t.b), to_f64(&t.c), to_f64(&t.d)]
}

fn separable_parts(phi: &PuiseuxPoly) -> Option<(RealPoly, RealPoly, f64)> {
    if !phi.is_polynomial() {
        return None;
    }
    let (mut c1, mut c2, mut c0) = (Vec::new(), Vec::new(), 0.0);
    for (e, c) in phi.terms() {
        let k1 = e.e1.to_integer().try_into().ok()?;
        let k2 = e.e2 as usize;
        let v = to_f64(c);
        match (k1, k2) {
            (0usize, 0) => c0 += v,
            (k, 0) => {
                c1.resize(c1.len().max(k + 1), 0.0);
                c1[k] += v;
            }
            (0, k) => {
                c2.resize(c2.len().max(k + 1), 0.0);
                c2[k] += v;
            }
            _ => return None,
        }
    }
    Some((RealPoly::new(c1), RealPoly::new(c2), c0))
}

/// `G(z2) = |det T| ∫ η(T(z1, z2 + ψ(z1))) dz1`, so that the surface integral becomes `∫ e^{iλ q(z2)} G(z2) dz2`.
fn one_dimensional_plan(phi: &PuiseuxPoly, cutoff: Cutoff) -> Result<Option<Plan>> {
    let lh = linear_height(phi)?;
    let (t, psi, phi_a) = if lh.adapted_linear_exists {
        (lh.transform.clone(), PuiseuxPoly::zero(), lh.phi_linear.clone())
    } else {
        let ac = adapted_coordinates(&lh.phi_linear)?;
        (lh.transform.clone(), ac.psi.to_poly(), ac.phi_a)
    };
    if phi_a.terms().any(|(e, _)| !e.e1.numer().eq(&0.into())) || !psi.is_polynomial() {
        return Ok(None);
    }
    let mut q = Vec::new();
    for (e, c) in phi_a.terms() {
        let k = e.e2 as usize;
        q.resize(q.len().max(k + 1), 0.0);
        q[k] += to_f64(c);
    }
    let [a, b, c, d] = lin_f64(&t);
    let inv = t
        .inverse()
        .ok_or_else(|| Error::Internal("singular normalizing map".into()))?;
    let [ia, ib, ic, id] = lin_f64(&inv);
    let psi_at = |z1: f64| psi.evaluate_f64(z1, 0.0).expect("polynomial jet");
    let r = cutoff.radius;
    let n = 200;
    let (mut z1lo, mut z1hi, mut z2lo, mut z2hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=n {
        for j in 0..=n {
            let x1 = -r + 2.0 * r * i as f64 / n as f64;
            let x2 = -r + 2.0 * r * j as f64 / n as f64;
            let z1 = ia * x1 + ib * x2;
            let z2 = ic * x1 + id * x2 - psi_at(z1);
            z1lo = z1lo.min(z1);
            z1hi = z1hi.max(z1);
            z2lo = z2lo.min(z2);
            z2hi = z2hi.max(z2);
        }
    }
    let pad = |lo: f64, hi: f64| (lo - 0.02 * (hi - lo), hi + 0.02 * (hi - lo));
    let (z1lo, z1hi) = pad(z1lo, z1hi);
    let (z2lo, z2hi) = pad(z2lo, z2hi);
    let jac = (a * d - b * c).abs();
    let quad = OscillatoryQuadrature::new(16);
    let h = (z2hi - z2lo) / (TABLE_POINTS - 1) as f64;
    let v: Vec<f64> = (0..TABLE_POINTS)
        .into_par_iter()
        .map(|k| {
            let z2 = z2lo + h * k as f64;
            let inner = |z1: f64| {
                let w = z2 + psi_at(z1);
                cutoff.eval(a * z1 + b * w, c * z1 + d * w)
            };
            jac * quad.smooth(&inner, z1lo, z1hi, 48)
        })
        .collect();
    Ok(Some(Plan::OneD { phase: RealPoly::new(q), table: Table { lo: z2lo, h, v }, hi: z2hi }))
}

fn plan_for(phi: &PuiseuxPoly, direction: [f64; 3], cutoff: Cutoff) -> Result<Plan> {
    if let Some((p1, p2, constant)) = separable_parts(phi) {
        return Ok(Plan::Separable { p1, p2, constant, radius: cutoff.radius });
    }
    if direction[0] == 0.0 && direction[1] == 0.0 {
        if let Some(p) = one_dimensional_plan(phi, cutoff)? {
            return Ok(p);
        }
    }
    Ok(Plan::Nested { phi: phi.clone(), cutoff })
}

/// Reduction chosen by [`surface_decay_fit`].
pub fn surface_path(phi: &PuiseuxPoly, direction: [f64; 3]) -> Result<SurfacePath> {
    Ok(match plan_for(phi, direction, Cutoff::default())? {
        Plan::OneD { .. } => SurfacePath::OneDimensional,
        Plan::Separable { .. } => SurfacePath::Separable,
        Plan::Nested { .. } => SurfacePath::Nested,
    })
}

fn evaluate(plan: &Plan, xi: [f64; 3], lambda: f64, q: &OscillatoryQuadrature) -> Result<Complex64> {
    match plan {
        Plan::OneD { phase, table, hi } => {
            let s = xi[2];
            q.integrate(&|z| s * phase.eval(z), &|z| table.eval(z), lambda, table.lo, *hi)
        }
        Plan::Separable { p1, p2, constant, radius } => {
            let r = *radius;
            let amp = |x: f64| bump(x / r);
            let i1 = q.integrate(&|x| xi[2] * p1.eval(x) + xi[0] * x, &amp, lambda, -r, r)?;
            let i2 = q.integrate(&|x| xi[2] * p2.eval(x) + xi[1] * x, &amp, lambda, -r, r)?;
            Ok(Complex64::from_polar(1.0, lambda * xi[2] * constant) * i1 * i2)
        }
        Plan::Nested { phi, cutoff } => nested(phi, *cutoff, xi, lambda, q),
    }
}

fn nested(phi: &PuiseuxPoly, cutoff: Cutoff, xi: [f64; 3], lambda: f64, q: &OscillatoryQuadrature) -> Result<Complex64> {
    let r = cutoff.radius;
    let big = |x1: f64, x2: f64| xi[0] * x1 + xi[1] * x2 + xi[2] * phi.evaluate_f64(x1, x2).unwrap_or(f64::NAN);
    let mut inner_q = q.clone();
    inner_q.max_cells = NESTED_BUDGET / 64;
    let inner = |x1: f64| -> Result<Complex64> {
        inner_q.integrate(&|x2| big(x1, x2), &|x2| cutoff.eval(x1, x2), lambda, -r, r)
    };
    // Outer cells: the phase may vary by at most one cycle along x1 on each sampled x2 line.
    let lines: Vec<f64> = (0..=8).map(|k| -r + 2.0 * r * k as f64 / 8.0).collect();
    let budget = q.cycles * std::f64::consts::TAU;
    let mut stack = vec![(-r, r)];
    let mut cells = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        let w = hi - lo;
        let ok = w <= 2.0 * r / 16.0
            && lines.iter().all(|&x2| {
                let vals: Vec<f64> = (0..=4).map(|k| big(lo + w * k as f64 / 4.0, x2)).collect();
                let (mn, mx) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
                lambda * (mx - mn) <= budget
            });
        if ok || w < 1e-12 {
            cells.push((lo, hi));
            if cells.len() * 20 * 64 > NESTED_BUDGET {
                return Err(Error::Quadrature(format!("nested quadrature budget exceeded at lambda = {lambda}")));
            }
        } else {
            let mid = (lo + hi) / 2.0;
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (lo, hi) in cells {
        acc += q.try_cell(inner, lo, hi)?;
    }
    Ok(acc)
}

/// Decay of `∫ e^{iλ ξ·(x, φ(x))} η(x) dx`; along `(0,0,1)` it is compared against `1/h(φ)`.
pub fn surface_decay_fit(phi: &PuiseuxPoly, direction: [f64; 3], cutoff: Cutoff, grid: &LambdaGrid) -> Result<DecayFit> {
    if direction.iter().all(|x| *x == 0.0) {
        return Err(Error::Precondition("zero direction".into()));
    }
    let normal = direction[0] == 0.0 && direction[1] == 0.0;
    let expected = if normal { 1.0 / to_f64(&height(phi)?) } else { f64::NAN };
    let plan = plan_for(phi, direction, cutoff)?;
    let path = match plan {
        Plan::OneD { .. } => "one_dimensional",
        Plan::Separable { .. } => "separable",
        Plan::Nested { .. } => "nested",
    };
    let lambdas = grid.values()?;
    let (coarse, fine) = magnitudes(&lambdas, |l, q| evaluate(&plan, direction, l, q))?;
    let d = drift(&coarse, &fine, 0.0);
    Ok(DecayFit::upper_half(
        format!("surface {phi} along {direction:?} ({path})"),
        lambdas,
        coarse,
        expected,
        0.07,
        d,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AiryRegime {
    /// `λ^{2/3}|u| ≤ 0.2` on the whole grid.
    Degenerate,
    /// `λ^{2/3}|u| ≥ 5` on the whole grid.
    OffCone,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AiryCheck {
    pub u: f64,
    pub b: f64,
    pub regime: AiryRegime,
    /// Range of `λ^{2/3}|u|` over the grid.
    pub scaled_range: (f64, f64),
    pub fit: DecayFit,
    /// Measured `|J|·λ^{1/2}` over the stationary-phase prediction `√(2π/|6 b t0|)`.
    pub prefactor_ratio: Option<f64>,
}

impl AiryCheck {
    pub fn passed(&self) -> bool {
        self.fit.passed()
    }
}

/// `J(λ) = ∫ e^{iλ(b t³ − u t)} a(t) dt` against the three regimes of the cubic phase.
///
/// For `u·b > 0` the amplitude is a bump of radius `t0/2` around the critical point
/// `t0 = √(u/3b)`, so only one stationary point contributes.
pub fn airy_scaling_check(u: f64, b: f64, grid: &LambdaGrid) -> Result<AiryCheck> {
    if b == 0.0 || !u.is_finite() {
        return Err(Error::Precondition("need b != 0 and finite u".into()));
    }
    let lambdas = grid.values()?;
    let scaled: Vec<f64> = lambdas.iter().map(|l| l.powf(2.0 / 3.0) * u.abs()).collect();
    let (vmin, vmax) = (scaled[0], scaled[scaled.len() - 1]);
    let regime = if vmax <= 0.2 {
        AiryRegime::Degenerate
    } else if vmin >= 5.0 {
        AiryRegime::OffCone
    } else {
        AiryRegime::Inconclusive
    };
    let phase = move |t: f64| b * t * t * t - u * t;
    let label = format!("airy {b}*t^3 - {u}*t");
    let (mut fit, prefactor_ratio) = if u * b > 0.0 {
        let t0 = (u / (3.0 * b)).sqrt();
        let (lo, hi) = (0.5 * t0, 1.5 * t0);
        let amp = move |t: f64| bump((t - t0) / (0.5 * t0));
        let (coarse, fine) = magnitudes(&lambdas, |l, q| q.integrate(&phase, &amp, l, lo, hi))?;
        let d = drift(&coarse, &fine, 0.0);
        let fit = DecayFit::upper_half(label, lambdas.clone(), coarse, 0.5, 0.05, d);
        let predicted = (2.0 * PI / (6.0 * b * t0).abs()).sqrt();
        let s = fit.fit_start;
        let logs: Vec<f64> = fit.magnitudes[s..]
            .iter()
            .zip(&lambdas[s..])
            .map(|(m, l)| (m * l.sqrt() / predicted).ln())
            .collect();
        let ratio = (logs.iter().sum::<f64>() / logs.len() as f64).exp();
        (fit, Some(ratio))
    } else {
        let amp = |t: f64| bump(t);
        let (coarse, fine) = magnitudes(&lambdas, |l, q| q.integrate(&phase, &amp, l, -1.0, 1.0))?;
        if u == 0.0 {
            let d = drift(&coarse, &fine, 0.0);
            (DecayFit::upper_half(label, lambdas, coarse, 1.0 / 3.0, 0.04, d), None)
        } else {
            let norm = OscillatoryQuadrature::default().smooth(&amp, -1.0, 1.0, 16);
            let floor = 1e-13 * norm;
            let d = drift(&coarse, &fine, floor);
            (DecayFit::above_floor(label, lambdas, coarse, 2.0, floor, d), None)
        }
    };
    if regime == AiryRegime::Inconclusive {
        fit.verdict = Verdict::Inconclusive;
    }
    Ok(AiryCheck { u, b, regime, scaled_range: (vmin, vmax), fit, prefactor_ratio })
}
