use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::fit::{loglog_fit, Verdict};
use super::RealPoly;
use crate::error::{Error, Result};
use crate::exponents::{KnappCertificate, KnappTarget};
use crate::newton::{NewtonPolyhedron, Point};
use crate::poly::{int, to_f64, PuiseuxPoly, Rational};

/// Sampling region around a vertex `(A, B)` of `N(Φ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DominanceRegion {
    /// `2^M y1^{a_next} < |y2| ≤ 2^{−M} y1^{a_prev}` between two compact edges.
    Vertex { a_prev: f64, a_next: f64 },
    /// `|y2| ≤ 2^{−M} y1^a` left of the horizontal ray.
    Horizontal { a: f64 },
}

impl DominanceRegion {
    /// Neighbouring edge exponents of `vertex`, read off the polyhedron.
    pub fn at_vertex(phi: &PuiseuxPoly, vertex: &Point) -> Result<DominanceRegion> {
        let poly = NewtonPolyhedron::of(phi)?;
        let j = poly
            .vertex_index(vertex)
            .ok_or_else(|| Error::Precondition(format!("{vertex} is not a vertex")))?;
        if j == 0 && !poly.edges().is_empty() {
            return Err(Error::Precondition(format!("{vertex} has no compact edge on its left")));
        }
        // A lone vertex `(0, B)` is supported by every line through it; take slope 1.
        let a_prev = if j == 0 { 1.0 } else { to_f64(&poly.edges()[j - 1].a()) };
        match poly.edges().get(j) {
            Some(e) => Ok(DominanceRegion::Vertex { a_prev, a_next: to_f64(&e.a()) }),
            None => {
                if phi.min_e2() != vertex.t2.to_integer().to_u32() {
                    return Err(Error::Precondition(format!("Φ is not divisible by y2^{}", vertex.t2)));
                }
                Ok(DominanceRegion::Horizontal { a: a_prev })
            }
        }
    }
}

/// Terms of `Φ/(c·y1^A y2^B) − 1` as `(coefficient, Δe1, Δe2)`.
fn relative_terms(phi: &PuiseuxPoly, vertex: &Point) -> Result<Vec<(f64, f64, i64)>> {
    let b = vertex
        .t2
        .to_integer()
        .to_i64()
        .filter(|_| vertex.t2.is_integer())
        .ok_or_else(|| Error::Precondition("non-integer vertex".into()))?;
    let c = phi
        .terms()
        .find(|(e, _)| e.e1 == vertex.t1 && e.e2 as i64 == b)
        .map(|(_, c)| c.clone())
        .ok_or_else(|| Error::Precondition(format!("{vertex} is not in the support")))?;
    Ok(phi
        .terms()
        .filter(|(e, _)| !(e.e1 == vertex.t1 && e.e2 as i64 == b))
        .map(|(e, v)| (to_f64(&(v / &c)), to_f64(&(&e.e1 - &vertex.t1)), e.e2 as i64 - b))
        .collect())
}

fn relative_error(terms: &[(f64, f64, i64)], y1: f64, y2: f64) -> f64 {
    let (l1, l2) = (y1.ln(), y2.abs().ln());
    let g: f64 = terms
        .iter()
        .map(|(c, d1, d2)| {
            let s = if y2 < 0.0 && d2 % 2 != 0 { -1.0 } else { 1.0 };
            s * c * (d1 * l1 + *d2 as f64 * l2).exp()
        })
        .sum();
    g.abs()
}

/// `max |Φ/(c·y1^A y2^B) − 1|` over a log grid of the region with `y1 < δ`.
pub fn dominance_probe(phi: &PuiseuxPoly, vertex: &Point, region: &DominanceRegion, m: u32, delta: f64) -> Result<f64> {
    let terms = relative_terms(phi, vertex)?;
    let mf = m as f64;
    let y1_max = match region {
        DominanceRegion::Vertex { a_prev, a_next } => {
            if a_next <= a_prev {
                return Err(Error::Precondition("need a_prev < a_next".into()));
            }
            delta.min((-2.0 * mf / (a_next - a_prev)).exp2())
        }
        DominanceRegion::Horizontal { .. } => delta,
    };
    if !(y1_max > 0.0) {
        return Err(Error::Precondition(format!("empty sample region for M = {m}, delta = {delta}")));
    }
    let mut worst = 0f64;
    for i in 0..40 {
        let y1 = y1_max * (-(i as f64) / 4.0 - 1e-9).exp2();
        let (lhi, llo) = match region {
            DominanceRegion::Vertex { a_prev, a_next } => {
                let hi = -mf + a_prev * y1.log2();
                let lo = mf + a_next * y1.log2();
                if lo >= hi {
                    continue;
                }
                (hi, lo)
            }
            DominanceRegion::Horizontal { a } => {
                let hi = -mf + a * y1.log2();
                (hi, hi - 40.0)
            }
        };
        for j in 0..=32 {
            let l = llo + (lhi - llo) * j as f64 / 32.0;
            let y2 = l.exp2();
            worst = worst.max(relative_error(&terms, y1, y2)).max(relative_error(&terms, y1, -y2));
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominanceReport {
    pub vertex: (String, String),
    pub region: DominanceRegion,
    pub delta: f64,
    pub ms: Vec<u32>,
    pub errors: Vec<f64>,
    /// `error(M+1)/error(M)`.
    pub ratios: Vec<f64>,
    /// `error ≈ C·2^{−γM}`.
    pub gamma: f64,
    pub c: f64,
    pub verdict: Verdict,
}

pub const MAX_DOMINANCE_RATIO: f64 = 0.75;

/// Errors over consecutive `M`; passes when each step shrinks the error by `0.75` or it is identically 0.
pub fn dominance_sweep(phi: &PuiseuxPoly, vertex: &Point, ms: &[u32], delta: f64) -> Result<DominanceReport> {
    let region = DominanceRegion::at_vertex(phi, vertex)?;
    let errors: Vec<f64> = ms
        .iter()
        .map(|m| dominance_probe(phi, vertex, &region, *m, delta))
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = errors
        .windows(2)
        .map(|w| if w[0] == 0.0 { 0.0 } else { w[1] / w[0] })
        .collect();
    let x: Vec<f64> = ms.iter().map(|m| (*m as f64).exp2()).collect();
    // log2 error = log2 C − γ M, i.e. a log-log fit against 2^M.
    let (gamma, c) = loglog_fit(&x, &errors).map_or((f64::NAN, 0.0), |f| (-f.slope, 10f64.powf(f.intercept)));
    let steps_ok = ms.windows(2).all(|w| w[1] == w[0] + 1);
    let verdict = if !steps_ok {
        Verdict::Inconclusive
    } else if errors.iter().all(|e| *e == 0.0) || ratios.iter().all(|r| *r <= MAX_DOMINANCE_RATIO) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(DominanceReport {
        vertex: (vertex.t1.to_string(), vertex.t2.to_string()),
        region,
        delta,
        ms: ms.to_vec(),
        errors,
        ratios,
        gamma,
        c,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KnappBoxReport {
    pub target: String,
    /// Box exponents `(k1, k2)` in sheared coordinates.
    pub weight: (String, String),
    /// `min κ·α` over the support of `φ^f`; 1 for a supporting line.
    pub expected_beta: String,
    pub ks: Vec<u32>,
    pub sups: Vec<f64>,
    pub fitted_beta: f64,
    pub residual: f64,
    /// `log2(sup_k / sup_{k+1})` between consecutive grid points.
    pub local_slopes: Vec<f64>,
    /// Range of `sup|φ^f| / ε^β` over the grid.
    pub ratio_range: (f64, f64),
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// `sup |φ^f|` over `|y1| ≤ ε^{k1}`, `|y2| ≤ ε^{k2}` for `ε = 2^{−k}`, fitted as `C·ε^β`.
///
/// The horizontal target uses the smallest `k1` keeping every support point on
/// or above the line `k1·t1 + t2/B = 1`.
pub fn knapp_box_probe(phi: &PuiseuxPoly, cert: &KnappCertificate, ks: &[u32]) -> Result<KnappBoxReport> {
    let f = cert.shear.to_poly();
    let phi_f = phi.shear(&f)?;
    let (k1, k2) = match cert.target {
        KnappTarget::Horizontal => {
            let b = int(cert.horizontal_level.expect("horizontal level") as i64);
            let mut k1 = Rational::zero();
            for (e, _) in phi_f.terms() {
                let e2 = int(e.e2 as i64);
                if e2 < b && !e.e1.is_zero() {
                    k1 = k1.max((int(1) - &e2 / &b) / &e.e1);
                }
            }
            if k1.is_zero() {
                k1 = b.recip();
            }
            (k1, b.recip())
        }
        _ => (cert.weight.k1.clone(), cert.weight.k2.clone()),
    };
    let levels: Vec<(f64, f64, f64, i32)> = phi_f
        .terms()
        .map(|(e, c)| (to_f64(c), to_f64(&(&k1 * &e.e1 + &k2 * int(e.e2 as i64))), to_f64(&e.e1), e.e2 as i32))
        .collect();
    let expected = phi_f
        .terms()
        .map(|(e, _)| &k1 * &e.e1 + &k2 * int(e.e2 as i64))
        .min()
        .ok_or_else(|| Error::Precondition("zero polynomial".into()))?;
    let beta0 = to_f64(&expected);
    let one_sided = !phi_f.is_polynomial() || !f.is_polynomial();
    let n = 80;
    let sups: Vec<f64> = ks
        .iter()
        .map(|k| {
            let le = -(*k as f64) * std::f64::consts::LN_2;
            let mut sup = 0f64;
            for i in 0..=n {
                let s = if one_sided { i as f64 / n as f64 } else { -1.0 + 2.0 * i as f64 / n as f64 };
                for j in 0..=n {
                    let t = -1.0 + 2.0 * j as f64 / n as f64;
                    let v: f64 = levels
                        .iter()
                        .map(|(c, lev, e1, e2)| {
                            let ps = if *e1 == 0.0 { 1.0 } else if e1.fract() == 0.0 { s.powi(*e1 as i32) } else { s.powf(*e1) };
                            c * (lev * le).exp() * ps * t.powi(*e2)
                        })
                        .sum();
                    sup = sup.max(v.abs());
                }
            }
            sup
        })
        .collect();
    let eps: Vec<f64> = ks.iter().map(|k| (-(*k as f64)).exp2()).collect();
    let fit = loglog_fit(&eps, &sups);
    let (fitted_beta, residual) = fit.map_or((f64::NAN, f64::NAN), |f| (f.slope, f.residual));
    let local_slopes: Vec<f64> = sups.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let ratios: Vec<f64> = sups.iter().zip(&eps).map(|(s, e)| s / e.powf(beta0)).collect();
    let ratio_range = ratios
        .iter()
        .fold((f64::INFINITY, 0f64), |(lo, hi), r| (lo.min(*r), hi.max(*r)));
    let tolerance = 0.05;
    let verdict = if (fitted_beta - beta0).abs() <= tolerance && ratio_range.0 > 0.0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(KnappBoxReport {
        target: cert.target.tag(),
        weight: (k1.to_string(), k2.to_string()),
        expected_beta: expected.to_string(),
        ks: ks.to_vec(),
        sups,
        fitted_beta,
        residual,
        local_slopes,
        ratio_range,
        tolerance,
        verdict,
    })
}

/// `max_ζ |Φ(ζ, −f′(ζ)) − f(ζ)|` for `Φ(ξ, η) = ξη + f(ξ) − ηζ`.
pub fn critical_value_identity_check(f: &RealPoly, zetas: &[f64]) -> f64 {
    let df = f.derivative();
    zetas
        .iter()
        .map(|&z| {
            let (xi, eta) = (z, -df.eval(z));
            (xi * eta + f.eval(xi) - eta * z - f.eval(z)).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::knapp_certificate;
    use crate::varchenko::RootJet;

    fn p(t: &[(i64, u32, u32)]) -> PuiseuxPoly {
        PuiseuxPoly::from_int_terms(t)
    }

    #[test]
    fn pure_power_has_no_error() {
        let phi = p(&[(1, 0, 4)]);
        let r = DominanceRegion::at_vertex(&phi, &Point::int(0, 4)).unwrap();
        assert_eq!(r, DominanceRegion::Horizontal { a: 1.0 });
        assert_eq!(dominance_probe(&phi, &Point::int(0, 4), &r, 6, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn vertex_region_from_polyhedron() {
        let phi = p(&[(1, 0, 4), (1, 3, 3), (1, 15, 0)]);
        let r = DominanceRegion::at_vertex(&phi, &Point::int(3, 3)).unwrap();
        assert_eq!(r, DominanceRegion::Vertex { a_prev: 3.0, a_next: 4.0 });
        assert!(DominanceRegion::at_vertex(&phi, &Point::int(0, 4)).is_err());
        assert!(DominanceRegion::at_vertex(&phi, &Point::int(1, 4)).is_err());
        let h = p(&[(1, 2, 3), (1, 0, 4)]);
        assert_eq!(
            DominanceRegion::at_vertex(&h, &Point::int(2, 3)).unwrap(),
            DominanceRegion::Horizontal { a: 2.0 }
        );
    }

    #[test]
    fn vertex_error_tracks_two_to_minus_m() {
        // y2/y1³ ≤ 2^{-M} is the dominant correction at (3,3).
        let phi = p(&[(1, 0, 4), (1, 3, 3), (1, 15, 0)]);
        let r = dominance_sweep(&phi, &Point::int(3, 3), &[4, 5, 6, 7, 8], 0.1).unwrap();
        for (m, e) in r.ms.iter().zip(&r.errors) {
            let bound = (-(*m as f64)).exp2();
            assert!(*e <= 1.01 * (bound + (-3.0 * *m as f64).exp2()), "{m}: {e}");
        }
        assert!(r.verdict.passed());
        assert!((r.gamma - 1.0).abs() < 0.05);
    }

    #[test]
    fn critical_value_identity() {
        assert_eq!(critical_value_identity_check(&RealPoly::monomial(2), &[0.3]), 0.0);
        let f = RealPoly::new(vec![0.0, -1.0, 0.0, 1.0]);
        assert!(critical_value_identity_check(&f, &[1.1]) < 1e-12);
    }

    #[test]
    fn knapp_box_of_a_pure_square() {
        // φ = (x2 − x1²)², f = x1²: φ^f = y2², principal line κ = (1/4, 1/2): sup = ε exactly.
        let phi = p(&[(1, 0, 1), (-1, 2, 0)]).pow(2);
        let f = RootJet::from_poly(&p(&[(1, 2, 0)])).unwrap();
        let cert = knapp_certificate(&phi, &f, KnappTarget::PrincipalLine).unwrap();
        let ks: Vec<u32> = (4..=16).collect();
        let r = knapp_box_probe(&phi, &cert, &ks).unwrap();
        assert!((r.fitted_beta - 1.0).abs() < 1e-9, "{r:?}");
        assert!((r.ratio_range.0 - 1.0).abs() < 1e-9);
    }
}
