//! Critical restriction exponent `p_c′`, fractional-shear heights `h^f`,
//! sampling of `sup_f h^f` and Knapp-box certificates.

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::adaptedness::{is_adapted, linear_height, Family, LinearHeightReport, SingularityClass};
use crate::error::{Error, Result};
use crate::newton::{augmented_height, h_l_of_edge, Face, NewtonPolyhedron, RHeight, Weight};
use crate::poly::{int, HalfPlane, PuiseuxPoly, Rational};
use crate::varchenko::{adapted_coordinates, adapted_coordinates_with_budget, AdaptedCoordinates, JetTerm, RootJet, DEFAULT_STEP_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExponentSource {
    /// `p_c′ = 2h + 2` (an adapted linear coordinate system exists).
    #[serde(rename = "2h+2")]
    Adapted2hPlus2,
    /// `p_c′ = 2hʳ + 2`.
    #[serde(rename = "2h_r+2")]
    RHeight2hrPlus2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentReport {
    pub p_c_prime: Rational,
    pub source: ExponentSource,
    /// Newton distance in the input coordinates.
    pub d: Rational,
    pub h: Rational,
    pub h_lin: Rational,
    pub h_r: Option<Rational>,
    /// `2 / p_c′`.
    pub theta: Rational,
    pub m: Option<Rational>,
    pub input_adapted: bool,
    pub linear: LinearHeightReport,
    pub adapted: Option<AdaptedCoordinates>,
    pub r_height: Option<RHeight>,
}

/// `p_c′` through linear height, adapted coordinates and the r-height.
pub fn critical_exponent(phi: &PuiseuxPoly) -> Result<ExponentReport> {
    critical_exponent_with_budget(phi, DEFAULT_STEP_BUDGET)
}

pub fn critical_exponent_with_budget(phi: &PuiseuxPoly, budget: usize) -> Result<ExponentReport> {
    let input = is_adapted(phi)?;
    let linear = linear_height(phi)?;
    if linear.adapted_linear_exists {
        let h = linear.h_lin.clone();
        let p = &h * int(2) + int(2);
        return Ok(ExponentReport {
            theta: int(2) / &p,
            p_c_prime: p,
            source: ExponentSource::Adapted2hPlus2,
            d: input.d,
            h_lin: h.clone(),
            h,
            h_r: None,
            m: None,
            input_adapted: input.adapted,
            linear,
            adapted: None,
            r_height: None,
        });
    }
    let ac = adapted_coordinates_with_budget(&linear.phi_linear, budget)?;
    let m = linear
        .m
        .clone()
        .ok_or_else(|| Error::Internal("non-adapted linear coordinates without m".into()))?;
    let line = ac
        .principal_line
        .clone()
        .ok_or_else(|| Error::Internal("adapted-coordinate run without a principal line".into()))?;
    if line.ratio().as_ref() != Some(&m) {
        return Err(Error::Internal(format!("principal line {line} disagrees with m = {m}")));
    }
    let rh = augmented_height(&NewtonPolyhedron::of(&ac.phi_a)?, &line)?;
    let hr = rh.value.clone();
    if !(&ac.h - int(1) <= hr && hr < ac.h) {
        return Err(Error::Internal(format!("h - 1 <= h_r < h fails: h = {}, h_r = {hr}", ac.h)));
    }
    let p = &hr * int(2) + int(2);
    Ok(ExponentReport {
        theta: int(2) / &p,
        p_c_prime: p,
        source: ExponentSource::RHeight2hrPlus2,
        d: input.d,
        h: ac.h.clone(),
        h_lin: linear.h_lin.clone(),
        h_r: Some(hr),
        m: Some(m),
        input_adapted: input.adapted,
        linear,
        adapted: Some(ac),
        r_height: Some(rh),
    })
}

/// `θ` predicted by the normal form: `(m+1)/(3m+1)` for type A, `(m+1)/(3m+2)` for type D.
pub fn normal_form_theta(class: &SingularityClass) -> Rational {
    let m = int(class.m as i64);
    match class.family {
        Family::A => (&m + int(1)) / (int(3) * &m + int(1)),
        Family::D => (&m + int(1)) / (int(3) * &m + int(2)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HfReport {
    pub value: Rational,
    pub m0: Rational,
    pub line: Weight,
    pub polyhedron: NewtonPolyhedron,
    pub r_height: RHeight,
}

/// `h^f(φ)` from the augmented polyhedron of `φ^f` and the line `L^f` of slope `1/m0`.
pub fn h_f(phi: &PuiseuxPoly, f: &RootJet) -> Result<HfReport> {
    let m0 = f
        .leading_exponent()
        .cloned()
        .ok_or_else(|| Error::Precondition("shear function is zero".into()))?;
    if !m0.is_positive() {
        return Err(Error::Precondition("shear function has a constant term".into()));
    }
    let phif = phi.shear(&f.to_poly())?;
    let poly = NewtonPolyhedron::of(&phif)?;
    let line = poly.supporting_line_with_ratio(&m0)?;
    let rh = augmented_height(&poly, &line)?;
    Ok(HfReport {
        value: rh.value.clone(),
        m0,
        line,
        polyhedron: poly,
        r_height: rh,
    })
}

/// Grid of shear candidates: truncations and perturbations of `ψ`, `ψ` plus one
/// higher term `c·x1^{p/q}`, and monomials `x1^n`.
#[derive(Clone, Debug)]
pub struct CandidateFamily {
    pub coefficients: Vec<Rational>,
    pub max_denominator: u32,
    /// Upper end of the exponent grid; `None` means `deg φ + 2`.
    pub max_exponent: Option<Rational>,
    pub max_monomial: u32,
}

impl Default for CandidateFamily {
    fn default() -> Self {
        CandidateFamily {
            coefficients: vec![int(1), int(-1), int(2), Rational::new((-1).into(), 2.into())],
            max_denominator: 6,
            max_exponent: None,
            max_monomial: 12,
        }
    }
}

fn jet(terms: impl IntoIterator<Item = (Rational, Rational)>) -> RootJet {
    RootJet {
        terms: terms
            .into_iter()
            .map(|(coeff, exponent)| JetTerm {
                coeff,
                exponent,
                half_plane: HalfPlane::Plus,
            })
            .collect(),
    }
}

impl CandidateFamily {
    pub fn candidates(&self, phi: &PuiseuxPoly, psi: &RootJet) -> Vec<RootJet> {
        let mut out: Vec<RootJet> = Vec::new();
        let mut push = |j: RootJet| {
            if !j.is_zero() && !out.contains(&j) {
                out.push(j);
            }
        };
        for k in 1..=psi.terms.len() {
            push(RootJet { terms: psi.terms[..k].to_vec() });
            let mut perturbed = psi.terms[..k].to_vec();
            let last = perturbed.last_mut().unwrap();
            last.coeff = &last.coeff + Rational::new(1.into(), 2.into());
            if !last.coeff.is_zero() {
                push(RootJet { terms: perturbed });
            }
        }
        let top = self
            .max_exponent
            .clone()
            .unwrap_or_else(|| phi.total_degree().unwrap_or_else(Rational::zero) + int(2));
        let floor = psi.terms.last().map_or_else(Rational::zero, |t| t.exponent.clone());
        let mut grid = Vec::new();
        for q in 1..=self.max_denominator {
            let qq = int(q as i64);
            let mut p = 1i64;
            loop {
                let e = int(p) / &qq;
                if e > top {
                    break;
                }
                if e > floor && !grid.contains(&e) {
                    grid.push(e);
                }
                p += 1;
            }
        }
        grid.sort();
        for e in &grid {
            for c in &self.coefficients {
                let mut terms: Vec<(Rational, Rational)> =
                    psi.terms.iter().map(|t| (t.coeff.clone(), t.exponent.clone())).collect();
                terms.push((c.clone(), e.clone()));
                push(jet(terms));
            }
        }
        for n in 1..=self.max_monomial {
            push(jet([(int(1), int(n as i64))]));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupSample {
    pub sup_found: Rational,
    pub sup_witness: RootJet,
    /// `hʳ` on non-adapted input, `d` on adapted input.
    pub bound: Rational,
    pub input_adapted: bool,
    pub samples: Vec<(RootJet, Rational)>,
    /// `h^{x1^n}` for `n = 1..=max_monomial`.
    pub monomial_values: Vec<Rational>,
    /// `h^ψ`, equal to `hʳ` on non-adapted input.
    pub at_psi: Option<Rational>,
}

/// Samples `h^f` over a candidate family for linearly adapted `φ` and checks
/// `h^f ≤ hʳ` (non-adapted) or `h^f ≤ d` (adapted) on every sample.
pub fn h_r_tilde_sample(phi: &PuiseuxPoly, family: &CandidateFamily) -> Result<SupSample> {
    let v = is_adapted(phi)?;
    let (psi, bound) = if v.adapted {
        (RootJet::zero(), v.d.clone())
    } else {
        let ac = adapted_coordinates(phi)?;
        let line = ac
            .principal_line
            .clone()
            .ok_or_else(|| Error::Internal("missing principal line".into()))?;
        let rh = augmented_height(&NewtonPolyhedron::of(&ac.phi_a)?, &line)?;
        (ac.psi, rh.value)
    };
    let mut cands = family.candidates(phi, &psi);
    if v.adapted {
        if let Face::CompactEdge { edge, .. } = &v.face {
            if let Some(r) = edge.weight.ratio().filter(|r| r >= &int(1)) {
                cands.push(jet([(int(1), r)]));
            }
        }
    }
    let values: Vec<Result<Rational>> = cands.par_iter().map(|f| h_f(phi, f).map(|r| r.value)).collect();
    let mut samples = Vec::with_capacity(cands.len());
    for (f, val) in cands.into_iter().zip(values) {
        let val = val?;
        if val > bound {
            return Err(Error::Internal(format!("h^f = {val} exceeds the bound {bound} at f = {f}")));
        }
        samples.push((f, val));
    }
    let (sup_witness, sup_found) = samples
        .iter()
        .fold(None::<&(RootJet, Rational)>, |best, s| match best {
            Some(b) if b.1 >= s.1 => Some(b),
            _ => Some(s),
        })
        .cloned()
        .ok_or_else(|| Error::Precondition("empty candidate family".into()))?;
    let monomial_values = (1..=family.max_monomial)
        .map(|n| {
            let f = jet([(int(1), int(n as i64))]);
            samples
                .iter()
                .find(|(g, _)| *g == f)
                .map(|(_, v)| Ok(v.clone()))
                .unwrap_or_else(|| h_f(phi, &f).map(|r| r.value))
        })
        .collect::<Result<Vec<_>>>()?;
    let at_psi = if psi.is_zero() { None } else { Some(h_f(phi, &psi)?.value) };
    Ok(SupSample {
        sup_found,
        sup_witness,
        bound,
        input_adapted: v.adapted,
        samples,
        monomial_values,
        at_psi,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KnappTarget {
    /// Compact edge `γ_l` of `𝒩(φ^f)`, 1-based.
    Edge(usize),
    PrincipalLine,
    Horizontal,
}

impl KnappTarget {
    pub fn tag(&self) -> String {
        match self {
            KnappTarget::Edge(l) => format!("edge_{l}"),
            KnappTarget::PrincipalLine => "principal_line".into(),
            KnappTarget::Horizontal => "horizontal".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnappCertificate {
    pub shear: RootJet,
    pub m0: Rational,
    pub target: KnappTarget,
    /// Box `|y1| ≤ ε^{k1}, |y2| ≤ ε^{k2}` in sheared coordinates
    /// (`k1` is replaced by a free `δ → 0` for the horizontal target).
    pub weight: Weight,
    /// `p′ ≥` this value.
    pub derived_exponent: Rational,
    /// Exponents of the enclosing rectangle `|x1| ≲ ε^{k1}`, `|x2| ≲ ε^{m0·k1}`.
    pub enclosing: Option<(Rational, Rational)>,
    /// `B_n` for the horizontal target.
    pub horizontal_level: Option<u32>,
}

impl KnappCertificate {
    /// `2((1+m0)δ+1)/(δ+1/B_n)` for the δ-family of the horizontal target.
    pub fn delta_family_exponent(&self, delta: &Rational) -> Option<Rational> {
        self.horizontal_level.map(|b| {
            int(2) * ((int(1) + &self.m0) * delta + int(1)) / (delta + Rational::new(1.into(), b.into()))
        })
    }
}

fn box_exponent(w: &Weight, m0: &Rational) -> Rational {
    int(2) * ((int(1) + m0) * &w.k1 + int(1)) / w.norm()
}

/// Knapp certificate `p′ ≥ 2h_l^f + 2` (edge), `2d^f + 2` (principal line) or `2B_n` (horizontal).
pub fn knapp_certificate(phi: &PuiseuxPoly, f: &RootJet, target: KnappTarget) -> Result<KnappCertificate> {
    let hf = h_f(phi, f)?;
    let m0 = hf.m0.clone();
    let poly = &hf.polyhedron;
    let (weight, derived, enclosing, level) = match &target {
        KnappTarget::Edge(l) => {
            let edge = poly
                .edges()
                .get(l.wrapping_sub(1))
                .ok_or_else(|| Error::Precondition(format!("no edge {l}")))?;
            if edge.a() <= m0 {
                return Err(Error::Precondition(format!(
                    "edge {l} has a = {} not above m0 = {m0}",
                    edge.a()
                )));
            }
            let w = edge.weight.clone();
            let derived = box_exponent(&w, &m0);
            if derived != int(2) * h_l_of_edge(&w, &m0) + int(2) {
                return Err(Error::Internal("box exponent disagrees with 2h_l + 2".into()));
            }
            let enc = (w.k1.clone(), &m0 * &w.k1);
            (w, derived, Some(enc), None)
        }
        KnappTarget::PrincipalLine => {
            let w = hf.line.clone();
            let derived = box_exponent(&w, &m0);
            if derived != int(2) * w.distance() + int(2) {
                return Err(Error::Internal("principal-line box exponent disagrees with 2d + 2".into()));
            }
            let enc = (w.k1.clone(), &m0 * &w.k1);
            (w, derived, Some(enc), None)
        }
        KnappTarget::Horizontal => {
            let b = &poly.last().t2;
            let bn = b
                .to_integer()
                .to_u32()
                .filter(|_| b.is_integer())
                .ok_or_else(|| Error::Internal("non-integer horizontal level".into()))?;
            if bn == 0 {
                return Err(Error::Precondition("Newton polyhedron reaches t2 = 0".into()));
            }
            let w = Weight::new(Rational::zero(), Rational::new(1.into(), bn.into()));
            (w, int(2) * b, None, Some(bn))
        }
    };
    Ok(KnappCertificate {
        shear: f.clone(),
        m0,
        target,
        weight,
        derived_exponent: derived,
        enclosing,
        horizontal_level: level,
    })
}

/// Principal line, every compact edge with `a_l > m0`, and the horizontal edge.
pub fn all_knapp_certificates(phi: &PuiseuxPoly, f: &RootJet) -> Result<Vec<KnappCertificate>> {
    let hf = h_f(phi, f)?;
    let mut out = vec![knapp_certificate(phi, f, KnappTarget::PrincipalLine)?];
    for (i, e) in hf.polyhedron.edges().iter().enumerate() {
        if e.a() > hf.m0 {
            out.push(knapp_certificate(phi, f, KnappTarget::Edge(i + 1))?);
        }
    }
    if !hf.polyhedron.last().t2.is_zero() {
        out.push(knapp_certificate(phi, f, KnappTarget::Horizontal)?);
    }
    Ok(out)
}

/// Certificates for a report: `f = ψ` in linearly adapted coordinates, or
/// `f = x1^{m0}` along a supporting line through the principal face when the
/// coordinates are already adapted.
pub fn report_knapp_certificates(report: &ExponentReport) -> Result<Vec<KnappCertificate>> {
    let phi = &report.linear.phi_linear;
    if let Some(ac) = &report.adapted {
        return all_knapp_certificates(phi, &ac.psi);
    }
    let poly = NewtonPolyhedron::of(phi)?;
    let mut ratios = Vec::new();
    match poly.principal_face() {
        Face::CompactEdge { edge, .. } => ratios.extend(edge.weight.ratio()),
        Face::Vertex { index, .. } => {
            if index > 0 {
                ratios.extend(poly.edges()[index - 1].weight.ratio());
            }
            if let Some(e) = poly.edges().get(index) {
                ratios.extend(e.weight.ratio());
            }
        }
        Face::Unbounded { .. } => {}
    }
    ratios.retain(|r| r >= &int(1));
    let mut out = Vec::new();
    for r in ratios {
        out.extend(all_knapp_certificates(phi, &jet([(int(1), r)]))?);
    }
    Ok(out)
}

/// `p_c′` recomputed as the largest Knapp exponent.
pub fn max_knapp_exponent(certs: &[KnappCertificate]) -> Option<Rational> {
    certs.iter().map(|c| c.derived_exponent.clone()).max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn p(t: &[(i64, u32, u32)]) -> PuiseuxPoly {
        PuiseuxPoly::from_int_terms(t)
    }

    fn two_edge() -> PuiseuxPoly {
        let a = p(&[(1, 0, 1), (-1, 2, 0), (-1, 3, 0)]);
        let b = p(&[(1, 0, 1), (-1, 2, 0), (-1, 4, 0)]);
        &a * &b.pow(3)
    }

    fn mono(c: i64, e: Rational) -> RootJet {
        jet([(int(c), e)])
    }

    #[test]
    fn power_of_parabola_exponents() {
        let sq = p(&[(1, 0, 1), (-1, 2, 0)]);
        let r = critical_exponent(&sq.pow(2)).unwrap();
        assert_eq!(r.p_c_prime, rat(14, 3));
        assert_eq!(r.h, int(2));
        let r = critical_exponent(&sq.pow(5)).unwrap();
        assert_eq!(r.p_c_prime, int(10));
        assert_eq!(r.h_r, Some(int(4)));
        assert_eq!(r.theta, rat(1, 5));
    }

    #[test]
    fn two_edge_exponent() {
        let r = critical_exponent(&two_edge()).unwrap();
        assert_eq!(r.d, rat(8, 3));
        assert_eq!(r.h, int(3));
        assert_eq!(r.h_r, Some(rat(11, 4)));
        assert_eq!(r.p_c_prime, rat(15, 2));
    }

    #[test]
    fn adapted_input() {
        let r = critical_exponent(&p(&[(1, 2, 0), (1, 0, 2)])).unwrap();
        assert_eq!(r.source, ExponentSource::Adapted2hPlus2);
        assert_eq!(r.p_c_prime, int(4));
    }

    #[test]
    fn h_f_values() {
        let sq = p(&[(1, 0, 1), (-1, 2, 0)]);
        assert_eq!(h_f(&sq.pow(5), &mono(1, int(2))).unwrap().value, int(4));
        let r = h_f(&sq.pow(5), &mono(1, int(2))).unwrap();
        assert_eq!(r.r_height.d_line, rat(10, 3));
        assert_eq!(h_f(&sq.pow(2), &mono(1, int(1))).unwrap().value, int(1));
        assert_eq!(h_f(&sq.pow(2), &mono(1, int(2))).unwrap().value, rat(4, 3));
        assert!(h_f(&sq.pow(2), &RootJet::zero()).is_err());
    }

    #[test]
    fn sampling_bounds() {
        let sq = p(&[(1, 0, 1), (-1, 2, 0)]);
        let s = h_r_tilde_sample(&sq.pow(5), &CandidateFamily::default()).unwrap();
        assert_eq!(s.sup_found, int(4));
        assert_eq!(s.at_psi, Some(int(4)));
        assert!(s.samples.len() >= 50);
        let adapted = p(&[(1, 4, 0), (1, 0, 2)]);
        let s = h_r_tilde_sample(&adapted, &CandidateFamily::default()).unwrap();
        assert_eq!(s.bound, rat(4, 3));
        assert_eq!(s.sup_found, rat(4, 3));
        let horiz = p(&[(1, 1, 3)]);
        let s = h_r_tilde_sample(&horiz, &CandidateFamily::default()).unwrap();
        assert!(s.monomial_values.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(s.monomial_values[11], rat(37, 13));
    }

    #[test]
    fn knapp_two_edge() {
        let psi = mono(1, int(2));
        let phi = two_edge();
        let c = knapp_certificate(&phi, &psi, KnappTarget::Edge(1)).unwrap();
        assert_eq!(c.derived_exponent, rat(15, 2));
        assert_eq!(c.weight, Weight::new(rat(1, 12), rat(1, 4)));
        assert_eq!(c.enclosing, Some((rat(1, 12), rat(1, 6))));
        let c = knapp_certificate(&phi, &psi, KnappTarget::Edge(2)).unwrap();
        assert_eq!(c.derived_exponent, rat(36, 5));
        let all = all_knapp_certificates(&phi, &psi).unwrap();
        assert_eq!(max_knapp_exponent(&all), Some(rat(15, 2)));
    }

    #[test]
    fn knapp_horizontal() {
        let phi = p(&[(1, 0, 1), (-1, 2, 0)]).pow(5);
        let c = knapp_certificate(&phi, &mono(1, int(2)), KnappTarget::Horizontal).unwrap();
        assert_eq!(c.derived_exponent, int(10));
        let near = c.delta_family_exponent(&rat(1, 1000)).unwrap();
        assert!(near < int(10) && near > rat(99, 10));
        assert!(knapp_certificate(&phi, &mono(1, int(2)), KnappTarget::Edge(1)).is_err());
    }
}
