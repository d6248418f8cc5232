use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::fit::Verdict;
use crate::error::{Error, Result};
use crate::poly::{rat, to_f64, Rational};

fn ser_rationals<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|q| q.to_string()))
}

fn ser_rational_rows<S: Serializer>(v: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|row| row.iter().map(|q| q.to_string()).collect::<Vec<_>>()))
}

/// `H(y) = ∏ cos⁴(π(y_k − c_k)/(2w_k))` on `|y_k − c_k| ≤ w_k`; no factors means `H ≡ 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorBump {
    pub centers: Vec<f64>,
    pub widths: Vec<f64>,
}

impl TensorBump {
    pub fn one() -> Self {
        TensorBump { centers: Vec::new(), widths: Vec::new() }
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        TensorBump {
            centers: (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect(),
            widths: (0..n).map(|_| rng.gen_range(0.5..1.5)).collect(),
        }
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        let mut acc = 1.0;
        for ((c, w), y) in self.centers.iter().zip(&self.widths).zip(y) {
            let s = (y - c) / w;
            if s.abs() >= 1.0 {
                return 0.0;
            }
            acc *= (PI * s / 2.0).cos().powi(4);
        }
        acc
    }

    /// `sup|b'|` of one factor: `(π/2)(3√3/4)/w`.
    fn d1(w: f64) -> f64 {
        PI / 2.0 * (3.0 * 3f64.sqrt() / 4.0) / w
    }

    /// `sup|b''|` of one factor: `π²/w²`.
    fn d2(w: f64) -> f64 {
        PI * PI / (w * w)
    }

    pub fn c1_norm(&self) -> f64 {
        self.widths.iter().map(|w| Self::d1(*w)).fold(1.0, f64::max)
    }

    pub fn c2_norm(&self) -> f64 {
        let mut norm = self.c1_norm();
        for (j, wj) in self.widths.iter().enumerate() {
            norm = norm.max(Self::d2(*wj));
            for wk in &self.widths[j + 1..] {
                norm = norm.max(Self::d1(*wj) * Self::d1(*wk));
            }
        }
        norm
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SumKind {
    Single,
    Double,
}

/// One draw of `F(t) = Σ 2^{i(α·m)t} (Hχ_Q)(2^{β^1·m}a_1, …, 2^{β^n·m}a_n)`, `Q = [−1,1]^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumBoundTrial {
    pub kind: SumKind,
    #[serde(serialize_with = "ser_rationals")]
    pub alphas: Vec<Rational>,
    /// `β^k`, one entry per summation index.
    #[serde(serialize_with = "ser_rational_rows")]
    pub betas: Vec<Vec<Rational>>,
    pub a: Vec<f64>,
    /// `M` or `(M1, M2)`.
    pub m: Vec<u64>,
    pub h: TensorBump,
    pub t: Vec<f64>,
    /// `N` in `ρ(t) = ∏_{ν ≤ N} ρ̃(νt)`.
    pub rho_order: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumBoundOutcome {
    /// `max_t |F(t)|·|denominator(t)| / ‖H‖`.
    pub sup_ratio: f64,
    pub worst_t: f64,
    pub terms: u64,
}

fn unit(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

impl SumBoundTrial {
    fn dims(&self) -> usize {
        match self.kind {
            SumKind::Single => 1,
            SumKind::Double => 2,
        }
    }

    fn validate(&self) -> Result<()> {
        let d = self.dims();
        if self.alphas.len() != d || self.m.len() != d || self.betas.iter().any(|b| b.len() != d) {
            return Err(Error::Precondition("index dimensions do not match the sum kind".into()));
        }
        if self.betas.len() != self.a.len() || self.a.iter().any(|a| *a == 0.0 || !a.is_finite()) {
            return Err(Error::Precondition("need one nonzero a_k per beta vector".into()));
        }
        if self.kind == SumKind::Double {
            for b in &self.betas {
                if (&self.alphas[0] * &b[1] - &self.alphas[1] * &b[0]).is_zero() {
                    return Err(Error::Precondition(format!(
                        "alpha_1 beta_2 - alpha_2 beta_1 vanishes for beta = ({}, {})",
                        b[0], b[1]
                    )));
                }
            }
        }
        Ok(())
    }

    /// `|2^{iαt} − 1|` or `|ρ(t)|`.
    pub fn denominator(&self, t: f64) -> f64 {
        let e = |c: f64, t: f64| (unit(c * LN_2 * t) - 1.0).norm();
        match self.kind {
            SumKind::Single => e(to_f64(&self.alphas[0]), t),
            SumKind::Double => {
                let (a1, a2) = (to_f64(&self.alphas[0]), to_f64(&self.alphas[1]));
                let cross: Vec<f64> = self
                    .betas
                    .iter()
                    .map(|b| to_f64(&(&self.alphas[0] * &b[1] - &self.alphas[1] * &b[0])))
                    .collect();
                (1..=self.rho_order.max(1))
                    .map(|nu| {
                        let s = nu as f64 * t;
                        e(a1, s) * e(a2, s) * cross.iter().map(|c| e(*c, s)).product::<f64>()
                    })
                    .product()
            }
        }
    }

    fn norm(&self) -> f64 {
        match self.kind {
            SumKind::Single => self.h.c1_norm(),
            SumKind::Double => self.h.c2_norm(),
        }
    }

    /// Writes `2^{β^k·m} a_k` into `y`; false outside `Q`.
    fn args(&self, m: &[f64], y: &mut [f64]) -> bool {
        for (k, b) in self.betas.iter().enumerate() {
            let e: f64 = b.iter().zip(m).map(|(b, m)| to_f64(b) * m).sum();
            y[k] = e.exp2() * self.a[k];
            if y[k].abs() > 1.0 {
                return false;
            }
        }
        true
    }

    /// Values `H(y(m))` on the part of the index range where `y ∈ Q`, with their indices.
    fn feasible_terms(&self) -> Vec<(Vec<f64>, f64)> {
        let u: Vec<f64> = self.a.iter().map(|a| -a.abs().log2()).collect();
        let betas: Vec<Vec<f64>> = self.betas.iter().map(|b| b.iter().map(to_f64).collect()).collect();
        let mut out = Vec::new();
        let mut y = vec![0.0; self.a.len()];
        // Range of the last index for a fixed prefix, from `β·m ≤ u`.
        let last_range = |prefix_terms: &[f64], last_max: u64| -> Option<(u64, u64)> {
            let (mut lo, mut hi) = (0f64, last_max as f64);
            for (k, b) in betas.iter().enumerate() {
                let fixed: f64 = b.iter().zip(prefix_terms).map(|(b, m)| b * m).sum();
                let rest = u[k] - fixed;
                let c = *b.last().expect("nonempty beta");
                if c > 0.0 {
                    hi = hi.min((rest / c + 1e-9).floor());
                } else if c < 0.0 {
                    lo = lo.max((rest / c - 1e-9).ceil());
                } else if rest < -1e-9 {
                    return None;
                }
            }
            (lo <= hi).then_some((lo as u64, hi as u64))
        };
        let mut push = |m: Vec<f64>, out: &mut Vec<(Vec<f64>, f64)>| {
            if self.args(&m, &mut y) {
                out.push((m, self.h.eval(&y)));
            }
        };
        match self.kind {
            SumKind::Single => {
                if let Some((lo, hi)) = last_range(&[], self.m[0]) {
                    for l in lo..=hi {
                        push(vec![l as f64], &mut out);
                    }
                }
            }
            SumKind::Double => {
                for m1 in 0..=self.m[0] {
                    let p = [m1 as f64];
                    if let Some((lo, hi)) = last_range(&p, self.m[1]) {
                        for m2 in lo..=hi {
                            push(vec![m1 as f64, m2 as f64], &mut out);
                        }
                    }
                }
            }
        }
        out
    }

    fn sum_at(&self, terms: &[(Vec<f64>, f64)], alphas: &[f64], t: f64) -> Complex64 {
        terms
            .iter()
            .map(|(m, h)| {
                let phase: f64 = alphas.iter().zip(m).map(|(a, m)| a * m).sum();
                unit(phase * LN_2 * t) * *h
            })
            .sum()
    }

    /// `F(t)` by direct summation.
    pub fn value(&self, t: f64) -> Complex64 {
        let alphas: Vec<f64> = self.alphas.iter().map(to_f64).collect();
        self.sum_at(&self.feasible_terms(), &alphas, t)
    }
}

pub const MIN_DENOMINATOR: f64 = 0.1;

pub fn oscillatory_sum_bound(trial: &SumBoundTrial) -> Result<SumBoundOutcome> {
    trial.validate()?;
    if let Some(t) = trial.t.iter().find(|t| trial.denominator(**t) < MIN_DENOMINATOR) {
        return Err(Error::Precondition(format!("t = {t} is too close to a zero of the denominator")));
    }
    let alphas: Vec<f64> = trial.alphas.iter().map(to_f64).collect();
    let terms = trial.feasible_terms();
    let norm = trial.norm();
    let mut best = SumBoundOutcome { sup_ratio: 0.0, worst_t: f64::NAN, terms: terms.len() as u64 };
    for &t in &trial.t {
        let r = trial.sum_at(&terms, &alphas, t).norm() * trial.denominator(t) / norm;
        if r > best.sup_ratio || best.worst_t.is_nan() {
            best.sup_ratio = r;
            best.worst_t = t;
        }
    }
    Ok(best)
}

/// `|F(t)(2^{iαt} − 1)|` for `H ≡ 1`, `β = 0`: the geometric series gives at most 2.
pub fn geometric_sum_check(alpha: &Rational, m: u64, t: f64) -> Result<f64> {
    let trial = SumBoundTrial {
        kind: SumKind::Single,
        alphas: vec![alpha.clone()],
        betas: vec![vec![Rational::zero()]],
        a: vec![0.5],
        m: vec![m],
        h: TensorBump::one(),
        t: vec![t],
        rho_order: 1,
    };
    trial.validate()?;
    Ok(trial.value(t).norm() * trial.denominator(t))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumMatrixConfig {
    pub kind: SumKind,
    #[serde(serialize_with = "ser_rationals")]
    pub alphas: Vec<Rational>,
    #[serde(serialize_with = "ser_rational_rows")]
    pub betas: Vec<Vec<Rational>>,
    /// Used as `M` or `M1 = M2`.
    pub m_values: Vec<u64>,
    pub trials: usize,
    pub t_per_trial: usize,
    pub rho_order: usize,
    pub seed: u64,
}

impl SumMatrixConfig {
    /// `α = (−7/6, −7/6)` with the eight β-vectors of the double sum.
    pub fn double_reference() -> Self {
        let b = |p: (i64, i64), q: (i64, i64)| vec![rat(p.0, p.1), rat(q.0, q.1)];
        SumMatrixConfig {
            kind: SumKind::Double,
            alphas: vec![rat(-7, 6), rat(-7, 6)],
            betas: vec![
                b((0, 1), (1, 1)),
                b((1, 1), (0, 1)),
                b((1, 3), (-1, 6)),
                b((-1, 1), (0, 1)),
                b((0, 1), (-1, 3)),
                b((2, 1), (-1, 1)),
                b((-1, 1), (1, 1)),
                b((-1, 1), (0, 1)),
            ],
            m_values: (6..=12).map(|k| 1u64 << k).collect(),
            trials: 200,
            t_per_trial: 8,
            rho_order: 1,
            seed: 0x5eed_0008,
        }
    }

    /// `α = −7/6` with the first components of the same β list.
    pub fn single_reference() -> Self {
        let d = Self::double_reference();
        SumMatrixConfig {
            kind: SumKind::Single,
            alphas: vec![rat(-7, 6)],
            betas: d.betas.iter().map(|b| vec![b[0].clone()]).collect(),
            seed: 0x5eed_0007,
            t_per_trial: 16,
            ..d
        }
    }

    /// Nonpositive β, so every index up to `M` contributes.
    pub fn single_dense() -> Self {
        SumMatrixConfig {
            kind: SumKind::Single,
            alphas: vec![rat(-7, 6)],
            betas: vec![vec![rat(-1, 2)], vec![rat(-1, 1)], vec![rat(0, 1)]],
            m_values: (6..=12).map(|k| 1u64 << k).collect(),
            trials: 200,
            t_per_trial: 64,
            rho_order: 1,
            seed: 0x5eed_0017,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumMatrixReport {
    pub config: SumMatrixConfig,
    /// Sup over trials for each `M`.
    pub sup_ratios: Vec<f64>,
    /// `ratio(M_{j+1}) / ratio(M_j)`.
    pub growth: Vec<f64>,
    pub max_growth: f64,
    pub verdict: Verdict,
}

pub const MAX_GROWTH: f64 = 1.10;

fn draw_trials(c: &SumMatrixConfig) -> Vec<SumBoundTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let n = c.betas.len();
    (0..c.trials)
        .map(|_| {
            let a: Vec<f64> = (0..n)
                .map(|_| {
                    let u: f64 = rng.gen_range(0.0..10.0);
                    let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    s * (-u).exp2()
                })
                .collect();
            let h = TensorBump::random(n, &mut rng);
            let mut trial = SumBoundTrial {
                kind: c.kind,
                alphas: c.alphas.clone(),
                betas: c.betas.clone(),
                a,
                m: vec![0; c.alphas.len()],
                h,
                t: Vec::new(),
                rho_order: c.rho_order,
            };
            while trial.t.len() < c.t_per_trial {
                let t = rng.gen_range(0.05..20.0);
                if trial.denominator(t) >= MIN_DENOMINATOR {
                    trial.t.push(t);
                }
            }
            trial
        })
        .collect()
}

/// Sup ratios over the same random trials for each `M`, and their growth under doubling.
pub fn run_sum_matrix(config: &SumMatrixConfig) -> Result<SumMatrixReport> {
    let trials = draw_trials(config);
    let mut sup_ratios = Vec::with_capacity(config.m_values.len());
    for &m in &config.m_values {
        let outcomes: Vec<SumBoundOutcome> = trials
            .par_iter()
            .map(|t| {
                let mut t = t.clone();
                t.m = vec![m; t.alphas.len()];
                oscillatory_sum_bound(&t)
            })
            .collect::<Result<_>>()?;
        sup_ratios.push(outcomes.iter().map(|o| o.sup_ratio).fold(0.0, f64::max));
    }
    let growth: Vec<f64> = sup_ratios.windows(2).map(|w| w[1] / w[0]).collect();
    let max_growth = growth.iter().copied().fold(0.0, f64::max);
    let verdict = if max_growth <= MAX_GROWTH && sup_ratios.iter().all(|r| r.is_finite()) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(SumMatrixReport { config: config.clone(), sup_ratios, growth, max_growth, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_norms_match_finite_differences() {
        let h = TensorBump { centers: vec![0.1], widths: vec![0.7] };
        let n = 200_000;
        let (mut d1, mut d2) = (0f64, 0f64);
        let step = 2.0 / n as f64;
        for k in 1..n {
            let y = -1.0 + k as f64 * step;
            let f = |y: f64| h.eval(&[y]);
            d1 = d1.max(((f(y + step) - f(y - step)) / (2.0 * step)).abs());
            d2 = d2.max(((f(y + step) - 2.0 * f(y) + f(y - step)) / (step * step)).abs());
        }
        assert!((d1 - TensorBump::d1(0.7)).abs() < 1e-3 * d1);
        assert!((d2 - TensorBump::d2(0.7)).abs() < 1e-3 * d2);
    }

    #[test]
    fn geometric_series_bound() {
        for (m, t) in [(10, 0.7), (1000, 3.3), (4096, 11.0)] {
            let v = geometric_sum_check(&rat(-7, 6), m, t).unwrap();
            assert!(v <= 2.0 + 1e-9, "{v}");
        }
    }

    #[test]
    fn feasible_range_matches_brute_force() {
        let c = SumMatrixConfig::double_reference();
        let mut t = draw_trials(&SumMatrixConfig { trials: 3, ..c }).remove(2);
        t.m = vec![40, 40];
        let fast = t.value(1.3);
        let mut y = vec![0.0; t.a.len()];
        let mut slow = Complex64::new(0.0, 0.0);
        for m1 in 0..=40 {
            for m2 in 0..=40 {
                let m = [m1 as f64, m2 as f64];
                let mut inside = true;
                for (k, b) in t.betas.iter().enumerate() {
                    y[k] = (to_f64(&b[0]) * m[0] + to_f64(&b[1]) * m[1]).exp2() * t.a[k];
                    inside &= y[k].abs() <= 1.0;
                }
                if inside {
                    slow += unit(-7.0 / 6.0 * (m[0] + m[1]) * LN_2 * 1.3) * t.h.eval(&y);
                }
            }
        }
        assert!((fast - slow).norm() < 1e-9, "{fast} vs {slow}");
    }

    #[test]
    fn degenerate_cross_term_is_rejected() {
        let mut trial = draw_trials(&SumMatrixConfig { trials: 1, ..SumMatrixConfig::double_reference() }).remove(0);
        trial.betas[0] = vec![rat(1, 1), rat(1, 1)];
        assert!(oscillatory_sum_bound(&trial).is_err());
    }

    #[test]
    fn zero_of_denominator_is_excluded() {
        let mut trial = draw_trials(&SumMatrixConfig { trials: 1, ..SumMatrixConfig::single_dense() }).remove(0);
        trial.m = vec![100];
        trial.t = vec![0.0];
        assert!(oscillatory_sum_bound(&trial).is_err());
    }
}
