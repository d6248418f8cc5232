use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::Rational;

/// Dense univariate polynomial over the rationals, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        UniPoly::from_coeffs(vec![c])
    }

    /// `t - r`
    pub fn linear_root(r: &Rational) -> Self {
        UniPoly::from_coeffs(vec![-r.clone(), Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        UniPoly::from_coeffs(coeffs.iter().map(|&c| super::int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Multiplicity of the root `t = 0`.
    pub fn zero_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + super::to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        UniPoly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * super::int(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        UniPoly::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => UniPoly::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    /// Divides by `t^k`, dropping lower coefficients (they must be zero for an exact result).
    pub fn shift_down(&self, k: usize) -> Self {
        UniPoly::from_coeffs(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = UniPoly::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Quotient and remainder. Panics when dividing by zero.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lc_inv = d.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = &rem[k + dd] * &lc_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (UniPoly::from_coeffs(quot), UniPoly::from_coeffs(rem))
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's algorithm: `p = lc · ∏ s_i^i` with pairwise coprime square-free monic `s_i`.
    /// Returns the nonconstant `(s_i, i)`.
    pub fn squarefree_decomposition(&self) -> Vec<(UniPoly, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let p = self.monic();
        let dp = p.derivative();
        let a0 = p.gcd(&dp);
        let mut b = p.div_rem(&a0).0;
        let mut c = dp.div_rem(&a0).0;
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, i));
            }
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// `p(a + s·t)`
    pub fn compose_affine(&self, a: &Rational, s: &Rational) -> UniPoly {
        let lin = UniPoly::from_coeffs(vec![a.clone(), s.clone()]);
        let mut acc = UniPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &UniPoly::constant(c.clone());
        }
        acc
    }

    /// `t^n p(1/t)` for `n = deg p`.
    pub fn reversed(&self) -> UniPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        UniPoly::from_coeffs(c)
    }

    /// Sign changes in the coefficient sequence, zeros skipped.
    pub fn sign_variations(&self) -> usize {
        let mut count = 0;
        let mut last: Option<bool> = None;
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            let pos = c.is_positive();
            if last.is_some_and(|l| l != pos) {
                count += 1;
            }
            last = Some(pos);
        }
        count
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = abs.is_one();
            match (k, unit) {
                (0, _) => write!(f, "{abs}")?,
                (_, true) => {}
                (_, false) => write!(f, "{abs}*")?,
            }
            match k {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yun_recovers_multiplicities() {
        // (t-1)^3 (t+2)
        let p = &UniPoly::from_i64(&[-1, 1]).pow(3) * &UniPoly::from_i64(&[2, 1]);
        let dec = p.squarefree_decomposition();
        assert_eq!(dec.len(), 2);
        assert_eq!(dec[0], (UniPoly::from_i64(&[2, 1]), 1));
        assert_eq!(dec[1], (UniPoly::from_i64(&[-1, 1]), 3));
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = UniPoly::from_i64(&[3, 0, -2, 5, 1]);
        let b = UniPoly::from_i64(&[1, 2]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(UniPoly::from_i64(&[-2, 0, 0, 1]).to_string(), "t^3 - 2");
    }
}
