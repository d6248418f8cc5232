//! Fixtures shared by the benchmarks.

use rheight::PuiseuxPoly;

pub fn parabola_power(n: u32) -> PuiseuxPoly {
    PuiseuxPoly::from_int_terms(&[(1, 0, 1), (-1, 2, 0)]).pow(n)
}

/// `(x2 − x1² − x1³)(x2 − x1² − x1⁴)³`.
pub fn two_edge() -> PuiseuxPoly {
    let a = PuiseuxPoly::from_int_terms(&[(1, 0, 1), (-1, 2, 0), (-1, 3, 0)]);
    let b = PuiseuxPoly::from_int_terms(&[(1, 0, 1), (-1, 2, 0), (-1, 4, 0)]);
    &a * &b.pow(3)
}

/// Deterministic support with `n` points and exponents below 31.
pub fn scattered_support(n: usize) -> Vec<rheight::newton::Point> {
    let mut s: u64 = 0x9e37_79b9_7f4a_7c15;
    (0..n)
        .map(|_| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            rheight::newton::Point::int((s % 31) as i64, ((s >> 32) % 31) as i64)
        })
        .collect()
}
