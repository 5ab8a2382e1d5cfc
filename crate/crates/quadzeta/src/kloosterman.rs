//! The Beyond-Endoscopy harness over Q: Kloosterman sums K_{a,d} attached
//! to the congruence conditions, and the 2-adic Euler factor of the double
//! Dirichlet series sum_d d^{-(2s+1)} sum_a K_{a,d} a^{-(s+1)}.
//!
//! Sign convention: `sign` is the sign of the 4p^k term in
//! delta = m^2 + sign*4p^k, so the underlying characteristic polynomial is
//! X^2 - mX - sign*p^k.

use num_complex::Complex64;
use num_traits::Zero;

use crate::exact::{is_prime, kronecker_i64};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Both congruence conditions: d^2 | m^2 + sign*4p^k and the quotient
    /// is 0 or 1 mod 4.
    WithCc,
    /// Only the divisibility d^2 | m^2 + sign*4p^k.
    WithoutCc,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct KloostermanCell {
    pub a: i64,
    pub d: i64,
    pub p: i64,
    pub k: u32,
    pub sign: i8,
    pub value: i64,
}

fn validate(a: i64, d: i64, p: i64, k: u32, sign: i8) -> Result<i64> {
    if a < 1 || d < 1 {
        return Err(Error::Invalid("a and d must be at least 1".into()));
    }
    if !(sign == 1 || sign == -1) {
        return Err(Error::Invalid("sign must be +1 or -1".into()));
    }
    if !is_prime(&crate::exact::int(p)) {
        return Err(Error::Invalid(format!("{} is not prime", p)));
    }
    if a.checked_mul(d * d).map_or(true, |t| t > 1_000_000) {
        return Err(Error::Guard(format!("a*d^2 = {}*{}^2 exceeds 10^6", a, d)));
    }
    let pk = p.checked_pow(k).filter(|&v| v <= 1_000_000_000_000);
    pk.ok_or_else(|| Error::Guard(format!("p^k = {}^{} too large", p, k)))
}

fn cell_sum(a: i64, d: i64, four_pk_signed: i64, variant: Variant) -> i64 {
    let modulus = 4 * a * d * d;
    let dd = d * d;
    let mut total = 0i64;
    for m in 0..modulus {
        let t = m * m + four_pk_signed;
        if t.rem_euclid(dd) != 0 {
            continue;
        }
        let q = t / dd;
        if variant == Variant::WithCc && !matches!(q.rem_euclid(4), 0 | 1) {
            continue;
        }
        total += kronecker_i64(q, a) as i64;
    }
    total
}

pub fn kloosterman_variant(
    a: i64,
    d: i64,
    p: i64,
    k: u32,
    sign: i8,
    variant: Variant,
) -> Result<i64> {
    let pk = validate(a, d, p, k, sign)?;
    Ok(cell_sum(a, d, 4 * sign as i64 * pk, variant))
}

/// K_{a,d}: exact enumeration over m mod 4ad^2 with both congruence
/// conditions.
pub fn kloosterman(a: i64, d: i64, p: i64, k: u32, sign: i8) -> Result<KloostermanCell> {
    let value = kloosterman_variant(a, d, p, k, sign, Variant::WithCc)?;
    Ok(KloostermanCell { a, d, p, k, sign, value })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EulerFactor {
    pub k: u32,
    pub variant: Variant,
    pub truncation: u32,
    pub re: f64,
    pub im: f64,
    /// Rigorous bound on the dropped terms from |K_{a,d}| <= 4ad^2,
    /// finite for Re s > 1/2.
    pub tail_bound: f64,
}

impl EulerFactor {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// The 2-part of the double Dirichlet series for p = 2 and the minus sign,
/// normalized by the leading cell K_{1,1} = 4 so the factor starts at 1:
/// (1/4) sum over a = 2^j, d = 2^i with a d^2 <= 2^truncation of
/// K_{a,d} d^{-(2s+1)} a^{-(s+1)}.
pub fn euler_factor_at_2(
    k: u32,
    s: Complex64,
    variant: Variant,
    truncation: u32,
) -> Result<EulerFactor> {
    if s.re <= 0.5 {
        return Err(Error::Invalid(
            "the tail estimate needs Re s > 1/2".into(),
        ));
    }
    if truncation > 24 {
        return Err(Error::Guard("truncation beyond 2^24".into()));
    }
    let pk = 2i64
        .checked_pow(k)
        .filter(|&v| v <= 1_000_000_000_000)
        .ok_or_else(|| Error::Guard("2^k too large".into()))?;
    let mut sum = Complex64::zero();
    for i in 0..=(truncation / 2) {
        for j in 0..=(truncation - 2 * i) {
            let a = 1i64 << j;
            let d = 1i64 << i;
            let kad = cell_sum(a, d, -4 * pk, variant) as f64;
            if kad != 0.0 {
                let log2 = std::f64::consts::LN_2;
                let exponent = -(s + 1.0) * (j as f64) - (2.0 * s + 1.0) * (i as f64);
                sum += kad * (exponent * log2).exp();
            }
        }
    }
    // terms at level l = j + 2i are bounded by (l/2 + 1) 2^{-l(sigma-1/2)}
    // before the 1/4 normalization
    let t = 2f64.powf(-(s.re - 0.5));
    let mut tail = 0.0;
    let mut lv = truncation + 1;
    loop {
        let term = ((lv / 2 + 1) as f64) * t.powi(lv as i32);
        tail += term;
        lv += 1;
        if term < 1e-18 * (1.0 + tail) || lv > truncation + 4000 {
            break;
        }
    }
    sum /= 4.0;
    Ok(EulerFactor {
        k,
        variant,
        truncation,
        re: sum.re,
        im: sum.im,
        tail_bound: tail / 4.0,
    })
}

/// The closed form (1 - 2^{-(k+3)})/(1 - 2^{-1}) the without-cc factor is
/// compared against at s = 1.
pub fn displayed_closed_form(k: u32) -> f64 {
    (1.0 - 2f64.powi(-(k as i32 + 3))) / (1.0 - 0.5)
}

/// The k <= 4 values where the without-cc factor at s = 1 agrees with the
/// displayed closed form within the tail bound, found by enumeration: the
/// odd ones.
pub fn matching_k_values(truncation: u32) -> Result<Vec<u32>> {
    let s1 = Complex64::new(1.0, 0.0);
    let mut out = vec![];
    for k in 0..=4 {
        let e = euler_factor_at_2(k, s1, Variant::WithoutCc, truncation)?;
        if (e.re - displayed_closed_form(k)).abs() <= e.tail_bound && e.im.abs() <= e.tail_bound {
            out.push(k);
        }
    }
    Ok(out)
}
