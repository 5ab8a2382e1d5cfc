//! The generalized Zagier zeta function: the exact finite decomposition
//! against O(s, delta) over any supported base field, and over Q the
//! numerical Dirichlet L-functions, the completed function Lambda(s, delta),
//! and its functional equation.
//!
//! Numerics: Hurwitz zeta by Euler-Maclaurin with the 1/(s-1) pole split
//! off, so L-values are finite sums of pole-free Hurwitz values and remain
//! well defined at s = 1; the complex Gamma function uses the Lanczos
//! approximation.

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::exact::{factor, int, kronecker, kronecker_i64, rat, ExpPoly, Int, Rat};
use crate::field::{
    primes_above, satisfies_congruence, AlgebraicInt, BaseField, IdealData, LocalPrimeData,
};
use crate::global::{global_series, GlobalOrbitalSeries};
use crate::orderzeta::order_polynomial;
use crate::{Error, Result};

/// The admissible-ideal decomposition of the Zagier zeta function: the sum
/// Z(s) over ideals satisfying the congruence conditions, which must agree
/// with N(S)^{-s} O(s, delta).
#[derive(Debug, Clone)]
pub struct ZagierDecomposition {
    pub delta: AlgebraicInt,
    pub field: BaseField,
    pub series: GlobalOrbitalSeries,
    pub admissible: Vec<IdealData>,
    /// Per admissible ideal I, the primes dividing S_delta / I where the
    /// twisted character chi_I vanishes.
    pub dropped: Vec<Vec<LocalPrimeData>>,
    /// Z(s) = sum over admissible I of N(I)^{1-2s} prod (1 - chi N(q)^{-s}).
    pub z: ExpPoly,
}

/// Enumerates admissible ideals by the congruence predicate (not by
/// divisibility of S_delta) and checks both halves of the finite identity.
pub fn zagier_decompose(delta: &AlgebraicInt, field: &BaseField) -> Result<ZagierDecomposition> {
    let series = global_series(delta, field)?;
    // candidate ideals: exponent r at q constrained by 2r <= val_q(delta)
    let nrm = delta.norm(field);
    let fac = factor(&nrm)?;
    let mut candidate_primes: Vec<(LocalPrimeData, u32)> = vec![];
    for (p, _) in &fac.factors {
        for q in primes_above(field, p) {
            let a = q.val(delta).unwrap();
            if a >= 2 {
                candidate_primes.push((q, (a / 2) as u32));
            }
        }
    }
    let mut candidates = vec![IdealData::unit()];
    for (q, rmax) in &candidate_primes {
        let mut next = Vec::with_capacity(candidates.len() * (*rmax as usize + 1));
        for c in &candidates {
            for r in 0..=*rmax {
                let mut ideal = c.clone();
                if r > 0 {
                    ideal.factors.push((q.clone(), r));
                }
                next.push(ideal);
            }
        }
        candidates = next;
    }
    let admissible: Vec<IdealData> = candidates
        .into_iter()
        .filter(|i| satisfies_congruence(i, delta, field))
        .collect();

    // the congruence conditions must carve out exactly the divisors of S
    let mut divisors = series.s_delta.divisors();
    let key = |i: &IdealData| {
        let mut k: Vec<(String, u32)> = i
            .factors
            .iter()
            .map(|(q, e)| (format!("{:?}", q), *e))
            .collect();
        k.sort();
        k
    };
    let mut admissible_sorted = admissible.clone();
    admissible_sorted.sort_by_key(&key);
    divisors.sort_by_key(&key);
    if admissible_sorted.len() != divisors.len()
        || admissible_sorted
            .iter()
            .zip(&divisors)
            .any(|(a, b)| key(a) != key(b))
    {
        return Err(Error::IdentityViolation(format!(
            "admissible ideals of {} over {} are not the divisors of S",
            delta, field
        )));
    }

    let mut z = ExpPoly::zero();
    let mut dropped = Vec::with_capacity(admissible.len());
    for ideal in &admissible {
        let ni = ideal.norm();
        let mut term = ExpPoly::term(Rat::from(ni.clone()), Rat::from(&ni * &ni));
        let mut drop_set = vec![];
        for (q, n, ty) in series
            .locals
            .iter()
            .map(|(q, ty, n)| (q, *n, *ty))
        {
            if ideal.exponent_of(q) < n {
                drop_set.push(q.clone());
                let nq = Rat::from(q.residue_size());
                term = term.mul(&ExpPoly::one().sub(&ExpPoly::term(rat(ty.chi() as i64, 1), nq)));
            }
        }
        dropped.push(drop_set);
        z = z.add(&term);
    }

    // Z(s) N(S)^s = O(s, delta) exactly
    let ns = series.s_delta.norm();
    let lhs = z.mul(&ExpPoly::term(Rat::one(), Rat::from(ns).recip()));
    if lhs != series.product {
        return Err(Error::IdentityViolation(format!(
            "Z(s) N(S)^s differs from the orbital series for {} over {}",
            delta, field
        )));
    }
    Ok(ZagierDecomposition {
        delta: delta.clone(),
        field: *field,
        series,
        admissible,
        dropped,
        z,
    })
}

/// delta = S^2 D with D the discriminant of Q(sqrt delta); returns (D, S).
pub fn fundamental_discriminant(delta: i64) -> Result<(i64, i64)> {
    if delta == 0 {
        return Err(Error::ZeroInput);
    }
    let dd = AlgebraicInt::from_i64(delta);
    if crate::field::is_square(&dd, &BaseField::rational()) {
        return Err(Error::SquareDelta);
    }
    if !matches!(delta.rem_euclid(4), 0 | 1) {
        return Err(Error::NotSquareMod4);
    }
    let fac = factor(&int(delta))?;
    let mut d0 = fac.sign as i64;
    for (p, e) in &fac.factors {
        if e % 2 == 1 {
            d0 *= p.to_i64().ok_or_else(|| Error::Guard("delta too large".into()))?;
        }
    }
    let d = if d0.rem_euclid(4) == 1 { d0 } else { 4 * d0 };
    let ssq = delta / d;
    debug_assert_eq!(delta % d, 0);
    let s = (ssq as f64).sqrt().round() as i64;
    if s * s != ssq {
        return Err(Error::IdentityViolation(format!(
            "{} / {} is not a perfect square",
            delta, d
        )));
    }
    Ok((d, s))
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let squarefree = |n: i64| {
        factor(&int(n))
            .map(|f| f.factors.iter().all(|(_, e)| *e == 1))
            .unwrap_or(false)
    };
    if d.rem_euclid(4) == 1 {
        squarefree(d)
    } else if d.rem_euclid(4) == 0 {
        let m = d / 4;
        matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
    } else {
        false
    }
}

const BERNOULLI: [(f64, f64); 12] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
];

/// Hurwitz zeta with the pole removed: zeta(s, a) - 1/(s-1), entire in s.
/// Euler-Maclaurin with shift to a + N >= 32 and 12 Bernoulli terms;
/// accurate to ~1e-12 on the strip -1 <= Re s <= 2, |Im s| <= 20.
pub fn hurwitz_zeta_star(s: Complex64, a: f64) -> Complex64 {
    assert!(a > 0.0, "Hurwitz parameter must be positive");
    let shift = ((32.0 - a).ceil().max(0.0)) as usize;
    let mut sum = Complex64::zero();
    for k in 0..shift {
        sum += Complex64::new(a + k as f64, 0.0).powc(-s);
    }
    let x = a + shift as f64;
    let lx = x.ln();
    // (x^{1-s} - 1) / (s - 1) = -ln x * (e^z - 1)/z with z = (1-s) ln x
    let z = (Complex64::one() - s) * lx;
    let em1z = if z.norm() < 1e-8 {
        Complex64::one() + z / 2.0
    } else {
        (z.exp() - Complex64::one()) / z
    };
    sum -= lx * em1z;
    let xc = Complex64::new(x, 0.0);
    sum += 0.5 * xc.powc(-s);
    let mut poch = s;
    let mut fact = 2.0f64;
    for (j, (bn, bd)) in BERNOULLI.iter().enumerate() {
        let j = j as f64 + 1.0;
        sum += (bn / bd / fact) * poch * xc.powc(-s - (2.0 * j - 1.0));
        poch *= (s + (2.0 * j - 1.0)) * (s + 2.0 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    }
    sum
}

pub fn hurwitz_zeta(s: Complex64, a: f64) -> Complex64 {
    hurwitz_zeta_star(s, a) + Complex64::one() / (s - Complex64::one())
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

pub fn gamma(s: Complex64) -> Complex64 {
    use std::f64::consts::PI;
    if s.re < 0.5 {
        let pi = Complex64::new(PI, 0.0);
        return pi / ((pi * s).sin() * gamma(Complex64::one() - s));
    }
    let z = s - Complex64::one();
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// L(s, chi_D) for a fundamental discriminant D, as the finite sum
/// |D|^{-s} sum_a chi_D(a) zeta*(s, a/|D|); the pole parts cancel because
/// chi_D sums to zero over a period.
pub fn dirichlet_l(s: Complex64, d: i64) -> Result<Complex64> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NonFundamental(d));
    }
    Ok(l_by_period(s, d))
}

/// Direct period summation of L(s, kronecker(dp, .)), valid for any
/// nonsquare dp = 0, 1 mod 4 (the character need not be primitive).
fn l_by_period(s: Complex64, dp: i64) -> Complex64 {
    let m = dp.unsigned_abs() as i64;
    let mut sum = Complex64::zero();
    for a in 1..=m {
        let chi = kronecker_i64(dp, a);
        if chi != 0 {
            sum += (chi as f64) * hurwitz_zeta_star(s, a as f64 / m as f64);
        }
    }
    Complex64::new(m as f64, 0.0).powc(-s) * sum
}

/// Independent L(1, chi_D) references: finite character sums from the
/// class number formula.
pub fn l_one_oracle(d: i64) -> Result<f64> {
    use std::f64::consts::PI;
    if !is_fundamental_discriminant(d) {
        return Err(Error::NonFundamental(d));
    }
    let m = d.unsigned_abs() as i64;
    if d < 0 {
        let mut s = 0f64;
        for a in 1..m {
            s += kronecker_i64(d, a) as f64 * a as f64;
        }
        Ok(-PI * s / (m as f64).powf(1.5))
    } else {
        let mut s = 0f64;
        for a in 1..m {
            let chi = kronecker_i64(d, a);
            if chi != 0 {
                s += chi as f64 * (PI * a as f64 / m as f64).sin().ln();
            }
        }
        Ok(-s / (m as f64).sqrt())
    }
}

/// The Zagier zeta function over Q through the factorization
/// N(S)^{-s} L(s, chi_D) O(s, delta).
pub fn zagier_l(s: Complex64, delta: i64) -> Result<Complex64> {
    let (d, s0) = fundamental_discriminant(delta)?;
    let field = BaseField::rational();
    let series = global_series(&AlgebraicInt::from_i64(delta), &field)?;
    let ns = series.s_delta.norm().to_f64().unwrap();
    debug_assert_eq!(ns as i64, s0);
    let o = series.product.eval_complex(s);
    Ok(Complex64::new(ns, 0.0).powc(-s) * dirichlet_l(s, d)? * o)
}

/// The same function summed directly over admissible conductors f with
/// f^2 | delta and delta/f^2 = 0, 1 mod 4; the inner characters are the
/// imprimitive kronecker(delta/f^2, .) summed over their full period.
pub fn zagier_l_direct(s: Complex64, delta: i64) -> Result<Complex64> {
    if delta == 0 {
        return Err(Error::ZeroInput);
    }
    let dd = AlgebraicInt::from_i64(delta);
    if crate::field::is_square(&dd, &BaseField::rational()) {
        return Err(Error::SquareDelta);
    }
    let mut sum = Complex64::zero();
    let mut f = 1i64;
    while f * f <= delta.abs() {
        if delta % (f * f) == 0 {
            let dp = delta / (f * f);
            if dp.rem_euclid(4) <= 1 {
                let weight = Complex64::new(f as f64, 0.0).powc(Complex64::one() - 2.0 * s);
                sum += weight * l_by_period(s, dp);
            }
        }
        f += 1;
    }
    Ok(sum)
}

/// Parity index: 0 for positive delta, 1 for negative.
pub fn i_delta(delta: i64) -> u32 {
    if delta > 0 {
        0
    } else {
        1
    }
}

/// Lambda(s, delta) = (|delta|/pi)^{s/2} Gamma((s + i_delta)/2) L(s, delta).
pub fn completed_lambda(s: Complex64, delta: i64) -> Result<Complex64> {
    use std::f64::consts::PI;
    let i = i_delta(delta) as f64;
    let l = zagier_l(s, delta)?;
    let scale = Complex64::new(delta.unsigned_abs() as f64 / PI, 0.0).powc(s / 2.0);
    Ok(scale * gamma((s + i) / 2.0) * l)
}

/// Relative residual of the functional equation at s.
pub fn lambda_residual(s: Complex64, delta: i64) -> Result<f64> {
    let a = completed_lambda(s, delta)?;
    let b = completed_lambda(Complex64::one() - s, delta)?;
    Ok((a - b).norm() / (1.0 + a.norm()))
}

/// Dirichlet coefficients of the global order zeta function
/// zeta_{Q(sqrt delta)}(s) * prod over p | S of P_{n_p}(p^{-s}), up to
/// index bound. The leading entry is the coefficient of 1^{-s}.
pub fn order_zeta_coefficients(delta: i64, bound: usize) -> Result<Vec<Int>> {
    let (d, _) = fundamental_discriminant(delta)?;
    let field = BaseField::rational();
    let series = global_series(&AlgebraicInt::from_i64(delta), &field)?;
    // r(n) = sum_{e | n} chi_D(e), the Dedekind zeta coefficients
    let mut coeffs: Vec<Int> = (0..=bound)
        .map(|n| {
            if n == 0 {
                Int::zero()
            } else {
                let mut r = Int::zero();
                for e in 1..=n {
                    if n % e == 0 {
                        r += int(kronecker(&int(d), &int(e as i64)) as i64);
                    }
                }
                r
            }
        })
        .collect();
    for (q, ty, n) in &series.locals {
        let p = q.residue_size().to_usize().ok_or_else(|| {
            Error::Guard("residue size too large for coefficient expansion".into())
        })?;
        let poly = order_polynomial(*ty, *n, p as u64);
        let mut next = vec![Int::zero(); bound + 1];
        let mut pj = 1usize;
        for c in poly.coeffs.iter() {
            if pj > bound {
                break;
            }
            if !c.is_zero() {
                for m in 1..=(bound / pj) {
                    let add = c * &coeffs[m];
                    next[m * pj] += add;
                }
            }
            match pj.checked_mul(p) {
                Some(v) => pj = v,
                None => break,
            }
        }
        coeffs = next;
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hurwitz_basics() {
        // zeta(2, 1) = pi^2/6, zeta(-1, 1) = -1/12
        let z2 = hurwitz_zeta(c(2.0, 0.0), 1.0);
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-12, "{}", z2);
        let zm1 = hurwitz_zeta(c(-1.0, 0.0), 1.0);
        assert!((zm1.re + 1.0 / 12.0).abs() < 1e-12, "{}", zm1);
        // Hurwitz relation zeta(s, a) = zeta(s, a+1) + a^{-s}
        for (s, a) in [(c(0.5, 3.0), 0.25), (c(-0.5, 10.0), 0.7), (c(1.0, 0.0), 0.5)] {
            let lhs = hurwitz_zeta_star(s, a);
            let rhs = hurwitz_zeta_star(s, a + 1.0) + Complex64::new(a, 0.0).powc(-s);
            assert!((lhs - rhs).norm() < 1e-11, "s={} a={}", s, a);
        }
    }

    #[test]
    fn gamma_basics() {
        assert!((gamma(c(0.5, 0.0)).re - PI.sqrt()).abs() < 1e-12);
        assert!((gamma(c(5.0, 0.0)).re - 24.0).abs() < 1e-10);
        for z in [c(0.3, 1.7), c(-1.2, 0.4), c(2.5, -3.0)] {
            let lhs = gamma(z + Complex64::one());
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()), "z={}", z);
        }
    }

    #[test]
    fn dirichlet_l_at_one() {
        let l4 = dirichlet_l(c(1.0, 0.0), -4).unwrap();
        assert!((l4.re - PI / 4.0).abs() < 1e-10, "{}", l4);
        assert!(l4.im.abs() < 1e-12);
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let l5 = dirichlet_l(c(1.0, 0.0), 5).unwrap();
        assert!((l5.re - 2.0 * phi.ln() / 5.0f64.sqrt()).abs() < 1e-10, "{}", l5);
        // Catalan's constant L(2, chi_{-4})
        let cat = dirichlet_l(c(2.0, 0.0), -4).unwrap();
        assert!((cat.re - 0.915_965_594_177_219).abs() < 1e-12);
        assert!(dirichlet_l(c(1.0, 0.0), 12).is_ok());
        assert!(matches!(dirichlet_l(c(1.0, 0.0), 45), Err(Error::NonFundamental(45))));
        assert!(matches!(dirichlet_l(c(1.0, 0.0), 1), Err(Error::NonFundamental(1))));
    }

    #[test]
    fn l_one_oracles() {
        assert!((l_one_oracle(-4).unwrap() - PI / 4.0).abs() < 1e-12);
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((l_one_oracle(5).unwrap() - 2.0 * phi.ln() / 5.0f64.sqrt()).abs() < 1e-12);
        for d in [-3, -4, -8, -7, 5, 8, 12, 13, 173] {
            let l = dirichlet_l(c(1.0, 0.0), d).unwrap();
            let o = l_one_oracle(d).unwrap();
            assert!((l.re - o).abs() < 1e-10, "D={} {} vs {}", d, l.re, o);
        }
    }

    #[test]
    fn fundamental_discriminants() {
        assert_eq!(fundamental_discriminant(45).unwrap(), (5, 3));
        assert_eq!(fundamental_discriminant(48).unwrap(), (12, 2));
        assert_eq!(fundamental_discriminant(8).unwrap(), (8, 1));
        assert_eq!(fundamental_discriminant(-4).unwrap(), (-4, 1));
        assert_eq!(fundamental_discriminant(-12).unwrap(), (-3, 2));
        assert_eq!(fundamental_discriminant(173).unwrap(), (173, 1));
        assert!(fundamental_discriminant(9).is_err());
        assert!(fundamental_discriminant(0).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let f = BaseField::rational();
        let d45 = zagier_decompose(&AlgebraicInt::from_i64(45), &f).unwrap();
        let mut norms: Vec<i64> = d45.admissible.iter().map(|i| i.norm().to_i64().unwrap()).collect();
        norms.sort();
        assert_eq!(norms, vec![1, 3]);
        let d5 = zagier_decompose(&AlgebraicInt::from_i64(5), &f).unwrap();
        assert_eq!(d5.admissible.len(), 1);
        assert!(d5.z.is_one());
        let d48 = zagier_decompose(&AlgebraicInt::from_i64(48), &f).unwrap();
        let mut norms: Vec<i64> = d48.admissible.iter().map(|i| i.norm().to_i64().unwrap()).collect();
        norms.sort();
        assert_eq!(norms, vec![1, 2]);
        // base-field-general: symbolic identity over quadratic fields
        for m in [-1i64, 2, 5, -5] {
            let qf = BaseField::quadratic(m).unwrap();
            for delta in crate::global::random_delta_corpus(&qf, 10, 9, 23) {
                zagier_decompose(&delta, &qf).unwrap();
            }
        }
    }

    #[test]
    fn zagier_l_values() {
        let l45 = zagier_l(c(1.0, 0.0), 45).unwrap();
        assert!((l45.re - 0.717_348_234_9).abs() < 1e-9, "{}", l45);
        let lm4 = zagier_l(c(1.0, 0.0), -4).unwrap();
        assert!((lm4.re - PI / 4.0).abs() < 1e-10);
        // direct-sum route agrees
        for delta in [45i64, 48, -4, 173, 12, 180, -12] {
            for s in [c(1.0, 0.0), c(0.5, 2.0), c(1.3, -4.0)] {
                let a = zagier_l(s, delta).unwrap();
                let b = zagier_l_direct(s, delta).unwrap();
                assert!(
                    (a - b).norm() < 1e-9 * (1.0 + a.norm()),
                    "delta={} s={} {} vs {}",
                    delta,
                    s,
                    a,
                    b
                );
            }
        }
    }

    #[test]
    fn lambda_functional_equation_samples() {
        assert_eq!(i_delta(-4), 1);
        assert_eq!(i_delta(45), 0);
        for delta in [45i64, -4, 5, 8] {
            for s in [c(0.3, 2.0), c(0.7, -1.0), c(0.5, 5.0)] {
                let r = lambda_residual(s, delta).unwrap();
                assert!(r < 1e-8, "delta={} s={} residual={}", delta, s, r);
            }
        }
        // Lambda(1/2, delta) is real for positive delta
        let l = completed_lambda(c(0.5, 0.0), 45).unwrap();
        assert!(l.im.abs() < 1e-10 * (1.0 + l.re.abs()), "{}", l);
    }

    #[test]
    fn order_zeta_coefficient_basics() {
        let coeffs = order_zeta_coefficients(5, 12).unwrap();
        // Dedekind zeta of Q(sqrt 5): split at 11 and 19, inert at 2, 3, 7,
        // ramified at 5
        let expect: Vec<i64> = vec![0, 1, 0, 0, 1, 1, 0, 0, 0, 1, 0, 2, 0];
        let expect: Vec<Int> = expect.into_iter().map(int).collect();
        assert_eq!(coeffs, expect);
        let c45 = order_zeta_coefficients(45, 10).unwrap();
        // at 3 the order is no longer maximal: U_1 correction
        assert_eq!(c45[3], int(1));
        assert_eq!(c45[9], int(4));
        assert_eq!(c45[1], int(1));
    }
}
