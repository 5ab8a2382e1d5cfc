//! Local zeta polynomials of quadratic monogenic orders: the families
//! R_n/U_n/S_n, the completed local functions J-tilde with their functional
//! equation and divisor-sum form, the orbital values at s = 1, and a
//! brute-force ideal-counting oracle over the depth-n orders.
//!
//! For a depth-n order O in a quadratic etale algebra over Z_p the zeta
//! function factors as zeta_O(s) = P(q^{-s}) / V(q^{-s}) with P one of the
//! three families and V = (1-X), (1-X^2) or (1-X)^2 in the ramified, inert
//! and split cases. The raw ideal counts are therefore the series
//! coefficients of P/V, not the coefficients of P itself.

use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::exact::{kronecker_i64, rat, ExpPoly, Int, Rat};
use crate::field::{LocalPrimeData, SplitType};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderZetaPolynomial {
    pub family: SplitType,
    pub n: u32,
    pub q: u64,
    /// Coefficients of X^0 .. X^{2n}.
    pub coeffs: Vec<Int>,
}

/// The closed-form polynomial for the depth-n order: Ramified -> R_n,
/// Inert -> U_n, Split -> S_n.
pub fn order_polynomial(family: SplitType, n: u32, q: u64) -> OrderZetaPolynomial {
    assert!(q >= 2, "residue size must be at least 2");
    let qi = Int::from(q);
    let deg = 2 * n as usize;
    let mut coeffs = vec![Int::zero(); deg + 1];
    match family {
        SplitType::Ramified => {
            for j in 0..=n {
                coeffs[2 * j as usize] = Pow::pow(&qi, j);
            }
        }
        SplitType::Inert => {
            for j in 0..=deg {
                coeffs[j] = Pow::pow(&qi, (j / 2) as u32);
            }
        }
        SplitType::Split => {
            for j in 0..deg {
                let mag = Pow::pow(&qi, (j / 2) as u32);
                coeffs[j] = if j % 2 == 0 { mag } else { -mag };
            }
            coeffs[deg] = Pow::pow(&qi, n);
        }
    }
    OrderZetaPolynomial { family, n, q, coeffs }
}

/// The denominator V with zeta_O = P / V, as polynomial coefficients.
pub fn denominator(family: SplitType) -> Vec<i64> {
    match family {
        SplitType::Ramified => vec![1, -1],
        SplitType::Inert => vec![1, 0, -1],
        SplitType::Split => vec![1, -2, 1],
    }
}

/// Series coefficients of P/V up to X^{j_max}: the number of ideals of
/// index q^j in the depth-n order.
pub fn ideal_count_series(family: SplitType, n: u32, q: u64, j_max: u32) -> Vec<Int> {
    let p = order_polynomial(family, n, q);
    let v = denominator(family);
    let mut a = Vec::with_capacity(j_max as usize + 1);
    for j in 0..=j_max as usize {
        let mut c = p.coeffs.get(j).cloned().unwrap_or_else(Int::zero);
        for (i, vi) in v.iter().enumerate().skip(1) {
            if i <= j {
                c -= Int::from(*vi) * &a[j - i];
            }
        }
        a.push(c);
    }
    a
}

/// The completed local function q^{ns} P(q^{-s}) as an exponential
/// polynomial; the term for X^j has base q^{j-n}.
pub fn jtilde(poly: &OrderZetaPolynomial) -> ExpPoly {
    let q = rat(poly.q as i64, 1);
    let mut out = ExpPoly::zero();
    for (j, c) in poly.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = j as i64 - poly.n as i64;
        out = out.add(&ExpPoly::term(Rat::from(c.clone()), (&q).pow(e as i32)));
    }
    out
}

/// J-tilde assembled from the divisor sum
/// q^{ns} sum_{j<=n} q^{j(1-2s)} (1 - chi q^{-s})^{[j<n]}.
pub fn jtilde_divisor_form(family: SplitType, n: u32, q: u64) -> ExpPoly {
    let qr = rat(q as i64, 1);
    let chi = family.chi() as i64;
    let char_factor = ExpPoly::one().sub(&ExpPoly::term(rat(chi, 1), qr.clone()));
    let mut sum = ExpPoly::zero();
    for j in 0..=n {
        let mut term = ExpPoly::term(
            Rat::from(Pow::pow(&Int::from(q), j)),
            (&qr).pow(2 * j as i32),
        );
        if j < n {
            term = term.mul(&char_factor);
        }
        sum = sum.add(&term);
    }
    // q^{ns} is the term with base q^{-n}
    sum.mul(&ExpPoly::term(Rat::one(), (&qr).pow(-(n as i32))))
}

/// The orbital integral value J-tilde(1) in closed form.
pub fn orbital_value(family: SplitType, m: u32, q: u64) -> Rat {
    let q = rat(q as i64, 1);
    let qm = (&q).pow(m as i32);
    match family {
        SplitType::Split => qm,
        SplitType::Inert => (qm * (&q + Rat::one()) - rat(2, 1)) / (&q - Rat::one()),
        SplitType::Ramified => (qm * &q - Rat::one()) / (&q - Rat::one()),
    }
}

/// Brute-force ideal counts in the depth-n order, one entry per index
/// exponent j = 0..j_max. Enumerates Hermite-form sublattices of Z^2 stable
/// under the multiplication matrix of the order's generator.
pub fn count_ideals_oracle(
    family: SplitType,
    n: u32,
    q: &LocalPrimeData,
    j_max: u32,
) -> Result<Vec<u64>> {
    if q.f != 1 {
        return Err(Error::Invalid(
            "ideal-count oracle needs a degree-one prime (prime residue size)".into(),
        ));
    }
    let p = q
        .p
        .to_i64()
        .ok_or_else(|| Error::Guard("oracle prime too large".into()))?;
    let size = (p as f64).powi(2 * j_max as i32);
    if size > (1u64 << 20) as f64 {
        return Err(Error::Guard(format!("q^(2 j_max) = {}^{} exceeds 2^20", p, 2 * j_max)));
    }
    let pn = p.pow(n);
    let p2n = pn * pn;
    // multiplication-by-beta matrix for beta = p^n * Delta
    let b: [[i128; 2]; 2] = match family {
        SplitType::Split => [[0, 0], [1, pn as i128]],
        SplitType::Ramified => [[0, (p2n * p) as i128], [1, 0]],
        SplitType::Inert => {
            let c0 = if p == 2 {
                1i64
            } else {
                (1..)
                    .find(|c| kronecker_i64(1 + 4 * c, p) == -1)
                    .unwrap()
            };
            [[0, (c0 * p2n) as i128], [1, pn as i128]]
        }
    };
    let contains = |d1: i128, d2: i128, c: i128, x: i128, y: i128| -> bool {
        if y % d2 != 0 {
            return false;
        }
        (x - (y / d2) * c) % d1 == 0
    };
    let mut counts = Vec::with_capacity(j_max as usize + 1);
    for j in 0..=j_max {
        let mut count = 0u64;
        for alpha in 0..=j {
            let d1 = (p.pow(alpha)) as i128;
            let d2 = (p.pow(j - alpha)) as i128;
            for c in 0..d1 {
                // columns (d1, 0) and (c, d2)
                let stable = [(d1, 0i128), (c, d2)].into_iter().all(|(x, y)| {
                    let bx = b[0][0] * x + b[0][1] * y;
                    let by = b[1][0] * x + b[1][1] * y;
                    contains(d1, d2, c, bx, by)
                });
                if stable {
                    count += 1;
                }
            }
        }
        counts.push(count);
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::field::{primes_above, BaseField};

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(order_polynomial(SplitType::Ramified, 1, 3).coeffs, ints(&[1, 0, 3]));
        assert_eq!(order_polynomial(SplitType::Inert, 1, 3).coeffs, ints(&[1, 1, 3]));
        assert_eq!(order_polynomial(SplitType::Split, 0, 7).coeffs, ints(&[1]));
        assert_eq!(order_polynomial(SplitType::Split, 1, 3).coeffs, ints(&[1, -1, 3]));
        assert_eq!(
            order_polynomial(SplitType::Ramified, 2, 2).coeffs,
            ints(&[1, 0, 2, 0, 4])
        );
        for fam in [SplitType::Split, SplitType::Inert, SplitType::Ramified] {
            assert_eq!(order_polynomial(fam, 0, 5).coeffs, ints(&[1]));
        }
    }

    #[test]
    fn recurrences() {
        // U_n = (1+X) R_{n-1} + q^n X^{2n}, S_n = (1-X) R_{n-1} + q^n X^{2n}
        for q in [2u64, 3, 4, 5, 7, 9] {
            for n in 1..=10u32 {
                let r = order_polynomial(SplitType::Ramified, n - 1, q);
                let u = order_polynomial(SplitType::Inert, n, q);
                let s = order_polynomial(SplitType::Split, n, q);
                let deg = 2 * n as usize;
                for j in 0..=deg {
                    let rj = r.coeffs.get(j).cloned().unwrap_or_else(Int::zero);
                    let rjm = if j > 0 {
                        r.coeffs.get(j - 1).cloned().unwrap_or_else(Int::zero)
                    } else {
                        Int::zero()
                    };
                    let top = if j == deg {
                        Pow::pow(&Int::from(q), n)
                    } else {
                        Int::zero()
                    };
                    assert_eq!(u.coeffs[j], &rj + &rjm + &top, "U q={} n={} j={}", q, n, j);
                    assert_eq!(s.coeffs[j], &rj - &rjm + &top, "S q={} n={} j={}", q, n, j);
                }
            }
        }
    }

    #[test]
    fn polynomial_functional_equation() {
        // c_{2n-j} = c_j q^{n-j}, equivalently (q x^2)^n P(1/(qx)) = P(x)
        for q in [2u64, 3, 4, 5, 7, 9] {
            for n in 0..=10u32 {
                for fam in [SplitType::Split, SplitType::Inert, SplitType::Ramified] {
                    let p = order_polynomial(fam, n, q);
                    let jt = jtilde(&p);
                    assert_eq!(jt.reflect(), jt, "{:?} q={} n={}", fam, q, n);
                    assert_eq!(p.coeffs[0], Int::one());
                    assert_eq!(p.coeffs[2 * n as usize], Pow::pow(&Int::from(q), n));
                }
            }
        }
    }

    #[test]
    fn jtilde_examples() {
        let r0 = order_polynomial(SplitType::Ramified, 0, 5);
        assert!(jtilde(&r0).is_one());
        let u1 = jtilde(&order_polynomial(SplitType::Inert, 1, 3));
        let terms: Vec<(Rat, Rat)> = u1.terms().map(|(b, c)| (b.clone(), c.clone())).collect();
        assert_eq!(
            terms,
            vec![
                (rat(1, 3), rat(1, 1)),
                (rat(1, 1), rat(1, 1)),
                (rat(3, 1), rat(3, 1)),
            ]
        );
        assert_eq!(u1.eval_int(1), rat(5, 1));
    }

    #[test]
    fn divisor_form_matches() {
        for fam in [SplitType::Split, SplitType::Inert, SplitType::Ramified] {
            for q in [2u64, 3, 5] {
                for n in 0..=6u32 {
                    let direct = jtilde(&order_polynomial(fam, n, q));
                    assert_eq!(
                        jtilde_divisor_form(fam, n, q),
                        direct,
                        "{:?} n={} q={}",
                        fam,
                        n,
                        q
                    );
                }
            }
        }
    }

    #[test]
    fn orbital_values() {
        assert_eq!(orbital_value(SplitType::Split, 1, 3), rat(3, 1));
        assert_eq!(orbital_value(SplitType::Inert, 1, 3), rat(5, 1));
        assert_eq!(orbital_value(SplitType::Ramified, 1, 3), rat(4, 1));
        for fam in [SplitType::Split, SplitType::Inert, SplitType::Ramified] {
            for q in [2u64, 3, 4, 5, 9] {
                for m in 0..=6u32 {
                    let jt = jtilde(&order_polynomial(fam, m, q));
                    assert_eq!(jt.eval_int(1), orbital_value(fam, m, q), "{:?} {} {}", fam, q, m);
                }
            }
        }
    }

    #[test]
    fn oracle_matches_series() {
        let f = BaseField::rational();
        for p in [2i64, 3] {
            let q = primes_above(&f, &int(p)).pop().unwrap();
            for fam in [SplitType::Split, SplitType::Inert, SplitType::Ramified] {
                for n in 0..=2u32 {
                    let counts = count_ideals_oracle(fam, n, &q, 4).unwrap();
                    let series = ideal_count_series(fam, n, p as u64, 4);
                    let counts: Vec<Int> = counts.iter().map(|&c| Int::from(c)).collect();
                    assert_eq!(counts, series, "{:?} p={} n={}", fam, p, n);
                }
            }
        }
    }

    #[test]
    fn oracle_concrete_counts() {
        let f = BaseField::rational();
        let q3 = primes_above(&f, &int(3)).pop().unwrap();
        let q2 = primes_above(&f, &int(2)).pop().unwrap();
        // depth-1 inert at 3: U_1/(1-X^2) = 1 + X + 4X^2 + ...
        assert_eq!(count_ideals_oracle(SplitType::Inert, 1, &q3, 2).unwrap(), vec![1, 1, 4]);
        // depth-1 ramified at 2: R_1/(1-X) = 1 + X + 3X^2 + ...
        assert_eq!(count_ideals_oracle(SplitType::Ramified, 1, &q2, 2).unwrap(), vec![1, 1, 3]);
        // depth 0: the maximal orders
        assert_eq!(count_ideals_oracle(SplitType::Ramified, 0, &q2, 0).unwrap(), vec![1]);
        assert_eq!(count_ideals_oracle(SplitType::Inert, 0, &q2, 3).unwrap(), vec![1, 0, 1, 0]);
        assert_eq!(count_ideals_oracle(SplitType::Split, 0, &q2, 2).unwrap(), vec![1, 2, 3]);
        // guard
        assert!(count_ideals_oracle(SplitType::Split, 0, &q3, 12).is_err());
    }
}
