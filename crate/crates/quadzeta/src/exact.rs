//! Arbitrary-precision integer and rational plumbing: Kronecker symbols,
//! factorization, and the exponential-polynomial algebra `sum c * b^(-s)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(int(n), int(d))
}

/// Kronecker symbol (a/n) on the full domain, including n <= 0.
pub fn kronecker(a: &Int, n: &Int) -> i32 {
    if n.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    let mut a = a.clone();
    let mut n = n.clone();
    let mut result = 1i32;
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            result = -result;
        }
    }
    if n.is_even() {
        if a.is_even() {
            return 0;
        }
        let t = n.trailing_zeros().unwrap();
        n >>= t;
        if t % 2 == 1 {
            result *= symbol_mod2(&a);
        }
    }
    // n is now odd and positive; run the Jacobi reciprocity loop.
    a = a.mod_floor(&n);
    while !a.is_zero() {
        let t = a.trailing_zeros().unwrap();
        a >>= t;
        let n_mod8 = (&n % 8u32).to_u32().unwrap();
        if t % 2 == 1 && (n_mod8 == 3 || n_mod8 == 5) {
            result = -result;
        }
        if (&a % 4u32).to_u32().unwrap() == 3 && n_mod8 % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// (a/2) for odd a.
fn symbol_mod2(a: &Int) -> i32 {
    let r = a.mod_floor(&int(8)).to_u32().unwrap();
    if r == 1 || r == 7 {
        1
    } else {
        -1
    }
}

/// i64 fast path used by the Kloosterman cell enumeration.
pub fn kronecker_i64(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a as i128;
    let mut n = n as i128;
    let mut result = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    if n % 2 == 0 {
        if a % 2 == 0 {
            return 0;
        }
        let t = n.trailing_zeros();
        n >>= t;
        let r = a.rem_euclid(8);
        if t % 2 == 1 && !(r == 1 || r == 7) {
            result = -result;
        }
    }
    a = a.rem_euclid(n);
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        let n8 = n % 8;
        if t % 2 == 1 && (n8 == 3 || n8 == 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a = a.rem_euclid(n);
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Signed prime factorization with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    pub factors: Vec<(Int, u32)>,
}

impl Factorization {
    pub fn value(&self) -> Int {
        let mut v = int(self.sign as i64);
        for (p, e) in &self.factors {
            v *= p.pow(*e);
        }
        v
    }
}

/// Exact factorization of a nonzero integer with |n| < 2^96.
pub fn factor(n: &Int) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let limit = Int::one() << 96;
    if n.abs() >= limit {
        return Err(Error::Guard(format!("|{}| >= 2^96", n)));
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let mut map: BTreeMap<Int, u32> = BTreeMap::new();
    for p in [2u32, 3, 5, 7, 11, 13] {
        let p = int(p as i64);
        while (&m % &p).is_zero() {
            m /= &p;
            *map.entry(p.clone()).or_insert(0) += 1;
        }
    }
    let mut d = int(17);
    let step = [int(2), int(4)];
    let mut i = 0usize;
    // Trial division up to 2^20, then rho + Miller-Rabin for the rest.
    let td_limit = int(1 << 20);
    while &d * &d <= m && d <= td_limit {
        while (&m % &d).is_zero() {
            m /= &d;
            *map.entry(d.clone()).or_insert(0) += 1;
        }
        d += &step[i % 2];
        i += 1;
    }
    if !m.is_one() {
        let mut stack = vec![m];
        while let Some(c) = stack.pop() {
            if c.is_one() {
                continue;
            }
            if is_prime(&c) {
                *map.entry(c).or_insert(0) += 1;
            } else {
                let f = pollard_rho(&c);
                stack.push(&c / &f);
                stack.push(f);
            }
        }
    }
    Ok(Factorization {
        sign,
        factors: map.into_iter().collect(),
    })
}

/// Miller-Rabin with a fixed base set; deterministic well past 2^81 and
/// backed by a strong base-2 + extra-bases test for the 2^96 tail.
pub fn is_prime(n: &Int) -> bool {
    if n < &int(2) {
        return false;
    }
    for p in [2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let p = int(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_1: Int = n - 1;
    let s = n_minus_1.trailing_zeros().unwrap();
    let d = &n_minus_1 >> s;
    'bases: for a in [2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = int(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = x.modpow(&int(2), n);
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &Int) -> Int {
    if n.is_even() {
        return int(2);
    }
    let mut c = int(1);
    loop {
        let mut x = int(2);
        let mut y = int(2);
        let mut d = int(1);
        while d.is_one() {
            x = (&x * &x + &c) % n;
            y = (&y * &y + &c) % n;
            y = (&y * &y + &c) % n;
            let diff = (&x - &y).abs();
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
        }
        if !d.is_one() && &d != n {
            return d;
        }
        c += 1;
    }
}

/// A finite exponential polynomial `sum_i c_i * b_i^(-s)` with rational
/// coefficients and positive rational bases. Zero coefficients are never
/// stored; bases are unique.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpPoly {
    terms: BTreeMap<Rat, Rat>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly::default()
    }

    pub fn one() -> Self {
        ExpPoly::term(Rat::one(), Rat::one())
    }

    /// The single term `coeff * base^(-s)`. Panics on a nonpositive base.
    pub fn term(coeff: Rat, base: Rat) -> Self {
        assert!(base.is_positive(), "ExpPoly base must be positive");
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(base, coeff);
        }
        ExpPoly { terms }
    }

    pub fn is_one(&self) -> bool {
        self == &ExpPoly::one()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut terms = self.terms.clone();
        for (b, c) in &other.terms {
            let entry = terms.entry(b.clone()).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(b);
            }
        }
        ExpPoly { terms }
    }

    pub fn scale(&self, k: &Rat) -> ExpPoly {
        if k.is_zero() {
            return ExpPoly::zero();
        }
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|(b, c)| (b.clone(), c * k))
                .collect(),
        }
    }

    pub fn sub(&self, other: &ExpPoly) -> ExpPoly {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut terms: BTreeMap<Rat, Rat> = BTreeMap::new();
        for (b1, c1) in &self.terms {
            for (b2, c2) in &other.terms {
                let b = b1 * b2;
                let entry = terms.entry(b.clone()).or_insert_with(Rat::zero);
                *entry += c1 * c2;
                if entry.is_zero() {
                    terms.remove(&b);
                }
            }
        }
        ExpPoly { terms }
    }

    /// The substitution s -> 1-s: each term (c, b) becomes (c/b, 1/b).
    pub fn reflect(&self) -> ExpPoly {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|(b, c)| (b.recip(), c / b))
                .collect(),
        }
    }

    /// Exact evaluation at an integer point s.
    pub fn eval_int(&self, s: i64) -> Rat {
        let mut acc = Rat::zero();
        for (b, c) in &self.terms {
            acc += c * pow_rat(b, -s);
        }
        acc
    }

    /// Numerical evaluation at a complex point.
    pub fn eval_complex(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, c) in &self.terms {
            let lb = rat_to_f64(b).ln();
            acc += Complex64::new(rat_to_f64(c), 0.0) * (-s * lb).exp();
        }
        acc
    }
}

fn pow_rat(b: &Rat, e: i64) -> Rat {
    if e >= 0 {
        b.pow(e as i32)
    } else {
        b.recip().pow((-e) as i32)
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
}

/// "num/den" rendering used by every JSON surface.
pub fn rat_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn serialize_rat<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rat_string(r))
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(b, c)| format!("({})*({})^-s", rat_string(c), rat_string(b)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for ExpPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term {
            base: String,
            coeff: String,
        }
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (b, c) in &self.terms {
            seq.serialize_element(&Term {
                base: rat_string(b),
                coeff: rat_string(c),
            })?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Pow;

    fn brute_legendre(a: i64, p: i64) -> i32 {
        // quadratic residue enumeration mod an odd prime
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        for x in 1..p {
            if (x * x) % p == a {
                return 1;
            }
        }
        -1
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(&int(5), &int(3)), -1);
        assert_eq!(brute_legendre(5, 3), -1);
        assert_eq!(kronecker(&int(2), &int(7)), 1);
        assert_eq!(brute_legendre(2, 7), 1);
        for a in -30..30 {
            assert_eq!(kronecker(&int(a), &int(1)), 1);
        }
    }

    #[test]
    fn kronecker_matches_legendre_for_odd_primes() {
        for p in [3i64, 5, 7, 11, 13, 17, 19, 23] {
            for a in -50..50 {
                assert_eq!(kronecker(&int(a), &int(p)), brute_legendre(a, p), "({a}/{p})");
            }
        }
    }

    #[test]
    fn kronecker_multiplicative_in_bottom() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a: i64 = rng.gen_range(-500..500);
            let m: i64 = rng.gen_range(-60..60);
            let n: i64 = rng.gen_range(-60..60);
            assert_eq!(
                kronecker(&int(a), &int(m * n)),
                kronecker(&int(a), &int(m)) * kronecker(&int(a), &int(n)),
                "a={a} m={m} n={n}"
            );
            assert_eq!(kronecker_i64(a, m), kronecker(&int(a), &int(m)));
        }
    }

    #[test]
    fn factor_examples() {
        let f = factor(&int(45)).unwrap();
        assert_eq!(f.sign, 1);
        assert_eq!(f.factors, vec![(int(3), 2), (int(5), 1)]);
        let f = factor(&int(-4)).unwrap();
        assert_eq!(f.sign, -1);
        assert_eq!(f.factors, vec![(int(2), 2)]);
        let f = factor(&int(1)).unwrap();
        assert!(f.factors.is_empty());
        assert!(factor(&int(0)).is_err());
        // reconstruction
        for n in [-1000i64, 97 * 89, 1 << 40, -3 * 5 * 7 * 11 * 13] {
            assert_eq!(factor(&int(n)).unwrap().value(), int(n));
        }
        let big: Int = int(1_000_003) * int(999_999_937) * int(1_000_000_007);
        assert_eq!(factor(&big).unwrap().value(), big);
        assert!(factor(&(Int::one() << 97)).is_err());
    }

    #[test]
    fn expoly_mul_identities() {
        let p = ExpPoly::term(rat(2, 3), rat(5, 1)).add(&ExpPoly::one());
        assert_eq!(ExpPoly::one().mul(&p), p);
        let two = ExpPoly::term(Rat::one(), rat(2, 1));
        assert_eq!(two.mul(&two), ExpPoly::term(Rat::one(), rat(4, 1)));
        let a = ExpPoly::one().sub(&ExpPoly::term(Rat::one(), rat(3, 1)));
        let b = ExpPoly::one().add(&ExpPoly::term(Rat::one(), rat(3, 1)));
        assert_eq!(
            a.mul(&b),
            ExpPoly::one().sub(&ExpPoly::term(Rat::one(), rat(9, 1)))
        );
    }

    #[test]
    fn reflect_examples() {
        let t = ExpPoly::term(rat(3, 1), rat(9, 1));
        assert_eq!(t.reflect(), ExpPoly::term(rat(1, 3), rat(1, 9)));
        let c = ExpPoly::term(rat(7, 2), Rat::one());
        assert_eq!(c.reflect(), c);
    }

    #[test]
    fn eval_int_matches_terms() {
        // 1 - 3^{-s} at s=1 is 2/3; at s=-2 it is 1-9 = -8.
        let p = ExpPoly::one().sub(&ExpPoly::term(Rat::one(), rat(3, 1)));
        assert_eq!(p.eval_int(1), rat(2, 3));
        assert_eq!(p.eval_int(-2), rat(-8, 1));
    }

    #[test]
    fn serialization_shape() {
        let p = ExpPoly::term(rat(1, 3), rat(1, 9)).add(&ExpPoly::one());
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[{"base":"1/9","coeff":"1/3"},{"base":"1/1","coeff":"1/1"}]"#);
    }

    proptest::proptest! {
        #[test]
        fn reflect_is_involutive(coeffs in proptest::collection::vec((1i64..50, 1i64..50, -20i64..20), 1..6)) {
            let mut p = ExpPoly::zero();
            for (n, d, c) in coeffs {
                if c != 0 {
                    p = p.add(&ExpPoly::term(rat(c, 1), rat(n, d)));
                }
            }
            proptest::prop_assert_eq!(p.reflect().reflect(), p);
        }

        #[test]
        fn eval_is_ring_hom(a in 1i64..20, b in 1i64..20, c in -9i64..9, d in -9i64..9, t in -30i64..30) {
            let s = Complex64::new(0.5, t as f64 / 10.0);
            let p = ExpPoly::term(rat(c.max(1), 1), rat(a, 1)).add(&ExpPoly::one());
            let q = ExpPoly::term(rat(d.max(1), 1), rat(b, 2)).add(&ExpPoly::one());
            let lhs = p.mul(&q).eval_complex(s);
            let rhs = p.eval_complex(s) * q.eval_complex(s);
            proptest::prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }

        #[test]
        fn reflect_evaluates_at_one_minus_s(a in 1i64..30, n in 1i64..30, d in 1i64..30, t in -20i64..20) {
            let s = Complex64::new(0.3, t as f64 / 7.0);
            let p = ExpPoly::term(rat(a, 3), rat(n, d)).add(&ExpPoly::one());
            let lhs = p.reflect().eval_complex(s);
            let rhs = p.eval_complex(Complex64::new(1.0, 0.0) - s);
            proptest::prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn pow_rat_negative() {
        assert_eq!(pow_rat(&rat(2, 3), -2), rat(9, 4));
        assert_eq!(rat(2, 3).pow(2i32), rat(4, 9));
    }
}
