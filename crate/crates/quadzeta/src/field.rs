//! Base fields Q and Q(sqrt m): ring-of-integers arithmetic, prime
//! splitting, local valuations and square classes (including the wild primes
//! over 2), the conductor ideal S_delta, and the congruence conditions that
//! characterize its divisors.
//!
//! Elements are written over the integral basis {1, w} with w = sqrt(m) for
//! m = 2, 3 mod 4 and w = (1 + sqrt(m))/2 for m = 1 mod 4, so that
//! w^2 = t*w + n0 with (t, n0) = (0, m) or (1, (m-1)/4).

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::exact::{factor, int, kronecker, Int};
use crate::{Error, Result};

pub fn val_p_int(n: &Int, p: &Int) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let mut v = 0u64;
    let mut m = n.abs();
    while (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    Some(v)
}

pub(crate) fn inv_mod(a: &Int, n: &Int) -> Int {
    let g = a.extended_gcd(n);
    debug_assert!(g.gcd.is_one(), "inverse of non-unit mod {}", n);
    g.x.mod_floor(n)
}

/// Square root mod an odd prime; the input must be a quadratic residue.
pub(crate) fn sqrt_mod_p(a: &Int, p: &Int) -> Int {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return a;
    }
    if (p % 4u32) == int(3) {
        return a.modpow(&((p + 1) / 4), p);
    }
    let mut s = 0u64;
    let mut q: Int = p - 1;
    while q.is_even() {
        q /= 2;
        s += 1;
    }
    let mut z = int(2);
    while kronecker(&z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1) / 2), p);
    while !t.is_one() {
        let mut i = 0u64;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let b = c.modpow(&(Int::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    r
}

fn is_squarefree(m: i64) -> bool {
    let f = match factor(&int(m)) {
        Ok(f) => f,
        Err(_) => return true,
    };
    f.factors.iter().all(|(_, e)| *e == 1)
}

/// K = Q or K = Q(sqrt m), m squarefree and different from 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BaseField {
    m: i64,
    t: i64,
    n0: i64,
    disc: i64,
}

impl BaseField {
    pub fn rational() -> BaseField {
        BaseField { m: 0, t: 0, n0: 0, disc: 1 }
    }

    pub fn quadratic(m: i64) -> Result<BaseField> {
        if m == 0 || m == 1 {
            return Err(Error::Invalid(format!("m = {} does not define a quadratic field", m)));
        }
        if !is_squarefree(m) {
            return Err(Error::Invalid(format!("m = {} is not squarefree", m)));
        }
        if m.rem_euclid(4) == 1 {
            Ok(BaseField { m, t: 1, n0: (m - 1) / 4, disc: m })
        } else {
            Ok(BaseField { m, t: 0, n0: m, disc: 4 * m })
        }
    }

    pub fn is_rational(&self) -> bool {
        self.m == 0
    }

    pub fn degree(&self) -> u32 {
        if self.is_rational() { 1 } else { 2 }
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn omega_trace(&self) -> i64 {
        self.t
    }

    pub fn omega_relation(&self) -> (i64, i64) {
        (self.t, self.n0)
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "Q")
        } else {
            write!(f, "Q(sqrt:{})", self.m)
        }
    }
}

pub fn parse_field(s: &str) -> Result<BaseField> {
    let s = s.trim();
    if s == "Q" {
        return Ok(BaseField::rational());
    }
    if let Some(body) = s.strip_prefix("Q(sqrt:").and_then(|r| r.strip_suffix(')')) {
        let m: i64 = body
            .parse()
            .map_err(|_| Error::Invalid(format!("bad field spec {:?}", s)))?;
        return BaseField::quadratic(m);
    }
    Err(Error::Invalid(format!("bad field spec {:?} (expected Q or Q(sqrt:m))", s)))
}

/// An element a + b*w of the ring of integers; b = 0 over Q.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraicInt {
    pub a: Int,
    pub b: Int,
}

impl AlgebraicInt {
    pub fn new(a: Int, b: Int) -> AlgebraicInt {
        AlgebraicInt { a, b }
    }

    pub fn from_int(a: Int) -> AlgebraicInt {
        AlgebraicInt { a, b: Int::zero() }
    }

    pub fn from_i64(a: i64) -> AlgebraicInt {
        AlgebraicInt::from_int(int(a))
    }

    pub fn zero() -> AlgebraicInt {
        AlgebraicInt::from_i64(0)
    }

    pub fn one() -> AlgebraicInt {
        AlgebraicInt::from_i64(1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &AlgebraicInt) -> AlgebraicInt {
        AlgebraicInt::new(&self.a + &o.a, &self.b + &o.b)
    }

    pub fn sub(&self, o: &AlgebraicInt) -> AlgebraicInt {
        AlgebraicInt::new(&self.a - &o.a, &self.b - &o.b)
    }

    pub fn neg(&self) -> AlgebraicInt {
        AlgebraicInt::new(-&self.a, -&self.b)
    }

    pub fn scale(&self, k: &Int) -> AlgebraicInt {
        AlgebraicInt::new(&self.a * k, &self.b * k)
    }

    pub fn mul(&self, o: &AlgebraicInt, field: &BaseField) -> AlgebraicInt {
        let t = int(field.t);
        let n0 = int(field.n0);
        let a = &self.a * &o.a + &self.b * &o.b * n0;
        let b = &self.a * &o.b + &self.b * &o.a + &self.b * &o.b * t;
        AlgebraicInt::new(a, b)
    }

    pub fn pow(&self, e: u32, field: &BaseField) -> AlgebraicInt {
        let mut acc = AlgebraicInt::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, field);
            }
            base = base.mul(&base, field);
            e >>= 1;
        }
        acc
    }

    pub fn conj(&self, field: &BaseField) -> AlgebraicInt {
        // w maps to t - w
        AlgebraicInt::new(&self.a + &self.b * int(field.t), -&self.b)
    }

    pub fn norm(&self, field: &BaseField) -> Int {
        if field.is_rational() {
            self.a.clone()
        } else {
            &self.a * &self.a + &self.a * &self.b * int(field.t)
                - &self.b * &self.b * int(field.n0)
        }
    }

    pub fn trace(&self, field: &BaseField) -> Int {
        if field.is_rational() {
            self.a.clone()
        } else {
            int(2) * &self.a + &self.b * int(field.t)
        }
    }
}

impl fmt::Display for AlgebraicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*w", self.b)
        } else if self.b.is_negative() {
            write!(f, "{}{}*w", self.a, self.b)
        } else {
            write!(f, "{}+{}*w", self.a, self.b)
        }
    }
}

pub fn parse_element(s: &str, field: &BaseField) -> Result<AlgebraicInt> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Invalid("empty element".into()));
    }
    let bad = || Error::Invalid(format!("bad element {:?}", s));
    let chars: Vec<char> = compact.chars().collect();
    let mut terms: Vec<String> = vec![String::new()];
    for (i, &ch) in chars.iter().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && (chars[i - 1].is_ascii_digit() || chars[i - 1] == 'w') {
            terms.push(String::new());
        }
        if !(ch == '+' && terms.last().unwrap().is_empty()) {
            terms.last_mut().unwrap().push(ch);
        }
    }
    if terms.len() > 2 {
        return Err(bad());
    }
    let mut a = Int::zero();
    let mut b = Int::zero();
    let mut seen_a = false;
    let mut seen_b = false;
    for term in terms {
        if let Some(coeff) = term.strip_suffix('w') {
            if seen_b {
                return Err(bad());
            }
            seen_b = true;
            let coeff = coeff.strip_suffix('*').unwrap_or(coeff);
            b = match coeff {
                "" => Int::one(),
                "-" => -Int::one(),
                c => c.parse().map_err(|_| bad())?,
            };
        } else {
            if seen_a {
                return Err(bad());
            }
            seen_a = true;
            a = term.parse().map_err(|_| bad())?;
        }
    }
    if field.is_rational() && !b.is_zero() {
        return Err(Error::Invalid(format!("element {:?} has a w-part over Q", s)));
    }
    Ok(AlgebraicInt::new(a, b))
}

/// All ring elements with both coordinates in [0, k); representatives of
/// the quotient by k when k is a power of the residue characteristic.
pub fn coords_mod(field: &BaseField, k: i64) -> Vec<AlgebraicInt> {
    if field.is_rational() {
        (0..k).map(AlgebraicInt::from_i64).collect()
    } else {
        (0..k)
            .flat_map(|a| (0..k).map(move |b| AlgebraicInt::new(int(a), int(b))))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

impl SplitType {
    pub fn chi(self) -> i32 {
        match self {
            SplitType::Split => 1,
            SplitType::Inert => -1,
            SplitType::Ramified => 0,
        }
    }
}

impl fmt::Display for SplitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SplitType::Split => "split",
            SplitType::Inert => "inert",
            SplitType::Ramified => "ramified",
        };
        write!(f, "{}", s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeKind {
    Rational,
    /// The root of x^2 - t*x - n0 mod p distinguishing this prime from its
    /// conjugate; lifted to higher precision on demand.
    Split { root: Int },
    Inert,
    Ramified,
}

/// A prime q of O_K lying over the rational prime p, with its valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalPrimeData {
    pub field: BaseField,
    pub p: Int,
    pub e: u32,
    pub f: u32,
    pub kind: PrimeKind,
    pub uniformizer: AlgebraicInt,
}

pub fn primes_above(field: &BaseField, p: &Int) -> Vec<LocalPrimeData> {
    if field.is_rational() {
        return vec![LocalPrimeData {
            field: *field,
            p: p.clone(),
            e: 1,
            f: 1,
            kind: PrimeKind::Rational,
            uniformizer: AlgebraicInt::from_int(p.clone()),
        }];
    }
    let mk = |e, f, kind, uniformizer| LocalPrimeData {
        field: *field,
        p: p.clone(),
        e,
        f,
        kind,
        uniformizer,
    };
    let pi_p = AlgebraicInt::from_int(p.clone());
    if p == &int(2) {
        return match field.m.rem_euclid(8) {
            1 => vec![
                mk(1, 1, PrimeKind::Split { root: Int::zero() }, pi_p.clone()),
                mk(1, 1, PrimeKind::Split { root: Int::one() }, pi_p),
            ],
            5 => vec![mk(1, 2, PrimeKind::Inert, pi_p)],
            2 | 6 => vec![mk(2, 1, PrimeKind::Ramified, AlgebraicInt::new(int(0), int(1)))],
            _ => vec![mk(2, 1, PrimeKind::Ramified, AlgebraicInt::new(int(1), int(1)))],
        };
    }
    match kronecker(&int(field.disc), p) {
        1 => {
            // roots (t +- sqrt(disc))/2 of x^2 - t*x - n0 mod p
            let s = sqrt_mod_p(&int(field.t * field.t + 4 * field.n0), p);
            let inv2 = inv_mod(&int(2), p);
            let r1 = ((int(field.t) + &s) * &inv2).mod_floor(p);
            let r2 = ((int(field.t) - &s) * &inv2).mod_floor(p);
            let mut primes = vec![
                mk(1, 1, PrimeKind::Split { root: r1.clone() }, pi_p.clone()),
                mk(1, 1, PrimeKind::Split { root: r2.clone() }, pi_p),
            ];
            primes.sort_by(|x, y| split_root(x).cmp(split_root(y)));
            debug_assert_ne!(r1, r2);
            primes
        }
        -1 => vec![mk(1, 2, PrimeKind::Inert, pi_p)],
        _ => {
            let pi = if field.t == 0 {
                AlgebraicInt::new(int(0), int(1))
            } else {
                // 2w - 1 = sqrt(m)
                AlgebraicInt::new(int(-1), int(2))
            };
            vec![mk(2, 1, PrimeKind::Ramified, pi)]
        }
    }
}

fn split_root(q: &LocalPrimeData) -> &Int {
    match &q.kind {
        PrimeKind::Split { root } => root,
        _ => unreachable!(),
    }
}

impl LocalPrimeData {
    pub fn residue_size(&self) -> Int {
        Pow::pow(&self.p, self.f)
    }

    pub fn is_wild(&self) -> bool {
        self.p == int(2)
    }

    /// Hensel-lift the stored split root to a root mod p^prec.
    fn lift_root(&self, prec: u32) -> Int {
        let root = split_root(self);
        let t = int(self.field.t);
        let n0 = int(self.field.n0);
        let mut r = root.clone();
        let mut k = 1u32;
        while k < prec {
            k = (2 * k).min(prec);
            let pk = Pow::pow(&self.p, k);
            let g = (&r * &r - &t * &r - &n0).mod_floor(&pk);
            let gp = (int(2) * &r - &t).mod_floor(&pk);
            r = (r - g * inv_mod(&gp, &pk)).mod_floor(&pk);
        }
        r
    }

    /// The q-adic valuation of a nonzero element; None for zero.
    pub fn val(&self, x: &AlgebraicInt) -> Option<u64> {
        if x.is_zero() {
            return None;
        }
        match &self.kind {
            PrimeKind::Rational => val_p_int(&x.a, &self.p),
            PrimeKind::Inert => {
                let va = val_p_int(&x.a, &self.p);
                let vb = val_p_int(&x.b, &self.p);
                match (va, vb) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (v, None) | (None, v) => v,
                }
            }
            PrimeKind::Ramified => val_p_int(&x.norm(&self.field), &self.p),
            PrimeKind::Split { .. } => {
                let bound = val_p_int(&x.norm(&self.field), &self.p).unwrap() as u32 + 2;
                let r = self.lift_root(bound);
                let pk = Pow::pow(&self.p, bound);
                let c = (&x.a + &x.b * &r).mod_floor(&pk);
                val_p_int(&c, &self.p)
            }
        }
    }

    pub fn val_at_least(&self, x: &AlgebraicInt, bound: u64) -> bool {
        match self.val(x) {
            None => true,
            Some(v) => v >= bound,
        }
    }

    /// Quadratic residue symbol of the unit part of x, for odd residue
    /// characteristic; a = val(x) must be even.
    fn odd_unit_symbol(&self, x: &AlgebraicInt, a: u64) -> i32 {
        let p = &self.p;
        let pa = Pow::pow(p, a as u32);
        match &self.kind {
            PrimeKind::Rational => {
                let u = (&x.a / &pa).mod_floor(p);
                kronecker(&u, p)
            }
            PrimeKind::Split { .. } => {
                let prec = a as u32 + 2;
                let r = self.lift_root(prec);
                let pk = Pow::pow(p, prec);
                let c = (&x.a + &x.b * &r).mod_floor(&pk);
                let u = (&c / &pa).mod_floor(p);
                kronecker(&u, p)
            }
            PrimeKind::Inert => {
                let ra = (&x.a / &pa).mod_floor(p);
                let rb = (&x.b / &pa).mod_floor(p);
                let exp = (Pow::pow(p, 2u32) - 1) / 2;
                let res = self.fp2_pow((ra, rb), &exp);
                if res == (Int::one(), Int::zero()) {
                    1
                } else {
                    -1
                }
            }
            PrimeKind::Ramified => {
                let cpi = self.uniformizer.conj(&self.field);
                let z = x.mul(&cpi.pow(a as u32, &self.field), &self.field);
                let za = &z.a / &pa;
                let zb = &z.b / &pa;
                // residue of w in O/q: 0 when w = sqrt(m), 1/2 when
                // w = (1+sqrt(m))/2
                let w0 = if self.field.t == 0 {
                    Int::zero()
                } else {
                    (p + 1) / 2
                };
                let red = (za + zb * w0).mod_floor(p);
                kronecker(&red, p)
            }
        }
    }

    fn fp2_mul(&self, x: &(Int, Int), y: &(Int, Int)) -> (Int, Int) {
        let p = &self.p;
        let t = int(self.field.t);
        let n0 = int(self.field.n0);
        let a = (&x.0 * &y.0 + &x.1 * &y.1 * &n0).mod_floor(p);
        let b = (&x.0 * &y.1 + &x.1 * &y.0 + &x.1 * &y.1 * &t).mod_floor(p);
        (a, b)
    }

    fn fp2_pow(&self, base: (Int, Int), exp: &Int) -> (Int, Int) {
        let mut acc = (Int::one(), Int::zero());
        let mut base = base;
        let mut e = exp.clone();
        while e.is_positive() {
            if e.is_odd() {
                acc = self.fp2_mul(&acc, &base);
            }
            base = self.fp2_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Witness y with delta = y^2 * pi^{2r} mod 4 O_{K_q}; wild primes only.
    pub fn square_mod4_witness(&self, delta: &AlgebraicInt, r: u32) -> Option<AlgebraicInt> {
        debug_assert!(self.is_wild());
        let pir = self.uniformizer.pow(2 * r, &self.field);
        let bound = 2 * r as u64 + 2 * self.e as u64;
        coords_mod(&self.field, 4).into_iter().find(|y| {
            let cand = delta.sub(&y.mul(y, &self.field).mul(&pir, &self.field));
            self.val_at_least(&cand, bound)
        })
    }

    /// Representatives of the residue field O/q inside O_K.
    pub fn residue_reps(&self) -> Vec<AlgebraicInt> {
        if self.f == 1 {
            let p = self.p.to_i64().expect("small residue characteristic");
            (0..p).map(AlgebraicInt::from_i64).collect()
        } else {
            let p = self.p.to_i64().expect("small residue characteristic");
            (0..p)
                .flat_map(|a| (0..p).map(move |b| AlgebraicInt::new(int(a), int(b))))
                .collect()
        }
    }
}

/// Whether x is a square in the completion K_q.
pub fn is_local_square(x: &AlgebraicInt, q: &LocalPrimeData) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    let a = q.val(x).unwrap();
    if a % 2 == 1 {
        return Ok(false);
    }
    if q.is_wild() {
        let pia = q.uniformizer.pow(a as u32, &q.field);
        let bound = a + 2 * q.e as u64 + 1;
        Ok(coords_mod(&q.field, 8).into_iter().any(|y| {
            let cand = x.sub(&y.mul(&y, &q.field).mul(&pia, &q.field));
            q.val_at_least(&cand, bound)
        }))
    } else {
        Ok(q.odd_unit_symbol(x, a) == 1)
    }
}

/// Whether delta is a square in K (not merely in a completion).
pub fn is_square(delta: &AlgebraicInt, field: &BaseField) -> bool {
    if delta.is_zero() {
        return true;
    }
    let perfect = |n: &Int| -> Option<Int> {
        if n.is_negative() {
            return None;
        }
        let s = n.sqrt();
        if &(&s * &s) == n {
            Some(s)
        } else {
            None
        }
    };
    if field.is_rational() {
        return perfect(&delta.a).is_some();
    }
    let n = delta.norm(field);
    if let Some(s) = perfect(&n) {
        for eps in [1i64, -1] {
            let tr2 = delta.trace(field) + int(2 * eps) * &s;
            if let Some(tr) = perfect(&tr2) {
                let num = AlgebraicInt::new(&delta.a + int(eps) * &s, delta.b.clone());
                for t in [tr.clone(), -tr] {
                    if t.is_zero() {
                        continue;
                    }
                    if (&num.a % &t).is_zero() && (&num.b % &t).is_zero() {
                        let z = AlgebraicInt::new(&num.a / &t, &num.b / &t);
                        if z.mul(&z, field) == *delta {
                            return true;
                        }
                    }
                }
            }
        }
    }
    // rational delta of the shape k^2 * m, a square via k*sqrt(m)
    if delta.b.is_zero() {
        let m = int(field.m);
        if (&delta.a % &m).is_zero() {
            let quot = &delta.a / &m;
            if perfect(&quot).is_some() {
                return true;
            }
        }
    }
    false
}

/// Whether delta is congruent to a square modulo 4 O_K.
pub fn in_square_class_mod4(delta: &AlgebraicInt, field: &BaseField) -> bool {
    coords_mod(field, 4).into_iter().any(|y| {
        let d = delta.sub(&y.mul(&y, field));
        (&d.a % 4u32).is_zero() && (&d.b % 4u32).is_zero()
    })
}

fn check_delta(delta: &AlgebraicInt, field: &BaseField) -> Result<()> {
    if delta.is_zero() {
        return Err(Error::ZeroInput);
    }
    if is_square(delta, field) {
        return Err(Error::SquareDelta);
    }
    if !in_square_class_mod4(delta, field) {
        return Err(Error::NotSquareMod4);
    }
    Ok(())
}

/// Splitting of q in K(sqrt(delta)) together with n_q = val_q(S_delta).
pub fn local_split_type(delta: &AlgebraicInt, q: &LocalPrimeData) -> Result<(SplitType, u32)> {
    let field = q.field;
    check_delta(delta, &field)?;
    let a = q.val(delta).unwrap();
    if !q.is_wild() {
        let n = (a / 2) as u32;
        if a % 2 == 1 {
            return Ok((SplitType::Ramified, n));
        }
        return if q.odd_unit_symbol(delta, a) == 1 {
            Ok((SplitType::Split, n))
        } else {
            Ok((SplitType::Inert, n))
        };
    }
    // wild prime: largest r with delta / pi^{2r} a square mod 4
    let mut found = None;
    for r in (0..=(a / 2) as u32).rev() {
        if let Some(y) = q.square_mod4_witness(delta, r) {
            found = Some((r, y));
            break;
        }
    }
    let (n, y) = found.ok_or_else(|| {
        Error::IdentityViolation(format!("{} lost its square class mod 4 at p=2", delta))
    })?;
    if a > 2 * n as u64 {
        return Ok((SplitType::Ramified, n));
    }
    // delta = y^2 pi^{2n} (1 + 4t'); decide by the Artin-Schreier equation
    // z^2 + z = t' in the residue field
    let pi2n = q.uniformizer.pow(2 * n, &field);
    let ysq = y.mul(&y, &field);
    let lead = ysq.mul(&pi2n, &field);
    let aa = delta.sub(&lead);
    let bb = lead.scale(&int(4));
    let bound = 2 * n as u64 + 2 * q.e as u64 + 1;
    let mut class = None;
    for (idx, c) in q.residue_reps().iter().enumerate() {
        let cand = aa.sub(&c.mul(&bb, &field));
        if q.val_at_least(&cand, bound) {
            class = Some(idx);
            break;
        }
    }
    let idx = class.ok_or_else(|| {
        Error::IdentityViolation(format!("no Artin-Schreier residue for {} at p=2", delta))
    })?;
    // image of z -> z^2 + z is {0} in F_2 and {0, 1} in F_4
    let split = if q.f == 1 { idx == 0 } else { idx <= 1 };
    Ok(if split {
        (SplitType::Split, n)
    } else {
        (SplitType::Inert, n)
    })
}

/// An integral ideal in factored form over the primes of O_K.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IdealData {
    pub factors: Vec<(LocalPrimeData, u32)>,
}

impl IdealData {
    pub fn unit() -> IdealData {
        IdealData::default()
    }

    pub fn norm(&self) -> Int {
        let mut n = Int::one();
        for (q, e) in &self.factors {
            n *= Pow::pow(&q.residue_size(), *e);
        }
        n
    }

    pub fn exponent_of(&self, q: &LocalPrimeData) -> u32 {
        self.factors
            .iter()
            .find(|(r, _)| r == q)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn divides(&self, other: &IdealData) -> bool {
        self.factors
            .iter()
            .all(|(q, e)| *e <= other.exponent_of(q))
    }

    /// All divisors, as exponent vectors below this ideal's.
    pub fn divisors(&self) -> Vec<IdealData> {
        let mut out = vec![IdealData::unit()];
        for (q, e) in &self.factors {
            let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
            for d in &out {
                for k in 0..=*e {
                    let mut f = d.clone();
                    if k > 0 {
                        f.factors.push((q.clone(), k));
                    }
                    next.push(f);
                }
            }
            out = next;
        }
        out
    }
}

impl Serialize for IdealData {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            p: String,
            e: u32,
            f: u32,
            exp: u32,
        }
        let mut seq = serializer.serialize_seq(Some(self.factors.len()))?;
        for (q, exp) in &self.factors {
            seq.serialize_element(&Entry {
                p: q.p.to_string(),
                e: q.e,
                f: q.f,
                exp: *exp,
            })?;
        }
        seq.end()
    }
}

/// The conductor-like ideal S_delta with S^2 = disc(delta) / disc(K(sqrt
/// delta)/K), assembled from the local data at every prime dividing (delta).
pub fn s_delta(delta: &AlgebraicInt, field: &BaseField) -> Result<IdealData> {
    check_delta(delta, field)?;
    let nrm = delta.norm(field);
    let fac = factor(&nrm)?;
    let mut factors = vec![];
    for (p, _) in &fac.factors {
        for q in primes_above(field, p) {
            let a = q.val(delta).unwrap();
            if a < 2 && !q.is_wild() {
                continue;
            }
            let (_, n) = local_split_type(delta, &q)?;
            if n > 0 {
                factors.push((q, n));
            }
        }
    }
    Ok(IdealData { factors })
}

/// The congruence conditions: I^2 | (delta) and delta / pi^{2 val_q(I)} a
/// square mod 4 at every wild prime q. Divisor characterization of S_delta.
pub fn satisfies_congruence(ideal: &IdealData, delta: &AlgebraicInt, field: &BaseField) -> bool {
    for (q, r) in &ideal.factors {
        if !q.val_at_least(delta, 2 * *r as u64) {
            return false;
        }
    }
    for q in primes_above(field, &int(2)) {
        let r = ideal.exponent_of(&q);
        if r > 0 && q.square_mod4_witness(delta, r).is_none() {
            return false;
        }
    }
    true
}

/// A 2x2 matrix over O_K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2 {
    pub a11: AlgebraicInt,
    pub a12: AlgebraicInt,
    pub a21: AlgebraicInt,
    pub a22: AlgebraicInt,
}

impl Mat2 {
    pub fn trace(&self) -> AlgebraicInt {
        self.a11.add(&self.a22)
    }

    pub fn det(&self, field: &BaseField) -> AlgebraicInt {
        self.a11.mul(&self.a22, field).sub(&self.a12.mul(&self.a21, field))
    }

    /// trace^2 - 4 det, the invariant that determines the orbital data.
    pub fn delta(&self, field: &BaseField) -> AlgebraicInt {
        let t = self.trace();
        t.mul(&t, field).sub(&self.det(field).scale(&int(4)))
    }
}

/// A companion-style matrix [[r, 1], [m, 0]] with trace^2 - 4 det = delta.
pub fn delta_to_matrix(delta: &AlgebraicInt, field: &BaseField) -> Result<Mat2> {
    check_delta(delta, field)?;
    for y in coords_mod(field, 4) {
        let d = delta.sub(&y.mul(&y, field));
        if (&d.a % 4u32).is_zero() && (&d.b % 4u32).is_zero() {
            let m = AlgebraicInt::new(&d.a / 4, &d.b / 4);
            return Ok(Mat2 {
                a11: y,
                a12: AlgebraicInt::one(),
                a21: m,
                a22: AlgebraicInt::zero(),
            });
        }
    }
    Err(Error::NotSquareMod4)
}

/// Exhaustively verifies that X^2 - pi^t u = Y^2 has no solution mod 4 at a
/// wild prime, for odd t below 2e.
pub fn no_solution_witness(q: &LocalPrimeData, t: u32, u: &AlgebraicInt) -> Result<bool> {
    if !q.is_wild() {
        return Err(Error::Invalid("witness only applies over 2".into()));
    }
    if t % 2 == 0 || t == 0 || t > 2 * q.e - 1 {
        return Err(Error::Invalid(format!("t = {} out of range for e = {}", t, q.e)));
    }
    if q.val(u) != Some(0) {
        return Err(Error::Invalid(format!("u = {} is not a unit at q", u)));
    }
    let target = q.uniformizer.pow(t, &q.field).mul(u, &q.field);
    let bound = 2 * q.e as u64;
    let reps = coords_mod(&q.field, 4);
    for x in &reps {
        let x2 = x.mul(x, &q.field);
        for y in &reps {
            let cand = x2.sub(&target).sub(&y.mul(y, &q.field));
            if q.val_at_least(&cand, bound) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
