//! The global orbital series O(s, gamma, f) as a finite product of local
//! J-tilde factors over the primes dividing S_delta, its divisor-sum
//! expansion and functional equation, the rational value at s = 1, and the
//! p^{-k/2}-normalized elliptic weights.

use std::fmt;

use num_traits::{One, Pow, ToPrimitive};
use serde::Serialize;

use crate::exact::{int, rat, ExpPoly, Int, Rat};
use crate::field::{
    local_split_type, s_delta, AlgebraicInt, BaseField, IdealData,
    LocalPrimeData, Mat2, SplitType,
};
use crate::orderzeta::{jtilde, order_polynomial};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct GlobalOrbitalSeries {
    pub delta: AlgebraicInt,
    pub field: BaseField,
    pub s_delta: IdealData,
    /// (prime, splitting in K(sqrt delta), n_q) for each prime of S_delta.
    pub locals: Vec<(LocalPrimeData, SplitType, u32)>,
    pub product: ExpPoly,
}

pub fn global_series(delta: &AlgebraicInt, field: &BaseField) -> Result<GlobalOrbitalSeries> {
    let s = s_delta(delta, field)?;
    let mut locals = Vec::with_capacity(s.factors.len());
    let mut product = ExpPoly::one();
    for (q, n) in &s.factors {
        let (ty, n2) = local_split_type(delta, q)?;
        debug_assert_eq!(*n, n2);
        let qsize = q
            .residue_size()
            .to_u64()
            .ok_or_else(|| Error::Guard("residue size too large".into()))?;
        product = product.mul(&jtilde(&order_polynomial(ty, *n, qsize)));
        locals.push((q.clone(), ty, *n));
    }
    Ok(GlobalOrbitalSeries {
        delta: delta.clone(),
        field: *field,
        s_delta: s,
        locals,
        product,
    })
}

/// Entry point keyed on a matrix: only delta = trace^2 - 4 det matters.
pub fn matrix_series(gamma: &Mat2, field: &BaseField) -> Result<GlobalOrbitalSeries> {
    global_series(&gamma.delta(field), field)
}

impl GlobalOrbitalSeries {
    /// chi_delta at one of the primes of S_delta.
    fn chi(&self, q: &LocalPrimeData) -> i32 {
        self.locals
            .iter()
            .find(|(r, _, _)| r == q)
            .map(|(_, ty, _)| ty.chi())
            .unwrap_or(0)
    }
}

/// N(S)^s sum over divisors d of S of N(d)^{1-2s} prod over primes of S/d
/// of (1 - chi(q) N(q)^{-s}); must equal the product of local factors.
pub fn divisor_expansion(series: &GlobalOrbitalSeries) -> ExpPoly {
    let ns = series.s_delta.norm();
    let mut sum = ExpPoly::zero();
    for d in series.s_delta.divisors() {
        let nd = d.norm();
        let mut term = ExpPoly::term(Rat::from(nd.clone()), Rat::from(&nd * &nd));
        for (q, n) in &series.s_delta.factors {
            if d.exponent_of(q) < *n {
                let chi = series.chi(q);
                let nq = Rat::from(q.residue_size());
                term = term.mul(&ExpPoly::one().sub(&ExpPoly::term(rat(chi as i64, 1), nq)));
            }
        }
        sum = sum.add(&term);
    }
    // N(S)^s as the term with base 1/N(S)
    sum.mul(&ExpPoly::term(Rat::one(), Rat::from(ns).recip()))
}

/// The value at s = 1: sum over divisors d of S of N(d) prod over primes of
/// d of (1 - chi(q)/N(q)).
pub fn langlands_value(series: &GlobalOrbitalSeries) -> Rat {
    let mut sum = Rat::from(Int::from(0));
    for d in series.s_delta.divisors() {
        let mut term = Rat::from(d.norm());
        for (q, _) in &d.factors {
            let chi = series.chi(q);
            term *= Rat::one() - rat(chi as i64, 1) / Rat::from(q.residue_size());
        }
        sum += term;
    }
    sum
}

/// An exact multiple of p^{-k/2}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedWeight {
    #[serde(serialize_with = "crate::exact::serialize_rat")]
    pub coeff: Rat,
    pub p: u64,
    pub k: u32,
}

impl NormalizedWeight {
    pub fn to_f64(&self) -> f64 {
        crate::exact::rat_to_f64(&self.coeff) * (self.p as f64).powf(-(self.k as f64) / 2.0)
    }
}

impl fmt::Display for NormalizedWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})*{}^(-{}/2)", crate::exact::rat_string(&self.coeff), self.p, self.k)
    }
}

/// The section-6 elliptic weight p^{-k/2} O(1, gamma) for the matrix with
/// characteristic polynomial X^2 - tau X + det_sign p^k over Q, so that
/// delta = tau^2 - 4 det_sign p^k.
pub fn normalized_elliptic_weight(
    tau: i64,
    p: u64,
    k: u32,
    det_sign: i8,
) -> Result<NormalizedWeight> {
    if !(det_sign == 1 || det_sign == -1) {
        return Err(Error::Invalid("det sign must be +1 or -1".into()));
    }
    let field = BaseField::rational();
    let pk: Int = Pow::pow(&int(p as i64), k);
    let delta = AlgebraicInt::from_int(int(tau) * int(tau) - int(4 * det_sign as i64) * &pk);
    let series = global_series(&delta, &field)?;
    Ok(NormalizedWeight {
        coeff: langlands_value(&series),
        p,
        k,
    })
}

/// Pseudo-random corpus of valid delta values over a base field: built as
/// y^2 + 4c so membership in the square class mod 4 is automatic; squares
/// are rejected.
pub fn random_delta_corpus(
    field: &BaseField,
    count: usize,
    coord_bound: i64,
    seed: u64,
) -> Vec<AlgebraicInt> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let pick = |rng: &mut rand_chacha::ChaCha8Rng| -> AlgebraicInt {
            if field.is_rational() {
                AlgebraicInt::from_i64(rng.gen_range(-coord_bound..=coord_bound))
            } else {
                AlgebraicInt::new(
                    int(rng.gen_range(-coord_bound..=coord_bound)),
                    int(rng.gen_range(-coord_bound..=coord_bound)),
                )
            }
        };
        let y = pick(&mut rng);
        let c = pick(&mut rng);
        let delta = y.mul(&y, field).add(&c.scale(&int(4)));
        if delta.is_zero() || crate::field::is_square(&delta, field) {
            continue;
        }
        out.push(delta);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{delta_to_matrix, SplitType};
    use crate::orderzeta::orbital_value;

    fn q() -> BaseField {
        BaseField::rational()
    }

    fn d(n: i64) -> AlgebraicInt {
        AlgebraicInt::from_i64(n)
    }

    #[test]
    fn series_examples() {
        let s45 = global_series(&d(45), &q()).unwrap();
        assert_eq!(s45.locals.len(), 1);
        assert_eq!(s45.locals[0].1, SplitType::Inert);
        assert_eq!(s45.product, jtilde(&order_polynomial(SplitType::Inert, 1, 3)));
        assert_eq!(langlands_value(&s45), rat(5, 1));

        let s5 = global_series(&d(5), &q()).unwrap();
        assert!(s5.product.is_one());
        assert_eq!(langlands_value(&s5), rat(1, 1));

        let s180 = global_series(&d(180), &q()).unwrap();
        assert_eq!(s180.locals.len(), 2);

        let s48 = global_series(&d(48), &q()).unwrap();
        assert_eq!(langlands_value(&s48), rat(3, 1));
    }

    #[test]
    fn value_is_product_of_orbital_values() {
        for delta in [45i64, 48, 180, -4, -12, 173, 1280, -311, 45 * 49] {
            let s = global_series(&d(delta), &q()).unwrap();
            assert_eq!(s.product.eval_int(1), langlands_value(&s), "delta={}", delta);
            let mut prod = Rat::one();
            for (qd, ty, n) in &s.locals {
                prod *= orbital_value(*ty, *n, qd.residue_size().to_u64().unwrap());
            }
            assert_eq!(prod, langlands_value(&s), "delta={}", delta);
        }
    }

    #[test]
    fn functional_equation_and_expansion_samples() {
        for field in [
            q(),
            BaseField::quadratic(-1).unwrap(),
            BaseField::quadratic(5).unwrap(),
            BaseField::quadratic(-5).unwrap(),
        ] {
            for delta in random_delta_corpus(&field, 25, 12, 17) {
                let s = global_series(&delta, &field).unwrap();
                assert_eq!(s.product.reflect(), s.product, "{} over {}", delta, field);
                assert_eq!(divisor_expansion(&s), s.product, "{} over {}", delta, field);
            }
        }
    }

    #[test]
    fn tau_sweep_expansion() {
        for p in [2u64, 3, 5] {
            for k in 0..=3u32 {
                for tau in -7i64..=7 {
                    for det_sign in [1i8, -1] {
                        let pk = (p as i64).pow(k);
                        let delta = tau * tau - 4 * det_sign as i64 * pk;
                        let dd = d(delta);
                        if dd.is_zero() || crate::field::is_square(&dd, &q()) {
                            continue;
                        }
                        let s = global_series(&dd, &q()).unwrap();
                        assert_eq!(divisor_expansion(&s), s.product, "delta={}", delta);
                        assert_eq!(s.product.reflect(), s.product, "delta={}", delta);
                    }
                }
            }
        }
    }

    #[test]
    fn matrix_entry_points_agree() {
        let f = q();
        let m1 = delta_to_matrix(&d(45), &f).unwrap();
        let alt1 = Mat2 { a11: d(3), a12: d(1), a21: d(9), a22: d(0) };
        let alt2 = Mat2 { a11: d(5), a12: d(1), a21: d(5), a22: d(0) };
        let base = matrix_series(&m1, &f).unwrap();
        for alt in [alt1, alt2] {
            let s = matrix_series(&alt, &f).unwrap();
            assert_eq!(s.product, base.product);
            assert_eq!(s.s_delta, base.s_delta);
        }
    }

    #[test]
    fn normalized_weights() {
        let w = normalized_elliptic_weight(3, 3, 2, -1).unwrap();
        assert_eq!(w, NormalizedWeight { coeff: rat(5, 1), p: 3, k: 2 });
        assert!((w.to_f64() - 5.0 / 3.0).abs() < 1e-12);
        let w0 = normalized_elliptic_weight(3, 3, 0, 1).unwrap();
        assert_eq!(w0.coeff, rat(1, 1));
        let w7 = normalized_elliptic_weight(1, 2, 1, 1).unwrap();
        assert_eq!(w7, NormalizedWeight { coeff: rat(1, 1), p: 2, k: 1 });
        // delta = 25 - 16 = 9 is a square
        assert!(matches!(
            normalized_elliptic_weight(5, 2, 2, 1),
            Err(Error::SquareDelta)
        ));
    }
}
