//! Independent brute-force verifiers: counting fixed lattices in the
//! Bruhat-Tits tree of GL(2, Q_p), and enumerating ideals of global
//! quadratic orders by Hermite-normal-form sublattice search. Nothing here
//! reuses the polynomial or character machinery from the other modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exact::{int, Int};
use crate::{Error, Result};

fn val_i128(mut x: i128, p: i128) -> u32 {
    assert!(x != 0);
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Valuation of x mod p^cap; returns cap when x = 0 mod p^cap.
fn val_capped(x: &Int, p: &Int, cap: u32) -> u32 {
    let mut v = 0;
    let mut x = x.clone();
    while v < cap {
        if x.is_zero() {
            return cap;
        }
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
    cap
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TreeCount {
    pub p: u64,
    pub count: u64,
    /// Radius at which two consecutive counts agreed.
    pub stabilized_at: u32,
    pub split_at_p: bool,
}

/// Vertices at distance exactly r from the standard lattice, as primitive
/// HNF matrices [[p^a, c], [0, p^{r-a}]] (i128 entries).
fn vertices_at(p: i128, r: u32) -> Vec<(i128, i128, i128)> {
    let mut out = vec![];
    for a in 0..=r {
        let b = r - a;
        let pa = p.pow(a);
        for c in 0..pa {
            let vc = if c == 0 { u32::MAX } else { val_i128(c, p) };
            if a.min(b).min(vc) != 0 {
                continue;
            }
            out.push((pa, c, p.pow(b)));
        }
    }
    out
}

fn is_fixed(gamma: &[[i64; 2]; 2], h: (i128, i128, i128), pr: i128) -> bool {
    let (d1, c, d2) = h;
    let g = |i: usize, j: usize| gamma[i][j] as i128;
    // adj(H) gamma H with H = [[d1, c], [0, d2]]
    let m11 = (d2 * g(0, 0) - c * g(1, 0)) * d1;
    let m12 = d2 * (g(0, 0) * c + g(0, 1) * d2) - c * (g(1, 0) * c + g(1, 1) * d2);
    let m21 = d1 * g(1, 0) * d1;
    let m22 = d1 * (g(1, 0) * c + g(1, 1) * d2);
    [m11, m12, m21, m22].iter().all(|v| v % pr == 0)
}

/// Square root of u mod p^m for a unit square u (odd p: quadratic residue
/// mod p; p = 2: u = 1 mod 8), by Hensel lifting.
fn unit_sqrt_mod(u: &Int, p: u64, m: u32) -> Option<Int> {
    let pm: Int = int(p as i64).pow(m);
    if p == 2 {
        if m == 0 {
            return Some(Int::zero());
        }
        if u.mod_floor(&int(8)) != int(1) {
            return None;
        }
        let mut t = Int::one();
        let mut j = 3u32;
        while j < m {
            let pj: Int = int(2).pow(j);
            let diff = (u - &t * &t).mod_floor(&(int(2) * &pj));
            if !diff.is_zero() {
                t += int(2).pow(j - 1);
            }
            j += 1;
        }
        Some(t.mod_floor(&pm))
    } else {
        let pi = int(p as i64);
        if crate::exact::kronecker(&u.mod_floor(&pi), &pi) != 1 {
            return None;
        }
        let mut t = crate::field::sqrt_mod_p(&u.mod_floor(&pi), &pi);
        let mut prec = 1u32;
        while prec < m {
            prec = (2 * prec).min(m);
            let pj: Int = int(p as i64).pow(prec);
            let inv2t = crate::field::inv_mod(&(int(2) * &t), &pj);
            t = (&t + (u - &t * &t) * inv2t).mod_floor(&pj);
        }
        Some(t)
    }
}

/// Distance between the homothety classes of the lattices spanned by the
/// columns of b1 and b2, entries reduced mod p^cap.
fn class_distance(b1: &[Int; 4], b2: &[Int; 4], p: &Int, cap: u32) -> u32 {
    // C = adj(b1) b2
    let c11 = &b1[3] * &b2[0] - &b1[1] * &b2[2];
    let c12 = &b1[3] * &b2[1] - &b1[1] * &b2[3];
    let c21 = &b1[0] * &b2[2] - &b1[2] * &b2[0];
    let c22 = &b1[0] * &b2[3] - &b1[2] * &b2[1];
    let mu = [&c11, &c12, &c21, &c22]
        .into_iter()
        .map(|x| val_capped(x, p, cap))
        .min()
        .unwrap();
    let det = &c11 * &c22 - &c12 * &c21;
    let vdet = val_capped(&det, p, cap);
    vdet.saturating_sub(2 * mu)
}

struct Apartment {
    p: Int,
    cap: u32,
    w: [Int; 4],
}

impl Apartment {
    /// Basis of the apartment vertex with index i (translation along the
    /// eigenvector axis).
    fn vertex(&self, i: i32) -> [Int; 4] {
        let (e1, e2) = if i >= 0 { (i as u32, 0) } else { (0, (-i) as u32) };
        let s1: Int = self.p.pow(e1);
        let s2: Int = self.p.pow(e2);
        [&self.w[0] * &s1, &self.w[1] * &s2, &self.w[2] * &s1, &self.w[3] * &s2]
    }

    fn projection(&self, b: &[Int; 4], span: i32) -> i32 {
        let mut best = (u32::MAX, 0i32);
        for i in -span..=span {
            let d = class_distance(&self.vertex(i), b, &self.p, self.cap);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }
}

/// Counts homothety classes of lattices L with gamma L contained in L,
/// growing the search radius until the count stabilizes. When the
/// characteristic polynomial splits over Q_p the raw fixed set is infinite
/// along the eigenvector axis; the count is then taken over one fiber of
/// the projection onto that axis (the fiber of the standard lattice's
/// projection), which a torus translation maps bijectively to every other
/// fiber.
pub fn tree_orbital_oracle(gamma: &[[i64; 2]; 2], p: u64) -> Result<TreeCount> {
    for row in gamma {
        for &e in row {
            if e.abs() > 1_000_000 {
                return Err(Error::Guard("matrix entries exceed 10^6".into()));
            }
        }
    }
    let tr = (gamma[0][0] + gamma[1][1]) as i128;
    let det = (gamma[0][0] as i128) * (gamma[1][1] as i128)
        - (gamma[0][1] as i128) * (gamma[1][0] as i128);
    let delta = tr * tr - 4 * det;
    if delta == 0 {
        return Err(Error::NotRegular("repeated eigenvalue".into()));
    }
    if det == 0 {
        return Err(Error::Invalid("singular matrix".into()));
    }
    let pi = p as i128;
    let vdet = val_i128(det, pi);
    let vdelta = val_i128(delta, pi);
    if vdet > 8 || vdelta > 12 {
        return Err(Error::Guard("p-adic valuation of det or delta too large".into()));
    }
    // shape of the quadratic algebra Q_p(sqrt delta) over Q_p
    let u = delta / pi.pow(vdelta);
    let split = vdelta % 2 == 0 && {
        if p == 2 {
            u.rem_euclid(8) == 1
        } else {
            crate::exact::kronecker_i64(
                i64::try_from(u.rem_euclid(pi)).unwrap(),
                p as i64,
            ) == 1
        }
    };
    let ramified = vdelta % 2 == 1 || (p == 2 && matches!(u.rem_euclid(8), 3 | 7));

    let r_max = vdet + vdelta + 4;
    if split {
        split_fiber_count(gamma, p, tr, det, delta, vdelta, r_max)
    } else {
        elliptic_count(gamma, p, r_max, ramified)
    }
}

fn elliptic_count(gamma: &[[i64; 2]; 2], p: u64, r_max: u32, ramified: bool) -> Result<TreeCount> {
    let pi = p as i128;
    let mut prev = 1u64; // the standard lattice, gamma integral
    for r in 1..=r_max {
        let pr = pi.pow(r);
        let add = vertices_at(pi, r)
            .into_iter()
            .filter(|&h| is_fixed(gamma, h, pr))
            .count() as u64;
        let cur = prev + add;
        if cur == prev {
            // over a ramified extension the compact-mod-center part of the
            // torus has index 2 over its maximal compact, and it pairs up
            // the fixed lattices in orbits of size two
            let count = if ramified {
                if cur % 2 != 0 {
                    return Err(Error::IdentityViolation(
                        "odd fixed-lattice count over a ramified torus".into(),
                    ));
                }
                cur / 2
            } else {
                cur
            };
            return Ok(TreeCount { p, count, stabilized_at: r, split_at_p: false });
        }
        prev = cur;
    }
    Err(Error::Inconclusive(r_max))
}

fn split_fiber_count(
    gamma: &[[i64; 2]; 2],
    p: u64,
    tr: i128,
    det: i128,
    delta: i128,
    vdelta: u32,
    r_max: u32,
) -> Result<TreeCount> {
    let pi_int = int(p as i64);
    let n0 = vdelta / 2;
    let span = (r_max + n0 + 6) as i32;
    let cap = 2 * (span as u32 + r_max + 8);
    let pcap: Int = pi_int.pow(cap);
    let pi128 = p as i128;

    let u = delta / pi128.pow(vdelta);
    let su = unit_sqrt_mod(&int_from_i128(u), p, cap)
        .ok_or_else(|| Error::NotRegular("unit part is not a local square".into()))?;
    let sqrt_delta = (su * pi_int.pow(n0)).mod_floor(&pcap);
    // eigenvalues (tr +- sqrt delta) / 2, always integral over Z_p
    let lambda = |sgn: i64| -> Result<Int> {
        let t = int_from_i128(tr) + int(sgn) * &sqrt_delta;
        if p == 2 {
            let t2 = t.mod_floor(&(int(2) * &pcap));
            if t2.is_odd() {
                return Err(Error::NotRegular("eigenvalue not 2-integral".into()));
            }
            Ok((t2 / int(2)).mod_floor(&pcap))
        } else {
            let inv2 = crate::field::inv_mod(&int(2), &pcap);
            Ok((t * inv2).mod_floor(&pcap))
        }
    };
    let l1 = lambda(1)?;
    let l2 = lambda(-1)?;
    let _ = det;

    // eigenvector for lambda: kernel of gamma - lambda, taking whichever
    // adjugate column is closer to primitive
    let eigenvector = |l: &Int| -> Result<(Int, Int)> {
        let a = int(gamma[0][0]);
        let b = int(gamma[0][1]);
        let c = int(gamma[1][0]);
        let d = int(gamma[1][1]);
        let cand1 = (b.clone(), (l - &a).mod_floor(&pcap));
        let cand2 = ((l - &d).mod_floor(&pcap), c.clone());
        let v1 = val_capped(&cand1.0, &pi_int, cap).min(val_capped(&cand1.1, &pi_int, cap));
        let v2 = val_capped(&cand2.0, &pi_int, cap).min(val_capped(&cand2.1, &pi_int, cap));
        let (vt, (x, y)) = if v1 <= v2 { (v1, cand1) } else { (v2, cand2) };
        if vt + 8 > cap {
            return Err(Error::Inconclusive(r_max));
        }
        let pv: Int = pi_int.pow(vt);
        Ok(((x / &pv).mod_floor(&pcap), (y / &pv).mod_floor(&pcap)))
    };
    let (w11, w21) = eigenvector(&l1)?;
    let (w12, w22) = eigenvector(&l2)?;
    let apt = Apartment {
        p: pi_int.clone(),
        cap,
        w: [w11, w12, w21, w22],
    };
    let wdet = &apt.w[0] * &apt.w[3] - &apt.w[1] * &apt.w[2];
    if val_capped(&wdet, &pi_int, cap) + 2 * r_max + 8 > cap {
        return Err(Error::Inconclusive(r_max));
    }

    let std_basis = [Int::one(), Int::zero(), Int::zero(), Int::one()];
    let i0 = apt.projection(&std_basis, span);

    let mut prev = 1u64; // the standard lattice is fixed and in its own fiber
    for r in 1..=r_max {
        let pr = pi128.pow(r);
        let mut add = 0u64;
        for h in vertices_at(pi128, r) {
            if !is_fixed(gamma, h, pr) {
                continue;
            }
            let hb = [int_from_i128(h.0), int_from_i128(h.1), Int::zero(), int_from_i128(h.2)];
            if apt.projection(&hb, span) == i0 {
                add += 1;
            }
        }
        let cur = prev + add;
        if cur == prev {
            return Ok(TreeCount { p, count: cur, stabilized_at: r, split_at_p: true });
        }
        prev = cur;
    }
    Err(Error::Inconclusive(r_max))
}

fn int_from_i128(x: i128) -> Int {
    BigInt::from(x)
}

/// Number of ideals of each index n <= bound in the order Z[gamma] with
/// gamma the companion matrix for delta, by direct Hermite-normal-form
/// sublattice enumeration; entry 0 of the result is unused (zero).
pub fn global_ideal_count_oracle(delta: i64, bound: usize) -> Result<Vec<u64>> {
    if delta == 0 {
        return Err(Error::ZeroInput);
    }
    if delta.abs() > 10_000 {
        return Err(Error::Guard("|delta| exceeds 10^4".into()));
    }
    if bound > 500 {
        return Err(Error::Guard("index bound exceeds 500".into()));
    }
    if !matches!(delta.rem_euclid(4), 0 | 1) {
        return Err(Error::NotSquareMod4);
    }
    let sq = (delta.abs() as f64).sqrt().round() as i64;
    if delta > 0 && sq * sq == delta {
        return Err(Error::SquareDelta);
    }
    let y = delta.rem_euclid(2);
    let mp = ((delta - y * y) / 4) as i128;
    let yy = y as i128;
    // multiplication by X on Z[X]/(X^2 - yX - mp) in the basis {1, X}:
    // 1 -> (0, 1), X -> (mp, y)
    let act = |x1: i128, x2: i128| -> (i128, i128) { (mp * x2, x1 + yy * x2) };
    let mut counts = vec![0u64; bound + 1];
    for d1 in 1..=(bound as i128) {
        for d2 in 1..=(bound as i128 / d1) {
            let n = (d1 * d2) as usize;
            let mut here = 0u64;
            for c in 0..d1 {
                // columns (d1, 0) and (c, d2); membership of (x1, x2):
                // d2 | x2 and d1 | x1 - (x2/d2) c
                let contains = |x1: i128, x2: i128| -> bool {
                    x2 % d2 == 0 && (x1 - (x2 / d2) * c) % d1 == 0
                };
                let (a1, a2) = act(d1, 0);
                let (b1, b2) = act(c, d2);
                if contains(a1, a2) && contains(b1, b2) {
                    here += 1;
                }
            }
            counts[n] += here;
        }
    }
    Ok(counts)
}
