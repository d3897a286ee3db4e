//! Traces of Frobenius and Dirichlet coefficients.
//!
//! Small primes are counted naively with a table of squares. Large primes use
//! baby-step giant-step on the curve and its quadratic twist over F_p, with a
//! naive fallback if the candidate order is not pinned down.

use std::collections::HashMap;

use rayon::prelude::*;
use rug::Integer;
use serde::Serialize;

use super::tate::reduction_data;
use super::{rem_u64, CurveModel};
use crate::arith::{factor, factor_u64, kronecker, primes_up_to, spf_table};

/// Primes below this bound are always counted naively.
pub const NAIVE_LIMIT: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub prime: u64,
    pub a_q: i64,
    pub n_q: Option<i64>,
}

/// q + 1 − #Ẽ(F_q), counting every point of the reduced cubic including a
/// singular one. At good primes this is a_q; on a model minimal at a bad
/// prime it gives 1, −1, 0 by reduction type.
pub fn ap_naive(e: &CurveModel, p: u64) -> i64 {
    if p == 2 {
        let a: Vec<u64> = e.coefficients().iter().map(|x| rem_u64(x, 2)).collect();
        let mut count = 1i64;
        for x in 0..2u64 {
            for y in 0..2u64 {
                let lhs = y * y + a[0] * x * y + a[2] * y;
                let rhs = x * x * x + a[1] * x * x + a[3] * x + a[4];
                if (lhs + rhs) % 2 == 0 {
                    count += 1;
                }
            }
        }
        return 3 - count;
    }
    let b2 = rem_u64(&e.b2, p);
    let b4 = rem_u64(&(Integer::from(2 * &e.b4)), p);
    let b6 = rem_u64(&e.b6, p);
    let mut is_sq = vec![false; p as usize];
    for x in 0..p {
        is_sq[(x * x % p) as usize] = true;
    }
    let mut sum = 0i64;
    for x in 0..p {
        // 4x³ + b2x² + 2b4x + b6
        let g = ((((4 * x % p + b2) % p) * x % p + b4) % p * x % p + b6) % p;
        if g != 0 {
            sum += if is_sq[g as usize] { 1 } else { -1 };
        }
    }
    -sum
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powm(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b, p);
        }
        b = mulm(b, b, p);
        e >>= 1;
    }
    r
}

fn invm(a: u64, p: u64) -> u64 {
    let (mut t, mut nt) = (0i128, 1i128);
    let (mut r, mut nr) = (p as i128, a as i128);
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(p as i128) as u64
}

fn is_qr(a: u64, p: u64) -> bool {
    a == 0 || powm(a, (p - 1) / 2, p) == 1
}

/// Tonelli–Shanks square root of a nonzero residue.
fn sqrtm(a: u64, p: u64) -> u64 {
    if p % 4 == 3 {
        return powm(a, (p + 1) / 4, p);
    }
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while is_qr(z, p) {
        z += 1;
    }
    let mut m = s;
    let mut c = powm(z, q, p);
    let mut t = powm(a, q, p);
    let mut r = powm(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mulm(tt, tt, p);
            i += 1;
        }
        let b = powm(c, 1 << (m - i - 1), p);
        m = i;
        c = mulm(b, b, p);
        t = mulm(t, c, p);
        r = mulm(r, b, p);
    }
    r
}

type Pt = Option<(u64, u64)>;

struct ShortCurve {
    a: u64,
    b: u64,
    p: u64,
}

impl ShortCurve {
    fn rhs(&self, x: u64) -> u64 {
        let p = self.p;
        (mulm(mulm(x, x, p), x, p) + mulm(self.a, x, p) + self.b) % p
    }

    fn add(&self, u: Pt, v: Pt) -> Pt {
        let p = self.p;
        let (x1, y1) = match u {
            None => return v,
            Some(q) => q,
        };
        let (x2, y2) = match v {
            None => return u,
            Some(q) => q,
        };
        let lam = if x1 == x2 {
            if (y1 + y2) % p == 0 {
                return None;
            }
            let num = (3 * mulm(x1, x1, p) + self.a) % p;
            mulm(num, invm(2 * y1 % p, p), p)
        } else {
            mulm((y2 + p - y1) % p, invm((x2 + p - x1) % p, p), p)
        };
        let x3 = (mulm(lam, lam, p) + 2 * p - x1 - x2) % p;
        let y3 = (mulm(lam, (x1 + p - x3) % p, p) + p - y1) % p;
        Some((x3, y3))
    }

    fn neg(&self, u: Pt) -> Pt {
        u.map(|(x, y)| (x, (self.p - y) % self.p))
    }

    fn mul(&self, mut k: u64, u: Pt) -> Pt {
        let mut acc: Pt = None;
        let mut base = u;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    /// Some n in [lo, hi] with n·P = O, or a smaller multiple when found early.
    fn find_multiple(&self, pt: Pt, lo: u64, hi: u64) -> Option<u64> {
        let m = ((hi - lo) as f64).sqrt() as u64 + 1;
        let mut baby: HashMap<(u64, u64), u64> = HashMap::with_capacity(m as usize);
        let mut cur: Pt = None;
        for j in 1..=m {
            cur = self.add(cur, pt);
            match cur {
                None => return Some(j),
                Some(q) => {
                    baby.entry(q).or_insert(j);
                }
            }
        }
        let giant = self.mul(m, pt);
        let mut r = self.mul(lo, pt);
        for i in 0..=m + 1 {
            match self.neg(r) {
                None => return Some(lo + i * m),
                Some(q) => {
                    if let Some(&j) = baby.get(&q) {
                        return Some(lo + i * m + j);
                    }
                }
            }
            r = self.add(r, giant);
        }
        None
    }

    fn order(&self, pt: Pt, mut n: u64) -> u64 {
        for (l, _) in factor_u64(n) {
            while n % l == 0 && self.mul(n / l, pt).is_none() {
                n /= l;
            }
        }
        n
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// a_p at a good prime p ≥ 5 by baby-step giant-step.
pub fn ap_bsgs(e: &CurveModel, p: u64) -> i64 {
    assert!(p >= 5);
    let a = rem_u64(&Integer::from(-27 * &e.c4), p);
    let b = rem_u64(&Integer::from(-54 * &e.c6), p);
    let mut d = 2;
    while is_qr(d, p) {
        d += 1;
    }
    let d2 = mulm(d, d, p);
    let curves = [
        ShortCurve { a, b, p },
        ShortCurve {
            a: mulm(a, d2, p),
            b: mulm(b, mulm(d2, d, p), p),
            p,
        },
    ];
    let w = (4 * p as u128).isqrt_u64();
    let lo = p + 1 - w;
    let hi = p + 1 + w;
    let mut lcm = [1u64, 1u64];
    let mut next_x = [0u64, 0u64];
    for round in 0..60 {
        let k = round % 2;
        let c = &curves[k];
        let mut x = next_x[k];
        let pt = loop {
            if x >= p {
                break None;
            }
            let f = c.rhs(x);
            x += 1;
            if f != 0 && is_qr(f, p) {
                break Some((x - 1, sqrtm(f, p)));
            }
        };
        next_x[k] = x;
        let Some(pt) = pt else { continue };
        let Some(n) = c.find_multiple(Some(pt), lo, hi) else { break };
        let ord = c.order(Some(pt), n);
        lcm[k] = lcm[k] / gcd(lcm[k], ord) * ord;
        let mut found = None;
        let mut count = 0;
        let start = lo.div_ceil(lcm[0]) * lcm[0];
        let mut n_e = start;
        while n_e <= hi {
            if (2 * p + 2 - n_e) % lcm[1] == 0 {
                count += 1;
                found = Some(n_e);
            }
            n_e += lcm[0];
        }
        if count == 1 {
            return p as i64 + 1 - found.unwrap() as i64;
        }
    }
    ap_naive(e, p)
}

trait IsqrtU64 {
    fn isqrt_u64(self) -> u64;
}

impl IsqrtU64 for u128 {
    fn isqrt_u64(self) -> u64 {
        let mut r = (self as f64).sqrt() as u128;
        while r * r > self {
            r -= 1;
        }
        while (r + 1) * (r + 1) <= self {
            r += 1;
        }
        r as u64
    }
}

fn good_ap(e: &CurveModel, p: u64) -> i64 {
    if p < NAIVE_LIMIT {
        ap_naive(e, p)
    } else {
        ap_bsgs(e, p)
    }
}

/// Trace record at a prime of a model minimal at that prime.
pub fn ap_count(e: &CurveModel, q: u64) -> TraceRecord {
    if e.disc.is_divisible(&Integer::from(q)) {
        let rd = reduction_data(e, &Integer::from(q));
        return TraceRecord {
            prime: q,
            a_q: rd.bad_ap(),
            n_q: None,
        };
    }
    let a = good_ap(e, q);
    TraceRecord {
        prime: q,
        a_q: a,
        n_q: Some(q as i64 + 1 - a),
    }
}

/// a_n for 0 ≤ n ≤ bound (index 0 holds 0).
pub fn an_coefficients(e: &CurveModel, bound: usize) -> Vec<i64> {
    let mut bad: HashMap<u64, i64> = HashMap::new();
    for (p, _) in factor(&e.disc).expect("nonzero discriminant") {
        if let Some(pu) = p.to_u64() {
            bad.insert(pu, reduction_data(e, &p).bad_ap());
        }
    }
    let primes = primes_up_to(bound as u64);
    let aps: Vec<i64> = primes
        .par_iter()
        .map(|&p| bad.get(&p).copied().unwrap_or_else(|| good_ap(e, p)))
        .collect();
    let mut an = vec![0i64; bound + 1];
    if bound >= 1 {
        an[1] = 1;
    }
    for (&p, &a) in primes.iter().zip(&aps) {
        an[p as usize] = a;
    }
    let spf = spf_table(bound);
    for n in 2..=bound {
        let p = spf[n] as usize;
        if p == n {
            continue;
        }
        let mut m = n;
        let mut pk = 1usize;
        while m % p == 0 {
            m /= p;
            pk *= p;
        }
        an[n] = if m > 1 {
            an[pk] * an[m]
        } else if bad.contains_key(&(p as u64)) {
            an[p] * an[n / p]
        } else {
            an[p] * an[n / p] - (p as i64) * an[n / p / p]
        };
    }
    an
}

/// Coefficients of the twist by a fundamental discriminant m coprime to the
/// conductor: χ_m(n)·a_n.
pub fn twisted_an(an: &[i64], m: i64) -> Vec<i64> {
    an.iter()
        .enumerate()
        .map(|(n, &a)| if a == 0 { 0 } else { a * kronecker(m, n as i64) as i64 })
        .collect()
}

/// Shared a_n table of a base curve, grown on demand.
#[derive(Debug, Default)]
pub struct ApTable {
    an: std::sync::RwLock<std::sync::Arc<Vec<i64>>>,
    curve: Option<CurveModel>,
}

impl ApTable {
    pub fn new(e: &CurveModel) -> Self {
        ApTable {
            an: Default::default(),
            curve: Some(e.clone()),
        }
    }

    /// A table covering at least `bound` coefficients.
    pub fn get(&self, bound: usize) -> std::sync::Arc<Vec<i64>> {
        {
            let cur = self.an.read().expect("table lock");
            if cur.len() > bound {
                return cur.clone();
            }
        }
        // computed outside the lock: the parallel sieve inside may steal
        // tasks that call `get` again on this thread
        let e = self.curve.as_ref().expect("table bound to a curve");
        let fresh = std::sync::Arc::new(an_coefficients(e, bound));
        let mut w = self.an.write().expect("table lock");
        if w.len() < fresh.len() {
            *w = fresh;
        }
        w.clone()
    }
}
