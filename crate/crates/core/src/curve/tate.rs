//! Tate's algorithm: Kodaira symbols, Tamagawa numbers and conductor
//! exponents at a single prime.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::Pow;
use rug::Integer;
use serde::{Serialize, Serializer};

use super::minimal::Transform;
use super::CurveModel;
use crate::arith::{factor, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KodairaType {
    I(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaType::I(n) => write!(f, "I{n}"),
            KodairaType::II => write!(f, "II"),
            KodairaType::III => write!(f, "III"),
            KodairaType::IV => write!(f, "IV"),
            KodairaType::IStar(n) => write!(f, "I{n}*"),
            KodairaType::IVStar => write!(f, "IV*"),
            KodairaType::IIIStar => write!(f, "III*"),
            KodairaType::IIStar => write!(f, "II*"),
        }
    }
}

impl Serialize for KodairaType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionData {
    #[serde(with = "crate::arith::serde_integer")]
    pub prime: Integer,
    pub kodaira_type: KodairaType,
    pub tamagawa: u32,
    pub reduction_kind: ReductionKind,
    pub conductor_exponent: u32,
    pub disc_valuation: u32,
}

impl ReductionData {
    /// Local trace at a bad prime: 1 split, −1 non-split, 0 additive.
    pub fn bad_ap(&self) -> i64 {
        match self.reduction_kind {
            ReductionKind::SplitMultiplicative => 1,
            ReductionKind::NonsplitMultiplicative => -1,
            _ => 0,
        }
    }
}

fn val(x: &Integer, p: &Integer) -> u32 {
    if x.cmp0() == Ordering::Equal {
        return u32::MAX / 2;
    }
    let mut m = x.clone();
    let mut v = 0;
    while m.is_divisible(p) {
        m /= p;
        v += 1;
    }
    v
}

fn divides(p: &Integer, x: &Integer) -> bool {
    x.is_divisible(p)
}

fn res(x: Integer, p: &Integer) -> Integer {
    let r = x % p;
    if r.cmp0() == Ordering::Less {
        r + p
    } else {
        r
    }
}

fn inv(x: &Integer, p: &Integer) -> Integer {
    res(x.clone(), p).invert(p).expect("unit modulo p")
}

fn exact_div(x: &Integer, d: &Integer) -> Integer {
    debug_assert!(x.is_divisible(d));
    Integer::from(x / d)
}

/// Does a·x² + b·x + c have a root modulo p?
fn quad_has_root(a: &Integer, b: &Integer, c: &Integer, p: &Integer) -> bool {
    if *p == 2 {
        let c0 = c.is_divisible_u(2);
        let c1 = Integer::from(a + b) + c;
        return c0 || c1.is_divisible_u(2);
    }
    if divides(p, a) {
        return !divides(p, b) || divides(p, c);
    }
    let d = Integer::from(b * b) - Integer::from(4 * a) * c;
    res(d, p).legendre(p) >= 0
}

/// Number of distinct roots of x³ + b·x² + c·x + d modulo p.
fn cubic_root_count(b: &Integer, c: &Integer, d: &Integer, p: &Integer) -> u32 {
    if *p < 2000 {
        let pp = p.to_u64().unwrap();
        let (b, c, d) = (
            res(b.clone(), p).to_u64().unwrap(),
            res(c.clone(), p).to_u64().unwrap(),
            res(d.clone(), p).to_u64().unwrap(),
        );
        return (0..pp)
            .filter(|&x| ((x * x % pp * x) + b * x % pp * x + c * x + d) % pp == 0)
            .count() as u32;
    }
    let f = vec![res(d.clone(), p), res(c.clone(), p), res(b.clone(), p), Integer::from(1)];
    // x^p mod f, then deg gcd(x^p − x, f)
    let mut xp = poly_powmod(&[Integer::new(), Integer::from(1)], p, &f, p);
    while xp.len() < 2 {
        xp.push(Integer::new());
    }
    xp[1] -= 1;
    let xp: Vec<Integer> = xp.into_iter().map(|c| res(c, p)).collect();
    let g = poly_gcd(f, xp, p);
    (g.len() as u32).saturating_sub(1)
}

fn trim(mut a: Vec<Integer>) -> Vec<Integer> {
    while a.last().is_some_and(|c| c.cmp0() == Ordering::Equal) {
        a.pop();
    }
    a
}

fn poly_mulmod(a: &[Integer], b: &[Integer], f: &[Integer], p: &Integer) -> Vec<Integer> {
    let mut prod = vec![Integer::new(); a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += Integer::from(x * y);
        }
    }
    poly_rem(prod.into_iter().map(|c| res(c, p)).collect(), f, p)
}

fn poly_rem(a: Vec<Integer>, f: &[Integer], p: &Integer) -> Vec<Integer> {
    let mut a = trim(a);
    let f = trim(f.to_vec());
    let df = f.len() - 1;
    let lead_inv = inv(&f[df], p);
    while a.len() > df {
        let k = a.len() - 1 - df;
        let coef = res(Integer::from(&a[a.len() - 1] * &lead_inv), p);
        for (i, fc) in f.iter().enumerate() {
            let t = Integer::from(&coef * fc);
            a[k + i] = res(Integer::from(&a[k + i] - t), p);
        }
        a = trim(a);
    }
    a
}

fn poly_powmod(base: &[Integer], e: &Integer, f: &[Integer], p: &Integer) -> Vec<Integer> {
    let mut result = vec![Integer::from(1)];
    let mut b = poly_rem(base.to_vec(), f, p);
    let bits = e.significant_bits();
    for i in 0..bits {
        if e.get_bit(i) {
            result = poly_mulmod(&result, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
    }
    result
}

fn poly_gcd(a: Vec<Integer>, b: Vec<Integer>, p: &Integer) -> Vec<Integer> {
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        let r = poly_rem(a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn rst(e: &CurveModel, r: &Integer, s: &Integer, t: &Integer) -> CurveModel {
    e.transform(&Transform {
        u: Rational::from(1),
        r: Rational::from(r),
        s: Rational::from(s),
        t: Rational::from(t),
    })
    .expect("integral shift")
}

/// Runs Tate's algorithm at p. Returns the local data together with a model
/// that is minimal at p and differs from the input only at p.
pub(crate) fn tate(e: &CurveModel, p: &Integer) -> (ReductionData, CurveModel) {
    let mut c = e.clone();
    let two = Integer::from(2);
    let half = |p: &Integer| inv(&two, p);
    loop {
        let vd = val(&c.disc, p);
        if vd == 0 {
            let rd = ReductionData {
                prime: p.clone(),
                kodaira_type: KodairaType::I(0),
                tamagawa: 1,
                reduction_kind: ReductionKind::Good,
                conductor_exponent: 0,
                disc_valuation: 0,
            };
            return (rd, c);
        }
        let done = |kt: KodairaType, cp: u32, f: u32, kind: ReductionKind, c: CurveModel| {
            (
                ReductionData {
                    prime: p.clone(),
                    kodaira_type: kt,
                    tamagawa: cp,
                    reduction_kind: kind,
                    conductor_exponent: f,
                    disc_valuation: vd,
                },
                c,
            )
        };

        // move the singular point to (0, 0)
        let (r, t) = if *p == 2 {
            if divides(p, &c.b2) {
                let r = res(c.a4().clone(), p);
                let t = res(
                    Integer::from((Integer::from(&r + c.a2()) * &r + c.a4()) * &r) + c.a6(),
                    p,
                );
                (r, t)
            } else {
                let r = res(c.a3().clone(), p);
                let t = res(Integer::from(c.a4() + Integer::from(&r * &r)), p);
                (r, t)
            }
        } else if *p == 3 {
            let r = if divides(p, &c.b2) {
                res(-c.b6.clone(), p)
            } else {
                res(-Integer::from(inv(&c.b2, p) * &c.b4), p)
            };
            let t = res(Integer::from(c.a1() * &r) + c.a3(), p);
            (r, t)
        } else {
            let r = if divides(p, &c.c4) {
                res(-Integer::from(inv(&Integer::from(12), p) * &c.b2), p)
            } else {
                let k = inv(&Integer::from(12 * &c.c4), p);
                res(-(k * Integer::from(&c.c6 + Integer::from(&c.b2 * &c.c4))), p)
            };
            let t = res(-Integer::from(half(p) * (Integer::from(c.a1() * &r) + c.a3())), p);
            (r, t)
        };
        c = rst(&c, &r, &Integer::new(), &t);
        debug_assert!(divides(p, c.a3()) && divides(p, c.a4()) && divides(p, c.a6()));

        // multiplicative reduction
        if !divides(p, &c.b2) {
            return if quad_has_root(&Integer::from(1), c.a1(), &-c.a2().clone(), p) {
                done(KodairaType::I(vd), vd, 1, ReductionKind::SplitMultiplicative, c)
            } else {
                let cp = if vd % 2 == 0 { 2 } else { 1 };
                done(KodairaType::I(vd), cp, 1, ReductionKind::NonsplitMultiplicative, c)
            };
        }
        let add = ReductionKind::Additive;
        let p2 = Integer::from(p * p);
        let p3 = Integer::from(&p2 * p);
        if val(c.a6(), p) < 2 {
            return done(KodairaType::II, 1, vd, add, c);
        }
        if val(&c.b8, p) < 3 {
            return done(KodairaType::III, 2, vd - 1, add, c);
        }
        if val(&c.b6, p) < 3 {
            let a3t = exact_div(c.a3(), p);
            let a6t = exact_div(c.a6(), &p2);
            let cp = if quad_has_root(&Integer::from(1), &a3t, &-a6t, p) { 3 } else { 1 };
            return done(KodairaType::IV, cp, vd - 2, add, c);
        }

        // arrange p | a1, a2; p² | a3, a4; p³ | a6
        let (s, t) = if *p == 2 {
            let s = res(c.a2().clone(), p);
            let t = Integer::from(p * res(exact_div(c.a6(), &p2), p));
            (s, t)
        } else if *p == 3 {
            (c.a1().clone(), c.a3().clone())
        } else {
            let h = half(p);
            (
                res(-Integer::from(c.a1() * &h), p),
                -Integer::from(c.a3() * &h),
            )
        };
        c = rst(&c, &Integer::new(), &s, &t);

        let b = exact_div(c.a2(), p);
        let cc = exact_div(c.a4(), &p2);
        let d = exact_div(c.a6(), &p3);
        let w = Integer::from(27 * &d) * &d - Integer::from(&b * &b) * &cc * &cc + Integer::from(4 * &b) * &b * &b * &d
            - Integer::from(18 * &b) * &cc * &d
            + Integer::from(4 * &cc) * &cc * &cc;
        let x = Integer::from(3 * &cc) - Integer::from(&b * &b);

        if val(&w, p) == 0 {
            let cp = 1 + cubic_root_count(&b, &cc, &d, p);
            return done(KodairaType::IStar(0), cp, vd - 4, add, c);
        }

        if val(&x, p) == 0 {
            // double root: move it to 0
            let r0 = if *p == 2 {
                res(cc.clone(), p)
            } else if *p == 3 {
                res(Integer::from(&cc * inv(&b, p)), p)
            } else {
                let num = Integer::from(&b * &cc) - Integer::from(9 * &d);
                res(num * inv(&Integer::from(2 * &x), p), p)
            };
            let r = Integer::from(p * &r0);
            c = rst(&c, &r, &Integer::new(), &Integer::new());
            let mut ix = 3u32;
            let mut iy = 3u32;
            let mut mx = p2.clone();
            let mut my = p2.clone();
            let cp;
            loop {
                let a2t = exact_div(c.a2(), p);
                let a3t = exact_div(c.a3(), &my);
                let a4t = exact_div(c.a4(), &Integer::from(p * &mx));
                let a6t = exact_div(c.a6(), &Integer::from(&mx * &my));
                if divides(p, &(Integer::from(&a3t * &a3t) + Integer::from(4 * &a6t))) {
                    let t = if *p == 2 {
                        Integer::from(&my * res(a6t.clone(), p))
                    } else {
                        Integer::from(&my * res(-Integer::from(&a3t * half(p)), p))
                    };
                    c = rst(&c, &Integer::new(), &Integer::new(), &t);
                    my *= p;
                    iy += 1;
                    let a2t = exact_div(c.a2(), p);
                    let a4t = exact_div(c.a4(), &Integer::from(p * &mx));
                    let a6t = exact_div(c.a6(), &Integer::from(&mx * &my));
                    if divides(p, &(Integer::from(&a4t * &a4t) - Integer::from(4 * &a6t) * &a2t)) {
                        let r = if *p == 2 {
                            Integer::from(&mx * res(Integer::from(&a6t * inv(&a2t, p)), p))
                        } else {
                            Integer::from(&mx * res(-Integer::from(&a4t * inv(&Integer::from(2 * &a2t), p)), p))
                        };
                        c = rst(&c, &r, &Integer::new(), &Integer::new());
                        mx *= p;
                        ix += 1;
                    } else {
                        cp = if quad_has_root(&a2t, &a4t, &a6t, p) { 4 } else { 2 };
                        break;
                    }
                } else {
                    let _ = (a2t, a4t);
                    cp = if quad_has_root(&Integer::from(1), &a3t, &-a6t, p) { 4 } else { 2 };
                    break;
                }
            }
            let m = ix + iy - 5;
            return done(KodairaType::IStar(m), cp, vd - m - 4, add, c);
        }

        // triple root: move it to 0
        let rp = if *p == 3 {
            res(-d.clone(), p)
        } else if *p == 2 {
            res(cc.clone(), p)
        } else {
            res(-Integer::from(&b * inv(&Integer::from(3), p)), p)
        };
        let r = Integer::from(p * &rp);
        c = rst(&c, &r, &Integer::new(), &Integer::new());
        let x3t = exact_div(c.a3(), &p2);
        let x6t = exact_div(c.a6(), &Integer::from(&p2 * &p2));
        if !divides(p, &(Integer::from(&x3t * &x3t) + Integer::from(4 * &x6t))) {
            let cp = if quad_has_root(&Integer::from(1), &x3t, &-x6t.clone(), p) { 3 } else { 1 };
            return done(KodairaType::IVStar, cp, vd - 6, add, c);
        }
        let t = if *p == 2 {
            -Integer::from(&p2 * res(x6t, p))
        } else {
            Integer::from(&p2 * res(-Integer::from(&x3t * half(p)), p))
        };
        c = rst(&c, &Integer::new(), &Integer::new(), &t);
        if val(c.a4(), p) < 4 {
            return done(KodairaType::IIIStar, 2, vd - 7, add, c);
        }
        if val(c.a6(), p) < 6 {
            return done(KodairaType::IIStar, 1, vd - 8, add, c);
        }
        // not minimal at p: rescale and start over
        c = c
            .transform(&Transform {
                u: Rational::from(p),
                r: Rational::new(),
                s: Rational::new(),
                t: Rational::new(),
            })
            .expect("divisibility established by the algorithm");
    }
}

/// Local data at p of a model assumed minimal at p.
pub fn reduction_data(e: &CurveModel, p: &Integer) -> ReductionData {
    tate(e, p).0
}

pub fn conductor(e: &CurveModel) -> Integer {
    let mut n = Integer::from(1);
    for (p, _) in factor(&e.disc).expect("nonzero discriminant") {
        let rd = reduction_data(e, &p);
        n *= p.pow(rd.conductor_exponent);
    }
    n
}

pub fn tamagawa_product(e: &CurveModel) -> Integer {
    let mut prod = Integer::from(1);
    for (p, _) in factor(&e.disc).expect("nonzero discriminant") {
        prod *= reduction_data(e, &p).tamagawa;
    }
    prod
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rd(a: [i64; 5], p: i64) -> ReductionData {
        reduction_data(&CurveModel::from_i64(a).unwrap(), &Integer::from(p))
    }

    #[test]
    fn x0_14_local_data() {
        let a = [1, 0, 1, 4, -6];
        let r2 = rd(a, 2);
        assert_eq!(r2.kodaira_type, KodairaType::I(6));
        assert_eq!(r2.reduction_kind, ReductionKind::NonsplitMultiplicative);
        assert_eq!(r2.tamagawa, 2);
        let r7 = rd(a, 7);
        assert_eq!(r7.kodaira_type, KodairaType::I(3));
        assert_eq!(r7.reduction_kind, ReductionKind::SplitMultiplicative);
        assert_eq!(r7.tamagawa, 3);
        assert_eq!(conductor(&CurveModel::from_i64(a).unwrap()), 14);
    }

    #[test]
    fn curve_46a1() {
        let a = [1, -1, 0, -10, -12];
        assert_eq!(rd(a, 2).tamagawa, 2);
        assert_eq!(rd(a, 23).tamagawa, 1);
        assert_eq!(conductor(&CurveModel::from_i64(a).unwrap()), 46);
    }

    #[test]
    fn catalog_conductors() {
        for (a, n) in [
            ([1, 0, 0, -3, 1], 34),
            ([0, -1, 0, 0, -4], 56),
            ([1, -1, 0, -15, 8], 99),
            ([0, -1, 1, -10, -20], 11),
            ([0, 0, 1, -1, 0], 37),
        ] {
            assert_eq!(conductor(&CurveModel::from_i64(a).unwrap()), n, "{a:?}");
        }
    }

    #[test]
    fn additive_types() {
        // y² = x³ + 2: type II at 2 and at 3
        let r = rd([0, 0, 0, 0, 2], 3);
        assert_eq!(r.reduction_kind, ReductionKind::Additive);
        // y² = x³ − x: conductor 32, type III at 2
        let e = CurveModel::from_i64([0, 0, 0, -1, 0]).unwrap();
        assert_eq!(conductor(&e), 32);
        // y² = x³ + x² − x (conductor 20)? check 27a1 = [0,0,1,0,-7] has IV* at 3
        let r3 = rd([0, 0, 1, 0, -7], 3);
        assert_eq!(r3.kodaira_type, KodairaType::IVStar);
        assert_eq!(conductor(&CurveModel::from_i64([0, 0, 1, 0, -7]).unwrap()), 27);
    }

    #[test]
    fn non_minimal_model_is_rescaled() {
        // 11a1 scaled by u = 5: a_i·5^i
        let e = CurveModel::from_i64([0, -25, 125, -6250, -312500]).unwrap();
        let (r, m) = tate(&e, &Integer::from(5));
        assert_eq!(r.reduction_kind, ReductionKind::Good);
        assert_eq!(val(&m.disc, &Integer::from(5)), 0);
    }
}
