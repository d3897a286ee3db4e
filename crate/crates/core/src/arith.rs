//! Exact integer and rational utilities: 2-adic valuation, quadratic
//! symbols, factorization and rational reconstruction.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::{Pow, RemRounding};
use rug::{Float, Integer};
use serde::{Serialize, Serializer};
use thiserror::Error;

pub type Rational = rug::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("no rational with denominator <= {bound} within tolerance {tolerance}")]
    NoRationalInRange { bound: String, tolerance: String },
    #[error("tolerance {tolerance} does not satisfy the uniqueness bound for denominator {bound}")]
    ToleranceTooLoose { bound: String, tolerance: String },
    #[error("invalid character modulus {0}: must be odd, squarefree, positive and 1 mod 4")]
    InvalidModulus(i64),
    #[error("cannot factor zero")]
    Zero,
}

/// A 2-adic valuation, with `Infinity` standing for the valuation of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Val2 {
    Finite(i64),
    Infinity,
}

impl Val2 {
    pub fn finite(self) -> Option<i64> {
        match self {
            Val2::Finite(v) => Some(v),
            Val2::Infinity => None,
        }
    }
}

impl std::ops::Add for Val2 {
    type Output = Val2;
    fn add(self, rhs: Val2) -> Val2 {
        match (self, rhs) {
            (Val2::Finite(a), Val2::Finite(b)) => Val2::Finite(a + b),
            _ => Val2::Infinity,
        }
    }
}

impl PartialOrd for Val2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val2 {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Val2::Finite(a), Val2::Finite(b)) => a.cmp(b),
            (Val2::Finite(_), Val2::Infinity) => Ordering::Less,
            (Val2::Infinity, Val2::Finite(_)) => Ordering::Greater,
            (Val2::Infinity, Val2::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Val2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val2::Finite(v) => write!(f, "{v}"),
            Val2::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Val2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Val2::Finite(v) => s.serialize_i64(*v),
            Val2::Infinity => s.serialize_str("inf"),
        }
    }
}

pub fn val2(x: &Rational) -> Val2 {
    if x.numer().cmp0() == Ordering::Equal {
        return Val2::Infinity;
    }
    let n = x.numer().find_one(0).unwrap_or(0) as i64;
    let d = x.denom().find_one(0).unwrap_or(0) as i64;
    Val2::Finite(n - d)
}

/// Exponent of `p` in a nonzero integer; `None` for zero.
pub fn val_p(n: &Integer, p: &Integer) -> Option<u32> {
    if n.cmp0() == Ordering::Equal {
        return None;
    }
    let mut m = n.clone();
    let mut v = 0;
    while m.is_divisible(p) {
        m /= p;
        v += 1;
    }
    Some(v)
}

pub fn val_p_u64(n: &Integer, p: u64) -> Option<u32> {
    val_p(n, &Integer::from(p))
}

/// Kronecker symbol (a/n).
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let tz = n.trailing_zeros();
    if tz > 0 {
        if a % 2 == 0 {
            return 0;
        }
        n >>= tz;
        if tz % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // n is now odd and positive: Jacobi symbol
    let mut a = a.rem_euclid(n) as u64;
    let mut n = n as u64;
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Kronecker symbol with a big numerator and a machine-size positive modulus.
pub fn kronecker_big(a: &Integer, n: i64) -> i8 {
    assert!(n > 0, "kronecker_big needs a positive modulus");
    let r = Integer::from(a.mod_u((4 * n) as u32));
    kronecker(r.to_i64().unwrap(), n)
}

/// Primitive real character of conductor m, for odd squarefree m ≡ 1 mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadChar {
    modulus: i64,
}

impl QuadChar {
    pub fn new(modulus: i64) -> Result<Self, ArithError> {
        if modulus <= 0 || modulus % 4 != 1 || !is_squarefree(modulus as u64) {
            return Err(ArithError::InvalidModulus(modulus));
        }
        Ok(QuadChar { modulus })
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn value(&self, k: i64) -> i8 {
        chi_value(self, k)
    }
}

pub fn chi_value(chi: &QuadChar, k: i64) -> i8 {
    kronecker(k.rem_euclid(chi.modulus), chi.modulus)
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    factor_u64(n).iter().all(|&(_, e)| e == 1)
}

/// Continued-fraction reconstruction of the unique rational with denominator
/// at most `bound` lying within `tol` of `x`.
pub fn rational_reconstruct(x: &Float, bound: &Integer, tol: &Float) -> Result<Rational, ArithError> {
    let prec = x.prec().max(tol.prec()).max(64);
    let limit = Float::with_val(prec, 1) / (Float::with_val(prec, Integer::from(bound * bound)) * 2u32);
    if *tol >= limit {
        return Err(ArithError::ToleranceTooLoose {
            bound: bound.to_string(),
            tolerance: tol.to_string_radix(10, Some(6)),
        });
    }
    let target = x.to_rational().expect("finite approximation");
    let tol_q = tol.to_rational().expect("finite tolerance");
    for c in Convergents::new(target.clone()) {
        if c.denom() > bound {
            break;
        }
        let err = Rational::from(&c - &target).abs();
        if err <= tol_q {
            return Ok(c);
        }
    }
    Err(ArithError::NoRationalInRange {
        bound: bound.to_string(),
        tolerance: tol.to_string_radix(10, Some(6)),
    })
}

/// Convergents p_k/q_k of the continued fraction of an exact rational.
pub struct Convergents {
    rest: Option<Rational>,
    p: (Integer, Integer),
    q: (Integer, Integer),
}

impl Convergents {
    pub fn new(x: Rational) -> Self {
        Convergents {
            rest: Some(x),
            p: (Integer::from(0), Integer::from(1)),
            q: (Integer::from(1), Integer::from(0)),
        }
    }
}

impl Iterator for Convergents {
    type Item = Rational;
    fn next(&mut self) -> Option<Rational> {
        let x = self.rest.take()?;
        let a = x.clone().floor().into_numer_denom().0;
        let frac = x - &a;
        let p = Integer::from(&a * &self.p.1) + &self.p.0;
        let q = Integer::from(&a * &self.q.1) + &self.q.0;
        self.p = (std::mem::take(&mut self.p.1), p.clone());
        self.q = (std::mem::take(&mut self.q.1), q.clone());
        if frac.cmp0() != Ordering::Equal {
            self.rest = Some(frac.recip());
        }
        Some(Rational::from((p, q)))
    }
}

/// Writes n = s·t² with s squarefree (carrying the sign) and t > 0.
pub fn squarefree_factor(n: &Integer) -> Result<(Integer, Integer), ArithError> {
    if n.cmp0() == Ordering::Equal {
        return Err(ArithError::Zero);
    }
    let mut s = Integer::from(n.cmp0() as i32);
    let mut t = Integer::from(1);
    for (p, e) in factor(n)? {
        if e % 2 == 1 {
            s *= &p;
        }
        t *= p.pow(e / 2);
    }
    Ok((s, t))
}

/// Prime factorization of |n|, primes ascending.
pub fn factor(n: &Integer) -> Result<Vec<(Integer, u32)>, ArithError> {
    if n.cmp0() == Ordering::Equal {
        return Err(ArithError::Zero);
    }
    let mut m = n.clone().abs();
    let mut out: Vec<(Integer, u32)> = Vec::new();
    if let Some(small) = m.to_u64() {
        return Ok(factor_u64(small).into_iter().map(|(p, e)| (Integer::from(p), e)).collect());
    }
    const TRIAL: u64 = 1_000_000;
    let mut p = 2u64;
    while p <= TRIAL {
        if m.is_divisible_u(p as u32) {
            let mut e = 0;
            while m.is_divisible_u(p as u32) {
                m /= p as u32;
                e += 1;
            }
            out.push((Integer::from(p), e));
        }
        if Integer::from(p * p) > m {
            break;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        let mut big = Vec::new();
        split_large(m, &mut big);
        big.sort();
        for q in big {
            match out.last_mut() {
                Some((last, e)) if *last == q => *e += 1,
                _ => out.push((q, 1)),
            }
        }
    }
    Ok(out)
}

fn split_large(n: Integer, out: &mut Vec<Integer>) {
    if n == 1 {
        return;
    }
    if n.is_probably_prime(30) != rug::integer::IsPrime::No {
        out.push(n);
        return;
    }
    let d = pollard_rho(&n);
    let other = Integer::from(&n / &d);
    split_large(d, out);
    split_large(other, out);
}

fn pollard_rho(n: &Integer) -> Integer {
    if n.is_even() {
        return Integer::from(2);
    }
    let mut c = Integer::from(1);
    loop {
        let f = |x: &Integer| -> Integer { (Integer::from(x * x) + &c).rem_euc(n) };
        let mut x = Integer::from(2);
        let mut y = Integer::from(2);
        let mut d = Integer::from(1);
        while d == 1 {
            x = f(&x);
            y = f(&f(&y));
            d = Integer::from(&x - &y).abs().gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1;
    }
}

pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    Integer::from(n).is_probably_prime(25) != rug::integer::IsPrime::No
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest-prime-factor table for 0..=n.
pub fn spf_table(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Serializes a rational as "p/q" with an explicit denominator.
pub fn rational_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let (p, q) = s.split_once('/')?;
    let p: Integer = p.trim().parse().ok()?;
    let q: Integer = q.trim().parse().ok()?;
    if q.cmp0() == Ordering::Equal {
        return None;
    }
    Some(Rational::from((p, q)))
}

pub mod serde_rational {
    use super::*;
    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_string(x))
    }
}

pub mod serde_rational_opt {
    use super::*;
    pub fn serialize<S: Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_str(&rational_string(v)),
            None => s.serialize_none(),
        }
    }
}

pub mod serde_integer {
    use super::*;
    pub fn serialize<S: Serializer>(x: &Integer, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }
}

/// Decimal rendering of a float with a fixed number of significant digits.
pub fn float_string(x: &Float) -> String {
    x.to_string_radix(10, Some(30))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn brute_legendre(a: i64, p: i64) -> i8 {
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| (x * x) % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn val2_examples() {
        assert_eq!(val2(&q(2, 1)), Val2::Finite(1));
        assert_eq!(val2(&q(0, 1)), Val2::Infinity);
        assert_eq!(val2(&q(3, 4)), Val2::Finite(-2));
        assert_eq!(val2(&q(-1, 6)), Val2::Finite(-1));
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(5, 1), 1);
        assert_eq!(kronecker(-7, 5), brute_legendre(-7, 5));
        assert_eq!(kronecker(-7, 5), -1);
        assert_eq!(kronecker(2, 17), 1);
        assert_eq!((6 * 6) % 17, 2);
        assert_eq!(kronecker(65, 2), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(4, 2), 0);
        assert_eq!(kronecker(-1, -1), -1);
    }

    #[test]
    fn kronecker_matches_enumeration_for_odd_primes() {
        for &p in &[3i64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 97] {
            for a in -60..60 {
                assert_eq!(kronecker(a, p), brute_legendre(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_big_agrees() {
        for a in -200i64..200 {
            for n in [1i64, 2, 3, 5, 8, 12, 65, 97] {
                assert_eq!(kronecker_big(&Integer::from(a), n), kronecker(a, n), "{a} {n}");
            }
        }
    }

    #[test]
    fn chi_examples() {
        let c5 = QuadChar::new(5).unwrap();
        assert_eq!(c5.value(4), 1);
        assert_eq!(c5.value(10), 0);
        let c65 = QuadChar::new(65).unwrap();
        let expected = brute_legendre(2, 5) * brute_legendre(2, 13);
        assert_eq!(expected, 1);
        assert_eq!(c65.value(2), expected);
        assert!(QuadChar::new(15).is_err());
        assert!(QuadChar::new(45).is_err());
    }

    fn f(x: f64) -> Float {
        Float::with_val(128, x)
    }

    #[test]
    fn reconstruct_examples() {
        let b = Integer::from(100);
        assert_eq!(rational_reconstruct(&f(0.1666666666667), &b, &f(1e-9)).unwrap(), q(1, 6));
        assert_eq!(rational_reconstruct(&f(0.5000000000001), &b, &f(1e-9)).unwrap(), q(1, 2));
        let r = rational_reconstruct(&f(0.3183), &Integer::from(10), &f(1e-5));
        assert!(matches!(r, Err(ArithError::NoRationalInRange { .. })));
        // brute oracle: nothing with q <= 10 is that close
        for den in 1..=10i64 {
            for num in 0..=den {
                assert!((0.3183 - num as f64 / den as f64).abs() > 1e-5);
            }
        }
        assert!(matches!(
            rational_reconstruct(&f(0.5), &b, &f(0.01)),
            Err(ArithError::ToleranceTooLoose { .. })
        ));
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_factor(&Integer::from(65)).unwrap(), (Integer::from(65), Integer::from(1)));
        assert_eq!(squarefree_factor(&Integer::from(50)).unwrap(), (Integer::from(2), Integer::from(5)));
        assert_eq!(21952, 64 * 343);
        assert_eq!(
            squarefree_factor(&Integer::from(-21952)).unwrap(),
            (Integer::from(-7), Integer::from(56))
        );
    }

    #[test]
    fn factor_large() {
        let p1 = Integer::from(1_000_003u64);
        let p2 = Integer::from(998_244_353u64);
        let n = Integer::from(&p1 * &p2) * &p2 * 12u32;
        let f = factor(&n).unwrap();
        assert_eq!(
            f,
            vec![
                (Integer::from(2), 2),
                (Integer::from(3), 1),
                (p1.clone(), 1),
                (p2.clone(), 2)
            ]
        );
    }

    #[test]
    fn sieve_tables() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        let spf = spf_table(100);
        assert_eq!(spf[91], 7);
        assert_eq!(spf[97], 97);
    }

    proptest! {
        #[test]
        fn val2_additive(a in -10_000i64..10_000, b in 1i64..10_000, c in -10_000i64..10_000, d in 1i64..10_000) {
            prop_assume!(a != 0 && c != 0);
            let x = q(a, b);
            let y = q(c, d);
            prop_assert_eq!(val2(&Rational::from(&x * &y)), val2(&x) + val2(&y));
            let s = Rational::from(&x + &y);
            prop_assert!(val2(&s) >= val2(&x).min(val2(&y)));
        }

        #[test]
        fn chi_multiplicative(k1 in -500i64..500, k2 in -500i64..500) {
            for m in [5i64, 13, 65, 29, 377] {
                let c = QuadChar::new(m).unwrap();
                prop_assert_eq!(c.value(k1 * k2), c.value(k1) * c.value(k2));
                prop_assert_eq!(c.value(k1 + m), c.value(k1));
                prop_assert_eq!(c.value(-1), 1);
            }
            let c65 = QuadChar::new(65).unwrap();
            let c5 = QuadChar::new(5).unwrap();
            let c13 = QuadChar::new(13).unwrap();
            prop_assert_eq!(c65.value(k1), c5.value(k1) * c13.value(k1));
        }

        #[test]
        fn reconstruct_roundtrip(n in -100_000i64..100_000, d in 1i64..1000) {
            let x = q(n, d);
            let xf = Float::with_val(128, &x);
            let tol = Float::with_val(128, 1e-20);
            let got = rational_reconstruct(&xf, &Integer::from(1000), &tol).unwrap();
            prop_assert_eq!(got, x);
        }

        #[test]
        fn squarefree_identity(n in -1_000_000i64..1_000_000) {
            prop_assume!(n != 0);
            let (s, t) = squarefree_factor(&Integer::from(n)).unwrap();
            prop_assert_eq!(Integer::from(&s * &t) * &t, Integer::from(n));
            prop_assert!(is_squarefree(s.clone().abs().to_u64().unwrap()));
        }
    }
}
