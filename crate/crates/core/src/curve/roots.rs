//! Real roots of integral cubics at arbitrary precision.

use std::cmp::Ordering;

use rug::float::Constant;
use rug::{Float, Integer};

/// Real roots of c3·x³ + c2·x² + c1·x + c0 (c3 ≠ 0), sorted descending,
/// accurate to roughly `prec` bits.
pub fn cubic_real_roots(c: [&Integer; 4], prec: u32) -> Vec<Float> {
    let work = prec + 64;
    let f = |x: &Integer| Float::with_val(work, x);
    let (c3, c2, c1, c0) = (f(c[0]), f(c[1]), f(c[2]), f(c[3]));
    let a = Float::with_val(work, &c2 / &c3);
    let b = Float::with_val(work, &c1 / &c3);
    let cc = Float::with_val(work, &c0 / &c3);
    // depressed cubic t³ + p t + q with x = t − a/3
    let a2 = Float::with_val(work, &a * &a);
    let p = Float::with_val(work, &b - Float::with_val(work, &a2 / 3u32));
    let q = Float::with_val(work, Float::with_val(work, 2u32 * Float::with_val(work, &a2 * &a)) / 27u32)
        - Float::with_val(work, &a * &b) / 3u32
        + &cc;
    let shift = Float::with_val(work, &a / 3u32);

    // sign of the discriminant from exact integer arithmetic
    let disc = cubic_discriminant(c);
    let mut roots: Vec<Float> = Vec::new();
    if disc.cmp0() == Ordering::Greater {
        let m = Float::with_val(work, -Float::with_val(work, &p / 3u32)).sqrt();
        let mut arg = Float::with_val(work, 3u32 * Float::with_val(work, &q)) / Float::with_val(work, 2u32 * &p)
            * Float::with_val(work, Float::with_val(work, -3i32) / &p).sqrt();
        if arg > 1 {
            arg = Float::with_val(work, 1);
        }
        if arg < -1 {
            arg = Float::with_val(work, -1);
        }
        let theta = arg.acos() / 3u32;
        let two_pi_3 = Float::with_val(work, Constant::Pi) * 2u32 / 3u32;
        for k in 0..3u32 {
            let ang = Float::with_val(work, &theta - Float::with_val(work, &two_pi_3 * k));
            let t = Float::with_val(work, 2u32 * &m) * ang.cos();
            roots.push(t - &shift);
        }
    } else {
        let inner = Float::with_val(work, Float::with_val(work, &q * &q) / 4u32)
            + Float::with_val(work, Float::with_val(work, &p * &p) * &p) / 27u32;
        let s = inner.sqrt();
        let half_q = Float::with_val(work, &q / 2u32);
        let u = Float::with_val(work, -Float::with_val(work, &half_q) + &s).cbrt();
        let v = Float::with_val(work, -half_q - s).cbrt();
        roots.push(u + v - &shift);
    }
    // Newton polish on the original polynomial
    for r in roots.iter_mut() {
        for _ in 0..8 {
            let fx = Float::with_val(work, &c3 * &*r) + &c2;
            let fx = Float::with_val(work, fx * &*r) + &c1;
            let fx = Float::with_val(work, fx * &*r) + &c0;
            let d = Float::with_val(work, 3u32 * Float::with_val(work, &c3 * &*r)) + Float::with_val(work, 2u32 * &c2);
            let d = Float::with_val(work, d * &*r) + &c1;
            if d.is_zero() {
                break;
            }
            let step = Float::with_val(work, fx / d);
            *r -= step;
        }
    }
    roots.sort_by(|x, y| y.partial_cmp(x).unwrap_or(Ordering::Equal));
    roots.into_iter().map(|r| Float::with_val(prec, r)).collect()
}

/// Discriminant of c3·x³ + c2·x² + c1·x + c0.
pub fn cubic_discriminant(c: [&Integer; 4]) -> Integer {
    let (a, b, cc, d) = (c[0], c[1], c[2], c[3]);
    let t1 = Integer::from(b * b) * cc * cc;
    let t2 = Integer::from(4 * a) * cc * cc * cc;
    let t3 = Integer::from(4 * b) * b * b * d;
    let t4 = Integer::from(27 * a) * a * d * d;
    let t5 = Integer::from(18 * a) * b * cc * d;
    t1 - t2 - t3 - t4 + t5
}

/// Integer roots of x³ + c2·x² + c1·x + c0, ascending, found by rounding
/// high-precision real roots and checking exactly.
pub fn integer_roots_monic_cubic(c2: &Integer, c1: &Integer, c0: &Integer) -> Vec<Integer> {
    let one = Integer::from(1);
    let bits = [c2, c1, c0].iter().map(|x| x.significant_bits()).max().unwrap_or(1);
    let prec = 2 * bits + 64;
    let mut out: Vec<Integer> = Vec::new();
    for r in cubic_real_roots([&one, c2, c1, c0], prec) {
        let Some(z) = r.round().to_integer() else { continue };
        let val = Integer::from(&z * &z) * &z + Integer::from(c2 * &z) * &z + Integer::from(c1 * &z) + c0;
        if val.cmp0() == Ordering::Equal && !out.contains(&z) {
            out.push(z);
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_split_cubic() {
        // (x−1)(x+2)(x−5) = x³ − 4x² − 7x + 10
        let r = integer_roots_monic_cubic(&Integer::from(-4), &Integer::from(-7), &Integer::from(10));
        assert_eq!(r, vec![Integer::from(-2), Integer::from(1), Integer::from(5)]);
    }

    #[test]
    fn one_real_root() {
        // x³ − 2 has one real root 2^(1/3)
        let z = Integer::new();
        let roots = cubic_real_roots([&Integer::from(1), &z, &z, &Integer::from(-2)], 128);
        assert_eq!(roots.len(), 1);
        let expect = Float::with_val(128, 2).cbrt();
        assert!(Float::with_val(128, &roots[0] - &expect).abs() < Float::with_val(128, 1e-35));
        assert!(integer_roots_monic_cubic(&z, &z, &Integer::from(-2)).is_empty());
    }

    #[test]
    fn large_coefficients() {
        // (x − 10^15)(x + 3)(x − 7)
        let big = Integer::from(10u64.pow(15));
        let c2 = -Integer::from(&big) - 4;
        let c1 = Integer::from(4 * &big) - 21;
        let c0 = Integer::from(21 * &big);
        let r = integer_roots_monic_cubic(&c2, &c1, &c0);
        assert_eq!(r, vec![Integer::from(-3), Integer::from(7), big]);
    }
}
