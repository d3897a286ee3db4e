//! Rational 2-torsion, 2-division fields and Vélu 2-isogenies.

use std::cmp::Ordering;

use rug::Integer;
use serde::Serialize;

use super::minimal::minimal_model;
use super::roots::{cubic_discriminant, integer_roots_monic_cubic};
use super::{CurveError, CurveModel};
use crate::arith::{kronecker, squarefree_factor, Rational};

/// The field ℚ(E[2]) when it is at most quadratic, or a cyclic cubic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "d", rename_all = "kebab-case")]
pub enum TwoDivisionField {
    Trivial,
    Quadratic(#[serde(with = "crate::arith::serde_integer")] Integer),
    CyclicCubic,
}

impl std::fmt::Display for TwoDivisionField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TwoDivisionField::Trivial => write!(f, "trivial"),
            TwoDivisionField::Quadratic(d) => write!(f, "Q(sqrt({d}))"),
            TwoDivisionField::CyclicCubic => write!(f, "degree>2"),
        }
    }
}

/// Monic form X³ + b2·X² + 8b4·X + 16b6 of the 2-division cubic, X = 4x.
fn monic_cubic(e: &CurveModel) -> [Integer; 3] {
    [e.b2.clone(), Integer::from(8 * &e.b4), Integer::from(16 * &e.b6)]
}

/// x-coordinates of the rational points of order 2, ascending.
pub fn two_torsion_x(e: &CurveModel) -> Vec<Rational> {
    let [c2, c1, c0] = monic_cubic(e);
    integer_roots_monic_cubic(&c2, &c1, &c0)
        .into_iter()
        .map(|x| Rational::from((x, 4)))
        .collect()
}

pub fn two_division_field(e: &CurveModel) -> Result<TwoDivisionField, CurveError> {
    let [c2, c1, c0] = monic_cubic(e);
    let roots = integer_roots_monic_cubic(&c2, &c1, &c0);
    match roots.len() {
        0 => {
            let one = Integer::from(1);
            let d = cubic_discriminant([&one, &c2, &c1, &c0]);
            if d.cmp0() == Ordering::Greater && d.is_perfect_square() {
                Ok(TwoDivisionField::CyclicCubic)
            } else {
                Err(CurveError::Degree6Field)
            }
        }
        1 => {
            let x0 = &roots[0];
            // quotient X² + (c2 + x0)·X + (c1 + x0·(c2 + x0))
            let b = Integer::from(&c2 + x0);
            let c = Integer::from(&c1 + Integer::from(x0 * &b));
            let disc = Integer::from(&b * &b) - Integer::from(4 * &c);
            let (s, _) = squarefree_factor(&disc).expect("nonzero discriminant");
            Ok(TwoDivisionField::Quadratic(s))
        }
        _ => Ok(TwoDivisionField::Trivial),
    }
}

/// Minimal model of E/⟨T⟩ where T is the rational 2-torsion point with the
/// smallest x-coordinate.
pub fn two_isogenous_curve(e: &CurveModel) -> Result<CurveModel, CurveError> {
    let xs = two_torsion_x(e);
    let x0 = xs.first().ok_or(CurveError::NoRationalTwoTorsion)?.clone();
    let q = |x: &Integer| Rational::from(x);
    let (a1, a2, a3, a4, a6) = (q(e.a1()), q(e.a2()), q(e.a3()), q(e.a4()), q(e.a6()));
    let y0 = -(Rational::from(&a1 * &x0) + &a3) / 2u32;
    let v = Rational::from(3 * Rational::from(&x0 * &x0)) + Rational::from(2 * Rational::from(&a2 * &x0)) + &a4
        - Rational::from(&a1 * &y0);
    let w = Rational::from(&x0 * &v);
    let new_a4 = a4 - Rational::from(5 * &v);
    let new_a6 = a6 - Rational::from(q(&e.b2) * &v) - Rational::from(7 * &w);
    // scale by u = 1/2 to clear the denominators (powers of 2 up to 64)
    let scale = |x: Rational, k: u32| -> Integer {
        let y = x * Rational::from(Integer::from(1) << (k as usize));
        assert!(*y.denom() == 1, "Vélu coefficients clear with u = 1/2");
        y.into_numer_denom().0
    };
    let raw = CurveModel::new([
        scale(a1, 1),
        scale(a2, 2),
        scale(a3, 3),
        scale(new_a4, 4),
        scale(new_a6, 6),
    ])?;
    Ok(minimal_model(&raw)?.0)
}

/// Residue class of a_q mod 4 predicted by the 2-division data of X₀(14):
/// q mod 8 together with the splitting of q in ℚ(√−7).
pub fn classify_aq_mod4(q: u64) -> u8 {
    assert!(q % 2 == 1 && q % 7 != 0, "q must be a good odd prime for conductor 14");
    let splits = kronecker(-7, q as i64) == 1;
    match q % 8 {
        1 => 2,
        3 => {
            if splits {
                0
            } else {
                2
            }
        }
        5 => {
            if splits {
                2
            } else {
                0
            }
        }
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::an_coefficients;

    fn curve(a: [i64; 5]) -> CurveModel {
        CurveModel::from_i64(a).unwrap()
    }

    #[test]
    fn isogenous_curve_of_x0_14() {
        let e = curve([1, 0, 1, 4, -6]);
        let e2 = two_isogenous_curve(&e).unwrap();
        assert_eq!(e2, curve([1, 0, 1, -36, -70]));
        assert_eq!(two_division_field(&e2).unwrap(), TwoDivisionField::Quadratic(Integer::from(2)));
    }

    #[test]
    fn division_fields_of_catalog() {
        let cases: [([i64; 5], i64, i64); 5] = [
            ([1, 0, 1, 4, -6], -7, 2),
            ([1, 0, 0, -3, 1], 17, 2),
            ([0, -1, 0, 0, -4], -7, 2),
            ([1, -1, 0, -15, 8], 33, 3),
            ([1, -1, 0, -10, -12], -23, 2),
        ];
        for (a, d, d2) in cases {
            let e = curve(a);
            assert_eq!(two_division_field(&e).unwrap(), TwoDivisionField::Quadratic(Integer::from(d)), "{a:?}");
            let e2 = two_isogenous_curve(&e).unwrap();
            assert_eq!(two_division_field(&e2).unwrap(), TwoDivisionField::Quadratic(Integer::from(d2)), "{a:?}'");
        }
    }

    #[test]
    fn two_torsion_point_lies_on_curve() {
        let e = curve([0, -1, 0, 0, -4]);
        let xs = two_torsion_x(&e);
        assert_eq!(xs, vec![Rational::from(2)]);
        let y = -(Rational::from(e.a1() * &xs[0]) + Rational::from(e.a3())) / 2u32;
        assert!(e.contains_point(&xs[0], &y));
    }

    #[test]
    fn irreducible_cubic_errors() {
        // 11a1 has trivial 2-torsion and an S3 2-division field
        let e = curve([0, -1, 1, -10, -20]);
        assert_eq!(two_division_field(&e), Err(CurveError::Degree6Field));
        assert_eq!(two_isogenous_curve(&e), Err(CurveError::NoRationalTwoTorsion));
    }

    #[test]
    fn isogenous_curves_share_an() {
        for a in [[1, 0, 1, 4, -6], [1, -1, 0, -15, 8], [1, -1, 0, -10, -12], [1, 0, 0, -3, 1], [0, -1, 0, 0, -4]] {
            let e = curve(a);
            let e2 = two_isogenous_curve(&e).unwrap();
            assert_eq!(an_coefficients(&e, 1000), an_coefficients(&e2, 1000), "{a:?}");
        }
    }

    #[test]
    fn aq_table_examples() {
        assert_eq!(classify_aq_mod4(5), 0);
        assert_eq!(classify_aq_mod4(11), 0);
        assert_eq!(classify_aq_mod4(17), 2);
    }
}
