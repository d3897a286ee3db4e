//! Global minimal models and quadratic twists.

use rug::ops::DivRounding;
use rug::Integer;
use serde::Serialize;

use super::tate::tate;
use super::{CurveError, CurveModel};
use crate::arith::{factor, is_squarefree, serde_rational, Rational};

/// Change of variables x = u²x' + r, y = u³y' + s·u²x' + t.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transform {
    #[serde(with = "serde_rational")]
    pub u: Rational,
    #[serde(with = "serde_rational")]
    pub r: Rational,
    #[serde(with = "serde_rational")]
    pub s: Rational,
    #[serde(with = "serde_rational")]
    pub t: Rational,
}

impl Transform {
    pub fn identity() -> Self {
        Transform {
            u: Rational::from(1),
            r: Rational::new(),
            s: Rational::new(),
            t: Rational::new(),
        }
    }
}

fn floor_div(a: &Integer, b: i64) -> Integer {
    a.clone().div_floor(Integer::from(b))
}

/// The unique model with a1, a3 ∈ {0, 1} and a2 ∈ {−1, 0, 1} among those
/// related to `e` by integral shifts.
fn normalize(e: &CurveModel) -> CurveModel {
    // s: a1 + 2s ∈ {0, 1}
    let s = -floor_div(e.a1(), 2);
    // r: a2 − s·a1 − s² + 3r ∈ {−1, 0, 1}
    let base = Integer::from(e.a2() - Integer::from(&s * e.a1())) - Integer::from(&s * &s);
    let r = -floor_div(&(base + 1), 3);
    // t: a3 + r·a1 + 2t ∈ {0, 1}
    let a3r = Integer::from(e.a3() + Integer::from(&r * e.a1()));
    let t = -floor_div(&a3r, 2);
    e.transform(&Transform {
        u: Rational::from(1),
        r: Rational::from(r),
        s: Rational::from(s),
        t: Rational::from(t),
    })
    .expect("integral shift")
}

/// Reduced global minimal model and the transformation reaching it.
pub fn minimal_model(e: &CurveModel) -> Result<(CurveModel, Transform), CurveError> {
    let mut cur = e.clone();
    for (p, v) in factor(&e.disc).map_err(|_| CurveError::SingularCurve)? {
        if v >= 12 {
            cur = tate(&cur, &p).1;
        }
    }
    let min = normalize(&cur);
    let ratio = Integer::from(&e.disc / &min.disc);
    let (u, exact) = ratio.clone().abs().root_rem(Integer::new(), 12);
    debug_assert!(exact.cmp0() == std::cmp::Ordering::Equal);
    let u = Rational::from(u);
    let s = (Rational::from(&u * min.a1()) - Rational::from(e.a1())) / 2u32;
    let r = (Rational::from(rpow2(&u) * Rational::from(&min.b2)) - Rational::from(&e.b2)) / 12u32;
    let t = (Rational::from(rpow2(&u) * &u) * Rational::from(min.a3())
        - Rational::from(e.a3())
        - Rational::from(&r * e.a1()))
        / 2u32;
    let tr = Transform { u, r, s, t };
    debug_assert_eq!(e.transform(&tr).as_ref(), Ok(&min));
    Ok((min, tr))
}

fn rpow2(u: &Rational) -> Rational {
    Rational::from(u * u)
}

/// Minimal model of the quadratic twist by a squarefree m.
pub fn quadratic_twist(e: &CurveModel, m: &Integer) -> Result<CurveModel, CurveError> {
    let am = m.clone().abs();
    let ok = am.to_u64().map(is_squarefree).unwrap_or_else(|| {
        factor(&am).map(|f| f.iter().all(|(_, k)| *k == 1)).unwrap_or(false)
    });
    if !ok {
        return Err(CurveError::BadTwist(m.to_string()));
    }
    let m2 = Integer::from(m * m);
    let m3 = Integer::from(&m2 * m);
    let z = Integer::new();
    let raw = CurveModel::new([
        z.clone(),
        z.clone(),
        z,
        Integer::from(-27 * &e.c4) * &m2,
        Integer::from(-54 * &e.c6) * &m3,
    ])?;
    Ok(minimal_model(&raw)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::conductor;
    use rug::ops::Pow;

    fn curve(a: [i64; 5]) -> CurveModel {
        CurveModel::from_i64(a).unwrap()
    }

    #[test]
    fn catalog_models_are_minimal() {
        for a in [[1, 0, 1, 4, -6], [0, -1, 0, 0, -4], [1, 0, 0, -3, 1], [1, -1, 0, -15, 8], [1, -1, 0, -10, -12]] {
            let e = curve(a);
            let (m, t) = minimal_model(&e).unwrap();
            assert_eq!(m, e);
            assert_eq!(t.u, 1);
        }
    }

    #[test]
    fn rescaled_model_recovers_minimal() {
        // 14A1 with u = 6: a_i·6^i, then shifted
        let e = curve([6, 0, 216, 4 * 1296, -6 * 46656]);
        let (m, t) = minimal_model(&e).unwrap();
        assert_eq!(m, curve([1, 0, 1, 4, -6]));
        assert_eq!(t.u, 6);
        let u12 = Integer::from(6).pow(12);
        assert_eq!(Integer::from(&m.disc * &u12), e.disc);
    }

    #[test]
    fn twist_of_x0_14_by_5() {
        let e = curve([1, 0, 1, 4, -6]);
        let raw = CurveModel::new([
            Integer::new(),
            Integer::new(),
            Integer::new(),
            Integer::from(-27 * &e.c4) * 25u32,
            Integer::from(-54 * &e.c6) * 125u32,
        ])
        .unwrap();
        let tw = quadratic_twist(&e, &Integer::from(5)).unwrap();
        // Δ_min = 5⁶·Δ_E, Δ_raw / Δ_min is a 12th power
        assert_eq!(tw.disc, Integer::from(-(64 * 343)) * 15625u32);
        let ratio = Integer::from(&raw.disc / &tw.disc);
        assert!(ratio.is_perfect_power());
        assert_eq!(ratio.clone().root(12).pow(12), ratio);
        assert_eq!(conductor(&tw), 350);
        let back = quadratic_twist(&tw, &Integer::from(5)).unwrap();
        assert_eq!(back, e);
        assert_eq!(quadratic_twist(&e, &Integer::from(1)).unwrap(), e);
        assert!(quadratic_twist(&e, &Integer::from(50)).is_err());
    }

    #[test]
    fn twist_conductor_is_m_squared_c() {
        let e = curve([1, -1, 0, -10, -12]);
        for m in [5i64, 13, 37, 65, -3, 185] {
            let tw = quadratic_twist(&e, &Integer::from(m)).unwrap();
            let expected = Integer::from(46) * Integer::from(m * m);
            assert_eq!(conductor(&tw), expected, "m={m}");
        }
    }
}
