//! Elliptic curves over ℚ given by integral Weierstrass models.

mod catalog;
mod count;
mod isogeny;
mod minimal;
mod roots;
mod tate;
mod torsion;

pub use catalog::{parse_catalog, Catalog, CatalogEntry, DEFAULT_CATALOG};
pub use count::{an_coefficients, ap_bsgs, ap_count, ap_naive, twisted_an, ApTable, TraceRecord};
pub use isogeny::{classify_aq_mod4, two_division_field, two_isogenous_curve, two_torsion_x, TwoDivisionField};
pub use minimal::{minimal_model, quadratic_twist, Transform};
pub use roots::{cubic_real_roots, integer_roots_monic_cubic};
pub use tate::{conductor, reduction_data, tamagawa_product, KodairaType, ReductionData, ReductionKind};
pub use torsion::{torsion_subgroup, TorsionGroup};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rug::Integer;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("singular curve: discriminant is zero")]
    SingularCurve,
    #[error("malformed curve input: {0}")]
    Parse(String),
    #[error("the 2-division cubic has no rational root")]
    NoRationalTwoTorsion,
    #[error("the 2-division field has degree 6")]
    Degree6Field,
    #[error("change of variables does not give an integral model")]
    NonIntegral,
    #[error("twist parameter must be a nonzero squarefree integer, got {0}")]
    BadTwist(String),
}

/// Integral Weierstrass model y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6
/// together with its standard invariants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveModel {
    a: [Integer; 5],
    pub b2: Integer,
    pub b4: Integer,
    pub b6: Integer,
    pub b8: Integer,
    pub c4: Integer,
    pub c6: Integer,
    pub disc: Integer,
}

impl CurveModel {
    pub fn new(a: [Integer; 5]) -> Result<Self, CurveError> {
        let [a1, a2, a3, a4, a6] = &a;
        let b2 = Integer::from(a1 * a1) + Integer::from(4 * a2);
        let b4 = Integer::from(2 * a4) + Integer::from(a1 * a3);
        let b6 = Integer::from(a3 * a3) + Integer::from(4 * a6);
        let b8 = Integer::from(a1 * a1) * a6 + Integer::from(4 * a2) * a6 - Integer::from(a1 * a3) * a4
            + Integer::from(a2 * a3) * a3
            - Integer::from(a4 * a4);
        let c4 = Integer::from(&b2 * &b2) - Integer::from(24 * &b4);
        let c6 = -Integer::from(&b2 * &b2) * &b2 + Integer::from(36 * &b2) * &b4 - Integer::from(216 * &b6);
        let disc = -Integer::from(&b2 * &b2) * &b8 - Integer::from(8 * &b4) * &b4 * &b4 - Integer::from(27 * &b6) * &b6
            + Integer::from(9 * &b2) * &b4 * &b6;
        if disc.cmp0() == Ordering::Equal {
            return Err(CurveError::SingularCurve);
        }
        Ok(CurveModel { a, b2, b4, b6, b8, c4, c6, disc })
    }

    pub fn from_i64(a: [i64; 5]) -> Result<Self, CurveError> {
        Self::new(a.map(Integer::from))
    }

    pub fn a1(&self) -> &Integer {
        &self.a[0]
    }
    pub fn a2(&self) -> &Integer {
        &self.a[1]
    }
    pub fn a3(&self) -> &Integer {
        &self.a[2]
    }
    pub fn a4(&self) -> &Integer {
        &self.a[3]
    }
    pub fn a6(&self) -> &Integer {
        &self.a[4]
    }

    pub fn coefficients(&self) -> &[Integer; 5] {
        &self.a
    }

    pub fn j_invariant(&self) -> Rational {
        let c4_3 = Integer::from(&self.c4 * &self.c4) * &self.c4;
        Rational::from((c4_3, self.disc.clone()))
    }

    /// Applies x = u²x' + r, y = u³y' + s·u²x' + t and returns the new model.
    pub fn transform(&self, t: &Transform) -> Result<CurveModel, CurveError> {
        let q = |x: &Integer| Rational::from(x);
        let (a1, a2, a3, a4, a6) = (q(self.a1()), q(self.a2()), q(self.a3()), q(self.a4()), q(self.a6()));
        let (u, r, s, tt) = (&t.u, &t.r, &t.s, &t.t);
        let n1 = a1.clone() + Rational::from(2 * s);
        let n2 = a2.clone() - Rational::from(s * &a1) + Rational::from(3 * r) - Rational::from(s * s);
        let n3 = a3.clone() + Rational::from(r * &a1) + Rational::from(2 * tt);
        let n4 = a4.clone() - Rational::from(s * &a3) + Rational::from(2 * r) * &a2
            - (tt.clone() + Rational::from(r * s)) * &a1
            + Rational::from(3 * r) * r
            - Rational::from(2 * s) * tt;
        let n6 = a6 + Rational::from(r * &a4) + Rational::from(r * r) * &a2 + Rational::from(r * r) * r
            - Rational::from(tt * &a3)
            - Rational::from(tt * tt)
            - Rational::from(r * tt) * &a1;
        let mut out: Vec<Integer> = Vec::with_capacity(5);
        for (val, k) in [(n1, 1u32), (n2, 2), (n3, 3), (n4, 4), (n6, 6)] {
            let scaled = val / rpow(u, k);
            if *scaled.denom() != 1 {
                return Err(CurveError::NonIntegral);
            }
            out.push(scaled.into_numer_denom().0);
        }
        let a: [Integer; 5] = out.try_into().expect("five coefficients");
        CurveModel::new(a)
    }

    /// Short model y² = x³ − 27c4·x − 54c6, isomorphic over ℚ.
    pub fn short_model(&self) -> CurveModel {
        let z = Integer::new();
        CurveModel::new([
            z.clone(),
            z.clone(),
            z,
            Integer::from(-27 * &self.c4),
            Integer::from(-54 * &self.c6),
        ])
        .expect("isomorphic to a nonsingular curve")
    }

    pub fn contains_point(&self, x: &Rational, y: &Rational) -> bool {
        let lhs = Rational::from(y * y) + Rational::from(self.a1() * x) * y + Rational::from(self.a3() * y);
        let x2 = Rational::from(x * x);
        let rhs = Rational::from(&x2 * x) + Rational::from(self.a2() * &x2) + Rational::from(self.a4() * x)
            + Rational::from(self.a6());
        lhs == rhs
    }

    pub fn is_isomorphic(&self, other: &CurveModel) -> bool {
        match (minimal_model(self), minimal_model(other)) {
            (Ok((m1, _)), Ok((m2, _))) => m1 == m2,
            _ => false,
        }
    }
}

pub(crate) fn rpow(u: &Rational, k: u32) -> Rational {
    let mut out = Rational::from(1);
    for _ in 0..k {
        out *= u;
    }
    out
}

impl fmt::Display for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{},{}]", self.a[0], self.a[1], self.a[2], self.a[3], self.a[4])
    }
}

impl Serialize for CurveModel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for CurveModel {
    type Err = CurveError;
    fn from_str(s: &str) -> Result<Self, CurveError> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let parts: Vec<&str> = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        if parts.len() != 5 {
            return Err(CurveError::Parse(format!("expected 5 coefficients, got {}", parts.len())));
        }
        let mut a = Vec::with_capacity(5);
        for p in parts {
            a.push(Integer::from_str(p).map_err(|_| CurveError::Parse(format!("not an integer: {p}")))?);
        }
        CurveModel::new(a.try_into().expect("five coefficients"))
    }
}

/// Reduces a big integer modulo a machine-size prime.
pub(crate) fn rem_u64(x: &Integer, p: u64) -> u64 {
    let r = Integer::from(x % p);
    let r = if r.cmp0() == Ordering::Less { r + p } else { r };
    r.to_u64().expect("residue fits")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_of_x0_14() {
        let e = CurveModel::from_i64([1, 0, 1, 4, -6]).unwrap();
        assert_eq!(e.disc, Integer::from(-(64 * 343)));
        assert_eq!(e.c4, -215);
        assert_eq!(e.c6, 5291);
        let lhs = Integer::from(&e.c4 * &e.c4) * &e.c4 - Integer::from(&e.c6 * &e.c6);
        assert_eq!(lhs, Integer::from(1728 * &e.disc));
    }

    #[test]
    fn parse_and_display() {
        let e: CurveModel = "[1,-1,0,-10,-12]".parse().unwrap();
        assert_eq!(e.to_string(), "[1,-1,0,-10,-12]");
        let e2: CurveModel = "1 -1 0 -10 -12".parse().unwrap();
        assert_eq!(e, e2);
        assert_eq!("[0,0,0,0,0]".parse::<CurveModel>(), Err(CurveError::SingularCurve));
        assert!(matches!("[1,2,3]".parse::<CurveModel>(), Err(CurveError::Parse(_))));
    }

    #[test]
    fn transform_preserves_j() {
        let e = CurveModel::from_i64([1, 0, 1, 4, -6]).unwrap();
        let t = Transform {
            u: Rational::from(1),
            r: Rational::from(3),
            s: Rational::from(-2),
            t: Rational::from(5),
        };
        let e2 = e.transform(&t).unwrap();
        assert_eq!(e2.j_invariant(), e.j_invariant());
        assert_eq!(e2.disc, e.disc);
        assert!(e.is_isomorphic(&e2));
    }
}
