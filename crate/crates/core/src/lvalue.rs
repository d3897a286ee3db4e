//! Real periods by AGM, the central value L(E,1) by its rapidly convergent
//! series, and exact reconstruction of L(E,1)/Ω_E.

use std::cmp::Ordering;
use std::sync::Arc;

use rug::float::Constant;
use rug::{Assign, Float, Integer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{float_string, kronecker, rational_reconstruct, serde_rational, val2, ArithError, Rational, Val2};
use crate::curve::{conductor, cubic_real_roots, tamagawa_product, torsion_subgroup, ApTable, CurveModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LError {
    #[error("functional equation sign is -1: the central value vanishes")]
    SignMinusOne,
    #[error("series needs {needed} terms, above the configured cap {cap}")]
    TermCap { needed: usize, cap: usize },
    #[error(transparent)]
    Reconstruction(#[from] ArithError),
}

/// Working precision and series caps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericSettings {
    pub precision_bits: u32,
    pub max_terms: usize,
}

impl Default for NumericSettings {
    fn default() -> Self {
        NumericSettings {
            precision_bits: 128,
            max_terms: 20_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PeriodData {
    pub omega_plus: Float,
    /// Least positive multiple of i in the period lattice, divided by i.
    pub omega_minus: Float,
    pub real_components: u8,
    pub omega_bsd: Float,
}

impl Serialize for PeriodData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PeriodData", 4)?;
        st.serialize_field("omega_plus", &float_string(&self.omega_plus))?;
        st.serialize_field("omega_minus", &float_string(&self.omega_minus))?;
        st.serialize_field("real_components", &self.real_components)?;
        st.serialize_field("omega_bsd", &float_string(&self.omega_bsd))?;
        st.end()
    }
}

pub fn periods(e: &CurveModel) -> PeriodData {
    periods_with_prec(e, NumericSettings::default().precision_bits)
}

pub fn periods_with_prec(e: &CurveModel, prec: u32) -> PeriodData {
    let work = prec + 32;
    let four = Integer::from(4);
    let two_b4 = Integer::from(2 * &e.b4);
    let roots = cubic_real_roots([&four, &e.b2, &two_b4, &e.b6], work);
    let pi = Float::with_val(work, Constant::Pi);
    let agm = |a: Float, b: Float| -> Float { a.agm(&b) };
    let sqrt = |x: Float| -> Float { x.sqrt() };
    if e.disc.cmp0() == Ordering::Greater {
        let (e1, e2, e3) = (&roots[0], &roots[1], &roots[2]);
        let d13 = sqrt(Float::with_val(work, e1 - e3));
        let d12 = sqrt(Float::with_val(work, e1 - e2));
        let d23 = sqrt(Float::with_val(work, e2 - e3));
        let wp = Float::with_val(work, &pi / agm(d13.clone(), d12));
        let wm = Float::with_val(work, &pi / agm(d13, d23));
        let bsd = Float::with_val(work, &wp * 2u32);
        PeriodData {
            omega_plus: Float::with_val(prec, wp),
            omega_minus: Float::with_val(prec, wm),
            real_components: 2,
            omega_bsd: Float::with_val(prec, bsd),
        }
    } else {
        let e1 = &roots[0];
        let b2 = Float::with_val(work, &e.b2);
        let b4 = Float::with_val(work, &e.b4);
        // a = 3e1 + b2/4, b = sqrt(3e1² + b2·e1/2 + b4/2)
        let a = Float::with_val(work, 3u32 * e1) + Float::with_val(work, &b2 / 4u32);
        let bb = Float::with_val(work, 3u32 * Float::with_val(work, e1 * e1))
            + Float::with_val(work, &b2 * e1) / 2u32
            + Float::with_val(work, &b4 / 2u32);
        let b = sqrt(bb);
        let two_sqrt_b = Float::with_val(work, b.clone().sqrt() * 2u32);
        let plus = sqrt(Float::with_val(work, 2u32 * &b) + &a);
        let minus = sqrt(Float::with_val(work, 2u32 * &b) - &a);
        let two_pi = Float::with_val(work, &pi * 2u32);
        let wp = Float::with_val(work, &two_pi / agm(two_sqrt_b.clone(), plus));
        let wm = Float::with_val(work, &two_pi / agm(two_sqrt_b, minus));
        PeriodData {
            omega_plus: Float::with_val(prec, &wp),
            omega_minus: Float::with_val(prec, wm),
            real_components: 1,
            omega_bsd: Float::with_val(prec, wp),
        }
    }
}

/// A truncated central-value series.
#[derive(Debug, Clone)]
pub struct LSeries {
    pub value: Float,
    pub terms: usize,
    /// Bound on the omitted tail.
    pub tail_bound: f64,
    /// Functional-equation sign found numerically.
    pub sign: i8,
}

/// Number of terms T with 4x^{T+1}/(1−x) ≤ target, x = exp(−2π/√N).
pub fn terms_for(conductor: &Integer, target: f64) -> usize {
    let sqrt_n = conductor.to_f64().sqrt();
    let rate = 2.0 * std::f64::consts::PI / sqrt_n;
    let one_minus_x = -(-rate).exp_m1();
    // (T+1)·rate ≥ ln(4 / (target·(1−x)))
    let need = (4.0 / (target * one_minus_x)).ln() / rate;
    need.ceil().max(16.0) as usize
}

fn tail_bound(conductor: &Integer, terms: usize) -> f64 {
    let rate = 2.0 * std::f64::consts::PI / conductor.to_f64().sqrt();
    4.0 * (-(rate * (terms as f64 + 1.0))).exp() / -(-rate).exp_m1()
}

/// 2·Σ_{n≤T} χ_M(n)·a_n/n·exp(−2πn/√N) for the twist by M of the curve whose
/// coefficients are tabulated in `an` (M = 1 for the curve itself).
///
/// The sign of the functional equation is read off from F(1/t) = w·t²·F(t)
/// with F(t) = Σ a_n exp(−2πnt/√N), evaluated in the same pass.
pub fn series_value(an: &[i64], twist: i64, conductor: &Integer, terms: usize, prec: u32) -> Result<LSeries, LError> {
    assert!(an.len() > terms, "coefficient table too short");
    let work = prec + 16;
    let sqrt_n = Float::with_val(work, conductor).sqrt();
    let x = (-(Float::with_val(work, Constant::Pi) * 2u32 / &sqrt_n)).exp();
    let mut xn = Float::with_val(work, 1);
    let mut sum = Float::with_val(work, 0);
    let mut term = Float::new(work);

    let t0 = 1.25f64;
    let rate = 2.0 * std::f64::consts::PI / conductor.to_f64().sqrt();
    let (step_a, step_b) = ((-rate * t0).exp(), (-rate / t0).exp());
    let (mut pa, mut pb) = (1.0f64, 1.0f64);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    for (n, &a) in an.iter().enumerate().take(terms + 1).skip(1) {
        xn *= &x;
        pa *= step_a;
        pb *= step_b;
        let c = if twist == 1 { a } else { a * kronecker(twist, n as i64) as i64 };
        if c == 0 {
            continue;
        }
        term.assign(&xn * c);
        term /= n as u32;
        sum += &term;
        fa += c as f64 * pa;
        fb += c as f64 * pb;
    }
    // fb = F(1/t0), fa = F(t0)
    let scaled = t0 * t0 * fa;
    let sign = if (fb - scaled).abs() <= (fb + scaled).abs() { 1 } else { -1 };
    if sign == -1 {
        return Err(LError::SignMinusOne);
    }
    Ok(LSeries {
        value: Float::with_val(prec, sum * 2u32),
        terms,
        tail_bound: tail_bound(conductor, terms),
        sign,
    })
}

/// Numeric L(E,1) with absolute error at most `target_abs_error`.
pub fn l_value_at_1(e: &CurveModel, target_abs_error: f64) -> Result<LSeries, LError> {
    let n = conductor(e);
    let terms = terms_for(&n, target_abs_error);
    let an = crate::curve::an_coefficients(e, terms);
    series_value(&an, 1, &n, terms, NumericSettings::default().precision_bits)
}

/// Exact L(E,1)/Ω_E with the numeric evidence behind it.
#[derive(Debug, Clone, Serialize)]
pub struct RationalLValue {
    #[serde(with = "serde_rational")]
    pub value: Rational,
    pub ord2: Val2,
    #[serde(serialize_with = "ser_float")]
    pub numeric_estimate: Float,
    pub tolerance: f64,
    pub terms_used: usize,
    #[serde(with = "crate::arith::serde_integer")]
    pub denominator_bound: Integer,
    pub provenance: &'static str,
}

fn ser_float<S: serde::Serializer>(x: &Float, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&float_string(x))
}

/// Everything the reconstruction needs about one curve (possibly a twist
/// whose coefficients come from a base table).
pub struct LInput<'a> {
    pub curve: &'a CurveModel,
    pub conductor: Integer,
    pub table: &'a ApTable,
    pub twist: i64,
}

/// Default denominator cap (#tors)²·∏c_ℓ·2¹⁰.
pub fn default_denominator_bound(e: &CurveModel) -> Integer {
    let t = torsion_subgroup(e).order;
    Integer::from(t * t) * tamagawa_product(e) * 1024u32
}

pub fn algebraic_l_value(e: &CurveModel, denominator_bound: Option<Integer>) -> Result<RationalLValue, LError> {
    let table = ApTable::new(e);
    let input = LInput {
        curve: e,
        conductor: conductor(e),
        table: &table,
        twist: 1,
    };
    algebraic_l_value_from(&input, denominator_bound, &NumericSettings::default())
}

pub fn algebraic_l_value_from(
    input: &LInput<'_>,
    denominator_bound: Option<Integer>,
    settings: &NumericSettings,
) -> Result<RationalLValue, LError> {
    let bound = denominator_bound.unwrap_or_else(|| default_denominator_bound(input.curve));
    match reconstruct_once(input, &bound, settings.precision_bits, 1.0, settings) {
        Err(LError::Reconstruction(_)) => reconstruct_once(input, &bound, settings.precision_bits + 64, 1e-6, settings),
        other => other,
    }
}

fn reconstruct_once(
    input: &LInput<'_>,
    bound: &Integer,
    prec: u32,
    shrink: f64,
    settings: &NumericSettings,
) -> Result<RationalLValue, LError> {
    let per = periods_with_prec(input.curve, prec);
    let omega = per.omega_bsd.to_f64();
    let b = bound.to_f64();
    // total tolerance on L/Ω stays below 1/(2B²)
    let tol_total = shrink / (4.0 * b * b);
    let terms = terms_for(&input.conductor, tol_total * omega / 2.0);
    if terms > settings.max_terms {
        return Err(LError::TermCap {
            needed: terms,
            cap: settings.max_terms,
        });
    }
    let an: Arc<Vec<i64>> = input.table.get(terms);
    let series = series_value(&an, input.twist, &input.conductor, terms, prec)?;
    let ratio = Float::with_val(prec, &series.value / &per.omega_bsd);
    let rounding = (ratio.to_f64().abs() + terms as f64) * 2f64.powi(-(prec as i32 - 28));
    let tolerance = series.tail_bound / omega + rounding;
    let tol = Float::with_val(prec, tolerance);
    let value = rational_reconstruct(&ratio, bound, &tol)?;
    Ok(RationalLValue {
        ord2: val2(&value),
        value,
        numeric_estimate: ratio,
        tolerance,
        terms_used: terms,
        denominator_bound: bound.clone(),
        provenance: "reconstructed",
    })
}
