//! Weight-2 modular symbols for Γ₀(N) over ℚ.
//!
//! Manin symbols (c:d) ∈ P¹(ℤ/N) modulo the 2- and 3-term relations give the
//! relative homology; the boundary map cuts out the cuspidal part. The plus
//! functional of an elliptic curve is the star-invariant Hecke eigenvector of
//! the dual space, scaled so that it returns Re⟨{α,β}, f⟩/Ω_f^+ exactly.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::RwLock;

use rug::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{factor_u64, kronecker, primes_up_to, serde_rational, val2, Convergents, Rational, Val2};
use crate::curve::{ap_count, conductor, CurveModel};
use crate::linalg::{integer_left_kernel, quotient_coordinates, right_kernel, Matrix, SparseEchelon, SparseRow};
use crate::lvalue::{algebraic_l_value, periods, LError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModsymError {
    #[error("no one-dimensional rational eigenspace matches the a_p of the curve at level {level}")]
    EigenspaceNotFound { level: u64 },
    #[error("calibration failed: {0}")]
    CalibrationMismatch(String),
    #[error("level {level} exceeds the configured cap {cap}")]
    LevelTooLarge { level: u64, cap: u64 },
    #[error("modulus {0} must be positive, odd, squarefree and coprime to the level")]
    BadModulus(u64),
    #[error(transparent)]
    LValue(#[from] LError),
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.signum() * a, a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// The presentation of modular symbols of weight 2 for Γ₀(N).
#[derive(Debug)]
pub struct ManinSymbolSpace {
    pub level: u64,
    /// Canonical representatives (c, d) of P¹(ℤ/N).
    pub symbols: Vec<(u64, u64)>,
    index: Vec<u32>,
    /// Generators left free by the relations.
    pub free: Vec<usize>,
    /// Coordinates of every symbol in terms of the free generators.
    coords: Vec<Vec<(usize, Rational)>>,
    /// Cusp class representatives (numerator, denominator).
    pub cusps: Vec<(i64, i64)>,
    /// Per symbol: (cusp of g∞, cusp of g0); the boundary is [g∞] − [g0].
    boundary: Vec<(usize, usize)>,
    pub cuspidal_dimension: usize,
}

impl ManinSymbolSpace {
    pub fn dimension(&self) -> usize {
        self.free.len()
    }

    /// Index of the class of (c : d).
    pub fn index_of(&self, c: i64, d: i64) -> usize {
        let n = self.level as i64;
        let (c, d) = (c.rem_euclid(n), d.rem_euclid(n));
        let i = self.index[(c * n + d) as usize];
        assert!(i != u32::MAX, "({c}:{d}) is not in P¹(Z/{n})");
        i as usize
    }

    pub fn coordinates(&self, i: usize) -> &[(usize, Rational)] {
        &self.coords[i]
    }

    /// Matrix of a right action (c:d) ↦ Σ (c:d)·g on the free generators.
    fn action_matrix(&self, mats: &[[i64; 4]]) -> Matrix {
        let k = self.free.len();
        let mut out = vec![vec![Rational::new(); k]; k];
        for (row, &g) in self.free.iter().enumerate() {
            let (c, d) = (self.symbols[g].0 as i64, self.symbols[g].1 as i64);
            for m in mats {
                let j = self.index_of(c * m[0] + d * m[2], c * m[1] + d * m[3]);
                for (f, v) in &self.coords[j] {
                    out[row][*f] += v;
                }
            }
        }
        out
    }

    /// Matrix of the star involution (c:d) ↦ (−c:d).
    pub fn star_matrix(&self) -> Matrix {
        self.action_matrix(&[[-1, 0, 0, 1]])
    }
}

fn normalize_cusp(p: i64, q: i64) -> (i64, i64) {
    let g = gcd(p, q).max(1);
    let (mut p, mut q) = (p / g, q / g);
    if q < 0 || (q == 0 && p < 0) {
        p = -p;
        q = -q;
    }
    if q == 0 {
        (1, 0)
    } else {
        (p, q)
    }
}

/// Γ₀(N)-equivalence of reduced cusps: s1·q2 ≡ s2·q1 mod gcd(q1·q2, N) where
/// s_i·p_i ≡ 1 mod q_i.
fn cusps_equivalent(a: (i64, i64), b: (i64, i64), n: i64) -> bool {
    let (p1, q1) = normalize_cusp(a.0, a.1);
    let (p2, q2) = normalize_cusp(b.0, b.1);
    let inv = |p: i64, q: i64| -> i64 {
        if q <= 1 {
            return if q == 0 { p } else { 0 };
        }
        ext_gcd(p.rem_euclid(q), q).1.rem_euclid(q)
    };
    let (s1, s2) = (inv(p1, q1), inv(p2, q2));
    let g = gcd(q1 * q2, n);
    if g == 0 {
        return s1 == s2;
    }
    (s1 * q2 - s2 * q1).rem_euclid(g) == 0
}

pub fn build_space(n: u64) -> ManinSymbolSpace {
    assert!(n >= 1);
    let ni = n as i64;
    let size = (n * n) as usize;
    let mut index = vec![u32::MAX; size];
    let mut symbols = Vec::new();
    let units: Vec<i64> = (0..ni).filter(|&u| gcd(u, ni) == 1).collect::<Vec<_>>();
    let units = if n == 1 { vec![0] } else { units };
    for c in 0..ni {
        for d in 0..ni {
            if index[(c * ni + d) as usize] != u32::MAX || gcd(gcd(c, d), ni) != 1 {
                continue;
            }
            let id = symbols.len() as u32;
            symbols.push((c as u64, d as u64));
            for &u in &units {
                let (cc, dd) = ((u * c).rem_euclid(ni), (u * d).rem_euclid(ni));
                index[(cc * ni + dd) as usize] = id;
            }
        }
    }
    let look = |c: i64, d: i64| index[(c.rem_euclid(ni) * ni + d.rem_euclid(ni)) as usize] as usize;

    let mut rel = SparseEchelon::new();
    let mut push = |entries: &[usize]| {
        let mut acc: Vec<(usize, i64)> = Vec::new();
        for &e in entries {
            match acc.iter_mut().find(|x| x.0 == e) {
                Some(x) => x.1 += 1,
                None => acc.push((e, 1)),
            }
        }
        acc.sort();
        let row: SparseRow = acc.into_iter().filter(|x| x.1 != 0).map(|(i, v)| (i, Integer::from(v))).collect();
        if !row.is_empty() {
            rel.insert(row);
        }
    };
    for &(c, d) in &symbols {
        let (c, d) = (c as i64, d as i64);
        // x + xS = 0 with S = [0,−1;1,0]
        push(&[look(c, d), look(d, -c)]);
        // x + xT + xT² = 0 with T = [0,−1;1,−1]
        push(&[look(c, d), look(d, -c - d), look(-c - d, c)]);
    }
    let (free, coords) = quotient_coordinates(symbols.len(), &rel);

    // boundary: lift (c:d) to g = [a b; c d] ∈ SL2(Z), δ = [a/c] − [b/d]
    let mut cusps: Vec<(i64, i64)> = Vec::new();
    let mut boundary = Vec::with_capacity(symbols.len());
    let class = |p: i64, q: i64, cusps: &mut Vec<(i64, i64)>| -> usize {
        let c = normalize_cusp(p, q);
        if let Some(i) = cusps.iter().position(|&x| cusps_equivalent(x, c, ni)) {
            return i;
        }
        cusps.push(c);
        cusps.len() - 1
    };
    for &(c, d) in &symbols {
        let (c0, d0) = lift_coprime(c as i64, d as i64, ni);
        let (_, x, y) = ext_gcd(d0, c0);
        // a·d0 − b·c0 = 1 with a = x, b = −y
        let (a, b) = (x, -y);
        debug_assert_eq!(a * d0 - b * c0, 1);
        let inf = class(a, c0, &mut cusps);
        let zero = class(b, d0, &mut cusps);
        boundary.push((inf, zero));
    }

    let mut space = ManinSymbolSpace {
        level: n,
        symbols,
        index,
        free,
        coords,
        cusps,
        boundary,
        cuspidal_dimension: 0,
    };
    let bmat = space.boundary_on_free();
    let rank = crate::linalg::rank(&bmat);
    space.cuspidal_dimension = space.free.len() - rank;
    space
}

/// Integers (c', d') ≡ (c, d) mod N with gcd(c', d') = 1.
fn lift_coprime(c: i64, d: i64, n: i64) -> (i64, i64) {
    let c = if c == 0 { n } else { c };
    let mut d = d;
    while gcd(c, d) != 1 {
        d += n;
    }
    (c, d)
}

impl ManinSymbolSpace {
    /// Boundary map on the free generators, rows indexed by cusp class
    /// (transposed: one row per cusp, one column per free generator).
    fn boundary_on_free(&self) -> Matrix {
        let k = self.free.len();
        let mut out = vec![vec![Rational::new(); k]; self.cusps.len()];
        for (col, &g) in self.free.iter().enumerate() {
            let (inf, zero) = self.boundary[g];
            out[inf][col] += 1;
            out[zero][col] -= 1;
        }
        out
    }

    /// ℤ-basis of the integral cycles: integer combinations of symbols with
    /// zero boundary.
    pub fn integral_cycles(&self) -> Vec<Vec<Integer>> {
        let m: Vec<Vec<Integer>> = self
            .boundary
            .iter()
            .map(|&(inf, zero)| {
                let mut row = vec![Integer::new(); self.cusps.len()];
                row[inf] += 1;
                row[zero] -= 1;
                row
            })
            .collect();
        integer_left_kernel(&m)
    }

    /// Symbols of the path {0, k/m} by the convergents of k/m.
    pub fn path_symbols(&self, k: i64, m: i64) -> Vec<usize> {
        let mut out = vec![self.index_of(0, 1)];
        let x = Rational::from((k, m));
        let mut q_prev = Integer::new();
        for (j, conv) in Convergents::new(x).enumerate() {
            let q = conv.denom().clone();
            let n = Integer::from(self.level);
            let qm = Integer::from(&q % &n).to_i64().unwrap();
            let qp = Integer::from(&q_prev % &n).to_i64().unwrap();
            // sign (−1)^{j−1}
            let c = if j % 2 == 1 { qm } else { -qm };
            out.push(self.index_of(c, qp));
            q_prev = q;
        }
        out
    }
}

/// Heilbronn matrices of determinant p (Cremona's list), as [a, b, c, d]
/// acting on the right.
pub fn heilbronn(p: i64) -> Vec<[i64; 4]> {
    if p == 2 {
        return vec![[1, 0, 0, 2], [2, 0, 0, 1], [2, 1, 0, 1], [1, 0, 1, 2]];
    }
    let mut out = vec![[1, 0, 0, p]];
    let half = (p - 1) / 2;
    for r in -half..=half {
        let (mut x1, mut x2, mut y1, mut y2) = (p, -r, 0i64, 1i64);
        let (mut a, mut b) = (-p, r);
        out.push([x1, x2, y1, y2]);
        while b != 0 {
            let ab = b.abs();
            let mut c = a.rem_euclid(ab);
            if 2 * c > ab {
                c -= ab;
            }
            let q = (a - c) / b;
            let x3 = q * x2 - x1;
            x1 = x2;
            x2 = x3;
            let y3 = q * y2 - y1;
            y1 = y2;
            y2 = y3;
            a = -b;
            b = c;
            out.push([x1, x2, y1, y2]);
        }
    }
    out
}

pub fn hecke_operator(space: &ManinSymbolSpace, p: u64) -> Matrix {
    assert!(space.level % p != 0, "p must not divide the level");
    space.action_matrix(&heilbronn(p as i64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParityMode {
    /// Δ < 0: ⟨{0,k/m}, f⟩ = (s Ω⁺ + i t Ω⁻)/2.
    HalfIntegral,
    /// Δ > 0: ⟨{0,k/m}, f⟩ = s Ω⁺ + i t Ω⁻.
    Integral,
}

/// A normalized eigen-functional on the symbol space of one curve.
#[derive(Debug)]
pub struct EigenFunctional {
    pub sign: Sign,
    pub level: u64,
    /// Value on each Manin symbol.
    pub values: Vec<Rational>,
    /// Factor applied to the lattice-normalized functional (±1 or ±1/2).
    pub scale: Rational,
    pub parity_mode: ParityMode,
    /// L(E,1)/Ω_f^+ as fixed by calibration (plus functional only).
    pub l_ratio: Option<Rational>,
    pub calibration_prime: Option<u64>,
    pub verification_prime: Option<u64>,
    /// a_n of the curve for small n.
    an: Vec<i64>,
    curve: CurveModel,
    space: ManinSymbolSpace,
    cache: RwLock<HashMap<(u64, u64), Rational>>,
}

fn good_primes(n: u64, bound: u64) -> impl Iterator<Item = u64> {
    primes_up_to(bound).into_iter().filter(move |p| n % p != 0)
}

fn lattice_generator(values: &[Rational]) -> Rational {
    let mut den = Integer::from(1);
    for v in values {
        den.lcm_mut(v.denom());
    }
    let mut g = Integer::new();
    for v in values {
        let x = Integer::from(&den / v.denom()) * v.numer();
        g.gcd_mut(&x);
    }
    Rational::from((g, den))
}

/// The star-(anti)invariant eigenvector matching the a_p of `e`, scaled so that
/// the image of the integral cuspidal homology is ℤ, then (for the plus sign)
/// calibrated against the central value.
pub fn eigen_functional(space: ManinSymbolSpace, e: &CurveModel, sign: Sign) -> Result<EigenFunctional, ModsymError> {
    let n = space.level;
    let an = crate::curve::an_coefficients(e, 2000);
    let k = space.dimension();
    let star = space.star_matrix();
    let eps = if sign == Sign::Plus { 1 } else { -1 };
    let mut stack: Matrix = star
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r[i] -= eps;
            r
        })
        .collect();
    let mut kernel = right_kernel(&stack, k);
    for p in good_primes(n, 200) {
        if kernel.len() <= 1 {
            break;
        }
        let t = hecke_operator(&space, p);
        for (i, mut row) in t.into_iter().enumerate() {
            row[i] -= an[p as usize];
            stack.push(row);
        }
        kernel = right_kernel(&stack, k);
    }
    if kernel.len() != 1 {
        return Err(ModsymError::EigenspaceNotFound { level: n });
    }
    let w = &kernel[0];
    let raw: Vec<Rational> = (0..space.symbols.len())
        .map(|i| {
            let mut s = Rational::new();
            for (f, v) in space.coordinates(i) {
                s += Rational::from(v * &w[*f]);
            }
            s
        })
        .collect();
    let images: Vec<Rational> = space
        .integral_cycles()
        .iter()
        .map(|cyc| {
            let mut s = Rational::new();
            for (i, c) in cyc.iter().enumerate() {
                if c.cmp0() != Ordering::Equal {
                    s += Rational::from(&raw[i] * c);
                }
            }
            s
        })
        .collect();
    let g = lattice_generator(&images);
    if g.cmp0() == Ordering::Equal {
        return Err(ModsymError::EigenspaceNotFound { level: n });
    }
    let normalized: Vec<Rational> = raw.into_iter().map(|v| v / &g).collect();
    let parity_mode = if e.disc.cmp0() == Ordering::Less {
        ParityMode::HalfIntegral
    } else {
        ParityMode::Integral
    };
    let mut psi = EigenFunctional {
        sign,
        level: n,
        values: normalized,
        scale: Rational::from(1),
        parity_mode,
        l_ratio: None,
        calibration_prime: None,
        verification_prime: None,
        an,
        curve: e.clone(),
        space,
        cache: RwLock::new(HashMap::new()),
    };
    if sign == Sign::Minus {
        return Ok(psi);
    }

    // calibration: −S_q0 = N_q0 · L/Ω⁺ at the first good q0 with S_q0 ≠ 0
    let lalg = algebraic_l_value(e, None)?;
    let per = periods(e);
    let l_plus = lalg.value * Rational::from(per.real_components);
    let mut chosen: Option<(u64, Rational)> = None;
    for q in good_primes(n, 100).filter(|&q| q > 2) {
        let s = psi.raw_s(q);
        if s.cmp0() != Ordering::Equal {
            let nq = Rational::from(1 + q as i64 - psi.an[q as usize]);
            chosen = Some((q, -(nq * &l_plus) / s));
            break;
        }
    }
    let (q0, c) = chosen.ok_or_else(|| ModsymError::CalibrationMismatch("all S_q vanish".into()))?;
    let expected_abs = match parity_mode {
        ParityMode::HalfIntegral => Rational::from((1, 2)),
        ParityMode::Integral => Rational::from(1),
    };
    if Rational::from(c.abs_ref()) != expected_abs {
        return Err(ModsymError::CalibrationMismatch(format!(
            "factor {c} at q0 = {q0}, expected ±{expected_abs} for this discriminant sign"
        )));
    }
    for v in psi.values.iter_mut() {
        *v *= &c;
    }
    psi.scale = c;
    psi.l_ratio = Some(l_plus.clone());
    psi.calibration_prime = Some(q0);
    // independent check at a second prime
    let q1 = good_primes(n, 100).find(|&q| q > q0).expect("a second good prime");
    let nq1 = Rational::from(1 + q1 as i64 - psi.an[q1 as usize]);
    if -psi.s_sum(q1) != nq1 * &l_plus {
        return Err(ModsymError::CalibrationMismatch(format!("(ms1) fails at q = {q1}")));
    }
    psi.verification_prime = Some(q1);
    Ok(psi)
}

impl EigenFunctional {
    pub fn space(&self) -> &ManinSymbolSpace {
        &self.space
    }

    pub fn a_n(&self, n: u64) -> i64 {
        if (n as usize) < self.an.len() {
            return self.an[n as usize];
        }
        let mut out = 1i64;
        for (p, k) in factor_u64(n) {
            let ap = ap_count(&self.curve, p).a_q;
            let bad = self.level % p == 0;
            // a_{p^k} = a_p·a_{p^{k−1}} − p·a_{p^{k−2}} (good p), a_p^k (bad p)
            let (mut prev, mut cur) = (1i64, ap);
            for _ in 1..k {
                let next = if bad { cur * ap } else { ap * cur - p as i64 * prev };
                prev = cur;
                cur = next;
            }
            out *= cur;
        }
        out
    }

    fn raw_s(&self, m: u64) -> Rational {
        let mut s = Rational::new();
        for k in 1..=m {
            s += self.eval_uncached(k as i64, m as i64);
        }
        s
    }

    fn eval_uncached(&self, k: i64, m: i64) -> Rational {
        let g = gcd(k, m);
        let (k, m) = (k / g, m / g);
        let mut s = Rational::new();
        for i in self.space.path_symbols(k, m) {
            s += &self.values[i];
        }
        s
    }

    /// ⟨{0, k/m}, f⟩ in units of Ω_f^+ (plus) or the minus lattice unit.
    pub fn eval(&self, k: u64, m: u64) -> Rational {
        let key = (k % m, m);
        if let Some(v) = self.cache.read().expect("cache lock").get(&key) {
            return v.clone();
        }
        let v = self.eval_uncached(key.0 as i64, m as i64);
        self.cache.write().expect("cache lock").insert(key, v.clone());
        v
    }

    /// Σ_{k=1}^{m} ⟨{0,k/m}, f⟩.
    pub fn s_sum(&self, m: u64) -> Rational {
        (1..=m).map(|k| self.eval(k, m)).sum()
    }

    /// Σ over k coprime to m.
    pub fn s_prime(&self, m: u64) -> Rational {
        if m == 1 {
            return Rational::new();
        }
        (1..m).filter(|&k| gcd(k as i64, m as i64) == 1).map(|k| self.eval(k, m)).sum()
    }

    /// Σ_{k ∈ (ℤ/m)^×} χ_d(k)·⟨{0,k/m}, f⟩; d = 1 gives S′_m.
    pub fn t_prime(&self, d: u64, m: u64) -> Rational {
        if d == 1 {
            return self.s_prime(m);
        }
        (1..m)
            .filter(|&k| gcd(k as i64, m as i64) == 1)
            .filter_map(|k| match kronecker(d as i64, k as i64) {
                0 => None,
                1 => Some(self.eval(k, m)),
                _ => Some(-self.eval(k, m)),
            })
            .sum()
    }
}

pub fn eval_symbol(psi: &EigenFunctional, k: u64, m: u64) -> Rational {
    psi.eval(k, m)
}

/// S_m, S′_m, T_m and T′_{d,m} in units of Ω_f^+.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolSums {
    pub m: u64,
    #[serde(with = "serde_rational")]
    pub s: Rational,
    #[serde(with = "serde_rational")]
    pub s_prime: Rational,
    #[serde(with = "serde_rational")]
    pub t: Rational,
    #[serde(serialize_with = "ser_table")]
    pub t_prime: Vec<(u64, Rational)>,
}

fn ser_table<S: serde::Serializer>(t: &[(u64, Rational)], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(t.len()))?;
    for (d, v) in t {
        map.serialize_entry(&d.to_string(), &crate::arith::rational_string(v))?;
    }
    map.end()
}

fn prime_factors(m: u64) -> Vec<u64> {
    factor_u64(m).into_iter().map(|(p, _)| p).collect()
}

fn divisors_of_squarefree(m: u64) -> Vec<u64> {
    let ps = prime_factors(m);
    let mut ds = vec![1u64];
    for p in ps {
        let more: Vec<u64> = ds.iter().map(|d| d * p).collect();
        ds.extend(more);
    }
    ds.sort();
    ds
}

fn check_modulus(psi: &EigenFunctional, m: u64) -> Result<(), ModsymError> {
    let ok = m >= 1 && m % 2 == 1 && crate::arith::is_squarefree(m) && gcd(m as i64, psi.level as i64) == 1;
    if ok {
        Ok(())
    } else {
        Err(ModsymError::BadModulus(m))
    }
}

pub fn symbol_sums(psi: &EigenFunctional, m: u64) -> Result<SymbolSums, ModsymError> {
    check_modulus(psi, m)?;
    if m % 4 != 1 {
        return Err(ModsymError::BadModulus(m));
    }
    let t_prime = divisors_of_squarefree(m).into_iter().map(|d| (d, psi.t_prime(d, m))).collect();
    Ok(SymbolSums {
        m,
        s: psi.s_sum(m),
        s_prime: psi.s_prime(m),
        t: if m == 1 { Rational::new() } else { psi.t_prime(m, m) },
        t_prime,
    })
}

/// Outcome of one exact identity check.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub m: u64,
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl IdentityReport {
    fn eq(identity: impl Into<String>, m: u64, lhs: Rational, rhs: Rational) -> Self {
        let passed = lhs == rhs;
        IdentityReport {
            identity: identity.into(),
            m,
            lhs,
            rhs,
            passed,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

fn n_q(psi: &EigenFunctional, q: u64) -> i64 {
    1 + q as i64 - psi.a_n(q)
}

fn l_ratio(psi: &EigenFunctional) -> &Rational {
    psi.l_ratio.as_ref().expect("plus functional carries the calibrated L-ratio")
}

/// (σ(m) − a_m)·L/Ω⁺ = −Σ_{l|m} S_l.
pub fn check_ms1(psi: &EigenFunctional, m: u64) -> Result<IdentityReport, ModsymError> {
    check_modulus(psi, m)?;
    let ds = divisors_of_squarefree(m);
    let sigma: i64 = ds.iter().map(|&d| d as i64).sum();
    let lhs = Rational::from(sigma - psi.a_n(m)) * l_ratio(psi);
    let rhs = -ds.iter().map(|&l| psi.s_sum(l)).sum::<Rational>();
    Ok(IdentityReport::eq("ms1", m, lhs, rhs))
}

/// Σ_{l|m} S_l = Σ_d 2^{r−d} Σ_{n|m, r(n)=d} S′_n.
pub fn check_sum_decomposition(psi: &EigenFunctional, m: u64) -> Result<IdentityReport, ModsymError> {
    check_modulus(psi, m)?;
    let r = prime_factors(m).len();
    let ds = divisors_of_squarefree(m);
    let lhs: Rational = ds.iter().map(|&l| psi.s_sum(l)).sum();
    let mut rhs = Rational::new();
    for &n in &ds {
        let rn = prime_factors(n).len();
        if rn == 0 {
            continue;
        }
        rhs += psi.s_prime(n) * Rational::from(Integer::from(1) << (r - rn) as u32);
    }
    Ok(IdentityReport::eq("sum-decomposition", m, lhs, rhs))
}

/// N_{q1}⋯N_{qr}·L/Ω⁺ = Σ_{n|m, n>1} b_n S′_n with b_n = (−1)^r ∏_{q|m/n}(1−q).
pub fn check_bn_identity(psi: &EigenFunctional, m: u64) -> Result<IdentityReport, ModsymError> {
    check_modulus(psi, m)?;
    let ps = prime_factors(m);
    let r = ps.len();
    let prod_n: i64 = ps.iter().map(|&q| n_q(psi, q)).product();
    let lhs = Rational::from(prod_n) * l_ratio(psi);
    let mut rhs = Rational::new();
    for n in divisors_of_squarefree(m).into_iter().filter(|&n| n > 1) {
        let mut b = Integer::from(if r % 2 == 0 { 1 } else { -1 });
        for q in prime_factors(m / n) {
            b *= 1 - q as i64;
        }
        rhs += psi.s_prime(n) * Rational::from(b);
    }
    Ok(IdentityReport::eq("bn-identity", m, lhs, rhs))
}

/// ord₂(S′_m) = ord₂(N_{q1}⋯N_{qr}·L/Ω⁺), compared as valuations.
pub fn check_sprime_valuation(psi: &EigenFunctional, m: u64) -> Result<IdentityReport, ModsymError> {
    check_modulus(psi, m)?;
    let prod_n: i64 = prime_factors(m).iter().map(|&q| n_q(psi, q)).product();
    let lhs = psi.s_prime(m);
    let rhs = Rational::from(prod_n) * l_ratio(psi);
    let (vl, vr) = (val2(&lhs), val2(&rhs));
    Ok(IdentityReport {
        identity: "sprime-valuation".into(),
        m,
        passed: vl == vr,
        note: Some(format!("ord2 {vl} vs {vr}")),
        lhs,
        rhs,
    })
}

/// T′_{d,m} = (a_q − 2χ_d(q))·T′_{d,m/q} for every prime q | m/d.
pub fn check_tprime_recursion(psi: &EigenFunctional, d: u64, m: u64) -> Result<Vec<IdentityReport>, ModsymError> {
    check_modulus(psi, m)?;
    if d <= 1 || m % d != 0 {
        return Err(ModsymError::BadModulus(d));
    }
    let name = format!("tprime-recursion d={d}");
    let qs = prime_factors(m / d);
    if qs.is_empty() {
        return Ok(vec![IdentityReport::eq(name, m, Rational::new(), Rational::new()).with_note("d = m: vacuous")]);
    }
    let lhs = psi.t_prime(d, m);
    Ok(qs
        .into_iter()
        .map(|q| {
            let factor = psi.a_n(q) - 2 * kronecker(d as i64, q as i64) as i64;
            let rhs = Rational::from(factor) * psi.t_prime(d, m / q);
            IdentityReport::eq(name.clone(), m, lhs.clone(), rhs).with_note(format!("q={q}"))
        })
        .collect())
}

/// Ψ_m = Σ_{d|m} T′_{d,m} / 2^r (Δ < 0) or / 2^{r+1} (Δ > 0); must be an
/// integer. Also compared with the restricted sum over k with χ_q(k) = 1 for
/// every q | m.
pub fn check_integrality(psi: &EigenFunctional, m: u64) -> Result<(Rational, IdentityReport), ModsymError> {
    check_modulus(psi, m)?;
    let ps = prime_factors(m);
    let r = ps.len() as u32;
    let total: Rational = divisors_of_squarefree(m).into_iter().map(|d| psi.t_prime(d, m)).sum();
    let shift = match psi.parity_mode {
        ParityMode::HalfIntegral => r,
        ParityMode::Integral => r + 1,
    };
    let big_psi = total / Rational::from(Integer::from(1) << shift);
    let starred: Rational = (1..m)
        .filter(|&k| ps.iter().all(|&q| kronecker(q as i64, k as i64) == 1))
        .map(|k| psi.eval(k, m))
        .sum();
    let starred_psi = match psi.parity_mode {
        ParityMode::HalfIntegral => starred,
        ParityMode::Integral => starred / 2u32,
    };
    let integral = *big_psi.denom() == 1;
    let mut rep = IdentityReport::eq(format!("integrality 2^{shift}"), m, big_psi.clone(), starred_psi);
    rep.passed &= integral;
    if !integral {
        rep.note = Some("non-integral".into());
    }
    Ok((big_psi, rep))
}

/// ord₂(T_m/Ω⁺) = r − 1 (Δ < 0) or r (Δ > 0).
pub fn check_tm_valuation(psi: &EigenFunctional, m: u64) -> Result<IdentityReport, ModsymError> {
    check_modulus(psi, m)?;
    let r = prime_factors(m).len() as i64;
    let expected = match psi.parity_mode {
        ParityMode::HalfIntegral => r - 1,
        ParityMode::Integral => r,
    };
    let t = psi.t_prime(m, m);
    let v = val2(&t);
    Ok(IdentityReport {
        identity: "tm-valuation".into(),
        m,
        passed: v == Val2::Finite(expected),
        note: Some(format!("ord2 {v}, expected {expected}")),
        lhs: t,
        rhs: Rational::from(expected),
    })
}

/// Exact T_m/Ω⁺ with the numeric comparison L(E^{(m)}, 1) ≈ T_m·Ω⁺/√m.
#[derive(Debug, Clone, Serialize)]
pub struct TwistCrossCheck {
    pub m: u64,
    #[serde(with = "serde_rational")]
    pub t_m: Rational,
    pub ord2: Val2,
    pub symbol_value: f64,
    pub numeric_value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn twisted_l_from_symbols(
    psi: &EigenFunctional,
    e: &CurveModel,
    table: &crate::curve::ApTable,
    m: u64,
) -> Result<TwistCrossCheck, ModsymError> {
    check_modulus(psi, m)?;
    let t = psi.t_prime(m, m);
    let per = periods(e);
    let omega = per.omega_plus.to_f64();
    let symbol_value = t.to_f64() * omega / (m as f64).sqrt();
    let n = conductor(e) * Integer::from(m * m);
    let target = 1e-20;
    let terms = crate::lvalue::terms_for(&n, target);
    let an = table.get(terms);
    let series = crate::lvalue::series_value(&an, m as i64, &n, terms, 128)?;
    let numeric_value = series.value.to_f64();
    let tolerance = series.tail_bound + 1e-12 * numeric_value.abs().max(1.0);
    Ok(TwistCrossCheck {
        m,
        ord2: val2(&t),
        passed: (symbol_value - numeric_value).abs() <= tolerance,
        t_m: t,
        symbol_value,
        numeric_value,
        tolerance,
    })
}

/// All identity checks for one modulus m (identities that need composite m are
/// skipped for primes).
pub fn identity_suite(psi: &EigenFunctional, m: u64) -> Result<Vec<IdentityReport>, ModsymError> {
    let mut out = vec![
        check_ms1(psi, m)?,
        check_sum_decomposition(psi, m)?,
        check_bn_identity(psi, m)?,
        check_sprime_valuation(psi, m)?,
    ];
    for d in divisors_of_squarefree(m).into_iter().filter(|&d| d > 1) {
        out.extend(check_tprime_recursion(psi, d, m)?);
    }
    out.push(check_integrality(psi, m)?.1);
    out.push(check_tm_valuation(psi, m)?);
    Ok(out)
}

/// (ms1) at every good prime q ≤ bound.
pub fn ms1_at_primes(psi: &EigenFunctional, bound: u64) -> Vec<IdentityReport> {
    good_primes(psi.level, bound)
        .filter(|&q| q > 2)
        .map(|q| check_ms1(psi, q).expect("good odd prime"))
        .collect()
}
