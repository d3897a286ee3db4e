//! Rational torsion subgroups.
//!
//! The order is bounded by gcd #Ẽ(F_p) over good odd primes. When the bound
//! is met by the rational 2-torsion alone the answer is immediate; otherwise
//! all torsion points are found by a Nagell–Lutz search on the short model.
//! Either way the points found are checked to reduce injectively at two good
//! odd primes.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rug::Integer;
use serde::Serialize;

use super::count::ap_count;
use super::isogeny::two_torsion_x;
use super::roots::integer_roots_monic_cubic;
use super::CurveModel;
use crate::arith::{factor, primes_up_to, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsionGroup {
    /// Invariant factors d1 | d2 (empty for the trivial group).
    pub structure: Vec<u64>,
    pub order: u64,
    /// Number of rational points of order dividing 2, including O.
    pub two_torsion_order: u64,
    /// Primes at which injectivity of reduction was confirmed.
    pub certified_at: Vec<u64>,
}

impl fmt::Display for TorsionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.structure.is_empty() {
            return write!(f, "trivial");
        }
        let parts: Vec<String> = self.structure.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

type Pt = Option<(Rational, Rational)>;

struct Short {
    a: Rational,
}

impl Short {
    fn add(&self, p: &Pt, q: &Pt) -> Pt {
        let (x1, y1) = match p {
            None => return q.clone(),
            Some(v) => v,
        };
        let (x2, y2) = match q {
            None => return p.clone(),
            Some(v) => v,
        };
        let lam = if x1 == x2 {
            if Rational::from(y1 + y2).cmp0() == Ordering::Equal {
                return None;
            }
            (Rational::from(3 * Rational::from(x1 * x1)) + &self.a) / Rational::from(2 * y1)
        } else {
            Rational::from(y2 - y1) / Rational::from(x2 - x1)
        };
        let x3 = Rational::from(&lam * &lam) - x1 - x2;
        let y3 = lam * Rational::from(x1 - &x3) - y1;
        Some((x3, y3))
    }
}

fn good_odd_primes(e: &CurveModel, avoid: &Integer, count: usize) -> Vec<u64> {
    primes_up_to(10_000)
        .into_iter()
        .filter(|&p| p > 3 && !e.disc.is_divisible_u(p as u32) && !avoid.is_divisible_u(p as u32))
        .take(count)
        .collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn structure_of(order: u64, two: u64) -> Vec<u64> {
    match (order, two) {
        (1, _) => vec![],
        (n, 4) => vec![2, n / 2],
        (n, _) => vec![n],
    }
}

fn reduce_pt(x: &Rational, y: &Rational, p: u64) -> (u64, u64) {
    let pm = Integer::from(p);
    let r = |v: &Rational| -> u64 {
        let d = v.denom().clone().invert(&pm).expect("integral point away from p");
        let n = Integer::from(v.numer() * d) % &pm;
        let n = if n.cmp0() == Ordering::Less { n + &pm } else { n };
        n.to_u64().unwrap()
    };
    (r(x), r(y))
}

pub fn torsion_subgroup(e: &CurveModel) -> TorsionGroup {
    let short = e.short_model();
    let xs = two_torsion_x(e);
    let two = 1 + xs.len() as u64;

    let probe = good_odd_primes(e, &Integer::from(6), 12);
    let bound = probe
        .iter()
        .map(|&p| ap_count(e, p).n_q.expect("good prime") as u64)
        .fold(0, gcd);

    // torsion points on the short model y² = x³ + A x + B
    let a = Rational::from(short.a4());
    let b = short.a6().clone();
    let s = Short { a: a.clone() };
    let mut points: Vec<(Rational, Rational)> = Vec::new();
    if bound == two {
        // images of the 2-torsion: x_short = 36x + 3b2, y = 0
        for x in &xs {
            let xs_ = Rational::from(36 * x) + Rational::from(3 * &e.b2);
            points.push((xs_, Rational::new()));
        }
    } else {
        let a_int = short.a4().clone();
        let d = (Integer::from(4 * &a_int) * &a_int * &a_int + Integer::from(27 * &b) * &b).abs();
        let mut ys: Vec<Integer> = vec![Integer::from(1)];
        for (p, k) in factor(&d).expect("nonsingular") {
            let mut next = Vec::new();
            for y in &ys {
                let mut pp = Integer::from(1);
                for _ in 0..=k / 2 {
                    next.push(Integer::from(y * &pp));
                    pp *= &p;
                }
            }
            ys = next;
        }
        let mut candidates: BTreeSet<(Rational, Rational)> = BTreeSet::new();
        for y in std::iter::once(Integer::new()).chain(ys) {
            let c0 = Integer::from(&b - Integer::from(&y * &y));
            for x in integer_roots_monic_cubic(&Integer::new(), &a_int, &c0) {
                candidates.insert((Rational::from(&x), Rational::from(&y)));
                candidates.insert((Rational::from(&x), Rational::from(-&y)));
            }
        }
        for (x, y) in candidates {
            let p0: Pt = Some((x.clone(), y.clone()));
            let mut q = p0.clone();
            for _ in 1..12 {
                if q.is_none() {
                    break;
                }
                if q.as_ref().is_some_and(|(qx, qy)| *qx.denom() != 1 || *qy.denom() != 1) {
                    q = Some((Rational::from((1, 2)), Rational::new()));
                    break;
                }
                q = s.add(&q, &p0);
            }
            if q.is_none() {
                points.push((x, y));
            }
        }
    }
    let order = points.len() as u64 + 1;
    assert!(bound % order == 0, "torsion order divides every #E(F_p)");

    // injectivity of reduction at two good primes
    let mut certified = Vec::new();
    for p in good_odd_primes(e, &Integer::from(6), 40) {
        if points.iter().any(|(x, y)| x.denom().is_divisible_u(p as u32) || y.denom().is_divisible_u(p as u32)) {
            continue;
        }
        let reduced: BTreeSet<(u64, u64)> = points.iter().map(|(x, y)| reduce_pt(x, y, p)).collect();
        if reduced.len() == points.len() {
            certified.push(p);
        }
        if certified.len() == 2 {
            break;
        }
    }
    TorsionGroup {
        structure: structure_of(order, two),
        order,
        two_torsion_order: two,
        certified_at: certified,
    }
}
