//! Exact linear algebra over ℚ and ℤ.
//!
//! Elimination is fraction-free: rows are kept as primitive integer vectors
//! and combined by cross-multiplication, so no rational arithmetic happens
//! inside the inner loops.

use std::cmp::Ordering;

use rug::Integer;

use crate::arith::Rational;

/// A sparse integer row, entries sorted by column with no zeros stored.
pub type SparseRow = Vec<(usize, Integer)>;

fn content(row: &SparseRow) -> Integer {
    let mut g = Integer::new();
    for (_, v) in row {
        g.gcd_mut(v);
        if g == 1 {
            break;
        }
    }
    g
}

fn make_primitive(row: &mut SparseRow) {
    let g = content(row);
    if g > 1 {
        for (_, v) in row.iter_mut() {
            v.div_exact_mut(&g);
        }
    }
    if let Some((_, lead)) = row.first() {
        if lead.cmp0() == Ordering::Less {
            for (_, v) in row.iter_mut() {
                *v = -std::mem::take(v);
            }
        }
    }
}

fn entry(row: &SparseRow, col: usize) -> Option<&Integer> {
    row.binary_search_by_key(&col, |e| e.0).ok().map(|i| &row[i].1)
}

/// a·x − b·y on sparse rows.
fn combine(a: &Integer, x: &SparseRow, b: &Integer, y: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let cx = x.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cy = y.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        let (col, v) = match cx.cmp(&cy) {
            Ordering::Less => {
                i += 1;
                (cx, Integer::from(a * &x[i - 1].1))
            }
            Ordering::Greater => {
                j += 1;
                (cy, -Integer::from(b * &y[j - 1].1))
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
                (cx, Integer::from(a * &x[i - 1].1) - Integer::from(b * &y[j - 1].1))
            }
        };
        if v.cmp0() != Ordering::Equal {
            out.push((col, v));
        }
    }
    out
}

/// Incrementally maintained fully reduced echelon basis of a row space.
#[derive(Debug, Clone, Default)]
pub struct SparseEchelon {
    rows: Vec<SparseRow>,
}

impl SparseEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    fn reduce(&self, mut row: SparseRow) -> SparseRow {
        for piv in &self.rows {
            let pc = piv[0].0;
            if let Some(v) = entry(&row, pc) {
                let v = v.clone();
                row = combine(&piv[0].1, &row, &v, piv);
                make_primitive(&mut row);
            }
        }
        row
    }

    /// Adds a row; returns false when it was already in the span.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let mut row = self.reduce(row);
        if row.is_empty() {
            return false;
        }
        make_primitive(&mut row);
        let pc = row[0].0;
        for other in self.rows.iter_mut() {
            if let Some(v) = entry(other, pc) {
                let v = v.clone();
                *other = combine(&row[0].1, other, &v, &row);
                make_primitive(other);
            }
        }
        let pos = self.rows.partition_point(|r| r[0].0 < pc);
        self.rows.insert(pos, row);
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r[0].0).collect()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }
}

/// Solves the relations of a quotient: given relations among `n` generators,
/// returns the free generators and, for each generator, its coordinates in
/// the quotient with respect to the free ones.
pub fn quotient_coordinates(n: usize, relations: &SparseEchelon) -> (Vec<usize>, Vec<Vec<(usize, Rational)>>) {
    let pivots = relations.pivots();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&i| !is_pivot[i]).collect();
    let mut free_index = vec![usize::MAX; n];
    for (k, &i) in free.iter().enumerate() {
        free_index[i] = k;
    }
    let mut coords: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    for &i in &free {
        coords[i] = vec![(free_index[i], Rational::from(1))];
    }
    for row in relations.rows() {
        let (pc, pv) = &row[0];
        let mut c = Vec::new();
        for (col, v) in &row[1..] {
            // pivot·x_p + Σ v·x_free = 0
            c.push((free_index[*col], -Rational::from((v.clone(), pv.clone()))));
        }
        coords[*pc] = c;
    }
    (free, coords)
}

/// Dense rational matrix helpers.
pub type Matrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| Rational::from((i == j) as i32)).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![Rational::new(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].cmp0() == Ordering::Equal {
                continue;
            }
            for j in 0..m {
                if b[t][j].cmp0() != Ordering::Equal {
                    out[i][j] += Rational::from(&a[i][t] * &b[t][j]);
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &Matrix, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| {
            let mut s = Rational::new();
            for (x, y) in row.iter().zip(v) {
                s += Rational::from(x * y);
            }
            s
        })
        .collect()
}

fn to_integer_row(row: &[Rational]) -> SparseRow {
    let mut l = Integer::from(1);
    for x in row {
        l.lcm_mut(x.denom());
    }
    row.iter()
        .enumerate()
        .filter(|(_, x)| x.cmp0() != Ordering::Equal)
        .map(|(j, x)| (j, Integer::from(&l / x.denom()) * x.numer()))
        .collect()
}

/// Echelon basis of the row space of a dense rational matrix.
pub fn row_echelon(rows: &Matrix) -> SparseEchelon {
    let mut e = SparseEchelon::new();
    for r in rows {
        e.insert(to_integer_row(r));
    }
    e
}

pub fn rank(rows: &Matrix) -> usize {
    row_echelon(rows).rank()
}

/// Basis of the right kernel {x : A·x = 0} of a matrix with `ncols` columns.
pub fn right_kernel(rows: &Matrix, ncols: usize) -> Vec<Vec<Rational>> {
    let e = row_echelon(rows);
    let (free, coords) = quotient_coordinates(ncols, &e);
    free.iter()
        .enumerate()
        .map(|(k, _)| {
            (0..ncols)
                .map(|i| {
                    coords[i]
                        .iter()
                        .find(|(f, _)| *f == k)
                        .map(|(_, v)| v.clone())
                        .unwrap_or_default()
                })
                .collect()
        })
        .collect()
}

/// A ℤ-basis of the left integer kernel {x ∈ ℤⁿ : x·M = 0} for an integer
/// matrix M with n rows, by unimodular row reduction of [M | I].
pub fn integer_left_kernel(m: &[Vec<Integer>]) -> Vec<Vec<Integer>> {
    let n = m.len();
    if n == 0 {
        return Vec::new();
    }
    let c = m[0].len();
    let mut rows: Vec<Vec<Integer>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..n).map(|j| Integer::from((i == j) as i32)));
            v
        })
        .collect();
    let mut top = 0;
    for col in 0..c {
        if top >= n {
            break;
        }
        // gcd-reduce column `col` among rows top.. into a single nonzero entry
        loop {
            let mut best: Option<usize> = None;
            for i in top..n {
                if rows[i][col].cmp0() != Ordering::Equal
                    && best.map_or(true, |b| rows[i][col].cmp_abs(&rows[b][col]) == Ordering::Less)
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(top, b);
            let mut done = true;
            for i in top + 1..n {
                if rows[i][col].cmp0() != Ordering::Equal {
                    let q = Integer::from(&rows[i][col] / &rows[top][col]);
                    if q.cmp0() != Ordering::Equal {
                        let (head, tail) = rows.split_at_mut(i);
                        let pivot = &head[top];
                        for (x, y) in tail[0].iter_mut().zip(pivot) {
                            *x -= Integer::from(&q * y);
                        }
                    }
                    if rows[i][col].cmp0() != Ordering::Equal {
                        done = false;
                    }
                }
            }
            if done {
                top += 1;
                break;
            }
        }
    }
    rows[top..].iter().map(|r| r[c..].to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn kernel_of_small_matrix() {
        let a = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(1), q(0), q(1)]];
        assert_eq!(rank(&a), 2);
        let k = right_kernel(&a, 3);
        assert_eq!(k.len(), 1);
        assert!(mat_vec(&a, &k[0]).iter().all(|x| x.cmp0() == Ordering::Equal));
    }

    #[test]
    fn quotient_by_relation() {
        // x0 + x1 = 0, x1 - 2 x2 = 0 over three generators
        let mut e = SparseEchelon::new();
        e.insert(vec![(0, Integer::from(1)), (1, Integer::from(1))]);
        e.insert(vec![(1, Integer::from(1)), (2, Integer::from(-2))]);
        let (free, coords) = quotient_coordinates(3, &e);
        assert_eq!(free, vec![2]);
        assert_eq!(coords[0], vec![(0, Rational::from(-2))]);
        assert_eq!(coords[1], vec![(0, Rational::from(2))]);
    }

    #[test]
    fn integer_kernel_basis() {
        let m = vec![vec![Integer::from(2)], vec![Integer::from(4)], vec![Integer::from(3)]];
        let k = integer_left_kernel(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: Integer = v.iter().zip(&m).map(|(a, r)| Integer::from(a * &r[0])).sum();
            assert_eq!(s, 0);
        }
        // saturated: the maximal minors are coprime
        let mut g = Integer::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let minor = Integer::from(&k[0][i] * &k[1][j]) - Integer::from(&k[0][j] * &k[1][i]);
            g.gcd_mut(&minor);
        }
        assert_eq!(g, 1);
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated(entries in proptest::collection::vec(-5i64..5, 12)) {
            let a: Matrix = entries.chunks(4).map(|r| r.iter().map(|&x| q(x)).collect()).collect();
            let k = right_kernel(&a, 4);
            prop_assert_eq!(k.len() + rank(&a), 4);
            for v in &k {
                prop_assert!(mat_vec(&a, v).iter().all(|x| x.cmp0() == Ordering::Equal));
            }
        }
    }
}
