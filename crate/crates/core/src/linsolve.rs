//! Exact right nullspaces of matrices over the rational-function field.
//!
//! Rows are cleared to polynomial entries, reduced to echelon form by
//! fraction-free (Bareiss) elimination, and back-substituted without
//! leaving the polynomial ring. Basis vectors come back as polynomial vectors with unit
//! content.

use std::cmp::Ordering;

use crate::algebra::{gcd, gcd_many, lcm, MPoly, Rat, RatFunc, Var};
use crate::exec::Exec;

/// Rectangular matrix of rational functions with labelled rows and columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RFMatrix<C = (i64, i64)> {
    pub rows: Vec<Vec<RatFunc>>,
    pub row_labels: Vec<usize>,
    pub col_labels: Vec<C>,
}

impl<C: Clone + PartialEq> RFMatrix<C> {
    pub fn new(rows: Vec<Vec<RatFunc>>, row_labels: Vec<usize>, col_labels: Vec<C>) -> RFMatrix<C> {
        assert_eq!(rows.len(), row_labels.len(), "one label per row");
        assert!(rows.iter().all(|r| r.len() == col_labels.len()), "matrix must be rectangular");
        RFMatrix { rows, row_labels, col_labels }
    }

    /// Unlabelled convenience constructor.
    pub fn from_rows(rows: Vec<Vec<RatFunc>>) -> RFMatrix<usize> {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        let nrows = rows.len();
        RFMatrix::new(rows, (0..nrows).collect(), (0..cols).collect())
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_labels.len()
    }

    /// `M · v` for a polynomial vector.
    pub fn apply(&self, v: &[MPoly]) -> Vec<RatFunc> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(RatFunc::zero(), |acc, (a, b)| &acc + &a.mul_poly(b))
            })
            .collect()
    }
}

impl RFMatrix<usize> {
    pub fn from_polys(rows: Vec<Vec<MPoly>>) -> RFMatrix<usize> {
        RFMatrix::<usize>::from_rows(rows.into_iter().map(|r| r.into_iter().map(RatFunc::from_poly).collect()).collect())
    }
}

/// Basis of the right nullspace of `m`, computed with the default strategy.
pub fn nullspace<C: Clone + PartialEq>(m: &RFMatrix<C>) -> Vec<Vec<MPoly>> {
    nullspace_with(m, Exec::default())
}

/// Basis of the right nullspace of `m`.
///
/// One vector per non-pivot column, in column order. Each vector has
/// polynomial entries with no common polynomial or rational factor and the
/// first nonzero component has a positive leading coefficient. Every vector
/// is checked to satisfy `m·v = 0` exactly.
pub fn nullspace_with<C: Clone + PartialEq>(m: &RFMatrix<C>, exec: Exec) -> Vec<Vec<MPoly>> {
    let ncols = m.ncols();
    if ncols == 0 {
        return Vec::new();
    }
    let poly_rows: Vec<Vec<MPoly>> = exec
        .map(&m.rows, |row| clear_row(row))
        .into_iter()
        .filter(|r| r.iter().any(|e| !e.is_zero()))
        .collect();

    if numeric_rank(&poly_rows, ncols) == ncols {
        return Vec::new();
    }

    let (echelon, pivots) = bareiss(poly_rows, ncols, exec);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();

    let basis: Vec<Vec<MPoly>> = exec.map(&free, |&f| {
        // x is kept up to a common scalar: solving for a pivot scales the
        // entries found so far by the pivot instead of dividing.
        let mut x: Vec<MPoly> = vec![MPoly::zero(); ncols];
        x[f] = MPoly::one();
        for (row, &pc) in pivots.iter().enumerate().rev() {
            let mut acc = MPoly::zero();
            for c in pc + 1..ncols {
                if !x[c].is_zero() && !echelon[row][c].is_zero() {
                    acc = &acc + &(&x[c] * &echelon[row][c]);
                }
            }
            if acc.is_zero() {
                continue;
            }
            let pv = &echelon[row][pc];
            let g = gcd(pv, &acc);
            let scale = pv.exact_div(&g).expect("gcd divides");
            for e in x.iter_mut().filter(|e| !e.is_zero()) {
                *e = &*e * &scale;
            }
            x[pc] = -&acc.exact_div(&g).expect("gcd divides");
        }
        normalize_polys(x)
    });

    for v in &basis {
        assert!(m.apply(v).iter().all(|e| e.is_zero()), "nullspace vector failed exact verification");
    }
    basis
}

/// Multiply a row of rational functions by the lcm of its denominators and
/// divide out the polynomial content.
fn clear_row(row: &[RatFunc]) -> Vec<MPoly> {
    let mut den = MPoly::one();
    for e in row.iter().filter(|e| !e.is_zero()) {
        if !e.den().is_one() {
            den = lcm(&den, e.den());
        }
    }
    let cleared: Vec<MPoly> = row
        .iter()
        .map(|e| if e.is_zero() { MPoly::zero() } else { e.num() * &den.exact_div(e.den()).expect("lcm") })
        .collect();
    remove_content(cleared)
}

fn remove_content(v: Vec<MPoly>) -> Vec<MPoly> {
    let g = gcd_many(v.iter().filter(|e| !e.is_zero()));
    if g.is_zero() {
        return v;
    }
    let mut rat = Rat::zero();
    let v: Vec<MPoly> = v.into_iter().map(|e| e.exact_div(&g).expect("content divides")).collect();
    for e in &v {
        rat = rat.gcd(&e.content());
    }
    let inv = rat.recip();
    v.into_iter().map(|e| e.scale(&inv)).collect()
}

fn normalize_polys(v: Vec<MPoly>) -> Vec<MPoly> {
    let mut v = remove_content(v);
    if let Some(first) = v.iter().find(|e| !e.is_zero()) {
        if first.leading_coeff().is_negative() {
            v = v.iter().map(|e| -e).collect();
        }
    }
    v
}

fn pivot_order(a: &MPoly, b: &MPoly) -> Ordering {
    a.total_degree()
        .cmp(&b.total_degree())
        .then_with(|| a.leading().map(|t| t.0).cmp(&b.leading().map(|t| t.0)))
        .then_with(|| a.len().cmp(&b.len()))
}

/// Fraction-free row echelon form. Returns the pivot rows and their pivot
/// columns.
fn bareiss(mut rows: Vec<Vec<MPoly>>, ncols: usize, exec: Exec) -> (Vec<Vec<MPoly>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut prev = MPoly::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(best) = (r..rows.len())
            .filter(|&i| !rows[i][c].is_zero())
            .min_by(|&i, &j| pivot_order(&rows[i][c], &rows[j][c]).then(i.cmp(&j)))
        else {
            continue;
        };
        rows.swap(r, best);
        let pivot_row = rows[r].clone();
        let pv = pivot_row[c].clone();
        let below: Vec<Vec<MPoly>> = rows.split_off(r + 1);
        let updated = exec.map(&below, |row| {
            let a = &row[c];
            let mut out = vec![MPoly::zero(); ncols];
            for j in c + 1..ncols {
                let t = &(&pv * &row[j]) - &(a * &pivot_row[j]);
                out[j] = t.exact_div(&prev).expect("Bareiss division is exact");
            }
            out
        });
        rows.extend(updated);
        prev = pv;
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Rank of the polynomial matrix at a fixed generic rational point; a lower
/// bound for the symbolic rank.
fn numeric_rank(rows: &[Vec<MPoly>], ncols: usize) -> usize {
    let point = |v: Var| Some(Rat::new(7919 * (v.index() as i64 + 3) + 17, 13 + 2 * v.index() as i64));
    let mut mat: Vec<Vec<Rat>> =
        rows.iter().map(|r| r.iter().map(|e| e.eval(point).expect("full assignment")).collect()).collect();
    rational_rank(&mut mat, ncols)
}

/// Gaussian elimination rank over `Q`.
pub(crate) fn rational_rank(mat: &mut [Vec<Rat>], ncols: usize) -> usize {
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..mat.len()).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(rank, p);
        let inv = mat[rank][c].recip();
        for i in rank + 1..mat.len() {
            if mat[i][c].is_zero() {
                continue;
            }
            let f = &mat[i][c] * &inv;
            for j in c..ncols {
                let t = &f * &mat[rank][j];
                mat[i][j] -= &t;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly;

    fn polys(rows: &[&[&str]]) -> RFMatrix<usize> {
        RFMatrix::from_polys(rows.iter().map(|r| r.iter().map(|s| poly(s)).collect()).collect())
    }

    #[test]
    fn rank_one_constant() {
        let m = polys(&[&["1", "1"], &["1", "1"]]);
        assert_eq!(nullspace(&m), vec![vec![poly("1"), poly("-1")]]);
    }

    #[test]
    fn polynomial_scaling() {
        let m = polys(&[&["n", "n^2"]]);
        assert_eq!(nullspace(&m), vec![vec![poly("n"), poly("-1")]]);
    }

    #[test]
    fn full_rank_is_empty() {
        let m = polys(&[&["1", "0"], &["0", "1"]]);
        assert!(nullspace(&m).is_empty());
    }

    #[test]
    fn rational_entries_and_two_dim_kernel() {
        let a = RatFunc::new(poly("1"), poly("n + 1")).unwrap();
        let b = RatFunc::new(poly("r"), poly("n")).unwrap();
        let m = RFMatrix::<usize>::from_rows(vec![vec![a.clone(), b.clone(), RatFunc::one()]]);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.apply(v).iter().all(|e| e.is_zero()));
        }
    }

    #[test]
    fn symbolic_rank_drop_hidden_from_numeric_check() {
        // rows are dependent only symbolically: row2 = (n+1) * row1
        let m = polys(&[&["n", "r", "s"], &["n^2 + n", "n*r + r", "n*s + s"]]);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 2);
    }

    #[test]
    fn deterministic() {
        let m = polys(&[&["n + r", "s", "x*n", "1"], &["r", "n*s - 1", "x", "k"]]);
        assert_eq!(nullspace_with(&m, Exec::Sequential), nullspace_with(&m, Exec::Parallel));
    }
}
