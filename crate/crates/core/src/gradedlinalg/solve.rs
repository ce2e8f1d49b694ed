//! Fraction-free Gaussian elimination over Z[i] with rational back substitution.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::matrix::Matrix;
use crate::exactnum::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
struct GInt {
    re: BigInt,
    im: BigInt,
}

impl GInt {
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn one() -> Self {
        GInt { re: BigInt::one(), im: BigInt::zero() }
    }

    fn mul(&self, o: &GInt) -> GInt {
        if self.im.is_zero() && o.im.is_zero() {
            return GInt { re: &self.re * &o.re, im: BigInt::zero() };
        }
        GInt { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }

    fn sub(&self, o: &GInt) -> GInt {
        GInt { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    /// Exact division; the quotient is known to lie in Z[i].
    fn exact_div(&self, d: &GInt) -> GInt {
        if d.im.is_zero() {
            if d.re.is_one() {
                return self.clone();
            }
            debug_assert!((&self.re % &d.re).is_zero() && (&self.im % &d.re).is_zero());
            return GInt { re: &self.re / &d.re, im: &self.im / &d.re };
        }
        let n = &d.re * &d.re + &d.im * &d.im;
        let re = &self.re * &d.re + &self.im * &d.im;
        let im = &self.im * &d.re - &self.re * &d.im;
        debug_assert!((&re % &n).is_zero() && (&im % &n).is_zero());
        GInt { re: re / &n, im: im / &n }
    }

    fn to_scalar(&self) -> Scalar {
        Scalar::new(Rational::from_integer(self.re.clone()), Rational::from_integer(self.im.clone()))
    }
}

/// Scale a row of Scalars to Gaussian integers by the lcm of its denominators.
fn integral_row(row: &[Scalar]) -> Vec<GInt> {
    let mut l = BigInt::one();
    for s in row {
        if !s.is_zero() {
            l = l.lcm(&s.denom_lcm());
        }
    }
    row.iter()
        .map(|s| {
            let re = s.re.numer() * (&l / s.re.denom());
            let im = s.im.numer() * (&l / s.im.denom());
            GInt { re, im }
        })
        .collect()
}

/// Bareiss elimination to row echelon form, pivots searched in the first `elim_cols` columns.
/// Returns the pivot columns in order; pivot row `k` is row `k` of `m`.
fn bareiss(m: &mut [Vec<GInt>], elim_cols: usize) -> Vec<usize> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut prev = GInt::one();
    let mut r = 0;
    for c in 0..elim_cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let prow = &top[r];
        let piv = &prow[c];
        for row in rest.iter_mut() {
            let f = row[c].clone();
            if f.is_zero() {
                for x in row.iter_mut().skip(c + 1) {
                    if !x.is_zero() {
                        *x = x.mul(piv).exact_div(&prev);
                    }
                }
            } else {
                for j in c + 1..ncols {
                    let a = row[j].mul(piv);
                    let b = f.mul(&prow[j]);
                    row[j] = a.sub(&b).exact_div(&prev);
                }
            }
            row[c] = GInt { re: BigInt::zero(), im: BigInt::zero() };
        }
        prev = piv.clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Reduced row echelon form over Q(i) computed from a fraction-free echelon form.
/// Returns the nonzero RREF rows and their pivot columns.
pub fn rref_rows(rows: &[Vec<Scalar>], ncols: usize, elim_cols: usize) -> (Vec<Vec<Scalar>>, Vec<usize>) {
    let mut m: Vec<Vec<GInt>> = rows
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| {
            assert_eq!(r.len(), ncols);
            integral_row(r)
        })
        .collect();
    let pivots = bareiss(&mut m, elim_cols);
    let mut out: Vec<Vec<Scalar>> = Vec::with_capacity(pivots.len());
    for (k, &c) in pivots.iter().enumerate() {
        let inv = m[k][c].to_scalar().inv().expect("nonzero pivot");
        let row: Vec<Scalar> =
            m[k].iter().map(|x| if x.is_zero() { Scalar::zero() } else { &x.to_scalar() * &inv }).collect();
        out.push(row);
    }
    // back substitution, bottom-up
    for k in (0..out.len()).rev() {
        let c = pivots[k];
        let (upper, lower) = out.split_at_mut(k);
        let prow = &lower[0];
        for row in upper.iter_mut() {
            let f = row[c].clone();
            if f.is_zero() {
                continue;
            }
            for j in c..ncols {
                if !prow[j].is_zero() {
                    let t = &f * &prow[j];
                    row[j] -= &t;
                }
            }
        }
    }
    // trailing rows of the echelon form that are nonzero only beyond `elim_cols`
    for row in m.iter().skip(pivots.len()) {
        if row.iter().any(|x| !x.is_zero()) {
            out.push(row.iter().map(GInt::to_scalar).collect());
        }
    }
    (out, pivots)
}

/// Outcome of an exact linear solve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Solution {
    Unique(Vec<Scalar>),
    Inconsistent,
    Underdetermined { particular: Vec<Scalar>, nullspace: Vec<Vec<Scalar>> },
}

impl Solution {
    pub fn is_unique(&self) -> bool {
        matches!(self, Solution::Unique(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Solution::Unique(_) => "unique",
            Solution::Inconsistent => "inconsistent",
            Solution::Underdetermined { .. } => "underdetermined",
        }
    }
}

fn nullspace_from_rref(rref: &[Vec<Scalar>], pivots: &[usize], n: usize) -> Vec<Vec<Scalar>> {
    let mut is_pivot = vec![false; n];
    for &p in pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for f in (0..n).filter(|&j| !is_pivot[j]) {
        let mut v = vec![Scalar::zero(); n];
        v[f] = Scalar::one();
        for (k, &p) in pivots.iter().enumerate() {
            v[p] = -&rref[k][f];
        }
        basis.push(v);
    }
    basis
}

/// Solve `A x = b` exactly.
pub fn solve_exact(a: &Matrix, b: &[Scalar]) -> Solution {
    assert_eq!(a.rows, b.len(), "right-hand side length mismatch");
    let n = a.cols;
    let rows: Vec<Vec<Scalar>> = (0..a.rows)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    let (rref, pivots) = rref_rows(&rows, n + 1, n);
    if rref.len() > pivots.len() {
        return Solution::Inconsistent;
    }
    let mut x = vec![Scalar::zero(); n];
    for (k, &p) in pivots.iter().enumerate() {
        x[p] = rref[k][n].clone();
    }
    if pivots.len() == n {
        Solution::Unique(x)
    } else {
        Solution::Underdetermined { particular: x, nullspace: nullspace_from_rref(&rref, &pivots, n) }
    }
}

/// RREF of a matrix (zero rows dropped) with pivot columns.
pub fn rref(a: &Matrix) -> (Matrix, Vec<usize>) {
    let (rows, pivots) = rref_rows(&a.row_vecs(), a.cols, a.cols);
    let m = if rows.is_empty() { Matrix::zeros(0, a.cols) } else { Matrix::from_rows(rows) };
    (m, pivots)
}

pub fn rank(a: &Matrix) -> usize {
    rref(a).1.len()
}

/// Basis of the right kernel, one vector per free column.
pub fn nullspace(a: &Matrix) -> Vec<Vec<Scalar>> {
    let (rows, pivots) = rref_rows(&a.row_vecs(), a.cols, a.cols);
    nullspace_from_rref(&rows, &pivots, a.cols)
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    if !a.is_square() {
        return None;
    }
    let n = a.rows;
    let aug = Matrix::hstack(a, &Matrix::identity(n));
    let (rows, pivots) = rref_rows(&aug.row_vecs(), 2 * n, n);
    if pivots.len() < n {
        return None;
    }
    let mut inv = Matrix::zeros(n, n);
    for (k, row) in rows.iter().enumerate().take(n) {
        for j in 0..n {
            inv.set(k, j, row[n + j].clone());
        }
    }
    Some(inv)
}

/// Determinant by fraction-free elimination.
pub fn det(a: &Matrix) -> Scalar {
    assert!(a.is_square());
    let n = a.rows;
    if n == 0 {
        return Scalar::one();
    }
    let mut scale = Scalar::one();
    let mut m: Vec<Vec<GInt>> = (0..n)
        .map(|i| {
            let r = a.row(i);
            let mut l = BigInt::one();
            for s in r {
                if !s.is_zero() {
                    l = l.lcm(&s.denom_lcm());
                }
            }
            scale = &scale * &Scalar::from_rational(Rational::from_integer(l));
            integral_row(r)
        })
        .collect();
    let mut sign = 1i64;
    let mut prev = GInt::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return Scalar::zero() };
        if p != c {
            m.swap(p, c);
            sign = -sign;
        }
        let (top, rest) = m.split_at_mut(c + 1);
        let prow = &top[c];
        for row in rest.iter_mut() {
            for j in c + 1..n {
                let t = row[j].mul(&prow[c]).sub(&row[c].mul(&prow[j]));
                row[j] = t.exact_div(&prev);
            }
        }
        prev = m[c][c].clone();
    }
    let d = m[n - 1][n - 1].to_scalar().scale_int(sign);
    d.checked_div(&scale).expect("nonzero scale")
}

/// Subspace utilities on row-vector bases.
pub fn span_rank(vectors: &[Vec<Scalar>], dim: usize) -> usize {
    rref_rows(vectors, dim, dim).1.len()
}

/// Reduced basis (RREF rows) of the span of the given vectors.
pub fn span_basis(vectors: &[Vec<Scalar>], dim: usize) -> Vec<Vec<Scalar>> {
    rref_rows(vectors, dim, dim).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_gives_rhs() {
        let b: Vec<Scalar> = vec![Scalar::from_frac(1, 3), Scalar::complex(2, -1), Scalar::zero()];
        assert_eq!(solve_exact(&Matrix::identity(3), &b), Solution::Unique(b.clone()));
    }

    #[test]
    fn zero_matrix_is_inconsistent() {
        let b = vec![Scalar::one(), Scalar::zero()];
        assert_eq!(solve_exact(&Matrix::zeros(2, 2), &b), Solution::Inconsistent);
    }

    #[test]
    fn rank_one_system() {
        // x + 2y = 3, 2x + 4y = 6
        let a = Matrix::from_int_rows(&[&[1, 2], &[2, 4]]);
        let b = vec![Scalar::from_int(3), Scalar::from_int(6)];
        match solve_exact(&a, &b) {
            Solution::Underdetermined { particular, nullspace } => {
                assert_eq!(particular, vec![Scalar::from_int(3), Scalar::zero()]);
                assert_eq!(nullspace, vec![vec![Scalar::from_int(-2), Scalar::one()]]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complex_inverse_and_det() {
        let a = Matrix::from_rows(vec![
            vec![Scalar::complex(1, 1), Scalar::from_frac(1, 2)],
            vec![Scalar::i(), Scalar::from_int(3)],
        ]);
        let inv = inverse(&a).unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        // (1+i)*3 - i/2 = 3 + 5/2 i
        assert_eq!(det(&a), "3+5/2*i".parse().unwrap());
    }
}
