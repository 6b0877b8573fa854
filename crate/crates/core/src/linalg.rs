//! Exact elimination over a [`Field`] and hermitian positivity certificates.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::cyclotomic::Cyclotomic;
use crate::scalar::{Field, C64};

/// Row-reduced basis of a subspace, grown one vector at a time.
///
/// Rows are kept fully reduced: each pivot column is zero in every other row.
#[derive(Clone, Debug)]
pub struct EchelonBasis<F: Field> {
    ncols: usize,
    rows: Vec<(usize, Vec<F>)>,
}

impl<F: Field> EchelonBasis<F> {
    pub fn new(ncols: usize) -> Self {
        EchelonBasis {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &[F])> {
        self.rows.iter().map(|(p, r)| (*p, r.as_slice()))
    }

    /// Reduces `v` against the current rows.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let c = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = x.sub(&c.mul(r));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v).iter().all(F::is_zero)
    }

    /// Adds `v`; returns `false` if it was already in the span.
    pub fn insert(&mut self, v: &[F]) -> bool {
        assert_eq!(v.len(), self.ncols);
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let c = row[p].clone();
            for (x, r) in row.iter_mut().zip(&v) {
                if !r.is_zero() {
                    *x = x.sub(&c.mul(r));
                }
            }
        }
        self.rows.push((p, v));
        true
    }

    /// Basis of `{x : row·x = 0 for every row}`.
    pub fn null_space(&self) -> Vec<Vec<F>> {
        let pivots: Vec<usize> = self.rows.iter().map(|(p, _)| *p).collect();
        let mut out = Vec::new();
        for free in 0..self.ncols {
            if pivots.contains(&free) {
                continue;
            }
            let mut x = vec![F::zero(); self.ncols];
            x[free] = F::one();
            for (p, row) in &self.rows {
                x[*p] = row[free].neg();
            }
            out.push(x);
        }
        out
    }
}

/// Rank of a list of vectors.
pub fn rank<F: Field>(vectors: &[Vec<F>]) -> usize {
    let Some(first) = vectors.first() else {
        return 0;
    };
    let mut basis = EchelonBasis::new(first.len());
    for v in vectors {
        basis.insert(v);
    }
    basis.rank()
}

/// Solution set of `A x = b`, with `A` given as augmented rows `[a | b]`.
///
/// Returns a particular solution and a null-space basis, or `None` if the
/// system is inconsistent.
pub fn solve_affine<F: Field>(augmented: &EchelonBasis<F>) -> Option<(Vec<F>, Vec<Vec<F>>)> {
    let n = augmented.ncols() - 1;
    if augmented.rows().any(|(p, _)| p == n) {
        return None;
    }
    let mut particular = vec![F::zero(); n];
    for (p, row) in augmented.rows() {
        particular[p] = row[n].clone();
    }
    let pivots: Vec<usize> = augmented.rows().map(|(p, _)| p).collect();
    let mut basis = Vec::new();
    for free in 0..n {
        if pivots.contains(&free) {
            continue;
        }
        let mut x = vec![F::zero(); n];
        x[free] = F::one();
        for (p, row) in augmented.rows() {
            x[p] = row[free].neg();
        }
        basis.push(x);
    }
    Some((particular, basis))
}

/// Why a hermitian matrix failed the exact positivity test. Indices refer to
/// the matrix as given.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NegativityWitness {
    /// Schur-complement pivot at `index` is negative.
    NegativePivot { index: usize, pivot: String },
    /// Zero pivots with a nonzero coupling: the 2×2 minor on `(i, j)` of the
    /// Schur complement has negative determinant.
    ZeroPivotCoupling { i: usize, j: usize },
    /// The matrix is not hermitian at `(i, j)`.
    NotHermitian { i: usize, j: usize },
}

/// Pivoted `L D L^*` factorization of a PSD matrix: `P A P^T = L D L^*`.
#[derive(Clone, Debug)]
pub struct LdlCertificate {
    /// Elimination order (original indices).
    pub order: Vec<usize>,
    /// Diagonal of `D` in elimination order; all `>= 0`.
    pub pivots: Vec<Cyclotomic>,
    /// Unit lower-triangular `L` in elimination order.
    pub lower: Vec<Vec<Cyclotomic>>,
}

impl LdlCertificate {
    /// Rebuilds `P A P^T` from the factors.
    pub fn reconstruct(&self) -> Vec<Vec<Cyclotomic>> {
        let n = self.order.len();
        let mut out = vec![vec![Cyclotomic::zero(); n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = Cyclotomic::zero();
                for k in 0..=i.min(j) {
                    let t =
                        self.lower[i][k].clone() * self.pivots[k].clone() * self.lower[j][k].conj();
                    if !t.is_zero() {
                        acc = acc + t;
                    }
                }
                *cell = acc;
            }
        }
        out
    }
}

pub fn is_hermitian(m: &[Vec<Cyclotomic>]) -> Option<(usize, usize)> {
    for i in 0..m.len() {
        for j in i..m.len() {
            if m[i][j] != m[j][i].conj() {
                return Some((i, j));
            }
        }
    }
    None
}

/// Exact PSD test by pivoted Schur complements.
pub fn ldl_psd(m: &[Vec<Cyclotomic>]) -> Result<LdlCertificate, NegativityWitness> {
    if let Some((i, j)) = is_hermitian(m) {
        return Err(NegativityWitness::NotHermitian { i, j });
    }
    let n = m.len();
    let mut a: Vec<Vec<Cyclotomic>> = m.to_vec();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    let mut pivots = Vec::with_capacity(n);
    // columns of L, indexed by original row
    let mut cols: Vec<Vec<Cyclotomic>> = Vec::with_capacity(n);

    while !remaining.is_empty() {
        let pos = remaining.iter().position(|&k| !a[k][k].is_zero());
        let Some(pos) = pos else {
            for (x, &i) in remaining.iter().enumerate() {
                for &j in &remaining[x + 1..] {
                    if !a[i][j].is_zero() {
                        return Err(NegativityWitness::ZeroPivotCoupling { i, j });
                    }
                }
            }
            // Zero Schur complement: the remaining pivots are zero.
            for &k in &remaining {
                order.push(k);
                pivots.push(Cyclotomic::zero());
                let mut col = vec![Cyclotomic::zero(); n];
                col[k] = Cyclotomic::one();
                cols.push(col);
            }
            break;
        };
        let k = remaining.remove(pos);
        let d = a[k][k].clone();
        if d.real_sign() == Ordering::Less {
            return Err(NegativityWitness::NegativePivot {
                index: k,
                pivot: d.to_string(),
            });
        }
        let dinv = d.inv().expect("nonzero pivot");
        let mut col = vec![Cyclotomic::zero(); n];
        col[k] = Cyclotomic::one();
        for &i in &remaining {
            if !a[i][k].is_zero() {
                col[i] = a[i][k].clone() * dinv.clone();
            }
        }
        for &i in &remaining {
            if col[i].is_zero() {
                continue;
            }
            for &j in &remaining {
                if a[k][j].is_zero() {
                    continue;
                }
                let t = col[i].clone() * a[k][j].clone();
                a[i][j] = a[i][j].clone() - t;
            }
        }
        order.push(k);
        pivots.push(d);
        cols.push(col);
    }

    let lower = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j <= i {
                        cols[j][order[i]].clone()
                    } else {
                        Cyclotomic::zero()
                    }
                })
                .collect()
        })
        .collect();
    Ok(LdlCertificate {
        order,
        pivots,
        lower,
    })
}

/// Smallest eigenvalue of a hermitian complex matrix.
pub fn min_eigenvalue(m: &[Vec<C64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 0.0;
    }
    let mat = DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let eig = mat.symmetric_eigen();
    eig.eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::{int, rat, Rational};

    fn cm(rows: &[&[i64]]) -> Vec<Vec<Cyclotomic>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| Cyclotomic::from_int(x)).collect())
            .collect()
    }

    #[test]
    fn null_space_of_rank_one() {
        let mut b = EchelonBasis::<Rational>::new(3);
        b.insert(&[int(1), int(2), int(3)]);
        assert!(!b.insert(&[int(2), int(4), int(6)]));
        let ns = b.null_space();
        assert_eq!(ns.len(), 2);
        for v in ns {
            let dot = v[0].clone() + int(2) * &v[1] + int(3) * &v[2];
            assert_eq!(dot, int(0));
        }
    }

    #[test]
    fn affine_solution() {
        // x + y = 1, x - y = 0
        let mut b = EchelonBasis::<Rational>::new(3);
        b.insert(&[int(1), int(1), int(1)]);
        b.insert(&[int(1), int(-1), int(0)]);
        let (p, ns) = solve_affine(&b).unwrap();
        assert_eq!(p, vec![rat(1, 2), rat(1, 2)]);
        assert!(ns.is_empty());
        // inconsistent: x = 1, x = 2
        let mut c = EchelonBasis::<Rational>::new(2);
        c.insert(&[int(1), int(1)]);
        c.insert(&[int(1), int(2)]);
        assert!(solve_affine(&c).is_none());
    }

    #[test]
    fn ldl_accepts_rank_deficient_psd() {
        let m = cm(&[&[1, 1], &[1, 1]]);
        let cert = ldl_psd(&m).unwrap();
        assert_eq!(cert.pivots[1], Cyclotomic::zero());
        let rebuilt = cert.reconstruct();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(rebuilt[i][j], m[cert.order[i]][cert.order[j]]);
            }
        }
    }

    #[test]
    fn ldl_rejects_indefinite() {
        let m = cm(&[&[1, 2], &[2, 1]]);
        assert!(matches!(
            ldl_psd(&m),
            Err(NegativityWitness::NegativePivot { .. })
        ));
        let z = cm(&[&[0, 1], &[1, 0]]);
        assert_eq!(
            ldl_psd(&z),
            Err(NegativityWitness::ZeroPivotCoupling { i: 0, j: 1 })
        );
        let nh = cm(&[&[1, 1], &[0, 1]]);
        assert!(matches!(
            ldl_psd(&nh),
            Err(NegativityWitness::NotHermitian { .. })
        ));
    }

    #[test]
    fn ldl_complex_hermitian() {
        // [[2, i], [-i, 2]] has eigenvalues 1, 3
        let i = Cyclotomic::i();
        let m = vec![
            vec![Cyclotomic::from_int(2), i.clone()],
            vec![-i, Cyclotomic::from_int(2)],
        ];
        assert!(ldl_psd(&m).is_ok());
        let mf: Vec<Vec<C64>> = m
            .iter()
            .map(|r| r.iter().map(|x| x.to_c64()).collect())
            .collect();
        assert!((min_eigenvalue(&mf) - 1.0).abs() < 1e-12);
    }
}

impl PartialEq for LdlCertificate {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.pivots == other.pivots && self.lower == other.lower
    }
}
