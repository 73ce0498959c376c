//! Small dense linear algebra over exact (or floating) coefficients.

use crate::algebra::Poly;
use crate::scalar::Coeff;

/// Incrementally maintained echelon basis; used for greedy column selection.
#[derive(Clone, Debug)]
pub struct EchelonBasis<C> {
    dim: usize,
    rows: Vec<(usize, Vec<C>)>,
}

impl<C: Coeff> EchelonBasis<C> {
    pub fn new(dim: usize) -> Self {
        EchelonBasis { dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    fn reduce(&self, v: &[C]) -> Vec<C> {
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let f = v[*pivot].clone() / row[*pivot].clone();
            for (a, b) in v.iter_mut().zip(row) {
                *a = a.clone() - f.clone() * b.clone();
            }
        }
        v
    }

    /// Whether `v` lies outside the current span.
    pub fn is_independent(&self, v: &[C]) -> bool {
        self.reduce(v).iter().any(|c| !c.is_zero())
    }

    /// Adds `v` if it increases the rank; returns whether it did.
    pub fn insert(&mut self, v: &[C]) -> bool {
        assert_eq!(v.len(), self.dim);
        let r = self.reduce(v);
        match r.iter().position(|c| !c.is_zero()) {
            Some(p) => {
                self.rows.push((p, r));
                true
            }
            None => false,
        }
    }
}

/// Rank of a list of vectors (rows) by exact elimination.
pub fn rank<C: Coeff>(vectors: &[Vec<C>]) -> usize {
    let Some(first) = vectors.first() else { return 0 };
    let mut basis = EchelonBasis::new(first.len());
    for v in vectors {
        basis.insert(v);
    }
    basis.rank()
}

/// Determinant by Gaussian elimination.
pub fn determinant<C: Coeff>(m: &[Vec<C>]) -> C {
    let n = m.len();
    let mut a: Vec<Vec<C>> = m.to_vec();
    let mut det = C::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return C::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det = det * pivot.clone();
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / pivot.clone();
            for c in col..n {
                let v = a[r][c].clone() - f.clone() * a[col][c].clone();
                a[r][c] = v;
            }
        }
    }
    det
}

/// Determinant of a matrix of polynomials by cofactor expansion.
pub fn poly_determinant<C: Coeff>(m: &[Vec<Poly<C>>], n_vars: usize) -> Poly<C> {
    match m.len() {
        0 => Poly::one(n_vars),
        1 => m[0][0].clone(),
        n => {
            let mut acc = Poly::zero(n_vars);
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Poly<C>>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect())
                    .collect();
                let term = &m[0][j] * &poly_determinant(&minor, n_vars);
                acc = if j % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn rank_and_det() {
        let m = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(0), q(1), q(1)]];
        assert_eq!(rank(&m), 2);
        assert_eq!(determinant(&m), q(0));
        let m = vec![vec![q(0), q(2)], vec![q(3), q(1)]];
        assert_eq!(determinant(&m), q(-6));
        let p: Vec<Vec<Poly<Rational>>> = m
            .iter()
            .map(|r| r.iter().map(|c| Poly::constant(1, c.clone())).collect())
            .collect();
        assert_eq!(poly_determinant(&p, 1).constant_term(), q(-6));
    }

    #[test]
    fn echelon_insertion() {
        let mut b = EchelonBasis::new(2);
        assert!(!b.insert(&[q(0), q(0)]));
        assert!(b.insert(&[q(1), q(0)]));
        assert!(!b.insert(&[q(5), q(0)]));
        assert!(b.insert(&[q(1), q(1)]));
        assert!(b.is_full());
    }
}
