//! Dense matrices over a [`Ring`] context.

use std::collections::HashMap;

use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Mat<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        self.data.chunks(self.cols.max(1)).map(|c| c.to_vec()).take(self.rows).collect()
    }

    pub fn map<F: Clone>(&self, f: impl Fn(&E) -> F) -> Mat<F> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn identity<R: Ring<Elem = E>>(ring: &R, n: usize) -> Self {
        Mat::from_fn(n, n, |i, j| if i == j { ring.one() } else { ring.zero() })
    }

    pub fn mul<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix shapes do not compose");
        Mat::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(ring.zero(), |acc, k| {
                let (a, b) = (self.get(i, k), other.get(k, j));
                if ring.is_exact_zero(a) || ring.is_exact_zero(b) {
                    acc
                } else {
                    ring.add(&acc, &ring.mul(a, b))
                }
            })
        })
    }

    pub fn sub<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| ring.sub(self.get(i, j), other.get(i, j)))
    }

    pub fn scale<R: Ring<Elem = E>>(&self, ring: &R, c: &E) -> Self {
        self.map(|x| ring.mul(c, x))
    }

    /// Kronecker product, with index `(i, k) ↦ i · other.rows + k`.
    pub fn kron<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        Mat::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            let a = self.get(i / other.rows, j / other.cols);
            let b = other.get(i % other.rows, j % other.cols);
            ring.mul(a, b)
        })
    }

    pub fn is_zero<R: Ring<Elem = E>>(&self, ring: &R) -> bool {
        self.data.iter().all(|x| ring.is_zero(x))
    }

    /// Determinant by expansion along rows, memoized over column subsets.
    pub fn det<R: Ring<Elem = E>>(&self, ring: &R) -> E {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        assert!(n < 24, "determinant expansion limited to small matrices");
        let mut memo: HashMap<u32, E> = HashMap::new();
        memo.insert(0, ring.one());
        for size in 1..=n {
            let row = n - size;
            for mask in masks_of_size(n, size) {
                let mut acc = ring.zero();
                for (pos, j) in (0..n).filter(|j| mask & (1 << j) != 0).enumerate() {
                    let a = self.get(row, j);
                    if ring.is_exact_zero(a) {
                        continue;
                    }
                    let term = ring.mul(a, &memo[&(mask & !(1 << j))]);
                    acc = if pos % 2 == 0 { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
                }
                memo.insert(mask, acc);
            }
        }
        memo.remove(&((1u32 << n) - 1)).expect("full mask computed")
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let rows = (0..self.rows).filter(|&i| i != skip_row);
        Mat::from_rows(
            rows.map(|i| {
                (0..self.cols)
                    .filter(|&j| j != skip_col)
                    .map(|j| self.get(i, j).clone())
                    .collect()
            })
            .collect(),
        )
    }

    /// Adjugate: `adj(A) · A = det(A) · 1`.
    pub fn adjugate<R: Ring<Elem = E>>(&self, ring: &R) -> Self {
        assert!(self.is_square());
        let n = self.rows;
        if n == 1 {
            return Mat::identity(ring, 1);
        }
        Mat::from_fn(n, n, |i, j| {
            let d = self.minor(j, i).det(ring);
            if (i + j) % 2 == 0 {
                d
            } else {
                ring.neg(&d)
            }
        })
    }
}

fn masks_of_size(n: usize, size: usize) -> impl Iterator<Item = u32> {
    (0u32..(1u32 << n)).filter(move |m| m.count_ones() as usize == size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldSpec, Fq};

    #[test]
    fn det_and_adjugate_over_f5() {
        let f = FieldSpec::prime_field(5).unwrap();
        let a = Mat::from_rows(vec![
            vec![Fq(1), Fq(2), Fq(3)],
            vec![Fq(0), Fq(4), Fq(1)],
            vec![Fq(2), Fq(2), Fq(0)],
        ]);
        // 1(0-2) - 2(0-2) + 3(0-8) = -2 + 4 - 24 = -22 ≡ 3
        assert_eq!(a.det(&f), Fq(3));
        let adj = a.adjugate(&f);
        assert_eq!(adj.mul(&f, &a), Mat::identity(&f, 3).scale(&f, &Fq(3)));
        assert_eq!(a.mul(&f, &adj), Mat::identity(&f, 3).scale(&f, &Fq(3)));
    }

    #[test]
    fn kronecker_determinant() {
        let f = FieldSpec::prime_field(7).unwrap();
        let a = Mat::from_rows(vec![vec![Fq(1), Fq(2)], vec![Fq(3), Fq(5)]]);
        let b = Mat::from_rows(vec![vec![Fq(2), Fq(0)], vec![Fq(1), Fq(3)]]);
        let k = a.kron(&f, &b);
        // det(A ⊗ B) = det(A)^2 det(B)^2
        let expect = f.mul_fq(f.pow_fq(a.det(&f), 2), f.pow_fq(b.det(&f), 2));
        assert_eq!(k.det(&f), expect);
    }
}
