//! Dense integer matrices with exact normal forms.
//!
//! Everything here is arbitrary precision. The Smith and Hermite routines keep
//! their unimodular transformation matrices so that callers can read off
//! saturation bases, kernel bases and coset witnesses.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.row_iter()).finish()
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(rows, cols)
    }

    /// Like [`IntMatrix::from_rows`] but fixes the column count, so an empty
    /// row list still produces a `0 x cols` matrix.
    pub fn from_rows_with_cols(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: row.len() });
            }
            data.extend(row);
        }
        Ok(IntMatrix { rows: n, cols, data })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let v = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_rows(v).expect("ragged literal")
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Block diagonal sum.
    pub fn direct_sum(blocks: &[IntMatrix]) -> Self {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(r, c);
        let (mut i0, mut j0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(i0 + i, j0 + j)] = b[(i, j)].clone();
                }
            }
            i0 += b.rows;
            j0 += b.cols;
        }
        m
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

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[BigInt]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.row_iter().map(<[BigInt]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok(self.row_iter().map(|r| crate::arith::dot(r, v)).collect())
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if self.rows != v.len() {
            return Err(Error::DimensionMismatch { expected: self.rows, got: v.len() });
        }
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += vi * &self[(i, j)];
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    pub fn is_symmetric(&self) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self[(i, j)] != self[(j, i)] {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Stacks the rows of `self` on top of the rows of `other`.
    pub fn stack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.cols });
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(IntMatrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += factor * row[src]
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(src, j)] * factor;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += factor * col[src]
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self[(i, src)] * factor;
            self[(i, dst)] += v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
                m[(i, k)] = BigInt::zero();
            }
            prev = m[(k, k)].clone();
        }
        Ok(sign * &m[(n - 1, n - 1)])
    }

    /// Row echelon (Hermite) form with transformation: returns `(h, u)` with
    /// `u * self = h`, `u` unimodular. Nonzero rows of `h` come first, have
    /// positive pivots, and entries above each pivot are reduced into
    /// `[0, pivot)`. Zero rows of `h` mark rows of `u` spanning the left kernel.
    pub fn hermite_with_transform(&self) -> (IntMatrix, IntMatrix) {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            loop {
                let pivot = (row..self.rows)
                    .filter(|&i| !h[(i, col)].is_zero())
                    .min_by(|&a, &b| h[(a, col)].abs().cmp(&h[(b, col)].abs()).then(a.cmp(&b)));
                let Some(pi) = pivot else { break };
                h.swap_rows(pi, row);
                u.swap_rows(pi, row);
                let mut clean = true;
                for i in (row + 1)..self.rows {
                    if h[(i, col)].is_zero() {
                        continue;
                    }
                    let q = h[(i, col)].div_floor(&h[(row, col)]);
                    let nq = -q;
                    h.add_row_multiple(i, row, &nq);
                    u.add_row_multiple(i, row, &nq);
                    if !h[(i, col)].is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
            }
            if h[(row, col)].is_zero() {
                continue;
            }
            if h[(row, col)].is_negative() {
                h.negate_row(row);
                u.negate_row(row);
            }
            for i in 0..row {
                let q = h[(i, col)].div_floor(&h[(row, col)]);
                if !q.is_zero() {
                    let nq = -q;
                    h.add_row_multiple(i, row, &nq);
                    u.add_row_multiple(i, row, &nq);
                }
            }
            row += 1;
        }
        (h, u)
    }

    /// Canonical basis of the row span: the nonzero rows of the Hermite form.
    pub fn hermite(&self) -> IntMatrix {
        let (h, _) = self.hermite_with_transform();
        let rank = h.row_iter().take_while(|r| r.iter().any(|x| !x.is_zero())).count();
        IntMatrix { rows: rank, cols: self.cols, data: h.data[..rank * self.cols].to_vec() }
    }

    pub fn rank(&self) -> usize {
        self.hermite().rows
    }

    /// Basis (as rows) of `{x : x * self = 0}`. The returned lattice is saturated.
    pub fn left_kernel(&self) -> IntMatrix {
        let (h, u) = self.hermite_with_transform();
        let rows: Vec<Vec<BigInt>> =
            (0..self.rows).filter(|&i| h.row(i).iter().all(Zero::is_zero)).map(|i| u.row(i).to_vec()).collect();
        IntMatrix::from_rows_with_cols(rows, self.rows).expect("kernel rows have uniform length")
    }

    /// Smith normal form `u * self * v = diag(d)`, with `v_inv = v^{-1}` kept too.
    pub fn smith(&self) -> SmithForm {
        let (m, n) = (self.rows, self.cols);
        let mut d = self.clone();
        let mut u = IntMatrix::identity(m);
        let mut v = IntMatrix::identity(n);
        let mut v_inv = IntMatrix::identity(n);
        let mut diag = Vec::new();
        for t in 0..m.min(n) {
            loop {
                let mut best: Option<(usize, usize)> = None;
                for i in t..m {
                    for j in t..n {
                        let x = &d[(i, j)];
                        if x.is_zero() {
                            continue;
                        }
                        if best.is_none_or(|(bi, bj)| x.abs() < d[(bi, bj)].abs()) {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((pi, pj)) = best else {
                    return SmithForm { diag, u, v, v_inv };
                };
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                v_inv.swap_rows(t, pj);

                let mut done = true;
                for i in (t + 1)..m {
                    if d[(i, t)].is_zero() {
                        continue;
                    }
                    let q = -(&d[(i, t)] / &d[(t, t)]);
                    d.add_row_multiple(i, t, &q);
                    u.add_row_multiple(i, t, &q);
                    if !d[(i, t)].is_zero() {
                        done = false;
                    }
                }
                for j in (t + 1)..n {
                    if d[(t, j)].is_zero() {
                        continue;
                    }
                    let q = &d[(t, j)] / &d[(t, t)];
                    let nq = -&q;
                    d.add_col_multiple(j, t, &nq);
                    v.add_col_multiple(j, t, &nq);
                    // inverse of the column operation is a row operation on v_inv
                    v_inv.add_row_multiple(t, j, &q);
                    if !d[(t, j)].is_zero() {
                        done = false;
                    }
                }
                if !done {
                    continue;
                }
                let pivot = d[(t, t)].clone();
                let offender = (t + 1..m)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !(&d[(i, j)] % &pivot).is_zero());
                match offender {
                    Some((i, _)) => {
                        let one = BigInt::one();
                        d.add_row_multiple(t, i, &one);
                        u.add_row_multiple(t, i, &one);
                    }
                    None => break,
                }
            }
            if d[(t, t)].is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
            diag.push(d[(t, t)].clone());
        }
        SmithForm { diag, u, v, v_inv }
    }
}

/// Output of [`IntMatrix::smith`]: `u * a * v` is diagonal with nonzero
/// entries `diag` (each dividing the next), padded with zeros.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diag: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use proptest::prelude::*;

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
        proptest::collection::vec(-6i64..=6, rows * cols).prop_map(move |v| {
            let rows_v = v.chunks(cols).map(|c| c.iter().map(|&x| int(x)).collect()).collect();
            IntMatrix::from_rows_with_cols(rows_v, cols).unwrap()
        })
    }

    // cofactor expansion, independent of Bareiss
    fn det_by_expansion(m: &IntMatrix) -> BigInt {
        let n = m.rows();
        if n == 0 {
            return int(1);
        }
        let mut total = BigInt::zero();
        for j in 0..n {
            let minor_rows: Vec<Vec<BigInt>> =
                (1..n).map(|i| (0..n).filter(|&c| c != j).map(|c| m[(i, c)].clone()).collect()).collect();
            let minor = IntMatrix::from_rows_with_cols(minor_rows, n - 1).unwrap();
            let term = &m[(0, j)] * det_by_expansion(&minor);
            if j % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(IntMatrix::from_i64(&[&[0, 1], &[1, 0]]).determinant().unwrap(), int(-1));
        assert_eq!(IntMatrix::from_i64(&[&[0, 3], &[3, 0]]).determinant().unwrap(), int(-9));
        assert_eq!(IntMatrix::from_i64(&[&[1, 2], &[2, 4]]).determinant().unwrap(), int(0));
        assert_eq!(IntMatrix::identity(0).determinant().unwrap(), int(1));
    }

    #[test]
    fn smith_examples() {
        let s = IntMatrix::from_i64(&[&[0, 3], &[3, 0]]).smith();
        assert_eq!(s.diag, vec![int(3), int(3)]);
        let s = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]).smith();
        assert_eq!(s.diag, vec![int(2), int(6), int(12)]);
        let s = IntMatrix::from_i64(&[&[2, 0, 2], &[0, 2, 2]]).smith();
        assert_eq!(s.diag, vec![int(2), int(2)]);
    }

    #[test]
    fn kernel_of_row() {
        let k = IntMatrix::from_i64(&[&[2], &[3]]).left_kernel();
        assert_eq!(k.rows(), 1);
        let x = k.row(0);
        assert_eq!(&x[0] * int(2) + &x[1] * int(3), int(0));
    }

    proptest! {
        #[test]
        fn bareiss_matches_expansion(m in small_matrix(4, 4)) {
            prop_assert_eq!(m.determinant().unwrap(), det_by_expansion(&m));
        }

        #[test]
        fn smith_decomposition_holds(m in small_matrix(3, 4)) {
            let s = m.smith();
            let d = s.u.mul(&m).unwrap().mul(&s.v).unwrap();
            for i in 0..3 {
                for j in 0..4 {
                    let expected = if i == j && i < s.diag.len() { s.diag[i].clone() } else { BigInt::zero() };
                    prop_assert_eq!(&d[(i, j)], &expected);
                }
            }
            for w in s.diag.windows(2) {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
            prop_assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(4));
            prop_assert_eq!(s.u.determinant().unwrap().abs(), int(1));
        }

        #[test]
        fn hermite_transform_holds(m in small_matrix(4, 3)) {
            let (h, u) = m.hermite_with_transform();
            prop_assert_eq!(u.mul(&m).unwrap(), h);
            prop_assert_eq!(u.determinant().unwrap().abs(), int(1));
            let k = m.left_kernel();
            prop_assert_eq!(k.rows() + m.rank(), 4);
            let zero = k.mul(&m).unwrap();
            prop_assert!(zero.row_iter().flatten().all(Zero::is_zero));
        }
    }
}
