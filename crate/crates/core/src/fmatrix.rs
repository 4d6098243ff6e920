//! Dense matrices over GF(p).

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElem};

/// Row-major dense matrix tied to a single [`Field`].
#[derive(Clone, PartialEq, Eq)]
pub struct FMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FMatrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<u64> = self.row(r).iter().map(|e| e.value()).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: FMatrix,
    pub pivots: Vec<usize>,
}

impl FMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        FMatrix {
            field,
            rows,
            cols,
            data: vec![FieldElem::ZERO; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, FieldElem::ONE);
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod p.
    pub fn from_rows(field: Field, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        let data = rows.iter().flatten().map(|&v| field.elem(v)).collect();
        Ok(FMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Like [`FMatrix::from_rows`] but with an explicit column count, so
    /// that matrices with zero rows keep their width.
    pub fn from_rows_with_cols(field: Field, cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        if rows.is_empty() {
            return Ok(Self::zeros(field, 0, cols));
        }
        let m = Self::from_rows(field, rows)?;
        if m.cols != cols {
            return Err(Error::DimensionMismatch(format!(
                "rows have {} entries, expected {cols}",
                m.cols
            )));
        }
        Ok(m)
    }

    pub fn random<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols)
            .map(|_| field.from_u64(rng.gen_range(0..field.p())))
            .collect();
        FMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElem {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|e| e.value()).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    fn same_field(&self, other: &FMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.p(), other.field.p()));
        }
        Ok(())
    }

    pub fn mul(&self, rhs: &FMatrix) -> Result<FMatrix> {
        self.same_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let v = f.add(out.get(r, c), f.mul(a, rhs.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        let f = self.field;
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(FieldElem::ZERO, |acc, (&a, &x)| f.add(acc, f.mul(a, x)))
            })
            .collect()
    }

    pub fn add(&self, rhs: &FMatrix) -> Result<FMatrix> {
        self.same_field(rhs)?;
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} plus {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = self.field;
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(FMatrix { data, ..self.clone() })
    }

    pub fn neg(&self) -> FMatrix {
        let f = self.field;
        FMatrix {
            data: self.data.iter().map(|&a| f.neg(a)).collect(),
            ..self.clone()
        }
    }

    /// Columns in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> FMatrix {
        let mut out = Self::zeros(self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> FMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        FMatrix {
            field: self.field,
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    /// Reduced row echelon form by Gauss-Jordan elimination with
    /// first-nonzero pivoting.
    pub fn rref(&self) -> Echelon {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..m.cols {
            if prow == m.rows {
                break;
            }
            let Some(sel) = (prow..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(sel, prow);
            let inv = f.inv(m.get(prow, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = f.mul(m.get(prow, j), inv);
                m.set(prow, j, v);
            }
            for r in 0..m.rows {
                if r == prow {
                    continue;
                }
                let factor = m.get(r, c);
                if factor.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(prow, j)));
                    m.set(r, j, v);
                }
            }
            pivots.push(c);
            prow += 1;
        }
        Echelon { matrix: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref().pivots.len()
    }

    /// Some `X` with `self * X = rhs`.
    pub fn solve_right(&self, rhs: &FMatrix) -> Result<FMatrix> {
        self.same_field(rhs)?;
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows, B has {}",
                self.rows, rhs.rows
            )));
        }
        let aug = FMatrix::hstack(&[self, rhs])?;
        let ech = aug.rref();
        let n = self.cols;
        if ech.pivots.iter().any(|&c| c >= n) {
            return Err(Error::NoSolution);
        }
        // free variables are set to zero
        let mut x = FMatrix::zeros(self.field, n, rhs.cols);
        for (i, &pc) in ech.pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, ech.matrix.get(i, n + j));
            }
        }
        Ok(x)
    }

    /// True iff every column of `a` lies in the column space of `self`.
    pub fn col_space_contains(&self, a: &FMatrix) -> Result<bool> {
        if self.rows != a.rows {
            return Err(Error::DimensionMismatch(format!(
                "column spaces of different heights ({} vs {})",
                self.rows, a.rows
            )));
        }
        Ok(FMatrix::hstack(&[self, a])?.rank() == self.rank())
    }

    pub fn hstack(parts: &[&FMatrix]) -> Result<FMatrix> {
        let Some(first) = parts.first() else {
            return Err(Error::DimensionMismatch("hstack of nothing".into()));
        };
        let rows = first.rows;
        for p in parts {
            first.same_field(p)?;
            if p.rows != rows {
                return Err(Error::DimensionMismatch(format!(
                    "hstack of {} and {} rows",
                    rows, p.rows
                )));
            }
        }
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for p in parts {
                data.extend_from_slice(p.row(r));
            }
        }
        Ok(FMatrix {
            field: first.field,
            rows,
            cols,
            data,
        })
    }

    pub fn vstack(parts: &[&FMatrix]) -> Result<FMatrix> {
        let Some(first) = parts.first() else {
            return Err(Error::DimensionMismatch("vstack of nothing".into()));
        };
        let cols = first.cols;
        for p in parts {
            first.same_field(p)?;
            if p.cols != cols {
                return Err(Error::DimensionMismatch(format!(
                    "vstack of {} and {} columns",
                    cols, p.cols
                )));
            }
        }
        let data = parts.iter().flat_map(|p| p.data.iter().copied()).collect();
        Ok(FMatrix {
            field: first.field,
            rows: parts.iter().map(|p| p.rows).sum(),
            cols,
            data,
        })
    }

    /// Block-diagonal matrix with the given blocks.
    pub fn block_diag(field: Field, blocks: &[&FMatrix]) -> Result<FMatrix> {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = FMatrix::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            if b.field != field {
                return Err(Error::FieldMismatch(field.p(), b.field.p()));
            }
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(r0 + r, c0 + c, b.get(r, c));
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        Ok(out)
    }

    /// Cauchy matrix with evaluation points `a_i = i` and `b_j = rows + j`.
    pub fn cauchy(rows: usize, cols: usize, field: Field) -> Result<FMatrix> {
        let needed = rows + cols;
        if needed as u64 > field.p() {
            return Err(Error::FieldTooSmall { needed, p: field.p() });
        }
        let a: Vec<u64> = (0..rows as u64).collect();
        let b: Vec<u64> = (rows as u64..needed as u64).collect();
        Self::cauchy_with_points(field, &a, &b)
    }

    /// Cauchy matrix `M(i,j) = 1 / (a_i - b_j)`; all points must be distinct
    /// field elements.
    pub fn cauchy_with_points(field: Field, a: &[u64], b: &[u64]) -> Result<FMatrix> {
        let mut all: Vec<u64> = a.iter().chain(b).map(|&x| x % field.p()).collect();
        let needed = all.len();
        if needed as u64 > field.p() {
            return Err(Error::FieldTooSmall { needed, p: field.p() });
        }
        all.sort_unstable();
        all.dedup();
        if all.len() != needed {
            return Err(Error::DimensionMismatch("Cauchy points are not distinct".into()));
        }
        let mut m = FMatrix::zeros(field, a.len(), b.len());
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                let d = field.sub(field.from_u64(ai), field.from_u64(bj));
                m.set(i, j, field.inv(d)?);
            }
        }
        Ok(m)
    }

    /// Cauchy matrix on `rows + cols` distinct points drawn uniformly from
    /// the field.
    pub fn random_cauchy<R: Rng + ?Sized>(rows: usize, cols: usize, field: Field, rng: &mut R) -> Result<FMatrix> {
        let needed = rows + cols;
        if needed as u64 > field.p() {
            return Err(Error::FieldTooSmall { needed, p: field.p() });
        }
        let points = rand::seq::index::sample(rng, field.p() as usize, needed);
        let pts: Vec<u64> = points.into_iter().map(|x| x as u64).collect();
        Self::cauchy_with_points(field, &pts[..rows], &pts[rows..])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> Field {
        Field::new(p).unwrap()
    }

    fn m(p: u64, rows: &[Vec<i64>]) -> FMatrix {
        FMatrix::from_rows(gf(p), rows).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FMatrix::zeros(gf(2), 0, 0).rank(), 0);
        assert_eq!(FMatrix::identity(gf(2), 3).rank(), 3);
        assert_eq!(m(2, &[vec![1, 1], vec![1, 1]]).rank(), 1);
        assert_eq!(m(3, &[vec![1, 2], vec![2, 1]]).rank(), 1);
        assert_eq!(m(5, &[vec![1, 2], vec![2, 1]]).rank(), 2);
        assert_eq!(FMatrix::zeros(gf(7), 3, 0).rank(), 0);
    }

    #[test]
    fn cauchy_examples() {
        let c = FMatrix::cauchy(1, 1, gf(3)).unwrap();
        // a_0 = 0, b_0 = 1, 1/(0-1) = 1/2 = 2 in GF(3)
        assert_eq!(c.to_rows(), vec![vec![2]]);

        let c = FMatrix::cauchy(2, 2, gf(5)).unwrap();
        assert_eq!(c.rank(), 2);
        for r in 0..2 {
            for col in 0..2 {
                assert!(!c.get(r, col).is_zero());
            }
        }
        assert_eq!(
            FMatrix::cauchy(3, 4, gf(5)),
            Err(Error::FieldTooSmall { needed: 7, p: 5 })
        );
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    }

    #[test]
    fn cauchy_is_mds_exhaustive() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let f = gf(p);
            for r in 1..=4usize {
                for c in 1..=4usize {
                    if (r + c) as u64 > p {
                        continue;
                    }
                    let cm = FMatrix::cauchy(r, c, f).unwrap();
                    for k in 1..=r.min(c) {
                        for rs in subsets(r, k) {
                            for cs in subsets(c, k) {
                                let sub = cm.select_rows(&rs).select_cols(&cs);
                                assert_eq!(sub.rank(), k, "p={p} {r}x{c} rows {rs:?} cols {cs:?}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn random_cauchy_points_are_distinct_and_mds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = gf(11);
        for _ in 0..20 {
            let cm = FMatrix::random_cauchy(4, 5, f, &mut rng).unwrap();
            for rs in subsets(4, 4) {
                for cs in subsets(5, 4) {
                    assert_eq!(cm.select_rows(&rs).select_cols(&cs).rank(), 4);
                }
            }
        }
    }

    #[test]
    fn solve_examples() {
        let i2 = FMatrix::identity(gf(2), 2);
        assert_eq!(i2.solve_right(&i2).unwrap(), i2);
        let a = m(2, &[vec![1], vec![0]]);
        let b = m(2, &[vec![0], vec![1]]);
        assert_eq!(a.solve_right(&b), Err(Error::NoSolution));
        let a = m(2, &[vec![1, 1]]);
        let b = m(2, &[vec![1]]);
        let x = a.solve_right(&b).unwrap();
        assert_eq!(a.mul(&x).unwrap(), b);
        assert_eq!(x.to_rows(), vec![vec![1], vec![0]]);
    }

    #[test]
    fn col_space_examples() {
        let f = gf(2);
        let any = m(2, &[vec![1, 0, 1], vec![1, 1, 0]]);
        assert!(FMatrix::identity(f, 2).col_space_contains(&any).unwrap());
        let empty = FMatrix::zeros(f, 2, 0);
        assert!(!empty.col_space_contains(&m(2, &[vec![1], vec![0]])).unwrap());
        let b = m(2, &[vec![1], vec![1]]);
        assert!(b.col_space_contains(&b).unwrap());
    }

    #[test]
    fn stacking() {
        let f = gf(3);
        let v = FMatrix::vstack(&[&FMatrix::zeros(f, 1, 2), &FMatrix::zeros(f, 2, 2)]).unwrap();
        assert_eq!((v.rows(), v.cols()), (3, 2));
        let h = FMatrix::hstack(&[&FMatrix::zeros(f, 2, 1), &FMatrix::zeros(f, 2, 3)]).unwrap();
        assert_eq!((h.rows(), h.cols()), (2, 4));
        assert!(matches!(
            FMatrix::vstack(&[&FMatrix::zeros(f, 1, 2), &FMatrix::zeros(f, 1, 3)]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            FMatrix::hstack(&[&FMatrix::zeros(f, 1, 2), &FMatrix::zeros(gf(5), 1, 3)]),
            Err(Error::FieldMismatch(3, 5))
        ));
    }

    #[test]
    fn rref_of_matrix_with_empty_rows() {
        let f = gf(5);
        let e = FMatrix::zeros(f, 0, 3).rref();
        assert!(e.pivots.is_empty());
    }

    fn arb_matrix() -> impl Strategy<Value = FMatrix> {
        (
            prop::sample::select(vec![2u64, 3, 5, 7]),
            0usize..6,
            0usize..6,
            any::<u64>(),
        )
            .prop_map(|(p, r, c, seed)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                FMatrix::random(gf(p), r, c, &mut rng)
            })
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant(a in arb_matrix()) {
            prop_assert_eq!(a.rank(), a.transpose().rank());
        }

        #[test]
        fn solve_right_solutions_are_exact(a in arb_matrix(), seed in any::<u64>(), k in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = FMatrix::random(a.field(), a.rows(), k, &mut rng);
            match a.solve_right(&b) {
                Ok(x) => prop_assert_eq!(a.mul(&x).unwrap(), b),
                Err(Error::NoSolution) => prop_assert!(!a.col_space_contains(&b).unwrap()),
                Err(e) => prop_assert!(false, "unexpected error {}", e),
            }
        }

        #[test]
        fn consistent_systems_are_solved(a in arb_matrix(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x0 = FMatrix::random(a.field(), a.cols(), 2, &mut rng);
            let b = a.mul(&x0).unwrap();
            let x = a.solve_right(&b).unwrap();
            prop_assert_eq!(a.mul(&x).unwrap(), b);
        }
    }
}
