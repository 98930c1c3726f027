use crate::error::{Error, Result};
use crate::scalars::Fp;

/// Dense matrix over the prime field. Row-major.
///
/// Graded pieces stay small at the documented truncations, so plain Gaussian
/// elimination is all the machinery the cohomology layer needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    entries: Vec<Fp>,
}

impl FpMatrix {
    pub fn zero(p: u32, rows: usize, cols: usize) -> FpMatrix {
        FpMatrix { p, rows, cols, entries: vec![Fp::zero(p); rows * cols] }
    }

    pub fn identity(p: u32, n: usize) -> FpMatrix {
        let mut m = FpMatrix::zero(p, n, n);
        for i in 0..n {
            m.set(i, i, Fp::one(p));
        }
        m
    }

    pub fn from_rows(p: u32, rows: Vec<Vec<Fp>>) -> FpMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row);
        }
        FpMatrix { p, rows: r, cols: c, entries }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Fp {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Fp) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn mul_vec(&self, x: &[Fp]) -> Vec<Fp> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = Fp::zero(self.p);
                for c in 0..self.cols {
                    acc = acc.add(&self.get(r, c).mul(&x[c]));
                }
                acc
            })
            .collect()
    }

    /// Row echelon form; returns (echelon matrix, pivot column per pivot row).
    fn echelon(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row >= m.rows {
                break;
            }
            let mut piv = None;
            for r in row..m.rows {
                if !m.get(r, col).is_zero() {
                    piv = Some(r);
                    break;
                }
            }
            let Some(piv) = piv else { continue };
            for c in 0..m.cols {
                let (a, b) = (m.get(row, c), m.get(piv, c));
                if row != piv {
                    m.set(row, c, b);
                    m.set(piv, c, a);
                }
            }
            let inv = m.get(row, col).inv();
            for c in col..m.cols {
                m.set(row, c, m.get(row, c).mul(&inv));
            }
            for r in 0..m.rows {
                if r != row && !m.get(r, col).is_zero() {
                    let f = m.get(r, col);
                    for c in col..m.cols {
                        let v = m.get(r, c).sub(&f.mul(&m.get(row, c)));
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    /// Rank and a basis of the right kernel. `rank + kernel.len() == cols`.
    pub fn rank_kernel(&self) -> (usize, Vec<Vec<Fp>>) {
        let (ech, pivots) = self.echelon();
        let rank = pivots.len();
        let mut kernel = Vec::new();
        let is_pivot = |c: usize| pivots.binary_search(&c).is_ok();
        for free in 0..self.cols {
            if is_pivot(free) {
                continue;
            }
            let mut v = vec![Fp::zero(self.p); self.cols];
            v[free] = Fp::one(self.p);
            for (prow, pcol) in pivots.iter().enumerate() {
                // echelon row: x_pcol + sum_{c free} e[prow][c] x_c = 0
                v[*pcol] = ech.get(prow, free).neg();
            }
            kernel.push(v);
        }
        (rank, kernel)
    }

    pub fn rank(&self) -> usize {
        self.rank_kernel().0
    }

    /// One solution of `self * x = target`, or `None` iff the target is
    /// outside the column span.
    pub fn solve(&self, target: &[Fp]) -> Result<Option<Vec<Fp>>> {
        if target.len() != self.rows {
            return Err(Error::Usage(format!(
                "solve: target length {} != rows {}",
                target.len(),
                self.rows
            )));
        }
        let mut aug = FpMatrix::zero(self.p, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, target[r]);
        }
        let (ech, pivots) = aug.echelon();
        if pivots.last() == Some(&self.cols) {
            return Ok(None); // pivot in the augmented column
        }
        let mut x = vec![Fp::zero(self.p); self.cols];
        for (prow, pcol) in pivots.iter().enumerate() {
            x[*pcol] = ech.get(prow, self.cols);
        }
        Ok(Some(x))
    }

    /// Horizontal concatenation of column vectors into a matrix.
    pub fn from_cols(p: u32, rows: usize, cols: &[Vec<Fp>]) -> FpMatrix {
        let mut m = FpMatrix::zero(p, rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rank() {
        let m = FpMatrix::identity(2, 2);
        let (rank, kernel) = m.rank_kernel();
        assert_eq!(rank, 2);
        assert!(kernel.is_empty());
    }

    #[test]
    fn one_one_matrix_kernel() {
        // [1 1] over F_2: rank 1, kernel spanned by (1, 1)
        let m = FpMatrix::from_rows(2, vec![vec![Fp::one(2), Fp::one(2)]]);
        let (rank, kernel) = m.rank_kernel();
        assert_eq!(rank, 1);
        assert_eq!(kernel, vec![vec![Fp::one(2), Fp::one(2)]]);
    }

    #[test]
    fn solve_identity_and_zero() {
        let id = FpMatrix::identity(3, 2);
        let e1 = vec![Fp::one(3), Fp::zero(3)];
        assert_eq!(id.solve(&e1).unwrap(), Some(e1.clone()));
        let z = FpMatrix::zero(3, 2, 2);
        assert_eq!(z.solve(&e1).unwrap(), None);
        assert!(id.solve(&vec![Fp::one(3)]).is_err());
    }

    #[test]
    fn solve_underdetermined_verified() {
        // m = [1 1] over F_2, target (1): oracle enumerates F_2^2 and finds
        // solutions (1,0) and (0,1); whatever solve returns must be one.
        let m = FpMatrix::from_rows(2, vec![vec![Fp::one(2), Fp::one(2)]]);
        let t = vec![Fp::one(2)];
        let mut oracle = Vec::new();
        for a in 0..2i64 {
            for b in 0..2i64 {
                let x = vec![Fp::new(a, 2), Fp::new(b, 2)];
                if m.mul_vec(&x) == t {
                    oracle.push(x);
                }
            }
        }
        assert_eq!(oracle.len(), 2);
        let got = m.solve(&t).unwrap().unwrap();
        assert!(oracle.contains(&got));
        assert_eq!(m.mul_vec(&got), t);
    }

    #[test]
    fn random_rank_nullity_two_elimination_orders() {
        // 20 x 30 over F_3: rank + kernel = 30, and eliminating the
        // column-reversed matrix gives the same rank
        let mut rng = crate::rng::SplitMix64::new(20260808);
        let (rows, cols) = (20usize, 30usize);
        let mut m = FpMatrix::zero(3, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, Fp::new(rng.below(3) as i64, 3));
            }
        }
        let (rank, kernel) = m.rank_kernel();
        assert_eq!(rank + kernel.len(), cols);
        let mut rev = FpMatrix::zero(3, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                rev.set(r, cols - 1 - c, m.get(r, c));
            }
        }
        assert_eq!(rev.rank(), rank);
        // solvability agrees with the augmented-rank criterion
        let t: Vec<Fp> = (0..rows).map(|_| Fp::new(rng.below(3) as i64, 3)).collect();
        let mut aug = FpMatrix::zero(3, rows, cols + 1);
        for r in 0..rows {
            for c in 0..cols {
                aug.set(r, c, m.get(r, c));
            }
            aug.set(r, cols, t[r]);
        }
        let solvable = m.solve(&t).unwrap().is_some();
        assert_eq!(solvable, aug.rank() == rank);
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let m = FpMatrix::from_rows(
            5,
            vec![
                vec![Fp::new(1, 5), Fp::new(2, 5), Fp::new(3, 5)],
                vec![Fp::new(2, 5), Fp::new(4, 5), Fp::new(1, 5)],
            ],
        );
        let (rank, kernel) = m.rank_kernel();
        assert_eq!(rank + kernel.len(), 3);
        for v in &kernel {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }
}
