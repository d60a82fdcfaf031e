use super::arith::{inv_mod, mul_mod, sub_mod};

/// Dense row-major matrix of residues in `[0, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZqMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ZqMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.data[i * size + i] = 1;
        }
        m
    }

    /// Build from row-major data. Panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<u64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[u64]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    /// Append one row at the bottom.
    pub fn stack_row(&self, row: &[u64]) -> Self {
        assert_eq!(row.len(), self.cols, "row width mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(row);
        Self {
            rows: self.rows + 1,
            cols: self.cols,
            data,
        }
    }
}

/// Rank over the field Z_q by Gaussian elimination. `q` must be prime and all
/// entries must already be reduced.
pub fn rank_mod_q(m: &ZqMatrix, q: u64) -> usize {
    let mut a = m.data.clone();
    let (rows, cols) = (m.rows, m.cols);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for j in 0..cols {
                a.swap(pivot * cols + j, rank * cols + j);
            }
        }
        let inv = inv_mod(a[rank * cols + col], q);
        for j in col..cols {
            a[rank * cols + j] = mul_mod(a[rank * cols + j], inv, q);
        }
        for r in (rank + 1)..rows {
            let f = a[r * cols + col];
            if f == 0 {
                continue;
            }
            for j in col..cols {
                let sub = mul_mod(f, a[rank * cols + j], q);
                a[r * cols + j] = sub_mod(a[r * cols + j], sub, q);
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_identity() {
        assert_eq!(rank_mod_q(&ZqMatrix::identity(3), 7), 3);
    }

    #[test]
    fn rank_zero() {
        assert_eq!(rank_mod_q(&ZqMatrix::zeros(4, 2), 5), 0);
    }

    #[test]
    fn rank_dependent_rows() {
        let m = ZqMatrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(rank_mod_q(&m, 5), 1);
    }

    #[test]
    fn rank_depends_on_modulus() {
        // det = 1*4 - 2*3 = -2, vanishes only mod 2
        let m = ZqMatrix::from_rows(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(rank_mod_q(&m, 5), 2);
        let m2 = ZqMatrix::from_rows(&[vec![1, 0], vec![1, 0]]);
        assert_eq!(rank_mod_q(&m2, 2), 1);
    }

    #[test]
    fn transpose_and_stack() {
        let m = ZqMatrix::from_rows(&[vec![1, 2, 3], vec![4, 5, 6]]);
        let t = m.transpose();
        assert_eq!(t.row(2), &[3, 6]);
        let s = m.stack_row(&[0, 0, 1]);
        assert_eq!(s.rows(), 3);
        assert_eq!(s.row(2), &[0, 0, 1]);
        assert_eq!(rank_mod_q(&s, 7), 3);
    }
}
