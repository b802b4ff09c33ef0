use std::io::{self, Write};

use faer::sparse::{SparseColMat, Triplet};

/// Coordinate-format sparse matrix. Duplicate entries are summed on
/// conversion.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CooMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl CooMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols);
        self.entries.push((i, j, v));
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
        }
        y
    }

    /// `xᵀ M y`
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, j, v)| x[i] * v * y[j]).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for &(i, j, v) in &self.entries {
            d[i][j] += v;
        }
        d
    }

    pub fn to_csc(&self) -> SparseColMat<usize, f64> {
        let triplets: Vec<Triplet<usize, usize, f64>> = self
            .entries
            .iter()
            .map(|&(i, j, v)| Triplet::new(i, j, v))
            .collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &triplets)
            .expect("indices are in range")
    }

    /// Largest `|M_ij − M_ji|` after summing duplicates.
    pub fn asymmetry(&self) -> f64 {
        let csc = self.to_csc();
        let t = self.transpose().to_csc();
        let mut worst: f64 = 0.0;
        for j in 0..self.ncols {
            let a = csc.as_ref().col_range(j);
            let rows_a = &csc.symbolic().row_idx()[a.clone()];
            let vals_a = &csc.val()[a];
            for (&i, &v) in rows_a.iter().zip(vals_a) {
                let w = t.as_ref().get(i, j).copied().unwrap_or(0.0);
                worst = worst.max((v - w).abs());
            }
        }
        worst
    }

    pub fn transpose(&self) -> Self {
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            entries: self.entries.iter().map(|&(i, j, v)| (j, i, v)).collect(),
        }
    }

    /// Writes summed entries as `i j value` lines, column-major.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> io::Result<()> {
        let csc = self.to_csc();
        writeln!(w, "{} {} {}", self.nrows, self.ncols, csc.compute_nnz())?;
        for j in 0..self.ncols {
            let range = csc.as_ref().col_range(j);
            for (&i, &v) in csc.symbolic().row_idx()[range.clone()]
                .iter()
                .zip(&csc.val()[range])
            {
                writeln!(w, "{} {} {:.16e}", i, j, v)?;
            }
        }
        Ok(())
    }
}

/// `y = A x` for a compressed column matrix.
pub fn csc_mul_vec(a: &SparseColMat<usize, f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.nrows()];
    let col_ptr = a.symbolic().col_ptr();
    let row_idx = a.symbolic().row_idx();
    let val = a.val();
    for j in 0..a.ncols() {
        let xj = x[j];
        for k in col_ptr[j]..col_ptr[j + 1] {
            y[row_idx[k]] += val[k] * xj;
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let mut m = CooMatrix::new(2, 2);
        m.push(0, 0, 1.0);
        m.push(0, 0, 2.0);
        m.push(1, 0, -1.0);
        assert_eq!(m.to_dense(), vec![vec![3.0, 0.0], vec![-1.0, 0.0]]);
        let csc = m.to_csc();
        assert_eq!(csc_mul_vec(&csc, &[1.0, 5.0]), vec![3.0, -1.0]);
        assert_eq!(m.mul_vec(&[1.0, 5.0]), vec![3.0, -1.0]);
        assert_eq!(m.asymmetry(), 1.0);
    }

    #[test]
    fn coordinate_export() {
        let mut m = CooMatrix::new(2, 2);
        m.push(1, 1, 0.5);
        m.push(0, 1, 2.0);
        let mut out = Vec::new();
        m.write_coordinate(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "2 2 2\n0 1 2.0000000000000000e0\n1 1 5.0000000000000000e-1\n"
        );
    }
}
