use std::io::{BufRead, Write};

use super::DenseMatrix;
use crate::{Error, Result};

/// Accumulates `(row, col, value)` entries; duplicates are summed on compression.
#[derive(Clone, Debug, Default)]
pub struct TripletBuilder {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        TripletBuilder { n, entries: Vec::new() }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        self.entries.push((i, j, v));
    }

    /// Adds a dense `rows.len() x cols.len()` block stored row-major.
    pub fn add_block(&mut self, rows: &[usize], cols: &[usize], block: &[f64]) {
        debug_assert_eq!(block.len(), rows.len() * cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                self.push(i, j, block[a * cols.len() + b]);
            }
        }
    }

    /// Compresses to CSR. Contributions to the same entry are summed in
    /// insertion order, so mirrored blocks yield bit-identical transposed entries.
    pub fn build(mut self, symmetric: bool) -> SparseMatrix {
        self.entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; self.n + 1];
        let mut cols: Vec<usize> = Vec::with_capacity(self.entries.len());
        let mut vals: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix { n: self.n, row_ptr, cols, vals, symmetric }
    }
}

/// Square compressed-row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    symmetric: bool,
}

impl SparseMatrix {
    pub fn identity(n: usize) -> Self {
        let mut b = TripletBuilder::new(n);
        (0..n).for_each(|i| b.push(i, i, 1.0));
        b.build(true)
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        assert!(a.is_square());
        let mut b = TripletBuilder::new(a.rows());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if a[(i, j)] != 0.0 {
                    b.push(i, j, a[(i, j)]);
                }
            }
        }
        let symmetric = a.asymmetry() == 0.0;
        b.build(symmetric)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Whether the matrix was assembled to be exactly symmetric.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// Bilinear form `y^T A x`.
    pub fn form(&self, y: &[f64], x: &[f64]) -> f64 {
        (0..self.n).map(|i| y[i] * self.row(i).map(|(j, v)| v * x[j]).sum::<f64>()).sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut b = TripletBuilder::new(self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                b.push(j, i, v);
            }
        }
        b.build(self.symmetric)
    }

    /// `alpha * self + beta * other` over the union of both patterns.
    pub fn add(&self, alpha: f64, other: &SparseMatrix, beta: f64) -> SparseMatrix {
        assert_eq!(self.n, other.n);
        let mut b = TripletBuilder::new(self.n);
        for i in 0..self.n {
            self.row(i).for_each(|(j, v)| b.push(i, j, alpha * v));
            other.row(i).for_each(|(j, v)| b.push(i, j, beta * v));
        }
        b.build(self.symmetric && other.symmetric)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[(i, j)] = v;
            }
        }
        d
    }

    /// `max |A - A^T|` over stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m = m.max((v - self.get(j, i)).abs());
            }
        }
        m
    }

    /// Writes MatrixMarket coordinate format (`real general`, 1-based indices).
    pub fn write_matrix_market(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.n, self.n, self.nnz())?;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
            }
        }
        Ok(())
    }

    /// Reads a square `coordinate real general|symmetric` MatrixMarket file.
    pub fn read_matrix_market(r: impl BufRead) -> Result<SparseMatrix> {
        let bad = |m: &str| Error::param("matrix market", m.to_string());
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad("empty input"))??;
        let lower = header.to_lowercase();
        if !lower.starts_with("%%matrixmarket matrix coordinate real") {
            return Err(bad("expected a coordinate real header"));
        }
        let symmetric = lower.contains("symmetric");
        let mut size = None;
        let mut b = None;
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('%') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match size {
                None => {
                    let n: usize = fields.first().and_then(|f| f.parse().ok()).ok_or_else(|| bad("bad size line"))?;
                    size = Some(n);
                    b = Some(TripletBuilder::new(n));
                }
                Some(n) => {
                    let parse = |k: usize| fields.get(k).ok_or_else(|| bad("short entry line"));
                    let i: usize = parse(0)?.parse().map_err(|_| bad("bad row index"))?;
                    let j: usize = parse(1)?.parse().map_err(|_| bad("bad column index"))?;
                    let v: f64 = parse(2)?.parse().map_err(|_| bad("bad value"))?;
                    if i == 0 || j == 0 || i > n || j > n {
                        return Err(bad("index out of range"));
                    }
                    let b = b.as_mut().unwrap();
                    b.push(i - 1, j - 1, v);
                    if symmetric && i != j {
                        b.push(j - 1, i - 1, v);
                    }
                }
            }
        }
        let b = b.ok_or_else(|| bad("missing size line"))?;
        let m = b.build(false);
        let sym = m.max_asymmetry() == 0.0;
        Ok(SparseMatrix { symmetric: sym, ..m })
    }
}
