use std::fmt;

use rand::Rng;

use super::{Field, LaError, Scalar, Subspace};

/// Dense row-major matrix over a single field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn scalar(field: Field, n: usize, s: &Scalar) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, s.clone());
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Matrix, LaError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(LaError::Ragged);
            }
            for x in row {
                if x.field() != field {
                    return Err(LaError::MixedField);
                }
                data.push(x);
            }
        }
        Ok(Matrix { field, rows: r, cols: c, data })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Matrix {
        let v = rows.iter().map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect();
        Matrix::from_rows(field, v).expect("rectangular input")
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { field, rows, cols, data }
    }

    /// Column vector from entries.
    pub fn column(field: Field, v: &[Scalar]) -> Matrix {
        Matrix::from_fn(field, v.len(), 1, |i, _| v[i].clone())
    }

    /// Row vector from entries.
    pub fn row_vector(field: Field, v: &[Scalar]) -> Matrix {
        Matrix::from_fn(field, 1, v.len(), |_, j| v[j].clone())
    }

    pub fn random(field: Field, rows: usize, cols: usize, rng: &mut impl Rng, bound: i64) -> Matrix {
        Matrix::from_fn(field, rows, cols, |_, _| field.from_i64(rng.gen_range(-bound..=bound)))
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
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        debug_assert_eq!(v.field(), self.field);
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    fn same_field(&self, o: &Matrix) -> Result<(), LaError> {
        if self.field != o.field {
            Err(LaError::MixedField)
        } else {
            Ok(())
        }
    }

    pub fn try_mul(&self, o: &Matrix) -> Result<Matrix, LaError> {
        self.same_field(o)?;
        if self.cols != o.rows {
            return Err(LaError::Dimension { op: "mul", left: self.shape(), right: o.shape() });
        }
        let mut out = Matrix::zeros(self.field, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, o: &Matrix) -> Result<Matrix, LaError> {
        self.same_field(o)?;
        if self.shape() != o.shape() {
            return Err(LaError::Dimension { op: "add", left: self.shape(), right: o.shape() });
        }
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect();
        Ok(Matrix { field: self.field, rows: self.rows, cols: self.cols, data })
    }

    /// Panicking product for internal use where shapes are known to agree.
    pub fn mul(&self, o: &Matrix) -> Matrix {
        self.try_mul(o).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        self.try_add(o).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Matrix {
        self.map(Scalar::neg)
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        self.map(|x| x.mul(s))
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Matrix {
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Commutator `self * o - o * self`.
    pub fn bracket(&self, o: &Matrix) -> Matrix {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn submatrix(&self, r0: usize, nr: usize, c0: usize, nc: usize) -> Matrix {
        Matrix::from_fn(self.field, nr, nc, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Copy `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn hstack(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.rows, o.rows, "hstack row mismatch");
        Matrix::from_fn(self.field, self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                o.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Matrix { field: self.field, rows: self.rows + o.rows, cols: self.cols, data }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, o: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.field, self.rows + o.rows, self.cols + o.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, o);
        m
    }

    /// Kronecker product.
    pub fn kron(&self, o: &Matrix) -> Matrix {
        Matrix::from_fn(self.field, self.rows * o.rows, self.cols * o.cols, |i, j| {
            self.get(i / o.rows, j / o.cols).mul(o.get(i % o.rows, j % o.cols))
        })
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let rv = m.get(r, j);
                    if rv.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).sub(&f.mul(rv));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Right kernel `{x : self * x = 0}`.
    pub fn kernel(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(self.field, free.len(), self.cols);
        for (k, &f) in free.iter().enumerate() {
            basis.set(k, f, self.field.one());
            for (i, &pc) in pivots.iter().enumerate() {
                basis.set(k, pc, r.get(i, f).neg());
            }
        }
        Subspace::from_rows(self.cols, &basis)
    }

    /// Column space.
    pub fn image(&self) -> Subspace {
        Subspace::from_rows(self.rows, &self.transpose())
    }

    /// Row space.
    pub fn row_space(&self) -> Subspace {
        Subspace::from_rows(self.cols, self)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        solve(self, &Matrix::identity(self.field, n)).ok().flatten().filter(|_| self.rank() == n)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Flatten row-major into a vector.
    pub fn to_vec(&self) -> Vec<Scalar> {
        self.data.clone()
    }

    pub fn from_vec(field: Field, rows: usize, cols: usize, v: Vec<Scalar>) -> Matrix {
        assert_eq!(v.len(), rows * cols);
        Matrix { field, rows, cols, data: v }
    }

    /// Text form used by the JSON formats: rows of canonical scalar strings.
    pub fn to_text_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(Scalar::to_text).collect()).collect()
    }

    pub fn from_text_rows(field: Field, rows: &[Vec<String>], shape: Option<(usize, usize)>) -> Result<Matrix, LaError> {
        let parsed: Result<Vec<Vec<Scalar>>, LaError> =
            rows.iter().map(|r| r.iter().map(|s| field.parse(s)).collect()).collect();
        let mut m = Matrix::from_rows(field, parsed?)?;
        if let Some((r, c)) = shape {
            if m.rows == 0 && r > 0 && c == 0 {
                m = Matrix::zeros(field, r, 0);
            }
            if m.rows == 0 && r == 0 {
                m = Matrix::zeros(field, 0, c);
            }
            if m.shape() != (r, c) {
                return Err(LaError::Dimension { op: "parse", left: m.shape(), right: (r, c) });
            }
        }
        Ok(m)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(Scalar::to_text).collect();
            write!(f, "{}", r.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Solve `a * x = b`; the returned solution sets every free variable to zero.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Option<Matrix>, LaError> {
    a.same_field(b)?;
    if a.rows != b.rows {
        return Err(LaError::Dimension { op: "solve", left: a.shape(), right: b.shape() });
    }
    let (r, pivots) = a.hstack(b).rref();
    if pivots.iter().any(|&p| p >= a.cols) {
        return Ok(None);
    }
    let mut x = Matrix::zeros(a.field, a.cols, b.cols);
    for (i, &pc) in pivots.iter().enumerate() {
        for j in 0..b.cols {
            x.set(pc, j, r.get(i, a.cols + j).clone());
        }
    }
    Ok(Some(x))
}

/// RREF together with canonical kernel and column-space bases.
pub fn rref_kernel_image(m: &Matrix) -> (Matrix, Subspace, Subspace) {
    let (r, _) = m.rref();
    let kernel = m.kernel();
    let image = m.image();
    debug_assert_eq!(kernel.dim() + image.dim(), m.cols());
    (r, kernel, image)
}
