use crate::error::{Error, Result};
use crate::exactla::{solve, Field, Matrix, Scalar, Subspace};

use super::WeightedRep;

/// Coordinates on the homogeneous degree-`degree` linear maps between the
/// total spaces of two objects: one coordinate per entry of every block
/// `src_p -> dst_{p+degree}`, blocks in ascending `p`, entries row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapSpace {
    pub field: Field,
    pub rows: usize,
    pub cols: usize,
    pub degree: i64,
    /// (source degree, row offset, rows, column offset, cols, coordinate offset)
    blocks: Vec<(i64, usize, usize, usize, usize, usize)>,
    dim: usize,
}

impl MapSpace {
    pub fn new(src: &WeightedRep, dst: &WeightedRep, degree: i64) -> MapSpace {
        let mut blocks = Vec::new();
        let mut off = 0;
        for (&p, &m) in src.support() {
            let n = dst.dim_at(p + degree);
            if n == 0 {
                continue;
            }
            blocks.push((p, dst.offset(p + degree), n, src.offset(p), m, off));
            off += n * m;
        }
        MapSpace { field: src.field(), rows: dst.dim(), cols: src.dim(), degree, blocks, dim: off }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// (row, col) of coordinate `u`.
    pub fn position(&self, u: usize) -> (usize, usize) {
        for &(_, r0, nr, c0, nc, o) in &self.blocks {
            if u < o + nr * nc {
                let k = u - o;
                return (r0 + k / nc, c0 + k % nc);
            }
        }
        panic!("coordinate {u} out of range");
    }

    pub fn coord(&self, row: usize, col: usize) -> Option<usize> {
        for &(_, r0, nr, c0, nc, o) in &self.blocks {
            if (r0..r0 + nr).contains(&row) && (c0..c0 + nc).contains(&col) {
                return Some(o + (row - r0) * nc + (col - c0));
            }
        }
        None
    }

    pub fn to_matrix(&self, v: &[Scalar]) -> Matrix {
        assert_eq!(v.len(), self.dim);
        let mut m = Matrix::zeros(self.field, self.rows, self.cols);
        for (u, x) in v.iter().enumerate() {
            if !x.is_zero() {
                let (i, j) = self.position(u);
                m.set(i, j, x.clone());
            }
        }
        m
    }

    /// Coordinates of a homogeneous matrix; entries outside the blocks are
    /// ignored, so callers check homogeneity separately.
    pub fn to_vec(&self, m: &Matrix) -> Vec<Scalar> {
        let mut v = Vec::with_capacity(self.dim);
        for &(_, r0, nr, c0, nc, _) in &self.blocks {
            for i in 0..nr {
                for j in 0..nc {
                    v.push(m.get(r0 + i, c0 + j).clone());
                }
            }
        }
        v
    }

    pub fn unit(&self, u: usize) -> Matrix {
        let mut v = vec![self.field.zero(); self.dim];
        v[u] = self.field.one();
        self.to_matrix(&v)
    }
}

/// One summand `sign * left * X_k * right` of a linear matrix equation.
#[derive(Clone, Debug)]
pub struct Term {
    pub unknown: usize,
    pub left: Option<Matrix>,
    pub right: Option<Matrix>,
    pub negate: bool,
}

impl Term {
    pub fn new(unknown: usize) -> Term {
        Term { unknown, left: None, right: None, negate: false }
    }
    pub fn left(mut self, m: &Matrix) -> Term {
        self.left = Some(m.clone());
        self
    }
    pub fn right(mut self, m: &Matrix) -> Term {
        self.right = Some(m.clone());
        self
    }
    pub fn neg(mut self) -> Term {
        self.negate = !self.negate;
        self
    }
}

/// Linear equations in several homogeneous matrix unknowns.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    field: Field,
    unknowns: Vec<MapSpace>,
    offsets: Vec<usize>,
    total: usize,
    rows: Vec<Vec<Scalar>>,
}

impl LinearSystem {
    pub fn new(field: Field, unknowns: Vec<MapSpace>) -> LinearSystem {
        let mut offsets = Vec::new();
        let mut total = 0;
        for u in &unknowns {
            offsets.push(total);
            total += u.dim();
        }
        LinearSystem { field, unknowns, offsets, total, rows: Vec::new() }
    }

    pub fn unknowns(&self) -> &[MapSpace] {
        &self.unknowns
    }

    pub fn num_unknowns(&self) -> usize {
        self.total
    }

    /// Add the equation `sum(terms) = rhs` (rhs zero when `None`).
    pub fn add(&mut self, terms: &[Term], rhs: Option<&Matrix>) {
        let shape = |t: &Term| {
            let sp = &self.unknowns[t.unknown];
            let r = t.left.as_ref().map_or(sp.rows, Matrix::rows);
            let c = t.right.as_ref().map_or(sp.cols, Matrix::cols);
            (r, c)
        };
        let (nr, nc) = match (terms.first(), rhs) {
            (Some(t), _) => shape(t),
            (None, Some(m)) => m.shape(),
            (None, None) => return,
        };
        for t in terms {
            assert_eq!(shape(t), (nr, nc), "equation terms disagree in shape");
            if let Some(l) = &t.left {
                assert_eq!(l.cols(), self.unknowns[t.unknown].rows, "left factor shape");
            }
            if let Some(r) = &t.right {
                assert_eq!(r.rows(), self.unknowns[t.unknown].cols, "right factor shape");
            }
        }
        let f = self.field;
        let width = self.total + 1;
        let mut eq = vec![vec![f.zero(); width]; nr * nc];
        for t in terms {
            let sp = &self.unknowns[t.unknown];
            let base = self.offsets[t.unknown];
            for u in 0..sp.dim() {
                let (r, c) = sp.position(u);
                let lcol: Vec<(usize, Scalar)> = match &t.left {
                    None => vec![(r, f.one())],
                    Some(l) => (0..l.rows()).filter(|&i| !l.get(i, r).is_zero()).map(|i| (i, l.get(i, r).clone())).collect(),
                };
                let rrow: Vec<(usize, Scalar)> = match &t.right {
                    None => vec![(c, f.one())],
                    Some(m) => (0..m.cols()).filter(|&j| !m.get(c, j).is_zero()).map(|j| (j, m.get(c, j).clone())).collect(),
                };
                for (i, a) in &lcol {
                    for (j, b) in &rrow {
                        let mut v = a.mul(b);
                        if t.negate {
                            v = v.neg();
                        }
                        let cell = &mut eq[i * nc + j][base + u];
                        *cell = cell.add(&v);
                    }
                }
            }
        }
        if let Some(m) = rhs {
            assert_eq!(m.shape(), (nr, nc), "right-hand side shape");
            for i in 0..nr {
                for j in 0..nc {
                    eq[i * nc + j][self.total] = m.get(i, j).clone();
                }
            }
        }
        self.rows.extend(eq.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())));
    }

    /// Require unknown `k` to equal `m`.
    pub fn fix(&mut self, k: usize, m: &Matrix) {
        self.add(&[Term::new(k)], Some(m));
    }

    fn coefficient_matrix(&self) -> (Matrix, Matrix) {
        let n = self.rows.len();
        let a = Matrix::from_fn(self.field, n, self.total, |i, j| self.rows[i][j].clone());
        let b = Matrix::from_fn(self.field, n, 1, |i, _| self.rows[i][self.total].clone());
        (a, b)
    }

    /// Solution space of the homogeneous part.
    pub fn kernel(&self) -> Subspace {
        if self.rows.is_empty() {
            return Subspace::full(self.field, self.total);
        }
        self.coefficient_matrix().0.kernel()
    }

    /// Canonical particular solution (free variables zero), if any.
    pub fn solve(&self) -> Result<Option<Vec<Scalar>>> {
        if self.rows.is_empty() {
            return Ok(Some(vec![self.field.zero(); self.total]));
        }
        let (a, b) = self.coefficient_matrix();
        Ok(solve(&a, &b).map_err(Error::from)?.map(|x| x.col(0)))
    }

    /// Split a solution vector into the unknown matrices.
    pub fn split(&self, v: &[Scalar]) -> Vec<Matrix> {
        self.unknowns
            .iter()
            .zip(&self.offsets)
            .map(|(sp, &o)| sp.to_matrix(&v[o..o + sp.dim()]))
            .collect()
    }
}
