use super::{Field, LaError, Matrix, Scalar};

/// A subspace of `field^ambient`, stored as the RREF of a spanning set.
/// Equal subspaces have identical basis matrices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn from_rows(ambient: usize, rows: &Matrix) -> Subspace {
        assert_eq!(rows.cols(), ambient, "spanning vectors have wrong length");
        let (r, pivots) = rows.rref();
        let basis = r.submatrix(0, pivots.len(), 0, ambient);
        Subspace { ambient, basis, pivots }
    }

    pub fn from_vectors(field: Field, ambient: usize, vs: &[Vec<Scalar>]) -> Subspace {
        let m = Matrix::from_fn(field, vs.len(), ambient, |i, j| vs[i][j].clone());
        Subspace::from_rows(ambient, &m)
    }

    pub fn zero(field: Field, ambient: usize) -> Subspace {
        Subspace { ambient, basis: Matrix::zeros(field, 0, ambient), pivots: vec![] }
    }

    pub fn full(field: Field, ambient: usize) -> Subspace {
        Subspace::from_rows(ambient, &Matrix::identity(field, ambient))
    }

    pub fn field(&self) -> Field {
        self.basis.field()
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Scalar>> {
        (0..self.dim()).map(|i| self.basis.row(i).to_vec()).collect()
    }

    fn compatible(&self, o: &Subspace) -> Result<(), LaError> {
        if self.field() != o.field() {
            return Err(LaError::MixedField);
        }
        if self.ambient != o.ambient {
            return Err(LaError::Ambient(self.ambient, o.ambient));
        }
        Ok(())
    }

    /// Subtract basis multiples so the pivot coordinates vanish. Two vectors
    /// reduce to the same result iff they differ by an element of `self`.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut v = v.to_vec();
        for (i, &pc) in self.pivots.iter().enumerate() {
            let c = v[pc].clone();
            if c.is_zero() {
                continue;
            }
            for (j, b) in self.basis.row(i).iter().enumerate() {
                if !b.is_zero() {
                    v[j] = v[j].sub(&c.mul(b));
                }
            }
        }
        v
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    /// Coordinates of a member in terms of the basis rows.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        if !self.contains_vector(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn combination(&self, coeffs: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(coeffs.len(), self.dim());
        let f = self.field();
        let mut out = vec![f.zero(); self.ambient];
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, b) in self.basis.row(i).iter().enumerate() {
                out[j] = out[j].add(&c.mul(b));
            }
        }
        out
    }

    pub fn sum(&self, o: &Subspace) -> Result<Subspace, LaError> {
        self.compatible(o)?;
        Ok(Subspace::from_rows(self.ambient, &self.basis.vstack(&o.basis)))
    }

    /// `{x : <x, s> = 0 for all s}` for the standard bilinear form.
    pub fn annihilator(&self) -> Subspace {
        self.basis.kernel()
    }

    pub fn intersection(&self, o: &Subspace) -> Result<Subspace, LaError> {
        self.compatible(o)?;
        Ok(self.annihilator().sum(&o.annihilator())?.annihilator())
    }

    /// True iff `o` is contained in `self`.
    pub fn contains(&self, o: &Subspace) -> Result<bool, LaError> {
        self.compatible(o)?;
        Ok((0..o.dim()).all(|i| self.contains_vector(o.basis.row(i))))
    }

    /// Unit vectors on the non-pivot coordinates: a canonical complement.
    pub fn complement_coordinates(&self) -> Vec<usize> {
        (0..self.ambient).filter(|c| !self.pivots.contains(c)).collect()
    }
}

/// Sum, intersection and containment (`v ⊆ u`) in one call.
pub fn subspace_ops(u: &Subspace, v: &Subspace) -> Result<(Subspace, Subspace, bool), LaError> {
    Ok((u.sum(v)?, u.intersection(v)?, u.contains(v)?))
}
