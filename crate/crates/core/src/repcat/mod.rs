//! The model category: finite-dimensional Z-graded vector spaces carrying one
//! operator per generator of a free graded Lie algebra, each operator
//! homogeneous of its generator's (strictly negative) degree.
//!
//! Total-space bases are ordered by ascending degree, then by index within a
//! degree. The weight filtration is `W_n = span of degrees <= n`.

mod maps;
mod ops;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{Field, Matrix, Scalar};

pub use maps::{LinearSystem, MapSpace, Term};
pub use ops::*;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSignature {
    pub field: Field,
    pub generators: Vec<Generator>,
}

impl ModelSignature {
    pub fn new(field: Field, generators: Vec<(&str, i64)>) -> Result<Arc<ModelSignature>> {
        let s = ModelSignature {
            field,
            generators: generators.into_iter().map(|(n, d)| Generator { name: n.to_string(), degree: d }).collect(),
        };
        s.validate()?;
        Ok(Arc::new(s))
    }

    pub fn validate(&self) -> Result<()> {
        self.field.check()?;
        let mut seen = std::collections::BTreeSet::new();
        for g in &self.generators {
            if g.degree >= 0 {
                return Err(Error::Signature(format!("generator {} has degree {} >= 0", g.name, g.degree)));
            }
            if g.name.is_empty() || !seen.insert(g.name.clone()) {
                return Err(Error::Signature(format!("duplicate or empty generator name {:?}", g.name)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn degree(&self, t: usize) -> i64 {
        self.generators[t].degree
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct RepData {
    sig: Arc<ModelSignature>,
    support: BTreeMap<i64, usize>,
    ops: Vec<Matrix>,
}

/// An object of the model category. Cheap to clone.
#[derive(Clone, Debug, Eq)]
pub struct WeightedRep(Arc<RepData>);

impl PartialEq for WeightedRep {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || self.0 == o.0
    }
}

impl std::hash::Hash for WeightedRep {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.0.hash(h);
    }
}

impl WeightedRep {
    /// Build and validate. Zero-dimensional support entries are dropped.
    pub fn new(sig: Arc<ModelSignature>, support: BTreeMap<i64, usize>, ops: Vec<Matrix>) -> Result<WeightedRep> {
        let x = WeightedRep::new_unchecked(sig, support, ops);
        x.validate()?;
        Ok(x)
    }

    pub fn new_unchecked(sig: Arc<ModelSignature>, mut support: BTreeMap<i64, usize>, ops: Vec<Matrix>) -> WeightedRep {
        support.retain(|_, d| *d > 0);
        WeightedRep(Arc::new(RepData { sig, support, ops }))
    }

    /// Object with the given support and operators assembled from blocks
    /// `(generator index, source degree, block)`.
    pub fn from_blocks(sig: Arc<ModelSignature>, support: BTreeMap<i64, usize>, blocks: &[(usize, i64, Matrix)]) -> Result<WeightedRep> {
        let shell = WeightedRep::zero_ops(sig.clone(), support);
        let n = shell.dim();
        let mut ops: Vec<Matrix> = (0..sig.len()).map(|_| Matrix::zeros(sig.field, n, n)).collect();
        for (t, from, b) in blocks {
            let to = from + sig.degree(*t);
            if b.shape() != (shell.dim_at(to), shell.dim_at(*from)) {
                return Err(Error::Object(format!("block for generator {} from degree {from} has shape {:?}", sig.generators[*t].name, b.shape())));
            }
            ops[*t].set_block(shell.offset(to), shell.offset(*from), b);
        }
        WeightedRep::new(sig, shell.0.support.clone(), ops)
    }

    /// Object with the given support and all operators zero (semisimple).
    pub fn zero_ops(sig: Arc<ModelSignature>, support: BTreeMap<i64, usize>) -> WeightedRep {
        let n: usize = support.values().sum();
        let ops = (0..sig.len()).map(|_| Matrix::zeros(sig.field, n, n)).collect();
        WeightedRep::new_unchecked(sig, support, ops)
    }

    pub fn pure(sig: Arc<ModelSignature>, degree: i64, dim: usize) -> WeightedRep {
        WeightedRep::zero_ops(sig, BTreeMap::from([(degree, dim)]))
    }

    /// The unit object: one dimension in degree 0.
    pub fn unit(sig: Arc<ModelSignature>) -> WeightedRep {
        WeightedRep::pure(sig, 0, 1)
    }

    pub fn zero(sig: Arc<ModelSignature>) -> WeightedRep {
        WeightedRep::zero_ops(sig, BTreeMap::new())
    }

    pub fn validate(&self) -> Result<()> {
        let sig = &self.0.sig;
        sig.validate()?;
        if self.0.ops.len() != sig.len() {
            return Err(Error::Object(format!("{} operators for {} generators", self.0.ops.len(), sig.len())));
        }
        let n = self.dim();
        let degs = self.basis_degrees();
        for (t, op) in self.0.ops.iter().enumerate() {
            if op.shape() != (n, n) {
                return Err(Error::Object(format!("operator {} has shape {:?}, expected {:?}", sig.generators[t].name, op.shape(), (n, n))));
            }
            if op.field() != sig.field {
                return Err(Error::Linear(crate::exactla::LaError::MixedField));
            }
            let d = sig.degree(t);
            for i in 0..n {
                for j in 0..n {
                    if !op.get(i, j).is_zero() && degs[i] != degs[j] + d {
                        return Err(Error::Inhomogeneous { generator: sig.generators[t].name.clone(), row: i, col: j });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn sig(&self) -> &Arc<ModelSignature> {
        &self.0.sig
    }
    pub fn field(&self) -> Field {
        self.0.sig.field
    }
    pub fn support(&self) -> &BTreeMap<i64, usize> {
        &self.0.support
    }
    pub fn ops(&self) -> &[Matrix] {
        &self.0.ops
    }
    pub fn op(&self, t: usize) -> &Matrix {
        &self.0.ops[t]
    }

    pub fn dim(&self) -> usize {
        self.0.support.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn dim_at(&self, deg: i64) -> usize {
        self.0.support.get(&deg).copied().unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.0.support.keys().copied().collect()
    }

    /// Index of the first basis vector of degree `deg` (or where it would be).
    pub fn offset(&self, deg: i64) -> usize {
        self.0.support.range(..deg).map(|(_, d)| d).sum()
    }

    /// Degree of each total-space basis vector.
    pub fn basis_degrees(&self) -> Vec<i64> {
        self.0.support.iter().flat_map(|(&d, &n)| std::iter::repeat_n(d, n)).collect()
    }

    pub fn is_pure(&self) -> bool {
        self.0.support.len() <= 1
    }

    /// Degree of a pure nonzero object.
    pub fn weight(&self) -> Option<i64> {
        if self.0.support.len() == 1 {
            self.0.support.keys().next().copied()
        } else {
            None
        }
    }

    /// The block of `X_t` from degree `from` to degree `from + d_t`.
    pub fn block(&self, t: usize, from: i64) -> Matrix {
        let to = from + self.0.sig.degree(t);
        self.0.ops[t].submatrix(self.offset(to), self.dim_at(to), self.offset(from), self.dim_at(from))
    }

    pub fn same_sig(&self, o: &WeightedRep) -> Result<()> {
        if self.0.sig == o.0.sig {
            Ok(())
        } else {
            Err(Error::SignatureMismatch)
        }
    }

    /// Same object with the operators replaced.
    pub fn with_ops(&self, ops: Vec<Matrix>) -> Result<WeightedRep> {
        WeightedRep::new(self.0.sig.clone(), self.0.support.clone(), ops)
    }

    /// Shift all degrees by `s` (a Tate-style twist in the model).
    pub fn shift(&self, s: i64) -> WeightedRep {
        let support = self.0.support.iter().map(|(d, n)| (d + s, *n)).collect();
        WeightedRep::new_unchecked(self.0.sig.clone(), support, self.0.ops.clone())
    }

    /// Projection of a total-space vector onto its degree-`deg` component,
    /// returned in that component's coordinates.
    pub fn component(&self, v: &[Scalar], deg: i64) -> Vec<Scalar> {
        let o = self.offset(deg);
        v[o..o + self.dim_at(deg)].to_vec()
    }
}

impl fmt::Display for WeightedRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.support.iter().map(|(d, n)| format!("{d}:{n}")).collect();
        write!(f, "Rep{{{}}}", s.join(", "))
    }
}

/// A degree-0 linear map intertwining all generator operators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RepMorphism {
    pub source: WeightedRep,
    pub target: WeightedRep,
    pub matrix: Matrix,
}

impl RepMorphism {
    pub fn new(source: WeightedRep, target: WeightedRep, matrix: Matrix) -> Result<RepMorphism> {
        let f = RepMorphism { source, target, matrix };
        f.validate()?;
        Ok(f)
    }

    pub fn new_unchecked(source: WeightedRep, target: WeightedRep, matrix: Matrix) -> RepMorphism {
        RepMorphism { source, target, matrix }
    }

    pub fn identity(x: &WeightedRep) -> RepMorphism {
        RepMorphism::new_unchecked(x.clone(), x.clone(), Matrix::identity(x.field(), x.dim()))
    }

    pub fn zero(source: &WeightedRep, target: &WeightedRep) -> RepMorphism {
        RepMorphism::new_unchecked(source.clone(), target.clone(), Matrix::zeros(source.field(), target.dim(), source.dim()))
    }

    pub fn validate(&self) -> Result<()> {
        self.source.same_sig(&self.target)?;
        if self.matrix.shape() != (self.target.dim(), self.source.dim()) {
            return Err(Error::NotMorphism(format!("matrix shape {:?}, expected {:?}", self.matrix.shape(), (self.target.dim(), self.source.dim()))));
        }
        check_degree_zero(&self.source, &self.target, &self.matrix)?;
        for t in 0..self.source.sig().len() {
            if self.matrix.mul(self.source.op(t)) != self.target.op(t).mul(&self.matrix) {
                return Err(Error::NotMorphism(format!("does not intertwine generator {}", self.source.sig().generators[t].name)));
            }
        }
        Ok(())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &RepMorphism) -> RepMorphism {
        assert_eq!(self.target.dim(), other.source.dim(), "composition shape mismatch");
        RepMorphism::new_unchecked(self.source.clone(), other.target.clone(), other.matrix.mul(&self.matrix))
    }

    pub fn is_mono(&self) -> bool {
        self.matrix.rank() == self.source.dim()
    }

    pub fn is_epi(&self) -> bool {
        self.matrix.rank() == self.target.dim()
    }

    pub fn is_iso(&self) -> bool {
        self.source.dim() == self.target.dim() && self.is_mono()
    }

    pub fn inverse(&self) -> Result<RepMorphism> {
        let inv = self.matrix.inverse().ok_or_else(|| Error::NotMorphism("not invertible".into()))?;
        Ok(RepMorphism::new_unchecked(self.target.clone(), self.source.clone(), inv))
    }

    pub fn add(&self, o: &RepMorphism) -> RepMorphism {
        RepMorphism::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.add(&o.matrix))
    }

    pub fn scale(&self, s: &Scalar) -> RepMorphism {
        RepMorphism::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.scale(s))
    }
}

/// Error unless `m` maps each degree of `src` into the same degree of `dst`.
pub fn check_degree_zero(src: &WeightedRep, dst: &WeightedRep, m: &Matrix) -> Result<()> {
    check_degree(src, dst, m, 0)
}

pub fn check_degree(src: &WeightedRep, dst: &WeightedRep, m: &Matrix, d: i64) -> Result<()> {
    let sd = src.basis_degrees();
    let td = dst.basis_degrees();
    if m.shape() != (td.len(), sd.len()) {
        return Err(Error::NotMorphism(format!("shape {:?}, expected {:?}", m.shape(), (td.len(), sd.len()))));
    }
    for i in 0..td.len() {
        for j in 0..sd.len() {
            if !m.get(i, j).is_zero() && td[i] != sd[j] + d {
                return Err(Error::NotMorphism(format!("entry ({i},{j}) is not homogeneous of degree {d}")));
            }
        }
    }
    Ok(())
}
