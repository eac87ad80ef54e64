//! Ext¹ in the model: cocycles `φ_t: M -> N` homogeneous of degree `d_t`,
//! modulo coboundaries `(X^N_t h - h X^M_t)_t` for degree-0 maps `h`.
//! A class is stored with its cocycle and its reduction against the RREF
//! basis of the coboundaries, which is unique per class.

mod sequence;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactla::{Field, Matrix, Scalar, Subspace};
use crate::repcat::{direct_sum_with_maps, hom_space, InternalHom, MapSpace, RepMorphism, WeightedRep};

pub use sequence::{baer_sum_seq, pullback_seq, pushforward_seq, BaerSum, ExtensionSeq, Pullback, Pushout};

/// Cocycle coordinates and coboundaries for a fixed pair `(M, N)`.
#[derive(Debug)]
pub struct ExtSpace {
    pub of: WeightedRep,
    pub by: WeightedRep,
    coords: Vec<MapSpace>,
    offsets: Vec<usize>,
    total: usize,
    coboundaries: Subspace,
    complement: Vec<usize>,
}

impl ExtSpace {
    pub fn new(of: &WeightedRep, by: &WeightedRep) -> Result<Arc<ExtSpace>> {
        of.same_sig(by)?;
        let sig = of.sig();
        let field = of.field();
        let coords: Vec<MapSpace> = (0..sig.len()).map(|t| MapSpace::new(of, by, sig.degree(t))).collect();
        let mut offsets = Vec::new();
        let mut total = 0;
        for c in &coords {
            offsets.push(total);
            total += c.dim();
        }
        let h = MapSpace::new(of, by, 0);
        let mut rows = Vec::with_capacity(h.dim());
        for u in 0..h.dim() {
            let m = h.unit(u);
            let mut v = Vec::with_capacity(total);
            for (t, c) in coords.iter().enumerate() {
                v.extend(c.to_vec(&by.op(t).mul(&m).sub(&m.mul(of.op(t)))));
            }
            rows.push(v);
        }
        let coboundaries = Subspace::from_vectors(field, total, &rows);
        let complement = coboundaries.complement_coordinates();
        Ok(Arc::new(ExtSpace { of: of.clone(), by: by.clone(), coords, offsets, total, coboundaries, complement }))
    }

    pub fn field(&self) -> Field {
        self.of.field()
    }

    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    pub fn cocycle_dim(&self) -> usize {
        self.total
    }

    pub fn coboundaries(&self) -> &Subspace {
        &self.coboundaries
    }

    fn vectorize(&self, cocycle: &[Matrix]) -> Vec<Scalar> {
        let mut v = Vec::with_capacity(self.total);
        for (c, m) in self.coords.iter().zip(cocycle) {
            v.extend(c.to_vec(m));
        }
        v
    }

    fn unvectorize(&self, v: &[Scalar]) -> Vec<Matrix> {
        self.coords.iter().zip(&self.offsets).map(|(c, &o)| c.to_matrix(&v[o..o + c.dim()])).collect()
    }

    /// Class of a cocycle; checks shapes and homogeneity.
    pub fn class(self: &Arc<Self>, cocycle: Vec<Matrix>) -> Result<ExtClass> {
        let sig = self.of.sig();
        if cocycle.len() != sig.len() {
            return Err(Error::Endpoint(format!("{} cocycle matrices for {} generators", cocycle.len(), sig.len())));
        }
        for (t, m) in cocycle.iter().enumerate() {
            crate::repcat::check_degree(&self.of, &self.by, m, sig.degree(t))
                .map_err(|_| Error::Inhomogeneous { generator: sig.generators[t].name.clone(), row: 0, col: 0 })?;
        }
        let reduced = self.coboundaries.reduce(&self.vectorize(&cocycle));
        Ok(ExtClass { space: self.clone(), cocycle, reduced })
    }

    pub fn zero(self: &Arc<Self>) -> ExtClass {
        let f = self.field();
        let cocycle = self.coords.iter().map(|c| Matrix::zeros(f, c.rows, c.cols)).collect();
        ExtClass { space: self.clone(), cocycle, reduced: vec![f.zero(); self.total] }
    }

    /// Class with the given coordinates on the canonical complement basis.
    pub fn from_coords(self: &Arc<Self>, c: &[Scalar]) -> ExtClass {
        assert_eq!(c.len(), self.dim(), "coordinate count");
        let f = self.field();
        let mut v = vec![f.zero(); self.total];
        for (&k, x) in self.complement.iter().zip(c) {
            v[k] = x.clone();
        }
        ExtClass { space: self.clone(), cocycle: self.unvectorize(&v), reduced: v }
    }

    pub fn basis(self: &Arc<Self>) -> Vec<ExtClass> {
        let f = self.field();
        (0..self.dim())
            .map(|i| {
                let c: Vec<Scalar> = (0..self.dim()).map(|j| if i == j { f.one() } else { f.zero() }).collect();
                self.from_coords(&c)
            })
            .collect()
    }

    /// Every class, for prime fields with a small group.
    pub fn all_classes(self: &Arc<Self>) -> Vec<ExtClass> {
        let els = self.field().elements();
        let mut out = vec![vec![]];
        for _ in 0..self.dim() {
            out = out.into_iter().flat_map(|c: Vec<Scalar>| els.iter().map(move |e| [c.clone(), vec![e.clone()]].concat())).collect();
        }
        out.iter().map(|c| self.from_coords(c)).collect()
    }
}

/// An element of Ext¹(of, by).
#[derive(Clone)]
pub struct ExtClass {
    space: Arc<ExtSpace>,
    cocycle: Vec<Matrix>,
    reduced: Vec<Scalar>,
}

impl PartialEq for ExtClass {
    fn eq(&self, o: &Self) -> bool {
        self.space.of == o.space.of && self.space.by == o.space.by && self.reduced == o.reduced
    }
}

impl Eq for ExtClass {}

impl fmt::Debug for ExtClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coords().iter().map(Scalar::to_text).collect();
        write!(f, "ExtClass({} by {}; [{}])", self.space.of, self.space.by, c.join(", "))
    }
}

impl ExtClass {
    pub fn new(of: &WeightedRep, by: &WeightedRep, cocycle: Vec<Matrix>) -> Result<ExtClass> {
        ExtSpace::new(of, by)?.class(cocycle)
    }

    pub fn space(&self) -> &Arc<ExtSpace> {
        &self.space
    }
    pub fn of(&self) -> &WeightedRep {
        &self.space.of
    }
    pub fn by(&self) -> &WeightedRep {
        &self.space.by
    }
    pub fn cocycle(&self) -> &[Matrix] {
        &self.cocycle
    }
    pub fn reduced(&self) -> &[Scalar] {
        &self.reduced
    }
    pub fn field(&self) -> Field {
        self.space.field()
    }

    /// Coordinates on the canonical complement basis.
    pub fn coords(&self) -> Vec<Scalar> {
        self.space.complement.iter().map(|&k| self.reduced[k].clone()).collect()
    }

    /// The canonical reduced cocycle.
    pub fn reduced_cocycle(&self) -> Vec<Matrix> {
        self.space.unvectorize(&self.reduced)
    }

    pub fn is_split(&self) -> bool {
        self.reduced.iter().all(Scalar::is_zero)
    }

    fn same_endpoints(&self, o: &ExtClass) -> Result<()> {
        if self.of() != o.of() || self.by() != o.by() {
            return Err(Error::Endpoint("classes live in different Ext groups".into()));
        }
        Ok(())
    }

    /// Baer sum.
    pub fn add(&self, o: &ExtClass) -> Result<ExtClass> {
        self.same_endpoints(o)?;
        let cocycle = self.cocycle.iter().zip(&o.cocycle).map(|(a, b)| a.add(b)).collect();
        let reduced = self.reduced.iter().zip(&o.reduced).map(|(a, b)| a.add(b)).collect();
        Ok(ExtClass { space: self.space.clone(), cocycle, reduced })
    }

    pub fn scale(&self, s: &Scalar) -> ExtClass {
        ExtClass {
            space: self.space.clone(),
            cocycle: self.cocycle.iter().map(|m| m.scale(s)).collect(),
            reduced: self.reduced.iter().map(|x| x.mul(s)).collect(),
        }
    }

    pub fn neg(&self) -> ExtClass {
        self.scale(&self.field().from_i64(-1))
    }

    pub fn sub(&self, o: &ExtClass) -> Result<ExtClass> {
        self.add(&o.neg())
    }
}

pub fn ext1_space(m: &WeightedRep, n: &WeightedRep) -> Result<(usize, Vec<ExtClass>)> {
    let s = ExtSpace::new(m, n)?;
    Ok((s.dim(), s.basis()))
}

pub fn baer_sum(e1: &ExtClass, e2: &ExtClass) -> Result<ExtClass> {
    e1.add(e2)
}

/// Pushforward along `f: by -> N'`.
pub fn pushforward(e: &ExtClass, f: &RepMorphism) -> Result<ExtClass> {
    if &f.source != e.by() {
        return Err(Error::Endpoint("pushforward map does not start at the sub object".into()));
    }
    ExtClass::new(e.of(), &f.target, e.cocycle.iter().map(|p| f.matrix.mul(p)).collect())
}

/// Pullback along `g: M' -> of`.
pub fn pullback(e: &ExtClass, g: &RepMorphism) -> Result<ExtClass> {
    if &g.target != e.of() {
        return Err(Error::Endpoint("pullback map does not end at the quotient object".into()));
    }
    ExtClass::new(&g.source, e.by(), e.cocycle.iter().map(|p| p.mul(&g.matrix)).collect())
}

/// Middle object on `by ⊕ of` with operators `[[X^by, φ], [0, X^of]]`.
pub fn realize(e: &ExtClass) -> ExtensionSeq {
    let (sum, inj, proj) = direct_sum_with_maps(&[e.by().clone(), e.of().clone()]).expect("same signature");
    let ops: Vec<Matrix> =
        (0..sum.sig().len()).map(|t| sum.op(t).add(&inj[0].matrix.mul(&e.cocycle[t]).mul(&proj[1].matrix))).collect();
    let mid = sum.with_ops(ops).expect("homogeneous cocycle");
    let incl = RepMorphism::new_unchecked(e.by().clone(), mid.clone(), inj[0].matrix.clone());
    let pr = RepMorphism::new_unchecked(mid.clone(), e.of().clone(), proj[1].matrix.clone());
    ExtensionSeq { sub: e.by().clone(), mid, quot: e.of().clone(), incl, proj: pr }
}

/// Degree-0 linear section of an epimorphism, chosen degree by degree.
pub fn graded_section(p: &RepMorphism) -> Result<Matrix> {
    let (src, dst) = (&p.source, &p.target);
    let mut s = Matrix::zeros(src.field(), src.dim(), dst.dim());
    for (&d, &n) in dst.support() {
        let block = p.matrix.submatrix(dst.offset(d), n, src.offset(d), src.dim_at(d));
        let x = crate::exactla::solve(&block, &Matrix::identity(src.field(), n))?
            .ok_or_else(|| Error::NotExact("projection is not surjective".into()))?;
        s.set_block(src.offset(d), dst.offset(d), &x);
    }
    Ok(s)
}

pub fn class_of(s: &ExtensionSeq) -> Result<ExtClass> {
    s.validate()?;
    let sec = graded_section(&s.proj)?;
    let mut cocycle = Vec::new();
    for t in 0..s.mid.sig().len() {
        let d = s.mid.op(t).mul(&sec).sub(&sec.mul(s.quot.op(t)));
        let phi = crate::exactla::solve(&s.incl.matrix, &d)?.ok_or_else(|| Error::NotExact("defect leaves the sub object".into()))?;
        cocycle.push(phi);
    }
    ExtClass::new(&s.quot, &s.sub, cocycle)
}

/// The class in Ext¹(𝟙, Hom(of, by)) corresponding to `e`.
pub fn transfer_unit(e: &ExtClass) -> Result<ExtClass> {
    let ih = InternalHom::new(e.of(), e.by())?;
    let one = WeightedRep::unit(e.of().sig().clone());
    let f = e.field();
    let cocycle = e.cocycle.iter().map(|phi| Matrix::column(f, &ih.vectorize(phi))).collect();
    ExtClass::new(&one, &ih.obj, cocycle)
}

/// Inverse of [`transfer_unit`] for the pair `(of, by)`.
pub fn transfer_back(t: &ExtClass, of: &WeightedRep, by: &WeightedRep) -> Result<ExtClass> {
    let ih = InternalHom::new(of, by)?;
    if t.by() != &ih.obj || t.of().dim() != 1 || t.of().support().get(&0) != Some(&1) {
        return Err(Error::Endpoint("class is not an extension of the unit by the internal Hom".into()));
    }
    let cocycle = t.cocycle.iter().map(|c| ih.matrix_of(&c.col(0))).collect();
    ExtClass::new(of, by, cocycle)
}

/// Image of `Hom(A2, A1) -> Ext¹(A3, A1)`, `h ↦ h_* n`, for `n ∈ Ext¹(A3, A2)`,
/// as a subspace of coordinates on the canonical basis of Ext¹(A3, A1).
pub fn connecting_image(n: &ExtClass, a1: &WeightedRep) -> Result<Subspace> {
    let target = ExtSpace::new(n.of(), a1)?;
    let hom = hom_space(n.by(), a1)?;
    let mut rows = Vec::new();
    for h in hom.basis() {
        let f = RepMorphism::new_unchecked(n.by().clone(), a1.clone(), h);
        rows.push(pushforward(n, &f)?.coords());
    }
    Ok(Subspace::from_vectors(n.field(), target.dim(), &rows))
}

/// Ext² vanishes in the model; the witness of vanishing for a composable
/// pair is an actual blended extension.
pub fn yoneda_obstruction(l: &ExtClass, n: &ExtClass) -> Result<crate::blended::Blend> {
    crate::blended::make_blend(&realize(l), &realize(n))
}
