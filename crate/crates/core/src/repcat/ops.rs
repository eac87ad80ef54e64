use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use crate::error::{Error, Result};
use crate::exactla::{Field, Matrix, Scalar, Subspace};

use super::maps::{LinearSystem, MapSpace, Term};
use super::{RepMorphism, WeightedRep};

/// Subquotient on the degrees in `(lo, hi]`, i.e. `W_hi x / W_lo x`.
pub fn slice(x: &WeightedRep, lo: i64, hi: i64) -> WeightedRep {
    let support: BTreeMap<i64, usize> = x.support().iter().filter(|(&d, _)| d > lo && d <= hi).map(|(&d, &n)| (d, n)).collect();
    let start = x.offset(lo + 1);
    let len: usize = support.values().sum();
    let ops = x.ops().iter().map(|op| op.submatrix(start, len, start, len)).collect();
    WeightedRep::new_unchecked(x.sig().clone(), support, ops)
}

/// Coordinate embedding of a degree window `(lo, hi]` of `x`: a `dim x × dim s` matrix.
fn window_embedding(x: &WeightedRep, lo: i64, hi: i64) -> Matrix {
    let s = slice(x, lo, hi);
    let mut m = Matrix::zeros(x.field(), x.dim(), s.dim());
    m.set_block(x.offset(lo + 1), 0, &Matrix::identity(x.field(), s.dim()));
    m
}

/// `W_n x`, its inclusion into `x`, and `Gr_n x`.
pub fn weight_parts(x: &WeightedRep, n: i64) -> (WeightedRep, RepMorphism, WeightedRep) {
    let w = slice(x, i64::MIN, n);
    let incl = RepMorphism::new_unchecked(w.clone(), x.clone(), window_embedding(x, i64::MIN, n));
    let gr = WeightedRep::pure(x.sig().clone(), n, x.dim_at(n));
    (w, incl, gr)
}

/// The standard inclusion of the window `(lo, mid]` into `(lo, hi]`.
pub fn window_inclusion(x: &WeightedRep, lo: i64, mid: i64, hi: i64) -> RepMorphism {
    let big = slice(x, lo, hi);
    let small = slice(x, lo, mid);
    RepMorphism::new_unchecked(small.clone(), big.clone(), window_embedding(&big, lo, mid))
}

/// The standard projection of the window `(lo, hi]` onto `(mid, hi]`.
pub fn window_projection(x: &WeightedRep, lo: i64, mid: i64, hi: i64) -> RepMorphism {
    let big = slice(x, lo, hi);
    let small = slice(x, mid, hi);
    RepMorphism::new_unchecked(big.clone(), small.clone(), window_embedding(&big, mid, hi).transpose())
}

/// The graded vector space of `x` with all operators set to zero.
pub fn gr(x: &WeightedRep) -> WeightedRep {
    WeightedRep::zero_ops(x.sig().clone(), x.support().clone())
}

/// All morphisms `m -> n`, as a subspace of degree-0 map coordinates.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub space: MapSpace,
    pub sub: Subspace,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.sub.dim()
    }

    pub fn basis(&self) -> Vec<Matrix> {
        self.sub.basis_vectors().iter().map(|v| self.space.to_matrix(v)).collect()
    }

    pub fn element(&self, coeffs: &[Scalar]) -> Matrix {
        self.space.to_matrix(&self.sub.combination(coeffs))
    }
}

/// Intertwiner equations `X^n_t h - h X^m_t = 0` for every generator.
pub fn add_intertwining(sys: &mut LinearSystem, k: usize, m: &WeightedRep, n: &WeightedRep) {
    for t in 0..m.sig().len() {
        sys.add(&[Term::new(k).left(n.op(t)), Term::new(k).right(m.op(t)).neg()], None);
    }
}

pub fn hom_space(m: &WeightedRep, n: &WeightedRep) -> Result<HomSpace> {
    m.same_sig(n)?;
    let space = MapSpace::new(m, n, 0);
    let mut sys = LinearSystem::new(m.field(), vec![space.clone()]);
    add_intertwining(&mut sys, 0, m, n);
    Ok(HomSpace { space, sub: sys.kernel() })
}

/// The internal Hom object together with the identification of its total
/// space with all linear maps `m -> n`.
#[derive(Clone, Debug)]
pub struct InternalHom {
    pub obj: WeightedRep,
    pub source: WeightedRep,
    pub target: WeightedRep,
    /// (degree d, source degree p, row offset, rows, column offset, cols)
    blocks: Vec<(i64, i64, usize, usize, usize, usize)>,
}

impl InternalHom {
    pub fn new(m: &WeightedRep, n: &WeightedRep) -> Result<InternalHom> {
        m.same_sig(n)?;
        let mut blocks = Vec::new();
        for (&p, &dm) in m.support() {
            for (&q, &dn) in n.support() {
                blocks.push((q - p, p, n.offset(q), dn, m.offset(p), dm));
            }
        }
        blocks.sort_by_key(|b| (b.0, b.1));
        let mut support = BTreeMap::new();
        for b in &blocks {
            *support.entry(b.0).or_insert(0) += b.3 * b.5;
        }
        let shell = InternalHom { obj: WeightedRep::zero_ops(m.sig().clone(), support.clone()), source: m.clone(), target: n.clone(), blocks };
        let dim = shell.obj.dim();
        let ops = (0..m.sig().len())
            .map(|t| {
                let mut op = Matrix::zeros(m.field(), dim, dim);
                for j in 0..dim {
                    let f = shell.matrix_of(&unit(m.field(), dim, j));
                    let g = n.op(t).mul(&f).sub(&f.mul(m.op(t)));
                    for (i, x) in shell.vectorize(&g).into_iter().enumerate() {
                        op.set(i, j, x);
                    }
                }
                op
            })
            .collect();
        let obj = WeightedRep::new(m.sig().clone(), support, ops)?;
        Ok(InternalHom { obj, ..shell })
    }

    /// Coordinates of a linear map `m -> n` (any degree mix) in the internal Hom.
    pub fn vectorize(&self, f: &Matrix) -> Vec<Scalar> {
        let mut v = Vec::with_capacity(self.obj.dim());
        for &(_, _, r0, nr, c0, nc) in &self.blocks {
            for i in 0..nr {
                for j in 0..nc {
                    v.push(f.get(r0 + i, c0 + j).clone());
                }
            }
        }
        v
    }

    pub fn matrix_of(&self, v: &[Scalar]) -> Matrix {
        let mut f = Matrix::zeros(self.obj.field(), self.target.dim(), self.source.dim());
        let mut k = 0;
        for &(_, _, r0, nr, c0, nc) in &self.blocks {
            for i in 0..nr {
                for j in 0..nc {
                    f.set(r0 + i, c0 + j, v[k].clone());
                    k += 1;
                }
            }
        }
        f
    }
}

fn unit(field: Field, n: usize, j: usize) -> Vec<Scalar> {
    let mut v = vec![field.zero(); n];
    v[j] = field.one();
    v
}

pub fn internal_hom(m: &WeightedRep, n: &WeightedRep) -> Result<WeightedRep> {
    Ok(InternalHom::new(m, n)?.obj)
}

/// Direct sum with its injections and projections. Within each degree the
/// summands appear in the given order.
pub fn direct_sum_with_maps(parts: &[WeightedRep]) -> Result<(WeightedRep, Vec<RepMorphism>, Vec<RepMorphism>)> {
    let sig = match parts.first() {
        Some(p) => p.sig().clone(),
        None => return Err(Error::Precondition("direct sum of no objects".into())),
    };
    for p in parts {
        parts[0].same_sig(p)?;
    }
    let mut support = BTreeMap::new();
    for p in parts {
        for (&d, &n) in p.support() {
            *support.entry(d).or_insert(0) += n;
        }
    }
    let shell = WeightedRep::zero_ops(sig.clone(), support.clone());
    let f = sig.field;
    let total = shell.dim();
    // position of each summand's basis vectors in the sum
    let mut emb = Vec::new();
    let mut used: BTreeMap<i64, usize> = BTreeMap::new();
    for p in parts {
        let mut e = Matrix::zeros(f, total, p.dim());
        for (j, d) in p.basis_degrees().into_iter().enumerate() {
            let k = used.entry(d).or_insert(0);
            e.set(shell.offset(d) + *k, j, f.one());
            *k += 1;
        }
        emb.push(e);
    }
    let mut ops = Vec::new();
    for t in 0..sig.len() {
        let mut op = Matrix::zeros(f, total, total);
        for (p, e) in parts.iter().zip(&emb) {
            op = op.add(&e.mul(p.op(t)).mul(&e.transpose()));
        }
        ops.push(op);
    }
    let obj = WeightedRep::new(sig, support, ops)?;
    let inj = parts.iter().zip(&emb).map(|(p, e)| RepMorphism::new_unchecked(p.clone(), obj.clone(), e.clone())).collect();
    let proj = parts.iter().zip(&emb).map(|(p, e)| RepMorphism::new_unchecked(obj.clone(), p.clone(), e.transpose())).collect();
    Ok((obj, inj, proj))
}

pub fn direct_sum(parts: &[WeightedRep]) -> Result<WeightedRep> {
    Ok(direct_sum_with_maps(parts)?.0)
}

/// Tensor product with the Leibniz action.
pub fn tensor(m: &WeightedRep, n: &WeightedRep) -> Result<WeightedRep> {
    m.same_sig(n)?;
    let mut pairs: Vec<(i64, i64, usize, usize)> = Vec::new();
    let md = m.basis_degrees();
    let nd = n.basis_degrees();
    for (a, &p) in md.iter().enumerate() {
        for (b, &q) in nd.iter().enumerate() {
            pairs.push((p + q, p, a, b));
        }
    }
    pairs.sort();
    let mut support = BTreeMap::new();
    let mut index = HashMap::new();
    for (k, &(s, _, a, b)) in pairs.iter().enumerate() {
        *support.entry(s).or_insert(0) += 1;
        index.insert((a, b), k);
    }
    let f = m.field();
    let dim = pairs.len();
    let ops = (0..m.sig().len())
        .map(|t| {
            let mut op = Matrix::zeros(f, dim, dim);
            for (k, &(_, _, a, b)) in pairs.iter().enumerate() {
                for i in 0..m.dim() {
                    let c = m.op(t).get(i, a);
                    if !c.is_zero() {
                        let r = index[&(i, b)];
                        op.set(r, k, op.get(r, k).add(c));
                    }
                }
                for j in 0..n.dim() {
                    let c = n.op(t).get(j, b);
                    if !c.is_zero() {
                        let r = index[&(a, j)];
                        op.set(r, k, op.get(r, k).add(c));
                    }
                }
            }
            op
        })
        .collect();
    WeightedRep::new(m.sig().clone(), support, ops)
}

/// Dual object: degrees negated, operators `-X_t^T`.
pub fn dual(m: &WeightedRep) -> WeightedRep {
    let support: BTreeMap<i64, usize> = m.support().iter().map(|(&d, &n)| (-d, n)).collect();
    let shell = WeightedRep::zero_ops(m.sig().clone(), support.clone());
    // dual basis vector of m-index a sits at shell.offset(-p) + (a - m.offset(p))
    let pos: Vec<usize> = m
        .basis_degrees()
        .iter()
        .enumerate()
        .map(|(a, &p)| shell.offset(-p) + (a - m.offset(p)))
        .collect();
    let n = m.dim();
    let f = m.field();
    let ops = m
        .ops()
        .iter()
        .map(|x| {
            let mut op = Matrix::zeros(f, n, n);
            for a in 0..n {
                for b in 0..n {
                    let c = x.get(b, a);
                    if !c.is_zero() {
                        op.set(pos[a], pos[b], c.neg());
                    }
                }
            }
            op
        })
        .collect();
    WeightedRep::new_unchecked(m.sig().clone(), support, ops)
}

/// Subobject spanned by an operator-stable graded family of column vectors
/// (columns sorted by degree, each homogeneous).
fn sub_from_columns(x: &WeightedRep, cols: &Matrix, degrees: &[i64]) -> Result<(WeightedRep, RepMorphism)> {
    let mut support = BTreeMap::new();
    for &d in degrees {
        *support.entry(d).or_insert(0) += 1;
    }
    let mut ops = Vec::new();
    for t in 0..x.sig().len() {
        let img = x.op(t).mul(cols);
        let y = crate::exactla::solve(cols, &img)?.ok_or_else(|| Error::Object("subspace is not operator-stable".into()))?;
        ops.push(y);
    }
    let sub = WeightedRep::new(x.sig().clone(), support, ops)?;
    let incl = RepMorphism::new_unchecked(sub.clone(), x.clone(), cols.clone());
    Ok((sub, incl))
}

/// Per-degree subspaces assembled into a subobject.
pub fn subobject_from_parts(x: &WeightedRep, parts: &BTreeMap<i64, Subspace>) -> Result<(WeightedRep, RepMorphism)> {
    let f = x.field();
    let mut columns: Vec<Vec<Scalar>> = Vec::new();
    let mut degrees = Vec::new();
    for (&d, s) in parts {
        for v in s.basis_vectors() {
            let mut full = vec![f.zero(); x.dim()];
            for (i, c) in v.into_iter().enumerate() {
                full[x.offset(d) + i] = c;
            }
            columns.push(full);
            degrees.push(d);
        }
    }
    let cols = Matrix::from_fn(f, x.dim(), columns.len(), |i, j| columns[j][i].clone());
    sub_from_columns(x, &cols, &degrees)
}

/// Smallest subobject containing the given total-space vectors.
pub fn subobject_generated(x: &WeightedRep, vectors: &[Vec<Scalar>]) -> Result<(WeightedRep, RepMorphism)> {
    let f = x.field();
    let mut parts: BTreeMap<i64, Subspace> = x.support().iter().map(|(&d, &n)| (d, Subspace::zero(f, n))).collect();
    let mut queue: Vec<(i64, Vec<Scalar>)> = Vec::new();
    for v in vectors {
        if v.len() != x.dim() {
            return Err(Error::Object(format!("vector of length {} in object of dimension {}", v.len(), x.dim())));
        }
        for &d in x.support().keys() {
            let c = x.component(v, d);
            if c.iter().any(|s| !s.is_zero()) {
                queue.push((d, c));
            }
        }
    }
    while let Some((d, c)) = queue.pop() {
        let s = &parts[&d];
        if s.contains_vector(&c) {
            continue;
        }
        let grown = Subspace::from_vectors(f, c.len(), &[s.basis_vectors(), vec![c.clone()]].concat());
        parts.insert(d, grown);
        let mut full = vec![f.zero(); x.dim()];
        for (i, s) in c.iter().enumerate() {
            full[x.offset(d) + i] = s.clone();
        }
        for t in 0..x.sig().len() {
            let img = x.op(t).mul(&Matrix::column(f, &full)).col(0);
            let e = d + x.sig().degree(t);
            if x.dim_at(e) > 0 {
                let ce = x.component(&img, e);
                if ce.iter().any(|s| !s.is_zero()) {
                    queue.push((e, ce));
                }
            }
        }
    }
    subobject_from_parts(x, &parts)
}

/// Kernel of a morphism with its inclusion.
pub fn kernel(f: &RepMorphism) -> Result<(WeightedRep, RepMorphism)> {
    let x = &f.source;
    let mut parts = BTreeMap::new();
    for (&d, &n) in x.support() {
        let block = f.matrix.submatrix(f.target.offset(d), f.target.dim_at(d), x.offset(d), n);
        parts.insert(d, block.kernel());
    }
    subobject_from_parts(x, &parts)
}

/// Cokernel of a morphism: the quotient object, the projection, and a
/// degree-0 linear section of the projection (not a morphism in general).
pub struct Cokernel {
    pub obj: WeightedRep,
    pub proj: RepMorphism,
    pub section: Matrix,
}

pub fn cokernel(f: &RepMorphism) -> Result<Cokernel> {
    let y = &f.target;
    let field = y.field();
    let mut support = BTreeMap::new();
    let mut kept: Vec<(i64, usize)> = Vec::new(); // (degree, global index in y)
    let mut images: BTreeMap<i64, Subspace> = BTreeMap::new();
    for (&d, &n) in y.support() {
        let block = f.matrix.submatrix(y.offset(d), n, f.source.offset(d), f.source.dim_at(d));
        let im = block.image();
        let comp = im.complement_coordinates();
        support.insert(d, comp.len());
        kept.extend(comp.iter().map(|&c| (d, y.offset(d) + c)));
        images.insert(d, im);
    }
    let q_dim = kept.len();
    let mut section = Matrix::zeros(field, y.dim(), q_dim);
    for (k, &(_, g)) in kept.iter().enumerate() {
        section.set(g, k, field.one());
    }
    // q(v) = reduction of v against the image, read on the kept coordinates
    let mut q = Matrix::zeros(field, q_dim, y.dim());
    for (k, &(d, g)) in kept.iter().enumerate() {
        let im = &images[&d];
        let local = g - y.offset(d);
        q.set(k, g, field.one());
        for (i, &pc) in im.pivots().iter().enumerate() {
            let b = im.basis().get(i, local);
            if !b.is_zero() {
                q.set(k, y.offset(d) + pc, b.neg());
            }
        }
    }
    let ops = (0..y.sig().len()).map(|t| q.mul(y.op(t)).mul(&section)).collect();
    let obj = WeightedRep::new(y.sig().clone(), support, ops)?;
    let proj = RepMorphism::new_unchecked(y.clone(), obj.clone(), q);
    Ok(Cokernel { obj, proj, section })
}

/// Given an epimorphism `q: Y -> Q` and `g: Y -> Z` vanishing on `ker q`,
/// the unique `h: Q -> Z` with `h q = g`.
pub fn factor_through_epi(q: &RepMorphism, g: &RepMorphism) -> Result<RepMorphism> {
    let h = crate::exactla::solve(&q.matrix.transpose(), &g.matrix.transpose())?
        .ok_or_else(|| Error::NotMorphism("map does not factor through the quotient".into()))?
        .transpose();
    Ok(RepMorphism::new_unchecked(q.target.clone(), g.target.clone(), h))
}

/// Given a monomorphism `i: S -> Y` and `g: Z -> Y` landing in its image,
/// the unique `h: Z -> S` with `i h = g`.
pub fn factor_through_mono(i: &RepMorphism, g: &RepMorphism) -> Result<RepMorphism> {
    let h = crate::exactla::solve(&i.matrix, &g.matrix)?.ok_or_else(|| Error::NotMorphism("map does not factor through the subobject".into()))?;
    Ok(RepMorphism::new_unchecked(g.source.clone(), i.source.clone(), h))
}

/// Outcome of the isomorphism search.
#[derive(Clone, Debug)]
pub struct IsoSearch {
    pub iso: Option<RepMorphism>,
    /// True when a negative answer is certified by an exhaustive sweep.
    pub deterministic: bool,
}

const SWEEP_CAP: u64 = 200_000;

/// Seek an invertible element in a space of candidate maps. Random
/// combinations first (8 tries), then a grid sweep that is exhaustive for the
/// determinant polynomial's degree.
pub fn find_invertible(field: Field, basis: &[Matrix], n: usize, rng: &mut impl Rng) -> (Option<Matrix>, bool) {
    let (c, det) = find_invertible_coeffs(field, basis, n, rng);
    (c.map(|c| combine(field, basis, n, &c)), det)
}

fn combine(field: Field, basis: &[Matrix], n: usize, c: &[Scalar]) -> Matrix {
    let mut m = Matrix::zeros(field, n, n);
    for (b, s) in basis.iter().zip(c) {
        if !s.is_zero() {
            m = m.add(&b.scale(s));
        }
    }
    m
}

/// Same search, returning the coefficients of the invertible combination.
pub fn find_invertible_coeffs(field: Field, basis: &[Matrix], n: usize, rng: &mut impl Rng) -> (Option<Vec<Scalar>>, bool) {
    if n == 0 {
        return (Some(vec![field.zero(); basis.len()]), true);
    }
    if basis.is_empty() {
        return (None, true);
    }
    for _ in 0..8 {
        let c: Vec<Scalar> = basis
            .iter()
            .map(|_| match field {
                Field::Q => field.from_i64(rng.gen_range(-1000..=1000)),
                Field::Fp(p) => field.from_i64(rng.gen_range(0..p as i64)),
            })
            .collect();
        if combine(field, basis, n, &c).is_invertible() {
            return (Some(c), false);
        }
    }
    let per = match field {
        Field::Q => n as u64 + 1,
        Field::Fp(p) => (n as u64 + 1).min(p as u64),
    };
    let h = basis.len() as u32;
    let total = per.checked_pow(h).unwrap_or(u64::MAX);
    let limit = total.min(SWEEP_CAP);
    for idx in 0..limit {
        let mut k = idx;
        let c: Vec<Scalar> = (0..basis.len())
            .map(|_| {
                let v = (k % per) as i64;
                k /= per;
                field.from_i64(v)
            })
            .collect();
        if combine(field, basis, n, &c).is_invertible() {
            return (Some(c), false);
        }
    }
    (None, total <= SWEEP_CAP)
}

pub fn is_isomorphic(m: &WeightedRep, n: &WeightedRep, rng: &mut impl Rng) -> Result<IsoSearch> {
    m.same_sig(n)?;
    if m.support() != n.support() {
        return Ok(IsoSearch { iso: None, deterministic: true });
    }
    if m == n {
        return Ok(IsoSearch { iso: Some(RepMorphism::identity(m)), deterministic: true });
    }
    let h = hom_space(m, n)?;
    let (found, det) = find_invertible(m.field(), &h.basis(), m.dim(), rng);
    Ok(IsoSearch { iso: found.map(|a| RepMorphism::new_unchecked(m.clone(), n.clone(), a)), deterministic: det })
}
