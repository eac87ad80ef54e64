//! Generalized extensions of a graded frame `A = A_1 ⊕ … ⊕ A_k`.
//!
//! A generalized extension of level ℓ is a staircase of objects `X_{m,n}`
//! (`0 ≤ m < n ≤ k`, `n - m ≤ ℓ + 1`) with `X_{r-1,r} = A_r`, injective
//! vertical arrows `X_{m,n-1} -> X_{m,n}` and surjective horizontal arrows
//! `X_{m,n} -> X_{m+1,n}`. Entries are `(m, n)` pairs; frame pieces are
//! indexed from 1.
//!
//! Two representations are kept: the diagram ([`GenExt`]) is authoritative,
//! while [`BlockForm`] records operator blocks `A_j -> A_i` in the canonical
//! coordinates given by the graded isomorphisms of the diagram.

mod fiber;
mod morph;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactla::{Field, Matrix};
use crate::extmod::ExtensionSeq;
use crate::repcat::{gr, slice, ModelSignature, RepMorphism, WeightedRep};

pub use fiber::{act_on_group, Fiber};
pub use morph::{
    aut_family_space, equiv, gamma_stabilizer, glue_lowest, is_morphism, spread_morphism, transport, transport_entries,
    transport_formula_check, EquivMode, FamilySpace, GammaStabilizer, GenMorphism, Glued,
};

pub type Entry = (usize, usize);

/// Ordered pure pieces of strictly increasing weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    parts: Vec<WeightedRep>,
}

impl Frame {
    pub fn new(parts: Vec<WeightedRep>) -> Result<Arc<Frame>> {
        if parts.len() < 2 {
            return Err(Error::Precondition("a frame needs at least two pieces".into()));
        }
        for (i, a) in parts.iter().enumerate() {
            a.same_sig(&parts[0])?;
            if a.is_zero() || a.weight().is_none() {
                return Err(Error::Precondition(format!("frame piece {} is not a nonzero pure object", i + 1)));
            }
            if i > 0 && a.weight() <= parts[i - 1].weight() {
                return Err(Error::Precondition("frame weights must increase strictly".into()));
            }
        }
        Ok(Arc::new(Frame { parts }))
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[WeightedRep] {
        &self.parts
    }

    /// `A_r`, for `1 ≤ r ≤ k`.
    pub fn part(&self, r: usize) -> &WeightedRep {
        &self.parts[r - 1]
    }

    pub fn weight(&self, r: usize) -> i64 {
        self.part(r).weight().expect("pure")
    }

    pub fn dim(&self, r: usize) -> usize {
        self.part(r).dim()
    }

    pub fn sig(&self) -> &Arc<ModelSignature> {
        self.parts[0].sig()
    }

    pub fn field(&self) -> Field {
        self.parts[0].field()
    }

    /// Offset of `A_r` inside `A_{m+1} ⊕ … ⊕ A_n`.
    pub fn offset_in(&self, m: usize, r: usize) -> usize {
        (m + 1..r).map(|s| self.dim(s)).sum()
    }

    /// `A_{m+1} ⊕ … ⊕ A_n` with zero operators.
    pub fn span(&self, m: usize, n: usize) -> WeightedRep {
        let support = (m + 1..=n).map(|r| (self.weight(r), self.dim(r))).collect();
        WeightedRep::zero_ops(self.sig().clone(), support)
    }

    /// The frame `A_{i+1}, …, A_j`.
    pub fn crop(&self, i: usize, j: usize) -> Result<Arc<Frame>> {
        if i + 1 >= j || j > self.k() {
            return Err(Error::Precondition(format!("crop range ({i},{j}) is invalid for k = {}", self.k())));
        }
        Frame::new(self.parts[i..j].to_vec())
    }

    /// Pairs `(i, j)` with `1 ≤ j - i ≤ level`.
    pub fn block_pairs(&self, level: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for d in 1..=level {
            for i in 1..=self.k().saturating_sub(d) {
                out.push((i, i + d));
            }
        }
        out
    }
}

/// Eligible entries of a level-`level` diagram, ordered by diagonal then row.
pub fn entries(k: usize, level: usize) -> Vec<Entry> {
    let mut out = Vec::new();
    for d in 1..=(level + 1).min(k) {
        for m in 0..=k - d {
            out.push((m, m + d));
        }
    }
    out
}

fn check_level(k: usize, level: usize) -> Result<()> {
    if level == 0 || level >= k {
        return Err(Error::Precondition(format!("level {level} is outside 1..={}", k - 1)));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenExt {
    frame: Arc<Frame>,
    level: usize,
    objects: BTreeMap<Entry, WeightedRep>,
    /// Keyed by target: `X_{m,n-1} -> X_{m,n}`.
    vert: BTreeMap<Entry, RepMorphism>,
    /// Keyed by source: `X_{m,n} -> X_{m+1,n}`.
    horiz: BTreeMap<Entry, RepMorphism>,
}

impl GenExt {
    pub fn new(
        frame: Arc<Frame>,
        level: usize,
        objects: BTreeMap<Entry, WeightedRep>,
        vert: BTreeMap<Entry, RepMorphism>,
        horiz: BTreeMap<Entry, RepMorphism>,
    ) -> Result<GenExt> {
        let g = GenExt { frame, level, objects, vert, horiz };
        g.validate()?;
        Ok(g)
    }

    pub(crate) fn new_unchecked(
        frame: Arc<Frame>,
        level: usize,
        objects: BTreeMap<Entry, WeightedRep>,
        vert: BTreeMap<Entry, RepMorphism>,
        horiz: BTreeMap<Entry, RepMorphism>,
    ) -> GenExt {
        GenExt { frame, level, objects, vert, horiz }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn k(&self) -> usize {
        self.frame.k()
    }

    pub fn entries(&self) -> Vec<Entry> {
        entries(self.k(), self.level)
    }

    pub fn objects(&self) -> &BTreeMap<Entry, WeightedRep> {
        &self.objects
    }

    pub fn verticals(&self) -> &BTreeMap<Entry, RepMorphism> {
        &self.vert
    }

    pub fn horizontals(&self) -> &BTreeMap<Entry, RepMorphism> {
        &self.horiz
    }

    pub fn obj(&self, m: usize, n: usize) -> &WeightedRep {
        &self.objects[&(m, n)]
    }

    /// `X_{m,n-1} -> X_{m,n}`.
    pub fn v(&self, m: usize, n: usize) -> &RepMorphism {
        &self.vert[&(m, n)]
    }

    /// `X_{m,n} -> X_{m+1,n}`.
    pub fn h(&self, m: usize, n: usize) -> &RepMorphism {
        &self.horiz[&(m, n)]
    }

    /// Composite of verticals `X_{m,a} -> X_{m,b}`.
    pub fn down(&self, m: usize, a: usize, b: usize) -> RepMorphism {
        let mut f = RepMorphism::identity(self.obj(m, a));
        for n in a + 1..=b {
            f = f.then(self.v(m, n));
        }
        f
    }

    /// Composite of horizontals `X_{a,n} -> X_{b,n}`.
    pub fn right(&self, n: usize, a: usize, b: usize) -> RepMorphism {
        let mut f = RepMorphism::identity(self.obj(a, n));
        for m in a..b {
            f = f.then(self.h(m, n));
        }
        f
    }

    /// `0 -> X_{m,n-1} -> X_{m,n} -> A_n -> 0`.
    pub fn vext(&self, m: usize, n: usize) -> ExtensionSeq {
        ExtensionSeq {
            sub: self.obj(m, n - 1).clone(),
            mid: self.obj(m, n).clone(),
            quot: self.frame.part(n).clone(),
            incl: self.v(m, n).clone(),
            proj: self.right(n, m, n - 1),
        }
    }

    /// `0 -> A_{m+1} -> X_{m,n} -> X_{m+1,n} -> 0`.
    pub fn hext(&self, m: usize, n: usize) -> ExtensionSeq {
        ExtensionSeq {
            sub: self.frame.part(m + 1).clone(),
            mid: self.obj(m, n).clone(),
            quot: self.obj(m + 1, n).clone(),
            incl: self.down(m, m + 1, n),
            proj: self.h(m, n).clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        check_level(k, self.level)?;
        let want = self.entries();
        let err = |e: Entry, msg: String| Error::GenExt(format!("entry ({},{}): {msg}", e.0, e.1));
        for e in &want {
            let x = self.objects.get(e).ok_or_else(|| err(*e, "missing object".into()))?;
            x.same_sig(self.frame.part(1))?;
            if e.1 - e.0 == 1 && x != self.frame.part(e.1) {
                return Err(err(*e, format!("must be A_{}", e.1)));
            }
        }
        let arrow_keys: Vec<Entry> = want.iter().copied().filter(|e| e.1 - e.0 >= 2).collect();
        if self.objects.len() != want.len() || self.vert.len() != arrow_keys.len() || self.horiz.len() != arrow_keys.len() {
            return Err(Error::GenExt("entries or arrows outside the eligible range".into()));
        }
        for &(m, n) in &arrow_keys {
            let v = self.vert.get(&(m, n)).ok_or_else(|| err((m, n), "missing vertical arrow".into()))?;
            let h = self.horiz.get(&(m, n)).ok_or_else(|| err((m, n), "missing horizontal arrow".into()))?;
            if &v.source != self.obj(m, n - 1) || &v.target != self.obj(m, n) {
                return Err(err((m, n), "vertical arrow has the wrong endpoints".into()));
            }
            if &h.source != self.obj(m, n) || &h.target != self.obj(m + 1, n) {
                return Err(err((m, n), "horizontal arrow has the wrong endpoints".into()));
            }
            v.validate().map_err(|e| err((m, n), format!("vertical arrow: {e}")))?;
            h.validate().map_err(|e| err((m, n), format!("horizontal arrow: {e}")))?;
            if !v.is_mono() {
                return Err(err((m, n), "vertical arrow is not injective".into()));
            }
            if !h.is_epi() {
                return Err(err((m, n), "horizontal arrow is not surjective".into()));
            }
        }
        for &(m, n) in &arrow_keys {
            if n - m >= 3 && self.h(m, n - 1).then(self.v(m + 1, n)).matrix != self.v(m, n).then(self.h(m, n)).matrix {
                return Err(err((m, n), "square does not commute".into()));
            }
        }
        for &(m, n) in &arrow_keys {
            self.vext(m, n).validate().map_err(|e| err((m, n), format!("vertical sequence: {e}")))?;
        }
        for &(m, n) in &arrow_keys {
            self.hext(m, n).validate().map_err(|e| err((m, n), format!("horizontal sequence: {e}")))?;
        }
        Ok(())
    }

    /// Canonical coordinates `X_{m,n} -> A_{m+1} ⊕ … ⊕ A_n`, built from the
    /// graded pieces `X_{m,r} / X_{m,r-1} ≅ A_r`.
    pub fn gr_iso(&self, m: usize, n: usize) -> Result<RepMorphism> {
        let x = self.obj(m, n);
        let span = self.frame.span(m, n);
        let mut c = Matrix::zeros(self.frame.field(), x.dim(), x.dim());
        for r in m + 1..=n {
            let (d, p) = (self.frame.dim(r), self.frame.weight(r));
            let xs = self.obj(m, r);
            let v = self.down(m, r, n).matrix.submatrix(x.offset(p), d, xs.offset(p), d);
            let h = self.right(r, m, r - 1).matrix.submatrix(0, d, xs.offset(p), d);
            let vi = v.inverse().ok_or_else(|| Error::GenExt(format!("entry ({m},{n}): graded piece {r} is degenerate")))?;
            c.set_block(self.frame.offset_in(m, r), x.offset(p), &h.mul(&vi));
        }
        Ok(RepMorphism::new_unchecked(x.clone(), span, c))
    }

    /// The diagram with its lowest diagonal erased.
    pub fn truncate(&self) -> Result<GenExt> {
        if self.level < 2 {
            return Err(Error::Precondition("truncation needs level at least 2".into()));
        }
        let keep = |e: &Entry| e.1 - e.0 <= self.level;
        Ok(GenExt {
            frame: self.frame.clone(),
            level: self.level - 1,
            objects: self.objects.iter().filter(|(e, _)| keep(e)).map(|(e, x)| (*e, x.clone())).collect(),
            vert: self.vert.iter().filter(|(e, _)| keep(e)).map(|(e, x)| (*e, x.clone())).collect(),
            horiz: self.horiz.iter().filter(|(e, _)| keep(e)).map(|(e, x)| (*e, x.clone())).collect(),
        })
    }

    /// The part between `A_{i+1}` and `A_j`, reindexed from 0.
    pub fn crop(&self, i: usize, j: usize) -> Result<GenExt> {
        let frame = self.frame.crop(i, j)?;
        let level = self.level.min(j - i - 1);
        let inside = |e: &Entry| e.0 >= i && e.1 <= j;
        let shift = |e: &Entry| (e.0 - i, e.1 - i);
        Ok(GenExt {
            frame,
            level,
            objects: self.objects.iter().filter(|(e, _)| inside(e)).map(|(e, x)| (shift(e), x.clone())).collect(),
            vert: self.vert.iter().filter(|(e, _)| inside(e)).map(|(e, x)| (shift(e), x.clone())).collect(),
            horiz: self.horiz.iter().filter(|(e, _)| inside(e)).map(|(e, x)| (shift(e), x.clone())).collect(),
        })
    }

    /// Insert a lowest diagonal: for each `r`, the object at `(r-1, r+ℓ)`
    /// with its incoming vertical and outgoing horizontal arrow.
    pub(crate) fn extend(&self, rows: Vec<(WeightedRep, RepMorphism, RepMorphism)>) -> Result<GenExt> {
        let level = self.level + 1;
        check_level(self.k(), level)?;
        let mut g = self.clone();
        g.level = level;
        for (idx, (x, v, h)) in rows.into_iter().enumerate() {
            let e = (idx, idx + level + 1);
            g.objects.insert(e, x);
            g.vert.insert(e, v);
            g.horiz.insert(e, h);
        }
        g.validate()?;
        Ok(g)
    }

    /// Twist the arrows at each `A_r`: outgoing `j_r σ_r⁻¹`, incoming `σ_r ω_r`.
    pub fn act_aut_a(&self, sigma: &[Matrix]) -> Result<GenExt> {
        let k = self.k();
        if sigma.len() != k {
            return Err(Error::Precondition(format!("expected {k} automorphisms, got {}", sigma.len())));
        }
        let mut inv = Vec::with_capacity(k);
        for (r, s) in sigma.iter().enumerate() {
            let a = self.frame.part(r + 1);
            if s.shape() != (a.dim(), a.dim()) {
                return Err(Error::Precondition(format!("automorphism of A_{} has the wrong shape", r + 1)));
            }
            inv.push(s.inverse().ok_or_else(|| Error::Precondition(format!("component {} is not invertible", r + 1)))?);
        }
        let mut g = self.clone();
        for r in 1..=k {
            if let Some(v) = g.vert.get_mut(&(r - 1, r + 1)) {
                v.matrix = v.matrix.mul(&inv[r - 1]);
            }
            if r >= 2 {
                if let Some(h) = g.horiz.get_mut(&(r - 2, r)) {
                    h.matrix = sigma[r - 1].mul(&h.matrix);
                }
            }
        }
        Ok(g)
    }

    /// Block form in canonical coordinates, with the isomorphism family from
    /// `self` onto its denormalization (identity on `A`).
    pub fn normalize(&self) -> Result<(BlockForm, GenMorphism)> {
        let mut bf = BlockForm::zero(self.frame.clone(), self.level)?;
        for (i, j) in self.frame.block_pairs(self.level) {
            let c = self.gr_iso(i - 1, j)?;
            let ci = c.matrix.inverse().expect("canonical coordinates are invertible");
            let x = self.obj(i - 1, j);
            let (ro, co) = (self.frame.offset_in(i - 1, i), self.frame.offset_in(i - 1, j));
            let (ri, cj) = (self.frame.dim(i), self.frame.dim(j));
            let blocks = (0..x.sig().len()).map(|t| c.matrix.mul(x.op(t)).mul(&ci).submatrix(ro, ri, co, cj)).collect();
            bf.blocks.insert((i, j), blocks);
        }
        bf.validate()?;
        let target = bf.denormalize()?;
        let mut maps = BTreeMap::new();
        for e in self.entries() {
            let c = self.gr_iso(e.0, e.1)?;
            maps.insert(e, RepMorphism::new_unchecked(self.obj(e.0, e.1).clone(), target.obj(e.0, e.1).clone(), c.matrix));
        }
        Ok((bf, GenMorphism { maps }))
    }

    pub fn block_form(&self) -> Result<BlockForm> {
        Ok(self.normalize()?.0)
    }
}

/// `ext(x, φ)`: the subquotients `W_{p_n} x / W_{p_m} x` with natural
/// arrows, the graded pieces identified with `A` through `phi: Gr x -> A`.
pub fn from_object(frame: &Arc<Frame>, x: &WeightedRep, phi: &RepMorphism) -> Result<GenExt> {
    x.same_sig(frame.part(1))?;
    let k = frame.k();
    let a = frame.span(0, k);
    if phi.source != gr(x) || phi.target != a {
        return Err(Error::Precondition("phi must map Gr x onto the frame".into()));
    }
    phi.validate()?;
    if !phi.is_iso() {
        return Err(Error::Precondition("phi is not an isomorphism".into()));
    }
    let cut = |m: usize| if m == 0 { frame.weight(1) - 1 } else { frame.weight(m) };
    let level = k - 1;
    let mut objects = BTreeMap::new();
    let mut vert = BTreeMap::new();
    let mut horiz = BTreeMap::new();
    for (m, n) in entries(k, level) {
        let obj = if n - m == 1 { frame.part(n).clone() } else { slice(x, cut(m), frame.weight(n)) };
        objects.insert((m, n), obj);
    }
    for (m, n) in entries(k, level).into_iter().filter(|e| e.1 - e.0 >= 2) {
        let big = slice(x, cut(m), frame.weight(n));
        let emb = |lo: i64, hi: i64| {
            let s = slice(x, lo, hi);
            let mut e = Matrix::zeros(x.field(), big.dim(), s.dim());
            e.set_block(big.offset(lo + 1), 0, &Matrix::identity(x.field(), s.dim()));
            e
        };
        vert.insert((m, n), RepMorphism::new_unchecked(objects[&(m, n - 1)].clone(), big.clone(), emb(cut(m), frame.weight(n - 1))));
        horiz.insert((m, n), RepMorphism::new_unchecked(big.clone(), objects[&(m + 1, n)].clone(), emb(cut(m + 1), frame.weight(n)).transpose()));
    }
    let g = GenExt::new(frame.clone(), level, objects, vert, horiz)?;
    let sigma: Vec<Matrix> = (1..=k)
        .map(|r| {
            let (p, d) = (frame.weight(r), frame.dim(r));
            phi.matrix.submatrix(a.offset(p), d, x.offset(p), d)
        })
        .collect();
    g.act_aut_a(&sigma)
}

/// Operator blocks `B^{(t)}_{i,j}: A_j -> A_i` for `1 ≤ j - i ≤ level`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockForm {
    pub frame: Arc<Frame>,
    pub level: usize,
    pub blocks: BTreeMap<(usize, usize), Vec<Matrix>>,
}

impl BlockForm {
    pub fn zero(frame: Arc<Frame>, level: usize) -> Result<BlockForm> {
        check_level(frame.k(), level)?;
        let ng = frame.sig().len();
        let blocks = frame
            .block_pairs(level)
            .into_iter()
            .map(|(i, j)| ((i, j), vec![Matrix::zeros(frame.field(), frame.dim(i), frame.dim(j)); ng]))
            .collect();
        Ok(BlockForm { frame, level, blocks })
    }

    /// Generator slots `(i, j, t)` whose degree allows a nonzero block.
    pub fn slots(frame: &Frame, level: usize) -> Vec<(usize, usize, usize)> {
        let sig = frame.sig();
        let mut out = Vec::new();
        for (i, j) in frame.block_pairs(level) {
            for t in 0..sig.len() {
                if frame.weight(i) - frame.weight(j) == sig.degree(t) {
                    out.push((i, j, t));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        check_level(self.frame.k(), self.level)?;
        let sig = self.frame.sig();
        let pairs = self.frame.block_pairs(self.level);
        if self.blocks.len() != pairs.len() || pairs.iter().any(|p| !self.blocks.contains_key(p)) {
            return Err(Error::GenExt("block pairs do not match the level".into()));
        }
        for (&(i, j), bs) in &self.blocks {
            if bs.len() != sig.len() {
                return Err(Error::GenExt(format!("block ({i},{j}): expected one matrix per generator")));
            }
            for (t, b) in bs.iter().enumerate() {
                if b.shape() != (self.frame.dim(i), self.frame.dim(j)) {
                    return Err(Error::GenExt(format!("block ({i},{j}) for {}: wrong shape", sig.generators[t].name)));
                }
                if !b.is_zero() && self.frame.weight(i) - self.frame.weight(j) != sig.degree(t) {
                    return Err(Error::Inhomogeneous { generator: sig.generators[t].name.clone(), row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// `X_{m,n}` on `A_{m+1} ⊕ … ⊕ A_n`.
    pub fn object(&self, m: usize, n: usize) -> WeightedRep {
        if n - m == 1 {
            return self.frame.part(n).clone();
        }
        let span = self.frame.span(m, n);
        let ops = (0..self.frame.sig().len())
            .map(|t| {
                let mut op = Matrix::zeros(self.frame.field(), span.dim(), span.dim());
                for i in m + 1..=n {
                    for j in i + 1..=n {
                        if let Some(bs) = self.blocks.get(&(i, j)) {
                            op.set_block(self.frame.offset_in(m, i), self.frame.offset_in(m, j), &bs[t]);
                        }
                    }
                }
                op
            })
            .collect();
        WeightedRep::new_unchecked(self.frame.sig().clone(), span.support().clone(), ops)
    }

    /// The diagram with standard inclusions and projections.
    pub fn denormalize(&self) -> Result<GenExt> {
        self.validate()?;
        let f = self.frame.field();
        let es = entries(self.frame.k(), self.level);
        let objects: BTreeMap<Entry, WeightedRep> = es.iter().map(|&(m, n)| ((m, n), self.object(m, n))).collect();
        let mut vert = BTreeMap::new();
        let mut horiz = BTreeMap::new();
        for &(m, n) in es.iter().filter(|e| e.1 - e.0 >= 2) {
            let x = &objects[&(m, n)];
            let top = &objects[&(m, n - 1)];
            let right = &objects[&(m + 1, n)];
            let mut v = Matrix::zeros(f, x.dim(), top.dim());
            v.set_block(0, 0, &Matrix::identity(f, top.dim()));
            let mut h = Matrix::zeros(f, right.dim(), x.dim());
            h.set_block(0, self.frame.dim(m + 1), &Matrix::identity(f, right.dim()));
            vert.insert((m, n), RepMorphism::new_unchecked(top.clone(), x.clone(), v));
            horiz.insert((m, n), RepMorphism::new_unchecked(x.clone(), right.clone(), h));
        }
        GenExt::new(self.frame.clone(), self.level, objects, vert, horiz)
    }

    /// Drop the distance-ℓ blocks.
    pub fn truncate(&self) -> Result<BlockForm> {
        if self.level < 2 {
            return Err(Error::Precondition("truncation needs level at least 2".into()));
        }
        let level = self.level - 1;
        let blocks = self.blocks.iter().filter(|((i, j), _)| j - i <= level).map(|(p, b)| (*p, b.clone())).collect();
        Ok(BlockForm { frame: self.frame.clone(), level, blocks })
    }

    /// Raise the level by one with zero blocks on the new diagonal.
    pub fn extend_zero(&self) -> Result<BlockForm> {
        let mut out = BlockForm::zero(self.frame.clone(), self.level + 1)?;
        for (p, b) in &self.blocks {
            out.blocks.insert(*p, b.clone());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests;
