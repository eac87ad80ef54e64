//! Morphism families between generalized extensions.

use std::collections::BTreeMap;

use rand::Rng;

use super::{Entry, Fiber, GenExt};
use crate::error::{Error, Result};
use crate::exactla::{Matrix, Scalar, Subspace};
use crate::extmod::ExtClass;
use crate::repcat::{add_intertwining, factor_through_epi, factor_through_mono, find_invertible_coeffs, LinearSystem, MapSpace, RepMorphism, Term};

/// One map per entry, commuting with all arrows.
#[derive(Clone, Debug, PartialEq)]
pub struct GenMorphism {
    pub maps: BTreeMap<Entry, RepMorphism>,
}

impl GenMorphism {
    pub fn identity(g: &GenExt) -> GenMorphism {
        GenMorphism { maps: g.objects().iter().map(|(e, x)| (*e, RepMorphism::identity(x))).collect() }
    }

    pub fn at(&self, m: usize, n: usize) -> &RepMorphism {
        &self.maps[&(m, n)]
    }

    /// Component on `A_r`.
    pub fn on_a(&self, r: usize) -> &Matrix {
        &self.maps[&(r - 1, r)].matrix
    }

    pub fn a_components(&self) -> Vec<Matrix> {
        let k = self.maps.keys().map(|e| e.1).max().unwrap_or(0);
        (1..=k).map(|r| self.on_a(r).clone()).collect()
    }

    /// `other ∘ self`, entrywise.
    pub fn then(&self, other: &GenMorphism) -> GenMorphism {
        GenMorphism { maps: self.maps.iter().map(|(e, f)| (*e, f.then(&other.maps[e]))).collect() }
    }

    pub fn is_iso(&self) -> bool {
        self.maps.values().all(RepMorphism::is_iso)
    }

    pub fn inverse(&self) -> Result<GenMorphism> {
        Ok(GenMorphism { maps: self.maps.iter().map(|(e, f)| Ok((*e, f.inverse()?))).collect::<Result<_>>()? })
    }

    /// Entries with `n - m ≤ level + 1`.
    pub fn restrict(&self, level: usize) -> GenMorphism {
        GenMorphism { maps: self.maps.iter().filter(|(e, _)| e.1 - e.0 <= level + 1).map(|(e, f)| (*e, f.clone())).collect() }
    }

    pub fn is_identity_on_a(&self) -> bool {
        self.maps.iter().filter(|(e, _)| e.1 - e.0 == 1).all(|(_, f)| f.matrix == Matrix::identity(f.matrix.field(), f.matrix.rows()))
    }
}

fn same_shape(g1: &GenExt, g2: &GenExt) -> Result<()> {
    if g1.frame() != g2.frame() {
        return Err(Error::Endpoint("generalized extensions have different frames".into()));
    }
    if g1.level() != g2.level() {
        return Err(Error::Endpoint(format!("levels differ: {} and {}", g1.level(), g2.level())));
    }
    Ok(())
}

/// Error unless `f` is a morphism family `g1 -> g2`.
pub fn is_morphism(g1: &GenExt, g2: &GenExt, f: &GenMorphism) -> Result<()> {
    same_shape(g1, g2)?;
    for e in g1.entries() {
        let fe = f.maps.get(&e).ok_or_else(|| Error::NotMorphism(format!("missing component at ({},{})", e.0, e.1)))?;
        if &fe.source != g1.obj(e.0, e.1) || &fe.target != g2.obj(e.0, e.1) {
            return Err(Error::NotMorphism(format!("component at ({},{}) has the wrong endpoints", e.0, e.1)));
        }
        fe.validate().map_err(|err| Error::NotMorphism(format!("component at ({},{}): {err}", e.0, e.1)))?;
    }
    for (m, n) in g1.entries().into_iter().filter(|e| e.1 - e.0 >= 2) {
        if g1.v(m, n).then(f.at(m, n)).matrix != f.at(m, n - 1).then(g2.v(m, n)).matrix {
            return Err(Error::NotMorphism(format!("vertical square at ({m},{n}) does not commute")));
        }
        if g1.h(m, n).then(f.at(m + 1, n)).matrix != f.at(m, n).then(g2.h(m, n)).matrix {
            return Err(Error::NotMorphism(format!("horizontal square at ({m},{n}) does not commute")));
        }
    }
    Ok(())
}

/// Linear space of morphism families `g1 -> g2`, coordinatized by a kernel.
#[derive(Clone, Debug)]
pub struct FamilySpace {
    g1: GenExt,
    g2: GenExt,
    sys: LinearSystem,
    entries: Vec<Entry>,
    pub kernel: Subspace,
}

fn family_system(g1: &GenExt, g2: &GenExt) -> (LinearSystem, Vec<Entry>) {
    let entries = g1.entries();
    let idx: BTreeMap<Entry, usize> = entries.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let spaces = entries.iter().map(|&(m, n)| MapSpace::new(g1.obj(m, n), g2.obj(m, n), 0)).collect();
    let mut sys = LinearSystem::new(g1.frame().field(), spaces);
    for (i, &(m, n)) in entries.iter().enumerate() {
        add_intertwining(&mut sys, i, g1.obj(m, n), g2.obj(m, n));
    }
    for &(m, n) in entries.iter().filter(|e| e.1 - e.0 >= 2) {
        let (here, up, right) = (idx[&(m, n)], idx[&(m, n - 1)], idx[&(m + 1, n)]);
        sys.add(&[Term::new(here).right(&g1.v(m, n).matrix), Term::new(up).left(&g2.v(m, n).matrix).neg()], None);
        sys.add(&[Term::new(right).right(&g1.h(m, n).matrix), Term::new(here).left(&g2.h(m, n).matrix).neg()], None);
    }
    (sys, entries)
}

impl FamilySpace {
    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    pub fn family_of_vector(&self, v: &[Scalar]) -> GenMorphism {
        let ms = self.sys.split(v);
        GenMorphism {
            maps: self
                .entries
                .iter()
                .zip(ms)
                .map(|(&(m, n), mat)| ((m, n), RepMorphism::new_unchecked(self.g1.obj(m, n).clone(), self.g2.obj(m, n).clone(), mat)))
                .collect(),
        }
    }

    /// Family with the given coordinates on the kernel basis.
    pub fn family(&self, coeffs: &[Scalar]) -> GenMorphism {
        self.family_of_vector(&self.kernel.combination(coeffs))
    }

    pub fn basis(&self) -> Vec<GenMorphism> {
        self.kernel.basis_vectors().iter().map(|v| self.family_of_vector(v)).collect()
    }

    /// Concatenated row-major entries of the `A_r` components.
    pub fn a_coordinates(f: &GenMorphism) -> Vec<Scalar> {
        f.a_components().iter().flat_map(|m| m.to_vec()).collect()
    }

    /// Image of the space in `⊕ End(A_r)`-coordinates.
    pub fn a_projection(&self) -> Subspace {
        let k = self.g1.k();
        let amb: usize = (1..=k).map(|r| self.g1.frame().dim(r).pow(2)).sum();
        let vs: Vec<Vec<Scalar>> = self.basis().iter().map(FamilySpace::a_coordinates).collect();
        Subspace::from_vectors(self.g1.frame().field(), amb, &vs)
    }
}

/// All morphism families `g1 -> g2`.
pub fn aut_family_space(g1: &GenExt, g2: &GenExt) -> Result<FamilySpace> {
    same_shape(g1, g2)?;
    let (sys, entries) = family_system(g1, g2);
    let kernel = sys.kernel();
    Ok(FamilySpace { g1: g1.clone(), g2: g2.clone(), sys, entries, kernel })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivMode {
    /// Identity on every `A_r`.
    Strict,
    /// Any isomorphism family.
    Iso,
}

/// An isomorphism family `g1 -> g2` of the requested kind, if one exists.
pub fn equiv(g1: &GenExt, g2: &GenExt, mode: EquivMode, rng: &mut impl Rng) -> Result<Option<GenMorphism>> {
    same_shape(g1, g2)?;
    let (mut sys, entries) = family_system(g1, g2);
    let field = g1.frame().field();
    match mode {
        EquivMode::Strict => {
            for (i, e) in entries.iter().enumerate() {
                if e.1 - e.0 == 1 {
                    sys.fix(i, &Matrix::identity(field, g1.frame().dim(e.1)));
                }
            }
            let Some(v) = sys.solve()? else { return Ok(None) };
            let space = FamilySpace { g1: g1.clone(), g2: g2.clone(), sys, entries, kernel: Subspace::zero(field, 0) };
            Ok(Some(space.family_of_vector(&v)))
        }
        EquivMode::Iso => {
            let space = FamilySpace { g1: g1.clone(), g2: g2.clone(), kernel: sys.kernel(), sys, entries };
            let basis = space.basis();
            let na: usize = (1..=g1.k()).map(|r| g1.frame().dim(r)).sum();
            let diag: Vec<Matrix> = basis
                .iter()
                .map(|f| f.a_components().iter().skip(1).fold(f.on_a(1).clone(), |acc, m| acc.direct_sum(m)))
                .collect();
            let (c, _) = find_invertible_coeffs(field, &diag, na, rng);
            Ok(c.map(|c| space.family(&c)))
        }
    }
}

/// Extend `f: X1_{i,j} -> X2_{i,j}` to every entry `(m, n)` with `i ≤ m < n ≤ j`.
pub fn spread_morphism(g1: &GenExt, g2: &GenExt, at: Entry, f: &RepMorphism) -> Result<GenMorphism> {
    same_shape(g1, g2)?;
    let (i, j) = at;
    if !g1.entries().contains(&at) {
        return Err(Error::Endpoint(format!("({i},{j}) is not an entry")));
    }
    if &f.source != g1.obj(i, j) || &f.target != g2.obj(i, j) {
        return Err(Error::Endpoint(format!("map does not connect the ({i},{j}) entries")));
    }
    let mut maps = BTreeMap::new();
    for n in i + 1..=j {
        let g = g1.down(i, n, j).then(f);
        let top = factor_through_mono(&g2.down(i, n, j), &g)?;
        for m in i..n {
            let q = g1.right(n, i, m);
            let img = top.then(&g2.right(n, i, m));
            maps.insert((m, n), factor_through_epi(&q, &img)?);
        }
    }
    Ok(GenMorphism { maps })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Glued {
    Morphism(GenMorphism),
    /// First entry where two spreads disagree.
    Incompatible(Entry),
}

/// Glue per-entry maps on the lowest diagonal into a full family.
pub fn glue_lowest(g1: &GenExt, g2: &GenExt, fs: &[RepMorphism]) -> Result<Glued> {
    same_shape(g1, g2)?;
    let d = g1.level() + 1;
    let k = g1.k();
    if fs.len() != k - d + 1 {
        return Err(Error::Endpoint(format!("expected {} lowest-diagonal maps, got {}", k - d + 1, fs.len())));
    }
    let mut maps: BTreeMap<Entry, RepMorphism> = BTreeMap::new();
    for (m, f) in fs.iter().enumerate() {
        let spread = spread_morphism(g1, g2, (m, m + d), f)?;
        for (e, h) in spread.maps {
            match maps.get(&e) {
                Some(prev) if prev.matrix != h.matrix => return Ok(Glued::Incompatible(e)),
                Some(_) => {}
                None => {
                    maps.insert(e, h);
                }
            }
        }
    }
    let fam = GenMorphism { maps };
    is_morphism(g1, g2, &fam)?;
    Ok(Glued::Morphism(fam))
}

/// Replace the objects at the given entries by the targets of the maps,
/// conjugating every arrow touching them.
pub fn transport_entries(g: &GenExt, fs: &BTreeMap<Entry, RepMorphism>) -> Result<GenExt> {
    for (e, f) in fs {
        if !g.objects().contains_key(e) || &f.source != g.obj(e.0, e.1) {
            return Err(Error::Endpoint(format!("map at ({},{}) does not start at that entry", e.0, e.1)));
        }
        if !f.is_iso() {
            return Err(Error::NotMorphism(format!("map at ({},{}) is not an isomorphism", e.0, e.1)));
        }
    }
    let inv: BTreeMap<Entry, RepMorphism> = fs.iter().map(|(e, f)| Ok((*e, f.inverse()?))).collect::<Result<_>>()?;
    let obj = |e: &Entry| fs.get(e).map_or_else(|| g.objects()[e].clone(), |f| f.target.clone());
    let objects = g.objects().keys().map(|e| (*e, obj(e))).collect();
    let conj = |a: &RepMorphism, s: Entry, t: Entry| {
        let mut m = a.matrix.clone();
        if let Some(i) = inv.get(&s) {
            m = m.mul(&i.matrix);
        }
        if let Some(f) = fs.get(&t) {
            m = f.matrix.mul(&m);
        }
        RepMorphism::new_unchecked(obj(&s), obj(&t), m)
    };
    let vert = g.verticals().iter().map(|(&(m, n), a)| ((m, n), conj(a, (m, n - 1), (m, n)))).collect();
    let horiz = g.horizontals().iter().map(|(&(m, n), a)| ((m, n), conj(a, (m, n), (m + 1, n)))).collect();
    let out = GenExt::new_unchecked(g.frame().clone(), g.level(), objects, vert, horiz);
    out.validate()?;
    Ok(out)
}

/// Rebuild `g` along an isomorphism `f` from its truncation onto `target`.
pub fn transport(g: &GenExt, f: &GenMorphism, target: &GenExt) -> Result<GenExt> {
    let base = g.truncate()?;
    is_morphism(&base, target, f)?;
    if !f.is_iso() {
        return Err(Error::NotMorphism("transport needs an isomorphism".into()));
    }
    let out = transport_entries(g, &f.maps)?;
    if &out.truncate()? != target {
        return Err(Error::GenExt("transported diagram does not sit over the target".into()));
    }
    Ok(out)
}

/// Both sides of `tr(E * g, f) ∼′ (f_A · E) * tr(g, f)`, and whether they agree.
pub fn transport_formula_check(
    g: &GenExt,
    e: &[ExtClass],
    f: &GenMorphism,
    target: &GenExt,
    rng: &mut impl Rng,
) -> Result<(GenExt, GenExt, bool)> {
    let src_fiber = Fiber::new(&g.truncate()?)?;
    let dst_fiber = Fiber::new(target)?;
    let lhs = transport(&src_fiber.act(e, g)?, f, target)?;
    let moved = super::act_on_group(&f.a_components(), e, g.level())?;
    let rhs = dst_fiber.act(&moved, &transport(g, f, target)?)?;
    let ok = equiv(&lhs, &rhs, EquivMode::Strict, rng)?.is_some();
    Ok((lhs, rhs, ok))
}

/// `Aut(base)` and the stabilizer of the `∼′`-class of `member`, both in
/// `⊕ End(A_r)` coordinates (row-major, concatenated).
#[derive(Clone, Debug)]
pub struct GammaStabilizer {
    pub aut_base: FamilySpace,
    pub aut_base_a: Subspace,
    pub stabilizer: Subspace,
}

impl GammaStabilizer {
    /// Whether `sigma` (an automorphism family of the base) fixes the class.
    pub fn fixes(&self, sigma: &GenMorphism) -> bool {
        self.stabilizer.contains_vector(&FamilySpace::a_coordinates(sigma))
    }
}

pub fn gamma_stabilizer(base: &GenExt, member: &GenExt) -> Result<GammaStabilizer> {
    if &member.truncate()? != base {
        return Err(Error::Precondition("member does not lie over the base".into()));
    }
    let aut_base = aut_family_space(base, base)?;
    let aut_base_a = aut_base.a_projection();
    let stabilizer = aut_family_space(member, member)?.a_projection();
    Ok(GammaStabilizer { aut_base, aut_base_a, stabilizer })
}
