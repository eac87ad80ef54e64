//! Total nonsplitting, rigidity, unipotent radicals and maximality.
//!
//! An extension of `𝟙` by `H` (no weight-0 part in `H`) is totally nonsplit
//! exactly when the degree-0 lift of `𝟙` in the middle object generates the
//! whole middle object: a proper generated subobject `S` meets `H` in a proper
//! `H'`, and `S / H'` splits the pushforward to `H / H'`; conversely a
//! splitting over `H / H'` confines the lift to `𝟙 + H'`.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{Field, Matrix, Scalar, Subspace};
use crate::extmod::{class_of, realize, transfer_unit, ExtClass, ExtSpace, ExtensionSeq};
use crate::genext::{aut_family_space, entries, BlockForm, Fiber, Frame, GenExt};
use crate::repcat::{hom_space, internal_hom, subobject_generated, window_inclusion, window_projection, WeightedRep};

/// Extension of `𝟙` attached to `e`, with the position of the lift of `𝟙`.
fn unit_form(e: &ExtClass) -> Result<(ExtensionSeq, Vec<Scalar>)> {
    let t = transfer_unit(e)?;
    let h = t.by();
    if h.dim_at(0) > 0 {
        return Err(Error::Precondition("the internal Hom has a weight-0 part; the lift of the unit is not unique".into()));
    }
    let seq = realize(&t);
    let f = e.field();
    let mut v = vec![f.zero(); seq.mid.dim()];
    v[seq.mid.offset(0)] = f.one();
    Ok((seq, v))
}

/// Whether the pushforward of `e` along every proper quotient of the
/// internal Hom stays nonsplit.
pub fn totally_nonsplit(e: &ExtClass) -> Result<bool> {
    let (seq, v) = unit_form(e)?;
    let (sub, _) = subobject_generated(&seq.mid, &[v])?;
    Ok(sub.dim() == seq.mid.dim())
}

/// All vertical and horizontal extensions of `g` are totally nonsplit.
pub fn tns_genext(g: &GenExt) -> Result<bool> {
    for (m, n) in g.entries().into_iter().filter(|e| e.1 - e.0 >= 2) {
        if !totally_nonsplit(&class_of(&g.vext(m, n))?)? || !totally_nonsplit(&class_of(&g.hext(m, n))?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `dim End(E) == 1` for the middle object of `e`.
pub fn end_scalar_check(e: &ExtClass) -> Result<bool> {
    if e.field() != Field::Q {
        return Err(Error::Precondition("rigidity of totally nonsplit extensions needs characteristic 0".into()));
    }
    let (by_max, of_min) = (e.by().support().keys().max(), e.of().support().keys().min());
    if let (Some(b), Some(o)) = (by_max, of_min) {
        if b >= o {
            return Err(Error::Precondition("every weight of the sub object must lie below every weight of the quotient".into()));
        }
    }
    Ok(end_dim(&realize(e).mid)? == 1)
}

pub fn end_dim(x: &WeightedRep) -> Result<usize> {
    Ok(hom_space(x, x)?.dim())
}

/// A Lie subalgebra of `End(x)`, stored as a subspace of row-major
/// vectorized matrices.
#[derive(Clone, Debug)]
pub struct LieSubalgebra {
    pub ambient: WeightedRep,
    pub basis: Subspace,
    pub closed: bool,
}

impl LieSubalgebra {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn elements(&self) -> Vec<Matrix> {
        let n = self.ambient.dim();
        self.basis.basis_vectors().into_iter().map(|v| Matrix::from_vec(self.ambient.field(), n, n, v)).collect()
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.basis.contains_vector(&m.to_vec())
    }

    /// Every bracket of basis elements lies in the span.
    pub fn is_bracket_closed(&self) -> bool {
        let els = self.elements();
        els.iter().all(|a| els.iter().all(|b| self.contains(&a.bracket(b))))
    }

    /// Every element lowers degrees strictly.
    pub fn is_degree_negative(&self) -> bool {
        let degs = self.ambient.basis_degrees();
        self.elements().iter().all(|m| {
            (0..m.rows()).all(|i| (0..m.cols()).all(|j| m.get(i, j).is_zero() || degs[i] < degs[j]))
        })
    }
}

/// `dim W₋₁End(x) = Σ_{p<q} dim x_p · dim x_q`.
pub fn w_minus_one_end_dim(x: &WeightedRep) -> usize {
    let ds: Vec<usize> = x.support().values().copied().collect();
    (0..ds.len()).flat_map(|i| (i + 1..ds.len()).map(move |j| (i, j))).map(|(i, j)| ds[i] * ds[j]).sum()
}

/// The Lie algebra generated by the operators of `x`.
pub fn u_radical(x: &WeightedRep) -> LieSubalgebra {
    let f = x.field();
    let n = x.dim();
    let gens: Vec<Matrix> = x.ops().iter().filter(|m| !m.is_zero()).cloned().collect();
    let mut span = Subspace::zero(f, n * n);
    let mut frontier = Vec::new();
    for g in &gens {
        if !span.contains_vector(&g.to_vec()) {
            span = Subspace::from_vectors(f, n * n, &[span.basis_vectors(), vec![g.to_vec()]].concat());
            frontier.push(g.clone());
        }
    }
    let bound = w_minus_one_end_dim(x);
    let mut rounds = 0;
    while !frontier.is_empty() {
        rounds += 1;
        debug_assert!(rounds <= bound + 1);
        let mut next = Vec::new();
        for g in &gens {
            for y in &frontier {
                let b = g.bracket(y);
                if !span.contains_vector(&b.to_vec()) {
                    span = Subspace::from_vectors(f, n * n, &[span.basis_vectors(), vec![b.to_vec()]].concat());
                    next.push(b);
                }
            }
        }
        frontier = next;
    }
    LieSubalgebra { ambient: x.clone(), basis: span, closed: true }
}

pub fn is_maximal(x: &WeightedRep) -> bool {
    u_radical(x).dim() == w_minus_one_end_dim(x)
}

/// Arithmetic form of graded independence for weights `p_1 < … < p_k`:
/// adjacent differences pairwise distinct and disjoint from the rest.
pub fn graded_independent_weights(weights: &[i64]) -> bool {
    let k = weights.len();
    let adjacent: Vec<i64> = (0..k.saturating_sub(1)).map(|r| weights[r] - weights[r + 1]).collect();
    let far: BTreeSet<i64> = (0..k).flat_map(|i| (i + 2..k).map(move |j| (i, j))).map(|(i, j)| weights[i] - weights[j]).collect();
    let distinct: BTreeSet<i64> = adjacent.iter().copied().collect();
    distinct.len() == adjacent.len() && adjacent.iter().all(|d| !far.contains(d))
}

/// Graded independence of pure pieces, computed from the Hom objects `C_r`
/// and `C_0`: simple constituents are weight-indexed, so two objects share a
/// subquotient iff their supports meet.
pub fn graded_independent_parts(parts: &[WeightedRep]) -> Result<bool> {
    let k = parts.len();
    let mut cs: Vec<BTreeSet<i64>> = Vec::new();
    let mut c0 = BTreeSet::new();
    for i in 0..k {
        for j in i + 1..k {
            let h = internal_hom(&parts[j], &parts[i])?;
            let s: BTreeSet<i64> = h.support().keys().copied().collect();
            if j == i + 1 {
                cs.push(s);
            } else {
                c0.extend(s);
            }
        }
    }
    cs.push(c0);
    let general = (0..cs.len()).all(|a| (a + 1..cs.len()).all(|b| cs[a].is_disjoint(&cs[b])));
    let weights: Vec<i64> = parts.iter().map(|p| p.weight().expect("pure")).collect();
    let reduced = graded_independent_weights(&weights);
    if general != reduced {
        return Err(Error::Precondition("weight-difference reduction disagrees with the Hom-object test".into()));
    }
    Ok(general)
}

fn pure_parts(x: &WeightedRep) -> Vec<WeightedRep> {
    x.support().iter().map(|(&d, &n)| WeightedRep::pure(x.sig().clone(), d, n)).collect()
}

pub fn graded_independent(x: &WeightedRep) -> Result<bool> {
    graded_independent_parts(&pure_parts(x))
}

pub fn graded_independent_frame(frame: &Frame) -> Result<bool> {
    graded_independent_parts(frame.parts())
}

/// `0 -> Gr_{p_r} x -> W_{p_{r+1}} x / W_{p_{r-1}} x -> Gr_{p_{r+1}} x -> 0`.
pub fn adjacent_extension(x: &WeightedRep, r: usize) -> Result<ExtensionSeq> {
    let w: Vec<i64> = x.support().keys().copied().collect();
    if r == 0 || r >= w.len() {
        return Err(Error::Precondition(format!("no adjacent extension {r} for {} weights", w.len())));
    }
    let lo = if r == 1 { w[0] - 1 } else { w[r - 2] };
    let (mid, hi) = (w[r - 1], w[r]);
    ExtensionSeq::new(window_inclusion(x, lo, mid, hi), window_projection(x, lo, mid, hi))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaximalityReport {
    pub maximal: bool,
    pub adjacent_tns: Vec<bool>,
    pub u_dim: usize,
    pub w_minus_one_end_dim: usize,
    pub agree: bool,
}

/// Both sides of the maximality criterion for a graded-independent `x`.
pub fn maximality_criterion(x: &WeightedRep) -> Result<MaximalityReport> {
    if x.field() != Field::Q {
        return Err(Error::Precondition("the maximality criterion needs characteristic 0".into()));
    }
    if !graded_independent(x)? {
        return Err(Error::Precondition("object is not graded-independent".into()));
    }
    let k = x.support().len();
    let adjacent_tns = (1..k).map(|r| totally_nonsplit(&class_of(&adjacent_extension(x, r)?)?)).collect::<Result<Vec<_>>>()?;
    let u = u_radical(x);
    let w = w_minus_one_end_dim(x);
    let maximal = u.dim() == w;
    let agree = maximal == adjacent_tns.iter().all(|&b| b);
    Ok(MaximalityReport { maximal, adjacent_tns, u_dim: u.dim(), w_minus_one_end_dim: w, agree })
}

/// Level-1 factor of the classification: `Ext¹(A_{r+1}, A_r)` and its
/// totally nonsplit classes modulo `Aut(A_r) × Aut(A_{r+1})`.
#[derive(Clone, Debug, Serialize)]
pub struct StarFactor {
    pub r: usize,
    pub ext_dim: usize,
    /// Whether some class is totally nonsplit.
    pub nonempty: bool,
    /// For 1-dimensional pieces the orbits of nonzero classes form a
    /// projective space of this dimension.
    pub projective_dim: Option<usize>,
    /// Cocycles of a basis, one text matrix per generator.
    pub basis: Vec<Vec<Vec<Vec<String>>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberGroup {
    pub r: usize,
    pub of_weight: i64,
    pub by_weight: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct StarDescriptor {
    pub level: usize,
    pub graded_independent: bool,
    pub nonempty: bool,
    pub factors: Vec<StarFactor>,
    pub fiber_groups: Vec<FiberGroup>,
    pub surjective: bool,
    /// Unique lift above the pick (zero fiber group).
    pub unique_lift: Option<bool>,
    pub pick_totally_nonsplit: Option<bool>,
    pub lift_totally_nonsplit: Option<bool>,
    pub gamma_trivial: Option<bool>,
}

fn generic_class(space: &Arc<ExtSpace>) -> ExtClass {
    let f = space.field();
    let c: Vec<Scalar> = (0..space.dim()).map(|i| f.from_i64(1 + i as i64)).collect();
    space.from_coords(&c)
}

/// Descriptor of `S*_level(A)`; for `level ≥ 2`, `pick` is a totally nonsplit
/// representative of level `level - 1`.
pub fn classify_star(frame: &Arc<Frame>, level: usize, pick: Option<&GenExt>) -> Result<StarDescriptor> {
    if frame.field() != Field::Q {
        return Err(Error::Precondition("classification needs characteristic 0".into()));
    }
    let gi = graded_independent_frame(frame)?;
    if !gi {
        return Err(Error::Precondition("frame is not graded-independent".into()));
    }
    let k = frame.k();
    if level == 0 || level >= k {
        return Err(Error::Precondition(format!("level {level} outside 1..={}", k - 1)));
    }
    let mut factors = Vec::new();
    for r in 1..k {
        let sp = ExtSpace::new(frame.part(r + 1), frame.part(r))?;
        let nonempty = sp.dim() > 0 && totally_nonsplit(&generic_class(&sp))?;
        let one_dim = frame.dim(r) == 1 && frame.dim(r + 1) == 1;
        let basis = sp.basis().iter().map(|b| b.cocycle().iter().map(Matrix::to_text_rows).collect()).collect();
        factors.push(StarFactor { r, ext_dim: sp.dim(), nonempty, projective_dim: (one_dim && sp.dim() > 0).then(|| sp.dim() - 1), basis });
    }
    let nonempty = factors.iter().all(|f| f.nonempty);
    let mut d = StarDescriptor {
        level,
        graded_independent: gi,
        nonempty,
        factors,
        fiber_groups: Vec::new(),
        surjective: true,
        unique_lift: None,
        pick_totally_nonsplit: None,
        lift_totally_nonsplit: None,
        gamma_trivial: None,
    };
    if level >= 2 {
        let pick = pick.ok_or_else(|| Error::Precondition("a level above 1 needs a picked class one level down".into()))?;
        if pick.frame() != frame || pick.level() != level - 1 {
            return Err(Error::Endpoint("picked class does not match the frame and level".into()));
        }
        let fiber = Fiber::new(pick)?;
        d.fiber_groups = fiber
            .groups()
            .iter()
            .enumerate()
            .map(|(i, g)| FiberGroup { r: i + 1, of_weight: frame.weight(i + 1 + level), by_weight: frame.weight(i + 1), dim: g.dim() })
            .collect();
        d.unique_lift = Some(fiber.group_dim() == 0);
        let tns = tns_genext(pick)?;
        d.pick_totally_nonsplit = Some(tns);
        let lift = fiber.base_point();
        d.lift_totally_nonsplit = Some(tns_genext(lift)?);
        if tns {
            d.gamma_trivial = Some(aut_family_space(pick, pick)?.dim() == 1);
        }
    }
    Ok(d)
}

/// Level-`level` diagram with the given blocks at the pure frame.
pub fn block_genext(frame: &Arc<Frame>, level: usize, blocks: &[((usize, usize), usize, Matrix)]) -> Result<GenExt> {
    let mut bf = BlockForm::zero(frame.clone(), level)?;
    for ((i, j), t, m) in blocks {
        let slot = bf.blocks.get_mut(&(*i, *j)).ok_or_else(|| Error::GenExt(format!("no block ({i},{j}) at level {level}")))?;
        slot[*t] = m.clone();
    }
    bf.denormalize()
}

/// The object `X_{0,k}` of a full-level diagram.
pub fn realize_top(g: &GenExt) -> Result<WeightedRep> {
    let k = g.k();
    if g.level() != k - 1 {
        return Err(Error::Precondition("only full-level diagrams come from a single object".into()));
    }
    debug_assert!(entries(k, g.level()).contains(&(0, k)));
    Ok(g.obj(0, k).clone())
}

/// `0 -> W_mid x / W_lo x -> W_hi x / W_lo x -> W_hi x / W_mid x -> 0`.
pub fn subquotient_extension(x: &WeightedRep, lo: i64, mid: i64, hi: i64) -> Result<ExtensionSeq> {
    ExtensionSeq::new(window_inclusion(x, lo, mid, hi), window_projection(x, lo, mid, hi))
}
