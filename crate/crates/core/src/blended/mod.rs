//! Blended extensions: 3×3 exact diagrams
//!
//! ```text
//!   A1 ──> L ──> A2
//!   ║      │ι     │
//!   A1 ─j> X ─π> N
//!          │ω     │
//!          A3 ══ A3
//! ```
//!
//! built from a top row `L ∈ EXT(A2, A1)` and a right column
//! `N ∈ EXT(A3, A2)`. Classes form a torsor under Ext¹(A3, A1).

use crate::error::{Error, Result};
use crate::exactla::{Matrix, Subspace};
use crate::extmod::{baer_sum_seq, class_of, graded_section, pullback_seq, pushforward_seq, realize, ExtClass, ExtensionSeq};
use crate::repcat::{add_intertwining, direct_sum_with_maps, LinearSystem, MapSpace, RepMorphism, Term, WeightedRep};

#[derive(Clone, Debug, PartialEq)]
pub struct Blend {
    pub l: ExtensionSeq,
    pub n: ExtensionSeq,
    pub mid: WeightedRep,
    /// `L -> X`
    pub iota: RepMorphism,
    /// `X -> N`
    pub pi: RepMorphism,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    Row,
    Column,
}

impl Blend {
    pub fn a1(&self) -> &WeightedRep {
        &self.l.sub
    }
    pub fn a2(&self) -> &WeightedRep {
        &self.l.quot
    }
    pub fn a3(&self) -> &WeightedRep {
        &self.n.quot
    }

    /// `A1 -> X`
    pub fn j(&self) -> RepMorphism {
        self.l.incl.then(&self.iota)
    }

    /// `X -> A3`
    pub fn omega(&self) -> RepMorphism {
        self.pi.then(&self.n.proj)
    }

    /// The middle row `0 -> A1 -> X -> N -> 0`.
    pub fn row(&self) -> ExtensionSeq {
        ExtensionSeq { sub: self.a1().clone(), mid: self.mid.clone(), quot: self.n.mid.clone(), incl: self.j(), proj: self.pi.clone() }
    }

    /// The middle column `0 -> L -> X -> A3 -> 0`.
    pub fn column(&self) -> ExtensionSeq {
        ExtensionSeq { sub: self.l.mid.clone(), mid: self.mid.clone(), quot: self.a3().clone(), incl: self.iota.clone(), proj: self.omega() }
    }

    pub fn validate(&self) -> Result<()> {
        self.l.validate()?;
        self.n.validate()?;
        if self.l.quot != self.n.sub {
            return Err(Error::Endpoint("quotient of L differs from the sub object of N".into()));
        }
        self.row().validate().map_err(|e| Error::NotExact(format!("middle row: {e}")))?;
        self.column().validate().map_err(|e| Error::NotExact(format!("middle column: {e}")))?;
        if self.iota.then(&self.pi).matrix != self.l.proj.then(&self.n.incl).matrix {
            return Err(Error::NotExact("square L -> X -> N does not commute".into()));
        }
        Ok(())
    }
}

/// Cocycle of a sequence together with the iso `sub ⊕ quot -> mid` used
/// (columns: sub coordinates first, then quotient coordinates).
fn standard_form(s: &ExtensionSeq) -> Result<(Vec<Matrix>, Matrix)> {
    let e = class_of(s)?;
    let sec = graded_section(&s.proj)?;
    Ok((e.cocycle().to_vec(), s.incl.matrix.hstack(&sec)))
}

/// The blend on `A1 ⊕ A2 ⊕ A3` whose distance-two block is zero.
pub fn make_blend(l: &ExtensionSeq, n: &ExtensionSeq) -> Result<Blend> {
    if l.quot != n.sub {
        return Err(Error::Endpoint("quotient of L differs from the sub object of N".into()));
    }
    let (lam, phi_l) = standard_form(l)?;
    let (nu, phi_n) = standard_form(n)?;
    let (sum, e, p) = direct_sum_with_maps(&[l.sub.clone(), l.quot.clone(), n.quot.clone()])?;
    let ops: Vec<Matrix> = (0..sum.sig().len())
        .map(|t| {
            sum.op(t)
                .add(&e[0].matrix.mul(&lam[t]).mul(&p[1].matrix))
                .add(&e[1].matrix.mul(&nu[t]).mul(&p[2].matrix))
        })
        .collect();
    let mid = sum.with_ops(ops)?;
    let e12 = e[0].matrix.hstack(&e[1].matrix);
    let p23 = p[1].matrix.vstack(&p[2].matrix);
    let inv_l = phi_l.inverse().ok_or_else(|| Error::NotExact("L is not an extension".into()))?;
    let iota = RepMorphism::new(l.mid.clone(), mid.clone(), e12.mul(&inv_l))?;
    let pi = RepMorphism::new(mid.clone(), n.mid.clone(), phi_n.mul(&p23))?;
    let b = Blend { l: l.clone(), n: n.clone(), mid, iota, pi };
    b.validate()?;
    Ok(b)
}

fn check_translation(e: &ExtClass, b: &Blend) -> Result<()> {
    if e.of() != b.a3() || e.by() != b.a1() {
        return Err(Error::Endpoint("translation class must lie in Ext¹(A3, A1)".into()));
    }
    Ok(())
}

/// Act on a blend by `e ∈ Ext¹(A3, A1)`, via either construction.
pub fn translate(e: &ExtClass, b: &Blend, construction: Construction) -> Result<Blend> {
    check_translation(e, b)?;
    let re = realize(e);
    let out = match construction {
        Construction::Row => {
            // X^h + ω*E in EXT(N, A1)
            let pb = pullback_seq(&re, &b.n.proj)?;
            let bs = baer_sum_seq(&b.row(), &pb.seq)?;
            let to_e = RepMorphism::zero(&b.l.mid, &re.mid);
            let into_p = pb.pair_into(&to_e, &b.iota.then(&b.pi))?;
            let iota = bs.pair_into(&b.iota, &into_p)?;
            Blend { l: b.l.clone(), n: b.n.clone(), mid: bs.seq.mid.clone(), iota, pi: bs.seq.proj.clone() }
        }
        Construction::Column => {
            // X^v + (A1 -> L)_* E in EXT(A3, L)
            let po = pushforward_seq(&re, &b.l.incl)?;
            let bs = baer_sum_seq(&b.column(), &po.seq)?;
            let psi = po.descend(&b.l.proj.then(&b.n.incl), &RepMorphism::zero(&re.mid, &b.n.mid))?;
            let pi = bs.descend(&b.pi, &psi)?;
            Blend { l: b.l.clone(), n: b.n.clone(), mid: bs.seq.mid.clone(), iota: bs.seq.incl.clone(), pi }
        }
    };
    out.validate()?;
    Ok(out)
}

/// Same translation written directly on the middle object: operators
/// become `X_t + j ε_t ω` on the same underlying space.
pub fn translate_in_place(e: &ExtClass, b: &Blend) -> Result<Blend> {
    check_translation(e, b)?;
    let j = b.j().matrix;
    let w = b.omega().matrix;
    let ops = (0..b.mid.sig().len()).map(|t| b.mid.op(t).add(&j.mul(&e.cocycle()[t]).mul(&w))).collect();
    let mid = b.mid.with_ops(ops)?;
    let out = Blend {
        l: b.l.clone(),
        n: b.n.clone(),
        mid: mid.clone(),
        iota: RepMorphism::new_unchecked(b.l.mid.clone(), mid.clone(), b.iota.matrix.clone()),
        pi: RepMorphism::new_unchecked(mid, b.n.mid.clone(), b.pi.matrix.clone()),
    };
    out.validate()?;
    Ok(out)
}

/// A middle-object isomorphism inducing the identity on L and N, if any.
pub fn blend_equiv(b1: &Blend, b2: &Blend) -> Result<Option<RepMorphism>> {
    if b1.l != b2.l || b1.n != b2.n {
        return Err(Error::Endpoint("blends have different frames".into()));
    }
    let sp = MapSpace::new(&b1.mid, &b2.mid, 0);
    let mut sys = LinearSystem::new(b1.mid.field(), vec![sp]);
    add_intertwining(&mut sys, 0, &b1.mid, &b2.mid);
    sys.add(&[Term::new(0).right(&b1.iota.matrix)], Some(&b2.iota.matrix));
    sys.add(&[Term::new(0).left(&b2.pi.matrix)], Some(&b1.pi.matrix));
    Ok(sys.solve()?.map(|v| RepMorphism::new_unchecked(b1.mid.clone(), b2.mid.clone(), sys.split(&v)[0].clone())))
}

/// Class of the middle row in Ext¹(N, A1).
pub fn second_row(b: &Blend) -> Result<ExtClass> {
    class_of(&b.row())
}

/// Endomorphisms `g` of X with `g ι = 0` and `π g = 0`; the automorphisms
/// inducing the identity on L and N are exactly `1 + g`.
pub fn aut_blend(b: &Blend) -> Result<(MapSpace, Subspace)> {
    let sp = MapSpace::new(&b.mid, &b.mid, 0);
    let mut sys = LinearSystem::new(b.mid.field(), vec![sp.clone()]);
    add_intertwining(&mut sys, 0, &b.mid, &b.mid);
    sys.add(&[Term::new(0).right(&b.iota.matrix)], None);
    sys.add(&[Term::new(0).left(&b.pi.matrix)], None);
    Ok((sp, sys.kernel()))
}

#[cfg(test)]
mod tests;
