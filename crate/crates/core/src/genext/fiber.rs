//! Fibers of truncation and their torsor structure.

use std::sync::Arc;

use super::{BlockForm, GenExt, GenMorphism};
use crate::blended::{second_row, translate, Blend, Construction};
use crate::error::{Error, Result};
use crate::exactla::{solve, Matrix, Scalar};
use crate::extmod::{pullback, ExtClass, ExtSpace};

/// Level-ℓ generalized extensions lying over a fixed level-(ℓ-1) base,
/// acted on by `∏_r Ext¹(A_{r+ℓ}, A_r)`.
#[derive(Clone, Debug)]
pub struct Fiber {
    base: GenExt,
    level: usize,
    groups: Vec<Arc<ExtSpace>>,
    base_point: GenExt,
}

/// `E_r ↦ σ_r E_r σ_{r+ℓ}⁻¹` on cocycles.
pub fn act_on_group(sigma: &[Matrix], e: &[ExtClass], level: usize) -> Result<Vec<ExtClass>> {
    e.iter()
        .enumerate()
        .map(|(i, c)| {
            let inv = sigma[i + level].inverse().ok_or_else(|| Error::Precondition(format!("component {} is not invertible", i + level + 1)))?;
            c.space().class(c.cocycle().iter().map(|p| sigma[i].mul(p).mul(&inv)).collect())
        })
        .collect()
}

impl Fiber {
    pub fn new(base: &GenExt) -> Result<Fiber> {
        let level = base.level() + 1;
        let k = base.k();
        if level >= k {
            return Err(Error::Precondition(format!("no level {level} above a frame of {k} pieces")));
        }
        let frame = base.frame();
        let groups = (1..=k - level).map(|r| ExtSpace::new(frame.part(r + level), frame.part(r))).collect::<Result<Vec<_>>>()?;
        let (bf, to_normal) = base.normalize()?;
        let split = bf.extend_zero()?.denormalize()?;
        let base_point = super::transport(&split, &to_normal.inverse()?, base)?;
        Ok(Fiber { base: base.clone(), level, groups, base_point })
    }

    pub fn base(&self) -> &GenExt {
        &self.base
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// `Ext¹(A_{r+ℓ}, A_r)` for `r = 1, …, k - ℓ`.
    pub fn groups(&self) -> &[Arc<ExtSpace>] {
        &self.groups
    }

    pub fn group_dim(&self) -> usize {
        self.groups.iter().map(|g| g.dim()).sum()
    }

    pub fn base_point(&self) -> &GenExt {
        &self.base_point
    }

    pub fn zero(&self) -> Vec<ExtClass> {
        self.groups.iter().map(|g| g.zero()).collect()
    }

    /// Group element from concatenated coordinates.
    pub fn element(&self, c: &[Scalar]) -> Vec<ExtClass> {
        let mut off = 0;
        self.groups
            .iter()
            .map(|g| {
                let e = g.from_coords(&c[off..off + g.dim()]);
                off += g.dim();
                e
            })
            .collect()
    }

    pub fn flat(e: &[ExtClass]) -> Vec<Scalar> {
        e.iter().flat_map(|c| c.coords()).collect()
    }

    /// Every group element (prime fields).
    pub fn all_elements(&self) -> Vec<Vec<ExtClass>> {
        let mut out: Vec<Vec<ExtClass>> = vec![vec![]];
        for g in &self.groups {
            let cls = g.all_classes();
            out = out.into_iter().flat_map(|pre| cls.iter().map(move |c| [pre.clone(), vec![c.clone()]].concat())).collect();
        }
        out
    }

    fn check_member(&self, member: &GenExt) -> Result<()> {
        if member.level() != self.level || member.truncate()? != self.base {
            return Err(Error::Precondition("diagram does not lie in this fiber".into()));
        }
        Ok(())
    }

    fn check_element(&self, e: &[ExtClass]) -> Result<()> {
        if e.len() != self.groups.len() {
            return Err(Error::Endpoint(format!("expected {} classes, got {}", self.groups.len(), e.len())));
        }
        for (i, (c, g)) in e.iter().zip(&self.groups).enumerate() {
            if c.of() != &g.of || c.by() != &g.by {
                return Err(Error::Endpoint(format!("class {} lies in the wrong group", i + 1)));
            }
        }
        Ok(())
    }

    /// The blended extension around the lowest entry `(r-1, r+ℓ)`.
    pub fn blend(&self, member: &GenExt, r: usize) -> Blend {
        let (m, n) = (r - 1, r + self.level);
        Blend {
            l: member.hext(m, n - 1),
            n: member.vext(m + 1, n),
            mid: member.obj(m, n).clone(),
            iota: member.v(m, n).clone(),
            pi: member.h(m, n).clone(),
        }
    }

    /// `E * member`.
    pub fn act(&self, e: &[ExtClass], member: &GenExt) -> Result<GenExt> {
        self.check_member(member)?;
        self.check_element(e)?;
        let rows = e
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let b = translate(c, &self.blend(member, i + 1), Construction::Row)?;
                Ok((b.mid, b.iota, b.pi))
            })
            .collect::<Result<Vec<_>>>()?;
        self.base.extend(rows)
    }

    /// `c * base_point`.
    pub fn lift(&self, c: &[ExtClass]) -> Result<GenExt> {
        self.act(c, &self.base_point)
    }

    /// The group element carrying the base point to `member`, read off
    /// second rows.
    pub fn coords(&self, member: &GenExt) -> Result<Vec<ExtClass>> {
        self.check_member(member)?;
        self.groups
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let b = self.blend(member, i + 1);
                let b0 = self.blend(&self.base_point, i + 1);
                let diff = second_row(&b)?.sub(&second_row(&b0)?)?;
                let images: Vec<Vec<Scalar>> = g.basis().iter().map(|e| Ok(pullback(e, &b.n.proj)?.reduced().to_vec())).collect::<Result<_>>()?;
                let f = g.field();
                if images.is_empty() {
                    return if diff.is_split() { Ok(g.zero()) } else { Err(Error::GenExt("second rows are not related by the group".into())) };
                }
                let a = Matrix::from_fn(f, diff.reduced().len(), images.len(), |r, c| images[c][r].clone());
                let rhs = Matrix::column(f, diff.reduced());
                let x = solve(&a, &rhs)?.ok_or_else(|| Error::GenExt("second rows are not related by the group".into()))?;
                Ok(g.from_coords(&x.col(0)))
            })
            .collect()
    }

    /// Same coordinates, read off the distance-ℓ blocks of the normal form.
    pub fn block_coords(&self, member: &GenExt) -> Result<Vec<ExtClass>> {
        self.check_member(member)?;
        let bf = member.block_form()?;
        let bp = self.base_point.block_form()?;
        self.groups
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let key = (i + 1, i + 1 + self.level);
                let cocycle = bf.blocks[&key].iter().zip(&bp.blocks[&key]).map(|(a, b)| a.sub(b)).collect();
                g.class(cocycle)
            })
            .collect()
    }

    /// The member whose normal form carries the given distance-ℓ blocks
    /// over the base point's.
    pub fn from_blocks(&self, e: &[ExtClass]) -> Result<GenExt> {
        self.check_element(e)?;
        let (bf, to_normal) = self.base.normalize()?;
        let mut top: BlockForm = bf.extend_zero()?;
        for (i, c) in e.iter().enumerate() {
            top.blocks.insert((i + 1, i + 1 + self.level), c.cocycle().to_vec());
        }
        super::transport(&top.denormalize()?, &to_normal.inverse()?, &self.base)
    }

    /// Transport of `member` along an automorphism of the base.
    pub fn gamma_act(&self, sigma: &GenMorphism, member: &GenExt) -> Result<GenExt> {
        self.check_member(member)?;
        super::transport(member, sigma, &self.base)
    }
}
