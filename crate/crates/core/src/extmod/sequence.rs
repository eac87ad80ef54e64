use crate::error::{Error, Result};
use crate::repcat::{cokernel, direct_sum_with_maps, factor_through_epi, factor_through_mono, kernel, RepMorphism, WeightedRep};

/// A short exact sequence `0 -> sub -> mid -> quot -> 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionSeq {
    pub sub: WeightedRep,
    pub mid: WeightedRep,
    pub quot: WeightedRep,
    pub incl: RepMorphism,
    pub proj: RepMorphism,
}

impl ExtensionSeq {
    pub fn new(incl: RepMorphism, proj: RepMorphism) -> Result<ExtensionSeq> {
        let s = ExtensionSeq { sub: incl.source.clone(), mid: incl.target.clone(), quot: proj.target.clone(), incl, proj };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.incl.source != self.sub || self.incl.target != self.mid || self.proj.source != self.mid || self.proj.target != self.quot {
            return Err(Error::NotExact("arrows do not connect the stated objects".into()));
        }
        self.incl.validate()?;
        self.proj.validate()?;
        if !self.incl.is_mono() {
            return Err(Error::NotExact("inclusion is not injective".into()));
        }
        if !self.proj.is_epi() {
            return Err(Error::NotExact("projection is not surjective".into()));
        }
        if !self.proj.matrix.mul(&self.incl.matrix).is_zero() {
            return Err(Error::NotExact("projection does not kill the sub object".into()));
        }
        if self.mid.dim() != self.sub.dim() + self.quot.dim() {
            return Err(Error::NotExact("image of the inclusion differs from the kernel".into()));
        }
        Ok(())
    }
}

/// `E' = E ×_M M'` for `g: M' -> M`, with the structure maps.
pub struct Pullback {
    pub seq: ExtensionSeq,
    /// `E' -> E`
    pub to_mid: RepMorphism,
    k: RepMorphism,
    inj: Vec<RepMorphism>,
}

impl Pullback {
    /// The map `Z -> E'` induced by `a: Z -> E` and `b: Z -> M'` with `π a = g b`.
    pub fn pair_into(&self, a: &RepMorphism, b: &RepMorphism) -> Result<RepMorphism> {
        let into_sum = a.then(&self.inj[0]).add(&b.then(&self.inj[1]));
        factor_through_mono(&self.k, &into_sum)
    }
}

pub fn pullback_seq(s: &ExtensionSeq, g: &RepMorphism) -> Result<Pullback> {
    if g.target != s.quot {
        return Err(Error::Endpoint("pullback map does not end at the quotient".into()));
    }
    let (d, inj, pr) = direct_sum_with_maps(&[s.mid.clone(), g.source.clone()])?;
    let h = pr[0].then(&s.proj).add(&pr[1].then(g).scale(&d.field().from_i64(-1)));
    let (e2, k) = kernel(&h)?;
    let incl = factor_through_mono(&k, &s.incl.then(&inj[0]))?;
    let proj = k.then(&pr[1]);
    let to_mid = k.then(&pr[0]);
    let seq = ExtensionSeq { sub: s.sub.clone(), mid: e2, quot: g.source.clone(), incl, proj };
    Ok(Pullback { seq, to_mid, k, inj })
}

/// `E' = (N' ⊕ E) / N` for `f: N -> N'`, with the structure maps.
pub struct Pushout {
    pub seq: ExtensionSeq,
    /// `E -> E'`
    pub from_mid: RepMorphism,
    q: RepMorphism,
    pr: Vec<RepMorphism>,
}

impl Pushout {
    /// The map `E' -> Z` induced by `a: N' -> Z` and `b: E -> Z` with `a f = b i`.
    pub fn descend(&self, a: &RepMorphism, b: &RepMorphism) -> Result<RepMorphism> {
        factor_through_epi(&self.q, &self.pr[0].then(a).add(&self.pr[1].then(b)))
    }
}

pub fn pushforward_seq(s: &ExtensionSeq, f: &RepMorphism) -> Result<Pushout> {
    if f.source != s.sub {
        return Err(Error::Endpoint("pushforward map does not start at the sub object".into()));
    }
    let (d, inj, pr) = direct_sum_with_maps(&[f.target.clone(), s.mid.clone()])?;
    let h = f.then(&inj[0]).add(&s.incl.then(&inj[1]).scale(&d.field().from_i64(-1)));
    let c = cokernel(&h)?;
    let q = c.proj;
    let incl = inj[0].then(&q);
    let proj = factor_through_epi(&q, &pr[1].then(&s.proj))?;
    let from_mid = inj[1].then(&q);
    let seq = ExtensionSeq { sub: f.target.clone(), mid: c.obj, quot: s.quot.clone(), incl, proj };
    Ok(Pushout { seq, from_mid, q, pr })
}

/// Baer sum of two extensions with the same end terms, built as
/// `(E1 ×_M E2) / antidiagonal(N)`.
pub struct BaerSum {
    pub seq: ExtensionSeq,
    k: RepMorphism,
    q: RepMorphism,
    inj: Vec<RepMorphism>,
    pr: Vec<RepMorphism>,
}

impl BaerSum {
    /// The map `Z -> E` induced by `a: Z -> E1`, `b: Z -> E2` agreeing over M.
    pub fn pair_into(&self, a: &RepMorphism, b: &RepMorphism) -> Result<RepMorphism> {
        let into_sum = a.then(&self.inj[0]).add(&b.then(&self.inj[1]));
        Ok(factor_through_mono(&self.k, &into_sum)?.then(&self.q))
    }

    /// The map `E -> Z` induced by `a: E1 -> Z`, `b: E2 -> Z` with `a i1 = b i2`.
    pub fn descend(&self, a: &RepMorphism, b: &RepMorphism) -> Result<RepMorphism> {
        let on_fiber = self.k.then(&self.pr[0].then(a).add(&self.pr[1].then(b)));
        factor_through_epi(&self.q, &on_fiber)
    }
}

pub fn baer_sum_seq(s1: &ExtensionSeq, s2: &ExtensionSeq) -> Result<BaerSum> {
    if s1.sub != s2.sub || s1.quot != s2.quot {
        return Err(Error::Endpoint("Baer sum needs equal end terms".into()));
    }
    let (d, inj, pr) = direct_sum_with_maps(&[s1.mid.clone(), s2.mid.clone()])?;
    let minus = d.field().from_i64(-1);
    let h = pr[0].then(&s1.proj).add(&pr[1].then(&s2.proj).scale(&minus));
    let (_, k) = kernel(&h)?;
    let anti = s1.incl.then(&inj[0]).add(&s2.incl.then(&inj[1]).scale(&minus));
    let anti_f = factor_through_mono(&k, &anti)?;
    let c = cokernel(&anti_f)?;
    let q = c.proj;
    let incl = factor_through_mono(&k, &s1.incl.then(&inj[0]))?.then(&q);
    let proj = factor_through_epi(&q, &k.then(&pr[0]).then(&s1.proj))?;
    let seq = ExtensionSeq { sub: s1.sub.clone(), mid: c.obj, quot: s1.quot.clone(), incl, proj };
    Ok(BaerSum { seq, k, q, inj, pr })
}
