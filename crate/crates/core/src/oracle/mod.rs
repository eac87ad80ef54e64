//! Exhaustive census of generalized extensions over tiny prime fields.
//!
//! Classes are found by explicit equivalence searches against stored
//! representatives, never by normal forms, so the counts here are an
//! independent check on the fiber and orbit machinery.

mod quantifier;

pub use quantifier::{default_quantifier_objects, enumerate_subspaces, quantified_nonsplit, subobject_quantifier_check, QuantifierCase, QuantifierReport};

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{Field, Matrix, Scalar};
use crate::genext::{aut_family_space, equiv, gamma_stabilizer, BlockForm, EquivMode, Fiber, Frame, GenExt, GenMorphism};
use crate::random;
use crate::repcat::{ModelSignature, WeightedRep};

/// Hard cap on enumerated configurations.
pub const SEARCH_BOUND: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusConfig {
    pub p: u32,
    /// Frame weights in ascending order; every piece is 1-dimensional.
    pub weights: Vec<i64>,
    /// Generator degrees (negative).
    pub gens: Vec<i64>,
    pub max_level: usize,
    /// Scrambled copies of each block form in the raw set.
    pub copies: usize,
    pub seed: u64,
}

impl CensusConfig {
    pub fn new(p: u32, weights: Vec<i64>, gens: Vec<i64>, max_level: usize) -> CensusConfig {
        CensusConfig { p, weights, gens, max_level, copies: 2, seed: 0 }
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    fn validate(&self) -> Result<()> {
        if self.p != 2 && self.p != 3 {
            return Err(Error::Precondition(format!("census runs over F_2 or F_3, got p = {}", self.p)));
        }
        let k = self.k();
        if !(2..=4).contains(&k) {
            return Err(Error::Precondition(format!("frame must have 2 to 4 pieces, got {k}")));
        }
        if self.weights.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("weights must be strictly increasing".into()));
        }
        if self.max_level == 0 || self.max_level >= k {
            return Err(Error::Precondition(format!("levels run over 1..={}", k - 1)));
        }
        if self.copies == 0 {
            return Err(Error::Precondition("at least one copy per block form".into()));
        }
        Ok(())
    }

    fn frame(&self) -> Result<Arc<Frame>> {
        let names: Vec<String> = (0..self.gens.len()).map(|i| format!("x{i}")).collect();
        let sig = ModelSignature::new(Field::Fp(self.p), names.iter().map(String::as_str).zip(self.gens.iter().copied()).collect())?;
        Frame::new(self.weights.iter().map(|&w| WeightedRep::pure(sig.clone(), w, 1)).collect())
    }

    /// Raw configurations over all levels, or an error above the bound.
    pub fn search_size(&self) -> Result<u128> {
        self.validate()?;
        let frame = self.frame()?;
        let mut total: u128 = 0;
        for level in 1..=self.max_level {
            let slots = BlockForm::slots(&frame, level).len() as u32;
            let n = (self.p as u128).checked_pow(slots).and_then(|x| x.checked_mul(self.copies as u128));
            total = n.and_then(|n| total.checked_add(n)).ok_or_else(|| Error::Bound("configuration count overflows".into()))?;
        }
        if total > SEARCH_BOUND {
            return Err(Error::Bound(format!("{total} configurations exceed the bound {SEARCH_BOUND}")));
        }
        Ok(total)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaReport {
    /// `∼`-class of the base one level down.
    pub base_class: usize,
    pub aut_order: usize,
    pub fiber_size: usize,
    pub orbits: usize,
    /// `∼`-classes of this level lying over the base's `∼`-class.
    pub iso_classes_over: usize,
    pub stabilizer_checks: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub raw: usize,
    pub strict_classes: usize,
    pub iso_classes: usize,
    pub aut_a_orbits: usize,
    /// `|∏_r Ext¹(A_{r+ℓ}, A_r)|`.
    pub torsor_order: usize,
    /// Strict classes above each strict class one level down (one entry at
    /// level 1).
    pub fiber_sizes: Vec<usize>,
    pub surjective: bool,
    pub gamma: Vec<GammaReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub config: CensusConfig,
    pub levels: Vec<LevelReport>,
    pub violations: Vec<String>,
    pub ok: bool,
    pub certifies: Vec<String>,
}

/// Classes of one level: representatives, their truncation classes, and
/// buckets keyed by the truncation class.
#[derive(Default)]
struct Classes {
    reps: Vec<GenExt>,
    parent: Vec<usize>,
    buckets: BTreeMap<usize, Vec<usize>>,
}

impl Classes {
    fn find(&self, key: usize, g: &GenExt, mode: EquivMode, seed: u64) -> Result<Option<usize>> {
        let Some(ids) = self.buckets.get(&key) else { return Ok(None) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for &id in ids {
            if equiv(g, &self.reps[id], mode, &mut rng)?.is_some() {
                return Ok(Some(id));
            }
        }
        Ok(None)
    }

    fn insert(&mut self, key: usize, g: GenExt) -> usize {
        let id = self.reps.len();
        self.reps.push(g);
        self.parent.push(key);
        self.buckets.entry(key).or_default().push(id);
        id
    }

    fn len(&self) -> usize {
        self.reps.len()
    }
}

struct Census {
    cfg: CensusConfig,
    frame: Arc<Frame>,
    /// Strict classes per level (index 0 is level 1).
    strict: Vec<Classes>,
    /// Isomorphism classes per level, keyed by the truncation's iso class;
    /// `iso_of[ℓ][strict id]` maps strict classes to iso classes.
    iso: Vec<Classes>,
    iso_of: Vec<Vec<usize>>,
    violations: Vec<String>,
}

fn union_find_count(parent: &mut [usize]) -> usize {
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..parent.len() {
        let r = root(parent, i);
        parent[i] = r;
    }
    (0..parent.len()).filter(|&i| parent[i] == i).count()
}

fn unite(parent: &mut [usize], a: usize, b: usize) {
    let (mut x, mut y) = (a, b);
    while parent[x] != x {
        x = parent[x];
    }
    while parent[y] != y {
        y = parent[y];
    }
    if x != y {
        parent[x.max(y)] = x.min(y);
    }
}

/// All `(σ_2, …, σ_k)` with `σ_1 = 1`, as 1×1 matrices.
fn aut_a_elements(field: Field, k: usize) -> Vec<Vec<Matrix>> {
    let units: Vec<Scalar> = field.elements().into_iter().filter(|s| !s.is_zero()).collect();
    let mut out = vec![vec![Matrix::identity(field, 1)]];
    for _ in 1..k {
        out = out.into_iter().flat_map(|pre| units.iter().map(move |u| [pre.clone(), vec![Matrix::scalar(field, 1, u)]].concat())).collect();
    }
    out
}

/// Every coefficient vector of length `n` over a prime field.
fn all_vectors(field: Field, n: usize) -> Vec<Vec<Scalar>> {
    let el = field.elements();
    let mut out: Vec<Vec<Scalar>> = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|pre| el.iter().map(move |e| [pre.clone(), vec![e.clone()]].concat())).collect();
    }
    out
}

fn text_key(e: &[crate::extmod::ExtClass]) -> Vec<String> {
    Fiber::flat(e).iter().map(Scalar::to_text).collect()
}

fn seed_of(base: u64, level: usize, i: usize) -> u64 {
    base ^ ((level as u64) << 48) ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

impl Census {
    fn strict_lookup(&self, g: &GenExt) -> Result<Option<usize>> {
        let level = g.level();
        let key = if level == 1 {
            0
        } else {
            match self.strict_lookup(&g.truncate()?)? {
                Some(k) => k,
                None => return Ok(None),
            }
        };
        self.strict[level - 1].find(key, g, EquivMode::Strict, 0)
    }

    fn raw_configs(&self, level: usize) -> Vec<GenExt> {
        let slots = BlockForm::slots(&self.frame, level);
        let field = self.frame.field();
        let p = self.cfg.p as usize;
        let count = p.pow(slots.len() as u32);
        (0..count * self.cfg.copies)
            .into_par_iter()
            .map(|idx| {
                let (form, copy) = (idx / self.cfg.copies, idx % self.cfg.copies);
                let mut bf = BlockForm::zero(self.frame.clone(), level).expect("level in range");
                let mut rest = form;
                for &(i, j, t) in &slots {
                    bf.blocks.get_mut(&(i, j)).expect("slot")[t] = Matrix::scalar(field, 1, &field.from_i64((rest % p) as i64));
                    rest /= p;
                }
                let g = bf.denormalize().expect("block forms denormalize");
                if copy == 0 {
                    g
                } else {
                    random::scramble(&g, &mut random::rng(seed_of(self.cfg.seed, level, idx)), 3).0
                }
            })
            .collect()
    }

    /// Strict classes of a level from its raw configurations.
    fn classify_strict(&mut self, level: usize, raw: &[GenExt]) -> Result<()> {
        let keys: Vec<Result<Option<usize>>> = raw
            .par_iter()
            .map(|g| if level == 1 { Ok(Some(0)) } else { self.strict_lookup(&g.truncate()?) })
            .collect();
        let mut by_key: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, k) in keys.into_iter().enumerate() {
            match k? {
                Some(k) => by_key.entry(k).or_default().push(i),
                None => self.violations.push(format!("level {level}: raw configuration {i} truncates outside every class")),
            }
        }
        let per_bucket: Vec<(usize, Result<Vec<usize>>)> = by_key
            .into_par_iter()
            .map(|(key, idxs)| {
                let mut reps: Vec<usize> = Vec::new();
                let out = (|| {
                    for i in idxs {
                        let mut rng = random::rng(0);
                        let mut found = false;
                        for &r in &reps {
                            if equiv(&raw[i], &raw[r], EquivMode::Strict, &mut rng)?.is_some() {
                                found = true;
                                break;
                            }
                        }
                        if !found {
                            reps.push(i);
                        }
                    }
                    Ok(reps)
                })();
                (key, out)
            })
            .collect();
        let mut classes = Classes::default();
        for (key, reps) in per_bucket {
            for r in reps? {
                classes.insert(key, raw[r].clone());
            }
        }
        self.strict.push(classes);
        Ok(())
    }

    /// Isomorphism classes of the strict representatives of a level.
    fn classify_iso(&mut self, level: usize) -> Result<()> {
        let strict = &self.strict[level - 1];
        let keys: Vec<usize> = (0..strict.len()).map(|i| if level == 1 { 0 } else { self.iso_of[level - 2][strict.parent[i]] }).collect();
        let mut by_key: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &k) in keys.iter().enumerate() {
            by_key.entry(k).or_default().push(i);
        }
        let per_bucket: Vec<(usize, Result<Vec<(usize, usize)>>)> = by_key
            .into_par_iter()
            .map(|(key, idxs)| {
                let out = (|| {
                    let mut reps: Vec<usize> = Vec::new();
                    let mut assign = Vec::new();
                    for i in idxs {
                        let mut rng = random::rng(seed_of(self.cfg.seed, level, i));
                        let mut hit = None;
                        for (slot, &r) in reps.iter().enumerate() {
                            if equiv(&strict.reps[i], &strict.reps[r], EquivMode::Iso, &mut rng)?.is_some() {
                                hit = Some(slot);
                                break;
                            }
                        }
                        let slot = hit.unwrap_or_else(|| {
                            reps.push(i);
                            reps.len() - 1
                        });
                        assign.push((i, reps[slot]));
                    }
                    Ok(assign)
                })();
                (key, out)
            })
            .collect();
        let mut classes = Classes::default();
        let mut of = vec![usize::MAX; strict.len()];
        let mut rep_id: BTreeMap<usize, usize> = BTreeMap::new();
        for (key, assign) in per_bucket {
            for (i, r) in assign? {
                let id = *rep_id.entry(r).or_insert_with(|| classes.insert(key, strict.reps[r].clone()));
                of[i] = id;
            }
        }
        self.iso.push(classes);
        self.iso_of.push(of);
        Ok(())
    }

    /// `Aut(A)` orbits on strict classes, compared with the iso partition.
    fn aut_a_orbits(&mut self, level: usize) -> Result<usize> {
        let strict = &self.strict[level - 1];
        let sigmas = aut_a_elements(self.frame.field(), self.frame.k());
        let images: Vec<Result<Vec<Option<usize>>>> = strict
            .reps
            .par_iter()
            .map(|g| sigmas.iter().map(|s| self.strict_lookup(&g.act_aut_a(s)?)).collect())
            .collect();
        let mut parent: Vec<usize> = (0..strict.len()).collect();
        for (i, im) in images.into_iter().enumerate() {
            for j in im? {
                match j {
                    Some(j) => unite(&mut parent, i, j),
                    None => self.violations.push(format!("level {level}: Aut(A) moves class {i} outside every class")),
                }
            }
        }
        let orbits = union_find_count(&mut parent);
        let of = &self.iso_of[level - 1];
        for i in 0..parent.len() {
            for j in i + 1..parent.len() {
                if (parent[i] == parent[j]) != (of[i] == of[j]) {
                    self.violations.push(format!("level {level}: classes {i}, {j} disagree between Aut(A) orbits and isomorphism"));
                }
            }
        }
        Ok(orbits)
    }

    /// Fibers over each strict class of the previous level: sizes, the lift
    /// bijection, and surjectivity.
    fn fibers(&mut self, level: usize, torsor: usize) -> Result<(Vec<usize>, bool)> {
        if level == 1 {
            let n = self.strict[0].len();
            if n != torsor {
                self.violations.push(format!("level 1: {n} strict classes, expected {torsor}"));
            }
            return Ok((vec![n], n > 0));
        }
        let below = &self.strict[level - 2];
        let here = &self.strict[level - 1];
        let checks: Vec<Result<(usize, Vec<String>)>> = (0..below.len())
            .into_par_iter()
            .map(|b| {
                let mut v = Vec::new();
                let bucket = here.buckets.get(&b).cloned().unwrap_or_default();
                let fiber = Fiber::new(&below.reps[b])?;
                let mut hit = vec![false; bucket.len()];
                for c in fiber.all_elements() {
                    let lift = fiber.lift(&c)?;
                    match here.find(b, &lift, EquivMode::Strict, 0)? {
                        Some(id) => {
                            let pos = bucket.iter().position(|&x| x == id).expect("bucket member");
                            if hit[pos] {
                                v.push(format!("level {level}: two lifts over base {b} share class {id}"));
                            }
                            hit[pos] = true;
                        }
                        None => v.push(format!("level {level}: a lift over base {b} is in no class")),
                    }
                }
                if hit.iter().any(|h| !h) {
                    v.push(format!("level {level}: some class over base {b} is not a lift"));
                }
                if bucket.len() != torsor {
                    v.push(format!("level {level}: fiber over base {b} has {} classes, expected {torsor}", bucket.len()));
                }
                Ok((bucket.len(), v))
            })
            .collect();
        let mut sizes = Vec::new();
        for c in checks {
            let (n, v) = c?;
            sizes.push(n);
            self.violations.extend(v);
        }
        let surjective = sizes.iter().all(|&n| n > 0);
        if !surjective {
            self.violations.push(format!("level {level}: truncation is not surjective"));
        }
        Ok((sizes, surjective))
    }

    /// Orbits of `Aut(base)` on each fiber, against iso classes above the
    /// base, with the stabilizer description checked element by element.
    fn gamma(&mut self, level: usize) -> Result<Vec<GammaReport>> {
        let field = self.frame.field();
        let iso_below = &self.iso[level - 2];
        let iso_here = &self.iso[level - 1];
        let results: Vec<Result<(GammaReport, Vec<String>)>> = (0..iso_below.len())
            .into_par_iter()
            .map(|bc| {
                let mut v = Vec::new();
                let base = &iso_below.reps[bc];
                let fiber = Fiber::new(base)?;
                let space = aut_family_space(base, base)?;
                if (self.cfg.p as u128).pow(space.dim() as u32) > SEARCH_BOUND {
                    return Err(Error::Bound(format!("automorphism space of dimension {} is too large", space.dim())));
                }
                let auts: Vec<GenMorphism> = all_vectors(field, space.dim()).iter().map(|c| space.family(c)).filter(|f| f.is_iso()).collect();
                let elems = fiber.all_elements();
                let index: BTreeMap<Vec<String>, usize> = elems.iter().enumerate().map(|(i, e)| (text_key(e), i)).collect();
                let members: Vec<GenExt> = elems.iter().map(|e| fiber.lift(e)).collect::<Result<_>>()?;
                let mut parent: Vec<usize> = (0..members.len()).collect();
                let mut stab = vec![0usize; members.len()];
                let mut checks = 0;
                for (i, m) in members.iter().enumerate() {
                    let st = gamma_stabilizer(base, m)?;
                    for s in &auts {
                        let moved = fiber.gamma_act(s, m)?;
                        let j = index[&text_key(&fiber.coords(&moved)?)];
                        unite(&mut parent, i, j);
                        if (j == i) != st.fixes(s) {
                            v.push(format!("level {level}: stabilizer description fails over base {bc}, member {i}"));
                        }
                        stab[i] += usize::from(j == i);
                        checks += 1;
                    }
                }
                let orbits = union_find_count(&mut parent);
                for i in 0..members.len() {
                    let size = parent.iter().filter(|&&r| r == parent[i]).count();
                    if size * stab[i] != auts.len() {
                        v.push(format!("level {level}: orbit-stabilizer fails over base {bc}, member {i}"));
                    }
                }
                let over = iso_here.buckets.get(&bc).map_or(0, Vec::len);
                if orbits != over {
                    v.push(format!("level {level}: base {bc} has {orbits} orbits but {over} isomorphism classes above it"));
                }
                Ok((GammaReport { base_class: bc, aut_order: auts.len(), fiber_size: members.len(), orbits, iso_classes_over: over, stabilizer_checks: checks }, v))
            })
            .collect();
        let mut out = Vec::new();
        for r in results {
            let (g, v) = r?;
            out.push(g);
            self.violations.extend(v);
        }
        Ok(out)
    }
}

/// Thread count from `PANACHE_THREADS`, else the machine's parallelism.
pub fn thread_count() -> usize {
    std::env::var("PANACHE_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn census(cfg: &CensusConfig) -> Result<CensusReport> {
    cfg.search_size()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(thread_count()).build().map_err(|e| Error::Precondition(e.to_string()))?;
    pool.install(|| run_census(cfg))
}

fn run_census(cfg: &CensusConfig) -> Result<CensusReport> {
    let frame = cfg.frame()?;
    let mut c = Census { cfg: cfg.clone(), frame: frame.clone(), strict: Vec::new(), iso: Vec::new(), iso_of: Vec::new(), violations: Vec::new() };
    let mut levels = Vec::new();
    for level in 1..=cfg.max_level {
        let raw = c.raw_configs(level);
        c.classify_strict(level, &raw)?;
        c.classify_iso(level)?;
        let torsor: usize = (1..=frame.k() - level)
            .map(|r| Ok((cfg.p as usize).pow(crate::extmod::ExtSpace::new(frame.part(r + level), frame.part(r))?.dim() as u32)))
            .product::<Result<usize>>()?;
        let (fiber_sizes, surjective) = c.fibers(level, torsor)?;
        let aut_a_orbits = c.aut_a_orbits(level)?;
        let iso_classes = c.iso[level - 1].len();
        if aut_a_orbits != iso_classes {
            c.violations.push(format!("level {level}: {aut_a_orbits} Aut(A) orbits but {iso_classes} isomorphism classes"));
        }
        let gamma = if level >= 2 { c.gamma(level)? } else { Vec::new() };
        levels.push(LevelReport {
            level,
            raw: raw.len(),
            strict_classes: c.strict[level - 1].len(),
            iso_classes,
            aut_a_orbits,
            torsor_order: torsor,
            fiber_sizes,
            surjective,
            gamma,
        });
    }
    let ok = c.violations.is_empty();
    Ok(CensusReport {
        config: cfg.clone(),
        levels,
        violations: c.violations,
        ok,
        certifies: vec![
            "strict fibers of truncation are torsors of the product of adjacent-distance Ext groups".into(),
            "truncation is surjective at every level".into(),
            "lifts of the base point biject onto each fiber".into(),
            "isomorphism classes are the Aut(A) orbits of strict classes".into(),
            "isomorphism classes above a base are the Aut(base) orbits on its fiber".into(),
            "stabilizers are the automorphisms of the base that extend to the member".into(),
        ],
    })
}

#[cfg(test)]
mod tests;
